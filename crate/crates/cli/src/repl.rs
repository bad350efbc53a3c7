//! Interactive session: one growing data-base, one command per line.
//! A bare parenthesized formula asserts; `query`, `saturate`, `network`,
//! `watch`, and `stats` work like the subcommands of the same name but
//! keep their results in the session. Errors are reported inline and the
//! session continues.

use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::Path;

use pckb_core::formula::{parse, parse_goal};
use pckb_core::{forward_chain, semantic_network, show, ChainConfig, KnowledgeBase, WatcherConfig};

const HELP: &str = "\
(<formula>)      assert a fact or a rule
query <goal>     prove a goal atom; ?-variables report bindings
saturate         run forward chaining and keep the result
network          print derivation edges and loops
watch [n]        run the self-watcher for n generations (default 4)
stats            print data-base statistics
:load <path>     merge a data-base file into the session
:save <path>     write the session data-base to a file
:help            show this help
:quit            leave
";

pub fn run(cfg: &ChainConfig) -> Result<(), String> {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut kb = KnowledgeBase::new();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("pckb> ");
            let _ = io::stdout().flush();
        }
        let Some(line) = lines.next() else { break };
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if line == ":quit" || line == ":q" {
            break;
        }
        if line == ":help" {
            print!("{HELP}");
        } else if let Some(path) = line.strip_prefix(":save") {
            save(path.trim(), &kb);
        } else if let Some(path) = line.strip_prefix(":load") {
            load(path.trim(), &mut kb);
        } else if line.starts_with(':') {
            println!("error: unknown meta command: {}", first_word(line));
        } else if let Some(goal) = line.strip_prefix("query") {
            query(goal.trim(), &mut kb, cfg);
        } else if line == "saturate" {
            saturate(&mut kb, cfg);
        } else if line == "network" {
            network(&kb);
        } else if line == "watch" || line.starts_with("watch ") {
            watch(line["watch".len()..].trim(), &mut kb);
        } else if line == "stats" {
            print!("{}", crate::stats_block(&kb));
        } else if line.starts_with('(') {
            assert_line(line, &mut kb);
        } else {
            println!("error: unknown command: {}", first_word(line));
        }
    }
    Ok(())
}

fn first_word(line: &str) -> &str {
    line.split_whitespace().next().unwrap_or(line)
}

fn save(path: &str, kb: &KnowledgeBase) {
    if path.is_empty() {
        println!("error: :save needs a path");
        return;
    }
    match fs::write(path, kb.save_str()) {
        Ok(()) => println!("saved {path}"),
        Err(e) => println!("error: {path}: {e}"),
    }
}

fn load(path: &str, kb: &mut KnowledgeBase) {
    if path.is_empty() {
        println!("error: :load needs a path");
        return;
    }
    let loaded = crate::load_kb_file(Path::new(path))
        .and_then(|file_kb| crate::merge(kb.clone(), &file_kb));
    match loaded {
        Ok(merged) => {
            *kb = merged;
            println!("loaded {path}");
        }
        Err(e) => println!("error: {e}"),
    }
}

fn query(goal: &str, kb: &mut KnowledgeBase, cfg: &ChainConfig) {
    if goal.is_empty() {
        println!("error: query needs a goal atom");
        return;
    }
    match parse_goal(goal) {
        Ok(goal) => {
            let (result, kb2) = show(kb, &goal, cfg);
            *kb = kb2;
            print!("{}", crate::query_output(&goal, &result, false));
        }
        Err(e) => println!("error: {e}"),
    }
}

fn saturate(kb: &mut KnowledgeBase, cfg: &ChainConfig) {
    let before = kb.facts().len();
    let kb2 = forward_chain(kb, cfg);
    for f in &kb2.facts()[before..] {
        println!("{}", f.atom);
    }
    if kb2.saturation_truncated() {
        println!("warning: saturation truncated after {} rounds", cfg.max_rounds);
    }
    *kb = kb2;
}

fn network(kb: &KnowledgeBase) {
    let net = semantic_network(kb);
    for e in &net.edges {
        println!("{} -> {}", e.from, e.to);
    }
    for n in &net.loop_nodes {
        println!("loop: {n}");
    }
}

fn watch(arg: &str, kb: &mut KnowledgeBase) {
    let mut cfg = WatcherConfig::default();
    if !arg.is_empty() {
        match arg.parse::<u32>() {
            Ok(n) => cfg.max_generations = n,
            Err(_) => {
                println!("error: watch takes a generation count, got: {arg}");
                return;
            }
        }
    }
    let (kb2, report) = pckb_core::run_watcher(kb, &cfg);
    *kb = kb2;
    print!("{}", crate::watch_output(&report));
}

fn assert_line(line: &str, kb: &mut KnowledgeBase) {
    match parse(line).map_err(|e| e.to_string()).and_then(|f| {
        kb.assert_formula(&f).map_err(|e| e.to_string())
    }) {
        Ok(kb2) => {
            *kb = kb2;
            println!("ok.");
        }
        Err(e) => println!("error: {e}"),
    }
}
