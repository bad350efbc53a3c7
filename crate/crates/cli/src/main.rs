//! `pckb`: command-line front end for the predicate-calculus engine.
//!
//! Data-base files hold one formula per line (ground atoms and universally
//! quantified Horn rules); goals are single atoms whose `?`-prefixed tokens
//! are variables. All diagnostics go to stderr as `error: ...` with exit
//! code 2; `query` exits 1 when the goal is not proven and `reduce-check`
//! exits 1 unless the reduction classifies as strong.

mod repl;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pckb_core::formula::parse_goal;
use pckb_core::infer::{ProofNode, ProofStep};
use pckb_core::reduction::{
    classify, load_reduction_spec, render_report, Classification, DEFAULT_EXPLANATION_CAP,
};
use pckb_core::{
    forward_chain, semantic_network, show, Atom, ChainConfig, Formula, KnowledgeBase, ProofResult,
    WatcherConfig, WatcherReport,
};

#[derive(Parser)]
#[command(name = "pckb", version, about = "Predicate-calculus data-bases: assertion, proof search, saturation, self-watching, and theory-reduction checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load data-base files and print combined statistics
    Assert {
        /// Data-base files, merged in order (first assertion of a duplicate wins)
        #[arg(required = true, value_name = "KB")]
        kbs: Vec<PathBuf>,
        /// Write the merged data-base to a file
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Prove a goal by backward chaining and print its answers
    Query {
        /// Data-base files followed by one goal atom, e.g. "(color Clyde ?c)"
        #[arg(required = true, num_args = 2.., value_name = "KB.. GOAL")]
        args: Vec<String>,
        #[command(flatten)]
        chain: ChainOpts,
        /// Print a proof tree for each answer
        #[arg(long)]
        trace: bool,
        /// Write the data-base (including cached answers) to a file
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run forward chaining to a fixpoint and print each derived fact
    Saturate {
        #[arg(required = true, value_name = "KB")]
        kbs: Vec<PathBuf>,
        #[command(flatten)]
        chain: ChainOpts,
        /// Write the saturated data-base to a file
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the derivation network (premise -> conclusion edges) and loops
    Network {
        #[arg(required = true, value_name = "KB")]
        kbs: Vec<PathBuf>,
    },
    /// Run the self-watcher, which stores descriptions of the data-base in itself
    Watch {
        #[arg(required = true, value_name = "KB")]
        kbs: Vec<PathBuf>,
        /// Number of watcher generations to run
        #[arg(long, value_name = "N", default_value_t = 4)]
        generations: u32,
        /// Write the watched data-base to a file
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Check a theory-reduction specification and classify it
    ReduceCheck {
        /// Reduction specification file
        #[arg(value_name = "SPEC")]
        spec: PathBuf,
        /// Largest explanation subset size to search (1..=6)
        #[arg(long, value_name = "N", default_value_t = DEFAULT_EXPLANATION_CAP)]
        cap: usize,
    },
    /// Interactive session over one growing data-base
    Repl {
        #[command(flatten)]
        chain: ChainOpts,
    },
}

#[derive(Args)]
struct ChainOpts {
    /// Maximum proof height for backward chaining (overrides PCKB_DEPTH_LIMIT)
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Maximum forward-chaining rounds before truncation
    #[arg(long, value_name = "N")]
    max_rounds: Option<usize>,
    /// Do not cache proven ground answers as derived facts
    #[arg(long)]
    no_cache: bool,
}

impl ChainOpts {
    fn config(&self) -> Result<ChainConfig, String> {
        let mut cfg = ChainConfig::default();
        cfg.depth_limit = match self.depth {
            Some(d) => d,
            None => match std::env::var("PCKB_DEPTH_LIMIT") {
                Ok(v) => v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| format!("invalid PCKB_DEPTH_LIMIT: {v}"))?,
                Err(std::env::VarError::NotPresent) => cfg.depth_limit,
                Err(e) => return Err(format!("invalid PCKB_DEPTH_LIMIT: {e}")),
            },
        };
        if let Some(r) = self.max_rounds {
            cfg.max_rounds = r;
        }
        cfg.cache_derived = !self.no_cache;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Assert { kbs, out } => {
            let kb = load_kb_files(&kbs)?;
            print!("{}", stats_block(&kb));
            write_out(out.as_deref(), &kb)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { args, chain, trace, out } => cmd_query(args, &chain, trace, out),
        Command::Saturate { kbs, chain, out } => cmd_saturate(kbs, &chain, out),
        Command::Network { kbs } => {
            let kb = load_kb_files(&kbs)?;
            let net = semantic_network(&kb);
            for e in &net.edges {
                println!("{} -> {}", e.from, e.to);
            }
            for n in &net.loop_nodes {
                println!("loop: {n}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Watch { kbs, generations, out } => {
            let kb = load_kb_files(&kbs)?;
            let cfg = WatcherConfig { max_generations: generations, ..WatcherConfig::default() };
            let (kb, report) = pckb_core::run_watcher(&kb, &cfg);
            print!("{}", watch_output(&report));
            write_out(out.as_deref(), &kb)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ReduceCheck { spec, cap } => cmd_reduce_check(&spec, cap),
        Command::Repl { chain } => {
            repl::run(&chain.config()?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_query(
    args: Vec<String>,
    chain: &ChainOpts,
    trace: bool,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let (kb_args, goal_text) = args.split_at(args.len() - 1);
    let paths: Vec<PathBuf> = kb_args.iter().map(PathBuf::from).collect();
    let kb = load_kb_files(&paths)?;
    let goal = parse_goal(&goal_text[0]).map_err(|e| e.to_string())?;
    let cfg = chain.config()?;
    let (result, kb) = show(&kb, &goal, &cfg);
    print!("{}", query_output(&goal, &result, trace));
    write_out(out.as_deref(), &kb)?;
    Ok(if result.proven { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_saturate(
    kbs: Vec<PathBuf>,
    chain: &ChainOpts,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let kb = load_kb_files(&kbs)?;
    let cfg = chain.config()?;
    let before = kb.facts().len();
    let kb = forward_chain(&kb, &cfg);
    for f in &kb.facts()[before..] {
        println!("{}", f.atom);
    }
    if kb.saturation_truncated() {
        eprintln!("warning: saturation truncated after {} rounds", cfg.max_rounds);
    }
    write_out(out.as_deref(), &kb)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce_check(spec_path: &Path, cap: usize) -> Result<ExitCode, String> {
    let text = read_file(spec_path)?;
    let spec = load_reduction_spec(&text)
        .map_err(|e| format!("{}: {}", spec_path.display(), e))?;
    let report = classify(&spec.reduction, &spec.t1, &spec.t0, &spec.generalizations, cap)
        .map_err(|e| e.to_string())?;
    print!("{}", render_report(&report, &spec.t1, &spec.t0));
    Ok(if report.classification == Classification::Strong {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

pub(crate) fn load_kb_file(path: &Path) -> Result<KnowledgeBase, String> {
    let text = read_file(path)?;
    KnowledgeBase::load_str(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

pub(crate) fn load_kb_files(paths: &[PathBuf]) -> Result<KnowledgeBase, String> {
    let mut kb = None;
    for p in paths {
        let file_kb = load_kb_file(p)?;
        kb = Some(match kb {
            None => file_kb,
            Some(acc) => merge(acc, &file_kb)?,
        });
    }
    Ok(kb.unwrap_or_default())
}

pub(crate) fn merge(acc: KnowledgeBase, other: &KnowledgeBase) -> Result<KnowledgeBase, String> {
    let mut kb = acc;
    for f in other.facts() {
        kb = kb.assert_formula(&Formula::Atom(f.atom.clone())).map_err(|e| e.to_string())?;
    }
    for r in other.rules() {
        kb = kb.assert_formula(&r.to_formula()).map_err(|e| e.to_string())?;
    }
    Ok(kb)
}

fn write_out(path: Option<&Path>, kb: &KnowledgeBase) -> Result<(), String> {
    if let Some(p) = path {
        fs::write(p, kb.save_str()).map_err(|e| format!("{}: {}", p.display(), e))?;
    }
    Ok(())
}

pub(crate) fn stats_block(kb: &KnowledgeBase) -> String {
    let s = kb.stats();
    let mut out = String::new();
    let _ = writeln!(out, "facts: {}", s.fact_count);
    let _ = writeln!(out, "rules: {}", s.rule_count);
    if s.predicate_names.is_empty() {
        out.push_str("predicates:\n");
    } else {
        let names: Vec<String> = s.predicate_names.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "predicates: {}", names.join(" "));
    }
    let _ = writeln!(out, "derived: {}", s.derived_count);
    let _ = writeln!(out, "watcher: {}", s.watcher_fact_count);
    if s.saturation_truncated {
        out.push_str("saturation: truncated\n");
    }
    out
}

/// Answer lines in goal-variable order, optional proof trees, then the
/// verdict line. A variable left open by a proof prints as itself.
pub(crate) fn query_output(goal: &Atom, result: &ProofResult, trace: bool) -> String {
    let vars = goal.variables();
    let mut out = String::new();
    for (i, s) in result.bindings.iter().enumerate() {
        if !vars.is_empty() {
            let parts: Vec<String> = vars
                .iter()
                .map(|v| match s.get(v) {
                    Some(t) => format!("{v} = {t}"),
                    None => format!("{v} = {v}"),
                })
                .collect();
            let _ = writeln!(out, "answer: {}", parts.join(", "));
        }
        if trace {
            out.push_str("proof:\n");
            render_proof(&result.proofs[i], 1, &mut out);
        }
    }
    if result.proven {
        out.push_str("proven.\n");
    } else if result.depth_limited {
        out.push_str("not proven. (depth-limited)\n");
    } else {
        out.push_str("not proven.\n");
    }
    out
}

fn render_proof(node: &ProofNode, indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
    match node.step {
        ProofStep::Fact => {
            let _ = writeln!(out, "{} <- fact", node.goal);
        }
        ProofStep::Rule { index } => {
            let _ = writeln!(out, "{} <- rule {}", node.goal, index + 1);
        }
    }
    for c in &node.children {
        render_proof(c, indent + 1, out);
    }
}

pub(crate) fn watch_output(report: &WatcherReport) -> String {
    let mut out = String::new();
    for (i, count) in report.facts_emitted_per_generation.iter().enumerate() {
        let gen = (i + 1) as u32;
        let mark = if report.awareness_generation == Some(gen) { " (awareness)" } else { "" };
        let _ = writeln!(out, "generation {gen}: {count} facts{mark}");
    }
    out
}
