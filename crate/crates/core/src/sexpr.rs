//! Low-level S-expression reader.
//!
//! Both the formula syntax and the reduction spec format are S-expressions
//! with `;` line comments. This module turns raw text into a generic tree,
//! keeping the byte offset of every node so higher layers can report
//! positions in their own terms (offsets for formulas, lines for spec files).

use std::fmt;

/// A parsed S-expression node with the byte offset where it started.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Symbol { text: String, offset: usize },
    List { items: Vec<Sexpr>, offset: usize },
}

impl Sexpr {
    pub fn offset(&self) -> usize {
        match self {
            Sexpr::Symbol { offset, .. } | Sexpr::List { offset, .. } => *offset,
        }
    }

    /// The symbol text, if this node is a symbol.
    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexpr::Symbol { text, .. } => Some(text),
            Sexpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List { items, .. } => Some(items),
            Sexpr::Symbol { .. } => None,
        }
    }
}

/// Syntax error with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct SyntaxError {
    pub message: String,
    pub offset: usize,
}

impl SyntaxError {
    pub fn new(message: impl Into<String>, offset: usize) -> Self {
        SyntaxError { message: message.into(), offset }
    }
}

struct Reader<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(input: &'a str) -> Self {
        Reader { input: input.as_bytes(), pos: 0 }
    }

    fn skip_trivia(&mut self) {
        while self.pos < self.input.len() {
            match self.input[self.pos] {
                b';' => {
                    while self.pos < self.input.len() && self.input[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn read_node(&mut self) -> Result<Sexpr, SyntaxError> {
        self.skip_trivia();
        if self.pos >= self.input.len() {
            return Err(SyntaxError::new("unexpected end of input", self.pos));
        }
        match self.input[self.pos] {
            b'(' => {
                let open = self.pos;
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    if self.pos >= self.input.len() {
                        return Err(SyntaxError::new("unbalanced parentheses: '(' never closed", open));
                    }
                    if self.input[self.pos] == b')' {
                        self.pos += 1;
                        return Ok(Sexpr::List { items, offset: open });
                    }
                    items.push(self.read_node()?);
                }
            }
            b')' => Err(SyntaxError::new("unbalanced parentheses: unexpected ')'", self.pos)),
            _ => {
                let start = self.pos;
                while self.pos < self.input.len() {
                    let c = self.input[self.pos];
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.input[start..self.pos])
                    .map_err(|_| SyntaxError::new("invalid UTF-8 in symbol", start))?
                    .to_string();
                Ok(Sexpr::Symbol { text, offset: start })
            }
        }
    }
}

/// Read exactly one S-expression; trailing non-comment text is an error.
pub fn read_one(text: &str) -> Result<Sexpr, SyntaxError> {
    let mut r = Reader::new(text);
    let node = r.read_node()?;
    r.skip_trivia();
    if r.pos < r.input.len() {
        return Err(SyntaxError::new("trailing input after expression", r.pos));
    }
    Ok(node)
}

/// Read every S-expression in the text, in order.
pub fn read_all(text: &str) -> Result<Vec<Sexpr>, SyntaxError> {
    let mut r = Reader::new(text);
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.pos >= r.input.len() {
            return Ok(out);
        }
        out.push(r.read_node()?);
    }
}

/// Map a byte offset to a 1-based line number.
pub fn line_of_offset(text: &str, offset: usize) -> usize {
    let upto = offset.min(text.len());
    text.as_bytes()[..upto].iter().filter(|&&c| c == b'\n').count() + 1
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Symbol { text, .. } => write!(f, "{text}"),
            Sexpr::List { items, .. } => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = read_one("(forall (z) (if (inst z elephant) (color z gray)))").unwrap();
        let items = s.as_list().unwrap();
        assert_eq!(items[0].as_symbol(), Some("forall"));
        assert_eq!(items.len(), 3);
    }

    #[test]
    fn comments_are_skipped() {
        let s = read_one("; the paperweight rule\n(p a) ; trailing").unwrap();
        assert_eq!(s.to_string(), "(p a)");
    }

    #[test]
    fn unclosed_paren_reports_opening_offset() {
        let err = read_one("  (p (q a)").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(err.message.contains("unbalanced"));
    }

    #[test]
    fn stray_close_paren() {
        let err = read_one(")").unwrap_err();
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn trailing_input_rejected() {
        let err = read_one("(p a) (q b)").unwrap_err();
        assert_eq!(err.offset, 6);
    }

    #[test]
    fn read_all_collects_in_order() {
        let all = read_all("(a)\n(b c)\n; done\n").unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].to_string(), "(b c)");
    }

    #[test]
    fn line_numbers() {
        let text = "(a)\n(b)\n(c)";
        assert_eq!(line_of_offset(text, 0), 1);
        assert_eq!(line_of_offset(text, 4), 2);
        assert_eq!(line_of_offset(text, 8), 3);
    }
}
