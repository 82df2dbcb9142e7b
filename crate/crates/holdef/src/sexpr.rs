//! S-expression reader and printer for the theory surface syntax.
//!
//! The reader is lenient (any non-delimiter run is a bare atom, strings
//! quote anything else); the printer is canonical, so printed output
//! always reads back to the same tree.

use std::fmt;

use thiserror::Error;

/// A 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub const DUMMY: Span = Span { line: 0, col: 0 };
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Atoms carry their text with quoting already stripped. Equality
/// ignores source positions so reparsed output compares equal.
#[derive(Clone, Debug)]
pub enum Sexp {
    Atom(String, Span),
    List(Vec<Sexp>, Span),
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Sexp) -> bool {
        match (self, other) {
            (Sexp::Atom(a, _), Sexp::Atom(b, _)) => a == b,
            (Sexp::List(a, _), Sexp::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Sexp {}

impl Sexp {
    pub fn atom(text: &str) -> Sexp {
        Sexp::Atom(text.to_string(), Span::DUMMY)
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items, Span::DUMMY)
    }

    pub fn span(&self) -> Span {
        match self {
            Sexp::Atom(_, sp) | Sexp::List(_, sp) => *sp,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{span}: {msg}")]
pub struct ParseError {
    pub span: Span,
    pub msg: String,
}

fn err<T>(span: Span, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { span, msg: msg.into() })
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Reader<'a> {
        Reader { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn here(&self) -> Span {
        Span { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                return;
            }
        }
    }

    fn read_quoted(&mut self, start: Span) -> Result<Sexp, ParseError> {
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return err(start, "unterminated string"),
                Some('"') => return Ok(Sexp::Atom(text, start)),
                Some('\\') => match self.bump() {
                    Some('"') => text.push('"'),
                    Some('\\') => text.push('\\'),
                    Some(c) => return err(start, format!("unknown escape \\{c}")),
                    None => return err(start, "unterminated string"),
                },
                Some(c) => text.push(c),
            }
        }
    }

    fn read_bare(&mut self, start: Span) -> Sexp {
        let mut text = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                break;
            }
            text.push(c);
            self.bump();
        }
        Sexp::Atom(text, start)
    }

    fn read_sexp(&mut self) -> Result<Sexp, ParseError> {
        self.skip_trivia();
        let start = self.here();
        match self.chars.peek() {
            None => err(start, "expected an expression, found end of input"),
            Some(')') => err(start, "unmatched closing parenthesis"),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return err(start, "unclosed parenthesis"),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read_sexp()?),
                    }
                }
            }
            Some('"') => self.read_quoted(start),
            Some(_) => Ok(self.read_bare(start)),
        }
    }
}

/// Every toplevel expression in the text.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut r = Reader::new(text);
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read_sexp()?);
    }
}

/// Exactly one expression, with nothing but trivia after it.
pub fn parse_one(text: &str) -> Result<Sexp, ParseError> {
    let mut r = Reader::new(text);
    let sexp = r.read_sexp()?;
    r.skip_trivia();
    if r.chars.peek().is_some() {
        return err(r.here(), "trailing input after the expression");
    }
    Ok(sexp)
}

fn bare_ok(atom: &str) -> bool {
    !atom.is_empty()
        && atom
            .chars()
            .all(|c| c.is_ascii_graphic() && !matches!(c, '(' | ')' | '"' | ';' | '\\'))
}

fn push_atom(out: &mut String, atom: &str) {
    if bare_ok(atom) {
        out.push_str(atom);
        return;
    }
    out.push('"');
    for c in atom.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

fn push_sexp(out: &mut String, sexp: &Sexp) {
    match sexp {
        Sexp::Atom(a, _) => push_atom(out, a),
        Sexp::List(items, _) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                push_sexp(out, item);
            }
            out.push(')');
        }
    }
}

/// Canonical single-line rendering.
pub fn print_sexp(sexp: &Sexp) -> String {
    let mut out = String::new();
    push_sexp(&mut out, sexp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_lists_and_comments_read_back() {
        let text = "(newconst c (bool)) ; trailing note\n(axiom x)";
        let all = parse_all(text).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(
            all[0],
            Sexp::list(vec![
                Sexp::atom("newconst"),
                Sexp::atom("c"),
                Sexp::list(vec![Sexp::atom("bool")]),
            ])
        );
    }

    #[test]
    fn spans_are_one_based_lines_and_columns() {
        let all = parse_all("(a\n  (b))").unwrap();
        let items = all[0].as_list().unwrap();
        assert_eq!(items[0].span(), Span { line: 1, col: 2 });
        assert_eq!(items[1].span(), Span { line: 2, col: 3 });
    }

    #[test]
    fn unbalanced_parens_report_the_offending_span() {
        let e = parse_all("(a (b)").unwrap_err();
        assert_eq!(e.span, Span { line: 1, col: 1 });
        let e = parse_all("a)").unwrap_err();
        assert_eq!(e.span, Span { line: 1, col: 2 });
    }

    #[test]
    fn quoted_atoms_carry_unicode_and_escapes() {
        let s = parse_one("\"∀x\\\"y\\\\\"").unwrap();
        assert_eq!(s.as_atom(), Some("∀x\"y\\"));
        let printed = print_sexp(&s);
        assert_eq!(parse_one(&printed).unwrap(), s);
    }

    #[test]
    fn printing_is_canonical_and_reads_back() {
        let text = " ( f  x ; comment\n ( g \"two words\" ) ) ";
        let s = parse_one(text).unwrap();
        let printed = print_sexp(&s);
        assert_eq!(printed, "(f x (g \"two words\"))");
        assert_eq!(parse_one(&printed).unwrap(), s);
    }

    #[test]
    fn parse_one_rejects_trailing_input() {
        let e = parse_one("(a) (b)").unwrap_err();
        assert_eq!(e.span, Span { line: 1, col: 5 });
    }
}
