//! Concrete syntax for trees: `a`, `b[a a]`, `+[-[a -[b]] a]`. Children are
//! whitespace-separated inside brackets, so multi-character symbols stay
//! unambiguous. `#` starts a comment running to end of line. Variables are
//! the reserved symbols `x1`, `x2`, ...

use std::fmt;

use crate::alphabet::{is_symbol_char, is_variable_name};
use crate::error::{Error, Result};
use crate::tree::{Node, Tree};

/// One lexical token of the term / definition-file syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Sym(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    At,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Sym(s) => write!(f, "{s}"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Comma => write!(f, ","),
            Tok::Semicolon => write!(f, ";"),
            Tok::Colon => write!(f, ":"),
            Tok::At => write!(f, "@"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Tokenizes UTF-8 input, skipping whitespace and `#` comments.
pub fn tokenize(input: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        let tok = match c {
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semicolon),
            ':' => Some(Tok::Colon),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(tok) = tok {
            out.push(Spanned { tok, line, col });
            chars.next();
            col += 1;
            continue;
        }
        if is_symbol_char(c) {
            let start_col = col;
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if is_symbol_char(c) {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Sym(s),
                line,
                col: start_col,
            });
            continue;
        }
        return Err(Error::syntax(line, col, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

/// Token cursor with one-token lookahead.
pub struct Tokens {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Tokens {
    pub fn new(toks: Vec<Spanned>) -> Tokens {
        Tokens { toks, pos: 0 }
    }

    pub fn lex(input: &str) -> Result<Tokens> {
        Ok(Tokens::new(tokenize(input)?))
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Position of the current (or last) token, for error messages.
    pub fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))) {
            Some(s) => (s.line, s.col),
            None => (0, 0),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::syntax(line, col, msg)
    }

    pub fn expect(&mut self, want: &Tok) -> Result<()> {
        match self.next() {
            Some(s) if &s.tok == want => Ok(()),
            Some(s) => Err(Error::syntax(
                s.line,
                s.col,
                format!("expected '{want}', found '{}'", s.tok),
            )),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    pub fn expect_sym(&mut self) -> Result<String> {
        match self.next() {
            Some(Spanned { tok: Tok::Sym(s), .. }) => Ok(s),
            Some(s) => Err(Error::syntax(
                s.line,
                s.col,
                format!("expected a symbol, found '{}'", s.tok),
            )),
            None => Err(self.error("expected a symbol, found end of input")),
        }
    }

    /// Expects the exact keyword `kw` (a symbol token).
    pub fn expect_kw(&mut self, kw: &str) -> Result<()> {
        match self.next() {
            Some(Spanned { tok: Tok::Sym(s), .. }) if s == kw => Ok(()),
            Some(s) => Err(Error::syntax(
                s.line,
                s.col,
                format!("expected '{kw}', found '{}'", s.tok),
            )),
            None => Err(self.error(format!("expected '{kw}', found end of input"))),
        }
    }

    pub fn eat_sym(&mut self, kw: &str) -> bool {
        if let Some(Tok::Sym(s)) = self.peek() {
            if s == kw {
                self.next();
                return true;
            }
        }
        false
    }

    /// Parses one term: `SYMBOL` or `SYMBOL '[' TERM+ ']'`.
    pub fn parse_term(&mut self) -> Result<Tree> {
        let sym = self.expect_sym()?;
        let node = symbol_to_node(&sym);
        if self.peek() == Some(&Tok::LBracket) {
            self.next();
            if self.peek() == Some(&Tok::RBracket) {
                return Err(self.error("empty child list"));
            }
            let mut children = Vec::new();
            loop {
                children.push(self.parse_term()?);
                match self.peek() {
                    Some(Tok::RBracket) => {
                        self.next();
                        break;
                    }
                    Some(Tok::Sym(_)) => continue,
                    Some(t) => {
                        let t = t.clone();
                        return Err(self.error(format!("expected term or ']', found '{t}'")));
                    }
                    None => return Err(self.error("unbalanced brackets: missing ']'")),
                }
            }
            if let Node::Var(i) = node {
                return Err(self.error(format!("variable x{i} cannot have children")));
            }
            Ok(Tree { node, children })
        } else {
            Ok(Tree {
                node,
                children: Vec::new(),
            })
        }
    }
}

pub(crate) fn symbol_to_node(sym: &str) -> Node {
    if is_variable_name(sym) {
        let idx: usize = sym[1..].parse().expect("validated digits");
        Node::Var(idx)
    } else {
        Node::Sym(sym.to_string())
    }
}

/// Parses a complete term from `input`; trailing input is an error.
pub fn parse_term(input: &str) -> Result<Tree> {
    let mut toks = Tokens::lex(input)?;
    if toks.is_done() {
        return Err(Error::syntax(1, 1, "empty input"));
    }
    let t = toks.parse_term()?;
    if !toks.is_done() {
        return Err(toks.error("trailing input after term"));
    }
    Ok(t)
}

/// Canonical text of a tree; inverse of [`parse_term`].
pub fn print_term(t: &Tree) -> String {
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::SplitMix64;

    #[test]
    fn leaf_parses() {
        assert_eq!(parse_term("a").unwrap(), Tree::leaf("a"));
    }

    #[test]
    fn nested_term_parses() {
        // (a - (-b)) + a in prefix form
        let t = parse_term("+[-[a -[b]] a]").unwrap();
        assert_eq!(
            t,
            Tree::node(
                "+",
                vec![
                    Tree::node("-", vec![Tree::leaf("a"), Tree::node("-", vec![Tree::leaf("b")])]),
                    Tree::leaf("a")
                ]
            )
        );
        assert_eq!(t.to_string(), "+[-[a -[b]] a]");
    }

    #[test]
    fn variables_parse_as_vars() {
        let t = parse_term("f[x1 x2]").unwrap();
        assert_eq!(t.children[0], Tree::var(1));
        assert_eq!(t.children[1], Tree::var(2));
    }

    #[test]
    fn comments_and_whitespace_are_skipped() {
        let t = parse_term("b[ a # comment\n  b[a a] ]").unwrap();
        assert_eq!(t.to_string(), "b[a b[a a]]");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_term("f[a").unwrap_err() {
            Error::Syntax { msg, .. } => assert!(msg.contains("unbalanced")),
            e => panic!("unexpected error {e:?}"),
        }
        assert!(parse_term("f[]").is_err());
        assert!(parse_term("a b").is_err());
        assert!(parse_term("x1[a]").is_err());
    }

    #[test]
    fn roundtrip_on_random_canonical_terms() {
        let mut rng = SplitMix64::new(0x7e37);
        for _ in 0..200 {
            let t = crate::gen::random_tree_shape(&mut rng, &["a", "b"], &["f", "g"], 4);
            let printed = t.to_string();
            let back = parse_term(&printed).unwrap();
            assert_eq!(back, t);
            assert_eq!(back.to_string(), printed);
        }
    }
}
