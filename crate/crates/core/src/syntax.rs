//! Concrete syntax: `o` unit, lowercase identifiers for atoms, `~` negation,
//! `<A;B>` seq, `[A,B]` par, `(A,B)` copar and `{}` for a context hole.

use crate::context::{Context, Frame};
use crate::structure::{Atom, Kind, Structure, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
enum Raw {
    Hole,
    Unit,
    Atom(Atom),
    Node(Kind, Vec<Raw>),
    Neg(Box<Raw>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allow_hole: bool,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        SyntaxError { line, column, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<(), SyntaxError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{want}', found '{c}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn term(&mut self) -> Result<Raw, SyntaxError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('~') => {
                self.pos += 1;
                Ok(Raw::Neg(Box::new(self.term()?)))
            }
            Some('<') => self.list(Kind::Seq, ';', '>'),
            Some('[') => self.list(Kind::Par, ',', ']'),
            Some('(') => self.list(Kind::Copar, ',', ')'),
            Some('{') => {
                if !self.allow_hole {
                    return Err(self.error("hole not allowed here"));
                }
                self.pos += 1;
                self.expect('}')?;
                Ok(Raw::Hole)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name = &self.src[start..self.pos];
                if name == "o" {
                    Ok(Raw::Unit)
                } else {
                    Ok(Raw::Atom(Atom::positive(name)))
                }
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
        }
    }

    fn list(&mut self, kind: Kind, sep: char, close: char) -> Result<Raw, SyntaxError> {
        self.pos += 1;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(Raw::Node(kind, items));
        }
        loop {
            items.push(self.term()?);
            self.skip_ws();
            match self.peek() {
                Some(c) if c == sep => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(Raw::Node(kind, items));
                }
                Some(c) => return Err(self.error(format!("expected '{sep}' or '{close}', found '{c}'"))),
                None => return Err(self.error(format!("expected '{sep}' or '{close}', found end of input"))),
            }
        }
    }

    fn finish(&mut self) -> Result<(), SyntaxError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("trailing input starting at '{c}'"))),
        }
    }
}

fn to_term(r: &Raw) -> Term {
    match r {
        Raw::Hole => unreachable!("holes are rejected before conversion"),
        Raw::Unit => Term::Unit,
        Raw::Atom(a) => Term::Atom(a.clone()),
        Raw::Node(Kind::Seq, v) => Term::Seq(v.iter().map(to_term).collect()),
        Raw::Node(Kind::Par, v) => Term::Par(v.iter().map(to_term).collect()),
        Raw::Node(Kind::Copar, v) => Term::Copar(v.iter().map(to_term).collect()),
        Raw::Neg(t) => Term::neg(to_term(t)),
    }
}

fn holes(r: &Raw) -> usize {
    match r {
        Raw::Hole => 1,
        Raw::Node(_, v) => v.iter().map(holes).sum(),
        Raw::Neg(t) => holes(t),
        _ => 0,
    }
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { src, pos: 0, allow_hole: false };
    let r = p.term()?;
    p.finish()?;
    Ok(to_term(&r))
}

pub fn parse_structure(src: &str) -> Result<Structure, SyntaxError> {
    parse_term(src).map(|t| t.canonicalize())
}

/// Parses a context containing exactly one `{}` not under a negation.
pub fn parse_context(src: &str) -> Result<Context, SyntaxError> {
    let mut p = Parser { src, pos: 0, allow_hole: true };
    let r = p.term()?;
    p.finish()?;
    let n = holes(&r);
    if n != 1 {
        p.pos = 0;
        return Err(p.error(format!("a context needs exactly one hole, found {n}")));
    }
    let mut frames = Vec::new();
    let mut cur = &r;
    loop {
        match cur {
            Raw::Hole => break,
            Raw::Neg(_) => {
                p.pos = 0;
                return Err(p.error("the hole may not occur under a negation"));
            }
            Raw::Node(kind, items) => {
                let at = items.iter().position(|t| holes(t) == 1).unwrap();
                let conv = |v: &[Raw]| v.iter().map(|t| to_term(t).canonicalize()).collect::<Vec<_>>();
                frames.push(match kind {
                    Kind::Seq => Frame::Seq { before: conv(&items[..at]), after: conv(&items[at + 1..]) },
                    k => {
                        let mut sib = conv(&items[..at]);
                        sib.extend(conv(&items[at + 1..]));
                        Frame::commutative(*k, sib)
                    }
                });
                cur = &items[at];
            }
            _ => unreachable!(),
        }
    }
    Ok(Context::from_frames(frames))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_example() {
        let s = parse_structure("[a,b,(~b,[(~a,c),~c])]").unwrap();
        assert_eq!(s.to_string(), "[a,b,(~b,[~c,(~a,c)])]");
        assert_eq!(s.size(), 6);
    }

    #[test]
    fn unit_inside_seq() {
        assert_eq!(parse_structure("<a;[o,b]>").unwrap().to_string(), "<a;b>");
        assert_eq!(parse_structure(" o ").unwrap(), Structure::Unit);
        assert_eq!(parse_structure("[]").unwrap(), Structure::Unit);
    }

    #[test]
    fn negation_anywhere() {
        assert_eq!(parse_structure("~[a,~b]").unwrap().to_string(), "(~a,b)");
        assert_eq!(parse_structure("~~a").unwrap().to_string(), "a");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_structure("[a,").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.column, 4);
        let e = parse_structure("[a,\n  B]").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse_structure("a b").is_err());
        assert!(parse_structure("{}").is_err());
    }

    #[test]
    fn contexts() {
        let c = parse_context("<c;[{},b]>").unwrap();
        assert_eq!(c.plug(&Structure::pos("a")).to_string(), "<c;[a,b]>");
        assert!(parse_context("[a,b]").is_err());
        assert!(parse_context("~[{},a]").is_err());
        assert!(parse_context("[{},{}]").is_err());
        assert!(parse_context("{}").unwrap().is_hole());
        let c = parse_context("[[{},a],b]").unwrap();
        assert_eq!(c.frames().len(), 1);
    }
}
