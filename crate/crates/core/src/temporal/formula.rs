//! Boolean combinations of order atoms over `x0..x{r-1}`.
//!
//! Grammar: `expr := term ('|' term)*`, `term := factor ('&' factor)*`,
//! `factor := '!' factor | '(' expr ')' | atom`, `atom := var op var` with
//! `op ∈ {<, <=, =, !=, >, >=}`. The symbols `≤ ≥ ≠ ∧ ∨ ¬` are accepted too.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(Cmp, usize, usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn eval<T: PartialOrd>(&self, t: &[T]) -> bool {
        match self {
            Formula::Atom(c, i, j) => {
                let (a, b) = (&t[*i], &t[*j]);
                match c {
                    Cmp::Lt => a < b,
                    Cmp::Le => a <= b,
                    Cmp::Eq => a == b,
                    Cmp::Ne => a != b,
                }
            }
            Formula::Not(f) => !f.eval(t),
            Formula::And(a, b) => a.eval(t) && b.eval(t),
            Formula::Or(a, b) => a.eval(t) || b.eval(t),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::Atom(_, i, j) => Some(*i.max(j)),
            Formula::Not(f) => f.max_var(),
            Formula::And(a, b) | Formula::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(usize),
    Op(Cmp, bool),
    And,
    Or,
    Not,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |msg: String| Error::Parse(format!("formula `{s}`: {msg}"));
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            ' ' | '\t' | '\n' => i += 1,
            'x' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(err(format!("variable without index at {i}")));
                }
                let idx: String = chars[start..j].iter().collect();
                out.push(Tok::Var(idx.parse().map_err(|_| err("bad index".into()))?));
                i = j;
            }
            '<' if next == Some('=') => {
                out.push(Tok::Op(Cmp::Le, false));
                i += 2;
            }
            '>' if next == Some('=') => {
                out.push(Tok::Op(Cmp::Le, true));
                i += 2;
            }
            '!' if next == Some('=') => {
                out.push(Tok::Op(Cmp::Ne, false));
                i += 2;
            }
            '=' if next == Some('=') => {
                out.push(Tok::Op(Cmp::Eq, false));
                i += 2;
            }
            '<' => {
                out.push(Tok::Op(Cmp::Lt, false));
                i += 1;
            }
            '>' => {
                out.push(Tok::Op(Cmp::Lt, true));
                i += 1;
            }
            '=' => {
                out.push(Tok::Op(Cmp::Eq, false));
                i += 1;
            }
            '≤' => {
                out.push(Tok::Op(Cmp::Le, false));
                i += 1;
            }
            '≥' => {
                out.push(Tok::Op(Cmp::Le, true));
                i += 1;
            }
            '≠' => {
                out.push(Tok::Op(Cmp::Ne, false));
                i += 1;
            }
            '&' | '∧' => {
                out.push(Tok::And);
                i += if next == Some('&') { 2 } else { 1 };
            }
            '|' | '∨' => {
                out.push(Tok::Or);
                i += if next == Some('|') { 2 } else { 1 };
            }
            '!' | '¬' => {
                out.push(Tok::Not);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("formula `{}`: {msg} at token {}", self.src, self.pos))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut f = self.term()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = Formula::Or(Box::new(f), Box::new(self.term()?));
        }
        Ok(f)
    }

    fn term(&mut self) -> Result<Formula> {
        let mut f = self.factor()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = Formula::And(Box::new(f), Box::new(self.factor()?));
        }
        Ok(f)
    }

    fn factor(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.factor()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                let (cmp, flip) = match self.peek() {
                    Some(Tok::Op(c, f)) => (*c, *f),
                    _ => return Err(self.err("expected comparison")),
                };
                self.pos += 1;
                let j = match self.peek() {
                    Some(Tok::Var(j)) => *j,
                    _ => return Err(self.err("expected variable")),
                };
                self.pos += 1;
                Ok(if flip { Formula::Atom(cmp, j, i) } else { Formula::Atom(cmp, i, j) })
            }
            _ => Err(self.err("expected atom, `!` or `(`")),
        }
    }
}

pub fn parse(src: &str) -> Result<Formula> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, src };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_eval() {
        let f = parse("x0!=x1 | x2<=x0").unwrap();
        assert!(f.eval(&[1, 1, 0]));
        assert!(!f.eval(&[0, 0, 1]));
        let g = parse("!(x0<x1) & x1>=x0").unwrap();
        assert!(g.eval(&[2, 2]));
        assert!(!g.eval(&[1, 2]));
        let h = parse("x0 ≠ x1 ∨ x2 ≤ x0").unwrap();
        assert_eq!(h.eval(&[0, 0, 1]), f.eval(&[0, 0, 1]));
    }

    #[test]
    fn malformed() {
        for bad in ["", "x0<", "x0<x1 &", "(x0<x1", "x0 x1", "y0<x1", "x<x1"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
