//! Concrete syntax:
//!
//! ```text
//! formula := [EXISTS ident (',' ident)* '.'] conj
//! conj    := TRUE | atom (AND atom)*
//! atom    := term '=' term | norm '(' term ')' '<=' number
//! term    := ['+' | '-'] summand (('+' | '-') summand)*
//! summand := number ['*' factor] | factor
//! factor  := ident | '(' term ')'
//! ```
//!
//! Free variables are `x1, x2, ...`; bound variables are the identifiers
//! introduced by `EXISTS`. The only constant term is `0`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{Atom, PPFormula, Term, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rational),
    Eq,
    Le,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Dot,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let err = |line, column, message: String| Error::SyntaxError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            column += i - start;
            let s: String = chars[start..i].iter().collect();
            let value: Rational = s
                .parse()
                .map_err(|_| err(start_line, start_col, format!("invalid number `{s}`")))?;
            Tok::Number(value)
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let (tok, width) = match c {
                '<' if two == "<=" => (Tok::Le, 2),
                '=' => (Tok::Eq, 1),
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '*' => (Tok::Star, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                other => return Err(err(line, column, format!("unexpected character `{other}`"))),
            };
            i += width;
            column += width;
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    bound: BTreeMap<String, usize>,
    max_free: usize,
}

fn free_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

fn is_keyword(name: &str) -> bool {
    matches!(name, "EXISTS" | "AND" | "TRUE" | "norm")
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, message: impl Into<String>) -> Error {
        Error::SyntaxError {
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(r) => format!("`{r}`"),
            Tok::End => "end of input".into(),
            other => format!("{other:?}"),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Spanned> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected {what}, found {}", Self::describe(&t.tok))))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == name)
    }

    fn formula(&mut self) -> Result<PPFormula> {
        let mut names = Vec::new();
        if self.is_ident("EXISTS") {
            self.next();
            loop {
                let t = self.next();
                let Tok::Ident(name) = &t.tok else {
                    return Err(self.error_at(&t, "expected a variable name"));
                };
                if is_keyword(name) || free_index(name).is_some() {
                    return Err(self.error_at(&t, format!("`{name}` cannot be a bound variable")));
                }
                if self.bound.contains_key(name) {
                    return Err(self.error_at(&t, format!("`{name}` is bound twice")));
                }
                self.bound.insert(name.clone(), names.len());
                names.push(name.clone());
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
            self.expect(Tok::Dot, "`.`")?;
        }
        let mut atoms = Vec::new();
        if self.is_ident("TRUE") {
            self.next();
        } else {
            atoms.push(self.atom()?);
            while self.is_ident("AND") {
                self.next();
                atoms.push(self.atom()?);
            }
        }
        let t = self.next();
        if t.tok != Tok::End {
            return Err(self.error_at(&t, format!("expected `AND` or end of input, found {}", Self::describe(&t.tok))));
        }
        Ok(PPFormula {
            free_count: self.max_free,
            bound_names: names,
            atoms,
        })
    }

    fn atom(&mut self) -> Result<Atom> {
        if self.is_ident("norm") {
            self.next();
            self.expect(Tok::LParen, "`(`")?;
            let t = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::Le, "`<=`")?;
            let at = self.peek().clone();
            let negative = at.tok == Tok::Minus;
            if negative {
                self.next();
            }
            let n = self.next();
            let Tok::Number(m) = n.tok else {
                return Err(self.error_at(&n, "expected a rational bound"));
            };
            if negative && !m.is_zero() {
                return Err(self.error_at(&at, "norm bounds must be nonnegative"));
            }
            return Ok(Atom::NormLe(t, m));
        }
        let lhs = self.term()?;
        self.expect(Tok::Eq, "`=`")?;
        let rhs = self.term()?;
        Ok(Atom::Eq(lhs, rhs))
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = Term::zero();
        let mut sign = Rational::one();
        match self.peek().tok {
            Tok::Plus => {
                self.next();
            }
            Tok::Minus => {
                self.next();
                sign = -Rational::one();
            }
            _ => {}
        }
        loop {
            let s = self.summand()?;
            acc = acc.add(&s.scale(&sign));
            match self.peek().tok {
                Tok::Plus => sign = Rational::one(),
                Tok::Minus => sign = -Rational::one(),
                _ => return Ok(acc),
            }
            self.next();
        }
    }

    fn summand(&mut self) -> Result<Term> {
        let at = self.peek().clone();
        if let Tok::Number(r) = &at.tok {
            let r = r.clone();
            self.next();
            if self.peek().tok == Tok::Star {
                self.next();
                return Ok(self.factor()?.scale(&r));
            }
            if !r.is_zero() {
                return Err(self.error_at(&at, "the only constant term is 0"));
            }
            return Ok(Term::zero());
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Term> {
        let t = self.next();
        match &t.tok {
            Tok::LParen => {
                let inner = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) if !is_keyword(name) => {
                if let Some(&j) = self.bound.get(name) {
                    return Ok(Term::var(Var::Bound(j)));
                }
                if let Some(i) = free_index(name) {
                    self.max_free = self.max_free.max(i);
                    return Ok(Term::var(Var::Free(i - 1)));
                }
                Err(Error::ScopeError {
                    name: name.clone(),
                    line: t.line,
                    column: t.column,
                })
            }
            other => Err(self.error_at(&t, format!("expected a term, found {}", Self::describe(other)))),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<PPFormula> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        bound: BTreeMap::new(),
        max_free: 0,
    }
    .formula()
}
