//! Concrete text syntax.
//!
//! ```text
//! term  := atom ("+" atom)*
//! atom  := "0" | "pi" | "phi(" term "," term ")" | "adm(" term ")" | collapse
//! M     := "d(" term ";" term ")"
//! P3    := "d(" term ";" term ";" term ")"
//! P4    := "d(" term ";" term ";" term "," term "," term "," term ")"
//! ```
//!
//! Whitespace is ignored on input. Output puts single spaces around `+` and
//! nowhere else.

use thiserror::Error;

use super::{SystemFlavor, Term};
use crate::wf::{is_regular, StageRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("collapse at column {column} has {found} fields, flavor {flavor} expects {expected}")]
    Arity {
        column: usize,
        flavor: SystemFlavor,
        found: usize,
        expected: usize,
    },
    #[error("adm at column {column} applied to a non-regular term")]
    NonRegularAdm { column: usize },
}

impl ParseError {
    /// 1-based column of the offending token.
    pub fn column(&self) -> usize {
        match *self {
            ParseError::Syntax { column, .. }
            | ParseError::Arity { column, .. }
            | ParseError::NonRegularAdm { column } => column,
        }
    }
}

/// Parses `text` as a term of `flavor`. The result is not normalized.
pub fn parse(text: &str, flavor: SystemFlavor) -> Result<Term, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        flavor,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(t)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    flavor: SystemFlavor,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            column: self.column(),
            message: message.into(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(f) => format!("`{f}`"),
                None => "end of input".to_string(),
            };
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.eat('+') {
            atoms.push(self.atom()?);
        }
        Ok(if atoms.len() == 1 {
            atoms.pop().unwrap()
        } else {
            Term::sum(atoms)
        })
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        if self.peek().is_none() {
            return Err(self.error("expected a term, found end of input"));
        }
        let start = self.pos;
        let word = self.word();
        let column = start + 1;
        match word.as_str() {
            "0" => Ok(Term::Zero),
            "pi" => Ok(Term::Pi),
            "phi" => {
                self.expect('(')?;
                let a = self.term()?;
                self.expect(',')?;
                let b = self.term()?;
                self.expect(')')?;
                Ok(Term::phi(a, b))
            }
            "adm" => {
                self.expect('(')?;
                let inner = self.term()?;
                self.expect(')')?;
                if !is_regular(&inner) {
                    return Err(ParseError::NonRegularAdm { column });
                }
                Ok(Term::adm(inner))
            }
            "d" => self.collapse(column),
            "" => Err(self.error(format!("unexpected `{}`", self.chars[self.pos]))),
            other => {
                self.pos = start;
                Err(self.error(format!("unknown symbol `{other}`")))
            }
        }
    }

    fn collapse(&mut self, column: usize) -> Result<Term, ParseError> {
        self.expect('(')?;
        let base = self.term()?;
        self.expect(';')?;
        let arg = self.term()?;
        let mut annotations = Vec::new();
        if self.eat(';') {
            annotations.push(self.term()?);
            while self.eat(',') {
                annotations.push(self.term()?);
            }
        }
        self.expect(')')?;
        let found = 2 + annotations.len();
        let expected = self.flavor.collapse_fields();
        if found != expected {
            return Err(ParseError::Arity {
                column,
                flavor: self.flavor,
                found,
                expected,
            });
        }
        let stage = match self.flavor {
            SystemFlavor::M => StageRecord::Empty,
            SystemFlavor::P3 => StageRecord::Q(annotations.pop().unwrap()),
            SystemFlavor::P4 => {
                let mut it = annotations.into_iter();
                let mut next = || it.next().unwrap();
                StageRecord::Four {
                    st4: next(),
                    rg4: next(),
                    st3: next(),
                    rg3: next(),
                }
            }
        };
        Ok(Term::collapse(base, arg, stage))
    }
}

/// Canonical text for `t`.
pub fn render(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Zero => out.push('0'),
        Term::Pi => out.push_str("pi"),
        Term::Sum(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_term(x, out);
            }
        }
        Term::Phi(a, b) => {
            out.push_str("phi(");
            write_term(a, out);
            out.push(',');
            write_term(b, out);
            out.push(')');
        }
        Term::Adm(u) => {
            out.push_str("adm(");
            write_term(u, out);
            out.push(')');
        }
        Term::Collapse(c) => {
            out.push_str("d(");
            write_term(&c.base, out);
            out.push(';');
            write_term(&c.arg, out);
            for (i, a) in c.stage.terms().enumerate() {
                out.push(if i == 0 { ';' } else { ',' });
                write_term(a, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SystemFlavor::*;

    #[test]
    fn parses_grammar_base_cases() {
        assert_eq!(parse("0", M).unwrap(), Term::Zero);
        assert_eq!(parse("  pi ", P3).unwrap(), Term::Pi);
        assert_eq!(parse("d(pi;0)", M).unwrap(), Term::d(Term::Pi, Term::Zero));
        assert_eq!(
            parse("phi(0,0) + pi", M).unwrap(),
            Term::sum(vec![Term::one(), Term::Pi])
        );
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(render(&Term::Zero), "0");
        assert_eq!(
            render(&Term::d(Term::adm(Term::Pi), Term::Pi)),
            "d(adm(pi);pi)"
        );
        assert_eq!(
            render(&Term::sum(vec![Term::Pi, Term::one()])),
            "pi + phi(0,0)"
        );
        let p4 = parse("d( pi ; 0 ; 0 , pi , 0 , pi )", P4).unwrap();
        assert_eq!(render(&p4), "d(pi;0;0,pi,0,pi)");
        assert_eq!(render(&parse("d(pi;0;pi)", P3).unwrap()), "d(pi;0;pi)");
    }

    #[test]
    fn arity_must_match_flavor() {
        let err = parse("d(pi;0)", P3).unwrap_err();
        assert_eq!(
            err,
            ParseError::Arity {
                column: 1,
                flavor: P3,
                found: 2,
                expected: 3
            }
        );
        assert!(matches!(
            parse("phi(0, d(pi;0;0))", M),
            Err(ParseError::Arity { column: 8, .. })
        ));
        assert!(matches!(
            parse("d(pi;0;0,0)", P4),
            Err(ParseError::Arity { found: 4, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let err = parse("phi(0 0)", M).unwrap_err();
        assert_eq!(err.column(), 7);
        assert!(matches!(
            parse("", M),
            Err(ParseError::Syntax { column: 1, .. })
        ));
        assert!(matches!(parse("pi +", M), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("omega", M),
            Err(ParseError::Syntax { column: 1, .. })
        ));
        assert!(matches!(
            parse("pi)", M),
            Err(ParseError::Syntax { column: 3, .. })
        ));
        assert!(matches!(parse("01", M), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn adm_requires_regular_inner() {
        assert_eq!(
            parse("pi + adm(phi(0,0))", M),
            Err(ParseError::NonRegularAdm { column: 6 })
        );
        assert!(parse("adm(d(pi;0))", M).is_ok());
    }
}
