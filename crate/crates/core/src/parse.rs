//! A small precedence-climbing parser for polynomial symbols.
//!
//! Grammar:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        division only by constants
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | variable | '(' expr ')'
//! number := digits ('.' digits)?
//! ```
//! Variables are the phase-space names of the dimension: `q,p` for one,
//! `x,y,px,py` for two, `q1..qd,p1..pd` otherwise. Juxtaposition is not
//! multiplication.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{PsqmError, Result};
use crate::scalar::{ExactComplex, Rational, Scalar};
use crate::star::PolynomialSymbol;
use crate::weyl::phase_names;

const MAX_POWER: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((col, Tok::Num(parse_decimal(&text, col)?)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((col, Tok::Op(c)));
            i += 1;
        } else {
            return Err(PsqmError::Parse {
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((chars.len() + 1, Tok::End));
    Ok(out)
}

fn parse_decimal(text: &str, col: usize) -> Result<Rational> {
    let bad = || PsqmError::Parse {
        col,
        msg: format!("malformed number `{text}`"),
    };
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Rational::new(num, den))
}

/// Guess the dimension from the variable names in `src`; defaults to 1 for
/// constant expressions.
pub fn infer_dim(src: &str) -> Result<usize> {
    let mut dim = 0usize;
    for (col, tok) in tokenize(src)? {
        let Tok::Ident(name) = tok else { continue };
        let d = match name.as_str() {
            "q" | "p" => 1,
            "x" | "y" | "px" | "py" => 2,
            _ => name
                .strip_prefix('q')
                .or_else(|| name.strip_prefix('p'))
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(|k| k.max(3))
                .ok_or_else(|| PsqmError::Parse {
                    col,
                    msg: format!("unknown variable `{name}`"),
                })?,
        };
        if dim != 0 && d != dim && !(dim >= 3 && d >= 3) {
            return Err(PsqmError::Parse {
                col,
                msg: format!("variable `{name}` mixes naming schemes"),
            });
        }
        dim = dim.max(d);
    }
    Ok(dim.max(1))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    dim: usize,
    names: Vec<String>,
}

type Sym = PolynomialSymbol<ExactComplex>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn col(&self) -> usize {
        self.toks[self.pos].0
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(PsqmError::Parse {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Sym> {
        let mut acc = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            acc = if c == '+' {
                acc.plus(&rhs)
            } else {
                acc.minus(&rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Sym> {
        let mut acc = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            let col = self.col();
            self.bump();
            let rhs = self.unary()?;
            if c == '*' {
                acc = acc.times(&rhs);
            } else {
                let d = constant_value(&rhs).ok_or(PsqmError::Parse {
                    col,
                    msg: "division only by constants".into(),
                })?;
                if d.is_zero() {
                    return Err(PsqmError::Parse {
                        col,
                        msg: "division by zero".into(),
                    });
                }
                acc = acc.scale(&ExactComplex::from_rational(&(Rational::one() / d)));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Sym> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let v = self.unary()?;
            return Ok(Sym::zero(self.dim).minus(&v));
        }
        if *self.peek() == Tok::Op('+') {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Sym> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let col = self.col();
        match self.bump() {
            Tok::Num(n) if n.is_integer() => {
                let e = n.to_integer();
                let e =
                    u32::try_from(e)
                        .ok()
                        .filter(|&e| e <= MAX_POWER)
                        .ok_or(PsqmError::Parse {
                            col,
                            msg: format!("exponent must be an integer in 0..={MAX_POWER}"),
                        })?;
                Ok(base.pow(e))
            }
            _ => Err(PsqmError::Parse {
                col,
                msg: "exponent must be a nonnegative integer literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Sym> {
        let col = self.col();
        match self.bump() {
            Tok::Num(r) => Ok(Sym::constant(self.dim, ExactComplex::from_rational(&r))),
            Tok::Ident(name) => match self.names.iter().position(|n| *n == name) {
                Some(k) => Ok(Sym::var(self.dim, k)),
                None => Err(PsqmError::Parse {
                    col,
                    msg: format!(
                        "unknown variable `{name}`; expected one of {}",
                        self.names.join(", ")
                    ),
                }),
            },
            Tok::Op('(') => {
                let v = self.expr()?;
                if *self.peek() != Tok::Op(')') {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(v)
            }
            Tok::End => Err(PsqmError::Parse {
                col,
                msg: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(PsqmError::Parse {
                col,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }
}

fn constant_value(s: &Sym) -> Option<Rational> {
    if s.degree() > 0 {
        return None;
    }
    let c = s.coefficient(&vec![0; s.nvars()]);
    c.im.is_zero().then(|| c.re.clone())
}

/// Parse `src` as a polynomial symbol in `dim` dimensions, inferring the
/// dimension from the variable names when `dim` is `None`.
pub fn parse_symbol(src: &str, dim: Option<usize>) -> Result<Sym> {
    let dim = match dim {
        Some(0) => {
            return Err(PsqmError::InvalidParameter(
                "dimension must be positive".into(),
            ))
        }
        Some(d) => d,
        None => infer_dim(src)?,
    };
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        dim,
        names: phase_names(dim),
    };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(v)
}

/// Parse a real constant expression such as `1/2`, `-0.25` or `3*(1+1/2)`.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = parse_symbol(src, Some(1))?;
    constant_value(&s).ok_or(PsqmError::Parse {
        col: 1,
        msg: format!("`{src}` is not a real constant"),
    })
}
