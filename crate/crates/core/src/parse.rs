//! Text grammar and JSON schema for exponential polynomials.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := ['-'] factor ('*' factor)*
//! factor := primary ('^' uint)*
//! primary := number | 'i' | 'z' | '(' expr ')' | 'exp' '(' expr ')'
//! ```
//!
//! `^` binds tighter than `*`; numbers are decimal literals with an optional
//! fractional part (no scientific notation). Expressions flatten
//! algebraically into `Σ P_j e^{Q_j}`: products of exponentials add their
//! exponents, like exponents merge, and the argument of every `exp` must
//! flatten to a plain polynomial in `z`.

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::poly::Poly;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Parses the grammar above into a flattened exponential polynomial.
pub fn parse_expression(src: &str) -> Result<ExpPoly> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let f = p.expr()?;
    match p.peek().kind {
        TokenKind::End => Ok(f),
        _ => Err(p.error("unexpected trailing input")),
    }
}

// ---------------------------------------------------------------------------
// Tokenizer

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number { value: f64, integral: bool },
    ImagUnit,
    Var,
    Exp,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokenKind,
    position: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let position = i;
        let b = bytes[i];
        let kind = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut integral = true;
                if i < bytes.len() && bytes[i] == b'.' {
                    integral = false;
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == frac_start {
                        return Err(Error::Syntax {
                            position: i.min(bytes.len()),
                            message: "expected digits after decimal point".into(),
                        });
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|e| Error::Syntax {
                    position: start,
                    message: format!("bad number literal: {e}"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number { value, integral },
                    position: start,
                });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let kind = match &src[start..i] {
                    "i" => TokenKind::ImagUnit,
                    "z" => TokenKind::Var,
                    "exp" => TokenKind::Exp,
                    other => {
                        return Err(Error::Syntax {
                            position: start,
                            message: format!("unknown identifier `{other}`"),
                        })
                    }
                };
                tokens.push(Token {
                    kind,
                    position: start,
                });
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    position,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        tokens.push(Token { kind, position });
        i += 1;
    }
    tokens.push(Token {
        kind: TokenKind::End,
        position: bytes.len(),
    });
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Recursive descent, flattening as it goes

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.peek().position,
            message: message.into(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<()> {
        if self.peek().kind == kind {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self) -> Result<ExpPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExpPoly> {
        let negated = if self.peek().kind == TokenKind::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.factor()?;
        while self.peek().kind == TokenKind::Star {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(if negated { acc.neg() } else { acc })
    }

    fn factor(&mut self) -> Result<ExpPoly> {
        let mut acc = self.primary()?;
        while self.peek().kind == TokenKind::Caret {
            self.bump();
            let exponent = match self.peek().kind {
                TokenKind::Number { value, integral } if integral && value >= 0.0 => {
                    if value > 9999.0 {
                        return Err(self.error("exponent too large"));
                    }
                    self.bump();
                    value as u32
                }
                _ => return Err(self.error("expected a nonnegative integer after `^`")),
            };
            acc = acc.pow(exponent);
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<ExpPoly> {
        let token = self.bump();
        match token.kind {
            TokenKind::Number { value, .. } => Ok(ExpPoly::constant(Complex64::new(value, 0.0))),
            TokenKind::ImagUnit => Ok(ExpPoly::constant(Complex64::new(0.0, 1.0))),
            TokenKind::Var => Ok(ExpPoly::from_pairs(vec![(
                Poly::monomial(Complex64::new(1.0, 0.0), 1),
                Poly::zero(),
            )])),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "expected `)`")?;
                Ok(inner)
            }
            TokenKind::Exp => {
                let open = self.peek().position;
                self.expect(TokenKind::LParen, "expected `(` after `exp`")?;
                let arg = self.expr()?;
                self.expect(TokenKind::RParen, "expected `)`")?;
                let exponent = polynomial_part(&arg).ok_or(Error::NonPolynomialExponent {
                    position: open,
                    message: "argument of exp must flatten to a polynomial in z".into(),
                })?;
                Ok(ExpPoly::from_pairs(vec![(
                    Poly::constant(Complex64::new(1.0, 0.0)),
                    exponent,
                )]))
            }
            _ => Err(Error::Syntax {
                position: token.position,
                message: "expected a number, `i`, `z`, `(`, or `exp(`".into(),
            }),
        }
    }
}

/// `Some(P)` when `f` is the plain polynomial `P` (no exponential part).
fn polynomial_part(f: &ExpPoly) -> Option<Poly> {
    match f.terms() {
        [] => Some(Poly::zero()),
        [t] if t.exponent().is_zero() => Some(t.coeff().clone()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Canonical text

/// Prints `f` so that re-parsing reproduces an equal value. Terms come out
/// in the canonical (exponent-lexicographic) order; float literals use the
/// shortest round-trip decimal form.
pub fn to_canonical_text(f: &ExpPoly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    f.terms()
        .iter()
        .map(|t| {
            let p = format!("({})", poly_text(t.coeff()));
            if t.exponent().is_zero() {
                p
            } else {
                format!("{p}*exp({})", poly_text(t.exponent()))
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

fn poly_text(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (negated, body) = monomial_text(c, k);
        if first {
            if negated {
                out.push('-');
            }
            first = false;
        } else {
            out.push(if negated { '-' } else { '+' });
        }
        out.push_str(&body);
    }
    out
}

/// Splits an obvious leading sign off pure-real / pure-imaginary scalars;
/// mixed complex scalars are parenthesized whole.
fn monomial_text(c: Complex64, k: usize) -> (bool, String) {
    let power = match k {
        0 => String::new(),
        1 => "z".to_string(),
        _ => format!("z^{k}"),
    };
    let (negated, scalar) = if c.im == 0.0 {
        (c.re < 0.0, fmt_f64(c.re.abs()))
    } else if c.re == 0.0 {
        if c.im.abs() == 1.0 {
            (c.im < 0.0, "i".to_string())
        } else {
            (c.im < 0.0, format!("{}*i", fmt_f64(c.im.abs())))
        }
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        (
            false,
            format!("({}{}{}*i)", fmt_f64(c.re), sign, fmt_f64(c.im.abs())),
        )
    };
    if k == 0 {
        return (negated, scalar);
    }
    if scalar == "1" {
        (negated, power)
    } else {
        (negated, format!("{scalar}*{power}"))
    }
}

/// Shortest round-trip decimal without scientific notation (Rust's `{}`
/// on f64 never emits an exponent), which the grammar can re-read exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct JsonExpPoly {
    terms: Vec<JsonTerm>,
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    #[serde(rename = "P")]
    p: Vec<[f64; 2]>,
    #[serde(rename = "Q")]
    q: Vec<[f64; 2]>,
}

/// Serializes to `{"terms":[{"P":[[re,im],...],"Q":[[re,im],...]},...]}`,
/// coefficients ascending in degree.
pub fn to_json(f: &ExpPoly) -> String {
    let terms = f
        .terms()
        .iter()
        .map(|t| JsonTerm {
            p: t.coeff().coeffs().iter().map(|c| [c.re, c.im]).collect(),
            q: t.exponent().coeffs().iter().map(|c| [c.re, c.im]).collect(),
        })
        .collect();
    serde_json::to_string(&JsonExpPoly { terms }).expect("plain structs serialize")
}

/// Deserializes and validates the schema of [`to_json`]. Violations of the
/// symbolic invariants (`Q(0) ≠ 0`, duplicate exponents, `P ≡ 0`) are errors;
/// an empty term list is accepted as the zero function with a warning.
pub fn from_json(s: &str) -> Result<(ExpPoly, Vec<String>)> {
    let raw: JsonExpPoly = serde_json::from_str(s)?;
    let mut warnings = Vec::new();
    if raw.terms.is_empty() {
        warnings.push("empty term list: this is the zero function".to_string());
    }
    let mut pairs: Vec<(Poly, Poly)> = Vec::new();
    for (idx, term) in raw.terms.iter().enumerate() {
        let p = Poly::new(term.p.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
        let q = Poly::new(term.q.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
        if p.is_zero() {
            return Err(Error::Invariant(format!("term {idx}: P is identically zero")));
        }
        if q.constant_term() != Complex64::new(0.0, 0.0) {
            return Err(Error::Invariant(format!("term {idx}: Q(0) ≠ 0")));
        }
        if pairs.iter().any(|(_, other)| *other == q) {
            return Err(Error::Invariant(format!("term {idx}: duplicate exponent Q")));
        }
        pairs.push((p, q));
    }
    Ok((ExpPoly::from_pairs(pairs), warnings))
}
