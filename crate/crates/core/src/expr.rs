//! A small expression language for matrix entries: `-3/2`, `2i`, `sqrt2`,
//! `1 - j/sqrt(2)`, `(1+i)(1-k)`.
//!
//! Supported: decimal numbers (with optional exponent), the units `i`, `j`,
//! `k`, the constant `pi`, `sqrt` applied to a number or a parenthesized real
//! expression, `+ - * /`, integer powers `^n`, parentheses and implicit
//! multiplication by juxtaposition. Products keep their written order
//! (quaternion multiplication is not commutative) and `a / b` means `a b^{-1}`.

use num_complex::Complex64;

use crate::quaternion::Quaternion;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Open,
    Close,
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse { position, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut p = 0;
    while p < bytes.len() {
        let c = bytes[p] as char;
        if c.is_ascii_whitespace() {
            p += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = p;
            while p < bytes.len() && (bytes[p].is_ascii_digit() || bytes[p] == b'.') {
                p += 1;
            }
            if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
                let mut q = p + 1;
                if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                    q += 1;
                }
                if q < bytes.len() && bytes[q].is_ascii_digit() {
                    while q < bytes.len() && bytes[q].is_ascii_digit() {
                        q += 1;
                    }
                    p = q;
                }
            }
            let text = &src[start..p];
            let v: f64 = text.parse().map_err(|_| err(start, format!("bad number '{text}'")))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = p;
            while p < bytes.len() && bytes[p].is_ascii_alphabetic() {
                p += 1;
            }
            out.push((start, Tok::Ident(src[start..p].to_string())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::Open,
                ')' => Tok::Close,
                _ => return Err(err(p, format!("unexpected character '{c}'"))),
            };
            out.push((p, tok));
            p += c.len_utf8();
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expr(&mut self) -> Result<Quaternion> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Quaternion> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.unary()?;
                    acc *= d.try_inverse(0.0).map_err(|_| err(at, "division by zero"))?;
                }
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::Open) => acc *= self.power()?,
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Quaternion> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Quaternion> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let at = self.here();
            let neg = matches!(self.peek(), Some(Tok::Op('-')));
            if neg {
                self.pos += 1;
            }
            let Some(Tok::Num(e)) = self.peek().cloned() else {
                return Err(err(at, "exponent must be an integer"));
            };
            if e.fract() != 0.0 || e > 64.0 {
                return Err(err(at, "exponent must be an integer of at most 64"));
            }
            self.pos += 1;
            let mut out = Quaternion::ONE;
            for _ in 0..e as u32 {
                out *= base;
            }
            if neg {
                out = out.try_inverse(0.0).map_err(|_| err(at, "negative power of zero"))?;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Quaternion> {
        let at = self.here();
        let Some(tok) = self.peek().cloned() else {
            return Err(err(at, "unexpected end of input"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Quaternion::real(v)),
            Tok::Open => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::Close) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(err(self.here(), "expected ')'")),
                }
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Quaternion::I),
                "j" => Ok(Quaternion::J),
                "k" => Ok(Quaternion::K),
                "pi" => Ok(Quaternion::real(std::f64::consts::PI)),
                "sqrt" => {
                    let arg_at = self.here();
                    let arg = match self.peek() {
                        Some(Tok::Num(_) | Tok::Open) => self.atom()?,
                        _ => return Err(err(arg_at, "sqrt needs a number or a parenthesized argument")),
                    };
                    if arg.imag_part().max_abs() != 0.0 || arg.re < 0.0 {
                        return Err(err(arg_at, "sqrt needs a nonnegative real argument"));
                    }
                    Ok(Quaternion::real(arg.re.sqrt()))
                }
                _ => Err(err(at, format!("unknown name '{name}'"))),
            },
            Tok::Op(c) => Err(err(at, format!("unexpected '{c}'"))),
            Tok::Close => Err(err(at, "unexpected ')'")),
        }
    }
}

/// Evaluates an expression to a quaternion.
pub fn parse_quaternion(src: &str) -> Result<Quaternion> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.here(), "unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("expression '{src}'")));
    }
    Ok(v)
}

/// Evaluates an expression that must not involve `j` or `k`.
pub fn parse_complex(src: &str) -> Result<Complex64> {
    let q = parse_quaternion(src)?;
    if q.j != 0.0 || q.k != 0.0 {
        return Err(err(0, format!("'{src}' is not complex")));
    }
    Ok(q.complex_part())
}

/// Evaluates an expression that must be real.
pub fn parse_real(src: &str) -> Result<f64> {
    let q = parse_quaternion(src)?;
    if q.imag_part().max_abs() != 0.0 {
        return Err(err(0, format!("'{src}' is not real")));
    }
    Ok(q.re)
}
