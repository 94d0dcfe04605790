//! Textual Lie elements: signed sums of optionally scaled factors, where a
//! factor is a generator name, a parenthesized expression, or a left-normed
//! bracket `[a, b, ...]` of expressions. Whitespace is ignored.

use num::{BigInt, One, Zero};

use super::element::LieElement;
use crate::error::{Error, Result};
use crate::ratlin::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LBrack => "'['".into(),
            Tok::RBrack => "']'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((Tok::Int(digits.parse().expect("digits")), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character '{other}' at position {start}"
                )))
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        let (t, at) = &self.toks[self.pos];
        Error::Parse(format!(
            "unexpected {} at position {at} in \"{}\" (expected {expected})",
            t.describe(),
            self.src
        ))
    }

    fn expect(&mut self, t: Tok, expected: &str) -> Result<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<LieElement> {
        let mut acc = LieElement::zero(self.names.len());
        let mut sign = match self.peek() {
            Tok::Minus => {
                self.next();
                -Scalar::one()
            }
            Tok::Plus => {
                self.next();
                Scalar::one()
            }
            _ => Scalar::one(),
        };
        loop {
            let t = self.term()?;
            acc = acc.add_scaled(&t, &sign);
            sign = match self.peek() {
                Tok::Plus => Scalar::one(),
                Tok::Minus => -Scalar::one(),
                _ => return Ok(acc),
            };
            self.next();
        }
    }

    fn term(&mut self) -> Result<LieElement> {
        if let Tok::Int(n) = self.peek().clone() {
            self.next();
            let mut coef = Scalar::from_integer(n);
            if *self.peek() == Tok::Slash {
                self.next();
                match self.next() {
                    Tok::Int(d) if !d.is_zero() => coef /= Scalar::from_integer(d),
                    Tok::Int(_) => {
                        self.pos -= 1;
                        return Err(Error::Parse(format!(
                            "zero denominator at position {} in \"{}\"",
                            self.toks[self.pos].1, self.src
                        )));
                    }
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("a denominator"));
                    }
                }
            }
            if *self.peek() == Tok::Star {
                self.next();
            }
            return Ok(self.factor()?.scale(&coef));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<LieElement> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let Some(i) = self.names.iter().position(|n| *n == name) else {
                    return Err(Error::Parse(format!(
                        "unknown generator '{name}' at position {} in \"{}\"",
                        self.toks[self.pos].1, self.src
                    )));
                };
                self.next();
                Ok(LieElement::generator(i, self.names.len()))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::LBrack => {
                self.next();
                let mut parts = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.next();
                    parts.push(self.expr()?);
                }
                if parts.len() < 2 {
                    return Err(self.unexpected("',' inside a bracket"));
                }
                self.expect(Tok::RBrack, "']' or ','")?;
                Ok(LieElement::left_normed(&parts))
            }
            _ => Err(self.unexpected("a generator, '[' or '('")),
        }
    }
}

/// Parses a Lie element over the generators `names`.
pub fn parse_element(src: &str, names: &[String]) -> Result<LieElement> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        names,
        src,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("'+', '-' or end of input"));
    }
    Ok(e)
}
