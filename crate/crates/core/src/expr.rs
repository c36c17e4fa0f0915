//! Expression grammar for sets and moduli.
//!
//! ```text
//! set     := squares | evens | odds | pow2 | finite[n, ...] | compl(set) | union(set, set)
//! modulus := id | scale(a) | pow(p) | log1p | cantor_ext | lemma(set, k)
//!          | compose(modulus, modulus) | lin(a, modulus, b, modulus) | max(modulus, modulus)
//! ```

use crate::error::{Error, Result};
use crate::modulus::{lemma_modulus_from_set, CombineKind, Modulus};
use crate::natset::NatSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            let start = i;
            i += 1;
            while i < bytes.len() {
                let d = bytes[i] as char;
                let exp_sign = (d == '-' || d == '+') && matches!(bytes[i - 1], b'e' | b'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Number(src[start..i].to_string()), start));
        } else if "()[],".contains(c) {
            out.push((Tok::Punct(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().expect("in bounds");
            return Err(Error::Parse {
                token: ch.to_string(),
                offset: i,
                message: "unexpected character".into(),
            });
        }
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        Ok(Parser {
            src,
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn error(&self, message: impl Into<String>) -> Error {
        match self.toks.get(self.pos) {
            Some((tok, offset)) => Error::Parse {
                token: match tok {
                    Tok::Ident(s) | Tok::Number(s) => s.clone(),
                    Tok::Punct(c) => c.to_string(),
                },
                offset: *offset,
                message: message.into(),
            },
            None => Error::Parse {
                token: "<end>".into(),
                offset: self.src.len(),
                message: message.into(),
            },
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn number<N: std::str::FromStr>(&mut self, what: &str) -> Result<N> {
        match self.peek() {
            Some(Tok::Number(s)) => match s.parse::<N>() {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => Err(self.error(format!("invalid {what}"))),
            },
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn set(&mut self) -> Result<NatSet> {
        let start = self.pos;
        let name = self.ident("a set")?;
        let located = |e: Error, p: &Self| match e {
            Error::Parse { .. } => e,
            other => {
                let (token, offset) = (name.clone(), p.toks[start].1);
                Error::Parse {
                    token,
                    offset,
                    message: other.to_string(),
                }
            }
        };
        match name.as_str() {
            "squares" => Ok(NatSet::squares()),
            "evens" => Ok(NatSet::evens()),
            "odds" => Ok(NatSet::odds()),
            "pow2" => Ok(NatSet::powers_of_two()),
            "finite" => {
                self.punct('[')?;
                let mut elems = Vec::new();
                if self.peek() != Some(&Tok::Punct(']')) {
                    loop {
                        elems.push(self.number::<u64>("a positive integer")?);
                        if self.peek() == Some(&Tok::Punct(',')) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.punct(']')?;
                NatSet::finite(elems).map_err(|e| located(e, self))
            }
            "compl" => {
                self.punct('(')?;
                let inner = self.set()?;
                self.punct(')')?;
                Ok(NatSet::complement(&inner))
            }
            "union" => {
                self.punct('(')?;
                let a = self.set()?;
                self.punct(',')?;
                let b = self.set()?;
                self.punct(')')?;
                Ok(NatSet::union(&a, &b))
            }
            _ => {
                self.pos = start;
                Err(self.error("unknown set"))
            }
        }
    }

    fn modulus<T: Scalar>(&mut self) -> Result<Modulus<T>> {
        let start = self.pos;
        let name = self.ident("a modulus")?;
        let offset = self.toks[start].1;
        let located = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                token: name.clone(),
                offset,
                message: other.to_string(),
            },
        };
        let m = match name.as_str() {
            "id" => Modulus::identity(),
            "log1p" => Modulus::log1p(),
            "cantor_ext" => Modulus::cantor_ext(),
            "scale" | "pow" => {
                self.punct('(')?;
                let a = T::of(self.number::<f64>("a number")?);
                self.punct(')')?;
                let m = if name == "scale" { Modulus::scale(a) } else { Modulus::power(a) };
                m.map_err(located)?
            }
            "lemma" => {
                self.punct('(')?;
                let set = self.set()?;
                self.punct(',')?;
                let k = self.number::<usize>("a knot count")?;
                self.punct(')')?;
                lemma_modulus_from_set(&set, k).map_err(located)?.0
            }
            "compose" | "max" => {
                self.punct('(')?;
                let f = self.modulus()?;
                self.punct(',')?;
                let g = self.modulus()?;
                self.punct(')')?;
                let kind = if name == "max" { CombineKind::Max } else { CombineKind::Compose };
                Modulus::combine(kind, T::one(), T::one(), &f, &g).map_err(located)?
            }
            "lin" => {
                self.punct('(')?;
                let a = T::of(self.number::<f64>("a number")?);
                self.punct(',')?;
                let f = self.modulus()?;
                self.punct(',')?;
                let b = T::of(self.number::<f64>("a number")?);
                self.punct(',')?;
                let g = self.modulus()?;
                self.punct(')')?;
                Modulus::combine(CombineKind::Linear, a, b, &f, &g).map_err(located)?
            }
            _ => {
                self.pos = start;
                return Err(self.error("unknown modulus"));
            }
        };
        Ok(m)
    }
}

pub fn parse_set(src: &str) -> Result<NatSet> {
    let mut p = Parser::new(src)?;
    let set = p.set()?;
    p.finish()?;
    Ok(set)
}

pub fn parse_modulus<T: Scalar>(src: &str) -> Result<Modulus<T>> {
    let mut p = Parser::new(src)?;
    let m = p.modulus()?;
    p.finish()?;
    Ok(m)
}
