//! Text DSL for scalar fields.
//!
//! Grammar:
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := number | ident | '(' expr ')'
//!         | ('sin'|'cos'|'exp') '(' expr ')' | '-' base
//! ```
//! Identifiers are the chart's coordinate names. Note that unary minus binds
//! tighter than `^`: `-x0^2` is `(-x0)^2`. [`ScalarField`]'s `Display` output
//! re-parses to an evaluation-equivalent field.

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::scalar::ScalarField;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'+' => {
                    self.pos += 1;
                    out.push((start, Tok::Plus));
                }
                b'-' => {
                    self.pos += 1;
                    out.push((start, Tok::Minus));
                }
                b'*' => {
                    self.pos += 1;
                    out.push((start, Tok::Star));
                }
                b'/' => {
                    self.pos += 1;
                    out.push((start, Tok::Slash));
                }
                b'^' => {
                    self.pos += 1;
                    out.push((start, Tok::Caret));
                }
                b'(' => {
                    self.pos += 1;
                    out.push((start, Tok::LParen));
                }
                b')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                b'0'..=b'9' | b'.' => {
                    out.push((start, self.number()?));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap()
                        .to_string();
                    out.push((start, Tok::Ident(name)));
                }
                _ => {
                    return Err(Error::Parse {
                        position: start,
                        message: format!("unexpected character `{}`", c as char),
                    });
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // Scientific notation: 1e-3, 2.5e10.
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `e` starts an identifier, not an exponent; back off.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map(Tok::Num).map_err(|_| Error::Parse {
            position: start,
            message: format!("bad number literal `{text}`"),
        })
    }
}

const MAX_NESTING: usize = 200;

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    chart: &'a Chart,
    end: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            _ => Err(Error::Parse {
                position: pos,
                message: format!("expected {what}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<ScalarField> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(Error::Parse {
                position: self.pos(),
                message: format!("expression nests deeper than {MAX_NESTING} levels"),
            });
        }
        let result = self.expr_inner();
        self.depth -= 1;
        result
    }

    fn expr_inner(&mut self) -> Result<ScalarField> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ScalarField> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = &acc * &rhs.recip();
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ScalarField> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            let negative = if let Some(Tok::Minus) = self.peek() {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                    let m = v as i32;
                    Ok(base.powi(if negative { -m } else { m }))
                }
                _ => Err(Error::Parse {
                    position: pos,
                    message: "exponent must be an integer".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<ScalarField> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(ScalarField::constant(self.chart, v)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "sin" | "cos" | "exp" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "sin" => arg.sin(),
                        "cos" => arg.cos(),
                        _ => arg.exp(),
                    })
                }
                _ => match self.chart.coord_index(&name) {
                    Some(i) => Ok(ScalarField::coord(self.chart, i)),
                    None => Err(Error::UnknownIdentifier {
                        position: pos,
                        name,
                    }),
                },
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Minus) => {
                self.depth += 1;
                if self.depth > MAX_NESTING {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("expression nests deeper than {MAX_NESTING} levels"),
                    });
                }
                let inner = self.base();
                self.depth -= 1;
                Ok(-&inner?)
            }
            _ => Err(Error::Parse {
                position: pos,
                message: "expected a number, identifier, or `(`".into(),
            }),
        }
    }
}

/// Parse a DSL expression into a scalar field on `chart`.
pub fn parse(src: &str, chart: &Chart) -> Result<ScalarField> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser {
        toks,
        idx: 0,
        chart,
        end: src.len(),
        depth: 0,
    };
    let field = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(Error::Parse {
            position: p.pos(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(field)
}
