//! Tokenizer and parser for the textual grammar shared by scalars and torus elements.

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Int(BigInt),
    Name(String),
    Sum(Vec<(bool, Node)>),
    Product(Vec<Node>),
    /// Exponent in half units: `x^3` is stored as 6, `A^(1/2)` as 1.
    Pow(Box<Node>, i64),
    Weyl(Vec<Node>),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' | '·' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '[' => {
                out.push(Tok::LBracket);
                i += 1
            }
            ']' => {
                out.push(Tok::RBracket);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Tok::Int(digits.parse().expect("digits")));
            }
            c if c.is_alphabetic() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(Tok::Name(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut terms = Vec::new();
        let mut negative = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negative = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        terms.push((negative, self.term()?));
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push((false, self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push((true, self.term()?));
                }
                _ => break,
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            return Ok(terms.pop().unwrap().1);
        }
        Ok(Node::Sum(terms))
    }

    fn term(&mut self) -> Result<Node> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    factors.push(self.factor()?);
                }
                Some(Tok::Int(_)) | Some(Tok::Name(_)) | Some(Tok::LParen)
                | Some(Tok::LBracket) => {
                    factors.push(self.factor()?);
                }
                _ => break,
            }
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        Ok(Node::Product(factors))
    }

    fn factor(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(Node::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<i64> {
        let mut sign = 1;
        if self.peek() == Some(&Tok::Minus) {
            sign = -1;
            self.pos += 1;
        }
        match self.next() {
            Some(Tok::Int(n)) => {
                let v: i64 = n
                    .try_into()
                    .map_err(|_| Error::Parse("exponent too large".into()))?;
                Ok(sign * v)
            }
            got => Err(Error::Parse(format!("expected integer, found {got:?}"))),
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let num = self.signed_int()?;
            let half = if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Int(d)) if d == BigInt::from(2) => num,
                    Some(Tok::Int(d)) if d == BigInt::from(1) => 2 * num,
                    got => return Err(Error::Parse(format!("bad exponent denominator {got:?}"))),
                }
            } else {
                2 * num
            };
            self.expect(Tok::RParen)?;
            Ok(half)
        } else {
            Ok(2 * self.signed_int()?)
        }
    }

    fn primary(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Node::Int(n)),
            Some(Tok::Name(s)) => Ok(Node::Name(s)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::LBracket) => {
                let inner = self.term()?;
                self.expect(Tok::RBracket)?;
                match inner {
                    Node::Product(fs) => Ok(Node::Weyl(fs)),
                    single => Ok(Node::Weyl(vec![single])),
                }
            }
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

pub(crate) fn parse(src: &str) -> Result<Node> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let node = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(node)
}
