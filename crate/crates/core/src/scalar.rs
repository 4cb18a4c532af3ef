//! Exact arithmetic in Z[i][A^(±1/2)].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::text::{self, Node};

/// Gaussian integer `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    /// `i^m` for any integer `m`.
    pub fn i_pow(m: i64) -> Self {
        match m.rem_euclid(4) {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            2 => Self::new(-1, 0),
            _ => Self::new(0, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Units are ±1 and ±i.
    pub fn is_unit(&self) -> bool {
        let one = BigInt::one();
        (self.re.abs() == one && self.im.is_zero()) || (self.re.is_zero() && self.im.abs() == one)
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self) -> Option<Self> {
        self.is_unit().then(|| self.conj())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Whether the value is a negative rational integer or a negative multiple of `i`,
    /// so that it can be rendered after a binary minus sign.
    fn is_negative_like(&self) -> bool {
        (self.im.is_zero() && self.re.is_negative()) || (self.re.is_zero() && self.im.is_negative())
    }

    fn is_simple(&self) -> bool {
        self.re.is_zero() || self.im.is_zero()
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = BigInt::one();
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im = if self.im == one {
            "i".to_string()
        } else if self.im == -&one {
            "-i".to_string()
        } else {
            format!("{}i", self.im)
        };
        if self.re.is_zero() {
            return write!(f, "{im}");
        }
        if self.im.is_negative() {
            write!(f, "{}{}", self.re, im)
        } else {
            write!(f, "{}+{}", self.re, im)
        }
    }
}

/// Element of Z[i][A^(±1/2)]; the key `n` of `terms` stands for `A^(n/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianHalfLaurent {
    terms: BTreeMap<i64, GaussianInt>,
}

impl GaussianHalfLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(GaussianInt::one(), 0)
    }

    /// `c · A^(half/2)`.
    pub fn monomial(c: GaussianInt, half: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half, c);
        }
        GaussianHalfLaurent { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::monomial(GaussianInt::new(n, 0), 0)
    }

    pub fn i() -> Self {
        Self::monomial(GaussianInt::i(), 0)
    }

    /// `A^(half/2)`.
    pub fn a_pow(half: i64) -> Self {
        Self::monomial(GaussianInt::one(), half)
    }

    /// `(−A²)^(m/2) · A^(n/2)` under the branch `(−A²)^(1/2) = iA`,
    /// i.e. `i^m · A^(m + n/2)`.
    pub fn from_phase(m: i64, n: i64) -> Self {
        Self::monomial(GaussianInt::i_pow(m), 2 * m + n)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &GaussianInt)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply by `A^(half/2)`.
    pub fn shift(&self, half: i64) -> Self {
        if half == 0 {
            return self.clone();
        }
        GaussianHalfLaurent {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k + half, v.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GaussianHalfLaurent {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    fn add_term(&mut self, half: i64, c: &GaussianInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(half).or_insert_with(GaussianInt::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&half);
        }
    }

    /// Units are `u · A^(n/2)` with `u` in {±1, ±i}.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().unwrap().is_unit()
    }

    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (k, v) = self.terms.iter().next().unwrap();
        Some(Self::monomial(v.unit_inverse()?, -k))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Numerical value at `A^(1/2) = s`.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        if s == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("A^(1/2) must be nonzero".into()));
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| c.to_complex() * s.powi(*k as i32))
            .sum())
    }

    pub fn parse(src: &str) -> Result<Self> {
        from_node(&text::parse(src)?)
    }

    fn fmt_a(half: i64) -> String {
        match half {
            0 => String::new(),
            2 => "A".into(),
            h if h % 2 == 0 => format!("A^{}", h / 2),
            h => format!("A^({h}/2)"),
        }
    }

    /// Rendering of a single term; returns (is_negative, magnitude text).
    fn fmt_term(half: i64, c: &GaussianInt) -> (bool, String) {
        let neg = c.is_negative_like();
        let mag = if neg { -c } else { c.clone() };
        let a = Self::fmt_a(half);
        let coeff = if mag.is_simple() {
            mag.to_string()
        } else {
            format!("({mag})")
        };
        let text = if a.is_empty() {
            coeff
        } else if mag.is_one_value() {
            a
        } else {
            format!("{coeff}*{a}")
        };
        (neg, text)
    }

    /// Splits off a leading minus sign when the value is a single negative-like term.
    pub(crate) fn split_sign(&self) -> (bool, GaussianHalfLaurent) {
        if self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().unwrap();
            if c.is_negative_like() {
                return (true, Self::monomial(-c, *k));
            }
        }
        (false, self.clone())
    }

    /// Whether rendering needs parentheses when used as a coefficient.
    pub(crate) fn needs_parens(&self) -> bool {
        if self.terms.len() > 1 {
            return true;
        }
        match self.terms.values().next() {
            Some(c) => !c.is_simple(),
            None => false,
        }
    }
}

impl GaussianInt {
    fn is_one_value(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
}

fn from_node(node: &Node) -> Result<GaussianHalfLaurent> {
    type G = GaussianHalfLaurent;
    Ok(match node {
        Node::Int(n) => G::monomial(GaussianInt::new(n.clone(), 0), 0),
        Node::Name(s) if s == "i" => G::i(),
        Node::Name(s) if s == "A" => G::a_pow(2),
        Node::Name(s) => return Err(Error::UnknownName(s.clone())),
        Node::Sum(ts) => {
            let mut acc = G::zero();
            for (neg, t) in ts {
                let v = from_node(t)?;
                acc = if *neg { &acc - &v } else { &acc + &v };
            }
            acc
        }
        Node::Product(fs) => {
            let mut acc = G::one();
            for f in fs {
                acc = &acc * &from_node(f)?;
            }
            acc
        }
        Node::Pow(base, half) => {
            if **base == Node::Name("A".into()) {
                return Ok(G::a_pow(*half));
            }
            if half % 2 != 0 {
                return Err(Error::Parse("half-integer power of a non-A base".into()));
            }
            let b = from_node(base)?;
            let k = half / 2;
            if k >= 0 {
                b.pow(k as u32)
            } else {
                b.unit_inverse()
                    .ok_or_else(|| Error::NonUnit(b.to_string()))?
                    .pow((-k) as u32)
            }
        }
        Node::Weyl(_) => return Err(Error::Parse("Weyl bracket in a scalar".into())),
    })
}

impl fmt::Display for GaussianHalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (half, c)) in self.terms.iter().enumerate() {
            let (neg, text) = Self::fmt_term(*half, c);
            match (idx, neg) {
                (0, true) => write!(f, "-{text}")?,
                (0, false) => write!(f, "{text}")?,
                (_, true) => write!(f, " - {text}")?,
                (_, false) => write!(f, " + {text}")?,
            }
        }
        Ok(())
    }
}

impl Add for &GaussianHalfLaurent {
    type Output = GaussianHalfLaurent;
    fn add(self, o: &GaussianHalfLaurent) -> GaussianHalfLaurent {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, v);
        }
        out
    }
}

impl AddAssign<&GaussianHalfLaurent> for GaussianHalfLaurent {
    fn add_assign(&mut self, o: &GaussianHalfLaurent) {
        for (k, v) in &o.terms {
            self.add_term(*k, v);
        }
    }
}

impl Sub for &GaussianHalfLaurent {
    type Output = GaussianHalfLaurent;
    fn sub(self, o: &GaussianHalfLaurent) -> GaussianHalfLaurent {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, &-v);
        }
        out
    }
}

impl Mul for &GaussianHalfLaurent {
    type Output = GaussianHalfLaurent;
    fn mul(self, o: &GaussianHalfLaurent) -> GaussianHalfLaurent {
        let mut out = GaussianHalfLaurent::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &o.terms {
                out.add_term(k1 + k2, &(v1 * v2));
            }
        }
        out
    }
}

impl Neg for &GaussianHalfLaurent {
    type Output = GaussianHalfLaurent;
    fn neg(self) -> GaussianHalfLaurent {
        GaussianHalfLaurent {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianHalfLaurent {
            type Output = GaussianHalfLaurent;
            fn $m(self, o: GaussianHalfLaurent) -> GaussianHalfLaurent {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianHalfLaurent {
    type Output = GaussianHalfLaurent;
    fn neg(self) -> GaussianHalfLaurent {
        -&self
    }
}

impl std::str::FromStr for GaussianHalfLaurent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
