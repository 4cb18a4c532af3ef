//! Quantum tori: Laurent polynomials in generators with `x_i x_j = A^<e_i,e_j> x_j x_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{GaussianHalfLaurent, GaussianInt};
use crate::text::{self, Node};

pub type Exps = Vec<i32>;

/// Antisymmetric integer form on the generator lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationForm {
    n: usize,
    form: Vec<i32>,
}

/// `coeff · x_1^{u_1} ⋯ x_n^{u_n}` in ascending generator order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: GaussianHalfLaurent,
    pub exps: Exps,
}

/// Finite sum of normal-ordered monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusElement {
    n: usize,
    terms: BTreeMap<Exps, GaussianHalfLaurent>,
}

impl CommutationForm {
    pub fn zero(n: usize) -> Self {
        CommutationForm {
            n,
            form: vec![0; n * n],
        }
    }

    /// Builds a form from a full matrix, checking antisymmetry.
    pub fn from_matrix(rows: &[Vec<i32>]) -> Result<Self> {
        let n = rows.len();
        let mut f = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structure(row.len(), n));
            }
            for (j, v) in row.iter().enumerate() {
                f.form[i * n + j] = *v;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if f.get(i, j) != -f.get(j, i) {
                    return Err(Error::Domain(format!(
                        "form not antisymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Sets `<e_i,e_j> = v` and `<e_j,e_i> = -v`.
    pub fn set(&mut self, i: usize, j: usize, v: i32) {
        assert!(
            i != j || v == 0,
            "diagonal of a commutation form must vanish"
        );
        self.form[i * self.n + j] = v;
        self.form[j * self.n + i] = -v;
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.form[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nonzero_pairs(&self) -> usize {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j) != 0)
            .count()
    }

    /// `Σ_{i>j} u_i v_j <e_i,e_j>`: the A-power collected when moving `x^v` left past `x^u`.
    pub fn kappa(&self, u: &[i32], v: &[i32]) -> i64 {
        let mut acc = 0i64;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate().take(i) {
                if vj != 0 {
                    acc += (ui as i64) * (vj as i64) * self.get(i, j) as i64;
                }
            }
        }
        acc
    }

    /// `Σ_{i,j} u_i v_j <e_i,e_j>`.
    pub fn bilinear(&self, u: &[i32], v: &[i32]) -> i64 {
        let mut acc = 0i64;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0 {
                    acc += (ui as i64) * (vj as i64) * self.get(i, j) as i64;
                }
            }
        }
        acc
    }

    /// Half-exponent `-Σ_{i<j} u_i u_j <e_i,e_j>` of the Weyl prefactor.
    pub fn weyl_half(&self, u: &[i32]) -> i64 {
        self.kappa(u, u)
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::Structure(n, self.n));
        }
        Ok(())
    }

    pub fn mul_monomial(&self, a: &Monomial, b: &Monomial) -> Result<Monomial> {
        self.check(a.exps.len())?;
        self.check(b.exps.len())?;
        let k = self.kappa(&a.exps, &b.exps);
        Ok(Monomial {
            coeff: (&a.coeff * &b.coeff).shift(2 * k),
            exps: add_exps(&a.exps, &b.exps),
        })
    }

    pub fn mul(&self, a: &TorusElement, b: &TorusElement) -> Result<TorusElement> {
        self.check(a.n)?;
        self.check(b.n)?;
        let mut out = TorusElement::zero(self.n);
        for (u, cu) in &a.terms {
            for (v, cv) in &b.terms {
                let k = self.kappa(u, v);
                out.add_term(add_exps(u, v), &(cu * cv).shift(2 * k));
            }
        }
        Ok(out)
    }

    /// Product of a list of elements, left to right.
    pub fn product<'a, I>(&self, items: I) -> Result<TorusElement>
    where
        I: IntoIterator<Item = &'a TorusElement>,
    {
        let mut acc = TorusElement::one(self.n);
        for x in items {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// `A^(-1/2 Σ_{i<j} u_i u_j <e_i,e_j>) x^u`.
    pub fn weyl(&self, u: &[i32]) -> TorusElement {
        assert_eq!(u.len(), self.n, "exponent vector length");
        TorusElement::monomial(GaussianHalfLaurent::a_pow(self.weyl_half(u)), u.to_vec())
    }

    /// Weyl-ordered product of a word of generator powers, computed literally:
    /// the word in the given order times `A^(-1/2 Σ_{a<b} p_a p_b <e_{g_a},e_{g_b}>)`.
    pub fn weyl_word(&self, word: &[(usize, i32)]) -> TorusElement {
        let mut half = 0i64;
        for a in 0..word.len() {
            for b in a + 1..word.len() {
                let (ga, pa) = word[a];
                let (gb, pb) = word[b];
                half -= (pa as i64) * (pb as i64) * self.get(ga, gb) as i64;
            }
        }
        let mut acc = TorusElement::constant(self.n, GaussianHalfLaurent::a_pow(half));
        for &(g, p) in word {
            let mut e = vec![0; self.n];
            e[g] = p;
            acc = self
                .mul(&acc, &TorusElement::monomial(GaussianHalfLaurent::one(), e))
                .unwrap();
        }
        acc
    }

    /// Exact `k`-th power; negative powers need a unit coefficient.
    pub fn pow(&self, m: &Monomial, k: i64) -> Result<Monomial> {
        self.check(m.exps.len())?;
        let base = if k >= 0 {
            m.clone()
        } else {
            let inv = m
                .coeff
                .unit_inverse()
                .ok_or_else(|| Error::NonUnit(m.coeff.to_string()))?;
            let neg: Exps = m.exps.iter().map(|x| -x).collect();
            // x^u · x^{-u} = A^{κ(u,-u)}, so (x^u)^{-1} = A^{-κ(u,-u)} x^{-u}
            let k0 = self.kappa(&m.exps, &neg);
            Monomial {
                coeff: inv.shift(-2 * k0),
                exps: neg,
            }
        };
        let mut acc = Monomial::one(self.n);
        for _ in 0..k.unsigned_abs() {
            acc = self.mul_monomial(&acc, &base)?;
        }
        Ok(acc)
    }

    /// Inverse of a monomial element.
    pub fn inverse(&self, a: &TorusElement) -> Result<TorusElement> {
        let m = a
            .as_monomial()
            .ok_or_else(|| Error::NonUnit("element is not a monomial".into()))?;
        Ok(self.pow(&m, -1)?.into())
    }

    pub fn commutes(&self, a: &TorusElement, b: &TorusElement) -> Result<bool> {
        Ok(self.mul(a, b)? == self.mul(b, a)?)
    }

    /// Numerical value in normal order with `x_i ↦ assignment[i]` and `A^(1/2) ↦ s`.
    pub fn specialize(
        &self,
        a: &TorusElement,
        assignment: &[Complex64],
        s: Complex64,
    ) -> Result<Complex64> {
        self.check(a.n)?;
        if assignment.len() != self.n {
            return Err(Error::Domain(format!(
                "assignment has {} values for {} generators",
                assignment.len(),
                self.n
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (u, c) in &a.terms {
            let mut v = c.eval(s)?;
            for (x, e) in assignment.iter().zip(u) {
                if *e != 0 {
                    v *= x.powi(*e);
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Parses the textual grammar, resolving names through `lookup`.
    /// A Weyl bracket `[f1 f2 ...]` denotes the Weyl-ordered product of its factors' exponents.
    pub fn parse(
        &self,
        src: &str,
        lookup: &dyn Fn(&str) -> Option<TorusElement>,
    ) -> Result<TorusElement> {
        self.eval_node(&text::parse(src)?, lookup)
    }

    fn eval_node(
        &self,
        node: &Node,
        lookup: &dyn Fn(&str) -> Option<TorusElement>,
    ) -> Result<TorusElement> {
        let n = self.n;
        Ok(match node {
            Node::Int(v) => TorusElement::constant(
                n,
                GaussianHalfLaurent::monomial(GaussianInt::new(v.clone(), 0), 0),
            ),
            Node::Name(s) if s == "i" => TorusElement::constant(n, GaussianHalfLaurent::i()),
            Node::Name(s) if s == "A" => TorusElement::constant(n, GaussianHalfLaurent::a_pow(2)),
            Node::Name(s) => {
                let x = lookup(s).ok_or_else(|| Error::UnknownName(s.clone()))?;
                self.check(x.n)?;
                x
            }
            Node::Sum(ts) => {
                let mut acc = TorusElement::zero(n);
                for (neg, t) in ts {
                    let v = self.eval_node(t, lookup)?;
                    acc = if *neg { &acc - &v } else { &acc + &v };
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = TorusElement::one(n);
                for f in fs {
                    acc = self.mul(&acc, &self.eval_node(f, lookup)?)?;
                }
                acc
            }
            Node::Pow(base, half) => {
                if **base == Node::Name("A".into()) {
                    return Ok(TorusElement::constant(n, GaussianHalfLaurent::a_pow(*half)));
                }
                if half % 2 != 0 {
                    return Err(Error::Parse("half-integer power of a non-A base".into()));
                }
                let b = self.eval_node(base, lookup)?;
                let k = half / 2;
                if let Some(m) = b.as_monomial() {
                    self.pow(&m, k)?.into()
                } else if k >= 0 {
                    let mut acc = TorusElement::one(n);
                    for _ in 0..k {
                        acc = self.mul(&acc, &b)?;
                    }
                    acc
                } else {
                    return Err(Error::NonUnit("negative power of a sum".into()));
                }
            }
            Node::Weyl(fs) => {
                let mut coeff = GaussianHalfLaurent::one();
                let mut u = vec![0; n];
                for f in fs {
                    let m = self.eval_node(f, lookup)?.as_monomial().ok_or_else(|| {
                        Error::Parse("Weyl bracket factor is not a monomial".into())
                    })?;
                    coeff = &coeff * &m.coeff;
                    u = add_exps(&u, &m.exps);
                }
                self.weyl(&u).scale(&coeff)
            }
        })
    }
}

pub fn add_exps(u: &[i32], v: &[i32]) -> Exps {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn sub_exps(u: &[i32], v: &[i32]) -> Exps {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            coeff: GaussianHalfLaurent::one(),
            exps: vec![0; n],
        }
    }

    pub fn new(coeff: GaussianHalfLaurent, exps: Exps) -> Self {
        Monomial { coeff, exps }
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial {
            coeff: GaussianHalfLaurent::one(),
            exps,
        }
    }
}

impl From<Monomial> for TorusElement {
    fn from(m: Monomial) -> Self {
        TorusElement::monomial(m.coeff, m.exps)
    }
}

impl TorusElement {
    pub fn zero(n: usize) -> Self {
        TorusElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, GaussianHalfLaurent::one())
    }

    pub fn constant(n: usize, c: GaussianHalfLaurent) -> Self {
        Self::monomial(c, vec![0; n])
    }

    pub fn monomial(c: GaussianHalfLaurent, exps: Exps) -> Self {
        let mut out = TorusElement {
            n: exps.len(),
            terms: BTreeMap::new(),
        };
        if !c.is_zero() {
            out.terms.insert(exps, c);
        }
        out
    }

    pub fn generator(n: usize, i: usize) -> Self {
        Monomial::generator(n, i).into()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &GaussianHalfLaurent)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(e, c)| Monomial {
            coeff: c.clone(),
            exps: e.clone(),
        })
    }

    pub fn coefficient(&self, exps: &[i32]) -> GaussianHalfLaurent {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some(Monomial {
            coeff: c.clone(),
            exps: e.clone(),
        })
    }

    pub fn add_term(&mut self, exps: Exps, c: &GaussianHalfLaurent) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, o: &TorusElement) {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn scale(&self, c: &GaussianHalfLaurent) -> Self {
        let mut out = TorusElement::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), &(v * c));
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&GaussianHalfLaurent) -> GaussianHalfLaurent) -> Self {
        let mut out = TorusElement::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), &f(v));
        }
        out
    }

    /// Renders as `coeff * g3^2 g7^-1 + ...` with the given names and factor separator.
    pub fn render(&self, names: &[String], sep: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mono = render_exps(e, names, sep);
            let (neg, mag) = c.split_sign();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else if mag.needs_parens() {
                format!("({mag}) * {mono}")
            } else {
                format!("{mag} * {mono}")
            };
            match (idx, neg) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        out
    }
}

pub fn render_exps(e: &[i32], names: &[String], sep: &str) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, p)| **p != 0)
        .map(|(i, p)| {
            if *p == 1 {
                names[i].clone()
            } else {
                format!("{}^{}", names[i], p)
            }
        })
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.n).map(|i| format!("g{i}")).collect();
        write!(f, "{}", self.render(&names, " "))
    }
}

impl std::ops::Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, o: &TorusElement) -> TorusElement {
        assert_eq!(self.n, o.n, "generator count");
        let mut out = self.clone();
        out.add_assign(o);
        out
    }
}

impl std::ops::Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, o: &TorusElement) -> TorusElement {
        assert_eq!(self.n, o.n, "generator count");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl std::ops::Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.map_coeffs(|c| -c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form2() -> CommutationForm {
        // x2 x1 = A x1 x2
        let mut f = CommutationForm::zero(2);
        f.set(1, 0, 1);
        f
    }

    fn lookup2(s: &str) -> Option<TorusElement> {
        match s {
            "x1" => Some(TorusElement::generator(2, 0)),
            "x2" => Some(TorusElement::generator(2, 1)),
            _ => None,
        }
    }

    fn p(f: &CommutationForm, s: &str) -> TorusElement {
        f.parse(s, &lookup2).unwrap()
    }

    #[test]
    fn mul_examples() {
        let f = form2();
        let x1 = TorusElement::generator(2, 0);
        let x2 = TorusElement::generator(2, 1);
        let x1x2 = TorusElement::monomial(GaussianHalfLaurent::one(), vec![1, 1]);
        assert_eq!(
            f.mul(&x2, &x1).unwrap(),
            x1x2.scale(&GaussianHalfLaurent::a_pow(2))
        );
        let x1inv = TorusElement::monomial(GaussianHalfLaurent::one(), vec![-1, 0]);
        assert_eq!(f.mul(&x1, &x1inv).unwrap(), TorusElement::one(2));
        assert_eq!(
            f.mul(&x1x2, &x1x2).unwrap(),
            TorusElement::monomial(GaussianHalfLaurent::a_pow(2), vec![2, 2])
        );
        assert!(f.mul(&x1, &TorusElement::one(3)).is_err());
    }

    #[test]
    fn weyl_examples() {
        let f = form2();
        assert_eq!(
            f.weyl(&[1, 1]),
            TorusElement::monomial(GaussianHalfLaurent::a_pow(1), vec![1, 1])
        );
        assert_eq!(f.weyl(&[1, 0]), TorusElement::generator(2, 0));
        let u = [3, -2];
        let v = [-3, 2];
        assert_eq!(
            f.mul(&f.weyl(&u), &f.weyl(&v)).unwrap(),
            TorusElement::one(2)
        );
    }

    #[test]
    fn pow_examples() {
        let f = form2();
        let m = Monomial::generator(2, 0);
        assert_eq!(f.pow(&m, 2).unwrap().exps, vec![2, 0]);
        let m = Monomial::new(GaussianHalfLaurent::one(), vec![1, 1]);
        let inv = f.pow(&m, -1).unwrap();
        assert_eq!(
            inv,
            Monomial::new(GaussianHalfLaurent::a_pow(2), vec![-1, -1])
        );
        let m = Monomial::new(GaussianHalfLaurent::a_pow(1), vec![1, 0]);
        assert_eq!(
            f.pow(&m, 2).unwrap(),
            Monomial::new(GaussianHalfLaurent::a_pow(2), vec![2, 0])
        );
        let m = Monomial::new(GaussianHalfLaurent::int(2), vec![1, 0]);
        assert!(f.pow(&m, -1).is_err());
    }

    #[test]
    fn specialize_examples() {
        let f = form2();
        let one = Complex64::new(1.0, 0.0);
        let a = p(&f, "x1 + x1^-1");
        let v = f
            .specialize(&a, &[Complex64::new(2.0, 0.0), one], one)
            .unwrap();
        assert!((v - Complex64::new(2.5, 0.0)).norm() < 1e-15);
        let a = p(&f, "A x1");
        assert!((f.specialize(&a, &[one, one], one).unwrap() - one).norm() < 1e-15);
        assert!((f.specialize(&f.weyl(&[1, 1]), &[one, one], one).unwrap() - one).norm() < 1e-15);
        assert!(f.specialize(&a, &[one], one).is_err());
    }

    #[test]
    fn render_and_parse() {
        let f = form2();
        let a = p(&f, "(1 + A^2) * x1^2 x2^-1 - i*A^(1/2) * x2 + 3");
        let names = vec!["x1".to_string(), "x2".to_string()];
        let text = a.render(&names, " ");
        assert_eq!(p(&f, &text), a, "{text}");
        let w = p(&f, "[x1 x2]");
        assert_eq!(w, f.weyl(&[1, 1]));
        assert_eq!(p(&f, "x2 x1"), p(&f, "A x1 x2"));
    }
}
