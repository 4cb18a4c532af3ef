//! Classical layer: shape parameters, gluing equations and holonomy traces.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{ShapeLabel, Triangulation};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Shape of an ideal tetrahedron; `Z' = (Z-1)/Z` and `Z'' = 1/(1-Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub z: Complex64,
}

impl Shape {
    pub fn new(z: Complex64) -> Result<Self> {
        if z == ZERO || z == ONE {
            return Err(Error::Domain(format!("degenerate shape {z}")));
        }
        Ok(Shape { z })
    }

    pub fn zp(&self) -> Complex64 {
        (self.z - 1.0) / self.z
    }

    pub fn zpp(&self) -> Complex64 {
        1.0 / (1.0 - self.z)
    }

    pub fn param(&self, label: ShapeLabel) -> Complex64 {
        match label {
            ShapeLabel::Z => self.z,
            ShapeLabel::Zp => self.zp(),
            ShapeLabel::Zpp => self.zpp(),
        }
    }

    /// `d log Z_label / dz`.
    fn dlog(&self, label: ShapeLabel) -> Complex64 {
        let z = self.z;
        match label {
            ShapeLabel::Z => 1.0 / z,
            ShapeLabel::Zp => 1.0 / (z * (z - 1.0)),
            ShapeLabel::Zpp => 1.0 / (1.0 - z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TurnType3d {
    Left,
    Right,
    U,
    AcrossLeft,
    AcrossRight,
    AcrossDown,
}

impl TurnType3d {
    pub const ALL: [TurnType3d; 6] = [
        TurnType3d::Left,
        TurnType3d::Right,
        TurnType3d::U,
        TurnType3d::AcrossLeft,
        TurnType3d::AcrossRight,
        TurnType3d::AcrossDown,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TurnType2d {
    Left,
    Right,
    U,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2(m.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Mat2(self.0.map(|r| r.map(|x| x * c)))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_diff(&self, o: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        m
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// Turn matrices with the branch `(−1)^(1/2) = i`.
pub fn turn_matrix(t: TurnType3d) -> Mat2 {
    match t {
        TurnType3d::Left => Mat2::from_real([[1.0, 1.0], [0.0, 1.0]]),
        TurnType3d::Right => Mat2::from_real([[1.0, 0.0], [1.0, 1.0]]),
        TurnType3d::U => Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]]),
        TurnType3d::AcrossLeft => Mat2::from_real([[1.0, 1.0], [1.0, 0.0]]).scale(I),
        TurnType3d::AcrossRight => Mat2::from_real([[0.0, 1.0], [1.0, 1.0]]).scale(I),
        TurnType3d::AcrossDown => Mat2([[-I, ZERO], [ZERO, I]]),
    }
}

pub fn turn_matrix_2d(t: TurnType2d) -> Mat2 {
    match t {
        TurnType2d::Left => turn_matrix(TurnType3d::Left),
        TurnType2d::Right => turn_matrix(TurnType3d::Right),
        TurnType2d::U => turn_matrix(TurnType3d::U),
    }
}

/// `diag((−Z)^(1/2), (−Z)^(−1/2))`, principal branch.
pub fn s_matrix(z: Complex64) -> Result<Mat2> {
    if z == ZERO {
        return Err(Error::Domain("S(Z) is singular at Z = 0".into()));
    }
    let r = (-z).sqrt();
    Ok(Mat2([[r, ZERO], [ZERO, 1.0 / r]]))
}

pub fn s_matrix_2d(x: f64) -> Result<Mat2> {
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "shear coordinate {x} must be positive"
        )));
    }
    let r = x.sqrt();
    Ok(Mat2::from_real([[r, 0.0], [0.0, 1.0 / r]]))
}

/// `S(Z_1) M_1 S(Z_2) M_2 ⋯ S(Z_k) M_k`.
pub fn holonomy(seq: &[(Complex64, TurnType3d)]) -> Result<Mat2> {
    if seq.is_empty() {
        return Err(Error::Precondition("empty turn sequence".into()));
    }
    let mut acc = Mat2::identity();
    for &(z, t) in seq {
        acc = acc.mul(&s_matrix(z)?).mul(&turn_matrix(t));
    }
    Ok(acc)
}

pub fn holonomy_2d(seq: &[(f64, TurnType2d)]) -> Result<Mat2> {
    if seq.is_empty() {
        return Err(Error::Precondition("empty turn sequence".into()));
    }
    let mut acc = Mat2::identity();
    for &(x, t) in seq {
        acc = acc.mul(&s_matrix_2d(x)?).mul(&turn_matrix_2d(t));
    }
    Ok(acc)
}

fn state_sum(diag: &[[Complex64; 2]], mats: &[Mat2]) -> Complex64 {
    let k = diag.len();
    let mut total = ZERO;
    for bits in 0u64..(1u64 << k) {
        // bit set means state −
        let s = |i: usize| ((bits >> (i % k)) & 1) as usize;
        let mut term = ONE;
        for i in 0..k {
            term *= diag[i][s(i)] * mats[i].0[s(i)][s(i + 1)];
            if term == ZERO {
                break;
            }
        }
        total += term;
    }
    total
}

/// `Σ_s ∏ m_i^{s_i s_{i+1}} (−Z_i)^{s_i/2}`, principal branch, cyclic indices.
pub fn trace_state_sum(seq: &[(Complex64, TurnType3d)]) -> Result<Complex64> {
    if seq.is_empty() {
        return Err(Error::Precondition("empty turn sequence".into()));
    }
    if seq.len() > 40 {
        return Err(Error::Precondition(
            "state sum limited to 40 crossings".into(),
        ));
    }
    let mut diag = Vec::with_capacity(seq.len());
    for &(z, _) in seq {
        if z == ZERO {
            return Err(Error::Domain("Z = 0 in state sum".into()));
        }
        let r = (-z).sqrt();
        diag.push([r, 1.0 / r]);
    }
    let mats: Vec<Mat2> = seq.iter().map(|(_, t)| turn_matrix(*t)).collect();
    Ok(state_sum(&diag, &mats))
}

pub fn trace_state_sum_2d(seq: &[(f64, TurnType2d)]) -> Result<Complex64> {
    if seq.is_empty() {
        return Err(Error::Precondition("empty turn sequence".into()));
    }
    let mut diag = Vec::with_capacity(seq.len());
    for &(x, _) in seq {
        if x <= 0.0 {
            return Err(Error::Domain(format!(
                "shear coordinate {x} must be positive"
            )));
        }
        let r = Complex64::new(x.sqrt(), 0.0);
        diag.push([r, 1.0 / r]);
    }
    let mats: Vec<Mat2> = seq.iter().map(|(_, t)| turn_matrix_2d(*t)).collect();
    Ok(state_sum(&diag, &mats))
}

/// Log-form gluing residuals `Σ log Z_{e_i} − 2πi`, one per closed edge class.
pub fn edge_residuals(tri: &Triangulation, shapes: &[Shape]) -> Vec<Complex64> {
    tri.edge_classes
        .iter()
        .filter(|c| c.closed)
        .map(|c| {
            c.members
                .iter()
                .map(|e| shapes[e.tet].param(tri.label(e)).ln())
                .sum::<Complex64>()
                - Complex64::new(0.0, 2.0 * PI)
        })
        .collect()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub const MAX_ITERATIONS: usize = 100;
const TARGET_RESIDUAL: f64 = 1e-12;
const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Damped Newton iteration on the log-form edge equations. Steps are least-squares
/// minimum-norm solutions, so redundant equations and underdetermined systems are allowed.
pub fn solve_gluing(tri: &Triangulation, guess: &[Complex64]) -> Result<Vec<Shape>> {
    let n = tri.num_tets();
    if guess.len() != n {
        return Err(Error::Precondition(format!(
            "guess has {} values for {} tetrahedra",
            guess.len(),
            n
        )));
    }
    if let Some(z) = guess.iter().find(|z| z.im <= 0.0) {
        return Err(Error::Precondition(format!(
            "guess {z} must have positive imaginary part"
        )));
    }
    let mut shapes: Vec<Shape> = guess
        .iter()
        .map(|z| Shape::new(*z))
        .collect::<Result<_>>()?;
    let closed: Vec<usize> = (0..tri.edge_classes.len())
        .filter(|&i| tri.edge_classes[i].closed)
        .collect();
    if closed.is_empty() {
        return Ok(shapes);
    }
    let mut res = edge_residuals(tri, &shapes);
    let mut norm = max_norm(&res);
    for _ in 0..MAX_ITERATIONS {
        if norm < TARGET_RESIDUAL {
            break;
        }
        let mut jac = DMatrix::<Complex64>::zeros(closed.len(), n);
        for (row, &ci) in closed.iter().enumerate() {
            for e in &tri.edge_classes[ci].members {
                jac[(row, e.tet)] += shapes[e.tet].dlog(tri.label(e));
            }
        }
        let rhs = DVector::from_iterator(res.len(), res.iter().map(|r| -r));
        let svd = jac.svd(true, true);
        if svd.singular_values.max() < 1e-14 {
            return Err(Error::DegenerateJacobian);
        }
        let step = svd
            .solve(&rhs, 1e-12 * svd.singular_values.max())
            .map_err(|_| Error::DegenerateJacobian)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Option<Vec<Shape>> = shapes
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let z = s.z + step[k] * t;
                    (z.im > 0.0).then_some(Shape { z })
                })
                .collect();
            if let Some(trial) = trial {
                let tr = edge_residuals(tri, &trial);
                let tn = max_norm(&tr);
                if tn < norm {
                    shapes = trial;
                    res = tr;
                    norm = tn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm >= ACCEPT_RESIDUAL {
        return Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
            residual: norm,
        });
    }
    Ok(shapes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn turn_matrices() {
        assert_eq!(
            turn_matrix(TurnType3d::Left),
            Mat2::from_real([[1.0, 1.0], [0.0, 1.0]])
        );
        assert_eq!(
            turn_matrix(TurnType3d::U),
            Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]])
        );
        assert_eq!(
            turn_matrix(TurnType3d::AcrossDown),
            Mat2([[-I, ZERO], [ZERO, I]])
        );
        for t in TurnType3d::ALL {
            assert_eq!(turn_matrix(t).det(), ONE, "{t:?}");
        }
    }

    #[test]
    fn holonomy_examples() {
        let h = holonomy(&[(c(-1.0, 0.0), TurnType3d::U)]).unwrap();
        assert!(h.max_diff(&turn_matrix(TurnType3d::U)) < 1e-15);
        assert_eq!(
            trace_state_sum(&[(c(-1.0, 0.0), TurnType3d::U)]).unwrap(),
            ZERO
        );
        assert!(holonomy(&[]).is_err());
        assert!(holonomy(&[(ZERO, TurnType3d::Left)]).is_err());
    }

    #[test]
    fn u_turn_powers() {
        for z in [c(0.3, 0.7), c(-2.0, 0.5)] {
            let seq = vec![(z, TurnType3d::U); 4];
            let h = holonomy(&seq).unwrap();
            let s = trace_state_sum(&seq).unwrap();
            assert!((h.trace() - s).norm() < 1e-12);
        }
    }

    #[test]
    fn two_dimensional_identity_shears() {
        let seq = [
            (1.0, TurnType2d::Left),
            (1.0, TurnType2d::U),
            (1.0, TurnType2d::Right),
        ];
        let h = holonomy_2d(&seq).unwrap();
        let m = turn_matrix_2d(TurnType2d::Left)
            .mul(&turn_matrix_2d(TurnType2d::U))
            .mul(&turn_matrix_2d(TurnType2d::Right));
        assert!(h.max_diff(&m) < 1e-15);
        assert!(holonomy_2d(&[(-1.0, TurnType2d::Left)]).is_err());
    }

    #[test]
    fn shape_identities() {
        let s = Shape::new(c(2.0, 0.0)).unwrap();
        assert!((s.z * s.zp() * s.zpp() + 1.0).norm() < 1e-12);
        assert!((1.0 / s.zpp() + s.z - 1.0).norm() < 1e-12);
        assert!((1.0 / s.z + s.zp() - 1.0).norm() < 1e-12);
        assert!((1.0 / s.zp() + s.zpp() - 1.0).norm() < 1e-12);
        assert!(Shape::new(ONE).is_err());
    }
}
