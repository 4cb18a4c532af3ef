#![allow(dead_code)]

use num_complex::Complex64;
use skeintrace::classical::{
    holonomy, holonomy_2d, solve_gluing, trace_state_sum, trace_state_sum_2d, Shape, TurnType2d,
    TurnType3d,
};
use skeintrace::gluing_algebra::GluingAlgebra;
use skeintrace::quantum_trace::{Turn, TurnSequence};
use skeintrace::triangulation::Triangulation;

pub fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fig8() -> GluingAlgebra {
    GluingAlgebra::build(&Triangulation::load(data("fig8.json")).unwrap())
}

pub fn fig8_shapes(alg: &GluingAlgebra) -> Vec<Shape> {
    solve_gluing(&alg.tri, &[Complex64::new(0.0, 1.0); 2]).unwrap()
}

/// Exit generator of a turn entered through `c`.
pub fn exit_of(alg: &GluingAlgebra, c: usize, t: TurnType3d) -> Option<usize> {
    match t {
        TurnType3d::Left => Some(alg.next_in_half(c)),
        TurnType3d::Right => Some(alg.prev_in_half(c)),
        TurnType3d::U => Some(c),
        TurnType3d::AcrossDown => alg.pair(c),
        TurnType3d::AcrossLeft => alg.pair(alg.next_in_half(c)),
        TurnType3d::AcrossRight => alg.pair(alg.prev_in_half(c)),
    }
}

/// Turn sequence from a closed walk of entry generators.
pub fn sequence(alg: &GluingAlgebra, walk: &[(usize, TurnType3d)]) -> TurnSequence {
    TurnSequence {
        turns: walk
            .iter()
            .map(|&(c, t)| Turn {
                edge_cone: alg.tri.hat_name(&alg.gens[c].edge),
                face: alg.tri.faces[alg.gens[c].fs].name.clone(),
                turn: t,
                route: Default::default(),
            })
            .collect(),
        cable: 1,
    }
}

/// Random closed walk of at most `max_len` turns, if one is found within `tries`.
pub fn random_closed_walk(
    alg: &GluingAlgebra,
    rng: &mut impl rand::Rng,
    max_len: usize,
    allowed: &[TurnType3d],
) -> Option<Vec<(usize, TurnType3d)>> {
    for _ in 0..200 {
        let start = rng.gen_range(0..alg.n());
        let mut c = start;
        let mut walk = Vec::new();
        for _ in 0..max_len {
            let t = allowed[rng.gen_range(0..allowed.len())];
            let d = exit_of(alg, c, t)?;
            walk.push((c, t));
            c = alg.partner(d);
            if c == start {
                return Some(walk);
            }
        }
    }
    None
}

/// Random 3d turn sequence of length 1..=max_len with shapes in the upper half plane.
pub fn random_sequence_3d(
    rng: &mut impl rand::Rng,
    max_len: usize,
) -> Vec<(Complex64, TurnType3d)> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
            (z, TurnType3d::ALL[rng.gen_range(0..6)])
        })
        .collect()
}

pub fn random_sequence_2d(rng: &mut impl rand::Rng, max_len: usize) -> Vec<(f64, TurnType2d)> {
    let len = rng.gen_range(1..=max_len);
    let types = [TurnType2d::Left, TurnType2d::Right, TurnType2d::U];
    (0..len)
        .map(|_| (rng.gen_range(0.1..4.0), types[rng.gen_range(0..3)]))
        .collect()
}

/// Distance between the state sum and the nearer of ±trace(holonomy), relative to its size.
pub fn oracle_gap_3d(seq: &[(Complex64, TurnType3d)]) -> f64 {
    let ss = trace_state_sum(seq).unwrap();
    let tr = holonomy(seq).unwrap().trace();
    (ss - tr).norm().min((ss + tr).norm()) / (1.0 + tr.norm())
}

pub fn oracle_gap_2d(seq: &[(f64, TurnType2d)]) -> f64 {
    let ss = trace_state_sum_2d(seq).unwrap();
    let tr = holonomy_2d(seq).unwrap().trace();
    (ss - tr).norm().min((ss + tr).norm()) / (1.0 + tr.norm())
}

pub mod props;
