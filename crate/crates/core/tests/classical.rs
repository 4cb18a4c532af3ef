mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skeintrace::classical::*;
use skeintrace::triangulation::Triangulation;

#[test]
fn figure_eight_shapes() {
    let alg = fig8();
    let shapes = fig8_shapes(&alg);
    let want = Complex64::from_polar(1.0, PI / 3.0);
    for s in &shapes {
        assert!((s.z - want).norm() < 1e-10, "{}", s.z);
    }
    for r in edge_residuals(&alg.tri, &shapes) {
        assert!(r.norm() < 1e-10);
    }
}

#[test]
fn solver_converges_from_rough_guesses() {
    let tri = Triangulation::load(data("fig8.json")).unwrap();
    for guess in [
        [Complex64::new(0.3, 0.6), Complex64::new(0.7, 1.1)],
        [Complex64::new(-0.5, 2.0); 2],
    ] {
        let shapes = solve_gluing(&tri, &guess).unwrap();
        assert!(edge_residuals(&tri, &shapes)
            .iter()
            .all(|r| r.norm() < 1e-10));
        assert!(shapes.iter().all(|s| s.z.im > 0.0));
    }
}

#[test]
fn solver_rejects_bad_guesses() {
    let tri = Triangulation::load(data("fig8.json")).unwrap();
    assert!(solve_gluing(&tri, &[Complex64::new(0.5, -1.0); 2]).is_err());
    assert!(solve_gluing(&tri, &[Complex64::new(0.5, 1.0)]).is_err());
}

#[test]
fn state_sum_matches_holonomy_3d() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let seq = random_sequence_3d(&mut rng, 8);
        assert!(oracle_gap_3d(&seq) < 1e-9, "{seq:?}");
    }
}

#[test]
fn state_sum_matches_holonomy_2d() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let seq = random_sequence_2d(&mut rng, 8);
        assert!(oracle_gap_2d(&seq) < 1e-9, "{seq:?}");
    }
}

#[test]
fn holonomy_is_unimodular_up_to_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let seq = random_sequence_3d(&mut rng, 6);
        let d = holonomy(&seq).unwrap().det();
        assert!((d - 1.0).norm() < 1e-9 || (d + 1.0).norm() < 1e-9, "{d}");
    }
}

#[test]
fn empty_sequences_are_rejected() {
    assert!(holonomy(&[]).is_err());
    assert!(trace_state_sum(&[]).is_err());
    assert!(trace_state_sum_2d(&[(-1.0, TurnType2d::Left)]).is_err());
}
