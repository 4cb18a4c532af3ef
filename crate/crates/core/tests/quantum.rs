mod common;

use std::collections::BTreeMap;

use common::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skeintrace::classical::{trace_state_sum, TurnType3d};
use skeintrace::gluing_algebra::GluingAlgebra;
use skeintrace::quantum_trace::*;
use skeintrace::{GaussianHalfLaurent, GaussianInt, TorusElement};

fn load(alg: &GluingAlgebra, name: &str) -> LinkPresentation {
    LinkPresentation::load(alg, data(name)).unwrap()
}

fn arc_skeleton(lp: &LinkPresentation) -> BTreeMap<(usize, bool, [usize; 2]), usize> {
    let mut m = BTreeMap::new();
    for a in &lp.arcs {
        let mut g = a.gens;
        g.sort();
        *m.entry((a.fs, a.kind == ArcKind::B, g)).or_insert(0) += 1;
    }
    m
}

#[test]
fn km2_fixture() {
    let alg = fig8();
    let r = evaluate(&alg, &load(&alg, "km2.json")).unwrap();
    assert_eq!(r.nonzero_states(), 4);
    assert_eq!(r.value, alg.parse("2 + Y''·Z^-1 + Y''^-1·Z").unwrap());
    assert!(alg.check_even(&r.value));
}

#[test]
fn kb_fixture_and_script() {
    let alg = fig8();
    let r = evaluate(&alg, &load(&alg, "kb.json")).unwrap();
    assert_eq!(r.nonzero_states(), 3);
    let raw = alg
        .parse("A*z'_NS^-1 y'_NS + A*y'_NS^-1 z'_NS + A*z'_NS^-1 y'_NS^-1")
        .unwrap();
    assert_eq!(r.value, raw);

    let script = Script::load(data("kb_script.json")).unwrap();
    let (out, certs) = reduce_with_script(&alg, &r.value, &script.steps).unwrap();
    assert_eq!(out, alg.parse("A*(Z·Y''^-1 + Y)").unwrap());
    assert!(!certs.is_empty());
    for c in &certs {
        c.verify(&alg.form).unwrap();
    }
    assert!(alg.check_even(&out));
}

#[test]
fn kb2_fixture_and_script() {
    let alg = fig8();
    let r = evaluate(&alg, &load(&alg, "kb2.json")).unwrap();
    assert_eq!(r.nonzero_states(), 9);
    let raw = alg
        .parse(
            "A^4*z'_NS^-2 y'_NS^2 + A^4*z'_NS^2 y'_NS^-2 + z'_NS^-2 y'_NS^-2 \
             + (A^4+1)*y'_NS^-2 + (A^4+1)*z'_NS^-2 + 2",
        )
        .unwrap();
    assert_eq!(r.value, raw);

    let script = Script::load(data("kb2_script.json")).unwrap();
    let (out, certs) = reduce_with_script(&alg, &r.value, &script.steps).unwrap();
    assert_eq!(out, alg.parse("A^4*(Z·Y''^-1 + Y)^2 + 1 - A^4").unwrap());
    for c in &certs {
        c.verify(&alg.form).unwrap();
    }
    assert!(alg.check_even(&out));
}

#[test]
fn compiled_turns_match_fixtures() {
    let alg = fig8();
    for name in ["kb.json", "km2.json", "kb2.json"] {
        let lp = load(&alg, name);
        let compiled = compile_turns(lp.turns.as_ref().unwrap(), &alg).unwrap();
        assert_eq!(arc_skeleton(&compiled), arc_skeleton(&lp), "{name}");
        assert_eq!(compiled.sliding.len(), lp.sliding.len(), "{name}");
        let a = evaluate(&alg, &lp).unwrap();
        let b = evaluate(&alg, &compiled).unwrap();
        assert_eq!(a.value, b.value, "{name}");
        assert_eq!(a.nonzero_states(), b.nonzero_states(), "{name}");
    }
}

#[test]
fn level_two_files_compile() {
    let alg = fig8();
    let km = LinkInput::load(&alg, data("km_turns.json")).unwrap();
    let r = evaluate(&alg, &km.presentation(&alg).unwrap()).unwrap();
    assert_eq!(
        r.value,
        alg.parse("z_NE^-1 y''_NE + z_NE y''_NE^-1").unwrap()
    );
    assert!(!alg.check_even(&r.value));
    let kb = LinkInput::load(&alg, data("kb_turns.json")).unwrap();
    let r = evaluate(&alg, &kb.presentation(&alg).unwrap()).unwrap();
    assert_eq!(
        r.value,
        evaluate(&alg, &load(&alg, "kb.json")).unwrap().value
    );
}

#[test]
fn empty_presentation_is_one() {
    let alg = fig8();
    let r = evaluate(&alg, &LinkPresentation::empty()).unwrap();
    assert_eq!(r.value, TorusElement::one(alg.n()));
    assert_eq!(r.nonzero_states(), 1);
}

#[test]
fn elementary_arc_values() {
    let alg = fig8();
    let z = alg.gen_by_name("z_S").unwrap();
    let zp = alg.gen_by_name("z'_S").unwrap();
    let m = ev_t(&alg, [z, zp], 1, 1).unwrap();
    let mut u = vec![0; alg.n()];
    u[z] = 1;
    u[zp] = 1;
    let expect = alg.form.weyl(&u).scale(&GaussianHalfLaurent::a_pow(-2));
    assert_eq!(TorusElement::from(m), expect);
    // exactly one mixed assignment of a corner arc is bad
    let bad = [(1, -1), (-1, 1)]
        .iter()
        .filter(|(a, b)| ev_t(&alg, [z, zp], *a, *b).is_none())
        .count();
    assert_eq!(bad, 1);
    assert!(ev_t(&alg, [z, zp], -1, 1).is_none());
    let mixed = ev_t(&alg, [z, zp], 1, -1).unwrap();
    assert_eq!(mixed.coeff.terms().count(), 1);

    let y = alg.gen_by_name("y'_S").unwrap();
    let b = ev_b(&alg, [y, z], 1, 1).unwrap();
    assert_eq!(
        b.coeff,
        GaussianHalfLaurent::monomial(GaussianInt::new(0, -1), 0)
    );
    let b = ev_b(&alg, [y, z], -1, -1).unwrap();
    assert_eq!(b.coeff, GaussianHalfLaurent::i());
    assert!(ev_b(&alg, [y, z], 1, -1).is_err());
}

#[test]
fn invalid_presentations_are_rejected() {
    let alg = fig8();
    let bad_b = r#"{"states": ["e"], "arcs": [
        {"kind": "B", "fs": "S", "cones": ["y'_S", "z_S"], "states": ["e", "-e"]}]}"#;
    assert!(LinkPresentation::from_json(&alg, bad_b).is_err());
    let unpaired = r#"{"states": ["e"], "arcs": [
        {"kind": "B", "fs": "S", "cones": ["y_S", "z_S"], "states": ["e", "e"]}]}"#;
    assert!(LinkPresentation::from_json(&alg, unpaired).is_err());
    let wrong_face = r#"{"states": ["e"], "arcs": [
        {"kind": "T", "fs": "N", "cones": ["z_S", "z'_S"], "states": ["e", "e"]}]}"#;
    assert!(LinkPresentation::from_json(&alg, wrong_face).is_err());
    let unknown = r#"{"states": ["e"], "arcs": [
        {"kind": "T", "fs": "S", "cones": ["q_S", "z'_S"], "states": ["e", "e"]}]}"#;
    assert!(LinkPresentation::from_json(&alg, unknown).is_err());
    let unused = r#"{"states": ["e", "f"], "arcs": [
        {"kind": "T", "fs": "S", "cones": ["z_S", "z'_S"], "states": ["e", "e"]}]}"#;
    assert!(LinkPresentation::from_json(&alg, unused).is_err());
}

#[test]
fn inconsistent_turns_are_rejected() {
    let alg = fig8();
    let ts = TurnSequence {
        turns: vec![Turn {
            edge_cone: "y'_NS".into(),
            face: "S".into(),
            turn: TurnType3d::Left,
            route: Route::Entry,
        }],
        cable: 1,
    };
    assert!(matches!(
        compile_turns(&ts, &alg),
        Err(skeintrace::Error::Turns(_))
    ));
    let empty = TurnSequence {
        turns: vec![],
        cable: 1,
    };
    assert!(compile_turns(&empty, &alg).is_err());
}

#[test]
fn u_turn_compiles_to_arc_pair() {
    let alg = fig8();
    let c = alg.gen_by_name("z_S").unwrap();
    let ts = sequence(&alg, &[(c, TurnType3d::U), (alg.partner(c), TurnType3d::U)]);
    let lp = compile_turns(&ts, &alg).unwrap();
    let in_s: Vec<_> = lp.arcs.iter().filter(|a| a.fs == alg.gens[c].fs).collect();
    assert_eq!(in_s.len(), 2);
    assert!(in_s
        .iter()
        .all(|a| a.kind == ArcKind::T && a.gens.contains(&c)));
    assert_eq!(in_s[0].states[1].var, in_s[1].states[0].var);
    assert_eq!(in_s[0].states[1].sign, -in_s[1].states[0].sign);
    // two U-turns contribute the phase i²
    let shapes = fig8_shapes(&alg);
    let v = evaluate(&alg, &lp).unwrap().value;
    let shadow = classical_shadow(&alg, &v, &shapes, None).unwrap();
    let cl = trace_state_sum(&classical_sequence(&ts, &alg, &shapes).unwrap()).unwrap();
    assert!((shadow + cl).norm() < 1e-9);
}

fn phase(ts: &TurnSequence) -> Complex64 {
    let n = ts
        .turns
        .iter()
        .filter(|t| {
            matches!(
                t.turn,
                TurnType3d::AcrossLeft | TurnType3d::AcrossRight | TurnType3d::U
            )
        })
        .count();
    Complex64::new(0.0, 1.0).powu(n as u32)
}

#[test]
fn shadow_matches_classical_state_sum() {
    let alg = fig8();
    let shapes = fig8_shapes(&alg);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100 {
        let Some(walk) = random_closed_walk(&alg, &mut rng, 6, &TurnType3d::ALL) else {
            continue;
        };
        let ts = sequence(&alg, &walk);
        let lp = compile_turns(&ts, &alg).unwrap();
        let q = evaluate(&alg, &lp).unwrap();
        let shadow = classical_shadow(&alg, &q.value, &shapes, None).unwrap();
        let cl = trace_state_sum(&classical_sequence(&ts, &alg, &shapes).unwrap()).unwrap();
        assert!(
            (shadow - phase(&ts) * cl).norm() < 1e-9,
            "{walk:?}: {shadow} vs {cl}"
        );
        checked += 1;
    }
}

#[test]
fn rotation_and_renaming_invariance() {
    let alg = fig8();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 20 {
        let Some(walk) = random_closed_walk(&alg, &mut rng, 5, &TurnType3d::ALL) else {
            continue;
        };
        let ts = sequence(&alg, &walk);
        let base = evaluate(&alg, &compile_turns(&ts, &alg).unwrap())
            .unwrap()
            .value;
        let mut rotated = ts.clone();
        rotated.turns.rotate_left(1);
        let r = evaluate(&alg, &compile_turns(&rotated, &alg).unwrap())
            .unwrap()
            .value;
        assert_eq!(base, r, "{walk:?}");
        checked += 1;
    }
    let lp = load(&alg, "kb2.json");
    let mut renamed = lp.clone();
    renamed.vars.reverse();
    let k = lp.vars.len();
    let flip = |s: StateExpr| StateExpr {
        var: s.var.map(|v| k - 1 - v),
        sign: s.sign,
    };
    for a in renamed.arcs.iter_mut() {
        a.states = a.states.map(flip);
    }
    renamed.sliding = renamed.sliding.iter().map(|s| flip(*s)).collect();
    assert_eq!(
        evaluate(&alg, &lp).unwrap().value,
        evaluate(&alg, &renamed).unwrap().value
    );
}

#[test]
fn evaluation_is_independent_of_thread_count() {
    let alg = fig8();
    let lp = load(&alg, "kb2.json");
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| evaluate(&alg, &lp)).unwrap();
    let b = many.install(|| evaluate(&alg, &lp)).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.states, b.states);
}

#[test]
fn shadow_basics() {
    let alg = fig8();
    let shapes = fig8_shapes(&alg);
    let one = classical_shadow(&alg, &TorusElement::one(alg.n()), &shapes, None).unwrap();
    assert!((one - 1.0).norm() < 1e-12);
    let z = classical_shadow(&alg, &alg.parse("Z").unwrap(), &shapes, None).unwrap();
    assert!((z - shapes[0].z).norm() < 1e-12);
    let g = alg.gen_by_name("z_S").unwrap();
    assert!(classical_shadow(&alg, &TorusElement::generator(alg.n(), g), &shapes, None).is_err());
}

#[test]
fn reframing() {
    let alg = fig8();
    let one = TorusElement::one(alg.n());
    assert_eq!(reframe(&one, 0), one);
    assert_eq!(reframe(&reframe(&one, 1), -1), one);
    assert_eq!(reframe(&one, 1), alg.parse("-A^3").unwrap());
}

#[test]
fn empty_script_is_identity() {
    let alg = fig8();
    let v = evaluate(&alg, &load(&alg, "kb.json")).unwrap().value;
    let (out, certs) = reduce_with_script(&alg, &v, &[]).unwrap();
    assert_eq!(out, v);
    assert!(certs.is_empty());
}

#[test]
fn script_step_with_wrong_side_fails() {
    let alg = fig8();
    let v = evaluate(&alg, &load(&alg, "kb.json")).unwrap().value;
    let step = ScriptStep::Reduce {
        relation: "edge:0".into(),
        side: skeintrace::gluing_algebra::Side::Left,
        target: "z'_NS y'_NS^-1".into(),
        pivot: "1".into(),
    };
    assert!(reduce_with_script(&alg, &v, &[step]).is_err());
}
