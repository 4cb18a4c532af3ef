mod common;

use common::*;
use skeintrace::gluing_algebra::{Qgm, RelationKind};
use skeintrace::triangulation::{BareEdge, ShapeLabel};
use skeintrace::{GaussianHalfLaurent, TorusElement};

#[test]
fn figure_eight_structure() {
    let alg = fig8();
    assert_eq!(alg.tri.num_tets(), 2);
    assert_eq!(alg.tri.edge_classes.len(), 2);
    assert_eq!(alg.tri.faces.len(), 4);
    assert_eq!(alg.n(), 24);
    for g in 0..alg.n() {
        assert_eq!(alg.partner(alg.partner(g)), g);
        if let Some(p) = alg.pair(g) {
            assert_eq!(alg.pair(p), Some(g));
            assert_eq!(alg.pair(alg.next_in_half(g)), Some(alg.prev_in_half(p)));
        }
    }
}

#[test]
fn relations_vanish_classically() {
    let alg = fig8();
    let shapes = fig8_shapes(&alg);
    let report = alg.classical_check(&shapes).unwrap();
    assert_eq!(report.edge.len(), 2);
    assert_eq!(report.triangle.len(), 8);
    assert_eq!(report.three_term.len(), 24);
    assert!(report.max_residual() < 1e-9, "{report:?}");
}

#[test]
fn triangle_relations_are_central() {
    let alg = fig8();
    let fam = alg.relations().unwrap();
    assert_eq!(fam.v_minus.len(), 2);
    assert_eq!(fam.v_plus.len(), 16);
    let hats: Vec<TorusElement> = (0..2)
        .flat_map(BareEdge::all)
        .map(|e| alg.hat(&e, 1))
        .collect();
    for r in fam
        .v_plus
        .iter()
        .filter(|r| r.kind == RelationKind::Triangle)
    {
        assert!(r.central);
        for x in &hats {
            assert_eq!(
                alg.form.mul(&r.element, x).unwrap(),
                alg.form.mul(x, &r.element).unwrap()
            );
        }
    }
    for r in &fam.v_minus {
        assert!(!r.central);
    }
}

#[test]
fn known_relations() {
    let alg = fig8();
    let cases = [
        ("edge:0", "-A^2 + [z'_EW z''_SE z''_NW y'_EW y''_SW y''_NE]"),
        ("edge:1", "-A^2 + [z_SW z_NE z'_NS y_SE y_NW y'_NS]"),
        ("3t:E:z'", "z'_NS^-2 + 1 + z''_NW^2"),
        ("tri:E:z", "A + [z_SW z''_NW z'_NS]"),
        ("tri:W:y", "A + [y_SE y''_NE y'_NS]"),
        ("tri:N:y", "A + [y'_EW y''_SW y_SE]"),
        ("tri:N:z", "A + [z'_EW z_SW z''_SE]"),
    ];
    for (id, want) in cases {
        assert_eq!(
            alg.relation(id).unwrap().element,
            alg.parse(want).unwrap(),
            "{id}"
        );
    }
}

#[test]
fn opposite_edges_have_equal_squares() {
    let alg = fig8();
    for tet in 0..2 {
        for e in BareEdge::all(tet) {
            let start = alg.hat(&e, 2);
            let target: Vec<i32> = start.terms().next().unwrap().0.clone();
            let (out, certs, _) = alg.square_opposite(&start, &e, &target).unwrap();
            assert_eq!(out, alg.hat(&e.opposite(), 2), "{}", alg.tri.hat_name(&e));
            assert_eq!(certs.len(), 4);
            for c in &certs {
                c.verify(&alg.form).unwrap();
            }
        }
    }
}

#[test]
fn qgm_commutation() {
    let alg = fig8();
    let q = |t, l| TorusElement::generator(6, Qgm::index(t, l));
    let a4 = GaussianHalfLaurent::a_pow(8);
    for t in 0..2 {
        for l in ShapeLabel::ALL {
            let (x, y) = (q(t, l), q(t, l.next()));
            let lhs = alg.qgm.form.mul(&x, &y).unwrap();
            let rhs = alg.qgm.form.mul(&y, &x).unwrap().scale(&a4);
            assert_eq!(lhs, rhs);
            for m in ShapeLabel::ALL {
                assert!(alg.qgm.form.commutes(&x, &q(1 - t, m)).unwrap());
            }
            // ι respects the commutation
            let (ix, iy) = (alg.iota(&x).unwrap(), alg.iota(&y).unwrap());
            assert_eq!(
                alg.form.mul(&ix, &iy).unwrap(),
                alg.form.mul(&iy, &ix).unwrap().scale(&a4)
            );
        }
    }
}

#[test]
fn qgm_plus_relations_are_certified() {
    let alg = fig8();
    let fam = alg.relations().unwrap();
    assert_eq!(fam.w_plus.len(), 4);
    for r in &fam.w_plus {
        let (certs, out) = alg.certify_qgm_plus(&r.id).unwrap();
        assert!(out.is_zero(), "{}: {}", r.id, alg.render(&out));
        assert_eq!(certs[0].before, r.element);
    }
    assert!(alg.certify_qgm_plus("edge:0").is_err());
}

#[test]
fn iota_round_trip() {
    let alg = fig8();
    let el = alg.qgm.parse("2 + Y''·Z^-1 + Y''^-1·Z").unwrap();
    let img = alg.iota(&el).unwrap();
    assert!(alg.check_even(&img));
    assert_eq!(alg.iota_inverse(&img), Some(el));
}
