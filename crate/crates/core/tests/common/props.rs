//! Strategies and invariant checks shared by the property suites and the acceptance gate.

use proptest::prelude::*;
use skeintrace::{CommutationForm, GaussianHalfLaurent, GaussianInt, TorusElement};

pub const RANK: usize = 4;

pub fn scalar() -> impl Strategy<Value = GaussianHalfLaurent> {
    prop::collection::vec((-6i64..=6, -5i64..=5, -5i64..=5), 0..4).prop_map(|terms| {
        let mut acc = GaussianHalfLaurent::zero();
        for (half, re, im) in terms {
            acc += &GaussianHalfLaurent::monomial(GaussianInt::new(re, im), half);
        }
        acc
    })
}

pub fn form() -> impl Strategy<Value = CommutationForm> {
    prop::collection::vec(-2i32..=2, RANK * (RANK - 1) / 2).prop_map(|vals| {
        let mut f = CommutationForm::zero(RANK);
        let mut it = vals.into_iter();
        for i in 0..RANK {
            for j in i + 1..RANK {
                f.set(i, j, it.next().unwrap());
            }
        }
        f
    })
}

pub fn element() -> impl Strategy<Value = TorusElement> {
    prop::collection::vec((prop::collection::vec(-2i32..=2, RANK), scalar()), 0..4).prop_map(
        |terms| {
            let mut el = TorusElement::zero(RANK);
            for (u, c) in terms {
                el.add_term(u, &c);
            }
            el
        },
    )
}

pub fn word() -> impl Strategy<Value = Vec<(usize, i32)>> {
    prop::collection::vec((0..RANK, -3i32..=3), 0..7)
}

/// Commutative ring axioms plus a text round trip.
pub fn scalar_axioms(
    a: &GaussianHalfLaurent,
    b: &GaussianHalfLaurent,
    c: &GaussianHalfLaurent,
) -> Result<(), String> {
    let zero = GaussianHalfLaurent::zero();
    let one = GaussianHalfLaurent::one();
    let checks = [
        ("add commutes", (a + b) == (b + a)),
        ("add associates", (&(a + b) + c) == (a + &(b + c))),
        ("mul commutes", (a * b) == (b * a)),
        ("mul associates", (&(a * b) * c) == (a * &(b * c))),
        ("distributes", (a * &(b + c)) == (&(a * b) + &(a * c))),
        ("zero", &(a + &zero) == a),
        ("one", &(a * &one) == a),
        ("negation", (a + &(-a)).is_zero()),
        (
            "round trip",
            a.to_string().parse::<GaussianHalfLaurent>().ok().as_ref() == Some(a),
        ),
    ];
    match checks.iter().find(|(_, ok)| !ok) {
        Some((name, _)) => Err(format!("{name} fails for a={a}, b={b}, c={c}")),
        None => Ok(()),
    }
}

/// Associativity, distributivity and the generator commutation relations.
pub fn torus_axioms(
    f: &CommutationForm,
    a: &TorusElement,
    b: &TorusElement,
    c: &TorusElement,
) -> Result<(), String> {
    let m = |x: &TorusElement, y: &TorusElement| f.mul(x, y).map_err(|e| e.to_string());
    if m(&m(a, b)?, c)? != m(a, &m(b, c)?)? {
        return Err(format!("associativity fails for {a}, {b}, {c}"));
    }
    if m(a, &(b + c))? != &m(a, b)? + &m(a, c)? || m(&(a + b), c)? != &m(a, c)? + &m(b, c)? {
        return Err(format!("distributivity fails for {a}, {b}, {c}"));
    }
    for i in 0..RANK {
        for j in 0..RANK {
            let (xi, xj) = (
                TorusElement::generator(RANK, i),
                TorusElement::generator(RANK, j),
            );
            let q = GaussianHalfLaurent::a_pow(2 * f.get(i, j) as i64);
            if m(&xi, &xj)? != m(&xj, &xi)?.scale(&q) {
                return Err(format!("x{i} x{j} relation fails"));
            }
        }
    }
    Ok(())
}

/// The Weyl-ordered product of a word depends only on its total exponent.
pub fn weyl_invariance(
    f: &CommutationForm,
    w: &[(usize, i32)],
    perm_seed: u64,
) -> Result<(), String> {
    let mut shuffled = w.to_vec();
    let mut s = perm_seed;
    for k in (1..shuffled.len()).rev() {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        shuffled.swap(k, (s >> 33) as usize % (k + 1));
    }
    let mut u = vec![0; RANK];
    for &(g, p) in w {
        u[g] += p;
    }
    let direct = f.weyl(&u);
    if f.weyl_word(w) != direct || f.weyl_word(&shuffled) != direct {
        return Err(format!("weyl ordering depends on order for {w:?}"));
    }
    Ok(())
}
