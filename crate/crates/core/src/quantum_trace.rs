//! Quantum trace of links presented through face suspensions.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{trace_state_sum, Shape, TurnType3d};
use crate::error::{Error, Result};
use crate::gluing_algebra::{GluingAlgebra, RewriteCertificate, Side};
use crate::qtorus::{Monomial, TorusElement};
use crate::scalar::{GaussianHalfLaurent, GaussianInt};

/// `sign · var`, or the literal `sign` when `var` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateExpr {
    pub var: Option<usize>,
    pub sign: i8,
}

impl StateExpr {
    pub fn var(v: usize, sign: i8) -> Self {
        StateExpr { var: Some(v), sign }
    }

    pub fn literal(sign: i8) -> Self {
        StateExpr { var: None, sign }
    }

    pub fn negate(self) -> Self {
        StateExpr {
            var: self.var,
            sign: -self.sign,
        }
    }

    pub fn resolve(&self, assignment: &[i8]) -> Result<i8> {
        match self.var {
            None => Ok(self.sign),
            Some(v) => assignment
                .get(v)
                .map(|s| s * self.sign)
                .ok_or_else(|| Error::Link(format!("unresolved state variable {v}"))),
        }
    }

    fn parse(src: &str, vars: &[String]) -> Result<Self> {
        let s = src.trim();
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (-1, r.trim()),
            None => (1, s.strip_prefix('+').unwrap_or(s).trim()),
        };
        if rest.is_empty() || rest == "1" {
            return Ok(StateExpr::literal(sign));
        }
        let v = vars
            .iter()
            .position(|n| n == rest)
            .ok_or_else(|| Error::Link(format!("unknown state variable {rest:?}")))?;
        Ok(StateExpr::var(v, sign))
    }

    fn render(&self, vars: &[String]) -> String {
        let sign = if self.sign < 0 { "-" } else { "" };
        match self.var {
            None => format!("{}1", if self.sign < 0 { "-" } else { "+" }),
            Some(v) => format!("{sign}{}", vars[v]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcKind {
    T,
    B,
}

/// A stated arc inside one face suspension: a T-arc joins two cones of one tetra-half,
/// a B-arc joins the two cones over one face edge in opposite halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryArc {
    pub kind: ArcKind,
    pub fs: usize,
    pub gens: [usize; 2],
    pub states: [StateExpr; 2],
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkPresentation {
    pub vars: Vec<String>,
    pub arcs: Vec<ElementaryArc>,
    /// Each entry contributes `(−A²)^{expr/2}`.
    pub sliding: Vec<StateExpr>,
    pub phase: GaussianHalfLaurent,
    /// Optional turn-sequence description of the same link.
    pub turns: Option<TurnSequence>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// The T-arc sits in the half the strand enters through.
    #[default]
    Entry,
    /// The B-arc comes first and the T-arc sits in the other half.
    Exit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    /// Edge cone crossed when entering the face suspension, e.g. "z_NE".
    pub edge_cone: String,
    /// Face suspension entered.
    pub face: String,
    pub turn: TurnType3d,
    #[serde(default)]
    pub route: Route,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnSequence {
    pub turns: Vec<Turn>,
    #[serde(default = "one")]
    pub cable: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize, Serialize)]
struct ArcFile {
    kind: ArcKind,
    fs: String,
    cones: [String; 2],
    states: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<i8>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum PrefactorFile {
    Sliding { sliding: String },
    Phase { phase: String },
}

#[derive(Debug, Deserialize, Serialize)]
struct LinkFile {
    states: Vec<String>,
    arcs: Vec<ArcFile>,
    #[serde(default)]
    prefactor: Vec<PrefactorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    turns: Option<Vec<Turn>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cable: Option<usize>,
}

/// Either level of link input.
#[derive(Clone, Debug)]
pub enum LinkInput {
    Arcs(LinkPresentation),
    Turns(TurnSequence),
}

impl LinkInput {
    pub fn from_json(alg: &GluingAlgebra, text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        if v.get("arcs").is_some() {
            Ok(LinkInput::Arcs(LinkPresentation::from_json(alg, text)?))
        } else {
            Ok(LinkInput::Turns(serde_json::from_value(v)?))
        }
    }

    pub fn load(alg: &GluingAlgebra, path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(alg, &std::fs::read_to_string(path)?)
    }

    pub fn presentation(&self, alg: &GluingAlgebra) -> Result<LinkPresentation> {
        match self {
            LinkInput::Arcs(lp) => Ok(lp.clone()),
            LinkInput::Turns(ts) => compile_turns(ts, alg),
        }
    }

    pub fn turns(&self) -> Option<&TurnSequence> {
        match self {
            LinkInput::Arcs(lp) => lp.turns.as_ref(),
            LinkInput::Turns(ts) => Some(ts),
        }
    }
}

impl LinkPresentation {
    pub fn empty() -> Self {
        LinkPresentation {
            vars: Vec::new(),
            arcs: Vec::new(),
            sliding: Vec::new(),
            phase: GaussianHalfLaurent::one(),
            turns: None,
        }
    }

    pub fn load(alg: &GluingAlgebra, path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(alg, &std::fs::read_to_string(path)?)
    }

    pub fn from_json(alg: &GluingAlgebra, text: &str) -> Result<Self> {
        let file: LinkFile = serde_json::from_str(text)?;
        let vars = file.states.clone();
        let mut arcs = Vec::new();
        for a in &file.arcs {
            let fs = alg
                .tri
                .face_by_name(&a.fs)
                .ok_or_else(|| Error::Link(format!("unknown face suspension {:?}", a.fs)))?;
            let g = |name: &String| {
                alg.gen_by_name(name)
                    .ok_or_else(|| Error::Link(format!("unknown cone {name:?}")))
            };
            let gens = [g(&a.cones[0])?, g(&a.cones[1])?];
            let states = [
                StateExpr::parse(&a.states[0], &vars)?,
                StateExpr::parse(&a.states[1], &vars)?,
            ];
            let sign = a.sign.unwrap_or(1);
            if sign != 1 && sign != -1 {
                return Err(Error::Link(format!("arc sign {sign} must be ±1")));
            }
            arcs.push(ElementaryArc {
                kind: a.kind,
                fs,
                gens,
                states,
                sign,
            });
        }
        let mut sliding = Vec::new();
        let mut phase = GaussianHalfLaurent::one();
        for p in &file.prefactor {
            match p {
                PrefactorFile::Sliding { sliding: s } => sliding.push(StateExpr::parse(s, &vars)?),
                PrefactorFile::Phase { phase: s } => {
                    phase = &phase * &GaussianHalfLaurent::parse(s)?
                }
            }
        }
        let turns = file.turns.map(|turns| TurnSequence {
            turns,
            cable: file.cable.unwrap_or(1),
        });
        let lp = LinkPresentation {
            vars,
            arcs,
            sliding,
            phase,
            turns,
        };
        lp.validate(alg)?;
        Ok(lp)
    }

    pub fn to_json(&self, alg: &GluingAlgebra) -> String {
        let file = LinkFile {
            states: self.vars.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcFile {
                    kind: a.kind,
                    fs: alg.tri.faces[a.fs].name.clone(),
                    cones: a.gens.map(|g| alg.names[g].clone()),
                    states: a.states.map(|s| s.render(&self.vars)),
                    sign: (a.sign != 1).then_some(a.sign),
                })
                .collect(),
            prefactor: self
                .sliding
                .iter()
                .map(|s| PrefactorFile::Sliding {
                    sliding: s.render(&self.vars),
                })
                .chain((!self.phase.is_one()).then(|| PrefactorFile::Phase {
                    phase: self.phase.to_string(),
                }))
                .collect(),
            turns: self.turns.as_ref().map(|t| t.turns.clone()),
            cable: self.turns.as_ref().map(|t| t.cable),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn validate(&self, alg: &GluingAlgebra) -> Result<()> {
        let mut faces_of_var: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, a) in self.arcs.iter().enumerate() {
            for g in a.gens {
                if alg.gens[g].fs != a.fs {
                    return Err(Error::Link(format!(
                        "arc {i}: cone {} is not in face suspension {}",
                        alg.names[g], alg.tri.faces[a.fs].name
                    )));
                }
            }
            let [g1, g2] = a.gens;
            let (h1, h2) = (&alg.gens[g1], &alg.gens[g2]);
            match a.kind {
                ArcKind::T => {
                    if g1 == g2 || h1.tet != h2.tet || h1.face != h2.face {
                        return Err(Error::Link(format!(
                            "arc {i}: T-arc needs two cones of one tetra-half"
                        )));
                    }
                }
                ArcKind::B => {
                    if alg.pair(g1) != Some(g2) {
                        return Err(Error::Link(format!(
                            "arc {i}: B-arc cones are not paired across the face"
                        )));
                    }
                    if a.states[0] != a.states[1] {
                        return Err(Error::Link(format!("arc {i}: B-arc states must agree")));
                    }
                }
            }
            for s in a.states {
                if let Some(v) = s.var {
                    if v >= self.vars.len() {
                        return Err(Error::Link(format!("arc {i}: unresolved state {v}")));
                    }
                    let fs = faces_of_var.entry(v).or_default();
                    if !fs.contains(&a.fs) {
                        fs.push(a.fs);
                    }
                }
            }
        }
        for s in &self.sliding {
            if let Some(v) = s.var {
                if v >= self.vars.len() {
                    return Err(Error::Link(format!("prefactor uses unresolved state {v}")));
                }
            }
        }
        if let Some(v) = (0..self.vars.len()).find(|v| !faces_of_var.contains_key(v)) {
            return Err(Error::Link(format!(
                "state {} is not used by any arc",
                self.vars[v]
            )));
        }
        Ok(())
    }
}

/// `A^{−(μ+ν)/2}[x_1^μ x_2^ν]`, or `None` for a bad arc: one with opposite states whose
/// −-stated cone `g` and +-stated cone `h` satisfy `<g,h> = +1`.
pub fn ev_t(alg: &GluingAlgebra, gens: [usize; 2], mu: i8, nu: i8) -> Option<Monomial> {
    if mu != nu {
        let (minus, plus) = if mu < 0 {
            (gens[0], gens[1])
        } else {
            (gens[1], gens[0])
        };
        if alg.form.get(minus, plus) == 1 {
            return None;
        }
    }
    let mut u = vec![0; alg.n()];
    u[gens[0]] += mu as i32;
    u[gens[1]] += nu as i32;
    let w = alg.form.weyl(&u).as_monomial()?;
    Some(Monomial::new(
        w.coeff.shift(-(mu as i64 + nu as i64)),
        w.exps,
    ))
}

/// `(−1)^{−μ/2} x_1^μ x_2^μ` with `(−1)^{1/2} = i`.
pub fn ev_b(alg: &GluingAlgebra, gens: [usize; 2], mu: i8, nu: i8) -> Result<Monomial> {
    if mu != nu {
        return Err(Error::Link("B-arc with mismatched states".into()));
    }
    let mut u = vec![0; alg.n()];
    u[gens[0]] += mu as i32;
    u[gens[1]] += mu as i32;
    Ok(Monomial::new(
        GaussianHalfLaurent::monomial(GaussianInt::i_pow(-(mu as i64)), 0),
        u,
    ))
}

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: TorusElement,
    /// Assignments with a nonzero contribution, with that contribution.
    pub states: Vec<(Vec<i8>, Monomial)>,
}

impl EvalResult {
    pub fn nonzero_states(&self) -> usize {
        self.states.len()
    }
}

fn eval_state(
    alg: &GluingAlgebra,
    lp: &LinkPresentation,
    order: &[usize],
    assignment: &[i8],
) -> Result<Option<Monomial>> {
    let mut phase_m = 0i64;
    for s in &lp.sliding {
        phase_m += s.resolve(assignment)? as i64;
    }
    // (−A²)^{m/2} = (iA)^m
    let mut acc = Monomial::new(
        &lp.phase * &GaussianHalfLaurent::from_phase(phase_m, 0),
        vec![0; alg.n()],
    );
    for &i in order {
        let a = &lp.arcs[i];
        let mu = a.states[0].resolve(assignment)?;
        let nu = a.states[1].resolve(assignment)?;
        let m = match a.kind {
            ArcKind::T => match ev_t(alg, a.gens, mu, nu) {
                Some(m) => m,
                None => return Ok(None),
            },
            ArcKind::B => ev_b(alg, a.gens, mu, nu)?,
        };
        acc = alg.form.mul_monomial(&acc, &m)?;
        if a.sign < 0 {
            acc.coeff = -&acc.coeff;
        }
    }
    Ok(Some(acc))
}

/// Sum over all state assignments of the prefactor times the ordered product of arc values.
/// Arcs are multiplied face suspension by face suspension, in listed order within each.
pub fn evaluate(alg: &GluingAlgebra, lp: &LinkPresentation) -> Result<EvalResult> {
    lp.validate(alg)?;
    let nv = lp.vars.len();
    if nv > 30 {
        return Err(Error::Link("too many state variables".into()));
    }
    let mut face_order: Vec<usize> = Vec::new();
    for a in &lp.arcs {
        if !face_order.contains(&a.fs) {
            face_order.push(a.fs);
        }
    }
    let order: Vec<usize> = face_order
        .iter()
        .flat_map(|f| (0..lp.arcs.len()).filter(move |&i| lp.arcs[i].fs == *f))
        .collect();
    let assignment = |bits: u64| -> Vec<i8> {
        (0..nv)
            .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
            .collect()
    };
    let results: Vec<(Vec<i8>, Monomial)> = (0..1u64 << nv)
        .into_par_iter()
        .map(|bits| {
            let s = assignment(bits);
            eval_state(alg, lp, &order, &s).map(|m| m.map(|m| (s, m)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .filter(|(_, m)| !m.coeff.is_zero())
        .collect();
    let mut value = TorusElement::zero(alg.n());
    for (_, m) in &results {
        value.add_term(m.exps.clone(), &m.coeff);
    }
    Ok(EvalResult {
        value,
        states: results,
    })
}

/// Multiplies by `(−A³)^k`, the effect of `k` positive framing twists.
pub fn reframe(el: &TorusElement, k: i64) -> TorusElement {
    let unit =
        GaussianHalfLaurent::monomial(GaussianInt::new(if k % 2 == 0 { 1 } else { -1 }, 0), 6 * k);
    el.scale(&unit)
}

struct Crossing {
    /// Generator through which the strand enters the face suspension.
    entry: usize,
}

/// Resolves each turn's entry generator and checks that consecutive turns connect.
fn walk(ts: &TurnSequence, alg: &GluingAlgebra) -> Result<Vec<(Crossing, usize)>> {
    if ts.turns.is_empty() {
        return Err(Error::Turns("empty turn sequence".into()));
    }
    let mut out = Vec::new();
    for (i, t) in ts.turns.iter().enumerate() {
        let e = alg.tri.edge_by_hat_name(&t.edge_cone).ok_or_else(|| {
            Error::Turns(format!("turn {i}: unknown edge cone {:?}", t.edge_cone))
        })?;
        let f = alg
            .tri
            .face_by_name(&t.face)
            .ok_or_else(|| Error::Turns(format!("turn {i}: unknown face {:?}", t.face)))?;
        let candidates: Vec<usize> = alg
            .edge_gens(&e)
            .into_iter()
            .filter(|g| alg.gens[*g].fs == f)
            .collect();
        if candidates.len() != 1 {
            return Err(Error::Turns(format!(
                "turn {i}: edge cone {} does not bound face {} exactly once",
                t.edge_cone, t.face
            )));
        }
        let c = candidates[0];
        let exit = match t.turn {
            TurnType3d::Left => alg.next_in_half(c),
            TurnType3d::Right => alg.prev_in_half(c),
            TurnType3d::U => c,
            TurnType3d::AcrossDown => paired(alg, c, i)?,
            TurnType3d::AcrossLeft => paired(alg, alg.next_in_half(c), i)?,
            TurnType3d::AcrossRight => paired(alg, alg.prev_in_half(c), i)?,
        };
        out.push((Crossing { entry: c }, exit));
    }
    for i in 0..out.len() {
        let exit = out[i].1;
        let next = &out[(i + 1) % out.len()].0;
        if alg.partner(exit) != next.entry {
            return Err(Error::Turns(format!(
                "turn {i} exits through {} but turn {} enters through {}",
                alg.tri.hat_name(&alg.gens[exit].edge),
                (i + 1) % out.len(),
                alg.names[next.entry]
            )));
        }
    }
    Ok(out)
}

fn paired(alg: &GluingAlgebra, g: usize, i: usize) -> Result<usize> {
    alg.pair(g)
        .ok_or_else(|| Error::Turns(format!("turn {i}: across turn through a boundary face")))
}

/// Compiles a turn sequence to elementary arcs. The sequence is first rotated to its
/// lexicographically least starting point. Crossing `i` of copy `j` carries the state
/// `s{i}_{j}`; U-turns introduce an internal state `u{i}_{j}`. Within each face suspension
/// the T-arcs come first, then the B-arcs, each in turn order. Parallel copies are listed
/// in copy order, except that T-arcs in a half of a positively oriented tetrahedron are
/// listed in reverse copy order.
pub fn compile_turns(ts: &TurnSequence, alg: &GluingAlgebra) -> Result<LinkPresentation> {
    compile_turns_with(ts, alg, &|orientation, _, kind| {
        orientation > 0 && kind == ArcKind::T
    })
}

/// As [`compile_turns`], with the copy-reversal rule supplied by the caller.
pub fn compile_turns_with(
    ts: &TurnSequence,
    alg: &GluingAlgebra,
    reverse: &dyn Fn(i8, TurnType3d, ArcKind) -> bool,
) -> Result<LinkPresentation> {
    if ts.cable == 0 {
        return Err(Error::Turns("cable must be at least 1".into()));
    }
    let original = ts;
    let keys: Vec<(usize, usize, bool)> = walk(ts, alg)?
        .iter()
        .zip(&ts.turns)
        .map(|((cr, _), t)| {
            let kind = TurnType3d::ALL
                .iter()
                .position(|k| *k == t.turn)
                .unwrap_or(0);
            (cr.entry, kind, t.route == Route::Exit)
        })
        .collect();
    let start = (0..keys.len())
        .min_by(|&a, &b| {
            let ra = keys[a..].iter().chain(&keys[..a]);
            let rb = keys[b..].iter().chain(&keys[..b]);
            ra.cmp(rb)
        })
        .unwrap_or(0);
    let mut rotated = ts.clone();
    rotated.turns.rotate_left(start);
    let ts = &rotated;
    let walked = walk(ts, alg)?;
    let k = walked.len();
    let n = ts.cable;
    // union-find over crossing states, merged through ACROSS_DOWN turns
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (i, t) in ts.turns.iter().enumerate() {
        if t.turn == TurnType3d::AcrossDown {
            let a = find(&mut parent, i);
            let b = find(&mut parent, (i + 1) % k);
            if a != b {
                parent[b] = a;
            }
        }
    }
    let mut vars: Vec<String> = Vec::new();
    let mut var_of: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..k {
        let root = find(&mut parent, i);
        for j in 0..n {
            if let Some(&v) = var_of.get(&(root, j)) {
                var_of.insert((i, j), v);
            } else {
                var_of.insert((root, j), vars.len());
                var_of.insert((i, j), vars.len());
                vars.push(format!("s{root}_{j}"));
            }
        }
    }
    let mut t_arcs: Vec<ElementaryArc> = Vec::new();
    let mut b_arcs: Vec<ElementaryArc> = Vec::new();
    let mut sliding = Vec::new();
    for (i, ((cr, exit), turn)) in walked.iter().zip(&ts.turns).enumerate() {
        let c = cr.entry;
        let d = *exit;
        let fs = alg.gens[c].fs;
        let copies: Vec<usize> = (0..n).collect();
        let ordered = |kind: ArcKind, half: usize| -> Vec<usize> {
            if reverse(alg.tri.orientation[alg.gens[half].tet], turn.turn, kind) {
                copies.iter().rev().copied().collect()
            } else {
                copies.clone()
            }
        };
        let s_in = |j: usize| StateExpr::var(var_of[&(i, j)], 1);
        let s_out = |j: usize| StateExpr::var(var_of[&((i + 1) % k, j)], 1);
        let t_arc = |g1, s1, g2, s2| ElementaryArc {
            kind: ArcKind::T,
            fs,
            gens: [g1, g2],
            states: [s1, s2],
            sign: 1,
        };
        let b_arc = |g1, g2, s| ElementaryArc {
            kind: ArcKind::B,
            fs,
            gens: [g1, g2],
            states: [s, s],
            sign: 1,
        };
        match turn.turn {
            TurnType3d::Left | TurnType3d::Right => {
                for j in ordered(ArcKind::T, c) {
                    t_arcs.push(t_arc(c, s_in(j), d, s_out(j)));
                }
            }
            TurnType3d::U => {
                let nx = alg.next_in_half(c);
                for j in ordered(ArcKind::T, c) {
                    let u = StateExpr::var(vars.len(), 1);
                    vars.push(format!("u{i}_{j}"));
                    t_arcs.push(t_arc(c, s_in(j), nx, u.negate()));
                    t_arcs.push(t_arc(nx, u, c, s_out(j)));
                    sliding.push(u.negate());
                }
            }
            TurnType3d::AcrossDown => {
                for j in ordered(ArcKind::B, c) {
                    b_arcs.push(b_arc(c, d, s_in(j)));
                }
            }
            TurnType3d::AcrossLeft | TurnType3d::AcrossRight => {
                let left = turn.turn == TurnType3d::AcrossLeft;
                match turn.route {
                    Route::Entry => {
                        let p = if left {
                            alg.next_in_half(c)
                        } else {
                            alg.prev_in_half(c)
                        };
                        for j in ordered(ArcKind::T, c) {
                            t_arcs.push(t_arc(c, s_in(j), p, s_out(j).negate()));
                        }
                        for j in ordered(ArcKind::B, p) {
                            b_arcs.push(b_arc(p, d, s_out(j)));
                            sliding.push(s_out(j).negate());
                        }
                    }
                    Route::Exit => {
                        let q = paired(alg, c, i)?;
                        for j in ordered(ArcKind::T, q) {
                            t_arcs.push(t_arc(q, s_in(j).negate(), d, s_out(j)));
                        }
                        for j in ordered(ArcKind::B, c) {
                            b_arcs.push(b_arc(c, q, s_in(j)));
                            sliding.push(s_in(j).negate());
                        }
                    }
                }
            }
        }
    }
    // T-arcs before B-arcs within each face suspension; evaluate groups by face
    let mut arcs = t_arcs;
    arcs.extend(b_arcs);
    arcs.sort_by_key(|a| (a.fs, a.kind == ArcKind::B));
    let lp = LinkPresentation {
        vars,
        arcs,
        sliding,
        phase: GaussianHalfLaurent::one(),
        turns: Some(original.clone()),
    };
    lp.validate(alg)?;
    Ok(lp)
}

/// Classical turn sequence `(Z_i, t_i)` of each copy at the given shapes.
pub fn classical_sequence(
    ts: &TurnSequence,
    alg: &GluingAlgebra,
    shapes: &[Shape],
) -> Result<Vec<(Complex64, TurnType3d)>> {
    walk(ts, alg)?;
    ts.turns
        .iter()
        .map(|t| {
            let e = alg
                .tri
                .edge_by_hat_name(&t.edge_cone)
                .expect("checked by walk");
            Ok((shapes[e.tet].param(alg.tri.label(&e)), t.turn))
        })
        .collect()
}

/// Specializes `A^{1/2} → 1` and `x̂_e → σ_e (−Z_e)^{1/2}`.
pub fn classical_shadow(
    alg: &GluingAlgebra,
    el: &TorusElement,
    shapes: &[Shape],
    signs: Option<&[i8]>,
) -> Result<Complex64> {
    for (u, _) in el.terms() {
        if alg.hat_decomposition(u).is_none() {
            return Err(Error::Domain(
                "element is not in the span of x̂-monomials".into(),
            ));
        }
    }
    let vals = alg.hat_assignment(shapes, signs);
    alg.form.specialize(el, &vals, Complex64::new(1.0, 0.0))
}

/// Classical trace of the link: the state sum of one copy raised to the cable count.
pub fn classical_trace(
    ts: &TurnSequence,
    alg: &GluingAlgebra,
    shapes: &[Shape],
) -> Result<Complex64> {
    let seq = classical_sequence(ts, alg, shapes)?;
    Ok(trace_state_sum(&seq)?.powu(ts.cable as u32))
}

/// Branch match found by [`shadow_branch_search`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchMatch {
    pub signs: Vec<i8>,
    pub shadow: Complex64,
    pub gap: f64,
}

/// Searches sign choices σ ∈ {±1}^{6n} in binary order (bit k set means σ_k = −1)
/// for a shadow equal to `±target` within `tol`.
pub fn shadow_branch_search(
    alg: &GluingAlgebra,
    el: &TorusElement,
    shapes: &[Shape],
    target: Complex64,
    tol: f64,
) -> Result<Option<BranchMatch>> {
    let nsigns = 6 * alg.tri.num_tets();
    if nsigns > 24 {
        return Err(Error::Precondition(
            "branch search limited to 4 tetrahedra".into(),
        ));
    }
    for bits in 0u32..(1 << nsigns) {
        let signs: Vec<i8> = (0..nsigns)
            .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let shadow = classical_shadow(alg, el, shapes, Some(&signs))?;
        let gap = (shadow - target).norm().min((shadow + target).norm());
        if gap < tol {
            return Ok(Some(BranchMatch { signs, shadow, gap }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScriptStep {
    /// Eliminate the target term using the pivot term of the relation.
    Reduce {
        relation: String,
        side: Side,
        target: String,
        #[serde(default = "unit_pivot")]
        pivot: String,
    },
    /// Multiply the target term by the relation's monomial (power 1) or its inverse (power −1).
    Multiply {
        relation: String,
        side: Side,
        target: String,
        power: i32,
    },
    Rewrite {
        relation: String,
        side: Side,
        cofactor: String,
    },
    /// Replace `x̂_e²` in the target term by `x̂_{opp(e)}²`.
    SquareOpposite { edge: String, target: String },
}

fn unit_pivot() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub steps: Vec<ScriptStep>,
    /// Expected result, in any name grammar understood by the algebra.
    #[serde(default)]
    pub expect: Option<String>,
}

impl Script {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Runs a rewrite script, verifying every certificate as it is produced.
pub fn reduce_with_script(
    alg: &GluingAlgebra,
    el: &TorusElement,
    steps: &[ScriptStep],
) -> Result<(TorusElement, Vec<RewriteCertificate>)> {
    let mut cur = el.clone();
    let mut certs = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        let produced: Vec<RewriteCertificate> = match step {
            ScriptStep::Reduce {
                relation,
                side,
                target,
                pivot,
            } => {
                let rel = alg.relation(relation)?;
                let t = alg.parse_exps(target)?;
                let p = alg.parse_exps(pivot)?;
                let (after, cert) = alg.reduce(&cur, &rel, *side, &t, &p)?;
                cur = after;
                vec![cert]
            }
            ScriptStep::Multiply {
                relation,
                side,
                target,
                power,
            } => {
                let rel = alg.relation(relation)?;
                let t = alg.parse_exps(target)?;
                let (after, cert, _) = alg.multiply_by_relation(&cur, &rel, *side, &t, *power)?;
                cur = after;
                vec![cert]
            }
            ScriptStep::Rewrite {
                relation,
                side,
                cofactor,
            } => {
                let rel = alg.relation(relation)?;
                let c = alg.parse(cofactor)?;
                let (after, cert) = alg.apply_rewrite(&cur, &rel, *side, &c)?;
                cur = after;
                vec![cert]
            }
            ScriptStep::SquareOpposite { edge, target } => {
                let e = alg
                    .tri
                    .edge_by_hat_name(edge)
                    .ok_or_else(|| Error::UnknownName(edge.clone()))?;
                let t = alg.parse_exps(target)?;
                let (after, cs, _) = alg.square_opposite(&cur, &e, &t)?;
                cur = after;
                cs
            }
        };
        for c in &produced {
            c.verify(&alg.form)
                .map_err(|e| Error::Certificate(format!("step {i}: {e}")))?;
        }
        certs.extend(produced);
    }
    Ok((cur, certs))
}
