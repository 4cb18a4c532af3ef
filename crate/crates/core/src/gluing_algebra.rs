//! The face-suspension quantum torus of a triangulation, square-root shape parameters,
//! the relation families and certified rewriting.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::Shape;
use crate::error::{Error, Result};
use crate::qtorus::{add_exps, render_exps, CommutationForm, Exps, Monomial, TorusElement};
use crate::scalar::GaussianHalfLaurent;
use crate::triangulation::{BareEdge, ShapeLabel, Triangulation, VertexCone};

/// Generator `x_{f,e}` of the face suspension `fs` over the edge cone `edge`,
/// living in the tetra-half `(tet, face)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub tet: usize,
    pub face: u8,
    pub fs: usize,
    pub edge: BareEdge,
    pub label: ShapeLabel,
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Edge,
    Triangle,
    ThreeTerm,
    QgmEdge,
    QgmTriangle,
    QgmThreeTerm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub id: String,
    pub kind: RelationKind,
    pub element: TorusElement,
    /// Commutes with the square-root shape parameters, so it may also act from the
    /// other side on cofactors it commutes with.
    pub central: bool,
}

impl Relation {
    /// Edge relations act from the right, vertex relations from the left.
    pub fn home_side(&self) -> Side {
        match self.kind {
            RelationKind::Edge | RelationKind::QgmEdge => Side::Right,
            _ => Side::Left,
        }
    }

    pub fn allows(&self, side: Side) -> bool {
        self.central || side == self.home_side()
    }
}

#[derive(Clone, Debug)]
pub struct RelationFamily {
    pub v_minus: Vec<Relation>,
    pub v_plus: Vec<Relation>,
    pub w_minus: Vec<Relation>,
    pub w_plus: Vec<Relation>,
}

/// One certified rewrite: `before − after` equals `relation·cofactor` (left)
/// or `cofactor·relation` (right).
#[derive(Clone, Debug, PartialEq)]
pub struct RewriteCertificate {
    pub before: TorusElement,
    pub after: TorusElement,
    pub relation_id: String,
    pub relation: TorusElement,
    pub side: Side,
    pub cofactor: TorusElement,
}

impl RewriteCertificate {
    pub fn verify(&self, form: &CommutationForm) -> Result<()> {
        let prod = match self.side {
            Side::Left => form.mul(&self.relation, &self.cofactor)?,
            Side::Right => form.mul(&self.cofactor, &self.relation)?,
        };
        if &self.before - &self.after == prod {
            Ok(())
        } else {
            Err(Error::Certificate(format!(
                "rewrite with {}",
                self.relation_id
            )))
        }
    }
}

/// Quantum torus of the quantized shape parameters Ẑ, Ẑ', Ẑ'' of every tetrahedron.
#[derive(Clone, Debug)]
pub struct Qgm {
    pub form: CommutationForm,
    pub names: Vec<String>,
    /// Bare edge whose square defines each generator.
    pub reps: Vec<BareEdge>,
}

impl Qgm {
    pub fn index(tet: usize, label: ShapeLabel) -> usize {
        3 * tet + label.index()
    }

    pub fn lookup(&self, name: &str) -> Option<TorusElement> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(TorusElement::generator(self.names.len(), i))
    }

    pub fn parse(&self, src: &str) -> Result<TorusElement> {
        self.form.parse(src, &|s| self.lookup(s))
    }

    pub fn render(&self, el: &TorusElement) -> String {
        render_dot(el, &self.names)
    }
}

/// Renders with factors joined by "·" and scalar coefficients separated by "*",
/// constant term first.
pub fn render_dot(el: &TorusElement, names: &[String]) -> String {
    if el.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    let mut terms: Vec<_> = el.terms().collect();
    terms.sort_by_key(|(e, _)| e.iter().any(|k| *k != 0));
    for (idx, (e, c)) in terms.into_iter().enumerate() {
        let mono = render_exps(e, names, "·");
        let (neg, mag) = c.split_sign();
        let body = if mono.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else if mag.needs_parens() {
            format!("({mag})*{mono}")
        } else {
            format!("{mag}*{mono}")
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

#[derive(Clone, Debug)]
pub struct GluingAlgebra {
    pub tri: Triangulation,
    pub gens: Vec<Generator>,
    pub form: CommutationForm,
    pub names: Vec<String>,
    pub qgm: Qgm,
    index: HashMap<(usize, u8, BareEdge), usize>,
}

impl GluingAlgebra {
    /// Generators are ordered by tetrahedron, local face, then label. Within a tetra-half
    /// `x_L x_{next(L)} = A x_{next(L)} x_L`; everything else commutes.
    pub fn build(tri: &Triangulation) -> Self {
        let mut gens = Vec::new();
        let mut index = HashMap::new();
        for tet in 0..tri.num_tets() {
            for face in 0..4u8 {
                for label in ShapeLabel::ALL {
                    let edge = tri.edge_in_face(tet, face, label);
                    index.insert((tet, face, edge), gens.len());
                    gens.push(Generator {
                        tet,
                        face,
                        fs: tri.face_suspension(tet, face),
                        edge,
                        label,
                        name: format!(
                            "{}_{}",
                            tri.letter_with_label(tet, label),
                            tri.vertex_names[face as usize]
                        ),
                    });
                }
            }
        }
        let n = gens.len();
        let mut form = CommutationForm::zero(n);
        for (i, g) in gens.iter().enumerate() {
            let j = index[&(
                g.tet,
                g.face,
                tri.edge_in_face(g.tet, g.face, g.label.next()),
            )];
            form.set(i, j, 1);
        }
        let names = gens.iter().map(|g| g.name.clone()).collect();

        let m = 3 * tri.num_tets();
        let mut qform = CommutationForm::zero(m);
        let mut qnames = Vec::with_capacity(m);
        let mut reps = Vec::with_capacity(m);
        for tet in 0..tri.num_tets() {
            for label in ShapeLabel::ALL {
                qform.set(Qgm::index(tet, label), Qgm::index(tet, label.next()), 4);
                qnames.push(tri.qgm_name(tet, label));
                reps.push(tri.edges_with_label(tet, label)[0]);
            }
        }
        GluingAlgebra {
            tri: tri.clone(),
            gens,
            form,
            names,
            qgm: Qgm {
                form: qform,
                names: qnames,
                reps,
            },
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_index(&self, tet: usize, face: u8, edge: BareEdge) -> usize {
        self.index[&(tet, face, edge)]
    }

    /// Generator of the half `(tet, face)` carrying `label`.
    pub fn gen_in_half(&self, tet: usize, face: u8, label: ShapeLabel) -> usize {
        self.gen_index(tet, face, self.tri.edge_in_face(tet, face, label))
    }

    pub fn gen_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The two generators `x_{f_i,e}`, `x_{f_j,e}` over an edge cone.
    pub fn edge_gens(&self, e: &BareEdge) -> [usize; 2] {
        let [c, d] = e.faces();
        [self.gen_index(e.tet, c, *e), self.gen_index(e.tet, d, *e)]
    }

    /// The generator over the same edge cone in the other face of its tetrahedron.
    pub fn partner(&self, g: usize) -> usize {
        let [a, b] = self.edge_gens(&self.gens[g].edge);
        if a == g {
            b
        } else {
            a
        }
    }

    pub fn next_in_half(&self, g: usize) -> usize {
        let x = &self.gens[g];
        self.gen_in_half(x.tet, x.face, x.label.next())
    }

    pub fn prev_in_half(&self, g: usize) -> usize {
        let x = &self.gens[g];
        self.gen_in_half(x.tet, x.face, x.label.prev())
    }

    /// The generator in the other half of the face suspension over the same face edge.
    pub fn pair(&self, g: usize) -> Option<usize> {
        let x = &self.gens[g];
        let t = &self.tri.tets[x.tet];
        let nb = t.neighbors[x.face as usize]?;
        let p = t.gluings[x.face as usize]?;
        let edge = BareEdge::new(nb, p[x.edge.a as usize], p[x.edge.b as usize]);
        Some(self.gen_index(nb, p[x.face as usize], edge))
    }

    pub fn hat_exps(&self, e: &BareEdge, k: i32) -> Exps {
        let mut u = vec![0; self.n()];
        for g in self.edge_gens(e) {
            u[g] = k;
        }
        u
    }

    /// `x̂_e^k`; the two factors commute so no phase appears.
    pub fn hat(&self, e: &BareEdge, k: i32) -> TorusElement {
        TorusElement::monomial(GaussianHalfLaurent::one(), self.hat_exps(e, k))
    }

    /// Resolves generator names ("z'_N"), square-root parameters ("z'_NS")
    /// and quantized shape parameters ("Z'", mapped through ι).
    pub fn lookup(&self, name: &str) -> Option<TorusElement> {
        if let Some(g) = self.gen_by_name(name) {
            return Some(TorusElement::generator(self.n(), g));
        }
        if let Some(e) = self.tri.edge_by_hat_name(name) {
            return Some(self.hat(&e, 1));
        }
        let q = self.qgm.names.iter().position(|n| n == name)?;
        Some(self.qgm_generator(q))
    }

    pub fn parse(&self, src: &str) -> Result<TorusElement> {
        self.form.parse(src, &|s| self.lookup(s))
    }

    /// Exponent vector of a monomial written in the textual grammar.
    pub fn parse_exps(&self, src: &str) -> Result<Exps> {
        let el = self.parse(src)?;
        el.as_monomial()
            .map(|m| m.exps)
            .ok_or_else(|| Error::Parse(format!("{src:?} is not a monomial")))
    }

    /// `X̂ = −x̂²` over the representative edge.
    pub fn qgm_generator(&self, q: usize) -> TorusElement {
        TorusElement::monomial(
            GaussianHalfLaurent::int(-1),
            self.hat_exps(&self.qgm.reps[q], 2),
        )
    }

    /// ι: substitutes `X̂ = −x̂²` into each normal-ordered monomial.
    pub fn iota(&self, el: &TorusElement) -> Result<TorusElement> {
        if el.n() != self.qgm.names.len() {
            return Err(Error::Structure(el.n(), self.qgm.names.len()));
        }
        let mut out = TorusElement::zero(self.n());
        for (u, c) in el.terms() {
            let mut acc = Monomial::one(self.n());
            for (q, &k) in u.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let x = self.qgm_generator(q).as_monomial().unwrap();
                acc = self
                    .form
                    .mul_monomial(&acc, &self.form.pow(&x, k as i64)?)?;
            }
            out.add_term(acc.exps, &(&acc.coeff * c));
        }
        Ok(out)
    }

    /// Preimage under ι when every term is an even monomial in the representative edges.
    pub fn iota_inverse(&self, el: &TorusElement) -> Option<TorusElement> {
        let m = self.qgm.names.len();
        let mut out = TorusElement::zero(m);
        for (u, c) in el.terms() {
            let mut q_exps = vec![0; m];
            let mut rebuilt = vec![0; self.n()];
            for (q, rep) in self.qgm.reps.iter().enumerate() {
                let [a, b] = self.edge_gens(rep);
                if u[a] != u[b] || u[a] % 2 != 0 {
                    return None;
                }
                q_exps[q] = u[a] / 2;
                rebuilt[a] = u[a];
                rebuilt[b] = u[b];
            }
            if &rebuilt != u {
                return None;
            }
            let image = self
                .iota(&TorusElement::monomial(
                    GaussianHalfLaurent::one(),
                    q_exps.clone(),
                ))
                .ok()?;
            let phase = image.coefficient(u).unit_inverse()?;
            out.add_term(q_exps, &(c * &phase));
        }
        Some(out)
    }

    /// Splits an exponent vector into square-root parameter exponents, if it lies in their span.
    pub fn hat_decomposition(&self, u: &[i32]) -> Option<Vec<(BareEdge, i32)>> {
        let mut out = Vec::new();
        for tet in 0..self.tri.num_tets() {
            for e in BareEdge::all(tet) {
                let [a, b] = self.edge_gens(&e);
                if u[a] != u[b] {
                    return None;
                }
                if u[a] != 0 {
                    out.push((e, u[a]));
                }
            }
        }
        Some(out)
    }

    /// True iff every term is a monomial in the x̂ with even exponents.
    pub fn check_even(&self, el: &TorusElement) -> bool {
        el.terms().all(|(u, _)| {
            self.hat_decomposition(u)
                .map(|d| d.iter().all(|(_, k)| k % 2 == 0))
                .unwrap_or(false)
        })
    }

    /// Renders in square-root parameter notation, with Weyl brackets where factors
    /// fail to commute; falls back to generator names.
    pub fn render_hat(&self, el: &TorusElement) -> String {
        if el.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (u, c) in el.terms() {
            let Some(dec) = self.hat_decomposition(u) else {
                return el.render(&self.names, " ");
            };
            let factors: Vec<String> = dec
                .iter()
                .map(|(e, k)| {
                    let n = self.tri.hat_name(e);
                    if *k == 1 {
                        n
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            let weyl = self.form.weyl(u);
            let commuting = weyl.coefficient(u).is_one();
            let coeff = c * &weyl.coefficient(u).unit_inverse().unwrap();
            let mono = if factors.is_empty() {
                String::new()
            } else if commuting {
                factors.join(" ")
            } else {
                format!("[{}]", factors.join(" "))
            };
            parts.push((coeff, mono));
        }
        let mut out = String::new();
        for (idx, (c, mono)) in parts.into_iter().enumerate() {
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

    /// Renders through ι⁻¹ when possible, otherwise in x̂ notation.
    pub fn render(&self, el: &TorusElement) -> String {
        match self.iota_inverse(el) {
            Some(q) => self.qgm.render(&q),
            None => self.render_hat(el),
        }
    }

    /// `[x̂_{e_1} ⋯ x̂_{e_k}] + (−1)^{k/2} A²` with `(−1)^{1/2} = i`.
    pub fn edge_relation(&self, ec: usize) -> TorusElement {
        let mut u = vec![0; self.n()];
        for e in &self.tri.edge_classes[ec].members {
            u = add_exps(&u, &self.hat_exps(e, 1));
        }
        let k = self.tri.edge_classes[ec].valence() as i64;
        let constant = GaussianHalfLaurent::from_phase(k, -2 * k + 4);
        &self.form.weyl(&u) + &TorusElement::constant(self.n(), constant)
    }

    /// Edge cones at a vertex cone in clockwise order Z, Z', Z''.
    fn vertex_edges(&self, vc: VertexCone) -> [BareEdge; 3] {
        self.tri.cones_around_vertex(vc).map(|(_, e)| e)
    }

    /// `[x̂_{e_1} x̂_{e_2} x̂_{e_3}] + A`.
    pub fn triangle_relation(&self, vc: VertexCone) -> TorusElement {
        let mut u = vec![0; self.n()];
        for e in self.vertex_edges(vc) {
            u = add_exps(&u, &self.hat_exps(&e, 1));
        }
        &self.form.weyl(&u) + &TorusElement::constant(self.n(), GaussianHalfLaurent::a_pow(2))
    }

    /// `x̂_{e_1}^{-2} + x̂_{e_2}^{2} + 1` where `e_1` carries `first` and `e_2` its clockwise successor.
    pub fn three_term_relation(&self, vc: VertexCone, first: ShapeLabel) -> TorusElement {
        let e1 = self.tri.edge_at_vertex(vc.tet, vc.vertex, first);
        let e2 = self.tri.edge_at_vertex(vc.tet, vc.vertex, first.next());
        let mut out = self.hat(&e1, -2);
        out.add_assign(&self.hat(&e2, 2));
        out.add_assign(&TorusElement::one(self.n()));
        out
    }

    /// Triangle relation and the three-term relation starting at the Z'' edge.
    pub fn vertex_relations(&self, vc: VertexCone) -> (TorusElement, TorusElement) {
        (
            self.triangle_relation(vc),
            self.three_term_relation(vc, ShapeLabel::Zpp),
        )
    }

    fn vertex_id(&self, vc: VertexCone) -> String {
        format!(
            "{}:{}",
            self.tri.vertex_names[vc.vertex as usize], self.tri.letters[vc.tet]
        )
    }

    /// Looks up a relation by id: `edge:<k>`, `tri:<vertex>:<letter>`,
    /// `3t:<vertex>:<letter with primes of e_1>`, or a QGM relation id.
    pub fn relation(&self, id: &str) -> Result<Relation> {
        let parts: Vec<&str> = id.split(':').collect();
        let unknown = || Error::UnknownName(format!("relation {id}"));
        let vertex = |v: &str, letter: &str| -> Result<(VertexCone, ShapeLabel)> {
            let vi = self
                .tri
                .vertex_names
                .iter()
                .position(|n| n == v)
                .ok_or_else(unknown)?;
            let base = letter.trim_end_matches('\'');
            let tet = self
                .tri
                .letters
                .iter()
                .position(|l| l == base)
                .ok_or_else(unknown)?;
            let label = match letter.len() - base.len() {
                0 => ShapeLabel::Z,
                1 => ShapeLabel::Zp,
                2 => ShapeLabel::Zpp,
                _ => return Err(unknown()),
            };
            Ok((
                VertexCone {
                    tet,
                    vertex: vi as u8,
                },
                label,
            ))
        };
        match parts.as_slice() {
            ["edge", k] => {
                let k: usize = k.parse().map_err(|_| unknown())?;
                if k >= self.tri.edge_classes.len() {
                    return Err(unknown());
                }
                Ok(Relation {
                    id: id.into(),
                    kind: RelationKind::Edge,
                    element: self.edge_relation(k),
                    central: false,
                })
            }
            ["tri", v, letter] => {
                let (vc, label) = vertex(v, letter)?;
                if label != ShapeLabel::Z {
                    return Err(unknown());
                }
                Ok(Relation {
                    id: id.into(),
                    kind: RelationKind::Triangle,
                    element: self.triangle_relation(vc),
                    central: true,
                })
            }
            ["3t", v, letter] => {
                let (vc, label) = vertex(v, letter)?;
                let element = self.three_term_relation(vc, label);
                let central = self.is_central(&element);
                Ok(Relation {
                    id: id.into(),
                    kind: RelationKind::ThreeTerm,
                    element,
                    central,
                })
            }
            _ => self
                .qgm_relations()?
                .into_iter()
                .find(|r| r.id == id)
                .ok_or_else(unknown),
        }
    }

    /// Commutes with every square-root shape parameter `x̂_e`.
    pub fn is_central(&self, el: &TorusElement) -> bool {
        (0..self.tri.num_tets()).flat_map(BareEdge::all).all(|e| {
            let x = self.hat(&e, 1);
            self.form.commutes(el, &x).unwrap_or(false)
        })
    }

    pub fn relations(&self) -> Result<RelationFamily> {
        let v_minus = (0..self.tri.edge_classes.len())
            .map(|k| self.relation(&format!("edge:{k}")))
            .collect::<Result<Vec<_>>>()?;
        let mut v_plus = Vec::new();
        for vc in self.tri.vertex_cones() {
            let vid = self.vertex_id(vc);
            v_plus.push(self.relation(&format!("tri:{vid}"))?);
            v_plus.push(self.relation(&format!("3t:{vid}''"))?);
        }
        let (w_minus, w_plus) = self
            .qgm_relations()?
            .into_iter()
            .partition(|r| r.kind == RelationKind::QgmEdge);
        Ok(RelationFamily {
            v_minus,
            v_plus,
            w_minus,
            w_plus,
        })
    }

    /// Relation families of the quantum gluing module, as QGM elements.
    pub fn qgm_relations_raw(&self) -> Vec<(String, RelationKind, TorusElement)> {
        let m = self.qgm.names.len();
        let mut out = Vec::new();
        for (k, ec) in self.tri.edge_classes.iter().enumerate() {
            let mut u = vec![0; m];
            for e in &ec.members {
                u[Qgm::index(e.tet, self.tri.label(e))] += 1;
            }
            let el =
                &self.qgm.form.weyl(&u) - &TorusElement::constant(m, GaussianHalfLaurent::a_pow(8));
            out.push((format!("W-:edge:{k}"), RelationKind::QgmEdge, el));
        }
        for tet in 0..self.tri.num_tets() {
            let letter = &self.tri.letters[tet];
            let mut u = vec![0; m];
            for l in ShapeLabel::ALL {
                u[Qgm::index(tet, l)] = 1;
            }
            let tri =
                &self.qgm.form.weyl(&u) + &TorusElement::constant(m, GaussianHalfLaurent::a_pow(4));
            out.push((format!("W+:tri:{letter}"), RelationKind::QgmTriangle, tri));
            let mut zpp_inv = vec![0; m];
            zpp_inv[Qgm::index(tet, ShapeLabel::Zpp)] = -1;
            let mut z = vec![0; m];
            z[Qgm::index(tet, ShapeLabel::Z)] = 1;
            let mut three = TorusElement::monomial(GaussianHalfLaurent::one(), zpp_inv);
            three.add_assign(&TorusElement::monomial(GaussianHalfLaurent::one(), z));
            three.add_assign(&TorusElement::constant(m, GaussianHalfLaurent::int(-1)));
            out.push((format!("W+:3t:{letter}"), RelationKind::QgmThreeTerm, three));
        }
        out
    }

    /// QGM relations pushed through ι into the face-suspension torus.
    pub fn qgm_relations(&self) -> Result<Vec<Relation>> {
        self.qgm_relations_raw()
            .into_iter()
            .map(|(id, kind, el)| {
                let element = self.iota(&el)?;
                let central = kind == RelationKind::QgmTriangle;
                Ok(Relation {
                    id,
                    kind,
                    element,
                    central,
                })
            })
            .collect()
    }

    /// `before − relation·cofactor` (left) or `before − cofactor·relation` (right).
    pub fn apply_rewrite(
        &self,
        el: &TorusElement,
        relation: &Relation,
        side: Side,
        cofactor: &TorusElement,
    ) -> Result<(TorusElement, RewriteCertificate)> {
        if !relation.allows(side) {
            return Err(Error::Sidedness(relation.id.clone(), side.to_string()));
        }
        if side != relation.home_side() && !self.form.commutes(&relation.element, cofactor)? {
            return Err(Error::Sidedness(relation.id.clone(), side.to_string()));
        }
        let prod = match side {
            Side::Left => self.form.mul(&relation.element, cofactor)?,
            Side::Right => self.form.mul(cofactor, &relation.element)?,
        };
        let after = el - &prod;
        let cert = RewriteCertificate {
            before: el.clone(),
            after: after.clone(),
            relation_id: relation.id.clone(),
            relation: relation.element.clone(),
            side,
            cofactor: cofactor.clone(),
        };
        Ok((after, cert))
    }

    /// Eliminates the term of `el` at `target` using the term of the relation at `pivot`,
    /// whose coefficient must be a unit.
    pub fn reduce(
        &self,
        el: &TorusElement,
        relation: &Relation,
        side: Side,
        target: &[i32],
        pivot: &[i32],
    ) -> Result<(TorusElement, RewriteCertificate)> {
        let t = el.coefficient(target);
        if t.is_zero() {
            return Err(Error::Certificate(format!(
                "target term {} absent",
                render_exps(target, &self.names, " ")
            )));
        }
        let p = relation.element.coefficient(pivot);
        if p.is_zero() {
            return Err(Error::Certificate(format!(
                "pivot term absent from {}",
                relation.id
            )));
        }
        let pinv = self.form.pow(&Monomial::new(p, pivot.to_vec()), -1)?;
        let tm = Monomial::new(t, target.to_vec());
        let cofactor: TorusElement = match side {
            Side::Left => self.form.mul_monomial(&pinv, &tm)?,
            Side::Right => self.form.mul_monomial(&tm, &pinv)?,
        }
        .into();
        self.apply_rewrite(el, relation, side, &cofactor)
    }

    /// For a relation `M + c` with `M` a monomial and `c` a unit constant, replaces the
    /// target term `m` by `−c⁻¹·M·m` (power 1) or `−c·M⁻¹·m` (power −1), multiplied on
    /// the relation's side. Returns the new exponent vector of the target.
    pub fn multiply_by_relation(
        &self,
        el: &TorusElement,
        relation: &Relation,
        side: Side,
        target: &[i32],
        power: i32,
    ) -> Result<(TorusElement, RewriteCertificate, Exps)> {
        let zero = vec![0; self.n()];
        let mono: Vec<&Exps> = relation
            .element
            .terms()
            .map(|(u, _)| u)
            .filter(|u| **u != zero)
            .collect();
        if relation.element.len() != 2 || mono.len() != 1 {
            return Err(Error::Certificate(format!(
                "{} is not a monomial-plus-constant relation",
                relation.id
            )));
        }
        let m = mono[0].clone();
        let (pivot, new_target) = match power {
            1 => (zero.clone(), add_exps(target, &m)),
            -1 => (m.clone(), crate::qtorus::sub_exps(target, &m)),
            _ => return Err(Error::Certificate("power must be ±1".into())),
        };
        let (after, cert) = self.reduce(el, relation, side, target, &pivot)?;
        Ok((after, cert, new_target))
    }

    /// `x̂_e²·m ≡ x̂_{opp(e)}²·m` modulo the four triangle relations of the tetrahedron.
    /// Replaces the target term by multiplying with `t_c t_d t_a⁻¹ t_b⁻¹` where `e = ab`.
    pub fn square_opposite(
        &self,
        el: &TorusElement,
        e: &BareEdge,
        target: &[i32],
    ) -> Result<(TorusElement, Vec<RewriteCertificate>, Exps)> {
        let o = e.opposite();
        let steps = [(o.a, 1), (o.b, 1), (e.a, -1), (e.b, -1)];
        let mut cur = el.clone();
        let mut tgt = target.to_vec();
        let mut certs = Vec::new();
        for (v, power) in steps {
            let vc = VertexCone {
                tet: e.tet,
                vertex: v,
            };
            let rel = self.relation(&format!("tri:{}", self.vertex_id(vc)))?;
            let (after, cert, nt) =
                self.multiply_by_relation(&cur, &rel, Side::Left, &tgt, power)?;
            cur = after;
            tgt = nt;
            certs.push(cert);
        }
        Ok((cur, certs, tgt))
    }

    /// Rewrite chain taking the image under ι of a `W+` relation to zero using `V+`
    /// relations only. Returns the certificates and the final element.
    pub fn certify_qgm_plus(&self, id: &str) -> Result<(Vec<RewriteCertificate>, TorusElement)> {
        let rel = self.relation(id)?;
        let letter = id.rsplit(':').next().unwrap_or_default();
        let tet = self
            .tri
            .letters
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| Error::UnknownName(format!("relation {id}")))?;
        let rep = |l: ShapeLabel| self.qgm.reps[Qgm::index(tet, l)];
        let meeting =
            |a: &BareEdge, b: &BareEdge| (0..4u8).find(|v| a.contains(*v) && b.contains(*v));
        let mut certs = Vec::new();
        let cur = match rel.kind {
            RelationKind::QgmTriangle => {
                let [z, zp, zpp] = ShapeLabel::ALL.map(rep);
                let (moved, v) = [
                    (z, meeting(&zp, &zpp)),
                    (zp, meeting(&z, &zpp)),
                    (zpp, meeting(&z, &zp)),
                ]
                .into_iter()
                .find_map(|(e, v)| v.filter(|v| !e.contains(*v)).map(|v| (e, v)))
                .ok_or_else(|| Error::Certificate(format!("{id}: no common vertex")))?;
                let zero = vec![0; self.n()];
                let target = rel
                    .element
                    .terms()
                    .map(|(u, _)| u.clone())
                    .find(|u| *u != zero)
                    .ok_or_else(|| Error::Certificate(format!("{id}: constant relation")))?;
                let (mut cur, cs, mut tgt) = self.square_opposite(&rel.element, &moved, &target)?;
                certs.extend(cs);
                let tri = self.relation(&format!(
                    "tri:{}",
                    self.vertex_id(VertexCone { tet, vertex: v })
                ))?;
                for _ in 0..2 {
                    let (after, cert, nt) =
                        self.multiply_by_relation(&cur, &tri, Side::Left, &tgt, -1)?;
                    cur = after;
                    tgt = nt;
                    certs.push(cert);
                }
                cur
            }
            RelationKind::QgmThreeTerm => {
                let v = meeting(&rep(ShapeLabel::Zpp), &rep(ShapeLabel::Z))
                    .ok_or_else(|| Error::Certificate(format!("{id}: no common vertex")))?;
                let three = self.relation(&format!(
                    "3t:{}''",
                    self.vertex_id(VertexCone { tet, vertex: v })
                ))?;
                let minus_one = TorusElement::constant(self.n(), GaussianHalfLaurent::int(-1));
                let (after, cert) =
                    self.apply_rewrite(&rel.element, &three, Side::Left, &minus_one)?;
                certs.push(cert);
                after
            }
            _ => return Err(Error::Precondition(format!("{id} is not a W+ relation"))),
        };
        for c in &certs {
            c.verify(&self.form)?;
        }
        Ok((certs, cur))
    }

    /// Values of the generators making `x̂_e ↦ σ_e (−Z_e)^{1/2}` (principal branch),
    /// with σ from `signs` indexed by tetrahedron·6 + edge position, or all +1.
    pub fn hat_assignment(&self, shapes: &[Shape], signs: Option<&[i8]>) -> Vec<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut vals = vec![one; self.n()];
        for tet in 0..self.tri.num_tets() {
            for (k, e) in BareEdge::all(tet).iter().enumerate() {
                let z = shapes[tet].param(self.tri.label(e));
                let sigma = signs.map_or(1.0, |s| s[6 * tet + k] as f64);
                vals[self.edge_gens(e)[0]] = (-z).sqrt() * sigma;
            }
        }
        vals
    }

    /// Classical values of the relations at the given shapes.
    pub fn classical_check(&self, shapes: &[Shape]) -> Result<CheckReport> {
        let vals = self.hat_assignment(shapes, None);
        let one = Complex64::new(1.0, 0.0);
        let spec = |el: &TorusElement| self.form.specialize(el, &vals, one);
        let mut edge = Vec::new();
        for (k, ec) in self.tri.edge_classes.iter().enumerate() {
            if !ec.closed {
                continue;
            }
            let mut u = vec![0; self.n()];
            for e in &ec.members {
                u = add_exps(&u, &self.hat_exps(e, 2));
            }
            let lead = spec(&self.form.weyl(&u))?;
            let want = if ec.valence() % 2 == 0 { one } else { -one };
            edge.push((format!("edge:{k}"), (lead - want).norm()));
        }
        let mut triangle = Vec::new();
        let mut three_term = Vec::new();
        for vc in self.tri.vertex_cones() {
            let vid = self.vertex_id(vc);
            let mut u = vec![0; self.n()];
            for e in self.vertex_edges(vc) {
                u = add_exps(&u, &self.hat_exps(&e, 2));
            }
            triangle.push((
                format!("tri:{vid}"),
                (spec(&self.form.weyl(&u))? - one).norm(),
            ));
            for l in ShapeLabel::ALL {
                let r = spec(&self.three_term_relation(vc, l))?;
                three_term.push((format!("3t:{vid}{}", l.primes()), r.norm()));
            }
        }
        Ok(CheckReport {
            edge,
            triangle,
            three_term,
        })
    }

    /// Sign choices σ ∈ {±1}^{6n} under which every un-squared edge and triangle relation
    /// vanishes at A = 1. Returns the number of consistent choices and the first one.
    pub fn branch_search(&self, shapes: &[Shape], tol: f64) -> Result<(usize, Option<Vec<i8>>)> {
        let nedges = 6 * self.tri.num_tets();
        if nedges > 24 {
            return Err(Error::Precondition(
                "branch search limited to 4 tetrahedra".into(),
            ));
        }
        let one = Complex64::new(1.0, 0.0);
        let mut rels: Vec<TorusElement> = Vec::new();
        for (k, ec) in self.tri.edge_classes.iter().enumerate() {
            if ec.closed {
                rels.push(self.edge_relation(k));
            }
        }
        for vc in self.tri.vertex_cones() {
            rels.push(self.triangle_relation(vc));
        }
        let mut count = 0;
        let mut first = None;
        for bits in 0u32..(1u32 << nedges) {
            let signs: Vec<i8> = (0..nedges)
                .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            let vals = self.hat_assignment(shapes, Some(&signs));
            let mut ok = true;
            for r in &rels {
                if self.form.specialize(r, &vals, one)?.norm() > tol {
                    ok = false;
                    break;
                }
            }
            if ok {
                count += 1;
                if first.is_none() {
                    first = Some(signs);
                }
            }
        }
        Ok((count, first))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub edge: Vec<(String, f64)>,
    pub triangle: Vec<(String, f64)>,
    pub three_term: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn max_residual(&self) -> f64 {
        self.edge
            .iter()
            .chain(&self.triangle)
            .chain(&self.three_term)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }
}
