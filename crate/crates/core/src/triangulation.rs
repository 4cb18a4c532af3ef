//! Ideal triangulations: face gluings, edge classes, face suspensions, cones and shape labels.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex permutation: vertex `v` of one tetrahedron is glued to vertex `p[v]` of its neighbor.
pub type Perm = [u8; 4];

pub fn perm_inverse(p: &Perm) -> Perm {
    let mut inv = [0u8; 4];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u8;
    }
    inv
}

pub fn perm_sign(p: &Perm) -> i8 {
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn parse_perm(s: &str) -> Result<Perm> {
    let digits: Vec<u8> = s
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Triangulation(format!("bad permutation {s:?}")))?;
    if digits.len() != 4 {
        return Err(Error::Triangulation(format!("bad permutation {s:?}")));
    }
    let mut seen = [false; 4];
    for &d in &digits {
        if d > 3 || seen[d as usize] {
            return Err(Error::Triangulation(format!("bad permutation {s:?}")));
        }
        seen[d as usize] = true;
    }
    Ok([digits[0], digits[1], digits[2], digits[3]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeLabel {
    Z,
    Zp,
    Zpp,
}

impl ShapeLabel {
    pub const ALL: [ShapeLabel; 3] = [ShapeLabel::Z, ShapeLabel::Zp, ShapeLabel::Zpp];

    /// Cyclic successor Z → Z' → Z'' → Z.
    pub fn next(self) -> Self {
        match self {
            ShapeLabel::Z => ShapeLabel::Zp,
            ShapeLabel::Zp => ShapeLabel::Zpp,
            ShapeLabel::Zpp => ShapeLabel::Z,
        }
    }

    pub fn prev(self) -> Self {
        self.next().next()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn primes(self) -> &'static str {
        match self {
            ShapeLabel::Z => "",
            ShapeLabel::Zp => "'",
            ShapeLabel::Zpp => "''",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BareEdge {
    pub tet: usize,
    pub a: u8,
    pub b: u8,
}

/// The cone over a bare edge, from the tetrahedron's barycenter.
pub type EdgeCone = BareEdge;

impl BareEdge {
    pub fn new(tet: usize, a: u8, b: u8) -> Self {
        assert!(
            a != b && a < 4 && b < 4,
            "bare edge needs two distinct vertices"
        );
        BareEdge {
            tet,
            a: a.min(b),
            b: a.max(b),
        }
    }

    pub fn opposite(&self) -> Self {
        let rest: Vec<u8> = (0..4).filter(|v| *v != self.a && *v != self.b).collect();
        BareEdge::new(self.tet, rest[0], rest[1])
    }

    /// The two vertices not on the edge; the faces opposite them contain the edge.
    pub fn faces(&self) -> [u8; 2] {
        let o = self.opposite();
        [o.a, o.b]
    }

    pub fn contains(&self, v: u8) -> bool {
        self.a == v || self.b == v
    }

    pub fn all(tet: usize) -> [BareEdge; 6] {
        [
            BareEdge::new(tet, 0, 1),
            BareEdge::new(tet, 0, 2),
            BareEdge::new(tet, 0, 3),
            BareEdge::new(tet, 1, 2),
            BareEdge::new(tet, 1, 3),
            BareEdge::new(tet, 2, 3),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexCone {
    pub tet: usize,
    pub vertex: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tetra {
    pub neighbors: [Option<usize>; 4],
    pub gluings: [Option<Perm>; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    /// Bare edges in cyclic order around the edge.
    pub members: Vec<BareEdge>,
    /// Face suspension crossed after each member.
    pub exits: Vec<usize>,
    /// False when the orbit runs into boundary faces.
    pub closed: bool,
}

impl EdgeClass {
    pub fn valence(&self) -> usize {
        self.members.len()
    }
}

/// Suspension over a face class: one or two tetra-halves `(tet, local face)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSuspension {
    pub name: String,
    pub halves: Vec<(usize, u8)>,
}

#[derive(Debug, Deserialize, Serialize)]
struct TetFile {
    #[serde(default)]
    shape: Option<String>,
    neighbors: Vec<i64>,
    gluings: Vec<Option<String>>,
}

#[derive(Debug, Deserialize, Serialize)]
struct TriFile {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    vertex_names: Option<Vec<String>>,
    tetrahedra: Vec<TetFile>,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    pub name: String,
    pub vertex_names: [String; 4],
    pub tets: Vec<Tetra>,
    /// Lower-case shape letter per tetrahedron.
    pub letters: Vec<String>,
    /// +1 or -1 per tetrahedron, propagated from tetrahedron 0.
    pub orientation: Vec<i8>,
    pub edge_classes: Vec<EdgeClass>,
    pub faces: Vec<FaceSuspension>,
    edge_class_of: HashMap<BareEdge, usize>,
    face_of: Vec<[usize; 4]>,
}

fn default_letter(i: usize) -> String {
    const LETTERS: &[u8] = b"zyxwvutsrqponmlkjhgfedcb";
    match LETTERS.get(i) {
        Some(c) => (*c as char).to_string(),
        None => format!("t{i}"),
    }
}

impl Triangulation {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TriFile = serde_json::from_str(text)
            .map_err(|e| Error::Triangulation(format!("malformed file: {e}")))?;
        let n = file.tetrahedra.len();
        if n == 0 {
            return Err(Error::Triangulation("no tetrahedra".into()));
        }
        let mut tets = Vec::with_capacity(n);
        let mut letters = Vec::with_capacity(n);
        for (i, t) in file.tetrahedra.iter().enumerate() {
            if t.neighbors.len() != 4 || t.gluings.len() != 4 {
                return Err(Error::Triangulation(format!(
                    "tetrahedron {i} needs 4 neighbors and 4 gluings"
                )));
            }
            let mut neighbors = [None; 4];
            let mut gluings = [None; 4];
            for f in 0..4 {
                match (t.neighbors[f], &t.gluings[f]) {
                    (nb, None) if nb < 0 => {}
                    (nb, Some(p)) if nb >= 0 => {
                        if nb as usize >= n {
                            return Err(Error::Triangulation(format!(
                                "tetrahedron {i} face {f}: neighbor {nb} out of range"
                            )));
                        }
                        neighbors[f] = Some(nb as usize);
                        gluings[f] = Some(parse_perm(p)?);
                    }
                    _ => {
                        return Err(Error::Triangulation(format!(
                            "tetrahedron {i} face {f}: boundary marker without matching gluing"
                        )))
                    }
                }
            }
            tets.push(Tetra { neighbors, gluings });
            letters.push(t.shape.clone().unwrap_or_else(|| default_letter(i)));
        }
        let vertex_names = match file.vertex_names {
            Some(v) if v.len() == 4 => [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()],
            Some(_) => return Err(Error::Triangulation("vertex_names needs 4 entries".into())),
            None => ["0".into(), "1".into(), "2".into(), "3".into()],
        };
        Self::build(file.name.unwrap_or_default(), vertex_names, tets, letters)
    }

    pub fn to_json(&self) -> String {
        let file = TriFile {
            name: Some(self.name.clone()),
            vertex_names: Some(self.vertex_names.to_vec()),
            tetrahedra: self
                .tets
                .iter()
                .zip(&self.letters)
                .map(|(t, l)| TetFile {
                    shape: Some(l.clone()),
                    neighbors: t
                        .neighbors
                        .iter()
                        .map(|n| n.map_or(-1, |x| x as i64))
                        .collect(),
                    gluings: t
                        .gluings
                        .iter()
                        .map(|g| g.map(|p| p.iter().map(|d| char::from(b'0' + d)).collect()))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn build(
        name: String,
        vertex_names: [String; 4],
        tets: Vec<Tetra>,
        letters: Vec<String>,
    ) -> Result<Self> {
        let n = tets.len();
        for (t, tet) in tets.iter().enumerate() {
            for f in 0..4 {
                let (Some(nb), Some(p)) = (tet.neighbors[f], tet.gluings[f]) else {
                    continue;
                };
                let g = p[f] as usize;
                if nb == t && g == f {
                    return Err(Error::Triangulation(format!(
                        "tetrahedron {t} face {f} glued to itself"
                    )));
                }
                let back = tets[nb].neighbors[g];
                let back_perm = tets[nb].gluings[g];
                if back != Some(t) || back_perm != Some(perm_inverse(&p)) {
                    return Err(Error::Triangulation(format!(
                        "non-involutive gluing at tetrahedron {t} face {f}"
                    )));
                }
            }
        }
        let mut letter_set = std::collections::HashSet::new();
        for l in &letters {
            if !letter_set.insert(l.clone()) {
                return Err(Error::Triangulation(format!(
                    "duplicate shape letter {l:?}"
                )));
            }
        }

        let orientation = Self::orient(&tets)?;

        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut faces: Vec<FaceSuspension> = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                if face_of[t][f] != usize::MAX {
                    continue;
                }
                let id = faces.len();
                let mut halves = vec![(t, f as u8)];
                face_of[t][f] = id;
                if let (Some(nb), Some(p)) = (tets[t].neighbors[f], tets[t].gluings[f]) {
                    let g = p[f] as usize;
                    face_of[nb][g] = id;
                    halves.push((nb, g as u8));
                }
                let base = vertex_names[f].clone();
                let name = if faces.iter().any(|fs| fs.name == base) {
                    format!("{base}{id}")
                } else {
                    base
                };
                faces.push(FaceSuspension { name, halves });
            }
        }

        let mut tri = Triangulation {
            name,
            vertex_names,
            tets,
            letters,
            orientation,
            edge_classes: Vec::new(),
            faces,
            edge_class_of: HashMap::new(),
            face_of,
        };
        tri.edge_classes = tri.compute_edge_classes()?;
        for (i, ec) in tri.edge_classes.iter().enumerate() {
            for e in &ec.members {
                tri.edge_class_of.insert(*e, i);
            }
        }
        Ok(tri)
    }

    fn orient(tets: &[Tetra]) -> Result<Vec<i8>> {
        let n = tets.len();
        let mut orientation = vec![0i8; n];
        for root in 0..n {
            if orientation[root] != 0 {
                continue;
            }
            orientation[root] = 1;
            let mut stack = vec![root];
            while let Some(t) = stack.pop() {
                for f in 0..4 {
                    let (Some(nb), Some(p)) = (tets[t].neighbors[f], tets[t].gluings[f]) else {
                        continue;
                    };
                    let want = -orientation[t] * perm_sign(&p);
                    if orientation[nb] == 0 {
                        orientation[nb] = want;
                        stack.push(nb);
                    } else if orientation[nb] != want {
                        return Err(Error::Triangulation(
                            "triangulation is not orientable".into(),
                        ));
                    }
                }
            }
        }
        Ok(orientation)
    }

    /// Walks around an edge: from `(t, a, b, c, d)` leave through the face opposite `d`.
    fn step(&self, s: (usize, u8, u8, u8, u8)) -> Option<(usize, u8, u8, u8, u8)> {
        let (t, a, b, c, d) = s;
        let nb = self.tets[t].neighbors[d as usize]?;
        let p = self.tets[t].gluings[d as usize]?;
        Some((
            nb,
            p[a as usize],
            p[b as usize],
            p[d as usize],
            p[c as usize],
        ))
    }

    fn compute_edge_classes(&self) -> Result<Vec<EdgeClass>> {
        let mut seen: HashMap<BareEdge, usize> = HashMap::new();
        let mut classes = Vec::new();
        for t in 0..self.tets.len() {
            for e in BareEdge::all(t) {
                if seen.contains_key(&e) {
                    continue;
                }
                let [c, d] = e.faces();
                let start = (t, e.a, e.b, c, d);
                // find the beginning of an open chain by walking backwards
                let mut first = start;
                let mut closed = false;
                let mut guard = 0;
                loop {
                    let rev = (first.0, first.1, first.2, first.4, first.3);
                    match self.step(rev) {
                        None => break,
                        Some(s) => {
                            let s = (s.0, s.1, s.2, s.4, s.3);
                            if same_edge(s, start) {
                                closed = true;
                                break;
                            }
                            first = s;
                        }
                    }
                    guard += 1;
                    if guard > 6 * self.tets.len() + 1 {
                        return Err(Error::Triangulation("unclosed edge orbit".into()));
                    }
                }
                let begin = if closed { start } else { first };
                let mut members = Vec::new();
                let mut exits = Vec::new();
                let mut cur = begin;
                loop {
                    let be = BareEdge::new(cur.0, cur.1, cur.2);
                    if seen.insert(be, classes.len()).is_some() {
                        return Err(Error::Triangulation(format!(
                            "unclosed edge orbit through tetrahedron {} edge {}{}",
                            cur.0, cur.1, cur.2
                        )));
                    }
                    members.push(be);
                    exits.push(self.face_of[cur.0][cur.3 as usize]);
                    match self.step(cur) {
                        None => {
                            if closed {
                                return Err(Error::Triangulation("unclosed edge orbit".into()));
                            }
                            break;
                        }
                        Some(next) => {
                            if same_edge(next, begin) {
                                if next != begin {
                                    return Err(Error::Triangulation(
                                        "edge identified with itself in reverse".into(),
                                    ));
                                }
                                break;
                            }
                            cur = next;
                        }
                    }
                }
                classes.push(EdgeClass {
                    members,
                    exits,
                    closed,
                });
            }
        }
        Ok(classes)
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn is_closed(&self) -> bool {
        self.faces.iter().all(|f| f.halves.len() == 2)
    }

    pub fn edge_class_of(&self, e: &BareEdge) -> usize {
        self.edge_class_of[e]
    }

    /// Face suspension containing local face `face` of tetrahedron `tet`.
    pub fn face_suspension(&self, tet: usize, face: u8) -> usize {
        self.face_of[tet][face as usize]
    }

    pub fn face_by_name(&self, name: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.name == name)
    }

    /// The three bare edges of the local face `face` (the edges avoiding vertex `face`).
    pub fn edges_of_face(tet: usize, face: u8) -> [BareEdge; 3] {
        let vs: Vec<u8> = (0..4).filter(|v| *v != face).collect();
        [
            BareEdge::new(tet, vs[0], vs[1]),
            BareEdge::new(tet, vs[0], vs[2]),
            BareEdge::new(tet, vs[1], vs[2]),
        ]
    }

    /// Shape label of a bare edge. A positively oriented tetrahedron carries Z' on 01/23,
    /// Z on 02/13 and Z'' on 03/12; negative orientation exchanges Z and Z''.
    pub fn label(&self, e: &BareEdge) -> ShapeLabel {
        let base = match (e.a, e.b) {
            (0, 1) | (2, 3) => ShapeLabel::Zp,
            (0, 2) | (1, 3) => ShapeLabel::Z,
            _ => ShapeLabel::Zpp,
        };
        if self.orientation[e.tet] > 0 {
            base
        } else {
            match base {
                ShapeLabel::Z => ShapeLabel::Zpp,
                ShapeLabel::Zpp => ShapeLabel::Z,
                ShapeLabel::Zp => ShapeLabel::Zp,
            }
        }
    }

    /// The bare edge in local face `face` of `tet` with the given label.
    pub fn edge_in_face(&self, tet: usize, face: u8, label: ShapeLabel) -> BareEdge {
        Self::edges_of_face(tet, face)
            .into_iter()
            .find(|e| self.label(e) == label)
            .expect("each face carries all three labels")
    }

    /// The bare edge at `vertex` of `tet` with the given label.
    pub fn edge_at_vertex(&self, tet: usize, vertex: u8, label: ShapeLabel) -> BareEdge {
        (0..4u8)
            .filter(|w| *w != vertex)
            .map(|w| BareEdge::new(tet, vertex, w))
            .find(|e| self.label(e) == label)
            .expect("each vertex carries all three labels")
    }

    /// The two bare edges of `tet` carrying `label`, the one avoiding vertex 0 first.
    pub fn edges_with_label(&self, tet: usize, label: ShapeLabel) -> [BareEdge; 2] {
        let mut es: Vec<BareEdge> = BareEdge::all(tet)
            .into_iter()
            .filter(|e| self.label(e) == label)
            .collect();
        es.sort_by_key(|e| (e.contains(0), *e));
        [es[0], es[1]]
    }

    pub fn cones_around_edge(&self, ec: usize) -> Vec<(usize, EdgeCone)> {
        let c = &self.edge_classes[ec];
        c.exits
            .iter()
            .copied()
            .zip(c.members.iter().copied())
            .collect()
    }

    /// The three edge cones abutting a vertex cone, in the clockwise order Z, Z', Z'',
    /// each paired with the face suspension between it and its clockwise successor.
    pub fn cones_around_vertex(&self, vc: VertexCone) -> [(usize, EdgeCone); 3] {
        let es = ShapeLabel::ALL.map(|l| self.edge_at_vertex(vc.tet, vc.vertex, l));
        let mut out = [(0, es[0]); 3];
        for k in 0..3 {
            let e1 = es[k];
            let e2 = es[(k + 1) % 3];
            let w1 = if e1.a == vc.vertex { e1.b } else { e1.a };
            let w2 = if e2.a == vc.vertex { e2.b } else { e2.a };
            let opp = (0..4u8)
                .find(|v| *v != vc.vertex && *v != w1 && *v != w2)
                .unwrap();
            out[k] = (self.face_of[vc.tet][opp as usize], e1);
        }
        out
    }

    pub fn vertex_cones(&self) -> Vec<VertexCone> {
        (0..self.tets.len())
            .flat_map(|tet| (0..4u8).map(move |vertex| VertexCone { tet, vertex }))
            .collect()
    }

    /// Two-letter name of an edge from the local faces containing it, e.g. "NS".
    pub fn edge_name(&self, e: &BareEdge) -> String {
        let [c, d] = e.faces();
        format!(
            "{}{}",
            self.vertex_names[c as usize], self.vertex_names[d as usize]
        )
    }

    pub fn letter_with_label(&self, tet: usize, label: ShapeLabel) -> String {
        format!("{}{}", self.letters[tet], label.primes())
    }

    /// Name of the square-root parameter over an edge cone, e.g. "z'_NS".
    pub fn hat_name(&self, e: &BareEdge) -> String {
        format!(
            "{}_{}",
            self.letter_with_label(e.tet, self.label(e)),
            self.edge_name(e)
        )
    }

    /// Name of the quantized shape parameter, e.g. "Z'".
    pub fn qgm_name(&self, tet: usize, label: ShapeLabel) -> String {
        format!("{}{}", self.letters[tet].to_uppercase(), label.primes())
    }

    /// Parses an edge cone written as "z'_NS".
    pub fn edge_by_hat_name(&self, name: &str) -> Option<BareEdge> {
        (0..self.tets.len())
            .flat_map(BareEdge::all)
            .find(|e| self.hat_name(e) == name)
    }
}

fn same_edge(s: (usize, u8, u8, u8, u8), t: (usize, u8, u8, u8, u8)) -> bool {
    s.0 == t.0 && BareEdge::new(s.0, s.1, s.2) == BareEdge::new(t.0, t.1, t.2)
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let boundary = self.faces.iter().filter(|fs| fs.halves.len() == 1).count();
        write!(
            f,
            "{} tetrahedra, {} edge classes (valences {}), {} face suspensions ({} boundary)",
            self.tets.len(),
            self.edge_classes.len(),
            self.edge_classes
                .iter()
                .map(|c| c.valence().to_string())
                .collect::<Vec<_>>()
                .join(","),
            self.faces.len(),
            boundary
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SINGLE: &str =
        r#"{"tetrahedra": [{"neighbors": [-1,-1,-1,-1], "gluings": [null,null,null,null]}]}"#;

    #[test]
    fn perm_helpers() {
        let p = [1, 3, 2, 0];
        let inv = perm_inverse(&p);
        for v in 0..4 {
            assert_eq!(inv[p[v] as usize] as usize, v);
        }
        assert_eq!(perm_sign(&[0, 1, 2, 3]), 1);
        assert_eq!(perm_sign(&[1, 0, 2, 3]), -1);
        assert_eq!(perm_sign(&[0, 3, 1, 2]), 1);
        assert!(parse_perm("0012").is_err());
        assert!(parse_perm("01234").is_err());
    }

    #[test]
    fn single_tetrahedron() {
        let t = Triangulation::from_json(SINGLE).unwrap();
        assert_eq!(t.edge_classes.len(), 6);
        assert!(t.edge_classes.iter().all(|c| c.valence() == 1 && !c.closed));
        assert_eq!(t.faces.len(), 4);
        assert!(t.faces.iter().all(|f| f.halves.len() == 1));
        assert_eq!(t.cones_around_edge(0).len(), 1);
    }

    #[test]
    fn two_tetrahedra_one_face() {
        let src = r#"{"tetrahedra": [
            {"neighbors": [1,-1,-1,-1], "gluings": ["0123",null,null,null]},
            {"neighbors": [0,-1,-1,-1], "gluings": ["0123",null,null,null]}]}"#;
        let t = Triangulation::from_json(src).unwrap();
        // edges inside face 0 are shared; the three edges through vertex 0 are not
        let shared = BareEdge::new(0, 1, 2);
        let ec = t.edge_class_of(&shared);
        assert_eq!(t.cones_around_edge(ec).len(), 2);
        assert_eq!(t.edge_classes.len(), 9);
        assert_eq!(t.orientation, vec![1, -1]);
    }

    #[test]
    fn labels_are_consistent() {
        let t = Triangulation::from_json(SINGLE).unwrap();
        for e in BareEdge::all(0) {
            assert_eq!(t.label(&e), t.label(&e.opposite()));
        }
        for v in 0..4u8 {
            let cones = t.cones_around_vertex(VertexCone { tet: 0, vertex: v });
            let labels: Vec<ShapeLabel> = cones.iter().map(|(_, e)| t.label(e)).collect();
            assert_eq!(labels, vec![ShapeLabel::Z, ShapeLabel::Zp, ShapeLabel::Zpp]);
            for (_, e) in cones {
                assert!(e.contains(v));
            }
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(Triangulation::from_json("{").is_err());
        let double = r#"{"tetrahedra": [
            {"neighbors": [1,-1,-1,-1], "gluings": ["0123",null,null,null]},
            {"neighbors": [0,-1,-1,-1], "gluings": ["0123",null,null,null]},
            {"neighbors": [1,-1,-1,-1], "gluings": ["0123",null,null,null]}]}"#;
        assert!(matches!(
            Triangulation::from_json(double),
            Err(Error::Triangulation(_))
        ));
        let mismatched = r#"{"tetrahedra": [
            {"neighbors": [1,-1,-1,-1], "gluings": ["0132",null,null,null]},
            {"neighbors": [0,-1,-1,-1], "gluings": ["0123",null,null,null]}]}"#;
        assert!(Triangulation::from_json(mismatched).is_err());
        let selfglued = r#"{"tetrahedra": [
            {"neighbors": [0,-1,-1,-1], "gluings": ["0123",null,null,null]}]}"#;
        assert!(Triangulation::from_json(selfglued).is_err());
    }
}
