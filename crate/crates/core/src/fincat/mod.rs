//! Finite cocomplete base categories: finite sets, finite directed
//! multigraphs and finite-dimensional vector spaces over ℤ/q.

mod colimit;
mod hom;
pub mod modular;

pub use colimit::{chain_colimit, coequalizer, coproduct, pushout, quotient, ColimitResult, Relation};
pub use hom::{hom_count, hom_enumerate, HomCap, DEFAULT_CAP};
pub use modular::Matrix;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which base category an object lives in. Modules carry their modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Finset,
    Fingraph,
    Finmod { q: u32 },
}

impl Backend {
    pub fn initial(self) -> Object {
        match self {
            Backend::Finset => Object::Set(0),
            Backend::Fingraph => Object::Graph(Graph::empty()),
            Backend::Finmod { q } => Object::Module { q, rank: 0 },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Finset => "finset",
            Backend::Fingraph => "fingraph",
            Backend::Finmod { .. } => "finmod",
        }
    }
}

/// A finite directed multigraph; arrow `a` runs from `src[a]` to `tgt[a]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    vertices: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
}

impl Graph {
    pub fn new(vertices: usize, src: Vec<usize>, tgt: Vec<usize>) -> Result<Self> {
        if src.len() != tgt.len() {
            return Err(Error::InvalidObject("source and target lists differ in length".into()));
        }
        if let Some(&v) = src.iter().chain(&tgt).find(|&&v| v >= vertices) {
            return Err(Error::InvalidObject(format!("arrow endpoint {v} is not a vertex")));
        }
        Ok(Graph { vertices, src, tgt })
    }

    pub fn empty() -> Self {
        Graph { vertices: 0, src: Vec::new(), tgt: Vec::new() }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self) -> &[usize] {
        &self.src
    }

    pub fn tgt(&self) -> &[usize] {
        &self.tgt
    }
}

/// An object of one of the base categories.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ObjectRepr", into = "ObjectRepr")]
pub enum Object {
    Set(usize),
    Graph(Graph),
    Module { q: u32, rank: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
enum ObjectRepr {
    Finset { size: usize },
    Fingraph { vertices: usize, arrows: usize, src: Vec<usize>, tgt: Vec<usize> },
    Finmod { q: u32, rank: usize },
}

impl TryFrom<ObjectRepr> for Object {
    type Error = Error;

    fn try_from(r: ObjectRepr) -> Result<Self> {
        match r {
            ObjectRepr::Finset { size } => Ok(Object::Set(size)),
            ObjectRepr::Fingraph { vertices, arrows, src, tgt } => {
                if src.len() != arrows {
                    return Err(Error::InvalidObject(format!(
                        "graph declares {arrows} arrows but lists {} sources",
                        src.len()
                    )));
                }
                Ok(Object::Graph(Graph::new(vertices, src, tgt)?))
            }
            ObjectRepr::Finmod { q, rank } => Object::module(q, rank),
        }
    }
}

impl From<Object> for ObjectRepr {
    fn from(o: Object) -> Self {
        match o {
            Object::Set(size) => ObjectRepr::Finset { size },
            Object::Graph(g) => {
                ObjectRepr::Fingraph { vertices: g.vertices, arrows: g.src.len(), src: g.src, tgt: g.tgt }
            }
            Object::Module { q, rank } => ObjectRepr::Finmod { q, rank },
        }
    }
}

impl Object {
    pub fn set(n: usize) -> Self {
        Object::Set(n)
    }

    pub fn graph(vertices: usize, src: Vec<usize>, tgt: Vec<usize>) -> Result<Self> {
        Ok(Object::Graph(Graph::new(vertices, src, tgt)?))
    }

    pub fn module(q: u32, rank: usize) -> Result<Self> {
        if !modular::is_prime(q) {
            return Err(Error::InvalidObject(format!("modulus {q} is not prime")));
        }
        Ok(Object::Module { q, rank })
    }

    pub fn backend(&self) -> Backend {
        match self {
            Object::Set(_) => Backend::Finset,
            Object::Graph(_) => Backend::Fingraph,
            Object::Module { q, .. } => Backend::Finmod { q: *q },
        }
    }

    /// Size used in reports: element count, vertices plus arrows, or rank.
    pub fn size(&self) -> usize {
        match self {
            Object::Set(n) => *n,
            Object::Graph(g) => g.vertices + g.arrows(),
            Object::Module { rank, .. } => *rank,
        }
    }

    pub fn as_set(&self) -> Option<usize> {
        match self {
            Object::Set(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<&Graph> {
        match self {
            Object::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_module(&self) -> Option<(u32, usize)> {
        match self {
            Object::Module { q, rank } => Some((*q, *rank)),
            _ => None,
        }
    }

    /// All vectors of a module in lexicographic order.
    pub fn module_elements(&self, cap: HomCap) -> Result<Vec<Vec<u32>>> {
        let (q, rank) = self
            .as_module()
            .ok_or_else(|| Error::BackendMismatch("module elements requested from a non-module".into()))?;
        let count = (q as u128).checked_pow(rank as u32).unwrap_or(u128::MAX);
        cap.check(count)?;
        let mut out = Vec::with_capacity(count as usize);
        let mut v = vec![0u32; rank];
        loop {
            out.push(v.clone());
            let mut i = rank;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                v[i] += 1;
                if v[i] < q {
                    break;
                }
                v[i] = 0;
            }
        }
    }
}

/// Component data of a morphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MorphData {
    Set(Vec<usize>),
    Graph { vmap: Vec<usize>, amap: Vec<usize> },
    Module(Matrix),
}

/// A morphism of a base category, validated at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MorphismRepr", into = "MorphismRepr")]
pub struct Morphism {
    dom: Object,
    cod: Object,
    data: MorphData,
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    dom: Object,
    cod: Object,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vmap: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amap: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<u32>>>,
}

impl TryFrom<MorphismRepr> for Morphism {
    type Error = Error;

    fn try_from(r: MorphismRepr) -> Result<Self> {
        let data = match (&r.dom, r.map, r.vmap, r.amap, r.matrix) {
            (Object::Set(_), Some(map), None, None, None) => MorphData::Set(map),
            (Object::Graph(_), None, Some(vmap), Some(amap), None) => MorphData::Graph { vmap, amap },
            (Object::Module { .. }, None, None, None, Some(rows)) => {
                let (rr, cc) = match (&r.cod, &r.dom) {
                    (Object::Module { rank: a, .. }, Object::Module { rank: b, .. }) => (*a, *b),
                    _ => return Err(Error::BackendMismatch("matrix between non-modules".into())),
                };
                let m = Matrix::from_rows(rr, cc, &rows)
                    .ok_or_else(|| Error::InvalidMorphism(format!("matrix must have shape {rr}x{cc}")))?;
                MorphData::Module(m)
            }
            _ => return Err(Error::InvalidMorphism("morphism data does not match the backend".into())),
        };
        Morphism::new(r.dom, r.cod, data)
    }
}

impl From<Morphism> for MorphismRepr {
    fn from(m: Morphism) -> Self {
        let mut r = MorphismRepr { dom: m.dom, cod: m.cod, map: None, vmap: None, amap: None, matrix: None };
        match m.data {
            MorphData::Set(map) => r.map = Some(map),
            MorphData::Graph { vmap, amap } => {
                r.vmap = Some(vmap);
                r.amap = Some(amap);
            }
            MorphData::Module(mat) => r.matrix = Some(mat.to_rows()),
        }
        r
    }
}

impl Morphism {
    pub fn new(dom: Object, cod: Object, data: MorphData) -> Result<Self> {
        match (&dom, &cod, &data) {
            (Object::Set(n), Object::Set(m), MorphData::Set(map)) => {
                if map.len() != *n {
                    return Err(Error::InvalidMorphism(format!(
                        "map has {} entries for a {n}-element domain",
                        map.len()
                    )));
                }
                if let Some(&x) = map.iter().find(|&&x| x >= *m) {
                    return Err(Error::InvalidMorphism(format!("image {x} outside a {m}-element codomain")));
                }
            }
            (Object::Graph(a), Object::Graph(b), MorphData::Graph { vmap, amap }) => {
                if vmap.len() != a.vertices || amap.len() != a.arrows() {
                    return Err(Error::InvalidMorphism("vertex or arrow map has the wrong length".into()));
                }
                if vmap.iter().any(|&v| v >= b.vertices) || amap.iter().any(|&e| e >= b.arrows()) {
                    return Err(Error::InvalidMorphism("graph map leaves its codomain".into()));
                }
                for (e, &fe) in amap.iter().enumerate() {
                    if b.src[fe] != vmap[a.src[e]] || b.tgt[fe] != vmap[a.tgt[e]] {
                        return Err(Error::InvalidMorphism(format!("arrow {e} is not sent to a compatible arrow")));
                    }
                }
            }
            (Object::Module { q: q1, rank: r1 }, Object::Module { q: q2, rank: r2 }, MorphData::Module(m)) => {
                if q1 != q2 {
                    return Err(Error::BackendMismatch(format!("moduli {q1} and {q2}")));
                }
                if m.rows() != *r2 || m.cols() != *r1 {
                    return Err(Error::InvalidMorphism(format!("matrix must have shape {r2}x{r1}")));
                }
                if m.entries().iter().any(|&x| x >= *q1) {
                    return Err(Error::InvalidMorphism(format!("matrix entry not reduced mod {q1}")));
                }
            }
            _ => {
                return Err(Error::BackendMismatch(format!(
                    "{} -> {} with {} data",
                    dom.backend().name(),
                    cod.backend().name(),
                    match data {
                        MorphData::Set(_) => "finset",
                        MorphData::Graph { .. } => "fingraph",
                        MorphData::Module(_) => "finmod",
                    }
                )))
            }
        }
        Ok(Morphism { dom, cod, data })
    }

    /// Convenience constructor for finite-set maps.
    pub fn set_map(dom: usize, cod: usize, map: Vec<usize>) -> Result<Self> {
        Morphism::new(Object::Set(dom), Object::Set(cod), MorphData::Set(map))
    }

    pub fn identity(x: &Object) -> Self {
        let data = match x {
            Object::Set(n) => MorphData::Set((0..*n).collect()),
            Object::Graph(g) => MorphData::Graph { vmap: (0..g.vertices).collect(), amap: (0..g.arrows()).collect() },
            Object::Module { rank, .. } => MorphData::Module(Matrix::identity(*rank)),
        };
        Morphism { dom: x.clone(), cod: x.clone(), data }
    }

    /// The unique morphism out of an initial object.
    pub fn from_initial(x: &Object) -> Self {
        let init = x.backend().initial();
        let data = match x {
            Object::Set(_) => MorphData::Set(Vec::new()),
            Object::Graph(_) => MorphData::Graph { vmap: Vec::new(), amap: Vec::new() },
            Object::Module { rank, .. } => MorphData::Module(Matrix::zeros(*rank, 0)),
        };
        Morphism { dom: init, cod: x.clone(), data }
    }

    pub fn dom(&self) -> &Object {
        &self.dom
    }

    pub fn cod(&self) -> &Object {
        &self.cod
    }

    pub fn data(&self) -> &MorphData {
        &self.data
    }

    pub fn backend(&self) -> Backend {
        self.dom.backend()
    }

    pub fn as_set(&self) -> Option<&[usize]> {
        match &self.data {
            MorphData::Set(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<(&[usize], &[usize])> {
        match &self.data {
            MorphData::Graph { vmap, amap } => Some((vmap, amap)),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix> {
        match &self.data {
            MorphData::Module(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && *self == Morphism::identity(&self.dom)
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &Morphism) -> Result<Morphism> {
        compose(self, f)
    }
}

/// `g ∘ f`.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if f.cod != g.dom {
        return Err(Error::DomainMismatch(format!("cannot compose through {:?} and {:?}", f.cod, g.dom)));
    }
    let data = match (&g.data, &f.data) {
        (MorphData::Set(gm), MorphData::Set(fm)) => MorphData::Set(fm.iter().map(|&x| gm[x]).collect()),
        (MorphData::Graph { vmap: gv, amap: ga }, MorphData::Graph { vmap: fv, amap: fa }) => {
            MorphData::Graph { vmap: fv.iter().map(|&x| gv[x]).collect(), amap: fa.iter().map(|&x| ga[x]).collect() }
        }
        (MorphData::Module(gm), MorphData::Module(fm)) => {
            let q = match f.dom {
                Object::Module { q, .. } => q,
                _ => unreachable!("module data on a non-module"),
            };
            MorphData::Module(gm.mul(fm, q))
        }
        _ => return Err(Error::BackendMismatch("composing morphisms of different backends".into())),
    };
    Ok(Morphism { dom: f.dom.clone(), cod: g.cod.clone(), data })
}

/// Composite of a path given first-to-last.
pub fn compose_all(path: &[&Morphism]) -> Result<Morphism> {
    let (first, rest) = path.split_first().ok_or_else(|| Error::InvalidMorphism("empty composite".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, m| compose(m, &acc))
}

fn invert_perm(map: &[usize], n: usize) -> Option<Vec<usize>> {
    if map.len() != n {
        return None;
    }
    let mut inv = vec![usize::MAX; n];
    for (i, &x) in map.iter().enumerate() {
        if inv[x] != usize::MAX {
            return None;
        }
        inv[x] = i;
    }
    Some(inv)
}

/// The two-sided inverse of `f`, if any.
pub fn is_iso(f: &Morphism) -> Option<Morphism> {
    let data = match (&f.dom, &f.cod, &f.data) {
        (Object::Set(_), Object::Set(m), MorphData::Set(map)) => MorphData::Set(invert_perm(map, *m)?),
        (Object::Graph(_), Object::Graph(b), MorphData::Graph { vmap, amap }) => {
            MorphData::Graph { vmap: invert_perm(vmap, b.vertices)?, amap: invert_perm(amap, b.arrows())? }
        }
        (Object::Module { q, .. }, Object::Module { .. }, MorphData::Module(m)) => MorphData::Module(m.inverse(*q)?),
        _ => return None,
    };
    Some(Morphism { dom: f.cod.clone(), cod: f.dom.clone(), data })
}

fn descend(q: &[usize], m: &[usize], n: usize, what: &str) -> Result<Vec<usize>> {
    let mut out = vec![usize::MAX; n];
    for (a, &b) in q.iter().enumerate() {
        if out[b] == usize::MAX {
            out[b] = m[a];
        } else if out[b] != m[a] {
            return Err(Error::Internal(format!("{what} {b} has preimages with different images")));
        }
    }
    if out.contains(&usize::MAX) {
        return Err(Error::Internal(format!("projection is not surjective on {what}s")));
    }
    Ok(out)
}

/// The unique `n` with `n ∘ q = m`, for `q` an epimorphism. Well-definedness
/// is checked on every preimage; failure is an internal error.
pub fn factor_through_epi(q: &Morphism, m: &Morphism) -> Result<Morphism> {
    if q.dom != m.dom {
        return Err(Error::DomainMismatch("epi and map have different domains".into()));
    }
    let data = match (&q.cod, &q.data, &m.data) {
        (Object::Set(n), MorphData::Set(qm), MorphData::Set(mm)) => MorphData::Set(descend(qm, mm, *n, "element")?),
        (Object::Graph(g), MorphData::Graph { vmap: qv, amap: qa }, MorphData::Graph { vmap: mv, amap: ma }) => {
            MorphData::Graph {
                vmap: descend(qv, mv, g.vertices, "vertex")?,
                amap: descend(qa, ma, g.arrows(), "arrow")?,
            }
        }
        (Object::Module { q: p, .. }, MorphData::Module(qm), MorphData::Module(mm)) => {
            let s = qm.right_inverse(*p).ok_or_else(|| Error::Internal("projection is not surjective".into()))?;
            let n = mm.mul(&s, *p);
            if n.mul(qm, *p) != *mm {
                return Err(Error::Internal("map does not vanish on the kernel of the projection".into()));
            }
            MorphData::Module(n)
        }
        _ => return Err(Error::BackendMismatch("factoring across backends".into())),
    };
    Morphism::new(q.cod.clone(), m.cod.clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unit() {
        let f = Morphism::set_map(2, 3, vec![2, 0]).unwrap();
        assert_eq!(compose(&Morphism::identity(&Object::Set(3)), &f).unwrap(), f);
        assert_eq!(compose(&f, &Morphism::identity(&Object::Set(2))).unwrap(), f);
    }

    #[test]
    fn swap_composition() {
        let a = Morphism::set_map(2, 2, vec![0, 1]).unwrap();
        let b = Morphism::set_map(2, 2, vec![1, 0]).unwrap();
        assert_eq!(compose(&a, &b).unwrap().as_set().unwrap(), &[1, 0]);
    }

    #[test]
    fn domain_mismatch() {
        let f = Morphism::set_map(2, 3, vec![0, 1]).unwrap();
        assert!(matches!(compose(&f, &f), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn module_product_matches_basis_images() {
        let q = 5;
        let x = Object::module(q, 2).unwrap();
        let m = Morphism::new(
            x.clone(),
            x.clone(),
            MorphData::Module(Matrix::from_rows(2, 2, &[vec![1, 2], vec![3, 4]]).unwrap()),
        )
        .unwrap();
        let n = Morphism::new(
            x.clone(),
            x.clone(),
            MorphData::Module(Matrix::from_rows(2, 2, &[vec![0, 4], vec![2, 2]]).unwrap()),
        )
        .unwrap();
        let mn = compose(&m, &n).unwrap();
        // independent route: push each basis vector through n, then m
        for e in 0..2 {
            let basis: Vec<u32> = (0..2).map(|i| u32::from(i == e)).collect();
            let via = m.as_matrix().unwrap().apply(&n.as_matrix().unwrap().apply(&basis, q), q);
            assert_eq!(mn.as_matrix().unwrap().column(e), via);
        }
    }

    #[test]
    fn iso_detection() {
        let x = Object::Set(2);
        assert_eq!(is_iso(&Morphism::identity(&x)), Some(Morphism::identity(&x)));
        let swap = Morphism::set_map(2, 2, vec![1, 0]).unwrap();
        assert_eq!(is_iso(&swap), Some(swap.clone()));
        assert_eq!(is_iso(&Morphism::set_map(2, 1, vec![0, 0]).unwrap()), None);
    }

    #[test]
    fn graph_morphism_validation() {
        let edge = Object::graph(2, vec![0], vec![1]).unwrap();
        let loop_ = Object::graph(1, vec![0], vec![0]).unwrap();
        let collapse = Morphism::new(edge.clone(), loop_.clone(), MorphData::Graph { vmap: vec![0, 0], amap: vec![0] });
        assert!(collapse.is_ok());
        let bad = Morphism::new(loop_, edge, MorphData::Graph { vmap: vec![0], amap: vec![0] });
        assert!(bad.is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = Object::graph(2, vec![0, 1], vec![1, 1]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"backend":"fingraph","vertices":2,"arrows":2,"src":[0,1],"tgt":[1,1]}"#);
        assert_eq!(serde_json::from_str::<Object>(&s).unwrap(), g);
        let f = Morphism::set_map(1, 2, vec![1]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"dom":{"backend":"finset","size":1},"cod":{"backend":"finset","size":2},"map":[1]}"#);
        assert_eq!(serde_json::from_str::<Morphism>(&s).unwrap(), f);
        let bad = r#"{"dom":{"backend":"finset","size":1},"cod":{"backend":"finset","size":2},"map":[2]}"#;
        assert!(serde_json::from_str::<Morphism>(bad).is_err());
        let nonprime = r#"{"backend":"finmod","q":4,"rank":1}"#;
        assert!(serde_json::from_str::<Object>(nonprime).is_err());
    }

    #[test]
    fn factor_through_projection() {
        let q = Morphism::set_map(3, 2, vec![0, 1, 1]).unwrap();
        let m = Morphism::set_map(3, 4, vec![3, 2, 2]).unwrap();
        let n = factor_through_epi(&q, &m).unwrap();
        assert_eq!(compose(&n, &q).unwrap(), m);
        let bad = Morphism::set_map(3, 4, vec![3, 2, 1]).unwrap();
        assert!(matches!(factor_through_epi(&q, &bad), Err(Error::Internal(_))));
    }
}
