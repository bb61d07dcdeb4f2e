//! Closed forms for the worked examples, independent of the engine, and
//! comparison of engine output against them.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::arrows::{Arrow, Factored, Factorisation, Problem, Square};
use crate::error::{Error, Result};
use crate::fincat::{compose, HomCap, Matrix, MorphData, Morphism, Object};
use crate::freeseq::FreeSequence;
use crate::onestep::OneStep;

fn set_size(o: &Object) -> Result<usize> {
    o.as_set().ok_or_else(|| Error::BackendMismatch("closed form is for finite sets".into()))
}

fn set_map(m: &Morphism) -> Result<&[usize]> {
    m.as_set().ok_or_else(|| Error::BackendMismatch("closed form is for finite sets".into()))
}

/// `X → X + Y → Y` with `λ = in₁`, `ρ = ⟨g, 1⟩`, `σ = ⟨in₁, in₃⟩`,
/// `π = ⟨in₁, in₂, in₂⟩`: the n.w.f.s. generated by `0 → 1`.
#[derive(Default)]
pub struct SplitEpiOracle;

impl Factorisation for SplitEpiOracle {
    fn label(&self) -> String {
        "split-epi closed form".into()
    }

    fn factor(&self, g: &Arrow) -> Result<Arc<Factored>> {
        let (c, d) = (set_size(g.dom())?, set_size(g.cod())?);
        let lambda = Morphism::set_map(c, c + d, (0..c).collect())?;
        let rho = Morphism::set_map(c + d, d, set_map(g.mor())?.iter().copied().chain(0..d).collect())?;
        Ok(Arc::new(Factored { lambda, rho }))
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        let (c, d) = (set_size(sq.src().dom())?, set_size(sq.src().cod())?);
        let (c2, d2) = (set_size(sq.tgt().dom())?, set_size(sq.tgt().cod())?);
        let (h, k) = (set_map(sq.h())?, set_map(sq.k())?);
        Morphism::set_map(c + d, c2 + d2, h.iter().copied().chain(k.iter().map(|&y| c2 + y)).collect())
    }

    fn has_comult(&self) -> bool {
        true
    }

    fn has_mult(&self) -> bool {
        true
    }

    fn comult(&self, g: &Arrow) -> Result<Morphism> {
        let (c, d) = (set_size(g.dom())?, set_size(g.cod())?);
        Morphism::set_map(c + d, c + c + d, (0..c).chain((0..d).map(|y| 2 * c + y)).collect())
    }

    fn mult(&self, g: &Arrow) -> Result<Morphism> {
        let (c, d) = (set_size(g.dom())?, set_size(g.cod())?);
        Morphism::set_map(c + 2 * d, c + d, (0..c + d).chain((0..d).map(|y| c + y)).collect())
    }
}

/// An element of a truncated carrier: a head and a sequence.
pub type Label = (usize, Vec<usize>);

/// A truncated closed-form carrier, one label list per sort (elements for
/// sets; vertices then arrows for graphs).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedOracle {
    pub labels: Vec<Vec<Label>>,
    #[serde(skip)]
    index: Vec<HashMap<Label, usize>>,
    pub carrier: Object,
    pub lambda: Morphism,
    pub rho: Morphism,
}

impl TruncatedOracle {
    fn build(labels: Vec<Vec<Label>>, carrier: Object, lambda: Morphism, rho: Morphism) -> Self {
        let index = labels.iter().map(|ls| ls.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()).collect();
        TruncatedOracle { labels, index, carrier, lambda, rho }
    }

    pub fn size(&self) -> usize {
        self.carrier.size()
    }

    pub fn position(&self, sort: usize, label: &Label) -> Option<usize> {
        self.index[sort].get(label).copied()
    }

    fn set_oracle(labels: Vec<Label>, x: usize, d: usize, rho: impl Fn(&Label) -> usize) -> Result<Self> {
        let index: HashMap<Label, usize> = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let lambda = Morphism::set_map(x, labels.len(), (0..x).map(|i| index[&(i, vec![])]).collect())?;
        let rho = Morphism::set_map(labels.len(), d, labels.iter().map(rho).collect())?;
        Ok(TruncatedOracle::build(vec![labels], Object::Set(lambda.cod().size()), lambda, rho))
    }
}

fn words(alphabet: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..alphabet {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `X × Y*` truncated to sequences of length at most `n`.
pub fn oracle_cosection(g: &Arrow, n: usize) -> Result<TruncatedOracle> {
    let (c, d) = (set_size(g.dom())?, set_size(g.cod())?);
    let gm = set_map(g.mor())?.to_vec();
    let labels: Vec<Label> = (0..c).flat_map(|x| words(d, n).into_iter().map(move |ys| (x, ys))).collect();
    TruncatedOracle::set_oracle(labels, c, d, |(x, ys)| ys.last().copied().unwrap_or(gm[*x]))
}

/// `σ(x, y₁…y_k) = (x, (x, y₁), (x, y₁, y₂), …, (x, y₁…y_k))`: a list of prefixes.
pub fn cosection_sigma(label: &Label) -> (usize, Vec<Label>) {
    let (x, ys) = label;
    (*x, (1..=ys.len()).map(|k| (*x, ys[..k].to_vec())).collect())
}

/// `π((x, ys), zs) = (x, ys ++ zs)`, or `None` past the truncation.
pub fn cosection_pi(inner: &Label, tail: &[usize], n: usize) -> Option<Label> {
    let mut ys = inner.1.clone();
    ys.extend_from_slice(tail);
    (ys.len() <= n).then_some((inner.0, ys))
}

/// `(X + Y) × Y*` truncated to sequences of length at most `n`; heads
/// `x < |X|` stand for `X`, the rest for `Y`.
pub fn oracle_both(g: &Arrow, n: usize) -> Result<TruncatedOracle> {
    both_filtered(g, |_, ys| ys.len() <= n, n)
}

/// The same carrier cut by depth: `|ys|` after an `X` head, `1 + |ys|` after a `Y` head.
pub fn oracle_both_depth(g: &Arrow, n: usize) -> Result<TruncatedOracle> {
    let c = set_size(g.dom())?;
    both_filtered(g, move |head, ys| ys.len() + usize::from(head >= c) <= n, n)
}

fn both_filtered(g: &Arrow, keep: impl Fn(usize, &[usize]) -> bool, n: usize) -> Result<TruncatedOracle> {
    let (c, d) = (set_size(g.dom())?, set_size(g.cod())?);
    let gm = set_map(g.mor())?.to_vec();
    let labels: Vec<Label> = (0..c + d)
        .flat_map(|h| words(d, n).into_iter().map(move |ys| (h, ys)))
        .filter(|(h, ys)| keep(*h, ys))
        .collect();
    TruncatedOracle::set_oracle(labels, c, d, |(h, ys)| match ys.last() {
        Some(&y) => y,
        None if *h < c => gm[*h],
        None => h - c,
    })
}

/// Vertices `(x, b₁…b_m)` for paths in Y from `f(x)` with `m ≤ n`; arrows
/// `(a, [])` for arrows of X and `(x, b₁…b_m)` with `1 ≤ m ≤ n`.
pub fn oracle_graph(f: &Arrow, n: usize) -> Result<TruncatedOracle> {
    let (Some(x), Some(y), Some((vmap, amap))) = (f.dom().as_graph(), f.cod().as_graph(), f.mor().as_graph()) else {
        return Err(Error::BackendMismatch("graph closed form needs a graph arrow".into()));
    };
    let mut vertices: Vec<Label> = Vec::new();
    let mut seqs: Vec<Label> = Vec::new();
    for v in 0..x.vertices() {
        let mut layer = vec![(Vec::new(), vmap[v])];
        vertices.push((v, Vec::new()));
        for _ in 0..n {
            let mut next = Vec::new();
            for (path, end) in &layer {
                for b in (0..y.arrows()).filter(|&b| y.src()[b] == *end) {
                    let mut p: Vec<usize> = path.clone();
                    p.push(b);
                    vertices.push((v, p.clone()));
                    seqs.push((v, p.clone()));
                    next.push((p, y.tgt()[b]));
                }
            }
            layer = next;
        }
    }
    let mut arrows: Vec<Label> = (0..x.arrows()).map(|a| (a, Vec::new())).collect();
    arrows.extend(seqs);
    let vindex: HashMap<Label, usize> = vertices.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let (mut src, mut tgt) = (Vec::new(), Vec::new());
    for (h, path) in &arrows {
        if path.is_empty() {
            src.push(vindex[&(x.src()[*h], vec![])]);
            tgt.push(vindex[&(x.tgt()[*h], vec![])]);
        } else {
            src.push(vindex[&(*h, path[..path.len() - 1].to_vec())]);
            tgt.push(vindex[&(*h, path.clone())]);
        }
    }
    let carrier = Object::graph(vertices.len(), src, tgt)?;
    let vertex_end = |(v, path): &Label| path.last().map_or(vmap[*v], |&b| y.tgt()[b]);
    let rho_v = vertices.iter().map(vertex_end).collect();
    let rho_a = arrows.iter().map(|(h, path)| path.last().copied().unwrap_or_else(|| amap[*h])).collect();
    let lambda = Morphism::new(
        f.dom().clone(),
        carrier.clone(),
        MorphData::Graph {
            vmap: (0..x.vertices()).map(|v| vindex[&(v, vec![])]).collect(),
            amap: (0..x.arrows()).collect(),
        },
    )?;
    let rho = Morphism::new(carrier.clone(), f.cod().clone(), MorphData::Graph { vmap: rho_v, amap: rho_a })?;
    Ok(TruncatedOracle::build(vec![vertices, arrows], carrier, lambda, rho))
}

/// `M → M ⊕ F|N| → N` for `0 → R` over ℤ/q, with σ and π.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModOracle {
    pub factored: Factored,
    pub sigma: Morphism,
    pub pi: Morphism,
}

fn element_index(v: &[u32], q: u32) -> usize {
    v.iter().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

pub fn oracle_mod(g: &Arrow, cap: HomCap) -> Result<ModOracle> {
    let (Some((q, m)), Some((_, r))) = (g.dom().as_module(), g.cod().as_module()) else {
        return Err(Error::BackendMismatch("module closed form needs a module arrow".into()));
    };
    let gm = g.mor().as_matrix().expect("module arrow");
    let elems = g.cod().module_elements(cap)?;
    let k = elems.len();
    let e = Object::module(q, m + k)?;
    let mut lambda = Matrix::zeros(m + k, m);
    for i in 0..m {
        lambda.set(i, i, 1);
    }
    let mut rho = Matrix::zeros(r, m + k);
    for i in 0..r {
        for j in 0..m {
            rho.set(i, j, gm.get(i, j));
        }
        for (n, v) in elems.iter().enumerate() {
            rho.set(i, m + n, v[i]);
        }
    }
    // σ(0, x_n) = (0, x_{x_n}) inside E(λ) = M ⊕ F|Ef|
    let ef = (q as u128).checked_pow((m + k) as u32).unwrap_or(u128::MAX);
    cap.check(ef)?;
    let ef = ef as usize;
    let mut sigma = Matrix::zeros(m + ef, m + k);
    for i in 0..m {
        sigma.set(i, i, 1);
    }
    for n in 0..k {
        let mut basis = vec![0u32; m + k];
        basis[m + n] = 1;
        sigma.set(m + element_index(&basis, q), m + n, 1);
    }
    // π: E(ρ) = Ef ⊕ F|N| → Ef, (e, x_n) ↦ e + (0, x_n)
    let mut pi = Matrix::zeros(m + k, m + 2 * k);
    for i in 0..m + k {
        pi.set(i, i, 1);
    }
    for n in 0..k {
        pi.set(m + n, m + k + n, 1);
    }
    let mor = |d: &Object, c: &Object, a: Matrix| Morphism::new(d.clone(), c.clone(), MorphData::Module(a));
    let factored = Factored { lambda: mor(g.dom(), &e, lambda)?, rho: mor(&e, g.cod(), rho)? };
    Ok(ModOracle {
        sigma: mor(&e, &Object::module(q, m + ef)?, sigma)?,
        pi: mor(&Object::module(q, m + 2 * k)?, &e, pi)?,
        factored,
    })
}

/// [`oracle_mod`] as a factorisation, so its σ and π can be law-checked
/// and compared directly. `E(h, k) = h ⊕ F(k)`.
pub struct ModClosedForm {
    pub cap: HomCap,
}

impl Factorisation for ModClosedForm {
    fn label(&self) -> String {
        "module closed form".into()
    }

    fn factor(&self, g: &Arrow) -> Result<Arc<Factored>> {
        Ok(Arc::new(oracle_mod(g, self.cap)?.factored))
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        let (e1, e2) = (self.factor(sq.src())?, self.factor(sq.tgt())?);
        let (Some((q, m1)), Some((_, m2))) = (sq.src().dom().as_module(), sq.tgt().dom().as_module()) else {
            return Err(Error::BackendMismatch("module closed form needs module arrows".into()));
        };
        let (h, k) = (sq.h().as_matrix().expect("module square"), sq.k().as_matrix().expect("module square"));
        let elems = sq.src().cod().module_elements(self.cap)?;
        let mut a = Matrix::zeros(e2.mid().size(), e1.mid().size());
        for i in 0..m2 {
            for j in 0..m1 {
                a.set(i, j, h.get(i, j));
            }
        }
        for (n, v) in elems.iter().enumerate() {
            a.set(m2 + element_index(&k.apply(v, q), q), m1 + n, 1);
        }
        Morphism::new(e1.mid().clone(), e2.mid().clone(), MorphData::Module(a))
    }

    fn has_comult(&self) -> bool {
        true
    }

    fn has_mult(&self) -> bool {
        true
    }

    fn comult(&self, g: &Arrow) -> Result<Morphism> {
        Ok(oracle_mod(g, self.cap)?.sigma)
    }

    fn mult(&self, g: &Arrow) -> Result<Morphism> {
        Ok(oracle_mod(g, self.cap)?.pi)
    }
}

/// Outcome of an engine-versus-closed-form comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iso: Option<Morphism>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
}

impl Comparison {
    fn pass(iso: Morphism) -> Self {
        Comparison { passed: true, iso: Some(iso), obstruction: None }
    }

    fn fail(why: impl Into<String>) -> Self {
        Comparison { passed: false, iso: None, obstruction: Some(why.into()) }
    }
}

fn sort_sizes(o: &Object) -> Vec<usize> {
    match o {
        Object::Set(n) => vec![*n],
        Object::Graph(g) => vec![g.vertices(), g.arrows()],
        Object::Module { .. } => Vec::new(),
    }
}

fn component(m: &Morphism, sort: usize) -> &[usize] {
    match m.data() {
        MorphData::Set(v) => v,
        MorphData::Graph { vmap, amap } => [vmap, amap][sort],
        MorphData::Module(_) => &[],
    }
}

fn ends(o: &Object) -> Option<(&[usize], &[usize])> {
    o.as_graph().map(|g| (g.src(), g.tgt()))
}

/// Search for an isomorphism `E_engine → E_oracle` commuting with λ and ρ.
/// Modules are compared for equality of representatives.
pub fn find_iso(engine: &Factored, oracle: &Factored, cap: HomCap) -> Result<Comparison> {
    let (e, o) = (engine.mid(), oracle.mid());
    if e.backend() != o.backend() {
        return Ok(Comparison::fail("different backends"));
    }
    if let Object::Module { .. } = e {
        return Ok(if engine == oracle {
            Comparison::pass(Morphism::identity(e))
        } else if e != o {
            Comparison::fail(format!("ranks differ: {} vs {}", e.size(), o.size()))
        } else {
            Comparison::fail("module representatives differ")
        });
    }
    let (es, os) = (sort_sizes(e), sort_sizes(o));
    if es != os {
        return Ok(Comparison::fail(format!("sizes differ: {es:?} vs {os:?}")));
    }
    let mut search = IsoSearch {
        engine,
        oracle,
        budget: cap.0,
        maps: es.iter().map(|&n| vec![usize::MAX; n]).collect(),
        maps_used: es.iter().map(|&n| vec![false; n]).collect(),
    };
    for s in 0..es.len() {
        for (&a, &b) in component(&engine.lambda, s).iter().zip(component(&oracle.lambda, s)) {
            if search.maps[s][a] != usize::MAX && search.maps[s][a] != b {
                return Ok(Comparison::fail("λ identifies elements differently"));
            }
            search.maps[s][a] = b;
            search.maps_used[s][b] = true;
        }
    }
    if search.run(0, 0)? {
        let data = match e {
            Object::Set(_) => MorphData::Set(search.maps[0].clone()),
            _ => MorphData::Graph { vmap: search.maps[0].clone(), amap: search.maps[1].clone() },
        };
        let iso = Morphism::new(e.clone(), o.clone(), data)?;
        Ok(Comparison::pass(iso))
    } else {
        Ok(Comparison::fail("no isomorphism commutes with λ and ρ"))
    }
}

struct IsoSearch<'a> {
    engine: &'a Factored,
    oracle: &'a Factored,
    budget: u128,
    maps: Vec<Vec<usize>>,
    maps_used: Vec<Vec<bool>>,
}

impl IsoSearch<'_> {
    fn consistent_arrow(&self, a: usize, b: usize) -> bool {
        let (Some((es, et)), Some((os, ot))) = (ends(self.engine.mid()), ends(self.oracle.mid())) else {
            return true;
        };
        let (vs, vt) = (self.maps[0][es[a]], self.maps[0][et[a]]);
        (vs == usize::MAX || vs == os[b]) && (vt == usize::MAX || vt == ot[b])
    }

    fn run(&mut self, sort: usize, i: usize) -> Result<bool> {
        if sort == self.maps.len() {
            return Ok(true);
        }
        if i == self.maps[sort].len() {
            return self.run(sort + 1, 0);
        }
        if self.maps[sort][i] != usize::MAX {
            if sort == 1 && !self.consistent_arrow(i, self.maps[1][i]) {
                return Ok(false);
            }
            return self.run(sort, i + 1);
        }
        let target = component(&self.engine.rho, sort)[i];
        let orho = component(&self.oracle.rho, sort);
        for b in 0..self.maps_used[sort].len() {
            if self.maps_used[sort][b] || orho[b] != target || (sort == 1 && !self.consistent_arrow(i, b)) {
                continue;
            }
            if self.budget == 0 {
                return Err(Error::CapExceeded { cardinality: u128::MAX, cap: 0 });
            }
            self.budget -= 1;
            self.maps[sort][i] = b;
            self.maps_used[sort][b] = true;
            if self.run(sort, i + 1)? {
                return Ok(true);
            }
            self.maps[sort][i] = usize::MAX;
            self.maps_used[sort][b] = false;
        }
        Ok(false)
    }
}

/// Compare `stage` at `f` with a closed form through an iso search.
pub fn compare(stage: &dyn Factorisation, f: &Arrow, oracle: &Factored, cap: HomCap) -> Result<Comparison> {
    find_iso(stage.factor(f)?.as_ref(), oracle, cap)
}

/// Compare two full n.w.f.s. at `f`. An iso `φ` at `f` is found first;
/// isos at `Lf` and `Rf` are then searched relative to `φ`, and σ and π
/// must commute with them. The searches take the first iso found, so this
/// is exact only where the isos are unique (λ pins them in every closed
/// form used here).
pub fn compare_nwfs(
    engine: &dyn Factorisation,
    oracle: &dyn Factorisation,
    f: &Arrow,
    cap: HomCap,
) -> Result<Comparison> {
    let (ef, of) = (engine.factor(f)?, oracle.factor(f)?);
    let at_f = find_iso(&ef, &of, cap)?;
    let Some(phi) = at_f.iso.clone() else {
        return Ok(at_f);
    };
    let phi_inv = crate::fincat::is_iso(&phi).ok_or_else(|| Error::Internal("found iso is not invertible".into()))?;
    if engine.has_comult() && oracle.has_comult() {
        let el = engine.factor(&ef.left())?;
        let moved = Factored { lambda: el.lambda.clone(), rho: compose(&phi, &el.rho)? };
        let Some(psi) = find_iso(&moved, oracle.factor(&of.left())?.as_ref(), cap)?.iso else {
            return Ok(Comparison::fail("no isomorphism at Lf"));
        };
        if compose(&psi, &engine.comult(f)?)? != compose(&oracle.comult(f)?, &phi)? {
            return Ok(Comparison::fail("σ does not commute with the isomorphisms"));
        }
    }
    if engine.has_mult() && oracle.has_mult() {
        let er = engine.factor(&ef.right())?;
        let moved = Factored { lambda: compose(&er.lambda, &phi_inv)?, rho: er.rho.clone() };
        let Some(chi) = find_iso(&moved, oracle.factor(&of.right())?.as_ref(), cap)?.iso else {
            return Ok(Comparison::fail("no isomorphism at Rf"));
        };
        if compose(&phi, &engine.mult(f)?)? != compose(&oracle.mult(f)?, &chi)? {
            return Ok(Comparison::fail("π does not commute with the isomorphisms"));
        }
    }
    Ok(Comparison::pass(phi))
}

/// How a generator cell is read in a closed form: the label of cell element
/// `b` (of sort `sort`, outside the image of the generator) for problem `x`.
pub type CellReading<'a> = dyn Fn(&Problem, usize, usize, &dyn Fn(usize, usize) -> Label) -> Label + 'a;

/// `in₁`: the free point of `1 + 1` extends the sequence by `k(1)`.
/// `0 → 1`: the point starts a sequence at `k(0)`, i.e. head `|X| + k(0)`.
pub fn set_cells(x_size: usize) -> impl Fn(&Problem, usize, usize, &dyn Fn(usize, usize) -> Label) -> Label {
    move |p, _sort, b, dom| {
        let k = p.square.k().as_set().expect("finite-set square");
        if p.square.h().dom().size() == 0 {
            (x_size + k[b], Vec::new())
        } else {
            let (head, mut ys) = dom(0, p.square.h().as_set().expect("finite-set square")[0]);
            ys.push(k[b]);
            (head, ys)
        }
    }
}

/// The edge cell extends the path at the glued vertex by the chosen arrow.
pub fn graph_cells(p: &Problem, _sort: usize, _b: usize, dom: &dyn Fn(usize, usize) -> Label) -> Label {
    let (vmap, _) = p.square.h().as_graph().expect("graph square");
    let (_, amap) = p.square.k().as_graph().expect("graph square");
    let (head, mut path) = dom(0, vmap[0]);
    path.push(amap[0]);
    (head, path)
}

/// Read every element of `E¹g` as a label, given the labels of `dom g`.
fn read_one_step(t: &OneStep, g: &Arrow, dom: &[Vec<Label>], cells: &CellReading<'_>) -> Result<Vec<Vec<Label>>> {
    let one = t.one_step_arrow(g)?;
    let k = t.k_apply_arrow(g)?;
    let mut out: Vec<Vec<Option<Label>>> = sort_sizes(&one.mid).iter().map(|&n| vec![None; n]).collect();
    let mut put = |sort: usize, e: usize, l: Label| -> Result<()> {
        match &out[sort][e] {
            Some(old) if *old != l => Err(Error::Internal(format!("element {e} read as {old:?} and {l:?}"))),
            _ => {
                out[sort][e] = Some(l);
                Ok(())
            }
        }
    };
    for (s, labels) in dom.iter().enumerate() {
        for (c, &e) in component(&one.lambda, s).iter().enumerate() {
            put(s, e, labels[c].clone())?;
        }
    }
    let glue = one.epsilon.k();
    let lookup = |s: usize, c: usize| dom[s][c].clone();
    for (x, p) in k.problems.iter().enumerate() {
        let f = t.generators().arrow(p.generator);
        let inj = k.injections[x].k();
        for s in 0..sort_sizes(f.cod()).len() {
            let image = component(f.mor(), s);
            for b in 0..sort_sizes(f.cod())[s] {
                let e = component(glue, s)[component(inj, s)[b]];
                let label = match image.iter().position(|&y| y == b) {
                    Some(a) => dom[s][component(p.square.h(), s)[a]].clone(),
                    None => cells(p, s, b, &lookup),
                };
                put(s, e, label)?;
            }
        }
    }
    out.into_iter()
        .map(|v| v.into_iter().map(|l| l.ok_or_else(|| Error::Internal("element not reached".into()))).collect())
        .collect()
}

/// Read stage `n` of the sequence at `f` through the closed form's labels
/// and check that the reading is an isomorphism onto `oracle` commuting
/// with λ, ρ and, for graphs, source and target.
pub fn interpret_stage(
    seq: &FreeSequence,
    f: &Arrow,
    n: usize,
    oracle: &TruncatedOracle,
    cells: &CellReading<'_>,
) -> Result<Comparison> {
    let t = seq.one_step();
    let base: Vec<Vec<Label>> =
        sort_sizes(f.dom()).iter().map(|&k| (0..k).map(|i| (i, Vec::new())).collect()).collect();
    let mut labels = base;
    for m in 1..=n {
        let g = if m == 1 { f.clone() } else { crate::arrows::FactorisationExt::right(seq.stage(m - 1)?.as_ref(), f)? };
        let read = read_one_step(t, &g, &labels, cells)?;
        labels = if m == 1 {
            read
        } else {
            let q = seq.stage(m)?.theta_into(f)?;
            let mut out: Vec<Vec<Option<Label>>> = sort_sizes(q.cod()).iter().map(|&k| vec![None; k]).collect();
            for (s, r) in read.into_iter().enumerate() {
                for (e, l) in r.into_iter().enumerate() {
                    let target = component(&q, s)[e];
                    match &out[s][target] {
                        Some(old) if *old != l => {
                            return Ok(Comparison::fail(format!("stage {m} identifies {old:?} with {l:?}")))
                        }
                        _ => out[s][target] = Some(l),
                    }
                }
            }
            out.into_iter().map(|v| v.into_iter().map(|l| l.expect("projection is onto")).collect()).collect()
        };
    }
    let fa = seq.stage(n)?.factor(f)?;
    let mut maps = Vec::new();
    for (s, ls) in labels.iter().enumerate() {
        if ls.len() != oracle.labels[s].len() {
            return Ok(Comparison::fail(format!("sort {s}: {} elements against {}", ls.len(), oracle.labels[s].len())));
        }
        let mut map = Vec::with_capacity(ls.len());
        for l in ls {
            match oracle.position(s, l) {
                Some(i) => map.push(i),
                None => return Ok(Comparison::fail(format!("{l:?} lies outside the truncation"))),
            }
        }
        let mut seen = vec![false; map.len()];
        for &i in &map {
            if std::mem::replace(&mut seen[i], true) {
                return Ok(Comparison::fail(format!("two elements read as {:?}", oracle.labels[s][i])));
            }
        }
        maps.push(map);
    }
    let data = match fa.mid() {
        Object::Set(_) => MorphData::Set(maps[0].clone()),
        _ => MorphData::Graph { vmap: maps[0].clone(), amap: maps[1].clone() },
    };
    let iso = match Morphism::new(fa.mid().clone(), oracle.carrier.clone(), data) {
        Ok(m) => m,
        Err(_) => return Ok(Comparison::fail("reading does not preserve source and target")),
    };
    if compose(&iso, &fa.lambda)? != oracle.lambda {
        return Ok(Comparison::fail("reading does not commute with λ"));
    }
    if compose(&oracle.rho, &iso)? != fa.rho {
        return Ok(Comparison::fail("reading does not commute with ρ"));
    }
    Ok(Comparison::pass(iso))
}
