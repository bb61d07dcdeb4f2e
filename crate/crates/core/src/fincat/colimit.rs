use super::modular::{quotient_basis, Matrix};
use super::{compose, Backend, Graph, MorphData, Morphism, Object};
use crate::error::{Error, Result};

/// Identifies `left(x)` in summand `left_target` with `right(x)` in summand
/// `right_target`, for every element `x` of the shared domain.
#[derive(Clone, Debug)]
pub struct Relation {
    pub left: Morphism,
    pub left_target: usize,
    pub right: Morphism,
    pub right_target: usize,
}

#[derive(Clone, Debug)]
enum Reps {
    Set(Vec<(usize, usize)>),
    Graph { vertices: Vec<(usize, usize)>, arrows: Vec<(usize, usize)> },
    Module(Matrix),
    Chain,
}

/// A colimit cocone together with its universal property.
#[derive(Clone, Debug)]
pub struct ColimitResult {
    apex: Object,
    legs: Vec<Morphism>,
    relations: Vec<Relation>,
    reps: Reps,
}

impl ColimitResult {
    pub fn apex(&self) -> &Object {
        &self.apex
    }

    pub fn legs(&self) -> &[Morphism] {
        &self.legs
    }

    pub fn leg(&self, i: usize) -> &Morphism {
        &self.legs[i]
    }

    /// The unique map out of the apex restricting to `cocone` along the legs.
    pub fn universal(&self, target: &Object, cocone: &[Morphism]) -> Result<Morphism> {
        if cocone.len() != self.legs.len() {
            return Err(Error::IncompatibleCocone(format!("{} maps for {} legs", cocone.len(), self.legs.len())));
        }
        for (c, leg) in cocone.iter().zip(&self.legs) {
            if c.dom() != leg.dom() || c.cod() != target {
                return Err(Error::IncompatibleCocone("cocone map has the wrong domain or codomain".into()));
            }
        }
        for (i, r) in self.relations.iter().enumerate() {
            if compose(&cocone[r.left_target], &r.left)? != compose(&cocone[r.right_target], &r.right)? {
                return Err(Error::IncompatibleCocone(format!("relation {i} is not respected")));
            }
        }
        let data = match &self.reps {
            Reps::Set(reps) => MorphData::Set(reps.iter().map(|&(s, x)| cocone[s].as_set().unwrap()[x]).collect()),
            Reps::Graph { vertices, arrows } => MorphData::Graph {
                vmap: vertices.iter().map(|&(s, v)| cocone[s].as_graph().unwrap().0[v]).collect(),
                amap: arrows.iter().map(|&(s, a)| cocone[s].as_graph().unwrap().1[a]).collect(),
            },
            Reps::Module(section) => {
                let (q, rank) = target.as_module().unwrap();
                let blocks: Vec<&Matrix> = cocone.iter().map(|c| c.as_matrix().unwrap()).collect();
                let combined = Matrix::hconcat(rank, &blocks);
                MorphData::Module(combined.mul(section, q))
            }
            Reps::Chain => return Ok(cocone.last().expect("chains are nonempty").clone()),
        };
        Morphism::new(self.apex.clone(), target.clone(), data)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Classes numbered by their least member; returns (class of each element, least member of each class).
    fn classes(&mut self) -> (Vec<usize>, Vec<usize>) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut class = vec![0; n];
        let mut reps = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if id[r] == usize::MAX {
                id[r] = reps.len();
                reps.push(x);
            }
            class[x] = id[r];
        }
        (class, reps)
    }
}

fn offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    let mut out = Vec::new();
    for s in sizes {
        out.push(acc);
        acc += s;
    }
    out.push(acc);
    out
}

fn locate(offs: &[usize], x: usize) -> (usize, usize) {
    let i = offs.partition_point(|&o| o <= x) - 1;
    (i, x - offs[i])
}

/// Quotient of the coproduct of `summands` by the relations.
pub fn quotient(backend: Backend, summands: &[Object], relations: Vec<Relation>) -> Result<ColimitResult> {
    for s in summands {
        if s.backend() != backend {
            return Err(Error::BackendMismatch(format!(
                "{} summand in a {} colimit",
                s.backend().name(),
                backend.name()
            )));
        }
    }
    for r in &relations {
        if r.left.dom() != r.right.dom() {
            return Err(Error::DomainMismatch("relation maps have different domains".into()));
        }
        if summands.get(r.left_target) != Some(r.left.cod()) || summands.get(r.right_target) != Some(r.right.cod()) {
            return Err(Error::DomainMismatch("relation map does not land in its summand".into()));
        }
    }
    match backend {
        Backend::Finset => set_quotient(summands, relations),
        Backend::Fingraph => graph_quotient(summands, relations),
        Backend::Finmod { q } => module_quotient(q, summands, relations),
    }
}

fn set_quotient(summands: &[Object], relations: Vec<Relation>) -> Result<ColimitResult> {
    let offs = offsets(summands.iter().map(|s| s.as_set().unwrap()));
    let mut uf = UnionFind::new(*offs.last().unwrap());
    for r in &relations {
        let (l, rr) = (r.left.as_set().unwrap(), r.right.as_set().unwrap());
        for (&a, &b) in l.iter().zip(rr) {
            uf.union(offs[r.left_target] + a, offs[r.right_target] + b);
        }
    }
    let (class, reps) = uf.classes();
    let apex = Object::Set(reps.len());
    let legs = summands
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let map = (0..s.as_set().unwrap()).map(|x| class[offs[i] + x]).collect();
            Morphism::new(s.clone(), apex.clone(), MorphData::Set(map))
        })
        .collect::<Result<_>>()?;
    let reps = reps.into_iter().map(|x| locate(&offs, x)).collect();
    Ok(ColimitResult { apex, legs, relations, reps: Reps::Set(reps) })
}

fn graph_quotient(summands: &[Object], relations: Vec<Relation>) -> Result<ColimitResult> {
    let graphs: Vec<&Graph> = summands.iter().map(|s| s.as_graph().unwrap()).collect();
    let voffs = offsets(graphs.iter().map(|g| g.vertices()));
    let aoffs = offsets(graphs.iter().map(|g| g.arrows()));
    let mut vuf = UnionFind::new(*voffs.last().unwrap());
    let mut auf = UnionFind::new(*aoffs.last().unwrap());
    for r in &relations {
        let ((lv, la), (rv, ra)) = (r.left.as_graph().unwrap(), r.right.as_graph().unwrap());
        for (&a, &b) in lv.iter().zip(rv) {
            vuf.union(voffs[r.left_target] + a, voffs[r.right_target] + b);
        }
        for (&a, &b) in la.iter().zip(ra) {
            auf.union(aoffs[r.left_target] + a, aoffs[r.right_target] + b);
        }
    }
    let (vclass, vreps) = vuf.classes();
    let (aclass, areps) = auf.classes();
    let mut src = Vec::with_capacity(areps.len());
    let mut tgt = Vec::with_capacity(areps.len());
    for &a in &areps {
        let (i, e) = locate(&aoffs, a);
        src.push(vclass[voffs[i] + graphs[i].src()[e]]);
        tgt.push(vclass[voffs[i] + graphs[i].tgt()[e]]);
    }
    let apex = Object::graph(vreps.len(), src, tgt)?;
    let legs = graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let vmap = (0..g.vertices()).map(|v| vclass[voffs[i] + v]).collect();
            let amap = (0..g.arrows()).map(|e| aclass[aoffs[i] + e]).collect();
            Morphism::new(summands[i].clone(), apex.clone(), MorphData::Graph { vmap, amap })
        })
        .collect::<Result<_>>()?;
    let reps = Reps::Graph {
        vertices: vreps.into_iter().map(|x| locate(&voffs, x)).collect(),
        arrows: areps.into_iter().map(|x| locate(&aoffs, x)).collect(),
    };
    Ok(ColimitResult { apex, legs, relations, reps })
}

fn module_quotient(q: u32, summands: &[Object], relations: Vec<Relation>) -> Result<ColimitResult> {
    let offs = offsets(summands.iter().map(|s| s.as_module().unwrap().1));
    let n = *offs.last().unwrap();
    let mut rel_vectors = Vec::new();
    for r in &relations {
        let (l, rr) = (r.left.as_matrix().unwrap(), r.right.as_matrix().unwrap());
        for k in 0..l.cols() {
            let mut v = vec![0u32; n];
            for (i, x) in l.column(k).into_iter().enumerate() {
                v[offs[r.left_target] + i] = x;
            }
            for (i, x) in rr.column(k).into_iter().enumerate() {
                let slot = &mut v[offs[r.right_target] + i];
                *slot = (*slot + q - x) % q;
            }
            rel_vectors.push(v);
        }
    }
    let (projection, section) = quotient_basis(n, rel_vectors, q);
    let apex = Object::Module { q, rank: projection.rows() };
    let legs = summands
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let rank = s.as_module().unwrap().1;
            let mut block = Matrix::zeros(projection.rows(), rank);
            for r in 0..projection.rows() {
                for c in 0..rank {
                    block.set(r, c, projection.get(r, offs[i] + c));
                }
            }
            Morphism::new(s.clone(), apex.clone(), MorphData::Module(block))
        })
        .collect::<Result<_>>()?;
    Ok(ColimitResult { apex, legs, relations, reps: Reps::Module(section) })
}

pub fn coproduct(backend: Backend, family: &[Object]) -> Result<ColimitResult> {
    quotient(backend, family, Vec::new())
}

/// Pushout of the span `cod f ← dom f = dom g → cod g`; leg 0 leaves `cod f`, leg 1 leaves `cod g`.
pub fn pushout(f: &Morphism, g: &Morphism) -> Result<ColimitResult> {
    if f.dom() != g.dom() {
        return Err(Error::DomainMismatch("pushout span legs have different domains".into()));
    }
    let rel = Relation { left: f.clone(), left_target: 0, right: g.clone(), right_target: 1 };
    quotient(f.backend(), &[f.cod().clone(), g.cod().clone()], vec![rel])
}

pub fn coequalizer(u: &Morphism, v: &Morphism) -> Result<ColimitResult> {
    if u.dom() != v.dom() || u.cod() != v.cod() {
        return Err(Error::NotParallel);
    }
    let rel = Relation { left: u.clone(), left_target: 0, right: v.clone(), right_target: 0 };
    quotient(u.backend(), &[u.cod().clone()], vec![rel])
}

/// Colimit of the finite chain `start → … `; the apex is the last object.
pub fn chain_colimit(start: &Object, chain: &[Morphism]) -> Result<ColimitResult> {
    let mut objects = vec![start.clone()];
    for (i, m) in chain.iter().enumerate() {
        if m.dom() != objects.last().unwrap() {
            return Err(Error::NotComposable(i));
        }
        objects.push(m.cod().clone());
    }
    let apex = objects.last().unwrap().clone();
    let mut legs = vec![Morphism::identity(&apex)];
    for m in chain.iter().rev() {
        let next = compose(legs.last().unwrap(), m)?;
        legs.push(next);
    }
    legs.reverse();
    let relations = chain
        .iter()
        .enumerate()
        .map(|(i, m)| Relation {
            left: Morphism::identity(m.dom()),
            left_target: i,
            right: m.clone(),
            right_target: i + 1,
        })
        .collect();
    Ok(ColimitResult { apex, legs, relations, reps: Reps::Chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{hom_enumerate, is_iso, HomCap};
    use proptest::prelude::*;

    fn set(n: usize) -> Object {
        Object::Set(n)
    }

    fn map(d: usize, c: usize, m: &[usize]) -> Morphism {
        Morphism::set_map(d, c, m.to_vec()).unwrap()
    }

    /// Brute-force universal property: every compatible cocone into every
    /// target of size ≤ `max` has exactly one mediating map.
    fn check_universal(c: &ColimitResult, max: usize) {
        for t in 0..=max {
            let target = set(t);
            let leg_homs: Vec<Vec<Morphism>> =
                c.legs().iter().map(|l| hom_enumerate(l.dom(), &target, HomCap::default()).unwrap()).collect();
            let mediators = hom_enumerate(c.apex(), &target, HomCap::default()).unwrap();
            let mut idx = vec![0usize; leg_homs.len()];
            if leg_homs.iter().any(|h| h.is_empty()) {
                continue;
            }
            loop {
                let cocone: Vec<Morphism> = idx.iter().zip(&leg_homs).map(|(&i, h)| h[i].clone()).collect();
                let compatible = c.relations.iter().all(|r| {
                    compose(&cocone[r.left_target], &r.left).unwrap()
                        == compose(&cocone[r.right_target], &r.right).unwrap()
                });
                let matching: Vec<&Morphism> = mediators
                    .iter()
                    .filter(|m| c.legs().iter().zip(&cocone).all(|(l, x)| compose(m, l).unwrap() == *x))
                    .collect();
                if compatible {
                    assert_eq!(matching.len(), 1);
                    assert_eq!(c.universal(&target, &cocone).unwrap(), *matching[0]);
                } else {
                    assert!(matching.is_empty());
                    assert!(c.universal(&target, &cocone).is_err());
                }
                let mut k = idx.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < leg_homs[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }

    #[test]
    fn empty_coproduct_is_initial() {
        let c = coproduct(Backend::Finset, &[]).unwrap();
        assert_eq!(c.apex(), &set(0));
    }

    #[test]
    fn finset_coproduct() {
        let c = coproduct(Backend::Finset, &[set(2), set(3)]).unwrap();
        assert_eq!(c.apex(), &set(5));
        assert_eq!(c.leg(1).as_set().unwrap(), &[2, 3, 4]);
        check_universal(&c, 2);
    }

    #[test]
    fn module_biproduct() {
        let x = Object::module(3, 1).unwrap();
        let c = coproduct(Backend::Finmod { q: 3 }, &[x.clone(), x]).unwrap();
        assert_eq!(c.apex().as_module(), Some((3, 2)));
        assert_eq!(c.leg(0).as_matrix().unwrap().column(0), vec![1, 0]);
        assert_eq!(c.leg(1).as_matrix().unwrap().column(0), vec![0, 1]);
    }

    #[test]
    fn pushout_along_identity() {
        let g = map(2, 3, &[0, 2]);
        let p = pushout(&Morphism::identity(&set(2)), &g).unwrap();
        assert_eq!(p.apex(), &set(3));
        assert!(is_iso(p.leg(1)).is_some());
    }

    #[test]
    fn pushout_of_empty_span() {
        let p = pushout(&Morphism::from_initial(&set(1)), &Morphism::from_initial(&set(2))).unwrap();
        assert_eq!(p.apex(), &set(3));
        check_universal(&p, 2);
    }

    #[test]
    fn graph_pushout_glues_an_edge() {
        let point = Object::graph(1, vec![], vec![]).unwrap();
        let edge = Object::graph(2, vec![0], vec![1]).unwrap();
        let x = Object::graph(2, vec![0], vec![1]).unwrap();
        let start = Morphism::new(point.clone(), edge, MorphData::Graph { vmap: vec![0], amap: vec![] }).unwrap();
        let at = Morphism::new(point, x, MorphData::Graph { vmap: vec![1], amap: vec![] }).unwrap();
        let p = pushout(&at, &start).unwrap();
        let g = p.apex().as_graph().unwrap();
        assert_eq!((g.vertices(), g.arrows()), (3, 2));
        assert_eq!(compose(p.leg(0), &at).unwrap(), compose(p.leg(1), &start).unwrap());
    }

    #[test]
    fn coequalizer_cases() {
        let u = map(1, 2, &[0]);
        let v = map(1, 2, &[1]);
        let c = coequalizer(&u, &v).unwrap();
        assert_eq!(c.apex(), &set(1));
        check_universal(&c, 3);
        let same = coequalizer(&u, &u).unwrap();
        assert!(same.leg(0).is_identity());
        assert_eq!(coequalizer(&u, &map(1, 3, &[0])).unwrap_err(), Error::NotParallel);
    }

    #[test]
    fn graph_coequalizer_merges_parallel_arrows() {
        let edge = Object::graph(2, vec![0], vec![1]).unwrap();
        let two = Object::graph(2, vec![0, 0], vec![1, 1]).unwrap();
        let a = Morphism::new(edge.clone(), two.clone(), MorphData::Graph { vmap: vec![0, 1], amap: vec![0] }).unwrap();
        let b = Morphism::new(edge, two, MorphData::Graph { vmap: vec![0, 1], amap: vec![1] }).unwrap();
        let c = coequalizer(&a, &b).unwrap();
        let g = c.apex().as_graph().unwrap();
        assert_eq!((g.vertices(), g.arrows()), (2, 1));
    }

    #[test]
    fn module_coequalizer() {
        let x = Object::module(5, 1).unwrap();
        let y = Object::module(5, 2).unwrap();
        let u = Morphism::new(x.clone(), y.clone(), MorphData::Module(Matrix::from_entries(2, 1, vec![1, 0]))).unwrap();
        let v = Morphism::new(x, y, MorphData::Module(Matrix::from_entries(2, 1, vec![0, 1]))).unwrap();
        let c = coequalizer(&u, &v).unwrap();
        assert_eq!(c.apex().as_module(), Some((5, 1)));
        assert_eq!(compose(c.leg(0), &u).unwrap(), compose(c.leg(0), &v).unwrap());
        let t = Object::module(5, 1).unwrap();
        let sum =
            Morphism::new(c.leg(0).cod().clone(), t.clone(), MorphData::Module(Matrix::from_entries(1, 1, vec![3])))
                .unwrap();
        let cocone = compose(&sum, c.leg(0)).unwrap();
        assert_eq!(c.universal(&t, &[cocone]).unwrap(), sum);
    }

    #[test]
    fn chain_cases() {
        let single = chain_colimit(&set(2), &[]).unwrap();
        assert_eq!(single.apex(), &set(2));
        assert!(single.leg(0).is_identity());
        let a = map(1, 2, &[0]);
        let b = map(2, 3, &[0, 1]);
        let c = chain_colimit(&set(1), &[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.apex(), &set(3));
        assert_eq!(c.leg(0), &compose(&b, &a).unwrap());
        assert_eq!(c.leg(1), &b);
        assert_eq!(chain_colimit(&set(1), &[b, a]).unwrap_err(), Error::NotComposable(0));
        check_universal(&c, 2);
    }

    fn arb_map(d: usize, c: usize) -> impl Strategy<Value = Morphism> {
        proptest::collection::vec(0..c.max(1), d).prop_map(move |m| Morphism::set_map(d, c, m).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pushout_universal((f, g) in (0usize..3, 1usize..3, 1usize..3).prop_flat_map(|(a, b, c)| (arb_map(a, b), arb_map(a, c)))) {
            let p = pushout(&f, &g).unwrap();
            prop_assert_eq!(compose(p.leg(0), &f).unwrap(), compose(p.leg(1), &g).unwrap());
            check_universal(&p, 2);
        }

        #[test]
        fn coequalizer_projection_coequalizes(n in 0usize..4, m in 1usize..4, us in proptest::collection::vec(0usize..4, 8), vs in proptest::collection::vec(0usize..4, 8)) {
            let u = Morphism::set_map(n, m, us[..n].iter().map(|x| x % m).collect()).unwrap();
            let v = Morphism::set_map(n, m, vs[..n].iter().map(|x| x % m).collect()).unwrap();
            let c = coequalizer(&u, &v).unwrap();
            prop_assert_eq!(compose(c.leg(0), &u).unwrap(), compose(c.leg(0), &v).unwrap());
        }
    }

    #[test]
    fn pushout_of_iso_is_iso() {
        for a in 0..=3usize {
            for c in 0..=3usize {
                let isos: Vec<Morphism> = hom_enumerate(&set(a), &set(a), HomCap::default())
                    .unwrap()
                    .into_iter()
                    .filter(|m| is_iso(m).is_some())
                    .collect();
                for f in &isos {
                    for g in hom_enumerate(&set(a), &set(c), HomCap::default()).unwrap() {
                        let p = pushout(f, &g).unwrap();
                        assert!(is_iso(p.leg(1)).is_some());
                    }
                }
            }
        }
    }
}
