use super::{Graph, Matrix, MorphData, Morphism, Object};
use crate::error::{Error, Result};

pub const DEFAULT_CAP: u128 = 1_000_000;

/// Upper bound on the size of any enumerated hom-set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomCap(pub u128);

impl Default for HomCap {
    fn default() -> Self {
        HomCap(DEFAULT_CAP)
    }
}

impl HomCap {
    /// The default cap, overridden by `NWFS_CAP` when set to an integer.
    pub fn from_env() -> Self {
        std::env::var("NWFS_CAP").ok().and_then(|v| v.trim().parse().ok()).map(HomCap).unwrap_or_default()
    }

    pub fn check(self, cardinality: u128) -> Result<()> {
        if cardinality > self.0 {
            Err(Error::CapExceeded { cardinality, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// Exact size of hom(x, y).
pub fn hom_count(x: &Object, y: &Object) -> Result<u128> {
    match (x, y) {
        (Object::Set(n), Object::Set(m)) => Ok(pow(*m, *n)),
        (Object::Graph(a), Object::Graph(b)) => {
            let mut count = 0u128;
            graph_vertex_maps(a, b, &mut |vmap| {
                count = count.saturating_add(
                    arrow_choices(a, b, vmap).iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128)),
                );
            });
            Ok(count)
        }
        (Object::Module { q: p, rank: r1 }, Object::Module { q: p2, rank: r2 }) if p == p2 => {
            Ok(pow(*p as usize, r1.saturating_mul(*r2)))
        }
        _ => Err(Error::BackendMismatch("hom-set between different backends".into())),
    }
}

/// All morphisms x → y in lexicographic order of their data.
pub fn hom_enumerate(x: &Object, y: &Object, cap: HomCap) -> Result<Vec<Morphism>> {
    cap.check(hom_count(x, y)?)?;
    let mut out = Vec::new();
    match (x, y) {
        (Object::Set(n), Object::Set(m)) => {
            odometer(*n, *m, |map| out.push(MorphData::Set(map.to_vec())));
        }
        (Object::Graph(a), Object::Graph(b)) => {
            graph_vertex_maps(a, b, &mut |vmap| {
                let choices = arrow_choices(a, b, vmap);
                let mut idx = vec![0usize; choices.len()];
                if choices.iter().any(|c| c.is_empty()) {
                    return;
                }
                loop {
                    let amap = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                    out.push(MorphData::Graph { vmap: vmap.to_vec(), amap });
                    let mut k = idx.len();
                    loop {
                        if k == 0 {
                            return;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < choices[k].len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            });
        }
        (Object::Module { q, rank: r1 }, Object::Module { rank: r2, .. }) => {
            odometer(r1 * r2, *q as usize, |entries| {
                let e = entries.iter().map(|&v| v as u32).collect();
                out.push(MorphData::Module(Matrix::from_entries(*r2, *r1, e)));
            });
        }
        _ => unreachable!("hom_count rejects mixed backends"),
    }
    out.into_iter().map(|d| Morphism::new(x.clone(), y.clone(), d)).collect()
}

fn odometer(len: usize, base: usize, mut emit: impl FnMut(&[usize])) {
    if base == 0 && len > 0 {
        return;
    }
    let mut v = vec![0usize; len];
    loop {
        emit(&v);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < base {
                break;
            }
            v[i] = 0;
        }
    }
}

fn arrow_choices(a: &Graph, b: &Graph, vmap: &[usize]) -> Vec<Vec<usize>> {
    (0..a.arrows())
        .map(|e| (0..b.arrows()).filter(|&f| b.src[f] == vmap[a.src[e]] && b.tgt[f] == vmap[a.tgt[e]]).collect())
        .collect()
}

/// Vertex maps admitting at least one arrow assignment, lexicographically.
fn graph_vertex_maps(a: &Graph, b: &Graph, emit: &mut dyn FnMut(&[usize])) {
    // arrows checkable once both endpoints are assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); a.vertices];
    for e in 0..a.arrows() {
        ready[a.src[e].max(a.tgt[e])].push(e);
    }
    let mut vmap = vec![0usize; a.vertices];
    fn go(i: usize, a: &Graph, b: &Graph, ready: &[Vec<usize>], vmap: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        if i == a.vertices {
            emit(vmap);
            return;
        }
        for v in 0..b.vertices {
            vmap[i] = v;
            let ok = ready[i]
                .iter()
                .all(|&e| (0..b.arrows()).any(|f| b.src[f] == vmap[a.src[e]] && b.tgt[f] == vmap[a.tgt[e]]));
            if ok {
                go(i + 1, a, b, ready, vmap, emit);
            }
        }
    }
    go(0, a, b, &ready, &mut vmap, emit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_domain_has_one_map() {
        let homs = hom_enumerate(&Object::Set(0), &Object::Set(4), HomCap::default()).unwrap();
        assert_eq!(homs.len(), 1);
    }

    #[test]
    fn points_of_a_three_element_set() {
        let homs = hom_enumerate(&Object::Set(1), &Object::Set(3), HomCap::default()).unwrap();
        assert_eq!(homs.len(), 3);
    }

    #[test]
    fn graph_points_are_vertices() {
        let point = Object::graph(1, vec![], vec![]).unwrap();
        let g = Object::graph(3, vec![0, 1, 1], vec![1, 2, 2]).unwrap();
        let homs = hom_enumerate(&point, &g, HomCap::default()).unwrap();
        assert_eq!(homs.len(), 3);
    }

    #[test]
    fn graph_homs_match_brute_force() {
        let a = Object::graph(2, vec![0, 1], vec![1, 0]).unwrap();
        let b = Object::graph(3, vec![0, 1, 2, 0], vec![1, 0, 2, 1]).unwrap();
        let homs = hom_enumerate(&a, &b, HomCap::default()).unwrap();
        // brute force: every vertex/arrow assignment, filtered by the homomorphism condition
        let mut brute = Vec::new();
        for v0 in 0..3 {
            for v1 in 0..3 {
                for e0 in 0..4 {
                    for e1 in 0..4 {
                        let d = MorphData::Graph { vmap: vec![v0, v1], amap: vec![e0, e1] };
                        if let Ok(m) = Morphism::new(a.clone(), b.clone(), d) {
                            brute.push(m);
                        }
                    }
                }
            }
        }
        assert_eq!(homs, brute);
        assert_eq!(hom_count(&a, &b).unwrap(), brute.len() as u128);
    }

    #[test]
    fn cap_is_enforced() {
        let err = hom_enumerate(&Object::Set(5), &Object::Set(4), HomCap(100)).unwrap_err();
        assert_eq!(err, Error::CapExceeded { cardinality: 1024, cap: 100 });
    }

    #[test]
    fn module_hom_count() {
        let x = Object::module(3, 1).unwrap();
        let y = Object::module(3, 2).unwrap();
        assert_eq!(hom_enumerate(&x, &y, HomCap::default()).unwrap().len(), 9);
    }

    proptest! {
        #[test]
        fn finset_hom_cardinality(n in 0usize..4, m in 0usize..4) {
            let homs = hom_enumerate(&Object::Set(n), &Object::Set(m), HomCap::default()).unwrap();
            prop_assert_eq!(homs.len() as u128, (m as u128).pow(n as u32));
            let mut sorted = homs.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted, homs);
        }
    }
}
