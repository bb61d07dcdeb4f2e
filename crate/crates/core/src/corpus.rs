//! Deterministic corpora of arrows and squares for law suites.

use crate::arrows::{enumerate_squares, Arrow, Corpus, Square};
use crate::error::Result;
use crate::fincat::{hom_enumerate, HomCap, Morphism, Object};

/// Every finite-set map C → D with |C|, |D| ≤ `max`, ordered by sizes then data.
pub fn finset_arrows(max: usize) -> Vec<Arrow> {
    let mut out = Vec::new();
    for c in 0..=max {
        for d in 0..=max {
            let homs = hom_enumerate(&Object::Set(c), &Object::Set(d), HomCap(u128::MAX)).expect("small hom-set");
            out.extend(homs.into_iter().map(Arrow::new));
        }
    }
    out
}

/// Arrows between the listed objects, in list order.
pub fn arrows_between(objects: &[Object], cap: HomCap) -> Result<Vec<Arrow>> {
    let mut out = Vec::new();
    for x in objects {
        for y in objects {
            out.extend(hom_enumerate(x, y, cap)?.into_iter().map(Arrow::new));
        }
    }
    Ok(out)
}

/// Up to `limit` squares spread evenly over ordered pairs of `arrows`,
/// taking the middle square of each chosen pair.
pub fn sample_squares(arrows: &[Arrow], limit: usize, cap: HomCap) -> Result<Vec<Square>> {
    let pairs = arrows.len() * arrows.len();
    if pairs == 0 || limit == 0 {
        return Ok(Vec::new());
    }
    let stride = (pairs / limit).max(1);
    let mut out = Vec::new();
    let mut p = 0;
    while p < pairs && out.len() < limit {
        let (f, g) = (&arrows[p / arrows.len()], &arrows[p % arrows.len()]);
        let sq = enumerate_squares(f, g, cap)?;
        if !sq.is_empty() {
            out.push(sq[sq.len() / 2].clone());
        }
        p += stride;
    }
    Ok(out)
}

/// All finset arrows up to size `max` with a spread of squares between them.
pub fn finset_corpus(max: usize, square_limit: usize) -> Corpus {
    let arrows = finset_arrows(max);
    let squares = sample_squares(&arrows, square_limit, HomCap(u128::MAX)).expect("small hom-sets");
    Corpus { arrows, squares }
}

/// A few small graphs: a vertex, an edge, a loop, a 2-cycle and a 2-path.
pub fn small_graphs() -> Vec<Object> {
    vec![
        Object::graph(1, vec![], vec![]).expect("valid"),
        Object::graph(2, vec![0], vec![1]).expect("valid"),
        Object::graph(1, vec![0], vec![0]).expect("valid"),
        Object::graph(2, vec![0, 1], vec![1, 0]).expect("valid"),
        Object::graph(3, vec![0, 1], vec![1, 2]).expect("valid"),
    ]
}

pub fn graph_corpus() -> Vec<Arrow> {
    arrows_between(&small_graphs(), HomCap::default()).expect("small hom-sets")
}

/// A finset arrow from its map, for tests and examples.
pub fn set_arrow(dom: usize, cod: usize, map: &[usize]) -> Arrow {
    Arrow::new(Morphism::set_map(dom, cod, map.to_vec()).expect("valid map"))
}
