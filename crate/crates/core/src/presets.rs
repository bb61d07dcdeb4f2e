//! Generating sets used throughout the worked examples.

use crate::arrows::{Arrow, GeneratingSet, Generator};
use crate::error::Result;
use crate::fincat::{MorphData, Morphism, Object};

fn single(name: &str, mor: Morphism) -> Generator {
    Generator { name: name.into(), arrow: Arrow::new(mor) }
}

/// `0 → 1`: its right maps are the split epimorphisms.
pub fn point() -> Generator {
    single("0->1", Morphism::from_initial(&Object::Set(1)))
}

/// `in₁: 1 → 1 + 1`: its right maps are the arrows with a cosection action.
pub fn first_injection() -> Generator {
    single("in1", Morphism::set_map(1, 2, vec![0]).expect("valid map"))
}

pub fn split_epi() -> GeneratingSet {
    GeneratingSet::new(vec![point()]).expect("single backend")
}

pub fn cosection() -> GeneratingSet {
    GeneratingSet::new(vec![first_injection()]).expect("single backend")
}

pub fn both() -> GeneratingSet {
    GeneratingSet::new(vec![point(), first_injection()]).expect("single backend")
}

/// The vertex graph including as the source of the one-arrow graph.
pub fn graph_edge() -> GeneratingSet {
    let vertex = Object::graph(1, vec![], vec![]).expect("valid graph");
    let edge = Object::graph(2, vec![0], vec![1]).expect("valid graph");
    let mor = Morphism::new(vertex, edge, MorphData::Graph { vmap: vec![0], amap: vec![] }).expect("valid map");
    GeneratingSet::new(vec![single("vertex->edge", mor)]).expect("single backend")
}

/// `0 → R` over ℤ/q: its right maps are the surjections.
pub fn free_module(q: u32) -> Result<GeneratingSet> {
    let r = Object::module(q, 1)?;
    GeneratingSet::new(vec![single("0->R", Morphism::from_initial(&r))])
}

/// Look a preset up by name: `split-epi`, `cosection`, `both`, `graph-edge`, `free-module:<q>`, `empty`.
pub fn by_name(name: &str) -> Option<GeneratingSet> {
    match name {
        "split-epi" => Some(split_epi()),
        "cosection" => Some(cosection()),
        "both" => Some(both()),
        "graph-edge" => Some(graph_edge()),
        "empty" => Some(GeneratingSet::empty()),
        _ => {
            let q = name.strip_prefix("free-module:")?.parse().ok()?;
            free_module(q).ok()
        }
    }
}
