//! The arrow category: arrows, commuting squares, lifting problems, and
//! functorial factorisations with their structure maps.

mod laws;
mod stage;

pub use laws::{check_stage, Corpus, LawOutcome, LawReport, Witness};
pub use stage::{
    Factored, Factorisation, FactorisationExt, IdentityFactorisation, Memo, Perturbed, TerminalFactorisation,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{compose, hom_enumerate, Backend, HomCap, Morphism, Object};

/// An object of the arrow category.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ArrowRepr", into = "ArrowRepr")]
pub struct Arrow(Morphism);

#[derive(Serialize, Deserialize)]
struct ArrowRepr {
    dom: Object,
    cod: Object,
    mor: Morphism,
}

impl TryFrom<ArrowRepr> for Arrow {
    type Error = Error;

    fn try_from(r: ArrowRepr) -> Result<Self> {
        if r.mor.dom() != &r.dom || r.mor.cod() != &r.cod {
            return Err(Error::InvalidMorphism("arrow endpoints disagree with its morphism".into()));
        }
        Ok(Arrow(r.mor))
    }
}

impl From<Arrow> for ArrowRepr {
    fn from(a: Arrow) -> Self {
        ArrowRepr { dom: a.0.dom().clone(), cod: a.0.cod().clone(), mor: a.0 }
    }
}

impl From<Morphism> for Arrow {
    fn from(m: Morphism) -> Self {
        Arrow(m)
    }
}

impl Arrow {
    pub fn new(mor: Morphism) -> Self {
        Arrow(mor)
    }

    pub fn dom(&self) -> &Object {
        self.0.dom()
    }

    pub fn cod(&self) -> &Object {
        self.0.cod()
    }

    pub fn mor(&self) -> &Morphism {
        &self.0
    }

    pub fn into_mor(self) -> Morphism {
        self.0
    }

    pub fn backend(&self) -> Backend {
        self.0.backend()
    }
}

/// A commuting square `(h, k): src → tgt`, i.e. `tgt ∘ h = k ∘ src`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SquareRepr", into = "SquareRepr")]
pub struct Square {
    src: Arrow,
    tgt: Arrow,
    h: Morphism,
    k: Morphism,
}

#[derive(Serialize, Deserialize)]
struct SquareRepr {
    src: Arrow,
    tgt: Arrow,
    h: Morphism,
    k: Morphism,
}

impl TryFrom<SquareRepr> for Square {
    type Error = Error;

    fn try_from(r: SquareRepr) -> Result<Self> {
        Square::new(r.src, r.tgt, r.h, r.k)
    }
}

impl From<Square> for SquareRepr {
    fn from(s: Square) -> Self {
        SquareRepr { src: s.src, tgt: s.tgt, h: s.h, k: s.k }
    }
}

impl Square {
    pub fn new(src: Arrow, tgt: Arrow, h: Morphism, k: Morphism) -> Result<Self> {
        if h.dom() != src.dom() || h.cod() != tgt.dom() || k.dom() != src.cod() || k.cod() != tgt.cod() {
            return Err(Error::NotSquare("components do not fit between the arrows".into()));
        }
        if compose(tgt.mor(), &h)? != compose(&k, src.mor())? {
            return Err(Error::NotSquare("the two composites differ".into()));
        }
        Ok(Square { src, tgt, h, k })
    }

    pub fn identity(f: &Arrow) -> Self {
        Square { src: f.clone(), tgt: f.clone(), h: Morphism::identity(f.dom()), k: Morphism::identity(f.cod()) }
    }

    pub fn src(&self) -> &Arrow {
        &self.src
    }

    pub fn tgt(&self) -> &Arrow {
        &self.tgt
    }

    pub fn h(&self) -> &Morphism {
        &self.h
    }

    pub fn k(&self) -> &Morphism {
        &self.k
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Square) -> Result<Square> {
        if first.tgt != self.src {
            return Err(Error::DomainMismatch("squares are not composable".into()));
        }
        Ok(Square {
            src: first.src.clone(),
            tgt: self.tgt.clone(),
            h: compose(&self.h, &first.h)?,
            k: compose(&self.k, &first.k)?,
        })
    }
}

/// A named arrow of a generating set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub arrow: Arrow,
}

/// The set J of generating arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GeneratingSetRepr", into = "GeneratingSetRepr")]
pub struct GeneratingSet {
    generators: Vec<Generator>,
    backend: Option<Backend>,
}

#[derive(Serialize, Deserialize)]
struct GeneratingSetRepr {
    generators: Vec<Generator>,
}

impl TryFrom<GeneratingSetRepr> for GeneratingSet {
    type Error = Error;

    fn try_from(r: GeneratingSetRepr) -> Result<Self> {
        GeneratingSet::new(r.generators)
    }
}

impl From<GeneratingSet> for GeneratingSetRepr {
    fn from(j: GeneratingSet) -> Self {
        GeneratingSetRepr { generators: j.generators }
    }
}

impl GeneratingSet {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        let backend = generators.first().map(|g| g.arrow.backend());
        if let Some(b) = backend {
            if let Some(g) = generators.iter().find(|g| g.arrow.backend() != b) {
                return Err(Error::BackendMismatch(format!("generator `{}` is not in {}", g.name, b.name())));
            }
        }
        Ok(GeneratingSet { generators, backend })
    }

    pub fn empty() -> Self {
        GeneratingSet { generators: Vec::new(), backend: None }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn arrow(&self, j: usize) -> &Arrow {
        &self.generators[j].arrow
    }

    pub fn backend(&self) -> Option<Backend> {
        self.backend
    }
}

/// A lifting problem: a square from generator `generator` into the arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    pub generator: usize,
    pub square: Square,
}

/// Every square f → g, ordered lexicographically by `(h, k)`.
pub fn enumerate_squares(f: &Arrow, g: &Arrow, cap: HomCap) -> Result<Vec<Square>> {
    if f.backend() != g.backend() {
        return Err(Error::BackendMismatch("squares between different backends".into()));
    }
    let hs = hom_enumerate(f.dom(), g.dom(), cap)?;
    if hs.is_empty() {
        return Ok(Vec::new());
    }
    let ks = hom_enumerate(f.cod(), g.cod(), cap)?;
    let mut by_image: HashMap<Morphism, Vec<usize>> = HashMap::new();
    for (i, h) in hs.iter().enumerate() {
        by_image.entry(compose(g.mor(), h)?).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for (j, k) in ks.iter().enumerate() {
        if let Some(is) = by_image.get(&compose(k, f.mor())?) {
            pairs.extend(is.iter().map(|&i| (i, j)));
        }
    }
    pairs.sort_unstable();
    Ok(pairs
        .into_iter()
        .map(|(i, j)| Square { src: f.clone(), tgt: g.clone(), h: hs[i].clone(), k: ks[j].clone() })
        .collect())
}

/// The set S_g: problems against each generator, in generator order.
pub fn full_problem_set(j: &GeneratingSet, g: &Arrow, cap: HomCap) -> Result<Vec<Problem>> {
    let mut out = Vec::new();
    for (i, gen) in j.generators().iter().enumerate() {
        out.extend(enumerate_squares(&gen.arrow, g, cap)?.into_iter().map(|square| Problem { generator: i, square }));
    }
    Ok(out)
}
