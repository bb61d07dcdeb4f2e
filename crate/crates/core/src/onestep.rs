//! The one-step comonad L¹ generated by a set of arrows: every lifting
//! problem against a generator is solved at once by glueing in a cell.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{LMapStructure, StageRef};
use crate::arrows::{full_problem_set, Arrow, Factored, Factorisation, GeneratingSet, Memo, Problem, Square};
use crate::error::{Error, Result};
use crate::fincat::{compose, coproduct, pushout, Backend, ColimitResult, HomCap, Morphism, Object};

/// `Kg = Σ_{x ∈ S_g} f_x` with its injections and `φ_g: Kg → g`.
#[derive(Clone, Debug)]
pub struct KResult {
    pub problems: Vec<Problem>,
    pub kg: Arrow,
    pub injections: Vec<Square>,
    pub phi: Square,
}

/// The one-step factorisation of a single arrow, with `ε_g: Kg → L¹g`.
#[derive(Clone, Debug)]
pub struct OneStepFactorisation {
    pub lambda: Morphism,
    pub mid: Object,
    pub rho: Morphism,
    pub epsilon: Square,
}

type ProblemKey = (usize, Morphism, Morphism);

struct Point {
    k: KResult,
    dom_sum: ColimitResult,
    cod_sum: ColimitResult,
    index: HashMap<ProblemKey, usize>,
    glue: ColimitResult,
    factored: Arc<Factored>,
}

impl Point {
    fn cell(&self) -> &Morphism {
        self.glue.leg(1)
    }

    fn locate(&self, key: &ProblemKey) -> Result<usize> {
        self.index
            .get(key)
            .copied()
            .ok_or_else(|| Error::Internal("image problem missing from the target problem set".into()))
    }
}

pub struct OneStep {
    generators: GeneratingSet,
    cap: HomCap,
    points: Memo<Arrow, Arc<Point>>,
    comults: Memo<Arrow, Morphism>,
}

impl OneStep {
    pub fn new(generators: GeneratingSet, cap: HomCap) -> Self {
        OneStep { generators, cap, points: Memo::default(), comults: Memo::default() }
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.generators
    }

    pub fn cap(&self) -> HomCap {
        self.cap
    }

    fn backend_for(&self, g: &Arrow) -> Result<Backend> {
        match self.generators.backend() {
            Some(b) if b != g.backend() => {
                Err(Error::BackendMismatch(format!("generators live in {}, arrow in {}", b.name(), g.backend().name())))
            }
            _ => Ok(g.backend()),
        }
    }

    fn point(&self, g: &Arrow) -> Result<Arc<Point>> {
        self.points.get_or_try(g, || self.build_point(g).map(Arc::new))
    }

    fn build_point(&self, g: &Arrow) -> Result<Point> {
        let backend = self.backend_for(g)?;
        let problems = full_problem_set(&self.generators, g, self.cap)?;
        let gens: Vec<&Arrow> = problems.iter().map(|p| self.generators.arrow(p.generator)).collect();
        let dom_objs: Vec<Object> = gens.iter().map(|f| f.dom().clone()).collect();
        let cod_objs: Vec<Object> = gens.iter().map(|f| f.cod().clone()).collect();
        let dom_sum = coproduct(backend, &dom_objs)?;
        let cod_sum = coproduct(backend, &cod_objs)?;
        let into_cod: Vec<Morphism> =
            gens.iter().enumerate().map(|(x, f)| compose(cod_sum.leg(x), f.mor())).collect::<Result<_>>()?;
        let kg = Arrow::new(dom_sum.universal(cod_sum.apex(), &into_cod)?);
        let injections = gens
            .iter()
            .enumerate()
            .map(|(x, f)| Square::new((*f).clone(), kg.clone(), dom_sum.leg(x).clone(), cod_sum.leg(x).clone()))
            .collect::<Result<_>>()?;
        let hs: Vec<Morphism> = problems.iter().map(|p| p.square.h().clone()).collect();
        let ks: Vec<Morphism> = problems.iter().map(|p| p.square.k().clone()).collect();
        let top = dom_sum.universal(g.dom(), &hs)?;
        let bottom = cod_sum.universal(g.cod(), &ks)?;
        let phi = Square::new(kg.clone(), g.clone(), top.clone(), bottom.clone())?;
        let glue = pushout(&top, kg.mor())?;
        let rho = glue.universal(g.cod(), &[g.mor().clone(), bottom])?;
        let factored = Arc::new(Factored { lambda: glue.leg(0).clone(), rho });
        let index = problems
            .iter()
            .enumerate()
            .map(|(x, p)| ((p.generator, p.square.h().clone(), p.square.k().clone()), x))
            .collect();
        Ok(Point { k: KResult { problems, kg, injections, phi }, dom_sum, cod_sum, index, glue, factored })
    }

    pub fn k_apply_arrow(&self, g: &Arrow) -> Result<KResult> {
        Ok(self.point(g)?.k.clone())
    }

    /// `Kγ`: the x-summand goes identically onto the `S_γ(x)`-summand.
    pub fn k_apply_square(&self, gamma: &Square) -> Result<Square> {
        let (p, q) = (self.point(gamma.src())?, self.point(gamma.tgt())?);
        let (top, bottom) = self.k_components(&p, &q, gamma)?;
        Square::new(p.k.kg.clone(), q.k.kg.clone(), top, bottom)
    }

    fn k_components(&self, p: &Point, q: &Point, gamma: &Square) -> Result<(Morphism, Morphism)> {
        let mut tops = Vec::with_capacity(p.k.problems.len());
        let mut bottoms = Vec::with_capacity(p.k.problems.len());
        for x in &p.k.problems {
            let key = (x.generator, compose(gamma.h(), x.square.h())?, compose(gamma.k(), x.square.k())?);
            let y = q.locate(&key)?;
            tops.push(q.dom_sum.leg(y).clone());
            bottoms.push(q.cod_sum.leg(y).clone());
        }
        Ok((p.dom_sum.universal(q.dom_sum.apex(), &tops)?, p.cod_sum.universal(q.cod_sum.apex(), &bottoms)?))
    }

    pub fn one_step_arrow(&self, g: &Arrow) -> Result<OneStepFactorisation> {
        let p = self.point(g)?;
        let epsilon = Square::new(p.k.kg.clone(), p.factored.left(), p.k.phi.h().clone(), p.cell().clone())?;
        Ok(OneStepFactorisation {
            lambda: p.factored.lambda.clone(),
            mid: p.factored.mid().clone(),
            rho: p.factored.rho.clone(),
            epsilon,
        })
    }

    pub fn one_step_square(&self, gamma: &Square) -> Result<Morphism> {
        let (p, q) = (self.point(gamma.src())?, self.point(gamma.tgt())?);
        let (_, bottom) = self.k_components(&p, &q, gamma)?;
        let from_dom = compose(&q.factored.lambda, gamma.h())?;
        let from_cells = compose(q.cell(), &bottom)?;
        p.glue.universal(q.factored.mid(), &[from_dom, from_cells])
    }

    /// `σ¹_g`, induced from `δ_g = ⟨in_{ψ(x)}⟩` with `ψ(x) = ε_g ∘ in_x`.
    pub fn one_step_comult(&self, g: &Arrow) -> Result<Morphism> {
        self.comults.get_or_try(g, || {
            let p = self.point(g)?;
            let lg = p.factored.left();
            let q = self.point(&lg)?;
            let mut cells = Vec::with_capacity(p.k.problems.len());
            for (x, prob) in p.k.problems.iter().enumerate() {
                let key = (prob.generator, prob.square.h().clone(), compose(p.cell(), p.cod_sum.leg(x))?);
                cells.push(q.cod_sum.leg(q.locate(&key)?).clone());
            }
            let delta = p.cod_sum.universal(q.cod_sum.apex(), &cells)?;
            let from_cells = compose(q.cell(), &delta)?;
            p.glue.universal(q.factored.mid(), &[q.factored.lambda.clone(), from_cells])
        })
    }

    /// The R¹-algebra `E¹g → dom g` induced by `id` and one filler per problem of `S_g`.
    pub fn algebra_from_fillers(&self, g: &Arrow, fillers: &[Morphism]) -> Result<Morphism> {
        let p = self.point(g)?;
        if fillers.len() != p.k.problems.len() {
            return Err(Error::IncompleteData(format!(
                "{} fillers for {} problems",
                fillers.len(),
                p.k.problems.len()
            )));
        }
        let cells = p.cod_sum.universal(g.dom(), fillers)?;
        p.glue.universal(g.dom(), &[Morphism::identity(g.dom()), cells])
    }

    /// `α_f`: the codomain part of `ε_f ∘ in_i` for `i` the identity problem.
    pub fn generator_coalgebra_map(&self, j: usize) -> Result<Morphism> {
        let f = self.generators.arrow(j);
        let p = self.point(f)?;
        let key = (j, Morphism::identity(f.dom()), Morphism::identity(f.cod()));
        let i = p.locate(&key)?;
        compose(p.cell(), p.cod_sum.leg(i))
    }

    /// The canonical L¹-coalgebra on a generator; its axioms are checked here.
    pub fn generator_coalgebra(self: &Arc<Self>, j: usize) -> Result<LMapStructure> {
        let alpha = self.generator_coalgebra_map(j)?;
        LMapStructure::new(StageRef::one_step(self.clone()), self.generators.arrow(j).clone(), alpha)
            .map_err(|e| Error::Internal(format!("generator coalgebra: {e}")))
    }
}

impl Factorisation for OneStep {
    fn label(&self) -> String {
        "onestep".into()
    }

    fn factor(&self, f: &Arrow) -> Result<Arc<Factored>> {
        Ok(self.point(f)?.factored.clone())
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        self.one_step_square(sq)
    }

    fn has_comult(&self) -> bool {
        true
    }

    fn comult(&self, f: &Arrow) -> Result<Morphism> {
        self.one_step_comult(f)
    }
}
