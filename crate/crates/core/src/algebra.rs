//! L-maps and R-maps: coalgebras for L and algebras for R, the canonical
//! lifting, right lifting data, and the closure properties of L-maps.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::arrows::{full_problem_set, Arrow, Factorisation, FactorisationExt, Square};
use crate::error::{Error, Result};
use crate::fincat::{chain_colimit, compose, compose_all, is_iso, pushout, HomCap, Morphism};
use crate::freeseq::ConvergedNwfs;
use crate::onestep::OneStep;

/// The factorisation a structure lives over.
#[derive(Clone)]
pub enum StageRef {
    OneStep(Arc<OneStep>),
    Converged(Arc<ConvergedNwfs>),
    Custom(Arc<dyn Factorisation>),
}

impl StageRef {
    pub fn one_step(t: Arc<OneStep>) -> Self {
        StageRef::OneStep(t)
    }

    pub fn converged(n: Arc<ConvergedNwfs>) -> Self {
        StageRef::Converged(n)
    }

    pub fn custom(f: Arc<dyn Factorisation>) -> Self {
        StageRef::Custom(f)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            StageRef::OneStep(_) => "onestep",
            StageRef::Converged(_) => "converged",
            StageRef::Custom(_) => "custom",
        }
    }

    pub fn stage(&self) -> &dyn Factorisation {
        match self {
            StageRef::OneStep(t) => t.as_ref(),
            StageRef::Converged(n) => n.as_ref(),
            StageRef::Custom(f) => f.as_ref(),
        }
    }

    fn address(&self) -> *const () {
        match self {
            StageRef::OneStep(t) => Arc::as_ptr(t) as *const (),
            StageRef::Converged(n) => Arc::as_ptr(n) as *const (),
            StageRef::Custom(f) => Arc::as_ptr(f) as *const (),
        }
    }

    /// Whether both refer to the very same factorisation.
    pub fn same(&self, other: &StageRef) -> bool {
        self.tag() == other.tag() && self.address() == other.address()
    }

    /// The one-step comonad underlying this stage, if any.
    pub fn generating(&self) -> Result<Arc<OneStep>> {
        match self {
            StageRef::OneStep(t) => Ok(t.clone()),
            StageRef::Converged(n) => Ok(n.sequence().one_step().clone()),
            StageRef::Custom(_) => Err(Error::StageMismatch("a custom stage has no generating set".into())),
        }
    }

    fn require_same(&self, other: &StageRef) -> Result<()> {
        if self.same(other) {
            Ok(())
        } else {
            Err(Error::StageMismatch(format!("structures over `{}` and `{}`", self.tag(), other.tag())))
        }
    }
}

impl std::fmt::Debug for StageRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StageRef({})", self.stage().label())
    }
}

/// Pass/fail per (co)algebra equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axioms: Vec<(String, bool)>,
}

impl AxiomReport {
    fn push(&mut self, name: &str, ok: bool) {
        self.axioms.push((name.into(), ok));
    }

    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|(_, ok)| *ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.axioms.iter().find(|(_, ok)| !ok).map(|(n, _)| n.as_str())
    }
}

/// `s ∘ f = λ_f`, `ρ_f ∘ s = 1`, `σ_f ∘ s = E(1, s) ∘ s`.
pub fn coalgebra_report(stage: &dyn Factorisation, f: &Arrow, s: &Morphism) -> Result<AxiomReport> {
    if s.dom() != f.cod() {
        return Err(Error::DomainMismatch("coalgebra map must start at the codomain".into()));
    }
    let fa = stage.factor(f)?;
    if s.cod() != fa.mid() {
        return Err(Error::DomainMismatch("coalgebra map must land in the middle object".into()));
    }
    let mut rep = AxiomReport { axioms: Vec::new() };
    rep.push("s.f = lambda", compose(s, f.mor())? == fa.lambda);
    rep.push("rho.s = id", compose(&fa.rho, s)?.is_identity());
    let coassoc = match Square::new(f.clone(), fa.left(), Morphism::identity(f.dom()), s.clone()) {
        Ok(sq) => compose(&stage.comult(f)?, s)? == compose(&stage.on_square(&sq)?, s)?,
        Err(_) => false,
    };
    rep.push("sigma.s = E(1,s).s", coassoc);
    Ok(rep)
}

/// `g ∘ p = ρ_g`, `p ∘ λ_g = 1`, and when π exists `p ∘ π_g = p ∘ E(p, 1)`.
pub fn algebra_report(stage: &dyn Factorisation, g: &Arrow, p: &Morphism) -> Result<AxiomReport> {
    let fa = stage.factor(g)?;
    if p.dom() != fa.mid() || p.cod() != g.dom() {
        return Err(Error::DomainMismatch("algebra map must run from the middle object to the domain".into()));
    }
    let mut rep = AxiomReport { axioms: Vec::new() };
    rep.push("g.p = rho", compose(g.mor(), p)? == fa.rho);
    rep.push("p.lambda = id", compose(p, &fa.lambda)?.is_identity());
    if stage.has_mult() {
        let assoc = match Square::new(fa.right(), g.clone(), p.clone(), Morphism::identity(g.cod())) {
            Ok(sq) => compose(p, &stage.mult(g)?)? == compose(p, &stage.on_square(&sq)?)?,
            Err(_) => false,
        };
        rep.push("p.pi = p.E(p,1)", assoc);
    }
    Ok(rep)
}

/// An arrow with an L-coalgebra structure `s: Y → Ef`.
#[derive(Clone, Debug)]
pub struct LMapStructure {
    stage: StageRef,
    arrow: Arrow,
    s: Morphism,
}

impl LMapStructure {
    pub fn new(stage: StageRef, arrow: Arrow, s: Morphism) -> Result<Self> {
        let rep = coalgebra_report(stage.stage(), &arrow, &s)?;
        match rep.first_failure() {
            Some(axiom) => Err(Error::NotCoalgebra(axiom.into())),
            None => Ok(LMapStructure { stage, arrow, s }),
        }
    }

    pub fn stage(&self) -> &StageRef {
        &self.stage
    }

    pub fn arrow(&self) -> &Arrow {
        &self.arrow
    }

    pub fn map(&self) -> &Morphism {
        &self.s
    }

    pub fn to_json(&self) -> Value {
        json!({"arrow": self.arrow, "stage": self.stage.tag(), "s": self.s})
    }

    pub fn from_json(value: &Value, stage: StageRef) -> Result<Self> {
        let tag = value.get("stage").and_then(Value::as_str).unwrap_or_default();
        if tag != stage.tag() {
            return Err(Error::StageMismatch(format!("structure is over `{tag}`, expected `{}`", stage.tag())));
        }
        let arrow = serde_json::from_value(value.get("arrow").cloned().unwrap_or_default())?;
        let s = serde_json::from_value(value.get("s").cloned().unwrap_or_default())?;
        LMapStructure::new(stage, arrow, s)
    }

    /// Whether the square `(a, b): self → other` commutes with the structures.
    pub fn is_morphism_to(&self, other: &LMapStructure, sq: &Square) -> Result<bool> {
        self.stage.require_same(&other.stage)?;
        if sq.src() != &self.arrow || sq.tgt() != &other.arrow {
            return Err(Error::DomainMismatch("square does not run between the structured arrows".into()));
        }
        Ok(compose(&other.s, sq.k())? == compose(&self.stage.stage().on_square(sq)?, &self.s)?)
    }
}

impl PartialEq for LMapStructure {
    fn eq(&self, other: &Self) -> bool {
        self.stage.same(&other.stage) && self.arrow == other.arrow && self.s == other.s
    }
}

/// An arrow with an R-algebra structure `p: Eg → C`.
#[derive(Clone, Debug)]
pub struct RMapStructure {
    stage: StageRef,
    arrow: Arrow,
    p: Morphism,
}

impl RMapStructure {
    pub fn new(stage: StageRef, arrow: Arrow, p: Morphism) -> Result<Self> {
        let rep = algebra_report(stage.stage(), &arrow, &p)?;
        match rep.first_failure() {
            Some(axiom) => Err(Error::NotAlgebra(axiom.into())),
            None => Ok(RMapStructure { stage, arrow, p }),
        }
    }

    pub fn stage(&self) -> &StageRef {
        &self.stage
    }

    pub fn arrow(&self) -> &Arrow {
        &self.arrow
    }

    pub fn map(&self) -> &Morphism {
        &self.p
    }

    pub fn to_json(&self) -> Value {
        json!({"arrow": self.arrow, "stage": self.stage.tag(), "p": self.p})
    }

    pub fn from_json(value: &Value, stage: StageRef) -> Result<Self> {
        let tag = value.get("stage").and_then(Value::as_str).unwrap_or_default();
        if tag != stage.tag() {
            return Err(Error::StageMismatch(format!("structure is over `{tag}`, expected `{}`", stage.tag())));
        }
        let arrow = serde_json::from_value(value.get("arrow").cloned().unwrap_or_default())?;
        let p = serde_json::from_value(value.get("p").cloned().unwrap_or_default())?;
        RMapStructure::new(stage, arrow, p)
    }

    /// Whether the square `(m, n): self → other` commutes with the structures.
    pub fn is_morphism_to(&self, other: &RMapStructure, sq: &Square) -> Result<bool> {
        self.stage.require_same(&other.stage)?;
        if sq.src() != &self.arrow || sq.tgt() != &other.arrow {
            return Err(Error::DomainMismatch("square does not run between the structured arrows".into()));
        }
        Ok(compose(sq.h(), &self.p)? == compose(&other.p, &self.stage.stage().on_square(sq)?)?)
    }
}

impl PartialEq for RMapStructure {
    fn eq(&self, other: &Self) -> bool {
        self.stage.same(&other.stage) && self.arrow == other.arrow && self.p == other.p
    }
}

/// One chosen filler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftEntry {
    pub generator: usize,
    pub square: Square,
    pub filler: Morphism,
}

/// A filler for every lifting problem of every generator against `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RightLiftingData {
    arrow: Arrow,
    entries: Vec<LiftEntry>,
}

impl RightLiftingData {
    /// Checks `δ(x) ∘ f_j = h` and `g ∘ δ(x) = k` for every entry.
    pub fn new(arrow: Arrow, entries: Vec<LiftEntry>) -> Result<Self> {
        for e in &entries {
            if e.square.tgt() != &arrow {
                return Err(Error::DomainMismatch("lifting problem is not against this arrow".into()));
            }
            let f = e.square.src();
            if compose(&e.filler, f.mor())? != *e.square.h() || compose(arrow.mor(), &e.filler)? != *e.square.k() {
                return Err(Error::NotAlgebra("filler does not solve its lifting problem".into()));
            }
        }
        Ok(RightLiftingData { arrow, entries })
    }

    pub fn arrow(&self) -> &Arrow {
        &self.arrow
    }

    pub fn entries(&self) -> &[LiftEntry] {
        &self.entries
    }

    pub fn filler(&self, generator: usize, square: &Square) -> Option<&Morphism> {
        self.entries.iter().find(|e| e.generator == generator && &e.square == square).map(|e| &e.filler)
    }

    /// Whether `γ: g → g'` carries these fillers to those of `other`.
    pub fn is_morphism_to(&self, other: &RightLiftingData, gamma: &Square) -> Result<bool> {
        for e in &self.entries {
            let moved = gamma.after(&e.square)?;
            let Some(theirs) = other.filler(e.generator, &moved) else {
                return Err(Error::IncompleteData("target data misses a transported problem".into()));
            };
            if compose(gamma.h(), &e.filler)? != *theirs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A contractible pair `j, k: g ⇉ h` with the maps exhibiting `f` as its equaliser.
#[derive(Clone, Debug)]
pub struct ContractiblePairData {
    pub i: Square,
    pub p: Square,
    pub j: Square,
    pub k: Square,
    pub q: Square,
    pub on_g: LMapStructure,
    pub on_h: LMapStructure,
}

impl ContractiblePairData {
    /// `f` as the equaliser of `σ_f, E(1, s): Lf ⇉ LLf`, split by
    /// `(1, ρ_f)` and `(1, ρ_{Lf})`.
    pub fn canonical(l: &LMapStructure) -> Result<Self> {
        let stage = l.stage.stage();
        let f = &l.arrow;
        let fa = stage.factor(f)?;
        let lf = fa.left();
        let fl = stage.factor(&lf)?;
        let llf = fl.left();
        let id_x = Morphism::identity(f.dom());
        let sigma = stage.comult(f)?;
        let on_g = LMapStructure::new(l.stage.clone(), lf.clone(), sigma.clone())?;
        let on_h = LMapStructure::new(l.stage.clone(), llf.clone(), stage.comult(&lf)?)?;
        let es = stage.apply(f, &lf, &id_x, &l.s)?;
        Ok(ContractiblePairData {
            i: Square::new(f.clone(), lf.clone(), id_x.clone(), l.s.clone())?,
            p: Square::new(lf.clone(), f.clone(), id_x.clone(), fa.rho.clone())?,
            j: Square::new(lf.clone(), llf.clone(), id_x.clone(), sigma)?,
            k: Square::new(lf.clone(), llf.clone(), id_x.clone(), es)?,
            q: Square::new(llf, lf, id_x, fl.rho.clone())?,
            on_g,
            on_h,
        })
    }

    /// Names the first violated identity, if any.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::NotContractible(what.into()));
        let (f, g, h) = (self.i.src(), self.i.tgt(), self.j.tgt());
        if self.p.src() != g || self.p.tgt() != f {
            return fail("p: g -> f");
        }
        if self.j.src() != g || self.k.src() != g || self.k.tgt() != h {
            return fail("j, k: g -> h");
        }
        if self.q.src() != h || self.q.tgt() != g {
            return fail("q: h -> g");
        }
        if self.on_g.arrow() != g || self.on_h.arrow() != h {
            return fail("structures sit on g and h");
        }
        if self.p.after(&self.i)? != Square::identity(f) {
            return fail("p.i = id");
        }
        if self.q.after(&self.j)? != Square::identity(g) {
            return fail("q.j = id");
        }
        if self.j.after(&self.i)? != self.k.after(&self.i)? {
            return fail("j.i = k.i");
        }
        if self.q.after(&self.k)? != self.i.after(&self.p)? {
            return fail("q.k = i.p");
        }
        if !self.on_g.is_morphism_to(&self.on_h, &self.j)? {
            return fail("j is a coalgebra morphism");
        }
        if !self.on_g.is_morphism_to(&self.on_h, &self.k)? {
            return fail("k is a coalgebra morphism");
        }
        Ok(())
    }

    /// `r = E(p₁, p₂) ∘ s ∘ i₂`.
    pub fn retract_map(&self) -> Result<Morphism> {
        let stage = self.on_g.stage().stage();
        compose_all(&[self.i.k(), self.on_g.map(), &stage.on_square(&self.p)?])
    }
}

/// The canonical filler `p ∘ E(h, k) ∘ s`.
pub fn solve_lifting(l: &LMapStructure, r: &RMapStructure, problem: &Square) -> Result<Morphism> {
    l.stage.require_same(&r.stage)?;
    if problem.src() != &l.arrow || problem.tgt() != &r.arrow {
        return Err(Error::DomainMismatch("problem does not run from the L-map to the R-map".into()));
    }
    let e = l.stage.stage().on_square(problem)?;
    let j = compose_all(&[&l.s, &e, &r.p])?;
    if compose(&j, l.arrow.mor())? != *problem.h() || compose(r.arrow.mor(), &j)? != *problem.k() {
        return Err(Error::Internal("canonical filler does not solve the problem".into()));
    }
    Ok(j)
}

/// The canonical L-map structure on generator `j` over `stage`.
pub fn generator_lmap(stage: &StageRef, j: usize) -> Result<LMapStructure> {
    let t = stage.generating()?;
    match stage {
        StageRef::OneStep(_) => t.generator_coalgebra(j),
        _ => {
            let l1 = t.generator_coalgebra(j)?;
            coerce_lmap(&l1, stage)
        }
    }
}

/// Push an L¹-coalgebra to the converged stage along χ.
pub fn coerce_lmap(l: &LMapStructure, target: &StageRef) -> Result<LMapStructure> {
    let StageRef::Converged(n) = target else {
        return Err(Error::StageMismatch("coercion targets the converged stage".into()));
    };
    let StageRef::OneStep(t) = l.stage() else {
        return Err(Error::StageMismatch("coercion starts from the one-step stage".into()));
    };
    if !Arc::ptr_eq(t, n.sequence().one_step()) {
        return Err(Error::StageMismatch("stages come from different generating sets".into()));
    }
    let s = compose(&n.chi(&l.arrow)?, &l.s)?;
    LMapStructure::new(target.clone(), l.arrow.clone(), s).map_err(internal("coerced coalgebra"))
}

/// Restrict an R-algebra on the converged stage to an R¹-algebra along χ.
pub fn coerce_rmap(r: &RMapStructure, target: &StageRef) -> Result<RMapStructure> {
    let StageRef::Converged(n) = r.stage() else {
        return Err(Error::StageMismatch("restriction starts from the converged stage".into()));
    };
    let StageRef::OneStep(t) = target else {
        return Err(Error::StageMismatch("restriction targets the one-step stage".into()));
    };
    if !Arc::ptr_eq(t, n.sequence().one_step()) {
        return Err(Error::StageMismatch("stages come from different generating sets".into()));
    }
    let p = compose(&r.p, &n.chi(&r.arrow)?)?;
    RMapStructure::new(target.clone(), r.arrow.clone(), p).map_err(internal("restricted algebra"))
}

fn internal(what: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Internal(format!("{what}: {e}"))
}

/// Solve every generator problem against `r` with the generator coalgebras.
pub fn delta_from_rmap(r: &RMapStructure) -> Result<RightLiftingData> {
    let t = r.stage.generating()?;
    let gens: Vec<LMapStructure> =
        (0..t.generators().len()).map(|j| generator_lmap(&r.stage, j)).collect::<Result<_>>()?;
    let entries = full_problem_set(t.generators(), &r.arrow, t.cap())?
        .into_iter()
        .map(|x| {
            let filler = solve_lifting(&gens[x.generator], r, &x.square)?;
            Ok(LiftEntry { generator: x.generator, square: x.square, filler })
        })
        .collect::<Result<_>>()?;
    RightLiftingData::new(r.arrow.clone(), entries).map_err(internal("lifting data from an algebra"))
}

/// The algebra induced by the fillers, extended to `stage` by freeness.
pub fn rmap_from_delta(delta: &RightLiftingData, stage: &StageRef) -> Result<RMapStructure> {
    let t = stage.generating()?;
    let g = &delta.arrow;
    let fillers = full_problem_set(t.generators(), g, t.cap())?
        .iter()
        .map(|x| {
            delta
                .filler(x.generator, &x.square)
                .cloned()
                .ok_or_else(|| Error::IncompleteData(format!("no filler for a problem on generator {}", x.generator)))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = t.algebra_from_fillers(g, &fillers)?;
    let p = match stage {
        StageRef::OneStep(_) => k,
        StageRef::Converged(n) => n.sequence().extend_algebra(g, &k, n.alpha())?,
        StageRef::Custom(_) => unreachable!("custom stages have no generating set"),
    };
    RMapStructure::new(stage.clone(), g.clone(), p).map_err(internal("algebra from lifting data"))
}

/// `u = π_{gf} ∘ E(E(1, g), 1) ∘ E(s, 1) ∘ t` on `g ∘ f`.
pub fn compose_lmaps(first: &LMapStructure, second: &LMapStructure) -> Result<LMapStructure> {
    first.stage.require_same(&second.stage)?;
    let stage = first.stage.stage();
    if !stage.has_mult() {
        return Err(Error::StageMismatch(format!("composition needs a multiplication, `{}` has none", stage.label())));
    }
    let (f, g) = (&first.arrow, &second.arrow);
    if f.cod() != g.dom() {
        return Err(Error::NotComposable(0));
    }
    let gf = Arrow::new(compose(g.mor(), f.mor())?);
    let fa = stage.factor(f)?;
    let g_after_rho = Arrow::new(compose(g.mor(), &fa.rho)?);
    let id_z = Morphism::identity(g.cod());
    let e_s = stage.apply(g, &g_after_rho, &first.s, &id_z)?;
    let e_g = stage.apply(f, &gf, &Morphism::identity(f.dom()), g.mor())?;
    let e_eg = stage.apply(&g_after_rho, &stage.right(&gf)?, &e_g, &id_z)?;
    let u = compose_all(&[&second.s, &e_s, &e_eg, &stage.mult(&gf)?])?;
    LMapStructure::new(first.stage.clone(), gf, u).map_err(internal("composite coalgebra"))
}

/// The unique structure on an isomorphism: `s = λ_f ∘ f⁻¹`.
pub fn identity_lmap(stage: &StageRef, f: &Arrow) -> Result<LMapStructure> {
    let inv = is_iso(f.mor()).ok_or(Error::NotIso)?;
    let s = compose(&stage.stage().factor(f)?.lambda, &inv)?;
    LMapStructure::new(stage.clone(), f.clone(), s).map_err(internal("structure on an isomorphism"))
}

/// Push `(f, s)` out along `h`; returns the square `(h, k): f → g` and the
/// structure `t = [λ_g, E(h, k) ∘ s]` on `g`.
pub fn pushout_lmap(l: &LMapStructure, h: &Morphism) -> Result<(Square, LMapStructure)> {
    let f = &l.arrow;
    let po = pushout(h, f.mor())?;
    let g = Arrow::new(po.leg(0).clone());
    let sq = Square::new(f.clone(), g.clone(), h.clone(), po.leg(1).clone())?;
    let stage = l.stage.stage();
    let ga = stage.factor(&g)?;
    let t = po.universal(ga.mid(), &[ga.lambda.clone(), compose(&stage.on_square(&sq)?, &l.s)?])?;
    let out = LMapStructure::new(l.stage.clone(), g, t).map_err(internal("pushout coalgebra"))?;
    Ok((sq, out))
}

/// The structure `E(p₁, p₂) ∘ s ∘ i₂` transferred to the equaliser.
pub fn retract_equalizer_lmap(data: &ContractiblePairData) -> Result<LMapStructure> {
    data.check()?;
    let r = data.retract_map()?;
    LMapStructure::new(data.on_g.stage.clone(), data.i.src().clone(), r).map_err(internal("retract coalgebra"))
}

/// The structure on the composite of a finite chain of L-maps.
pub fn transfinite_composite_lmaps(chain: &[LMapStructure]) -> Result<LMapStructure> {
    let (head, rest) = chain.split_first().ok_or(Error::NotComposable(0))?;
    for (i, w) in chain.windows(2).enumerate() {
        if w[0].arrow.cod() != w[1].arrow.dom() {
            return Err(Error::NotComposable(i));
        }
    }
    let maps: Vec<Morphism> = chain.iter().map(|l| l.arrow.mor().clone()).collect();
    let colim = chain_colimit(head.arrow.dom(), &maps)?;
    let mut acc = head.clone();
    for l in rest {
        acc = compose_lmaps(&acc, l)?;
    }
    if acc.arrow.mor() != colim.leg(0) {
        return Err(Error::Internal("folded composite differs from the chain colimit leg".into()));
    }
    Ok(acc)
}

/// Every algebra on a finite-set arrow over `stage`, found by fixing the
/// image of each element of `Eg` within its admissible fibre.
pub fn enumerate_set_rmaps(stage: &StageRef, g: &Arrow, cap: HomCap) -> Result<Vec<RMapStructure>> {
    let fa = stage.stage().factor(g)?;
    let (Some(n), Some(c)) = (fa.mid().as_set(), g.dom().as_set()) else {
        return Err(Error::BackendMismatch("algebra enumeration is for finite sets".into()));
    };
    let gm = g.mor().as_set().expect("finite-set arrow");
    let (lambda, rho) = (fa.lambda.as_set().expect("finite-set map"), fa.rho.as_set().expect("finite-set map"));
    let mut fixed = vec![None; n];
    for (x, &e) in lambda.iter().enumerate() {
        fixed[e] = Some(x);
    }
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|e| match fixed[e] {
            Some(x) => vec![x],
            None => (0..c).filter(|&x| gm[x] == rho[e]).collect(),
        })
        .collect();
    let total = choices.iter().try_fold(1u128, |acc, v| acc.checked_mul(v.len() as u128)).unwrap_or(u128::MAX);
    cap.check(total)?;
    if choices.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let mut idx = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let map: Vec<usize> = idx.iter().zip(&choices).map(|(&i, v)| v[i]).collect();
        let p = Morphism::set_map(n, c, map)?;
        if algebra_report(stage.stage(), g, &p)?.all_hold() {
            out.push(RMapStructure { stage: stage.clone(), arrow: g.clone(), p });
        }
        let mut d = n;
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < choices[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Every choice of fillers for the generator problems against `g`.
pub fn enumerate_lifting_data(t: &OneStep, g: &Arrow) -> Result<Vec<RightLiftingData>> {
    let problems = full_problem_set(t.generators(), g, t.cap())?;
    let mut per_problem = Vec::with_capacity(problems.len());
    for x in &problems {
        let f = t.generators().arrow(x.generator);
        let fillers: Vec<Morphism> = crate::fincat::hom_enumerate(f.cod(), g.dom(), t.cap())?
            .into_iter()
            .filter(|d| compose(d, f.mor()).ok().as_ref() == Some(x.square.h()))
            .filter(|d| compose(g.mor(), d).ok().as_ref() == Some(x.square.k()))
            .collect();
        per_problem.push(fillers);
    }
    let total = per_problem.iter().try_fold(1u128, |acc, v| acc.checked_mul(v.len() as u128)).unwrap_or(u128::MAX);
    t.cap().check(total)?;
    let mut out = Vec::new();
    if per_problem.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    let mut idx = vec![0usize; problems.len()];
    loop {
        let entries = problems
            .iter()
            .zip(&idx)
            .zip(&per_problem)
            .map(|((x, &i), v)| LiftEntry { generator: x.generator, square: x.square.clone(), filler: v[i].clone() })
            .collect();
        out.push(RightLiftingData { arrow: g.clone(), entries });
        let mut d = idx.len();
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < per_problem[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}
