use serde::Serialize;

use super::{Arrow, Factorisation, Square};
use crate::error::{Error, Result};
use crate::fincat::{compose, compose_all, Morphism};

/// Arrows and squares on which laws are evaluated.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub arrows: Vec<Arrow>,
    pub squares: Vec<Square>,
}

impl Corpus {
    pub fn from_arrows(arrows: Vec<Arrow>) -> Self {
        Corpus { arrows, squares: Vec::new() }
    }
}

/// The two sides of a failed equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub context: String,
    pub lhs: Morphism,
    pub rhs: Morphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub checked: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub stage: String,
    pub laws: Vec<LawOutcome>,
}

impl LawReport {
    pub fn new(stage: String) -> Self {
        LawReport { stage, laws: Vec::new() }
    }

    pub fn all_passed(&self) -> bool {
        self.laws.iter().all(LawOutcome::passed)
    }

    pub fn outcome(&self, law: &str) -> Option<&LawOutcome> {
        self.laws.iter().find(|o| o.law == law)
    }

    pub fn failed_laws(&self) -> Vec<&str> {
        self.laws.iter().filter(|o| !o.passed()).map(|o| o.law.as_str()).collect()
    }

    /// Record one instance of `law`: `lhs == rhs`.
    pub fn record(&mut self, law: &str, context: impl FnOnce() -> String, lhs: &Morphism, rhs: &Morphism) {
        let idx = match self.laws.iter().position(|o| o.law == law) {
            Some(i) => i,
            None => {
                self.laws.push(LawOutcome { law: law.into(), checked: 0, failed: 0, witness: None });
                self.laws.len() - 1
            }
        };
        let o = &mut self.laws[idx];
        o.checked += 1;
        if lhs != rhs {
            o.failed += 1;
            if o.witness.is_none() {
                o.witness = Some(Witness { context: context(), lhs: lhs.clone(), rhs: rhs.clone() });
            }
        }
    }

    /// Record the commuting condition of a square that could not be built.
    fn record_square(
        &mut self,
        law: &str,
        context: impl Fn() -> String,
        src: &Arrow,
        tgt: &Arrow,
        h: &Morphism,
        k: &Morphism,
    ) -> Result<Option<Square>> {
        match Square::new(src.clone(), tgt.clone(), h.clone(), k.clone()) {
            Ok(s) => Ok(Some(s)),
            Err(Error::NotSquare(_)) => {
                let lhs = compose(tgt.mor(), h)?;
                let rhs = compose(k, src.mor())?;
                self.record(law, || format!("{} (square does not commute)", context()), &lhs, &rhs);
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

fn ctx(what: &str, i: usize) -> impl Fn() -> String + '_ {
    move || format!("{what} #{i}")
}

/// Evaluate every law applicable to the structure `stage` carries.
pub fn check_stage(stage: &dyn Factorisation, corpus: &Corpus) -> Result<LawReport> {
    let mut rep = LawReport::new(stage.label());
    let (comonad, monad) = (stage.has_comult(), stage.has_mult());
    for (i, f) in corpus.arrows.iter().enumerate() {
        let c = ctx("arrow", i);
        let fa = stage.factor(f)?;
        rep.record("factorisation", &c, &compose(&fa.rho, &fa.lambda)?, f.mor());
        let id_e = Morphism::identity(fa.mid());
        rep.record("functor-identity", &c, &stage.on_square(&Square::identity(f))?, &id_e);
        let id_x = Morphism::identity(f.dom());
        let id_y = Morphism::identity(f.cod());
        let (lf, rf) = (fa.left(), fa.right());

        let mut sigma = None;
        if comonad {
            let s = stage.comult(f)?;
            let fl = stage.factor(&lf)?;
            rep.record("sigma-lambda", &c, &compose(&s, &fa.lambda)?, &fl.lambda);
            rep.record("counit-left", &c, &compose(&fl.rho, &s)?, &id_e);
            if let Some(sq) = rep.record_square("counit-right", &c, &lf, f, &id_x, &fa.rho)? {
                rep.record("counit-right", &c, &compose(&stage.on_square(&sq)?, &s)?, &id_e);
            }
            if let Some(sq) = rep.record_square("coassociativity", &c, &lf, &fl.left(), &id_x, &s)? {
                let lhs = compose(&stage.on_square(&sq)?, &s)?;
                let rhs = compose(&stage.comult(&lf)?, &s)?;
                rep.record("coassociativity", &c, &lhs, &rhs);
            }
            sigma = Some((s, fl));
        }
        let mut pi = None;
        if monad {
            let p = stage.mult(f)?;
            let fr = stage.factor(&rf)?;
            rep.record("rho-pi", &c, &compose(&fa.rho, &p)?, &fr.rho);
            rep.record("unit-left", &c, &compose(&p, &fr.lambda)?, &id_e);
            if let Some(sq) = rep.record_square("unit-right", &c, f, &rf, &fa.lambda, &id_y)? {
                rep.record("unit-right", &c, &compose(&p, &stage.on_square(&sq)?)?, &id_e);
            }
            if let Some(sq) = rep.record_square("associativity", &c, &fr.right(), &rf, &p, &id_y)? {
                let lhs = compose(&p, &stage.on_square(&sq)?)?;
                let rhs = compose(&p, &stage.mult(&rf)?)?;
                rep.record("associativity", &c, &lhs, &rhs);
            }
            pi = Some((p, fr));
        }
        if let (Some((s, fl)), Some((p, fr))) = (&sigma, &pi) {
            // Δ_f: the square (σ_f, π_f) from L(Rf) to R(Lf)
            rep.record("delta-square", &c, &compose(&fl.rho, s)?, &compose(p, &fr.lambda)?);
            if let Some(delta) = rep.record_square("distributivity", &c, &fr.left(), &fl.right(), s, p)? {
                let lhs = compose(s, p)?;
                let rhs = compose_all(&[&stage.comult(&rf)?, &stage.on_square(&delta)?, &stage.mult(&lf)?])?;
                rep.record("distributivity", &c, &lhs, &rhs);
            }
        }
    }

    for (i, sq) in corpus.squares.iter().enumerate() {
        let c = ctx("square", i);
        let (f, g) = (sq.src(), sq.tgt());
        let (fa, ga) = (stage.factor(f)?, stage.factor(g)?);
        let e = stage.on_square(sq)?;
        rep.record("lambda-naturality", &c, &compose(&e, &fa.lambda)?, &compose(&ga.lambda, sq.h())?);
        rep.record("rho-naturality", &c, &compose(&ga.rho, &e)?, &compose(sq.k(), &fa.rho)?);
        if comonad {
            if let Some(lsq) = rep.record_square("sigma-naturality", &c, &fa.left(), &ga.left(), sq.h(), &e)? {
                let lhs = compose(&stage.comult(g)?, &e)?;
                let rhs = compose(&stage.on_square(&lsq)?, &stage.comult(f)?)?;
                rep.record("sigma-naturality", &c, &lhs, &rhs);
            }
        }
        if monad {
            if let Some(rsq) = rep.record_square("pi-naturality", &c, &fa.right(), &ga.right(), &e, sq.k())? {
                let lhs = compose(&stage.mult(g)?, &stage.on_square(&rsq)?)?;
                let rhs = compose(&e, &stage.mult(f)?)?;
                rep.record("pi-naturality", &c, &lhs, &rhs);
            }
        }
        for (j, next) in corpus.squares.iter().enumerate() {
            if next.src() == sq.tgt() {
                let both = next.after(sq)?;
                let lhs = stage.on_square(&both)?;
                let rhs = compose(&stage.on_square(next)?, &e)?;
                rep.record("functor-composition", || format!("squares #{i} then #{j}"), &lhs, &rhs);
            }
        }
    }
    Ok(rep)
}
