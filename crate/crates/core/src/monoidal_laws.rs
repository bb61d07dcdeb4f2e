//! The second monoidal structure ⊙ on functorial factorisations, the
//! interchange map z, and the bialgebra form of the distributive law.

use std::sync::Arc;

use serde::Serialize;

use crate::arrows::{Arrow, Factored, Factorisation, FactorisationExt, Memo, Perturbed, Square};
use crate::error::{Error, Result};
use crate::fincat::{compose, compose_all, Morphism};

/// `F2 ⊙ F1`: factor with F1, then factor the left half with F2.
pub struct Odot {
    outer: Arc<dyn Factorisation>,
    inner: Arc<dyn Factorisation>,
    factors: Memo<Arrow, Arc<Factored>>,
}

impl Odot {
    pub fn new(outer: Arc<dyn Factorisation>, inner: Arc<dyn Factorisation>) -> Self {
        Odot { outer, inner, factors: Memo::default() }
    }
}

impl Factorisation for Odot {
    fn label(&self) -> String {
        format!("odot({}, {})", self.outer.label(), self.inner.label())
    }

    fn factor(&self, f: &Arrow) -> Result<Arc<Factored>> {
        self.factors.get_or_try(f, || {
            let f1 = self.inner.factor(f)?;
            let f2 = self.outer.factor(&f1.left())?;
            Ok(Arc::new(Factored { lambda: f2.lambda.clone(), rho: compose(&f1.rho, &f2.rho)? }))
        })
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        let e1 = self.inner.on_square(sq)?;
        let (l1f, l1g) = (self.inner.left(sq.src())?, self.inner.left(sq.tgt())?);
        self.outer.apply(&l1f, &l1g, sq.h(), &e1)
    }
}

/// The component of `z_{A,B,C,D}` at `f`, with its boundary checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZComponent {
    pub map: Morphism,
    /// Both composites through `E³L⁴f` agree before applying `E¹`.
    pub precondition: bool,
    /// The map commutes with the factorisations' maps from `X` and to `Y`.
    pub boundary: bool,
}

/// `E¹(E³(1, λ²_{R⁴f}), E²(ρ³_{L⁴f}, 1)): E¹L²R^{3⊙4}f → E¹R³L^{2⊗4}f`.
pub fn z_component(
    a: &dyn Factorisation,
    b: &dyn Factorisation,
    c: &dyn Factorisation,
    d: &dyn Factorisation,
    f: &Arrow,
) -> Result<ZComponent> {
    let f4 = d.factor(f)?;
    let (l4, r4) = (f4.left(), f4.right());
    let f2r = b.factor(&r4)?;
    let f3l = c.factor(&l4)?;
    let r34 = Arrow::new(compose(&f4.rho, &f3l.rho)?);
    let l24 = Arrow::new(compose(&f2r.lambda, &f4.lambda)?);
    let top = c.apply(&l4, &l24, &Morphism::identity(f.dom()), &f2r.lambda)?;
    let bottom = b.apply(&r34, &r4, &f3l.rho, &Morphism::identity(f.cod()))?;
    let src = b.left(&r34)?;
    let tgt = c.right(&l24)?;
    let expected = compose(&f2r.lambda, &f3l.rho)?;
    let precondition = compose(tgt.mor(), &top)? == expected && compose(&bottom, src.mor())? == expected;
    let sq = Square::new(src.clone(), tgt.clone(), top, bottom)?;
    let map = a.on_square(&sq)?;
    let (fs, ft) = (a.factor(&src)?, a.factor(&tgt)?);
    let boundary = compose(&map, &fs.lambda)? == compose(&ft.lambda, sq.h())?
        && compose(&ft.rho, &map)? == compose(sq.k(), &fs.rho)?;
    Ok(ZComponent { map, precondition, boundary })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BialgebraRow {
    pub arrow: usize,
    pub distributivity: bool,
    pub pentagon: bool,
    pub z_precondition: bool,
}

impl BialgebraRow {
    pub fn agree(&self) -> bool {
        self.distributivity == self.pentagon
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BialgebraReport {
    pub stage: String,
    /// The unit and counit axioms hold for every bialgebra of this shape.
    pub vacuous_axioms: Vec<&'static str>,
    pub rows: Vec<BialgebraRow>,
}

impl BialgebraReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(BialgebraRow::agree)
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.distributivity && r.pentagon && r.z_precondition)
    }
}

/// `σ_f π_f` against `π_{Lf} E(σ_f, π_f) σ_{Rf}`, computed directly.
pub fn distributivity_holds(stage: &dyn Factorisation, f: &Arrow) -> Result<bool> {
    let fa = stage.factor(f)?;
    let (lf, rf) = (fa.left(), fa.right());
    let (s, p) = (stage.comult(f)?, stage.mult(f)?);
    let delta = match Square::new(stage.left(&rf)?, stage.right(&lf)?, s.clone(), p.clone()) {
        Ok(sq) => sq,
        Err(Error::NotSquare(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let rhs = compose_all(&[&stage.comult(&rf)?, &stage.on_square(&delta)?, &stage.mult(&lf)?])?;
    Ok(compose(&s, &p)? == rhs)
}

/// The fourth bialgebra axiom at `f`, routed through `z_{E,E,E,E}`.
pub fn pentagon_holds(stage: &dyn Factorisation, f: &Arrow) -> Result<(bool, bool)> {
    let fa = stage.factor(f)?;
    let (lf, rf) = (fa.left(), fa.right());
    let (s, p) = (stage.comult(f)?, stage.mult(f)?);
    let fl = stage.factor(&lf)?;
    let r_odot = Arrow::new(compose(&fa.rho, &fl.rho)?);
    let id_x = Morphism::identity(f.dom());
    let id_y = Morphism::identity(f.cod());
    let e_s = stage.apply(&rf, &r_odot, &s, &id_y)?;
    let first = match Square::new(stage.left(&rf)?, stage.left(&r_odot)?, s.clone(), e_s) {
        Ok(sq) => stage.on_square(&sq)?,
        Err(Error::NotSquare(_)) => return Ok((false, true)),
        Err(e) => return Err(e),
    };
    let z = z_component(stage, stage, stage, stage, f)?;
    let fr = stage.factor(&rf)?;
    let l_tensor = Arrow::new(compose(&fr.lambda, &fa.lambda)?);
    let back = match Square::new(l_tensor.clone(), lf.clone(), id_x, p.clone()) {
        Ok(sq) => sq,
        Err(Error::NotSquare(_)) => return Ok((false, z.precondition)),
        Err(e) => return Err(e),
    };
    let e_p = stage.on_square(&back)?;
    let last = match Square::new(stage.right(&l_tensor)?, stage.right(&lf)?, e_p, p.clone()) {
        Ok(sq) => stage.on_square(&sq)?,
        Err(Error::NotSquare(_)) => return Ok((false, z.precondition)),
        Err(e) => return Err(e),
    };
    let lhs = compose_all(&[&stage.comult(&rf)?, &first, &z.map, &last, &stage.mult(&lf)?])?;
    Ok((lhs == compose(&s, &p)?, z.precondition && z.boundary))
}

/// Distributivity and the bialgebra pentagon, each computed independently.
pub fn bialgebra_check(stage: &dyn Factorisation, corpus: &[Arrow]) -> Result<BialgebraReport> {
    if !stage.has_comult() {
        return Err(Error::MissingComult(stage.label()));
    }
    if !stage.has_mult() {
        return Err(Error::MissingMult(stage.label()));
    }
    let rows = corpus
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let distributivity = distributivity_holds(stage, f)?;
            let (pentagon, z_precondition) = pentagon_holds(stage, f)?;
            Ok(BialgebraRow { arrow: i, distributivity, pentagon, z_precondition })
        })
        .collect::<Result<_>>()?;
    Ok(BialgebraReport {
        stage: stage.label(),
        vacuous_axioms: vec!["unit (through I)", "counit (through the terminal factorisation)", "unit-counit"],
        rows,
    })
}

/// Rotate `π_f` on the finite-set elements of `E(Rf)` outside the image of
/// `λ_{Rf}`; the unit law survives, the rest generally does not.
pub fn rotate_mult_off_unit(base: Arc<dyn Factorisation>) -> Perturbed {
    let inner = base.clone();
    Perturbed::new(base).with_mult(move |f, p| {
        let rf = inner.right(f)?;
        let unit = inner.factor(&rf)?.lambda.clone();
        let (Some(pm), Some(um)) = (p.as_set(), unit.as_set()) else {
            return Ok(p);
        };
        let off: Vec<usize> = (0..pm.len()).filter(|e| !um.contains(e)).collect();
        let mut out = pm.to_vec();
        for (i, &e) in off.iter().enumerate() {
            out[e] = pm[off[(i + 1) % off.len()]];
        }
        Morphism::set_map(pm.len(), p.cod().size(), out)
    })
}
