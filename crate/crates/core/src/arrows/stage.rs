use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use super::{Arrow, Square};
use crate::error::{Error, Result};
use crate::fincat::{Morphism, Object};

/// The factorisation `ρ ∘ λ` of one arrow through its middle object.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Factored {
    pub lambda: Morphism,
    pub rho: Morphism,
}

impl Factored {
    pub fn mid(&self) -> &Object {
        self.lambda.cod()
    }

    /// `L f = λ_f`.
    pub fn left(&self) -> Arrow {
        Arrow::new(self.lambda.clone())
    }

    /// `R f = ρ_f`.
    pub fn right(&self) -> Arrow {
        Arrow::new(self.rho.clone())
    }
}

/// A functorial factorisation, optionally with comultiplication σ and
/// multiplication π.
pub trait Factorisation: Send + Sync {
    fn label(&self) -> String;

    fn factor(&self, f: &Arrow) -> Result<Arc<Factored>>;

    /// `E(h, k): Ef → Eg`.
    fn on_square(&self, sq: &Square) -> Result<Morphism>;

    fn has_comult(&self) -> bool {
        false
    }

    fn has_mult(&self) -> bool {
        false
    }

    /// `σ_f: Ef → E(Lf)`.
    fn comult(&self, _f: &Arrow) -> Result<Morphism> {
        Err(Error::MissingComult(self.label()))
    }

    /// `π_f: E(Rf) → Ef`.
    fn mult(&self, _f: &Arrow) -> Result<Morphism> {
        Err(Error::MissingMult(self.label()))
    }
}

pub trait FactorisationExt: Factorisation {
    fn left(&self, f: &Arrow) -> Result<Arrow> {
        Ok(self.factor(f)?.left())
    }

    fn right(&self, f: &Arrow) -> Result<Arrow> {
        Ok(self.factor(f)?.right())
    }

    fn mid(&self, f: &Arrow) -> Result<Object> {
        Ok(self.factor(f)?.mid().clone())
    }

    /// E applied to the square `(h, k): src → tgt`, checking that it commutes.
    fn apply(&self, src: &Arrow, tgt: &Arrow, h: &Morphism, k: &Morphism) -> Result<Morphism> {
        self.on_square(&Square::new(src.clone(), tgt.clone(), h.clone(), k.clone())?)
    }
}

impl<T: Factorisation + ?Sized> FactorisationExt for T {}

/// A concurrent memo table. Values are computed outside the lock so that
/// recursive queries of the same table do not deadlock.
pub struct Memo<K, V> {
    map: Mutex<HashMap<K, V>>,
}

impl<K, V> Default for Memo<K, V> {
    fn default() -> Self {
        Memo { map: Mutex::new(HashMap::new()) }
    }
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    pub fn get_or_try(&self, key: &K, compute: impl FnOnce() -> Result<V>) -> Result<V> {
        if let Some(v) = self.map.lock().expect("memo lock poisoned").get(key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        let mut map = self.map.lock().expect("memo lock poisoned");
        Ok(map.entry(key.clone()).or_insert(v).clone())
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("memo lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The unit I for ⊗: `X → X → Y`, with trivial σ and π.
#[derive(Default)]
pub struct IdentityFactorisation;

impl Factorisation for IdentityFactorisation {
    fn label(&self) -> String {
        "identity".into()
    }

    fn factor(&self, f: &Arrow) -> Result<Arc<Factored>> {
        Ok(Arc::new(Factored { lambda: Morphism::identity(f.dom()), rho: f.mor().clone() }))
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        Ok(sq.h().clone())
    }

    fn has_comult(&self) -> bool {
        true
    }

    fn has_mult(&self) -> bool {
        true
    }

    fn comult(&self, f: &Arrow) -> Result<Morphism> {
        Ok(Morphism::identity(f.dom()))
    }

    fn mult(&self, f: &Arrow) -> Result<Morphism> {
        Ok(Morphism::identity(f.dom()))
    }
}

/// The unit ⊥ for ⊙: `X → Y → Y`, with trivial σ and π.
#[derive(Default)]
pub struct TerminalFactorisation;

impl Factorisation for TerminalFactorisation {
    fn label(&self) -> String {
        "terminal".into()
    }

    fn factor(&self, f: &Arrow) -> Result<Arc<Factored>> {
        Ok(Arc::new(Factored { lambda: f.mor().clone(), rho: Morphism::identity(f.cod()) }))
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        Ok(sq.k().clone())
    }

    fn has_comult(&self) -> bool {
        true
    }

    fn has_mult(&self) -> bool {
        true
    }

    fn comult(&self, f: &Arrow) -> Result<Morphism> {
        Ok(Morphism::identity(f.cod()))
    }

    fn mult(&self, f: &Arrow) -> Result<Morphism> {
        Ok(Morphism::identity(f.cod()))
    }
}

type Rewrite = Box<dyn Fn(&Arrow, Morphism) -> Result<Morphism> + Send + Sync>;

/// A stage whose σ and/or π are passed through a rewrite, for mutation tests.
pub struct Perturbed {
    base: Arc<dyn Factorisation>,
    comult: Option<Rewrite>,
    mult: Option<Rewrite>,
}

impl Perturbed {
    pub fn new(base: Arc<dyn Factorisation>) -> Self {
        Perturbed { base, comult: None, mult: None }
    }

    pub fn with_comult(mut self, r: impl Fn(&Arrow, Morphism) -> Result<Morphism> + Send + Sync + 'static) -> Self {
        self.comult = Some(Box::new(r));
        self
    }

    pub fn with_mult(mut self, r: impl Fn(&Arrow, Morphism) -> Result<Morphism> + Send + Sync + 'static) -> Self {
        self.mult = Some(Box::new(r));
        self
    }
}

impl Factorisation for Perturbed {
    fn label(&self) -> String {
        format!("perturbed {}", self.base.label())
    }

    fn factor(&self, f: &Arrow) -> Result<Arc<Factored>> {
        self.base.factor(f)
    }

    fn on_square(&self, sq: &Square) -> Result<Morphism> {
        self.base.on_square(sq)
    }

    fn has_comult(&self) -> bool {
        self.base.has_comult()
    }

    fn has_mult(&self) -> bool {
        self.base.has_mult()
    }

    fn comult(&self, f: &Arrow) -> Result<Morphism> {
        let s = self.base.comult(f)?;
        match &self.comult {
            Some(r) => r(f, s),
            None => Ok(s),
        }
    }

    fn mult(&self, f: &Arrow) -> Result<Morphism> {
        let p = self.base.mult(f)?;
        match &self.mult {
            Some(r) => r(f, p),
            None => Ok(p),
        }
    }
}
