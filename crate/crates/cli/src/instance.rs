use std::path::Path;
use std::sync::Arc;

use nwfs_core::arrows::{Arrow, Corpus, Factorisation, GeneratingSet};
use nwfs_core::corpus;
use nwfs_core::fincat::{Backend, HomCap, Object};
use nwfs_core::freeseq::{ConvergedNwfs, FreeSequence};
use nwfs_core::monoidal_laws::rotate_mult_off_unit;
use nwfs_core::onestep::OneStep;
use nwfs_core::presets;
use nwfs_core::{Error, Result};
use serde_json::Value;

/// Failures the front end maps onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Engine(Error),
    Laws(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(m) => Failure::Parse(m),
            e => Failure::Engine(e),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Engine(Error::CapExceeded { .. }) => 3,
            Failure::Engine(Error::NotConverged(_)) => 4,
            Failure::Engine(Error::StageMismatch(_)) => 5,
            Failure::Engine(_) | Failure::Laws(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Parse(m) => write!(f, "parse error: {m}"),
            Failure::Engine(e) => write!(f, "{e}"),
            Failure::Laws(m) => write!(f, "law failure: {m}"),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

fn parse_err(what: &str) -> impl Fn(serde_json::Error) -> Failure + '_ {
    move |e| Failure::Parse(format!("{what}: {e}"))
}

pub fn read_json(path: &Path) -> Outcome<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(parse_err("input"))
}

/// `{"generators": <preset name or generating set>, "arrow": …, "corpus": {"max_size": n, "arrows": […]}, "mutate": …}`
#[derive(Debug)]
pub struct Instance {
    pub generators: GeneratingSet,
    pub arrow: Option<Arrow>,
    pub extra_arrows: Vec<Arrow>,
    pub corpus_max_size: Option<usize>,
    pub mutate: Option<String>,
}

fn generating_set(v: &Value) -> Outcome<GeneratingSet> {
    match v {
        Value::String(name) => {
            presets::by_name(name).ok_or_else(|| Failure::Parse(format!("unknown generator preset `{name}`")))
        }
        v => serde_json::from_value(v.clone()).map_err(parse_err("generators")),
    }
}

/// `--generators`: a preset name, or a path to a generating-set JSON file.
pub fn generators_flag(arg: &str) -> Outcome<GeneratingSet> {
    if let Some(j) = presets::by_name(arg) {
        return Ok(j);
    }
    generating_set(&read_json(Path::new(arg))?)
}

impl Instance {
    pub fn load(path: &Path, generators: Option<&str>) -> Outcome<Self> {
        let v = read_json(path)?;
        let generators = match (generators, v.get("generators")) {
            (Some(flag), _) => generators_flag(flag)?,
            (None, Some(g)) => generating_set(g)?,
            (None, None) => return Err(Failure::Parse("instance names no generators".into())),
        };
        let arrow =
            v.get("arrow").map(|a| serde_json::from_value(a.clone()).map_err(parse_err("arrow"))).transpose()?;
        let corpus = v.get("corpus");
        let extra_arrows = match corpus.and_then(|c| c.get("arrows")) {
            Some(a) => serde_json::from_value(a.clone()).map_err(parse_err("corpus arrows"))?,
            None => Vec::new(),
        };
        let corpus_max_size = match corpus.and_then(|c| c.get("max_size")) {
            Some(n) => {
                Some(n.as_u64().ok_or_else(|| Failure::Parse("corpus max_size must be an integer".into()))? as usize)
            }
            None => None,
        };
        let mutate = match v.get("mutate") {
            None | Some(Value::Null) => None,
            Some(Value::String(m)) => Some(m.clone()),
            Some(_) => return Err(Failure::Parse("mutate must be a string".into())),
        };
        Ok(Instance { generators, arrow, extra_arrows, corpus_max_size, mutate })
    }

    pub fn arrow(&self) -> Outcome<&Arrow> {
        self.arrow.as_ref().ok_or_else(|| Failure::Parse("instance has no arrow".into()))
    }

    pub fn backend(&self, flag: Option<&str>) -> Outcome<Backend> {
        let inferred = self.generators.backend().or_else(|| self.arrow.as_ref().map(Arrow::backend));
        match flag {
            None => Ok(inferred.unwrap_or(Backend::Finset)),
            Some("finset") => Ok(Backend::Finset),
            Some("fingraph") => Ok(Backend::Fingraph),
            Some("finmod") => match inferred {
                Some(b @ Backend::Finmod { .. }) => Ok(b),
                _ => Err(Failure::Parse("finmod needs a module generator or arrow to fix the modulus".into())),
            },
            Some(other) => Err(Failure::Parse(format!("unknown backend `{other}`"))),
        }
    }

    /// The instance's own arrows, then every arrow between objects up to
    /// `max_size` (sets, modules by rank), without repeats.
    pub fn corpus(&self, backend: Backend, max_size: usize, cap: HomCap) -> Outcome<Corpus> {
        let mut arrows: Vec<Arrow> = self.arrow.iter().cloned().chain(self.extra_arrows.iter().cloned()).collect();
        let generated = match backend {
            Backend::Finset => corpus::finset_arrows(max_size),
            // graphs have no size-indexed enumeration; the fixed small corpus is used
            Backend::Fingraph => corpus::graph_corpus(),
            Backend::Finmod { q } => {
                let objects = (0..=max_size).map(|r| Object::module(q, r)).collect::<Result<Vec<_>>>()?;
                corpus::arrows_between(&objects, cap)?
            }
        };
        for f in generated {
            if !arrows.contains(&f) {
                arrows.push(f);
            }
        }
        let squares = corpus::sample_squares(&arrows, 400, cap)?;
        Ok(Corpus { arrows, squares })
    }
}

/// How the factorisation is chosen on the command line.
#[derive(Clone, Copy, Debug)]
pub enum StageChoice {
    Stage(usize),
    Converge { max_stage: usize },
}

pub struct Built {
    pub stage: Arc<dyn Factorisation>,
    pub metadata: Value,
}

/// Build the requested stage; `witnesses` are the arrows on which
/// convergence is decided.
pub fn build_stage(j: &GeneratingSet, choice: StageChoice, cap: HomCap, witnesses: &[Arrow]) -> Outcome<Built> {
    let t = Arc::new(OneStep::new(j.clone(), cap));
    match choice {
        StageChoice::Stage(n) => {
            let seq = FreeSequence::new(t, n);
            Ok(Built { stage: seq.stage(n)?, metadata: serde_json::json!({"kind": "stage", "index": n}) })
        }
        StageChoice::Converge { max_stage } => {
            let seq = Arc::new(FreeSequence::new(t, max_stage));
            let n = seq.converge(witnesses)?;
            let metadata = serde_json::json!({"kind": "converged", "converged_at": n.alpha(), "max_stage": max_stage});
            Ok(Built { stage: Arc::new(n), metadata })
        }
    }
}

pub fn converged(j: &GeneratingSet, max_stage: usize, cap: HomCap, witnesses: &[Arrow]) -> Outcome<Arc<ConvergedNwfs>> {
    let seq = Arc::new(FreeSequence::new(Arc::new(OneStep::new(j.clone(), cap)), max_stage));
    Ok(Arc::new(seq.converge(witnesses)?))
}

/// Apply a named deliberate defect, for exercising the law suite.
pub fn mutate(stage: Arc<dyn Factorisation>, name: Option<&str>) -> Outcome<Arc<dyn Factorisation>> {
    match name {
        None => Ok(stage),
        Some("rotate-mult") => Ok(Arc::new(rotate_mult_off_unit(stage))),
        Some(other) => Err(Failure::Parse(format!("unknown mutation `{other}`"))),
    }
}
