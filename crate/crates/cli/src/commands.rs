use std::path::Path;

use nwfs_core::algebra::{solve_lifting, LMapStructure, RMapStructure, StageRef};
use nwfs_core::arrows::{check_stage, Arrow, Factorisation, Square};
use nwfs_core::fincat::HomCap;
use nwfs_core::freeseq::{naive_stage_sizes, FreeSequence};
use nwfs_core::monoidal_laws::bialgebra_check;
use nwfs_core::onestep::OneStep;
use serde_json::{json, Value};

use crate::instance::{self, build_stage, read_json, Failure, Instance, Outcome, StageChoice};

pub fn factorize(inst: &Instance, choice: StageChoice, cap: HomCap) -> Outcome<Value> {
    let f = inst.arrow()?;
    let built = build_stage(&inst.generators, choice, cap, std::slice::from_ref(f))?;
    let st = built.stage.as_ref();
    let fa = st.factor(f)?;
    let mut out = json!({
        "arrow": f,
        "generators": inst.generators.generators().iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
        "stage": built.metadata,
        "lambda": fa.lambda,
        "mid": fa.mid(),
        "rho": fa.rho,
    });
    if st.has_comult() {
        out["sigma"] = json!(st.comult(f)?);
    }
    if st.has_mult() {
        out["pi"] = json!(st.mult(f)?);
    }
    Ok(out)
}

fn structure_stage(inst: &Instance, tag: &str, max_stage: usize, cap: HomCap, arrows: &[Arrow]) -> Outcome<StageRef> {
    let t = std::sync::Arc::new(OneStep::new(inst.generators.clone(), cap));
    match tag {
        "onestep" => Ok(StageRef::one_step(t)),
        "converged" => Ok(StageRef::converged(instance::converged(&inst.generators, max_stage, cap, arrows)?)),
        other => Err(Failure::Parse(format!("unknown stage tag `{other}`"))),
    }
}

fn arrow_of(v: &Value, what: &str) -> Outcome<Arrow> {
    serde_json::from_value(v.get("arrow").cloned().unwrap_or_default())
        .map_err(|e| Failure::Parse(format!("{what} arrow: {e}")))
}

pub fn lift(
    inst: &Instance,
    lmap: &Path,
    rmap: &Path,
    problem: &Path,
    max_stage: usize,
    cap: HomCap,
) -> Outcome<Value> {
    let (lv, rv) = (read_json(lmap)?, read_json(rmap)?);
    let problem: Square =
        serde_json::from_value(read_json(problem)?).map_err(|e| Failure::Parse(format!("problem: {e}")))?;
    let tag = lv.get("stage").and_then(Value::as_str).unwrap_or_default().to_string();
    let arrows = [arrow_of(&lv, "lmap")?, arrow_of(&rv, "rmap")?];
    let stage = structure_stage(inst, &tag, max_stage, cap, &arrows)?;
    let l = LMapStructure::from_json(&lv, stage.clone())?;
    let r = RMapStructure::from_json(&rv, stage)?;
    let filler = solve_lifting(&l, &r, &problem)?;
    Ok(json!({"stage": tag, "problem": problem, "filler": filler}))
}

pub fn laws(
    inst: &Instance,
    choice: StageChoice,
    backend: Option<&str>,
    max_size: usize,
    cap: HomCap,
) -> Outcome<Value> {
    let corpus = inst.corpus(inst.backend(backend)?, inst.corpus_max_size.unwrap_or(max_size), cap)?;
    let built = build_stage(&inst.generators, choice, cap, &corpus.arrows)?;
    let stage = instance::mutate(built.stage, inst.mutate.as_deref())?;
    let report = check_stage(stage.as_ref(), &corpus)?;
    let mut failed: Vec<String> = report.failed_laws().into_iter().map(String::from).collect();
    let mut out = json!({
        "stage": built.metadata,
        "corpus": {"arrows": corpus.arrows.len(), "squares": corpus.squares.len()},
        "laws": report.laws,
    });
    if stage.has_comult() && stage.has_mult() {
        let bi = bialgebra_check(stage.as_ref(), &corpus.arrows)?;
        if !bi.all_agree() {
            failed.push("pentagon-agreement".into());
        }
        out["bialgebra"] = json!({
            "vacuous_axioms": bi.vacuous_axioms,
            "pentagon_agrees_with_distributivity": bi.all_agree(),
            "rows": bi.rows,
        });
    }
    out["failed"] = json!(failed);
    Ok(out)
}

/// `stage,naive,coequalized,ratio` with the ratio to four places.
pub fn size_report(inst: &Instance, max_stage: usize, cap: HomCap) -> Outcome<String> {
    let f = inst.arrow()?;
    let t = std::sync::Arc::new(OneStep::new(inst.generators.clone(), cap));
    let seq = FreeSequence::new(t.clone(), max_stage);
    let naive = naive_stage_sizes(&t, f, max_stage)?;
    let mut csv = String::from("stage,naive,coequalized,ratio\n");
    for (i, &n) in naive.iter().enumerate() {
        let stage = i + 1;
        let c = seq.stage(stage)?.factor(f)?.mid().size();
        let ratio = if c == 0 { "nan".to_string() } else { format!("{:.4}", n as f64 / c as f64) };
        csv.push_str(&format!("{stage},{n},{c},{ratio}\n"));
    }
    Ok(csv)
}
