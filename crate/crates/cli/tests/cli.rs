use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use nwfs_core::algebra::{
    enumerate_set_rmaps, generator_lmap, identity_lmap, pushout_lmap, LMapStructure, RMapStructure, StageRef,
};
use nwfs_core::arrows::{Arrow, Square};
use nwfs_core::corpus::set_arrow;
use nwfs_core::fincat::{compose, HomCap, Morphism, Object};
use nwfs_core::freeseq::FreeSequence;
use nwfs_core::onestep::OneStep;
use nwfs_core::presets;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("nwfs-cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn nwfs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nwfs")).args(args).env_remove("NWFS_CAP").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn split_epi_converges_at_one() {
    let v = json_of(&nwfs(&["factorize", path(&data("splitepi_2_3.json")), "--converge"]));
    assert_eq!(v["stage"]["kind"], "converged");
    assert_eq!(v["stage"]["converged_at"], 1);
    assert_eq!(v["mid"]["size"], 5);
    assert!(v.get("sigma").is_some() && v.get("pi").is_some());
}

#[test]
fn empty_generators_give_the_identity_factorisation() {
    let v = json_of(&nwfs(&["factorize", path(&data("empty_2_3.json")), "--converge"]));
    assert_eq!(v["stage"]["converged_at"], 0);
    assert_eq!(v["mid"]["size"], 2);
    assert_eq!(v["lambda"]["map"], serde_json::json!([0, 1]));
    assert_eq!(v["rho"]["map"], serde_json::json!([0, 2]));
}

#[test]
fn cosection_stage_two_mid() {
    let v = json_of(&nwfs(&["factorize", path(&data("cosection_1_2.json")), "--stage", "2"]));
    assert_eq!(v["mid"]["size"], 7);
}

#[test]
fn generator_override_flag() {
    let v = json_of(&nwfs(&["factorize", path(&data("splitepi_2_3.json")), "--stage", "1", "--generators", "empty"]));
    assert_eq!(v["mid"]["size"], 2);
}

#[test]
fn laws_pass_on_converged_split_epi() {
    let out = nwfs(&["laws", path(&data("splitepi_2_3.json")), "--converge"]);
    let v = json_of(&out);
    assert_eq!(v["failed"], serde_json::json!([]));
    assert!(v["corpus"]["arrows"].as_u64().unwrap() > 1);
}

#[test]
fn laws_pass_for_empty_generators() {
    let v = json_of(&nwfs(&["laws", path(&data("empty_2_3.json")), "--converge"]));
    assert_eq!(v["failed"], serde_json::json!([]));
}

#[test]
fn mutated_mult_fails_laws_by_name() {
    let out = nwfs(&["laws", path(&data("splitepi_mutated.json")), "--converge"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = v["failed"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(failed.contains(&"associativity"), "{failed:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("associativity"), "{stderr}");
}

#[test]
fn size_report_rows() {
    let out = nwfs(&["size-report", path(&data("cosection_1_2.json")), "--max-stage", "3"]);
    let csv = String::from_utf8(json_bytes(&out)).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "stage,naive,coequalized,ratio");
    assert_eq!(rows[1], "1,3,3,1.0000");
    assert_eq!(rows[2], "2,9,7,1.2857");
    assert_eq!(rows[3], "3,27,15,1.8000");
}

#[test]
fn size_report_split_epi_coequalized_is_flat() {
    let out = nwfs(&["size-report", path(&data("splitepi_2_3.json"))]);
    let csv = String::from_utf8(json_bytes(&out)).unwrap();
    let rows: Vec<Vec<usize>> =
        csv.lines().skip(1).map(|l| l.split(',').take(3).map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2] == 5));
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn size_report_empty_generators_constant() {
    let out = nwfs(&["size-report", path(&data("empty_2_3.json"))]);
    let csv = String::from_utf8(json_bytes(&out)).unwrap();
    for (i, line) in csv.lines().skip(1).enumerate() {
        assert_eq!(line, format!("{},2,2,1.0000", i + 1));
    }
}

fn json_bytes(out: &Output) -> Vec<u8> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout.clone()
}

#[test]
fn out_flag_and_byte_stability() {
    let a = scratch("stable_a.json");
    let b = scratch("stable_b.json");
    for p in [&a, &b] {
        let out = nwfs(&["factorize", path(&data("splitepi_2_3.json")), "--converge", "--out", path(p)]);
        assert!(out.status.success() && out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(nwfs(&["factorize", path(&data("bad.json"))]).status.code(), Some(2));
    assert_eq!(
        nwfs(&["factorize", path(&data("splitepi_2_3.json")), "--stage", "2", "--cap", "1"]).status.code(),
        Some(3)
    );
    let out = nwfs(&["factorize", path(&data("cosection_1_2.json")), "--converge", "--max-stage", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

struct LiftCase {
    stage: StageRef,
    cap: HomCap,
}

impl LiftCase {
    /// Converged split-epi n.w.f.s., decided on `witnesses`.
    fn new(witnesses: &[Arrow]) -> Self {
        let cap = HomCap::default();
        let t = Arc::new(OneStep::new(presets::split_epi(), cap));
        let n = Arc::new(FreeSequence::new(t, 4)).converge(witnesses).unwrap();
        LiftCase { stage: StageRef::converged(Arc::new(n)), cap }
    }

    /// Runs `nwfs lift`; `ltag` overrides the stage tag written into the
    /// L-map file.
    fn run(&self, name: &str, l: &LMapStructure, r: &RMapStructure, sq: &Square, ltag: &str) -> Output {
        let mut lv = l.to_json();
        lv["stage"] = Value::from(ltag);
        let (lp, rp, pp) = (
            scratch(&format!("{name}_l.json")),
            scratch(&format!("{name}_r.json")),
            scratch(&format!("{name}_x.json")),
        );
        std::fs::write(&lp, lv.to_string()).unwrap();
        std::fs::write(&rp, r.to_json().to_string()).unwrap();
        std::fs::write(&pp, serde_json::to_string(sq).unwrap()).unwrap();
        let inst = data("splitepi_2_3.json");
        nwfs(&["lift", path(&inst), "--lmap", path(&lp), "--rmap", path(&rp), "--problem", path(&pp)])
    }

    fn filler(&self, name: &str, l: &LMapStructure, r: &RMapStructure, sq: &Square) -> Morphism {
        let v = json_of(&self.run(name, l, r, sq, "converged"));
        assert_eq!(v["stage"], "converged");
        serde_json::from_value(v["filler"].clone()).unwrap()
    }
}

#[test]
fn lift_on_an_isomorphism_is_the_inverse() {
    let swap = set_arrow(2, 2, &[1, 0]);
    let case = LiftCase::new(std::slice::from_ref(&swap));
    let l = identity_lmap(&case.stage, &swap).unwrap();
    let r = enumerate_set_rmaps(&case.stage, &swap, case.cap).unwrap().remove(0);
    let j = case.filler("iso", &l, &r, &Square::identity(&swap));
    assert_eq!(j, Morphism::set_map(2, 2, vec![1, 0]).unwrap());
}

#[test]
fn lift_against_section_data_picks_the_section() {
    let gen = set_arrow(0, 1, &[]);
    let g = set_arrow(3, 2, &[0, 1, 1]);
    let case = LiftCase::new(&[gen.clone(), g.clone()]);
    let l = generator_lmap(&case.stage, 0).unwrap();
    let structures = enumerate_set_rmaps(&case.stage, &g, case.cap).unwrap();
    // one structure per section i of g
    assert_eq!(structures.len(), 2);
    for (n, r) in structures.iter().enumerate() {
        // E g = C + D, and p restricted to D is the section i
        let i = |d: usize| r.map().as_set().unwrap()[3 + d];
        for d in 0..2 {
            let sq = Square::new(
                gen.clone(),
                g.clone(),
                Morphism::set_map(0, 3, vec![]).unwrap(),
                Morphism::set_map(1, 2, vec![d]).unwrap(),
            )
            .unwrap();
            let j = case.filler(&format!("section{n}_{d}"), &l, r, &sq);
            assert_eq!(j, Morphism::set_map(1, 3, vec![i(d)]).unwrap());
        }
    }
}

#[test]
fn lift_is_natural_in_lmap_morphisms() {
    let gen = set_arrow(0, 1, &[]);
    let g = set_arrow(2, 1, &[0, 0]);
    let x0 = Object::set(2);
    let case = LiftCase::new(&[gen.clone(), g.clone()]);
    let l0 = generator_lmap(&case.stage, 0).unwrap();
    let (a, l) = pushout_lmap(&l0, &Morphism::from_initial(&x0)).unwrap();
    let r = enumerate_set_rmaps(&case.stage, &g, case.cap).unwrap().remove(0);
    let e = l.arrow().cod().size();
    let x = Square::new(
        l.arrow().clone(),
        g.clone(),
        Morphism::set_map(2, 2, vec![1, 1]).unwrap(),
        Morphism::set_map(e, 1, vec![0; e]).unwrap(),
    )
    .unwrap();
    let outer = case.filler("nat_outer", &l, &r, &x);
    let inner = case.filler("nat_inner", &l0, &r, &x.after(&a).unwrap());
    assert_eq!(inner, compose(&outer, a.k()).unwrap());
}

#[test]
fn lift_across_stages_is_rejected() {
    let gen = set_arrow(0, 1, &[]);
    let g = set_arrow(2, 1, &[0, 0]);
    let case = LiftCase::new(&[gen.clone(), g.clone()]);
    let l = generator_lmap(&case.stage, 0).unwrap();
    let r = enumerate_set_rmaps(&case.stage, &g, case.cap).unwrap().remove(0);
    let sq =
        Square::new(gen, g, Morphism::set_map(0, 2, vec![]).unwrap(), Morphism::identity(&Object::set(1))).unwrap();
    let out = case.run("mismatch", &l, &r, &sq, "onestep");
    assert_eq!(out.status.code(), Some(5), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
