use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use freightplan::core::milp::ModelDescription;
use freightplan::core::{Instance, ModeClass, ShipmentPlan};
use freightplan::{json, lp, mps};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freightplan")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn instance(p: &str) -> Instance {
    json::read_instance(&std::fs::read(p).unwrap()).unwrap()
}

fn gen(dir: &TempDir, name: &str, extra: &[&str]) -> String {
    let out = path(dir, name);
    let mut args = vec!["gen", "--out", &out];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

const DESK: &[&str] = &["--seed", "3", "--products", "4", "--weeks", "12", "--lead", "2"];

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let flags = ["--seed", "7", "--products", "50", "--months", "6", "--scenario", "baseline"];
    let a = gen(&dir, "a.json", &flags);
    let b = gen(&dir, "b.json", &flags);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let inst = instance(&a);
    assert_eq!(inst.orders.len(), 50);
    assert_eq!(inst.manifest.unwrap().seed, 7);

    let no_fcl = instance(&gen(&dir, "c.json", &["--seed", "7", "--scenario", "no-fcl"]));
    assert_eq!(no_fcl.network.edges_of(ModeClass::Fcl).count(), 0);
}

#[test]
fn gen_reads_toml_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("gen.toml");
    std::fs::write(&cfg, "seed = 9\nn_products = 12\nhorizon_months = 12\n").unwrap();
    let inst = instance(&gen(&dir, "a.json", &["--config", cfg.to_str().unwrap(), "--products", "5"]));
    assert_eq!(inst.orders.len(), 5);
    assert_eq!(inst.horizon_weeks, 52);
    assert_eq!(inst.manifest.unwrap().seed, 9);
}

#[test]
fn solve_then_validate() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "inst.json", DESK);
    let plan = path(&dir, "plan.json");
    let costs = path(&dir, "cost.csv");
    ok(&["solve", &inst, "--out", &plan, "--reference", "--threads", "2", "--cost-csv", &costs]);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("plan.report.json")).unwrap()).unwrap();
    assert_eq!(report["solver"], "heuristic");
    assert!(report["heuristic_error"].as_f64().unwrap() >= 0.0);
    let csv = std::fs::read_to_string(&costs).unwrap();
    assert!(csv.starts_with("label,"));
    assert_eq!(csv.lines().count(), 2);

    let saved: ShipmentPlan = json::read_plan(&std::fs::read(&plan).unwrap()).unwrap();
    assert_eq!(saved.provenance.unwrap().tool, "freightplan");
    let out = ok(&["validate", &inst, &plan]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn infeasible_plan_exits_2() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "inst.json", DESK);
    let plan = path(&dir, "plan.json");
    ok(&["solve", &inst, "--out", &plan]);
    // Drop one order's route.
    let mut p: serde_json::Value = serde_json::from_slice(&std::fs::read(&plan).unwrap()).unwrap();
    let routes = p["routes"].as_object_mut().unwrap();
    let first = routes.keys().next().unwrap().clone();
    routes.remove(&first);
    std::fs::write(&plan, serde_json::to_vec(&p).unwrap()).unwrap();
    let csv = path(&dir, "violations.csv");
    let out = run(&["validate", &inst, &plan, "--csv", &csv]);
    assert_eq!(out.status.code(), Some(2));
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.json");
    assert_eq!(run(&["solve", &missing, "--out", &path(&dir, "p.json")]).status.code(), Some(2));

    let garbage = path(&dir, "garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(run(&["solve", &garbage, "--out", &path(&dir, "p.json")]).status.code(), Some(2));

    assert_eq!(run(&["gen", "--out", &path(&dir, "g.json"), "--products", "0"]).status.code(), Some(2));

    let big = gen(&dir, "big.json", &["--products", "30"]);
    let out = run(&["solve", &big, "--solver", "oracle", "--out", &path(&dir, "p.json")]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn zero_orders_cost_nothing() {
    let dir = TempDir::new().unwrap();
    let inst_path = gen(&dir, "inst.json", DESK);
    let mut inst = instance(&inst_path);
    inst.orders.clear();
    std::fs::write(&inst_path, json::to_string(&inst)).unwrap();
    for solver in ["heuristic", "oracle"] {
        let plan = path(&dir, &format!("{solver}.json"));
        ok(&["solve", &inst_path, "--solver", solver, "--out", &plan]);
        let report: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join(format!("{solver}.report.json"))).unwrap()).unwrap();
        assert_eq!(report["cost"]["total_cents"], 0);
    }
}

#[test]
fn compare_and_suite_tables() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "inst.json", DESK);
    let out = path(&dir, "compare.csv");
    ok(&["compare", &inst, "--out", &out]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("solver,total_cents,"));
    assert!(lines[1].starts_with("heuristic,") && lines[2].starts_with("oracle,"));

    let out = path(&dir, "suite.csv");
    let mut args = vec!["suite", "--out", &out];
    args.extend_from_slice(DESK);
    ok(&args);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let scenarios: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(scenarios, ["baseline", "port-closure", "no-fcl", "baseline", "port-closure", "no-fcl"]);
}

fn export(dir: &TempDir, inst: &str, format: &str, extra: &[&str]) -> (String, ModelDescription) {
    let out = path(dir, &format!("model.{format}"));
    let mut args = vec!["export", inst, "--format", format, "--out", &out];
    args.extend_from_slice(extra);
    ok(&args);
    let text = std::fs::read_to_string(&out).unwrap();
    let model = match format {
        "lp" => lp::parse_lp(&text).unwrap(),
        _ => {
            let names = mps::NameMap::from_csv(&std::fs::read_to_string(format!("{out}.names.csv")).unwrap()).unwrap();
            mps::parse_mps(&text, Some(&names)).unwrap()
        }
    };
    (text, model)
}

#[test]
fn export_formats_agree() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "inst.json", DESK);
    let (lp_text, from_lp) = export(&dir, &inst, "lp", &[]);
    let (mps_text, from_mps) = export(&dir, &inst, "mps", &[]);
    assert_eq!(from_lp, from_mps);
    assert!(lp_text.starts_with("\\ freightplan "));
    assert!(mps_text.starts_with("* freightplan "));
    let strict_columns = from_lp.variables.len();

    let (_, penalized) = export(&dir, &inst, "lp", &["--deadline", "penalized", "--late-weight", "5"]);
    assert!(penalized.variables.len() > strict_columns);
    assert!(penalized.variables.iter().any(|v| v.name.starts_with("late_")));
    assert!(penalized.variables.iter().any(|v| v.name.starts_with("eps_")));

    let (_, sym) = export(&dir, &inst, "mps", &["--symmetry"]);
    assert!(sym.constraints.iter().any(|c| c.name.starts_with("sym_")));
    assert!(!from_mps.constraints.iter().any(|c| c.name.starts_with("sym_")));
}

#[test]
fn export_mip_start_uses_mps_names() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "inst.json", DESK);
    let plan = path(&dir, "plan.json");
    ok(&["solve", &inst, "--out", &plan]);
    let start = path(&dir, "start.mst");
    let (mps_text, _) = export(&dir, &inst, "mps", &["--mip-start", &plan, "--start-out", &start]);
    let parsed = freightplan::mipstart::parse_mip_start(&std::fs::read_to_string(&start).unwrap()).unwrap();
    let columns = mps::parse_mps(&mps_text, None).unwrap();
    assert!(parsed.objective.is_some());
    for (name, _) in &parsed.values {
        assert!(columns.variable_index(name).is_some(), "{name} is not an MPS column");
    }
}

#[test]
fn solve_is_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "inst.json", &["--seed", "4", "--products", "150"]);
    let plans: Vec<PathBuf> = ["1", "4"]
        .iter()
        .map(|t| {
            let plan = path(&dir, &format!("plan{t}.json"));
            ok(&["solve", &inst, "--out", &plan, "--threads", t]);
            PathBuf::from(plan)
        })
        .collect();
    assert_eq!(std::fs::read(&plans[0]).unwrap(), std::fs::read(&plans[1]).unwrap());
    assert!(Path::new(&plans[0]).exists());
}
