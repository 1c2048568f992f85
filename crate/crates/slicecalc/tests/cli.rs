use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use slicecalc::json::{CalcResultJson, MatrixJson};
use slicecalc::random;
use slicecalc_core::calculus::exp_taylor;
use slicecalc_core::CliffordMatrix;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {:?}", self.stdout))
    }
}

fn run_file(job: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_slicecalc")).arg("--job").arg(job).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(job: &Value, args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, job.to_string()).unwrap();
    run_file(&path, args)
}

fn operator_json(t: &CliffordMatrix) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(t)).unwrap()
}

fn value_of(r: &Run) -> CliffordMatrix {
    let parsed: CalcResultJson = serde_json::from_str(&r.stdout).unwrap();
    parsed.to_result().unwrap().value
}

fn zero_operator() -> Value {
    json!({"d": 2, "n": 2, "components": {}})
}

#[test]
fn zero_operator_has_the_origin_sphere() {
    let r = run(&json!({"command": "spectrum", "operator": zero_operator()}), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["spheres"].as_array().unwrap().len(), 1);
    assert_eq!(v["spheres"][0]["u"], 0.0);
    assert_eq!(v["spheres"][0]["v"], 0.0);
    assert_eq!(v["radius"], 0.0);
}

#[test]
fn generator_scalar_has_the_unit_sphere() {
    let r = run(&json!({"command": "spectrum", "operator": {"d": 1, "n": 1, "components": {"1": [[1.0]]}}}), &[]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["spheres"], json!([{"u": 0.0, "v": 1.0, "mult": 1}]));
}

#[test]
fn malformed_key_is_named() {
    let r = run(&json!({"command": "spectrum", "operator": {"d": 1, "n": 2, "components": {"21": [[1.0]]}}}), &[]);
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["detail"].as_str().unwrap().contains("\"21\""));
    assert!(r.stderr.contains("21"));
}

#[test]
fn every_malformed_fixture_yields_structured_json() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/malformed");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let r = run_file(&path, &[]);
        assert_eq!(r.code, 2, "{}: {}", path.display(), r.stdout);
        let v = r.json();
        let err = &v["error"];
        assert!(err["kind"].is_string() && err["detail"].is_string(), "{}: {v}", path.display());
        count += 1;
    }
    assert!(count >= 20);
}

#[test]
fn missing_job_file_is_an_input_error() {
    let r = run_file(Path::new("/nonexistent/job.json"), &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["error"]["kind"], "io");
}

#[test]
fn function_errors_carry_positions() {
    let job = json!({"command": "apply", "operator": zero_operator(), "function": "ratio:1/0,1,,"});
    let r = run(&job, &[]);
    assert_eq!(r.code, 2);
    assert!(r.json()["error"]["detail"].as_str().unwrap().contains("position 12"));
}

#[test]
fn identity_function_returns_the_operator() {
    let t = random::operator(&mut random::rng(1), 3, 2, 0.4);
    let r = run(&json!({"command": "apply", "operator": operator_json(&t), "function": "poly:0,1"}), &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = r.json();
    assert_eq!(v["J"], json!([1.0, 0.0]));
    assert!(v["nodes"].as_u64().unwrap() >= 256);
    assert!((&value_of(&r) - &t).norm_op2() <= 1e-9);
}

#[test]
fn exp_matches_taylor_on_both_sides() {
    let t = random::operator(&mut random::rng(2), 2, 2, 0.4);
    let oracle = exp_taylor(&t, 60);
    for side in ["left", "right"] {
        let job = json!({"command": "apply", "operator": operator_json(&t), "function": "exp", "side": side});
        let r = run(&job, &["--nodes", "128"]);
        assert_eq!(r.code, 0);
        assert_eq!(r.json()["nodes"], 128);
        assert!((&value_of(&r) - &oracle).norm_op2() <= 1e-10, "{side}");
    }
}

#[test]
fn pole_on_the_spectrum_is_a_domain_violation() {
    // T = diag(1, 2); 1/(z − 1) has its pole on the spectrum.
    let op = json!({"d": 2, "n": 1, "components": {"": [[1.0, 0.0], [0.0, 2.0]]}});
    let r = run(&json!({"command": "apply", "operator": op, "function": "ratio:1/-1,1"}), &[]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json()["error"]["kind"], "domain_violation");
}

#[test]
fn projector_onto_one_eigenvalue() {
    let op = json!({"d": 2, "n": 1, "components": {"": [[1.0, 1.0], [0.0, 3.0]]}});
    let job = json!({"command": "project", "operator": op, "subset": [0]});
    let r = run(&job, &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let p = value_of(&r);
    assert!((&(&p * &p) - &p).norm_op2() < 1e-10);
    let tr: f64 = p.component(slicecalc_core::MultiIndex::EMPTY).unwrap().trace();
    assert!((tr - 1.0).abs() < 1e-10);
}

#[test]
fn verify_zero_operator_passes_tightly() {
    let r = run(&json!({"command": "verify", "operator": zero_operator()}), &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = r.json();
    assert_eq!(v["passed"], true);
    for item in v["items"].as_array().unwrap() {
        assert!(item["residual"].as_f64().unwrap() <= 1e-12, "{item}");
    }
}

#[test]
fn verify_random_operator_passes_and_is_deterministic() {
    let job = json!({"command": "verify", "random": {"d": 2, "n": 2}});
    let a = run(&job, &["--seed", "42"]);
    assert_eq!(a.code, 0, "{}", a.stdout);
    let items = a.json()["items"].as_array().unwrap().clone();
    assert!(items.len() >= 10);
    assert!(items.iter().all(|i| i["passed"] == true && i["error"].is_null()));
    let b = run(&job, &["--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn near_defective_operator_fails_only_the_projector_item() {
    let op = json!({"d": 2, "n": 1, "components": {"": [[1.0, 0.0], [0.0, 1.0001]]}});
    let r = run(&json!({"command": "verify", "operator": op}), &[]);
    assert_eq!(r.code, 4);
    let v = r.json();
    assert_eq!(v["passed"], false);
    for item in v["items"].as_array().unwrap() {
        if item["name"] == "riesz_projectors" {
            assert_eq!(item["passed"], false);
            assert_eq!(item["error"]["kind"], "separation");
        } else {
            assert_eq!(item["passed"], true, "{item}");
        }
    }
}

#[test]
fn tolerance_override_applies_to_every_item() {
    let job = json!({"command": "verify", "random": {"d": 2, "n": 1}});
    let r = run(&job, &["--tol", "1e-30"]);
    assert_eq!(r.code, 4);
    let v = r.json();
    assert!(v["items"].as_array().unwrap().iter().all(|i| i["tolerance"] == 1e-30));
}

#[test]
fn sweep_writes_csv() {
    let op = json!({"d": 1, "n": 1, "components": {"1": [[1.0]]}});
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let job = json!({"command": "sweep", "operator": op, "options": {"grid_step": 0.25}});
    let r = run(&job, &["--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["u", "v", "sigma_min"]);
    let samples: Vec<(f64, f64, f64)> = rows.deserialize().map(|r| r.unwrap()).collect();
    // Grid [-1.25, 1.25] x [0, 1.25] with step 0.25.
    assert_eq!(samples.len(), 11 * 6);
    let hit = samples.iter().find(|(u, v, _)| *u == 0.0 && *v == 1.0).unwrap();
    assert!(hit.2 < 1e-12);
}

#[test]
fn spectrum_can_also_write_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("oracle.csv");
    let job = json!({
        "command": "spectrum",
        "operator": {"d": 1, "n": 1, "components": {"": [[0.5]]}},
        "options": {"grid_step": 0.1, "sweep_csv": csv_path.to_str().unwrap()}
    });
    let r = run(&job, &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["sweep_csv"], csv_path.to_str().unwrap());
    assert!(std::fs::read_to_string(&csv_path).unwrap().starts_with("u,v,sigma_min\n"));
}
