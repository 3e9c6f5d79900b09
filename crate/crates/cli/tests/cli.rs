use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_miura");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn miura(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env_remove("MIURA_OUTPUT_DIR").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SQUARE16: &str = r#"{"origin": [0, 0], "extents": [1, 1], "counts": [16, 16]}"#;

#[test]
fn zero_potential_converges_in_one_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{"command": "miura-solve", "grid": {SQUARE16}, "miura": {{"p": 1.5, "tol": 1e-10}}}}"#);
    write(tmp.path(), "zero.json", &cfg);
    let o = miura(&["run", "zero.json", "--output", "out"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&tmp.path().join("out/report.json"));
    assert_eq!(r["iterations"], 1);
    assert_eq!(r["converged"], true);
    assert_eq!(r["residual_history"][0], 0.0);
    assert_eq!(r["final_fp_residual"], 0.0);
    assert_eq!(r["final_strong_residual"], 0.0);
    assert!(tmp.path().join("out/solution.csv").exists());
}

#[test]
fn borel_pompeiu_study_is_monotone() {
    let tmp = tempfile::tempdir().unwrap();
    let o = miura(&["study", "--case", "borel_pompeiu", "--levels", "16,32,64", "--output", "s"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("s/study.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("count,h,residual,order"));
    let res: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(res.len(), 3);
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
}

#[test]
fn exact_study_marks_order() {
    let tmp = tempfile::tempdir().unwrap();
    let o = miura(&["study", "--case", "laplace_quadratic", "--levels", "8,16", "--output", "s"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("s/study.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().ends_with(",exact"), "{csv}");
}

fn run_bytes(cfg: &Path, threads: &str, dir: &Path, tag: &str) -> Vec<(String, Vec<u8>)> {
    let out = dir.join(tag);
    let o = miura(&["run", cfg.to_str().unwrap(), "--threads", threads, "--output", out.to_str().unwrap()], dir);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["miura_exp_bilinear.json", "gp_oscillator.json", "algebra_check.json"] {
        let cfg = configs().join(name);
        let a = run_bytes(&cfg, "1", tmp.path(), "a");
        let b = run_bytes(&cfg, "1", tmp.path(), "b");
        let c = run_bytes(&cfg, "4", tmp.path(), "c");
        assert!(a.len() >= 2);
        assert_eq!(a, b, "{name}: repeat run differs");
        assert_eq!(a, c, "{name}: thread count changes output");
    }
}

#[test]
fn manifest_records_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let o = miura(&["run", configs().join("miura_exp_bilinear.json").to_str().unwrap(), "--output", "m"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("m");
    let m = json(&dir.join("manifest.json"));
    assert_eq!(m["tool"], "miura");
    assert_eq!(m["command"], "miura-solve");
    assert_eq!(m["seed"], 1);
    assert_eq!(m["grid_hash"].as_str().unwrap().len(), 64);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3);
    for e in outputs {
        let bytes = fs::read(dir.join(e["file"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(e["sha256"], digest.as_str());
    }
    let r = json(&dir.join("report.json"));
    assert!(r["exact_error"].as_f64().unwrap() < 0.05);
    assert!(r["iterations"].as_u64().unwrap() <= 50);
}

#[test]
fn malformed_config_exits_2_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.json", "{\n  \"command\": \"miura-solve\",\n  \"grid\": 3\n}");
    let o = miura(&["run", "bad.json"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.json:3:"), "{}", stderr(&o));

    write(tmp.path(), "unknown.json", r#"{"command": "kernels", "colour": "blue"}"#);
    let o = miura(&["run", "unknown.json"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));

    write(tmp.path(), "missing_grid.json", r#"{"command": "gp-run"}"#);
    assert_eq!(miura(&["run", "missing_grid.json"], tmp.path()).status.code(), Some(2));

    let cfg = format!(r#"{{"command": "miura-solve", "grid": {SQUARE16}, "miura": {{"p": 0.5, "tol": 1e-10}}}}"#);
    write(tmp.path(), "bad_p.json", &cfg);
    assert_eq!(miura(&["run", "bad_p.json"], tmp.path()).status.code(), Some(2));

    let o = miura(&["study", "--case", "laplace_trig", "--levels", "32,16"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn divergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"command": "miura-solve",
        "grid": {"origin": [-4, -4], "extents": [8, 8], "counts": [16, 16]},
        "miura": {"p": 1.5, "tol": 1e-10},
        "potential": {"kind": "manufactured", "phi": "gaussian"}}"#;
    write(tmp.path(), "div.json", cfg);
    let o = miura(&["run", "div.json", "--output", "d"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    // the report is still written
    assert_eq!(json(&tmp.path().join("d/report.json"))["diverged"], true);
}

#[test]
fn missing_config_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(miura(&["run", "nowhere.json"], tmp.path()).status.code(), Some(1));
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "plain.json", r#"{"command": "kernels"}"#);
    write(d, "with_dir.json", r#"{"command": "kernels", "output_dir": "from_config"}"#);

    let env_run = |cfg: &str, extra: &[&str]| {
        let mut args = vec!["run", cfg];
        args.extend_from_slice(extra);
        let o = Command::new(BIN).args(&args).current_dir(d).env("MIURA_OUTPUT_DIR", "from_env").output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    };
    assert!(miura(&["run", "plain.json"], d).status.success());
    assert!(d.join("miura-out/manifest.json").exists());
    env_run("plain.json", &[]);
    assert!(d.join("from_env/manifest.json").exists());
    env_run("with_dir.json", &[]);
    assert!(d.join("from_config/manifest.json").exists());
    env_run("with_dir.json", &["--output", "from_flag"]);
    assert!(d.join("from_flag/manifest.json").exists());
}

#[test]
fn sampled_potential_matches_manufactured() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let manufactured = format!(
        r#"{{"command": "miura-solve", "grid": {SQUARE16}, "miura": {{"p": 1.5, "tol": 1e-10}},
            "potential": {{"kind": "manufactured", "phi": "exp_bilinear"}}}}"#
    );
    write(d, "m.json", &manufactured);
    assert!(miura(&["run", "m.json", "--output", "m"], d).status.success());
    fs::create_dir(d.join("cfg")).unwrap();
    fs::copy(d.join("m/potential.csv"), d.join("cfg/v.csv")).unwrap();
    let sampled = format!(
        r#"{{"command": "miura-solve", "grid": {SQUARE16}, "miura": {{"p": 1.5, "tol": 1e-10}},
            "potential": {{"kind": "sampled", "file": "v.csv"}}}}"#
    );
    write(&d.join("cfg"), "s.json", &sampled);
    let o = miura(&["run", "cfg/s.json", "--output", "s"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(d.join("m/solution.csv")).unwrap(), fs::read(d.join("s/solution.csv")).unwrap());
}

#[test]
fn every_shipped_config_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for e in fs::read_dir(configs()).unwrap() {
        let p = e.unwrap().path();
        let o = miura(&["run", p.to_str().unwrap(), "--output", "x"], tmp.path());
        assert!(o.status.success(), "{}: {}", p.display(), stderr(&o));
    }
}
