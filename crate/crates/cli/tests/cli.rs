use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn heegner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heegner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn lattice_info_reports_discriminant_order() {
    let out = heegner(&["lattice-info", &path("gaussian-n1.txt")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["disc_group_order"], 4);
    assert_eq!(r["signature"], serde_json::json!([1, 2]));

    let out = heegner(&["lattice-info", &path("gaussian-e8.txt")]);
    let r = json(&out);
    assert_eq!(r["disc_group_order"], 1);
    assert_eq!(r["l_script_order"], 1);
    assert_eq!(r["translation_index"], "256");
}

#[test]
fn malformed_gram_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(
        &p,
        "disc = -4\nrank = 3\nrow = 0; -1/2*zeta; 0\nrow = 1/2*zeta; 0; 1\nrow = 0; 0; -1\nell = (1; 0; 0)\nell_prime = (0; 1; 0)\n",
    )
    .unwrap();
    let out = heegner(&["lattice-info", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line ") && err.contains("gram entry"), "{err}");
}

#[test]
fn enumerate_lists_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let fx = path("gaussian-n1.txt");
    let out = heegner(&["enumerate", &fx, "--gamma", "0", "--m", "-1", "--cache-dir", cache]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["count"], 4);
    let vs: Vec<String> = r["vectors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let mut sorted = vs.clone();
    sorted.sort();
    assert_eq!(vs, sorted);
    assert_eq!(r["cache_hit"], false);

    let out = heegner(&["enumerate", &fx, "--gamma", "0", "--m", "-1", "--count-only", "--cache-dir", cache]);
    let r = json(&out);
    assert_eq!(r["count"], 4);
    assert_eq!(r["cache_hit"], true);
    assert_eq!(r["cache"]["misses"], 0);

    let out = heegner(&["enumerate", &fx, "--gamma", "0", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn torsion_routes_agree() {
    let out = heegner(&["torsion", &path("gaussian-n1.txt"), &path("gaussian-n1-torsion.div")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["bilinear"]["is_torsion"], true);
    assert_eq!(r["theta"]["is_torsion"], true);

    let out = heegner(&["torsion", &path("gaussian-n2.txt"), &path("gaussian-n2-single.div")]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["bilinear"]["is_torsion"], false);
    assert_eq!(r["theta"]["is_torsion"], false);
    assert_ne!(r["bilinear"]["witness"]["residual"], "0");
    assert!(!r["theta"]["witnesses"].as_array().unwrap().is_empty());

    for route in ["bilinear", "theta"] {
        let out = heegner(&[
            "torsion",
            &path("gaussian-n1.txt"),
            &path("gaussian-n1-orbit.div"),
            "--route",
            route,
        ]);
        assert_eq!(out.status.code(), Some(0), "{route}");
    }
}

#[test]
fn asymmetric_divisor_is_rejected() {
    let out = heegner(&["torsion", &path("d7-n1.txt"), &path("d7-n1-asymmetric.div")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fault_injection_raises_alarm() {
    for fault in ["theta", "bilinear"] {
        let out = heegner(&[
            "torsion",
            &path("gaussian-n1.txt"),
            &path("gaussian-n1-torsion.div"),
            "--inject-fault",
            fault,
        ]);
        assert_eq!(out.status.code(), Some(3), "{fault}");
    }
}

#[test]
fn theta_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("theta.txt");
    let out = heegner(&[
        "theta",
        &path("gaussian-n1.txt"),
        "--v",
        "f1",
        "--max-norm",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = std::fs::read_to_string(&out_path).unwrap();
    assert!(table.lines().any(|l| l == "0 1 4 0 + 0*sqrt(4)"), "{table}");

    let out = heegner(&["theta", &path("gaussian-n1.txt"), "--v", "0", "--max-norm", "3"]);
    let r = json(&out);
    assert_eq!(r["zero"], true);
    assert!(r["table"].as_str().unwrap().contains("# gamma m count coefficient"));

    let out = heegner(&["theta", &path("gaussian-n1.txt"), "--v", "f2", "--max-norm", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    for suite in ["cocycle", "automorphy", "weil", "theta-modularity", "cochain"] {
        let out = heegner(&["verify", &path("gaussian-n1.txt"), "--suite", suite, "--samples", "20"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        let r = json(&out);
        assert_eq!(r["passed"], true);
    }
    let out = heegner(&["verify", &path("gaussian-n1.txt"), "--suite", "weil", "--tolerance", "0"]);
    let r = json(&out);
    assert_eq!(r["seed"], 1);
    let out = heegner(&["verify", &path("gaussian-n1.txt"), "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verdicts_are_deterministic_and_cache_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["torsion", "--cache-dir", cache];
        let fx = path("gaussian-n2.txt");
        let dv = path("gaussian-n2-single.div");
        args.push(&fx);
        args.push(&dv);
        args.extend_from_slice(extra);
        let mut r = json(&heegner(&args));
        r.as_object_mut().unwrap().remove("timing_ms");
        r.as_object_mut().unwrap().remove("cache");
        r
    };
    let cold = run(&[]);
    let warm = run(&[]);
    assert_eq!(cold, warm);
}
