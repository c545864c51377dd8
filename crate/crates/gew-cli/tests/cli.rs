//! End-to-end tests driving the compiled `gew` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gew"));
    c.env_remove("GEW_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn gew")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout JSON")
}

fn tmp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gew-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir.join(name)
}

fn write_matrix(name: &str, diag: f64) -> PathBuf {
    let re: Vec<f64> =
        (0..81).map(|k| if k % 10 == 0 { diag } else { 0.0 }).collect();
    let body = serde_json::json!({"rows": 9, "cols": 9, "re": re, "im": vec![0.0; 81]});
    let path = tmp_path(name);
    std::fs::write(&path, body.to_string()).expect("write matrix file");
    path
}

#[test]
fn classify_origin_is_ppt_undecided() {
    let out = run(&["classify"]);
    let v = stdout_json(&out);
    assert_eq!(v["label"], "PPT_UNDECIDED");
    assert!((v["ppt_margin"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-12);
    assert!(v["realignment_sum"].as_f64().unwrap() < 1.0);
}

#[test]
fn classify_flags_horodecki_bound_entanglement() {
    let out = run(&["classify", "--horodecki-b", "3.5"]);
    let v = stdout_json(&out);
    assert_eq!(v["label"], "BOUND_ENTANGLED");
    assert!(v["ppt_margin"].as_f64().unwrap() > -1e-10);
    assert!(v["realignment_sum"].as_f64().unwrap() > 1.0);
}

#[test]
fn classify_maximally_mixed_matrix_file() {
    let path = write_matrix("mixed.json", 1.0 / 9.0);
    let out = run(&["classify", "--matrix", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["label"], "PPT_UNDECIDED");
}

#[test]
fn classify_rejects_nonunit_trace_with_exit_two() {
    let path = write_matrix("bad.json", 0.2);
    let out = run(&["classify", "--matrix", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("verdict JSON");
    assert_eq!(v["label"], "INVALID_STATE");
    assert!(v["ppt_margin"].is_null());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn classify_negative_family_point_is_invalid() {
    let out = run(&["classify", "--alpha=-1"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("verdict JSON");
    assert_eq!(v["label"], "INVALID_STATE");
}

#[test]
fn classify_unreadable_file_exits_one() {
    let out = run(&["classify", "--matrix", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn scan_reruns_and_thread_counts_are_byte_identical() {
    let a = tmp_path("scan-a.csv");
    let b = tmp_path("scan-b.csv");
    let c = tmp_path("scan-c.csv");
    assert!(run(&["scan", "--grid", "5", "--out", a.to_str().unwrap()]).status.success());
    assert!(run(&["scan", "--grid", "5", "--jobs", "4", "--out", b.to_str().unwrap()])
        .status
        .success());
    let env_run = bin()
        .env("GEW_JOBS", "1")
        .args(["scan", "--grid", "5", "--out", c.to_str().unwrap()])
        .output()
        .expect("spawn gew");
    assert!(env_run.status.success());
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    assert_eq!(bytes_a, std::fs::read(&c).unwrap());
    let text = String::from_utf8(bytes_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,beta,gamma,a,b,c,pos_margin,ppt_margin,realign_sum,label"
    );
    assert_eq!(lines.count(), 125);
}

#[test]
fn scan_gamma_zero_slice_never_reports_bound_entanglement() {
    let out = run(&["scan", "--grid", "15", "--box", "-1:1,-1:1,0:0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("BOUND_ENTANGLED"));
    assert!(text.contains("PPT_UNDECIDED"));
    assert!(text.contains("NPT_ENTANGLED"));
}

#[test]
fn scan_json_rows_parse() {
    let out = run(&["scan", "--grid", "3", "--box", "-0.1:0.1,-0.1:0.1,-0.1:0.1", "--format", "json"]);
    let rows = stdout_json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r["label"].is_string() && r["a"].is_number()));
}

#[test]
fn scan_error_paths_exit_one() {
    let empty = run(&["scan", "--box", "0.5:-0.5,0:1,0:1"]);
    assert_eq!(empty.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("empty"));

    let unwritable = run(&["scan", "--grid", "2", "--out", "/definitely/not/here/s.csv"]);
    assert_eq!(unwritable.status.code(), Some(1));

    let bad_jobs = bin()
        .env("GEW_JOBS", "banana")
        .args(["scan", "--grid", "2"])
        .output()
        .expect("spawn gew");
    assert_eq!(bad_jobs.status.code(), Some(1));
}

#[test]
fn horodecki_locates_the_ppt_boundaries() {
    let out = run(&["horodecki", "--grid", "11", "--format", "json"]);
    let v = stdout_json(&out);
    let crossings = v["ppt_crossings"].as_array().unwrap();
    assert!((crossings[0].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert!((crossings[1].as_f64().unwrap() - 4.0).abs() < 1e-4);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0]["b"].as_f64().unwrap(), 0.0);
    assert_eq!(rows[10]["b"].as_f64().unwrap(), 5.0);
    assert_eq!(rows[0]["label"], "NPT_ENTANGLED");
    assert_eq!(rows[7]["label"], "BOUND_ENTANGLED");
    assert_eq!(rows[10]["label"], "NPT_ENTANGLED");
}

#[test]
fn witness_check_fingerprints_the_polygon_operators() {
    let out = run(&["witness-check"]);
    let reports = stdout_json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for rep in reports {
        let s: Vec<f64> =
            rep["tilde_s"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(s.len(), 8);
        for (k, want) in [2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0].iter().enumerate() {
            assert!((s[k] - want).abs() < 1e-9, "{}: s̃ = {s:?}", rep["source"]);
        }
        assert_eq!(rep["is_witness"], false);
        assert_eq!(rep["detecting"], true);
        let min = rep["min_product_expectation"].as_f64().unwrap();
        assert!((min + 1.0 / 84.0).abs() < 1e-6, "{}: min = {min}", rep["source"]);
        let s_min = rep["s_min"].as_f64().unwrap();
        assert!((s_min + 11.0 / 8.0).abs() < 1e-6, "{}: s_min = {s_min}", rep["source"]);
    }
}

#[test]
fn witness_check_g_re_is_a_tangent_witness() {
    let out = run(&["witness-check", "--g-re", "--beta", "0", "--gamma", "0.4"]);
    let reports = stdout_json(&out);
    let rep = &reports.as_array().unwrap()[0];
    assert_eq!(rep["is_witness"], true);
    assert_eq!(rep["detecting"], true);
    for s in rep["tilde_s"].as_array().unwrap() {
        assert!((s.as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
    assert!((rep["s_min"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert!((rep["tangent"]["alpha"].as_f64().unwrap() - 0.21771243444677044).abs() < 1e-9);

    let missing = run(&["witness-check", "--g-re"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn witness_check_kernel_vertices_sit_on_the_polygon_planes() {
    let out = run(&["witness-check", "--kernel"]);
    let vertices = stdout_json(&out);
    let vertices = vertices.as_array().unwrap();
    assert_eq!(vertices.len(), 5);
    for v in vertices {
        assert!(v["eigen_min"].as_f64().unwrap() >= -1e-12, "invalid vertex: {v}");
        assert!(v["body_margin"].as_f64().unwrap().abs() <= 1e-9, "off the boundary: {v}");
        let planes = &v["plane_values"];
        let values: Vec<f64> = ["gu+", "gu-", "gd+", "gd-"]
            .iter()
            .map(|k| planes[*k].as_f64().unwrap())
            .collect();
        assert!(values.iter().all(|x| *x >= -1e-12), "vertex cut off by a plane: {v}");
        assert!(values.iter().any(|x| x.abs() <= 1e-12), "vertex touches no plane: {v}");
    }
}

#[test]
fn witness_check_accepts_vertex_overrides() {
    let path = tmp_path("verts.json");
    std::fs::write(&path, "[[0.2222222222222222, -0.2222222222222222, 0.0]]").unwrap();
    let out = run(&["witness-check", "--kernel", "--vertices", path.to_str().unwrap()]);
    let vertices = stdout_json(&out);
    assert_eq!(vertices.as_array().unwrap().len(), 1);

    let empty = tmp_path("verts-empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let bad = run(&["witness-check", "--kernel", "--vertices", empty.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn shift_outside_in_crosses_before_the_bound_state() {
    let out = run(&["shift", "--mode", "outside-in", "--horodecki-b", "3.5"]);
    let v = stdout_json(&out);
    let lambda = v["lambda_star"].as_f64().unwrap();
    assert!((lambda - 0.918034).abs() < 1e-3, "λ* = {lambda}");
    assert!(v["crossing_euclid"]["a"].is_number());
    let trace = v["trace"].as_array().unwrap();
    assert!(trace.len() >= 10);
    assert_eq!(trace[0][0].as_f64().unwrap(), 0.0);
    assert_eq!(trace[0][1], false);
}

#[test]
fn shift_inside_out_reports_the_tangency() {
    let out = run(&["shift", "--mode", "inside-out", "--op", "gu+"]);
    let v = stdout_json(&out);
    assert_eq!(v["op"], "gu+");
    let lambda = v["lambda_star"].as_f64().unwrap();
    assert!((lambda - 0.620780).abs() < 1e-3, "λ* = {lambda}");
    assert!(v["surface_distance"].as_f64().unwrap() < 1e-3);
    assert!((v["touch"]["alpha"].as_f64().unwrap() - 0.04376684).abs() < 1e-4);
    assert!((v["touch"]["gamma"].as_f64().unwrap() + 0.53140931).abs() < 1e-4);

    let wrong_mode = run(&["shift", "--mode", "outside-in", "--op", "gu+"]);
    assert_eq!(wrong_mode.status.code(), Some(1));
}

#[test]
fn shift_rejects_coincident_endpoints() {
    let out = run(&["shift", "--mode", "outside-in", "--alpha", "0.2", "--tilde-alpha", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coincide"));
}

#[test]
fn mesh_emits_obj_surfaces() {
    let out = run(&["mesh"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("o positivity_pyramid\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 4);

    let path = tmp_path("body.obj");
    assert!(run(&["mesh", "--surface", "body", "--grid", "8", "--out", path.to_str().unwrap()])
        .status
        .success());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("o constraint_body\n"));
    assert_eq!(body.lines().filter(|l| l.starts_with("v ")).count(), 114);
    assert_eq!(body.lines().filter(|l| l.starts_with("f ")).count(), 224);

    let tiny = run(&["mesh", "--surface", "body", "--grid", "2"]);
    assert_eq!(tiny.status.code(), Some(1));
}

#[test]
fn usage_and_help_exit_codes() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("classify"));

    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));

    let conflict = run(&["classify", "--alpha", "0.1", "--horodecki-b", "2"]);
    assert_eq!(conflict.status.code(), Some(1));
}
