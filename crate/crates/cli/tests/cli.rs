use std::fs;
use std::process::{Command, Output};

use flatlab_core::liouville::LiouvilleTable;
use serde_json::Value;

fn flatlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatlab")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = flatlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn ok_text(args: &[&str]) -> String {
    let out = flatlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn flatness_reports_l1_ratio() {
    let v = ok_json(&["flatness", "--family", "gauss-fresnel", "--n", "1024", "--alpha", "1"]);
    let r = &v["result"]["reports"][0];
    assert_eq!(r["alpha"], 1.0);
    let l1 = r["lp_ratio"].as_f64().unwrap();
    assert!((l1 - 0.9967063261).abs() < 1e-7, "{l1}");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["generator"]["family"], "gauss-fresnel");
    assert!(v["grid_m"].as_u64().unwrap() >= 8192);
}

#[test]
fn blaschke_out_of_range_is_usage_error() {
    let out = flatlab(&["flatness", "--family", "blaschke", "--n", "10", "--a", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(0,1)"), "{err}");
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(flatlab(&["flatness", "--n", "10"]).status.code(), Some(2));
    assert_eq!(flatlab(&["flatness", "--family", "nope", "--n", "10"]).status.code(), Some(2));
    assert_eq!(flatlab(&["criterion", "--family", "monomial", "--n", "3", "--alpha", "0"]).status.code(), Some(2));
    assert_eq!(flatlab(&["gap", "--family", "littlewood", "--alpha", "2", "--n-list", "8"]).status.code(), Some(2));
    assert_eq!(flatlab(&["clarkson", "--p", "2.5"]).status.code(), Some(2));
    let out = flatlab(&["clarkson", "--p", "1.5", "--s", "1.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s <= p"));
}

#[test]
fn capability_errors_exit_3() {
    let out = flatlab(&["barker", "search", "--n", "40"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let out = flatlab(&["riesz", "plan", "--degrees", "64,64,64,64"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn littlewood_reports_are_byte_identical() {
    let args = ["flatness", "--family", "littlewood", "--n", "256", "--seed", "7"];
    let a = flatlab(&args).stdout;
    let b = flatlab(&args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let mut threaded = vec!["--threads", "1"];
    threaded.extend_from_slice(&args);
    assert_eq!(flatlab(&threaded).stdout, a);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["config"]["generator"]["seed"], 7);
    assert_eq!(v["rng"], "chacha8");
}

#[test]
fn embedded_config_reproduces_report() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["flatness", "--family", "littlewood", "--n", "64", "--seed", "3", "--alpha", "1,4"],
        &["gap", "--family", "littlewood", "--alpha", "4", "--n-list", "16,32", "--samples", "5"],
        &["liouville", "sweep", "--n-list", "100,1000"],
        &["barker", "search", "--n", "11", "--format", "csv"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("r{i}"));
        let mut with_out = args.to_vec();
        let p = path.to_str().unwrap();
        with_out.extend_from_slice(&["--output", p]);
        ok_text(&with_out);
        let first = fs::read(&path).unwrap();
        let rerun = ok_text(&["run", "--config", p]);
        assert_eq!(rerun.as_bytes(), &first[..], "{args:?}");
    }
}

#[test]
fn config_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"subcommand":"criterion","generator":{"family":"blaschke","n":512,"a":0.9},"alphas":[1],"format":"json","params":{"k":3}}"#,
    )
    .unwrap();
    let v = ok_json(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(v["result"]["verdict"]["criterion_satisfied"], false);
    assert_eq!(v["result"]["verdict"]["verdict"], "criterion not satisfied at this threshold");
    fs::write(&cfg, r#"{"subcommand":"criterion","format":"json","typo":1}"#).unwrap();
    assert_eq!(flatlab(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn barker_search_13() {
    let v = ok_json(&["barker", "search", "--n", "13"]);
    assert_eq!(v["result"]["count"], 4);
    assert_eq!(v["result"]["verdict"], "consistent");
    assert!(v["result"]["search"]["nodes_visited"].as_u64().unwrap() > 0);
    let csv = ok_text(&["barker", "search", "--n", "13", "--format", "csv"]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    assert!(rows.contains(&"1,-1,1,-1,1,1,-1,-1,1,1,1,1,1"));
}

#[test]
fn barker_census_verdict() {
    let v = ok_json(&["barker", "search", "--n-max", "13", "--symmetry-reduce"]);
    assert_eq!(v["result"]["verdict"], "consistent");
    let lengths = v["result"]["probe"]["lengths"].as_array().unwrap();
    let exists: Vec<u64> =
        lengths.iter().filter(|l| l["exists"] == true).map(|l| l["n"].as_u64().unwrap()).collect();
    assert_eq!(exists, vec![1, 2, 3, 4, 5, 7, 11, 13]);
}

#[test]
fn barker_profile_and_flatness() {
    let v = ok_json(&["barker", "profile", "--sequence", "1,-1,1,1,-1,1,1,1,-1,-1,-1"]);
    assert!((v["result"]["merit_factor"].as_f64().unwrap() - 12.1).abs() < 1e-12);
    assert_eq!(v["result"]["is_barker"], true);
    let v = ok_json(&["barker", "profile", "--sequence", "1"]);
    assert_eq!(v["result"]["merit_factor"], "inf");
    let v = ok_json(&["barker", "flatness", "--sequence", "1,-1,1,-1,1,1,-1,-1,1,1,1,1,1"]);
    assert!((v["result"]["square_deviation"].as_f64().unwrap() - 12.0 / 169.0).abs() < 1e-15);
    assert_eq!(flatlab(&["barker", "profile", "--sequence", "1,0,1"]).status.code(), Some(2));
}

#[test]
fn criterion_littlewood_alpha4() {
    let v = ok_json(&["criterion", "--family", "littlewood", "--n", "1024", "--alpha", "4", "--k", "3"]);
    let verdict = &v["result"]["verdict"];
    assert_eq!(verdict["verdict"], "criterion satisfied: family cannot be L^alpha-flat");
    assert!(verdict["observed_ratio"].as_f64().unwrap() > 1.0);
    assert_eq!(v["result"]["criterion"]["family_tag"], "littlewood-random");
    assert_eq!(v["seed"], 0);
}

#[test]
fn riesz_demo_rows() {
    let csv = ok_text(&["riesz", "demo", "--n-list", "64,256,1024"]);
    assert_eq!(csv.lines().nth(1), Some("n,l4_ratio,l1,flat2,mahler"));
    assert_eq!(data_rows(&csv).len(), 3);
}

#[test]
fn riesz_plan_report() {
    let v = ok_json(&["riesz", "plan", "--degrees", "3,2,4", "--seed", "5"]);
    let r = &v["result"];
    assert_eq!(r["summary"]["spacings"], serde_json::json!([1, 7, 35]));
    assert_eq!(r["dissociated"], true);
    assert_eq!(r["stability"]["unstable"], serde_json::json!([]));
    assert_eq!(r["plan"]["depth"], 3);
    let m = &r["mahler"];
    assert!(m["abs_diff"].as_f64().unwrap() <= 1e-6 * m["product_formula"].as_f64().unwrap());
    let v = ok_json(&["riesz", "plan", "--degrees", "3,3", "--factor-family", "gauss-fresnel"]);
    assert_eq!(v["result"]["summary"]["partial_degree"], 3 + 7 * 3);
}

#[test]
fn liouville_commands() {
    let csv = ok_text(&["liouville", "sweep", "--n-list", "1,10000", "--alpha", "1,4,inf"]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[..3], &["1,1,1", "1,4,1", "1,inf,1"]);
    let v = ok_json(&["liouville", "partial", "--n", "10"]);
    assert_eq!(v["result"]["final_sum"], 0);

    let dir = tempfile::tempdir().unwrap();
    let bits = dir.path().join("l.bin");
    let v = ok_json(&["liouville", "table", "--n", "1000", "--bits", bits.to_str().unwrap()]);
    assert_eq!(v["result"]["n"], 1000);
    let t = LiouvilleTable::read_bits(fs::File::open(&bits).unwrap()).unwrap();
    assert_eq!(t.bound(), 1000);
    assert_eq!(t.get(12), -1);
    assert!(!serde_json::to_string(&v["config"]).unwrap().contains("l.bin"));
}

#[test]
fn clarkson_and_measure_commands() {
    let v = ok_json(&["clarkson", "--p", "1.5", "--r", "3", "--s", "1.5", "--pairs", "30", "--delta-eps", "2"]);
    assert_eq!(v["result"]["all_hold"], true);
    assert!((v["result"]["convexity_delta"][0]["delta"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    let v = ok_json(&["clarkson", "--p", "1.3", "--classical", "--pairs", "10"]);
    assert_eq!(v["result"]["form"], "classical");
    let v = ok_json(&["measure", "--family", "gauss-fresnel", "--n", "1024", "--zeta2", "0.2"]);
    assert_eq!(v["result"]["sublevel"]["holds"], true);
    assert_eq!(v["result"]["markov"]["holds"], true);
    let v = ok_json(&["measure", "--family", "monomial", "--n", "2"]);
    assert!(v["result"]["markov"]["not_applicable"].is_string());
}

#[test]
fn csv_refused_for_non_tabular_reports() {
    let out = flatlab(&["liouville", "partial", "--n", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}
