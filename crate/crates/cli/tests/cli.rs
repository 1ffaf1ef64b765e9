use std::process::{Command, Output};

use serde_json::Value;

fn hpcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpcs")).args(args).output().expect("spawn hpcs")
}

fn hpcs_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpcs")).args(args).env(key, val).output().expect("spawn hpcs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn amps(v: &Value) -> Vec<(f64, f64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn coherent_state_amplitudes() {
    let doc = stdout_json(&hpcs(&["state", "--j", "1", "--k", "0", "--x0", "2", "--p0", "0", "--nmax", "12"]));
    assert_eq!(doc["nmax"], 12);
    assert_eq!(doc["degenerate"], false);
    let a = amps(&doc["amplitudes"]);
    let mut fact = 1.0;
    for (n, &(re, im)) in a.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let expect = (-1f64).exp() * 2f64.powf(n as f64 / 2.0) / fact.sqrt();
        assert!((re - expect).abs() < 1e-14, "n={n}: {re} vs {expect}");
        assert_eq!(im, 0.0);
    }
    assert!(doc["tail_mass"].as_f64().unwrap() < 1e-5);
}

#[test]
fn zero_amplitude_limit_is_basis_state() {
    let doc = stdout_json(&hpcs(&["state", "--j", "3", "--k", "1", "--x0", "0", "--p0", "0"]));
    assert_eq!(doc["degenerate"], true);
    for (n, (re, im)) in amps(&doc["amplitudes"]).into_iter().enumerate() {
        assert_eq!((re, im), if n == 1 { (1.0, 0.0) } else { (0.0, 0.0) });
    }
}

#[test]
fn k_out_of_range_is_usage_error() {
    let o = hpcs(&["state", "--j", "2", "--k", "5", "--x0", "1", "--p0", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 ≤ k ≤ j−1"));
}

#[test]
fn malformed_flags_are_usage_errors() {
    assert_eq!(hpcs(&["state", "--j", "2"]).status.code(), Some(2));
    assert_eq!(hpcs(&["density", "--j", "x", "--k", "0", "--x0", "0", "--p0", "0"]).status.code(), Some(2));
    assert_eq!(hpcs(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn squeezed_state_families() {
    let sq = stdout_json(&hpcs(&["state", "--j", "2", "--k", "0", "--x0", "1", "--p0", "0.5", "--r", "0.4"]));
    assert_eq!(sq["params"]["family"], "squeezed_hpcs");
    let lm = stdout_json(&hpcs(&[
        "state", "--j", "2", "--k", "1", "--x0", "1", "--p0", "0.5", "--r", "0.4", "--phi", "0.3", "--lomu",
    ]));
    assert_eq!(lm["params"]["family"], "lomu");
    for doc in [sq, lm] {
        let norm: f64 = amps(&doc["amplitudes"]).iter().map(|(a, b)| a * a + b * b).sum();
        assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }
}

#[test]
fn both_routes_agree_on_reference_grid() {
    let o = hpcs(&[
        "density", "--j", "3", "--k", "0", "--x0", "0", "--p0", "10", "--nx", "241", "--nt", "24", "--route", "both",
    ]);
    assert!(o.status.success());
    let rows = data_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 241 * 24);
    let worst = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
    assert!(rows.iter().all(|r| r[2] >= 0.0 && r[3] >= 0.0));
}

#[test]
fn density_rows_are_t_major_and_round_trip() {
    let args = [
        "density", "--j", "4", "--k", "2", "--x0", "0", "--p0", "10", "--x-min", "-3", "--x-max", "3", "--nx", "7",
        "--t-min", "0", "--t-max", "1", "--nt", "3",
    ];
    let first = hpcs(&args);
    let second = hpcs(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let header: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).take(1).collect();
    assert_eq!(header, ["x,t,rho"]);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 21);
    assert_eq!((rows[0][0], rows[0][1]), (-3.0, 0.0));
    assert_eq!((rows[6][0], rows[6][1]), (3.0, 0.0));
    assert_eq!((rows[7][0], rows[7][1]), (-3.0, 0.5));
    assert_eq!(rows[20][1], 1.0);
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:?}"), field);
        }
    }
}

#[test]
fn default_grid_reproduces_first_reference_plot() {
    let o = hpcs(&[
        "density", "--j", "2", "--k", "0", "--x0", "2.8284271247461903", "--p0", "0", "--x-min", "-8", "--x-max", "8",
        "--nx", "321", "--t-min", "0", "--t-max", "6.283185307179586", "--nt", "128",
    ]);
    let rows = data_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 321 * 128);
    assert!(rows.iter().all(|r| r[2] >= 0.0));
    // Density at t = 0 is even in x and integrates to one.
    let t0: Vec<f64> = rows.iter().take(321).map(|r| r[2]).collect();
    let integral = 0.05 * (t0.iter().sum::<f64>() - 0.5 * (t0[0] + t0[320]));
    assert!((integral - 1.0).abs() < 1e-6, "{integral}");
    for i in 0..321 {
        assert!((t0[i] - t0[320 - i]).abs() < 1e-12);
    }
}

#[test]
fn density_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.csv");
    let p = path.to_str().unwrap();
    let o = hpcs(&["density", "--j", "2", "--k", "1", "--x0", "1", "--p0", "0", "--nx", "5", "--nt", "2", "--out", p]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(data_rows(&std::fs::read_to_string(&path).unwrap()).len(), 10);
}

#[test]
fn grid_cap_and_route_limits() {
    let base = ["density", "--j", "2", "--k", "0", "--x0", "1", "--p0", "0", "--nx", "20", "--nt", "10"];
    assert_eq!(hpcs_env(&base, "HPCS_MAX_POINTS", "199").status.code(), Some(2));
    assert_eq!(hpcs_env(&base, "HPCS_MAX_POINTS", "200").status.code(), Some(0));
    assert_eq!(hpcs(&["density", "--j", "2", "--k", "0", "--x0", "1", "--p0", "0", "--nt", "400"]).status.code(), Some(2));
    let closed5 = ["density", "--j", "5", "--k", "0", "--x0", "1", "--p0", "0", "--route", "closed"];
    assert_eq!(hpcs(&closed5).status.code(), Some(2));
    let fock5 = ["density", "--j", "5", "--k", "0", "--x0", "1", "--p0", "0", "--nx", "11", "--nt", "2"];
    assert_eq!(hpcs(&fock5).status.code(), Some(0));
    let inverted = ["density", "--j", "2", "--k", "0", "--x0", "1", "--p0", "0", "--x-min", "2", "--x-max", "1"];
    assert_eq!(hpcs(&inverted).status.code(), Some(2));
}

#[test]
fn bn_table_j1() {
    let doc = stdout_json(&hpcs(&["squeezed", "bn", "--j", "1", "--k", "0", "--R", "0.25", "--nmax", "6"]));
    let expect = [1.0, 1.0, 0.75, 0.25, -0.3125, -0.5625, -0.171875];
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), expect.len());
    for (row, e) in rows.iter().zip(expect) {
        assert!((row["recursion"][0].as_f64().unwrap() - e).abs() < 1e-15);
        assert_eq!(row["pattern"][0].as_f64().unwrap(), e);
        for c in row["closed"].as_array().unwrap() {
            assert!(c["rel_diff"].as_f64().unwrap() < 1e-12);
        }
    }
    assert_eq!(doc["closed_forms"], serde_json::json!(["sum", "hermite", "hyp1f1"]));
}

#[test]
fn bn_table_zero_r_and_unsolved_family() {
    let doc = stdout_json(&hpcs(&["squeezed", "bn", "--j", "2", "--k", "0", "--R", "0", "--nmax", "4"]));
    for row in doc["rows"].as_array().unwrap() {
        assert_eq!(row["recursion"][0].as_f64().unwrap(), 1.0);
    }
    let doc = stdout_json(&hpcs(&["squeezed", "bn", "--j", "3", "--k", "0", "--R", "0.1", "--nmax", "5"]));
    assert_eq!(doc["note"], "no closed form; recursion only");
    assert!(doc["rows"][2]["closed"].as_array().unwrap().is_empty());
    let csv = hpcs(&["squeezed", "bn", "--j", "3", "--k", "0", "--R", "0.1", "--nmax", "5", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.contains("# no closed form; recursion only"));
    assert!(!text.contains("pollaczek"));
}

#[test]
fn bn_table_pollaczek_column() {
    let doc = stdout_json(&hpcs(&["squeezed", "bn", "--j", "2", "--k", "1", "--R", "0.1", "--nmax", "8"]));
    for row in doc["rows"].as_array().unwrap() {
        let c = &row["closed"][0];
        assert_eq!(c["form"], "pollaczek");
        assert!(c["rel_diff"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn lomu_report_and_divergence() {
    let doc = stdout_json(&hpcs(&[
        "squeezed", "lomu", "--j", "2", "--k", "0", "--r", "0.6", "--phi", "0.2", "--beta-re", "1.1", "--beta-im",
        "-0.3", "--state",
    ]));
    assert_eq!(doc["convergence"]["within_tolerance"], true);
    assert!(doc["norm_sqr"].as_f64().unwrap() > 0.0);
    let norm: f64 = amps(&doc["state"]["amplitudes"]).iter().map(|(a, b)| a * a + b * b).sum();
    assert!((norm - 1.0).abs() < 1e-10);

    let o = hpcs(&["squeezed", "lomu", "--j", "2", "--k", "0", "--mu-re", "1", "--nu-re", "1.2", "--beta-re", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not normalisable"));

    let o = hpcs(&["squeezed", "lomu", "--j", "2", "--k", "0", "--mu-re", "1", "--nu-re", "0.5", "--beta-re", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = hpcs(&["verify", "--suite", "all", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["passed"], true);
    assert!(doc["versions"]["hpcs-core"].is_string());
    assert!(doc["seed"].is_u64());
    let checks = doc["checks"].as_array().unwrap();
    let n30 = checks.iter().find(|c| c["name"] == "printed_n30").expect("printed_n30 entry");
    assert_eq!(n30["kind"], "info");
}

#[test]
fn verify_mutation_fails() {
    let o = hpcs(&["verify", "--suite", "figures", "--mutate"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], false);
    let failed: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.starts_with("density_dual_route(3,")));
    assert!(failed.iter().any(|n| n.starts_with("density_dual_route(4,")));
}
