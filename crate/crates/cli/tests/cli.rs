use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use spectral_bayes::density::normal_pdf;
use spectral_bayes::oracles::{conjugate_gaussian_posterior, grid_posterior};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hb(args: &[&str]) -> Run {
    hb_env(args, &[])
}

fn hb_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hb"));
    cmd.args(args).env_remove("HB_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("spawn hb");
    Run {
        code: status.code().unwrap_or(-1),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> Run {
    let r = hb(args);
    assert_eq!(r.code, 0, "hb {args:?} failed: {}", r.stderr);
    r
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn project(dir: &TempDir, name: &str, family: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["project", family, "--out", s(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

fn entries(p: &Path) -> Vec<(f64, f64)> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_f64().unwrap(), e[1].as_f64().unwrap()))
        .collect()
}

fn summary_value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn project_uniform_has_single_mode() {
    let dir = TempDir::new().unwrap();
    let f = project(&dir, "u.json", "uniform", &["--K", "8"]);
    let e = entries(&f);
    assert_eq!(e.len(), 17);
    assert!((e[8].0 - 0.398_942_3).abs() < 1e-7);
    assert!((e[8].0 - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    for (i, (re, im)) in e.iter().enumerate() {
        assert!(im.abs() < 1e-15);
        if i != 8 {
            assert!(re.abs() < 1e-15, "entry {i} = {re}");
        }
    }
}

#[test]
fn project_reports_decay_class() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "g.json");
    let r = ok(&["project", "gaussian:0,0.3", "--K", "64", "--out", s(&out)]);
    assert!(r.stdout.contains("decay: Exponential"), "{}", r.stdout);

    let out = path(&dir, "i.json");
    let r = ok(&["project", "indicator:-1,1", "--K", "128", "--out", s(&out)]);
    assert!(r.stdout.contains("decay: Algebraic"), "{}", r.stdout);
    assert!(r.stdout.lines().any(|l| l.starts_with("warning: algebraic decay")));
}

#[test]
fn project_recommends_k() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "g.json");
    let r = ok(&["project", "gaussian:0,0.3", "--K", "64", "--epsilon", "1e-6", "--out", s(&out)]);
    let k = summary_value(&r.stdout, "recommended_K");
    assert!(k > 5.0 && k < 64.0, "{k}");
}

#[test]
fn project_to_stdout_keeps_data_clean() {
    let r = ok(&["project", "gaussian:0,0.5", "--K", "4"]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["basis"]["K"], 4);
    assert!(r.stderr.contains("basis:"));
}

#[test]
fn project_contract_errors() {
    assert_eq!(hb(&["project", "cauchy:0,1"]).code, 2);
    assert_eq!(hb(&["project", "gaussian:0,-1"]).code, 2);
    assert_eq!(hb(&["project", "uniform", "--basis", "hermite"]).code, 2);
    assert_eq!(hb(&["project", "gaussian:0,1", "--basis", "hermite", "--domain", "-1,1"]).code, 2);
    assert_eq!(hb(&["project", "gaussian:0,1", "--basis", "cosine"]).code, 2);
    assert_eq!(hb(&["project", "gaussian:0,1", "--K", "8", "--M", "4"]).code, 2);
    assert_eq!(hb(&["project", "gaussian:0,1", "--mode", "padded"]).code, 2);
    assert_eq!(hb(&["project", "uniform", "--out", "/nonexistent/dir/x.json"]).code, 3);
    assert_eq!(hb(&["project", "grid:/nonexistent.csv"]).code, 3);
}

#[test]
fn project_sampled_grid_and_other_bases() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "tri.csv");
    std::fs::write(&csv, "x,density\n-1,0\n0,1\n1,0\n").unwrap();
    let f = project(&dir, "tri.json", &format!("grid:{}", s(&csv)), &["--K", "16"]);
    assert_eq!(entries(&f).len(), 33);

    let c = project(&dir, "c.json", "gaussian:0.5,0.2", &["--basis", "cosine", "--domain", "0,1", "--K", "32"]);
    assert_eq!(entries(&c).len(), 33);
    let h = project(&dir, "h.json", "mixture:1,-1,0.7;1,1,0.7", &["--basis", "hermite", "--K", "20"]);
    assert_eq!(entries(&h).len(), 21);
    let r = ok(&["diagnose", s(&h)]);
    assert!(r.stdout.contains("basis: Hermite"));
}

#[test]
fn update_uniform_prior_returns_normalized_likelihood() {
    let dir = TempDir::new().unwrap();
    let u = project(&dir, "u.json", "uniform", &["--K", "32"]);
    let l = project(&dir, "l.json", "gaussian:0.3,0.4", &["--K", "32"]);
    let post = path(&dir, "post.json");
    ok(&["update", s(&u), s(&l), "--out", s(&post)]);
    let le = entries(&l);
    let pe = entries(&post);
    let z = (2.0 * PI).sqrt() * le[32].0;
    for (a, b) in le.iter().zip(&pe) {
        assert!((a.0 / z - b.0).abs() < 1e-10 && (a.1 / z - b.1).abs() < 1e-10);
    }
}

#[test]
fn update_evidence_matches_grid_check() {
    let dir = TempDir::new().unwrap();
    let p = project(&dir, "p.json", "gaussian:0,0.5", &[]);
    let l = project(&dir, "l.json", "gaussian:0.3,0.4", &[]);
    let post = path(&dir, "post.json");
    let r = ok(&["update", s(&p), s(&l), "--check", "--out", s(&post)]);
    let z = summary_value(&r.stdout, "evidence");
    let oracle = summary_value(&r.stdout, "oracle_evidence");
    assert!((z - oracle).abs() <= 1e-8 * oracle);
    assert!(summary_value(&r.stdout, "aliasing_estimate") < 1e-8);
}

#[test]
fn update_engines_print_identical_summaries() {
    let dir = TempDir::new().unwrap();
    let p = project(&dir, "p.json", "mixture:0.4,-1,0.3;0.6,0.8,0.5", &[]);
    let l = project(&dir, "l.json", "gaussian:0.3,0.4", &[]);
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    let direct = ok(&["update", s(&p), s(&l), "--engine", "direct", "--out", s(&a)]);
    let fft = ok(&["update", s(&p), s(&l), "--engine", "fft", "--out", s(&b)]);
    assert_eq!(direct.stdout, fft.stdout);
    let circ = ok(&["update", s(&p), s(&l), "--mode", "circular", "--out", s(&a)]);
    assert!(circ.stdout.contains("evidence:"));
}

#[test]
fn update_errors() {
    let dir = TempDir::new().unwrap();
    let a = project(&dir, "a.json", "indicator:2,3", &["--K", "4"]);
    let b = project(&dir, "b.json", "indicator:-3,-2", &["--K", "4"]);
    let c = project(&dir, "c.json", "uniform", &["--K", "5"]);
    let out = path(&dir, "o.json");
    assert_eq!(hb(&["update", s(&a), s(&b), "--out", s(&out)]).code, 4);
    assert_eq!(hb(&["update", s(&a), s(&c), "--out", s(&out)]).code, 2);
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(hb(&["update", s(&a), s(&bad)]).code, 3);
    assert_eq!(hb(&["update", s(&a), "/nonexistent.json"]).code, 3);
}

#[test]
fn sequential_without_observations_returns_prior() {
    let dir = TempDir::new().unwrap();
    let p = project(&dir, "p.json", "gaussian:0.2,0.5", &["--K", "16"]);
    let out = path(&dir, "out.json");
    let r = ok(&["sequential", s(&p), "--out", s(&out)]);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), std::fs::read_to_string(&out).unwrap());
    assert_eq!(csv_rows(&r.stdout).len(), 1);
}

#[test]
fn sequential_uniform_likelihoods_change_nothing() {
    let dir = TempDir::new().unwrap();
    let p = project(&dir, "p.json", "gaussian:0.2,0.5", &["--K", "32"]);
    let u = project(&dir, "u.json", "uniform", &["--K", "32"]);
    let out = path(&dir, "out.json");
    let r = ok(&["sequential", s(&p), s(&u), s(&u), s(&u), "--out", s(&out)]);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 4);
    let z: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(z.iter().all(|v| (v - z[0]).abs() < 1e-14));
    assert!((z[0] - 1.0 / (2.0 * PI)).abs() < 1e-10);
    let prior = entries(&p);
    let mass = (2.0 * PI).sqrt() * prior[32].0;
    for (a, b) in prior.iter().zip(&entries(&out)) {
        assert!((a.0 / mass - b.0).abs() < 1e-14 && (a.1 / mass - b.1).abs() < 1e-14);
    }
}

#[test]
fn sequential_gaussian_chain_matches_conjugate() {
    let dir = TempDir::new().unwrap();
    let p = project(&dir, "p.json", "gaussian:0,0.5", &[]);
    let xs = [0.31, -0.12, 0.25, 0.4, 0.05, -0.3, 0.18, 0.22, -0.05, 0.35];
    let likes: Vec<PathBuf> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| project(&dir, &format!("l{i}.json"), &format!("gaussian:{x},0.4"), &[]))
        .collect();
    let csv = path(&dir, "chain.csv");
    let mut args = vec!["sequential", s(&p)];
    args.extend(likes.iter().map(|l| s(l)));
    args.extend(["--csv", s(&csv)]);
    ok(&args);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("step,evidence,log_evidence_sum,mean,variance\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 11);
    let (mut mu, mut var) = (0.0, 0.25);
    for x in xs {
        (mu, var) = conjugate_gaussian_posterior(mu, var, x, 0.16).unwrap();
    }
    let last = &rows[10];
    assert!((last[3].parse::<f64>().unwrap() - mu).abs() < 1e-6);
    assert!((last[4].parse::<f64>().unwrap() - var).abs() < 1e-6);
}

#[test]
fn diagnose_classes() {
    let dir = TempDir::new().unwrap();
    let g = project(&dir, "g.json", "gaussian:0,0.3", &[]);
    let r = ok(&["diagnose", s(&g)]);
    assert!(r.stdout.contains("decay: Exponential"));
    assert!(r.stdout.contains("verdict: Ideal"));
    assert!(r.stdout.contains("tail_energy_half_K:"));

    let i = project(&dir, "i.json", "indicator:-1,1", &["--K", "128"]);
    let r = ok(&["diagnose", s(&i)]);
    assert!(r.stdout.contains("decay: Algebraic"));
    assert!(r.stdout.contains("verdict: Challenging"));

    let g128 = project(&dir, "g128.json", "gaussian:0,0.3", &["--K", "128"]);
    let r = ok(&["diagnose", s(&g128), "--likelihood", s(&i)]);
    assert!(r.stdout.contains("verdict: Challenging"));

    let u = project(&dir, "u.json", "uniform", &["--K", "16"]);
    let r = ok(&["diagnose", s(&u), "--epsilon", "1e-3"]);
    assert!(r.stdout.contains("decay: Undecided"));
    assert_eq!(summary_value(&r.stdout, "recommended_K"), 0.0);

    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, r#"{"format_version":1,"basis":{"kind":"fourier","domain":{"lo":0,"hi":1},"K":2},"entries":[[1,0]]}"#).unwrap();
    assert_eq!(hb(&["diagnose", s(&bad)]).code, 3);
}

#[test]
fn bench_rows_and_exponents() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "bench.csv");
    let r = ok(&["bench", "--sizes", "33,65,129", "--repeats", "5", "--out", s(&out)]);
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 6);
    let order: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(order[0], ("33".into(), "direct".into()));
    assert_eq!(order[1], ("33".into(), "fft".into()));
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() > 0.0 && r[3] == "5"));
    assert!(r.stdout.lines().any(|l| l.starts_with("exponents: fft=")));

    let r = ok(&["bench", "--sizes", "65", "--repeats", "5"]);
    assert_eq!(csv_rows(&r.stdout).len(), 2);
    assert!(!r.stderr.contains("exponents"));
}

#[test]
fn bench_contract() {
    assert_eq!(hb(&["bench", "--sizes", "64"]).code, 2);
    assert_eq!(hb(&["bench", "--sizes", "31"]).code, 2);
    assert_eq!(hb(&["bench", "--sizes", "33", "--repeats", "3"]).code, 2);
    assert_eq!(hb_env(&["bench", "--sizes", "33", "--repeats", "5"], &[("HB_SEED", "x")]).code, 2);
    let r = hb_env(&["bench", "--sizes", "33", "--repeats", "5"], &[("HB_SEED", "7")]);
    assert_eq!(r.code, 0);
    let r = ok(&["bench", "--sizes", "32769", "--repeats", "5"]);
    assert_eq!(csv_rows(&r.stdout).len(), 1);
    assert!(r.stderr.contains("skipped: direct engine at N = 32769"));
}

#[test]
fn reconstruct_uniform_is_constant() {
    let dir = TempDir::new().unwrap();
    let u = project(&dir, "u.json", "uniform", &["--K", "8"]);
    let out = path(&dir, "u.csv");
    let r = ok(&["reconstruct", s(&u), "--points", "101", "--out", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("theta,density\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101);
    for row in rows {
        assert!((row[1].parse::<f64>().unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-14);
    }
    assert_eq!(summary_value(&r.stdout, "negative_points"), 0.0);
}

#[test]
fn reconstruct_posterior_matches_grid_oracle() {
    let dir = TempDir::new().unwrap();
    let p = project(&dir, "p.json", "gaussian:0,0.5", &[]);
    let l = project(&dir, "l.json", "gaussian:0.3,0.4", &[]);
    let post = path(&dir, "post.json");
    ok(&["update", s(&p), s(&l), "--out", s(&post)]);
    let out = path(&dir, "post.csv");
    ok(&["reconstruct", s(&post), "--points", "2001", "--out", s(&out)]);
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    let oracle = grid_posterior(|x| normal_pdf(x, 0.0, 0.5), |x| normal_pdf(x, 0.3, 0.4), -PI, PI, 2001).unwrap();
    for (row, (x, d)) in rows.iter().zip(oracle.grid.iter().zip(&oracle.density)) {
        assert!((row[0].parse::<f64>().unwrap() - x).abs() < 1e-12);
        assert!((row[1].parse::<f64>().unwrap() - d).abs() <= 1e-6);
    }
}

#[test]
fn reconstruct_indicator_shows_gibbs_undershoot() {
    let dir = TempDir::new().unwrap();
    let i = project(&dir, "i.json", "indicator:-1,1", &["--K", "32"]);
    let out = path(&dir, "i.csv");
    let r = ok(&["reconstruct", s(&i), "--out", s(&out)]);
    assert!(summary_value(&r.stdout, "negative_points") > 0.0);
    assert!(r.stdout.contains("warning: negative density"));
}

#[test]
fn reconstruct_grid_outside_domain() {
    let dir = TempDir::new().unwrap();
    let u = project(&dir, "u.json", "uniform", &["--K", "8"]);
    assert_eq!(hb(&["reconstruct", s(&u), "--grid", "-4,0"]).code, 2);
    assert_eq!(hb(&["reconstruct", s(&u), "--grid", "1,0"]).code, 2);
    let r = ok(&["reconstruct", s(&u), "--grid", "-pi/2,pi/2", "--points", "3"]);
    assert_eq!(csv_rows(&r.stdout).len(), 3);
}
