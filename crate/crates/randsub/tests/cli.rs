use std::collections::HashMap;
use std::process::{Command, Output};

use randsub_core::extrema;

fn randsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randsub"))
        .args(args)
        .env_remove("RANDSUB_SEED")
        .env_remove("RANDSUB_SUPPORT_CAP")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = randsub(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv_text: &str) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            headers
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_owned(), v.to_owned()))
                .collect()
        })
        .collect()
}

fn f(row: &HashMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap()
}

#[test]
fn dist_single_step() {
    let out = ok(&["dist", "--k", "2", "--i", "1", "--p", "0.5"]);
    let r = rows(&out);
    let probs: Vec<(f64, f64)> = r.iter().map(|x| (f(x, "x"), f(x, "prob"))).collect();
    assert_eq!(probs, [(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]);
    assert_eq!(out.lines().next().unwrap(), "iteration,k,p,x,prob");
}

#[test]
fn dist_normalised() {
    let r = rows(&ok(&["dist", "--k", "2", "--i", "7", "--p", "0.9"]));
    assert_eq!(r.len(), 129);
    let total: f64 = r.iter().map(|x| f(x, "prob")).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn dist_ranges_and_grids() {
    let r = rows(&ok(&[
        "dist",
        "--i-range",
        "0:2",
        "--p-grid",
        "0.2:0.4:0.1",
    ]));
    // (2 + 3 + 5) support points for each of three p values.
    assert_eq!(r.len(), 30);
    assert_eq!(r[0]["iteration"], "0");
    assert_eq!(f(&r[1], "prob"), 1.0);
}

#[test]
fn exit_codes() {
    assert_eq!(
        randsub(&["dist", "--k", "2", "--i", "30", "--p", "0.9"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        randsub(&["dist", "--i", "3", "--p", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(randsub(&["dist", "--i", "3"]).status.code(), Some(2));
    assert_eq!(
        randsub(&["dist", "--k", "1", "--i", "3", "--p", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        randsub(&["moments", "--p-grid", "0:1:0.3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        randsub(&["extrema", "--i-range", "5:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        randsub(&["extrema", "--i-range", "2:4"]).status.code(),
        Some(2)
    );
    assert_eq!(randsub(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn support_cap_from_env_and_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_randsub"));
        cmd.args(["dist", "--i", "4", "--p", "0.5"]);
        if let Some(v) = env {
            cmd.env("RANDSUB_SUPPORT_CAP", v);
        }
        if let Some(v) = flag {
            cmd.args(["--support-cap", v]);
        }
        cmd.output().unwrap().status.code()
    };
    assert_eq!(run(None, None), Some(0));
    assert_eq!(run(Some("10"), None), Some(3));
    assert_eq!(run(Some("10"), Some("17")), Some(0));
}

#[test]
fn moments_curve() {
    let r = rows(&ok(&[
        "moments",
        "--k",
        "2",
        "--i",
        "10",
        "--p-grid",
        "0:1:0.001",
    ]));
    assert_eq!(r.len(), 1001);
    let at = |p: f64| r.iter().find(|x| f(x, "p") == p).unwrap();
    assert!((f(at(0.99), "var") - 8741.954).abs() < 1e-3);
    assert_eq!(f(at(1.0), "var"), 0.0);
    for k in ["2", "3"] {
        let r = rows(&ok(&[
            "moments",
            "--k",
            k,
            "--i",
            "10",
            "--p-grid",
            "0:1:0.001",
        ]));
        let sigma: Vec<f64> = r.iter().map(|x| f(x, "sigma")).collect();
        let peaks = (1..sigma.len() - 1)
            .filter(|&j| sigma[j] > sigma[j - 1] && sigma[j] >= sigma[j + 1])
            .count();
        assert_eq!(peaks, 1, "k={k}");
    }
}

#[test]
fn entropy_curves() {
    let r = rows(&ok(&[
        "entropy",
        "--i-range",
        "1:10",
        "--p-grid",
        "0:1:0.001",
    ]));
    assert_eq!(r.len(), 10010);
    for x in &r {
        if f(x, "p") == 0.0 || f(x, "p") == 1.0 {
            assert_eq!(f(x, "H_i"), 0.0);
        }
    }
    let h85 = r
        .iter()
        .find(|x| x["i"] == "10" && f(x, "p") == 0.85)
        .unwrap();
    assert!((f(h85, "H_i") - 0.67).abs() < 0.01);
    // The maximum moves right with each iteration.
    let argmax: Vec<f64> = (1..=10)
        .map(|i| {
            r.iter()
                .filter(|x| x["i"] == i.to_string())
                .max_by(|a, b| f(a, "H_i").total_cmp(&f(b, "H_i")))
                .map(|x| f(x, "p"))
                .unwrap()
        })
        .collect();
    assert!(argmax.windows(2).all(|w| w[1] > w[0]), "{argmax:?}");
}

#[test]
fn entropy_increment_left_empty_past_cap() {
    let r = rows(&ok(&[
        "entropy",
        "--i",
        "3",
        "--p",
        "0.5",
        "--support-cap",
        "9",
    ]));
    assert_eq!(r[0]["h_i"], "");
}

#[test]
fn hvar_curves() {
    let r = rows(&ok(&["hvar", "--i-range", "1:10", "--p-grid", "0:1:0.01"]));
    for x in r.iter().filter(|x| x["i"] == "1") {
        assert!((f(x, "var") - f(x, "H")).abs() < 1e-12);
    }
    let marked: Vec<_> = r.iter().filter(|x| x["is_p_r"] == "true").collect();
    assert_eq!(marked.len(), 10);
    let pr10 = f(marked.iter().find(|x| x["i"] == "10").unwrap(), "p");
    assert!((pr10 - extrema::variance_argmax(10, 2).unwrap()).abs() < 0.01);
    // Rows stay sorted by p within each curve.
    for i in 1..=10 {
        let ps: Vec<f64> = r
            .iter()
            .filter(|x| x["i"] == i.to_string())
            .map(|x| f(x, "p"))
            .collect();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((ps[0], *ps.last().unwrap()), (0.0, 1.0));
    }
}

#[test]
fn extrema_report() {
    let out = ok(&["extrema", "--k", "2,100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let fits = v["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 2);
    assert!((fits[0]["alpha"].as_f64().unwrap() - 0.6256).abs() < 0.05);
    assert!((fits[1]["beta"].as_f64().unwrap() - 1.0017).abs() < 0.02);
    assert_eq!(fits[0]["roots"].as_array().unwrap().len(), 39);
    assert_eq!(v["rows"].as_array().unwrap().len(), 78);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate", "--i", "7", "--p", "0.9", "--runs", "500", "--seed", "3",
    ];
    let a = randsub(&args);
    let b = randsub(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let from_env = Command::new(env!("CARGO_BIN_EXE_randsub"))
        .args(["simulate", "--i", "7", "--p", "0.9", "--runs", "500"])
        .env("RANDSUB_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(from_env.stdout, a.stdout);
    let other = randsub(&[
        "simulate", "--i", "7", "--p", "0.9", "--runs", "500", "--seed", "4",
    ]);
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn simulate_output_files_identical() {
    let dir = std::env::temp_dir().join(format!("randsub-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let paths = [dir.join("a.json"), dir.join("b.json")];
    for p in &paths {
        ok(&[
            "simulate",
            "--i",
            "6",
            "--p",
            "0.8",
            "--runs",
            "300",
            "--seed",
            "9",
            "--format",
            "json",
            "--output",
            p.to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["summary"]["runs"], 300);
    assert!(v["summary"]["tv_distance"].as_f64().unwrap() < 1.0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simulate_degenerate_and_full_mode() {
    let r = rows(&ok(&["simulate", "--i", "5", "--p", "1", "--runs", "50"]));
    let nonzero: Vec<_> = r.iter().filter(|x| x["count"] != "0").collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0]["x"], "32");
    let r = rows(&ok(&[
        "simulate", "--i", "4", "--p", "0.7", "--runs", "2000", "--mode", "full",
    ]));
    let total: u64 = r.iter().map(|x| x["count"].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 2000);
}

#[test]
fn presets_print_sequences() {
    let out = ok(&["simulate", "--preset", "fibonacci", "--i", "5"]);
    assert!(out.contains("\"(1,0,1,1,0,1,0,1)\""), "{out}");
    let r = rows(&ok(&["simulate", "--preset", "cantor", "--i", "2"]));
    assert_eq!(r[0]["sequence"], "(1,0,1,0,0,0,1,0,1)");
    let r = rows(&ok(&["simulate", "--preset", "morse_thue", "--i", "3"]));
    assert_eq!(r[0]["sequence"], "(0,1,1,0,1,0,0,1)");
    let r = rows(&ok(&["simulate", "--preset", "mandelbrot:3:1", "--i", "2"]));
    assert_eq!(r[0]["ones"], "9");
    assert_eq!(
        randsub(&["simulate", "--preset", "koch"]).status.code(),
        Some(2)
    );
}
