use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn modspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn spectrum_of_triangle() {
    let out = modspec(&[
        "spectrum",
        &fixture("k3.tsv"),
        "--eps",
        "0",
        "--eps",
        "0.6",
        "--top",
        "2",
    ]);
    let report = json(&out);
    let mus: Vec<f64> = report["spectrum"]["mus"].as_array().unwrap().iter().map(num).collect();
    for (x, y) in mus.iter().zip([-0.5, -0.5, 0.0]) {
        assert!((x - y).abs() <= 1e-10);
    }
    let counts = report["spectrum"]["structural_counts"].as_array().unwrap();
    assert_eq!(counts[0]["count"], 2);
    assert_eq!(counts[1]["count"], 0);
    assert_eq!(report["spectrum"]["top"].as_array().unwrap().len(), 2);
    assert!((num(&report["spectrum"]["gap"]) - 0.5).abs() <= 1e-10);
    assert!(report.get("clustering").is_none());
}

#[test]
fn report_keys_in_order() {
    let out = modspec(&["regularity", &fixture("blocks.tsv"), "--k", "2", "--seed", "1"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let at = |key: &str| text.find(&format!("\"{key}\":")).unwrap();
    assert!(at("input") < at("spectrum"));
    assert!(at("spectrum") < at("clustering"));
    assert!(at("clustering") < at("regularity"));
    // Floats carry 17 significant digits.
    let volume = &text[at("volume") + 9..];
    let volume = &volume[..volume.find(',').unwrap()];
    let (mantissa, exp) = volume.split_once('e').unwrap();
    assert_eq!(mantissa.len(), 18, "{volume}");
    assert_eq!(exp, "1");
    assert!((volume.parse::<f64>().unwrap() - 37.6).abs() <= 1e-12);
}

#[test]
fn disconnected_input() {
    let out = modspec(&["spectrum", &fixture("disconnected.tsv")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Disconnected"));

    let report = json(&modspec(&[
        "spectrum",
        &fixture("disconnected.tsv"),
        "--largest-component",
    ]));
    assert_eq!(report["input"]["n"], 7);
    assert_eq!(report["input"]["components"], 2);
    assert_eq!(report["input"]["analyzed"], 4);
}

#[test]
fn bad_input_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.tsv");
    std::fs::write(&path, "a\tb\t1\nb\ta\t1\n").unwrap();
    let out = modspec(&["spectrum", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DuplicateEdge"));

    let out = modspec(&["spectrum", "/nonexistent/graph.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = modspec(&["spectrum", &fixture("k3.tsv"), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn clusters_follow_the_cliques() {
    let report = json(&modspec(&[
        "cluster",
        &fixture("two_cliques.tsv"),
        "--k",
        "2",
        "--seed",
        "3",
    ]));
    let labels = report["clustering"]["labels"].as_object().unwrap();
    let left = &labels["L0"];
    for i in 0..5 {
        assert_eq!(&labels[&format!("L{i}")], left);
        assert_ne!(&labels[&format!("R{i}")], left);
    }
    let c = &report["clustering"];
    let (m, q) = (num(&c["m_k"]), num(&c["q_k"]));
    assert!((m + q - 1.0).abs() <= 1e-10);
    assert!(m <= num(&c["relaxation_upper"]) + 1e-10);
}

#[test]
fn trivial_and_invalid_k() {
    let report = json(&modspec(&["cluster", &fixture("k3.tsv"), "--k", "1", "--seed", "0"]));
    assert!(num(&report["clustering"]["m_k"]).abs() <= 1e-12);
    for k in ["0", "4"] {
        let out = modspec(&["cluster", &fixture("k3.tsv"), "--k", k, "--seed", "0"]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("BadK"));
    }
    let out = modspec(&["cluster", &fixture("k3.tsv"), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2), "seed is mandatory");
}

#[test]
fn regularity_of_noiseless_blocks() {
    let report = json(&modspec(&[
        "regularity",
        &fixture("blocks.tsv"),
        "--k",
        "2",
        "--seed",
        "5",
    ]));
    let pairs = report["regularity"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    for p in pairs {
        assert_eq!(p["method"], "exact");
        if p["a"] != p["b"] {
            assert!(num(&p["alpha"]) <= 1e-10);
        }
    }
}

#[test]
fn regularity_methods_follow_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.tsv");
    let gen = modspec(&[
        "generate",
        "block",
        "--sizes",
        "15,15,15",
        "--p",
        "0.6,0.05,0.05;0.05,0.6,0.05;0.05,0.05,0.6",
        "--seed",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let g = path.to_str().unwrap();
    let report = json(&modspec(&[
        "regularity",
        g,
        "--k",
        "3",
        "--seed",
        "1",
        "--samples",
        "0",
    ]));
    let pairs = report["regularity"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6);
    assert!(pairs.iter().all(|p| p["method"] == "skipped" && p["alpha"].is_null()));

    let report = json(&modspec(&[
        "regularity",
        g,
        "--k",
        "3",
        "--seed",
        "1",
        "--samples",
        "50",
    ]));
    let pairs = report["regularity"]["pairs"].as_array().unwrap();
    assert!(pairs
        .iter()
        .all(|p| p["method"] == "sampled" && num(&p["alpha"]) >= 0.0));
    assert!(num(&report["regularity"]["bound"]) > 0.0);
}

#[test]
fn generate_outputs() {
    let out = modspec(&["generate", "classical", "--name", "complete", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n=3 edges=3"));

    let out = modspec(&[
        "generate",
        "block",
        "--sizes",
        "2,2",
        "--p",
        "0.5,0.1;0.2,0.5",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = modspec(&["generate", "block", "--sizes", "2,2", "--p", "0.5,0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = modspec(&["generate", "classical", "--name", "path"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = modspec(&[
            "generate",
            "block",
            "--sizes",
            "50,50",
            "--p",
            "0.3,0.05;0.05,0.3",
            "--seed",
            "7",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.tsv"), run("b.tsv"));
}

#[test]
fn json_round_trips() {
    let out = modspec(&["regularity", &fixture("two_cliques.tsv"), "--k", "2", "--seed", "9"]);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(value, again);
}

#[test]
fn converge_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.tsv");
    let out = modspec(&[
        "generate",
        "expected",
        "--sizes",
        "30,30",
        "--p",
        "0.5,0.1;0.1,0.5",
        "-o",
        graph.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let g = graph.to_str().unwrap();

    let csv = dir.path().join("s.csv");
    let out = modspec(&[
        "converge",
        g,
        "--mode",
        "spectrum",
        "--schedule",
        "10,20,40",
        "--trials",
        "3",
        "--j",
        "2",
        "--seed",
        "4",
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "kind,m,trial,component_size,coverage,flagged,mu_1,mu_2,err_1,err_2"
    );
    assert_eq!(lines.len(), 1 + 3 * 3 + 3);
    assert_eq!(lines.iter().filter(|l| l.starts_with("median,")).count(), 3);
    assert!(!text.contains('\r'));

    let out = modspec(&["converge", g, "--mode", "blowup", "--schedule", "1,2,4", "--k", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("trial,1,0.0000000000000000e0"));

    let out = modspec(&[
        "converge",
        g,
        "--mode",
        "kvariance",
        "--schedule",
        "20,40",
        "--trials",
        "2",
        "--k",
        "2",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 4 + 2);

    let out = modspec(&[
        "converge",
        g,
        "--mode",
        "spectrum",
        "--schedule",
        "10,61",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BadSchedule"));
    let out = modspec(&["converge", g, "--mode", "spectrum", "--schedule", "10,20"]);
    assert_eq!(out.status.code(), Some(2), "seed is mandatory when sampling");
}

#[test]
fn converge_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.tsv");
    modspec(&[
        "generate",
        "expected",
        "--sizes",
        "20,20",
        "--p",
        "0.6,0.1;0.1,0.6",
        "-o",
        graph.to_str().unwrap(),
    ]);
    let g = graph.to_str().unwrap();
    let run = |threads: &str| {
        modspec(&[
            "converge",
            g,
            "--mode",
            "spectrum",
            "--schedule",
            "10,20",
            "--trials",
            "5",
            "--seed",
            "6",
            "--threads",
            threads,
        ])
        .stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn book_session_is_current() {
    let book = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../book/src/cli.md")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.tsv");
    let g = graph.to_str().unwrap();
    let out = modspec(&[
        "generate",
        "block",
        "--sizes",
        "50,50,50",
        "--p",
        "0.3,0.05,0.05;0.05,0.3,0.05;0.05,0.05,0.3",
        "--seed",
        "1",
        "-o",
        g,
    ]);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(book.contains(summary.trim()), "{summary}");

    let report = json(&modspec(&["cluster", g, "--k", "3", "--seed", "1"]));
    assert_eq!(report["clustering"]["sizes"], serde_json::json!([50, 50, 50]));

    let out = modspec(&[
        "converge",
        g,
        "--mode",
        "spectrum",
        "--schedule",
        "30,60,120",
        "--trials",
        "5",
        "--seed",
        "2",
    ]);
    let csv = String::from_utf8(out.stdout).unwrap();
    for line in csv.lines().take(2) {
        assert!(book.contains(line), "{line}");
    }
}
