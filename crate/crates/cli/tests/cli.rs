use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(o: &Output, key: &str) -> Option<String> {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
}

fn json(o: &Output) -> Value {
    let text = stdout(o);
    serde_json::from_str(&text[text.find('{').expect("json block")..]).unwrap()
}

fn domain_error(args: &[&str], name: &str) {
    let o = jcode(args);
    assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    assert!(stderr(&o).contains(&format!("error: {name}:")), "{args:?}: {}", stderr(&o));
}

#[test]
fn measure_report_has_header_and_json() {
    let o = jcode(&["tile", "measure", "--family", "power:2", "--class", "0,1/2", "--res", "64"]);
    assert!(o.status.success());
    assert_eq!(value(&o, "resolution").as_deref(), Some("64"));
    assert_eq!(value(&o, "depth").as_deref(), Some("40"));
    assert_eq!(value(&o, "seed").as_deref(), Some("0xC0D1A6"));
    assert_eq!(value(&o, "closed_form").as_deref(), Some("1"));
    let j = json(&o);
    let m = j["measure_estimate"].as_f64().unwrap();
    assert!((m - 1.0).abs() <= 2.0 / 64.0, "{m}");
    assert_eq!(j["command"], "tile measure");
}

#[test]
fn multiplicity_and_tiling() {
    let o = jcode(&["tile", "multiplicity", "--family", "power:2", "--class", "0,1", "--res", "64"]);
    assert_eq!(value(&o, "multiplicity").as_deref(), Some("2"));
    let o = jcode(&["tile", "check-tiling", "--family", "power:2", "--class", "0,1/2", "--res", "64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(value(&o, "tiles").as_deref(), Some("true"));
}

#[test]
fn render_writes_identical_pgm_for_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pgm");
    let b = dir.path().join("b.pgm");
    let run = |path: &Path, threads: &str| {
        jcode(&[
            "tile", "render", "--family", "lattes", "--class", "i/2,1/2+1+i", "--res", "32", "--threads", threads,
            "--out", path.to_str().unwrap(),
        ])
    };
    let oa = run(&a, "1");
    let ob = run(&b, "4");
    assert!(oa.status.success() && ob.status.success());
    let bytes = std::fs::read(&a).unwrap();
    assert!(bytes.starts_with(b"P5\n"));
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(value(&oa, "pixels"), value(&ob, "pixels"));
}

#[test]
fn eqgraph_build_r1() {
    let o = jcode(&["eqgraph", "build", "--map", "quadcantor", "--radial", "r1"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert_eq!(dot.matches("[label=\"e\"]").count(), 1);
    assert_eq!(dot.matches("->").count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r3.dot");
    let o = jcode(&["eqgraph", "build", "--radial", "r3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("digraph r3"));
    assert_eq!(value(&o, "radial").as_deref(), Some("r3"));
}

#[test]
fn eqgraph_decide_and_mult() {
    let o = jcode(&["eqgraph", "decide", "--radial", "r1", "--a", "1^", "--b", "1^"]);
    assert_eq!(value(&o, "verdict").as_deref(), Some("related"));
    let o = jcode(&["eqgraph", "mult", "--radial", "r1", "--samples", "200", "--depth", "20"]);
    assert_eq!(value(&o, "modal").as_deref(), Some("1"));
    let again = jcode(&["eqgraph", "mult", "--radial", "r1", "--samples", "200", "--depth", "20"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn code_eval_and_growth() {
    let o = jcode(&["code", "eval", "--map", "quadcantor", "--radial", "r1", "--word", "121^", "--eps", "1e-8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bound: f64 = value(&o, "bound").unwrap().parse().unwrap();
    assert!(bound <= 1e-8);
    let o = jcode(&["code", "growth", "--map", "power:2", "--class", "0,1/2", "--kmax", "8"]);
    let counts: Vec<u64> = json(&o)["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(counts, (1..=8).map(|k| 1u64 << k).collect::<Vec<_>>());
    assert_eq!(value(&o, "full_growth").as_deref(), Some("true"));
}

#[test]
fn cod_commands() {
    let o = jcode(&["cod", "equal", "--family", "power:2", "--a", "0,3", "--b", "1,4"]);
    assert_eq!(value(&o, "equal").as_deref(), Some("true"));
    let o = jcode(&["cod", "equal", "--family", "power:2", "--a", "0,3", "--b", "0,4"]);
    assert_eq!(value(&o, "equal").as_deref(), Some("false"));
    let o = jcode(&["cod", "canon", "--family", "lattes", "--a", "i/2,1/2+1+i"]);
    assert!(o.status.success());
    assert!(value(&o, "canonical").is_some());
}

#[test]
fn selftest_single_criterion() {
    let o = jcode(&["selftest", "--criterion", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("criterion  5 PASS"));
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# tile\nfamily = power:2\nclass = 0,1/2\nres = 32\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = jcode(&["tile", "measure", "--config", c]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(value(&o, "resolution").as_deref(), Some("32"));
    let o = jcode(&["tile", "measure", "--config", c, "--res", "64"]);
    assert_eq!(value(&o, "resolution").as_deref(), Some("64"));

    std::fs::write(&cfg, "family = power:2\nclass = 0,1/2\nradius = 3\n").unwrap();
    let o = jcode(&["tile", "measure", "--config", c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("radius"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["tile", "measure", "--bogus"][..],
        &["tile", "measure", "--family", "power:2"],
        &["tile", "measure", "--family", "power:2", "--class", "0,1", "--res", "0"],
        &["frobnicate"],
        &["code", "eval", "--map", "power:2", "--word", "1^"],
    ] {
        let o = jcode(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    let o = jcode(&["tile", "measure", "--family", "power:2", "--class", "0,1", "--res", "0"]);
    assert!(stderr(&o).contains("--res"));
}

#[test]
fn domain_errors_exit_two_with_names() {
    domain_error(&["tile", "measure", "--family", "foo:2", "--class", "0"], "UnknownFamily");
    domain_error(&["tile", "measure", "--family", "power:2", "--class", "0,x"], "Parse");
    domain_error(&["tile", "measure", "--family", "power:2", "--class", "0,1", "--res", "8"], "InvalidResolution");
    domain_error(&["tile", "measure", "--family", "quadcantor", "--class", "0,1"], "UnsupportedFamily");
    domain_error(
        &["tile", "check-tiling", "--family", "power:3", "--class", "0,1/3,1", "--res", "27"],
        "ZeroMeasureTile",
    );
    domain_error(
        &["tile", "multiplicity", "--family", "power:3", "--class", "0,1/3,5/3", "--res", "27"],
        "Inconclusive",
    );
    domain_error(&["tile", "check-tiling", "--family", "power:2", "--class", "0,1/2", "--window", "4,0"], "InvalidWindow");
    domain_error(&["eqgraph", "build", "--map", "power:2", "--radial", "r1"], "UnsupportedFamily");
    domain_error(&["eqgraph", "build", "--radial", "r7"], "Parse");
    domain_error(&["eqgraph", "mult", "--radial", "r1", "--depth", "1"], "InvalidSampling");
    domain_error(&["code", "eval", "--map", "quadcantor", "--radial", "r1", "--word", "1x^"], "Parse");
    domain_error(
        &["code", "eval", "--map", "quadcantor", "--radial", "r1", "--word", "1^", "--eps", "1e-300"],
        "AccuracyUnreachable",
    );
    domain_error(&["cod", "equal", "--family", "power:2", "--a", "0,1", "--b", "0,1,2"], "InvalidClassEntry");
}
