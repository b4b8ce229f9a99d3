use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hcontent"));
    c.env_remove("HCONTENT_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn cube_content_is_a_quarter() {
    let o = run(&["content", "--space", &fixture("cube2.json"), "--m", "2", "--exact"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_out(&o);
    assert_eq!(v["schema"], "hcontent/1");
    assert_eq!(v["command"], "content");
    assert_eq!(v["ok"], true);
    assert_eq!(v["result"]["content"]["value_upper"], "1/4");
    assert_eq!(v["result"]["content"]["value_lower"], "1/4");
    assert_eq!(v["result"]["content"]["optimal"], true);
}

#[test]
fn variant_space_format_and_centre_family() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pair.json", r#"{"variant":"voxel","n":2,"delta":"1/8","cells":[[0,0],[1,0]]}"#);
    let o = run(&["content", "--space", &f, "--m", "1", "--exact"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["result"]["content"]["value_upper"], "1/8");
    let o = run(&["content", "--space", &f, "--m", "1", "--family", "centers", "--exact"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn net_spaces_give_brackets() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "net.json", r#"{"kind":"net","metric":"l2","eps_net":0.1,"points":[[0,0],[3,4],[6,8]]}"#);
    let o = run(&["content", "--space", &f, "--m", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json_out(&o)["result"];
    assert!(r["value_lower"].as_f64().unwrap() <= r["value_upper"].as_f64().unwrap());
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(code(&run(&["content", "--space", "/nonexistent.json", "--m", "2"])), 1);
    assert_eq!(code(&run(&["content", "--space", &fixture("cube2.json"), "--m", "-2"])), 1);
    assert_eq!(code(&run(&["content", "--space", &fixture("cube2.json"), "--m", "2", "--family", "fixed"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["width", "--space", &fixture("cube2.json")])), 1);
    let o = run(&["coarea", "--space", &fixture("cube2.json"), "--m", "2", "--f", "bogus:1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    let o = run(&["corpus", "--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("invariants"));
}

#[test]
fn empty_corpus_is_an_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = run(&["corpus", "--dir", &dir.path().to_string_lossy(), "--report", &rep.to_string_lossy()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 fixtures"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(v["result"]["fixtures"], 0);
}

#[test]
fn corrupt_fixture_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures().join("cube2.json"), dir.path().join("a.json")).unwrap();
    write(dir.path(), "broken.json", "{\"kind\":\"voxel\",\"n\":2,");
    let o = run(&["corpus", "--dir", &dir.path().to_string_lossy()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.json"));
}

#[test]
fn corpus_invariants_table_in_filename_order() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["l_hexomino.json", "cube2.json", "cross3.json"] {
        std::fs::copy(fixtures().join(f), dir.path().join(f)).unwrap();
    }
    let rep = dir.path().join("out.report");
    let o = run(&["corpus", "--dir", &dir.path().to_string_lossy(), "--suite", "invariants", "--report", &rep.to_string_lossy()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8_lossy(&o.stdout).into_owned();
    let pos = |s: &str| table.find(s).unwrap();
    assert!(pos("cross3.json") < pos("cube2.json") && pos("cube2.json") < pos("l_hexomino.json"));
    assert!(table.contains("3 fixtures, 3 passed, 0 failed"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    let names: Vec<&str> = v["result"]["rows"].as_array().unwrap().iter().map(|r| r["fixture"].as_str().unwrap()).collect();
    assert_eq!(names, ["cross3.json", "cube2.json", "l_hexomino.json"]);
}

#[test]
fn corpus_measures_constants() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["cube2.json", "l_hexomino.json"] {
        std::fs::copy(fixtures().join(f), dir.path().join(f)).unwrap();
    }
    let rep = dir.path().join("r.json");
    let o = run(&["corpus", "--dir", &dir.path().to_string_lossy(), "--suite", "all", "--report", &rep.to_string_lossy()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(v["result"]["alpha"]["count"], 2);
    assert_eq!(v["result"]["c_measured"]["count"], 4);
    assert!(v["result"]["pushout_ratio"]["count"].as_u64().unwrap() > 0);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let rep = dir.path().join(format!("w{i}.json"));
        let o = run(&["width", "--space", &fixture("dumbbell.json"), "--m", "2", "--budget", "300", "--seed", "7", "--report", &rep.to_string_lossy()]);
        assert_eq!(code(&o), 0);
        assert!(o.stdout.is_empty());
        texts.push(std::fs::read(rep).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let v: Value = serde_json::from_slice(&texts[0]).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["result"]["recheck"]["covers"], true);
}

#[test]
fn verification_failure_exits_two_with_payload() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write(
        dir.path(),
        "v.json",
        r#"{"n":2,"points":[{"x":["3/10","2/5"],"rho":"1/64"},{"x":["7/10","3/5"],"rho":"1/64"},{"x":["1/2","1/4"],"rho":"1/64"}]}"#,
    );
    let ok = run(&["pushout", "--points", &pts, "--grid-R", "1", "--m", "2", "--delta", "1/32"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    // a ceiling far below any real displacement turns the same run into a violation
    let cfg = write(dir.path(), "tight.toml", "[pushout]\nceiling_base = 1e-9\n");
    let o = bin()
        .env("HCONTENT_CONFIG", &cfg)
        .args(["pushout", "--points", &pts, "--grid-R", "1", "--m", "2", "--delta", "1/32"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let v = json_out(&o);
    assert_eq!(v["ok"], false);
    assert!(v["failed"].as_array().unwrap().iter().any(|f| f == "displacement"));
    assert!(v["result"]["trace"]["levels"].as_array().is_some());
    assert!(String::from_utf8_lossy(&o.stderr).contains("verification failed"));
}

#[test]
fn config_flag_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 41\n");
    let o = run(&["--config", &cfg, "cube-eq", "--n", "2", "--k", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["seed"], 41);
    let bad = write(dir.path(), "bad.toml", "budget = 0\n");
    let o = run(&["--config", &bad, "cube-eq", "--n", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn example_config_is_accepted() {
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config.example.toml");
    let o = run(&["--config", &cfg.to_string_lossy(), "lw-check", "--space", &fixture("l_hexomino.json")]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["result"]["lw_holds"], true);
    assert_eq!(v["result"]["projections"], serde_json::json!([4, 3]));
}

#[test]
fn coarea_and_cone_emit_plots() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("p.csv");
    let o = run(&[
        "coarea", "--space", &fixture("cube2.json"), "--m", "2", "--f", "dist:0,0", "--emit-plot", &plot.to_string_lossy(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&plot).unwrap();
    assert!(csv.starts_with("level,slice_cost\n"));
    assert!(csv.lines().count() > 2);
    assert_eq!(json_out(&o)["result"]["profile"]["r2"], "1");

    let balls = write(dir.path(), "b.json", r#"{"balls":[{"center":["1","0"],"radius":"1"}]}"#);
    let o = run(&["cone", "--cover", &balls, "--apex", "0,0", "--R", "2", "--m", "2", "--emit-plot", &plot.to_string_lossy()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("input,step,radius\n"));
    let v = json_out(&o);
    assert_eq!(v["result"]["coverage"]["misses"], 0);
    assert_eq!(v["result"]["certificate"]["variant"], "improved");
}

#[test]
fn fill_writes_certificate_and_steps() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let steps = dir.path().join("steps.csv");
    let o = run(&[
        "fill", "--space", &fixture("l_hexomino.json"), "--m", "2", "--report", &cert.to_string_lossy(), "--emit-plot", &steps.to_string_lossy(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["result"]["schema"], "hcontent/1");
    assert_eq!(v["result"]["cost_ok"], true);
    assert!(std::fs::read_to_string(&steps).unwrap().starts_with("k,content,displacement\n"));
}

#[test]
fn decompose_and_local_width_succeed() {
    let o = run(&["decompose", "--space", &fixture("l_hexomino.json"), "--m", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_out(&o)["result"]["decomposition"]["alpha"], 1.0);
    let o = run(&["decompose", "--space", &fixture("l_hexomino.json"), "--m", "2", "--a", "1.2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["local-width", "--space", &fixture("strip.json"), "--m", "1", "--R", "1/2", "--budget", "200"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json_out(&o)["result"]["local"]["max_ratio"].as_f64().is_some());
}

#[test]
fn plot_without_data_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("p.csv");
    let o = run(&["cube-eq", "--n", "2", "--emit-plot", &plot.to_string_lossy()]);
    assert_eq!(code(&o), 1);
}
