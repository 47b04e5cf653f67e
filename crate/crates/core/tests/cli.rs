use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

const P4: &str = r#"{"vertices":[0,1,2,3],"edges":[[0,1],[1,2],[2,3]]}"#;

fn omega(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega")).current_dir(dir).env_remove("OMEGA_OUTPUT_ROOT").args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn manifest(bundle: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(bundle.join("manifest.json")).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn raag_classify_path_graph() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p4.json", P4);
    let o = omega(t.path(), &["raag", "classify", "--graph", "p4.json", "--out", "b"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(t.path().join("b/classification.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "id,class,witness");
    assert!(rows[1].starts_with("p4,OmegaCantor,"));
    let m = manifest(&t.path().join("b"));
    assert_eq!(m["subcommand"], "raag classify");
    assert_eq!(m["inputs"][0]["sha256"], format!("{:x}", Sha256::digest(P4.as_bytes())));
    assert_eq!(m["passed"], true);
}

#[test]
fn join_graphs_carry_a_checked_witness() {
    let t = TempDir::new().unwrap();
    write(t.path(), "c4.json", r#"{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"],["c","d"],["d","a"]]}"#);
    let o = omega(t.path(), &["raag", "classify", "--graph", "c4.json", "--out", "b"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS join witness"));
    assert!(fs::read_to_string(t.path().join("b/classification.csv")).unwrap().contains("c4,Empty,"));
}

#[test]
fn schema_errors_exit_two_with_the_field_path() {
    let t = TempDir::new().unwrap();
    for (body, path) in [
        ("", "."),
        ("{}", "."),
        (r#"{"version":1,"subcommand":"raag classify","graph":"p4.json","tolerances":{"eps":-1}}"#, "tolerances.eps"),
        (r#"{"version":1,"subcommand":"sierpinski build","lambda":0}"#, "lambda"),
        (r#"{"version":1,"subcommand":"bass-serre probe","d_bounds":[]}"#, "d_bounds"),
        (r#"{"version":1,"subcommand":"bass-serre probe","radius":40}"#, "radius"),
    ] {
        write(t.path(), "cfg.json", body);
        let o = omega(t.path(), &["run", "cfg.json"]);
        assert_eq!(code(&o), 2, "{body}");
        assert!(stderr(&o).contains(&format!("config error at {path}:")), "{body}: {}", stderr(&o));
        assert!(!t.path().join("omega-out").exists());
    }
    let o = omega(t.path(), &["raag", "classify", "--graph", "missing.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("input graph"));
    write(t.path(), "bad.json", r#"{"vertices":[0,1],"edges":[[0,7]]}"#);
    let o = omega(t.path(), &["raag", "classify", "--graph", "bad.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn entwine_schedule_is_a_precondition() {
    let t = TempDir::new().unwrap();
    let o = omega(t.path(), &["sierpinski", "entwine", "--lambda", "0.001", "--lambda2", "0.0005"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("schedule violated"), "{}", stderr(&o));
    let o = omega(t.path(), &["sierpinski", "build", "--lambda", "0.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("λ0"));
}

#[test]
fn failed_certificates_leave_a_witness() {
    let t = TempDir::new().unwrap();
    let o = omega(t.path(), &["kleinian", "shadows", "--lambda", "1", "--r-min", "0.2", "--out", "b"]);
    assert_eq!(code(&o), 1);
    let w: Value = serde_json::from_str(&fs::read_to_string(t.path().join("b/witness.json")).unwrap()).unwrap();
    assert_eq!(w[0]["certificate"], "separation");
    assert!(!w[0]["witness"].as_array().unwrap().is_empty());
    assert_eq!(manifest(&t.path().join("b"))["passed"], false);

    // A passing rerun into the same directory clears the stale witness.
    let o = omega(t.path(), &["kleinian", "shadows", "--r-min", "0.2", "--out", "b"]);
    assert_eq!(code(&o), 0);
    assert!(!t.path().join("b/witness.json").exists());
}

#[test]
fn output_root_comes_from_the_environment() {
    let t = TempDir::new().unwrap();
    let root = t.path().join("root");
    write(t.path(), "p4.json", P4);
    let o = Command::new(env!("CARGO_BIN_EXE_omega"))
        .current_dir(t.path())
        .env("OMEGA_OUTPUT_ROOT", &root)
        .args(["raag", "classify", "--graph", "p4.json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(files(&root.join("omega-out/raag-classify")), ["classification.csv", "classification.json", "manifest.json"]);
}

#[test]
fn manifests_record_tolerances_and_seed() {
    let t = TempDir::new().unwrap();
    let cfg = r#"{"version":1,"subcommand":"bass-serre probe","preset":"z2_amalgam_z2","radius":5,"d_bounds":[2,1],"seed":9,"tolerances":{"eps":1e-7},"output":"b"}"#;
    write(t.path(), "cfg.json", cfg);
    let o = omega(t.path(), &["run", "cfg.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = manifest(&t.path().join("b"));
    assert_eq!(m["seed"], 9);
    assert_eq!(m["tolerances"]["eps"], 1e-7);
    assert_eq!(m["tolerances"]["S"], 8.0);
    assert_eq!(m["settings"]["probe"]["seed"], 9);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["config"].get("output").is_none());
    for a in m["artifacts"].as_array().unwrap() {
        let bytes = fs::read(t.path().join("b").join(a["file"].as_str().unwrap())).unwrap();
        assert_eq!(a["sha256"], format!("{:x}", Sha256::digest(&bytes)));
    }
    let csv = fs::read_to_string(t.path().join("b/fits.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn config_file_and_flags_agree() {
    let t = TempDir::new().unwrap();
    write(t.path(), "cfg.json", r#"{"version":1,"subcommand":"bass-serre probe","radius":6,"d_bounds":[1,2],"seed":3,"output":"a"}"#);
    assert_eq!(code(&omega(t.path(), &["run", "cfg.json"])), 0);
    let o = omega(t.path(), &["bass-serre", "probe", "--radius", "6", "--d-bound", "1", "--d-bound", "2", "--seed", "3", "--out", "b"]);
    assert_eq!(code(&o), 0);
    for f in files(&t.path().join("a")) {
        assert_eq!(fs::read(t.path().join("a").join(&f)).unwrap(), fs::read(t.path().join("b").join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn runs_are_byte_identical() {
    let t = TempDir::new().unwrap();
    for out in ["x", "y"] {
        assert_eq!(code(&omega(t.path(), &["cantor", "homeo", "--depth", "2", "--out", out])), 0);
        assert_eq!(code(&omega(t.path(), &["bass-serre", "probe", "--radius", "6", "--seed", "5", "--out", &format!("{out}-bs")])), 0);
    }
    for (a, b) in [("x", "y"), ("x-bs", "y-bs")] {
        let (fa, fb) = (files(&t.path().join(a)), files(&t.path().join(b)));
        assert_eq!(fa, fb);
        for f in fa {
            assert_eq!(fs::read(t.path().join(a).join(&f)).unwrap(), fs::read(t.path().join(b).join(&f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn cantor_check_reads_a_sub_presentation() {
    let t = TempDir::new().unwrap();
    let binary = r#"{"states":1,"root":0,"edges":[[0,0,0],[0,1,0]]}"#;
    let glued = r#"{"states":2,"root":0,"edges":[[0,0,0],[0,1,0],[0,2,1],[0,3,1],[1,0,1],[1,1,1]]}"#;
    write(t.path(), "pair.json", &format!(r#"{{"ambient":{glued},"sub":{binary}}}"#));
    let o = omega(t.path(), &["cantor", "check", "--presentation", "pair.json", "--depth", "3", "--out", "b"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e: Value = serde_json::from_str(&fs::read_to_string(t.path().join("b/entwinement.json")).unwrap()).unwrap();
    assert_eq!(e["entwined"], true);

    // The binary tree is open in a tree that only adds a branch at the root.
    let root_only = r#"{"states":3,"root":0,"edges":[[0,0,1],[0,1,1],[0,2,2],[1,0,1],[1,1,1],[2,0,2],[2,1,2]]}"#;
    let sub = r#"{"states":2,"root":0,"edges":[[0,0,1],[0,1,1],[1,0,1],[1,1,1]]}"#;
    write(t.path(), "open.json", &format!(r#"{{"ambient":{root_only},"sub":{sub}}}"#));
    let o = omega(t.path(), &["cantor", "check", "--presentation", "open.json", "--out", "c"]);
    assert_eq!(code(&o), 1);
    let w: Value = serde_json::from_str(&fs::read_to_string(t.path().join("c/witness.json")).unwrap()).unwrap();
    assert_eq!(w[0]["certificate"], "entwined");

    write(t.path(), "same.json", &format!(r#"{{"ambient":{binary},"sub":{binary}}}"#));
    assert_eq!(code(&omega(t.path(), &["cantor", "check", "--presentation", "same.json"])), 2);
}

#[test]
fn export_copies_by_format() {
    let t = TempDir::new().unwrap();
    assert_eq!(code(&omega(t.path(), &["cantor", "homeo", "--depth", "2", "--out", "b"])), 0);
    let o = omega(t.path(), &["export", "b", "--format", "json", "--out", "j1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(files(&t.path().join("j1")), ["homeo.json", "report.json"]);
    assert_eq!(code(&omega(t.path(), &["export", "b", "--format", "json", "--out", "j2"])), 0);
    for f in files(&t.path().join("j1")) {
        assert_eq!(fs::read(t.path().join("j1").join(&f)).unwrap(), fs::read(t.path().join("j2").join(&f)).unwrap());
        assert_eq!(fs::read(t.path().join("j1").join(&f)).unwrap(), fs::read(t.path().join("b").join(&f)).unwrap());
    }
    assert_eq!(code(&omega(t.path(), &["export", "b", "--format", "dot", "--out", "d"])), 0);
    assert!(fs::read_to_string(t.path().join("d/refinement.dot")).unwrap().starts_with("digraph"));

    // No SVG in a Cantor bundle: nothing written.
    assert_eq!(code(&omega(t.path(), &["export", "b", "--format", "svg", "--out", "s"])), 0);
    assert!(!t.path().join("s").exists());

    let o = omega(t.path(), &["export", "b", "--format", "pdf"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("invalid value"));

    fs::create_dir(t.path().join("empty")).unwrap();
    let o = omega(t.path(), &["export", "empty", "--format", "csv", "--out", "e"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(!t.path().join("e").exists());

    assert_eq!(code(&omega(t.path(), &["export", "nowhere", "--format", "csv"])), 2);

    fs::write(t.path().join("b/homeo.json"), "tampered").unwrap();
    assert_eq!(code(&omega(t.path(), &["export", "b", "--format", "json", "--out", "j3"])), 2);
}

/// `(stage id, path count, vertex count)` per layer.
fn layers(svg: &str) -> Vec<(String, usize, usize)> {
    svg.split("<g id=\"")
        .skip(1)
        .map(|chunk| {
            let id = chunk.split('"').next().unwrap().to_string();
            let body = chunk.split("</g>").next().unwrap();
            let paths = body.matches("<path").count();
            let verts = body.matches('L').count() + body.matches('M').count();
            (id, paths, verts)
        })
        .collect()
}

#[test]
fn depth_three_bundle_exports_three_layers() {
    let t = TempDir::new().unwrap();
    let o = omega(t.path(), &["sierpinski", "build", "--depth", "3", "--r-min", "1", "--out", "b"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = omega(t.path(), &["export", "b", "--format", "svg", "--out", "svg"]);
    assert_eq!(code(&o), 0);
    assert_eq!(files(&t.path().join("svg")), ["strata.svg"]);
    let svg = fs::read_to_string(t.path().join("svg/strata.svg")).unwrap();
    let ls = layers(&svg);
    assert_eq!(ls.iter().map(|l| l.0.as_str()).collect::<Vec<_>>(), ["stage-1", "stage-2", "stage-3"]);
    // The cusps at 0 and ∞ both draw in every layer.
    assert!(ls.iter().all(|l| l.1 == 2), "{ls:?}");
    assert!(ls.iter().all(|l| l.2 > 100), "{ls:?}");
    let m = manifest(&t.path().join("b"));
    assert_eq!(m["settings"]["circle"]["depth"], 3);
    assert_eq!(m["settings"]["circle"]["lambda0"], m["settings"]["circle"]["lambda"]);
}
