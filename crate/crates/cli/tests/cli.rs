use std::path::Path;
use std::process::{Command, Output};

use repet2d::experiments::experiment;

fn repet2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repet2d")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_measure_and_blocktree() {
    let dir = tempfile::tempdir().unwrap();
    let b3 = path(dir.path(), "b3.txt");
    assert!(repet2d(&["gen", "--family", "bk", "--params", "3", "--out", &b3]).status.success());
    let o = repet2d(&["measure", "--in", &b3, "--pm", "3", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("P(3,3): 64"), "{}", stdout(&o));

    let csv = path(dir.path(), "tree.csv");
    assert!(repet2d(&["blocktree", "--in", &b3, "--arity", "2", "--csv", &csv]).status.success());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("level,side,nodes"));
    assert_eq!(table.lines().count(), 6);
}

#[test]
fn measure_gamma_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let m = path(dir.path(), "i3.txt");
    std::fs::write(&m, "2d 3 3\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let csv = path(dir.path(), "out.csv");
    let o = repet2d(&["measure", "--in", &m, "--gamma-exact", "--delta", "--csv", &csv]);
    assert!(o.status.success());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.contains("gamma,\"3\""), "{table}");
    assert!(table.contains("delta,"), "{table}");
}

#[test]
fn grammar_access_and_macro_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "e4.slp");
    assert!(repet2d(&["grammar", "family", "--name", "ek", "--param", "4", "--out", &g]).status.success());
    let o = repet2d(&["grammar", "validate", "--in", &g]);
    assert!(stdout(&o).contains("4x16"), "{}", stdout(&o));

    let o = repet2d(&["access", "--grammar", &g, "--query", "1", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with('1'), "{}", stdout(&o));
    let o = repet2d(&["access", "--grammar", &g, "--verify-all"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mismatches: 0"));

    let scheme = path(dir.path(), "e4.scheme");
    assert!(repet2d(&["macro", "from-grammar", "--grammar", &g, "--out", &scheme]).status.success());
    assert!(repet2d(&["macro", "validate", "--in", &scheme]).status.success());
    let expanded = path(dir.path(), "e4a.txt");
    let decoded = path(dir.path(), "e4b.txt");
    assert!(repet2d(&["grammar", "expand", "--in", &g, "--out", &expanded]).status.success());
    assert!(repet2d(&["macro", "decode", "--in", &scheme, "--out", &decoded]).status.success());
    assert_eq!(std::fs::read_to_string(expanded).unwrap(), std::fs::read_to_string(decoded).unwrap());
}

#[test]
fn minimize_small_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = path(dir.path(), "alt.txt");
    assert!(repet2d(&["gen", "--family", "alt", "--params", "4,6", "--out", &m]).status.success());
    let o = repet2d(&["grammar", "minimize", "--in", &m, "--rl"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("size 8"));
}

#[test]
fn linearize_hilbert() {
    let dir = tempfile::tempdir().unwrap();
    let m = path(dir.path(), "i2.txt");
    assert!(repet2d(&["gen", "--family", "identity", "--params", "2", "--out", &m]).status.success());
    let o = repet2d(&["linearize", "--in", &m, "--method", "hilbert"]);
    assert_eq!(stdout(&o), "2d 1 4\n1 0 1 0\n");
    let o = repet2d(&["linearize", "--in", &m, "--method", "row"]);
    assert_eq!(stdout(&o), "2d 1 4\n1 0 0 1\n");
}

#[test]
fn nd_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cube = path(dir.path(), "cube.txt");
    assert!(repet2d(&["nd", "gen", "--family", "bdk", "--params", "3,2", "--out", &cube]).status.success());
    let o = repet2d(&["nd", "measure", "--in", &cube, "--pm", "2,2,2"]);
    assert!(stdout(&o).contains("P(2;2;2): 64"), "{}", stdout(&o));
    let g = path(dir.path(), "cube.slp");
    assert!(repet2d(&["nd", "grammar", "bdk", "--d", "3", "--k", "2", "--out", &g]).status.success());
    let expanded = path(dir.path(), "cube2.txt");
    assert!(repet2d(&["nd", "grammar", "expand", "--in", &g, "--out", &expanded]).status.success());
    assert_eq!(std::fs::read_to_string(cube).unwrap(), std::fs::read_to_string(expanded).unwrap());
}

#[test]
fn experiment_csv_is_deterministic() {
    let a = repet2d(&["experiment", "gap-g-vs-delta", "--from", "2", "--to", "5"]);
    let b = repet2d(&["experiment", "gap-g-vs-delta", "--from", "2", "--to", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
    let empty = repet2d(&["experiment", "bsq-vs-b", "--from", "5", "--to", "4"]);
    assert_eq!(stdout(&empty).lines().count(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.slp");
    std::fs::write(&bad, "axiom S\nS = h A Q\nA = term 0\n").unwrap();
    let o = repet2d(&["grammar", "validate", "--in", &bad]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains('Q'));

    let m = path(dir.path(), "z.txt");
    assert!(repet2d(&["gen", "--family", "zeros", "--params", "64,64", "--out", &m]).status.success());
    let o = repet2d(&["--budget", "10", "measure", "--in", &m, "--delta"]);
    assert_eq!(o.status.code(), Some(3));

    let o = Command::new(env!("CARGO_BIN_EXE_repet2d"))
        .args(["measure", "--in", &m, "--delta"])
        .env("REPET2D_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));

    let cyclic = path(dir.path(), "cyc.scheme");
    std::fs::write(&cyclic, "scheme 1 2\nphr 1 1 1 1 1 2\nphr 1 2 1 2 1 1\n").unwrap();
    assert_eq!(repet2d(&["macro", "validate", "--in", &cyclic]).status.code(), Some(2));
}

#[test]
fn selftest_quick_reports_every_criterion() {
    let o = repet2d(&["selftest", "--quick"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    for id in 1..=8 {
        assert!(out.contains(&format!("criterion {id}: ")), "{out}");
    }
}

#[test]
fn readme_experiments_exist() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let mut seen = 0;
    for line in readme.lines() {
        if let Some(rest) = line.strip_prefix("repet2d experiment ") {
            let name = rest.split_whitespace().next().unwrap();
            if !name.starts_with('#') {
                assert!(experiment(name).is_ok(), "README names unknown experiment {name}");
                seen += 1;
            }
        }
        if let Some(name) = line.strip_prefix("| `").and_then(|r| r.split('`').next()) {
            assert!(experiment(name).is_ok(), "README names unknown experiment {name}");
            seen += 1;
        }
    }
    assert!(seen >= 8, "{seen}");
}
