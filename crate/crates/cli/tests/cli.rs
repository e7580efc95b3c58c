use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use modcomp::{poset_dot, report_json, run, tree_dot, RunConfig};
use modcomp_core::toricfan::examples;
use modcomp_core::{canonical_form, ClassNames, ComponentReport, CurveClass, DecoratedTree, Mode};

fn fan(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fans").join(name)
}

fn modcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcomp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(table: &str) -> Vec<&str> {
    table.lines().filter(|l| l.starts_with('T')).collect()
}

fn component_rows(table: &str) -> usize {
    rows(table).iter().filter(|l| l.trim_end().ends_with("yes")).count()
}

/// `a s + b e` on the blown-up plane.
fn c(a: i64, b: i64) -> CurveClass {
    CurveClass(vec![b, a - b])
}

fn names() -> ClassNames {
    examples::blowup_plane_spec().names()
}

fn report(beta: &str, n: usize, mode: Mode) -> ComponentReport {
    let mut config = RunConfig::new(fan("blp2.json"), beta, n, mode);
    config.table = false;
    run(&config, &mut Vec::new()).unwrap().report
}

#[test]
fn two_lines_table() {
    let blp2 = fan("blp2.json");
    let o = modcomp(&["--fan", blp2.to_str().unwrap(), "--beta", "2,0", "--marks", "0", "--mode", "maps"]);
    assert!(o.status.success());
    let table = stdout(&o);
    // the 24 listed trees plus four more with parts s, s, e, e
    assert_eq!(rows(&table).len(), 28);
    assert_eq!(component_rows(&table), 2);
    assert!(table.contains("(2s, 2e)"));
}

#[test]
fn symbolic_and_numeric_beta_agree() {
    assert_eq!(report("2s+2e", 0, Mode::Maps), report("2,0", 0, Mode::Maps));
    assert_eq!(report("2ℓ", 0, Mode::Maps), report("2l", 0, Mode::Maps));
}

#[test]
fn quasimaps_with_two_marks() {
    let blp2 = fan("blp2.json");
    let o = modcomp(&["--fan", blp2.to_str().unwrap(), "--beta", "2,0", "--marks", "2", "--mode", "quasimaps"]);
    assert!(o.status.success());
    assert_eq!(component_rows(&stdout(&o)), 3);
}

#[test]
fn three_lines_with_dot_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let json = dir.path().join("r.json");
    let blp2 = fan("blp2.json");
    let o = modcomp(&[
        "--fan",
        blp2.to_str().unwrap(),
        "--beta",
        "3,0",
        "--dot",
        out.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    // (3s+2e | e) has offset -1, so four components rather than five
    assert_eq!(component_rows(&stdout(&o)), 4);

    let r: ComponentReport = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let id: BTreeMap<_, _> = r.trees.iter().map(|t| (t.key.clone(), t.id.clone())).collect();
    let of = |t: DecoratedTree| id[&canonical_form(&t)].clone();
    let single = of(DecoratedTree::single(c(3, 3), 0));
    let split = of(DecoratedTree::chain(vec![c(3, 0), c(0, 3)]));
    let poset = fs::read_to_string(out.join("poset.dot")).unwrap();
    let arrow = |a: &str, b: &str| format!("\"{a}\" -> \"{b}\";");
    for t in [
        DecoratedTree::chain(vec![c(3, 2), c(0, 1)]),
        DecoratedTree::chain(vec![c(3, 0), c(0, 3)]),
        DecoratedTree::chain(vec![c(3, 1), c(0, 2)]),
    ] {
        assert!(poset.contains(&arrow(&of(t), &single)));
    }
    for t in [
        DecoratedTree::chain(vec![c(3, 0), c(0, 2), c(0, 1)]),
        DecoratedTree::chain(vec![c(2, 0), c(1, 0), c(0, 3)]),
        DecoratedTree::chain(vec![c(1, 0), c(2, 0), c(0, 3)]),
        DecoratedTree::chain(vec![c(3, 0), c(0, 1), c(0, 2)]),
    ] {
        assert!(poset.contains(&arrow(&of(t), &split)));
    }
    assert!(!poset.contains(&arrow(&single, &split)));
    let files = fs::read_dir(&out).unwrap().count();
    assert_eq!(files, r.trees.len() + 1);
}

#[test]
fn json_round_trips_and_is_stable() {
    let r = report("2,0", 2, Mode::Maps);
    let text = report_json(&r);
    let back: ComponentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(report_json(&back), text);
    assert_eq!(report_json(&report("2,0", 2, Mode::Maps)), text);
    assert!(text.contains("\"schema\": 1"));
}

#[test]
fn json_to_stdout_without_table() {
    let blp2 = fan("blp2.json");
    let o = modcomp(&["--fan", blp2.to_str().unwrap(), "--beta", "2,0", "--json", "-", "--no-table"]);
    assert!(o.status.success());
    let r: ComponentReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.trees.len(), 28);
}

#[test]
fn table_rows_match_json() {
    for (beta, n, mode) in [("2,0", 0, Mode::Maps), ("2,0", 2, Mode::Maps), ("2,0", 3, Mode::Quasimaps)] {
        let mut config = RunConfig::new(fan("blp2.json"), beta, n, mode);
        let mut out = Vec::new();
        let outcome = run(&config, &mut out).unwrap();
        let table = String::from_utf8(out).unwrap();
        assert_eq!(rows(&table).len(), outcome.report.trees.len());
        let comp_ids: Vec<&str> = rows(&table)
            .into_iter()
            .filter(|l| l.trim_end().ends_with("yes"))
            .map(|l| l.split_whitespace().next().unwrap())
            .collect();
        let json_ids: Vec<&str> = outcome.report.component_trees().map(|t| t.id.as_str()).collect();
        assert_eq!(comp_ids, json_ids);
        config.table = false;
        let mut quiet = Vec::new();
        run(&config, &mut quiet).unwrap();
        assert!(quiet.is_empty());
    }
}

#[test]
fn plane_has_one_component() {
    let p2 = fan("p2.json");
    for d in ["1", "2", "3ℓ"] {
        let o = modcomp(&["--fan", p2.to_str().unwrap(), "--beta", d]);
        assert!(o.status.success());
        assert_eq!(component_rows(&stdout(&o)), 1);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"rays": [[1,0],[1,0],[0,1]], "max_cones": [[0,2],[1,2]]}"#).unwrap();
    let o = modcomp(&["--fan", bad.to_str().unwrap(), "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"), "{}", String::from_utf8_lossy(&o.stderr));

    let blp2 = fan("blp2.json");
    let blp2 = blp2.to_str().unwrap();
    for beta in ["2,2,2", "x", "0,0", "-1,0", "3t"] {
        assert_eq!(modcomp(&["--fan", blp2, "--beta", beta]).status.code(), Some(3), "{beta}");
    }
    let o = modcomp(&["--fan", blp2, "--beta", "2,0", "--marks", "1", "--mode", "quasimaps"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("moduli space empty for n < 2"));
}

#[test]
fn class_list_override() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("classes.json");
    fs::write(&json, r#"["2s", "2e", [2, 0]]"#).unwrap();
    let toml = dir.path().join("classes.toml");
    fs::write(&toml, "irreducible_classes = [[0, 2], [2, -2], \"2ℓ\"]\n").unwrap();
    for path in [&json, &toml] {
        let mut config = RunConfig::new(fan("blp2.json"), "2,0", 0, Mode::Maps);
        config.classes = Some(path.clone());
        let r = run(&config, &mut Vec::new()).unwrap().report;
        assert_eq!(r.irreducible_classes, "listed");
        assert_eq!(r.trees.len(), 2);
    }
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "[[1, 2, 3]]").unwrap();
    let mut config = RunConfig::new(fan("blp2.json"), "2,0", 0, Mode::Maps);
    config.classes = Some(broken);
    assert_eq!(run(&config, &mut Vec::new()).unwrap_err().exit_code(), 2);
}

#[test]
fn toml_fan_without_irreducible_table() {
    let f2 = fan("hirzebruch2.toml");
    let o = modcomp(&["--fan", f2.to_str().unwrap(), "--beta", "0,1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("classes=unknown"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn tree_dot_labels() {
    let n = names();
    let pair = DecoratedTree::chain(vec![c(2, 0), c(0, 2)]);
    let dot = tree_dot("T1", &pair, &n);
    assert_eq!(dot, "graph \"T1\" {\n  v0 [label=\"2s\"];\n  v1 [label=\"2e\"];\n  v0 -- v1;\n}\n");
    let single = tree_dot("T0", &DecoratedTree::single(c(2, 2), 0), &n);
    assert!(single.contains("[label=\"2ℓ\"]"));
    assert!(!single.contains("--"));
    let marked = pair.with_marks(vec![0, 0]).unwrap();
    assert!(tree_dot("T", &marked, &n).contains("[label=\"2s | {1,2}\"]"));
}

#[test]
fn poset_has_the_single_contraction_from_the_split() {
    let r = report("2,0", 0, Mode::Maps);
    let dot = poset_dot(&r, &names());
    let split = r.tree(&canonical_form(&DecoratedTree::chain(vec![c(2, 0), c(0, 2)]))).unwrap();
    let out: Vec<&str> = dot.lines().filter(|l| l.contains(&format!("\"{}\" ->", split.id))).collect();
    assert_eq!(out, vec![format!("  \"{}\" -> \"T0\";", split.id)]);
    assert_eq!(dot, poset_dot(&report("2,0", 0, Mode::Maps), &names()));
}
