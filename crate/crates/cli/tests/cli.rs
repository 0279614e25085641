use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mvdyn_circle::hull::parse_hull_csv;
use mvdyn_circle::sweep::parse_sweep_csv;
use mvdyn_core::format::{parse_measures_csv, read_table};
use mvdyn_core::{ratio, Rational};

fn mvdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvdyn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn mea_on_builtins() {
    let o = mvdyn(&["mea", "--builtin", "z4", "--f", "indicator:0", "--horizon", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("alpha = 1/2\n"));
    let o = mvdyn(&["mea", "--builtin", "selfloop:c=3"]);
    assert!(stdout(&o).contains("alpha = 3\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let acyclic = dir.path().join("acyclic.json");
    fs::write(&acyclic, r#"{"n_states": 3, "edges": [[0, 1], [1, 2]], "f_state": [1, 2, 3]}"#).unwrap();
    let acyclic = acyclic.to_str().unwrap();
    assert_eq!(mvdyn(&["mea", "--input", acyclic]).status.code(), Some(4));
    assert_eq!(mvdyn(&["subaction", "--input", acyclic]).status.code(), Some(4));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"n_states\": 2,\n \"edges\": [[0, 5]]}").unwrap();
    let o = mvdyn(&["mea", "--input", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let bad_syntax = dir.path().join("syntax.json");
    fs::write(&bad_syntax, "{\"n_states\": 2,\n \"edges\": [[0, 1],]}").unwrap();
    let o = mvdyn(&["mea", "--input", bad_syntax.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(mvdyn(&["mea"]).status.code(), Some(3));
    assert_eq!(mvdyn(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(mvdyn(&["mea", "--builtin", "doubling"]).status.code(), Some(3));
    assert_eq!(mvdyn(&["verify", "--max-states", "9"]).status.code(), Some(3));
    assert_eq!(mvdyn(&["--help"]).status.code(), Some(0));
}

#[test]
fn measures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for (builtin, rows) in [("z4", 4), ("identity:3", 3)] {
        let o = mvdyn(&["measures", "--builtin", builtin, "--out", out]);
        assert_eq!(o.status.code(), Some(0));
        let ms = parse_measures_csv::<Rational>(&read(dir.path(), "measures.csv")).unwrap();
        assert_eq!(ms.len(), rows);
        for m in &ms {
            assert_eq!(m.0.iter().cloned().fold(ratio(0, 1), |a, b| a + b), ratio(1, 1));
        }
    }
    let acyclic = dir.path().join("acyclic.json");
    fs::write(&acyclic, r#"{"n_states": 2, "edges": [[0, 1]]}"#).unwrap();
    let o = mvdyn(&["measures", "--input", acyclic.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(parse_measures_csv::<Rational>(&read(dir.path(), "measures.csv")).unwrap().is_empty());
}

#[test]
fn subaction_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = mvdyn(&["subaction", "--builtin", "z4", "--f", "indicator:0", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("min_slack = 0\n"));
    let (header, rows) = read_table(&read(dir.path(), "edges.csv")).unwrap();
    assert_eq!(header, ["tail", "head", "f", "slack", "tight"]);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| !r[3].starts_with('-')));
    let (header, rows) = read_table(&read(dir.path(), "states.csv")).unwrap();
    assert_eq!(header, ["state", "phi", "v"]);
    assert_eq!(rows.len(), 4);

    let o = mvdyn(&["subaction", "--builtin", "z4", "--f", "const:5/3", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_table(&read(dir.path(), "edges.csv")).unwrap();
    assert!(rows.iter().all(|r| r[3] == "0" && r[4] == "1"));

    let o = mvdyn(&["subaction", "--builtin", "z4", "--f", "indicator:0", "--beta-override", "1/4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("positive cycle"));
}

#[test]
fn subaction_reads_edge_functions() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("edges.json");
    fs::write(&input, r#"{"n_states": 2, "edges": [[1, 0], [0, 1], [0, 0]], "f_edge": ["1", "3", "-1"]}"#).unwrap();
    let o = mvdyn(&["subaction", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // Sorted edges: (0,0) = 1, (0,1) = 3, (1,0) = -1; the two-cycle has mean 1.
    assert!(stdout(&o).contains("beta = 1\n"));
}

#[test]
fn small_sweep_and_hull_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = mvdyn(&["sweep", "--theta-grid", "8", "--max-period", "8", "--grid", "256", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_sweep_csv(&read(dir.path(), "sweep.csv")).unwrap();
    assert_eq!(rows.len(), 18);
    assert_eq!(mvdyn_circle::sweep::sweep_csv(&rows), read(dir.path(), "sweep.csv"));
    assert!(read(dir.path(), "sweep.svg").contains(r#"viewBox="0 0 800 600""#));

    let o = mvdyn(&["sweep", "--f", "negdist", "--builtin", "pq:2,3", "--theta-grid", "4", "--max-period", "6", "--grid", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rows = 5\n"));

    let o = mvdyn(&["hull", "--builtin", "pq:1,2", "--max-period", "8", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let hull = parse_hull_csv(&read(dir.path(), "hull.csv")).unwrap();
    assert!(hull.iter().all(|r| r.value.norm() <= 1.0 + 1e-12));
    assert!(hull.iter().filter(|r| r.on_hull).all(|r| r.sturmian));
    assert!(read(dir.path(), "hull.svg").contains("<polygon"));
    assert_eq!(mvdyn(&["hull", "--max-period", "13"]).status.code(), Some(3));
    assert_eq!(mvdyn(&["sweep", "--grid", "4", "--theta-grid", "2", "--max-period", "4"]).status.code(), Some(3));
}

#[test]
fn verify_detects_an_injected_fault() {
    let o = mvdyn(&["verify", "--instances", "150", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("FAIL alpha_equals_brute_force"));
    assert!(text.contains("counterexample for alpha_equals_brute_force"));
    assert!(text.contains("\"edges\""));
    assert!(text.contains("result = FAIL"));
}

#[test]
fn outputs_are_deterministic() {
    let a = mvdyn(&["verify", "--instances", "100", "--seed", "5"]);
    let b = mvdyn(&["verify", "--instances", "100", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let h1 = mvdyn(&["hull", "--builtin", "threebranch", "--max-period", "6"]);
    let h2 = mvdyn(&["hull", "--builtin", "threebranch", "--max-period", "6"]);
    assert_eq!(h1.stdout, h2.stdout);
}
