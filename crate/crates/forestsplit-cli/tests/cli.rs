use std::process::{Command, Output};

fn forestsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forestsplit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_k4() {
    let o = forestsplit(&["analyze", "K4", "--k", "1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("min beta: 1"), "{s}");
    assert!(s.contains("(1, 3)-sparse: yes"));
    assert!(s.contains("2-overfull: no"));
}

#[test]
fn analyze_petersen_and_bad_parameters() {
    let s = stdout(&forestsplit(&["analyze", "Petersen", "--k", "1", "--d", "4"]));
    assert!(s.contains("fractional arboricity: 5/3"), "{s}");
    assert_eq!(forestsplit(&["analyze", "K4", "--k", "0", "--d", "1"]).status.code(), Some(2));
    assert_eq!(forestsplit(&["analyze", "K4", "--k", "1", "--d", "5"]).status.code(), Some(2));
}

#[test]
fn unreadable_graphs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1\n1 x\n").unwrap();
    assert_eq!(forestsplit(&["analyze", bad.to_str().unwrap(), "--k", "1", "--d", "3"]).status.code(), Some(2));
    assert_eq!(forestsplit(&["decompose", "no_such_graph", "--k", "1", "--d", "3"]).status.code(), Some(2));
}

#[test]
fn decompose_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.txt");
    std::fs::write(&tree, "0 1\n1 2\n1 3\n").unwrap();
    assert_eq!(forestsplit(&["decompose", tree.to_str().unwrap(), "--k", "1", "--d", "3"]).status.code(), Some(0));
    let triple = dir.path().join("triple.txt");
    std::fs::write(&triple, "0 1\n0 1\n0 1\n").unwrap();
    let o = forestsplit(&["decompose", triple.to_str().unwrap(), "--k", "1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("overfull"));
}

#[test]
fn decompose_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["Petersen", "dodecahedron"] {
        let out = dir.path().join(format!("{name}.json"));
        let o = forestsplit(&["decompose", name, "--k", "1", "--d", "4", "--json", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(json["status"], "valid_decomposition");
        let v = forestsplit(&["verify", name, out.to_str().unwrap(), "--k", "1", "--d", "4"]);
        assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    }
    let wrong = dir.path().join("wrong.json");
    std::fs::write(&wrong, "[[0, 1, 2], [3, 4]]").unwrap();
    assert_eq!(forestsplit(&["verify", "K4", wrong.to_str().unwrap(), "--k", "1", "--d", "3"]).status.code(), Some(1));
}

#[test]
fn generate_is_deterministic_and_sparse() {
    let args = ["generate", "--n", "7", "--m", "10", "--k", "1", "--d", "3", "--seed", "42"];
    let a = forestsplit(&args);
    let b = forestsplit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    std::fs::write(&file, &a.stdout).unwrap();
    let path = file.to_str().unwrap();
    let s = stdout(&forestsplit(&["analyze", path, "--k", "1", "--d", "3"]));
    assert!(s.contains("(1, 3)-sparse: yes") && s.contains("2-overfull: no"), "{s}");
    let o = forestsplit(&["oracle", path, "--k", "1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("feasible: true"));
}

#[test]
fn generate_reports_exhaustion() {
    // Eight edges on three vertices cannot avoid an overfull pair or triangle.
    let o = forestsplit(&["generate", "--n", "3", "--m", "8", "--k", "1", "--d", "1", "--attempts", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no instance after 50 attempts"));
}

#[test]
fn fuzz_runs_clean() {
    let o = forestsplit(&["fuzz", "--k", "2", "--d", "5", "--count", "300", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failures"));
}
