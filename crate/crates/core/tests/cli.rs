//! The command-line tool end to end: exit codes, files, determinism.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eccsynth::io::{parse_automaton, parse_scenarios};

const THREE_TRACES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/three_traces.scn");

fn eccsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eccsynth"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("ECCSYNTH_SOLVER")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_STATE: &str = "inevents R\noutevents A B\ninvars 1\noutvars 0\n\
                         state 1 out=. alg=\n  1: R [x1] -> 2\n\
                         state 2 out=B alg=\n";

#[test]
fn infer_writes_a_machine_that_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.txt");
    let o = eccsynth(&["infer", "extended-min", "-P", "1", "--scenarios", THREE_TRACES, "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = parse_automaton(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((m.num_states(), m.guard_complexity()), (2, 3));
    let scenarios = parse_scenarios(&fs::read_to_string(THREE_TRACES).unwrap()).unwrap().scenarios;
    assert!(scenarios.iter().all(|s| common::replays(&m, s)));
}

#[test]
fn infer_through_the_bundled_dimacs_solver() {
    let o = eccsynth(&["infer", "basic-min", "--scenarios", THREE_TRACES, "--solver", "varisat", "--format", "dot"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("label=\"q").count(), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&eccsynth(&["infer", "basic-min"])), 2);
    assert_eq!(code(&eccsynth(&["infer", "no-such-method", "--scenarios", THREE_TRACES])), 2);
    assert_eq!(code(&eccsynth(&["infer", "basic-min", "--scenarios", "/nonexistent.scn"])), 2);
    assert_eq!(code(&eccsynth(&["infer", "complete-cegis", "--scenarios", THREE_TRACES])), 2);
    assert_eq!(code(&eccsynth(&["study", "--training", "5by10"])), 2);
    assert_eq!(code(&eccsynth(&["--help"])), 0);
}

#[test]
fn malformed_input_reports_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    fs::write(&bad, "inevents R\noutevents A\ninvars 1\noutvars 0\nscenario\nR[0] -> Q[]\n").unwrap();
    let o = eccsynth(&["infer", "basic-min", "--scenarios", path(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 6, column 9: unknown output event `Q`"), "{}", stderr(&o));
}

#[test]
fn no_solution_exits_1() {
    let o = eccsynth(&["infer", "basic-min", "-C", "1", "--scenarios", THREE_TRACES]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("UNSAT: "), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let (scn, ltl) = (dir.path().join("s.scn"), dir.path().join("p.ltl"));
    fs::write(&scn, "inevents R\noutevents A B\ninvars 1\noutvars 0\nscenario\nR[1] -> A[]\n").unwrap();
    fs::write(&ltl, "G(out!=A)\n").unwrap();
    let o = eccsynth(&["infer", "complete-min-cegis", "--scenarios", path(&scn), "--ltl", path(&ltl), "-P", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("UNSAT: "), "{}", stderr(&o));
}

#[test]
fn solver_failure_exits_3() {
    let o = eccsynth(&["infer", "basic-min", "--scenarios", THREE_TRACES, "--solver", "/nonexistent/solver"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).starts_with("failure: "), "{}", stderr(&o));
}

#[test]
fn verify_prints_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let (m, ltl) = (dir.path().join("m.txt"), dir.path().join("p.ltl"));
    fs::write(&m, TWO_STATE).unwrap();
    fs::write(&ltl, "G(out!=A)\n# comment\nG(out!=B)\n").unwrap();
    let o = eccsynth(&["verify", "--machine", path(&m), "--ltl", path(&ltl)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("violated: 1 of 2"), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("G(out!=B)"));
    assert!(text.contains("R[1] -> B[]"));

    fs::write(&ltl, "G(out!=A)\n").unwrap();
    assert_eq!(code(&eccsynth(&["verify", "--machine", path(&m), "--ltl", path(&ltl)])), 0);
}

#[test]
fn generated_data_is_seeded() {
    let run = |args: &[&str]| {
        let o = eccsynth(args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        o.stdout
    };
    let a = run(&["randgen", "-C", "3", "--seed", "7"]);
    assert_eq!(a, run(&["randgen", "-C", "3", "--seed", "7"]));
    assert_ne!(a, run(&["randgen", "-C", "3", "--seed", "8"]));

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    fs::write(&m, &a).unwrap();
    let sim = |seed: &str| run(&["simulate", "--machine", path(&m), "--count", "4", "--length", "6", "--seed", seed]);
    let s = sim("1");
    assert_eq!(s, sim("1"));
    let parsed = parse_scenarios(std::str::from_utf8(&s).unwrap()).unwrap();
    assert_eq!(parsed.scenarios.len(), 4);
    let machine = parse_automaton(std::str::from_utf8(&a).unwrap()).unwrap();
    assert!(parsed.scenarios.iter().all(|sc| common::replays(&machine, sc)));
}

#[test]
fn study_output_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let args = [
            "study",
            "-C",
            "2",
            "--inputs",
            "2",
            "--outputs",
            "1",
            "--training",
            "5x10",
            "--validation",
            "10x10",
            "--repetitions",
            "4",
            "--seed",
            "3",
            "--out",
            path(&csv),
        ];
        let o = eccsynth(&args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        (o.stdout, fs::read(&csv).unwrap())
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert_eq!(String::from_utf8_lossy(&first.1).lines().count(), 5);
}

#[test]
fn bundled_dimacs_solver_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = eccsynth(&["solve-dimacs", path(&cnf)]);
    assert_eq!(code(&o), 10);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("s SATISFIABLE"));
    assert!(out.contains("-1") && out.contains(" 2"));
    fs::write(&cnf, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    assert_eq!(code(&eccsynth(&["solve-dimacs", path(&cnf)])), 20);
}
