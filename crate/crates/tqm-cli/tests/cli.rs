use std::process::{Command, Output};

fn tqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn wheel_table() {
    let o = tqm(&["wheel", "--max-k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\t-1/12\n3\t0\n4\t1/720\n");
}

#[test]
fn verify_free_suite() {
    let o = tqm(&["verify", "--suite", "free", "--n", "1", "--r", "1", "--seed", "42", "--max-weight", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().count() >= 3);
    assert!(out.lines().all(|l| l.starts_with("PASS\tfree\t")));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "interacting", "--n", "1", "--r", "2", "--seed", "9", "--cases", "5"];
    let (a, b) = (tqm(&args), tqm(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn index_degree_two() {
    for r in ["1", "2"] {
        let o = tqm(&["index", "--degree", "2", "--n", "1", "--r", r]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).lines().any(|l| l == "difference\t0"), "{}", stdout(&o));
    }
}

#[test]
fn index_degree_four_mentions_ratio_and_normalization() {
    let o = tqm(&["index", "--degree", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("ratio\t")));
    assert!(out.contains("R₁"));
}

#[test]
fn trace_and_expect_literals() {
    let o = tqm(&["trace", "chain [ mat 1 [[1]] ]", "--args", "args [ mat 1 [[y1]] ; mat 1 [[y2]] ]"]);
    assert_eq!(stdout(&o), "-h^-1\n");
    let o = tqm(&["trace", "chain [ mat 2 [[1, 0], [0, 1]] ]", "--n", "2", "--r", "2"]);
    assert_eq!(stdout(&o), "2 u^2\n");
    let o = tqm(&["expect", "chain [ mat 1 [[1]] ]", "--args", "args [ mat 1 [[y1]] ]"]);
    assert_eq!(stdout(&o), "h^-1 dy1\n");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tqm(&["bogus"]).status.code(), Some(1));
    assert_eq!(tqm(&["wheel"]).status.code(), Some(1));
    assert_eq!(tqm(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(tqm(&["trace", "chain [ mat 1 [[y3]] ]"]).status.code(), Some(1));
    assert_eq!(tqm(&["trace", "chain [ mat 1 [[1]] ]", "--r", "2"]).status.code(), Some(1));
    assert_eq!(tqm(&["index", "--degree", "6"]).status.code(), Some(1));
    assert_eq!(tqm(&["--n", "0", "wheel", "--max-k", "3"]).status.code(), Some(1));
}
