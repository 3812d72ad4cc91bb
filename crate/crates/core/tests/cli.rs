use std::path::PathBuf;
use std::process::{Command, Output};

fn attain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attain"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("run attain")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("attain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn value_of_a_bundled_game() {
    let o = attain(&["value", "games/example1.game", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn bundled_games_resolve_by_name() {
    let by_name = attain(&["show", "example4"]);
    let by_path = attain(&["show", "games/example4.game"]);
    assert_eq!(by_name.status.code(), Some(0));
    assert_eq!(stdout(&by_name), stdout(&by_path));
}

#[test]
fn malformed_game_is_a_usage_error_with_a_line_number() {
    let path = scratch("bad.game", "game m=1 n1=1 n2=1\n0 0 1.0\n0 0 2.0\n");
    let o = attain(&["show", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unknown_arguments_are_usage_errors() {
    assert_eq!(attain(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(attain(&["value", "example1", "--lambda", "x"]).status.code(), Some(2));
    assert_eq!(attain(&["value", "no-such-game", "--lambda", "1"]).status.code(), Some(2));
}

#[test]
fn zero_check_on_the_zero_game() {
    let path = scratch("zero.game", "game m=3 n1=1 n2=1\n0 0 0 0 0\n");
    let o = attain(&["check-zero", path.to_str().unwrap(), "--resolution", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Holds"));
    let strict = attain(&["check-zero", path.to_str().unwrap(), "--strict", "--resolution", "0.3"]);
    // A minimum of exactly zero is neither certified positive nor refuted.
    assert_eq!(strict.status.code(), Some(3));
    assert!(stdout(&strict).starts_with("Undecided"));
}

#[test]
fn json_verdicts_parse() {
    let o = attain(&["check-point", "network", "--x=7,-4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "holds");
}

#[test]
fn scenario_list_names_every_scenario() {
    let out = stdout(&attain(&["scenario", "list"]));
    for name in ["network", "example1", "example2", "example4", "random"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{name}:"))), "{name}");
    }
}

#[test]
fn claim_exit_codes() {
    assert_eq!(attain(&["scenario", "run", "example4", "--claim", "5a"]).status.code(), Some(0));
    // The ε-mix never enters the open ball against R.
    assert_eq!(attain(&["scenario", "run", "example4", "--claim", "5b"]).status.code(), Some(1));
    assert_eq!(attain(&["scenario", "run", "nowhere"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_a_trajectory() {
    let csv = scratch("traj.csv", "");
    let o = attain(&[
        "simulate",
        "example1",
        "--p1",
        "zero_attainer(eta=0.5)",
        "--p2",
        "stationary(q=[1,0])",
        "--horizon",
        "1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["horizon"], 1.0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,gamma_1,p_1,p_2,q_1,q_2"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
}

#[test]
fn simulate_reports_an_unreachable_horizon() {
    let o = attain(&[
        "simulate",
        "example1",
        "--p1",
        "zero_attainer(eta=0.01)",
        "--p2",
        "stationary(q=[1,0])",
        "--horizon",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn discrete_pure_b_against_the_sign_counter() {
    let o = attain(&["discrete", "example1", "--stages", "10", "--p1", "pure_b()"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["final_sum"][0], 30.0);
}

#[test]
fn bundled_game_files_match_the_catalog() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("games");
    for name in attain::catalog::NAMES {
        let text = std::fs::read_to_string(dir.join(format!("{name}.game"))).unwrap();
        let parsed = attain::format::parse_game(&text).unwrap();
        assert_eq!(Some(parsed), attain::catalog::by_name(name), "{name}");
    }
}
