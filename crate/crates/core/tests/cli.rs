use std::process::{Command, Output};
use std::time::Instant;

fn zeck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeck-ew"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_exits_zero() {
    let o = zeck(&["verify", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all identities hold"));
}

#[test]
fn corrupted_frame_exits_one() {
    let o = zeck(&["verify", "--corrupt-frame"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o) + &String::from_utf8_lossy(&o.stderr);
    assert!(text.contains("P_inv·A·P = D"), "{text}");
}

#[test]
fn bad_config_exits_two() {
    assert_eq!(zeck(&["charfn", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(zeck(&["charfn", "--grid", "1:0"]).status.code(), Some(2));
    assert_eq!(zeck(&["bound", "--N", "1000", "--L", "4", "--h", "2"]).status.code(), Some(2));
    assert_eq!(zeck(&["bound", "--T", "-1"]).status.code(), Some(2));
}

#[test]
fn dist_of_zero_family_is_a_point_mass() {
    let o = zeck(&["dist", "--family", "zero", "--k", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "value,mass\n0,1\n");
}

#[test]
fn charfn_at_zero_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = zeck(&["charfn", "--k", "12", "--grid", "0:0:1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("charfn.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,re,im,abs"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!((row[1] - 1.0).abs() < 1e-12 && row[2].abs() < 1e-12);
}

#[test]
fn bound_at_unit_t_has_no_log_t_term() {
    let dir = tempfile::tempdir().unwrap();
    let o = zeck(&["bound", "--N", "1000", "--T", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("bound.jsonl")).unwrap();
    let mut saw_smoothing = false;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if let Some(term) = v["rhs_terms"].get("logT/T") {
            assert_eq!(term.as_f64(), Some(0.0));
            saw_smoothing = true;
        }
        assert!(v["lhs"].as_f64().unwrap() >= 0.0);
    }
    assert!(saw_smoothing);
}

#[test]
fn refuses_to_overwrite_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(zeck(&["verify", "--out", out]).status.code(), Some(0));
    assert_eq!(zeck(&["verify", "--out", out]).status.code(), Some(2));
    assert_eq!(zeck(&["verify", "--out", out, "--overwrite"]).status.code(), Some(0));
}

#[test]
fn example_is_fast_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let p = dir.path().join(sub);
        let start = Instant::now();
        let o = zeck(&["example", "--k", "10", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(start.elapsed().as_secs_f64() < 10.0);
        ["tail_asymptotics.csv", "convergence.csv", "bounds.csv"]
            .map(|f| std::fs::read(p.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}
