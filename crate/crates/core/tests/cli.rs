use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cs-toolkit"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("CS_TOOLKIT_BOUND")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn scan_not_group_ranges() {
    let o = run(&["scan-not-group", "--min", "0", "--max", "1000", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<_> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 39);
    assert_eq!(lines[0], "27");
    assert_eq!(stdout(&run(&["scan-not-group", "--min", "27", "--max", "27", "--format", "tsv"])), "27\n");
    let o = run(&["scan-not-group", "--min", "28", "--max", "75"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), String::new()));
    assert_eq!(run(&["scan-not-group", "--min", "5", "--max", "1"]).status.code(), Some(2));
}

#[test]
fn families_small() {
    let o = run(&["families", "--pmax", "7", "--all"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!((v["c"].as_u64(), v["p"].as_u64(), v["n0"].as_u64()), (Some(2), Some(7), Some(27)));
    assert_eq!(stdout(&run(&["families", "--pmax", "3", "--all"])), "");
    let o = run(&["families", "--pmax", "41", "--solved-only", "--format", "tsv"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 11);
    assert_eq!(run(&["families", "--pmax", "7", "--all", "--solved-only"]).status.code(), Some(2));
}

#[test]
fn check_and_dual() {
    let o = run(&["check", "2", "7", "27", "--format", "tsv"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.contains("valid\ttrue") && out.contains("norm\t7") && out.contains("invertible\tfalse"), "{out}");
    assert!(out.contains("invertible_local\tfalse"));
    let o = run(&["check", "3", "7", "27"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&run(&["dual", "2,7,27", "--format", "tsv"])), "(2,7,-22)\n");
    assert_eq!(stdout(&run(&["dual", "2", "7", "-22", "--format", "tsv"])), "(2,7,27)\n");
}

#[test]
fn equivalent_exit_codes() {
    assert_eq!(run(&["equivalent", "47,151,70", "149,177,70"]).status.code(), Some(0));
    assert_eq!(run(&["equivalent", "1", "1", "70", "2", "3", "70"]).status.code(), Some(1));
    assert_eq!(run(&["equivalent", "1,1,70", "1,1,71"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_cs-toolkit"))
        .args(["equivalent", "1,1,70", "2,3,70"])
        .env("CS_TOOLKIT_BOUND", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn chains_and_reduce() {
    let o = run(&["verify-chains", "fixtures/chains.json", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("pass")).count(), 10);
    assert!(String::from_utf8_lossy(&o.stderr).contains("10/10"));
    let dir = std::env::temp_dir().join(format!("cs-toolkit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"[{"start":[133,149,71],"steps":[{"move":"G","k":-2,"to":[133,149,-78]}]}]"#).unwrap();
    assert_eq!(run(&["verify-chains", bad.to_str().unwrap()]).status.code(), Some(1));
    let o = run(&["reduce", "1", "1", "999", "--format", "tsv"]);
    assert_eq!(stdout(&o), "(1,1,999) ~G (1,1,2)\n");
    let out = dir.join("reps.tsv");
    let o = run(&["reps", "--trace", "74", "--format", "tsv", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("74\t24\t(1,1,74);"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}
