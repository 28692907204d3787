use std::process::{Command, Output};

fn sinkpop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinkpop"))
        .args(args)
        .env_remove("SINKPOP_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_then_parse_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let out = sinkpop(&["generate", "random:6:9", "--seed", "3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let g = sinkpop::format::parse_edge_list(&text).unwrap();
    assert_eq!(sinkpop::format::write_edge_list(&g), text);
    let again = sinkpop(&["sample", path.to_str().unwrap(), "--seed", "1"]);
    assert!(again.status.success());
    let o = sinkpop::format::parse_orientation(&g, &stdout(&again)).unwrap();
    assert!(o.is_sink_free(&g));
}

#[test]
fn sample_lollipop_and_cycle_one() {
    let dir = tempfile::tempdir().unwrap();
    let stats = dir.path().join("stats.jsonl");
    let out = sinkpop(&[
        "sample", "lollipop:4", "--seed", "7", "--count", "3",
        "--format", "json", "--stats", stats.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&stats)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["replicate"], i);
        assert!(l["tau"].as_u64().is_some());
        assert_eq!(l["q"].as_array().unwrap().len(), 4);
    }

    let path = dir.path().join("cycle1.txt");
    std::fs::write(&path, "1 1\n0 0\n").unwrap();
    let out = sinkpop(&["sample", path.to_str().unwrap(), "--stats"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0 0\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("\n0,0,0,0\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 2\n0 1\n").unwrap();
    assert_eq!(sinkpop(&["sample", bad.to_str().unwrap()]).status.code(), Some(1));

    let k2 = dir.path().join("k2.txt");
    std::fs::write(&k2, "2 1\n0 1\n").unwrap();
    let out = sinkpop(&["sample", k2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("{0,1}"));

    assert_eq!(sinkpop(&["sample", "cycle:30", "--max-pops", "1", "--seed", "2"]).status.code(), Some(3));
    assert_eq!(sinkpop(&["verify", "complete:8", "--samples", "10"]).status.code(), Some(4));
    assert_eq!(sinkpop(&["experiment", "nosuch"]).status.code(), Some(5));
    assert_eq!(sinkpop(&["sample", "cycle:3", "--nonsense"]).status.code(), Some(1));
}

#[test]
fn seed_flag_beats_environment() {
    let with_env = |env: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_sinkpop"))
            .args(args)
            .env("SINKPOP_SEED", env)
            .output()
            .unwrap()
    };
    let a = with_env("5", &["sample", "theta:6", "--count", "4"]);
    let b = sinkpop(&["sample", "theta:6", "--count", "4", "--seed", "5"]);
    let c = with_env("9", &["sample", "theta:6", "--count", "4", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["experiment", "conditional-cycle", "--n", "4", "--j", "2", "--samples", "5000", "--seed", "11", "--format", "json"];
    let a = sinkpop(&args);
    let b = sinkpop(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["reference"]["value"], 8.0);
    assert_eq!(report["reference"]["provenance"]["kind"], "formula");
    assert!(report.get("runtime_secs").is_none());
}

#[test]
fn verify_reports_exact_mean() {
    let out = sinkpop(&["verify", "cycle:4", "--samples", "20000", "--trials", "50", "--format", "json"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let exact = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|l| l["suite"] == "exact")
        .unwrap();
    assert_eq!(exact["detail"]["expected_tau"]["exact"], "6");
    assert_eq!(exact["detail"]["N"], 2);
}

#[test]
fn trees_and_enumeration() {
    let out = sinkpop(&["enumerate", "cycle:4", "--tree-root", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 4);

    let dir = tempfile::tempdir().unwrap();
    let arcs = dir.path().join("arcs.txt");
    std::fs::write(&arcs, "3 4\n1 0\n2 0\n1 2\n2 1\n").unwrap();
    let out = sinkpop(&["sample", arcs.to_str().unwrap(), "--tree-root", "0", "--seed", "4"]);
    assert!(out.status.success());
    let h = sinkpop::format::parse_arc_list(&std::fs::read_to_string(&arcs).unwrap()).unwrap();
    let t = sinkpop::format::parse_tree(&h, &stdout(&out)).unwrap();
    assert_eq!(t.root, 0);

    let out = sinkpop(&["enumerate", "theta:3"]);
    assert!(stdout(&out).starts_with("# N 6\n"));
}
