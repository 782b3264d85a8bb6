use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rigidcert"));
    cmd.env_remove("RIGIDCERT_RETRY_BUDGET");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn rigidcert")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rigidcert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn construct_writes_file_and_certifies_back() {
    let path = scratch("k34.json");
    let out = run(&[
        "construct",
        "-d",
        "2",
        "-m",
        "3",
        "-n",
        "4",
        "--seed",
        "7",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["seed"], 7);
    assert_eq!(saved["framework"]["dimension"], 2);

    let p = path.to_str().unwrap();
    let infrigid = run(&["certify", "--kind", "infrigid", p]);
    assert_eq!(infrigid.status.code(), Some(0));
    assert_eq!(json(&infrigid)["result"]["rank"], 11);
    assert_eq!(json(&infrigid)["seed"], 7);

    let br = run(&["certify", "--kind", "bolker-roth", p]);
    assert_eq!(br.status.code(), Some(0));
    assert_eq!(json(&br)["result"]["dimension"], 1);

    let maxwell = run(&["certify", "--kind", "maxwell", "--format", "text", p]);
    assert_eq!(maxwell.status.code(), Some(0));
    let text = String::from_utf8(maxwell.stdout).unwrap();
    assert!(text.contains("m = 12  r = 11  s = 1  f = 3"), "{text}");
}

#[test]
fn core_certificate_round_trip() {
    let path = scratch("core_d2.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["construct", "-d", "2", "--core", "-o", p])
            .status
            .code(),
        Some(0)
    );
    let out = run(&["certify", "--kind", "superstable", p]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["result"]["stress_matrix_rank"], 3);
    assert_eq!(v["result"]["psd"]["is_psd"], true);

    let hulls = run(&["certify", "--kind", "hulls", p]);
    assert_eq!(hulls.status.code(), Some(0));
    assert_eq!(
        json(&hulls)["result"]["status"],
        "RELATIVE_INTERIOR_INTERSECT"
    );

    // Forcing the negated stress fails the PSD check.
    let negated = "-15,10,-3,-30,-60,10,5,-30,-15";
    let out = run(&["certify", "--kind", "superstable", "--stress", negated, p]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["psd"]["is_psd"], false);
}

#[test]
fn separated_hulls_exit_1_with_quadric() {
    let path = scratch("separated_d1.json");
    std::fs::write(
        &path,
        r#"{"dimension": 1, "parts": {"U": [0, 1], "V": [2, 3]},
            "edges": [[0, 2], [0, 3], [1, 2], [1, 3]],
            "coords": {"0": ["1"], "1": ["2"], "2": ["3"], "3": ["4"]}}"#,
    )
    .unwrap();
    let out = run(&["certify", "--kind", "hulls", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["status"], "DISJOINT_STRICTLY_SEPARABLE");
    assert!(v["result"]["separating_quadric"].is_array());
}

#[test]
fn exit_codes() {
    let gate = run(&["construct", "-d", "3", "-m", "4", "-n", "4"]);
    assert_eq!(gate.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&gate.stderr).contains("8 < 11"));

    assert_eq!(
        run(&["construct", "-d", "1", "-m", "2", "-n", "2", "--seed", "1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["report", "-d", "2", "-m", "2", "-n", "9"])
            .status
            .code(),
        Some(2)
    );

    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        run(&["certify", "--kind", "maxwell", bad.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(run(&["construct", "-d"]).status.code(), Some(4));

    let budget = bin()
        .env("RIGIDCERT_RETRY_BUDGET", "zero")
        .args(["construct", "-d", "2", "-m", "3", "-n", "4"])
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(4));
}

#[test]
fn report_counts() {
    let out = run(&["report", "-d", "3", "-m", "5", "-n", "6", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["audit"]["stress_dim"], 3);
    assert_eq!(v["audit"]["rigidity_rank"], 27);
    assert_eq!(v["core_certificate"]["verdict"], true);
    let bases: Vec<&str> = v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["basis"].as_str().unwrap())
        .collect();
    assert!(bases.contains(&"COMPUTED") && bases.contains(&"THEOREM"));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--format", "text"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 8);
}
