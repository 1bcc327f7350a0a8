use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netcon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcon")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn run_prints_a_record() {
    let out = netcon(&["run", "--protocol", "two-slot", "--n", "100", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["protocol"], "two-slot");
    assert_eq!(v["n"], 100);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["stabilized"], true);
}

#[test]
fn missing_seed_is_generated_and_reported() {
    let out = netcon(&["run", "--n", "20"]);
    assert_eq!(code(&out), 0);
    let stderr = String::from_utf8_lossy(&out.stderr);
    let seed: u64 = stderr.lines().find_map(|l| l.strip_prefix("seed: ")).unwrap().parse().unwrap();
    assert_eq!(json(&out)["seed"], seed);
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let garbled = dir.path().join("garbled.txt");
    fs::write(&garbled, "n=3 protocol=two-slot\n").unwrap();
    let unstable = dir.path().join("unstable.txt");
    fs::write(&unstable, "n=3 protocol=two-slot k=2\n0 L1\n1 O0\n2 F\n0 1\n").unwrap();
    let stable = dir.path().join("stable.txt");
    fs::write(&stable, "n=3 protocol=two-slot k=2\n0 L2\n1 O0\n2 O0\n0 1\n0 2\n").unwrap();
    let missing = dir.path().join("missing.txt");

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["run", "--n", "50", "--seed", "1"], 0),
        (vec!["run", "--protocol", "k-slot", "--k", "4", "--n", "50", "--seed", "1"], 0),
        (vec!["run", "--protocol", "cross-edges", "--k", "3", "--n", "30", "--seed", "1"], 0),
        (vec!["run", "--n", "500", "--seed", "1", "--max-steps", "10"], 1),
        (vec!["run", "--protocol", "nope", "--n", "10"], 2),
        (vec!["run", "--protocol", "k-slot", "--k", "1", "--n", "10"], 2),
        (vec!["run", "--protocol", "cross-edges", "--k", "2", "--n", "10"], 2),
        (vec!["run", "--protocol", "cross-edges", "--k", "10", "--n", "10"], 2),
        (vec!["run", "--n", "1"], 2),
        (vec!["run", "--n", "ten"], 2),
        (vec!["frobnicate"], 2),
        (vec!["sweep", "--k-schedule", "cubic", "--n-list", "10,20"], 2),
        (vec!["sweep", "--n-list", "20,10"], 2),
        (vec!["sweep", "--n-list", "20,40", "--reps", "2", "--seed", "1", "--max-steps", "5"], 1),
        (vec!["oracle", "--n", "1"], 2),
        (vec!["validate", missing.to_str().unwrap()], 2),
        (vec!["validate", garbled.to_str().unwrap()], 2),
        (vec!["validate", unstable.to_str().unwrap()], 1),
        (vec!["validate", stable.to_str().unwrap()], 0),
    ];
    for (args, expected) in cases {
        let out = netcon(&args);
        assert_eq!(code(&out), expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        if expected == 2 {
            assert!(!out.stderr.is_empty(), "{args:?} printed no message");
        }
    }
}

#[test]
fn help_lists_flags_and_defaults() {
    let expected: &[(&str, &[&str])] = &[
        (
            "run",
            &[
                "--protocol",
                "[default: two-slot]",
                "--k",
                "--n",
                "[default: 100]",
                "--seed",
                "--max-steps",
                "--snapshot",
                "--out",
            ],
        ),
        (
            "sweep",
            &[
                "--config",
                "--protocol",
                "[default: cross-edges]",
                "--k-schedule",
                "[default: const:3]",
                "--n-list",
                "--n-min",
                "[default: 10]",
                "--n-step",
                "[default: 6]",
                "--n-max",
                "[default: 1204]",
                "--per-octave",
                "--reps",
                "--seed",
                "--max-steps",
                "[default: auto]",
                "--out",
                "--agg-out",
                "--timing",
                "--jobs",
            ],
        ),
        ("degrees", &["--n", "[default: 200]", "--k", "[default: 3]", "--seed", "--record-every", "--out"]),
        ("oracle", &["--n", "[default: 128]", "--reps", "[default: 1000]", "--seed", "--out"]),
        ("validate", &["<SNAPSHOT>", "--out"]),
    ];
    for (sub, needles) in expected {
        let out = netcon(&[sub, "--help"]);
        assert_eq!(code(&out), 0);
        let text = String::from_utf8_lossy(&out.stdout);
        for needle in *needles {
            assert!(text.contains(needle), "{sub} --help lacks {needle}:\n{text}");
        }
    }
}

#[test]
fn snapshot_from_run_validates() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("final.txt");
    for (protocol, k) in [("two-slot", "2"), ("k-slot", "3"), ("cross-edges", "4")] {
        let out = netcon(&[
            "run",
            "--protocol",
            protocol,
            "--k",
            k,
            "--n",
            "80",
            "--seed",
            "5",
            "--snapshot",
            snap.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        let out = netcon(&["validate", snap.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["stable"], true);
        assert_eq!(v["in_language"], true);
        assert_eq!(v["free_count"], 0);
    }
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn sweep_golden_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = netcon(&[
        "sweep",
        "--protocol",
        "cross-edges",
        "--k-schedule",
        "sqrt",
        "--n-max",
        "2048",
        "--reps",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&csv);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "protocol,k,n,seed,steps,parallel_time,stabilized,wall_ms");
    assert_eq!(rows.len(), 1 + 5 * netcon::experiments::linear_grid(10, 6, 2048).len());
    assert!(rows[1..].iter().all(|r| r.starts_with("cross-edges,") && r.contains(",true,")));
    assert!(read(&dir.path().join("sweep.agg.csv")).lines().count() > 300);
}

#[test]
fn sweep_output_is_reproducible_and_config_files_work() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let cfg = dir.path().join("sweep.cfg");
    let flags = ["--k-schedule", "log", "--n-list", "16,32,64", "--reps", "3", "--seed", "42"];
    for (path, jobs) in [(&a, "1"), (&b, "4")] {
        let mut args = vec!["sweep", "--jobs", jobs, "--out", path.to_str().unwrap()];
        args.extend(flags);
        assert_eq!(code(&netcon(&args)), 0);
    }
    assert_eq!(read(&a), read(&b));
    fs::write(
        &cfg,
        "# same sweep\nprotocol = cross-edges\nk_schedule = log\nn_grid = 16,32,64\nreps = 3\nbase_seed = 42\n",
    )
    .unwrap();
    assert_eq!(code(&netcon(&["sweep", "--config", cfg.to_str().unwrap(), "--out", c.to_str().unwrap()])), 0);
    assert_eq!(read(&a), read(&c));
    assert_eq!(code(&netcon(&["sweep", "--config", cfg.to_str().unwrap(), "--reps", "2"])), 2);
}

#[test]
fn degrees_and_oracle_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = netcon(&["degrees", "--n", "200", "--k", "3", "--seed", "1", "--out", trace.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = read(&trace);
    assert!(text.lines().any(|l| l == "step,count_d0,count_d1,count_dhalf,count_dkm1,count_dk,free_count"));
    assert!(text.lines().last().unwrap().ends_with(",0"));

    let out = netcon(&["oracle", "--n", "128", "--reps", "1000"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["relative_error"].as_f64().unwrap() < 0.05);
}
