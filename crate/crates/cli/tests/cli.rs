use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ibfair(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibfair"))
        .args(args)
        .current_dir(dir)
        .env_remove("IBFAIR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ibfair(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, rel: &str) -> String {
    fs::read_to_string(dir.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn json(dir: &Path, rel: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, rel)).unwrap()
}

/// Rows of a CSV as column-name lookups.
fn rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

#[test]
fn generate_abcd_writes_three_files() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &[
            "generate", "abcd", "--n", "1000", "--xi", "0.2", "--c-min", "50", "--c-max", "300",
            "--seed", "1", "--out", "g",
        ],
    );
    let mut names: Vec<String> = fs::read_dir(tmp.path().join("g"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["edges.txt", "partition.txt", "provenance.json"]);
    let prov = json(tmp.path(), "g/provenance.json");
    assert_eq!(prov["provenance"]["config"]["xi"], 0.2);
    assert_eq!(prov["n"], 1000);
}

#[test]
fn generate_rejects_xi_out_of_range() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ibfair(
        tmp.path(),
        &["generate", "abcd", "--xi", "1.5", "--out", "g"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xi"));
    assert!(!tmp.path().join("g").exists());
}

#[test]
fn two_community_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &[
            "generate",
            "two-community",
            "--n",
            "100",
            "--minority",
            "0.2",
            "--out",
            "t",
        ],
    );
    let part = read(tmp.path(), "t/partition.txt");
    let minority = part.lines().filter(|l| l.ends_with(" 0")).count();
    assert_eq!((minority, part.lines().count()), (20, 100));
}

#[test]
fn passthrough_prediction_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "generate", "abcd", "--n", "600", "--c-min", "30", "--c-max", "150", "--out", "g",
        ],
    );
    ok(
        d,
        &[
            "evaluate",
            "--graph",
            "g/edges.txt",
            "--ground-truth",
            "g/partition.txt",
            "--detector",
            "ground_truth",
            "--out",
            "e",
        ],
    );
    let report = json(d, "e/report.json");
    let cell = &report["cells"][0];
    assert_eq!(cell["bias"]["ib_g"], 0.0);
    assert_eq!(cell["quality"]["nmi"], 1.0);
    assert_eq!(cell["quality"]["ari"], 1.0);
    for row in cell["phi"].as_object().unwrap().values() {
        for v in row.as_object().unwrap().values() {
            assert_eq!(v, 0.0);
        }
    }
    let ib = read(d, "e/cells/g000_d00/ib.csv");
    assert_eq!(ib.lines().count(), 601);
    assert!(ib.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn graph_list_gets_aggregate_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "evaluate",
            "--generate",
            "abcd",
            "--n",
            "500",
            "--c-min",
            "30",
            "--c-max",
            "120",
            "--replicates",
            "10",
            "--detector",
            "louvain",
            "--out",
            "e",
        ],
    );
    let csv = rows(&read(d, "e/evaluate.csv"));
    let kinds: Vec<&str> = csv.iter().map(|r| r["kind"].as_str()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "cell").count(), 10);
    assert_eq!(&kinds[10..], ["mean", "std"]);
    let cells: Vec<f64> = csv[..10]
        .iter()
        .map(|r| r["nmi"].parse().unwrap())
        .collect();
    let mean: f64 = cells.iter().sum::<f64>() / 10.0;
    assert!((csv[10]["nmi"].parse::<f64>().unwrap() - mean).abs() < 1e-12);
    let seeds: std::collections::HashSet<u64> = json(d, "e/report.json")["graphs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds.len(), 10);
}

#[test]
fn bad_external_partition_is_isolated() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &["generate", "two-community", "--n", "100", "--out", "t"],
    );
    // node 999 does not exist
    let mut bad = read(d, "t/partition.txt");
    bad.push_str("999 0\n");
    fs::write(d.join("bad.txt"), bad).unwrap();
    let out = ibfair(
        d,
        &[
            "evaluate",
            "--graph",
            "t/edges.txt",
            "--ground-truth",
            "t/partition.txt",
            "--detector",
            "external:path=bad.txt",
            "--detector",
            "louvain",
            "--out",
            "e",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let report = json(d, "e/report.json");
    assert_eq!(report["cells"][0]["status"], "failed");
    assert!(report["cells"][0]["error"]
        .as_str()
        .unwrap()
        .contains("bad.txt"));
    assert_eq!(report["cells"][1]["status"], "ok");
    assert!(report["cells"][1]["quality"]["nmi"].is_f64());
}

#[test]
fn sweep_rows_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "sweep",
            "--n",
            "200",
            "--runs",
            "100",
            "--ratios",
            "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
            "--out",
            "s",
        ],
    );
    let csvs: Vec<_> = fs::read_dir(d.join("s"))
        .unwrap()
        .filter_map(|e| e.unwrap().file_name().into_string().ok())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(csvs.len(), 6);
    assert_eq!(read(d, "s/sweep_expand_minority.csv").lines().count(), 12);
    ok(
        d,
        &[
            "sweep",
            "--n",
            "200",
            "--runs",
            "1",
            "--scenario",
            "change",
            "--target",
            "majority",
            "--steps",
            "4",
            "--out",
            "one",
        ],
    );
    let one = rows(&read(d, "one/sweep_change_majority.csv"));
    assert_eq!(one.len(), 5);
    assert!(one.iter().all(|r| r["std_ib"] == "0"));
}

#[test]
fn report_plots_one_metric_and_keeps_missing_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "evaluate",
            "--generate",
            "two-community",
            "--n",
            "200",
            "--replicates",
            "2",
            "--detector",
            "louvain",
            "--group",
            "a",
            "--out",
            "e1",
        ],
    );
    ok(
        d,
        &[
            "evaluate",
            "--generate",
            "abcd",
            "--n",
            "500",
            "--c-min",
            "30",
            "--c-max",
            "120",
            "--replicates",
            "2",
            "--detector",
            "lpa",
            "--group",
            "b",
            "--out",
            "e2",
        ],
    );
    ok(
        d,
        &[
            "report",
            "e1/report.json",
            "e2/report.json",
            "--metrics",
            "nmi",
            "--out",
            "r",
        ],
    );
    let mut files: Vec<String> = fs::read_dir(d.join("r"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["report.csv", "report_nmi.svg"]);
    let csv = read(d, "r/report.csv");
    assert!(
        csv.starts_with("detector,graph_group,ib_g,ib_g_std,metric_name,metric_value,metric_std\n")
    );
    assert_eq!(csv.lines().count(), 3);
    let svg = read(d, "r/report_nmi.svg");
    assert!(svg.contains("stroke=\"blue\" stroke-dasharray"));

    // two equal-sized communities: the size property is constant, so Φ_size is undefined
    ok(
        d,
        &[
            "evaluate",
            "--generate",
            "two-community",
            "--n",
            "200",
            "--minority",
            "0.5",
            "--detector",
            "louvain",
            "--out",
            "e3",
        ],
    );
    let report = json(d, "e3/report.json");
    assert!(report["cells"][0]["phi"]["size"]["fccn"].is_null());
    assert!(report["cells"][0]["failed_metrics"]["phi_size_fccn"].is_string());
    ok(
        d,
        &[
            "report",
            "e3/report.json",
            "--metrics",
            "phi_size_fccn,phi_density_fccn",
            "--out",
            "r3",
        ],
    );
    let r3 = rows(&read(d, "r3/report.csv"));
    assert_eq!(r3[0]["metric_value"], "");
    assert_ne!(r3[1]["metric_value"], "");
    assert!(read(d, "r3/report_phi_size_fccn.svg").contains("stroke=\"red\""));
}

#[test]
fn report_rejects_other_schema_versions() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "evaluate",
            "--generate",
            "two-community",
            "--n",
            "100",
            "--detector",
            "cnm",
            "--out",
            "e",
        ],
    );
    let mut report = json(d, "e/report.json");
    report["schema_version"] = 99.into();
    fs::write(d.join("old.json"), report.to_string()).unwrap();
    let out = ibfair(d, &["report", "old.json", "--out", "r"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema version"));
}

#[test]
fn config_file_flags_and_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"generate": "abcd", "abcd": {"n": 400, "c_min": 30, "c_max": 100, "xi": 0.4}, "replicates": 2, "detectors": ["lpa"], "seed": 5}"#,
    )
    .unwrap();
    ok(
        d,
        &[
            "evaluate", "--config", "cfg.json", "--xi", "0.1", "--out", "a",
        ],
    );
    let a = json(d, "a/report.json");
    assert_eq!(a["provenance"]["config"]["abcd"]["xi"], 0.1);
    assert_eq!(a["provenance"]["config"]["abcd"]["n"], 400);
    assert_eq!(a["cells"].as_array().unwrap().len(), 2);
    // the report itself is a valid config
    ok(d, &["evaluate", "--config", "a/report.json", "--out", "b"]);
    assert_eq!(read(d, "a/report.json"), read(d, "b/report.json"));
    assert_eq!(read(d, "a/evaluate.csv"), read(d, "b/evaluate.csv"));

    fs::write(d.join("typo.json"), r#"{"detectorz": ["lpa"]}"#).unwrap();
    let out = ibfair(d, &["evaluate", "--config", "typo.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("detectorz"));
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = Command::new(env!("CARGO_BIN_EXE_ibfair"))
        .args(["generate", "two-community", "--n", "50"])
        .current_dir(d)
        .env("IBFAIR_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(d.join("from-env/edges.txt").exists());
    ok(d, &["generate", "two-community", "--n", "50"]);
    assert!(d.join("ibfair-out/edges.txt").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(
        ibfair(d, &["evaluate", "--no-such-flag"]).status.code(),
        Some(1)
    );
    assert_eq!(
        ibfair(d, &["evaluate", "--detector", "louvain"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ibfair(
            d,
            &[
                "evaluate",
                "--graph",
                "missing.txt",
                "--ground-truth",
                "x.txt",
                "--detector",
                "louvain"
            ]
        )
        .status
        .code(),
        Some(2)
    );
    fs::write(d.join("bad.txt"), "0 1\n1 2 3\n").unwrap();
    fs::write(d.join("p.txt"), "0 0\n1 0\n2 0\n").unwrap();
    let out = ibfair(
        d,
        &[
            "evaluate",
            "--graph",
            "bad.txt",
            "--ground-truth",
            "p.txt",
            "--detector",
            "louvain",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(ibfair(d, &["--help"]).status.code(), Some(0));
}

#[test]
fn remapped_tokens_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("g.txt"),
        "alice bob\nbob carol\ncarol alice\ndave erin\nerin frank\nfrank dave\ncarol dave\n",
    )
    .unwrap();
    fs::write(
        d.join("p.txt"),
        "alice x\nbob x\ncarol x\ndave y\nerin y\nfrank y\n",
    )
    .unwrap();
    ok(
        d,
        &[
            "evaluate",
            "--graph",
            "g.txt",
            "--ground-truth",
            "p.txt",
            "--ids",
            "remap",
            "--detector",
            "louvain",
            "--out",
            "e",
        ],
    );
    assert!(read(d, "e/graphs/g000_nodes.csv").starts_with("token,index\nalice,0\n"));
    let ib = read(d, "e/cells/g000_d00/ib.csv");
    assert!(ib.contains("\nfrank,0\n"), "{ib}");
    ok(
        d,
        &[
            "detect",
            "--graph",
            "g.txt",
            "--ids",
            "remap",
            "--detector",
            "cnm",
            "--out",
            "part.txt",
        ],
    );
    let part = read(d, "part.txt");
    assert!(part.lines().any(|l| l.starts_with("erin ")));
}
