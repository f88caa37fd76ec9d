use std::path::Path;
use std::process::{Command, Output};

use spanlab::audit::{audit_bundle, default_pairs, CsvRow};
use spanlab::graph::io::parse_graph;
use spanlab::SpannerBundle;

fn spanlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spanlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn gen_petersen() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spanlab(dir.path(), &["gen", "--family", "petersen", "-o", "p.graph"]));
    let text = read(dir.path(), "p.graph");
    assert!(text.starts_with("# family petersen\n"));
    let g = parse_graph(&text).unwrap();
    assert_eq!((g.n(), g.m()), (10, 15));
    assert!((0..10).all(|v| g.degree(v) == 3));
}

#[test]
fn missing_seed_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = spanlab(dir.path(), &["gen", "--family", "random", "--n", "20", "--m", "40"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    assert!(!dir.path().join("x").exists());

    ok(&spanlab(
        dir.path(),
        &["gen", "--family", "cycle", "--n", "12", "-o", "c.graph"],
    ));
    let out = spanlab(dir.path(), &["build-hopset", "--graph", "c.graph", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn range_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spanlab(
        dir.path(),
        &["gen", "--family", "cycle", "--n", "12", "-o", "c.graph"],
    ));
    let out = spanlab(
        dir.path(),
        &[
            "build-hopset",
            "--graph",
            "c.graph",
            "--k",
            "3",
            "--c",
            "1",
            "--seed",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`c`"));
    let out = spanlab(
        dir.path(),
        &["build-hopset", "--graph", "missing.graph", "--k", "3", "--seed", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.graph"));
}

#[test]
fn audit_row_survives_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&spanlab(
        d,
        &[
            "gen",
            "--family",
            "random",
            "--n",
            "150",
            "--m",
            "600",
            "--seed",
            "4",
            "-o",
            "g.graph",
            "--pairs",
            "120",
            "--pairs-out",
            "g.pairs",
        ],
    ));
    ok(&spanlab(
        d,
        &[
            "build-pairwise",
            "--graph",
            "g.graph",
            "--pairs",
            "g.pairs",
            "--k",
            "4",
            "--c",
            "2",
            "--delta",
            "1/2",
            "--seed",
            "4",
            "-o",
            "b.sp",
        ],
    ));
    let cli = ok(&spanlab(d, &["audit", "--graph", "g.graph", "--bundle", "b.sp"]));
    let mut lines = cli.lines();
    assert_eq!(lines.next(), Some(spanlab::audit::CSV_HEADER));
    let cli_row = lines.next().unwrap();

    let g = parse_graph(&read(d, "g.graph")).unwrap();
    let b = SpannerBundle::parse(&read(d, "b.sp"), &g).unwrap();
    let (mode, pairs) = default_pairs(&g, &b, 0).unwrap();
    let r = audit_bundle(&g, &b, &pairs, mode).unwrap();
    assert_eq!(CsvRow::from_report("random", &g, &r, false).to_line(), cli_row);

    let again = ok(&spanlab(
        d,
        &["audit", "--graph", "g.graph", "--bundle", "b.sp", "--no-header"],
    ));
    assert_eq!(again.trim_end(), cli_row);
}

#[test]
fn query_prioritized_matches_audit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&spanlab(
        d,
        &[
            "gen", "--family", "random", "--n", "120", "--m", "480", "--seed", "9", "-o", "g.graph",
        ],
    ));
    ok(&spanlab(
        d,
        &[
            "build-prioritized",
            "--graph",
            "g.graph",
            "--schedule",
            "power",
            "--seed",
            "9",
            "-o",
            "p.sp",
        ],
    ));
    let line = ok(&spanlab(
        d,
        &["query", "--graph", "g.graph", "--bundle", "p.sp", "--pair", "3", "7"],
    ));
    let toks: Vec<u64> = line
        .trim()
        .strip_prefix("path ")
        .unwrap()
        .split(' ')
        .map(|t| t.parse().unwrap())
        .collect();
    let (w, vs) = (toks[0], &toks[1..]);
    assert_eq!((vs[0], *vs.last().unwrap()), (3, 7));

    let g = parse_graph(&read(d, "g.graph")).unwrap();
    let walked: u64 = vs
        .windows(2)
        .map(|e| g.weight(e[0] as usize, e[1] as usize).unwrap())
        .sum();
    assert_eq!(walked, w);
    let b = SpannerBundle::parse(&read(d, "p.sp"), &g).unwrap();
    let r = audit_bundle(&g, &b, &[(3, 7)], spanlab::hopset::AuditMode::Exhaustive).unwrap();
    assert!(r.passed());
    assert_eq!(b.query(&g, 3, 7).unwrap().weight(), w);
}

#[test]
fn violations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&spanlab(d, &["gen", "--family", "cycle", "--n", "8", "-o", "c.graph"]));
    // a path spanner for the cycle, with declared stretch 1
    let g = parse_graph(&read(d, "c.graph")).unwrap();
    let edges = (0..7).map(|i| (i, i + 1)).collect();
    let b = SpannerBundle::subgraph(edges, spanlab::Ratio::ONE);
    std::fs::write(d.join("bad.sp"), b.to_text(&g).unwrap()).unwrap();
    let out = spanlab(d, &["audit", "--graph", "c.graph", "--bundle", "bad.sp"]);
    assert_eq!(out.status.code(), Some(1));
    let row = String::from_utf8(out.stdout).unwrap();
    assert!(row.lines().nth(1).unwrap().starts_with("cycle,8,8,"));
}

#[test]
fn lower_bound_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&spanlab(d, &["gen", "--family", "heawood", "-o", "h.graph"]));
    let out = ok(&spanlab(
        d,
        &[
            "lb-delta", "--graph", "h.graph", "--k", "5", "--seed", "0", "--runs", "3",
        ],
    ));
    assert!(out.starts_with("delta 2 pairs 42 probability 1/4\n"));
    assert_eq!(out.lines().count(), 5);
    let out = spanlab(d, &["lb-delta", "--graph", "h.graph", "--k", "6", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));

    ok(&spanlab(
        d,
        &[
            "lb-hkappa",
            "--kappa",
            "1",
            "--p",
            "81",
            "--l",
            "2",
            "--verify-b",
            "2",
            "-o",
            "hk.txt",
        ],
    ));
    let inst = spanlab::lowerbound::HKappaInstance::parse(&read(d, "hk.txt")).unwrap();
    assert_eq!((inst.graph.n(), inst.pairs.len()), (1620, 729));
}

#[test]
fn sweep_from_toml() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("empty.toml"), "").unwrap();
    let out = ok(&spanlab(d, &["sweep", "--config", "empty.toml"]));
    assert_eq!(out, format!("{}\n", spanlab::audit::CSV_HEADER));

    let cfg = r#"
[[run]]
family = { kind = "random", n = 80, m = 240, max_weight = 10 }
construction = "compose"
k = 4
c = 2
pairs = 40
seeds = [1, 2]

[[run]]
family = { kind = "petersen" }
construction = "delta"
k = 5
seeds = [0]
"#;
    std::fs::write(d.join("s.toml"), cfg).unwrap();
    ok(&spanlab(d, &["sweep", "--config", "s.toml", "-o", "out.csv"]));
    let csv = read(d, "out.csv");
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("random,80,240,4,2,40,1,"));
    assert!(rows[3].ends_with("error:girth_too_small,0"));

    std::fs::write(d.join("bad.toml"), "[[run]]\nbogus = 1\n").unwrap();
    assert_eq!(spanlab(d, &["sweep", "--config", "bad.toml"]).status.code(), Some(2));
}
