use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn pathwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathwl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn srg_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/srg")
}

#[test]
fn lift_counts() {
    let dir = TempDir::new().unwrap();
    let p4 = write(&dir, "p4.txt", "n 4\n0 1\n1 2\n2 3\n");
    let o = pathwl(&["lift", s(&p4), "--kind", "path", "--max-dim", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "4 3 2 1\n");

    // triangle with a pendant edge
    let fig = write(&dir, "fig.txt", "n 4\n0 1\n0 2\n1 2\n2 3\n");
    let o = pathwl(&["lift", s(&fig), "--kind", "simplex", "--max-dim", "2"]);
    assert_eq!(stdout(&o), "4 4 1\n");

    let c4 = write(&dir, "c4.edges", "n 4\n0 1\n1 2\n2 3\n3 0\n");
    let o = pathwl(&["lift", s(&c4), "--kind", "cell", "--max-ring", "4"]);
    assert_eq!(stdout(&o), "4 4 1\n");
}

#[test]
fn lift_writes_pcx() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "n 4\n0 1\n1 2\n2 3\n3 0\n");
    let out = dir.path().join("c4.pcx");
    let o = pathwl(&["lift", s(&c4), "--max-dim", "2", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(
        text.starts_with("PCX v1 kind=path n=4 maxdim=2\n"),
        "{text}"
    );
    let cx = pathwl::complex::deserialize_complex(&text).unwrap();
    assert_eq!(cx.counts(), [4, 4, 4]);

    let o = pathwl(&["--output-format", "json", "lift", s(&c4), "--max-dim", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"], serde_json::json!([4, 4, 4]));
}

#[test]
fn graph6_input_and_index() {
    let dir = TempDir::new().unwrap();
    // K3 then P3
    let g6 = write(&dir, "two.g6", "Bw\nBg\n");
    let o = pathwl(&["lift", s(&g6), "--kind", "simplex", "--max-dim", "2"]);
    assert_eq!(stdout(&o), "3 3 1\n");
    let o = pathwl(&[
        "lift",
        s(&g6),
        "--kind",
        "simplex",
        "--max-dim",
        "2",
        "--index",
        "1",
    ]);
    assert_eq!(stdout(&o), "3 2 0\n");
    let o = pathwl(&["lift", s(&g6), "--index", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn test_verdicts() {
    let dir = TempDir::new().unwrap();
    let c6 = write(&dir, "c6.txt", "n 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    let k3k3 = write(&dir, "k3k3.txt", "n 6\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n");

    let o = pathwl(&["test", s(&c6), s(&k3k3), "--method", "wl1"]);
    assert!(o.status.success());
    assert!(
        stdout(&o).starts_with("NOT-DISTINGUISHED rounds="),
        "{}",
        stdout(&o)
    );

    let o = pathwl(&[
        "test",
        s(&c6),
        s(&k3k3),
        "--method",
        "pwl",
        "--max-dim",
        "2",
    ]);
    assert!(
        stdout(&o).starts_with("DISTINGUISHED rounds="),
        "{}",
        stdout(&o)
    );

    for m in ["wl1", "pwl", "swl", "cwl"] {
        let o = pathwl(&["test", s(&c6), s(&c6), "--method", m]);
        assert!(
            stdout(&o).starts_with("NOT-DISTINGUISHED"),
            "{m}: {}",
            stdout(&o)
        );
    }

    let o = pathwl(&[
        "test",
        s(&c6),
        s(&k3k3),
        "--dump-histograms",
        "--rule",
        "full",
    ]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("A: "));
}

#[test]
fn network_test_reports_every_seed() {
    let dir = TempDir::new().unwrap();
    let c6 = write(&dir, "c6.txt", "n 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    let k3k3 = write(&dir, "k3k3.txt", "n 6\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n");
    let o = pathwl(&[
        "--seeds",
        "0..3",
        "test",
        s(&c6),
        s(&k3k3),
        "--method",
        "pcn",
        "--max-dim",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("seed 0: DISTINGUISHED"));
    assert_eq!(lines[3], "DISTINGUISHED seeds=3/3");

    let o = pathwl(&["--seeds", "5", "test", s(&c6), s(&c6), "--method", "pcn"]);
    assert!(
        stdout(&o).ends_with("NOT-DISTINGUISHED seeds=0/1\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn families_listing() {
    let dir = TempDir::new().unwrap();
    // square with ring 1-0-2-3
    let sq = write(&dir, "sq.txt", "n 4\n0 1\n0 2\n2 3\n1 3\n");
    let o = pathwl(&["families", s(&sq)]);
    assert_eq!(
        stdout(&o),
        "ring 0 1 3 2\n\
         F3 = {e0132, e0231, e1023, e2013}\n\
         F2 = {e013, e023, e102, e132}\n\
         F1 = {e01, e02, e13, e23}\n\
         F0 = {e0, e1, e2, e3}\n"
    );

    let tri = write(&dir, "tri.txt", "n 3\n0 1\n1 2\n0 2\n");
    let text = stdout(&pathwl(&["families", s(&tri)]));
    let sizes: Vec<usize> = text
        .lines()
        .skip(1)
        .map(|l| l.split(", ").count())
        .collect();
    assert_eq!(sizes, [3, 3, 3]);

    let tree = write(&dir, "tree.txt", "n 4\n0 1\n1 2\n1 3\n");
    assert_eq!(stdout(&pathwl(&["families", s(&tree)])), "no rings\n");
}

#[test]
fn bench_runs_and_isolates_errors() {
    let dir = TempDir::new().unwrap();
    let sr16 = srg_dir().join("sr16622.g6");
    let manifest = write(
        &dir,
        "manifest.txt",
        &format!(
            "sr16 {} 16 6 2 2\nmissing does-not-exist.g6 16 6 2 2\n",
            s(&sr16)
        ),
    );
    let out = dir.path().join("out");
    let o = pathwl(&[
        "--seeds",
        "0..2",
        "bench",
        s(&manifest),
        "--methods",
        "pcn,wl1",
        "--layers",
        "4",
        "--out-dir",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let matrix = stdout(&o);
    let sr16_row = matrix.lines().find(|l| l.starts_with("sr16")).unwrap();
    assert!(sr16_row.contains("0.00000 ± 0.00000"), "{matrix}");
    assert!(sr16_row.contains("1.00000"), "{matrix}");
    assert!(matrix
        .lines()
        .any(|l| l.starts_with("missing") && l.contains("error")));
    assert!(stderr(&o).contains("does-not-exist.g6"));

    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.starts_with("family,method,max_dim,layers,seed,failure_rate"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn bench_edge_cases() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.txt", "# nothing\n");
    let o = pathwl(&["bench", s(&empty), "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));

    let bad = write(&dir, "bad.txt", "only gone.g6 16 6 2 2\n");
    let o = pathwl(&[
        "bench",
        s(&bad),
        "--methods",
        "wl1",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "n 4\n0 1\n1 2\n2 3\n3 0\n");
    assert_eq!(pathwl(&["--help"]).status.code(), Some(0));
    assert_eq!(pathwl(&["lift"]).status.code(), Some(1));
    assert_eq!(
        pathwl(&["--epsilon", "-1", "lift", s(&c4)]).status.code(),
        Some(1)
    );

    let cfg = write(&dir, "bad.conf", "epsilom = 0.1\n");
    let o = pathwl(&["--config", s(&cfg), "lift", s(&c4)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epsilom"));

    let junk = write(&dir, "junk.g6", "B!\n");
    assert_eq!(pathwl(&["lift", s(&junk)]).status.code(), Some(2));
    assert_eq!(
        pathwl(&["lift", "/nonexistent/x.g6"]).status.code(),
        Some(2)
    );

    let o = pathwl(&["--member-cap", "5", "lift", s(&c4), "--max-dim", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_and_flags() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "n 4\n0 1\n1 2\n2 3\n3 0\n");
    let cfg = write(
        &dir,
        "run.conf",
        "# pipeline\noutput-format = csv\nmember-cap = 5\n",
    );
    let o = pathwl(&["--config", s(&cfg), "lift", s(&c4), "--max-dim", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = pathwl(&[
        "--config",
        s(&cfg),
        "--member-cap",
        "100",
        "lift",
        s(&c4),
        "--max-dim",
        "3",
    ]);
    assert_eq!(stdout(&o), "dim,count\n0,4\n1,4\n2,4\n3,4\n");
    let help = stdout(&pathwl(&["--help"]));
    for key in [
        "boundary-mode",
        "member-cap",
        "hidden-dim",
        "embed-dim",
        "epsilon",
        "seeds",
        "threads",
        "output-format",
    ] {
        assert!(help.contains(&format!("--{key}")), "missing --{key}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let sr25 = srg_dir().join("sr251256.g6");
    let run = |threads: &str| {
        stdout(&pathwl(&[
            "--threads",
            threads,
            "--seeds",
            "0..2",
            "test",
            s(&sr25),
            s(&sr25),
            "--index-b",
            "3",
            "--method",
            "pcn",
            "--max-dim",
            "2",
        ]))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn time_lift_json() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "n 4\n0 1\n1 2\n2 3\n3 0\n");
    let o = pathwl(&[
        "--output-format",
        "json",
        "time-lift",
        s(&c4),
        "--sizes",
        "1..=2",
        "--repeats",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["members"], serde_json::json!([4, 4, 4]));
    assert_eq!(rows[0]["samples_ms"].as_array().unwrap().len(), 3);
}
