use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kcoarse::generators;
use kcoarse::io::{self, Format};

fn kcoarse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcoarse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Non-comment lines of a file.
fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn path_of_five_reduces_to_three_node_path() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p5.txt");
    fs::write(&input, "0 1\n1 2\n2 3\n3 4\n").unwrap();
    let out = dir.path().join("out");
    let r = kcoarse(&[
        "coarsen",
        "-i",
        s(&input),
        "-k",
        "1",
        "--rank",
        "id",
        "-o",
        s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    assert_eq!(body(&out.join("coarse.edgelist")), ["0 1 1.0", "1 2 1.0"]);
    let centroids: Vec<String> = body(&out.join("centroids.csv"))
        .iter()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_owned())
        .collect();
    assert_eq!(centroids, ["0", "2", "4"]);
    assert_eq!(
        body(&out.join("rho.txt")),
        ["0 0", "1 0", "2 2", "3 2", "4 4"]
    );
    let stats = body(&out.join("stats.csv"));
    assert!(stats[1].starts_with("5,4,1,3,2,0.600000,"));
}

#[test]
fn original_ids_survive_in_the_node_map() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p5.txt");
    fs::write(&input, "10 20\n20 30\n30 40\n40 50\n").unwrap();
    let out = dir.path().join("out");
    let r = kcoarse(&[
        "coarsen",
        "-i",
        s(&input),
        "-k",
        "1",
        "--rank",
        "id",
        "-o",
        s(&out),
    ]);
    assert!(r.status.success());
    assert_eq!(
        body(&out.join("rho.txt")),
        ["10 10", "20 10", "30 30", "40 30", "50 50"]
    );
}

#[test]
fn k_zero_returns_the_input_graph() {
    let dir = tempfile::tempdir().unwrap();
    for (name, g) in [
        ("plain.txt", generators::gnp(40, 0.1, 1)),
        (
            "weighted.txt",
            kcoarse::graph::Graph::build(4, [(0, 1, Some(2.5)), (2, 3, Some(0.125))]).unwrap(),
        ),
    ] {
        let input = dir.path().join(name);
        io::store_edgelist(&input, &g, &[]).unwrap();
        let out = dir.path().join(format!("out-{name}"));
        let r = kcoarse(&["coarsen", "-i", s(&input), "-k", "0", "-o", s(&out)]);
        assert!(r.status.success());
        let back = io::load(out.join("coarse.edgelist"), Format::EdgeList).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(body(&out.join("coarse.edgelist")), body(&input));
    }
}

#[test]
fn missing_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let r = kcoarse(&[
        "coarsen",
        "-i",
        s(&dir.path().join("missing.txt")),
        "-k",
        "1",
        "-o",
        s(dir.path()),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing.txt"));
}

#[test]
fn bad_flags_exit_with_two() {
    let r = kcoarse(&["coarsen", "-i", "x", "-k", "1", "--rank", "nope", "-o", "y"]);
    assert_eq!(r.status.code(), Some(2));
    let r = kcoarse(&["verify", "-i", "x", "-k", "1", "--threads", "0"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn random_graphs_verify_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    io::store_edgelist(&input, &generators::gnp(150, 0.04, 9), &[]).unwrap();
    for k in ["1", "2", "3"] {
        for rank in ["kdeg", "kweight", "random"] {
            let r = kcoarse(&["verify", "-i", s(&input), "-k", k, "--rank", rank]);
            assert_eq!(r.status.code(), Some(0), "k={k} rank={rank}");
        }
    }
}

#[test]
fn corrupted_node_map_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p9.txt");
    io::store_edgelist(&input, &generators::path(9), &[]).unwrap();
    let out = dir.path().join("out");
    let r = kcoarse(&[
        "coarsen",
        "-i",
        s(&input),
        "-k",
        "1",
        "--rank",
        "id",
        "-o",
        s(&out),
    ]);
    assert!(r.status.success());

    // Node 1 sent to a node that is not a centroid.
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 3\n").unwrap();
    let r = kcoarse(&[
        "verify",
        "-i",
        s(&input),
        "-k",
        "1",
        "--rank",
        "id",
        "--rho",
        s(&bad),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("BadAssignment"));

    // Node 0 sent to a real but distant centroid.
    fs::write(&bad, "0 8\n").unwrap();
    let report = dir.path().join("report");
    let r = kcoarse(&[
        "verify",
        "-i",
        s(&input),
        "-k",
        "1",
        "--rank",
        "id",
        "--rho",
        s(&bad),
        "-o",
        s(&report),
    ]);
    assert_eq!(r.status.code(), Some(1));
    let csv = fs::read_to_string(report.join("verify.csv")).unwrap();
    assert!(csv.contains("distortion,fail"));
    assert!(csv.contains("distortion_upper"));
}

#[test]
fn disconnected_input_verifies_per_component() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("two.txt");
    let g = generators::disjoint_union(&generators::cycle(3), &generators::cycle(3));
    io::store_edgelist(&input, &g, &[]).unwrap();
    let report = dir.path().join("report");
    let r = kcoarse(&["verify", "-i", s(&input), "-k", "1", "-o", s(&report)]);
    assert_eq!(r.status.code(), Some(0));
    let csv = fs::read_to_string(report.join("verify.csv")).unwrap();
    assert!(csv.contains("# components\noriginal,coarse\n2,2\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    io::store_edgelist(&input, &generators::gnm(300, 900, 4), &[]).unwrap();
    let weights = dir.path().join("x.txt");
    let x: Vec<String> = (0..300)
        .map(|i| format!("{}", 1.0 + (i * 37 % 101) as f64))
        .collect();
    fs::write(&weights, x.join("\n")).unwrap();
    let run = |threads: &str| {
        let out = dir.path().join("out");
        let r = kcoarse(&[
            "coarsen",
            "-i",
            s(&input),
            "-k",
            "2",
            "--rank",
            "kweight",
            "--node-weights",
            s(&weights),
            "--node-agg",
            "sum",
            "--edge-agg",
            "mean",
            "--keep-intra",
            "--threads",
            threads,
            "-o",
            s(&out),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        ["coarse.edgelist", "rho.txt", "centroids.csv"].map(|f| fs::read(out.join(f)).unwrap())
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
}

#[test]
fn matrix_market_input_and_score_file_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.mtx");
    fs::write(
        &input,
        "%%MatrixMarket matrix coordinate real symmetric\n5 5 4\n2 1 1.5\n3 2 2\n4 3 1\n5 4 3\n",
    )
    .unwrap();
    // Highest score first: node 5 (index 4) leads, then 3, then 1.
    let scores = dir.path().join("scores.txt");
    fs::write(&scores, "5\n1\n4\n2\n9\n").unwrap();
    let out = dir.path().join("out");
    let rank = format!("file:{}", s(&scores));
    let r = kcoarse(&[
        "coarsen",
        "-i",
        s(&input),
        "-k",
        "1",
        "--rank",
        &rank,
        "-o",
        s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(
        body(&out.join("rho.txt")),
        ["1 1", "2 1", "3 3", "4 5", "5 5"]
    );
    assert_eq!(body(&out.join("coarse.edgelist")), ["0 1 2.0", "1 2 1.0"]);
}

#[test]
fn bench_writes_timings_and_weight_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("grid.txt");
    io::store_edgelist(&input, &generators::grid(12, 12, false), &[]).unwrap();
    let out = dir.path().join("bench");
    let r = kcoarse(&[
        "bench",
        "-i",
        s(&input),
        "--k-list",
        "1,2,3",
        "--trials",
        "2",
        "--compare-greedy",
        "--weight-range",
        "1:100",
        "-o",
        s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(body(&out.join("bench.csv")).len(), 1 + 3 * 2);
    assert_eq!(body(&out.join("bench_summary.csv")).len(), 1 + 3);
    let weights = body(&out.join("weights.csv"));
    assert_eq!(
        weights[0],
        "graph,k,rule,trial,greedy_weight,ours_weight,bound_rhs,ratio_rhs"
    );
    assert_eq!(weights.len(), 1 + 3 * 2 * 2);

    // A power cap below n skips every comparison row without failing.
    let r = kcoarse(&[
        "bench",
        "-i",
        s(&input),
        "--k-list",
        "1",
        "--trials",
        "1",
        "--compare-greedy",
        "--oracle-cap",
        "10",
        "-o",
        s(&out),
    ]);
    assert!(r.status.success());
    let text = fs::read_to_string(out.join("weights.csv")).unwrap();
    assert!(text.contains("# skipped k=1"));
}
