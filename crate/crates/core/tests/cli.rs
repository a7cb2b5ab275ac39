use std::path::PathBuf;
use std::process::{Command, Output};

use gtf::report::AnswerRecord;
use gtf::DataGraph;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn gtf(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtf"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn printed_answers_reparse_into_valid_answers() {
    let dir = tempfile::tempdir().unwrap();
    for (file, keywords, expected) in [("fig1.json", "france,paris", 3), ("apxa.json", "k1,k2", 2)] {
        let path = fixture(file);
        let graph = DataGraph::load(&path).unwrap().augment_keywords(&Default::default());
        let tokens: Vec<&str> = keywords.split(',').collect();
        let query = graph.resolve_query(&tokens).unwrap();
        for engine in ["gtf", "naive"] {
            let o = gtf(
                &["query", "--graph", path.to_str().unwrap(), "--keywords", keywords, "--engine", engine],
                dir.path(),
            );
            assert!(o.status.success(), "{}", stderr(&o));
            let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
            assert_eq!(lines.len(), expected, "{file} {engine}");
            for (i, line) in lines.iter().enumerate() {
                let record = AnswerRecord::from_json(line).unwrap();
                assert_eq!(record.rank, i + 1);
                record.to_answer(&graph, &query).unwrap().check(&graph).unwrap();
            }
            assert!(stderr(&o).contains(&format!("{engine}: pops=")));
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fig1 = fixture("fig1.json");
    let fig1 = fig1.to_str().unwrap();

    let o = gtf(&["query", "--graph", fig1, "--keywords", "france"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("query must have at least two keywords"));

    let o = gtf(&["query", "--graph", fig1, "--keywords", "france,atlantis"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("keyword not found: atlantis"));

    let o = gtf(&["query", "--graph", "missing.json", "--keywords", "a,b"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = gtf(&["query", "--graph", fig1, "--keywords", "france,paris", "--queue-cap", "2"], dir.path());
    assert_eq!(o.status.code(), Some(3));

    let o = gtf(&["query", "--graph", fig1, "--keywords", "france,paris", "--top", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let apxa = fixture("apxa.json");
    let o = gtf(
        &["compare", "--graph", apxa.to_str().unwrap(), "--keywords", "k1,k2", "--no-essential"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL gtf=1 naive=2 oracle=2"));

    let o = gtf(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bench_over_a_queries_file_and_a_generated_graph() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtf(
        &[
            "bench",
            "--graph",
            fixture("fig1.json").to_str().unwrap(),
            "--queries",
            fixture("fig1_queries.tsv").to_str().unwrap(),
            "--repeats",
            "3",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(
        rows.next(),
        Some("engine,query,size,topk,mean_s,cv,speedup,constructed_paths,status")
    );
    assert_eq!(rows.count(), 4);

    let o = gtf(&["bench", "--gen", "random:60", "--seed", "3", "--top", "5,20"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[8], "ok", "{row}");
        let speedup: f64 = cols[6].parse().unwrap();
        assert!(speedup > 0.0 && speedup.is_finite());
    }
}

#[test]
fn validate_generated_graphs() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["lattice:37", "lattice:500", "random:100"] {
        let o = gtf(&["validate", "--gen", spec], dir.path());
        assert!(o.status.success(), "{spec}: {}", stderr(&o));
    }
    let o = gtf(&["validate", "--gen", "torus:4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
