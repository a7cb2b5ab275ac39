//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gtf::answer::EdgeSet;
use gtf::bench::{run_bench, BenchConfig, BenchQuery, Outcome};
use gtf::cli::{self, Context};
use gtf::generate::{self, random_small, SmallGraphParams};
use gtf::gtf::Mark;
use gtf::oracle;
use gtf::{fixtures, Answer, DataGraph, EngineOptions, GtfSearch, NaiveSearch, RunStats, Weight};

const SEEDS: u64 = 400;

struct Outcomes {
    lines: Vec<String>,
    failed: usize,
}

impl Outcomes {
    fn record(&mut self, n: u32, name: &str, result: Result<String, String>) {
        let line = match result {
            Ok(detail) => format!("criterion {n:>2} {name}: PASS ({detail})"),
            Err(why) => {
                self.failed += 1;
                format!("criterion {n:>2} {name}: FAIL ({why})")
            }
        };
        println!("{line}");
        self.lines.push(line);
    }
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn gtf_answers(g: &DataGraph, tokens: &[&str], opts: EngineOptions) -> Vec<Answer> {
    let q = g.resolve_query(tokens).unwrap();
    let mut out = Vec::new();
    gtf::run_gtf(g, &q, opts, &mut |a| out.push(a.clone())).unwrap();
    out
}

fn labelled(g: &DataGraph, a: &Answer) -> BTreeSet<(String, String)> {
    a.edges
        .iter()
        .map(|&(u, v)| (g.label(u).to_string(), g.label(v).to_string()))
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn criterion_1() -> Result<String, String> {
    let (answers, took) = timed(|| {
        let g = fixtures::fig1();
        let a = gtf_answers(&g, &["france", "paris"], EngineOptions::default());
        (g, a)
    });
    let (g, answers) = answers;
    let heights: Vec<Weight> = answers.iter().map(|a| a.height).collect();
    ensure(heights == [Weight(5000), Weight(5000), Weight(7000)], || format!("heights {heights:?}"))?;
    ensure(answers.iter().all(|a| g.label(a.root) == "city"), || "root other than city".into())?;
    let last = labelled(&g, &answers[2]);
    ensure(last.contains(&("province".into(), "country".into())), || "A3 is not last".into())?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("3 answers, heights 5.000 5.000 7.000, {took:?}"))
}

fn criterion_2() -> Result<String, String> {
    let (result, took) = timed(|| {
        let g = fixtures::fig1x();
        let a = gtf_answers(&g, &["france", "paris"], EngineOptions::default());
        (g, a)
    });
    let (g, answers) = result;
    ensure(answers.len() == 3, || format!("{} answers", answers.len()))?;
    ensure(answers.iter().all(|a| g.label(a.root) != "river"), || "river-rooted answer".into())?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("3 answers, none rooted at river, {took:?}"))
}

fn criterion_3() -> Result<String, String> {
    let (result, took) = timed(|| {
        let g = fixtures::apxa();
        let on = gtf_answers(&g, &["k1", "k2"], EngineOptions::default());
        let off = gtf_answers(
            &g,
            &["k1", "k2"],
            EngineOptions {
                essential: false,
                ..Default::default()
            },
        );
        (g, on, off)
    });
    let (g, on, off) = result;
    let edges = |list: &[(&str, &str)]| -> BTreeSet<(String, String)> {
        list.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect()
    };
    let tree_b = edges(&[("r", "b"), ("b", "k1"), ("r", "k2")]);
    let tree_c = edges(&[("r", "b"), ("b", "d"), ("d", "c"), ("c", "a"), ("a", "k1"), ("r", "k2")]);
    ensure(on.len() == 2, || format!("essential on: {} answers", on.len()))?;
    ensure(labelled(&g, &on[0]) == tree_b && labelled(&g, &on[1]) == tree_c, || {
        "answers are not trees (b) and (c)".into()
    })?;
    ensure(off.len() == 1 && labelled(&g, &off[0]) == tree_b, || {
        format!("essential off: {} answers", off.len())
    })?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("2 answers with essential paths, 1 without, {took:?}"))
}

/// Everything the random-graph criteria need from one seed.
struct RandomRun {
    seed: u64,
    graph: DataGraph,
    report: oracle::OracleReport,
    gtf_answers: Vec<Answer>,
    naive_answers: Vec<Answer>,
    gtf_stats: RunStats,
    marks_visited_on_root_paths: Vec<String>,
}

fn random_runs() -> Vec<RandomRun> {
    (0..SEEDS)
        .map(|seed| {
            let params = SmallGraphParams {
                max_nodes: 10,
                max_avg_degree: [1.5, 2.0, 3.0][seed as usize % 3],
            };
            let s = random_small(seed, &params);
            let report = oracle::enumerate_all_answers(&s.graph, &s.query).unwrap();

            let mut gtf_answers = Vec::new();
            let mut stale = Vec::new();
            let mut search = GtfSearch::new(&s.graph, &s.query, EngineOptions::default()).unwrap();
            let gtf_stats = search.run(&mut |a| gtf_answers.push(a.clone())).unwrap();

            for &r in report.best_heights.keys() {
                for &k in s.query.keywords() {
                    for path in oracle::all_simple_paths(&s.graph, r, k).unwrap() {
                        for &z in &path.nodes {
                            if search.mark(z, k) == Mark::Visited {
                                stale.push(format!("({}, {})", s.graph.label(z), s.graph.label(k)));
                            }
                        }
                    }
                }
            }
            drop(search);
            stale.sort();
            stale.dedup();

            let mut naive_answers = Vec::new();
            NaiveSearch::new(&s.graph, &s.query, EngineOptions::default())
                .run(&mut |a| naive_answers.push(a.clone()))
                .unwrap();
            RandomRun {
                seed,
                graph: s.graph,
                report,
                gtf_answers,
                naive_answers,
                gtf_stats,
                marks_visited_on_root_paths: stale,
            }
        })
        .collect()
}

fn set_of(answers: &[Answer]) -> (BTreeSet<EdgeSet>, usize) {
    let mut set = BTreeSet::new();
    let duplicates = answers.iter().filter(|a| !set.insert(a.edge_set())).count();
    (set, duplicates)
}

fn criterion_4(runs: &[RandomRun]) -> Result<String, String> {
    let mut total = 0;
    for run in runs {
        let (truth, _) = set_of(&run.report.answers);
        total += truth.len();
        for (name, answers) in [("gtf", &run.gtf_answers), ("naive", &run.naive_answers)] {
            let (set, duplicates) = set_of(answers);
            ensure(duplicates == 0, || format!("seed {}: {name} emitted {duplicates} duplicates", run.seed))?;
            ensure(set == truth, || {
                format!("seed {}: {name} has {} answers, oracle {}", run.seed, set.len(), truth.len())
            })?;
            ensure(answers.windows(2).all(|w| w[0].height <= w[1].height), || {
                format!("seed {}: {name} heights decrease", run.seed)
            })?;
            for a in answers.iter() {
                a.check(&run.graph).map_err(|e| format!("seed {}: {name}: {e}", run.seed))?;
            }
        }
    }
    Ok(format!("{} graphs, {total} oracle answers matched by both engines", runs.len()))
}

fn criterion_5(runs: &[RandomRun]) -> Result<String, String> {
    let mut worst = 0;
    for run in runs {
        let s = &run.gtf_stats;
        worst = worst.max(s.max_inserts_per_path());
        ensure(s.max_inserts_per_path() <= 2, || {
            format!("seed {}: a path was inserted {} times", run.seed, s.max_inserts_per_path())
        })?;
        ensure(s.inserts == s.constructed_paths + s.unfreezes, || {
            format!("seed {}: inserts != constructed + unfreezes", run.seed)
        })?;
    }
    Ok(format!("max inserts per path {worst}"))
}

fn criterion_6(runs: &[RandomRun]) -> Result<String, String> {
    let mut checked = 0;
    for run in runs {
        for visit in &run.gtf_stats.first_visits {
            let expected = run.report.distances.get(visit.node, visit.keyword);
            ensure(expected == Some(visit.weight), || {
                format!(
                    "seed {}: ({}, {}) visited at {} but distance is {:?}",
                    run.seed,
                    run.graph.label(visit.node),
                    run.graph.label(visit.keyword),
                    visit.weight,
                    expected
                )
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} visited marks set by minimal paths"))
}

fn criterion_7(runs: &[RandomRun]) -> Result<String, String> {
    let mut discoveries = 0;
    for run in runs {
        let mut previous = Weight::ZERO;
        for d in &run.gtf_stats.discoveries {
            discoveries += 1;
            let best = run.report.best_heights.get(&d.node).copied();
            let Some(best) = best else {
                return Err(format!("seed {}: {} is not an oracle K-root", run.seed, run.graph.label(d.node)));
            };
            ensure(best >= previous, || format!("seed {}: discovery order not by best height", run.seed))?;
            ensure(d.max_popped_weight <= best, || {
                format!(
                    "seed {}: popped {} before discovering {} (best height {best})",
                    run.seed,
                    d.max_popped_weight,
                    run.graph.label(d.node)
                )
            })?;
            previous = best;
        }
    }
    Ok(format!("{discoveries} discoveries in best-height order"))
}

fn criterion_8(runs: &[RandomRun]) -> Result<String, String> {
    for run in runs {
        ensure(run.marks_visited_on_root_paths.is_empty(), || {
            format!("seed {}: still visited: {}", run.seed, run.marks_visited_on_root_paths.join(" "))
        })?;
    }
    Ok("no visited marks left on K-root paths".into())
}

fn criterion_9(runs: &[RandomRun]) -> Result<String, String> {
    let mut longest = 0;
    for run in runs {
        let n = run.graph.node_count() as u32;
        longest = longest.max(run.gtf_stats.max_path_len);
        ensure(run.gtf_stats.max_path_len <= 2 * n * (n + 1), || {
            format!("seed {}: path of {} nodes with n = {n}", run.seed, run.gtf_stats.max_path_len)
        })?;
    }
    Ok(format!("longest constructed path {longest} nodes"))
}

fn criterion_10() -> Result<String, String> {
    let graph = generate::from_spec("lattice:500", 42).map_err(|e| e.to_string())?.graph;
    let queries: Vec<BenchQuery> = generate::default_queries(&graph, 42)
        .into_iter()
        .take(1)
        .map(|(id, tokens)| BenchQuery { id, tokens })
        .collect();
    let cfg = BenchConfig {
        top_ks: vec![100],
        repeats: 1,
        ..Default::default()
    };
    let rows = run_bench(&graph, &queries, &cfg);
    let mut detail = Vec::new();
    for row in &rows {
        match &row.outcome {
            Outcome::Ok {
                mean_s,
                constructed_paths,
                answers,
                ..
            } => detail.push(format!(
                "{} {} answers {constructed_paths} paths {:.1} ms",
                row.engine,
                answers,
                mean_s * 1e3
            )),
            Outcome::Error { message, .. } => return Err(format!("{}: {message}", row.engine)),
        }
    }
    let speedup = rows
        .iter()
        .find(|r| r.engine == gtf::EngineKind::Gtf)
        .and_then(|r| r.speedup)
        .ok_or("no speedup")?;
    ensure(speedup.is_finite() && speedup > 0.0, || format!("speedup {speedup}"))?;
    Ok(format!("{}; speedup {speedup:.2}", detail.join(", ")))
}

fn analyze(graph: &Path, keywords: &str, top: &str) -> Result<Vec<String>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut ctx = Context {
        out: &mut out,
        err: &mut err,
        out_dir: dir.path().to_path_buf(),
    };
    let graph = graph.to_str().unwrap();
    let code = cli::run(
        ["gtf", "analyze", "--graph", graph, "--keywords", keywords, "--top", top],
        &mut ctx,
    );
    ensure(code == 0, || String::from_utf8_lossy(&err).into_owned())?;
    let csv = std::fs::read_to_string(dir.path().join("miss_report.csv")).map_err(|e| e.to_string())?;
    let row = csv.lines().nth(1).ok_or("empty miss report")?;
    Ok(row.split(',').map(str::to_string).collect())
}

fn criterion_11() -> Result<String, String> {
    let fixtures_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let fig1 = analyze(&fixtures_dir.join("fig1.json"), "france,paris", "3")?;
    let nonminimal: f64 = fig1[3].parse().map_err(|_| "bad pct")?;
    ensure((nonminimal - 33.3).abs() <= 0.1, || format!("FIG1 non-minimal miss {nonminimal}"))?;
    let apxa = analyze(&fixtures_dir.join("apxa.json"), "k1,k2", "2")?;
    let distinct: f64 = apxa[2].parse().map_err(|_| "bad pct")?;
    ensure(distinct == 50.0, || format!("APXA distinct-root miss {distinct}"))?;
    Ok(format!("FIG1 non-minimal {nonminimal:.1}%, APXA distinct-root {distinct:.1}%"))
}

fn criterion_12() -> Result<String, String> {
    let graph = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fig1.json");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gtf"))
            .args(["query", "--graph"])
            .arg(&graph)
            .args(["--keywords", "france,paris", "--top", "10", "--engine", "gtf"])
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run()?;
    let second = run()?;
    ensure(first.status.success(), || String::from_utf8_lossy(&first.stderr).into_owned())?;
    ensure(first.stdout == second.stdout, || "stdout differs between runs".into())?;
    ensure(first.stdout.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count() == 3, || {
        "expected 3 lines".into()
    })?;
    Ok(format!("{} identical bytes", first.stdout.len()))
}

fn main() {
    let start = Instant::now();
    let mut outcomes = Outcomes {
        lines: Vec::new(),
        failed: 0,
    };
    outcomes.record(1, "fig1 answers", criterion_1());
    outcomes.record(2, "redundancy rule", criterion_2());
    outcomes.record(3, "essential paths", criterion_3());
    let (runs, took) = timed(random_runs);
    outcomes.record(4, "oracle equivalence", criterion_4(&runs).and_then(|d| {
        ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
        Ok(format!("{d}, {took:?}"))
    }));
    outcomes.record(5, "exposure bound", criterion_5(&runs));
    outcomes.record(6, "minimal-first marking", criterion_6(&runs));
    outcomes.record(7, "discovery order", criterion_7(&runs));
    outcomes.record(8, "termination hygiene", criterion_8(&runs));
    outcomes.record(9, "length bound", criterion_9(&runs));
    outcomes.record(10, "freezing benefit", criterion_10());
    outcomes.record(11, "miss rates", criterion_11());
    outcomes.record(12, "determinism", criterion_12());
    println!(
        "acceptance: {} of {} criteria passed in {:?}",
        outcomes.lines.len() - outcomes.failed,
        outcomes.lines.len(),
        start.elapsed()
    );
    if outcomes.failed > 0 {
        std::process::exit(1);
    }
}
