//! Timing harness: warm-up plus measured repeats per query, engine and
//! top-k, summarized as mean, CV and speedup of GTF over the naive engine.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{cv, mean, speedup};
use crate::datagraph::DataGraph;
use crate::engine::{EngineKind, EngineOptions, RunStats};
use crate::error::{Error, Result};
use crate::gtf::run_gtf;
use crate::naive::run_naive;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchQuery {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Parses `query-id<TAB>comma-separated keywords` lines. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_queries(text: &str) -> Result<Vec<BenchQuery>> {
    let mut queries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, keywords) = line
            .split_once('\t')
            .ok_or_else(|| Error::InvalidQueries(format!("line {}: missing tab", n + 1)))?;
        queries.push(BenchQuery {
            id: id.trim().to_string(),
            tokens: keywords.split(',').map(|t| t.trim().to_string()).collect(),
        });
    }
    if queries.is_empty() {
        return Err(Error::InvalidQueries("no queries".into()));
    }
    Ok(queries)
}

pub fn read_queries(path: impl AsRef<Path>) -> Result<Vec<BenchQuery>> {
    parse_queries(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub engines: Vec<EngineKind>,
    pub top_ks: Vec<usize>,
    /// Measured runs after the discarded warm-up.
    pub repeats: usize,
    pub queue_cap: usize,
    pub essential: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let opts = EngineOptions::default();
        BenchConfig {
            engines: vec![EngineKind::Gtf, EngineKind::Naive],
            top_ks: vec![10],
            repeats: 2,
            queue_cap: opts.queue_cap,
            essential: opts.essential,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok {
        times: Vec<f64>,
        mean_s: f64,
        cv: f64,
        constructed_paths: u64,
        answers: u64,
    },
    Error {
        message: String,
        queue_cap: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub engine: EngineKind,
    pub query: String,
    pub size: usize,
    pub top_k: usize,
    pub outcome: Outcome,
    /// Naive mean over GTF mean for the same query and top-k.
    pub speedup: Option<f64>,
}

impl BenchRow {
    pub fn is_error(&self) -> bool {
        matches!(self.outcome, Outcome::Error { .. })
    }
}

fn run_once(graph: &DataGraph, q: &crate::Query, engine: EngineKind, opts: EngineOptions) -> Result<RunStats> {
    let mut sink = |_: &crate::Answer| {};
    match engine {
        EngineKind::Gtf => run_gtf(graph, q, opts, &mut sink),
        EngineKind::Naive => run_naive(graph, q, opts, &mut sink),
    }
}

fn measure(graph: &DataGraph, query: &BenchQuery, engine: EngineKind, top_k: usize, cfg: &BenchConfig) -> Result<Outcome> {
    let q = graph.resolve_query(&query.tokens)?;
    let opts = EngineOptions {
        top_k,
        queue_cap: cfg.queue_cap,
        essential: cfg.essential,
    };
    run_once(graph, &q, engine, opts)?;
    let mut times = Vec::with_capacity(cfg.repeats);
    let mut last = RunStats::default();
    for _ in 0..cfg.repeats.max(1) {
        last = run_once(graph, &q, engine, opts)?;
        times.push(last.wall_secs());
    }
    Ok(Outcome::Ok {
        mean_s: mean(&times)?,
        cv: cv(&times)?,
        times,
        constructed_paths: last.constructed_paths,
        answers: last.answers_emitted,
    })
}

/// Runs every query under every engine and top-k. Failures become error
/// rows and the batch continues.
pub fn run_bench(graph: &DataGraph, queries: &[BenchQuery], cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for query in queries {
        for &top_k in &cfg.top_ks {
            let start = rows.len();
            for &engine in &cfg.engines {
                let outcome = measure(graph, query, engine, top_k, cfg).unwrap_or_else(|e| Outcome::Error {
                    queue_cap: matches!(e, Error::QueueCapExceeded { .. }),
                    message: e.to_string(),
                });
                rows.push(BenchRow {
                    engine,
                    query: query.id.clone(),
                    size: query.tokens.len(),
                    top_k,
                    outcome,
                    speedup: None,
                });
            }
            fill_speedup(&mut rows[start..]);
        }
    }
    rows
}

fn fill_speedup(group: &mut [BenchRow]) {
    let mean_of = |kind| {
        group.iter().find_map(|r| match (&r.outcome, r.engine == kind) {
            (Outcome::Ok { mean_s, .. }, true) => Some(*mean_s),
            _ => None,
        })
    };
    let (Some(gtf), Some(naive)) = (mean_of(EngineKind::Gtf), mean_of(EngineKind::Naive)) else {
        return;
    };
    let Ok(ratio) = speedup(naive, gtf) else {
        return;
    };
    for row in group.iter_mut().filter(|r| !r.is_error()) {
        row.speedup = Some(if row.engine == EngineKind::Gtf { ratio } else { 1.0 });
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    engine: &'a str,
    query: &'a str,
    size: usize,
    topk: usize,
    mean_s: String,
    cv: String,
    speedup: String,
    constructed_paths: String,
    status: &'a str,
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        let (mean_s, cv, constructed, status) = match &row.outcome {
            Outcome::Ok {
                mean_s,
                cv,
                constructed_paths,
                ..
            } => (format!("{mean_s:.6}"), format!("{cv:.4}"), constructed_paths.to_string(), "ok"),
            Outcome::Error { .. } => (String::new(), String::new(), String::new(), "ERROR"),
        };
        writer.serialize(CsvRow {
            engine: row.engine.name(),
            query: &row.query,
            size: row.size,
            topk: row.top_k,
            mean_s,
            cv,
            speedup: row.speedup.map(|s| format!("{s:.3}")).unwrap_or_default(),
            constructed_paths: constructed,
            status,
        })?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
