//! Seeded synthetic graphs for tests and benchmarks.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datagraph::{DataGraph, GraphDocument, KeywordConfig, Query};
use crate::error::{Error, Result};
use crate::weight::Weight;

const NODE_WEIGHTS: [u64; 4] = [500, 1000, 1000, 2000];
const EDGE_WEIGHTS: [u64; 6] = [500, 1000, 1000, 1500, 2000, 3000];
/// Token vocabulary of generated graphs.
pub const VOCABULARY: usize = 10;

fn pick(rng: &mut ChaCha8Rng, from: &[u64]) -> Weight {
    Weight(*from.choose(rng).unwrap())
}

/// A small random graph together with a query over it.
#[derive(Debug, Clone)]
pub struct Sample {
    pub graph: DataGraph,
    pub query: Query,
    pub document: GraphDocument,
}

#[derive(Debug, Clone, Copy)]
pub struct SmallGraphParams {
    /// Total node count including keyword nodes.
    pub max_nodes: usize,
    /// Edges per node, counted once per edge.
    pub max_avg_degree: f64,
}

impl Default for SmallGraphParams {
    fn default() -> Self {
        SmallGraphParams {
            max_nodes: 10,
            max_avg_degree: 1.5,
        }
    }
}

/// A random cyclic graph with 2 or 3 query keywords and at most
/// `params.max_nodes` nodes. Weights are drawn from small sets so that
/// equal-weight paths are common.
pub fn random_small(seed: u64, params: &SmallGraphParams) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let query_size = rng.gen_range(2..=3);
    let extra_keyword = usize::from(params.max_nodes > query_size + 3 && rng.gen_bool(0.3));
    let keyword_count = query_size + extra_keyword;
    let regular = rng.gen_range(2..=params.max_nodes.saturating_sub(keyword_count).max(2));
    let total = regular + keyword_count;

    let mut doc = GraphDocument::default();
    for i in 0..regular {
        let w = pick(&mut rng, &NODE_WEIGHTS);
        doc.node(&format!("v{i}"), "", w);
    }
    for i in 0..keyword_count {
        let w = pick(&mut rng, &NODE_WEIGHTS);
        doc.keyword(&format!("kw:k{i}"), w);
    }
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    // every keyword gets at least one incoming edge
    for k in 0..keyword_count {
        edges.insert((rng.gen_range(0..regular), regular + k));
    }
    let max_edges = ((params.max_avg_degree * total as f64).floor() as usize).max(edges.len());
    let target = rng.gen_range(edges.len()..=max_edges);
    let mut attempts = 0;
    while edges.len() < target && attempts < 1000 {
        attempts += 1;
        let src = rng.gen_range(0..regular);
        let dst = if rng.gen_bool(0.3) {
            regular + rng.gen_range(0..keyword_count)
        } else {
            rng.gen_range(0..regular)
        };
        if src != dst {
            edges.insert((src, dst));
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort();
    let id = |i: usize| {
        if i < regular {
            format!("v{i}")
        } else {
            format!("kw:k{}", i - regular)
        }
    };
    for (src, dst) in edges {
        let w = pick(&mut rng, &EDGE_WEIGHTS);
        doc.edge(&id(src), &id(dst), w);
    }
    let graph = DataGraph::from_document(&doc).expect("generated graph is valid");
    let tokens: Vec<String> = (0..query_size).map(|i| format!("k{i}")).collect();
    let query = graph.resolve_query(&tokens).expect("generated keywords exist");
    Sample {
        graph,
        query,
        document: doc,
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: DataGraph,
    pub document: GraphDocument,
}

fn token_text(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.4) {
        let n = rng.gen_range(1..=2);
        (0..n)
            .map(|_| format!("t{}", rng.gen_range(0..VOCABULARY)))
            .collect::<Vec<_>>()
            .join(" ")
    } else {
        String::new()
    }
}

fn finish(doc: GraphDocument) -> Generated {
    let graph = DataGraph::from_document(&doc)
        .expect("generated graph is valid")
        .augment_keywords(&KeywordConfig::default());
    Generated {
        graph,
        document: doc,
    }
}

/// A grid of `size` nodes with right and down edges, occasional reverse
/// edges (so the graph has cycles) and diagonal shortcuts.
pub fn lattice(size: usize, seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = (size as f64).sqrt().ceil().max(1.0) as usize;
    let mut doc = GraphDocument::default();
    for i in 0..size {
        let text = token_text(&mut rng);
        doc.node(&format!("n{i}"), &text, Weight::ONE);
    }
    let mut seen = HashSet::new();
    let mut add = |doc: &mut GraphDocument, rng: &mut ChaCha8Rng, a: usize, b: usize| {
        if a != b && a < size && b < size && seen.insert((a, b)) {
            let w = pick(rng, &EDGE_WEIGHTS[1..]);
            doc.edge(&format!("n{a}"), &format!("n{b}"), w);
        }
    };
    for i in 0..size {
        let col = i % width;
        if col + 1 < width {
            add(&mut doc, &mut rng, i, i + 1);
            if rng.gen_bool(0.15) {
                add(&mut doc, &mut rng, i + 1, i);
            }
        }
        add(&mut doc, &mut rng, i, i + width);
        if rng.gen_bool(0.15) && i + width < size {
            add(&mut doc, &mut rng, i + width, i);
        }
        if col + 1 < width && rng.gen_bool(0.1) {
            add(&mut doc, &mut rng, i, i + width + 1);
        }
    }
    finish(doc)
}

/// A random DAG over `size` nodes with a few back edges.
pub fn random_dag(size: usize, seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = GraphDocument::default();
    for i in 0..size {
        let text = token_text(&mut rng);
        doc.node(&format!("n{i}"), &text, Weight::ONE);
    }
    let mut seen = HashSet::new();
    for i in 0..size {
        let fan_out = rng.gen_range(1..=3);
        for _ in 0..fan_out {
            if i + 1 >= size {
                break;
            }
            let j = rng.gen_range(i + 1..size.min(i + 20));
            let (a, b) = if rng.gen_bool(0.1) { (j, i) } else { (i, j) };
            if seen.insert((a, b)) {
                let w = pick(&mut rng, &EDGE_WEIGHTS[1..]);
                doc.edge(&format!("n{a}"), &format!("n{b}"), w);
            }
        }
    }
    finish(doc)
}

/// Parses `lattice:N` or `random:N`.
pub fn from_spec(spec: &str, seed: u64) -> Result<Generated> {
    let invalid = || Error::InvalidGenerator(spec.to_string());
    let (kind, size) = spec.split_once(':').ok_or_else(invalid)?;
    let size: usize = size.parse().map_err(|_| invalid())?;
    if size == 0 {
        return Err(invalid());
    }
    match kind {
        "lattice" => Ok(lattice(size, seed)),
        "random" => Ok(random_dag(size, seed)),
        _ => Err(invalid()),
    }
}

/// Queries over the generator vocabulary that resolve on `graph`.
pub fn default_queries(graph: &DataGraph, seed: u64) -> Vec<(String, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let tokens: Vec<String> = graph.keyword_tokens().map(str::to_string).collect();
    let mut queries = Vec::new();
    for (i, size) in [2usize, 2, 3].into_iter().enumerate() {
        if tokens.len() < size {
            break;
        }
        let chosen: Vec<String> = tokens.choose_multiple(&mut rng, size).cloned().collect();
        queries.push((format!("g{}", i + 1), chosen));
    }
    queries
}
