//! Brute-force ground truth for small graphs.
//!
//! Nothing here shares code with the engines: paths are plain node vectors
//! found by depth-first search, trees are checked with a separate parent
//! map, and distances come from a textbook Dijkstra.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use serde::Serialize;

use crate::answer::Answer;
use crate::datagraph::{DataGraph, NodeId, Query};
use crate::error::{Error, Result};
use crate::weight::Weight;

/// Enumeration is exponential; larger graphs are refused.
pub const DEFAULT_MAX_NODES: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplePath {
    pub nodes: Vec<NodeId>,
    pub weight: Weight,
}

fn guard(graph: &DataGraph, limit: usize) -> Result<()> {
    if graph.node_count() > limit {
        return Err(Error::OracleTooLarge {
            nodes: graph.node_count(),
            limit,
        });
    }
    Ok(())
}

fn path_weight(graph: &DataGraph, nodes: &[NodeId]) -> Weight {
    let node_sum: Weight = nodes.iter().map(|&v| graph.weight(v)).sum();
    let edge_sum: Weight = nodes
        .windows(2)
        .map(|w| graph.edge_weight(w[0], w[1]).expect("consecutive nodes are adjacent"))
        .sum();
    node_sum + edge_sum
}

pub fn all_simple_paths(graph: &DataGraph, from: NodeId, to: NodeId) -> Result<Vec<SimplePath>> {
    all_simple_paths_limited(graph, from, to, DEFAULT_MAX_NODES)
}

/// Every simple path from `from` to `to`, each exactly once.
pub fn all_simple_paths_limited(
    graph: &DataGraph,
    from: NodeId,
    to: NodeId,
    max_nodes: usize,
) -> Result<Vec<SimplePath>> {
    guard(graph, max_nodes)?;
    let mut out = Vec::new();
    let mut on_path = vec![false; graph.node_count()];
    let mut stack = vec![from];
    on_path[from.index()] = true;
    dfs(graph, to, &mut stack, &mut on_path, &mut out);
    Ok(out)
}

fn dfs(
    graph: &DataGraph,
    target: NodeId,
    stack: &mut Vec<NodeId>,
    on_path: &mut [bool],
    out: &mut Vec<SimplePath>,
) {
    let v = *stack.last().unwrap();
    if v == target {
        out.push(SimplePath {
            weight: path_weight(graph, stack),
            nodes: stack.clone(),
        });
        return;
    }
    for &(child, _) in graph.children(v) {
        if on_path[child.index()] {
            continue;
        }
        on_path[child.index()] = true;
        stack.push(child);
        dfs(graph, target, stack, on_path, out);
        stack.pop();
        on_path[child.index()] = false;
    }
}

/// Minimal path weights from every node to each query keyword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    keywords: Vec<NodeId>,
    /// `table[slot][node]`
    table: Vec<Vec<Option<Weight>>>,
}

impl Distances {
    pub fn get(&self, v: NodeId, keyword: NodeId) -> Option<Weight> {
        let slot = self.keywords.iter().position(|&k| k == keyword)?;
        self.table[slot][v.index()]
    }

    pub fn keywords(&self) -> &[NodeId] {
        &self.keywords
    }

    /// Maximum over keywords of the minimal path weight; `None` unless
    /// every keyword is reachable.
    pub fn best_height(&self, r: NodeId) -> Option<Weight> {
        self.table
            .iter()
            .map(|column| column[r.index()])
            .try_fold(Weight::ZERO, |acc, d| d.map(|d| acc.max(d)))
    }
}

/// Backward Dijkstra from each keyword over the parents index.
pub fn min_dist(graph: &DataGraph, keywords: &[NodeId]) -> Distances {
    let table = keywords
        .iter()
        .map(|&k| {
            let mut dist: Vec<Option<Weight>> = vec![None; graph.node_count()];
            let mut heap = BinaryHeap::new();
            dist[k.index()] = Some(graph.weight(k));
            heap.push(Reverse((graph.weight(k), k)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if dist[v.index()] != Some(d) {
                    continue;
                }
                for &(u, w) in graph.parents(v) {
                    let candidate = d + w + graph.weight(u);
                    if dist[u.index()].is_none_or(|old| candidate < old) {
                        dist[u.index()] = Some(candidate);
                        heap.push(Reverse((candidate, u)));
                    }
                }
            }
            dist
        })
        .collect();
    Distances {
        keywords: keywords.to_vec(),
        table,
    }
}

pub fn best_height(graph: &DataGraph, r: NodeId, query: &Query) -> Option<Weight> {
    min_dist(graph, query.keywords()).best_height(r)
}

/// Minimal path weights from `src` to every node, counting both endpoint
/// weights (so the distance from `src` to itself is its node weight).
pub fn forward_distances(graph: &DataGraph, src: NodeId) -> Vec<Option<Weight>> {
    let mut dist: Vec<Option<Weight>> = vec![None; graph.node_count()];
    let mut heap = BinaryHeap::new();
    dist[src.index()] = Some(graph.weight(src));
    heap.push(Reverse((graph.weight(src), src)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v.index()] != Some(d) {
            continue;
        }
        for &(u, w) in graph.children(v) {
            let candidate = d + w + graph.weight(u);
            if dist[u.index()].is_none_or(|old| candidate < old) {
                dist[u.index()] = Some(candidate);
                heap.push(Reverse((candidate, u)));
            }
        }
    }
    dist
}

/// Nodes from which every query keyword is reachable.
pub fn k_roots(graph: &DataGraph, query: &Query) -> Vec<NodeId> {
    let dist = min_dist(graph, query.keywords());
    graph
        .node_ids()
        .filter(|&v| dist.best_height(v).is_some())
        .collect()
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Sorted by height, then total weight, then sorted edge list.
    pub answers: Vec<Answer>,
    pub distances: Distances,
    /// Best height of every K-root.
    pub best_heights: BTreeMap<NodeId, Weight>,
}

/// Assembles a tree from root-first node sequences, or `None` if some node
/// ends up with two parents or the root gets one.
fn assemble(graph: &DataGraph, paths: &[&SimplePath], keywords: &[NodeId]) -> Option<Answer> {
    let root = paths[0].nodes[0];
    let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
    let mut edges = Vec::new();
    for path in paths {
        for w in path.nodes.windows(2) {
            if w[1] == root {
                return None;
            }
            match parent.insert(w[1], w[0]) {
                Some(previous) if previous != w[0] => return None,
                Some(_) => {}
                None => edges.push((w[0], w[1])),
            }
        }
    }
    let children = edges.iter().filter(|&&(u, _)| u == root).count();
    if children < 2 {
        return None;
    }
    let nodes: BTreeSet<NodeId> = std::iter::once(root).chain(parent.keys().copied()).collect();
    let total = nodes.iter().map(|&v| graph.weight(v)).sum::<Weight>()
        + edges
            .iter()
            .map(|&(u, v)| graph.edge_weight(u, v).unwrap())
            .sum();
    Some(Answer {
        root,
        edges,
        keywords: keywords.to_vec(),
        height: paths.iter().map(|p| p.weight).max().unwrap(),
        total_weight: total,
        rank: 0,
    })
}

pub fn enumerate_all_answers(graph: &DataGraph, query: &Query) -> Result<OracleReport> {
    enumerate_all_answers_limited(graph, query, DEFAULT_MAX_NODES)
}

/// Every answer to `query`: for each node, every combination of one simple
/// path per keyword whose union is a tree with at least two root children.
pub fn enumerate_all_answers_limited(
    graph: &DataGraph,
    query: &Query,
    max_nodes: usize,
) -> Result<OracleReport> {
    guard(graph, max_nodes)?;
    let distances = min_dist(graph, query.keywords());
    let mut best_heights = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let mut answers = Vec::new();
    for r in graph.node_ids() {
        let Some(best) = distances.best_height(r) else {
            continue;
        };
        best_heights.insert(r, best);
        let per_keyword: Vec<Vec<SimplePath>> = query
            .keywords()
            .iter()
            .map(|&k| all_simple_paths_limited(graph, r, k, max_nodes))
            .collect::<Result<_>>()?;
        let mut cursor = vec![0usize; per_keyword.len()];
        'combos: loop {
            let combo: Vec<&SimplePath> = cursor
                .iter()
                .enumerate()
                .map(|(i, &c)| &per_keyword[i][c])
                .collect();
            if let Some(answer) = assemble(graph, &combo, query.keywords()) {
                if seen.insert(answer.edge_set()) {
                    answers.push(answer);
                }
            }
            for i in 0..cursor.len() {
                cursor[i] += 1;
                if cursor[i] < per_keyword[i].len() {
                    continue 'combos;
                }
                cursor[i] = 0;
            }
            break;
        }
    }
    answers.sort_by_cached_key(Answer::canonical_key);
    Ok(OracleReport {
        answers,
        distances,
        best_heights,
    })
}

#[derive(Serialize)]
struct ReportAnswer {
    root: String,
    height: Weight,
    weight: Weight,
    edges: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct ReportJson {
    answers: Vec<ReportAnswer>,
    distances: BTreeMap<String, BTreeMap<String, Weight>>,
    best_heights: BTreeMap<String, Weight>,
}

impl OracleReport {
    /// Label-based JSON for golden files.
    pub fn to_json(&self, graph: &DataGraph) -> String {
        let answers = self
            .answers
            .iter()
            .map(|a| ReportAnswer {
                root: graph.label(a.root).to_string(),
                height: a.height,
                weight: a.total_weight,
                edges: a
                    .edge_set()
                    .into_iter()
                    .map(|(u, v)| [graph.label(u).to_string(), graph.label(v).to_string()])
                    .collect(),
            })
            .collect();
        let mut distances = BTreeMap::new();
        for &k in self.distances.keywords() {
            let column: BTreeMap<String, Weight> = graph
                .node_ids()
                .filter_map(|v| Some((graph.label(v).to_string(), self.distances.get(v, k)?)))
                .collect();
            distances.insert(graph.label(k).to_string(), column);
        }
        let best_heights = self
            .best_heights
            .iter()
            .map(|(&v, &w)| (graph.label(v).to_string(), w))
            .collect();
        serde_json::to_string_pretty(&ReportJson {
            answers,
            distances,
            best_heights,
        })
        .expect("report serializes")
    }
}
