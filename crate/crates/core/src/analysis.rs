//! Completeness and efficiency measurements: answer miss filters that
//! imitate incomplete systems, coefficient of variation and speedup.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::answer::Answer;
use crate::datagraph::{DataGraph, NodeId};
use crate::engine::RunStats;
use crate::error::{Error, Result};
use crate::oracle::forward_distances;
use crate::weight::Weight;

/// An answer with its keyword leaves removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    pub root: NodeId,
    pub edges: Vec<(NodeId, NodeId)>,
    /// Nodes that lost a keyword leaf, with the keywords they held.
    pub holders: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Stripped {
    pub fn nodes(&self) -> BTreeSet<NodeId> {
        std::iter::once(self.root)
            .chain(self.edges.iter().map(|&(_, v)| v))
            .collect()
    }
}

pub fn strip_keyword_nodes(graph: &DataGraph, answer: &Answer) -> Stripped {
    let mut holders: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut edges = Vec::new();
    for &(u, v) in &answer.edges {
        if graph.is_keyword(v) {
            holders.entry(u).or_default().push(v);
        } else {
            edges.push((u, v));
        }
    }
    Stripped {
        root: answer.root,
        edges,
        holders,
    }
}

/// Per-answer miss flags of both filters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MissReport {
    pub total: usize,
    pub distinct_root_missed: usize,
    pub nonminimal_missed: usize,
    pub distinct_root_flags: Vec<bool>,
    pub nonminimal_flags: Vec<bool>,
}

fn percent(missed: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * missed as f64 / total as f64
    }
}

impl MissReport {
    pub fn new(graph: &DataGraph, answers: &[Answer]) -> Self {
        let distinct_root_flags = distinct_root_filter(answers);
        let nonminimal_flags = minimal_paths_filter(graph, answers);
        MissReport {
            total: answers.len(),
            distinct_root_missed: distinct_root_flags.iter().filter(|&&f| f).count(),
            nonminimal_missed: nonminimal_flags.iter().filter(|&&f| f).count(),
            distinct_root_flags,
            nonminimal_flags,
        }
    }

    pub fn distinct_root_pct(&self) -> f64 {
        percent(self.distinct_root_missed, self.total)
    }

    pub fn nonminimal_pct(&self) -> f64 {
        percent(self.nonminimal_missed, self.total)
    }
}

/// Flags every answer whose root already rooted an earlier answer.
pub fn distinct_root_filter(answers: &[Answer]) -> Vec<bool> {
    let mut seen = BTreeSet::new();
    answers.iter().map(|a| !seen.insert(a.root)).collect()
}

/// Flags every answer with a non-shortest tree path from the root to a node
/// holding one of its keywords. "Shortest" is measured against the nearest
/// node of the graph holding that keyword.
pub fn minimal_paths_filter(graph: &DataGraph, answers: &[Answer]) -> Vec<bool> {
    let mut distances: HashMap<NodeId, Vec<Option<Weight>>> = HashMap::new();
    answers
        .iter()
        .map(|answer| {
            let dist = distances
                .entry(answer.root)
                .or_insert_with(|| forward_distances(graph, answer.root));
            is_nonminimal(graph, &strip_keyword_nodes(graph, answer), dist)
        })
        .collect()
}

fn is_nonminimal(graph: &DataGraph, stripped: &Stripped, dist: &[Option<Weight>]) -> bool {
    let parent: HashMap<NodeId, NodeId> = stripped.edges.iter().map(|&(u, v)| (v, u)).collect();
    let tree_weight = |mut v: NodeId| {
        let mut w = graph.weight(v);
        while let Some(&u) = parent.get(&v) {
            w = w + graph.edge_weight(u, v).expect("answer edge") + graph.weight(u);
            v = u;
        }
        w
    };
    stripped.holders.iter().any(|(&h, keywords)| {
        let actual = tree_weight(h);
        keywords.iter().any(|&k| {
            let best = graph
                .parents(k)
                .iter()
                .filter_map(|&(holder, _)| dist[holder.index()])
                .min();
            best.is_some_and(|best| actual > best)
        })
    })
}

/// Population standard deviation over mean.
pub fn cv(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Ok(0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

pub fn mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// `base_secs / other_secs`.
pub fn speedup(base_secs: f64, other_secs: f64) -> Result<f64> {
    if !(base_secs > 0.0 && other_secs > 0.0) {
        return Err(Error::NonPositiveTime);
    }
    Ok(base_secs / other_secs)
}

pub fn speedup_of(base: &RunStats, other: &RunStats) -> Result<f64> {
    speedup(base.wall_secs(), other.wall_secs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineOptions;
    use crate::fixtures;
    use crate::gtf::run_gtf;
    use proptest::prelude::*;

    fn answers(g: &DataGraph, tokens: &[&str], top: usize) -> Vec<Answer> {
        let q = g.resolve_query(tokens).unwrap();
        let mut out = Vec::new();
        let opts = EngineOptions {
            top_k: top,
            ..Default::default()
        };
        run_gtf(g, &q, opts, &mut |a| out.push(a.clone())).unwrap();
        out
    }

    fn labels(g: &DataGraph, s: &Stripped) -> Vec<(String, String)> {
        let mut v: Vec<_> = s
            .edges
            .iter()
            .map(|&(a, b)| (g.label(a).to_string(), g.label(b).to_string()))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn stripping_fig1() {
        let g = fixtures::fig1();
        let all = answers(&g, &["france", "paris"], 3);
        let a1 = strip_keyword_nodes(&g, &all[0]);
        assert_eq!(g.label(a1.root), "city");
        assert_eq!(labels(&g, &a1), [("city".into(), "province".into())]);
        let a3 = strip_keyword_nodes(&g, &all[2]);
        assert_eq!(
            labels(&g, &a3),
            [
                ("city".to_string(), "province".to_string()),
                ("province".to_string(), "country".to_string())
            ]
        );
    }

    #[test]
    fn stripping_to_a_bare_root() {
        let mut doc = crate::datagraph::GraphDocument::default();
        doc.node("r", "alpha beta", Weight::ONE);
        let g = DataGraph::from_document(&doc)
            .unwrap()
            .augment_keywords(&Default::default());
        let all = answers(&g, &["alpha", "beta"], 0);
        assert_eq!(all.len(), 1);
        let s = strip_keyword_nodes(&g, &all[0]);
        assert!(s.edges.is_empty());
        assert_eq!(s.nodes().len(), 1);
    }

    #[test]
    fn fig1_miss_rates() {
        let g = fixtures::fig1();
        let all = answers(&g, &["france", "paris"], 3);
        let report = MissReport::new(&g, &all);
        assert_eq!(report.distinct_root_flags, [false, true, true]);
        assert_eq!(report.nonminimal_flags, [false, false, true]);
        assert!((report.nonminimal_pct() - 100.0 / 3.0).abs() < 1e-9);
        assert!((report.distinct_root_pct() - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn apxa_miss_rates() {
        let g = fixtures::apxa();
        let all = answers(&g, &["k1", "k2"], 2);
        let report = MissReport::new(&g, &all);
        assert_eq!(report.distinct_root_pct(), 50.0);
        assert_eq!(report.nonminimal_flags, [false, true]);
    }

    #[test]
    fn empty_report_is_zero_percent() {
        let report = MissReport::new(&fixtures::fig1(), &[]);
        assert_eq!(report.total, 0);
        assert_eq!(report.distinct_root_pct(), 0.0);
        assert_eq!(report.nonminimal_pct(), 0.0);
    }

    #[test]
    fn cv_and_speedup() {
        assert_eq!(cv(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!((cv(&[1.0, 3.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(cv(&[]), Err(Error::EmptySamples)));
        assert_eq!(speedup(10.0, 1.0).unwrap(), 10.0);
        assert!(matches!(speedup(0.0, 1.0), Err(Error::NonPositiveTime)));
        let base = RunStats {
            wall_time_ns: 10_000_000_000,
            ..Default::default()
        };
        let other = RunStats {
            wall_time_ns: 1_000_000_000,
            ..Default::default()
        };
        assert_eq!(speedup_of(&base, &other).unwrap(), 10.0);
    }

    #[test]
    fn shortest_path_trees_are_never_flagged() {
        // a star: root with direct edges to one holder per keyword
        let mut doc = crate::datagraph::GraphDocument::default();
        doc.node("r", "", Weight::ONE)
            .node("a", "x", Weight::ONE)
            .node("b", "y", Weight::ONE)
            .edge("r", "a", Weight(2000))
            .edge("r", "b", Weight(1000));
        let g = DataGraph::from_document(&doc)
            .unwrap()
            .augment_keywords(&Default::default());
        let all = answers(&g, &["x", "y"], 0);
        assert_eq!(MissReport::new(&g, &all).nonminimal_missed, 0);
    }

    proptest! {
        #[test]
        fn distinct_root_flags_are_prefix_stable(seed in 0u64..500, cut in 0usize..8) {
            let s = crate::generate::random_small(seed, &Default::default());
            let mut all = Vec::new();
            run_gtf(&s.graph, &s.query, EngineOptions::default(), &mut |a| all.push(a.clone())).unwrap();
            let cut = cut.min(all.len());
            let flags = distinct_root_filter(&all);
            let mut permuted = all.clone();
            permuted[cut..].reverse();
            prop_assert_eq!(&distinct_root_filter(&permuted)[..cut], &flags[..cut]);
            let recount = all.iter().enumerate()
                .filter(|(i, a)| all[..*i].iter().any(|b| b.root == a.root))
                .count();
            prop_assert_eq!(flags.iter().filter(|&&f| f).count(), recount);
        }
    }
}
