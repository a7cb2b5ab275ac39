//! Answers and their assembly from one path per keyword.

use std::collections::{BTreeSet, HashMap};

use crate::datagraph::{DataGraph, NodeId, Query};
use crate::error::{Error, Result};
use crate::pathstore::{PathId, PathStore};
use crate::weight::Weight;

/// A rooted subtree whose leaves are exactly the query keywords and whose
/// root has at least two children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub root: NodeId,
    /// Edges in path order: the path to the first keyword root-first, then
    /// the edges the next path adds, and so on.
    pub edges: Vec<(NodeId, NodeId)>,
    pub keywords: Vec<NodeId>,
    /// Maximum weight over the root-to-keyword paths.
    pub height: Weight,
    /// Sum over distinct nodes and edges.
    pub total_weight: Weight,
    /// 1-based emission position; 0 until emitted.
    pub rank: usize,
}

pub type EdgeSet = BTreeSet<(NodeId, NodeId)>;

impl Answer {
    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().copied().collect()
    }

    pub fn nodes(&self) -> BTreeSet<NodeId> {
        std::iter::once(self.root)
            .chain(self.edges.iter().map(|&(_, v)| v))
            .collect()
    }

    pub fn root_children(&self) -> usize {
        self.edges.iter().filter(|&&(u, _)| u == self.root).count()
    }

    /// Ordering used wherever answers of equal height need a stable order.
    pub fn canonical_key(&self) -> (Weight, Weight, Vec<(NodeId, NodeId)>) {
        (self.height, self.total_weight, self.edge_set().into_iter().collect())
    }

    /// Checks the tree shape, the leaf set, the root fan-out and the two
    /// weights against the graph.
    pub fn check(&self, graph: &DataGraph) -> Result<()> {
        let fail = |msg: String| Err(Error::Contract(msg));
        let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
        for &(u, v) in &self.edges {
            if graph.edge_weight(u, v).is_none() {
                return fail(format!("edge {} -> {} not in graph", graph.id(u), graph.id(v)));
            }
            if v == self.root || parent.insert(v, u).is_some() {
                return fail(format!("node {} has two parents", graph.id(v)));
            }
        }
        // every node must reach the root by parent links
        for &start in parent.keys() {
            let mut v = start;
            let mut steps = 0;
            while v != self.root {
                match parent.get(&v) {
                    Some(&u) => v = u,
                    None => return fail(format!("node {} unreachable from root", graph.id(start))),
                }
                steps += 1;
                if steps > parent.len() {
                    return fail("cycle in answer".to_string());
                }
            }
        }
        let internal: BTreeSet<NodeId> = self.edges.iter().map(|&(u, _)| u).collect();
        let leaves: BTreeSet<NodeId> = self.nodes().difference(&internal).copied().collect();
        let keywords: BTreeSet<NodeId> = self.keywords.iter().copied().collect();
        if leaves != keywords {
            return fail("leaves differ from the query keywords".to_string());
        }
        if self.root_children() < 2 {
            return fail("root has fewer than two children".to_string());
        }
        let total: Weight = self.nodes().iter().map(|&v| graph.weight(v)).sum::<Weight>()
            + self.edges.iter().map(|&(u, v)| graph.edge_weight(u, v).unwrap()).sum();
        if total != self.total_weight {
            return fail(format!("total weight {} != {}", self.total_weight, total));
        }
        let height = keywords
            .iter()
            .map(|&k| {
                let mut w = graph.weight(k);
                let mut v = k;
                while let Some(&u) = parent.get(&v) {
                    w = w + graph.edge_weight(u, v).unwrap() + graph.weight(u);
                    v = u;
                }
                w
            })
            .max()
            .unwrap_or_default();
        if height != self.height {
            return fail(format!("height {} != {}", self.height, height));
        }
        Ok(())
    }
}

/// Unions one path per keyword into a tree. Returns `None` when some node
/// would get two different parents (or the root would get one), which also
/// covers cyclic inputs. The root's fan-out is not checked here.
pub fn combine_to_tree(
    graph: &DataGraph,
    store: &PathStore,
    paths: &[PathId],
) -> Result<Option<Answer>> {
    let Some(&first) = paths.first() else {
        return Err(Error::Contract("no paths to combine".to_string()));
    };
    let root = store.head(first);
    let mut keywords = Vec::with_capacity(paths.len());
    for &p in paths {
        if store.head(p) != root {
            return Err(Error::Contract(format!(
                "paths start at {} and {}",
                graph.id(root),
                graph.id(store.head(p))
            )));
        }
        let k = store.keyword(p);
        if keywords.contains(&k) {
            return Err(Error::Contract(format!(
                "two paths for keyword {}",
                graph.label(k)
            )));
        }
        keywords.push(k);
    }

    let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
    let mut edges = Vec::new();
    let mut total = graph.weight(root);
    let mut height = Weight::ZERO;
    for &p in paths {
        if !store.is_acyclic(p) {
            return Ok(None);
        }
        height = height.max(store.weight(p));
        let nodes = store.nodes(p);
        for pair in nodes.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            if v == root {
                return Ok(None);
            }
            match parent.get(&v) {
                Some(&existing) if existing != u => return Ok(None),
                Some(_) => {}
                None => {
                    parent.insert(v, u);
                    edges.push((u, v));
                    total = total + graph.weight(v) + graph.edge_weight(u, v).expect("path edge");
                }
            }
        }
    }
    Ok(Some(Answer {
        root,
        edges,
        keywords,
        height,
        total_weight: total,
        rank: 0,
    }))
}

/// Every answer formed by `p` together with one stored path per other
/// keyword at `p`'s head, in canonical order. `stored` is indexed by query
/// slot; the slot of `p` is replaced by `p` itself.
pub fn produce_answers(
    graph: &DataGraph,
    store: &PathStore,
    query: &Query,
    stored: &[Vec<PathId>],
    p: PathId,
) -> Vec<Answer> {
    let slot = query
        .slot_of(store.keyword(p))
        .expect("path ends at a query keyword");
    if !store.is_acyclic(p) {
        return Vec::new();
    }
    let choices: Vec<Vec<PathId>> = (0..query.len())
        .map(|i| {
            if i == slot {
                vec![p]
            } else {
                stored[i].iter().copied().filter(|&q| store.is_acyclic(q)).collect()
            }
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }

    let mut answers = Vec::new();
    let mut cursor = vec![0usize; choices.len()];
    let mut combo = vec![p; choices.len()];
    loop {
        for (i, &c) in cursor.iter().enumerate() {
            combo[i] = choices[i][c];
        }
        if let Some(answer) = combine_to_tree(graph, store, &combo).expect("well-formed combination") {
            if answer.root_children() > 1 {
                answers.push(answer);
            }
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == cursor.len() {
                answers.sort_by_cached_key(Answer::canonical_key);
                return answers;
            }
            cursor[i] += 1;
            if cursor[i] < choices[i].len() {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
    }
}
