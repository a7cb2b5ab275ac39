//! Shared-suffix storage for paths built backwards from keyword nodes.
//!
//! A path is its first node plus a link to the rest of the path, so every
//! extension of a path shares the record of the path it extends. Records are
//! never mutated or freed before the store is dropped.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::datagraph::{DataGraph, NodeId};
use crate::error::{Error, Result};
use crate::weight::Weight;

/// Paths longer than this carry a node bitmap for membership tests.
const BITMAP_THRESHOLD: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathId(pub u32);

impl PathId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct PathRecord {
    pub head: NodeId,
    pub suffix: Option<PathId>,
    pub keyword: NodeId,
    pub weight: Weight,
    pub len: u32,
    acyclic: bool,
    occupancy: Option<Box<[u64]>>,
}

impl PathRecord {
    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }
}

#[derive(Debug, Default)]
pub struct PathStore {
    records: Vec<PathRecord>,
    singletons: HashMap<NodeId, PathId>,
    extensions: HashMap<(NodeId, PathId), PathId>,
}

impl PathStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, p: PathId) -> &PathRecord {
        &self.records[p.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = PathId> {
        (0..self.records.len() as u32).map(PathId)
    }

    fn push(&mut self, record: PathRecord) -> PathId {
        let id = PathId(self.records.len() as u32);
        self.records.push(record);
        id
    }

    /// The one-node path `<k>`.
    pub fn singleton(&mut self, graph: &DataGraph, k: NodeId) -> Result<PathId> {
        if !graph.is_keyword(k) {
            return Err(Error::NotAKeyword(graph.id(k).to_string()));
        }
        if let Some(&p) = self.singletons.get(&k) {
            return Ok(p);
        }
        let id = self.push(PathRecord {
            head: k,
            suffix: None,
            keyword: k,
            weight: graph.weight(k),
            len: 1,
            acyclic: true,
            occupancy: None,
        });
        self.singletons.insert(k, id);
        Ok(id)
    }

    /// `parent -> p`. Extending the same path with the same parent twice
    /// returns the same record.
    pub fn extend(&mut self, graph: &DataGraph, parent: NodeId, p: PathId) -> Result<PathId> {
        if let Some(&existing) = self.extensions.get(&(parent, p)) {
            return Ok(existing);
        }
        let base = self.get(p);
        let edge = graph
            .edge_weight(parent, base.head)
            .ok_or_else(|| Error::NoSuchEdge(graph.id(parent).into(), graph.id(base.head).into()))?;
        let repeats = self.contains(p, parent);
        let base = self.get(p);
        let len = base.len + 1;
        let occupancy = (len > BITMAP_THRESHOLD).then(|| {
            let mut bits = match &base.occupancy {
                Some(bits) => bits.clone(),
                None => {
                    let mut bits = vec![0u64; graph.node_count().div_ceil(64)].into_boxed_slice();
                    for v in self.nodes(p) {
                        bits[v.index() / 64] |= 1 << (v.index() % 64);
                    }
                    bits
                }
            };
            bits[parent.index() / 64] |= 1 << (parent.index() % 64);
            bits
        });
        let record = PathRecord {
            head: parent,
            suffix: Some(p),
            keyword: base.keyword,
            weight: base.weight + edge + graph.weight(parent),
            len,
            acyclic: base.acyclic && !repeats,
            occupancy,
        };
        let id = self.push(record);
        self.extensions.insert((parent, p), id);
        Ok(id)
    }

    /// Iterates over the nodes of `p` from its head to its keyword.
    pub fn walk(&self, p: PathId) -> Walk<'_> {
        Walk {
            store: self,
            next: Some(p),
        }
    }

    pub fn nodes(&self, p: PathId) -> Vec<NodeId> {
        self.walk(p).map(|(v, _)| v).collect()
    }

    pub fn contains(&self, p: PathId, v: NodeId) -> bool {
        let record = self.get(p);
        match &record.occupancy {
            Some(bits) => bits[v.index() / 64] & (1 << (v.index() % 64)) != 0,
            None => self.walk(p).any(|(u, _)| u == v),
        }
    }

    pub fn is_acyclic(&self, p: PathId) -> bool {
        self.get(p).acyclic
    }

    pub fn head(&self, p: PathId) -> NodeId {
        self.get(p).head
    }

    pub fn keyword(&self, p: PathId) -> NodeId {
        self.get(p).keyword
    }

    pub fn weight(&self, p: PathId) -> Weight {
        self.get(p).weight
    }

    /// `weight<TAB>node1->node2->...->keyword`
    pub fn dump_line(&self, graph: &DataGraph, p: PathId) -> String {
        let mut line = format!("{}\t", self.weight(p));
        for (i, (v, _)) in self.walk(p).enumerate() {
            if i > 0 {
                line.push_str("->");
            }
            let _ = write!(line, "{}", graph.label(v));
        }
        line
    }

    pub fn dump(&self, graph: &DataGraph) -> String {
        self.ids()
            .map(|p| self.dump_line(graph, p) + "\n")
            .collect()
    }
}

/// Yields `(node, record whose head is that node)` pairs.
pub struct Walk<'a> {
    store: &'a PathStore,
    next: Option<PathId>,
}

impl Iterator for Walk<'_> {
    type Item = (NodeId, PathId);

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next?;
        let record = self.store.get(current);
        self.next = record.suffix;
        Some((record.head, current))
    }
}
