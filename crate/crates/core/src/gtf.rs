//! Generate Trees with Freezing.
//!
//! Paths are built backwards from the query keywords through a single
//! priority queue ordered by weight. The first path popped at a node for a
//! keyword is a minimal one and marks the pair visited; later paths for the
//! same pair are frozen there. Frozen paths go back into the queue only once
//! the pair is known to lie on a path from a K-root to the keyword
//! (mark in-answer). Cyclic extensions are dropped unless the cycle passes
//! through a node still marked visited, because such a path may be the only
//! way to thaw the paths frozen at that node.

use crate::answer::{produce_answers, Answer};
use crate::datagraph::{DataGraph, NodeId, Query};
use crate::engine::{EngineOptions, EventKind, FirstVisit, Observer, RunStats, SearchCore, Step};
use crate::error::Result;
use crate::pathstore::{PathId, PathStore};

/// Per `(node, keyword)` progress. Transitions only move forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mark {
    Active,
    Visited,
    InAnswer,
}

pub struct GtfSearch<'g> {
    core: SearchCore<'g>,
    keywords: usize,
    marks: Vec<Mark>,
    frozen: Vec<Vec<PathId>>,
    paths: Vec<Vec<PathId>>,
    is_root: Vec<bool>,
}

impl<'g> GtfSearch<'g> {
    pub fn new(graph: &'g DataGraph, query: &'g Query, opts: EngineOptions) -> Result<Self> {
        let cells = graph.node_count() * query.len();
        Ok(GtfSearch {
            core: SearchCore::new(graph, query, opts),
            keywords: query.len(),
            marks: vec![Mark::Active; cells],
            frozen: vec![Vec::new(); cells],
            paths: vec![Vec::new(); cells],
            is_root: vec![false; graph.node_count()],
        })
    }

    pub fn set_observer(&mut self, observer: Observer<'g>) {
        self.core.set_observer(observer);
    }

    fn cell(&self, v: NodeId, slot: usize) -> usize {
        v.index() * self.keywords + slot
    }

    /// Runs until the queue drains or the top-k limit is reached.
    pub fn run(&mut self, sink: &mut dyn FnMut(&Answer)) -> Result<RunStats> {
        self.core.start_clock();
        while self.step(sink)? == Step::Continue {}
        self.core.stop_clock();
        Ok(self.core.stats.clone())
    }

    /// One iteration of the main loop.
    pub fn step(&mut self, sink: &mut dyn FnMut(&Answer)) -> Result<Step> {
        if self.core.stopped {
            return Ok(Step::Done);
        }
        self.core.ensure_seeded()?;
        let Some(p) = self.core.pop() else {
            self.core.stopped = true;
            return Ok(Step::Done);
        };
        if self.freeze(p) {
            return Ok(Step::Continue);
        }
        let v = self.core.store.head(p);
        let slot = self.core.slot(p);
        let cell = self.cell(v, slot);
        if self.marks[cell] == Mark::Active {
            self.marks[cell] = Mark::Visited;
            self.core.stats.first_visits.push(FirstVisit {
                node: v,
                keyword: self.core.store.keyword(p),
                weight: self.core.store.weight(p),
            });
        }

        let mut relax = true;
        if self.is_root[v.index()] {
            self.unfreeze(p)?;
            if self.core.store.is_acyclic(p) {
                self.paths[cell].push(p);
                self.produce(v, p, sink);
            } else {
                relax = false;
            }
        } else {
            self.paths[cell].push(p);
            let first = self.cell(v, 0);
            if self.paths[first..first + self.keywords].iter().all(|l| !l.is_empty()) {
                self.is_root[v.index()] = true;
                self.core.record_discovery(v, p);
                for slot in 0..self.keywords {
                    let cell = self.cell(v, slot);
                    for q in self.paths[cell].clone() {
                        self.unfreeze(q)?;
                    }
                    let store = &self.core.store;
                    self.paths[cell].retain(|&q| store.is_acyclic(q));
                }
                self.produce(v, p, sink);
            }
        }
        if self.core.stopped {
            return Ok(Step::Done);
        }

        if relax {
            let graph = self.core.graph;
            for &(parent, _) in graph.parents(v) {
                if !self.core.store.contains(p, parent)
                    || (self.core.opts.essential && self.is_essential(parent, p))
                {
                    self.core.insert_extension(parent, p)?;
                } else {
                    self.core.stats.discarded_cyclic += 1;
                }
            }
        }
        Ok(Step::Continue)
    }

    /// Parks `p` at its head if that `(node, keyword)` pair is visited.
    pub fn freeze(&mut self, p: PathId) -> bool {
        let v = self.core.store.head(p);
        let cell = self.cell(v, self.core.slot(p));
        if self.marks[cell] != Mark::Visited {
            return false;
        }
        self.frozen[cell].push(p);
        self.core.stats.freezes += 1;
        self.core.event(EventKind::Freeze, Some(p), v, None);
        true
    }

    /// Marks every node of `p` in-answer for `p`'s keyword and requeues the
    /// paths frozen at nodes whose mark changed.
    pub fn unfreeze(&mut self, p: PathId) -> Result<()> {
        let slot = self.core.slot(p);
        let nodes = self.core.store.nodes(p);
        for u in nodes {
            let cell = self.cell(u, slot);
            if self.marks[cell] == Mark::InAnswer {
                continue;
            }
            self.marks[cell] = Mark::InAnswer;
            for q in std::mem::take(&mut self.frozen[cell]) {
                self.core.stats.unfreezes += 1;
                self.core.event(EventKind::Unfreeze, Some(q), u, None);
                self.core.insert(q)?;
            }
        }
        Ok(())
    }

    /// `parent -> p` is essential when `parent` already occurs on `p` and
    /// some node from `parent` through its next occurrence (both ends
    /// included) is still visited for `p`'s keyword.
    pub fn is_essential(&self, parent: NodeId, p: PathId) -> bool {
        let slot = self.core.slot(p);
        if self.marks[self.cell(parent, slot)] == Mark::Visited {
            return true;
        }
        for (u, _) in self.core.store.walk(p) {
            if self.marks[self.cell(u, slot)] == Mark::Visited {
                return true;
            }
            if u == parent {
                break;
            }
        }
        false
    }

    fn produce(&mut self, v: NodeId, p: PathId, sink: &mut dyn FnMut(&Answer)) {
        let first = self.cell(v, 0);
        let answers = produce_answers(
            self.core.graph,
            &self.core.store,
            self.core.query,
            &self.paths[first..first + self.keywords],
            p,
        );
        self.core.emit(answers, p, sink);
    }

    pub fn mark(&self, v: NodeId, keyword: NodeId) -> Mark {
        let slot = self.core.query.slot_of(keyword).expect("query keyword");
        self.marks[self.cell(v, slot)]
    }

    pub fn is_k_root(&self, v: NodeId) -> bool {
        self.is_root[v.index()]
    }

    pub fn stored_paths(&self, v: NodeId, keyword: NodeId) -> &[PathId] {
        let slot = self.core.query.slot_of(keyword).expect("query keyword");
        &self.paths[self.cell(v, slot)]
    }

    pub fn frozen_paths(&self, v: NodeId, keyword: NodeId) -> &[PathId] {
        let slot = self.core.query.slot_of(keyword).expect("query keyword");
        &self.frozen[self.cell(v, slot)]
    }

    pub fn store(&self) -> &PathStore {
        &self.core.store
    }

    pub fn stats(&self) -> &RunStats {
        &self.core.stats
    }

    pub fn queue_len(&self) -> usize {
        self.core.queue_len()
    }

    pub fn is_done(&self) -> bool {
        self.core.stopped
    }
}

/// Enumerates answers to `query` by nondecreasing height.
pub fn run_gtf(
    graph: &DataGraph,
    query: &Query,
    opts: EngineOptions,
    sink: &mut dyn FnMut(&Answer),
) -> Result<RunStats> {
    GtfSearch::new(graph, query, opts)?.run(sink)
}
