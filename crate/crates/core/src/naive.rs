//! Baseline enumerator: every simple path to every keyword, by increasing
//! weight, through one priority queue and without freezing.

use crate::answer::{produce_answers, Answer};
use crate::datagraph::{DataGraph, NodeId, Query};
use crate::engine::{EngineOptions, FirstVisit, Observer, RunStats, SearchCore, Step};
use crate::error::Result;
use crate::pathstore::{PathId, PathStore};

pub struct NaiveSearch<'g> {
    core: SearchCore<'g>,
    keywords: usize,
    paths: Vec<Vec<PathId>>,
    is_root: Vec<bool>,
}

impl<'g> NaiveSearch<'g> {
    pub fn new(graph: &'g DataGraph, query: &'g Query, opts: EngineOptions) -> Self {
        NaiveSearch {
            core: SearchCore::new(graph, query, opts),
            keywords: query.len(),
            paths: vec![Vec::new(); graph.node_count() * query.len()],
            is_root: vec![false; graph.node_count()],
        }
    }

    pub fn set_observer(&mut self, observer: Observer<'g>) {
        self.core.set_observer(observer);
    }

    fn cell(&self, v: NodeId, slot: usize) -> usize {
        v.index() * self.keywords + slot
    }

    pub fn run(&mut self, sink: &mut dyn FnMut(&Answer)) -> Result<RunStats> {
        self.core.start_clock();
        while self.step(sink)? == Step::Continue {}
        self.core.stop_clock();
        Ok(self.core.stats.clone())
    }

    pub fn step(&mut self, sink: &mut dyn FnMut(&Answer)) -> Result<Step> {
        if self.core.stopped {
            return Ok(Step::Done);
        }
        self.core.ensure_seeded()?;
        let Some(p) = self.core.pop() else {
            self.core.stopped = true;
            return Ok(Step::Done);
        };
        let v = self.core.store.head(p);
        let cell = self.cell(v, self.core.slot(p));
        if self.paths[cell].is_empty() {
            self.core.stats.first_visits.push(FirstVisit {
                node: v,
                keyword: self.core.store.keyword(p),
                weight: self.core.store.weight(p),
            });
        }
        self.paths[cell].push(p);

        let first = self.cell(v, 0);
        if self.is_root[v.index()] {
            self.produce(v, p, sink);
        } else if self.paths[first..first + self.keywords].iter().all(|l| !l.is_empty()) {
            self.is_root[v.index()] = true;
            self.core.record_discovery(v, p);
            self.produce(v, p, sink);
        }
        if self.core.stopped {
            return Ok(Step::Done);
        }

        let graph = self.core.graph;
        for &(parent, _) in graph.parents(v) {
            if self.core.store.contains(p, parent) {
                self.core.stats.discarded_cyclic += 1;
            } else {
                self.core.insert_extension(parent, p)?;
            }
        }
        Ok(Step::Continue)
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

    /// Every path popped with head `v` toward `keyword`, in pop order.
    pub fn stored_paths(&self, v: NodeId, keyword: NodeId) -> &[PathId] {
        let slot = self.core.query.slot_of(keyword).expect("query keyword");
        &self.paths[self.cell(v, slot)]
    }

    pub fn is_k_root(&self, v: NodeId) -> bool {
        self.is_root[v.index()]
    }

    pub fn store(&self) -> &PathStore {
        &self.core.store
    }

    pub fn stats(&self) -> &RunStats {
        &self.core.stats
    }
}

pub fn run_naive(
    graph: &DataGraph,
    query: &Query,
    opts: EngineOptions,
    sink: &mut dyn FnMut(&Answer),
) -> Result<RunStats> {
    NaiveSearch::new(graph, query, opts).run(sink)
}
