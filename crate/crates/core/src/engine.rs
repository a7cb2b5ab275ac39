//! Pieces shared by the GTF and naive engines: options, run statistics,
//! instrumentation events and the priority queue with its bookkeeping.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::time::Instant;

use crate::answer::Answer;
use crate::datagraph::{DataGraph, NodeId, Query};
use crate::error::{Error, Result};
use crate::pathstore::{PathId, PathStore};
use crate::weight::Weight;

pub const DEFAULT_QUEUE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Stop after this many answers; 0 means enumerate everything.
    pub top_k: usize,
    /// Abort once the queue holds more entries than this.
    pub queue_cap: usize,
    /// Insert essential cyclic extensions (GTF only). Turning this off
    /// loses answers on some graphs.
    pub essential: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            top_k: 0,
            queue_cap: DEFAULT_QUEUE_CAP,
            essential: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Gtf,
    Naive,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Gtf => "gtf",
            EngineKind::Naive => "naive",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A K-root discovery, with enough context to check that no path heavier
/// than the root's best height was popped before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discovery {
    pub node: NodeId,
    /// Number of pops up to and including the discovering one.
    pub pops: u64,
    pub trigger_weight: Weight,
    /// Heaviest path popped so far, including the discovering one.
    pub max_popped_weight: Weight,
}

/// The path that first moved a `(node, keyword)` mark to visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstVisit {
    pub node: NodeId,
    pub keyword: NodeId,
    pub weight: Weight,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub pops: u64,
    pub inserts: u64,
    pub freezes: u64,
    pub unfreezes: u64,
    pub constructed_paths: u64,
    pub discarded_cyclic: u64,
    pub answers_emitted: u64,
    pub kroots_discovered: u64,
    pub wall_time_ns: u64,
    pub queue_peak: usize,
    pub max_path_len: u32,
    pub max_popped_weight: Weight,
    /// Queue insertions per path record, indexed by `PathId`.
    pub insert_counts: Vec<u32>,
    pub discoveries: Vec<Discovery>,
    pub first_visits: Vec<FirstVisit>,
}

impl RunStats {
    pub fn wall_secs(&self) -> f64 {
        self.wall_time_ns as f64 / 1e9
    }

    pub fn max_inserts_per_path(&self) -> u32 {
        self.insert_counts.iter().copied().max().unwrap_or(0)
    }

    /// Everything except the wall clock, for determinism checks.
    pub fn without_timing(&self) -> RunStats {
        RunStats {
            wall_time_ns: 0,
            ..self.clone()
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "pops={} inserts={} freezes={} unfreezes={} constructed={} discarded_cyclic={} \
             answers={} kroots={} queue_peak={} max_len={} wall_ms={:.3}",
            self.pops,
            self.inserts,
            self.freezes,
            self.unfreezes,
            self.constructed_paths,
            self.discarded_cyclic,
            self.answers_emitted,
            self.kroots_discovered,
            self.queue_peak,
            self.max_path_len,
            self.wall_time_ns as f64 / 1e6,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Pop,
    Insert,
    Freeze,
    Unfreeze,
    Discover,
    Emit,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Pop => "pop",
            EventKind::Insert => "insert",
            EventKind::Freeze => "freeze",
            EventKind::Unfreeze => "unfreeze",
            EventKind::Discover => "discover",
            EventKind::Emit => "emit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub kind: EventKind,
    /// The path involved; for `Emit` this is the path that triggered it.
    pub path: Option<PathId>,
    pub weight: Weight,
    pub node: NodeId,
    /// Answer rank, for `Emit`.
    pub rank: Option<usize>,
}

pub type Observer<'a> = Box<dyn FnMut(&Event) + 'a>;

/// Continue or stop after one main-loop iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Continue,
    Done,
}

/// Queue, path store, counters and emission shared by both engines.
pub(crate) struct SearchCore<'g> {
    pub graph: &'g DataGraph,
    pub query: &'g Query,
    pub opts: EngineOptions,
    pub store: PathStore,
    pub stats: RunStats,
    pub stopped: bool,
    heap: BinaryHeap<Reverse<(Weight, u64, PathId)>>,
    seq: u64,
    observer: Option<Observer<'g>>,
    started: Option<Instant>,
    seeded: bool,
}

impl<'g> SearchCore<'g> {
    pub fn new(graph: &'g DataGraph, query: &'g Query, opts: EngineOptions) -> Self {
        SearchCore {
            graph,
            query,
            opts,
            store: PathStore::new(),
            stats: RunStats::default(),
            stopped: false,
            heap: BinaryHeap::new(),
            seq: 0,
            observer: None,
            started: None,
            seeded: false,
        }
    }

    /// Queues the single-keyword paths on first use.
    pub fn ensure_seeded(&mut self) -> Result<()> {
        if self.seeded {
            return Ok(());
        }
        self.seeded = true;
        for &k in self.query.keywords() {
            let p = self.store.singleton(self.graph, k)?;
            self.stats.constructed_paths += 1;
            self.stats.max_path_len = self.stats.max_path_len.max(1);
            self.insert(p)?;
        }
        Ok(())
    }

    pub fn set_observer(&mut self, observer: Observer<'g>) {
        self.observer = Some(observer);
    }

    pub fn start_clock(&mut self) {
        self.started.get_or_insert_with(Instant::now);
    }

    pub fn stop_clock(&mut self) {
        if let Some(started) = self.started {
            self.stats.wall_time_ns = started.elapsed().as_nanos() as u64;
        }
    }

    pub fn event(&mut self, kind: EventKind, path: Option<PathId>, node: NodeId, rank: Option<usize>) {
        if let Some(observer) = self.observer.as_mut() {
            let weight = path.map(|p| self.store.weight(p)).unwrap_or_default();
            observer(&Event {
                kind,
                path,
                weight,
                node,
                rank,
            });
        }
    }

    pub fn slot(&self, p: PathId) -> usize {
        self.query
            .slot_of(self.store.keyword(p))
            .expect("every path ends at a query keyword")
    }

    pub fn insert(&mut self, p: PathId) -> Result<()> {
        let weight = self.store.weight(p);
        self.heap.push(Reverse((weight, self.seq, p)));
        self.seq += 1;
        self.stats.inserts += 1;
        if self.stats.insert_counts.len() <= p.index() {
            self.stats.insert_counts.resize(p.index() + 1, 0);
        }
        self.stats.insert_counts[p.index()] += 1;
        self.stats.queue_peak = self.stats.queue_peak.max(self.heap.len());
        let head = self.store.head(p);
        self.event(EventKind::Insert, Some(p), head, None);
        if self.heap.len() > self.opts.queue_cap {
            self.stopped = true;
            self.stop_clock();
            return Err(Error::QueueCapExceeded {
                cap: self.opts.queue_cap,
                stats: Box::new(self.stats.clone()),
            });
        }
        Ok(())
    }

    /// Extends `p` with `parent` and queues the result.
    pub fn insert_extension(&mut self, parent: NodeId, p: PathId) -> Result<()> {
        let before = self.store.len();
        let q = self.store.extend(self.graph, parent, p)?;
        if self.store.len() > before {
            self.stats.constructed_paths += 1;
            self.stats.max_path_len = self.stats.max_path_len.max(self.store.get(q).len);
        }
        self.insert(q)
    }

    pub fn pop(&mut self) -> Option<PathId> {
        let Reverse((weight, _, p)) = self.heap.pop()?;
        self.stats.pops += 1;
        self.stats.max_popped_weight = self.stats.max_popped_weight.max(weight);
        let head = self.store.head(p);
        self.event(EventKind::Pop, Some(p), head, None);
        Some(p)
    }

    pub fn queue_len(&self) -> usize {
        self.heap.len()
    }

    pub fn record_discovery(&mut self, node: NodeId, trigger: PathId) {
        self.stats.kroots_discovered += 1;
        self.stats.discoveries.push(Discovery {
            node,
            pops: self.stats.pops,
            trigger_weight: self.store.weight(trigger),
            max_popped_weight: self.stats.max_popped_weight,
        });
        self.event(EventKind::Discover, Some(trigger), node, None);
    }

    /// Hands answers to the sink in order, honouring the top-k limit.
    pub fn emit(&mut self, answers: Vec<Answer>, trigger: PathId, sink: &mut dyn FnMut(&Answer)) {
        for mut answer in answers {
            if self.opts.top_k > 0 && self.stats.answers_emitted as usize >= self.opts.top_k {
                break;
            }
            self.stats.answers_emitted += 1;
            answer.rank = self.stats.answers_emitted as usize;
            sink(&answer);
            let rank = Some(answer.rank);
            self.event(EventKind::Emit, Some(trigger), answer.root, rank);
        }
        if self.opts.top_k > 0 && self.stats.answers_emitted as usize >= self.opts.top_k {
            self.stopped = true;
        }
    }
}
