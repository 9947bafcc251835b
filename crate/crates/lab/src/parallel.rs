//! Multi-threaded drivers for the core's search and sampling hooks.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use ramsey_core::concentration::ChunkRunner;
use ramsey_core::search::{
    explore_subtree, merge_subtrees, ramsey_number_with, subtree_prefixes, RamseyResult, SearchConfig, SearchMonitor, SubtreeOutcome,
};
use ramsey_core::{Error, Result};

/// Prefix length at which the search tree is split by default. Fixed, so
/// results (node counts included) do not depend on the worker count.
pub const DEFAULT_SPLIT_DEPTH: usize = 12;

/// Runs chunks on a fixed number of scoped threads pulling from a shared
/// index; outputs are stored by chunk index.
#[derive(Clone, Copy, Debug)]
pub struct ThreadRunner {
    pub threads: usize,
}

impl ChunkRunner for ThreadRunner {
    fn run(&self, chunks: usize, job: &(dyn Fn(usize) -> Vec<f64> + Sync)) -> Vec<Vec<f64>> {
        let workers = self.threads.min(chunks);
        if workers <= 1 {
            return (0..chunks).map(job).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Vec<f64>>> = (0..chunks).map(|_| Mutex::new(Vec::new())).collect();
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let c = next.fetch_add(1, Ordering::Relaxed);
                    if c >= chunks {
                        break;
                    }
                    let out = job(c);
                    *slots[c].lock().expect("slot lock") = out;
                });
            }
        });
        slots.into_iter().map(|m| m.into_inner().expect("slot lock")).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub threads: usize,
    pub split_depth: usize,
    pub time_budget: Option<Duration>,
    /// Print a progress line to stderr every this many nodes (0 = never).
    pub progress_every: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: 1,
            split_depth: DEFAULT_SPLIT_DEPTH,
            time_budget: None,
            progress_every: 0,
        }
    }
}

/// A search result with wall-clock time and the split that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedResult {
    pub result: RamseyResult,
    pub elapsed: Duration,
    /// Number of subtrees searched (1 when the tree was not split).
    pub subtrees: usize,
}

/// Shared budget, deadline, and cancellation for all workers of one search.
struct Shared {
    total: AtomicU64,
    budget: u64,
    deadline: Option<Instant>,
    cancel: AtomicBool,
    budget_hit: AtomicBool,
    progress_every: u64,
    next_progress: AtomicU64,
}

impl Shared {
    fn new(budget: u64, opts: &SearchOptions, start: Instant) -> Self {
        Shared {
            total: AtomicU64::new(0),
            budget,
            deadline: opts.time_budget.map(|d| start + d),
            cancel: AtomicBool::new(false),
            budget_hit: AtomicBool::new(false),
            progress_every: opts.progress_every,
            next_progress: AtomicU64::new(opts.progress_every),
        }
    }
}

/// Per-worker view of [`Shared`]; `seen` is this subtree's count at the last
/// callback.
struct WorkerMonitor<'a> {
    shared: &'a Shared,
    seen: u64,
}

impl SearchMonitor for WorkerMonitor<'_> {
    fn progress(&mut self, nodes: u64) -> ControlFlow<()> {
        let s = self.shared;
        let total = s.total.fetch_add(nodes - self.seen, Ordering::Relaxed) + nodes - self.seen;
        self.seen = nodes;
        if s.progress_every > 0 {
            let mark = s.next_progress.load(Ordering::Relaxed);
            if total >= mark
                && s.next_progress
                    .compare_exchange(mark, mark + s.progress_every, Ordering::Relaxed, Ordering::Relaxed)
                    .is_ok()
            {
                eprintln!("progress: {total} nodes");
            }
        }
        if total > s.budget {
            s.budget_hit.store(true, Ordering::Relaxed);
            s.cancel.store(true, Ordering::Relaxed);
        }
        if s.deadline.is_some_and(|d| Instant::now() >= d) {
            s.cancel.store(true, Ordering::Relaxed);
        }
        if s.cancel.load(Ordering::Relaxed) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

/// Computes the Ramsey-type number for `cfg`, splitting the tree at
/// `opts.split_depth` and spreading subtrees over `opts.threads` workers.
///
/// The subtrees and their merge depend only on `cfg` and the split depth,
/// so value, witness, and node count are the same for every thread count.
/// When no good coloring reaches the split depth, the unsplit search runs.
pub fn parallel_ramsey_number(cfg: &SearchConfig, opts: &SearchOptions) -> Result<TimedResult> {
    cfg.validate()?;
    let start = Instant::now();
    let shared = Shared::new(cfg.node_budget, opts, start);
    let depth = opts.split_depth.min(cfg.max_n - 1);
    let prefixes = if depth > 1 {
        subtree_prefixes(cfg.kind, cfg.k, depth, cfg.symmetry_break)?
    } else {
        Vec::new()
    };

    if prefixes.is_empty() {
        let mut monitor = WorkerMonitor { shared: &shared, seen: 0 };
        let result = ramsey_number_with(cfg, &mut monitor).map_err(|e| rewrite_interrupt(e, &shared, 0));
        return result.map(|result| TimedResult {
            result,
            elapsed: start.elapsed(),
            subtrees: 1,
        });
    }

    // Each worker enforces the shared budget through its monitor.
    let sub_cfg = SearchConfig {
        parallel_width: depth,
        node_budget: u64::MAX,
        ..*cfg
    };
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<SubtreeOutcome>>>> = prefixes.iter().map(|_| Mutex::new(None)).collect();
    let workers = opts.threads.clamp(1, prefixes.len());
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= prefixes.len() || shared.cancel.load(Ordering::Relaxed) {
            break;
        }
        let mut monitor = WorkerMonitor { shared: &shared, seen: 0 };
        let out = explore_subtree(&sub_cfg, &prefixes[i], &mut monitor);
        if let Ok(o) = &out {
            shared.total.fetch_add(o.nodes - monitor.seen, Ordering::Relaxed);
        } else {
            shared.cancel.store(true, Ordering::Relaxed);
        }
        *slots[i].lock().expect("slot lock") = Some(out);
    };
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }

    let mut outcomes = Vec::with_capacity(prefixes.len());
    let mut failure: Option<Error> = None;
    let mut best_lower = 0;
    for slot in slots {
        match slot.into_inner().expect("slot lock") {
            Some(Ok(o)) => {
                best_lower = best_lower.max(o.longest + 1);
                outcomes.push(o);
            }
            Some(Err(e)) => {
                best_lower = best_lower.max(e.search_lower_bound().unwrap_or(0));
                failure.get_or_insert(e);
            }
            None => {}
        }
    }
    if failure.is_some() || outcomes.len() < prefixes.len() {
        let e = failure.unwrap_or(Error::Cancelled { nodes: 0, lower_bound: 0 });
        return Err(rewrite_interrupt(e, &shared, best_lower));
    }
    let result = merge_subtrees(cfg, &outcomes)?;
    Ok(TimedResult {
        result,
        elapsed: start.elapsed(),
        subtrees: prefixes.len(),
    })
}

/// Reports interruptions against the shared totals: the node budget wins
/// over a plain cancellation, and the lower bound is the best seen anywhere.
fn rewrite_interrupt(e: Error, shared: &Shared, best_lower: usize) -> Error {
    let nodes = shared.total.load(Ordering::Relaxed);
    match e {
        Error::Cancelled { lower_bound, .. } | Error::NodeBudgetExceeded { lower_bound, .. } => {
            let lower_bound = lower_bound.max(best_lower);
            if shared.budget_hit.load(Ordering::Relaxed) || matches!(e, Error::NodeBudgetExceeded { .. }) {
                Error::NodeBudgetExceeded {
                    nodes,
                    budget: shared.budget,
                    lower_bound,
                }
            } else {
                Error::Cancelled { nodes, lower_bound }
            }
        }
        other => other,
    }
}
