//! The deterministic crawl itself, plus the trace-level quantities derived
//! from it: per-class surplus, jump numbers and the degree/diameter step
//! bound.
//!
//! A crawl starts at the dirtiest vertex (initial rank `-n`) and at every
//! step moves to the neighbour of least current weight, stamping the visited
//! vertex with the current time. Weights are distinct at all times, so the
//! argmin is unique and no tie-breaking rule exists.

use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphDiagnostics, PartiteSpec};

#[derive(Debug, Error)]
pub enum CrawlError {
    #[error("rank array is not a bijection onto {{-n, ..., -1}}")]
    NotAPermutation,
    #[error("weighting has {got} entries but the graph has {expected} vertices")]
    SizeMismatch { got: usize, expected: usize },
    #[error("step cap of {0} exceeded")]
    StepCapExceeded(usize),
    #[error("trace does not match the class layout of the given spec")]
    LayoutMismatch,
    #[error("replay audit failed at time {time}: trace visits {got} but argmin is {expected}")]
    AuditFailed { time: usize, got: u32, expected: u32 },
    #[error("diameter is only a lower bound; refusing to evaluate the step bound")]
    DiameterNotExact,
    #[error("weighting file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Initial dirt ranking: a bijection from vertices onto `{-n, ..., -1}`.
/// Rank `-n` is the dirtiest vertex, `-1` the cleanest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weighting {
    rank: Vec<i64>,
}

impl Weighting {
    pub fn new(rank: Vec<i64>) -> Result<Self, CrawlError> {
        let n = rank.len() as i64;
        let mut seen = vec![false; rank.len()];
        for &r in &rank {
            if r < -n || r > -1 {
                return Err(CrawlError::NotAPermutation);
            }
            let idx = (r + n) as usize;
            if seen[idx] {
                return Err(CrawlError::NotAPermutation);
            }
            seen[idx] = true;
        }
        Ok(Weighting { rank })
    }

    /// Uniform random weighting via a seeded Fisher-Yates shuffle.
    pub fn uniform<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(rng);
        Self::from_vertex_order(&order)
    }

    /// Builds a weighting from a dirtiest-first vertex order:
    /// `order[0]` receives rank `-n`, the last entry rank `-1`.
    pub fn from_vertex_order(order: &[u32]) -> Self {
        let n = order.len();
        let mut rank = vec![0i64; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = -(n as i64) + i as i64;
        }
        Weighting { rank }
    }

    pub fn n(&self) -> usize {
        self.rank.len()
    }

    pub fn rank(&self, v: usize) -> i64 {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[i64] {
        &self.rank
    }

    /// The vertex holding rank `-n`.
    pub fn dirtiest(&self) -> usize {
        let n = self.rank.len() as i64;
        self.rank.iter().position(|&r| r == -n).unwrap()
    }

    /// Vertices in dirt order: entry `t` is `w0^{-1}(-n + t)`.
    pub fn dirt_order(&self) -> Vec<u32> {
        let n = self.rank.len();
        let mut order = vec![0u32; n];
        for (v, &r) in self.rank.iter().enumerate() {
            order[(r + n as i64) as usize] = v as u32;
        }
        order
    }

    /// Class labels in dirt order for a k-partite layout:
    /// entry 0 is the class of the dirtiest vertex.
    pub fn class_labels(&self, spec: &PartiteSpec) -> Vec<u8> {
        self.dirt_order()
            .iter()
            .map(|&v| spec.class_of(v as usize) as u8)
            .collect()
    }

    /// Reads the file format: n lines, line v holding rank\[v\].
    pub fn load<R: BufRead>(reader: R) -> Result<Self, CrawlError> {
        let mut rank = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| CrawlError::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            rank.push(line.parse::<i64>().map_err(|e| CrawlError::Parse {
                line: lineno,
                msg: format!("bad rank {:?}: {}", line, e),
            })?);
        }
        Self::new(rank)
    }

    pub fn save(&self) -> String {
        let mut out = String::new();
        for &r in &self.rank {
            out.push_str(&format!("{}\n", r));
        }
        out
    }
}

/// Full visit sequence of one crawl.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrawlTrace {
    /// Vertices in visit order; `visits[t - 1]` is the vertex visited at
    /// time `t`, so the length equals the step count.
    pub visits: Vec<u32>,
    /// Total steps taken to clean every vertex.
    pub steps: usize,
    /// Time of first visit per vertex.
    pub first_clean_time: Vec<u32>,
}

/// Runs the crawl; `step_cap` is a debugging aid only, termination is
/// guaranteed without it.
pub fn crawl(g: &Graph, w0: &Weighting, step_cap: Option<usize>) -> Result<CrawlTrace, CrawlError> {
    let n = g.n();
    if w0.n() != n {
        return Err(CrawlError::SizeMismatch {
            got: w0.n(),
            expected: n,
        });
    }
    let mut weight: Vec<i64> = w0.ranks().to_vec();
    let mut first_clean_time = vec![0u32; n];
    let start = w0.dirtiest();
    let mut visits = Vec::with_capacity(n + n / 8);
    let mut t = 1usize;
    weight[start] = 1;
    first_clean_time[start] = 1;
    visits.push(start as u32);
    let mut cleaned = 1usize;
    let mut cur = start;
    while cleaned < n {
        t += 1;
        if let Some(cap) = step_cap {
            if t > cap {
                return Err(CrawlError::StepCapExceeded(cap));
            }
        }
        let next = argmin_neighbor(g, &weight, cur);
        cur = next as usize;
        if weight[cur] < 0 {
            cleaned += 1;
            first_clean_time[cur] = t as u32;
        }
        weight[cur] = t as i64;
        visits.push(next);
    }
    Ok(CrawlTrace {
        visits,
        steps: t,
        first_clean_time,
    })
}

fn argmin_neighbor(g: &Graph, weight: &[i64], cur: usize) -> u32 {
    let mut best = u32::MAX;
    let mut best_w = i64::MAX;
    for &u in g.neighbors(cur) {
        let w = weight[u as usize];
        debug_assert_ne!(w, best_w, "tied weights at vertex {}", cur);
        if w < best_w {
            best_w = w;
            best = u;
        }
    }
    debug_assert_ne!(best, u32::MAX, "crawler stuck at isolated vertex {}", cur);
    best
}

/// Replays a trace and re-checks every move's argmin against the evolving
/// weight state. Zero-cost confidence that the engine moved legally.
pub fn verify_trace(g: &Graph, w0: &Weighting, trace: &CrawlTrace) -> Result<(), CrawlError> {
    let n = g.n();
    if trace.visits.is_empty() || trace.visits[0] as usize != w0.dirtiest() {
        return Err(CrawlError::AuditFailed {
            time: 1,
            got: trace.visits.first().copied().unwrap_or(u32::MAX),
            expected: w0.dirtiest() as u32,
        });
    }
    let mut weight: Vec<i64> = w0.ranks().to_vec();
    weight[w0.dirtiest()] = 1;
    let mut cur = w0.dirtiest();
    for (idx, &v) in trace.visits.iter().enumerate().skip(1) {
        let t = idx + 1;
        let expected = argmin_neighbor(g, &weight, cur);
        if expected != v {
            return Err(CrawlError::AuditFailed {
                time: t,
                got: v,
                expected,
            });
        }
        cur = v as usize;
        weight[cur] = t as i64;
    }
    if weight.iter().any(|&w| w <= 0) || trace.steps != trace.visits.len() {
        return Err(CrawlError::AuditFailed {
            time: trace.steps,
            got: 0,
            expected: 0,
        });
    }
    let mut fct = vec![0u32; n];
    for (idx, &v) in trace.visits.iter().enumerate() {
        if fct[v as usize] == 0 {
            fct[v as usize] = idx as u32 + 1;
        }
    }
    if fct != trace.first_clean_time {
        return Err(CrawlError::AuditFailed {
            time: 0,
            got: 0,
            expected: 0,
        });
    }
    Ok(())
}

/// Per-class surplus of a k-partite crawl: uncleaned vertices left in a
/// class at the moment everything outside it is clean.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurplusReport {
    pub per_class: Vec<usize>,
    /// Max (equivalently sum) of the per-class surpluses.
    pub total: usize,
    /// Whether `steps = n + total - 1` held for this trace.
    pub identity_holds: bool,
}

pub fn surplus(trace: &CrawlTrace, spec: &PartiteSpec) -> Result<SurplusReport, CrawlError> {
    let n = spec.n();
    if trace.first_clean_time.len() != n {
        return Err(CrawlError::LayoutMismatch);
    }
    let mut per_class = vec![0usize; spec.k()];
    for i in 0..spec.k() {
        let range = spec.class_range(i);
        let complement_done = trace
            .first_clean_time
            .iter()
            .enumerate()
            .filter(|(v, _)| !range.contains(v))
            .map(|(_, &t)| t)
            .max()
            .unwrap_or(0);
        per_class[i] = range
            .clone()
            .filter(|&v| trace.first_clean_time[v] > complement_done)
            .count();
    }
    let total = per_class.iter().copied().max().unwrap_or(0);
    Ok(SurplusReport {
        identity_holds: trace.steps == n + total - 1,
        per_class,
        total,
    })
}

/// Jump number per vertex: visits, before the vertex was first cleaned, to
/// vertices that were initially cleaner than it. Each such event witnesses
/// a missing edge in the ER analysis.
pub fn jump_numbers(w0: &Weighting, trace: &CrawlTrace) -> Vec<u64> {
    let n = w0.n();
    let mut jumps = vec![0u64; n];
    // Fenwick tree over dirt-rank indices (0 = dirtiest) counting visits.
    let mut tree = Fenwick::new(n);
    let mut total = 0u64;
    for (idx, &v) in trace.visits.iter().enumerate() {
        let t = idx as u32 + 1;
        let v = v as usize;
        let rank_idx = (w0.rank(v) + n as i64) as usize;
        if trace.first_clean_time[v] == t {
            // Visits so far to strictly cleaner vertices (higher rank index).
            jumps[v] = total - tree.prefix_sum(rank_idx + 1);
        }
        tree.add(rank_idx, 1);
        total += 1;
    }
    jumps
}

/// Degree/diameter step bound `n * (max_degree + 1)^diameter`, saturating
/// to `u64::MAX` on overflow. Requires an exact diameter.
pub fn step_bound(diag: &GraphDiagnostics, n: usize) -> Result<u64, CrawlError> {
    if diag.diameter_is_lower_bound {
        return Err(CrawlError::DiameterNotExact);
    }
    let base = diag.max_degree as u128 + 1;
    let mut acc = n as u128;
    for _ in 0..diag.diameter {
        acc = acc.saturating_mul(base);
        if acc > u64::MAX as u128 {
            return Ok(u64::MAX);
        }
    }
    Ok(acc.min(u64::MAX as u128) as u64)
}

/// Crawl on a complete k-partite graph driven by class labels alone.
///
/// `labels` lists the class of every vertex in dirt order (entry 0 is the
/// dirtiest). Because within-class vertices are interchangeable, the step
/// count and per-class surplus depend only on this label sequence, which
/// lets large-n Monte Carlo runs skip the per-vertex engine. Equivalence
/// with [`crawl`] + [`surplus`] is covered by tests.
pub fn crawl_kpartite_labels(spec: &PartiteSpec, labels: &[u8]) -> (usize, Vec<usize>) {
    let n = spec.n();
    let k = spec.k();
    debug_assert_eq!(labels.len(), n);
    // Per-class positions in dirt order, each consumed dirtiest-first.
    let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (pos, &c) in labels.iter().enumerate().rev() {
        by_class[c as usize].push(pos as u32);
    }
    // Stacks now hold positions in increasing dirt order at the top? No:
    // pushed in reverse, so the last element is the dirtiest remaining.
    let mut cur = labels[0] as usize;
    let popped = by_class[cur].pop();
    debug_assert_eq!(popped, Some(0));
    let mut cleaned = 1usize;
    loop {
        // Dirtiest unvisited vertex outside the current class.
        let mut best_pos = u32::MAX;
        let mut best_class = usize::MAX;
        for (c, stack) in by_class.iter().enumerate() {
            if c != cur {
                if let Some(&pos) = stack.last() {
                    if pos < best_pos {
                        best_pos = pos;
                        best_class = c;
                    }
                }
            }
        }
        if best_class == usize::MAX {
            // Everything unvisited (if anything) sits in the current class;
            // the crawler now bounces out and back, cleaning one per two
            // steps. The vertex it stands on was also cleaned after the
            // complement finished, so it joins the surplus.
            let remaining = by_class[cur].len();
            let mut per_class = vec![0usize; k];
            if remaining == 0 {
                per_class[cur] = 1;
                return (n, per_class);
            }
            per_class[cur] = remaining + 1;
            return (n + remaining, per_class);
        }
        by_class[best_class].pop();
        cleaned += 1;
        cur = best_class;
        debug_assert!(cleaned <= n);
    }
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize, delta: u64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of counts at indices `< len`.
    fn prefix_sum(&self, len: usize) -> u64 {
        let mut i = len.min(self.tree.len() - 1);
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }
}
