//! Graph construction, sampling, edge-list I/O and diagnostics.
//!
//! All graphs are simple, undirected and connected, with vertices `0..n-1`
//! and sorted adjacency lists (the canonical form every constructor
//! enforces). Values are immutable after construction and safe to share
//! across threads.

use std::collections::VecDeque;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex count for which the exact diameter is computed by
/// all-source BFS. Beyond this a flagged lower bound is reported instead.
pub const EXACT_DIAMETER_LIMIT: usize = 10_000;

/// Default number of redraws before `sample_gnp` gives up on finding a
/// connected sample.
pub const DEFAULT_RESAMPLE_CAP: u32 = 100;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex id {id} out of range for n = {n}")]
    VertexOutOfRange { id: u32, n: usize },
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("k-partite spec needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("class sizes must be positive")]
    EmptyClass,
    #[error("edge probability must lie strictly in (0, 1), got {0}")]
    BadProbability(f64),
    #[error("G(n,p) sampling needs n >= 2, got {0}")]
    TooFewVertices(usize),
    #[error("disconnected G(n,p) sample under `fail` policy")]
    DisconnectedSample,
    #[error("resample cap of {0} exceeded without a connected sample")]
    ResampleCapExceeded(u32),
}

/// Simple undirected connected graph in adjacency-list form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Graph {
    /// Builds and validates a graph from an unordered edge set.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::VertexOutOfRange { id: u, n });
            }
            if v as usize >= n {
                return Err(GraphError::VertexOutOfRange { id: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u as u32, w[0]));
            }
        }
        let g = Graph {
            n,
            adjacency,
            edge_count: edges.len(),
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// BFS distances from `source`; `u32::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source as u32);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &self.adjacency[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != u32::MAX)
    }

    /// Serializes to the edge-list text format accepted by [`load_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n {
            for &v in &self.adjacency[u] {
                if (u as u32) < v {
                    out.push_str(&format!("{} {}\n", u, v));
                }
            }
        }
        out
    }

    /// Checks the canonical-form invariants: sorted adjacency, symmetry,
    /// no loops or duplicates, consistent edge count.
    pub fn audit_canonical(&self) -> bool {
        let mut half_edges = 0usize;
        for u in 0..self.n {
            let list = &self.adjacency[u];
            half_edges += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in list {
                if v as usize == u || v as usize >= self.n {
                    return false;
                }
                if self.adjacency[v as usize].binary_search(&(u as u32)).is_err() {
                    return false;
                }
            }
        }
        half_edges == 2 * self.edge_count
    }
}

/// Class sizes `n1 >= n2 >= ... >= nk` of a complete k-partite graph.
///
/// Class `i` (0-based) occupies the contiguous vertex id range
/// `[sizes[..i].sum(), sizes[..=i].sum())`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartiteSpec {
    sizes: Vec<usize>,
}

impl PartiteSpec {
    pub fn new(mut sizes: Vec<usize>) -> Result<Self, GraphError> {
        if sizes.len() < 2 {
            return Err(GraphError::TooFewClasses(sizes.len()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(GraphError::EmptyClass);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PartiteSpec { sizes })
    }

    /// Parses a comma-separated size list such as `"4,1,1"`.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let sizes = text
            .split(',')
            .map(|tok| {
                tok.trim().parse::<usize>().map_err(|e| GraphError::Parse {
                    line: 1,
                    msg: format!("bad class size {:?}: {}", tok, e),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(sizes)
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn class_start(&self, i: usize) -> usize {
        self.sizes[..i].iter().sum()
    }

    pub fn class_range(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.class_start(i);
        start..start + self.sizes[i]
    }

    pub fn class_of(&self, v: usize) -> usize {
        let mut acc = 0;
        for (i, &s) in self.sizes.iter().enumerate() {
            acc += s;
            if v < acc {
                return i;
            }
        }
        panic!("vertex {} out of range for spec of n = {}", v, acc);
    }
}

/// Builds the complete k-partite graph with class-contiguous vertex ids.
pub fn build_kpartite(spec: &PartiteSpec) -> Graph {
    let n = spec.n();
    let mut adjacency = Vec::with_capacity(n);
    for i in 0..spec.k() {
        let range = spec.class_range(i);
        for _ in range.clone() {
            let mut list: Vec<u32> = (0..range.start as u32)
                .chain(range.end as u32..n as u32)
                .collect();
            list.shrink_to_fit();
            adjacency.push(std::mem::take(&mut list));
        }
    }
    let sq_sum: usize = spec.sizes().iter().map(|&s| s * s).sum();
    let edge_count = (n * n - sq_sum) / 2;
    Graph {
        n,
        adjacency,
        edge_count,
    }
}

/// What to do when a G(n,p) draw comes out disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectivityPolicy {
    /// Redraw from the same seeded stream, up to the cap.
    Resample,
    /// Error out immediately.
    Fail,
}

/// A connected G(n,p) sample plus the number of redraws it took.
#[derive(Debug, Clone)]
pub struct GnpSample {
    pub graph: Graph,
    pub resamples: u32,
}

/// Samples G(n,p) in expected O(n + m) time by geometric skips over the
/// lexicographic stream of unordered pairs.
pub fn sample_gnp(
    n: usize,
    p: f64,
    seed: u64,
    policy: ConnectivityPolicy,
) -> Result<GnpSample, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices(n));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(GraphError::BadProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total_pairs = (n as u64) * (n as u64 - 1) / 2;
    let log1mp = (1.0 - p).ln();
    let mut resamples = 0u32;
    loop {
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0usize;
        // Pair index i in 0..total_pairs maps to (u, v) in lexicographic
        // order; u advances monotonically so the row lookup is amortized O(1).
        let mut i = 0u64;
        let mut row = 0u64;
        let mut row_base = 0u64; // index of pair (row, row + 1)
        let mut row_len = (n as u64) - 1;
        while i < total_pairs {
            let u: f64 = rng.gen();
            // Number of absent pairs before the next present one.
            let skip = if u <= 0.0 {
                0
            } else {
                let s = (u.ln() / log1mp).floor();
                if s >= total_pairs as f64 {
                    break;
                }
                s as u64
            };
            i += skip;
            if i >= total_pairs {
                break;
            }
            while i - row_base >= row_len {
                row_base += row_len;
                row += 1;
                row_len -= 1;
            }
            let a = row as u32;
            let b = (row + 1 + (i - row_base)) as u32;
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
            edge_count += 1;
            i += 1;
        }
        let graph = Graph {
            n,
            adjacency,
            edge_count,
        };
        if graph.is_connected() {
            return Ok(GnpSample { graph, resamples });
        }
        match policy {
            ConnectivityPolicy::Fail => return Err(GraphError::DisconnectedSample),
            ConnectivityPolicy::Resample => {
                resamples += 1;
                if resamples > DEFAULT_RESAMPLE_CAP {
                    return Err(GraphError::ResampleCapExceeded(DEFAULT_RESAMPLE_CAP));
                }
            }
        }
    }
}

/// Loads a graph from `"u v"` lines; `#` comments and blank lines ignored.
/// The vertex count is the largest id seen plus one.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    let mut max_id = 0u32;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| GraphError::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u32, GraphError> {
            let tok = tok.ok_or(GraphError::Parse {
                line: lineno,
                msg: "expected two vertex ids".into(),
            })?;
            tok.parse().map_err(|e| GraphError::Parse {
                line: lineno,
                msg: format!("bad vertex id {:?}: {}", tok, e),
            })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(GraphError::Parse {
                line: lineno,
                msg: "trailing tokens after edge".into(),
            });
        }
        max_id = max_id.max(u).max(v);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(GraphError::Empty);
    }
    Graph::from_edges(max_id as usize + 1, &edges)
}

/// Max degree, diameter and connectivity flag of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDiagnostics {
    pub max_degree: usize,
    pub diameter: usize,
    /// Set when the diameter is only a lower bound (n above
    /// [`EXACT_DIAMETER_LIMIT`], estimated by an eccentricity sweep).
    pub diameter_is_lower_bound: bool,
    pub connected: bool,
}

/// Computes max degree and diameter. Exact all-source BFS up to
/// [`EXACT_DIAMETER_LIMIT`] vertices, a flagged double-sweep lower bound
/// beyond that.
pub fn diagnostics(g: &Graph) -> GraphDiagnostics {
    let max_degree = g.max_degree();
    let connected = g.is_connected();
    if !connected {
        return GraphDiagnostics {
            max_degree,
            diameter: 0,
            diameter_is_lower_bound: true,
            connected,
        };
    }
    if g.n() <= EXACT_DIAMETER_LIMIT {
        let diameter = (0..g.n())
            .into_par_iter()
            .map(|s| g.bfs_distances(s).into_iter().max().unwrap() as usize)
            .max()
            .unwrap_or(0);
        GraphDiagnostics {
            max_degree,
            diameter,
            diameter_is_lower_bound: false,
            connected,
        }
    } else {
        // Double sweep: eccentricity from the far end of a BFS is a strong
        // diameter lower bound.
        let d0 = g.bfs_distances(0);
        let far = d0.iter().enumerate().max_by_key(|(_, &d)| d).unwrap().0;
        let ecc = g.bfs_distances(far).into_iter().max().unwrap() as usize;
        GraphDiagnostics {
            max_degree,
            diameter: ecc,
            diameter_is_lower_bound: true,
            connected,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn spec(sizes: &[usize]) -> PartiteSpec {
        PartiteSpec::new(sizes.to_vec()).unwrap()
    }

    #[test]
    fn kpartite_triangle() {
        let g = build_kpartite(&spec(&[1, 1, 1]));
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.audit_canonical());
    }

    #[test]
    fn kpartite_edge_counts() {
        assert_eq!(build_kpartite(&spec(&[3, 3, 1])).edge_count(), 15);
        assert_eq!(build_kpartite(&spec(&[2, 1, 1])).edge_count(), 5);
    }

    #[test]
    fn kpartite_rejects_single_class() {
        assert!(matches!(
            PartiteSpec::new(vec![5]),
            Err(GraphError::TooFewClasses(1))
        ));
    }

    #[test]
    fn spec_sizes_are_sorted_and_classes_contiguous() {
        let s = PartiteSpec::new(vec![1, 3, 2]).unwrap();
        assert_eq!(s.sizes(), &[3, 2, 1]);
        assert_eq!(s.class_range(0), 0..3);
        assert_eq!(s.class_range(1), 3..5);
        assert_eq!(s.class_range(2), 5..6);
        assert_eq!(s.class_of(4), 1);
    }

    #[test]
    fn kpartite_cross_class_edges_only() {
        let s = spec(&[3, 3, 1]);
        let g = build_kpartite(&s);
        for u in 0..g.n() {
            for &v in g.neighbors(u) {
                assert_ne!(s.class_of(u), s.class_of(v as usize));
            }
        }
    }

    #[test]
    fn gnp_forced_edge() {
        let s = sample_gnp(2, 1.0 - 1e-12, 7, ConnectivityPolicy::Fail).unwrap();
        assert_eq!(s.graph.edge_count(), 1);
        assert!(s.graph.is_connected());
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = sample_gnp(100, 0.08, 42, ConnectivityPolicy::Resample).unwrap();
        let b = sample_gnp(100, 0.08, 42, ConnectivityPolicy::Resample).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.resamples, b.resamples);
    }

    #[test]
    fn gnp_mean_degree_near_expectation() {
        let n = 5000;
        let f = 30.0;
        let p = f * (n as f64).ln() / n as f64;
        let s = sample_gnp(n, p, 1, ConnectivityPolicy::Resample).unwrap();
        let mean_deg = 2.0 * s.graph.edge_count() as f64 / n as f64;
        let expect = (n as f64 - 1.0) * p;
        assert!(
            (mean_deg - expect).abs() / expect < 0.05,
            "mean degree {} vs expected {}",
            mean_deg,
            expect
        );
    }

    #[test]
    fn gnp_density_within_four_standard_errors() {
        let n = 200usize;
        let p = 0.1;
        let pairs = (n * (n - 1) / 2) as f64;
        let runs = 200;
        let mut total_edges = 0usize;
        for seed in 0..runs {
            total_edges += sample_gnp(n, p, seed, ConnectivityPolicy::Resample)
                .unwrap()
                .graph
                .edge_count();
        }
        let phat = total_edges as f64 / (pairs * runs as f64);
        let se = (p * (1.0 - p) / (pairs * runs as f64)).sqrt();
        assert!(
            (phat - p).abs() < 4.0 * se,
            "density {} vs {} (se {})",
            phat,
            p,
            se
        );
    }

    #[test]
    fn gnp_fail_policy_on_disconnected() {
        // p tiny: a disconnected draw is essentially certain.
        let r = sample_gnp(50, 1e-9, 3, ConnectivityPolicy::Fail);
        assert!(matches!(r, Err(GraphError::DisconnectedSample)));
    }

    #[test]
    fn edge_list_path() {
        let g = load_edge_list(Cursor::new("0 1\n1 2\n")).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(
            load_edge_list(Cursor::new("0 1\n0 1\n")),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            load_edge_list(Cursor::new("0 1\n2 3\n")),
            Err(GraphError::Disconnected)
        ));
        assert!(matches!(
            load_edge_list(Cursor::new("0 0\n")),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            load_edge_list(Cursor::new("0 x\n")),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn edge_list_comments_and_blanks() {
        let g = load_edge_list(Cursor::new("# path\n\n0 1\n1 2\n")).unwrap();
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = build_kpartite(&spec(&[3, 2, 2]));
        let text = g.to_edge_list();
        let h = load_edge_list(Cursor::new(text)).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn diagnostics_examples() {
        let tri = build_kpartite(&spec(&[1, 1, 1]));
        let d = diagnostics(&tri);
        assert_eq!((d.max_degree, d.diameter), (2, 1));
        assert!(!d.diameter_is_lower_bound);

        let path = load_edge_list(Cursor::new("0 1\n1 2\n")).unwrap();
        let d = diagnostics(&path);
        assert_eq!((d.max_degree, d.diameter), (2, 2));

        let d = diagnostics(&build_kpartite(&spec(&[3, 3, 1])));
        assert_eq!((d.max_degree, d.diameter), (6, 2));
    }
}
