//! Exact minimum / maximum / average step counts by complete enumeration
//! over all `n!` initial weightings, and the proof-constructive extremal
//! weightings for complete k-partite graphs.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crawler::{crawl, crawl_kpartite_labels, Weighting};
use crate::graph::{Graph, PartiteSpec};

/// Default vertex-count limit for full enumeration (9! crawls is desk-scale).
pub const DEFAULT_ENUM_LIMIT: usize = 9;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("n = {n} exceeds the enumeration limit {limit} (pass an explicit override to proceed)")]
    LimitExceeded { n: usize, limit: usize },
    #[error("theory constructions require k >= 3, got {0}")]
    TooFewClasses(usize),
    #[error("no feasible class alternation for sizes {0:?}")]
    InfeasibleAlternation(Vec<usize>),
    #[error(transparent)]
    Crawl(#[from] crate::crawler::CrawlError),
}

/// Exhaustive statistics over all `n!` weightings of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactStats {
    /// Minimum step count over all weightings.
    pub min_steps: usize,
    /// Maximum step count over all weightings.
    pub max_steps: usize,
    /// Exact mean step count as a reduced rational.
    pub mean_num: u64,
    pub mean_den: u64,
    /// Lexicographically-first weightings attaining the extremes.
    pub min_witness: Weighting,
    pub max_witness: Weighting,
}

impl ExactStats {
    pub fn mean(&self) -> Ratio<u64> {
        Ratio::new(self.mean_num, self.mean_den)
    }
}

/// Enumerates every weighting of `g` (as dirtiest-first vertex orders in
/// lexicographic order), crawling each one. Blocks sharing a first vertex
/// run concurrently; the merge is order-independent because sums are exact
/// integers and witnesses are resolved lexicographically.
pub fn exact_stats(g: &Graph, limit: usize) -> Result<ExactStats, ExactError> {
    let n = g.n();
    if n > limit {
        return Err(ExactError::LimitExceeded { n, limit });
    }
    struct Block {
        min: (usize, Vec<u32>),
        max: (usize, Vec<u32>),
        sum: u64,
        count: u64,
    }
    let blocks: Vec<Block> = (0..n as u32)
        .into_par_iter()
        .map(|first| {
            let mut tail: Vec<u32> = (0..n as u32).filter(|&v| v != first).collect();
            let mut order = Vec::with_capacity(n);
            let mut min: Option<(usize, Vec<u32>)> = None;
            let mut max: Option<(usize, Vec<u32>)> = None;
            let mut sum = 0u64;
            let mut count = 0u64;
            loop {
                order.clear();
                order.push(first);
                order.extend_from_slice(&tail);
                let w0 = Weighting::from_vertex_order(&order);
                let t = crawl(g, &w0, None).expect("crawl cannot fail on a valid graph").steps;
                sum += t as u64;
                count += 1;
                if min.as_ref().map_or(true, |(m, _)| t < *m) {
                    min = Some((t, order.clone()));
                }
                if max.as_ref().map_or(true, |(m, _)| t > *m) {
                    max = Some((t, order.clone()));
                }
                if !next_permutation(&mut tail) {
                    break;
                }
            }
            Block {
                min: min.unwrap(),
                max: max.unwrap(),
                sum,
                count,
            }
        })
        .collect();
    let mut min: Option<(usize, Vec<u32>)> = None;
    let mut max: Option<(usize, Vec<u32>)> = None;
    let mut sum = 0u64;
    let mut count = 0u64;
    for b in blocks {
        // Blocks arrive in first-vertex order, so strict improvement keeps
        // the lexicographically-first witness.
        if min.as_ref().map_or(true, |(m, _)| b.min.0 < *m) {
            min = Some(b.min);
        }
        if max.as_ref().map_or(true, |(m, _)| b.max.0 > *m) {
            max = Some(b.max);
        }
        sum += b.sum;
        count += b.count;
    }
    let (min_steps, min_order) = min.unwrap();
    let (max_steps, max_order) = max.unwrap();
    let mean = Ratio::new(sum, count);
    Ok(ExactStats {
        min_steps,
        max_steps,
        mean_num: *mean.numer(),
        mean_den: *mean.denom(),
        min_witness: Weighting::from_vertex_order(&min_order),
        max_witness: Weighting::from_vertex_order(&max_order),
    })
}

/// Quotiented enumeration for complete k-partite graphs: weightings that
/// agree up to within-class relabelling produce the same step count, so it
/// suffices to enumerate distinct class-label sequences (each standing for
/// `prod(n_i!)` weightings). Validated against [`exact_stats`] in tests.
pub fn exact_stats_kpartite(spec: &PartiteSpec, limit: usize) -> Result<ExactStats, ExactError> {
    let n = spec.n();
    if n > limit {
        return Err(ExactError::LimitExceeded { n, limit });
    }
    let mut labels: Vec<u8> = (0..spec.k())
        .flat_map(|c| std::iter::repeat(c as u8).take(spec.sizes()[c]))
        .collect();
    labels.sort_unstable();
    let mut min: Option<(usize, Vec<u8>)> = None;
    let mut max: Option<(usize, Vec<u8>)> = None;
    let mut sum = 0u64;
    let mut count = 0u64;
    loop {
        let (t, _) = crawl_kpartite_labels(spec, &labels);
        sum += t as u64;
        count += 1;
        if min.as_ref().map_or(true, |(m, _)| t < *m) {
            min = Some((t, labels.clone()));
        }
        if max.as_ref().map_or(true, |(m, _)| t > *m) {
            max = Some((t, labels.clone()));
        }
        if !next_permutation(&mut labels) {
            break;
        }
    }
    let (min_steps, min_labels) = min.unwrap();
    let (max_steps, max_labels) = max.unwrap();
    let mean = Ratio::new(sum, count);
    Ok(ExactStats {
        min_steps,
        max_steps,
        mean_num: *mean.numer(),
        mean_den: *mean.denom(),
        min_witness: weighting_from_labels(spec, &min_labels),
        max_witness: weighting_from_labels(spec, &max_labels),
    })
}

/// Realizes a dirt-order label sequence as a concrete weighting by handing
/// out each class's vertex ids in ascending order.
pub fn weighting_from_labels(spec: &PartiteSpec, labels: &[u8]) -> Weighting {
    let mut next: Vec<usize> = (0..spec.k()).map(|c| spec.class_start(c)).collect();
    let order: Vec<u32> = labels
        .iter()
        .map(|&c| {
            let v = next[c as usize];
            next[c as usize] += 1;
            v as u32
        })
        .collect();
    Weighting::from_vertex_order(&order)
}

/// Weighting attaining the minimum step count on a complete k-partite graph.
///
/// For a largest class of at most half the vertices this alternates classes
/// along the dirt order so the crawl is a Hamiltonian path; otherwise the
/// largest class takes the dirtiest block and the crawl oscillates.
pub fn optimal_weighting_kpartite(spec: &PartiteSpec) -> Result<Weighting, ExactError> {
    if spec.k() < 3 {
        return Err(ExactError::TooFewClasses(spec.k()));
    }
    let n = spec.n();
    let n1 = spec.sizes()[0];
    let labels = if 2 * n1 <= n {
        alternating_labels(spec.sizes())?
    } else {
        let mut l: Vec<u8> = std::iter::repeat(0u8).take(n1).collect();
        for c in 1..spec.k() {
            l.extend(std::iter::repeat(c as u8).take(spec.sizes()[c]));
        }
        l
    };
    Ok(weighting_from_labels(spec, &labels))
}

/// Weighting attaining the maximum step count on a complete k-partite graph.
///
/// When the second class is small the largest class takes the cleanest block
/// and the rest is cleaned along a Hamiltonian path, maximizing the surplus;
/// otherwise the second class takes the dirtiest block and the largest the
/// cleanest.
pub fn worst_weighting_kpartite(spec: &PartiteSpec) -> Result<Weighting, ExactError> {
    if spec.k() < 3 {
        return Err(ExactError::TooFewClasses(spec.k()));
    }
    let n = spec.n();
    let sizes = spec.sizes();
    let (n1, n2) = (sizes[0], sizes[1]);
    let labels = if 2 * n2 <= n - n1 {
        // Residual classes 2..k alternate, then the largest class, cleanest.
        let residual: Vec<usize> = sizes[1..].to_vec();
        let mut l: Vec<u8> = alternating_labels(&residual)?
            .into_iter()
            .map(|c| c + 1)
            .collect();
        l.extend(std::iter::repeat(0u8).take(n1));
        l
    } else {
        let mut l: Vec<u8> = std::iter::repeat(1u8).take(n2).collect();
        for c in 2..spec.k() {
            l.extend(std::iter::repeat(c as u8).take(sizes[c]));
        }
        l.extend(std::iter::repeat(0u8).take(n1));
        l
    };
    Ok(weighting_from_labels(spec, &labels))
}

/// Greedy class alternation: repeatedly take from the largest remaining
/// class other than the previous one. Succeeds whenever the largest class
/// is at most half (rounded up) of the total.
fn alternating_labels(sizes: &[usize]) -> Result<Vec<u8>, ExactError> {
    let total: usize = sizes.iter().sum();
    let mut remaining = sizes.to_vec();
    let mut out = Vec::with_capacity(total);
    let mut prev = usize::MAX;
    for _ in 0..total {
        let pick = remaining
            .iter()
            .enumerate()
            .filter(|&(c, &r)| c != prev && r > 0)
            .max_by_key(|&(_, &r)| r)
            .map(|(c, _)| c)
            .ok_or_else(|| ExactError::InfeasibleAlternation(sizes.to_vec()))?;
        remaining[pick] -= 1;
        out.push(pick as u8);
        prev = pick;
    }
    Ok(out)
}

/// Standard in-place next lexicographic permutation; false once exhausted.
fn next_permutation<T: Ord>(arr: &mut [T]) -> bool {
    if arr.len() < 2 {
        return false;
    }
    let mut i = arr.len() - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = arr.len() - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_kpartite;
    use crate::theory::{predict_max_steps, predict_min_steps};

    fn spec(sizes: &[usize]) -> PartiteSpec {
        PartiteSpec::new(sizes.to_vec()).unwrap()
    }

    #[test]
    fn exact_411() {
        let s = spec(&[4, 1, 1]);
        let stats = exact_stats(&build_kpartite(&s), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(stats.min_steps, 7);
        assert_eq!(stats.max_steps, 9);
    }

    #[test]
    fn exact_221() {
        let s = spec(&[2, 2, 1]);
        let stats = exact_stats(&build_kpartite(&s), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(stats.min_steps, 5);
        assert_eq!(stats.max_steps, 6);
    }

    #[test]
    fn exact_222_mean_is_bracketed() {
        let s = spec(&[2, 2, 2]);
        let stats = exact_stats(&build_kpartite(&s), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(stats.min_steps, 6);
        assert_eq!(stats.max_steps, 7);
        assert_eq!(720 % stats.mean_den, 0); // denominator divides 6!
        let mean = stats.mean();
        assert!(mean >= Ratio::new(6, 1) && mean <= Ratio::new(7, 1));
    }

    #[test]
    fn limit_is_enforced() {
        let s = spec(&[5, 4, 1]);
        assert!(matches!(
            exact_stats(&build_kpartite(&s), 9),
            Err(ExactError::LimitExceeded { n: 10, limit: 9 })
        ));
    }

    #[test]
    fn witnesses_reproduce_extremes() {
        for sizes in [vec![4usize, 1, 1], vec![2, 2, 1], vec![2, 2, 2], vec![3, 2, 1]] {
            let s = spec(&sizes);
            let g = build_kpartite(&s);
            let stats = exact_stats(&g, DEFAULT_ENUM_LIMIT).unwrap();
            assert_eq!(crawl(&g, &stats.min_witness, None).unwrap().steps, stats.min_steps);
            assert_eq!(crawl(&g, &stats.max_witness, None).unwrap().steps, stats.max_steps);
        }
    }

    #[test]
    fn quotient_agrees_with_plain_enumeration() {
        for sizes in [vec![2usize, 1, 1], vec![2, 2, 1], vec![3, 2, 1], vec![2, 2, 2], vec![3, 3, 1]] {
            let s = spec(&sizes);
            let plain = exact_stats(&build_kpartite(&s), DEFAULT_ENUM_LIMIT).unwrap();
            let quot = exact_stats_kpartite(&s, DEFAULT_ENUM_LIMIT).unwrap();
            assert_eq!(plain.min_steps, quot.min_steps, "sizes {:?}", sizes);
            assert_eq!(plain.max_steps, quot.max_steps, "sizes {:?}", sizes);
            assert_eq!(
                (plain.mean_num, plain.mean_den),
                (quot.mean_num, quot.mean_den),
                "sizes {:?}",
                sizes
            );
        }
    }

    #[test]
    fn constructive_weightings_hit_predictions() {
        for sizes in [
            vec![2usize, 2, 2],
            vec![4, 1, 1],
            vec![1, 1, 1],
            vec![2, 2, 1],
            vec![3, 3, 1],
            vec![4, 2, 2],
        ] {
            let s = spec(&sizes);
            let g = build_kpartite(&s);
            let best = optimal_weighting_kpartite(&s).unwrap();
            assert_eq!(
                crawl(&g, &best, None).unwrap().steps,
                predict_min_steps(&s).unwrap(),
                "optimal on {:?}",
                sizes
            );
            let worst = worst_weighting_kpartite(&s).unwrap();
            assert_eq!(
                crawl(&g, &worst, None).unwrap().steps,
                predict_max_steps(&s).unwrap(),
                "worst on {:?}",
                sizes
            );
        }
    }

    #[test]
    fn constructions_require_three_classes() {
        let s = spec(&[2, 2]);
        assert!(matches!(
            optimal_weighting_kpartite(&s),
            Err(ExactError::TooFewClasses(2))
        ));
        assert!(matches!(
            worst_weighting_kpartite(&s),
            Err(ExactError::TooFewClasses(2))
        ));
    }

    #[test]
    fn next_permutation_visits_all() {
        let mut v = vec![0u8, 1, 2];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 6);
        let mut m = vec![0u8, 0, 1];
        let mut count = 1;
        while next_permutation(&mut m) {
            count += 1;
        }
        assert_eq!(count, 3);
    }
}
