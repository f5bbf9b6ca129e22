//! Closed-form predictors and the lattice-path machinery behind them:
//! bridge paths over the dirt order, their records, exact record
//! distributions, tail and expectation bounds, and the geometric-sum
//! variable driving the sparse random-graph prediction.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::crawler::Weighting;
use crate::graph::PartiteSpec;

/// Cap on the number of paths `enumerate_bridge_record_dist` will walk.
pub const ENUM_PATH_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("class fraction must lie strictly in (0, 1/2), got {0}")]
    FractionNotSubcritical(Ratio<u64>),
    #[error("theory predictors require k >= 3, got {0}")]
    TooFewClasses(usize),
    #[error("enumeration of C({n}, {n1}) paths exceeds the cap of {cap}")]
    EnumerationTooLarge { n: usize, n1: usize, cap: u64 },
    #[error("up-step count {n1} exceeds path length {n}")]
    BadStepCount { n: usize, n1: usize },
    #[error("probability must lie strictly in (0, 1), got {0}")]
    BadProbability(f64),
}

/// A ±1-increment lattice path with fixed endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgePath {
    steps: Vec<i8>,
}

impl BridgePath {
    pub fn from_steps(steps: Vec<i8>) -> Self {
        assert!(steps.iter().all(|&s| s == 1 || s == -1));
        BridgePath { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    /// Prefix sums X(0..n).
    pub fn positions(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut x = 0i64;
        out.push(x);
        for &s in &self.steps {
            x += s as i64;
            out.push(x);
        }
        out
    }

    pub fn endpoint(&self) -> i64 {
        self.steps.iter().map(|&s| s as i64).sum()
    }

    /// Running maximum of the path (at least 0 since X(0) = 0).
    pub fn record(&self) -> i64 {
        let mut x = 0i64;
        let mut m = 0i64;
        for &s in &self.steps {
            x += s as i64;
            m = m.max(x);
        }
        m
    }

    /// Time reversal re-anchored at the origin: steps reversed and negated.
    /// Its record relates to this path's by
    /// `record(self) = endpoint(self) + record(self.reversed())`.
    pub fn reversed(&self) -> BridgePath {
        BridgePath {
            steps: self.steps.iter().rev().map(|&s| -s).collect(),
        }
    }
}

/// Record of one bridge path together with the class that generated it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordStats {
    pub record: i64,
    pub class_id: usize,
}

/// The bridge of class `i` under a weighting: step `t` is +1 exactly when
/// the `t`-th cleanest vertex lies in class `i`.
pub fn bridge_from_weighting(w0: &Weighting, spec: &PartiteSpec, class: usize) -> BridgePath {
    let labels = w0.class_labels(spec);
    bridge_from_labels(&labels, class)
}

/// Same as [`bridge_from_weighting`] but starting from dirt-order class
/// labels (entry 0 dirtiest).
pub fn bridge_from_labels(labels: &[u8], class: usize) -> BridgePath {
    let n = labels.len();
    let steps = (1..=n)
        .map(|t| if labels[n - t] as usize == class { 1 } else { -1 })
        .collect();
    BridgePath { steps }
}

/// Record of class `i`'s bridge computed without materializing the path.
pub fn record_from_labels(labels: &[u8], class: usize) -> i64 {
    let n = labels.len();
    let mut x = 0i64;
    let mut m = 0i64;
    for t in 1..=n {
        x += if labels[n - t] as usize == class { 1 } else { -1 };
        m = m.max(x);
    }
    m
}

/// Uniform sample over all `C(n, n1)` placements of the up-steps, which is
/// exactly the conditioned-walk bridge law.
pub fn sample_bridge<R: Rng>(n: usize, n1: usize, rng: &mut R) -> BridgePath {
    assert!(n1 <= n);
    let mut steps: Vec<i8> = std::iter::repeat(1i8)
        .take(n1)
        .chain(std::iter::repeat(-1i8).take(n - n1))
        .collect();
    steps.shuffle(rng);
    BridgePath { steps }
}

/// Exact record distribution by complete enumeration of every up-step
/// placement (Gosper's hack over bitmasks). The oracle for the sampler.
pub fn enumerate_bridge_record_dist(
    n: usize,
    n1: usize,
) -> Result<BTreeMap<i64, Ratio<u64>>, TheoryError> {
    if n1 > n {
        return Err(TheoryError::BadStepCount { n, n1 });
    }
    let total = binomial(n, n1).ok_or(TheoryError::EnumerationTooLarge {
        n,
        n1,
        cap: ENUM_PATH_CAP,
    })?;
    if total > ENUM_PATH_CAP || n >= 63 {
        return Err(TheoryError::EnumerationTooLarge {
            n,
            n1,
            cap: ENUM_PATH_CAP,
        });
    }
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for mask in up_step_masks(n, n1) {
        let mut x = 0i64;
        let mut m = 0i64;
        for bit in 0..n {
            x += if mask >> bit & 1 == 1 { 1 } else { -1 };
            m = m.max(x);
        }
        *counts.entry(m).or_insert(0) += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(m, c)| (m, Ratio::new(c, total)))
        .collect())
}

/// All n-bit masks with exactly n1 bits set, ascending (Gosper's hack).
fn up_step_masks(n: usize, n1: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let mut mask = if n1 == 0 { 0 } else { (1u64 << n1) - 1 };
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = mask;
        if n1 == 0 || mask == 0 {
            done = true;
            return Some(out);
        }
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ out) >> 2) / c) | r;
        if mask >= limit {
            done = true;
        }
        Some(out)
    })
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Tail of the unconditioned negative-drift walk's running maximum:
/// `h_j = (c / (1 - c))^j`, exact in rational arithmetic. Requires c < 1/2.
pub fn record_tail_h(c: Ratio<u64>, j: u32) -> Result<BigRational, TheoryError> {
    if c >= Ratio::new(1, 2) || c.is_zero() {
        return Err(TheoryError::FractionNotSubcritical(c));
    }
    let num = BigInt::from(*c.numer());
    let den = BigInt::from(*c.denom() - *c.numer());
    Ok(BigRational::new(num.pow(j), den.pow(j)))
}

/// How a record expectation value is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// A true upper bound for every n.
    UpperBound,
    /// Asymptotic equality as n grows, not a finite-n bound.
    AsymptoticEquality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordBound {
    pub value: f64,
    pub kind: BoundKind,
}

/// Expected bridge record: an n-free bound below criticality, a drift term
/// plus constant above it, and the asymptotic `sqrt(pi n / 8)` exactly at
/// c = 1/2.
pub fn expected_record_bound(c: Ratio<u64>, n: usize) -> RecordBound {
    let half = Ratio::new(1u64, 2u64);
    let cf = *c.numer() as f64 / *c.denom() as f64;
    if c < half {
        RecordBound {
            value: 2.0 * cf / (1.0 - 2.0 * cf),
            kind: BoundKind::UpperBound,
        }
    } else if c > half {
        RecordBound {
            value: 2.0 * cf * n as f64 - n as f64 + 2.0 * (1.0 - cf) / (2.0 * cf - 1.0),
            kind: BoundKind::UpperBound,
        }
    } else {
        RecordBound {
            value: (std::f64::consts::PI * n as f64 / 8.0).sqrt(),
            kind: BoundKind::AsymptoticEquality,
        }
    }
}

/// Size regime of the largest class, decided in exact rational arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Largest class strictly below half the vertices.
    Subcritical,
    /// Exactly half.
    Critical,
    /// Strictly above half.
    Supercritical,
}

pub fn regime(spec: &PartiteSpec) -> Regime {
    let n1 = spec.sizes()[0];
    let n = spec.n();
    match (2 * n1).cmp(&n) {
        std::cmp::Ordering::Less => Regime::Subcritical,
        std::cmp::Ordering::Equal => Regime::Critical,
        std::cmp::Ordering::Greater => Regime::Supercritical,
    }
}

/// Minimum crawl steps over all weightings of the complete k-partite graph.
pub fn predict_min_steps(spec: &PartiteSpec) -> Result<usize, TheoryError> {
    require_three_classes(spec)?;
    let n = spec.n();
    let n1 = spec.sizes()[0];
    Ok(if 2 * n1 <= n { n } else { 2 * n1 - 1 })
}

/// Maximum crawl steps over all weightings of the complete k-partite graph.
pub fn predict_max_steps(spec: &PartiteSpec) -> Result<usize, TheoryError> {
    require_three_classes(spec)?;
    let n = spec.n();
    let (n1, n2) = (spec.sizes()[0], spec.sizes()[1]);
    Ok(if 2 * n2 <= n - n1 {
        n + n1 - 1
    } else {
        2 * (n - n2)
    })
}

/// Leading term and correction for the mean crawl steps under a uniform
/// weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub regime: Regime,
    pub leading_term: f64,
    pub correction: f64,
    pub correction_kind: BoundKind,
}

pub fn predict_mean_steps(spec: &PartiteSpec) -> Result<TheoryPrediction, TheoryError> {
    require_three_classes(spec)?;
    let n = spec.n();
    let nf = n as f64;
    Ok(match regime(spec) {
        Regime::Subcritical => {
            let correction: f64 = spec
                .sizes()
                .iter()
                .map(|&ni| {
                    let c = ni as f64 / nf;
                    2.0 * c / (1.0 - 2.0 * c)
                })
                .sum();
            TheoryPrediction {
                regime: Regime::Subcritical,
                leading_term: nf,
                correction,
                correction_kind: BoundKind::UpperBound,
            }
        }
        Regime::Critical => TheoryPrediction {
            regime: Regime::Critical,
            leading_term: nf,
            correction: (std::f64::consts::PI * nf / 8.0).sqrt(),
            correction_kind: BoundKind::AsymptoticEquality,
        },
        Regime::Supercritical => {
            let c1 = spec.sizes()[0] as f64 / nf;
            TheoryPrediction {
                regime: Regime::Supercritical,
                leading_term: 2.0 * spec.sizes()[0] as f64,
                correction: 2.0 * (1.0 - c1) / (2.0 * c1 - 1.0),
                correction_kind: BoundKind::UpperBound,
            }
        }
    })
}

fn require_three_classes(spec: &PartiteSpec) -> Result<(), TheoryError> {
    if spec.k() < 3 {
        Err(TheoryError::TooFewClasses(spec.k()))
    } else {
        Ok(())
    }
}

/// Geometric sample with support {1, 2, ...} and success probability `q`,
/// by inverse transform. Exact distribution, no rejection loop.
pub fn sample_geometric<R: Rng>(q: f64, rng: &mut R) -> u64 {
    debug_assert!(q > 0.0 && q <= 1.0);
    if q >= 1.0 {
        return 1;
    }
    let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
    let x = (u.ln() / (1.0 - q).ln()).ceil();
    if x < 1.0 {
        1
    } else {
        x as u64
    }
}

/// The geometric-sum variable: `floor(n/7)` independent geometrics with
/// success probabilities `1 - (1-p)^i`.
pub fn sample_geom_sum_y<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<u64, TheoryError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(TheoryError::BadProbability(p));
    }
    let terms = n / 7;
    let mut sum = 0u64;
    for i in 1..=terms {
        let fail = (1.0 - p).powi(i as i32);
        let q = 1.0 - fail;
        sum += if q >= 1.0 { 1 } else { sample_geometric(q, rng) };
    }
    Ok(sum)
}

/// Exact mean of the geometric-sum variable, `sum_i 1 / (1 - (1-p)^i)`.
pub fn geom_sum_exact_mean(n: usize, p: f64) -> f64 {
    (1..=n / 7)
        .map(|i| 1.0 / (1.0 - (1.0 - p).powi(i as i32)))
        .sum()
}

/// First-order prediction for crawl steps on a sparse random graph with
/// `p = f ln(n) / n`: simply `n + n/f`. The theory assumes f > 28.
pub fn predict_er_steps(n: usize, f: f64) -> f64 {
    n as f64 + n as f64 / f
}

/// Probability `p = f ln(n) / n` used throughout the sparse regime.
pub fn er_probability(n: usize, f: f64) -> f64 {
    f * (n as f64).ln() / n as f64
}
