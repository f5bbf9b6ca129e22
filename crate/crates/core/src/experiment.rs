//! Seeded, parallel experiment orchestration with machine-readable reports.
//!
//! Every sample gets its own counter-derived seed, so a run is fully
//! determined by `(config, master_seed)` regardless of worker count or
//! scheduling. Summaries accumulate exact integer sums and divide once at
//! the end, keeping the reduction order immaterial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crawler::{
    step_bound, crawl, crawl_kpartite_labels, jump_numbers, surplus, Weighting,
};
use crate::graph::{
    build_kpartite, diagnostics, sample_gnp, ConnectivityPolicy, GraphError, PartiteSpec,
};
use crate::report::{fmt_f64, Report, SCHEMA_VERSION};
use crate::theory::{
    er_probability, predict_er_steps, predict_max_steps, predict_mean_steps, predict_min_steps,
    record_from_labels, sample_geom_sum_y, TheoryError,
};

/// Environment variable giving the default worker count.
pub const WORKERS_ENV: &str = "CRAWLER_WORKERS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Crawl(#[from] crate::crawler::CrawlError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("config: {0}")]
    Config(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Counter-based per-sample seed derivation (splitmix64 finalizer): cheap,
/// coordination-free and collision-free over any realistic run length.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn with_pool<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, ExperimentError> {
    if workers == 0 {
        Ok(f())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ExperimentError::Pool(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// Exact-integer accumulator for a series of non-negative integers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Series {
    pub sum: u128,
    pub sum_sq: u128,
    pub min: u64,
    pub max: u64,
    pub count: u64,
}

impl Series {
    pub fn push(&mut self, v: u64) {
        if self.count == 0 {
            self.min = v;
            self.max = v;
        } else {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
        self.sum += v as u128;
        self.sum_sq += (v as u128) * (v as u128);
        self.count += 1;
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn sample_std(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = (self.sum_sq as f64 - n * mean * mean) / (n - 1.0);
        var.max(0.0).sqrt()
    }

    /// Normal-approximation 95% confidence halfwidth for the mean.
    pub fn ci95_halfwidth(&self) -> f64 {
        1.96 * self.sample_std() / (self.count as f64).sqrt()
    }
}

/// Which crawl implementation the k-partite Monte Carlo uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EngineMode {
    /// Per-vertex engine below [`ENGINE_AUTO_THRESHOLD`] vertices, class
    /// sequence above.
    Auto,
    /// Always the per-vertex engine (builds the graph).
    Full,
    /// Always the class-sequence fast path (no graph in memory).
    ClassSequence,
}

/// Above this vertex count `EngineMode::Auto` switches to the class-sequence
/// crawl, whose per-sample cost is O(nk) instead of O(n * degree).
pub const ENGINE_AUTO_THRESHOLD: usize = 512;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McConfig {
    pub spec: PartiteSpec,
    pub samples: u64,
    pub master_seed: u64,
    /// 0 means "use the ambient rayon pool". Excluded from the config
    /// echo: worker count never affects results.
    #[serde(skip)]
    pub workers: usize,
    pub engine: EngineMode,
    pub keep_rows: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSample {
    pub steps: u64,
    pub per_class_surplus: Vec<usize>,
    pub per_class_record: Vec<i64>,
    pub identity_holds: bool,
    pub domination_holds: bool,
}

#[derive(Debug, Clone)]
pub struct McOutput {
    pub config: McConfig,
    pub rows: Vec<(u64, u64, McSample)>, // (sample id, seed, result)
    pub steps: Series,
    pub surplus_total: Series,
    pub record_sums: Vec<u128>,
    pub identity_violations: u64,
    pub domination_violations: u64,
}

fn mc_one_sample(spec: &PartiteSpec, graph: Option<&crate::graph::Graph>, seed: u64) -> McSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n();
    let k = spec.k();
    let (steps, per_class_surplus, labels) = match graph {
        Some(g) => {
            let w0 = Weighting::uniform(n, &mut rng);
            let trace = crawl(g, &w0, None).expect("crawl on valid graph");
            let rep = surplus(&trace, spec).expect("layout matches");
            (trace.steps, rep.per_class, w0.class_labels(spec))
        }
        None => {
            // Uniform weighting reduced to its class-label sequence.
            let mut labels: Vec<u8> = (0..k)
                .flat_map(|c| std::iter::repeat(c as u8).take(spec.sizes()[c]))
                .collect();
            use rand::seq::SliceRandom;
            labels.shuffle(&mut rng);
            let (steps, per_class) = crawl_kpartite_labels(spec, &labels);
            (steps, per_class, labels)
        }
    };
    let per_class_record: Vec<i64> = (0..k).map(|c| record_from_labels(&labels, c)).collect();
    let total = per_class_surplus.iter().copied().max().unwrap_or(0);
    let identity_holds = steps == n + total - 1;
    let domination_holds = per_class_surplus
        .iter()
        .zip(&per_class_record)
        .all(|(&s, &m)| s as i64 <= m);
    McSample {
        steps: steps as u64,
        per_class_surplus,
        per_class_record,
        identity_holds,
        domination_holds,
    }
}

pub fn run_mc_kpartite(cfg: &McConfig) -> Result<McOutput, ExperimentError> {
    if cfg.samples == 0 {
        return Err(ExperimentError::Config("samples must be >= 1".into()));
    }
    let spec = cfg.spec.clone();
    let n = spec.n();
    let graph = match cfg.engine {
        EngineMode::Full => Some(build_kpartite(&spec)),
        EngineMode::ClassSequence => None,
        EngineMode::Auto => (n <= ENGINE_AUTO_THRESHOLD).then(|| build_kpartite(&spec)),
    };
    let results: Vec<(u64, u64, McSample)> = with_pool(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.master_seed, i);
                (i, seed, mc_one_sample(&spec, graph.as_ref(), seed))
            })
            .collect()
    })?;
    let mut steps = Series::default();
    let mut surplus_total = Series::default();
    let mut record_sums = vec![0u128; spec.k()];
    let mut identity_violations = 0u64;
    let mut domination_violations = 0u64;
    for (_, _, s) in &results {
        steps.push(s.steps);
        surplus_total.push(s.per_class_surplus.iter().copied().max().unwrap_or(0) as u64);
        for (c, &m) in s.per_class_record.iter().enumerate() {
            record_sums[c] += m as u128;
        }
        if !s.identity_holds {
            identity_violations += 1;
        }
        if !s.domination_holds {
            domination_violations += 1;
        }
    }
    Ok(McOutput {
        rows: if cfg.keep_rows { results } else { Vec::new() },
        config: cfg.clone(),
        steps,
        surplus_total,
        record_sums,
        identity_violations,
        domination_violations,
    })
}

impl McOutput {
    pub fn violations(&self) -> u64 {
        self.identity_violations + self.domination_violations
    }

    pub fn mean_record(&self, class: usize) -> f64 {
        self.record_sums[class] as f64 / self.steps.count as f64
    }

    pub fn to_report(&self) -> Report {
        let spec = &self.config.spec;
        let k = spec.k();
        let mut columns = vec!["sample".to_string(), "seed".to_string(), "steps".to_string()];
        for c in 0..k {
            columns.push(format!("surplus_{}", c));
        }
        for c in 0..k {
            columns.push(format!("record_{}", c));
        }
        columns.push("ratio_to_leading".to_string());
        let leading = predict_mean_steps(spec).map(|p| p.leading_term).ok();
        let rows = self
            .rows
            .iter()
            .map(|(i, seed, s)| {
                let mut row = vec![i.to_string(), seed.to_string(), s.steps.to_string()];
                row.extend(s.per_class_surplus.iter().map(|v| v.to_string()));
                row.extend(s.per_class_record.iter().map(|v| v.to_string()));
                row.push(match leading {
                    Some(l) => fmt_f64(s.steps as f64 / l),
                    None => String::new(),
                });
                row
            })
            .collect();
        let mut summary = vec![
            ("n".into(), spec.n().to_string()),
            ("k".into(), k.to_string()),
            ("samples".into(), self.steps.count.to_string()),
            ("mean_steps".into(), fmt_f64(self.steps.mean())),
            ("std_steps".into(), fmt_f64(self.steps.sample_std())),
            ("ci95_halfwidth".into(), fmt_f64(self.steps.ci95_halfwidth())),
            ("min_steps".into(), self.steps.min.to_string()),
            ("max_steps".into(), self.steps.max.to_string()),
            ("mean_surplus".into(), fmt_f64(self.surplus_total.mean())),
        ];
        for c in 0..k {
            summary.push((format!("mean_record_{}", c), fmt_f64(self.mean_record(c))));
        }
        if spec.k() >= 3 {
            if let (Ok(rc), Ok(max), Ok(mean)) = (
                predict_min_steps(spec),
                predict_max_steps(spec),
                predict_mean_steps(spec),
            ) {
                summary.push(("predicted_min_steps".into(), rc.to_string()));
                summary.push(("predicted_max_steps".into(), max.to_string()));
                summary.push(("predicted_mean_leading".into(), fmt_f64(mean.leading_term)));
                summary.push(("predicted_mean_correction".into(), fmt_f64(mean.correction)));
            }
        }
        summary.push((
            "identity_violations".into(),
            self.identity_violations.to_string(),
        ));
        summary.push(("domination_violations".into(), self.domination_violations.to_string()));
        Report {
            schema_version: SCHEMA_VERSION,
            kind: "mc".into(),
            config: serde_json::to_value(&self.config).expect("config serializes"),
            columns,
            rows,
            summary,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErConfig {
    pub n: usize,
    pub f: f64,
    pub samples: u64,
    pub master_seed: u64,
    #[serde(skip)]
    pub workers: usize,
    /// Ratio band half-width used for the `frac_within_eps` summary line.
    pub eps: f64,
    /// Compute per-sample degree/diameter diagnostics and check the step
    /// bound (exact diameter is expensive: all-source BFS).
    pub diagnostics: bool,
    pub keep_rows: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErSample {
    pub steps: u64,
    pub ratio: f64,
    pub resamples: u32,
    pub max_degree: usize,
    pub diameter: Option<usize>,
    pub bound: Option<u64>,
    pub bound_holds: Option<bool>,
    pub max_jump: u64,
}

#[derive(Debug, Clone)]
pub struct ErOutput {
    pub config: ErConfig,
    pub p: f64,
    pub predicted_steps: f64,
    pub rows: Vec<(u64, u64, ErSample)>,
    pub steps: Series,
    pub ratio_sum: f64,
    pub abs_dev_sum: f64,
    pub within_eps: u64,
    pub resamples_total: u64,
    pub bound_checks: u64,
    pub bound_violations: u64,
    pub max_jump: u64,
}

fn er_one_sample(cfg: &ErConfig, p: f64, seed: u64) -> Result<ErSample, ExperimentError> {
    let graph_seed = derive_seed(seed, 0);
    let w_seed = derive_seed(seed, 1);
    let sample = sample_gnp(cfg.n, p, graph_seed, ConnectivityPolicy::Resample)?;
    let g = &sample.graph;
    let mut rng = ChaCha8Rng::seed_from_u64(w_seed);
    let w0 = Weighting::uniform(cfg.n, &mut rng);
    let trace = crawl(g, &w0, None)?;
    let ratio = trace.steps as f64 / predict_er_steps(cfg.n, cfg.f);
    let max_jump = jump_numbers(&w0, &trace).into_iter().max().unwrap_or(0);
    let (diameter, bound, bound_holds, max_degree) = if cfg.diagnostics {
        let d = diagnostics(g);
        let b = step_bound(&d, cfg.n).ok();
        let holds = b.map(|b| trace.steps as u64 <= b);
        (
            (!d.diameter_is_lower_bound).then_some(d.diameter),
            b,
            holds,
            d.max_degree,
        )
    } else {
        (None, None, None, g.max_degree())
    };
    Ok(ErSample {
        steps: trace.steps as u64,
        ratio,
        resamples: sample.resamples,
        max_degree,
        diameter,
        bound,
        bound_holds,
        max_jump,
    })
}

pub fn run_er_experiment(cfg: &ErConfig) -> Result<ErOutput, ExperimentError> {
    if cfg.samples == 0 {
        return Err(ExperimentError::Config("samples must be >= 1".into()));
    }
    let p = er_probability(cfg.n, cfg.f);
    if !(p > 0.0 && p < 1.0) {
        return Err(ExperimentError::Config(format!(
            "derived p = {} out of range; pick larger n or smaller f",
            p
        )));
    }
    let results: Vec<(u64, u64, Result<ErSample, ExperimentError>)> =
        with_pool(cfg.workers, || {
            (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    let seed = derive_seed(cfg.master_seed, i);
                    (i, seed, er_one_sample(cfg, p, seed))
                })
                .collect()
        })?;
    let mut rows = Vec::new();
    let mut steps = Series::default();
    let mut ratio_sum = 0.0;
    let mut abs_dev_sum = 0.0;
    let mut within_eps = 0u64;
    let mut resamples_total = 0u64;
    let mut bound_checks = 0u64;
    let mut bound_violations = 0u64;
    let mut max_jump = 0u64;
    for (i, seed, r) in results {
        let s = r?;
        steps.push(s.steps);
        ratio_sum += s.ratio;
        abs_dev_sum += (s.ratio - 1.0).abs();
        if (s.ratio - 1.0).abs() <= cfg.eps {
            within_eps += 1;
        }
        resamples_total += s.resamples as u64;
        if let Some(holds) = s.bound_holds {
            bound_checks += 1;
            if !holds {
                bound_violations += 1;
            }
        }
        max_jump = max_jump.max(s.max_jump);
        if cfg.keep_rows {
            rows.push((i, seed, s));
        }
    }
    Ok(ErOutput {
        config: cfg.clone(),
        p,
        predicted_steps: predict_er_steps(cfg.n, cfg.f),
        rows,
        steps,
        ratio_sum,
        abs_dev_sum,
        within_eps,
        resamples_total,
        bound_checks,
        bound_violations,
        max_jump,
    })
}

impl ErOutput {
    pub fn violations(&self) -> u64 {
        self.bound_violations
    }

    pub fn mean_ratio(&self) -> f64 {
        self.ratio_sum / self.steps.count as f64
    }

    pub fn mean_abs_dev(&self) -> f64 {
        self.abs_dev_sum / self.steps.count as f64
    }

    pub fn to_report(&self) -> Report {
        let columns: Vec<String> = [
            "sample",
            "seed",
            "steps",
            "ratio",
            "resamples",
            "max_degree",
            "diameter",
            "bound",
            "bound_holds",
            "max_jump",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let rows = self
            .rows
            .iter()
            .map(|(i, seed, s)| {
                vec![
                    i.to_string(),
                    seed.to_string(),
                    s.steps.to_string(),
                    fmt_f64(s.ratio),
                    s.resamples.to_string(),
                    s.max_degree.to_string(),
                    s.diameter.map(|d| d.to_string()).unwrap_or_default(),
                    s.bound.map(|b| b.to_string()).unwrap_or_default(),
                    s.bound_holds.map(|b| b.to_string()).unwrap_or_default(),
                    s.max_jump.to_string(),
                ]
            })
            .collect();
        let summary = vec![
            ("n".into(), self.config.n.to_string()),
            ("f".into(), fmt_f64(self.config.f)),
            ("p".into(), fmt_f64(self.p)),
            ("samples".into(), self.steps.count.to_string()),
            ("predicted_steps".into(), fmt_f64(self.predicted_steps)),
            ("mean_steps".into(), fmt_f64(self.steps.mean())),
            ("std_steps".into(), fmt_f64(self.steps.sample_std())),
            ("min_steps".into(), self.steps.min.to_string()),
            ("max_steps".into(), self.steps.max.to_string()),
            ("mean_ratio".into(), fmt_f64(self.mean_ratio())),
            ("mean_abs_dev".into(), fmt_f64(self.mean_abs_dev())),
            ("eps".into(), fmt_f64(self.config.eps)),
            ("frac_within_eps".into(), fmt_f64(self.within_eps as f64 / self.steps.count as f64)),
            ("resamples_total".into(), self.resamples_total.to_string()),
            ("bound_checks".into(), self.bound_checks.to_string()),
            ("bound_violations".into(), self.bound_violations.to_string()),
            ("max_jump".into(), self.max_jump.to_string()),
        ];
        Report {
            schema_version: SCHEMA_VERSION,
            kind: "er".into(),
            config: serde_json::to_value(&self.config).expect("config serializes"),
            columns,
            rows,
            summary,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BridgeConfig {
    pub n: usize,
    pub n1: usize,
    pub samples: u64,
    pub master_seed: u64,
    #[serde(skip)]
    pub workers: usize,
    pub keep_rows: bool,
}

#[derive(Debug, Clone)]
pub struct BridgeOutput {
    pub config: BridgeConfig,
    pub rows: Vec<(u64, u64, i64)>,
    pub record: Series,
}

pub fn run_bridge_experiment(cfg: &BridgeConfig) -> Result<BridgeOutput, ExperimentError> {
    if cfg.samples == 0 {
        return Err(ExperimentError::Config("samples must be >= 1".into()));
    }
    if cfg.n1 > cfg.n {
        return Err(ExperimentError::Config(format!(
            "n1 = {} exceeds n = {}",
            cfg.n1, cfg.n
        )));
    }
    let results: Vec<(u64, u64, i64)> = with_pool(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.master_seed, i);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = crate::theory::sample_bridge(cfg.n, cfg.n1, &mut rng).record();
                (i, seed, m)
            })
            .collect()
    })?;
    let mut record = Series::default();
    for &(_, _, m) in &results {
        record.push(m as u64);
    }
    Ok(BridgeOutput {
        rows: if cfg.keep_rows { results } else { Vec::new() },
        config: cfg.clone(),
        record,
    })
}

impl BridgeOutput {
    pub fn to_report(&self) -> Report {
        let columns = vec!["sample".to_string(), "seed".to_string(), "record".to_string()];
        let rows = self
            .rows
            .iter()
            .map(|(i, seed, m)| vec![i.to_string(), seed.to_string(), m.to_string()])
            .collect();
        let mut summary = vec![
            ("n".into(), self.config.n.to_string()),
            ("n1".into(), self.config.n1.to_string()),
            ("samples".into(), self.record.count.to_string()),
            ("mean_record".into(), fmt_f64(self.record.mean())),
            ("std_record".into(), fmt_f64(self.record.sample_std())),
            ("ci95_halfwidth".into(), fmt_f64(self.record.ci95_halfwidth())),
            ("min_record".into(), self.record.min.to_string()),
            ("max_record".into(), self.record.max.to_string()),
        ];
        if 2 * self.config.n1 == self.config.n {
            let asym = (std::f64::consts::PI * self.config.n as f64 / 8.0).sqrt();
            summary.push(("critical_asymptote".into(), fmt_f64(asym)));
        }
        Report {
            schema_version: SCHEMA_VERSION,
            kind: "bridge".into(),
            config: serde_json::to_value(&self.config).expect("config serializes"),
            columns,
            rows,
            summary,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeomSumConfig {
    pub n: usize,
    /// Sparsity parameter; sets `p = f ln(n) / n` when given.
    pub f: Option<f64>,
    /// Explicit success probability; exactly one of `f`, `p` must be set.
    pub p: Option<f64>,
    pub samples: u64,
    pub master_seed: u64,
    #[serde(skip)]
    pub workers: usize,
    pub keep_rows: bool,
}

#[derive(Debug, Clone)]
pub struct GeomSumOutput {
    pub config: GeomSumConfig,
    pub p: f64,
    pub rows: Vec<(u64, u64, u64)>,
    pub y: Series,
    pub exact_mean: f64,
    /// `n/7 + n/f` when `f` was given.
    pub center: Option<f64>,
    /// Samples with `|Y - center| > 0.1 * center`.
    pub outside_band: Option<u64>,
}

pub fn run_geom_sum_experiment(cfg: &GeomSumConfig) -> Result<GeomSumOutput, ExperimentError> {
    if cfg.samples == 0 {
        return Err(ExperimentError::Config("samples must be >= 1".into()));
    }
    let p = match (cfg.f, cfg.p) {
        (Some(f), None) => er_probability(cfg.n, f),
        (None, Some(p)) => p,
        _ => {
            return Err(ExperimentError::Config(
                "exactly one of f and p must be given".into(),
            ))
        }
    };
    if !(p > 0.0 && p < 1.0) {
        return Err(ExperimentError::Config(format!("p = {} out of range", p)));
    }
    let results: Vec<(u64, u64, u64)> = with_pool(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.master_seed, i);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let y = sample_geom_sum_y(cfg.n, p, &mut rng).expect("p validated");
                (i, seed, y)
            })
            .collect()
    })?;
    let mut y = Series::default();
    for &(_, _, v) in &results {
        y.push(v);
    }
    let center = cfg.f.map(|f| cfg.n as f64 / 7.0 + cfg.n as f64 / f);
    let outside_band = center.map(|c| {
        results
            .iter()
            .filter(|&&(_, _, v)| (v as f64 - c).abs() > 0.1 * c)
            .count() as u64
    });
    Ok(GeomSumOutput {
        rows: if cfg.keep_rows { results } else { Vec::new() },
        config: cfg.clone(),
        p,
        y,
        exact_mean: crate::theory::geom_sum_exact_mean(cfg.n, p),
        center,
        outside_band,
    })
}

impl GeomSumOutput {
    pub fn to_report(&self) -> Report {
        let columns = vec!["sample".to_string(), "seed".to_string(), "y".to_string()];
        let rows = self
            .rows
            .iter()
            .map(|(i, seed, y)| vec![i.to_string(), seed.to_string(), y.to_string()])
            .collect();
        let mut summary = vec![
            ("n".into(), self.config.n.to_string()),
            ("p".into(), fmt_f64(self.p)),
            ("samples".into(), self.y.count.to_string()),
            ("mean_y".into(), fmt_f64(self.y.mean())),
            ("std_y".into(), fmt_f64(self.y.sample_std())),
            ("ci95_halfwidth".into(), fmt_f64(self.y.ci95_halfwidth())),
            ("exact_mean".into(), fmt_f64(self.exact_mean)),
        ];
        if let Some(c) = self.center {
            summary.push(("center".into(), fmt_f64(c)));
        }
        if let Some(o) = self.outside_band {
            summary.push(("outside_band".into(), o.to_string()));
            summary.push((
                "frac_outside_band".into(),
                fmt_f64(o as f64 / self.y.count as f64),
            ));
        }
        Report {
            schema_version: SCHEMA_VERSION,
            kind: "geomsum".into(),
            config: serde_json::to_value(&self.config).expect("config serializes"),
            columns,
            rows,
            summary,
        }
    }
}
