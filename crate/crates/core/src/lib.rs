//! Greedy robot crawler process on finite connected graphs.
//!
//! The crawler starts at the dirtiest vertex of an initially ranked graph and
//! always moves to the dirtiest neighbour of its current position, stamping
//! each visited vertex with the current time. This crate provides:
//!
//! - graph construction and sampling ([`graph`]): complete k-partite graphs,
//!   sparse Erdős–Rényi samples, edge-list I/O, degree/diameter diagnostics
//! - the deterministic crawl itself ([`crawler`]) together with the per-class
//!   surplus decomposition and jump-number instrumentation
//! - exact minimum / maximum / average step counts by full enumeration over
//!   all `n!` initial rankings, plus constructive extremal rankings ([`exact`])
//! - closed-form predictors and the lattice-bridge machinery behind them
//!   ([`theory`])
//! - a seeded, parallel Monte Carlo harness with machine-readable reports
//!   ([`experiment`], [`report`])

pub mod crawler;
pub mod exact;
pub mod experiment;
pub mod graph;
pub mod report;
pub mod theory;

pub use crawler::{crawl, CrawlTrace, SurplusReport, Weighting};
pub use graph::{build_kpartite, sample_gnp, ConnectivityPolicy, Graph, GraphDiagnostics, PartiteSpec};
