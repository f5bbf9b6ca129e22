use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robot_crawler::crawler::{crawl, jump_numbers, surplus, Weighting};
use robot_crawler::exact::{
    exact_stats, exact_stats_kpartite, ExactStats, DEFAULT_ENUM_LIMIT,
};
use robot_crawler::experiment::{
    run_bridge_experiment, run_er_experiment, run_geom_sum_experiment, run_mc_kpartite,
    BridgeConfig, EngineMode, ErConfig, GeomSumConfig, McConfig, WORKERS_ENV,
};
use robot_crawler::graph::{build_kpartite, load_edge_list, Graph, PartiteSpec};
use robot_crawler::report::{Report, ReportFormat};
use robot_crawler::theory::{predict_max_steps, predict_mean_steps, predict_min_steps, regime};

#[derive(Parser)]
#[command(
    name = "robot-crawler",
    about = "Greedy robot crawler on finite connected graphs: crawls, exact \
             enumeration, closed-form predictions and seeded Monte Carlo.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Complete k-partite class sizes, e.g. 4,1,1
    #[arg(long, value_name = "a,b,c")]
    kpartite: Option<String>,
    /// Edge-list file (one "u v" pair per line, '#' comments allowed)
    #[arg(long, value_name = "FILE", conflicts_with = "kpartite")]
    edges: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Master seed; every sample seed is derived from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: $CRAWLER_WORKERS, else the ambient pool)
    #[arg(long)]
    workers: Option<usize>,
    /// Emit only the summary block, no per-sample rows
    #[arg(long)]
    summary_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one crawl and print its trace as JSON
    Crawl {
        #[command(flatten)]
        graph: GraphArgs,
        /// Initial weighting file (one rank per line); uniform from --seed
        /// when omitted
        #[arg(long, value_name = "FILE")]
        w0: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Enumerate all n! weightings: exact min, max and mean step counts
    Exact {
        #[command(flatten)]
        graph: GraphArgs,
        /// Enumeration size guard; runs with n above this are refused
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        limit: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Monte Carlo crawls of a complete k-partite graph under uniform
    /// weightings
    Mc {
        /// Complete k-partite class sizes, e.g. 4,1,1
        #[arg(long, value_name = "a,b,c", required = true)]
        kpartite: String,
        #[command(flatten)]
        run: RunArgs,
        /// auto | full | class
        #[arg(long, default_value = "auto")]
        engine: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Crawl fresh sparse random graphs G(n, p) with p = f ln(n) / n
    Er {
        #[arg(long, required = true)]
        n: usize,
        #[arg(long, required = true)]
        f: f64,
        #[command(flatten)]
        run: RunArgs,
        /// Ratio band half-width for the frac_within_eps summary line
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Also compute exact diameters and check the (Delta+1)^d step bound
        #[arg(long)]
        diagnostics: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample lattice-bridge record maxima
    Bridge {
        #[arg(long, required = true)]
        n: usize,
        #[arg(long, required = true)]
        n1: usize,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the geometric-sum proxy Y for the ER crawl length
    Geomsum {
        #[arg(long, required = true)]
        n: usize,
        /// Sparsity parameter; sets p = f ln(n) / n
        #[arg(long, conflicts_with = "p")]
        f: Option<f64>,
        /// Explicit per-trial success probability
        #[arg(long)]
        p: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form predictions for a complete k-partite graph as JSON
    Predict {
        /// Complete k-partite class sizes, e.g. 4,1,1
        #[arg(long, value_name = "a,b,c", required = true)]
        kpartite: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn resolve_workers(cli: Option<usize>) -> usize {
    cli.or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
        .unwrap_or(0)
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), AnyError> {
    match out {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => println!("{}", text),
    }
    Ok(())
}

fn load_graph(args: &GraphArgs) -> Result<(Graph, Option<PartiteSpec>), AnyError> {
    match (&args.kpartite, &args.edges) {
        (Some(sizes), None) => {
            let spec = PartiteSpec::parse(sizes)?;
            Ok((build_kpartite(&spec), Some(spec)))
        }
        (None, Some(path)) => {
            let g = load_edge_list(BufReader::new(File::open(path)?))?;
            Ok((g, None))
        }
        _ => Err("pass exactly one of --kpartite and --edges".into()),
    }
}

fn report_exit(report: &Report, format: ReportFormat, out: Option<&PathBuf>, violations: u64)
    -> Result<ExitCode, AnyError>
{
    write_output(out, &report.render(format)?)?;
    if violations == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} violation(s) detected", violations);
        Ok(ExitCode::FAILURE)
    }
}

fn exact_json(stats: &ExactStats) -> serde_json::Value {
    serde_json::json!({
        "rc": stats.min_steps,
        "RC": stats.max_steps,
        "rcbar_num": stats.mean_num,
        "rcbar_den": stats.mean_den,
        "witnesses": {
            "min": stats.min_witness.ranks(),
            "max": stats.max_witness.ranks(),
        },
    })
}

fn run() -> Result<ExitCode, AnyError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Crawl { graph, w0, seed, out } => {
            let (g, spec) = load_graph(&graph)?;
            let w0 = match w0 {
                Some(path) => Weighting::load(BufReader::new(File::open(path)?))?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    Weighting::uniform(g.n(), &mut rng)
                }
            };
            let trace = crawl(&g, &w0, None)?;
            let jumps = jump_numbers(&w0, &trace);
            let surplus_json = match &spec {
                Some(spec) => serde_json::to_value(surplus(&trace, spec)?)?,
                None => serde_json::Value::Null,
            };
            let doc = serde_json::json!({
                "n": g.n(),
                "w0": w0.ranks(),
                "visits": trace.visits,
                "steps": trace.steps,
                "first_clean_time": trace.first_clean_time,
                "surplus": surplus_json,
                "jump_numbers": jumps,
            });
            write_output(out.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact { graph, limit, out } => {
            let stats = match (&graph.kpartite, &graph.edges) {
                (Some(sizes), None) => {
                    // Quotient enumeration: exact over all n! weightings but
                    // only distinct class-label sequences are crawled.
                    exact_stats_kpartite(&PartiteSpec::parse(sizes)?, limit)?
                }
                _ => exact_stats(&load_graph(&graph)?.0, limit)?,
            };
            write_output(out.as_ref(), &serde_json::to_string_pretty(&exact_json(&stats))?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc { kpartite, run, engine, output } => {
            let cfg = McConfig {
                spec: PartiteSpec::parse(&kpartite)?,
                samples: run.samples,
                master_seed: run.seed,
                workers: resolve_workers(run.workers),
                engine: match engine.as_str() {
                    "auto" => EngineMode::Auto,
                    "full" => EngineMode::Full,
                    "class" => EngineMode::ClassSequence,
                    other => return Err(format!("unknown engine {:?}", other).into()),
                },
                keep_rows: !run.summary_only,
            };
            let result = run_mc_kpartite(&cfg)?;
            report_exit(
                &result.to_report(),
                output.format,
                output.out.as_ref(),
                result.violations(),
            )
        }
        Command::Er { n, f, run, eps, diagnostics, output } => {
            if f <= 28.0 {
                eprintln!(
                    "warning: f = {} is at or below 28; the ratio guarantee only \
                     applies for f > 28",
                    f
                );
            }
            let cfg = ErConfig {
                n,
                f,
                samples: run.samples,
                master_seed: run.seed,
                workers: resolve_workers(run.workers),
                eps,
                diagnostics,
                keep_rows: !run.summary_only,
            };
            let result = run_er_experiment(&cfg)?;
            report_exit(
                &result.to_report(),
                output.format,
                output.out.as_ref(),
                result.violations(),
            )
        }
        Command::Bridge { n, n1, run, output } => {
            let cfg = BridgeConfig {
                n,
                n1,
                samples: run.samples,
                master_seed: run.seed,
                workers: resolve_workers(run.workers),
                keep_rows: !run.summary_only,
            };
            let result = run_bridge_experiment(&cfg)?;
            report_exit(&result.to_report(), output.format, output.out.as_ref(), 0)
        }
        Command::Geomsum { n, f, p, run, output } => {
            let cfg = GeomSumConfig {
                n,
                f,
                p,
                samples: run.samples,
                master_seed: run.seed,
                workers: resolve_workers(run.workers),
                keep_rows: !run.summary_only,
            };
            let result = run_geom_sum_experiment(&cfg)?;
            report_exit(&result.to_report(), output.format, output.out.as_ref(), 0)
        }
        Command::Predict { kpartite, out } => {
            let spec = PartiteSpec::parse(&kpartite)?;
            let doc = serde_json::json!({
                "spec": spec,
                "n": spec.n(),
                "regime": regime(&spec),
                "rc": predict_min_steps(&spec)?,
                "RC": predict_max_steps(&spec)?,
                "rcbar": predict_mean_steps(&spec)?,
            });
            write_output(out.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
