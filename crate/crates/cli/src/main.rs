//! `stratdisc`: generate point sets, compute star discrepancies, evaluate the
//! variance and tail-bound formulas, and run sampler comparisons.
//!
//! Exit statuses: 0 success, 1 domain or input error, 2 usage error,
//! 3 resource guard exceeded.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stratdisc::analysis::{
    bernstein_tail_bound, bound_constants, high_prob_discrepancy_bound, union_tail_bound,
    union_tail_bound_ln, variance_comparison,
};
use stratdisc::discrepancy::{
    cover_cardinality_bound, cover_discrepancy_detailed, exact_star_discrepancy_with_guard,
    DeltaCover, DEFAULT_EXACT_GUARD,
};
use stratdisc::experiment::{compare_samplers, compare_samplers_with_threads, ExperimentResult};
use stratdisc::io::{read_config_file, read_points_file, write_points_csv, write_samples_csv};
use stratdisc::samplers::{jittered, simple_random, RandomStream};
use stratdisc::{AnchoredBox, Error, GridPartition};

#[derive(Parser)]
#[command(name = "stratdisc", version, about = "Jittered sampling and star discrepancy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Simple,
    Jittered,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Cover,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set as CSV.
    Generate {
        #[arg(long)]
        d: usize,
        /// Cells per axis; the set has m^d points.
        #[arg(long)]
        m: Option<usize>,
        /// Point count for simple random sampling (defaults to m^d).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "jittered")]
        sampler: SamplerArg,
        #[arg(long, env = "STRATDISC_SEED", default_value_t = 0)]
        seed: u64,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star discrepancy of a CSV point set.
    Discrepancy {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        /// Cover resolution for `--method cover`.
        #[arg(long)]
        delta: Option<f64>,
        /// Largest N^d the exact method accepts.
        #[arg(long, default_value_t = DEFAULT_EXACT_GUARD)]
        guard: f64,
    },
    /// Grid δ-cover size, its bracketing-number bound, and optionally D_Γ.
    Cover {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Stratified and simple count variances for one anchored box.
    Variance {
        /// Cells per axis of the grid.
        #[arg(long)]
        m: usize,
        /// Box corner, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        corner: Vec<f64>,
    },
    /// Evaluate A(d,q,N), the high-probability bound, C0/C1 and tail bounds.
    Bounds {
        #[arg(long)]
        d: usize,
        /// Point count N.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma0: f64,
        /// Deviation λ for the Bernstein and union bounds.
        #[arg(long)]
        lambda: Option<f64>,
        /// Total variance Σ² for the Bernstein and union bounds.
        #[arg(long, default_value_t = 0.0)]
        sigma_sq: f64,
        /// Bernstein range constant C.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Run a replicated sampler comparison from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Per-replication samples CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON; standard output when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Worker threads; does not change results.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("stratdisc: {err}");
            ExitCode::from(match err {
                Error::Resource(_) => 3,
                _ => 1,
            })
        }
    }
}

fn output(path: Option<&PathBuf>) -> stratdisc::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json(value: &Value, path: Option<&PathBuf>) -> stratdisc::Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(command: Command) -> stratdisc::Result<()> {
    match command {
        Command::Generate { d, m, n, sampler, seed, out } => {
            let mut stream = RandomStream::new(seed);
            let points = match (sampler, m) {
                (SamplerArg::Jittered, Some(m)) => jittered(&GridPartition::new(d, m)?, &mut stream),
                (SamplerArg::Jittered, None) => {
                    return Err(Error::Domain("jittered sampling needs --m".into()))
                }
                (SamplerArg::Simple, _) => {
                    let count = match (n, m) {
                        (Some(n), _) => n,
                        (None, Some(m)) => GridPartition::new(d, m)?.cell_count(),
                        (None, None) => return Err(Error::Domain("simple sampling needs --n or --m".into())),
                    };
                    simple_random(count, d, &mut stream)?
                }
            };
            let mut w = output(out.as_ref())?;
            write_points_csv(&mut w, &points)?;
            w.flush()?;
        }
        Command::Discrepancy { points, method, delta, guard } => {
            let points = read_points_file(points)?;
            let value = match method {
                MethodArg::Exact => {
                    let r = exact_star_discrepancy_with_guard(&points, guard)?;
                    json!({ "value": r.value, "witness": r.witness, "side": r.side, "method": "exact" })
                }
                MethodArg::Cover => {
                    let delta = delta.ok_or_else(|| Error::Domain("--method cover needs --delta".into()))?;
                    let cover = DeltaCover::new(points.dim(), delta)?;
                    let r = cover_discrepancy_detailed(&points, &cover)?;
                    json!({
                        "value": r.value,
                        "witness": r.witness,
                        "side": r.side,
                        "method": "cover",
                        "delta": cover.delta(),
                        "upper": r.value + cover.delta(),
                    })
                }
            };
            emit_json(&value, None)?;
        }
        Command::Cover { d, delta, points } => {
            let cover = DeltaCover::new(d, delta)?;
            let mut value = json!({
                "d": d,
                "delta": delta,
                "resolution": cover.resolution(),
                "size": cover.size(),
                "cardinality_bound": cover_cardinality_bound(d, delta)?,
            });
            if let Some(path) = points {
                let r = cover_discrepancy_detailed(&read_points_file(path)?, &cover)?;
                value["discrepancy"] = json!({ "value": r.value, "witness": r.witness, "side": r.side });
            }
            emit_json(&value, None)?;
        }
        Command::Variance { m, corner } => {
            let partition = GridPartition::new(corner.len(), m)?;
            let bx = AnchoredBox::new(corner)?;
            let v = variance_comparison(&partition, &bx)?;
            emit_json(
                &json!({
                    "d": partition.dim(),
                    "m": m,
                    "N": partition.cell_count(),
                    "corner": bx.corner(),
                    "var_stratified": v.var_stratified,
                    "var_simple": v.var_simple,
                    "gap": v.gap,
                }),
                None,
            )?;
        }
        Command::Bounds { d, n, q, sigma0, lambda, sigma_sq, c } => {
            let hp = high_prob_discrepancy_bound(d, q, n, sigma0)?;
            let k = bound_constants(d, n, sigma0)?;
            let mut value = json!({
                "d": d,
                "N": n,
                "q": q,
                "sigma0": sigma0,
                "A": hp.a,
                "bound": hp.simplified,
                "bound_sharp": hp.sharp,
                "C0": k.c0,
                "C1": k.c1,
                "threshold": k.threshold(q),
            });
            if let Some(lambda) = lambda {
                value["lambda"] = json!(lambda);
                value["sigma_sq"] = json!(sigma_sq);
                value["bernstein"] = json!(bernstein_tail_bound(sigma_sq, c, lambda)?);
                value["union"] = json!(union_tail_bound(d, n, sigma_sq, lambda)?);
                value["union_ln"] = json!(union_tail_bound_ln(d, n, sigma_sq, lambda)?);
            }
            emit_json(&value, None)?;
        }
        Command::Experiment { config, out, summary, threads } => {
            let config = read_config_file(config)?;
            let result = match threads {
                Some(t) => compare_samplers_with_threads(&config, t)?,
                None => compare_samplers(&config)?,
            };
            if let Some(path) = out.as_ref() {
                let mut w = BufWriter::new(File::create(path)?);
                write_samples_csv(&mut w, &result)?;
                w.flush()?;
            }
            emit_json(&summary_json(&result), summary.as_ref())?;
        }
    }
    Ok(())
}

fn summary_json(result: &ExperimentResult) -> Value {
    let samplers: Vec<Value> = result
        .runs
        .iter()
        .map(|r| {
            json!({
                "sampler": r.sampler,
                "slot": r.slot,
                "count": r.summary.count,
                "mean": r.summary.mean,
                "std_dev": r.summary.std_dev,
                "std_error": r.summary.std_error,
                "tail_integral": r.tail_integral,
            })
        })
        .collect();
    let mut value = json!({
        "config": result.config,
        "method": result.method,
        "delta": result.delta,
        "generator": result.generator,
        "samplers": samplers,
        "runtime_seconds": result.runtime_seconds,
    });
    if let (Some(w), Some(verdict)) = (result.difference, result.verdict) {
        value["difference"] = json!(w.difference);
        value["std_error"] = json!(w.std_error);
        value["confidence"] = json!(w.confidence);
        value["ci"] = json!([w.ci_low, w.ci_high]);
        value["t_statistic"] = json!(w.t_statistic);
        value["degrees_of_freedom"] = json!(w.degrees_of_freedom);
        value["p_value"] = json!(w.p_value);
        value["verdict"] = json!(verdict);
    }
    value
}
