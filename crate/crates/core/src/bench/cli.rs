use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{DatasetSpec, ExperimentConfig, HorizonSpec, MethodSpec};
use super::experiment::run_experiment_with;
use super::plot::{emit_plot, Metric};
use super::selftest::run_self_tests;
use super::table::{read_csv, ResultTable};
use crate::par::ExecMode;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "geom-sarah", version, about = "Geom-SARAH and baselines on logistic regression benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a method × seed grid and write results.csv.
    Run(RunArgs),
    /// Run the built-in statistical and numerical self-tests.
    Check,
    /// Render an SVG convergence plot from a results CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML experiment file; other flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// LibSVM file, or `synth:n=..,d=..,seed=..,sep=..`.
    #[arg(long)]
    data: Option<String>,
    /// Method name; repeat or separate with commas.
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Outer epochs T.
    #[arg(long, conflicts_with = "budget")]
    epochs: Option<usize>,
    /// Query budget in passes over the data.
    #[arg(long)]
    budget: Option<f64>,
    /// Seed; repeat or separate with commas.
    #[arg(long = "seed", value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Tail fraction for the Geom-SARAH methods given with --method.
    #[arg(long)]
    delta: Option<f64>,
    /// Growth base for e-geom-sarah.
    #[arg(long)]
    alpha: Option<f64>,
    /// Big-batch constant for scsg.
    #[arg(long = "c-scsg")]
    c_scsg: Option<f64>,
    /// Big batch for nonadaptive-geom-sarah and the sarah/svrg variants.
    #[arg(long = "big-batch")]
    big_batch: Option<usize>,
    /// Pad the feature dimension to at least this value.
    #[arg(long)]
    dim: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write f_value.svg and grad_norm_sq.svg.
    #[arg(long)]
    plots: bool,
    /// Run the grid on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// results.csv written by `run`.
    #[arg(long)]
    input: PathBuf,
    /// `f_value` or `grad_norm_sq`.
    #[arg(long, default_value = "grad_norm_sq")]
    metric: String,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

fn method_from_flags(name: &str, a: &RunArgs) -> MethodSpec {
    let geom = name.contains("geom-sarah");
    MethodSpec {
        name: name.to_string(),
        delta: if geom { a.delta } else { None },
        alpha: if name == "e-geom-sarah" { a.alpha } else { None },
        c_scsg: if name == "scsg" { a.c_scsg } else { None },
        big_batch: match name {
            "nonadaptive-geom-sarah" | "sarah" | "sarah-lp" | "svrg" | "svrg-lp" => a.big_batch,
            _ => None,
        },
        ..MethodSpec::default()
    }
}

fn build_config(a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => {
            let data = a
                .data
                .as_deref()
                .ok_or_else(|| Error::Config("either --config or --data is required".into()))?;
            let horizon = match (a.epochs, a.budget) {
                (Some(t), None) => HorizonSpec::Epochs(t),
                (None, Some(p)) => HorizonSpec::Passes(p),
                _ => return Err(Error::Config("one of --epochs or --budget is required".into())),
            };
            if a.methods.is_empty() {
                return Err(Error::Config("at least one --method is required".into()));
            }
            ExperimentConfig::new(DatasetSpec::parse(data)?, Vec::new(), horizon, "out")
        }
    };
    if a.config.is_some() {
        if let Some(data) = &a.data {
            cfg.dataset = DatasetSpec::parse(data)?;
        }
        if let Some(t) = a.epochs {
            cfg.horizon = HorizonSpec::Epochs(t);
        }
        if let Some(p) = a.budget {
            cfg.horizon = HorizonSpec::Passes(p);
        }
    }
    if !a.methods.is_empty() {
        cfg.methods = a.methods.iter().map(|m| method_from_flags(m.trim(), a)).collect();
    }
    if let Some(l) = a.lambda {
        cfg.lambda = l;
    }
    if !a.seeds.is_empty() {
        cfg.seeds = a.seeds.clone();
    }
    if let Some(out) = &a.out {
        cfg.out_dir = out.clone();
    }
    if a.dim.is_some() {
        cfg.dim = a.dim;
    }
    cfg.emit_plots |= a.plots;
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(rt: &ResultTable) {
    for m in rt.methods() {
        let rows: Vec<_> = rt.rows.iter().filter(|r| r.method == m).collect();
        let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
        seeds.dedup();
        let finals: Vec<_> = seeds
            .iter()
            .filter_map(|s| rows.iter().rev().find(|r| r.seed == *s))
            .collect();
        let k = finals.len() as f64;
        let g = finals.iter().map(|r| r.grad_norm_sq).sum::<f64>() / k;
        let f = finals.iter().map(|r| r.f_value).sum::<f64>() / k;
        let e = finals.iter().map(|r| r.epochs_equivalent).sum::<f64>() / k;
        println!("{m:<28} passes {e:>9.3}  f {f:.6e}  |grad|^2 {g:.6e}");
    }
}

fn run(a: RunArgs) -> Result<()> {
    let cfg = build_config(&a)?;
    let mode = if a.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::default()
    };
    let rt = run_experiment_with(&cfg, mode)?;
    summarize(&rt);
    println!("wrote {}", cfg.out_dir.join("results.csv").display());
    Ok(())
}

fn check() -> bool {
    let outcomes = run_self_tests();
    let passed = outcomes.iter().filter(|c| c.pass).count();
    for c in &outcomes {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{passed}/{} checks passed", outcomes.len());
    passed == outcomes.len()
}

fn plot(a: PlotArgs) -> Result<()> {
    let metric =
        Metric::parse(&a.metric).ok_or_else(|| Error::Config(format!("unknown metric {:?}", a.metric)))?;
    let rt = read_csv(&a.input)?;
    emit_plot(&rt, metric, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Returns 0 on success, 1 for usage and configuration errors, 2 for runtime
/// failures such as I/O errors or a diverged run.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Check => return if check() { 0 } else { 1 },
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                1
            } else {
                2
            }
        }
    }
}
