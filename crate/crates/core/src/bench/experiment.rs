use super::config::{DatasetSpec, ExperimentConfig};
use super::plot::{emit_plot, Metric};
use super::table::{emit_csv, ResultRow, ResultTable};
use crate::data::{load_libsvm, synth_logistic, SparseDataset};
use crate::objective::LogisticNcvx;
use crate::optimizers::{run_method, RunTrace};
use crate::par::{self, ExecMode};
use crate::Result;

pub fn load_dataset(spec: &DatasetSpec, dim: Option<usize>) -> Result<SparseDataset> {
    let ds = match spec {
        DatasetSpec::Path(p) => load_libsvm(p)?,
        DatasetSpec::Synthetic { n, d, seed, separation } => synth_logistic(*n, *d, *seed, *separation)?,
    };
    Ok(match dim {
        Some(d) => ds.with_min_dim(d),
        None => ds,
    })
}

/// Epoch-0 row followed by one row per finished epoch.
pub fn trace_rows(method: &str, trace: &RunTrace) -> Vec<ResultRow> {
    let n = trace.n as f64;
    let mut rows = Vec::with_capacity(trace.records.len() + 1);
    rows.push(ResultRow {
        method: method.to_string(),
        seed: trace.seed,
        epoch: 0,
        ifo_cumulative: 0,
        epochs_equivalent: 0.0,
        f_value: trace.initial_f,
        grad_norm_sq: trace.initial_grad_norm_sq,
    });
    rows.extend(trace.records.iter().map(|r| ResultRow {
        method: method.to_string(),
        seed: trace.seed,
        epoch: r.epoch,
        ifo_cumulative: r.ifo_cumulative,
        epochs_equivalent: r.ifo_cumulative as f64 / n,
        f_value: r.f_value,
        grad_norm_sq: r.grad_norm_sq,
    }));
    rows
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    run_experiment_with(cfg, ExecMode::default())
}

/// Runs every (method, seed) pair from `x0 = 0` and writes
/// `out_dir/results.csv` (plus SVG plots if requested).
pub fn run_experiment_with(cfg: &ExperimentConfig, mode: ExecMode) -> Result<ResultTable> {
    cfg.validate()?;
    let ds = load_dataset(&cfg.dataset, cfg.dim)?;
    let obj = LogisticNcvx::new(ds, cfg.lambda)?;
    let horizon = cfg.horizon.resolve(obj.dataset().n())?;
    let x0 = vec![0.0; obj.dataset().d()];

    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let jobs: Vec<(usize, u64)> = (0..cfg.methods.len())
        .flat_map(|m| seeds.iter().map(move |&s| (m, s)))
        .collect();

    let results = par::map_slice(mode, &jobs, |&(m, seed)| -> Result<Vec<ResultRow>> {
        let method = &cfg.methods[m];
        let trace = run_method(&obj, &method.schedule()?, horizon, &x0, seed)?;
        Ok(trace_rows(method.label(), &trace))
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let table = ResultTable { rows };

    emit_csv(&table, &cfg.out_dir.join("results.csv"))?;
    if cfg.emit_plots {
        emit_plot(&table, Metric::FValue, &cfg.out_dir.join("f_value.svg"))?;
        emit_plot(&table, Metric::GradNormSq, &cfg.out_dir.join("grad_norm_sq.svg"))?;
    }
    Ok(table)
}
