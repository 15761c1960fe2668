use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::optimizers::Horizon;
use crate::schedules::{Schedule, ScheduleKind, DEFAULT_ALPHA, LOW_PRECISION_BIG_BATCH};
use crate::{Error, Result};

/// Where the examples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Path(PathBuf),
    Synthetic {
        n: usize,
        d: usize,
        seed: u64,
        separation: f64,
    },
}

impl DatasetSpec {
    /// Parses `synth:n=1000,d=20,seed=1,sep=1.0` or a file path.
    pub fn parse(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("synth:") else {
            return Ok(DatasetSpec::Path(PathBuf::from(s)));
        };
        let (mut n, mut d, mut seed, mut separation) = (1000usize, 20usize, 1u64, 1.0f64);
        for kv in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in {kv:?}")))?;
            let bad = |_| Error::Config(format!("bad value in {kv:?}"));
            match k.trim() {
                "n" => n = v.trim().parse().map_err(bad)?,
                "d" => d = v.trim().parse().map_err(bad)?,
                "seed" => seed = v.trim().parse().map_err(bad)?,
                "sep" | "separation" => {
                    separation = v.trim().parse().map_err(|_| Error::Config(format!("bad value in {kv:?}")))?
                }
                other => return Err(Error::Config(format!("unknown synthetic key {other:?}"))),
            }
        }
        Ok(DatasetSpec::Synthetic { n, d, seed, separation })
    }

    pub fn name(&self) -> String {
        match self {
            DatasetSpec::Path(p) => p
                .file_name()
                .map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned()),
            DatasetSpec::Synthetic { n, d, seed, separation } => {
                format!("synth(n={n},d={d},seed={seed},sep={separation})")
            }
        }
    }
}

/// One method in the grid, by descriptor name plus optional constants.
///
/// Recognised names: `q-geom-sarah`, `e-geom-sarah`, `nonadaptive-geom-sarah`
/// (needs `big_batch`), `nonadaptive-f-geom-sarah` and
/// `nonadaptive-g-geom-sarah` (need `sigma2`, `mu`, `eps`), `sarah`,
/// `sarah-lp`, `svrg`, `svrg-lp`, `scsg`, `sgd`.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: String,
    /// Text used in the CSV `method` column; defaults to `name`.
    pub label: Option<String>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub c_scsg: Option<f64>,
    pub big_batch: Option<usize>,
    pub sigma2: Option<f64>,
    pub mu: Option<f64>,
    pub eps: Option<f64>,
}

impl MethodSpec {
    pub fn named(name: &str) -> Self {
        MethodSpec {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let targets = || -> Result<(f64, f64, f64)> {
            match (self.sigma2, self.mu, self.eps) {
                (Some(s), Some(m), Some(e)) => Ok((s, m, e)),
                _ => Err(Error::Config(format!("{} needs sigma2, mu and eps", self.name))),
            }
        };
        let mut schedule = match self.name.as_str() {
            "q-geom-sarah" => Schedule::q(),
            "e-geom-sarah" => Schedule::e(self.alpha.unwrap_or(DEFAULT_ALPHA)),
            "nonadaptive-geom-sarah" => Schedule::nonadaptive(
                self.big_batch
                    .ok_or_else(|| Error::Config("nonadaptive-geom-sarah needs big_batch".into()))?,
            ),
            "nonadaptive-f-geom-sarah" => {
                let (sigma2, mu, eps) = targets()?;
                Schedule {
                    kind: ScheduleKind::NonAdaptiveF { sigma2, mu, eps },
                    delta: 0.0,
                }
            }
            "nonadaptive-g-geom-sarah" => {
                let (sigma2, mu, eps) = targets()?;
                Schedule {
                    kind: ScheduleKind::NonAdaptiveG { sigma2, mu, eps },
                    delta: 0.0,
                }
            }
            "sarah" => Schedule {
                kind: ScheduleKind::SarahFull { big_batch: self.big_batch },
                delta: 0.0,
            },
            "sarah-lp" => Schedule {
                kind: ScheduleKind::SarahFull {
                    big_batch: Some(self.big_batch.unwrap_or(LOW_PRECISION_BIG_BATCH)),
                },
                delta: 0.0,
            },
            "svrg" => Schedule {
                kind: ScheduleKind::Svrg { big_batch: self.big_batch },
                delta: 0.0,
            },
            "svrg-lp" => Schedule {
                kind: ScheduleKind::Svrg {
                    big_batch: Some(self.big_batch.unwrap_or(LOW_PRECISION_BIG_BATCH)),
                },
                delta: 0.0,
            },
            "scsg" => Schedule {
                kind: ScheduleKind::Scsg { c: self.c_scsg.unwrap_or(1.0) },
                delta: 0.0,
            },
            "sgd" => Schedule {
                kind: ScheduleKind::Sgd,
                delta: 0.0,
            },
            other => return Err(Error::Config(format!("unknown method {other:?}"))),
        };
        if let Some(delta) = self.delta {
            if schedule.baseline_kind().is_some() && delta != 0.0 {
                return Err(Error::Config(format!("{}: baselines have no tail fraction", self.name)));
            }
            schedule = schedule.with_delta(delta);
        }
        schedule.validate().map_err(|e| Error::Config(format!("{}: {e}", self.name)))?;
        Ok(schedule)
    }
}

/// Stopping rule in user units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HorizonSpec {
    /// Outer epochs `T`.
    Epochs(usize),
    /// Query budget in passes over the data (multiples of `n`).
    Passes(f64),
}

impl HorizonSpec {
    pub fn resolve(&self, n: usize) -> Result<Horizon> {
        match *self {
            HorizonSpec::Epochs(t) if t >= 1 => Ok(Horizon::Epochs(t)),
            HorizonSpec::Passes(p) if p > 0.0 && p.is_finite() => {
                Ok(Horizon::IfoBudget((p * n as f64).ceil() as u64))
            }
            other => Err(Error::Config(format!("invalid horizon {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    /// Pads the feature dimension up to this value.
    pub dim: Option<usize>,
    pub lambda: f64,
    pub methods: Vec<MethodSpec>,
    pub horizon: HorizonSpec,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub emit_plots: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSpec, methods: Vec<MethodSpec>, horizon: HorizonSpec, out_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dataset,
            dim: None,
            lambda: 0.1,
            methods,
            horizon,
            seeds: vec![0],
            out_dir: out_dir.into(),
            emit_plots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be ≥ 0, got {}", self.lambda)));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods given".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("no seeds given".into()));
        }
        match self.horizon {
            HorizonSpec::Epochs(t) if t < 1 => return Err(Error::Config("epochs must be ≥ 1".into())),
            HorizonSpec::Passes(p) if !(p > 0.0) => return Err(Error::Config("budget must be positive".into())),
            _ => {}
        }
        let mut labels = std::collections::HashSet::new();
        for m in &self.methods {
            m.schedule()?;
            if !labels.insert(m.label()) {
                return Err(Error::Config(format!("duplicate method label {:?}", m.label())));
            }
            if m.label().contains([',', '"', '\n']) {
                return Err(Error::Config(format!("method label {:?} may not contain , \" or newline", m.label())));
            }
        }
        Ok(())
    }

    /// Reads the TOML config format described in the README.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.into_config()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    path: Option<PathBuf>,
    synthetic: Option<RawSynth>,
    dim: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSynth {
    n: usize,
    d: usize,
    seed: Option<u64>,
    separation: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dataset: RawDataset,
    lambda: Option<f64>,
    epochs: Option<usize>,
    budget: Option<f64>,
    seeds: Option<Vec<u64>>,
    out_dir: Option<PathBuf>,
    emit_plots: Option<bool>,
    methods: Vec<MethodSpec>,
}

impl RawConfig {
    fn into_config(self) -> Result<ExperimentConfig> {
        let dataset = match (self.dataset.path, self.dataset.synthetic) {
            (Some(p), None) => DatasetSpec::Path(p),
            (None, Some(s)) => DatasetSpec::Synthetic {
                n: s.n,
                d: s.d,
                seed: s.seed.unwrap_or(1),
                separation: s.separation.unwrap_or(1.0),
            },
            _ => return Err(Error::Config("dataset needs exactly one of `path` or `synthetic`".into())),
        };
        let horizon = match (self.epochs, self.budget) {
            (Some(t), None) => HorizonSpec::Epochs(t),
            (None, Some(p)) => HorizonSpec::Passes(p),
            _ => return Err(Error::Config("set exactly one of `epochs` or `budget`".into())),
        };
        let cfg = ExperimentConfig {
            dataset,
            dim: self.dataset.dim,
            lambda: self.lambda.unwrap_or(0.1),
            methods: self.methods,
            horizon,
            seeds: self.seeds.unwrap_or_else(|| vec![0]),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            emit_plots: self.emit_plots.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"
lambda = 0.1
budget = 30.0
seeds = [1, 2, 3]
out_dir = "out"
emit_plots = true

[dataset]
path = "data/mushrooms"
dim = 112

[[methods]]
name = "q-geom-sarah"

[[methods]]
name = "e-geom-sarah"
alpha = 2.0
delta = 0.5

[[methods]]
name = "sarah-lp"
label = "sarah-1024"
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.dataset, DatasetSpec::Path("data/mushrooms".into()));
        assert_eq!(cfg.dim, Some(112));
        assert_eq!(cfg.horizon, HorizonSpec::Passes(30.0));
        assert_eq!(cfg.seeds, vec![1, 2, 3]);
        assert_eq!(cfg.methods.len(), 3);
        assert_eq!(cfg.methods[2].label(), "sarah-1024");
        assert!(cfg.emit_plots);
        assert_eq!(
            cfg.methods[2].schedule().unwrap().kind,
            ScheduleKind::SarahFull { big_batch: Some(1024) }
        );
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "epochs = 3\n[dataset]\nsynthetic = { n = 10, d = 2 }\n";
        assert!(ExperimentConfig::from_toml_str(&format!("{base}[[methods]]\nname = \"q-geom-sarah\"\n")).is_ok());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}[[methods]]\nname = \"nope\"\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}bogus = 1\n[[methods]]\nname = \"sgd\"\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("lambda = -1.0\n{base}[[methods]]\nname = \"sgd\"\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}[[methods]]\nname = \"sgd\"\ndelta = 0.5\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}[[methods]]\nname = \"e-geom-sarah\"\nalpha = 1.0\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!(
            "{base}[[methods]]\nname = \"sgd\"\n[[methods]]\nname = \"sgd\"\n"
        ))
        .is_err());
    }

    #[test]
    fn synthetic_spec_string() {
        assert_eq!(
            DatasetSpec::parse("synth:n=50,d=3,seed=9,sep=2.5").unwrap(),
            DatasetSpec::Synthetic { n: 50, d: 3, seed: 9, separation: 2.5 }
        );
        assert_eq!(DatasetSpec::parse("a/b.libsvm").unwrap(), DatasetSpec::Path("a/b.libsvm".into()));
        assert!(DatasetSpec::parse("synth:n=x").is_err());
        assert!(DatasetSpec::parse("synth:q=1").is_err());
    }

    #[test]
    fn budget_resolves_in_passes() {
        assert_eq!(HorizonSpec::Passes(30.0).resolve(8124).unwrap(), Horizon::IfoBudget(243_720));
        assert_eq!(HorizonSpec::Epochs(5).resolve(10).unwrap(), Horizon::Epochs(5));
        assert!(HorizonSpec::Epochs(0).resolve(10).is_err());
    }
}
