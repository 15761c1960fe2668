use std::io::Write;
use std::path::Path;

use crate::numfmt::g17;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "method,seed,epoch,ifo_cumulative,epochs_equivalent,f_value,grad_norm_sq";

/// One trace point of one (method, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub seed: u64,
    pub epoch: usize,
    pub ifo_cumulative: u64,
    /// `ifo_cumulative / n`.
    pub epochs_equivalent: f64,
    pub f_value: f64,
    pub grad_norm_sq: f64,
}

/// Rows grouped by method (in configuration order), then seed, then epoch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct method labels in order of first appearance.
    pub fn methods(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method.as_str()) {
                out.push(&r.method);
            }
        }
        out
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.method,
                r.seed,
                r.epoch,
                r.ifo_cumulative,
                g17(r.epochs_equivalent),
                g17(r.f_value),
                g17(r.grad_norm_sq)
            ));
        }
        s
    }
}

/// Writes `rt` as CSV; creates parent directories as needed.
pub fn emit_csv(rt: &ResultTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(rt.to_csv_string().as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<ResultTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {CSV_HEADER:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", fields.len())));
        }
        let real = |k: usize| -> Result<f64> {
            fields[k]
                .parse::<f64>()
                .map_err(|_| err(format!("bad number {:?}", fields[k])))
        };
        rows.push(ResultRow {
            method: fields[0].to_string(),
            seed: fields[1].parse().map_err(|_| err(format!("bad seed {:?}", fields[1])))?,
            epoch: fields[2].parse().map_err(|_| err(format!("bad epoch {:?}", fields[2])))?,
            ifo_cumulative: fields[3]
                .parse()
                .map_err(|_| err(format!("bad ifo count {:?}", fields[3])))?,
            epochs_equivalent: real(4)?,
            f_value: real(5)?,
            grad_norm_sq: real(6)?,
        });
    }
    Ok(ResultTable { rows })
}

pub fn read_csv(path: &Path) -> Result<ResultTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}
