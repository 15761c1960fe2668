//! Sparse binary-classification datasets.
//!
//! Rows are stored in CSR layout with 0-based, strictly increasing feature
//! indices. Labels are always `-1.0` or `+1.0`.

use std::io::BufRead;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::numfmt::g17;
use crate::random::RngStream;
use crate::{Error, Result};

/// Immutable sparse feature matrix with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    d: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    labels: Vec<f64>,
}

impl SparseDataset {
    /// Builds a dataset from per-row `(feature, value)` lists, checking every
    /// invariant.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, labels: Vec<f64>, d: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("dataset must have at least one example"));
        }
        if d == 0 {
            return Err(Error::invalid("feature dimension must be at least 1"));
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(y) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::invalid(format!("label {y} is not ±1")));
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (r, row) in rows.into_iter().enumerate() {
            let mut prev: Option<usize> = None;
            for (j, v) in row {
                if j >= d {
                    return Err(Error::invalid(format!("row {r}: feature {j} ≥ d = {d}")));
                }
                if prev.is_some_and(|p| j <= p) {
                    return Err(Error::invalid(format!("row {r}: indices not strictly increasing")));
                }
                if !v.is_finite() {
                    return Err(Error::invalid(format!("row {r}: non-finite value")));
                }
                prev = Some(j);
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Ok(SparseDataset {
            d,
            indptr,
            indices,
            values,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Feature indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    #[inline]
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Same data with the feature dimension raised to at least `d`.
    pub fn with_min_dim(mut self, d: usize) -> Self {
        self.d = self.d.max(d);
        self
    }

    /// LibSVM text: `±1 idx:val …` per line, 1-based indices, `%.17g` values.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n() {
            out.push_str(if self.labels[i] > 0.0 { "+1" } else { "-1" });
            let (idx, val) = self.row(i);
            for (j, v) in idx.iter().zip(val) {
                out.push(' ');
                out.push_str(&(j + 1).to_string());
                out.push(':');
                out.push_str(&g17(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Per-example squared Euclidean norms `‖w_i‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowNorms {
    pub sq_norms: Vec<f64>,
}

impl RowNorms {
    pub fn max(&self) -> f64 {
        self.sq_norms.iter().copied().fold(0.0, f64::max)
    }
}

pub fn row_sq_norms(ds: &SparseDataset) -> RowNorms {
    let sq_norms = (0..ds.n())
        .map(|i| ds.row(i).1.iter().fold(0.0, |acc, v| acc + v * v))
        .collect();
    RowNorms { sq_norms }
}

/// Parses LibSVM text from `reader`.
///
/// Raw labels already in {−1, +1} pass through; otherwise the two distinct
/// raw values map to −1 (smaller) and +1 (larger). The dimension is the
/// largest index seen.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<SparseDataset> {
    let mut rows = Vec::new();
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut distinct: Vec<f64> = Vec::new();
    let mut d = 0usize;
    let mut lineno = 0usize;

    for line in reader.lines() {
        lineno += 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let mut tokens = content.split_ascii_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        let label: f64 = label_tok
            .parse()
            .ok()
            .filter(|y: &f64| y.is_finite())
            .ok_or_else(|| perr(format!("bad label {label_tok:?}")))?;
        if !distinct.contains(&label) {
            if distinct.len() == 2 {
                return Err(perr(format!(
                    "third distinct label {label} (already saw {} and {})",
                    distinct[0], distinct[1]
                )));
            }
            distinct.push(label);
        }

        let mut row = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| perr(format!("missing ':' in {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| perr(format!("bad feature index in {tok:?}")))?;
            if idx == 0 {
                return Err(perr("feature indices are 1-based; got 0".into()));
            }
            if idx <= prev {
                return Err(perr(format!("index {idx} does not increase after {prev}")));
            }
            let val: f64 = val
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| perr(format!("bad value in {tok:?}")))?;
            prev = idx;
            d = d.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
        raw_labels.push(label);
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            line: lineno,
            msg: "no examples in input".into(),
        });
    }

    let passthrough = distinct.iter().all(|&y| y == 1.0 || y == -1.0);
    let labels = if passthrough {
        raw_labels
    } else if distinct.len() == 2 {
        let low = distinct[0].min(distinct[1]);
        raw_labels
            .into_iter()
            .map(|y| if y == low { -1.0 } else { 1.0 })
            .collect()
    } else {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("cannot map single label {} to ±1", distinct[0]),
        });
    };

    // An all-empty file still needs d ≥ 1.
    SparseDataset::from_rows(rows, labels, d.max(1))
}

pub fn parse_libsvm_str(text: &str) -> Result<SparseDataset> {
    parse_libsvm(text.as_bytes())
}

pub fn load_libsvm(path: &Path) -> Result<SparseDataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm(std::io::BufReader::new(file))
}

/// Seeded synthetic logistic data.
///
/// Draws a unit ground-truth direction `u` and standard Gaussian features,
/// then labels each row `+1` with probability `σ(separation · ⟨w_i, u⟩)`.
/// Large `separation` means nearly noiseless labels. Rows are dense.
pub fn synth_logistic(n: usize, d: usize, seed: u64, separation: f64) -> Result<SparseDataset> {
    if n < 2 || d < 1 {
        return Err(Error::invalid(format!("synth_logistic needs n ≥ 2 and d ≥ 1, got n={n}, d={d}")));
    }
    let root = RngStream::new(seed);
    let mut dir_rng = root.split(0);
    let mut feat_rng = root.split(1);
    let mut label_rng = root.split(2);

    let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut dir_rng)).collect();
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        u.iter_mut().for_each(|v| *v /= norm);
    }

    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut feat_rng)).collect();
        let margin: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
        let p = 1.0 / (1.0 + (-separation * margin).exp());
        labels.push(if label_rng.uniform_open01() < p { 1.0 } else { -1.0 });
        rows.push(w.into_iter().enumerate().collect());
    }
    SparseDataset::from_rows(rows, labels, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_basic_example() {
        let ds = parse_libsvm_str("+1 1:0.5 3:2.0\n-1 2:1.0").unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.d(), 3);
        assert_eq!(ds.row(0), (&[0usize, 2][..], &[0.5, 2.0][..]));
        assert_eq!(ds.row(1), (&[1usize][..], &[1.0][..]));
        assert_eq!(ds.labels(), &[1.0, -1.0]);
    }

    #[test]
    fn maps_one_two_labels() {
        let ds = parse_libsvm_str("1 1:1\n2 1:1").unwrap();
        assert_eq!(ds.labels(), &[-1.0, 1.0]);
        let ds = parse_libsvm_str("2 1:1\n1 1:1\n2 1:3").unwrap();
        assert_eq!(ds.labels(), &[1.0, -1.0, 1.0]);
        let ds = parse_libsvm_str("0 1:1\n1 1:1").unwrap();
        assert_eq!(ds.labels(), &[-1.0, 1.0]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\n+1 1:1 # trailing\n   \n-1 2:2\n";
        let ds = parse_libsvm_str(text).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.d(), 2);
    }

    fn err_line(text: &str) -> usize {
        match parse_libsvm_str(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(err_line("+1 1:1\n-1 2-1.0"), 2);
        assert_eq!(err_line("+1 1:x"), 1);
        assert_eq!(err_line("+1 1:1\n\n-1 3:1 2:1"), 3);
        assert_eq!(err_line("+1 1:1 1:2"), 1);
        assert_eq!(err_line("1 1:1\n2 1:1\n3 1:1"), 3);
        assert_eq!(err_line("+1 0:1"), 1);
        assert_eq!(err_line("abc 1:1"), 1);
        assert!(matches!(parse_libsvm_str(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_libsvm_str("# only a comment\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn row_norms() {
        let ds = SparseDataset::from_rows(vec![vec![(0, 3.0), (2, 4.0)], vec![]], vec![1.0, -1.0], 3).unwrap();
        assert_eq!(row_sq_norms(&ds).sq_norms, vec![25.0, 0.0]);
    }

    #[test]
    fn from_rows_validates() {
        assert!(SparseDataset::from_rows(vec![vec![(3, 1.0)]], vec![1.0], 3).is_err());
        assert!(SparseDataset::from_rows(vec![vec![(1, 1.0), (0, 1.0)]], vec![1.0], 3).is_err());
        assert!(SparseDataset::from_rows(vec![vec![]], vec![0.0], 3).is_err());
        assert!(SparseDataset::from_rows(vec![], vec![], 3).is_err());
        assert!(SparseDataset::from_rows(vec![vec![]], vec![1.0], 0).is_err());
    }

    #[test]
    fn dim_override_pads_up_only() {
        let ds = parse_libsvm_str("+1 4:1").unwrap();
        assert_eq!(ds.clone().with_min_dim(10).d(), 10);
        assert_eq!(ds.with_min_dim(2).d(), 4);
    }

    #[test]
    fn synth_is_deterministic() {
        let a = synth_logistic(100, 5, 7, 1.0).unwrap();
        let b = synth_logistic(100, 5, 7, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_libsvm(), b.to_libsvm());
        assert_ne!(a, synth_logistic(100, 5, 8, 1.0).unwrap());
    }

    #[test]
    fn synth_has_both_classes() {
        let ds = synth_logistic(1000, 20, 1, 1.0).unwrap();
        let pos = ds.labels().iter().filter(|&&y| y > 0.0).count();
        assert!(pos > 0 && pos < 1000, "pos = {pos}");
    }

    #[test]
    fn synth_minimal() {
        let ds = synth_logistic(2, 1, 0, 10.0).unwrap();
        assert_eq!((ds.n(), ds.d()), (2, 1));
        let again = SparseDataset::from_rows(
            (0..2).map(|i| ds.row(i).0.iter().copied().zip(ds.row(i).1.iter().copied()).collect()).collect(),
            ds.labels().to_vec(),
            1,
        );
        assert!(again.is_ok());
        assert!(synth_logistic(1, 1, 0, 1.0).is_err());
        assert!(synth_logistic(2, 0, 0, 1.0).is_err());
    }

    fn valid_line() -> impl Strategy<Value = String> {
        (
            prop::bool::ANY,
            prop::collection::btree_map(1usize..60, -1e6f64..1e6, 0..8),
        )
            .prop_map(|(pos, feats)| {
                let mut s = if pos { "+1".to_string() } else { "-1".to_string() };
                for (i, v) in feats {
                    s.push_str(&format!(" {i}:{v}"));
                }
                s
            })
    }

    proptest! {
        #[test]
        fn round_trip(lines in prop::collection::vec(valid_line(), 1..20)) {
            let text = lines.join("\n");
            let ds = parse_libsvm_str(&text).unwrap();
            let back = parse_libsvm_str(&ds.to_libsvm()).unwrap();
            prop_assert_eq!(ds, back);
        }

        #[test]
        fn random_valid_lines_parse(lines in prop::collection::vec(valid_line(), 1..20)) {
            let ds = parse_libsvm_str(&lines.join("\n")).unwrap();
            for i in 0..ds.n() {
                let (idx, _) = ds.row(i);
                prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(idx.iter().all(|&j| j < ds.d()));
            }
        }

        #[test]
        fn corrupted_line_reports_its_number(
            lines in prop::collection::vec(valid_line(), 2..12),
            pick in any::<prop::sample::Index>(),
            kind in 0usize..3,
        ) {
            let bad = pick.index(lines.len());
            let mut lines = lines;
            match kind {
                0 => lines[bad].push_str(" 7x1.5"),
                1 => lines[bad].push_str(" 3:abc"),
                _ => lines[bad].push_str(" 99:1 98:1"),
            }
            match parse_libsvm_str(&lines.join("\n")) {
                Err(Error::Parse { line, .. }) => prop_assert_eq!(line, bad + 1),
                other => prop_assert!(false, "expected parse error, got {:?}", other),
            }
        }
    }
}
