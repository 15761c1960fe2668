use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::table::ResultTable;
use crate::{Error, Result};

/// Floor applied before taking `log10`.
const LOG_FLOOR: f64 = 1e-300;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FValue,
    GradNormSq,
}

impl Metric {
    pub fn column(&self) -> &'static str {
        match self {
            Metric::FValue => "f_value",
            Metric::GradNormSq => "grad_norm_sq",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        match s {
            "f_value" | "f" => Some(Metric::FValue),
            "grad_norm_sq" | "grad" => Some(Metric::GradNormSq),
            _ => None,
        }
    }
}

/// Seed-averaged `(epochs_equivalent, log10 metric)` points of one method.
///
/// Only epoch indices reached by every seed are kept.
fn averaged_curve(rt: &ResultTable, method: &str, metric: Metric) -> Vec<(f64, f64)> {
    let mut by_epoch: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    let mut seeds = Vec::new();
    for r in rt.rows.iter().filter(|r| r.method == method) {
        if !seeds.contains(&r.seed) {
            seeds.push(r.seed);
        }
        let v = match metric {
            Metric::FValue => r.f_value,
            Metric::GradNormSq => r.grad_norm_sq,
        };
        by_epoch.entry(r.epoch).or_default().push((r.epochs_equivalent, v));
    }
    by_epoch
        .into_values()
        .filter(|pts| pts.len() == seeds.len())
        .map(|pts| {
            let k = pts.len() as f64;
            let x = pts.iter().map(|p| p.0).sum::<f64>() / k;
            let y = pts.iter().map(|p| p.1).sum::<f64>() / k;
            (x, y.max(LOG_FLOOR).log10())
        })
        .collect()
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        return (lo - 0.5, lo + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders a log-scale convergence plot with one line per method.
pub fn render_svg(rt: &ResultTable, metric: Metric) -> Result<String> {
    if rt.is_empty() {
        return Err(Error::invalid("cannot plot an empty table"));
    }
    let methods = rt.methods();
    let curves: Vec<Vec<(f64, f64)>> = methods.iter().map(|m| averaged_curve(rt, m, metric)).collect();
    let all = curves.iter().flatten();
    let (x_lo, x_hi) = all
        .clone()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y_lo, y_hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (x_lo, x_hi) = nice_range(x_lo, x_hi);
    let (y_lo, y_hi) = nice_range(y_lo.floor(), y_hi.ceil());

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let y_steps = ((y_hi - y_lo).round() as usize).clamp(1, 12);
    for i in 0..=y_steps {
        let y = y_lo + (y_hi - y_lo) * i as f64 / y_steps as f64;
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            y.round() as i64
        );
    }
    for i in 0..=5 {
        let x = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            trim_tick(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">epochs (IFO / n)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        metric.column()
    );

    for (k, (method, curve)) in methods.iter().zip(&curves).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = curve.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-method="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(method),
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(method)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim_tick(x: f64) -> String {
    let t = format!("{x:.2}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn emit_plot(rt: &ResultTable, metric: Metric, path: &Path) -> Result<()> {
    let svg = render_svg(rt, metric)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
