//! CSV, JSON and SVG output for sweep records.
//!
//! The summary CSV has one row per grid point with the header
//!
//! ```text
//! grid_value,p,n,sigma,signal_norm,trials,mean_lambda1,se_lambda1,mean_lambda2,
//! mean_overlap,se_overlap,mean_overlap_sq,mean_sin_theta,crossover_count,
//! theory_lambda,theory_overlap_sq,bound_lambda_lower,bound_lambda_upper,bound_sin_theta
//! ```
//!
//! Reals are printed with 17 significant digits; missing overlays are empty
//! fields.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::SweepRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 19] = [
    "grid_value",
    "p",
    "n",
    "sigma",
    "signal_norm",
    "trials",
    "mean_lambda1",
    "se_lambda1",
    "mean_lambda2",
    "mean_overlap",
    "se_overlap",
    "mean_overlap_sq",
    "mean_sin_theta",
    "crossover_count",
    "theory_lambda",
    "theory_overlap_sq",
    "bound_lambda_lower",
    "bound_lambda_upper",
    "bound_sin_theta",
];

pub const TRIALS_HEADER: [&str; 10] = [
    "grid_value",
    "trial",
    "lambda1",
    "lambda2",
    "overlap",
    "sin_theta",
    "tracked_rank",
    "tracking_overlap",
    "signal_rank",
    "crossover",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// One parsed row of the summary CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub grid_value: f64,
    pub p: usize,
    pub n: usize,
    pub sigma: f64,
    pub signal_norm: f64,
    pub trials: usize,
    pub mean_lambda1: f64,
    pub se_lambda1: f64,
    pub mean_lambda2: f64,
    pub mean_overlap: f64,
    pub se_overlap: f64,
    pub mean_overlap_sq: f64,
    pub mean_sin_theta: f64,
    pub crossover_count: usize,
    pub theory_lambda: Option<f64>,
    pub theory_overlap_sq: Option<f64>,
    pub bound_lambda_lower: Option<f64>,
    pub bound_lambda_upper: Option<f64>,
    pub bound_sin_theta: Option<f64>,
}

impl SummaryRow {
    pub fn from_record(r: &SweepRecord) -> Self {
        let (l1, se_l1) = r.lambda1_stats();
        let (ov, se_ov) = r.overlap_stats();
        let b = r.bounds.as_ref();
        Self {
            grid_value: r.grid_value,
            p: r.p,
            n: r.n,
            sigma: r.sigma,
            signal_norm: r.signal_norm,
            trials: r.trials.len(),
            mean_lambda1: l1,
            se_lambda1: se_l1,
            mean_lambda2: r.mean_lambda2(),
            mean_overlap: ov,
            se_overlap: se_ov,
            mean_overlap_sq: r.mean_overlap_sq(),
            mean_sin_theta: r.mean_sin_theta(),
            crossover_count: r.crossover_count(),
            theory_lambda: r.theory.map(|t| t.lambda_limit),
            theory_overlap_sq: r.theory.map(|t| t.overlap_sq),
            bound_lambda_lower: b.and_then(|b| b.lambda_lower),
            bound_lambda_upper: b.and_then(|b| b.lambda_upper),
            bound_sin_theta: b.and_then(|b| b.sintheta_upper),
        }
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn nonempty(records: &[SweepRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to export".into()));
    }
    Ok(())
}

pub fn summary_csv(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in records.iter().map(SummaryRow::from_record) {
        let fields = [
            real(r.grid_value),
            r.p.to_string(),
            r.n.to_string(),
            real(r.sigma),
            real(r.signal_norm),
            r.trials.to_string(),
            real(r.mean_lambda1),
            real(r.se_lambda1),
            real(r.mean_lambda2),
            real(r.mean_overlap),
            real(r.se_overlap),
            real(r.mean_overlap_sq),
            real(r.mean_sin_theta),
            r.crossover_count.to_string(),
            opt(r.theory_lambda),
            opt(r.theory_overlap_sq),
            opt(r.bound_lambda_lower),
            opt(r.bound_lambda_upper),
            opt(r.bound_sin_theta),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Per-trial values, one row per (grid point, trial).
pub fn trials_csv(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    let mut out = TRIALS_HEADER.join(",");
    out.push('\n');
    for r in records {
        for (t, x) in r.trials.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{t},{},{},{},{},{},{},{},{}",
                real(r.grid_value),
                real(x.lambda1),
                real(x.lambda2),
                real(x.overlap),
                real(x.sin_theta),
                x.tracked_rank,
                real(x.tracking_overlap),
                x.signal_rank,
                x.crossover as u8
            );
        }
    }
    Ok(out)
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<SummaryRow>, _>>()?;
    Ok(rows)
}

pub fn records_json(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    Ok(serde_json::to_string_pretty(records)?)
}

/// Writes `<stem>.csv` (plus `<stem>_trials.csv`), `<stem>.json` or
/// `<stem>.svg` under `dir`, returning the paths written.
pub fn export(records: &[SweepRecord], format: Format, dir: &Path, stem: &str) -> Result<Vec<std::path::PathBuf>> {
    nonempty(records)?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    match format {
        Format::Csv => {
            put(format!("{stem}.csv"), summary_csv(records)?)?;
            put(format!("{stem}_trials.csv"), trials_csv(records)?)?;
        }
        Format::Json => put(format!("{stem}.json"), records_json(records)?)?,
        Format::Svg => put(format!("{stem}.svg"), sweep_svg(records)?)?,
    }
    Ok(written)
}

/// A polyline series.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

/// A single line chart.
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 360.0;
const MARGIN: f64 = 56.0;

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

impl Chart {
    fn render(&self, out: &mut String, x0: f64, y0: f64) {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let (xmin, xmax) = extent(pts().map(|p| p.0));
        let (ymin, ymax) = extent(pts().map(|p| p.1));
        let w = PANEL_W - 2.0 * MARGIN;
        let h = PANEL_H - 2.0 * MARGIN;
        let sx = |x: f64| x0 + MARGIN + (x - xmin) / (xmax - xmin) * w;
        let sy = |y: f64| y0 + PANEL_H - MARGIN - (y - ymin) / (ymax - ymin) * h;
        let (left, bottom) = (x0 + MARGIN, y0 + PANEL_H - MARGIN);
        let _ = writeln!(
            out,
            r#"<rect x="{left}" y="{}" width="{w}" height="{h}" fill="none" stroke="black"/>"#,
            y0 + MARGIN
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
            x0 + PANEL_W / 2.0,
            y0 + MARGIN / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            x0 + PANEL_W / 2.0,
            bottom + 36.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 {} {})">{}</text>"#,
            x0 + 16.0,
            y0 + PANEL_H / 2.0,
            x0 + 16.0,
            y0 + PANEL_H / 2.0,
            escape(&self.y_label)
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (xmin + f * (xmax - xmin), ymin + f * (ymax - ymin));
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="10">{xv:.3}</text>"#,
                sx(xv),
                bottom + 14.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="10">{yv:.3}</text>"#,
                left - 4.0,
                sy(yv) + 3.0
            );
        }
        for (k, s) in self.series.iter().enumerate() {
            let coords: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                s.color,
                coords.join(" ")
            );
            let ly = y0 + MARGIN + 14.0 + 14.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{ly}" font-size="11" fill="{}">{}</text>"#,
                left + w - 150.0,
                s.color,
                escape(&s.name)
            );
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Stacks charts vertically into one SVG document.
pub fn render_svg(charts: &[Chart]) -> String {
    let height = PANEL_H * charts.len() as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_W}\" height=\"{height}\" viewBox=\"0 0 {PANEL_W} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, c) in charts.iter().enumerate() {
        c.render(&mut out, 0.0, PANEL_H * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

/// Mean `R` and mean `λ₁, λ₂` against the grid, with limits overlaid.
pub fn sweep_svg(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    let x_label = if records.windows(2).all(|w| w[0].n == w[1].n) { "sigma" } else { "n" };
    let line = |f: &dyn Fn(&SweepRecord) -> Option<f64>| -> Vec<(f64, f64)> {
        records.iter().filter_map(|r| f(r).map(|y| (r.grid_value, y))).collect()
    };
    let overlap = Chart {
        title: "overlap R".into(),
        x_label: x_label.into(),
        y_label: "R".into(),
        series: vec![
            Series { name: "mean R".into(), points: line(&|r| Some(r.mean_overlap())), color: "#1f4e9c", dashed: false },
            Series {
                name: "limit".into(),
                points: line(&|r| r.theory.map(|t| t.overlap_sq.sqrt())),
                color: "#c23b22",
                dashed: true,
            },
        ],
    };
    let eig = Chart {
        title: "top eigenvalues".into(),
        x_label: x_label.into(),
        y_label: "lambda".into(),
        series: vec![
            Series { name: "mean lambda1".into(), points: line(&|r| Some(r.lambda1_stats().0)), color: "#1f4e9c", dashed: false },
            Series { name: "mean lambda2".into(), points: line(&|r| Some(r.mean_lambda2())), color: "#3a8a3a", dashed: false },
            Series { name: "limit".into(), points: line(&|r| r.theory.map(|t| t.lambda_limit)), color: "#c23b22", dashed: true },
        ],
    };
    Ok(render_svg(&[overlap, eig]))
}
