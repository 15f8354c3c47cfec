//! Files written by a scenario run.
//!
//! Every scenario yields one main table, `<scenario>_<seed>.csv`, plus
//! optional named side tables `<scenario>_<seed>_<name>.csv`, SVG plots and
//! a `_meta.txt` file with the resolved config, trial counts and runtime.
//! Tables and plots are pure functions of their inputs; the metadata file
//! is the only output that carries wall-clock time.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::config::ScenarioKind;
use crate::experiments::stats::SweepResult;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Empty for the main table.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plot {
    Lines {
        name: String,
        title: String,
        x_label: String,
        y_label: String,
        log_x: bool,
        series: Vec<Series>,
    },
    Histogram {
        name: String,
        title: String,
        x_label: String,
        /// `(lo, hi, density)` per bin.
        bins: Vec<(f64, f64, f64)>,
        /// Labelled vertical markers.
        markers: Vec<(String, f64)>,
    },
}

impl Plot {
    pub fn name(&self) -> &str {
        match self {
            Plot::Lines { name, .. } | Plot::Histogram { name, .. } => name,
        }
    }
}

/// Everything a scenario produced.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub kind: ScenarioKind,
    pub master_seed: u64,
    pub sweep: SweepResult,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    /// Warnings and skipped points, also written to the metadata file.
    pub notices: Vec<String>,
    /// Extra `key = value` lines for the metadata file.
    pub metadata: Vec<(String, String)>,
    /// Flat config text.
    pub config_text: String,
}

impl ScenarioOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn main_table(&self) -> Option<&Table> {
        self.table("")
    }

    fn stem(&self) -> String {
        format!("{}_{}", self.kind.name(), self.master_seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
}

/// Write the run's files into `dir` (created if missing) and return their
/// paths. CSV and metadata are always written; SVG only when requested.
pub fn emit_outputs(out: &ScenarioOutput, dir: &Path, formats: &[OutputFormat]) -> Result<Vec<PathBuf>> {
    if out.tables.iter().all(|t| t.rows.is_empty()) {
        return Err(Error::Numerical(format!("{} produced no results", out.kind.name())));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = out.stem();
    let file = |name: &str, ext: &str| {
        if name.is_empty() {
            dir.join(format!("{stem}.{ext}"))
        } else {
            dir.join(format!("{stem}_{name}.{ext}"))
        }
    };
    let write = |path: &PathBuf, bytes: &[u8]| std::fs::write(path, bytes).map_err(|e| Error::io(path, e));
    let mut written = Vec::new();
    for t in &out.tables {
        let p = file(&t.name, "csv");
        write(&p, &t.to_csv()?)?;
        written.push(p);
    }
    if formats.contains(&OutputFormat::Svg) {
        for plot in &out.plots {
            let p = file(plot.name(), "svg");
            write(&p, render_svg(plot).as_bytes())?;
            written.push(p);
        }
    }
    let p = file("meta", "txt");
    write(&p, metadata_text(out).as_bytes())?;
    written.push(p);
    Ok(written)
}

fn metadata_text(out: &ScenarioOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", out.kind.description());
    let _ = writeln!(s, "runtime_s = {:.3}", out.sweep.runtime.as_secs_f64());
    for (k, v) in &out.metadata {
        let _ = writeln!(s, "{k} = {v}");
    }
    for n in &out.notices {
        let _ = writeln!(s, "notice = {n:?}");
    }
    s.push_str("\n# resolved config\n");
    s.push_str(&out.config_text);
    s
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const ML: f64 = 70.0;
const MR: f64 = 150.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (x, a, b) = if self.log_x {
            (x.log10(), self.x0.log10(), self.x1.log10())
        } else {
            (x, self.x0, self.x1)
        };
        ML + (x - a) / (b - a) * (W - ML - MR)
    }

    fn ty(&self, y: f64) -> f64 {
        H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - d, hi + d);
    }
    let d = 0.05 * (hi - lo);
    (lo - d, hi + d)
}

fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let (a, b) = (lo.log10().ceil() as i32, hi.log10().floor() as i32);
        return (a..=b).map(|e| 10f64.powi(e)).collect();
    }
    (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        format!("{v:.2}")
    }
}

fn axes(s: &mut String, f: &Frame, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (W - MR + ML) / 2.0, xml(title));
    let (bx, by) = (ML, H - MB);
    let _ = writeln!(s, r#"<polyline points="{bx},{MT} {bx},{by} {},{by}" fill="none" stroke="black"/>"#, W - MR);
    for t in ticks(f.x0, f.x1, f.log_x) {
        let x = f.tx(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{by}" x2="{x:.2}" y2="{}" stroke="black"/>"#, by + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, by + 18.0, label(t));
    }
    for t in ticks(f.y0, f.y1, false) {
        let y = f.ty(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{bx}" y2="{y:.2}" stroke="black"/>"#, bx - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, bx - 8.0, y + 4.0, label(t));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (W - MR + ML) / 2.0, H - 12.0, xml(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (H - MB + MT) / 2.0,
        xml(y_label)
    );
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render a plot as a standalone SVG document.
pub fn render_svg(plot: &Plot) -> String {
    let mut s = String::new();
    match plot {
        Plot::Lines {
            title,
            x_label,
            y_label,
            log_x,
            series,
            ..
        } => {
            let pts = series.iter().flat_map(|se| se.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
            let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for &(x, y) in pts {
                xl = xl.min(x);
                xh = xh.max(x);
                yl = yl.min(y);
                yh = yh.max(y);
            }
            if !xl.is_finite() {
                (xl, xh, yl, yh) = (0.0, 1.0, 0.0, 1.0);
            }
            let (x0, x1) = if *log_x { (xl / 1.2, xh * 1.2) } else { padded(xl, xh) };
            let (y0, y1) = padded(yl.min(0.0), yh);
            let f = Frame { x0, x1, y0, y1, log_x: *log_x };
            axes(&mut s, &f, title, x_label, y_label);
            for (k, se) in series.iter().enumerate() {
                let color = COLORS[k % COLORS.len()];
                let coords: Vec<String> = se
                    .points
                    .iter()
                    .filter(|p| p.0.is_finite() && p.1.is_finite())
                    .map(|&(x, y)| format!("{:.2},{:.2}", f.tx(x), f.ty(y)))
                    .collect();
                if coords.len() > 1 {
                    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, coords.join(" "));
                }
                for c in &coords {
                    let (cx, cy) = c.split_once(',').expect("coordinate pair");
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3.5" fill="{color}"/>"#);
                }
                let ly = MT + 10.0 + 18.0 * k as f64;
                let lx = W - MR + 12.0;
                let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
                let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, xml(&se.name));
            }
        }
        Plot::Histogram {
            title,
            x_label,
            bins,
            markers,
            ..
        } => {
            let xl = bins.first().map_or(0.0, |b| b.0).min(markers.iter().map(|m| m.1).fold(f64::INFINITY, f64::min));
            let xh = bins.last().map_or(1.0, |b| b.1).max(markers.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max));
            let yh = bins.iter().map(|b| b.2).fold(0.0, f64::max);
            let (x0, x1) = padded(xl, xh);
            let f = Frame {
                x0,
                x1,
                y0: 0.0,
                y1: if yh > 0.0 { yh * 1.1 } else { 1.0 },
                log_x: false,
            };
            axes(&mut s, &f, title, x_label, "density");
            for &(lo, hi, d) in bins {
                let (xa, xb, y) = (f.tx(lo), f.tx(hi), f.ty(d));
                let _ = writeln!(
                    s,
                    r##"<rect x="{xa:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd"/>"##,
                    xb - xa,
                    f.ty(0.0) - y
                );
            }
            for (k, (name, x)) in markers.iter().enumerate() {
                let color = COLORS[(k + 1) % COLORS.len()];
                let px = f.tx(*x);
                let _ = writeln!(
                    s,
                    r#"<line x1="{px:.2}" y1="{MT}" x2="{px:.2}" y2="{}" stroke="{color}" stroke-width="2" stroke-dasharray="6 3"/>"#,
                    H - MB
                );
                let ly = MT + 10.0 + 18.0 * k as f64;
                let lx = W - MR + 12.0;
                let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2" stroke-dasharray="6 3"/>"#, lx + 18.0);
                let _ = writeln!(s, r#"<text x="{}" y="{}">{} {:.2}</text>"#, lx + 24.0, ly + 4.0, xml(name), x);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::stats::Summary;

    fn sample_output() -> ScenarioOutput {
        let mut t = Table::new("", &["pattern", "p", "mean_rate", "std_rate", "trials"]);
        t.push(vec!["random".into(), "1".into(), num(17.25), num(0.5), "10".into()]);
        let mut sweep = SweepResult::new("p", "rate");
        sweep.push("random", 1.0, Summary::of(&[17.0, 17.5]).unwrap());
        ScenarioOutput {
            kind: ScenarioKind::FigReuse,
            master_seed: 7,
            sweep,
            tables: vec![t],
            plots: vec![Plot::Lines {
                name: String::new(),
                title: "t".into(),
                x_label: "p".into(),
                y_label: "rate".into(),
                log_x: false,
                series: vec![Series {
                    name: "random".into(),
                    points: vec![(1.0, 17.25), (2.0, 16.0)],
                }],
            }],
            notices: vec![],
            metadata: vec![],
            config_text: String::new(),
        }
    }

    #[test]
    fn files_follow_naming_scheme() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_outputs(&sample_output(), dir.path(), &[OutputFormat::Csv, OutputFormat::Svg]).unwrap();
        let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["fig_reuse_7.csv", "fig_reuse_7.svg", "fig_reuse_7_meta.txt"]);
        let csv = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(csv, "pattern,p,mean_rate,std_rate,trials\nrandom,1,17.25,0.5,10\n");
        let svg = std::fs::read_to_string(&files[1]).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_results_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = sample_output();
        out.tables[0].rows.clear();
        assert!(emit_outputs(&out, dir.path(), &[OutputFormat::Csv]).is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn svg_is_deterministic() {
        let out = sample_output();
        assert_eq!(render_svg(&out.plots[0]), render_svg(&out.plots[0]));
        let h = Plot::Histogram {
            name: "h".into(),
            title: "pdf".into(),
            x_label: "rate".into(),
            bins: vec![(0.0, 1.0, 0.2), (1.0, 2.0, 0.8)],
            markers: vec![("mean".into(), 1.4)],
        };
        assert!(render_svg(&h).contains("<rect x="));
    }
}
