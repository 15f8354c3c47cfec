//! Sample summaries and sweep results.

use std::time::Duration;

/// Mean, spread and order statistics of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// 5%, 25%, 50%, 75% and 95% quantiles.
    pub quantiles: [f64; 5],
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

impl Summary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Summary {
            count: n,
            mean,
            std,
            min: sorted[0],
            max: sorted[n - 1],
            quantiles: QUANTILE_LEVELS.map(|q| quantile_sorted(&sorted, q)),
        })
    }

    pub fn std_error(&self) -> f64 {
        self.std / (self.count as f64).sqrt()
    }

    /// Coefficient of variation `std / mean`.
    pub fn cv(&self) -> f64 {
        self.std / self.mean
    }

    pub fn q05(&self) -> f64 {
        self.quantiles[0]
    }

    pub fn median(&self) -> f64 {
        self.quantiles[2]
    }

    pub fn q95(&self) -> f64 {
        self.quantiles[4]
    }
}

/// Linear interpolation between order statistics (R type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-width histogram over `[lo, hi]`; returns per-bin counts.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let k = if width > 0.0 { ((v - lo) / width).floor() as isize } else { 0 };
        counts[k.clamp(0, bins as isize - 1) as usize] += 1;
    }
    counts
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Series the point belongs to (`"random"`, `"short_hop"`, ...).
    pub series: String,
    pub x: f64,
    pub summary: Summary,
}

/// Measured quantity against one axis, for every series of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: String,
    pub quantity: String,
    pub points: Vec<SweepPoint>,
    pub runtime: Duration,
}

impl SweepResult {
    pub fn new(axis: &str, quantity: &str) -> Self {
        SweepResult {
            axis: axis.into(),
            quantity: quantity.into(),
            points: Vec::new(),
            runtime: Duration::ZERO,
        }
    }

    pub fn push(&mut self, series: &str, x: f64, summary: Summary) {
        self.points.push(SweepPoint {
            series: series.into(),
            x,
            summary,
        });
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, series: &str, x: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.series == series && p.x == x)
    }

    /// Series names in first-appearance order.
    pub fn series(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.series.as_str()) {
                out.push(&p.series);
            }
        }
        out
    }
}
