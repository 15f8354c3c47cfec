//! Antenna arrays, per-link channel matrices and the line-of-sight DoF law.
//!
//! The link budget is normalized so that a single-antenna link at the
//! reference distance `c` sees SNR exactly `mu` at unit transmit power.
//! Every entry of a link's channel matrix shares the amplitude
//! `sqrt(mu) * min(1, (d/c)^{-alpha/2})` computed from the BS-center
//! distance `d`; phases come from the exact antenna-pair distances.

use std::f64::consts::TAU;
use std::io::Write;

use faer::{c64, Mat, MatMut, MatRef};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg;
use crate::seed::{rng_from_seed, splitmix64};

/// Propagation and power parameters shared by every link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Path-loss exponent `alpha > 2`.
    pub pathloss_exponent: f64,
    /// `mu` in dB: single-antenna SNR at distance `ref_distance`.
    pub ref_snr_db: f64,
    /// `c` in meters.
    pub ref_distance: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Per-BS transmit power relative to the level at which `mu` is quoted.
    pub tx_power: f64,
    /// `N0 W`; the noise covariance is `noise_psd_bw * I`.
    pub noise_psd_bw: f64,
}

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

impl LinkBudget {
    pub fn new(pathloss_exponent: f64, ref_snr_db: f64, ref_distance: f64, wavelength: f64) -> Result<Self> {
        LinkBudget {
            pathloss_exponent,
            ref_snr_db,
            ref_distance,
            wavelength,
            tx_power: 1.0,
            noise_psd_bw: 1.0,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.pathloss_exponent > 2.0) {
            return Err(Error::param(
                "pathloss_exponent",
                format!("must exceed 2, got {}", self.pathloss_exponent),
            ));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::param("wavelength", "must be positive"));
        }
        if !(self.ref_distance > 0.0) {
            return Err(Error::param("ref_distance", "must be positive"));
        }
        if !(self.tx_power >= 0.0) || !(self.noise_psd_bw > 0.0) {
            return Err(Error::param("tx_power", "power must be >= 0 and noise > 0"));
        }
        if self.ref_snr_db.is_nan() || self.ref_snr_db == f64::INFINITY {
            return Err(Error::param("ref_snr_db", "must be finite or -inf"));
        }
        Ok(self)
    }

    pub fn with_tx_power(mut self, p: f64) -> Self {
        self.tx_power = p;
        self
    }

    /// `mu` as a linear power ratio.
    pub fn ref_snr(&self) -> f64 {
        10f64.powf(self.ref_snr_db / 10.0)
    }

    /// Transmit power over noise level: the `P` of the rate formulas.
    pub fn power(&self) -> f64 {
        self.tx_power / self.noise_psd_bw
    }

    /// Bounded path loss `min(1, (d/c)^{-alpha})`.
    pub fn pathloss(&self, d_center: f64) -> f64 {
        (d_center / self.ref_distance).powf(-self.pathloss_exponent).min(1.0)
    }

    /// Shared per-link entry magnitude.
    pub fn amplitude(&self, d_center: f64) -> f64 {
        (self.ref_snr() * self.pathloss(d_center)).sqrt()
    }

    pub fn carrier_hz(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }
}

/// `psi` antennas uniformly placed in an axis-aligned square.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    center: Point,
    side: f64,
    positions: Vec<Point>,
    seed: u64,
}

impl AntennaArray {
    pub fn place(center: Point, side: f64, psi: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let mut a = Self::sample(center, side, psi, &mut rng)?;
        a.seed = seed;
        Ok(a)
    }

    /// Draw from a caller-owned generator (the `seed` field is left at 0).
    pub fn sample<R: Rng + ?Sized>(center: Point, side: f64, psi: usize, rng: &mut R) -> Result<Self> {
        if psi == 0 {
            return Err(Error::param("psi", "an array needs at least one antenna"));
        }
        if !(side >= 0.0 && side.is_finite()) {
            return Err(Error::param("side", format!("must be >= 0, got {side}")));
        }
        let positions = (0..psi)
            .map(|_| {
                Point::new(
                    center.x + side * (rng.random::<f64>() - 0.5),
                    center.y + side * (rng.random::<f64>() - 0.5),
                )
            })
            .collect();
        Ok(AntennaArray {
            center,
            side,
            positions,
            seed: 0,
        })
    }

    /// Array with explicit antenna coordinates.
    pub fn from_positions(center: Point, side: f64, positions: Vec<Point>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::param("psi", "an array needs at least one antenna"));
        }
        let h = 0.5 * side + 1e-12;
        if positions
            .iter()
            .any(|p| (p.x - center.x).abs() > h || (p.y - center.y).abs() > h)
        {
            return Err(Error::param("positions", "antenna outside the array square"));
        }
        Ok(AntennaArray {
            center,
            side,
            positions,
            seed: 0,
        })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn num_antennas(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn overlaps(&self, other: &AntennaArray) -> bool {
        let reach = 0.5 * (self.side + other.side);
        (self.center.x - other.center.x).abs() < reach && (self.center.y - other.center.y).abs() < reach
    }
}

/// `place_antennas` under its operational name.
pub fn place_antennas(center: Point, side: f64, psi: usize, seed: u64) -> Result<AntennaArray> {
    AntennaArray::place(center, side, psi, seed)
}

/// Phase of entry `(rx, tx)` given the antenna-pair distance.
pub trait PhaseRule: Sync {
    fn phase(&self, rx: usize, tx: usize, d_pair: f64) -> f64;
}

/// `-2 pi d / lambda`.
#[derive(Debug, Clone, Copy)]
pub struct LosPhase {
    pub wavelength: f64,
}

impl PhaseRule for LosPhase {
    fn phase(&self, _rx: usize, _tx: usize, d_pair: f64) -> f64 {
        -TAU * frac(d_pair / self.wavelength)
    }
}

/// Phases i.i.d. uniform on `[0, 2 pi)`, keyed by `(seed, rx, tx)`.
#[derive(Debug, Clone, Copy)]
pub struct RandomPhase {
    pub seed: u64,
}

impl PhaseRule for RandomPhase {
    fn phase(&self, rx: usize, tx: usize, _d_pair: f64) -> f64 {
        let h = splitmix64(self.seed ^ splitmix64(((rx as u64) << 32) ^ tx as u64));
        TAU * (h >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn frac(t: f64) -> f64 {
    t - t.floor()
}

/// `sqrt(mu) min(1,(d_center/c)^{-alpha/2}) exp(-j 2 pi d_pair / lambda)`.
pub fn los_gain(d_pair: f64, budget: &LinkBudget, d_center: f64) -> Result<c64> {
    if !(d_pair > 0.0) {
        return Err(Error::param("d_pair", format!("antennas coincide (d = {d_pair})")));
    }
    Ok(c64::from_polar(
        budget.amplitude(d_center),
        -TAU * frac(d_pair / budget.wavelength),
    ))
}

/// Receive-by-transmit channel of one BS link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: Mat<c64>,
    tx_center_distance: f64,
    amplitude: f64,
    overlapping: bool,
}

impl ChannelMatrix {
    /// Wrap a matrix whose entries all have magnitude `amplitude`.
    pub fn from_entries(entries: Mat<c64>, tx_center_distance: f64, amplitude: f64) -> Self {
        ChannelMatrix {
            entries,
            tx_center_distance,
            amplitude,
            overlapping: false,
        }
    }

    pub fn entries(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    pub fn into_entries(self) -> Mat<c64> {
        self.entries
    }

    pub fn rx_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn tx_dim(&self) -> usize {
        self.entries.ncols()
    }

    pub fn tx_center_distance(&self) -> f64 {
        self.tx_center_distance
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Set when the two array squares intersect.
    pub fn overlapping(&self) -> bool {
        self.overlapping
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.squared_norm_l2()
    }

    pub fn transpose(&self) -> ChannelMatrix {
        ChannelMatrix {
            entries: self.entries.transpose().to_owned(),
            ..self.clone()
        }
    }

    /// One `re,im` line per entry, row-major, after a `re,im` header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im"])?;
        for i in 0..self.rx_dim() {
            for k in 0..self.tx_dim() {
                let z = self.entries[(i, k)];
                w.write_record([format!("{:.16e}", z.re), format!("{:.16e}", z.im)])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Line-of-sight channel from `tx` to `rx`.
pub fn build_channel_matrix(tx: &AntennaArray, rx: &AntennaArray, budget: &LinkBudget) -> Result<ChannelMatrix> {
    build_channel_matrix_with(
        tx,
        rx,
        budget,
        &LosPhase {
            wavelength: budget.wavelength,
        },
    )
}

/// Channel with phases from an arbitrary rule; amplitudes as in the LoS model.
pub fn build_channel_matrix_with(
    tx: &AntennaArray,
    rx: &AntennaArray,
    budget: &LinkBudget,
    phase: &dyn PhaseRule,
) -> Result<ChannelMatrix> {
    let d_center = tx.center().dist(&rx.center());
    let amplitude = budget.amplitude(d_center);
    let mut entries = Mat::<c64>::zeros(rx.num_antennas(), tx.num_antennas());
    for (i, r) in rx.positions().iter().enumerate() {
        for (k, t) in tx.positions().iter().enumerate() {
            let d = r.dist(t);
            if !(d > 0.0) {
                return Err(Error::CoincidentAntennas { rx: i, tx: k, distance: d });
            }
            entries[(i, k)] = c64::from_polar(amplitude, phase.phase(i, k, d));
        }
    }
    Ok(ChannelMatrix {
        entries,
        tx_center_distance: d_center,
        amplitude,
        overlapping: tx.overlaps(rx),
    })
}

/// Write the LoS block `amplitude * exp(-j 2 pi |rx_i - tx_k| / lambda)` into
/// `out` (rows = receive antennas). Hot path of the Monte-Carlo runners.
pub(crate) fn fill_los_block(
    rx: &[Point],
    tx: &[Point],
    amplitude: f64,
    wavelength: f64,
    mut out: MatMut<'_, c64>,
) -> Result<()> {
    for (k, t) in tx.iter().enumerate() {
        let mut col = out.as_mut().col_mut(k);
        for (i, r) in rx.iter().enumerate() {
            let d = r.dist(t);
            if !(d > 0.0) {
                return Err(Error::CoincidentAntennas { rx: i, tx: k, distance: d });
            }
            let (s, c) = (-TAU * frac(d / wavelength)).sin_cos();
            col[i] = c64::new(amplitude * c, amplitude * s);
        }
    }
    Ok(())
}

/// Spatial DoF of a LoS `psi x psi` link with array area `a`, wavelength
/// `lambda` and distance `d` (all in meters):
///
/// * `min(psi, sqrt(a)/lambda)` for `d <= sqrt(a)`,
/// * `min(psi, a/(lambda d))` for `sqrt(a) < d <= a/lambda`,
/// * `1` beyond `a/lambda`.
///
/// The first branch is stated for `d >= 1` network unit; see
/// [`dof_below_floor`] for flagging shorter links.
pub fn dof_formula(psi: usize, a: f64, lambda: f64, d: f64) -> f64 {
    let psi = psi as f64;
    let side = a.sqrt();
    if d <= side {
        psi.min(side / lambda)
    } else if d <= a / lambda {
        psi.min(a / (lambda * d))
    } else {
        1.0
    }
}

/// True when `d` is below the domain floor `c/100` of [`dof_formula`].
pub fn dof_below_floor(d: f64, ref_distance: f64) -> bool {
    d < ref_distance / 100.0
}

/// Number of singular values at least `threshold_fraction` times the largest.
pub fn empirical_dof(h: &ChannelMatrix, threshold_fraction: f64) -> Result<usize> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::param("threshold_fraction", "must lie in (0, 1)"));
    }
    let sv = linalg::singular_values(h.entries())?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s >= threshold_fraction * top).count())
}

/// Sample mean of `exp(-j 2 pi D psi / c)` with `D ~ U[c, 2c]`, i.e. the
/// LoS phase at wavelength `c / psi`. Tends to 0 as `psi` grows.
pub fn phase_mixing_mean(psi: usize, ref_distance: f64, num_samples: usize, seed: u64) -> Result<c64> {
    if num_samples == 0 || psi == 0 || !(ref_distance > 0.0) {
        return Err(Error::param("num_samples", "need psi >= 1, samples >= 1, c > 0"));
    }
    let mut rng = rng_from_seed(seed);
    let wavelength = ref_distance / psi as f64;
    let mut acc = c64::new(0.0, 0.0);
    for _ in 0..num_samples {
        let d = ref_distance * (1.0 + rng.random::<f64>());
        acc += c64::from_polar(1.0, -TAU * frac(d / wavelength));
    }
    Ok(acc / num_samples as f64)
}
