//! Link rates under interference.
//!
//! Powers are normalized by the noise power, so `power` below is the
//! transmit SNR `P` and a BS spreads it evenly as `P / psi` per antenna.
//! Every rate is in bps/Hz (log base 2).

use std::io::Write;

use faer::{c64, Mat, MatRef};
use serde::Serialize;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Interferers seen by one receiver.
///
/// `mean_field` is an optional extra term added to the diagonal of `R`; the
/// experiment runners use it for the phase-averaged contribution of distant
/// interferers that are not simulated antenna by antenna.
#[derive(Debug, Clone)]
pub struct InterferenceField {
    rx_dim: usize,
    channels: Vec<ChannelMatrix>,
    per_antenna_power: f64,
    mean_field: f64,
}

impl InterferenceField {
    pub fn new(rx_dim: usize, per_antenna_power: f64) -> Result<Self> {
        if !(per_antenna_power >= 0.0 && per_antenna_power.is_finite()) {
            return Err(Error::param("per_antenna_power", "must be finite and >= 0"));
        }
        Ok(InterferenceField {
            rx_dim,
            channels: Vec::new(),
            per_antenna_power,
            mean_field: 0.0,
        })
    }

    pub fn with_channels(rx_dim: usize, per_antenna_power: f64, channels: Vec<ChannelMatrix>) -> Result<Self> {
        let mut f = Self::new(rx_dim, per_antenna_power)?;
        for h in channels {
            f.push(h)?;
        }
        Ok(f)
    }

    pub fn push(&mut self, h: ChannelMatrix) -> Result<()> {
        if h.rx_dim() != self.rx_dim {
            return Err(Error::Dimension(format!(
                "interferer has {} receive rows, field expects {}",
                h.rx_dim(),
                self.rx_dim
            )));
        }
        self.channels.push(h);
        Ok(())
    }

    pub fn with_mean_field(mut self, mean_field: f64) -> Result<Self> {
        if !(mean_field >= 0.0 && mean_field.is_finite()) {
            return Err(Error::param("mean_field", "must be finite and >= 0"));
        }
        self.mean_field = mean_field;
        Ok(self)
    }

    pub fn rx_dim(&self) -> usize {
        self.rx_dim
    }

    pub fn channels(&self) -> &[ChannelMatrix] {
        &self.channels
    }

    pub fn per_antenna_power(&self) -> f64 {
        self.per_antenna_power
    }

    pub fn mean_field(&self) -> f64 {
        self.mean_field
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// One Monte-Carlo rate draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSample {
    pub seed: u64,
    pub psi: usize,
    #[serde(rename = "p")]
    pub reuse_factor: u32,
    pub rate_bps_hz: f64,
}

impl RateSample {
    pub const HEADER: [&'static str; 4] = ["seed", "psi", "p", "rate_bps_hz"];

    pub fn record(&self) -> [String; 4] {
        [
            self.seed.to_string(),
            self.psi.to_string(),
            self.reuse_factor.to_string(),
            format!("{:.16e}", self.rate_bps_hz),
        ]
    }
}

/// Write samples as `seed,psi,p,rate_bps_hz`.
pub fn write_rate_samples<W: Write>(samples: &[RateSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RateSample::HEADER)?;
    for s in samples {
        w.write_record(s.record())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// `R = (1 + mean_field) I + (P / psi) sum_i H_i H_i^H`.
pub fn interference_covariance(field: &InterferenceField) -> Result<CMat> {
    let mut r = linalg::identity(field.rx_dim);
    for h in &field.channels {
        linalg::accumulate_gram(r.as_mut(), h.entries(), field.per_antenna_power);
    }
    if field.mean_field > 0.0 {
        for i in 0..field.rx_dim {
            r[(i, i)].re += field.mean_field;
        }
    }
    Ok(r)
}

/// `(1/p) log2 det(I + (p P / psi) R^{-1} H H^H)`.
///
/// Evaluated as `log2 det(R + s H H^H) - log2 det(R)` with two Cholesky
/// factorizations; a covariance that is not positive definite is an error.
pub fn link_rate(h: &ChannelMatrix, r: MatRef<'_, c64>, power: f64, psi: usize, reuse: u32) -> Result<f64> {
    link_rate_raw(h.entries(), r, power, psi, reuse)
}

/// [`link_rate`] on a bare matrix.
pub fn link_rate_raw(h: MatRef<'_, c64>, r: MatRef<'_, c64>, power: f64, psi: usize, reuse: u32) -> Result<f64> {
    if reuse == 0 {
        return Err(Error::param("p", "reuse factor must be >= 1"));
    }
    if psi == 0 {
        return Err(Error::param("psi", "must be >= 1"));
    }
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::param("power", "must be finite and >= 0"));
    }
    if r.nrows() != h.nrows() || r.ncols() != h.nrows() {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, channel has {} receive rows",
            r.nrows(),
            r.ncols(),
            h.nrows()
        )));
    }
    let p = reuse as f64;
    let mut s = r.to_owned();
    linalg::accumulate_gram(s.as_mut(), h, p * power / psi as f64);
    let rate = (linalg::logdet2_hpd(s.as_ref())? - linalg::logdet2_hpd(r)?) / p;
    if !rate.is_finite() {
        return Err(Error::Numerical(format!("link rate evaluated to {rate}")));
    }
    // Both log-dets carry rounding error; a true rate is never negative.
    Ok(rate.max(0.0))
}

/// Jensen lower bound `log2 det(I + P/(q psi) H H^H)` with `E[R] = q I`.
pub fn ergodic_lower_bound(h: &ChannelMatrix, q: f64, power: f64, psi: usize) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::param("q", format!("expected covariance scale must be >= 1, got {q}")));
    }
    if psi == 0 {
        return Err(Error::param("psi", "must be >= 1"));
    }
    if q.is_infinite() {
        return Ok(0.0);
    }
    let mut s = linalg::identity(h.rx_dim());
    linalg::accumulate_gram(s.as_mut(), h.entries(), power / (q * psi as f64));
    linalg::logdet2_hpd(s.as_ref())
}

/// Result of [`ring_interference_constant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingConstant {
    pub q: f64,
    /// Upper bound on what the omitted rings could still add to `q`.
    pub tail_bound: f64,
    pub converged: bool,
}

/// `q = 1 + 8P + 8P sum_{i=2}^{N} i (i-1)^{-alpha}`, distances in units of `c`.
///
/// With `j = i - 1` the omitted terms are `f(j) = j^{1-alpha} + j^{-alpha}`
/// for `j >= N`, bounded by `f(N) + int_N^inf f`.
pub fn ring_interference_constant(alpha: f64, power: f64, num_rings: usize) -> Result<RingConstant> {
    if !(alpha > 2.0) {
        return Err(Error::Divergent(format!(
            "ring sum needs alpha > 2, got {alpha}"
        )));
    }
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::param("power", "must be finite and >= 0"));
    }
    if num_rings == 0 {
        return Err(Error::param("num_rings", "must be >= 1"));
    }
    let mut sum = 0.0;
    // Small terms first.
    for i in (2..=num_rings).rev() {
        let i = i as f64;
        sum += i * (i - 1.0).powf(-alpha);
    }
    let n = num_rings as f64;
    let tail = n.powf(1.0 - alpha)
        + n.powf(-alpha)
        + n.powf(2.0 - alpha) / (alpha - 2.0)
        + n.powf(1.0 - alpha) / (alpha - 1.0);
    let tail_bound = 8.0 * power * tail;
    Ok(RingConstant {
        q: 1.0 + 8.0 * power + 8.0 * power * sum,
        tail_bound,
        converged: tail_bound < 1e-9,
    })
}

/// Single-stream eigen-beamforming rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformingRate {
    /// `log2(1 + P lambda_max(H H^H))`.
    pub exact: f64,
    /// `log2(1 + P Tr(H H^H))`.
    pub trace_upper: f64,
}

pub fn beamforming_rate(h: &ChannelMatrix, power: f64) -> Result<BeamformingRate> {
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::param("power", "must be finite and >= 0"));
    }
    let sv = linalg::singular_values(h.entries())?;
    let top = sv.first().copied().unwrap_or(0.0);
    let exact = (power * top * top).ln_1p() / std::f64::consts::LN_2;
    let trace_upper = (power * h.frobenius_sq()).ln_1p() / std::f64::consts::LN_2;
    // lambda_max <= trace holds exactly; only rounding can invert it.
    Ok(BeamformingRate {
        exact: exact.min(trace_upper),
        trace_upper,
    })
}

/// Long-hop range `d_c = (P/P0)^{1/alpha} psi^{2/alpha}` in units of `c`.
pub fn long_hop_range(power: f64, target_power: f64, psi: usize, alpha: f64) -> Result<f64> {
    if !(power > 0.0 && target_power > 0.0) {
        return Err(Error::param("power", "P and P0 must be positive"));
    }
    if psi == 0 {
        return Err(Error::param("psi", "must be >= 1"));
    }
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", "must be positive"));
    }
    Ok((power / target_power).powf(1.0 / alpha) * (psi as f64).powf(2.0 / alpha))
}

/// Output of [`spectral_radius_diagnostic`]. The heuristic side is not a
/// proven bound; `rigorous` is always false and is written to reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDiagnostic {
    pub lambda_max_numeric: f64,
    pub heuristic_bound: f64,
    pub alpha_valid: bool,
    pub rigorous: bool,
}

/// Compare `lambda_max(R)` against `1 + P sum_i g_i (d_i/c) (d_max/c)^{-1}`,
/// where `g_i` is the interferer's per-entry power gain and `P` the total
/// transmit power of one interferer.
pub fn spectral_radius_diagnostic(
    field: &InterferenceField,
    d_max: f64,
    ref_distance: f64,
    alpha: f64,
) -> Result<SpectralDiagnostic> {
    if !(d_max > 0.0 && ref_distance > 0.0) {
        return Err(Error::param("d_max", "d_max and c must be positive"));
    }
    let r = interference_covariance(field)?;
    let ev = linalg::hermitian_eigenvalues(r.as_ref())?;
    let lambda_max_numeric = ev.last().copied().unwrap_or(1.0);
    let mut acc = 0.0;
    for h in field.channels() {
        let power = field.per_antenna_power * h.tx_dim() as f64;
        acc += power * h.amplitude() * h.amplitude() * (h.tx_center_distance() / ref_distance) / (d_max / ref_distance);
    }
    Ok(SpectralDiagnostic {
        lambda_max_numeric,
        heuristic_bound: 1.0 + acc,
        alpha_valid: alpha > 3.0,
        rigorous: false,
    })
}

/// `log2 det(I + A)` for Hermitian PSD `A`, as a plain helper for tests and
/// the cut-set code.
pub fn log2det_identity_plus(a: MatRef<'_, c64>) -> Result<f64> {
    let n = a.nrows();
    let s = Mat::from_fn(n, n, |i, j| if i == j { a[(i, j)] + c64::new(1.0, 0.0) } else { a[(i, j)] });
    linalg::logdet2_hpd(s.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_matrix, place_antennas, LinkBudget};
    use crate::geometry::Point;
    use proptest::prelude::*;

    fn scalar(g: c64, d: f64) -> ChannelMatrix {
        ChannelMatrix::from_entries(Mat::from_fn(1, 1, |_, _| g), d, g.norm())
    }

    fn to_na(m: MatRef<'_, c64>) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
        nalgebra::DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| nalgebra::Complex::new(m[(i, j)].re, m[(i, j)].im))
    }

    fn random_matrix(rows: usize, cols: usize, vals: &[f64]) -> ChannelMatrix {
        let m = Mat::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            c64::new(vals[k % vals.len()], vals[(k + 1) % vals.len()])
        });
        ChannelMatrix::from_entries(m, 1.0, 1.0)
    }

    #[test]
    fn covariance_examples() {
        let f = InterferenceField::new(3, 1.0).unwrap();
        let r = interference_covariance(&f).unwrap();
        assert_eq!(r, linalg::identity(3));

        let zero = ChannelMatrix::from_entries(Mat::zeros(2, 2), 1.0, 0.0);
        let f = InterferenceField::with_channels(2, 1.0, vec![zero]).unwrap();
        assert_eq!(interference_covariance(&f).unwrap(), linalg::identity(2));

        let g = c64::new(0.6, -0.3);
        let f = InterferenceField::with_channels(1, 1.0, vec![scalar(g, 2.0)]).unwrap();
        let r = interference_covariance(&f).unwrap();
        assert!((r[(0, 0)].re - (1.0 + g.norm_sqr())).abs() < 1e-15);
    }

    #[test]
    fn covariance_dimension_mismatch() {
        let mut f = InterferenceField::new(2, 1.0).unwrap();
        let h = ChannelMatrix::from_entries(Mat::zeros(3, 2), 1.0, 0.0);
        assert!(matches!(f.push(h), Err(Error::Dimension(_))));
    }

    #[test]
    fn single_antenna_anchor() {
        // mu = 0 dB at distance c in isolation gives log2(1 + mu) = 1.
        let h = scalar(c64::new(1.0, 0.0), 1.0);
        let r = linalg::identity(1);
        assert!((link_rate(&h, r.as_ref(), 1.0, 1, 1).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_channel_has_zero_rate() {
        let h = ChannelMatrix::from_entries(Mat::zeros(3, 3), 1.0, 0.0);
        let r = Mat::from_fn(3, 3, |i, j| if i == j { c64::new(2.0, 0.0) } else { c64::new(0.0, 0.0) });
        assert_eq!(link_rate(&h, r.as_ref(), 5.0, 3, 2).unwrap(), 0.0);
    }

    #[test]
    fn singular_covariance_is_an_error() {
        let h = scalar(c64::new(1.0, 0.0), 1.0);
        let r = Mat::<c64>::zeros(1, 1);
        let e = link_rate(&h, r.as_ref(), 1.0, 1, 1).unwrap_err();
        assert!(e.is_numerical());
    }

    #[test]
    fn reuse_scales_power_and_time() {
        let g = c64::new(0.8, 0.1);
        let h = scalar(g, 1.0);
        let r = linalg::identity(1);
        let got = link_rate(&h, r.as_ref(), 2.0, 1, 4).unwrap();
        let want = (1.0 + 4.0 * 2.0 * g.norm_sqr()).log2() / 4.0;
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn ergodic_bound_edges() {
        let h = random_matrix(3, 3, &[0.3, -0.2, 0.9, 0.1, -0.5, 0.7, 0.2]);
        let r = linalg::identity(3);
        let a = ergodic_lower_bound(&h, 1.0, 2.0, 3).unwrap();
        let b = link_rate(&h, r.as_ref(), 2.0, 3, 1).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert_eq!(ergodic_lower_bound(&h, f64::INFINITY, 2.0, 3).unwrap(), 0.0);
        assert!(ergodic_lower_bound(&h, 1e12, 2.0, 3).unwrap() < 1e-9);
        assert!(matches!(ergodic_lower_bound(&h, 0.5, 2.0, 3), Err(Error::Parameter { .. })));
    }

    #[test]
    fn ring_constant_examples() {
        let one = ring_interference_constant(4.0, 1.0, 1).unwrap();
        assert_eq!(one.q, 9.0);
        assert_eq!(ring_interference_constant(4.0, 0.0, 64).unwrap().q, 1.0);
        assert!(matches!(ring_interference_constant(2.0, 1.0, 8), Err(Error::Divergent(_))));

        // sum_{j>=1} (j+1) j^-4 = zeta(3) + zeta(4).
        let zeta3 = 1.202_056_903_159_594_3;
        let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
        let limit = 9.0 + 8.0 * (zeta3 + zeta4);
        assert!((limit - 27.275_041_094_965_8).abs() < 1e-9);
        for n in [2, 8, 64, 4096] {
            let r = ring_interference_constant(4.0, 1.0, n).unwrap();
            assert!(r.q <= limit + 1e-12);
            assert!(limit <= r.q + r.tail_bound + 1e-12, "n = {n}");
        }
        let big = ring_interference_constant(4.0, 1.0, 20_000).unwrap();
        assert!((big.q - limit).abs() <= big.tail_bound + 1e-12);
        assert!(big.tail_bound < 1e-7);
    }

    #[test]
    fn ring_constant_is_monotone_and_converges() {
        let mut prev = 0.0;
        for n in 1..200 {
            let r = ring_interference_constant(5.0, 1.0, n).unwrap();
            assert!(r.q >= prev);
            prev = r.q;
        }
        assert!(ring_interference_constant(5.0, 1.0, 64).unwrap().tail_bound < 1e-4);
        assert!(ring_interference_constant(6.0, 1.0, 2000).unwrap().converged);
    }

    #[test]
    fn beamforming_equality_cases() {
        let h = scalar(c64::new(0.3, 0.4), 1.0);
        let b = beamforming_rate(&h, 3.0).unwrap();
        assert!((b.exact - b.trace_upper).abs() < 1e-14);

        let ones = ChannelMatrix::from_entries(Mat::from_fn(4, 4, |_, _| c64::new(0.5, 0.5)), 1.0, 0.5f64.sqrt());
        let b = beamforming_rate(&ones, 1.0).unwrap();
        assert!((b.exact - b.trace_upper).abs() < 1e-12);
    }

    #[test]
    fn beamforming_strict_for_full_rank_los() {
        let budget = LinkBudget::new(5.0, 0.0, 100.0, 0.01).unwrap();
        let tx = place_antennas(Point::new(0.0, 0.0), 8.0, 64, 3).unwrap();
        let rx = place_antennas(Point::new(100.0, 0.0), 8.0, 64, 4).unwrap();
        let h = build_channel_matrix(&tx, &rx, &budget).unwrap();
        let b = beamforming_rate(&h, 1.0).unwrap();
        assert!(b.exact < b.trace_upper - 1.0);
        let want = (1.0 + budget.ref_snr() * budget.pathloss(100.0) * 64.0 * 64.0).log2();
        assert!((b.trace_upper - want).abs() < 1e-9);
    }

    #[test]
    fn long_hop_range_examples() {
        assert!((long_hop_range(1.0, 1.0, 64, 4.0).unwrap() - 8.0).abs() < 1e-12);
        assert!((long_hop_range(1.0, 1.0, 1, 3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((long_hop_range(16.0, 1.0, 64, 4.0).unwrap() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_diagnostic_examples() {
        let f = InterferenceField::new(4, 1.0).unwrap();
        let d = spectral_radius_diagnostic(&f, 10.0, 1.0, 5.0).unwrap();
        assert!((d.lambda_max_numeric - 1.0).abs() < 1e-12);
        assert_eq!(d.heuristic_bound, 1.0);
        assert!(!d.rigorous);

        let g = c64::new(0.5, 0.5);
        let f = InterferenceField::with_channels(1, 1.0, vec![scalar(g, 2.0)]).unwrap();
        let d = spectral_radius_diagnostic(&f, 2.0, 1.0, 2.5).unwrap();
        assert!((d.lambda_max_numeric - 1.5).abs() < 1e-12);
        assert!(!d.alpha_valid);
    }

    #[test]
    fn rate_csv_header() {
        let mut buf = Vec::new();
        write_rate_samples(
            &[RateSample {
                seed: 3,
                psi: 64,
                reuse_factor: 4,
                rate_bps_hz: 1.5,
            }],
            &mut buf,
        )
        .unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("seed,psi,p,rate_bps_hz"));
        assert!(lines.next().unwrap().starts_with("3,64,4,1.5"));
    }

    proptest! {
        #[test]
        fn covariance_is_hermitian_with_eigs_above_one(
            vals in prop::collection::vec(-2.0f64..2.0, 8..64),
            n_int in 0usize..4,
            power in 0.0f64..5.0,
        ) {
            let mut f = InterferenceField::new(3, power).unwrap();
            for k in 0..n_int {
                let shifted: Vec<f64> = vals.iter().map(|v| v * (k as f64 + 1.0)).collect();
                f.push(random_matrix(3, 4, &shifted)).unwrap();
            }
            let r = interference_covariance(&f).unwrap();
            prop_assert!(linalg::hermitian_defect(r.as_ref()) <= 1e-10);
            let ev = linalg::hermitian_eigenvalues(r.as_ref()).unwrap();
            prop_assert!(ev[0] >= 1.0 - 1e-9);
        }

        #[test]
        fn rate_is_monotone_in_interference_power(
            vals in prop::collection::vec(-1.0f64..1.0, 8..40),
            ivals in prop::collection::vec(-1.0f64..1.0, 8..40),
            base in 0.01f64..2.0,
            boost in 1.0f64..10.0,
        ) {
            let h = random_matrix(3, 3, &vals);
            let g = random_matrix(3, 3, &ivals);
            let low = InterferenceField::with_channels(3, base, vec![g.clone()]).unwrap();
            let high = InterferenceField::with_channels(3, base * boost, vec![g]).unwrap();
            let rl = interference_covariance(&low).unwrap();
            let rh = interference_covariance(&high).unwrap();
            let a = link_rate(&h, rl.as_ref(), 1.0, 3, 1).unwrap();
            let b = link_rate(&h, rh.as_ref(), 1.0, 3, 1).unwrap();
            prop_assert!(b <= a + 1e-10);
        }

        #[test]
        fn logdet_matches_eigen_oracle(
            vals in prop::collection::vec(-1.5f64..1.5, 8..40),
            psi in 1usize..=4,
            scale in 0.0f64..4.0,
        ) {
            let h = random_matrix(psi, psi, &vals);
            let a = linalg::gram(h.entries(), scale);
            let got = log2det_identity_plus(a.as_ref()).unwrap();
            let eig = to_na(a.as_ref()).symmetric_eigenvalues();
            let want: f64 = eig.iter().map(|l| (1.0 + l).log2()).sum();
            prop_assert!((got - want).abs() < 1e-8);
        }

        #[test]
        fn beamforming_exact_below_trace(
            vals in prop::collection::vec(-1.0f64..1.0, 8..60),
            rows in 1usize..5,
            cols in 1usize..5,
            power in 0.0f64..10.0,
        ) {
            let h = random_matrix(rows, cols, &vals);
            let b = beamforming_rate(&h, power).unwrap();
            prop_assert!(b.exact <= b.trace_upper);
        }
    }
}
