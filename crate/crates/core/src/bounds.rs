//! Cut-set upper bounds and closed-form scaling evaluators.
//!
//! The numeric bound works on a unit-density copy of the network: BS `k`
//! sits at `c * u_k`, where `u_k` are the unit-density coordinates and `c`
//! is the budget's reference distance, so one network unit equals `c`.
//! Numeric rates are base 2; the closed-form evaluators follow the
//! asymptotic analysis and use natural logs.

use std::f64::consts::E;
use std::io::Write;

use faer::{c64, Mat, MatRef};

use crate::channel::{fill_los_block, AntennaArray, LinkBudget, PhaseRule, RandomPhase};
use crate::error::{Error, Result};
use crate::geometry::{num_strips_for_side, strip_decompose, NetworkRealization, Point};
use crate::linalg;
use crate::seed::{derive_seed, derived_rng, stream};

/// Largest `n * psi` accepted by [`cutset_numeric`].
pub const DEFAULT_MATRIX_CAP: usize = 4096;

/// Three nested relaxations of the cut-set capacity, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSetResult {
    /// `log2 det(I + n P H H^H)`.
    pub exact_logdet: f64,
    /// `sum_i log2(1 + n P (H H^H)_ii)`.
    pub hadamard_bound: f64,
    /// Hadamard terms with each diagonal entry replaced by its strip cap.
    pub strip_bound: f64,
    pub n: usize,
    pub psi: usize,
}

/// Phases used inside `H_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSetPhases {
    LineOfSight,
    /// i.i.d. uniform phases; the strip bound is unaffected.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSetOptions {
    pub psi: usize,
    /// Physical array side in meters.
    pub array_side: f64,
    pub phases: CutSetPhases,
    pub matrix_cap: usize,
}

impl CutSetOptions {
    /// LoS phases, `matrix_cap = 4096`, and an array side of `0.08 c`
    /// (the 8 m / 100 m ratio of the reference deployment).
    pub fn new(psi: usize, budget: &LinkBudget) -> Self {
        CutSetOptions {
            psi,
            array_side: 0.08 * budget.ref_distance,
            phases: CutSetPhases::LineOfSight,
            matrix_cap: DEFAULT_MATRIX_CAP,
        }
    }
}

/// Cut-set bound across the vertical center line of `realization`, with
/// default [`CutSetOptions`].
pub fn cutset_numeric(realization: &NetworkRealization, psi: usize, budget: &LinkBudget, seed: u64) -> Result<CutSetResult> {
    cutset_numeric_with(realization, &CutSetOptions::new(psi, budget), budget, seed)
}

pub fn cutset_numeric_with(
    realization: &NetworkRealization,
    opts: &CutSetOptions,
    budget: &LinkBudget,
    seed: u64,
) -> Result<CutSetResult> {
    let psi = opts.psi;
    if psi == 0 {
        return Err(Error::param("psi", "must be >= 1"));
    }
    let n = realization.len();
    if n * psi > opts.matrix_cap {
        return Err(Error::MatrixCap {
            size: n * psi,
            cap: opts.matrix_cap,
        });
    }
    let unit = realization.to_unit_density()?;
    let side = unit.bounds().side();
    let cut = unit.bounds().cut();
    let c = budget.ref_distance;

    let (strips, num_strips) = row_strips(&unit)?;
    let left: Vec<usize> = (0..n).filter(|&k| unit.positions()[k].x < cut).collect();
    let right: Vec<usize> = (0..n).filter(|&k| unit.positions()[k].x >= cut).collect();
    if left.is_empty() || right.is_empty() {
        return Err(Error::param("realization", "both sides of the cut need at least one BS"));
    }

    let phys = |k: usize| {
        let p = unit.positions()[k];
        Point::new(p.x * c, p.y * c)
    };
    let arrays: Vec<AntennaArray> = (0..n)
        .map(|k| {
            let mut rng = derived_rng(seed, stream::ANTENNAS, k as u64);
            AntennaArray::sample(phys(k), opts.array_side, psi, &mut rng)
        })
        .collect::<Result<_>>()?;

    let rows = right.len() * psi;
    let cols = left.len() * psi;
    let mut h = Mat::<c64>::zeros(rows, cols);
    let phase_seed = derive_seed(seed, stream::PHASES, 0);
    for (bi, &r) in right.iter().enumerate() {
        for (bk, &t) in left.iter().enumerate() {
            let amp = budget.amplitude(phys(r).dist(&phys(t)));
            let block = h.as_mut().submatrix_mut(bi * psi, bk * psi, psi, psi);
            match opts.phases {
                CutSetPhases::LineOfSight => {
                    fill_los_block(arrays[r].positions(), arrays[t].positions(), amp, budget.wavelength, block)?
                }
                CutSetPhases::Random => {
                    let rule = RandomPhase {
                        seed: derive_seed(phase_seed, r as u64, t as u64),
                    };
                    fill_with_rule(&arrays[r], &arrays[t], amp, &rule, block)?
                }
            }
        }
    }

    // Per-BS cap of (H H^H)_ii from the strip containing the receiver.
    let n_tx = left.len() as f64;
    let caps: Vec<f64> = right
        .iter()
        .flat_map(|&r| {
            let strip = strips[r];
            let l = if strip == num_strips {
                1.0
            } else {
                let d = side / (2.0 * (strip as f64).exp());
                d.powf(-budget.pathloss_exponent).min(1.0)
            };
            std::iter::repeat(n_tx * psi as f64 * budget.ref_snr() * l).take(psi)
        })
        .collect();

    let total_power = n_tx * budget.power();
    let mut res = cutset_chain(h.as_ref(), &caps, total_power)?;
    res.n = n;
    res.psi = psi;
    Ok(res)
}

/// Strip index of every BS. Boxes narrower than `2e` have a single strip.
fn row_strips(unit: &NetworkRealization) -> Result<(Vec<usize>, usize)> {
    let side = unit.bounds().side();
    if side < 2.0 * E {
        return Ok((vec![1; unit.len()], 1));
    }
    let d = strip_decompose(unit)?;
    debug_assert_eq!(d.num_strips(), num_strips_for_side(side));
    Ok((d.membership().iter().map(|m| m.strip).collect(), d.num_strips()))
}

fn fill_with_rule(
    rx: &AntennaArray,
    tx: &AntennaArray,
    amplitude: f64,
    rule: &dyn PhaseRule,
    mut out: faer::MatMut<'_, c64>,
) -> Result<()> {
    for (i, a) in rx.positions().iter().enumerate() {
        for (k, b) in tx.positions().iter().enumerate() {
            let d = a.dist(b);
            if !(d > 0.0) {
                return Err(Error::CoincidentAntennas { rx: i, tx: k, distance: d });
            }
            out[(i, k)] = c64::from_polar(amplitude, rule.phase(i, k, d));
        }
    }
    Ok(())
}

/// The three bound levels for an explicit `H_eff` and per-row caps on
/// `(H H^H)_ii`. `total_power` is the `n P` factor.
pub fn cutset_chain(h_eff: MatRef<'_, c64>, row_caps: &[f64], total_power: f64) -> Result<CutSetResult> {
    if row_caps.len() != h_eff.nrows() {
        return Err(Error::Dimension(format!(
            "{} caps for {} rows",
            row_caps.len(),
            h_eff.nrows()
        )));
    }
    if !(total_power >= 0.0 && total_power.is_finite()) {
        return Err(Error::param("total_power", "must be finite and >= 0"));
    }
    let mut s = linalg::identity(h_eff.nrows());
    linalg::accumulate_gram(s.as_mut(), h_eff, total_power);
    let exact_logdet = linalg::logdet2_hpd(s.as_ref())?;
    let mut hadamard_bound = 0.0;
    let mut strip_bound = 0.0;
    for (i, cap) in row_caps.iter().enumerate() {
        let diag = h_eff.row(i).squared_norm_l2();
        if diag > cap * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::Numerical(format!(
                "row {i}: (H H^H)_ii = {diag} exceeds its cap {cap}"
            )));
        }
        hadamard_bound += (total_power * diag).ln_1p();
        strip_bound += (total_power * cap).ln_1p();
    }
    Ok(CutSetResult {
        exact_logdet,
        hadamard_bound: hadamard_bound / std::f64::consts::LN_2,
        strip_bound: strip_bound / std::f64::consts::LN_2,
        n: 0,
        psi: 0,
    })
}

/// `kappa = alpha/2 - 2 - log_n psi`.
pub fn kappa(n: f64, psi: f64, alpha: f64) -> f64 {
    alpha / 2.0 - 2.0 - psi.ln() / n.ln()
}

fn check_n_psi(n: f64, psi: f64) -> Result<()> {
    if !(n >= 3.0 && n.is_finite()) {
        return Err(Error::param("n", format!("must be >= 3, got {n}")));
    }
    if !(psi >= 1.0 && psi.is_finite()) {
        return Err(Error::param("psi", format!("must be >= 1, got {psi}")));
    }
    Ok(())
}

fn lemma2_domain(n: f64, psi: f64, alpha: f64) -> Result<()> {
    check_n_psi(n, psi)?;
    if !(kappa(n, psi, alpha) > 0.0) {
        return Err(Error::Domain {
            condition: "cut-set closed form requires alpha > 2(2 + log_n psi)",
            alpha,
            threshold: 2.0 * (2.0 + psi.ln() / n.ln()),
        });
    }
    Ok(())
}

/// `sqrt(n) n^{2/alpha} psi^{1/alpha} ln n`.
pub fn eval_cs_lemma2(n: f64, psi: f64, alpha: f64) -> Result<f64> {
    lemma2_domain(n, psi, alpha)?;
    Ok(n.sqrt() * n.powf(2.0 / alpha) * psi.powf(1.0 / alpha) * n.ln())
}

/// `(e - 1) psi C_s`.
pub fn eval_throughput_ub(n: f64, psi: f64, alpha: f64) -> Result<f64> {
    Ok((E - 1.0) * psi * eval_cs_lemma2(n, psi, alpha)?)
}

/// The strip series `sum_{i=1}^{floor(ln(sqrt(n)/2))} (n/e^i) ln(1 + P n^{2-alpha/2} psi 2^alpha e^{i alpha})`.
pub fn cs_series(n: f64, psi: f64, alpha: f64, power: f64) -> Result<f64> {
    check_n_psi(n, psi)?;
    if !(alpha > 2.0) {
        return Err(Error::param("alpha", format!("must exceed 2, got {alpha}")));
    }
    let top = (0.5 * n.sqrt()).ln().floor().max(0.0) as usize;
    let mut sum = 0.0;
    for i in 1..=top {
        let i = i as f64;
        // Exponent form keeps huge n from overflowing.
        let x = power.ln() + (2.0 - alpha / 2.0) * n.ln() + psi.ln() + alpha * 2f64.ln() + i * alpha;
        sum += n * (-i).exp() * ln_1p_exp(x);
    }
    Ok(sum)
}

/// `ln(1 + e^x)` without overflow.
fn ln_1p_exp(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `[n^{1/2 - 2/alpha} / ln n]^{alpha/(1+alpha)}`.
pub fn eval_antenna_requirement(n: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 4.0) {
        return Err(Error::Domain {
            condition: "the antenna requirement needs alpha > 4",
            alpha,
            threshold: 4.0,
        });
    }
    check_n_psi(n, 1.0)?;
    Ok((n.powf(0.5 - 2.0 / alpha) / n.ln()).powf(alpha / (1.0 + alpha)))
}

/// Exponent of `n` in [`eval_antenna_requirement`], `(alpha/2 - 2)/(1 + alpha)`.
pub fn antenna_requirement_exponent(alpha: f64) -> f64 {
    (alpha / 2.0 - 2.0) / (1.0 + alpha)
}

/// `psi^{2/alpha} / n^{1/2 - eps}`.
pub fn eval_long_hop_rate_ub(n: f64, psi: f64, alpha: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param("eps", format!("must lie in (0, 1/2), got {eps}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", "must be positive"));
    }
    check_n_psi(n, psi)?;
    Ok(psi.powf(2.0 / alpha) / n.powf(0.5 - eps))
}

/// Closed-form scaling laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingFormula {
    CsLemma2 { alpha: f64 },
    TnTheorem1 { alpha: f64 },
    PsiCorollary1 { alpha: f64 },
    RnTheorem2 { alpha: f64, eps: f64 },
}

impl ScalingFormula {
    /// Evaluate at `n`; `psi` is ignored by the antenna requirement.
    pub fn evaluate(&self, n: f64, psi: f64) -> Result<f64> {
        match *self {
            ScalingFormula::CsLemma2 { alpha } => eval_cs_lemma2(n, psi, alpha),
            ScalingFormula::TnTheorem1 { alpha } => eval_throughput_ub(n, psi, alpha),
            ScalingFormula::PsiCorollary1 { alpha } => eval_antenna_requirement(n, alpha),
            ScalingFormula::RnTheorem2 { alpha, eps } => eval_long_hop_rate_ub(n, psi, alpha, eps),
        }
    }
}

/// One line of a cut-set sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSetRow {
    pub n: usize,
    pub psi: usize,
    pub alpha: f64,
    pub exact: f64,
    pub hadamard: f64,
    pub strip: f64,
    /// `None` where the closed form does not apply.
    pub cs_formula: Option<f64>,
    pub t_ub_formula: Option<f64>,
}

impl CutSetRow {
    pub fn new(res: &CutSetResult, alpha: f64) -> Self {
        let (n, psi) = (res.n as f64, res.psi as f64);
        CutSetRow {
            n: res.n,
            psi: res.psi,
            alpha,
            exact: res.exact_logdet,
            hadamard: res.hadamard_bound,
            strip: res.strip_bound,
            cs_formula: eval_cs_lemma2(n, psi, alpha).ok(),
            t_ub_formula: eval_throughput_ub(n, psi, alpha).ok(),
        }
    }

    pub const HEADER: [&'static str; 8] = ["n", "psi", "alpha", "exact", "hadamard", "strip", "cs_formula", "t_ub_formula"];

    pub fn record(&self) -> [String; 8] {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        [
            self.n.to_string(),
            self.psi.to_string(),
            format!("{}", self.alpha),
            format!("{:.16e}", self.exact),
            format!("{:.16e}", self.hadamard),
            format!("{:.16e}", self.strip),
            opt(self.cs_formula),
            opt(self.t_ub_formula),
        ]
    }
}

/// CSV `n,psi,alpha,exact,hadamard,strip,cs_formula,t_ub_formula`; formula
/// columns are empty outside their domain.
pub fn write_cutset_rows<W: Write>(rows: &[CutSetRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CutSetRow::HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NetworkBox;
    use proptest::prelude::*;

    fn budget(alpha: f64) -> LinkBudget {
        LinkBudget::new(alpha, 0.0, 100.0, 0.01).unwrap()
    }

    #[test]
    fn zero_gains_give_zero_bounds() {
        let b = LinkBudget::new(5.0, f64::NEG_INFINITY, 100.0, 0.01).unwrap();
        let net = NetworkRealization::lattice(4, 1.0, 0.3, 5).unwrap();
        let r = cutset_numeric(&net, 2, &b, 1).unwrap();
        assert_eq!(r.exact_logdet, 0.0);
        assert_eq!(r.hadamard_bound, 0.0);
        assert_eq!(r.strip_bound, 0.0);
    }

    #[test]
    fn diagonal_channel_meets_hadamard() {
        let h = Mat::from_fn(4, 4, |i, j| if i == j { c64::new(0.5 * i as f64, 0.2) } else { c64::new(0.0, 0.0) });
        let r = cutset_chain(h.as_ref(), &[10.0; 4], 3.0).unwrap();
        assert!((r.exact_logdet - r.hadamard_bound).abs() < 1e-12);
        assert!(r.hadamard_bound <= r.strip_bound);
    }

    #[test]
    fn lattice_chain_against_eigen_oracle() {
        let b = budget(5.0);
        let net = NetworkRealization::lattice(4, 1.0, 0.0, 9).unwrap();
        let r = cutset_numeric(&net, 4, &b, 11).unwrap();
        assert_eq!((r.n, r.psi), (16, 4));
        assert!(r.exact_logdet <= r.hadamard_bound * (1.0 + 1e-6));
        assert!(r.hadamard_bound <= r.strip_bound * (1.0 + 1e-6));

        // Rebuild H_eff by hand and check the log-det with nalgebra.
        let unit = net.to_unit_density().unwrap();
        let c = b.ref_distance;
        let cut = unit.bounds().cut();
        let arrays: Vec<AntennaArray> = (0..16)
            .map(|k| {
                let p = unit.positions()[k];
                let mut rng = derived_rng(11, stream::ANTENNAS, k as u64);
                AntennaArray::sample(Point::new(p.x * c, p.y * c), 8.0, 4, &mut rng).unwrap()
            })
            .collect();
        let left: Vec<usize> = (0..16).filter(|&k| unit.positions()[k].x < cut).collect();
        let right: Vec<usize> = (0..16).filter(|&k| unit.positions()[k].x >= cut).collect();
        let n_tx = left.len() as f64;
        let m = nalgebra::DMatrix::from_fn(right.len() * 4, left.len() * 4, |i, j| {
            let (r, t) = (&arrays[right[i / 4]], &arrays[left[j / 4]]);
            let d = r.positions()[i % 4].dist(&t.positions()[j % 4]);
            let amp = b.amplitude(r.center().dist(&t.center()));
            let ph = -2.0 * std::f64::consts::PI * (d / b.wavelength).fract();
            nalgebra::Complex::from_polar(amp, ph)
        });
        let g = &m * m.adjoint() * nalgebra::Complex::new(n_tx, 0.0);
        let ev = g.symmetric_eigenvalues();
        let oracle: f64 = ev.iter().map(|l| (1.0 + l.max(0.0)).log2()).sum();
        assert!((r.exact_logdet - oracle).abs() < 1e-8 * oracle.max(1.0), "{} vs {oracle}", r.exact_logdet);
    }

    #[test]
    fn random_phases_leave_strip_bound_unchanged() {
        let b = budget(5.0);
        let net = NetworkRealization::poisson(NetworkBox::new(6.0).unwrap(), 1.0, 4).unwrap();
        let mut opts = CutSetOptions::new(2, &b);
        let los = cutset_numeric_with(&net, &opts, &b, 3).unwrap();
        opts.phases = CutSetPhases::Random;
        let rnd = cutset_numeric_with(&net, &opts, &b, 3).unwrap();
        assert_eq!(los.strip_bound, rnd.strip_bound);
        assert!((los.hadamard_bound - rnd.hadamard_bound).abs() < 1e-9 * los.hadamard_bound);
        assert!(rnd.exact_logdet <= rnd.hadamard_bound * (1.0 + 1e-6));
    }

    #[test]
    fn cap_and_empty_side_errors() {
        let b = budget(5.0);
        let net = NetworkRealization::lattice(8, 1.0, 0.0, 1).unwrap();
        assert!(matches!(
            cutset_numeric(&net, 128, &b, 1),
            Err(Error::MatrixCap { size: 8192, cap: 4096 })
        ));
        let one_side = NetworkRealization::from_parts(
            NetworkBox::new(4.0).unwrap(),
            vec![Point::new(0.5, 1.0), Point::new(1.0, 3.0)],
            vec![1, 0],
            0.125,
            0,
        )
        .unwrap();
        assert!(matches!(cutset_numeric(&one_side, 2, &b, 1), Err(Error::Parameter { .. })));
    }

    #[test]
    fn lemma2_examples() {
        let v = eval_cs_lemma2(E * E, 1.0, 8.0).unwrap();
        assert!((v - 2.0 * E.powf(1.5)).abs() < 1e-12);
        assert!((kappa(E * E, 1.0, 8.0) - 2.0).abs() < 1e-15);

        let (n, psi): (f64, f64) = (1e4, 100.0);
        let threshold = 2.0 * (2.0 + psi.ln() / f64::ln(n));
        assert!(eval_cs_lemma2(n, psi, threshold + 1e-9).is_ok());
        match eval_cs_lemma2(n, psi, threshold - 1e-9) {
            Err(Error::Domain { condition, .. }) => assert!(condition.contains("closed form")),
            other => panic!("expected a domain error, got {other:?}"),
        }
    }

    #[test]
    fn cs_series_ratio_is_bounded() {
        let mut ratios = Vec::new();
        for k in 2..=6 {
            let n = 10f64.powi(k);
            let psi = n.powf(0.25);
            ratios.push(cs_series(n, psi, 6.0, 1.0).unwrap() / eval_cs_lemma2(n, psi, 6.0).unwrap());
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min > 0.0 && max / min <= 10.0, "{ratios:?}");
    }

    #[test]
    fn throughput_examples() {
        let cs = eval_cs_lemma2(1e4, 7.0, 9.0).unwrap();
        let t = eval_throughput_ub(1e4, 7.0, 9.0).unwrap();
        assert!((t / cs - 7.0 * (E - 1.0)).abs() < 1e-12);
        let t1 = eval_throughput_ub(500.0, 1.0, 6.0).unwrap();
        assert!((t1 - (E - 1.0) * eval_cs_lemma2(500.0, 1.0, 6.0).unwrap()).abs() < 1e-9);
        let mut prev = 0.0;
        for psi in [1.0, 10.0, 50.0, 100.0] {
            let v = eval_throughput_ub(1e4, psi, 8.0).unwrap();
            assert!(v.is_finite() && v > prev);
            prev = v;
        }
    }

    #[test]
    fn antenna_requirement_examples() {
        let v = eval_antenna_requirement(1e6, 8.0).unwrap();
        let want = (10f64.powf(1.5) / 1e6f64.ln()).powf(8.0 / 9.0);
        assert!((v - want).abs() < 1e-12 * want);
        assert!(matches!(eval_antenna_requirement(1e6, 4.0), Err(Error::Domain { .. })));
        let mut prev = f64::MIN;
        for a in [4.5, 6.0, 10.0, 100.0, 1e4, 1e8] {
            let e = antenna_requirement_exponent(a);
            assert!(e > prev && e < 0.5);
            prev = e;
        }
        assert!((antenna_requirement_exponent(1e12) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn long_hop_examples() {
        let (n, alpha) = (1e6, 4.0);
        let v = eval_long_hop_rate_ub(n, n.powf(alpha / 4.0), alpha, 1e-3).unwrap();
        assert!((0.9..=1.1).contains(&v));
        let small: Vec<f64> = [1e2, 1e4, 1e6].iter().map(|&n| eval_long_hop_rate_ub(n, 1.0, 4.0, 0.1).unwrap()).collect();
        assert!(small[0] > small[1] && small[1] > small[2]);
        let sq: Vec<f64> = [1e2, 1e4, 1e6].iter().map(|&n: &f64| eval_long_hop_rate_ub(n, n.sqrt(), 4.0, 0.1).unwrap()).collect();
        assert!(sq[0] > sq[1] && sq[1] > sq[2]);
        assert!(eval_long_hop_rate_ub(n, 1.0, 4.0, 0.5).is_err());
        assert!(eval_long_hop_rate_ub(n, 1.0, 4.0, 0.0).is_err());
    }

    #[test]
    fn csv_schema() {
        let res = CutSetResult {
            exact_logdet: 1.0,
            hadamard_bound: 2.0,
            strip_bound: 3.0,
            n: 16,
            psi: 4,
        };
        let mut buf = Vec::new();
        write_cutset_rows(&[CutSetRow::new(&res, 5.0)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("n,psi,alpha,exact,hadamard,strip,cs_formula,t_ub_formula\n16,4,5,"));
        // kappa = 0 here, so both formula columns are empty.
        assert!(s.trim_end().ends_with(",,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn chain_holds_on_random_networks(
            n_idx in 0usize..3,
            psi in prop::sample::select(vec![2usize, 4]),
            seed in 0u64..1_000_000,
            alpha in 2.5f64..6.0,
        ) {
            let n = [16.0, 36.0, 64.0][n_idx];
            let b = budget(alpha);
            let net = NetworkRealization::poisson(NetworkBox::for_unit_density(n).unwrap(), 1.0, seed).unwrap();
            prop_assume!(net.len() * psi <= DEFAULT_MATRIX_CAP);
            let cut = net.bounds().cut();
            prop_assume!(net.positions().iter().any(|p| p.x < cut) && net.positions().iter().any(|p| p.x >= cut));
            let r = cutset_numeric(&net, psi, &b, seed).unwrap();
            prop_assert!(r.exact_logdet <= r.hadamard_bound * (1.0 + 1e-6) + 1e-9);
            prop_assert!(r.hadamard_bound <= r.strip_bound * (1.0 + 1e-6) + 1e-9);
        }

        #[test]
        fn evaluators_positive_on_domain(n in 3.0f64..1e8, alpha in 4.01f64..20.0) {
            prop_assert!(eval_antenna_requirement(n, alpha).unwrap() > 0.0);
            prop_assert!(eval_long_hop_rate_ub(n, 2.0, alpha, 0.25).unwrap() > 0.0);
            if kappa(n, 1.0, alpha) > 0.0 {
                prop_assert!(eval_cs_lemma2(n, 1.0, alpha).unwrap() > 0.0);
                prop_assert!(eval_throughput_ub(n, 1.0, alpha).unwrap() > 0.0);
            }
        }
    }
}
