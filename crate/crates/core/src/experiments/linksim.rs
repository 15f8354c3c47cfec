//! Monte-Carlo evaluation of one short-hop link inside a lattice.
//!
//! Each trial draws fresh antenna positions for every BS that matters and
//! evaluates the rate of the measured link against the active interferers.
//! Interferers farther than `exact_radius` (in units of `c`) from the
//! receiver enter `R` only through their phase-averaged contribution
//! `p P g_i I`, where `g_i` is the per-entry power gain.

use faer::{c64, Mat};
use rand::Rng;

use crate::channel::{fill_los_block, AntennaArray, ChannelMatrix, LinkBudget};
use crate::error::{Error, Result};
use crate::geometry::{NetworkRealization, Point};
use crate::linalg;
use crate::linkrate::{ergodic_lower_bound, link_rate_raw};
use crate::seed::{derive_seed, derived_rng, stream};

/// Which BSs share the measured link's resource slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReusePattern {
    /// Every BS transmits.
    Full,
    /// Each BS joins the slot independently with probability `1/p`.
    Random,
    /// `(row mod 2, col mod 2)` cosets.
    Det4,
    /// `(row mod 3, col mod 3)` cosets.
    Det9,
    /// `(2 row + col) mod 4` cosets.
    Det4Skew,
}

impl ReusePattern {
    pub fn name(self) -> &'static str {
        match self {
            ReusePattern::Full => "full",
            ReusePattern::Random => "random",
            ReusePattern::Det4 => "det4",
            ReusePattern::Det9 => "det9",
            ReusePattern::Det4Skew => "det4_skew",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "full" => ReusePattern::Full,
            "random" => ReusePattern::Random,
            "det4" => ReusePattern::Det4,
            "det9" => ReusePattern::Det9,
            "det4_skew" => ReusePattern::Det4Skew,
            _ => return None,
        })
    }

    /// Reuse factors the pattern is defined for; `None` means any `p >= 1`.
    pub fn fixed_reuse(self) -> Option<u32> {
        match self {
            ReusePattern::Full => Some(1),
            ReusePattern::Random => None,
            ReusePattern::Det4 | ReusePattern::Det4Skew => Some(4),
            ReusePattern::Det9 => Some(9),
        }
    }

    pub fn supports(self, p: u32) -> bool {
        p >= 1 && self.fixed_reuse().map_or(true, |f| f == p || p == 1)
    }

    /// True when lattice cell `(row, col)` is in the same deterministic
    /// coset as the transmitter at `tx`. Always true for `Full` and `Random`.
    fn same_coset(self, tx: (usize, usize), row: usize, col: usize) -> bool {
        let dr = row as i64 - tx.0 as i64;
        let dc = col as i64 - tx.1 as i64;
        match self {
            ReusePattern::Full | ReusePattern::Random => true,
            ReusePattern::Det4 => dr.rem_euclid(2) == 0 && dc.rem_euclid(2) == 0,
            ReusePattern::Det9 => dr.rem_euclid(3) == 0 && dc.rem_euclid(3) == 0,
            ReusePattern::Det4Skew => (2 * dr + dc).rem_euclid(4) == 0,
        }
    }
}

/// Fixed part of a link experiment.
#[derive(Debug, Clone)]
pub struct LinkSetup {
    pub budget: LinkBudget,
    pub psi: usize,
    pub array_side: f64,
    /// `(row, col)` of the receiving BS.
    pub rx: (usize, usize),
    /// `(row, col)` of the transmitting BS.
    pub tx: (usize, usize),
    /// In units of `c`; `f64::INFINITY` simulates every interferer exactly.
    pub exact_radius: f64,
}

/// Indices of the BSs active in the measured slot (excluding both ends of
/// the link), for one trial.
pub fn active_interferers(
    net: &NetworkRealization,
    setup: &LinkSetup,
    pattern: ReusePattern,
    p: u32,
    activation_seed: u64,
) -> Result<Vec<usize>> {
    let info = net
        .lattice_info()
        .ok_or_else(|| Error::Config("reuse patterns need a lattice network".into()))?;
    if !pattern.supports(p) {
        return Err(Error::Config(format!(
            "pattern {} is not defined for p = {p}",
            pattern.name()
        )));
    }
    let rx = info.index(setup.rx.0, setup.rx.1);
    let tx = info.index(setup.tx.0, setup.tx.1);
    let mut rng = crate::seed::rng_from_seed(activation_seed);
    let mut out = Vec::new();
    for k in 0..net.len() {
        // Draw for every BS so the activation of BS k does not depend on
        // which other indices are skipped.
        let u: f64 = rng.random();
        if k == rx || k == tx {
            continue;
        }
        let (row, col) = info.row_col(k);
        let on = match pattern {
            ReusePattern::Random => p == 1 || u < 1.0 / p as f64,
            _ if p == 1 => true,
            _ => pattern.same_coset(setup.tx, row, col),
        };
        if on {
            out.push(k);
        }
    }
    Ok(out)
}

/// Rate of the measured link for one draw of antenna positions.
///
/// `antenna_seed` keys the arrays: BS `k` gets
/// `derive_seed(antenna_seed, ANTENNAS, k)`, so an array does not depend on
/// which other BSs are active.
pub fn link_trial(
    net: &NetworkRealization,
    setup: &LinkSetup,
    interferers: &[usize],
    p: u32,
    antenna_seed: u64,
) -> Result<f64> {
    let (h, r) = trial_matrices(net, setup, interferers, p, antenna_seed)?;
    link_rate_raw(h.as_ref(), r.as_ref(), setup.budget.power(), setup.psi, p)
}

/// [`link_trial`] plus the ergodic lower bound evaluated on the same
/// desired channel, with expected covariance `q I`.
pub fn link_trial_with_bound(
    net: &NetworkRealization,
    setup: &LinkSetup,
    interferers: &[usize],
    p: u32,
    antenna_seed: u64,
    q: f64,
) -> Result<(f64, f64)> {
    let (h, r) = trial_matrices(net, setup, interferers, p, antenna_seed)?;
    let power = setup.budget.power();
    let rate = link_rate_raw(h.as_ref(), r.as_ref(), power, setup.psi, p)?;
    let bound = ergodic_lower_bound(&ChannelMatrix::from_entries(h, 0.0, 0.0), q, power, setup.psi)?;
    Ok((rate, bound))
}

fn trial_matrices(
    net: &NetworkRealization,
    setup: &LinkSetup,
    interferers: &[usize],
    p: u32,
    antenna_seed: u64,
) -> Result<(Mat<c64>, Mat<c64>)> {
    let info = net
        .lattice_info()
        .ok_or_else(|| Error::Config("link trials need a lattice network".into()))?;
    let c = info.spacing;
    let pos = net.positions();
    let rx_k = info.index(setup.rx.0, setup.rx.1);
    let tx_k = info.index(setup.tx.0, setup.tx.1);
    let psi = setup.psi;
    let array = |k: usize| -> Result<AntennaArray> {
        let mut rng = derived_rng(antenna_seed, stream::ANTENNAS, k as u64);
        AntennaArray::sample(pos[k], setup.array_side, psi, &mut rng)
    };
    let rx = array(rx_k)?;
    let tx = array(tx_k)?;
    let rx_c = pos[rx_k];

    let mut h = Mat::<c64>::zeros(psi, psi);
    let d_link = rx_c.dist(&pos[tx_k]);
    fill_los_block(rx.positions(), tx.positions(), setup.budget.amplitude(d_link), setup.budget.wavelength, h.as_mut())?;

    let boosted = p as f64 * setup.budget.power();
    let mut exact: Vec<(usize, f64)> = Vec::new();
    let mut mean_field = 0.0;
    for &k in interferers {
        let d = rx_c.dist(&pos[k]);
        let amp = setup.budget.amplitude(d);
        if d <= setup.exact_radius * c {
            exact.push((k, amp));
        } else {
            mean_field += boosted * amp * amp;
        }
    }

    let mut g = Mat::<c64>::zeros(psi, psi * exact.len());
    for (j, &(k, amp)) in exact.iter().enumerate() {
        let arr = array(k)?;
        let block = g.as_mut().submatrix_mut(0, j * psi, psi, psi);
        fill_los_block(rx.positions(), arr.positions(), amp, setup.budget.wavelength, block)?;
    }
    let mut r = Mat::<c64>::zeros(psi, psi);
    for i in 0..psi {
        r[(i, i)] = c64::new(1.0 + mean_field, 0.0);
    }
    linalg::accumulate_gram(r.as_mut(), g.as_ref(), boosted / psi as f64);
    Ok((h, r))
}

/// Distance-ordered list of lattice cells around `center`, used to pick
/// reasonable `exact_radius` values in tests.
pub fn count_within(net: &NetworkRealization, center: Point, radius: f64) -> usize {
    net.positions().iter().filter(|q| q.dist(&center) <= radius).count()
}

/// Seeds for trial `t` of a run keyed by `master`.
pub fn trial_seeds(master: u64, t: u64) -> (u64, u64) {
    (
        derive_seed(master, stream::ANTENNAS, t),
        derive_seed(master, stream::ACTIVATION, t),
    )
}
