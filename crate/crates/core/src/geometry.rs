//! Base-station point patterns, traffic pairing and the strip partition
//! used by the cut-set bound.
//!
//! Coordinates are in meters inside the square `[0, side] x [0, side]`.
//! Distances normalized by the lattice spacing `c = density^{-1/2}` are the
//! "network units" used by the closed-form bounds.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, stream};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub(crate) fn transposed(&self) -> Point {
        Point::new(self.y, self.x)
    }
}

/// The square observation window `[0, side]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkBox {
    side: f64,
}

impl NetworkBox {
    pub fn new(side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::param("side", format!("must be positive and finite, got {side}")));
        }
        Ok(NetworkBox { side })
    }

    /// Box holding `n` points on average at unit density.
    pub fn for_unit_density(n: f64) -> Result<Self> {
        Self::new(n.sqrt())
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=self.side).contains(&p.x) && (0.0..=self.side).contains(&p.y)
    }

    /// x-coordinate of the vertical center cut.
    pub fn cut(&self) -> f64 {
        0.5 * self.side
    }
}

/// Homogeneous Poisson point process restricted to `bounds`.
pub fn sample_ppp(bounds: &NetworkBox, density: f64, seed: u64) -> Result<Vec<Point>> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::param("density", format!("must be positive, got {density}")));
    }
    let mut rng = rng_from_seed(seed);
    let mean = density * bounds.area();
    let count = Poisson::new(mean)
        .map_err(|e| Error::param("density", format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let side = bounds.side();
    Ok((0..count)
        .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
        .collect())
}

/// `grid_dim^2` points, one per lattice cell.
///
/// Point `(row, col)` has index `row * grid_dim + col` and lies uniformly in
/// the centered sub-square of side `amplitude * spacing` inside cell
/// `[col c, (col+1) c) x [row c, (row+1) c)`. Amplitude 0 gives the exact
/// lattice of cell centers.
pub fn sample_perturbed_lattice(
    grid_dim: usize,
    spacing: f64,
    amplitude: f64,
    seed: u64,
) -> Result<Vec<Point>> {
    if grid_dim == 0 {
        return Err(Error::param("grid_dim", "must be at least 1"));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::param("spacing", format!("must be positive, got {spacing}")));
    }
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::param("amplitude", format!("must lie in [0, 1], got {amplitude}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(grid_dim * grid_dim);
    for row in 0..grid_dim {
        for col in 0..grid_dim {
            let (ux, uy) = if amplitude > 0.0 {
                (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            } else {
                (0.0, 0.0)
            };
            out.push(Point::new(
                (col as f64 + 0.5 + amplitude * ux) * spacing,
                (row as f64 + 0.5 + amplitude * uy) * spacing,
            ));
        }
    }
    Ok(out)
}

/// Uniform random permutation of `0..n_bs` with no fixed points.
///
/// Rejection sampling: expected number of draws is below `e`.
pub fn pair_sources_destinations(n_bs: usize, seed: u64) -> Result<Vec<usize>> {
    if n_bs < 2 {
        return Err(Error::param("n_bs", format!("pairing needs at least 2 nodes, got {n_bs}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut perm: Vec<usize> = (0..n_bs).collect();
    loop {
        perm.shuffle(&mut rng);
        if perm.iter().enumerate().all(|(i, &d)| i != d) {
            return Ok(perm);
        }
    }
}

/// Grid information kept for lattice realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeInfo {
    pub grid_dim: usize,
    pub spacing: f64,
    pub amplitude: f64,
}

impl LatticeInfo {
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.grid_dim + col
    }

    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.grid_dim, index % self.grid_dim)
    }
}

/// An immutable network snapshot: positions, traffic pairing and the
/// parameters that regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    bounds: NetworkBox,
    positions: Vec<Point>,
    pairing: Vec<usize>,
    density: f64,
    seed: u64,
    lattice: Option<LatticeInfo>,
}

impl NetworkRealization {
    /// PPP realization; positions and pairing use independent seed streams.
    pub fn poisson(bounds: NetworkBox, density: f64, seed: u64) -> Result<Self> {
        let positions = sample_ppp(&bounds, density, derive_seed(seed, stream::GEOMETRY, 0))?;
        let pairing = pair_sources_destinations(positions.len(), derive_seed(seed, stream::PAIRING, 0))?;
        Ok(NetworkRealization {
            bounds,
            positions,
            pairing,
            density,
            seed,
            lattice: None,
        })
    }

    pub fn lattice(grid_dim: usize, spacing: f64, amplitude: f64, seed: u64) -> Result<Self> {
        let positions = sample_perturbed_lattice(
            grid_dim,
            spacing,
            amplitude,
            derive_seed(seed, stream::GEOMETRY, 0),
        )?;
        let pairing = pair_sources_destinations(positions.len(), derive_seed(seed, stream::PAIRING, 0))?;
        Ok(NetworkRealization {
            bounds: NetworkBox::new(grid_dim as f64 * spacing)?,
            positions,
            pairing,
            density: 1.0 / (spacing * spacing),
            seed,
            lattice: Some(LatticeInfo {
                grid_dim,
                spacing,
                amplitude,
            }),
        })
    }

    /// Assemble from explicit parts, validating every invariant.
    pub fn from_parts(
        bounds: NetworkBox,
        positions: Vec<Point>,
        pairing: Vec<usize>,
        density: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::param("density", "must be positive"));
        }
        if let Some(p) = positions.iter().find(|p| !bounds.contains(p)) {
            return Err(Error::param("positions", format!("{p:?} lies outside the box")));
        }
        validate_pairing(&pairing, positions.len())?;
        Ok(NetworkRealization {
            bounds,
            positions,
            pairing,
            density,
            seed,
            lattice: None,
        })
    }

    /// Same geometry with a freshly drawn pairing.
    pub fn with_pairing_seed(&self, seed: u64) -> Result<Self> {
        let mut out = self.clone();
        out.pairing = pair_sources_destinations(self.positions.len(), seed)?;
        Ok(out)
    }

    pub fn bounds(&self) -> &NetworkBox {
        &self.bounds
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lattice_info(&self) -> Option<&LatticeInfo> {
        self.lattice.as_ref()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Nominal node count `density * area`, the `n` of the scaling laws.
    pub fn nominal_n(&self) -> f64 {
        self.density * self.bounds.area()
    }

    /// Lattice spacing `c = density^{-1/2}`.
    pub fn unit_distance(&self) -> f64 {
        self.density.sqrt().recip()
    }

    /// Copy rescaled to unit density (distances in network units).
    pub fn to_unit_density(&self) -> Result<Self> {
        let s = self.density.sqrt();
        Ok(NetworkRealization {
            bounds: NetworkBox::new(self.bounds.side() * s)?,
            positions: self.positions.iter().map(|p| Point::new(p.x * s, p.y * s)).collect(),
            pairing: self.pairing.clone(),
            density: 1.0,
            seed: self.seed,
            lattice: self.lattice.map(|l| LatticeInfo {
                spacing: l.spacing * s,
                ..l
            }),
        })
    }

    /// Write `index,x,y,dest_index` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "x", "y", "dest_index"])?;
        for (i, (p, d)) in self.positions.iter().zip(&self.pairing).enumerate() {
            w.write_record([
                i.to_string(),
                format!("{:.16e}", p.x),
                format!("{:.16e}", p.y),
                d.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Read back a CSV written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(input: R, bounds: NetworkBox, density: f64, seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut positions = Vec::new();
        let mut pairing = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<&str> {
                rec.get(k)
                    .ok_or_else(|| Error::param("csv", format!("row {row} has no column {k}")))
            };
            let index: usize = parse(field(0)?, "index")?;
            if index != row {
                return Err(Error::param("csv", format!("row {row} carries index {index}")));
            }
            positions.push(Point::new(parse(field(1)?, "x")?, parse(field(2)?, "y")?));
            pairing.push(parse(field(3)?, "dest_index")?);
        }
        Self::from_parts(bounds, positions, pairing, density, seed)
    }
}

fn parse<T: std::str::FromStr>(s: &str, what: &'static str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::param(what, format!("cannot parse {s:?}")))
}

fn validate_pairing(pairing: &[usize], n: usize) -> Result<()> {
    if pairing.len() != n {
        return Err(Error::param("pairing", format!("length {} for {n} nodes", pairing.len())));
    }
    let mut seen = vec![false; n];
    for (i, &d) in pairing.iter().enumerate() {
        if d >= n || seen[d] {
            return Err(Error::param("pairing", "not a bijection"));
        }
        if d == i {
            return Err(Error::param("pairing", format!("node {i} is paired with itself")));
        }
        seen[d] = true;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripMembership {
    pub side: Side,
    /// 1-based strip index; strip 1 is farthest from the cut.
    pub strip: usize,
}

/// Exponential stripping of both half-boxes around the vertical center cut.
///
/// With box side `s` there are `K = floor(ln(s/2)) + 1` strips per side.
/// Strip `i < K` holds points at distance `[s/(2e^i), s/(2e^{i-1}))` from the
/// cut (strip 1 reaches the box edge); strip `K` holds everything closer.
#[derive(Debug, Clone, PartialEq)]
pub struct StripDecomposition {
    side: f64,
    num_strips: usize,
    membership: Vec<StripMembership>,
}

impl StripDecomposition {
    pub fn num_strips(&self) -> usize {
        self.num_strips
    }

    /// Minimum distance to the cut of any point in 1-based strip `i`.
    pub fn strip_min_distance(&self, i: usize) -> f64 {
        strip_min_distance(self.side, self.num_strips, i)
    }

    pub fn membership(&self) -> &[StripMembership] {
        &self.membership
    }

    /// Number of points per strip (index 0 is strip 1) on one side.
    pub fn counts(&self, side: Side) -> Vec<usize> {
        let mut out = vec![0; self.num_strips];
        for m in self.membership.iter().filter(|m| m.side == side) {
            out[m.strip - 1] += 1;
        }
        out
    }
}

pub fn num_strips_for_side(side: f64) -> usize {
    (0.5 * side).ln().floor() as usize + 1
}

fn strip_min_distance(side: f64, num_strips: usize, i: usize) -> f64 {
    assert!(i >= 1 && i <= num_strips, "strip index {i} out of 1..={num_strips}");
    if i == num_strips {
        0.0
    } else {
        side / (2.0 * (i as f64).exp())
    }
}

pub fn strip_decompose(realization: &NetworkRealization) -> Result<StripDecomposition> {
    strip_decompose_points(realization.bounds(), realization.positions())
}

/// Points with `x < cut` are on the left, the rest (cut line included) on
/// the right.
pub fn strip_decompose_points(bounds: &NetworkBox, points: &[Point]) -> Result<StripDecomposition> {
    let side = bounds.side();
    if side < 2.0 * std::f64::consts::E {
        return Err(Error::param(
            "side",
            format!("strip decomposition needs side >= 2e, got {side}"),
        ));
    }
    let num_strips = num_strips_for_side(side);
    let cut = bounds.cut();
    let membership = points
        .iter()
        .map(|p| {
            let dist = (p.x - cut).abs();
            let strip = (1..num_strips)
                .find(|&i| dist >= strip_min_distance(side, num_strips, i))
                .unwrap_or(num_strips);
            StripMembership {
                side: if p.x < cut { Side::Left } else { Side::Right },
                strip,
            }
        })
        .collect();
    Ok(StripDecomposition {
        side,
        num_strips,
        membership,
    })
}

/// Empirical Chernoff-event frequencies against their closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationReport {
    /// Fraction of trials with `N >= 2 lambda |A|`.
    pub upper_violation_freq: f64,
    /// Fraction of trials with `N <= lambda |A| / 2`.
    pub lower_violation_freq: f64,
    /// `(e/4)^{lambda |A|}`.
    pub chernoff_upper: f64,
    /// `(2/e)^{lambda |A| / 2}`.
    pub chernoff_lower: f64,
}

pub fn chernoff_upper(mean: f64) -> f64 {
    (std::f64::consts::E / 4.0).powf(mean)
}

pub fn chernoff_lower(mean: f64) -> f64 {
    (2.0 / std::f64::consts::E).powf(0.5 * mean)
}

pub fn check_concentration(counts: &[usize], area: f64, density: f64) -> Result<ConcentrationReport> {
    if counts.is_empty() {
        return Err(Error::param("counts", "no trials"));
    }
    if !(area > 0.0 && density > 0.0) {
        return Err(Error::param("area", "area and density must be positive"));
    }
    let mean = area * density;
    let n = counts.len() as f64;
    let upper = counts.iter().filter(|&&c| c as f64 >= 2.0 * mean).count() as f64 / n;
    let lower = counts.iter().filter(|&&c| c as f64 <= 0.5 * mean).count() as f64 / n;
    Ok(ConcentrationReport {
        upper_violation_freq: upper,
        lower_violation_freq: lower,
        chernoff_upper: chernoff_upper(mean),
        chernoff_lower: chernoff_lower(mean),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_side_rejected() {
        assert!(matches!(NetworkBox::new(0.0), Err(Error::Parameter { .. })));
        let b = NetworkBox::new(1.0).unwrap();
        assert!(sample_ppp(&b, 0.0, 1).is_err());
        assert!(sample_ppp(&b, -1.0, 1).is_err());
    }

    #[test]
    fn ppp_count_is_poisson() {
        let b = NetworkBox::new(10.0).unwrap();
        let counts: Vec<f64> = (0..4000)
            .map(|s| sample_ppp(&b, 1.0, s).unwrap().len() as f64)
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // SE(mean) = sqrt(100/4000) ~ 0.16; SE(var) ~ 100 sqrt(2/4000) ~ 2.3
        assert!((mean - 100.0).abs() < 0.8, "mean {mean}");
        assert!((var - 100.0).abs() < 12.0, "var {var}");
    }

    #[test]
    fn ppp_points_inside_and_deterministic() {
        let b = NetworkBox::new(7.5).unwrap();
        let a = sample_ppp(&b, 2.0, 42).unwrap();
        assert!(a.iter().all(|p| b.contains(p)));
        assert_eq!(a, sample_ppp(&b, 2.0, 42).unwrap());
        assert_ne!(a, sample_ppp(&b, 2.0, 43).unwrap());
    }

    #[test]
    fn ppp_upper_tail_below_chernoff() {
        // side 20, density 1: mean 400, threshold 800.
        let b = NetworkBox::new(20.0).unwrap();
        let hits = (0..2000)
            .filter(|&s| sample_ppp(&b, 1.0, s).unwrap().len() >= 800)
            .count();
        assert_eq!(hits, 0, "bound is (e/4)^400 ~ {:e}", chernoff_upper(400.0));
    }

    #[test]
    fn disjoint_half_counts_uncorrelated() {
        let b = NetworkBox::new(10.0).unwrap();
        let pairs: Vec<(f64, f64)> = (0..3000)
            .map(|s| {
                let pts = sample_ppp(&b, 1.0, 1000 + s).unwrap();
                let left = pts.iter().filter(|p| p.x < 5.0).count() as f64;
                (left, pts.len() as f64 - left)
            })
            .collect();
        let n = pairs.len() as f64;
        let ml = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let mr = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov = pairs.iter().map(|p| (p.0 - ml) * (p.1 - mr)).sum::<f64>() / (n - 1.0);
        // Under independence sd(cov) ~ 50 / sqrt(3000) ~ 0.9
        assert!(cov.abs() < 3.0, "cov {cov}");
    }

    #[test]
    fn lattice_sizes_and_containment() {
        assert_eq!(sample_perturbed_lattice(23, 100.0, 1.0, 3).unwrap().len(), 529);
        let pts = sample_perturbed_lattice(2, 1.0, 1.0, 9).unwrap();
        for (k, p) in pts.iter().enumerate() {
            let (row, col) = (k / 2, k % 2);
            assert!(p.x >= col as f64 && p.x < col as f64 + 1.0);
            assert!(p.y >= row as f64 && p.y < row as f64 + 1.0);
        }
        assert!(sample_perturbed_lattice(0, 1.0, 0.0, 0).is_err());
        assert!(sample_perturbed_lattice(2, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn exact_lattice_nearest_neighbor_is_spacing() {
        let pts = sample_perturbed_lattice(6, 100.0, 0.0, 0).unwrap();
        for row in 1..5 {
            for col in 1..5 {
                let p = pts[row * 6 + col];
                let nn = pts
                    .iter()
                    .filter(|q| **q != p)
                    .map(|q| p.dist(q))
                    .fold(f64::INFINITY, f64::min);
                assert!((nn - 100.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pairing_forced_for_two() {
        for s in 0..10 {
            assert_eq!(pair_sources_destinations(2, s).unwrap(), vec![1, 0]);
        }
        assert!(pair_sources_destinations(1, 0).is_err());
        assert!(pair_sources_destinations(0, 0).is_err());
    }

    #[test]
    fn pairing_composed_with_inverse_is_identity() {
        for s in 0..50 {
            let p = pair_sources_destinations(5, s).unwrap();
            let mut inv = vec![usize::MAX; 5];
            for (i, &d) in p.iter().enumerate() {
                inv[d] = i;
            }
            for i in 0..5 {
                assert_eq!(inv[p[i]], i);
                assert_ne!(p[i], i);
            }
        }
    }

    #[test]
    fn separation_cdf_below_linear_bound() {
        // P(D <= z) <= 2z/sqrt(n) for a uniform pair in a box of side sqrt(n).
        let n = 100usize;
        let b = NetworkBox::for_unit_density(n as f64).unwrap();
        let trials = 10_000;
        let mut seps = Vec::with_capacity(trials);
        for s in 0..trials as u64 {
            let r = NetworkRealization::poisson(b, 1.0, s).unwrap();
            let src = (derive_seed(s, 99, 0) as usize) % r.len();
            let dst = r.pairing()[src];
            seps.push(r.positions()[src].dist(&r.positions()[dst]));
        }
        for z in [1.0, 2.0, 5.0] {
            let p = seps.iter().filter(|&&d| d <= z).count() as f64 / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            let bound = 2.0 * z / (n as f64).sqrt();
            assert!(p <= bound + 3.0 * se, "z {z}: {p} vs {bound}");
        }
    }

    #[test]
    fn strip_counts_for_n64() {
        // side 8: floor(ln 4) + 1 = 2 strips, strip 1 starts at 8/(2e).
        assert_eq!(num_strips_for_side(8.0), 2);
        let b = NetworkBox::new(8.0).unwrap();
        let pts = [Point::new(4.0 + 3.9, 1.0), Point::new(4.0 - 1.0, 2.0), Point::new(0.1, 3.0)];
        let d = strip_decompose_points(&b, &pts).unwrap();
        assert_eq!(d.num_strips(), 2);
        assert!((d.strip_min_distance(1) - 1.471_517_764_685_769_4).abs() < 1e-12);
        assert_eq!(d.strip_min_distance(2), 0.0);
        assert_eq!(d.membership()[0], StripMembership { side: Side::Right, strip: 1 });
        assert_eq!(d.membership()[1], StripMembership { side: Side::Left, strip: 2 });
        assert_eq!(d.membership()[2], StripMembership { side: Side::Left, strip: 1 });
    }

    #[test]
    fn points_on_cut_fall_in_last_strip() {
        let b = NetworkBox::new(40.0).unwrap();
        let pts: Vec<Point> = (0..10).map(|k| Point::new(20.0, k as f64)).collect();
        let d = strip_decompose_points(&b, &pts).unwrap();
        assert!(d.membership().iter().all(|m| m.strip == d.num_strips()));
    }

    #[test]
    fn strip_decompose_rejects_small_box() {
        let b = NetworkBox::new(5.0).unwrap();
        assert!(strip_decompose_points(&b, &[]).is_err());
    }

    #[test]
    fn chernoff_closed_forms() {
        // (e/4)^10 and (2/e)^5, frozen from a 30-digit evaluation
        assert!((chernoff_upper(10.0) - 0.021_006_074_709_707_943).abs() < 1e-12);
        assert!((chernoff_lower(10.0) - 0.215_614_303_970_734_95).abs() < 1e-12);
        let r = check_concentration(&[10, 20, 5, 11], 10.0, 1.0).unwrap();
        assert_eq!(r.upper_violation_freq, 0.25);
        assert_eq!(r.lower_violation_freq, 0.25);
        assert!(check_concentration(&[], 1.0, 1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let r = NetworkRealization::poisson(NetworkBox::new(6.0).unwrap(), 1.0, 5).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,x,y,dest_index\n"));
        let back = NetworkRealization::read_csv(&buf[..], *r.bounds(), 1.0, 5).unwrap();
        assert_eq!(back.positions(), r.positions());
        assert_eq!(back.pairing(), r.pairing());
    }
}
