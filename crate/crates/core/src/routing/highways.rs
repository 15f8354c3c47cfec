//! Percolation highways.
//!
//! The box is tiled into `m x m` cells; a cell is open when it holds at
//! least one BS. Rows of cells are grouped into slabs of `floor(ln sqrt(n))`
//! rows, and each slab contributes as many left-to-right crossings as a
//! max-flow allows. A cell holding `k` BSs can carry up to `k` crossings,
//! each through a different BS, so highways never share a BS. The `j`-th
//! crossing through a cell uses the cell's `j`-th BS by distance to the
//! cell center (ties by index).
//!
//! Consecutive highway BSs sit in 4-adjacent cells, hence at most
//! `cell_side * sqrt(5)` apart. Vertical highways are built the same way on
//! transposed coordinates.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{NetworkBox, NetworkRealization, Point};

use super::flow::FlowGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Highway {
    /// BS indices in crossing order (left to right, or bottom to top).
    pub bs: Vec<usize>,
    pub slab: usize,
}

#[derive(Debug, Clone)]
pub struct HighwaySystem {
    cell_side: f64,
    cells_per_side: usize,
    slab_height: usize,
    num_slabs: usize,
    hop_cap: f64,
    horizontal: Vec<Highway>,
    vertical: Vec<Highway>,
    failed_horizontal: usize,
    failed_vertical: usize,
    /// Per BS: (horizontal highway id, vertical highway id).
    assignment: Vec<(Option<usize>, Option<usize>)>,
}

impl HighwaySystem {
    /// Effective cell side (the box side divided by the cell count).
    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn slab_height(&self) -> usize {
        self.slab_height
    }

    pub fn num_slabs(&self) -> usize {
        self.num_slabs
    }

    pub fn hop_cap(&self) -> f64 {
        self.hop_cap
    }

    pub fn horizontal(&self) -> &[Highway] {
        &self.horizontal
    }

    pub fn vertical(&self) -> &[Highway] {
        &self.vertical
    }

    pub fn highways(&self, o: Orientation) -> &[Highway] {
        match o {
            Orientation::Horizontal => &self.horizontal,
            Orientation::Vertical => &self.vertical,
        }
    }

    /// Slabs without any crossing, per orientation.
    pub fn failed_slabs(&self, o: Orientation) -> usize {
        match o {
            Orientation::Horizontal => self.failed_horizontal,
            Orientation::Vertical => self.failed_vertical,
        }
    }

    pub fn assignment(&self) -> &[(Option<usize>, Option<usize>)] {
        &self.assignment
    }

    pub fn is_degenerate(&self) -> bool {
        self.horizontal.is_empty() || self.vertical.is_empty()
    }
}

/// Build highways for a realization.
pub fn build_highways(realization: &NetworkRealization, cell_side: f64) -> Result<HighwaySystem> {
    build_highways_points(realization.bounds(), realization.positions(), realization.nominal_n(), cell_side)
}

/// Build highways for bare points; `nominal_n` sets the slab height.
pub fn build_highways_points(
    bounds: &NetworkBox,
    points: &[Point],
    nominal_n: f64,
    cell_side: f64,
) -> Result<HighwaySystem> {
    if !(cell_side > 0.0 && cell_side.is_finite()) {
        return Err(Error::param("cell_side", format!("must be positive, got {cell_side}")));
    }
    let side = bounds.side();
    let m = ((side / cell_side).round() as usize).max(1);
    let eff = side / m as f64;
    let slab_height = slab_height_for(nominal_n).min(m);
    let num_slabs = m.div_ceil(slab_height);

    let transposed: Vec<Point> = points.iter().map(|p| p.transposed()).collect();
    let (horizontal, failed_horizontal) = crossings(points, m, eff, slab_height);
    let (vertical, failed_vertical) = crossings(&transposed, m, eff, slab_height);

    let assignment = points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let slab_h = row_of(p.y, eff, m) / slab_height;
            let slab_v = row_of(p.x, eff, m) / slab_height;
            (
                nearest_highway(points, &horizontal, slab_h, k),
                nearest_highway(points, &vertical, slab_v, k),
            )
        })
        .collect();

    Ok(HighwaySystem {
        cell_side: eff,
        cells_per_side: m,
        slab_height,
        num_slabs,
        hop_cap: eff * 5f64.sqrt(),
        horizontal,
        vertical,
        failed_horizontal,
        failed_vertical,
        assignment,
    })
}

/// `max(1, floor(ln sqrt(n)))`.
pub fn slab_height_for(nominal_n: f64) -> usize {
    if nominal_n > 1.0 {
        (0.5 * nominal_n.ln()).floor().max(1.0) as usize
    } else {
        1
    }
}

fn row_of(coord: f64, eff: f64, m: usize) -> usize {
    ((coord / eff).floor().max(0.0) as usize).min(m - 1)
}

/// Left-to-right crossings in every slab, using `(x, y)` of `points`.
fn crossings(points: &[Point], m: usize, eff: f64, slab_height: usize) -> (Vec<Highway>, usize) {
    // BSs per cell, nearest to the cell center first.
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); m * m];
    for (k, p) in points.iter().enumerate() {
        cells[row_of(p.y, eff, m) * m + row_of(p.x, eff, m)].push(k);
    }
    for (id, list) in cells.iter_mut().enumerate() {
        let center = Point::new(((id % m) as f64 + 0.5) * eff, ((id / m) as f64 + 0.5) * eff);
        list.sort_by(|&a, &b| {
            points[a]
                .dist(&center)
                .total_cmp(&points[b].dist(&center))
                .then(a.cmp(&b))
        });
    }

    let mut out = Vec::new();
    let mut failed = 0;
    let mut slab = 0;
    let mut r0 = 0;
    while r0 < m {
        let h = slab_height.min(m - r0);
        let paths = slab_crossings(&cells, m, r0, h);
        if paths.is_empty() {
            failed += 1;
        }
        let mut used = vec![0usize; m * m];
        for cell_path in paths {
            let bs = cell_path
                .into_iter()
                .map(|cell| {
                    let k = cells[cell][used[cell]];
                    used[cell] += 1;
                    k
                })
                .collect();
            out.push(Highway { bs, slab });
        }
        slab += 1;
        r0 += h;
    }
    (out, failed)
}

/// Cell sequences of a maximum set of crossings of rows `r0..r0+h`.
fn slab_crossings(cells: &[Vec<usize>], m: usize, r0: usize, h: usize) -> Vec<Vec<usize>> {
    const INF: i64 = i64::MAX / 4;
    let local = |r: usize, c: usize| r * m + c;
    let s = 2 * h * m;
    let t = s + 1;
    let mut g = FlowGraph::new(t + 1);
    for r in 0..h {
        for c in 0..m {
            let id = local(r, c);
            let count = cells[(r0 + r) * m + c].len() as i64;
            if count == 0 {
                continue;
            }
            g.add_edge(2 * id, 2 * id + 1, count);
            if c == 0 {
                g.add_edge(s, 2 * id, INF);
            }
            if c == m - 1 {
                g.add_edge(2 * id + 1, t, INF);
            }
            let mut link = |r2: usize, c2: usize| {
                if !cells[(r0 + r2) * m + c2].is_empty() {
                    g.add_edge(2 * id + 1, 2 * local(r2, c2), INF);
                }
            };
            if c + 1 < m {
                link(r, c + 1);
            }
            if c > 0 {
                link(r, c - 1);
            }
            if r + 1 < h {
                link(r + 1, c);
            }
            if r > 0 {
                link(r - 1, c);
            }
        }
    }
    if g.max_flow(s, t) == 0 {
        return Vec::new();
    }
    g.decompose_unit_paths(s, t)
        .into_iter()
        .map(|walk| {
            walk.into_iter()
                .filter(|&v| v < s && v % 2 == 0)
                .map(|v| {
                    let id = v / 2;
                    (r0 + id / m) * m + id % m
                })
                .collect()
        })
        .collect()
}

/// Highway in `slab` closest to BS `k` (falling back to every slab when
/// `slab` has none). Ties go to the lower highway id.
fn nearest_highway(points: &[Point], highways: &[Highway], slab: usize, k: usize) -> Option<usize> {
    let best = |in_slab: bool| {
        let mut best: Option<(f64, usize)> = None;
        for (id, hw) in highways.iter().enumerate() {
            if in_slab && hw.slab != slab {
                continue;
            }
            let d = hw
                .bs
                .iter()
                .map(|&b| points[b].dist(&points[k]))
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, id));
            }
        }
        best.map(|(_, id)| id)
    };
    best(true).or_else(|| best(false))
}

/// One line of a highway census.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HighwayCensus {
    pub seed: u64,
    pub n: usize,
    pub horizontal: usize,
    pub vertical: usize,
    /// Failed slabs over both orientations.
    pub failed_slabs: usize,
}

impl HighwayCensus {
    pub fn of(system: &HighwaySystem, seed: u64, n: usize) -> Self {
        HighwayCensus {
            seed,
            n,
            horizontal: system.horizontal.len(),
            vertical: system.vertical.len(),
            failed_slabs: system.failed_horizontal + system.failed_vertical,
        }
    }

    pub const HEADER: [&'static str; 5] = ["seed", "n", "horizontal", "vertical", "failed_slabs"];

    pub fn record(&self) -> [String; 5] {
        [
            self.seed.to_string(),
            self.n.to_string(),
            self.horizontal.to_string(),
            self.vertical.to_string(),
            self.failed_slabs.to_string(),
        ]
    }
}

/// CSV `seed,n,horizontal,vertical,failed_slabs`.
pub fn write_census<W: Write>(rows: &[HighwayCensus], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HighwayCensus::HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn check_structure(net: &NetworkRealization, sys: &HighwaySystem) {
        let pts = net.positions();
        for o in [Orientation::Horizontal, Orientation::Vertical] {
            let hws = sys.highways(o);
            for hw in hws {
                for w in hw.bs.windows(2) {
                    assert!(pts[w[0]].dist(&pts[w[1]]) <= sys.hop_cap() + 1e-12);
                }
            }
            for slab in 0..sys.num_slabs() {
                let mut seen = HashSet::new();
                for hw in hws.iter().filter(|h| h.slab == slab) {
                    for &b in &hw.bs {
                        assert!(seen.insert(b), "BS {b} on two highways of slab {slab}");
                    }
                }
            }
        }
        assert_eq!(sys.assignment().len(), net.len());
    }

    #[test]
    fn exact_lattice_rows_are_highways() {
        let net = NetworkRealization::lattice(23, 1.0, 0.0, 3).unwrap();
        let sys = build_highways(&net, 1.0).unwrap();
        assert_eq!(sys.horizontal().len(), 23);
        assert_eq!(sys.vertical().len(), 23);
        assert_eq!(sys.slab_height(), 3);
        assert_eq!(sys.failed_slabs(Orientation::Horizontal), 0);
        let info = net.lattice_info().unwrap().clone();
        for hw in sys.horizontal() {
            let row = info.row_col(hw.bs[0]).0;
            let want: Vec<usize> = (0..23).map(|c| info.index(row, c)).collect();
            assert_eq!(hw.bs, want);
        }
        check_structure(&net, &sys);
    }

    #[test]
    fn empty_box_fails_every_slab() {
        let b = NetworkBox::new(10.0).unwrap();
        let sys = build_highways_points(&b, &[], 100.0, 2.0).unwrap();
        assert!(sys.horizontal().is_empty() && sys.vertical().is_empty());
        assert_eq!(sys.failed_slabs(Orientation::Horizontal), sys.num_slabs());
        assert!(sys.is_degenerate());
    }

    #[test]
    fn ppp_highways_are_valid() {
        for seed in 0..5 {
            let net = NetworkRealization::poisson(NetworkBox::for_unit_density(400.0).unwrap(), 1.0, seed).unwrap();
            let sys = build_highways(&net, 2.0).unwrap();
            assert_eq!(sys.cells_per_side(), 10);
            assert!(sys.horizontal().len() >= 10, "seed {seed}: {}", sys.horizontal().len());
            check_structure(&net, &sys);
        }
    }

    #[test]
    fn census_csv() {
        let mut buf = Vec::new();
        write_census(
            &[HighwayCensus {
                seed: 1,
                n: 400,
                horizontal: 12,
                vertical: 11,
                failed_slabs: 0,
            }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "seed,n,horizontal,vertical,failed_slabs\n1,400,12,11,0\n");
    }
}
