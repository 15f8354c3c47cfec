//! Greedy long-hop routing.
//!
//! From the current BS, hop to the BS within range `d_c` that is closest to
//! the destination, provided it is strictly closer than the current one.
//! Equally good candidates are broken by a seeded draw. Every hop is a
//! unit-rate link, so the per-connection rate is `1 / max relay load`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{NetworkRealization, Point};
use crate::seed::{derived_rng, stream};

#[derive(Debug, Clone, PartialEq)]
pub struct LongHopResult {
    /// Hops per connection (indexed by source); `None` when the greedy walk
    /// got stuck.
    pub hop_counts: Vec<Option<usize>>,
    /// Hops received by each BS.
    pub relay_load: Vec<u32>,
    pub max_relay_load: u32,
    pub stuck: usize,
}

impl LongHopResult {
    /// `1 / max_relay_load`, or 0 when nothing was routed.
    pub fn per_connection_rate(&self) -> f64 {
        if self.max_relay_load == 0 {
            0.0
        } else {
            1.0 / self.max_relay_load as f64
        }
    }

    pub fn mean_hops(&self) -> f64 {
        let done: Vec<usize> = self.hop_counts.iter().flatten().copied().collect();
        if done.is_empty() {
            0.0
        } else {
            done.iter().sum::<usize>() as f64 / done.len() as f64
        }
    }
}

/// Uniform bucket grid for range queries.
struct Grid {
    cell: f64,
    dim: usize,
    buckets: Vec<Vec<usize>>,
}

impl Grid {
    fn new(points: &[Point], side: f64, cell: f64) -> Self {
        let dim = ((side / cell).ceil() as usize).clamp(1, 4096);
        let cell = side / dim as f64;
        let mut buckets = vec![Vec::new(); dim * dim];
        for (k, p) in points.iter().enumerate() {
            let (i, j) = Self::key(p, cell, dim);
            buckets[j * dim + i].push(k);
        }
        Grid { cell, dim, buckets }
    }

    fn key(p: &Point, cell: f64, dim: usize) -> (usize, usize) {
        let f = |v: f64| ((v / cell).floor().max(0.0) as usize).min(dim - 1);
        (f(p.x), f(p.y))
    }

    fn within<'a>(&'a self, p: &Point, r: f64, points: &'a [Point]) -> impl Iterator<Item = usize> + 'a {
        let reach = (r / self.cell).ceil() as usize;
        let (ci, cj) = Self::key(p, self.cell, self.dim);
        let (i0, i1) = (ci.saturating_sub(reach), (ci + reach).min(self.dim - 1));
        let (j0, j1) = (cj.saturating_sub(reach), (cj + reach).min(self.dim - 1));
        let p = *p;
        (j0..=j1)
            .flat_map(move |j| (i0..=i1).map(move |i| j * self.dim + i))
            .flat_map(move |b| self.buckets[b].iter().copied())
            .filter(move |&k| points[k].dist(&p) <= r)
    }
}

pub fn long_hop_route(net: &NetworkRealization, d_c: f64, seed: u64) -> Result<LongHopResult> {
    if !(d_c > 0.0 && d_c.is_finite()) {
        return Err(Error::param("d_c", format!("must be positive, got {d_c}")));
    }
    let pts = net.positions();
    let n = pts.len();
    let grid = Grid::new(pts, net.bounds().side(), d_c);
    let nn = (0..n)
        .map(|k| {
            grid.within(&pts[k], d_c, pts)
                .filter(|&j| j != k)
                .map(|j| pts[j].dist(&pts[k]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    if n > 1 && !nn.is_finite() {
        return Err(Error::param(
            "d_c",
            format!("range {d_c} is below every nearest-neighbor distance"),
        ));
    }

    let mut hop_counts = Vec::with_capacity(n);
    let mut relay_load = vec![0u32; n];
    let mut stuck = 0;
    for (s, &d) in net.pairing().iter().enumerate() {
        let mut rng = derived_rng(seed, stream::ROUTING, s as u64);
        let mut u = s;
        let mut path = Vec::new();
        let ok = loop {
            if u == d {
                break true;
            }
            let here = pts[u].dist(&pts[d]);
            if here <= d_c {
                path.push(d);
                break true;
            }
            let mut best = here;
            let mut ties: Vec<usize> = Vec::new();
            for v in grid.within(&pts[u], d_c, pts) {
                let dv = pts[v].dist(&pts[d]);
                if dv < best - 1e-12 * here {
                    best = dv;
                    ties.clear();
                    ties.push(v);
                } else if (dv - best).abs() <= 1e-12 * here && dv < here {
                    ties.push(v);
                }
            }
            if ties.is_empty() {
                break false;
            }
            ties.sort_unstable();
            u = ties[rng.random_range(0..ties.len())];
            path.push(u);
        };
        if ok {
            for &b in &path {
                relay_load[b] += 1;
            }
            hop_counts.push(Some(path.len()));
        } else {
            stuck += 1;
            hop_counts.push(None);
        }
    }
    let max_relay_load = relay_load.iter().copied().max().unwrap_or(0);
    Ok(LongHopResult {
        hop_counts,
        relay_load,
        max_relay_load,
        stuck,
    })
}
