//! Four-phase routing over a highway system and per-connection rates.
//!
//! Connection `s -> d` enters the horizontal highway assigned to `s` at its
//! BS nearest to `s` (phase 1), rides it to where it meets the vertical
//! highway assigned to `d` (phase 2, including the transfer hop when the
//! two highways do not share a BS), rides that to its BS nearest to `d`
//! (phase 3) and leaves it for `d` (phase 4).

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::NetworkRealization;

use super::flow::erase_loops;
use super::highways::HighwaySystem;

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionRoute {
    pub source: usize,
    pub destination: usize,
    /// BS sequence from source to destination; empty when unroutable.
    pub path: Vec<usize>,
    /// Phase (1..=4) of hop `i`, i.e. `path[i] -> path[i+1]`.
    pub phases: Vec<u8>,
    pub horizontal: Option<usize>,
    pub vertical: Option<usize>,
}

impl ConnectionRoute {
    pub fn is_routable(&self) -> bool {
        !self.path.is_empty()
    }

    pub fn hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    /// BS reached by the phase-1 hop.
    pub fn entry_bs(&self) -> Option<usize> {
        self.phases.iter().position(|&p| p == 1).map(|i| self.path[i + 1])
    }

    /// BS that sends the phase-4 hop.
    pub fn exit_bs(&self) -> Option<usize> {
        self.phases.iter().position(|&p| p == 4).map(|i| self.path[i])
    }

    /// Length of the phase-1 hop, if any.
    pub fn entry_distance(&self, net: &NetworkRealization) -> Option<f64> {
        self.phases
            .iter()
            .position(|&p| p == 1)
            .map(|i| net.positions()[self.path[i]].dist(&net.positions()[self.path[i + 1]]))
    }
}

#[derive(Debug, Clone)]
pub struct RoutePlan {
    routes: Vec<ConnectionRoute>,
    bs_load: Vec<u32>,
    horizontal_load: Vec<u32>,
    vertical_load: Vec<u32>,
    entry_sharing: Vec<u32>,
    exit_sharing: Vec<u32>,
}

impl RoutePlan {
    pub fn routes(&self) -> &[ConnectionRoute] {
        &self.routes
    }

    /// Connections received by each BS (sources not counted), so the sum
    /// equals the total hop count.
    pub fn bs_load(&self) -> &[u32] {
        &self.bs_load
    }

    pub fn horizontal_load(&self) -> &[u32] {
        &self.horizontal_load
    }

    pub fn vertical_load(&self) -> &[u32] {
        &self.vertical_load
    }

    pub fn max_highway_load(&self) -> u32 {
        self.horizontal_load
            .iter()
            .chain(&self.vertical_load)
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn unroutable(&self) -> usize {
        self.routes.iter().filter(|r| !r.is_routable()).count()
    }

    pub fn total_hops(&self) -> usize {
        self.routes.iter().map(|r| r.hops()).sum()
    }
}

pub fn plan_routes(net: &NetworkRealization, system: &HighwaySystem) -> Result<RoutePlan> {
    if system.assignment().len() != net.len() {
        return Err(Error::Dimension(format!(
            "highway system covers {} BSs, network has {}",
            system.assignment().len(),
            net.len()
        )));
    }
    let n = net.len();
    let mut plan = RoutePlan {
        routes: Vec::with_capacity(n),
        bs_load: vec![0; n],
        horizontal_load: vec![0; system.horizontal().len()],
        vertical_load: vec![0; system.vertical().len()],
        entry_sharing: vec![0; n],
        exit_sharing: vec![0; n],
    };
    for (s, &d) in net.pairing().iter().enumerate() {
        let route = route_one(net, system, s, d);
        for &b in route.path.iter().skip(1) {
            plan.bs_load[b] += 1;
        }
        if route.phases.contains(&2) {
            plan.horizontal_load[route.horizontal.unwrap()] += 1;
        }
        if route.phases.contains(&3) {
            plan.vertical_load[route.vertical.unwrap()] += 1;
        }
        if let Some(e) = route.entry_bs() {
            plan.entry_sharing[e] += 1;
        }
        if let Some(x) = route.exit_bs() {
            plan.exit_sharing[x] += 1;
        }
        plan.routes.push(route);
    }
    Ok(plan)
}

fn nearest_on(net: &NetworkRealization, hw: &[usize], k: usize) -> usize {
    let p = net.positions()[k];
    let mut best = (f64::INFINITY, 0);
    for (i, &b) in hw.iter().enumerate() {
        let d = net.positions()[b].dist(&p);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

fn route_one(net: &NetworkRealization, sys: &HighwaySystem, s: usize, d: usize) -> ConnectionRoute {
    let (h_id, v_id) = (sys.assignment()[s].0, sys.assignment()[d].1);
    let mut route = ConnectionRoute {
        source: s,
        destination: d,
        path: Vec::new(),
        phases: Vec::new(),
        horizontal: h_id,
        vertical: v_id,
    };
    let (Some(h_id), Some(v_id)) = (h_id, v_id) else {
        return route;
    };
    let hw = &sys.horizontal()[h_id].bs;
    let vw = &sys.vertical()[v_id].bs;
    let pos = net.positions();
    let e = nearest_on(net, hw, s);
    let x = nearest_on(net, vw, d);

    // Transfer point: fewest highway hops among BS pairs within hop reach,
    // then shortest transfer hop.
    let mut best: Option<(usize, f64, usize, usize)> = None;
    let mut closest = (f64::INFINITY, 0, 0);
    for (i, &a) in hw.iter().enumerate() {
        for (j, &b) in vw.iter().enumerate() {
            let gap = pos[a].dist(&pos[b]);
            if gap < closest.0 {
                closest = (gap, i, j);
            }
            if gap > sys.hop_cap() + 1e-12 {
                continue;
            }
            let cost = e.abs_diff(i) + j.abs_diff(x) + usize::from(a != b);
            if best.is_none_or(|(bc, bg, _, _)| cost < bc || (cost == bc && gap < bg)) {
                best = Some((cost, gap, i, j));
            }
        }
    }
    let (ti, tj) = best.map_or((closest.1, closest.2), |(_, _, i, j)| (i, j));

    let mut walk = vec![s];
    let mut phases = Vec::new();
    let mut push = |b: usize, phase: u8, walk: &mut Vec<usize>| {
        if *walk.last().unwrap() != b {
            walk.push(b);
            phases.push(phase);
        }
    };
    push(hw[e], 1, &mut walk);
    for i in steps(e, ti) {
        push(hw[i], 2, &mut walk);
    }
    push(vw[tj], 2, &mut walk);
    for j in steps(tj, x) {
        push(vw[j], 3, &mut walk);
    }
    push(d, 4, &mut walk);

    // Loop erasure keeps the arrival phase of each surviving BS.
    let mut kept: Vec<(usize, u8)> = Vec::with_capacity(walk.len());
    for (i, &b) in walk.iter().enumerate() {
        let phase = if i == 0 { 0 } else { phases[i - 1] };
        match kept.iter().position(|&(k, _)| k == b) {
            Some(pos) => kept.truncate(pos + 1),
            None => kept.push((b, phase)),
        }
    }
    debug_assert_eq!(erase_loops(&walk), kept.iter().map(|&(b, _)| b).collect::<Vec<_>>());
    route.phases = kept[1..].iter().map(|&(_, p)| p).collect();
    route.path = kept.into_iter().map(|(b, _)| b).collect();
    route
}

/// Indices strictly after `from` up to and including `to`.
fn steps(from: usize, to: usize) -> Box<dyn Iterator<Item = usize>> {
    if to >= from {
        Box::new(from + 1..=to)
    } else {
        Box::new((to..from).rev())
    }
}

/// Which phase limits a connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bottleneck {
    Entry,
    Highway,
    Exit,
    Unroutable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionRate {
    pub rate: f64,
    pub bottleneck: Bottleneck,
}

/// `min(highway_rate / max load on phase-2/3 receivers, entry_rate / entry
/// sharing, entry_rate / exit sharing)`; phases a connection does not use
/// impose no limit. Unroutable connections get rate 0.
pub fn per_connection_rate(plan: &RoutePlan, highway_rate: f64, entry_rate: f64) -> Result<Vec<ConnectionRate>> {
    if !(highway_rate > 0.0 && entry_rate > 0.0) {
        return Err(Error::param("highway_rate", "rates must be positive"));
    }
    Ok(plan
        .routes
        .iter()
        .map(|r| {
            if !r.is_routable() {
                return ConnectionRate {
                    rate: 0.0,
                    bottleneck: Bottleneck::Unroutable,
                };
            }
            let mut best = (f64::INFINITY, Bottleneck::Highway);
            let mut consider = |v: f64, b: Bottleneck| {
                if v < best.0 {
                    best = (v, b);
                }
            };
            if let Some(e) = r.entry_bs() {
                consider(entry_rate / plan.entry_sharing[e] as f64, Bottleneck::Entry);
            }
            let load = r
                .phases
                .iter()
                .zip(&r.path[1..])
                .filter(|(&p, _)| p == 2 || p == 3)
                .map(|(_, &b)| plan.bs_load[b])
                .max();
            if let Some(l) = load {
                consider(highway_rate / l as f64, Bottleneck::Highway);
            }
            if let Some(x) = r.exit_bs() {
                consider(entry_rate / plan.exit_sharing[x] as f64, Bottleneck::Exit);
            }
            ConnectionRate {
                rate: best.0,
                bottleneck: best.1,
            }
        })
        .collect())
}

/// CSV `conn_id,phase,hop_index,bs_index`: one line per hop, naming the
/// receiving BS. `conn_id` is the source index.
pub fn write_route_plan<W: Write>(plan: &RoutePlan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["conn_id", "phase", "hop_index", "bs_index"])?;
    for r in &plan.routes {
        for (i, (&p, &b)) in r.phases.iter().zip(&r.path[1..]).enumerate() {
            w.write_record([r.source.to_string(), p.to_string(), i.to_string(), b.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
