//! One function per scenario kind.
//!
//! Trials run on the rayon pool and are collected by index, so results do
//! not depend on scheduling.

use rayon::prelude::*;

use crate::bounds::{cs_series, cutset_numeric_with, eval_cs_lemma2, CutSetOptions, CutSetRow};
use crate::error::{Error, Result};
use crate::experiments::config::{GridTiling, ScenarioConfig, ScenarioKind};
use crate::experiments::linksim::{active_interferers, link_trial, link_trial_with_bound, trial_seeds, LinkSetup, ReusePattern};
use crate::experiments::output::{num, Plot, ScenarioOutput, Series, Table};
use crate::experiments::stats::{histogram, Summary, SweepResult};
use crate::geometry::{NetworkBox, NetworkRealization};
use crate::linkrate::{long_hop_range, ring_interference_constant, RateSample};
use crate::routing::{build_highways, long_hop_route, per_connection_rate, plan_routes, HighwayCensus};
use crate::seed::{derive_seed, stream};

fn par_trials<T: Send>(trials: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..trials).into_par_iter().map(f).collect()
}

fn output(cfg: &ScenarioConfig, sweep: SweepResult) -> ScenarioOutput {
    ScenarioOutput {
        kind: cfg.kind(),
        master_seed: cfg.scenario.master_seed,
        sweep,
        tables: Vec::new(),
        plots: Vec::new(),
        notices: Vec::new(),
        metadata: Vec::new(),
        config_text: String::new(),
    }
}

fn lattice(cfg: &ScenarioConfig, dim: usize, spacing: f64, seed: u64) -> Result<NetworkRealization> {
    NetworkRealization::lattice(dim, spacing, cfg.geometry.perturbation * spacing, seed)
}

fn summary(values: &[f64]) -> Result<Summary> {
    Summary::of(values).ok_or_else(|| Error::Numerical("empty sample".into()))
}

/// Mean link rate at full reuse on a `dim x dim` lattice.
fn mean_link_rate(cfg: &ScenarioConfig, dim: usize, psi: usize, salt: u64) -> Result<Vec<f64>> {
    let c = cfg.geometry.spacing;
    let net = lattice(cfg, dim, c, derive_seed(cfg.scenario.master_seed, stream::GEOMETRY, salt))?;
    let setup = cfg.link_setup(dim, psi, cfg.channel.exact_radius)?;
    let master = derive_seed(cfg.scenario.master_seed, stream::ANTENNAS, salt);
    link_rates(&net, &setup, ReusePattern::Full, 1, master, cfg.scenario.trials)
}

fn link_rates(
    net: &NetworkRealization,
    setup: &LinkSetup,
    pattern: ReusePattern,
    p: u32,
    master: u64,
    trials: u64,
) -> Result<Vec<f64>> {
    par_trials(trials, |t| {
        let (antennas, activation) = trial_seeds(master, t);
        let active = active_interferers(net, setup, pattern, p, activation)?;
        link_trial(net, setup, &active, p, antennas)
    })
}

/// Mean link rate versus reuse factor.
pub fn run_fig_reuse(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let master = cfg.scenario.master_seed;
    let net = lattice(cfg, g.grid_dim, g.spacing, master)?;
    let setup = cfg.link_setup(g.grid_dim, cfg.channel.psi, cfg.channel.exact_radius)?;
    let trials = cfg.scenario.trials;

    let mut sweep = SweepResult::new("p", "link_rate_bps_hz");
    let mut table = Table::new("", &["pattern", "p", "mean_rate", "std_rate", "trials"]);
    for (pattern, p) in cfg.reuse_points()? {
        let rates = link_rates(&net, &setup, pattern, p, master, trials)?;
        let s = summary(&rates)?;
        table.push(vec![pattern.name().into(), p.to_string(), num(s.mean), num(s.std), trials.to_string()]);
        sweep.push(pattern.name(), p as f64, s);
    }

    let mut out = output(cfg, sweep);
    let series = out
        .sweep
        .series()
        .into_iter()
        .map(|name| Series {
            name: name.to_string(),
            points: out.sweep.points.iter().filter(|p| p.series == name).map(|p| (p.x, p.summary.mean)).collect(),
        })
        .collect();
    out.plots.push(Plot::Lines {
        name: String::new(),
        title: format!("Mean link rate vs. reuse factor (psi = {})", cfg.channel.psi),
        x_label: "reuse factor p".into(),
        y_label: "mean rate [bps/Hz]".into(),
        log_x: false,
        series,
    });
    out.tables.push(table);
    out.metadata.push(("trials_per_point".into(), trials.to_string()));
    Ok(out)
}

/// Link rate distribution with the ergodic lower bound.
pub fn run_rate_pdf(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let r = &cfg.rate_pdf;
    let master = cfg.scenario.master_seed;
    let net = lattice(cfg, g.grid_dim, g.spacing, master)?;
    let mut sweep = SweepResult::new("psi", "link_rate_bps_hz");
    let mut main = Table::new(
        "",
        &["psi", "trials", "mean_rate", "std_rate", "cv", "q05", "median", "q95", "ergodic_lb", "ring_q"],
    );
    let mut hist = Table::new("hist", &["psi", "bin_lo", "bin_hi", "count", "density"]);
    let mut samples = Table::new("samples", &RateSample::HEADER);
    let mut plots = Vec::new();
    let mut notices = Vec::new();

    for ((&psi, &trials), &radius) in r.psi_values.iter().zip(&r.trials).zip(&r.exact_radius) {
        if trials < 100 {
            notices.push(format!("psi = {psi}: {trials} trials < 100, histogram will be unstable"));
        }
        let setup = cfg.link_setup(g.grid_dim, psi, radius)?;
        let rings = (g.grid_dim - 1) / 2;
        let q = ring_interference_constant(cfg.channel.alpha, setup.budget.power() * setup.budget.ref_snr(), rings.max(1))?.q;
        let draws = par_trials(trials, |t| {
            let (antennas, activation) = trial_seeds(master, t);
            let active = active_interferers(&net, &setup, ReusePattern::Full, 1, activation)?;
            let (rate, bound) = link_trial_with_bound(&net, &setup, &active, 1, antennas, q)?;
            Ok((antennas, rate, bound))
        })?;
        let rates: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let lb = draws.iter().map(|d| d.2).sum::<f64>() / draws.len() as f64;
        let s = summary(&rates)?;
        main.push(vec![
            psi.to_string(),
            trials.to_string(),
            num(s.mean),
            num(s.std),
            num(s.cv()),
            num(s.q05()),
            num(s.median()),
            num(s.q95()),
            num(lb),
            num(q),
        ]);

        let counts = histogram(&rates, s.min, s.max, r.bins);
        let width = (s.max - s.min) / r.bins as f64;
        let mut bins = Vec::with_capacity(r.bins);
        for (k, &cnt) in counts.iter().enumerate() {
            let lo = s.min + width * k as f64;
            let hi = if k + 1 == r.bins { s.max } else { lo + width };
            let density = if width > 0.0 { cnt as f64 / (trials as f64 * width) } else { 0.0 };
            hist.push(vec![psi.to_string(), num(lo), num(hi), cnt.to_string(), num(density)]);
            bins.push((lo, hi, density));
        }
        for &(seed, rate, _) in &draws {
            samples.push(
                RateSample {
                    seed,
                    psi,
                    reuse_factor: 1,
                    rate_bps_hz: rate,
                }
                .record()
                .to_vec(),
            );
        }
        plots.push(Plot::Histogram {
            name: format!("psi{psi}"),
            title: format!("Link rate pdf, psi = {psi}"),
            x_label: "rate [bps/Hz]".into(),
            bins,
            markers: vec![("mean".into(), s.mean), ("ergodic LB".into(), lb)],
        });
        sweep.push("full", psi as f64, s);
    }

    let mut out = output(cfg, sweep);
    out.tables = vec![main, hist, samples];
    out.plots = plots;
    out.notices = notices;
    out.metadata.push(("trials".into(), format!("{:?}", r.trials)));
    Ok(out)
}

/// Numeric cut-set chain on PPP realizations and the closed-form ratio
/// table.
pub fn run_cutset_sweep(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let c = &cfg.cutset;
    let alpha = cfg.channel.alpha;
    let master = cfg.scenario.master_seed;
    let mut sweep = SweepResult::new("n", "strip_bound_bits");
    let mut rows = Table::new("", &CutSetRow::HEADER);
    let mut notices = Vec::new();
    let mut violations = 0usize;

    let mut point = 0u64;
    for &n in &c.n_values {
        for &psi in &c.psi_values {
            point += 1;
            let budget = cfg.budget(psi)?;
            let mut opts = CutSetOptions::new(psi, &budget);
            opts.array_side = c.array_side_fraction * budget.ref_distance;
            let results = par_trials(c.realizations, |k| {
                let seed = derive_seed(master, stream::GEOMETRY, point * 1_000_003 + k);
                let net = NetworkRealization::poisson(NetworkBox::for_unit_density(n)?, 1.0, seed)?;
                match cutset_numeric_with(&net, &opts, &budget, derive_seed(seed, stream::PHASES, 0)) {
                    Err(Error::MatrixCap { .. }) => Ok(None),
                    other => other.map(Some),
                }
            })?;
            let mut strips = Vec::new();
            for res in results {
                let Some(res) = res else {
                    notices.push(format!("n = {n}, psi = {psi}: a realization exceeded the matrix cap, skipped"));
                    continue;
                };
                let tol = 1e-6 * res.strip_bound.abs().max(1.0);
                if res.exact_logdet > res.hadamard_bound + tol || res.hadamard_bound > res.strip_bound + tol {
                    violations += 1;
                }
                strips.push(res.strip_bound);
                rows.push(CutSetRow::new(&res, alpha).record().to_vec());
            }
            if let Some(s) = Summary::of(&strips) {
                sweep.push(&format!("psi{psi}"), n, s);
            }
        }
    }

    let mut ratio = Table::new("ratio", &["n", "psi", "cs_series", "cs_lemma2", "ratio"]);
    let mut ratio_pts = Vec::new();
    let power = cfg.budget(1)?.power() * cfg.budget(1)?.ref_snr();
    for &n in &c.ratio_n_values {
        let psi = n.powf(0.25);
        let series = cs_series(n, psi, c.ratio_alpha, power)?;
        let formula = eval_cs_lemma2(n, psi, c.ratio_alpha)?;
        ratio.push(vec![num(n), num(psi), num(series), num(formula), num(series / formula)]);
        ratio_pts.push((n, series / formula));
    }

    let mut out = output(cfg, sweep);
    out.plots.push(Plot::Lines {
        name: "ratio".into(),
        title: format!("Cut-set series / closed form, alpha = {}, psi = n^(1/4)", c.ratio_alpha),
        x_label: "n".into(),
        y_label: "ratio".into(),
        log_x: true,
        series: vec![Series {
            name: "series / formula".into(),
            points: ratio_pts,
        }],
    });
    out.tables = vec![rows, ratio];
    out.notices = notices;
    out.metadata.push(("chain_violations".into(), violations.to_string()));
    out.metadata.push(("realizations_per_point".into(), c.realizations.to_string()));
    Ok(out)
}

/// Short-hop vs. long-hop per-connection rates.
pub fn run_strategy_compare(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let st = &cfg.strategy;
    let ch = &cfg.channel;
    let master = cfg.scenario.master_seed;
    let mut sweep = SweepResult::new("n", "per_connection_rate");
    let mut table = Table::new(
        "",
        &["strategy", "n", "psi", "d_c", "link_rate", "per_connection_rate", "max_load"],
    );
    let mut notices = Vec::new();

    let dim = cfg.geometry.grid_dim;
    let mut link_pts = Vec::new();
    for (k, &psi) in st.psi_values.iter().enumerate() {
        let rates = mean_link_rate(cfg, dim, psi, k as u64)?;
        let s = summary(&rates)?;
        table.push(vec![
            "link".into(),
            (dim * dim).to_string(),
            psi.to_string(),
            String::new(),
            num(s.mean),
            String::new(),
            String::new(),
        ]);
        link_pts.push((psi as f64, s.mean));
        sweep.push("link", psi as f64, s);
    }

    let (mut short_pts, mut long_pts) = (Vec::new(), Vec::new());
    for (k, &n) in st.n_values.iter().enumerate() {
        let side = (n as f64).sqrt().round() as usize;
        let psi = ch.psi_rule.psi(ch.psi, n, ch.alpha);
        let link = summary(&mean_link_rate(cfg, side, psi, 1000 + k as u64)?)?.mean;

        let net = lattice(cfg, side, 1.0, derive_seed(master, stream::PAIRING, n as u64))?;
        let sys = build_highways(&net, 1.0)?;
        let plan = plan_routes(&net, &sys)?;
        if plan.unroutable() > 0 {
            notices.push(format!("n = {n}: {} connections unroutable", plan.unroutable()));
        }
        let rates: Vec<f64> = per_connection_rate(&plan, link, link)?
            .into_iter()
            .filter(|r| r.rate > 0.0)
            .map(|r| r.rate)
            .collect();
        let s = summary(&rates)?;
        table.push(vec![
            "short_hop".into(),
            n.to_string(),
            psi.to_string(),
            String::new(),
            num(link),
            num(s.min),
            plan.max_highway_load().to_string(),
        ]);
        short_pts.push((n as f64, s.min));
        sweep.push("short_hop", n as f64, s);

        let d_c = long_hop_range(st.target_power_ratio, 1.0, psi, ch.alpha)?;
        let lh = long_hop_route(&net, d_c, derive_seed(master, stream::ROUTING, n as u64))?;
        if lh.stuck > 0 {
            notices.push(format!("n = {n}: {} long-hop connections stuck", lh.stuck));
        }
        let rate = lh.per_connection_rate();
        table.push(vec![
            "long_hop".into(),
            n.to_string(),
            psi.to_string(),
            num(d_c),
            num(1.0),
            num(rate),
            lh.max_relay_load.to_string(),
        ]);
        long_pts.push((n as f64, rate));
        sweep.push("long_hop", n as f64, summary(&[rate])?);
    }

    let mut out = output(cfg, sweep);
    out.plots.push(Plot::Lines {
        name: String::new(),
        title: "Per-connection rate vs. network size".into(),
        x_label: "n".into(),
        y_label: "per-connection rate".into(),
        log_x: true,
        series: vec![
            Series {
                name: "short hop".into(),
                points: short_pts,
            },
            Series {
                name: "long hop".into(),
                points: long_pts,
            },
        ],
    });
    out.plots.push(Plot::Lines {
        name: "link".into(),
        title: format!("Mean link rate vs. psi ({} lattice)", dim),
        x_label: "psi".into(),
        y_label: "mean rate [bps/Hz]".into(),
        log_x: false,
        series: vec![Series {
            name: "link".into(),
            points: link_pts,
        }],
    });
    out.tables.push(table);
    out.notices = notices;
    out.metadata.push(("link_trials".into(), cfg.scenario.trials.to_string()));
    Ok(out)
}

/// Highway counts on PPP networks and highway load on the lattice.
pub fn run_highway_census(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let cs = &cfg.census;
    let master = cfg.scenario.master_seed;
    let bounds = NetworkBox::new((g.n / g.density).sqrt())?;
    let census = par_trials(cfg.scenario.trials, |t| {
        let seed = derive_seed(master, stream::GEOMETRY, t);
        let net = NetworkRealization::poisson(bounds, g.density, seed)?;
        let sys = build_highways(&net, cs.cell_side)?;
        Ok((HighwayCensus::of(&sys, seed, net.len()), sys.num_slabs()))
    })?;
    let mut main = Table::new("", &HighwayCensus::HEADER);
    let (mut failed, mut slabs) = (0usize, 0usize);
    for (row, num_slabs) in &census {
        main.push(row.record().to_vec());
        failed += row.failed_slabs;
        slabs += 2 * num_slabs;
    }
    let horizontal: Vec<f64> = census.iter().map(|c| c.0.horizontal as f64).collect();

    let side = cs.lattice_grid;
    let loads = par_trials(cs.lattice_pairings, |k| {
        let net = lattice(cfg, side, 1.0, derive_seed(master, stream::PAIRING, k))?;
        let sys = build_highways(&net, 1.0)?;
        Ok(plan_routes(&net, &sys)?.max_highway_load())
    })?;
    let mut load = Table::new("load", &["pairing", "n", "max_highway_load", "sqrt_n"]);
    let n_lat = side * side;
    for (k, l) in loads.iter().enumerate() {
        load.push(vec![k.to_string(), n_lat.to_string(), l.to_string(), num((n_lat as f64).sqrt())]);
    }

    let mut sweep = SweepResult::new("n", "horizontal_highways");
    sweep.push("ppp", g.n, summary(&horizontal)?);
    let loads_f: Vec<f64> = loads.iter().map(|&l| l as f64).collect();
    sweep.push("lattice_max_load", n_lat as f64, summary(&loads_f)?);
    let mut out = output(cfg, sweep);
    out.tables = vec![main, load];
    let frac = if slabs > 0 { failed as f64 / slabs as f64 } else { 0.0 };
    out.metadata.push(("mean_horizontal".into(), num(summary(&horizontal)?.mean)));
    out.metadata.push(("failed_slab_fraction".into(), num(frac)));
    Ok(out)
}

/// BSs on the lattice boundary in clockwise order from the top-left corner.
fn perimeter(dim: usize) -> Vec<(usize, usize)> {
    if dim == 1 {
        return vec![(0, 0)];
    }
    let last = dim - 1;
    let mut out = Vec::with_capacity(4 * last);
    out.extend((0..last).map(|c| (0, c)));
    out.extend((0..last).map(|r| (r, last)));
    out.extend((1..=last).rev().map(|c| (last, c)));
    out.extend((1..=last).rev().map(|r| (r, 0)));
    out
}

/// Outbound traffic drained through boundary gateways.
pub fn run_gateway_boundary(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let gw = &cfg.gateway;
    let mut table = Table::new(
        "",
        &["n", "gateways", "rho", "max_gateway_load", "mean_gateway_load", "max_load_over_sqrt_n"],
    );
    let mut sweep = SweepResult::new("n", "gateway_load");
    let mut pts = Vec::new();
    for &n in &gw.n_values {
        let dim = (n as f64).sqrt().round() as usize;
        let ring = perimeter(dim);
        let k = ((gw.gateways_per_sqrt_n * dim as f64).round() as usize).clamp(1, ring.len());
        let gates: Vec<(usize, usize)> = (0..k).map(|j| ring[j * ring.len() / k]).collect();
        let mut served = vec![0usize; k];
        for r in 0..dim {
            for c in 0..dim {
                let d2 = |&(gr, gc): &(usize, usize)| {
                    let (dr, dc) = (gr.abs_diff(r), gc.abs_diff(c));
                    dr * dr + dc * dc
                };
                let best = (0..k).min_by_key(|&j| (d2(&gates[j]), j)).expect("at least one gateway");
                served[best] += 1;
            }
        }
        let load: Vec<f64> = served.iter().map(|&s| (1.0 - gw.rho) * s as f64).collect();
        let s = summary(&load)?;
        table.push(vec![
            n.to_string(),
            k.to_string(),
            num(gw.rho),
            num(s.max),
            num(s.mean),
            num(s.max / (n as f64).sqrt()),
        ]);
        pts.push((n as f64, s.max / (n as f64).sqrt()));
        sweep.push("boundary", n as f64, s);
    }
    let mut out = output(cfg, sweep);
    out.plots.push(Plot::Lines {
        name: String::new(),
        title: format!("Max gateway load / sqrt(n), rho = {}", gw.rho),
        x_label: "n".into(),
        y_label: "max load / sqrt(n)".into(),
        log_x: true,
        series: vec![Series {
            name: "boundary gateways".into(),
            points: pts,
        }],
    });
    out.tables.push(table);
    Ok(out)
}

/// Mini-networks around a regular grid of wired gateways.
pub fn run_gateway_grid(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let gw = &cfg.gateway;
    let master = cfg.scenario.master_seed;
    let mut table = Table::new(
        "",
        &["beta", "n", "mini_networks", "mini_size", "psi", "link_rate", "min_rate", "mean_rate"],
    );
    let mut sweep = SweepResult::new("beta", "per_connection_rate");
    let mut notices = Vec::new();
    for (bi, &beta) in gw.beta_values.iter().enumerate() {
        for (ni, &n) in gw.n_values.iter().enumerate() {
            let tiling = GridTiling::new(n, beta)?;
            let salt = (bi * 1000 + ni) as u64;
            let link = summary(&mean_link_rate(cfg, tiling.grid_dim, tiling.psi, salt)?)?.mean;
            let mini = tiling.tile_dim * tiling.tile_dim;
            let mut row = vec![
                num(beta),
                n.to_string(),
                tiling.num_tiles().to_string(),
                mini.to_string(),
                tiling.psi.to_string(),
                num(link),
            ];
            if mini < 2 {
                // Every BS has its own wired gateway: nothing to relay.
                row.extend([String::new(), String::new()]);
                table.push(row);
                continue;
            }
            let per_tile = par_trials(tiling.num_tiles() as u64, |t| {
                let seed = derive_seed(master, stream::PAIRING, salt * 1_000_003 + t);
                let net = lattice(cfg, tiling.tile_dim, 1.0, seed)?;
                let sys = build_highways(&net, 1.0)?;
                let plan = plan_routes(&net, &sys)?;
                let rates = per_connection_rate(&plan, link, link)?;
                Ok((plan.unroutable(), rates.into_iter().map(|r| r.rate).collect::<Vec<f64>>()))
            })?;
            let unroutable: usize = per_tile.iter().map(|t| t.0).sum();
            if unroutable > 0 {
                notices.push(format!("beta = {beta}, n = {n}: {unroutable} connections unroutable"));
            }
            let rates: Vec<f64> = per_tile.into_iter().flat_map(|t| t.1).filter(|&r| r > 0.0).collect();
            let s = summary(&rates)?;
            row.extend([num(s.min), num(s.mean)]);
            table.push(row);
            sweep.push(&format!("n{n}"), beta, s);
        }
    }
    let mut out = output(cfg, sweep);
    out.tables.push(table);
    out.notices = notices;
    Ok(out)
}

/// Dispatch on `scenario.kind`.
pub fn run_kind(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    match cfg.kind() {
        ScenarioKind::FigReuse => run_fig_reuse(cfg),
        ScenarioKind::RatePdf => run_rate_pdf(cfg),
        ScenarioKind::CutsetSweep => run_cutset_sweep(cfg),
        ScenarioKind::StrategyCompare => run_strategy_compare(cfg),
        ScenarioKind::HighwayCensus => run_highway_census(cfg),
        ScenarioKind::GatewayBoundary => run_gateway_boundary(cfg),
        ScenarioKind::GatewayGrid => run_gateway_grid(cfg),
    }
}
