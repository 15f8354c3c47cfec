//! Scenario configuration files.
//!
//! A config is a flat list of `section.key = value` lines (TOML dotted
//! keys). Every key except `scenario.kind` has a default; the defaults
//! reproduce the 529-BS lattice, 30 GHz, `alpha = 5`, `mu = 0 dB`,
//! `psi = 64` setup.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{LinkBudget, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::experiments::linksim::{LinkSetup, ReusePattern};

/// Environment variable that overrides `scenario.output_dir`.
pub const OUTPUT_DIR_ENV: &str = "BACKHAUL_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    FigReuse,
    RatePdf,
    CutsetSweep,
    StrategyCompare,
    HighwayCensus,
    GatewayBoundary,
    GatewayGrid,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::FigReuse,
        ScenarioKind::RatePdf,
        ScenarioKind::CutsetSweep,
        ScenarioKind::StrategyCompare,
        ScenarioKind::HighwayCensus,
        ScenarioKind::GatewayBoundary,
        ScenarioKind::GatewayGrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::FigReuse => "fig_reuse",
            ScenarioKind::RatePdf => "rate_pdf",
            ScenarioKind::CutsetSweep => "cutset_sweep",
            ScenarioKind::StrategyCompare => "strategy_compare",
            ScenarioKind::HighwayCensus => "highway_census",
            ScenarioKind::GatewayBoundary => "gateway_boundary",
            ScenarioKind::GatewayGrid => "gateway_grid",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::FigReuse => "mean link rate vs. reuse factor for random and planned reuse",
            ScenarioKind::RatePdf => "link rate distribution over antenna placements, with the ergodic lower bound",
            ScenarioKind::CutsetSweep => "numeric cut-set bound chain and closed-form ratio table",
            ScenarioKind::StrategyCompare => "short-hop vs. long-hop per-connection rate across network sizes",
            ScenarioKind::HighwayCensus => "percolation highway counts on PPP networks and lattice highway load",
            ScenarioKind::GatewayBoundary => "traffic drained through wired gateways on the network boundary",
            ScenarioKind::GatewayGrid => "network split into mini-networks around wired gateways",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// How the antenna count follows the network size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PsiRule {
    #[default]
    Fixed,
    SqrtN,
    NAlphaOver4,
}

impl PsiRule {
    pub fn psi(self, fixed: usize, n: usize, alpha: f64) -> usize {
        let n = n as f64;
        match self {
            PsiRule::Fixed => fixed,
            PsiRule::SqrtN => n.sqrt().round() as usize,
            PsiRule::NAlphaOver4 => n.powf(alpha / 4.0).round() as usize,
        }
    }
}

/// Where the carrier wavelength comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WavelengthRule {
    /// `speed of light / carrier_hz`.
    #[default]
    Carrier,
    /// `array_area / (psi * spacing)`: keeps a neighbor link at full DoF as
    /// the antenna count changes.
    InversePsi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    #[serde(default = "d_trials")]
    pub trials: u64,
    #[serde(default = "d_seed")]
    pub master_seed: u64,
    #[serde(default = "d_output")]
    pub output_dir: PathBuf,
    #[serde(default = "d_true")]
    pub svg: bool,
}

fn d_trials() -> u64 {
    400
}
fn d_seed() -> u64 {
    2024
}
fn d_output() -> PathBuf {
    PathBuf::from("out")
}
fn d_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub grid_dim: usize,
    /// Lattice spacing `c`, meters.
    pub spacing: f64,
    /// Lattice perturbation amplitude as a fraction of `c`.
    pub perturbation: f64,
    /// BS density for PPP scenarios, in BSs per `c^2`.
    pub density: f64,
    /// Nominal BS count for PPP scenarios.
    pub n: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            grid_dim: 23,
            spacing: 100.0,
            perturbation: 0.0,
            density: 1.0,
            n: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub alpha: f64,
    pub mu_db: f64,
    pub carrier_hz: f64,
    /// Array area `a`, square meters.
    pub array_area: f64,
    pub psi: usize,
    pub psi_rule: PsiRule,
    pub wavelength_rule: WavelengthRule,
    /// Interferers within this many `c` of the receiver are simulated
    /// antenna by antenna; the rest enter through their mean power.
    pub exact_radius: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection {
            alpha: 5.0,
            mu_db: 0.0,
            carrier_hz: 30e9,
            array_area: 64.0,
            psi: 64,
            psi_rule: PsiRule::Fixed,
            wavelength_rule: WavelengthRule::Carrier,
            exact_radius: 4.0,
        }
    }
}

/// Measured link; unset coordinates default to the lattice center and its
/// right-hand neighbor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub rx_row: Option<usize>,
    pub rx_col: Option<usize>,
    pub tx_row: Option<usize>,
    pub tx_col: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReuseSection {
    /// `pattern:p` entries, e.g. `"random:4"` or `"det9:9"`.
    pub points: Vec<String>,
}

impl Default for ReuseSection {
    fn default() -> Self {
        ReuseSection {
            points: ["full:1", "random:1", "random:2", "random:4", "random:9", "det4:4", "det9:9", "det4_skew:4"]
                .map(String::from)
                .to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatePdfSection {
    pub psi_values: Vec<usize>,
    /// Placements per entry of `psi_values`.
    pub trials: Vec<u64>,
    /// Exact-interference radius per entry of `psi_values`.
    pub exact_radius: Vec<f64>,
    pub bins: usize,
}

impl Default for RatePdfSection {
    fn default() -> Self {
        RatePdfSection {
            psi_values: vec![64, 256],
            trials: vec![2000, 500],
            exact_radius: vec![4.0, 3.0],
            bins: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutsetSection {
    pub n_values: Vec<f64>,
    pub psi_values: Vec<usize>,
    /// Realizations per `(n, psi)` point; `scenario.trials` is not used.
    pub realizations: u64,
    /// Array side as a fraction of `c`.
    pub array_side_fraction: f64,
    /// Path-loss exponent of the closed-form ratio table.
    pub ratio_alpha: f64,
    pub ratio_n_values: Vec<f64>,
}

impl Default for CutsetSection {
    fn default() -> Self {
        CutsetSection {
            n_values: vec![16.0, 36.0, 64.0],
            psi_values: vec![2, 4],
            realizations: 10,
            array_side_fraction: 0.08,
            ratio_alpha: 6.0,
            ratio_n_values: vec![1e2, 1e3, 1e4, 1e5, 1e6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategySection {
    /// Network sizes; each must be a perfect square.
    pub n_values: Vec<usize>,
    /// Antenna counts of the link-rate growth check.
    pub psi_values: Vec<usize>,
    /// `P / P0` of the long-hop range.
    pub target_power_ratio: f64,
}

impl Default for StrategySection {
    fn default() -> Self {
        StrategySection {
            n_values: vec![64, 256, 1024],
            psi_values: vec![16, 32, 64],
            target_power_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusSection {
    /// Percolation cell side in units of `c`.
    pub cell_side: f64,
    pub lattice_grid: usize,
    pub lattice_pairings: u64,
}

impl Default for CensusSection {
    fn default() -> Self {
        CensusSection {
            cell_side: 2.0,
            lattice_grid: 23,
            lattice_pairings: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewaySection {
    /// Fraction of traffic that stays inside the network.
    pub rho: f64,
    pub beta_values: Vec<f64>,
    /// Network sizes; each must be a perfect square.
    pub n_values: Vec<usize>,
    /// Boundary gateways per `sqrt(n)`.
    pub gateways_per_sqrt_n: f64,
}

impl Default for GatewaySection {
    fn default() -> Self {
        GatewaySection {
            rho: 0.5,
            beta_values: vec![0.0, 0.5, 1.0],
            n_values: vec![256, 4096],
            gateways_per_sqrt_n: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub reuse: ReuseSection,
    #[serde(default)]
    pub rate_pdf: RatePdfSection,
    #[serde(default)]
    pub cutset: CutsetSection,
    #[serde(default)]
    pub strategy: StrategySection,
    #[serde(default)]
    pub census: CensusSection,
    #[serde(default)]
    pub gateway: GatewaySection,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn perfect_square(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

impl ScenarioConfig {
    /// All defaults for `kind`.
    pub fn new(kind: ScenarioKind) -> Self {
        let mut cfg = ScenarioConfig {
            scenario: ScenarioSection {
                kind,
                trials: d_trials(),
                master_seed: d_seed(),
                output_dir: d_output(),
                svg: true,
            },
            geometry: GeometrySection::default(),
            channel: ChannelSection::default(),
            link: LinkSection::default(),
            reuse: ReuseSection::default(),
            rate_pdf: RatePdfSection::default(),
            cutset: CutsetSection::default(),
            strategy: StrategySection::default(),
            census: CensusSection::default(),
            gateway: GatewaySection::default(),
        };
        if kind == ScenarioKind::StrategyCompare {
            cfg.channel.alpha = 4.0;
            cfg.channel.psi_rule = PsiRule::SqrtN;
            cfg.channel.wavelength_rule = WavelengthRule::InversePsi;
            cfg.scenario.trials = 100;
        }
        if kind == ScenarioKind::GatewayGrid {
            cfg.channel.wavelength_rule = WavelengthRule::InversePsi;
            cfg.scenario.trials = 100;
        }
        if kind == ScenarioKind::HighwayCensus {
            cfg.scenario.trials = 100;
        }
        cfg
    }

    /// Parse without validating.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    /// Read, parse and validate; applies the output-dir override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            cfg.scenario.output_dir = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Emit as sorted `section.key = value` lines.
    pub fn to_flat_string(&self) -> Result<String> {
        let value = toml::Table::try_from(self).map_err(|e| cfg_err(e.to_string()))?;
        let mut out = String::new();
        for (section, body) in &value {
            let Some(table) = body.as_table() else { continue };
            for (key, v) in table {
                writeln!(out, "{section}.{key} = {v}").expect("write to String");
            }
        }
        Ok(out)
    }

    pub fn kind(&self) -> ScenarioKind {
        self.scenario.kind
    }

    /// `<scenario>_<master_seed>`
    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.kind().name(), self.scenario.master_seed)
    }

    pub fn array_side(&self) -> f64 {
        self.channel.array_area.sqrt()
    }

    pub fn wavelength(&self, psi: usize) -> f64 {
        match self.channel.wavelength_rule {
            WavelengthRule::Carrier => SPEED_OF_LIGHT / self.channel.carrier_hz,
            WavelengthRule::InversePsi => self.channel.array_area / (psi as f64 * self.geometry.spacing),
        }
    }

    pub fn budget(&self, psi: usize) -> Result<LinkBudget> {
        LinkBudget::new(self.channel.alpha, self.channel.mu_db, self.geometry.spacing, self.wavelength(psi))
    }

    /// Link setup on a `grid_dim` lattice (the configured link coordinates
    /// apply only when `grid_dim` is the configured one).
    pub fn link_setup(&self, grid_dim: usize, psi: usize, exact_radius: f64) -> Result<LinkSetup> {
        let mid = grid_dim / 2;
        let own = grid_dim == self.geometry.grid_dim;
        let pick = |v: Option<usize>, d: usize| if own { v.unwrap_or(d) } else { d };
        Ok(LinkSetup {
            budget: self.budget(psi)?,
            psi,
            array_side: self.array_side(),
            rx: (pick(self.link.rx_row, mid), pick(self.link.rx_col, mid)),
            tx: (pick(self.link.tx_row, mid), pick(self.link.tx_col, mid + 1)),
            exact_radius,
        })
    }

    /// Parsed `reuse.points`.
    pub fn reuse_points(&self) -> Result<Vec<(ReusePattern, u32)>> {
        self.reuse
            .points
            .iter()
            .map(|s| {
                let (name, p) = s
                    .split_once(':')
                    .ok_or_else(|| cfg_err(format!("reuse point `{s}` is not `pattern:p`")))?;
                let pattern =
                    ReusePattern::parse(name.trim()).ok_or_else(|| cfg_err(format!("unknown reuse pattern `{name}`")))?;
                let p: u32 = p
                    .trim()
                    .parse()
                    .map_err(|_| cfg_err(format!("reuse factor in `{s}` is not a positive integer")))?;
                if !pattern.supports(p) {
                    return Err(cfg_err(format!("pattern {} is not defined for p = {p}", pattern.name())));
                }
                Ok((pattern, p))
            })
            .collect()
    }

    /// Check every parameter the selected scenario uses.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        if s.trials == 0 {
            return Err(cfg_err("scenario.trials must be >= 1"));
        }
        let g = &self.geometry;
        if !(g.spacing > 0.0 && g.spacing.is_finite()) {
            return Err(cfg_err("geometry.spacing must be positive"));
        }
        if !(0.0..0.5).contains(&g.perturbation) {
            return Err(cfg_err("geometry.perturbation must lie in [0, 0.5)"));
        }
        let ch = &self.channel;
        if !(ch.alpha > 2.0) {
            return Err(cfg_err(format!("channel.alpha must exceed 2, got {}", ch.alpha)));
        }
        if !(ch.carrier_hz > 0.0) || !(ch.array_area > 0.0) {
            return Err(cfg_err("channel.carrier_hz and channel.array_area must be positive"));
        }
        if !ch.mu_db.is_finite() {
            return Err(cfg_err("channel.mu_db must be finite"));
        }
        if !(ch.exact_radius > 0.0) {
            return Err(cfg_err("channel.exact_radius must be positive"));
        }
        if self.array_side() >= g.spacing {
            return Err(cfg_err("antenna arrays must be smaller than the BS spacing"));
        }
        let check_psi = |psi: usize, what: &str| {
            if psi == 0 || psi > 1024 {
                Err(cfg_err(format!("{what}: psi = {psi} outside 1..=1024")))
            } else {
                Ok(())
            }
        };
        let check_grid = |dim: usize, what: &str| {
            if dim < 3 {
                Err(cfg_err(format!("{what}: lattice needs at least 3 x 3 BSs")))
            } else {
                Ok(())
            }
        };

        match s.kind {
            ScenarioKind::FigReuse | ScenarioKind::RatePdf => {
                check_grid(g.grid_dim, "geometry.grid_dim")?;
                let setup = self.link_setup(g.grid_dim, ch.psi, ch.exact_radius)?;
                let (rx, tx) = (setup.rx, setup.tx);
                if rx.0.max(rx.1).max(tx.0).max(tx.1) >= g.grid_dim {
                    return Err(cfg_err("link endpoints must lie inside the lattice"));
                }
                if rx.0.abs_diff(tx.0) + rx.1.abs_diff(tx.1) != 1 {
                    return Err(cfg_err("the measured link must join lattice neighbors"));
                }
                if s.kind == ScenarioKind::FigReuse {
                    check_psi(ch.psi, "channel.psi")?;
                    if self.reuse_points()?.is_empty() {
                        return Err(cfg_err("reuse.points is empty"));
                    }
                } else {
                    let r = &self.rate_pdf;
                    if r.psi_values.is_empty() {
                        return Err(cfg_err("rate_pdf.psi_values is empty"));
                    }
                    if r.trials.len() != r.psi_values.len() || r.exact_radius.len() != r.psi_values.len() {
                        return Err(cfg_err("rate_pdf.trials and rate_pdf.exact_radius need one entry per psi value"));
                    }
                    for &psi in &r.psi_values {
                        check_psi(psi, "rate_pdf.psi_values")?;
                        self.budget(psi)?;
                    }
                    if r.trials.contains(&0) || r.exact_radius.iter().any(|&x| !(x > 0.0)) {
                        return Err(cfg_err("rate_pdf trials and radii must be positive"));
                    }
                    if r.bins == 0 {
                        return Err(cfg_err("rate_pdf.bins must be >= 1"));
                    }
                }
                self.budget(ch.psi)?;
            }
            ScenarioKind::CutsetSweep => {
                let c = &self.cutset;
                if c.n_values.is_empty() || c.psi_values.is_empty() || c.realizations == 0 {
                    return Err(cfg_err("cutset needs n_values, psi_values and realizations >= 1"));
                }
                if c.n_values.iter().any(|&n| !(n >= 2.0)) {
                    return Err(cfg_err("cutset.n_values must be >= 2"));
                }
                for &psi in &c.psi_values {
                    check_psi(psi, "cutset.psi_values")?;
                }
                if !(c.array_side_fraction > 0.0 && c.array_side_fraction < 1.0) {
                    return Err(cfg_err("cutset.array_side_fraction must lie in (0, 1)"));
                }
                if c.ratio_n_values.iter().any(|&n| !(n > 1.0)) {
                    return Err(cfg_err("cutset.ratio_n_values must exceed 1"));
                }
                if !(c.ratio_alpha > 2.0) {
                    return Err(cfg_err("cutset.ratio_alpha must exceed 2"));
                }
            }
            ScenarioKind::StrategyCompare => {
                let st = &self.strategy;
                if st.n_values.is_empty() {
                    return Err(cfg_err("strategy.n_values is empty"));
                }
                for &n in &st.n_values {
                    let dim = perfect_square(n)
                        .ok_or_else(|| cfg_err(format!("strategy.n_values: {n} is not a perfect square")))?;
                    check_grid(dim, "strategy.n_values")?;
                    let psi = ch.psi_rule.psi(ch.psi, n, ch.alpha);
                    check_psi(psi, "strategy psi rule")?;
                    self.budget(psi)?;
                }
                for &psi in &st.psi_values {
                    check_psi(psi, "strategy.psi_values")?;
                    self.budget(psi)?;
                }
                check_grid(g.grid_dim, "geometry.grid_dim")?;
                if !(st.target_power_ratio > 0.0 && st.target_power_ratio.is_finite()) {
                    return Err(cfg_err("strategy.target_power_ratio must be positive"));
                }
            }
            ScenarioKind::HighwayCensus => {
                let c = &self.census;
                if !(g.n >= 4.0) || !(g.density > 0.0) {
                    return Err(cfg_err("geometry.n must be >= 4 and geometry.density positive"));
                }
                if !(c.cell_side > 0.0) || c.cell_side * c.cell_side * g.density > g.n {
                    return Err(cfg_err("census.cell_side must be positive and smaller than the box"));
                }
                check_grid(c.lattice_grid, "census.lattice_grid")?;
            }
            ScenarioKind::GatewayBoundary | ScenarioKind::GatewayGrid => {
                let gw = &self.gateway;
                if gw.n_values.is_empty() {
                    return Err(cfg_err("gateway.n_values is empty"));
                }
                for &n in &gw.n_values {
                    perfect_square(n).ok_or_else(|| cfg_err(format!("gateway.n_values: {n} is not a perfect square")))?;
                }
                if s.kind == ScenarioKind::GatewayBoundary {
                    if !(gw.rho > 0.0 && gw.rho < 1.0) {
                        return Err(cfg_err(format!("gateway.rho must lie in (0, 1), got {}", gw.rho)));
                    }
                    if !(gw.gateways_per_sqrt_n > 0.0) {
                        return Err(cfg_err("gateway.gateways_per_sqrt_n must be positive"));
                    }
                } else {
                    if gw.beta_values.is_empty() {
                        return Err(cfg_err("gateway.beta_values is empty"));
                    }
                    for &beta in &gw.beta_values {
                        if !(0.0..=1.0).contains(&beta) {
                            return Err(cfg_err(format!("gateway.beta must lie in [0, 1], got {beta}")));
                        }
                        for &n in &gw.n_values {
                            let tiling = GridTiling::new(n, beta)?;
                            check_psi(tiling.psi, "gateway mini-network psi")?;
                            self.budget(tiling.psi)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Split of an `n`-BS lattice into `n^beta` square mini-networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridTiling {
    pub grid_dim: usize,
    pub tiles_per_side: usize,
    /// BSs per mini-network side.
    pub tile_dim: usize,
    /// `sqrt` of the mini-network size.
    pub psi: usize,
}

impl GridTiling {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        let grid_dim =
            perfect_square(n).ok_or_else(|| cfg_err(format!("gateway grid: n = {n} is not a perfect square")))?;
        let tiles_per_side = (grid_dim as f64).powf(beta).round().max(1.0) as usize;
        if grid_dim % tiles_per_side != 0 {
            return Err(cfg_err(format!(
                "gateway grid: n^beta = {} mini-networks do not tile a {grid_dim} x {grid_dim} lattice",
                tiles_per_side * tiles_per_side
            )));
        }
        let tile_dim = grid_dim / tiles_per_side;
        Ok(GridTiling {
            grid_dim,
            tiles_per_side,
            tile_dim,
            psi: tile_dim,
        })
    }

    pub fn num_tiles(&self) -> usize {
        self.tiles_per_side * self.tiles_per_side
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_flat_text() {
        for kind in ScenarioKind::ALL {
            let cfg = ScenarioConfig::new(kind);
            cfg.validate().unwrap();
            let text = cfg.to_flat_string().unwrap();
            assert!(text.lines().all(|l| l.split_once(" = ").unwrap().0.contains('.')));
            assert_eq!(ScenarioConfig::parse(&text).unwrap(), cfg, "{}", kind.name());
        }
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = ScenarioConfig::parse("scenario.kind = \"rate_pdf\"\n").unwrap();
        assert_eq!(cfg.channel.psi, 64);
        assert_eq!(cfg.geometry.grid_dim, 23);
        let setup = cfg.link_setup(23, 64, 4.0).unwrap();
        assert_eq!((setup.rx, setup.tx), ((11, 11), (11, 12)));
        assert!((setup.budget.wavelength - 0.009993).abs() < 1e-5);
    }

    #[test]
    fn unknown_keys_and_kinds_are_rejected() {
        assert!(ScenarioConfig::parse("scenario.kind = \"rate_pdf\"\nchannel.alpah = 4\n").is_err());
        assert!(ScenarioConfig::parse("scenario.kind = \"nope\"\n").is_err());
        assert!(ScenarioConfig::parse("channel.alpha = 4\n").is_err());
    }

    #[test]
    fn det_pattern_with_wrong_p_is_a_config_error() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::FigReuse);
        cfg.reuse.points = vec!["det4:9".into()];
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.reuse.points = vec!["det9:1".into(), "random:3".into()];
        cfg.validate().unwrap();
    }

    #[test]
    fn domain_checks() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::GatewayGrid);
        cfg.gateway.beta_values = vec![1.5];
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::new(ScenarioKind::GatewayBoundary);
        cfg.gateway.rho = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::new(ScenarioKind::RatePdf);
        cfg.channel.alpha = 2.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::new(ScenarioKind::RatePdf);
        cfg.link.tx_col = Some(13);
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::new(ScenarioKind::StrategyCompare);
        cfg.strategy.n_values = vec![65];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tiling_limits() {
        let t = GridTiling::new(4096, 0.5).unwrap();
        assert_eq!((t.num_tiles(), t.tile_dim * t.tile_dim, t.psi), (64, 64, 8));
        let t = GridTiling::new(4096, 0.0).unwrap();
        assert_eq!((t.num_tiles(), t.psi), (1, 64));
        let t = GridTiling::new(4096, 1.0).unwrap();
        assert_eq!((t.num_tiles(), t.psi), (4096, 1));
        assert!(GridTiling::new(4096, 0.3).is_err());
    }
}
