//! Every scenario kind on a reduced config: schema, determinism, files.

use backhaul::experiments::{emit_outputs, run_scenario, OutputFormat, ScenarioConfig, ScenarioKind};

fn small(kind: ScenarioKind) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(kind);
    cfg.scenario.trials = 6;
    cfg.scenario.master_seed = 11;
    cfg.geometry.grid_dim = 9;
    cfg.channel.psi = 16;
    cfg.channel.exact_radius = 2.0;
    cfg.rate_pdf.psi_values = vec![8, 16];
    cfg.rate_pdf.trials = vec![6, 4];
    cfg.rate_pdf.exact_radius = vec![2.0, 2.0];
    cfg.rate_pdf.bins = 5;
    cfg.cutset.n_values = vec![16.0];
    cfg.cutset.realizations = 3;
    cfg.cutset.ratio_n_values = vec![1e2, 1e4];
    cfg.strategy.n_values = vec![16, 64];
    cfg.strategy.psi_values = vec![4, 8];
    cfg.census.lattice_grid = 9;
    cfg.census.lattice_pairings = 3;
    cfg.geometry.n = 100.0;
    cfg.gateway.n_values = vec![16, 256];
    cfg.gateway.beta_values = vec![0.0, 0.5];
    cfg
}

fn header(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::FigReuse => "pattern,p,mean_rate,std_rate,trials",
        ScenarioKind::RatePdf => "psi,trials,mean_rate,std_rate,cv,q05,median,q95,ergodic_lb,ring_q",
        ScenarioKind::CutsetSweep => "n,psi,alpha,exact,hadamard,strip,cs_formula,t_ub_formula",
        ScenarioKind::StrategyCompare => "strategy,n,psi,d_c,link_rate,per_connection_rate,max_load",
        ScenarioKind::HighwayCensus => "seed,n,horizontal,vertical,failed_slabs",
        ScenarioKind::GatewayBoundary => "n,gateways,rho,max_gateway_load,mean_gateway_load,max_load_over_sqrt_n",
        ScenarioKind::GatewayGrid => "beta,n,mini_networks,mini_size,psi,link_rate,min_rate,mean_rate",
    }
}

#[test]
fn every_scenario_is_deterministic_and_well_formed() {
    for kind in ScenarioKind::ALL {
        let cfg = small(kind);
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", kind.name()));
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert!(!a.tables.is_empty());
        for (ta, tb) in a.tables.iter().zip(&b.tables) {
            assert_eq!(ta.to_csv().unwrap(), tb.to_csv().unwrap(), "{} {}", kind.name(), ta.name);
        }
        let csv = String::from_utf8(a.main_table().unwrap().to_csv().unwrap()).unwrap();
        assert_eq!(csv.lines().next().unwrap(), header(kind));
        assert!(csv.lines().count() > 1, "{}", kind.name());

        let dir = tempfile::tempdir().unwrap();
        let files = emit_outputs(&a, dir.path(), &[OutputFormat::Csv, OutputFormat::Svg]).unwrap();
        let main = dir.path().join(format!("{}_11.csv", kind.name()));
        assert!(files.contains(&main));
        assert_eq!(std::fs::read_to_string(&main).unwrap(), csv);
        for p in a.sweep.points.iter() {
            assert!(p.summary.quantiles.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn reuse_patterns_agree_at_p1() {
    let mut cfg = small(ScenarioKind::FigReuse);
    cfg.reuse.points = ["full:1", "random:1", "det4:1", "det9:1"].map(String::from).to_vec();
    let out = run_scenario(&cfg).unwrap();
    let means: Vec<f64> = out.sweep.points.iter().map(|p| p.summary.mean).collect();
    assert!(means.windows(2).all(|w| w[0] == w[1]), "{means:?}");
}

#[test]
fn low_trial_rate_pdf_warns() {
    let out = run_scenario(&small(ScenarioKind::RatePdf)).unwrap();
    assert_eq!(out.notices.len(), 2);
    let hist = out.table("hist").unwrap();
    assert_eq!(hist.rows.len(), 10);
    let counts: usize = hist.rows.iter().filter(|r| r[0] == "8").map(|r| r[3].parse::<usize>().unwrap()).sum();
    assert_eq!(counts, 6);
}

#[test]
fn gateway_grid_limits() {
    let mut cfg = small(ScenarioKind::GatewayGrid);
    cfg.gateway.n_values = vec![64];
    cfg.gateway.beta_values = vec![0.0, 1.0];
    let out = run_scenario(&cfg).unwrap();
    let t = out.main_table().unwrap();
    // beta = 0: one network of n BSs with psi = sqrt(n).
    assert_eq!(&t.rows[0][2..5], &["1".to_string(), "64".into(), "8".into()]);
    // beta = 1: every BS is its own gateway with psi = 1 and no relaying.
    assert_eq!(&t.rows[1][2..5], &["64".to_string(), "1".into(), "1".into()]);
    assert!(t.rows[1][6].is_empty());
}

#[test]
fn long_hop_range_grows_with_psi() {
    let mut cfg = small(ScenarioKind::StrategyCompare);
    cfg.channel.psi_rule = backhaul::experiments::config::PsiRule::Fixed;
    let d_c = |psi: usize| {
        let mut c = cfg.clone();
        c.channel.psi = psi;
        let out = run_scenario(&c).unwrap();
        let t = out.main_table().unwrap();
        t.rows.iter().find(|r| r[0] == "long_hop").unwrap()[3].parse::<f64>().unwrap()
    };
    let ratio = d_c(16) / d_c(8);
    assert!((ratio - 2f64.powf(2.0 / 4.0)).abs() < 1e-12, "{ratio}");
}
