use compton_ledger::cosmology::{
    closed_form_n, run_simulation, Clock, CosmologyError, Mode, SimulationConfig,
};
use compton_ledger::quantities::ConstantsTable;

fn table() -> ConstantsTable {
    ConstantsTable::builtin()
}

fn tau() -> f64 {
    table().magnitude("tau_pi").unwrap()
}

fn final_error(dt_fraction: f64, t_end_taus: f64) -> f64 {
    let cfg = SimulationConfig {
        dt: tau() / dt_fraction,
        ..SimulationConfig::deterministic(t_end_taus * tau(), tau())
    };
    let ts = run_simulation(&cfg, &table()).unwrap();
    (ts.final_state().n / closed_form_n(ts.final_state().t, 1.0, tau()) - 1.0).abs()
}

#[test]
fn fourth_order_convergence() {
    // Errors at τ, τ/2, τ/4 over 1000τ: each halving gains close to 2⁴.
    let e: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&f| final_error(f, 1000.0))
        .collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.0, "{e:?}");
    }
    assert!((e[0] / 1.46e-6 - 1.0).abs() < 0.05, "{}", e[0]);
}

#[test]
fn every_sample_matches_closed_form() {
    let mut cfg = SimulationConfig::deterministic(100.0 * tau(), tau());
    cfg.output_stride = 10;
    let ts = run_simulation(&cfg, &table()).unwrap();
    let errors: Vec<f64> = ts
        .states
        .iter()
        .map(|s| (s.n / closed_form_n(s.t, 1.0, tau()) - 1.0).abs())
        .collect();
    // The relative error is largest while N is still near 1.
    assert!(errors.iter().all(|&e| e < 1e-6), "{errors:?}");
    assert!(*errors.last().unwrap() < 1e-8);
}

#[test]
fn samples_follow_the_stride_rule() {
    for (steps, stride) in [
        (100u32, 1usize),
        (100, 3),
        (1000, 7),
        (1000, 1000),
        (999, 1000),
    ] {
        let mut cfg = SimulationConfig::deterministic(f64::from(steps) * tau() / 10.0, tau());
        cfg.output_stride = stride;
        let ts = run_simulation(&cfg, &table()).unwrap();
        assert_eq!(
            ts.states.len(),
            steps as usize / stride + 1,
            "{steps} {stride}"
        );
        assert!(ts.states.windows(2).all(|w| w[1].t > w[0].t));
    }
}

#[test]
fn large_seed_ensemble_agrees_with_closed_form() {
    // With N0 = 1e4 the √N fluctuations are small compared with N, so the
    // jump process tracks the continuous law.
    let mut cfg = SimulationConfig::stochastic(100.0 * tau(), tau(), 42, 1000);
    cfg.n0 = 1e4;
    let ts = run_simulation(&cfg, &table()).unwrap();
    let (mean, se) = ts.final_mean_and_standard_error().unwrap();
    let exact = closed_form_n(100.0 * tau(), 1e4, tau());
    assert!(
        ((mean - exact) / se).abs() <= 3.0,
        "{mean} vs {exact} (se {se})"
    );
}

#[test]
fn single_seed_ensemble_lags_the_closed_form() {
    // The jump process starting from one particle runs behind the
    // continuous law because E[√N] < √E[N].
    let cfg = SimulationConfig::stochastic(100.0 * tau(), tau(), 42, 1000);
    let ts = run_simulation(&cfg, &table()).unwrap();
    let (mean, _) = ts.final_mean_and_standard_error().unwrap();
    let exact = closed_form_n(100.0 * tau(), 1.0, tau());
    assert!(mean < exact);
    assert!(mean > 0.95 * exact);
}

#[test]
fn parallelism_does_not_change_the_series() {
    let cfg = SimulationConfig::stochastic(30.0 * tau(), tau(), 9, 200);
    let parallel = run_simulation(&cfg, &table()).unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let other = pool.install(|| run_simulation(&cfg, &table()).unwrap());
        assert_eq!(other, parallel);
    }
}

#[test]
fn trajectory_zero_is_independent_of_ensemble_size() {
    let a = run_simulation(
        &SimulationConfig::stochastic(20.0 * tau(), tau(), 5, 1),
        &table(),
    )
    .unwrap();
    let b = run_simulation(
        &SimulationConfig::stochastic(20.0 * tau(), tau(), 5, 50),
        &table(),
    )
    .unwrap();
    assert_eq!(a.states, b.states);
}

#[test]
fn planck_clock_creates_faster() {
    let t = table();
    let planck = t.magnitude("tau_planck").unwrap();
    let cfg = SimulationConfig {
        clock: Clock::Planck,
        ..SimulationConfig::deterministic(100.0 * planck, planck)
    };
    let ts = run_simulation(&cfg, &t).unwrap();
    assert!((ts.final_state().n / closed_form_n(100.0 * planck, 1.0, planck) - 1.0).abs() < 1e-8);
    // τ/10 of the pion clock is far above the Planck resolution floor.
    let coarse = SimulationConfig {
        dt: tau() / 10.0,
        ..cfg
    };
    assert_eq!(
        run_simulation(&coarse, &t).unwrap_err(),
        CosmologyError::StepExceedsComptonTime
    );
}

#[test]
fn trend_report_on_a_long_run() {
    let mut cfg = SimulationConfig::deterministic(1e5 * tau(), tau());
    cfg.output_stride = 100;
    let tr = run_simulation(&cfg, &table()).unwrap().trends().unwrap();
    assert!((tr.slope_g + 1.0).abs() < 0.02, "{}", tr.slope_g);
    assert!((tr.slope_rho + 1.0).abs() < 0.02);
    // Ṙ = c/2 while H R = c.
    assert!((tr.rdot_vs_hr_residual - 0.5).abs() < 1e-6);
    assert!(tr.leading_term_residual < 1e-6);
    assert!(tr.r_vs_half_ct_residual < 3e-4);
    assert!(tr.max_abs_lambda_over_h2 <= 10.0);
}

#[test]
fn short_runs_have_no_trend_report() {
    let cfg = SimulationConfig::deterministic(tau(), tau());
    let ts = run_simulation(&cfg, &table()).unwrap();
    assert!(matches!(ts.trends(), Err(CosmologyError::InsufficientSpan)));
    assert_eq!(ts.config.mode, Mode::Deterministic);
}
