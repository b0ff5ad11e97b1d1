mod common;

use proptest::prelude::*;
use tapgp_core::env::Scene;
use tapgp_core::explorer::{run, Explorer, RunConfig, RunTrace, Strategy};
use tapgp_core::metrics::{
    effective_tap_improvement, mean_variance_curve, on_surface_ratio, surface_rmse,
};
use tapgp_core::surface::{ExplorationState, ModelConfig, TapObservation};
use tapgp_core::CandidateGrid;

use common::DirectGp;

#[test]
fn empty_state_rmse_is_rms_of_wave() {
    let scene = Scene::default();
    let eval = CandidateGrid::new(93).unwrap();
    let state =
        ExplorationState::new(ModelConfig::default(), CandidateGrid::new(47).unwrap()).unwrap();
    // independent: RMS of 7 + 4 sin(2π u / 8) over footprint points of the eval grid
    let mut sum = 0.0;
    let mut n = 0usize;
    for (x, y) in common::grid_points(93) {
        let (xc, yc) = (x * 23.0, y * 23.0);
        if (5.0 - 1e-9..=21.0 + 1e-9).contains(&xc) && (8.5 - 1e-9..=14.5 + 1e-9).contains(&yc) {
            let u = (xc - 5.0).clamp(0.0, 16.0);
            let h = 7.0 + 4.0 * (std::f64::consts::PI * u / 4.0).sin();
            sum += h * h;
            n += 1;
        }
    }
    assert_eq!(n, 65 * 25);
    let expected = (sum / n as f64).sqrt();
    let got = surface_rmse(&state, &scene, &eval).unwrap();
    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
}

#[test]
fn dense_footprint_training_reconstructs_surface() {
    let scene = Scene::default();
    let grid = CandidateGrid::new(47).unwrap();
    let mut state = ExplorationState::new(ModelConfig::default(), grid.clone()).unwrap();
    for &p in grid.points() {
        if scene.on_footprint(p) {
            let r = scene.tap(p).unwrap();
            state.ingest(TapObservation::from_tap(p, &r)).unwrap();
        }
    }
    let rmse = surface_rmse(&state, &scene, &CandidateGrid::new(93).unwrap()).unwrap();
    assert!(rmse <= 0.05, "rmse {rmse}");
}

#[test]
fn rmse_matches_two_pass_reimplementation() {
    let scene = Scene::default();
    let trace_and_state =
        tapgp_core::explorer::run_with_state(RunConfig::default().with_seed(3), &scene).unwrap();
    let (trace, state) = trace_and_state;
    let xs: Vec<(f64, f64)> = trace
        .records
        .iter()
        .map(|r| (r.position.x, r.position.y))
        .collect();
    let hs: Vec<f64> = trace.records.iter().map(|r| r.result.height).collect();
    let oracle = DirectGp::new(&xs, &hs, 0.017, 1e-6, 0.0);
    let pts: Vec<(f64, f64)> = common::grid_points(93)
        .into_iter()
        .filter(|&(x, y)| {
            let (xc, yc) = (x * 23.0, y * 23.0);
            (5.0 - 1e-9..=21.0 + 1e-9).contains(&xc) && (8.5 - 1e-9..=14.5 + 1e-9).contains(&yc)
        })
        .collect();
    let errs: Vec<f64> = pts
        .iter()
        .map(|&(x, y)| {
            let u = (x * 23.0 - 5.0).clamp(0.0, 16.0);
            let truth = 7.0 + 4.0 * (std::f64::consts::PI * u / 4.0).sin();
            oracle.predict((x, y)).0 * 15.0 - truth
        })
        .collect();
    let mean_sq = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;
    let got = surface_rmse(&state, &scene, &CandidateGrid::new(93).unwrap()).unwrap();
    assert!(
        (got - mean_sq.sqrt()).abs() < 1e-8,
        "{got} vs {}",
        mean_sq.sqrt()
    );
}

#[test]
fn rmse_without_footprint_points() {
    let scene = Scene::default();
    let state =
        ExplorationState::new(ModelConfig::default(), CandidateGrid::new(3).unwrap()).unwrap();
    // a 2×2 grid only has the corners, all on the desk
    assert!(surface_rmse(&state, &scene, &CandidateGrid::new(2).unwrap()).is_err());
}

fn traced(seed: u64, strategy: Strategy, budget: usize) -> RunTrace {
    let config = RunConfig {
        budget,
        snapshot_every: Some(1),
        ..RunConfig::default().with_seed(seed).with_strategy(strategy)
    };
    run(config, &Scene::default()).unwrap()
}

#[test]
fn variance_curve_replays_prefixes() {
    let trace = traced(2, Strategy::WeightedExploration, 5);
    let curve = mean_variance_curve(&trace).unwrap();
    assert_eq!(curve.len(), 5);
    assert_eq!(curve[0], 1.0);
    let grid = common::grid_points(47);
    for (k, &value) in curve.iter().enumerate() {
        let prefix = &trace.records[..k];
        let xs: Vec<(f64, f64)> = prefix
            .iter()
            .map(|r| (r.position.x, r.position.y))
            .collect();
        let hs: Vec<f64> = prefix.iter().map(|r| r.result.height).collect();
        let oracle = DirectGp::new(&xs, &hs, 0.017, 1e-6, 0.0);
        let mean = grid.iter().map(|&q| oracle.predict(q).1).sum::<f64>() / grid.len() as f64;
        assert!((value - mean).abs() < 1e-9, "iteration {k}");
    }
}

#[test]
fn variance_curve_never_rises() {
    for strategy in Strategy::ALL {
        let curve = mean_variance_curve(&traced(4, strategy, 12)).unwrap();
        assert!(curve.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{strategy}");
    }
}

#[test]
fn scripted_explorer_metrics() {
    let scene = Scene::default();
    let config = RunConfig {
        n_initial_random: 0,
        ..RunConfig::default()
    };
    let mut ex = Explorer::new(config, &scene).unwrap();
    ex.tap_grid_point(0).unwrap();
    ex.tap_grid_point(24 * 47 + 24).unwrap();
    let (trace, _) = ex.finish(None);
    assert_eq!(on_surface_ratio(&trace).unwrap(), 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn improvement_is_antisymmetric(a in 0u64..50, b in 0u64..50) {
        let ta = traced(a, Strategy::RandomSearch, 8);
        let tb = traced(b, Strategy::UncertaintyOnly, 8);
        let ab = effective_tap_improvement(&ta, &tb).unwrap();
        let ba = effective_tap_improvement(&tb, &ta).unwrap();
        prop_assert_eq!(ab, -ba);
    }

    #[test]
    fn ratio_ignores_tap_order(seed in 0u64..50, rot in 0usize..8) {
        let mut t = traced(seed, Strategy::RandomSearch, 8);
        let before = on_surface_ratio(&t).unwrap();
        t.records.rotate_left(rot);
        prop_assert_eq!(on_surface_ratio(&t).unwrap(), before);
    }
}
