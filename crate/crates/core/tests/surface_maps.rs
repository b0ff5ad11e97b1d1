mod common;

use proptest::prelude::*;
use tapgp_core::surface::{ExplorationState, ModelConfig, SuggestMode, TapObservation};
use tapgp_core::{CandidateGrid, Point2};

use common::DirectGp;

const L2: f64 = 0.017;
const JITTER: f64 = 1e-6;

fn fresh(res: usize) -> ExplorationState {
    ExplorationState::new(ModelConfig::default(), CandidateGrid::new(res).unwrap()).unwrap()
}

fn xy(p: Point2) -> (f64, f64) {
    (p.x, p.y)
}

/// Surface and weight oracles replayed from the raw tap list.
fn oracles(taps: &[TapObservation]) -> (DirectGp, DirectGp) {
    let xs: Vec<(f64, f64)> = taps.iter().map(|t| xy(t.position)).collect();
    let hs: Vec<f64> = taps.iter().map(|t| t.height).collect();
    let ws: Vec<f64> = taps
        .iter()
        .map(|t| if t.on_surface { 1.0 } else { 0.0 })
        .collect();
    (
        DirectGp::new(&xs, &hs, L2, JITTER, 0.0),
        DirectGp::new(&xs, &ws, L2, JITTER, 0.5),
    )
}

fn scripted() -> Vec<TapObservation> {
    let g = CandidateGrid::new(9).unwrap();
    vec![
        TapObservation::new(g.point(9 * 4), 0.0, false), // left edge
        TapObservation::new(g.point(9 * 3 + 6), 0.55, true), // right half
        TapObservation::new(g.point(9 * 5 + 7), 0.61, true), // right half
    ]
}

#[test]
fn replayed_taps_are_interpolated() {
    let g = CandidateGrid::new(47).unwrap();
    let taps = [
        (g.point(100), 0.42, true),
        (g.point(530), 0.0, false),
        (g.point(1200), 0.73, true),
        (g.point(1203), 0.2, true),
        (g.point(2000), 0.0, false),
    ];
    let mut s = ExplorationState::new(ModelConfig::default(), g).unwrap();
    let obs: Vec<TapObservation> = taps
        .iter()
        .map(|&(p, h, o)| TapObservation::new(p, h, o))
        .collect();
    for o in &obs {
        s.ingest(*o).unwrap();
    }
    let (surface, _) = oracles(&obs);
    for o in &obs {
        let mean = s.surface_gp().predict_point(o.position).mean;
        assert!((mean - o.height).abs() < 1e-3);
        assert!((mean - surface.predict(xy(o.position)).0).abs() < 1e-8);
    }
    assert_eq!(s.observations().len(), s.weight_observations().len());
}

#[test]
fn maps_match_per_point_oracle() {
    let taps = scripted();
    let mut s = fresh(9);
    for t in &taps {
        s.ingest(*t).unwrap();
    }
    let (surface, weight) = oracles(&taps);
    let grid = s.grid().clone();
    let maps = s.exploration_map(&grid);
    for (i, p) in grid.points().iter().enumerate() {
        let (_, v) = surface.predict(xy(*p));
        let (w, _) = weight.predict(xy(*p));
        assert!((maps.uncertainty[i] - v).abs() < 1e-10);
        assert!((maps.weight[i] - w.clamp(0.0, 1.0)).abs() < 1e-10);
        assert_eq!(maps.exploration[i], maps.uncertainty[i] * maps.weight[i]);
    }
}

#[test]
fn single_tap_weight_extremes_follow_oracle() {
    let g = CandidateGrid::new(9).unwrap();
    let p = g.point(40);
    let on = DirectGp::new(&[xy(p)], &[1.0], L2, JITTER, 0.5)
        .predict(xy(p))
        .0;
    let off = DirectGp::new(&[xy(p)], &[0.0], L2, JITTER, 0.5)
        .predict(xy(p))
        .0;
    assert!(on >= 0.99);
    assert!(off <= 0.01);

    let mut s = fresh(9);
    s.ingest(TapObservation::new(p, 0.3, true)).unwrap();
    assert!((s.weight_map(&g)[40] - on).abs() < 1e-12);
    let mut s = fresh(9);
    s.ingest(TapObservation::new(p, 0.0, false)).unwrap();
    assert!((s.weight_map(&g)[40] - off).abs() < 1e-12);
}

#[test]
fn exploration_argmax_moves_towards_surface_taps() {
    let taps = scripted();
    let mut s = fresh(9);
    for t in &taps {
        s.ingest(*t).unwrap();
    }
    let (surface, weight) = oracles(&taps);
    let grid = s.grid().clone();
    let field: Vec<f64> = grid
        .points()
        .iter()
        .map(|p| surface.predict(xy(*p)).1 * weight.predict(xy(*p)).0.clamp(0.0, 1.0))
        .collect();
    let best = common::brute_argmax(&field, &vec![false; field.len()]).unwrap();
    assert!(grid.point(best).x > 0.5, "argmax at {:?}", grid.point(best));
    let maps = s.exploration_map(&grid);
    let impl_best = common::brute_argmax(&maps.exploration, &vec![false; field.len()]).unwrap();
    assert_eq!(impl_best, best);
}

#[test]
fn suggestions_equal_full_grid_scan() {
    let taps = scripted();
    let mut s = fresh(9);
    for t in &taps {
        s.ingest(*t).unwrap();
    }
    let (surface, weight) = oracles(&taps);
    let grid = s.grid().clone();
    let excluded: Vec<bool> = (0..grid.len())
        .map(|i| taps.iter().any(|t| t.position == grid.point(i)))
        .collect();
    let u: Vec<f64> = grid
        .points()
        .iter()
        .map(|p| surface.predict(xy(*p)).1)
        .collect();
    let e: Vec<f64> = grid
        .points()
        .iter()
        .zip(&u)
        .map(|(p, u)| u * weight.predict(xy(*p)).0.clamp(0.0, 1.0))
        .collect();
    assert_eq!(
        s.suggest_next(SuggestMode::UncertaintyOnly).unwrap().index,
        common::brute_argmax(&u, &excluded).unwrap()
    );
    assert_eq!(
        s.suggest_next(SuggestMode::Exploration).unwrap().index,
        common::brute_argmax(&e, &excluded).unwrap()
    );
}

fn tap_strategy(res: usize) -> impl Strategy<Value = Vec<(usize, f64, bool)>> {
    prop::collection::vec((0..res * res, 0.0..0.8f64, any::<bool>()), 0..12)
}

fn build(res: usize, taps: &[(usize, f64, bool)]) -> ExplorationState {
    let mut s = fresh(res);
    for &(i, h, on) in taps {
        let p = s.grid().point(i);
        s.ingest(TapObservation::new(p, if on { h } else { 0.0 }, on))
            .unwrap();
    }
    s
}

proptest! {
    #[test]
    fn product_identity_and_ranges(taps in tap_strategy(9)) {
        let s = build(9, &taps);
        let grid = s.grid().clone();
        let maps = s.exploration_map(&grid);
        for i in 0..grid.len() {
            let (u, w, e) = (maps.uncertainty[i], maps.weight[i], maps.exploration[i]);
            prop_assert_eq!(e.to_bits(), (u * w).to_bits());
            prop_assert!((0.0..=1.0 + 1e-9).contains(&u));
            prop_assert!((0.0..=1.0).contains(&w));
            prop_assert!((0.0..=1.0).contains(&e));
            prop_assert!(e <= u && e <= w);
        }
    }

    #[test]
    fn off_surface_tap_never_raises_weight_there(taps in tap_strategy(9), at in 0usize..81) {
        let mut s = build(9, &taps);
        let grid = s.grid().clone();
        let before = s.weight_map(&grid)[at];
        s.ingest(TapObservation::new(grid.point(at), 0.0, false)).unwrap();
        let after = s.weight_map(&grid)[at];
        prop_assert!(after <= before + 1e-9, "{after} > {before}");
    }

    #[test]
    fn suggestions_are_deterministic_and_fresh(taps in tap_strategy(9)) {
        let s = build(9, &taps);
        for mode in [SuggestMode::Exploration, SuggestMode::UncertaintyOnly] {
            let a = s.suggest_next(mode).unwrap();
            let b = s.clone().suggest_next(mode).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(!taps.iter().any(|t| t.0 == a.index));
        }
    }
}
