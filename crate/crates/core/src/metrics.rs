//! Scores for finished runs.

use alloc::vec::Vec;

use crate::env::Scene;
use crate::explorer::RunTrace;
use crate::surface::ExplorationState;
use crate::{CandidateGrid, Error};

/// Default resolution of the grid used for reconstruction error.
pub const DEFAULT_EVAL_RESOLUTION: usize = 93;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMetrics {
    pub n_taps: usize,
    pub n_on_surface: usize,
    pub on_surface_ratio: f64,
    pub final_rmse_cm: f64,
    /// Empty when the trace was recorded without per-iteration snapshots.
    pub mean_variance_curve: Vec<f64>,
}

impl TraceMetrics {
    pub fn compute(
        trace: &RunTrace,
        final_state: &ExplorationState,
        scene: &Scene,
        eval_grid: &CandidateGrid,
    ) -> Result<Self, Error> {
        let n_taps = trace.n_taps();
        let n_on_surface = trace.n_on_surface();
        let mean_variance_curve = match mean_variance_curve(trace) {
            Ok(curve) => curve,
            Err(Error::MissingSnapshots) => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(TraceMetrics {
            n_taps,
            n_on_surface,
            on_surface_ratio: on_surface_ratio(trace)?,
            final_rmse_cm: surface_rmse(final_state, scene, eval_grid)?,
            mean_variance_curve,
        })
    }
}

/// Fraction of taps that landed on the object.
pub fn on_surface_ratio(trace: &RunTrace) -> Result<f64, Error> {
    match trace.n_taps() {
        0 => Err(Error::EmptyTrace),
        n => Ok(trace.n_on_surface() as f64 / n as f64),
    }
}

/// Difference in on-surface tap counts over the shared budget:
/// `(on_proposed − on_baseline) / n_taps`. Counts of 12 and 2 out of 17 give
/// 0.588.
pub fn effective_tap_improvement(proposed: &RunTrace, baseline: &RunTrace) -> Result<f64, Error> {
    let n = proposed.n_taps();
    if n != baseline.n_taps() {
        return Err(Error::MismatchedBudgets {
            proposed: n,
            baseline: baseline.n_taps(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyTrace);
    }
    Ok((proposed.n_on_surface() as f64 - baseline.n_on_surface() as f64) / n as f64)
}

/// RMS error (cm) of the height-GP posterior mean against the true object
/// height, over evaluation points on the object footprint.
pub fn surface_rmse(
    state: &ExplorationState,
    scene: &Scene,
    eval_grid: &CandidateGrid,
) -> Result<f64, Error> {
    let on: Vec<_> = eval_grid
        .points()
        .iter()
        .copied()
        .filter(|&p| scene.on_footprint(p))
        .collect();
    if on.is_empty() {
        return Err(Error::EmptyFootprint);
    }
    let means = state.surface_gp().predict_mean(&on);
    let scale = scene.height_scale_cm();
    let sse: f64 = on
        .iter()
        .zip(means)
        .map(|(&p, m)| {
            let err = m * scale - scene.true_height_cm(p);
            err * err
        })
        .sum();
    Ok(libm::sqrt(sse / on.len() as f64))
}

/// Grid-mean of the uncertainty map before each tap. Needs a snapshot at every
/// iteration of the trace.
pub fn mean_variance_curve(trace: &RunTrace) -> Result<Vec<f64>, Error> {
    if trace.snapshots.len() != trace.n_taps()
        || trace
            .snapshots
            .iter()
            .enumerate()
            .any(|(i, s)| s.iteration != i)
    {
        return Err(Error::MissingSnapshots);
    }
    Ok(trace
        .snapshots
        .iter()
        .map(|s| s.uncertainty.iter().sum::<f64>() / s.uncertainty.len() as f64)
        .collect())
}
