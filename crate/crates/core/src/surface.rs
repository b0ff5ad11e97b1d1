//! The coupled surface-height and on-surface-weight GPs, and the acquisition
//! maps derived from them.
//!
//! * uncertainty `u` = height-GP posterior variance,
//! * weight `w` = indicator-GP posterior mean clamped to `[0, 1]`,
//! * exploration `e = u · w`.
//!
//! Off-surface taps push the indicator GP towards 0 near the desk, so the
//! exploration map steers new taps towards areas already known to be on the
//! object while `u` keeps them from re-sampling known points.

use alloc::vec;
use alloc::vec::Vec;

use crate::env::TapResult;
use crate::gp::{fit, FittedGP, KernelParams, TrainingSet};
use crate::{CandidateGrid, Error, Point2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapObservation {
    pub position: Point2,
    /// Normalized height; the desk is 0.
    pub height: f64,
    pub on_surface: bool,
}

impl TapObservation {
    pub fn new(position: Point2, height: f64, on_surface: bool) -> Self {
        TapObservation {
            position,
            height,
            on_surface,
        }
    }

    pub fn from_tap(position: Point2, result: &TapResult) -> Self {
        TapObservation::new(position, result.height, result.on_surface)
    }

    /// Indicator target for the weight GP.
    pub fn weight_target(&self) -> f64 {
        if self.on_surface {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub surface_kernel: KernelParams,
    pub weight_kernel: KernelParams,
    /// Feed desk contacts (height 0) to the height GP as well.
    pub desk_taps_in_surface_gp: bool,
}

impl ModelConfig {
    pub const DEFAULT_WEIGHT_PRIOR_MEAN: f64 = 0.5;
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            surface_kernel: KernelParams::default(),
            weight_kernel: KernelParams::default().with_prior_mean(Self::DEFAULT_WEIGHT_PRIOR_MEAN),
            desk_taps_in_surface_gp: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuggestMode {
    Exploration,
    UncertaintyOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionMaps {
    pub uncertainty: Vec<f64>,
    pub weight: Vec<f64>,
    pub exploration: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Suggestion {
    pub index: usize,
    pub point: Point2,
    /// Value of the maximized field at `point`.
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct ExplorationState {
    config: ModelConfig,
    grid: CandidateGrid,
    surface_obs: Vec<TapObservation>,
    weight_obs: Vec<(Point2, f64)>,
    surface_gp: FittedGP,
    weight_gp: FittedGP,
    tapped: Vec<bool>,
    n_tapped: usize,
}

impl ExplorationState {
    pub fn new(config: ModelConfig, grid: CandidateGrid) -> Result<Self, Error> {
        let surface_gp = FittedGP::prior(config.surface_kernel)?;
        let weight_gp = FittedGP::prior(config.weight_kernel)?;
        let tapped = vec![false; grid.len()];
        Ok(ExplorationState {
            config,
            grid,
            surface_obs: Vec::new(),
            weight_obs: Vec::new(),
            surface_gp,
            weight_gp,
            tapped,
            n_tapped: 0,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn grid(&self) -> &CandidateGrid {
        &self.grid
    }

    pub fn observations(&self) -> &[TapObservation] {
        &self.surface_obs
    }

    pub fn weight_observations(&self) -> &[(Point2, f64)] {
        &self.weight_obs
    }

    pub fn surface_gp(&self) -> &FittedGP {
        &self.surface_gp
    }

    pub fn weight_gp(&self) -> &FittedGP {
        &self.weight_gp
    }

    pub fn is_tapped(&self, index: usize) -> bool {
        self.tapped[index]
    }

    pub fn tapped_mask(&self) -> &[bool] {
        &self.tapped
    }

    pub fn untapped_count(&self) -> usize {
        self.grid.len() - self.n_tapped
    }

    /// Appends one tap to both datasets and refits both GPs. On error the
    /// state is left unchanged.
    pub fn ingest(&mut self, obs: TapObservation) -> Result<(), Error> {
        if !obs.position.in_unit_square() {
            return Err(Error::OutOfArea {
                x: obs.position.x,
                y: obs.position.y,
            });
        }
        let mut surface_obs = self.surface_obs.clone();
        surface_obs.push(obs);
        let mut weight_obs = self.weight_obs.clone();
        weight_obs.push((obs.position, obs.weight_target()));

        let surface_gp = fit(
            surface_training(&surface_obs, self.config.desk_taps_in_surface_gp)?,
            self.config.surface_kernel,
        )?;
        let (inputs, values) = weight_obs.iter().copied().unzip();
        let weight_gp = fit(TrainingSet::new(inputs, values)?, self.config.weight_kernel)?;

        self.surface_obs = surface_obs;
        self.weight_obs = weight_obs;
        self.surface_gp = surface_gp;
        self.weight_gp = weight_gp;
        if let Some(idx) = self.grid.index_of(obs.position) {
            if !self.tapped[idx] {
                self.tapped[idx] = true;
                self.n_tapped += 1;
            }
        }
        Ok(())
    }

    /// Height-GP posterior variance at each grid point.
    pub fn uncertainty_map(&self, grid: &CandidateGrid) -> Vec<f64> {
        self.surface_gp
            .predict(grid.points())
            .into_iter()
            .map(|p| p.variance)
            .collect()
    }

    /// Indicator-GP posterior mean at each grid point, clamped to `[0, 1]`.
    pub fn weight_map(&self, grid: &CandidateGrid) -> Vec<f64> {
        self.weight_gp
            .predict_mean(grid.points())
            .into_iter()
            .map(|m| m.clamp(0.0, 1.0))
            .collect()
    }

    /// Height-GP posterior mean (normalized heights).
    pub fn posterior_mean_map(&self, grid: &CandidateGrid) -> Vec<f64> {
        self.surface_gp.predict_mean(grid.points())
    }

    pub fn exploration_map(&self, grid: &CandidateGrid) -> AcquisitionMaps {
        let uncertainty = self.uncertainty_map(grid);
        let weight = self.weight_map(grid);
        let exploration = uncertainty
            .iter()
            .zip(&weight)
            .map(|(u, w)| u * w)
            .collect();
        AcquisitionMaps {
            uncertainty,
            weight,
            exploration,
        }
    }

    /// Argmax of the selected field over untapped points of the state's own
    /// grid. Ties go to the lowest row-major index.
    pub fn suggest_next(&self, mode: SuggestMode) -> Result<Suggestion, Error> {
        let field = match mode {
            SuggestMode::Exploration => self.exploration_map(&self.grid).exploration,
            SuggestMode::UncertaintyOnly => self.uncertainty_map(&self.grid),
        };
        let index = argmax_untapped(&field, &self.tapped).ok_or(Error::ExhaustedGrid)?;
        Ok(Suggestion {
            index,
            point: self.grid.point(index),
            score: field[index],
        })
    }
}

fn surface_training(obs: &[TapObservation], include_desk: bool) -> Result<TrainingSet, Error> {
    let (inputs, values) = obs
        .iter()
        .filter(|o| include_desk || o.on_surface)
        .map(|o| (o.position, o.height))
        .unzip();
    TrainingSet::new(inputs, values)
}

/// First index attaining the maximum among entries whose mask is `false`.
pub(crate) fn argmax_untapped(field: &[f64], tapped: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (&v, &t)) in field.iter().zip(tapped).enumerate() {
        if t {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
