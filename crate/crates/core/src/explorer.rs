//! Closed-loop tapping: seed the model with random taps, then repeatedly
//! suggest, tap and ingest until the budget is spent.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{Scene, TapResult};
use crate::gp::KernelParams;
use crate::surface::{ExplorationState, ModelConfig, SuggestMode, TapObservation};
use crate::{CandidateGrid, Error, Point2};

/// Generator used for every random draw of a run. Stream 0 selects tap
/// positions, stream 1 draws height noise.
pub const RNG_NAME: &str =
    "ChaCha8Rng (rand_chacha 0.9); stream 0 = positions, stream 1 = height noise";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Argmax of uncertainty × on-surface weight.
    WeightedExploration,
    /// Argmax of the height-GP variance alone.
    UncertaintyOnly,
    /// Uniform over untapped grid points (baseline).
    RandomSearch,
    /// Next untapped grid point in row-major order (baseline).
    GridSearch,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::WeightedExploration,
        Strategy::UncertaintyOnly,
        Strategy::RandomSearch,
        Strategy::GridSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::WeightedExploration => "weighted",
            Strategy::UncertaintyOnly => "uncertainty",
            Strategy::RandomSearch => "random",
            Strategy::GridSearch => "grid",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or(Error::InvalidParameter(
                "strategy must be one of weighted, uncertainty, random, grid",
            ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Total taps, initial random taps included.
    pub budget: usize,
    pub n_initial_random: usize,
    pub grid_resolution: usize,
    pub surface_kernel: KernelParams,
    pub weight_kernel: KernelParams,
    pub desk_taps_in_surface_gp: bool,
    pub strategy: Strategy,
    /// Record map snapshots before every `k`-th tap.
    pub snapshot_every: Option<usize>,
}

impl RunConfig {
    pub const DEFAULT_BUDGET: usize = 17;
    pub const DEFAULT_INITIAL_RANDOM: usize = 3;
    pub const DEFAULT_GRID_RESOLUTION: usize = 47;

    pub fn validate(&self) -> Result<(), Error> {
        if self.budget == 0 {
            return Err(Error::InvalidParameter("budget must be positive"));
        }
        if self.n_initial_random > self.budget {
            return Err(Error::InvalidParameter("n_initial_random exceeds budget"));
        }
        if self.grid_resolution < 2 {
            return Err(Error::InvalidParameter(
                "grid resolution must be at least 2",
            ));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::InvalidParameter("snapshot_every must be positive"));
        }
        self.surface_kernel.validate()?;
        self.weight_kernel.validate()
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            surface_kernel: self.surface_kernel,
            weight_kernel: self.weight_kernel,
            desk_taps_in_surface_gp: self.desk_taps_in_surface_gp,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let model = ModelConfig::default();
        RunConfig {
            seed: 0,
            budget: Self::DEFAULT_BUDGET,
            n_initial_random: Self::DEFAULT_INITIAL_RANDOM,
            grid_resolution: Self::DEFAULT_GRID_RESOLUTION,
            surface_kernel: model.surface_kernel,
            weight_kernel: model.weight_kernel,
            desk_taps_in_surface_gp: model.desk_taps_in_surface_gp,
            strategy: Strategy::WeightedExploration,
            snapshot_every: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TapOrigin {
    InitialRandom,
    Strategy,
    /// Placed by the caller through [`Explorer::tap_grid_point`].
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapRecord {
    pub iteration: usize,
    pub origin: TapOrigin,
    pub grid_index: usize,
    pub position: Point2,
    pub result: TapResult,
    /// On-surface taps so far, this one included.
    pub cumulative_on_surface: usize,
}

/// Maps over the candidate grid as they stood right before tap `iteration`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSnapshot {
    pub iteration: usize,
    pub uncertainty: Vec<f64>,
    pub weight: Vec<f64>,
    pub exploration: Vec<f64>,
    pub posterior_mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub config: RunConfig,
    pub rng: &'static str,
    pub records: Vec<TapRecord>,
    pub snapshots: Vec<MapSnapshot>,
    /// Why the run ended before spending its budget, if it did.
    pub stopped_early: Option<Error>,
}

impl RunTrace {
    pub fn n_taps(&self) -> usize {
        self.records.len()
    }

    pub fn n_on_surface(&self) -> usize {
        self.records.iter().filter(|r| r.result.on_surface).count()
    }
}

/// Draws `n` distinct grid indices, uniformly and without replacement.
pub fn initial_indices<R: Rng + ?Sized>(n: usize, grid_len: usize, rng: &mut R) -> Vec<usize> {
    index::sample(rng, grid_len, n.min(grid_len)).into_vec()
}

/// One experiment in progress.
pub struct Explorer<'a> {
    config: RunConfig,
    scene: &'a Scene,
    state: ExplorationState,
    select_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    records: Vec<TapRecord>,
    snapshots: Vec<MapSnapshot>,
}

impl<'a> Explorer<'a> {
    pub fn new(config: RunConfig, scene: &'a Scene) -> Result<Self, Error> {
        config.validate()?;
        let grid = CandidateGrid::new(config.grid_resolution)?;
        let state = ExplorationState::new(config.model_config(), grid)?;
        let select_rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
        noise_rng.set_stream(1);
        Ok(Explorer {
            config,
            scene,
            state,
            select_rng,
            noise_rng,
            records: Vec::new(),
            snapshots: Vec::new(),
        })
    }

    pub fn state(&self) -> &ExplorationState {
        &self.state
    }

    pub fn records(&self) -> &[TapRecord] {
        &self.records
    }

    /// Taps `n_initial_random` distinct random grid points and feeds them to
    /// both GPs.
    pub fn initial_taps(&mut self) -> Result<Vec<TapObservation>, Error> {
        let picks = initial_indices(
            self.config.n_initial_random,
            self.state.grid().len(),
            &mut self.select_rng,
        );
        let mut out = Vec::with_capacity(picks.len());
        for idx in picks {
            let rec = self.tap_index(idx, TapOrigin::InitialRandom)?;
            out.push(TapObservation::from_tap(rec.position, &rec.result));
        }
        if out.len() < self.config.n_initial_random {
            return Err(Error::ExhaustedGrid);
        }
        Ok(out)
    }

    /// Chooses, taps and ingests one point according to the run's strategy.
    pub fn step(&mut self) -> Result<TapRecord, Error> {
        let idx = self.choose()?;
        self.tap_index(idx, TapOrigin::Strategy)
    }

    /// Taps a caller-chosen grid point and ingests it.
    pub fn tap_grid_point(&mut self, index: usize) -> Result<TapRecord, Error> {
        if index >= self.state.grid().len() {
            return Err(Error::InvalidParameter("grid index out of range"));
        }
        self.tap_index(index, TapOrigin::Scripted)
    }

    fn choose(&mut self) -> Result<usize, Error> {
        if self.state.untapped_count() == 0 {
            return Err(Error::ExhaustedGrid);
        }
        match self.config.strategy {
            Strategy::WeightedExploration => {
                Ok(self.state.suggest_next(SuggestMode::Exploration)?.index)
            }
            Strategy::UncertaintyOnly => {
                Ok(self.state.suggest_next(SuggestMode::UncertaintyOnly)?.index)
            }
            Strategy::RandomSearch => {
                let open: Vec<usize> = (0..self.state.grid().len())
                    .filter(|&i| !self.state.is_tapped(i))
                    .collect();
                Ok(open[self.select_rng.random_range(0..open.len())])
            }
            Strategy::GridSearch => (0..self.state.grid().len())
                .find(|&i| !self.state.is_tapped(i))
                .ok_or(Error::ExhaustedGrid),
        }
    }

    fn tap_index(&mut self, idx: usize, origin: TapOrigin) -> Result<TapRecord, Error> {
        let iteration = self.records.len();
        if let Some(every) = self.config.snapshot_every {
            if iteration.is_multiple_of(every) {
                self.snapshots.push(snapshot(&self.state, iteration));
            }
        }
        let position = self.state.grid().point(idx);
        let result = self.scene.tap_noisy(position, &mut self.noise_rng)?;
        self.state
            .ingest(TapObservation::from_tap(position, &result))?;
        let prior_on = self.records.last().map_or(0, |r| r.cumulative_on_surface);
        let record = TapRecord {
            iteration,
            origin,
            grid_index: idx,
            position,
            result,
            cumulative_on_surface: prior_on + usize::from(result.on_surface),
        };
        self.records.push(record);
        Ok(record)
    }

    pub fn finish(self, stopped_early: Option<Error>) -> (RunTrace, ExplorationState) {
        let trace = RunTrace {
            config: self.config,
            rng: RNG_NAME,
            records: self.records,
            snapshots: self.snapshots,
            stopped_early,
        };
        (trace, self.state)
    }
}

pub fn snapshot(state: &ExplorationState, iteration: usize) -> MapSnapshot {
    let grid = state.grid();
    let maps = state.exploration_map(grid);
    MapSnapshot {
        iteration,
        uncertainty: maps.uncertainty,
        weight: maps.weight,
        exploration: maps.exploration,
        posterior_mean: state.posterior_mean_map(grid),
    }
}

/// Runs a full experiment and also returns the final model state.
///
/// Only an invalid configuration is an `Err`; failures during the loop end
/// the run early and are recorded in [`RunTrace::stopped_early`].
pub fn run_with_state(
    config: RunConfig,
    scene: &Scene,
) -> Result<(RunTrace, ExplorationState), Error> {
    let mut explorer = Explorer::new(config, scene)?;
    let mut stopped = explorer.initial_taps().err();
    while stopped.is_none() && explorer.records.len() < config.budget {
        if let Err(e) = explorer.step() {
            stopped = Some(e);
        }
    }
    Ok(explorer.finish(stopped))
}

pub fn run(config: RunConfig, scene: &Scene) -> Result<RunTrace, Error> {
    run_with_state(config, scene).map(|(trace, _)| trace)
}
