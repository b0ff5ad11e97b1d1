//! Active tapping surface reconstruction with Gaussian processes.
//!
//! The crate models an unknown object surface inside a square search area with
//! two coupled Gaussian processes: one regresses tap heights, the other the
//! binary on-surface indicator. The next tap is chosen at the argmax of the
//! product of the height-GP posterior variance and the indicator-GP posterior
//! mean, evaluated on a candidate grid.
//!
//! All geometry used by the GP math lives in the unit square `[0, 1]²`;
//! heights are divided by a scene height scale before entering the model.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]
#![deny(rust_2018_idioms)]

extern crate alloc;

mod error;

pub mod env;
pub mod explorer;
pub mod geometry;
pub mod gp;
pub mod metrics;
pub mod surface;

pub use error::Error;
pub use geometry::{CandidateGrid, Point2};
pub use gp::{fit, kernel_matrix, rbf, FittedGP, KernelParams, Prediction, TrainingSet};
pub use nalgebra::DMatrix;

pub type Result<T, E = Error> = core::result::Result<T, E>;
