use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Kernel matrix plus noise was not positive-definite.
    FactorizationFailure,
    /// Every candidate grid point has already been tapped.
    ExhaustedGrid,
    /// A tap position outside the unit square.
    OutOfArea {
        x: f64,
        y: f64,
    },
    EmptyTrace,
    MismatchedBudgets {
        proposed: usize,
        baseline: usize,
    },
    /// No evaluation point falls on the object footprint.
    EmptyFootprint,
    /// The trace does not carry a snapshot for every iteration.
    MissingSnapshots,
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::FactorizationFailure => f.write_str(
                "kernel matrix is not positive-definite; duplicate inputs need noise_var > 0",
            ),
            Error::ExhaustedGrid => f.write_str("every candidate grid point has been tapped"),
            Error::OutOfArea { x, y } => {
                write!(
                    f,
                    "tap position ({x}, {y}) lies outside the unit search area"
                )
            }
            Error::EmptyTrace => f.write_str("trace contains no taps"),
            Error::MismatchedBudgets { proposed, baseline } => write!(
                f,
                "traces have different tap counts ({proposed} vs {baseline})"
            ),
            Error::EmptyFootprint => {
                f.write_str("no evaluation point lies on the object footprint")
            }
            Error::MissingSnapshots => {
                f.write_str("trace lacks a map snapshot for every iteration")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
