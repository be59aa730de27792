use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Generators with non-positive determinant, or a singular matrix where
    /// an invertible one is required.
    InvalidLattice { determinant: f64 },
    /// Lattice too skewed for the bounded shortest-vector search.
    AnisotropyTooLarge { anisotropy: f64, limit: f64 },
    /// Grid resolution or sample count that does not describe an N³ grid.
    InvalidGrid { reason: &'static str },
    /// Height is not a regular value of the sampled field.
    IrregularLevel { height: f64, min_gradient: f64, threshold: f64 },
    /// `∫R⁺` and `-∫R⁻` disagree; the grid is too coarse for the field.
    DiscretizationInconsistency { positive: f64, negative: f64 },
    /// Out-of-range argument.
    Parameter { name: &'static str, value: f64, expected: &'static str },
    /// Step-size control gave up.
    NumericFailure { what: &'static str, at: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidLattice { determinant } => {
                write!(f, "invalid lattice: generator determinant {determinant} is not positive")
            }
            Error::AnisotropyTooLarge { anisotropy, limit } => {
                write!(f, "lattice anisotropy {anisotropy:.3} exceeds the supported limit {limit}")
            }
            Error::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
            Error::IrregularLevel { height, min_gradient, threshold } => {
                write!(f, "level {height} is not regular: min |Df| {min_gradient:e} <= {threshold:e}")
            }
            Error::DiscretizationInconsistency { positive, negative } => {
                write!(f, "integral of R+ ({positive:e}) disagrees with m(f) ({negative:e}); refine the grid")
            }
            Error::Parameter { name, value, expected } => {
                write!(f, "parameter {name} = {value} out of range: expected {expected}")
            }
            Error::NumericFailure { what, at } => write!(f, "{what} failed at {at}"),
        }
    }
}

impl core::error::Error for Error {}
