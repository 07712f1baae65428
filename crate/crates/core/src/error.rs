use thiserror::Error;

/// Errors raised by the navigation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion norm {norm} deviates from unity by more than {tol:e}")]
    NonUnitQuaternion { norm: f64, tol: f64 },

    #[error("trident quaternion violates the unit structure: {0}")]
    NonUnitTrident(String),

    #[error("scalar residue {residue:e} of a recovered vector exceeds tolerance")]
    ScalarResidueTooLarge { residue: f64 },

    #[error("argument {0} lies outside the Chebyshev domain [-1, 1]")]
    OutOfDomain(f64),

    #[error("{nodes} nodes cannot determine a degree-{degree} fit")]
    InsufficientNodes { nodes: usize, degree: usize },

    #[error("position radius {radius} m is too close to the earth's centre")]
    NearSingularPosition { radius: f64 },

    #[error("curvature matrix is singular at latitude {latitude} rad")]
    PolarSingularity { latitude: f64 },

    #[error("geodetic inversion did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("invalid integration step: {0}")]
    InvalidStep(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("fit degree {degree} too high for {samples} samples")]
    DegreeTooHigh { degree: usize, samples: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
