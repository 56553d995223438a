use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("body is not strictly convex: min principal radius {min_radius:e} at node {node}")]
    NonConvexBody { min_radius: f64, node: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("newton iterate lost convexity or monotonicity at iteration {iteration}: {reason}")]
    NonConvexIterate { iteration: usize, reason: String },

    #[error("newton did not converge after {iterations} iterations (last residual {last_residual:e})")]
    NewtonDiverged {
        iterations: usize,
        last_residual: f64,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("circles are not nested: {0}")]
    GeometryNotNested(String),

    #[error("no radial minimal graph: {0}")]
    NoRadialSolution(String),

    #[error("profile has {0} samples, at least 3 are required")]
    TooFewSamples(usize),

    #[error("singular linear system at block {0}")]
    SingularSystem(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable tag, used in error JSON and by the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::NonConvexBody { .. } => "NonConvexBody",
            Error::InvalidProblem(_) => "InvalidProblem",
            Error::NonConvexIterate { .. } => "NonConvexIterate",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::OutOfRange(_) => "OutOfRange",
            Error::GeometryNotNested(_) => "GeometryNotNested",
            Error::NoRadialSolution(_) => "NoRadialSolution",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::SingularSystem(_) => "SingularSystem",
            Error::Config(_) => "Config",
            Error::Io { .. } => "Io",
        }
    }
}
