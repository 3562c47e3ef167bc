use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution parameters: {0}")]
    InvalidDistribution(String),

    #[error("cannot parse distribution `{0}` (expected exp:<rate>, geom:<p>, pareto:<gamma>, stretched:<beta>:<scale>, unif01 or const:<value>)")]
    DistributionSpec(String),

    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),

    #[error("side length must be positive")]
    SideLength,

    #[error("grid with side {n} and dimension {d} exceeds the vertex budget of {budget}")]
    GridTooLarge { n: usize, d: usize, budget: usize },

    #[error("vertex {0:?} is outside the cube")]
    VertexOutOfRange(Vec<usize>),

    #[error("path count {count} exceeds the enumeration cap {cap}")]
    PathCapExceeded { count: u128, cap: u128 },

    #[error("time {0} is outside [0, 1]")]
    TimeOutOfRange(f64),

    #[error("tail beyond k = {k} has probability {prob:e}, too small to condition on")]
    DegenerateTail { k: f64, prob: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("distribution {dist} fails the conditional variance floor condition")]
    VarianceFloorFails { dist: String },

    #[error("invalid estimator input: {0}")]
    Estimator(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
