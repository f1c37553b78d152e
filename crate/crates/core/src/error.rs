use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {point} lies outside the domain of {context}")]
    DomainViolation { point: String, context: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("incompatible series variables: {0}")]
    IncompatibleVariables(String),

    #[error("series is not invertible: {0}")]
    NonInvertible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("kernel denominator vanishes at w={w}, lambda={lambda}")]
    SingularKernel { w: String, lambda: String },

    #[error("chart inverse did not converge after {iterations} Newton iterations (point {point})")]
    OutsideChart { point: String, iterations: usize },

    #[error("wedge chart certification failed: {violations} of {samples} samples left the wedge")]
    Lemma27Failed { violations: usize, samples: usize },

    #[error("inconsistent trace: {0}")]
    InconsistentTrace(String),

    #[error("quadrature node theta={theta:.6} maps to {point}, outside the domain of g")]
    QuadratureEscape { theta: f64, point: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Strips any stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
