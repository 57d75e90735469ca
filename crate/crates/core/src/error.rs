use thiserror::Error;

/// Errors produced by meshing, assembly, solvers, and the analytic oracles.
#[derive(Debug, Error)]
pub enum Error {
    /// A generated triangle fell below the degeneracy threshold, or the
    /// generator could not reach the requested element size.
    #[error("degenerate mesh: {0}")]
    MeshDegenerate(String),

    /// The reflected half-mesh failed to match its mirror image.
    #[error("antipodal symmetry broken: {0}")]
    SymmetryBroken(String),

    /// Boundary-condition reduction applied to an already reduced system.
    #[error("operator matrices already reduced (bc = {0})")]
    AlreadyReduced(String),

    /// A boundary node has no antipodal partner.
    #[error("boundary pairing incomplete: node {0} has no partner")]
    PairingIncomplete(usize),

    /// Eigensolver failed to reach the residual target.
    #[error("eigensolver did not converge within {0} restarts")]
    NoConvergence(usize),

    /// Factorization of the shifted operator failed even after perturbing
    /// the shift.
    #[error("shifted operator K - sigma*M is numerically singular (sigma = {0})")]
    SingularShift(f64),

    /// Argument outside the mathematical domain of a special function.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Sign-bracketing scan found no k-th sign change before the scan cap.
    #[error("bracketing failed: no sign change for zero {k} of order {m} below x = {cap}")]
    BracketingFailed { m: u32, k: u32, cap: f64 },

    /// Green's kernel evaluated at (numerically) coincident points.
    #[error("coincident points: |x - y| < {0:e}")]
    CoincidentPoints(f64),

    /// Green-quadrature evaluation point collides with a quadrature node.
    #[error("evaluation point ({0}, {1}) too close to a quadrature node")]
    EvaluationTooClose(f64, f64),

    /// Spectrum lacks eigenvectors required for classification.
    #[error("spectrum carries no eigenvectors")]
    MissingVectors,

    /// Invalid input, configuration, or precondition violation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Configuration file could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// I/O error, with the offending path.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
