//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the algebraic and numerical layers.
///
/// Every error names the operation-level contract it enforces; none of them
/// is used for control flow on valid inputs.
#[derive(Debug, Error)]
pub enum Error {
    /// A product or field application would produce a term above the
    /// configured degree cap.
    #[error("degree cap exceeded: result would reach degree {needed}, cap is {cap}")]
    DegreeCapExceeded { needed: u32, cap: u32 },

    /// A scale factor √(num/den) has no representation in the active scalar
    /// backend (exact backends represent √(n/d) only when n·d is a square or
    /// twice a square).
    #[error("scale factor sqrt({num}/{den}) is not representable in the {backend} backend")]
    ScaleNotRepresentable {
        num: u128,
        den: u128,
        backend: &'static str,
    },

    /// An operation needs the imaginary unit but the backend is real.
    #[error("operation needs the imaginary unit; the {backend} backend is real-valued")]
    NoImaginaryUnit { backend: &'static str },

    /// The quadrature oracle would need more nodes per mode than budgeted.
    #[error("quadrature node budget exceeded: need {needed} nodes per mode, budget is {budget}")]
    NodeBudgetExceeded { needed: u32, budget: u32 },

    /// A coefficient was required to be real-valued but has an imaginary part.
    #[error("coefficient must be real-valued in {place}: found {value}")]
    NonRealCoefficient { place: String, value: String },

    /// Probe level too deep for the requested cutoff (probe ≤ cutoff/4).
    #[error("cutoff {cutoff} too small for probe level {probe}: probe must be at most cutoff/4")]
    ProbeTooDeep { cutoff: u32, probe: u32 },

    /// A truncated operator would exceed the dense-matrix size cap.
    #[error("truncated matrix would hold {entries} entries, above the cap of {cap}")]
    TruncationTooLarge { entries: u128, cap: u128 },

    /// A mode outside the truncation scheme was referenced.
    #[error("mode {mode} is not part of the truncation scheme")]
    UnsupportedMode { mode: u32 },

    /// A polynomial's degree cannot be represented at the given cutoff.
    #[error("polynomial degree {degree} too large for per-mode cutoff {cutoff}")]
    DegreeVsCutoff { degree: u32, cutoff: u32 },

    /// A matrix claimed Hermitian deviates from its adjoint beyond tolerance.
    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// Eigendecomposition produced a non-unitary exponential.
    #[error("unitarity residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    /// A matrix fails the complex-structure contract (J² = −𝟙, compatibility).
    #[error("not a complex structure: {reason}")]
    BadComplexStructure { reason: String },

    /// A metric that must be symmetric positive definite is not.
    #[error("metric is not positive: {reason}")]
    MetricNotPositive { reason: String },

    /// A matrix that must be invertible is numerically singular.
    #[error("matrix is singular or too ill-conditioned to invert")]
    SingularMatrix,

    /// A matrix that must be symmetric is not.
    #[error("matrix must be symmetric: max asymmetry {deviation:.3e}")]
    NotSymmetric { deviation: f64 },

    /// A transformation map fails the CCR admissibility conditions.
    #[error("transformation map is not CCR-admissible: {witness}")]
    NotAdmissible { witness: String },

    /// An operation requires a map with zero position-side images
    /// (a multiplication generator can shift momenta only).
    #[error("position-side images must vanish here: a multiplication generator cannot shift the multiplication fields")]
    PositionShiftPresent,

    /// An operation requires a map with vanishing constant and linear parts.
    #[error("map must have vanishing degree-0 and degree-1 parts for this operation: {place}")]
    NotHigherOrder { place: String },

    /// Tail metadata is required to decide a series but was not provided.
    #[error("tail metadata required: {what}")]
    MissingTail { what: String },

    /// Model-file ingestion failure (parse, schema, or invariant).
    #[error("model error: {0}")]
    Model(String),

    /// Catch-all for contract violations with no dedicated variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// I/O failure while reading models or writing reports.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
