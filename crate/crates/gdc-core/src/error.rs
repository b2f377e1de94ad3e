use thiserror::Error;

/// Errors surfaced by the algebra, representation, geometry, and suite layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported signature ({plus},{minus}): total dimension must be at most 8")]
    UnsupportedSignature { plus: usize, minus: usize },

    #[error("signature mismatch: left algebra is ({lp},{lm}), right algebra is ({rp},{rm})")]
    SignatureMismatch {
        lp: usize,
        lm: usize,
        rp: usize,
        rm: usize,
    },

    #[error("grade {grade} out of range for an algebra of dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: usize },

    #[error("blade index {index} out of range for an algebra with {count} basis blades")]
    BladeOutOfRange { index: usize, count: usize },

    #[error("repeated index {index} in multi-index {indices:?}")]
    RepeatedIndex { index: usize, indices: Vec<usize> },

    #[error("axis {axis} out of range for an algebra of dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("interior product requires a grade-1 contraction argument, got grades {grades:?}")]
    NotGradeOne { grades: Vec<usize> },

    #[error("conjugation-composed involution requested over a real scalar field")]
    ConjOverRealField,

    #[error(
        "representation of Cl({plus},{minus}) requires at least one generator; \
         the trivial algebra has none"
    )]
    TrivialAlgebraRepresentation { plus: usize, minus: usize },

    #[error(
        "adjoint class {class} is inadmissible on Cl({plus},{minus}) over {field}: \
         the intertwiner equation has no nonzero solution"
    )]
    InadmissibleClass {
        class: String,
        plus: usize,
        minus: usize,
        field: String,
    },

    #[error(
        "adjoint class {class} requires a complexified algebra but the representation \
         of Cl({plus},{minus}) is over the real field"
    )]
    ConjClassOnRealAlgebra {
        class: String,
        plus: usize,
        minus: usize,
    },

    #[error("matrix is singular or near-singular (pivot magnitude {pivot:.3e})")]
    SingularMatrix { pivot: f64 },

    #[error("intertwiner solution space for {class} has dimension {dim}, expected 1")]
    IntertwinerDegenerate { class: String, dim: usize },

    #[error(
        "Killing number {lambda} is inadmissible on this chart: the integrability constraint \
         requires scalar curvature R = -4*lambda^2*n*(n-1) = {required:.6}, chart has R = {actual:.6}"
    )]
    KillingConstraint {
        lambda: String,
        required: f64,
        actual: f64,
    },

    #[error(
        "Killing transport is path-dependent at ({x:?}): leg orderings disagree by {deviation:.3e} \
         (integrability failure)"
    )]
    KillingPathDependence { x: Vec<f64>, deviation: f64 },

    #[error(
        "plane-wave kernel is empty: no spinor solves (K - m)u = 0 for k = {k:?}, m = {m}; \
         smallest singular value {sigma_min:.3e} (mass-shell residual {shell:.3e})"
    )]
    EmptyWaveKernel {
        k: Vec<f64>,
        m: String,
        sigma_min: f64,
        shell: f64,
    },

    #[error("field construction '{kind}' is unsupported on chart '{chart}'")]
    UnsupportedOnChart { kind: String, chart: String },

    #[error("point {x:?} lies outside the valid domain of chart '{chart}'")]
    PointOutsideChart { chart: String, x: Vec<f64> },

    #[error("chart '{chart}' has dimension {chart_dim} but the field signature has dimension {sig_dim}")]
    ChartDimensionMismatch {
        chart: String,
        chart_dim: usize,
        sig_dim: usize,
    },

    #[error("data set is excluded: {reason}")]
    ExcludedDataSet { reason: String },

    #[error("invalid Killing number {lambda}: the real and imaginary parts cannot both be nonzero")]
    MixedKillingNumber { lambda: String },

    #[error("Schouten tensor requires dimension n >= 3, got n = {dim}")]
    SchoutenDimension { dim: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
