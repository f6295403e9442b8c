use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is singular (|det| = {0:e})")]
    SingularMatrix(f64),
    #[error("eigenvalue modulus {modulus} is too close to the threshold {alpha} to classify")]
    AmbiguousModulus { modulus: f64, alpha: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside the supported range 1..=8")]
    DimensionOutOfRange(usize),
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("linear part has no eigenvalue 1; the map has a fixed point")]
    NoUnitEigenvalue,
    #[error("fixed space and image of l(g) - I fail to complement (gap {gap:e})")]
    NonSemisimpleNeutral { gap: f64 },
    #[error("linear part has an eigenvalue within {distance:e} of 1")]
    UnitEigenvalue { distance: f64 },
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("subspace is trivial")]
    EmptySubspace,
    #[error("element does not contract: no power can become hyperbolic")]
    NotContracting,
    #[error("required power exceeds the cap of {0}")]
    Overflow(u64),
    #[error("element is not hyperbolic")]
    NotHyperbolic,
    #[error("elements are not transversal (value {value:e})")]
    NotTransversal { value: f64 },
    #[error("subspace is not maximal isotropic")]
    NotMaximalIsotropic,
    #[error("projection to the reference subspace is singular")]
    DegenerateProjection,
    #[error("linear part does not preserve the form (residual {residual:e})")]
    NotIsometry { residual: f64 },
    #[error("element is not R-regular (neutral dimension {neutral_dim})")]
    NotRRegular { neutral_dim: usize },
    #[error("neutral space has dimension {0}, expected 1")]
    NeutralDimWrong(usize),
    #[error("element is not compatible with the product splitting: {0}")]
    NotProductCompatible(String),
    #[error("subspaces coincide")]
    EqualSubspaces,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("isotropic line lies in U + span(w1); it is on neither side")]
    OnSeparatingPlane,
    #[error("signature ({p},{q}) is not supported here")]
    UnsupportedSignature { p: usize, q: usize },
    #[error("word length {0} exceeds the cap of 16")]
    BallTooLarge(usize),
    #[error("invariant axes meet at a point (commuting: {commuting})")]
    AxesIntersect { point: Vec<f64>, commuting: bool },
    #[error("no exponent up to {0} verified")]
    NoVerifiedN(u64),
    #[error("witness geometry is degenerate: {0}")]
    WitnessGeometry(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("rotation angle is a multiple of pi")]
    DegenerateAngle,
    #[error("unknown group descriptor {0:?}")]
    UnknownDescriptor(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
