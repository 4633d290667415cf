use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("form is degenerate (det = 0)")]
    DegenerateForm,
    #[error("discriminant group {group} is not {p}-elementary")]
    NotPElementary { p: u64, group: String },
    #[error("rows of the basis matrix are linearly dependent")]
    DependentRows,
    #[error("expected {expected} columns, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("glue vector {vector} does not lie in p·L^∨")]
    NotInDual { vector: usize },
    #[error("adjoined classes are dependent in the discriminant group")]
    DependentGlue,
    #[error("resulting form is not integral")]
    NonIntegralResult,
    #[error("form is not definite")]
    NotDefinite,
    #[error("expected a rank-2 lattice, got rank {rank}")]
    NotRank2 { rank: usize },
    #[error("parse error at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GModuleError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix is not square")]
    NotSquare,
    #[error("action does not have order {p}")]
    NotOrderP { p: u64 },
    #[error("action does not preserve the form")]
    FormNotPreserved,
    #[error("prime {0} outside the supported range 3..=19")]
    UnsupportedPrime(u64),
    #[error("Jordan blocks of size 2..p-2 present")]
    MiddleBlocksPresent,
    #[error("neither degeneration nor the vanishing hypotheses hold")]
    HypothesesNotMet,
    #[error("formula and explicit computation disagree: {0}")]
    CrossCheckFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalityError {
    #[error("cohomology has torsion")]
    TorsionPresent,
    #[error("prime {0} not supported here")]
    UnsupportedPrime(u64),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("inequality chain violated: {0}")]
    InconsistentInput(String),
    #[error("operation requires p = 3")]
    NotOrder3,
    #[error("fixed locus is not stable: {0}")]
    NotStable(String),
    #[error("weight of point {0} is unknown")]
    WeightUnknown(String),
    #[error("point {0} has weight 2")]
    WeightTwoPresent(String),
    #[error("no weight assignment satisfies the constraints")]
    Infeasible,
    #[error("#Fix = {declared} but the profile predicts {predicted}")]
    FixedCountMismatch { declared: u64, predicted: u64 },
    #[error("l_(p-1) in degree 2 is nonzero")]
    MiddleBlocksPresent,
    #[error("result is not integral")]
    NonIntegralResult,
    #[error("missing data: {0}")]
    MissingData(String),
    #[error(transparent)]
    GModule(#[from] GModuleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("discriminant p^{found} does not match expected p^{expected}")]
    DiscrMismatch { expected: usize, found: usize },
    #[error("no integral scale exists")]
    NoIntegralScale,
    #[error("glue row {0} is not divisible by p in the dual")]
    GlueNotInDual(usize),
    #[error("glue transform has wrong shape")]
    GlueShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("{n} and {q} are not coprime")]
    NotCoprime { n: i64, q: i64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("classification failure: {0}")]
    ClassificationFailure(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Hilb2Error {
    #[error("half-integral coefficient in expansion")]
    NonIntegralExpansion,
    #[error("class lies outside the span of H2 products and sigma")]
    OutsideSupportedSpan,
    #[error("K3 form invalid: {0}")]
    InvalidForm(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("schema error at {path}: {msg}")]
    SchemaError { path: String, msg: String },
    #[error("consistency error: {0}")]
    ConsistencyError(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("unknown scenario {0}")]
    Unknown(String),
}
