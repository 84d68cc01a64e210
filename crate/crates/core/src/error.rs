use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input is rational to working precision (expansion stopped at depth {depth})")]
    RationalInput { depth: usize },
    #[error("continued fraction depth {depth} is too small (need at least {needed})")]
    InsufficientDepth { depth: usize, needed: usize },
    #[error("symbol c·c̃ is numerically zero at phase {re}+{im}i")]
    SingularSymbol { re: f64, im: f64 },
    #[error("operation requires region {expected}, got {found}")]
    WrongRegion { expected: &'static str, found: &'static str },
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(&'static str),
    #[error("winding number of the symbol is {0}, expected 0")]
    WindingNonzero(i64),
    #[error("small divisor |e^(2πikα) − 1| < 1e-14 at k = {k}")]
    SmallDivisor { k: i64 },
    #[error("matrix entries overflowed during iteration")]
    Overflow,
    #[error("cocycle is not homotopic to the identity")]
    NotHomotopicToIdentity,
    #[error("phase grid too coarse: angle step {step} turns exceeds 1/4")]
    GridTooCoarse { step: f64 },
    #[error("no eigenvalue within {distance} of the target {target}")]
    NoNearbyEigenvalue { target: f64, distance: f64 },
    #[error("eigenvector vanishes at the centre (|u_0| = {0})")]
    CenterVanishes(f64),
    #[error("no resolvable decay window at this section size")]
    WindowEmpty,
    #[error("energy is numerically an eigenvalue of the block (|P| = {0})")]
    NearSingular(f64),
    #[error("interpolation nodes are not distinct")]
    DegenerateNodes,
    #[error("defect has mass {0} outside the four boundary modes")]
    SupportLeak(f64),
    #[error("determinant of the column matrix vanishes (min |det| = {0})")]
    DetVanishes(f64),
    #[error("vector field vanishes on the grid (min norm {0})")]
    VectorVanishes(f64),
    #[error("eigenvector is not of parabolic type (|det| = {0})")]
    NotCaseB(f64),
    #[error("square root phase is discontinuous on the grid")]
    SquareRootBranch,
    #[error("average [M₁₁²] = {0} is too small")]
    DegenerateAverage(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
