use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field F_{p}^{degree} has more than 1024 elements")]
    FieldTooLarge { p: u32, degree: u32 },
    #[error("p^{level} does not fit the exponent range used by the series engine")]
    ExponentOverflow { level: u32 },
    #[error("scalar type: eta and eta' agree at embedding {index}")]
    ScalarType { index: usize },
    #[error("cuspidal type requires eta' = eta^(p^f)")]
    NotCuspidalPair,
    #[error("profile {0} violates the cuspidal pairing rule")]
    BadProfile(String),
    #[error("Theta_J does not factor through the norm (residue {residue})")]
    NormDescentFailed { residue: String },
    #[error("profile has s_J,i = -1 at {indices:?}; not in P_tau")]
    NotInPTau { indices: Vec<usize> },
    #[error("Hodge type is not p-bounded at embedding {index}")]
    NotPBounded { index: usize },
    #[error("Hodge type is Steinberg")]
    Steinberg,
    #[error("embedding {index} is forced to be a transition")]
    ForcedTransition { index: usize },
    #[error("embedding {index} is forced to be a non-transition")]
    ForcedNonTransition { index: usize },
    #[error("transition constraints cannot be met without a scalar type")]
    Unsatisfiable,
    #[error("Hodge type is regular at embedding {index}")]
    NotIrregular { index: usize },
    #[error("theta_{index} would leave the p-bounded range")]
    ThetaOutOfRange { index: usize },
    #[error("weight operators need f >= 2")]
    OperatorNeedsTwoEmbeddings,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("series is zero to the known precision and cannot be inverted")]
    NotInvertible,
    #[error("series has terms off the v-lattice (u-exponent {exponent})")]
    MalformedGrading { exponent: i64 },
    #[error("matrix at index {index} is not a unit over F'[[v]]")]
    NotUnit { index: usize },
    #[error("no shape at index {index}: neither a_i nor d_i is divisible by v")]
    NoShape { index: usize },
    #[error("strong determinant condition fails at index {index}")]
    StrongDetFailed { index: usize },
    #[error("module is not in C^tau(J) for the requested profile")]
    NotInComponent,
    #[error("descent data mismatch at index {index}")]
    DescentMismatch { index: usize },
    #[error("xi_{index} = {value}, expected 0")]
    NonzeroXi { index: usize, value: i64 },
    #[error("twist parameters give isomorphic rank-one modules after inverting u")]
    ExceptionalTwist,
    #[error("inconclusive at precision: {0}")]
    Inconclusive(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
