use alloc::string::String;

/// Errors raised by ring construction and the algebraic operations built on it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("name `{0}` is already used in this ring tower")]
    DuplicateName(String),
    #[error("cannot localize at zero")]
    ZeroDenominator,
    #[error("cannot localize at a zero divisor: {0}")]
    ZeroDivisorDenominator(String),
    #[error("quotient is not étale: f'(t) is not a unit")]
    NotEtale,
    #[error("polynomial is not monic in `{0}`")]
    NotMonic(String),
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("objects live over different rings")]
    RingMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not invertible over the ring")]
    NotInvertible,
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("witness matrix has nonzero trace")]
    NonzeroTrace,
    #[error("value table is not a derivation: {0}")]
    NotADerivation(String),
    #[error("value table is not an inner derivation over the ring")]
    NoSolution,
    #[error("descent datum fails the cocycle condition")]
    CocycleFailed,
    #[error("descended kernel is not free: {0}")]
    KernelNotFree(String),
    #[error("descended object is not closed: {0}")]
    NotClosed(String),
    #[error("descent datum is not an algebra map: {0}")]
    NotAlgebraMap(String),
    #[error("no conjugating matrix found over the amalgam")]
    NotConjugation,
    #[error("lift does not reduce to the cochain modulo scalars")]
    LiftMismatch,
    #[error("expected a scalar matrix: {0}")]
    NotScalar(String),
    #[error("lift is not differentially constant")]
    LiftNotConstant,
    #[error("map is not differential: {0}")]
    NotDifferential(String),
    #[error("ring homomorphism invalid: {0}")]
    InvalidHom(String),
    #[error("value is not differentially constant")]
    NotConstant,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable name of the error variant, used by scenario files to state expected failures.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::DuplicateName(_) => "DuplicateName",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::ZeroDivisorDenominator(_) => "ZeroDivisorDenominator",
            Error::NotEtale => "NotEtale",
            Error::NotMonic(_) => "NotMonic",
            Error::UnsupportedTower(_) => "UnsupportedTower",
            Error::RingMismatch => "RingMismatch",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotInvertible => "NotInvertible",
            Error::NotAUnit(_) => "NotAUnit",
            Error::NonzeroTrace => "NonzeroTrace",
            Error::NotADerivation(_) => "NotADerivation",
            Error::NoSolution => "NoSolution",
            Error::CocycleFailed => "CocycleFailed",
            Error::KernelNotFree(_) => "KernelNotFree",
            Error::NotClosed(_) => "NotClosed",
            Error::NotAlgebraMap(_) => "NotAlgebraMap",
            Error::NotConjugation => "NotConjugation",
            Error::LiftMismatch => "LiftMismatch",
            Error::NotScalar(_) => "NotScalar",
            Error::LiftNotConstant => "LiftNotConstant",
            Error::NotDifferential(_) => "NotDifferential",
            Error::InvalidHom(_) => "InvalidHom",
            Error::NotConstant => "NotConstant",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
