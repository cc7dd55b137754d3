use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    CompositePrime(u64),
    #[error("defining polynomial is reducible modulo {0}")]
    ReduciblePolynomial(u64),
    #[error("bad degree: {0}")]
    BadDegree(String),
    #[error("working precision must be at least 1, got {0}")]
    BadPrecision(u32),
    #[error("operands live in different ring contexts")]
    ContextMismatch,
    #[error("operands live at different levels ({0} vs {1})")]
    LevelMismatch(usize, usize),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not divisible by p^{0}")]
    NotDivisible(u32),
    #[error("precision underflow: {0}")]
    PrecisionUnderflow(String),
    #[error("Hensel lifting failed: derivative of the defining polynomial is not a unit")]
    HenselFailure,
    #[error("operation requires an odd prime, got p = {0}")]
    OddPrimeRequired(u64),
    #[error("ghost vector is not in the image of the ghost map (component {0})")]
    NotInGhostImage(usize),
    #[error("bad level: {0}")]
    BadLevel(String),
    #[error("internal error: leading coordinate does not vanish at stage {0}")]
    InternalNonzeroLead(usize),
    #[error("element is not in the kernel of reduction modulo p^{0}")]
    NotInKernel(u32),
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn underflow(msg: impl Into<String>) -> Self {
        Error::PrecisionUnderflow(msg.into())
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CompositePrime(_) => "CompositePrime",
            Error::ReduciblePolynomial(_) => "ReduciblePolynomial",
            Error::BadDegree(_) => "BadDegree",
            Error::BadPrecision(_) => "BadPrecision",
            Error::ContextMismatch => "ContextMismatch",
            Error::LevelMismatch(..) => "LevelMismatch",
            Error::NotAUnit => "NotAUnit",
            Error::NotDivisible(_) => "NotDivisible",
            Error::PrecisionUnderflow(_) => "PrecisionUnderflow",
            Error::HenselFailure => "HenselFailure",
            Error::OddPrimeRequired(_) => "OddPrimeRequired",
            Error::NotInGhostImage(_) => "NotInGhostImage",
            Error::BadLevel(_) => "BadLevel",
            Error::InternalNonzeroLead(_) => "InternalNonzeroLead",
            Error::NotInKernel(_) => "NotInKernel",
            Error::Malformed(_) => "Malformed",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
