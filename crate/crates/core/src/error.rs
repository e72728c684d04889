use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Variants split into two families: domain rejections (the caller asked for
/// something outside the construction's hypotheses) and internal
/// inconsistencies (two independent computations disagreed). The CLI maps
/// the first family to exit code 2 and the second to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u32),
    #[error("n must be even (got {0})")]
    NOdd(u32),
    #[error("n must not be divisible by 3 (got {0})")]
    DivisibleByThree(u32),
    #[error("n must be at least {min} (got {n})")]
    NTooSmall { n: u32, min: u32 },
    #[error("twist not invertible mod {n}: determinant {det} is not a unit")]
    TwistNotInvertible { n: u32, det: u32 },
    #[error("invalid monodromy data: {0}")]
    InvalidMonodromy(String),
    #[error("closed form requires n >= 4 (got {0})")]
    ClosedFormRequiresN4(u32),
    #[error("eigenspace is zero; no eigenform for character ({0}, {1})")]
    NoEigenform(u32, u32),
    #[error("non-nodal singularity: construction assumptions violated ({0})")]
    NonNodal(String),
    #[error("sections not available; conditions (1)/(3) failed")]
    SectionsUnavailable,
    #[error("Künneth cross term nonzero: rigidity propagation not covered by the product lemma hypothesis ({0} x {1})")]
    CrossTermNonzero(String, String),
    #[error("cannot parse {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    /// True for errors caused by out-of-domain input rather than a failed
    /// cross-check.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Inconsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
