use std::fmt;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, MilacError>;

/// Where a singular pivot or factor was encountered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingularSite {
    /// Pivot column of a Gauss elimination.
    Pivot { column: usize },
    /// Leading block `A` of a 2x2 block partition.
    BlockA,
    /// Trailing block `D` of a 2x2 block partition.
    BlockD,
    /// Schur-type factor `C A^-1 B - D`.
    SchurViaA,
    /// Schur-type factor `B D^-1 C - A`.
    SchurViaD,
    /// The network system matrix `P = Y/Y0 + I`.
    Network,
}

impl fmt::Display for SingularSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularSite::Pivot { column } => write!(f, "pivot column {column}"),
            SingularSite::BlockA => f.write_str("block A"),
            SingularSite::BlockD => f.write_str("block D"),
            SingularSite::SchurViaA => f.write_str("factor C A^-1 B - D"),
            SingularSite::SchurViaD => f.write_str("factor B D^-1 C - A"),
            SingularSite::Network => f.write_str("network has no unique operating point"),
        }
    }
}

#[derive(Debug, Error)]
pub enum MilacError {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    Dimension {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("singular matrix: {site}")]
    Singular { site: SingularSite },

    #[error("{what} is not Hermitian positive definite")]
    NotPositiveDefinite { what: &'static str },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("kalman step {step}: {source}")]
    KalmanStep {
        step: u8,
        #[source]
        source: Box<MilacError>,
    },

    #[error("time index {t}: {source}")]
    AtTime {
        t: usize,
        #[source]
        source: Box<MilacError>,
    },
}

impl MilacError {
    pub(crate) fn dim(op: &'static str, expected: impl fmt::Display, found: impl fmt::Display) -> Self {
        MilacError::Dimension {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn singular(site: SingularSite) -> Self {
        MilacError::Singular { site }
    }

    /// True when the error (or a wrapped cause) is a numerical singularity.
    pub fn is_singular(&self) -> bool {
        match self {
            MilacError::Singular { .. } => true,
            MilacError::KalmanStep { source, .. } | MilacError::AtTime { source, .. } => {
                source.is_singular()
            }
            _ => false,
        }
    }
}
