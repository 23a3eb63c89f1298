use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate direction: the origin has no spherical basis")]
    DegenerateDirection,
    #[error("singularity: observation point is {distance:e} m from segment {segment} of antenna {antenna}")]
    Singularity {
        antenna: usize,
        segment: usize,
        distance: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field frames differ")]
    FrameMismatch,
    #[error("media differ between antennas {0} and {1}")]
    MediumMismatch(usize, usize),
    #[error("duplicate segment centroid at antenna {antenna}, segment {segment}")]
    DuplicateCentroid { antenna: usize, segment: usize },
    #[error("isolated manifold requires uncoupled moments")]
    CoupledModel,
    #[error("undefined relative error: reference field is zero")]
    ZeroReference,
    #[error("no radiating mode: manifold is zero")]
    NoRadiatingMode,
    #[error("polarization in null space of the manifold")]
    PolarizationInNullSpace,
    #[error("PD matrix is zero")]
    ZeroPdMatrix,
    #[error("PD constraint does not bound the objective (weights in null space of X)")]
    UnboundedPdConstraint,
    #[error("reference dipole field is zero at the evaluation point")]
    ReferenceNull,
}
