use thiserror::Error;

/// Errors raised by the core operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("direction must be a unit vector: |norm - 1| = {deviation:.3e} exceeds 1e-12")]
    NonUnitDirection { deviation: f64 },

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("density must be positive and finite, got {0}")]
    InvalidDensity(f64),

    #[error("stiffness entries must be finite")]
    NonFiniteStiffness,

    #[error("stiffness matrix is not symmetric at Voigt entry ({i}, {j})")]
    AsymmetricStiffness { i: usize, j: usize },

    #[error("Christoffel matrix is not of RTHC form (monoclinic or triclinic anisotropy)")]
    NotRthc,
}
