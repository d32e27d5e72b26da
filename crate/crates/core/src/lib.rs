//! Acoustic axes of anisotropic elastic media.
//!
//! An acoustic axis is a propagation direction along which at least two of
//! the three elastic plane-wave speeds coincide. This crate builds the
//! Christoffel tensor from a stiffness matrix, evaluates every classical
//! degeneracy criterion as a scale-invariant residual, solves the
//! high-symmetry classes (isotropic, cubic, and the RTHC family) in closed
//! form, and cross-checks arbitrary anisotropy with a spherical scan.

pub mod christoffel;
pub mod closed_form;
pub mod criteria;
mod error;
pub mod media;
pub mod scan;
pub mod sym3;

pub use christoffel::{
    classify_special, eigenmodes, gamma_of, invariants, reduce, AcousticTensor, Direction,
    InvariantSet, ReducedTensor, SpecialDirections, WaveMode, WaveModeSet,
};
pub use closed_form::{
    rthc_coefficients, rthc_coordinate_axes, rthc_inplane_axes, rthc_oblique_axes, solve,
    solve_cubic, solve_isotropic, solve_with_tol, AxisSolution, ConicAxes, FoundAxis, Plane,
    RTHCCoefficients, SolveOutcome, SolverKind, SphereAxes,
};
pub use criteria::{
    adjoint_residual, alshits_lothe, alshits_lothe_residual, axis_test, axis_test_gamma,
    discriminant_residual, khatkevich, khatkevich_state, minimal_poly_residual, norris,
    norris_residual, planted_axis_tensor, polarization_residual, AxisKind, AxisVerdict,
    CriteriaResiduals, KhatkevichState, NorrisTensor, SpeedValue, DEFAULT_TOL,
};
pub use error::Error;
pub use media::{
    born_stability_cubic, expand_symmetry, material_from_json, material_from_json_str,
    material_to_json, speed_bound_check, Material, MaterialFileError, StiffnessVoigt,
    SymmetrySpec, Units,
};
pub use scan::{
    compare, find_axes, refine, scan as scan_sphere, DegeneracyMap, MatchReport, RefinedCandidate,
    ScanFindings, ScanPoint,
};
pub use sym3::Sym3;
