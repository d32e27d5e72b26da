//! The Christoffel tensor Γ(n), its traceless reduction Y(n), scalar
//! invariants, and the decomposition into wave modes.
//!
//! For a propagation direction n the tensor Γ = C·nn/ρ governs plane waves
//! through (v²I − Γ)U = 0. Removing the isotropic part, Γ = Y + γI with
//! γ = tr Γ/3, leaves a traceless Y whose shifted eigenvalues ρ = v² − γ obey
//! the depressed cubic ρ³ + Pρ + Q = 0.

use crate::error::Error;
use crate::media::{Material, UNIT_DIRECTION_TOL};
use crate::sym3::{sym_eigen, Sym3};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// A unit propagation direction (‖n‖ = 1 within 1e-12).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(Vector3<f64>);

impl Direction {
    /// Wraps a vector that is already unit length within 1e-12.
    pub fn new(v: Vector3<f64>) -> Result<Direction, Error> {
        let deviation = (v.norm() - 1.0).abs();
        if !(deviation <= UNIT_DIRECTION_TOL) {
            return Err(Error::NonUnitDirection { deviation });
        }
        Ok(Direction(v))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(v: Vector3<f64>) -> Result<Direction, Error> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ZeroDirection);
        }
        Ok(Direction(v / norm))
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    /// Projective representative: sign flipped so that the first component
    /// with magnitude above 1e-8 is positive.
    pub fn canonical(&self) -> Direction {
        Direction(canonical_sign(&self.0))
    }

    /// Angular distance on the projective sphere (minimum over ±). The
    /// atan2 form stays accurate for nearly parallel directions, where
    /// acos of the dot product loses half the digits.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let cross = self.0.cross(&other.0).norm();
        let dot = self.0.dot(&other.0).abs();
        cross.atan2(dot)
    }

    pub fn x() -> Direction {
        Direction(Vector3::x())
    }

    pub fn y() -> Direction {
        Direction(Vector3::y())
    }

    pub fn z() -> Direction {
        Direction(Vector3::z())
    }
}

/// Flips the sign of `v` so its first component with |x| > 1e-8 is positive.
pub fn canonical_sign(v: &Vector3<f64>) -> Vector3<f64> {
    for k in 0..3 {
        if v[k].abs() > 1e-8 {
            return if v[k] < 0.0 { -v } else { *v };
        }
    }
    *v
}

/// The Christoffel (acoustic) tensor Γ in m²/s².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticTensor(pub Sym3);

/// Traceless reduction Y = Γ − γI together with the removed scalar γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTensor {
    pub y: Sym3,
    pub gamma: f64,
}

impl ReducedTensor {
    /// Builds directly from a traceless matrix, for planted-tensor work where
    /// no Christoffel tensor exists.
    pub fn from_traceless(y: Sym3) -> ReducedTensor {
        ReducedTensor {
            y: y.deviatoric(),
            gamma: 0.0,
        }
    }

    /// Absolute scale below which Y counts as zero (the spherical case):
    /// 1e-10 · max(‖Γ‖_F, 1).
    pub fn spherical_tolerance(&self) -> f64 {
        let gamma_norm_sq = self.y.tr_sq() + 3.0 * self.gamma * self.gamma;
        1e-10 * gamma_norm_sq.sqrt().max(1.0)
    }

    pub fn is_spherical(&self) -> bool {
        self.y.norm() <= self.spherical_tolerance()
    }
}

/// Invariants of Y: depressed-cubic coefficients, traces, and the speed
/// parameter σ = −3 det Y / tr Y².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub p: f64,
    pub q: f64,
    pub tr_y2: f64,
    pub tr_y3: f64,
    pub det_y: f64,
    pub sigma: f64,
}

/// One plane-wave mode: squared speed, the speed when it propagates, and the
/// unit polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveMode {
    pub v_squared: f64,
    /// `None` marks a non-propagating mode (v² ≤ 0).
    pub speed: Option<f64>,
    pub polarization: Vector3<f64>,
}

impl WaveMode {
    pub fn from_v_squared(v_squared: f64, polarization: Vector3<f64>) -> WaveMode {
        WaveMode {
            v_squared,
            speed: (v_squared > 0.0).then(|| v_squared.sqrt()),
            polarization,
        }
    }
}

/// The three modes sorted by descending v², plus the shifted eigenvalues
/// ρᵢ = v²ᵢ − γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveModeSet {
    pub modes: [WaveMode; 3],
    pub shifted: [f64; 3],
    pub gamma: f64,
}

/// Γ(n) = C·nn / ρ.
pub fn gamma_of(material: &Material, n: &Direction) -> AcousticTensor {
    let rho_gamma = material.stiffness().contract_unchecked(n.as_vector());
    AcousticTensor(rho_gamma.scale(1.0 / material.density()))
}

/// Splits Γ into γ = tr Γ/3 and the traceless Y, removing the residual trace
/// a second time so tr Y vanishes at roundoff level.
pub fn reduce(gamma: &AcousticTensor) -> ReducedTensor {
    ReducedTensor {
        y: gamma.0.deviatoric(),
        gamma: gamma.0.trace() / 3.0,
    }
}

/// Invariants of the reduced tensor. σ falls back to 0 when Y is spherical.
pub fn invariants(yt: &ReducedTensor) -> InvariantSet {
    let tr_y2 = yt.y.tr_sq();
    let tr_y3 = yt.y.tr_cube();
    let det_y = yt.y.det();
    let eps = yt.spherical_tolerance();
    let sigma = if tr_y2 > eps * eps {
        -3.0 * det_y / tr_y2
    } else {
        0.0
    };
    InvariantSet {
        p: -tr_y2 / 2.0,
        q: -det_y,
        tr_y2,
        tr_y3,
        det_y,
        sigma,
    }
}

/// Eigen decomposition of Γ into wave modes via the trigonometric solution of
/// the depressed cubic on Y. Degenerate pairs return an orthonormal basis of
/// the eigenplane; v² ≤ 0 modes carry `speed: None`.
pub fn eigenmodes(gamma: &AcousticTensor) -> WaveModeSet {
    let g = gamma.0.trace() / 3.0;
    let eig = sym_eigen(&gamma.0);
    let modes = [
        WaveMode::from_v_squared(eig.values[0], eig.vectors[0]),
        WaveMode::from_v_squared(eig.values[1], eig.vectors[1]),
        WaveMode::from_v_squared(eig.values[2], eig.vectors[2]),
    ];
    WaveModeSet {
        modes,
        shifted: [
            eig.values[0] - g,
            eig.values[1] - g,
            eig.values[2] - g,
        ],
        gamma: g,
    }
}

/// Fedorov's special directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialDirections {
    pub pure_longitudinal: bool,
    pub pure_shear: bool,
}

/// A direction is pure longitudinal when some polarization is parallel to n
/// (|U·n| > 1 − tol) and pure shear when some polarization is orthogonal
/// (|U·n| < tol).
pub fn classify_special(material: &Material, n: &Direction, tol: f64) -> SpecialDirections {
    let set = eigenmodes(&gamma_of(material, n));
    let dots: Vec<f64> = set
        .modes
        .iter()
        .map(|m| m.polarization.dot(n.as_vector()).abs())
        .collect();
    SpecialDirections {
        pure_longitudinal: dots.iter().any(|&d| d > 1.0 - tol),
        pure_shear: dots.iter().any(|&d| d < tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::SymmetrySpec;

    fn iso_material(lambda: f64, mu: f64, rho: f64) -> Material {
        Material::from_spec(&SymmetrySpec::Isotropic { lambda, mu }, rho).unwrap()
    }

    fn cubic_material(c11: f64, c12: f64, c44: f64, rho: f64) -> Material {
        Material::from_spec(&SymmetrySpec::Cubic { c11, c12, c44 }, rho).unwrap()
    }

    #[test]
    fn gamma_isotropic_x() {
        let m = iso_material(1.0, 1.0, 1.0);
        let g = gamma_of(&m, &Direction::x());
        assert!((g.0.xx - 3.0).abs() < 1e-14);
        assert!((g.0.yy - 1.0).abs() < 1e-14);
        assert!((g.0.zz - 1.0).abs() < 1e-14);
        assert!(g.0.xy.abs() < 1e-14 && g.0.xz.abs() < 1e-14 && g.0.yz.abs() < 1e-14);
    }

    #[test]
    fn gamma_isotropic_formula() {
        // Γ = (μ I + (λ+μ) n⊗n)/ρ, evaluated independently
        let (lambda, mu, rho) = (1.0, 1.0, 1.0);
        let m = iso_material(lambda, mu, rho);
        let n = Direction::normalized(Vector3::new(1.0, 1.0, 1.0)).unwrap();
        let g = gamma_of(&m, &n);
        let expect =
            Sym3::outer(n.as_vector()).scale((lambda + mu) / rho) * 1.0 + Sym3::identity() * (mu / rho);
        assert!((g.0.to_matrix() - expect.to_matrix()).norm() < 1e-13);
    }

    #[test]
    fn gamma_cubic_bisector() {
        let m = cubic_material(3.0, 1.0, 1.0, 1.0);
        let n = Direction::normalized(Vector3::new(1.0, 1.0, 0.0)).unwrap();
        let g = gamma_of(&m, &n);
        assert!((g.0.xx - 2.0).abs() < 1e-14);
        assert!((g.0.yy - 2.0).abs() < 1e-14);
        assert!((g.0.zz - 1.0).abs() < 1e-14);
        assert!((g.0.xy - 1.0).abs() < 1e-14);
        assert!(g.0.xz.abs() < 1e-14 && g.0.yz.abs() < 1e-14);
    }

    #[test]
    fn reduce_examples() {
        let g = AcousticTensor(Sym3::from_diagonal(3.0, 1.0, 1.0));
        let yt = reduce(&g);
        assert!((yt.gamma - 5.0 / 3.0).abs() < 1e-15);
        assert!((yt.y.xx - 4.0 / 3.0).abs() < 1e-15);
        assert!((yt.y.yy + 2.0 / 3.0).abs() < 1e-15);
        assert!((yt.y.zz + 2.0 / 3.0).abs() < 1e-15);
        assert!(yt.y.trace().abs() < 1e-15);

        let zero = reduce(&AcousticTensor(Sym3::ZERO));
        assert_eq!(zero.gamma, 0.0);
        assert_eq!(zero.y.norm(), 0.0);

        let spherical = reduce(&AcousticTensor(Sym3::identity() * 7.5));
        assert!((spherical.gamma - 7.5).abs() < 1e-15);
        assert!(spherical.is_spherical());
    }

    #[test]
    fn invariant_examples() {
        // diag(1,1,-2): the diagonal axis form with sigma = 1
        let yt = ReducedTensor::from_traceless(Sym3::from_diagonal(1.0, 1.0, -2.0));
        let inv = invariants(&yt);
        assert!((inv.tr_y2 - 6.0).abs() < 1e-14);
        assert!((inv.det_y + 2.0).abs() < 1e-14);
        assert!((inv.sigma - 1.0).abs() < 1e-14);

        // isotropic reduced tensor at lambda = mu = rho = 1
        let yt = ReducedTensor::from_traceless(Sym3::from_diagonal(
            4.0 / 3.0,
            -2.0 / 3.0,
            -2.0 / 3.0,
        ));
        let inv = invariants(&yt);
        assert!((inv.sigma + 2.0 / 3.0).abs() < 1e-14);

        let zero = ReducedTensor::from_traceless(Sym3::ZERO);
        assert_eq!(invariants(&zero).sigma, 0.0);
    }

    #[test]
    fn invariant_consistency() {
        // Q = -det Y = -tr Y³/3 for traceless Y
        let yt = ReducedTensor::from_traceless(Sym3 {
            xx: 0.4,
            xy: -0.7,
            xz: 0.2,
            yy: -1.1,
            yz: 0.5,
            zz: 0.7,
        });
        let inv = invariants(&yt);
        assert!((inv.q + inv.tr_y3 / 3.0).abs() < 1e-10 * inv.q.abs().max(1e-30));
        assert!(inv.p <= 0.0);
    }

    #[test]
    fn eigenmodes_diagonal() {
        let set = eigenmodes(&AcousticTensor(Sym3::from_diagonal(3.0, 1.0, 1.0)));
        assert!((set.modes[0].v_squared - 3.0).abs() < 1e-12);
        assert!((set.modes[1].v_squared - 1.0).abs() < 1e-12);
        assert!((set.modes[2].v_squared - 1.0).abs() < 1e-12);
        assert!(set.modes[0].polarization.x.abs() > 1.0 - 1e-10);
        let sum: f64 = set.shifted.iter().sum();
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn eigenmodes_isotropic_longitudinal() {
        let m = iso_material(1.0, 1.0, 1.0);
        for raw in [
            Vector3::new(0.3, -0.9, 0.9),
            Vector3::new(1.0, 0.2, 0.1),
            Vector3::new(0.0, 1.0, 4.0),
        ] {
            let n = Direction::normalized(raw).unwrap();
            let set = eigenmodes(&gamma_of(&m, &n));
            assert!((set.modes[0].v_squared - 3.0).abs() < 1e-12);
            assert!((set.modes[1].v_squared - 1.0).abs() < 1e-12);
            assert!((set.modes[2].v_squared - 1.0).abs() < 1e-12);
            // the fast wave is longitudinal
            assert!(set.modes[0].polarization.dot(n.as_vector()).abs() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn eigenmodes_cubic_diagonal_direction() {
        let m = cubic_material(3.0, 1.0, 1.0, 1.0);
        let n = Direction::normalized(Vector3::new(1.0, 1.0, 1.0)).unwrap();
        let set = eigenmodes(&gamma_of(&m, &n));
        // gamma = 5/3, sigma = -2/3: v² = {gamma - 2 sigma, gamma + sigma, gamma + sigma}
        assert!((set.modes[0].v_squared - 3.0).abs() < 1e-12);
        assert!((set.modes[1].v_squared - 1.0).abs() < 1e-12);
        assert!((set.modes[2].v_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_propagating_mode_flagged() {
        let set = eigenmodes(&AcousticTensor(Sym3::from_diagonal(2.0, 1.0, -0.5)));
        assert!(set.modes[2].speed.is_none());
        assert!(set.modes[0].speed.is_some());
    }

    #[test]
    fn classify_special_examples() {
        let m = iso_material(1.0, 1.0, 1.0);
        let n = Direction::normalized(Vector3::new(0.2, -0.5, 0.7)).unwrap();
        let s = classify_special(&m, &n, 1e-8);
        assert!(s.pure_longitudinal && s.pure_shear);

        let m = cubic_material(3.0, 1.0, 1.0, 1.0);
        let s = classify_special(&m, &Direction::x(), 1e-8);
        assert!(s.pure_longitudinal && s.pure_shear);
    }

    #[test]
    fn canonical_direction() {
        let d = Direction::normalized(Vector3::new(-1.0, 2.0, 0.5)).unwrap();
        let c = d.canonical();
        assert!(c.as_vector().x > 0.0);
        assert!(d.angle_to(&c) < 1e-15);

        let d = Direction::normalized(Vector3::new(0.0, -1.0, 0.0)).unwrap();
        assert!(d.canonical().as_vector().y > 0.0);
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(Vector3::new(1.0, 1.0, 0.0)).is_err());
        assert!(Direction::normalized(Vector3::zeros()).is_err());
        assert!(Direction::new(Vector3::x()).is_ok());
    }
}
