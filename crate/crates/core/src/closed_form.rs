//! Closed-form acoustic-axis solvers: isotropic media (every direction),
//! cubic crystals (coordinate axes plus body diagonals), and the full RTHC
//! machinery for orthorhombic-and-higher symmetry.

use crate::christoffel::Direction;
use crate::criteria::{axis_test, axis_test_gamma, AxisKind, AxisVerdict, SpeedValue};
use crate::error::Error;
use crate::media::{expand_symmetry, Material, SymmetrySpec};
use crate::sym3::Sym3;
use crate::{christoffel::AcousticTensor, scan};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Angular separation below which two directions count as the same axis.
pub const DEDUP_ANGLE: f64 = 1e-6;

/// An axis direction together with its verified verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoundAxis {
    pub direction: Direction,
    pub verdict: AxisVerdict,
}

/// Axis family covering the whole sphere (isotropic-form media).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereAxes {
    pub sigma: f64,
    pub gamma: f64,
    pub axis_kind: AxisKind,
    pub v_double: SpeedValue,
    pub v_single: SpeedValue,
}

/// Cone of axes `k_perp (n1² + n2²) + k_3 n3² = 0` about the x3 axis, plus
/// any discrete axes lying off the cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicAxes {
    pub k_perp: f64,
    pub k_3: f64,
    pub axes: Vec<FoundAxis>,
}

impl ConicAxes {
    /// Cone half-angle from the x3 axis, when the coefficients have mixed
    /// signs: tan²θ = −k_3/k_perp.
    pub fn half_angle(&self) -> Option<f64> {
        if self.k_perp == 0.0 {
            return Some(std::f64::consts::FRAC_PI_2);
        }
        let t2 = -self.k_3 / self.k_perp;
        (t2 >= 0.0).then(|| t2.sqrt().atan())
    }

    /// Angular distance from a direction to the cone.
    pub fn angular_distance(&self, n: &Direction) -> f64 {
        match self.half_angle() {
            Some(theta_c) => {
                let theta = n.as_vector().z.abs().clamp(0.0, 1.0).acos();
                (theta - theta_c).abs()
            }
            None => f64::INFINITY,
        }
    }
}

/// An axis set: finitely many directions, the whole sphere, a cone, or none.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisSolution {
    Discrete(Vec<FoundAxis>),
    AllSphere(SphereAxes),
    Conic(ConicAxes),
    None,
}

impl AxisSolution {
    pub fn discrete_axes(&self) -> &[FoundAxis] {
        match self {
            AxisSolution::Discrete(axes) => axes,
            AxisSolution::Conic(c) => &c.axes,
            _ => &[],
        }
    }
}

/// Which closed-form family produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Isotropic,
    Cubic,
    Rthc,
    Scan,
}

/// Solution plus the solver that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: AxisSolution,
    pub solver: SolverKind,
}

// ---------------------------------------------------------------------------
// Isotropic and cubic solvers
// ---------------------------------------------------------------------------

/// Isotropic media: every direction is an acoustic axis, with q = n,
/// σ = −(λ+μ)/(3ρ), v² = μ/ρ (double) and (λ+2μ)/ρ (single).
pub fn solve_isotropic(lambda: f64, mu: f64, rho: f64) -> AxisSolution {
    let sigma = -(lambda + mu) / (3.0 * rho);
    let gamma = (lambda + 4.0 * mu) / (3.0 * rho);
    let scale = lambda.abs().max(mu.abs()).max(1e-300);
    let axis_kind = if (lambda + mu).abs() <= 1e-14 * scale {
        AxisKind::Spherical
    } else if sigma < 0.0 {
        AxisKind::Prolate
    } else {
        AxisKind::Oblate
    };
    let sigma = if axis_kind == AxisKind::Spherical {
        0.0
    } else {
        sigma
    };
    AxisSolution::AllSphere(SphereAxes {
        sigma,
        gamma,
        axis_kind,
        v_double: SpeedValue::from_v_squared(gamma + sigma),
        v_single: SpeedValue::from_v_squared(gamma - 2.0 * sigma),
    })
}

/// Cubic crystals with C11 ≠ C44: the three coordinate axes
/// (σ = (C44−C11)/3ρ) and the four body diagonals (σ = −(C12+C44)/3ρ),
/// each re-verified. With C11 = C12 + 2C44 the constants are isotropic and
/// the full axis set is the whole sphere; this function still reports the
/// seven symmetry-pinned members — `solve` dispatches that case to the
/// isotropic solver. With C11 = C44 the diagonal form of Y degenerates and
/// the RTHC machinery takes over.
pub fn solve_cubic(c11: f64, c12: f64, c44: f64, rho: f64) -> AxisSolution {
    let scale = c11.abs().max(c12.abs()).max(c44.abs()).max(1e-300);
    let material = match Material::from_spec(&SymmetrySpec::Cubic { c11, c12, c44 }, rho) {
        Ok(m) => m,
        Err(_) => return AxisSolution::None,
    };
    if (c11 - c44).abs() <= 1e-12 * scale {
        let coeffs = match rthc_coefficients(&material) {
            Ok(c) => c,
            Err(_) => return AxisSolution::None,
        };
        return solve_rthc(&material, &coeffs, crate::criteria::DEFAULT_TOL);
    }
    let tol = crate::criteria::DEFAULT_TOL;
    let diag = 1.0 / 3.0f64.sqrt();
    let candidates = [
        Vector3::x(),
        Vector3::y(),
        Vector3::z(),
        Vector3::new(diag, diag, diag),
        Vector3::new(-diag, diag, diag),
        Vector3::new(diag, -diag, diag),
        Vector3::new(diag, diag, -diag),
    ];
    let mut axes = Vec::new();
    for v in candidates {
        let n = Direction::new(v).unwrap().canonical();
        let verdict = axis_test(&material, &n, tol);
        if verdict.kind.is_axis() {
            axes.push(FoundAxis {
                direction: n,
                verdict,
            });
        }
    }
    sort_axes(&mut axes);
    if axes.is_empty() {
        AxisSolution::None
    } else {
        AxisSolution::Discrete(axes)
    }
}

// ---------------------------------------------------------------------------
// RTHC coefficients
// ---------------------------------------------------------------------------

/// Coefficients of the RTHC Christoffel form, in stress units (Pa):
/// ρΓᵢᵢ = Σⱼ aᵢⱼ nⱼ² on the diagonal, ρΓᵢⱼ = rᵢⱼ nᵢ nⱼ off it, and
/// bᵢⱼ = (2aᵢⱼ − a₍ᵢ₊₁₎ⱼ − a₍ᵢ₊₂₎ⱼ)/3 parameterizing the traceless part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RTHCCoefficients {
    pub a: [[f64; 3]; 3],
    /// (r12, r13, r23)
    pub r: [f64; 3],
    pub b: [[f64; 3]; 3],
}

fn r_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => panic!("off-diagonal pair expected, got ({i}, {j})"),
    }
}

impl RTHCCoefficients {
    pub fn max_abs(&self) -> f64 {
        let a = self.a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        self.r.iter().fold(a, |m, v| m.max(v.abs()))
    }

    /// Christoffel tensor of the parameterized form at direction n.
    pub fn christoffel(&self, rho: f64, n: &Direction) -> AcousticTensor {
        let v = n.as_vector();
        let sq = [v.x * v.x, v.y * v.y, v.z * v.z];
        let diag = |i: usize| (0..3).map(|j| self.a[i][j] * sq[j]).sum::<f64>();
        AcousticTensor(
            Sym3 {
                xx: diag(0),
                yy: diag(1),
                zz: diag(2),
                xy: self.r[0] * v.x * v.y,
                xz: self.r[1] * v.x * v.z,
                yz: self.r[2] * v.y * v.z,
            }
            .scale(1.0 / rho),
        )
    }
}

/// Extracts the RTHC coefficients numerically: aᵢⱼ from ρΓ at the basis
/// directions, rᵢⱼ from ρΓ at the bisectors, then validates the form against
/// ρΓ at 50 quasi-uniform directions. Rejects monoclinic/triclinic input.
pub fn rthc_coefficients(material: &Material) -> Result<RTHCCoefficients, Error> {
    let c = material.stiffness();
    let basis = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut a = [[0.0f64; 3]; 3];
    for (j, e) in basis.iter().enumerate() {
        let m = c.contract_unchecked(e);
        for i in 0..3 {
            a[i][j] = m.get(i, i);
        }
    }
    let mut r = [0.0f64; 3];
    for (slot, (i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
        let n = (basis[*i] + basis[*j]) / 2.0f64.sqrt();
        r[slot] = 2.0 * c.contract_unchecked(&n).get(*i, *j);
    }
    let mut b = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (2.0 * a[i][j] - a[(i + 1) % 3][j] - a[(i + 2) % 3][j]) / 3.0;
        }
    }
    let coeffs = RTHCCoefficients { a, r, b };

    // form validation over a deterministic quasi-uniform point set
    let rho = material.density();
    for n in scan::fibonacci_hemisphere(50) {
        let truth = c.contract_unchecked(n.as_vector());
        let form = coeffs.christoffel(rho, &n).0.scale(rho);
        let scale = truth.norm().max(1e-12 * coeffs.max_abs()).max(1e-300);
        if (truth - form).norm() > 1e-10 * scale {
            return Err(Error::NotRthc);
        }
    }
    Ok(coeffs)
}

// ---------------------------------------------------------------------------
// RTHC axis families
// ---------------------------------------------------------------------------

/// Coordinate-axis acoustic axes: n = eᵢ is an axis exactly when two entries
/// of the i-th column of b coincide; every hit is re-verified.
pub fn rthc_coordinate_axes(coeffs: &RTHCCoefficients, rho: f64, tol: f64) -> Vec<FoundAxis> {
    let scale = coeffs.max_abs().max(1e-300);
    let mut axes = Vec::new();
    for i in 0..3 {
        let d = [coeffs.b[0][i], coeffs.b[1][i], coeffs.b[2][i]];
        let condition = (0..3).any(|j| {
            let (k, l) = ((j + 1) % 3, (j + 2) % 3);
            (d[k] - d[l]).abs() <= tol * scale
        });
        if !condition {
            continue;
        }
        let n = [Direction::x(), Direction::y(), Direction::z()][i];
        let verdict = axis_test_gamma(&coeffs.christoffel(rho, &n), tol);
        if verdict.kind.is_axis() {
            axes.push(FoundAxis {
                direction: n,
                verdict,
            });
        }
    }
    axes
}

/// Coordinate plane selector for the in-plane solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

impl Plane {
    pub const ALL: [Plane; 3] = [Plane::Xy, Plane::Xz, Plane::Yz];

    /// (in-plane i, in-plane j, out-of-plane k)
    fn indices(self) -> (usize, usize, usize) {
        match self {
            Plane::Xy => (0, 1, 2),
            Plane::Xz => (0, 2, 1),
            Plane::Yz => (1, 2, 0),
        }
    }
}

/// In-plane axes of one coordinate plane.
#[derive(Debug, Clone, PartialEq)]
pub struct InPlaneAxes {
    pub axes: Vec<FoundAxis>,
    /// Set when the quadratic vanishes identically (every in-plane direction
    /// is a candidate) and the result needs scan confirmation.
    pub continuum: bool,
}

/// Acoustic axes lying in a coordinate plane off the coordinate axes, from
/// the quadratic in t = (nᵢ/nⱼ)². Roots at t = 0 or t = ∞ belong to the
/// coordinate-axis family and are skipped; every candidate is re-verified.
pub fn rthc_inplane_axes(
    coeffs: &RTHCCoefficients,
    rho: f64,
    plane: Plane,
    tol: f64,
) -> InPlaneAxes {
    let (i, j, k) = plane.indices();
    let a = &coeffs.a;
    let r_ij = coeffs.r[r_slot(i, j)];
    let qa = (a[i][i] - a[k][i]) * (a[j][i] - a[k][i]);
    let qc = (a[i][j] - a[k][j]) * (a[j][j] - a[k][j]);
    let qb = (a[i][i] - a[k][i]) * (a[j][j] - a[k][j]) + (a[i][j] - a[k][j]) * (a[j][i] - a[k][i])
        - r_ij * r_ij;

    let scale = coeffs.max_abs().powi(2).max(1e-300);
    let mag = qa.abs().max(qb.abs()).max(qc.abs());
    if mag <= 1e-14 * scale {
        return InPlaneAxes {
            axes: Vec::new(),
            continuum: true,
        };
    }

    let mut roots = Vec::new();
    if qa.abs() <= 1e-14 * mag {
        if qb.abs() > 1e-14 * mag {
            roots.push(-qc / qb);
        }
        // qa = qb = 0 with qc != 0 has no solution
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let base = -0.5 * (qb + qb.signum() * sq);
            if base != 0.0 {
                roots.push(base / qa);
                roots.push(qc / base);
            } else {
                roots.push(0.0);
            }
        }
    }

    let mut axes = Vec::new();
    for t in roots {
        if !(t.is_finite() && t > 1e-12) {
            continue;
        }
        let ni = (t / (1.0 + t)).sqrt();
        let nj = (1.0 / (1.0 + t)).sqrt();
        for sign in [1.0, -1.0] {
            let mut v = Vector3::zeros();
            v[i] = sign * ni;
            v[j] = nj;
            v[k] = 0.0;
            let n = Direction::normalized(v).unwrap().canonical();
            let verdict = axis_test_gamma(&coeffs.christoffel(rho, &n), tol);
            if verdict.kind.is_axis() {
                axes.push(FoundAxis {
                    direction: n,
                    verdict,
                });
            }
        }
    }
    dedupe_axes(&mut axes);
    InPlaneAxes {
        axes,
        continuum: false,
    }
}

pub(crate) enum ObliqueOutcome {
    Axes(Vec<FoundAxis>),
    Conic { k_perp: f64, k_3: f64 },
    AllSphere(SphereAxes),
    /// Degenerate constraint the closed form cannot express; confirm by scan.
    NeedsScan,
}

pub(crate) fn oblique_outcome(coeffs: &RTHCCoefficients, rho: f64, tol: f64) -> ObliqueOutcome {
    let scale = coeffs.max_abs().max(1e-300);
    let [r12, r13, r23] = coeffs.r;
    if r12.abs().min(r13.abs()).min(r23.abs()) <= 1e-12 * scale {
        // some off-diagonal monomial vanishes; any such axis lies on a
        // coordinate plane and belongs to the earlier families
        return ObliqueOutcome::Axes(Vec::new());
    }
    let alpha = [r12 * r13 / r23, r12 * r23 / r13, r13 * r23 / r12];
    let b = &coeffs.b;
    let u = Vector3::new(
        b[0][0] - 2.0 * alpha[0] / 3.0,
        b[0][1] + alpha[1] / 3.0,
        b[0][2] + alpha[2] / 3.0,
    );
    let w = Vector3::new(
        b[1][0] + alpha[0] / 3.0,
        b[1][1] - 2.0 * alpha[1] / 3.0,
        b[1][2] + alpha[2] / 3.0,
    );

    let alpha_scale = alpha.iter().fold(scale, |m, v| m.max(v.abs()));
    if u.norm().max(w.norm()) <= 1e-12 * alpha_scale {
        // diagonal constraints hold for every direction
        let spread = (alpha[0] - alpha[1])
            .abs()
            .max((alpha[0] - alpha[2]).abs());
        if spread <= 1e-10 * alpha_scale {
            let sigma = -alpha[0] / (3.0 * rho);
            let gamma = (coeffs.a[0][0] + coeffs.a[1][0] + coeffs.a[2][0]) / (3.0 * rho);
            return ObliqueOutcome::AllSphere(SphereAxes {
                sigma,
                gamma,
                axis_kind: if sigma < 0.0 {
                    AxisKind::Prolate
                } else if sigma > 0.0 {
                    AxisKind::Oblate
                } else {
                    AxisKind::Spherical
                },
                v_double: SpeedValue::from_v_squared(gamma + sigma),
                v_single: SpeedValue::from_v_squared(gamma - 2.0 * sigma),
            });
        }
        return ObliqueOutcome::NeedsScan;
    }

    let cross = u.cross(&w);
    let parallel = cross.norm() <= 1e-10 * u.norm().max(w.norm()).powi(2);
    if parallel {
        let v = if u.norm() >= w.norm() { u } else { w };
        if (v.x - v.y).abs() <= 1e-10 * v.norm() {
            // axisymmetric about x3: the constraint is a cone
            let (k_perp, k_3) = (3.0 * v.x, 3.0 * v.z);
            if k_perp * k_3 < 0.0 || (k_perp == 0.0) != (k_3 == 0.0) {
                if k_3 == 0.0 {
                    // cone collapses onto the pole; covered by n = e3
                    return ObliqueOutcome::Axes(Vec::new());
                }
                return ObliqueOutcome::Conic { k_perp, k_3 };
            }
            // all coefficients of one sign: no oblique axes at all
            return ObliqueOutcome::Axes(Vec::new());
        }
        return ObliqueOutcome::NeedsScan;
    }

    // generic case: (n1², n2², n3²) is proportional to u × w
    let sum = cross.x + cross.y + cross.z;
    if sum.abs() <= 1e-12 * cross.norm() {
        return ObliqueOutcome::Axes(Vec::new());
    }
    let mut sq = [cross.x / sum, cross.y / sum, cross.z / sum];
    for s in &mut sq {
        if *s < 0.0 {
            if *s < -1e-12 {
                return ObliqueOutcome::Axes(Vec::new());
            }
            *s = 0.0;
        }
    }

    // q² components are sign-independent
    let denom: f64 = (0..3).map(|m| alpha[m] * sq[m]).sum();
    if denom.abs() <= 1e-300 {
        return ObliqueOutcome::Axes(Vec::new());
    }
    let q_sq = [
        alpha[0] * sq[0] / denom,
        alpha[1] * sq[1] / denom,
        alpha[2] * sq[2] / denom,
    ];
    if q_sq.iter().any(|&v| v < -1e-10) {
        return ObliqueOutcome::Axes(Vec::new());
    }
    let sigma_pa = -denom / 3.0;

    let base = [sq[0].sqrt(), sq[1].sqrt(), sq[2].sqrt()];
    let mut axes = Vec::new();
    for (s2, s3) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let v = Vector3::new(base[0], s2 * base[1], s3 * base[2]);
        if v.norm() == 0.0 {
            continue;
        }
        let n = match Direction::normalized(v) {
            Ok(n) => n.canonical(),
            Err(_) => continue,
        };
        if !oblique_signs_consistent(&coeffs.r, n.as_vector(), sigma_pa) {
            continue;
        }
        let verdict = axis_test_gamma(&coeffs.christoffel(rho, &n), tol);
        if verdict.kind.is_axis() {
            axes.push(FoundAxis {
                direction: n,
                verdict,
            });
        }
    }
    dedupe_axes(&mut axes);
    ObliqueOutcome::Axes(axes)
}

/// Checks the overdetermined sign system r_ij n_i n_j = −3σ q_i q_j. The
/// magnitudes agree by construction (α_i α_j = r_ij²), so the candidate
/// survives exactly when the three required signs of q_i q_j multiply to +1;
/// with a vanishing component fewer than three relations are active and the
/// signs can always be chosen.
fn oblique_signs_consistent(r: &[f64; 3], n: &Vector3<f64>, sigma_pa: f64) -> bool {
    if sigma_pa == 0.0 {
        return false;
    }
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut product = 1.0f64;
    let mut active = 0;
    for (slot, (i, j)) in pairs.iter().enumerate() {
        let required = r[slot] * n[*i] * n[*j] / (-3.0 * sigma_pa);
        if required != 0.0 {
            product *= required.signum();
            active += 1;
        }
    }
    active < 3 || product > 0.0
}

/// Oblique axes of an RTHC material (all three components of n nonzero):
/// at most four directions from the cross-product solution, a cone for
/// transversely isotropic input, the whole sphere for isotropic-form input,
/// or none.
pub fn rthc_oblique_axes(coeffs: &RTHCCoefficients, rho: f64, tol: f64) -> AxisSolution {
    match oblique_outcome(coeffs, rho, tol) {
        ObliqueOutcome::Axes(axes) if axes.is_empty() => AxisSolution::None,
        ObliqueOutcome::Axes(mut axes) => {
            sort_axes(&mut axes);
            AxisSolution::Discrete(axes)
        }
        ObliqueOutcome::Conic { k_perp, k_3 } => AxisSolution::Conic(ConicAxes {
            k_perp,
            k_3,
            axes: Vec::new(),
        }),
        ObliqueOutcome::AllSphere(s) => AxisSolution::AllSphere(s),
        ObliqueOutcome::NeedsScan => AxisSolution::None,
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn detect_isotropic(material: &Material) -> Option<(f64, f64)> {
    let c = material.stiffness();
    let lambda = c.get(0, 1);
    let mu = c.get(3, 3);
    let expect = expand_symmetry(&SymmetrySpec::Isotropic { lambda, mu });
    let scale = c.max_abs().max(1.0);
    for i in 0..6 {
        for j in 0..6 {
            if (c.get(i, j) - expect.get(i, j)).abs() > 1e-10 * scale {
                return Option::None;
            }
        }
    }
    Some((lambda, mu))
}

fn detect_cubic(material: &Material) -> Option<(f64, f64, f64)> {
    let c = material.stiffness();
    let (c11, c12, c44) = (c.get(0, 0), c.get(0, 1), c.get(3, 3));
    let expect = expand_symmetry(&SymmetrySpec::Cubic { c11, c12, c44 });
    let scale = c.max_abs().max(1.0);
    for i in 0..6 {
        for j in 0..6 {
            if (c.get(i, j) - expect.get(i, j)).abs() > 1e-10 * scale {
                return Option::None;
            }
        }
    }
    Some((c11, c12, c44))
}

/// Union of the RTHC families, deduplicated and re-verified against the
/// material itself.
fn solve_rthc(material: &Material, coeffs: &RTHCCoefficients, tol: f64) -> AxisSolution {
    let rho = material.density();
    let mut axes = rthc_coordinate_axes(coeffs, rho, tol);
    let mut needs_scan = false;
    for plane in Plane::ALL {
        let found = rthc_inplane_axes(coeffs, rho, plane, tol);
        needs_scan |= found.continuum;
        axes.extend(found.axes);
    }
    let oblique = oblique_outcome(coeffs, rho, tol);
    match oblique {
        ObliqueOutcome::AllSphere(s) => return AxisSolution::AllSphere(s),
        ObliqueOutcome::Conic { k_perp, k_3 } => {
            let cone = ConicAxes {
                k_perp,
                k_3,
                axes: Vec::new(),
            };
            let mut extras: Vec<FoundAxis> = axes
                .into_iter()
                .filter(|ax| cone.angular_distance(&ax.direction) > DEDUP_ANGLE)
                .collect();
            dedupe_axes(&mut extras);
            let extras = reverify(material, extras, tol);
            return AxisSolution::Conic(ConicAxes {
                k_perp,
                k_3,
                axes: extras,
            });
        }
        ObliqueOutcome::Axes(obl) => axes.extend(obl),
        ObliqueOutcome::NeedsScan => needs_scan = true,
    }
    if needs_scan {
        return scan_solve(material, tol);
    }
    dedupe_axes(&mut axes);
    let axes = reverify(material, axes, tol);
    if axes.is_empty() {
        AxisSolution::None
    } else {
        AxisSolution::Discrete(axes)
    }
}

/// Re-runs the verdict against the true material tensor (the coefficient
/// form agrees to 1e-10, but reports should quote the material itself).
fn reverify(material: &Material, axes: Vec<FoundAxis>, tol: f64) -> Vec<FoundAxis> {
    let mut out: Vec<FoundAxis> = axes
        .into_iter()
        .filter_map(|ax| {
            let verdict = axis_test(material, &ax.direction, tol);
            verdict.kind.is_axis().then(|| FoundAxis {
                direction: ax.direction,
                verdict,
            })
        })
        .collect();
    sort_axes(&mut out);
    out
}

/// Numerical fallback: hemisphere scan plus refinement.
fn scan_solve(material: &Material, tol: f64) -> AxisSolution {
    let findings = scan::find_axes(material, scan::DEFAULT_SCAN_POINTS, tol);
    if findings.continuum {
        // sample one direction for the family parameters
        let n = Direction::z();
        let verdict = axis_test(material, &n, tol);
        return AxisSolution::AllSphere(SphereAxes {
            sigma: verdict.sigma,
            gamma: verdict.gamma,
            axis_kind: verdict.kind,
            v_double: verdict.v_double,
            v_single: verdict.v_single,
        });
    }
    let mut axes = findings.axes;
    sort_axes(&mut axes);
    if axes.is_empty() {
        AxisSolution::None
    } else {
        AxisSolution::Discrete(axes)
    }
}

/// Computes the full axis set, dispatching to the most specific closed form
/// and falling back to the spherical scan for monoclinic/triclinic input.
pub fn solve(material: &Material) -> SolveOutcome {
    solve_with_tol(material, crate::criteria::DEFAULT_TOL)
}

pub fn solve_with_tol(material: &Material, tol: f64) -> SolveOutcome {
    if let Some((lambda, mu)) = detect_isotropic(material) {
        return SolveOutcome {
            solution: solve_isotropic(lambda, mu, material.density()),
            solver: SolverKind::Isotropic,
        };
    }
    if let Some((c11, c12, c44)) = detect_cubic(material) {
        return SolveOutcome {
            solution: solve_cubic(c11, c12, c44, material.density()),
            solver: SolverKind::Cubic,
        };
    }
    match rthc_coefficients(material) {
        Ok(coeffs) => SolveOutcome {
            solution: solve_rthc(material, &coeffs, tol),
            solver: SolverKind::Rthc,
        },
        Err(_) => SolveOutcome {
            solution: scan_solve(material, tol),
            solver: SolverKind::Scan,
        },
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// Removes entries within [`DEDUP_ANGLE`] of an earlier entry, keeping the
/// one with the smaller minimal-polynomial residual.
pub(crate) fn dedupe_axes(axes: &mut Vec<FoundAxis>) {
    let mut kept: Vec<FoundAxis> = Vec::with_capacity(axes.len());
    for ax in axes.drain(..) {
        if let Some(existing) = kept
            .iter_mut()
            .find(|k| k.direction.angle_to(&ax.direction) < DEDUP_ANGLE)
        {
            if ax.verdict.residuals.minimal_poly < existing.verdict.residuals.minimal_poly {
                *existing = ax;
            }
        } else {
            kept.push(ax);
        }
    }
    *axes = kept;
}

/// Sorts by (kind, lexicographic canonical direction).
pub(crate) fn sort_axes(axes: &mut [FoundAxis]) {
    axes.sort_by(|x, y| {
        x.verdict
            .kind
            .cmp(&y.verdict.kind)
            .then_with(|| {
                let a = x.direction.as_vector();
                let b = y.direction.as_vector();
                a.x.total_cmp(&b.x)
                    .then(a.y.total_cmp(&b.y))
                    .then(a.z.total_cmp(&b.z))
            })
    });
}
