//! Symmetric 3x3 matrices stored as the upper triangle, with the closed-form
//! trigonometric eigensolver used throughout the crate.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// Symmetric 3x3 matrix; only the upper triangle is stored, so symmetry is
/// exact by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym3 {
    pub xx: f64,
    pub xy: f64,
    pub xz: f64,
    pub yy: f64,
    pub yz: f64,
    pub zz: f64,
}

impl Sym3 {
    pub const ZERO: Sym3 = Sym3 {
        xx: 0.0,
        xy: 0.0,
        xz: 0.0,
        yy: 0.0,
        yz: 0.0,
        zz: 0.0,
    };

    pub fn identity() -> Sym3 {
        Sym3::from_diagonal(1.0, 1.0, 1.0)
    }

    pub fn from_diagonal(xx: f64, yy: f64, zz: f64) -> Sym3 {
        Sym3 {
            xx,
            xy: 0.0,
            xz: 0.0,
            yy,
            yz: 0.0,
            zz,
        }
    }

    /// Rank-one matrix `v ⊗ v`.
    pub fn outer(v: &Vector3<f64>) -> Sym3 {
        Sym3 {
            xx: v.x * v.x,
            xy: v.x * v.y,
            xz: v.x * v.z,
            yy: v.y * v.y,
            yz: v.y * v.z,
            zz: v.z * v.z,
        }
    }

    /// Builds from a general matrix, averaging the off-diagonal pairs.
    pub fn from_matrix(m: &Matrix3<f64>) -> Sym3 {
        Sym3 {
            xx: m[(0, 0)],
            xy: 0.5 * (m[(0, 1)] + m[(1, 0)]),
            xz: 0.5 * (m[(0, 2)] + m[(2, 0)]),
            yy: m[(1, 1)],
            yz: 0.5 * (m[(1, 2)] + m[(2, 1)]),
            zz: m[(2, 2)],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.xx,
            (0, 1) => self.xy,
            (0, 2) => self.xz,
            (1, 1) => self.yy,
            (1, 2) => self.yz,
            (2, 2) => self.zz,
            _ => panic!("Sym3 index out of range: ({i}, {j})"),
        }
    }

    pub fn to_matrix(self) -> Matrix3<f64> {
        Matrix3::new(
            self.xx, self.xy, self.xz, self.xy, self.yy, self.yz, self.xz, self.yz, self.zz,
        )
    }

    pub fn row(&self, i: usize) -> Vector3<f64> {
        Vector3::new(self.get(i, 0), self.get(i, 1), self.get(i, 2))
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn det(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz)
            - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    /// Adjugate (transposed cofactor) matrix; symmetric for symmetric input.
    pub fn adjugate(&self) -> Sym3 {
        Sym3 {
            xx: self.yy * self.zz - self.yz * self.yz,
            xy: self.xz * self.yz - self.xy * self.zz,
            xz: self.xy * self.yz - self.xz * self.yy,
            yy: self.xx * self.zz - self.xz * self.xz,
            yz: self.xy * self.xz - self.xx * self.yz,
            zz: self.xx * self.yy - self.xy * self.xy,
        }
    }

    /// Matrix square; symmetric since `(M²)ᵀ = (Mᵀ)² = M²`.
    pub fn squared(&self) -> Sym3 {
        Sym3 {
            xx: self.xx * self.xx + self.xy * self.xy + self.xz * self.xz,
            xy: self.xx * self.xy + self.xy * self.yy + self.xz * self.yz,
            xz: self.xx * self.xz + self.xy * self.yz + self.xz * self.zz,
            yy: self.xy * self.xy + self.yy * self.yy + self.yz * self.yz,
            yz: self.xy * self.xz + self.yy * self.yz + self.yz * self.zz,
            zz: self.xz * self.xz + self.yz * self.yz + self.zz * self.zz,
        }
    }

    pub fn mul_vec(&self, v: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            self.xx * v.x + self.xy * v.y + self.xz * v.z,
            self.xy * v.x + self.yy * v.y + self.yz * v.z,
            self.xz * v.x + self.yz * v.y + self.zz * v.z,
        )
    }

    /// tr(M²) = Σᵢⱼ Mᵢⱼ², always non-negative.
    pub fn tr_sq(&self) -> f64 {
        self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz)
    }

    /// tr(M³) via the entrywise product of M and M².
    pub fn tr_cube(&self) -> f64 {
        let s = self.squared();
        self.xx * s.xx
            + self.yy * s.yy
            + self.zz * s.zz
            + 2.0 * (self.xy * s.xy + self.xz * s.xz + self.yz * s.yz)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.tr_sq().sqrt()
    }

    pub fn scale(&self, k: f64) -> Sym3 {
        Sym3 {
            xx: k * self.xx,
            xy: k * self.xy,
            xz: k * self.xz,
            yy: k * self.yy,
            yz: k * self.yz,
            zz: k * self.zz,
        }
    }

    /// `self + k·I`.
    pub fn add_scaled_identity(&self, k: f64) -> Sym3 {
        Sym3 {
            xx: self.xx + k,
            yy: self.yy + k,
            zz: self.zz + k,
            ..*self
        }
    }

    /// Deviatoric (traceless) part, with the residual trace removed twice so
    /// the result traces to zero at roundoff level.
    pub fn deviatoric(&self) -> Sym3 {
        let y = self.add_scaled_identity(-self.trace() / 3.0);
        y.add_scaled_identity(-y.trace() / 3.0)
    }
}

impl Add for Sym3 {
    type Output = Sym3;
    fn add(self, o: Sym3) -> Sym3 {
        Sym3 {
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yy: self.yy + o.yy,
            yz: self.yz + o.yz,
            zz: self.zz + o.zz,
        }
    }
}

impl Sub for Sym3 {
    type Output = Sym3;
    fn sub(self, o: Sym3) -> Sym3 {
        Sym3 {
            xx: self.xx - o.xx,
            xy: self.xy - o.xy,
            xz: self.xz - o.xz,
            yy: self.yy - o.yy,
            yz: self.yz - o.yz,
            zz: self.zz - o.zz,
        }
    }
}

impl Mul<f64> for Sym3 {
    type Output = Sym3;
    fn mul(self, k: f64) -> Sym3 {
        self.scale(k)
    }
}

/// Eigen decomposition of a symmetric 3x3 matrix, eigenvalues descending.
#[derive(Debug, Clone, Copy)]
pub struct Eigen3 {
    pub values: [f64; 3],
    pub vectors: [Vector3<f64>; 3],
}

/// Relative threshold under which two shifted eigenvalues are treated as a
/// degenerate pair when building eigenvectors.
const DEGENERACY_REL: f64 = 1e-9;

/// Eigenvalues of a symmetric matrix by the trigonometric solution of the
/// depressed cubic on the deviatoric part, descending order.
pub fn sym_eigenvalues(m: &Sym3) -> [f64; 3] {
    let q = m.trace() / 3.0;
    let y = m.deviatoric();
    let t2 = y.tr_sq();
    if t2 <= 0.0 {
        return [q, q, q];
    }
    let p = (t2 / 6.0).sqrt();
    let r = (y.det() / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = 2.0 * p * phi.cos();
    let lo = 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    [q + hi, q - hi - lo, q + lo]
}

/// Full eigen decomposition with degeneracy-aware eigenvectors and one
/// Rayleigh-quotient polish per pair.
pub fn sym_eigen(m: &Sym3) -> Eigen3 {
    let values = sym_eigenvalues(m);
    let q = m.trace() / 3.0;
    let rho_scale = values.iter().fold(0.0f64, |a, v| a.max((v - q).abs()));
    let d_tol = DEGENERACY_REL * rho_scale;
    let g01 = values[0] - values[1];
    let g12 = values[1] - values[2];

    let vectors = if g01 <= d_tol && g12 <= d_tol {
        [Vector3::x(), Vector3::y(), Vector3::z()]
    } else if g01 <= d_tol {
        // top pair degenerate: anchor on the isolated smallest eigenvalue
        let u2 = null_vector(&m.add_scaled_identity(-values[2]));
        let (a, b) = complement_basis(&u2);
        [a, b, u2]
    } else if g12 <= d_tol {
        let u0 = null_vector(&m.add_scaled_identity(-values[0]));
        let (a, b) = complement_basis(&u0);
        [u0, a, b]
    } else {
        // distinct: derive the two best-conditioned vectors, cross for the third
        let u0 = null_vector(&m.add_scaled_identity(-values[0]));
        let mut u2 = null_vector(&m.add_scaled_identity(-values[2]));
        u2 = (u2 - u0 * u0.dot(&u2)).normalize();
        let u1 = u2.cross(&u0);
        [u0, u1, u2]
    };

    // Rayleigh polish, then restore descending order.
    let mut pairs: [(f64, Vector3<f64>); 3] = [
        (vectors[0].dot(&m.mul_vec(&vectors[0])), vectors[0]),
        (vectors[1].dot(&m.mul_vec(&vectors[1])), vectors[1]),
        (vectors[2].dot(&m.mul_vec(&vectors[2])), vectors[2]),
    ];
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Eigen3 {
        values: [pairs[0].0, pairs[1].0, pairs[2].0],
        vectors: [pairs[0].1, pairs[1].1, pairs[2].1],
    }
}

/// Unit vector spanning the (near-)null space of a symmetric matrix with one
/// small eigenvalue, via the largest cross product of rows.
fn null_vector(m: &Sym3) -> Vector3<f64> {
    let r0 = m.row(0);
    let r1 = m.row(1);
    let r2 = m.row(2);
    let c01 = r0.cross(&r1);
    let c02 = r0.cross(&r2);
    let c12 = r1.cross(&r2);
    let best = [c01, c02, c12]
        .into_iter()
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
        .unwrap();
    if best.norm_squared() > 0.0 {
        return best.normalize();
    }
    // rank <= 1: anything orthogonal to the largest row
    let r = [r0, r1, r2]
        .into_iter()
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
        .unwrap();
    if r.norm_squared() == 0.0 {
        return Vector3::x();
    }
    let seed = if r.x.abs() <= r.y.abs().min(r.z.abs()) {
        Vector3::x()
    } else if r.y.abs() <= r.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    r.cross(&seed).normalize()
}

/// Orthonormal basis of the plane orthogonal to a unit vector.
fn complement_basis(u: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let seed = if u.x.abs() <= u.y.abs().min(u.z.abs()) {
        Vector3::x()
    } else if u.y.abs() <= u.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let a = (seed - u * u.dot(&seed)).normalize();
    let b = u.cross(&a);
    (a, b)
}
