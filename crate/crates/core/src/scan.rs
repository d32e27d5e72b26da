//! Numerical axis oracle for arbitrary anisotropy: map the eigenvalue
//! degeneracy gap over a hemisphere, locate minima, and refine candidates by
//! minimizing the discriminant residual.
//!
//! The refinement objective is the discriminant residual rather than the
//! eigen gap: it is polynomial in n, hence smooth through the degeneracy
//! where the gap itself has a conical kink.

use crate::christoffel::{eigenmodes, gamma_of, reduce, Direction};
use crate::closed_form::{dedupe_axes, AxisSolution, FoundAxis};
use crate::criteria::{axis_test, discriminant_residual};
use crate::media::Material;
use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};

/// Grid size used by the scan-backed solver.
pub const DEFAULT_SCAN_POINTS: usize = 5000;

/// Residual below which refinement declares convergence.
pub const REFINE_RESIDUAL: f64 = 1e-12;

/// Residual above which a stalled refinement is declared a non-axis.
pub const NON_AXIS_FLOOR: f64 = 1e-6;

/// One grid sample: direction, normalized eigen gap, discriminant residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub n: Direction,
    pub gap: f64,
    pub discriminant_residual: f64,
}

/// Degeneracy map over a hemisphere (Γ(−n) = Γ(n) makes the other half
/// redundant).
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyMap {
    pub points: Vec<ScanPoint>,
}

impl DegeneracyMap {
    /// Plot-ready CSV: n1,n2,n3,gap,discriminant_residual.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n1,n2,n3,gap,discriminant_residual")?;
        for p in &self.points {
            let v = p.n.as_vector();
            writeln!(
                w,
                "{},{},{},{},{}",
                v.x, v.y, v.z, p.gap, p.discriminant_residual
            )?;
        }
        Ok(())
    }
}

/// Refinement result for one starting direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedCandidate {
    pub n: Direction,
    pub converged: bool,
    pub residual: f64,
    pub iterations: u32,
}

/// The i-th of `count` spiral points on the upper hemisphere, canonicalized
/// to the projective representative. Deterministic in (i, count).
fn fibonacci_point(i: usize, count: usize) -> Direction {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let z = (i as f64 + 0.5) / count as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let theta = 2.0 * PI * ((i as f64 / golden) % 1.0);
    Direction::normalized(Vector3::new(r * theta.cos(), r * theta.sin(), z))
        .expect("spiral point is nonzero")
        .canonical()
}

/// Deterministic quasi-uniform hemisphere sample.
pub fn fibonacci_hemisphere(count: usize) -> Vec<Direction> {
    (0..count).map(|i| fibonacci_point(i, count)).collect()
}

/// Mean angular spacing of the hemisphere grid.
pub fn mean_spacing(count: usize) -> f64 {
    (2.0 * PI / count as f64).sqrt()
}

fn gap_at(material: &Material, n: &Direction) -> f64 {
    let gamma = gamma_of(material, n);
    let yt = reduce(&gamma);
    if yt.is_spherical() {
        return 0.0;
    }
    let set = eigenmodes(&gamma);
    let [r0, r1, r2] = set.shifted;
    let min_gap = (r0 - r1).abs().min((r1 - r2).abs()).min((r0 - r2).abs());
    min_gap / yt.y.norm()
}

fn residual_at(material: &Material, n: &Direction) -> f64 {
    discriminant_residual(&reduce(&gamma_of(material, n)))
}

/// Maps the degeneracy gap and discriminant residual over `point_count`
/// quasi-uniform hemisphere directions. Deterministic for fixed inputs.
pub fn scan(material: &Material, point_count: usize) -> DegeneracyMap {
    assert!(point_count >= 100, "scan needs at least 100 points");
    let points = (0..point_count)
        .into_par_iter()
        .map(|i| {
            let n = fibonacci_point(i, point_count);
            ScanPoint {
                n,
                gap: gap_at(material, &n),
                discriminant_residual: residual_at(material, &n),
            }
        })
        .collect();
    DegeneracyMap { points }
}

/// Indices of grid points whose discriminant residual is minimal within
/// twice the mean grid spacing.
pub fn local_minima(map: &DegeneracyMap) -> Vec<usize> {
    let count = map.points.len();
    let cos_thresh = (2.0 * mean_spacing(count)).cos();
    (0..count)
        .into_par_iter()
        .filter(|&i| {
            let pi = &map.points[i];
            let vi = pi.n.as_vector();
            for (j, pj) in map.points.iter().enumerate() {
                if j == i {
                    continue;
                }
                if pj.n.as_vector().dot(vi).abs() >= cos_thresh {
                    let ri = pi.discriminant_residual;
                    let rj = pj.discriminant_residual;
                    if rj < ri || (rj == ri && j < i) {
                        return false;
                    }
                }
            }
            true
        })
        .collect()
}

/// Minimizes the discriminant residual from `n0` over a two-parameter
/// tangent chart re-projected to the sphere, using a safeguarded Newton
/// iteration with central finite differences. Converged means the residual
/// reached 1e-12; a candidate stalled above 1e-6 is not an axis.
///
/// The discriminant formula subtracts two O(1) quantities, which floors it
/// near 1e-15 and would leave the direction ~1e-7 rad off. A second Newton
/// phase on the squared minimal-polynomial residual (no such cancellation)
/// then places the axis to machine precision.
pub fn refine(material: &Material, n0: &Direction) -> RefinedCandidate {
    let disc = |v: &Vector3<f64>| -> f64 {
        let n = Direction::normalized(*v).expect("refinement stays away from zero");
        residual_at(material, &n)
    };
    let minpoly_sq = |v: &Vector3<f64>| -> f64 {
        let n = Direction::normalized(*v).expect("refinement stays away from zero");
        let yt = reduce(&gamma_of(material, &n));
        let sigma = crate::christoffel::invariants(&yt).sigma;
        let r = crate::criteria::minimal_poly_residual(&yt, sigma);
        r * r
    };

    let start = *n0.as_vector();
    let f0 = disc(&start);

    // the discriminant formula cannot resolve below ~1e-15; the squared
    // minimal-poly residual bottoms out near 1e-31
    let (coarse, fval, it1) = newton_on_sphere(&disc, start, f0, 60, 1e-15);
    let mut n = coarse;
    let mut iterations = it1;
    if fval <= 1e-8 {
        let (polished, _, it2) =
            newton_on_sphere(&minpoly_sq, coarse, minpoly_sq(&coarse), 60, 1e-28);
        n = polished;
        iterations += it2;
    }
    let residual = disc(&n);

    RefinedCandidate {
        n: Direction::normalized(n).unwrap().canonical(),
        converged: residual <= REFINE_RESIDUAL,
        residual,
        iterations,
    }
}

/// Safeguarded finite-difference Newton descent of `f` over the sphere,
/// charted on the local tangent plane. Stops at `floor`, at a roundoff-level
/// gradient, or when no trial step improves. Returns the improved point, its
/// value, and the iteration count.
fn newton_on_sphere(
    f: &dyn Fn(&Vector3<f64>) -> f64,
    start: Vector3<f64>,
    f_start: f64,
    max_iters: u32,
    floor: f64,
) -> (Vector3<f64>, f64, u32) {
    let h = 1e-5;
    let mut n = start;
    let mut fval = f_start;
    let mut iterations = 0u32;

    for _ in 0..max_iters {
        if fval <= floor {
            break;
        }
        iterations += 1;
        let (t1, t2) = tangent_basis(&n);
        let step = |u: f64, v: f64| (n + t1 * u + t2 * v).normalize();
        let fp0 = f(&step(h, 0.0));
        let fm0 = f(&step(-h, 0.0));
        let f0p = f(&step(0.0, h));
        let f0m = f(&step(0.0, -h));
        let gx = (fp0 - fm0) / (2.0 * h);
        let gy = (f0p - f0m) / (2.0 * h);
        let gnorm = (gx * gx + gy * gy).sqrt();
        // a gradient at roundoff level marks a critical point: stop rather
        // than follow noise off a symmetry-pinned saddle
        if gnorm <= 1e-6 * fval.max(1e-300) {
            break;
        }
        let h11 = (fp0 - 2.0 * fval + fm0) / (h * h);
        let h22 = (f0p - 2.0 * fval + f0m) / (h * h);
        let h12 = (f(&step(h, h)) - f(&step(h, -h)) - f(&step(-h, h)) + f(&step(-h, -h)))
            / (4.0 * h * h);

        let det = h11 * h22 - h12 * h12;
        let mut trial_dirs: Vec<(f64, f64)> = Vec::with_capacity(2);
        if det > 0.0 && h11 > 0.0 {
            trial_dirs.push((-(h22 * gx - h12 * gy) / det, -(h11 * gy - h12 * gx) / det));
        }
        trial_dirs.push((-gx * 0.05 / gnorm, -gy * 0.05 / gnorm));

        // the 3x overshoot lands a quartic-flat minimum in one jump, where a
        // plain Newton step only contracts it by 2/3 per iteration
        let mut accepted = None;
        'outer: for (du, dv) in trial_dirs {
            let mut alpha = 3.0;
            for _ in 0..42 {
                let cand = step(alpha * du, alpha * dv);
                let fc = f(&cand);
                if fc < fval {
                    accepted = Some((cand, fc, alpha * (du * du + dv * dv).sqrt()));
                    break 'outer;
                }
                alpha *= 0.5;
            }
        }

        match accepted {
            Some((cand, fc, step_len)) => {
                n = cand;
                fval = fc;
                if step_len < 1e-14 {
                    break;
                }
            }
            None => break,
        }
    }
    (n, fval, iterations)
}

fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let seed = if n.x.abs() <= n.y.abs().min(n.z.abs()) {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let t1 = (seed - n * n.dot(&seed)).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

/// Scan-backed axis search: grid map, basin minima, refinement, dedup, and a
/// final verdict per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanFindings {
    pub axes: Vec<FoundAxis>,
    pub candidates: Vec<RefinedCandidate>,
    /// Set when most of the grid is degenerate (an axis continuum).
    pub continuum: bool,
}

pub fn find_axes(material: &Material, point_count: usize, tol: f64) -> ScanFindings {
    let map = scan(material, point_count);
    let degenerate = map
        .points
        .iter()
        .filter(|p| p.discriminant_residual < 1e-12)
        .count();
    if degenerate * 2 > map.points.len() {
        return ScanFindings {
            axes: Vec::new(),
            candidates: Vec::new(),
            continuum: true,
        };
    }

    let minima = local_minima(&map);
    let mut candidates: Vec<RefinedCandidate> = minima
        .par_iter()
        .map(|&i| refine(material, &map.points[i].n))
        .collect();

    // merge basins: keep the smaller residual within the dedup angle
    let mut merged: Vec<RefinedCandidate> = Vec::new();
    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    for c in candidates {
        if !merged
            .iter()
            .any(|m| m.n.angle_to(&c.n) < crate::closed_form::DEDUP_ANGLE)
        {
            merged.push(c);
        }
    }

    let mut axes: Vec<FoundAxis> = merged
        .iter()
        .filter(|c| c.converged)
        .filter_map(|c| {
            let verdict = axis_test(material, &c.n, tol);
            verdict.kind.is_axis().then(|| FoundAxis {
                direction: c.n,
                verdict,
            })
        })
        .collect();
    dedupe_axes(&mut axes);
    ScanFindings {
        axes,
        candidates: merged,
        continuum: false,
    }
}

/// One matched pair of a closed-form axis and a scanned axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub closed: Direction,
    pub scanned: Direction,
    pub angle: f64,
}

/// A scanned axis accounted for by distance to a conic solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeMatch {
    pub scanned: Direction,
    pub distance: f64,
}

/// Outcome of matching a closed-form solution against scanned axes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchedPair>,
    pub cone_matches: Vec<ConeMatch>,
    pub unmatched_closed: Vec<Direction>,
    pub unmatched_scanned: Vec<Direction>,
    pub all_sphere: bool,
}

impl MatchReport {
    pub fn max_pair_angle(&self) -> f64 {
        self.pairs.iter().fold(0.0, |m, p| m.max(p.angle))
    }

    pub fn max_cone_distance(&self) -> f64 {
        self.cone_matches.iter().fold(0.0, |m, c| m.max(c.distance))
    }

    pub fn is_exact(&self) -> bool {
        self.unmatched_closed.is_empty() && self.unmatched_scanned.is_empty()
    }
}

/// Bipartite matching by angular distance. Discrete axes pair up greedily
/// within `angle_tol`; for conic solutions a scanned direction may instead
/// be matched by point-to-cone distance within `cone_tol`.
pub fn compare(
    closed: &AxisSolution,
    scanned: &[RefinedCandidate],
    angle_tol: f64,
    cone_tol: f64,
) -> MatchReport {
    let scanned_dirs: Vec<Direction> = scanned.iter().map(|c| c.n).collect();
    match closed {
        AxisSolution::AllSphere(_) => MatchReport {
            all_sphere: true,
            ..Default::default()
        },
        AxisSolution::None => MatchReport {
            unmatched_scanned: scanned_dirs,
            ..Default::default()
        },
        AxisSolution::Discrete(axes) => {
            let closed_dirs: Vec<Direction> = axes.iter().map(|a| a.direction).collect();
            match_discrete(&closed_dirs, &scanned_dirs, angle_tol, None, cone_tol)
        }
        AxisSolution::Conic(cone) => {
            let closed_dirs: Vec<Direction> = cone.axes.iter().map(|a| a.direction).collect();
            match_discrete(
                &closed_dirs,
                &scanned_dirs,
                angle_tol,
                Some(cone),
                cone_tol,
            )
        }
    }
}

fn match_discrete(
    closed: &[Direction],
    scanned: &[Direction],
    angle_tol: f64,
    cone: Option<&crate::closed_form::ConicAxes>,
    cone_tol: f64,
) -> MatchReport {
    let mut report = MatchReport::default();
    let mut closed_used = vec![false; closed.len()];
    let mut scanned_used = vec![false; scanned.len()];

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, c) in closed.iter().enumerate() {
        for (j, s) in scanned.iter().enumerate() {
            let angle = c.angle_to(s);
            if angle <= angle_tol {
                edges.push((i, j, angle));
            }
        }
    }
    edges.sort_by(|a, b| a.2.total_cmp(&b.2));
    for (i, j, angle) in edges {
        if !closed_used[i] && !scanned_used[j] {
            closed_used[i] = true;
            scanned_used[j] = true;
            report.pairs.push(MatchedPair {
                closed: closed[i],
                scanned: scanned[j],
                angle,
            });
        }
    }

    for (j, s) in scanned.iter().enumerate() {
        if scanned_used[j] {
            continue;
        }
        if let Some(cone) = cone {
            let d = cone.angular_distance(s);
            if d <= cone_tol {
                report.cone_matches.push(ConeMatch {
                    scanned: *s,
                    distance: d,
                });
                scanned_used[j] = true;
            }
        }
    }

    for (i, c) in closed.iter().enumerate() {
        if !closed_used[i] {
            report.unmatched_closed.push(*c);
        }
    }
    for (j, s) in scanned.iter().enumerate() {
        if !scanned_used[j] {
            report.unmatched_scanned.push(*s);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::solve;
    use crate::criteria::DEFAULT_TOL;
    use crate::media::SymmetrySpec;

    fn cubic_material(c11: f64, c12: f64, c44: f64) -> Material {
        Material::from_spec(&SymmetrySpec::Cubic { c11, c12, c44 }, 1.0).unwrap()
    }

    fn iso_material() -> Material {
        Material::from_spec(
            &SymmetrySpec::Isotropic {
                lambda: 1.0,
                mu: 1.0,
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn fibonacci_grid_is_deterministic_and_canonical() {
        let a = fibonacci_hemisphere(500);
        let b = fibonacci_hemisphere(500);
        assert_eq!(a.len(), 500);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.as_vector(), y.as_vector());
        }
        for d in &a {
            let v = d.as_vector();
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let first = v.iter().find(|x| x.abs() > 1e-8).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn scan_isotropic_degenerate_everywhere() {
        let map = scan(&iso_material(), 1000);
        assert_eq!(map.points.len(), 1000);
        for p in &map.points {
            assert!(p.gap < 1e-10);
            assert!(p.discriminant_residual < 1e-12);
        }
    }

    #[test]
    fn scan_is_deterministic() {
        let m = cubic_material(4.0, 1.0, 1.0);
        let a = scan(&m, 250);
        let b = scan(&m, 250);
        assert_eq!(a, b);
    }

    #[test]
    fn csv_export_shape() {
        let map = scan(&cubic_material(4.0, 1.0, 1.0), 120);
        let mut buf = Vec::new();
        map.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n1,n2,n3,gap,discriminant_residual");
        assert_eq!(lines.count(), 120);
    }

    #[test]
    fn refine_converges_to_diagonal() {
        let m = cubic_material(4.0, 1.0, 1.0);
        let diag = Direction::normalized(Vector3::new(1.0, 1.0, 1.0)).unwrap();
        // 0.05 rad perturbation
        let start = Direction::normalized(
            diag.as_vector() + tangent_basis(diag.as_vector()).0 * 0.05f64.tan(),
        )
        .unwrap();
        let out = refine(&m, &start);
        assert!(out.converged, "residual stalled at {:.3e}", out.residual);
        assert!(out.n.angle_to(&diag) < 1e-10);
    }

    #[test]
    fn refine_isotropic_is_immediate() {
        let m = iso_material();
        let n0 = Direction::normalized(Vector3::new(0.3, -0.8, 0.52)).unwrap();
        let out = refine(&m, &n0);
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert!(out.n.angle_to(&n0) < 1e-15);
    }

    #[test]
    fn refine_declares_non_axis_at_pinned_saddle() {
        let m = cubic_material(4.0, 1.0, 1.0);
        let n0 = Direction::normalized(Vector3::new(1.0, 1.0, 0.0)).unwrap();
        let out = refine(&m, &n0);
        assert!(!out.converged);
        assert!(out.residual > NON_AXIS_FLOOR);
    }

    #[test]
    fn find_axes_matches_cubic_closed_form() {
        let m = cubic_material(4.0, 1.0, 1.0);
        let findings = find_axes(&m, 5000, DEFAULT_TOL);
        assert!(!findings.continuum);
        assert_eq!(findings.axes.len(), 7);

        let closed = solve(&m).solution;
        let converged: Vec<RefinedCandidate> = findings
            .candidates
            .iter()
            .copied()
            .filter(|c| c.converged)
            .collect();
        let report = compare(&closed, &converged, 1e-6, 2.0 * mean_spacing(5000));
        assert!(report.is_exact(), "report: {report:?}");
        assert!(report.max_pair_angle() < 1e-8);
    }

    #[test]
    fn find_axes_flags_isotropic_continuum() {
        let findings = find_axes(&iso_material(), 400, DEFAULT_TOL);
        assert!(findings.continuum);
    }
}
