//! Real orthonormal eigenbases of the Laplace–Beltrami operator:
//! circular harmonics on S¹, spherical harmonics on S², and low-degree
//! Wigner rotation functions on SO(3), together with the zonal
//! addition-theorem sums used by spectral kernels.
//!
//! All bases are L₂-orthonormal against the invariant measures fixed in
//! [`crate::geometry`] (2π, 4π and 8π² total mass). Basis ordering is
//! degree-major; within a sphere degree the order is `m = 0`, then
//! cosine/sine pairs for `m = 1..=ℓ`; on SO(3) degree 1 consists of the
//! nine orthonormalized rotation-matrix entries in row-major order.

use nalgebra::DMatrix;

use crate::geometry::{quat_to_matrix, ManifoldId, Point, PointSet};
use crate::{Error, Result};

/// Legendre polynomials P_0..P_lmax at `t` by the three-term recurrence.
pub fn legendre_all(lmax: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax >= 1 {
        p.push(t);
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let next = ((2.0 * lf - 1.0) * t * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        p.push(next);
    }
    p
}

/// Chebyshev polynomials T_0..T_lmax at `t` (cos(ℓ arccos t) on [-1,1]).
pub fn chebyshev_all(lmax: usize, t: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(lmax + 1);
    c.push(1.0);
    if lmax >= 1 {
        c.push(t);
    }
    for l in 2..=lmax {
        let next = 2.0 * t * c[l - 1] - c[l - 2];
        c.push(next);
    }
    c
}

/// Number of degree-ℓ basis functions.
pub fn degree_multiplicity(manifold: ManifoldId, ell: usize) -> usize {
    match manifold {
        ManifoldId::Sphere1 => {
            if ell == 0 {
                1
            } else {
                2
            }
        }
        ManifoldId::Sphere2 => 2 * ell + 1,
        ManifoldId::So3 => (2 * ell + 1) * (2 * ell + 1),
    }
}

/// Laplace–Beltrami eigenvalue of degree ℓ: ℓ(ℓ+d−1) on S^d, ℓ(ℓ+1)
/// on SO(3).
pub fn eigenvalue(manifold: ManifoldId, ell: usize) -> f64 {
    let l = ell as f64;
    match manifold {
        ManifoldId::Sphere1 => l * l,
        ManifoldId::Sphere2 | ManifoldId::So3 => l * (l + 1.0),
    }
}

/// Orthonormal circular harmonics up to degree `lmax`:
/// 1/√(2π), then (cos ℓθ, sin ℓθ)/√π per degree.
pub fn sphere1_harmonics(lmax: usize, p: &Point) -> Vec<f64> {
    use std::f64::consts::PI;
    let c = p.coords();
    let theta = c[1].atan2(c[0]);
    let mut out = Vec::with_capacity(1 + 2 * lmax);
    out.push(1.0 / (2.0 * PI).sqrt());
    for l in 1..=lmax {
        let a = l as f64 * theta;
        out.push(a.cos() / PI.sqrt());
        out.push(a.sin() / PI.sqrt());
    }
    out
}

/// Fully normalized associated Legendre functions P̄_{ℓm}(cos θ) for
/// ℓ ≤ lmax, 0 ≤ m ≤ ℓ, such that the real harmonics built from them
/// are orthonormal on S². Returned in a flat vector indexed by
/// ℓ(ℓ+1)/2 + m.
fn normalized_assoc_legendre(lmax: usize, cos_theta: f64, sin_theta: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let size = (lmax + 1) * (lmax + 2) / 2;
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; size];
    p[0] = 1.0 / (4.0 * PI).sqrt();
    // sectoral recurrence, then upward in ℓ at fixed m
    for m in 1..=lmax {
        p[idx(m, m)] =
            p[idx(m - 1, m - 1)] * sin_theta * ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
    }
    for m in 0..lmax {
        p[idx(m + 1, m)] = p[idx(m, m)] * cos_theta * (2.0 * m as f64 + 3.0).sqrt();
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            p[idx(l, m)] = a * (cos_theta * p[idx(l - 1, m)] - b * p[idx(l - 2, m)]);
        }
    }
    p
}

/// Orthonormal real spherical harmonics on S² up to degree `lmax`,
/// degree-major; within degree ℓ: Y_{ℓ0}, then √2·P̄_{ℓm}(cos mφ, sin mφ)
/// pairs for m = 1..=ℓ.
pub fn sphere2_harmonics(lmax: usize, p: &Point) -> Vec<f64> {
    let c = p.coords();
    let cos_theta = c[2];
    let sin_theta = (c[0] * c[0] + c[1] * c[1]).sqrt();
    let phi = c[1].atan2(c[0]);
    let plm = normalized_assoc_legendre(lmax, cos_theta, sin_theta);
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut out = Vec::with_capacity((lmax + 1) * (lmax + 1));
    let sqrt2 = 2.0f64.sqrt();
    for l in 0..=lmax {
        out.push(plm[idx(l, 0)]);
        for m in 1..=l {
            let a = m as f64 * phi;
            out.push(sqrt2 * plm[idx(l, m)] * a.cos());
            out.push(sqrt2 * plm[idx(l, m)] * a.sin());
        }
    }
    out
}

/// Orthonormal SO(3) eigenfunctions of degree ≤ 1: the constant
/// 1/√(8π²) followed by √(3/(8π²))·R_ij, row-major.
pub fn so3_low_harmonics(lmax: usize, p: &Point) -> Vec<f64> {
    use std::f64::consts::PI;
    assert!(lmax <= 1, "explicit SO(3) basis functions stop at degree 1");
    let mass = 8.0 * PI * PI;
    let mut out = Vec::with_capacity(if lmax == 0 { 1 } else { 10 });
    out.push(1.0 / mass.sqrt());
    if lmax == 1 {
        let q: [f64; 4] = p.coords().try_into().unwrap();
        let r = quat_to_matrix(&q);
        let scale = (3.0 / mass).sqrt();
        for row in &r {
            for v in row {
                out.push(scale * v);
            }
        }
    }
    out
}

/// The auxiliary space Π spanned by all eigenfunctions up to a maximum
/// degree, against which the polyharmonic kernels are conditionally
/// positive definite.
#[derive(Clone, Debug)]
pub struct AuxBasis {
    pub manifold: ManifoldId,
    pub max_degree: usize,
    /// (degree ℓ, index within degree) in evaluation order.
    pub functions: Vec<(usize, usize)>,
    pub dim: usize,
}

impl AuxBasis {
    /// Builds Π up to degree `max_degree` directly.
    pub fn with_max_degree(manifold: ManifoldId, max_degree: usize) -> Result<Self> {
        if manifold == ManifoldId::So3 && max_degree > 1 {
            return Err(Error::InvalidInput(
                "explicit SO(3) auxiliary degrees above 1 are not supported".into(),
            ));
        }
        let mut functions = Vec::new();
        for l in 0..=max_degree {
            for j in 0..degree_multiplicity(manifold, l) {
                functions.push((l, j));
            }
        }
        let dim = functions.len();
        Ok(AuxBasis {
            manifold,
            max_degree,
            functions,
            dim,
        })
    }

    /// Values of all basis functions at `x`, in declared order.
    pub fn eval(&self, x: &Point) -> Vec<f64> {
        match self.manifold {
            ManifoldId::Sphere1 => sphere1_harmonics(self.max_degree, x),
            ManifoldId::Sphere2 => sphere2_harmonics(self.max_degree, x),
            ManifoldId::So3 => so3_low_harmonics(self.max_degree, x),
        }
    }
}

/// Auxiliary space for a polyharmonic kernel of order `m`:
/// degrees ℓ ≤ ⌊m − d/2⌋ on S^d, ℓ ≤ m − 2 on SO(3).
pub fn aux_space(manifold: ManifoldId, m: usize) -> Result<AuxBasis> {
    let max_degree = aux_max_degree(manifold, m)?;
    AuxBasis::with_max_degree(manifold, max_degree)
}

/// The maximum auxiliary degree for order `m`, checking the order gate
/// m > d/2 (spheres) and m ≥ 2 (SO(3)).
pub fn aux_max_degree(manifold: ManifoldId, m: usize) -> Result<usize> {
    match manifold {
        ManifoldId::Sphere1 => {
            if m < 1 {
                return Err(Error::InvalidInput("sphere1 needs m >= 1".into()));
            }
            Ok(m - 1) // ⌊m − 1/2⌋
        }
        ManifoldId::Sphere2 => {
            if m < 2 {
                return Err(Error::InvalidInput("sphere2 needs m >= 2 (m > d/2)".into()));
            }
            Ok(m - 1)
        }
        ManifoldId::So3 => {
            if m < 2 {
                return Err(Error::InvalidInput("so3 needs m >= 2".into()));
            }
            if m > 3 {
                return Err(Error::InvalidInput(
                    "so3 supports m in {2, 3} (auxiliary degrees above 1 unimplemented)".into(),
                ));
            }
            Ok(m - 2)
        }
    }
}

/// Zonal addition-theorem sum Σ_j φ_{ℓ,j}(x)·φ_{ℓ,j}(y) as a function
/// of the zonal variable: t = x·y on spheres, the rotation angle ω on
/// SO(3).
///
/// - S¹: 1/(2π) for ℓ = 0, T_ℓ(t)/π otherwise;
/// - S²: (2ℓ+1)/(4π)·P_ℓ(t);
/// - SO(3): (2ℓ+1)/(8π²)·sin((2ℓ+1)ω/2)/sin(ω/2), with limit
///   (2ℓ+1)²/(8π²) at ω → 0.
pub fn zonal_sum(manifold: ManifoldId, ell: usize, z: f64) -> Result<f64> {
    use std::f64::consts::PI;
    match manifold {
        ManifoldId::Sphere1 => {
            if !(-1.0..=1.0).contains(&z) {
                return Err(Error::InvalidInput(format!("t = {z} outside [-1, 1]")));
            }
            if ell == 0 {
                Ok(1.0 / (2.0 * PI))
            } else {
                Ok(chebyshev_all(ell, z)[ell] / PI)
            }
        }
        ManifoldId::Sphere2 => {
            if !(-1.0..=1.0).contains(&z) {
                return Err(Error::InvalidInput(format!("t = {z} outside [-1, 1]")));
            }
            Ok((2.0 * ell as f64 + 1.0) / (4.0 * PI) * legendre_all(ell, z)[ell])
        }
        ManifoldId::So3 => {
            if !(0.0..=PI + 1e-12).contains(&z) {
                return Err(Error::InvalidInput(format!("omega = {z} outside [0, pi]")));
            }
            let n = 2.0 * ell as f64 + 1.0;
            let x = z / 2.0;
            let character = if x < 1e-6 {
                // Dirichlet-kernel Taylor form near the identity
                n * (1.0 - (n * n - 1.0) * x * x / 6.0)
            } else {
                (n * x).sin() / x.sin()
            };
            Ok(n / (8.0 * PI * PI) * character)
        }
    }
}

/// Collocation matrix (φ_j(ξ)) with one row per point, one column per
/// basis function.
pub fn collocation_matrix(basis: &AuxBasis, pts: &PointSet) -> DMatrix<f64> {
    let n = pts.len();
    let mut mat = DMatrix::zeros(n, basis.dim);
    for (i, p) in pts.points().iter().enumerate() {
        let row = basis.eval(p);
        for (j, v) in row.iter().enumerate() {
            mat[(i, j)] = *v;
        }
    }
    mat
}

/// Result of a unisolvency test of a point set against Π.
#[derive(Clone, Copy, Debug)]
pub struct UnisolvencyReport {
    pub rank: usize,
    pub unisolvent: bool,
    /// σ_max/σ_min of the collocation matrix.
    pub condition: f64,
}

/// Rank-revealing check that `pts` is unisolvent for `basis`, with the
/// scale-free tolerance 1e-10·σ_max.
pub fn unisolvency_check(basis: &AuxBasis, pts: &PointSet) -> Result<UnisolvencyReport> {
    if pts.len() < basis.dim {
        return Err(Error::InvalidInput(format!(
            "need at least {} points for a dimension-{} auxiliary space, got {}",
            basis.dim,
            basis.dim,
            pts.len()
        )));
    }
    let mat = collocation_matrix(basis, pts);
    let svd = mat.svd(false, false);
    let mut sigmas: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigmas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smax = sigmas.first().copied().unwrap_or(0.0);
    let tol = 1e-10 * smax;
    let rank = sigmas.iter().filter(|s| **s > tol).count();
    let smin = sigmas.last().copied().unwrap_or(0.0);
    Ok(UnisolvencyReport {
        rank,
        unisolvent: rank == basis.dim,
        condition: if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        },
    })
}
