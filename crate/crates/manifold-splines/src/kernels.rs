//! Polyharmonic kernels on S¹, S² and SO(3).
//!
//! Two kernel forms are supported. Closed forms are the restricted
//! surface splines φ_s(x·y) on spheres and the rotation-angle splines
//! sin(ω/2)^{2m−3} on SO(3). Spectral forms expand the kernel over
//! Laplace–Beltrami eigenspaces with coefficients from one of three
//! rules: the surface-spline product formulas, or 1/Q(λ_ℓ) for a
//! user-supplied degree-m polynomial Q with positive leading
//! coefficient. Kernels that agree on all but finitely many
//! eigen-coefficients produce identical interpolants, which is what the
//! additive degree-ℓ zonal perturbation hook is for.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::basis::{
    chebyshev_all, collocation_matrix, degree_multiplicity, eigenvalue, legendre_all, zonal_sum,
    AuxBasis,
};
use crate::geometry::{distance_unchecked, ManifoldId, Point, PointSet};
use crate::{Error, Result};

/// Rule generating the spectral coefficients k̃(ℓ) for ℓ outside J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CoeffRule {
    /// Restricted surface spline on S^d:
    /// ∏_{ν=1}^m [(ℓ+(d−1)/2)² − (ν−1/2)²]^{-1}.
    #[serde(rename = "rss")]
    RestrictedSurfaceSpline,
    /// Surface spline on SO(3): ∏_{ν=−(m−1)}^{m−1} [ℓ+ν+1/2]^{-1}.
    #[serde(rename = "so3-ss")]
    So3SurfaceSpline,
    /// 1/Q(λ_ℓ) for Q(λ) = Σ c_ν λ^ν.
    #[serde(rename = "inverse_q")]
    InverseQ { poly_coeffs: Vec<f64> },
}

/// Kernel form: closed zonal expression or truncated eigen-expansion.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelForm {
    ClosedForm,
    Spectral {
        coeff_rule: CoeffRule,
        l_max: usize,
        j_degree: usize,
        /// Coefficients on the exceptional degrees ℓ ≤ j_degree
        /// (absent means 0; the choice does not affect interpolants).
        j_values: BTreeMap<usize, f64>,
    },
}

/// A kernel specification: manifold, order m, form, overall scale, and
/// an optional additive zonal perturbation supported on low degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub manifold: ManifoldId,
    pub m: usize,
    pub form: KernelForm,
    pub scale: f64,
    /// Additive term Σ_ℓ perturbation[ℓ]·zonal_sum(ℓ, ·). Used to verify
    /// that changing the kernel on finitely many eigenspaces leaves the
    /// interpolant unchanged.
    pub perturbation: Vec<f64>,
}

fn order_gate(manifold: ManifoldId, m: usize) -> Result<()> {
    let ok = match manifold {
        ManifoldId::Sphere1 => m >= 1,
        ManifoldId::Sphere2 => m >= 2,
        ManifoldId::So3 => m >= 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "order m = {m} too small for {manifold} (need m > d/2, and m >= 2 on so3)"
        )))
    }
}

impl KernelSpec {
    /// Closed-form surface-spline kernel of order `m`.
    pub fn closed(manifold: ManifoldId, m: usize) -> Result<Self> {
        order_gate(manifold, m)?;
        Ok(KernelSpec {
            manifold,
            m,
            form: KernelForm::ClosedForm,
            scale: 1.0,
            perturbation: Vec::new(),
        })
    }

    /// Spectral surface-spline kernel of order `m` truncated at `l_max`,
    /// with zero coefficients on the exceptional degrees.
    pub fn spectral_surface_spline(manifold: ManifoldId, m: usize, l_max: usize) -> Result<Self> {
        order_gate(manifold, m)?;
        let j_degree = default_j_degree(manifold, m);
        if l_max < j_degree + 1 {
            return Err(Error::InvalidInput(format!(
                "L_max = {l_max} must exceed J_degree = {j_degree}"
            )));
        }
        let coeff_rule = match manifold {
            ManifoldId::Sphere1 | ManifoldId::Sphere2 => CoeffRule::RestrictedSurfaceSpline,
            ManifoldId::So3 => CoeffRule::So3SurfaceSpline,
        };
        Ok(KernelSpec {
            manifold,
            m,
            form: KernelForm::Spectral {
                coeff_rule,
                l_max,
                j_degree,
                j_values: BTreeMap::new(),
            },
            scale: 1.0,
            perturbation: Vec::new(),
        })
    }

    /// Adds the zonal term Σ_ℓ c[ℓ]·zonal_sum(ℓ, ·) to the kernel.
    pub fn with_perturbation(mut self, coeffs: Vec<f64>) -> Self {
        self.perturbation = coeffs;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

/// Default exceptional-set degree of the surface-spline kernels:
/// ⌊m − d/2⌋ on S^d, m − 2 on SO(3).
pub fn default_j_degree(manifold: ManifoldId, m: usize) -> usize {
    match manifold {
        ManifoldId::Sphere1 | ManifoldId::Sphere2 => m - 1,
        ManifoldId::So3 => m - 2,
    }
}

/// Zonal variable of a pair: x·y on spheres, the rotation angle on SO(3).
pub fn zonal_variable(manifold: ManifoldId, x: &Point, y: &Point) -> f64 {
    match manifold {
        ManifoldId::Sphere1 | ManifoldId::Sphere2 => x.dot(y).clamp(-1.0, 1.0),
        ManifoldId::So3 => distance_unchecked(manifold, x, y),
    }
}

/// Closed-form kernel value.
///
/// S² (d even): |1−t|^s·log|1−t| with s = m−1 and value 0 at t = 1;
/// S¹ (d odd): |1−t|^s with s = m−1/2; SO(3): sin(ω/2)^{2m−3}.
pub fn eval_closed(spec: &KernelSpec, x: &Point, y: &Point) -> Result<f64> {
    if spec.form != KernelForm::ClosedForm {
        return Err(Error::InvalidInput(
            "eval_closed called on a spectral kernel spec".into(),
        ));
    }
    let base = closed_zonal(spec.manifold, spec.m, zonal_variable(spec.manifold, x, y));
    Ok(spec.scale * base + perturbation_term(spec, x, y)?)
}

fn closed_zonal(manifold: ManifoldId, m: usize, z: f64) -> f64 {
    // Sign chosen so the eigen-coefficients off the exceptional set are
    // positive, making the kernel conditionally positive (not negative)
    // definite: (−1)^m on spheres, (−1)^{m−1} on SO(3). E.g. sin(ω/2)
    // on SO(3) expands with c_ℓ = −1/(π(ℓ−1/2)(ℓ+1/2)(ℓ+3/2)).
    let sign = match manifold {
        ManifoldId::Sphere1 | ManifoldId::Sphere2 => {
            if m.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
        ManifoldId::So3 => {
            if m.is_multiple_of(2) {
                -1.0
            } else {
                1.0
            }
        }
    };
    sign * match manifold {
        ManifoldId::Sphere2 => {
            let s = (m - 1) as f64;
            let u = (1.0 - z).abs();
            if u < 1e-300 {
                0.0 // removable singularity at the diagonal
            } else {
                u.powf(s) * u.ln()
            }
        }
        ManifoldId::Sphere1 => {
            let s = m as f64 - 0.5;
            (1.0 - z).abs().powf(s)
        }
        ManifoldId::So3 => (z / 2.0).sin().powi(2 * m as i32 - 3),
    }
}

fn perturbation_term(spec: &KernelSpec, x: &Point, y: &Point) -> Result<f64> {
    if spec.perturbation.is_empty() {
        return Ok(0.0);
    }
    let z = zonal_variable(spec.manifold, x, y);
    let mut acc = 0.0;
    for (ell, c) in spec.perturbation.iter().enumerate() {
        if *c != 0.0 {
            acc += c * zonal_sum(spec.manifold, ell, z)?;
        }
    }
    Ok(acc)
}

/// Spectral coefficient k̃(ℓ) of a spectral kernel spec.
pub fn spectral_coeff(spec: &KernelSpec, ell: usize) -> Result<f64> {
    let KernelForm::Spectral {
        coeff_rule,
        l_max,
        j_degree,
        j_values,
    } = &spec.form
    else {
        return Err(Error::InvalidInput(
            "spectral_coeff called on a closed-form kernel spec".into(),
        ));
    };
    if ell > *l_max {
        return Err(Error::InvalidInput(format!(
            "degree {ell} beyond truncation L_max = {l_max}"
        )));
    }
    if ell <= *j_degree {
        return Ok(j_values.get(&ell).copied().unwrap_or(0.0));
    }
    Ok(spec.scale * rule_coeff(coeff_rule, spec.manifold, spec.m, ell))
}

fn rule_coeff(rule: &CoeffRule, manifold: ManifoldId, m: usize, ell: usize) -> f64 {
    match rule {
        CoeffRule::RestrictedSurfaceSpline => {
            let d = manifold.dim() as f64;
            let lf = ell as f64;
            let mut prod = 1.0;
            for nu in 1..=m {
                let nu2 = (nu as f64 - 0.5) * (nu as f64 - 0.5);
                prod *= (lf + (d - 1.0) / 2.0).powi(2) - nu2;
            }
            1.0 / prod
        }
        CoeffRule::So3SurfaceSpline => {
            let lf = ell as f64;
            let mut prod = 1.0;
            for nu in -(m as i64 - 1)..=(m as i64 - 1) {
                prod *= lf + nu as f64 + 0.5;
            }
            1.0 / prod
        }
        CoeffRule::InverseQ { poly_coeffs } => {
            1.0 / eval_poly(poly_coeffs, eigenvalue(manifold, ell))
        }
    }
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Truncated eigen-expansion value Σ_{ℓ≤L_max} k̃(ℓ)·zonal_sum(ℓ, ·).
pub fn eval_spectral(spec: &KernelSpec, x: &Point, y: &Point) -> Result<f64> {
    let KernelForm::Spectral { l_max, .. } = &spec.form else {
        return Err(Error::InvalidInput(
            "eval_spectral called on a closed-form kernel spec".into(),
        ));
    };
    let l_max = *l_max;
    let z = zonal_variable(spec.manifold, x, y);
    use std::f64::consts::PI;
    let mut acc = 0.0;
    match spec.manifold {
        ManifoldId::Sphere2 => {
            let leg = legendre_all(l_max, z);
            for (ell, p) in leg.iter().enumerate() {
                let c = spectral_coeff(spec, ell)?;
                acc += c * (2.0 * ell as f64 + 1.0) / (4.0 * PI) * p;
            }
        }
        ManifoldId::Sphere1 => {
            let cheb = chebyshev_all(l_max, z);
            for (ell, t) in cheb.iter().enumerate() {
                let c = spectral_coeff(spec, ell)?;
                let zs = if ell == 0 { 1.0 / (2.0 * PI) } else { t / PI };
                acc += c * zs;
            }
        }
        ManifoldId::So3 => {
            for ell in 0..=l_max {
                let c = spectral_coeff(spec, ell)?;
                acc += c * zonal_sum(ManifoldId::So3, ell, z)?;
            }
        }
    }
    Ok(acc + perturbation_term(spec, x, y)?)
}

/// Upper bound on the truncation error of a spectral kernel:
/// Σ_{ℓ>L_max} |k̃(ℓ)|·sup|zonal_sum(ℓ)|, summed numerically over the
/// next 9·L_max degrees (the remainder decays like ℓ^{1+d−2m} and is
/// negligible against the reported value).
pub fn spectral_tail_bound(spec: &KernelSpec) -> Result<f64> {
    let KernelForm::Spectral {
        coeff_rule, l_max, ..
    } = &spec.form
    else {
        return Err(Error::InvalidInput(
            "tail bound only defined for spectral kernels".into(),
        ));
    };
    let measure = spec.manifold.total_measure();
    let mut acc = 0.0;
    for ell in (l_max + 1)..=(10 * l_max) {
        let c = spec.scale * rule_coeff(coeff_rule, spec.manifold, spec.m, ell);
        // |zonal_sum(ℓ, ·)| ≤ multiplicity/measure (value at the diagonal)
        acc += c.abs() * degree_multiplicity(spec.manifold, ell) as f64 / measure;
    }
    Ok(acc)
}

/// Kernel value for either form.
pub fn eval(spec: &KernelSpec, x: &Point, y: &Point) -> Result<f64> {
    match spec.form {
        KernelForm::ClosedForm => eval_closed(spec, x, y),
        KernelForm::Spectral { .. } => eval_spectral(spec, x, y),
    }
}

/// Symmetric Gram matrix (k(ξ_i, ξ_j)) over a center set.
pub fn gram_matrix(spec: &KernelSpec, pts: &PointSet) -> Result<DMatrix<f64>> {
    let n = pts.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = eval(spec, pts.point(i), pts.point(j))?;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Builds a polyharmonic spectral kernel 1/Q(λ_ℓ) from the polynomial
/// coefficients c_0..c_m of Q.
///
/// Requires c_m > 0 and Q(λ_ℓ) > 0 for every ℓ > `j_degree` (checked up
/// to `l_max`; the positive leading coefficient settles the sign beyond).
pub fn polyharmonic_from_q(
    manifold: ManifoldId,
    poly_coeffs: &[f64],
    j_degree: usize,
    l_max: usize,
) -> Result<KernelSpec> {
    let m = poly_coeffs.len().saturating_sub(1);
    order_gate(manifold, m)?;
    if poly_coeffs[m] <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "leading coefficient c_m = {} must be positive",
            poly_coeffs[m]
        )));
    }
    if l_max < j_degree + 1 {
        return Err(Error::InvalidInput(format!(
            "L_max = {l_max} must exceed J_degree = {j_degree}"
        )));
    }
    for ell in (j_degree + 1)..=l_max {
        let q = eval_poly(poly_coeffs, eigenvalue(manifold, ell));
        if q <= 0.0 {
            return Err(Error::SpectrumViolation {
                ell,
                value: q,
                j_degree,
            });
        }
    }
    Ok(KernelSpec {
        manifold,
        m,
        form: KernelForm::Spectral {
            coeff_rule: CoeffRule::InverseQ {
                poly_coeffs: poly_coeffs.to_vec(),
            },
            l_max,
            j_degree,
            j_values: BTreeMap::new(),
        },
        scale: 1.0,
        perturbation: Vec::new(),
    })
}

/// Result of a randomized conditional-positive-definiteness check.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CpdReport {
    /// Minimum Rayleigh quotient αᵀKα over unit random α with Pᵀα = 0.
    pub min_rayleigh: f64,
    /// Exact minimum eigenvalue of ZᵀKZ for an orthonormal basis Z of
    /// the constraint subspace.
    pub min_eig_projected: f64,
    pub trials: usize,
}

/// Orthonormal basis of the orthogonal complement of the column space
/// of `p` in R^N, by modified Gram–Schmidt against the Q factor.
pub fn constraint_null_basis(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    let qr = p.clone().qr();
    let q = qr.q();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        for j in 0..q.ncols() {
            let qj = q.column(j);
            let proj = qj.dot(&v);
            v -= proj * DVector::from_column_slice(qj.as_slice());
        }
        for c in &cols {
            let proj = c.dot(&v);
            v -= proj * c.clone();
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    let mut z = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        z.set_column(j, c);
    }
    z
}

/// Samples random directions in the constraint subspace {α : Pᵀα = 0}
/// and reports the minimum Rayleigh quotient of K there, along with the
/// exact minimum eigenvalue of the projected matrix.
pub fn cpd_check(
    spec: &KernelSpec,
    pts: &PointSet,
    basis: &AuxBasis,
    trials: usize,
    seed: u64,
) -> Result<CpdReport> {
    let k = gram_matrix(spec, pts)?;
    let p = collocation_matrix(basis, pts);
    let n = pts.len();
    let qr = p.clone().qr();
    let q = qr.q();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut min_rayleigh = f64::INFINITY;
    let mut done = 0usize;
    while done < trials {
        let mut alpha = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        // project onto the constraint subspace
        let qt_a = q.transpose() * &alpha;
        alpha -= &q * qt_a;
        let norm = alpha.norm();
        if norm < 1e-10 {
            continue; // zero draws excluded by construction
        }
        alpha /= norm;
        let r = (alpha.transpose() * &k * &alpha)[(0, 0)];
        min_rayleigh = min_rayleigh.min(r);
        done += 1;
    }

    let z = constraint_null_basis(&p);
    let projected = z.transpose() * &k * &z;
    let sym = nalgebra::SymmetricEigen::new(projected);
    let min_eig_projected = sym
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    Ok(CpdReport {
        min_rayleigh,
        min_eig_projected,
        trials,
    })
}

/// A pair of points at geodesic distance `omega`, anchored at the
/// canonical base point (north pole / identity rotation).
pub fn zonal_pair(manifold: ManifoldId, omega: f64) -> Result<(Point, Point)> {
    if !(0.0..=manifold.diameter()).contains(&omega) {
        return Err(Error::InvalidInput(format!(
            "distance {omega} outside [0, {}]",
            manifold.diameter()
        )));
    }
    match manifold {
        ManifoldId::Sphere1 => Ok((
            Point::new(manifold, &[1.0, 0.0])?,
            Point::new(manifold, &[omega.cos(), omega.sin()])?,
        )),
        ManifoldId::Sphere2 => Ok((
            Point::new(manifold, &[0.0, 0.0, 1.0])?,
            Point::new(manifold, &[omega.sin(), 0.0, omega.cos()])?,
        )),
        ManifoldId::So3 => Ok((
            Point::new(manifold, &[1.0, 0.0, 0.0, 0.0])?,
            Point::new(
                manifold,
                &[(omega / 2.0).cos(), 0.0, 0.0, (omega / 2.0).sin()],
            )?,
        )),
    }
}

/// Result of fitting closed ≈ C·spectral + Σ_{ℓ ≤ J} c_ℓ·zonal_sum(ℓ)
/// over a geodesic-distance grid.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralMatchReport {
    /// Fitted overall constant C.
    pub c: f64,
    /// Fitted low-degree correction coefficients, degree 0..=J.
    pub correction: Vec<f64>,
    /// Maximum absolute residual of the fit over the grid.
    pub max_residual: f64,
    pub grid: usize,
    /// Truncation-tail bound of the spectral kernel on the grid.
    pub tail_bound: f64,
}

/// Fits a closed-form kernel against a truncated spectral kernel of the
/// same order, modulo the inherent degree-≤J ambiguity. Both kernels are
/// evaluated on `grid` distances in [`omega_min`, diameter]; `omega_min`
/// excludes the neighborhood of the diagonal where truncation converges
/// slowest.
pub fn spectral_match(
    closed: &KernelSpec,
    spectral: &KernelSpec,
    grid: usize,
    omega_min: f64,
) -> Result<SpectralMatchReport> {
    if closed.manifold != spectral.manifold || closed.m != spectral.m {
        return Err(Error::InvalidInput(
            "kernels must share manifold and order".into(),
        ));
    }
    if grid < 8 {
        return Err(Error::InvalidInput("need at least 8 grid points".into()));
    }
    let manifold = closed.manifold;
    let j = default_j_degree(manifold, closed.m);
    let diameter = manifold.diameter();
    let n_cols = 1 + (j + 1);
    let mut a = DMatrix::zeros(grid, n_cols);
    let mut rhs = DVector::zeros(grid);
    for i in 0..grid {
        let omega = omega_min + (diameter - omega_min) * i as f64 / (grid - 1) as f64;
        let (x, y) = zonal_pair(manifold, omega)?;
        let z = zonal_variable(manifold, &x, &y);
        a[(i, 0)] = eval_spectral(spectral, &x, &y)?;
        for ell in 0..=j {
            a[(i, 1 + ell)] = zonal_sum(manifold, ell, z)?;
        }
        rhs[i] = eval_closed(closed, &x, &y)?;
    }
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Numerical(format!("least-squares fit failed: {e}")))?;
    let resid = &a * &coef - rhs;
    Ok(SpectralMatchReport {
        c: coef[0],
        correction: coef.as_slice()[1..].to_vec(),
        max_residual: resid.amax(),
        grid,
        tail_bound: spectral_tail_bound(spectral)?,
    })
}

/// Named kernel presets: `rss-s1-m<k>`, `rss-s2-m<k>` for the restricted
/// surface splines and `so3-ss-m2`, `so3-ss-m3` for the SO(3) splines.
pub fn preset(name: &str) -> Result<KernelSpec> {
    let parse_m = |tail: &str| -> Result<usize> {
        tail.strip_prefix('m')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad kernel preset `{name}`")))
    };
    if let Some(rest) = name.strip_prefix("rss-s1-") {
        KernelSpec::closed(ManifoldId::Sphere1, parse_m(rest)?)
    } else if let Some(rest) = name.strip_prefix("rss-s2-") {
        KernelSpec::closed(ManifoldId::Sphere2, parse_m(rest)?)
    } else if let Some(rest) = name.strip_prefix("so3-ss-") {
        KernelSpec::closed(ManifoldId::So3, parse_m(rest)?)
    } else {
        Err(Error::InvalidInput(format!(
            "unknown kernel preset `{name}`"
        )))
    }
}

// --- JSON wire format -------------------------------------------------

#[derive(Serialize, Deserialize)]
struct KernelSpecJson {
    manifold: ManifoldId,
    m: usize,
    form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeff_rule: Option<CoeffRule>,
    #[serde(rename = "L_max", skip_serializing_if = "Option::is_none")]
    l_max: Option<usize>,
    #[serde(rename = "J_degree", skip_serializing_if = "Option::is_none")]
    j_degree: Option<usize>,
    #[serde(
        rename = "J_values",
        skip_serializing_if = "BTreeMap::is_empty",
        default
    )]
    j_values: BTreeMap<usize, f64>,
    scale: f64,
}

impl KernelSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let (form, coeff_rule, l_max, j_degree, j_values) = match &self.form {
            KernelForm::ClosedForm => ("closed".to_string(), None, None, None, BTreeMap::new()),
            KernelForm::Spectral {
                coeff_rule,
                l_max,
                j_degree,
                j_values,
            } => (
                "spectral".to_string(),
                Some(coeff_rule.clone()),
                Some(*l_max),
                Some(*j_degree),
                j_values.clone(),
            ),
        };
        serde_json::to_value(KernelSpecJson {
            manifold: self.manifold,
            m: self.m,
            form,
            coeff_rule,
            l_max,
            j_degree,
            j_values,
            scale: self.scale,
        })
        .expect("kernel spec serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: KernelSpecJson = serde_json::from_value(value.clone())?;
        order_gate(raw.manifold, raw.m)?;
        let form = match raw.form.as_str() {
            "closed" => KernelForm::ClosedForm,
            "spectral" => {
                let coeff_rule = raw.coeff_rule.ok_or_else(|| {
                    Error::InvalidInput("spectral kernel spec needs a coeff_rule".into())
                })?;
                let l_max = raw.l_max.ok_or_else(|| {
                    Error::InvalidInput("spectral kernel spec needs L_max".into())
                })?;
                let j_degree = raw
                    .j_degree
                    .unwrap_or_else(|| default_j_degree(raw.manifold, raw.m));
                if l_max < j_degree + 1 {
                    return Err(Error::InvalidInput(format!(
                        "L_max = {l_max} must exceed J_degree = {j_degree}"
                    )));
                }
                KernelForm::Spectral {
                    coeff_rule,
                    l_max,
                    j_degree,
                    j_values: raw.j_values,
                }
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown kernel form `{other}`"
                )))
            }
        };
        Ok(KernelSpec {
            manifold: raw.manifold,
            m: raw.m,
            form,
            scale: raw.scale,
            perturbation: Vec::new(),
        })
    }
}
