//! The saddle-point interpolation system for conditionally positive
//! definite kernels.
//!
//! For centers Ξ, kernel k and auxiliary basis Π the block system
//!
//! ```text
//! [ K  P ] [a]   [y]      K_{ζξ} = k(ζ, ξ),  P_{ξj} = φ_j(ξ)
//! [ Pᵀ 0 ] [b] = [0]
//! ```
//!
//! is factorized once (partial-pivot LU of the full symmetric indefinite
//! block matrix) and the factorization is reused for every data vector
//! and for every Lagrange-function evaluation, which turns a
//! Lebesgue-constant scan into one back-substitution per probe point.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rayon::prelude::*;

use crate::basis::{collocation_matrix, unisolvency_check, AuxBasis};
use crate::geometry::{ManifoldId, Point, PointSet, QuadratureRule};
use crate::kernels::{self, KernelSpec};
use crate::{Error, Result};

/// Assembled and factorized interpolation system.
pub struct SaddleSystem {
    pub kernel: KernelSpec,
    pub aux: AuxBasis,
    pub centers: PointSet,
    k: DMatrix<f64>,
    p: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    /// Ratio of extreme |U| pivots of the LU factorization; a cheap
    /// conditioning estimate, not a norm-wise condition number.
    pub condition_estimate: f64,
}

/// Coefficients of an interpolant Σ a_ξ k(·,ξ) + Σ b_j φ_j, together
/// with the recorded solve residuals.
#[derive(Clone, Debug)]
pub struct Interpolant {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    /// ‖Ka + Pb − y‖ / ‖y‖ (0 for y = 0).
    pub residual: f64,
    /// ‖Pᵀa‖ / ‖a‖ (0 for a = 0).
    pub side_residual: f64,
}

/// Discrete L₂ projection onto the interpolation space.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    /// The projection expressed as interpolant coefficients.
    pub element: Interpolant,
    /// Values of the projection at the centers (Lagrange coordinates).
    pub center_values: DVector<f64>,
    pub l2_error: f64,
    pub gram_condition: f64,
    /// Set when the Lagrange Gram matrix condition exceeds 1e12.
    pub ill_conditioned: bool,
}

impl SaddleSystem {
    /// Assembles and factorizes the system. Fails when the centers are
    /// not unisolvent for the auxiliary basis.
    pub fn assemble(kernel: KernelSpec, aux: AuxBasis, centers: PointSet) -> Result<Self> {
        if kernel.manifold != aux.manifold || kernel.manifold != centers.manifold {
            return Err(Error::InvalidInput(
                "kernel, basis and centers must share a manifold".into(),
            ));
        }
        if centers.len() < aux.dim {
            return Err(Error::InvalidInput(format!(
                "need at least {} centers for a dimension-{} auxiliary space, got {}",
                aux.dim,
                aux.dim,
                centers.len()
            )));
        }
        let report = unisolvency_check(&aux, &centers)?;
        if !report.unisolvent {
            return Err(Error::RankDefect {
                rank: report.rank,
                dim: aux.dim,
            });
        }
        let k = kernels::gram_matrix(&kernel, &centers)?;
        let p = collocation_matrix(&aux, &centers);
        let n = centers.len();
        let dim = aux.dim;
        let size = n + dim;
        let mut block = DMatrix::zeros(size, size);
        block.view_mut((0, 0), (n, n)).copy_from(&k);
        block.view_mut((0, n), (n, dim)).copy_from(&p);
        block.view_mut((n, 0), (dim, n)).copy_from(&p.transpose());
        let lu = block.lu();
        let diag = lu.u().diagonal();
        let max_pivot = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min_pivot = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if min_pivot == 0.0 || !min_pivot.is_finite() {
            return Err(Error::Numerical(
                "saddle-point factorization produced a zero pivot".into(),
            ));
        }
        Ok(SaddleSystem {
            kernel,
            aux,
            centers,
            k,
            p,
            lu,
            condition_estimate: max_pivot / min_pivot,
        })
    }

    pub fn n_centers(&self) -> usize {
        self.centers.len()
    }

    pub fn aux_dim(&self) -> usize {
        self.aux.dim
    }

    pub fn manifold(&self) -> ManifoldId {
        self.kernel.manifold
    }

    pub fn kernel_block(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn collocation_block(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Applies the block matrix to a stacked vector (a, b).
    pub fn apply_block(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n_centers();
        let dim = self.aux_dim();
        let a = v.rows(0, n);
        let b = v.rows(n, dim);
        let mut out = DVector::zeros(n + dim);
        out.rows_mut(0, n).copy_from(&(&self.k * a + &self.p * b));
        out.rows_mut(n, dim).copy_from(&(self.p.transpose() * a));
        out
    }

    fn solve_block(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu.solve(rhs).ok_or_else(|| {
            Error::Numerical(format!(
                "block solve failed (condition estimate {:.3e})",
                self.condition_estimate
            ))
        })
    }

    /// Solves for the interpolant of the data values at the centers.
    pub fn solve_interpolant(&self, data: &DVector<f64>) -> Result<Interpolant> {
        let n = self.n_centers();
        let dim = self.aux_dim();
        if data.len() != n {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match {} centers",
                data.len(),
                n
            )));
        }
        let mut rhs = DVector::zeros(n + dim);
        rhs.rows_mut(0, n).copy_from(data);
        let sol = self.solve_block(&rhs)?;
        let a = DVector::from(sol.rows(0, n).clone_owned());
        let b = DVector::from(sol.rows(n, dim).clone_owned());
        let data_norm = data.norm();
        let residual = if data_norm > 0.0 {
            (&self.k * &a + &self.p * &b - data).norm() / data_norm
        } else {
            0.0
        };
        let a_norm = a.norm();
        let side_residual = if a_norm > 0.0 {
            (self.p.transpose() * &a).norm() / a_norm
        } else {
            0.0
        };
        Ok(Interpolant {
            a,
            b,
            residual,
            side_residual,
        })
    }

    /// Evaluates an interpolant anywhere on the manifold.
    pub fn eval_interpolant(&self, s: &Interpolant, x: &Point) -> Result<f64> {
        let mut acc = 0.0;
        for (i, xi) in self.centers.points().iter().enumerate() {
            acc += s.a[i] * kernels::eval(&self.kernel, x, xi)?;
        }
        let phi = self.aux.eval(x);
        for (j, v) in phi.iter().enumerate() {
            acc += s.b[j] * v;
        }
        Ok(acc)
    }

    /// Values (χ_ξ(x))_ξ of all Lagrange functions at `x`, by one block
    /// solve with right-hand side (k(x,Ξ), φ(x)). The block matrix is
    /// symmetric, so this equals the transposed cardinal solve.
    pub fn lagrange_values(&self, x: &Point) -> Result<DVector<f64>> {
        let n = self.n_centers();
        let dim = self.aux_dim();
        let mut rhs = DVector::zeros(n + dim);
        for (i, xi) in self.centers.points().iter().enumerate() {
            rhs[i] = kernels::eval(&self.kernel, x, xi)?;
        }
        let phi = self.aux.eval(x);
        for (j, v) in phi.iter().enumerate() {
            rhs[n + j] = *v;
        }
        let sol = self.solve_block(&rhs)?;
        Ok(DVector::from(sol.rows(0, n).clone_owned()))
    }

    /// The cardinal interpolant χ_ξ for one center index.
    pub fn cardinal_interpolant(&self, xi_index: usize) -> Result<Interpolant> {
        let mut e = DVector::zeros(self.n_centers());
        e[xi_index] = 1.0;
        self.solve_interpolant(&e)
    }

    /// Native-space seminorm √(aᵀKa). Values that dip slightly below
    /// zero (roundoff) are clamped; a significantly negative quadratic
    /// form is a CPD violation and is reported as an error.
    pub fn native_seminorm(&self, s: &Interpolant) -> Result<f64> {
        let quad = (s.a.transpose() * &self.k * &s.a)[(0, 0)];
        let a2 = s.a.norm_squared();
        if quad < -1e-6 * a2.max(f64::MIN_POSITIVE) {
            return Err(Error::CpdViolation(quad));
        }
        Ok(quad.max(0.0).sqrt())
    }

    /// Lagrange-function values at many points, one block solve each,
    /// evaluated in parallel against the shared factorization.
    pub fn lagrange_values_batch(&self, xs: &[Point]) -> Result<Vec<DVector<f64>>> {
        xs.par_iter().map(|x| self.lagrange_values(x)).collect()
    }

    /// Matrix X with X[ξ][q] = χ_ξ(node_q): every cardinal function
    /// evaluated at every quadrature node, via N cardinal solves against
    /// the shared factorization.
    fn cardinal_values_at(&self, nodes: &[Point]) -> Result<DMatrix<f64>> {
        let n = self.n_centers();
        let cards: Vec<Interpolant> = (0..n)
            .into_par_iter()
            .map(|i| self.cardinal_interpolant(i))
            .collect::<Result<_>>()?;
        let vals: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|x| {
                cards
                    .iter()
                    .map(|c| self.eval_interpolant(c, x))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let mut x = DMatrix::zeros(n, nodes.len());
        for (q, col) in vals.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                x[(i, q)] = *v;
            }
        }
        Ok(x)
    }

    /// Discrete L₂ projection of `f` onto the interpolation space,
    /// through the normal equations in the Lagrange basis with the
    /// given quadrature as the L₂ discretization.
    pub fn l2_project(
        &self,
        f: &dyn Fn(&Point) -> f64,
        quad: &QuadratureRule,
    ) -> Result<ProjectionResult> {
        if quad.manifold != self.manifold() {
            return Err(Error::InvalidInput("quadrature manifold mismatch".into()));
        }
        let n = self.n_centers();
        let chi = self.cardinal_values_at(&quad.nodes)?;
        let mut gram = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (q, (node, w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
            let col = chi.column(q);
            let fv = f(node);
            for i in 0..n {
                rhs[i] += w * fv * col[i];
                for j in i..n {
                    gram[(i, j)] += w * col[i] * col[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(gram.clone());
        let emax = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, v: &f64| m.max(v.abs()));
        let emin = eig
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, v: &f64| m.min(v.abs()));
        let gram_condition = if emin > 0.0 {
            emax / emin
        } else {
            f64::INFINITY
        };
        let c = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("Lagrange Gram solve failed".into()))?;
        let element = self.solve_interpolant(&c)?;
        let mut err2 = 0.0;
        for (q, (node, w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
            let sval: f64 = chi.column(q).dot(&c);
            let d = f(node) - sval;
            err2 += w * d * d;
        }
        Ok(ProjectionResult {
            element,
            center_values: c,
            l2_error: err2.max(0.0).sqrt(),
            gram_condition,
            ill_conditioned: gram_condition > 1e12,
        })
    }
}
