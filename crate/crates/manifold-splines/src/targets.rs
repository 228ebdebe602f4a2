//! Preset target functions for interpolation and convergence
//! experiments, evaluable on any supported manifold.

use crate::basis::AuxBasis;
use crate::geometry::{ManifoldId, Point};
use crate::{Error, Result};

/// A named target function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// Constant 1.
    Const,
    /// exp(x·u) for a fixed unit vector u in the ambient space.
    ExpDotU,
    /// 0.3·(orthonormal constant) plus a fixed combination of the
    /// degree-1 eigenfunctions; lies in Π₁ exactly.
    HarmonicMix,
}

impl Target {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(Target::Const),
            "exp-dot-u" => Ok(Target::ExpDotU),
            "harmonic-mix" => Ok(Target::HarmonicMix),
            other => Err(Error::InvalidInput(format!("unknown target `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::Const => "const",
            Target::ExpDotU => "exp-dot-u",
            Target::HarmonicMix => "harmonic-mix",
        }
    }

    pub fn eval(&self, manifold: ManifoldId, x: &Point) -> f64 {
        match self {
            Target::Const => 1.0,
            Target::ExpDotU => {
                let n = manifold.ambient_dim();
                let u = 1.0 / (n as f64).sqrt();
                let dot: f64 = x.coords().iter().map(|c| c * u).sum();
                dot.exp()
            }
            Target::HarmonicMix => {
                let basis = AuxBasis::with_max_degree(manifold, 1)
                    .expect("degree-1 basis exists on every supported manifold");
                let vals = basis.eval(x);
                let mut acc = 0.3 * vals[0];
                for (j, v) in vals.iter().enumerate().skip(1) {
                    acc += mix_coeff(j) * v;
                }
                acc
            }
        }
    }
}

/// Fixed, non-degenerate coefficients for the degree-1 part of
/// [`Target::HarmonicMix`].
fn mix_coeff(j: usize) -> f64 {
    const COEFFS: [f64; 9] = [1.0, -0.7, 0.4, 0.25, -0.55, 0.8, -0.15, 0.6, -0.35];
    COEFFS[(j - 1) % COEFFS.len()]
}

/// The Π₁ coefficient vector of [`Target::HarmonicMix`] in basis order.
pub fn harmonic_mix_coefficients(dim: usize) -> Vec<f64> {
    let mut c = vec![0.3];
    for j in 1..dim {
        c.push(mix_coeff(j));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parse_and_eval() {
        let x = Point::new(ManifoldId::Sphere2, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            Target::parse("const")
                .unwrap()
                .eval(ManifoldId::Sphere2, &x),
            1.0
        );
        let t = Target::parse("exp-dot-u").unwrap();
        assert_abs_diff_eq!(
            t.eval(ManifoldId::Sphere2, &x),
            (1.0 / 3.0f64.sqrt()).exp(),
            epsilon = 1e-15
        );
        assert!(Target::parse("bogus").is_err());
    }

    #[test]
    fn harmonic_mix_matches_declared_coefficients() {
        let basis = AuxBasis::with_max_degree(ManifoldId::Sphere2, 1).unwrap();
        let coeffs = harmonic_mix_coefficients(basis.dim);
        let x = Point::new(ManifoldId::Sphere2, &[0.6, 0.0, 0.8]).unwrap();
        let vals = basis.eval(&x);
        let expect: f64 = coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum();
        assert_abs_diff_eq!(
            Target::HarmonicMix.eval(ManifoldId::Sphere2, &x),
            expect,
            epsilon = 1e-15
        );
    }
}
