//! Kernel forms and their equivalence: closed-form vs truncated
//! spectral expansion, interpolant invariance under low-degree zonal
//! perturbations, and the 1/Q(λ) spectral builder.
//!
//! Run with: cargo run --release --example kernel_forms

use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{generate_points, GenMethod, ManifoldId, SizeSpec};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::{
    polyharmonic_from_q, preset, spectral_match, spectral_tail_bound, KernelSpec,
};
use nalgebra::DVector;

fn main() {
    // 1. closed form equals C·spectral + low-degree correction
    let closed = preset("rss-s2-m2").expect("preset");
    let spectral =
        KernelSpec::spectral_surface_spline(ManifoldId::Sphere2, 2, 400).expect("spectral");
    let fit = spectral_match(&closed, &spectral, 200, 0.05).expect("fit");
    println!(
        "closed vs spectral (L_max = 400): C = {:.4}, max residual {:.3e}, tail bound {:.1e}",
        fit.c, fit.max_residual, fit.tail_bound
    );
    println!("low-degree correction: {:?}", fit.correction);

    // 2. perturbing the kernel inside the reproduced polynomial space
    //    leaves the interpolant untouched
    let manifold = ManifoldId::Sphere2;
    let aux = aux_space(manifold, 2).expect("aux basis");
    let centers =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(60), 0).expect("centers");
    let data = DVector::from_fn(60, |i, _| (3.0 * centers.point(i).coords()[2]).sin());
    let probe =
        generate_points(manifold, GenMethod::Random, SizeSpec::Count(500), 7).expect("probe");
    let base =
        SaddleSystem::assemble(closed.clone(), aux.clone(), centers.clone()).expect("assembly");
    let s0 = base.solve_interpolant(&data).expect("solve");
    let perturbed = SaddleSystem::assemble(closed.with_perturbation(vec![0.8, -1.3]), aux, centers)
        .expect("assembly");
    let s1 = perturbed.solve_interpolant(&data).expect("solve");
    let dev = probe
        .points()
        .iter()
        .map(|x| {
            (base.eval_interpolant(&s0, x).unwrap() - perturbed.eval_interpolant(&s1, x).unwrap())
                .abs()
        })
        .fold(0.0f64, f64::max);
    println!("interpolant deviation under a degree-<=1 zonal perturbation: {dev:.3e}");

    // 3. polyharmonic builder: coefficients 1/Q(lambda_ell)
    let q_kernel =
        polyharmonic_from_q(ManifoldId::Sphere2, &[1.0, 2.0, 1.0], 1, 200).expect("builder");
    println!(
        "1/(1+lambda)^2 kernel: truncation tail bound {:.2e}",
        spectral_tail_bound(&q_kernel).expect("tail")
    );
    println!(
        "kernel JSON:\n{}",
        serde_json::to_string_pretty(&q_kernel.to_json()).unwrap()
    );
}
