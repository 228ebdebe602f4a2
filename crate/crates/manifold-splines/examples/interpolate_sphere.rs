//! Kernel interpolation on S²: solve the constrained system for the
//! restricted surface-spline kernel and measure the error.
//!
//! Run with: cargo run --release --example interpolate_sphere

use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{generate_points, quadrature, GenMethod, ManifoldId, SizeSpec};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::preset;
use manifold_splines::targets::Target;
use nalgebra::DVector;

fn main() {
    let manifold = ManifoldId::Sphere2;
    let kernel = preset("rss-s2-m2").expect("preset");
    let aux = aux_space(manifold, kernel.m).expect("aux basis");
    let centers =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(200), 0).expect("centers");

    let target = Target::ExpDotU;
    let data = DVector::from_fn(centers.len(), |i, _| {
        target.eval(manifold, centers.point(i))
    });
    let sys = SaddleSystem::assemble(kernel, aux, centers).expect("assembly");
    let s = sys.solve_interpolant(&data).expect("solve");
    println!("centers:            {}", sys.n_centers());
    println!("aux dimension:      {}", sys.aux_dim());
    println!("center residual:    {:.3e}", s.residual);
    println!("side conditions:    {:.3e}", s.side_residual);
    println!(
        "native seminorm:    {:.6}",
        sys.native_seminorm(&s).expect("seminorm")
    );

    let probe =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(4000), 0).expect("probe");
    let sup = probe
        .points()
        .iter()
        .map(|x| (sys.eval_interpolant(&s, x).unwrap() - target.eval(manifold, x)).abs())
        .fold(0.0f64, f64::max);
    let quad = quadrature(manifold, 30).expect("quadrature");
    let l2 = quad
        .integrate(|x| {
            let d = sys.eval_interpolant(&s, x).unwrap() - target.eval(manifold, x);
            d * d
        })
        .sqrt();
    println!("sup error (probe):  {sup:.3e}");
    println!("L2 error (quad):    {l2:.3e}");
}
