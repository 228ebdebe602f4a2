//! Discrete L₂ projection onto the interpolation space, compared with
//! plain interpolation of the same target.
//!
//! Run with: cargo run --release --example l2_projection

use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{
    generate_points, quadrature, GenMethod, ManifoldId, Point, SizeSpec,
};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::preset;
use nalgebra::DVector;

fn main() {
    let manifold = ManifoldId::Sphere2;
    let kernel = preset("rss-s2-m2").expect("preset");
    let aux = aux_space(manifold, kernel.m).expect("aux basis");
    let centers =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(120), 0).expect("centers");
    let quad = quadrature(manifold, 30).expect("quadrature");
    let sys = SaddleSystem::assemble(kernel, aux, centers).expect("assembly");

    let f = |x: &Point| (4.0 * x.coords()[0]).sin() + 0.5 * x.coords()[2];
    let proj = sys.l2_project(&f, &quad).expect("projection");
    println!("Gram condition number: {:.3e}", proj.gram_condition);
    println!("L2 error of the projection: {:.4e}", proj.l2_error);

    let data = DVector::from_fn(sys.n_centers(), |i, _| f(sys.centers.point(i)));
    let s = sys.solve_interpolant(&data).expect("solve");
    let l2_interp = quad
        .integrate(|x| {
            let d = sys.eval_interpolant(&s, x).unwrap() - f(x);
            d * d
        })
        .sqrt();
    println!("L2 error of interpolation:  {l2_interp:.4e}");
    println!("(the projection is L2-optimal in the same space, so it can only be smaller)");
}
