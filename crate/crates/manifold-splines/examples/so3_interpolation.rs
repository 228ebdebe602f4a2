//! Interpolation on the rotation group SO(3): rotation-angle spline
//! kernel, bi-invariance, conditional positive definiteness, and the
//! Lebesgue constant on a random rotation set.
//!
//! Run with: cargo run --release --example so3_interpolation

use manifold_splines::analysis::lebesgue_constant;
use manifold_splines::basis::aux_space;
use manifold_splines::geometry::quat_to_matrix;
use manifold_splines::geometry::{
    generate_points, quat_mul, GenMethod, ManifoldId, Point, SizeSpec,
};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::{cpd_check, eval, preset};
use nalgebra::DVector;

fn main() {
    let manifold = ManifoldId::So3;
    let kernel = preset("so3-ss-m2").expect("preset");
    let aux = aux_space(manifold, kernel.m).expect("aux basis");
    let centers =
        generate_points(manifold, GenMethod::Random, SizeSpec::Count(250), 3).expect("centers");

    let cpd = cpd_check(&kernel, &centers, &aux, 100, 4).expect("cpd");
    println!(
        "CPD: min Rayleigh {:.4e}, min projected eigenvalue {:.4e}",
        cpd.min_rayleigh, cpd.min_eig_projected
    );

    // bi-invariance: k depends only on the rotation angle of x⁻¹y
    let g: [f64; 4] = {
        let set = generate_points(manifold, GenMethod::Random, SizeSpec::Count(1), 5).unwrap();
        set.point(0).coords().try_into().unwrap()
    };
    let (x, y) = (centers.point(0), centers.point(1));
    let gx = Point::new(manifold, &quat_mul(&g, &x.coords().try_into().unwrap())).unwrap();
    let gy = Point::new(manifold, &quat_mul(&g, &y.coords().try_into().unwrap())).unwrap();
    println!(
        "bi-invariance deviation under a random left translation: {:.3e}",
        (eval(&kernel, &gx, &gy).unwrap() - eval(&kernel, x, y).unwrap()).abs()
    );

    // a smooth function of the rotation itself (well-defined despite the
    // quaternion double cover): how far the rotation moves a fixed axis
    let target = |p: &Point| {
        let r = quat_to_matrix(&p.coords().try_into().unwrap());
        (r[0][0] + r[1][1] + r[2][2]).exp() / 10.0 + r[2][2]
    };
    let data = DVector::from_fn(centers.len(), |i, _| target(centers.point(i)));
    let sys = SaddleSystem::assemble(kernel, aux, centers).expect("assembly");
    let s = sys.solve_interpolant(&data).expect("solve");
    println!("center residual:   {:.3e}", s.residual);
    println!("side conditions:   {:.3e}", s.side_residual);

    let probe =
        generate_points(manifold, GenMethod::Random, SizeSpec::Count(2500), 6).expect("probe");
    let sup = probe
        .points()
        .iter()
        .map(|q| (sys.eval_interpolant(&s, q).unwrap() - target(q)).abs())
        .fold(0.0f64, f64::max);
    println!("sup error (probe): {sup:.3e}");
    let leb = lebesgue_constant(&sys, &probe).expect("scan");
    println!("Lebesgue constant: {:.4}", leb.lebesgue);
}
