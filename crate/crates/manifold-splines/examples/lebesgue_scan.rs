//! Lebesgue-constant scan: the sup of Σ|χ_ξ| stays bounded as the
//! center set refines, for quasi-uniform centers.
//!
//! Run with: cargo run --release --example lebesgue_scan

use manifold_splines::analysis::lebesgue_constant;
use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{generate_points, GenMethod, ManifoldId, SizeSpec};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::preset;

fn main() {
    let manifold = ManifoldId::Sphere2;
    println!("{:>6} {:>9} {:>9} {:>7} {:>9}", "N", "h", "q", "rho", "L");
    for n in [100usize, 200, 400, 800] {
        let kernel = preset("rss-s2-m2").expect("preset");
        let aux = aux_space(manifold, kernel.m).expect("aux basis");
        let centers = generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(n), 0)
            .expect("centers");
        let probe = generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(10 * n), 0)
            .expect("probe");
        let sys = SaddleSystem::assemble(kernel, aux, centers).expect("assembly");
        let rep = lebesgue_constant(&sys, &probe).expect("scan");
        println!(
            "{:>6} {:>9.4} {:>9.4} {:>7.2} {:>9.4}",
            rep.n, rep.h, rep.q, rep.rho, rep.lebesgue
        );
    }
}
