//! L_p stability of the Lagrange basis and a lower bound on the L_∞
//! operator norm of the discrete L₂ projector.
//!
//! Run with: cargo run --release --example stability

use manifold_splines::analysis::{projector_norm_estimate, stability_ratios};
use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{generate_points, quadrature, GenMethod, ManifoldId, SizeSpec};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::preset;

fn main() {
    let manifold = ManifoldId::Sphere2;
    let kernel = preset("rss-s2-m2").expect("preset");
    let aux = aux_space(manifold, kernel.m).expect("aux basis");
    let centers =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(150), 0).expect("centers");
    let probe =
        generate_points(manifold, GenMethod::Random, SizeSpec::Count(2000), 5).expect("probe");
    let quad = quadrature(manifold, 30).expect("quadrature");
    let sys = SaddleSystem::assemble(kernel, aux, centers).expect("assembly");

    println!(
        "{:>4} {:>12} {:>12} {:>7}",
        "p", "ratio low", "ratio high", "trials"
    );
    for p in [1.0, 2.0, f64::INFINITY] {
        let rep = stability_ratios(&sys, &quad, &probe, p, 100, 9).expect("ratios");
        println!(
            "{:>4} {:>12.4} {:>12.4} {:>7}",
            rep.p, rep.ratio_low, rep.ratio_high, rep.trials
        );
    }

    let norm = projector_norm_estimate(&sys, &quad, &probe, 20, 11).expect("estimate");
    println!("projector L_inf operator norm >= {norm:.4}");
}
