//! Exponential decay of a Lagrange (cardinal) function: bin |χ_ξ| by
//! d(x, ξ)/h and fit exp(−ν̂·d/h) over the asymptotic window.
//!
//! Run with: cargo run --release --example lagrange_decay

use manifold_splines::analysis::decay_profile;
use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{generate_points, GenMethod, ManifoldId, SizeSpec};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::preset;

fn main() {
    let manifold = ManifoldId::Sphere2;
    let n = 400;
    let kernel = preset("rss-s2-m2").expect("preset");
    let aux = aux_space(manifold, kernel.m).expect("aux basis");
    let centers =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(n), 0).expect("centers");
    let probe =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(8000), 0).expect("probe");
    let sys = SaddleSystem::assemble(kernel, aux, centers).expect("assembly");

    // pick the center nearest the north pole so the probe surrounds it
    let xi = (0..n)
        .max_by(|a, b| {
            sys.centers.point(*a).coords()[2]
                .partial_cmp(&sys.centers.point(*b).coords()[2])
                .unwrap()
        })
        .unwrap();
    let rep = decay_profile(&sys, xi, &probe, 24, None).expect("profile");
    println!(
        "h = {:.4}, fit window = [{:.3}, {:.3}] rad",
        rep.h, rep.fit_window.0, rep.fit_window.1
    );
    println!(
        "nu_hat = {:.4}  (r^2 = {:.4}, bin floor = {:.2e})",
        rep.nu_hat, rep.r_squared, rep.bin_floor
    );
    println!("{:>10} {:>12} {:>7}", "d/h", "max|chi|", "count");
    for b in rep.bins.iter().filter(|b| b.count > 0) {
        println!("{:>10.2} {:>12.3e} {:>7}", b.midpoint, b.max_abs, b.count);
    }
}
