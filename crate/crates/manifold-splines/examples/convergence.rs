//! Convergence study: interpolation error against the mesh norm for a
//! smooth target, with the fitted rate (theory: h^{2m} = h⁴ here).
//!
//! Run with: cargo run --release --example convergence

use manifold_splines::analysis::convergence_study;
use manifold_splines::basis::aux_space;
use manifold_splines::geometry::{generate_points, quadrature, GenMethod, ManifoldId, SizeSpec};
use manifold_splines::kernels::preset;
use manifold_splines::targets::Target;

fn main() {
    let manifold = ManifoldId::Sphere2;
    let kernel = preset("rss-s2-m2").expect("preset");
    let aux = aux_space(manifold, kernel.m).expect("aux basis");
    let sets: Vec<_> = [50usize, 200, 800]
        .iter()
        .map(|n| {
            generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(*n), 0)
                .expect("centers")
        })
        .collect();
    let probe =
        generate_points(manifold, GenMethod::Fibonacci, SizeSpec::Count(8000), 0).expect("probe");
    let quad = quadrature(manifold, 30).expect("quadrature");
    let rep =
        convergence_study(&kernel, &aux, &Target::ExpDotU, &sets, &probe, &quad).expect("study");
    println!("target: {}", rep.target);
    println!(
        "{:>6} {:>9} {:>12} {:>12}",
        "N", "h", "sup error", "L2 error"
    );
    for row in &rep.rows {
        println!(
            "{:>6} {:>9.4} {:>12.3e} {:>12.3e}",
            row.n, row.h, row.sup_error, row.l2_error
        );
    }
    println!(
        "fitted exponents: sup {}, L2 {}",
        rep.sup_slope.map_or("n/a".into(), |s| format!("{s:.2}")),
        rep.l2_slope.map_or("n/a".into(), |s| format!("{s:.2}")),
    );
}
