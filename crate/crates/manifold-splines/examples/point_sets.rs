//! Point-set generation and mesh statistics on all three manifolds.
//!
//! Run with: cargo run --release --example point_sets

use manifold_splines::geometry::{generate_points, mesh_stats, GenMethod, ManifoldId, SizeSpec};

fn main() {
    for (manifold, method, size) in [
        (
            ManifoldId::Sphere2,
            GenMethod::Fibonacci,
            SizeSpec::Count(400),
        ),
        (
            ManifoldId::Sphere2,
            GenMethod::GreedyNet,
            SizeSpec::Epsilon(0.25),
        ),
        (ManifoldId::Sphere1, GenMethod::Random, SizeSpec::Count(100)),
        (ManifoldId::So3, GenMethod::Random, SizeSpec::Count(300)),
        (
            ManifoldId::So3,
            GenMethod::GreedyNet,
            SizeSpec::Epsilon(0.8),
        ),
    ] {
        let set = generate_points(manifold, method, size, 0).expect("generation");
        // a denser probe set of the same family estimates the fill distance
        let probe = generate_points(
            manifold,
            match method {
                GenMethod::Fibonacci => GenMethod::Fibonacci,
                _ => GenMethod::Random,
            },
            SizeSpec::Count(20 * set.len()),
            1,
        )
        .expect("probe");
        let stats = mesh_stats(&set, &probe).expect("stats");
        println!(
            "{:8} {:10?} N = {:4}  h = {:.4}  q = {:.4}  rho = {:.2}",
            manifold.name(),
            method,
            set.len(),
            stats.h,
            stats.q,
            stats.rho
        );
    }
}
