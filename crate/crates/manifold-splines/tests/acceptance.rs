//! End-to-end acceptance checks. Each test covers one numbered
//! criterion and prints a single PASS/FAIL line (visible with
//! `--nocapture`).

use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use manifold_splines::analysis::{convergence_study, decay_profile, lebesgue_constant};
use manifold_splines::basis::{aux_space, collocation_matrix, sphere2_harmonics};
use manifold_splines::cli;
use manifold_splines::geometry::{
    distance_unchecked, generate_points, mesh_stats, quadrature, quat_mul, tetrahedron, GenMethod,
    ManifoldId, Point, PointSet, SizeSpec,
};
use manifold_splines::interp::SaddleSystem;
use manifold_splines::kernels::{
    self, cpd_check, gram_matrix, polyharmonic_from_q, preset, spectral_match, KernelSpec,
};
use manifold_splines::targets::Target;

fn report(n: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {n:02} [{name}]: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} [{name}] failed: {detail}");
}

fn fib(n: usize) -> PointSet {
    generate_points(
        ManifoldId::Sphere2,
        GenMethod::Fibonacci,
        SizeSpec::Count(n),
        0,
    )
    .unwrap()
}

fn system(kernel: KernelSpec, centers: PointSet) -> SaddleSystem {
    let aux = aux_space(kernel.manifold, kernel.m).unwrap();
    SaddleSystem::assemble(kernel, aux, centers).unwrap()
}

fn random_data(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng))
}

#[test]
fn criterion_01_interpolation_exactness() {
    let t0 = Instant::now();
    let sys = system(preset("rss-s2-m2").unwrap(), fib(50));
    let s = sys.solve_interpolant(&random_data(50, 11)).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let ok = s.residual < 1e-8 && s.side_residual < 1e-8 && secs < 1.0;
    report(
        1,
        "interpolation exactness",
        ok,
        &format!(
            "residual {:.2e}, side {:.2e}, {:.3}s",
            s.residual, s.side_residual, secs
        ),
    );
}

#[test]
fn criterion_02_pi_j_reproduction() {
    let sys = system(preset("rss-s2-m2").unwrap(), fib(100));
    let target = Target::HarmonicMix;
    let data = DVector::from_fn(100, |i, _| {
        target.eval(ManifoldId::Sphere2, sys.centers.point(i))
    });
    let s = sys.solve_interpolant(&data).unwrap();
    let probe = fib(10_000);
    let sup = probe
        .points()
        .iter()
        .map(|x| (sys.eval_interpolant(&s, x).unwrap() - target.eval(ManifoldId::Sphere2, x)).abs())
        .fold(0.0f64, f64::max);
    let a_max = s.a.amax();
    let ok = sup < 1e-8 && a_max < 1e-8;
    report(
        2,
        "low-degree reproduction",
        ok,
        &format!("sup error {sup:.2e}, max |a| {a_max:.2e}"),
    );
}

#[test]
fn criterion_03_kernel_equivalence() {
    let centers = fib(80);
    let data = random_data(80, 3);
    let probe = fib(10_000);
    let base = system(preset("rss-s2-m2").unwrap(), centers.clone());
    let s0 = base.solve_interpolant(&data).unwrap();
    let reference: Vec<f64> = probe
        .points()
        .iter()
        .map(|x| base.eval_interpolant(&s0, x).unwrap())
        .collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let coeffs: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
        let kernel = preset("rss-s2-m2").unwrap().with_perturbation(coeffs);
        let sys = system(kernel, centers.clone());
        let s = sys.solve_interpolant(&data).unwrap();
        let dev = probe
            .points()
            .iter()
            .zip(&reference)
            .map(|(x, r)| (sys.eval_interpolant(&s, x).unwrap() - r).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(dev);
    }
    report(
        3,
        "kernel equivalence",
        worst < 1e-8,
        &format!("max interpolant deviation {worst:.2e} over 3 draws"),
    );
}

#[test]
fn criterion_04_spectral_consistency() {
    let t0 = Instant::now();
    let closed = preset("rss-s2-m2").unwrap();
    let spectral = KernelSpec::spectral_surface_spline(ManifoldId::Sphere2, 2, 500).unwrap();
    // coefficient oracle at ell = 2: 1/((l-1)l(l+1)(l+2)) = 1/24
    let c2 = kernels::spectral_coeff(&spectral, 2).unwrap();
    let coeff_ok = (c2 - 1.0 / 24.0).abs() < 1e-14;
    // grid in t in [-1, 1 - 1e-3] <=> omega in [arccos(1 - 1e-3), pi]
    let omega_min = (1.0f64 - 1e-3).acos();
    let fit = spectral_match(&closed, &spectral, 200, omega_min).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let ok = coeff_ok && fit.max_residual < 1e-5 && secs < 10.0;
    report(
        4,
        "spectral consistency",
        ok,
        &format!(
            "coeff(2) = {c2:.6e}, post-fit residual {:.2e}, C = {:.4}, {:.2}s",
            fit.max_residual, fit.c, secs
        ),
    );
}

#[test]
fn criterion_05_lebesgue_boundedness() {
    let t0 = Instant::now();
    let mut values = Vec::new();
    let mut detail = String::new();
    for n in [100usize, 400, 1600] {
        let sys = system(preset("rss-s2-m2").unwrap(), fib(n));
        let probe = fib(10 * n);
        let rep = lebesgue_constant(&sys, &probe).unwrap();
        write!(detail, "L({n}) = {:.3}; ", rep.lebesgue).unwrap();
        values.push(rep.lebesgue);
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(0.0f64, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    let ok = hi < 10.0 && hi <= 1.25 * lo && secs < 300.0;
    write!(detail, "spread {:.3}, {:.1}s", hi / lo, secs).unwrap();
    report(5, "Lebesgue boundedness", ok, &detail);
}

#[test]
fn criterion_06_exponential_decay() {
    let mut nus = Vec::new();
    let mut detail = String::new();
    for n in [400usize, 1600] {
        let sys = system(preset("rss-s2-m2").unwrap(), fib(n));
        let probe = fib(10 * n);
        // profile the Lagrange function of the center nearest the north
        // pole so the probe surrounds it isotropically
        let xi = (0..n)
            .min_by(|a, b| {
                let pa = sys.centers.point(*a).coords()[2];
                let pb = sys.centers.point(*b).coords()[2];
                pb.partial_cmp(&pa).unwrap()
            })
            .unwrap();
        let rep = decay_profile(&sys, xi, &probe, 28, Some(2.5)).unwrap();
        write!(
            detail,
            "N={n}: nu {:.3}, r2 {:.3}; ",
            rep.nu_hat, rep.r_squared
        )
        .unwrap();
        assert!(rep.nu_hat > 0.0 && rep.r_squared > 0.9, "{detail}");
        nus.push(rep.nu_hat);
    }
    let consistent = (nus[0] - nus[1]).abs() <= 0.3 * nus[0].min(nus[1]);
    write!(
        detail,
        "relative gap {:.3}",
        (nus[0] - nus[1]).abs() / nus[0].min(nus[1])
    )
    .unwrap();
    report(6, "exponential decay", consistent, &detail);
}

#[test]
fn criterion_07_convergence_rate() {
    let kernel = preset("rss-s2-m2").unwrap();
    let aux = aux_space(ManifoldId::Sphere2, 2).unwrap();
    let sets: Vec<PointSet> = [100usize, 400, 1600].iter().map(|n| fib(*n)).collect();
    let probe = fib(16_000);
    let quad = quadrature(ManifoldId::Sphere2, 40).unwrap();
    let rep = convergence_study(&kernel, &aux, &Target::ExpDotU, &sets, &probe, &quad).unwrap();
    let slope = rep.sup_slope.expect("errors above solver tolerance");
    let mut detail = String::new();
    for row in &rep.rows {
        write!(detail, "N={} sup {:.2e}; ", row.n, row.sup_error).unwrap();
    }
    write!(detail, "fitted exponent {slope:.2}").unwrap();
    report(7, "convergence rate", slope >= 3.5, &detail);
}

#[test]
fn criterion_08_so3_suite() {
    let kernel = preset("so3-ss-m2").unwrap();
    let centers =
        generate_points(ManifoldId::So3, GenMethod::Random, SizeSpec::Count(300), 21).unwrap();
    let sys = system(kernel.clone(), centers.clone());
    let s = sys.solve_interpolant(&random_data(300, 22)).unwrap();
    let exact = s.residual < 1e-8 && s.side_residual < 1e-8;

    // bi-invariance under left translation by 50 random rotations
    let gs = generate_points(ManifoldId::So3, GenMethod::Random, SizeSpec::Count(50), 23).unwrap();
    let pairs =
        generate_points(ManifoldId::So3, GenMethod::Random, SizeSpec::Count(100), 24).unwrap();
    let mut inv_dev = 0.0f64;
    for g in gs.points() {
        let gq: [f64; 4] = g.coords().try_into().unwrap();
        for xy in pairs.points().chunks(2) {
            let (x, y) = (&xy[0], &xy[1]);
            let xq: [f64; 4] = x.coords().try_into().unwrap();
            let yq: [f64; 4] = y.coords().try_into().unwrap();
            let gx = Point::new(ManifoldId::So3, &quat_mul(&gq, &xq)).unwrap();
            let gy = Point::new(ManifoldId::So3, &quat_mul(&gq, &yq)).unwrap();
            let d = (kernels::eval(&kernel, &gx, &gy).unwrap()
                - kernels::eval(&kernel, x, y).unwrap())
            .abs();
            inv_dev = inv_dev.max(d);
        }
    }

    let aux = aux_space(ManifoldId::So3, 2).unwrap();
    let cpd = cpd_check(&kernel, &centers, &aux, 200, 25).unwrap();

    let probe = generate_points(
        ManifoldId::So3,
        GenMethod::Random,
        SizeSpec::Count(3000),
        26,
    )
    .unwrap();
    let leb = lebesgue_constant(&sys, &probe).unwrap();

    let ok = exact && inv_dev < 1e-12 && cpd.min_rayleigh > 0.0 && leb.lebesgue < 10.0;
    report(
        8,
        "SO(3) suite",
        ok,
        &format!(
            "residual {:.2e}, bi-invariance {:.2e}, min Rayleigh {:.2e}, L = {:.3}",
            s.residual, inv_dev, cpd.min_rayleigh, leb.lebesgue
        ),
    );
}

/// Orthonormal null-space basis of Pᵀ from the eigendecomposition of
/// the orthogonal projector I − P(PᵀP)⁻¹Pᵀ — a route independent of the
/// library's Gram–Schmidt construction.
fn projector_null_basis(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    let q = p.ncols();
    let inv = (p.transpose() * p).try_inverse().unwrap();
    let proj = DMatrix::identity(n, n) - p * inv * p.transpose();
    let eig = nalgebra::SymmetricEigen::new(proj);
    let keep: Vec<usize> = (0..n).filter(|i| eig.eigenvalues[*i] > 0.5).collect();
    assert_eq!(keep.len(), n - q, "constraint matrix must have full rank");
    let mut z = DMatrix::zeros(n, keep.len());
    for (col, idx) in keep.iter().enumerate() {
        z.set_column(col, &eig.eigenvectors.column(*idx));
    }
    z
}

#[test]
fn criterion_09_cpd_property() {
    let specs: Vec<(String, KernelSpec, ManifoldId)> = vec![
        (
            "rss-s2-m2".into(),
            preset("rss-s2-m2").unwrap(),
            ManifoldId::Sphere2,
        ),
        (
            "so3-ss-m2".into(),
            preset("so3-ss-m2").unwrap(),
            ManifoldId::So3,
        ),
        (
            "inverse-q (1+l)^2".into(),
            polyharmonic_from_q(ManifoldId::Sphere2, &[1.0, 2.0, 1.0], 1, 200).unwrap(),
            ManifoldId::Sphere2,
        ),
    ];
    let mut detail = String::new();
    let mut ok = true;
    for (name, spec, manifold) in &specs {
        let pts = generate_points(*manifold, GenMethod::Random, SizeSpec::Count(20), 31).unwrap();
        let aux = aux_space(*manifold, spec.m).unwrap();
        let rep = cpd_check(spec, &pts, &aux, 200, 32).unwrap();
        // independent route: SVD null basis of the constraints
        let k = gram_matrix(spec, &pts).unwrap();
        let z = projector_null_basis(&collocation_matrix(&aux, &pts));
        let projected = z.transpose() * &k * &z;
        let eig = nalgebra::SymmetricEigen::new(projected);
        let min_eig = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let agree = (rep.min_eig_projected - min_eig).abs() < 1e-8;
        let positive = rep.min_rayleigh > 0.0 && rep.min_rayleigh >= min_eig - 1e-10;
        ok &= agree && positive;
        write!(
            detail,
            "{name}: min eig {:.3e} (dual route {:.3e}), min Rayleigh {:.3e}; ",
            rep.min_eig_projected, min_eig, rep.min_rayleigh
        )
        .unwrap();
    }
    report(9, "conditional positive definiteness", ok, &detail);
}

#[test]
fn criterion_10_geometry_oracles() {
    let tet = tetrahedron();
    // exact separation: arccos(-1/3), against brute force
    let q_oracle = (-1.0f64 / 3.0).acos();
    let mut q_brute = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            q_brute = q_brute.min(distance_unchecked(
                ManifoldId::Sphere2,
                tet.point(i),
                tet.point(j),
            ));
        }
    }
    let q_ok = (q_brute - q_oracle).abs() < 1e-14;

    let probe = fib(4000);
    let finer = fib(16_000);
    let probe_h = mesh_stats(&probe, &finer).unwrap().h;
    let stats = mesh_stats(&tet, &probe).unwrap();
    let h_oracle = (1.0f64 / 3.0).acos();
    let h_ok = (stats.h - h_oracle).abs() <= 2.0 * probe_h;

    // quadrature orthonormality of the harmonics through degree 10
    let quad = quadrature(ManifoldId::Sphere2, 24).unwrap();
    let dim = 121;
    let mut gram: DMatrix<f64> = DMatrix::zeros(dim, dim);
    for (node, w) in quad.nodes.iter().zip(&quad.weights) {
        let y = DVector::from_vec(sphere2_harmonics(10, node));
        gram += *w * &y * y.transpose();
    }
    let mut ortho_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho_dev = ortho_dev.max((gram[(i, j)] - target).abs());
        }
    }
    let ortho_ok = ortho_dev < 1e-10;

    report(
        10,
        "geometry oracles",
        q_ok && h_ok && ortho_ok,
        &format!(
            "q dev {:.1e}, h {:.4} vs {:.4} (tol {:.4}), orthonormality dev {:.1e}",
            (q_brute - q_oracle).abs(),
            stats.h,
            h_oracle,
            2.0 * probe_h,
            ortho_dev
        ),
    );
}

#[test]
fn criterion_11_seminorm_monotonicity() {
    let mut detail = String::new();
    let mut ok = true;
    for trial in 0..10u64 {
        let manifold = if trial % 2 == 0 {
            ManifoldId::Sphere2
        } else {
            ManifoldId::So3
        };
        let kernel = match manifold {
            ManifoldId::Sphere2 => preset("rss-s2-m2").unwrap(),
            _ => preset("so3-ss-m2").unwrap(),
        };
        let inner = generate_points(
            manifold,
            GenMethod::Random,
            SizeSpec::Count(30),
            100 + trial,
        )
        .unwrap();
        let extra = generate_points(
            manifold,
            GenMethod::Random,
            SizeSpec::Count(30),
            200 + trial,
        )
        .unwrap();
        let outer = inner.union(&extra).unwrap();
        let target = Target::ExpDotU;
        let seminorm = |set: &PointSet| -> f64 {
            let sys = system(kernel.clone(), set.clone());
            let data = DVector::from_fn(set.len(), |i, _| target.eval(manifold, set.point(i)));
            let s = sys.solve_interpolant(&data).unwrap();
            sys.native_seminorm(&s).unwrap()
        };
        let (inner_norm, outer_norm) = (seminorm(&inner), seminorm(&outer));
        ok &= inner_norm <= outer_norm + 1e-8;
        if trial < 2 {
            write!(
                detail,
                "trial {trial}: {inner_norm:.4} <= {outer_norm:.4}; "
            )
            .unwrap();
        }
    }
    write!(detail, "10 nested instances").unwrap();
    report(11, "native-seminorm monotonicity", ok, &detail);
}

#[test]
fn criterion_12_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let pts = path("pts.csv");
    let commands: Vec<Vec<String>> = vec![
        vec![
            "gen-points",
            "--manifold",
            "sphere2",
            "--method",
            "fibonacci",
            "--n",
            "60",
            "--out",
            &pts,
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        [
            "interpolate",
            "--points",
            &pts,
            "--kernel",
            "rss-s2-m2",
            "--target",
            "exp-dot-u",
            "--quad-level",
            "12",
            "--out",
            &path("interp.json"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        [
            "lebesgue",
            "--points",
            &pts,
            "--kernel",
            "rss-s2-m2",
            "--probe-factor",
            "5",
            "--out",
            &path("leb"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        [
            "decay",
            "--points",
            &pts,
            "--kernel",
            "rss-s2-m2",
            "--probe-factor",
            "10",
            "--bins",
            "16",
            "--out",
            &path("decay"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        [
            "converge",
            "--manifold",
            "sphere2",
            "--method",
            "fibonacci",
            "--ns",
            "40,80",
            "--kernel",
            "rss-s2-m2",
            "--target",
            "exp-dot-u",
            "--quad-level",
            "12",
            "--probe-factor",
            "5",
            "--out",
            &path("conv"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        [
            "stability",
            "--points",
            &pts,
            "--kernel",
            "rss-s2-m2",
            "--p",
            "2",
            "--trials",
            "20",
            "--quad-level",
            "12",
            "--probe-factor",
            "3",
            "--out",
            &path("stab"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        [
            "kernel-check",
            "--kernel",
            "rss-s1-m2",
            "--lmax",
            "300",
            "--grid",
            "64",
            "--out",
            &path("check.json"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    ];

    let run_all = |commands: &[Vec<String>]| {
        for cmd in commands {
            let mut argv = vec!["manifold-splines".to_string()];
            argv.extend(cmd.iter().cloned());
            assert_eq!(cli::run(argv), 0, "command failed: {cmd:?}");
        }
    };
    let snapshot = |dir: &std::path::Path| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    run_all(&commands);
    let first = snapshot(dir.path());
    run_all(&commands);
    let second = snapshot(dir.path());
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    let ok = first == second && first.len() >= 11;
    report(
        12,
        "CLI determinism",
        ok,
        &format!(
            "{} files byte-identical across reruns: {names:?}",
            first.len()
        ),
    );
}
