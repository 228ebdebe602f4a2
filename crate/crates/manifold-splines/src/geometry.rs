//! Manifold primitives: points, geodesic distance, point-set generation,
//! mesh statistics and quadrature rules.
//!
//! Supported manifolds are the circle S¹ and sphere S² (points stored as
//! ambient unit vectors) and the rotation group SO(3) (points stored as
//! unit quaternions `(w, x, y, z)`, canonicalized so that the first
//! nonzero component is positive).

use std::fmt;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Golden-ratio increment used by the spherical Fibonacci lattice.
const GOLDEN_ANGLE: f64 = 2.399963229728653; // 2π(1 − 1/φ)

/// Identifier of a supported manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManifoldId {
    /// The circle S¹, unit vectors in R².
    #[serde(rename = "sphere1")]
    Sphere1,
    /// The sphere S², unit vectors in R³.
    #[serde(rename = "sphere2")]
    Sphere2,
    /// The rotation group SO(3), unit quaternions in R⁴ (double cover).
    #[serde(rename = "so3")]
    So3,
}

impl ManifoldId {
    /// Intrinsic dimension d.
    pub fn dim(self) -> usize {
        match self {
            ManifoldId::Sphere1 => 1,
            ManifoldId::Sphere2 => 2,
            ManifoldId::So3 => 3,
        }
    }

    /// Number of ambient coordinates a point carries.
    pub fn ambient_dim(self) -> usize {
        match self {
            ManifoldId::Sphere1 => 2,
            ManifoldId::Sphere2 => 3,
            ManifoldId::So3 => 4,
        }
    }

    /// Geodesic diameter.
    pub fn diameter(self) -> f64 {
        std::f64::consts::PI
    }

    /// Total invariant measure: 2π for S¹, 4π for S², 8π² for SO(3).
    pub fn total_measure(self) -> f64 {
        use std::f64::consts::PI;
        match self {
            ManifoldId::Sphere1 => 2.0 * PI,
            ManifoldId::Sphere2 => 4.0 * PI,
            ManifoldId::So3 => 8.0 * PI * PI,
        }
    }

    /// Measure of a geodesic ball of radius `r`.
    pub fn ball_measure(self, r: f64) -> f64 {
        use std::f64::consts::PI;
        let r = r.clamp(0.0, PI);
        match self {
            ManifoldId::Sphere1 => 2.0 * r,
            ManifoldId::Sphere2 => 2.0 * PI * (1.0 - r.cos()),
            // Haar mass of {ω(g) ≤ r} under total mass 8π².
            ManifoldId::So3 => 8.0 * PI * (r - r.sin()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ManifoldId::Sphere1 => "sphere1",
            ManifoldId::Sphere2 => "sphere2",
            ManifoldId::So3 => "so3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sphere1" | "s1" => Ok(ManifoldId::Sphere1),
            "sphere2" | "s2" => Ok(ManifoldId::Sphere2),
            "so3" => Ok(ManifoldId::So3),
            other => Err(Error::InvalidInput(format!("unknown manifold `{other}`"))),
        }
    }
}

impl fmt::Display for ManifoldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point on a supported manifold, stored as its ambient unit vector.
///
/// At most four coordinates are ever needed, so the storage is inline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [f64; 4],
    len: usize,
}

impl Point {
    /// Builds a point from raw coordinates, renormalizing small rounding
    /// (norm within 1e-9 of 1). Coordinates further from the unit sphere
    /// are rejected. SO(3) quaternions are canonicalized to have their
    /// first nonzero component positive.
    pub fn new(manifold: ManifoldId, coords: &[f64]) -> Result<Self> {
        let n = manifold.ambient_dim();
        if coords.len() != n {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, manifold {} needs {}",
                coords.len(),
                manifold,
                n
            )));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "coordinate norm {norm} too far from 1"
            )));
        }
        let mut c = [0.0; 4];
        for (dst, src) in c.iter_mut().zip(coords) {
            *dst = src / norm;
        }
        if manifold == ManifoldId::So3 {
            if let Some(first) = c.iter().find(|v| **v != 0.0) {
                if *first < 0.0 {
                    for v in c.iter_mut() {
                        *v = -*v;
                    }
                }
            }
        }
        Ok(Point { coords: c, len: n })
    }

    /// Ambient coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.len]
    }

    /// Euclidean dot product of the ambient coordinates.
    pub fn dot(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Geodesic distance in radians.
///
/// On spheres this is `arccos(x·y)`; on SO(3) it is the rotation angle
/// of q⁻¹p, i.e. `2·arccos(|⟨p,q⟩|) ∈ [0, π]`.
pub fn distance(manifold: ManifoldId, p: &Point, q: &Point) -> Result<f64> {
    let n = manifold.ambient_dim();
    if p.len != n || q.len != n {
        return Err(Error::InvalidInput(format!(
            "point dimension does not match manifold {manifold}"
        )));
    }
    Ok(distance_unchecked(manifold, p, q))
}

/// [`distance`] without the dimension check, for inner loops.
#[inline]
pub fn distance_unchecked(manifold: ManifoldId, p: &Point, q: &Point) -> f64 {
    let d = p.dot(q);
    match manifold {
        ManifoldId::Sphere1 | ManifoldId::Sphere2 => d.clamp(-1.0, 1.0).acos(),
        ManifoldId::So3 => 2.0 * d.abs().clamp(0.0, 1.0).acos(),
    }
}

/// Mesh statistics of a center set: fill distance h, separation q and
/// mesh ratio ρ = h/q.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeshStats {
    /// Mesh norm (fill distance), radians.
    pub h: f64,
    /// Separation distance, radians.
    pub q: f64,
    /// Mesh ratio h/q.
    pub rho: f64,
}

/// A finite center set on one manifold.
#[derive(Clone, Debug)]
pub struct PointSet {
    pub manifold: ManifoldId,
    points: Vec<Point>,
    pub stats: Option<MeshStats>,
}

impl PointSet {
    /// Builds a set, rejecting points closer than 1e-12 geodesically.
    pub fn new(manifold: ManifoldId, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            if p.len != manifold.ambient_dim() {
                return Err(Error::InvalidInput(
                    "point dimension does not match manifold".into(),
                ));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if distance_unchecked(manifold, &points[i], &points[j]) < 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "duplicate points at indices {i} and {j}"
                    )));
                }
            }
        }
        Ok(PointSet {
            manifold,
            points,
            stats: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Concatenation with another set on the same manifold (duplicates
    /// rejected as in [`PointSet::new`]).
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if self.manifold != other.manifold {
            return Err(Error::InvalidInput("manifold mismatch in union".into()));
        }
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PointSet::new(self.manifold, pts)
    }
}

/// Point-set generation method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMethod {
    /// Spherical Fibonacci lattice (S² only), deterministic.
    Fibonacci,
    /// Seeded i.i.d. uniform points (Haar-uniform quaternions on SO(3)).
    Random,
    /// Greedy farthest-point ε-net: fill distance ≤ ε, separation ≥ ε/2.
    GreedyNet,
}

impl GenMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fibonacci" => Ok(GenMethod::Fibonacci),
            "random" => Ok(GenMethod::Random),
            "greedy_net" | "greedy-net" => Ok(GenMethod::GreedyNet),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

/// Size request for [`generate_points`]: a point count or a covering
/// radius (greedy net only).
#[derive(Clone, Copy, Debug)]
pub enum SizeSpec {
    Count(usize),
    Epsilon(f64),
}

fn fibonacci_sphere(n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = GOLDEN_ANGLE * i as f64;
            Point::new(ManifoldId::Sphere2, &[r * phi.cos(), r * phi.sin(), z])
                .expect("lattice point is unit")
        })
        .collect()
}

fn random_point(manifold: ManifoldId, rng: &mut ChaCha8Rng) -> Point {
    match manifold {
        ManifoldId::Sphere1 => {
            let t: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            Point::new(manifold, &[t.cos(), t.sin()]).unwrap()
        }
        ManifoldId::Sphere2 => {
            let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
            let phi: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            let r = (1.0 - z * z).max(0.0).sqrt();
            Point::new(manifold, &[r * phi.cos(), r * phi.sin(), z]).unwrap()
        }
        ManifoldId::So3 => {
            // A normalized Gaussian 4-vector is uniform on S³, hence
            // Haar-uniform on SO(3) through the double cover.
            loop {
                let v: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    let unit: Vec<f64> = v.iter().map(|c| c / norm).collect();
                    return Point::new(manifold, &unit).unwrap();
                }
            }
        }
    }
}

fn random_points(manifold: ManifoldId, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = random_point(manifold, &mut rng);
        // keep the set non-degenerate for PointSet construction
        if pts
            .iter()
            .all(|q| distance_unchecked(manifold, &p, q) >= 1e-12)
        {
            pts.push(p);
        }
    }
    pts
}

fn greedy_net(manifold: ManifoldId, epsilon: f64, seed: u64) -> Result<Vec<Point>> {
    if !(epsilon > 0.0 && epsilon < manifold.diameter()) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside (0, diameter)"
        )));
    }
    // Candidate pool: 50x the expected net size, from a fixed generator
    // family per manifold.
    let expected = (manifold.total_measure() / manifold.ball_measure(epsilon)).ceil() as usize;
    let pool_n = (50 * expected.max(1)).clamp(1000, 400_000);
    let pool = match manifold {
        ManifoldId::Sphere2 => fibonacci_sphere(pool_n),
        _ => random_points(manifold, pool_n, seed),
    };

    let mut selected: Vec<usize> = vec![0];
    let mut min_dist: Vec<f64> = pool
        .iter()
        .map(|p| distance_unchecked(manifold, p, &pool[0]))
        .collect();
    loop {
        let (far_idx, far_dist) =
            min_dist
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, &d)| {
                        if d > acc.1 {
                            (i, d)
                        } else {
                            acc
                        }
                    },
                );
        if far_dist < epsilon {
            break;
        }
        selected.push(far_idx);
        let new_pt = pool[far_idx];
        for (d, p) in min_dist.iter_mut().zip(&pool) {
            let nd = distance_unchecked(manifold, p, &new_pt);
            if nd < *d {
                *d = nd;
            }
        }
    }
    Ok(selected.into_iter().map(|i| pool[i]).collect())
}

/// Generates a point set.
///
/// `fibonacci` is S²-only; `random` draws seeded i.i.d. uniform points;
/// `greedy_net` runs farthest-point insertion over a dense candidate
/// pool until the pool is covered at radius ε, which yields fill
/// distance ≤ ε and separation ≥ ε/2.
pub fn generate_points(
    manifold: ManifoldId,
    method: GenMethod,
    size: SizeSpec,
    seed: u64,
) -> Result<PointSet> {
    let points = match (method, size) {
        (GenMethod::Fibonacci, SizeSpec::Count(n)) => {
            if manifold != ManifoldId::Sphere2 {
                return Err(Error::InvalidInput(format!(
                    "fibonacci lattice is only defined on sphere2, not {manifold}"
                )));
            }
            if n == 0 {
                return Err(Error::InvalidInput("point count must be positive".into()));
            }
            fibonacci_sphere(n)
        }
        (GenMethod::Random, SizeSpec::Count(n)) => {
            if n == 0 {
                return Err(Error::InvalidInput("point count must be positive".into()));
            }
            random_points(manifold, n, seed)
        }
        (GenMethod::GreedyNet, SizeSpec::Epsilon(eps)) => greedy_net(manifold, eps, seed)?,
        (GenMethod::GreedyNet, SizeSpec::Count(_)) => {
            return Err(Error::InvalidInput(
                "greedy_net takes --epsilon, not a point count".into(),
            ))
        }
        (_, SizeSpec::Epsilon(_)) => {
            return Err(Error::InvalidInput(
                "only greedy_net takes --epsilon".into(),
            ))
        }
    };
    PointSet::new(manifold, points)
}

/// Measures h, q and ρ of `pts` against a dense `probe` set.
///
/// q is the exact pairwise minimum; h is the maximum over probe points
/// of the distance to the nearest center, so it underestimates the true
/// fill distance by at most the probe's own mesh norm.
pub fn mesh_stats(pts: &PointSet, probe: &PointSet) -> Result<MeshStats> {
    if pts.len() < 2 {
        return Err(Error::InvalidInput(
            "mesh statistics need at least 2 points".into(),
        ));
    }
    if pts.manifold != probe.manifold {
        return Err(Error::InvalidInput("probe manifold mismatch".into()));
    }
    let m = pts.manifold;
    let q = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut row_min = f64::INFINITY;
            for j in (i + 1)..pts.len() {
                row_min = row_min.min(distance_unchecked(m, pts.point(i), pts.point(j)));
            }
            row_min
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let h = probe
        .points()
        .par_iter()
        .map(|x| {
            pts.points()
                .iter()
                .map(|c| distance_unchecked(m, x, c))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(MeshStats { h, q, rho: h / q })
}

/// A quadrature rule on a manifold: nodes and positive weights summing
/// to the total invariant measure.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub manifold: ManifoldId,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Integrates `f` over the manifold.
    pub fn integrate(&self, mut f: impl FnMut(&Point) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }

    /// Discrete L_p norm, p finite.
    pub fn lp_norm(&self, p: f64, mut f: impl FnMut(&Point) -> f64) -> f64 {
        self.integrate(|x| f(x).abs().powf(p)).powf(1.0 / p)
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn quat_from_axis_z(angle: f64) -> [f64; 4] {
    [(angle / 2.0).cos(), 0.0, 0.0, (angle / 2.0).sin()]
}

fn quat_from_axis_y(angle: f64) -> [f64; 4] {
    [(angle / 2.0).cos(), 0.0, (angle / 2.0).sin(), 0.0]
}

/// Hamilton product of two quaternions `(w, x, y, z)`.
pub fn quat_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// Rotates a 3-vector by the unit quaternion `q`.
pub fn rotate_vec3(q: &[f64; 4], v: &[f64; 3]) -> [f64; 3] {
    let qv = [0.0, v[0], v[1], v[2]];
    let qc = [q[0], -q[1], -q[2], -q[3]];
    let r = quat_mul(&quat_mul(q, &qv), &qc);
    [r[1], r[2], r[3]]
}

/// Rotation-matrix entries R[i][j] of the unit quaternion `q`.
pub fn quat_to_matrix(q: &[f64; 4]) -> [[f64; 3]; 3] {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Builds a product quadrature rule at the given `level`.
///
/// - S¹: 2·level equally weighted uniform nodes.
/// - S²: Gauss–Legendre in cos θ (level nodes) × uniform in φ
///   (2·level nodes); exact for spherical harmonics of degree
///   ≤ 2·level − 1.
/// - SO(3): ZYZ Euler-angle product rule, Gauss–Legendre in cos β ×
///   uniform in α and γ, total mass 8π².
pub fn quadrature(manifold: ManifoldId, level: usize) -> Result<QuadratureRule> {
    if level < 1 {
        return Err(Error::InvalidInput("quadrature level must be >= 1".into()));
    }
    use std::f64::consts::PI;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match manifold {
        ManifoldId::Sphere1 => {
            let n = 2 * level;
            for k in 0..n {
                let t = 2.0 * PI * k as f64 / n as f64;
                nodes.push(Point::new(manifold, &[t.cos(), t.sin()])?);
                weights.push(2.0 * PI / n as f64);
            }
        }
        ManifoldId::Sphere2 => {
            let (gx, gw) = gauss_legendre(level);
            let nphi = 2 * level;
            for (z, wz) in gx.iter().zip(&gw) {
                let r = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..nphi {
                    let phi = 2.0 * PI * j as f64 / nphi as f64;
                    nodes.push(Point::new(manifold, &[r * phi.cos(), r * phi.sin(), *z])?);
                    weights.push(wz * 2.0 * PI / nphi as f64);
                }
            }
        }
        ManifoldId::So3 => {
            let (gx, gw) = gauss_legendre(level);
            let nang = 2 * level;
            for (cb, wb) in gx.iter().zip(&gw) {
                let beta = cb.clamp(-1.0, 1.0).acos();
                let qb = quat_from_axis_y(beta);
                for a in 0..nang {
                    let alpha = 2.0 * PI * a as f64 / nang as f64;
                    let qa = quat_from_axis_z(alpha);
                    let qab = quat_mul(&qa, &qb);
                    for g in 0..nang {
                        let gamma = 2.0 * PI * g as f64 / nang as f64;
                        let qg = quat_from_axis_z(gamma);
                        let q = quat_mul(&qab, &qg);
                        nodes.push(Point::new(manifold, &q)?);
                        weights.push(wb * (2.0 * PI / nang as f64).powi(2));
                    }
                }
            }
        }
    }
    Ok(QuadratureRule {
        manifold,
        nodes,
        weights,
    })
}

/// Writes a point set in the CSV format: a `# manifold=<name>` header,
/// then one comma-separated row of ambient coordinates per point with
/// 17 significant digits.
pub fn write_point_set_csv<W: Write>(pts: &PointSet, out: &mut W) -> Result<()> {
    writeln!(out, "# manifold={}", pts.manifold.name())?;
    for p in pts.points() {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes a point set to a file (via a temporary file renamed on success).
pub fn save_point_set(pts: &PointSet, path: &Path) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        write_point_set_csv(pts, &mut w)?;
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads the point-set CSV format.
pub fn read_point_set_csv<R: BufRead>(reader: R) -> Result<PointSet> {
    let mut manifold: Option<ManifoldId> = None;
    let mut points = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(name) = rest.strip_prefix("manifold=") {
                manifold = Some(ManifoldId::parse(name.trim())?);
            }
            continue;
        }
        let m = manifold.ok_or_else(|| {
            Error::InvalidInput("point CSV is missing the `# manifold=` header".into())
        })?;
        let coords: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad float `{tok}`: {e}")))
            })
            .collect::<Result<_>>()?;
        points.push(Point::new(m, &coords)?);
    }
    let m = manifold.ok_or_else(|| Error::InvalidInput("empty point CSV".into()))?;
    PointSet::new(m, points)
}

/// Reads a point set from a file path.
pub fn load_point_set(path: &Path) -> Result<PointSet> {
    let file = std::fs::File::open(path)?;
    read_point_set_csv(std::io::BufReader::new(file))
}

/// Vertices of a regular tetrahedron inscribed in S².
pub fn tetrahedron() -> PointSet {
    let s = 1.0 / 3.0f64.sqrt();
    let pts = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
        .iter()
        .map(|c| Point::new(ManifoldId::Sphere2, c).unwrap())
        .collect();
    PointSet::new(ManifoldId::Sphere2, pts).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn p2(c: [f64; 3]) -> Point {
        Point::new(ManifoldId::Sphere2, &c).unwrap()
    }

    #[test]
    fn distance_identity_and_antipodal() {
        let a = p2([0.0, 0.0, 1.0]);
        let b = p2([0.0, 0.0, -1.0]);
        assert_eq!(distance(ManifoldId::Sphere2, &a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(distance(ManifoldId::Sphere2, &a, &b).unwrap(), PI);
    }

    #[test]
    fn so3_half_turn_distance() {
        let id = Point::new(ManifoldId::So3, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let zpi = Point::new(ManifoldId::So3, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(distance(ManifoldId::So3, &id, &zpi).unwrap(), PI);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let a = p2([0.0, 0.0, 1.0]);
        let b = Point::new(ManifoldId::Sphere1, &[1.0, 0.0]).unwrap();
        assert!(distance(ManifoldId::Sphere2, &a, &b).is_err());
    }

    #[test]
    fn point_renormalization_policy() {
        assert!(Point::new(ManifoldId::Sphere2, &[0.0, 0.0, 1.0 + 5e-10]).is_ok());
        assert!(Point::new(ManifoldId::Sphere2, &[0.0, 0.0, 1.1]).is_err());
    }

    #[test]
    fn fibonacci_is_deterministic() {
        let a = generate_points(
            ManifoldId::Sphere2,
            GenMethod::Fibonacci,
            SizeSpec::Count(100),
            0,
        )
        .unwrap();
        let b = generate_points(
            ManifoldId::Sphere2,
            GenMethod::Fibonacci,
            SizeSpec::Count(100),
            5,
        )
        .unwrap();
        assert_eq!(a.len(), 100);
        for (x, y) in a.points().iter().zip(b.points()) {
            assert_eq!(x.coords(), y.coords());
        }
    }

    #[test]
    fn fibonacci_rejected_off_sphere2() {
        assert!(generate_points(
            ManifoldId::So3,
            GenMethod::Fibonacci,
            SizeSpec::Count(10),
            0
        )
        .is_err());
    }

    #[test]
    fn seeded_random_reproducible() {
        let a =
            generate_points(ManifoldId::So3, GenMethod::Random, SizeSpec::Count(50), 7).unwrap();
        let b =
            generate_points(ManifoldId::So3, GenMethod::Random, SizeSpec::Count(50), 7).unwrap();
        assert_eq!(a.len(), 50);
        for (x, y) in a.points().iter().zip(b.points()) {
            assert_eq!(x.coords(), y.coords());
        }
    }

    #[test]
    fn greedy_net_meets_covering_guarantees() {
        let eps = 0.5;
        let net = generate_points(
            ManifoldId::Sphere2,
            GenMethod::GreedyNet,
            SizeSpec::Epsilon(eps),
            0,
        )
        .unwrap();
        let probe = generate_points(
            ManifoldId::Sphere2,
            GenMethod::Fibonacci,
            SizeSpec::Count(20 * net.len()),
            0,
        )
        .unwrap();
        let stats = mesh_stats(&net, &probe).unwrap();
        assert!(stats.q >= eps / 2.0, "q = {} < eps/2", stats.q);
        assert!(stats.h <= eps, "h = {} > eps", stats.h);
    }

    #[test]
    fn tetrahedron_mesh_stats_oracle() {
        // q from exact pairwise distances; h from a dense-grid sup oracle.
        let tet = tetrahedron();
        let probe = generate_points(
            ManifoldId::Sphere2,
            GenMethod::Fibonacci,
            SizeSpec::Count(100_000),
            0,
        )
        .unwrap();
        let stats = mesh_stats(&tet, &probe).unwrap();
        let q_exact = (-1.0f64 / 3.0).acos();
        let h_exact = (1.0f64 / 3.0).acos();
        assert_abs_diff_eq!(stats.q, q_exact, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.h, h_exact, epsilon = 1e-2);
        assert!(stats.h <= h_exact + 1e-12);
    }

    #[test]
    fn two_antipodal_points_stats() {
        let pts = PointSet::new(
            ManifoldId::Sphere2,
            vec![p2([0.0, 0.0, 1.0]), p2([0.0, 0.0, -1.0])],
        )
        .unwrap();
        let probe = generate_points(
            ManifoldId::Sphere2,
            GenMethod::Fibonacci,
            SizeSpec::Count(50_000),
            0,
        )
        .unwrap();
        let stats = mesh_stats(&pts, &probe).unwrap();
        assert_abs_diff_eq!(stats.q, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.h, PI / 2.0, epsilon = 1e-2);
    }

    #[test]
    fn mesh_stats_needs_two_points() {
        let pts = PointSet::new(ManifoldId::Sphere2, vec![p2([0.0, 0.0, 1.0])]).unwrap();
        let probe = tetrahedron();
        assert!(mesh_stats(&pts, &probe).is_err());
    }

    #[test]
    fn quadrature_total_mass() {
        let q1 = quadrature(ManifoldId::Sphere1, 8).unwrap();
        let q2 = quadrature(ManifoldId::Sphere2, 8).unwrap();
        let q3 = quadrature(ManifoldId::So3, 8).unwrap();
        assert_abs_diff_eq!(q1.weights.iter().sum::<f64>(), 2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(q2.weights.iter().sum::<f64>(), 4.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(
            q3.weights.iter().sum::<f64>(),
            8.0 * PI * PI,
            epsilon = 1e-10
        );
    }

    #[test]
    fn gauss_legendre_degree_exactness() {
        let (x, w) = gauss_legendre(5);
        // exact for polynomials up to degree 9
        for k in 0..=9usize {
            let num: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(k as i32))
                .sum();
            let exact = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn distance_metric_properties() {
        for manifold in [ManifoldId::Sphere1, ManifoldId::Sphere2, ManifoldId::So3] {
            let pts = random_points(manifold, 30, 11);
            for t in 0..1000 {
                let a = &pts[t % 30];
                let b = &pts[(t * 7 + 1) % 30];
                let c = &pts[(t * 13 + 2) % 30];
                let dab = distance_unchecked(manifold, a, b);
                let dba = distance_unchecked(manifold, b, a);
                assert!((dab - dba).abs() < 1e-14);
                let dac = distance_unchecked(manifold, a, c);
                let dcb = distance_unchecked(manifold, c, b);
                assert!(dab <= dac + dcb + 1e-12);
            }
        }
    }

    #[test]
    fn distance_isometry_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_point(ManifoldId::So3, &mut rng);
            let gq: [f64; 4] = g.coords().try_into().unwrap();
            let a = random_point(ManifoldId::Sphere2, &mut rng);
            let b = random_point(ManifoldId::Sphere2, &mut rng);
            let ra = rotate_vec3(&gq, a.coords().try_into().unwrap());
            let rb = rotate_vec3(&gq, b.coords().try_into().unwrap());
            let ra = Point::new(ManifoldId::Sphere2, &ra).unwrap();
            let rb = Point::new(ManifoldId::Sphere2, &rb).unwrap();
            assert_abs_diff_eq!(
                distance_unchecked(ManifoldId::Sphere2, &a, &b),
                distance_unchecked(ManifoldId::Sphere2, &ra, &rb),
                epsilon = 1e-12
            );

            let p = random_point(ManifoldId::So3, &mut rng);
            let q = random_point(ManifoldId::So3, &mut rng);
            let gp = quat_mul(&gq, p.coords().try_into().unwrap());
            let gq2 = quat_mul(&gq, q.coords().try_into().unwrap());
            let gp = Point::new(ManifoldId::So3, &gp).unwrap();
            let gq2 = Point::new(ManifoldId::So3, &gq2).unwrap();
            assert_abs_diff_eq!(
                distance_unchecked(ManifoldId::So3, &p, &q),
                distance_unchecked(ManifoldId::So3, &gp, &gq2),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn csv_round_trip() {
        let pts =
            generate_points(ManifoldId::So3, GenMethod::Random, SizeSpec::Count(10), 3).unwrap();
        let mut buf = Vec::new();
        write_point_set_csv(&pts, &mut buf).unwrap();
        let back = read_point_set_csv(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.manifold, ManifoldId::So3);
        assert_eq!(back.len(), pts.len());
        for (a, b) in pts.points().iter().zip(back.points()) {
            for (x, y) in a.coords().iter().zip(b.coords()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn duplicate_points_rejected() {
        let p = p2([0.0, 0.0, 1.0]);
        assert!(PointSet::new(ManifoldId::Sphere2, vec![p, p]).is_err());
    }
}
