//! Brouwer degree of self-maps of S⁰, S¹ and S².
//!
//! A map is given as an ambient function `f : ℝ^{k+1} → ℝ^{k+1}` that must
//! not vanish on the sphere of the given centre and radius; its degree is the
//! degree of `f/‖f‖` restricted to that sphere. Each dimension has its own
//! method (sign test, winding number, signed solid angle), and
//! [`degree_oracle`] counts signed preimages of regular values as an
//! independent cross-check.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, cross, dot, norm, Vec3, ZERO};
use crate::par::{self, Execution};

/// Raw estimates farther than this from an integer trigger refinement.
pub const RESIDUAL_THRESHOLD: f64 = 0.1;
pub const DEFAULT_S1_SAMPLES: usize = 64;
pub const DEFAULT_S2_LEVEL: usize = 5;
const MAX_S1_SAMPLES: usize = 1 << 20;
const MAX_S2_LEVEL: usize = 8;

pub type MapFn<'a> = dyn Fn(&Vec3) -> Result<Vec3> + Sync + 'a;

/// `f` restricted to the sphere of dimension `dim − 1` with the given centre
/// and radius in ℝ^dim (`dim = 0` is the empty sphere).
pub struct SphereMap<'a> {
    pub dim: usize,
    pub center: Vec3,
    pub radius: f64,
    pub f: &'a MapFn<'a>,
}

impl<'a> SphereMap<'a> {
    pub fn new(dim: usize, center: Vec3, radius: f64, f: &'a MapFn<'a>) -> Self {
        SphereMap {
            dim,
            center,
            radius,
            f,
        }
    }

    /// `f(center + radius·u)` for a unit vector `u`.
    fn at(&self, u: &Vec3) -> Result<Vec3> {
        let x = linalg::axpy(&self.center, self.radius, u);
        let y = (self.f)(&x)?;
        let ny = norm(&y);
        if ny == 0.0 || !ny.is_finite() {
            return Err(Error::VanishingOnSphere(x));
        }
        Ok(y)
    }

    fn unit_image(&self, u: &Vec3) -> Result<Vec3> {
        let y = self.at(u)?;
        Ok(linalg::scale(&y, 1.0 / norm(&y)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeResult {
    pub degree: i64,
    pub residual: f64,
    pub samples_used: usize,
}

/// The self-map of the empty set has degree 1.
pub fn degree_empty() -> DegreeResult {
    DegreeResult {
        degree: 1,
        residual: 0.0,
        samples_used: 0,
    }
}

pub fn degree_s0(m: &SphereMap) -> Result<DegreeResult> {
    let plus = m.at(&[1.0, 0.0, 0.0])?[0];
    let minus = m.at(&[-1.0, 0.0, 0.0])?[0];
    let degree = (plus > 0.0) as i64 - (minus > 0.0) as i64;
    Ok(DegreeResult {
        degree,
        residual: 0.0,
        samples_used: 2,
    })
}

fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// Winding number of `f/‖f‖` around the circle, refining by doubling the
/// sample count until every angular increment is below π/2.
pub fn degree_s1(m: &SphereMap, initial_samples: usize) -> Result<DegreeResult> {
    degree_s1_with(m, initial_samples, Execution::default())
}

pub fn degree_s1_with(m: &SphereMap, initial_samples: usize, exec: Execution) -> Result<DegreeResult> {
    let mut count = initial_samples.max(8);
    while count <= MAX_S1_SAMPLES {
        let angles: Vec<Result<f64>> = par::map_range(exec, count, |j| {
            let t = TAU * j as f64 / count as f64;
            let y = m.at(&[t.cos(), t.sin(), 0.0])?;
            Ok(y[1].atan2(y[0]))
        });
        let angles = angles.into_iter().collect::<Result<Vec<_>>>()?;
        let mut total = 0.0;
        let mut worst = 0.0f64;
        for j in 0..count {
            let inc = wrap_angle(angles[(j + 1) % count] - angles[j]);
            worst = worst.max(inc.abs());
            total += inc;
        }
        if worst < PI / 2.0 {
            let raw = total / TAU;
            let degree = raw.round();
            let residual = (raw - degree).abs();
            if residual < RESIDUAL_THRESHOLD {
                return Ok(DegreeResult {
                    degree: degree as i64,
                    residual,
                    samples_used: count,
                });
            }
        }
        count *= 2;
    }
    Err(Error::ResolutionExhausted(format!(
        "winding number needs more than {MAX_S1_SAMPLES} samples"
    )))
}

/// Triangulated unit sphere with outward-oriented faces.
pub struct SphereMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl SphereMesh {
    fn icosahedron() -> SphereMesh {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let vertices = raw.iter().map(|v| linalg::normalize(v).unwrap()).collect();
        let triangles = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        SphereMesh {
            vertices,
            triangles,
        }
    }

    fn subdivide(&self) -> SphereMesh {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, vertices: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let m = linalg::add(&vertices[a as usize], &vertices[b as usize]);
                vertices.push(linalg::normalize(&m).unwrap());
                (vertices.len() - 1) as u32
            })
        };
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([b, bc, ab]);
            triangles.push([c, ca, bc]);
            triangles.push([ab, bc, ca]);
        }
        SphereMesh {
            vertices,
            triangles,
        }
    }

    /// Vertex adjacency derived from the triangles.
    pub fn neighbors(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &[a, b, c] in &self.triangles {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                if !adj[p as usize].contains(&q) {
                    adj[p as usize].push(q);
                }
                if !adj[q as usize].contains(&p) {
                    adj[q as usize].push(p);
                }
            }
        }
        adj
    }
}

/// Icosahedral subdivision of the unit sphere at `level` (cached).
pub fn icosphere(level: usize) -> &'static SphereMesh {
    static CACHE: [OnceLock<SphereMesh>; MAX_S2_LEVEL + 1] = [const { OnceLock::new() }; MAX_S2_LEVEL + 1];
    let level = level.min(MAX_S2_LEVEL);
    CACHE[level].get_or_init(|| {
        if level == 0 {
            SphereMesh::icosahedron()
        } else {
            icosphere(level - 1).subdivide()
        }
    })
}

/// Signed solid angle of the spherical triangle with unit vertices `a, b, c`.
pub fn signed_solid_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = dot(a, &cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Total signed solid angle of the image triangles divided by 4π.
pub fn degree_s2(m: &SphereMap, subdivision_level: usize) -> Result<DegreeResult> {
    degree_s2_with(m, subdivision_level, Execution::default())
}

pub fn degree_s2_with(m: &SphereMap, subdivision_level: usize, exec: Execution) -> Result<DegreeResult> {
    let mut last_residual = f64::NAN;
    for level in subdivision_level..=MAX_S2_LEVEL {
        let mesh = icosphere(level);
        let images = par::map(exec, &mesh.vertices, |u| m.unit_image(u));
        let images = images.into_iter().collect::<Result<Vec<_>>>()?;
        let tris = &mesh.triangles;
        let total = par::sum_range(exec, tris.len(), |t| {
            let [a, b, c] = tris[t];
            signed_solid_angle(&images[a as usize], &images[b as usize], &images[c as usize])
        });
        // an image edge longer than a quarter turn means the mesh is too coarse
        let stretched = par::map_range(exec, tris.len(), |t| {
            let [a, b, c] = tris[t];
            let (a, b, c) = (&images[a as usize], &images[b as usize], &images[c as usize]);
            dot(a, b) < 0.0 || dot(b, c) < 0.0 || dot(c, a) < 0.0
        })
        .into_iter()
        .any(|s| s);
        let raw = total / (4.0 * PI);
        let degree = raw.round();
        last_residual = (raw - degree).abs();
        if last_residual < RESIDUAL_THRESHOLD && !stretched {
            return Ok(DegreeResult {
                degree: degree as i64,
                residual: last_residual,
                samples_used: mesh.vertices.len(),
            });
        }
    }
    Err(Error::ResolutionExhausted(format!(
        "solid-angle degree unresolved at level {MAX_S2_LEVEL} (residual {last_residual:.3})"
    )))
}

/// Dispatches on the sphere dimension.
pub fn degree(m: &SphereMap) -> Result<DegreeResult> {
    match m.dim {
        0 => Ok(degree_empty()),
        1 => degree_s0(m),
        2 => degree_s1(m, DEFAULT_S1_SAMPLES),
        3 => degree_s2(m, DEFAULT_S2_LEVEL),
        d => Err(Error::ArityMismatch(format!("no degree for S^{}", d as i64 - 1))),
    }
}

pub fn degree_with(m: &SphereMap, exec: Execution) -> Result<DegreeResult> {
    match m.dim {
        2 => degree_s1_with(m, DEFAULT_S1_SAMPLES, exec),
        3 => degree_s2_with(m, DEFAULT_S2_LEVEL, exec),
        _ => degree(m),
    }
}

/// Preimage count at increasing seed resolutions, taken once two
/// consecutive resolutions agree; `None` if they never do.
fn settled_count(
    resolutions: impl IntoIterator<Item = usize>,
    mut count: impl FnMut(usize) -> Result<Option<i64>>,
) -> Result<(Option<i64>, usize)> {
    let mut prev = None;
    let mut last = 0;
    for r in resolutions {
        let c = count(r)?;
        last = r;
        if c.is_some() && c == prev {
            return Ok((c, r));
        }
        prev = c;
    }
    Ok((None, last))
}

/// Signed preimage count of random regular values, majority over trials.
pub fn degree_oracle(m: &SphereMap, trials: usize, seed: u64) -> Result<DegreeResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: Vec<i64> = Vec::new();
    let mut samples_used = 0;
    for _ in 0..trials.max(1) {
        let outcome = match m.dim {
            0 => Some(1),
            1 => {
                let target = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                Some(preimages_s0(m, target)?)
            }
            2 => {
                let phi = rng.gen_range(-PI..PI);
                let (c, n) = settled_count((11..=16).map(|k| 1usize << k), |n| preimages_s1(m, phi, n))?;
                samples_used = samples_used.max(n);
                c
            }
            3 => {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let a: f64 = rng.gen_range(-PI..PI);
                let s = (1.0 - z * z).sqrt();
                let target = [s * a.cos(), s * a.sin(), z];
                let (c, level) = settled_count(4..=MAX_S2_LEVEL, |l| preimages_s2(m, &target, l))?;
                samples_used = samples_used.max(icosphere(level).vertices.len());
                c
            }
            d => return Err(Error::ArityMismatch(format!("no oracle for dimension {d}"))),
        };
        if let Some(c) = outcome {
            counts.push(c);
        }
    }
    if counts.is_empty() {
        return Err(Error::NoRegularValue(trials));
    }
    let mut tally: Vec<(i64, usize)> = Vec::new();
    for c in &counts {
        match tally.iter_mut().find(|(v, _)| v == c) {
            Some((_, k)) => *k += 1,
            None => tally.push((*c, 1)),
        }
    }
    let (degree, _) = tally
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty");
    Ok(DegreeResult {
        degree,
        residual: 0.0,
        samples_used,
    })
}

fn preimages_s0(m: &SphereMap, target: f64) -> Result<i64> {
    let mut count = 0;
    for side in [1.0, -1.0] {
        let y = m.at(&[side, 0.0, 0.0])?[0];
        if y.signum() == target {
            count += (side * target) as i64;
        }
    }
    Ok(count)
}

/// `None` when the target direction is (nearly) a critical value.
fn preimages_s1(m: &SphereMap, target: f64, n: usize) -> Result<Option<i64>> {
    let offset = |t: f64| -> Result<f64> {
        let y = m.at(&[t.cos(), t.sin(), 0.0])?;
        Ok(wrap_angle(y[1].atan2(y[0]) - target))
    };
    let ts: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let d: Vec<f64> = ts.iter().map(|&t| offset(t)).collect::<Result<_>>()?;
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for j in 0..n {
        let a = d[j].abs();
        if a > 0.5 || a > d[(j + n - 1) % n].abs() || a > d[(j + 1) % n].abs() {
            continue;
        }
        let mut t = ts[j];
        let mut slope = 0.0;
        let mut ok = false;
        for _ in 0..60 {
            let h = 1e-7;
            let v = offset(t)?;
            slope = wrap_angle(offset(t + h)? - offset(t - h)?) / (2.0 * h);
            if v.abs() < 1e-12 {
                ok = true;
                break;
            }
            if slope.abs() < 1e-12 {
                break;
            }
            let step = (v / slope).clamp(-0.05, 0.05);
            t -= step;
        }
        if !ok {
            continue;
        }
        let t = t.rem_euclid(TAU);
        if roots.iter().any(|(r, _)| wrap_angle(r - t).abs() < 1e-7) {
            continue;
        }
        roots.push((t, slope));
    }
    if roots.iter().any(|(_, s)| s.abs() < 1e-6) {
        return Ok(None);
    }
    Ok(Some(roots.iter().map(|(_, s)| s.signum() as i64).sum()))
}

fn preimages_s2(m: &SphereMap, target: &Vec3, level: usize) -> Result<Option<i64>> {
    let mesh = icosphere(level);
    let adj = mesh.neighbors();
    let angle = |u: &Vec3| -> Result<f64> {
        let y = m.unit_image(u)?;
        Ok(dot(&y, target).clamp(-1.0, 1.0).acos())
    };
    let alpha: Vec<f64> = mesh.vertices.iter().map(angle).collect::<Result<_>>()?;
    let (t1, t2) = linalg::tangent_frame(target);
    let mut roots: Vec<(Vec3, f64)> = Vec::new();
    for (i, x0) in mesh.vertices.iter().enumerate() {
        if adj[i].iter().any(|&j| alpha[j as usize] < alpha[i]) {
            continue;
        }
        let Some((x, det)) = polish_s2(m, x0, target, &t1, &t2)? else {
            continue;
        };
        if roots.iter().any(|(r, _)| linalg::dist(r, &x) < 1e-7) {
            continue;
        }
        roots.push((x, det));
    }
    if roots.iter().any(|(_, d)| d.abs() < 1e-8) {
        return Ok(None);
    }
    Ok(Some(roots.iter().map(|(_, d)| d.signum() as i64).sum()))
}

/// Newton in the tangent-plane chart at the current iterate. Returns the
/// preimage and the Jacobian determinant in oriented frames.
fn polish_s2(
    m: &SphereMap,
    start: &Vec3,
    target: &Vec3,
    t1: &Vec3,
    t2: &Vec3,
) -> Result<Option<(Vec3, f64)>> {
    let moved = |x: &Vec3, e1: &Vec3, e2: &Vec3, s: [f64; 2]| -> Vec3 {
        linalg::normalize(&linalg::add(x, &linalg::add(&linalg::scale(e1, s[0]), &linalg::scale(e2, s[1]))))
            .unwrap_or(*x)
    };
    // Chart coordinates of the image, plus the squared distance to the target.
    let residual = |p: &Vec3| -> Result<([f64; 2], f64)> {
        let y = m.unit_image(p)?;
        let d = linalg::sub(&y, target);
        Ok(([dot(&y, t1), dot(&y, t2)], dot(&d, &d)))
    };
    let mut x = *start;
    let (mut g0, mut err) = residual(&x)?;
    for _ in 0..100 {
        let (e1, e2) = linalg::tangent_frame(&x);
        let h = 1e-7;
        let mut jac = [[0.0; 3]; 3];
        for k in 0..2 {
            let mut sp = [0.0; 2];
            let mut sm = [0.0; 2];
            sp[k] = h;
            sm[k] = -h;
            let (gp, _) = residual(&moved(&x, &e1, &e2, sp))?;
            let (gm, _) = residual(&moved(&x, &e1, &e2, sm))?;
            jac[0][k] = (gp[0] - gm[0]) / (2.0 * h);
            jac[1][k] = (gp[1] - gm[1]) / (2.0 * h);
        }
        let det = linalg::det(&jac, 2);
        if g0[0].hypot(g0[1]) < 1e-12 {
            return Ok((err < 2.0).then_some((x, det)));
        }
        let Some(step) = linalg::solve(&jac, &[g0[0], g0[1], 0.0], 2) else {
            return Ok(None);
        };
        let len = step[0].hypot(step[1]);
        let mut t = if len > 0.5 { 0.5 / len } else { 1.0 };
        let mut improved = false;
        for _ in 0..40 {
            let cand = moved(&x, &e1, &e2, [-t * step[0], -t * step[1]]);
            let (gc, ec) = residual(&cand)?;
            if ec < err {
                x = cand;
                g0 = gc;
                err = ec;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Unit vectors `(cos θ, sin θ)` sampled uniformly, used by callers that need
/// a sampled S¹.
pub fn circle_points(count: usize) -> Vec<Vec3> {
    (0..count)
        .map(|j| {
            let t = TAU * j as f64 / count as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect()
}

/// Sample points on the unit sphere `S^{dim−1}` (dim 1: ±1, dim 2: circle,
/// dim 3: icosphere vertices).
pub fn sphere_samples(dim: usize, density: usize) -> Vec<Vec3> {
    match dim {
        1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        2 => circle_points(density.max(8)),
        3 => {
            let level = match density {
                0..=50 => 1,
                51..=200 => 2,
                201..=700 => 3,
                _ => 4,
            };
            icosphere(level).vertices.clone()
        }
        _ => vec![ZERO],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map<'a>(dim: usize, f: &'a MapFn<'a>) -> SphereMap<'a> {
        SphereMap::new(dim, ZERO, 1.0, f)
    }

    #[test]
    fn empty_sphere_has_degree_one() {
        assert_eq!(degree_empty().degree, 1);
        assert_eq!(degree_empty().residual, 0.0);
    }

    #[test]
    fn s0_cases() {
        let id = |x: &Vec3| Ok(*x);
        let neg = |x: &Vec3| Ok([-x[0], 0.0, 0.0]);
        let one = |_: &Vec3| Ok([1.0, 0.0, 0.0]);
        assert_eq!(degree_s0(&map(1, &id)).unwrap().degree, 1);
        assert_eq!(degree_s0(&map(1, &neg)).unwrap().degree, -1);
        assert_eq!(degree_s0(&map(1, &one)).unwrap().degree, 0);
        let zero = |_: &Vec3| Ok(ZERO);
        assert!(matches!(degree_s0(&map(1, &zero)), Err(Error::VanishingOnSphere(_))));
    }

    #[test]
    fn s1_cases() {
        let id = |x: &Vec3| Ok(*x);
        let refl = |x: &Vec3| Ok([x[0], -x[1], 0.0]);
        let dbl = |x: &Vec3| Ok([x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1], 0.0]);
        assert_eq!(degree_s1(&map(2, &id), 64).unwrap().degree, 1);
        assert_eq!(degree_s1(&map(2, &refl), 64).unwrap().degree, -1);
        assert_eq!(degree_s1(&map(2, &dbl), 64).unwrap().degree, 2);
        assert_eq!(degree_oracle(&map(2, &id), 5, 1).unwrap().degree, 1);
        // preimages of direction (1,0) under z ↦ z² are the angles 0 and π
        assert_eq!(preimages_s1(&map(2, &dbl), 0.0, 2048).unwrap(), Some(2));
        assert_eq!(degree_oracle(&map(2, &dbl), 5, 2).unwrap().degree, 2);
    }

    #[test]
    fn s2_cases() {
        let id = |x: &Vec3| Ok(*x);
        let anti = |x: &Vec3| Ok([-x[0], -x[1], -x[2]]);
        let refl = |x: &Vec3| Ok([x[0], x[1], -x[2]]);
        assert_eq!(degree_s2(&map(3, &id), 3).unwrap().degree, 1);
        assert_eq!(degree_s2(&map(3, &anti), 3).unwrap().degree, -1);
        assert_eq!(degree_s2(&map(3, &refl), 3).unwrap().degree, -1);
        // the reflection has one preimage per direction, with negative sign
        assert_eq!(preimages_s2(&map(3, &refl), &[0.48, 0.6, 0.64], 4).unwrap(), Some(-1));
        assert_eq!(degree_oracle(&map(3, &refl), 3, 3).unwrap().degree, -1);
    }

    #[test]
    fn identity_mesh_covers_full_solid_angle() {
        let mesh = icosphere(2);
        let total: f64 = mesh
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                signed_solid_angle(
                    &mesh.vertices[a as usize],
                    &mesh.vertices[b as usize],
                    &mesh.vertices[c as usize],
                )
            })
            .sum();
        assert!((total - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn multiplicativity_on_circle() {
        type M = fn(&Vec3) -> Vec3;
        let maps: [(M, i64); 3] = [
            (|x| *x, 1),
            (|x| [x[0], -x[1], 0.0], -1),
            (|x| [x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1], 0.0], 2),
        ];
        for (f, df) in maps {
            for (g, dg) in maps {
                let comp = move |x: &Vec3| {
                    let y = linalg::normalize(&g(x)).unwrap();
                    Ok(f(&y))
                };
                let d = degree_s1(&map(2, &comp), 64).unwrap().degree;
                assert_eq!(d, df * dg);
            }
        }
    }

    #[test]
    fn homotopy_and_radius_invariance() {
        let f = |x: &Vec3| -> Result<Vec3> { Ok([x[0] * x[0] - x[1] * x[1] + 0.3, 2.0 * x[0] * x[1], 0.0]) };
        let f2 = |x: &Vec3| -> Result<Vec3> { Ok([x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1] + 0.2 * x[0], 0.0]) };
        let base = degree_s1(&map(2, &f), 64).unwrap().degree;
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mix = |x: &Vec3| {
                let a = f(x)?;
                let b = f2(x)?;
                Ok(linalg::add(&linalg::scale(&a, t), &linalg::scale(&b, 1.0 - t)))
            };
            assert_eq!(degree_s1(&map(2, &mix), 64).unwrap().degree, base);
        }
        let lin = |x: &Vec3| Ok([2.0 * x[0] + x[1], -x[0] + x[1] - 0.5 * x[2], x[2]]);
        for r in [0.5, 1.0, 2.0] {
            let m = SphereMap::new(3, ZERO, r, &lin);
            assert_eq!(degree_s2(&m, 4).unwrap().degree, 1);
        }
    }

    #[test]
    fn vanishing_map_is_rejected() {
        let f = |x: &Vec3| Ok([x[0] - 1.0, x[1], 0.0]);
        assert!(matches!(degree_s1(&map(2, &f), 64), Err(Error::VanishingOnSphere(_))));
    }

    #[test]
    fn execution_modes_agree() {
        let f = |x: &Vec3| Ok([x[0] * x[1] + 0.2, x[2] - x[0], x[1] + x[2] * x[0]]);
        let m = map(3, &f);
        let a = degree_s2_with(&m, 4, Execution::Parallel).unwrap();
        let b = degree_s2_with(&m, 4, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
