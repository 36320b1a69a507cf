//! Sublevel domains `{g ≤ 0}` and closed hypersurfaces `{g = 0}` in ℝⁿ.
//!
//! A collar is never built as a global diffeomorphism. Only its two germs at
//! the boundary are used: the nearest-point projection `φ1` and a level
//! coordinate `φ2` (either `−g` or `−g/(1+‖x‖²)`).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::linalg::{self, dot, norm, scale, sub, Vec3, ZERO};
use crate::par::{self, Execution};

/// `|g| ≤ BOUNDARY_BAND` counts as on the boundary.
pub const BOUNDARY_BAND: f64 = 1e-7;
/// Collar band width as a fraction of the bounding-box diagonal.
pub const COLLAR_BAND_FRACTION: f64 = 0.05;
/// Tie tolerance for inward/outward on `v⊥ / ‖∇g‖`.
pub const INWARD_TOLERANCE: f64 = 1e-10;
const MIN_GRADIENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bbox {
    pub lo: Vec3,
    pub hi: Vec3,
    pub n: usize,
}

impl Bbox {
    pub fn new(intervals: &[(f64, f64)]) -> Result<Bbox> {
        let n = intervals.len();
        if !(1..=3).contains(&n) {
            return Err(Error::ArityMismatch(format!("bbox with {n} intervals")));
        }
        let mut lo = ZERO;
        let mut hi = ZERO;
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Schema {
                    key: "bbox".into(),
                    message: format!("interval {i} is not a finite nonempty range"),
                });
            }
            lo[i] = a;
            hi[i] = b;
        }
        Ok(Bbox { lo, hi, n })
    }

    pub fn cube(n: usize, half: f64) -> Bbox {
        let iv = vec![(-half, half); n];
        Bbox::new(&iv).expect("valid cube")
    }

    pub fn diagonal(&self) -> f64 {
        norm(&sub(&self.hi, &self.lo))
    }

    pub fn center(&self) -> Vec3 {
        scale(&linalg::add(&self.lo, &self.hi), 0.5)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..self.n).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    /// Grid nodes at cell centers, `per_axis` cells along each axis.
    pub fn grid_point(&self, idx: &[usize; 3], per_axis: usize) -> Vec3 {
        let mut p = ZERO;
        for i in 0..self.n {
            let h = (self.hi[i] - self.lo[i]) / per_axis as f64;
            p[i] = self.lo[i] + (idx[i] as f64 + 0.5) * h;
        }
        p
    }

    pub fn grid_spacing(&self, per_axis: usize) -> f64 {
        (0..self.n)
            .map(|i| (self.hi[i] - self.lo[i]) / per_axis as f64)
            .fold(0.0, f64::max)
    }
}

pub(crate) fn unflatten(mut k: usize, per_axis: usize, n: usize) -> [usize; 3] {
    let mut idx = [0usize; 3];
    for slot in idx.iter_mut().take(n) {
        *slot = k % per_axis;
        k /= per_axis;
    }
    idx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Interior,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inwardness {
    Inward,
    Outward,
    Tangent,
}

pub fn inwardness(v_perp: f64, tol: f64) -> Inwardness {
    if v_perp > tol {
        Inwardness::Inward
    } else if v_perp < -tol {
        Inwardness::Outward
    } else {
        Inwardness::Tangent
    }
}

/// The level function shared by domains and hypersurfaces.
#[derive(Debug, Clone)]
pub struct LevelSet {
    g: Expression,
    n: usize,
    bbox: Bbox,
    name: String,
}

impl LevelSet {
    pub fn new(g: Expression, bbox: Bbox, name: impl Into<String>) -> Result<LevelSet> {
        if g.arity() != bbox.n {
            return Err(Error::ArityMismatch(format!(
                "level function of arity {} with a {}-dimensional bbox",
                g.arity(),
                bbox.n
            )));
        }
        Ok(LevelSet {
            n: bbox.n,
            g,
            bbox,
            name: name.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bbox(&self) -> &Bbox {
        &self.bbox
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expression(&self) -> &Expression {
        &self.g
    }

    pub fn value(&self, x: &Vec3) -> Result<f64> {
        self.g.eval(x)
    }

    pub fn value_and_gradient(&self, x: &Vec3) -> Result<(f64, Vec3)> {
        let j = self.g.eval_jet(x)?;
        Ok((j.value, j.gradient()))
    }

    /// Unit outward normal `∇g/‖∇g‖`.
    pub fn normal(&self, x: &Vec3) -> Result<Vec3> {
        let (_, grad) = self.value_and_gradient(x)?;
        let gn = norm(&grad);
        if gn < MIN_GRADIENT {
            return Err(Error::DegenerateBoundary(format!("‖∇g‖ = {gn:e} at {x:?}")));
        }
        Ok(scale(&grad, 1.0 / gn))
    }

    /// First-order signed distance estimate `g/‖∇g‖` (positive outside).
    pub fn distance_estimate(&self, x: &Vec3) -> Result<f64> {
        let (g, grad) = self.value_and_gradient(x)?;
        let gn = norm(&grad);
        if gn < 1e-300 {
            return Ok(if g == 0.0 { 0.0 } else { g.signum() * f64::INFINITY });
        }
        Ok(g / gn)
    }

    pub fn classify(&self, p: &Vec3, band: f64) -> Result<PointClass> {
        let g = self.value(p)?;
        Ok(if g.abs() <= band {
            PointClass::Boundary
        } else if g < 0.0 {
            PointClass::Interior
        } else {
            PointClass::Outside
        })
    }

    pub fn collar_band(&self) -> f64 {
        COLLAR_BAND_FRACTION * self.bbox.diagonal()
    }

    /// Nearest point of `{g = 0}`: damped Newton along `∇g` onto the level
    /// set, alternated with a tangential correction until `p − q ∥ ∇g(q)`.
    pub fn project(&self, p: &Vec3) -> Result<Vec3> {
        let n = self.n;
        let mut q = *p;
        for _ in 0..50 {
            q = self.newton_onto(&q)?;
            if n == 1 {
                return Ok(q);
            }
            let nrm = self.normal(&q)?;
            let d = sub(p, &q);
            let tangential = linalg::axpy(&d, -dot(&d, &nrm), &nrm);
            if norm(&tangential) <= 1e-13 * (1.0 + norm(&d)) {
                return Ok(q);
            }
            q = linalg::add(&q, &tangential);
        }
        Err(Error::NoConvergence(format!(
            "boundary projection from {p:?} after 50 iterations"
        )))
    }

    fn newton_onto(&self, start: &Vec3) -> Result<Vec3> {
        let mut q = *start;
        let (mut g, mut grad) = self.value_and_gradient(&q)?;
        for _ in 0..80 {
            let gn2 = dot(&grad, &grad);
            if g == 0.0 || (g.abs() < 1e-12 && g.abs() <= 1e-13 * gn2.sqrt()) {
                break;
            }
            if gn2 < MIN_GRADIENT * MIN_GRADIENT {
                return Err(Error::DegenerateBoundary(format!("‖∇g‖ vanishes at {q:?}")));
            }
            let step = scale(&grad, -g / gn2);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand = linalg::axpy(&q, t, &step);
                if let Ok((gc, gradc)) = self.value_and_gradient(&cand) {
                    if gc.abs() < g.abs() {
                        q = cand;
                        g = gc;
                        grad = gradc;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if g.abs() < 1e-10 && g.abs() <= 1e-10 * norm(&grad) {
            Ok(q)
        } else {
            Err(Error::NoConvergence(format!(
                "Newton onto the level set stalled at {q:?} with g = {g:e}"
            )))
        }
    }

    /// Graph chart of the level set around a point on it.
    pub fn chart(&self, center: &Vec3) -> Result<BoundaryChart> {
        let (_, grad) = self.value_and_gradient(center)?;
        let gn = norm(&grad);
        if gn < MIN_GRADIENT {
            return Err(Error::DegenerateBoundary(format!("‖∇g‖ = {gn:e} at {center:?}")));
        }
        let dropped = (0..self.n)
            .max_by(|&a, &b| grad[a].abs().total_cmp(&grad[b].abs()))
            .unwrap_or(0);
        self.chart_with_axis(center, dropped)
    }

    /// Chart with a forced dropped axis; fails if that axis is not admissible
    /// (the level set is too steep along it at `center`).
    pub fn chart_with_axis(&self, center: &Vec3, dropped: usize) -> Result<BoundaryChart> {
        let (_, grad) = self.value_and_gradient(center)?;
        let gn = norm(&grad);
        if gn < MIN_GRADIENT {
            return Err(Error::DegenerateBoundary(format!("‖∇g‖ = {gn:e} at {center:?}")));
        }
        if grad[dropped].abs() < 0.3 * gn {
            return Err(Error::ChartTooSmall {
                center: *center,
                radius: 0.0,
            });
        }
        let mut chart = BoundaryChart {
            center: *center,
            dropped_axis: dropped,
            free: free_axes(self.n, dropped),
            n: self.n,
            radius: 0.0,
            slope: [0.0; 2],
        };
        for k in 0..self.n.saturating_sub(1) {
            chart.slope[k] = -grad[chart.free[k]] / grad[dropped];
        }
        if self.n == 1 {
            chart.radius = f64::INFINITY;
            return Ok(chart);
        }
        let mut r = 0.25 * self.bbox.diagonal();
        while r >= 1e-6 {
            chart.radius = r;
            if self.chart_ring_ok(&chart, r) && self.chart_ring_ok(&chart, 0.5 * r) {
                return Ok(chart);
            }
            r *= 0.5;
        }
        Err(Error::ChartTooSmall {
            center: *center,
            radius: r,
        })
    }

    fn chart_ring_ok(&self, chart: &BoundaryChart, r: f64) -> bool {
        let probes: Vec<[f64; 2]> = if self.n == 2 {
            vec![[r, 0.0], [-r, 0.0]]
        } else {
            (0..16)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / 16.0;
                    [r * a.cos(), r * a.sin()]
                })
                .collect()
        };
        probes.iter().all(|u| match chart.point(self, u) {
            Ok(x) => {
                let Ok((_, grad)) = self.value_and_gradient(&x) else {
                    return false;
                };
                let gn = norm(&grad);
                gn > MIN_GRADIENT
                    && grad[chart.dropped_axis].abs() >= 0.3 * gn
                    && (x[chart.dropped_axis] - chart.center[chart.dropped_axis]).abs() <= 4.0 * r
                    && self.bbox.contains(&x)
            }
            Err(_) => false,
        })
    }

    /// Dense sample of the level set: cell-centre grid nodes within about
    /// one cell of `{g = 0}`, projected onto it, with grid adjacency kept.
    pub fn sample_level_set(&self, per_axis: usize, exec: Execution) -> Result<LevelSample> {
        if self.n == 1 {
            return self.sample_points_1d(per_axis.max(256) * 16);
        }
        let n = self.n;
        let total = per_axis.pow(n as u32);
        let h = self.bbox.grid_spacing(per_axis) * (n as f64).sqrt();
        let projected = par::map_range(exec, total, |k| -> Option<Result<Vec3>> {
            let idx = unflatten(k, per_axis, n);
            let p = self.bbox.grid_point(&idx, per_axis);
            match self.distance_estimate(&p) {
                Ok(d) if d.abs() <= h => Some(self.project(&p)),
                _ => None,
            }
        });
        let mut points = Vec::new();
        let mut grid_of = HashMap::new();
        let mut grid_idx = Vec::new();
        for (k, item) in projected.into_iter().enumerate() {
            match item {
                Some(Ok(q)) => {
                    grid_of.insert(k, points.len());
                    grid_idx.push(k);
                    points.push(q);
                }
                Some(Err(e @ Error::DegenerateBoundary(_))) => return Err(e),
                _ => {}
            }
        }
        let offsets: Vec<[i64; 3]> = neighbor_offsets(n);
        let neighbors = grid_idx
            .iter()
            .map(|&k| {
                let idx = unflatten(k, per_axis, n);
                offsets
                    .iter()
                    .filter_map(|off| {
                        let mut flat = 0usize;
                        let mut stride = 1usize;
                        for a in 0..n {
                            let c = idx[a] as i64 + off[a];
                            if c < 0 || c >= per_axis as i64 {
                                return None;
                            }
                            flat += c as usize * stride;
                            stride *= per_axis;
                        }
                        grid_of.get(&flat).copied()
                    })
                    .collect()
            })
            .collect();
        Ok(LevelSample {
            points,
            neighbors,
            spacing: h,
        })
    }

    fn sample_points_1d(&self, count: usize) -> Result<LevelSample> {
        let (lo, hi) = (self.bbox.lo[0], self.bbox.hi[0]);
        let step = (hi - lo) / count as f64;
        let mut roots = Vec::new();
        let mut prev_x = lo;
        let mut prev_g = self.value(&[lo, 0.0, 0.0])?;
        for k in 1..=count {
            let x = lo + k as f64 * step;
            let g = self.value(&[x, 0.0, 0.0])?;
            if g == 0.0 {
                roots.push([x, 0.0, 0.0]);
            } else if prev_g != 0.0 && (g > 0.0) != (prev_g > 0.0) {
                let (mut a, mut b, mut ga) = (prev_x, x, prev_g);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    let gm = self.value(&[m, 0.0, 0.0])?;
                    if gm == 0.0 || (b - a) < 1e-15 {
                        a = m;
                        b = m;
                        break;
                    }
                    if (gm > 0.0) == (ga > 0.0) {
                        a = m;
                        ga = gm;
                    } else {
                        b = m;
                    }
                }
                let root = self.newton_onto(&[0.5 * (a + b), 0.0, 0.0])?;
                roots.push(root);
            }
            prev_x = x;
            prev_g = g;
        }
        for r in &roots {
            self.normal(r)?;
        }
        let count = roots.len();
        Ok(LevelSample {
            points: roots,
            neighbors: vec![Vec::new(); count],
            spacing: step,
        })
    }

    /// Rejects level sets whose gradient vanishes on (or numerically near)
    /// the zero set.
    fn check_nondegenerate(&self) -> Result<()> {
        let per_axis = match self.n {
            1 => 64,
            2 => 48,
            _ => 24,
        };
        let sample = self.sample_level_set(per_axis, Execution::default())?;
        if sample.points.is_empty() {
            return Err(Error::DegenerateBoundary(format!(
                "`{}`: level set not found inside the bbox",
                self.name
            )));
        }
        for p in &sample.points {
            self.normal(p)?;
        }
        Ok(())
    }

    /// Values of `g` on a grid over the faces of the bbox.
    fn face_values(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let per = 33usize;
        let mut out = Vec::new();
        for axis in 0..n {
            for side in [self.bbox.lo[axis], self.bbox.hi[axis]] {
                let others: Vec<usize> = (0..n).filter(|&a| a != axis).collect();
                let count = per.pow(others.len() as u32);
                for k in 0..count {
                    let mut p = ZERO;
                    p[axis] = side;
                    let mut rem = k;
                    for &o in &others {
                        let t = (rem % per) as f64 / (per - 1) as f64;
                        rem /= per;
                        p[o] = self.bbox.lo[o] + t * (self.bbox.hi[o] - self.bbox.lo[o]);
                    }
                    out.push(self.value(&p)?);
                }
            }
        }
        Ok(out)
    }
}

fn free_axes(n: usize, dropped: usize) -> [usize; 2] {
    let mut free = [0usize; 2];
    let mut k = 0;
    for a in 0..n {
        if a != dropped && k < 2 {
            free[k] = a;
            k += 1;
        }
    }
    free
}

fn neighbor_offsets(n: usize) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let range = |a: usize| if a < n { -1i64..=1 } else { 0i64..=0 };
    for dx in range(0) {
        for dy in range(1) {
            for dz in range(2) {
                if (dx, dy, dz) != (0, 0, 0) {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// Projected samples of a level set with neighbour lists inherited from the
/// sampling grid.
#[derive(Debug, Clone)]
pub struct LevelSample {
    pub points: Vec<Vec3>,
    pub neighbors: Vec<Vec<usize>>,
    /// Grid cell diagonal used to select near-boundary nodes.
    pub spacing: f64,
}

/// Graph chart `x_dropped = s(x_free)` of the level set near `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryChart {
    pub center: Vec3,
    pub dropped_axis: usize,
    pub radius: f64,
    #[serde(skip)]
    free: [usize; 2],
    #[serde(skip)]
    n: usize,
    #[serde(skip)]
    slope: [f64; 2],
}

impl BoundaryChart {
    pub fn free_axes(&self) -> &[usize] {
        &self.free[..self.n.saturating_sub(1)]
    }

    /// Ambient point for chart parameters `u` (length n−1, padded to 2).
    pub fn point(&self, level: &LevelSet, u: &[f64; 2]) -> Result<Vec3> {
        let i = self.dropped_axis;
        let mut x = self.center;
        let mut guess = self.center[i];
        for (k, &a) in self.free_axes().iter().enumerate() {
            x[a] += u[k];
            guess += self.slope[k] * u[k];
        }
        x[i] = guess;
        for attempt in 0..2 {
            let mut converged = false;
            for _ in 0..40 {
                let (g, grad) = level.value_and_gradient(&x)?;
                if g.abs() < 1e-13 {
                    converged = true;
                    break;
                }
                if grad[i].abs() < MIN_GRADIENT {
                    break;
                }
                x[i] -= g / grad[i];
            }
            if !converged {
                converged = level.value(&x)?.abs() < 1e-10;
            }
            if converged {
                return Ok(x);
            }
            if attempt == 0 {
                x[i] = self.center[i];
            }
        }
        Err(Error::NoConvergence(format!("chart solve at u = {u:?}")))
    }

    /// Chart coordinates of a tangent vector: its free-axis components.
    pub fn tangent_coords(&self, v: &Vec3) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, &a) in self.free_axes().iter().enumerate() {
            out[k] = v[a];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Collar {
    /// `φ2 = −g`
    #[default]
    NegG,
    /// `φ2 = −g/(1+‖x‖²)`
    Scaled,
}

impl Collar {
    pub fn name(self) -> &'static str {
        match self {
            Collar::NegG => "neg_g",
            Collar::Scaled => "scaled",
        }
    }

    pub fn from_name(s: &str) -> Option<Collar> {
        match s {
            "neg_g" => Some(Collar::NegG),
            "scaled" => Some(Collar::Scaled),
            _ => None,
        }
    }

    pub fn phi2(self, level: &LevelSet, x: &Vec3) -> Result<f64> {
        let g = level.value(x)?;
        Ok(match self {
            Collar::NegG => -g,
            Collar::Scaled => -g / (1.0 + dot(x, x)),
        })
    }

    pub fn phi2_gradient(self, level: &LevelSet, x: &Vec3) -> Result<Vec3> {
        let (g, grad) = level.value_and_gradient(x)?;
        Ok(match self {
            Collar::NegG => scale(&grad, -1.0),
            Collar::Scaled => {
                let w = 1.0 + dot(x, x);
                let mut out = ZERO;
                for i in 0..3 {
                    out[i] = -grad[i] / w + g * 2.0 * x[i] / (w * w);
                }
                out
            }
        })
    }

    pub fn phi1(self, level: &LevelSet, x: &Vec3) -> Result<Vec3> {
        level.project(x)
    }
}

/// Tangential and transverse parts of a vector at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub v_par: Vec3,
    pub v_perp: f64,
    /// `v_perp / ‖∇φ2‖`, the quantity compared against the tie tolerance.
    pub v_perp_normalized: f64,
}

impl Decomposition {
    pub fn inwardness(&self) -> Inwardness {
        inwardness(self.v_perp_normalized, INWARD_TOLERANCE)
    }
}

pub fn decompose(level: &LevelSet, collar: Collar, p: &Vec3, vec: &Vec3) -> Result<Decomposition> {
    let (_, grad) = level.value_and_gradient(p)?;
    let gn = norm(&grad);
    if gn < MIN_GRADIENT {
        return Err(Error::DegenerateBoundary(format!("‖∇g‖ = {gn:e} at {p:?}")));
    }
    let nhat = scale(&grad, 1.0 / gn);
    let v_par = linalg::axpy(vec, -dot(vec, &nhat), &nhat);
    let dphi = collar.phi2_gradient(level, p)?;
    let v_perp = dot(&dphi, vec);
    Ok(Decomposition {
        v_par,
        v_perp,
        v_perp_normalized: v_perp / norm(&dphi),
    })
}

/// Compact `{g ≤ 0}` strictly inside its bounding box.
#[derive(Debug, Clone)]
pub struct DomainManifold {
    level: LevelSet,
}

impl DomainManifold {
    pub fn new(g: Expression, bbox: Bbox, name: impl Into<String>) -> Result<DomainManifold> {
        let level = LevelSet::new(g, bbox, name)?;
        if level.face_values()?.iter().any(|&v| v <= 0.0) {
            return Err(Error::DegenerateBoundary(format!(
                "`{}`: the sublevel set reaches the bbox faces",
                level.name
            )));
        }
        level.check_nondegenerate()?;
        Ok(DomainManifold { level })
    }

    pub fn parse(g: &str, bbox: &[(f64, f64)], name: &str) -> Result<DomainManifold> {
        let b = Bbox::new(bbox)?;
        DomainManifold::new(Expression::parse(g, b.n)?, b, name)
    }

    pub fn level(&self) -> &LevelSet {
        &self.level
    }

    pub fn dim(&self) -> usize {
        self.level.n
    }

    pub fn name(&self) -> &str {
        &self.level.name
    }
}

/// Closed hypersurface `{g = 0}` in ℝ² or ℝ³.
#[derive(Debug, Clone)]
pub struct Hypersurface {
    level: LevelSet,
}

impl Hypersurface {
    pub fn new(g: Expression, bbox: Bbox, name: impl Into<String>) -> Result<Hypersurface> {
        if !(2..=3).contains(&bbox.n) {
            return Err(Error::ArityMismatch(format!(
                "hypersurface ambient dimension {} not in 2..=3",
                bbox.n
            )));
        }
        let level = LevelSet::new(g, bbox, name)?;
        let faces = level.face_values()?;
        if !(faces.iter().all(|&v| v > 0.0) || faces.iter().all(|&v| v < 0.0)) {
            return Err(Error::DegenerateBoundary(format!(
                "`{}`: the surface reaches the bbox faces",
                level.name
            )));
        }
        level.check_nondegenerate()?;
        Ok(Hypersurface { level })
    }

    pub fn parse(g: &str, bbox: &[(f64, f64)], name: &str) -> Result<Hypersurface> {
        let b = Bbox::new(bbox)?;
        Hypersurface::new(Expression::parse(g, b.n)?, b, name)
    }

    pub fn level(&self) -> &LevelSet {
        &self.level
    }

    /// Ambient dimension; the surface itself has dimension one less.
    pub fn ambient_dim(&self) -> usize {
        self.level.n
    }

    pub fn name(&self) -> &str {
        &self.level.name
    }
}
