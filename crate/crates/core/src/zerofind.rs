//! Zero isolation: interior zeros of a field by cell subdivision with
//! Newton polishing, and zeros of the tangential component on a level set.

use serde::Serialize;

use crate::degree::sphere_samples;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::linalg::{self, det, dist, dot, frobenius, norm, Mat3, Vec3, ZERO};
use crate::manifold::{decompose, Bbox, Collar, DomainManifold, Hypersurface, Inwardness, LevelSample, LevelSet, BOUNDARY_BAND};
use crate::par::{self, Execution};

pub const DEFAULT_DEPTH: usize = 9;
/// Residual below which a polished point counts as a zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;
/// Sampled field floor on isolation spheres.
pub const ISOLATION_FLOOR: f64 = 1e-6;
/// `|v|` below this at a boundary point means the field vanishes on `∂M`.
pub const BOUNDARY_ZERO_FLOOR: f64 = 1e-8;
pub const TRANSVERSE_THRESHOLD: f64 = 1e-8;
const DEDUP_RADIUS: f64 = 1e-6;
const CLUSTER_RADIUS: f64 = 1e-4;
const CLUSTER_LIMIT: usize = 8;
const MAX_ZEROS: usize = 64;
const MAX_CELLS: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroKind {
    InteriorZero,
    BoundaryTangentialZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub position: Vec3,
    pub kind: ZeroKind,
    /// Ambient radius for interior zeros, chart radius for tangential ones.
    pub isolation_radius: f64,
    pub jacobian_det: f64,
    /// Set for boundary-tangential zeros of a domain.
    pub transverse_sign: Option<Inwardness>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub depth: usize,
    pub paranoid: bool,
    /// Grid cells per axis for sampling the boundary; `None` picks a
    /// dimension-dependent default.
    pub boundary_samples: Option<usize>,
    pub exec: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            depth: DEFAULT_DEPTH,
            paranoid: false,
            boundary_samples: None,
            exec: Execution::default(),
        }
    }
}

impl SearchOptions {
    fn effective_depth(&self) -> usize {
        if self.paranoid {
            2 * self.depth
        } else {
            self.depth
        }
    }

    fn probes_per_axis(&self) -> usize {
        if self.paranoid {
            5
        } else {
            3
        }
    }

    pub fn boundary_grid(&self, n: usize) -> usize {
        let base = self.boundary_samples.unwrap_or(match n {
            1 => 256,
            2 => 256,
            _ => 64,
        });
        if self.paranoid {
            2 * base
        } else {
            base
        }
    }
}

fn cmp_points(a: &Vec3, b: &Vec3) -> std::cmp::Ordering {
    a[0].total_cmp(&b[0])
        .then(a[1].total_cmp(&b[1]))
        .then(a[2].total_cmp(&b[2]))
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: Vec3,
    hi: Vec3,
}

impl Cell {
    fn diameter(&self, n: usize) -> f64 {
        (0..n).map(|i| (self.hi[i] - self.lo[i]).powi(2)).sum::<f64>().sqrt()
    }

    fn center(&self) -> Vec3 {
        linalg::scale(&linalg::add(&self.lo, &self.hi), 0.5)
    }

    fn split(&self, n: usize) -> Vec<Cell> {
        let mid = self.center();
        (0..1usize << n)
            .map(|mask| {
                let mut c = *self;
                for a in 0..n {
                    if mask >> a & 1 == 0 {
                        c.hi[a] = mid[a];
                    } else {
                        c.lo[a] = mid[a];
                    }
                }
                c
            })
            .collect()
    }

    fn probes(&self, n: usize, per_axis: usize) -> Vec<Vec3> {
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|k| {
                let mut p = ZERO;
                let mut r = k;
                for a in 0..n {
                    let t = (r % per_axis) as f64 / (per_axis - 1) as f64;
                    r /= per_axis;
                    p[a] = self.lo[a] + t * (self.hi[a] - self.lo[a]);
                }
                p
            })
            .collect()
    }
}

/// Exclusion test: a cell is dropped when the sampled minimum of `‖v‖` on
/// its probe grid exceeds the sampled Jacobian bound times its diameter, or
/// when `g` is bounded away from zero from above the same way.
fn cell_may_contain_zero(
    v: &dyn VectorField,
    level: Option<&LevelSet>,
    cell: &Cell,
    n: usize,
    per_axis: usize,
) -> bool {
    let diam = cell.diameter(n);
    let probes = cell.probes(n, per_axis);
    if let Some(level) = level {
        let mut min_g = f64::INFINITY;
        let mut lip = 0.0f64;
        for p in &probes {
            match level.value_and_gradient(p) {
                Ok((g, grad)) => {
                    min_g = min_g.min(g);
                    lip = lip.max(norm(&grad));
                }
                Err(_) => return true,
            }
        }
        if min_g - lip * diam > BOUNDARY_BAND {
            return false;
        }
    }
    let mut min_v = f64::INFINITY;
    let mut lip = 0.0f64;
    for p in &probes {
        match v.eval_jacobian(p) {
            Ok((val, jac)) => {
                min_v = min_v.min(norm(&val));
                lip = lip.max(frobenius(&jac, n));
            }
            Err(_) => return true,
        }
    }
    min_v - lip * diam <= 0.0
}

/// Damped Newton from `start`; `Some` if it reaches `‖v‖ < ZERO_TOLERANCE`
/// inside the bbox.
pub fn polish_zero(v: &dyn VectorField, start: &Vec3, bbox: &Bbox) -> Option<Vec3> {
    let n = v.dim();
    let mut x = *start;
    let (mut f, mut jac) = v.eval_jacobian(&x).ok()?;
    let mut r = norm(&f);
    for _ in 0..200 {
        if r == 0.0 {
            break;
        }
        let rhs = linalg::scale(&f, -1.0);
        let scale = frobenius(&jac, n).max(1e-300);
        let step = linalg::solve(&jac, &rhs, n)
            .or_else(|| linalg::solve_damped(&jac, &rhs, n, 1e-10 * scale * scale))?;
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = linalg::axpy(&x, t, &step);
            if let Ok((fc, jc)) = v.eval_jacobian(&cand) {
                let rc = norm(&fc);
                if rc < r {
                    x = cand;
                    f = fc;
                    jac = jc;
                    r = rc;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved || t * norm(&step) < 1e-16 * (1.0 + norm(&x)) {
            break;
        }
    }
    let slack = 1e-9 * bbox.diagonal();
    let inside = (0..n).all(|i| x[i] >= bbox.lo[i] - slack && x[i] <= bbox.hi[i] + slack);
    (r < ZERO_TOLERANCE && inside).then_some(x)
}

/// All zeros of `v` found by subdivision of `bbox` (restricted to cells
/// that may meet `{g ≤ 0}` when `level` is given), deduplicated and sorted.
pub fn find_zeros_in_box(
    v: &dyn VectorField,
    bbox: &Bbox,
    level: Option<&LevelSet>,
    opts: &SearchOptions,
) -> Result<Vec<Vec3>> {
    let n = bbox.n;
    let per_axis = opts.probes_per_axis();
    let mut cells = vec![Cell {
        lo: bbox.lo,
        hi: bbox.hi,
    }];
    let depth = opts.effective_depth();
    for k in 0..=depth {
        let keep = par::map(opts.exec, &cells, |c| cell_may_contain_zero(v, level, c, n, per_axis));
        cells = cells
            .into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect();
        if k < depth {
            if cells.len() << n > MAX_CELLS {
                return Err(Error::ResolutionExhausted(format!(
                    "{} candidate cells at subdivision level {}",
                    cells.len() << n,
                    k + 1
                )));
            }
            cells = cells.iter().flat_map(|c| c.split(n)).collect();
        }
    }
    let polished = par::map(opts.exec, &cells, |c| polish_zero(v, &c.center(), bbox));
    let mut found: Vec<Vec3> = polished.into_iter().flatten().collect();
    found.sort_by(cmp_points);
    let zeros = dedup(found, DEDUP_RADIUS);
    check_clusters(&zeros)?;
    Ok(zeros)
}

fn dedup(points: Vec<Vec3>, radius: f64) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::new();
    for p in points {
        if !out.iter().any(|q| dist(q, &p) < radius) {
            out.push(p);
        }
    }
    out.sort_by(cmp_points);
    out
}

fn check_clusters(zeros: &[Vec3]) -> Result<()> {
    for p in zeros {
        let near = zeros.iter().filter(|q| dist(p, q) < CLUSTER_RADIUS).count();
        if near > CLUSTER_LIMIT {
            return Err(Error::SuspectedNonIsolatedZero(*p));
        }
    }
    if zeros.len() > MAX_ZEROS {
        return Err(Error::SuspectedNonIsolatedZero(zeros[0]));
    }
    Ok(())
}

fn min_on_sphere(v: &dyn VectorField, center: &Vec3, r: f64, dirs: &[Vec3]) -> f64 {
    dirs.iter()
        .map(|d| match v.eval(&linalg::axpy(center, r, d)) {
            Ok(y) => norm(&y),
            Err(_) => 0.0,
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest `r = 2⁻ᵏ ≤ r_max` such that the sampled minimum of `norm_at` on
/// the spheres of radius `r` and `r/2` exceeds the isolation floor.
fn isolation_radius(r_max: f64, min_at: impl Fn(f64) -> f64) -> Option<f64> {
    if !(r_max > 0.0) {
        return None;
    }
    let mut r = 2f64.powi(r_max.log2().floor() as i32);
    while r >= 1e-7 {
        if r <= r_max && min_at(r) > ISOLATION_FLOOR && min_at(0.5 * r) > ISOLATION_FLOOR {
            return Some(r);
        }
        r *= 0.5;
    }
    None
}

/// Interior zeros of `v` on a domain. Zeros within the boundary band are
/// an error (the field must not vanish on `∂M`).
pub fn find_interior_zeros(m: &DomainManifold, v: &dyn VectorField, opts: &SearchOptions) -> Result<Vec<ZeroRecord>> {
    let level = m.level();
    let bbox = level.bbox();
    let all = find_zeros_in_box(v, bbox, Some(level), opts)?;
    let mut inside = Vec::new();
    for p in &all {
        let g = level.value(p)?;
        if g.abs() <= BOUNDARY_BAND {
            return Err(Error::ZeroOnBoundary(*p));
        }
        if g < 0.0 {
            inside.push(*p);
        }
    }
    // The main search skips cells outside M, so each zero is re-isolated by
    // an unrestricted search of a box around it.
    inside
        .iter()
        .map(|p| {
            let others = all
                .iter()
                .filter(|q| *q != p)
                .map(|q| dist(p, q))
                .fold(f64::INFINITY, f64::min);
            let half = (0.5 * others).min(0.25 * bbox.diagonal());
            isolate_known_zero(v, p, half, opts)
        })
        .collect()
}

/// Interior record for a known zero `p` of a field on ℝⁿ: the box of
/// half-width `half` around `p` is searched so that the isolation radius
/// stays below half the distance to any neighbouring zero.
pub fn isolate_known_zero(v: &dyn VectorField, p: &Vec3, half: f64, opts: &SearchOptions) -> Result<ZeroRecord> {
    let n = v.dim();
    let intervals: Vec<(f64, f64)> = (0..n).map(|i| (p[i] - half, p[i] + half)).collect();
    let bbox = Bbox::new(&intervals)?;
    let all = find_zeros_in_box(v, &bbox, None, opts)?;
    let own = all
        .iter()
        .copied()
        .min_by(|a, b| dist(a, p).total_cmp(&dist(b, p)))
        .filter(|q| dist(q, p) < DEDUP_RADIUS)
        .ok_or_else(|| Error::NoConvergence(format!("no zero found at {p:?}")))?;
    let others = all
        .iter()
        .filter(|q| **q != own)
        .map(|q| dist(&own, q))
        .fold(f64::INFINITY, f64::min);
    let dirs = sphere_samples(n, if opts.paranoid { 1024 } else { 256 });
    let r_max = (0.5 * others).min(0.9 * half);
    let r = isolation_radius(r_max, |r| min_on_sphere(v, &own, r, &dirs))
        .ok_or(Error::SuspectedNonIsolatedZero(own))?;
    let (_, jac) = v.eval_jacobian(&own)?;
    Ok(ZeroRecord {
        position: own,
        kind: ZeroKind::InteriorZero,
        isolation_radius: r,
        jacobian_det: det(&jac, n),
        transverse_sign: None,
    })
}

/// Summary of `v` over a dense boundary sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryScan {
    pub points: usize,
    pub min_norm: f64,
    pub max_norm: f64,
    pub max_tangential: f64,
    /// Extremes of `v⊥/‖∇φ2‖`.
    pub min_transverse: f64,
    pub max_transverse: f64,
    #[serde(skip)]
    pub argmin_norm: Vec3,
}

impl BoundaryScan {
    /// `v∥` is zero at every sample (relative to the field's size).
    pub fn tangential_vanishes(&self) -> bool {
        self.points > 0 && self.max_tangential <= 1e-9 * self.max_norm.max(1e-300)
    }

    /// `Inward`/`Outward` when the field points strictly one way everywhere.
    pub fn uniform_sign(&self) -> Option<Inwardness> {
        if self.min_transverse > 0.0 {
            Some(Inwardness::Inward)
        } else if self.max_transverse < 0.0 {
            Some(Inwardness::Outward)
        } else {
            None
        }
    }
}

pub fn sample_boundary(level: &LevelSet, opts: &SearchOptions) -> Result<LevelSample> {
    level.sample_level_set(opts.boundary_grid(level.dim()), opts.exec)
}

pub fn scan_boundary(
    level: &LevelSet,
    collar: Collar,
    v: &dyn VectorField,
    sample: &LevelSample,
    exec: Execution,
) -> Result<(BoundaryScan, Vec<f64>)> {
    let rows = par::map(exec, &sample.points, |p| -> Result<(f64, f64, f64)> {
        let val = v.eval(p)?;
        let d = decompose(level, collar, p, &val)?;
        Ok((norm(&val), norm(&d.v_par), d.v_perp_normalized))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut scan = BoundaryScan {
        points: rows.len(),
        min_norm: f64::INFINITY,
        max_norm: 0.0,
        max_tangential: 0.0,
        min_transverse: f64::INFINITY,
        max_transverse: f64::NEG_INFINITY,
        argmin_norm: ZERO,
    };
    for (p, &(nv, np, perp)) in sample.points.iter().zip(&rows) {
        if nv < scan.min_norm {
            scan.min_norm = nv;
            scan.argmin_norm = *p;
        }
        scan.max_norm = scan.max_norm.max(nv);
        scan.max_tangential = scan.max_tangential.max(np);
        scan.min_transverse = scan.min_transverse.min(perp);
        scan.max_transverse = scan.max_transverse.max(perp);
    }
    Ok((scan, rows.iter().map(|r| r.1).collect()))
}

fn tangential_part(level: &LevelSet, v: &dyn VectorField, p: &Vec3) -> Result<Vec3> {
    let val = v.eval(p)?;
    Ok(decompose(level, Collar::NegG, p, &val)?.v_par)
}

fn tangent_basis(level: &LevelSet, p: &Vec3) -> Result<Vec<Vec3>> {
    let nrm = level.normal(p)?;
    Ok(match level.dim() {
        2 => vec![[-nrm[1], nrm[0], 0.0]],
        3 => {
            let (e1, e2) = linalg::tangent_frame(&nrm);
            vec![e1, e2]
        }
        _ => Vec::new(),
    })
}

/// Newton for `v∥ = 0` on the level set, re-linearized in the tangent plane
/// at each iterate with a finite-difference Jacobian.
fn polish_tangential(level: &LevelSet, v: &dyn VectorField, start: &Vec3) -> Option<Vec3> {
    let k = level.dim() - 1;
    let max_step = 0.1 * level.bbox().diagonal();
    let mut p = *start;
    for _ in 0..60 {
        let basis = tangent_basis(level, &p).ok()?;
        let lift = |u: &[f64; 2]| -> Result<Vec3> {
            let mut q = p;
            for (j, e) in basis.iter().enumerate() {
                q = linalg::axpy(&q, u[j], e);
            }
            level.project(&q)
        };
        let residual = |q: &Vec3| -> Result<Vec3> {
            let w = tangential_part(level, v, q)?;
            let mut out = ZERO;
            for (j, e) in basis.iter().enumerate() {
                out[j] = dot(&w, e);
            }
            Ok(out)
        };
        let f0 = residual(&p).ok()?;
        let r0 = norm(&f0);
        if r0 == 0.0 {
            break;
        }
        let h = 1e-7 * (1.0 + norm(&p));
        let mut jac: Mat3 = [[0.0; 3]; 3];
        for j in 0..k {
            let mut up = [0.0; 2];
            let mut um = [0.0; 2];
            up[j] = h;
            um[j] = -h;
            let fp = residual(&lift(&up).ok()?).ok()?;
            let fm = residual(&lift(&um).ok()?).ok()?;
            for i in 0..k {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = linalg::scale(&f0, -1.0);
        let scale = frobenius(&jac, k).max(1e-300);
        let mut step = linalg::solve(&jac, &rhs, k)
            .or_else(|| linalg::solve_damped(&jac, &rhs, k, 1e-10 * scale * scale))?;
        let len = norm(&step);
        if len > max_step {
            step = linalg::scale(&step, max_step / len);
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let u = [t * step[0], t * step[1]];
            if let Ok(q) = lift(&u) {
                if let Ok(fq) = residual(&q) {
                    if norm(&fq) < r0 {
                        p = q;
                        moved = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !moved || t * norm(&step) < 1e-15 * (1.0 + norm(&p)) {
            break;
        }
    }
    let w = tangential_part(level, v, &p).ok()?;
    (norm(&w) < ZERO_TOLERANCE).then_some(p)
}

/// Tangential field in the graph chart at `center`, as an ℝ^{n−1}-valued map
/// of chart parameters.
pub fn chart_field<'a>(
    level: &'a LevelSet,
    v: &'a dyn VectorField,
    chart: &'a crate::manifold::BoundaryChart,
) -> impl Fn(&Vec3) -> Result<Vec3> + Sync + 'a {
    move |u: &Vec3| {
        let x = chart.point(level, &[u[0], u[1]])?;
        let w = tangential_part(level, v, &x)?;
        let t = chart.tangent_coords(&w);
        Ok([t[0], t[1], 0.0])
    }
}

fn chart_ring(k: usize, r: f64) -> Vec<Vec3> {
    match k {
        1 => vec![[r, 0.0, 0.0], [-r, 0.0, 0.0]],
        2 => (0..64)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / 64.0;
                [r * a.cos(), r * a.sin(), 0.0]
            })
            .collect(),
        _ => Vec::new(),
    }
}

struct TangentialZero {
    position: Vec3,
    radius: f64,
    det: f64,
}

/// Isolated zeros of `v∥` on a level set of dimension ≥ 1.
fn tangential_zeros(
    level: &LevelSet,
    v: &dyn VectorField,
    sample: &LevelSample,
    par_norms: &[f64],
    opts: &SearchOptions,
) -> Result<Vec<TangentialZero>> {
    let k = level.dim() - 1;
    let seeds: Vec<Vec3> = (0..sample.points.len())
        .filter(|&i| {
            sample.neighbors[i]
                .iter()
                .all(|&j| par_norms[i] < par_norms[j] || (par_norms[i] == par_norms[j] && i < j))
        })
        .map(|i| sample.points[i])
        .collect();
    let polished = par::map(opts.exec, &seeds, |s| polish_tangential(level, v, s));
    let mut found: Vec<Vec3> = polished.into_iter().flatten().collect();
    found.sort_by(cmp_points);
    let zeros = dedup(found, DEDUP_RADIUS);
    check_clusters(&zeros)?;
    let diag = level.bbox().diagonal();
    zeros
        .iter()
        .map(|p| {
            let chart = level.chart(p)?;
            let w = chart_field(level, v, &chart);
            let others = zeros
                .iter()
                .filter(|q| *q != p)
                .map(|q| dist(p, q))
                .fold(f64::INFINITY, f64::min);
            let r_max = chart.radius.min(0.25 * others).min(0.25 * diag);
            let radius = isolation_radius(r_max, |r| {
                chart_ring(k, r)
                    .iter()
                    .map(|u| w(u).map(|y| norm(&y)).unwrap_or(0.0))
                    .fold(f64::INFINITY, f64::min)
            })
            .ok_or(Error::SuspectedNonIsolatedZero(*p))?;
            let h = 1e-6 * radius.min(1.0);
            let mut jac: Mat3 = [[0.0; 3]; 3];
            for j in 0..k {
                let mut up = ZERO;
                let mut um = ZERO;
                up[j] = h;
                um[j] = -h;
                let fp = w(&up)?;
                let fm = w(&um)?;
                for i in 0..k {
                    jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
            Ok(TangentialZero {
                position: *p,
                radius,
                det: det(&jac, k),
            })
        })
        .collect()
}

/// Zeros of the tangential component on `∂M`, each tagged with the side the
/// field points to.
pub fn find_boundary_tangential_zeros(
    m: &DomainManifold,
    collar: Collar,
    v: &dyn VectorField,
    opts: &SearchOptions,
) -> Result<Vec<ZeroRecord>> {
    let level = m.level();
    let sample = sample_boundary(level, opts)?;
    boundary_zeros_from_sample(level, collar, v, &sample, opts)
}

pub fn boundary_zeros_from_sample(
    level: &LevelSet,
    collar: Collar,
    v: &dyn VectorField,
    sample: &LevelSample,
    opts: &SearchOptions,
) -> Result<Vec<ZeroRecord>> {
    let (scan, par_norms) = scan_boundary(level, collar, v, sample, opts.exec)?;
    if scan.min_norm < BOUNDARY_ZERO_FLOOR {
        return Err(Error::ZeroOnBoundary(scan.argmin_norm));
    }
    let n = level.dim();
    let located: Vec<TangentialZero> = if n == 1 {
        let pts = &sample.points;
        pts.iter()
            .map(|p| TangentialZero {
                position: *p,
                radius: pts
                    .iter()
                    .filter(|q| *q != p)
                    .map(|q| 0.5 * dist(p, q))
                    .fold(f64::INFINITY, f64::min),
                det: 1.0,
            })
            .collect()
    } else {
        if scan.tangential_vanishes() {
            return Err(Error::NotTame(
                "tangential component vanishes identically on the boundary".into(),
            ));
        }
        tangential_zeros(level, v, sample, &par_norms, opts)?
    };
    let mut out = Vec::with_capacity(located.len());
    for z in located {
        let val = v.eval(&z.position)?;
        if norm(&val) < BOUNDARY_ZERO_FLOOR {
            return Err(Error::ZeroOnBoundary(z.position));
        }
        let side = decompose(level, collar, &z.position, &val)?.inwardness();
        if side == Inwardness::Tangent {
            return Err(Error::NotTame(format!(
                "field tangent to the boundary at the tangential zero {:?}",
                z.position
            )));
        }
        out.push(ZeroRecord {
            position: z.position,
            kind: ZeroKind::BoundaryTangentialZero,
            isolation_radius: z.radius,
            jacobian_det: z.det,
            transverse_sign: Some(side),
        });
    }
    Ok(out)
}

/// Zeros of the tangential projection of `v` on a closed hypersurface.
pub fn find_surface_zeros(h: &Hypersurface, v: &dyn VectorField, opts: &SearchOptions) -> Result<Vec<ZeroRecord>> {
    let level = h.level();
    let sample = sample_boundary(level, opts)?;
    let (scan, par_norms) = scan_boundary(level, Collar::NegG, v, &sample, opts.exec)?;
    if scan.tangential_vanishes() {
        return Err(Error::NotTame("tangential component vanishes identically".into()));
    }
    Ok(tangential_zeros(level, v, &sample, &par_norms, opts)?
        .into_iter()
        .map(|z| ZeroRecord {
            position: z.position,
            kind: ZeroKind::BoundaryTangentialZero,
            isolation_radius: z.radius,
            jacobian_det: z.det,
            transverse_sign: None,
        })
        .collect())
}

/// Nonsingular linearization at the zero, in ambient coordinates for
/// interior zeros and chart coordinates for tangential ones.
pub fn check_transverse(record: &ZeroRecord) -> bool {
    record.jacobian_det.abs() > TRANSVERSE_THRESHOLD
}
