//! Interior and boundary indices, their totals, and the split of the
//! boundary index by the side the field points to.

use serde::Serialize;

use crate::degree::{degree_with, SphereMap};
use crate::error::{Error, Result};
use crate::euler;
use crate::field::{SharedField, VectorField};
use crate::half::HalfInteger;
use crate::linalg::{Vec3, ZERO};
use crate::manifold::{Collar, DomainManifold, Hypersurface, Inwardness, LevelSet};
use crate::par::Execution;
use crate::verify::{self, PerturbationLog, TameOptions};
use crate::zerofind::{self, SearchOptions, ZeroKind, ZeroRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    pub search: SearchOptions,
    pub auto_tame: bool,
    pub seed: u64,
    /// Voxel resolution for Euler-characteristic fallbacks.
    pub resolution: usize,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            search: SearchOptions::default(),
            auto_tame: false,
            seed: 0,
            resolution: euler::DEFAULT_RESOLUTION,
        }
    }
}

/// A zero with its local index: the interior index, or the tangential
/// index `k` before the `±½` rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroContribution {
    pub record: ZeroRecord,
    pub local_index: i64,
    pub contribution: HalfInteger,
}

/// The field is nowhere tangential-nonzero on `∂M` and points strictly one
/// way; the boundary index is then `∓½ χ(∂M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UniformBoundary {
    pub side: Inwardness,
    pub chi_boundary: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub dim: usize,
    pub collar: Collar,
    pub zeros: Vec<ZeroContribution>,
    pub ind_interior: HalfInteger,
    pub ind_boundary: HalfInteger,
    pub ind_total: HalfInteger,
    pub morse_minus: i64,
    pub morse_plus: i64,
    pub uniform_boundary: Option<UniformBoundary>,
    pub perturbation: Option<PerturbationLog>,
}

fn stable_degree(dim: usize, center: Vec3, radius: f64, f: &(dyn Fn(&Vec3) -> Result<Vec3> + Sync), exec: Execution) -> Result<i64> {
    let a = degree_with(&SphereMap::new(dim, center, radius, f), exec)?.degree;
    let b = degree_with(&SphereMap::new(dim, center, 0.5 * radius, f), exec)?.degree;
    if a != b {
        return Err(Error::DegreeUnstable(format!(
            "degree {a} at radius {radius:e}, {b} at half radius, centre {center:?}"
        )));
    }
    Ok(a)
}

/// Degree of `v/‖v‖` on the isolation sphere of an interior zero.
pub fn interior_index(v: &dyn VectorField, z: &ZeroRecord) -> Result<i64> {
    interior_index_with(v, z, Execution::default())
}

pub fn interior_index_with(v: &dyn VectorField, z: &ZeroRecord, exec: Execution) -> Result<i64> {
    let f = |x: &Vec3| v.eval(x);
    stable_degree(v.dim(), z.position, z.isolation_radius, &f, exec)
}

/// Index of the tangential component at a zero on the level set, computed in
/// a graph chart (with the dropped axis forced when given).
pub fn tangential_index(
    level: &LevelSet,
    v: &dyn VectorField,
    z: &ZeroRecord,
    forced_axis: Option<usize>,
    exec: Execution,
) -> Result<i64> {
    let n = level.dim();
    if n == 1 {
        return Ok(1);
    }
    let chart = match forced_axis {
        Some(a) => level.chart_with_axis(&z.position, a)?,
        None => level.chart(&z.position)?,
    };
    let radius = z.isolation_radius.min(chart.radius);
    let w = zerofind::chart_field(level, v, &chart);
    stable_degree(n - 1, ZERO, radius, &w, exec)
}

/// `±k/2`, `+` where the field points inwards.
pub fn boundary_zero_index(level: &LevelSet, v: &dyn VectorField, z: &ZeroRecord) -> Result<HalfInteger> {
    let k = tangential_index(level, v, z, None, Execution::default())?;
    signed_half(k, z)
}

fn signed_half(k: i64, z: &ZeroRecord) -> Result<HalfInteger> {
    match z.transverse_sign {
        Some(Inwardness::Inward) => Ok(HalfInteger::from_halves(k)),
        Some(Inwardness::Outward) => Ok(HalfInteger::from_halves(-k)),
        _ => Err(Error::NotTame(format!("no transverse sign at {:?}", z.position))),
    }
}

/// Tangential indices in every admissible graph chart; all must agree.
pub fn tangential_index_all_charts(level: &LevelSet, v: &dyn VectorField, z: &ZeroRecord) -> Result<Vec<(usize, i64)>> {
    let mut out = Vec::new();
    for axis in 0..level.dim() {
        match level.chart_with_axis(&z.position, axis) {
            Ok(_) => out.push((axis, tangential_index(level, v, z, Some(axis), Execution::default())?)),
            Err(Error::ChartTooSmall { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `ind v = ind_∘ v + ind_∂ v` with the per-zero breakdown. Non-tame input
/// is an error unless `auto_tame` is set, in which case the field is
/// perturbed near the boundary first and the perturbation is recorded.
pub fn full_index(m: &DomainManifold, collar: Collar, v: &SharedField, opts: &IndexOptions) -> Result<IndexReport> {
    match index_of(m, collar, v.as_ref(), opts) {
        Err(e @ (Error::ZeroOnBoundary(_) | Error::NotTame(_) | Error::SuspectedNonIsolatedZero(_)))
            if opts.auto_tame =>
        {
            let tame = TameOptions {
                seed: opts.seed,
                search: opts.search,
                ..TameOptions::default()
            };
            let tamed = verify::make_tame(m, collar, v, &tame).map_err(|t| match t {
                Error::CannotTame(_) => t,
                _ => e,
            })?;
            let mut report = index_of(m, collar, tamed.field.as_ref(), opts)?;
            report.perturbation = tamed.log;
            Ok(report)
        }
        other => other,
    }
}

fn index_of(m: &DomainManifold, collar: Collar, v: &dyn VectorField, opts: &IndexOptions) -> Result<IndexReport> {
    let level = m.level();
    let n = level.dim();
    let exec = opts.search.exec;
    let interior = zerofind::find_interior_zeros(m, v, &opts.search)?;
    let sample = zerofind::sample_boundary(level, &opts.search)?;
    let (scan, _) = zerofind::scan_boundary(level, collar, v, &sample, exec)?;
    if scan.min_norm < zerofind::BOUNDARY_ZERO_FLOOR {
        return Err(Error::ZeroOnBoundary(scan.argmin_norm));
    }
    let mut uniform = None;
    let boundary = if n >= 2 && scan.tangential_vanishes() {
        let side = scan.uniform_sign().ok_or_else(|| {
            Error::NotTame("tangential component vanishes identically and the field is tangent somewhere".into())
        })?;
        uniform = Some(UniformBoundary {
            side,
            chi_boundary: euler::chi_boundary(level, opts.resolution)?,
        });
        Vec::new()
    } else {
        zerofind::boundary_zeros_from_sample(level, collar, v, &sample, &opts.search)?
    };

    let mut zeros = Vec::with_capacity(interior.len() + boundary.len());
    let mut ind_interior = HalfInteger::ZERO;
    for z in interior {
        let k = interior_index_with(v, &z, exec)?;
        ind_interior += HalfInteger::from_int(k);
        zeros.push(ZeroContribution {
            record: z,
            local_index: k,
            contribution: HalfInteger::from_int(k),
        });
    }
    let mut ind_boundary = HalfInteger::ZERO;
    let (mut morse_minus, mut morse_plus) = (0i64, 0i64);
    for z in boundary {
        let k = tangential_index(level, v, &z, None, exec)?;
        let c = signed_half(k, &z)?;
        match z.transverse_sign {
            Some(Inwardness::Inward) => morse_minus += k,
            _ => morse_plus += k,
        }
        ind_boundary += c;
        zeros.push(ZeroContribution {
            record: z,
            local_index: k,
            contribution: c,
        });
    }
    if let Some(u) = uniform {
        match u.side {
            Inwardness::Inward => {
                morse_minus = u.chi_boundary;
                ind_boundary = HalfInteger::from_halves(u.chi_boundary);
            }
            _ => {
                morse_plus = u.chi_boundary;
                ind_boundary = HalfInteger::from_halves(-u.chi_boundary);
            }
        }
    }
    Ok(IndexReport {
        dim: n,
        collar,
        zeros,
        ind_interior,
        ind_boundary,
        ind_total: ind_interior + ind_boundary,
        morse_minus,
        morse_plus,
        uniform_boundary: uniform,
        perturbation: None,
    })
}

/// Sums of tangential indices over inward and outward zeros.
pub fn morse_split(report: &IndexReport) -> (i64, i64) {
    (report.morse_minus, report.morse_plus)
}

/// Index of a tangent field on a closed hypersurface: the sum of the
/// tangential indices of its projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceReport {
    pub zeros: Vec<ZeroContribution>,
    pub total: i64,
}

pub fn surface_index(h: &Hypersurface, v: &dyn VectorField, opts: &IndexOptions) -> Result<SurfaceReport> {
    let level = h.level();
    let records = zerofind::find_surface_zeros(h, v, &opts.search)?;
    let mut zeros = Vec::with_capacity(records.len());
    let mut total = 0;
    for z in records {
        let k = tangential_index(level, v, &z, None, opts.search.exec)?;
        total += k;
        zeros.push(ZeroContribution {
            record: z,
            local_index: k,
            contribution: HalfInteger::from_int(k),
        });
    }
    Ok(SurfaceReport { zeros, total })
}

/// Every zero of the report, in report order, with its kind.
pub fn zero_kinds(report: &IndexReport) -> Vec<ZeroKind> {
    report.zeros.iter().map(|z| z.record.kind).collect()
}
