//! Euler characteristics: a cubical-complex oracle on voxelized level sets
//! and a catalog of known values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::manifold::{unflatten, LevelSet};
use crate::par::{self, Execution};

pub const DEFAULT_RESOLUTION: usize = 64;
const MAX_REFINEMENTS: usize = 3;

/// Which voxels are included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inclusion {
    /// `g(center) ≤ 0`
    Sublevel,
    /// `|g(center)|/‖∇g(center)‖ ≤ voxel diagonal`
    Thickened,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicalApproximation {
    pub resolution: usize,
    /// Cell counts by dimension, vertices first.
    pub cells: Vec<u64>,
    pub chi: i64,
}

/// Voxel occupancy on a `resolution^n` grid over the bbox.
fn voxelize(level: &LevelSet, inclusion: Inclusion, resolution: usize, exec: Execution) -> Result<Vec<bool>> {
    let n = level.dim();
    let bbox = level.bbox();
    let diag = bbox.grid_spacing(resolution) * (n as f64).sqrt();
    let total = resolution.pow(n as u32);
    par::map_range(exec, total, |k| {
        let p = bbox.grid_point(&unflatten(k, resolution, n), resolution);
        match inclusion {
            Inclusion::Sublevel => Ok(level.value(&p)? <= 0.0),
            Inclusion::Thickened => {
                let (g, grad) = level.value_and_gradient(&p)?;
                Ok(g.abs() <= diag * norm(&grad))
            }
        }
    })
    .into_iter()
    .collect()
}

/// Cell counts of the union of closed voxels. Cells are addressed on the
/// doubled lattice `0..=2·resolution` per axis; odd coordinates are open
/// intervals, even ones vertices, and a cell belongs to the union iff one
/// of its adjacent voxels is occupied.
fn count_cells(occupied: &[bool], resolution: usize, n: usize, exec: Execution) -> Vec<u64> {
    let side = 2 * resolution + 1;
    let slabs = par::map_range(exec, side, |top| {
        let mut counts = vec![0u64; n + 1];
        let inner = side.pow(n as u32 - 1);
        for rest in 0..inner {
            let mut c = [0usize; 3];
            let mut r = rest;
            for slot in c.iter_mut().take(n - 1) {
                *slot = r % side;
                r /= side;
            }
            c[n - 1] = top;
            if cell_present(occupied, resolution, n, &c) {
                let dim = c.iter().take(n).filter(|&&x| x % 2 == 1).count();
                counts[dim] += 1;
            }
        }
        counts
    });
    let mut counts = vec![0u64; n + 1];
    for slab in slabs {
        for (a, b) in counts.iter_mut().zip(slab) {
            *a += b;
        }
    }
    counts
}

fn cell_present(occupied: &[bool], resolution: usize, n: usize, c: &[usize; 3]) -> bool {
    let mut choices = [[usize::MAX; 2]; 3];
    for a in 0..n {
        if c[a] % 2 == 1 {
            choices[a] = [c[a] / 2, usize::MAX];
        } else {
            let v = c[a] / 2;
            choices[a] = [
                if v > 0 { v - 1 } else { usize::MAX },
                if v < resolution { v } else { usize::MAX },
            ];
        }
    }
    let mut stride = [1usize; 3];
    for a in 1..n {
        stride[a] = stride[a - 1] * resolution;
    }
    let combos = 1usize << n;
    (0..combos).any(|mask| {
        let mut flat = 0usize;
        for a in 0..n {
            let v = choices[a][(mask >> a) & 1];
            if v == usize::MAX {
                return false;
            }
            flat += v * stride[a];
        }
        occupied[flat]
    })
}

pub fn cubical_approximation(
    level: &LevelSet,
    inclusion: Inclusion,
    resolution: usize,
    exec: Execution,
) -> Result<CubicalApproximation> {
    let n = level.dim();
    let occupied = voxelize(level, inclusion, resolution, exec)?;
    let cells = count_cells(&occupied, resolution, n, exec);
    let chi = cells
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    Ok(CubicalApproximation {
        resolution,
        cells,
        chi,
    })
}

/// χ of the voxelized set, accepted once two consecutive resolutions agree.
pub fn chi_voxel(level: &LevelSet, inclusion: Inclusion, resolution: usize) -> Result<i64> {
    chi_voxel_with(level, inclusion, resolution, Execution::default())
}

pub fn chi_voxel_with(
    level: &LevelSet,
    inclusion: Inclusion,
    resolution: usize,
    exec: Execution,
) -> Result<i64> {
    if resolution < 16 {
        return Err(Error::Schema {
            key: "resolution".into(),
            message: format!("voxel resolution {resolution} is below 16"),
        });
    }
    let mut res = resolution;
    let mut prev = cubical_approximation(level, inclusion, res, exec)?.chi;
    let mut history = vec![prev];
    for _ in 0..MAX_REFINEMENTS {
        res *= 2;
        let next = cubical_approximation(level, inclusion, res, exec)?.chi;
        history.push(next);
        if next == prev {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Unstable(format!(
        "voxel χ by resolution from {resolution}: {history:?}"
    )))
}

/// Known χ of the catalog shapes.
pub fn chi_catalog(name: &str) -> Result<i64> {
    if let Some(k) = name.strip_prefix("ball_") {
        return match k {
            "1" | "2" | "3" => Ok(1),
            _ => Err(Error::UnknownShape(name.into())),
        };
    }
    if let Some(k) = name
        .strip_prefix("disk_with_")
        .and_then(|s| s.strip_suffix("_holes"))
    {
        let k: i64 = k.parse().map_err(|_| Error::UnknownShape(name.into()))?;
        return Ok(1 - k);
    }
    match name {
        "interval" => Ok(1),
        "annulus" | "solid_torus" | "torus2" | "circle" => Ok(0),
        "spherical_shell" | "sphere2" => Ok(2),
        _ => Err(Error::UnknownShape(name.into())),
    }
}

/// Known χ of the boundary of a catalog domain.
pub fn chi_boundary_catalog(name: &str) -> Result<i64> {
    if name.starts_with("disk_with_") {
        chi_catalog(name)?;
        return Ok(0);
    }
    match name {
        "interval" | "ball_1" => Ok(2),
        "ball_2" | "annulus" | "solid_torus" => Ok(0),
        "ball_3" => Ok(2),
        "spherical_shell" => Ok(4),
        _ => Err(Error::UnknownShape(name.into())),
    }
}

/// χ of a catalog domain's boundary, falling back to the voxel oracle on a
/// thickening of `{g = 0}` (or a root count in dimension one).
pub fn chi_boundary(level: &LevelSet, resolution: usize) -> Result<i64> {
    if let Ok(c) = chi_boundary_catalog(level.name()) {
        return Ok(c);
    }
    if level.dim() == 1 {
        let sample = level.sample_level_set(resolution, Execution::default())?;
        return Ok(sample.points.len() as i64);
    }
    chi_voxel(level, Inclusion::Thickened, resolution)
}

/// χ of a domain's sublevel set, catalog first.
pub fn chi_domain(level: &LevelSet, resolution: usize) -> Result<i64> {
    chi_catalog(level.name()).or_else(|_| chi_voxel(level, Inclusion::Sublevel, resolution))
}

/// χ of a hypersurface, catalog first.
pub fn chi_surface(level: &LevelSet, resolution: usize) -> Result<i64> {
    chi_catalog(level.name()).or_else(|_| chi_voxel(level, Inclusion::Thickened, resolution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{DomainManifold, Hypersurface};

    #[test]
    fn disk_and_annulus() {
        let disk = DomainManifold::parse("x1^2 + x2^2 - 1", &[(-2.0, 2.0), (-2.0, 2.0)], "d").unwrap();
        assert_eq!(chi_voxel(disk.level(), Inclusion::Sublevel, 64).unwrap(), 1);
        let ann = DomainManifold::parse(
            "(x1^2 + x2^2 - 1)*(x1^2 + x2^2 - 4)",
            &[(-3.0, 3.0), (-3.0, 3.0)],
            "a",
        )
        .unwrap();
        assert_eq!(chi_voxel(ann.level(), Inclusion::Sublevel, 64).unwrap(), 0);
    }

    #[test]
    fn torus_thickening() {
        let t = Hypersurface::parse(
            "(sqrt(x1^2 + x2^2) - 2)^2 + x3^2 - 1",
            &[(-4.0, 4.0), (-4.0, 4.0), (-2.0, 2.0)],
            "t",
        )
        .unwrap();
        assert_eq!(chi_voxel(t.level(), Inclusion::Thickened, 32).unwrap(), 0);
    }

    #[test]
    fn single_voxel_counts() {
        let occupied = vec![true];
        assert_eq!(count_cells(&occupied, 1, 3, Execution::Sequential), vec![8, 12, 6, 1]);
        assert_eq!(count_cells(&occupied, 1, 2, Execution::Sequential), vec![4, 4, 1]);
    }

    #[test]
    fn two_diagonal_squares_share_a_vertex() {
        let occupied = vec![true, false, false, true];
        let c = count_cells(&occupied, 2, 2, Execution::Sequential);
        assert_eq!(c, vec![7, 8, 2]);
        assert_eq!(c[0] as i64 - c[1] as i64 + c[2] as i64, 1);
    }

    #[test]
    fn catalog_values() {
        assert_eq!(chi_catalog("ball_2").unwrap(), 1);
        assert_eq!(chi_catalog("spherical_shell").unwrap(), 2);
        assert_eq!(chi_catalog("torus2").unwrap(), 0);
        assert_eq!(chi_catalog("disk_with_2_holes").unwrap(), -1);
        assert!(matches!(chi_catalog("klein"), Err(Error::UnknownShape(_))));
    }

    #[test]
    fn boundary_identity_on_catalog_domains() {
        for (name, n) in [
            ("ball_1", 1),
            ("ball_2", 2),
            ("ball_3", 3),
            ("annulus", 2),
            ("disk_with_2_holes", 2),
            ("solid_torus", 3),
            ("spherical_shell", 3),
        ] {
            let expected = if n % 2 == 1 { 2 * chi_catalog(name).unwrap() } else { 0 };
            assert_eq!(chi_boundary_catalog(name).unwrap(), expected, "{name}");
        }
    }

    #[test]
    fn modes_agree() {
        let disk = DomainManifold::parse("x1^2 + x2^2 - 1", &[(-2.0, 2.0), (-2.0, 2.0)], "d").unwrap();
        let a = cubical_approximation(disk.level(), Inclusion::Sublevel, 40, Execution::Parallel).unwrap();
        let b = cubical_approximation(disk.level(), Inclusion::Sublevel, 40, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
