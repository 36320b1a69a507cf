//! Scene files: a manifold, a field and run options as JSON.
//!
//! ```json
//! {
//!   "name": "ball2_constant",
//!   "shape": "ball_2",
//!   "dim": 2,
//!   "manifold": {"kind": "domain", "g": "x1^2+x2^2-1", "bbox": [[-2, 2], [-2, 2]]},
//!   "field": {"kind": "real", "v": ["1", "0"]},
//!   "options": {"collar": "neg_g", "seed": 0, "depth": 9, "resolution": 64, "auto_tame": false}
//! }
//! ```
//!
//! `dim` is the ambient dimension. `shape` names a catalog shape with known
//! Euler characteristic and defaults to `name`. Complex fields
//! (`"kind": "complex"` with `xi` and `eta`) are accepted on hypersurfaces
//! only.

use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::complexfield::ComplexField;
use crate::error::{Error, Result};
use crate::euler;
use crate::field::{ExprField, SharedField};
use crate::index::IndexOptions;
use crate::manifold::{Collar, DomainManifold, Hypersurface};
use crate::zerofind::{SearchOptions, DEFAULT_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    Domain,
    Hypersurface,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Real { v: Vec<String> },
    Complex { xi: Vec<String>, eta: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneOptions {
    pub collar: Collar,
    pub seed: u64,
    pub depth: usize,
    pub resolution: usize,
    pub auto_tame: bool,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions {
            collar: Collar::NegG,
            seed: 0,
            depth: DEFAULT_DEPTH,
            resolution: euler::DEFAULT_RESOLUTION,
            auto_tame: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub shape: String,
    pub dim: usize,
    pub kind: ManifoldKind,
    pub g: String,
    pub bbox: Vec<(f64, f64)>,
    pub field: FieldSpec,
    pub options: SceneOptions,
}

pub const DEPTH_RANGE: (usize, usize) = (1, 16);
pub const RESOLUTION_RANGE: (usize, usize) = (16, 512);

const CATALOG: &[(&str, &str)] = &[
    ("interval_plus1", include_str!("../scenes/interval_plus1.scene")),
    ("interval_radial", include_str!("../scenes/interval_radial.scene")),
    ("ball2_constant", include_str!("../scenes/ball2_constant.scene")),
    ("ball2_radial", include_str!("../scenes/ball2_radial.scene")),
    ("ball3_constant", include_str!("../scenes/ball3_constant.scene")),
    ("ball3_radial", include_str!("../scenes/ball3_radial.scene")),
    ("annulus_rotation", include_str!("../scenes/annulus_rotation.scene")),
    ("annulus_suspension", include_str!("../scenes/annulus_suspension.scene")),
    ("disk_with_2_holes", include_str!("../scenes/disk_with_2_holes.scene")),
    ("solid_torus", include_str!("../scenes/solid_torus.scene")),
    ("spherical_shell", include_str!("../scenes/spherical_shell.scene")),
    ("sphere2_real", include_str!("../scenes/sphere2_real.scene")),
    ("torus2_real", include_str!("../scenes/torus2_real.scene")),
    ("sphere2_complex", include_str!("../scenes/sphere2_complex.scene")),
    ("torus2_complex", include_str!("../scenes/torus2_complex.scene")),
    ("torus2_complex_real", include_str!("../scenes/torus2_complex_real.scene")),
];

/// Names of the built-in scenes.
pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|(n, _)| *n).collect()
}

pub fn catalog_scene(name: &str) -> Result<Scene> {
    let text = CATALOG
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownShape(name.to_string()))?;
    parse_scene(text)
}

/// Reads a scene from a file, or from the catalog when `path` names a
/// built-in scene (with or without the `.scene` suffix) and no such file
/// exists.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    match std::fs::read_to_string(path) {
        Ok(text) => parse_scene(&text),
        Err(e) => {
            let stem = path.to_string_lossy();
            let stem = stem.strip_suffix(".scene").unwrap_or(&stem);
            if CATALOG.iter().any(|(n, _)| *n == stem) {
                catalog_scene(stem)
            } else {
                Err(Error::Io(format!("{}: {e}", path.display())))
            }
        }
    }
}

fn schema(key: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        key: key.to_string(),
        message: message.into(),
    }
}

fn object<'a>(v: &'a Value, key: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(key, "expected an object"))
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(path, "missing"))
}

fn string(v: &Value, key: &str) -> Result<String> {
    v.as_str().map(str::to_string).ok_or_else(|| schema(key, "expected a string"))
}

fn strings(v: &Value, key: &str, dim: usize) -> Result<Vec<String>> {
    let arr = v.as_array().ok_or_else(|| schema(key, "expected an array of strings"))?;
    if arr.len() != dim {
        return Err(schema(key, format!("expected {dim} components, found {}", arr.len())));
    }
    arr.iter().map(|x| string(x, key)).collect()
}

fn unsigned(v: &Value, key: &str, range: (u64, u64)) -> Result<u64> {
    let x = v.as_u64().ok_or_else(|| schema(key, "expected a non-negative integer"))?;
    if x < range.0 || x > range.1 {
        return Err(schema(key, format!("{x} outside {}..={}", range.0, range.1)));
    }
    Ok(x)
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) if prefix.is_empty() => Err(schema(k, "unknown key")),
        Some(k) => Err(schema(&format!("{prefix}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let top = object(&root, "")?;
    reject_unknown(top, &["name", "shape", "dim", "manifold", "field", "options"], "")?;
    let name = string(required(top, "name", "name")?, "name")?;
    let dim = unsigned(required(top, "dim", "dim")?, "dim", (1, 3))? as usize;
    let shape = match top.get("shape") {
        Some(s) => string(s, "shape")?,
        None => name.clone(),
    };

    let man = object(required(top, "manifold", "manifold")?, "manifold")?;
    reject_unknown(man, &["kind", "g", "bbox"], "manifold")?;
    let kind = match string(required(man, "kind", "manifold.kind")?, "manifold.kind")?.as_str() {
        "domain" => ManifoldKind::Domain,
        "hypersurface" if dim >= 2 => ManifoldKind::Hypersurface,
        "hypersurface" => return Err(schema("dim", "hypersurfaces need dim 2 or 3")),
        other => return Err(schema("manifold.kind", format!("unknown kind `{other}`"))),
    };
    let g = string(required(man, "g", "manifold.g")?, "manifold.g")?;
    let bbox = parse_bbox(required(man, "bbox", "manifold.bbox")?, dim)?;

    let fld = object(required(top, "field", "field")?, "field")?;
    let field = match string(required(fld, "kind", "field.kind")?, "field.kind")?.as_str() {
        "real" => {
            reject_unknown(fld, &["kind", "v"], "field")?;
            FieldSpec::Real {
                v: strings(required(fld, "v", "field.v")?, "field.v", dim)?,
            }
        }
        "complex" => {
            reject_unknown(fld, &["kind", "xi", "eta"], "field")?;
            if kind != ManifoldKind::Hypersurface {
                return Err(schema("field.kind", "complex fields need a hypersurface"));
            }
            FieldSpec::Complex {
                xi: strings(required(fld, "xi", "field.xi")?, "field.xi", dim)?,
                eta: strings(required(fld, "eta", "field.eta")?, "field.eta", dim)?,
            }
        }
        other => return Err(schema("field.kind", format!("unknown kind `{other}`"))),
    };

    let mut options = SceneOptions::default();
    if let Some(o) = top.get("options") {
        let o = object(o, "options")?;
        reject_unknown(o, &["collar", "seed", "depth", "resolution", "auto_tame"], "options")?;
        if let Some(c) = o.get("collar") {
            let c = string(c, "options.collar")?;
            options.collar = Collar::from_name(&c).ok_or_else(|| schema("options.collar", format!("unknown collar `{c}`")))?;
        }
        if let Some(s) = o.get("seed") {
            options.seed = unsigned(s, "options.seed", (0, u64::MAX))?;
        }
        if let Some(d) = o.get("depth") {
            let r = (DEPTH_RANGE.0 as u64, DEPTH_RANGE.1 as u64);
            options.depth = unsigned(d, "options.depth", r)? as usize;
        }
        if let Some(r) = o.get("resolution") {
            let range = (RESOLUTION_RANGE.0 as u64, RESOLUTION_RANGE.1 as u64);
            options.resolution = unsigned(r, "options.resolution", range)? as usize;
        }
        if let Some(a) = o.get("auto_tame") {
            options.auto_tame = a.as_bool().ok_or_else(|| schema("options.auto_tame", "expected a boolean"))?;
        }
    }

    let scene = Scene {
        name,
        shape,
        dim,
        kind,
        g,
        bbox,
        field,
        options,
    };
    scene.validate()?;
    Ok(scene)
}

fn parse_bbox(v: &Value, dim: usize) -> Result<Vec<(f64, f64)>> {
    let key = "manifold.bbox";
    let arr = v.as_array().ok_or_else(|| schema(key, "expected an array of intervals"))?;
    if arr.len() != dim {
        return Err(schema(key, format!("expected {dim} intervals, found {}", arr.len())));
    }
    arr.iter()
        .map(|iv| match iv.as_array().map(|p| p.as_slice()) {
            Some([a, b]) => match (a.as_f64(), b.as_f64()) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() && a < b => Ok((a, b)),
                _ => Err(schema(key, "intervals need finite lo < hi")),
            },
            _ => Err(schema(key, "intervals are [lo, hi] pairs")),
        })
        .collect()
}

impl Scene {
    /// Parses every expression once so that errors surface at load time.
    fn validate(&self) -> Result<()> {
        match self.kind {
            ManifoldKind::Domain => drop(self.domain()?),
            ManifoldKind::Hypersurface => drop(self.hypersurface()?),
        }
        match &self.field {
            FieldSpec::Real { .. } => drop(self.real_field()?),
            FieldSpec::Complex { .. } => drop(self.complex_field()?),
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<DomainManifold> {
        if self.kind != ManifoldKind::Domain {
            return Err(schema("manifold.kind", "expected a domain"));
        }
        DomainManifold::parse(&self.g, &self.bbox, &self.shape)
    }

    pub fn hypersurface(&self) -> Result<Hypersurface> {
        if self.kind != ManifoldKind::Hypersurface {
            return Err(schema("manifold.kind", "expected a hypersurface"));
        }
        Hypersurface::parse(&self.g, &self.bbox, &self.shape)
    }

    pub fn real_field(&self) -> Result<ExprField> {
        match &self.field {
            FieldSpec::Real { v } => ExprField::parse(v),
            FieldSpec::Complex { .. } => Err(schema("field.kind", "expected a real field")),
        }
    }

    pub fn shared_field(&self) -> Result<SharedField> {
        Ok(Arc::new(self.real_field()?))
    }

    pub fn complex_field(&self) -> Result<ComplexField> {
        match &self.field {
            FieldSpec::Complex { xi, eta } => ComplexField::parse(xi, eta),
            FieldSpec::Real { .. } => Err(schema("field.kind", "expected a complex field")),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.field, FieldSpec::Complex { .. })
    }

    pub fn index_options(&self) -> IndexOptions {
        IndexOptions {
            search: SearchOptions {
                depth: self.options.depth,
                ..SearchOptions::default()
            },
            auto_tame: self.options.auto_tame,
            seed: self.options.seed,
            resolution: self.options.resolution,
        }
    }

    /// The scene as JSON, with every option spelled out.
    pub fn to_json(&self) -> Value {
        let field = match &self.field {
            FieldSpec::Real { v } => json!({"kind": "real", "v": v}),
            FieldSpec::Complex { xi, eta } => json!({"kind": "complex", "xi": xi, "eta": eta}),
        };
        let kind = match self.kind {
            ManifoldKind::Domain => "domain",
            ManifoldKind::Hypersurface => "hypersurface",
        };
        json!({
            "name": self.name,
            "shape": self.shape,
            "dim": self.dim,
            "manifold": {
                "kind": kind,
                "g": self.g,
                "bbox": self.bbox.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            },
            "field": field,
            "options": {
                "collar": self.options.collar.name(),
                "seed": self.options.seed,
                "depth": self.options.depth,
                "resolution": self.options.resolution,
                "auto_tame": self.options.auto_tame,
            },
        })
    }
}
