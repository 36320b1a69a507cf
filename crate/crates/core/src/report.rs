//! Canonical JSON reports.
//!
//! Keys are sorted, half-integers are exact strings (`"1"`, `"-1/2"`), lines
//! end in LF, and nothing depends on the clock, so a rerun with the same
//! scene and options reproduces the file byte for byte.

use std::path::Path;

use serde_json::{json, Value};

use crate::complexfield::ComplexOutcome;
use crate::error::Result;
use crate::index::{IndexReport, SurfaceReport, ZeroContribution};
use crate::scene::Scene;
use crate::verify::Verdict;

pub const TOOL: &str = "phindex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn zero_json(z: &ZeroContribution, dim: usize) -> Value {
    let r = &z.record;
    json!({
        "position": &r.position[..dim],
        "kind": r.kind,
        "local_index": z.local_index,
        "contribution": z.contribution,
        "jacobian_det": r.jacobian_det,
        "isolation_radius": r.isolation_radius,
        "side": r.transverse_sign,
    })
}

fn header(scene: &Scene) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!({"name": TOOL, "version": VERSION}));
    m.insert("scene".into(), scene.to_json());
    m.insert(
        "run".into(),
        json!({
            "seed": scene.options.seed,
            "depth": scene.options.depth,
            "resolution": scene.options.resolution,
            "auto_tame": scene.options.auto_tame,
        }),
    );
    m
}

/// Report of an index run on a domain.
pub fn domain_report(scene: &Scene, r: &IndexReport, chi: i64, verdicts: &[Verdict]) -> Value {
    let mut m = header(scene);
    let zeros: Vec<Value> = r.zeros.iter().map(|z| zero_json(z, r.dim)).collect();
    m.insert("collar".into(), json!(r.collar.name()));
    m.insert("zeros".into(), Value::Array(zeros));
    m.insert("ind_interior".into(), json!(r.ind_interior));
    m.insert("ind_boundary".into(), json!(r.ind_boundary));
    m.insert("ind_total".into(), json!(r.ind_total));
    m.insert("chi".into(), json!(chi));
    m.insert("morse_minus".into(), json!(r.morse_minus));
    m.insert("morse_plus".into(), json!(r.morse_plus));
    m.insert("uniform_boundary".into(), json!(r.uniform_boundary));
    m.insert("perturbation".into(), json!(r.perturbation));
    m.insert("verdicts".into(), json!(verdicts));
    Value::Object(m)
}

/// Report of a run on a closed hypersurface. The real field's zeros are
/// present when it was indexed; the complex outcome when the field is
/// complex.
pub fn surface_report(
    scene: &Scene,
    real: Option<&SurfaceReport>,
    complex: Option<&ComplexOutcome>,
    chi: i64,
    verdicts: &[Verdict],
) -> Value {
    let mut m = header(scene);
    let dim = scene.dim;
    if let Some(r) = real {
        let zeros: Vec<Value> = r.zeros.iter().map(|z| zero_json(z, dim)).collect();
        m.insert("zeros".into(), Value::Array(zeros));
        m.insert("ind_total".into(), json!(r.total.to_string()));
    }
    if let Some(c) = complex {
        m.insert(
            "complex".into(),
            json!({
                "m_star": c.m_star,
                "threshold": c.threshold,
                "pitch": c.pitch,
                "lipschitz": c.lipschitz,
                "witness": c.witness.map(|w| w[..dim].to_vec()),
                "witness_modulus": c.witness_modulus,
            }),
        );
    }
    m.insert("chi".into(), json!(chi));
    m.insert("verdicts".into(), json!(verdicts));
    Value::Object(m)
}

/// Error object printed by the CLI.
pub fn error_object(e: &crate::Error) -> Value {
    json!({"error": {"kind": e.kind(), "message": e.to_string()}})
}

pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn write_report(value: &Value, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render(value))?;
    Ok(())
}
