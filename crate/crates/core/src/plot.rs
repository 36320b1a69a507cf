//! SVG pictures of planar domains: the boundary curve, short normalized
//! field streaks inside the domain, and zeros labelled with their
//! contributions.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::index::IndexReport;
use crate::linalg::{norm, Vec3};
use crate::manifold::DomainManifold;
use crate::zerofind::ZeroKind;

const SIZE: f64 = 600.0;
const OUTLINE_GRID: usize = 200;
const STREAK_GRID: usize = 24;

struct View {
    lo: [f64; 2],
    scale: f64,
}

impl View {
    fn px(&self, p: &[f64]) -> (f64, f64) {
        (
            (p[0] - self.lo[0]) * self.scale,
            SIZE - (p[1] - self.lo[1]) * self.scale,
        )
    }
}

/// Marching-squares segments of `{g = 0}` on an `n × n` grid.
pub fn outline_segments(m: &DomainManifold, n: usize) -> Result<Vec<[[f64; 2]; 2]>> {
    let level = m.level();
    let b = level.bbox();
    let (x0, y0) = (b.lo[0], b.lo[1]);
    let hx = (b.hi[0] - x0) / n as f64;
    let hy = (b.hi[1] - y0) / n as f64;
    let mut g = vec![0.0; (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            g[j * (n + 1) + i] = level.value(&[x0 + i as f64 * hx, y0 + j as f64 * hy, 0.0])?;
        }
    }
    let at = |i: usize, j: usize| g[j * (n + 1) + i];
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let mut crossings = Vec::with_capacity(4);
            for k in 0..4 {
                let (a, b) = (corners[k], corners[(k + 1) % 4]);
                let (ga, gb) = (at(a.0, a.1), at(b.0, b.1));
                if (ga < 0.0) != (gb < 0.0) {
                    let t = ga / (ga - gb);
                    let xa = [x0 + a.0 as f64 * hx, y0 + a.1 as f64 * hy];
                    let xb = [x0 + b.0 as f64 * hx, y0 + b.1 as f64 * hy];
                    crossings.push([xa[0] + t * (xb[0] - xa[0]), xa[1] + t * (xb[1] - xa[1])]);
                }
            }
            // saddle cells pair crossings in edge order
            for pair in crossings.chunks_exact(2) {
                out.push([pair[0], pair[1]]);
            }
        }
    }
    Ok(out)
}

/// SVG text for a two-dimensional domain.
pub fn render_svg(m: &DomainManifold, v: &dyn VectorField, report: Option<&IndexReport>) -> Result<String> {
    if m.dim() != 2 {
        return Err(Error::ArityMismatch(format!("plots need dimension 2, got {}", m.dim())));
    }
    let level = m.level();
    let b = level.bbox();
    let span = (b.hi[0] - b.lo[0]).max(b.hi[1] - b.lo[1]);
    let view = View {
        lo: [b.lo[0], b.lo[1]],
        scale: SIZE / span,
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(s, "<title>{}</title>", m.name());
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    let _ = writeln!(s, "<g id=\"outline\" stroke=\"black\" stroke-width=\"2\" fill=\"none\">");
    for [a, c] in outline_segments(m, OUTLINE_GRID)? {
        let (x1, y1) = view.px(&a);
        let (x2, y2) = view.px(&c);
        let _ = writeln!(s, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>");
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, "<g id=\"streaks\" stroke=\"steelblue\" stroke-width=\"1\">");
    let h = span / STREAK_GRID as f64;
    for j in 0..STREAK_GRID {
        for i in 0..STREAK_GRID {
            let p: Vec3 = [b.lo[0] + (i as f64 + 0.5) * h, b.lo[1] + (j as f64 + 0.5) * h, 0.0];
            if !b.contains(&p) || level.value(&p)? > 0.0 {
                continue;
            }
            let w = v.eval(&p)?;
            let len = norm(&w);
            if len < 1e-12 {
                continue;
            }
            let q = [p[0] + 0.4 * h * w[0] / len, p[1] + 0.4 * h * w[1] / len];
            let (x1, y1) = view.px(&p);
            let (x2, y2) = view.px(&q);
            let _ = writeln!(s, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>");
            let _ = writeln!(s, "<circle cx=\"{x2:.2}\" cy=\"{y2:.2}\" r=\"1.5\" fill=\"steelblue\"/>");
        }
    }
    let _ = writeln!(s, "</g>");

    if let Some(r) = report {
        let _ = writeln!(s, "<g id=\"zeros\" font-family=\"sans-serif\" font-size=\"14\">");
        for z in &r.zeros {
            let (x, y) = view.px(&z.record.position);
            let color = match z.record.kind {
                ZeroKind::InteriorZero => "crimson",
                ZeroKind::BoundaryTangentialZero => "darkorange",
            };
            let _ = writeln!(s, "<circle class=\"zero\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{color}\"/>");
            let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", x + 7.0, y - 7.0, z.contribution);
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
