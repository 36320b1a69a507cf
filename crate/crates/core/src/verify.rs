//! Perturbations that make a field tame, and verdicts for the index
//! theorem and its corollaries.
//!
//! Every perturbation is supported in the collar band `U^f = {0 ≤ depth < f}`
//! with `f` constant, and is small enough that it adds no zeros there.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::euler;
use crate::field::{Negated, SharedField, Suspension, VectorField};
use crate::half::HalfInteger;
use crate::index::{self, IndexOptions, IndexReport};
use crate::linalg::{self, dist, dot, norm, Mat3, Vec3, ZERO};
use crate::manifold::{decompose, Collar, DomainManifold, Inwardness, LevelSet};
use crate::par;
use crate::zerofind::{self, SearchOptions};

const MAX_SEEDS: usize = 10;
const MAX_SHIFTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PerturbationMethod {
    HalfBallShift,
    CollarBlend,
    RandomLinearJiggle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationLog {
    pub method: PerturbationMethod,
    /// Sampled sup-norm of `v' − v`.
    pub magnitude: f64,
    pub region: String,
    pub seed: u64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TameOptions {
    /// Sup-norm budget; `None` uses a tenth of the largest `‖v‖` on `∂M`.
    pub bound: Option<f64>,
    pub seed: u64,
    /// Blend even when the field is already tame (to draw from `X_{v,f}`).
    pub force_blend: bool,
    pub search: SearchOptions,
}

pub struct Tamed {
    pub field: SharedField,
    pub log: Option<PerturbationLog>,
}

/// Depth below the boundary, `−g/‖∇g‖`, with the unit outward normal.
fn depth_and_normal(level: &LevelSet, x: &Vec3) -> Result<(f64, Vec3)> {
    let (g, grad) = level.value_and_gradient(x)?;
    let gn = norm(&grad);
    if gn < 1e-12 {
        return Ok((f64::INFINITY, ZERO));
    }
    Ok((-g / gn, linalg::scale(&grad, 1.0 / gn)))
}

/// `h(t) = exp(t/(f(t−f)))` on `(0, f)`, 1 at and beyond the boundary, 0
/// from depth `f` on.
pub fn blend_weight(t: f64, f: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= f {
        0.0
    } else {
        (t / (f * (t - f))).exp()
    }
}

fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Half-ball shift at a boundary point `z`: inside the ball of radius `ρ`
/// the field is read off deeper in the domain, so its value at `z` becomes
/// `v(z − ρ/2·n̂)`. The shift fades out smoothly at depth `ρ` and at
/// distance `ρ` from `z`.
pub struct HalfBallShift {
    base: SharedField,
    level: LevelSet,
    center: Vec3,
    rho: f64,
}

impl HalfBallShift {
    pub fn new(base: SharedField, level: LevelSet, center: Vec3, rho: f64) -> Self {
        HalfBallShift {
            base,
            level,
            center,
            rho,
        }
    }
}

impl VectorField for HalfBallShift {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &Vec3) -> Result<Vec3> {
        let s = dist(x, &self.center) / self.rho;
        if s >= 1.0 {
            return self.base.eval(x);
        }
        let (t, nrm) = depth_and_normal(&self.level, x)?;
        if t >= self.rho {
            return self.base.eval(x);
        }
        let shift = bump(s) * (self.rho - t).powi(2) / (2.0 * self.rho);
        self.base.eval(&linalg::axpy(x, -shift, &nrm))
    }
}

/// `v + h(depth)·ε·δ`, where `δ` is a random affine field `Ax + b`, projected
/// onto the level sets of `g` for [`PerturbationMethod::CollarBlend`] and
/// left as is for [`PerturbationMethod::RandomLinearJiggle`].
pub struct CollarPerturbation {
    base: SharedField,
    level: LevelSet,
    a: Mat3,
    b: Vec3,
    eps: f64,
    band: f64,
    tangential: bool,
}

impl CollarPerturbation {
    fn delta(&self, x: &Vec3, nrm: &Vec3) -> Vec3 {
        let n = self.base.dim();
        let mut w = self.b;
        for i in 0..n {
            for j in 0..n {
                w[i] += self.a[i][j] * x[j];
            }
        }
        if self.tangential {
            w = linalg::axpy(&w, -dot(&w, nrm), nrm);
        }
        w
    }
}

impl VectorField for CollarPerturbation {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &Vec3) -> Result<Vec3> {
        let v = self.base.eval(x)?;
        let (t, nrm) = depth_and_normal(&self.level, x)?;
        let h = blend_weight(t, self.band);
        if h == 0.0 {
            return Ok(v);
        }
        Ok(linalg::axpy(&v, h * self.eps, &self.delta(x, &nrm)))
    }
}

/// Points of the collar band at depths `0, f/4, …, f` below sampled
/// boundary points.
fn band_points(level: &LevelSet, boundary: &[Vec3], band: f64) -> Result<Vec<Vec3>> {
    let mut out = Vec::with_capacity(boundary.len() * 5);
    for q in boundary {
        let nrm = level.normal(q)?;
        for k in 0..=4 {
            out.push(linalg::axpy(q, -band * k as f64 / 4.0, &nrm));
        }
    }
    Ok(out)
}

fn sup_difference(a: &dyn VectorField, b: &dyn VectorField, points: &[Vec3], exec: par::Execution) -> Result<f64> {
    let diffs = par::map(exec, points, |p| -> Result<f64> {
        Ok(linalg::dist(&a.eval(p)?, &b.eval(p)?))
    });
    diffs
        .into_iter()
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

/// Tame with transverse tangential zeros: the condition `make_tame` leaves
/// a field alone under.
pub fn check_tame(m: &DomainManifold, collar: Collar, v: &dyn VectorField, search: &SearchOptions) -> Result<()> {
    zerofind::find_interior_zeros(m, v, search)?;
    let zs = zerofind::find_boundary_tangential_zeros(m, collar, v, search)?;
    if let Some(z) = zs.iter().find(|z| !zerofind::check_transverse(z)) {
        return Err(Error::NotTame(format!("degenerate tangential zero at {:?}", z.position)));
    }
    Ok(())
}

/// Perturbs `v` near `∂M` until it is tame with transverse tangential zeros.
/// Boundary zeros are removed by half-ball shifts; non-isolated or
/// degenerate tangential zeros by a collar blend with a random tangential
/// target, falling back to a random affine jiggle.
pub fn make_tame(m: &DomainManifold, collar: Collar, v: &SharedField, opts: &TameOptions) -> Result<Tamed> {
    let level = m.level();
    let search = &opts.search;
    let exec = search.exec;
    let sample = zerofind::sample_boundary(level, search)?;
    let (scan, _) = zerofind::scan_boundary(level, collar, v.as_ref(), &sample, exec)?;
    let bound = opts.bound.unwrap_or(0.1 * scan.max_norm);
    let collar_band = level.collar_band();

    let mut field = v.clone();
    let mut shifts = 0usize;
    let mut shift_region = Vec::new();
    loop {
        match check_tame(m, collar, field.as_ref(), search) {
            Ok(()) if !opts.force_blend => {
                if shifts == 0 {
                    return Ok(Tamed { field, log: None });
                }
                let probe = band_points(level, &sample.points, collar_band)?;
                return Ok(Tamed {
                    log: Some(PerturbationLog {
                        method: PerturbationMethod::HalfBallShift,
                        magnitude: sup_difference(field.as_ref(), v.as_ref(), &probe, exec)?,
                        region: shift_region.join("; "),
                        seed: opts.seed,
                        steps: shifts,
                    }),
                    field,
                });
            }
            Err(Error::ZeroOnBoundary(p)) if shifts < MAX_SHIFTS => {
                let p = level.project(&p)?;
                let mut rho = collar_band;
                let shifted = loop {
                    let cand: SharedField = Arc::new(HalfBallShift::new(field.clone(), level.clone(), p, rho));
                    let probe: Vec<Vec3> = band_points(level, &sample.points, rho)?
                        .into_iter()
                        .filter(|x| dist(x, &p) < rho)
                        .chain(std::iter::once(p))
                        .collect();
                    let mag = sup_difference(cand.as_ref(), field.as_ref(), &probe, exec)?;
                    if mag <= bound || rho < 1e-3 * collar_band {
                        break cand;
                    }
                    rho *= 0.5;
                };
                shift_region.push(format!("half ball of radius {rho:.3e} at {p:?}"));
                field = shifted;
                shifts += 1;
            }
            Err(e @ (Error::ZeroOnBoundary(_) | Error::DegenerateBoundary(_) | Error::ChartTooSmall { .. })) => {
                return Err(e)
            }
            _ => break,
        }
    }

    let interior = zerofind::find_interior_zeros(m, field.as_ref(), search).unwrap_or_default();
    let mut band = collar_band;
    for z in &interior {
        let (t, _) = depth_and_normal(level, &z.position)?;
        band = band.min(0.5 * t);
    }
    let probe = band_points(level, &sample.points, band)?;
    let floor = par::map(exec, &probe, |p| field.eval(p).map(|y| norm(&y)))
        .into_iter()
        .try_fold(f64::INFINITY, |acc, r| r.map(|r| acc.min(r)))?;

    for tangential in [true, false] {
        for attempt in 0..MAX_SEEDS {
            let seed = opts
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(attempt as u64 + if tangential { 0 } else { 1000 });
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = level.dim();
            let mut a = [[0.0; 3]; 3];
            let mut b = ZERO;
            for i in 0..n {
                for e in a[i].iter_mut().take(n) {
                    *e = rng.gen_range(-1.0..1.0);
                }
                b[i] = rng.gen_range(-1.0..1.0);
            }
            let mut pert = CollarPerturbation {
                base: field.clone(),
                level: level.clone(),
                a,
                b,
                eps: 1.0,
                band,
                tangential,
            };
            let delta_max = probe
                .iter()
                .map(|p| {
                    let nrm = level.normal(&level.project(p).unwrap_or(*p)).unwrap_or(ZERO);
                    norm(&pert.delta(p, &nrm))
                })
                .fold(0.0f64, f64::max)
                .max(1e-300);
            pert.eps = (0.5 * floor).min(bound) / delta_max;
            let cand: SharedField = Arc::new(pert);
            if check_tame(m, collar, cand.as_ref(), search).is_ok() {
                let magnitude = sup_difference(cand.as_ref(), v.as_ref(), &probe, exec)?;
                return Ok(Tamed {
                    field: cand,
                    log: Some(PerturbationLog {
                        method: if tangential {
                            PerturbationMethod::CollarBlend
                        } else {
                            PerturbationMethod::RandomLinearJiggle
                        },
                        magnitude,
                        region: format!("collar band of depth {band:.3e}"),
                        seed,
                        steps: shifts + 1,
                    }),
                });
            }
        }
    }
    Err(Error::CannotTame(MAX_SEEDS))
}

/// Outcome of one check. `pass` is exact equality of half-integers (plus
/// any side conditions recorded in the diagnostics).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub expected: HalfInteger,
    pub computed: HalfInteger,
    pub pass: bool,
    pub diagnostics: BTreeMap<String, Value>,
}

impl Verdict {
    fn new(claim: &str, expected: HalfInteger, computed: HalfInteger) -> Verdict {
        Verdict {
            claim: claim.into(),
            expected,
            computed,
            pass: expected == computed,
            diagnostics: BTreeMap::new(),
        }
    }

    fn note(mut self, key: &str, value: Value) -> Verdict {
        self.diagnostics.insert(key.into(), value);
        self
    }
}

fn parity(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `ind(b, (p, 0)) = −ind(a, p)` for the suspension `b(x, t) = (a(x), −t)`.
pub fn suspension_check(a: &SharedField, p: &Vec3, opts: &SearchOptions) -> Result<Verdict> {
    let m = a.dim();
    if m >= 3 {
        return Err(Error::ArityMismatch(format!("suspension of a field on ℝ^{m}")));
    }
    let za = zerofind::isolate_known_zero(a.as_ref(), p, 1.0, opts)?;
    let ia = index::interior_index_with(a.as_ref(), &za, opts.exec)?;
    let b = Suspension(a.clone());
    let mut q = za.position;
    q[m] = 0.0;
    let zb = zerofind::isolate_known_zero(&b, &q, 1.0, opts)?;
    let ib = index::interior_index_with(&b, &zb, opts.exec)?;
    Ok(Verdict::new("suspension", HalfInteger::from_int(-ia), HalfInteger::from_int(ib))
        .note("ind_a", json!(ia))
        .note("radius_a", json!(za.isolation_radius))
        .note("radius_b", json!(zb.isolation_radius)))
}

/// Key of a memoized index run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunKey {
    pub scene: String,
    pub variant: String,
    pub collar: Collar,
    pub seed: u64,
    pub depth: usize,
    pub resolution: usize,
}

/// Memoizes index reports within one process.
#[derive(Default)]
pub struct RunRegistry {
    cache: Mutex<HashMap<RunKey, IndexReport>>,
}

impl RunRegistry {
    pub fn new() -> Self {
        RunRegistry::default()
    }

    pub fn get_or_compute(&self, key: RunKey, compute: impl FnOnce() -> Result<IndexReport>) -> Result<IndexReport> {
        if let Some(r) = self.cache.lock().expect("registry lock").get(&key) {
            return Ok(r.clone());
        }
        let r = compute()?;
        self.cache.lock().expect("registry lock").insert(key, r.clone());
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.cache.lock().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Verdicts on one domain and field, sharing memoized index runs.
pub struct Verifier<'a> {
    pub manifold: &'a DomainManifold,
    pub field: SharedField,
    pub opts: IndexOptions,
    pub scene: String,
    registry: RunRegistry,
}

impl<'a> Verifier<'a> {
    pub fn new(manifold: &'a DomainManifold, field: SharedField, opts: IndexOptions) -> Self {
        Verifier {
            scene: manifold.name().to_string(),
            manifold,
            field,
            opts,
            registry: RunRegistry::new(),
        }
    }

    fn key(&self, variant: &str, collar: Collar) -> RunKey {
        RunKey {
            scene: self.scene.clone(),
            variant: variant.into(),
            collar,
            seed: self.opts.seed,
            depth: self.opts.search.depth,
            resolution: self.opts.resolution,
        }
    }

    pub fn report(&self, collar: Collar) -> Result<IndexReport> {
        self.registry.get_or_compute(self.key("v", collar), || {
            index::full_index(self.manifold, collar, &self.field, &self.opts)
        })
    }

    fn negated_report(&self, collar: Collar) -> Result<IndexReport> {
        self.registry.get_or_compute(self.key("-v", collar), || {
            let neg: SharedField = Arc::new(Negated(self.field.clone()));
            index::full_index(self.manifold, collar, &neg, &self.opts)
        })
    }

    pub fn chi(&self) -> Result<i64> {
        euler::chi_domain(self.manifold.level(), self.opts.resolution)
    }

    fn expected_total(&self) -> Result<i64> {
        Ok(if self.manifold.dim() % 2 == 0 { self.chi()? } else { 0 })
    }

    pub fn theorem_verdict(&self, collar: Collar) -> Result<Verdict> {
        let r = self.report(collar)?;
        let chi = self.chi()?;
        Ok(
            Verdict::new("theorem", HalfInteger::from_int(self.expected_total()?), r.ind_total)
                .note("chi", json!(chi))
                .note("dim", json!(r.dim))
                .note("ind_interior", json!(r.ind_interior))
                .note("ind_boundary", json!(r.ind_boundary)),
        )
    }

    pub fn negation_check(&self, collar: Collar) -> Result<Verdict> {
        let r = self.report(collar)?;
        let s = self.negated_report(collar)?;
        let sign = parity(self.manifold.dim());
        let interior_ok = s.ind_interior == r.ind_interior * sign;
        let boundary_ok = s.ind_boundary == r.ind_boundary * sign;
        let mut v = Verdict::new("negation", r.ind_total * sign, s.ind_total)
            .note("ind_interior", json!([r.ind_interior, s.ind_interior]))
            .note("ind_boundary", json!([r.ind_boundary, s.ind_boundary]));
        v.pass = v.pass && interior_ok && boundary_ok;
        Ok(v)
    }

    pub fn morse_check(&self, collar: Collar) -> Result<Verdict> {
        let r = self.report(collar)?;
        let chi = self.chi()?;
        let chi_b = euler::chi_boundary(self.manifold.level(), self.opts.resolution)?;
        let boundary_ok = r.morse_minus + r.morse_plus == chi_b;
        let mut v = Verdict::new(
            "morse",
            HalfInteger::from_int(chi),
            r.ind_interior + HalfInteger::from_int(r.morse_minus),
        )
        .note("morse_minus", json!(r.morse_minus))
        .note("morse_plus", json!(r.morse_plus))
        .note("chi_boundary", json!(chi_b))
        .note("boundary_identity", json!(boundary_ok))
        .note(
            "split_identity",
            json!(HalfInteger::from_halves(r.morse_minus - r.morse_plus) == r.ind_boundary),
        );
        v.pass = v.pass && boundary_ok && HalfInteger::from_halves(r.morse_minus - r.morse_plus) == r.ind_boundary;
        Ok(v)
    }

    /// Bookkeeping on the double: each interior zero appears twice and each
    /// boundary zero contributes `s·k` with `s = ±1` for inward/outward.
    pub fn doubling_check(&self, collar: Collar) -> Result<Verdict> {
        let r = self.report(collar)?;
        let mut double = 2 * r.ind_interior.as_int().unwrap_or(0);
        match r.uniform_boundary {
            Some(u) => {
                double += if u.side == Inwardness::Inward {
                    u.chi_boundary
                } else {
                    -u.chi_boundary
                }
            }
            None => {
                for z in &r.zeros {
                    match z.record.transverse_sign {
                        Some(Inwardness::Inward) => double += z.local_index,
                        Some(Inwardness::Outward) => double -= z.local_index,
                        _ => {}
                    }
                }
            }
        }
        let chi_double = if self.manifold.dim() % 2 == 0 { 2 * self.chi()? } else { 0 };
        let mut v = Verdict::new("doubling", HalfInteger::from_int(chi_double), HalfInteger::from_int(double))
            .note("twice_total", json!(r.ind_total * 2));
        v.pass = v.pass && double % 2 == 0 && HalfInteger::from_int(double) == r.ind_total * 2;
        Ok(v)
    }

    pub fn collar_independence_check(&self) -> Result<Verdict> {
        let a = self.report(Collar::NegG)?;
        let b = self.report(Collar::Scaled)?;
        let level = self.manifold.level();
        let sample = zerofind::sample_boundary(level, &self.opts.search)?;
        let mut disagreements = 0usize;
        for p in &sample.points {
            let val = self.field.eval(p)?;
            let da = decompose(level, Collar::NegG, p, &val)?;
            let db = decompose(level, Collar::Scaled, p, &val)?;
            if da.inwardness() != db.inwardness() || linalg::dist(&da.v_par, &db.v_par) > 1e-12 {
                disagreements += 1;
            }
        }
        let mut v = Verdict::new("collar_independence", a.ind_boundary, b.ind_boundary)
            .note("sampled_points", json!(sample.points.len()))
            .note("sign_disagreements", json!(disagreements));
        v.pass = v.pass && disagreements == 0;
        Ok(v)
    }

    /// Boundary index of `trials` independent blends drawn from `X_{v,f}`,
    /// compared with that of `v`.
    pub fn xwf_invariance_check(&self, collar: Collar, trials: usize) -> Result<Verdict> {
        let base = self.report(collar)?;
        let mut values = Vec::with_capacity(trials);
        let mut magnitudes = Vec::with_capacity(trials);
        for t in 0..trials {
            let tame = TameOptions {
                seed: self.opts.seed.wrapping_add(1 + t as u64),
                force_blend: true,
                search: self.opts.search,
                ..TameOptions::default()
            };
            let tamed = make_tame(self.manifold, collar, &self.field, &tame)?;
            let opts = IndexOptions {
                auto_tame: false,
                ..self.opts
            };
            let r = index::full_index(self.manifold, collar, &tamed.field, &opts)?;
            values.push(r.ind_boundary);
            magnitudes.push(tamed.log.map(|l| l.magnitude).unwrap_or(0.0));
        }
        let computed = values
            .iter()
            .copied()
            .find(|x| *x != base.ind_boundary)
            .unwrap_or(base.ind_boundary);
        Ok(Verdict::new("xwf_invariance", base.ind_boundary, computed)
            .note("trials", json!(values))
            .note("magnitudes", json!(magnitudes)))
    }
}

pub fn theorem_verdict(m: &DomainManifold, collar: Collar, v: &SharedField, opts: &IndexOptions) -> Result<Verdict> {
    Verifier::new(m, v.clone(), *opts).theorem_verdict(collar)
}

pub fn negation_check(m: &DomainManifold, collar: Collar, v: &SharedField, opts: &IndexOptions) -> Result<Verdict> {
    Verifier::new(m, v.clone(), *opts).negation_check(collar)
}

pub fn doubling_check(m: &DomainManifold, collar: Collar, v: &SharedField, opts: &IndexOptions) -> Result<Verdict> {
    Verifier::new(m, v.clone(), *opts).doubling_check(collar)
}

pub fn morse_check(m: &DomainManifold, collar: Collar, v: &SharedField, opts: &IndexOptions) -> Result<Verdict> {
    Verifier::new(m, v.clone(), *opts).morse_check(collar)
}

pub fn collar_independence_check(m: &DomainManifold, v: &SharedField, opts: &IndexOptions) -> Result<Verdict> {
    Verifier::new(m, v.clone(), *opts).collar_independence_check()
}

pub fn xwf_invariance_check(
    m: &DomainManifold,
    collar: Collar,
    v: &SharedField,
    trials: usize,
    opts: &IndexOptions,
) -> Result<Verdict> {
    Verifier::new(m, v.clone(), *opts).xwf_invariance_check(collar, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExprField;

    fn disk() -> DomainManifold {
        DomainManifold::parse("x1^2 + x2^2 - 1", &[(-2.0, 2.0), (-2.0, 2.0)], "ball_2").unwrap()
    }

    fn field(texts: &[&str]) -> SharedField {
        Arc::new(ExprField::parse(texts).unwrap())
    }

    #[test]
    fn blend_weight_profile() {
        assert_eq!(blend_weight(0.0, 0.2), 1.0);
        assert_eq!(blend_weight(-1.0, 0.2), 1.0);
        assert_eq!(blend_weight(0.2, 0.2), 0.0);
        assert!(blend_weight(0.1999, 0.2) < 1e-100);
        let a = blend_weight(0.05, 0.2);
        let b = blend_weight(0.1, 0.2);
        assert!(a > b && b > 0.0);
    }

    #[test]
    fn tame_field_is_left_alone() {
        let v = field(&["1", "0"]);
        let t = make_tame(&disk(), Collar::NegG, &v, &TameOptions::default()).unwrap();
        assert!(t.log.is_none());
        assert!(Arc::ptr_eq(&t.field, &v));
    }

    #[test]
    fn half_ball_shift_removes_boundary_zero() {
        let v = field(&["x1 - 1", "x2"]);
        let t = make_tame(&disk(), Collar::NegG, &v, &TameOptions::default()).unwrap();
        let log = t.log.unwrap();
        assert_eq!(log.method, PerturbationMethod::HalfBallShift);
        assert!(norm(&t.field.eval(&[1.0, 0.0, 0.0]).unwrap()) > 1e-3);
        let far = [-0.5, 0.2, 0.0];
        assert_eq!(t.field.eval(&far).unwrap(), v.eval(&far).unwrap());
    }

    #[test]
    fn blend_makes_degenerate_tangential_zero_transverse() {
        // On the circle v·τ = x1³ (τ = (−x2, x1)) and v·n = 1, so (0, ±1)
        // are triple tangential zeros.
        let v = field(&["-x1^3*x2 + x1", "x1^4 + x2"]);
        let m = disk();
        let zs = zerofind::find_boundary_tangential_zeros(&m, Collar::NegG, v.as_ref(), &SearchOptions::default())
            .unwrap();
        assert!(zs.iter().any(|z| !zerofind::check_transverse(z)));
        let t = make_tame(&m, Collar::NegG, &v, &TameOptions::default()).unwrap();
        let log = t.log.unwrap();
        assert_eq!(log.method, PerturbationMethod::CollarBlend);
        let zs = zerofind::find_boundary_tangential_zeros(&m, Collar::NegG, t.field.as_ref(), &SearchOptions::default())
            .unwrap();
        assert!(zs.iter().all(zerofind::check_transverse));
    }

    #[test]
    fn suspension_examples() {
        let opts = SearchOptions::default();
        let a = field(&["x1"]);
        let v = suspension_check(&a, &ZERO, &opts).unwrap();
        assert!(v.pass);
        assert_eq!(v.computed, HalfInteger::from_int(-1));
        let saddle = field(&["x1", "-x2"]);
        let v = suspension_check(&saddle, &ZERO, &opts).unwrap();
        assert!(v.pass);
        assert_eq!(v.computed, HalfInteger::from_int(1));
    }

    #[test]
    fn disk_constant_checks() {
        let m = disk();
        let v = field(&["1", "0"]);
        let ver = Verifier::new(&m, v, IndexOptions::default());
        for verdict in [
            ver.theorem_verdict(Collar::NegG).unwrap(),
            ver.negation_check(Collar::NegG).unwrap(),
            ver.morse_check(Collar::NegG).unwrap(),
            ver.doubling_check(Collar::NegG).unwrap(),
            ver.collar_independence_check().unwrap(),
        ] {
            assert!(verdict.pass, "{verdict:?}");
        }
        assert_eq!(ver.registry.len(), 3);
    }

    #[test]
    fn radial_ball3_blends_keep_boundary_index() {
        let m = DomainManifold::parse(
            "x1^2 + x2^2 + x3^2 - 1",
            &[(-1.5, 1.5), (-1.5, 1.5), (-1.5, 1.5)],
            "ball_3",
        )
        .unwrap();
        let r = "sqrt(x1^2 + x2^2 + x3^2)";
        let v = field(&[&format!("{r}*x1"), &format!("{r}*x2"), &format!("{r}*x3")]);
        let ver = Verifier::new(&m, v, IndexOptions::default());
        let verdict = ver.xwf_invariance_check(Collar::NegG, 2).unwrap();
        assert!(verdict.pass, "{verdict:?}");
        assert_eq!(verdict.expected, HalfInteger::from_int(-1));
    }
}
