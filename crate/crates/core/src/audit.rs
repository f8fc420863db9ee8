//! Sampling-based verifiers for the convexity and curvature inequalities:
//! p-convexity, the midpoint pair bound, the p-Busemann condition, convex
//! structures, the CAT(0) inequality, uniform-convexity moduli, implication
//! checks between those properties, and metric-axiom audits.
//!
//! Every checker reports the most negative residual (`rhs - lhs`) over a
//! seeded sample stream together with the witness configuration achieving
//! it; the witness re-evaluates to the same residual through the public
//! per-sample residual functions.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::{ViolationReport, Witness};
use crate::space::{Point, SpaceKind, SpaceModel};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::float::FloatExt;

/// Convexity order `p` in `[1, ∞]`; infinity is a distinguished value so the
/// max-form right-hand sides never overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    pub fn validate(&self) -> Result<()> {
        match self {
            Order::Finite(p) if p.is_finite() && *p >= 1.0 => Ok(()),
            Order::Infinity => Ok(()),
            Order::Finite(p) => Err(Error::InvalidParameter(alloc::format!(
                "convexity order {p} must be >= 1"
            ))),
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Order::Finite(p) => Some(*p),
            Order::Infinity => None,
        }
    }

    /// `(coeff * sum(v^p))^(1/p)` computed with scaling; the `p = ∞` limit
    /// is the plain maximum.
    fn mean(&self, coeff: f64, vals: &[f64]) -> f64 {
        let m = vals.iter().cloned().fold(0.0_f64, f64::max);
        match self {
            Order::Infinity => m,
            Order::Finite(p) => {
                if m == 0.0 {
                    return 0.0;
                }
                let sum: f64 = vals.iter().map(|v| (v / m).powf(*p)).sum();
                m * (coeff * sum).powf(1.0 / p)
            }
        }
    }
}

/// Parameters of one sampling audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSpec {
    pub p: Order,
    pub sample_count: usize,
    pub seed: u64,
    /// Violation tolerance; residuals below `-tol` fail the audit.
    pub tol: f64,
    pub strict: bool,
}

impl AuditSpec {
    pub fn new(p: Order, sample_count: usize, seed: u64, tol: f64) -> Self {
        AuditSpec {
            p,
            sample_count,
            seed,
            tol,
            strict: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.p.validate()?;
        if self.sample_count == 0 {
            return Err(Error::InvalidParameter("sample_count must be >= 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter("tol must be >= 0".into()));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// A uniform-convexity probe: separation `epsilon`, radius `r`, and the
/// estimated modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusProbe {
    pub epsilon: f64,
    pub r: f64,
    pub estimated_delta: f64,
}

/// Strictness is only enforced where the strict inequality has room to be
/// resolved in floating point.
const STRICT_GAP: f64 = 1e-6;

/// Relative slack on the separation constraint of modulus probes, so
/// boundary configurations (epsilon = 2) remain representable.
const SEPARATION_SLACK: f64 = 1e-7;

// ---------------------------------------------------------------------------
// Per-sample residuals. Public so witnesses can be re-evaluated in isolation.
// ---------------------------------------------------------------------------

/// p-convexity residual: p-mean of the two distances to `z` minus
/// `d(m(x,y), z)`. Also re-checks the derivable relaxation
/// `(1/2)^(1/p) (d(x,z) + d(y,z))` and keeps the smaller residual.
pub fn p_convexity_residual(
    space: &SpaceModel,
    x: &Point,
    y: &Point,
    z: &Point,
    p: Order,
) -> Result<f64> {
    p.validate()?;
    let m = space.midpoint(x, y)?;
    let lhs = space.distance(&m, z)?;
    let dxz = space.distance(x, z)?;
    let dyz = space.distance(y, z)?;
    let primary = p.mean(0.5, &[dxz, dyz]) - lhs;
    match p {
        Order::Finite(pv) => {
            let relaxed = 0.5_f64.powf(1.0 / pv) * (dxz + dyz) - lhs;
            Ok(primary.min(relaxed))
        }
        Order::Infinity => Ok(primary),
    }
}

/// How far `m(x, y)` is from being a metric midpoint; 0 when exact.
pub fn midpoint_defect(space: &SpaceModel, x: &Point, y: &Point) -> Result<f64> {
    let m = space.midpoint(x, y)?;
    let half = space.distance(x, y)? / 2.0;
    let dx = (space.distance(x, &m)? - half).abs();
    let dy = (space.distance(y, &m)? - half).abs();
    Ok(dx.max(dy))
}

/// Midpoint pair bound residual (finite p only).
pub fn midpoint_pair_residual(
    space: &SpaceModel,
    x: &Point,
    y: &Point,
    z: &Point,
    w: &Point,
    p: Order,
) -> Result<f64> {
    p.validate()?;
    if p.finite().is_none() {
        return Err(Error::InvalidParameter(
            "midpoint pair bound is stated for finite p".into(),
        ));
    }
    let mxy = space.midpoint(x, y)?;
    let mzw = space.midpoint(z, w)?;
    let lhs = space.distance(&mxy, &mzw)?;
    let rhs = p.mean(
        0.25,
        &[
            space.distance(x, z)?,
            space.distance(x, w)?,
            space.distance(y, z)?,
            space.distance(y, w)?,
        ],
    );
    Ok(rhs - lhs)
}

/// p-Busemann residual; with `use_min` the right-hand side takes the
/// smaller of the two endpoint pairings.
pub fn busemann_residual(
    space: &SpaceModel,
    x: &Point,
    y: &Point,
    z: &Point,
    w: &Point,
    p: Order,
    use_min: bool,
) -> Result<f64> {
    p.validate()?;
    let mxy = space.midpoint(x, y)?;
    let mzw = space.midpoint(z, w)?;
    let lhs = space.distance(&mxy, &mzw)?;
    let straight = p.mean(0.5, &[space.distance(x, z)?, space.distance(y, w)?]);
    let rhs = if use_min {
        let crossed = p.mean(0.5, &[space.distance(x, w)?, space.distance(y, z)?]);
        straight.min(crossed)
    } else {
        straight
    };
    Ok(rhs - lhs)
}

/// Convex-structure (Takahashi) residual with `W(x, y, t) = combine(x, y, t)`.
pub fn convex_structure_residual(
    space: &SpaceModel,
    x: &Point,
    y: &Point,
    z: &Point,
    t: f64,
) -> Result<f64> {
    let w = space.combine(x, y, t)?;
    Ok(t * space.distance(z, x)? + (1.0 - t) * space.distance(z, y)? - space.distance(z, &w)?)
}

/// CAT(0) inequality residual at blend `t`, honoring the
/// `(1-t) x ⊕ t y` argument order of the comparison identity.
pub fn cat0_residual(space: &SpaceModel, x: &Point, y: &Point, z: &Point, t: f64) -> Result<f64> {
    let g = space.combine(x, y, 1.0 - t)?;
    let dzx = space.distance(z, x)?;
    let dzy = space.distance(z, y)?;
    let dxy = space.distance(x, y)?;
    let dgz = space.distance(&g, z)?;
    Ok((1.0 - t) * dzx * dzx + t * dzy * dzy - t * (1.0 - t) * dxy * dxy - dgz * dgz)
}

// ---------------------------------------------------------------------------
// Sampling checks.
// ---------------------------------------------------------------------------

fn witness(label: &str, points: &[&Point], t: Option<f64>) -> Witness {
    Witness {
        label: label.into(),
        points: points.iter().map(|p| (*p).clone()).collect(),
        t,
    }
}

pub fn check_p_convexity(space: &SpaceModel, spec: &AuditSpec) -> Result<ViolationReport> {
    spec.validate()?;
    let mut rng = spec.rng();
    let mut report = ViolationReport {
        check: "p_convexity".into(),
        checked: 0,
        worst_residual: f64::INFINITY,
        max_residual: f64::NEG_INFINITY,
        passed: true,
        witness: None,
    };
    let mut strict_violation: Option<Witness> = None;
    for _ in 0..spec.sample_count {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let z = space.sample(&mut rng);
        let residual = p_convexity_residual(space, &x, &y, &z, spec.p)?;
        report.checked += 1;
        report.max_residual = report.max_residual.max(residual);
        if residual < report.worst_residual {
            report.worst_residual = residual;
            report.witness = Some(witness("p_convexity", &[&x, &y, &z], None));
        }
        if spec.strict && strict_violation.is_none() {
            let dxy = space.distance(&x, &y)?;
            let gap = if spec.p.finite() == Some(1.0) {
                dxy - (space.distance(&x, &z)? - space.distance(&y, &z)?).abs()
            } else {
                dxy
            };
            if gap > STRICT_GAP && residual <= 0.0 {
                strict_violation = Some(witness("strictness", &[&x, &y, &z], None));
            }
        }
    }
    report.passed = report.worst_residual >= -spec.tol && strict_violation.is_none();
    if let Some(w) = strict_violation {
        report.witness = Some(w);
    }
    Ok(report)
}

pub fn check_midpoint_pair_bound(space: &SpaceModel, spec: &AuditSpec) -> Result<ViolationReport> {
    spec.validate()?;
    if spec.p.finite().is_none() {
        return Err(Error::InvalidParameter(
            "midpoint pair bound is stated for finite p".into(),
        ));
    }
    let mut rng = spec.rng();
    let samples = (0..spec.sample_count).map(|_| {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let z = space.sample(&mut rng);
        let w = space.sample(&mut rng);
        let residual = midpoint_pair_residual(space, &x, &y, &z, &w, spec.p)
            .expect("sampled points are valid");
        (residual, witness("midpoint_pair", &[&x, &y, &z, &w], None))
    });
    Ok(ViolationReport::collect("midpoint_pair", spec.tol, samples))
}

pub fn check_busemann(
    space: &SpaceModel,
    spec: &AuditSpec,
    use_min: bool,
) -> Result<ViolationReport> {
    spec.validate()?;
    let mut rng = spec.rng();
    let label = if use_min { "busemann_min" } else { "busemann" };
    let samples = (0..spec.sample_count).map(|_| {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let z = space.sample(&mut rng);
        let w = space.sample(&mut rng);
        let residual = busemann_residual(space, &x, &y, &z, &w, spec.p, use_min)
            .expect("sampled points are valid");
        (residual, witness(label, &[&x, &y, &z, &w], None))
    });
    Ok(ViolationReport::collect(label, spec.tol, samples))
}

pub fn check_convex_structure(space: &SpaceModel, spec: &AuditSpec) -> Result<ViolationReport> {
    spec.validate()?;
    let mut rng = spec.rng();
    let samples = (0..spec.sample_count).map(|_| {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let z = space.sample(&mut rng);
        let t = rand::Rng::gen::<f64>(&mut rng);
        let residual = convex_structure_residual(space, &x, &y, &z, t)
            .expect("sampled points are valid");
        (residual, witness("convex_structure", &[&x, &y, &z], Some(t)))
    });
    Ok(ViolationReport::collect("convex_structure", spec.tol, samples))
}

pub fn check_cat0(space: &SpaceModel, spec: &AuditSpec) -> Result<ViolationReport> {
    spec.validate()?;
    let mut rng = spec.rng();
    let samples = (0..spec.sample_count).map(|_| {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let z = space.sample(&mut rng);
        let t = rand::Rng::gen::<f64>(&mut rng);
        let residual = cat0_residual(space, &x, &y, &z, t).expect("sampled points are valid");
        (residual, witness("cat0", &[&x, &y, &z], Some(t)))
    });
    Ok(ViolationReport::collect("cat0", spec.tol, samples))
}

/// True iff all pairwise distances between distinct entries are >= epsilon.
pub fn is_eps_separated(space: &SpaceModel, points: &[Point], epsilon: f64) -> Result<bool> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be > 0".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("point family is empty".into()));
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if space.distance(&points[i], &points[j])? < epsilon {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Uniform-convexity modulus estimation.
// ---------------------------------------------------------------------------

struct ModulusSearch<'a> {
    space: &'a SpaceModel,
    r: f64,
    min_sep: f64,
}

impl<'a> ModulusSearch<'a> {
    /// Pulls `p` inside the closed ball of radius `r` around `z`.
    fn project_into_ball(&self, p: &Point, z: &Point) -> Result<Point> {
        let d = self.space.distance(p, z)?;
        if d <= self.r {
            Ok(p.clone())
        } else {
            self.space.combine(p, z, self.r / d)
        }
    }

    fn admissible(&self, x: &Point, y: &Point, z: &Point) -> Result<bool> {
        let ball = self.space.distance(x, z)?.max(self.space.distance(y, z)?);
        Ok(ball <= self.r * (1.0 + 1e-12) && self.space.distance(x, y)? >= self.min_sep)
    }

    fn ratio(&self, x: &Point, y: &Point, z: &Point) -> Result<f64> {
        let m = self.space.midpoint(x, y)?;
        Ok(self.space.distance(z, &m)? / self.r)
    }
}

/// Estimates the modulus of uniform convexity at the probe's `(epsilon, r)`:
/// rejection sampling over admissible `(x, y, z)` plus constructive
/// boundary seeds and a 100-step stochastic hill climb around the best
/// configuration. Reports `1 - sup(ratio)` for p = 1 and `1 - sup(ratio)^p`
/// for the generalized order.
pub fn estimate_uc_modulus(
    space: &SpaceModel,
    probe: &ModulusProbe,
    p: Order,
    spec: &AuditSpec,
) -> Result<ModulusProbe> {
    spec.validate()?;
    let pv = p.finite().ok_or_else(|| {
        Error::InvalidParameter("uniform p-convexity modulus needs finite p".into())
    })?;
    if pv < 1.0 {
        return Err(Error::InvalidParameter("order must be >= 1".into()));
    }
    if !(probe.epsilon > 0.0 && probe.epsilon <= 2.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "epsilon {} outside (0, 2]",
            probe.epsilon
        )));
    }
    if !(probe.r > 0.0) || !probe.r.is_finite() {
        return Err(Error::InvalidParameter("radius must be > 0".into()));
    }
    if matches!(space.kind(), SpaceKind::PoincareDisk) && probe.r > 1.5 {
        return Err(Error::InvalidParameter(
            "disk probes need r <= 1.5 so configurations stay inside the sampled sub-disk".into(),
        ));
    }

    let search = ModulusSearch {
        space,
        r: probe.r,
        min_sep: probe.r * (probe.epsilon - SEPARATION_SLACK),
    };
    let mut rng = spec.rng();
    let mut best: Option<(f64, Point, Point, Point)> = None;
    let mut consider = |ratio: f64, x: &Point, y: &Point, z: &Point| {
        if best.as_ref().map(|(b, ..)| ratio > *b).unwrap_or(true) {
            best = Some((ratio, x.clone(), y.clone(), z.clone()));
        }
    };

    for _ in 0..spec.sample_count {
        let z = space.sample(&mut rng);
        let x = search.project_into_ball(&space.sample(&mut rng), &z)?;
        let y = search.project_into_ball(&space.sample(&mut rng), &z)?;
        if search.admissible(&x, &y, &z)? {
            consider(search.ratio(&x, &y, &z)?, &x, &y, &z);
        }
    }

    // Constructive seeds reach boundary configurations (x, y on the r-sphere,
    // antipodal through z) that rejection sampling cannot hit.
    for _ in 0..32 {
        let z = space.sample(&mut rng);
        let u = space.sample(&mut rng);
        let v = space.sample(&mut rng);
        let Ok(x) = space.extend(&z, &u, probe.r) else {
            continue;
        };
        for cand in [space.extend(&z, &v, probe.r), space.extend(&x, &z, 2.0 * probe.r)] {
            let Ok(y) = cand else { continue };
            if search.admissible(&x, &y, &z)? {
                consider(search.ratio(&x, &y, &z)?, &x, &y, &z);
            }
        }
    }

    let Some((mut sup, mut bx, mut by, mut bz)) = best else {
        return Err(Error::Inconclusive(
            "no admissible configuration found for the probe".into(),
        ));
    };

    for step in 0..100 {
        let scale = 0.3 * 0.97_f64.powi(step);
        let (mut x, mut y, mut z) = (bx.clone(), by.clone(), bz.clone());
        match step % 3 {
            0 => x = space.perturb(&x, scale, &mut rng)?,
            1 => y = space.perturb(&y, scale, &mut rng)?,
            _ => z = space.perturb(&z, scale, &mut rng)?,
        }
        let x = search.project_into_ball(&x, &z)?;
        let y = search.project_into_ball(&y, &z)?;
        if search.admissible(&x, &y, &z)? {
            let ratio = search.ratio(&x, &y, &z)?;
            if ratio > sup {
                sup = ratio;
                bx = x;
                by = y;
                bz = z;
            }
        }
    }

    let sup = sup.clamp(0.0, 1.0);
    let delta = (1.0 - sup.powf(pv)).clamp(0.0, 1.0);
    Ok(ModulusProbe {
        epsilon: probe.epsilon,
        r: probe.r,
        estimated_delta: delta,
    })
}

// ---------------------------------------------------------------------------
// Implication checks.
// ---------------------------------------------------------------------------

/// The implications audited sample-by-sample: hypothesis and conclusion are
/// evaluated on the same tuple, and a violation is a tuple where the
/// hypothesis holds but the conclusion fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImplicationKind {
    /// Midpoint convexity implies 1-convexity.
    MidpointToOneConvex,
    /// Busemann condition plus midpoint convexity implies p-convexity.
    BusemannMidpointToPConvex,
    /// Uniform convexity implies uniform p-convexity.
    UcToUcP,
}

impl ImplicationKind {
    pub fn label(&self) -> &'static str {
        match self {
            ImplicationKind::MidpointToOneConvex => "implication_midpoint_1convex",
            ImplicationKind::BusemannMidpointToPConvex => "implication_busemann_midpoint_pconvex",
            ImplicationKind::UcToUcP => "implication_uc_ucp",
        }
    }
}

pub fn check_implication(
    space: &SpaceModel,
    kind: ImplicationKind,
    spec: &AuditSpec,
) -> Result<ViolationReport> {
    spec.validate()?;
    let mut rng = spec.rng();
    let label = kind.label();
    let mut report = ViolationReport {
        check: label.into(),
        checked: 0,
        worst_residual: f64::INFINITY,
        max_residual: f64::NEG_INFINITY,
        passed: true,
        witness: None,
    };
    let track = |report: &mut ViolationReport, residual: f64, w: Witness| {
        report.max_residual = report.max_residual.max(residual);
        if residual < report.worst_residual {
            report.worst_residual = residual;
            report.witness = Some(w);
        }
    };

    match kind {
        ImplicationKind::MidpointToOneConvex => {
            for _ in 0..spec.sample_count {
                let x = space.sample(&mut rng);
                let y = space.sample(&mut rng);
                let z = space.sample(&mut rng);
                report.checked += 1;
                let hyp = -midpoint_defect(space, &x, &y)?;
                if hyp < -spec.tol {
                    continue; // hypothesis fails: vacuous sample
                }
                let concl = p_convexity_residual(space, &x, &y, &z, Order::Finite(1.0))?;
                track(&mut report, concl, witness(label, &[&x, &y, &z], None));
            }
        }
        ImplicationKind::BusemannMidpointToPConvex => {
            for _ in 0..spec.sample_count {
                let x = space.sample(&mut rng);
                let y = space.sample(&mut rng);
                let z = space.sample(&mut rng);
                let w = space.sample(&mut rng);
                report.checked += 1;
                let hyp = (-midpoint_defect(space, &x, &y)?)
                    .min(-midpoint_defect(space, &z, &w)?)
                    .min(busemann_residual(space, &x, &y, &z, &w, spec.p, false)?);
                if hyp < -spec.tol {
                    continue;
                }
                let concl = p_convexity_residual(space, &x, &y, &z, spec.p)?;
                track(&mut report, concl, witness(label, &[&x, &y, &z, &w], None));
            }
        }
        ImplicationKind::UcToUcP => {
            let pv = spec.p.finite().ok_or_else(|| {
                Error::InvalidParameter("uc implication needs finite p".into())
            })?;
            let probe = ModulusProbe {
                epsilon: 1.0,
                r: 1.0,
                estimated_delta: 0.0,
            };
            let search = ModulusSearch {
                space,
                r: probe.r,
                min_sep: probe.r * (probe.epsilon - SEPARATION_SLACK),
            };
            let base = estimate_uc_modulus(space, &probe, Order::Finite(1.0), spec)?;
            let delta1 = base.estimated_delta;
            let delta_p = 1.0 - (1.0 - delta1).powf(pv);
            for _ in 0..spec.sample_count {
                let z = space.sample(&mut rng);
                let x = search.project_into_ball(&space.sample(&mut rng), &z)?;
                let y = search.project_into_ball(&space.sample(&mut rng), &z)?;
                if !search.admissible(&x, &y, &z)? {
                    continue;
                }
                report.checked += 1;
                let m = space.midpoint(&x, &y)?;
                let dzm = space.distance(&z, &m)?;
                let hyp = probe.r * (1.0 - delta1) - dzm;
                if hyp < -spec.tol {
                    continue;
                }
                let concl = probe.r * (1.0 - delta_p).powf(1.0 / pv) - dzm;
                track(&mut report, concl, witness(label, &[&x, &y, &z], None));
            }
        }
    }

    report.passed = report.checked == 0 || report.worst_residual >= -spec.tol;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Metric-axiom audit.
// ---------------------------------------------------------------------------

/// Samples triples and reports the worst residual across symmetry,
/// nonnegativity and the triangle inequality. Deterministic given the seed.
pub fn audit_metric_axioms(
    space: &SpaceModel,
    sample_count: usize,
    seed: u64,
) -> Result<ViolationReport> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be >= 1".into()));
    }
    let tol = space.default_tol();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<(f64, Witness)> = Vec::new();
    for _ in 0..sample_count {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let z = space.sample(&mut rng);
        let dxy = space.distance(&x, &y)?;
        let dyx = space.distance(&y, &x)?;
        let dyz = space.distance(&y, &z)?;
        let dxz = space.distance(&x, &z)?;
        let mut fams = [
            (-(dxy - dyx).abs(), "symmetry"),
            (dxy.min(dyz).min(dxz), "nonnegativity"),
            (dxy + dyz - dxz, "triangle"),
        ];
        // Keep only the worst family for this triple.
        fams.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite residuals"));
        let (residual, label) = fams[0];
        samples.push((residual, witness(label, &[&x, &y, &z], None)));
    }
    Ok(ViolationReport::collect("metric_axioms", tol, samples))
}

// ---------------------------------------------------------------------------
