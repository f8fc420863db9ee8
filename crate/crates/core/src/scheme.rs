//! The two-map iterative scheme `x_{n+2} = t_n S_n x_{n+1} ⊕ (1-t_n) T_n x_n`
//! with per-step certificates: the data-dependent ratio θ, the contraction
//! certificate ρ, squared-step and product bounds, interleaved monotonicity,
//! and the blend-weight interval keeping ρ at or below one.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::LipschitzMap;
use crate::qt::BoundCheckRecord;
use crate::report::{ViolationReport, Witness};
use crate::space::{Point, SpaceModel};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::float::FloatExt;

/// Blend-weight schedule: constant, explicit per-step list, or a rule.
#[derive(Debug, Clone)]
pub enum TSchedule {
    Constant(f64),
    List(Vec<f64>),
    Rule(fn(usize) -> f64),
}

impl TSchedule {
    pub fn value(&self, n: usize) -> Option<f64> {
        match self {
            TSchedule::Constant(t) => Some(*t),
            TSchedule::List(ts) => ts.get(n).copied(),
            TSchedule::Rule(f) => Some(f(n)),
        }
    }
}

/// Map schedule: one map for every step, or an explicit per-step list.
#[derive(Debug, Clone)]
pub enum MapSchedule {
    Constant(LipschitzMap),
    List(Vec<LipschitzMap>),
}

impl MapSchedule {
    pub fn get(&self, n: usize) -> Option<&LipschitzMap> {
        match self {
            MapSchedule::Constant(m) => Some(m),
            MapSchedule::List(ms) => ms.get(n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScheduleConfig {
    pub ts: TSchedule,
    pub s_seq: MapSchedule,
    pub t_seq: MapSchedule,
    pub n_steps: usize,
    pub x0: Point,
    pub x1: Point,
    /// Stop early once two consecutive steps move less than this.
    pub stop_tol: f64,
}

impl ScheduleConfig {
    pub fn validate(&self, space: &SpaceModel) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
        }
        if !(self.stop_tol > 0.0) {
            return Err(Error::InvalidParameter("stop_tol must be > 0".into()));
        }
        if !space.validate_point(&self.x0) || !space.validate_point(&self.x1) {
            return Err(Error::InvalidPoint("initial points not in space".into()));
        }
        for n in 0..self.n_steps {
            if let Some(t) = self.ts.value(n) {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "t_{n} = {t} outside [0, 1]"
                    )));
                }
            }
            if let Some(m) = self.s_seq.get(n) {
                m.validate(space)?;
            }
            if let Some(m) = self.t_seq.get(n) {
                m.validate(space)?;
            }
        }
        Ok(())
    }
}

/// Executed trajectory with its certificates. `thetas[k]` and `rhos[k]`
/// carry the paper-indexed θ_k and ρ_k; index 0 is always undefined and a
/// zero step denominator leaves later entries undefined too.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub points: Vec<Point>,
    /// Blend weight used at each executed step.
    pub ts: Vec<f64>,
    /// Step distances `d(x_n, x_{n+1})`.
    pub step_dists: Vec<f64>,
    pub thetas: Vec<Option<f64>>,
    pub rhos: Vec<Option<f64>>,
    /// True when the early-stop rule fired before `n_steps`.
    pub converged: bool,
}

impl IterationTrace {
    pub fn executed_steps(&self) -> usize {
        self.points.len().saturating_sub(2)
    }

    pub fn final_step_dist(&self) -> f64 {
        self.step_dists.last().copied().unwrap_or(0.0)
    }
}

/// θ_{n+1}: the cross-distance sum of the step-n map images over the larger
/// of the two trailing step distances. Undefined (None) at convergence.
pub fn theta(
    space: &SpaceModel,
    s_map: &LipschitzMap,
    t_map: &LipschitzMap,
    x_n: &Point,
    x_n1: &Point,
    x_n2: &Point,
) -> Result<Option<f64>> {
    let denom = space.distance(x_n1, x_n2)?.max(space.distance(x_n, x_n1)?);
    if denom == 0.0 {
        return Ok(None);
    }
    let s_n2 = s_map.apply(space, x_n2)?;
    let s_n1 = s_map.apply(space, x_n1)?;
    let t_n = t_map.apply(space, x_n)?;
    let t_n1 = t_map.apply(space, x_n1)?;
    let num = space.distance(&s_n2, &t_n)?
        + space.distance(&s_n1, &t_n)?
        + space.distance(&t_n1, &s_n1)?
        + space.distance(&s_n2, &t_n1)?;
    Ok(Some(num / denom))
}

/// ρ = t² K_S² + (1-t)² K_T² + t (1-t) min(K_S, K_T) θ.
pub fn compute_rho(t: f64, k_s: f64, k_t: f64, theta: f64) -> f64 {
    t * t * k_s * k_s
        + (1.0 - t) * (1.0 - t) * k_t * k_t
        + t * (1.0 - t) * k_s.min(k_t) * theta
}

/// Runs the scheme for `cfg.n_steps` steps (or until two consecutive steps
/// fall below `stop_tol`), recording certificates as they become defined.
pub fn run_scheme(space: &SpaceModel, cfg: &ScheduleConfig) -> Result<IterationTrace> {
    cfg.validate(space)?;
    let mut points = vec![cfg.x0.clone(), cfg.x1.clone()];
    let mut step_dists = vec![space.distance(&cfg.x0, &cfg.x1)?];
    let mut ts = Vec::new();
    let mut converged = false;

    for n in 0..cfg.n_steps {
        let t_n = cfg
            .ts
            .value(n)
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("t schedule ends before step {n}")))?;
        let s_n = cfg
            .s_seq
            .get(n)
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("S schedule ends before step {n}")))?;
        let t_map_n = cfg
            .t_seq
            .get(n)
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("T schedule ends before step {n}")))?;
        let sx = s_n.apply(space, &points[n + 1])?;
        let tx = t_map_n.apply(space, &points[n])?;
        let next = space.combine(&sx, &tx, t_n)?;
        let step = space.distance(&points[n + 1], &next)?;
        if !step.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "non-finite step distance at step {n}"
            )));
        }
        points.push(next);
        ts.push(t_n);
        step_dists.push(step);
        let prev = step_dists[step_dists.len() - 2];
        if step <= cfg.stop_tol && prev <= cfg.stop_tol {
            converged = true;
            break;
        }
    }

    // Certificates: θ_{n+1} uses the step-n maps and x_n..x_{n+2};
    // ρ_{n+1} uses the step-(n+1) blend weight and constants.
    let executed = points.len() - 2;
    let mut thetas: Vec<Option<f64>> = vec![None];
    let mut rhos: Vec<Option<f64>> = vec![None];
    for n in 0..executed {
        let s_n = cfg.s_seq.get(n).expect("validated schedule");
        let t_map_n = cfg.t_seq.get(n).expect("validated schedule");
        let th = theta(space, s_n, t_map_n, &points[n], &points[n + 1], &points[n + 2])?;
        thetas.push(th);
        let rho = match (th, cfg.ts.value(n + 1), cfg.s_seq.get(n + 1), cfg.t_seq.get(n + 1)) {
            (Some(th), Some(t), Some(s), Some(tm)) => {
                Some(compute_rho(t, s.declared_k(), tm.declared_k(), th))
            }
            _ => None,
        };
        rhos.push(rho);
    }

    Ok(IterationTrace {
        points,
        ts,
        step_dists,
        thetas,
        rhos,
        converged,
    })
}

/// Verifies `d²(x_{n+2}, x_{n+3}) <= ρ_{n+1} max(d²(x_{n+1}, x_{n+2}),
/// d²(x_n, x_{n+1}))` wherever ρ is defined; undefined certificates pass
/// vacuously.
pub fn audit_step_bound(trace: &IterationTrace, tol: f64) -> Result<ViolationReport> {
    if trace.points.len() < 4 {
        return Err(Error::TraceTooShort {
            needed: 4,
            got: trace.points.len(),
        });
    }
    let sd = &trace.step_dists;
    let mut samples = Vec::new();
    for n in 0..sd.len().saturating_sub(2) {
        let Some(Some(rho)) = trace.rhos.get(n + 1) else {
            continue;
        };
        let bound = rho * (sd[n + 1] * sd[n + 1]).max(sd[n] * sd[n]);
        let residual = bound - sd[n + 2] * sd[n + 2];
        samples.push((
            residual,
            Witness {
                label: alloc::format!("step_bound_n{n}"),
                points: trace.points[n..=(n + 3).min(trace.points.len() - 1)].to_vec(),
                t: trace.ts.get(n).copied(),
            },
        ));
    }
    Ok(ViolationReport::collect("step_bound", tol, samples))
}

/// Evaluates the product form of the squared-step bound over the window
/// `n .. n+m`: `d²(x_{n+m}, x_{n+m+1})` against `(Π ρ_{n+i}) max(...)`.
/// Any undefined ρ in the window (the scheme never defines ρ_0, and
/// converged steps lose θ) makes the record vacuous.
pub fn audit_product_bound(
    trace: &IterationTrace,
    n: usize,
    m: usize,
) -> Result<BoundCheckRecord> {
    if m < 2 {
        return Err(Error::InvalidParameter("product bound needs m >= 2".into()));
    }
    let sd = &trace.step_dists;
    if sd.len() < n + m + 1 {
        return Err(Error::TraceTooShort {
            needed: n + m + 2,
            got: trace.points.len(),
        });
    }
    let lhs = sd[n + m] * sd[n + m];
    let base = (sd[n + 1] * sd[n + 1]).max(sd[n] * sd[n]);
    let mut product = 1.0;
    let mut vacuous = false;
    for i in 0..m {
        match trace.rhos.get(n + i) {
            Some(Some(rho)) => product *= rho,
            _ => {
                vacuous = true;
                break;
            }
        }
    }
    let inputs = vec![
        trace.points[n].clone(),
        trace.points[n + 1].clone(),
        trace.points[n + m].clone(),
        trace.points[n + m + 1].clone(),
    ];
    if vacuous {
        return Ok(BoundCheckRecord {
            lhs,
            rhs: f64::INFINITY,
            residual: f64::INFINITY,
            n,
            t: trace.ts.get(n).copied().unwrap_or(f64::NAN),
            inputs,
            chain_residuals: Vec::new(),
            vacuous: true,
        });
    }
    let rhs = product * base;
    Ok(BoundCheckRecord {
        lhs,
        rhs,
        residual: rhs - lhs,
        n,
        t: trace.ts.get(n).copied().unwrap_or(f64::NAN),
        inputs,
        chain_residuals: Vec::new(),
        vacuous: false,
    })
}

/// Outcome of the interleaved monotonicity audit.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    /// Index of the first base pair satisfying `d(x_{k+1}, x_{k+2}) <=
    /// d(x_k, x_{k+1})`. Leading pairs violating the base hypothesis are
    /// skipped: the truncated sequence is the same scheme started at
    /// `(x_k, x_{k+1})`.
    pub shift: usize,
    pub checked: usize,
    pub worst_residual: f64,
    pub passed: bool,
    /// Strict decrease verified (only claimed when every defined ρ < 1).
    pub strict: bool,
}

/// Verifies `d(x_{n+2}, x_{n+3}) <= d(x_n, x_{n+1})` from the first index
/// where the theorem's base hypothesis holds. Inconclusive when no base
/// index qualifies or a defined ρ exceeds 1.
pub fn audit_monotone(trace: &IterationTrace, tol: f64) -> Result<MonotoneReport> {
    let sd = &trace.step_dists;
    if sd.len() < 2 {
        return Err(Error::TraceTooShort {
            needed: 4,
            got: trace.points.len(),
        });
    }
    for rho in trace.rhos.iter().flatten() {
        if *rho > 1.0 + tol {
            return Err(Error::Inconclusive(alloc::format!(
                "hypothesis rho_n <= 1 fails (rho = {rho})"
            )));
        }
    }
    let shift = (0..sd.len() - 1)
        .find(|&k| sd[k + 1] <= sd[k] + tol)
        .ok_or_else(|| {
            Error::Inconclusive("no base pair satisfies d(x_1, x_2) <= d(x_0, x_1)".into())
        })?;

    let rho_strict = trace
        .rhos
        .iter()
        .flatten()
        .all(|rho| *rho < 1.0);
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    let mut strict = rho_strict;
    for n in shift..sd.len().saturating_sub(2) {
        checked += 1;
        let residual = sd[n] - sd[n + 2];
        worst = worst.min(residual);
        if strict && !(sd[n + 2] < sd[n] || (sd[n] <= tol && sd[n + 2] <= tol)) {
            strict = false;
        }
    }
    Ok(MonotoneReport {
        shift,
        checked,
        worst_residual: worst,
        passed: checked == 0 || worst >= -tol,
        strict: strict && checked > 0,
    })
}

/// A sub-interval of `[0, 1]`; open flags mark strict endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl BlendInterval {
    fn closed(lo: f64, hi: f64) -> Self {
        BlendInterval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }
}

/// The set `{t in [0, 1] : ρ(t; K_S, K_T, θ) <= 1}` as explicit intervals
/// (the quadratic can split `[0, 1]` into two pieces). With `strict`,
/// endpoints where ρ equals 1 become open.
pub fn suggest_blend(k_s: f64, k_t: f64, theta: f64, strict: bool) -> Result<Vec<BlendInterval>> {
    for (name, v) in [("K_S", k_s), ("K_T", k_t), ("theta", theta)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "{name} must be finite and >= 0"
            )));
        }
    }
    // rho(t) = a t^2 + b t + c.
    let m = k_s.min(k_t);
    let a = k_s * k_s + k_t * k_t - m * theta;
    let b = m * theta - 2.0 * k_t * k_t;
    let c = k_t * k_t;

    let mut intervals: Vec<BlendInterval> = Vec::new();
    const EPS: f64 = 1e-14;
    if a.abs() <= EPS {
        if b.abs() <= EPS {
            if c <= 1.0 {
                intervals.push(BlendInterval::closed(0.0, 1.0));
            }
        } else {
            let root = (1.0 - c) / b;
            if b > 0.0 {
                if root >= 0.0 {
                    intervals.push(BlendInterval::closed(0.0, root.min(1.0)));
                }
            } else if root <= 1.0 {
                intervals.push(BlendInterval::closed(root.max(0.0), 1.0));
            }
        }
    } else {
        let disc = b * b - 4.0 * a * (c - 1.0);
        if disc < 0.0 {
            if a < 0.0 {
                intervals.push(BlendInterval::closed(0.0, 1.0));
            }
        } else {
            let s = disc.sqrt();
            let (r1, r2) = {
                let ra = (-b - s) / (2.0 * a);
                let rb = (-b + s) / (2.0 * a);
                (ra.min(rb), ra.max(rb))
            };
            if a > 0.0 {
                intervals.push(BlendInterval::closed(r1.max(0.0), r2.min(1.0)));
            } else {
                intervals.push(BlendInterval::closed(0.0, r1.min(1.0)));
                intervals.push(BlendInterval::closed(r2.max(0.0), 1.0));
            }
        }
    }

    let mut out: Vec<BlendInterval> = Vec::new();
    for mut iv in intervals {
        if iv.is_empty() {
            continue;
        }
        if strict {
            if (compute_rho(iv.lo, k_s, k_t, theta) - 1.0).abs() <= 1e-12 {
                iv.lo_open = true;
            }
            if (compute_rho(iv.hi, k_s, k_t, theta) - 1.0).abs() <= 1e-12 {
                iv.hi_open = true;
            }
            if iv.is_empty() {
                continue;
            }
        }
        // Merge touching pieces (can happen when a root lands outside [0, 1]).
        if let Some(last) = out.last_mut() {
            if last.hi >= iv.lo && !last.hi_open && !iv.lo_open {
                last.hi = last.hi.max(iv.hi);
                last.hi_open = iv.hi_open;
                continue;
            }
        }
        out.push(iv);
    }
    Ok(out)
}
