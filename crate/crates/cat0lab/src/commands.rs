//! Command implementations behind the CLI: audits, scheme runs, fixed
//! points, bound batches and blend suggestions.
//!
//! Exit-code contract: 0 = all checks passed, 1 = a mathematical check
//! failed, 2 = configuration or usage error. Inconclusive probes are
//! reported but do not fail a run.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use cat0lab_core::audit::{self, AuditSpec, ModulusProbe, Order};
use cat0lab_core::map::LipschitzMap;
use cat0lab_core::qt::{self, QtConfig};
use cat0lab_core::scheme::{self, MapSchedule, ScheduleConfig, TSchedule};
use cat0lab_core::{Error as CoreError, ImplicationKind, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{BlendDto, OrderDto, RunConfig};
use crate::dto::PointDto;
use crate::output::{self, AuditReportDto};
use crate::spaces::{parse_space, SpaceHandle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Configuration/usage failure; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

type CmdResult = Result<i32, ConfigError>;

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Resolved run context shared by every command.
struct Ctx {
    cfg: RunConfig,
    handle: SpaceHandle,
    seed: u64,
    tol: f64,
    digest: String,
    out: Option<PathBuf>,
}

impl Ctx {
    fn new(cfg: RunConfig, default_space: &str) -> Result<Self, ConfigError> {
        let space_desc = cfg
            .space
            .clone()
            .unwrap_or_else(|| default_space.to_string());
        let handle = parse_space(&space_desc).map_err(ConfigError)?;
        let seed = cfg.resolve_seed().map_err(ConfigError)?;
        let tol = cfg.tol.unwrap_or_else(|| handle.model.default_tol());
        if tol.is_nan() || tol < 0.0 {
            return cfg_err("tol must be >= 0");
        }
        let out = cfg.out.clone();
        if let Some(dir) = &out {
            fs::create_dir_all(dir)
                .map_err(|e| ConfigError(format!("cannot create output dir {dir:?}: {e}")))?;
        }
        // Digest the resolved config (with the defaults filled in).
        let mut resolved = cfg.clone();
        resolved.space = Some(space_desc);
        resolved.seed = Some(seed);
        resolved.tol = Some(tol);
        let digest = resolved.digest();
        Ok(Ctx {
            cfg: resolved,
            handle,
            seed,
            tol,
            digest,
            out,
        })
    }

    fn emit(&self, name: &str, contents: &str) -> Result<(), ConfigError> {
        match &self.out {
            Some(dir) => fs::write(dir.join(name), contents)
                .map_err(|e| ConfigError(format!("cannot write {name}: {e}"))),
            None => {
                print!("{contents}");
                Ok(())
            }
        }
    }

    fn order(&self) -> Result<Order, ConfigError> {
        match &self.cfg.p {
            Some(dto) => dto.to_order().map_err(ConfigError),
            None => Ok(Order::Finite(2.0)),
        }
    }

    fn audit_spec(&self) -> Result<AuditSpec, ConfigError> {
        let mut spec = AuditSpec::new(
            self.order()?,
            self.cfg.samples.unwrap_or(10_000),
            self.seed,
            self.tol,
        );
        spec.strict = self.cfg.strict.unwrap_or(false);
        spec.validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        Ok(spec)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn point_or_base(&self, dto: &Option<PointDto>) -> Result<Point, ConfigError> {
        match dto {
            Some(d) => d.to_point(&self.handle).map_err(ConfigError),
            None => Ok(self.handle.model.base_point()),
        }
    }

    /// Map resolution: an explicit descriptor wins; otherwise a geodesic
    /// contraction toward the base point with the given factor.
    fn resolve_map(
        &self,
        dto: &Option<crate::dto::MapDto>,
        k: Option<f64>,
        declared: Option<f64>,
        default_k: f64,
    ) -> Result<LipschitzMap, ConfigError> {
        let map = match dto {
            Some(d) => d.to_map(&self.handle).map_err(ConfigError)?,
            None => LipschitzMap::contraction(self.handle.model.base_point(), k.unwrap_or(default_k))
                .map_err(|e| ConfigError(e.to_string()))?,
        };
        Ok(match declared {
            Some(k) => map.with_declared_k(k),
            None => map,
        })
    }
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

pub fn cmd_audit(cfg: RunConfig) -> CmdResult {
    let ctx = Ctx::new(cfg, "euclidean:2")?;
    let checks = match &ctx.cfg.checks {
        Some(list) if !list.is_empty() => list.clone(),
        _ => return cfg_err("audit needs a nonempty --check list"),
    };
    let spec = ctx.audit_spec()?;
    let mut all_passed = true;

    for check in &checks {
        let report = run_one_check(&ctx, check, &spec)?;
        all_passed &= report.passed;
        ctx.emit(&format!("{check}.json"), &output::to_json(&report))?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_VIOLATION })
}

fn run_one_check(ctx: &Ctx, check: &str, spec: &AuditSpec) -> Result<AuditReportDto, ConfigError> {
    let space = &ctx.handle.model;
    let p_dto = Some(OrderDto::from_order(spec.p));
    let use_min = ctx.cfg.use_min.unwrap_or(false);
    let outcome = match check {
        "p_convexity" => audit::check_p_convexity(space, spec),
        "midpoint_pair" => audit::check_midpoint_pair_bound(space, spec),
        "busemann" => audit::check_busemann(space, spec, use_min),
        "convex_structure" => audit::check_convex_structure(space, spec),
        "cat0" => audit::check_cat0(space, spec),
        "metric_axioms" => audit::audit_metric_axioms(space, spec.sample_count, spec.seed),
        "implication" => {
            let kind = match ctx.cfg.impl_kind.as_deref() {
                None | Some("midpoint_1convex") => ImplicationKind::MidpointToOneConvex,
                Some("busemann_midpoint_pconvex") => ImplicationKind::BusemannMidpointToPConvex,
                Some("uc_ucp") => ImplicationKind::UcToUcP,
                Some(other) => return cfg_err(format!("unknown implication kind {other:?}")),
            };
            audit::check_implication(space, kind, spec)
        }
        "uc_modulus" => {
            let probe = ModulusProbe {
                epsilon: ctx.cfg.epsilon.unwrap_or(1.0),
                r: ctx.cfg.radius.unwrap_or(1.0),
                estimated_delta: 0.0,
            };
            return match audit::estimate_uc_modulus(space, &probe, spec.p, spec) {
                Ok(est) => Ok(modulus_report(ctx, spec, &est, None)),
                Err(CoreError::Inconclusive(msg)) => {
                    Ok(modulus_report(ctx, spec, &probe, Some(msg.to_string())))
                }
                Err(e) => cfg_err(e.to_string()),
            };
        }
        other => {
            return cfg_err(format!(
                "unknown check {other:?}; expected one of p_convexity, midpoint_pair, busemann, \
                 convex_structure, uc_modulus, cat0, implication, metric_axioms"
            ))
        }
    };
    match outcome {
        Ok(report) => Ok(AuditReportDto::from_report(
            &ctx.handle,
            &report,
            p_dto,
            spec.seed,
            spec.tol,
            &ctx.digest,
        )),
        Err(CoreError::Inconclusive(msg)) => {
            let mut dto = AuditReportDto::from_report(
                &ctx.handle,
                &cat0lab_core::ViolationReport {
                    check: check.to_string(),
                    checked: 0,
                    worst_residual: f64::INFINITY,
                    max_residual: f64::NEG_INFINITY,
                    passed: true,
                    witness: None,
                },
                p_dto,
                spec.seed,
                spec.tol,
                &ctx.digest,
            );
            dto.inconclusive = Some(msg.to_string());
            Ok(dto)
        }
        Err(e) => cfg_err(e.to_string()),
    }
}

fn modulus_report(
    ctx: &Ctx,
    spec: &AuditSpec,
    probe: &ModulusProbe,
    inconclusive: Option<String>,
) -> AuditReportDto {
    AuditReportDto {
        check: "uc_modulus".into(),
        space: ctx.handle.name.clone(),
        p: Some(OrderDto::from_order(spec.p)),
        samples: spec.sample_count,
        seed: spec.seed,
        tol: spec.tol,
        worst_residual: None,
        max_residual: None,
        passed: true,
        witness: None,
        inconclusive,
        epsilon: Some(probe.epsilon),
        radius: Some(probe.r),
        estimated_delta: (probe.estimated_delta >= 0.0).then_some(probe.estimated_delta),
        config_digest: ctx.digest.clone(),
    }
}

// ---------------------------------------------------------------------------
// iterate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
struct AuditSummary {
    passed: bool,
    checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inconclusive: Option<String>,
}

pub fn cmd_iterate(cfg: RunConfig) -> CmdResult {
    let ctx = Ctx::new(cfg, "euclidean:1")?;
    let map_s = ctx.resolve_map(&ctx.cfg.s_map, ctx.cfg.ks, ctx.cfg.ks_declared, 0.5)?;
    let map_t = ctx.resolve_map(&ctx.cfg.t_map, ctx.cfg.kt, ctx.cfg.kt_declared, 0.5)?;
    let t = match &ctx.cfg.t {
        Some(b) => b.single().map_err(ConfigError)?,
        None => 0.5,
    };
    let mut rng = ctx.rng();
    let x0 = match &ctx.cfg.x0 {
        Some(d) => d.to_point(&ctx.handle).map_err(ConfigError)?,
        None => ctx.handle.model.sample(&mut rng),
    };
    let x1 = match &ctx.cfg.x1 {
        Some(d) => d.to_point(&ctx.handle).map_err(ConfigError)?,
        None => ctx.handle.model.sample(&mut rng),
    };
    let sched = ScheduleConfig {
        ts: TSchedule::Constant(t),
        s_seq: MapSchedule::Constant(map_s.clone()),
        t_seq: MapSchedule::Constant(map_t.clone()),
        n_steps: ctx.cfg.steps.unwrap_or(50),
        x0,
        x1,
        stop_tol: ctx.cfg.stop_tol.unwrap_or(1e-12),
    };
    sched
        .validate(&ctx.handle.model)
        .map_err(|e| ConfigError(e.to_string()))?;
    let trace = scheme::run_scheme(&ctx.handle.model, &sched)
        .map_err(|e| ConfigError(e.to_string()))?;

    let mut csv = Vec::new();
    output::write_trace_csv(&mut csv, &ctx.handle, &trace)
        .map_err(|e| ConfigError(format!("csv write failed: {e}")))?;
    ctx.emit("trace.csv", &String::from_utf8(csv).expect("csv is utf-8"))?;

    // Audits; the step and monotone bounds gate the exit code. The product
    // form is informational: its printed inequality can fail on honest runs.
    let mut failed = false;
    let step_bound = match scheme::audit_step_bound(&trace, ctx.tol) {
        Ok(rep) => {
            failed |= !rep.passed;
            AuditSummary {
                passed: rep.passed,
                checked: rep.checked,
                worst_residual: rep.worst_residual.is_finite().then_some(rep.worst_residual),
                inconclusive: None,
            }
        }
        Err(e) => AuditSummary {
            passed: true,
            checked: 0,
            worst_residual: None,
            inconclusive: Some(e.to_string()),
        },
    };
    let monotone = match scheme::audit_monotone(&trace, ctx.tol) {
        Ok(rep) => {
            failed |= !rep.passed;
            AuditSummary {
                passed: rep.passed,
                checked: rep.checked,
                worst_residual: rep.worst_residual.is_finite().then_some(rep.worst_residual),
                inconclusive: None,
            }
        }
        Err(e) => AuditSummary {
            passed: true,
            checked: 0,
            worst_residual: None,
            inconclusive: Some(e.to_string()),
        },
    };
    let product = {
        let mut worst = f64::INFINITY;
        let mut checked = 0;
        let mut vacuous = 0;
        for n in 0..trace.points.len().saturating_sub(4) {
            match scheme::audit_product_bound(&trace, n, 2) {
                Ok(rec) if rec.vacuous => vacuous += 1,
                Ok(rec) => {
                    checked += 1;
                    worst = worst.min(rec.residual);
                }
                Err(_) => break,
            }
        }
        AuditSummary {
            passed: checked == 0 || worst >= -ctx.tol,
            checked,
            worst_residual: worst.is_finite().then_some(worst),
            inconclusive: (checked == 0 && vacuous > 0)
                .then(|| format!("{vacuous} windows vacuous (undefined rho)")),
        }
    };

    // Recurrence reproduction: recombining recorded points must land on the
    // recorded successor.
    let mut recurrence_max_err = 0.0_f64;
    for n in 0..trace.points.len().saturating_sub(2) {
        let sx = map_s
            .apply(&ctx.handle.model, &trace.points[n + 1])
            .map_err(|e| ConfigError(e.to_string()))?;
        let tx = map_t
            .apply(&ctx.handle.model, &trace.points[n])
            .map_err(|e| ConfigError(e.to_string()))?;
        let again = ctx
            .handle
            .model
            .combine(&sx, &tx, trace.ts[n])
            .map_err(|e| ConfigError(e.to_string()))?;
        let err = ctx
            .handle
            .model
            .distance(&again, &trace.points[n + 2])
            .map_err(|e| ConfigError(e.to_string()))?;
        recurrence_max_err = recurrence_max_err.max(err);
    }

    let summary = json!({
        "space": ctx.handle.name,
        "seed": ctx.seed,
        "config_digest": ctx.digest,
        "converged": trace.converged,
        "steps": trace.executed_steps(),
        "final_step_dist": trace.final_step_dist(),
        "recurrence_max_error": recurrence_max_err,
        "audits": {
            "step_bound": step_bound,
            "monotone": monotone,
            "product_bound": product,
        },
    });
    ctx.emit("summary.json", &output::to_json(&summary))?;
    Ok(if failed { EXIT_VIOLATION } else { EXIT_OK })
}

// ---------------------------------------------------------------------------
// fixedpoint
// ---------------------------------------------------------------------------

pub fn cmd_fixedpoint(cfg: RunConfig) -> CmdResult {
    let ctx = Ctx::new(cfg, "euclidean:1")?;
    let map_s = ctx.resolve_map(&ctx.cfg.s_map, ctx.cfg.ks, ctx.cfg.ks_declared, 0.5)?;
    let map_t = ctx.resolve_map(&ctx.cfg.t_map, ctx.cfg.kt, ctx.cfg.kt_declared, 0.5)?;
    let allow_nonexpansive = ctx.cfg.allow_nonexpansive.unwrap_or(false);
    if !allow_nonexpansive {
        for (name, map) in [("S", &map_s), ("T", &map_t)] {
            if map.declared_k() >= 1.0 {
                return cfg_err(format!(
                    "{name} has declared constant {} but a strict contraction was requested \
                     (pass allow_nonexpansive to use a structurally known fixed point)",
                    map.declared_k()
                ));
            }
        }
    }
    let ts = ctx.cfg.t.as_ref().map(BlendDto::values).unwrap_or_else(|| {
        vec![0.0, 0.5, 1.0]
    });
    let p0 = ctx.point_or_base(&ctx.cfg.x0)?;
    let x0 = ctx.point_or_base(&ctx.cfg.x1)?;
    let tol = ctx.cfg.stop_tol.unwrap_or(1e-12);
    let max_iter = ctx.cfg.max_iter.unwrap_or(10_000);

    let mut results = Vec::new();
    let mut p_star = None;
    let mut y_star = None;
    for &t in &ts {
        let qt_cfg = match QtConfig::new(t, map_s.clone(), map_t.clone()) {
            Ok(c) => c,
            Err(e) => return cfg_err(e.to_string()),
        };
        match qt::compute_zt(&ctx.handle.model, &qt_cfg, &p0, &x0, tol, max_iter) {
            Ok(out) => {
                let space = &ctx.handle.model;
                let dp = space.distance(&out.p_star.point, &out.z).unwrap_or(f64::NAN);
                let dy = space.distance(&out.z, &out.y_star.point).unwrap_or(f64::NAN);
                let dpy = space
                    .distance(&out.p_star.point, &out.y_star.point)
                    .unwrap_or(f64::NAN);
                results.push(json!({
                    "t": t,
                    "z": PointDto::from_point(&ctx.handle, &out.z),
                    "on_geodesic_residual": (dp + dy - dpy).abs(),
                    "blend_ratio_residual": (dy - t * dpy).abs(),
                }));
                p_star.get_or_insert_with(|| fixed_point_json(&ctx, &out.p_star));
                y_star.get_or_insert_with(|| fixed_point_json(&ctx, &out.y_star));
            }
            Err(CoreError::Inconclusive(msg)) => {
                let doc = json!({
                    "space": ctx.handle.name,
                    "seed": ctx.seed,
                    "config_digest": ctx.digest,
                    "error": format!("fixed-point solve failed: {msg}"),
                });
                ctx.emit("fixedpoint.json", &output::to_json(&doc))?;
                return Ok(EXIT_VIOLATION);
            }
            Err(e) => return cfg_err(e.to_string()),
        }
    }

    let doc = json!({
        "space": ctx.handle.name,
        "seed": ctx.seed,
        "config_digest": ctx.digest,
        "p_star": p_star,
        "y_star": y_star,
        "results": results,
    });
    ctx.emit("fixedpoint.json", &output::to_json(&doc))?;
    Ok(EXIT_OK)
}

fn fixed_point_json(ctx: &Ctx, fp: &cat0lab_core::FixedPointResult) -> serde_json::Value {
    json!({
        "point": PointDto::from_point(&ctx.handle, &fp.point),
        "iterations": fp.iterations,
        "final_step": fp.final_step,
        "converged": fp.converged,
    })
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

pub fn cmd_bounds(cfg: RunConfig) -> CmdResult {
    let ctx = Ctx::new(cfg, "euclidean:1")?;
    let check = ctx
        .cfg
        .checks
        .as_ref()
        .and_then(|c| c.first().cloned())
        .ok_or_else(|| ConfigError("bounds needs --check".into()))?;
    let map_s = ctx.resolve_map(&ctx.cfg.s_map, ctx.cfg.ks, ctx.cfg.ks_declared, 0.5)?;
    let map_t = ctx.resolve_map(&ctx.cfg.t_map, ctx.cfg.kt, ctx.cfg.kt_declared, 0.5)?;
    let t = match &ctx.cfg.t {
        Some(b) => b.single().map_err(ConfigError)?,
        None => 0.5,
    };
    let qt_cfg = QtConfig::new(t, map_s, map_t).map_err(|e| ConfigError(e.to_string()))?;
    let tuples = ctx
        .cfg
        .tuples
        .unwrap_or(if check == "decay" { 1 } else { 100 });
    if tuples == 0 {
        return cfg_err("tuple count must be >= 1");
    }
    let space = &ctx.handle.model;
    let mut rng = ctx.rng();
    let mut records = Vec::new();
    let mut violation = false;
    let mut inconclusive: Option<String> = None;
    let with_dist = check == "decay";

    for _ in 0..tuples {
        let p = space.sample(&mut rng);
        let q = space.sample(&mut rng);
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        match check.as_str() {
            "two_map" => {
                let rec = qt::check_two_map_bound(space, &qt_cfg, &p, &q, &x, &y)
                    .map_err(|e| ConfigError(e.to_string()))?;
                violation |= rec.min_residual() < -ctx.tol;
                records.push(rec);
            }
            "iterated" => {
                let n = ctx.cfg.n.unwrap_or(3);
                let rec = qt::check_iterated_bound(space, &qt_cfg, &p, &q, &x, &y, n)
                    .map_err(|e| ConfigError(e.to_string()))?;
                violation |= rec.min_residual() < -ctx.tol;
                records.push(rec);
            }
            "slices" => {
                let n = ctx.cfg.n.unwrap_or(2);
                let m = ctx.cfg.m.unwrap_or(1);
                let recs = qt::check_slice_bounds(space, &qt_cfg, &p, &q, &x, &y, n, m)
                    .map_err(|e| ConfigError(e.to_string()))?;
                violation |= recs.iter().any(|r| r.residual < -ctx.tol);
                records.extend(recs);
            }
            "decay" => {
                let n_max = ctx.cfg.n_max.or(ctx.cfg.n).unwrap_or(50);
                match qt::check_decay(space, &qt_cfg, &p, &q, &x, &y, n_max, ctx.tol) {
                    Ok(rep) => {
                        violation |= !rep.passed;
                        records.extend(rep.records);
                    }
                    Err(CoreError::Inconclusive(msg)) => {
                        inconclusive = Some(msg.to_string());
                        break;
                    }
                    Err(e) => return cfg_err(e.to_string()),
                }
            }
            other => {
                return cfg_err(format!(
                    "unknown bounds check {other:?}; expected two_map, iterated, decay or slices"
                ))
            }
        }
    }

    let mut csv = Vec::new();
    output::write_bounds_csv(&mut csv, &ctx.handle, &records, with_dist)
        .map_err(|e| ConfigError(format!("csv write failed: {e}")))?;
    ctx.emit(
        &format!("bounds_{check}.csv"),
        &String::from_utf8(csv).expect("csv is utf-8"),
    )?;
    if let Some(msg) = inconclusive {
        eprintln!("bounds {check}: inconclusive ({msg})");
        return Ok(EXIT_OK);
    }
    Ok(if violation { EXIT_VIOLATION } else { EXIT_OK })
}

// ---------------------------------------------------------------------------
// suggest
// ---------------------------------------------------------------------------

pub fn cmd_suggest(cfg: RunConfig) -> CmdResult {
    let ks = cfg.ks.ok_or_else(|| ConfigError("suggest needs --ks".into()))?;
    let kt = cfg.kt.ok_or_else(|| ConfigError("suggest needs --kt".into()))?;
    let theta = cfg
        .theta
        .ok_or_else(|| ConfigError("suggest needs --theta".into()))?;
    let strict = cfg.strict.unwrap_or(false);
    let seed = cfg.resolve_seed().map_err(ConfigError)?;
    let out_dir = cfg.out.clone();
    let digest = cfg.digest();
    let intervals = scheme::suggest_blend(ks, kt, theta, strict)
        .map_err(|e| ConfigError(e.to_string()))?;
    let doc = json!({
        "k_s": ks,
        "k_t": kt,
        "theta": theta,
        "strict": strict,
        "seed": seed,
        "config_digest": digest,
        "intervals": intervals.iter().map(|iv| json!({
            "lo": iv.lo,
            "hi": iv.hi,
            "lo_open": iv.lo_open,
            "hi_open": iv.hi_open,
        })).collect::<Vec<_>>(),
    });
    let text = output::to_json(&doc);
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(&dir)
                .map_err(|e| ConfigError(format!("cannot create output dir {dir:?}: {e}")))?;
            fs::write(dir.join("suggest.json"), text)
                .map_err(|e| ConfigError(format!("cannot write suggest.json: {e}")))?;
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}
