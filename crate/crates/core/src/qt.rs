//! The two-map blend operator `Q_t(a, b) = t a ⊕ (1-t) b` and numerical
//! verification of its contraction bounds: the squared-distance bound for
//! one application and for iterated maps, the decay and limsup behaviour
//! under (strict) contractions, the four slice bounds with one map frozen,
//! and the blended fixed point `z_t = t p* ⊕ (1-t) y*`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::{apply_n, banach_fixed_point, FixedPointResult, LipschitzMap};
use crate::space::{Point, SpaceModel};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::float::FloatExt;

/// Blend weight plus the two self-maps it mixes.
#[derive(Debug, Clone, PartialEq)]
pub struct QtConfig {
    pub t: f64,
    pub map_s: LipschitzMap,
    pub map_t: LipschitzMap,
}

impl QtConfig {
    pub fn new(t: f64, map_s: LipschitzMap, map_t: LipschitzMap) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(alloc::format!(
                "blend weight {t} outside [0, 1]"
            )));
        }
        Ok(QtConfig { t, map_s, map_t })
    }

    pub fn validate(&self, space: &SpaceModel) -> Result<()> {
        self.map_s.validate(space)?;
        self.map_t.validate(space)
    }
}

/// One evaluated inequality: `residual = rhs - lhs`, with the intermediate
/// inequalities of the derivation chain where the bound has one.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub n: usize,
    pub t: f64,
    /// The `(p, q, x, y)` configuration the record was evaluated on.
    pub inputs: Vec<Point>,
    /// Residuals of each intermediate inequality (two CAT(0) comparisons,
    /// the assembled algebraic line, and the Lipschitz absorption step).
    pub chain_residuals: Vec<f64>,
    /// True when an undefined certificate made the check hold vacuously.
    pub vacuous: bool,
}

impl BoundCheckRecord {
    /// Smallest of the headline residual and every chain residual.
    pub fn min_residual(&self) -> f64 {
        self.chain_residuals
            .iter()
            .cloned()
            .fold(self.residual, f64::min)
    }
}

/// Blends two raw points: `combine(a, b, t)`. Callers pass `S x` and `T y`
/// themselves, mirroring `Q_t(Sx, Ty)`.
pub fn qt_apply(space: &SpaceModel, cfg: &QtConfig, a: &Point, b: &Point) -> Result<Point> {
    space.combine(a, b, cfg.t)
}

fn sq(v: f64) -> f64 {
    v * v
}

/// Shared evaluation of the two-map bound for already-applied images
/// `sp = S p`, `sq_ = S q`, `tx = T x`, `ty = T y` with constants `ks`, `kt`
/// and base distances `dpq = d(p, q)`, `dxy = d(x, y)`.
#[allow(clippy::too_many_arguments)]
fn two_map_record(
    space: &SpaceModel,
    t: f64,
    sp: &Point,
    sq_: &Point,
    tx: &Point,
    ty: &Point,
    ks: f64,
    kt: f64,
    dpq: f64,
    dxy: f64,
) -> Result<(f64, f64, Vec<f64>)> {
    let u = space.combine(sq_, ty, t)?; // Q_t(Sq, Ty)
    let v = space.combine(sp, tx, t)?; // Q_t(Sp, Tx)
    let lhs = sq(space.distance(&v, &u)?);

    let d_sp_u = sq(space.distance(sp, &u)?);
    let d_tx_u = sq(space.distance(tx, &u)?);
    let d_sp_tx = sq(space.distance(sp, tx)?);
    let d_sp_sq = sq(space.distance(sp, sq_)?);
    let d_sp_ty = sq(space.distance(sp, ty)?);
    let d_sq_ty = sq(space.distance(sq_, ty)?);
    let d_tx_sq = sq(space.distance(tx, sq_)?);
    let d_tx_ty = sq(space.distance(tx, ty)?);

    let c1 = t * d_sp_u + (1.0 - t) * d_tx_u - t * (1.0 - t) * d_sp_tx - lhs;
    let c2 = t * d_sp_sq + (1.0 - t) * d_sp_ty - t * (1.0 - t) * d_sq_ty - d_sp_u;
    let c3 = t * d_tx_sq + (1.0 - t) * d_tx_ty - t * (1.0 - t) * d_sq_ty - d_tx_u;
    let assembled = t * t * d_sp_sq
        + (1.0 - t) * (1.0 - t) * d_tx_ty
        + t * (1.0 - t) * (d_sp_ty + d_tx_sq - d_sq_ty - d_sp_tx);
    let c4 = assembled - lhs;

    let cross_sum = d_sp_ty.sqrt() + d_sq_ty.sqrt() + d_tx_sq.sqrt() + d_sp_tx.sqrt();
    let rhs = (t * t * ks * ks + (1.0 - t) * (1.0 - t) * kt * kt) * sq(dpq).max(sq(dxy))
        + t * (1.0 - t) * cross_sum * (ks * dpq).min(kt * dxy);
    let c5 = rhs - assembled;

    Ok((lhs, rhs, vec![c1, c2, c3, c4, c5]))
}

/// Squared-distance bound for one application of each map.
pub fn check_two_map_bound(
    space: &SpaceModel,
    cfg: &QtConfig,
    p: &Point,
    q: &Point,
    x: &Point,
    y: &Point,
) -> Result<BoundCheckRecord> {
    cfg.validate(space)?;
    let sp = cfg.map_s.apply(space, p)?;
    let sq_ = cfg.map_s.apply(space, q)?;
    let tx = cfg.map_t.apply(space, x)?;
    let ty = cfg.map_t.apply(space, y)?;
    let dpq = space.distance(p, q)?;
    let dxy = space.distance(x, y)?;
    let (lhs, rhs, chain) = two_map_record(
        space,
        cfg.t,
        &sp,
        &sq_,
        &tx,
        &ty,
        cfg.map_s.declared_k(),
        cfg.map_t.declared_k(),
        dpq,
        dxy,
    )?;
    Ok(BoundCheckRecord {
        lhs,
        rhs,
        residual: rhs - lhs,
        n: 1,
        t: cfg.t,
        inputs: vec![p.clone(), q.clone(), x.clone(), y.clone()],
        chain_residuals: chain,
        vacuous: false,
    })
}

/// Same bound with `S`, `T` replaced by their n-th iterates and constants
/// by `K^n`. `n = 1` coincides with [`check_two_map_bound`].
pub fn check_iterated_bound(
    space: &SpaceModel,
    cfg: &QtConfig,
    p: &Point,
    q: &Point,
    x: &Point,
    y: &Point,
    n: usize,
) -> Result<BoundCheckRecord> {
    if n == 0 {
        return Err(Error::InvalidParameter("iterated bound needs n >= 1".into()));
    }
    cfg.validate(space)?;
    let sp = apply_n(space, &cfg.map_s, p, n)?;
    let sq_ = apply_n(space, &cfg.map_s, q, n)?;
    let tx = apply_n(space, &cfg.map_t, x, n)?;
    let ty = apply_n(space, &cfg.map_t, y, n)?;
    let dpq = space.distance(p, q)?;
    let dxy = space.distance(x, y)?;
    let (lhs, rhs, chain) = two_map_record(
        space,
        cfg.t,
        &sp,
        &sq_,
        &tx,
        &ty,
        cfg.map_s.declared_k().powi(n as i32),
        cfg.map_t.declared_k().powi(n as i32),
        dpq,
        dxy,
    )?;
    Ok(BoundCheckRecord {
        lhs,
        rhs,
        residual: rhs - lhs,
        n,
        t: cfg.t,
        inputs: vec![p.clone(), q.clone(), x.clone(), y.clone()],
        chain_residuals: chain,
        vacuous: false,
    })
}

/// Which decay hypothesis a [`check_decay`] run certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMode {
    /// Both maps strictly contractive: blended distances vanish.
    StrictContraction,
    /// One strict contraction, one nonexpansive map with a fixed point:
    /// the limsup excess over `min(t^2, (1-t)^2) max(d^2)` is checked.
    MixedNonexpansive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub mode: DecayMode,
    pub records: Vec<BoundCheckRecord>,
    /// Blended distance at `n_max`.
    pub final_distance: f64,
    /// Max of `lhs - rhs` over the tail (last 10% of n); the finite
    /// surrogate for the limsup. Present in mixed mode.
    pub limsup_excess: Option<f64>,
    pub passed: bool,
}

/// Tracks `d(Q_t(S^n p, T^n x), Q_t(S^n q, T^n y))` for `n = 1..=n_max` and
/// certifies the hypothesis-appropriate limit statement at tolerance `tol`.
/// A nonexpansive map without a known fixed point is inconclusive.
#[allow(clippy::too_many_arguments)]
pub fn check_decay(
    space: &SpaceModel,
    cfg: &QtConfig,
    p: &Point,
    q: &Point,
    x: &Point,
    y: &Point,
    n_max: usize,
    tol: f64,
) -> Result<DecayReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("decay check needs n_max >= 1".into()));
    }
    cfg.validate(space)?;
    let ks = cfg.map_s.declared_k();
    let kt = cfg.map_t.declared_k();
    let mode = if ks < 1.0 && kt < 1.0 {
        DecayMode::StrictContraction
    } else if (ks < 1.0 && kt == 1.0 && cfg.map_t.fixed_point(space).is_some())
        || (kt < 1.0 && ks == 1.0 && cfg.map_s.fixed_point(space).is_some())
    {
        DecayMode::MixedNonexpansive
    } else {
        return Err(Error::Inconclusive(
            "decay hypotheses need both constants < 1, or one equal to 1 with a known fixed point"
                .into(),
        ));
    };

    let dpq = space.distance(p, q)?;
    let dxy = space.distance(x, y)?;
    let cap = cfg.t.min(1.0 - cfg.t);
    let rhs = cap * cap * sq(dpq).max(sq(dxy));

    let mut records = Vec::with_capacity(n_max);
    let (mut sp, mut sq_, mut tx, mut ty) = (p.clone(), q.clone(), x.clone(), y.clone());
    let mut final_distance = 0.0;
    for n in 1..=n_max {
        sp = cfg.map_s.apply(space, &sp)?;
        sq_ = cfg.map_s.apply(space, &sq_)?;
        tx = cfg.map_t.apply(space, &tx)?;
        ty = cfg.map_t.apply(space, &ty)?;
        let a = space.combine(&sp, &tx, cfg.t)?;
        let b = space.combine(&sq_, &ty, cfg.t)?;
        let dist = space.distance(&a, &b)?;
        final_distance = dist;
        records.push(BoundCheckRecord {
            lhs: sq(dist),
            rhs,
            residual: rhs - sq(dist),
            n,
            t: cfg.t,
            inputs: vec![p.clone(), q.clone(), x.clone(), y.clone()],
            chain_residuals: Vec::new(),
            vacuous: false,
        });
    }

    match mode {
        DecayMode::StrictContraction => Ok(DecayReport {
            mode,
            passed: final_distance <= tol,
            records,
            final_distance,
            limsup_excess: None,
        }),
        DecayMode::MixedNonexpansive => {
            let tail = (n_max / 10).max(1);
            let excess = records
                .iter()
                .skip(n_max - tail)
                .map(|r| r.lhs - r.rhs)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(DecayReport {
                mode,
                passed: excess <= tol,
                records,
                final_distance,
                limsup_excess: Some(excess),
            })
        }
    }
}

/// The four slice bounds with one argument slot frozen, first powers on
/// both sides: `d(Q_t(S^m p, T x), Q_t(S^m p, T y)) <= (1-t) K_T d(x, y)`,
/// its n-th iterate version, and the symmetric S-slices with `t K_S`.
#[allow(clippy::too_many_arguments)]
pub fn check_slice_bounds(
    space: &SpaceModel,
    cfg: &QtConfig,
    p: &Point,
    q: &Point,
    x: &Point,
    y: &Point,
    n: usize,
    m: usize,
) -> Result<Vec<BoundCheckRecord>> {
    cfg.validate(space)?;
    let t = cfg.t;
    let ks = cfg.map_s.declared_k();
    let kt = cfg.map_t.declared_k();
    let dpq = space.distance(p, q)?;
    let dxy = space.distance(x, y)?;
    let smp = apply_n(space, &cfg.map_s, p, m)?;
    let tmx = apply_n(space, &cfg.map_t, x, m)?;
    let mut out = Vec::with_capacity(4);
    let mut push = |lhs: f64, rhs: f64, count: usize| {
        out.push(BoundCheckRecord {
            lhs,
            rhs,
            residual: rhs - lhs,
            n: count,
            t,
            inputs: vec![p.clone(), q.clone(), x.clone(), y.clone()],
            chain_residuals: Vec::new(),
            vacuous: false,
        });
    };

    // T-slices: first map slot frozen at S^m p.
    let tx1 = cfg.map_t.apply(space, x)?;
    let ty1 = cfg.map_t.apply(space, y)?;
    let lhs1 = space.distance(
        &space.combine(&smp, &tx1, t)?,
        &space.combine(&smp, &ty1, t)?,
    )?;
    push(lhs1, (1.0 - t) * kt * dxy, 1);

    let txn = apply_n(space, &cfg.map_t, x, n)?;
    let tyn = apply_n(space, &cfg.map_t, y, n)?;
    let lhs2 = space.distance(
        &space.combine(&smp, &txn, t)?,
        &space.combine(&smp, &tyn, t)?,
    )?;
    push(lhs2, (1.0 - t) * kt.powi(n as i32) * dxy, n);

    // S-slices: second map slot frozen at T^m x.
    let sp1 = cfg.map_s.apply(space, p)?;
    let sq1 = cfg.map_s.apply(space, q)?;
    let lhs3 = space.distance(
        &space.combine(&sp1, &tmx, t)?,
        &space.combine(&sq1, &tmx, t)?,
    )?;
    push(lhs3, t * ks * dpq, 1);

    let spn = apply_n(space, &cfg.map_s, p, n)?;
    let sqn = apply_n(space, &cfg.map_s, q, n)?;
    let lhs4 = space.distance(
        &space.combine(&spn, &tmx, t)?,
        &space.combine(&sqn, &tmx, t)?,
    )?;
    push(lhs4, t * ks.powi(n as i32) * dpq, n);

    Ok(out)
}

/// Fixed points of both maps and their geodesic blend.
#[derive(Debug, Clone, PartialEq)]
pub struct ZtResult {
    /// `z_t = t p* ⊕ (1-t) y*`.
    pub z: Point,
    pub p_star: FixedPointResult,
    pub y_star: FixedPointResult,
}

fn resolve_fixed_point(
    space: &SpaceModel,
    map: &LipschitzMap,
    start: &Point,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult> {
    if map.declared_k() < 1.0 {
        let out = banach_fixed_point(space, map, start, tol, max_iter)?;
        if !out.converged {
            return Err(Error::Inconclusive(alloc::format!(
                "fixed-point solve did not converge in {max_iter} iterations (final step {})",
                out.final_step
            )));
        }
        return Ok(out);
    }
    // Nonexpansive: fall back to a structurally known fixed point.
    match map.fixed_point(space) {
        Some(point) => Ok(FixedPointResult {
            point,
            iterations: 0,
            final_step: 0.0,
            converged: true,
        }),
        None => Err(Error::Inconclusive(
            "map is not strictly contractive and has no known fixed point".into(),
        )),
    }
}

/// Computes `y* = T y*`, `p* = S p*` and the blended fixed point
/// `z_t = combine(p*, y*, t)`, verifying the endpoint identities
/// `z_0 = y*` and `z_1 = p*` within `tol`.
pub fn compute_zt(
    space: &SpaceModel,
    cfg: &QtConfig,
    p0: &Point,
    x0: &Point,
    tol: f64,
    max_iter: usize,
) -> Result<ZtResult> {
    cfg.validate(space)?;
    let p_star = resolve_fixed_point(space, &cfg.map_s, p0, tol, max_iter)?;
    let y_star = resolve_fixed_point(space, &cfg.map_t, x0, tol, max_iter)?;
    let z = space.combine(&p_star.point, &y_star.point, cfg.t)?;
    let z0 = space.combine(&p_star.point, &y_star.point, 0.0)?;
    let z1 = space.combine(&p_star.point, &y_star.point, 1.0)?;
    if space.distance(&z0, &y_star.point)? > tol || space.distance(&z1, &p_star.point)? > tol {
        return Err(Error::InvalidParameter(
            "endpoint identities z_0 = y*, z_1 = p* failed verification".into(),
        ));
    }
    Ok(ZtResult { z, p_star, y_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Payload;

    fn line() -> SpaceModel {
        SpaceModel::euclidean(1).unwrap()
    }

    fn pt(space: &SpaceModel, v: f64) -> Point {
        space.euclidean_point(vec![v]).unwrap()
    }

    fn contraction(space: &SpaceModel, anchor: f64, k: f64) -> LipschitzMap {
        LipschitzMap::contraction(pt(space, anchor), k).unwrap()
    }

    #[test]
    fn qt_apply_blends_and_collapses() {
        let space = line();
        let cfg = QtConfig::new(0.5, LipschitzMap::identity(), LipschitzMap::identity()).unwrap();
        let a = pt(&space, 0.0);
        let b = pt(&space, 2.0);
        let mid = qt_apply(&space, &cfg, &a, &b).unwrap();
        assert_eq!(mid.payload(), &Payload::Euclidean(vec![1.0]));

        for (t, expect) in [(1.0, &a), (0.0, &b)] {
            let cfg = QtConfig::new(t, LipschitzMap::identity(), LipschitzMap::identity()).unwrap();
            let out = qt_apply(&space, &cfg, &a, &b).unwrap();
            assert!(space.distance(&out, expect).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn qt_apply_disk_midpoint() {
        let space = SpaceModel::poincare_disk();
        let cfg = QtConfig::new(0.5, LipschitzMap::identity(), LipschitzMap::identity()).unwrap();
        let a = space.disk_point(0.0, 0.0).unwrap();
        let b = space.disk_point(0.5, 0.0).unwrap();
        let mid = qt_apply(&space, &cfg, &a, &b).unwrap();
        let Payload::Disk(z) = mid.payload() else {
            panic!("disk payload expected")
        };
        assert!((z.re - (2.0 - 3.0_f64.sqrt())).abs() <= 1e-12 && z.im.abs() <= 1e-15);
    }

    #[test]
    fn two_map_bound_identity_equality_case() {
        let space = line();
        let cfg = QtConfig::new(0.5, LipschitzMap::identity(), LipschitzMap::identity()).unwrap();
        let rec = check_two_map_bound(
            &space,
            &cfg,
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
        )
        .unwrap();
        assert!((rec.lhs - 1.0).abs() <= 1e-12, "lhs {}", rec.lhs);
        assert!((rec.rhs - 1.0).abs() <= 1e-12, "rhs {}", rec.rhs);
        assert!(rec.residual.abs() <= 1e-12);
    }

    #[test]
    fn two_map_bound_coincident_inputs() {
        let space = line();
        let cfg = QtConfig::new(0.3, contraction(&space, 0.0, 0.5), contraction(&space, 1.0, 0.7))
            .unwrap();
        let p = pt(&space, 0.4);
        let x = pt(&space, -0.2);
        let rec = check_two_map_bound(&space, &cfg, &p, &p, &x, &x).unwrap();
        assert!(rec.lhs.abs() <= 1e-15);
        assert!(rec.residual >= 0.0);
    }

    #[test]
    fn two_map_bound_random_disk_tuples() {
        use rand::SeedableRng;
        let space = SpaceModel::poincare_disk();
        let anchor_a = space.disk_point(0.2, 0.1).unwrap();
        let anchor_b = space.disk_point(-0.3, 0.25).unwrap();
        let cfg = QtConfig::new(
            0.5,
            LipschitzMap::contraction(anchor_a, 0.5).unwrap(),
            LipschitzMap::contraction(anchor_b, 0.5).unwrap(),
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100);
        for _ in 0..1_000 {
            let p = space.sample(&mut rng);
            let q = space.sample(&mut rng);
            let x = space.sample(&mut rng);
            let y = space.sample(&mut rng);
            let rec = check_two_map_bound(&space, &cfg, &p, &q, &x, &y).unwrap();
            assert!(rec.min_residual() >= -1e-7, "residual {}", rec.min_residual());
        }
    }

    #[test]
    fn iterated_bound_reduces_and_decays() {
        let space = line();
        let cfg = QtConfig::new(0.5, contraction(&space, 0.0, 0.5), contraction(&space, 0.0, 0.5))
            .unwrap();
        let (p, q, x, y) = (pt(&space, 0.0), pt(&space, 1.0), pt(&space, 0.0), pt(&space, 1.0));
        let one = check_iterated_bound(&space, &cfg, &p, &q, &x, &y, 1).unwrap();
        let direct = check_two_map_bound(&space, &cfg, &p, &q, &x, &y).unwrap();
        assert!((one.lhs - direct.lhs).abs() <= 1e-15);
        assert!((one.rhs - direct.rhs).abs() <= 1e-15);

        let three = check_iterated_bound(&space, &cfg, &p, &q, &x, &y, 3).unwrap();
        assert!(three.residual >= 0.0);
        assert!(three.min_residual() >= -1e-12);

        // Identity maps: records identical for every n.
        let idle = QtConfig::new(0.25, LipschitzMap::identity(), LipschitzMap::identity()).unwrap();
        let r1 = check_iterated_bound(&space, &idle, &p, &q, &x, &y, 1).unwrap();
        let r7 = check_iterated_bound(&space, &idle, &p, &q, &x, &y, 7).unwrap();
        assert!((r1.lhs - r7.lhs).abs() <= 1e-15 && (r1.rhs - r7.rhs).abs() <= 1e-15);

        assert!(matches!(
            check_iterated_bound(&space, &cfg, &p, &q, &x, &y, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn decay_strict_contractions_vanish() {
        let space = line();
        let cfg = QtConfig::new(0.5, contraction(&space, 0.0, 0.5), contraction(&space, 0.0, 0.5))
            .unwrap();
        let rep = check_decay(
            &space,
            &cfg,
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            50,
            1e-9,
        )
        .unwrap();
        assert_eq!(rep.mode, DecayMode::StrictContraction);
        assert!(rep.passed && rep.final_distance <= 1e-9);
        // Exact geometric sequence 0.5^n on the line.
        assert!((rep.records[0].lhs.sqrt() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn decay_t_zero_is_pure_t_orbit() {
        let space = line();
        let cfg = QtConfig::new(0.0, contraction(&space, 0.0, 0.9), contraction(&space, 0.0, 0.5))
            .unwrap();
        let rep = check_decay(
            &space,
            &cfg,
            &pt(&space, 0.3),
            &pt(&space, -0.4),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            20,
            1e-9,
        )
        .unwrap();
        for rec in &rep.records {
            let expect = 0.5_f64.powi(rec.n as i32);
            assert!((rec.lhs.sqrt() - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn decay_coincident_inputs_are_zero() {
        let space = line();
        let cfg = QtConfig::new(0.7, contraction(&space, 0.2, 0.5), contraction(&space, 0.5, 0.8))
            .unwrap();
        let p = pt(&space, 0.1);
        let x = pt(&space, 0.6);
        let rep = check_decay(&space, &cfg, &p, &p, &x, &x, 10, 1e-9).unwrap();
        assert!(rep.passed);
        assert!(rep.records.iter().all(|r| r.lhs.abs() <= 1e-24));
    }

    #[test]
    fn decay_mixed_mode_passes_at_balanced_blend() {
        // S strictly contractive, T = identity (nonexpansive with fixed
        // points). At t = 1/2 the limsup bound min(t^2, (1-t)^2) matches the
        // surviving (1-t)^2 coefficient.
        let space = line();
        let cfg = QtConfig::new(0.5, contraction(&space, 0.0, 0.5), LipschitzMap::identity())
            .unwrap();
        let rep = check_decay(
            &space,
            &cfg,
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            200,
            1e-9,
        )
        .unwrap();
        assert_eq!(rep.mode, DecayMode::MixedNonexpansive);
        assert!(rep.passed, "excess {:?}", rep.limsup_excess);
    }

    #[test]
    fn decay_mixed_mode_detects_printed_bound_failure() {
        // At t = 0.2 the surviving coefficient is (1-t)^2 = 0.64 but the
        // printed bound uses min(t^2, (1-t)^2) = 0.04; the check honestly
        // reports the violation (excess 0.6 on the line with T = identity).
        let space = line();
        let cfg = QtConfig::new(0.2, contraction(&space, 0.0, 0.5), LipschitzMap::identity())
            .unwrap();
        let rep = check_decay(
            &space,
            &cfg,
            &pt(&space, 0.0),
            &pt(&space, 0.0),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            100,
            1e-9,
        )
        .unwrap();
        assert!(!rep.passed);
        let excess = rep.limsup_excess.unwrap();
        assert!((excess - 0.6).abs() <= 1e-9, "excess {excess}");
    }

    #[test]
    fn decay_without_fixed_point_is_inconclusive() {
        let space = line();
        let translation =
            LipschitzMap::isometry(crate::map::Isometry::Translation { offset: vec![1.0] });
        let cfg = QtConfig::new(0.5, contraction(&space, 0.0, 0.5), translation).unwrap();
        let out = check_decay(
            &space,
            &cfg,
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            10,
            1e-9,
        );
        assert!(matches!(out, Err(Error::Inconclusive(_))));
    }

    #[test]
    fn slice_bounds_hand_case() {
        let space = line();
        let cfg = QtConfig::new(0.5, contraction(&space, 0.0, 0.5), contraction(&space, 0.0, 0.5))
            .unwrap();
        let recs = check_slice_bounds(
            &space,
            &cfg,
            &pt(&space, 0.0),
            &pt(&space, 0.0),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            2,
            0,
        )
        .unwrap();
        // Line 2: lhs = 0.5 * |T^2 x - T^2 y| = 0.125, rhs = 0.5 * 0.25 * 1.
        assert!((recs[1].lhs - 0.125).abs() <= 1e-12);
        assert!((recs[1].rhs - 0.125).abs() <= 1e-12);
        assert!(recs[1].residual.abs() <= 1e-12);
    }

    #[test]
    fn slice_bounds_t_one_collapses_t_slices() {
        let space = line();
        let cfg = QtConfig::new(1.0, contraction(&space, 0.0, 0.5), contraction(&space, 0.0, 0.5))
            .unwrap();
        let recs = check_slice_bounds(
            &space,
            &cfg,
            &pt(&space, 0.3),
            &pt(&space, -0.7),
            &pt(&space, 0.0),
            &pt(&space, 1.0),
            3,
            2,
        )
        .unwrap();
        assert!(recs[0].lhs.abs() <= 1e-15 && recs[0].rhs.abs() <= 1e-15);
        assert!(recs[1].lhs.abs() <= 1e-15);
    }

    #[test]
    fn slice_bounds_hold_on_random_disk_tuples() {
        use rand::SeedableRng;
        let space = SpaceModel::poincare_disk();
        let a = space.disk_point(0.1, -0.2).unwrap();
        let b = space.disk_point(-0.15, 0.3).unwrap();
        let cfg = QtConfig::new(
            0.4,
            LipschitzMap::contraction(a, 0.8).unwrap(),
            LipschitzMap::contraction(b, 0.6).unwrap(),
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = space.sample(&mut rng);
            let q = space.sample(&mut rng);
            let x = space.sample(&mut rng);
            let y = space.sample(&mut rng);
            for rec in check_slice_bounds(&space, &cfg, &p, &q, &x, &y, 3, 2).unwrap() {
                assert!(rec.residual >= -1e-7, "residual {}", rec.residual);
            }
        }
    }

    #[test]
    fn compute_zt_affine_closed_form() {
        let space = line();
        let s = LipschitzMap::affine(&space, 0.5, &[2.0]).unwrap(); // p* = 4
        let t_map = contraction(&space, 0.0, 0.5); // y* = 0
        for (t, expect) in [(0.0, 0.0), (0.5, 2.0), (1.0, 4.0)] {
            let cfg = QtConfig::new(t, s.clone(), t_map.clone()).unwrap();
            let out = compute_zt(&space, &cfg, &pt(&space, 0.0), &pt(&space, 1.0), 1e-12, 500)
                .unwrap();
            let expected = pt(&space, expect);
            assert!(
                space.distance(&out.z, &expected).unwrap() <= 1e-9,
                "t {t}: z {:?}",
                out.z
            );
        }
    }

    #[test]
    fn compute_zt_uses_known_fixed_point_of_nonexpansive_s() {
        let space = line();
        let center = pt(&space, 3.0);
        let s = LipschitzMap::ball_projection(center.clone(), 1.0).unwrap(); // K = 1, Fix = ball
        let t_map = contraction(&space, 0.0, 0.5);
        let cfg = QtConfig::new(0.5, s, t_map).unwrap();
        let out = compute_zt(&space, &cfg, &pt(&space, 0.0), &pt(&space, 1.0), 1e-12, 500)
            .unwrap();
        assert_eq!(out.p_star.iterations, 0);
        assert_eq!(out.p_star.point, center);
        // z = midpoint of 3 and 0.
        assert!(space.distance(&out.z, &pt(&space, 1.5)).unwrap() <= 1e-9);
    }

    #[test]
    fn zt_lies_on_the_fixed_point_geodesic() {
        let space = SpaceModel::euclidean(2).unwrap();
        let pa = space.euclidean_point(vec![1.0, -0.5]).unwrap();
        let pb = space.euclidean_point(vec![-0.75, 0.25]).unwrap();
        let s = LipschitzMap::contraction(pa, 0.6).unwrap();
        let t_map = LipschitzMap::contraction(pb, 0.3).unwrap();
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let cfg = QtConfig::new(t, s.clone(), t_map.clone()).unwrap();
            let start = space.euclidean_point(vec![0.0, 0.0]).unwrap();
            let out = compute_zt(&space, &cfg, &start, &start, 1e-13, 1_000).unwrap();
            let dp = space.distance(&out.p_star.point, &out.z).unwrap();
            let dy = space.distance(&out.z, &out.y_star.point).unwrap();
            let dpy = space
                .distance(&out.p_star.point, &out.y_star.point)
                .unwrap();
            assert!((dp + dy - dpy).abs() <= 1e-9);
            assert!((dy - t * dpy).abs() <= 1e-9);
        }
    }
}
