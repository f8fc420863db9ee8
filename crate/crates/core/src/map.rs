//! Lipschitz self-maps on the model spaces: geodesic contractions toward an
//! anchor, isometries, metric projections onto closed balls, identity, and
//! compositions. Each map declares its Lipschitz constant; audits estimate
//! the constant empirically and fixed points come from Banach iteration.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::audit::AuditSpec;
use crate::error::{Error, Result};
use crate::space::disk::{self, Cpx};
use crate::space::{Payload, Point, SpaceKind, SpaceModel, TreePos};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::float::FloatExt;

/// Space-specific rigid motions; all have declared constant 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Isometry {
    /// Rotation by `angle` in the coordinate plane `(axis_i, axis_j)` about
    /// `center` (Euclidean spaces).
    EuclideanRotation {
        center: Vec<f64>,
        axis_i: usize,
        axis_j: usize,
        angle: f64,
    },
    /// Translation by `offset` (Euclidean spaces); fixed-point free unless
    /// the offset is zero.
    Translation { offset: Vec<f64> },
    /// Hyperbolic rotation by `angle` about `center` (Poincaré disk),
    /// conjugated through the Möbius translation taking `center` to 0.
    DiskRotation { center: (f64, f64), angle: f64 },
    /// Node permutation preserving edges and lengths (metric trees).
    TreeAutomorphism { perm: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    Identity,
    /// `x -> combine(x, anchor, factor)`: the anchor is fixed and
    /// `d(anchor, Tx) = factor * d(anchor, x)`.
    Contraction { anchor: Point, factor: f64 },
    /// Metric projection onto the closed ball `B(center, radius)`.
    BallProjection { center: Point, radius: f64 },
    Isometry(Isometry),
    /// `outer ∘ inner`; declared constant is the product.
    Compose {
        outer: Box<LipschitzMap>,
        inner: Box<LipschitzMap>,
    },
}

/// A self-map descriptor with its declared Lipschitz constant.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzMap {
    kind: MapKind,
    declared_k: f64,
}

/// Outcome of a Banach fixed-point solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    pub point: Point,
    pub iterations: usize,
    pub final_step: f64,
    pub converged: bool,
}

impl LipschitzMap {
    pub fn identity() -> Self {
        LipschitzMap {
            kind: MapKind::Identity,
            declared_k: 1.0,
        }
    }

    pub fn contraction(anchor: Point, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter("factor must be >= 0".into()));
        }
        Ok(LipschitzMap {
            kind: MapKind::Contraction { anchor, factor },
            declared_k: factor,
        })
    }

    pub fn ball_projection(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter("radius must be > 0".into()));
        }
        Ok(LipschitzMap {
            kind: MapKind::BallProjection { center, radius },
            declared_k: 1.0,
        })
    }

    pub fn isometry(iso: Isometry) -> Self {
        LipschitzMap {
            kind: MapKind::Isometry(iso),
            declared_k: 1.0,
        }
    }

    pub fn compose(outer: LipschitzMap, inner: LipschitzMap) -> Self {
        let k = outer.declared_k * inner.declared_k;
        LipschitzMap {
            kind: MapKind::Compose {
                outer: Box::new(outer),
                inner: Box::new(inner),
            },
            declared_k: k,
        }
    }

    /// Euclidean affine map `x -> scale * x + offset`, realized as a
    /// geodesic contraction toward its fixed point `offset / (1 - scale)`
    /// (or a translation when `scale = 1`).
    pub fn affine(space: &SpaceModel, scale: f64, offset: &[f64]) -> Result<Self> {
        let SpaceKind::Euclidean { dim } = space.kind() else {
            return Err(Error::UnsupportedMap("affine maps are Euclidean-only".into()));
        };
        if offset.len() != *dim {
            return Err(Error::InvalidParameter("offset dimension mismatch".into()));
        }
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter("scale must be >= 0".into()));
        }
        if scale == 1.0 {
            return Ok(LipschitzMap::isometry(Isometry::Translation {
                offset: offset.to_vec(),
            }));
        }
        let anchor =
            space.euclidean_point(offset.iter().map(|o| o / (1.0 - scale)).collect())?;
        LipschitzMap::contraction(anchor, scale)
    }

    /// Overrides the declared constant. The standard constructors keep the
    /// declared constant truthful; this exists to express *mislabelled* maps
    /// so audits can be shown to catch them.
    pub fn with_declared_k(mut self, k: f64) -> Self {
        self.declared_k = k;
        self
    }

    pub fn declared_k(&self) -> f64 {
        self.declared_k
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Applies the map. Contractions with factor > 1 extrapolate the
    /// geodesic through the anchor, which is only declared-constant-accurate
    /// on Euclidean spaces; elsewhere they are rejected.
    pub fn apply(&self, space: &SpaceModel, x: &Point) -> Result<Point> {
        match &self.kind {
            MapKind::Identity => {
                space.distance(x, x)?; // validates ownership and payload
                Ok(x.clone())
            }
            MapKind::Contraction { anchor, factor } => {
                if *factor <= 1.0 {
                    space.combine(x, anchor, *factor)
                } else {
                    if !matches!(space.kind(), SpaceKind::Euclidean { .. }) {
                        return Err(Error::UnsupportedMap(
                            "contraction factors > 1 are only Lipschitz-accurate on Euclidean spaces"
                                .into(),
                        ));
                    }
                    let d = space.distance(anchor, x)?;
                    if d == 0.0 {
                        return Ok(x.clone());
                    }
                    space.extend(anchor, x, factor * d)
                }
            }
            MapKind::BallProjection { center, radius } => {
                let d = space.distance(center, x)?;
                if d <= *radius {
                    Ok(x.clone())
                } else {
                    space.combine(x, center, radius / d)
                }
            }
            MapKind::Isometry(iso) => apply_isometry(space, iso, x),
            MapKind::Compose { outer, inner } => {
                let mid = inner.apply(space, x)?;
                outer.apply(space, &mid)
            }
        }
    }

    /// A fixed point known from the map's structure, if any. Used by checks
    /// whose hypotheses require a nonexpansive map to have a fixed point.
    pub fn fixed_point(&self, space: &SpaceModel) -> Option<Point> {
        match &self.kind {
            MapKind::Identity => Some(space.base_point()),
            MapKind::Contraction { anchor, .. } => Some(anchor.clone()),
            MapKind::BallProjection { center, .. } => Some(center.clone()),
            MapKind::Isometry(iso) => isometry_fixed_point(space, iso),
            MapKind::Compose { .. } => None,
        }
    }

    /// Validates map parameters against a space (anchor ownership, tree
    /// permutation consistency, rotation plane bounds).
    pub fn validate(&self, space: &SpaceModel) -> Result<()> {
        match &self.kind {
            MapKind::Identity => Ok(()),
            MapKind::Contraction { anchor, .. } => {
                if !space.validate_point(anchor) {
                    return Err(Error::InvalidPoint("anchor not in space".into()));
                }
                Ok(())
            }
            MapKind::BallProjection { center, .. } => {
                if !space.validate_point(center) {
                    return Err(Error::InvalidPoint("center not in space".into()));
                }
                Ok(())
            }
            MapKind::Isometry(iso) => validate_isometry(space, iso),
            MapKind::Compose { outer, inner } => {
                outer.validate(space)?;
                inner.validate(space)
            }
        }
    }
}

fn apply_isometry(space: &SpaceModel, iso: &Isometry, x: &Point) -> Result<Point> {
    validate_isometry(space, iso)?;
    match (space.kind(), iso, x.payload()) {
        (
            SpaceKind::Euclidean { .. },
            Isometry::EuclideanRotation {
                center,
                axis_i,
                axis_j,
                angle,
            },
            Payload::Euclidean(c),
        ) => {
            if x.space_id() != space.id() {
                return Err(Error::SpaceMismatch);
            }
            let mut out = c.clone();
            let u = c[*axis_i] - center[*axis_i];
            let v = c[*axis_j] - center[*axis_j];
            out[*axis_i] = center[*axis_i] + u * angle.cos() - v * angle.sin();
            out[*axis_j] = center[*axis_j] + u * angle.sin() + v * angle.cos();
            space.euclidean_point(out)
        }
        (SpaceKind::Euclidean { .. }, Isometry::Translation { offset }, Payload::Euclidean(c)) => {
            if x.space_id() != space.id() {
                return Err(Error::SpaceMismatch);
            }
            space.euclidean_point(c.iter().zip(offset).map(|(a, b)| a + b).collect())
        }
        (SpaceKind::PoincareDisk, Isometry::DiskRotation { center, angle }, Payload::Disk(z)) => {
            if x.space_id() != space.id() {
                return Err(Error::SpaceMismatch);
            }
            let a = Cpx::new(center.0, center.1);
            let w = disk::to_origin(a, *z);
            let rot = Cpx::new(angle.cos(), angle.sin()) * w;
            let back = disk::from_origin(a, rot);
            space.disk_point(back.re, back.im)
        }
        (SpaceKind::MetricTree(tree), Isometry::TreeAutomorphism { perm }, Payload::Tree(pos)) => {
            if x.space_id() != space.id() {
                return Err(Error::SpaceMismatch);
            }
            match pos {
                TreePos::Node(i) => space.node_point(perm[*i]),
                TreePos::Edge { edge, offset } => {
                    let e = &tree.edges()[*edge];
                    let (ia, ib) = (perm[e.a], perm[e.b]);
                    for (j, im) in tree.edges().iter().enumerate() {
                        if im.a == ia && im.b == ib {
                            return space.edge_point(j, *offset);
                        }
                        if im.a == ib && im.b == ia {
                            return space.edge_point(j, im.len - *offset);
                        }
                    }
                    Err(Error::UnsupportedMap("permutation does not preserve edges".into()))
                }
            }
        }
        _ => Err(Error::UnsupportedMap(
            "isometry kind does not match the space".into(),
        )),
    }
}

fn validate_isometry(space: &SpaceModel, iso: &Isometry) -> Result<()> {
    match (space.kind(), iso) {
        (
            SpaceKind::Euclidean { dim },
            Isometry::EuclideanRotation {
                center,
                axis_i,
                axis_j,
                ..
            },
        ) => {
            if center.len() != *dim || *axis_i >= *dim || *axis_j >= *dim || axis_i == axis_j {
                return Err(Error::InvalidParameter(
                    "rotation plane or center inconsistent with dimension".into(),
                ));
            }
            Ok(())
        }
        (SpaceKind::Euclidean { dim }, Isometry::Translation { offset }) => {
            if offset.len() != *dim {
                return Err(Error::InvalidParameter("offset dimension mismatch".into()));
            }
            Ok(())
        }
        (SpaceKind::PoincareDisk, Isometry::DiskRotation { center, .. }) => {
            let a = Cpx::new(center.0, center.1);
            if a.abs() >= 1.0 - disk::BOUNDARY_MARGIN {
                return Err(Error::InvalidParameter("rotation center outside disk".into()));
            }
            Ok(())
        }
        (SpaceKind::MetricTree(tree), Isometry::TreeAutomorphism { perm }) => {
            let n = tree.node_count();
            if perm.len() != n {
                return Err(Error::InvalidParameter("permutation length mismatch".into()));
            }
            let mut seen = vec![false; n];
            for &p in perm {
                if p >= n || seen[p] {
                    return Err(Error::InvalidParameter("not a permutation".into()));
                }
                seen[p] = true;
            }
            for e in tree.edges() {
                let (ia, ib) = (perm[e.a], perm[e.b]);
                let ok = tree.edges().iter().any(|im| {
                    ((im.a == ia && im.b == ib) || (im.a == ib && im.b == ia))
                        && (im.len - e.len).abs() <= 1e-12
                });
                if !ok {
                    return Err(Error::InvalidParameter(
                        "permutation does not preserve weighted edges".into(),
                    ));
                }
            }
            Ok(())
        }
        _ => Err(Error::UnsupportedMap(
            "isometry kind does not match the space".into(),
        )),
    }
}

fn isometry_fixed_point(space: &SpaceModel, iso: &Isometry) -> Option<Point> {
    match iso {
        Isometry::EuclideanRotation { center, angle, .. } => {
            if *angle == 0.0 {
                Some(space.base_point())
            } else {
                space.euclidean_point(center.clone()).ok()
            }
        }
        Isometry::Translation { offset } => {
            if offset.iter().all(|o| *o == 0.0) {
                Some(space.base_point())
            } else {
                None
            }
        }
        Isometry::DiskRotation { center, .. } => space.disk_point(center.0, center.1).ok(),
        Isometry::TreeAutomorphism { perm } => {
            let tree = space.tree()?;
            if let Some(i) = (0..perm.len()).find(|&i| perm[i] == i) {
                return space.node_point(i).ok();
            }
            // An edge swapped onto itself pins its midpoint.
            for (j, e) in tree.edges().iter().enumerate() {
                if perm[e.a] == e.b && perm[e.b] == e.a {
                    return space.edge_point(j, e.len / 2.0).ok();
                }
            }
            None
        }
    }
}

/// Empirical Lipschitz constant: the largest `d(Tx, Ty) / d(x, y)` over
/// sampled distinct pairs. Inconclusive if every sampled pair coincides.
pub fn estimate_lipschitz(space: &SpaceModel, map: &LipschitzMap, spec: &AuditSpec) -> Result<f64> {
    spec.validate()?;
    map.validate(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut best: Option<f64> = None;
    for _ in 0..spec.sample_count {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let d = space.distance(&x, &y)?;
        if d <= 1e-12 {
            continue;
        }
        let dt = space.distance(&map.apply(space, &x)?, &map.apply(space, &y)?)?;
        let ratio = dt / d;
        if best.map(|b| ratio > b).unwrap_or(true) {
            best = Some(ratio);
        }
    }
    best.ok_or_else(|| Error::Inconclusive("all sampled pairs coincided".into()))
}

/// Banach-Picard iteration `x_{k+1} = T x_k` until the step distance falls
/// below `tol`. Exhausting `max_iter` is reported, not an error.
pub fn banach_fixed_point(
    space: &SpaceModel,
    map: &LipschitzMap,
    x0: &Point,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }
    map.validate(space)?;
    let mut current = x0.clone();
    let mut step = 0.0;
    for k in 1..=max_iter {
        let next = map.apply(space, &current)?;
        step = space.distance(&current, &next)?;
        current = next;
        if step <= tol {
            return Ok(FixedPointResult {
                point: current,
                iterations: k,
                final_step: step,
                converged: true,
            });
        }
    }
    Ok(FixedPointResult {
        point: current,
        iterations: max_iter,
        final_step: step,
        converged: false,
    })
}

/// Orbit `[x, Tx, ..., T^n x]` (length `n + 1`).
pub fn iterate(space: &SpaceModel, map: &LipschitzMap, x: &Point, n: usize) -> Result<Vec<Point>> {
    let mut orbit = Vec::with_capacity(n + 1);
    orbit.push(x.clone());
    for _ in 0..n {
        let next = map.apply(space, orbit.last().expect("nonempty"))?;
        orbit.push(next);
    }
    Ok(orbit)
}

/// `T^n x` without materializing the orbit.
pub fn apply_n(space: &SpaceModel, map: &LipschitzMap, x: &Point, n: usize) -> Result<Point> {
    let mut current = x.clone();
    for _ in 0..n {
        current = map.apply(space, &current)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::Order;

    fn spec(samples: usize, seed: u64) -> AuditSpec {
        AuditSpec::new(Order::Finite(2.0), samples, seed, 1e-9)
    }

    fn line() -> SpaceModel {
        SpaceModel::euclidean(1).unwrap()
    }

    #[test]
    fn contraction_scales_toward_anchor() {
        let space = line();
        let anchor = space.euclidean_point(vec![0.0]).unwrap();
        let map = LipschitzMap::contraction(anchor, 0.5).unwrap();
        let x = space.euclidean_point(vec![1.0]).unwrap();
        let y = map.apply(&space, &x).unwrap();
        assert_eq!(y.payload(), &Payload::Euclidean(vec![0.5]));
    }

    #[test]
    fn ball_projection_clamps() {
        let space = line();
        let center = space.euclidean_point(vec![0.0]).unwrap();
        let map = LipschitzMap::ball_projection(center, 1.0).unwrap();
        let x = space.euclidean_point(vec![3.0]).unwrap();
        let y = map.apply(&space, &x).unwrap();
        assert_eq!(y.payload(), &Payload::Euclidean(vec![1.0]));
        // Idempotent: projecting the projection is a no-op.
        let z = map.apply(&space, &y).unwrap();
        assert!(space.distance(&y, &z).unwrap() <= 1e-12);
    }

    #[test]
    fn tree_contraction_walks_the_edge() {
        let space = SpaceModel::metric_tree(
            vec!["c".into(), "a".into(), "b".into(), "e".into()],
            vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
        )
        .unwrap();
        let c = space.node_point(0).unwrap();
        let a = space.node_point(1).unwrap();
        let map = LipschitzMap::contraction(c.clone(), 0.5).unwrap();
        let y = map.apply(&space, &a).unwrap();
        assert!((space.distance(&c, &y).unwrap() - 0.5).abs() <= 1e-12);
        // Orbit offsets 1, 0.5, 0.25 from the centre.
        let orbit = iterate(&space, &map, &a, 2).unwrap();
        let dists: Vec<f64> = orbit
            .iter()
            .map(|p| space.distance(&c, p).unwrap())
            .collect();
        assert!((dists[0] - 1.0).abs() <= 1e-12);
        assert!((dists[1] - 0.5).abs() <= 1e-12);
        assert!((dists[2] - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn lipschitz_estimates_are_tight() {
        let plane = SpaceModel::euclidean(2).unwrap();
        let anchor = plane.euclidean_point(vec![0.0, 0.0]).unwrap();
        let c = LipschitzMap::contraction(anchor.clone(), 0.5).unwrap();
        let k = estimate_lipschitz(&plane, &c, &spec(10_000, 1)).unwrap();
        assert!((k - 0.5).abs() <= 1e-12, "k {k}");

        let rot = LipschitzMap::isometry(Isometry::EuclideanRotation {
            center: vec![0.0, 0.0],
            axis_i: 0,
            axis_j: 1,
            angle: 1.1,
        });
        let k = estimate_lipschitz(&plane, &rot, &spec(10_000, 2)).unwrap();
        assert!((k - 1.0).abs() <= 1e-12, "k {k}");

        let disk = SpaceModel::poincare_disk();
        let anchor = disk.disk_point(0.0, 0.0).unwrap();
        let c = LipschitzMap::contraction(anchor, 0.7).unwrap();
        let k = estimate_lipschitz(&disk, &c, &spec(10_000, 3)).unwrap();
        assert!(k <= 0.7 + 1e-7, "k {k}");
    }

    #[test]
    fn composition_declared_constant_is_product() {
        let plane = SpaceModel::euclidean(2).unwrap();
        let anchor = plane.euclidean_point(vec![0.25, -0.5]).unwrap();
        let c = LipschitzMap::contraction(anchor, 0.6).unwrap();
        let cc = LipschitzMap::compose(c.clone(), c);
        assert!((cc.declared_k() - 0.36).abs() <= 1e-15);
        let k = estimate_lipschitz(&plane, &cc, &spec(10_000, 4)).unwrap();
        assert!(k <= cc.declared_k() + 1e-9, "k {k}");
    }

    #[test]
    fn banach_solves_affine_fixed_point() {
        let space = line();
        // S x = 0.5 x + 2 has fixed point 4.
        let s = LipschitzMap::affine(&space, 0.5, &[2.0]).unwrap();
        let x0 = space.euclidean_point(vec![0.0]).unwrap();
        let out = banach_fixed_point(&space, &s, &x0, 1e-12, 200).unwrap();
        assert!(out.converged);
        let four = space.euclidean_point(vec![4.0]).unwrap();
        assert!(space.distance(&out.point, &four).unwrap() <= 1e-10);
        // Map-invariance within the documented bound.
        let moved = s.apply(&space, &out.point).unwrap();
        assert!(space.distance(&out.point, &moved).unwrap() <= 10.0 * 1e-12);
    }

    #[test]
    fn banach_identity_converges_immediately() {
        let space = line();
        let x0 = space.euclidean_point(vec![0.7]).unwrap();
        let out =
            banach_fixed_point(&space, &LipschitzMap::identity(), &x0, 1e-10, 10).unwrap();
        assert!(out.converged && out.iterations == 1 && out.final_step == 0.0);
        assert_eq!(out.point, x0);
    }

    #[test]
    fn banach_geometric_decay_iteration_count() {
        let space = line();
        let anchor = space.euclidean_point(vec![0.0]).unwrap();
        let map = LipschitzMap::contraction(anchor.clone(), 0.5).unwrap();
        let x0 = space.euclidean_point(vec![1.0]).unwrap();
        let out = banach_fixed_point(&space, &map, &x0, 1e-10, 100).unwrap();
        assert!(out.converged && out.iterations <= 40, "iters {}", out.iterations);
        assert!(space.distance(&out.point, &anchor).unwrap() <= 1e-9);
    }

    #[test]
    fn iterate_geometric_sequence() {
        let space = line();
        let anchor = space.euclidean_point(vec![0.0]).unwrap();
        let map = LipschitzMap::contraction(anchor, 0.5).unwrap();
        let x = space.euclidean_point(vec![1.0]).unwrap();
        let orbit = iterate(&space, &map, &x, 3).unwrap();
        let expect = [1.0, 0.5, 0.25, 0.125];
        assert_eq!(orbit.len(), 4);
        for (p, e) in orbit.iter().zip(expect) {
            assert_eq!(p.payload(), &Payload::Euclidean(vec![e]));
        }
        let idle = iterate(&space, &LipschitzMap::identity(), &x, 5).unwrap();
        assert_eq!(idle.len(), 6);
        assert!(idle.iter().all(|p| *p == x));
    }

    #[test]
    fn tree_automorphism_validates_and_maps() {
        let space = SpaceModel::metric_tree(
            vec!["c".into(), "a".into(), "b".into(), "e".into()],
            vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
        )
        .unwrap();
        // Rotate the three leaves.
        let rot = LipschitzMap::isometry(Isometry::TreeAutomorphism {
            perm: vec![0, 2, 3, 1],
        });
        rot.validate(&space).unwrap();
        let k = estimate_lipschitz(&space, &rot, &spec(5_000, 5)).unwrap();
        assert!((k - 1.0).abs() <= 1e-12, "k {k}");
        assert_eq!(
            rot.fixed_point(&space).unwrap(),
            space.node_point(0).unwrap()
        );

        // A permutation that breaks an edge is rejected.
        let broken = LipschitzMap::isometry(Isometry::TreeAutomorphism {
            perm: vec![1, 0, 2, 3],
        });
        assert!(broken.validate(&space).is_err());
    }

    #[test]
    fn factor_above_one_is_euclidean_only() {
        let space = line();
        let anchor = space.euclidean_point(vec![0.0]).unwrap();
        let map = LipschitzMap::contraction(anchor, 2.0).unwrap();
        let x = space.euclidean_point(vec![1.5]).unwrap();
        let y = map.apply(&space, &x).unwrap();
        assert_eq!(y.payload(), &Payload::Euclidean(vec![3.0]));

        let disk = SpaceModel::poincare_disk();
        let anchor = disk.disk_point(0.0, 0.0).unwrap();
        let map = LipschitzMap::contraction(anchor, 2.0).unwrap();
        let x = disk.disk_point(0.3, 0.0).unwrap();
        assert!(matches!(
            map.apply(&disk, &x),
            Err(Error::UnsupportedMap(_))
        ));
    }

    #[test]
    fn mislabelled_declared_k_is_caught() {
        let plane = SpaceModel::euclidean(2).unwrap();
        let anchor = plane.euclidean_point(vec![0.0, 0.0]).unwrap();
        let lying = LipschitzMap::contraction(anchor, 0.9)
            .unwrap()
            .with_declared_k(0.1);
        let k = estimate_lipschitz(&plane, &lying, &spec(1_000, 6)).unwrap();
        assert!(k > lying.declared_k() + 1e-9);
    }

    #[test]
    fn disk_rotation_is_an_isometry_with_fixed_center() {
        let disk = SpaceModel::poincare_disk();
        let rot = LipschitzMap::isometry(Isometry::DiskRotation {
            center: (0.3, -0.2),
            angle: 0.9,
        });
        let k = estimate_lipschitz(&disk, &rot, &spec(5_000, 8)).unwrap();
        assert!((k - 1.0).abs() <= 1e-9, "k {k}");
        let fp = rot.fixed_point(&disk).unwrap();
        let moved = rot.apply(&disk, &fp).unwrap();
        assert!(disk.distance(&fp, &moved).unwrap() <= 1e-12);
    }

    #[test]
    fn lipschitz_estimate_inconclusive_on_degenerate_space() {
        let space = SpaceModel::metric_tree(vec!["only".into()], vec![]).unwrap();
        let out = estimate_lipschitz(&space, &LipschitzMap::identity(), &spec(100, 0));
        assert!(matches!(out, Err(Error::Inconclusive(_))));
    }

    #[test]
    fn banach_reports_exhaustion_without_failing() {
        let space = line();
        let anchor = space.euclidean_point(vec![0.0]).unwrap();
        let slow = LipschitzMap::contraction(anchor, 0.9999).unwrap();
        let x0 = space.euclidean_point(vec![1.0]).unwrap();
        let out = banach_fixed_point(&space, &slow, &x0, 1e-12, 3).unwrap();
        assert!(!out.converged && out.iterations == 3 && out.final_step > 1e-12);
    }

    #[test]
    fn mismatched_space_is_rejected() {
        let a = line();
        let b = line();
        let anchor = a.euclidean_point(vec![0.0]).unwrap();
        let map = LipschitzMap::contraction(anchor, 0.5).unwrap();
        let foreign = b.euclidean_point(vec![1.0]).unwrap();
        assert!(matches!(
            map.apply(&a, &foreign),
            Err(Error::SpaceMismatch)
        ));
    }
}
