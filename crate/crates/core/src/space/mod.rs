//! Concrete CAT(0) model spaces: Euclidean space, the Poincaré disk, and
//! metric trees. One `SpaceModel` value owns the distance, geodesic
//! interpolation and sampling semantics for its points.

pub mod disk;
pub mod tree;

use alloc::string::String;
use alloc::vec::Vec;

use core::sync::atomic::{AtomicU32, Ordering};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use disk::Cpx;
pub use tree::{MetricTree, TreeEdge, TreePos};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::float::FloatExt;

static NEXT_SPACE_ID: AtomicU32 = AtomicU32::new(1);

/// Identity of a space instance; points carry it and are only combinable
/// with points of the same instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceId(u32);

impl SpaceId {
    fn fresh() -> Self {
        SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Euclidean(Vec<f64>),
    Disk(Cpx),
    Tree(TreePos),
}

/// A location in a model space, tagged by its owning space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    space: SpaceId,
    payload: Payload,
}

impl Point {
    pub fn space_id(&self) -> SpaceId {
        self.space
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    Euclidean { dim: usize },
    PoincareDisk,
    MetricTree(MetricTree),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceModel {
    id: SpaceId,
    kind: SpaceKind,
}

/// Radius of the sub-disk used when sampling the Poincaré disk; keeps
/// `atanh` well-conditioned during audits.
pub const DISK_SAMPLE_RADIUS: f64 = 0.9;

/// Half-width of the box used when sampling Euclidean coordinates.
pub const EUCLIDEAN_SAMPLE_HALF_WIDTH: f64 = 1.0;

impl SpaceModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("euclidean dimension must be >= 1".into()));
        }
        Ok(SpaceModel {
            id: SpaceId::fresh(),
            kind: SpaceKind::Euclidean { dim },
        })
    }

    pub fn poincare_disk() -> Self {
        SpaceModel {
            id: SpaceId::fresh(),
            kind: SpaceKind::PoincareDisk,
        }
    }

    pub fn metric_tree(nodes: Vec<String>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        Ok(SpaceModel {
            id: SpaceId::fresh(),
            kind: SpaceKind::MetricTree(MetricTree::new(nodes, edges)?),
        })
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn tree(&self) -> Option<&MetricTree> {
        match &self.kind {
            SpaceKind::MetricTree(t) => Some(t),
            _ => None,
        }
    }

    /// Violation tolerance appropriate for the space's conditioning.
    pub fn default_tol(&self) -> f64 {
        match self.kind {
            SpaceKind::PoincareDisk => 1e-7,
            _ => 1e-9,
        }
    }

    // ---- point constructors -------------------------------------------------

    pub fn euclidean_point(&self, coords: Vec<f64>) -> Result<Point> {
        match &self.kind {
            SpaceKind::Euclidean { dim } => {
                if coords.len() != *dim {
                    return Err(Error::InvalidPoint(alloc::format!(
                        "expected {dim} coordinates, got {}",
                        coords.len()
                    )));
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidPoint("non-finite coordinate".into()));
                }
                Ok(Point {
                    space: self.id,
                    payload: Payload::Euclidean(coords),
                })
            }
            _ => Err(Error::InvalidPoint("not a euclidean space".into())),
        }
    }

    pub fn disk_point(&self, re: f64, im: f64) -> Result<Point> {
        match self.kind {
            SpaceKind::PoincareDisk => {
                let z = Cpx::new(re, im);
                if !re.is_finite() || !im.is_finite() || z.abs() >= 1.0 - disk::BOUNDARY_MARGIN {
                    return Err(Error::InvalidPoint(alloc::format!(
                        "disk point norm {} not strictly inside the unit disk",
                        z.abs()
                    )));
                }
                Ok(Point {
                    space: self.id,
                    payload: Payload::Disk(z),
                })
            }
            _ => Err(Error::InvalidPoint("not a Poincaré disk".into())),
        }
    }

    pub fn node_point(&self, node: usize) -> Result<Point> {
        let t = self
            .tree()
            .ok_or_else(|| Error::InvalidPoint("not a metric tree".into()))?;
        let pos = t.canonical(TreePos::Node(node))?;
        Ok(Point {
            space: self.id,
            payload: Payload::Tree(pos),
        })
    }

    /// Point on an edge; boundary offsets collapse to the endpoint nodes.
    pub fn edge_point(&self, edge: usize, offset: f64) -> Result<Point> {
        let t = self
            .tree()
            .ok_or_else(|| Error::InvalidPoint("not a metric tree".into()))?;
        let pos = t.canonical(TreePos::Edge { edge, offset })?;
        Ok(Point {
            space: self.id,
            payload: Payload::Tree(pos),
        })
    }

    /// Tags a raw payload with this space's identity without validating it.
    /// Interchange layers deserialize through this and then consult
    /// [`SpaceModel::validate_point`]; operations reject invalid payloads.
    pub fn point_from_payload(&self, payload: Payload) -> Point {
        Point {
            space: self.id,
            payload,
        }
    }

    fn wrap_tree(&self, pos: TreePos) -> Point {
        Point {
            space: self.id,
            payload: Payload::Tree(pos),
        }
    }

    fn wrap_disk(&self, z: Cpx) -> Result<Point> {
        if z.abs() >= 1.0 - disk::BOUNDARY_MARGIN {
            return Err(Error::InvalidPoint(
                "operation produced a point at the disk boundary".into(),
            ));
        }
        Ok(Point {
            space: self.id,
            payload: Payload::Disk(z),
        })
    }

    // ---- validation ---------------------------------------------------------

    /// True iff the payload satisfies the space invariants. Mis-tagged or
    /// malformed points return false rather than an error.
    pub fn validate_point(&self, p: &Point) -> bool {
        if p.space != self.id {
            return false;
        }
        match (&self.kind, &p.payload) {
            (SpaceKind::Euclidean { dim }, Payload::Euclidean(c)) => {
                c.len() == *dim && c.iter().all(|x| x.is_finite())
            }
            (SpaceKind::PoincareDisk, Payload::Disk(z)) => {
                z.re.is_finite() && z.im.is_finite() && z.abs() < 1.0 - disk::BOUNDARY_MARGIN
            }
            (SpaceKind::MetricTree(t), Payload::Tree(pos)) => t.is_valid(pos),
            _ => false,
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.space != self.id {
            return Err(Error::SpaceMismatch);
        }
        if !self.validate_point(p) {
            return Err(Error::InvalidPoint("payload fails space invariants".into()));
        }
        Ok(())
    }

    // ---- metric and geodesics -----------------------------------------------

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(match (&self.kind, &x.payload, &y.payload) {
            (SpaceKind::Euclidean { .. }, Payload::Euclidean(a), Payload::Euclidean(b)) => a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt(),
            (SpaceKind::PoincareDisk, Payload::Disk(a), Payload::Disk(b)) => disk::distance(*a, *b),
            (SpaceKind::MetricTree(t), Payload::Tree(a), Payload::Tree(b)) => t.distance(a, b),
            _ => unreachable!("check_point guarantees matching payloads"),
        })
    }

    /// Geodesic blend `t x ⊕ (1-t) y`: the unique point at distance
    /// `(1-t)·d(x,y)` from `x` and `t·d(x,y)` from `y`.
    pub fn combine(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(alloc::format!(
                "blend weight {t} outside [0, 1]"
            )));
        }
        if t == 1.0 {
            return Ok(x.clone());
        }
        if t == 0.0 {
            return Ok(y.clone());
        }
        match (&self.kind, &x.payload, &y.payload) {
            (SpaceKind::Euclidean { .. }, Payload::Euclidean(a), Payload::Euclidean(b)) => {
                let coords = a
                    .iter()
                    .zip(b)
                    .map(|(p, q)| t * p + (1.0 - t) * q)
                    .collect();
                Ok(Point {
                    space: self.id,
                    payload: Payload::Euclidean(coords),
                })
            }
            (SpaceKind::PoincareDisk, Payload::Disk(a), Payload::Disk(b)) => {
                self.wrap_disk(disk::combine(*a, *b, t))
            }
            (SpaceKind::MetricTree(tr), Payload::Tree(a), Payload::Tree(b)) => {
                let target = (1.0 - t) * tr.distance(a, b);
                Ok(self.wrap_tree(tr.walk(a, b, target)?))
            }
            _ => unreachable!(),
        }
    }

    pub fn midpoint(&self, x: &Point, y: &Point) -> Result<Point> {
        self.combine(x, y, 0.5)
    }

    /// Point at distance `dist` from `from` on the geodesic ray through
    /// `via`, extended beyond `via` where the space allows. Tree rays follow
    /// the deepest branch and may stop early at a leaf.
    pub fn extend(&self, from: &Point, via: &Point, dist: f64) -> Result<Point> {
        self.check_point(from)?;
        self.check_point(via)?;
        if !(dist >= 0.0) || !dist.is_finite() {
            return Err(Error::InvalidParameter("extension distance must be >= 0".into()));
        }
        match (&self.kind, &from.payload, &via.payload) {
            (SpaceKind::Euclidean { .. }, Payload::Euclidean(a), Payload::Euclidean(b)) => {
                let norm = a
                    .iter()
                    .zip(b)
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
                    .sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidParameter(
                        "geodesic direction undefined for coincident points".into(),
                    ));
                }
                let coords = a
                    .iter()
                    .zip(b)
                    .map(|(p, q)| p + (q - p) / norm * dist)
                    .collect();
                Ok(Point {
                    space: self.id,
                    payload: Payload::Euclidean(coords),
                })
            }
            (SpaceKind::PoincareDisk, Payload::Disk(a), Payload::Disk(b)) => {
                let z = disk::extend(*a, *b, dist).ok_or_else(|| {
                    Error::InvalidParameter(
                        "geodesic direction undefined for coincident points".into(),
                    )
                })?;
                self.wrap_disk(z)
            }
            (SpaceKind::MetricTree(t), Payload::Tree(a), Payload::Tree(b)) => {
                Ok(self.wrap_tree(t.extend(a, b, dist)?))
            }
            _ => unreachable!(),
        }
    }

    // ---- sampling -------------------------------------------------------------

    /// Draws a point from the space's documented sampling distribution:
    /// uniform in the box `[-1, 1]^n` (Euclidean), uniform by area in the
    /// radius-0.9 sub-disk (Poincaré), uniform over edges by length (tree).
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        match &self.kind {
            SpaceKind::Euclidean { dim } => {
                let coords = (0..*dim)
                    .map(|_| {
                        rng.gen::<f64>() * 2.0 * EUCLIDEAN_SAMPLE_HALF_WIDTH
                            - EUCLIDEAN_SAMPLE_HALF_WIDTH
                    })
                    .collect();
                Point {
                    space: self.id,
                    payload: Payload::Euclidean(coords),
                }
            }
            SpaceKind::PoincareDisk => {
                let r = DISK_SAMPLE_RADIUS * rng.gen::<f64>().sqrt();
                let phi = rng.gen::<f64>() * 2.0 * core::f64::consts::PI;
                Point {
                    space: self.id,
                    payload: Payload::Disk(Cpx::new(r * phi.cos(), r * phi.sin())),
                }
            }
            SpaceKind::MetricTree(t) => {
                if t.edges().is_empty() {
                    return self.wrap_tree(TreePos::Node(0));
                }
                let mut pick = rng.gen::<f64>() * t.total_len();
                for (i, e) in t.edges().iter().enumerate() {
                    if pick <= e.len || i + 1 == t.edges().len() {
                        let pos = t
                            .canonical(TreePos::Edge {
                                edge: i,
                                offset: pick.clamp(0.0, e.len),
                            })
                            .expect("sampled offset is in range");
                        return self.wrap_tree(pos);
                    }
                    pick -= e.len;
                }
                unreachable!()
            }
        }
    }

    /// A fixed reference point: the origin, disk centre, or node 0.
    pub fn base_point(&self) -> Point {
        match &self.kind {
            SpaceKind::Euclidean { dim } => Point {
                space: self.id,
                payload: Payload::Euclidean(alloc::vec![0.0; *dim]),
            },
            SpaceKind::PoincareDisk => Point {
                space: self.id,
                payload: Payload::Disk(Cpx::ZERO),
            },
            SpaceKind::MetricTree(_) => self.wrap_tree(TreePos::Node(0)),
        }
    }

    /// Small random displacement of `p`: a step toward a freshly sampled
    /// point, with step fraction `scale`. Works uniformly in all models.
    pub fn perturb(&self, p: &Point, scale: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        let target = self.sample(rng);
        let s = scale.clamp(0.0, 1.0) * rng.gen::<f64>();
        self.combine(p, &target, 1.0 - s)
    }
}
