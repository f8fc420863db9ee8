//! Geodesic metric-space laboratory for CAT(0) models.
//!
//! Three concrete CAT(0) spaces (Euclidean space, the Poincaré disk, metric
//! trees) share one interface for distances, geodesic blends and midpoints.
//! On top of them:
//!
//! - [`audit`] runs sampling verifiers for the convexity and curvature
//!   inequalities (p-convexity, Busemann, convex structure, the CAT(0)
//!   comparison inequality, uniform-convexity moduli);
//! - [`map`] provides a catalogue of Lipschitz self-maps with declared
//!   constants, empirical constant estimation and Banach fixed points;
//! - [`qt`] checks the contraction bounds of the two-map blend
//!   `Q_t(Sx, Ty) = t Sx ⊕ (1-t) Ty` and computes its blended fixed point;
//! - [`scheme`] executes the two-map iteration
//!   `x_{n+2} = t_n S_n x_{n+1} ⊕ (1-t_n) T_n x_n` with per-step
//!   certificates θ and ρ and the associated bound audits.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature instead of `std` for float math on bare targets. All randomness
//! flows through explicit seeds, so every audit is reproducible.

#![cfg_attr(not(feature = "std"), no_std)]
// Validation guards are written as `!(v > 0.0)` so NaN parameters fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod float;

pub mod audit;
pub mod error;
pub mod map;
pub mod qt;
pub mod report;
pub mod scheme;
pub mod space;

pub use audit::{AuditSpec, ImplicationKind, ModulusProbe, Order};
pub use error::{Error, Result};
pub use map::{FixedPointResult, Isometry, LipschitzMap, MapKind};
pub use qt::{BoundCheckRecord, DecayMode, DecayReport, QtConfig, ZtResult};
pub use report::{ViolationReport, Witness};
pub use scheme::{
    BlendInterval, IterationTrace, MapSchedule, MonotoneReport, ScheduleConfig, TSchedule,
};
pub use space::{MetricTree, Payload, Point, SpaceId, SpaceKind, SpaceModel, TreePos};
