//! Run configuration: one JSON document mirroring the CLI surface.
//! Command-line flags override config-file values; the resolved config is
//! hashed into every report for reproducibility.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cat0lab_core::Order;

use crate::dto::{MapDto, PointDto};

/// `p` as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderDto {
    Num(f64),
    Name(String),
}

impl OrderDto {
    pub fn to_order(&self) -> Result<Order, String> {
        let order = match self {
            OrderDto::Num(p) => Order::Finite(*p),
            OrderDto::Name(s) if s == "inf" || s == "infinity" => Order::Infinity,
            OrderDto::Name(s) => return Err(format!("bad order {s:?}; use a number or \"inf\"")),
        };
        order.validate().map_err(|e| e.to_string())?;
        Ok(order)
    }

    pub fn from_order(o: Order) -> Self {
        match o {
            Order::Finite(p) => OrderDto::Num(p),
            Order::Infinity => OrderDto::Name("inf".into()),
        }
    }
}

/// One blend weight or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlendDto {
    One(f64),
    Many(Vec<f64>),
}

impl BlendDto {
    pub fn values(&self) -> Vec<f64> {
        match self {
            BlendDto::One(t) => vec![*t],
            BlendDto::Many(ts) => ts.clone(),
        }
    }

    pub fn single(&self) -> Result<f64, String> {
        match self {
            BlendDto::One(t) => Ok(*t),
            BlendDto::Many(ts) if ts.len() == 1 => Ok(ts[0]),
            BlendDto::Many(_) => Err("this command takes a single t".into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<OrderDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_min: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impl_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<BlendDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_declared: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kt_declared: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_map: Option<MapDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_map: Option<MapDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<PointDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<PointDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_nonexpansive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read config {path:?}: {e}"))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {path:?}: {e}"))
    }

    /// Overlays `flags` (CLI values) onto `self` (config file values).
    pub fn merged_with(mut self, flags: RunConfig) -> RunConfig {
        macro_rules! overlay {
            ($($field:ident),* $(,)?) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        overlay!(
            command, space, checks, p, samples, tuples, seed, tol, strict, use_min, impl_kind,
            epsilon, radius, t, ks, kt, ks_declared, kt_declared, s_map, t_map, x0, x1, steps,
            stop_tol, n, m, n_max, max_iter, theta, allow_nonexpansive, out,
        );
        self
    }

    /// Seed resolution: flag/config, then `CAT0LAB_SEED`, then 0.
    pub fn resolve_seed(&self) -> Result<u64, String> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match std::env::var("CAT0LAB_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| format!("CAT0LAB_SEED={v:?} is not a valid seed")),
            Err(_) => Ok(0),
        }
    }

    /// SHA-256 of the resolved config document.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
