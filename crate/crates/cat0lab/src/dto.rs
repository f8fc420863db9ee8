//! Serde representations of spaces, points and map descriptors, and their
//! conversions to core types.
//!
//! Point documents carry exactly one payload key:
//! `{"space": id, "euclidean": [..]}` | `{"disk": [re, im]}` |
//! `{"tree": {"edge": id, "offset": r}}` (or `{"tree": {"node": id}}`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use cat0lab_core::space::disk::Cpx;
use cat0lab_core::{Isometry, LipschitzMap, Payload, Point, SpaceKind, SpaceModel, TreePos};

use crate::spaces::SpaceHandle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euclidean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreePosDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreePosDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

/// Conventional edge identifier: the two node labels joined by `-`.
pub fn edge_id(space: &SpaceModel, edge: usize) -> String {
    let tree = space.tree().expect("edge ids only exist on trees");
    let e = &tree.edges()[edge];
    format!(
        "{}-{}",
        tree.node_label(e.a).unwrap_or("?"),
        tree.node_label(e.b).unwrap_or("?")
    )
}

fn find_edge(space: &SpaceModel, id: &str) -> Option<usize> {
    let tree = space.tree()?;
    (0..tree.edges().len()).find(|&i| edge_id(space, i) == id)
}

impl PointDto {
    pub fn from_point(handle: &SpaceHandle, p: &Point) -> Self {
        let mut dto = PointDto {
            space: Some(handle.name.clone()),
            euclidean: None,
            disk: None,
            tree: None,
        };
        match p.payload() {
            Payload::Euclidean(c) => dto.euclidean = Some(c.clone()),
            Payload::Disk(z) => dto.disk = Some([z.re, z.im]),
            Payload::Tree(TreePos::Node(i)) => {
                dto.tree = Some(TreePosDto {
                    node: handle
                        .model
                        .tree()
                        .and_then(|t| t.node_label(*i))
                        .map(str::to_owned),
                    edge: None,
                    offset: None,
                })
            }
            Payload::Tree(TreePos::Edge { edge, offset }) => {
                dto.tree = Some(TreePosDto {
                    node: None,
                    edge: Some(edge_id(&handle.model, *edge)),
                    offset: Some(*offset),
                })
            }
        }
        dto
    }

    pub fn to_point(&self, handle: &SpaceHandle) -> Result<Point, String> {
        if let Some(name) = &self.space {
            if name != &handle.name {
                return Err(format!(
                    "point is tagged for space {name:?} but the run uses {:?}",
                    handle.name
                ));
            }
        }
        let payloads =
            self.euclidean.is_some() as u8 + self.disk.is_some() as u8 + self.tree.is_some() as u8;
        if payloads != 1 {
            return Err("point must carry exactly one of euclidean/disk/tree".into());
        }
        let space = &handle.model;
        let point = if let Some(c) = &self.euclidean {
            space.point_from_payload(Payload::Euclidean(c.clone()))
        } else if let Some([re, im]) = self.disk {
            space.point_from_payload(Payload::Disk(Cpx::new(re, im)))
        } else {
            let tp = self.tree.as_ref().expect("checked above");
            let tree = space
                .tree()
                .ok_or_else(|| format!("tree payload in non-tree space {:?}", handle.name))?;
            let pos = match (&tp.node, &tp.edge, tp.offset) {
                (Some(label), None, None) => TreePos::Node(
                    tree.node_by_label(label)
                        .ok_or_else(|| format!("unknown node {label:?}"))?,
                ),
                (None, Some(id), Some(offset)) => TreePos::Edge {
                    edge: find_edge(space, id).ok_or_else(|| format!("unknown edge {id:?}"))?,
                    offset,
                },
                _ => return Err("tree payload needs either node, or edge and offset".into()),
            };
            space.point_from_payload(Payload::Tree(pos))
        };
        if !space.validate_point(&point) {
            return Err("point payload violates the space invariants".into());
        }
        Ok(point)
    }
}

/// Map descriptor:
/// `{"kind": "contraction", "anchor": <point>, "factor": 0.5}`,
/// `{"kind": "ball_projection", "center": <point>, "radius": 1.0}`,
/// `{"kind": "rotation", ...}`, `{"kind": "translation", "offset": [..]}`,
/// `{"kind": "tree_automorphism", "perm": {"a": "b", ...}}`,
/// `{"kind": "affine", "scale": s, "offset": [..]}`,
/// `{"kind": "compose", "outer": .., "inner": ..}`, `{"kind": "identity"}`.
/// An optional `declared_k` overrides the declared Lipschitz constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDto {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<PointDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<PointDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Box<MapDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<MapDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_k: Option<f64>,
}

impl MapDto {
    pub fn to_map(&self, handle: &SpaceHandle) -> Result<LipschitzMap, String> {
        let space = &handle.model;
        let map = match self.kind.as_str() {
            "identity" => LipschitzMap::identity(),
            "contraction" => {
                let anchor = self
                    .anchor
                    .as_ref()
                    .ok_or("contraction needs an anchor")?
                    .to_point(handle)?;
                let factor = self.factor.ok_or("contraction needs a factor")?;
                LipschitzMap::contraction(anchor, factor).map_err(|e| e.to_string())?
            }
            "ball_projection" => {
                let center = self
                    .center
                    .as_ref()
                    .ok_or("ball_projection needs a center")?
                    .to_point(handle)?;
                let radius = self.radius.ok_or("ball_projection needs a radius")?;
                LipschitzMap::ball_projection(center, radius).map_err(|e| e.to_string())?
            }
            "rotation" => {
                let angle = self.angle.ok_or("rotation needs an angle")?;
                match space.kind() {
                    SpaceKind::Euclidean { .. } => {
                        let center = self
                            .center
                            .as_ref()
                            .ok_or("rotation needs a center")?
                            .to_point(handle)?;
                        let Payload::Euclidean(coords) = center.payload() else {
                            return Err("rotation center must be euclidean".into());
                        };
                        let [i, j] = self.axes.unwrap_or([0, 1]);
                        LipschitzMap::isometry(Isometry::EuclideanRotation {
                            center: coords.clone(),
                            axis_i: i,
                            axis_j: j,
                            angle,
                        })
                    }
                    SpaceKind::PoincareDisk => {
                        let center = self
                            .center
                            .as_ref()
                            .ok_or("rotation needs a center")?
                            .to_point(handle)?;
                        let Payload::Disk(z) = center.payload() else {
                            return Err("rotation center must be a disk point".into());
                        };
                        LipschitzMap::isometry(Isometry::DiskRotation {
                            center: (z.re, z.im),
                            angle,
                        })
                    }
                    SpaceKind::MetricTree(_) => {
                        return Err("rotation is not defined on trees".into())
                    }
                }
            }
            "translation" => LipschitzMap::isometry(Isometry::Translation {
                offset: self.offset.clone().ok_or("translation needs an offset")?,
            }),
            "tree_automorphism" => {
                let tree = space.tree().ok_or("tree_automorphism needs a tree space")?;
                let names = self.perm.as_ref().ok_or("tree_automorphism needs a perm")?;
                let mut perm: Vec<usize> = (0..tree.node_count()).collect();
                for (from, to) in names {
                    let f = tree
                        .node_by_label(from)
                        .ok_or_else(|| format!("unknown node {from:?}"))?;
                    let t = tree
                        .node_by_label(to)
                        .ok_or_else(|| format!("unknown node {to:?}"))?;
                    perm[f] = t;
                }
                LipschitzMap::isometry(Isometry::TreeAutomorphism { perm })
            }
            "affine" => {
                let scale = self.scale.ok_or("affine needs a scale")?;
                let offset = self.offset.clone().ok_or("affine needs an offset")?;
                LipschitzMap::affine(space, scale, &offset).map_err(|e| e.to_string())?
            }
            "compose" => {
                let outer = self.outer.as_ref().ok_or("compose needs outer")?;
                let inner = self.inner.as_ref().ok_or("compose needs inner")?;
                LipschitzMap::compose(outer.to_map(handle)?, inner.to_map(handle)?)
            }
            other => return Err(format!("unknown map kind {other:?}")),
        };
        let map = match self.declared_k {
            Some(k) => map.with_declared_k(k),
            None => map,
        };
        map.validate(space).map_err(|e| e.to_string())?;
        Ok(map)
    }
}

/// Tree document: `{"nodes": [id...], "edges": [{"a": id, "b": id, "len": r}...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub nodes: Vec<serde_json::Value>,
    pub edges: Vec<TreeEdgeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeEdgeDoc {
    pub a: serde_json::Value,
    pub b: serde_json::Value,
    pub len: f64,
}

fn id_label(v: &serde_json::Value) -> Result<String, String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(format!("node id must be a string or number, got {other}")),
    }
}

impl TreeDoc {
    pub fn build(&self) -> Result<SpaceModel, String> {
        let nodes: Vec<String> = self
            .nodes
            .iter()
            .map(id_label)
            .collect::<Result<_, _>>()?;
        let index = |v: &serde_json::Value| -> Result<usize, String> {
            let label = id_label(v)?;
            nodes
                .iter()
                .position(|n| n == &label)
                .ok_or_else(|| format!("edge references unknown node {label:?}"))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((index(&e.a)?, index(&e.b)?, e.len)))
            .collect::<Result<Vec<_>, String>>()?;
        SpaceModel::metric_tree(nodes, edges).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_space;

    #[test]
    fn point_round_trip_all_models() {
        for name in ["euclidean:2", "disk", "tree:star3"] {
            let handle = parse_space(name).unwrap();
            let mut rng = {
                use rand::SeedableRng;
                rand_chacha::ChaCha8Rng::seed_from_u64(1)
            };
            for _ in 0..50 {
                let p = handle.model.sample(&mut rng);
                let dto = PointDto::from_point(&handle, &p);
                let back = dto.to_point(&handle).unwrap();
                assert_eq!(back, p, "{name}: {dto:?}");
            }
        }
    }

    #[test]
    fn point_payload_must_be_unique() {
        let handle = parse_space("euclidean:1").unwrap();
        let dto: PointDto =
            serde_json::from_str(r#"{"euclidean": [1.0], "disk": [0.0, 0.0]}"#).unwrap();
        assert!(dto.to_point(&handle).is_err());
    }

    #[test]
    fn point_space_tag_is_checked() {
        let handle = parse_space("euclidean:1").unwrap();
        let dto: PointDto =
            serde_json::from_str(r#"{"space": "disk", "euclidean": [1.0]}"#).unwrap();
        assert!(dto.to_point(&handle).is_err());
    }

    #[test]
    fn tree_doc_builds_and_rejects() {
        let doc: TreeDoc = serde_json::from_str(
            r#"{"nodes": ["c", "a", "b"], "edges": [
                {"a": "c", "b": "a", "len": 1.0},
                {"a": "c", "b": "b", "len": 2.0}
            ]}"#,
        )
        .unwrap();
        let space = doc.build().unwrap();
        let t = space.tree().unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.total_len(), 3.0);

        let bad: TreeDoc = serde_json::from_str(
            r#"{"nodes": ["c", "a"], "edges": [{"a": "c", "b": "zz", "len": 1.0}]}"#,
        )
        .unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn map_dto_contraction_and_overrides() {
        let handle = parse_space("euclidean:1").unwrap();
        let dto: MapDto = serde_json::from_str(
            r#"{"kind": "contraction", "anchor": {"euclidean": [0.0]}, "factor": 0.5}"#,
        )
        .unwrap();
        let map = dto.to_map(&handle).unwrap();
        assert_eq!(map.declared_k(), 0.5);

        let lying: MapDto = serde_json::from_str(
            r#"{"kind": "contraction", "anchor": {"euclidean": [0.0]}, "factor": 0.9,
                "declared_k": 0.1}"#,
        )
        .unwrap();
        assert_eq!(lying.to_map(&handle).unwrap().declared_k(), 0.1);

        let unknown: MapDto = serde_json::from_str(r#"{"kind": "banana"}"#).unwrap();
        assert!(unknown.to_map(&handle).is_err());
    }

    #[test]
    fn map_dto_affine_matches_closed_form() {
        let handle = parse_space("euclidean:1").unwrap();
        let dto: MapDto =
            serde_json::from_str(r#"{"kind": "affine", "scale": 0.5, "offset": [2.0]}"#).unwrap();
        let map = dto.to_map(&handle).unwrap();
        let x = handle.model.euclidean_point(vec![6.0]).unwrap();
        let y = map.apply(&handle.model, &x).unwrap();
        // 0.5 * 6 + 2 = 5.
        assert_eq!(y.payload(), &Payload::Euclidean(vec![5.0]));
    }
}
