//! Built-in named spaces and the `--space` descriptor syntax:
//! `euclidean:N`, `disk`, `tree:star3`, `tree:path4`, or `tree:<file.json>`.

use std::fs;
use std::path::Path;

use cat0lab_core::SpaceModel;

use crate::dto::TreeDoc;

#[derive(Debug, Clone)]
pub struct SpaceHandle {
    /// Canonical descriptor; embedded in reports and witness points.
    pub name: String,
    pub model: SpaceModel,
}

fn star3() -> SpaceModel {
    SpaceModel::metric_tree(
        vec!["c".into(), "a".into(), "b".into(), "e".into()],
        vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
    )
    .expect("builtin star3 is well-formed")
}

/// Path on four nodes (three unit edges).
fn path4() -> SpaceModel {
    SpaceModel::metric_tree(
        vec!["n0".into(), "n1".into(), "n2".into(), "n3".into()],
        vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
    )
    .expect("builtin path4 is well-formed")
}

pub fn parse_space(desc: &str) -> Result<SpaceHandle, String> {
    let name = desc.to_string();
    if desc == "disk" {
        return Ok(SpaceHandle {
            name,
            model: SpaceModel::poincare_disk(),
        });
    }
    if let Some(dim) = desc.strip_prefix("euclidean:") {
        let dim: usize = dim
            .parse()
            .map_err(|_| format!("bad euclidean dimension in {desc:?}"))?;
        return Ok(SpaceHandle {
            name,
            model: SpaceModel::euclidean(dim).map_err(|e| e.to_string())?,
        });
    }
    if let Some(which) = desc.strip_prefix("tree:") {
        let model = match which {
            "star3" => star3(),
            "path4" => path4(),
            path => {
                let text = fs::read_to_string(Path::new(path))
                    .map_err(|e| format!("cannot read tree file {path:?}: {e}"))?;
                let doc: TreeDoc = serde_json::from_str(&text)
                    .map_err(|e| format!("bad tree document {path:?}: {e}"))?;
                doc.build()?
            }
        };
        return Ok(SpaceHandle { name, model });
    }
    Err(format!(
        "unknown space {desc:?}; expected euclidean:N, disk, tree:star3, tree:path4 or tree:<file>"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_spaces_parse() {
        assert!(parse_space("euclidean:2").is_ok());
        assert!(parse_space("euclidean:5").is_ok());
        assert!(parse_space("disk").is_ok());
        assert!(parse_space("tree:star3").is_ok());
        assert!(parse_space("tree:path4").is_ok());
        assert!(parse_space("euclidean:0").is_err());
        assert!(parse_space("bogus").is_err());
        assert!(parse_space("tree:/no/such/file.json").is_err());
    }

    #[test]
    fn tree_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.json");
        std::fs::write(
            &path,
            r#"{"nodes": [0, 1, 2], "edges": [
                {"a": 0, "b": 1, "len": 1.5},
                {"a": 1, "b": 2, "len": 0.5}
            ]}"#,
        )
        .unwrap();
        let handle = parse_space(&format!("tree:{}", path.display())).unwrap();
        let tree = handle.model.tree().unwrap();
        assert_eq!(tree.node_count(), 3);
        assert_eq!(tree.total_len(), 2.0);
    }
}
