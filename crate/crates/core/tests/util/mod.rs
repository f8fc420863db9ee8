//! Shared test oracles, independent of the library's geometry paths.

use cat0lab_core::{MetricTree, TreePos};

/// Brute-force shortest path on the tree's underlying weighted graph with
/// the two query points spliced in as extra vertices (subdividing their
/// edges). Dijkstra with a linear scan; fine at test scale.
pub fn tree_oracle_distance(tree: &MetricTree, x: &TreePos, y: &TreePos) -> f64 {
    let n = tree.node_count();
    // Vertices 0..n are tree nodes; n and n+1 host edge-interior queries.
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + 2];
    let add = |adj: &mut Vec<Vec<(usize, f64)>>, a: usize, b: usize, w: f64| {
        adj[a].push((b, w));
        adj[b].push((a, w));
    };

    let mut splits: Vec<(usize, f64, usize)> = Vec::new(); // (edge, offset, vertex)
    let vertex_of = |pos: &TreePos, slot: usize, splits: &mut Vec<(usize, f64, usize)>| match *pos {
        TreePos::Node(i) => i,
        TreePos::Edge { edge, offset } => {
            let v = n + slot;
            splits.push((edge, offset, v));
            v
        }
    };
    let vx = vertex_of(x, 0, &mut splits);
    let vy = vertex_of(y, 1, &mut splits);

    for (i, e) in tree.edges().iter().enumerate() {
        let mut cuts: Vec<(f64, usize)> = splits
            .iter()
            .filter(|(edge, _, _)| *edge == i)
            .map(|&(_, off, v)| (off, v))
            .collect();
        cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut prev = (0.0, e.a);
        for (off, v) in cuts {
            add(&mut adj, prev.1, v, off - prev.0);
            prev = (off, v);
        }
        add(&mut adj, prev.1, e.b, e.len - prev.0);
    }

    let total = n + 2;
    let mut dist = vec![f64::INFINITY; total];
    let mut done = vec![false; total];
    dist[vx] = 0.0;
    for _ in 0..total {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..total {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for &(w, len) in &adj[u] {
            if dist[u] + len < dist[w] {
                dist[w] = dist[u] + len;
            }
        }
    }
    dist[vy]
}
