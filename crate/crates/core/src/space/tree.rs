//! Metric trees (R-trees over finite weighted graphs).
//!
//! A connected acyclic graph with positive edge lengths carries a unique
//! geodesic between any two points; geodesics follow the tree path. Points
//! live at nodes or strictly inside edges; edge endpoints canonicalize to
//! nodes so equality is exact.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Position inside a metric tree. `Edge` offsets are measured from the
/// edge's `a` endpoint and are strictly inside `(0, len)` in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub enum TreePos {
    Node(usize),
    Edge { edge: usize, offset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub len: f64,
}

/// An oriented traversal of one edge: from offset `from` to offset `to`
/// along the edge's stored orientation.
#[derive(Debug, Clone, Copy)]
struct Seg {
    edge: usize,
    from: f64,
    to: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    nodes: Vec<String>,
    edges: Vec<TreeEdge>,
    adj: Vec<Vec<(usize, usize)>>, // (neighbor node, edge id)
    node_dist: Vec<f64>,           // n*n row-major
    next_hop: Vec<usize>,          // n*n: neighbor of row-node on the path to column-node
    total_len: f64,
}

impl MetricTree {
    /// Builds a tree from labelled nodes and undirected weighted edges.
    /// Requires exactly `n - 1` edges, positive lengths and connectivity.
    pub fn new(nodes: Vec<String>, edge_list: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidSpace("tree needs at least one node".into()));
        }
        for (i, label) in nodes.iter().enumerate() {
            if nodes[..i].contains(label) {
                return Err(Error::InvalidSpace(alloc::format!(
                    "duplicate node label {label:?}"
                )));
            }
        }
        if edge_list.len() + 1 != n {
            return Err(Error::InvalidSpace(alloc::format!(
                "a tree on {n} nodes needs {} edges, got {}",
                n - 1,
                edge_list.len()
            )));
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adj = vec![Vec::new(); n];
        for (idx, &(a, b, len)) in edge_list.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidSpace("edge endpoint out of range".into()));
            }
            if a == b {
                return Err(Error::InvalidSpace("self-loop edge".into()));
            }
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::InvalidSpace("edge length must be positive".into()));
            }
            adj[a].push((b, idx));
            adj[b].push((a, idx));
            edges.push(TreeEdge { a, b, len });
        }

        // Connectivity; with n-1 edges this also rules out cycles.
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSpace("tree is not connected".into()));
        }

        // All-pairs node distances and next hops by one DFS per root.
        let mut node_dist = vec![0.0; n * n];
        let mut next_hop = vec![0usize; n * n];
        for root in 0..n {
            next_hop[root * n + root] = root;
            let mut todo = vec![(root, root, 0.0)]; // (node, came_from, dist to root)
            while let Some((v, from, d)) = todo.pop() {
                for &(w, e) in &adj[v] {
                    if w == from && v != root {
                        continue;
                    }
                    if w == root {
                        continue;
                    }
                    let dw = d + edges[e].len;
                    node_dist[w * n + root] = dw;
                    next_hop[w * n + root] = v;
                    todo.push((w, v, dw));
                }
            }
        }

        let total_len = edges.iter().map(|e| e.len).sum();
        Ok(MetricTree {
            nodes,
            edges,
            adj,
            node_dist,
            next_hop,
            total_len,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_label(&self, i: usize) -> Option<&str> {
        self.nodes.get(i).map(|s| s.as_str())
    }

    pub fn node_by_label(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn total_len(&self) -> f64 {
        self.total_len
    }

    pub fn node_distance(&self, i: usize, j: usize) -> f64 {
        self.node_dist[i * self.nodes.len() + j]
    }

    /// Collapses boundary offsets to node positions.
    pub fn canonical(&self, pos: TreePos) -> Result<TreePos> {
        match pos {
            TreePos::Node(i) => {
                if i >= self.nodes.len() {
                    return Err(Error::InvalidPoint("node index out of range".into()));
                }
                Ok(TreePos::Node(i))
            }
            TreePos::Edge { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or_else(|| Error::InvalidPoint("edge index out of range".into()))?;
                if !offset.is_finite() || offset < 0.0 || offset > e.len {
                    return Err(Error::InvalidPoint(alloc::format!(
                        "offset {offset} outside [0, {}]",
                        e.len
                    )));
                }
                if offset == 0.0 {
                    Ok(TreePos::Node(e.a))
                } else if offset == e.len {
                    Ok(TreePos::Node(e.b))
                } else {
                    Ok(TreePos::Edge { edge, offset })
                }
            }
        }
    }

    pub fn is_valid(&self, pos: &TreePos) -> bool {
        match *pos {
            TreePos::Node(i) => i < self.nodes.len(),
            TreePos::Edge { edge, offset } => self
                .edges
                .get(edge)
                .map(|e| offset.is_finite() && offset >= 0.0 && offset <= e.len)
                .unwrap_or(false),
        }
    }

    /// Anchor nodes of a position: the nodes a geodesic leaving the position
    /// can pass first, with the distance to each.
    fn anchors(&self, pos: &TreePos) -> Vec<(usize, f64)> {
        match *pos {
            TreePos::Node(i) => vec![(i, 0.0)],
            TreePos::Edge { edge, offset } => {
                let e = &self.edges[edge];
                vec![(e.a, offset), (e.b, e.len - offset)]
            }
        }
    }

    pub fn distance(&self, x: &TreePos, y: &TreePos) -> f64 {
        if let (TreePos::Edge { edge: ex, offset: ox }, TreePos::Edge { edge: ey, offset: oy }) =
            (x, y)
        {
            if ex == ey {
                return (ox - oy).abs();
            }
        }
        let mut best = f64::INFINITY;
        for &(nx, wx) in &self.anchors(x) {
            for &(ny, wy) in &self.anchors(y) {
                let d = wx + self.node_distance(nx, ny) + wy;
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Offset of `node` along edge `e` (0 at `a`, `len` at `b`).
    fn endpoint_offset(&self, e: usize, node: usize) -> f64 {
        if self.edges[e].a == node {
            0.0
        } else {
            self.edges[e].len
        }
    }

    fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u].iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    /// The geodesic from `x` to `y` as consecutive edge traversals.
    fn route(&self, x: &TreePos, y: &TreePos) -> Vec<Seg> {
        if let (TreePos::Edge { edge: ex, offset: ox }, TreePos::Edge { edge: ey, offset: oy }) =
            (x, y)
        {
            if ex == ey {
                return vec![Seg {
                    edge: *ex,
                    from: *ox,
                    to: *oy,
                }];
            }
        }
        // Pick the anchor pair realizing the distance; unique for canonical
        // positions except in degenerate ties, where either route is geodesic.
        let (mut bx, mut by, mut best) = ((0usize, 0.0), (0usize, 0.0), f64::INFINITY);
        for &(nx, wx) in &self.anchors(x) {
            for &(ny, wy) in &self.anchors(y) {
                let d = wx + self.node_distance(nx, ny) + wy;
                if d < best {
                    best = d;
                    bx = (nx, wx);
                    by = (ny, wy);
                }
            }
        }
        let mut segs = Vec::new();
        if let TreePos::Edge { edge, offset } = *x {
            segs.push(Seg {
                edge,
                from: offset,
                to: self.endpoint_offset(edge, bx.0),
            });
        }
        let mut v = bx.0;
        while v != by.0 {
            let w = self.next_hop[v * self.nodes.len() + by.0];
            let e = self.edge_between(v, w).expect("next_hop follows an edge");
            segs.push(Seg {
                edge: e,
                from: self.endpoint_offset(e, v),
                to: self.endpoint_offset(e, w),
            });
            v = w;
        }
        if let TreePos::Edge { edge, offset } = *y {
            segs.push(Seg {
                edge,
                from: self.endpoint_offset(edge, by.0),
                to: offset,
            });
        }
        segs
    }

    /// Point at distance `target` from `x` along the geodesic to `y`.
    /// `target` must not exceed `distance(x, y)`; overshoot lands on `y`.
    pub fn walk(&self, x: &TreePos, y: &TreePos, target: f64) -> Result<TreePos> {
        if target <= 0.0 {
            return Ok(x.clone());
        }
        let mut remaining = target;
        for seg in self.route(x, y) {
            let l = (seg.to - seg.from).abs();
            if l == 0.0 {
                continue;
            }
            if remaining <= l {
                let dir = if seg.to >= seg.from { 1.0 } else { -1.0 };
                let off = seg.from + dir * remaining;
                let len = self.edges[seg.edge].len;
                return self.canonical(TreePos::Edge {
                    edge: seg.edge,
                    offset: off.clamp(0.0, len),
                });
            }
            remaining -= l;
        }
        Ok(y.clone())
    }

    /// Longest distance reachable from `node` without using `banned_edge`.
    fn height(&self, node: usize, banned_edge: usize) -> f64 {
        let mut best = 0.0;
        for &(w, e) in &self.adj[node] {
            if e == banned_edge {
                continue;
            }
            let h = self.edges[e].len + self.height(w, e);
            if h > best {
                best = h;
            }
        }
        best
    }

    /// Extends the geodesic from `x` through `via` to total distance `dist`,
    /// continuing past `via` into the deepest available branch. Stops early
    /// at a leaf; callers check the achieved distance when exactness matters.
    pub fn extend(&self, x: &TreePos, via: &TreePos, dist: f64) -> Result<TreePos> {
        let d = self.distance(x, via);
        if d == 0.0 {
            return Err(Error::InvalidParameter(
                "geodesic direction undefined for coincident points".into(),
            ));
        }
        if dist <= d {
            return self.walk(x, via, dist);
        }
        let mut remaining = dist - d;
        // Resume from `via`, continuing in the arrival direction.
        let route = self.route(x, via);
        let last = *route.last().expect("distance > 0 yields a route");
        let (mut node, mut came_by) = match *via {
            TreePos::Edge { edge, offset } => {
                // Keep moving along the same edge, away from where we came.
                let e = &self.edges[edge];
                let (far_node, avail) = if last.to >= last.from {
                    (e.b, e.len - offset)
                } else {
                    (e.a, offset)
                };
                if remaining < avail {
                    let off = if last.to >= last.from {
                        offset + remaining
                    } else {
                        offset - remaining
                    };
                    return self.canonical(TreePos::Edge { edge, offset: off });
                }
                remaining -= avail;
                (far_node, edge)
            }
            TreePos::Node(n) => (n, last.edge),
        };
        loop {
            let mut choice: Option<(usize, usize, f64)> = None; // (neighbor, edge, score)
            for &(w, e) in &self.adj[node] {
                if e == came_by {
                    continue;
                }
                let score = self.edges[e].len + self.height(w, e);
                if choice.map(|(_, _, s)| score > s).unwrap_or(true) {
                    choice = Some((w, e, score));
                }
            }
            let Some((w, e, _)) = choice else {
                return Ok(TreePos::Node(node)); // leaf: ray ends here
            };
            let len = self.edges[e].len;
            if remaining < len {
                let off = if self.edges[e].a == node {
                    remaining
                } else {
                    len - remaining
                };
                return self.canonical(TreePos::Edge { edge: e, offset: off });
            }
            remaining -= len;
            node = w;
            came_by = e;
        }
    }
}
