//! Immutable undirected simple graphs in compressed adjacency (CSR) form.
//!
//! Nodes are dense integers `0..n`. Neighbour lists are sorted, which makes
//! every traversal deterministic. Self-loops are dropped at construction and
//! the dropped count is kept on the graph; parallel edges are merged.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) out of range for {n} nodes")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph. The adjacency matrix is symmetric, with sorted
/// per-node neighbour lists and no stored self-loops.
#[derive(Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    adj: Vec<u32>,
    edge_count: usize,
    dropped_self_loops: usize,
    // Prefix counts of "upper" neighbours (v > u), built lazily for
    // random access into the canonical edge order.
    upper_prefix: OnceLock<Vec<u64>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            offsets: self.offsets.clone(),
            adj: self.adj.clone(),
            edge_count: self.edge_count,
            dropped_self_loops: self.dropped_self_loops,
            upper_prefix: OnceLock::new(),
        }
    }
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Self-loop pairs `(u, u)`
    /// are dropped (the count is reported by [`Graph::dropped_self_loops`]),
    /// duplicate edges are merged, and out-of-range endpoints are rejected.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut canonical: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        let mut dropped = 0usize;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EdgeOutOfRange { u, v, n });
            }
            if u == v {
                dropped += 1;
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            canonical.push((a as u32, b as u32));
        }
        canonical.sort_unstable();
        canonical.dedup();
        let mut g = Graph::from_canonical_edges(n, &canonical);
        g.dropped_self_loops = dropped;
        Ok(g)
    }

    /// Builds directly from edges that are already canonical: `u < v`,
    /// strictly increasing lexicographic order, all endpoints `< n`.
    pub(crate) fn from_canonical_edges(n: usize, edges: &[(u32, u32)]) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut adj = vec![0u32; acc];
        // Scanning canonical order fills every row in sorted order: a row w
        // first receives partners u < w (increasing), then partners v > w.
        for &(u, v) in edges {
            adj[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            adj[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Graph {
            offsets,
            adj,
            edge_count: edges.len(),
            dropped_self_loops: 0,
            upper_prefix: OnceLock::new(),
        }
    }

    /// Wraps pre-validated CSR data: sorted rows, symmetric, no self-loops.
    pub(crate) fn from_csr_parts(offsets: Vec<usize>, adj: Vec<u32>, edge_count: usize) -> Graph {
        debug_assert_eq!(*offsets.last().unwrap(), adj.len());
        debug_assert_eq!(adj.len(), 2 * edge_count);
        Graph {
            offsets,
            adj,
            edge_count,
            dropped_self_loops: 0,
            upper_prefix: OnceLock::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Iterates canonical edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u as u32, v))
        })
    }

    fn upper_prefix(&self) -> &[u64] {
        self.upper_prefix.get_or_init(|| {
            let n = self.node_count();
            let mut prefix = Vec::with_capacity(n + 1);
            let mut acc = 0u64;
            prefix.push(0);
            for u in 0..n {
                let row = self.neighbors(u);
                let split = row.partition_point(|&v| (v as usize) <= u);
                acc += (row.len() - split) as u64;
                prefix.push(acc);
            }
            prefix
        })
    }

    /// Random access into the canonical edge order: `idx` in `0..edge_count`.
    pub(crate) fn canonical_edge(&self, idx: u64) -> (u32, u32) {
        let prefix = self.upper_prefix();
        let u = prefix.partition_point(|&p| p <= idx) - 1;
        let row = self.neighbors(u);
        let split = row.partition_point(|&v| (v as usize) <= u);
        let v = row[split + (idx - prefix[u]) as usize];
        (u as u32, v)
    }

    /// Labels every node with its connected component.
    pub fn components(&self) -> ComponentLabeling {
        let n = self.node_count();
        let mut labels = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = Vec::new();
        for start in 0..n {
            if labels[start] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            let mut size = 0usize;
            labels[start] = id;
            queue.push(start as u32);
            while let Some(u) = queue.pop() {
                size += 1;
                for &v in self.neighbors(u as usize) {
                    if labels[v as usize] == u32::MAX {
                        labels[v as usize] = id;
                        queue.push(v);
                    }
                }
            }
            sizes.push(size);
        }
        ComponentLabeling { labels, sizes }
    }

    /// Size and members of the largest component. Ties go to the component
    /// containing the smallest node id (the discovery order of
    /// [`Graph::components`]).
    pub fn largest_component(&self) -> (usize, Vec<usize>) {
        let labeling = self.components();
        let mut best = 0usize;
        for (id, &size) in labeling.sizes.iter().enumerate() {
            if size > labeling.sizes[best] {
                best = id;
            }
        }
        let members: Vec<usize> = labeling
            .labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == best as u32)
            .map(|(u, _)| u)
            .collect();
        (labeling.sizes[best], members)
    }

    /// Minimum, maximum and mean degree. The mean is the single rounding of
    /// the exact rational `2m / n`.
    pub fn degree_extremes(&self) -> DegreeStats {
        let n = self.node_count();
        let mut min = usize::MAX;
        let mut max = 0usize;
        for u in 0..n {
            let d = self.degree(u);
            min = min.min(d);
            max = max.max(d);
        }
        DegreeStats {
            min,
            max,
            mean: (2 * self.edge_count) as f64 / n as f64,
        }
    }

    /// Edge-list text format: header `n m`, then one `u v` line per edge in
    /// canonical order. Lines starting with `#` are comments.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let parse = |s: Option<&str>, lineno: usize| -> Result<usize, GraphError> {
                s.ok_or_else(|| GraphError::Parse {
                    line: lineno + 1,
                    msg: "expected two integers".into(),
                })?
                .parse()
                .map_err(|e| GraphError::Parse {
                    line: lineno + 1,
                    msg: format!("{e}"),
                })
            };
            let a = parse(fields.next(), lineno)?;
            let b = parse(fields.next(), lineno)?;
            if fields.next().is_some() {
                return Err(GraphError::Parse {
                    line: lineno + 1,
                    msg: "expected exactly two integers".into(),
                });
            }
            match header {
                None => header = Some((a, b)),
                Some(_) => edges.push((a, b)),
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing `n m` header".into(),
        })?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::build(n, &edges)
    }

    pub fn format_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.node_count(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn read_edge_list(path: &Path) -> Result<Graph, GraphError> {
        let text = std::fs::read_to_string(path)?;
        Graph::parse_edge_list(&text)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<(), GraphError> {
        std::fs::write(path, self.format_edge_list())?;
        Ok(())
    }
}

/// Partition of the nodes into connected components.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn label(&self, u: usize) -> u32 {
        self.labels[u]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Component sizes indexed by component id.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Degree summary of a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}
