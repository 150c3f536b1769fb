use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Undirected, unweighted graph in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds the graph from an edge list. Edges are symmetrized and
    /// deduplicated, self-loops dropped. Every node must end up with at least
    /// one neighbor.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u != v {
                adj[u].insert(v);
                adj[v].insert(u);
            }
        }
        if let Some(i) = adj.iter().position(BTreeSet::is_empty) {
            return Err(Error::RejectedInput(format!("node {i} is isolated")));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for row in adj {
            neighbors.extend(row);
            offsets.push(neighbors.len());
        }
        Ok(Self { n, offsets, neighbors })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.degree(i) as f64).collect()
    }

    /// Number of connected components (reported, never enforced).
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Star with node 0 at the center.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }
}

/// Parses the edge-list text format: one `u v` pair per line, 0-based ids,
/// `%`/`#` comment lines and blank lines ignored, optional `# nodes N`
/// directive fixing the node count.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    let mut max_id = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut words = rest.split_whitespace();
            if words.next() == Some("nodes") {
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| parse_err("'# nodes' needs a node count".into()))?;
                declared = Some(n);
            }
            continue;
        }
        let mut words = line.split_whitespace();
        let mut id = |what: &str| -> Result<usize> {
            let w = words.next().ok_or_else(|| parse_err(format!("missing {what} node id")))?;
            w.parse::<usize>().map_err(|_| parse_err(format!("invalid node id '{w}'")))
        };
        let u = id("source")?;
        let v = id("target")?;
        if words.next().is_some() {
            return Err(parse_err("expected exactly two node ids".into()));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v));
    }
    let n = match (declared, max_id) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::RejectedInput(format!("node id {m} exceeds declared count {n}")));
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(Error::RejectedInput("edge list is empty".into())),
    };
    Graph::from_edges(n, &edges)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_edge_list(&text)
}
