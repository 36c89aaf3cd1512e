//! Undirected simple graphs and the plain-text edge-list format.
//!
//! A [`Graph`] stores every edge twice: once as a flat `(u, v)` pair list with
//! `u < v`, sorted, and once as per-node sorted adjacency (CSR layout) so
//! membership queries are a binary search.
//!
//! The edge-list format is one `u v` pair of integer ids per line; blank lines
//! and lines starting with `#` are ignored. Parsing relabels ids densely in
//! first-appearance order, drops self-loops and merges duplicate or reversed
//! pairs.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Counts of what normalization removed while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizationReport {
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph over ids `0..node_count`, dropping self-loops and merging
    /// duplicate pairs in either orientation.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Graph, NormalizationReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut report = NormalizationReport::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(Error::InvalidParams(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicates_merged = before - pairs.len();
        Ok((Self::from_sorted_unique(node_count, pairs), report))
    }

    /// `pairs` must be sorted, unique, loop-free and have `u < v`.
    pub(crate) fn from_sorted_unique(node_count: usize, pairs: Vec<(NodeId, NodeId)>) -> Graph {
        let mut degree = vec![0usize; node_count];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut neighbors = vec![0; offsets[node_count]];
        for &(u, v) in &pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        // Sorted input fills every list in ascending order: first the smaller
        // endpoints `u` of pairs `(u, v)`, then the larger ones.
        debug_assert!((0..node_count).all(|v| neighbors[offsets[v]..offsets[v + 1]].is_sorted()));
        Graph {
            node_count,
            edges: pairs,
            offsets,
            neighbors,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// True when every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        if self.node_count <= 1 {
            return true;
        }
        self.component_labels().1 == 1
    }

    fn component_labels(&self) -> (Vec<usize>, usize) {
        const UNSEEN: usize = usize::MAX;
        let mut label = vec![UNSEEN; self.node_count];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.node_count {
            if label[start] != UNSEEN {
                continue;
            }
            label[start] = count;
            queue.push_back(start as NodeId);
            while let Some(v) = queue.pop_front() {
                for &u in self.neighbors(v) {
                    if label[u as usize] == UNSEEN {
                        label[u as usize] = count;
                        queue.push_back(u);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Relabels nodes in breadth-first order (roots and neighbors visited by
    /// ascending id) and drops isolated nodes.
    ///
    /// The result is the fixed point of `parse_edge_list(write_edge_list(_))`,
    /// so normalized graphs survive a file round-trip unchanged.
    pub fn normalized(&self) -> Graph {
        self.relabel_from(0..self.node_count as NodeId)
    }

    /// BFS relabel over the components reached from `roots`, in order. Edges
    /// outside those components are dropped.
    fn relabel_from(&self, roots: impl Iterator<Item = NodeId>) -> Graph {
        const UNSEEN: NodeId = NodeId::MAX;
        let mut relabel = vec![UNSEEN; self.node_count];
        let mut next: NodeId = 0;
        let mut queue = VecDeque::new();
        for root in roots {
            if relabel[root as usize] != UNSEEN || self.degree(root) == 0 {
                continue;
            }
            relabel[root as usize] = next;
            next += 1;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                for &u in self.neighbors(v) {
                    if relabel[u as usize] == UNSEEN {
                        relabel[u as usize] = next;
                        next += 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut pairs: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, _)| relabel[u as usize] != UNSEEN)
            .map(|&(u, v)| {
                let (a, b) = (relabel[u as usize], relabel[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        pairs.sort_unstable();
        Graph::from_sorted_unique(next as usize, pairs)
    }
}

/// Parses whitespace-separated integer pairs into a normalized graph.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    parse_edge_list_with_report(text).map(|(g, _)| g)
}

pub fn parse_edge_list_with_report(text: &str) -> Result<(Graph, NormalizationReport)> {
    let mut ids: HashMap<u64, NodeId> = HashMap::new();
    let mut raw_edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two node ids".into(),
            });
        };
        let mut intern = |tok: &str| -> Result<NodeId> {
            let raw: u64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node id `{tok}`"),
            })?;
            let next = ids.len() as NodeId;
            Ok(*ids.entry(raw).or_insert(next))
        };
        let u = intern(a)?;
        let v = intern(b)?;
        raw_edges.push((u, v));
    }
    let (graph, report) = Graph::from_edges(ids.len(), raw_edges)?;
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok((graph, report))
}

/// One `u v` line per edge, `u < v`, sorted.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 12);
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Induced subgraph on the largest connected component, normalized.
///
/// Ties go to the component holding the smallest node id.
pub fn largest_component(g: &Graph) -> Result<Graph> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let (label, count) = g.component_labels();
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    // Components are labeled in order of their smallest node id, so the
    // first maximum wins ties.
    let best = (0..count).fold(0, |best, c| if sizes[c] > sizes[best] { c } else { best });
    let root = label.iter().position(|&l| l == best).unwrap_or(0) as NodeId;
    Ok(g.relabel_from(std::iter::once(root)))
}
