//! Directed multilayer networks with integer edge counts.
//!
//! A network holds one directed weighted adjacency structure per layer
//! (typically one layer per hour of the day) over a fixed node registry.
//! Entries are stored sparse, ordered by (layer, from, to), so per-layer
//! passes walk a contiguous slice.

mod blocks;
mod degrees;
mod svd;

pub use blocks::BlockCounts;
pub use degrees::{DegreeSummary, Direction};
pub use svd::{top2_svd, Svd2};

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::ops::Range;

/// One station in the node registry.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInfo {
    pub id: String,
    /// (latitude, longitude) when known.
    pub coords: Option<(f64, f64)>,
}

impl NodeInfo {
    pub fn new(id: impl Into<String>) -> Self {
        NodeInfo {
            id: id.into(),
            coords: None,
        }
    }
}

/// One nonzero cell of the layered adjacency structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub layer: usize,
    pub from: usize,
    pub to: usize,
    pub count: u64,
}

/// Directed weighted multilayer network over a node registry.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilayerNetwork {
    n_nodes: usize,
    n_layers: usize,
    entries: Vec<Entry>,
    layer_ranges: Vec<Range<usize>>,
    nodes: Vec<NodeInfo>,
}

impl MultilayerNetwork {
    /// Builds a network from (from, to, layer, count) tuples with a default
    /// registry whose ids are the node indices.
    pub fn new<I>(n_nodes: usize, n_layers: usize, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, u64)>,
    {
        let nodes = (0..n_nodes).map(|i| NodeInfo::new(i.to_string())).collect();
        Self::with_nodes(nodes, n_layers, counts)
    }

    /// Builds a network over an explicit registry. Duplicate cells are summed,
    /// zero counts dropped, out-of-range indices rejected.
    pub fn with_nodes<I>(nodes: Vec<NodeInfo>, n_layers: usize, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, u64)>,
    {
        let n_nodes = nodes.len();
        if n_layers == 0 {
            return Err(Error::Dimension("network needs at least one layer".into()));
        }
        let mut cells: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
        for (from, to, layer, count) in counts {
            if from >= n_nodes || to >= n_nodes {
                return Err(Error::Dimension(format!(
                    "edge ({from}, {to}) outside registry of {n_nodes} nodes"
                )));
            }
            if layer >= n_layers {
                return Err(Error::Dimension(format!(
                    "layer {layer} outside 0..{n_layers}"
                )));
            }
            if count > 0 {
                *cells.entry((layer, from, to)).or_insert(0) += count;
            }
        }
        let entries: Vec<Entry> = cells
            .into_iter()
            .map(|((layer, from, to), count)| Entry {
                layer,
                from,
                to,
                count,
            })
            .collect();
        let mut layer_ranges = Vec::with_capacity(n_layers);
        let mut start = 0;
        for t in 0..n_layers {
            let end = entries[start..]
                .iter()
                .position(|e| e.layer != t)
                .map_or(entries.len(), |p| start + p);
            layer_ranges.push(start..end);
            start = end;
        }
        Ok(MultilayerNetwork {
            n_nodes,
            n_layers,
            entries,
            layer_ranges,
            nodes,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn node_ids(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.id.clone()).collect()
    }

    /// All nonzero cells ordered by (layer, from, to).
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Nonzero cells of one layer.
    pub fn layer(&self, t: usize) -> &[Entry] {
        &self.entries[self.layer_ranges[t].clone()]
    }

    /// Total trip count over all layers.
    pub fn total_trips(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Count stored at a single cell (zero when absent).
    pub fn count(&self, from: usize, to: usize, layer: usize) -> u64 {
        self.layer(layer)
            .binary_search_by(|e| (e.from, e.to).cmp(&(from, to)))
            .map_or(0, |idx| self.layer(layer)[idx].count)
    }

    /// Collapses all layers into a single-layer network over the same registry.
    pub fn aggregate(&self) -> MultilayerNetwork {
        let counts = self
            .entries
            .iter()
            .map(|e| (e.from, e.to, 0usize, e.count));
        MultilayerNetwork::with_nodes(self.nodes.clone(), 1, counts)
            .expect("aggregation of a valid network cannot fail")
    }
}
