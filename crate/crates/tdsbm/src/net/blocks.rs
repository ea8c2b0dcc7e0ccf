//! Block-level count tensors for a hard node partition.

use super::MultilayerNetwork;
use crate::error::{Error, Result};
use ndarray::{Array2, Array3};

/// Trip counts grouped by block pair and hour, with block degree totals.
///
/// kappa counts each block's incident trip ends, so intra-block trips
/// contribute twice to their block; sum(kappa) is twice the total count.
#[derive(Debug, Clone)]
pub struct BlockCounts {
    /// m[g, h, t]: trips from block g to block h during hour t.
    pub m: Array3<u64>,
    /// Aggregate over hours: m_agg[g, h] = sum_t m[g, h, t].
    pub m_agg: Array2<u64>,
    /// kappa[g] = sum_h (m_agg[g, h] + m_agg[h, g]).
    pub kappa: Vec<u64>,
    /// K x T arrivals into each block per hour.
    pub kappa_in_by_hour: Array2<u64>,
    /// K x T departures out of each block per hour.
    pub kappa_out_by_hour: Array2<u64>,
}

impl MultilayerNetwork {
    /// Tallies block-to-block counts under a hard labeling into 0..k_blocks.
    pub fn block_counts(&self, labels: &[usize], k_blocks: usize) -> Result<BlockCounts> {
        if labels.len() != self.n_nodes() {
            return Err(Error::Dimension(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n_nodes()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&g| g >= k_blocks) {
            return Err(Error::Dimension(format!(
                "label {bad} outside 0..{k_blocks}"
            )));
        }
        let t_layers = self.n_layers();
        let mut m = Array3::<u64>::zeros((k_blocks, k_blocks, t_layers));
        for e in self.entries() {
            m[[labels[e.from], labels[e.to], e.layer]] += e.count;
        }
        Ok(BlockCounts::from_tensor(m))
    }
}

impl BlockCounts {
    /// Derives the aggregate and degree views from the full tensor.
    pub fn from_tensor(m: Array3<u64>) -> Self {
        let (k, _, t_layers) = m.dim();
        let mut m_agg = Array2::<u64>::zeros((k, k));
        let mut kappa_in = Array2::<u64>::zeros((k, t_layers));
        let mut kappa_out = Array2::<u64>::zeros((k, t_layers));
        for g in 0..k {
            for h in 0..k {
                for t in 0..t_layers {
                    let c = m[[g, h, t]];
                    m_agg[[g, h]] += c;
                    kappa_out[[g, t]] += c;
                    kappa_in[[h, t]] += c;
                }
            }
        }
        let kappa = (0..k)
            .map(|g| (0..k).map(|h| m_agg[[g, h]] + m_agg[[h, g]]).sum())
            .collect();
        BlockCounts {
            m,
            m_agg,
            kappa,
            kappa_in_by_hour: kappa_in,
            kappa_out_by_hour: kappa_out,
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.m.dim().0
    }

    pub fn n_layers(&self) -> usize {
        self.m.dim().2
    }

    pub fn total(&self) -> u64 {
        self.m_agg.iter().sum()
    }
}
