//! Degree bookkeeping and the flow diagnostics built on it.
//!
//! Conventions: per hour, a self-loop at node i counts once toward that
//! node's in-degree and once toward its out-degree. The total degree
//! k_i sums both directions over all hours, so a self-loop contributes 2,
//! and sum(k_i) equals twice the total trip count.

use super::MultilayerNetwork;
use ndarray::Array2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// Per-node degree totals and per-hour breakdowns.
#[derive(Debug, Clone)]
pub struct DegreeSummary {
    /// Total degree k_i (in plus out over all hours).
    pub k: Vec<u64>,
    /// N x T arrivals per node per hour.
    pub k_in_by_hour: Array2<u64>,
    /// N x T departures per node per hour.
    pub k_out_by_hour: Array2<u64>,
    pub total_trips: u64,
}

impl MultilayerNetwork {
    pub fn degree_summary(&self) -> DegreeSummary {
        let (n, t) = (self.n_nodes(), self.n_layers());
        let mut k_in = Array2::<u64>::zeros((n, t));
        let mut k_out = Array2::<u64>::zeros((n, t));
        let mut total = 0u64;
        for e in self.entries() {
            k_out[[e.from, e.layer]] += e.count;
            k_in[[e.to, e.layer]] += e.count;
            total += e.count;
        }
        let k = (0..n)
            .map(|i| (0..t).map(|h| k_in[[i, h]] + k_out[[i, h]]).sum())
            .collect();
        DegreeSummary {
            k,
            k_in_by_hour: k_in,
            k_out_by_hour: k_out,
            total_trips: total,
        }
    }

    /// Trips per layer.
    pub fn hourly_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n_layers()];
        for e in self.entries() {
            totals[e.layer] += e.count;
        }
        totals
    }

    /// N x T matrix of per-hour degrees in one direction, as reals.
    pub fn degree_hour_matrix(&self, direction: Direction) -> Array2<f64> {
        let summary = self.degree_summary();
        let m = match direction {
            Direction::In => summary.k_in_by_hour,
            Direction::Out => summary.k_out_by_hour,
        };
        m.mapv(|c| c as f64)
    }

    /// Pearson correlation between per-station total in- and out-strengths.
    /// NaN when either strength is constant across stations.
    pub fn in_out_degree_correlation(&self) -> f64 {
        let summary = self.degree_summary();
        let n = self.n_nodes();
        let ins: Vec<f64> = (0..n)
            .map(|i| summary.k_in_by_hour.row(i).iter().sum::<u64>() as f64)
            .collect();
        let outs: Vec<f64> = (0..n)
            .map(|i| summary.k_out_by_hour.row(i).iter().sum::<u64>() as f64)
            .collect();
        pearson(&ins, &outs)
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.is_empty() {
        return f64::NAN;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx.sqrt() * syy.sqrt())
}
