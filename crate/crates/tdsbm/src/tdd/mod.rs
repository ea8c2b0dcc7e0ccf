//! Degree-corrected discrete block model with hour-resolved rates.
//!
//! Every node sits in exactly one block and carries a propensity theta,
//! normalized to sum to one within each block. Counts are Poisson with
//! mean
//!
//! ```text
//! mu[i, j, t] = theta[i] * theta[j] * omega[label(i), label(j), t]
//! ```
//!
//! Given labels, the maximum likelihood parameters are closed form: each
//! omega[g, h, t] is just the observed block-to-block count for that hour,
//! and theta[i] is the node's degree share within its block. Profiling
//! those out leaves an objective over labelings alone,
//!
//! ```text
//! sum_t sum_{g,h} m[g,h,t] * log(m[g,h,t] / (kappa[g] * kappa[h]))
//! ```
//!
//! with 0 log 0 read as 0, which the sweep fitter maximizes.

mod fit;
mod state;

pub use fit::{fit_discrete, fit_static, KlConfig, NodeOrder};
pub use state::BlockState;

use crate::error::{Error, Result};
use crate::net::MultilayerNetwork;
use ndarray::Array3;

/// Discrete model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub labels: Vec<usize>,
    pub theta: Vec<f64>,
    /// K x K x T rates; at the MLE these are the block count tensor.
    pub omega: Array3<f64>,
}

impl DiscreteModel {
    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.omega.dim().0
    }

    pub fn n_layers(&self) -> usize {
        self.omega.dim().2
    }

    /// Poisson mean for one cell.
    pub fn rate(&self, i: usize, j: usize, t: usize) -> f64 {
        self.theta[i] * self.theta[j] * self.omega[[self.labels[i], self.labels[j], t]]
    }

    /// Blocks that actually hold nodes; a fit can leave blocks empty.
    pub fn occupied_blocks(&self) -> usize {
        let mut seen = vec![false; self.n_blocks()];
        for &g in &self.labels {
            seen[g] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }
}

fn check_labels(net: &MultilayerNetwork, labels: &[usize], k: usize) -> Result<()> {
    if labels.len() != net.n_nodes() {
        return Err(Error::Dimension(format!(
            "{} labels for {} nodes",
            labels.len(),
            net.n_nodes()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&g| g >= k) {
        return Err(Error::Dimension(format!("label {bad} outside 0..{k}")));
    }
    Ok(())
}

/// Closed-form maximum likelihood parameters for fixed labels.
///
/// omega is the block count tensor; theta[i] is k_i over the total degree
/// of i's block. A nonempty block with no incident trips has no defined
/// estimate and is an error; an empty block just contributes zeros.
pub fn mle_given_labels(
    net: &MultilayerNetwork,
    labels: &[usize],
    k: usize,
) -> Result<DiscreteModel> {
    check_labels(net, labels, k)?;
    let counts = net.block_counts(labels, k)?;
    let summary = net.degree_summary();
    let mut occupied = vec![false; k];
    for &g in labels {
        occupied[g] = true;
    }
    for (g, &in_use) in occupied.iter().enumerate() {
        if in_use && counts.kappa[g] == 0 {
            return Err(Error::ZeroBlockDegree { block: g });
        }
    }
    let theta = labels
        .iter()
        .zip(&summary.k)
        .map(|(&g, &k_i)| k_i as f64 / counts.kappa[g] as f64)
        .collect();
    Ok(DiscreteModel {
        labels: labels.to_vec(),
        theta,
        omega: counts.m.mapv(|c| c as f64),
    })
}

/// The labeling objective left after profiling out theta and omega.
pub fn profile_objective(net: &MultilayerNetwork, labels: &[usize], k: usize) -> Result<f64> {
    check_labels(net, labels, k)?;
    let counts = net.block_counts(labels, k)?;
    let mut objective = 0.0;
    for g in 0..k {
        for h in 0..k {
            for t in 0..counts.n_layers() {
                let m = counts.m[[g, h, t]];
                if m > 0 {
                    let m = m as f64;
                    objective += m
                        * (m.ln()
                            - (counts.kappa[g] as f64).ln()
                            - (counts.kappa[h] as f64).ln());
                }
            }
        }
    }
    Ok(objective)
}

/// Poisson log-likelihood of a discrete model, without the constant
/// log(A!) term, on the same scale as the mixed model's likelihood.
pub fn log_likelihood_discrete(net: &MultilayerNetwork, model: &DiscreteModel) -> Result<f64> {
    let k = model.n_blocks();
    check_labels(net, &model.labels, k)?;
    if model.n_layers() != net.n_layers() {
        return Err(Error::Dimension(format!(
            "model has {} layers, network {}",
            model.n_layers(),
            net.n_layers()
        )));
    }
    // block propensity totals close the expected-count sum
    let mut block_theta = vec![0.0; k];
    for (&g, &th) in model.labels.iter().zip(&model.theta) {
        block_theta[g] += th;
    }
    let mut ll = 0.0;
    for g in 0..k {
        for h in 0..k {
            for t in 0..model.n_layers() {
                ll -= block_theta[g] * model.omega[[g, h, t]] * block_theta[h];
            }
        }
    }
    for e in net.entries() {
        let mu = model.rate(e.from, e.to, e.layer);
        if mu <= 0.0 {
            return Err(Error::ZeroMeanPositiveCount {
                origin: e.from,
                destination: e.to,
                layer: e.layer,
            });
        }
        ll += e.count as f64 * mu.ln();
    }
    Ok(ll)
}
