//! Model selection, synthetic generation, recovery scoring, and block
//! role labeling.
//!
//! The selection half counts free parameters and ranks fitted models by
//! AIC. The rest supports validation workflows: sampling networks from a
//! fitted model, scoring recovered partitions against planted ones, and
//! attaching human-readable roles (home, work, park) to blocks from the
//! shape of their hourly rate profiles.

mod recovery;
mod roles;
mod sample;

pub use recovery::{adjusted_rand_index, degree_identity_residual};
pub use roles::{label_blocks, Role, RoleConfig, RoleEvidence, RoleLabel};
pub use sample::{sample_network, TripRates};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which parametrization a fitted model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Mixed membership: a full membership row per node.
    Tdmm,
    /// Discrete membership with per-node strengths.
    Tdd,
    /// Discrete membership fitted to the layer-aggregated network.
    Static,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelKind::Tdmm => "tdmm",
            ModelKind::Tdd => "tdd",
            ModelKind::Static => "static",
        };
        f.write_str(name)
    }
}

/// Free-parameter count for a model of the given shape.
///
/// The mixed model has K·N memberships less K column-sum constraints plus
/// T·K² rates; the discrete models have N labels and N strengths less K
/// per-block strength normalizations plus the same rate tensor. A static
/// fit is the discrete count with T = 1.
pub fn param_count(kind: ModelKind, n_nodes: usize, k: usize, t_layers: usize) -> Result<usize> {
    if k == 0 || t_layers == 0 {
        return Err(Error::Dimension(
            "parameter count needs at least one block and one layer".into(),
        ));
    }
    if k > n_nodes {
        return Err(Error::Dimension(format!(
            "{k} blocks need at least {k} nodes, got {n_nodes}"
        )));
    }
    let rates = t_layers * k * k;
    let memberships = match kind {
        ModelKind::Tdmm => k * n_nodes - k,
        ModelKind::Tdd | ModelKind::Static => 2 * n_nodes - k,
    };
    Ok(memberships + rates)
}

/// Akaike information criterion: twice the parameter count minus twice
/// the log-likelihood. Lower is better.
pub fn aic(n_params: usize, loglik: f64) -> f64 {
    2.0 * n_params as f64 - 2.0 * loglik
}

/// One fitted model offered for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub kind: ModelKind,
    pub k: usize,
    pub n_params: usize,
    pub loglik: f64,
}

/// One row of the selection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub kind: ModelKind,
    pub k: usize,
    pub n_params: usize,
    pub loglik: f64,
    pub aic: f64,
}

/// Ranks fitted models by AIC, best first. Ties keep input order.
pub fn compare_models(entries: &[ModelEntry]) -> Result<Vec<SelectionRow>> {
    if entries.is_empty() {
        return Err(Error::EmptyInput("no models to compare".into()));
    }
    let mut rows: Vec<SelectionRow> = entries
        .iter()
        .map(|e| SelectionRow {
            kind: e.kind,
            k: e.k,
            n_params: e.n_params,
            loglik: e.loglik,
            aic: aic(e.n_params, e.loglik),
        })
        .collect();
    rows.sort_by(|a, b| a.aic.partial_cmp(&b.aic).expect("finite aic"));
    Ok(rows)
}
