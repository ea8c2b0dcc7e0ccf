//! Poisson sampling of networks from a fitted model.

use crate::net::MultilayerNetwork;
use crate::seed::unit_rng;
use rand::Rng;
use rand_distr::Poisson;
use rayon::prelude::*;

/// Anything that assigns a Poisson rate to every (origin, destination,
/// layer) cell.
pub trait TripRates: Sync {
    fn n_nodes(&self) -> usize;
    fn n_layers(&self) -> usize;
    fn rate(&self, i: usize, j: usize, t: usize) -> f64;
}

impl TripRates for crate::tdmm::MixedModel {
    fn n_nodes(&self) -> usize {
        self.n_nodes()
    }
    fn n_layers(&self) -> usize {
        self.n_layers()
    }
    fn rate(&self, i: usize, j: usize, t: usize) -> f64 {
        self.rate(i, j, t)
    }
}

impl TripRates for crate::tdd::DiscreteModel {
    fn n_nodes(&self) -> usize {
        self.n_nodes()
    }
    fn n_layers(&self) -> usize {
        self.n_layers()
    }
    fn rate(&self, i: usize, j: usize, t: usize) -> f64 {
        self.rate(i, j, t)
    }
}

/// Draws one network from the model: every cell gets an independent
/// Poisson count at its rate. Zero draws are unstored, but the node
/// registry keeps the full node set, so nodes that drew no trips at all
/// stay addressable.
///
/// Layers sample in parallel, each from its own seed-derived stream, so
/// the result depends only on (model, seed) and not on thread count.
pub fn sample_network<M: TripRates>(model: &M, seed: u64) -> MultilayerNetwork {
    let n = model.n_nodes();
    let t_layers = model.n_layers();
    let per_layer: Vec<Vec<(usize, usize, usize, u64)>> = (0..t_layers)
        .into_par_iter()
        .map(|t| {
            let mut rng = unit_rng(seed, t as u64);
            let mut cells = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let mu = model.rate(i, j, t);
                    if mu <= 0.0 || mu.is_nan() {
                        continue;
                    }
                    let draw = rng.sample(Poisson::new(mu).expect("positive finite rate")) as u64;
                    if draw > 0 {
                        cells.push((i, j, t, draw));
                    }
                }
            }
            cells
        })
        .collect();
    let cells = per_layer.into_iter().flatten();
    MultilayerNetwork::new(n, t_layers.max(1), cells).expect("sampled cells are in range")
}
