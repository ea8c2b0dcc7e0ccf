//! Mixed-membership block model with hour-resolved rates.
//!
//! Every node i carries a nonnegative strength C[i, g] in each block g, and
//! every ordered block pair (g, h) carries a rate curve omega[g, h, t] over
//! the hours. Trip counts are independent Poisson draws with mean
//!
//! ```text
//! mu[i, j, t] = sum_{g, h} C[i, g] * omega[g, h, t] * C[j, h]
//! ```
//!
//! The log-likelihood below drops the constant log(A!) term, so values are
//! comparable across models on the same network but are not absolute
//! Poisson log-probabilities.
//!
//! The parameterization is scale-redundant: moving mass between a column
//! of C and the matching slices of omega leaves every mean unchanged.
//! Fitting therefore runs unconstrained and [`MixedModel::normalize`] picks
//! the representative with unit column sums at the end.

mod fit;

pub use fit::{fit, GdConfig};

use crate::error::{Error, Result};
use crate::net::MultilayerNetwork;
use ndarray::{Array1, Array2, Array3};
use rand::Rng;
use rand_distr::StandardNormal;

/// Mixed-membership model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedModel {
    /// N x K nonnegative membership strengths.
    pub c: Array2<f64>,
    /// K x K x T nonnegative block-to-block rates.
    pub omega: Array3<f64>,
}

impl MixedModel {
    pub fn n_nodes(&self) -> usize {
        self.c.dim().0
    }

    pub fn n_blocks(&self) -> usize {
        self.c.dim().1
    }

    pub fn n_layers(&self) -> usize {
        self.omega.dim().2
    }

    fn check_against(&self, net: &MultilayerNetwork) -> Result<()> {
        let (n, k) = self.c.dim();
        let (kg, kh, t) = self.omega.dim();
        if kg != k || kh != k {
            return Err(Error::Dimension(format!(
                "omega is {kg}x{kh}x{t} but C has {k} blocks"
            )));
        }
        if n != net.n_nodes() || t != net.n_layers() {
            return Err(Error::Dimension(format!(
                "model is {n} nodes x {t} layers, network is {}x{}",
                net.n_nodes(),
                net.n_layers()
            )));
        }
        Ok(())
    }

    /// Poisson mean for one cell.
    pub fn rate(&self, i: usize, j: usize, t: usize) -> f64 {
        let k = self.n_blocks();
        let mut mu = 0.0;
        for g in 0..k {
            let mut inner = 0.0;
            for h in 0..k {
                inner += self.omega[[g, h, t]] * self.c[[j, h]];
            }
            mu += self.c[[i, g]] * inner;
        }
        mu
    }

    /// Dense mean matrix for one layer. Intended for small networks and
    /// tests; the likelihood and gradient never materialize this.
    pub fn rates_layer(&self, t: usize) -> Array2<f64> {
        let n = self.n_nodes();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = self.rate(i, j, t);
            }
        }
        out
    }

    /// Column sums of C, one per block.
    pub fn c_totals(&self) -> Array1<f64> {
        let (n, k) = self.c.dim();
        let mut s = Array1::zeros(k);
        for g in 0..k {
            for i in 0..n {
                s[g] += self.c[[i, g]];
            }
        }
        s
    }

    /// Expected trip total, summed over every cell and layer, via the
    /// factorized identity sum(mu) = sum_{g,h,t} s[g] omega[g,h,t] s[h].
    pub fn expected_total(&self) -> f64 {
        let (k, _, t_layers) = self.omega.dim();
        let s = self.c_totals();
        let mut total = 0.0;
        for g in 0..k {
            for h in 0..k {
                for t in 0..t_layers {
                    total += s[g] * self.omega[[g, h, t]] * s[h];
                }
            }
        }
        total
    }

    /// Poisson log-likelihood without the constant log(A!) term.
    ///
    /// A zero mean under a positive count is reported as an error rather
    /// than a silent negative infinity.
    pub fn log_likelihood(&self, net: &MultilayerNetwork) -> Result<f64> {
        self.check_against(net)?;
        let mut ll = -self.expected_total();
        for e in net.entries() {
            let mu = self.rate(e.from, e.to, e.layer);
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

    /// Exact gradient of the log-likelihood in (C, omega).
    ///
    /// The dense -1 part of (A/mu - 1) factorizes through the column sums
    /// of C; the A/mu part only touches stored cells, so the cost is
    /// O(nnz K^2 + (N + T) K^2).
    pub fn gradient(&self, net: &MultilayerNetwork) -> Result<(Array2<f64>, Array3<f64>)> {
        self.check_against(net)?;
        let (n, k) = self.c.dim();
        let t_layers = self.n_layers();
        let s = self.c_totals();

        let mut grad_c = Array2::<f64>::zeros((n, k));
        let mut grad_w = Array3::<f64>::zeros((k, k, t_layers));
        for g in 0..k {
            for h in 0..k {
                for t in 0..t_layers {
                    grad_w[[g, h, t]] = -s[g] * s[h];
                }
            }
        }
        // per-block dense pull on every node: sum_t (Omega_t s + Omega_t' s)
        let mut dense_c = vec![0.0; k];
        for t in 0..t_layers {
            for (g, pull) in dense_c.iter_mut().enumerate() {
                for h in 0..k {
                    *pull += (self.omega[[g, h, t]] + self.omega[[h, g, t]]) * s[h];
                }
            }
        }
        for i in 0..n {
            for g in 0..k {
                grad_c[[i, g]] = -dense_c[g];
            }
        }

        for e in net.entries() {
            let (i, j, t) = (e.from, e.to, e.layer);
            let mu = self.rate(i, j, t);
            if mu <= 0.0 {
                return Err(Error::ZeroMeanPositiveCount {
                    origin: i,
                    destination: j,
                    layer: t,
                });
            }
            let r = e.count as f64 / mu;
            for g in 0..k {
                let mut out_pull = 0.0; // (Omega_t C_j)_g
                let mut in_pull = 0.0; // (Omega_t' C_i)_g
                for h in 0..k {
                    out_pull += self.omega[[g, h, t]] * self.c[[j, h]];
                    in_pull += self.c[[i, h]] * self.omega[[h, g, t]];
                }
                grad_c[[i, g]] += r * out_pull;
                grad_c[[j, g]] += r * in_pull;
                for h in 0..k {
                    grad_w[[g, h, t]] += r * self.c[[i, g]] * self.c[[j, h]];
                }
            }
        }
        Ok((grad_c, grad_w))
    }

    /// Rescales to the representative with unit column sums on C, moving
    /// the scale into omega. Every mean, and hence the likelihood, is
    /// unchanged. Columns summing to zero are left alone.
    pub fn normalize(&mut self) {
        let (n, k) = self.c.dim();
        let t_layers = self.n_layers();
        let s = self.c_totals();
        for g in 0..k {
            if s[g] <= 0.0 {
                continue;
            }
            for i in 0..n {
                self.c[[i, g]] /= s[g];
            }
        }
        for g in 0..k {
            for h in 0..k {
                let scale = s[g].max(0.0) * s[h].max(0.0);
                let scale = if s[g] > 0.0 && s[h] > 0.0 { scale } else { 1.0 };
                for t in 0..t_layers {
                    self.omega[[g, h, t]] *= scale;
                }
            }
        }
    }
}

/// Random initial point: every entry is exp of a standard normal draw,
/// omega is scaled so each block pair's rate curve sums to total/K^2, and
/// C columns are normalized to one. The expected trip total then equals
/// the observed total exactly.
///
/// Draw order (C row-major, then omega by block pair and hour) is part of
/// the determinism contract.
pub fn init_params<R: Rng>(net: &MultilayerNetwork, k: usize, rng: &mut R) -> MixedModel {
    let n = net.n_nodes();
    let t_layers = net.n_layers();
    let total = net.total_trips() as f64;

    let mut c = Array2::<f64>::zeros((n, k));
    for i in 0..n {
        for g in 0..k {
            let x: f64 = rng.sample(StandardNormal);
            c[[i, g]] = x.exp();
        }
    }
    let mut omega = Array3::<f64>::zeros((k, k, t_layers));
    for g in 0..k {
        for h in 0..k {
            for t in 0..t_layers {
                let x: f64 = rng.sample(StandardNormal);
                omega[[g, h, t]] = x.exp();
            }
        }
    }
    let pair_target = total / (k * k) as f64;
    for g in 0..k {
        for h in 0..k {
            let curve_total: f64 = (0..t_layers).map(|t| omega[[g, h, t]]).sum();
            let scale = pair_target / curve_total;
            for t in 0..t_layers {
                omega[[g, h, t]] *= scale;
            }
        }
    }
    for g in 0..k {
        let col_total: f64 = (0..n).map(|i| c[[i, g]]).sum();
        for i in 0..n {
            c[[i, g]] /= col_total;
        }
    }
    MixedModel { c, omega }
}
