//! Incremental bookkeeping for single-node label moves.
//!
//! The profile objective factorizes as
//!
//! ```text
//! F = sum_t sum_{g,h} xlnx(m[g,h,t]) - sum_g xlnx(kappa[g])
//! ```
//!
//! (xlnx(0) = 0), and moving one node only touches the m rows and columns
//! of its old and new blocks plus those two kappa entries, so a move's
//! exact objective change comes from the node's per-hour flows into each
//! block instead of a full recount.

use super::profile_objective;
use crate::error::Result;
use crate::net::MultilayerNetwork;
use ndarray::Array3;

fn xlnx(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        let x = x as f64;
        x * x.ln()
    }
}

/// A node's trip mass split by counterpart block and hour, with the node's
/// own self-loops kept separate.
pub struct NodeFlows {
    /// out[b * T + t]: trips node -> members of block b (node excluded).
    out: Vec<u64>,
    /// inc[b * T + t]: trips members of block b -> node (node excluded).
    inc: Vec<u64>,
    /// self loops per hour.
    selfloops: Vec<u64>,
    /// hours with any activity, ascending.
    active_hours: Vec<usize>,
}

/// Mutable labeling over a fixed network, tracking block counts, block
/// degrees, and the profile objective under single-node moves.
pub struct BlockState {
    labels: Vec<usize>,
    k: usize,
    t_layers: usize,
    m: Array3<u64>,
    kappa: Vec<u64>,
    /// Total degree per node (self-loops counted twice).
    degree: Vec<u64>,
    /// Per node: (hour, counterpart, count) departures, self-loops excluded.
    out_adj: Vec<Vec<(usize, usize, u64)>>,
    /// Per node: (hour, counterpart, count) arrivals, self-loops excluded.
    in_adj: Vec<Vec<(usize, usize, u64)>>,
    /// Per node: (hour, count) self-loops.
    self_adj: Vec<Vec<(usize, u64)>>,
    objective: f64,
}

impl BlockState {
    pub fn new(net: &MultilayerNetwork, labels: Vec<usize>, k: usize) -> Result<Self> {
        let counts = net.block_counts(&labels, k)?;
        let summary = net.degree_summary();
        let n = net.n_nodes();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut self_adj = vec![Vec::new(); n];
        for e in net.entries() {
            if e.from == e.to {
                self_adj[e.from].push((e.layer, e.count));
            } else {
                out_adj[e.from].push((e.layer, e.to, e.count));
                in_adj[e.to].push((e.layer, e.from, e.count));
            }
        }
        let objective = profile_objective(net, &labels, k)?;
        Ok(BlockState {
            labels,
            k,
            t_layers: net.n_layers(),
            m: counts.m,
            kappa: counts.kappa,
            degree: summary.k,
            out_adj,
            in_adj,
            self_adj,
            objective,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_blocks(&self) -> usize {
        self.k
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Pins the maintained objective to a value recorded earlier for this
    /// exact integer state, shedding float drift from a move-undo chain.
    pub(crate) fn set_objective(&mut self, objective: f64) {
        self.objective = objective;
    }

    /// Recomputes the objective from the maintained tensors (used to bound
    /// incremental drift in tests).
    pub fn objective_from_counts(&self) -> f64 {
        let mut f = 0.0;
        for &m in self.m.iter() {
            f += xlnx(m);
        }
        for &kap in &self.kappa {
            f -= xlnx(kap);
        }
        f
    }

    /// Gathers one node's flows; the sweep evaluates every target against
    /// the same flows.
    pub fn node_flows(&self, node: usize) -> NodeFlows {
        let t_layers = self.t_layers;
        let mut out = vec![0u64; self.k * t_layers];
        let mut inc = vec![0u64; self.k * t_layers];
        let mut selfloops = vec![0u64; t_layers];
        let mut active = vec![false; t_layers];
        for &(t, j, c) in &self.out_adj[node] {
            out[self.labels[j] * t_layers + t] += c;
            active[t] = true;
        }
        for &(t, j, c) in &self.in_adj[node] {
            inc[self.labels[j] * t_layers + t] += c;
            active[t] = true;
        }
        for &(t, c) in &self.self_adj[node] {
            selfloops[t] += c;
            active[t] = true;
        }
        let active_hours = (0..t_layers).filter(|&t| active[t]).collect();
        NodeFlows {
            out,
            inc,
            selfloops,
            active_hours,
        }
    }

    /// Exact objective change from relabeling `node` to `target`.
    pub fn delta_objective(&self, node: usize, target: usize) -> f64 {
        let flows = self.node_flows(node);
        self.delta_with_flows(node, target, &flows)
    }

    /// Same, against precomputed flows for the node.
    pub fn delta_with_flows(&self, node: usize, target: usize, flows: &NodeFlows) -> f64 {
        let g = self.labels[node];
        let h = target;
        if g == h {
            return 0.0;
        }
        let t_layers = self.t_layers;
        let mut delta = 0.0;
        for &t in &flows.active_hours {
            // counterpart blocks other than g and h: row and column shifts
            for b in 0..self.k {
                if b == g || b == h {
                    continue;
                }
                let o = flows.out[b * t_layers + t];
                if o > 0 {
                    delta += xlnx(self.m[[g, b, t]] - o) - xlnx(self.m[[g, b, t]]);
                    delta += xlnx(self.m[[h, b, t]] + o) - xlnx(self.m[[h, b, t]]);
                }
                let i = flows.inc[b * t_layers + t];
                if i > 0 {
                    delta += xlnx(self.m[[b, g, t]] - i) - xlnx(self.m[[b, g, t]]);
                    delta += xlnx(self.m[[b, h, t]] + i) - xlnx(self.m[[b, h, t]]);
                }
            }
            // the four cells where both endpoints involve g or h
            let out_g = flows.out[g * t_layers + t];
            let out_h = flows.out[h * t_layers + t];
            let in_g = flows.inc[g * t_layers + t];
            let in_h = flows.inc[h * t_layers + t];
            let own = flows.selfloops[t];
            let gg = self.m[[g, g, t]];
            let gh = self.m[[g, h, t]];
            let hg = self.m[[h, g, t]];
            let hh = self.m[[h, h, t]];
            delta += xlnx(gg - out_g - in_g - own) - xlnx(gg);
            delta += xlnx(gh - out_h + in_g) - xlnx(gh);
            delta += xlnx(hg + out_g - in_h) - xlnx(hg);
            delta += xlnx(hh + out_h + in_h + own) - xlnx(hh);
        }
        // kappa enters the objective negated, so losses and gains flip
        let k_i = self.degree[node];
        delta += xlnx(self.kappa[g]) - xlnx(self.kappa[g] - k_i);
        delta += xlnx(self.kappa[h]) - xlnx(self.kappa[h] + k_i);
        delta
    }

    /// Applies the move and returns the objective change, which is the
    /// same value `delta_with_flows` reports for the pre-move state.
    pub fn apply_move(&mut self, node: usize, target: usize) -> f64 {
        let flows = self.node_flows(node);
        self.apply_move_with_flows(node, target, &flows)
    }

    pub fn apply_move_with_flows(
        &mut self,
        node: usize,
        target: usize,
        flows: &NodeFlows,
    ) -> f64 {
        let g = self.labels[node];
        let h = target;
        if g == h {
            return 0.0;
        }
        let delta = self.delta_with_flows(node, target, flows);
        let t_layers = self.t_layers;
        for &t in &flows.active_hours {
            for b in 0..self.k {
                if b == g || b == h {
                    continue;
                }
                let o = flows.out[b * t_layers + t];
                self.m[[g, b, t]] -= o;
                self.m[[h, b, t]] += o;
                let i = flows.inc[b * t_layers + t];
                self.m[[b, g, t]] -= i;
                self.m[[b, h, t]] += i;
            }
            let out_g = flows.out[g * t_layers + t];
            let out_h = flows.out[h * t_layers + t];
            let in_g = flows.inc[g * t_layers + t];
            let in_h = flows.inc[h * t_layers + t];
            let own = flows.selfloops[t];
            self.m[[g, g, t]] -= out_g + in_g + own;
            self.m[[g, h, t]] = self.m[[g, h, t]] + in_g - out_h;
            self.m[[h, g, t]] = self.m[[h, g, t]] + out_g - in_h;
            self.m[[h, h, t]] += out_h + in_h + own;
        }
        let k_i = self.degree[node];
        self.kappa[g] -= k_i;
        self.kappa[h] += k_i;
        self.labels[node] = h;
        self.objective += delta;
        delta
    }
}
