//! Kernighan-Lin style sweeps over single-node label moves.
//!
//! A sweep moves every node at most once, even when its best change is
//! negative, and a moved node stays frozen until the sweep ends. The sweep
//! then rewinds to the best state it passed through (possibly its start),
//! so the per-run objective never falls. A run stops when a sweep's
//! improvement drops to the tolerance; many independently seeded runs race
//! and the best final objective wins.
//!
//! By default each step takes the best available move over all unfrozen
//! nodes. The cheaper random-permutation order is available as a config
//! switch, but it settles into much worse optima on strongly structured
//! networks: on a planted two-block commuter fixture it reliably lands
//! thousands of objective units below the split that the greedy order
//! finds exactly.

use super::{log_likelihood_discrete, mle_given_labels, BlockState, DiscreteModel};
use crate::error::{Error, Result};
use crate::net::MultilayerNetwork;
use crate::report::FitReport;
use crate::seed::unit_rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// How a sweep picks the next node to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeOrder {
    /// Fresh uniform random permutation each sweep; each visited node takes
    /// its own best move. Faster per sweep but weak on structured networks.
    RandomPerSweep,
    /// Always the unfrozen node with the best available move (the default).
    Greedy,
}

/// Tuning knobs for the sweep fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KlConfig {
    pub runs: usize,
    /// A sweep improving the objective by no more than this ends its run.
    pub tolerance: f64,
    pub node_order: NodeOrder,
    pub seed: u64,
    /// Run the independent runs on the rayon pool; results are identical
    /// either way.
    pub parallel: bool,
}

impl Default for KlConfig {
    fn default() -> Self {
        KlConfig {
            runs: 50,
            tolerance: 1e-4,
            node_order: NodeOrder::Greedy,
            seed: 0,
            parallel: true,
        }
    }
}

struct Run {
    labels: Vec<usize>,
    objective: f64,
    sweeps: usize,
    trace: Vec<f64>,
}

/// Fits a discrete model with `k` blocks by repeated sweep runs.
pub fn fit_discrete(
    net: &MultilayerNetwork,
    k: usize,
    config: &KlConfig,
) -> Result<(DiscreteModel, FitReport)> {
    if k == 0 {
        return Err(Error::Dimension("need at least one block".into()));
    }
    if net.n_nodes() < k {
        return Err(Error::Dimension(format!(
            "{} nodes cannot fill {k} blocks",
            net.n_nodes()
        )));
    }
    if config.runs == 0 {
        return Err(Error::Config("need at least one run".into()));
    }
    let started = Instant::now();
    let runs: Vec<Result<Run>> = if config.parallel && config.runs > 1 {
        (0..config.runs)
            .into_par_iter()
            .map(|r| run_once(net, k, config, r))
            .collect()
    } else {
        (0..config.runs).map(|r| run_once(net, k, config, r)).collect()
    };

    let mut best: Option<(usize, Run)> = None;
    for (index, run) in runs.into_iter().enumerate() {
        let run = run?;
        let replace = match &best {
            None => true,
            Some((_, incumbent)) => run.objective > incumbent.objective,
        };
        if replace {
            best = Some((index, run));
        }
    }
    let (best_index, run) = best.expect("at least one run");

    let model = mle_given_labels(net, &run.labels, k)?;
    let report = FitReport {
        final_loglik: log_likelihood_discrete(net, &model)?,
        final_objective: Some(run.objective),
        iterations: run.sweeps,
        restarts_run: config.runs,
        best_restart_index: best_index,
        seed: config.seed,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        stall_triggered: false,
        trace: run.trace,
    };
    Ok((model, report))
}

/// Collapses the hours and fits a single-layer discrete model, blind to
/// time-of-day structure by construction. The returned model has one
/// layer regardless of the input's layer count.
pub fn fit_static(
    net: &MultilayerNetwork,
    k: usize,
    config: &KlConfig,
) -> Result<(DiscreteModel, FitReport)> {
    fit_discrete(&net.aggregate(), k, config)
}

fn run_once(net: &MultilayerNetwork, k: usize, config: &KlConfig, run: usize) -> Result<Run> {
    let mut rng = unit_rng(config.seed, run as u64);
    let n = net.n_nodes();
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut state = BlockState::new(net, labels, k)?;
    let mut trace = Vec::new();
    let mut sweeps = 0usize;
    loop {
        sweeps += 1;
        let improvement = match config.node_order {
            NodeOrder::RandomPerSweep => sweep(&mut state, Some(&mut rng)),
            NodeOrder::Greedy => sweep(&mut state, None),
        };
        trace.push(state.objective());
        if improvement <= config.tolerance {
            break;
        }
    }
    Ok(Run {
        labels: state.labels().to_vec(),
        objective: state.objective(),
        sweeps,
        trace,
    })
}

/// One full sweep; with an RNG the visit order is a fresh permutation,
/// without one each step greedily takes the best move over all unfrozen
/// nodes. Returns the objective improvement against the sweep start.
fn sweep(state: &mut BlockState, rng: Option<&mut ChaCha8Rng>) -> f64 {
    let n = state.labels().len();
    let k = state.n_blocks();
    let start = state.objective();
    if k < 2 || n == 0 {
        return 0.0;
    }

    // (node, previous block) per applied move, for the rewind
    let mut moves: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut best_objective = start;
    let mut best_len = 0usize;

    let record = |state: &BlockState, moves: &Vec<(usize, usize)>,
                      best_objective: &mut f64,
                      best_len: &mut usize| {
        if state.objective() > *best_objective {
            *best_objective = state.objective();
            *best_len = moves.len();
        }
    };

    match rng {
        Some(rng) => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            for node in order {
                let flows = state.node_flows(node);
                let from = state.labels()[node];
                let mut best_target = usize::MAX;
                let mut best_delta = f64::NEG_INFINITY;
                for target in 0..k {
                    if target == from {
                        continue;
                    }
                    let delta = state.delta_with_flows(node, target, &flows);
                    if delta > best_delta {
                        best_delta = delta;
                        best_target = target;
                    }
                }
                state.apply_move_with_flows(node, best_target, &flows);
                moves.push((node, from));
                record(state, &moves, &mut best_objective, &mut best_len);
            }
        }
        None => {
            let mut frozen = vec![false; n];
            for _ in 0..n {
                let mut chosen: Option<(usize, usize, f64)> = None;
                for (node, &node_frozen) in frozen.iter().enumerate() {
                    if node_frozen {
                        continue;
                    }
                    let flows = state.node_flows(node);
                    let from = state.labels()[node];
                    for target in 0..k {
                        if target == from {
                            continue;
                        }
                        let delta = state.delta_with_flows(node, target, &flows);
                        let better = match &chosen {
                            None => true,
                            Some((_, _, incumbent)) => delta > *incumbent,
                        };
                        if better {
                            chosen = Some((node, target, delta));
                        }
                    }
                }
                let Some((node, target, _)) = chosen else {
                    break;
                };
                let from = state.labels()[node];
                state.apply_move(node, target);
                frozen[node] = true;
                moves.push((node, from));
                record(state, &moves, &mut best_objective, &mut best_len);
            }
        }
    }

    while moves.len() > best_len {
        let (node, from) = moves.pop().expect("move stack");
        state.apply_move(node, from);
    }
    // the integer state now matches the recorded best exactly; pin the
    // objective to the recorded value to shed undo drift
    state.set_objective(best_objective);
    best_objective - start
}
