//! Adaptive two-step multiplicative gradient ascent.
//!
//! Each iteration updates omega first, then C against the already-updated
//! omega. A half-step tries two candidate step sizes, the current size
//! grown by one factor and shrunk by another, evaluates the likelihood at
//! both, and keeps the better one (the less bad one if both lose ground);
//! the kept size carries over as that parameter group's current step.
//! Multiplicative exponential updates keep every parameter positive.
//!
//! A run stops when the likelihood, rounded to a fixed number of
//! significant digits, has not moved for a whole window of iterations, or
//! at the iteration cap. Several random restarts run independently, each
//! on its own derived RNG stream, and the best final likelihood wins.

use super::{init_params, MixedModel};
use crate::error::{Error, Result};
use crate::net::MultilayerNetwork;
use crate::report::FitReport;
use crate::seed::unit_rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Tuning knobs for the gradient fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GdConfig {
    /// Starting step size for both parameter groups.
    pub initial_step: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    /// Iterations the rounded likelihood must sit still before stopping;
    /// zero disables the stall rule.
    pub stall_window: usize,
    /// Significant decimal digits used by the stall comparison.
    pub stall_digits: usize,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Run restarts on the rayon pool; results are identical either way.
    pub parallel: bool,
}

impl Default for GdConfig {
    fn default() -> Self {
        GdConfig {
            initial_step: 1e-4,
            step_grow: 1.2,
            step_shrink: 0.8,
            stall_window: 600,
            stall_digits: 4,
            max_iters: 20_000,
            restarts: 10,
            seed: 0,
            parallel: true,
        }
    }
}

struct Restart {
    model: MixedModel,
    loglik: f64,
    iterations: usize,
    stalled: bool,
    trace: Vec<f64>,
}

/// Fits a mixed-membership model with `k` blocks.
///
/// The returned model is normalized (unit column sums on C). A restart
/// whose likelihood turns non-finite is dropped; only if every restart
/// drops does the fit fail.
pub fn fit(
    net: &MultilayerNetwork,
    k: usize,
    config: &GdConfig,
) -> Result<(MixedModel, FitReport)> {
    if k == 0 {
        return Err(Error::Dimension("need at least one block".into()));
    }
    if config.restarts == 0 {
        return Err(Error::Config("need at least one restart".into()));
    }
    let started = Instant::now();
    let outcomes: Vec<Option<Restart>> = if config.parallel && config.restarts > 1 {
        (0..config.restarts)
            .into_par_iter()
            .map(|r| run_restart(net, k, config, r))
            .collect()
    } else {
        (0..config.restarts)
            .map(|r| run_restart(net, k, config, r))
            .collect()
    };

    let mut best: Option<(usize, Restart)> = None;
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let Some(run) = outcome else {
            continue;
        };
        let replace = match &best {
            None => true,
            Some((_, incumbent)) => run.loglik > incumbent.loglik,
        };
        if replace {
            best = Some((index, run));
        }
    }
    let Some((best_index, run)) = best else {
        return Err(Error::NoValidRestart);
    };

    let mut model = run.model;
    model.normalize();
    let report = FitReport {
        final_loglik: run.loglik,
        final_objective: None,
        iterations: run.iterations,
        restarts_run: config.restarts,
        best_restart_index: best_index,
        seed: config.seed,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        stall_triggered: run.stalled,
        trace: run.trace,
    };
    Ok((model, report))
}

fn run_restart(
    net: &MultilayerNetwork,
    k: usize,
    config: &GdConfig,
    restart: usize,
) -> Option<Restart> {
    let mut rng = unit_rng(config.seed, restart as u64);
    let mut model = init_params(net, k, &mut rng);
    let mut loglik = match model.log_likelihood(net) {
        Ok(v) if v.is_finite() => v,
        _ => return None,
    };
    let mut step_omega = config.initial_step;
    let mut step_c = config.initial_step;
    let mut trace = Vec::new();
    let mut streak = 0usize;
    let mut last_key = stall_key(loglik, config.stall_digits);
    let mut stalled = false;
    let mut iterations = 0usize;

    for _ in 0..config.max_iters {
        iterations += 1;

        // omega half-step at the current C
        let (_, grad_omega) = model.gradient(net).ok()?;
        let omega_try = |step: f64| {
            let mut omega = model.omega.clone();
            omega.zip_mut_with(&grad_omega, |w, &g| *w *= (step * g * *w).exp());
            let cand = MixedModel {
                c: model.c.clone(),
                omega,
            };
            let ll = eval(&cand, net);
            (cand, ll)
        };
        let grown = omega_try(step_omega * config.step_grow);
        let shrunk = omega_try(step_omega * config.step_shrink);
        let (cand, ll, chosen_step) =
            choose(grown, shrunk, step_omega, config.step_grow, config.step_shrink)?;
        model = cand;
        step_omega = chosen_step;
        let _ = ll;

        // C half-step against the updated omega
        let (grad_c, _) = model.gradient(net).ok()?;
        let c_try = |step: f64| {
            let mut c = model.c.clone();
            c.zip_mut_with(&grad_c, |x, &g| *x *= (step * g * *x).exp());
            let cand = MixedModel {
                c,
                omega: model.omega.clone(),
            };
            let ll = eval(&cand, net);
            (cand, ll)
        };
        let grown = c_try(step_c * config.step_grow);
        let shrunk = c_try(step_c * config.step_shrink);
        let (cand, ll, chosen_step) =
            choose(grown, shrunk, step_c, config.step_grow, config.step_shrink)?;
        model = cand;
        step_c = chosen_step;
        loglik = ll;
        trace.push(loglik);

        if config.stall_window > 0 {
            let key = stall_key(loglik, config.stall_digits);
            if key == last_key {
                streak += 1;
                if streak >= config.stall_window {
                    stalled = true;
                    break;
                }
            } else {
                streak = 0;
                last_key = key;
            }
        }
    }

    Some(Restart {
        model,
        loglik,
        iterations,
        stalled,
        trace,
    })
}

/// Likelihood with failure folded to negative infinity so candidate
/// ranking can stay purely numeric.
fn eval(model: &MixedModel, net: &MultilayerNetwork) -> f64 {
    match model.log_likelihood(net) {
        Ok(v) if !v.is_nan() => v,
        _ => f64::NEG_INFINITY,
    }
}

/// Keeps the better of the grown and shrunk candidates (grown on a tie)
/// and reports the surviving step size. Both non-finite aborts the run.
fn choose(
    grown: (MixedModel, f64),
    shrunk: (MixedModel, f64),
    step: f64,
    grow: f64,
    shrink: f64,
) -> Option<(MixedModel, f64, f64)> {
    if !grown.1.is_finite() && !shrunk.1.is_finite() {
        return None;
    }
    if grown.1 >= shrunk.1 {
        Some((grown.0, grown.1, step * grow))
    } else {
        Some((shrunk.0, shrunk.1, step * shrink))
    }
}

/// Likelihood rounded to `digits` significant decimal digits, as text.
fn stall_key(value: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), value)
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_net;
    use super::*;
    use crate::seed::unit_rng;
    use approx::assert_relative_eq;

    fn quick_config() -> GdConfig {
        GdConfig {
            max_iters: 4000,
            restarts: 2,
            seed: 5,
            ..GdConfig::default()
        }
    }

    #[test]
    fn one_block_fit_reaches_the_closed_form_optimum() {
        let net = random_net(6, 3, &mut unit_rng(21, 0));
        let (model, report) = fit(&net, 1, &quick_config()).unwrap();

        // closed form for one block: theta_i = k_i / (2 m), omega_t = m_t
        let summary = net.degree_summary();
        let m_total = summary.total_trips as f64;
        let hourly = net.hourly_totals();
        let mut best = -m_total;
        for &k_i in &summary.k {
            if k_i > 0 {
                let k_i = k_i as f64;
                best += k_i * (k_i / (2.0 * m_total)).ln();
            }
        }
        for &m_t in &hourly {
            if m_t > 0 {
                best += (m_t as f64) * (m_t as f64).ln();
            }
        }

        assert!(
            report.final_loglik <= best + 1e-6,
            "fit {} exceeded the K=1 optimum {}",
            report.final_loglik,
            best
        );
        assert_relative_eq!(report.final_loglik, best, max_relative = 1e-4);

        // fitted expected totals track observed hourly totals within 1%
        let s = model.c_totals();
        for (t, &observed) in hourly.iter().enumerate() {
            let mut expect = 0.0;
            for g in 0..1 {
                for h in 0..1 {
                    expect += s[g] * model.omega[[g, h, t]] * s[h];
                }
            }
            let observed = observed as f64;
            assert!(
                (expect - observed).abs() <= 0.01 * observed.max(1.0),
                "layer {t}: expected {expect}, observed {observed}"
            );
        }
    }

    #[test]
    fn choose_keeps_the_better_candidate() {
        let model = || MixedModel {
            c: ndarray::array![[1.0]],
            omega: ndarray::Array3::from_shape_vec((1, 1, 1), vec![1.0]).unwrap(),
        };
        // better grown candidate wins and grows the step
        let (_, ll, step) = choose((model(), -1.0), (model(), -2.0), 0.1, 1.2, 0.8).unwrap();
        assert_eq!((ll, step), (-1.0, 0.1 * 1.2));
        // better shrunk candidate wins and shrinks the step
        let (_, ll, step) = choose((model(), -3.0), (model(), -2.5), 0.1, 1.2, 0.8).unwrap();
        assert_eq!((ll, step), (-2.5, 0.1 * 0.8));
        // exact tie prefers the grown step
        let (_, _, step) = choose((model(), -1.0), (model(), -1.0), 0.1, 1.2, 0.8).unwrap();
        assert_eq!(step, 0.1 * 1.2);
        // both candidates lower than anything still yields the less bad one
        let (_, ll, _) = choose((model(), -9.0), (model(), -7.0), 0.1, 1.2, 0.8).unwrap();
        assert_eq!(ll, -7.0);
        // both non-finite aborts the restart
        assert!(choose(
            (model(), f64::NEG_INFINITY),
            (model(), f64::NAN),
            0.1,
            1.2,
            0.8
        )
        .is_none());
    }

    #[test]
    fn trace_climbs_with_only_transient_dips() {
        // Both candidate steps can lose likelihood at once, so the trace is
        // not strictly monotone; dips must stay rare and small next to the
        // overall ascent, and the run must end near its own high-water mark.
        let net = random_net(5, 2, &mut unit_rng(22, 0));
        let (_, report) = fit(&net, 2, &quick_config()).unwrap();
        assert_eq!(report.trace.len(), report.iterations);
        let first = report.trace[0];
        let last = *report.trace.last().unwrap();
        assert!(last > first, "no net progress: {first} -> {last}");
        let mut dips = 0usize;
        let mut dip_total = 0.0;
        for pair in report.trace.windows(2) {
            if pair[1] < pair[0] {
                dips += 1;
                dip_total += pair[0] - pair[1];
            }
        }
        let climbed = last - first;
        assert!(
            dips * 20 <= report.trace.len(),
            "{dips} dips in {} iterations",
            report.trace.len()
        );
        assert!(
            dip_total <= 0.05 * climbed,
            "dips lost {dip_total} against a climb of {climbed}"
        );
        let peak = report.trace.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(peak - last <= 1e-3 * last.abs().max(1.0));
    }

    #[test]
    fn fit_is_deterministic_across_parallelism() {
        let net = random_net(5, 2, &mut unit_rng(23, 0));
        let mut serial_cfg = quick_config();
        serial_cfg.max_iters = 800;
        serial_cfg.parallel = false;
        let mut parallel_cfg = serial_cfg.clone();
        parallel_cfg.parallel = true;

        let (model_a, report_a) = fit(&net, 2, &serial_cfg).unwrap();
        let (model_b, report_b) = fit(&net, 2, &parallel_cfg).unwrap();
        let (model_c, report_c) = fit(&net, 2, &parallel_cfg).unwrap();
        assert_eq!(model_a, model_b);
        assert_eq!(model_b, model_c);
        assert_eq!(report_a.final_loglik.to_bits(), report_b.final_loglik.to_bits());
        assert_eq!(report_b.trace, report_c.trace);
        assert_eq!(report_a.best_restart_index, report_b.best_restart_index);
    }

    #[test]
    fn stall_rule_stops_early() {
        let net = random_net(4, 2, &mut unit_rng(24, 0));
        let cfg = GdConfig {
            max_iters: 20_000,
            stall_window: 100,
            restarts: 1,
            seed: 9,
            ..GdConfig::default()
        };
        let (_, report) = fit(&net, 1, &cfg).unwrap();
        assert!(report.stall_triggered);
        assert!(report.iterations < 20_000);
    }

    #[test]
    fn rejects_degenerate_requests() {
        let net = random_net(4, 2, &mut unit_rng(25, 0));
        assert!(fit(&net, 0, &quick_config()).is_err());
        let cfg = GdConfig {
            restarts: 0,
            ..GdConfig::default()
        };
        assert!(fit(&net, 2, &cfg).is_err());
    }
}
