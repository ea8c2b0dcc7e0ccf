use serde::{Deserialize, Serialize};

/// What a fit did and how it ended.
///
/// `trace` holds the accepted objective value per iteration (gradient
/// fits) or per sweep (label fits) for the winning restart. The wall time
/// is informational and is the one field excluded from determinism
/// comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub final_loglik: f64,
    /// Profile objective for discrete fits; absent for mixed fits.
    pub final_objective: Option<f64>,
    /// Iterations (mixed) or sweeps (discrete) of the winning restart.
    pub iterations: usize,
    pub restarts_run: usize,
    pub best_restart_index: usize,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub stall_triggered: bool,
    pub trace: Vec<f64>,
}
