//! Heuristic role names for blocks from their hourly rate profiles.
//!
//! Commuter structure shows up as counterflow: one block sends trips to
//! another in the morning and receives them back in the evening. The
//! ordered pair with the strongest morning-out times evening-back product
//! names its blocks home and work. Leftover blocks get park when their
//! internal traffic peaks in the early afternoon and dwarfs their
//! external traffic, mixed when morning and evening activity roughly
//! balance, and other otherwise.

use crate::error::{Error, Result};
use ndarray::Array3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Home,
    Work,
    Park,
    Mixed,
    Other,
}

/// Windows and thresholds for the labeling heuristics. Hours outside the
/// model's layer range are ignored; a commute window that vanishes that
/// way falls back to all hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleConfig {
    pub morning_window: Vec<usize>,
    pub evening_window: Vec<usize>,
    /// Half-open hour range where a park-like block's internal traffic
    /// must peak.
    pub park_hours: (usize, usize),
    /// Internal mass must exceed this multiple of the largest external
    /// mass for park.
    pub park_dominance: f64,
    /// Minimum morning/evening mass ratio (smaller over larger) for
    /// mixed.
    pub balance_floor: f64,
}

impl Default for RoleConfig {
    fn default() -> Self {
        RoleConfig {
            morning_window: vec![6, 7, 8, 9],
            evening_window: vec![16, 17, 18, 19],
            park_hours: (12, 16),
            park_dominance: 2.0,
            balance_floor: 0.5,
        }
    }
}

/// Numbers behind a block's role, for eyeballing borderline calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleEvidence {
    /// Busiest morning-window hour by total in-plus-out rate.
    pub morning_peak_hour: usize,
    /// Busiest evening-window hour.
    pub evening_peak_hour: usize,
    pub morning_mass: f64,
    pub evening_mass: f64,
    /// Smaller commute-window mass over the larger; 1 when both are zero.
    pub balance: f64,
    pub intra_mass: f64,
    pub max_inter_mass: f64,
    /// Internal over largest external mass; absent when nothing leaves
    /// or enters the block.
    pub intra_dominance: Option<f64>,
    /// Set when no home-work pair dominates (counterflow symmetric or
    /// absent), so those roles were withheld.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleLabel {
    pub block: usize,
    pub role: Role,
    pub evidence: RoleEvidence,
}

fn window_mass(omega: &Array3<f64>, g: usize, h: usize, window: &[usize]) -> f64 {
    window.iter().map(|&t| omega[[g, h, t]]).sum()
}

/// Argmax hour of a per-hour profile over the given hours, lowest hour
/// on ties.
fn peak_hour(profile: &[f64], hours: &[usize]) -> usize {
    let mut best = hours[0];
    let mut best_value = profile[hours[0]];
    for &t in &hours[1..] {
        if profile[t] > best_value {
            best_value = profile[t];
            best = t;
        }
    }
    best
}

/// Names every block's role from the rate tensor alone.
pub fn label_blocks(omega: &Array3<f64>, config: &RoleConfig) -> Result<Vec<RoleLabel>> {
    let (k, k2, t_layers) = omega.dim();
    if k != k2 || k == 0 {
        return Err(Error::Dimension(format!(
            "rate tensor must be square over blocks, got {k}x{k2}"
        )));
    }
    if t_layers == 0 {
        return Err(Error::Dimension("rate tensor has no layers".into()));
    }

    let all_hours: Vec<usize> = (0..t_layers).collect();
    let clamp = |window: &[usize]| -> Vec<usize> {
        let kept: Vec<usize> = window.iter().copied().filter(|&t| t < t_layers).collect();
        if kept.is_empty() {
            all_hours.clone()
        } else {
            kept
        }
    };
    let morning = clamp(&config.morning_window);
    let evening = clamp(&config.evening_window);

    // commute-window masses per ordered block pair
    let mass_m: Vec<Vec<f64>> = (0..k)
        .map(|g| (0..k).map(|h| window_mass(omega, g, h, &morning)).collect())
        .collect();
    let mass_e: Vec<Vec<f64>> = (0..k)
        .map(|g| (0..k).map(|h| window_mass(omega, g, h, &evening)).collect())
        .collect();

    // strongest morning-out, evening-back pair
    let mut best_pair = None;
    let mut best_score = 0.0f64;
    for g in 0..k {
        for h in 0..k {
            if g == h {
                continue;
            }
            let score = mass_m[g][h] * mass_e[h][g];
            if score > best_score {
                best_score = score;
                best_pair = Some((g, h));
            }
        }
    }
    let degenerate = match best_pair {
        None => k >= 2,
        Some((g, h)) => {
            let reverse = mass_m[h][g] * mass_e[g][h];
            reverse >= best_score * (1.0 - 1e-9)
        }
    };
    let commuter_pair = if degenerate { None } else { best_pair };

    let mut labels = Vec::with_capacity(k);
    for g in 0..k {
        let activity: Vec<f64> = (0..t_layers)
            .map(|t| (0..k).map(|h| omega[[g, h, t]] + omega[[h, g, t]]).sum())
            .collect();
        let morning_mass: f64 = morning.iter().map(|&t| activity[t]).sum();
        let evening_mass: f64 = evening.iter().map(|&t| activity[t]).sum();
        let larger = morning_mass.max(evening_mass);
        let balance = if larger == 0.0 {
            1.0
        } else {
            morning_mass.min(evening_mass) / larger
        };
        let intra: Vec<f64> = (0..t_layers).map(|t| omega[[g, g, t]]).collect();
        let intra_mass: f64 = intra.iter().sum();
        let max_inter_mass = (0..k)
            .filter(|&h| h != g)
            .flat_map(|h| {
                let out: f64 = (0..t_layers).map(|t| omega[[g, h, t]]).sum();
                let inc: f64 = (0..t_layers).map(|t| omega[[h, g, t]]).sum();
                [out, inc]
            })
            .fold(0.0f64, f64::max);
        let intra_dominance = if max_inter_mass > 0.0 {
            Some(intra_mass / max_inter_mass)
        } else {
            None
        };

        let role = if k == 1 {
            Role::Other
        } else if commuter_pair.map(|(home, _)| home) == Some(g) {
            Role::Home
        } else if commuter_pair.map(|(_, work)| work) == Some(g) {
            Role::Work
        } else {
            let intra_peak = peak_hour(&intra, &all_hours);
            let peaks_in_park_hours =
                intra_peak >= config.park_hours.0 && intra_peak < config.park_hours.1;
            let dominates = intra_mass > 0.0 && intra_mass >= config.park_dominance * max_inter_mass;
            if peaks_in_park_hours && dominates {
                Role::Park
            } else if larger > 0.0 && balance >= config.balance_floor {
                Role::Mixed
            } else {
                Role::Other
            }
        };

        labels.push(RoleLabel {
            block: g,
            role,
            evidence: RoleEvidence {
                morning_peak_hour: peak_hour(&activity, &morning),
                evening_peak_hour: peak_hour(&activity, &evening),
                morning_mass,
                evening_mass,
                balance,
                intra_mass,
                max_inter_mass,
                intra_dominance,
                degenerate,
            },
        });
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commuter_omega() -> Array3<f64> {
        let mut omega = Array3::from_elem((2, 2, 24), 0.01);
        omega[[0, 1, 8]] = 100.0;
        omega[[1, 0, 17]] = 90.0;
        omega
    }

    #[test]
    fn counterflow_names_home_and_work() {
        let labels = label_blocks(&commuter_omega(), &RoleConfig::default()).unwrap();
        assert_eq!(labels[0].role, Role::Home);
        assert_eq!(labels[1].role, Role::Work);
        assert_eq!(labels[0].evidence.morning_peak_hour, 8);
        assert_eq!(labels[0].evidence.evening_peak_hour, 17);
        assert!(!labels[0].evidence.degenerate);
    }

    #[test]
    fn symmetric_flat_rates_withhold_commuter_roles() {
        let omega = Array3::from_elem((3, 3, 24), 2.0);
        let labels = label_blocks(&omega, &RoleConfig::default()).unwrap();
        for label in &labels {
            assert!(
                matches!(label.role, Role::Mixed | Role::Other),
                "block {} got {:?}",
                label.block,
                label.role
            );
            assert!(label.evidence.degenerate);
        }
    }

    #[test]
    fn afternoon_peaked_introvert_block_is_a_park() {
        let mut omega = Array3::from_elem((3, 3, 24), 0.01);
        omega[[0, 1, 8]] = 100.0;
        omega[[1, 0, 17]] = 90.0;
        omega[[2, 2, 14]] = 50.0;
        omega[[2, 2, 13]] = 30.0;
        let labels = label_blocks(&omega, &RoleConfig::default()).unwrap();
        assert_eq!(labels[0].role, Role::Home);
        assert_eq!(labels[1].role, Role::Work);
        assert_eq!(labels[2].role, Role::Park);
        let ev = &labels[2].evidence;
        assert!(ev.intra_dominance.unwrap() >= 2.0);
    }

    #[test]
    fn roles_follow_blocks_under_relabeling() {
        let mut omega = Array3::from_elem((3, 3, 24), 0.01);
        omega[[0, 1, 8]] = 100.0;
        omega[[1, 0, 17]] = 90.0;
        omega[[2, 2, 14]] = 50.0;
        // swap block ids 0 and 2
        let perm = [2usize, 1, 0];
        let mut swapped = Array3::zeros((3, 3, 24));
        for g in 0..3 {
            for h in 0..3 {
                for t in 0..24 {
                    swapped[[perm[g], perm[h], t]] = omega[[g, h, t]];
                }
            }
        }
        let base = label_blocks(&omega, &RoleConfig::default()).unwrap();
        let moved = label_blocks(&swapped, &RoleConfig::default()).unwrap();
        for g in 0..3 {
            assert_eq!(base[g].role, moved[perm[g]].role);
        }
    }

    #[test]
    fn single_block_is_other() {
        let omega = Array3::from_elem((1, 1, 24), 5.0);
        let labels = label_blocks(&omega, &RoleConfig::default()).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!(labels[0].role, Role::Other);
    }

    #[test]
    fn short_days_clamp_the_windows() {
        let mut omega = Array3::from_elem((2, 2, 4), 0.1);
        omega[[0, 1, 1]] = 5.0;
        omega[[1, 0, 3]] = 4.0;
        let labels = label_blocks(&omega, &RoleConfig::default()).unwrap();
        for label in &labels {
            assert!(label.evidence.morning_peak_hour < 4);
            assert!(label.evidence.evening_peak_hour < 4);
        }
    }

    #[test]
    fn bad_tensors_rejected() {
        assert!(label_blocks(&Array3::zeros((2, 3, 4)), &RoleConfig::default()).is_err());
        assert!(label_blocks(&Array3::zeros((2, 2, 0)), &RoleConfig::default()).is_err());
        assert!(label_blocks(&Array3::zeros((0, 0, 4)), &RoleConfig::default()).is_err());
    }
}
