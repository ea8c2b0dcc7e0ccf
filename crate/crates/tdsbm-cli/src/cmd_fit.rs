//! `tdsbm fit`: network in, fitted model file out.

use crate::common;
use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use tdsbm::analysis::ModelKind;
use tdsbm::io::{load_network, write_model, write_omega_csv, ModelFile};
use tdsbm::tdd::{fit_discrete, fit_static, KlConfig, NodeOrder};
use tdsbm::tdmm::{fit, GdConfig};

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    /// Mixed membership, gradient ascent
    Tdmm,
    /// Discrete membership, label sweeps
    Tdd,
    /// Discrete membership on the layer-aggregated network
    Static,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderChoice {
    /// Best move over all unfrozen nodes each step
    Greedy,
    /// Fresh random node permutation each sweep
    Random,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct FitArgs {
    /// Network stem (expects <stem>.edges.csv and <stem>.nodes.csv)
    #[arg(long)]
    #[serde(default)]
    pub network: Option<PathBuf>,
    /// Layer count of the network file
    #[arg(long)]
    #[serde(default)]
    pub layers: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub model: Option<ModelChoice>,
    /// Number of blocks K
    #[arg(long)]
    #[serde(default)]
    pub blocks: Option<usize>,
    /// Gradient-ascent restarts (tdmm)
    #[arg(long)]
    #[serde(default)]
    pub restarts: Option<usize>,
    /// Independent sweep runs (tdd, static)
    #[arg(long)]
    #[serde(default)]
    pub runs: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Stop a sweep run when it improves by no more than this
    #[arg(long)]
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Iteration cap per restart (tdmm)
    #[arg(long)]
    #[serde(default)]
    pub max_iters: Option<usize>,
    /// Stall window in iterations, 0 disables (tdmm)
    #[arg(long)]
    #[serde(default)]
    pub stall_window: Option<usize>,
    /// Starting step size (tdmm)
    #[arg(long)]
    #[serde(default)]
    pub initial_step: Option<f64>,
    /// Sweep order for label moves (tdd, static)
    #[arg(long, value_enum)]
    #[serde(default)]
    pub node_order: Option<OrderChoice>,
    /// Output directory
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file supplying any of the above; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl FitArgs {
    fn merged(self, file: FitArgs) -> FitArgs {
        FitArgs {
            network: self.network.or(file.network),
            layers: self.layers.or(file.layers),
            model: self.model.or(file.model),
            blocks: self.blocks.or(file.blocks),
            restarts: self.restarts.or(file.restarts),
            runs: self.runs.or(file.runs),
            seed: self.seed.or(file.seed),
            tolerance: self.tolerance.or(file.tolerance),
            max_iters: self.max_iters.or(file.max_iters),
            stall_window: self.stall_window.or(file.stall_window),
            initial_step: self.initial_step.or(file.initial_step),
            node_order: self.node_order.or(file.node_order),
            out: self.out.or(file.out),
            config: None,
        }
    }
}

pub fn run(mut args: FitArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.merged(common::load_file_args(&path)?);
    }
    let gd_defaults = GdConfig::default();
    let kl_defaults = KlConfig::default();
    args.layers.get_or_insert(24);
    args.seed.get_or_insert(0);
    args.restarts.get_or_insert(gd_defaults.restarts);
    args.runs.get_or_insert(kl_defaults.runs);
    args.tolerance.get_or_insert(kl_defaults.tolerance);
    args.max_iters.get_or_insert(gd_defaults.max_iters);
    args.stall_window.get_or_insert(gd_defaults.stall_window);
    args.initial_step.get_or_insert(gd_defaults.initial_step);
    args.node_order.get_or_insert(OrderChoice::Greedy);
    let network = common::require(args.network.clone(), "network")?;
    let model_choice = common::require(args.model, "model")?;
    let k = common::require(args.blocks, "blocks")?;
    let out_dir = common::require(args.out.clone(), "out")?;
    let seed = args.seed.unwrap();

    let (edges, nodes) = common::network_paths(&network);
    let net = load_network(&edges, &nodes, args.layers)?;
    common::ensure_dir(&out_dir)?;

    let (model_file, report) = match model_choice {
        ModelChoice::Tdmm => {
            let config = GdConfig {
                initial_step: args.initial_step.unwrap(),
                stall_window: args.stall_window.unwrap(),
                max_iters: args.max_iters.unwrap(),
                restarts: args.restarts.unwrap(),
                seed,
                ..gd_defaults
            };
            let (model, report) = fit(&net, k, &config)?;
            println!(
                "tdmm K={k}: loglik {:.6} after {} iterations (best restart {})",
                report.final_loglik, report.iterations, report.best_restart_index
            );
            let file = ModelFile::from_mixed(
                &model,
                net.node_ids(),
                report.final_loglik,
                seed,
                serde_json::to_value(&config)?,
            );
            write_omega_csv(
                BufWriter::new(File::create(out_dir.join("omega.csv"))?),
                &model.omega,
            )?;
            (file, report)
        }
        ModelChoice::Tdd | ModelChoice::Static => {
            let config = KlConfig {
                runs: args.runs.unwrap(),
                tolerance: args.tolerance.unwrap(),
                node_order: match args.node_order.unwrap() {
                    OrderChoice::Greedy => NodeOrder::Greedy,
                    OrderChoice::Random => NodeOrder::RandomPerSweep,
                },
                seed,
                parallel: true,
            };
            let kind = if model_choice == ModelChoice::Static {
                ModelKind::Static
            } else {
                ModelKind::Tdd
            };
            let (model, report) = if kind == ModelKind::Static {
                fit_static(&net, k, &config)?
            } else {
                fit_discrete(&net, k, &config)?
            };
            let objective = report.final_objective.expect("discrete fit has an objective");
            println!(
                "{kind} K={k}: loglik {:.6}, objective {:.6} after {} sweeps (best run {})",
                report.final_loglik, objective, report.iterations, report.best_restart_index
            );
            let file = ModelFile::from_discrete(
                kind,
                &model,
                net.node_ids(),
                report.final_loglik,
                objective,
                seed,
                serde_json::to_value(&config)?,
            );
            write_omega_csv(
                BufWriter::new(File::create(out_dir.join("omega.csv"))?),
                &model.omega,
            )?;
            (file, report)
        }
    };

    write_model(&out_dir.join("model.json"), &model_file)?;
    common::write_json(&out_dir.join("fit-report.json"), &report)?;
    common::write_snapshot(&out_dir, "fit", &args)?;
    println!("wrote {}", out_dir.join("model.json").display());
    Ok(())
}
