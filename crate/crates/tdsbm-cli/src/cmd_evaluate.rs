//! `tdsbm evaluate`: score a model file against a network.

use crate::common;
use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use tdsbm::analysis::{
    adjusted_rand_index, aic, degree_identity_residual, param_count, ModelKind,
};
use tdsbm::io::{load_network, read_model};
use tdsbm::tdd::{log_likelihood_discrete, profile_objective};
use tdsbm::{Error, MultilayerNetwork};

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct EvaluateArgs {
    /// Network stem (expects <stem>.edges.csv and <stem>.nodes.csv)
    #[arg(long)]
    #[serde(default)]
    pub network: Option<PathBuf>,
    /// Layer count of the network file (static models only; others use
    /// the model's)
    #[arg(long)]
    #[serde(default)]
    pub layers: Option<usize>,
    #[arg(long = "model-file")]
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    /// CSV with station_id and block columns holding planted labels
    #[arg(long = "labels-truth")]
    #[serde(default)]
    pub labels_truth: Option<PathBuf>,
    /// Optional directory for evaluation.json
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file supplying any of the above; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl EvaluateArgs {
    fn merged(self, file: EvaluateArgs) -> EvaluateArgs {
        EvaluateArgs {
            network: self.network.or(file.network),
            layers: self.layers.or(file.layers),
            model_file: self.model_file.or(file.model_file),
            labels_truth: self.labels_truth.or(file.labels_truth),
            out: self.out.or(file.out),
            config: None,
        }
    }
}

#[derive(Serialize)]
struct Evaluation {
    kind: ModelKind,
    n_nodes: usize,
    k: usize,
    t_layers: usize,
    loglik: f64,
    n_params: usize,
    aic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree_identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ari: Option<f64>,
}

/// Reads planted labels and aligns them to the network's node order.
fn truth_labels(path: &Path, net: &MultilayerNetwork) -> Result<Vec<usize>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers().map_err(Error::Csv)?.clone();
    let position = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("{} lacks a {name} column", path.display())))
    };
    let id_at = position("station_id")?;
    let block_at = position("block")?;
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(Error::Csv)?;
        let id = record
            .get(id_at)
            .ok_or_else(|| Error::Schema("short row in labels file".into()))?;
        let block: usize = record
            .get(block_at)
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::Schema(format!("bad block for station {id:?}")))?;
        by_id.insert(id.to_string(), block);
    }
    net.node_ids()
        .iter()
        .map(|id| {
            by_id.get(id).copied().ok_or_else(|| {
                Error::Dimension(format!("labels file misses station {id:?}")).into()
            })
        })
        .collect()
}

pub fn run(mut args: EvaluateArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.merged(common::load_file_args(&path)?);
    }
    args.layers.get_or_insert(24);
    let network = common::require(args.network.clone(), "network")?;
    let model_path = common::require(args.model_file.clone(), "model-file")?;

    let file = read_model(&model_path)?;
    let (edges, nodes) = common::network_paths(&network);
    let net = match file.kind {
        ModelKind::Static => load_network(&edges, &nodes, args.layers)?.aggregate(),
        _ => load_network(&edges, &nodes, Some(file.t_layers))?,
    };
    if net.node_ids() != file.node_ids {
        return Err(Error::Dimension(
            "network stations differ from the model's".into(),
        )
        .into());
    }

    let (loglik, objective, residual, fitted_labels) = match file.kind {
        ModelKind::Tdmm => {
            let model = file.to_mixed()?;
            let loglik = model.log_likelihood(&net)?;
            // hard labels for optional ARI: strongest membership wins
            let labels: Vec<usize> = (0..model.n_nodes())
                .map(|i| {
                    (0..model.n_blocks())
                        .max_by(|&a, &b| {
                            model.c[[i, a]].partial_cmp(&model.c[[i, b]]).expect("finite")
                        })
                        .unwrap_or(0)
                })
                .collect();
            (loglik, None, None, labels)
        }
        ModelKind::Tdd | ModelKind::Static => {
            let model = file.to_discrete()?;
            let loglik = log_likelihood_discrete(&net, &model)?;
            let objective = profile_objective(&net, &model.labels, file.k)?;
            let residual = degree_identity_residual(&net, &model.labels)?;
            (loglik, Some(objective), Some(residual), model.labels)
        }
    };
    let n_params = param_count(file.kind, file.n_nodes, file.k, file.t_layers)?;
    let ari = match &args.labels_truth {
        Some(path) => Some(adjusted_rand_index(
            &fitted_labels,
            &truth_labels(path, &net)?,
        )?),
        None => None,
    };

    let evaluation = Evaluation {
        kind: file.kind,
        n_nodes: file.n_nodes,
        k: file.k,
        t_layers: file.t_layers,
        loglik,
        n_params,
        aic: aic(n_params, loglik),
        objective,
        degree_identity_residual: residual,
        ari,
    };

    println!("kind: {}", evaluation.kind);
    println!(
        "nodes: {}  blocks: {}  layers: {}",
        evaluation.n_nodes, evaluation.k, evaluation.t_layers
    );
    println!("loglik: {:.6}", evaluation.loglik);
    println!("params: {}", evaluation.n_params);
    println!("aic: {:.6}", evaluation.aic);
    if let Some(objective) = evaluation.objective {
        println!("objective: {objective:.6}");
    }
    if let Some(residual) = evaluation.degree_identity_residual {
        println!("degree identity residual: {residual:.3e}");
    }
    if let Some(ari) = evaluation.ari {
        println!("ari vs truth: {ari:.4}");
    }

    if let Some(out_dir) = &args.out {
        common::ensure_dir(out_dir)?;
        common::write_json(&out_dir.join("evaluation.json"), &evaluation)?;
        common::write_snapshot(out_dir, "evaluate", &args)?;
    }
    Ok(())
}
