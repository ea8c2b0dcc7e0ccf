//! `tdsbm generate`: sample a synthetic network from a model file.

use crate::common;
use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use tdsbm::analysis::{sample_network, ModelKind};
use tdsbm::io::{read_model, save_network};
use tdsbm::net::NodeInfo;
use tdsbm::MultilayerNetwork;

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct GenerateArgs {
    #[arg(long = "model-file")]
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file supplying any of the above; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl GenerateArgs {
    fn merged(self, file: GenerateArgs) -> GenerateArgs {
        GenerateArgs {
            model_file: self.model_file.or(file.model_file),
            seed: self.seed.or(file.seed),
            out: self.out.or(file.out),
            config: None,
        }
    }
}

pub fn run(mut args: GenerateArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.merged(common::load_file_args(&path)?);
    }
    args.seed.get_or_insert(0);
    let model_path = common::require(args.model_file.clone(), "model-file")?;
    let out_dir = common::require(args.out.clone(), "out")?;
    let seed = args.seed.unwrap();

    let file = read_model(&model_path)?;
    let sampled = match file.kind {
        ModelKind::Tdmm => sample_network(&file.to_mixed()?, seed),
        ModelKind::Tdd | ModelKind::Static => sample_network(&file.to_discrete()?, seed),
    };
    // carry the model's station ids into the sampled registry
    let registry: Vec<NodeInfo> = file.node_ids.iter().map(NodeInfo::new).collect();
    let named = MultilayerNetwork::with_nodes(
        registry,
        sampled.n_layers(),
        sampled
            .entries()
            .iter()
            .map(|e| (e.from, e.to, e.layer, e.count)),
    )?;

    common::ensure_dir(&out_dir)?;
    let (edges, nodes) = save_network(&out_dir, "sample", &named)?;
    common::write_snapshot(&out_dir, "generate", &args)?;
    println!(
        "sampled {} trips across {} layers",
        named.total_trips(),
        named.n_layers()
    );
    println!("wrote {} and {}", edges.display(), nodes.display());
    Ok(())
}
