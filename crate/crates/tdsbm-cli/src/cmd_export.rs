//! `tdsbm export`: maps and plotting tables from a fitted model.

use crate::common;
use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use tdsbm::analysis::{label_blocks, ModelKind, RoleConfig};
use tdsbm::io::{
    geojson_discrete, geojson_mixed, load_network, read_model, roles_json,
    write_degree_diagnostics, write_hourly_totals, write_labels_csv, write_omega_csv,
    write_svd_profiles,
};
use tdsbm::Error;

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    /// Station map with block memberships and roles
    Geojson,
    /// Plotting tables: rates, labels, roles, network diagnostics
    Csv,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct ExportArgs {
    #[arg(long = "model-file")]
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    /// Network stem; required for geojson, optional extra diagnostics
    /// for csv
    #[arg(long)]
    #[serde(default)]
    pub network: Option<PathBuf>,
    /// Layer count of the network file
    #[arg(long)]
    #[serde(default)]
    pub layers: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub format: Option<ExportFormat>,
    /// Morning commute hours for role labeling
    #[arg(long = "morning-window", value_delimiter = ',')]
    #[serde(default)]
    pub morning_window: Option<Vec<usize>>,
    /// Evening commute hours for role labeling
    #[arg(long = "evening-window", value_delimiter = ',')]
    #[serde(default)]
    pub evening_window: Option<Vec<usize>>,
    /// Half-open hour range an internal peak must land in for park, as
    /// start,end
    #[arg(long = "park-hours", value_delimiter = ',')]
    #[serde(default)]
    pub park_hours: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(default)]
    pub park_dominance: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub balance_floor: Option<f64>,
    /// Output directory
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file supplying any of the above; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl ExportArgs {
    fn merged(self, file: ExportArgs) -> ExportArgs {
        ExportArgs {
            model_file: self.model_file.or(file.model_file),
            network: self.network.or(file.network),
            layers: self.layers.or(file.layers),
            format: self.format.or(file.format),
            morning_window: self.morning_window.or(file.morning_window),
            evening_window: self.evening_window.or(file.evening_window),
            park_hours: self.park_hours.or(file.park_hours),
            park_dominance: self.park_dominance.or(file.park_dominance),
            balance_floor: self.balance_floor.or(file.balance_floor),
            out: self.out.or(file.out),
            config: None,
        }
    }
}

pub fn run(mut args: ExportArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.merged(common::load_file_args(&path)?);
    }
    let role_defaults = RoleConfig::default();
    args.morning_window
        .get_or_insert_with(|| role_defaults.morning_window.clone());
    args.evening_window
        .get_or_insert_with(|| role_defaults.evening_window.clone());
    args.park_hours
        .get_or_insert_with(|| vec![role_defaults.park_hours.0, role_defaults.park_hours.1]);
    args.park_dominance.get_or_insert(role_defaults.park_dominance);
    args.balance_floor.get_or_insert(role_defaults.balance_floor);
    let model_path = common::require(args.model_file.clone(), "model-file")?;
    let format = common::require(args.format, "format")?;
    let out_dir = common::require(args.out.clone(), "out")?;

    let park = args.park_hours.as_ref().unwrap();
    if park.len() != 2 {
        return Err(Error::Config("--park-hours takes exactly start,end".into()).into());
    }
    let role_config = RoleConfig {
        morning_window: args.morning_window.clone().unwrap(),
        evening_window: args.evening_window.clone().unwrap(),
        park_hours: (park[0], park[1]),
        park_dominance: args.park_dominance.unwrap(),
        balance_floor: args.balance_floor.unwrap(),
    };

    let file = read_model(&model_path)?;
    let omega = match file.kind {
        ModelKind::Tdmm => file.to_mixed()?.omega,
        _ => file.to_discrete()?.omega,
    };
    let roles = label_blocks(&omega, &role_config)?;
    common::ensure_dir(&out_dir)?;

    let load_net = |layers: Option<usize>| -> Result<tdsbm::MultilayerNetwork> {
        let stem = common::require(args.network.clone(), "network")?;
        let (edges, nodes) = common::network_paths(&stem);
        Ok(load_network(&edges, &nodes, layers)?)
    };

    let mut written: Vec<PathBuf> = Vec::new();
    match format {
        ExportFormat::Geojson => {
            let layer_hint = match file.kind {
                ModelKind::Static => args.layers.or(Some(24)),
                _ => Some(file.t_layers),
            };
            let net = load_net(layer_hint)?;
            if net.node_ids() != file.node_ids {
                return Err(Error::Dimension(
                    "network stations differ from the model's".into(),
                )
                .into());
            }
            let doc = match file.kind {
                ModelKind::Tdmm => geojson_mixed(&net, &file.to_mixed()?, Some(&roles))?,
                _ => geojson_discrete(&net, &file.to_discrete()?, Some(&roles))?,
            };
            let path = out_dir.join("stations.geojson");
            common::write_json(&path, &doc)?;
            written.push(path);
        }
        ExportFormat::Csv => {
            let path = out_dir.join("omega.csv");
            write_omega_csv(BufWriter::new(File::create(&path)?), &omega)?;
            written.push(path);
            let path = out_dir.join("roles.json");
            common::write_json(&path, &roles_json(&roles))?;
            written.push(path);
            if file.kind != ModelKind::Tdmm {
                let path = out_dir.join("labels.csv");
                write_labels_csv(
                    BufWriter::new(File::create(&path)?),
                    &file.node_ids,
                    &file.to_discrete()?,
                )?;
                written.push(path);
            }
            if args.network.is_some() {
                let net = load_net(args.layers.or(Some(24)))?;
                let path = out_dir.join("hourly-totals.csv");
                write_hourly_totals(BufWriter::new(File::create(&path)?), &net)?;
                written.push(path);
                let path = out_dir.join("svd-profiles.csv");
                write_svd_profiles(BufWriter::new(File::create(&path)?), &net)?;
                written.push(path);
                let path = out_dir.join("degree-diagnostics.json");
                write_degree_diagnostics(BufWriter::new(File::create(&path)?), &net)?;
                written.push(path);
            }
        }
    }
    common::write_snapshot(&out_dir, "export", &args)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
