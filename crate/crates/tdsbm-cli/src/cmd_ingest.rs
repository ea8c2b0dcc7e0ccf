//! `tdsbm ingest`: trip CSVs in, cleaned hourly network out.

use crate::common;
use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use tdsbm::ingest::{build_network, clean_trips, parse_trips, CleaningPolicy, ColumnMap};
use tdsbm::io::save_network;
use tdsbm::Error;

#[derive(Args, Serialize, Deserialize, Default, Clone)]
pub struct IngestArgs {
    /// Trip CSV file; repeat for several
    #[arg(long = "input")]
    #[serde(default)]
    pub inputs: Option<Vec<PathBuf>>,
    /// Header override as field=Header, e.g. start_time=Start Time
    #[arg(long = "column-map")]
    #[serde(default)]
    pub column_map: Option<Vec<String>>,
    /// Keep trips strictly longer than this many minutes
    #[arg(long)]
    #[serde(default)]
    pub min_duration: Option<f64>,
    /// Keep trips strictly shorter than this many minutes
    #[arg(long)]
    #[serde(default)]
    pub max_duration: Option<f64>,
    /// IANA zone for local hours and weekday filtering
    #[arg(long)]
    #[serde(default)]
    pub tz: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub weekdays_only: Option<bool>,
    /// Station ids to drop, with their trips
    #[arg(long = "exclude-stations", value_delimiter = ',')]
    #[serde(default)]
    pub exclude_stations: Option<Vec<String>>,
    /// Layer count; 24 means one per hour
    #[arg(long)]
    #[serde(default)]
    pub layers: Option<usize>,
    /// Custom bucket starting hours, ascending from 0, e.g. 0,6,10,16,20
    #[arg(long = "layer-starts", value_delimiter = ',')]
    #[serde(default)]
    pub layer_starts: Option<Vec<u32>>,
    /// Output directory
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file supplying any of the above; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl IngestArgs {
    fn merged(self, file: IngestArgs) -> IngestArgs {
        IngestArgs {
            inputs: self.inputs.or(file.inputs),
            column_map: self.column_map.or(file.column_map),
            min_duration: self.min_duration.or(file.min_duration),
            max_duration: self.max_duration.or(file.max_duration),
            tz: self.tz.or(file.tz),
            weekdays_only: self.weekdays_only.or(file.weekdays_only),
            exclude_stations: self.exclude_stations.or(file.exclude_stations),
            layers: self.layers.or(file.layers),
            layer_starts: self.layer_starts.or(file.layer_starts),
            out: self.out.or(file.out),
            config: None,
        }
    }
}

fn column_pairs(specs: &[String]) -> Result<Vec<(String, String)>> {
    specs
        .iter()
        .map(|spec| {
            spec.split_once('=')
                .map(|(field, header)| (field.to_string(), header.to_string()))
                .ok_or_else(|| {
                    Error::Schema(format!("column map entry {spec:?} is not field=Header")).into()
                })
        })
        .collect()
}

pub fn run(mut args: IngestArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.merged(common::load_file_args(&path)?);
    }
    let defaults = CleaningPolicy::default();
    args.min_duration.get_or_insert(defaults.min_duration_minutes);
    args.max_duration.get_or_insert(defaults.max_duration_minutes);
    args.tz.get_or_insert_with(|| "UTC".to_string());
    args.weekdays_only.get_or_insert(true);
    args.exclude_stations.get_or_insert_with(Vec::new);
    args.layers.get_or_insert(24);
    args.column_map.get_or_insert_with(Vec::new);
    let inputs = common::require(args.inputs.clone(), "input")?;
    if inputs.is_empty() {
        return Err(Error::Config("no input files given".into()).into());
    }
    let out_dir = common::require(args.out.clone(), "out")?;

    let columns =
        ColumnMap::default().with_overrides(&column_pairs(args.column_map.as_ref().unwrap())?)?;
    let tz = common::parse_tz(args.tz.as_ref().unwrap())?;
    let policy = CleaningPolicy {
        min_duration_minutes: args.min_duration.unwrap(),
        max_duration_minutes: args.max_duration.unwrap(),
        excluded_stations: BTreeSet::from_iter(args.exclude_stations.clone().unwrap()),
        weekdays_only: args.weekdays_only.unwrap(),
        timezone: tz,
    };

    let mut trips = Vec::new();
    let mut bad_rows = 0usize;
    for path in &inputs {
        let reader = BufReader::new(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        );
        let (mut parsed, errors) = parse_trips(reader, &columns, tz)
            .with_context(|| format!("parsing {}", path.display()))?;
        bad_rows += errors.len();
        for error in errors.iter().take(5) {
            eprintln!("warning: {}: {error}", path.display());
        }
        if errors.len() > 5 {
            eprintln!("warning: {}: {} more bad rows", path.display(), errors.len() - 5);
        }
        trips.append(&mut parsed);
    }
    println!(
        "parsed {} trips from {} file(s), {} unparseable row(s)",
        trips.len(),
        inputs.len(),
        bad_rows
    );

    let (kept, report) = clean_trips(trips, &policy);
    let net = build_network(&kept, args.layers.unwrap(), args.layer_starts.as_deref())?;

    common::ensure_dir(&out_dir)?;
    let (edges, nodes) = save_network(&out_dir, "network", &net)?;
    common::write_json(&out_dir.join("cleaning-report.json"), &report)?;
    common::write_snapshot(&out_dir, "ingest", &args)?;

    println!(
        "kept {} of {} trips (removal fraction {:.4})",
        report.output_count, report.input_count, report.removal_fraction
    );
    println!(
        "network: {} stations, {} layers, {} trips",
        net.n_nodes(),
        net.n_layers(),
        net.total_trips()
    );
    println!("wrote {} and {}", edges.display(), nodes.display());
    Ok(())
}
