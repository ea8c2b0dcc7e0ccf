//! Flat export tables for plotting and inspection.

use crate::analysis::{RoleLabel, SelectionRow};
use crate::error::{Error, Result};
use crate::net::{top2_svd, Direction, MultilayerNetwork};
use crate::tdd::DiscreteModel;
use ndarray::Array3;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

/// Rate tensor as (g, h, t, value) rows, one per cell.
pub fn write_omega_csv<W: Write>(writer: W, omega: &Array3<f64>) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["g", "h", "t", "value"])?;
    let (k, _, t_layers) = omega.dim();
    for g in 0..k {
        for h in 0..k {
            for t in 0..t_layers {
                csv.write_record([
                    g.to_string(),
                    h.to_string(),
                    t.to_string(),
                    omega[[g, h, t]].to_string(),
                ])?;
            }
        }
    }
    csv.flush().map_err(Error::Io)
}

/// Discrete membership as (station_id, block, theta) rows.
pub fn write_labels_csv<W: Write>(
    writer: W,
    node_ids: &[String],
    model: &DiscreteModel,
) -> Result<()> {
    if node_ids.len() != model.labels.len() {
        return Err(Error::Dimension(format!(
            "{} ids for {} labeled nodes",
            node_ids.len(),
            model.labels.len()
        )));
    }
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["station_id", "block", "theta"])?;
    for (i, id) in node_ids.iter().enumerate() {
        csv.write_record([
            id.clone(),
            model.labels[i].to_string(),
            model.theta[i].to_string(),
        ])?;
    }
    csv.flush().map_err(Error::Io)
}

pub fn write_selection_csv<W: Write>(writer: W, rows: &[SelectionRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush().map_err(Error::Io)
}

/// Selection table as aligned text, one model per line, best AIC first.
pub fn render_selection_table(rows: &[SelectionRow]) -> String {
    let mut out = String::from("kind     K  params  loglik           AIC\n");
    for row in rows {
        out.push_str(&format!(
            "{:<7} {:>2}  {:>6}  {:>15.3}  {:>15.3}\n",
            row.kind.to_string(),
            row.k,
            row.n_params,
            row.loglik,
            row.aic
        ));
    }
    out
}

/// Trips per layer as (hour, total) rows.
pub fn write_hourly_totals<W: Write>(writer: W, net: &MultilayerNetwork) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["hour", "total"])?;
    for (hour, total) in net.hourly_totals().iter().enumerate() {
        csv.write_record([hour.to_string(), total.to_string()])?;
    }
    csv.flush().map_err(Error::Io)
}

/// Temporal profiles of the top two singular components per direction:
/// (hour, departures_1, departures_2, arrivals_1, arrivals_2).
pub fn write_svd_profiles<W: Write>(writer: W, net: &MultilayerNetwork) -> Result<()> {
    let out = top2_svd(&net.degree_hour_matrix(Direction::Out));
    let inc = top2_svd(&net.degree_hour_matrix(Direction::In));
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record([
        "hour",
        "departures_1",
        "departures_2",
        "arrivals_1",
        "arrivals_2",
    ])?;
    for t in 0..net.n_layers() {
        csv.write_record([
            t.to_string(),
            out.right[0][t].to_string(),
            out.right[1][t].to_string(),
            inc.right[0][t].to_string(),
            inc.right[1][t].to_string(),
        ])?;
    }
    csv.flush().map_err(Error::Io)
}

#[derive(Serialize)]
struct SvdSummary {
    singular_values: [f64; 2],
    explained: [f64; 2],
}

#[derive(Serialize)]
struct DegreeDiagnostics {
    in_out_degree_correlation: f64,
    departures: SvdSummary,
    arrivals: SvdSummary,
}

/// Scalar degree diagnostics as a small JSON document: in/out degree
/// correlation and the two-component SVD summaries per direction.
pub fn write_degree_diagnostics<W: Write>(writer: W, net: &MultilayerNetwork) -> Result<()> {
    let out = top2_svd(&net.degree_hour_matrix(Direction::Out));
    let inc = top2_svd(&net.degree_hour_matrix(Direction::In));
    let doc = DegreeDiagnostics {
        in_out_degree_correlation: net.in_out_degree_correlation(),
        departures: SvdSummary {
            singular_values: out.singular_values,
            explained: out.explained,
        },
        arrivals: SvdSummary {
            singular_values: inc.singular_values,
            explained: inc.explained,
        },
    };
    serde_json::to_writer_pretty(writer, &doc)?;
    Ok(())
}

/// Role labels as a JSON object keyed by block index.
pub fn roles_json(labels: &[RoleLabel]) -> serde_json::Value {
    let map: BTreeMap<usize, &RoleLabel> = labels.iter().map(|l| (l.block, l)).collect();
    serde_json::to_value(map).expect("role labels serialize")
}
