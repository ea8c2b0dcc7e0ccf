//! Sparse edge-list serialization with a node-registry sidecar.
//!
//! The edge list carries (origin_index, destination_index, layer, count)
//! rows; the sidecar maps each index back to its station id and optional
//! coordinates. Trailing empty layers are invisible in the edge list, so
//! readers that care about an exact layer count must say so.

use crate::error::{Error, Result};
use crate::net::{MultilayerNetwork, NodeInfo};
use serde::Deserialize;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Deserialize)]
struct EdgeRow {
    origin_index: usize,
    destination_index: usize,
    layer: usize,
    count: u64,
}

#[derive(Deserialize)]
struct NodeRow {
    index: usize,
    station_id: String,
    latitude: Option<f64>,
    longitude: Option<f64>,
}

pub fn write_edge_list<W: Write>(writer: W, net: &MultilayerNetwork) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    // explicit header so empty networks still write one
    csv.write_record(["origin_index", "destination_index", "layer", "count"])?;
    for entry in net.entries() {
        csv.write_record([
            entry.from.to_string(),
            entry.to.to_string(),
            entry.layer.to_string(),
            entry.count.to_string(),
        ])?;
    }
    csv.flush().map_err(Error::Io)
}

pub fn write_node_registry<W: Write>(writer: W, net: &MultilayerNetwork) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["index", "station_id", "latitude", "longitude"])?;
    for (index, node) in net.nodes().iter().enumerate() {
        let fmt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        csv.write_record([
            index.to_string(),
            node.id.clone(),
            fmt(node.coords.map(|(lat, _)| lat)),
            fmt(node.coords.map(|(_, lon)| lon)),
        ])?;
    }
    csv.flush().map_err(Error::Io)
}

/// Reads a network back from its two files. With `n_layers` unset the
/// layer count is inferred as one past the largest layer present.
pub fn read_network<E: Read, N: Read>(
    edges: E,
    nodes: N,
    n_layers: Option<usize>,
) -> Result<MultilayerNetwork> {
    let mut registry: Vec<(usize, NodeInfo)> = Vec::new();
    for row in csv::Reader::from_reader(nodes).deserialize() {
        let row: NodeRow = row?;
        let mut info = NodeInfo::new(row.station_id);
        if let (Some(lat), Some(lon)) = (row.latitude, row.longitude) {
            info.coords = Some((lat, lon));
        }
        registry.push((row.index, info));
    }
    registry.sort_by_key(|(index, _)| *index);
    for (position, (index, _)) in registry.iter().enumerate() {
        if *index != position {
            return Err(Error::Schema(format!(
                "node registry indices must be 0..n contiguous, found {index} at row {position}"
            )));
        }
    }
    let registry: Vec<NodeInfo> = registry.into_iter().map(|(_, info)| info).collect();

    let mut cells = Vec::new();
    let mut max_layer = 0usize;
    for row in csv::Reader::from_reader(edges).deserialize() {
        let row: EdgeRow = row?;
        max_layer = max_layer.max(row.layer);
        cells.push((row.origin_index, row.destination_index, row.layer, row.count));
    }
    let t_layers = match n_layers {
        Some(t) => t,
        None => max_layer + 1,
    };
    MultilayerNetwork::with_nodes(registry, t_layers, cells)
}

/// Writes `{stem}.edges.csv` and `{stem}.nodes.csv` under `dir` and
/// returns the two paths.
pub fn save_network(
    dir: &Path,
    stem: &str,
    net: &MultilayerNetwork,
) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let edges_path = dir.join(format!("{stem}.edges.csv"));
    let nodes_path = dir.join(format!("{stem}.nodes.csv"));
    write_edge_list(BufWriter::new(File::create(&edges_path)?), net)?;
    write_node_registry(BufWriter::new(File::create(&nodes_path)?), net)?;
    Ok((edges_path, nodes_path))
}

pub fn load_network(
    edges_path: &Path,
    nodes_path: &Path,
    n_layers: Option<usize>,
) -> Result<MultilayerNetwork> {
    read_network(
        BufReader::new(File::open(edges_path)?),
        BufReader::new(File::open(nodes_path)?),
        n_layers,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MultilayerNetwork {
        let mut nodes = vec![
            NodeInfo::new("alpha"),
            NodeInfo::new("beta"),
            NodeInfo::new("gamma"),
        ];
        nodes[0].coords = Some((34.05, -118.24));
        nodes[2].coords = Some((34.10, -118.30));
        MultilayerNetwork::with_nodes(
            nodes,
            24,
            vec![(0, 1, 8, 5), (1, 0, 17, 4), (2, 2, 12, 1)],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_preserves_everything() {
        let net = sample();
        let mut edges = Vec::new();
        let mut nodes = Vec::new();
        write_edge_list(&mut edges, &net).unwrap();
        write_node_registry(&mut nodes, &net).unwrap();
        let back = read_network(edges.as_slice(), nodes.as_slice(), Some(24)).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn layer_count_inferred_when_unset() {
        let net = sample();
        let mut edges = Vec::new();
        let mut nodes = Vec::new();
        write_edge_list(&mut edges, &net).unwrap();
        write_node_registry(&mut nodes, &net).unwrap();
        let back = read_network(edges.as_slice(), nodes.as_slice(), None).unwrap();
        assert_eq!(back.n_layers(), 18);
        assert_eq!(back.total_trips(), net.total_trips());
    }

    #[test]
    fn empty_network_writes_headers_only() {
        let net = MultilayerNetwork::new(2, 4, Vec::new()).unwrap();
        let mut edges = Vec::new();
        write_edge_list(&mut edges, &net).unwrap();
        let text = String::from_utf8(edges).unwrap();
        assert_eq!(text.trim(), "origin_index,destination_index,layer,count");
    }

    #[test]
    fn gapped_registry_rejected() {
        let edges = "origin_index,destination_index,layer,count\n";
        let nodes = "index,station_id,latitude,longitude\n0,a,,\n2,b,,\n";
        let err = read_network(edges.as_bytes(), nodes.as_bytes(), Some(1));
        assert!(err.is_err());
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let net = sample();
        let (edges, nodes) = save_network(dir.path(), "trips", &net).unwrap();
        let back = load_network(&edges, &nodes, Some(24)).unwrap();
        assert_eq!(net, back);
    }
}
