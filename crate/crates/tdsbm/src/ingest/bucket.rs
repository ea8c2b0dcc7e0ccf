use super::TripRecord;
use crate::error::{Error, Result};
use crate::net::{MultilayerNetwork, NodeInfo};
use chrono::Timelike;
use std::collections::BTreeMap;

/// Buckets trips into a multilayer network keyed by local start hour.
///
/// With no boundaries, `n_layers` must be 24 and layer = hour. Custom
/// boundaries give the starting hour of each bucket, strictly ascending
/// from 0; the last bucket wraps to midnight. Example: merging the quiet
/// hours 1 through 5 into one layer uses boundaries [0, 1, 6, 7, ..., 23]
/// and yields 20 layers.
///
/// The node registry is the sorted set of station ids on retained trips;
/// coordinates come from the first trip that mentions the station with
/// coordinates attached.
pub fn build_network(
    trips: &[TripRecord],
    n_layers: usize,
    bucket_boundaries: Option<&[u32]>,
) -> Result<MultilayerNetwork> {
    if trips.is_empty() {
        return Err(Error::EmptyInput("no trips to bucket".into()));
    }
    let hour_to_layer = layer_lookup(n_layers, bucket_boundaries)?;

    let mut ids: Vec<&str> = trips
        .iter()
        .flat_map(|t| [t.origin.as_str(), t.destination.as_str()])
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    let mut nodes: Vec<NodeInfo> = ids.iter().map(|&s| NodeInfo::new(s)).collect();
    for trip in trips {
        for (station, coords) in [
            (&trip.origin, trip.origin_coords),
            (&trip.destination, trip.destination_coords),
        ] {
            if let Some(c) = coords {
                let node = &mut nodes[index[station.as_str()]];
                if node.coords.is_none() {
                    node.coords = Some(c);
                }
            }
        }
    }

    let counts = trips.iter().map(|trip| {
        let layer = hour_to_layer[trip.start_time.hour() as usize];
        (
            index[trip.origin.as_str()],
            index[trip.destination.as_str()],
            layer,
            1u64,
        )
    });
    MultilayerNetwork::with_nodes(nodes, n_layers, counts)
}

/// Maps each hour 0..24 to its layer index.
fn layer_lookup(n_layers: usize, boundaries: Option<&[u32]>) -> Result<[usize; 24]> {
    let mut lookup = [0usize; 24];
    match boundaries {
        None => {
            if n_layers != 24 {
                return Err(Error::Config(format!(
                    "{n_layers} layers requested without bucket boundaries; \
                     default bucketing is one layer per hour"
                )));
            }
            for (h, slot) in lookup.iter_mut().enumerate() {
                *slot = h;
            }
        }
        Some(bounds) => {
            if bounds.len() != n_layers {
                return Err(Error::Config(format!(
                    "{} boundaries for {n_layers} layers",
                    bounds.len()
                )));
            }
            if bounds.first() != Some(&0) {
                return Err(Error::Config("bucket boundaries must start at 0".into()));
            }
            if bounds.iter().any(|&b| b >= 24) {
                return Err(Error::Config("bucket boundaries must lie in 0..24".into()));
            }
            if bounds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(
                    "bucket boundaries must be strictly ascending".into(),
                ));
            }
            for (k, &start) in bounds.iter().enumerate() {
                let end = bounds.get(k + 1).copied().unwrap_or(24);
                for h in start..end {
                    lookup[h as usize] = k;
                }
            }
        }
    }
    Ok(lookup)
}
