//! Station maps as GeoJSON FeatureCollections.

use crate::analysis::{Role, RoleLabel};
use crate::error::{Error, Result};
use crate::net::MultilayerNetwork;
use crate::tdd::DiscreteModel;
use crate::tdmm::MixedModel;
use serde_json::{json, Map, Value};

fn role_name(roles: Option<&[RoleLabel]>, block: usize) -> Option<&'static str> {
    let role = roles?.iter().find(|r| r.block == block)?.role;
    Some(match role {
        Role::Home => "home",
        Role::Work => "work",
        Role::Park => "park",
        Role::Mixed => "mixed",
        Role::Other => "other",
    })
}

/// Points with coordinates in GeoJSON (longitude, latitude) order; every
/// node needs coordinates or the whole export fails, listing offenders.
fn features_with<F>(net: &MultilayerNetwork, mut properties: F) -> Result<Value>
where
    F: FnMut(usize, &str) -> Map<String, Value>,
{
    let missing: Vec<String> = net
        .nodes()
        .iter()
        .filter(|node| node.coords.is_none())
        .map(|node| node.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingCoordinates(missing));
    }
    let features: Vec<Value> = net
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let (lat, lon) = node.coords.expect("checked above");
            json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [lon, lat]},
                "properties": Value::Object(properties(i, &node.id)),
            })
        })
        .collect();
    Ok(json!({"type": "FeatureCollection", "features": features}))
}

/// One point per station carrying its block, strength, degree, and role.
pub fn geojson_discrete(
    net: &MultilayerNetwork,
    model: &DiscreteModel,
    roles: Option<&[RoleLabel]>,
) -> Result<Value> {
    if model.labels.len() != net.n_nodes() {
        return Err(Error::Dimension(format!(
            "model covers {} nodes, network has {}",
            model.labels.len(),
            net.n_nodes()
        )));
    }
    let degrees = net.degree_summary();
    features_with(net, |i, id| {
        let block = model.labels[i];
        let mut props = Map::new();
        props.insert("station_id".into(), json!(id));
        props.insert("block".into(), json!(block));
        props.insert("theta".into(), json!(model.theta[i]));
        props.insert("degree".into(), json!(degrees.k[i]));
        if let Some(role) = role_name(roles, block) {
            props.insert("role".into(), json!(role));
        }
        props
    })
}

/// One point per station carrying its per-block membership strengths;
/// the role, when given, is the strongest block's.
pub fn geojson_mixed(
    net: &MultilayerNetwork,
    model: &MixedModel,
    roles: Option<&[RoleLabel]>,
) -> Result<Value> {
    if model.n_nodes() != net.n_nodes() {
        return Err(Error::Dimension(format!(
            "model covers {} nodes, network has {}",
            model.n_nodes(),
            net.n_nodes()
        )));
    }
    let k = model.n_blocks();
    features_with(net, |i, id| {
        let mut props = Map::new();
        props.insert("station_id".into(), json!(id));
        let mut total = 0.0;
        let mut strongest = 0usize;
        for g in 0..k {
            let value = model.c[[i, g]];
            props.insert(format!("c_{g}"), json!(value));
            total += value;
            if value > model.c[[i, strongest]] {
                strongest = g;
            }
        }
        props.insert("c_total".into(), json!(total));
        if let Some(role) = role_name(roles, strongest) {
            props.insert("role".into(), json!(role));
        }
        props
    })
}
