//! File formats: edge lists, model files, export tables, GeoJSON.
//!
//! Everything round-trips through plain CSV and JSON so downstream
//! plotting and inspection need no special tooling.

mod geo;
mod model;
mod network;
mod tables;

pub use geo::{geojson_discrete, geojson_mixed};
pub use model::{read_model, write_model, ModelFile, SCHEMA_VERSION};
pub use network::{
    load_network, read_network, save_network, write_edge_list, write_node_registry,
};
pub use tables::{
    render_selection_table, roles_json, write_degree_diagnostics, write_hourly_totals,
    write_labels_csv, write_omega_csv, write_selection_csv, write_svd_profiles,
};
