//! Time-dependent stochastic block models for hourly trip networks.
//!
//! The pipeline: parse and clean raw origin-destination trip tables, bucket
//! them into a directed multilayer network (one layer per hour), then fit
//! either a mixed-membership model (every node carries a strength in each
//! block) or a discrete degree-corrected model (every node sits in one
//! block), both with hour-resolved block-to-block rates. Model selection,
//! synthetic sampling, and functional role labeling sit on top.

pub mod analysis;
pub mod error;
pub mod ingest;
pub mod io;
pub mod net;
pub mod report;
pub mod seed;
pub mod tdd;
pub mod tdmm;

pub use error::{Error, Result};
pub use net::MultilayerNetwork;
