//! Trip table ingestion: CSV parsing, cleaning, and hour bucketing.
//!
//! Raw dumps arrive as one row per trip with timestamps and station names.
//! Parsing localizes timestamps into a configured IANA zone, cleaning
//! removes implausible and out-of-scope trips plus stations that lack
//! traffic in one direction, and bucketing turns the survivors into a
//! multilayer network keyed by local start hour.

mod bucket;
mod clean;
mod parse;

pub use bucket::build_network;
pub use clean::clean_trips;
pub use parse::{parse_trips, ColumnMap, RowError};

use chrono::{DateTime, FixedOffset};
use chrono_tz::Tz;
use serde::Serialize;
use std::collections::BTreeSet;

/// One trip, timestamps already localized into the pipeline zone.
#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub start_time: DateTime<FixedOffset>,
    pub end_time: DateTime<FixedOffset>,
    pub origin: String,
    pub destination: String,
    /// (latitude, longitude) for the origin station, when the dump has them.
    pub origin_coords: Option<(f64, f64)>,
    pub destination_coords: Option<(f64, f64)>,
}

impl TripRecord {
    pub fn duration_minutes(&self) -> f64 {
        (self.end_time - self.start_time).num_seconds() as f64 / 60.0
    }
}

/// Filtering rules applied by [`clean_trips`].
///
/// Duration bounds are exclusive on both sides: a trip is kept only when
/// min < duration < max, so a trip of exactly `min_duration_minutes` goes.
#[derive(Debug, Clone)]
pub struct CleaningPolicy {
    pub min_duration_minutes: f64,
    pub max_duration_minutes: f64,
    pub excluded_stations: BTreeSet<String>,
    pub weekdays_only: bool,
    /// Zone used for weekday and hour determination; retained trips are
    /// re-localized into it.
    pub timezone: Tz,
}

impl Default for CleaningPolicy {
    fn default() -> Self {
        CleaningPolicy {
            min_duration_minutes: 2.0,
            max_duration_minutes: 90.0,
            excluded_stations: BTreeSet::new(),
            weekdays_only: true,
            timezone: Tz::UTC,
        }
    }
}

/// Counts of what cleaning removed; each input trip lands in exactly one
/// bucket, so the counts plus the output total the input.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CleaningReport {
    pub input_count: usize,
    pub removed_short: usize,
    pub removed_long: usize,
    pub removed_excluded_station: usize,
    pub removed_weekend: usize,
    pub removed_isolated_station: usize,
    pub output_count: usize,
    pub removal_fraction: f64,
}
