use super::TripRecord;
use crate::error::{Error, Result};
use chrono::{DateTime, FixedOffset, LocalResult, NaiveDateTime, TimeZone};
use chrono_tz::Tz;
use std::collections::HashMap;
use std::fmt;
use std::io::Read;

/// Maps logical trip fields to CSV header names.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub start_time: String,
    pub end_time: String,
    pub origin: String,
    pub destination: String,
    pub origin_lat: String,
    pub origin_lon: String,
    pub destination_lat: String,
    pub destination_lon: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            start_time: "start_time".into(),
            end_time: "end_time".into(),
            origin: "origin".into(),
            destination: "destination".into(),
            origin_lat: "origin_lat".into(),
            origin_lon: "origin_lon".into(),
            destination_lat: "destination_lat".into(),
            destination_lon: "destination_lon".into(),
        }
    }
}

impl ColumnMap {
    /// Applies `field=Header` overrides, e.g. `start_time=Start Time`.
    pub fn with_overrides(mut self, pairs: &[(String, String)]) -> Result<Self> {
        for (field, header) in pairs {
            let slot = match field.as_str() {
                "start_time" => &mut self.start_time,
                "end_time" => &mut self.end_time,
                "origin" => &mut self.origin,
                "destination" => &mut self.destination,
                "origin_lat" => &mut self.origin_lat,
                "origin_lon" => &mut self.origin_lon,
                "destination_lat" => &mut self.destination_lat,
                "destination_lon" => &mut self.destination_lon,
                other => {
                    return Err(Error::Schema(format!("unknown trip field {other:?}")));
                }
            };
            *slot = header.clone();
        }
        Ok(self)
    }
}

/// A row that could not be turned into a trip, with its file line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Reads a trip CSV. Rows that fail to parse are collected, not dropped
/// silently; a header missing a required mapped column is a schema error.
///
/// Naive timestamps are interpreted in `tz` (earliest offset on ambiguous
/// fall-back times); timestamps with an explicit offset are converted.
pub fn parse_trips<R: Read>(
    reader: R,
    columns: &ColumnMap,
    tz: Tz,
) -> Result<(Vec<TripRecord>, Vec<RowError>)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let index: HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, name)| (name, i))
        .collect();

    let required = [
        ("start_time", &columns.start_time),
        ("end_time", &columns.end_time),
        ("origin", &columns.origin),
        ("destination", &columns.destination),
    ];
    let missing: Vec<&str> = required
        .iter()
        .filter(|(_, header)| !index.contains_key(header.as_str()))
        .map(|(field, _)| *field)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "header lacks mapped columns for {:?} (headers: {:?})",
            missing,
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let col = |name: &str| index[name];
    let start_i = col(&columns.start_time);
    let end_i = col(&columns.end_time);
    let origin_i = col(&columns.origin);
    let dest_i = col(&columns.destination);
    let coord_i = |name: &str| index.get(name.trim()).copied();
    let olat_i = coord_i(&columns.origin_lat);
    let olon_i = coord_i(&columns.origin_lon);
    let dlat_i = coord_i(&columns.destination_lat);
    let dlon_i = coord_i(&columns.destination_lon);

    let mut trips = Vec::new();
    let mut errors = Vec::new();
    for result in rdr.records() {
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e
                    .position()
                    .map_or(0, |p| p.line());
                errors.push(RowError {
                    line,
                    message: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| RowError { line, message };
        let field = |i: usize| record.get(i).unwrap_or("").trim();

        let origin = field(origin_i);
        let destination = field(dest_i);
        if origin.is_empty() || destination.is_empty() {
            errors.push(fail("empty station id".into()));
            continue;
        }
        let start_time = match parse_timestamp(field(start_i), tz) {
            Ok(t) => t,
            Err(msg) => {
                errors.push(fail(format!("start_time: {msg}")));
                continue;
            }
        };
        let end_time = match parse_timestamp(field(end_i), tz) {
            Ok(t) => t,
            Err(msg) => {
                errors.push(fail(format!("end_time: {msg}")));
                continue;
            }
        };
        let coords = |lat: Option<usize>, lon: Option<usize>| -> std::result::Result<Option<(f64, f64)>, String> {
            let (Some(lat), Some(lon)) = (lat, lon) else {
                return Ok(None);
            };
            let (lat_s, lon_s) = (field(lat), field(lon));
            if lat_s.is_empty() || lon_s.is_empty() {
                return Ok(None);
            }
            let lat: f64 = lat_s
                .parse()
                .map_err(|_| format!("bad latitude {lat_s:?}"))?;
            let lon: f64 = lon_s
                .parse()
                .map_err(|_| format!("bad longitude {lon_s:?}"))?;
            Ok(Some((lat, lon)))
        };
        let origin_coords = match coords(olat_i, olon_i) {
            Ok(c) => c,
            Err(msg) => {
                errors.push(fail(msg));
                continue;
            }
        };
        let destination_coords = match coords(dlat_i, dlon_i) {
            Ok(c) => c,
            Err(msg) => {
                errors.push(fail(msg));
                continue;
            }
        };
        trips.push(TripRecord {
            start_time,
            end_time,
            origin: origin.to_string(),
            destination: destination.to_string(),
            origin_coords,
            destination_coords,
        });
    }
    Ok((trips, errors))
}

/// Accepts `YYYY-MM-DD HH:MM:SS` style naive stamps (with optional fraction,
/// optional seconds, `T` separator) and RFC 3339 stamps with an offset.
fn parse_timestamp(s: &str, tz: Tz) -> std::result::Result<DateTime<FixedOffset>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty timestamp".into());
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.with_timezone(&tz).fixed_offset());
    }
    const NAIVE_FORMATS: [&str; 4] = [
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M",
        "%Y-%m-%dT%H:%M",
    ];
    for fmt in NAIVE_FORMATS {
        let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) else {
            continue;
        };
        return match tz.from_local_datetime(&naive) {
            LocalResult::Single(dt) => Ok(dt.fixed_offset()),
            LocalResult::Ambiguous(earliest, _) => Ok(earliest.fixed_offset()),
            LocalResult::None => Err(format!("local time {s:?} does not exist in {tz}")),
        };
    }
    Err(format!("unrecognized timestamp {s:?}"))
}
