use super::{CleaningPolicy, CleaningReport, TripRecord};
use chrono::{Datelike, TimeZone, Weekday};
use std::collections::HashMap;

/// Applies the cleaning policy and reports what went where.
///
/// Per-trip filters run in a fixed order (short, long, excluded station,
/// weekend), then stations missing either a departure or an arrival are
/// removed together with their trips, repeatedly, until the survivor set is
/// stable. Retained trips keep their input order, re-localized into the
/// policy zone.
pub fn clean_trips(
    trips: Vec<TripRecord>,
    policy: &CleaningPolicy,
) -> (Vec<TripRecord>, CleaningReport) {
    let mut report = CleaningReport {
        input_count: trips.len(),
        ..CleaningReport::default()
    };

    let mut kept: Vec<TripRecord> = Vec::with_capacity(trips.len());
    for trip in trips {
        let duration = trip.duration_minutes();
        if duration <= policy.min_duration_minutes {
            report.removed_short += 1;
            continue;
        }
        if duration >= policy.max_duration_minutes {
            report.removed_long += 1;
            continue;
        }
        if policy.excluded_stations.contains(&trip.origin)
            || policy.excluded_stations.contains(&trip.destination)
        {
            report.removed_excluded_station += 1;
            continue;
        }
        let local_start = policy
            .timezone
            .from_utc_datetime(&trip.start_time.naive_utc());
        if policy.weekdays_only
            && matches!(local_start.weekday(), Weekday::Sat | Weekday::Sun)
        {
            report.removed_weekend += 1;
            continue;
        }
        let local_end = policy.timezone.from_utc_datetime(&trip.end_time.naive_utc());
        kept.push(TripRecord {
            start_time: local_start.fixed_offset(),
            end_time: local_end.fixed_offset(),
            ..trip
        });
    }

    // iterate until every remaining station has traffic in both directions
    loop {
        let mut departures: HashMap<String, usize> = HashMap::new();
        let mut arrivals: HashMap<String, usize> = HashMap::new();
        for trip in &kept {
            *departures.entry(trip.origin.clone()).or_default() += 1;
            *arrivals.entry(trip.destination.clone()).or_default() += 1;
        }
        let isolated = |station: &str| {
            departures.get(station).copied().unwrap_or(0) == 0
                || arrivals.get(station).copied().unwrap_or(0) == 0
        };
        let before = kept.len();
        kept.retain(|trip| !isolated(&trip.origin) && !isolated(&trip.destination));
        let removed = before - kept.len();
        report.removed_isolated_station += removed;
        if removed == 0 {
            break;
        }
    }

    report.output_count = kept.len();
    if report.input_count > 0 {
        report.removal_fraction =
            (report.input_count - report.output_count) as f64 / report.input_count as f64;
    }
    (kept, report)
}
