//! CSV ingestion of trip records.

use std::io::Read;

use crate::error::{Error, Result};
use crate::graph::TripRecord;

/// Names of the three columns carrying a trip.
#[derive(Debug, Clone)]
pub struct TripColumns {
    pub pickup: String,
    pub dropoff: String,
    pub duration: String,
}

impl Default for TripColumns {
    fn default() -> Self {
        TripColumns {
            pickup: "pickup_community_area".into(),
            dropoff: "dropoff_community_area".into(),
            duration: "trip_seconds".into(),
        }
    }
}

/// Parsed records plus bookkeeping about the rows that were skipped.
#[derive(Debug)]
pub struct IngestSummary {
    pub records: Vec<TripRecord>,
    pub rows_read: u64,
    pub rows_dropped: u64,
}

/// Read trips from a CSV stream with a header row.
///
/// Rows missing any of the three fields, or carrying values that do not
/// parse as a positive area id / nonnegative duration, are dropped and
/// counted rather than treated as errors: the public trip data contains
/// plenty of nulls.
pub fn ingest_trips<R: Read>(reader: R, columns: &TripColumns) -> Result<IngestSummary> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("missing CSV column '{name}'")))
    };
    let pickup_idx = find(&columns.pickup)?;
    let dropoff_idx = find(&columns.dropoff)?;
    let duration_idx = find(&columns.duration)?;

    let mut records = Vec::new();
    let mut rows_read = 0u64;
    let mut rows_dropped = 0u64;
    for row in csv_reader.records() {
        let row = row?;
        rows_read += 1;
        let parsed = parse_row(&row, pickup_idx, dropoff_idx, duration_idx);
        match parsed {
            Some(record) => records.push(record),
            None => rows_dropped += 1,
        }
    }
    Ok(IngestSummary {
        records,
        rows_read,
        rows_dropped,
    })
}

fn parse_row(
    row: &csv::StringRecord,
    pickup_idx: usize,
    dropoff_idx: usize,
    duration_idx: usize,
) -> Option<TripRecord> {
    let pickup_area = parse_area(row.get(pickup_idx)?)?;
    let dropoff_area = parse_area(row.get(dropoff_idx)?)?;
    let duration_seconds = parse_duration(row.get(duration_idx)?)?;
    Some(TripRecord {
        pickup_area,
        dropoff_area,
        duration_seconds,
    })
}

/// Area ids are positive integers, though exports sometimes render them as
/// floats ("8.0").
fn parse_area(field: &str) -> Option<u32> {
    let field = field.trim();
    if field.is_empty() {
        return None;
    }
    let value: f64 = field.parse().ok()?;
    if !value.is_finite() || value < 1.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
        return None;
    }
    Some(value as u32)
}

fn parse_duration(field: &str) -> Option<f64> {
    let field = field.trim();
    if field.is_empty() {
        return None;
    }
    let value: f64 = field.parse().ok()?;
    if !value.is_finite() || value < 0.0 {
        return None;
    }
    Some(value)
}
