//! CSV ingestion of trip records, zone tables, and distance matrices.

use std::path::Path;

use chrono::{NaiveDateTime, Timelike};

use crate::error::{Error, Result};
use crate::trip::{Order, Zone, ZoneId, ZoneTable};

/// Wall-clock interval selecting the trips to keep. `start` becomes the
/// scenario epoch (second 0).
#[derive(Debug, Clone, Copy)]
pub struct TimeWindow {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
}

impl TimeWindow {
    pub fn horizon_seconds(&self) -> i64 {
        (self.end - self.start).num_seconds()
    }

    /// Second-of-day of the epoch, for time-of-day features.
    pub fn epoch_tod(&self) -> i64 {
        self.start.time().num_seconds_from_midnight() as i64
    }
}

/// Orders retained by ingestion plus counts of everything dropped.
/// Real trip extracts are dirty; malformed rows are never fatal.
#[derive(Debug, Clone)]
pub struct IngestReport {
    pub orders: Vec<Order>,
    pub dropped_unparsable: usize,
    pub dropped_unknown_zone: usize,
    pub dropped_bad_times: usize,
    pub skipped_outside_window: usize,
}

impl IngestReport {
    pub fn dropped_total(&self) -> usize {
        self.dropped_unparsable + self.dropped_unknown_zone + self.dropped_bad_times
    }
}

fn parse_datetime(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt);
        }
    }
    None
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string(), path.display().to_string()))
}

/// Reads a trip-record CSV (`pickup_datetime,dropoff_datetime,pu_zone,do_zone`)
/// into orders with scenario-epoch times, filtered to `window` by pickup time.
/// Retained orders get sequential ids in file order.
pub fn ingest_trips(path: &Path, zones: &ZoneTable, window: TimeWindow) -> Result<IngestReport> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let c_pickup = column_index(&headers, "pickup_datetime", path)?;
    let c_dropoff = column_index(&headers, "dropoff_datetime", path)?;
    let c_pu = column_index(&headers, "pu_zone", path)?;
    let c_do = column_index(&headers, "do_zone", path)?;

    let mut report = IngestReport {
        orders: Vec::new(),
        dropped_unparsable: 0,
        dropped_unknown_zone: 0,
        dropped_bad_times: 0,
        skipped_outside_window: 0,
    };
    let mut next_id = 0u64;
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                report.dropped_unparsable += 1;
                continue;
            }
        };
        let fields = (
            record.get(c_pickup).and_then(parse_datetime),
            record.get(c_dropoff).and_then(parse_datetime),
            record.get(c_pu).and_then(|s| s.trim().parse::<u32>().ok()),
            record.get(c_do).and_then(|s| s.trim().parse::<u32>().ok()),
        );
        let (Some(pickup_dt), Some(dropoff_dt), Some(pu), Some(d_o)) = fields else {
            report.dropped_unparsable += 1;
            continue;
        };
        if dropoff_dt <= pickup_dt {
            report.dropped_bad_times += 1;
            continue;
        }
        let (origin, dest) = (ZoneId(pu), ZoneId(d_o));
        if !zones.contains(origin) || !zones.contains(dest) {
            report.dropped_unknown_zone += 1;
            continue;
        }
        if pickup_dt < window.start || pickup_dt > window.end {
            report.skipped_outside_window += 1;
            continue;
        }
        report.orders.push(Order {
            id: next_id,
            pickup: (pickup_dt - window.start).num_seconds(),
            dropoff: (dropoff_dt - window.start).num_seconds(),
            origin,
            dest,
        });
        next_id += 1;
    }
    if report.orders.is_empty() {
        return Err(Error::EmptyScenario(format!(
            "no trips within {}..{} in {}",
            window.start,
            window.end,
            path.display()
        )));
    }
    Ok(report)
}

/// Reads a zone CSV with header `zone_id,lat,lon`.
pub fn load_zone_table(path: &Path) -> Result<ZoneTable> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let c_id = column_index(&headers, "zone_id", path)?;
    let c_lat = column_index(&headers, "lat", path)?;
    let c_lon = column_index(&headers, "lon", path)?;
    let mut zones = Vec::new();
    for record in reader.records() {
        let record = record?;
        let id = record
            .get(c_id)
            .and_then(|s| s.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::BadMatrix(format!("bad zone id row in {}", path.display())))?;
        let lat = record.get(c_lat).and_then(|s| s.trim().parse::<f64>().ok());
        let lon = record.get(c_lon).and_then(|s| s.trim().parse::<f64>().ok());
        let (Some(lat), Some(lon)) = (lat, lon) else {
            return Err(Error::BadMatrix(format!("bad centroid for zone {id} in {}", path.display())));
        };
        zones.push(Zone { id: ZoneId(id), lat, lon });
    }
    ZoneTable::new(zones)
}

/// Reads a distance matrix CSV whose first row and first column are zone ids,
/// cells in meters. Every zone of `zones` must be covered. Returns row-major
/// distances in zone-table order.
pub fn load_distance_matrix(path: &Path, zones: &ZoneTable) -> Result<Vec<f64>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut rows = reader.records();
    let header = rows
        .next()
        .ok_or_else(|| Error::BadMatrix("empty matrix file".into()))??;
    let col_ids: Vec<usize> = header
        .iter()
        .skip(1)
        .map(|s| {
            let id = s
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::BadMatrix(format!("bad column id `{s}`")))?;
            zones.position(ZoneId(id))
        })
        .collect::<Result<_>>()?;
    let n = zones.len();
    if col_ids.len() != n {
        return Err(Error::BadMatrix(format!(
            "matrix covers {} zones, table has {n}",
            col_ids.len()
        )));
    }
    let mut matrix = vec![f64::NAN; n * n];
    for record in rows {
        let record = record?;
        let row_id = record
            .get(0)
            .and_then(|s| s.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::BadMatrix("bad row id".into()))?;
        let row = zones.position(ZoneId(row_id))?;
        if record.len() != n + 1 {
            return Err(Error::BadMatrix(format!("row {row_id} has {} cells", record.len() - 1)));
        }
        for (k, cell) in record.iter().skip(1).enumerate() {
            let d = cell
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::BadMatrix(format!("bad cell `{cell}` in row {row_id}")))?;
            matrix[row * n + col_ids[k]] = d;
        }
    }
    if matrix.iter().any(|d| d.is_nan()) {
        return Err(Error::BadMatrix("matrix does not cover all zone pairs".into()));
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn zones3() -> ZoneTable {
        ZoneTable::new(vec![
            Zone { id: ZoneId(43), lat: 40.75, lon: -73.98 },
            Zone { id: ZoneId(161), lat: 40.76, lon: -73.97 },
            Zone { id: ZoneId(7), lat: 40.74, lon: -73.99 },
        ])
        .unwrap()
    }

    fn window_8am() -> TimeWindow {
        TimeWindow {
            start: NaiveDateTime::parse_from_str("2022-06-01T08:00:00", "%Y-%m-%dT%H:%M:%S").unwrap(),
            end: NaiveDateTime::parse_from_str("2022-06-01T10:00:00", "%Y-%m-%dT%H:%M:%S").unwrap(),
        }
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn converts_times_to_epoch_seconds() {
        let f = write_csv(
            "pickup_datetime,dropoff_datetime,pu_zone,do_zone\n\
             2022-06-01T08:00:00,2022-06-01T08:20:00,43,161\n",
        );
        let r = ingest_trips(f.path(), &zones3(), window_8am()).unwrap();
        assert_eq!(r.orders.len(), 1);
        let o = r.orders[0];
        assert_eq!((o.pickup, o.dropoff), (0, 1200));
        assert_eq!((o.origin, o.dest), (ZoneId(43), ZoneId(161)));
        assert_eq!(o.id, 0);
    }

    #[test]
    fn drops_non_increasing_times_and_counts_them() {
        let f = write_csv(
            "pickup_datetime,dropoff_datetime,pu_zone,do_zone\n\
             2022-06-01T08:30:00,2022-06-01T08:10:00,43,161\n\
             2022-06-01T08:05:00,2022-06-01T08:05:00,43,7\n\
             2022-06-01T08:00:00,2022-06-01T08:20:00,43,161\n",
        );
        let r = ingest_trips(f.path(), &zones3(), window_8am()).unwrap();
        assert_eq!(r.orders.len(), 1);
        assert_eq!(r.dropped_bad_times, 2);
    }

    #[test]
    fn drops_unknown_zones() {
        let f = write_csv(
            "pickup_datetime,dropoff_datetime,pu_zone,do_zone\n\
             2022-06-01T08:00:00,2022-06-01T08:20:00,43,999\n\
             2022-06-01T08:01:00,2022-06-01T08:21:00,7,43\n",
        );
        let r = ingest_trips(f.path(), &zones3(), window_8am()).unwrap();
        assert_eq!(r.orders.len(), 1);
        assert_eq!(r.dropped_unknown_zone, 1);
    }

    #[test]
    fn missing_column_is_fatal() {
        let f = write_csv("pickup_datetime,dropoff_datetime,pu_zone\n");
        let err = ingest_trips(f.path(), &zones3(), window_8am()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c, _) if c == "do_zone"));
    }

    #[test]
    fn missing_file_is_fatal() {
        let err = ingest_trips(Path::new("/nonexistent/trips.csv"), &zones3(), window_8am());
        assert!(matches!(err, Err(Error::MissingFile(_))));
    }

    #[test]
    fn empty_after_filtering_is_fatal() {
        let f = write_csv(
            "pickup_datetime,dropoff_datetime,pu_zone,do_zone\n\
             2022-06-01T11:00:00,2022-06-01T11:20:00,43,161\n",
        );
        let err = ingest_trips(f.path(), &zones3(), window_8am());
        assert!(matches!(err, Err(Error::EmptyScenario(_))));
    }

    #[test]
    fn ingestion_is_idempotent() {
        let f = write_csv(
            "pickup_datetime,dropoff_datetime,pu_zone,do_zone\n\
             2022-06-01T08:00:00,2022-06-01T08:20:00,43,161\n\
             garbage,row,x,y\n\
             2022-06-01T08:05:00,2022-06-01T08:25:00,7,43\n",
        );
        let a = ingest_trips(f.path(), &zones3(), window_8am()).unwrap();
        let b = ingest_trips(f.path(), &zones3(), window_8am()).unwrap();
        assert_eq!(a.orders, b.orders);
        assert_eq!(a.dropped_unparsable, 1);
        assert_eq!(b.dropped_unparsable, 1);
    }

    #[test]
    fn matrix_roundtrip_with_remapping() {
        let f = write_csv(
            "zone,161,43,7\n\
             161,0,500,900\n\
             43,500,0,400\n\
             7,900,400,0\n",
        );
        let zones = zones3();
        let m = load_distance_matrix(f.path(), &zones).unwrap();
        // Table order is 43,161,7.
        let n = 3;
        let idx = |a: u32, b: u32| {
            zones.position(ZoneId(a)).unwrap() * n + zones.position(ZoneId(b)).unwrap()
        };
        assert_eq!(m[idx(161, 43)], 500.0);
        assert_eq!(m[idx(43, 7)], 400.0);
        assert_eq!(m[idx(7, 161)], 900.0);
        assert_eq!(m[idx(43, 43)], 0.0);
    }
}
