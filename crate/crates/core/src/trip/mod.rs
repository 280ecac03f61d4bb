//! Domain records, the travel model, and scenario construction.

mod ingest;
mod synth;

pub use ingest::{ingest_trips, load_distance_matrix, load_zone_table, IngestReport, TimeWindow};
pub use synth::{synth_scenario, SpatialPeak, SynthParams, TimePeak};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Identifier of a service area ("zone"). Trips start and end in zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZoneId(pub u32);

impl std::fmt::Display for ZoneId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A ride request. Times are seconds since the scenario epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub id: u64,
    /// Anticipated pick-up time.
    pub pickup: i64,
    /// Anticipated drop-off time. Always strictly after `pickup`.
    pub dropoff: i64,
    pub origin: ZoneId,
    pub dest: ZoneId,
}

/// A supply unit: a driver that starts accepting orders at `start_time`
/// from `start_zone`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Driver {
    pub id: u64,
    pub start_time: i64,
    pub start_zone: ZoneId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: ZoneId,
    pub lat: f64,
    pub lon: f64,
}

/// The set of service areas, indexed by zone id.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<Zone>", into = "Vec<Zone>")]
pub struct ZoneTable {
    zones: Vec<Zone>,
    index: HashMap<u32, usize>,
}

impl ZoneTable {
    pub fn new(zones: Vec<Zone>) -> Result<Self> {
        let mut index = HashMap::with_capacity(zones.len());
        for (i, z) in zones.iter().enumerate() {
            if index.insert(z.id.0, i).is_some() {
                return Err(Error::Config(format!("duplicate zone id {}", z.id)));
            }
        }
        Ok(ZoneTable { zones, index })
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn contains(&self, id: ZoneId) -> bool {
        self.index.contains_key(&id.0)
    }

    /// Dense index of a zone id (position in `zones()`).
    pub fn position(&self, id: ZoneId) -> Result<usize> {
        self.index.get(&id.0).copied().ok_or(Error::UnknownZone(id.0))
    }

    pub fn centroid(&self, id: ZoneId) -> Result<(f64, f64)> {
        let z = &self.zones[self.position(id)?];
        Ok((z.lat, z.lon))
    }
}

impl TryFrom<Vec<Zone>> for ZoneTable {
    type Error = Error;
    fn try_from(zones: Vec<Zone>) -> Result<Self> {
        ZoneTable::new(zones)
    }
}

impl From<ZoneTable> for Vec<Zone> {
    fn from(t: ZoneTable) -> Self {
        t.zones
    }
}

/// Zone-to-zone travel times: centroid haversine distance divided by an
/// average speed, or an explicit distance matrix when one is loaded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TravelModel {
    speed_mps: f64,
    zones: ZoneTable,
    /// Row-major distances in meters, indexed by zone table position.
    matrix: Option<Vec<f64>>,
}

impl TravelModel {
    pub fn haversine(zones: ZoneTable, speed_mps: f64) -> Result<Self> {
        if speed_mps <= 0.0 || !speed_mps.is_finite() {
            return Err(Error::Config(format!("speed must be positive, got {speed_mps}")));
        }
        Ok(TravelModel { speed_mps, zones, matrix: None })
    }

    pub fn with_matrix(zones: ZoneTable, speed_mps: f64, matrix: Vec<f64>) -> Result<Self> {
        let n = zones.len();
        if matrix.len() != n * n {
            return Err(Error::BadMatrix(format!(
                "expected {n}x{n} entries, got {}",
                matrix.len()
            )));
        }
        for i in 0..n {
            if matrix[i * n + i] != 0.0 {
                return Err(Error::BadMatrix(format!("nonzero diagonal at zone index {i}")));
            }
            for j in 0..n {
                let d = matrix[i * n + j];
                if d < 0.0 || !d.is_finite() {
                    return Err(Error::BadMatrix(format!("bad entry at ({i},{j}): {d}")));
                }
            }
        }
        let mut model = TravelModel::haversine(zones, speed_mps)?;
        model.matrix = Some(matrix);
        Ok(model)
    }

    pub fn zones(&self) -> &ZoneTable {
        &self.zones
    }

    pub fn speed_mps(&self) -> f64 {
        self.speed_mps
    }

    pub fn distance_m(&self, a: ZoneId, b: ZoneId) -> Result<f64> {
        let ia = self.zones.position(a)?;
        let ib = self.zones.position(b)?;
        match &self.matrix {
            Some(m) => Ok(m[ia * self.zones.len() + ib]),
            None => {
                let za = &self.zones.zones()[ia];
                let zb = &self.zones.zones()[ib];
                Ok(haversine_m(za.lat, za.lon, zb.lat, zb.lon))
            }
        }
    }

    /// Travel time in seconds between two zones.
    pub fn travel_time(&self, a: ZoneId, b: ZoneId) -> Result<f64> {
        if a == b {
            // Still validates the zone id.
            self.zones.position(a)?;
            return Ok(0.0);
        }
        Ok(self.distance_m(a, b)? / self.speed_mps)
    }
}

/// Great-circle distance in meters between two lat/lon points in degrees.
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let dlat = (lat2 - lat1).to_radians();
    let dlon = (lon2 - lon1).to_radians();
    let a = (dlat / 2.0).sin().powi(2)
        + lat1.to_radians().cos() * lat2.to_radians().cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// A complete dispatch scenario: orders, drivers, travel model, the driver
/// idle cap and the simulation horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub orders: Vec<Order>,
    pub drivers: Vec<Driver>,
    pub travel: TravelModel,
    /// Maximum idle gap a driver may spend between services, seconds.
    pub idle_cap: i64,
    /// `[t_start, t_end]` in scenario-epoch seconds.
    pub horizon: (i64, i64),
    /// Wall-clock second-of-day of the scenario epoch (for time-of-day features).
    pub epoch_tod: i64,
}

const INSTANCE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    version: u32,
    instance: Instance,
}

impl Instance {
    /// Checks every structural invariant; returns `self` for chaining.
    pub fn validate(self) -> Result<Self> {
        if self.idle_cap <= 0 {
            return Err(Error::Config(format!("idle cap must be positive, got {}", self.idle_cap)));
        }
        if self.horizon.1 < self.horizon.0 {
            return Err(Error::Config("horizon end precedes horizon start".into()));
        }
        for o in &self.orders {
            if o.dropoff <= o.pickup {
                return Err(Error::Config(format!("order {} has dropoff <= pickup", o.id)));
            }
            if o.pickup < self.horizon.0 || o.pickup > self.horizon.1 {
                return Err(Error::Config(format!("order {} pickup outside horizon", o.id)));
            }
            self.travel.zones().position(o.origin)?;
            self.travel.zones().position(o.dest)?;
        }
        for d in &self.drivers {
            self.travel.zones().position(d.start_zone)?;
        }
        Ok(self)
    }

    pub fn save_json(&self, path: &std::path::Path) -> Result<()> {
        let file = InstanceFile { version: INSTANCE_FORMAT_VERSION, instance: self.clone() };
        let mut buf = serde_json::to_vec_pretty(&file)?;
        buf.push(b'\n');
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load_json(path: &std::path::Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.display().to_string()));
        }
        let data = std::fs::read(path)?;
        let file: InstanceFile = serde_json::from_slice(&data)?;
        if file.version != INSTANCE_FORMAT_VERSION {
            return Err(Error::BadModel(format!(
                "unsupported instance format version {}",
                file.version
            )));
        }
        file.instance.validate()
    }
}
