//! Synthetic dispatch scenarios: a seeded demand field over a zone grid.
//!
//! Pickup times follow a time-inhomogeneous intensity (base plus Gaussian
//! peaks); origin/destination pairs follow a gravity-like field in which
//! destination mass concentrates around configurable attractors. Everything
//! is drawn from one seeded stream, so a fixed seed reproduces the instance
//! byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trip::{Driver, Instance, Order, TravelModel, Zone, ZoneId, ZoneTable};

/// Gaussian bump in the pickup-time intensity. Fractions are relative to the
/// horizon length.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimePeak {
    pub center_frac: f64,
    pub spread_frac: f64,
    pub weight: f64,
}

/// Gaussian attractor in the destination field. Fractions are relative to the
/// grid side; spreads are in zone units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpatialPeak {
    pub row_frac: f64,
    pub col_frac: f64,
    pub spread_zones: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthParams {
    /// Zones form a `grid_size` x `grid_size` lattice.
    pub grid_size: usize,
    pub zone_spacing_m: f64,
    /// Horizon is `[0, horizon_s]`.
    pub horizon_s: i64,
    pub n_orders: usize,
    /// Drivers per order; the Manhattan-style reference setting is 0.2.
    pub driver_ratio: f64,
    pub speed_mps: f64,
    pub idle_cap_s: i64,
    /// Second-of-day of scenario second 0.
    pub epoch_tod: i64,
    pub time_base: f64,
    pub time_peaks: Vec<TimePeak>,
    pub dest_base: f64,
    pub dest_peaks: Vec<SpatialPeak>,
    /// Deterrence length of the gravity field, in zone units.
    pub gravity_scale_zones: f64,
    pub gravity_exponent: f64,
    /// Trip duration = travel time scaled by a factor drawn from this range.
    pub duration_factor: (f64, f64),
    pub min_duration_s: i64,
    /// Drivers come online uniformly within `[0, driver_start_frac * horizon]`.
    pub driver_start_frac: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            grid_size: 12,
            zone_spacing_m: 900.0,
            horizon_s: 7200,
            n_orders: 2000,
            driver_ratio: 0.2,
            speed_mps: 6.7,
            idle_cap_s: 1800,
            epoch_tod: 8 * 3600,
            time_base: 0.5,
            time_peaks: vec![TimePeak { center_frac: 0.45, spread_frac: 0.2, weight: 1.5 }],
            dest_base: 0.12,
            dest_peaks: vec![
                SpatialPeak { row_frac: 0.35, col_frac: 0.4, spread_zones: 1.6, weight: 1.0 },
                SpatialPeak { row_frac: 0.7, col_frac: 0.75, spread_zones: 1.4, weight: 0.6 },
            ],
            gravity_scale_zones: 4.0,
            gravity_exponent: 1.0,
            duration_factor: (1.0, 1.35),
            min_duration_s: 120,
            driver_start_frac: 0.25,
        }
    }
}

impl SynthParams {
    pub fn n_drivers(&self) -> usize {
        (self.driver_ratio * self.n_orders as f64).round() as usize
    }

    /// Number of histogram bins the pickup-time intensity is discretized to.
    pub const TIME_BINS: usize = 48;

    /// Discretized pickup-time intensity, one weight per bin.
    pub fn time_bin_weights(&self) -> Vec<f64> {
        let nb = Self::TIME_BINS;
        (0..nb)
            .map(|b| {
                let t = (b as f64 + 0.5) / nb as f64;
                let mut w = self.time_base;
                for p in &self.time_peaks {
                    let z = (t - p.center_frac) / p.spread_frac;
                    w += p.weight * (-0.5 * z * z).exp();
                }
                w
            })
            .collect()
    }
}

struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    fn new(weights: &[f64]) -> Self {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in weights {
            acc += w.max(0.0);
            cumulative.push(acc);
        }
        Categorical { cumulative }
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen::<f64>() * self.total();
        match self.cumulative.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) | Err(i) => i.min(self.cumulative.len() - 1),
        }
    }
}

fn grid_zone_table(params: &SynthParams) -> Result<ZoneTable> {
    let g = params.grid_size;
    let lat0 = 40.70;
    let lon0 = -74.02;
    let dlat = params.zone_spacing_m / 111_195.0;
    let dlon = params.zone_spacing_m / (111_195.0 * lat0.to_radians().cos());
    let mut zones = Vec::with_capacity(g * g);
    for r in 0..g {
        for c in 0..g {
            zones.push(Zone {
                id: ZoneId((r * g + c) as u32),
                lat: lat0 + r as f64 * dlat,
                lon: lon0 + c as f64 * dlon,
            });
        }
    }
    ZoneTable::new(zones)
}

fn dest_weights(params: &SynthParams) -> Vec<f64> {
    let g = params.grid_size;
    let mut w = vec![params.dest_base; g * g];
    for p in &params.dest_peaks {
        let (pr, pc) = (p.row_frac * (g - 1) as f64, p.col_frac * (g - 1) as f64);
        for r in 0..g {
            for c in 0..g {
                let d2 = (r as f64 - pr).powi(2) + (c as f64 - pc).powi(2);
                w[r * g + c] += p.weight * (-d2 / (2.0 * p.spread_zones * p.spread_zones)).exp();
            }
        }
    }
    w
}

/// Builds a deterministic synthetic [`Instance`] from a seed and demand-field
/// parameters.
pub fn synth_scenario(seed: u64, params: &SynthParams) -> Result<Instance> {
    if params.n_orders == 0 {
        return Err(Error::Config("zero orders requested".into()));
    }
    let n_drivers = params.n_drivers();
    if n_drivers == 0 {
        return Err(Error::Config("zero drivers requested".into()));
    }
    if params.grid_size < 2 {
        return Err(Error::Config("grid size must be at least 2".into()));
    }
    let zones = grid_zone_table(params)?;
    let travel = TravelModel::haversine(zones, params.speed_mps)?;
    let g = params.grid_size;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let time_dist = Categorical::new(&params.time_bin_weights());
    let bin_len = params.horizon_s as f64 / SynthParams::TIME_BINS as f64;
    let dest_w = dest_weights(params);

    let mut orders = Vec::with_capacity(params.n_orders);
    let mut cond = vec![0.0; g * g];
    for _ in 0..params.n_orders {
        let bin = time_dist.sample(&mut rng);
        let pickup =
            ((bin as f64 + rng.gen::<f64>()) * bin_len).floor() as i64;
        let pickup = pickup.min(params.horizon_s - 1);

        let origin = rng.gen_range(0..g * g);
        let (or, oc) = (origin / g, origin % g);
        for r in 0..g {
            for c in 0..g {
                let z = r * g + c;
                if z == origin {
                    cond[z] = 0.0;
                    continue;
                }
                let dist = ((r as f64 - or as f64).powi(2) + (c as f64 - oc as f64).powi(2)).sqrt();
                cond[z] = dest_w[z]
                    / (1.0 + dist / params.gravity_scale_zones).powf(params.gravity_exponent);
            }
        }
        let dest = Categorical::new(&cond).sample(&mut rng);

        let tt = travel
            .travel_time(ZoneId(origin as u32), ZoneId(dest as u32))
            .expect("grid zones are valid");
        let factor = rng.gen_range(params.duration_factor.0..params.duration_factor.1);
        let duration = ((tt * factor).round() as i64).max(params.min_duration_s);
        orders.push(Order {
            id: 0,
            pickup,
            dropoff: pickup + duration,
            origin: ZoneId(origin as u32),
            dest: ZoneId(dest as u32),
        });
    }
    orders.sort_by_key(|o| (o.pickup, o.dropoff, o.origin.0, o.dest.0));
    for (i, o) in orders.iter_mut().enumerate() {
        o.id = i as u64;
    }

    let origin_dist = Categorical::new(&vec![1.0; g * g]);
    let start_span = ((params.driver_start_frac * params.horizon_s as f64) as i64).max(1);
    let mut drivers = Vec::with_capacity(n_drivers);
    for _ in 0..n_drivers {
        let start_time = rng.gen_range(0..start_span);
        let zone = origin_dist.sample(&mut rng);
        drivers.push(Driver { id: 0, start_time, start_zone: ZoneId(zone as u32) });
    }
    drivers.sort_by_key(|d| (d.start_time, d.start_zone.0));
    for (i, d) in drivers.iter_mut().enumerate() {
        d.id = i as u64;
    }

    Instance {
        orders,
        drivers,
        travel,
        idle_cap: params.idle_cap_s,
        horizon: (0, params.horizon_s),
        epoch_tod: params.epoch_tod,
    }
    .validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn small_params() -> SynthParams {
        SynthParams { n_orders: 300, grid_size: 6, ..SynthParams::default() }
    }

    #[test]
    fn same_seed_same_instance_bytes() {
        let a = synth_scenario(17, &small_params()).unwrap();
        let b = synth_scenario(17, &small_params()).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }

    #[test]
    fn different_seed_different_instance() {
        let a = synth_scenario(17, &small_params()).unwrap();
        let b = synth_scenario(18, &small_params()).unwrap();
        assert_ne!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }

    #[test]
    fn driver_ratio_arithmetic() {
        let params = SynthParams { n_orders: 1000, driver_ratio: 0.2, ..SynthParams::default() };
        let inst = synth_scenario(1, &params).unwrap();
        assert_eq!(inst.drivers.len(), 200);
    }

    #[test]
    fn zero_orders_rejected() {
        let params = SynthParams { n_orders: 0, ..SynthParams::default() };
        assert!(synth_scenario(1, &params).is_err());
    }

    #[test]
    fn zero_drivers_rejected() {
        let params = SynthParams { n_orders: 3, driver_ratio: 0.0, ..SynthParams::default() };
        assert!(synth_scenario(1, &params).is_err());
    }

    #[test]
    fn orders_satisfy_type_invariants() {
        let inst = synth_scenario(99, &SynthParams::default()).unwrap();
        for o in &inst.orders {
            assert!(o.dropoff > o.pickup);
            assert!(o.pickup >= 0 && o.pickup <= inst.horizon.1);
            assert!(inst.travel.zones().contains(o.origin));
            assert!(inst.travel.zones().contains(o.dest));
        }
    }

    // Pickup-time histogram matches the requested intensity: chi-squared
    // goodness of fit at the 5% level on 10k orders.
    #[test]
    fn pickup_histogram_matches_intensity() {
        let params = SynthParams { n_orders: 10_000, ..SynthParams::default() };
        let inst = synth_scenario(7, &params).unwrap();
        let weights = params.time_bin_weights();
        let total: f64 = weights.iter().sum();
        let nb = SynthParams::TIME_BINS;
        let bin_len = params.horizon_s as f64 / nb as f64;
        let mut observed = vec![0usize; nb];
        for o in &inst.orders {
            let b = ((o.pickup as f64 / bin_len) as usize).min(nb - 1);
            observed[b] += 1;
        }
        let mut chi2 = 0.0;
        for b in 0..nb {
            let expected = params.n_orders as f64 * weights[b] / total;
            chi2 += (observed[b] as f64 - expected).powi(2) / expected;
        }
        let critical = ChiSquared::new((nb - 1) as f64).unwrap().inverse_cdf(0.95);
        assert!(chi2 < critical, "chi2 = {chi2:.1}, critical = {critical:.1}");
    }
}
