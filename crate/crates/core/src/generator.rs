//! Seeded synthetic instances: order book, network topology and scenarios.
//!
//! Every random dimension draws from its own ChaCha8 stream derived from the
//! seed, so growing the order book never changes the draws of earlier orders,
//! and the three scenarios of one seed share the same order book and rates.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::fixed::Fixed4;
use crate::model::{
    CostSpec, Edge, EdgeId, Instance, Location, LocationId, LocationKind, Manifest, ModeClass, Network, OrderId,
    ProductOrder, TransportMode,
};
use crate::SCHEMA_VERSION;

pub const GENERATOR_NAME: &str = "freightplan-gen";
pub const GENERATOR_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXPORT_PORTS: [&str; 2] = ["Shanghai", "Qingdao"];
pub const IMPORT_PORTS: [&str; 4] = ["Baltimore", "Charleston", "Newark", "Savannah"];
pub const DESTINATIONS: [&str; 4] = ["Greenville", "Bangor", "Atlanta", "Schenectady"];

pub const GROUND_WEEKS: u32 = 2;
pub const OCEAN_WEEKS: u32 = 7;
pub const AIR_WEEKS: u32 = 2;
pub const FCL_CAPACITY_KG: u32 = 20_000;
pub const FCL_FIXED_CENTS: u64 = 1_253_800;
pub const LCL_BUNKER_CENTS: u64 = 116_000;
pub const AIR_RATE_CENTS_PER_KG: u64 = 1_323;
/// Air-charge multiplier 1.2121 in ten-thousandths.
pub const AIR_CHARGE_FACTOR: u64 = 12_121;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Baseline,
    /// All edges touching Shanghai are removed.
    PortClosure,
    /// All FCL edges are removed.
    NoFcl,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Baseline, Scenario::PortClosure, Scenario::NoFcl];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::PortClosure => "port-closure",
            Scenario::NoFcl => "no-fcl",
        }
    }
}

impl core::str::FromStr for Scenario {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| GenError::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub n_products: u32,
    /// 6 or 12; converted to 26 or 52 weeks.
    pub horizon_months: u32,
    /// Overrides `horizon_months`, for desk-scale instances.
    pub horizon_weeks: Option<u32>,
    pub n_destinations: u32,
    pub scenario: Scenario,
    pub dwell_limit: u32,
    pub booking_lead: u32,
    pub port_cap: u32,
    /// Parallel FCL units per port pair; defaults to `port_cap`.
    pub fcl_slots: Option<u32>,
    /// Destination cities to draw from, in order; defaults to the first
    /// `n_destinations` of [`DESTINATIONS`].
    pub destinations: Option<Vec<String>>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            n_products: 50,
            horizon_months: 6,
            horizon_weeks: None,
            n_destinations: 1,
            scenario: Scenario::Baseline,
            dwell_limit: 2,
            booking_lead: 4,
            port_cap: 2,
            fcl_slots: None,
            destinations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Config(String),
}

impl GenConfig {
    pub fn horizon(&self) -> Result<u32, GenError> {
        match (self.horizon_weeks, self.horizon_months) {
            (Some(w), _) if w >= 2 => Ok(w),
            (Some(w), _) => Err(GenError::Config(format!("horizon of {w} weeks is too short"))),
            (None, 6) => Ok(26),
            (None, 12) => Ok(52),
            (None, m) => Err(GenError::Config(format!("horizon must be 6 or 12 months, got {m}"))),
        }
    }

    pub fn slots(&self) -> u32 {
        self.fcl_slots.unwrap_or(self.port_cap)
    }

    fn destination_names(&self) -> Result<Vec<String>, GenError> {
        if !(1..=3).contains(&self.n_destinations) {
            return Err(GenError::Config(format!("n_destinations must be 1, 2 or 3, got {}", self.n_destinations)));
        }
        let pool: Vec<String> = match &self.destinations {
            Some(list) => list.clone(),
            None => DESTINATIONS.iter().map(|s| s.to_string()).collect(),
        };
        if pool.len() < self.n_destinations as usize {
            return Err(GenError::Config("fewer destination names than n_destinations".into()));
        }
        Ok(pool.into_iter().take(self.n_destinations as usize).collect())
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_products == 0 {
            return Err(GenError::Config("n_products must be at least 1".into()));
        }
        let horizon = self.horizon()?;
        if horizon <= self.booking_lead {
            return Err(GenError::Config("horizon must exceed the booking lead".into()));
        }
        if self.port_cap == 0 || self.slots() == 0 {
            return Err(GenError::Config("port_cap and fcl_slots must be positive".into()));
        }
        self.destination_names()?;
        Ok(())
    }
}

/// Independent random streams, one per generated dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Network = 0,
    Weight = 1,
    Volume = 2,
    Timing = 3,
    Destination = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// 63% uniform on [50, 500] kg, otherwise uniform on [500, 5000] kg.
pub fn sample_gross_weight<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    if rng.gen_bool(0.63) {
        rng.gen_range(50..=500)
    } else {
        rng.gen_range(500..=5000)
    }
}

/// Volume coefficient buckets (CBM per metric ton) with their probabilities
/// in thousandths.
pub const VOLUME_BUCKETS: [(u32, f64, f64); 5] =
    [(125, 0.5, 1.5), (675, 1.5, 3.0), (100, 3.0, 4.5), (25, 4.5, 6.0), (75, 6.0, 7.5)];

/// Draws a bucket, then a coefficient uniformly inside it. Returns the bucket
/// index and the coefficient.
pub fn sample_volume_coefficient<R: Rng + ?Sized>(rng: &mut R) -> (usize, Fixed4) {
    let mut u = rng.gen_range(0..1000u32);
    let mut bucket = 0;
    for (i, &(p, _, _)) in VOLUME_BUCKETS.iter().enumerate() {
        if u < p {
            bucket = i;
            break;
        }
        u -= p;
    }
    let (_, lo, hi) = VOLUME_BUCKETS[bucket];
    let raw = rng.gen_range((lo * 10_000.0) as u64..=(hi * 10_000.0) as u64);
    (bucket, Fixed4::from_raw(raw))
}

/// Coefficient times gross weight in metric tons.
pub fn volume_from_coefficient(gross_kg: u32, coefficient: Fixed4) -> Fixed4 {
    Fixed4::from_raw(crate::fixed::mul_div_round(coefficient.raw(), u64::from(gross_kg), 1000))
}

pub fn sample_volume<R: Rng + ?Sized>(rng: &mut R, gross_kg: u32) -> Fixed4 {
    volume_from_coefficient(gross_kg, sample_volume_coefficient(rng).1)
}

/// Gross weight if CBM per ton is below 3, otherwise 1.2121 times gross.
pub fn air_charge_weight(gross_kg: u32, volume: Fixed4) -> Fixed4 {
    let kg = u64::from(gross_kg);
    // volume / (kg / 1000) >= 3  <=>  volume_raw >= 30 * kg
    if volume.raw() >= 30 * kg {
        Fixed4::from_raw(AIR_CHARGE_FACTOR * kg)
    } else {
        Fixed4::from_int(kg)
    }
}

/// Ready week and delivery window `(ready, earliest, latest)`.
///
/// Ready is uniform over the first 35% of the horizon. The gap to the
/// earliest week is 11 (7.5%), 12 (40%) or uniform on
/// `[13, horizon - 2 - ready]` (collapsing to 13 when that range is empty).
/// The earliest week is capped at `horizon - 2`, which only binds for
/// horizons shorter than 22 weeks; latest is earliest plus 2.
pub fn sample_timing<R: Rng + ?Sized>(rng: &mut R, horizon_weeks: u32) -> (u32, u32, u32) {
    let ready_span = (35 * horizon_weeks / 100).max(1);
    let ready = rng.gen_range(0..ready_span);
    let u = rng.gen_range(0..1000u32);
    let gap = if u < 75 {
        11
    } else if u < 475 {
        12
    } else {
        let hi = i64::from(horizon_weeks) - 2 - i64::from(ready);
        if hi >= 13 {
            rng.gen_range(13..=hi as u32)
        } else {
            13
        }
    };
    let earliest = (ready + gap).min(horizon_weeks.saturating_sub(2)).max(ready);
    (ready, earliest, earliest + 2)
}

pub fn horizon_ready_span(horizon_weeks: u32) -> u32 {
    (35 * horizon_weeks / 100).max(1)
}

/// Fixed location ids of the generated topology.
pub mod ids {
    use crate::model::LocationId;

    pub const ORIGIN: LocationId = LocationId(0);
    pub const SHANGHAI: LocationId = LocationId(1);
    pub const QINGDAO: LocationId = LocationId(2);
    /// First import port; the four import ports are consecutive.
    pub const FIRST_IMPORT: u32 = 3;
    /// First destination; destinations follow the import ports.
    pub const FIRST_DESTINATION: u32 = 7;
}

/// Network for `scenario` with `n_destinations` plants.
///
/// Rates are drawn for the full baseline topology in a fixed order before the
/// scenario filter is applied, so every scenario of a seed prices its
/// surviving edges identically.
pub fn build_network<R: Rng + ?Sized>(
    scenario: Scenario,
    destinations: &[String],
    fcl_slots: u32,
    rng: &mut R,
) -> Result<Network, GenError> {
    if !(1..=3).contains(&destinations.len()) {
        return Err(GenError::Config(format!("n_destinations must be 1, 2 or 3, got {}", destinations.len())));
    }
    let mut locations = Vec::new();
    let mut push = |kind, label: &str| {
        let id = LocationId(locations.len() as u32);
        locations.push(Location { id, kind, label: label.into() });
        id
    };
    let origin = push(LocationKind::Supply, "China Inland Origin");
    let exports: Vec<LocationId> = EXPORT_PORTS.iter().map(|p| push(LocationKind::InTransit, &format!("{p} Port"))).collect();
    let imports: Vec<LocationId> = IMPORT_PORTS.iter().map(|p| push(LocationKind::InTransit, &format!("{p} Port"))).collect();
    let plants: Vec<LocationId> = destinations.iter().map(|d| push(LocationKind::Demand, d)).collect();

    let ground_in: Vec<u64> = exports.iter().map(|_| rng.gen_range(10..=50)).collect();
    let lcl_rates: Vec<u64> = (0..exports.len() * imports.len()).map(|_| rng.gen_range(70_000..=90_000)).collect();
    // Rates for all four cities so the choice of destinations does not shift draws.
    let ground_out: Vec<u64> = (0..imports.len() * DESTINATIONS.len()).map(|_| rng.gen_range(10..=50)).collect();

    let mut edges = Vec::new();
    let mut add = |origin, dest, mode, transit_weeks, capacity_kg, cost| {
        edges.push(Edge { id: EdgeId(edges.len() as u32), origin, dest, mode, transit_weeks, capacity_kg, cost });
    };
    for (i, &port) in exports.iter().enumerate() {
        add(origin, port, TransportMode::GROUND, GROUND_WEEKS, None, CostSpec::PerKg { rate_cents_per_kg: ground_in[i] });
    }
    for (i, &ex) in exports.iter().enumerate() {
        for (j, &im) in imports.iter().enumerate() {
            let rate = lcl_rates[i * imports.len() + j];
            add(ex, im, TransportMode::LCL, OCEAN_WEEKS, None, CostSpec::Lcl { bunker_cents: LCL_BUNKER_CENTS, rate_cents_per_cbm: rate });
            for k in 1..=fcl_slots {
                add(
                    ex,
                    im,
                    TransportMode::fcl(k),
                    OCEAN_WEEKS,
                    Some(FCL_CAPACITY_KG),
                    CostSpec::Fcl { fixed_cost_cents: FCL_FIXED_CENTS, variable_cents_per_order: 0 },
                );
            }
        }
    }
    for (j, &im) in imports.iter().enumerate() {
        for (d, &plant) in plants.iter().enumerate() {
            let rate = ground_out[j * DESTINATIONS.len() + d];
            add(im, plant, TransportMode::GROUND, GROUND_WEEKS, None, CostSpec::PerKg { rate_cents_per_kg: rate });
        }
    }
    for &plant in &plants {
        add(origin, plant, TransportMode::AIR, AIR_WEEKS, None, CostSpec::PerKg { rate_cents_per_kg: AIR_RATE_CENTS_PER_KG });
    }

    let mut net = Network { locations, edges };
    match scenario {
        Scenario::Baseline => {}
        Scenario::PortClosure => {
            let closed = exports[0];
            net.retain_edges(|e| e.origin != closed && e.dest != closed);
        }
        Scenario::NoFcl => net.retain_edges(|e| e.mode.class != ModeClass::Fcl),
    }
    Ok(net)
}

/// Generates a complete instance; deterministic in `config`.
pub fn generate(config: &GenConfig) -> Result<Instance, GenError> {
    config.validate()?;
    let horizon = config.horizon()?;
    let names = config.destination_names()?;
    let network = build_network(config.scenario, &names, config.slots(), &mut stream_rng(config.seed, Stream::Network))?;
    let plants: Vec<LocationId> = network
        .locations
        .iter()
        .filter(|l| l.kind == LocationKind::Demand)
        .map(|l| l.id)
        .collect();

    let mut weights = stream_rng(config.seed, Stream::Weight);
    let mut volumes = stream_rng(config.seed, Stream::Volume);
    let mut timing = stream_rng(config.seed, Stream::Timing);
    let mut dests = stream_rng(config.seed, Stream::Destination);
    let orders = (0..config.n_products)
        .map(|i| {
            let gross = sample_gross_weight(&mut weights);
            let volume = sample_volume(&mut volumes, gross);
            let (ready, earliest, latest) = sample_timing(&mut timing, horizon);
            let destination = plants[dests.gen_range(0..plants.len())];
            ProductOrder {
                id: OrderId(i + 1),
                origin: ids::ORIGIN,
                destination,
                gross_weight_kg: gross,
                volume_cbm: volume,
                air_charge_weight_kg: air_charge_weight(gross, volume),
                ready_week: ready,
                earliest_week: earliest,
                latest_week: latest,
            }
        })
        .collect();

    Ok(Instance {
        schema_version: SCHEMA_VERSION,
        network,
        orders,
        horizon_weeks: horizon,
        dwell_limit_weeks: config.dwell_limit,
        booking_lead_weeks: config.booking_lead,
        bookings_per_port_week: config.port_cap,
        manifest: Some(Manifest {
            generator: GENERATOR_NAME.into(),
            version: GENERATOR_VERSION.into(),
            seed: config.seed,
            scenario: config.scenario.name().into(),
        }),
    })
}
