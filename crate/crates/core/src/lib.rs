//! Dispatch engine for ride-hailing built on shareability networks.
//!
//! The pipeline: trip records (or a synthetic demand field) become an
//! [`Instance`]; an instance (or a rolling window of one) becomes an extended
//! shareability network ([`ShareNet`]); a max-cost flow on that network is an
//! optimal assignment of drivers to order chains; sink proximity scores each
//! order by its downstream matching opportunity and can be forecast from order
//! features to guide online dispatch.
//!
//! Modules follow that pipeline:
//!
//! - [`trip`]: domain records, travel model, CSV ingestion, synthetic scenarios
//! - [`sharenet`]: extended shareability network construction
//! - [`flow`]: max-cost flow solver and dispatch-plan recovery
//! - [`sinkprox`]: DAG longest path to the sink and its time standardization
//! - [`forecast`]: epsilon-SVR sink-proximity forecaster
//! - [`engine`]: offline, RHC, and RHC-SP dispatch procedures
//! - [`report`]: experiment grids and report emission

pub mod engine;
pub mod error;
pub mod flow;
pub mod forecast;
pub mod report;
pub mod sharenet;
pub mod sinkprox;
pub mod trip;

pub use engine::{DriverState, RhcConfig, SimulationTrace, Weighting};
pub use error::{Error, ErrorKind, Result};
pub use flow::{DispatchPlan, FlowSolution};
pub use forecast::{Predictor, SpModel, SvrGrid, SvrHyper};
pub use report::{GridReport, GridSpec};
pub use sharenet::{Link, LinkClass, NodeRef, ShareNet};
pub use sinkprox::{SpResult, TsspResult};
pub use trip::{Driver, Instance, Order, SynthParams, TravelModel, ZoneId, ZoneTable};
