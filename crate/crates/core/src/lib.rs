//! Extreme-value statistics of the best relay in a dual-hop energy-harvesting network.
//!
//! Relays harvest energy from the source signal by time switching (a fraction `α` of the
//! slot) and power splitting (a fraction `λ` of the received power), then forward to the
//! destination. The crate computes the exact and asymptotic distribution of the best
//! relay's end-to-end SNR when relays sit at different distances, the capacity and outage
//! figures that follow from it, and the choice of `(α, λ)` that optimizes them.
//!
//! * [`scenario`]: physical parameters to per-link exponential rates, seeded sampling
//! * [`special_fn`]: exponential integrals and adaptive quadrature
//! * [`exact_stats`]: per-link and best-relay CDFs, empirical CDFs, KS distances
//! * [`evt`]: Gumbel asymptotics and normalizing constants
//! * [`metrics`]: ergodic capacity, throughput, outage
//! * [`ordering`]: stochastic-ordering checks
//! * [`optimize`]: factor searches and protocol comparison
//! * [`cli`]: experiment manifests and the command-line runner

pub mod cli;
mod compensated;
pub mod error;
pub mod evt;
pub mod exact_stats;
pub mod metrics;
pub mod optimize;
pub mod ordering;
pub mod scenario;
pub mod special_fn;

pub use error::{Error, Result};
pub use scenario::{build_links, LinkParams, ScenarioConfig};
