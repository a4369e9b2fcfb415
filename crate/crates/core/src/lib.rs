//! Cooperative wideband spectrum sensing.
//!
//! Several cognitive radios measure the received energy on each of `K`
//! subchannels. A fusion center forms, per band, a non-negative linear
//! combination of the radios' energies and compares it with a threshold. The
//! weights and thresholds of all bands are chosen jointly to maximize the
//! opportunistic throughput `r^T (1 - Pf)` while bounding per-band miss and
//! false-alarm probabilities and the cost-weighted aggregate interference.
//!
//! * [`model`]: problem-instance types and validation
//! * [`detector`]: single-radio energy detector and the Gaussian tail function
//! * [`fusion`]: fused statistics, exact metrics and their gradients
//! * [`optimizer`]: the convex reformulation, its barrier solver, baselines
//!   and a grid-search oracle
//! * [`montecarlo`]: simulation of the energy statistics

pub mod detector;
pub mod error;
pub mod fusion;
pub mod model;
pub mod montecarlo;
pub mod optimizer;

pub use error::{Result, SenseError};
pub use model::{
    DetectionMetrics, FeasibilityResiduals, FusionDesign, PolicyConstraints, SensingScenario,
};
