//! Downlink coverage and single-user throughput of two-tier cellular
//! networks in which small cells are kept out of a disk of radius D around
//! every macro BS.
//!
//! Two independent routes are provided:
//!
//! * [`uniform`] and [`nonuniform`]: stochastic-geometry expressions
//!   evaluated by adaptive quadrature and series summation;
//! * [`montecarlo`]: a simulator that samples network realizations,
//!   performs max-received-power association, silences unloaded BSs and
//!   draws Rayleigh-faded SINR at the typical user.
//!
//! [`experiment`] ties both together for parameter sweeps and CSV output.

pub mod error;
pub mod model;
pub mod quadrature;
pub mod special;
pub mod uniform;
pub mod nonuniform;
pub mod analytic;
pub mod montecarlo;
pub mod experiment;

pub use error::{Error, Result};
pub use model::{
    CcdfCurve, DerivedDensities, EffectiveScenarioDensity, Method, NetworkConfig, Region, Scenario,
    Tier,
};
