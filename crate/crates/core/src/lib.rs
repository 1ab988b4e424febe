//! Analytical model and Monte Carlo simulator for opportunistic cooperative
//! device-to-device transmission with caching.
//!
//! Users in a square hotspot are split into `B` square clusters of `K` users.
//! The `k`-th user of every cluster caches the `k`-th most popular file group.
//! When every cluster requests the same cached group, the `B` users caching it
//! transmit jointly with zero-forcing beamforming on a dedicated band. Other
//! D2D links share the remaining band and interfere across clusters.
//!
//! The analytic modules are generic over the scalar type; the aliases below
//! fix the common instantiations.

pub mod bandwidth;
pub mod catalog;
pub mod cluster;
pub mod error;
pub mod geometry;
pub mod netsim;
pub mod population;
pub mod quadrature;
pub mod rates;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub use num_rational::BigRational;

pub type PopularityModel = catalog::PopularityModel<f64>;
pub type PopularityModelF32 = catalog::PopularityModel<f32>;
pub type ExactPopularityModel = catalog::PopularityModel<BigRational>;

pub type ClusterPlan = cluster::ClusterPlan<f64>;
pub type ClusterSearch = cluster::ClusterSearch<f64>;
pub type GeometryTable = geometry::GeometryTable<f64>;
pub type RadioParams = rates::RadioParams<f64>;
pub type RateSummary = rates::RateSummary<f64>;
pub type BandwidthProblem = bandwidth::BandwidthProblem<f64>;
pub type BandwidthSolution = bandwidth::BandwidthSolution<f64>;

pub type PopulationSummary = population::PopulationSummary<f64>;
pub type ExactPopulationSummary = population::PopulationSummary<BigRational>;
