//! Quasi random geometric graphs for wireless multicast: topology
//! generation, exact min-cut capacities, concentration bounds, random linear
//! network coding checks and a reproducible Monte Carlo harness.
//!
//! Geometry and probabilities are generic over [`Real`] (`f32` or `f64`);
//! the aliases below fix `f64`.
//!
//! ```
//! use qrgg::{ConnectionModel, ConnectivityGraph, Seed};
//!
//! let model = ConnectionModel::fixed(0.1, 0.2, 0.5)?;
//! let graph = ConnectivityGraph::build(200, 1, &model, Seed(7))?;
//! let capacity = qrgg::multicast_capacity(&graph)?;
//! assert!(capacity as usize <= graph.degree(qrgg::SOURCE));
//! # Ok::<(), qrgg::Error>(())
//! ```

pub mod bounds;
pub mod cut;
pub mod error;
pub mod experiment;
pub mod field;
pub mod fixtures;
mod flow;
pub mod graph;
pub mod model;
pub mod output;
pub mod rlnc;
pub mod rng;
pub mod scalar;

pub use bounds::{
    chernoff_lower_tail, cut_tail_bound, expected_cut_capacity, full_report, lower_bound_report, upper_bound_report,
    PPrimeSource,
};
pub use cut::{brute_force_min_cut, cut_capacity, max_flow, min_cut, multicast_capacity, CutResult, FlowCertificate};
pub use error::{Error, Result};
pub use experiment::{
    audit_bounds, audit_bounds_with, run_experiment, run_experiment_with_jobs, run_sweep, run_trial, AuditRow,
    PPrimeBasis, Preset, SweepConfig,
};
pub use field::{gf_mul, Gf256};
pub use graph::{NodeId, Role, SOURCE};
pub use model::{connect_decision, estimate_connection_probability, kernel_probability, p_prime_bounds, sample_points};
pub use rlnc::{build_coding_dag, verify_achievability, xor_relay_demo, AchievabilityReport};
pub use rng::Seed;
pub use scalar::Real;

pub type Point = model::Point<f64>;
pub type Kernel = model::Kernel<f64>;
pub type ConnectionModel = model::ConnectionModel<f64>;
pub type ConnectivityGraph = graph::ConnectivityGraph<f64>;
pub type GraphFile = graph::GraphFile<f64>;
pub type BoundReport = bounds::BoundReport<f64>;
pub type TailBound = bounds::TailBound<f64>;
pub type ExperimentConfig = experiment::ExperimentConfig<f64>;
pub type ExperimentResult = experiment::ExperimentResult<f64>;
