//! Minimization of quadratic functionals of binary spins with random,
//! synchronous and domain (block-spin) dynamics, block-structured Hebbian
//! instance generators, brute-force oracles and the comparative experiment
//! protocols built on them.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hebbian;
pub mod io;
pub mod model;
pub mod oracle;
pub mod report;
pub mod seed;

pub use dynamics::{
    minimize_two_phase, run_domain_dynamics, run_random_dynamics, run_synchronous_dynamics, DepthShares,
    DynamicsOptions, RunOutcome, SynchronousOutcome, Trajectory,
};
pub use error::{Error, Result};
pub use hebbian::{
    cluster_partition, generate_pattern_matrix, hebbian_matrix, mean_intragroup_coupling, random_block_start,
    random_partition, GroupSpec, PatternMatrix,
};
pub use model::{
    domain_local_field, domain_stability, energy, energy_breakdown, local_field, ConnectionMatrix,
    DomainPartition, EnergyBreakdown, SpinConfiguration,
};
pub use oracle::{brute_force_domain_minima, brute_force_minima, MinimaSet, OracleReport};
