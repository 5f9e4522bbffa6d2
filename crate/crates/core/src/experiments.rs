//! Comparative experiments on block-structured Hebbian matrices.
//!
//! Three minimizers are compared on every generated matrix:
//!
//! * `RANDOM`: random dynamics from a uniform random start;
//! * `DM-RND`: two-phase minimization with a random partition into domains
//!   of size `k_random`, from the same start as `RANDOM`;
//! * `DM-CLS`: two-phase minimization with the cluster partition (one domain
//!   per group) from an independently drawn block-constant start.
//!
//! Each (matrix, start) trial gets its own seeds derived from the master
//! seed, so trials run in parallel and results do not depend on scheduling.

use rayon::prelude::*;

use crate::dynamics::{minimize_two_phase, run_random_dynamics, DynamicsOptions};
use crate::error::{Error, Result};
use crate::hebbian::{
    cluster_partition, generate_pattern_matrix_with, hebbian_matrix, mean_intragroup_coupling,
    random_block_start_with, random_group_sizes, random_partition_with, random_start_with, GroupSpec,
};
use crate::model::{energy, ConnectionMatrix, DomainPartition};
use crate::seed::{derive_seed, seeded_rng};

/// Energies within this relative distance of the pooled minimum count as
/// reaching it.
pub const DEEPEST_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dynamics {
    Random,
    DomainRandom,
    DomainCluster,
}

impl Dynamics {
    pub const ALL: [Dynamics; 3] = [Dynamics::Random, Dynamics::DomainRandom, Dynamics::DomainCluster];

    pub fn label(self) -> &'static str {
        match self {
            Dynamics::Random => "RANDOM",
            Dynamics::DomainRandom => "DM-RND",
            Dynamics::DomainCluster => "DM-CLS",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for Dynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Number of spins N.
    pub spins: usize,
    /// Pattern dimension M.
    pub pattern_dim: usize,
    /// Number of column groups n.
    pub groups: usize,
    /// Upper bound on a group's size.
    pub max_group_size: usize,
    /// Distortion level b.
    pub distortion: f64,
    /// Domain size used by `DM-RND`.
    pub k_random: usize,
    pub matrices: usize,
    pub starts: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// N=300, M=30, 20 groups of size 1..=27, k_random=15, 20 matrices × 200
    /// starts.
    pub fn desk(seed: u64) -> Self {
        Self {
            spins: 300,
            pattern_dim: 30,
            groups: 20,
            max_group_size: 27,
            distortion: 0.0,
            k_random: 15,
            matrices: 20,
            starts: 200,
            seed,
        }
    }

    /// N=1000, M=60, 40 groups of size 1..=45, k_random=25, 200 matrices ×
    /// 1000 starts.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            spins: 1000,
            pattern_dim: 60,
            groups: 40,
            max_group_size: 45,
            distortion: 0.0,
            k_random: 25,
            matrices: 200,
            starts: 1000,
            seed,
        }
    }

    pub fn with_distortion(&self, b: f64) -> Self {
        Self {
            distortion: b,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.spins < 2 || self.pattern_dim == 0 || self.matrices == 0 || self.starts == 0 {
            return bad("spins >= 2 and pattern_dim, matrices, starts > 0 are required".into());
        }
        if self.groups == 0 || self.groups > self.spins {
            return bad(format!("cannot form {} groups from {} spins", self.groups, self.spins));
        }
        if self.max_group_size.saturating_mul(self.groups) < self.spins {
            return bad(format!(
                "{} groups of at most {} cannot cover {} spins",
                self.groups, self.max_group_size, self.spins
            ));
        }
        if self.k_random == 0 || !self.spins.is_multiple_of(self.k_random) {
            return bad(format!("k_random {} does not divide {}", self.k_random, self.spins));
        }
        if !(0.0..0.5).contains(&self.distortion) {
            return bad(format!("distortion {} outside [0, 0.5)", self.distortion));
        }
        Ok(())
    }
}

/// Outcome of one minimizer on one (matrix, start) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub final_energy: f64,
    /// Energy at the domain local minimum (domain dynamics only).
    pub domain_energy: Option<f64>,
    /// `(E - D) / E`, when defined.
    pub r_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTrials {
    pub group_sizes: Vec<usize>,
    /// `records[start][dynamics]`.
    pub records: Vec<[TrialRecord; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub config: ExperimentConfig,
    pub matrices: Vec<MatrixTrials>,
}

/// Generates one instance: group sizes, Hebbian matrix and group spec.
pub fn generate_instance(config: &ExperimentConfig, matrix: usize) -> Result<(GroupSpec, ConnectionMatrix)> {
    let mut rng = seeded_rng(derive_seed(config.seed, &[matrix as u64, 0]));
    let sizes = random_group_sizes(config.spins, config.groups, config.max_group_size, &mut rng)?;
    let spec = GroupSpec::new(sizes, config.distortion)?;
    let x = generate_pattern_matrix_with(config.pattern_dim, &spec, &mut rng)?;
    Ok((spec, hebbian_matrix(&x)?))
}

fn run_start(
    config: &ExperimentConfig,
    spec: &GroupSpec,
    j: &ConnectionMatrix,
    cluster: &DomainPartition,
    matrix: usize,
    start: usize,
) -> Result<[TrialRecord; 3]> {
    let seed = |purpose: u64| derive_seed(config.seed, &[matrix as u64, 1, start as u64, purpose]);
    let opts = DynamicsOptions::default();

    let s0 = random_start_with(config.spins, &mut seeded_rng(seed(0)));
    let random_domains = random_partition_with(config.spins, config.k_random, &mut seeded_rng(seed(1)))?;
    let block_start = random_block_start_with(spec, &mut seeded_rng(seed(2)));

    let (s_random, _) = run_random_dynamics(j, &s0, seed(3), opts)?;
    let dm_rnd = minimize_two_phase(j, &s0, &random_domains, seed(4), opts)?;
    let dm_cls = minimize_two_phase(j, &block_start, cluster, seed(5), opts)?;

    Ok([
        TrialRecord {
            final_energy: energy(j, &s_random)?,
            domain_energy: None,
            r_share: None,
        },
        TrialRecord {
            final_energy: dm_rnd.final_energy,
            domain_energy: Some(dm_rnd.domain_energy),
            r_share: dm_rnd.r_share(),
        },
        TrialRecord {
            final_energy: dm_cls.final_energy,
            domain_energy: Some(dm_cls.domain_energy),
            r_share: dm_cls.r_share(),
        },
    ])
}

/// Runs every (matrix, start) trial of `config`.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialSet> {
    config.validate()?;
    let matrices = (0..config.matrices)
        .into_par_iter()
        .map(|m| {
            let (spec, j) = generate_instance(config, m)?;
            let cluster = cluster_partition(&spec)?;
            let records = (0..config.starts)
                .into_par_iter()
                .map(|s| run_start(config, &spec, &j, &cluster, m, s))
                .collect::<Result<Vec<_>>>()?;
            Ok(MatrixTrials {
                group_sizes: spec.sizes().to_vec(),
                records,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSet {
        config: config.clone(),
        matrices,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFrequency {
    pub matrix: usize,
    /// Lowest final energy over all `3 × starts` runs on this matrix.
    pub deepest_energy: f64,
    /// Starts reaching the deepest energy, per dynamics.
    pub hits: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub distortion: f64,
    pub matrices: usize,
    pub starts: usize,
    pub per_matrix: Vec<MatrixFrequency>,
    /// Per-matrix hit frequency averaged over matrices, per dynamics.
    pub mean_frequency: [f64; 3],
}

impl FrequencyReport {
    pub fn mean(&self, d: Dynamics) -> f64 {
        self.mean_frequency[d.index()]
    }
}

fn reaches(e: f64, deepest: f64) -> bool {
    e <= deepest + DEEPEST_TOLERANCE * deepest.abs()
}

/// Deepest-minimum attainment frequencies of a trial set.
pub fn frequency_report(trials: &TrialSet) -> FrequencyReport {
    let starts = trials.config.starts;
    let per_matrix: Vec<MatrixFrequency> = trials
        .matrices
        .iter()
        .enumerate()
        .map(|(matrix, mt)| {
            let deepest = mt
                .records
                .iter()
                .flatten()
                .map(|r| r.final_energy)
                .fold(f64::INFINITY, f64::min);
            let mut hits = [0usize; 3];
            for rec in &mt.records {
                for (d, r) in rec.iter().enumerate() {
                    if reaches(r.final_energy, deepest) {
                        hits[d] += 1;
                    }
                }
            }
            MatrixFrequency {
                matrix,
                deepest_energy: deepest,
                hits,
            }
        })
        .collect();
    let mut mean_frequency = [0.0; 3];
    for mf in &per_matrix {
        for (acc, &h) in mean_frequency.iter_mut().zip(&mf.hits) {
            *acc += h as f64 / starts as f64;
        }
    }
    for f in &mut mean_frequency {
        *f /= per_matrix.len() as f64;
    }
    FrequencyReport {
        distortion: trials.config.distortion,
        matrices: per_matrix.len(),
        starts,
        per_matrix,
        mean_frequency,
    }
}

/// Frequency of reaching the deepest minimum found on each matrix, for each
/// of the three minimizers.
pub fn deepest_frequency_experiment(config: &ExperimentConfig) -> Result<FrequencyReport> {
    Ok(frequency_report(&run_trials(config)?))
}

/// Repeats the frequency experiment for every distortion level.
pub fn distortion_sweep(config: &ExperimentConfig, b_values: &[f64]) -> Result<Vec<FrequencyReport>> {
    b_values
        .iter()
        .map(|&b| deepest_frequency_experiment(&config.with_distortion(b)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RRow {
    pub distortion: f64,
    pub dynamics: Dynamics,
    /// Mean over matrices of the per-matrix mean r; `None` if no run had a
    /// defined r.
    pub mean_r: Option<f64>,
    pub defined_runs: usize,
    pub undefined_runs: usize,
    /// Matrices with at least one defined r.
    pub matrices_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RCharacteristicReport {
    pub matrices: usize,
    pub starts: usize,
    pub rows: Vec<RRow>,
}

impl RCharacteristicReport {
    pub fn row(&self, b: f64, d: Dynamics) -> Option<&RRow> {
        self.rows.iter().find(|r| r.distortion == b && r.dynamics == d)
    }
}

/// Averaged r-characteristics of the two domain minimizers in a trial set:
/// first over starts for each matrix, then over matrices. Runs whose r is
/// undefined are counted but excluded from the means.
pub fn r_rows(trials: &TrialSet) -> Vec<RRow> {
    [Dynamics::DomainRandom, Dynamics::DomainCluster]
        .into_iter()
        .map(|d| {
            let mut defined_runs = 0;
            let mut undefined_runs = 0;
            let mut per_matrix = Vec::new();
            for mt in &trials.matrices {
                let rs: Vec<f64> = mt.records.iter().filter_map(|r| r[d.index()].r_share).collect();
                defined_runs += rs.len();
                undefined_runs += mt.records.len() - rs.len();
                if !rs.is_empty() {
                    per_matrix.push(rs.iter().sum::<f64>() / rs.len() as f64);
                }
            }
            RRow {
                distortion: trials.config.distortion,
                dynamics: d,
                mean_r: (!per_matrix.is_empty()).then(|| per_matrix.iter().sum::<f64>() / per_matrix.len() as f64),
                defined_runs,
                undefined_runs,
                matrices_used: per_matrix.len(),
            }
        })
        .collect()
}

pub fn r_characteristic_experiment(config: &ExperimentConfig, b_values: &[f64]) -> Result<RCharacteristicReport> {
    let mut rows = Vec::new();
    for &b in b_values {
        rows.extend(r_rows(&run_trials(&config.with_distortion(b))?));
    }
    Ok(RCharacteristicReport {
        matrices: config.matrices,
        starts: config.starts,
        rows,
    })
}

/// Frequencies and r-characteristics from a single pass over the trials of
/// each distortion level.
pub fn sweep_with_r(config: &ExperimentConfig, b_values: &[f64]) -> Result<(Vec<FrequencyReport>, RCharacteristicReport)> {
    let mut freqs = Vec::new();
    let mut rows = Vec::new();
    for &b in b_values {
        let trials = run_trials(&config.with_distortion(b))?;
        freqs.push(frequency_report(&trials));
        rows.extend(r_rows(&trials));
    }
    Ok((
        freqs,
        RCharacteristicReport {
            matrices: config.matrices,
            starts: config.starts,
            rows,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingRow {
    pub distortion: f64,
    /// `(1 - 2b)^2`.
    pub expected: f64,
    pub mean_coupling: f64,
}

/// Mean same-group coupling of generated Hebbian matrices at each
/// distortion level.
pub fn coupling_table(pattern_dim: usize, sizes: &[usize], b_values: &[f64], seed: u64) -> Result<Vec<CouplingRow>> {
    b_values
        .iter()
        .enumerate()
        .map(|(idx, &b)| {
            let spec = GroupSpec::new(sizes.to_vec(), b)?;
            let mut rng = seeded_rng(derive_seed(seed, &[idx as u64]));
            let x = generate_pattern_matrix_with(pattern_dim, &spec, &mut rng)?;
            let j = hebbian_matrix(&x)?;
            Ok(CouplingRow {
                distortion: b,
                expected: (1.0 - 2.0 * b).powi(2),
                mean_coupling: mean_intragroup_coupling(&j, &spec)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            spins: 40,
            pattern_dim: 8,
            groups: 5,
            max_group_size: 12,
            distortion: 0.0,
            k_random: 5,
            matrices: 3,
            starts: 10,
            seed,
        }
    }

    #[test]
    fn config_validation() {
        assert!(tiny(0).validate().is_ok());
        let mut c = tiny(0);
        c.k_random = 7;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = tiny(0);
        c.max_group_size = 2;
        assert!(c.validate().is_err());
        assert!(tiny(0).with_distortion(0.5).validate().is_err());
        let mut c = tiny(0);
        c.starts = 0;
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::desk(1).validate().is_ok());
        assert!(ExperimentConfig::full_scale(1).validate().is_ok());
    }

    #[test]
    fn single_start_frequencies_are_binary() {
        let mut c = tiny(3);
        c.matrices = 1;
        c.starts = 1;
        let r = deepest_frequency_experiment(&c).unwrap();
        assert!(r.mean_frequency.iter().all(|&f| f == 0.0 || f == 1.0));
        assert!(r.mean_frequency.iter().sum::<f64>() >= 1.0);
    }

    #[test]
    fn deepest_is_pooled_minimum() {
        let trials = run_trials(&tiny(4)).unwrap();
        let report = frequency_report(&trials);
        for (mf, mt) in report.per_matrix.iter().zip(&trials.matrices) {
            let min = mt.records.iter().flatten().map(|r| r.final_energy).fold(f64::INFINITY, f64::min);
            assert_eq!(mf.deepest_energy, min);
            assert!(mf.hits.iter().sum::<usize>() >= 1);
        }
        assert!(report.mean_frequency.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn trials_are_reproducible() {
        assert_eq!(run_trials(&tiny(9)).unwrap(), run_trials(&tiny(9)).unwrap());
        assert_ne!(run_trials(&tiny(9)).unwrap(), run_trials(&tiny(10)).unwrap());
    }

    #[test]
    fn sweep_matches_single_experiment() {
        let c = tiny(5);
        let sweep = distortion_sweep(&c, &[0.0, 0.1]).unwrap();
        assert_eq!(sweep[0], deepest_frequency_experiment(&c).unwrap());
        assert_eq!(sweep[1].distortion, 0.1);
    }

    #[test]
    fn cluster_r_is_zero_without_distortion() {
        let r = r_characteristic_experiment(&tiny(6), &[0.0]).unwrap();
        let row = r.row(0.0, Dynamics::DomainCluster).unwrap();
        assert_eq!(row.mean_r, Some(0.0));
        for row in &r.rows {
            if let Some(m) = row.mean_r {
                assert!((0.0..=1.0).contains(&m));
            }
            assert_eq!(row.defined_runs + row.undefined_runs, 30);
        }
    }

    #[test]
    fn combined_sweep_agrees_with_separate_runs() {
        let c = tiny(8);
        let (f, r) = sweep_with_r(&c, &[0.0, 0.2]).unwrap();
        assert_eq!(f, distortion_sweep(&c, &[0.0, 0.2]).unwrap());
        assert_eq!(r, r_characteristic_experiment(&c, &[0.0, 0.2]).unwrap());
    }

    #[test]
    fn coupling_table_undistorted_is_one() {
        let rows = coupling_table(50, &[5, 5], &[0.0], 1).unwrap();
        assert_eq!(rows[0].mean_coupling, 1.0);
        assert_eq!(rows[0].expected, 1.0);
    }
}
