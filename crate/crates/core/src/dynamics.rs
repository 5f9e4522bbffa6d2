//! Random (asynchronous), synchronous and domain dynamics, and the
//! two-phase minimizer that runs domain dynamics and then defrosts the
//! domains into random dynamics.
//!
//! Sequential dynamics visit units in a fresh uniform permutation on every
//! sweep and stop after a sweep with no accepted flip. Local fields are kept
//! up to date incrementally: a spin flip costs O(N), a domain flip O(N k).

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::model::{
    check_dims, check_partition, energy_unchecked, local_field_unchecked, ConnectionMatrix,
    DomainPartition, SpinConfiguration,
};
use crate::seed::{seeded_rng, Rng};

#[derive(Debug, Clone, Copy, Default)]
pub struct DynamicsOptions {
    /// Sweep cap; `None` means 10·N for sequential dynamics and 2·N for
    /// synchronous dynamics.
    pub max_sweeps: Option<usize>,
    /// Record the energy after every accepted flip and the flipped unit.
    pub record: bool,
}

impl DynamicsOptions {
    pub fn recording() -> Self {
        Self {
            record: true,
            ..Self::default()
        }
    }

    fn sequential_cap(&self, n: usize) -> usize {
        self.max_sweeps.unwrap_or(10 * n.max(1))
    }

    fn synchronous_cap(&self, n: usize) -> usize {
        self.max_sweeps.unwrap_or(2 * n.max(1))
    }
}

/// Bookkeeping of a sequential run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Accepted flips.
    pub steps: usize,
    /// Full passes over the units, including the final quiet pass.
    pub sweeps: usize,
    pub initial_energy: f64,
    /// Energy after each accepted flip (incrementally updated).
    pub energy_trace: Option<Vec<f64>>,
    /// Spin or domain index flipped at each accepted step.
    pub flipped: Option<Vec<usize>>,
}

impl Trajectory {
    fn new(initial_energy: f64, record: bool) -> Self {
        Self {
            steps: 0,
            sweeps: 0,
            initial_energy,
            energy_trace: record.then(Vec::new),
            flipped: record.then(Vec::new),
        }
    }

    fn accept(&mut self, unit: usize, energy: f64) {
        self.steps += 1;
        if let Some(t) = self.energy_trace.as_mut() {
            t.push(energy);
        }
        if let Some(f) = self.flipped.as_mut() {
            f.push(unit);
        }
    }
}

/// Flips unsatisfied spins one at a time until every spin is satisfied.
pub fn run_random_dynamics(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    seed: u64,
    opts: DynamicsOptions,
) -> Result<(SpinConfiguration, Trajectory)> {
    run_random_dynamics_with(j, s0, &mut seeded_rng(seed), opts)
}

pub fn run_random_dynamics_with(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    rng: &mut Rng,
    opts: DynamicsOptions,
) -> Result<(SpinConfiguration, Trajectory)> {
    check_dims(j, s0)?;
    let n = j.size();
    let tol = j.tie_tolerance();
    let cap = opts.sequential_cap(n);
    let mut s = s0.clone();
    let mut h: Vec<f64> = (0..n).map(|i| local_field_unchecked(j, &s, i)).collect();
    let mut e = energy_unchecked(j, &s);
    let mut traj = Trajectory::new(e, opts.record);
    let mut order: Vec<usize> = (0..n).collect();

    loop {
        if traj.sweeps >= cap {
            return Err(Error::NoConvergence(cap));
        }
        order.shuffle(rng);
        traj.sweeps += 1;
        let mut flips = 0;
        for &i in &order {
            let si = s.spin(i);
            let stability = si * h[i];
            if stability < -tol {
                e += 4.0 * stability;
                s.flip(i);
                // s_i went from si to -si: h_k changes by -2 si J_ki.
                let delta = -2.0 * si;
                for (hk, &w) in h.iter_mut().zip(j.row(i)) {
                    *hk += delta * w;
                }
                traj.accept(i, e);
                flips += 1;
            }
        }
        if flips == 0 {
            return Ok((s, traj));
        }
    }
}

/// Flips whole domains with negative stability until every domain is
/// stable.
pub fn run_domain_dynamics(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    p: &DomainPartition,
    seed: u64,
    opts: DynamicsOptions,
) -> Result<(SpinConfiguration, Trajectory)> {
    run_domain_dynamics_with(j, s0, p, &mut seeded_rng(seed), opts)
}

pub fn run_domain_dynamics_with(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    p: &DomainPartition,
    rng: &mut Rng,
    opts: DynamicsOptions,
) -> Result<(SpinConfiguration, Trajectory)> {
    check_dims(j, s0)?;
    check_partition(j, p)?;
    let n = j.size();
    let tol = j.tie_tolerance();
    let cap = opts.sequential_cap(n);
    let mut s = s0.clone();
    let mut h: Vec<f64> = (0..n).map(|i| local_field_unchecked(j, &s, i)).collect();
    // Field on spin i from its own domain.
    let mut h_own: Vec<f64> = (0..n)
        .map(|i| {
            p.members(p.domain_of(i))
                .iter()
                .map(|&m| j.get(i, m) * s.spin(m))
                .sum()
        })
        .collect();
    let mut e = energy_unchecked(j, &s);
    let mut traj = Trajectory::new(e, opts.record);
    let mut order: Vec<usize> = (0..p.num_domains()).collect();

    loop {
        if traj.sweeps >= cap {
            return Err(Error::NoConvergence(cap));
        }
        order.shuffle(rng);
        traj.sweeps += 1;
        let mut flips = 0;
        for &l in &order {
            let members = p.members(l);
            let f: f64 = members
                .iter()
                .map(|&i| s.spin(i) * (h[i] - h_own[i]))
                .sum();
            if f < -tol * members.len() as f64 {
                e += 4.0 * f;
                for &i in members {
                    let delta = -2.0 * s.spin(i);
                    s.flip(i);
                    for (hk, &w) in h.iter_mut().zip(j.row(i)) {
                        *hk += delta * w;
                    }
                }
                for &i in members {
                    h_own[i] = -h_own[i];
                }
                traj.accept(l, e);
                flips += 1;
            }
        }
        if flips == 0 {
            return Ok((s, traj));
        }
    }
}

/// Result of synchronous dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum SynchronousOutcome {
    /// Every spin is satisfied in `state`.
    FixedPoint {
        state: SpinConfiguration,
        sweeps: usize,
    },
    /// One synchronous update maps `a` to `b` and `b` back to `a`.
    TwoCycle {
        a: SpinConfiguration,
        b: SpinConfiguration,
        sweeps: usize,
    },
}

impl SynchronousOutcome {
    pub fn sweeps(&self) -> usize {
        match self {
            Self::FixedPoint { sweeps, .. } | Self::TwoCycle { sweeps, .. } => *sweeps,
        }
    }
}

/// One synchronous update: every unsatisfied spin flips at once.
pub fn synchronous_step(j: &ConnectionMatrix, s: &SpinConfiguration) -> Result<SpinConfiguration> {
    check_dims(j, s)?;
    Ok(synchronous_step_unchecked(j, s))
}

fn synchronous_step_unchecked(j: &ConnectionMatrix, s: &SpinConfiguration) -> SpinConfiguration {
    let tol = j.tie_tolerance();
    let mut next = s.clone();
    for i in 0..j.size() {
        if s.spin(i) * local_field_unchecked(j, s, i) < -tol {
            next.flip(i);
        }
    }
    next
}

/// Iterates synchronous updates until a fixed point or a length-2 cycle
/// appears. Longer cycles are reported as [`Error::NoConvergence`].
pub fn run_synchronous_dynamics(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    opts: DynamicsOptions,
) -> Result<SynchronousOutcome> {
    check_dims(j, s0)?;
    let cap = opts.synchronous_cap(j.size());
    if cap == 0 {
        return Err(Error::NoConvergence(0));
    }
    let mut prev: Option<SpinConfiguration> = None;
    let mut cur = s0.clone();
    for sweep in 1..=cap {
        let next = synchronous_step_unchecked(j, &cur);
        if next == cur {
            return Ok(SynchronousOutcome::FixedPoint {
                state: cur,
                sweeps: sweep,
            });
        }
        if prev.as_ref() == Some(&next) {
            return Ok(SynchronousOutcome::TwoCycle {
                a: next,
                b: cur,
                sweeps: sweep,
            });
        }
        prev = Some(cur);
        cur = next;
    }
    Err(Error::NoConvergence(cap))
}

/// Relative contributions of the domain and defrost phases to the depth of
/// the final minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthShares {
    /// `D / E`.
    pub d: f64,
    /// `(E - D) / E`.
    pub r: f64,
}

impl DepthShares {
    /// Defined only when `D < 0` (and hence `E <= D < 0`).
    pub fn new(domain_energy: f64, final_energy: f64) -> Option<Self> {
        if domain_energy >= 0.0 || final_energy >= 0.0 {
            return None;
        }
        // Written with a positive denominator so an exact tie gives +0.
        Some(Self {
            d: domain_energy / final_energy,
            r: (domain_energy - final_energy) / -final_energy,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Energy `D` at the domain local minimum.
    pub domain_energy: f64,
    /// Energy `E` after defrosting.
    pub final_energy: f64,
    pub domain_state: SpinConfiguration,
    pub final_state: SpinConfiguration,
    /// `None` when `D >= 0`.
    pub shares: Option<DepthShares>,
    pub domain_trajectory: Trajectory,
    pub defrost_trajectory: Trajectory,
}

impl RunOutcome {
    pub fn r_share(&self) -> Option<f64> {
        self.shares.map(|s| s.r)
    }
}

/// Domain dynamics to a domain local minimum, then random dynamics from
/// that state to a local minimum.
pub fn minimize_two_phase(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    p: &DomainPartition,
    seed: u64,
    opts: DynamicsOptions,
) -> Result<RunOutcome> {
    minimize_two_phase_with(j, s0, p, &mut seeded_rng(seed), opts)
}

pub fn minimize_two_phase_with(
    j: &ConnectionMatrix,
    s0: &SpinConfiguration,
    p: &DomainPartition,
    rng: &mut Rng,
    opts: DynamicsOptions,
) -> Result<RunOutcome> {
    let (domain_state, domain_trajectory) = run_domain_dynamics_with(j, s0, p, rng, opts)?;
    let (final_state, defrost_trajectory) = run_random_dynamics_with(j, &domain_state, rng, opts)?;
    let domain_energy = energy_unchecked(j, &domain_state);
    let final_energy = energy_unchecked(j, &final_state);
    Ok(RunOutcome {
        domain_energy,
        final_energy,
        shares: DepthShares::new(domain_energy, final_energy),
        domain_state,
        final_state,
        domain_trajectory,
        defrost_trajectory,
    })
}
