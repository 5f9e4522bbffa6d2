//! Exhaustive enumeration of local minima and domain local minima for small
//! instances.
//!
//! Everything here is computed by direct summation over the matrix, without
//! the incremental bookkeeping used by the dynamics, so the two can be
//! checked against each other.

use crate::error::{Error, Result};
use crate::model::{check_partition, ConnectionMatrix, DomainPartition, SpinConfiguration};

/// Largest number of enumerated units (spins or domains).
pub const MAX_ENUMERATION: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub state: SpinConfiguration,
    pub energy: f64,
}

/// Minima found by enumeration, one representative per `{s, -s}` pair (the
/// one whose first spin is `+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaSet {
    pub minima: Vec<Minimum>,
    /// Lowest energy over every enumerated configuration.
    pub global_minimum_energy: f64,
    /// Number of configurations examined (up to global flip).
    pub enumerated: usize,
}

impl MinimaSet {
    /// Whether `s` or `-s` is in the set.
    pub fn contains(&self, s: &SpinConfiguration) -> bool {
        let c = s.canonical();
        self.minima.iter().any(|m| m.state == c)
    }

    pub fn len(&self) -> usize {
        self.minima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minima.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = &SpinConfiguration> {
        self.minima.iter().map(|m| &m.state)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub local_minima: MinimaSet,
    pub domain_local_minima: Option<MinimaSet>,
}

fn direct_energy(j: &ConnectionMatrix, s: &[i8]) -> f64 {
    let mut e = 0.0;
    for a in 0..s.len() {
        for b in 0..s.len() {
            e -= j.get(a, b) * s[a] as f64 * s[b] as f64;
        }
    }
    e
}

fn all_spins_satisfied(j: &ConnectionMatrix, s: &[i8]) -> bool {
    (0..s.len()).all(|a| {
        let h: f64 = (0..s.len()).map(|b| j.get(a, b) * s[b] as f64).sum();
        s[a] as f64 * h >= -j.tie_tolerance()
    })
}

fn all_domains_stable(j: &ConnectionMatrix, s: &[i8], p: &DomainPartition) -> bool {
    p.domains().all(|members| {
        let mut f = 0.0;
        for &a in members {
            for b in 0..s.len() {
                if p.domain_of(b) != p.domain_of(a) {
                    f += s[a] as f64 * j.get(a, b) * s[b] as f64;
                }
            }
        }
        f >= -j.tie_tolerance() * members.len() as f64
    })
}

/// Every configuration in which all spins are satisfied.
pub fn brute_force_minima(j: &ConnectionMatrix) -> Result<MinimaSet> {
    let n = j.size();
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge(n));
    }
    let mut minima = Vec::new();
    let mut global = f64::INFINITY;
    let count = 1u64 << (n - 1);
    for bits in 0..count {
        // Bit 0 fixed to +1 picks the canonical representative.
        let s = SpinConfiguration::from_bits(n, bits << 1 | 1);
        let e = direct_energy(j, s.as_slice());
        global = global.min(e);
        if all_spins_satisfied(j, s.as_slice()) {
            minima.push(Minimum { state: s, energy: e });
        }
    }
    Ok(MinimaSet {
        minima,
        global_minimum_energy: global,
        enumerated: count as usize,
    })
}

/// Every assignment of one sign per domain, applied to the within-domain
/// pattern of `reference`, whose domains are all stable.
///
/// With a block-constant reference and a partition that follows the blocks,
/// this is exactly the set of states domain dynamics can visit from
/// block-constant starts.
pub fn brute_force_domain_minima(
    j: &ConnectionMatrix,
    p: &DomainPartition,
    reference: &SpinConfiguration,
) -> Result<MinimaSet> {
    check_partition(j, p)?;
    if reference.len() != j.size() {
        return Err(Error::DimensionMismatch {
            expected: j.size(),
            actual: reference.len(),
        });
    }
    let n = p.num_domains();
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge(n));
    }
    let mut minima = Vec::new();
    let mut global = f64::INFINITY;
    // The domain holding spin 0 keeps sign +1 relative to the canonical
    // reference; its mirror image is the global flip.
    let base = reference.canonical();
    let anchor = p.domain_of(0);
    let others: Vec<usize> = (0..n).filter(|&l| l != anchor).collect();
    let count = 1u64 << others.len();
    for bits in 0..count {
        let mut sign = vec![1i8; n];
        for (b, &l) in others.iter().enumerate() {
            if bits >> b & 1 == 0 {
                sign[l] = -1;
            }
        }
        let spins: Vec<i8> = base
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &v)| v * sign[p.domain_of(i)])
            .collect();
        let e = direct_energy(j, &spins);
        global = global.min(e);
        if all_domains_stable(j, &spins, p) {
            let state = SpinConfiguration::new(spins)?;
            minima.push(Minimum { state, energy: e });
        }
    }
    Ok(MinimaSet {
        minima,
        global_minimum_energy: global,
        enumerated: count as usize,
    })
}

/// Local minima, plus domain local minima when a partition is given (using
/// the all-up reference unless one is supplied).
pub fn oracle_report(
    j: &ConnectionMatrix,
    partition: Option<(&DomainPartition, Option<&SpinConfiguration>)>,
) -> Result<OracleReport> {
    let local_minima = brute_force_minima(j)?;
    let domain_local_minima = match partition {
        Some((p, reference)) => {
            let all_up = SpinConfiguration::all_up(j.size());
            Some(brute_force_domain_minima(j, p, reference.unwrap_or(&all_up))?)
        }
        None => None,
    };
    Ok(OracleReport {
        local_minima,
        domain_local_minima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_every_state_is_minimal() {
        let j = ConnectionMatrix::zeros(3).unwrap();
        let m = brute_force_minima(&j).unwrap();
        // 8 configurations, 4 up to global flip.
        assert_eq!(m.len(), 4);
        assert_eq!(m.global_minimum_energy, 0.0);
        for bits in 0..8 {
            assert!(m.contains(&SpinConfiguration::from_bits(3, bits)));
        }
    }

    #[test]
    fn ferromagnetic_pair() {
        let j = ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = brute_force_minima(&j).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.minima[0].state.as_slice(), &[1, 1]);
        assert_eq!(m.minima[0].energy, -2.0);
        assert!(m.contains(&SpinConfiguration::new(vec![-1, -1]).unwrap()));
        assert!(!m.contains(&SpinConfiguration::new(vec![1, -1]).unwrap()));
        assert_eq!(m.global_minimum_energy, -2.0);
    }

    #[test]
    fn singleton_partition_matches_spin_oracle() {
        let j = ConnectionMatrix::from_upper_fn(7, |a, b| ((a * 13 + b * 7) % 11) as f64 / 5.0 - 1.0).unwrap();
        let p = DomainPartition::singletons(7).unwrap();
        let reference = SpinConfiguration::new(vec![1, -1, 1, 1, -1, -1, 1]).unwrap();
        let spin = brute_force_minima(&j).unwrap();
        let dom = brute_force_domain_minima(&j, &p, &reference).unwrap();
        let mut a: Vec<_> = spin.states().cloned().collect();
        let mut b: Vec<_> = dom.states().cloned().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(spin.global_minimum_energy, dom.global_minimum_energy);
    }

    #[test]
    fn too_large_is_rejected() {
        let j = ConnectionMatrix::zeros(25).unwrap();
        assert_eq!(brute_force_minima(&j).unwrap_err(), Error::TooLarge(25));
        let p = DomainPartition::singletons(25).unwrap();
        assert!(matches!(
            brute_force_domain_minima(&j, &p, &SpinConfiguration::all_up(25)),
            Err(Error::TooLarge(25))
        ));
    }

    #[test]
    fn report_with_and_without_partition() {
        let j = ConnectionMatrix::zeros(4).unwrap();
        assert!(oracle_report(&j, None).unwrap().domain_local_minima.is_none());
        let p = DomainPartition::from_sizes(&[2, 2]).unwrap();
        let r = oracle_report(&j, Some((&p, None))).unwrap();
        assert_eq!(r.domain_local_minima.unwrap().len(), 2);
    }
}
