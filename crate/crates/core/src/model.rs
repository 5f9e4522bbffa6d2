//! Connection matrices, spin configurations, domain partitions and the
//! energy / field formulas evaluated on them.
//!
//! Energy uses the full ordered double sum `E(s) = -sum_{i,j} J_ij s_i s_j`,
//! so every coupling is counted twice and flipping spin `i` changes the
//! energy by `4 s_i h_i`.

use crate::error::{Error, Result};

/// Largest tolerated `|J_ij - J_ji|` when validating a matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Relative factor used to derive a matrix's tie tolerance from its largest
/// absolute row sum.
const TIE_FACTOR: f64 = 1e-10;

/// Symmetric real matrix with zero diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    size: usize,
    entries: Vec<f64>,
    tie_tolerance: f64,
}

impl ConnectionMatrix {
    /// Validates a square matrix given as rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::EmptyMatrix);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    expected: size,
                });
            }
        }
        let entries = rows.iter().flatten().copied().collect();
        Self::from_row_major(size, entries)
    }

    /// Validates a row-major buffer of `size * size` entries.
    pub fn from_row_major(size: usize, entries: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                actual: entries.len(),
            });
        }
        for i in 0..size {
            for j in 0..size {
                if !entries[i * size + j].is_finite() {
                    return Err(Error::NonFiniteEntry { i, j });
                }
            }
        }
        for i in 0..size {
            if entries[i * size + i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in (i + 1)..size {
                let delta = (entries[i * size + j] - entries[j * size + i]).abs();
                if delta > SYMMETRY_TOLERANCE {
                    return Err(Error::AsymmetricEntry { i, j, delta });
                }
            }
        }
        let max_row_sum = entries
            .chunks(size)
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0_f64, f64::max);
        Ok(Self {
            size,
            entries,
            tie_tolerance: TIE_FACTOR * max_row_sum,
        })
    }

    /// Builds a matrix from a symmetric generator `f(i, j)` evaluated for
    /// `i < j`; the diagonal is zero.
    pub fn from_upper_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = vec![0.0; size * size];
        for i in 0..size {
            for j in (i + 1)..size {
                let v = f(i, j);
                entries[i * size + j] = v;
                entries[j * size + i] = v;
            }
        }
        Self::from_row_major(size, entries)
    }

    pub fn zeros(size: usize) -> Result<Self> {
        Self::from_row_major(size, vec![0.0; size * size])
    }

    /// Number of spins N.
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size)
    }

    /// Magnitude below which a negative stability value `s_i h_i` (or a
    /// domain's `F_l / k_l`) is treated as a zero-field tie.
    ///
    /// Fields accumulate rounding noise, so an exact tie can surface as a
    /// tiny negative number; flipping on it would not lower the energy.
    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tolerance
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// A configuration of ±1 spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some((index, &v)) = spins.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidSpin {
                index,
                value: v as i64,
            });
        }
        Ok(Self(spins))
    }

    pub fn all_up(len: usize) -> Self {
        Self(vec![1; len])
    }

    /// Configuration whose spin `i` is `+1` iff bit `i` of `bits` is set.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        Self((0..len).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    #[inline]
    pub fn spin(&self, i: usize) -> f64 {
        self.0[i] as f64
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    /// The globally flipped configuration `-s`.
    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&v| -v).collect())
    }

    /// Representative of `{s, -s}` whose first spin is `+1`.
    pub fn canonical(&self) -> Self {
        match self.0.first() {
            Some(-1) => self.negated(),
            _ => self.clone(),
        }
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }
}

/// Disjoint cover of the spin indices by non-empty domains.
///
/// Domains need not be contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPartition {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl DomainPartition {
    /// Builds a partition from 0-based domain labels, one per spin. Labels
    /// must cover `0..n` with every domain non-empty.
    pub fn from_assignment(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::PartitionMismatch("partition has no spins".into()));
        }
        let n = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); n];
        for (i, &l) in assignment.iter().enumerate() {
            members[l].push(i);
        }
        if let Some(l) = members.iter().position(Vec::is_empty) {
            return Err(Error::PartitionMismatch(format!("domain {} is empty", l + 1)));
        }
        Ok(Self {
            assignment,
            members,
        })
    }

    /// Same as [`from_assignment`](Self::from_assignment) but requires
    /// exactly `n` domains.
    pub fn with_domain_count(assignment: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(i) = assignment.iter().position(|&l| l >= n) {
            return Err(Error::PartitionMismatch(format!(
                "spin {} assigned to domain {} but only {} domains declared",
                i + 1,
                assignment[i] + 1,
                n
            )));
        }
        let p = Self::from_assignment(assignment)?;
        if p.num_domains() != n {
            return Err(Error::PartitionMismatch(format!(
                "domain {} is empty",
                p.num_domains() + 1
            )));
        }
        Ok(p)
    }

    /// Contiguous domains with the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::PartitionMismatch("domain sizes must be positive".into()));
        }
        let assignment = sizes
            .iter()
            .enumerate()
            .flat_map(|(l, &k)| std::iter::repeat_n(l, k))
            .collect();
        Self::from_assignment(assignment)
    }

    /// Every spin in its own domain.
    pub fn singletons(len: usize) -> Result<Self> {
        Self::from_assignment((0..len).collect())
    }

    /// One domain covering every spin.
    pub fn whole(len: usize) -> Result<Self> {
        Self::from_assignment(vec![0; len])
    }

    /// Number of spins covered.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_domains(&self) -> usize {
        self.members.len()
    }

    pub fn domain_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn members(&self, l: usize) -> &[usize] {
        &self.members[l]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn domains(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(Vec::as_slice)
    }
}

/// Energy decomposition into inter-domain and per-domain intra parts.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub domain_part: f64,
    pub intra_parts: Vec<f64>,
}

impl EnergyBreakdown {
    /// `|total - domain_part - sum(intra_parts)|`.
    pub fn residual(&self) -> f64 {
        (self.total - self.domain_part - self.intra_parts.iter().sum::<f64>()).abs()
    }
}

pub(crate) fn check_dims(j: &ConnectionMatrix, s: &SpinConfiguration) -> Result<()> {
    if j.size() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: j.size(),
            actual: s.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_partition(j: &ConnectionMatrix, p: &DomainPartition) -> Result<()> {
    if p.len() != j.size() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} spins, matrix has {}",
            p.len(),
            j.size()
        )));
    }
    Ok(())
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    Ok(())
}

/// `E(s) = -sum_{i,j} J_ij s_i s_j`.
pub fn energy(j: &ConnectionMatrix, s: &SpinConfiguration) -> Result<f64> {
    check_dims(j, s)?;
    Ok(energy_unchecked(j, s))
}

pub(crate) fn energy_unchecked(j: &ConnectionMatrix, s: &SpinConfiguration) -> f64 {
    let spins = s.as_slice();
    let mut e = 0.0;
    for (i, row) in j.rows().enumerate() {
        let h: f64 = row.iter().zip(spins).map(|(&w, &sj)| w * sj as f64).sum();
        e -= spins[i] as f64 * h;
    }
    e
}

/// `h_i = sum_j J_ij s_j`.
pub fn local_field(j: &ConnectionMatrix, s: &SpinConfiguration, i: usize) -> Result<f64> {
    check_dims(j, s)?;
    check_index(i, j.size())?;
    Ok(local_field_unchecked(j, s, i))
}

#[inline]
pub(crate) fn local_field_unchecked(j: &ConnectionMatrix, s: &SpinConfiguration, i: usize) -> f64 {
    j.row(i)
        .iter()
        .zip(s.as_slice())
        .map(|(&w, &sj)| w * sj as f64)
        .sum()
}

/// Whether spin `i` is satisfied (`s_i h_i >= 0`).
pub fn is_satisfied(j: &ConnectionMatrix, s: &SpinConfiguration, i: usize) -> Result<bool> {
    let h = local_field(j, s, i)?;
    Ok(s.spin(i) * h >= -j.tie_tolerance())
}

/// Domain local field: the local field of spin `i` with contributions from
/// its own domain removed.
pub fn domain_local_field(
    j: &ConnectionMatrix,
    s: &SpinConfiguration,
    p: &DomainPartition,
    i: usize,
) -> Result<f64> {
    check_dims(j, s)?;
    check_partition(j, p)?;
    check_index(i, j.size())?;
    let h = local_field_unchecked(j, s, i);
    let own: f64 = p
        .members(p.domain_of(i))
        .iter()
        .map(|&m| j.get(i, m) * s.spin(m))
        .sum();
    Ok(h - own)
}

/// Domain stability `F_l = sum_{i in l} s_i h_i^(d)`; the domain is stable
/// iff `F_l >= 0`.
pub fn domain_stability(
    j: &ConnectionMatrix,
    s: &SpinConfiguration,
    p: &DomainPartition,
    l: usize,
) -> Result<f64> {
    check_dims(j, s)?;
    check_partition(j, p)?;
    check_index(l, p.num_domains())?;
    let mut f = 0.0;
    for &i in p.members(l) {
        f += s.spin(i) * domain_local_field(j, s, p, i)?;
    }
    Ok(f)
}

/// Splits the energy into the inter-domain part `-sum_l F_l` and the
/// per-domain intra parts `-sum_{i,j in l} J_ij s_i s_j`.
pub fn energy_breakdown(
    j: &ConnectionMatrix,
    s: &SpinConfiguration,
    p: &DomainPartition,
) -> Result<EnergyBreakdown> {
    check_dims(j, s)?;
    check_partition(j, p)?;
    let mut domain_part = 0.0;
    for l in 0..p.num_domains() {
        domain_part -= domain_stability(j, s, p, l)?;
    }
    let intra_parts = p
        .domains()
        .map(|members| {
            let mut e = 0.0;
            for &a in members {
                for &b in members {
                    e -= j.get(a, b) * s.spin(a) * s.spin(b);
                }
            }
            e
        })
        .collect();
    Ok(EnergyBreakdown {
        total: energy_unchecked(j, s),
        domain_part,
        intra_parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(w: f64) -> ConnectionMatrix {
        ConnectionMatrix::from_rows(&[vec![0.0, w], vec![w, 0.0]]).unwrap()
    }

    fn spins(v: &[i8]) -> SpinConfiguration {
        SpinConfiguration::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validate_accepts_zero_and_symmetric() {
        assert!(ConnectionMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]).is_ok());
        assert!(ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn validate_rejects_asymmetry() {
        let err = ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::AsymmetricEntry {
                i: 0,
                j: 1,
                delta: 0.5
            }
        );
    }

    #[test]
    fn validate_rejects_diagonal_and_ragged() {
        let err = ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 2.0]]).unwrap_err();
        assert_eq!(err, Error::NonzeroDiagonal(1));
        let err = ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { row: 1, len: 1, expected: 2 }));
        assert_eq!(ConnectionMatrix::from_rows(&[]).unwrap_err(), Error::EmptyMatrix);
    }

    #[test]
    fn symmetry_tolerance_boundary() {
        assert!(ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 5e-13, 0.0]]).is_ok());
        assert!(ConnectionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-11, 0.0]]).is_err());
    }

    #[test]
    fn spin_values_validated() {
        assert_eq!(
            SpinConfiguration::new(vec![1, 0, -1]).unwrap_err(),
            Error::InvalidSpin { index: 1, value: 0 }
        );
    }

    #[test]
    fn two_spin_energies() {
        let j = pair(1.0);
        assert_eq!(energy(&j, &spins(&[1, 1])).unwrap(), -2.0);
        assert_eq!(energy(&j, &spins(&[1, -1])).unwrap(), 2.0);
        assert_eq!(local_field(&j, &spins(&[1, 1]), 0).unwrap(), 1.0);
    }

    #[test]
    fn dimension_and_index_errors() {
        let j = pair(1.0);
        assert!(matches!(
            energy(&j, &spins(&[1, 1, 1])),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
        assert!(matches!(
            local_field(&j, &spins(&[1, 1]), 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        let p = DomainPartition::singletons(3).unwrap();
        assert!(matches!(
            domain_local_field(&j, &spins(&[1, 1]), &p, 0),
            Err(Error::PartitionMismatch(_))
        ));
        let p = DomainPartition::singletons(2).unwrap();
        assert!(matches!(
            domain_stability(&j, &spins(&[1, 1]), &p, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_matrix_everything_satisfied() {
        let j = ConnectionMatrix::zeros(4).unwrap();
        let s = spins(&[1, -1, -1, 1]);
        let p = DomainPartition::from_sizes(&[2, 2]).unwrap();
        for i in 0..4 {
            assert_eq!(local_field(&j, &s, i).unwrap(), 0.0);
            assert!(is_satisfied(&j, &s, i).unwrap());
        }
        for l in 0..2 {
            assert_eq!(domain_stability(&j, &s, &p, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn partition_construction() {
        let p = DomainPartition::from_sizes(&[2, 3]).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1, 1, 1]);
        assert_eq!(p.sizes(), vec![2, 3]);
        assert!(DomainPartition::from_assignment(vec![0, 2, 2]).is_err());
        assert!(DomainPartition::with_domain_count(vec![0, 1, 1], 3).is_err());
        let scattered = DomainPartition::from_assignment(vec![1, 0, 1, 0]).unwrap();
        assert_eq!(scattered.members(0), &[1, 3]);
    }

    #[test]
    fn single_domain_has_zero_domain_field() {
        let j = ConnectionMatrix::from_upper_fn(5, |i, k| (i * 7 + k) as f64 * 0.1 - 0.4).unwrap();
        let s = spins(&[1, -1, 1, 1, -1]);
        let p = DomainPartition::whole(5).unwrap();
        for i in 0..5 {
            assert_eq!(domain_local_field(&j, &s, &p, i).unwrap(), 0.0);
        }
        let b = energy_breakdown(&j, &s, &p).unwrap();
        assert_eq!(b.domain_part, 0.0);
        assert!((b.intra_parts[0] - b.total).abs() < 1e-12);
    }

    fn arb_instance(max_n: usize) -> impl Strategy<Value = (ConnectionMatrix, SpinConfiguration, DomainPartition)> {
        (2..=max_n).prop_flat_map(|n| {
            (
                proptest::collection::vec(-1.0f64..1.0, n * n),
                proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n),
                proptest::collection::vec(0..n, n),
            )
                .prop_map(move |(raw, sp, labels)| {
                    let j = ConnectionMatrix::from_upper_fn(n, |a, b| raw[a * n + b]).unwrap();
                    // Compact the labels so no domain is empty.
                    let mut seen: Vec<usize> = labels.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    let assignment = labels
                        .iter()
                        .map(|l| seen.binary_search(l).unwrap())
                        .collect();
                    (
                        j,
                        SpinConfiguration::new(sp).unwrap(),
                        DomainPartition::from_assignment(assignment).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn energy_is_even((j, s, _p) in arb_instance(12)) {
            prop_assert_eq!(energy(&j, &s).unwrap(), energy(&j, &s.negated()).unwrap());
        }

        #[test]
        fn flip_changes_energy_by_four_s_h((j, s, _p) in arb_instance(12), pick in 0usize..64) {
            let i = pick % s.len();
            let before = energy(&j, &s).unwrap();
            let after = energy(&j, &s.flipped(i)).unwrap();
            let predicted = 4.0 * s.spin(i) * local_field(&j, &s, i).unwrap();
            prop_assert!((after - before - predicted).abs() <= 1e-9 * (1.0 + before.abs()));
        }

        #[test]
        fn breakdown_identity((j, s, p) in arb_instance(16)) {
            let b = energy_breakdown(&j, &s, &p).unwrap();
            prop_assert!(b.residual() <= 1e-9 * (1.0 + b.total.abs()));
        }

        #[test]
        fn domain_flip_changes_energy_by_four_f((j, s, p) in arb_instance(12), pick in 0usize..64) {
            let m = pick % p.num_domains();
            let f = domain_stability(&j, &s, &p, m).unwrap();
            let before = energy_breakdown(&j, &s, &p).unwrap();
            let mut t = s.clone();
            for &i in p.members(m) {
                t.flip(i);
            }
            let after = energy_breakdown(&j, &t, &p).unwrap();
            let tol = 1e-9 * (1.0 + before.total.abs());
            prop_assert!((after.total - before.total - 4.0 * f).abs() <= tol);
            prop_assert!((after.domain_part - before.domain_part - 4.0 * f).abs() <= tol);
            for (a, b) in after.intra_parts.iter().zip(&before.intra_parts) {
                prop_assert!((a - b).abs() <= tol);
            }
        }

        #[test]
        fn singleton_domains_reduce_to_spins((j, s, _p) in arb_instance(10)) {
            let p = DomainPartition::singletons(s.len()).unwrap();
            let b = energy_breakdown(&j, &s, &p).unwrap();
            prop_assert!((b.domain_part - b.total).abs() <= 1e-12 * (1.0 + b.total.abs()));
            prop_assert!(b.intra_parts.iter().all(|&x| x == 0.0));
            for i in 0..s.len() {
                prop_assert_eq!(domain_local_field(&j, &s, &p, i).unwrap(), local_field(&j, &s, i).unwrap());
                let f = domain_stability(&j, &s, &p, i).unwrap();
                prop_assert_eq!(f, s.spin(i) * local_field(&j, &s, i).unwrap());
            }
        }
    }
}
