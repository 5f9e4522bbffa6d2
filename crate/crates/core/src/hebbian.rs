//! Pattern matrices built from repeated (optionally distorted) column
//! groups, the Hebbian connection matrix of their scalar products, and the
//! partition / start-state builders used by the experiments.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::model::{ConnectionMatrix, DomainPartition, SpinConfiguration};
use crate::seed::{seeded_rng, Rng};

/// Group layout of the pattern columns plus the distortion level.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    sizes: Vec<usize>,
    distortion: f64,
}

impl GroupSpec {
    pub fn new(sizes: Vec<usize>, distortion: f64) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSpec("at least one group is required".into()));
        }
        if let Some(l) = sizes.iter().position(|&k| k == 0) {
            return Err(Error::InvalidSpec(format!("group {} has size 0", l + 1)));
        }
        if !(0.0..0.5).contains(&distortion) {
            return Err(Error::InvalidSpec(format!(
                "distortion {distortion} outside [0, 0.5)"
            )));
        }
        Ok(Self { sizes, distortion })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_groups(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    /// Contiguous index range of each group.
    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.sizes.iter().scan(0, |start, &k| {
            let r = *start..*start + k;
            *start += k;
            Some(r)
        })
    }
}

/// Draws `groups` positive sizes summing to `total`, none above `max_size`.
///
/// Every group starts at size 1; the remaining units are dealt one at a time
/// to a uniformly chosen group that is still below the cap.
pub fn random_group_sizes(total: usize, groups: usize, max_size: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if groups == 0 || groups > total {
        return Err(Error::InvalidSpec(format!(
            "cannot split {total} spins into {groups} non-empty groups"
        )));
    }
    if max_size.saturating_mul(groups) < total {
        return Err(Error::InvalidSpec(format!(
            "{groups} groups of at most {max_size} cannot cover {total} spins"
        )));
    }
    let mut sizes = vec![1; groups];
    let mut open: Vec<usize> = (0..groups).filter(|_| max_size > 1).collect();
    for _ in groups..total {
        let slot = rng.random_range(0..open.len());
        let g = open[slot];
        sizes[g] += 1;
        if sizes[g] == max_size {
            open.swap_remove(slot);
        }
    }
    Ok(sizes)
}

/// M×N matrix of ±1 entries, stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatrix {
    dim: usize,
    columns: usize,
    data: Vec<i8>,
}

impl PatternMatrix {
    /// Builds a pattern matrix from its columns; every column must have
    /// length `dim` and entries ±1.
    pub fn from_columns(dim: usize, cols: &[Vec<i8>]) -> Result<Self> {
        if dim == 0 || cols.is_empty() {
            return Err(Error::InvalidSpec("pattern matrix must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(dim * cols.len());
        for (c, col) in cols.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: col.len(),
                });
            }
            if let Some(r) = col.iter().position(|&v| v != 1 && v != -1) {
                return Err(Error::InvalidSpec(format!(
                    "pattern entry ({}, {}) is {}",
                    r + 1,
                    c + 1,
                    col[r]
                )));
            }
            data.extend_from_slice(col);
        }
        Ok(Self {
            dim,
            columns: cols.len(),
            data,
        })
    }

    /// Pattern dimension M.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns N.
    pub fn num_columns(&self) -> usize {
        self.columns
    }

    pub fn column(&self, i: usize) -> &[i8] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[col * self.dim + row]
    }

    pub fn dot(&self, a: usize, b: usize) -> i64 {
        self.column(a)
            .iter()
            .zip(self.column(b))
            .map(|(&x, &y)| (x * y) as i64)
            .sum()
    }
}

fn random_sign(rng: &mut Rng) -> i8 {
    if rng.random_bool(0.5) {
        1
    } else {
        -1
    }
}

/// One uniform ±1 prototype per group; each column of group `l` is a copy of
/// prototype `l` with every coordinate negated independently with
/// probability `b`. Groups occupy contiguous column ranges.
pub fn generate_pattern_matrix(dim: usize, spec: &GroupSpec, seed: u64) -> Result<PatternMatrix> {
    generate_pattern_matrix_with(dim, spec, &mut seeded_rng(seed))
}

pub fn generate_pattern_matrix_with(dim: usize, spec: &GroupSpec, rng: &mut Rng) -> Result<PatternMatrix> {
    if dim == 0 {
        return Err(Error::InvalidSpec("pattern dimension must be at least 1".into()));
    }
    let b = spec.distortion();
    let mut data = Vec::with_capacity(dim * spec.total());
    for &k in spec.sizes() {
        let prototype: Vec<i8> = (0..dim).map(|_| random_sign(rng)).collect();
        for _ in 0..k {
            if b == 0.0 {
                data.extend_from_slice(&prototype);
            } else {
                data.extend(prototype.iter().map(|&x| if rng.random_bool(b) { -x } else { x }));
            }
        }
    }
    Ok(PatternMatrix {
        dim,
        columns: spec.total(),
        data,
    })
}

/// `J_ij = (x_i, x_j) / M` off the diagonal, zero on it.
pub fn hebbian_matrix(x: &PatternMatrix) -> Result<ConnectionMatrix> {
    if x.num_columns() < 2 {
        return Err(Error::InvalidSpec("Hebbian matrix needs at least 2 columns".into()));
    }
    let m = x.dim() as f64;
    ConnectionMatrix::from_upper_fn(x.num_columns(), |a, b| x.dot(a, b) as f64 / m)
}

/// One domain per group, covering exactly that group's index range.
pub fn cluster_partition(spec: &GroupSpec) -> Result<DomainPartition> {
    DomainPartition::from_sizes(spec.sizes()).map_err(|e| Error::InvalidSpec(e.to_string()))
}

/// A uniform random permutation of the spins cut into `len / k` domains of
/// size `k`.
pub fn random_partition(len: usize, k: usize, seed: u64) -> Result<DomainPartition> {
    random_partition_with(len, k, &mut seeded_rng(seed))
}

pub fn random_partition_with(len: usize, k: usize, rng: &mut Rng) -> Result<DomainPartition> {
    if k == 0 || len == 0 || !len.is_multiple_of(k) {
        return Err(Error::NotDivisible { n: len, k });
    }
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(rng);
    let mut assignment = vec![0; len];
    for (pos, &i) in perm.iter().enumerate() {
        assignment[i] = pos / k;
    }
    DomainPartition::from_assignment(assignment)
}

/// Uniform random configuration.
pub fn random_start_with(len: usize, rng: &mut Rng) -> SpinConfiguration {
    SpinConfiguration::new((0..len).map(|_| random_sign(rng)).collect())
        .expect("random signs are ±1")
}

/// Configuration that is constant on each group, with independent uniform
/// signs per group.
pub fn random_block_start(spec: &GroupSpec, seed: u64) -> SpinConfiguration {
    random_block_start_with(spec, &mut seeded_rng(seed))
}

pub fn random_block_start_with(spec: &GroupSpec, rng: &mut Rng) -> SpinConfiguration {
    let signs: Vec<i8> = spec.sizes().iter().map(|_| random_sign(rng)).collect();
    block_configuration(spec, &signs)
}

/// Expands one sign per group into a block-constant configuration.
pub fn block_configuration(spec: &GroupSpec, signs: &[i8]) -> SpinConfiguration {
    let spins = spec
        .sizes()
        .iter()
        .zip(signs)
        .flat_map(|(&k, &s)| std::iter::repeat_n(s, k))
        .collect();
    SpinConfiguration::new(spins).expect("block signs are ±1")
}

/// Whether `s` is constant on every group of `spec`.
pub fn is_block_constant(spec: &GroupSpec, s: &SpinConfiguration) -> bool {
    spec.ranges().all(|r| {
        let block = &s.as_slice()[r];
        block.iter().all(|&v| v == block[0])
    })
}

/// Mean of `J_ij` over unordered same-group pairs `i != j`.
pub fn mean_intragroup_coupling(j: &ConnectionMatrix, spec: &GroupSpec) -> Result<f64> {
    if j.size() != spec.total() {
        return Err(Error::SpecMismatch(format!(
            "matrix has {} spins, groups cover {}",
            j.size(),
            spec.total()
        )));
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for r in spec.ranges() {
        for a in r.clone() {
            for b in (a + 1)..r.end {
                sum += j.get(a, b);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::SpecMismatch("no group has two or more members".into()));
    }
    Ok(sum / pairs as f64)
}

/// Couplings between spins of different groups (unordered pairs).
pub fn intergroup_couplings(j: &ConnectionMatrix, spec: &GroupSpec) -> Result<Vec<f64>> {
    if j.size() != spec.total() {
        return Err(Error::SpecMismatch(format!(
            "matrix has {} spins, groups cover {}",
            j.size(),
            spec.total()
        )));
    }
    let p = cluster_partition(spec)?;
    let mut out = Vec::new();
    for a in 0..j.size() {
        for b in (a + 1)..j.size() {
            if p.domain_of(a) != p.domain_of(b) {
                out.push(j.get(a, b));
            }
        }
    }
    Ok(out)
}
