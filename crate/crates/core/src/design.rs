//! Triple systems on integer point sets, Steiner validation and sum metrics.
//!
//! A [`SteinerTripleSystem`] keeps its blocks in the order they were produced;
//! block labels live in a separate [`BlockLabeling`] so a single system can be
//! studied under many orderings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest supported point count. Keeps every label sum well inside `u64`.
pub const MAX_POINTS: u32 = 10_000;

/// Maximum number of violations collected in a [`ValidityReport`].
pub const MAX_REPORTED_VIOLATIONS: usize = 10;

/// Three distinct points, stored in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct Block([u32; 3]);

impl Block {
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self> {
        Self::from_slice(0, &[a, b, c])
    }

    fn from_slice(index: usize, points: &[u32]) -> Result<Self> {
        let [a, b, c]: [u32; 3] = points.try_into().map_err(|_| Error::BlockSize {
            index,
            len: points.len(),
        })?;
        let mut p = [a, b, c];
        p.sort_unstable();
        if p[0] == p[1] || p[1] == p[2] {
            return Err(Error::DuplicatePoint { index, point: p[1] });
        }
        Ok(Block(p))
    }

    /// The points in ascending order.
    pub fn points(&self) -> [u32; 3] {
        self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    pub fn contains(&self, point: u32) -> bool {
        self.0.contains(&point)
    }

    /// The three pairs covered by this block, each as `(low, high)`.
    pub fn pairs(&self) -> [(u32, u32); 3] {
        let [a, b, c] = self.0;
        [(a, b), (a, c), (b, c)]
    }

    fn map(&self, f: impl Fn(u32) -> u32) -> Block {
        let mut p = self.0.map(f);
        p.sort_unstable();
        Block(p)
    }
}

impl TryFrom<[u32; 3]> for Block {
    type Error = Error;

    fn try_from(p: [u32; 3]) -> Result<Self> {
        Block::new(p[0], p[1], p[2])
    }
}

impl AsRef<[u32]> for Block {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Block> for [u32; 3] {
    fn from(b: Block) -> Self {
        b.0
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{},{}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// A single failed Steiner invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `n` is not congruent to 1 or 3 mod 6, so no STS(n) exists.
    PointCountClass {
        n: u32,
    },
    UncoveredPair {
        a: u32,
        b: u32,
    },
    RepeatedPair {
        a: u32,
        b: u32,
        count: u32,
    },
    Replication {
        point: u32,
        count: u32,
        expected: u32,
    },
    BlockCount {
        expected: u64,
        actual: u64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PointCountClass { n } => write!(f, "n = {n} is not 1 or 3 mod 6"),
            Violation::UncoveredPair { a, b } => write!(f, "pair {{{a},{b}}} uncovered"),
            Violation::RepeatedPair { a, b, count } => {
                write!(f, "pair {{{a},{b}}} covered {count} times")
            }
            Violation::Replication {
                point,
                count,
                expected,
            } => write!(
                f,
                "point {point} lies in {count} blocks, expected {expected}"
            ),
            Violation::BlockCount { expected, actual } => {
                write!(f, "{actual} blocks, expected {expected}")
            }
        }
    }
}

/// Outcome of [`verify_sts`]: empty means the candidate is a Steiner triple system.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
    /// More than [`MAX_REPORTED_VIOLATIONS`] violations were found.
    pub truncated: bool,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        if self.violations.len() < MAX_REPORTED_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.truncated = true;
        }
    }
}

fn check_point_count(n: u32) -> Result<()> {
    if (3..=MAX_POINTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::PointCount(n))
    }
}

fn parse_blocks<B: AsRef<[u32]>>(n: u32, blocks: &[B]) -> Result<Vec<Block>> {
    blocks
        .iter()
        .enumerate()
        .map(|(index, raw)| {
            let raw = raw.as_ref();
            if let Some(&point) = raw.iter().find(|&&p| p >= n) {
                return Err(Error::PointOutOfRange {
                    index,
                    point,
                    max: n - 1,
                });
            }
            Block::from_slice(index, raw)
        })
        .collect()
}

#[inline]
fn pair_index(n: u32, a: u32, b: u32) -> usize {
    debug_assert!(a < b && b < n);
    let (n, a, b) = (n as usize, a as usize, b as usize);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Checks a candidate point count and block list against every Steiner triple
/// system invariant.
///
/// Malformed input (block size other than 3, repeated point, point out of
/// range, unsupported `n`) is an `Err`; a well-formed candidate that fails the
/// Steiner property yields an `Ok` report listing the violations, pairs first
/// in lexicographic order.
pub fn verify_sts<B: AsRef<[u32]>>(n: u32, blocks: &[B]) -> Result<ValidityReport> {
    check_point_count(n)?;
    let blocks = parse_blocks(n, blocks)?;
    Ok(check_blocks(n, &blocks))
}

fn check_blocks(n: u32, blocks: &[Block]) -> ValidityReport {
    let mut report = ValidityReport::default();
    if n % 6 != 1 && n % 6 != 3 {
        report.push(Violation::PointCountClass { n });
    }

    let mut cover = vec![0u8; n as usize * (n as usize - 1) / 2];
    let mut degree = vec![0u32; n as usize];
    for block in blocks {
        for (a, b) in block.pairs() {
            let c = &mut cover[pair_index(n, a, b)];
            *c = c.saturating_add(1);
        }
        for p in block.points() {
            degree[p as usize] += 1;
        }
    }

    for a in 0..n {
        for b in a + 1..n {
            match cover[pair_index(n, a, b)] {
                1 => {}
                0 => report.push(Violation::UncoveredPair { a, b }),
                count => report.push(Violation::RepeatedPair {
                    a,
                    b,
                    count: count as u32,
                }),
            }
        }
    }

    let expected = (n - 1) / 2;
    for (point, &count) in degree.iter().enumerate() {
        if count != expected {
            report.push(Violation::Replication {
                point: point as u32,
                count,
                expected,
            });
        }
    }

    let expected = n as u64 * (n as u64 - 1) / 6;
    if blocks.len() as u64 != expected {
        report.push(Violation::BlockCount {
            expected,
            actual: blocks.len() as u64,
        });
    }
    report
}

/// A Steiner triple system on the points `[0, n-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTripleSystem {
    n: u32,
    blocks: Vec<Block>,
}

impl SteinerTripleSystem {
    /// Builds a system, rejecting anything that is not a Steiner triple system.
    pub fn new(n: u32, blocks: Vec<Block>) -> Result<Self> {
        check_point_count(n)?;
        for (index, b) in blocks.iter().enumerate() {
            if let Some(&point) = b.points().iter().find(|&&p| p >= n) {
                return Err(Error::PointOutOfRange {
                    index,
                    point,
                    max: n - 1,
                });
            }
        }
        let report = check_blocks(n, &blocks);
        if let Some(first) = report.violations.first() {
            return Err(Error::NotSteiner(first.to_string()));
        }
        Ok(SteinerTripleSystem { n, blocks })
    }

    /// Like [`SteinerTripleSystem::new`] but from raw point lists.
    pub fn from_raw<B: AsRef<[u32]>>(n: u32, blocks: &[B]) -> Result<Self> {
        check_point_count(n)?;
        Self::new(n, parse_blocks(n, blocks)?)
    }

    /// Skips the O(n^2) pair check; only for systems that are valid by construction.
    pub(crate) fn from_trusted(n: u32, blocks: Vec<Block>) -> Self {
        debug_assert!(n > 200 || check_blocks(n, &blocks).is_ok());
        SteinerTripleSystem { n, blocks }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of blocks through each point, `(n - 1) / 2`.
    pub fn replication(&self) -> u32 {
        (self.n - 1) / 2
    }

    /// For every point, the indices of the blocks containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::with_capacity(self.replication() as usize); self.n as usize];
        for (i, b) in self.blocks.iter().enumerate() {
            for p in b.points() {
                inc[p as usize].push(i);
            }
        }
        inc
    }

    /// Relabels points through `perm`, where `perm[p]` is the new label of `p`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Self> {
        check_permutation(self.n, perm)?;
        Ok(self.relabel_unchecked(perm))
    }

    pub(crate) fn relabel_unchecked(&self, perm: &[u32]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.map(|p| perm[p as usize]))
            .collect();
        SteinerTripleSystem { n: self.n, blocks }
    }

    pub fn sum_stats(&self) -> SumStats {
        SumStats::from_blocks(&self.blocks).expect("a Steiner triple system has blocks")
    }
}

pub(crate) fn check_permutation(n: u32, perm: &[u32]) -> Result<()> {
    let mut seen = vec![false; n as usize];
    if perm.len() != n as usize {
        return Err(Error::NotBijective { max: n - 1 });
    }
    for &p in perm {
        match seen.get_mut(p as usize) {
            Some(s) if !*s => *s = true,
            _ => return Err(Error::NotBijective { max: n - 1 }),
        }
    }
    Ok(())
}

/// Min, max, difference and ratio of a collection of sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumStats {
    pub min_sum: u64,
    pub max_sum: u64,
    pub difference_sum: u64,
    /// `max_sum / min_sum`; `None` only when `min_sum` is zero.
    #[serde(with = "crate::rational::option")]
    pub ratio_sum: Option<Rational>,
}

impl SumStats {
    /// Statistics over arbitrary values; `None` for an empty input.
    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Option<Self> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let (min_sum, max_sum) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let ratio_sum = (min_sum != 0).then(|| Rational::new(max_sum as i64, min_sum as i64));
        Some(SumStats {
            min_sum,
            max_sum,
            difference_sum: max_sum - min_sum,
            ratio_sum,
        })
    }

    /// Block-sum statistics of any block list.
    pub fn from_blocks(blocks: &[Block]) -> Option<Self> {
        Self::from_values(blocks.iter().map(Block::sum))
    }
}

/// Min/max/difference/ratio of the block sums of a system.
pub fn sum_stats(system: &SteinerTripleSystem) -> SumStats {
    system.sum_stats()
}

/// Replaces every point `x` by `n - 1 - x`.
///
/// The result satisfies `max_sum(out) = 3n - 3 - min_sum(input)`.
pub fn complement_relabel(system: &SteinerTripleSystem) -> SteinerTripleSystem {
    let n = system.n;
    let perm: Vec<u32> = (0..n).map(|x| n - 1 - x).collect();
    system.relabel_unchecked(&perm)
}

/// A bijection from block index to label in `[0, block_count - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct BlockLabeling {
    labels: Vec<u32>,
}

impl BlockLabeling {
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; labels.len()];
        for &l in &labels {
            match seen.get_mut(l as usize) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(Error::LabelingNotPermutation {
                        max: labels.len().saturating_sub(1),
                    })
                }
            }
        }
        Ok(BlockLabeling { labels })
    }

    /// Labels blocks by their position in the list.
    pub fn positional(count: usize) -> Self {
        BlockLabeling {
            labels: (0..count as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, block: usize) -> u32 {
        self.labels[block]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// `inverse()[l]` is the block carrying label `l`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.labels.len()];
        for (b, &l) in self.labels.iter().enumerate() {
            inv[l as usize] = b;
        }
        inv
    }
}

impl TryFrom<Vec<u32>> for BlockLabeling {
    type Error = Error;

    fn try_from(labels: Vec<u32>) -> Result<Self> {
        BlockLabeling::new(labels)
    }
}

impl From<BlockLabeling> for Vec<u32> {
    fn from(l: BlockLabeling) -> Self {
        l.labels
    }
}

/// For every point, the sum of the labels of the blocks containing it.
///
/// The minimum entry is the dual min-sum and the maximum the dual max-sum.
pub fn dual_point_sums(system: &SteinerTripleSystem, labeling: &BlockLabeling) -> Result<Vec<u64>> {
    if labeling.len() != system.block_count() {
        return Err(Error::LabelingSize {
            expected: system.block_count(),
            got: labeling.len(),
        });
    }
    let mut sums = vec![0u64; system.n as usize];
    for (b, block) in system.blocks.iter().enumerate() {
        let l = labeling.label(b) as u64;
        for p in block.points() {
            sums[p as usize] += l;
        }
    }
    Ok(sums)
}

/// Dual min/max/difference/ratio over the point sums.
pub fn dual_sum_stats(system: &SteinerTripleSystem, labeling: &BlockLabeling) -> Result<SumStats> {
    let sums = dual_point_sums(system, labeling)?;
    Ok(SumStats::from_values(sums).expect("n >= 3"))
}
