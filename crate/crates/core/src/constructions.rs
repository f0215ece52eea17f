//! Bose (n = 3 mod 6) and Skolem (n = 1 mod 6) triple systems and the point
//! mappings that give them min-sum n.
//!
//! Both constructions live on the structured point set `(x, level)` with
//! `x < m` and `level < 3`; the Skolem system adds one extra point, infinity.
//! Blocks are emitted as Type 1, then Type 2 in y-major order
//! (`y` ascending, then `x < y`, then level), then (Skolem only) Type 3 with the
//! level outermost.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::design::{Block, SteinerTripleSystem, MAX_POINTS};
use crate::error::{Error, Result};

/// Which of the two direct constructions produced a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Bose,
    Skolem,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Bose => "bose",
            Construction::Skolem => "skolem",
        }
    }

    /// The `m` parameter for `n`, or a congruence error.
    pub fn order_parameter(self, n: u32) -> Result<u32> {
        match self {
            Construction::Bose if n % 6 == 3 && (9..=MAX_POINTS).contains(&n) => Ok(n / 3),
            Construction::Skolem if n % 6 == 1 && (7..=MAX_POINTS).contains(&n) => Ok((n - 1) / 3),
            Construction::Bose => Err(Error::Congruence {
                construction: "bose",
                n,
                expected: "n = 3 mod 6 and 9 <= n <= 10000",
            }),
            Construction::Skolem => Err(Error::Congruence {
                construction: "skolem",
                n,
                expected: "n = 1 mod 6 and 7 <= n <= 10000",
            }),
        }
    }

    /// The construction that covers `n`, if any.
    pub fn for_n(n: u32) -> Option<Self> {
        match n % 6 {
            3 if n >= 9 => Some(Construction::Bose),
            1 if n >= 7 => Some(Construction::Skolem),
            _ => None,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of a structured system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Pair { x: u32, level: u32 },
    Infinity,
}

impl Point {
    pub const fn pair(x: u32, level: u32) -> Self {
        Point::Pair { x, level }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Pair { x, level } => write!(f, "({x},{level})"),
            Point::Infinity => f.write_str("inf"),
        }
    }
}

/// Identifies a structured block by its construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockTag {
    /// `{(x,0), (x,1), (x,2)}`
    Type1 { x: u32 },
    /// `{(x,i), (y,i), (x op y, i+1)}` with `x < y`
    Type2 { x: u32, y: u32, level: u32 },
    /// Skolem only: `{inf, (x + m/2, i), (x, i+1)}`
    Type3 { x: u32, level: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuredBlock {
    pub tag: BlockTag,
    pub members: [Point; 3],
}

/// A Bose or Skolem system on structured points, before relabeling to integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredSystem {
    construction: Construction,
    n: u32,
    m: u32,
    blocks: Vec<StructuredBlock>,
}

impl StructuredSystem {
    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn blocks(&self) -> &[StructuredBlock] {
        &self.blocks
    }

    /// Dense index of a point: `level * m + x`, infinity last.
    pub fn point_index(&self, p: Point) -> Option<usize> {
        point_index(self.construction, self.m, p)
    }

    /// All points in index order.
    pub fn points(&self) -> Vec<Point> {
        all_points(self.construction, self.m)
    }
}

fn point_index(construction: Construction, m: u32, p: Point) -> Option<usize> {
    match p {
        Point::Pair { x, level } if x < m && level < 3 => Some((level * m + x) as usize),
        Point::Infinity if construction == Construction::Skolem => Some(3 * m as usize),
        _ => None,
    }
}

fn all_points(construction: Construction, m: u32) -> Vec<Point> {
    let mut pts: Vec<Point> = (0..3)
        .flat_map(|level| (0..m).map(move |x| Point::pair(x, level)))
        .collect();
    if construction == Construction::Skolem {
        pts.push(Point::Infinity);
    }
    pts
}

fn check_operands(x: u32, y: u32, m: u32) -> Result<()> {
    for v in [x, y] {
        if v >= m {
            return Err(Error::OperandRange {
                value: v,
                max: m.saturating_sub(1),
            });
        }
    }
    Ok(())
}

/// The Bose quasigroup on `[0, m-1]`: `((m+1)/2)(x+y) mod m`, for odd `m`.
pub fn bose_op(x: u32, y: u32, m: u32) -> Result<u32> {
    if m.is_multiple_of(2) || m < 3 {
        return Err(Error::ModulusParity { op: "bose", m });
    }
    check_operands(x, y, m)?;
    Ok(bose_op_unchecked(x, y, m))
}

#[inline]
pub(crate) fn bose_op_unchecked(x: u32, y: u32, m: u32) -> u32 {
    let (x, y, m) = (x as u64, y as u64, m as u64);
    (m.div_ceil(2) * (x + y) % m) as u32
}

/// The Skolem half-idempotent quasigroup on `[0, m-1]`, for even `m`.
pub fn skolem_op(x: u32, y: u32, m: u32) -> Result<u32> {
    if m % 2 == 1 || m < 2 {
        return Err(Error::ModulusParity { op: "skolem", m });
    }
    check_operands(x, y, m)?;
    Ok(skolem_op_unchecked(x, y, m))
}

#[inline]
pub(crate) fn skolem_op_unchecked(x: u32, y: u32, m: u32) -> u32 {
    let r = (x + y) % m;
    if r.is_multiple_of(2) {
        r / 2
    } else {
        (r + m - 1) / 2
    }
}

fn type2_blocks(m: u32, op: impl Fn(u32, u32) -> u32) -> Vec<StructuredBlock> {
    let mut out = Vec::with_capacity(3 * (m as usize * (m as usize).saturating_sub(1)) / 2);
    for y in 1..m {
        for x in 0..y {
            let z = op(x, y);
            for level in 0..3 {
                out.push(StructuredBlock {
                    tag: BlockTag::Type2 { x, y, level },
                    members: [
                        Point::pair(x, level),
                        Point::pair(y, level),
                        Point::pair(z, (level + 1) % 3),
                    ],
                });
            }
        }
    }
    out
}

fn type1_block(x: u32) -> StructuredBlock {
    StructuredBlock {
        tag: BlockTag::Type1 { x },
        members: [Point::pair(x, 0), Point::pair(x, 1), Point::pair(x, 2)],
    }
}

/// Bose construction of an STS(n), `n = 3m`, `m` odd, `n >= 9`.
pub fn construct_bose(n: u32) -> Result<StructuredSystem> {
    let m = Construction::Bose.order_parameter(n)?;
    let mut blocks = Vec::with_capacity((n as usize * (n as usize - 1)) / 6);
    blocks.extend((0..m).map(type1_block));
    blocks.extend(type2_blocks(m, |x, y| bose_op_unchecked(x, y, m)));
    Ok(StructuredSystem {
        construction: Construction::Bose,
        n,
        m,
        blocks,
    })
}

/// Skolem construction of an STS(n), `n = 3m + 1`, `m` even, `n >= 7`.
pub fn construct_skolem(n: u32) -> Result<StructuredSystem> {
    let m = Construction::Skolem.order_parameter(n)?;
    let half = m / 2;
    let mut blocks = Vec::with_capacity((n as usize * (n as usize - 1)) / 6);
    blocks.extend((0..half).map(type1_block));
    blocks.extend(type2_blocks(m, |x, y| skolem_op_unchecked(x, y, m)));
    for level in 0..3 {
        for x in 0..half {
            blocks.push(StructuredBlock {
                tag: BlockTag::Type3 { x, level },
                members: [
                    Point::Infinity,
                    Point::pair(x + half, level),
                    Point::pair(x, (level + 1) % 3),
                ],
            });
        }
    }
    Ok(StructuredSystem {
        construction: Construction::Skolem,
        n,
        m,
        blocks,
    })
}

/// Builds the structured system for `n` with whichever construction covers it.
pub fn construct(construction: Construction, n: u32) -> Result<StructuredSystem> {
    match construction {
        Construction::Bose => construct_bose(n),
        Construction::Skolem => construct_skolem(n),
    }
}

/// A bijection from the structured points of a system onto `[0, n-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRelabeling {
    construction: Construction,
    m: u32,
    /// Indexed by [`StructuredSystem::point_index`].
    forward: Vec<u32>,
}

impl PointRelabeling {
    /// Builds a relabeling from a function over the structured points.
    pub fn from_fn(construction: Construction, m: u32, f: impl Fn(Point) -> u32) -> Result<Self> {
        let forward = all_points(construction, m).into_iter().map(f).collect();
        Self::new(construction, m, forward)
    }

    /// `forward[i]` is the image of the point with dense index `i`.
    pub fn new(construction: Construction, m: u32, forward: Vec<u32>) -> Result<Self> {
        let n = all_points(construction, m).len() as u32;
        if forward.len() != n as usize {
            return Err(Error::NotBijective { max: n - 1 });
        }
        crate::design::check_permutation(n, &forward)?;
        Ok(PointRelabeling {
            construction,
            m,
            forward,
        })
    }

    pub fn image(&self, p: Point) -> Option<u32> {
        point_index(self.construction, self.m, p).map(|i| self.forward[i])
    }

    /// Images in dense point-index order.
    pub fn as_slice(&self) -> &[u32] {
        &self.forward
    }
}

/// The Bose mapping for odd `m`: level 0 onto `[0, m-1]`, level 2 onto
/// `[m, 2m-1]`, level 1 onto `[2m, 3m-1]`.
pub fn bose_mapping(m: u32) -> Result<PointRelabeling> {
    if m.is_multiple_of(2) || m < 3 {
        return Err(Error::ModulusParity { op: "bose", m });
    }
    let n = 3 * m;
    PointRelabeling::from_fn(Construction::Bose, m, |p| match p {
        Point::Pair { x, level: 0 } => x,
        Point::Pair { x: 0, level: 1 } => 2 * m,
        // 0 op y = x  <=>  y = 2x mod m
        Point::Pair { x, level: 1 } => n - (2 * x) % m,
        Point::Pair { x: 0, level: 2 } => m,
        Point::Pair { x, .. } => m + bose_op_unchecked(0, m - x, m),
        Point::Infinity => unreachable!("bose systems have no infinity point"),
    })
}

/// The Skolem mapping for even `m`: level 0 onto `[0, m-1]` reversed, infinity
/// to `m`, level 2 onto `[m+1, 2m]`, level 1 onto `[2m+1, 3m]`.
pub fn skolem_mapping(m: u32) -> Result<PointRelabeling> {
    if m % 2 == 1 || m < 2 {
        return Err(Error::ModulusParity { op: "skolem", m });
    }
    let half = m / 2;
    // level-1 images: x = (m-1) op y  gets 2m + 2 + y, except x = m/2 - 1
    let mut level1 = vec![2 * m + 1; m as usize];
    for y in 0..m {
        let x = skolem_op_unchecked(m - 1, y, m);
        if x != half - 1 {
            level1[x as usize] = 2 * m + 2 + y;
        }
    }
    PointRelabeling::from_fn(Construction::Skolem, m, |p| match p {
        Point::Pair { x, level: 0 } => m - 1 - x,
        Point::Pair { x, level: 1 } => level1[x as usize],
        Point::Pair { x, .. } => m + 1 + skolem_op_unchecked(0, x, m),
        Point::Infinity => m,
    })
}

/// The mapping that gives the system min-sum n.
pub fn paper_mapping(system: &StructuredSystem) -> PointRelabeling {
    match system.construction {
        Construction::Bose => bose_mapping(system.m),
        Construction::Skolem => skolem_mapping(system.m),
    }
    .expect("m has the right parity for its construction")
}

/// `(x, i) -> x + i*m`, infinity to `3m`.
pub fn identity_relabeling(system: &StructuredSystem) -> PointRelabeling {
    let forward = (0..system.points().len() as u32).collect();
    PointRelabeling::new(system.construction, system.m, forward).expect("identity is bijective")
}

/// Maps every structured block to a sorted integer block, keeping block order.
pub fn apply_relabeling(
    system: &StructuredSystem,
    relabeling: &PointRelabeling,
) -> Result<SteinerTripleSystem> {
    if relabeling.construction != system.construction || relabeling.m != system.m {
        if let Some(missing) = system
            .points()
            .into_iter()
            .find(|&p| relabeling.image(p).is_none())
        {
            return Err(Error::MissingPoint(missing.to_string()));
        }
        return Err(Error::NotBijective { max: system.n - 1 });
    }
    let blocks = system
        .blocks
        .iter()
        .map(|b| {
            let [a, c, d] = b
                .members
                .map(|p| relabeling.image(p).expect("same point set"));
            Block::new(a, c, d).expect("bijective image of distinct points")
        })
        .collect();
    Ok(SteinerTripleSystem::from_trusted(system.n, blocks))
}
