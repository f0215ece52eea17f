//! Block orderings for Bose and Skolem systems and the closed forms for their
//! dual point sums.
//!
//! [`make_labeling`] labels blocks by walking the ordering and counting
//! positions. The closed forms ([`closed_form_block_label`],
//! [`closed_form_dual_point_sum`], [`dual_min_sum_formula`],
//! [`dual_max_sum_formula`]) are evaluated independently in exact rational
//! arithmetic and are checked against that enumeration in the tests.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::constructions::{BlockTag, Construction, StructuredSystem};
use crate::design::BlockLabeling;
use crate::error::{Error, Result};

type Exact = Ratio<i128>;

/// A block ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingScheme {
    /// `B_x` for `x = m-1..0`, then `B_{x,y,i}` y-major.
    BoseYxi,
    /// `B_x` for `x = 0..m-1`, then `B_{x,y,i}` x-major.
    BoseNatural,
    /// `B_x`, then `B_{x,y,i}` y-major, then `B_{x,i}` with interleaved labels.
    SkolemYxi,
    /// `B_x`, then `B_{x,y,i}` x-major, then `B_{x,i}` in order.
    SkolemNatural,
}

impl OrderingScheme {
    pub const ALL: [OrderingScheme; 4] = [
        OrderingScheme::BoseYxi,
        OrderingScheme::BoseNatural,
        OrderingScheme::SkolemYxi,
        OrderingScheme::SkolemNatural,
    ];

    pub fn new(construction: Construction, yxi: bool) -> Self {
        match (construction, yxi) {
            (Construction::Bose, true) => OrderingScheme::BoseYxi,
            (Construction::Bose, false) => OrderingScheme::BoseNatural,
            (Construction::Skolem, true) => OrderingScheme::SkolemYxi,
            (Construction::Skolem, false) => OrderingScheme::SkolemNatural,
        }
    }

    pub fn construction(self) -> Construction {
        match self {
            OrderingScheme::BoseYxi | OrderingScheme::BoseNatural => Construction::Bose,
            OrderingScheme::SkolemYxi | OrderingScheme::SkolemNatural => Construction::Skolem,
        }
    }

    pub fn is_yxi(self) -> bool {
        matches!(self, OrderingScheme::BoseYxi | OrderingScheme::SkolemYxi)
    }

    pub fn name(self) -> &'static str {
        match self {
            OrderingScheme::BoseYxi => "bose-yxi",
            OrderingScheme::BoseNatural => "bose-natural",
            OrderingScheme::SkolemYxi => "skolem-yxi",
            OrderingScheme::SkolemNatural => "skolem-natural",
        }
    }

    fn check(self, n: u32) -> Result<u32> {
        self.construction().order_parameter(n)
    }
}

impl fmt::Display for OrderingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn ordered_tags(scheme: OrderingScheme, m: u32) -> Vec<BlockTag> {
    let mut tags = Vec::new();
    let type1: Vec<u32> = match scheme {
        OrderingScheme::BoseYxi => (0..m).rev().collect(),
        OrderingScheme::BoseNatural => (0..m).collect(),
        OrderingScheme::SkolemYxi | OrderingScheme::SkolemNatural => (0..m / 2).collect(),
    };
    tags.extend(type1.into_iter().map(|x| BlockTag::Type1 { x }));
    let pairs: Vec<(u32, u32)> = if scheme.is_yxi() {
        (1..m).flat_map(|y| (0..y).map(move |x| (x, y))).collect()
    } else {
        (0..m)
            .flat_map(|x| (x + 1..m).map(move |y| (x, y)))
            .collect()
    };
    for (x, y) in pairs {
        tags.extend((0..3).map(|level| BlockTag::Type2 { x, y, level }));
    }
    if scheme == OrderingScheme::SkolemNatural {
        for x in 0..m / 2 {
            tags.extend((0..3).map(|level| BlockTag::Type3 { x, level }));
        }
    }
    tags
}

/// Labels the last `3m/2` Skolem blocks under the YXI scheme.
fn skolem_yxi_type3_label(n: u32, x: u32, level: u32) -> u32 {
    let tail = n * (n - 1) / 6 - (n - 1) / 2;
    let sixth = (n - 1) / 6;
    tail + match level {
        0 => sixth + 2 * x,
        1 => x,
        _ => sixth + 2 * x + 1,
    }
}

/// Labels the blocks of `system` by their position in `scheme`'s ordering.
pub fn make_labeling(system: &StructuredSystem, scheme: OrderingScheme) -> Result<BlockLabeling> {
    if scheme.construction() != system.construction() {
        return Err(Error::SchemeMismatch {
            scheme: scheme.name(),
            construction: system.construction().name(),
        });
    }
    let positions: HashMap<BlockTag, u32> = ordered_tags(scheme, system.m())
        .into_iter()
        .enumerate()
        .map(|(pos, tag)| (tag, pos as u32))
        .collect();
    let labels = system
        .blocks()
        .iter()
        .map(|b| match b.tag {
            BlockTag::Type3 { x, level } if scheme == OrderingScheme::SkolemYxi => {
                skolem_yxi_type3_label(system.n(), x, level)
            }
            tag => positions[&tag],
        })
        .collect();
    BlockLabeling::new(labels)
}

fn tag_error(m: u32, tag: BlockTag) -> Error {
    Error::TagOutOfRange {
        m,
        detail: format!("{tag:?}"),
    }
}

/// Label of the block `tag` under `scheme`, from the closed-form expressions.
pub fn closed_form_block_label(scheme: OrderingScheme, n: u32, tag: BlockTag) -> Result<u64> {
    let m = scheme.check(n)? as u64;
    let skolem = scheme.construction() == Construction::Skolem;
    let type1_count = if skolem { m / 2 } else { m };
    match tag {
        BlockTag::Type1 { x } if (x as u64) < type1_count => Ok(match scheme {
            OrderingScheme::BoseYxi => m - 1 - x as u64,
            _ => x as u64,
        }),
        BlockTag::Type2 { x, y, level } if x < y && (y as u64) < m && level < 3 => {
            let (x, y, i) = (x as u64, y as u64, level as u64);
            let rank = if scheme.is_yxi() {
                x + y * (y - 1) / 2
            } else {
                x * (m - 1) - x * x.saturating_sub(1) / 2 + (y - x - 1)
            };
            Ok(type1_count + 3 * rank + i)
        }
        BlockTag::Type3 { x, level } if skolem && (x as u64) < m / 2 && level < 3 => {
            Ok(match scheme {
                OrderingScheme::SkolemYxi => skolem_yxi_type3_label(n, x, level) as u64,
                _ => m / 2 + 3 * m * (m - 1) / 2 + 3 * x as u64 + level as u64,
            })
        }
        _ => Err(tag_error(m as u32, tag)),
    }
}

/// All pairs `x < y` with `x op y = z`, from the closed-form description.
pub fn inverse_pairs(z: u32, m: u32, op: Construction) -> Result<Vec<(u32, u32)>> {
    let parity_ok = match op {
        Construction::Bose => m % 2 == 1 && m >= 3,
        Construction::Skolem => m.is_multiple_of(2) && m >= 2,
    };
    if !parity_ok {
        return Err(Error::ModulusParity { op: op.name(), m });
    }
    if z >= m {
        return Err(Error::OperandRange {
            value: z,
            max: m - 1,
        });
    }
    let (z, m) = (z as i64, m as i64);
    let mut out = Vec::new();
    let mut push = |xs: std::ops::RangeInclusive<i64>, y_of: &dyn Fn(i64) -> i64| {
        for x in xs {
            out.push((x as u32, y_of(x) as u32));
        }
    };
    match op {
        Construction::Bose if z <= (m - 1) / 2 => {
            push(0..=z - 1, &|x| 2 * z - x);
            push(2 * z + 1..=z + (m - 1) / 2, &|x| 2 * z - x + m);
        }
        Construction::Bose => {
            push(0..=z - (m + 1) / 2, &|x| 2 * z - x - m);
            push(2 * z - m + 1..=z - 1, &|x| 2 * z - x);
        }
        Construction::Skolem if z < m / 2 => {
            push(0..=z - 1, &|x| 2 * z - x);
            push(2 * z + 1..=z + m / 2 - 1, &|x| 2 * z - x + m);
        }
        Construction::Skolem => {
            push(0..=z - m / 2, &|x| 2 * z - x - m + 1);
            push(2 * z - m + 2..=z, &|x| 2 * z - x + 1);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn q(num: i128, den: i128) -> Exact {
    Exact::new(num, den)
}

fn integral(value: Exact, what: &str) -> i128 {
    assert!(
        value.is_integer(),
        "{what} evaluated to the non-integer {value}"
    );
    value.to_integer()
}

/// Sum of the labels of the blocks containing the structured point `(z, i)`
/// under a YXI labeling, from the piecewise cubic closed forms.
pub fn closed_form_dual_point_sum(scheme: OrderingScheme, n: u32, z: u32, i: u32) -> Result<i128> {
    let m = scheme.check(n)?;
    if !scheme.is_yxi() {
        return Err(Error::FormulaRange {
            formula: "closed-form dual point sum",
            n,
            reason: "only the YXI orderings have a closed form",
        });
    }
    if z >= m || i >= 3 {
        return Err(Error::OperandRange {
            value: if z >= m { z } else { i },
            max: if z >= m { m - 1 } else { 2 },
        });
    }
    let nn = Exact::from_integer(n as i128);
    let (z, i) = (z as i128, i as i128);
    let j = (i + 2) % 3;
    let m = m as i128;
    let value = match scheme {
        OrderingScheme::BoseYxi => {
            let tail = q(
                64 * z * z * z - 84 * z * z - 158 * z - 16 * i - 8 * j - 25,
                16,
            );
            if 2 * z < m {
                q(5, 144) * nn * nn * nn
                    - q(6 * z + 15, 144) * nn * nn
                    - q(12 * z * z - 84 * z - 16 * i - 8 * j - 25, 48) * nn
                    + tail
            } else {
                q(1, 48) * nn * nn * nn + q(42 * z - 39, 144) * nn * nn
                    - q(84 * z * z - 108 * z - 16 * i - 8 * j - 55, 48) * nn
                    + tail
            }
        }
        _ => {
            if 2 * z < m {
                let sixth = (nn - 1) / 6;
                let z = Exact::from_integer(z);
                let extra = match j {
                    0 => sixth + z * 2,
                    1 => z,
                    _ => sixth + z * 2 + 1,
                };
                let zi = z.to_integer();
                q(5, 144) * nn * nn * nn
                    - q(2 * zi + 7, 48) * nn * nn
                    - q(36 * zi * zi - 228 * zi - 3 - 48 * i - 24 * j, 144) * nn
                    + q(
                        576 * zi * zi * zi - 828 * zi * zi - 1518 * zi + 13 - 192 * i - 168 * j,
                        144,
                    )
                    + extra
            } else {
                let extra = match i {
                    0 => 2 * z,
                    1 => z,
                    _ => 2 * z + 1,
                };
                q(1, 48) * nn * nn * nn + q(14 * z - 5, 48) * nn * nn
                    - q(84 * z * z + 4 * z - 47 - 16 * i - 8 * j, 48) * nn
                    + q(
                        192 * z * z * z + 84 * z * z - 346 * z - 187 - 64 * i - 8 * j,
                        48,
                    )
                    + Exact::from_integer(extra)
            }
        }
    };
    Ok(integral(value, "dual point sum"))
}

fn cubic(n: u32, a: Exact, b: Exact, c: Exact, d: Exact) -> Exact {
    let n = Exact::from_integer(n as i128);
    a * n * n * n + b * n * n + c * n + d
}

/// Closed-form dual min-sum of a labeled Bose or Skolem system.
///
/// Only evaluated where the formula is claimed; smaller orders return
/// [`Error::FormulaRange`] and should be enumerated instead.
pub fn dual_min_sum_formula(scheme: OrderingScheme, n: u32) -> Result<i128> {
    let m = scheme.check(n)?;
    let value = match scheme {
        OrderingScheme::BoseYxi => match m % 4 {
            1 if n >= 27 => cubic(n, q(55, 1728), q(1, 192), q(-9, 64), q(-31, 64)),
            3 if n >= 33 => cubic(n, q(55, 1728), q(1, 192), q(-13, 64), q(13, 64)),
            _ => {
                return Err(Error::FormulaRange {
                    formula: "f_BYXI",
                    n,
                    reason: "requires n >= 27 when n/3 = 1 mod 4, n >= 33 when n/3 = 3 mod 4",
                })
            }
        },
        OrderingScheme::BoseNatural => cubic(n, q(5, 432), q(19, 48), q(-133, 48), q(71, 16)),
        OrderingScheme::SkolemYxi => match m % 4 {
            0 if n >= 13 => cubic(n, q(55, 1728), q(-31, 576), q(-137, 576), q(-1279, 1728)),
            _ if n >= 7 => cubic(n, q(55, 1728), q(-31, 576), q(-173, 576), q(1421, 1728)),
            _ => unreachable!("order_parameter enforces n >= 7"),
        },
        OrderingScheme::SkolemNatural => {
            cubic(n, q(5, 432), q(55, 144), q(-511, 144), q(3523, 432))
        }
    };
    Ok(integral(value, "dual min-sum formula"))
}

/// Closed-form dual max-sum, where one is known (the two YXI orderings).
pub fn dual_max_sum_formula(scheme: OrderingScheme, n: u32) -> Result<i128> {
    scheme.check(n)?;
    let value = match scheme {
        OrderingScheme::BoseYxi if n >= 15 => {
            cubic(n, q(31, 432), q(-9, 16), q(35, 16), q(-55, 16))
        }
        OrderingScheme::BoseYxi => {
            return Err(Error::FormulaRange {
                formula: "g_BYXI",
                n,
                reason: "requires n >= 15",
            })
        }
        OrderingScheme::SkolemYxi => cubic(n, q(1, 12), q(-7, 24), q(1, 12), q(1, 8)),
        _ => {
            return Err(Error::FormulaRange {
                formula: "dual max-sum",
                n,
                reason: "no closed form for the natural orderings",
            })
        }
    };
    Ok(integral(value, "dual max-sum formula"))
}

/// The limit of `f_BYXI(n)` over the average-based upper bound
/// `(n-1)(n-3)(n+2)/24`, i.e. the ratio of the cubic coefficients.
pub fn yxi_asymptotic_fraction() -> Ratio<i64> {
    let ratio = q(55, 1728) / q(1, 24);
    debug_assert!(!ratio.is_zero());
    Ratio::new(
        ratio.numer().to_i64().expect("small"),
        ratio.denom().to_i64().expect("small"),
    )
}
