//! Closed-form bounds on block sums and dual point sums, in exact arithmetic.

use serde::{Deserialize, Serialize};

use crate::constructions::Construction;
use crate::design::{BlockLabeling, SteinerTripleSystem};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Whether a bound caps a quantity from above or from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

/// One bound, optionally checked against a concrete design.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub quantity: String,
    pub direction: Direction,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    #[serde(with = "crate::rational")]
    pub value: Rational,
    #[serde(
        with = "crate::rational::option",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub observed: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
}

impl BoundReport {
    fn new(name: &str, quantity: &str, direction: Direction, n: u32, value: Rational) -> Self {
        BoundReport {
            name: name.to_string(),
            quantity: quantity.to_string(),
            direction,
            n,
            k: None,
            t: None,
            value,
            observed: None,
            satisfied: None,
        }
    }

    fn with_kt(mut self, k: u32, t: u32) -> Self {
        self.k = Some(k);
        self.t = Some(t);
        self
    }

    /// Records `observed` and whether it respects the bound.
    pub fn check(mut self, observed: Rational) -> Self {
        self.satisfied = Some(match self.direction {
            Direction::Upper => observed <= self.value,
            Direction::Lower => observed >= self.value,
        });
        self.observed = Some(observed);
        self
    }
}

fn int(v: u64) -> Rational {
    Rational::from_integer(v as i64)
}

fn check_params(n: u32, k: u32, t: u32) -> Result<()> {
    if 2 <= t && t < k && k < n {
        Ok(())
    } else {
        Err(Error::BoundParameters { n, k, t })
    }
}

fn check_sts_order(n: u32) -> Result<()> {
    if n >= 7 && (n % 6 == 1 || n % 6 == 3) && n <= crate::design::MAX_POINTS {
        Ok(())
    } else {
        Err(Error::PointCount(n))
    }
}

/// Upper bound on the min-sum of any Steiner system `S(t, k, n)`:
/// `(n(k - t + 1) + k(t - 2)) / 2`.
pub fn min_sum_upper_bound(n: u32, k: u32, t: u32) -> Result<Rational> {
    check_params(n, k, t)?;
    let (n, k, t) = (n as i64, k as i64, t as i64);
    Ok(Rational::new(n * (k - t + 1) + k * (t - 2), 2))
}

/// Lower bound on the max-sum of any Steiner system `S(t, k, n)`:
/// `(nk + nt - n - kt) / 2`.
pub fn max_sum_lower_bound(n: u32, k: u32, t: u32) -> Result<Rational> {
    check_params(n, k, t)?;
    let (n, k, t) = (n as i64, k as i64, t as i64);
    Ok(Rational::new(n * k + n * t - n - k * t, 2))
}

/// Lower bounds `(n, 2)` on the difference-sum and ratio-sum of any STS(n).
pub fn sts_difference_ratio_bounds(n: u32) -> Result<(Rational, Rational)> {
    check_sts_order(n)?;
    Ok((int(n as u64), int(2)))
}

/// Upper bound `(n-1)(n-3)(n+2)/24` on the dual min-sum of any labeled STS(n).
pub fn dual_min_sum_upper_bound(n: u32) -> Result<Rational> {
    check_sts_order(n)?;
    let n = n as i64;
    Ok(Rational::new((n - 1) * (n - 3) * (n + 2), 24))
}

/// Upper bound on the max-sum of the mapped Bose (`8n/3 - 4`) or Skolem
/// (`(8n - 11)/3`) system.
pub fn construction_max_sum_upper_bound(construction: Construction, n: u32) -> Result<Rational> {
    construction.order_parameter(n)?;
    let n = n as i64;
    Ok(match construction {
        Construction::Bose => Rational::new(8 * n, 3) - 4,
        Construction::Skolem => Rational::new(8 * n - 11, 3),
    })
}

/// The bounds that apply to any design with these parameters, unchecked.
///
/// With `k = 3, t = 2` and an STS order this includes the difference, ratio
/// and dual bounds.
pub fn bound_table(n: u32, k: u32, t: u32) -> Result<Vec<BoundReport>> {
    let mut out = vec![
        BoundReport::new(
            "min_sum_upper",
            "min_sum",
            Direction::Upper,
            n,
            min_sum_upper_bound(n, k, t)?,
        )
        .with_kt(k, t),
        BoundReport::new(
            "max_sum_lower",
            "max_sum",
            Direction::Lower,
            n,
            max_sum_lower_bound(n, k, t)?,
        )
        .with_kt(k, t),
    ];
    if (k, t) == (3, 2) && check_sts_order(n).is_ok() {
        let (d, r) = sts_difference_ratio_bounds(n)?;
        out.push(BoundReport::new(
            "difference_sum_lower",
            "difference_sum",
            Direction::Lower,
            n,
            d,
        ));
        out.push(BoundReport::new(
            "ratio_sum_lower",
            "ratio_sum",
            Direction::Lower,
            n,
            r,
        ));
        out.push(BoundReport::new(
            "dual_min_sum_upper",
            "dual_min_sum",
            Direction::Upper,
            n,
            dual_min_sum_upper_bound(n)?,
        ));
        if let Some(c) = Construction::for_n(n) {
            out.push(BoundReport::new(
                &format!("{}_max_sum_upper", c.name()),
                "max_sum",
                Direction::Upper,
                n,
                construction_max_sum_upper_bound(c, n)?,
            ));
        }
    }
    Ok(out)
}

/// Checks a system against every general STS bound, plus the dual bound when
/// a labeling is given.
///
/// Construction-specific max-sum bounds are not included: they only hold for
/// the mapped Bose and Skolem systems. Use [`check_construction_bound`].
pub fn check_system(
    system: &SteinerTripleSystem,
    labeling: Option<&BlockLabeling>,
) -> Result<Vec<BoundReport>> {
    let n = system.n();
    let stats = system.sum_stats();
    let mut out = Vec::new();
    for report in bound_table(n, 3, 2)? {
        let observed = match report.quantity.as_str() {
            "min_sum" => Some(int(stats.min_sum)),
            "max_sum" if report.name == "max_sum_lower" => Some(int(stats.max_sum)),
            "difference_sum" => Some(int(stats.difference_sum)),
            "ratio_sum" => stats.ratio_sum,
            "dual_min_sum" => match labeling {
                Some(l) => Some(int(crate::design::dual_sum_stats(system, l)?.min_sum)),
                None => None,
            },
            _ => None,
        };
        if let Some(v) = observed {
            out.push(report.check(v));
        }
    }
    Ok(out)
}

/// Checks the construction-specific max-sum bound.
pub fn check_construction_bound(
    construction: Construction,
    system: &SteinerTripleSystem,
) -> Result<BoundReport> {
    let n = system.n();
    let value = construction_max_sum_upper_bound(construction, n)?;
    Ok(BoundReport::new(
        &format!("{}_max_sum_upper", construction.name()),
        "max_sum",
        Direction::Upper,
        n,
        value,
    )
    .check(int(system.sum_stats().max_sum)))
}
