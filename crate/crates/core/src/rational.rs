//! Exact rationals and their `"p/q"` text form.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for ratios, bounds and popularity scores.
pub type Rational = Ratio<i64>;

/// Renders `r` as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::RationalLiteral(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => s
            .parse::<i64>()
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

pub(crate) fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let lit = RationalLiteral::deserialize(d)?;
    lit.into_rational().map_err(serde::de::Error::custom)
}

pub(crate) mod option {
    use super::*;

    pub(crate) fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub(crate) fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Rational>, D::Error> {
        Option::<RationalLiteral>::deserialize(d)?
            .map(|lit| lit.into_rational().map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub(crate) mod vec {
    use serde::ser::SerializeSeq;

    use super::*;

    pub(crate) fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RationalLiteral>::deserialize(d)?
            .into_iter()
            .map(|lit| lit.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Accepts either a JSON integer or a `"p/q"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Int(i64),
    Text(String),
}

impl RationalLiteral {
    pub fn into_rational(self) -> Result<Rational> {
        match self {
            RationalLiteral::Int(v) => Ok(Rational::from_integer(v)),
            RationalLiteral::Text(s) => parse_rational(&s),
        }
    }
}

/// Parses a popularity file: a JSON array whose entries are integers or `"p/q"` strings.
pub fn parse_rational_array(json: &str) -> Result<Vec<Rational>> {
    let raw: Vec<RationalLiteral> =
        serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    raw.into_iter()
        .map(RationalLiteral::into_rational)
        .collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn integers_render_without_denominator() {
        assert_eq!(format_rational(&Rational::new(4, 2)), "2");
        assert_eq!(format_rational(&Rational::new(30, 13)), "30/13");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn popularity_array_mixes_forms() {
        let v = parse_rational_array(r#"[1, "3/4", "-2", 0]"#).unwrap();
        assert_eq!(
            v,
            vec![
                Rational::from_integer(1),
                Rational::new(3, 4),
                Rational::from_integer(-2),
                Rational::from_integer(0)
            ]
        );
    }

    proptest! {
        #[test]
        fn text_form_round_trips(p in -100_000i64..100_000, q in 1i64..10_000) {
            let r = Rational::new(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
