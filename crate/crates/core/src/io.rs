//! JSON design files and canonical JSON output.
//!
//! A design file is `{"n": 9, "blocks": [[0, 3, 6], ...], "block_labels": [...]}`
//! where `block_labels` is optional and defaults to file order.

use serde::{Deserialize, Serialize};

use crate::constructions::{
    apply_relabeling, construct, identity_relabeling, paper_mapping, Construction,
};
use crate::design::{verify_sts, BlockLabeling, SteinerTripleSystem, ValidityReport};
use crate::dual::{make_labeling, OrderingScheme};
use crate::error::{Error, Result};
use crate::rational::{parse_rational_array, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub n: u32,
    pub blocks: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_labels: Option<Vec<u32>>,
}

impl DesignFile {
    pub fn from_system(system: &SteinerTripleSystem, labeling: Option<&BlockLabeling>) -> Self {
        DesignFile {
            n: system.n(),
            blocks: system
                .blocks()
                .iter()
                .map(|b| b.points().to_vec())
                .collect(),
            block_labels: labeling.map(|l| l.labels().to_vec()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    /// Structural checks plus the Steiner property, as a report.
    pub fn verify(&self) -> Result<ValidityReport> {
        verify_sts(self.n, &self.blocks)
    }

    /// The system, rejected unless it is a Steiner triple system.
    pub fn system(&self) -> Result<SteinerTripleSystem> {
        SteinerTripleSystem::from_raw(self.n, &self.blocks)
    }

    /// The stored labels, or file order when there are none.
    pub fn labeling(&self) -> Result<BlockLabeling> {
        let labeling = match &self.block_labels {
            Some(l) => BlockLabeling::new(l.clone())?,
            None => BlockLabeling::positional(self.blocks.len()),
        };
        if labeling.len() != self.blocks.len() {
            return Err(Error::LabelingSize {
                expected: self.blocks.len(),
                got: labeling.len(),
            });
        }
        Ok(labeling)
    }
}

/// Point relabeling applied by [`generate_design`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    /// The min-sum-n Bose or Skolem mapping.
    Paper,
    /// `(x, i) -> x + i*m`, infinity last.
    Identity,
}

impl std::str::FromStr for Mapping {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(Mapping::Paper),
            "identity" => Ok(Mapping::Identity),
            _ => Err(format!("unknown mapping {s:?}")),
        }
    }
}

/// Constructs, relabels and labels a system.
///
/// Blocks stay in construction order; the ordering is carried by the labels.
pub fn generate_design(
    construction: Construction,
    n: u32,
    mapping: Mapping,
    scheme_yxi: bool,
) -> Result<(SteinerTripleSystem, BlockLabeling)> {
    let structured = construct(construction, n)?;
    let relabeling = match mapping {
        Mapping::Paper => paper_mapping(&structured),
        Mapping::Identity => identity_relabeling(&structured),
    };
    let system = apply_relabeling(&structured, &relabeling)?;
    let labeling = make_labeling(&structured, OrderingScheme::new(construction, scheme_yxi))?;
    Ok((system, labeling))
}

/// Pretty JSON with object keys sorted, ending in a newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    // serde_json's default map is ordered by key
    let v = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

/// Reads a popularity vector: a JSON array of integers or `"p/q"` strings.
pub fn parse_popularity(text: &str) -> Result<Vec<Rational>> {
    parse_rational_array(text)
}
