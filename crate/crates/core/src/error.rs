use thiserror::Error;

/// Errors raised by the library.
///
/// Steiner-property failures are not errors: they are reported through
/// [`crate::design::ValidityReport`]. The variants here cover malformed input,
/// precondition violations and infeasible requests.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point count {0} is outside the supported range [3, {max}]", max = crate::design::MAX_POINTS)]
    PointCount(u32),

    #[error("block {index} has {len} points, expected 3")]
    BlockSize { index: usize, len: usize },

    #[error("block {index} repeats point {point}")]
    DuplicatePoint { index: usize, point: u32 },

    #[error("block {index} contains point {point}, outside [0, {max}]")]
    PointOutOfRange { index: usize, point: u32, max: u32 },

    #[error("n = {n} is not valid for the {construction} construction (need {expected})")]
    Congruence {
        construction: &'static str,
        n: u32,
        expected: &'static str,
    },

    #[error("modulus m = {m} has the wrong parity for the {op} operation")]
    ModulusParity { op: &'static str, m: u32 },

    #[error("operand {value} is outside [0, {max}]")]
    OperandRange { value: u32, max: u32 },

    #[error("relabeling is not a bijection onto [0, {max}]")]
    NotBijective { max: u32 },

    #[error("relabeling has no image for structured point {0}")]
    MissingPoint(String),

    #[error("labeling has {got} entries but the system has {expected} blocks")]
    LabelingSize { expected: usize, got: usize },

    #[error("block labels are not a permutation of [0, {max}]")]
    LabelingNotPermutation { max: usize },

    #[error("ordering scheme {scheme} does not apply to a {construction} system")]
    SchemeMismatch {
        scheme: &'static str,
        construction: &'static str,
    },

    #[error("block tag is invalid for m = {m}: {detail}")]
    TagOutOfRange { m: u32, detail: String },

    #[error("{formula} is not claimed for n = {n}: {reason}")]
    FormulaRange {
        formula: &'static str,
        n: u32,
        reason: &'static str,
    },

    #[error("invalid bound parameters n = {n}, k = {k}, t = {t}: need 2 <= t < k < n")]
    BoundParameters { n: u32, k: u32, t: u32 },

    #[error("reduced search is only defined for the max-min-sum objective")]
    ReducedObjective,

    #[error("reduced search at n = {0} exceeds the desk-scale limit of 19; pass an override to force it")]
    SearchTooLarge(u32),

    #[error("input is not a valid Steiner triple system: {0}")]
    NotSteiner(String),

    #[error("{0}")]
    Placement(String),

    #[error("node {node} does not exist (node count {count})")]
    NodeOutOfRange { node: usize, count: usize },

    #[error("chunk {chunk} of node {node} has no surviving replica")]
    RepairInfeasible { node: usize, chunk: usize },

    #[error("popularity vector has {got} entries, expected {expected}")]
    PopularitySize { expected: usize, got: usize },

    #[error("invalid rational literal {0:?}")]
    RationalLiteral(String),

    #[error("design file: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
