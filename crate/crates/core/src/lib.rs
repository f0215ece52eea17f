//! Access-balanced Steiner triple systems.
//!
//! Builds Bose and Skolem triple systems, relabels their points so that every
//! block sum is at least `n`, labels their blocks so that the dual point sums
//! are large, and checks all of it against closed forms and exhaustive search.
//! The designs can then be used as Fractional Repetition Code placements.

pub mod bounds;
pub mod constructions;
pub mod design;
pub mod dual;
pub mod error;
pub mod frc;
pub mod io;
pub mod rational;
pub mod reproduce;
pub mod search;

pub use constructions::{
    apply_relabeling, bose_mapping, bose_op, construct, construct_bose, construct_skolem,
    identity_relabeling, paper_mapping, skolem_mapping, skolem_op, BlockTag, Construction, Point,
    PointRelabeling, StructuredBlock, StructuredSystem,
};
pub use design::{
    complement_relabel, dual_point_sums, dual_sum_stats, sum_stats, verify_sts, Block,
    BlockLabeling, SteinerTripleSystem, SumStats, ValidityReport, Violation,
};
pub use dual::{make_labeling, OrderingScheme};
pub use error::{Error, Result};
pub use frc::{balance_report, placement_from_design, simulate_repair, FrcSystem, PlacementMode};
pub use io::{generate_design, DesignFile, Mapping};
pub use rational::Rational;
pub use search::{Objective, SearchMode, SearchResult, SearchTask, Witness};
