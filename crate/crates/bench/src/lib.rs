//! Shared fixtures for the criterion benchmarks.

use sts_core::{apply_relabeling, construct, paper_mapping, Construction, SteinerTripleSystem};

/// The min-sum-n system of order `n`.
pub fn mapped_system(n: u32) -> SteinerTripleSystem {
    let c = Construction::for_n(n).expect("n = 1 or 3 mod 6");
    let sys = construct(c, n).expect("valid n");
    apply_relabeling(&sys, &paper_mapping(&sys)).expect("mapping matches system")
}
