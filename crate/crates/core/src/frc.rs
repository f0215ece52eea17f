//! Fractional Repetition Code placements built from triple systems, access
//! balance reports and single-node exact repair.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::design::{BlockLabeling, SteinerTripleSystem};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// How a triple system becomes a placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    /// One node per block, storing the block's points as chunks.
    Blocks,
    /// One node per point, storing the labels of the blocks through it.
    Dual,
}

impl FromStr for PlacementMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "blocks" => Ok(PlacementMode::Blocks),
            "dual" => Ok(PlacementMode::Dual),
            _ => Err(format!("unknown placement mode {s:?}")),
        }
    }
}

impl fmt::Display for PlacementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlacementMode::Blocks => "blocks",
            PlacementMode::Dual => "dual",
        })
    }
}

/// Chunks placed on nodes, with a popularity score per chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrcSystem {
    chunk_count: usize,
    placement: Vec<Vec<usize>>,
    repetition: usize,
    repair_degree: usize,
    #[serde(with = "crate::rational::vec")]
    popularity: Vec<Rational>,
}

impl FrcSystem {
    /// Validates a placement. Popularity defaults to the chunk index.
    pub fn new(chunk_count: usize, mut placement: Vec<Vec<usize>>) -> Result<Self> {
        let mut holders = vec![0usize; chunk_count];
        for (node, chunks) in placement.iter_mut().enumerate() {
            chunks.sort_unstable();
            if chunks.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Placement(format!(
                    "node {node} stores a chunk twice"
                )));
            }
            for &c in chunks.iter() {
                let slot = holders.get_mut(c).ok_or_else(|| {
                    Error::Placement(format!("node {node} stores chunk {c} of {chunk_count}"))
                })?;
                *slot += 1;
            }
        }
        let repetition = holders.first().copied().unwrap_or(0);
        if let Some(c) = holders.iter().position(|&h| h != repetition || h == 0) {
            return Err(Error::Placement(format!(
                "chunk {c} is stored {} times, chunk 0 {repetition} times",
                holders[c]
            )));
        }
        for a in 0..placement.len() {
            for b in a + 1..placement.len() {
                if shared(&placement[a], &placement[b]) > 1 {
                    return Err(Error::Placement(format!(
                        "nodes {a} and {b} share more than one chunk"
                    )));
                }
            }
        }
        let repair_degree = placement.iter().map(Vec::len).max().unwrap_or(0);
        Ok(FrcSystem {
            chunk_count,
            placement,
            repetition,
            repair_degree,
            popularity: (0..chunk_count as i64)
                .map(Rational::from_integer)
                .collect(),
        })
    }

    /// Replaces the popularity scores; every score must be nonnegative.
    pub fn with_popularity(mut self, popularity: Vec<Rational>) -> Result<Self> {
        if popularity.len() != self.chunk_count {
            return Err(Error::PopularitySize {
                expected: self.chunk_count,
                got: popularity.len(),
            });
        }
        if let Some(i) = popularity.iter().position(|p| *p < Rational::zero()) {
            return Err(Error::Placement(format!(
                "chunk {i} has negative popularity"
            )));
        }
        self.popularity = popularity;
        Ok(self)
    }

    pub fn chunk_count(&self) -> usize {
        self.chunk_count
    }

    pub fn node_count(&self) -> usize {
        self.placement.len()
    }

    pub fn placement(&self) -> &[Vec<usize>] {
        &self.placement
    }

    /// Number of nodes storing each chunk.
    pub fn repetition(&self) -> usize {
        self.repetition
    }

    /// Chunks per node, which is the number of donors an exact repair contacts.
    pub fn repair_degree(&self) -> usize {
        self.repair_degree
    }

    pub fn popularity(&self) -> &[Rational] {
        &self.popularity
    }

    /// Largest number of chunks shared by two distinct nodes.
    pub fn max_pairwise_intersection(&self) -> usize {
        let mut max = 0;
        for a in 0..self.placement.len() {
            for b in a + 1..self.placement.len() {
                max = max.max(shared(&self.placement[a], &self.placement[b]));
            }
        }
        max
    }
}

fn shared(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Builds the placement of a triple system or of its dual.
pub fn placement_from_design(
    system: &SteinerTripleSystem,
    mode: PlacementMode,
    labeling: Option<&BlockLabeling>,
) -> Result<FrcSystem> {
    match mode {
        PlacementMode::Blocks => FrcSystem::new(
            system.n() as usize,
            system
                .blocks()
                .iter()
                .map(|b| b.points().iter().map(|&p| p as usize).collect())
                .collect(),
        ),
        PlacementMode::Dual => {
            let labeling = labeling
                .ok_or_else(|| Error::Placement("dual placement needs a block labeling".into()))?;
            if labeling.len() != system.block_count() {
                return Err(Error::LabelingSize {
                    expected: system.block_count(),
                    got: labeling.len(),
                });
            }
            FrcSystem::new(
                system.block_count(),
                system
                    .incidence()
                    .into_iter()
                    .map(|blocks| blocks.iter().map(|&b| labeling.label(b) as usize).collect())
                    .collect(),
            )
        }
    }
}

/// Per-node popularity totals and their spread.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    #[serde(with = "crate::rational::vec")]
    pub node_sums: Vec<Rational>,
    #[serde(with = "crate::rational")]
    pub min: Rational,
    #[serde(with = "crate::rational")]
    pub max: Rational,
    #[serde(with = "crate::rational")]
    pub spread: Rational,
    /// `max / min`; absent when `min` is zero.
    #[serde(with = "crate::rational::option")]
    pub ratio: Option<Rational>,
}

pub fn balance_report(frc: &FrcSystem) -> BalanceReport {
    let node_sums: Vec<Rational> = frc
        .placement
        .iter()
        .map(|chunks| chunks.iter().map(|&c| frc.popularity[c]).sum())
        .collect();
    let min = node_sums
        .iter()
        .copied()
        .min()
        .unwrap_or_else(Rational::zero);
    let max = node_sums
        .iter()
        .copied()
        .max()
        .unwrap_or_else(Rational::zero);
    BalanceReport {
        spread: max - min,
        ratio: (!min.is_zero()).then(|| max / min),
        node_sums,
        min,
        max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Donation {
    pub chunk: usize,
    pub donor: usize,
}

/// Outcome of rebuilding one failed node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTranscript {
    pub failed_node: usize,
    pub donations: Vec<Donation>,
    /// Every lost chunk came from a different survivor.
    pub distinct_donors: bool,
    pub reconstructed: Vec<usize>,
    /// The rebuilt content equals the lost content.
    pub exact: bool,
}

/// Rebuilds `failed` by downloading each lost chunk from one survivor.
///
/// Donors are chosen by a maximum bipartite matching between lost chunks and
/// survivors, so they are pairwise distinct whenever that is possible. Ties
/// go to the lowest node index.
pub fn simulate_repair(frc: &FrcSystem, failed: usize) -> Result<RepairTranscript> {
    let lost = frc.placement.get(failed).ok_or(Error::NodeOutOfRange {
        node: failed,
        count: frc.node_count(),
    })?;
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); frc.chunk_count];
    for (node, chunks) in frc.placement.iter().enumerate() {
        if node != failed {
            for &c in chunks {
                holders[c].push(node);
            }
        }
    }
    let candidates: Vec<&[usize]> = lost.iter().map(|&c| holders[c].as_slice()).collect();
    if let Some(i) = candidates.iter().position(|h| h.is_empty()) {
        return Err(Error::RepairInfeasible {
            node: failed,
            chunk: lost[i],
        });
    }
    let assignment = max_matching(&candidates, frc.node_count());
    let distinct_donors = assignment.iter().all(Option::is_some);
    let donations: Vec<Donation> = lost
        .iter()
        .zip(&assignment)
        .zip(&candidates)
        .map(|((&chunk, &donor), cands)| Donation {
            chunk,
            donor: donor.unwrap_or(cands[0]),
        })
        .collect();
    let mut reconstructed: Vec<usize> = donations
        .iter()
        .filter(|d| frc.placement[d.donor].binary_search(&d.chunk).is_ok())
        .map(|d| d.chunk)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    reconstructed.sort_unstable();
    Ok(RepairTranscript {
        failed_node: failed,
        exact: &reconstructed == lost,
        donations,
        distinct_donors,
        reconstructed,
    })
}

/// Kuhn's augmenting-path matching. `candidates[i]` lists the right-hand
/// vertices that left vertex `i` may use.
fn max_matching(candidates: &[&[usize]], right: usize) -> Vec<Option<usize>> {
    fn augment(
        i: usize,
        candidates: &[&[usize]],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in candidates[i] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|j| augment(j, candidates, seen, owner)) {
                owner[v] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for i in 0..candidates.len() {
        let mut seen = vec![false; right];
        augment(i, candidates, &mut seen, &mut owner);
    }
    let mut matched = vec![None; candidates.len()];
    for (v, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            matched[*i] = Some(v);
        }
    }
    matched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{apply_relabeling, construct, paper_mapping, Construction};
    use crate::dual::{make_labeling, OrderingScheme};

    /// Five nodes, one chunk per pair of nodes.
    fn complete_graph_placement() -> FrcSystem {
        let mut nodes = vec![Vec::new(); 5];
        let mut chunk = 0;
        for a in 0..5 {
            for b in a + 1..5 {
                nodes[a].push(chunk);
                nodes[b].push(chunk);
                chunk += 1;
            }
        }
        FrcSystem::new(10, nodes).unwrap()
    }

    fn mapped(n: u32) -> (SteinerTripleSystem, BlockLabeling) {
        let c = Construction::for_n(n).unwrap();
        let s = construct(c, n).unwrap();
        let sts = apply_relabeling(&s, &paper_mapping(&s)).unwrap();
        let lab = make_labeling(&s, OrderingScheme::new(c, true)).unwrap();
        (sts, lab)
    }

    #[test]
    fn four_distinct_donors_in_the_ten_chunk_example() {
        let frc = complete_graph_placement();
        assert_eq!(frc.repetition(), 2);
        assert_eq!(frc.repair_degree(), 4);
        let t = simulate_repair(&frc, 0).unwrap();
        assert!(t.exact && t.distinct_donors);
        let donors: BTreeSet<usize> = t.donations.iter().map(|d| d.donor).collect();
        assert_eq!(donors, BTreeSet::from([1, 2, 3, 4]));
    }

    #[test]
    fn blocks_mode_on_example_nine() {
        let (sts, _) = mapped(9);
        let frc = placement_from_design(&sts, PlacementMode::Blocks, None).unwrap();
        assert_eq!(frc.node_count(), 12);
        assert!(frc.placement().iter().all(|c| c.len() == 3));
        assert!(frc.max_pairwise_intersection() <= 1);
        let report = balance_report(&frc);
        assert_eq!(report.min, Rational::from_integer(9));
        assert!(report.max <= Rational::from_integer(20));
    }

    #[test]
    fn dual_mode_sums_match_dual_point_sums() {
        let (sts, lab) = mapped(9);
        let frc = placement_from_design(&sts, PlacementMode::Dual, Some(&lab)).unwrap();
        assert_eq!(frc.node_count(), 9);
        assert!(frc.placement().iter().all(|c| c.len() == 4));
        let sums = crate::design::dual_point_sums(&sts, &lab).unwrap();
        let report = balance_report(&frc);
        let expected: Vec<Rational> = sums
            .iter()
            .map(|&s| Rational::from_integer(s as i64))
            .collect();
        assert_eq!(report.node_sums, expected);
        assert_eq!(report.min, Rational::from_integer(20));
    }

    #[test]
    fn dual_mode_needs_labeling() {
        let (sts, _) = mapped(9);
        assert!(placement_from_design(&sts, PlacementMode::Dual, None).is_err());
    }

    #[test]
    fn uniform_popularity_has_zero_spread() {
        let frc = complete_graph_placement()
            .with_popularity(vec![Rational::from_integer(1); 10])
            .unwrap();
        let report = balance_report(&frc);
        assert!(report.spread.is_zero());
        assert_eq!(report.ratio, Some(Rational::from_integer(1)));
    }

    #[test]
    fn single_replica_is_not_repairable() {
        let frc = FrcSystem::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(
            simulate_repair(&frc, 0),
            Err(Error::RepairInfeasible { node: 0, chunk: 0 })
        );
        assert!(simulate_repair(&frc, 1).is_err());
    }

    #[test]
    fn repeated_donor_is_flagged() {
        // chunks 0 and 1 both live only on node 1 besides node 0
        let frc = FrcSystem::new(2, vec![vec![0, 1], vec![0, 1]]);
        assert!(frc.is_err(), "two shared chunks violate the placement rule");
        let frc = FrcSystem {
            chunk_count: 2,
            placement: vec![vec![0, 1], vec![0, 1]],
            repetition: 2,
            repair_degree: 2,
            popularity: vec![Rational::zero(); 2],
        };
        let t = simulate_repair(&frc, 0).unwrap();
        assert!(t.exact);
        assert!(!t.distinct_donors);
    }

    #[test]
    fn invalid_placements() {
        assert!(FrcSystem::new(3, vec![vec![0, 0]]).is_err());
        assert!(FrcSystem::new(2, vec![vec![0, 5]]).is_err());
        assert!(FrcSystem::new(2, vec![vec![0, 1], vec![0]]).is_err());
        let frc = complete_graph_placement();
        assert!(frc
            .clone()
            .with_popularity(vec![Rational::zero(); 3])
            .is_err());
        assert!(frc
            .with_popularity(vec![Rational::from_integer(-1); 10])
            .is_err());
    }

    #[test]
    fn every_node_repairs_from_distinct_donors() {
        for n in [7, 9, 13, 15] {
            let (sts, lab) = mapped(n);
            for mode in [PlacementMode::Blocks, PlacementMode::Dual] {
                let frc = placement_from_design(&sts, mode, Some(&lab)).unwrap();
                for node in 0..frc.node_count() {
                    let t = simulate_repair(&frc, node).unwrap();
                    assert!(t.exact && t.distinct_donors, "n={n} {mode} node {node}");
                }
            }
        }
    }
}
