//! Exhaustive searches over point relabelings and block labelings.
//!
//! Every search is a depth-first branch and bound in a fixed lexicographic
//! order. Subtrees are cut only when an admissible bound shows they cannot
//! strictly improve the incumbent, so the first optimum found is the
//! lexicographically smallest one. The top level is split into independent
//! subtasks that run in parallel and are merged in index order, which makes
//! the result independent of scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{dual_sum_stats, BlockLabeling, SteinerTripleSystem};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest order the reduced search accepts without an override.
pub const REDUCED_SEARCH_LIMIT: u32 = 19;

/// Point relabelings use a 64-bit label mask.
const MAX_PERMUTATION_POINTS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Maximize the min block sum over point relabelings.
    MaxMinSum,
    /// Minimize the difference-sum over point relabelings.
    MinDifferenceSum,
    /// Minimize the ratio-sum over point relabelings.
    MinRatioSum,
    /// Maximize the dual min-sum over block labelings.
    MaxDualMinSum,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::MaxMinSum => "maxmin",
            Objective::MinDifferenceSum => "mindiff",
            Objective::MinRatioSum => "minratio",
            Objective::MaxDualMinSum => "maxdualmin",
        }
    }

    fn maximizes(self) -> bool {
        matches!(self, Objective::MaxMinSum | Objective::MaxDualMinSum)
    }

    /// Best value any STS(n) can reach; the search stops once it is met.
    fn proven_limit(self, system: &SteinerTripleSystem) -> Rational {
        let n = system.n() as i64;
        match self {
            Objective::MaxMinSum | Objective::MinDifferenceSum => Rational::from_integer(n),
            Objective::MinRatioSum => Rational::from_integer(2),
            Objective::MaxDualMinSum => {
                let blocks = system.block_count() as i64;
                Rational::from_integer(3 * blocks * (blocks - 1) / 2 / n)
            }
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "maxmin" => Ok(Objective::MaxMinSum),
            "mindiff" => Ok(Objective::MinDifferenceSum),
            "minratio" => Ok(Objective::MinRatioSum),
            "maxdualmin" => Ok(Objective::MaxDualMinSum),
            _ => Err(format!("unknown objective {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Full,
    Reduced,
}

/// A search request.
#[derive(Debug, Clone)]
pub struct SearchTask {
    pub system: SteinerTripleSystem,
    pub objective: Objective,
    pub mode: SearchMode,
    /// Node limit over all subtasks, split evenly between them.
    pub budget: Option<u64>,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    /// Lets the reduced search run above [`REDUCED_SEARCH_LIMIT`].
    pub allow_large: bool,
}

impl SearchTask {
    pub fn new(system: SteinerTripleSystem, objective: Objective, mode: SearchMode) -> Self {
        SearchTask {
            system,
            objective,
            mode,
            budget: None,
            jobs: None,
            allow_large: false,
        }
    }

    pub fn budget(mut self, nodes: u64) -> Self {
        self.budget = Some(nodes);
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = Some(jobs);
        self
    }

    pub fn run(&self) -> Result<SearchResult> {
        match self.mode {
            SearchMode::Reduced => reduced_search(self),
            SearchMode::Full => full_permutation_search(self),
        }
    }
}

/// A point relabeling (`perm[p]` is the new label of `p`) or a block labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Relabeling(Vec<u32>),
    BlockLabeling(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub objective: Objective,
    pub mode: SearchMode,
    pub n: u32,
    /// Best value found; `None` only if the budget ran out before any leaf.
    #[serde(with = "crate::rational::option")]
    pub value: Option<Rational>,
    pub witness: Option<Witness>,
    pub nodes: u64,
    /// The search covered its whole space, by enumeration, sound pruning or
    /// by meeting the proven limit, within the budget.
    pub exhaustive: bool,
    /// The value equals the best any STS(n) can reach.
    pub reached_limit: bool,
    pub subtasks: usize,
}

/// Scores a witness from scratch.
pub fn score_witness(
    system: &SteinerTripleSystem,
    objective: Objective,
    witness: &Witness,
) -> Result<Rational> {
    match (objective, witness) {
        (Objective::MaxDualMinSum, Witness::BlockLabeling(labels)) => {
            let labeling = BlockLabeling::new(labels.clone())?;
            Ok(Rational::from_integer(
                dual_sum_stats(system, &labeling)?.min_sum as i64,
            ))
        }
        (Objective::MaxDualMinSum, _) | (_, Witness::BlockLabeling(_)) => Err(Error::Format(
            format!("witness kind does not match objective {objective}"),
        )),
        (_, Witness::Relabeling(perm)) => {
            let stats = system.relabel(perm)?.sum_stats();
            Ok(match objective {
                Objective::MaxMinSum => Rational::from_integer(stats.min_sum as i64),
                Objective::MinDifferenceSum => Rational::from_integer(stats.difference_sum as i64),
                _ => stats
                    .ratio_sum
                    .ok_or_else(|| Error::Format("ratio undefined for min_sum 0".into()))?,
            })
        }
    }
}

/// Outcome of one top-level subtask.
struct Sub {
    /// Higher is better.
    score: Option<Rational>,
    witness: Vec<u32>,
    nodes: u64,
    complete: bool,
}

fn run_parallel<F>(task: &SearchTask, count: usize, f: F) -> Result<Vec<Sub>>
where
    F: Fn(usize, Option<u64>) -> Sub + Sync + Send,
{
    let per_task = task.budget.map(|b| b.div_ceil(count.max(1) as u64));
    let work = || (0..count).into_par_iter().map(|i| f(i, per_task)).collect();
    match task.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Format(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

fn merge(task: &SearchTask, subs: Vec<Sub>) -> SearchResult {
    let limit = task.objective.proven_limit(&task.system);
    let sign = if task.objective.maximizes() { 1 } else { -1 };
    let nodes = subs.iter().map(|s| s.nodes).sum();
    let subtasks = subs.len();
    let mut complete = subs.iter().all(|s| s.complete);
    let mut best: Option<Sub> = None;
    for s in subs {
        if s.score.is_some() && best.as_ref().is_none_or(|b| s.score > b.score) {
            best = Some(s);
        }
    }
    let value = best.as_ref().and_then(|b| b.score).map(|v| v * sign);
    let reached_limit = value == Some(limit);
    // a subtask that stopped at the limit settles the question even if
    // another ran out of budget
    complete |= reached_limit;
    let witness = best.map(|b| match task.objective {
        Objective::MaxDualMinSum => Witness::BlockLabeling(b.witness),
        _ => Witness::Relabeling(b.witness),
    });
    SearchResult {
        objective: task.objective,
        mode: task.mode,
        n: task.system.n(),
        value,
        witness: witness.filter(|_| value.is_some()),
        nodes,
        exhaustive: complete,
        reached_limit,
        subtasks,
    }
}

/// Searches all point relabelings, or all block labelings for
/// [`Objective::MaxDualMinSum`].
pub fn full_permutation_search(task: &SearchTask) -> Result<SearchResult> {
    if task.objective == Objective::MaxDualMinSum {
        return dual_search(task);
    }
    let n = task.system.n();
    if n > MAX_PERMUTATION_POINTS {
        return Err(Error::PointCount(n));
    }
    let target =
        task.objective.proven_limit(&task.system) * if task.objective.maximizes() { 1 } else { -1 };
    let subs = run_parallel(task, n as usize, |first, budget| {
        let mut s = PermSearch::new(&task.system, task.objective, target, budget);
        s.assign(0, first as u32);
        if !s.fails_bound(0) {
            s.dfs(1);
        }
        s.finish()
    })?;
    Ok(merge(task, subs))
}

struct PermSearch<'a> {
    n: usize,
    blocks: Vec<[usize; 3]>,
    blocks_of: Vec<Vec<usize>>,
    objective: Objective,
    target: Rational,
    budget: Option<u64>,
    perm: Vec<u32>,
    used: u64,
    filled: Vec<u8>,
    partial: Vec<i64>,
    best: Option<Rational>,
    best_perm: Vec<u32>,
    nodes: u64,
    out_of_budget: bool,
    _system: &'a SteinerTripleSystem,
}

impl<'a> PermSearch<'a> {
    fn new(
        system: &'a SteinerTripleSystem,
        objective: Objective,
        target: Rational,
        budget: Option<u64>,
    ) -> Self {
        let n = system.n() as usize;
        let blocks: Vec<[usize; 3]> = system
            .blocks()
            .iter()
            .map(|b| b.points().map(|p| p as usize))
            .collect();
        PermSearch {
            n,
            blocks_of: system.incidence(),
            blocks,
            objective,
            target,
            budget,
            perm: vec![u32::MAX; n],
            used: 0,
            filled: vec![0; system.block_count()],
            partial: vec![0; system.block_count()],
            best: None,
            best_perm: Vec::new(),
            nodes: 0,
            out_of_budget: false,
            _system: system,
        }
    }

    fn assign(&mut self, p: usize, label: u32) {
        self.perm[p] = label;
        self.used |= 1 << label;
        for &b in &self.blocks_of[p] {
            self.filled[b] += 1;
            self.partial[b] += label as i64;
        }
    }

    fn unassign(&mut self, p: usize) {
        let label = self.perm[p];
        self.perm[p] = u32::MAX;
        self.used &= !(1 << label);
        for &b in &self.blocks_of[p] {
            self.filled[b] -= 1;
            self.partial[b] -= label as i64;
        }
    }

    /// Sums of the 0..=3 smallest and largest unused labels.
    fn extremes(&self) -> ([i64; 4], [i64; 4]) {
        let mut low = [0i64; 4];
        let mut high = [0i64; 4];
        let mut free = !self.used & (u64::MAX >> (64 - self.n));
        let mut rev = free;
        for k in 1..4 {
            if free != 0 {
                let l = free.trailing_zeros() as i64;
                free &= free - 1;
                low[k] = low[k - 1] + l;
            } else {
                low[k] = low[k - 1];
            }
            if rev != 0 {
                let h = 63 - rev.leading_zeros() as i64;
                rev &= !(1 << h);
                high[k] = high[k - 1] + h;
            } else {
                high[k] = high[k - 1];
            }
        }
        (low, high)
    }

    /// Optimistic score of any completion of the current partial relabeling.
    fn optimistic(&self) -> Rational {
        let (low, high) = self.extremes();
        let mut min_ub = i64::MAX;
        let mut max_lb = i64::MIN;
        for b in 0..self.blocks.len() {
            let open = 3 - self.filled[b] as usize;
            min_ub = min_ub.min(self.partial[b] + high[open]);
            max_lb = max_lb.max(self.partial[b] + low[open]);
        }
        match self.objective {
            Objective::MaxMinSum => Rational::from_integer(min_ub),
            Objective::MinDifferenceSum => -Rational::from_integer((max_lb - min_ub).max(0)),
            _ => -Rational::new(max_lb.max(min_ub), min_ub),
        }
    }

    fn fails_bound(&self, _depth: usize) -> bool {
        self.best.is_some_and(|best| self.optimistic() <= best)
    }

    fn done(&self) -> bool {
        self.out_of_budget || self.best == Some(self.target)
    }

    fn dfs(&mut self, p: usize) {
        if self.done() {
            return;
        }
        if p == self.n {
            // every block is complete, so the optimistic score is exact
            let score = self.optimistic();
            if self.best.is_none_or(|b| score > b) {
                self.best = Some(score);
                self.best_perm = self.perm.clone();
            }
            return;
        }
        for label in 0..self.n as u32 {
            if self.used & (1 << label) != 0 {
                continue;
            }
            if self.budget.is_some_and(|b| self.nodes >= b) {
                self.out_of_budget = true;
                return;
            }
            self.nodes += 1;
            self.assign(p, label);
            if !self.fails_bound(p) {
                self.dfs(p + 1);
            }
            self.unassign(p);
            if self.done() {
                return;
            }
        }
    }

    fn finish(self) -> Sub {
        Sub {
            score: self.best,
            witness: self.best_perm,
            nodes: self.nodes + 1,
            complete: !self.out_of_budget,
        }
    }
}

/// Searches relabelings that send one point to 0 and the other two points
/// of each block through it to a pair `{i, n - i}`.
///
/// Any relabeling with min-sum `n` has this shape, so the search finds one
/// whenever it exists. Otherwise the value is the best min-sum within the
/// reduced space.
pub fn reduced_maxmin_search(system: &SteinerTripleSystem) -> Result<SearchResult> {
    SearchTask::new(system.clone(), Objective::MaxMinSum, SearchMode::Reduced).run()
}

fn reduced_search(task: &SearchTask) -> Result<SearchResult> {
    if task.objective != Objective::MaxMinSum {
        return Err(Error::ReducedObjective);
    }
    let n = task.system.n();
    if n > REDUCED_SEARCH_LIMIT && !task.allow_large {
        return Err(Error::SearchTooLarge(n));
    }
    let subs = run_parallel(task, n as usize, |x, budget| {
        let mut s = ReducedSearch::new(&task.system, x, budget);
        s.dfs(0);
        Sub {
            score: s.best.map(Rational::from_integer),
            witness: s.best_perm,
            nodes: s.nodes + 1,
            complete: !s.out_of_budget,
        }
    })?;
    Ok(merge(task, subs))
}

struct ReducedSearch {
    n: i64,
    blocks: Vec<[usize; 3]>,
    blocks_of: Vec<Vec<usize>>,
    /// The other two points of each block through the zero point.
    spokes: Vec<(usize, usize)>,
    perm: Vec<u32>,
    pair_used: Vec<bool>,
    budget: Option<u64>,
    best: Option<i64>,
    best_perm: Vec<u32>,
    nodes: u64,
    out_of_budget: bool,
}

impl ReducedSearch {
    fn new(system: &SteinerTripleSystem, x: usize, budget: Option<u64>) -> Self {
        let n = system.n() as usize;
        let blocks: Vec<[usize; 3]> = system
            .blocks()
            .iter()
            .map(|b| b.points().map(|p| p as usize))
            .collect();
        let blocks_of = system.incidence();
        let spokes = blocks_of[x]
            .iter()
            .map(|&b| {
                let mut other = blocks[b].iter().copied().filter(|&p| p != x);
                (other.next().unwrap(), other.next().unwrap())
            })
            .collect();
        let mut perm = vec![u32::MAX; n];
        perm[x] = 0;
        ReducedSearch {
            n: n as i64,
            blocks,
            blocks_of,
            spokes,
            perm,
            pair_used: vec![false; (n - 1) / 2 + 1],
            budget,
            best: None,
            best_perm: Vec::new(),
            nodes: 0,
            out_of_budget: false,
        }
    }

    fn done(&self) -> bool {
        self.out_of_budget || self.best == Some(self.n)
    }

    /// Whether some block through `p` is now complete with a sum that
    /// cannot beat the incumbent.
    fn blocks_fail(&self, p: usize) -> bool {
        let Some(best) = self.best else { return false };
        self.blocks_of[p].iter().any(|&b| {
            let pts = self.blocks[b];
            pts.iter().all(|&q| self.perm[q] != u32::MAX)
                && pts.iter().map(|&q| self.perm[q] as i64).sum::<i64>() <= best
        })
    }

    fn dfs(&mut self, j: usize) {
        if self.done() {
            return;
        }
        if j == self.spokes.len() {
            let min = self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&q| self.perm[q] as i64).sum::<i64>())
                .min()
                .expect("blocks");
            if self.best.is_none_or(|b| min > b) {
                self.best = Some(min);
                self.best_perm = self.perm.clone();
            }
            return;
        }
        let (a, b) = self.spokes[j];
        let r = self.pair_used.len() - 1;
        for i in 1..=r {
            if self.pair_used[i] {
                continue;
            }
            self.pair_used[i] = true;
            for flip in [false, true] {
                if self.budget.is_some_and(|lim| self.nodes >= lim) {
                    self.out_of_budget = true;
                    break;
                }
                self.nodes += 1;
                let (la, lb) = if flip {
                    (self.n as u32 - i as u32, i as u32)
                } else {
                    (i as u32, self.n as u32 - i as u32)
                };
                self.perm[a] = la;
                self.perm[b] = lb;
                if !self.blocks_fail(a) && !self.blocks_fail(b) {
                    self.dfs(j + 1);
                }
                self.perm[a] = u32::MAX;
                self.perm[b] = u32::MAX;
                if self.done() {
                    break;
                }
            }
            self.pair_used[i] = false;
            if self.done() {
                return;
            }
        }
    }
}

/// Branch and bound over block labelings, maximizing the dual min-sum.
///
/// Labels are handed out in increasing order; the choice at each level is
/// the block receiving the next label. A point whose assigned labels plus
/// the largest labels it could still receive cannot beat the incumbent cuts
/// the branch.
fn dual_search(task: &SearchTask) -> Result<SearchResult> {
    let blocks = task.system.block_count();
    let target = task.objective.proven_limit(&task.system);
    let subs = run_parallel(task, blocks, |first, budget| {
        let mut s = DualSearch::new(&task.system, target.to_integer(), budget);
        s.place(0, first);
        if !s.point_fails(first) {
            s.dfs(1);
        }
        s.nodes += 1;
        Sub {
            score: s.best.map(Rational::from_integer),
            witness: s.best_labels,
            nodes: s.nodes,
            complete: !s.out_of_budget,
        }
    })?;
    Ok(merge(task, subs))
}

struct DualSearch {
    blocks: Vec<[usize; 3]>,
    /// `top[k]` is the sum of the `k` largest labels.
    top: Vec<i64>,
    sums: Vec<i64>,
    open: Vec<usize>,
    labels: Vec<u32>,
    target: i64,
    budget: Option<u64>,
    best: Option<i64>,
    best_labels: Vec<u32>,
    nodes: u64,
    out_of_budget: bool,
}

impl DualSearch {
    fn new(system: &SteinerTripleSystem, target: i64, budget: Option<u64>) -> Self {
        let count = system.block_count();
        let r = system.replication() as usize;
        let top = (0..=r)
            .map(|k| (0..k).map(|i| (count - 1 - i) as i64).sum())
            .collect();
        DualSearch {
            blocks: system
                .blocks()
                .iter()
                .map(|b| b.points().map(|p| p as usize))
                .collect(),
            top,
            sums: vec![0; system.n() as usize],
            open: vec![r; system.n() as usize],
            labels: vec![u32::MAX; count],
            target,
            budget,
            best: None,
            best_labels: Vec::new(),
            nodes: 0,
            out_of_budget: false,
        }
    }

    fn place(&mut self, label: u32, block: usize) {
        self.labels[block] = label;
        for p in self.blocks[block] {
            self.sums[p] += label as i64;
            self.open[p] -= 1;
        }
    }

    fn remove(&mut self, block: usize) {
        let label = self.labels[block] as i64;
        self.labels[block] = u32::MAX;
        for p in self.blocks[block] {
            self.sums[p] -= label;
            self.open[p] += 1;
        }
    }

    fn point_fails(&self, block: usize) -> bool {
        let Some(best) = self.best else { return false };
        self.blocks[block]
            .iter()
            .any(|&p| self.sums[p] + self.top[self.open[p]] <= best)
    }

    fn done(&self) -> bool {
        self.out_of_budget || self.best == Some(self.target)
    }

    fn dfs(&mut self, label: u32) {
        if label as usize == self.labels.len() {
            let min = *self.sums.iter().min().expect("points");
            if self.best.is_none_or(|b| min > b) {
                self.best = Some(min);
                self.best_labels = self.labels.clone();
            }
            return;
        }
        for block in 0..self.labels.len() {
            if self.labels[block] != u32::MAX {
                continue;
            }
            if self.budget.is_some_and(|b| self.nodes >= b) {
                self.out_of_budget = true;
                return;
            }
            self.nodes += 1;
            self.place(label, block);
            if !self.point_fails(block) {
                self.dfs(label + 1);
            }
            self.remove(block);
            if self.done() {
                return;
            }
        }
    }
}
