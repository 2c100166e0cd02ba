//! Cell subpopulations, per-trial teams, the hall of fame, and the
//! generational evolution step.
//!
//! Every Novelty Map cell owns a subpopulation split into a *best* group
//! (survivors and hall-of-fame material) and a *novel* group (freshly bred
//! individuals). A trial's team records which individual acted for each
//! activated cell; unactivated cells keep a don't-care mark (`None`). The
//! hall of fame archives the highest-reward teams as chromosome snapshots so
//! later population turnover cannot corrupt them.

use std::collections::VecDeque;

use rand::prelude::*;

use crate::genome::{self, Chromosome, DeParams};

/// One network plus its smoothed fitness estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub fitness: f64,
}

/// The subpopulation attached to one Novelty Map cell (same index).
#[derive(Debug, Clone)]
pub struct Cell {
    pub best: Vec<Individual>,
    pub novel: Vec<Individual>,
}

impl Cell {
    /// Total number of individuals (best + novel groups).
    pub fn size(&self) -> usize {
        self.best.len() + self.novel.len()
    }

    /// The individual a reference points at.
    pub fn individual(&self, group: Group, index: usize) -> &Individual {
        match group {
            Group::Best => &self.best[index],
            Group::Novel => &self.novel[index],
        }
    }

    /// Highest fitness over both groups.
    pub fn max_fitness(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for ind in self.best.iter().chain(self.novel.iter()) {
            if ind.fitness > best {
                best = ind.fitness;
            }
        }
        best
    }
}

/// Which group of a cell an individual lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Best,
    Novel,
}

/// Stable reference to one individual: cell index, group, slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemberRef {
    pub cell: usize,
    pub group: Group,
    pub index: usize,
}

/// Per-trial team: the member that acts for each cell, `None` (don't-care)
/// for cells never activated in the trial, plus the trial's reward total.
#[derive(Debug, Clone)]
pub struct Team {
    pub members: Vec<Option<MemberRef>>,
    pub accumulated_reward: f64,
}

impl Team {
    /// A fresh team with every cell unassigned.
    pub fn empty(n_cells: usize) -> Self {
        Team { members: vec![None; n_cells], accumulated_reward: 0.0 }
    }
}

/// Returns the team's member for `cell_index`, drawing one uniformly over
/// the cell's individuals (both groups) and recording it on first activation.
pub fn actor_for<R: Rng>(
    cell_index: usize,
    cell: &Cell,
    team: &mut Team,
    rng: &mut R,
) -> MemberRef {
    if let Some(member) = team.members[cell_index] {
        return member;
    }
    let pick = rng.random_range(0..cell.size());
    let member = if pick < cell.best.len() {
        MemberRef { cell: cell_index, group: Group::Best, index: pick }
    } else {
        MemberRef { cell: cell_index, group: Group::Novel, index: pick - cell.best.len() }
    };
    team.members[cell_index] = Some(member);
    member
}

/// A hall-of-fame member: chromosome snapshot plus the fitness it carried
/// when last observed (used to seed best groups at evolution).
#[derive(Debug, Clone)]
pub struct HofMember {
    pub chromosome: Chromosome,
    pub fitness: f64,
}

/// One archived team: per-cell member snapshots (`None` = don't-care) and
/// the accumulated reward that earned its place.
#[derive(Debug, Clone)]
pub struct HofEntry {
    id: u64,
    pub members: Vec<Option<HofMember>>,
    pub reward: f64,
}

impl HofEntry {
    /// Stable identifier, unique within one hall of fame.
    pub fn id(&self) -> u64 {
        self.id
    }
}

/// Archive of the teams with the highest accumulated rewards, sorted
/// descending by reward.
#[derive(Debug, Clone)]
pub struct HallOfFame {
    capacity: usize,
    next_id: u64,
    entries: Vec<HofEntry>,
}

impl HallOfFame {
    pub fn new(capacity: usize) -> Self {
        HallOfFame { capacity, next_id: 0, entries: Vec::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in descending reward order.
    pub fn entries(&self) -> &[HofEntry] {
        &self.entries
    }

    fn sort(&mut self) {
        // Stable: equal rewards keep insertion order.
        self.entries.sort_by(|a, b| b.reward.total_cmp(&a.reward));
    }

    fn members_match(a: &[Option<HofMember>], b: &[Option<HofMember>]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| match (x, y) {
                (None, None) => true,
                (Some(x), Some(y)) => x.chromosome == y.chromosome,
                _ => false,
            })
    }

    /// Offers a finished trial's team. A team whose members match an
    /// existing entry refreshes that entry (reward and fitness snapshots)
    /// instead of duplicating it; otherwise the team enters if there is free
    /// capacity or its reward beats the current minimum, which is evicted.
    /// Returns whether the hall changed.
    pub fn consider(&mut self, members: Vec<Option<HofMember>>, reward: f64) -> bool {
        if self.capacity == 0 {
            return false;
        }
        if let Some(entry) =
            self.entries.iter_mut().find(|e| Self::members_match(&e.members, &members))
        {
            entry.members = members;
            entry.reward = reward;
            self.sort();
            return true;
        }
        if self.entries.len() < self.capacity {
            self.push(members, reward);
            return true;
        }
        let min_reward = self.entries.last().map_or(f64::NEG_INFINITY, |e| e.reward);
        if reward > min_reward {
            self.push(members, reward);
            self.entries.truncate(self.capacity);
            return true;
        }
        false
    }

    fn push(&mut self, members: Vec<Option<HofMember>>, reward: f64) {
        self.entries.push(HofEntry { id: self.next_id, members, reward });
        self.next_id += 1;
        self.sort();
    }

    /// Overwrites an entry's reward and member snapshots after a replay
    /// trial re-measured it. Returns false if the id is unknown.
    pub fn update_entry(
        &mut self,
        id: u64,
        members: Vec<Option<HofMember>>,
        reward: f64,
    ) -> bool {
        match self.entries.iter_mut().find(|e| e.id == id) {
            Some(entry) => {
                entry.members = members;
                entry.reward = reward;
                self.sort();
                true
            }
            None => false,
        }
    }
}

/// A pending replay of one hall-of-fame entry: the entry to re-measure and
/// the live positions its members occupy after evolution (don't-care cells
/// stay `None` and are filled randomly during the replay trial itself).
#[derive(Debug, Clone)]
pub struct ReplayTicket {
    pub entry_id: u64,
    pub members: Vec<Option<MemberRef>>,
}

fn random_individual<R: Rng>(cell: &Cell, rng: &mut R) -> Individual {
    let pick = rng.random_range(0..cell.size());
    if pick < cell.best.len() {
        cell.best[pick].clone()
    } else {
        cell.novel[pick - cell.best.len()].clone()
    }
}

/// Three indices for the DE difference vector: pairwise distinct when the
/// pool allows it, with replacement otherwise.
fn difference_indices<R: Rng>(len: usize, rng: &mut R) -> (usize, usize, usize) {
    let a = rng.random_range(0..len);
    if len < 3 {
        return (a, rng.random_range(0..len), rng.random_range(0..len));
    }
    let mut b = rng.random_range(0..len);
    while b == a {
        b = rng.random_range(0..len);
    }
    let mut c = rng.random_range(0..len);
    while c == a || c == b {
        c = rng.random_range(0..len);
    }
    (a, b, c)
}

/// Runs one generational step over all cells and returns the replay queue.
///
/// Per cell, the next best group is assembled first: slot k among the first
/// `|best|/2` slots takes the cell's member of hall-of-fame entry k (with
/// its snapshot fitness), falling back to a uniformly random individual of
/// the cell where the entry is missing or holds a don't-care; the remaining
/// slots take the fittest individuals over best ∪ novel (stable rank, lower
/// original index first, duplicates permitted). Survivors keep their
/// fitness. The old groups are then dropped and each novel slot is refilled,
/// with probability 1/2 each, by indexing over all surviving best
/// individuals or by a DE trial vector based on the same-index best
/// individual of the cell, with the difference vector drawn from the same
/// pool; fresh novel individuals start at `novel_init_fitness`.
///
/// The returned tickets replay every hall-of-fame entry once, in hall order;
/// entry k's members live at best slot k of their cells.
pub fn evolve<R: Rng>(
    cells: &mut [Cell],
    hof: &HallOfFame,
    de: &DeParams,
    novel_init_fitness: f64,
    rng: &mut R,
) -> Vec<ReplayTicket> {
    if cells.is_empty() {
        return Vec::new();
    }
    let n_best = cells[0].best.len();
    let n_novel = cells[0].novel.len();
    let hof_slots = n_best / 2;

    // Next best groups, built from the pre-evolution state.
    let mut next_best: Vec<Vec<Individual>> = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let mut group = Vec::with_capacity(n_best);
        for k in 0..hof_slots {
            let archived = hof.entries().get(k).and_then(|e| e.members[c].as_ref());
            group.push(match archived {
                Some(m) => Individual { chromosome: m.chromosome.clone(), fitness: m.fitness },
                None => random_individual(cell, rng),
            });
        }
        let mut ranked: Vec<&Individual> = cell.best.iter().chain(cell.novel.iter()).collect();
        ranked.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        for survivor in ranked.iter().take(n_best - hof_slots) {
            group.push((*survivor).clone());
        }
        next_best.push(group);
    }
    for (cell, group) in cells.iter_mut().zip(next_best) {
        cell.best = group;
        cell.novel.clear();
    }

    // Breed novel groups from the surviving best individuals of all cells.
    let pool: Vec<Chromosome> = cells
        .iter()
        .flat_map(|cell| cell.best.iter().map(|ind| ind.chromosome.clone()))
        .collect();
    let pool_refs: Vec<&[f64]> = pool.iter().map(|c| c.as_slice()).collect();
    for cell in cells.iter_mut() {
        for slot in 0..n_novel {
            let chromosome = if rng.random_bool(0.5) {
                genome::index_copy(&pool_refs, rng)
                    .expect("pool holds at least one best individual per cell")
            } else {
                let base = cell.best[slot % n_best].chromosome.clone();
                let (r1, r2, r3) = difference_indices(pool_refs.len(), rng);
                genome::de_trial(&base, pool_refs[r1], pool_refs[r2], pool_refs[r3], de, rng)
                    .expect("pool chromosomes share the base's length")
            };
            cell.novel.push(Individual { chromosome, fitness: novel_init_fitness });
        }
    }

    hof.entries()
        .iter()
        .take(hof_slots)
        .enumerate()
        .map(|(k, entry)| ReplayTicket {
            entry_id: entry.id(),
            members: entry
                .members
                .iter()
                .enumerate()
                .map(|(c, m)| {
                    m.as_ref().map(|_| MemberRef { cell: c, group: Group::Best, index: k })
                })
                .collect(),
        })
        .collect()
}

/// Convenience alias for the learner's pending-replay queue.
pub type ReplayQueue = VecDeque<ReplayTicket>;
