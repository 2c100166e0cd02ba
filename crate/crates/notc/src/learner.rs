//! The NOTC control loop: winner-cell lookup, team formation, Widrow-Hoff
//! credit assignment, hall-of-fame bookkeeping and replays, and the
//! evolution schedule.
//!
//! One `Learner` owns everything a single run needs: the Novelty Map, the
//! per-cell subpopulations, the hall of fame, the current trial's team, and
//! a seeded RNG. The driving loop is
//!
//! ```text
//! loop over steps:  action = learner.act(observation, prev_reward)
//! at termination:   learner.end_trial(final_reward, accumulated_reward)
//! after the trial:  learner.maybe_evolve()
//! ```
//!
//! Mid-trial, the previous actor's fitness F is smoothed toward the
//! bootstrapped estimate F̂ = R + γ·max fitness of the winner cell; at
//! termination F̂ is the final reward alone. Every `S_size·ι` learning
//! trials the population evolves, after which each hall-of-fame team is
//! replayed once (phase `REPLAY`) to re-measure its reward.

use std::fmt;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genome::{self, DeParams, MlpSpec};
use crate::novelty_map::NoveltyMap;
use crate::population::{
    self, actor_for, Cell, HallOfFame, HofMember, Individual, MemberRef, ReplayQueue,
    ReplayTicket, Team,
};

/// All tunables of one learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerParams {
    /// Maximum number of Novelty Map cells.
    pub map_size: usize,
    /// Individuals per cell in the best group.
    pub n_best: usize,
    /// Individuals per cell in the novel group.
    pub n_novel: usize,
    /// Network shape; `n_inputs` doubles as the observation dimension.
    pub mlp: MlpSpec,
    pub de: DeParams,
    /// Widrow-Hoff smoothing coefficient η.
    pub eta: f64,
    /// Discount factor γ for the bootstrapped fitness estimate.
    pub gamma: f64,
    /// Trials per individual between evolutions (ι); the evolution trigger
    /// is `(n_best + n_novel)·ι` learning trials.
    pub iota: u64,
    pub best_init_fitness: f64,
    pub novel_init_fitness: f64,
    /// Actions are clamped to this closed interval.
    pub action_low: f64,
    pub action_high: f64,
}

impl Default for LearnerParams {
    /// Reference configuration for a two-dimensional observation and a
    /// scalar action: 10 cells of 10 + 10 individuals with 10 hidden nodes,
    /// CR 0.2, F ∈ [0, 2], η 0.1, γ 0.99, ι 10.
    fn default() -> Self {
        LearnerParams {
            map_size: 10,
            n_best: 10,
            n_novel: 10,
            mlp: MlpSpec { n_inputs: 2, n_hidden: 10, n_outputs: 1 },
            de: DeParams::default(),
            eta: 0.1,
            gamma: 0.99,
            iota: 10,
            best_init_fitness: 0.0,
            novel_init_fitness: -1.0,
            action_low: -1.0,
            action_high: 1.0,
        }
    }
}

impl LearnerParams {
    /// Number of learning trials between evolutions.
    pub fn evolution_trigger(&self) -> u64 {
        (self.n_best + self.n_novel) as u64 * self.iota
    }

    /// Hall-of-fame capacity: half the best-group size.
    pub fn hof_capacity(&self) -> usize {
        self.n_best / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.map_size == 0 {
            return Err(Error::InvalidConfig("cells must be positive".into()));
        }
        if self.n_best == 0 {
            return Err(Error::InvalidConfig("best must be positive".into()));
        }
        if self.n_novel == 0 {
            return Err(Error::InvalidConfig("novel must be positive".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if self.iota == 0 {
            return Err(Error::InvalidConfig("iota must be positive".into()));
        }
        if self.action_low >= self.action_high {
            return Err(Error::InvalidConfig(format!(
                "action range [{}, {}] is empty",
                self.action_low, self.action_high
            )));
        }
        MlpSpec::new(self.mlp.n_inputs, self.mlp.n_hidden, self.mlp.n_outputs)?;
        DeParams::new(
            self.de.crossover_rate,
            self.de.differential_weight_min,
            self.de.differential_weight_max,
        )?;
        Ok(())
    }
}

/// Whether the coming trial is a learning trial or a hall-of-fame replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Normal,
    Replay,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Normal => write!(f, "NORMAL"),
            Phase::Replay => write!(f, "REPLAY"),
        }
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NORMAL" => Ok(Phase::Normal),
            "REPLAY" => Ok(Phase::Replay),
            other => Err(Error::Malformed(format!("unknown phase `{other}`"))),
        }
    }
}

/// One NOTC learning agent.
#[derive(Debug, Clone)]
pub struct Learner {
    params: LearnerParams,
    map: NoveltyMap,
    cells: Vec<Cell>,
    hof: HallOfFame,
    team: Team,
    /// The (cell, individual) pair that produced the previous action and is
    /// awaiting its fitness update.
    prev_action_set: Option<MemberRef>,
    replay_queue: ReplayQueue,
    active_replay: Option<ReplayTicket>,
    trial_counter: u64,
    trials_since_evolution: u64,
    evolution_count: u64,
    rng: ChaCha8Rng,
    hidden_scratch: Vec<f64>,
    output_scratch: Vec<f64>,
}

impl Learner {
    /// Builds a learner with freshly initialized subpopulations.
    ///
    /// Chromosomes are drawn cell by cell, best group before novel group;
    /// best individuals start at `best_init_fitness`, novel individuals at
    /// `novel_init_fitness`. The map starts empty and fills from the first
    /// observations.
    pub fn new(params: LearnerParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = (0..params.map_size)
            .map(|_| {
                let mut draw = |count: usize, fitness: f64| -> Vec<Individual> {
                    (0..count)
                        .map(|_| Individual {
                            chromosome: genome::random_chromosome(&params.mlp, &mut rng),
                            fitness,
                        })
                        .collect()
                };
                let best = draw(params.n_best, params.best_init_fitness);
                let novel = draw(params.n_novel, params.novel_init_fitness);
                Cell { best, novel }
            })
            .collect();
        Ok(Learner {
            map: NoveltyMap::new(params.mlp.n_inputs, params.map_size)?,
            cells,
            hof: HallOfFame::new(params.hof_capacity()),
            team: Team::empty(params.map_size),
            prev_action_set: None,
            replay_queue: ReplayQueue::new(),
            active_replay: None,
            trial_counter: 0,
            trials_since_evolution: 0,
            evolution_count: 0,
            rng,
            hidden_scratch: vec![0.0; params.mlp.n_hidden],
            output_scratch: vec![0.0; params.mlp.n_outputs],
            params,
        })
    }

    /// Phase of the trial currently in progress (or about to start).
    pub fn phase(&self) -> Phase {
        if self.active_replay.is_some() {
            Phase::Replay
        } else {
            Phase::Normal
        }
    }

    pub fn params(&self) -> &LearnerParams {
        &self.params
    }

    pub fn map(&self) -> &NoveltyMap {
        &self.map
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn hall_of_fame(&self) -> &HallOfFame {
        &self.hof
    }

    /// Number of finished trials (learning and replay alike).
    pub fn trial_counter(&self) -> u64 {
        self.trial_counter
    }

    /// Number of evolutions run so far.
    pub fn evolution_count(&self) -> u64 {
        self.evolution_count
    }

    /// Total Novelty Map cell modifications so far.
    pub fn map_update_count(&self) -> u64 {
        self.map.update_count()
    }

    fn individual_mut(&mut self, member: MemberRef) -> &mut Individual {
        let cell = &mut self.cells[member.cell];
        match member.group {
            population::Group::Best => &mut cell.best[member.index],
            population::Group::Novel => &mut cell.novel[member.index],
        }
    }

    /// Chooses the action for one step of the current trial.
    ///
    /// `observation` is the normalized observation vector (it feeds the
    /// Novelty Map as-is) and `prev_reward` is the reward the environment
    /// returned for the previous action, `None` on a trial's first step.
    ///
    /// The winner cell is looked up (possibly reshaping the map), the team
    /// supplies that cell's actor — drawing one uniformly on the cell's
    /// first activation, whether the trial is a learning trial or a replay
    /// filling a don't-care slot — and then the previous actor's fitness is
    /// smoothed toward `prev_reward + γ·max fitness of the winner cell`.
    /// Returns the actor's network output clamped to the action range.
    pub fn act(&mut self, observation: &[f64], prev_reward: Option<f64>) -> Result<f64> {
        let winner = self.map.observe(observation)?;
        let max_fitness = self.cells[winner].max_fitness();
        let member = actor_for(winner, &self.cells[winner], &mut self.team, &mut self.rng);

        if let (Some(prev), Some(reward)) = (self.prev_action_set, prev_reward) {
            let estimate = reward + self.params.gamma * max_fitness;
            let eta = self.params.eta;
            let fitness = &mut self.individual_mut(prev).fitness;
            *fitness += eta * (estimate - *fitness);
        }

        let actor = self.cells[member.cell].individual(member.group, member.index);
        genome::forward_into(
            &self.params.mlp,
            &actor.chromosome,
            observation,
            &mut self.hidden_scratch,
            &mut self.output_scratch,
        )?;
        self.prev_action_set = Some(member);
        Ok(self.output_scratch[0].clamp(self.params.action_low, self.params.action_high))
    }

    fn snapshot_members(&self, members: &[Option<MemberRef>]) -> Vec<Option<HofMember>> {
        members
            .iter()
            .map(|slot| {
                slot.map(|m| {
                    let ind = self.cells[m.cell].individual(m.group, m.index);
                    HofMember { chromosome: ind.chromosome.clone(), fitness: ind.fitness }
                })
            })
            .collect()
    }

    /// Finishes the current trial.
    ///
    /// The last actor receives a terminal fitness update with F̂ =
    /// `final_reward` (no successor term). On a learning trial the team is
    /// offered to the hall of fame with `accumulated_reward`; on a replay
    /// trial the replayed entry's reward and member snapshots are
    /// overwritten by the fresh measurement instead. A fresh team is
    /// prepared, preloaded with the next replay ticket if one is queued.
    pub fn end_trial(&mut self, final_reward: f64, accumulated_reward: f64) {
        if let Some(prev) = self.prev_action_set.take() {
            let eta = self.params.eta;
            let fitness = &mut self.individual_mut(prev).fitness;
            *fitness += eta * (final_reward - *fitness);
        }
        self.team.accumulated_reward = accumulated_reward;

        match self.active_replay.take() {
            None => {
                let snapshot = self.snapshot_members(&self.team.members);
                self.hof.consider(snapshot, accumulated_reward);
                self.trials_since_evolution += 1;
            }
            Some(ticket) => {
                let snapshot = self.snapshot_members(&ticket.members);
                self.hof.update_entry(ticket.entry_id, snapshot, accumulated_reward);
            }
        }
        self.trial_counter += 1;
        self.prepare_next_team();
    }

    fn prepare_next_team(&mut self) {
        self.team = Team::empty(self.params.map_size);
        if let Some(ticket) = self.replay_queue.pop_front() {
            self.team.members = ticket.members.clone();
            self.active_replay = Some(ticket);
        }
    }

    /// Runs the generational step if enough learning trials have finished.
    ///
    /// Call between trials, after [`end_trial`](Self::end_trial). When the
    /// count of learning trials since the last evolution reaches
    /// `(n_best + n_novel)·ι`, the population evolves and every hall-of-fame
    /// entry is queued for one replay trial; replay trials themselves never
    /// advance the trigger. Returns whether evolution ran.
    pub fn maybe_evolve(&mut self) -> bool {
        if self.trials_since_evolution < self.params.evolution_trigger() {
            return false;
        }
        debug_assert!(
            self.active_replay.is_none() && self.replay_queue.is_empty(),
            "the trigger can only fire after all replays finished"
        );
        let tickets = population::evolve(
            &mut self.cells,
            &self.hof,
            &self.params.de,
            self.params.novel_init_fitness,
            &mut self.rng,
        );
        self.replay_queue = tickets.into();
        self.trials_since_evolution = 0;
        self.evolution_count += 1;
        self.prepare_next_team();
        true
    }
}
