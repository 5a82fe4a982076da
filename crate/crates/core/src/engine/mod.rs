//! CDCL search: trail, two-watched-literal propagation, VSIDS decisions,
//! first-UIP learning, LBD-based clause database reduction, Luby restarts
//! and root-level simplification. Every polarity choice is delegated to
//! [`PhasePolicy`].

mod vsids;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use self::vsids::Vsids;
use crate::cnf::{Clause, Formula, Lit, Var};
use crate::phase::{
    dynamic_probe, ActiveScheme, PeriodInput, PhaseConfig, PhasePolicy, PhaseRule, ProbeHost,
    ProbeResult,
};
use crate::weights::{StaticWeightTable, DEFAULT_REFRESH_CONFLICTS};

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNASSIGNED: i8 = 0;

/// Index of a clause in the solver's clause arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseRef(u32);

impl ClauseRef {
    #[cfg(test)]
    pub(crate) fn from_index(index: usize) -> ClauseRef {
        ClauseRef(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub phase: PhaseConfig,
    pub weight_refresh_conflicts: u64,
    pub vsids_decay: f64,
    pub clause_decay: f64,
    /// Conflicts per unit of the Luby sequence.
    pub restart_unit: u64,
    pub learned_ceiling: usize,
    pub learned_ceiling_step: usize,
    pub conflict_budget: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Keep a [`DecisionRecord`] for every decision.
    pub record_decisions: bool,
    /// Store the trail segments of each probe in its decision record.
    pub capture_probe_segments: bool,
    /// Keep a copy of every learned clause.
    pub record_learned: bool,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            phase: PhaseConfig::default(),
            weight_refresh_conflicts: DEFAULT_REFRESH_CONFLICTS,
            vsids_decay: 0.95,
            clause_decay: 0.999,
            restart_unit: 100,
            learned_ceiling: 4000,
            learned_ceiling_step: 300,
            conflict_budget: None,
            time_limit: None,
            record_decisions: false,
            capture_probe_segments: false,
            record_learned: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub removed: u64,
    pub probes: u64,
    pub probe_passes: u64,
    pub max_probe_passes: u8,
    pub simplifications: u64,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c decisions    {}", self.decisions)?;
        writeln!(f, "c conflicts    {}", self.conflicts)?;
        writeln!(f, "c propagations {}", self.propagations)?;
        writeln!(f, "c restarts     {}", self.restarts)?;
        writeln!(f, "c learned      {}", self.learned)?;
        writeln!(f, "c removed      {}", self.removed)?;
        writeln!(f, "c probes       {}", self.probes)?;
        write!(f, "c probe-passes {}", self.probe_passes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    ConflictBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Sat => "SAT",
            SolveStatus::Unsat => "UNSAT",
            SolveStatus::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A total assignment indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    Unknown(UnknownReason),
}

impl SolveOutcome {
    pub fn status(&self) -> SolveStatus {
        match self {
            SolveOutcome::Sat(_) => SolveStatus::Sat,
            SolveOutcome::Unsat => SolveStatus::Unsat,
            SolveOutcome::Unknown(_) => SolveStatus::Unknown,
        }
    }

    pub fn model(&self) -> Option<&[bool]> {
        match self {
            SolveOutcome::Sat(model) => Some(model),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Propagated {
    /// Literals placed on the trail by this call.
    Implied(Vec<Lit>),
    Conflict(ClauseRef),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decision {
    AllAssigned,
    Assigned(Lit),
    /// The phase probe hit a conflict; the failing assignment is on the trail.
    Conflict(ClauseRef),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("conflict at decision level 0: the formula is unsatisfiable")]
pub struct ConflictAtRootLevel;

#[derive(Clone, Debug, PartialEq)]
pub struct Learned {
    /// Asserting literal first, then a literal of the backjump level.
    pub clause: Clause,
    pub backjump_level: u32,
    pub lbd: u32,
}

/// One decision as seen by the phase subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionRecord {
    pub period: u64,
    pub level: u32,
    pub var: Var,
    pub scheme: ActiveScheme,
    /// BCP passes the decision cost; 1 for static polarities.
    pub bcp_passes: u8,
    pub probe: Option<ProbeResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimplifyRecord {
    pub conflicts: u64,
    pub removed: usize,
    pub weights_refreshed: bool,
}

/// Backjump level and LBD of a learned clause, given the decision level of
/// each literal with the asserting literal first.
pub fn backjump_and_lbd(levels: &[u32]) -> (u32, u32) {
    let backjump = levels.iter().skip(1).copied().max().unwrap_or(0);
    let mut distinct = levels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    (backjump, distinct.len() as u32)
}

/// The `i`-th element (1-based) of the Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
pub fn luby(mut i: u64) -> u64 {
    assert!(i >= 1);
    loop {
        let mut k = 1;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

#[derive(Clone, Debug)]
struct StoredClause {
    lits: Vec<Lit>,
    learned: bool,
    lbd: u32,
    activity: f64,
    deleted: bool,
}

pub struct Solver {
    formula: Formula,
    config: SolverConfig,
    clauses: Vec<StoredClause>,
    free: Vec<ClauseRef>,
    learned: Vec<ClauseRef>,
    /// Clauses watching each literal, indexed by literal code.
    watches: Vec<Vec<ClauseRef>>,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    vsids: Vsids,
    clause_increment: f64,
    phase: PhasePolicy,
    weights: StaticWeightTable,
    stats: Stats,
    conflicts_since_restart: u64,
    learned_ceiling: usize,
    fixed_at_last_simplify: Option<usize>,
    inconsistent: bool,
    decision_log: Vec<DecisionRecord>,
    simplify_log: Vec<SimplifyRecord>,
    learned_log: Vec<Vec<Lit>>,
}

impl Solver {
    pub fn new(formula: &Formula, config: SolverConfig) -> Solver {
        let n = formula.num_vars();
        let phase = PhasePolicy::new(
            config.phase.clone(),
            PeriodInput {
                period: 0,
                conflicts: 0,
                fixed_vars: 0,
                num_vars: n as u64,
                literal_occurrences: formula.num_literal_occurrences() as u64,
            },
        );
        let mut solver = Solver {
            formula: formula.clone(),
            clauses: Vec::with_capacity(formula.num_clauses()),
            free: Vec::new(),
            learned: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            values: vec![UNASSIGNED; 2 * n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            vsids: Vsids::new(n, config.vsids_decay),
            clause_increment: 1.0,
            phase,
            weights: StaticWeightTable::new(n, config.weight_refresh_conflicts),
            stats: Stats::default(),
            conflicts_since_restart: 0,
            learned_ceiling: config.learned_ceiling,
            fixed_at_last_simplify: None,
            inconsistent: false,
            decision_log: Vec::new(),
            simplify_log: Vec::new(),
            learned_log: Vec::new(),
            config,
        };
        for clause in formula.clauses() {
            solver.add_original(&clause.literals);
        }
        solver
    }

    fn add_original(&mut self, lits: &[Lit]) {
        if lits.is_empty() {
            self.inconsistent = true;
            return;
        }
        let cref = self.store(lits.to_vec(), false, 0);
        if lits.len() == 1 {
            match self.value(lits[0]) {
                UNASSIGNED => self.enqueue(lits[0], None),
                FALSE => self.inconsistent = true,
                _ => {}
            }
        } else {
            self.attach(cref);
        }
    }

    fn store(&mut self, lits: Vec<Lit>, learned: bool, lbd: u32) -> ClauseRef {
        let clause = StoredClause {
            lits,
            learned,
            lbd,
            activity: 0.0,
            deleted: false,
        };
        match self.free.pop() {
            Some(cref) => {
                self.clauses[cref.index()] = clause;
                cref
            }
            None => {
                self.clauses.push(clause);
                ClauseRef(self.clauses.len() as u32 - 1)
            }
        }
    }

    fn attach(&mut self, cref: ClauseRef) {
        let lits = &self.clauses[cref.index()].lits;
        debug_assert!(lits.len() >= 2);
        let (a, b) = (lits[0], lits[1]);
        self.watches[a.code()].push(cref);
        self.watches[b.code()].push(cref);
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn phase(&self) -> &PhasePolicy {
        &self.phase
    }

    pub fn phase_mut(&mut self) -> &mut PhasePolicy {
        &mut self.phase
    }

    pub fn weights(&self) -> &StaticWeightTable {
        &self.weights
    }

    pub fn vsids_mut(&mut self) -> &mut Vsids {
        &mut self.vsids
    }

    pub fn decision_log(&self) -> &[DecisionRecord] {
        &self.decision_log
    }

    pub fn simplify_log(&self) -> &[SimplifyRecord] {
        &self.simplify_log
    }

    pub fn learned_log(&self) -> &[Vec<Lit>] {
        &self.learned_log
    }

    pub fn learned_count(&self) -> usize {
        self.learned.len()
    }

    pub fn restart_count(&self) -> u64 {
        self.stats.restarts
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    /// Variables assigned at decision level 0.
    pub fn fixed_count(&self) -> usize {
        self.trail_lim.first().copied().unwrap_or(self.trail.len())
    }

    pub fn clause_literals(&self, cref: ClauseRef) -> &[Lit] {
        &self.clauses[cref.index()].lits
    }

    /// Literals of the live original clauses, at their current size.
    pub fn active_original_clauses(&self) -> impl Iterator<Item = &[Lit]> + '_ {
        self.clauses
            .iter()
            .filter(|c| !c.deleted && !c.learned)
            .map(|c| c.lits.as_slice())
    }

    #[inline]
    fn value(&self, lit: Lit) -> i8 {
        self.values[lit.code()]
    }

    /// `Some(true)` if `lit` is true, `Some(false)` if false.
    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        match self.value(lit) {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }

    pub fn var_level(&self, var: Var) -> Option<u32> {
        self.lit_value(var.positive()).map(|_| self.level[var.index()])
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        debug_assert_eq!(self.value(lit), UNASSIGNED);
        self.values[lit.code()] = TRUE;
        self.values[(!lit).code()] = FALSE;
        self.level[lit.var().index()] = self.decision_level();
        self.reason[lit.var().index()] = reason;
        self.trail.push(lit);
    }

    fn unassign(&mut self, lit: Lit) {
        self.values[lit.code()] = UNASSIGNED;
        self.values[(!lit).code()] = UNASSIGNED;
        self.reason[lit.var().index()] = None;
        self.vsids.insert(lit.var());
    }

    fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    /// Unit propagation to fixpoint. Returns the falsified clause on
    /// conflict, leaving the trail as is.
    fn propagate(&mut self) -> Option<ClauseRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut watchers = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut conflict = None;
            let (mut i, mut j) = (0, 0);
            while i < watchers.len() {
                let cref = watchers[i];
                i += 1;
                let lits = &mut self.clauses[cref.index()].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if self.values[first.code()] == TRUE {
                    watchers[j] = cref;
                    j += 1;
                    continue;
                }
                let replacement = (2..lits.len()).find(|&k| self.values[lits[k].code()] != FALSE);
                if let Some(k) = replacement {
                    lits.swap(1, k);
                    self.watches[lits[1].code()].push(cref);
                    continue;
                }
                watchers[j] = cref;
                j += 1;
                if self.values[first.code()] == FALSE {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < watchers.len() {
                        watchers[j] = watchers[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            watchers.truncate(j);
            self.watches[false_lit.code()] = watchers;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// Propagates all pending trail literals.
    pub fn bcp(&mut self) -> Propagated {
        let before = self.trail.len();
        match self.propagate() {
            Some(cref) => Propagated::Conflict(cref),
            None => Propagated::Implied(self.trail[before..].to_vec()),
        }
    }

    /// Unwinds the trail to `level`. With `save_phases`, the removed
    /// assignments are reported to the phase policy.
    pub fn cancel_until(&mut self, level: u32, save_phases: bool) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        if save_phases {
            let deepest = self.decision_level();
            let levels = &self.level;
            self.phase.on_backjump(
                self.trail[start..]
                    .iter()
                    .map(|&l| (l.var(), levels[l.var().index()], l.is_positive())),
                deepest,
            );
        }
        for k in (start..self.trail.len()).rev() {
            let lit = self.trail[k];
            self.unassign(lit);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    fn ensure_weights(&mut self) {
        if self.weights.update_count() == 0 {
            let conflicts = self.stats.conflicts;
            let clauses = &self.clauses;
            self.weights.recompute(
                clauses
                    .iter()
                    .filter(|c| !c.deleted && !c.learned)
                    .map(|c| c.lits.as_slice()),
                conflicts,
            );
        }
    }

    /// Opens a new decision level with `lit` as its decision, bypassing the
    /// variable and phase heuristics. Propagation is left to [`bcp`](Self::bcp).
    pub fn push_decision(&mut self, lit: Lit) {
        assert_eq!(self.value(lit), UNASSIGNED, "decision on an assigned variable");
        self.new_decision_level();
        self.enqueue(lit, None);
    }

    /// Picks the most active unassigned variable, opens a decision level
    /// for it and assigns it with the polarity the phase policy selects.
    pub fn decide(&mut self) -> Decision {
        self.ensure_weights();
        let var = loop {
            match self.vsids.pop() {
                None => return Decision::AllAssigned,
                Some(v) if self.value(v.positive()) == UNASSIGNED => break v,
                Some(_) => {}
            }
        };
        self.stats.decisions += 1;
        self.new_decision_level();
        let level = self.decision_level();
        let scheme = self.phase.active();
        let (decision, passes, probe) = match self.phase.rule(var, level) {
            PhaseRule::Polarity(p) => {
                let lit = var.lit(p);
                self.enqueue(lit, None);
                (Decision::Assigned(lit), 1, None)
            }
            PhaseRule::Probe => {
                let capture = self.config.capture_probe_segments;
                let result = dynamic_probe(self, var, capture);
                self.stats.probes += 1;
                self.stats.probe_passes += result.bcp_passes as u64;
                let decision = match result.conflict {
                    Some((_, cref)) => Decision::Conflict(cref),
                    None => Decision::Assigned(result.chosen),
                };
                (decision, result.bcp_passes, Some(result))
            }
        };
        self.stats.max_probe_passes = self.stats.max_probe_passes.max(passes);
        if self.config.record_decisions {
            self.decision_log.push(DecisionRecord {
                period: self.phase.period(),
                level,
                var,
                scheme,
                bcp_passes: passes,
                probe,
            });
        }
        decision
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let clause = &mut self.clauses[cref.index()];
        if !clause.learned {
            return;
        }
        clause.activity += self.clause_increment;
        if clause.activity > 1e20 {
            for &c in &self.learned {
                self.clauses[c.index()].activity *= 1e-20;
            }
            self.clause_increment *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Bumps and decays variable activities;
    /// does not touch the trail.
    pub fn analyze_conflict(&mut self, conflict: ClauseRef) -> Result<Learned, ConflictAtRootLevel> {
        self.stats.conflicts += 1;
        self.conflicts_since_restart += 1;
        let current = self.decision_level();
        if current == 0 {
            return Err(ConflictAtRootLevel);
        }

        let mut learnt: Vec<Lit> = vec![Lit::from_code(0)];
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut cref = conflict;
        let mut resolved: Option<Lit> = None;
        loop {
            self.bump_clause(cref);
            let skip = usize::from(resolved.is_some());
            let len = self.clauses[cref.index()].lits.len();
            for k in skip..len {
                let q = self.clauses[cref.index()].lits[k];
                let v = q.var().index();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.vsids.bump(q.var());
                if self.level[v] >= current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            let p = loop {
                index -= 1;
                let lit = self.trail[index];
                if self.seen[lit.var().index()] {
                    break lit;
                }
            };
            self.seen[p.var().index()] = false;
            pending -= 1;
            resolved = Some(p);
            if pending == 0 {
                break;
            }
            cref = self.reason[p.var().index()].expect("implied literal without reason");
        }
        learnt[0] = !resolved.unwrap();
        for lit in &learnt[1..] {
            self.seen[lit.var().index()] = false;
        }

        // Move a literal of the backjump level to position 1 for watching.
        if learnt.len() > 1 {
            let max_pos = (1..learnt.len())
                .max_by_key(|&k| (self.level[learnt[k].var().index()], std::cmp::Reverse(k)))
                .unwrap();
            learnt.swap(1, max_pos);
        }
        let levels: Vec<u32> = learnt.iter().map(|l| self.level[l.var().index()]).collect();
        let (backjump_level, lbd) = backjump_and_lbd(&levels);

        self.vsids.decay();
        self.clause_increment /= self.config.clause_decay;

        Ok(Learned {
            clause: Clause {
                literals: learnt,
                learned: true,
                lbd,
            },
            backjump_level,
            lbd,
        })
    }

    /// Analyzes `conflict`, backjumps and asserts the learned clause.
    pub fn handle_conflict(&mut self, conflict: ClauseRef) -> Result<(), ConflictAtRootLevel> {
        let learned = self.analyze_conflict(conflict)?;
        self.cancel_until(learned.backjump_level, true);
        let lits = learned.clause.literals;
        if self.config.record_learned {
            self.learned_log.push(lits.clone());
        }
        self.stats.learned += 1;
        let asserting = lits[0];
        if lits.len() == 1 {
            self.enqueue(asserting, None);
        } else {
            let cref = self.store(lits, true, learned.lbd);
            self.attach(cref);
            self.learned.push(cref);
            self.bump_clause(cref);
            self.enqueue(asserting, Some(cref));
        }
        Ok(())
    }

    fn is_locked(&self, cref: ClauseRef) -> bool {
        let first = self.clauses[cref.index()].lits[0];
        self.value(first) == TRUE && self.reason[first.var().index()] == Some(cref)
    }

    /// Removes the worse half of the learned clauses, ordered by LBD then
    /// activity. Glue clauses (LBD ≤ 2) and reason clauses are kept.
    pub fn reduce_db(&mut self) -> usize {
        let mut ranked = self.learned.clone();
        ranked.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a.index()], &self.clauses[b.index()]);
            ca.lbd
                .cmp(&cb.lbd)
                .then(cb.activity.total_cmp(&ca.activity))
                .then(a.cmp(&b))
        });
        let worst = ranked.len() / 2;
        let mut removed = 0;
        for &cref in &ranked[ranked.len() - worst..] {
            if self.clauses[cref.index()].lbd > 2 && !self.is_locked(cref) {
                self.clauses[cref.index()].deleted = true;
                removed += 1;
            }
        }
        self.learned_ceiling += self.config.learned_ceiling_step;
        self.purge_deleted();
        self.stats.removed += removed as u64;
        removed
    }

    fn purge_deleted(&mut self) {
        let clauses = &self.clauses;
        for list in &mut self.watches {
            list.retain(|c| !clauses[c.index()].deleted);
        }
        self.learned.retain(|c| !clauses[c.index()].deleted);
        for (index, clause) in self.clauses.iter_mut().enumerate() {
            if clause.deleted && !clause.lits.is_empty() {
                clause.lits = Vec::new();
                self.free.push(ClauseRef(index as u32));
            }
        }
    }

    fn period_input(&self) -> PeriodInput {
        PeriodInput {
            period: self.stats.restarts,
            conflicts: self.stats.conflicts,
            fixed_vars: self.fixed_count() as u64,
            num_vars: self.formula.num_vars() as u64,
            literal_occurrences: self.formula.num_literal_occurrences() as u64,
        }
    }

    /// Ends the current search period: unwinds to level 0 and lets the
    /// phase policy pick the next period's scheme.
    pub fn restart(&mut self) {
        self.cancel_until(0, true);
        self.stats.restarts += 1;
        self.conflicts_since_restart = 0;
        let input = self.period_input();
        self.phase.on_period_start(input);
    }

    /// Detaches clauses satisfied at level 0, strips false literals and
    /// offers the weight table a refresh. Does nothing if no variable was
    /// fixed since the previous call.
    pub fn simplify_root(&mut self) -> usize {
        assert_eq!(self.decision_level(), 0, "simplification runs at the root");
        debug_assert_eq!(self.qhead, self.trail.len(), "propagation must be complete");
        let fixed = self.trail.len();
        let first_weights = self.weights.update_count() == 0;
        if self.fixed_at_last_simplify == Some(fixed) && !first_weights {
            return 0;
        }
        let mut removed = 0;
        if self.fixed_at_last_simplify != Some(fixed) {
            self.fixed_at_last_simplify = Some(fixed);
            for &lit in &self.trail {
                self.reason[lit.var().index()] = None;
            }
            let values = &self.values;
            for clause in self.clauses.iter_mut().filter(|c| !c.deleted) {
                if clause.lits.iter().any(|l| values[l.code()] == TRUE) {
                    clause.deleted = true;
                    removed += 1;
                } else if clause.lits.iter().any(|l| values[l.code()] == FALSE) {
                    // Watched literals are unassigned here, so positions 0
                    // and 1 survive the filter.
                    clause.lits.retain(|l| values[l.code()] != FALSE);
                }
            }
            self.purge_deleted();
        }
        let conflicts = self.stats.conflicts;
        let clauses = &self.clauses;
        let refreshed = self.weights.maybe_refresh(
            clauses
                .iter()
                .filter(|c| !c.deleted && !c.learned)
                .map(|c| c.lits.as_slice()),
            conflicts,
        );
        self.stats.simplifications += 1;
        self.simplify_log.push(SimplifyRecord {
            conflicts,
            removed,
            weights_refreshed: refreshed,
        });
        removed
    }

    fn model(&self) -> Vec<bool> {
        (0..self.formula.num_vars())
            .map(|v| self.value(Var::from_index(v).positive()) == TRUE)
            .collect()
    }

    /// Runs CDCL search to completion or until the configured budget runs out.
    pub fn solve(&mut self) -> SolveOutcome {
        let started = Instant::now();
        let deadline = self.config.time_limit.map(|d| started + d);
        let out_of_time = || deadline.is_some_and(|d| Instant::now() >= d);

        if self.inconsistent {
            return SolveOutcome::Unsat;
        }
        self.cancel_until(0, false);
        if self.propagate().is_some() {
            self.inconsistent = true;
            return SolveOutcome::Unsat;
        }
        self.simplify_root();
        self.phase.reset_fixed_baseline(self.fixed_count() as u64);

        let mut pending_conflict: Option<ClauseRef> = None;
        loop {
            let conflict = pending_conflict.take().or_else(|| self.propagate());
            if let Some(cref) = conflict {
                if self.handle_conflict(cref).is_err() {
                    self.inconsistent = true;
                    return SolveOutcome::Unsat;
                }
                if self
                    .config
                    .conflict_budget
                    .is_some_and(|b| self.stats.conflicts >= b)
                {
                    return SolveOutcome::Unknown(UnknownReason::ConflictBudget);
                }
                if self.stats.conflicts.is_multiple_of(1024) && out_of_time() {
                    return SolveOutcome::Unknown(UnknownReason::Timeout);
                }
                continue;
            }

            let restart_limit = luby(self.stats.restarts + 1) * self.config.restart_unit;
            if self.conflicts_since_restart >= restart_limit {
                self.restart();
                if out_of_time() {
                    return SolveOutcome::Unknown(UnknownReason::Timeout);
                }
                self.simplify_root();
                continue;
            }

            if self.learned.len() >= self.learned_ceiling {
                self.reduce_db();
            }

            match self.decide() {
                Decision::AllAssigned => {
                    let model = self.model();
                    debug_assert!(self.formula.is_satisfied_by(&model));
                    return SolveOutcome::Sat(model);
                }
                Decision::Assigned(_) => {}
                Decision::Conflict(cref) => pending_conflict = Some(cref),
            }
        }
    }

    /// Checks the watch structure and trail consistency; meant for tests.
    pub fn audit(&self) -> Result<(), String> {
        let mut watch_count = vec![0u32; self.clauses.len()];
        for (code, list) in self.watches.iter().enumerate() {
            let lit = Lit::from_code(code);
            for &cref in list {
                let clause = &self.clauses[cref.index()];
                if clause.deleted {
                    return Err(format!("deleted clause {cref:?} still watched"));
                }
                if clause.lits[0] != lit && clause.lits[1] != lit {
                    return Err(format!("clause {cref:?} watched by unwatched literal {lit}"));
                }
                watch_count[cref.index()] += 1;
            }
        }
        let at_fixpoint = self.qhead == self.trail.len();
        for (index, clause) in self.clauses.iter().enumerate() {
            if clause.deleted || clause.lits.len() < 2 {
                continue;
            }
            if watch_count[index] != 2 || clause.lits[0] == clause.lits[1] {
                return Err(format!("clause {index} has {} watches", watch_count[index]));
            }
            if at_fixpoint {
                let (a, b) = (self.value(clause.lits[0]), self.value(clause.lits[1]));
                if !(a == TRUE || b == TRUE || (a == UNASSIGNED && b == UNASSIGNED)) {
                    return Err(format!("watch invariant broken in clause {index}"));
                }
            }
        }
        let mut on_trail = vec![false; self.formula.num_vars()];
        for (pos, &lit) in self.trail.iter().enumerate() {
            let v = lit.var().index();
            if on_trail[v] {
                return Err(format!("{} appears twice on the trail", lit.var()));
            }
            on_trail[v] = true;
            let level = self.level[v];
            let expected = self.trail_lim.iter().filter(|&&start| start <= pos).count() as u32;
            if level != expected {
                return Err(format!("{lit} at position {pos} has level {level}, expected {expected}"));
            }
            if let Some(cref) = self.reason[v] {
                let lits = &self.clauses[cref.index()].lits;
                if lits[0] != lit {
                    return Err(format!("reason of {lit} does not start with it"));
                }
                for &other in &lits[1..] {
                    let earlier = self.trail[..pos].contains(&!other);
                    if !earlier {
                        return Err(format!("reason of {lit}: {other} not false earlier"));
                    }
                }
            }
        }
        Ok(())
    }
}

impl ProbeHost for Solver {
    fn weights(&self) -> &StaticWeightTable {
        &self.weights
    }

    fn assign_decision(&mut self, lit: Lit) {
        self.enqueue(lit, None);
    }

    fn propagate(&mut self) -> Option<ClauseRef> {
        Solver::propagate(self)
    }

    fn trail(&self) -> &[Lit] {
        &self.trail
    }

    fn level_start(&self) -> usize {
        *self.trail_lim.last().expect("probe outside a decision level")
    }

    fn undo_level(&mut self) {
        let start = self.level_start();
        for k in (start..self.trail.len()).rev() {
            let lit = self.trail[k];
            self.unassign(lit);
        }
        self.trail.truncate(start);
        self.qhead = start;
    }
}

/// Solves `formula` with a fresh solver.
pub fn solve(formula: &Formula, config: SolverConfig) -> SolveOutcome {
    Solver::new(formula, config).solve()
}

#[cfg(test)]
mod tests;
