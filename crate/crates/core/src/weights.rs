//! Static literal weights.
//!
//! Every clause `c` containing a literal contributes `5^(2 - |c|)` to that
//! literal's weight: a unit clause adds 5, a binary clause 1, a ternary
//! clause 0.2. Only original clauses count, using their current (possibly
//! root-shrunken) sizes. The table is rebuilt on root simplification, but
//! only if enough conflicts have happened since the previous rebuild.

use crate::cnf::{Formula, Lit};

pub const WEIGHT_BASE: f64 = 5.0;

/// Default number of conflicts that must separate two weight rebuilds.
pub const DEFAULT_REFRESH_CONFLICTS: u64 = 200_000;

/// Contribution of a clause of `size` literals to each of its literals.
pub fn clause_weight(size: usize) -> f64 {
    WEIGHT_BASE.powi(2 - size as i32)
}

#[derive(Clone, Debug)]
pub struct StaticWeightTable {
    weights: Vec<f64>,
    conflicts_at_last_update: Option<u64>,
    update_count: u64,
    refresh_conflicts: u64,
}

impl StaticWeightTable {
    /// An empty table for `num_vars` variables; nothing is computed until the
    /// first [`maybe_refresh`](Self::maybe_refresh) or
    /// [`recompute`](Self::recompute).
    pub fn new(num_vars: usize, refresh_conflicts: u64) -> StaticWeightTable {
        StaticWeightTable {
            weights: vec![0.0; 2 * num_vars],
            conflicts_at_last_update: None,
            update_count: 0,
            refresh_conflicts,
        }
    }

    /// Computes the table over all clauses of a freshly parsed formula.
    pub fn compute_all(formula: &Formula) -> StaticWeightTable {
        let mut table = StaticWeightTable::new(formula.num_vars(), DEFAULT_REFRESH_CONFLICTS);
        table.recompute(
            formula
                .clauses()
                .iter()
                .filter(|c| !c.learned)
                .map(|c| c.literals.as_slice()),
            0,
        );
        table
    }

    /// Rebuilds every entry from the given active clauses and records the
    /// rebuild at `conflict_count`.
    pub fn recompute<'a>(&mut self, active: impl IntoIterator<Item = &'a [Lit]>, conflict_count: u64) {
        self.weights.iter_mut().for_each(|w| *w = 0.0);
        for clause in active {
            let contribution = clause_weight(clause.len());
            for lit in clause {
                self.weights[lit.code()] += contribution;
            }
        }
        self.conflicts_at_last_update = Some(
            self.conflicts_at_last_update
                .map_or(conflict_count, |c| c.max(conflict_count)),
        );
        self.update_count += 1;
    }

    /// Whether a simplification at `conflict_count` should rebuild the table.
    pub fn refresh_due(&self, conflict_count: u64) -> bool {
        match self.conflicts_at_last_update {
            None => true,
            Some(last) => conflict_count.saturating_sub(last) > self.refresh_conflicts,
        }
    }

    /// Called after each root simplification. Rebuilds the table when no
    /// table exists yet, or when strictly more than the refresh threshold of
    /// conflicts separate this call from the last rebuild.
    pub fn maybe_refresh<'a>(
        &mut self,
        active: impl IntoIterator<Item = &'a [Lit]>,
        conflict_count: u64,
    ) -> bool {
        if !self.refresh_due(conflict_count) {
            return false;
        }
        self.recompute(active, conflict_count);
        true
    }

    #[inline]
    pub fn weight(&self, lit: Lit) -> f64 {
        self.weights[lit.code()]
    }

    /// Sum of weights over a sequence of literals.
    pub fn sum<'a>(&self, lits: impl IntoIterator<Item = &'a Lit>) -> f64 {
        lits.into_iter().map(|&l| self.weight(l)).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Multiplies every entry by `factor`.
    pub fn scale(&mut self, factor: f64) {
        self.weights.iter_mut().for_each(|w| *w *= factor);
    }

    pub fn conflicts_at_last_update(&self) -> Option<u64> {
        self.conflicts_at_last_update
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn refresh_conflicts(&self) -> u64 {
        self.refresh_conflicts
    }
}
