//! Exhaustive ground truth for small formulas and a seeded random 3-CNF
//! generator.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Formula, Lit, Var};

pub const MAX_BRUTE_FORCE_VARS: usize = 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} variables exceed the brute-force limit of {MAX_BRUTE_FORCE_VARS}")]
    TooManyVariables(usize),
    #[error("invalid random CNF spec: {0}")]
    InvalidSpec(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForce {
    Sat(Vec<bool>),
    Unsat,
}

impl BruteForce {
    pub fn is_sat(&self) -> bool {
        matches!(self, BruteForce::Sat(_))
    }
}

/// Enumerates all assignments with `x1` as the most significant position
/// and false before true, returning the first model found.
pub fn brute_force(formula: &Formula) -> Result<BruteForce, OracleError> {
    let n = formula.num_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(OracleError::TooManyVariables(n));
    }
    let bit = |var: Var| 1u32 << (n - 1 - var.index());
    // A clause is satisfied by `m` iff it shares a set bit with its positive
    // mask or a clear bit with its negative mask.
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.literals.iter().fold((0, 0), |(pos, neg), &l| {
                if l.is_positive() {
                    (pos | bit(l.var()), neg)
                } else {
                    (pos, neg | bit(l.var()))
                }
            })
        })
        .collect();
    let total: u64 = 1 << n;
    for m in 0..total {
        let m = m as u32;
        if masks.iter().all(|&(pos, neg)| m & pos != 0 || !m & neg != 0) {
            let model = (0..n).map(|i| m & bit(Var::from_index(i)) != 0).collect();
            return Ok(BruteForce::Sat(model));
        }
    }
    Ok(BruteForce::Unsat)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomCnfSpec {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub clause_len: usize,
    pub seed: u64,
}

impl RandomCnfSpec {
    pub fn new(num_vars: usize, num_clauses: usize, seed: u64) -> RandomCnfSpec {
        RandomCnfSpec {
            num_vars,
            num_clauses,
            clause_len: 3,
            seed,
        }
    }
}

/// Uniform random k-CNF: each clause draws `clause_len` distinct variables
/// and independent fair polarities.
pub fn generate(spec: &RandomCnfSpec) -> Result<Formula, OracleError> {
    if !(1..=MAX_BRUTE_FORCE_VARS).contains(&spec.num_vars) {
        return Err(OracleError::InvalidSpec(format!(
            "num_vars must be in 1..={MAX_BRUTE_FORCE_VARS}, got {}",
            spec.num_vars
        )));
    }
    if spec.num_clauses == 0 || spec.clause_len == 0 {
        return Err(OracleError::InvalidSpec(
            "num_clauses and clause_len must be positive".into(),
        ));
    }
    if spec.clause_len > spec.num_vars {
        return Err(OracleError::InvalidSpec(format!(
            "clause_len {} exceeds num_vars {}",
            spec.clause_len, spec.num_vars
        )));
    }
    Ok(random_kcnf(
        spec.num_vars,
        spec.num_clauses,
        spec.clause_len,
        spec.seed,
    ))
}

/// Same distribution as [`generate`] without the brute-force size cap.
pub fn random_kcnf(num_vars: usize, num_clauses: usize, k: usize, seed: u64) -> Formula {
    assert!(k >= 1 && k <= num_vars);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<Vec<Lit>> = (0..num_clauses)
        .map(|_| {
            sample(&mut rng, num_vars, k)
                .into_iter()
                .map(|v| Var::from_index(v).lit(rng.gen_bool(0.5)))
                .collect()
        })
        .collect();
    Formula::new(num_vars, clauses)
}

/// Pigeonhole principle: `pigeons` pigeons into `holes` holes, one per hole.
/// Unsatisfiable whenever `pigeons > holes`.
pub fn pigeonhole(pigeons: usize, holes: usize) -> Formula {
    let var = |p: usize, h: usize| Var::from_index(p * holes + h);
    let mut clauses: Vec<Vec<Lit>> = (0..pigeons)
        .map(|p| (0..holes).map(|h| var(p, h).positive()).collect())
        .collect();
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                clauses.push(vec![var(p, h).negative(), var(q, h).negative()]);
            }
        }
    }
    Formula::new(pigeons * holes, clauses)
}
