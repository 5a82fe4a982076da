//! CNF data model and the DIMACS front-end.
//!
//! Variables are stored 0-based internally and printed 1-based. A literal is
//! packed as `2 * var + negated`, so both polarities of a variable are
//! adjacent and `lit.code()` can index per-literal tables directly.

use std::fmt;
use std::io::Read;
use std::ops::Not;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn from_index(index: usize) -> Var {
        Var(index as u32)
    }

    /// Builds a variable from its 1-based DIMACS number.
    pub fn from_dimacs(number: u32) -> Var {
        assert!(number >= 1, "DIMACS variables start at 1");
        Var(number - 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn to_dimacs(self) -> u32 {
        self.0 + 1
    }

    pub fn lit(self, positive: bool) -> Lit {
        Lit(self.0 << 1 | (!positive) as u32)
    }

    pub fn positive(self) -> Lit {
        self.lit(true)
    }

    pub fn negative(self) -> Lit {
        self.lit(false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.to_dimacs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    /// Parses a nonzero DIMACS literal such as `-3`.
    pub fn from_dimacs(value: i64) -> Lit {
        assert!(value != 0, "0 terminates a clause and is not a literal");
        Var::from_dimacs(value.unsigned_abs() as u32).lit(value > 0)
    }

    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().to_dimacs() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.var())
        } else {
            write!(f, "¬{}", self.var())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Lit>,
    pub learned: bool,
    /// Literal block distance; meaningful for learned clauses only.
    pub lbd: u32,
}

impl Clause {
    pub fn original(literals: Vec<Lit>) -> Clause {
        Clause {
            literals,
            learned: false,
            lbd: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.literals.contains(&lit)
    }
}

/// Sorts, dedups and checks a raw clause. Returns `None` for tautologies.
pub fn normalize_clause(mut literals: Vec<Lit>) -> Option<Vec<Lit>> {
    literals.sort_unstable();
    literals.dedup();
    // Complementary literals are adjacent after sorting.
    if literals.windows(2).any(|w| w[0] == !w[1]) {
        return None;
    }
    Some(literals)
}

/// An immutable input formula together with its occurrence lists.
#[derive(Clone, Debug)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    num_literal_occurrences: usize,
    occurrences: Vec<Vec<usize>>,
    has_empty_clause: bool,
    tautologies_dropped: usize,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        self.num_vars == other.num_vars && self.clauses == other.clauses
    }
}

impl Eq for Formula {}

impl Formula {
    /// Builds a formula from raw clauses, normalizing them the same way the
    /// parser does.
    pub fn new(num_vars: usize, raw: impl IntoIterator<Item = Vec<Lit>>) -> Formula {
        let mut tautologies = 0;
        let mut clauses = Vec::new();
        for lits in raw {
            assert!(
                lits.iter().all(|l| l.var().index() < num_vars),
                "literal out of range"
            );
            match normalize_clause(lits) {
                Some(lits) => clauses.push(Clause::original(lits)),
                None => tautologies += 1,
            }
        }
        let mut formula = Formula::from_normalized(num_vars, clauses);
        formula.tautologies_dropped = tautologies;
        formula
    }

    /// Convenience constructor from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Formula {
        Formula::new(
            num_vars,
            clauses
                .iter()
                .map(|c| c.iter().map(|&l| Lit::from_dimacs(l)).collect()),
        )
    }

    fn from_normalized(num_vars: usize, clauses: Vec<Clause>) -> Formula {
        let mut occurrences = vec![Vec::new(); 2 * num_vars];
        let mut total = 0;
        let mut has_empty_clause = false;
        for (index, clause) in clauses.iter().enumerate() {
            has_empty_clause |= clause.is_empty();
            total += clause.len();
            for &lit in &clause.literals {
                occurrences[lit.code()].push(index);
            }
        }
        Formula {
            num_vars,
            clauses,
            num_literal_occurrences: total,
            occurrences,
            has_empty_clause,
            tautologies_dropped: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Sum of clause sizes over the original clauses; fixed at construction.
    pub fn num_literal_occurrences(&self) -> usize {
        self.num_literal_occurrences
    }

    pub fn has_empty_clause(&self) -> bool {
        self.has_empty_clause
    }

    pub fn tautologies_dropped(&self) -> usize {
        self.tautologies_dropped
    }

    /// Indices of the clauses containing `lit`, in input order.
    pub fn occurrence_indices(&self, lit: Lit) -> &[usize] {
        &self.occurrences[lit.code()]
    }

    /// The clauses containing `lit`, in input order.
    pub fn occurrences(&self, lit: Lit) -> impl Iterator<Item = &Clause> + '_ {
        self.occurrences[lit.code()]
            .iter()
            .map(move |&i| &self.clauses[i])
    }

    /// Evaluates the formula under a total assignment indexed by variable.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        first_falsified_clause(self, model).is_none()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in &clause.literals {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Index of the first clause not satisfied by `model`, if any.
pub fn first_falsified_clause(formula: &Formula, model: &[bool]) -> Option<usize> {
    assert_eq!(model.len(), formula.num_vars(), "model must be total");
    formula.clauses().iter().position(|clause| {
        !clause
            .literals
            .iter()
            .any(|l| model[l.var().index()] == l.is_positive())
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: literal {literal} exceeds the declared {num_vars} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("end of input inside a clause not terminated by 0")]
    UnterminatedClause,
    #[error("line {line}: invalid token {token:?}")]
    InvalidToken { line: usize, token: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub fn parse_dimacs_reader(mut reader: impl Read) -> Result<Formula, ParseError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| ParseError::Io(e.to_string()))?;
    parse_dimacs(&text)
}

/// Parses a DIMACS CNF document.
///
/// The header's clause count is not enforced. Duplicate literals are merged
/// and tautological clauses are dropped (counted in
/// [`Formula::tautologies_dropped`]). An empty clause is accepted and makes
/// the formula trivially unsatisfiable.
pub fn parse_dimacs(text: &str) -> Result<Formula, ParseError> {
    let mut num_vars: Option<usize> = None;
    let mut raw: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut open = false;

    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if num_vars.is_some() {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    detail: "duplicate header".into(),
                });
            }
            num_vars = Some(parse_header(line, line_no)?);
            continue;
        }
        // SATLIB files end with a "%" line followed by a stray "0".
        if line.starts_with('%') {
            break;
        }
        let Some(declared) = num_vars else {
            return Err(ParseError::MalformedHeader {
                line: line_no,
                detail: "clause data before \"p cnf\" header".into(),
            });
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                raw.push(std::mem::take(&mut current));
                open = false;
                continue;
            }
            if value.unsigned_abs() > declared as u64 {
                return Err(ParseError::LiteralOutOfRange {
                    line: line_no,
                    literal: value,
                    num_vars: declared,
                });
            }
            current.push(Lit::from_dimacs(value));
            open = true;
        }
    }

    let Some(num_vars) = num_vars else {
        return Err(ParseError::MalformedHeader {
            line: 0,
            detail: "missing \"p cnf\" header".into(),
        });
    };
    if open {
        return Err(ParseError::UnterminatedClause);
    }
    Ok(Formula::new(num_vars, raw))
}

fn parse_header(line: &str, line_no: usize) -> Result<usize, ParseError> {
    let malformed = |detail: &str| ParseError::MalformedHeader {
        line: line_no,
        detail: detail.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(malformed("expected \"p cnf <vars> <clauses>\""));
    }
    let vars = fields[2]
        .parse::<usize>()
        .map_err(|_| malformed("variable count is not a nonnegative integer"))?;
    fields[3]
        .parse::<usize>()
        .map_err(|_| malformed("clause count is not a nonnegative integer"))?;
    Ok(vars)
}
