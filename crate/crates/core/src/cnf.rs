//! Weighted CNF formulas and the weighted DIMACS dialect used by
//! model-counting competitions (`c p weight <lit> <w> 0`).

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

/// DIMACS literal: a nonzero variable id whose sign is the polarity.
pub type Lit = i32;
pub type Clause = Vec<Lit>;

/// Numeric type used for literal weights and counts.
pub type Weight = f64;

/// A CNF over variables `1..=var_count` with a real weight per literal.
/// Literals without an explicit weight weigh 1.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCnf {
    var_count: usize,
    clauses: Vec<Clause>,
    pos: Vec<Weight>,
    neg: Vec<Weight>,
}

impl WeightedCnf {
    pub fn new(var_count: usize) -> Self {
        WeightedCnf {
            var_count,
            clauses: Vec::new(),
            pos: vec![1.0; var_count + 1],
            neg: vec![1.0; var_count + 1],
        }
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    /// Grows the variable range; new variables are unbiased.
    pub fn ensure_vars(&mut self, var_count: usize) {
        if var_count > self.var_count {
            self.var_count = var_count;
            self.pos.resize(var_count + 1, 1.0);
            self.neg.resize(var_count + 1, 1.0);
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Panics if the clause mentions a variable outside `1..=var_count`.
    pub fn add_clause(&mut self, clause: Clause) {
        assert!(
            clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.var_count),
            "literal out of range in {clause:?}"
        );
        self.clauses.push(clause);
    }

    pub fn weight(&self, lit: Lit) -> Weight {
        let v = lit.unsigned_abs() as usize;
        if lit > 0 {
            self.pos[v]
        } else {
            self.neg[v]
        }
    }

    pub fn set_weight(&mut self, lit: Lit, w: Weight) {
        let v = lit.unsigned_abs() as usize;
        assert!(lit != 0 && v <= self.var_count, "literal {lit} out of range");
        if lit > 0 {
            self.pos[v] = w;
        } else {
            self.neg[v] = w;
        }
    }

    /// True when both polarities weigh 1.
    pub fn is_unbiased(&self, var: usize) -> bool {
        self.pos[var] == 1.0 && self.neg[var] == 1.0
    }

    /// Literals whose weight differs from 1, ordered by variable then
    /// positive before negative.
    pub fn weighted_literals(&self) -> Vec<(Lit, Weight)> {
        let mut out = Vec::new();
        for v in 1..=self.var_count {
            if self.pos[v] != 1.0 {
                out.push((v as Lit, self.pos[v]));
            }
            if self.neg[v] != 1.0 {
                out.push((-(v as Lit), self.neg[v]));
            }
        }
        out
    }

    /// Every weight assignment is finite.
    pub fn weights_finite(&self) -> bool {
        self.pos.iter().chain(&self.neg).all(|w| w.is_finite())
    }

    /// Copy of the formula with an extra unit clause.
    pub fn with_unit(&self, lit: Lit) -> WeightedCnf {
        let mut f = self.clone();
        f.add_clause(vec![lit]);
        f
    }

    /// Writes the formula in weighted DIMACS. Weights use the shortest
    /// decimal form that round-trips (at most 17 significant digits).
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.var_count, self.clauses.len()).unwrap();
        for (lit, w) in self.weighted_literals() {
            writeln!(out, "c p weight {lit} {w} 0").unwrap();
        }
        for c in &self.clauses {
            for l in c {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses the dialect written by [`WeightedCnf::to_dimacs`]. Other
    /// comment lines are ignored; clauses may span lines.
    pub fn from_dimacs(text: &str) -> Result<WeightedCnf, DimacsError> {
        let mut cnf: Option<WeightedCnf> = None;
        let mut declared_clauses = 0usize;
        let mut seen_weights: HashSet<Lit> = HashSet::new();
        let mut pending: Clause = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line == "%" {
                continue;
            }
            let mut words = line.split_whitespace();
            if line.starts_with('c') {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() >= 3 && toks[0] == "c" && toks[1] == "p" && toks[2] == "weight" {
                    let f = cnf.as_mut().ok_or(DimacsError::MissingHeader { line: line_no })?;
                    if toks.len() < 5 || toks.len() > 6 || (toks.len() == 6 && toks[5] != "0") {
                        return Err(DimacsError::BadWeightLine { line: line_no });
                    }
                    let lit: Lit = toks[3]
                        .parse()
                        .map_err(|_| DimacsError::BadWeightLine { line: line_no })?;
                    let w: Weight = toks[4]
                        .parse()
                        .map_err(|_| DimacsError::BadWeightLine { line: line_no })?;
                    check_lit(lit, f.var_count, line_no)?;
                    if !seen_weights.insert(lit) {
                        return Err(DimacsError::DuplicateWeight { line: line_no, lit });
                    }
                    f.set_weight(lit, w);
                }
                continue;
            }
            if line.starts_with('p') {
                if cnf.is_some() {
                    return Err(DimacsError::BadHeader { line: line_no });
                }
                let _p = words.next();
                let vars = match (words.next(), words.next(), words.next(), words.next()) {
                    (Some("cnf"), Some(v), Some(c), None) => {
                        let v: usize = v.parse().map_err(|_| DimacsError::BadHeader { line: line_no })?;
                        declared_clauses =
                            c.parse().map_err(|_| DimacsError::BadHeader { line: line_no })?;
                        v
                    }
                    _ => return Err(DimacsError::BadHeader { line: line_no }),
                };
                if vars > i32::MAX as usize {
                    return Err(DimacsError::BadHeader { line: line_no });
                }
                cnf = Some(WeightedCnf::new(vars));
                continue;
            }
            let f = cnf.as_mut().ok_or(DimacsError::MissingHeader { line: line_no })?;
            for w in words {
                let lit: Lit = w.parse().map_err(|_| DimacsError::BadLiteral {
                    line: line_no,
                    token: w.to_string(),
                })?;
                if lit == 0 {
                    f.add_clause(std::mem::take(&mut pending));
                } else {
                    check_lit(lit, f.var_count, line_no)?;
                    pending.push(lit);
                }
            }
        }
        let f = cnf.ok_or(DimacsError::MissingHeader { line: 0 })?;
        if !pending.is_empty() {
            return Err(DimacsError::UnterminatedClause);
        }
        if f.clauses.len() != declared_clauses {
            return Err(DimacsError::ClauseCount {
                declared: declared_clauses,
                found: f.clauses.len(),
            });
        }
        Ok(f)
    }
}

fn check_lit(lit: Lit, vars: usize, line: usize) -> Result<(), DimacsError> {
    if lit == 0 || lit.unsigned_abs() as usize > vars {
        Err(DimacsError::LiteralOutOfRange { line, lit })
    } else {
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimacsError {
    #[error("line {line}: malformed `p cnf` header")]
    BadHeader { line: usize },
    #[error("line {line}: content before `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: bad literal `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} out of declared range")]
    LiteralOutOfRange { line: usize, lit: Lit },
    #[error("line {line}: malformed weight line")]
    BadWeightLine { line: usize },
    #[error("line {line}: duplicate weight for literal {lit}")]
    DuplicateWeight { line: usize, lit: Lit },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}
