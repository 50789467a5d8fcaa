//! Exact weighted model counting with signed real weights.
//!
//! `MC_W(F) = Σ_{α ⊨ F} Π_v W(α(v))`, summed over total assignments of all
//! `var_count` variables; a variable that no clause constrains contributes
//! `W(v) + W(¬v)`.
//!
//! [`Counter`] is an exhaustive DPLL search with unit propagation,
//! connected-component decomposition and an LRU component cache keyed on the
//! canonical residual clauses. Pure-literal elimination is never used: it
//! is unsound for counting.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use lru::LruCache;
use thiserror::Error;

use crate::cnf::{Lit, Weight, WeightedCnf};

pub use crate::cnf::DimacsError;

/// Largest formula [`count_bruteforce`] will enumerate.
pub const BRUTEFORCE_MAX_VARS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WmcError {
    #[error("weight of literal {0} is not finite")]
    NonFiniteWeight(Lit),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("{vars} variables exceeds the brute-force limit of {max}")]
    TooManyVars { vars: usize, max: usize },
}

/// How the next decision variable of a component is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Branching {
    /// Lowest open variable id. Encoder ids grow with the time step, so
    /// this walks a circuit formula forward.
    #[default]
    LowestId,
    /// Most occurrences in the component's open clauses, lowest id on ties.
    MostOccurrences,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterConfig {
    /// Maximum number of cached components before LRU eviction.
    pub cache_capacity: usize,
    pub branching: Branching,
    pub max_decisions: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for CounterConfig {
    fn default() -> Self {
        CounterConfig {
            cache_capacity: 1 << 20,
            branching: Branching::default(),
            max_decisions: None,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountStats {
    pub decisions: u64,
    pub propagations: u64,
    pub cache_hits: u64,
    pub components: u64,
    pub elapsed: Duration,
}

impl CountStats {
    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        format!(
            "decisions={}\npropagations={}\ncache_hits={}\ncomponents={}\nelapsed_ms={:.3}\n",
            self.decisions,
            self.propagations,
            self.cache_hits,
            self.components,
            self.elapsed.as_secs_f64() * 1e3
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountResult {
    pub value: Weight,
    pub stats: CountStats,
}

/// Counts with the default configuration.
pub fn count(f: &WeightedCnf) -> Result<CountResult, WmcError> {
    Counter::default().count(f)
}

/// Parses weighted DIMACS.
pub fn parse_dimacs(text: &str) -> Result<WeightedCnf, DimacsError> {
    WeightedCnf::from_dimacs(text)
}

#[derive(Clone, Debug, Default)]
pub struct Counter {
    pub config: CounterConfig,
}

impl Counter {
    pub fn new(config: CounterConfig) -> Self {
        Counter { config }
    }

    pub fn count(&self, f: &WeightedCnf) -> Result<CountResult, WmcError> {
        for v in 1..=f.var_count() as Lit {
            for lit in [v, -v] {
                if !f.weight(lit).is_finite() {
                    return Err(WmcError::NonFiniteWeight(lit));
                }
            }
        }
        let start = Instant::now();
        let mut search = Search::new(f, &self.config, start);
        let value = search.run()?;
        let mut stats = search.stats;
        stats.elapsed = start.elapsed();
        Ok(CountResult { value, stats })
    }
}

const UNASSIGNED: i8 = 0;

fn lit_index(l: Lit) -> usize {
    2 * l.unsigned_abs() as usize + usize::from(l < 0)
}

struct Search<'a> {
    f: &'a WeightedCnf,
    config: &'a CounterConfig,
    start: Instant,
    clauses: Vec<Vec<Lit>>,
    has_empty: bool,
    /// clause ids per literal index
    occ: Vec<Vec<u32>>,
    val: Vec<i8>,
    trail: Vec<Lit>,
    cache: LruCache<Vec<Lit>, Weight>,
    stats: CountStats,
    // scratch for component discovery
    stamp: u32,
    clause_active: Vec<u32>,
    clause_seen: Vec<u32>,
    var_seen: Vec<u32>,
    score: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(f: &'a WeightedCnf, config: &'a CounterConfig, start: Instant) -> Self {
        let n = f.var_count();
        let mut clauses = Vec::with_capacity(f.clauses().len());
        let mut has_empty = false;
        for c in f.clauses() {
            let mut c = c.clone();
            c.sort_unstable_by_key(|l| (l.unsigned_abs(), *l < 0));
            c.dedup();
            if c.windows(2).any(|w| w[0] == -w[1]) {
                continue; // tautology
            }
            has_empty |= c.is_empty();
            clauses.push(c);
        }
        let mut occ = vec![Vec::new(); 2 * n + 2];
        for (i, c) in clauses.iter().enumerate() {
            for &l in c {
                occ[lit_index(l)].push(i as u32);
            }
        }
        let cap = NonZeroUsize::new(config.cache_capacity.max(1)).unwrap();
        let m = clauses.len();
        Search {
            f,
            config,
            start,
            clauses,
            has_empty,
            occ,
            val: vec![UNASSIGNED; n + 1],
            trail: Vec::with_capacity(n),
            cache: LruCache::new(cap),
            stats: CountStats::default(),
            stamp: 0,
            clause_active: vec![0; m],
            clause_seen: vec![0; m],
            var_seen: vec![0; n + 1],
            score: vec![0; n + 1],
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.val[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn satisfied(&self, ci: usize) -> bool {
        self.clauses[ci].iter().any(|&l| self.lit_value(l) > 0)
    }

    fn set(&mut self, l: Lit) {
        self.val[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Assigns `l` and propagates; false on conflict. The caller undoes.
    fn assign(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => return true,
            -1 => return false,
            _ => {}
        }
        let mut head = self.trail.len();
        self.set(l);
        while head < self.trail.len() {
            let falsified = -self.trail[head];
            head += 1;
            let idx = lit_index(falsified);
            for k in 0..self.occ[idx].len() {
                let ci = self.occ[idx][k] as usize;
                let mut unit = None;
                let mut open = 0;
                let mut sat = false;
                for &cl in &self.clauses[ci] {
                    match self.lit_value(cl) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            open += 1;
                            unit = Some(cl);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        self.stats.propagations += 1;
                        self.set(unit.unwrap());
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        for l in self.trail.drain(mark..) {
            self.val[l.unsigned_abs() as usize] = UNASSIGNED;
        }
    }

    fn trail_weight(&self, mark: usize) -> Weight {
        self.trail[mark..].iter().map(|&l| self.f.weight(l)).product()
    }

    fn check_limits(&self) -> Result<(), WmcError> {
        if let Some(max) = self.config.max_decisions {
            if self.stats.decisions > max {
                return Err(WmcError::ResourceLimit(format!("more than {max} decisions")));
            }
        }
        if let Some(limit) = self.config.time_limit {
            if self.stats.decisions.is_multiple_of(256) && self.start.elapsed() > limit {
                return Err(WmcError::ResourceLimit(format!("time limit {limit:?}")));
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<Weight, WmcError> {
        if self.has_empty {
            return Ok(0.0);
        }
        for ci in 0..self.clauses.len() {
            if self.clauses[ci].len() == 1 {
                let l = self.clauses[ci][0];
                if !self.assign(l) {
                    return Ok(0.0);
                }
            }
        }
        let w = self.trail_weight(0);
        if w == 0.0 {
            return Ok(0.0);
        }
        let clauses: Vec<u32> = (0..self.clauses.len() as u32).collect();
        let vars: Vec<u32> = (1..=self.f.var_count() as u32).collect();
        Ok(w * self.residual(&clauses, &vars)?)
    }

    /// Count of the part of the formula spanned by `clauses` and `vars`
    /// under the current assignment, excluding weights of assigned vars.
    fn residual(&mut self, clauses: &[u32], vars: &[u32]) -> Result<Weight, WmcError> {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.clause_active.fill(0);
            self.clause_seen.fill(0);
            self.var_seen.fill(0);
            self.stamp = 1;
        }
        let s = self.stamp;
        for &ci in clauses {
            if !self.satisfied(ci as usize) {
                self.clause_active[ci as usize] = s;
            }
        }

        let mut comps: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
        let mut queue: Vec<u32> = Vec::new();
        for &root in clauses {
            if self.clause_active[root as usize] != s || self.clause_seen[root as usize] == s {
                continue;
            }
            let (mut cc, mut cv) = (Vec::new(), Vec::new());
            self.clause_seen[root as usize] = s;
            queue.push(root);
            while let Some(ci) = queue.pop() {
                cc.push(ci);
                for li in 0..self.clauses[ci as usize].len() {
                    let l = self.clauses[ci as usize][li];
                    let v = l.unsigned_abs() as usize;
                    if self.val[v] != UNASSIGNED || self.var_seen[v] == s {
                        continue;
                    }
                    self.var_seen[v] = s;
                    cv.push(v as u32);
                    for idx in [2 * v, 2 * v + 1] {
                        for &cj in &self.occ[idx] {
                            let j = cj as usize;
                            if self.clause_active[j] == s && self.clause_seen[j] != s {
                                self.clause_seen[j] = s;
                                queue.push(cj);
                            }
                        }
                    }
                }
            }
            comps.push((cc, cv));
        }

        let mut total: Weight = 1.0;
        for &v in vars {
            let v = v as usize;
            if self.val[v] == UNASSIGNED && self.var_seen[v] != s {
                total *= self.f.weight(v as Lit) + self.f.weight(-(v as Lit));
            }
        }
        // smallest variable first, for a stable evaluation order
        comps.sort_by_key(|(_, cv)| cv.iter().copied().min());
        for (mut cc, mut cv) in comps {
            if total == 0.0 {
                break;
            }
            cc.sort_unstable();
            cv.sort_unstable();
            total *= self.component(&cc, &cv)?;
        }
        Ok(total)
    }

    fn cache_key(&self, clauses: &[u32]) -> Vec<Lit> {
        let mut reduced: Vec<Vec<Lit>> = clauses
            .iter()
            .map(|&ci| {
                self.clauses[ci as usize]
                    .iter()
                    .copied()
                    .filter(|&l| self.lit_value(l) == 0)
                    .collect()
            })
            .collect();
        reduced.sort_unstable();
        let mut key = Vec::with_capacity(reduced.iter().map(|c| c.len() + 1).sum());
        for c in reduced {
            key.extend(c);
            key.push(0);
        }
        key
    }

    fn most_occurrences(&mut self, clauses: &[u32], vars: &[u32]) -> u32 {
        for &ci in clauses {
            for &l in &self.clauses[ci as usize] {
                if self.lit_value(l) == 0 {
                    self.score[l.unsigned_abs() as usize] += 1;
                }
            }
        }
        let mut best = 0u32;
        let mut best_score = 0u32;
        for &v in vars {
            let sc = self.score[v as usize];
            if sc > best_score {
                best = v;
                best_score = sc;
            }
        }
        for &v in vars {
            self.score[v as usize] = 0;
        }
        best
    }

    fn component(&mut self, clauses: &[u32], vars: &[u32]) -> Result<Weight, WmcError> {
        self.stats.components += 1;
        let key = self.cache_key(clauses);
        if let Some(&v) = self.cache.get(&key) {
            self.stats.cache_hits += 1;
            return Ok(v);
        }

        let best = match self.config.branching {
            Branching::LowestId => vars[0],
            Branching::MostOccurrences => self.most_occurrences(clauses, vars),
        };
        debug_assert!(best != 0, "component without open variable");

        let mut total: Weight = 0.0;
        for lit in [best as Lit, -(best as Lit)] {
            self.stats.decisions += 1;
            self.check_limits()?;
            let mark = self.trail.len();
            if self.assign(lit) {
                let w = self.trail_weight(mark);
                if w != 0.0 {
                    let sub = self.residual(clauses, vars);
                    match sub {
                        Ok(sub) => total += w * sub,
                        Err(e) => {
                            self.undo(mark);
                            return Err(e);
                        }
                    }
                }
            }
            self.undo(mark);
        }
        self.cache.put(key, total);
        Ok(total)
    }
}

/// Reference count by enumerating all `2^var_count` assignments.
pub fn count_bruteforce(f: &WeightedCnf) -> Result<Weight, WmcError> {
    let n = f.var_count();
    if n > BRUTEFORCE_MAX_VARS {
        return Err(WmcError::TooManyVars {
            vars: n,
            max: BRUTEFORCE_MAX_VARS,
        });
    }
    // bit v-1 of an assignment holds variable v
    let masks: Vec<(u32, u32)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(p, q), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let mut total = 0.0;
    for a in 0..1u32 << n {
        if masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0) {
            let w: Weight = (1..=n)
                .map(|v| {
                    let lit = if a >> (v - 1) & 1 == 1 { v as Lit } else { -(v as Lit) };
                    f.weight(lit)
                })
                .product();
            total += w;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, clauses: &[&[Lit]]) -> WeightedCnf {
        let mut f = WeightedCnf::new(n);
        for c in clauses {
            f.add_clause(c.to_vec());
        }
        f
    }

    #[test]
    fn free_variables() {
        let f = WeightedCnf::new(3);
        assert_eq!(count(&f).unwrap().value, 8.0);
        assert_eq!(count_bruteforce(&f).unwrap(), 8.0);
    }

    #[test]
    fn unsatisfiable_units() {
        let f = cnf(1, &[&[1], &[-1]]);
        assert_eq!(count(&f).unwrap().value, 0.0);
        assert_eq!(count_bruteforce(&f).unwrap(), 0.0);
    }

    #[test]
    fn empty_clause_counts_zero() {
        let f = cnf(2, &[&[], &[1, 2]]);
        assert_eq!(count(&f).unwrap().value, 0.0);
        assert_eq!(count_bruteforce(&f).unwrap(), 0.0);
    }

    #[test]
    fn weighted_unit() {
        let mut f = cnf(1, &[&[1]]);
        f.set_weight(1, -1.0);
        assert_eq!(count(&f).unwrap().value, -1.0);
        assert_eq!(count_bruteforce(&f).unwrap(), -1.0);
    }

    #[test]
    fn tautologies_are_dropped() {
        let f = cnf(2, &[&[1, -1], &[2]]);
        assert_eq!(count(&f).unwrap().value, 2.0);
    }

    #[test]
    fn zero_weight_annihilates_branch() {
        let mut f = cnf(2, &[&[1, 2]]);
        f.set_weight(1, 0.0);
        // only ¬v1 ∧ v2 survives
        assert_eq!(count(&f).unwrap().value, 1.0);
        assert_eq!(count_bruteforce(&f).unwrap(), 1.0);
    }

    #[test]
    fn decision_limit() {
        let f = cnf(6, &[&[1, 2, 3], &[-1, 4, 5], &[2, -5, 6], &[-3, -4, 6]]);
        let c = Counter::new(CounterConfig {
            max_decisions: Some(1),
            ..Default::default()
        });
        assert!(matches!(c.count(&f), Err(WmcError::ResourceLimit(_))));
    }

    #[test]
    fn rejects_non_finite_weight() {
        let mut f = WeightedCnf::new(1);
        f.set_weight(-1, f64::NAN);
        assert_eq!(count(&f), Err(WmcError::NonFiniteWeight(-1)));
    }

    #[test]
    fn bruteforce_limit() {
        let f = WeightedCnf::new(27);
        assert!(matches!(count_bruteforce(&f), Err(WmcError::TooManyVars { .. })));
    }

    #[test]
    fn stats_format() {
        let s = CountStats::default().to_key_values();
        assert!(s.starts_with("decisions=0\npropagations=0\n"));
    }
}
