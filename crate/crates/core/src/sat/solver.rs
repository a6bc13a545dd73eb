use super::{ClauseSink, CnfFormula, Literal, Model, SatResult, SatVar};

const NO_REASON: u32 = u32::MAX;
const UNASSIGNED: i8 = -1;

/// Branching variable selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Lowest unassigned variable index first.
    #[default]
    Ordered,
    /// Variable activity bumped on conflict participation, with saved
    /// phases.
    Vsids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverConfig {
    /// Zero keeps every decision at polarity false; other seeds flip the
    /// preferred polarity of a deterministic subset of variables.
    pub seed: u64,
    pub heuristic: Heuristic,
    /// Luby restarts (unit 64 conflicts).
    pub restarts: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub learnt_clauses: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Literal>,
    learnt: bool,
    /// Distinct decision levels among the literals when learnt.
    lbd: u32,
    /// Deleted clauses are dropped from watch lists lazily.
    deleted: bool,
}

/// Learnt clauses kept before the first database reduction.
const FIRST_REDUCE: usize = 2000;
const REDUCE_STEP: usize = 300;

#[inline]
fn lit_value(values: &[i8], lit: Literal) -> i8 {
    let v = values[lit.var().index() as usize];
    if v == UNASSIGNED {
        UNASSIGNED
    } else {
        v ^ i8::from(lit.is_negated())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn luby(mut i: u64) -> u64 {
    // Luby sequence 1,1,2,1,1,2,4,... for i >= 1.
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

/// Incremental CDCL solver with two watched literals, first-UIP learning
/// and solving under assumptions.
///
/// Clauses may be added between calls to [`Solver::solve`]; learnt clauses
/// stay implied by the growing clause database, so they carry over until
/// the periodic reduction drops the ones with high LBD.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<u32>>,
    values: Vec<i8>,
    levels: Vec<u32>,
    reasons: Vec<u32>,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    trail: Vec<Literal>,
    trail_lim: Vec<usize>,
    qhead: usize,
    next_var: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    ok: bool,
    stats: SolverStats,
    live_learnts: usize,
    reduce_at: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default())
    }
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver {
            config,
            num_vars: 0,
            clauses: Vec::new(),
            watches: vec![Vec::new(), Vec::new()],
            values: vec![UNASSIGNED],
            levels: vec![0],
            reasons: vec![NO_REASON],
            polarity: vec![false],
            seen: vec![false],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            next_var: 1,
            activity: vec![0.0],
            var_inc: 1.0,
            heap: VarHeap::default(),
            ok: true,
            stats: SolverStats::default(),
            live_learnts: 0,
            reduce_at: FIRST_REDUCE,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars as u32
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Adds every clause of `formula`, growing the variable range as needed.
    pub fn load(&mut self, formula: &CnfFormula) {
        if formula.num_vars() > 0 {
            self.reserve_var(SatVar::new(formula.num_vars()));
        }
        if formula.is_contradiction() {
            self.ok = false;
        }
        for clause in formula.clauses() {
            self.add_clause(clause);
        }
    }

    /// Makes sure `var` exists.
    pub fn reserve_var(&mut self, var: SatVar) {
        while self.num_vars < var.index() as usize {
            self.new_var();
        }
    }

    fn value(&self, lit: Literal) -> i8 {
        lit_value(&self.values, lit)
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, lit: Literal, reason: u32) {
        let v = lit.var().index() as usize;
        debug_assert_eq!(self.values[v], UNASSIGNED);
        self.values[v] = i8::from(!lit.is_negated());
        self.levels[v] = self.decision_level();
        self.reasons[v] = reason;
        self.trail.push(lit);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for i in (start..self.trail.len()).rev() {
            let v = self.trail[i].var().index() as usize;
            if self.config.heuristic == Heuristic::Vsids {
                self.polarity[v] = self.values[v] == 1;
            }
            self.values[v] = UNASSIGNED;
            self.reasons[v] = NO_REASON;
            self.next_var = self.next_var.min(v);
            if self.config.heuristic == Heuristic::Vsids {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    fn attach(&mut self, index: u32) {
        let lits = &self.clauses[index as usize].lits;
        let (a, b) = (lits[0], lits[1]);
        self.watches[a.code()].push(index);
        self.watches[b.code()].push(index);
    }

    /// Unit propagation; returns the index of a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            // Compacted in place: `kept` entries stay at the front.
            let mut watchers = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut kept = 0;
            let mut conflict = None;
            let mut i = 0;
            while i < watchers.len() {
                let ci = watchers[i];
                i += 1;
                let entry = &mut self.clauses[ci as usize];
                if entry.deleted {
                    continue;
                }
                let clause = &mut entry.lits;
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if lit_value(&self.values, first) == 1 {
                    watchers[kept] = ci;
                    kept += 1;
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| lit_value(&self.values, clause[k]) != 0);
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    self.watches[clause[1].code()].push(ci);
                    continue;
                }
                watchers[kept] = ci;
                kept += 1;
                if lit_value(&self.values, first) == 0 {
                    conflict = Some(ci);
                    while i < watchers.len() {
                        watchers[kept] = watchers[i];
                        kept += 1;
                        i += 1;
                    }
                    break;
                }
                self.enqueue(first, ci);
            }
            watchers.truncate(kept);
            self.watches[false_lit.code()] = watchers;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        if self.config.heuristic != Heuristic::Vsids {
            return;
        }
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut conflict: u32) -> (Vec<Literal>, u32, u32) {
        let current = self.decision_level();
        let mut learnt = vec![Literal::new(SatVar::new(1), false)];
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut p: Option<Literal> = None;
        loop {
            let skip = usize::from(p.is_some());
            for k in skip..self.clauses[conflict as usize].lits.len() {
                let q = self.clauses[conflict as usize].lits[k];
                let v = q.var().index() as usize;
                if self.seen[v] || self.levels[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump(v);
                if self.levels[v] >= current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = lit.var().index() as usize;
            self.seen[v] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            conflict = self.reasons[v];
            debug_assert_ne!(conflict, NO_REASON);
        }
        learnt[0] = !p.expect("conflict has a UIP");
        // Drop literals implied by the rest of the clause.
        let all = learnt.clone();
        learnt.retain(|&lit| {
            let v = lit.var().index() as usize;
            let reason = self.reasons[v];
            lit == all[0]
                || reason == NO_REASON
                || self.clauses[reason as usize].lits[1..].iter().any(|q| {
                    let u = q.var().index() as usize;
                    !self.seen[u] && self.levels[u] > 0
                })
        });
        for lit in &all[1..] {
            self.seen[lit.var().index() as usize] = false;
        }

        let mut backjump = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.levels[learnt[i].var().index() as usize]
                    > self.levels[learnt[best].var().index() as usize]
                {
                    best = i;
                }
            }
            learnt.swap(1, best);
            backjump = self.levels[learnt[1].var().index() as usize];
        }
        self.var_inc *= 1.0 / 0.95;
        let mut levels: Vec<u32> = learnt.iter().map(|l| self.levels[l.var().index() as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        (learnt, backjump, levels.len() as u32)
    }

    /// Deletes the worse half of the learnt clauses (by LBD, then length),
    /// keeping binary and glue clauses and those that are reasons.
    fn reduce_learnts(&mut self) {
        let mut candidates: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                if !c.learnt || c.deleted || c.lits.len() <= 2 || c.lbd <= 2 {
                    return false;
                }
                let v = c.lits[0].var().index() as usize;
                !(self.reasons[v] == i as u32 && self.value(c.lits[0]) == 1)
            })
            .collect();
        candidates.sort_by_key(|&i| {
            let c = &self.clauses[i];
            (std::cmp::Reverse(c.lbd), std::cmp::Reverse(c.lits.len()), i)
        });
        for &i in &candidates[..candidates.len() / 2] {
            let c = &mut self.clauses[i];
            c.deleted = true;
            c.lits = Vec::new();
            self.live_learnts -= 1;
        }
        self.reduce_at += REDUCE_STEP;
    }

    fn pick_branch(&mut self) -> Option<Literal> {
        let v = match self.config.heuristic {
            Heuristic::Ordered => {
                while self.next_var <= self.num_vars && self.values[self.next_var] != UNASSIGNED {
                    self.next_var += 1;
                }
                if self.next_var > self.num_vars {
                    return None;
                }
                self.next_var
            }
            Heuristic::Vsids => loop {
                let v = self.heap.pop(&self.activity)?;
                if self.values[v] == UNASSIGNED {
                    break v;
                }
            },
        };
        Some(Literal::new(SatVar::new(v as u32), !self.polarity[v]))
    }

    /// Searches for a model extending `assumptions`.
    ///
    /// Every returned model satisfies all clauses and assumptions; this is
    /// checked before returning.
    pub fn solve(&mut self, assumptions: &[Literal]) -> SatResult {
        let result = self.search(assumptions);
        self.cancel_until(0);
        if let SatResult::Sat(model) = &result {
            for clause in self.clauses.iter().filter(|c| !c.deleted) {
                assert!(
                    clause.lits.iter().any(|&l| model.lit_value(l)),
                    "model violates a clause"
                );
            }
            for &lit in assumptions {
                assert!(model.lit_value(lit), "model violates an assumption");
            }
        }
        result
    }

    fn search(&mut self, assumptions: &[Literal]) -> SatResult {
        if !self.ok {
            return SatResult::Unsat;
        }
        for lit in assumptions {
            assert!(
                (lit.var().index() as usize) <= self.num_vars,
                "assumption on unknown variable"
            );
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SatResult::Unsat;
        }

        let mut restart_index = 1;
        let mut conflicts_until_restart = 64 * luby(restart_index);
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SatResult::Unsat;
                }
                let (learnt, backjump, lbd) = self.analyze(conflict);
                self.cancel_until(backjump);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let index = self.clauses.len() as u32;
                    let asserting = learnt[0];
                    self.clauses.push(Clause { lits: learnt, learnt: true, lbd, deleted: false });
                    self.attach(index);
                    self.enqueue(asserting, index);
                    self.stats.learnt_clauses += 1;
                    self.live_learnts += 1;
                }
                if self.live_learnts >= self.reduce_at {
                    self.reduce_learnts();
                }
                if self.config.restarts {
                    conflicts_until_restart -= 1;
                    if conflicts_until_restart == 0 {
                        restart_index += 1;
                        conflicts_until_restart = 64 * luby(restart_index);
                        self.stats.restarts += 1;
                        self.cancel_until(0);
                    }
                }
                continue;
            }

            let level = self.decision_level() as usize;
            let next = if level < assumptions.len() {
                let lit = assumptions[level];
                match self.value(lit) {
                    1 => {
                        // Already implied: open an empty level to keep levels
                        // aligned with assumption indices.
                        self.trail_lim.push(self.trail.len());
                        continue;
                    }
                    0 => return SatResult::Unsat,
                    _ => lit,
                }
            } else {
                match self.pick_branch() {
                    Some(lit) => lit,
                    None => {
                        let mut values = vec![false; self.num_vars + 1];
                        for (v, value) in values.iter_mut().enumerate().skip(1) {
                            *value = self.values[v] == 1;
                        }
                        return SatResult::Sat(Model::from_values(values));
                    }
                }
            };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }
}

impl ClauseSink for Solver {
    fn new_var(&mut self) -> SatVar {
        self.num_vars += 1;
        let v = self.num_vars;
        self.values.push(UNASSIGNED);
        self.levels.push(0);
        self.reasons.push(NO_REASON);
        self.seen.push(false);
        self.activity.push(0.0);
        let seed = self.config.seed;
        self.polarity
            .push(seed != 0 && splitmix64(seed ^ (v as u64).wrapping_mul(0x2545_f491_4f6c_dd1d)).is_multiple_of(8));
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        if self.config.heuristic == Heuristic::Vsids {
            self.heap.insert(v, &self.activity);
        }
        SatVar::new(v as u32)
    }

    fn add_clause(&mut self, lits: &[Literal]) {
        if !self.ok {
            return;
        }
        self.cancel_until(0);
        let mut clause: Vec<Literal> = Vec::with_capacity(lits.len());
        for &lit in lits {
            assert!(
                (lit.var().index() as usize) <= self.num_vars,
                "literal {lit:?} on unknown variable"
            );
            match self.value(lit) {
                1 => return,
                0 => continue,
                _ => {}
            }
            if clause.contains(&!lit) {
                return;
            }
            if !clause.contains(&lit) {
                clause.push(lit);
            }
        }
        match clause.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(clause[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let index = self.clauses.len() as u32;
                self.clauses.push(Clause { lits: clause, learnt: false, lbd: 0, deleted: false });
                self.attach(index);
            }
        }
    }
}

/// Binary max-heap of variables keyed by activity.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl VarHeap {
    fn less(a: usize, b: usize, activity: &[f64]) -> bool {
        // Higher activity first; ties go to the lower index.
        activity[a] > activity[b] || (activity[a] == activity[b] && a < b)
    }

    fn insert(&mut self, v: usize, activity: &[f64]) {
        if self.position.len() <= v {
            self.position.resize(v + 1, None);
        }
        if self.position[v].is_some() {
            return;
        }
        self.heap.push(v);
        self.position[v] = Some(self.heap.len() - 1);
        self.sift_up(self.heap.len() - 1, activity);
    }

    fn increased(&mut self, v: usize, activity: &[f64]) {
        if let Some(Some(pos)) = self.position.get(v) {
            self.sift_up(*pos, activity);
        }
    }

    fn pop(&mut self, activity: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.position[top] = None;
        if !self.heap.is_empty() {
            self.position[self.heap[0]] = Some(0);
            self.sift_down(0, activity);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::less(self.heap[i], self.heap[parent], activity) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::less(self.heap[l], self.heap[best], activity) {
                best = l;
            }
            if r < self.heap.len() && Self::less(self.heap[r], self.heap[best], activity) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.position[self.heap[a]] = Some(a);
        self.position[self.heap[b]] = Some(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::solve;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v)
    }

    fn formula(num_vars: u32, clauses: &[&[i64]]) -> CnfFormula {
        let mut f = CnfFormula::with_vars(num_vars);
        for c in clauses {
            let lits: Vec<Literal> = c.iter().map(|&v| lit(v)).collect();
            f.add_clause(&lits);
        }
        f
    }

    #[test]
    fn unit_propagation_forces_model() {
        let f = formula(2, &[&[1, 2], &[-1]]);
        let model = solve(&f, &[], 0);
        let m = model.model().expect("sat");
        assert!(!m.value(SatVar::new(1)));
        assert!(m.value(SatVar::new(2)));
    }

    #[test]
    fn direct_contradiction() {
        assert_eq!(solve(&formula(1, &[&[1], &[-1]]), &[], 0), SatResult::Unsat);
    }

    #[test]
    fn assumptions_restrict_and_release() {
        let f = formula(2, &[&[1, 2]]);
        assert_eq!(solve(&f, &[lit(-1), lit(-2)], 0), SatResult::Unsat);
        let mut s = Solver::default();
        s.load(&f);
        assert_eq!(s.solve(&[lit(-1), lit(-2)]), SatResult::Unsat);
        // Failing under assumptions must not poison later calls.
        assert!(s.solve(&[lit(-1)]).is_sat());
        assert!(s.solve(&[]).is_sat());
    }

    #[test]
    fn incremental_clauses() {
        let mut s = Solver::default();
        let a = s.new_var();
        let b = s.new_var();
        s.add_clause(&[a.positive(), b.positive()]);
        assert!(s.solve(&[]).is_sat());
        s.add_clause(&[a.negative()]);
        s.add_clause(&[b.negative()]);
        assert_eq!(s.solve(&[]), SatResult::Unsat);
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p(i,j): pigeon i in hole j, var = 2*i + j + 1.
        let p = |i: i64, j: i64| 2 * i + j + 1;
        let mut clauses: Vec<Vec<i64>> = (0..3).map(|i| vec![p(i, 0), p(i, 1)]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    clauses.push(vec![-p(a, j), -p(b, j)]);
                }
            }
        }
        let refs: Vec<&[i64]> = clauses.iter().map(|c| c.as_slice()).collect();
        for heuristic in [Heuristic::Ordered, Heuristic::Vsids] {
            let mut s = Solver::new(SolverConfig { heuristic, ..SolverConfig::default() });
            s.load(&formula(6, &refs));
            assert_eq!(s.solve(&[]), SatResult::Unsat);
        }
    }

    #[test]
    fn learnt_clause_reduction_keeps_answers() {
        // Eight pigeons into seven holes needs far more learnt clauses than
        // the first reduction threshold.
        let (pigeons, holes) = (8i64, 7i64);
        let p = |i: i64, j: i64| holes * i + j + 1;
        let mut s = Solver::new(SolverConfig { seed: 3, heuristic: Heuristic::Vsids, restarts: true });
        s.reserve_var(SatVar::new((pigeons * holes) as u32));
        for i in 0..pigeons {
            s.add_clause(&(0..holes).map(|j| lit(p(i, j))).collect::<Vec<_>>());
        }
        for j in 0..holes {
            for a in 0..pigeons {
                for b in a + 1..pigeons {
                    s.add_clause(&[lit(-p(a, j)), lit(-p(b, j))]);
                }
            }
        }
        assert_eq!(s.solve(&[]), SatResult::Unsat);
        assert!(s.stats().learnt_clauses > FIRST_REDUCE as u64);
        assert!(s.clauses.iter().any(|c| c.deleted));
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }
}
