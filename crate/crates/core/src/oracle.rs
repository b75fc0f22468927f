//! Exhaustive solvers over all `2^m` project subsets.
//!
//! Subsets are visited by increasing cardinality and, within a cardinality,
//! in lexicographic order of their sorted index lists. Only strict
//! improvements replace the incumbent, so the reported optimum is the
//! smallest, then lexicographically first, among all optima.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Instance, ProjectSet, Valuation};
use crate::rational::Rational;

pub const ORACLE_MAX_PROJECTS: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub best: ProjectSet,
    pub objective: Rational,
    /// Number of subsets attaining the optimum.
    pub tie_count: usize,
}

/// Calls `f` on every `k`-subset of `0..m` as a bitmask, lexicographically.
pub(crate) fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(idx.iter().fold(0u64, |acc, &j| acc | 1 << j));
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for t in i + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}

/// Identical agents merged with a multiplicity, so large electorates with
/// repeated ballots stay cheap to enumerate.
struct AgentGroup<'a> {
    count: Rational,
    budget: &'a Rational,
    valuation: &'a Valuation,
}

fn group_agents(instance: &Instance) -> Vec<AgentGroup<'_>> {
    let mut index: HashMap<(&Rational, &Valuation), usize> = HashMap::new();
    let mut groups: Vec<(usize, &Rational, &Valuation)> = Vec::new();
    for a in &instance.agents {
        let key = (&a.budget, &a.valuation);
        match index.get(&key) {
            Some(&g) => groups[g].0 += 1,
            None => {
                index.insert(key, groups.len());
                groups.push((1, &a.budget, &a.valuation));
            }
        }
    }
    groups
        .into_iter()
        .map(|(c, budget, valuation)| AgentGroup { count: Rational::from_integer(c as i64), budget, valuation })
        .collect()
}

struct Totals {
    cost: Rational,
    value: Rational,
    extractable: Rational,
}

fn totals(groups: &[AgentGroup<'_>], costs: &[Rational], mask: u64) -> Totals {
    let mut cost = Rational::zero();
    let mut bits = mask;
    while bits != 0 {
        cost += &costs[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    let mut value = Rational::zero();
    let mut extractable = Rational::zero();
    for g in groups {
        let v = g.valuation.eval_mask(mask);
        if v.is_zero() {
            continue;
        }
        let capped = if &v < g.budget { v.clone() } else { g.budget.clone() };
        value += &g.count * &v;
        extractable += &g.count * &capped;
    }
    Totals { cost, value, extractable }
}

fn check_arity(instance: &Instance) -> Result<()> {
    let m = instance.num_projects();
    if m > ORACLE_MAX_PROJECTS {
        return Err(Error::TooManyProjects { projects: m, cap: ORACLE_MAX_PROJECTS });
    }
    for (agent, a) in instance.agents.iter().enumerate() {
        match &a.valuation {
            Valuation::SingleMinded { demand, .. } => {
                if let Some(top) = demand.max().filter(|&t| t >= m) {
                    return Err(Error::IndexOutOfRange { index: top, bound: m });
                }
            }
            v => {
                if v.arity() != Some(m) {
                    return Err(Error::ArityMismatch { agent, expected: m, found: v.arity().unwrap_or(0) });
                }
            }
        }
    }
    Ok(())
}

/// Maximises `objective` over subsets of projects that contain `required`;
/// `None` from the objective marks an infeasible subset.
fn search(
    instance: &Instance,
    required: u64,
    objective: impl Fn(&Totals) -> Option<Rational>,
) -> Result<Option<OracleResult>> {
    check_arity(instance)?;
    let m = instance.num_projects();
    let groups = group_agents(instance);
    let costs: Vec<Rational> = instance.costs().cloned().collect();
    let mut best: Option<(u64, Rational)> = None;
    let mut ties = 0usize;
    for k in 0..=m {
        for_each_combination(m, k, |mask| {
            if mask & required != required {
                return;
            }
            let Some(obj) = objective(&totals(&groups, &costs, mask)) else {
                return;
            };
            match &best {
                Some((_, b)) if &obj < b => {}
                Some((_, b)) if &obj == b => ties += 1,
                _ => {
                    best = Some((mask, obj));
                    ties = 1;
                }
            }
        });
    }
    Ok(best.map(|(mask, objective)| OracleResult { best: ProjectSet::from_mask(mask), objective, tie_count: ties }))
}

fn empty_set_infeasible() -> Error {
    Error::NegativeQuantity("the empty outcome is infeasible; budgets or valuations are invalid".into())
}

/// Welfare-optimal set among those whose cost fits the pooled budget.
pub fn brute_uwo(instance: &Instance) -> Result<OracleResult> {
    let pool = instance.total_budget();
    search(instance, 0, |t| (t.cost <= pool).then(|| &t.value - &t.cost))?.ok_or_else(empty_set_infeasible)
}

/// Welfare-optimal set among those fundable under weak participation.
pub fn brute_uwo_wp(instance: &Instance) -> Result<OracleResult> {
    search(instance, 0, |t| (t.extractable >= t.cost).then(|| &t.value - &t.cost))?.ok_or_else(empty_set_infeasible)
}

/// [`brute_uwo_wp`] restricted to supersets of `base`; `None` when no
/// superset is fundable.
pub fn brute_uwo_wp_containing(instance: &Instance, base: &ProjectSet) -> Result<Option<OracleResult>> {
    instance.check_set(base)?;
    let required = base.mask().ok_or(Error::TooManyProjects { projects: 64, cap: ORACLE_MAX_PROJECTS })?;
    search(instance, required, |t| (t.extractable >= t.cost).then(|| &t.value - &t.cost))
}

/// Maximum payment excess over all subsets (always at least zero).
pub fn brute_maxpe(instance: &Instance) -> Result<OracleResult> {
    Ok(search(instance, 0, |t| Some(&t.extractable - &t.cost))?.expect("every subset is feasible"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{enabler_pair, three_towns, uwo_wp_gap};
    use crate::model::{set, Instance};
    use crate::rational::q;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |m| seen.push(ProjectSet::from_mask(m)));
        let expect: Vec<ProjectSet> =
            [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]].into_iter().map(ProjectSet::from).collect();
        assert_eq!(seen, expect);
        let mut count = 0;
        for_each_combination(3, 0, |m| {
            assert_eq!(m, 0);
            count += 1
        });
        assert_eq!(count, 1);
        for_each_combination(2, 3, |_| panic!("no 3-subsets of 2 items"));
    }

    #[test]
    fn three_towns_optima() {
        let i = three_towns();
        let uwo = brute_uwo(&i).unwrap();
        assert_eq!((uwo.best, uwo.objective), (set([1, 2]), r(5)));
        let wp = brute_uwo_wp(&i).unwrap();
        assert_eq!((wp.best, wp.objective), (set([1, 2]), r(5)));
        let pe = brute_maxpe(&i).unwrap();
        assert_eq!((pe.best, pe.objective), (set([2]), r(3)));
    }

    #[test]
    fn enabler_pair_needs_the_enabler() {
        let wp = brute_uwo_wp(&enabler_pair(r(100), q(1, 100))).unwrap();
        assert_eq!((wp.best, wp.objective), (set([0, 3]), r(100)));
    }

    #[test]
    fn gap_between_uwo_and_uwo_wp() {
        let i = uwo_wp_gap();
        assert_eq!(brute_uwo(&i).unwrap().best, set([0]));
        let wp = brute_uwo_wp(&i).unwrap();
        assert_eq!((wp.best, wp.objective), (set([]), r(0)));
    }

    #[test]
    fn zero_budgets_fund_nothing() {
        let i = Instance::additive(vec![r(1), r(2)], vec![(r(0), vec![r(5), r(5)])]);
        let res = brute_uwo(&i).unwrap();
        assert_eq!((res.best, res.objective), (set([]), r(0)));
    }

    #[test]
    fn single_coverable_project() {
        let i = Instance::additive(vec![r(1)], vec![(r(1), vec![r(3)])]);
        let res = brute_uwo(&i).unwrap();
        assert_eq!((res.best, res.objective), (set([0]), r(2)));
    }

    #[test]
    fn partition_reduction_example() {
        let i = Instance::additive(vec![q(1, 2), q(1, 2), r(1)], vec![(r(2), vec![r(1), r(1), r(2)])]);
        let res = brute_maxpe(&i).unwrap();
        assert_eq!((res.best, res.objective), (set([2]), r(1)));
        // {2} and {0, 1} both reach excess 1
        assert_eq!(res.tie_count, 2);
    }

    #[test]
    fn ties_prefer_small_then_lexicographic() {
        // every nonempty subset has welfare 0 here
        let i = Instance::additive(vec![r(1), r(1)], vec![(r(5), vec![r(1), r(1)])]);
        let res = brute_uwo(&i).unwrap();
        assert_eq!(res.best, set([]));
        assert_eq!(res.tie_count, 4);
    }

    #[test]
    fn guard_and_containing() {
        let wide = Instance::additive(vec![r(0); 26], vec![]);
        assert!(matches!(brute_uwo(&wide), Err(Error::TooManyProjects { projects: 26, .. })));
        let i = three_towns();
        let res = brute_uwo_wp_containing(&i, &set([2])).unwrap().unwrap();
        assert_eq!(res.best, set([1, 2]));
        assert_eq!(brute_uwo_wp_containing(&i, &set([0])).unwrap(), None);
    }
}
