//! Instances, valuations, outcomes, and the feasibility / participation /
//! welfare primitives that every solver shares.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest project count a [`Valuation::Table`] may span.
pub const TABLE_MAX_PROJECTS: usize = 20;

/// A sorted, duplicate-free set of project (or element) indices.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct ProjectSet(Vec<usize>);

impl ProjectSet {
    pub fn new() -> ProjectSet {
        ProjectSet(Vec::new())
    }

    pub fn from_mask(mask: u64) -> ProjectSet {
        ProjectSet((0..64).filter(|j| mask >> j & 1 == 1).collect())
    }

    /// Bitmask form; `None` when an index does not fit in 64 bits.
    pub fn mask(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &j| (j < 64).then(|| acc | 1 << j))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn insert(&mut self, j: usize) -> bool {
        match self.0.binary_search(&j) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, j);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &ProjectSet) -> bool {
        self.len() <= other.len() && self.iter().all(|j| other.contains(j))
    }

    pub fn is_disjoint(&self, other: &ProjectSet) -> bool {
        self.iter().all(|j| !other.contains(j))
    }

    pub fn union(&self, other: &ProjectSet) -> ProjectSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn difference(&self, other: &ProjectSet) -> ProjectSet {
        self.iter().filter(|&j| !other.contains(j)).collect()
    }
}

impl From<Vec<usize>> for ProjectSet {
    fn from(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        ProjectSet(v)
    }
}

impl From<ProjectSet> for Vec<usize> {
    fn from(s: ProjectSet) -> Self {
        s.0
    }
}

impl FromIterator<usize> for ProjectSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ProjectSet::from(iter.into_iter().collect::<Vec<_>>())
    }
}

impl<const N: usize> From<[usize; N]> for ProjectSet {
    fn from(a: [usize; N]) -> Self {
        ProjectSet::from(a.to_vec())
    }
}

impl fmt::Debug for ProjectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// How an agent values bundles of projects.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Valuation {
    /// `v(W) = sum of values[j] for j in W`.
    Additive(Vec<Rational>),
    /// `v(W) = value` when `demand` is a subset of `W`, else zero.
    SingleMinded { demand: ProjectSet, value: Rational },
    /// `v(W) = by_count[|W|]`.
    Symmetric(Vec<Rational>),
    /// Explicit value for every subset, indexed by bitmask (bit `j` = project `j`).
    Table(Vec<Rational>),
}

impl Valuation {
    pub fn class(&self) -> &'static str {
        match self {
            Valuation::Additive(_) => "additive",
            Valuation::SingleMinded { .. } => "single_minded",
            Valuation::Symmetric(_) => "symmetric",
            Valuation::Table(_) => "table",
        }
    }

    /// Project count implied by the variant's shape, when it has one.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Valuation::Additive(v) => Some(v.len()),
            Valuation::SingleMinded { .. } => None,
            Valuation::Symmetric(v) => v.len().checked_sub(1),
            Valuation::Table(v) => v.len().is_power_of_two().then(|| v.len().trailing_zeros() as usize),
        }
    }

    /// Value of `w`; indices beyond the variant's arity are rejected.
    pub fn eval(&self, w: &ProjectSet) -> Result<Rational> {
        if let (Some(m), Some(top)) = (self.arity(), w.max()) {
            if top >= m {
                return Err(Error::IndexOutOfRange { index: top, bound: m });
            }
        }
        Ok(match self {
            Valuation::Additive(v) => w.iter().map(|j| &v[j]).sum(),
            Valuation::SingleMinded { demand, value } => {
                if demand.is_subset(w) {
                    value.clone()
                } else {
                    Rational::zero()
                }
            }
            Valuation::Symmetric(v) => v[w.len()].clone(),
            Valuation::Table(v) => v[w.mask().expect("table arity is at most 20") as usize].clone(),
        })
    }

    /// Same as [`Valuation::eval`] for a bitmask over at most 64 projects.
    /// The caller guarantees the mask is in range.
    pub fn eval_mask(&self, mask: u64) -> Rational {
        match self {
            Valuation::Additive(v) => {
                let mut acc = Rational::zero();
                let mut bits = mask;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    acc += &v[j];
                    bits &= bits - 1;
                }
                acc
            }
            Valuation::SingleMinded { demand, value } => {
                let d = demand.mask().unwrap_or(u64::MAX);
                if d & mask == d {
                    value.clone()
                } else {
                    Rational::zero()
                }
            }
            Valuation::Symmetric(v) => v[mask.count_ones() as usize].clone(),
            Valuation::Table(v) => v[mask as usize].clone(),
        }
    }

    /// Largest increase in value that adding project `j` to any bundle over
    /// `m` projects can produce. Equals `v({j})` for additive valuations.
    pub fn max_marginal(&self, j: usize, m: usize) -> Rational {
        match self {
            Valuation::Additive(v) => v[j].clone(),
            Valuation::SingleMinded { demand, value } => {
                if demand.contains(j) {
                    value.clone()
                } else {
                    Rational::zero()
                }
            }
            Valuation::Symmetric(v) => v.windows(2).map(|w| &w[1] - &w[0]).max().unwrap_or_default(),
            Valuation::Table(v) => {
                (0..1usize << m).filter(|s| s >> j & 1 == 0).map(|s| &v[s | 1 << j] - &v[s]).max().unwrap_or_default()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub name: Option<String>,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub budget: Rational,
    pub valuation: Valuation,
}

/// Agents with private budgets and valuations, and costly projects.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Instance {
    pub projects: Vec<Project>,
    pub agents: Vec<Agent>,
}

impl Instance {
    pub fn new(projects: Vec<Project>, agents: Vec<Agent>) -> Instance {
        Instance { projects, agents }
    }

    /// Unnamed projects with the given costs and additive agents.
    pub fn additive(costs: Vec<Rational>, agents: Vec<(Rational, Vec<Rational>)>) -> Instance {
        Instance {
            projects: costs.into_iter().map(|cost| Project { name: None, cost }).collect(),
            agents: agents
                .into_iter()
                .map(|(budget, values)| Agent { budget, valuation: Valuation::Additive(values) })
                .collect(),
        }
    }

    pub fn num_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn costs(&self) -> impl Iterator<Item = &Rational> {
        self.projects.iter().map(|p| &p.cost)
    }

    pub fn cost_of(&self, w: &ProjectSet) -> Rational {
        w.iter().map(|j| &self.projects[j].cost).sum()
    }

    pub fn total_budget(&self) -> Rational {
        self.agents.iter().map(|a| &a.budget).sum()
    }

    pub fn all_projects(&self) -> ProjectSet {
        (0..self.num_projects()).collect()
    }

    pub fn all_of_class(&self, class: &str) -> bool {
        self.agents.iter().all(|a| a.valuation.class() == class)
    }

    pub(crate) fn check_set(&self, w: &ProjectSet) -> Result<()> {
        match w.max() {
            Some(top) if top >= self.num_projects() => {
                Err(Error::IndexOutOfRange { index: top, bound: self.num_projects() })
            }
            _ => Ok(()),
        }
    }

    /// Per-agent values of `w`.
    pub fn values_of(&self, w: &ProjectSet) -> Result<Vec<Rational>> {
        self.check_set(w)?;
        self.agents.iter().map(|a| a.valuation.eval(w)).collect()
    }
}

/// A funded project set together with a payment per agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub funded: ProjectSet,
    pub payments: Vec<Rational>,
}

/// Which outcome properties hold for a given instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeAudit {
    pub nonnegative: bool,
    pub within_budgets: bool,
    pub budget_balanced: bool,
    pub weak_participation: bool,
}

impl OutcomeAudit {
    /// Feasible, budget balanced, and weakly participating.
    pub fn all(&self) -> bool {
        self.nonnegative && self.within_budgets && self.budget_balanced && self.weak_participation
    }
}

impl Outcome {
    pub fn audit(&self, instance: &Instance) -> Result<OutcomeAudit> {
        if self.payments.len() != instance.num_agents() {
            return Err(Error::ArityMismatch { agent: 0, expected: instance.num_agents(), found: self.payments.len() });
        }
        let values = instance.values_of(&self.funded)?;
        let paid: Rational = self.payments.iter().sum();
        Ok(OutcomeAudit {
            nonnegative: self.payments.iter().all(|x| !x.is_negative()),
            within_budgets: self.payments.iter().zip(&instance.agents).all(|(x, a)| x <= &a.budget),
            budget_balanced: paid == instance.cost_of(&self.funded),
            weak_participation: self.payments.iter().zip(&values).all(|(x, v)| x <= v),
        })
    }
}

/// Solver output with its welfare and payment excess precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<Rational>,
    pub outcome: Outcome,
    pub welfare: Rational,
    pub excess: Rational,
}

impl SolveReport {
    pub fn new(
        instance: &Instance,
        outcome: Outcome,
        algorithm: &str,
        epsilon: Option<Rational>,
    ) -> Result<SolveReport> {
        let welfare = social_welfare(instance, &outcome.funded)?;
        let excess = payment_excess(instance, &outcome.funded)?;
        Ok(SolveReport { algorithm: algorithm.to_string(), epsilon, outcome, welfare, excess })
    }
}

/// Result of [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validated {
    pub instance: Instance,
    /// Original index of every surviving project, in order.
    pub kept: Vec<usize>,
    /// Original indices of removed projects.
    pub dropped: Vec<usize>,
}

fn nonneg(x: &Rational, what: impl FnOnce() -> String) -> Result<()> {
    if x.is_negative() {
        Err(Error::NegativeQuantity(what()))
    } else {
        Ok(())
    }
}

fn check_valuation(agent: usize, v: &Valuation, m: usize) -> Result<()> {
    let arity_err = |expected, found| Error::ArityMismatch { agent, expected, found };
    match v {
        Valuation::Additive(values) => {
            if values.len() != m {
                return Err(arity_err(m, values.len()));
            }
            for (j, x) in values.iter().enumerate() {
                nonneg(x, || format!("agents[{agent}].values[{j}]"))?;
            }
        }
        Valuation::SingleMinded { demand, value } => {
            if let Some(top) = demand.max().filter(|&t| t >= m) {
                return Err(Error::IndexOutOfRange { index: top, bound: m });
            }
            nonneg(value, || format!("agents[{agent}].value"))?;
        }
        Valuation::Symmetric(by_count) => {
            if by_count.len() != m + 1 {
                return Err(arity_err(m + 1, by_count.len()));
            }
            if !by_count[0].is_zero() || by_count.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::NonMonotoneValuation { agent });
            }
        }
        Valuation::Table(entries) => {
            if m > TABLE_MAX_PROJECTS {
                return Err(Error::TableTooLarge { projects: m, cap: TABLE_MAX_PROJECTS });
            }
            if entries.len() != 1 << m {
                return Err(arity_err(1 << m, entries.len()));
            }
            for (s, x) in entries.iter().enumerate() {
                nonneg(x, || format!("agents[{agent}].entries[{s}]"))?;
            }
            let monotone = entries[0].is_zero()
                && (0..entries.len()).all(|s| (0..m).all(|j| s >> j & 1 == 1 || entries[s] <= entries[s | 1 << j]));
            if !monotone {
                return Err(Error::NonMonotoneValuation { agent });
            }
        }
    }
    Ok(())
}

fn restrict_valuation(v: &Valuation, kept: &[usize], m: usize) -> Valuation {
    match v {
        Valuation::Additive(values) => Valuation::Additive(kept.iter().map(|&j| values[j].clone()).collect()),
        Valuation::SingleMinded { demand, value } => {
            let position = |j: usize| kept.binary_search(&j).ok();
            let remapped: Option<ProjectSet> = demand.iter().map(position).collect::<Option<Vec<_>>>().map(Into::into);
            match remapped {
                Some(d) => Valuation::SingleMinded { demand: d, value: value.clone() },
                // the demand can no longer be met
                None => Valuation::SingleMinded {
                    demand: demand.iter().filter_map(position).collect(),
                    value: Rational::zero(),
                },
            }
        }
        Valuation::Symmetric(by_count) => Valuation::Symmetric(by_count[..=kept.len()].to_vec()),
        Valuation::Table(entries) => {
            debug_assert!(m <= TABLE_MAX_PROJECTS);
            Valuation::Table(
                (0..1usize << kept.len())
                    .map(|s| {
                        let old = kept
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| s >> i & 1 == 1)
                            .fold(0, |acc, (_, &j)| acc | 1 << j);
                        entries[old].clone()
                    })
                    .collect(),
            )
        }
    }
}

/// Checks shape, signs, and monotonicity, then handles projects whose
/// cost exceeds the most value they could ever add.
///
/// A project `j` is uncoverable when the agents' summed largest marginal value
/// for `j` is below its cost (for additive agents this is `sum_i v_i({j})`).
/// Such a project lowers welfare and excess in every bundle containing it.
/// With `drop_uncoverable` those projects are removed and the remaining ones
/// re-indexed; otherwise the first one is reported as an error.
pub fn validate_instance(raw: &Instance, drop_uncoverable: bool) -> Result<Validated> {
    let m = raw.num_projects();
    for (j, p) in raw.projects.iter().enumerate() {
        nonneg(&p.cost, || format!("projects[{j}].cost"))?;
    }
    for (i, a) in raw.agents.iter().enumerate() {
        nonneg(&a.budget, || format!("agents[{i}].budget"))?;
        check_valuation(i, &a.valuation, m)?;
    }

    let mut kept = Vec::with_capacity(m);
    let mut dropped = Vec::new();
    for (j, p) in raw.projects.iter().enumerate() {
        let value: Rational = raw.agents.iter().map(|a| a.valuation.max_marginal(j, m)).sum();
        if value >= p.cost {
            kept.push(j);
        } else if drop_uncoverable {
            log::warn!("dropping project {j}: total value {value} is below cost {}", p.cost);
            dropped.push(j);
        } else {
            return Err(Error::UncoverableProject {
                project: j,
                value: Box::new(value),
                cost: Box::new(p.cost.clone()),
            });
        }
    }

    if dropped.is_empty() {
        return Ok(Validated { instance: raw.clone(), kept, dropped });
    }
    let instance = Instance {
        projects: kept.iter().map(|&j| raw.projects[j].clone()).collect(),
        agents: raw
            .agents
            .iter()
            .map(|a| Agent { budget: a.budget.clone(), valuation: restrict_valuation(&a.valuation, &kept, m) })
            .collect(),
    };
    Ok(Validated { instance, kept, dropped })
}

pub fn eval_valuation(v: &Valuation, w: &ProjectSet) -> Result<Rational> {
    v.eval(w)
}

/// `sum_i v_i(W) - C(W)`; may be negative.
pub fn social_welfare(instance: &Instance, w: &ProjectSet) -> Result<Rational> {
    let values = instance.values_of(w)?;
    Ok(values.iter().sum::<Rational>() - instance.cost_of(w))
}

/// `PE(W) = sum_i min(b_i, v_i(W)) - C(W)`. `W` can be funded feasibly with
/// weak participation exactly when this is nonnegative.
pub fn payment_excess(instance: &Instance, w: &ProjectSet) -> Result<Rational> {
    let values = instance.values_of(w)?;
    let extractable: Rational = values.iter().zip(&instance.agents).map(|(v, a)| Rational::min_of(v, &a.budget)).sum();
    Ok(extractable - instance.cost_of(w))
}

/// Fills `total` from the per-agent caps in agent order; the agent that
/// reaches the total pays only the remainder and later agents pay nothing.
/// The caller guarantees the caps sum to at least `total`.
fn prefix_fill(caps: impl Iterator<Item = Rational>, total: &Rational) -> Vec<Rational> {
    let mut remaining = total.clone();
    caps.map(|cap| {
        let pay = if remaining.is_positive() { Rational::min_of(&cap, &remaining) } else { Rational::zero() };
        remaining -= &pay;
        pay
    })
    .collect()
}

/// Budget-balanced payments with `x_i <= min(b_i, v_i(W))`, filled in agent
/// order.
pub fn wp_payments(instance: &Instance, w: &ProjectSet) -> Result<Vec<Rational>> {
    let excess = payment_excess(instance, w)?;
    if excess.is_negative() {
        return Err(Error::NotWpFundable { excess });
    }
    let values = instance.values_of(w)?;
    let caps = values.into_iter().zip(&instance.agents).map(|(v, a)| Rational::min_of(&v, &a.budget));
    Ok(prefix_fill(caps, &instance.cost_of(w)))
}

/// Budget-balanced payments with `x_i <= b_i` only (no participation
/// guarantee), filled in agent order. Used for welfare-only outcomes.
pub fn budget_payments(instance: &Instance, w: &ProjectSet) -> Result<Vec<Rational>> {
    instance.check_set(w)?;
    let cost = instance.cost_of(w);
    let total = instance.total_budget();
    if cost > total {
        return Err(Error::NotWpFundable { excess: total - cost });
    }
    Ok(prefix_fill(instance.agents.iter().map(|a| a.budget.clone()), &cost))
}

/// `u_i = v_i(W) - x_i`.
pub fn agent_utility(instance: &Instance, outcome: &Outcome, agent: usize) -> Result<Rational> {
    let a = instance.agents.get(agent).ok_or(Error::IndexOutOfRange { index: agent, bound: instance.num_agents() })?;
    let pay =
        outcome.payments.get(agent).ok_or(Error::IndexOutOfRange { index: agent, bound: outcome.payments.len() })?;
    instance.check_set(&outcome.funded)?;
    Ok(a.valuation.eval(&outcome.funded)? - pay)
}

/// Collects a set from an iterator of indices.
pub fn set<I: IntoIterator<Item = usize>>(items: I) -> ProjectSet {
    items.into_iter().collect()
}

/// First crossing pair, if any: two sets that are neither disjoint nor nested.
pub(crate) fn first_crossing_pair(sets: &[ProjectSet]) -> std::result::Result<(), (usize, usize)> {
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let (x, y) = (&sets[a], &sets[b]);
            if !(x.is_disjoint(y) || x.is_subset(y) || y.is_subset(x)) {
                return Err((a, b));
            }
        }
    }
    Ok(())
}
