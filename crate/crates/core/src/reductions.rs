//! Instance transformations: UWO to knapsack, the MaxPE gap construction,
//! hardness gadgets from PARTITION and exact cover by 3-sets, and the
//! conflict-graph knapsack encodings of laminar problems.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::knapsack::{KcgInstance, KnapsackInstance, LaminarForest};
use crate::model::{Agent, Instance, Project, ProjectSet, Valuation};
use crate::rational::{common_denominator, Rational};
use crate::solvers::{SingleMindedView, SukpInstance};

/// Integer knapsack equivalent to an additive UWO instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UwoKnapsack {
    pub knapsack: KnapsackInstance,
    /// Project behind each knapsack item.
    pub projects: Vec<usize>,
    /// Knapsack weights and capacity are costs and budgets times this.
    pub weight_scale: BigInt,
    /// Knapsack profits are clamped project welfare times this.
    pub profit_scale: BigInt,
}

fn to_i64(x: BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow)
}

/// Items are projects with weight `C_j`, profit `max(0, sum_i v_ij - C_j)`
/// and capacity `sum_i b_i`, each side scaled to integers.
pub fn uwo_to_knapsack(instance: &Instance) -> Result<UwoKnapsack> {
    let m = instance.num_projects();
    let mut welfare: Vec<Rational> = instance.costs().map(|c| -c).collect();
    for (agent, a) in instance.agents.iter().enumerate() {
        let Valuation::Additive(values) = &a.valuation else {
            return Err(Error::WrongValuationClass { expected: "additive" });
        };
        if values.len() != m {
            return Err(Error::ArityMismatch { agent, expected: m, found: values.len() });
        }
        for (w, v) in welfare.iter_mut().zip(values) {
            *w += v;
        }
    }
    let profits: Vec<Rational> = welfare.into_iter().map(|w| Rational::max_of(&w, &Rational::zero())).collect();
    let pool = instance.total_budget();
    let weight_scale = common_denominator(instance.costs().chain(std::iter::once(&pool)));
    let profit_scale = common_denominator(profits.iter());
    let scale = |x: &Rational, d: &BigInt| to_i64(x.numer() * (d / x.denom()));
    Ok(UwoKnapsack {
        knapsack: KnapsackInstance {
            weights: instance.costs().map(|c| scale(c, &weight_scale)).collect::<Result<_>>()?,
            profits: profits.iter().map(|p| scale(p, &profit_scale)).collect::<Result<_>>()?,
            capacity: scale(&pool, &weight_scale)?,
        },
        projects: (0..m).collect(),
        weight_scale,
        profit_scale,
    })
}

/// Adds, at index 0, a project costing `t` and a budgetless agent who
/// values only that project, at `2 * gap_factor * sum_i v_i(M)`. The
/// welfare-optimal participatory outcome of the result reaches that value
/// exactly when the original instance has payment excess at least `t`.
pub fn gap_transform(instance: &Instance, t: &Rational, gap_factor: &Rational) -> Result<Instance> {
    if t.is_negative() {
        return Err(Error::NegativeQuantity(format!("threshold {t}")));
    }
    if !gap_factor.is_positive() {
        return Err(Error::NegativeQuantity(format!("gap factor {gap_factor} must be positive")));
    }
    let all = instance.all_projects();
    let total_value: Rational = instance.values_of(&all)?.iter().sum();
    let m = instance.num_projects();
    let mut agents = Vec::with_capacity(instance.num_agents() + 1);
    let mut prize = vec![Rational::zero(); m + 1];
    prize[0] = Rational::from_integer(2) * gap_factor * total_value;
    agents.push(Agent { budget: Rational::zero(), valuation: Valuation::Additive(prize) });
    for a in &instance.agents {
        let valuation = match &a.valuation {
            Valuation::Additive(v) => {
                Valuation::Additive(std::iter::once(Rational::zero()).chain(v.iter().cloned()).collect())
            }
            Valuation::SingleMinded { demand, value } => {
                Valuation::SingleMinded { demand: demand.iter().map(|j| j + 1).collect(), value: value.clone() }
            }
            Valuation::Table(entries) => {
                if m + 1 > crate::model::TABLE_MAX_PROJECTS {
                    return Err(Error::TableTooLarge { projects: m + 1, cap: crate::model::TABLE_MAX_PROJECTS });
                }
                Valuation::Table((0..entries.len() * 2).map(|mask| entries[mask >> 1].clone()).collect())
            }
            Valuation::Symmetric(_) => {
                return Err(Error::WrongValuationClass { expected: "additive, single_minded, or table" });
            }
        };
        agents.push(Agent { budget: a.budget.clone(), valuation });
    }
    let mut projects = vec![Project { name: None, cost: t.clone() }];
    projects.extend(instance.projects.iter().cloned());
    Ok(Instance::new(projects, agents))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionInstance {
    pub values: Vec<u64>,
}

/// One agent with `v_i = a_i`, budget `sum(a) / 2`, and costs `a_i / 2`.
/// The threshold is `sum(a) / 4`, reached exactly when some subset of `a`
/// sums to half the total.
pub fn partition_to_maxpe(p: &PartitionInstance) -> (Instance, Rational) {
    let total: u128 = p.values.iter().map(|&a| a as u128).sum();
    let big = |x: u128| Rational::from(BigInt::from(x));
    let half = big(total) / Rational::from_integer(2);
    let instance = Instance::new(
        p.values.iter().map(|&a| Project { name: None, cost: big(a as u128) / Rational::from_integer(2) }).collect(),
        vec![Agent {
            budget: half.clone(),
            valuation: Valuation::Additive(p.values.iter().map(|&a| big(a as u128)).collect()),
        }],
    );
    (instance, half / Rational::from_integer(2))
}

/// Exact cover by 3-sets over elements `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cInstance {
    pub universe: usize,
    pub triples: Vec<[usize; 3]>,
}

/// One agent per element with budget `1/3 + 1/n`, one unit-cost project per
/// triple, and value `1/3 + 1/n` for each triple holding the element. An
/// exact cover exists exactly when the maximum payment excess is at least 1.
pub fn x3c_to_maxpe(x: &X3cInstance) -> Result<Instance> {
    let n = x.universe;
    if n % 3 != 0 || n == 0 {
        return Err(Error::UniverseNotDivisibleBy3(n));
    }
    for (k, t) in x.triples.iter().enumerate() {
        if let Some(&e) = t.iter().find(|&&e| e >= n) {
            return Err(Error::IndexOutOfRange { index: e, bound: n });
        }
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(Error::InvalidTriple(k));
        }
    }
    let share = Rational::new(1, 3) + Rational::new(1, n as i64);
    let agents = (0..n)
        .map(|e| Agent {
            budget: share.clone(),
            valuation: Valuation::Additive(
                x.triples.iter().map(|t| if t.contains(&e) { share.clone() } else { Rational::zero() }).collect(),
            ),
        })
        .collect();
    let projects = x.triples.iter().map(|_| Project { name: None, cost: Rational::one() }).collect();
    Ok(Instance::new(projects, agents))
}

/// Conflict-graph knapsack encoding of a laminar single-minded UWO-WP
/// instance around a MaxPE set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarKcg {
    pub kcg: KcgInstance,
    pub forest: LaminarForest,
    /// Merged agent behind each node; node 0 stands for the MaxPE set itself.
    pub node_agents: Vec<Option<usize>>,
}

/// Node 0 carries the welfare of `q` at zero weight. Node `i + 1` stands
/// for adding merged agent `i`'s demand: its profit is the value it
/// unlocks minus the new cost, and its weight is the new cost minus what
/// the agents inside it can pay. The capacity is the excess of `q`, and
/// nodes conflict when their demand sets are nested.
pub fn laminar_to_kcg(
    view: &SingleMindedView,
    q: &ProjectSet,
    q_excess: &Rational,
    costs: &[Rational],
) -> Result<LaminarKcg> {
    let demands = view.demands();
    let forest = LaminarForest::from_family(&demands)?.with_isolated_prefix(1);
    let cost_of = |s: &ProjectSet| s.iter().map(|j| &costs[j]).sum::<Rational>();
    // agents not already served by q
    let open: Vec<usize> = (0..view.agents.len()).filter(|&i| !demands[i].is_subset(q)).collect();
    let served_value: Rational =
        (0..view.agents.len()).filter(|&i| demands[i].is_subset(q)).map(|i| &view.agents[i].value).sum();

    let mut profits = vec![served_value - cost_of(q)];
    let mut weights = vec![Rational::zero()];
    for d in &demands {
        let added = cost_of(&d.difference(q));
        let with_q = d.union(q);
        let unlocked: Rational =
            open.iter().filter(|&&j| demands[j].is_subset(&with_q)).map(|&j| &view.agents[j].value).sum();
        let paid: Rational =
            open.iter().filter(|&&j| demands[j].is_subset(d)).map(|&j| &view.agents[j].extractable).sum();
        profits.push(unlocked - &added);
        weights.push(added - paid);
    }
    let mut node_agents = vec![None];
    node_agents.extend((0..demands.len()).map(Some));
    Ok(LaminarKcg {
        kcg: KcgInstance { graph: forest.conflict_graph(), profits, weights, capacity: q_excess.clone() },
        forest,
        node_agents,
    })
}

/// Item `i` becomes a node with profit `sum of v_j over L_j inside L_i` and
/// weight `w(L_i)`; nested item sets conflict.
pub fn sukp_to_kcg(s: &SukpInstance) -> Result<(KcgInstance, LaminarForest)> {
    s.validate()?;
    let forest = LaminarForest::from_family(&s.item_sets)?;
    let profits = s
        .item_sets
        .iter()
        .map(|li| s.item_sets.iter().zip(&s.item_values).filter(|(lj, _)| lj.is_subset(li)).map(|(_, v)| v).sum())
        .collect();
    let weights = s.item_sets.iter().map(|li| li.iter().map(|e| &s.element_weights[e]).sum()).collect();
    let kcg = KcgInstance { graph: forest.conflict_graph(), profits, weights, capacity: s.capacity.clone() };
    Ok((kcg, forest))
}
