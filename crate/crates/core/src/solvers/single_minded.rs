use std::collections::HashMap;

use super::flow::FlowNetwork;
use super::{check_epsilon, wp_report};
use crate::error::{Error, Result};
use crate::knapsack::laminar_conflict_knapsack;
use crate::model::{Instance, ProjectSet, SolveReport, Valuation};
use crate::rational::Rational;
use crate::reductions::laminar_to_kcg;

/// Agents sharing one demand set, merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedAgent {
    pub demand: ProjectSet,
    /// Sum of the members' values.
    pub value: Rational,
    /// Sum of the members' budgets.
    pub budget: Rational,
    /// Sum of `min(budget, value)` over members: what the group can pay
    /// once its demand is funded.
    pub extractable: Rational,
}

/// Single-minded agents with identical demand sets merged, in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleMindedView {
    pub agents: Vec<MergedAgent>,
    /// Merged index of every original agent.
    pub origin: Vec<usize>,
}

impl SingleMindedView {
    pub fn from_instance(instance: &Instance) -> Result<Self> {
        let m = instance.num_projects();
        let mut index: HashMap<&ProjectSet, usize> = HashMap::new();
        let mut agents: Vec<MergedAgent> = Vec::new();
        let mut origin = Vec::with_capacity(instance.num_agents());
        for a in &instance.agents {
            let Valuation::SingleMinded { demand, value } = &a.valuation else {
                return Err(Error::WrongValuationClass { expected: "single_minded" });
            };
            if let Some(top) = demand.max().filter(|&t| t >= m) {
                return Err(Error::IndexOutOfRange { index: top, bound: m });
            }
            let extractable = Rational::min_of(&a.budget, value);
            let slot = *index.entry(demand).or_insert_with(|| {
                agents.push(MergedAgent {
                    demand: demand.clone(),
                    value: Rational::zero(),
                    budget: Rational::zero(),
                    extractable: Rational::zero(),
                });
                agents.len() - 1
            });
            let g = &mut agents[slot];
            g.value += value;
            g.budget += &a.budget;
            g.extractable += extractable;
            origin.push(slot);
        }
        Ok(SingleMindedView { agents, origin })
    }

    pub fn demands(&self) -> Vec<ProjectSet> {
        self.agents.iter().map(|a| a.demand.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPe {
    pub funded: ProjectSet,
    pub excess: Rational,
}

/// Maximum payment excess for single-minded agents as a maximum-closure
/// problem. Returns the smallest optimal project set.
pub fn maxpe_single_minded(instance: &Instance) -> Result<MaxPe> {
    let view = SingleMindedView::from_instance(instance)?;
    Ok(maxpe_of_view(&view, &instance.costs().cloned().collect::<Vec<_>>()))
}

pub(crate) fn maxpe_of_view(view: &SingleMindedView, costs: &[Rational]) -> MaxPe {
    let k = view.agents.len();
    let (source, sink) = (0, 1);
    let agent_node = |i: usize| 2 + i;
    let project_node = |j: usize| 2 + k + j;
    let mut net = FlowNetwork::new(2 + k + costs.len());
    let offered: Rational = view.agents.iter().map(|a| &a.extractable).sum();
    // exceeds every finite cut, so these arcs are never cut
    let unbounded = &offered + &Rational::one();
    for (i, a) in view.agents.iter().enumerate() {
        if a.extractable.is_zero() {
            continue;
        }
        net.add_edge(source, agent_node(i), a.extractable.clone());
        for j in a.demand.iter() {
            net.add_edge(agent_node(i), project_node(j), unbounded.clone());
        }
    }
    for (j, c) in costs.iter().enumerate() {
        if c.is_positive() {
            net.add_edge(project_node(j), sink, c.clone());
        }
    }
    let cut = net.max_flow(source, sink, &unbounded);
    let side = net.source_side(source);
    let funded: ProjectSet = (0..costs.len()).filter(|&j| side[project_node(j)]).collect();
    MaxPe { funded, excess: offered - cut }
}

/// `(1 - eps)`-approximate UWO-WP for single-minded agents whose demand
/// sets form a laminar family. The result always contains a MaxPE set.
pub fn uwowp_laminar_fptas(instance: &Instance, eps: &Rational) -> Result<SolveReport> {
    check_epsilon(eps)?;
    let view = SingleMindedView::from_instance(instance)?;
    let costs: Vec<Rational> = instance.costs().cloned().collect();
    let maxpe = maxpe_of_view(&view, &costs);
    let reduced = laminar_to_kcg(&view, &maxpe.funded, &maxpe.excess, &costs)?;
    let solution = laminar_conflict_knapsack(&reduced.kcg, &reduced.forest, eps)?;
    let mut funded = maxpe.funded;
    for node in solution.chosen {
        if let Some(agent) = reduced.node_agents[node] {
            funded = funded.union(&view.agents[agent].demand);
        }
    }
    wp_report(instance, funded, "laminar-fptas", Some(eps.clone()))
}
