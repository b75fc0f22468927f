//! Welfare solvers: knapsack-based UWO, exact special cases, max-closure
//! MaxPE, the laminar single-minded FPTAS, and the greedy heuristic.

mod flow;
mod single_minded;
mod sukp;

pub use single_minded::{maxpe_single_minded, uwowp_laminar_fptas, MaxPe, MergedAgent, SingleMindedView};
pub use sukp::{sukp_laminar_fptas, SukpInstance, SukpSolution};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::knapsack::knapsack_fptas;
use crate::model::{
    budget_payments, payment_excess, social_welfare, wp_payments, Instance, Outcome, ProjectSet, SolveReport, Valuation,
};
use crate::rational::Rational;
use crate::reductions::uwo_to_knapsack;

pub(crate) fn check_epsilon(eps: &Rational) -> Result<()> {
    if eps.is_positive() && eps < &Rational::one() {
        Ok(())
    } else {
        Err(Error::BadEpsilon(eps.clone()))
    }
}

pub(crate) fn require_class(instance: &Instance, class: &'static str) -> Result<()> {
    if instance.all_of_class(class) {
        Ok(())
    } else {
        Err(Error::WrongValuationClass { expected: class })
    }
}

fn additive_values(instance: &Instance) -> Result<Vec<&[Rational]>> {
    instance
        .agents
        .iter()
        .enumerate()
        .map(|(agent, a)| match &a.valuation {
            Valuation::Additive(v) if v.len() == instance.num_projects() => Ok(v.as_slice()),
            Valuation::Additive(v) => {
                Err(Error::ArityMismatch { agent, expected: instance.num_projects(), found: v.len() })
            }
            _ => Err(Error::WrongValuationClass { expected: "additive" }),
        })
        .collect()
}

/// `sum_i v_ij - C_j` for every project.
fn project_welfare(instance: &Instance) -> Result<Vec<Rational>> {
    let values = additive_values(instance)?;
    Ok(instance
        .projects
        .iter()
        .enumerate()
        .map(|(j, p)| values.iter().map(|v| &v[j]).sum::<Rational>() - &p.cost)
        .collect())
}

fn budget_report(
    instance: &Instance,
    funded: ProjectSet,
    algorithm: &str,
    eps: Option<Rational>,
) -> Result<SolveReport> {
    let payments = budget_payments(instance, &funded)?;
    SolveReport::new(instance, Outcome { funded, payments }, algorithm, eps)
}

pub(crate) fn wp_report(
    instance: &Instance,
    funded: ProjectSet,
    algorithm: &str,
    eps: Option<Rational>,
) -> Result<SolveReport> {
    let payments = wp_payments(instance, &funded)?;
    SolveReport::new(instance, Outcome { funded, payments }, algorithm, eps)
}

/// `(1 - eps)`-approximate UWO for additive valuations via knapsack.
/// Payments fill budgets in agent order and need not be participatory.
pub fn uwo_additive_fptas(instance: &Instance, eps: &Rational) -> Result<SolveReport> {
    check_epsilon(eps)?;
    let reduced = uwo_to_knapsack(instance)?;
    let solution = knapsack_fptas(&reduced.knapsack, eps)?;
    let funded: ProjectSet = solution.chosen.iter().map(|&i| reduced.projects[i]).collect();
    budget_report(instance, funded, "uwo-fptas", Some(eps.clone()))
}

/// Exact UWO when every project costs the same: take projects by
/// decreasing welfare while welfare stays nonnegative and the pool allows.
pub fn uwo_identical_costs(instance: &Instance) -> Result<SolveReport> {
    let welfare = project_welfare(instance)?;
    let mut costs = instance.costs();
    if let Some(first) = costs.next() {
        if costs.any(|c| c != first) {
            return Err(Error::CostsNotIdentical);
        }
    }
    let mut order: Vec<usize> = (0..instance.num_projects()).collect();
    order.sort_by(|&a, &b| welfare[b].cmp(&welfare[a]).then(a.cmp(&b)));
    let pool = instance.total_budget();
    let mut spent = Rational::zero();
    let mut funded = ProjectSet::new();
    for j in order {
        let cost = &instance.projects[j].cost;
        if welfare[j].is_negative() || (&spent + cost) > pool {
            break;
        }
        spent += cost;
        funded.insert(j);
    }
    budget_report(instance, funded, "identical-costs", None)
}

/// Exact UWO-WP for symmetric valuations: the optimum is always a prefix
/// of the projects sorted by increasing cost.
pub fn symmetric_uwowp(instance: &Instance) -> Result<SolveReport> {
    require_class(instance, "symmetric")?;
    let m = instance.num_projects();
    for (agent, a) in instance.agents.iter().enumerate() {
        if a.valuation.arity() != Some(m) {
            return Err(Error::ArityMismatch { agent, expected: m, found: a.valuation.arity().unwrap_or(0) });
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| instance.projects[a].cost.cmp(&instance.projects[b].cost).then(a.cmp(&b)));
    let mut best = (0usize, Rational::zero());
    let mut cost = Rational::zero();
    for k in 1..=m {
        cost += &instance.projects[order[k - 1]].cost;
        let mut value = Rational::zero();
        let mut extractable = Rational::zero();
        for a in &instance.agents {
            let Valuation::Symmetric(by_count) = &a.valuation else { unreachable!("class checked") };
            extractable += Rational::min_of(&by_count[k], &a.budget);
            value += &by_count[k];
        }
        let welfare = value - &cost;
        if extractable >= cost && welfare > best.1 {
            best = (k, welfare);
        }
    }
    let funded: ProjectSet = order[..best.0].iter().copied().collect();
    wp_report(instance, funded, "symmetric", None)
}

/// Ranks projects by singleton bang per buck, then adds each in turn when
/// the result stays fundable under weak participation and welfare does not
/// drop.
pub fn greedy_uwowp(instance: &Instance) -> Result<SolveReport> {
    let m = instance.num_projects();
    let mut gain = Vec::with_capacity(m);
    for j in 0..m {
        let single = ProjectSet::from([j]);
        gain.push(social_welfare(instance, &single)?);
    }
    let cost = |j: usize| &instance.projects[j].cost;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let by_ratio = match (cost(a).is_zero(), cost(b).is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => (&gain[b] / cost(b)).cmp(&(&gain[a] / cost(a))),
        };
        by_ratio.then_with(|| cost(a).cmp(cost(b))).then(a.cmp(&b))
    });
    let mut funded = ProjectSet::new();
    let mut welfare = Rational::zero();
    for j in order {
        let mut next = funded.clone();
        next.insert(j);
        if payment_excess(instance, &next)?.is_negative() {
            continue;
        }
        let next_welfare = social_welfare(instance, &next)?;
        if next_welfare < welfare {
            continue;
        }
        funded = next;
        welfare = next_welfare;
    }
    wp_report(instance, funded, "greedy", None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{enabler_pair, three_towns};
    use crate::model::{set, Agent, Project};
    use crate::oracle::brute_uwo_wp;
    use crate::rational::q;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn uwo_fptas_examples() {
        let rep = uwo_additive_fptas(&three_towns(), &q(1, 10)).unwrap();
        assert_eq!((rep.outcome.funded.clone(), rep.welfare.clone()), (set([1, 2]), r(5)));
        assert!(rep.outcome.audit(&three_towns()).unwrap().within_budgets);

        let broke = Instance::additive(vec![r(1), r(1)], vec![(r(0), vec![r(3), r(3)])]);
        assert_eq!(uwo_additive_fptas(&broke, &q(1, 2)).unwrap().outcome.funded, set([]));

        let losing = Instance::additive(vec![r(5)], vec![(r(10), vec![r(2)])]);
        assert_eq!(uwo_additive_fptas(&losing, &q(1, 2)).unwrap().outcome.funded, set([]));

        assert!(matches!(uwo_additive_fptas(&three_towns(), &r(0)), Err(Error::BadEpsilon(_))));
    }

    #[test]
    fn identical_costs_examples() {
        let i = Instance::additive(vec![r(1); 3], vec![(r(2), vec![r(3), q(1, 2), r(2)])]);
        let rep = uwo_identical_costs(&i).unwrap();
        assert_eq!((rep.outcome.funded, rep.welfare), (set([0, 2]), r(3)));

        let losing = Instance::additive(vec![r(2); 2], vec![(r(9), vec![r(1), r(1)])]);
        assert_eq!(uwo_identical_costs(&losing).unwrap().outcome.funded, set([]));

        let rich = Instance::additive(vec![r(1); 3], vec![(r(9), vec![r(2), r(0), r(3)])]);
        assert_eq!(uwo_identical_costs(&rich).unwrap().outcome.funded, set([0, 2]));

        assert_eq!(uwo_identical_costs(&three_towns()), Err(Error::CostsNotIdentical));
    }

    fn symmetric(costs: &[i64], rows: &[(i64, &[i64])]) -> Instance {
        Instance::new(
            costs.iter().map(|&c| Project { name: None, cost: r(c) }).collect(),
            rows.iter()
                .map(|(b, row)| Agent {
                    budget: r(*b),
                    valuation: Valuation::Symmetric(row.iter().map(|&x| r(x)).collect()),
                })
                .collect(),
        )
    }

    #[test]
    fn symmetric_examples() {
        let i = symmetric(&[1, 2], &[(2, &[0, 2, 3]), (2, &[0, 1, 1])]);
        let rep = symmetric_uwowp(&i).unwrap();
        assert_eq!((rep.outcome.funded.clone(), rep.welfare), (set([0]), r(2)));
        assert_eq!(rep.outcome.payments, vec![r(1), r(0)]);

        let poor = symmetric(&[3], &[(1, &[0, 3])]);
        assert_eq!(symmetric_uwowp(&poor).unwrap().outcome.funded, set([]));

        let shared = symmetric(&[3], &[(1, &[0, 1]), (1, &[0, 1]), (1, &[0, 1])]);
        let rep = symmetric_uwowp(&shared).unwrap();
        // welfare 0 ties with the empty set, which wins
        assert_eq!(rep.outcome.funded, set([]));
        let mut one_more = shared.clone();
        one_more.agents[0].valuation = Valuation::Symmetric(vec![r(0), r(2)]);
        let rep = symmetric_uwowp(&one_more).unwrap();
        assert_eq!(rep.outcome.payments, vec![r(1), r(1), r(1)]);

        assert!(matches!(symmetric_uwowp(&three_towns()), Err(Error::WrongValuationClass { .. })));
    }

    #[test]
    fn greedy_examples() {
        let rep = greedy_uwowp(&three_towns()).unwrap();
        assert_eq!((rep.outcome.funded.clone(), rep.welfare.clone()), (set([1, 2]), r(5)));
        assert_eq!(rep.welfare, brute_uwo_wp(&three_towns()).unwrap().objective);

        let i = enabler_pair(r(100), q(1, 100));
        let rep = greedy_uwowp(&i).unwrap();
        let opt = brute_uwo_wp(&i).unwrap().objective;
        assert!(rep.excess >= r(0));
        assert!(rep.welfare < opt);

        let rep = greedy_uwowp(&Instance::default()).unwrap();
        assert_eq!(rep.outcome.funded, set([]));
    }
}
