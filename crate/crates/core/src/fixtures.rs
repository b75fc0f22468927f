//! Small hand-built instances used by tests, documentation, and the CLI.

use crate::model::{Agent, Instance, Project, ProjectSet, Valuation};
use crate::rational::Rational;

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn named(names: &[&str], costs: &[i64]) -> Vec<Project> {
    names.iter().zip(costs).map(|(n, &c)| Project { name: Some((*n).to_string()), cost: r(c) }).collect()
}

fn additive(budget: i64, values: &[i64]) -> Agent {
    Agent { budget: r(budget), valuation: Valuation::Additive(values.iter().map(|&v| r(v)).collect()) }
}

/// Three towns and three projects: hall (cost 5), shelter (4), pool (2).
pub fn three_towns() -> Instance {
    Instance::new(
        named(&["hall", "shelter", "pool"], &[5, 4, 2]),
        vec![additive(2, &[2, 1, 2]), additive(3, &[1, 2, 2]), additive(1, &[4, 3, 1])],
    )
}

/// Two agents where the only high-welfare outcome needs a low-value enabler.
/// `eps` sets agent 1's value for P3 to `2 - eps`; `h` is agent 2's value for P1.
pub fn enabler_pair(h: Rational, eps: Rational) -> Instance {
    Instance::new(
        named(&["P1", "P2", "P3", "P4"], &[1, 2, 1, 1]),
        vec![
            Agent { budget: r(2), valuation: Valuation::Additive(vec![r(0), r(20), r(2) - eps, r(2)]) },
            Agent { budget: r(0), valuation: Valuation::Additive(vec![h, r(0), r(20), r(0)]) },
        ],
    )
}

/// One project that the only interested agent cannot pay for.
pub fn uwo_wp_gap() -> Instance {
    Instance::new(named(&["P1"], &[1]), vec![additive(0, &[2]), additive(1, &[0])])
}

fn single_minded(budget: i64, demand: &[usize], value: i64) -> Agent {
    Agent {
        budget: r(budget),
        valuation: Valuation::SingleMinded { demand: ProjectSet::from(demand.to_vec()), value: r(value) },
    }
}

/// Laminar single-minded instance: costs (2, 1, 4), demands {1}, {0, 1}, {2}.
pub fn laminar_example() -> Instance {
    Instance::new(
        named(&["a", "b", "c"], &[2, 1, 4]),
        vec![single_minded(1, &[1], 3), single_minded(2, &[0, 1], 4), single_minded(5, &[2], 6)],
    )
}

/// Five nested/disjoint demand sets over five unit-cost projects:
/// D1 = {0,1,2,3} holds D2 = {0,1} (which holds D4 = {0}) and D3 = {2};
/// D5 = {4} is disjoint from the rest. Every agent has unit value and budget.
pub fn nested_family() -> Vec<ProjectSet> {
    vec![
        ProjectSet::from([0, 1, 2, 3]),
        ProjectSet::from([0, 1]),
        ProjectSet::from([2]),
        ProjectSet::from([0]),
        ProjectSet::from([4]),
    ]
}

pub fn nested_instance() -> Instance {
    Instance::new(
        named(&["p0", "p1", "p2", "p3", "p4"], &[1, 1, 1, 1, 1]),
        nested_family()
            .into_iter()
            .map(|d| Agent { budget: r(1), valuation: Valuation::SingleMinded { demand: d, value: r(1) } })
            .collect(),
    )
}
