use crate::error::{Error, Result};
use crate::knapsack::laminar_conflict_knapsack;
use crate::model::ProjectSet;
use crate::rational::Rational;
use crate::reductions::sukp_to_kcg;

/// Set-union knapsack: items are sets of elements, and the weight of a
/// selection is the total weight of the union of its sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SukpInstance {
    pub item_sets: Vec<ProjectSet>,
    pub item_values: Vec<Rational>,
    pub element_weights: Vec<Rational>,
    pub capacity: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SukpSolution {
    /// Chosen item indices, ascending.
    pub items: Vec<usize>,
    pub value: Rational,
    /// Weight of the union of the chosen sets.
    pub weight: Rational,
}

impl SukpInstance {
    /// Checks shapes and signs, and that the item sets cover every element.
    pub fn validate(&self) -> Result<()> {
        let n = self.item_sets.len();
        if self.item_values.len() != n {
            return Err(Error::InvalidSukp(format!("{n} item sets but {} values", self.item_values.len())));
        }
        if self.capacity.is_negative() {
            return Err(Error::CapacityNegative);
        }
        if self.item_values.iter().chain(&self.element_weights).any(Rational::is_negative) {
            return Err(Error::InvalidSukp("values and weights must be nonnegative".into()));
        }
        let universe = self.element_weights.len();
        let mut covered = vec![false; universe];
        for (i, s) in self.item_sets.iter().enumerate() {
            if let Some(top) = s.max().filter(|&t| t >= universe) {
                return Err(Error::InvalidSukp(format!("item {i} uses element {top} beyond {universe}")));
            }
            s.iter().for_each(|e| covered[e] = true);
        }
        if let Some(e) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidSukp(format!("element {e} belongs to no item")));
        }
        Ok(())
    }

    pub fn union_of(&self, items: &[usize]) -> ProjectSet {
        items.iter().fold(ProjectSet::new(), |acc, &i| acc.union(&self.item_sets[i]))
    }

    pub fn solution(&self, mut items: Vec<usize>) -> SukpSolution {
        items.sort_unstable();
        items.dedup();
        SukpSolution {
            value: items.iter().map(|&i| &self.item_values[i]).sum(),
            weight: self.union_of(&items).iter().map(|e| &self.element_weights[e]).sum(),
            items,
        }
    }
}

/// `(1 - eps)`-approximate set-union knapsack for laminar item sets;
/// `eps = 0` solves exactly. Every item whose set lies inside the chosen
/// union is included, which adds value without adding weight.
pub fn sukp_laminar_fptas(instance: &SukpInstance, eps: &Rational) -> Result<SukpSolution> {
    instance.validate()?;
    // empty sets weigh nothing but would conflict with every other item
    let (empty, used): (Vec<usize>, Vec<usize>) =
        (0..instance.item_sets.len()).partition(|&i| instance.item_sets[i].is_empty());
    let inner = SukpInstance {
        item_sets: used.iter().map(|&i| instance.item_sets[i].clone()).collect(),
        item_values: used.iter().map(|&i| instance.item_values[i].clone()).collect(),
        ..instance.clone()
    };
    let (kcg, forest) = sukp_to_kcg(&inner)?;
    let chosen = laminar_conflict_knapsack(&kcg, &forest, eps)?.chosen;
    let union = inner.union_of(&chosen);
    let mut items = empty;
    items.extend((0..used.len()).filter(|&i| inner.item_sets[i].is_subset(&union)).map(|i| used[i]));
    Ok(instance.solution(items))
}
