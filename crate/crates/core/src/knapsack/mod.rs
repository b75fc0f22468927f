//! Knapsack engines: the classical 0/1 problem (exact and FPTAS), knapsack
//! with a laminar containment conflict graph, and chordality recognition.

mod chordal;
mod laminar;

pub use chordal::{is_chordal, perfect_elimination_order, verify_elimination_order};
pub use laminar::{
    containment_graph, laminar_conflict_knapsack, ConflictGraph, KcgInstance, KcgSolution, LaminarForest,
};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Upper bound on DP cells (items x profit levels) before refusing to allocate.
pub const MAX_DP_CELLS: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    pub weights: Vec<i64>,
    pub profits: Vec<i64>,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackSolution {
    /// Chosen item indices, ascending.
    pub chosen: Vec<usize>,
    pub profit: i128,
    pub weight: i128,
}

impl KnapsackInstance {
    fn validate(&self) -> Result<()> {
        if self.weights.len() != self.profits.len() {
            return Err(Error::InvalidKnapsack(format!(
                "{} weights but {} profits",
                self.weights.len(),
                self.profits.len()
            )));
        }
        if self.capacity < 0 {
            return Err(Error::CapacityNegative);
        }
        if let Some(i) = (0..self.weights.len()).find(|&i| self.weights[i] < 0 || self.profits[i] < 0) {
            return Err(Error::InvalidKnapsack(format!("item {i} has a negative weight or profit")));
        }
        Ok(())
    }

    fn solution(&self, mut chosen: Vec<usize>) -> KnapsackSolution {
        chosen.sort_unstable();
        KnapsackSolution {
            profit: chosen.iter().map(|&i| self.profits[i] as i128).sum(),
            weight: chosen.iter().map(|&i| self.weights[i] as i128).sum(),
            chosen,
        }
    }
}

/// Min-weight-per-profit DP over `items`, returning the chosen subset of
/// `items` with the largest profit level whose weight fits.
fn profit_dp(weights: &[i64], profits: &[u64], items: &[usize], capacity: i64) -> Result<Vec<usize>> {
    let total: u128 = items.iter().map(|&i| profits[i] as u128).sum();
    let cells = (items.len() as u128 + 1) * (total + 1);
    if cells > MAX_DP_CELLS {
        return Err(Error::DpTableTooLarge { cells, cap: MAX_DP_CELLS });
    }
    let total = total as usize;
    let mut best = vec![u128::MAX; total + 1];
    best[0] = 0;
    let mut took = vec![false; items.len() * (total + 1)];
    for (row, &i) in items.iter().enumerate() {
        let (w, p) = (weights[i] as u128, profits[i] as usize);
        if p == 0 {
            continue;
        }
        for level in (p..=total).rev() {
            let from = best[level - p];
            if from != u128::MAX && from + w < best[level] {
                best[level] = from + w;
                took[row * (total + 1) + level] = true;
            }
        }
    }
    let mut level = (0..=total).rev().find(|&l| best[l] <= capacity as u128).unwrap_or(0);
    let mut chosen = Vec::new();
    for (row, &i) in items.iter().enumerate().rev() {
        if took[row * (total + 1) + level] {
            chosen.push(i);
            level -= profits[i] as usize;
        }
    }
    Ok(chosen)
}

/// Optimal 0/1 knapsack by dynamic programming over total profit.
pub fn knapsack_exact(k: &KnapsackInstance) -> Result<KnapsackSolution> {
    k.validate()?;
    let items: Vec<usize> = (0..k.weights.len()).filter(|&i| k.weights[i] <= k.capacity).collect();
    let profits: Vec<u64> = k.profits.iter().map(|&p| p as u64).collect();
    Ok(k.solution(profit_dp(&k.weights, &profits, &items, k.capacity)?))
}

/// `(1 - eps)`-approximate knapsack: profits are divided by
/// `eps * p_max / n` and rounded down, then solved exactly.
pub fn knapsack_fptas(k: &KnapsackInstance, eps: &Rational) -> Result<KnapsackSolution> {
    k.validate()?;
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::BadEpsilon(eps.clone()));
    }
    let items: Vec<usize> = (0..k.weights.len()).filter(|&i| k.weights[i] <= k.capacity).collect();
    let p_max = items.iter().map(|&i| k.profits[i]).max().unwrap_or(0);
    if p_max == 0 {
        return Ok(k.solution(Vec::new()));
    }
    // floor(p * n / (eps * p_max)) = floor(p * n * den / (num * p_max))
    let n = BigInt::from(items.len());
    let divisor = eps.numer() * BigInt::from(p_max);
    let mut scaled = vec![0u64; k.weights.len()];
    for &i in &items {
        let s = (BigInt::from(k.profits[i]) * &n * eps.denom()) / &divisor;
        scaled[i] = s.to_u64().ok_or(Error::Overflow)?;
    }
    Ok(k.solution(profit_dp(&k.weights, &scaled, &items, k.capacity)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn sample() -> KnapsackInstance {
        KnapsackInstance { weights: vec![1, 2, 3], profits: vec![6, 10, 12], capacity: 5 }
    }

    /// Enumerates all subsets.
    fn brute(k: &KnapsackInstance) -> i128 {
        let n = k.weights.len();
        (0u32..1 << n)
            .filter_map(|mask| {
                let items = (0..n).filter(|i| mask >> i & 1 == 1);
                let w: i128 = items.clone().map(|i| k.weights[i] as i128).sum();
                (w <= k.capacity as i128).then(|| items.map(|i| k.profits[i] as i128).sum())
            })
            .max()
            .unwrap()
    }

    #[test]
    fn exact_examples() {
        let s = knapsack_exact(&sample()).unwrap();
        assert_eq!((s.chosen, s.profit), (vec![1, 2], 22));
        let zero = KnapsackInstance { capacity: 0, ..sample() };
        let s = knapsack_exact(&zero).unwrap();
        assert_eq!((s.chosen, s.profit), (vec![], 0));
        let single = KnapsackInstance { weights: vec![4], profits: vec![9], capacity: 4 };
        assert_eq!(knapsack_exact(&single).unwrap().chosen, vec![0]);
    }

    #[test]
    fn fptas_examples() {
        assert!(knapsack_fptas(&sample(), &q(1, 2)).unwrap().profit >= 11);
        assert_eq!(knapsack_fptas(&sample(), &q(1, 10)).unwrap().profit, 22);
        let empty = KnapsackInstance { weights: vec![], profits: vec![], capacity: 3 };
        let s = knapsack_fptas(&empty, &q(1, 2)).unwrap();
        assert_eq!((s.chosen, s.profit), (vec![], 0));
    }

    #[test]
    fn errors() {
        let neg = KnapsackInstance { capacity: -1, ..sample() };
        assert_eq!(knapsack_exact(&neg), Err(Error::CapacityNegative));
        assert!(matches!(knapsack_fptas(&sample(), &q(0, 1)), Err(Error::BadEpsilon(_))));
        assert!(matches!(knapsack_fptas(&sample(), &q(1, 1)), Err(Error::BadEpsilon(_))));
        let huge = KnapsackInstance { weights: vec![1, 1], profits: vec![i64::MAX / 2, 1], capacity: 2 };
        assert!(matches!(knapsack_exact(&huge), Err(Error::DpTableTooLarge { .. })));
        // the approximation scales the same input down to a small table
        let s = knapsack_fptas(&huge, &q(1, 2)).unwrap();
        assert!(s.chosen.contains(&0));
        assert!(s.profit * 2 > (i64::MAX / 2) as i128);
    }

    proptest::proptest! {
        #[test]
        fn exact_matches_enumeration(
            items in proptest::collection::vec((0i64..20, 0i64..30), 0..12),
            capacity in 0i64..60,
        ) {
            let k = KnapsackInstance {
                weights: items.iter().map(|x| x.0).collect(),
                profits: items.iter().map(|x| x.1).collect(),
                capacity,
            };
            let s = knapsack_exact(&k).unwrap();
            proptest::prop_assert_eq!(s.profit, brute(&k));
            proptest::prop_assert!(s.weight <= capacity as i128);
        }

        #[test]
        fn fptas_within_factor(
            items in proptest::collection::vec((0i64..20, 0i64..1000), 0..15),
            capacity in 0i64..80,
            eps_den in 2i64..20,
        ) {
            let k = KnapsackInstance {
                weights: items.iter().map(|x| x.0).collect(),
                profits: items.iter().map(|x| x.1).collect(),
                capacity,
            };
            let eps = q(1, eps_den);
            let s = knapsack_fptas(&k, &eps).unwrap();
            let opt = brute(&k);
            proptest::prop_assert!(s.weight <= capacity as i128);
            // profit >= (1 - eps) * opt, in integers
            proptest::prop_assert!(s.profit * eps_den as i128 >= opt * (eps_den as i128 - 1));
        }
    }
}
