use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::model::{Agent, Instance, Project, Valuation};
use crate::rational::Rational;

/// Denominator of every sampled quantity.
pub const QUANTUM: i64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `v_ij ~ U[0, 1]`.
    Uniform,
    /// `v_ij ~ N(mu_j, sigma_j)` with `mu_j ~ U[0, 1]`, `sigma_j ~ U[0, 1/2]`,
    /// shifted per project so the smallest value is at least zero.
    Normal,
    /// `v_ij = nu_j * Bernoulli(p_j)` with `p_j, nu_j ~ U[0, 1]`.
    Bernoulli,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Uniform, Family::Normal, Family::Bernoulli];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Normal => "normal",
            Family::Bernoulli => "bernoulli",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}; expected uniform, normal, or bernoulli"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub family: Family,
    /// Agent count.
    pub n: usize,
    /// Project count.
    pub m: usize,
    pub seed: u64,
}

struct Uniform(ChaCha8Rng);

impl Uniform {
    /// A double in `[0, 1)` from the top 53 bits of the next word.
    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A double in `(0, 1)`.
    fn open(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal quantile by Acklam's rational approximation
/// (relative error below `1.15e-9`).
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.38357751867269e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] =
        [-5.447609879822406e1, 1.615858368580409e2, -1.556989798598866e2, 6.680131188771972e1, -1.328068155288572e1];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996, 3.754408661907416];
    const LOW: f64 = 0.02425;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

fn quantize(x: f64) -> Rational {
    Rational::from_f64_quantized(x, QUANTUM)
}

/// Rounds `x` up to the grid `1 / QUANTUM`.
fn ceil_to_grid(x: &Rational) -> Rational {
    let q = Rational::from_integer(QUANTUM);
    let scaled = Rational::from((x * &q).ceil());
    scaled / q
}

/// Draws an additive instance. Draw order: per project, the family
/// parameters then one value per agent; then one cost draw per project;
/// then one budget weight per agent.
pub fn gen_synthetic(cfg: &SyntheticConfig) -> Instance {
    let (n, m) = (cfg.n, cfg.m);
    let mut rng = Uniform(ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for _ in 0..m {
        let column: Vec<Rational> = match cfg.family {
            Family::Uniform => (0..n).map(|_| quantize(rng.next())).collect(),
            Family::Normal => {
                let mean = rng.next();
                let sd = 0.5 * rng.next();
                let raw: Vec<Rational> = (0..n).map(|_| quantize(mean + sd * normal_quantile(rng.open()))).collect();
                let lowest = raw.iter().min().cloned().unwrap_or_default();
                if lowest.is_negative() {
                    raw.into_iter().map(|v| v - &lowest).collect()
                } else {
                    raw
                }
            }
            Family::Bernoulli => {
                let p = rng.next();
                let nu = quantize(rng.next());
                (0..n).map(|_| if rng.next() < p { nu.clone() } else { Rational::zero() }).collect()
            }
        };
        columns.push(column);
    }

    let quarter = Rational::new(1, 4);
    let projects: Vec<Project> = columns
        .iter()
        .map(|col| {
            let total: Rational = col.iter().sum();
            let low = &total - &(&total * &quarter);
            let drawn = &low + &(&quantize(rng.next()) * &(&total * &quarter));
            Project { name: None, cost: Rational::min_of(&ceil_to_grid(&drawn), &total) }
        })
        .collect();

    let half_cost: Rational = projects.iter().map(|p| &p.cost).sum::<Rational>() / Rational::from_integer(2);
    let weights: Vec<f64> = (0..n).map(|_| rng.next()).collect();
    let weight_sum: f64 = weights.iter().sum();
    let grid = 2 * QUANTUM;
    let mut budgets = Vec::with_capacity(n);
    let mut assigned = Rational::zero();
    for (i, w) in weights.iter().enumerate() {
        let b = if i + 1 == n {
            &half_cost - &assigned
        } else {
            let share = if weight_sum > 0.0 { w / weight_sum } else { 1.0 / n as f64 };
            let floor = (share * half_cost.to_f64() * grid as f64).floor().max(0.0);
            let b = Rational::from(BigInt::from(floor as i64)) / Rational::from_integer(grid);
            // never overshoot the pool through float error
            Rational::min_of(&b, &(&half_cost - &assigned))
        };
        assigned += &b;
        budgets.push(b);
    }

    let agents = (0..n)
        .map(|i| Agent {
            budget: budgets[i].clone(),
            valuation: Valuation::Additive(columns.iter().map(|col| col[i].clone()).collect()),
        })
        .collect();
    Instance::new(projects, agents)
}
