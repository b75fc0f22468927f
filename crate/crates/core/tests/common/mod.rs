//! Seeded instance generators and brute-force oracles shared by the
//! integration suites.

#![allow(dead_code)]

use poolbudget::knapsack::{ConflictGraph, KcgInstance};
use poolbudget::model::{Agent, Instance, Project, ProjectSet, Valuation};
use poolbudget::rational::Rational;
use poolbudget::solvers::SukpInstance;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.0.next_u64() & 1 == 1
    }

    /// Rational `k / d` with `k` in `lo*d..=hi*d` and `d` in `{1, 2, 3}`.
    pub fn rat(&mut self, lo: i64, hi: i64) -> Rational {
        let d = self.int(1, 3);
        Rational::new(self.int(lo * d, hi * d), d)
    }

    pub fn subset(&mut self, m: usize) -> ProjectSet {
        (0..m).filter(|_| self.coin()).collect()
    }

    pub fn nonempty_subset(&mut self, m: usize) -> ProjectSet {
        loop {
            let s = self.subset(m);
            if !s.is_empty() {
                return s;
            }
        }
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }

    /// Laminar family of `count` nonempty sets over `0..m`: intervals of a
    /// random ordering, kept only when they do not cross earlier picks.
    /// Repeated sets are allowed.
    pub fn laminar_family(&mut self, m: usize, count: usize) -> Vec<ProjectSet> {
        let mut perm: Vec<usize> = (0..m).collect();
        self.shuffle(&mut perm);
        let mut spans: Vec<(usize, usize)> = Vec::new();
        while spans.len() < count {
            let a = self.below(m);
            let b = a + 1 + self.below(m - a);
            let crosses = spans.iter().any(|&(c, d)| a < c && c < b && b < d || c < a && a < d && d < b);
            if !crosses {
                spans.push((a, b));
            }
        }
        spans.into_iter().map(|(a, b)| perm[a..b].iter().copied().collect()).collect()
    }

    fn costs(&mut self, m: usize, lo: i64, hi: i64) -> Vec<Project> {
        (0..m).map(|_| Project { name: None, cost: self.rat(lo, hi) }).collect()
    }

    pub fn additive(&mut self, n: usize, m: usize) -> Instance {
        let projects = self.costs(m, 0, 6);
        let agents = (0..n)
            .map(|_| Agent {
                budget: self.rat(0, 5),
                valuation: Valuation::Additive((0..m).map(|_| self.rat(0, 4)).collect()),
            })
            .collect();
        Instance::new(projects, agents)
    }

    pub fn identical_costs(&mut self, n: usize, m: usize) -> Instance {
        let mut inst = self.additive(n, m);
        let c = self.rat(1, 4);
        inst.projects.iter_mut().for_each(|p| p.cost = c.clone());
        inst
    }

    pub fn single_minded(&mut self, n: usize, m: usize, demands: &[ProjectSet]) -> Instance {
        let projects = self.costs(m, 0, 6);
        let agents = (0..n)
            .map(|i| Agent {
                budget: self.rat(0, 6),
                valuation: Valuation::SingleMinded {
                    demand: demands[i % demands.len()].clone(),
                    value: self.rat(0, 8),
                },
            })
            .collect();
        Instance::new(projects, agents)
    }

    pub fn random_single_minded(&mut self, n: usize, m: usize) -> Instance {
        let demands: Vec<ProjectSet> = (0..n).map(|_| self.nonempty_subset(m)).collect();
        self.single_minded(n, m, &demands)
    }

    pub fn laminar_single_minded(&mut self, n: usize, m: usize) -> Instance {
        let demands = self.laminar_family(m, n);
        self.single_minded(n, m, &demands)
    }

    pub fn symmetric(&mut self, n: usize, m: usize) -> Instance {
        let projects = self.costs(m, 0, 5);
        let agents = (0..n)
            .map(|_| {
                let mut row = vec![Rational::zero()];
                for _ in 0..m {
                    let next = row.last().unwrap() + &self.rat(0, 3);
                    row.push(next);
                }
                Agent { budget: self.rat(0, 5), valuation: Valuation::Symmetric(row) }
            })
            .collect();
        Instance::new(projects, agents)
    }

    /// Monotone table valuation: maximum over subsets of random additive
    /// weights plus a random bonus.
    pub fn table(&mut self, m: usize) -> Valuation {
        let base: Vec<Rational> = (0..1usize << m).map(|_| self.rat(0, 3)).collect();
        let mut entries = vec![Rational::zero(); 1 << m];
        for mask in 1..1usize << m {
            let mut best = base[mask].clone();
            for j in 0..m {
                if mask >> j & 1 == 1 {
                    best = Rational::max_of(&best, &entries[mask & !(1 << j)]);
                }
            }
            entries[mask] = best;
        }
        Valuation::Table(entries)
    }

    /// Agents of every valuation class over one project set.
    pub fn mixed(&mut self, n: usize, m: usize) -> Instance {
        let projects = self.costs(m, 0, 6);
        let agents = (0..n)
            .map(|_| {
                let valuation = match self.below(4) {
                    0 => Valuation::Additive((0..m).map(|_| self.rat(0, 4)).collect()),
                    1 => Valuation::SingleMinded { demand: self.subset(m), value: self.rat(0, 8) },
                    2 => {
                        let mut row = vec![Rational::zero()];
                        for _ in 0..m {
                            let next = row.last().unwrap() + &self.rat(0, 3);
                            row.push(next);
                        }
                        Valuation::Symmetric(row)
                    }
                    _ => self.table(m),
                };
                Agent { budget: self.rat(0, 5), valuation }
            })
            .collect();
        Instance::new(projects, agents)
    }

    /// Laminar SUKP whose item sets cover `0..elements`.
    pub fn laminar_sukp(&mut self, items: usize, elements: usize) -> SukpInstance {
        let mut sets = self.laminar_family(elements, items);
        let mut covered = vec![false; elements];
        sets.iter().flat_map(|s| s.iter()).for_each(|e| covered[e] = true);
        // relabel covered elements densely
        let mut label = vec![usize::MAX; elements];
        let mut next = 0;
        for e in 0..elements {
            if covered[e] {
                label[e] = next;
                next += 1;
            }
        }
        sets = sets.into_iter().map(|s| s.iter().map(|e| label[e]).collect()).collect();
        SukpInstance {
            item_sets: sets,
            item_values: (0..items).map(|_| self.rat(0, 6)).collect(),
            element_weights: (0..next).map(|_| self.rat(0, 4)).collect(),
            capacity: self.rat(0, 12),
        }
    }
}

/// Calls `f` on every subset of `0..n` as a sorted index list.
pub fn for_each_subset(n: usize, mut f: impl FnMut(&[usize])) {
    let mut buf = Vec::with_capacity(n);
    for mask in 0u64..1 << n {
        buf.clear();
        buf.extend((0..n).filter(|i| mask >> i & 1 == 1));
        f(&buf);
    }
}

/// Best profit over independent sets of the graph that fit the capacity,
/// ignoring negative-profit nodes.
pub fn brute_kcg(k: &KcgInstance) -> Rational {
    let g: &ConflictGraph = &k.graph;
    let mut best = Rational::zero();
    for_each_subset(g.node_count(), |s| {
        if !g.is_independent(s) {
            return;
        }
        let w: Rational = s.iter().map(|&i| &k.weights[i]).sum();
        if w > k.capacity {
            return;
        }
        let p: Rational = s.iter().map(|&i| &k.profits[i]).sum();
        if p > best {
            best = p;
        }
    });
    best
}

pub fn brute_sukp(s: &SukpInstance) -> Rational {
    let mut best = Rational::zero();
    for_each_subset(s.item_sets.len(), |items| {
        let sol = s.solution(items.to_vec());
        if sol.weight <= s.capacity && sol.value > best {
            best = sol.value;
        }
    });
    best
}

pub fn has_subset_sum(values: &[u64], target2: u64) -> bool {
    // target2 is twice the target so odd totals need no special case
    let mut found = false;
    for_each_subset(values.len(), |s| found |= 2 * s.iter().map(|&i| values[i]).sum::<u64>() == target2);
    found
}

pub fn has_exact_cover(universe: usize, triples: &[[usize; 3]]) -> bool {
    let mut found = false;
    for_each_subset(triples.len(), |s| {
        let mut hit = vec![0u8; universe];
        s.iter().flat_map(|&t| triples[t]).for_each(|e| hit[e] += 1);
        found |= hit.iter().all(|&h| h == 1);
    });
    found
}
