//! Dinic maximum flow over exact rational capacities.

use std::collections::VecDeque;

use crate::rational::Rational;

struct Arc {
    to: usize,
    residual: Rational,
}

pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, capacity: Rational) {
        // arc 2k is forward, 2k + 1 its reverse
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, residual: capacity });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, residual: Rational::zero() });
    }

    fn levels(&self, source: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.out.len()];
        level[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let next = level[u].map(|l| l + 1);
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.residual.is_positive() && level[arc.to].is_none() {
                    level[arc.to] = next;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn push(
        &mut self,
        u: usize,
        sink: usize,
        limit: Rational,
        level: &[Option<usize>],
        cursor: &mut [usize],
    ) -> Rational {
        if u == sink {
            return limit;
        }
        while cursor[u] < self.out[u].len() {
            let a = self.out[u][cursor[u]];
            let to = self.arcs[a].to;
            if self.arcs[a].residual.is_positive() && level[to] == level[u].map(|l| l + 1) {
                let cap = Rational::min_of(&limit, &self.arcs[a].residual);
                let pushed = self.push(to, sink, cap, level, cursor);
                if pushed.is_positive() {
                    self.arcs[a].residual -= &pushed;
                    self.arcs[a ^ 1].residual += &pushed;
                    return pushed;
                }
            }
            cursor[u] += 1;
        }
        Rational::zero()
    }

    /// Saturates the network and returns the flow value.
    pub fn max_flow(&mut self, source: usize, sink: usize, unbounded: &Rational) -> Rational {
        let mut total = Rational::zero();
        loop {
            let level = self.levels(source);
            if level[sink].is_none() {
                return total;
            }
            let mut cursor = vec![0; self.out.len()];
            loop {
                let pushed = self.push(source, sink, unbounded.clone(), &level, &mut cursor);
                if !pushed.is_positive() {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// Nodes reachable from `source` in the residual graph.
    pub fn source_side(&self, source: usize) -> Vec<bool> {
        self.levels(source).into_iter().map(|l| l.is_some()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn diamond() {
        let mut g = FlowNetwork::new(4);
        g.add_edge(0, 1, r(3));
        g.add_edge(0, 2, r(2));
        g.add_edge(1, 2, r(1));
        g.add_edge(1, 3, r(2));
        g.add_edge(2, 3, r(3));
        assert_eq!(g.max_flow(0, 3, &r(100)), r(5));
        assert_eq!(g.source_side(0), vec![true, false, false, false]);
    }

    #[test]
    fn fractional_capacities() {
        let mut g = FlowNetwork::new(3);
        g.add_edge(0, 1, crate::rational::q(1, 3));
        g.add_edge(1, 2, crate::rational::q(1, 2));
        assert_eq!(g.max_flow(0, 2, &r(10)), crate::rational::q(1, 3));
        assert_eq!(g.source_side(0), vec![true, false, false]);
    }
}
