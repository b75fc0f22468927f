use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{first_crossing_pair, ProjectSet};
use crate::rational::{common_denominator, Rational};

/// Cap on the summed scaled profit, which bounds every DP table.
pub const MAX_SCALED_PROFIT: u64 = 10_000_000;

/// Undirected simple graph stored as a sorted list of `(low, high)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl ConflictGraph {
    /// Normalises edge orientation and sorts; rejects self-loops, duplicate
    /// edges, and endpoints out of range.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            let hi = u.max(v);
            if hi >= node_count {
                return Err(Error::IndexOutOfRange { index: hi, bound: node_count });
            }
            if u == v {
                return Err(Error::InvalidKnapsack(format!("self-loop on node {u}")));
            }
            list.push((u.min(v), hi));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidKnapsack(format!("duplicate edge {:?}", w[0])));
        }
        Ok(ConflictGraph { node_count, edges: list })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// True when no two members of `nodes` are adjacent.
    pub fn is_independent(&self, nodes: &[usize]) -> bool {
        nodes.iter().enumerate().all(|(i, &u)| nodes[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KcgInstance {
    pub graph: ConflictGraph,
    pub profits: Vec<Rational>,
    pub weights: Vec<Rational>,
    pub capacity: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KcgSolution {
    /// Chosen node indices, ascending.
    pub chosen: Vec<usize>,
    pub profit: Rational,
    pub weight: Rational,
}

/// Containment forest of a laminar family: each set's parent is the smallest
/// set strictly above it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarForest {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl LaminarForest {
    /// Builds the forest of a laminar family. Duplicate sets are chained in
    /// index order and an empty set sits above every other set, since it is
    /// comparable with all of them.
    pub fn from_family(sets: &[ProjectSet]) -> Result<Self> {
        if let Err((a, b)) = first_crossing_pair(sets) {
            return Err(Error::NotLaminar(a, b));
        }
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by_key(|&i| (!sets[i].is_empty(), std::cmp::Reverse(sets[i].len()), i));
        let mut parent = vec![None; sets.len()];
        for (pos, &i) in order.iter().enumerate() {
            // earlier comparable sets are ancestors; the latest is the tightest
            parent[i] = order[..pos].iter().rev().copied().find(|&j| sets[j].is_empty() || sets[i].is_subset(&sets[j]));
        }
        Self::from_parents(parent)
    }

    /// Builds a forest from explicit parent pointers; fails on cycles.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, bound: n });
                }
                children[p].push(i);
            }
        }
        let forest = LaminarForest { parent, children };
        if forest.post_order().len() != n {
            return Err(Error::InvalidKnapsack("parent pointers contain a cycle".into()));
        }
        Ok(forest)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.parent[i].is_none())
    }

    /// Forest with `count` parentless nodes inserted at indices `0..count`.
    pub fn with_isolated_prefix(&self, count: usize) -> Self {
        let mut parent = vec![None; count];
        parent.extend(self.parent.iter().map(|p| p.map(|p| p + count)));
        Self::from_parents(parent).expect("shifting preserves acyclicity")
    }

    /// Nodes in an order where every child precedes its parent.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<(usize, bool)> = self.roots().map(|r| (r, false)).collect();
        stack.reverse();
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                stack.extend(self.children[v].iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }

    /// All ancestor/descendant pairs as `(low, high)`, sorted.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for v in 0..self.len() {
            let mut a = self.parent[v];
            while let Some(u) = a {
                pairs.push((u.min(v), u.max(v)));
                a = self.parent[u];
            }
        }
        pairs.sort_unstable();
        pairs
    }

    pub fn conflict_graph(&self) -> ConflictGraph {
        ConflictGraph::new(self.len(), self.comparable_pairs()).expect("forest pairs are simple")
    }
}

/// Graph joining every two comparable sets of the family.
pub fn containment_graph(sets: &[ProjectSet]) -> ConflictGraph {
    let mut edges = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].is_subset(&sets[j]) || sets[j].is_subset(&sets[i]) {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::new(sets.len(), edges).expect("pairs are simple")
}

enum Choice {
    Empty,
    Leaf(usize),
    Join(Rc<Choice>, Rc<Choice>),
}

impl Choice {
    fn collect(&self, out: &mut Vec<usize>) {
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            match c {
                Choice::Empty => {}
                Choice::Leaf(v) => out.push(*v),
                Choice::Join(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
    }
}

/// Minimum weight reaching each scaled profit level.
type Table = Vec<Option<(Rational, Rc<Choice>)>>;

fn empty_table() -> Table {
    vec![Some((Rational::zero(), Rc::new(Choice::Empty)))]
}

fn merge(a: &Table, b: &Table, capacity: &Rational) -> Table {
    let mut out: Table = vec![None; a.len() + b.len() - 1];
    for (pa, ea) in a.iter().enumerate() {
        let Some((wa, ca)) = ea else { continue };
        for (pb, eb) in b.iter().enumerate() {
            let Some((wb, cb)) = eb else { continue };
            let w = wa + wb;
            if &w > capacity || out[pa + pb].as_ref().is_some_and(|(cur, _)| cur <= &w) {
                continue;
            }
            let choice = match (&**ca, &**cb) {
                (Choice::Empty, _) => cb.clone(),
                (_, Choice::Empty) => ca.clone(),
                _ => Rc::new(Choice::Join(ca.clone(), cb.clone())),
            };
            out[pa + pb] = Some((w, choice));
        }
    }
    while out.len() > 1 && out.last().is_some_and(Option::is_none) {
        out.pop();
    }
    out
}

/// Scales eligible profits to integers: exact (common denominator) when
/// `eps` is zero, otherwise `floor(p * n / (eps * p_max))`.
fn scale_profits(profits: &[Rational], eligible: &[bool], eps: &Rational) -> Result<Vec<u64>> {
    let picked = || (0..profits.len()).filter(|&i| eligible[i]);
    let scaled: Vec<BigInt> = if eps.is_zero() {
        let d = common_denominator(picked().map(|i| &profits[i]));
        profits.iter().map(|p| p.numer() * (&d / p.denom())).collect()
    } else {
        let n = BigInt::from(picked().count());
        let p_max = picked().map(|i| &profits[i]).max().cloned().unwrap_or_else(Rational::zero);
        if p_max.is_zero() {
            vec![BigInt::zero(); profits.len()]
        } else {
            let unit = eps * &p_max;
            profits.iter().map(|p| (&(p * &Rational::from(n.clone())) / &unit).floor()).collect()
        }
    };
    let mut out = vec![0u64; profits.len()];
    let mut total: u128 = 0;
    for i in picked() {
        out[i] = scaled[i].to_u64().ok_or(Error::Overflow)?;
        total += out[i] as u128;
    }
    if total > MAX_SCALED_PROFIT as u128 {
        return Err(Error::DpTableTooLarge { cells: total, cap: MAX_SCALED_PROFIT as u128 });
    }
    Ok(out)
}

/// Knapsack whose chosen nodes must form an antichain of `forest`, i.e. an
/// independent set of its containment graph. `eps = 0` solves exactly.
///
/// Nodes with negative profit are never chosen.
pub fn laminar_conflict_knapsack(k: &KcgInstance, forest: &LaminarForest, eps: &Rational) -> Result<KcgSolution> {
    let n = k.graph.node_count();
    if k.profits.len() != n || k.weights.len() != n {
        return Err(Error::InvalidKnapsack(format!(
            "{n} nodes but {} profits and {} weights",
            k.profits.len(),
            k.weights.len()
        )));
    }
    if eps.is_negative() || eps >= &Rational::one() {
        return Err(Error::BadEpsilon(eps.clone()));
    }
    if k.capacity.is_negative() {
        return Err(Error::CapacityNegative);
    }
    if let Some(i) = k.weights.iter().position(Rational::is_negative) {
        return Err(Error::InvalidKnapsack(format!("node {i} has negative weight")));
    }
    if forest.len() != n || forest.comparable_pairs() != k.graph.edges() {
        return Err(Error::GraphForestMismatch);
    }
    let eligible: Vec<bool> = (0..n).map(|i| !k.profits[i].is_negative() && k.weights[i] <= k.capacity).collect();
    let scaled = scale_profits(&k.profits, &eligible, eps)?;

    let mut tables: Vec<Option<Table>> = vec![None; n];
    for v in forest.post_order() {
        let mut table = empty_table();
        for &c in forest.children(v) {
            let child = tables[c].take().expect("children precede parents");
            table = merge(&table, &child, &k.capacity);
        }
        if eligible[v] {
            let level = scaled[v] as usize;
            if table.len() <= level {
                table.resize(level + 1, None);
            }
            let w = &k.weights[v];
            if table[level].as_ref().map_or(true, |(cur, _)| w < cur) {
                table[level] = Some((w.clone(), Rc::new(Choice::Leaf(v))));
            }
        }
        tables[v] = Some(table);
    }
    let mut total = empty_table();
    for r in forest.roots() {
        total = merge(&total, tables[r].as_ref().expect("root table"), &k.capacity);
    }
    let (_, choice) = total.iter().rev().flatten().next().expect("level 0 is always reachable");
    let mut chosen = Vec::new();
    choice.collect(&mut chosen);
    chosen.sort_unstable();
    Ok(KcgSolution {
        profit: chosen.iter().map(|&i| &k.profits[i]).sum(),
        weight: chosen.iter().map(|&i| &k.weights[i]).sum(),
        chosen,
    })
}
