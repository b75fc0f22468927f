use super::ConflictGraph;

/// Lexicographic breadth-first search; returns vertices in visit order.
/// Ties go to the smallest index.
fn lex_bfs(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    // labels hold the visit ranks of already-visited neighbours, descending
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .reduce(|best, v| if labels[v] > labels[best] { v } else { best })
            .expect("an unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for &u in &adj[v] {
            if !visited[u] {
                labels[u].push(n - step);
            }
        }
    }
    order
}

/// Checks that for every vertex, its neighbours later in `order` form a
/// clique.
pub fn verify_elimination_order(g: &ConflictGraph, order: &[usize]) -> bool {
    let n = g.node_count();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    let adj = g.adjacency();
    for &v in order {
        let later: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect();
        // it suffices that the earliest later neighbour sees all the others
        let Some(&first) = later.iter().min_by_key(|&&u| pos[u]) else { continue };
        if later.iter().any(|&u| u != first && !g.has_edge(first, u)) {
            return false;
        }
    }
    true
}

/// A perfect elimination ordering, or `None` when the graph is not chordal.
pub fn perfect_elimination_order(g: &ConflictGraph) -> Option<Vec<usize>> {
    let mut order = lex_bfs(&g.adjacency());
    order.reverse();
    verify_elimination_order(g, &order).then_some(order)
}

pub fn is_chordal(g: &ConflictGraph) -> bool {
    perfect_elimination_order(g).is_some()
}
