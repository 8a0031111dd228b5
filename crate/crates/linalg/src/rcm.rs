//! Reverse Cuthill–McKee ordering.

use std::collections::VecDeque;

/// Returns perm with perm[new] = old.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (deg[v], v));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = peripheral_node(adj, seed, &deg);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            nb.sort_by_key(|&u| (deg[u], u));
            for u in nb {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

fn levels(adj: &[Vec<usize>], root: usize) -> (Vec<usize>, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    let mut reached = Vec::new();
    let mut depth = 0;
    while let Some(v) = queue.pop_front() {
        reached.push(v);
        depth = depth.max(dist[v]);
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let last: Vec<usize> = reached.into_iter().filter(|&v| dist[v] == depth).collect();
    (last, depth)
}

/// George–Liu pseudo-peripheral node search.
fn peripheral_node(adj: &[Vec<usize>], seed: usize, deg: &[usize]) -> usize {
    let mut root = seed;
    let (mut last, mut depth) = levels(adj, root);
    loop {
        let cand = *last.iter().min_by_key(|&&v| (deg[v], v)).unwrap();
        let (l2, d2) = levels(adj, cand);
        if d2 > depth {
            root = cand;
            last = l2;
            depth = d2;
        } else {
            return root;
        }
    }
}
