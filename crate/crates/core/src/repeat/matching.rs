//! Maximum-cardinality bipartite matching.

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Hopcroft-Karp. `adj[u]` lists the right vertices adjacent to left vertex
/// `u`; `n_right` is the number of right vertices. Returns the partner of each
/// left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next_edge = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == FREE {
                augment(
                    u,
                    adj,
                    &mut match_l,
                    &mut match_r,
                    &mut dist,
                    &mut next_edge,
                );
            }
        }
    }
    match_l
        .into_iter()
        .map(|v| (v != FREE).then_some(v))
        .collect()
}

/// Iterative layered DFS for one augmenting path starting at `root`.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next_edge[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][next_edge[u]];
        let w = match_r[v];
        if w == FREE {
            // flip the path recorded on the stack
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = match_l[u];
                match_l[u] = v;
                match_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u].wrapping_add(1) {
            stack.push(w);
        } else {
            next_edge[u] += 1;
        }
    }
    false
}

pub fn matching_size(adj: &[Vec<usize>], n_right: usize) -> usize {
    hopcroft_karp(adj, n_right).iter().flatten().count()
}

/// The lexicographically smallest maximum matching when pairs are compared by
/// `(left, right)`. Returned as pairs sorted by left vertex.
pub fn canonical_matching(adj: &[Vec<usize>], n_right: usize) -> Vec<(usize, usize)> {
    let mut adj_sorted: Vec<Vec<usize>> = adj.to_vec();
    for a in &mut adj_sorted {
        a.sort_unstable();
        a.dedup();
    }
    let initial = hopcroft_karp(&adj_sorted, n_right);
    let mut match_l: Vec<usize> = initial.iter().map(|m| m.unwrap_or(FREE)).collect();
    let mut match_r = vec![FREE; n_right];
    for (u, &v) in match_l.iter().enumerate() {
        if v != FREE {
            match_r[v] = u;
        }
    }
    let mut locked_r = vec![false; n_right];

    for u in 0..adj_sorted.len() {
        for &v in &adj_sorted[u] {
            if locked_r[v] {
                continue;
            }
            if match_l[u] == v {
                break;
            }
            // try forcing (u, v), then repair the size with one augmenting path
            let mut trial_l = match_l.clone();
            let mut trial_r = match_r.clone();
            let old_v = trial_l[u];
            let old_u = trial_r[v];
            if old_v != FREE {
                trial_r[old_v] = FREE;
            }
            if old_u != FREE {
                trial_l[old_u] = FREE;
            }
            trial_l[u] = v;
            trial_r[v] = u;
            let lost = old_v != FREE && old_u != FREE;
            if !lost || repair(&adj_sorted, &mut trial_l, &mut trial_r, u, &locked_r, v) {
                match_l = trial_l;
                match_r = trial_r;
                break;
            }
        }
        if match_l[u] != FREE {
            locked_r[match_l[u]] = true;
        }
    }
    match_l
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != FREE)
        .map(|(u, &v)| (u, v))
        .collect()
}

/// Finds one augmenting path among left vertices `> fixed` and unlocked right
/// vertices other than `taken`, and applies it.
fn repair(
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    fixed: usize,
    locked_r: &[bool],
    taken: usize,
) -> bool {
    let n_left = adj.len();
    let usable_r = |v: usize| v != taken && !locked_r[v];
    let mut parent_l = vec![FREE; n_left];
    let mut seen_r = vec![false; match_r.len()];
    let mut queue = VecDeque::new();
    for u in fixed + 1..n_left {
        if match_l[u] == FREE {
            queue.push_back(u);
            parent_l[u] = u;
        }
    }
    let mut via_r = vec![FREE; match_r.len()];
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !usable_r(v) || seen_r[v] {
                continue;
            }
            seen_r[v] = true;
            via_r[v] = u;
            let w = match_r[v];
            if w == FREE {
                // walk back and flip
                let mut v = v;
                loop {
                    let u = via_r[v];
                    let prev = match_l[u];
                    match_l[u] = v;
                    match_r[v] = u;
                    if parent_l[u] == u {
                        return true;
                    }
                    v = prev;
                }
            }
            if w > fixed && parent_l[w] == FREE {
                parent_l[w] = u;
                queue.push_back(w);
            }
        }
    }
    false
}
