//! Maximum-cardinality bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const INF: u32 = u32::MAX;

/// `forward[l] = Some(r)` when left vertex `l` is matched to right vertex `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    pub forward: Vec<Option<usize>>,
    pub backward: Vec<Option<usize>>,
}

impl Matching {
    pub fn is_perfect(&self) -> bool {
        self.size == self.forward.len() && self.size == self.backward.len()
    }
}

/// `adj[l]` lists the right vertices adjacent to left vertex `l`; the right
/// side has `right` vertices. O(E sqrt(V)).
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Matching {
    let left = adj.len();
    let mut forward = vec![None; left];
    let mut backward = vec![None; right];
    let mut dist = vec![INF; left];
    let mut size = 0;
    loop {
        if !layer(adj, &forward, &backward, &mut dist) {
            break;
        }
        let mut next = vec![0usize; left];
        for l in 0..left {
            if forward[l].is_none() && augment(l, adj, &mut dist, &mut next, &mut forward, &mut backward) {
                size += 1;
            }
        }
    }
    Matching {
        size,
        forward,
        backward,
    }
}

/// BFS from free left vertices; returns whether a free right vertex is
/// reachable along alternating paths.
fn layer(
    adj: &[Vec<usize>],
    forward: &[Option<usize>],
    backward: &[Option<usize>],
    dist: &mut [u32],
) -> bool {
    let mut queue = VecDeque::new();
    for (l, d) in dist.iter_mut().enumerate() {
        if forward[l].is_none() {
            *d = 0;
            queue.push_back(l);
        } else {
            *d = INF;
        }
    }
    let mut found = false;
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            match backward[r] {
                None => found = true,
                Some(l2) if dist[l2] == INF => {
                    dist[l2] = dist[l] + 1;
                    queue.push_back(l2);
                }
                Some(_) => {}
            }
        }
    }
    found
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    dist: &mut [u32],
    next: &mut [usize],
    forward: &mut [Option<usize>],
    backward: &mut [Option<usize>],
) -> bool {
    while next[l] < adj[l].len() {
        let r = adj[l][next[l]];
        next[l] += 1;
        let ok = match backward[r] {
            None => true,
            Some(l2) => dist[l2] == dist[l] + 1 && augment(l2, adj, dist, next, forward, backward),
        };
        if ok {
            forward[l] = Some(r);
            backward[r] = Some(l);
            return true;
        }
    }
    dist[l] = INF;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive maximum matching for tiny graphs.
    fn brute_force(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(l: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if l == adj.len() {
                return 0;
            }
            let mut best = go(l + 1, adj, used);
            for &r in &adj[l] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(l + 1, adj, used));
                    used[r] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn complete_graph_is_perfect() {
        let adj = vec![vec![0, 1, 2]; 3];
        let m = hopcroft_karp(&adj, 3);
        assert!(m.is_perfect());
    }

    #[test]
    fn needs_augmenting_path() {
        // greedy 0->0 blocks 1 unless rerouted
        let adj = vec![vec![0, 1], vec![0]];
        let m = hopcroft_karp(&adj, 2);
        assert_eq!(m.size, 2);
        assert_eq!(m.forward, vec![Some(1), Some(0)]);
    }

    #[test]
    fn empty_rows_leave_vertices_unmatched() {
        let m = hopcroft_karp(&[vec![], vec![]], 2);
        assert_eq!(m.size, 0);
        assert!(!m.is_perfect());
    }

    proptest! {
        #[test]
        fn agrees_with_exhaustive_search(
            edges in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 1..7)
        ) {
            let right = 6;
            let adj: Vec<Vec<usize>> = edges
                .iter()
                .map(|row| (0..right).filter(|&r| row[r]).collect())
                .collect();
            let m = hopcroft_karp(&adj, right);
            prop_assert_eq!(m.size, brute_force(&adj, right));
            for (l, r) in m.forward.iter().enumerate() {
                if let Some(r) = r {
                    prop_assert!(adj[l].contains(r));
                    prop_assert_eq!(m.backward[*r], Some(l));
                }
            }
        }
    }
}
