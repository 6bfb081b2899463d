use serde::{Deserialize, Serialize};

use crate::matching::hopcroft_karp;

/// Perfect matching in the domination graph of `winner`. Agents are
/// positions within the group; `agents` optionally maps them to global ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationCertificate {
    pub winner: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub agents: Vec<usize>,
    /// `matching[i] = mu(i)`.
    pub matching: Vec<usize>,
}

impl DominationCertificate {
    /// Re-checks the certificate from scratch: `matching` is a bijection and
    /// every agent ranks the winner weakly above `top(mu(i))`.
    pub fn verify<R: AsRef<[usize]>>(&self, rankings: &[R]) -> bool {
        let n = rankings.len();
        if self.matching.len() != n {
            return false;
        }
        let mut hit = vec![false; n];
        for &j in &self.matching {
            if j >= n || std::mem::replace(&mut hit[j], true) {
                return false;
            }
        }
        self.matching.iter().enumerate().all(|(i, &j)| {
            let r = rankings[i].as_ref();
            let top_j = rankings[j].as_ref()[0];
            match (pos(r, self.winner), pos(r, top_j)) {
                (Some(pw), Some(pt)) => pw <= pt,
                _ => false,
            }
        })
    }
}

fn pos(ranking: &[usize], x: usize) -> Option<usize> {
    ranking.iter().position(|&y| y == x)
}

/// Bipartite agent-by-agent graph: edge `i -> j` iff `candidate` is ranked
/// weakly above `top(j)` in `i`'s ranking.
pub fn domination_graph<R: AsRef<[usize]>>(rankings: &[R], candidate: usize) -> Vec<Vec<usize>> {
    let tops: Vec<usize> = rankings.iter().map(|r| r.as_ref()[0]).collect();
    rankings
        .iter()
        .map(|r| {
            let r = r.as_ref();
            let mut position = vec![usize::MAX; r.len()];
            for (p, &x) in r.iter().enumerate() {
                position[x] = p;
            }
            let pc = position.get(candidate).copied().unwrap_or(usize::MAX);
            tops.iter()
                .enumerate()
                .filter(|&(_, &t)| pc <= position[t])
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Perfect matching of `candidate`'s domination graph, if one exists.
pub fn certify_domination<R: AsRef<[usize]>>(
    rankings: &[R],
    candidate: usize,
) -> Option<DominationCertificate> {
    if rankings.is_empty() || rankings[0].as_ref().len() <= candidate {
        return None;
    }
    let graph = domination_graph(rankings, candidate);
    let m = hopcroft_karp(&graph, rankings.len());
    if !m.is_perfect() {
        return None;
    }
    Some(DominationCertificate {
        winner: candidate,
        agents: Vec::new(),
        matching: m.forward.into_iter().map(|r| r.expect("perfect")).collect(),
    })
}
