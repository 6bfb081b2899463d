use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Audit record of one Plurality-Veto run. Agents are positions within the
/// group's ranking list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VetoTrace {
    pub initial_scores: Vec<usize>,
    /// `(agent, vetoed alternative)` in veto order.
    pub veto_sequence: Vec<(usize, usize)>,
    /// Alternatives in the order their score reached zero; alternatives that
    /// start at zero come first, in index order. The last entry is the winner.
    pub elimination_order: Vec<usize>,
}

impl VetoTrace {
    /// Replays the trace and checks its internal invariants.
    pub fn is_consistent(&self, group_size: usize) -> bool {
        if self.initial_scores.iter().sum::<usize>() != group_size
            || self.veto_sequence.len() != group_size
        {
            return false;
        }
        let mut scores = self.initial_scores.clone();
        for &(_, x) in &self.veto_sequence {
            match scores.get_mut(x) {
                Some(s) if *s > 0 => *s -= 1,
                _ => return false,
            }
        }
        scores.iter().all(|&s| s == 0)
    }

    pub fn winner(&self) -> Option<usize> {
        self.elimination_order.last().copied()
    }

    pub(crate) fn map_alternatives(&self, map: &[usize], m: usize) -> Self {
        let mut initial_scores = vec![0; m];
        for (x, &s) in self.initial_scores.iter().enumerate() {
            initial_scores[map[x]] = s;
        }
        let mut elimination_order: Vec<usize> =
            (0..m).filter(|x| !map.contains(x)).collect();
        elimination_order.extend(self.elimination_order.iter().map(|&x| map[x]));
        Self {
            initial_scores,
            veto_sequence: self.veto_sequence.iter().map(|&(a, x)| (a, map[x])).collect(),
            elimination_order,
        }
    }
}

/// Plurality-Veto over rankings in obnoxious order (position 0 = farthest).
///
/// Each alternative starts with the number of agents ranking it first. Agents
/// in `agent_order` then each decrement the score of the lowest-ranked
/// alternative (in their own ranking) that still has positive score. The
/// alternative hit by the final veto wins.
pub fn plurality_veto<R: AsRef<[usize]>>(
    rankings: &[R],
    agent_order: &[usize],
) -> Result<(usize, VetoTrace)> {
    let Some(first) = rankings.first() else {
        return Err(Error::EmptyGroup);
    };
    let m = first.as_ref().len();
    let n = rankings.len();
    check_order(agent_order, n)?;
    let mut scores = vec![0usize; m];
    for (i, r) in rankings.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != m || r.is_empty() {
            return Err(Error::InvalidRanking {
                agent: i,
                reason: format!("expected {m} alternatives, got {}", r.len()),
            });
        }
        scores[r[0]] += 1;
    }
    let initial_scores = scores.clone();
    let mut elimination_order: Vec<usize> = (0..m).filter(|&x| scores[x] == 0).collect();
    let mut veto_sequence = Vec::with_capacity(n);
    for &a in agent_order {
        let target = *rankings[a]
            .as_ref()
            .iter()
            .rev()
            .find(|&&x| scores[x] > 0)
            .expect("total score equals remaining vetoes");
        scores[target] -= 1;
        veto_sequence.push((a, target));
        if scores[target] == 0 {
            elimination_order.push(target);
        }
    }
    let winner = veto_sequence.last().expect("at least one agent").1;
    Ok((
        winner,
        VetoTrace {
            initial_scores,
            veto_sequence,
            elimination_order,
        },
    ))
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidAgentOrder(format!(
            "{} entries for {n} agents",
            order.len()
        )));
    }
    for &a in order {
        if a >= n || std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidAgentOrder(format!("{order:?}")));
        }
    }
    Ok(())
}
