use super::{welfare_ratio, DistortionReport, Method};
use crate::error::{Error, Result};
use crate::model::{MetricInstance, OrdinalProfile, TieRule, TAU_METRIC};

/// Largest number of candidate matrices (`|grid|^pairs`) searched by default.
pub const DEFAULT_CANDIDATE_CAP: f64 = 1e8;

#[derive(Clone, Copy, Debug)]
pub struct DiscreteOptions {
    pub cap: f64,
}

impl Default for DiscreteOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

/// Brute-force worst case of `winner` over all metrics whose entries lie in
/// `grid` and that are consistent with `profile`.
pub fn discrete_adversary(
    profile: &OrdinalProfile,
    winner: usize,
    grid: &[f64],
    opts: &DiscreteOptions,
) -> Result<DistortionReport> {
    if winner >= profile.m() {
        return Err(Error::IndexOutOfRange {
            what: "winner",
            index: winner,
            len: profile.m(),
        });
    }
    Ok(discrete_adversary_all(profile, grid, opts)?.swap_remove(winner))
}

/// Same search, reporting every alternative as the winner from a single
/// enumeration. Entry `w` is the report for winner `w`.
pub fn discrete_adversary_all(
    profile: &OrdinalProfile,
    grid: &[f64],
    opts: &DiscreteOptions,
) -> Result<Vec<DistortionReport>> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidGrid);
    }
    let (n, m) = (profile.n(), profile.m());
    let p = n + m;
    let pairs: Vec<(usize, usize)> = (1..p).flat_map(|q| (0..q).map(move |a| (a, q))).collect();
    let candidates = (grid.len() as f64).powi(pairs.len() as i32);
    if candidates > opts.cap {
        return Err(Error::SearchSpaceTooLarge {
            candidates,
            cap: opts.cap,
        });
    }
    let mut search = Search {
        n,
        m,
        p,
        grid,
        pairs: &pairs,
        positions: (0..n)
            .map(|i| (0..m).map(|x| profile.position(i, x)).collect())
            .collect(),
        dist: vec![0.0; p * p],
        best: vec![None; m],
    };
    search.descend(0);
    let tie_rule = TieRule::PerAgent {
        orders: profile.rankings().to_vec(),
    };
    search
        .best
        .into_iter()
        .enumerate()
        .map(|(w, best)| {
            let best = best.ok_or(Error::AdversaryInfeasible { alternative: w })?;
            let instance =
                MetricInstance::from_matrix(n, m, best.dist, profile.grouping().clone())?;
            Ok(DistortionReport {
                winner: w,
                winner_welfare: best.welfare[w],
                best_alt: best.best_alt,
                best_welfare: best.welfare[best.best_alt],
                distortion: best.ratio,
                degenerate: best.degenerate,
                witness: Some(instance),
                tie_rule: Some(tie_rule.clone()),
                method: Method::DiscreteBruteForce,
            })
        })
        .collect()
}

#[derive(Clone)]
struct Best {
    ratio: f64,
    degenerate: bool,
    best_alt: usize,
    welfare: Vec<f64>,
    dist: Vec<f64>,
}

struct Search<'a> {
    n: usize,
    m: usize,
    p: usize,
    grid: &'a [f64],
    /// Pairs in assignment order: by larger endpoint, then smaller.
    pairs: &'a [(usize, usize)],
    positions: Vec<Vec<usize>>,
    dist: Vec<f64>,
    best: Vec<Option<Best>>,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.pairs.len() {
            self.record();
            return;
        }
        let (a, b) = self.pairs[depth];
        for &v in self.grid {
            if self.admissible(a, b, v) {
                self.dist[a * self.p + b] = v;
                self.dist[b * self.p + a] = v;
                self.descend(depth + 1);
            }
        }
    }

    /// Checks every constraint whose last pair is `(a, b)`.
    fn admissible(&self, a: usize, b: usize, v: f64) -> bool {
        let p = self.p;
        for z in 0..a {
            let (za, zb) = (self.dist[z * p + a], self.dist[z * p + b]);
            if v > za + zb + TAU_METRIC || za > v + zb + TAU_METRIC || zb > v + za + TAU_METRIC {
                return false;
            }
        }
        if a < self.n && b >= self.n {
            let x = b - self.n;
            let pos = &self.positions[a];
            for y in 0..x {
                let dy = self.dist[a * p + self.n + y];
                let ok = if pos[x] < pos[y] {
                    v >= dy - TAU_METRIC
                } else {
                    dy >= v - TAU_METRIC
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn record(&mut self) {
        let welfare: Vec<f64> = (0..self.m)
            .map(|x| (0..self.n).map(|i| self.dist[i * self.p + self.n + x]).sum())
            .collect();
        let mut best_alt = 0;
        for x in 1..self.m {
            if welfare[x] > welfare[best_alt] {
                best_alt = x;
            }
        }
        for w in 0..self.m {
            let (ratio, degenerate) = welfare_ratio(welfare[best_alt], welfare[w]);
            if self.best[w].as_ref().is_none_or(|b| ratio > b.ratio) {
                self.best[w] = Some(Best {
                    ratio,
                    degenerate,
                    best_alt,
                    welfare: welfare.clone(),
                    dist: self.dist.clone(),
                });
            }
        }
    }
}
