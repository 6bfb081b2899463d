use distvote_lp::{solve_with, LinearProgram, LpSolution, LpStatus, Relation, SolverOptions};

use super::{welfare_ratio, DistortionReport, Method};
use crate::error::{Error, Result};
use crate::model::{MetricInstance, OrdinalProfile, TieRule};

#[derive(Clone, Debug, Default)]
pub struct AdversaryOptions {
    /// Known alternative locations: `pins[x][y]` fixes `d(x, y)` up to a
    /// common scale factor chosen by the adversary.
    pub pins: Option<Vec<Vec<f64>>>,
    pub solver: SolverOptions,
}

/// Number of unordered pairs over `points` points.
pub fn pair_count(points: usize) -> usize {
    points * points.saturating_sub(1) / 2
}

/// LP variable of the pair `{p, q}` (`p != q`) among `points` points.
pub fn pair_index(p: usize, q: usize, points: usize) -> usize {
    let (p, q) = if p < q { (p, q) } else { (q, p) };
    debug_assert!(q < points && p != q);
    p * points - p * (p + 1) / 2 + (q - p - 1)
}

/// The LP maximizing `SW(target)` subject to `SW(winner) = 1`, the metric
/// axioms and consistency with `profile`. Variables are the pairwise
/// distances (see [`pair_index`]); with pins, one extra scale variable
/// follows them.
pub fn adversary_lp(
    profile: &OrdinalProfile,
    winner: usize,
    target: usize,
    pins: Option<&[Vec<f64>]>,
) -> Result<LinearProgram> {
    let (n, m) = (profile.n(), profile.m());
    for x in [winner, target] {
        if x >= m {
            return Err(Error::IndexOutOfRange {
                what: "alternative",
                index: x,
                len: m,
            });
        }
    }
    let p = n + m;
    let pairs = pair_count(p);
    let vars = pairs + usize::from(pins.is_some());
    let mut objective = vec![0.0; vars];
    for i in 0..n {
        objective[pair_index(i, n + target, p)] += 1.0;
    }
    let mut lp = LinearProgram::new(objective)?;
    for a in 0..p {
        for b in a + 1..p {
            for c in b + 1..p {
                let (ab, ac, bc) = (pair_index(a, b, p), pair_index(a, c, p), pair_index(b, c, p));
                lp.add_sparse(&[(ab, 1.0), (ac, -1.0), (bc, -1.0)], Relation::Le, 0.0)?;
                lp.add_sparse(&[(ac, 1.0), (ab, -1.0), (bc, -1.0)], Relation::Le, 0.0)?;
                lp.add_sparse(&[(bc, 1.0), (ab, -1.0), (ac, -1.0)], Relation::Le, 0.0)?;
            }
        }
    }
    for i in 0..n {
        for w in profile.ranking(i).windows(2) {
            lp.add_sparse(
                &[(pair_index(i, n + w[0], p), 1.0), (pair_index(i, n + w[1], p), -1.0)],
                Relation::Ge,
                0.0,
            )?;
        }
    }
    let norm: Vec<(usize, f64)> = (0..n).map(|i| (pair_index(i, n + winner, p), 1.0)).collect();
    lp.add_sparse(&norm, Relation::Eq, 1.0)?;
    if let Some(pins) = pins {
        if pins.len() != m || pins.iter().any(|r| r.len() != m) {
            return Err(Error::ParamOutOfRange(format!(
                "pinned distances must form a {m}x{m} matrix"
            )));
        }
        for x in 0..m {
            for y in x + 1..m {
                let d = pins[x][y];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::ParamOutOfRange(format!("pinned distance d({x},{y}) = {d}")));
                }
                lp.add_sparse(
                    &[(pair_index(n + x, n + y, p), 1.0), (pairs, -d)],
                    Relation::Eq,
                    0.0,
                )?;
            }
        }
    }
    Ok(lp)
}

/// Worst-case distortion of `winner` over all metrics consistent with
/// `profile`, one LP per competing alternative.
pub fn adversarial_distortion(profile: &OrdinalProfile, winner: usize) -> Result<DistortionReport> {
    adversarial_distortion_with(profile, winner, &AdversaryOptions::default())
}

pub fn adversarial_distortion_with(
    profile: &OrdinalProfile,
    winner: usize,
    opts: &AdversaryOptions,
) -> Result<DistortionReport> {
    let m = profile.m();
    if winner >= m {
        return Err(Error::IndexOutOfRange {
            what: "winner",
            index: winner,
            len: m,
        });
    }
    let tie_rule = TieRule::PerAgent {
        orders: profile.rankings().to_vec(),
    };
    let mut best: Option<(usize, f64, LpSolution)> = None;
    for o in (0..m).filter(|&o| o != winner) {
        let lp = adversary_lp(profile, winner, o, opts.pins.as_deref())?;
        let sol = solve_with(&lp, &opts.solver)?;
        match sol.status {
            LpStatus::Infeasible => return Err(Error::AdversaryInfeasible { alternative: o }),
            LpStatus::Unbounded => {
                return Ok(DistortionReport {
                    winner,
                    winner_welfare: 0.0,
                    best_alt: o,
                    best_welfare: f64::INFINITY,
                    distortion: f64::INFINITY,
                    degenerate: false,
                    witness: None,
                    tie_rule: Some(tie_rule),
                    method: Method::LpAdversary,
                });
            }
            LpStatus::Optimal => {
                if best.as_ref().is_none_or(|b| sol.objective_value > b.1) {
                    best = Some((o, sol.objective_value, sol));
                }
            }
        }
    }
    let Some((o, value, sol)) = best else {
        return Ok(DistortionReport {
            winner,
            winner_welfare: 1.0,
            best_alt: winner,
            best_welfare: 1.0,
            distortion: 1.0,
            degenerate: false,
            witness: None,
            tie_rule: None,
            method: Method::LpAdversary,
        });
    };
    let witness = assemble_witness(profile, &sol.values)?;
    let (best_alt, best_welfare) = if value > 1.0 { (o, value) } else { (winner, 1.0) };
    let (distortion, degenerate) = welfare_ratio(best_welfare, 1.0);
    Ok(DistortionReport {
        winner,
        winner_welfare: 1.0,
        best_alt,
        best_welfare,
        distortion,
        degenerate,
        witness: Some(witness),
        tie_rule: Some(tie_rule),
        method: Method::LpAdversary,
    })
}

fn assemble_witness(profile: &OrdinalProfile, values: &[f64]) -> Result<MetricInstance> {
    let p = profile.n() + profile.m();
    let mut dist = vec![0.0; p * p];
    for a in 0..p {
        for b in a + 1..p {
            let d = values[pair_index(a, b, p)].max(0.0);
            dist[a * p + b] = d;
            dist[b * p + a] = d;
        }
    }
    MetricInstance::from_matrix(profile.n(), profile.m(), dist, profile.grouping().clone())
}
