//! Instances, ordinal profiles and groupings.
//!
//! Points are numbered agents first (`0..n`) and alternatives after
//! (`n..n+m`); the full pairwise matrix is the canonical representation and
//! line or Euclidean inputs are embedded into it at construction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every metric comparison.
pub const TAU_METRIC: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Agent,
    Alternative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointId {
    pub kind: PointKind,
    pub index: usize,
}

impl PointId {
    pub fn agent(index: usize) -> Self {
        Self {
            kind: PointKind::Agent,
            index,
        }
    }

    pub fn alternative(index: usize) -> Self {
        Self {
            kind: PointKind::Alternative,
            index,
        }
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PointKind::Agent => write!(f, "agent {}", self.index),
            PointKind::Alternative => write!(f, "alternative {}", self.index),
        }
    }
}

/// Fixed partition of agents into `k` nonempty groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Grouping {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGrouping("k must be at least 1".into()));
        }
        let mut members = vec![Vec::new(); k];
        for (i, &g) in assignment.iter().enumerate() {
            if g >= k {
                return Err(Error::InvalidGrouping(format!(
                    "agent {i} assigned to group {g}, but k = {k}"
                )));
            }
            members[g].push(i);
        }
        if let Some(g) = members.iter().position(Vec::is_empty) {
            return Err(Error::InvalidGrouping(format!("group {g} is empty")));
        }
        Ok(Self {
            assignment,
            members,
        })
    }

    /// Everyone in one group (the centralized setting).
    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![0; n], 1)
    }

    /// Consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let assignment = sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &s)| std::iter::repeat_n(g, s))
            .collect();
        Self::new(assignment, sizes.len())
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn group_of(&self, agent: usize) -> usize {
        self.assignment[agent]
    }

    /// Agents of group `g` in ascending index order.
    pub fn members(&self, g: usize) -> &[usize] {
        &self.members[g]
    }

    pub fn size(&self, g: usize) -> usize {
        self.members[g].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinePositions {
    pub agents: Vec<f64>,
    pub alternatives: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("distance matrix has {found} entries, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite distance between {p} and {q}")]
    NonFinite { p: PointId, q: PointId },
    #[error("negative distance {value} between {p} and {q}")]
    NegativeDistance { p: PointId, q: PointId, value: f64 },
    #[error("nonzero self-distance {value} at {p}")]
    NonzeroSelfDistance { p: PointId, value: f64 },
    #[error("d({p},{q}) = {forward} but d({q},{p}) = {backward}")]
    AsymmetryViolation {
        p: PointId,
        q: PointId,
        forward: f64,
        backward: f64,
    },
    #[error("d({x},{y}) exceeds d({x},{z}) + d({z},{y}) by {slack}")]
    TriangleViolation {
        x: PointId,
        y: PointId,
        z: PointId,
        slack: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricInstance {
    n: usize,
    m: usize,
    dist: Vec<f64>,
    grouping: Grouping,
    line: Option<LinePositions>,
}

impl MetricInstance {
    /// Wraps a row-major `(n+m)^2` matrix. Only dimensions are checked here;
    /// run [`validate_metric`] for the metric axioms.
    pub fn from_matrix(n: usize, m: usize, dist: Vec<f64>, grouping: Grouping) -> Result<Self> {
        let p = n + m;
        if dist.len() != p * p {
            return Err(ValidationError::DimensionMismatch {
                expected: p * p,
                found: dist.len(),
            }
            .into());
        }
        check_grouping(n, &grouping)?;
        Ok(Self {
            n,
            m,
            dist,
            grouping,
            line: None,
        })
    }

    pub fn from_line(agents: Vec<f64>, alternatives: Vec<f64>, grouping: Grouping) -> Result<Self> {
        let coords: Vec<f64> = agents.iter().chain(&alternatives).copied().collect();
        let p = coords.len();
        let mut dist = vec![0.0; p * p];
        for a in 0..p {
            for b in 0..p {
                dist[a * p + b] = (coords[a] - coords[b]).abs();
            }
        }
        let mut inst = Self::from_matrix(agents.len(), alternatives.len(), dist, grouping)?;
        inst.line = Some(LinePositions {
            agents,
            alternatives,
        });
        Ok(inst)
    }

    /// Euclidean distances between coordinate vectors of equal dimension.
    pub fn from_points(
        agents: &[Vec<f64>],
        alternatives: &[Vec<f64>],
        grouping: Grouping,
    ) -> Result<Self> {
        let pts: Vec<&Vec<f64>> = agents.iter().chain(alternatives).collect();
        let p = pts.len();
        let mut dist = vec![0.0; p * p];
        for a in 0..p {
            for b in a + 1..p {
                let d = pts[a]
                    .iter()
                    .zip(pts[b])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                dist[a * p + b] = d;
                dist[b * p + a] = d;
            }
        }
        Self::from_matrix(agents.len(), alternatives.len(), dist, grouping)
    }

    /// Builds a full matrix from agent-alternative and alternative-alternative
    /// distances. Agent-agent distances are completed with the smallest
    /// value compatible with the triangle inequality,
    /// `max_x |d(i,x) - d(j,x)|`; validate the result.
    pub fn from_bipartite(
        agent_alt: &[Vec<f64>],
        alt_alt: &[Vec<f64>],
        grouping: Grouping,
    ) -> Result<Self> {
        let n = agent_alt.len();
        let m = alt_alt.len();
        if let Some(row) = agent_alt.iter().chain(alt_alt).find(|r| r.len() != m) {
            return Err(ValidationError::DimensionMismatch {
                expected: m,
                found: row.len(),
            }
            .into());
        }
        let p = n + m;
        let mut dist = vec![0.0; p * p];
        for i in 0..n {
            for x in 0..m {
                dist[i * p + n + x] = agent_alt[i][x];
                dist[(n + x) * p + i] = agent_alt[i][x];
            }
            for j in 0..n {
                let d = (0..m)
                    .map(|x| (agent_alt[i][x] - agent_alt[j][x]).abs())
                    .fold(0.0, f64::max);
                dist[i * p + j] = d;
            }
        }
        for x in 0..m {
            for y in 0..m {
                dist[(n + x) * p + n + y] = alt_alt[x][y];
            }
        }
        Self::from_matrix(n, m, dist, grouping)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.grouping.k()
    }

    pub fn num_points(&self) -> usize {
        self.n + self.m
    }

    pub fn grouping(&self) -> &Grouping {
        &self.grouping
    }

    pub fn line(&self) -> Option<&LinePositions> {
        self.line.as_ref()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn point_index(&self, id: PointId) -> Result<usize> {
        match id.kind {
            PointKind::Agent if id.index < self.n => Ok(id.index),
            PointKind::Alternative if id.index < self.m => Ok(self.n + id.index),
            PointKind::Agent => Err(Error::IndexOutOfRange {
                what: "agent",
                index: id.index,
                len: self.n,
            }),
            PointKind::Alternative => Err(Error::IndexOutOfRange {
                what: "alternative",
                index: id.index,
                len: self.m,
            }),
        }
    }

    pub fn point_id(&self, raw: usize) -> PointId {
        if raw < self.n {
            PointId::agent(raw)
        } else {
            PointId::alternative(raw - self.n)
        }
    }

    /// Distance between raw point indices.
    #[inline]
    pub fn d(&self, p: usize, q: usize) -> f64 {
        self.dist[p * self.num_points() + q]
    }

    #[inline]
    pub fn agent_alt(&self, agent: usize, alt: usize) -> f64 {
        self.d(agent, self.n + alt)
    }

    #[inline]
    pub fn alt_alt(&self, x: usize, y: usize) -> f64 {
        self.d(self.n + x, self.n + y)
    }

    /// Same points with a different grouping of the agents.
    pub fn with_grouping(&self, grouping: Grouping) -> Result<Self> {
        check_grouping(self.n, &grouping)?;
        Ok(Self {
            grouping,
            ..self.clone()
        })
    }

    /// Keeps only the listed alternatives, in the given order.
    pub fn restrict_alternatives(&self, keep: &[usize]) -> Result<Self> {
        for &x in keep {
            if x >= self.m {
                return Err(Error::IndexOutOfRange {
                    what: "alternative",
                    index: x,
                    len: self.m,
                });
            }
        }
        let raw: Vec<usize> = (0..self.n).chain(keep.iter().map(|x| self.n + x)).collect();
        let p = raw.len();
        let mut dist = vec![0.0; p * p];
        for a in 0..p {
            for b in 0..p {
                dist[a * p + b] = self.d(raw[a], raw[b]);
            }
        }
        let mut inst = Self::from_matrix(self.n, keep.len(), dist, self.grouping.clone())?;
        inst.line = self.line.as_ref().map(|l| LinePositions {
            agents: l.agents.clone(),
            alternatives: keep.iter().map(|&x| l.alternatives[x]).collect(),
        });
        Ok(inst)
    }

    /// Renames alternative `x` to `perm[x]`.
    pub fn relabel_alternatives(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m).map_err(Error::InvalidTieRule)?;
        let mut inverse = vec![0; self.m];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let mut inst = self.restrict_alternatives(&inverse)?;
        if let Some(l) = &self.line {
            inst.line = Some(LinePositions {
                agents: l.agents.clone(),
                alternatives: inverse.iter().map(|&x| l.alternatives[x]).collect(),
            });
        }
        Ok(inst)
    }

    /// True when line positions are present and every matrix entry equals
    /// the coordinate difference.
    fn line_embedded(&self) -> bool {
        let Some(line) = &self.line else {
            return false;
        };
        let coords: Vec<f64> = line.agents.iter().chain(&line.alternatives).copied().collect();
        let p = coords.len();
        p == self.num_points()
            && (0..p).all(|a| (0..p).all(|b| self.dist[a * p + b] == (coords[a] - coords[b]).abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dist: self.dist.iter().map(|d| d * c).collect(),
            line: self.line.as_ref().map(|l| LinePositions {
                agents: l.agents.iter().map(|v| v * c).collect(),
                alternatives: l.alternatives.iter().map(|v| v * c).collect(),
            }),
            ..self.clone()
        }
    }

    /// Per-group total distance to every alternative, `scores[g][x]`.
    pub fn group_welfare(&self) -> Vec<Vec<f64>> {
        (0..self.k())
            .map(|g| {
                (0..self.m)
                    .map(|x| {
                        self.grouping
                            .members(g)
                            .iter()
                            .map(|&i| self.agent_alt(i, x))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

fn check_grouping(n: usize, grouping: &Grouping) -> Result<()> {
    if grouping.n() != n {
        return Err(Error::InvalidGrouping(format!(
            "grouping covers {} agents, instance has {n}",
            grouping.n()
        )));
    }
    Ok(())
}

fn check_permutation(perm: &[usize], m: usize) -> std::result::Result<(), String> {
    if perm.len() != m {
        return Err(format!("expected a permutation of {m} alternatives, got {} entries", perm.len()));
    }
    let mut seen = vec![false; m];
    for &x in perm {
        if x >= m || std::mem::replace(&mut seen[x], true) {
            return Err(format!("{perm:?} is not a permutation of 0..{m}"));
        }
    }
    Ok(())
}

/// Checks symmetry, nonnegativity, zero diagonal and every triangle
/// inequality (within [`TAU_METRIC`]). Reports the first violation in
/// `(x, y, z)` lexicographic order.
pub fn validate_metric(instance: &MetricInstance) -> std::result::Result<(), ValidationError> {
    let p = instance.num_points();
    if instance.dist.len() != p * p {
        return Err(ValidationError::DimensionMismatch {
            expected: p * p,
            found: instance.dist.len(),
        });
    }
    let id = |r| instance.point_id(r);
    for a in 0..p {
        for b in 0..p {
            let v = instance.d(a, b);
            if !v.is_finite() {
                return Err(ValidationError::NonFinite { p: id(a), q: id(b) });
            }
            if v < 0.0 {
                return Err(ValidationError::NegativeDistance {
                    p: id(a),
                    q: id(b),
                    value: v,
                });
            }
        }
        let self_d = instance.d(a, a);
        if self_d > TAU_METRIC {
            return Err(ValidationError::NonzeroSelfDistance {
                p: id(a),
                value: self_d,
            });
        }
        for b in a + 1..p {
            let (f, r) = (instance.d(a, b), instance.d(b, a));
            if (f - r).abs() > TAU_METRIC {
                return Err(ValidationError::AsymmetryViolation {
                    p: id(a),
                    q: id(b),
                    forward: f,
                    backward: r,
                });
            }
        }
    }
    if instance.line_embedded() {
        // |u - v| on the reals satisfies every triangle inequality
        return Ok(());
    }
    for x in 0..p {
        for y in 0..p {
            let dxy = instance.d(x, y);
            for z in 0..p {
                let slack = dxy - instance.d(x, z) - instance.d(z, y);
                if slack > TAU_METRIC {
                    return Err(ValidationError::TriangleViolation {
                        x: id(x),
                        y: id(y),
                        z: id(z),
                        slack,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Global precedence among alternatives: `order[0]` wins every tie.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precedence(Vec<usize>);

impl Precedence {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        check_permutation(&order, m).map_err(Error::InvalidTieRule)?;
        Ok(Self(order))
    }

    pub fn identity(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    /// Rank keys: lower key wins ties.
    pub fn keys(&self) -> Vec<usize> {
        let mut keys = vec![0; self.0.len()];
        for (pos, &x) in self.0.iter().enumerate() {
            keys[x] = pos;
        }
        keys
    }

    /// Precedence for the instance relabeled by `perm` (old `x` becomes
    /// `perm[x]`), so that the same underlying alternative keeps its rank.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self(self.0.iter().map(|&x| perm[x]).collect())
    }
}

/// Resolves equidistant alternatives when deriving rankings from a metric.
/// Alternatives earlier in the relevant order are ranked higher (treated as
/// farther).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TieRule {
    /// Lower alternative index ranked higher.
    #[default]
    IndexOrder,
    /// One order for every agent.
    Precedence { order: Precedence },
    /// A separate order per agent.
    PerAgent { orders: Vec<Vec<usize>> },
}

impl TieRule {
    fn keys(&self, n: usize, m: usize) -> Result<Vec<Vec<usize>>> {
        match self {
            TieRule::IndexOrder => Ok(vec![(0..m).collect(); n]),
            TieRule::Precedence { order } => {
                if order.order().len() != m {
                    return Err(Error::InvalidTieRule(format!(
                        "precedence covers {} alternatives, instance has {m}",
                        order.order().len()
                    )));
                }
                Ok(vec![Precedence::new(order.order().to_vec())?.keys(); n])
            }
            TieRule::PerAgent { orders } => {
                if orders.len() != n {
                    return Err(Error::InvalidTieRule(format!(
                        "{} per-agent orders for {n} agents",
                        orders.len()
                    )));
                }
                orders
                    .iter()
                    .map(|o| Ok(Precedence::new(o.clone())?.keys()))
                    .collect()
            }
        }
    }

    /// Precedence used for argmax ties in mechanisms: the global order when
    /// there is one, index order otherwise.
    pub fn precedence(&self, m: usize) -> Precedence {
        match self {
            TieRule::Precedence { order } if order.order().len() == m => order.clone(),
            _ => Precedence::identity(m),
        }
    }

    /// The rule restricted to the alternatives `kept` (ascending original
    /// indices), relabeled to `0..kept.len()`.
    pub fn restrict(&self, kept: &[usize]) -> Self {
        let sub = |order: &[usize]| -> Vec<usize> {
            order
                .iter()
                .filter_map(|x| kept.iter().position(|k| k == x))
                .collect()
        };
        match self {
            TieRule::IndexOrder => TieRule::IndexOrder,
            TieRule::Precedence { order } => TieRule::Precedence {
                order: Precedence(sub(order.order())),
            },
            TieRule::PerAgent { orders } => TieRule::PerAgent {
                orders: orders.iter().map(|o| sub(o)).collect(),
            },
        }
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        match self {
            // Index order is not relabeling-invariant; pin it explicitly.
            TieRule::IndexOrder => TieRule::Precedence {
                order: Precedence::identity(perm.len()).relabel(perm),
            },
            TieRule::Precedence { order } => TieRule::Precedence {
                order: order.relabel(perm),
            },
            TieRule::PerAgent { orders } => TieRule::PerAgent {
                orders: orders
                    .iter()
                    .map(|o| o.iter().map(|&x| perm[x]).collect())
                    .collect(),
            },
        }
    }
}

/// Per-agent strict rankings, farthest alternative first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalProfile {
    m: usize,
    rankings: Vec<Vec<usize>>,
    positions: Vec<Vec<usize>>,
    grouping: Grouping,
}

impl OrdinalProfile {
    pub fn new(m: usize, rankings: Vec<Vec<usize>>, grouping: Grouping) -> Result<Self> {
        check_grouping(rankings.len(), &grouping)?;
        if m == 0 {
            return Err(Error::InvalidRanking {
                agent: 0,
                reason: "no alternatives".into(),
            });
        }
        let positions = rankings
            .iter()
            .enumerate()
            .map(|(i, r)| {
                check_permutation(r, m).map_err(|reason| Error::InvalidRanking { agent: i, reason })?;
                let mut pos = vec![0; m];
                for (p, &x) in r.iter().enumerate() {
                    pos[x] = p;
                }
                Ok(pos)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            m,
            rankings,
            positions,
            grouping,
        })
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.grouping.k()
    }

    pub fn grouping(&self) -> &Grouping {
        &self.grouping
    }

    pub fn rankings(&self) -> &[Vec<usize>] {
        &self.rankings
    }

    pub fn ranking(&self, agent: usize) -> &[usize] {
        &self.rankings[agent]
    }

    pub fn top(&self, agent: usize) -> usize {
        self.rankings[agent][0]
    }

    /// Rank position of `alt` for `agent`; 0 is the farthest.
    pub fn position(&self, agent: usize, alt: usize) -> usize {
        self.positions[agent][alt]
    }

    /// Rankings of the members of group `g`, in ascending agent order.
    pub fn group_rankings(&self, g: usize) -> Vec<&[usize]> {
        self.grouping
            .members(g)
            .iter()
            .map(|&i| self.rankings[i].as_slice())
            .collect()
    }

    pub fn relabel_alternatives(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m).map_err(Error::InvalidTieRule)?;
        let rankings = self
            .rankings
            .iter()
            .map(|r| r.iter().map(|&x| perm[x]).collect())
            .collect();
        Self::new(self.m, rankings, self.grouping.clone())
    }

    pub fn with_grouping(&self, grouping: Grouping) -> Result<Self> {
        Self::new(self.m, self.rankings.clone(), grouping)
    }

    /// Whether every ranking is weakly consistent with the metric:
    /// `x` above `y` implies `d(i,x) >= d(i,y) - TAU_METRIC`.
    pub fn is_consistent_with(&self, instance: &MetricInstance) -> bool {
        if instance.n() != self.n() || instance.m() != self.m {
            return false;
        }
        self.rankings.iter().enumerate().all(|(i, r)| {
            r.windows(2)
                .all(|w| instance.agent_alt(i, w[0]) >= instance.agent_alt(i, w[1]) - TAU_METRIC)
        })
    }
}

/// Rankings by decreasing distance. Distances within [`TAU_METRIC`] of the
/// current maximum count as ties and are ordered by `tie_rule`.
pub fn derive_profile(instance: &MetricInstance, tie_rule: &TieRule) -> Result<OrdinalProfile> {
    let (n, m) = (instance.n(), instance.m());
    let keys = tie_rule.keys(n, m)?;
    let rankings = (0..n)
        .map(|i| {
            let mut remaining: Vec<usize> = (0..m).collect();
            let mut ranking = Vec::with_capacity(m);
            while !remaining.is_empty() {
                let far = remaining
                    .iter()
                    .map(|&x| instance.agent_alt(i, x))
                    .fold(f64::NEG_INFINITY, f64::max);
                let (slot, _) = remaining
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| instance.agent_alt(i, x) >= far - TAU_METRIC)
                    .min_by_key(|(_, &x)| keys[i][x])
                    .expect("nonempty");
                ranking.push(remaining.remove(slot));
            }
            ranking
        })
        .collect();
    OrdinalProfile::new(m, rankings, instance.grouping().clone())
}

/// `SW(x)`: total distance of all agents from `alt`.
pub fn social_welfare(instance: &MetricInstance, alt: usize) -> Result<f64> {
    if alt >= instance.m() {
        return Err(Error::IndexOutOfRange {
            what: "alternative",
            index: alt,
            len: instance.m(),
        });
    }
    Ok((0..instance.n()).map(|i| instance.agent_alt(i, alt)).sum())
}

/// Welfare-maximizing alternative; ties go to the lowest index.
pub fn optimal_alternative(instance: &MetricInstance) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for x in 0..instance.m() {
        let sw = (0..instance.n()).map(|i| instance.agent_alt(i, x)).sum::<f64>();
        if sw > best.1 {
            best = (x, sw);
        }
    }
    best
}
