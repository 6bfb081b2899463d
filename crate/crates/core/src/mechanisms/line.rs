use crate::error::{Error, Result};
use crate::model::MetricInstance;

use super::{Mechanism, MechanismOutcome};

/// A line instance restricted to its two extreme alternatives.
#[derive(Clone, Debug, PartialEq)]
pub struct LineReduction {
    pub instance: MetricInstance,
    /// Original indices of the kept alternatives, ascending; reduced index
    /// `r` corresponds to `kept[r]`.
    pub kept: Vec<usize>,
}

impl LineReduction {
    pub fn original(&self, reduced: usize) -> usize {
        self.kept[reduced]
    }
}

/// Keeps the leftmost and rightmost alternatives by coordinate (coordinate
/// ties go to the lower index). One of them always maximizes welfare on a
/// line.
pub fn reduce_line_instance(instance: &MetricInstance) -> Result<LineReduction> {
    let line = instance.line().ok_or(Error::NotALineInstance)?;
    let alts = &line.alternatives;
    if alts.is_empty() {
        return Err(Error::NotALineInstance);
    }
    let mut left = 0;
    let mut right = 0;
    for (x, &c) in alts.iter().enumerate() {
        if c < alts[left] {
            left = x;
        }
        if c > alts[right] {
            right = x;
        }
    }
    let mut kept = vec![left, right];
    kept.sort_unstable();
    kept.dedup();
    Ok(LineReduction {
        instance: instance.restrict_alternatives(&kept)?,
        kept,
    })
}

/// Runs a mechanism on the reduced line instance and reports the outcome in
/// the original alternative labels.
#[derive(Clone, Debug)]
pub struct LineReduced<M>(pub M);

impl<M: Mechanism> Mechanism for LineReduced<M> {
    fn name(&self) -> String {
        format!("{}-line", self.0.name())
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        let red = reduce_line_instance(instance)?;
        let out = self.0.run(&red.instance)?;
        Ok(out.map_alternatives(&red.kept, instance.m()))
    }
}
