//! Hierarchical scalarization of several objectives into a single merit.
//!
//! Objectives are ordered by priority and each may carry an absolute
//! satisfaction threshold. An entry's merit is `-k + g_hat`, where `k` is the
//! 1-based index of its first unsatisfied objective (`m + 1` if all are
//! satisfied) and `g_hat` is that objective's min-max normalized value over
//! the whole history (the last objective's when all are satisfied). Tiers
//! therefore occupy disjoint unit intervals: satisfying more of the
//! prioritized thresholds always gives a strictly lower merit. Merits lie in
//! `[-(m + 1), 0]`.
//!
//! Normalization depends on the full history, so merits must be recomputed
//! whenever a new entry arrives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surrogate::min_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Goal {
    #[serde(rename = "min", alias = "minimize")]
    Minimize,
    #[serde(rename = "max", alias = "maximize")]
    Maximize,
}

impl Goal {
    /// Maps a raw value to the internal minimization convention.
    pub fn internal(self, raw: f64) -> f64 {
        match self {
            Goal::Minimize => raw,
            Goal::Maximize => -raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub name: String,
    pub goal: Goal,
    /// Satisfaction level in raw units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl ObjectiveSpec {
    pub fn new(name: impl Into<String>, goal: Goal, threshold: Option<f64>) -> Self {
        ObjectiveSpec {
            name: name.into(),
            goal,
            threshold,
        }
    }
}

pub fn validate_specs(specs: &[ObjectiveSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Spec("at least one objective is required".into()));
    }
    if let Some(i) = specs[..specs.len() - 1]
        .iter()
        .position(|s| s.threshold.is_none())
    {
        return Err(Error::Spec(format!(
            "objective `{}` needs a threshold: only the last objective may omit one",
            specs[i].name
        )));
    }
    Ok(())
}

/// One merit per history entry; lower is better.
///
/// Thresholds are tested in raw units, so an entry counts as satisfying an
/// objective exactly when its raw value meets the target. Within a tier,
/// entries are ordered by the normalized value of the objective that defines
/// the tier.
pub fn scalarize(specs: &[ObjectiveSpec], history: &[Vec<f64>]) -> Result<Vec<f64>> {
    validate_specs(specs)?;
    if history.is_empty() {
        return Err(Error::Spec("history is empty".into()));
    }
    let m = specs.len();
    if let Some(bad) = history.iter().find(|row| row.len() != m) {
        return Err(Error::Spec(format!(
            "expected {m} objective values per entry, got {}",
            bad.len()
        )));
    }

    // Internal (minimization) values, one column per objective.
    let internal: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            history
                .iter()
                .map(|row| specs[i].goal.internal(row[i]))
                .collect()
        })
        .collect();
    let normalized: Vec<Vec<f64>> = internal.iter().map(|col| min_max(col)).collect();
    let thresholds: Vec<Option<f64>> = specs
        .iter()
        .map(|s| s.threshold.map(|t| s.goal.internal(t)))
        .collect();

    Ok((0..history.len())
        .map(|e| {
            let tier = (0..m)
                .find(|&i| match thresholds[i] {
                    Some(t) => internal[i][e] > t,
                    None => true,
                })
                .unwrap_or(m);
            -((tier + 1) as f64) + normalized[tier.min(m - 1)][e]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yield_cost() -> Vec<ObjectiveSpec> {
        vec![
            ObjectiveSpec::new("yield", Goal::Maximize, Some(0.9)),
            ObjectiveSpec::new("cost", Goal::Minimize, None),
        ]
    }

    #[test]
    fn second_tier_compares_cost() {
        let merits = scalarize(&yield_cost(), &[vec![0.95, 10.0], vec![0.95, 5.0]]).unwrap();
        assert!(merits[1] < merits[0]);
    }

    #[test]
    fn first_tier_dominates() {
        let merits = scalarize(&yield_cost(), &[vec![0.95, 10.0], vec![0.80, 1.0]]).unwrap();
        assert!(merits[0] < merits[1]);
    }

    #[test]
    fn single_objective_keeps_order() {
        let specs = vec![ObjectiveSpec::new("y", Goal::Minimize, None)];
        let merits = scalarize(&specs, &[vec![3.0], vec![7.0], vec![5.0]]).unwrap();
        assert_eq!(merits, vec![-1.0, 0.0, -0.5]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            scalarize(&yield_cost(), &[vec![1.0]]),
            Err(Error::Spec(_))
        ));
        let specs = vec![
            ObjectiveSpec::new("a", Goal::Minimize, None),
            ObjectiveSpec::new("b", Goal::Minimize, Some(1.0)),
        ];
        assert!(matches!(
            scalarize(&specs, &[vec![1.0, 1.0]]),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn goal_json_names() {
        let s: ObjectiveSpec =
            serde_json::from_str(r#"{"name":"yield","goal":"max","threshold":0.9}"#).unwrap();
        assert_eq!(s.goal, Goal::Maximize);
        let s: ObjectiveSpec = serde_json::from_str(r#"{"name":"cost","goal":"min"}"#).unwrap();
        assert_eq!(s.threshold, None);
    }
}
