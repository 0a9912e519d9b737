//! Parameter spaces, normalization, and sampling under a known constraint.
//!
//! Every point handled by the optimizers lives in a normalized space: a
//! continuous parameter maps affinely onto `[0, 1]`, discrete and categorical
//! parameters are represented by their option index. The constraint callback
//! always receives the normalized vector.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seedable PRNG used everywhere in the crate (ChaCha with 8 rounds).
///
/// ChaCha output is specified independently of platform and word size, so a
/// seed reproduces the same campaign on every machine.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Total rejection-sampling draws allowed per requested feasible sample.
pub const REJECTION_BUDGET_FACTOR: usize = 200;

/// Default number of probes for Monte-Carlo volume estimation.
pub const DEFAULT_VOLUME_PROBES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ParamKind {
    Continuous {
        low: f64,
        high: f64,
    },
    /// Ordered integer options.
    Discrete {
        options: Vec<i64>,
    },
    Categorical {
        options: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterDef {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParamKind,
}

impl ParameterDef {
    pub fn continuous(name: impl Into<String>, low: f64, high: f64) -> Result<Self> {
        Self::new(name, ParamKind::Continuous { low, high })
    }

    pub fn discrete(
        name: impl Into<String>,
        options: impl IntoIterator<Item = i64>,
    ) -> Result<Self> {
        Self::new(
            name,
            ParamKind::Discrete {
                options: options.into_iter().collect(),
            },
        )
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        options: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        Self::new(
            name,
            ParamKind::Categorical {
                options: options.into_iter().map(Into::into).collect(),
            },
        )
    }

    pub fn new(name: impl Into<String>, kind: ParamKind) -> Result<Self> {
        let def = ParameterDef {
            name: name.into(),
            kind,
        };
        def.validate()?;
        Ok(def)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("`{}`: {msg}", self.name)));
        match &self.kind {
            ParamKind::Continuous { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return bad(format!("requires finite low < high, got [{low}, {high}]"));
                }
            }
            ParamKind::Discrete { options } => {
                if options.len() < 2 {
                    return bad("requires at least two options".into());
                }
                if options.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("options must be distinct and increasing".into());
                }
            }
            ParamKind::Categorical { options } => {
                if options.len() < 2 {
                    return bad("requires at least two options".into());
                }
                for (i, a) in options.iter().enumerate() {
                    if options[i + 1..].contains(a) {
                        return bad(format!("duplicate option `{a}`"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of options for discrete/categorical parameters, `None` for continuous.
    pub fn option_count(&self) -> Option<usize> {
        match &self.kind {
            ParamKind::Continuous { .. } => None,
            ParamKind::Discrete { options } => Some(options.len()),
            ParamKind::Categorical { options } => Some(options.len()),
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, ParamKind::Continuous { .. })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, ParamKind::Discrete { .. })
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, ParamKind::Categorical { .. })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.option_count() {
            None => rng.random::<f64>(),
            Some(m) => rng.random_range(0..m) as f64,
        }
    }
}

/// A raw (user-facing) parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Number(f64),
    Label(String),
}

impl fmt::Display for RawValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawValue::Number(v) => write!(f, "{v}"),
            RawValue::Label(s) => f.write_str(s),
        }
    }
}

/// A point of the normalized space.
///
/// Continuous entries are in `[0, 1]`; discrete and categorical entries hold
/// an option index stored as an integral `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParamVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn index(&self, dim: usize) -> usize {
        self.0[dim] as usize
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for ParamVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        ParamVector(v)
    }
}

/// Feasibility predicate over normalized vectors. `true` means feasible.
pub type Constraint = Arc<dyn Fn(&ParamVector) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ParameterSpace {
    params: Vec<ParameterDef>,
    constraint: Option<Constraint>,
    feasible_fraction: Option<f64>,
}

impl fmt::Debug for ParameterSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParameterSpace")
            .field("params", &self.params)
            .field("constrained", &self.constraint.is_some())
            .field("feasible_fraction", &self.feasible_fraction)
            .finish()
    }
}

/// JSON form of a space; constraints are attached in code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSchema {
    pub parameters: Vec<ParameterDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible_fraction: Option<f64>,
}

impl ParameterSpace {
    pub fn new(params: Vec<ParameterDef>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidParameter(
                "a space needs at least one parameter".into(),
            ));
        }
        for p in &params {
            p.validate()?;
        }
        Ok(ParameterSpace {
            params,
            constraint: None,
            feasible_fraction: None,
        })
    }

    pub fn from_schema(schema: SpaceSchema) -> Result<Self> {
        let space = Self::new(schema.parameters)?;
        match schema.feasible_fraction {
            Some(v) => space.with_feasible_fraction(v),
            None => Ok(space),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::from_schema(serde_json::from_str(json)?)
    }

    pub fn schema(&self) -> SpaceSchema {
        SpaceSchema {
            parameters: self.params.clone(),
            feasible_fraction: self.feasible_fraction,
        }
    }

    pub fn with_constraint<F>(mut self, constraint: F) -> Self
    where
        F: Fn(&ParamVector) -> bool + Send + Sync + 'static,
    {
        self.constraint = Some(Arc::new(constraint));
        self
    }

    pub fn with_shared_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = Some(constraint);
        self
    }

    pub fn with_feasible_fraction(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "feasible_fraction must be in (0, 1], got {fraction}"
            )));
        }
        self.feasible_fraction = Some(fraction);
        Ok(self)
    }

    pub fn params(&self) -> &[ParameterDef] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn is_constrained(&self) -> bool {
        self.constraint.is_some()
    }

    pub fn feasible_fraction(&self) -> Option<f64> {
        self.feasible_fraction
    }

    pub fn is_feasible(&self, x: &ParamVector) -> bool {
        self.constraint.as_ref().is_none_or(|c| c(x))
    }

    /// Checks that `x` has the right length and every entry is in range.
    pub fn check(&self, x: &ParamVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::SpaceMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        for (p, &v) in self.params.iter().zip(x.as_slice()) {
            let ok = match p.option_count() {
                None => (0.0..=1.0).contains(&v),
                Some(m) => v.fract() == 0.0 && v >= 0.0 && (v as usize) < m,
            };
            if !ok {
                return Err(Error::Bounds {
                    param: p.name.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn normalize(&self, raw: &[RawValue]) -> Result<ParamVector> {
        if raw.len() != self.dim() {
            return Err(Error::SpaceMismatch {
                expected: self.dim(),
                actual: raw.len(),
            });
        }
        let out_of_bounds = |p: &ParameterDef, r: &RawValue| Error::Bounds {
            param: p.name.clone(),
            value: r.to_string(),
        };
        let mut values = Vec::with_capacity(raw.len());
        for (p, r) in self.params.iter().zip(raw) {
            let v = match (&p.kind, r) {
                (ParamKind::Continuous { low, high }, RawValue::Number(v)) => {
                    if !(*low..=*high).contains(v) {
                        return Err(out_of_bounds(p, r));
                    }
                    (v - low) / (high - low)
                }
                (ParamKind::Discrete { options }, RawValue::Number(v)) => options
                    .iter()
                    .position(|&o| o as f64 == *v)
                    .ok_or_else(|| out_of_bounds(p, r))?
                    as f64,
                (ParamKind::Categorical { options }, RawValue::Label(s)) => options
                    .iter()
                    .position(|o| o == s)
                    .ok_or_else(|| out_of_bounds(p, r))?
                    as f64,
                _ => return Err(out_of_bounds(p, r)),
            };
            values.push(v);
        }
        Ok(ParamVector(values))
    }

    pub fn denormalize(&self, x: &ParamVector) -> Result<Vec<RawValue>> {
        self.check(x)?;
        Ok(self
            .params
            .iter()
            .zip(x.as_slice())
            .map(|(p, &v)| match &p.kind {
                ParamKind::Continuous { low, high } => RawValue::Number(low + v * (high - low)),
                ParamKind::Discrete { options } => RawValue::Number(options[v as usize] as f64),
                ParamKind::Categorical { options } => RawValue::Label(options[v as usize].clone()),
            })
            .collect())
    }

    /// Numeric view of `x` in native units; categorical entries stay as indices.
    pub fn to_native(&self, x: &ParamVector) -> Vec<f64> {
        self.params
            .iter()
            .zip(x.as_slice())
            .map(|(p, &v)| match &p.kind {
                ParamKind::Continuous { low, high } => low + v * (high - low),
                ParamKind::Discrete { options } => options[v as usize] as f64,
                ParamKind::Categorical { .. } => v,
            })
            .collect()
    }

    /// Per-dimension scale used by distances and diversity measures: the
    /// continuous range is 1, a discrete index range is `M - 1`.
    pub(crate) fn index_span(&self, dim: usize) -> f64 {
        match self.params[dim].option_count() {
            None => 1.0,
            Some(m) => (m - 1) as f64,
        }
    }

    /// Infinity-norm distance in normalized units. Discrete indices are scaled
    /// by `M - 1`; categorical dims contribute 0 when equal and 1 otherwise.
    pub fn distance(&self, a: &ParamVector, b: &ParamVector) -> f64 {
        self.params
            .iter()
            .enumerate()
            .map(|(d, p)| {
                let diff = (a[d] - b[d]).abs();
                if p.is_categorical() {
                    if diff == 0.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    diff / self.index_span(d)
                }
            })
            .fold(0.0, f64::max)
    }

    /// One uniform draw over the full (unconstrained) normalized domain.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamVector {
        ParamVector(self.params.iter().map(|p| p.sample(rng)).collect())
    }

    /// Draws `count` feasible points by uniform sampling plus rejection.
    ///
    /// Gives up with [`Error::Feasibility`] after
    /// `REJECTION_BUDGET_FACTOR * count` total draws.
    pub fn rejection_sample<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<ParamVector>> {
        if count == 0 {
            return Err(Error::Feasibility("requested zero samples".into()));
        }
        let budget = REJECTION_BUDGET_FACTOR * count;
        let mut out = Vec::with_capacity(count);
        for _ in 0..budget {
            let x = self.sample_uniform(rng);
            if self.is_feasible(&x) {
                out.push(x);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        Err(Error::Feasibility(format!(
            "found {} of {count} feasible samples in {budget} draws; the feasible region is likely below ~1% of the domain",
            out.len()
        )))
    }

    /// Monte-Carlo estimate of the feasible fraction of the domain.
    pub fn estimate_feasible_fraction<R: Rng + ?Sized>(
        &self,
        n_probe: usize,
        rng: &mut R,
    ) -> Result<f64> {
        if n_probe == 0 {
            return Err(Error::Feasibility("zero probes requested".into()));
        }
        let hits = (0..n_probe)
            .filter(|_| self.is_feasible(&self.sample_uniform(rng)))
            .count();
        if hits == 0 {
            return Err(Error::Feasibility(format!(
                "no feasible point among {n_probe} probes"
            )));
        }
        Ok(hits as f64 / n_probe as f64)
    }

    /// The user-supplied feasible fraction, or a fresh estimate with the
    /// default probe count.
    pub fn resolve_feasible_fraction<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self.feasible_fraction {
            Some(v) => Ok(v),
            None if !self.is_constrained() => Ok(1.0),
            None => self.estimate_feasible_fraction(DEFAULT_VOLUME_PROBES, rng),
        }
    }
}
