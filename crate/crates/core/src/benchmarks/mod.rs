//! Constrained two-dimensional benchmark surfaces and the flow-reactor task.
//!
//! Continuous surfaces take normalized inputs in `[0, 1]^2` and are evaluated
//! after mapping to their native domain; their constraints are written on the
//! normalized coordinates. Discrete surfaces take option indices `0..=20` on
//! both axes and their constraints are written on those integers.

mod flow;
pub mod tables;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chimera::{Goal, ObjectiveSpec};
use crate::domain::{Constraint, ParamVector, ParameterDef, ParameterSpace};
use crate::error::{Error, Result};

pub use flow::{eval_flow_reactor, flow_cost, flow_reactor_feasible, flow_yield_proxy};

/// Options per axis of the discrete surfaces.
pub const GRID_OPTIONS: usize = 21;

/// Global minimum of Branin (all three degenerate minima share it).
pub const BRANIN_MIN: f64 = 0.397_887_357_729_738_16;

/// Constrained minimum of Dejong: the feasible points closest to the origin lie
/// on the band edge `|x0 - x1| = 0.1` (normalized), i.e. native `(0.5, -0.5)`.
pub const DEJONG_CONSTRAINED_MIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    Branin,
    Schwefel,
    Dejong,
    DiscreteAckley,
    Slope,
    Sphere,
    Michalewicz,
    Camel,
    FlowReactor,
}

/// Minimum value and every feasible location attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum {
    pub locations: Vec<ParamVector>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct BenchmarkSurface {
    pub surface: Surface,
    pub name: &'static str,
    pub space: ParameterSpace,
    pub known_optimum: Option<KnownOptimum>,
    /// Number of feasible grid points (discrete surfaces).
    pub feasible_count: Option<usize>,
}

impl BenchmarkSurface {
    pub fn evaluate(&self, x: &ParamVector) -> Result<Vec<f64>> {
        self.surface.evaluate(x)
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Surface {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Surface {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Surface::from_name(&name).map_err(serde::de::Error::custom)
    }
}

impl Surface {
    pub const ALL: [Surface; 9] = [
        Surface::Branin,
        Surface::Schwefel,
        Surface::Dejong,
        Surface::DiscreteAckley,
        Surface::Slope,
        Surface::Sphere,
        Surface::Michalewicz,
        Surface::Camel,
        Surface::FlowReactor,
    ];

    /// The eight single-objective analytical benchmarks.
    pub const ANALYTICAL: [Surface; 8] = [
        Surface::Branin,
        Surface::Schwefel,
        Surface::Dejong,
        Surface::DiscreteAckley,
        Surface::Slope,
        Surface::Sphere,
        Surface::Michalewicz,
        Surface::Camel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Surface::Branin => "branin",
            Surface::Schwefel => "schwefel",
            Surface::Dejong => "dejong",
            Surface::DiscreteAckley => "discrete_ackley",
            Surface::Slope => "slope",
            Surface::Sphere => "sphere",
            Surface::Michalewicz => "michalewicz",
            Surface::Camel => "camel",
            Surface::FlowReactor => "flow_reactor",
        }
    }

    pub fn from_name(name: &str) -> Result<Surface> {
        let key: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Surface::ALL
            .into_iter()
            .find(|s| s.name().replace('_', "") == key)
            .ok_or_else(|| Error::Name(name.to_string()))
    }

    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            Surface::Slope | Surface::Sphere | Surface::Michalewicz | Surface::Camel
        )
    }

    pub fn objectives(self) -> Vec<ObjectiveSpec> {
        match self {
            Surface::FlowReactor => vec![
                ObjectiveSpec::new("yield", Goal::Maximize, Some(0.9)),
                ObjectiveSpec::new("cost", Goal::Minimize, None),
            ],
            _ => vec![ObjectiveSpec::new("y", Goal::Minimize, None)],
        }
    }

    pub fn space(self) -> ParameterSpace {
        let params = match self {
            Surface::FlowReactor => vec![
                ParameterDef::continuous("T", 100.0, 150.0),
                ParameterDef::continuous("F_C", 0.0, 200.0),
                ParameterDef::continuous("F_S", 0.0, 200.0),
            ],
            s if s.is_discrete() => vec![
                ParameterDef::discrete("x0", 0..GRID_OPTIONS as i64),
                ParameterDef::discrete("x1", 0..GRID_OPTIONS as i64),
            ],
            _ => vec![
                ParameterDef::continuous("x0", 0.0, 1.0),
                ParameterDef::continuous("x1", 0.0, 1.0),
            ],
        };
        let params = params
            .into_iter()
            .collect::<Result<Vec<_>>>()
            .expect("static definitions");
        let constraint: Constraint = Arc::new(move |x: &ParamVector| self.is_feasible(x));
        ParameterSpace::new(params)
            .expect("static definitions")
            .with_shared_constraint(constraint)
    }

    pub fn build(self) -> BenchmarkSurface {
        BenchmarkSurface {
            surface: self,
            name: self.name(),
            space: self.space(),
            known_optimum: self.known_optimum(),
            feasible_count: self.feasible_grid().ok().map(|g| g.len()),
        }
    }

    /// Feasibility predicate on normalized (continuous) or index (discrete)
    /// coordinates.
    pub fn is_feasible(self, x: &ParamVector) -> bool {
        match self {
            Surface::Branin => {
                let y0 = (x[0] - 0.12389382).powi(2) + (x[1] - 0.81833333).powi(2);
                let y1 = (x[0] - 0.961652).powi(2) + (x[1] - 0.165).powi(2);
                !(y0 < 0.2_f64.powi(2) || y1 < 0.35_f64.powi(2))
            }
            Surface::Schwefel => tables::schwefel_circles().iter().all(|c| {
                let d = ((c.center[0] - x[0]).powi(2) + (c.center[1] - x[1]).powi(2)).sqrt();
                d >= c.radius
            }),
            Surface::Dejong => {
                let y = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
                !((x[0] - x[1]).abs() < 0.1 || (0.05 < y && y < 0.15))
            }
            Surface::DiscreteAckley => {
                let (a, b) = (x[0], x[1]);
                !((0.41 < a && a < 0.46) || (0.54 < a && a < 0.59))
                    && !((0.34 < b && b < 0.41) || (0.59 < b && b < 0.66))
            }
            Surface::Slope => {
                let y = x[0].powi(2) + x[1].powi(2);
                !((5.0 < y && y < 25.0) || (70.0 < y && y < 110.0) || (200.0 < y && y < 300.0))
            }
            Surface::Sphere => ![9.0, 11.0].contains(&x[0]) && ![9.0, 11.0].contains(&x[1]),
            Surface::Michalewicz => {
                let y = (x[0] - 14.0).powi(2) + (x[1] - 10.0).powi(2);
                if 5.0 < y && y < 30.0 {
                    return false;
                }
                if 12.5 < x[0] && x[0] < 15.5 && x[1] < 5.5 {
                    return false;
                }
                !(8.5 < x[1] && x[1] < 11.5 && x[0] < 9.5)
            }
            Surface::Camel => {
                let p = (x[0] as u32, x[1] as u32);
                !tables::camel_points().contains(&p)
            }
            Surface::FlowReactor => {
                let space_native = flow::native(x);
                flow_reactor_feasible(space_native[1], space_native[2])
            }
        }
    }

    /// Objective values at `x`. Single-objective surfaces return one value.
    pub fn evaluate(self, x: &ParamVector) -> Result<Vec<f64>> {
        if x.len() != 2 + usize::from(self == Surface::FlowReactor) {
            return Err(Error::SpaceMismatch {
                expected: 2 + usize::from(self == Surface::FlowReactor),
                actual: x.len(),
            });
        }
        Ok(match self {
            Surface::FlowReactor => {
                let n = flow::native(x);
                let (y, c) = eval_flow_reactor(n[0], n[1], n[2])?;
                vec![y, c]
            }
            _ => vec![self.value(x)],
        })
    }

    fn value(self, x: &ParamVector) -> f64 {
        let (u, v) = (x[0], x[1]);
        match self {
            Surface::Branin => branin(-5.0 + 15.0 * u, 15.0 * v),
            Surface::Schwefel => schwefel(&[-500.0 + 1000.0 * u, -500.0 + 1000.0 * v]),
            Surface::Dejong => {
                let (a, b) = (-5.0 + 10.0 * u, -5.0 + 10.0 * v);
                a * a + b * b
            }
            Surface::DiscreteAckley => {
                // Piecewise constant: snap to the 21-level grid first.
                let snap = |t: f64| (t * 20.0).round() / 20.0;
                ackley(-32.768 + 65.536 * snap(u), -32.768 + 65.536 * snap(v))
            }
            Surface::Slope => u + v,
            Surface::Sphere => (u - 10.0).powi(2) + (v - 10.0).powi(2),
            Surface::Michalewicz => michalewicz(PI * u / 20.0, PI * v / 20.0),
            Surface::Camel => six_hump_camel(-3.0 + 6.0 * u / 20.0, -2.0 + 4.0 * v / 20.0),
            Surface::FlowReactor => unreachable!("two-objective surface"),
        }
    }

    /// Every feasible grid point of a discrete surface, row-major in `x0`.
    pub fn feasible_grid(self) -> Result<Vec<ParamVector>> {
        if !self.is_discrete() {
            return Err(Error::Kind(self.name().to_string()));
        }
        Ok((0..GRID_OPTIONS)
            .flat_map(|i| (0..GRID_OPTIONS).map(move |j| ParamVector(vec![i as f64, j as f64])))
            .filter(|x| self.is_feasible(x))
            .collect())
    }

    pub fn known_optimum(self) -> Option<KnownOptimum> {
        let normalized = |a: f64, b: f64, lo: [f64; 2], span: [f64; 2]| {
            ParamVector(vec![(a - lo[0]) / span[0], (b - lo[1]) / span[1]])
        };
        match self {
            Surface::Branin => Some(KnownOptimum {
                locations: vec![normalized(PI, 2.275, [-5.0, 0.0], [15.0, 15.0])],
                value: BRANIN_MIN,
            }),
            Surface::Dejong => Some(KnownOptimum {
                locations: vec![
                    normalized(0.5, -0.5, [-5.0, -5.0], [10.0, 10.0]),
                    normalized(-0.5, 0.5, [-5.0, -5.0], [10.0, 10.0]),
                ],
                value: DEJONG_CONSTRAINED_MIN,
            }),
            Surface::DiscreteAckley => Some(KnownOptimum {
                locations: vec![ParamVector(vec![0.5, 0.5])],
                value: 0.0,
            }),
            Surface::Schwefel => {
                let x: ParamVector = SCHWEFEL_ARGMIN.to_vec().into();
                Some(KnownOptimum {
                    value: self.value(&x),
                    locations: vec![x],
                })
            }
            s if s.is_discrete() => {
                let grid = s.feasible_grid().ok()?;
                let values: Vec<f64> = grid.iter().map(|x| s.value(x)).collect();
                let best = values.iter().copied().fold(f64::INFINITY, f64::min);
                let tol = 1e-12 * best.abs().max(1.0);
                Some(KnownOptimum {
                    locations: grid
                        .into_iter()
                        .zip(&values)
                        .filter(|(_, &v)| v - best <= tol)
                        .map(|(x, _)| x)
                        .collect(),
                    value: best,
                })
            }
            Surface::FlowReactor => None,
            _ => unreachable!(),
        }
    }
}

/// Location of the Schwefel minimum (normalized). It is feasible under the
/// shipped circle table; found by a 3001^2 grid scan plus local refinement.
pub const SCHWEFEL_ARGMIN: [f64; 2] = [0.920_968_745_945_284_4, 0.920_968_746_482_385_2];

/// Evaluates a named single-objective surface.
pub fn eval_surface(name: &str, x: &ParamVector) -> Result<f64> {
    let s = Surface::from_name(name)?;
    if s == Surface::FlowReactor {
        return Err(Error::Kind(format!("{} has two objectives", s.name())));
    }
    Ok(s.evaluate(x)?[0])
}

pub fn is_feasible(name: &str, x: &ParamVector) -> Result<bool> {
    Ok(Surface::from_name(name)?.is_feasible(x))
}

pub fn feasible_grid(name: &str) -> Result<Vec<ParamVector>> {
    Surface::from_name(name)?.feasible_grid()
}

pub fn branin(x1: f64, x2: f64) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let (r, s, t) = (6.0, 10.0, 1.0 / (8.0 * PI));
    (x2 - b * x1 * x1 + c * x1 - r).powi(2) + s * (1.0 - t) * x1.cos() + s
}

pub fn schwefel(x: &[f64]) -> f64 {
    418.9829 * x.len() as f64 - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
}

pub fn ackley(x: f64, y: f64) -> f64 {
    let (a, b, c) = (20.0, 0.2, 2.0 * PI);
    let mean_sq = 0.5 * (x * x + y * y);
    let mean_cos = 0.5 * ((c * x).cos() + (c * y).cos());
    -a * (-b * mean_sq.sqrt()).exp() - mean_cos.exp() + a + std::f64::consts::E
}

pub fn michalewicz(x: f64, y: f64) -> f64 {
    let m = 10;
    -(x.sin() * (x * x / PI).sin().powi(2 * m)) - (y.sin() * (2.0 * y * y / PI).sin().powi(2 * m))
}

pub fn six_hump_camel(x: f64, y: f64) -> f64 {
    (4.0 - 2.1 * x * x + x.powi(4) / 3.0) * x * x + x * y + (-4.0 + 4.0 * y * y) * y * y
}
