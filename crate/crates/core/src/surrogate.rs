//! Kernel-regression surrogate and the exploration/exploitation acquisition.
//!
//! Each past observation contributes one kernel. Continuous dimensions use a
//! Gaussian with precision `tau = 12 rho^2`; discrete and categorical
//! dimensions use a temperature-softened indicator with temperature
//! `0.5 + 10 / rho`, where `rho = n / V_C` is the observation density in the
//! feasible region. Categorical weights are scaled by the option count so
//! that the uniform reference density is exactly 1 everywhere.
//!
//! Gaussian kernels are not truncated at the domain boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::{ParamVector, ParameterSpace};

/// A measured point of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub params: ParamVector,
    /// Internal objective; lower is better (maximization goals are negated).
    pub objective: f64,
    /// Raw measurement as reported, one entry per objective.
    pub measurement: Vec<f64>,
    /// Merit assigned by the hierarchical scalarizer in multi-objective runs.
    pub scalarized: Option<f64>,
}

impl Observation {
    pub fn new(params: ParamVector, objective: f64) -> Self {
        Observation {
            params,
            objective,
            measurement: vec![objective],
            scalarized: None,
        }
    }

    /// The value the surrogate regresses: scalarized merit when present.
    pub fn loss(&self) -> f64 {
        self.scalarized.unwrap_or(self.objective)
    }
}

/// Min-max normalization of the history losses onto `[0, 1]`.
///
/// Single or constant histories map to all zeros.
pub fn normalize_objectives(history: &[Observation]) -> Vec<f64> {
    let losses: Vec<f64> = history.iter().map(Observation::loss).collect();
    min_max(&losses)
}

pub(crate) fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .iter()
        .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.0 })
        .collect()
}

/// Kernel used on discrete (ordered) dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteKernel {
    /// Same softened indicator as categorical dimensions.
    #[default]
    Categorical,
    /// Gaussian on the index scaled to `[0, 1]`; experimental.
    GaussianIndex,
}

#[derive(Debug, Clone, Copy)]
enum DimKernel {
    Gaussian,
    /// Gaussian on `index / span`.
    GaussianIndex {
        span: f64,
    },
    /// Softened indicator over `m` options: (weight on match, weight off match).
    Indicator {
        on: f64,
        off: f64,
    },
}

#[derive(Debug, Clone)]
pub struct KernelSet {
    centers: Vec<ParamVector>,
    targets: Vec<f64>,
    dims: Vec<DimKernel>,
    rho: f64,
    tau: f64,
    temp: f64,
    lambda: f64,
    /// `sqrt(tau / 2 pi)` raised to the number of Gaussian dims.
    gauss_norm: f64,
}

impl KernelSet {
    /// Builds the surrogate over a campaign history.
    pub fn new(
        space: &ParameterSpace,
        history: &[Observation],
        feasible_fraction: f64,
        lambda: f64,
    ) -> Self {
        Self::with_kernel(
            space,
            history,
            feasible_fraction,
            lambda,
            DiscreteKernel::default(),
        )
    }

    pub fn with_kernel(
        space: &ParameterSpace,
        history: &[Observation],
        feasible_fraction: f64,
        lambda: f64,
        discrete: DiscreteKernel,
    ) -> Self {
        Self::from_parts(
            space,
            history.iter().map(|o| o.params.clone()).collect(),
            normalize_objectives(history),
            feasible_fraction,
            lambda,
            discrete,
        )
    }

    /// Builds from explicit kernel centers and already-normalized targets.
    pub fn from_parts(
        space: &ParameterSpace,
        centers: Vec<ParamVector>,
        targets: Vec<f64>,
        feasible_fraction: f64,
        lambda: f64,
        discrete: DiscreteKernel,
    ) -> Self {
        assert_eq!(centers.len(), targets.len());
        assert!(feasible_fraction > 0.0 && feasible_fraction <= 1.0);
        let n = centers.len();
        let rho = n as f64 / feasible_fraction;
        let tau = 12.0 * rho * rho;
        let temp = 0.5 + 10.0 / rho;

        let dims: Vec<DimKernel> = space
            .params()
            .iter()
            .map(|p| match p.option_count() {
                None => DimKernel::Gaussian,
                Some(m) if p.is_discrete() && discrete == DiscreteKernel::GaussianIndex => {
                    DimKernel::GaussianIndex {
                        span: (m - 1) as f64,
                    }
                }
                Some(m) => {
                    let (on, off) = indicator_weights(m, temp);
                    DimKernel::Indicator { on, off }
                }
            })
            .collect();
        let n_gauss = dims
            .iter()
            .filter(|d| !matches!(d, DimKernel::Indicator { .. }))
            .count();
        let gauss_norm = (tau / (2.0 * PI)).sqrt().powi(n_gauss as i32);

        KernelSet {
            centers,
            targets,
            dims,
            rho,
            tau,
            temp,
            lambda,
            gauss_norm,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn temp(&self) -> f64 {
        self.temp
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Density of kernel `k` at `x`.
    pub fn kernel_density(&self, k: usize, x: &ParamVector) -> f64 {
        let center = &self.centers[k];
        let mut sq = 0.0;
        let mut discrete = 1.0;
        for (d, kind) in self.dims.iter().enumerate() {
            match *kind {
                DimKernel::Gaussian => {
                    let dx = x[d] - center[d];
                    sq += dx * dx;
                }
                DimKernel::GaussianIndex { span } => {
                    let dx = (x[d] - center[d]) / span;
                    sq += dx * dx;
                }
                DimKernel::Indicator { on, off } => {
                    discrete *= if x[d] == center[d] { on } else { off };
                }
            }
        }
        self.gauss_norm * (-0.5 * self.tau * sq).exp() * discrete
    }

    /// The acquisition value at `x` (to be minimized).
    ///
    /// `(sum_k f_k p_k(x) + lambda) / (sum_k p_k(x) + 1)`, a convex
    /// combination of the targets and `lambda`.
    pub fn acquisition(&self, x: &ParamVector) -> f64 {
        let mut num = self.lambda;
        let mut den = 1.0;
        for (k, &f) in self.targets.iter().enumerate() {
            let p = self.kernel_density(k, x);
            num += f * p;
            den += p;
        }
        num / den
    }
}

/// Per-option weights of the softened indicator: `M e^{1/T} / (e^{1/T} + M - 1)`
/// on the observed option and `M / (e^{1/T} + M - 1)` elsewhere.
fn indicator_weights(m: usize, temp: f64) -> (f64, f64) {
    let m = m as f64;
    if temp.is_infinite() {
        return (1.0, 1.0);
    }
    let e = (1.0 / temp).exp();
    let z = e + m - 1.0;
    (m * e / z, m / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ParameterDef;
    use approx::assert_abs_diff_eq;

    fn square(d: usize) -> ParameterSpace {
        ParameterSpace::new(
            (0..d)
                .map(|i| ParameterDef::continuous(format!("x{i}"), 0.0, 1.0).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn obs(x: Vec<f64>, y: f64) -> Observation {
        Observation::new(ParamVector(x), y)
    }

    #[test]
    fn normalize_objectives_examples() {
        let h: Vec<_> = [3.0, 7.0, 5.0].iter().map(|&y| obs(vec![0.0], y)).collect();
        assert_eq!(normalize_objectives(&h), vec![0.0, 1.0, 0.5]);
        assert_eq!(normalize_objectives(&[obs(vec![0.0], 4.0)]), vec![0.0]);
        let h: Vec<_> = (0..3).map(|_| obs(vec![0.0], 2.0)).collect();
        assert_eq!(normalize_objectives(&h), vec![0.0; 3]);
    }

    #[test]
    fn gaussian_peak_one_dimension() {
        // tau = 48 needs rho = 2: two observations with V_C = 1.
        let space = square(1);
        let ks = KernelSet::from_parts(
            &space,
            vec![ParamVector(vec![0.3]), ParamVector(vec![0.9])],
            vec![0.0, 1.0],
            1.0,
            0.0,
            DiscreteKernel::Categorical,
        );
        assert_eq!(ks.tau(), 48.0);
        assert_abs_diff_eq!(
            ks.kernel_density(0, &ParamVector(vec![0.3])),
            2.763953195,
            epsilon = 1e-8
        );
    }

    #[test]
    fn single_observation_two_dims() {
        let space = square(2);
        let h = vec![obs(vec![0.4, 0.6], 5.0)];
        let ks = KernelSet::new(&space, &h, 1.0, 1.0);
        assert_eq!(ks.tau(), 12.0);
        let peak = ks.kernel_density(0, &ParamVector(vec![0.4, 0.6]));
        assert_abs_diff_eq!(peak, 12.0 / (2.0 * PI), epsilon = 1e-12);
        assert_abs_diff_eq!(peak, 1.909859, epsilon = 1e-6);
        let a = ks.acquisition(&ParamVector(vec![0.4, 0.6]));
        assert_abs_diff_eq!(a, 1.0 / (peak + 1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(a, 0.3437, epsilon = 1e-4);
    }

    #[test]
    fn empty_history_is_flat() {
        let space = square(3);
        for lambda in [-1.0, 0.0, 0.7] {
            let ks = KernelSet::new(&space, &[], 1.0, lambda);
            assert_eq!(ks.acquisition(&ParamVector(vec![0.1, 0.2, 0.3])), lambda);
        }
    }

    #[test]
    fn categorical_weights() {
        let (on, off) = indicator_weights(8, f64::INFINITY);
        assert_eq!((on, off), (1.0, 1.0));
        let (on, off) = indicator_weights(8, 1e9);
        assert_abs_diff_eq!(on, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(off, 1.0, epsilon = 1e-8);
        for m in 2..30 {
            for temp in [0.5, 0.9, 3.0, 50.0] {
                let (on, off) = indicator_weights(m, temp);
                assert_abs_diff_eq!(on + (m - 1) as f64 * off, m as f64, epsilon = 1e-12);
                assert!(on > off);
            }
        }
    }

    #[test]
    fn density_scaling() {
        let space = square(2);
        let h = vec![
            obs(vec![0.1, 0.1], 1.0),
            obs(vec![0.5, 0.5], 2.0),
            obs(vec![0.9, 0.2], 0.0),
        ];
        let full = KernelSet::new(&space, &h, 1.0, 0.0);
        let half = KernelSet::new(&space, &h, 0.5, 0.0);
        assert_eq!(full.tau(), 12.0 * 9.0);
        assert_eq!(full.temp(), 0.5 + 10.0 / 3.0);
        assert_eq!(half.tau(), 4.0 * full.tau());
    }

    #[test]
    fn lambda_sign_controls_far_field() {
        let space = square(2);
        let corner = ParamVector(vec![0.0, 0.0]);
        let x1 = ParamVector(vec![0.5, 0.5]);
        for (lambda, far_is_worse) in [(1.0, true), (-1.0, false)] {
            let ks = KernelSet::from_parts(
                &space,
                vec![x1.clone()],
                vec![0.5],
                1.0,
                lambda,
                DiscreteKernel::Categorical,
            );
            let diff = ks.acquisition(&corner) - ks.acquisition(&x1);
            assert_eq!(diff > 0.0, far_is_worse, "lambda {lambda}: {diff}");
        }
    }

    #[test]
    fn gaussian_index_kernel_on_discrete() {
        let space =
            ParameterSpace::new(vec![ParameterDef::discrete("k", 0..=20).unwrap()]).unwrap();
        let h = vec![obs(vec![10.0], 0.0)];
        let ks = KernelSet::with_kernel(&space, &h, 1.0, 1.0, DiscreteKernel::GaussianIndex);
        let near = ks.acquisition(&ParamVector(vec![11.0]));
        let far = ks.acquisition(&ParamVector(vec![20.0]));
        assert!(near < far);
    }
}
