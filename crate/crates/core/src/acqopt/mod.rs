//! Constrained optimization of the acquisition surface.
//!
//! Both strategies start from feasible rejection samples and only ever hand
//! back feasible points: the gradient strategy stops a sample's trajectory at
//! the first infeasible update, the genetic strategy repairs infeasible
//! offspring by projecting them onto the feasibility boundary.

mod adam;
mod genetic;

pub use adam::{adam_hill_paths, optimize_adam_hill};
pub use genetic::{
    crossover, evolve_generation, mutate, optimize_genetic, population_converged,
    project_to_feasible,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{ParamVector, ParameterSpace};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamHillConfig {
    /// Adam steps per sample (continuous dims).
    pub max_iters: usize,
    /// Hill sweeps per sample (discrete and categorical dims).
    pub hill_sweeps: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Central-difference step in normalized units.
    pub fd_step: f64,
}

impl Default for AdamHillConfig {
    fn default() -> Self {
        AdamHillConfig {
            max_iters: 200,
            hill_sweeps: 50,
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            fd_step: 1e-3,
        }
    }
}

impl AdamHillConfig {
    // Negated comparisons so that NaN fails too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.learning_rate > 0.0) {
            return Err("learning_rate must be positive".into());
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err("beta1 and beta2 must lie in (0, 1)".into());
        }
        if !(self.fd_step > 0.0) {
            return Err("fd_step must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneticConfig {
    pub tournament_size: usize,
    pub elite_fraction: f64,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// Per-attribute mutation probability once an individual is selected.
    pub indep_mutation_prob: f64,
    /// Gaussian mutation scale, in normalized units.
    pub mutation_scale: f64,
    pub max_generations: usize,
    /// Early stop once every attribute spans less than this fraction of its range.
    pub diversity_stop: f64,
    /// Infinity-norm tolerance of the projection binary search.
    pub projection_tol: f64,
}

impl Default for GeneticConfig {
    fn default() -> Self {
        GeneticConfig {
            tournament_size: 3,
            elite_fraction: 0.05,
            crossover_prob: 0.5,
            mutation_prob: 0.4,
            indep_mutation_prob: 0.2,
            mutation_scale: 0.1,
            max_generations: 10,
            diversity_stop: 0.10,
            projection_tol: 0.01,
        }
    }
}

impl GeneticConfig {
    // Negated comparisons so that NaN fails too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> std::result::Result<(), String> {
        let probs = [
            ("elite_fraction", self.elite_fraction),
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("indep_mutation_prob", self.indep_mutation_prob),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.tournament_size == 0 {
            return Err("tournament_size must be at least 1".into());
        }
        if !(self.projection_tol > 0.0) {
            return Err("projection_tol must be positive".into());
        }
        Ok(())
    }
}

/// Default number of acquisition starting points: `clamp(100 d, 200, 2000)`.
pub fn default_sample_count(dim: usize) -> usize {
    (100 * dim).clamp(200, 2000)
}

/// Feasible starting points for acquisition optimization.
pub fn initial_proposals<R: Rng + ?Sized>(
    space: &ParameterSpace,
    rng: &mut R,
    count: Option<usize>,
) -> Result<Vec<ParamVector>> {
    space.rejection_sample(
        count.unwrap_or_else(|| default_sample_count(space.dim())),
        rng,
    )
}
