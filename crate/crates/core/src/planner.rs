//! Ask/tell planners.
//!
//! A [`Campaign`] owns the history, the RNG and the strategy state. The
//! kernel-regression strategies (`gryffin-adam`, `gryffin-genetic`) rebuild
//! the surrogate every iteration, refine feasible random starting points and
//! propose the lowest-acquisition candidate that is not a near-duplicate of a
//! past observation. `random` proposes a feasible uniform draw and `genetic`
//! runs a population-based search directly on the measured objective.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::acqopt::{self, AdamHillConfig, GeneticConfig};
use crate::chimera::{self, Goal, ObjectiveSpec};
use crate::domain::{seeded_rng, ParamVector, ParameterSpace, RawValue, SeededRng};
use crate::error::{Error, Result};
use crate::surrogate::{DiscreteKernel, KernelSet, Observation};

/// Attempts at finding a fresh (not yet observed) point before giving up on
/// self-avoidance for the baselines.
const FRESH_DRAW_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "gryffin-adam")]
    GryffinAdam,
    #[serde(rename = "gryffin-genetic")]
    GryffinGenetic,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "genetic")]
    Genetic,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::GryffinAdam,
        Strategy::GryffinGenetic,
        Strategy::Random,
        Strategy::Genetic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::GryffinAdam => "gryffin-adam",
            Strategy::GryffinGenetic => "gryffin-genetic",
            Strategy::Random => "random",
            Strategy::Genetic => "genetic",
        }
    }

    pub fn uses_surrogate(self) -> bool {
        matches!(self, Strategy::GryffinAdam | Strategy::GryffinGenetic)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub adam: AdamHillConfig,
    pub genetic: GeneticConfig,
    /// Acquisition starting points; `None` means `clamp(100 d, 200, 2000)`.
    pub sample_count: Option<usize>,
    /// Candidates closer than this (infinity norm, normalized) to a past
    /// observation are skipped when possible.
    pub self_avoidance: f64,
    pub discrete_kernel: DiscreteKernel,
    /// Population of the direct genetic baseline.
    pub ga_population: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            adam: AdamHillConfig::default(),
            genetic: GeneticConfig::default(),
            sample_count: None,
            self_avoidance: 0.01,
            discrete_kernel: DiscreteKernel::Categorical,
            ga_population: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub params: ParamVector,
    /// Acquisition at `params`; `None` for strategies without a surrogate.
    pub acquisition_value: Option<f64>,
    pub lambda_used: Option<f64>,
    pub strategy: Strategy,
}

impl Proposal {
    pub fn raw(&self, space: &ParameterSpace) -> Result<Vec<RawValue>> {
        space.denormalize(&self.params)
    }
}

/// A measurement reported back to the campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum Measurement {
    Single(f64),
    Multi(Vec<f64>),
}

impl From<f64> for Measurement {
    fn from(v: f64) -> Self {
        Measurement::Single(v)
    }
}

impl From<Vec<f64>> for Measurement {
    fn from(v: Vec<f64>) -> Self {
        Measurement::Multi(v)
    }
}

/// Direct genetic search on measured values: one generation per fully
/// evaluated population.
#[derive(Debug, Clone, Default)]
struct DirectGa {
    population: Vec<ParamVector>,
    pending: Vec<ParamVector>,
}

pub struct Campaign {
    space: ParameterSpace,
    history: Vec<Observation>,
    goal: Goal,
    objectives: Option<Vec<ObjectiveSpec>>,
    lambda_schedule: Vec<f64>,
    strategy: Strategy,
    config: PlannerConfig,
    rng: SeededRng,
    feasible_fraction: f64,
    asks: usize,
    ga: DirectGa,
}

impl fmt::Debug for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Campaign")
            .field("strategy", &self.strategy)
            .field("observations", &self.history.len())
            .field("lambda_schedule", &self.lambda_schedule)
            .field("feasible_fraction", &self.feasible_fraction)
            .finish()
    }
}

pub struct CampaignBuilder {
    space: ParameterSpace,
    strategy: Strategy,
    seed: u64,
    goal: Goal,
    objectives: Option<Vec<ObjectiveSpec>>,
    lambda_schedule: Vec<f64>,
    config: PlannerConfig,
}

impl CampaignBuilder {
    pub fn goal(mut self, goal: Goal) -> Self {
        self.goal = goal;
        self
    }

    /// Switches the campaign to hierarchical multi-objective mode.
    pub fn objectives(mut self, specs: Vec<ObjectiveSpec>) -> Self {
        self.objectives = Some(specs);
        self
    }

    pub fn lambda_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.lambda_schedule = schedule;
        self
    }

    pub fn config(mut self, config: PlannerConfig) -> Self {
        self.config = config;
        self
    }

    pub fn build(self) -> Result<Campaign> {
        if self.lambda_schedule.is_empty() || self.lambda_schedule.iter().any(|l| !l.is_finite()) {
            return Err(Error::config(
                "/lambda_schedule",
                "needs at least one finite value",
            ));
        }
        self.config
            .adam
            .validate()
            .map_err(|m| Error::config("/planner/adam", m))?;
        self.config
            .genetic
            .validate()
            .map_err(|m| Error::config("/planner/genetic", m))?;
        if let Some(specs) = &self.objectives {
            chimera::validate_specs(specs)?;
        }

        // The volume estimate draws from its own stream so that it does not
        // shift the proposal sequence.
        let feasible_fraction = if self.strategy.uses_surrogate() {
            let mut probe_rng = seeded_rng(self.seed);
            probe_rng.set_stream(1);
            self.space.resolve_feasible_fraction(&mut probe_rng)?
        } else {
            1.0
        };

        Ok(Campaign {
            space: self.space,
            history: Vec::new(),
            goal: self.goal,
            objectives: self.objectives,
            lambda_schedule: self.lambda_schedule,
            strategy: self.strategy,
            config: self.config,
            rng: seeded_rng(self.seed),
            feasible_fraction,
            asks: 0,
            ga: DirectGa::default(),
        })
    }
}

impl Campaign {
    pub fn builder(space: ParameterSpace, strategy: Strategy, seed: u64) -> CampaignBuilder {
        CampaignBuilder {
            space,
            strategy,
            seed,
            goal: Goal::Minimize,
            objectives: None,
            lambda_schedule: vec![1.0, -1.0],
            config: PlannerConfig::default(),
        }
    }

    pub fn space(&self) -> &ParameterSpace {
        &self.space
    }

    pub fn history(&self) -> &[Observation] {
        &self.history
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn feasible_fraction(&self) -> f64 {
        self.feasible_fraction
    }

    pub fn objectives(&self) -> Option<&[ObjectiveSpec]> {
        self.objectives.as_deref()
    }

    /// The lambda the next surrogate-based ask will use.
    pub fn next_lambda(&self) -> f64 {
        self.lambda_schedule[self.asks % self.lambda_schedule.len()]
    }

    pub fn ask(&mut self) -> Result<Proposal> {
        let proposal = self.propose(&[])?;
        self.asks += 1;
        Ok(proposal)
    }

    /// Several proposals at once; slot `i` uses the next lambda in the
    /// schedule and avoids the proposals already made in this batch.
    pub fn ask_batch(&mut self, count: usize) -> Result<Vec<Proposal>> {
        let mut batch: Vec<Proposal> = Vec::with_capacity(count);
        for _ in 0..count {
            let avoid: Vec<ParamVector> = batch.iter().map(|p| p.params.clone()).collect();
            let p = self.propose(&avoid)?;
            self.asks += 1;
            batch.push(p);
        }
        Ok(batch)
    }

    pub fn tell(&mut self, proposal: &Proposal, measurement: impl Into<Measurement>) -> Result<()> {
        self.tell_params(proposal.params.clone(), measurement)
    }

    /// Records a measurement for an arbitrary feasible point.
    pub fn tell_params(
        &mut self,
        params: ParamVector,
        measurement: impl Into<Measurement>,
    ) -> Result<()> {
        self.space.check(&params)?;
        if !self.space.is_feasible(&params) {
            return Err(Error::Feasibility("told an infeasible point".into()));
        }
        let values = match measurement.into() {
            Measurement::Single(v) => vec![v],
            Measurement::Multi(v) => v,
        };
        let expected = self.objectives.as_ref().map_or(1, Vec::len);
        if values.len() != expected {
            return Err(Error::Spec(format!(
                "expected {expected} objective values, got {}",
                values.len()
            )));
        }
        let objective = match &self.objectives {
            Some(specs) => specs[0].goal.internal(values[0]),
            None => self.goal.internal(values[0]),
        };
        self.history.push(Observation {
            params,
            objective,
            measurement: values,
            scalarized: None,
        });
        if let Some(specs) = &self.objectives {
            let rows: Vec<Vec<f64>> = self.history.iter().map(|o| o.measurement.clone()).collect();
            let merits = chimera::scalarize(specs, &rows)?;
            for (obs, merit) in self.history.iter_mut().zip(merits) {
                obs.scalarized = Some(merit);
            }
        }
        Ok(())
    }

    /// Index of the best observation (lowest loss); ties go to the earliest.
    pub fn incumbent_index(&self) -> Result<usize> {
        self.history
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.loss().total_cmp(&b.1.loss()).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .ok_or(Error::EmptyHistory)
    }

    pub fn incumbent(&self) -> Result<&Observation> {
        Ok(&self.history[self.incumbent_index()?])
    }

    fn min_distance(&self, x: &ParamVector, extra: &[ParamVector]) -> f64 {
        self.history
            .iter()
            .map(|o| &o.params)
            .chain(extra)
            .map(|p| self.space.distance(x, p))
            .fold(f64::INFINITY, f64::min)
    }

    fn is_fresh(&self, x: &ParamVector, extra: &[ParamVector]) -> bool {
        self.min_distance(x, extra) >= self.config.self_avoidance
    }

    fn propose(&mut self, avoid: &[ParamVector]) -> Result<Proposal> {
        match self.strategy {
            Strategy::GryffinAdam | Strategy::GryffinGenetic => self.propose_surrogate(avoid),
            Strategy::Random => {
                let params = self.fresh_random(avoid)?;
                Ok(self.plain(params))
            }
            Strategy::Genetic => {
                let params = self.next_ga_member(avoid)?;
                Ok(self.plain(params))
            }
        }
    }

    fn plain(&self, params: ParamVector) -> Proposal {
        Proposal {
            params,
            acquisition_value: None,
            lambda_used: None,
            strategy: self.strategy,
        }
    }

    fn propose_surrogate(&mut self, avoid: &[ParamVector]) -> Result<Proposal> {
        let lambda = self.next_lambda();
        let ks = KernelSet::with_kernel(
            &self.space,
            &self.history,
            self.feasible_fraction,
            lambda,
            self.config.discrete_kernel,
        );
        let init = acqopt::initial_proposals(&self.space, &mut self.rng, self.config.sample_count)?;
        // Adam/Hill contributes every feasible iterate of its trajectories,
        // not only their end points, so a converged climb still leaves fresh
        // candidates behind it.
        let mut candidates: Vec<(ParamVector, f64)> = match self.strategy {
            Strategy::GryffinAdam => {
                acqopt::adam_hill_paths(&ks, &self.space, &init, &self.config.adam, &mut self.rng)
                    .into_iter()
                    .flatten()
                    .collect()
            }
            _ => acqopt::optimize_genetic(
                &ks,
                &self.space,
                &init,
                &self.config.genetic,
                &mut self.rng,
            )
            .into_iter()
            .map(|x| {
                let a = ks.acquisition(&x);
                (x, a)
            })
            .collect(),
        };

        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| candidates[a].1.total_cmp(&candidates[b].1).then(a.cmp(&b)));
        let idx = order
            .iter()
            .copied()
            .find(|&i| self.is_fresh(&candidates[i].0, avoid))
            .unwrap_or(order[0]);
        let (params, value) = candidates.swap_remove(idx);

        Ok(Proposal {
            params,
            acquisition_value: Some(value),
            lambda_used: Some(lambda),
            strategy: self.strategy,
        })
    }

    /// A feasible uniform draw that is not a near-duplicate of any past
    /// observation, if one can be found.
    fn fresh_random(&mut self, avoid: &[ParamVector]) -> Result<ParamVector> {
        let mut last = None;
        for _ in 0..FRESH_DRAW_ATTEMPTS {
            let x = self.space.rejection_sample(1, &mut self.rng)?.remove(0);
            if self.is_fresh(&x, avoid) {
                return Ok(x);
            }
            last = Some(x);
        }
        Ok(last.expect("at least one draw"))
    }

    fn observed_loss(&self, x: &ParamVector) -> Option<f64> {
        self.history
            .iter()
            .rev()
            .find(|o| &o.params == x)
            .map(Observation::loss)
    }

    fn next_ga_member(&mut self, avoid: &[ParamVector]) -> Result<ParamVector> {
        if self.ga.population.is_empty() {
            let size = self.config.ga_population.max(4);
            let mut population = Vec::with_capacity(size);
            for _ in 0..size {
                let x = self.fresh_random(&population)?;
                population.push(x);
            }
            self.ga.pending = population.clone();
            self.ga.population = population;
        }

        // Evolve until a generation contains something new to measure.
        for _ in 0..FRESH_DRAW_ATTEMPTS {
            while let Some(x) = self.pop_pending() {
                if self.observed_loss(&x).is_none() && !avoid.contains(&x) {
                    return Ok(x);
                }
            }
            if self
                .ga
                .population
                .iter()
                .any(|x| self.observed_loss(x).is_none() && !avoid.contains(x))
            {
                // Members still awaiting a measurement were handed out in this
                // batch; fall back to a random draw for this slot.
                return self.fresh_random(avoid);
            }
            let fitness: Vec<f64> = self
                .ga
                .population
                .iter()
                .map(|x| self.observed_loss(x).expect("evaluated member"))
                .collect();
            let next = acqopt::evolve_generation(
                &self.space,
                &self.ga.population,
                &fitness,
                &self.config.genetic,
                &mut self.rng,
            );
            self.ga.pending = next
                .iter()
                .filter(|x| self.observed_loss(x).is_none())
                .cloned()
                .collect();
            self.ga.pending.dedup();
            self.ga.population = next;
        }
        self.fresh_random(avoid)
    }

    fn pop_pending(&mut self) -> Option<ParamVector> {
        if self.ga.pending.is_empty() {
            None
        } else {
            Some(self.ga.pending.remove(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ParameterDef;

    fn square() -> ParameterSpace {
        ParameterSpace::new(vec![
            ParameterDef::continuous("x0", 0.0, 1.0).unwrap(),
            ParameterDef::continuous("x1", 0.0, 1.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn incumbent_rules() {
        let mut c = Campaign::builder(square(), Strategy::Random, 0)
            .build()
            .unwrap();
        assert!(matches!(c.incumbent(), Err(Error::EmptyHistory)));
        for y in [5.0, 2.0, 9.0] {
            let p = c.ask().unwrap();
            c.tell(&p, y).unwrap();
        }
        assert_eq!(c.incumbent_index().unwrap(), 1);

        let mut c = Campaign::builder(square(), Strategy::Random, 0)
            .build()
            .unwrap();
        for y in [2.0, 2.0] {
            let p = c.ask().unwrap();
            c.tell(&p, y).unwrap();
        }
        assert_eq!(c.incumbent_index().unwrap(), 0);

        let mut c = Campaign::builder(square(), Strategy::Random, 0)
            .goal(Goal::Maximize)
            .build()
            .unwrap();
        for y in [1.0, 7.0, 3.0] {
            let p = c.ask().unwrap();
            c.tell(&p, y).unwrap();
        }
        assert_eq!(c.incumbent_index().unwrap(), 1);
        assert!(c.history()[1].objective < c.history()[0].objective);
    }

    #[test]
    fn tell_checks_dimensions() {
        let mut c = Campaign::builder(square(), Strategy::Random, 0)
            .build()
            .unwrap();
        let err = c.tell_params(ParamVector(vec![0.5]), 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::SpaceMismatch {
                expected: 2,
                actual: 1
            }
        ));
        assert_eq!(c.history().len(), 0);
        let p = c.ask().unwrap();
        c.tell(&p, 1.0).unwrap();
        assert_eq!(c.history().len(), 1);
    }

    #[test]
    fn lambda_schedule_cycles() {
        let mut c = Campaign::builder(square(), Strategy::GryffinGenetic, 3)
            .lambda_schedule(vec![1.0, 0.0, -1.0])
            .build()
            .unwrap();
        for i in 0..7 {
            let p = c.ask().unwrap();
            assert_eq!(p.lambda_used, Some([1.0, 0.0, -1.0][i % 3]));
            c.tell(&p, (i as f64).sin()).unwrap();
        }
    }

    #[test]
    fn empty_history_acquisition_equals_lambda() {
        let space = square().with_constraint(|x| x[0] + x[1] <= 1.0);
        let mut c = Campaign::builder(space.clone(), Strategy::GryffinGenetic, 1)
            .build()
            .unwrap();
        let p = c.ask().unwrap();
        assert!(space.is_feasible(&p.params));
        assert_eq!(p.acquisition_value, Some(1.0));
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(Campaign::builder(square(), Strategy::Random, 0)
            .lambda_schedule(vec![])
            .build()
            .is_err());
        assert!(Campaign::builder(square(), Strategy::Random, 0)
            .lambda_schedule(vec![f64::NAN])
            .build()
            .is_err());
    }

    #[test]
    fn batch_slots_use_successive_lambdas() {
        let mut c = Campaign::builder(square(), Strategy::GryffinAdam, 2)
            .build()
            .unwrap();
        let p = c.ask().unwrap();
        c.tell(&p, 0.3).unwrap();
        let batch = c.ask_batch(3).unwrap();
        let lambdas: Vec<_> = batch.iter().map(|p| p.lambda_used.unwrap()).collect();
        assert_eq!(lambdas, vec![-1.0, 1.0, -1.0]);
        for (i, a) in batch.iter().enumerate() {
            for b in &batch[i + 1..] {
                assert!(c.space().distance(&a.params, &b.params) >= 0.01);
            }
        }
    }

    #[test]
    fn genetic_baseline_does_not_repeat_on_grid() {
        let space = ParameterSpace::new(vec![
            ParameterDef::discrete("a", 0..=5).unwrap(),
            ParameterDef::discrete("b", 0..=5).unwrap(),
        ])
        .unwrap();
        let mut c = Campaign::builder(space, Strategy::Genetic, 9)
            .build()
            .unwrap();
        for _ in 0..30 {
            let p = c.ask().unwrap();
            assert!(c.history().iter().all(|o| o.params != p.params));
            let y = (p.params[0] - 2.0).powi(2) + (p.params[1] - 3.0).powi(2);
            c.tell(&p, y).unwrap();
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
            assert_eq!(
                serde_json::to_string(&s).unwrap(),
                format!("\"{}\"", s.name())
            );
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }
}
