//! Seeded, repeated campaigns over the benchmark surfaces.
//!
//! # Config schema
//!
//! ```json
//! {
//!   "surface": "branin",
//!   "strategy": "gryffin-genetic",
//!   "budget": 100,
//!   "repeats": 20,
//!   "seed": 0,
//!   "lambda_schedule": [1, -1],
//!   "objectives": [{"name": "yield", "goal": "max", "threshold": 0.9},
//!                  {"name": "cost", "goal": "min"}],
//!   "stop_at_optimum": true,
//!   "planner": {"sample_count": 200}
//! }
//! ```
//!
//! `surface` and `budget` are required. `strategy` is a name or a list of
//! names (default `gryffin-genetic`), `repeats` defaults to 1, `seed` to 0
//! and `lambda_schedule` to `[1, -1]`. `objectives` overrides the surface's
//! own objective list and must have one entry per surface output.
//! `stop_at_optimum` defaults to `true` on discrete surfaces and is ignored
//! where no optimum is known. `planner` holds [`PlannerConfig`] overrides.
//! Repeat `i` runs with seed `seed + i`.
//!
//! # Outputs
//!
//! [`write_suite`] writes one `trace_<strategy>_<seed>.csv` per run, a
//! `summary.json`, and `timings.csv` with per-iteration wall-clock times.
//! Traces carry no timing data, so they are byte-identical across reruns.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::benchmarks::{KnownOptimum, Surface};
use crate::chimera::{self, Goal, ObjectiveSpec};
use crate::domain::{ParamVector, ParameterSpace, RawValue};
use crate::error::{Error, Result};
use crate::planner::{Campaign, PlannerConfig, Strategy};

pub const TRACE_FILE_PREFIX: &str = "trace_";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.csv";

/// z value of the two-sided 95% normal interval.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub surface: Surface,
    pub strategies: Vec<Strategy>,
    pub budget: usize,
    pub repeats: usize,
    pub seed: u64,
    pub lambda_schedule: Vec<f64>,
    pub objectives: Option<Vec<ObjectiveSpec>>,
    pub stop_at_optimum: Option<bool>,
    pub planner: PlannerConfig,
}

impl SuiteConfig {
    pub fn new(
        surface: Surface,
        strategies: Vec<Strategy>,
        budget: usize,
        repeats: usize,
        seed: u64,
    ) -> Self {
        SuiteConfig {
            surface,
            strategies,
            budget,
            repeats,
            seed,
            lambda_schedule: vec![1.0, -1.0],
            objectives: None,
            stop_at_optimum: None,
            planner: PlannerConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::config("", e.to_string()))?;
        Self::from_value(&value)
    }

    /// Validates a parsed config; errors carry the JSON pointer of the
    /// offending field.
    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::config("", "config must be a JSON object"))?;
        const KNOWN: [&str; 9] = [
            "surface",
            "strategy",
            "budget",
            "repeats",
            "seed",
            "lambda_schedule",
            "objectives",
            "stop_at_optimum",
            "planner",
        ];
        if let Some(key) = obj.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::config(format!("/{key}"), "unknown field"));
        }

        let surface_name = obj
            .get("surface")
            .ok_or_else(|| Error::config("/surface", "required"))?
            .as_str()
            .ok_or_else(|| Error::config("/surface", "expected a string"))?;
        let surface = Surface::from_name(surface_name)
            .map_err(|e| Error::config("/surface", e.to_string()))?;

        let strategies = match obj.get("strategy") {
            None => vec![Strategy::GryffinGenetic],
            Some(Value::String(s)) => vec![s
                .parse()
                .map_err(|m: String| Error::config("/strategy", m))?],
            Some(Value::Array(items)) if !items.is_empty() => items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let ptr = format!("/strategy/{i}");
                    item.as_str()
                        .ok_or_else(|| Error::config(&ptr, "expected a string"))?
                        .parse()
                        .map_err(|m: String| Error::config(&ptr, m))
                })
                .collect::<Result<_>>()?,
            Some(_) => {
                return Err(Error::config(
                    "/strategy",
                    "expected a name or a non-empty list of names",
                ))
            }
        };

        let budget = positive(obj.get("budget"), "/budget")?
            .ok_or_else(|| Error::config("/budget", "required"))?;
        let repeats = positive(obj.get("repeats"), "/repeats")?.unwrap_or(1);
        let seed = match obj.get("seed") {
            None => 0,
            Some(v) => v
                .as_u64()
                .ok_or_else(|| Error::config("/seed", "expected a non-negative integer"))?,
        };

        let lambda_schedule = match obj.get("lambda_schedule") {
            None => vec![1.0, -1.0],
            Some(Value::Array(items)) if !items.is_empty() => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                        Error::config(format!("/lambda_schedule/{i}"), "expected a finite number")
                    })
                })
                .collect::<Result<_>>()?,
            Some(_) => {
                return Err(Error::config(
                    "/lambda_schedule",
                    "expected a non-empty array of numbers",
                ))
            }
        };

        let objectives = match obj.get("objectives") {
            None => None,
            Some(v) => Some(parse_objectives(v, surface)?),
        };

        let stop_at_optimum = match obj.get("stop_at_optimum") {
            None => None,
            Some(v) => Some(
                v.as_bool()
                    .ok_or_else(|| Error::config("/stop_at_optimum", "expected a boolean"))?,
            ),
        };

        let planner = match obj.get("planner") {
            None => PlannerConfig::default(),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| Error::config("/planner", e.to_string()))?,
        };

        let config = SuiteConfig {
            surface,
            strategies,
            budget,
            repeats,
            seed,
            lambda_schedule,
            objectives,
            stop_at_optimum,
            planner,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::config("/budget", "must be positive"));
        }
        if self.repeats == 0 {
            return Err(Error::config("/repeats", "must be positive"));
        }
        if self.strategies.is_empty() {
            return Err(Error::config(
                "/strategy",
                "at least one strategy is required",
            ));
        }
        if self.lambda_schedule.is_empty() || self.lambda_schedule.iter().any(|l| !l.is_finite()) {
            return Err(Error::config(
                "/lambda_schedule",
                "needs at least one finite value",
            ));
        }
        if let Some(specs) = &self.objectives {
            if specs.len() != self.surface.objectives().len() {
                return Err(Error::config(
                    "/objectives",
                    format!(
                        "surface `{}` has {} objective(s), got {}",
                        self.surface.name(),
                        self.surface.objectives().len(),
                        specs.len()
                    ),
                ));
            }
            chimera::validate_specs(specs)
                .map_err(|e| Error::config("/objectives", e.to_string()))?;
        }
        Ok(())
    }

    /// Objective specs the campaigns run with; `None` for plain
    /// single-objective minimization.
    pub fn effective_objectives(&self) -> Option<Vec<ObjectiveSpec>> {
        match &self.objectives {
            Some(specs) => Some(specs.clone()),
            None if self.surface.objectives().len() > 1 => Some(self.surface.objectives()),
            None => None,
        }
    }

    pub fn objective_names(&self) -> Vec<String> {
        match &self.objectives {
            Some(specs) => specs.iter().map(|s| s.name.clone()).collect(),
            None => self
                .surface
                .objectives()
                .into_iter()
                .map(|s| s.name)
                .collect(),
        }
    }

    pub fn run_config(&self, strategy: Strategy, repeat: usize) -> RunConfig {
        RunConfig {
            surface: self.surface,
            strategy,
            seed: self.seed + repeat as u64,
            budget: self.budget,
            lambda_schedule: self.lambda_schedule.clone(),
            objectives: self.effective_objectives(),
            stop_at_optimum: self.stop_at_optimum.unwrap_or(self.surface.is_discrete()),
            planner: self.planner.clone(),
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn positive(value: Option<&Value>, pointer: &str) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.as_u64() {
            Some(n) if n > 0 => Ok(Some(n as usize)),
            _ => Err(Error::config(pointer, "expected a positive integer")),
        },
    }
}

fn parse_objectives(value: &Value, surface: Surface) -> Result<Vec<ObjectiveSpec>> {
    let items = value
        .as_array()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| Error::config("/objectives", "expected a non-empty array"))?;
    let mut specs = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let base = format!("/objectives/{i}");
        let obj = item
            .as_object()
            .ok_or_else(|| Error::config(&base, "expected an object"))?;
        if let Some(key) = obj
            .keys()
            .find(|k| !["name", "goal", "threshold"].contains(&k.as_str()))
        {
            return Err(Error::config(format!("{base}/{key}"), "unknown field"));
        }
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::config(format!("{base}/name"), "expected a string"))?;
        let goal: Goal = match obj.get("goal") {
            None => Goal::Minimize,
            Some(v) => serde_json::from_value(v.clone()).map_err(|_| {
                Error::config(format!("{base}/goal"), "expected \"min\" or \"max\"")
            })?,
        };
        let threshold = match obj.get("threshold") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_f64().filter(|t| t.is_finite()).ok_or_else(|| {
                Error::config(format!("{base}/threshold"), "expected a finite number")
            })?),
        };
        specs.push(ObjectiveSpec::new(name, goal, threshold));
    }
    if specs.len() != surface.objectives().len() {
        return Err(Error::config(
            "/objectives",
            format!(
                "surface `{}` has {} objective(s), got {}",
                surface.name(),
                surface.objectives().len(),
                specs.len()
            ),
        ));
    }
    Ok(specs)
}

/// Settings of a single seeded campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub surface: Surface,
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: usize,
    pub lambda_schedule: Vec<f64>,
    pub objectives: Option<Vec<ObjectiveSpec>>,
    pub stop_at_optimum: bool,
    pub planner: PlannerConfig,
}

impl RunConfig {
    pub fn new(surface: Surface, strategy: Strategy, seed: u64, budget: usize) -> Self {
        SuiteConfig::new(surface, vec![strategy], budget, 1, seed).run_config(strategy, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based evaluation index.
    pub iteration: usize,
    pub params: ParamVector,
    pub raw: Vec<RawValue>,
    /// Raw objective values as measured.
    pub objectives: Vec<f64>,
    /// Loss of this entry when it was recorded (internal objective, or the
    /// scalarized merit in multi-objective mode).
    pub merit: f64,
    /// Raw objective values of the incumbent after this evaluation.
    pub incumbent: Vec<f64>,
    pub regret: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignTrace {
    pub surface: Surface,
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: usize,
    pub lambda_schedule: Vec<f64>,
    pub param_names: Vec<String>,
    pub objective_names: Vec<String>,
    pub records: Vec<TraceRecord>,
    /// Set when the run ended on an error instead of reaching its budget.
    pub error: Option<String>,
}

impl CampaignTrace {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn file_name(&self) -> String {
        format!("{TRACE_FILE_PREFIX}{}_{}.csv", self.strategy, self.seed)
    }

    pub fn header(&self) -> Vec<String> {
        let mut header = vec!["iteration".to_string()];
        header.extend(self.param_names.iter().cloned());
        header.extend(self.objective_names.iter().cloned());
        header.push("merit".into());
        header.extend(
            self.objective_names
                .iter()
                .map(|n| format!("incumbent_{n}")),
        );
        header.push("regret".into());
        header
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        writer.write_record(self.header())?;
        for r in &self.records {
            let mut row = vec![r.iteration.to_string()];
            row.extend(r.raw.iter().map(RawValue::to_string));
            row.extend(r.objectives.iter().map(f64::to_string));
            row.push(r.merit.to_string());
            row.extend(r.incumbent.iter().map(f64::to_string));
            row.push(r.regret.map(|v| v.to_string()).unwrap_or_default());
            writer.write_record(row)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Parses a trace written by [`CampaignTrace::to_csv`]. Wall-clock times
    /// are not part of the CSV and come back as zero.
    pub fn from_csv(
        text: &str,
        surface: Surface,
        strategy: Strategy,
        seed: u64,
        space: &ParameterSpace,
        n_objectives: usize,
    ) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let d = space.dim();
        let m = n_objectives;
        if header.len() != 3 + d + 2 * m {
            return Err(Error::Spec(format!(
                "trace header has {} columns",
                header.len()
            )));
        }
        let param_names = header[1..1 + d].to_vec();
        let objective_names = header[1 + d..1 + d + m].to_vec();
        let mut records = Vec::new();
        for row in reader.records() {
            let row = row?;
            let num = |i: usize| -> Result<f64> {
                row[i].parse().map_err(|_| {
                    Error::Spec(format!("bad number `{}` in column {}", &row[i], header[i]))
                })
            };
            let raw: Vec<RawValue> = (1..1 + d)
                .map(|i| {
                    if space.params()[i - 1].is_categorical() {
                        Ok(RawValue::Label(row[i].to_string()))
                    } else {
                        num(i).map(RawValue::Number)
                    }
                })
                .collect::<Result<_>>()?;
            let params = space.normalize(&raw)?;
            let regret_field = &row[2 + d + 2 * m];
            records.push(TraceRecord {
                iteration: row[0]
                    .parse()
                    .map_err(|_| Error::Spec(format!("bad iteration `{}`", &row[0])))?,
                params,
                raw,
                objectives: (1 + d..1 + d + m).map(num).collect::<Result<_>>()?,
                merit: num(1 + d + m)?,
                incumbent: (2 + d + m..2 + d + 2 * m).map(num).collect::<Result<_>>()?,
                regret: if regret_field.is_empty() {
                    None
                } else {
                    Some(num(2 + d + 2 * m)?)
                },
                wall_ms: 0.0,
            });
        }
        Ok(CampaignTrace {
            surface,
            strategy,
            seed,
            budget: records.len(),
            lambda_schedule: Vec::new(),
            param_names,
            objective_names,
            records,
            error: None,
        })
    }
}

/// `|f_star - f(x_k+)|` per record, from the first incumbent objective.
pub fn regret(trace: &CampaignTrace, f_star: f64) -> Vec<f64> {
    trace
        .records
        .iter()
        .map(|r| (f_star - r.incumbent[0]).abs())
        .collect()
}

/// 1-based index of the first proposal equal to any of `optima`.
pub fn evals_to_optimum(trace: &CampaignTrace, optima: &[ParamVector]) -> Option<usize> {
    trace
        .records
        .iter()
        .find(|r| optima.contains(&r.params))
        .map(|r| r.iteration)
}

/// Runs one campaign against a benchmark surface. Errors raised while
/// building the campaign are returned; errors during the run end the trace
/// early and are stored in [`CampaignTrace::error`].
pub fn run_campaign(config: &RunConfig) -> Result<CampaignTrace> {
    let bench = config.surface.build();
    let space = bench.space.clone();
    let mut builder = Campaign::builder(space.clone(), config.strategy, config.seed)
        .lambda_schedule(config.lambda_schedule.clone())
        .config(config.planner.clone());
    if let Some(specs) = &config.objectives {
        builder = builder.objectives(specs.clone());
    }
    let mut campaign = builder.build()?;

    let objective_names = match &config.objectives {
        Some(specs) => specs.iter().map(|s| s.name.clone()).collect(),
        None => config
            .surface
            .objectives()
            .into_iter()
            .map(|s| s.name)
            .collect(),
    };
    let single = config.objectives.is_none();
    let optimum: Option<KnownOptimum> = bench.known_optimum.clone().filter(|_| single);
    let stop = config.stop_at_optimum && optimum.is_some();

    let mut trace = CampaignTrace {
        surface: config.surface,
        strategy: config.strategy,
        seed: config.seed,
        budget: config.budget,
        lambda_schedule: config.lambda_schedule.clone(),
        param_names: space.params().iter().map(|p| p.name.clone()).collect(),
        objective_names,
        records: Vec::with_capacity(config.budget),
        error: None,
    };

    for iteration in 1..=config.budget {
        let start = Instant::now();
        let step = (|| -> Result<TraceRecord> {
            let proposal = campaign.ask()?;
            let values = bench.evaluate(&proposal.params)?;
            campaign.tell(&proposal, values.clone())?;
            let incumbent = campaign.incumbent()?.measurement.clone();
            let merit = campaign
                .history()
                .last()
                .map(|o| o.loss())
                .unwrap_or(f64::NAN);
            Ok(TraceRecord {
                iteration,
                raw: proposal.raw(&space)?,
                params: proposal.params,
                objectives: values,
                merit,
                regret: optimum.as_ref().map(|o| (o.value - incumbent[0]).abs()),
                incumbent,
                wall_ms: 0.0,
            })
        })();
        match step {
            Ok(mut record) => {
                record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                let found = stop
                    && optimum
                        .as_ref()
                        .is_some_and(|o| o.locations.contains(&record.params));
                trace.records.push(record);
                if found {
                    break;
                }
            }
            Err(e) => {
                trace.error = Some(e.to_string());
                break;
            }
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (0 for a single value).
    pub sd: f64,
    /// `1.96 sd / sqrt(n)`.
    pub ci_half: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Stats {
            n,
            mean,
            sd,
            ci_half: Z95 * sd / (n as f64).sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub strategy: Strategy,
    pub seed: u64,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub records: usize,
    pub final_incumbent: Option<Vec<f64>>,
    pub final_regret: Option<f64>,
    pub evals_to_optimum: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalsToOptimum {
    pub found: usize,
    pub not_found: usize,
    /// Over the runs that found the optimum.
    pub stats: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyAggregate {
    pub strategy: Strategy,
    pub runs: usize,
    pub failed: usize,
    pub final_regret: Option<Stats>,
    /// Per-iteration regret statistics; runs that stopped early carry their
    /// last value forward.
    pub regret_mean: Vec<f64>,
    pub regret_ci_low: Vec<f64>,
    pub regret_ci_high: Vec<f64>,
    pub evals_to_optimum: Option<EvalsToOptimum>,
    /// Mean of each final incumbent objective.
    pub final_incumbent_mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub surface: String,
    pub strategies: Vec<Strategy>,
    pub budget: usize,
    pub repeats: usize,
    pub seed: u64,
    pub lambda_schedule: Vec<f64>,
    pub config_hash: String,
    pub parameters: Vec<String>,
    pub objectives: Vec<String>,
    pub f_star: Option<f64>,
    pub runs: Vec<RunSummary>,
    pub aggregates: Vec<StrategyAggregate>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub traces: Vec<CampaignTrace>,
    pub summary: SuiteSummary,
}

/// Runs every (strategy, repeat) campaign in parallel and aggregates them.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let jobs: Vec<RunConfig> = config
        .strategies
        .iter()
        .flat_map(|&s| (0..config.repeats).map(move |i| (s, i)))
        .map(|(s, i)| config.run_config(s, i))
        .collect();
    let traces = jobs
        .par_iter()
        .map(run_campaign)
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(config, &traces);
    Ok(SuiteReport {
        config: config.clone(),
        traces,
        summary,
    })
}

/// Aggregates finished traces. Only fields stored in the trace CSVs are
/// used, so the summary can be rebuilt from the files.
pub fn summarize(config: &SuiteConfig, traces: &[CampaignTrace]) -> SuiteSummary {
    let single = config.effective_objectives().is_none();
    let optimum = config.surface.known_optimum().filter(|_| single);
    let discrete = config.surface.is_discrete();

    let runs: Vec<RunSummary> = traces
        .iter()
        .map(|t| RunSummary {
            strategy: t.strategy,
            seed: t.seed,
            status: if t.is_ok() { "ok" } else { "failed" }.to_string(),
            error: t.error.clone(),
            records: t.records.len(),
            final_incumbent: t.records.last().map(|r| r.incumbent.clone()),
            final_regret: t.records.last().and_then(|r| r.regret),
            evals_to_optimum: match (&optimum, discrete) {
                (Some(o), true) => evals_to_optimum(t, &o.locations),
                _ => None,
            },
        })
        .collect();

    let mut by_strategy: BTreeMap<usize, Vec<(&CampaignTrace, &RunSummary)>> = BTreeMap::new();
    for (t, r) in traces.iter().zip(&runs) {
        let pos = config
            .strategies
            .iter()
            .position(|s| *s == t.strategy)
            .unwrap_or(usize::MAX);
        by_strategy.entry(pos).or_default().push((t, r));
    }

    let aggregates = by_strategy
        .values()
        .map(|group| {
            let strategy = group[0].0.strategy;
            let with_records: Vec<&CampaignTrace> = group
                .iter()
                .map(|(t, _)| *t)
                .filter(|t| !t.records.is_empty())
                .collect();
            let final_regrets: Vec<f64> =
                group.iter().filter_map(|(_, r)| r.final_regret).collect();

            let (mut regret_mean, mut regret_ci_low, mut regret_ci_high) =
                (Vec::new(), Vec::new(), Vec::new());
            if optimum.is_some() && !with_records.is_empty() {
                for k in 0..config.budget {
                    let column: Vec<f64> = with_records
                        .iter()
                        .filter_map(|t| {
                            t.records.get(k).or(t.records.last()).and_then(|r| r.regret)
                        })
                        .collect();
                    if let Some(s) = Stats::of(&column) {
                        regret_mean.push(s.mean);
                        regret_ci_low.push(s.mean - s.ci_half);
                        regret_ci_high.push(s.mean + s.ci_half);
                    }
                }
            }

            let evals_to_optimum = (discrete && optimum.is_some()).then(|| {
                let found: Vec<f64> = group
                    .iter()
                    .filter_map(|(_, r)| r.evals_to_optimum.map(|e| e as f64))
                    .collect();
                EvalsToOptimum {
                    found: found.len(),
                    not_found: group.len() - found.len(),
                    stats: Stats::of(&found),
                }
            });

            let finals: Vec<&Vec<f64>> = group
                .iter()
                .filter_map(|(_, r)| r.final_incumbent.as_ref())
                .collect();
            let final_incumbent_mean = if finals.is_empty() {
                Vec::new()
            } else {
                (0..finals[0].len())
                    .map(|j| finals.iter().map(|v| v[j]).sum::<f64>() / finals.len() as f64)
                    .collect()
            };

            StrategyAggregate {
                strategy,
                runs: group.len(),
                failed: group.iter().filter(|(t, _)| !t.is_ok()).count(),
                final_regret: Stats::of(&final_regrets),
                regret_mean,
                regret_ci_low,
                regret_ci_high,
                evals_to_optimum,
                final_incumbent_mean,
            }
        })
        .collect();

    let space = config.surface.space();
    SuiteSummary {
        surface: config.surface.name().to_string(),
        strategies: config.strategies.clone(),
        budget: config.budget,
        repeats: config.repeats,
        seed: config.seed,
        lambda_schedule: config.lambda_schedule.clone(),
        config_hash: config.config_hash(),
        parameters: space.params().iter().map(|p| p.name.clone()).collect(),
        objectives: config.objective_names(),
        f_star: optimum.map(|o| o.value),
        runs,
        aggregates,
    }
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes traces, `summary.json` and `timings.csv` into `dir`.
pub fn write_suite(report: &SuiteReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for trace in &report.traces {
        write_atomic(&dir.join(trace.file_name()), trace.to_csv()?.as_bytes())?;
    }
    let mut summary = serde_json::to_string_pretty(&report.summary)?;
    summary.push('\n');
    write_atomic(&dir.join(SUMMARY_FILE), summary.as_bytes())?;

    let mut timings = csv::Writer::from_writer(Vec::new());
    timings.write_record(["strategy", "seed", "iteration", "wall_ms"])?;
    for trace in &report.traces {
        for r in &trace.records {
            timings.write_record([
                trace.strategy.to_string(),
                trace.seed.to_string(),
                r.iteration.to_string(),
                r.wall_ms.to_string(),
            ])?;
        }
    }
    let bytes = timings
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(&dir.join(TIMINGS_FILE), &bytes)
}

/// Rebuilds the summary of a written suite from its trace CSVs. Run status
/// and error messages are taken from the existing `summary.json`, since the
/// traces do not record them.
pub fn resummarize(config: &SuiteConfig, dir: &Path) -> Result<SuiteSummary> {
    let written: SuiteSummary = serde_json::from_str(&fs::read_to_string(dir.join(SUMMARY_FILE))?)?;
    let space = config.surface.space();
    let n_objectives = config.objective_names().len();
    let mut traces = Vec::new();
    for run in &written.runs {
        let name = format!("{TRACE_FILE_PREFIX}{}_{}.csv", run.strategy, run.seed);
        let text = fs::read_to_string(dir.join(name))?;
        let mut trace = CampaignTrace::from_csv(
            &text,
            config.surface,
            run.strategy,
            run.seed,
            &space,
            n_objectives,
        )?;
        trace.error = run.error.clone();
        traces.push(trace);
    }
    Ok(summarize(config, &traces))
}
