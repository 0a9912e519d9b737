use cbo::acqopt::project_to_feasible;
use cbo::benchmarks::{Surface, GRID_OPTIONS};
use cbo::domain::ParamVector;
use cbo::planner::{Campaign, Strategy};
use cbo::surrogate::KernelSet;
use serde::Serialize;
use thiserror::Error;

/// Upper bounds that keep a single browser call responsive.
pub const MAX_RES: usize = 200;
pub const MAX_BUDGET: usize = 200;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error(transparent)]
    Core(#[from] cbo::error::Error),
    #[error("{0}")]
    Input(String),
}

type Result<T> = std::result::Result<T, DemoError>;

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceInfo {
    pub name: &'static str,
    pub discrete: bool,
}

/// Row-major grid; row `j` holds `x1 = ys[j]`. Infeasible cells are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct GridMap {
    pub surface: &'static str,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AcquisitionMap {
    pub grid: GridMap,
    pub observed: Vec<[f64; 2]>,
    pub proposal: [f64; 2],
    pub tau: f64,
    pub temp: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Projection {
    pub parent: [f64; 2],
    pub offspring: [f64; 2],
    pub projected: [f64; 2],
    pub offspring_feasible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignRun {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub incumbent: Vec<f64>,
    pub optimum: Option<f64>,
}

pub fn surfaces() -> Vec<SurfaceInfo> {
    Surface::ALL
        .iter()
        .filter(|s| s.space().dim() == 2)
        .map(|&s| SurfaceInfo {
            name: s.name(),
            discrete: s.is_discrete(),
        })
        .collect()
}

fn planar(name: &str) -> Result<Surface> {
    let surface = Surface::from_name(name)?;
    if surface.space().dim() != 2 {
        return Err(DemoError::Input(format!("`{name}` is not two-dimensional")));
    }
    Ok(surface)
}

fn strategy(name: &str) -> Result<Strategy> {
    name.parse().map_err(DemoError::Input)
}

fn index_scale(surface: Surface) -> f64 {
    if surface.is_discrete() {
        (GRID_OPTIONS - 1) as f64
    } else {
        1.0
    }
}

fn to_unit(surface: Surface, x: &ParamVector) -> [f64; 2] {
    let s = index_scale(surface);
    [x[0] / s, x[1] / s]
}

fn from_unit(surface: Surface, u: [f64; 2]) -> Result<ParamVector> {
    if !u.iter().all(|v| (0.0..=1.0).contains(v)) {
        return Err(DemoError::Input(format!(
            "{u:?} is outside the unit square"
        )));
    }
    let s = index_scale(surface);
    let snap = |v: f64| {
        if surface.is_discrete() {
            (v * s).round()
        } else {
            v
        }
    };
    Ok(ParamVector(vec![snap(u[0]), snap(u[1])]))
}

/// Grid axes: cell centers for continuous surfaces, every index otherwise.
fn axis(surface: Surface, res: usize) -> Result<Vec<f64>> {
    if surface.is_discrete() {
        return Ok((0..GRID_OPTIONS).map(|i| i as f64).collect());
    }
    if res == 0 || res > MAX_RES {
        return Err(DemoError::Input(format!(
            "resolution must be in 1..={MAX_RES}"
        )));
    }
    Ok((0..res).map(|i| (i as f64 + 0.5) / res as f64).collect())
}

fn grid_map(surface: Surface, res: usize, f: impl Fn(&ParamVector) -> f64) -> Result<GridMap> {
    let axis = axis(surface, res)?;
    let mut values = Vec::with_capacity(axis.len() * axis.len());
    for &y in &axis {
        for &x in &axis {
            let p = ParamVector(vec![x, y]);
            values.push(surface.is_feasible(&p).then(|| f(&p)));
        }
    }
    let s = index_scale(surface);
    let unit: Vec<f64> = axis.iter().map(|v| v / s).collect();
    Ok(GridMap {
        surface: surface.name(),
        xs: unit.clone(),
        ys: unit,
        values,
    })
}

pub fn surface_map(name: &str, res: usize) -> Result<GridMap> {
    let surface = planar(name)?;
    grid_map(surface, res, |p| {
        surface.evaluate(p).map(|v| v[0]).unwrap_or(f64::NAN)
    })
}

/// Runs `observations` steps, then maps the acquisition the next step uses.
pub fn acquisition_map(
    name: &str,
    strategy_name: &str,
    observations: usize,
    seed: u64,
    lambda: f64,
    res: usize,
) -> Result<AcquisitionMap> {
    let surface = planar(name)?;
    if observations > MAX_BUDGET {
        return Err(DemoError::Input(format!(
            "at most {MAX_BUDGET} observations"
        )));
    }
    let mut c = Campaign::builder(surface.space(), strategy(strategy_name)?, seed)
        .lambda_schedule(vec![lambda])
        .build()?;
    for _ in 0..observations {
        let p = c.ask()?;
        let y = surface.evaluate(&p.params)?;
        c.tell(&p, y[0])?;
    }
    let ks = KernelSet::new(c.space(), c.history(), c.feasible_fraction(), lambda);
    let grid = grid_map(surface, res, |p| ks.acquisition(p))?;
    let proposal = c.ask()?;
    Ok(AcquisitionMap {
        grid,
        observed: c
            .history()
            .iter()
            .map(|o| to_unit(surface, &o.params))
            .collect(),
        proposal: to_unit(surface, &proposal.params),
        tau: ks.tau(),
        temp: ks.temp(),
    })
}

pub fn project(name: &str, parent: [f64; 2], offspring: [f64; 2]) -> Result<Projection> {
    let surface = planar(name)?;
    let space = surface.space();
    let p = from_unit(surface, parent)?;
    let o = from_unit(surface, offspring)?;
    if !space.is_feasible(&p) {
        return Err(DemoError::Input("parent must be feasible".into()));
    }
    let r = project_to_feasible(&space, &o, &p, 0.01);
    Ok(Projection {
        parent: to_unit(surface, &p),
        offspring: to_unit(surface, &o),
        projected: to_unit(surface, &r),
        offspring_feasible: space.is_feasible(&o),
    })
}

/// Ask/tell loop without wall-clock timing, which the browser lacks.
pub fn campaign(name: &str, strategy_name: &str, budget: usize, seed: u64) -> Result<CampaignRun> {
    let surface = planar(name)?;
    if budget == 0 || budget > MAX_BUDGET {
        return Err(DemoError::Input(format!(
            "budget must be in 1..={MAX_BUDGET}"
        )));
    }
    let mut c = Campaign::builder(surface.space(), strategy(strategy_name)?, seed).build()?;
    let mut run = CampaignRun {
        points: Vec::with_capacity(budget),
        values: Vec::with_capacity(budget),
        incumbent: Vec::with_capacity(budget),
        optimum: surface.known_optimum().map(|o| o.value),
    };
    for _ in 0..budget {
        let p = c.ask()?;
        let y = surface.evaluate(&p.params)?[0];
        c.tell(&p, y)?;
        let best = run.incumbent.last().map_or(y, |&b: &f64| b.min(y));
        run.points.push(to_unit(surface, &p.params));
        run.values.push(y);
        run.incumbent.push(best);
    }
    Ok(run)
}
