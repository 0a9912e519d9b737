use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::GeneticConfig;
use crate::domain::{ParamVector, ParameterSpace};
use crate::surrogate::KernelSet;

/// Hard cap on bisection steps; the tolerance test normally ends the search
/// after `log2(1 / tol)` steps.
const MAX_BISECTIONS: usize = 64;

/// Evolves the starting population against the acquisition and returns the
/// final population. Every returned member is feasible and the population size
/// never changes.
pub fn optimize_genetic<R: Rng + ?Sized>(
    ks: &KernelSet,
    space: &ParameterSpace,
    init: &[ParamVector],
    cfg: &GeneticConfig,
    rng: &mut R,
) -> Vec<ParamVector> {
    let mut population = init.to_vec();
    let mut fitness: Vec<f64> = population.iter().map(|x| ks.acquisition(x)).collect();
    for _ in 0..cfg.max_generations {
        if population_converged(space, &population, cfg.diversity_stop) {
            break;
        }
        population = evolve_generation(space, &population, &fitness, cfg, rng);
        fitness = population.iter().map(|x| ks.acquisition(x)).collect();
    }
    population
}

/// True when every attribute spans less than `threshold` of its range.
/// A categorical attribute spans 0 when all members agree and 1 otherwise.
pub fn population_converged(
    space: &ParameterSpace,
    population: &[ParamVector],
    threshold: f64,
) -> bool {
    if population.is_empty() {
        return true;
    }
    (0..space.dim()).all(|d| {
        let (lo, hi) = population
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x[d]), hi.max(x[d]))
            });
        let span = if space.params()[d].is_categorical() {
            if hi > lo {
                1.0
            } else {
                0.0
            }
        } else {
            (hi - lo) / space.index_span(d)
        };
        span < threshold
    })
}

/// One generation: tournament selection, pairwise crossover, mutation, with
/// every modified child projected back into the feasible region, followed by
/// the elites of the current generation (lower fitness is better).
pub fn evolve_generation<R: Rng + ?Sized>(
    space: &ParameterSpace,
    population: &[ParamVector],
    fitness: &[f64],
    cfg: &GeneticConfig,
    rng: &mut R,
) -> Vec<ParamVector> {
    let size = population.len();
    assert_eq!(size, fitness.len());
    if size == 0 {
        return Vec::new();
    }

    let mut ranked: Vec<usize> = (0..size).collect();
    ranked.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
    let n_elite = ((size as f64 * cfg.elite_fraction).floor() as usize)
        .max(1)
        .min(size);

    let mut offspring: Vec<ParamVector> = (0..size - n_elite)
        .map(|_| population[tournament(fitness, cfg.tournament_size, rng)].clone())
        .collect();

    for pair in offspring.chunks_exact_mut(2) {
        if rng.random::<f64>() < cfg.crossover_prob {
            let (left, right) = pair.split_at_mut(1);
            let (p1, p2) = (left[0].clone(), right[0].clone());
            let (c1, c2) = crossover(&p1, &p2, rng);
            left[0] = project_to_feasible(space, &c1, &p1, cfg.projection_tol);
            right[0] = project_to_feasible(space, &c2, &p2, cfg.projection_tol);
        }
    }

    for child in offspring.iter_mut() {
        if rng.random::<f64>() < cfg.mutation_prob {
            let mutant = mutate(space, child, cfg, rng);
            *child = project_to_feasible(space, &mutant, child, cfg.projection_tol);
        }
    }

    offspring.extend(ranked[..n_elite].iter().map(|&i| population[i].clone()));
    offspring
}

/// Tournament with replacement; the lowest fitness wins, ties go to the
/// earlier index.
fn tournament<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    (0..size)
        .map(|_| rng.random_range(0..fitness.len()))
        .min_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)))
        .expect("tournament size is at least 1")
}

/// Uniform crossover for three or more dims, two-point crossover otherwise.
pub fn crossover<R: Rng + ?Sized>(
    a: &ParamVector,
    b: &ParamVector,
    rng: &mut R,
) -> (ParamVector, ParamVector) {
    let (mut c1, mut c2) = (a.clone(), b.clone());
    let size = a.len();
    if size >= 3 {
        for d in 0..size {
            if rng.random::<f64>() < 0.5 {
                std::mem::swap(&mut c1.0[d], &mut c2.0[d]);
            }
        }
    } else if size == 2 {
        let mut lo = rng.random_range(1..=size);
        let mut hi = rng.random_range(1..=size - 1);
        if hi >= lo {
            hi += 1;
        } else {
            std::mem::swap(&mut lo, &mut hi);
        }
        for d in lo..hi {
            std::mem::swap(&mut c1.0[d], &mut c2.0[d]);
        }
    }
    (c1, c2)
}

/// Per-attribute mutation. Continuous values get a `N(0, scale)` kick and are
/// clamped to `[0, 1]`; discrete indices get the same kick measured in units
/// of the index range, rounded to a whole step; categorical values are
/// redrawn uniformly.
pub fn mutate<R: Rng + ?Sized>(
    space: &ParameterSpace,
    x: &ParamVector,
    cfg: &GeneticConfig,
    rng: &mut R,
) -> ParamVector {
    let mut out = x.clone();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    for (d, p) in space.params().iter().enumerate() {
        if rng.random::<f64>() >= cfg.indep_mutation_prob {
            continue;
        }
        match p.option_count() {
            None => {
                out[d] = (x[d] + cfg.mutation_scale * unit.sample(rng)).clamp(0.0, 1.0);
            }
            Some(m) if p.is_discrete() => {
                let step = (cfg.mutation_scale * (m - 1) as f64 * unit.sample(rng)).round();
                out[d] = (x[d] + step).clamp(0.0, (m - 1) as f64);
            }
            Some(m) => {
                out[d] = rng.random_range(0..m) as f64;
            }
        }
    }
    out
}

/// Repairs an infeasible offspring using its feasible parent.
///
/// Categorical values are first reset to the parent's. If that is not enough,
/// a bisection along the parent-offspring segment keeps a feasible and an
/// infeasible end until they are closer than `tol` (infinity norm) on
/// continuous dims and at most one step apart on discrete dims, and the
/// feasible end is kept. Finally the offspring's own categorical values are
/// restored when that stays feasible.
pub fn project_to_feasible(
    space: &ParameterSpace,
    offspring: &ParamVector,
    parent: &ParamVector,
    tol: f64,
) -> ParamVector {
    if space.is_feasible(offspring) {
        return offspring.clone();
    }
    let params = space.params();
    let categorical: Vec<usize> = (0..params.len())
        .filter(|&d| params[d].is_categorical())
        .collect();

    let mut reset = offspring.clone();
    for &d in &categorical {
        reset[d] = parent[d];
    }
    if !categorical.is_empty() && space.is_feasible(&reset) {
        return reset;
    }

    let point_at = |t: f64| {
        let mut p = reset.clone();
        for d in 0..params.len() {
            if params[d].is_categorical() {
                continue;
            }
            let v = parent[d] + t * (reset[d] - parent[d]);
            p[d] = if params[d].is_continuous() {
                v
            } else {
                v.round()
            };
        }
        p
    };
    let separated = |a: &ParamVector, b: &ParamVector| {
        (0..params.len()).any(|d| {
            let diff = (a[d] - b[d]).abs();
            if params[d].is_continuous() {
                diff >= tol
            } else {
                diff > 1.0
            }
        })
    };

    let (mut t_in, mut t_out) = (0.0_f64, 1.0_f64);
    let mut inside = parent.clone();
    let mut outside = reset.clone();
    for _ in 0..MAX_BISECTIONS {
        if !separated(&inside, &outside) {
            break;
        }
        let t_mid = 0.5 * (t_in + t_out);
        let mid = point_at(t_mid);
        if space.is_feasible(&mid) {
            t_in = t_mid;
            inside = mid;
        } else {
            t_out = t_mid;
            outside = mid;
        }
    }

    if categorical.is_empty() {
        return inside;
    }
    let mut restored = inside.clone();
    for &d in &categorical {
        restored[d] = offspring[d];
    }
    if space.is_feasible(&restored) {
        restored
    } else {
        inside
    }
}
