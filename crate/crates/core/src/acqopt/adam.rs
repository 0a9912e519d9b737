use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::AdamHillConfig;
use crate::domain::{ParamVector, ParameterSpace, SeededRng};
use crate::surrogate::KernelSet;

/// Refines every starting point with Adam on continuous dims and random
/// hill climbing on discrete/categorical dims.
///
/// A trajectory ends as soon as an Adam update leaves the feasible region;
/// hill moves are only accepted when they are feasible and lower the
/// acquisition. Each sample returns the best feasible iterate it visited, so
/// the acquisition never increases relative to its starting point.
pub fn optimize_adam_hill<R: Rng + ?Sized>(
    ks: &KernelSet,
    space: &ParameterSpace,
    init: &[ParamVector],
    cfg: &AdamHillConfig,
    rng: &mut R,
) -> Vec<ParamVector> {
    adam_hill_paths(ks, space, init, cfg, rng)
        .into_iter()
        .map(|path| {
            path.into_iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
                .map(|(_, (x, _))| x)
                .expect("paths are never empty")
        })
        .collect()
}

/// Every feasible iterate of every trajectory with its acquisition value,
/// starting point first. Consumes the RNG exactly like
/// [`optimize_adam_hill`].
pub fn adam_hill_paths<R: Rng + ?Sized>(
    ks: &KernelSet,
    space: &ParameterSpace,
    init: &[ParamVector],
    cfg: &AdamHillConfig,
    rng: &mut R,
) -> Vec<Vec<(ParamVector, f64)>> {
    let seeds: Vec<u64> = init.iter().map(|_| rng.random()).collect();
    init.par_iter()
        .zip(seeds)
        .map(|(x, seed)| refine(ks, space, x, cfg, &mut SeededRng::seed_from_u64(seed)))
        .collect()
}

fn refine(
    ks: &KernelSet,
    space: &ParameterSpace,
    start: &ParamVector,
    cfg: &AdamHillConfig,
    rng: &mut SeededRng,
) -> Vec<(ParamVector, f64)> {
    let params = space.params();
    let cont: Vec<usize> = (0..params.len())
        .filter(|&d| params[d].is_continuous())
        .collect();
    let disc: Vec<usize> = (0..params.len())
        .filter(|&d| !params[d].is_continuous())
        .collect();

    let adam_iters = if cont.is_empty() { 0 } else { cfg.max_iters };
    let hill_iters = if disc.is_empty() { 0 } else { cfg.hill_sweeps };

    let mut x = start.clone();
    let mut value = ks.acquisition(&x);
    let mut path = vec![(x.clone(), value)];

    let mut m = vec![0.0; cont.len()];
    let mut v = vec![0.0; cont.len()];
    let mut adam_active = adam_iters > 0;

    for iter in 0..adam_iters.max(hill_iters) {
        if adam_active && iter < adam_iters {
            let grad = gradient(ks, &x, &cont, cfg.fd_step);
            if grad.iter().all(|&g| g == 0.0) && m.iter().all(|&g| g == 0.0) {
                // Flat surface: Adam cannot move.
                adam_active = false;
            } else {
                let t = (iter + 1) as i32;
                let mut next = x.clone();
                for (j, &d) in cont.iter().enumerate() {
                    m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
                    v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
                    let m_hat = m[j] / (1.0 - cfg.beta1.powi(t));
                    let v_hat = v[j] / (1.0 - cfg.beta2.powi(t));
                    next[d] = (x[d] - cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon))
                        .clamp(0.0, 1.0);
                }
                if !space.is_feasible(&next) {
                    break;
                }
                x = next;
                value = ks.acquisition(&x);
                path.push((x.clone(), value));
            }
        }
        if iter < hill_iters {
            for &d in &disc {
                let options = params[d].option_count().unwrap_or(1);
                let mut cand = x.clone();
                cand[d] = rng.random_range(0..options) as f64;
                if cand[d] == x[d] {
                    continue;
                }
                let cand_value = ks.acquisition(&cand);
                if cand_value < value && space.is_feasible(&cand) {
                    x = cand;
                    value = cand_value;
                    path.push((x.clone(), value));
                }
            }
        }
        if !adam_active && iter + 1 >= hill_iters {
            break;
        }
    }
    path
}

/// Central finite-difference gradient over the listed dims.
fn gradient(ks: &KernelSet, x: &ParamVector, dims: &[usize], h: f64) -> Vec<f64> {
    let mut probe = x.clone();
    dims.iter()
        .map(|&d| {
            let orig = probe[d];
            probe[d] = orig + h;
            let up = ks.acquisition(&probe);
            probe[d] = orig - h;
            let down = ks.acquisition(&probe);
            probe[d] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}
