use proptest::prelude::*;

use cbo::acqopt::project_to_feasible;
use cbo::chimera::{scalarize, Goal, ObjectiveSpec};
use cbo::domain::{ParamVector, ParameterDef, ParameterSpace, RawValue};
use cbo::surrogate::{DiscreteKernel, KernelSet};

fn mixed_space() -> ParameterSpace {
    ParameterSpace::new(vec![
        ParameterDef::continuous("t", -3.0, 7.0).unwrap(),
        ParameterDef::discrete("n", 0..=9).unwrap(),
        ParameterDef::categorical("c", ["a", "b", "c"]).unwrap(),
    ])
    .unwrap()
}

fn point() -> impl Strategy<Value = ParamVector> {
    (0.0..=1.0f64, 0usize..10, 0usize..3)
        .prop_map(|(t, n, c)| ParamVector(vec![t, n as f64, c as f64]))
}

/// First index whose threshold is violated (in raw units), `m` if none.
fn first_violation(specs: &[ObjectiveSpec], row: &[f64]) -> usize {
    specs
        .iter()
        .zip(row)
        .position(|(s, &v)| match (s.threshold, s.goal) {
            (None, _) => true,
            (Some(t), Goal::Minimize) => v > t,
            (Some(t), Goal::Maximize) => v < t,
        })
        .unwrap_or(specs.len())
}

fn specs_strategy() -> impl Strategy<Value = Vec<ObjectiveSpec>> {
    prop::collection::vec((any::<bool>(), -1.0..1.0f64), 1..4).prop_map(|raw| {
        let m = raw.len();
        raw.into_iter()
            .enumerate()
            .map(|(i, (max, t))| {
                let goal = if max { Goal::Maximize } else { Goal::Minimize };
                let threshold = if i + 1 == m { None } else { Some(t) };
                ObjectiveSpec::new(format!("o{i}"), goal, threshold)
            })
            .collect()
    })
}

fn ranking(merits: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..merits.len()).collect();
    idx.sort_by(|&a, &b| merits[a].total_cmp(&merits[b]).then(a.cmp(&b)));
    idx
}

proptest! {
    #[test]
    fn acquisition_is_bounded(
        centers in prop::collection::vec(point(), 0..15),
        seed_targets in prop::collection::vec(0.0..=1.0f64, 15),
        lambda in -2.0..2.0f64,
        vc in 0.05..=1.0f64,
        x in point(),
    ) {
        let space = mixed_space();
        let targets: Vec<f64> = seed_targets[..centers.len()].to_vec();
        let ks = KernelSet::from_parts(&space, centers, targets.clone(), vc, lambda, DiscreteKernel::Categorical);
        let alpha = ks.acquisition(&x);
        let lo = targets.iter().copied().fold(lambda, f64::min);
        let hi = targets.iter().copied().fold(lambda, f64::max);
        prop_assert!(alpha >= lo - 1e-12 && alpha <= hi + 1e-12, "{alpha} not in [{lo}, {hi}]");
    }

    #[test]
    fn normalize_round_trips(t in -3.0..=7.0f64, n in 0i64..10, c in 0usize..3) {
        let space = mixed_space();
        let raw = vec![RawValue::Number(t), RawValue::Number(n as f64), RawValue::Label(["a", "b", "c"][c].into())];
        let x = space.normalize(&raw).unwrap();
        let back = space.denormalize(&x).unwrap();
        match &back[0] {
            RawValue::Number(v) => prop_assert!((v - t).abs() < 1e-12),
            other => prop_assert!(false, "{other:?}"),
        }
        prop_assert_eq!(&back[1..], &raw[1..]);
    }

    #[test]
    fn tier_dominance(
        specs in specs_strategy(),
        rows in prop::collection::vec(prop::collection::vec(-1.5..1.5f64, 3), 2..12),
    ) {
        let m = specs.len();
        let history: Vec<Vec<f64>> = rows.into_iter().map(|r| r[..m].to_vec()).collect();
        let merits = scalarize(&specs, &history).unwrap();
        for a in 0..history.len() {
            for b in 0..history.len() {
                let (ka, kb) = (first_violation(&specs, &history[a]), first_violation(&specs, &history[b]));
                if ka > kb {
                    prop_assert!(merits[a] < merits[b], "tier {ka} merit {} vs tier {kb} merit {}", merits[a], merits[b]);
                }
            }
        }
    }

    #[test]
    fn affine_maps_leave_ranking_unchanged(
        specs in specs_strategy(),
        rows in prop::collection::vec(prop::collection::vec(-1.5..1.5f64, 3), 2..12),
        which in 0usize..3,
        scale in 0.1..10.0f64,
        shift in -5.0..5.0f64,
    ) {
        let m = specs.len();
        let j = which % m;
        let history: Vec<Vec<f64>> = rows.into_iter().map(|r| r[..m].to_vec()).collect();
        let mut mapped_specs = specs.clone();
        mapped_specs[j].threshold = specs[j].threshold.map(|t| scale * t + shift);
        let mapped: Vec<Vec<f64>> = history
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r[j] = scale * r[j] + shift;
                r
            })
            .collect();
        let before = scalarize(&specs, &history).unwrap();
        let after = scalarize(&mapped_specs, &mapped).unwrap();
        // Tiers are unchanged exactly; normalized values up to rounding.
        for (p, q) in before.iter().zip(&after) {
            prop_assert!((p - q).abs() < 1e-9);
        }
        let distinct = |v: &[f64]| {
            let mut s = v.to_vec();
            s.sort_by(f64::total_cmp);
            s.windows(2).all(|w| w[1] - w[0] > 1e-9)
        };
        if distinct(&before) {
            prop_assert_eq!(ranking(&before), ranking(&after));
        }
    }

    #[test]
    fn projection_is_feasible(
        parent in (0.0..=1.0f64, 0.0..=1.0f64),
        offspring in (0.0..=1.0f64, 0.0..=1.0f64),
    ) {
        let space = ParameterSpace::new(vec![
            ParameterDef::continuous("a", 0.0, 1.0).unwrap(),
            ParameterDef::continuous("b", 0.0, 1.0).unwrap(),
        ])
        .unwrap()
        .with_constraint(|x: &ParamVector| x[0] + x[1] <= 1.0);
        let p = ParamVector(vec![parent.0, parent.1]);
        prop_assume!(space.is_feasible(&p));
        let o = ParamVector(vec![offspring.0, offspring.1]);
        let r = project_to_feasible(&space, &o, &p, 0.01);
        prop_assert!(space.is_feasible(&r));
        if space.is_feasible(&o) {
            prop_assert_eq!(r, o);
        }
    }
}
