use cbo::benchmarks::Surface;
use cbo::chimera::{scalarize, Goal, ObjectiveSpec};
use cbo::domain::{ParamVector, ParameterDef, ParameterSpace};
use cbo::planner::{Campaign, Measurement, PlannerConfig, Strategy};

fn run(surface: Surface, strategy: Strategy, seed: u64, budget: usize) -> Vec<ParamVector> {
    let bench = surface.build();
    let mut c = Campaign::builder(bench.space.clone(), strategy, seed)
        .build()
        .unwrap();
    let mut out = Vec::new();
    for _ in 0..budget {
        let p = c.ask().unwrap();
        let y = bench.evaluate(&p.params).unwrap();
        c.tell(&p, y).unwrap();
        out.push(p.params);
    }
    out
}

#[test]
fn proposals_are_feasible_and_fresh() {
    for strategy in Strategy::ALL {
        let bench = Surface::Branin.build();
        let mut c = Campaign::builder(bench.space.clone(), strategy, 11)
            .build()
            .unwrap();
        for _ in 0..30 {
            let p = c.ask().unwrap();
            assert!(bench.space.is_feasible(&p.params));
            let nearest = c
                .history()
                .iter()
                .map(|o| bench.space.distance(&o.params, &p.params))
                .fold(f64::INFINITY, f64::min);
            assert!(
                nearest >= 0.01,
                "{strategy}: proposal {nearest} from history"
            );
            c.tell(&p, bench.evaluate(&p.params).unwrap()).unwrap();
        }
    }
}

#[test]
fn same_seed_same_sequence() {
    for strategy in Strategy::ALL {
        for surface in [Surface::Dejong, Surface::Camel] {
            assert_eq!(
                run(surface, strategy, 5, 12),
                run(surface, strategy, 5, 12),
                "{strategy} {surface}"
            );
        }
    }
    assert_ne!(
        run(Surface::Dejong, Strategy::Random, 5, 5),
        run(Surface::Dejong, Strategy::Random, 6, 5)
    );
}

#[test]
fn incumbent_never_gets_worse() {
    for strategy in Strategy::ALL {
        let bench = Surface::Schwefel.build();
        let mut c = Campaign::builder(bench.space.clone(), strategy, 2)
            .build()
            .unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..25 {
            let p = c.ask().unwrap();
            c.tell(&p, bench.evaluate(&p.params).unwrap()).unwrap();
            let inc = c.incumbent().unwrap().objective;
            assert!(inc <= last);
            last = inc;
        }
    }
}

#[test]
fn random_strategy_is_uniform_on_the_square() {
    let space = ParameterSpace::new(vec![
        ParameterDef::continuous("a", 0.0, 1.0).unwrap(),
        ParameterDef::continuous("b", 0.0, 1.0).unwrap(),
    ])
    .unwrap();
    let mut c = Campaign::builder(space, Strategy::Random, 4)
        .build()
        .unwrap();
    let n = 1600;
    let mut bins = [0usize; 16];
    for _ in 0..n {
        let p = c.ask().unwrap();
        let (i, j) = (
            (p.params[0] * 4.0).min(3.0) as usize,
            (p.params[1] * 4.0).min(3.0) as usize,
        );
        bins[4 * i + j] += 1;
        c.tell(&p, 0.0).unwrap();
    }
    let expected = n as f64 / 16.0;
    let chi2: f64 = bins
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    // 15 degrees of freedom, p = 0.001.
    assert!(chi2 < 37.70, "chi-square {chi2}, bins {bins:?}");
}

#[test]
fn multi_objective_merits_are_recomputed_on_every_tell() {
    let specs = vec![
        ObjectiveSpec::new("yield", Goal::Maximize, Some(0.9)),
        ObjectiveSpec::new("cost", Goal::Minimize, None),
    ];
    let bench = Surface::FlowReactor.build();
    let mut c = Campaign::builder(bench.space.clone(), Strategy::GryffinGenetic, 8)
        .objectives(specs.clone())
        .build()
        .unwrap();
    for _ in 0..15 {
        let p = c.ask().unwrap();
        let y = bench.evaluate(&p.params).unwrap();
        c.tell(&p, Measurement::Multi(y)).unwrap();
        let rows: Vec<Vec<f64>> = c.history().iter().map(|o| o.measurement.clone()).collect();
        let expected = scalarize(&specs, &rows).unwrap();
        let got: Vec<f64> = c.history().iter().map(|o| o.scalarized.unwrap()).collect();
        assert_eq!(got, expected);
        let best = expected.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(c.incumbent().unwrap().scalarized, Some(best));
    }
}

#[test]
fn tell_rejects_wrong_arity_and_infeasible_points() {
    let bench = Surface::FlowReactor.build();
    let mut c = Campaign::builder(bench.space.clone(), Strategy::Random, 1)
        .objectives(Surface::FlowReactor.objectives())
        .build()
        .unwrap();
    let p = c.ask().unwrap();
    assert!(c.tell(&p, 0.5).is_err());
    assert!(c
        .tell_params(ParamVector(vec![0.5, 0.0, 0.0]), vec![0.5, 0.1])
        .is_err());
    assert!(c.tell(&p, bench.evaluate(&p.params).unwrap()).is_ok());
}

#[test]
fn discrete_baselines_never_repeat() {
    for strategy in [Strategy::Random, Strategy::Genetic] {
        let grid = run(Surface::Slope, strategy, 3, 150);
        let mut seen = grid.clone();
        seen.sort_by(|a, b| a.as_slice().partial_cmp(b.as_slice()).unwrap());
        seen.dedup();
        assert_eq!(seen.len(), grid.len(), "{strategy} repeated a grid point");
    }
}

#[test]
fn small_sample_count_is_honoured() {
    let bench = Surface::Branin.build();
    let config = PlannerConfig {
        sample_count: Some(20),
        ..PlannerConfig::default()
    };
    for strategy in [Strategy::GryffinAdam, Strategy::GryffinGenetic] {
        let mut c = Campaign::builder(bench.space.clone(), strategy, 0)
            .config(config.clone())
            .lambda_schedule(vec![0.0])
            .build()
            .unwrap();
        for _ in 0..5 {
            let p = c.ask().unwrap();
            assert_eq!(p.lambda_used, Some(0.0));
            assert!(p.acquisition_value.is_some());
            c.tell(&p, bench.evaluate(&p.params).unwrap()).unwrap();
        }
    }
}
