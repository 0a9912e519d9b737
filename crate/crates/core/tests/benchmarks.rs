use std::f64::consts::PI;

use cbo::benchmarks::{self, eval_flow_reactor, Surface, BRANIN_MIN};
use cbo::domain::{seeded_rng, ParamVector};
use cbo::error::Error;

fn pv(a: f64, b: f64) -> ParamVector {
    ParamVector(vec![a, b])
}

fn count_grid(pred: impl Fn(f64, f64) -> bool) -> usize {
    (0..21)
        .flat_map(|i| (0..21).map(move |j| (i as f64, j as f64)))
        .filter(|&(a, b)| pred(a, b))
        .count()
}

#[test]
fn tile_counts_match_independent_enumeration() {
    let slope = count_grid(|a, b| {
        let y = a * a + b * b;
        !(5.0 < y && y < 25.0) && !(70.0 < y && y < 110.0) && !(200.0 < y && y < 300.0)
    });
    let sphere = count_grid(|a, b| a != 9.0 && a != 11.0 && b != 9.0 && b != 11.0);
    let michalewicz = count_grid(|a, b| {
        let y = (a - 14.0).powi(2) + (b - 10.0).powi(2);
        !(5.0 < y && y < 30.0)
            && !(12.5 < a && a < 15.5 && b < 5.5)
            && !(8.5 < b && b < 11.5 && a < 9.5)
    });
    assert_eq!(slope, 311);
    assert_eq!(michalewicz, 323);
    assert_eq!(sphere, 361);
    assert_eq!(benchmarks::feasible_grid("slope").unwrap().len(), slope);
    assert_eq!(benchmarks::feasible_grid("sphere").unwrap().len(), sphere);
    assert_eq!(
        benchmarks::feasible_grid("michalewicz").unwrap().len(),
        michalewicz
    );
    let camel = benchmarks::feasible_grid("camel").unwrap().len();
    assert!((441 - 103..441 - 3).contains(&camel));
}

#[test]
fn feasibility_examples() {
    assert!(benchmarks::is_feasible("branin", &pv(0.5, 0.5)).unwrap());
    assert!(!benchmarks::is_feasible("sphere", &pv(9.0, 3.0)).unwrap());
    assert!(!benchmarks::is_feasible("dejong", &pv(0.55, 0.50)).unwrap());
    assert!(!benchmarks::is_feasible("camel", &pv(7.0, 11.0)).unwrap());
    assert!(!benchmarks::is_feasible("discrete_ackley", &pv(0.43, 0.9)).unwrap());
    assert!(matches!(
        benchmarks::is_feasible("rosenbrock", &pv(0.1, 0.1)),
        Err(Error::Name(_))
    ));
    assert!(matches!(
        benchmarks::feasible_grid("branin"),
        Err(Error::Kind(_))
    ));
}

#[test]
fn branin_keeps_exactly_one_minimum() {
    let to_unit = |x1: f64, x2: f64| pv((x1 + 5.0) / 15.0, x2 / 15.0);
    let s = Surface::Branin;
    assert!(!s.is_feasible(&to_unit(-PI, 12.275)));
    assert!(!s.is_feasible(&to_unit(9.42478, 2.475)));
    assert!(s.is_feasible(&to_unit(PI, 2.275)));
    for (a, b) in [(-PI, 12.275), (PI, 2.275), (9.42478, 2.475)] {
        assert!((benchmarks::branin(a, b) - BRANIN_MIN).abs() < 1e-4);
    }
}

#[test]
fn continuous_optima_beat_dense_grid() {
    for s in [
        Surface::Branin,
        Surface::Schwefel,
        Surface::Dejong,
        Surface::DiscreteAckley,
    ] {
        let opt = s.known_optimum().unwrap();
        for loc in &opt.locations {
            assert!(s.is_feasible(loc), "{s} optimum infeasible");
            assert!((s.evaluate(loc).unwrap()[0] - opt.value).abs() < 1e-9);
        }
        let mut grid_min = f64::INFINITY;
        for i in 0..=500 {
            for j in 0..=500 {
                let x = pv(i as f64 / 500.0, j as f64 / 500.0);
                if s.is_feasible(&x) {
                    grid_min = grid_min.min(s.evaluate(&x).unwrap()[0]);
                }
            }
        }
        assert!(
            opt.value <= grid_min + 1e-9,
            "{s}: optimum {} above grid min {grid_min}",
            opt.value
        );
    }
}

#[test]
fn dejong_constrained_minimum_lies_on_the_band() {
    let opt = Surface::Dejong.known_optimum().unwrap();
    assert_eq!(opt.value, 0.5);
    assert_eq!(opt.locations.len(), 2);
}

#[test]
fn discrete_optima_by_exhaustive_enumeration() {
    for s in [
        Surface::Slope,
        Surface::Sphere,
        Surface::Michalewicz,
        Surface::Camel,
    ] {
        let grid = s.feasible_grid().unwrap();
        let best = grid
            .iter()
            .map(|x| s.evaluate(x).unwrap()[0])
            .fold(f64::INFINITY, f64::min);
        let opt = s.known_optimum().unwrap();
        assert_eq!(opt.value, best, "{s}");
        assert!(!opt.locations.is_empty());
        for loc in &opt.locations {
            assert!(s.is_feasible(loc));
        }
    }
    assert_eq!(
        Surface::Sphere.known_optimum().unwrap().locations,
        vec![pv(10.0, 10.0)]
    );
    assert_eq!(
        Surface::Slope.known_optimum().unwrap().locations,
        vec![pv(0.0, 0.0)]
    );
}

#[test]
fn dejong_volume_against_grid() {
    let s = Surface::Dejong;
    let n = 500;
    let mut feasible = 0usize;
    for i in 0..n {
        for j in 0..n {
            if s.is_feasible(&pv(
                (i as f64 + 0.5) / n as f64,
                (j as f64 + 0.5) / n as f64,
            )) {
                feasible += 1;
            }
        }
    }
    let oracle = feasible as f64 / (n * n) as f64;
    let estimate = s
        .space()
        .estimate_feasible_fraction(10_000, &mut seeded_rng(3))
        .unwrap();
    assert!((estimate - oracle).abs() < 0.02, "{estimate} vs {oracle}");
}

#[test]
fn surface_registry() {
    assert_eq!(Surface::ALL.len(), 9);
    for s in Surface::ALL {
        assert_eq!(Surface::from_name(s.name()).unwrap(), s);
    }
    assert_eq!(
        Surface::from_name("Discrete-Ackley").unwrap(),
        Surface::DiscreteAckley
    );
    assert_eq!(
        benchmarks::eval_surface("slope", &pv(3.0, 4.0)).unwrap(),
        7.0
    );
    assert_eq!(
        benchmarks::eval_surface("sphere", &pv(12.0, 7.0)).unwrap(),
        13.0
    );
}

#[test]
fn flow_reactor_objectives() {
    let (_, cost) = eval_flow_reactor(120.0, 100.0, 100.0).unwrap();
    assert!((cost - 0.0171474).abs() < 1e-12);
    assert!(matches!(
        eval_flow_reactor(120.0, 0.0, 0.0),
        Err(Error::Feasibility(_))
    ));
    assert!(matches!(
        eval_flow_reactor(120.0, 200.0, 50.0),
        Err(Error::Feasibility(_))
    ));
    let y = Surface::FlowReactor
        .evaluate(&ParamVector(vec![0.5, 0.5, 0.5]))
        .unwrap();
    assert_eq!(y.len(), 2);
    assert!((y[1] - 0.0171474).abs() < 1e-12);
}
