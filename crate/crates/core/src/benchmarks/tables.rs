//! Frozen data behind the two randomly generated constraints.
//!
//! Both tables were generated once with [`generate_schwefel_circles`] and
//! [`generate_camel_points`] from `seeded_rng(42)` and are shipped as CSV
//! under `data/`. Regenerate with `cargo run -p cbo-core --example gen_tables`.

use std::sync::OnceLock;

use rand::Rng;

use crate::domain::seeded_rng;

pub const TABLE_SEED: u64 = 42;
pub const SCHWEFEL_CIRCLES: usize = 20;
pub const CAMEL_RANDOM_POINTS: usize = 100;
/// Grid points always excluded from the Camel surface.
pub const CAMEL_FIXED_EXCLUSIONS: [(u32, u32); 3] = [(7, 11), (7, 15), (13, 5)];

pub const SCHWEFEL_CSV: &str = include_str!("../../data/schwefel_circles_v1.csv");
pub const CAMEL_CSV: &str = include_str!("../../data/camel_infeasible_v1.csv");

/// An excluded disk in normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Draws centers first, then radii, as the reference listing does.
pub fn generate_schwefel_circles(seed: u64) -> Vec<Circle> {
    let mut rng = seeded_rng(seed);
    let centers: Vec<[f64; 2]> = (0..SCHWEFEL_CIRCLES)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    centers
        .into_iter()
        .map(|center| Circle {
            center,
            radius: rng.random_range(0.05..0.15),
        })
        .collect()
}

/// 100 random grid points (all x0 draws, then all x1 draws) followed by the
/// fixed exclusions.
pub fn generate_camel_points(seed: u64) -> Vec<(u32, u32)> {
    let mut rng = seeded_rng(seed);
    let xs: Vec<u32> = (0..CAMEL_RANDOM_POINTS)
        .map(|_| rng.random_range(0..21))
        .collect();
    let ys: Vec<u32> = (0..CAMEL_RANDOM_POINTS)
        .map(|_| rng.random_range(0..21))
        .collect();
    xs.into_iter()
        .zip(ys)
        .chain(CAMEL_FIXED_EXCLUSIONS)
        .collect()
}

pub fn schwefel_csv(circles: &[Circle]) -> String {
    let mut out = String::from("cx,cy,radius\n");
    for c in circles {
        out.push_str(&format!("{},{},{}\n", c.center[0], c.center[1], c.radius));
    }
    out
}

pub fn camel_csv(points: &[(u32, u32)]) -> String {
    let mut out = String::from("x0,x1\n");
    for (a, b) in points {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}

fn parse_rows(csv: &str) -> impl Iterator<Item = Vec<&str>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').collect())
}

pub fn schwefel_circles() -> &'static [Circle] {
    static TABLE: OnceLock<Vec<Circle>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let circles: Vec<Circle> = parse_rows(SCHWEFEL_CSV)
            .map(|f| Circle {
                center: [f[0].parse().unwrap(), f[1].parse().unwrap()],
                radius: f[2].parse().unwrap(),
            })
            .collect();
        assert_eq!(circles.len(), SCHWEFEL_CIRCLES, "corrupt Schwefel table");
        for c in &circles {
            assert!(c.center.iter().all(|v| (0.0..=1.0).contains(v)));
            assert!((0.05..=0.15).contains(&c.radius));
        }
        circles
    })
}

pub fn camel_points() -> &'static [(u32, u32)] {
    static TABLE: OnceLock<Vec<(u32, u32)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let points: Vec<(u32, u32)> = parse_rows(CAMEL_CSV)
            .map(|f| (f[0].parse().unwrap(), f[1].parse().unwrap()))
            .collect();
        assert_eq!(
            points.len(),
            CAMEL_RANDOM_POINTS + CAMEL_FIXED_EXCLUSIONS.len(),
            "corrupt Camel table"
        );
        assert!(points.iter().all(|&(a, b)| a <= 20 && b <= 20));
        points
    })
}
