//! Regenerates the frozen constraint tables under `data/`.

use std::path::Path;

use cbo::benchmarks::tables;

fn main() -> std::io::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&data)?;
    let circles = tables::generate_schwefel_circles(tables::TABLE_SEED);
    std::fs::write(
        data.join("schwefel_circles_v1.csv"),
        tables::schwefel_csv(&circles),
    )?;
    let points = tables::generate_camel_points(tables::TABLE_SEED);
    std::fs::write(
        data.join("camel_infeasible_v1.csv"),
        tables::camel_csv(&points),
    )?;
    println!("wrote tables to {}", data.display());
    Ok(())
}
