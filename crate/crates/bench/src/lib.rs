//! Shared fixtures for the criterion benchmarks.

use young_core::{random_density, Grid, GridFunction};

/// A pair of seeded random densities on `[-8, 8]` with `n` points.
pub fn density_pair(n: usize) -> (GridFunction, GridFunction) {
    let grid = Grid::symmetric(8.0, n).expect("valid grid");
    (
        random_density(1, &grid, 0.4).expect("density"),
        random_density(2, &grid, 0.4).expect("density"),
    )
}
