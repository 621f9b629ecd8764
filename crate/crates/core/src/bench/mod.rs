//! Randomized benchmark: subspace pairs drawn per (Friedrichs angle,
//! normalized gap) category, seeded starting points, iteration counts per
//! method and category.

mod export;
mod grid;
mod run;
mod sample;
mod stats;

pub use export::{plot_file_name, read_raw_csv, write_plot_csv, write_raw_csv, write_table_csv};
pub use grid::{CategoryGrid, Cell};
pub use run::{run_grid, run_on_pair, BenchmarkTable, InstanceRecord, MethodStats};

pub use sample::{derive_seed, random_start, sample_pair};
pub use stats::{mean, median, sample_std};
