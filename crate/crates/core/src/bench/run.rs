use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{CategoryGrid, Cell};
use super::sample::{derive_seed, random_start, sample_pair};
use super::stats::{mean, median, sample_std};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::methods::{MethodSpec, RunOutcome, Stepper};
use crate::subspaces::PairGeometry;

/// One (pair, start, method) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub cell: Cell,
    pub pair_seed: u64,
    pub start_seed: u64,
    pub method: MethodSpec,
    /// Steps until the stopping rule fired; `max_iter` for unsolved runs.
    pub iterations: usize,
    pub solved: bool,
    pub theta_f: f64,
    pub theta_p: f64,
    pub p: usize,
    pub q: usize,
    pub s: usize,
}

/// Median, mean and sample standard deviation of iteration counts for one
/// method over a category (`W3` or `W3Z2`). Unsolved runs count as `max_iter`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub category: String,
    pub method: MethodSpec,
    pub instances: usize,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub unsolved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub master_seed: u64,
    pub methods: Vec<MethodSpec>,
    /// Raw counts in (cell, pair, start, method) order.
    pub records: Vec<InstanceRecord>,
    /// Per primary category, methods in input order.
    pub primary_stats: Vec<MethodStats>,
    /// Per cell, methods in input order.
    pub cell_stats: Vec<MethodStats>,
}

impl BenchmarkTable {
    /// Rebuilds the statistics from raw records.
    pub fn from_records(master_seed: u64, methods: Vec<MethodSpec>, records: Vec<InstanceRecord>) -> Self {
        let mut primaries: Vec<usize> = records.iter().map(|r| r.cell.primary).collect();
        primaries.sort_unstable();
        primaries.dedup();
        let mut cells: Vec<Cell> = records.iter().map(|r| r.cell).collect();
        cells.sort_unstable();
        cells.dedup();

        let stats = |category: String, keep: &dyn Fn(&InstanceRecord) -> bool| -> Vec<MethodStats> {
            methods
                .iter()
                .map(|&method| {
                    let chosen: Vec<&InstanceRecord> =
                        records.iter().filter(|r| r.method == method && keep(r)).collect();
                    let counts: Vec<f64> = chosen.iter().map(|r| r.iterations as f64).collect();
                    MethodStats {
                        category: category.clone(),
                        method,
                        instances: counts.len(),
                        median: median(&counts),
                        mean: mean(&counts),
                        std: sample_std(&counts),
                        unsolved: chosen.iter().filter(|r| !r.solved).count(),
                    }
                })
                .collect()
        };
        let primary_stats = primaries
            .iter()
            .flat_map(|&i| stats(format!("W{i}"), &|r| r.cell.primary == i))
            .collect();
        let cell_stats = cells.iter().flat_map(|&c| stats(c.to_string(), &|r| r.cell == c)).collect();
        Self { master_seed, methods, records, primary_stats, cell_stats }
    }

    pub fn stats_for(&self, category: &str, method: &MethodSpec) -> Option<&MethodStats> {
        self.primary_stats
            .iter()
            .chain(&self.cell_stats)
            .find(|s| s.category == category && s.method == *method)
    }
}

/// Runs every method from `x0` on `geom`, in order. A divergent run is
/// reported as unsolved at `max_iter`.
pub fn run_on_pair(
    geom: &PairGeometry,
    methods: &[MethodSpec],
    x0: &Vector,
    eps: f64,
    max_iter: usize,
) -> Result<Vec<RunOutcome>> {
    methods
        .iter()
        .map(|&spec| match Stepper::new(spec, geom)?.run(x0, eps, max_iter, |_, _, _, _| {}) {
            Err(Error::Divergence { .. }) => {
                Ok(RunOutcome { iterations: max_iter, terminated: false, final_distance: f64::INFINITY })
            }
            other => other,
        })
        .collect()
}

/// Full experiment. Deterministic in `(grid, methods, master_seed)`
/// regardless of thread count.
pub fn run_grid(grid: &CategoryGrid, methods: &[MethodSpec], master_seed: u64) -> Result<BenchmarkTable> {
    grid.validate()?;
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    let pair_jobs: Vec<(Cell, u64)> = grid
        .selected_cells()
        .into_iter()
        .flat_map(|cell| {
            (0..grid.pairs_per_cell).map(move |k| {
                (cell, derive_seed(master_seed, &[cell.primary as u64, cell.secondary as u64, k as u64]))
            })
        })
        .collect();
    let pairs: Vec<(Cell, u64, PairGeometry)> = pair_jobs
        .into_par_iter()
        .map(|(cell, seed)| sample_pair(cell, grid, seed).map(|g| (cell, seed, g)))
        .collect::<Result<_>>()?;

    let runs: Vec<(usize, u64)> = (0..pairs.len())
        .flat_map(|i| {
            let pair_seed = pairs[i].1;
            (0..grid.starts_per_pair).map(move |l| (i, derive_seed(pair_seed, &[l as u64])))
        })
        .collect();
    let records: Vec<Vec<InstanceRecord>> = runs
        .into_par_iter()
        .map(|(i, start_seed)| {
            let (cell, pair_seed, geom) = &pairs[i];
            let x0 = random_start(grid.ambient_dim, grid.start_norm, start_seed);
            let outcomes = run_on_pair(geom, methods, &x0, grid.eps, grid.max_iter)?;
            Ok(methods
                .iter()
                .zip(outcomes)
                .map(|(&method, out)| InstanceRecord {
                    cell: *cell,
                    pair_seed: *pair_seed,
                    start_seed,
                    method,
                    iterations: out.iterations,
                    solved: out.terminated,
                    theta_f: geom.theta_f.expect("sampled pairs have a Friedrichs angle"),
                    theta_p: geom.theta_p,
                    p: geom.p(),
                    q: geom.q(),
                    s: geom.s,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkTable::from_records(master_seed, methods.to_vec(), records.into_iter().flatten().collect()))
}
