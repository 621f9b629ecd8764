use std::io::{Read, Write};

use super::run::{BenchmarkTable, InstanceRecord};
use super::stats::median;
use crate::error::{Error, Result};
use crate::methods::MethodSpec;

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// Rows are method × statistic, columns are the primary categories present.
pub fn write_table_csv<W: Write>(table: &BenchmarkTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let categories: Vec<String> = {
        let mut c: Vec<&str> = table.primary_stats.iter().map(|s| s.category.as_str()).collect();
        c.dedup();
        c.into_iter().map(str::to_owned).collect()
    };
    let mut header = vec!["method".to_owned(), "statistic".to_owned()];
    header.extend(categories.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;

    let cell = |method: &MethodSpec, cat: &str, f: &dyn Fn(&super::MethodStats) -> String| {
        table.stats_for(cat, method).map(f).unwrap_or_default()
    };
    if let Some(first) = table.methods.first() {
        let mut row = vec![String::new(), "instances".to_owned()];
        row.extend(categories.iter().map(|c| cell(first, c, &|s| s.instances.to_string())));
        w.write_record(&row).map_err(csv_err)?;
    }
    for method in &table.methods {
        let rows: [(&str, &dyn Fn(&super::MethodStats) -> String); 4] = [
            ("median", &|s| format!("{}", s.median)),
            ("mean", &|s| format!("{:.1}", s.mean)),
            ("std", &|s| format!("{:.1}", s.std)),
            ("unsolved", &|s| s.unsolved.to_string()),
        ];
        for (name, f) in rows {
            let mut row = vec![method.to_string(), name.to_owned()];
            row.extend(categories.iter().map(|c| cell(method, c, f)));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// One row per (cell, pair, start, method).
pub fn write_raw_csv<W: Write>(table: &BenchmarkTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &table.records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_raw_csv<R: Read>(input: R) -> Result<Vec<InstanceRecord>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// `(θ_F, median iterations over starts)` per pair for one method, sorted by `θ_F`.
pub fn write_plot_csv<W: Write>(table: &BenchmarkTable, method: &MethodSpec, out: W) -> Result<()> {
    let mut pairs: Vec<(f64, u64, String, Vec<f64>)> = Vec::new();
    for r in table.records.iter().filter(|r| r.method == *method) {
        match pairs.iter_mut().find(|p| p.1 == r.pair_seed) {
            Some(p) => p.3.push(r.iterations as f64),
            None => pairs.push((r.theta_f, r.pair_seed, r.cell.to_string(), vec![r.iterations as f64])),
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta_f", "median_iterations", "cell"]).map_err(csv_err)?;
    for (theta_f, _, cell, counts) in pairs {
        w.write_record([theta_f.to_string(), median(&counts).to_string(), cell]).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// File-system friendly name, e.g. `plot_S_best.csv` for `S:best`.
pub fn plot_file_name(method: &MethodSpec) -> String {
    let slug: String = method
        .to_string()
        .chars()
        .map(|c| match c {
            ':' => '_',
            '.' => 'p',
            '-' => 'm',
            c => c,
        })
        .collect();
    format!("plot_{slug}.csv")
}
