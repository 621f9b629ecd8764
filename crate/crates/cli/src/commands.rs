use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use semiconv_core::bench::{
    plot_file_name, random_start, read_raw_csv, run_grid, write_plot_csv, write_raw_csv, write_table_csv,
    BenchmarkTable, CategoryGrid,
};
use semiconv_core::matrix_io::{parse_matrix, parse_vector};
use semiconv_core::methods::{iterate, predict_rate, MethodSpec, RatePrediction};
use semiconv_core::spectral::{classify_convergence, ConvergenceReport, Tolerances};
use semiconv_core::subspaces::{GeometrySummary, PairGeometry, Subspace, DEFAULT_ZERO_TOL};
use semiconv_core::{Error, Vector};

use crate::format;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NOT_CONVERGENT: u8 = 2;
pub const EXIT_MAX_ITER: u8 = 3;

const EXIT_HELP: &str = "\
Exit status:
  0  success (analyze: powers converge; solve: stopping rule met)
  1  usage, I/O, parse or numerical error
  2  analyze: powers do not converge
  3  solve: stopping rule not met within --max-iter (or the iteration diverged)";

const DEFAULT_METHODS: &str = "BT,S:best,S:mu2,S:mu3,T:best,T:1.5,MAP,DR";

/// Convergence of matrix powers and relaxed projection methods on two subspaces.
#[derive(Debug, Parser)]
#[command(name = "semiconv", version, after_help = EXIT_HELP)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether A^k converges; report ρ, γ, subdominant eigenvalues and the limit.
    Analyze(AnalyzeArgs),
    /// Principal angles, intersection dimension and Friedrichs angle of two subspaces.
    Angles(AnglesArgs),
    /// Run one method from a starting point until d(z_n, U∩V) <= eps.
    Solve(SolveArgs),
    /// Run the categorized random benchmark and write CSV tables.
    Bench(BenchArgs),
    /// Recompute and print the summary table of an earlier bench run.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Matrix file: header "rows cols", then one whitespace-separated row per line.
    matrix: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct AnglesArgs {
    /// Matrix whose columns span U.
    u: PathBuf,
    /// Matrix whose columns span V.
    v: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Matrix whose columns span U (dim U <= dim V).
    u: PathBuf,
    /// Matrix whose columns span V.
    v: PathBuf,
    /// T:<mu>, S:<mu>, R:<mu> (mu a number or "best"; S also takes mu2, mu3), MAP, DR, BT or AT.
    #[arg(long, short)]
    method: MethodSpec,
    /// Starting point: a vector file, or inline values such as "1,0,2".
    /// Defaults to a seeded random point of norm --start-norm.
    #[arg(long)]
    x0: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    start_norm: f64,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Write the per-step trace (columns n,d,mu_x) to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Grid configuration (JSON); omitted fields take the desk-scale defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for table.csv, raw.csv, plot_*.csv and run.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated methods, in table order.
    #[arg(long, default_value = DEFAULT_METHODS, value_delimiter = ',')]
    methods: Vec<MethodSpec>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory written by `semiconv bench --out`.
    dir: PathBuf,
    #[arg(long)]
    json: bool,
}

/// Written next to the CSV files so `report` can restore method order.
#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    master_seed: u64,
    methods: Vec<MethodSpec>,
    grid: CategoryGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub method: MethodSpec,
    pub mu: Option<f64>,
    pub iterations: usize,
    pub terminated: bool,
    /// Absent when the iteration diverged.
    pub final_distance: Option<f64>,
    pub diverged_at: Option<usize>,
    pub predicted: Option<RatePrediction>,
    pub fitted_rate: Option<f64>,
    pub geometry: GeometrySummary,
    pub warnings: Vec<String>,
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Angles(a) => angles(a),
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<semiconv_core::Matrix> {
    parse_matrix(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn read_subspace(path: &Path) -> Result<Subspace> {
    Ok(Subspace::from_spanning(&read_matrix(path)?, None))
}

/// Writes to stdout; a closed pipe (`semiconv ... | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn analyze(args: AnalyzeArgs) -> Result<u8> {
    let a = read_matrix(&args.matrix)?;
    let report = classify_convergence(&a, &Tolerances::for_matrix(&a))?;
    let code = if report.is_convergent() { EXIT_OK } else { EXIT_NOT_CONVERGENT };
    if args.json {
        print_json(&report)?;
    } else {
        emit(&render_report(&report))?;
    }
    Ok(code)
}

fn render_report(r: &ConvergenceReport) -> String {
    let mut out = String::new();
    if r.is_convergent() {
        let verdict = if r.optimal_rate_attained { "optimal" } else { "optimal rate NOT attained" };
        out += &format!("convergent, γ={}, {verdict}\n", format::num(r.gamma));
    } else {
        out += "not convergent\n";
    }
    out += &format!("spectral radius: {}\n", format::num(r.spectral_radius));
    out += &format!("gamma: {}\n", format::num(r.gamma));
    if r.subdominant_clusters.is_empty() {
        out += "subdominant eigenvalues: none\n";
    } else {
        out += "subdominant eigenvalues:\n";
        for c in &r.subdominant_clusters {
            out += &format!(
                "  {} (multiplicity {}, index {}, {})\n",
                format::complex(c.value),
                c.algebraic_multiplicity,
                c.index,
                if c.semisimple { "semisimple" } else { "not semisimple" }
            );
        }
    }
    if let Some(limit) = &r.limit {
        out += &format!(
            "limit is an orthogonal projector: {}\n",
            if r.limit_is_orthogonal_projector { "yes" } else { "no" }
        );
        out += "limit:\n";
        out += &semiconv_core::matrix_io::format_matrix(limit);
    }
    for w in &r.warnings {
        out += &format!("warning: {w}\n");
    }
    out
}

fn angles(args: AnglesArgs) -> Result<u8> {
    let (mut u, mut v) = (read_subspace(&args.u)?, read_subspace(&args.v)?);
    if u.ambient_dim() != v.ambient_dim() {
        bail!("ambient dimensions differ: {} vs {}", u.ambient_dim(), v.ambient_dim());
    }
    // angles are symmetric in (U, V); order by dimension
    if u.dim() > v.dim() {
        std::mem::swap(&mut u, &mut v);
    }
    let summary = PairGeometry::new(u, v, DEFAULT_ZERO_TOL)?.summary();
    if args.json {
        print_json(&summary)?;
    } else {
        emit(&render_geometry(&summary))?;
    }
    Ok(EXIT_OK)
}

fn render_geometry(g: &GeometrySummary) -> String {
    let theta_f = match g.theta_f {
        Some(t) => format::num(t),
        None => "undefined (U ⊆ V)".to_owned(),
    };
    format!(
        "n: {}\ndim U: {}\ndim V: {}\nangles: {}\ns: {}\ntheta_F: {theta_f}\ntheta_p: {}\n",
        g.n,
        g.p,
        g.q,
        format::angle_list(&g.angles),
        g.s,
        format::num(g.theta_p)
    )
}

fn load_start(spec: Option<&str>, n: usize, seed: u64, norm: f64) -> Result<Vector> {
    let x0 = match spec {
        None => random_start(n, norm, seed),
        Some(s) if Path::new(s).is_file() => {
            parse_vector(&read(Path::new(s))?).with_context(|| format!("{s}"))?
        }
        Some(s) => parse_vector(s).context("--x0")?,
    };
    if x0.len() != n {
        bail!("x0 has {} entries but the ambient dimension is {n}", x0.len());
    }
    Ok(x0)
}

fn solve(args: SolveArgs) -> Result<u8> {
    let (u, v) = (read_subspace(&args.u)?, read_subspace(&args.v)?);
    if u.ambient_dim() != v.ambient_dim() {
        bail!("ambient dimensions differ: {} vs {}", u.ambient_dim(), v.ambient_dim());
    }
    let geom = PairGeometry::new(u, v, DEFAULT_ZERO_TOL)?;
    let x0 = load_start(args.x0.as_deref(), geom.n(), args.seed, args.start_norm)?;
    let spec = args.method;
    let mu = spec.mu(&geom)?;

    let mut warnings = Vec::new();
    let predicted = match predict_rate(&spec, &geom) {
        Ok(p) => Some(p),
        Err(Error::FriedrichsUndefined) => {
            warnings.push("U ⊆ V: no Friedrichs angle, no rate prediction".to_owned());
            None
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &predicted {
        if let (None, Some((lo, hi)), Some(mu)) = (p.gamma, p.convergent_domain, p.mu) {
            warnings.push(format!("μ={} outside [{}, {})", format::num(mu), format::num(lo), format::num(hi)));
        }
    }

    let summary = match iterate(&spec, &geom, &x0, args.eps, args.max_iter) {
        Ok(trace) => {
            if let Some(path) = &args.trace {
                let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
                trace.write_csv(std::io::BufWriter::new(file))?;
            }
            SolveSummary {
                method: spec,
                mu,
                iterations: trace.iterations,
                terminated: trace.terminated,
                final_distance: trace.distances.last().copied(),
                diverged_at: None,
                predicted,
                fitted_rate: trace.fitted_rate(),
                geometry: geom.summary(),
                warnings,
            }
        }
        Err(Error::Divergence { index }) => {
            warnings.push(format!("iterate {index} is not finite"));
            SolveSummary {
                method: spec,
                mu,
                iterations: index,
                terminated: false,
                final_distance: None,
                diverged_at: Some(index),
                predicted,
                fitted_rate: None,
                geometry: geom.summary(),
                warnings,
            }
        }
        Err(e) => return Err(e.into()),
    };

    if args.json {
        print_json(&summary)?;
    } else {
        for w in &summary.warnings {
            eprintln!("warning: {w}");
        }
        emit(&render_solve(&summary))?;
    }
    Ok(if summary.terminated { EXIT_OK } else { EXIT_MAX_ITER })
}

fn render_solve(s: &SolveSummary) -> String {
    let opt = |x: Option<f64>| x.map_or("n/a".to_owned(), format::num);
    let status = if s.terminated {
        "solved"
    } else if s.diverged_at.is_some() {
        "diverged"
    } else {
        "not solved (max-iter reached)"
    };
    let mut out = format!("method: {}\n", s.method);
    if let Some(mu) = s.mu {
        out += &format!("mu: {}\n", format::num(mu));
    }
    out += &format!("status: {status}\niterations: {}\n", s.iterations);
    out += &format!("final distance: {}\n", s.final_distance.map_or("n/a".to_owned(), |d| format!("{d:e}")));
    out += &format!("predicted rate: {}\n", opt(s.predicted.as_ref().and_then(|p| p.gamma)));
    out += &format!("fitted rate: {}\n", opt(s.fitted_rate));
    out
}

fn bench(args: BenchArgs) -> Result<u8> {
    let grid: CategoryGrid = match &args.config {
        Some(path) => serde_json::from_str(&read(path)?).with_context(|| format!("{}", path.display()))?,
        None => CategoryGrid::default(),
    };
    let table = run_grid(&grid, &args.methods, args.seed)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        write_outputs(dir, &table, &grid)?;
    }
    if args.json {
        print_json(&table)?;
    } else {
        emit(&format::table(&table))?;
    }
    Ok(EXIT_OK)
}

fn create(dir: &Path, name: &str) -> Result<std::io::BufWriter<fs::File>> {
    let path = dir.join(name);
    let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(std::io::BufWriter::new(file))
}

fn write_outputs(dir: &Path, table: &BenchmarkTable, grid: &CategoryGrid) -> Result<()> {
    write_table_csv(table, create(dir, "table.csv")?)?;
    write_raw_csv(table, create(dir, "raw.csv")?)?;
    for m in &table.methods {
        write_plot_csv(table, m, create(dir, &plot_file_name(m))?)?;
    }
    let manifest = RunManifest { master_seed: table.master_seed, methods: table.methods.clone(), grid: grid.clone() };
    fs::write(dir.join("run.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn report(args: ReportArgs) -> Result<u8> {
    let raw = args.dir.join("raw.csv");
    let records = read_raw_csv(fs::File::open(&raw).with_context(|| format!("cannot open {}", raw.display()))?)
        .with_context(|| format!("{}", raw.display()))?;
    let manifest_path = args.dir.join("run.json");
    let (seed, methods) = if manifest_path.is_file() {
        let m: RunManifest = serde_json::from_str(&read(&manifest_path)?)
            .with_context(|| format!("{}", manifest_path.display()))?;
        (m.master_seed, m.methods)
    } else {
        let mut methods: Vec<MethodSpec> = Vec::new();
        for r in &records {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
        }
        (0, methods)
    };
    let table = BenchmarkTable::from_records(seed, methods, records);
    if args.json {
        print_json(&table)?;
    } else {
        emit(&format::table(&table))?;
    }
    Ok(EXIT_OK)
}
