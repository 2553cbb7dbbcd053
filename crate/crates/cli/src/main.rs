use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mpflow::cases::{builtin, CASES};
use mpflow::config::CaseConfig;
use mpflow::convergence::{convergence_report, exact_solution, ExactSolution, Reference};
use mpflow::driver::Simulation;
use mpflow::output::{diagnostics_csv, write_csv_1d, write_vtk_2d};
use mpflow::parabolic::ParabolicSolver;
use mpflow::{Error, Result};

/// Environment variable overriding the worker-thread count.
const THREADS_ENV: &str = "MPFLOW_THREADS";

#[derive(Parser)]
#[command(name = "mpflow", version, about = "Compressible multiphase flow with viscosity and heat conduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in case or a TOML configuration.
    Run(RunArgs),
    /// List the built-in cases.
    ListCases,
    /// Print a case as TOML so it can be edited and run with --config.
    ExportCase {
        #[arg(long)]
        case: String,
    },
    /// Sample the exact Riemann solution of a case with two-state initial data.
    Riemann {
        #[command(flatten)]
        source: CaseSource,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        tend: Option<f64>,
        /// Output CSV file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-refinement study of a 1D case.
    Converge {
        #[command(flatten)]
        source: CaseSource,
        /// Comma-separated cell counts.
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
        /// `oracle` (exact solution) or `finest`.
        #[arg(long, default_value = "oracle")]
        reference: Reference,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CaseSource {
    /// Built-in case name (see `list-cases`).
    #[arg(long)]
    case: Option<String>,
    /// Path to a TOML case description.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CaseSource {
    fn load(&self) -> Result<CaseConfig> {
        match (&self.case, &self.config) {
            (Some(name), _) => builtin(name),
            (None, Some(path)) => CaseConfig::load(path),
            (None, None) => Err(Error::Config("either --case or --config is required".into())),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: CaseSource,
    /// Cells along x (the y count keeps the cell aspect ratio).
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    tend: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    solver: Option<ParabolicSolver>,
    #[arg(long)]
    no_viscous: bool,
    #[arg(long)]
    no_relax: bool,
    #[arg(long)]
    no_conduct: bool,
    /// Extra snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
    /// Record diagnostics every N steps.
    #[arg(long)]
    diagnostics_every: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn apply_overrides(mut cfg: CaseConfig, a: &RunArgs) -> Result<CaseConfig> {
    if let Some(n) = a.cells {
        cfg = cfg.with_cells(n);
    }
    if let Some(t) = a.tend {
        cfg.end_time = t;
        cfg.output.snapshots.retain(|s| *s <= t);
    }
    if let Some(c) = a.cfl {
        cfg.solver.cfl = c;
    }
    if let Some(e) = a.epsilon {
        cfg.epsilon = e;
    }
    if let Some(s) = a.solver {
        cfg.solver.parabolic = s;
    }
    if a.no_viscous {
        cfg.physics.viscous = false;
    }
    if a.no_relax {
        cfg.physics.relax = false;
        cfg.physics.conduct = false;
    }
    if a.no_conduct {
        cfg.physics.conduct = false;
        cfg.physics.laser = None;
    }
    cfg.output.snapshots.extend(a.snapshots.iter().copied());
    if let Some(n) = a.diagnostics_every {
        cfg.output.diagnostics_every = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_snapshot(sim: &Simulation, dir: &Path, tag: &str) -> Result<PathBuf> {
    let w = sim.primitives()?;
    let mats = sim.materials();
    let base = format!("{}_{}", sim.cfg.name, tag);
    let path = if sim.grid.dim() == 1 {
        let p = dir.join(format!("{base}.csv"));
        write_csv_1d(&p, &sim.grid, &w, mats)?;
        p
    } else {
        let p = dir.join(format!("{base}.vtk"));
        write_vtk_2d(&p, &sim.grid, &w, mats, &format!("{} t={:e}", sim.cfg.name, sim.time))?;
        p
    };
    Ok(path)
}

fn run(a: &RunArgs) -> Result<()> {
    let cfg = apply_overrides(a.source.load()?, a)?;
    fs::create_dir_all(&a.out).map_err(|e| Error::Config(format!("cannot create {}: {e}", a.out.display())))?;
    let mut sim = Simulation::new(cfg)?;
    log::info!("running '{}' on {:?} cells to t = {:e}", sim.cfg.name, sim.cfg.domain.cells, sim.cfg.end_time);
    let out = a.out.clone();
    let mut index = 0usize;
    let result = sim.run(|s| {
        let path = write_snapshot(s, &out, &format!("{index:04}"))?;
        log::info!("step {:>6}  t = {:.6e}  -> {}", s.step, s.time, path.display());
        index += 1;
        Ok(())
    });
    let nphase = sim.cfg.nphase();
    if !sim.records.is_empty() {
        fs::write(a.out.join(format!("{}_diagnostics.csv", sim.cfg.name)), diagnostics_csv(&sim.records, nphase))?;
    }
    match result {
        Ok(summary) => {
            println!(
                "{}: {} steps to t = {:e} in {:.2} s",
                sim.cfg.name, summary.steps, summary.time, summary.wall_seconds
            );
            Ok(())
        }
        Err(e) => {
            // the simulation still holds the last accepted state
            match write_snapshot(&sim, &a.out, "failure") {
                Ok(p) => eprintln!("state at t = {:e} written to {}", sim.time, p.display()),
                Err(d) => eprintln!("could not dump the final state: {d}"),
            }
            Err(e)
        }
    }
}

fn riemann(cfg: CaseConfig, cells: Option<usize>, tend: Option<f64>, out: Option<&Path>) -> Result<()> {
    let mut cfg = cfg;
    if let Some(n) = cells {
        cfg = cfg.with_cells(n);
    }
    if let Some(t) = tend {
        cfg.end_time = t;
    }
    if cfg.dim() != 1 {
        return Err(Error::Config("the Riemann oracle needs a 1D case".into()));
    }
    cfg.physics.viscous = false;
    cfg.physics.relax = false;
    cfg.physics.conduct = false;
    cfg.physics.laser = None;
    let exact = exact_solution(&cfg)?.ok_or_else(|| Error::Config(format!("case '{}' does not have two-state initial data", cfg.name)))?;
    if !matches!(exact, ExactSolution::Riemann { .. }) {
        return Err(Error::Config(format!("case '{}' does not have two-state initial data", cfg.name)));
    }
    let grid = cfg.grid();
    let mut text = String::from("x,rho,u,p\n");
    for i in 0..grid.nx {
        let x = grid.cell_center(i, 0)[0];
        let [rho, u, p] = exact.at(x);
        text.push_str(&format!("{x:.16e},{rho:.16e},{u:.16e},{p:.16e}\n"));
    }
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn converge(cfg: CaseConfig, resolutions: &[usize], reference: Reference, out: Option<&Path>) -> Result<()> {
    let report = convergence_report(&cfg, resolutions, reference)?;
    print!("{}", report.summary());
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        fs::write(dir.join(format!("{}_convergence.csv", cfg.name)), report.to_csv())?;
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Run(a) => run(&a),
        Command::ListCases => {
            for (name, about) in CASES {
                println!("{name:<20} {about}");
            }
            Ok(())
        }
        Command::ExportCase { case } => {
            print!("{}", builtin(&case)?.to_toml()?);
            Ok(())
        }
        Command::Riemann { source, cells, tend, out } => riemann(source.load()?, cells, tend, out.as_deref()),
        Command::Converge {
            source,
            resolutions,
            reference,
            out,
        } => converge(source.load()?, &resolutions, reference, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
