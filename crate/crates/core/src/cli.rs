//! Batch command line front end.
//!
//! Exit codes: 0 when every check of the command passes, 1 on a check
//! failure, 2 on a configuration or input error, 3 when a solver fails to
//! converge or breaks an internal invariant.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, Problem};
use crate::dirichlet::{perron_solve, SolveReport};
use crate::error::{Error, Result};
use crate::grid::{boundary_restriction, GridDomain, GridFunction};
use crate::io::{read_csv, write_csv};
use crate::suite::run_cone_suite;
use crate::torus::{torus_solve, TorusProblem};
use crate::viscosity::{
    holder_exponent, holder_modulus, least_squares_slope, verify_subsolution, verify_supersolution,
    VerificationReport, Verdict,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mhessian", version, about = "Complex m-Hessian equation solver and verifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Problem file in `key = value` format.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for coloured or simultaneous sweeps.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides the `seed` key.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the problem, or run a convergence study when `levels` is set.
    Solve(RunArgs),
    /// Check a candidate grid function as sub- and supersolution.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Candidate values as written by `solve`.
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Estimate Hölder moduli of a candidate for the configured exponents.
    Holder {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Randomized property suite over the cone kernel.
    Cones {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Fix the order; drawn per trial when absent.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Reproducibility record written into every output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub tool_version: String,
}

impl RunManifest {
    pub fn write(&self) -> Result<()> {
        let mut f = File::create(self.output_dir.join("manifest.txt"))?;
        writeln!(f, "command = {}", self.command)?;
        if let Some(p) = &self.config_path {
            writeln!(f, "config = {}", p.display())?;
        }
        writeln!(f, "output_dir = {}", self.output_dir.display())?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "tool_version = {}", self.tool_version)?;
        Ok(())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged(_) | Error::Numerical { .. } | Error::Internal(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve(run) => cmd_solve(&run),
        Command::Verify { run, candidate } => cmd_verify(&run, &candidate),
        Command::Holder { run, candidate } => cmd_holder(&run, &candidate),
        Command::Cones {
            n,
            m,
            trials,
            seed,
            out,
        } => cmd_cones(n, m, trials, seed, out.as_deref()),
    }
}

fn load_problem(run: &RunArgs) -> Result<Problem> {
    let cfg = Config::load(&run.config)?;
    let mut problem = Problem::from_config(&cfg)?;
    if let Some(t) = run.threads {
        problem.solve.threads = t;
    }
    if let Some(s) = run.seed {
        problem.solve.seed = s;
    }
    Ok(problem)
}

fn prepare_out(run: &RunArgs, command: &str, problem: &Problem) -> Result<()> {
    fs::create_dir_all(&run.out)?;
    RunManifest {
        command: command.to_string(),
        config_path: Some(run.config.clone()),
        output_dir: run.out.clone(),
        seed: problem.solve.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
    .write()
}

fn solve_at(problem: &Problem, nodes: usize) -> Result<SolveReport> {
    let d = problem.domain(nodes)?;
    if problem.is_periodic() {
        let tp = TorusProblem {
            n: problem.n,
            m: problem.m,
            period: match problem.topology {
                crate::config::TopologySpec::Torus { period } => period,
                _ => unreachable!(),
            },
            nodes,
            rhs: problem.rhs.clone(),
        };
        torus_solve(&tp, &problem.solve)
    } else {
        let g = problem.boundary.clone().expect("bounded problems carry boundary data");
        let data = boundary_restriction(|x| g(x), &d, problem.sampling)?;
        perron_solve(&data, &problem.rhs, &problem.solve)
    }
}

fn sup_error(u: &GridFunction, exact: &dyn Fn(&[f64]) -> f64) -> f64 {
    let d = u.domain();
    d.interior()
        .iter()
        .map(|&p| (u.get(p) - exact(&d.coords(p))).abs())
        .fold(0.0, f64::max)
}

fn write_residuals(path: &Path, report: &SolveReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["sweep", "delta"])?;
    for (i, d) in report.residual_history.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{d:e}")])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_solve(run: &RunArgs) -> Result<i32> {
    let problem = load_problem(run)?;
    prepare_out(run, "solve", &problem)?;
    let levels = if problem.levels.is_empty() {
        vec![problem.nodes]
    } else {
        problem.levels.clone()
    };
    let mut summary = BufWriter::new(File::create(run.out.join("summary.txt"))?);
    writeln!(summary, "# mhessian solve")?;
    writeln!(summary, "n = {}", problem.n)?;
    writeln!(summary, "m = {}", problem.m)?;
    writeln!(summary, "rhs = {}", problem.rhs.label())?;
    let mut ok = true;
    let mut table = Vec::new();
    let mut last = None;
    for &nodes in &levels {
        let report = match solve_at(&problem, nodes) {
            Ok(r) => r,
            Err(Error::NotConverged(r)) => {
                write_residuals(&run.out.join("residuals.csv"), &r)?;
                writeln!(summary, "[nodes = {nodes}]\n{r}")?;
                summary.flush()?;
                eprintln!("error: solver did not converge: {}", r.summary_line());
                return Ok(EXIT_NUMERICAL);
            }
            Err(e) => return Err(e),
        };
        writeln!(summary, "[nodes = {nodes}]")?;
        write!(summary, "{report}")?;
        let sub = verify_subsolution(&report.solution, problem.m, &problem.rhs, &problem.solve.verify)?;
        let sup = verify_supersolution(&report.solution, problem.m, &problem.rhs, &problem.solve.verify)?;
        for rep in [&sub, &sup] {
            writeln!(
                summary,
                "verify_{} = pass {} fail {} skipped {}",
                rep.kind,
                rep.count(Verdict::Pass),
                rep.count(Verdict::Fail),
                rep.count(Verdict::Skipped)
            )?;
        }
        ok &= sub.passed() && sup.passed();
        if let Some(exact) = &problem.exact {
            let err = sup_error(&report.solution, exact.value.as_ref());
            writeln!(summary, "sup_error = {err:e}")?;
            let h = report.solution.domain().h();
            table.push((nodes, h, err));
            if let Some(max) = problem.max_error {
                ok &= err <= max;
            }
        }
        last = Some((report, sub, sup));
    }
    let (report, sub, sup) = last.expect("at least one level");
    write_csv(&report.solution, File::create(run.out.join("solution.csv"))?)?;
    write_residuals(&run.out.join("residuals.csv"), &report)?;
    write_reports(&run.out.join("report.txt"), &[&sub, &sup])?;
    if table.len() >= 2 {
        let mut w = csv::Writer::from_path(run.out.join("convergence.csv"))?;
        w.write_record(["nodes", "h", "sup_error"])?;
        for (nodes, h, e) in &table {
            w.write_record([nodes.to_string(), format!("{h:e}"), format!("{e:e}")])?;
        }
        w.flush()?;
        let xs: Vec<f64> = table.iter().map(|t| t.1.ln()).collect();
        let ys: Vec<f64> = table.iter().map(|t| t.2.max(f64::MIN_POSITIVE).ln()).collect();
        let order = least_squares_slope(&xs, &ys);
        writeln!(summary, "observed_order = {order:.4}")?;
        if let Some(min) = problem.min_order {
            ok &= order >= min;
        }
    }
    writeln!(summary, "checks_passed = {ok}")?;
    summary.flush()?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn write_reports(path: &Path, reports: &[&VerificationReport]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in reports {
        r.write_text(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

fn load_candidate(problem: &Problem, path: &Path) -> Result<(Arc<GridDomain>, GridFunction)> {
    let d = problem.domain(problem.nodes)?;
    let u = read_csv(&d, File::open(path)?)?;
    Ok((d, u))
}

fn cmd_verify(run: &RunArgs, candidate: &Path) -> Result<i32> {
    let problem = load_problem(run)?;
    prepare_out(run, "verify", &problem)?;
    let (_, u) = load_candidate(&problem, candidate)?;
    let sub = verify_subsolution(&u, problem.m, &problem.rhs, &problem.solve.verify)?;
    let sup = verify_supersolution(&u, problem.m, &problem.rhs, &problem.solve.verify)?;
    write_reports(&run.out.join("report.txt"), &[&sub, &sup])?;
    let mut s = BufWriter::new(File::create(run.out.join("summary.txt"))?);
    for rep in [&sub, &sup] {
        writeln!(
            s,
            "{}: pass {} fail {} skipped {} worst_margin {:e}",
            rep.kind,
            rep.count(Verdict::Pass),
            rep.count(Verdict::Fail),
            rep.count(Verdict::Skipped),
            rep.worst_margin
        )?;
    }
    s.flush()?;
    Ok(if sub.passed() && sup.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_holder(run: &RunArgs, candidate: &Path) -> Result<i32> {
    let problem = load_problem(run)?;
    prepare_out(run, "holder", &problem)?;
    let (_, u) = load_candidate(&problem, candidate)?;
    let mut w = csv::Writer::from_path(run.out.join("holder.csv"))?;
    w.write_record(["gamma", "modulus"])?;
    for &g in &problem.holder_gammas {
        let m = holder_modulus(&u, g)?;
        w.write_record([format!("{g}"), format!("{m:e}")])?;
    }
    w.flush()?;
    let mut s = BufWriter::new(File::create(run.out.join("summary.txt"))?);
    match holder_exponent(&u, 16) {
        Ok(e) => writeln!(s, "estimated_exponent = {e:.4}")?,
        Err(e) => writeln!(s, "estimated_exponent = none ({e})")?,
    }
    s.flush()?;
    Ok(EXIT_OK)
}

fn cmd_cones(n: usize, m: Option<usize>, trials: usize, seed: u64, out: Option<&Path>) -> Result<i32> {
    if n == 0 || n > crate::oracle::MAX_MINOR_DIM {
        return Err(Error::Argument(format!(
            "--n must lie in 1..={}",
            crate::oracle::MAX_MINOR_DIM
        )));
    }
    if let Some(k) = m {
        if k == 0 || k > n {
            return Err(Error::Argument(format!("--m must lie in 1..={n}")));
        }
    }
    let report = run_cone_suite(n, m, trials, seed)?;
    print!("{report}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.txt"), report.to_string())?;
        RunManifest {
            command: "cones".into(),
            config_path: None,
            output_dir: dir.to_path_buf(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
        .write()?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
