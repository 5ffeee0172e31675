//! `polynet` command-line interface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 I/O or malformed input, 4 numerical failure.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polynet::analysis::{estimate_order, uniform_grid, verify_equivalence, DEFAULT_GRID_SIZE};
use polynet::oracle::{fit_kernel_weights, KernelKind, Spacing};
use polynet::{load_model, Error, KnotGrid, Method, MethodSpec, PiecewiseOracle, Target, TargetSamples};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) | Error::Usage(m) => CliError::Usage(m),
            Error::Format { .. } => CliError::Io(e.to_string()),
            Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "polynet",
    version,
    about = "Construct MLPs that realize piecewise polynomial approximants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a network and write its model document.
    Build {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved model; writes `x,y1..yq` CSV to stdout.
    Eval {
        model: PathBuf,
        /// Number of uniform points on [0, 1], or a comma-separated list of x values.
        #[arg(long, default_value = "11")]
        grid: String,
    },
    /// Build a network and its oracle and compare them on a uniform grid.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Absolute tolerance; defaults to 1e-9 * max(1, max|f|).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
        /// Compare against a deliberately mismatched oracle.
        #[arg(long, hide = true)]
        mismatch_oracle: bool,
    },
    /// Sweep N and estimate the convergence order against a built-in target.
    Convergence {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value_t = polynet::DEFAULT_INFLECTION_SLOPE)]
        slope: f64,
        #[arg(long, value_parser = parse_target)]
        target: Target,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
        /// CSV output; the JSON summary goes next to it with a `.json` extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Least-squares fit of kernel weights to dense `x,y` samples.
    FitKernel {
        #[arg(long, value_enum)]
        kernel: KernelArg,
        #[arg(long, default_value_t = polynet::DEFAULT_INFLECTION_SLOPE)]
        slope: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// List methods and built-in targets.
    Info,
}

#[derive(Args)]
struct Source {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Number of subintervals; inferred from --csv when omitted there.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_target, conflicts_with = "csv", required_unless_present = "csv")]
    target: Option<Target>,
    /// Knot samples as `x,f1,...,fq` rows with a header.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = polynet::DEFAULT_INFLECTION_SLOPE)]
    slope: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Box,
    Triangle,
    Bump,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Source {
    fn resolve(&self) -> Result<(MethodSpec, TargetSamples), CliError> {
        let spec = MethodSpec::with_slope(self.method, self.slope)?;
        let samples = match (&self.target, &self.csv) {
            (Some(target), _) => {
                let n = self
                    .n
                    .ok_or_else(|| CliError::Usage("--n is required with --target".into()))?;
                spec.check_n(n)?;
                TargetSamples::from_fn(KnotGrid::new(n)?, |x| target.eval(x))
            }
            (None, Some(path)) => {
                let samples = io::read_knot_samples(path, self.n)?;
                spec.check_n(samples.grid().n())?;
                samples
            }
            (None, None) => return Err(CliError::Usage("one of --target or --csv is required".into())),
        };
        Ok((spec, samples))
    }
}

fn cmd_build(source: &Source, out: &Path) -> Result<(), CliError> {
    let (spec, samples) = source.resolve()?;
    let net = spec.build(&samples)?;
    io::write_file(out, &net.to_json())?;
    println!("method: {}", spec.method);
    println!("n: {}", samples.grid().n());
    println!("neurons: {}", net.neuron_count());
    println!("outputs: {}", net.output_dim());
    if matches!(spec.method, Method::Cubic | Method::CubicSpaced) {
        println!("inflection slope: {}", spec.slope);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_eval_grid(grid: &str) -> Result<Vec<f64>, CliError> {
    if let Ok(count) = grid.trim().parse::<usize>() {
        return match count {
            0 => Err(CliError::Usage("evaluation grid is empty".into())),
            1 => Ok(vec![0.0]),
            m => Ok(uniform_grid(m)),
        };
    }
    grid.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("invalid x value `{s}`")))
        })
        .collect()
}

fn cmd_eval(model: &Path, grid: &str) -> Result<(), CliError> {
    let xs = parse_eval_grid(grid)?;
    let net = load_model(&io::read_file(model)?)?;
    let rows = net.forward_grid(&xs)?;
    let mut out = String::from("x");
    for k in 1..=net.output_dim() {
        out.push_str(&format!(",y{k}"));
    }
    out.push('\n');
    for (x, row) in xs.iter().zip(rows) {
        out.push_str(&x.to_string());
        for y in row {
            out.push(',');
            out.push_str(&y.to_string());
        }
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn cmd_verify(source: &Source, tol: Option<f64>, grid: usize, mismatch: bool) -> Result<bool, CliError> {
    let (spec, samples) = source.resolve()?;
    let net = spec.build(&samples)?;
    let oracle = if mismatch {
        let kernel = match spec.method {
            Method::Constant => KernelKind::Triangle,
            _ => KernelKind::Box,
        };
        PiecewiseOracle::new(samples.grid(), kernel, samples.rows().to_vec(), Spacing::EveryKnot)?
    } else {
        PiecewiseOracle::for_method(&spec, &samples)?
    };
    let tol = tol.unwrap_or(1e-9 * samples.max_abs().max(1.0));
    let report = verify_equivalence(&net, &oracle, grid, tol)?;
    println!("method: {}", spec.method);
    println!("n: {}", samples.grid().n());
    println!("oracle kernel: {}", oracle.kernel().name());
    println!(
        "max deviation: {:e} at x = {} (output {})",
        report.max_deviation,
        report.worst_x,
        report.worst_output + 1
    );
    println!("tolerance: {:e}", report.tol);
    println!("{}", if report.passed { "PASS" } else { "FAIL" });
    Ok(report.passed)
}

fn cmd_convergence(
    method: Method,
    slope: f64,
    target: Target,
    n_list: &[usize],
    grid: usize,
    out: &Path,
) -> Result<(), CliError> {
    let spec = MethodSpec::with_slope(method, slope)?;
    let report = estimate_order(&spec, target, n_list, grid)?;
    io::write_file(out, &report.to_csv())?;
    let summary = out.with_extension("json");
    io::write_file(&summary, &report.to_json_summary())?;
    match (report.fitted_order, report.r_squared) {
        (Some(order), Some(r2)) => println!(
            "fitted order: {order:.4} (r^2 = {r2:.5}; nominal O(h^{}))",
            report.nominal_order
        ),
        _ => println!("fitted order: not applicable (target reproduced exactly)"),
    }
    println!("wrote {} and {}", out.display(), summary.display());
    Ok(())
}

fn cmd_fit_kernel(kernel: KernelArg, slope: f64, n: usize, csv: &Path, out: &Path) -> Result<(), CliError> {
    let kernel = match kernel {
        KernelArg::Box => KernelKind::Box,
        KernelArg::Triangle => KernelKind::Triangle,
        KernelArg::Bump => KernelKind::cubic_bump(slope)?,
    };
    let grid = KnotGrid::new(n)?;
    let samples = io::read_dense_samples(csv)?;
    let fit = fit_kernel_weights(&samples, kernel, grid)?;
    let doc = serde_json::json!({
        "kernel": kernel.name(),
        "n": n,
        "omega": fit.omega,
        "rms_residual": fit.rms_residual,
    });
    io::write_file(out, &serde_json::to_string_pretty(&doc).expect("fit serializes"))?;
    println!("rms residual: {:e}", fit.rms_residual);
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_info() {
    eprintln!("polynet {}", env!("CARGO_PKG_VERSION"));
    println!("methods:");
    let activation = |m: Method| match m {
        Method::Constant => "step",
        Method::LinearRelu => "relu",
        Method::LinearRamp => "ramp",
        Method::Cubic | Method::CubicSpaced => "cubic",
    };
    let count = |m: Method| match m {
        Method::Constant => "N",
        Method::LinearRelu => "4(N+1)",
        Method::LinearRamp | Method::Cubic => "2(N+1)",
        Method::CubicSpaced => "N+2 (N even)",
    };
    for m in Method::ALL {
        println!(
            "  {:<13} activation {:<5} neurons {}",
            m.name(),
            activation(m),
            count(m)
        );
    }
    println!("targets:");
    for t in Target::ALL {
        println!("  {:<7} f(x) = {}", t.name(), t.formula());
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Build { source, out } => cmd_build(&source, &out)?,
        Command::Eval { model, grid } => cmd_eval(&model, &grid)?,
        Command::Verify {
            source,
            tol,
            grid,
            mismatch_oracle,
        } => {
            if !cmd_verify(&source, tol, grid, mismatch_oracle)? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Convergence {
            method,
            slope,
            target,
            n_list,
            grid,
            out,
        } => cmd_convergence(method, slope, target, &n_list, grid, &out)?,
        Command::FitKernel {
            kernel,
            slope,
            n,
            csv,
            out,
        } => cmd_fit_kernel(kernel, slope, n, &csv, &out)?,
        Command::Info => cmd_info(),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
