use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use copula_risk::{compute_measure, method_for, Alpha, Measure, Method, SolverSettings, Target};
use copula_risk_cli::format::{f17, opt_f17, write_csv, write_json, CsvRow};
use copula_risk_cli::tables::{build_figure, build_table, TableSpec, PAPER_ALPHA, PAPER_THETAS, TABLES};
use copula_risk_cli::verify::{run_verify, VerifyConfig, DEFAULT_ALPHAS, DEFAULT_MC_N, DEFAULT_SEED, DEFAULT_THETAS};
use copula_risk_cli::{Dist, PortfolioSpec};

#[derive(Parser)]
#[command(
    name = "copula-risk",
    version,
    about = "VaR, CTE and MoT for the min, max and sum of two FGM-dependent risks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Absolute tolerance of the root solver.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one measure of one target.
    Measure(MeasureArgs),
    /// Reproduce a table of the paper (all fifteen when no id is given).
    Table(TableArgs),
    /// Emit the (θ, VaR, CTE) series behind a figure.
    Figure(FigureArgs),
    /// Check analytic measures against Monte Carlo estimates.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Exp,
    Pareto,
}

impl From<DistArg> for Dist {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Exp => Dist::Exp,
            DistArg::Pareto => Dist::Pareto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    X1,
    X2,
    Min,
    Max,
    Sum,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::X1 => Target::X1,
            TargetArg::X2 => Target::X2,
            TargetArg::Min => Target::Min,
            TargetArg::Max => Target::Max,
            TargetArg::Sum => Target::Sum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Var,
    Cte,
    Mot,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Var => Measure::Var,
            MeasureArg::Cte => Measure::Cte,
            MeasureArg::Mot => Measure::Mot,
        }
    }
}

#[derive(Args)]
struct PortfolioArgs {
    #[arg(long, value_enum, default_value_t = DistArg::Exp)]
    dist: DistArg,
    #[arg(long, default_value_t = PortfolioSpec::DEFAULT_RATES.0)]
    l1: f64,
    #[arg(long, default_value_t = PortfolioSpec::DEFAULT_RATES.1)]
    l2: f64,
    #[arg(long, default_value_t = PortfolioSpec::DEFAULT_PARETO.0)]
    x0: f64,
    #[arg(long, default_value_t = PortfolioSpec::DEFAULT_PARETO.1)]
    g1: f64,
    #[arg(long, default_value_t = PortfolioSpec::DEFAULT_PARETO.2)]
    g2: f64,
}

impl PortfolioArgs {
    fn spec(&self, theta: f64) -> PortfolioSpec {
        PortfolioSpec {
            dist: self.dist.into(),
            l1: self.l1,
            l2: self.l2,
            x0: self.x0,
            g1: self.g1,
            g2: self.g2,
            theta,
        }
    }
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    portfolio: PortfolioArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = PAPER_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = TargetArg::Min)]
    target: TargetArg,
    #[arg(long, value_enum, default_value_t = MeasureArg::Var)]
    measure: MeasureArg,
}

#[derive(Args)]
struct TableArgs {
    /// Table number, 1 to 15.
    id: Option<u8>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = PAPER_THETAS)]
    theta_grid: Vec<f64>,
    #[arg(long, default_value_t = PAPER_ALPHA)]
    alpha: f64,
    /// Replace the paper's parameters with the portfolio flags.
    #[arg(long)]
    custom: bool,
    #[command(flatten)]
    portfolio: PortfolioArgs,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure number, 1 to 3.
    id: u8,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = PAPER_THETAS)]
    theta_grid: Vec<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, env = "COPULA_RISK_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MC_N)]
    mc_n: usize,
    /// Dependence parameters to check.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = DEFAULT_THETAS)]
    theta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS)]
    alpha: Vec<f64>,
    /// Restrict to one distribution family.
    #[arg(long, value_enum)]
    dist: Option<DistArg>,
}

#[derive(Serialize)]
struct MeasureRecord {
    dist: Dist,
    #[serde(skip_serializing_if = "Option::is_none")]
    l1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g2: Option<f64>,
    theta: f64,
    alpha: f64,
    target: Target,
    measure: Measure,
    value: f64,
    method: Method,
    tolerance: f64,
}

impl CsvRow for MeasureRecord {
    const HEADER: &'static [&'static str] = &[
        "dist",
        "l1",
        "l2",
        "x0",
        "g1",
        "g2",
        "theta",
        "alpha",
        "target",
        "measure",
        "value",
        "method",
        "tolerance",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.dist.as_str().to_string(),
            opt_f17(self.l1),
            opt_f17(self.l2),
            opt_f17(self.x0),
            opt_f17(self.g1),
            opt_f17(self.g2),
            f17(self.theta),
            f17(self.alpha),
            self.target.to_string(),
            self.measure.to_string(),
            f17(self.value),
            self.method.as_str().to_string(),
            f17(self.tolerance),
        ]
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

enum Failure {
    Parameter(copula_risk::Error),
    Io(io::Error),
}

impl From<copula_risk::Error> for Failure {
    fn from(e: copula_risk::Error) -> Self {
        Failure::Parameter(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit<R: CsvRow + Serialize>(format: Format, out: &mut dyn Write, rows: &[R]) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(out, rows),
        Format::Json => write_json(out, rows),
    }
}

fn measure(args: &MeasureArgs, settings: &SolverSettings, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = args.portfolio.spec(args.theta);
    let p = spec.build()?;
    let alpha = Alpha::new(args.alpha)?;
    let (target, measure) = (args.target.into(), args.measure.into());
    let value = compute_measure(&p, target, measure, alpha, settings)?;
    let method = method_for(&p, target);
    let exp = spec.dist == Dist::Exp;
    let only = |on: bool, v: f64| on.then_some(v);
    let record = MeasureRecord {
        dist: spec.dist,
        l1: only(exp, spec.l1),
        l2: only(exp, spec.l2),
        x0: only(!exp, spec.x0),
        g1: only(!exp, spec.g1),
        g2: only(!exp, spec.g2),
        theta: spec.theta,
        alpha: args.alpha,
        target,
        measure,
        value,
        method,
        tolerance: if method == Method::ClosedForm {
            0.0
        } else {
            settings.abs_tol
        },
    };
    match format {
        Format::Csv => write_csv(out, &[record])?,
        Format::Json => write_json(out, &record)?,
    }
    Ok(())
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<ExitCode, Failure> {
    let mut settings = SolverSettings::default();
    if let Some(tol) = cli.tol {
        settings = settings.with_abs_tol(tol);
    }
    settings.validate()?;

    match &cli.command {
        Command::Measure(args) => measure(args, &settings, cli.format, out)?,
        Command::Table(args) => {
            let ids: Vec<u8> = match args.id {
                Some(id) => vec![id],
                None => TABLES.iter().map(|t| t.id).collect(),
            };
            let mut rows = Vec::new();
            for table_id in ids {
                let spec = TableSpec {
                    table_id,
                    theta_grid: args.theta_grid.clone(),
                    alpha: Alpha::new(args.alpha)?,
                    portfolio: args.custom.then(|| args.portfolio.spec(0.0)),
                };
                rows.extend(build_table(&spec, &settings)?);
            }
            emit(cli.format, out, &rows)?;
        }
        Command::Figure(args) => {
            let points = build_figure(args.id, &args.theta_grid, &settings)?;
            emit(cli.format, out, &points)?;
        }
        Command::Verify(args) => {
            let mut cfg = VerifyConfig {
                seed: args.seed,
                mc_n: args.mc_n,
                thetas: args.theta.clone(),
                alphas: args.alpha.clone(),
                settings,
                ..VerifyConfig::default()
            };
            if let Some(d) = args.dist {
                let d: Dist = d.into();
                cfg.portfolios.retain(|p| p.dist == d);
            }
            let report = run_verify(&cfg)?;
            match cli.format {
                Format::Csv => write_csv(out, &report.cells)?,
                Format::Json => write_json(out, &report)?,
            }
            out.flush()?;
            if !report.all_passed() {
                eprintln!(
                    "verify: {} passed, {} failed, {} errors",
                    report.passed, report.failed, report.errors
                );
                return Ok(ExitCode::from(1));
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.out {
        Some(path) => File::create(path)
            .map_err(Failure::Io)
            .and_then(|f| run(&cli, &mut BufWriter::new(f))),
        None => run(&cli, &mut io::stdout().lock()),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let record = match failure {
                Failure::Parameter(e) => ErrorRecord {
                    error: e.kind(),
                    message: e.to_string(),
                },
                Failure::Io(e) => ErrorRecord {
                    error: "io",
                    message: e.to_string(),
                },
            };
            eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
            ExitCode::from(2)
        }
    }
}
