//! `young`: sharp constants, inequality checks, transport tables and
//! extremizer scans from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when any fails, 2 on usage or
//! parse errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use young_core::constants::{constant_sweep, linspace, SharpConstants};
use young_core::exponents::parse_exponent;
use young_core::extremizer::{equality_diagnostic, gaussian_pair, summarize_scan};
use young_core::format::load;
use young_core::inequality::{mass_matched_gaussian, CheckConfig, VerificationReport};
use young_core::{
    fit_gaussian, monotone_map, random_density, stationarity_scan, verify_sharp_form, verify_transport_bound, Grid,
    GridFunction, Perturbation, ScanConfig, YoungTriple,
};

#[derive(Parser)]
#[command(name = "young", version, about = "Sharp Young inequality toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print r, regime, rotation and sharp constants of a triple.
    Constants(ConstantsArgs),
    /// Check the rotated-form inequality or the transport lemma.
    Verify(VerifyArgs),
    /// Dump a monotone transport map as `t,u,uprime,residual`.
    Transport(TransportArgs),
    /// Perturbation scans around the Gaussian pair, Gaussian fits.
    Extremize(ExtremizeArgs),
    /// Tabulate `r, K, young_constant` over a (p, q) range.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TripleArgs {
    /// Exponent p, decimal or fraction such as 4/3.
    #[arg(long, value_parser = exponent)]
    p: f64,
    #[arg(long, value_parser = exponent)]
    q: f64,
    /// Optional r; must satisfy 1/p + 1/q = 1 + 1/r.
    #[arg(long, value_parser = exponent)]
    r: Option<f64>,
}

impl TripleArgs {
    fn triple(&self) -> young_core::Result<YoungTriple> {
        match self.r {
            Some(r) => YoungTriple::with_r(self.p, self.q, r),
            None => YoungTriple::new(self.p, self.q),
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Per-axis count of the 2D quadrature grid.
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Half width of the 1D sampling window.
    #[arg(long, default_value_t = 8.0)]
    window: f64,
    /// Samples of each 1D function.
    #[arg(long, default_value_t = 2048)]
    samples: usize,
}

impl GridArgs {
    fn grid(&self) -> young_core::Result<Grid> {
        Grid::symmetric(self.window, self.samples)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    triple: TripleArgs,
    /// Dimension N of the Young constant.
    #[arg(long, default_value_t = 1)]
    dim: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[group(id = "input", required = true, multiple = false)]
struct InputMode {
    /// The unit-mass Gaussian pair with rates (p, q).
    #[arg(long, group = "input")]
    gaussian: bool,
    /// Seeded random density pairs.
    #[arg(long, group = "input")]
    random: bool,
    /// First function from a CSV or JSON file (requires --g).
    #[arg(long, group = "input", requires = "g")]
    f: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    triple: TripleArgs,
    #[command(flatten)]
    mode: InputMode,
    /// Second function file.
    #[arg(long, requires = "f")]
    g: Option<PathBuf>,
    /// Check the transport lemma against mass-matched Gaussians.
    #[arg(long)]
    transport_bound: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random pairs.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0.4)]
    smoothness: f64,
    #[arg(long, default_value_t = young_core::inequality::DEFAULT_TOLERANCE)]
    tol: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TransportArgs {
    /// Source density file; a seeded random density otherwise.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.4)]
    smoothness: f64,
    /// Rate of the mass-matched Gaussian target.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Allowed pushforward residual.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    None,
    Translation,
    Dilation,
    Quartic,
    Hermite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    F,
    G,
}

#[derive(Args)]
struct ExtremizeArgs {
    #[command(flatten)]
    triple: TripleArgs,
    #[arg(long, value_enum, default_value_t = Direction::Dilation)]
    direction: Direction,
    /// Hermite order for `--direction hermite`.
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Function perturbed by the profiled directions.
    #[arg(long, value_enum, default_value_t = Side::F)]
    on: Side,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    /// Largest |epsilon| of the scan.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Fit a Gaussian to this function file instead of scanning.
    #[arg(long, conflicts_with_all = ["f", "g"])]
    fit: Option<PathBuf>,
    /// Equality diagnostic of the pair (--f, --g).
    #[arg(long, requires = "g")]
    f: Option<PathBuf>,
    #[arg(long, requires = "f")]
    g: Option<PathBuf>,
    #[arg(long, default_value_t = young_core::inequality::DEFAULT_TOLERANCE)]
    tol: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// `lo:hi:steps` or a single value.
    #[arg(long, value_parser = range)]
    p: Range,
    #[arg(long, value_parser = range)]
    q: Range,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

fn exponent(text: &str) -> Result<f64, String> {
    parse_exponent(text).map_err(|e| e.to_string())
}

#[derive(Clone)]
struct Range(Vec<f64>);

fn range(text: &str) -> Result<Range, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(Range(vec![exponent(v)?])),
        [lo, hi, steps] => {
            let steps: usize = steps.parse().map_err(|_| format!("bad step count in {text:?}"))?;
            if steps == 0 {
                return Err("step count must be positive".into());
            }
            Ok(Range(linspace(exponent(lo)?, exponent(hi)?, steps)))
        }
        _ => Err(format!("expected lo:hi:steps or a value, got {text:?}")),
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<young_core::Error> for Failure {
    fn from(e: young_core::Error) -> Self {
        Failure::Usage(e.into())
    }
}

type Run = Result<(), Failure>;

fn emit(output: &OutputArgs, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn constants(args: &ConstantsArgs) -> Run {
    let t = args.triple.triple()?;
    let sc = SharpConstants::new(&t, args.dim)?;
    let rot = t.rotation().ok();
    let text = match args.format {
        Format::Json => {
            let v = json!({
                "p": t.p(), "q": t.q(), "r": t.r(), "regime": t.regime(),
                "c": rot.map(|r| r.c), "s": rot.map(|r| r.s),
                "c_p": sc.c_p, "c_q": sc.c_q, "c_r": sc.c_r, "k": sc.k,
                "young_constant": sc.young_nd, "dimension": sc.dimension,
            });
            format!("{v}\n")
        }
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            format!(
                "p,q,r,regime,c,s,c_p,c_q,c_r,K,young_constant,dimension\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
                t.p(),
                t.q(),
                t.r(),
                t.regime(),
                opt(rot.map(|r| r.c)),
                opt(rot.map(|r| r.s)),
                sc.c_p,
                sc.c_q,
                sc.c_r,
                sc.k,
                sc.young_nd,
                sc.dimension
            )
        }
    };
    emit(&args.output, &text)?;
    Ok(())
}

struct Check {
    label: Value,
    report: VerificationReport,
    error: Option<String>,
}

fn verify(args: &VerifyArgs) -> Run {
    let t = args.triple.triple()?;
    t.require_strict()?;
    let cfg = CheckConfig {
        n: args.grid.n,
        tolerance: args.tol,
    };
    let kind = if args.transport_bound {
        "transport_bound"
    } else {
        "sharp_form"
    };
    let run = |f: &GridFunction, g: &GridFunction| -> young_core::Result<VerificationReport> {
        if args.transport_bound {
            let big_f = mass_matched_gaussian(f, t.p())?;
            let big_g = mass_matched_gaussian(g, t.q())?;
            verify_transport_bound(f, g, &big_f, &big_g, &t, &cfg)
        } else {
            verify_sharp_form(f, g, &t, &cfg)
        }
    };
    let check = |label: Value, pair: young_core::Result<(GridFunction, GridFunction)>| match pair
        .and_then(|(f, g)| run(&f, &g))
    {
        Ok(report) => Check {
            label,
            report,
            error: None,
        },
        Err(e) => Check {
            label,
            report: VerificationReport::degenerate(t.regime(), cfg.tolerance, cfg.n),
            error: Some(e.to_string()),
        },
    };

    let mut checks = Vec::new();
    if args.mode.gaussian {
        checks.push(check(
            json!({"input": "gaussian"}),
            gaussian_pair(&t, args.grid.samples),
        ));
    } else if args.mode.random {
        let grid = args.grid.grid()?;
        for i in 0..args.count {
            let (sf, sg) = (args.seed + 2 * i, args.seed + 2 * i + 1);
            let pair = random_density(sf, &grid, args.smoothness)
                .and_then(|f| Ok((f, random_density(sg, &grid, args.smoothness)?)));
            checks.push(check(json!({"input": "random", "seed_f": sf, "seed_g": sg}), pair));
        }
    } else {
        let (fp, gp) = (args.mode.f.as_ref().expect("group"), args.g.as_ref().expect("requires"));
        let pair = load(fp).and_then(|f| Ok((f, load(gp)?)));
        checks.push(check(
            json!({"input": "files", "f": fp.display().to_string(), "g": gp.display().to_string()}),
            pair,
        ));
    }

    let mut text = String::new();
    if args.format == Format::Csv {
        text.push_str("check,kind,lhs,rhs,ratio,regime,tolerance,status,n\n");
    }
    for (i, c) in checks.iter().enumerate() {
        match args.format {
            Format::Json => {
                let mut v = json!({"check": i, "kind": kind});
                let obj = v.as_object_mut().expect("object");
                obj.extend(c.label.as_object().expect("object").clone());
                let report = serde_json::to_value(c.report).context("serializing report")?;
                obj.extend(report.as_object().expect("object").clone());
                if let Some(e) = &c.error {
                    obj.insert("error".into(), json!(e));
                }
                text.push_str(&format!("{v}\n"));
            }
            Format::Csv => {
                let r = &c.report;
                text.push_str(&format!(
                    "{i},{kind},{},{},{},{},{},{:?},{}\n",
                    r.lhs, r.rhs, r.ratio, r.regime, r.tolerance, r.status, r.grid.n
                ));
            }
        }
    }
    emit(&args.output, &text)?;
    if checks.iter().all(|c| c.report.passed()) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn transport(args: &TransportArgs) -> Run {
    let source = match &args.source {
        Some(path) => load(path)?,
        None => random_density(args.seed, &args.grid.grid()?, args.smoothness)?,
    };
    let target = mass_matched_gaussian(&source, args.rate)?;
    let map = monotone_map(&source, &target)?;
    let text = match args.format {
        Format::Csv => map.to_csv(),
        Format::Json => {
            let v = json!({
                "residual": map.residual,
                "window": map.resolved_window(),
                "rows": map.rows(),
            });
            format!("{v}\n")
        }
    };
    emit(&args.output, &text)?;
    if map.residual <= args.tol {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn extremize(args: &ExtremizeArgs) -> Run {
    if let Some(path) = &args.fit {
        let fit = fit_gaussian(&load(path)?)?;
        emit(
            &args.output,
            &format!("{}\n", serde_json::to_string(&fit).context("serializing fit")?),
        )?;
        return Ok(());
    }
    let t = args.triple.triple()?;
    if let (Some(fp), Some(gp)) = (&args.f, &args.g) {
        let diag = equality_diagnostic(&load(fp)?, &load(gp)?, &t)?;
        emit(
            &args.output,
            &format!("{}\n", serde_json::to_string(&diag).context("serializing diagnostic")?),
        )?;
        return Ok(());
    }

    let grid = young_core::inequality::gaussian_pair_grid(&t, args.grid.samples)?;
    let on_f = args.on == Side::F;
    let direction = match args.direction {
        Direction::None => Perturbation::none(),
        Direction::Translation => Perturbation::translation(&t, &grid),
        Direction::Dilation => Perturbation::dilation(&t, &grid),
        Direction::Quartic => Perturbation::quartic_bump(&t, &grid),
        Direction::Hermite => Perturbation::hermite(args.order, &t, &grid, on_f),
    };
    let cfg = ScanConfig {
        steps: args.steps,
        eps_max: args.eps,
        grid_n: args.grid.samples,
        check: CheckConfig {
            n: args.grid.n,
            tolerance: args.tol,
        },
    };
    let scan = stationarity_scan(&t, &direction, &cfg)?;
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("epsilon,ratio\n");
            for pt in &scan {
                s.push_str(&format!("{},{}\n", pt.epsilon, pt.ratio));
            }
            s
        }
        Format::Json => format!("{}\n", json!({"points": scan, "summary": summarize_scan(&scan)})),
    };
    emit(&args.output, &text)?;
    Ok(())
}

fn sweep(args: &SweepArgs) -> Run {
    let rows = constant_sweep(&args.p.0, &args.q.0);
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("p,q,r,K,young_constant\n");
            for row in &rows {
                match row.values {
                    Some(v) => s.push_str(&format!("{},{},{},{},{}\n", row.p, row.q, v.r, v.k, v.young_constant)),
                    None => s.push_str(&format!("{},{},invalid,invalid,invalid\n", row.p, row.q)),
                }
            }
            s
        }
        Format::Json => {
            let mut s = String::new();
            for row in &rows {
                s.push_str(&format!("{}\n", serde_json::to_string(row).context("serializing row")?));
            }
            s
        }
    };
    emit(&args.output, &text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Constants(a) => constants(a),
        Command::Verify(a) => verify(a),
        Command::Transport(a) => transport(a),
        Command::Extremize(a) => extremize(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
