use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use algprog::defpoly::{defining_polynomial, degree_bounds, ReduceConfig};
use algprog::error::Error;
use algprog::expr::{normalize, parse, parse_poly, RadicalExpr};
use algprog::isolation::{
    isolate, merge_components, DomainJson, GridConfig, IsolateConfig, IsolationCertificate, MergeConfig,
    SignCondition, Strategy,
};
use algprog::poly::{parse_rational, Point, Registry};
use algprog::program::{
    baseline_reformulate, emit_program, emit_result, reformulate, verify_reformulation, AlgebraicProgram, Format,
    ReformulateConfig,
};
use algprog::verify::{audit_degrees, verify_certificate, verify_defining, Report, VerifyConfig};

#[derive(Parser)]
#[command(name = "algprog", version, about = "Reformulate algebraic programs into polynomial programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a defining polynomial of a radical expression.
    Defpoly(DefpolyArgs),
    /// Build a root-isolation certificate for a radical expression.
    Isolate(IsolateArgs),
    /// Reformulate a problem file into polynomial programs.
    Reformulate(ReformulateArgs),
    /// Check a defining polynomial or a certificate against an expression.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Working precision in bits.
    #[arg(long = "precision", default_value_t = 64)]
    precision_bits: u32,
    /// Random sample points per check.
    #[arg(long, default_value_t = 128)]
    samples: usize,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Echo the effective configuration to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Univariate,
    Domain,
    Grid,
}

#[derive(Args, Clone)]
struct StrategyArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Univariate)]
    strategy: StrategyArg,
    /// Domain file: {"point": {"x": "2"}, "constraints": [{"poly": "x - 1", "rel": ">="}]}.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Interior point for the domain strategy, e.g. `x=2,y=3`.
    #[arg(long)]
    point: Option<String>,
    /// Grid bounds per variable, e.g. `x=-4:4`; repeatable.
    #[arg(long = "box")]
    bounds: Vec<String>,
    /// Grid cells per axis.
    #[arg(long, default_value_t = 16)]
    resolution: usize,
    /// Merge components with equal derivative signs.
    #[arg(long)]
    merge: bool,
    /// Relax strict conditions after merging (implies --merge).
    #[arg(long)]
    allow_boundary: bool,
}

#[derive(Args)]
struct DefpolyArgs {
    expr: String,
    /// Name of the defining variable.
    #[arg(long, default_value = "z")]
    z: String,
    /// Check the polynomial at random points and audit its degrees.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct IsolateArgs {
    expr: String,
    #[arg(long, default_value = "z")]
    z: String,
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Check the certificate with the exact oracle.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ReformulateArgs {
    problem: PathBuf,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Also emit the one-variable-per-radical reformulation.
    #[arg(long)]
    baseline: bool,
    /// Upper limit on the number of child programs.
    #[arg(long, default_value_t = 64)]
    max_children: usize,
    /// Check substitution soundness of every child.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// The radical expression.
    #[arg(long)]
    expr: String,
    /// A defining polynomial to check.
    #[arg(long, conflicts_with = "certificate")]
    defining: Option<String>,
    /// A certificate JSON file to check.
    #[arg(long)]
    certificate: Option<PathBuf>,
    #[arg(long, default_value = "z")]
    z: String,
    /// Half-width of the sampling box around component samples.
    #[arg(long, default_value_t = 2)]
    radius: i64,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
    /// A verification report did not pass; already printed.
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::Parse { .. }) => 3,
            Failure::Lib(Error::Explosion { .. } | Error::Precision(_) | Error::Sampling(_)) => 5,
            Failure::Lib(Error::Internal(_)) | Failure::Io(_) => 1,
            Failure::Lib(_) | Failure::Verify => 4,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn write_out(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn echo(common: &Common, extra: &[(&str, String)]) {
    if !common.verbose {
        return;
    }
    eprintln!(
        "seed={} precision={} samples={}",
        common.seed, common.precision_bits, common.samples
    );
    for (k, v) in extra {
        eprintln!("{k}={v}");
    }
}

fn report_out(report: &Report) -> CliResult<()> {
    write_out(&None, &format!("{}\n", report.to_json_string()))?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn parse_point(s: &str, reg: &mut Registry) -> CliResult<Point> {
    s.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("point entry '{kv}' is not name=value")))?;
            Ok((reg.var(k.trim()), parse_rational(v.trim())?))
        })
        .collect()
}

fn build_strategy(
    args: &StrategyArgs,
    reg: &mut Registry,
    default_constraints: Vec<SignCondition>,
) -> CliResult<Strategy> {
    match args.strategy {
        StrategyArg::Univariate => Ok(Strategy::Univariate),
        StrategyArg::Domain => {
            if let Some(path) = &args.domain {
                Ok(DomainJson::from_json_str(&read(path)?)?.to_strategy(reg)?)
            } else if let Some(p) = &args.point {
                Ok(Strategy::Domain {
                    constraints: default_constraints,
                    point: parse_point(p, reg)?,
                })
            } else {
                Err(Failure::Usage("the domain strategy needs --domain FILE or --point".into()))
            }
        }
        StrategyArg::Grid => {
            if args.bounds.is_empty() {
                return Err(Failure::Usage("the grid strategy needs --box name=lo:hi per variable".into()));
            }
            let bounds = args
                .bounds
                .iter()
                .map(|b| {
                    let bad = || Failure::Usage(format!("box '{b}' is not name=lo:hi"));
                    let (name, range) = b.split_once('=').ok_or_else(bad)?;
                    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
                    Ok((reg.var(name.trim()), parse_rational(lo.trim())?, parse_rational(hi.trim())?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Strategy::Grid(GridConfig {
                bounds,
                resolution: args.resolution,
            }))
        }
    }
}

fn merge_config(args: &StrategyArgs, common: &Common) -> Option<MergeConfig> {
    (args.merge || args.allow_boundary).then(|| MergeConfig {
        allow_boundary: args.allow_boundary,
        seed: common.seed,
        precision: common.precision_bits,
        ..MergeConfig::default()
    })
}

fn reduce_config(common: &Common) -> ReduceConfig {
    ReduceConfig {
        seed: common.seed,
        precision: common.precision_bits,
        ..ReduceConfig::default()
    }
}

fn isolate_config(common: &Common) -> IsolateConfig {
    IsolateConfig {
        seed: common.seed,
        precision: common.precision_bits,
        samples: common.samples,
        ..IsolateConfig::default()
    }
}

fn verify_config(common: &Common, radius: i64) -> VerifyConfig {
    VerifyConfig {
        samples: common.samples,
        precision: common.precision_bits,
        seed: common.seed,
        radius,
    }
}

fn expression(text: &str, reg: &mut Registry) -> CliResult<RadicalExpr> {
    Ok(normalize(&parse(text, reg)?)?)
}

fn cmd_defpoly(a: DefpolyArgs) -> CliResult<()> {
    echo(&a.common, &[("z", a.z.clone())]);
    let mut reg = Registry::new();
    let f = expression(&a.expr, &mut reg)?;
    let z = reg.fresh(&a.z);
    let dp = defining_polynomial(&f, z, &mut reg, &reduce_config(&a.common))?;
    let bounds = degree_bounds(&f);
    let text = format!("{}\n", dp.poly.to_text(&reg));
    eprintln!(
        "{}: degree {} (bound {}, root-index product {})",
        reg.name(z),
        dp.z_degree(),
        bounds.z,
        dp.predicted_z_degree_bound
    );
    for v in f.vars() {
        eprintln!("{}: degree {} (bound {})", reg.name(v), dp.poly.deg(v), bounds.var(v));
    }
    eprintln!(
        "reduction: {}",
        if dp.reduced {
            "factor selected by zero test"
        } else {
            "none"
        }
    );
    if a.verify {
        let mut report = verify_defining(&f, &dp, &verify_config(&a.common, 2), &reg)?;
        report.extend(audit_degrees(&dp, &reg));
        write_out(&a.common.out, &text)?;
        return report_out(&report);
    }
    write_out(&a.common.out, &text)
}

fn cmd_isolate(a: IsolateArgs) -> CliResult<()> {
    echo(
        &a.common,
        &[
            ("resolution", a.strategy.resolution.to_string()),
            ("merge", (a.strategy.merge || a.strategy.allow_boundary).to_string()),
            ("allow_boundary", a.strategy.allow_boundary.to_string()),
        ],
    );
    let mut reg = Registry::new();
    let f = expression(&a.expr, &mut reg)?;
    let strategy = build_strategy(&a.strategy, &mut reg, Vec::new())?;
    let z = reg.fresh(&a.z);
    let dp = defining_polynomial(&f, z, &mut reg, &reduce_config(&a.common))?;
    let mut cert = isolate(&f, &dp, &strategy, &isolate_config(&a.common))?;
    if let Some(m) = merge_config(&a.strategy, &a.common) {
        cert = merge_components(&f, &cert, &m)?;
    }
    for w in &cert.warnings {
        eprintln!("warning: {w}");
    }
    write_out(&a.common.out, &format!("{}\n", cert.to_json_string(&reg)))?;
    if a.verify {
        return report_out(&verify_certificate(&f, &cert, &verify_config(&a.common, 2), &reg)?);
    }
    Ok(())
}

fn cmd_reformulate(a: ReformulateArgs) -> CliResult<()> {
    echo(
        &a.common,
        &[
            ("max_children", a.max_children.to_string()),
            ("resolution", a.strategy.resolution.to_string()),
            ("allow_boundary", a.strategy.allow_boundary.to_string()),
        ],
    );
    let prog = AlgebraicProgram::from_json_str(&read(&a.problem)?)?;
    let mut reg = prog.variables.clone();
    let strategy = build_strategy(&a.strategy, &mut reg, prog.polynomial_constraints())?;
    if reg.len() != prog.variables.len() {
        return Err(Failure::Usage("strategy names a variable the problem does not declare".into()));
    }
    let cfg = ReformulateConfig {
        reduce: reduce_config(&a.common),
        isolate: isolate_config(&a.common),
        merge: merge_config(&a.strategy, &a.common),
        max_children: a.max_children,
    };
    let result = reformulate(&prog, &strategy, &cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "auxiliary variables: {} (ours) vs {} (one per radical); density: {}",
        result.aux_count_ours, result.aux_count_baseline, result.density_note
    );
    write_out(&a.common.out, &emit_result(&result, a.format))?;
    let baseline = if a.baseline || a.verify {
        Some(baseline_reformulate(&prog)?)
    } else {
        None
    };
    if let (true, Some(b)) = (a.baseline, &baseline) {
        let text = emit_program(b, a.format);
        match &a.common.out {
            Some(p) => {
                let mut name = p.clone().into_os_string();
                name.push(".baseline");
                write_out(&Some(PathBuf::from(name)), &text)?;
            }
            None => write_out(&None, &text)?,
        }
    }
    if a.verify {
        let report = verify_reformulation(&prog, &result, baseline.as_ref(), &verify_config(&a.common, 2))?;
        if !report.passed() {
            eprintln!("{}", report.to_json_string());
            return Err(Failure::Verify);
        }
        eprintln!("verification passed");
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    echo(&a.common, &[("radius", a.radius.to_string())]);
    let mut reg = Registry::new();
    let f = expression(&a.expr, &mut reg)?;
    let cfg = verify_config(&a.common, a.radius);
    let report = if let Some(text) = &a.defining {
        let z = reg.var(&a.z);
        let poly = parse_poly(text, &mut reg)?;
        let dp = algprog::defpoly::DefiningPolynomial {
            predicted_z_degree_bound: f.root_index_product(),
            poly,
            z,
            source: f.clone(),
            reduced: false,
        };
        let mut r = verify_defining(&f, &dp, &cfg, &reg)?;
        r.extend(audit_degrees(&dp, &reg));
        r
    } else if let Some(path) = &a.certificate {
        let cert = IsolationCertificate::from_json_str(&read(path)?, &mut reg)?;
        verify_certificate(&f, &cert, &cfg, &reg)?
    } else {
        return Err(Failure::Usage("verify needs --defining POLY or --certificate FILE".into()));
    };
    report_out(&report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Defpoly(a) => cmd_defpoly(a),
        Command::Isolate(a) => cmd_isolate(a),
        Command::Reformulate(a) => cmd_reformulate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            let msg = match &f {
                Failure::Usage(m) | Failure::Io(m) => m.clone(),
                Failure::Lib(e) => e.to_string(),
                Failure::Verify => "verification failed".into(),
            };
            eprintln!("{}", json!({ "error": msg, "exit_code": code }));
            ExitCode::from(code)
        }
    }
}
