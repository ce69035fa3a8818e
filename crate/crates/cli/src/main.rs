//! `kerncalc`: command-line front end for the kernel workbench.

mod config;
mod report;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use kerncalc::automorphism::{curvature_quasi_check, quasi_invariance_residual};
use kerncalc::positivity::{default_families, psd_check, wallach_scan, DEFAULT_RESOLUTION, DEFAULT_TOL};
use kerncalc::rkhs::{multiplier_bound, norm, z2_tensor_e1_norm};
use kerncalc::{eval, eval_jet, parse_kernel, sample_points, CocycleSpec, DomainSpec, KernelError, KernelExpr, MobiusMap, Point, Polynomial, RkhsElement, RngSeed};

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "kerncalc", version, about = "Construct, differentiate and certify sesqui-analytic reproducing kernels")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct Global {
    /// JSON file whose keys fill flags not given on the command line.
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<String>,
    /// Output format (default json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate K(z, w), optionally with its derivative table.
    Eval(EvalArgs),
    /// Gram matrix verdict on sampled points.
    Psd(PsdArgs),
    /// Bisect the boundary of the generalized Wallach set.
    Wallach(WallachArgs),
    /// Norm of ‖z₂⊗e₁‖ for the ball matrix kernel, or of a given element.
    Norm(NormArgs),
    /// Multiplier norm bound of a polynomial.
    Bound(BoundArgs),
    /// Quasi-invariance residual under a Möbius map.
    Quasi(QuasiArgs),
    /// Run the acceptance suite.
    Repro(ReproArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DomainChoice {
    Ball,
    Polydisc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CocycleChoice {
    Det,
    Curvature,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct EvalArgs {
    /// Kernel expression.
    #[arg(long)]
    kernel: Option<String>,
    /// First point, comma separated, e.g. `0.1+0.2i,0`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Emit all ∂^i∂̄^j K(z, w) with |i|, |j| ≤ order.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct SampleArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    domain: Option<DomainChoice>,
    /// Sampling radius inside the domain.
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct PsdArgs {
    #[arg(long)]
    kernel: Option<String>,
    /// Number of sample points.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    sample: SampleArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct WallachArgs {
    /// Base kernel K; the scan is over K^t·(∂ᵢ∂̄ⱼ log K).
    #[arg(long)]
    base: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    #[arg(long)]
    resolution: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    sample: SampleArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct NormArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    /// Kernel of an explicit element.
    #[arg(long)]
    kernel: Option<String>,
    /// Element terms as JSON, or `@path` to a JSON file.
    #[arg(long)]
    element: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct BoundArgs {
    #[arg(long)]
    kernel: Option<String>,
    /// Polynomial multiplier, e.g. `z`, `z1*z2`, `0.5*z1^2 + z2`.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    resolution: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    sample: SampleArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct QuasiArgs {
    #[arg(long)]
    kernel: Option<String>,
    /// Cocycle exponent.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// `det`: (det Dφ)^t; `curvature`: the kernel is the base B and the
    /// residual is that of B^t·(∂ᵢ∂̄ⱼ log B) under (det Dφ)^t·Dφ^tr.
    #[arg(long, value_enum)]
    cocycle: Option<CocycleChoice>,
    /// Map as JSON `{"a": ..., "U": ...}` or `@path`; random when absent.
    #[arg(long)]
    map: Option<String>,
    /// Number of (z, w) pairs.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
struct ReproArgs {
    /// Run a single criterion.
    #[arg(long)]
    id: Option<u8>,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Kernel(KernelError),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Kernel(e) if e.is_config_error() => 2,
            CliError::Kernel(e) if e.is_bracket_failure() => 4,
            CliError::Kernel(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Kernel(e) => write!(f, "{e}"),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Kernel(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file = cli.global.config.as_deref().map(config::load).transpose()?;
    let file = file.as_ref();
    let global: Global = config::merge(&cli.global, file, &[])?;
    let format = global.format.unwrap_or(Format::Json);
    let (report, failed) = match cli.command {
        Command::Eval(a) => (cmd_eval(config::merge(&a, file, config::GLOBAL_KEYS)?)?, None),
        Command::Psd(a) => (cmd_psd(config::merge(&a, file, config::GLOBAL_KEYS)?)?, None),
        Command::Wallach(a) => (cmd_wallach(config::merge(&a, file, config::GLOBAL_KEYS)?)?, None),
        Command::Norm(a) => (cmd_norm(config::merge(&a, file, config::GLOBAL_KEYS)?)?, None),
        Command::Bound(a) => (cmd_bound(config::merge(&a, file, config::GLOBAL_KEYS)?)?, None),
        Command::Quasi(a) => (cmd_quasi(config::merge(&a, file, config::GLOBAL_KEYS)?)?, None),
        Command::Repro(a) => cmd_repro(config::merge(&a, file, config::GLOBAL_KEYS)?)?,
    };
    let text = report.render(format);
    match &global.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    match failed {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing --{flag}")))
}

/// Parse errors carry a caret under the offending byte.
fn annotate(text: &str, e: KernelError) -> CliError {
    match &e {
        KernelError::Syntax { pos, .. } => {
            let col = text.get(..*pos).map_or(*pos, |s| s.chars().count());
            CliError::Config(format!("{e}\n  {text}\n  {}^", " ".repeat(col)))
        }
        _ => CliError::Kernel(e),
    }
}

fn kernel(text: &str) -> CliResult<KernelExpr> {
    parse_kernel(text).map_err(|e| annotate(text, e))
}

fn parse_point(text: &str, flag: &str) -> CliResult<Point> {
    let coords = text
        .split(',')
        .map(|s| Complex64::from_str(s.trim()).map_err(|_| CliError::Config(format!("--{flag}: cannot parse `{}` as a complex number", s.trim()))))
        .collect::<CliResult<Vec<_>>>()?;
    Point::new(coords).map_err(CliError::from)
}

fn check_tol(tol: f64) -> CliResult<f64> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Config(format!("--tol must be a non-negative number, got {tol}")))
    }
}

fn check_positive(v: f64, flag: &str) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("--{flag} must be positive, got {v}")))
    }
}

fn domain_for(expr: &KernelExpr, s: &SampleArgs) -> CliResult<DomainSpec> {
    let m = expr.dim();
    let d = match s.domain.unwrap_or(DomainChoice::Ball) {
        DomainChoice::Ball => DomainSpec::ball(m),
        DomainChoice::Polydisc => DomainSpec::polydisc(m),
    };
    match s.radius {
        Some(r) => Ok(d.with_radius(check_positive(r, "radius")?)?),
        None => Ok(d),
    }
}

fn read_json_arg(text: &str, flag: &str) -> CliResult<serde_json::Value> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("--{flag}: cannot read {path}: {e}")))?,
        None => text.to_string(),
    };
    serde_json::from_str(&body).map_err(|e| CliError::Config(format!("--{flag}: invalid JSON: {e}")))
}

fn cmd_eval(a: EvalArgs) -> CliResult<Report> {
    let text = required(&a.kernel, "kernel")?;
    let k = kernel(&text)?;
    let z = parse_point(&required(&a.z, "z")?, "z")?;
    let w = parse_point(&required(&a.w, "w")?, "w")?;
    if z.dim() != k.dim() || w.dim() != k.dim() {
        return Err(KernelError::DimensionMismatch { expected: k.dim(), actual: if z.dim() != k.dim() { z.dim() } else { w.dim() } }.into());
    }
    let mut report = Report::new("eval", &k);
    match a.order {
        None => {
            let v = eval(&k, &z, &w)?;
            report.set_result(serde_json::json!({ "z": z, "w": w, "value": v }));
            report.set_entries(vec![(None, v)]);
        }
        Some(order) => {
            let table = eval_jet(&k, &z, &w, order)?;
            let jets: Vec<_> = table.iter().map(|(i, j, v)| serde_json::json!({ "i": i.entries(), "j": j.entries(), "value": v })).collect();
            report.set_result(serde_json::json!({ "z": z, "w": w, "order": order, "value": table.value(), "jets": jets }));
            report.set_entries(table.iter().map(|(i, j, v)| (Some((i.entries().to_vec(), j.entries().to_vec())), v.clone())).collect());
        }
    }
    Ok(report)
}

fn cmd_psd(a: PsdArgs) -> CliResult<Report> {
    let k = kernel(&required(&a.kernel, "kernel")?)?;
    let n = a.n.unwrap_or(20);
    if n == 0 {
        return Err(CliError::Config("--n must be positive".into()));
    }
    let seed = a.sample.seed.unwrap_or(0);
    let tol = check_tol(a.sample.tol.unwrap_or(DEFAULT_TOL))?;
    let domain = domain_for(&k, &a.sample)?;
    let r = psd_check(&k, &domain, n, RngSeed(seed), tol)?;
    let mut report = Report::new("psd", &k).seed(seed).tol(tol);
    report.set_spectrum(r.eigenvalues.clone());
    report.set_result(serde_json::to_value(&r).expect("report serializes"));
    Ok(report)
}

fn cmd_wallach(a: WallachArgs) -> CliResult<Report> {
    let base = kernel(&required(&a.base, "base")?)?;
    let (lo, hi) = (required(&a.lo, "lo")?, required(&a.hi, "hi")?);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Config(format!("need --lo < --hi, got [{lo}, {hi}]")));
    }
    let seed = a.sample.seed.unwrap_or(0);
    let tol = check_tol(a.sample.tol.unwrap_or(DEFAULT_TOL))?;
    let resolution = check_positive(a.resolution.unwrap_or(DEFAULT_RESOLUTION), "resolution")?;
    let domain = domain_for(&base, &a.sample)?;
    let est = wallach_scan(&base, lo, hi, &domain, &default_families(seed), tol, resolution)?;
    let mut report = Report::new("wallach", &base).seed(seed).tol(tol);
    report.set_verdicts(est.verdicts.clone());
    report.set_result(serde_json::to_value(&est).expect("estimate serializes"));
    Ok(report)
}

fn cmd_norm(a: NormArgs) -> CliResult<Report> {
    if let Some(element) = &a.element {
        let k = kernel(&required(&a.kernel, "kernel")?)?;
        let e = RkhsElement::from_terms_json(k.clone(), read_json_arg(element, "element")?)?;
        let n = norm(&e)?;
        let mut report = Report::new("norm", &k);
        report.set_result(serde_json::json!({ "norm": n, "terms": e.terms_json() }));
        return Ok(report);
    }
    let lambda = required(&a.lambda, "lambda")?;
    let m = a.m.unwrap_or(2);
    if m < 2 || !(lambda.is_finite() && lambda > 2.0) {
        return Err(CliError::Config(format!("need --m ≥ 2 and --lambda > 2, got m = {m}, λ = {lambda}")));
    }
    let k = KernelExpr::ball_curvature(m, lambda)?;
    let n = z2_tensor_e1_norm(m, lambda)?;
    let closed = ((lambda - 1.0) / (lambda * (lambda - 2.0))).sqrt();
    let mut report = Report::new("norm", &k);
    report.set_result(serde_json::json!({ "m": m, "lambda": lambda, "norm": n, "closed_form": closed }));
    Ok(report)
}

fn cmd_bound(a: BoundArgs) -> CliResult<Report> {
    let k = kernel(&required(&a.kernel, "kernel")?)?;
    let ftext = required(&a.f, "f")?;
    let f = Polynomial::parse(&ftext, k.dim()).map_err(|e| annotate(&ftext, e))?;
    let seed = a.sample.seed.unwrap_or(0);
    let tol = check_tol(a.sample.tol.unwrap_or(DEFAULT_TOL))?;
    let resolution = check_positive(a.resolution.unwrap_or(DEFAULT_RESOLUTION), "resolution")?;
    let domain = domain_for(&k, &a.sample)?;
    let b = multiplier_bound(&k, &f, &domain, &default_families(seed), tol, resolution)?;
    let mut report = Report::new("bound", &k).seed(seed).tol(tol);
    report.set_result(serde_json::to_value(&b).expect("bound serializes"));
    Ok(report)
}

fn cmd_quasi(a: QuasiArgs) -> CliResult<Report> {
    let k = kernel(&required(&a.kernel, "kernel")?)?;
    let m = k.dim();
    let t = a.t.unwrap_or(1.0);
    if !t.is_finite() {
        return Err(CliError::Config(format!("--t must be finite, got {t}")));
    }
    let seed = a.seed.unwrap_or(0);
    let n = a.pairs.unwrap_or(20);
    if n == 0 {
        return Err(CliError::Config("--pairs must be positive".into()));
    }
    let phi: MobiusMap = match &a.map {
        Some(text) => serde_json::from_value(read_json_arg(text, "map")?).map_err(|e| CliError::Config(format!("--map: {e}")))?,
        None => MobiusMap::random(m, 0.7, &mut RngSeed(seed).rng()),
    };
    let pts = sample_points(&DomainSpec::ball(m), 2 * n, RngSeed(seed.wrapping_add(1)));
    let pairs: Vec<(Point, Point)> = pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let cocycle = a.cocycle.unwrap_or(CocycleChoice::Det);
    let residual = match cocycle {
        CocycleChoice::Det => quasi_invariance_residual(&k, CocycleSpec::DetJacobianPower(t), &phi, &pairs)?,
        CocycleChoice::Curvature => curvature_quasi_check(&k, t, &phi, &pairs)?,
    };
    let applied = match cocycle {
        CocycleChoice::Det => CocycleSpec::DetJacobianPower(t),
        CocycleChoice::Curvature => CocycleSpec::CurvatureCocycle(t),
    };
    let mut report = Report::new("quasi", &k).seed(seed);
    report.set_result(serde_json::json!({ "residual": residual, "cocycle": applied, "map": phi, "pairs": n }));
    Ok(report)
}

fn cmd_repro(a: ReproArgs) -> CliResult<(Report, Option<String>)> {
    let outcomes = match a.id {
        Some(id) => vec![kerncalc::repro::criterion(id).ok_or_else(|| CliError::Config(format!("no criterion {id}; ids are 1..=11")))?],
        None => kerncalc::repro::run_all(),
    };
    for o in &outcomes {
        eprintln!("{o}");
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    let mut report = Report::bare("repro");
    report.set_outcomes(outcomes);
    let msg = (!failed.is_empty()).then(|| format!("criteria failed: {}", failed.join(", ")));
    Ok((report, msg))
}
