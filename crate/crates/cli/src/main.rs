use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use marq_core::harness::{
    render_report, run_grid, verify_point, GridSpec, IdentityId, Policies, Point, ReportFormat,
    VerificationReport, ALL_IDENTITIES, CATALOGUE,
};
use marq_core::kernels::{erf, erfi, upper_gamma_int};
use marq_core::marcum::{clamp_unit, marcum_q_integral, marcum_q_series, q0_via_genfunc, MarcumArgs};
use marq_core::special::{
    bessel_i, bessel_j, laguerre, laguerre_weighted_sum, s_half_range, GenArgs,
};
use marq_core::{EvalResult, QuadratureSpec, SeriesPolicy};

/// Evaluate special functions and verify the identity catalogue.
#[derive(Parser)]
#[command(name = "marq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Args, Clone, Default)]
struct PolicyOverrides {
    /// Series relative tolerance override.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Series term cap override.
    #[arg(long)]
    max_terms: Option<usize>,
    /// Quadrature relative tolerance override.
    #[arg(long)]
    quad_rel_tol: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct PointArgs {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Limit-table row selector (L30): 0 alpha->0, 1 alpha->inf, 2 beta=0, 3 beta->inf.
    #[arg(long)]
    row: Option<u32>,
}

#[derive(Subcommand)]
enum Commands {
    /// Evaluate one function at a point and print the result line.
    Eval {
        /// One of: bessel-i, bessel-j, laguerre, erf, erfi, gamma-upper,
        /// marcum-q, q0, s-sum, laguerre-wsum.
        function: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// marcum-q route: series or integral.
        #[arg(long)]
        route: Option<String>,
        #[command(flatten)]
        overrides: PolicyOverrides,
    },
    /// Verify one identity at one point; exit 0 on pass, 1 on fail.
    Verify {
        /// Identity id from the catalogue (see `marq list`).
        id: String,
        #[command(flatten)]
        point: PointArgs,
        /// Output format: line (default), json, csv or markdown.
        #[arg(long, default_value = "line")]
        format: String,
        #[command(flatten)]
        overrides: PolicyOverrides,
    },
    /// Run identities over a parameter grid and write a report.
    Grid {
        /// Comma-separated identity ids, or "all".
        #[arg(long, default_value = "all")]
        ids: String,
        /// Report format: json, csv or markdown.
        #[arg(long, default_value = "json")]
        format: String,
        /// Output path; defaults to report.<ext> under MARQ_OUT_DIR or the
        /// working directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional JSON config file (same schema as the overrides).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid override: comma-separated x values.
        #[arg(long)]
        x: Option<String>,
        /// Grid override: comma-separated t values in (0, 1].
        #[arg(long)]
        t: Option<String>,
        /// Grid override: comma-separated integer orders.
        #[arg(long)]
        orders: Option<String>,
        /// Grid override: comma-separated Laguerre t values.
        #[arg(long)]
        laguerre_t: Option<String>,
        #[command(flatten)]
        overrides: PolicyOverrides,
    },
    /// Print the identity catalogue, one line per identity.
    List,
}

/// JSON config document: every field optional, flags win over the file.
#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CliConfig {
    series: Option<SeriesPolicy>,
    quadrature: Option<QuadratureSpec>,
    grid: Option<GridSpec>,
    output: Option<OutputConfig>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputConfig {
    path: Option<PathBuf>,
    format: Option<String>,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Commands::Eval { .. } => cmd_eval(cli.command),
        Commands::Verify { .. } => cmd_verify(cli.command),
        Commands::Grid { .. } => cmd_grid(cli.command),
        Commands::List => {
            cmd_list();
            Ok(ExitCode::SUCCESS)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn apply_overrides(overrides: &PolicyOverrides) -> Result<Policies, UsageError> {
    let mut pol = Policies::default();
    if let Some(rt) = overrides.rel_tol {
        pol.series.rel_tol = rt;
    }
    if let Some(mt) = overrides.max_terms {
        pol.series.max_terms = mt;
    }
    if let Some(qt) = overrides.quad_rel_tol {
        pol.quad.rel_tol = qt;
    }
    pol.series.validate()?;
    pol.quad.validate()?;
    Ok(pol)
}

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T, UsageError> {
    v.ok_or_else(|| UsageError(format!("missing required parameter {what}")))
}

fn result_line(prefix: &str, r: &EvalResult, extra: Option<(&str, f64)>) -> String {
    let mut line = format!(
        "{prefix} value={} err_estimate={} terms_used={} converged={} cancellation={}",
        r.value, r.err_estimate, r.terms_used, r.converged, r.cancellation
    );
    if let Some((k, v)) = extra {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

fn cmd_eval(cmd: Commands) -> Result<ExitCode, UsageError> {
    let Commands::Eval {
        function,
        n,
        m,
        k,
        x,
        t,
        z,
        y,
        alpha,
        beta,
        route,
        overrides,
    } = cmd
    else {
        unreachable!()
    };
    let pol = apply_overrides(&overrides)?;
    let line = match function.as_str() {
        "bessel-i" => {
            let (n, x) = (need(n, "--n")?, need(x, "--x")?);
            let r = bessel_i(n, x, &pol.series)?;
            result_line(&format!("bessel-i n={n} x={x}"), &r, None)
        }
        "bessel-j" => {
            let (m, x) = (need(m, "--m")?, need(x, "--x")?);
            let r = bessel_j(m, x, &pol.series)?;
            result_line(&format!("bessel-j m={m} x={x}"), &r, None)
        }
        "laguerre" => {
            let (n, x) = (need(n, "--n")?, need(x, "--x")?);
            let r = laguerre(n, x, &pol.series)?;
            result_line(&format!("laguerre n={n} x={x}"), &r, None)
        }
        "erf" => {
            let z = need(z, "--z")?;
            let r = erf(z, &pol.series)?;
            result_line(&format!("erf z={z}"), &r, None)
        }
        "erfi" => {
            let y = need(y, "--y")?;
            let r = erfi(y, &pol.series)?;
            result_line(&format!("erfi y={y}"), &r, None)
        }
        "gamma-upper" => {
            let (k, z) = (need(k, "--k")?, need(z, "--z")?);
            let r = upper_gamma_int(k, z)?;
            result_line(&format!("gamma-upper k={k} z={z}"), &r, None)
        }
        "marcum-q" => {
            let (m, alpha, beta) = (need(m, "--m")?, need(alpha, "--alpha")?, need(beta, "--beta")?);
            let args = MarcumArgs::new(m, alpha, beta)?;
            let r = match route.as_deref().unwrap_or("series") {
                "series" => marcum_q_series(args, &pol.series)?,
                "integral" => marcum_q_integral(args, &pol.quad)?,
                other => return Err(UsageError(format!("unknown route '{other}' (series|integral)"))),
            };
            result_line(
                &format!("marcum-q m={m} alpha={alpha} beta={beta}"),
                &r,
                Some(("clamped", clamp_unit(r.value))),
            )
        }
        "q0" => {
            let (x, t) = (need(x, "--x")?, need(t, "--t")?);
            let r = q0_via_genfunc(GenArgs::new(x, t)?, &pol.series)?;
            result_line(&format!("q0 x={x} t={t}"), &r, Some(("clamped", clamp_unit(r.value))))
        }
        "s-sum" => {
            let (x, t) = (need(x, "--x")?, need(t, "--t")?);
            let r = s_half_range(GenArgs::new(x, t)?, &pol.series)?;
            result_line(&format!("s-sum x={x} t={t}"), &r, None)
        }
        "laguerre-wsum" => {
            let (m, x, t) = (need(m, "--m")?, need(x, "--x")?, need(t, "--t")?);
            let r = laguerre_weighted_sum(m, x, t, &pol.series)?;
            result_line(&format!("laguerre-wsum m={m} x={x} t={t}"), &r, None)
        }
        other => {
            return Err(UsageError(format!(
                "unknown function '{other}' (bessel-i, bessel-j, laguerre, erf, erfi, gamma-upper, marcum-q, q0, s-sum, laguerre-wsum)"
            )))
        }
    };
    println!("{line}");
    Ok(ExitCode::SUCCESS)
}

fn build_point(args: &PointArgs) -> Point {
    let mut point: Point = BTreeMap::new();
    if let Some(x) = args.x {
        point.insert("x".into(), x);
    }
    if let Some(t) = args.t {
        point.insert("t".into(), t);
    }
    if let Some(m) = args.m {
        point.insert("m".into(), m as f64);
    }
    if let Some(a) = args.alpha {
        point.insert("alpha".into(), a);
    }
    if let Some(b) = args.beta {
        point.insert("beta".into(), b);
    }
    if let Some(r) = args.row {
        point.insert("row".into(), r as f64);
    }
    point
}

fn cmd_verify(cmd: Commands) -> Result<ExitCode, UsageError> {
    let Commands::Verify {
        id,
        point,
        format,
        overrides,
    } = cmd
    else {
        unreachable!()
    };
    let id = IdentityId::from_str(&id)?;
    let pol = apply_overrides(&overrides)?;
    let point = build_point(&point);
    let case = verify_point(id, &point, &pol)?;
    let pass = case.pass;
    if format == "line" {
        println!(
            "{} {} lhs={} rhs={} abs_err={} rel_err={} tol={} {}",
            case.identity,
            marq_core::harness::format_point(&case.point),
            case.lhs,
            case.rhs,
            case.abs_err,
            case.rel_err,
            case.tol_used,
            if pass { "PASS" } else { "FAIL" }
        );
        if !case.diagnostics.is_empty() {
            println!("  diagnostics: {}", case.diagnostics);
        }
    } else {
        let fmt = ReportFormat::from_str(&format)?;
        let report = single_case_report(id, case);
        print!("{}", render_report(&report, fmt));
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn single_case_report(
    id: IdentityId,
    case: marq_core::harness::IdentityCase,
) -> VerificationReport {
    let mut report = VerificationReport::empty();
    report.generated_for = vec![id];
    report.summary.insert(
        id.to_string(),
        marq_core::harness::IdentitySummary {
            count: 1,
            passed: case.pass as usize,
            max_rel_err: case.rel_err,
            worst_point: case.point.clone(),
        },
    );
    report.cases = vec![case];
    report
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, UsageError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|e| UsageError(format!("bad {what} value '{p}': {e}")))
        })
        .collect()
}

fn cmd_grid(cmd: Commands) -> Result<ExitCode, UsageError> {
    let Commands::Grid {
        ids,
        format,
        out,
        config,
        x,
        t,
        orders,
        laguerre_t,
        overrides,
    } = cmd
    else {
        unreachable!()
    };

    let config: CliConfig = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| UsageError(format!("bad config {}: {e}", path.display())))?
        }
        None => CliConfig::default(),
    };

    let mut pol = Policies::default();
    if let Some(series) = config.series {
        pol.series = series;
    }
    if let Some(quad) = config.quadrature {
        pol.quad = quad;
    }
    if let Some(rt) = overrides.rel_tol {
        pol.series.rel_tol = rt;
    }
    if let Some(mt) = overrides.max_terms {
        pol.series.max_terms = mt;
    }
    if let Some(qt) = overrides.quad_rel_tol {
        pol.quad.rel_tol = qt;
    }
    pol.series.validate()?;
    pol.quad.validate()?;

    let mut grid = config.grid.unwrap_or_default();
    if let Some(x) = x {
        grid.x_values = parse_list(&x, "--x")?;
    }
    if let Some(t) = t {
        grid.t_values = parse_list(&t, "--t")?;
    }
    if let Some(orders) = orders {
        grid.orders = parse_list(&orders, "--orders")?;
    }
    if let Some(lt) = laguerre_t {
        grid.laguerre_t_values = parse_list(&lt, "--laguerre-t")?;
    }
    grid.validate()?;

    let ids: Vec<IdentityId> = if ids == "all" {
        ALL_IDENTITIES.to_vec()
    } else {
        parse_list(&ids, "--ids")?
    };
    if ids.is_empty() {
        return Err(UsageError("--ids must name at least one identity".into()));
    }

    let format = config
        .output
        .as_ref()
        .and_then(|o| o.format.clone())
        .filter(|_| format == "json") // explicit flag wins over config
        .unwrap_or(format);
    let fmt = ReportFormat::from_str(&format)?;

    let report = run_grid(&ids, &grid, &pol);
    let rendered = render_report(&report, fmt);

    let ext = match fmt {
        ReportFormat::Json => "json",
        ReportFormat::Csv => "csv",
        ReportFormat::Markdown => "md",
    };
    let out_path = out
        .or(config.output.and_then(|o| o.path))
        .unwrap_or_else(|| {
            let dir = std::env::var_os("MARQ_OUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            dir.join(format!("report.{ext}"))
        });
    std::fs::write(&out_path, rendered)
        .map_err(|e| UsageError(format!("cannot write {}: {e}", out_path.display())))?;

    // echo the per-identity summary to stdout
    print!("{}", render_report(&report, ReportFormat::Markdown));
    println!("\nreport written to {}", out_path.display());

    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_list() {
    for info in &CATALOGUE {
        println!(
            "{}  {}  \"{}\"  {}  tol={:e}",
            info.name, info.equation, info.anchor, info.route, info.tol
        );
    }
}
