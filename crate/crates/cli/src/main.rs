use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sampling_core::bench::{parse_index_list, run_experiment, verify_suite, Example, ExperimentConfig, OutputFormat, Report, Suite};
use sampling_core::kfunc::{realization, CandidateFamily};
use sampling_core::nodes::{dyadic_nodes, lagrange_nodes, uniform_nodes};
use sampling_core::operators::{approx_error, estimate_operator_constants, ProfileConfig, SamplingOperator};
use sampling_core::smoothness::{combined_modulus_with, omega, steklov_deviation, steklov_node_deviation, tau};
use sampling_core::torus::{list_corpus, parse_corpus_id};
use sampling_core::{NodeSet, QuadratureSpec, SmoothnessParams};

#[derive(Parser)]
#[command(name = "sampling", version, about = "Sampling operators, smoothness measures and rate experiments on the torus")]
struct Cli {
    #[command(flatten)]
    quad: QuadFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QuadFlags {
    /// Absolute quadrature tolerance
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Maximal bisection depth per panel
    #[arg(long, global = true)]
    max_depth: Option<u32>,
}

impl QuadFlags {
    fn spec(&self) -> Result<QuadratureSpec> {
        let mut spec = QuadratureSpec::default();
        if let Some(v) = self.abs_tol {
            spec.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            spec.rel_tol = v;
        }
        if let Some(v) = self.max_depth {
            spec.max_depth = v;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the named test functions and their parameters
    ListCorpus,
    /// Evaluate one smoothness measure
    Measure(MeasureArgs),
    /// L_p error of a sampling operator over a list of indices
    ApproxError(ApproxArgs),
    /// K-functionals and the realization
    Kfunc(KfuncArgs),
    /// Empirical operator constants as JSON
    Profile(ProfileArgs),
    /// Run an experiment described by a key=value config file
    Rates(RatesArgs),
    /// Run property suites
    Verify(VerifyArgs),
    /// Regenerate the table of a worked example
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    Omega,
    Tau,
    SteklovDev,
    Combined,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long, value_enum)]
    measure: MeasureKind,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Step bound, as a decimal or `a/b`; defaults to gamma/|X| with --nodes
    #[arg(long)]
    delta: Option<String>,
    /// `lagrange:<n>`, `dyadic:<j>`, `uniform:<n>` or explicit `a/b` points
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long, default_value_t = 48)]
    h_grid_size: usize,
    #[arg(long, default_value_t = 16)]
    window_grid_size: usize,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    op: String,
    /// Indices, e.g. `8,16,32` or `4..7`
    #[arg(long)]
    n: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Classical,
    SemiDiscrete,
    Realization,
}

#[derive(Args)]
struct KfuncArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long, value_enum)]
    variant: Variant,
    #[arg(long, default_value = "lagrange")]
    op: String,
    #[arg(long)]
    n: String,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    op: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value = "4,8,16,32")]
    indices: String,
}

#[derive(Args)]
struct RatesArgs {
    /// Config file with `key = value` lines
    #[arg(long)]
    config: PathBuf,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, num_args = 1.., default_values_t = [7u64])]
    seed: Vec<u64>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long)]
    example: String,
    #[arg(long)]
    json: bool,
    /// Also write the table as CSV here
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_delta(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>()? / b.trim().parse::<f64>()?,
        None => s.trim().parse::<f64>()?,
    };
    if !(v > 0.0) {
        bail!("delta must be positive, got {s}");
    }
    Ok(v)
}

fn parse_nodes(s: &str) -> Result<NodeSet> {
    let set = match s.split_once(':') {
        Some(("lagrange", n)) => lagrange_nodes(n.trim().parse()?)?,
        Some(("dyadic", j)) => dyadic_nodes(j.trim().parse()?)?,
        Some(("uniform", n)) => uniform_nodes(n.trim().parse()?)?,
        _ => s.parse()?,
    };
    Ok(set)
}

fn csv_line(out: &mut impl Write, fields: &[String]) -> Result<()> {
    let mut w = csv_writer();
    w.write_record(fields)?;
    out.write_all(&w.into_inner()?)?;
    Ok(())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn run_measure(a: &MeasureArgs, spec: &QuadratureSpec) -> Result<()> {
    let f = parse_corpus_id(&a.function)?.build()?;
    let nodes = a.nodes.as_deref().map(parse_nodes).transpose()?;
    let delta = match (&a.delta, &nodes) {
        (Some(d), _) => parse_delta(d)?,
        (None, Some(x)) => x.gamma() / x.len() as f64,
        (None, None) => bail!("either --delta or --nodes is required"),
    };
    let params = SmoothnessParams::new(a.r, a.s, a.p, delta)?
        .with_grids(a.h_grid_size, a.window_grid_size)
        .with_quadrature(*spec);
    let (name, value, error, extra) = match a.measure {
        MeasureKind::Omega => {
            let m = omega(&f, &params)?;
            ("omega", m.value, m.error, m.argmax.map(|h| h.to_string()).unwrap_or_default())
        }
        MeasureKind::Tau => {
            let m = tau(&f, &params)?;
            ("tau", m.value, m.error, m.argmax.map(|h| h.to_string()).unwrap_or_default())
        }
        MeasureKind::SteklovDev => match &nodes {
            Some(x) => {
                let e = steklov_node_deviation(&f, x, delta, a.r, a.p, spec)?;
                ("steklov_node_deviation", e.value, e.error, String::new())
            }
            None => {
                let e = steklov_deviation(&f, delta, a.r, a.p, spec)?;
                ("steklov_deviation", e.value, e.error, String::new())
            }
        },
        MeasureKind::Combined => {
            let x = nodes.as_ref().context("combined needs --nodes")?;
            let c = combined_modulus_with(&f, x, &params, delta)?;
            ("combined", c.total, c.error, format!("node={};omega={}", c.node_term, c.omega_term))
        }
    };
    let mut out = io::stdout().lock();
    csv_line(
        &mut out,
        &["fn", "measure", "r", "s", "p", "delta", "nodes", "value", "error_estimate", "h_grid_size", "detail"].map(String::from),
    )?;
    csv_line(
        &mut out,
        &[
            a.function.clone(),
            name.to_string(),
            a.r.to_string(),
            a.s.to_string(),
            a.p.to_string(),
            delta.to_string(),
            nodes.map(|x| x.len().to_string()).unwrap_or_default(),
            value.to_string(),
            error.to_string(),
            a.h_grid_size.to_string(),
            extra,
        ],
    )?;
    Ok(())
}

fn run_approx(a: &ApproxArgs, spec: &QuadratureSpec) -> Result<()> {
    let f = parse_corpus_id(&a.function)?.build()?;
    let op: SamplingOperator = a.op.parse()?;
    let mut out = io::stdout().lock();
    csv_line(&mut out, &["op", "fn", "n", "p", "error", "quadrature_error"].map(String::from))?;
    for n in parse_index_list(&a.n)? {
        let e = approx_error(&f, &op, n, a.p, spec).with_context(|| format!("{} at n = {n}", a.op))?;
        csv_line(
            &mut out,
            &[op.to_string(), a.function.clone(), n.to_string(), a.p.to_string(), e.value.to_string(), e.error.to_string()],
        )?;
    }
    Ok(())
}

fn run_kfunc(a: &KfuncArgs, spec: &QuadratureSpec) -> Result<()> {
    let f = parse_corpus_id(&a.function)?.build()?;
    let op: SamplingOperator = a.op.parse()?;
    let mut out = io::stdout().lock();
    csv_line(&mut out, &["fn", "variant", "op", "n", "s", "p", "value", "error", "argmin"].map(String::from))?;
    for n in parse_index_list(&a.n)? {
        let x = op.nodes(n)?;
        let delta = 1.0 / x.len() as f64;
        let (name, value, error, argmin) = match a.variant {
            Variant::Classical => {
                let k = CandidateFamily::for_delta(&f, delta, spec)?.k_functional(a.s, delta, a.p, spec)?;
                ("classical", k.value, k.error, k.argmin)
            }
            Variant::SemiDiscrete => {
                let k = CandidateFamily::for_delta(&f, delta, spec)?.semi_discrete_k(&x, a.s, a.p, spec)?;
                ("semi-discrete", k.value, k.error, k.argmin)
            }
            Variant::Realization => {
                let e = realization(&f, &op, n, a.s, a.p, spec)?;
                ("realization", e.value, e.error, String::new())
            }
        };
        csv_line(
            &mut out,
            &[
                a.function.clone(),
                name.to_string(),
                op.to_string(),
                n.to_string(),
                a.s.to_string(),
                a.p.to_string(),
                value.to_string(),
                error.to_string(),
                argmin,
            ],
        )?;
    }
    Ok(())
}

fn run_profile(a: &ProfileArgs, spec: &QuadratureSpec) -> Result<bool> {
    let op: SamplingOperator = a.op.parse()?;
    let cfg = ProfileConfig {
        indices: parse_index_list(&a.indices)?,
        trials: a.trials,
        quadrature: *spec,
        ..ProfileConfig::default()
    };
    let prof = estimate_operator_constants(&op, a.p, a.s, a.seed, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&prof)?);
    Ok(prof.mz_violations == 0)
}

fn emit(report: &Report, json: bool, output: Option<&PathBuf>) -> Result<()> {
    let table = if json { report.to_json()? } else { report.to_csv()? };
    match output {
        Some(path) => fs::write(path, &table).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{table}"),
    }
    Ok(())
}

fn print_checks(report: &Report) {
    for c in &report.checks {
        eprintln!("{c}");
    }
}

fn run_rates(a: &RatesArgs, spec: &QuadratureSpec, overridden: bool) -> Result<bool> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut cfg: ExperimentConfig = text.parse()?;
    if overridden {
        cfg.quadrature = *spec;
    }
    let report = run_experiment(&cfg)?;
    let json = a.json || cfg.format == OutputFormat::Json;
    let output = a.output.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from));
    emit(&report, json, output.as_ref())?;
    if !json && !report.fits.is_empty() {
        eprint!("{}", report.fits_csv()?);
    }
    Ok(true)
}

fn run_verify(a: &VerifyArgs) -> Result<bool> {
    let suites: Vec<Suite> = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse()?] };
    let mut ok = true;
    for suite in suites {
        for &seed in &a.seed {
            let r = verify_suite(suite.name(), seed)?;
            println!("{} {r}", if r.passed() { "PASS" } else { "FAIL" });
            for c in r.failures() {
                println!("    {c}");
            }
            ok &= r.passed();
        }
    }
    Ok(ok)
}

fn run_reproduce(a: &ReproduceArgs) -> Result<bool> {
    let ex: Example = a.example.parse()?;
    let report = ex.reproduce()?;
    if a.json {
        println!("{}", report.to_json()?);
    } else {
        print!("{}", report.to_csv()?);
        if !report.fits.is_empty() {
            print!("{}", report.fits_csv()?);
        }
    }
    if let Some(path) = &a.output {
        fs::write(path, report.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }
    print_checks(&report);
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    let spec = cli.quad.spec()?;
    let overridden = cli.quad.abs_tol.is_some() || cli.quad.rel_tol.is_some() || cli.quad.max_depth.is_some();
    match &cli.command {
        Command::ListCorpus => {
            for (name, desc) in list_corpus() {
                println!("{name:<32} {desc}");
            }
            Ok(true)
        }
        Command::Measure(a) => run_measure(a, &spec).map(|_| true),
        Command::ApproxError(a) => run_approx(a, &spec).map(|_| true),
        Command::Kfunc(a) => run_kfunc(a, &spec).map(|_| true),
        Command::Profile(a) => run_profile(a, &spec),
        Command::Rates(a) => run_rates(a, &spec, overridden),
        Command::Verify(a) => run_verify(a),
        Command::Reproduce(a) => run_reproduce(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
