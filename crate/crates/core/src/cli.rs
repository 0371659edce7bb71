//! The `bls` command line.
//!
//! ```text
//! bls [--config FILE] [--lambda L] [--dist SPEC] [--seed N] [--out FILE] [--format json|csv] <command>
//!
//!   dim         Δ(β) and Δ_w(β) over a β grid
//!   corr        plane correlator of the given points
//!   halfplane   upper-half-plane correlator of the given points
//!   blocks      three-point coefficient products from the 4-point function
//!   identities  crossing, Möbius, λ-power, reduction and factorization checks
//!   mc          Monte Carlo loop weights and one-point functions
//! ```
//!
//! Exit codes: 0 success, 2 usage, 3 numerical accuracy (including failed
//! identities), 4 inconclusive Monte Carlo.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::blocks::{closed_form_c, extract_coefficients, BlockLabel};
use crate::charfn::{delta_layering, delta_winding, Dimensions, MarkDistribution};
use crate::correlators::{evaluate, ChargedPoint, CorrelatorConfig, Domain};
use crate::identities::{run_identities, IdentityOptions};
use crate::io::{json_record, num, McEstimator, McSpec, PointSpec, RunConfig, Sweep, Table};
use crate::mc::{survey, EstimatorResult, SurveyConfig, SurveyResult, VertexKind};
use crate::special::MU_REFERENCE;
use crate::{Complex64, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;
pub const EXIT_MC: i32 = 4;

const DEFAULT_PMAX: usize = 4;
const DEFAULT_WINDING_TOL: f64 = 1e-10;
/// Shift of `μ` used by `identities --inject-fault`.
pub const FAULT_SHIFT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "bls", version, about = "Brownian loop soup with random marks")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Mark distribution: `bernoulli`, `gaussian:σ`, `unit-vector:d`,
    /// `lattice:b:n=p,...` or a JSON record.
    #[arg(long, global = true)]
    pub dist: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct PointArgs {
    /// Insertion `re,im,beta`; repeat for each point.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<PointSpec>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Layering and winding dimensions over a β grid.
    Dim {
        #[arg(long, allow_hyphen_values = true)]
        beta_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Absolute accuracy of Δ_w.
        #[arg(long, default_value_t = DEFAULT_WINDING_TOL)]
        tol: f64,
    },
    /// Plane correlator (2, 3 or 4 points).
    Corr(PointArgs),
    /// Upper-half-plane correlator (1 or 2 points).
    Halfplane(PointArgs),
    /// Coefficient products of the 4-point block expansion.
    Blocks {
        #[command(flatten)]
        points: PointArgs,
        #[arg(long)]
        pmax: Option<usize>,
    },
    /// Identity self-checks; exit code 3 if any fails.
    Identities {
        /// Perturb μ by 1e-3 in the crossing checks.
        #[arg(long)]
        inject_fault: bool,
        /// Random configurations per check.
        #[arg(long, default_value_t = 100)]
        configs: usize,
    },
    /// Monte Carlo estimate compared with its analytic target.
    Mc(McArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct McArgs {
    /// alpha, winding, vertex-layering or vertex-winding.
    #[arg(long, value_parser = parse_enum::<McEstimator>)]
    pub estimator: Option<McEstimator>,
    /// Observation point `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Segments per loop (power of two ≥ 64).
    #[arg(long)]
    pub segments: Option<usize>,
    #[arg(long)]
    pub soups: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Flood-fill cell size in units of delta.
    #[arg(long)]
    pub grid_factor: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// refined or polygon.
    #[arg(long, value_parser = parse_enum::<crate::mc::WindingMode>)]
    pub winding_mode: Option<crate::mc::WindingMode>,
    /// levy or random-walk.
    #[arg(long, value_parser = parse_enum::<crate::mc::BridgeMethod>)]
    pub bridge: Option<crate::mc::BridgeMethod>,
    /// Rerun with the duration range widened 4× and report the shift.
    #[arg(long)]
    pub bias_check: bool,
    /// CSV of per-batch partial sums.
    #[arg(long)]
    pub partials: Option<PathBuf>,
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::AccuracyNotReached { .. }
        | Error::NotConverged { .. }
        | Error::DegenerateGram { .. }
        | Error::DegenerateExchange { .. }
        | Error::Singularity { .. } => EXIT_ACCURACY,
        Error::IndeterminateEnclosure { .. } => EXIT_MC,
        _ => EXIT_USAGE,
    }
}

/// Text to emit and the exit code of a completed command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, code: EXIT_OK, message: None }
    }
}

struct Ctx {
    config: RunConfig,
    lambda: f64,
    dist: MarkDistribution,
    seed: u64,
    format: Format,
}

impl Ctx {
    fn emit<T: Serialize>(&self, command: &str, result: &T, table: impl FnOnce() -> Table) -> Result<String> {
        match self.format {
            Format::Json => json_record(command, &self.config, result),
            Format::Csv => Ok(table().to_csv(command)),
        }
    }

    fn correlator(&self, domain: Domain) -> Result<CorrelatorConfig> {
        let points: Vec<ChargedPoint> = self.config.points.iter().map(|&p| p.into()).collect();
        if points.is_empty() {
            return Err(Error::InvalidArgument("no points given (use --point re,im,beta)".into()));
        }
        CorrelatorConfig::new(self.lambda, self.dist.clone(), points, domain)
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(l) = cli.lambda {
        cfg.lambda = Some(l);
    }
    if let Some(d) = &cli.dist {
        cfg.distribution = Some(d.parse()?);
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    cfg.lambda.get_or_insert(1.0);
    cfg.distribution.get_or_insert(MarkDistribution::Bernoulli);
    cfg.seed.get_or_insert(0);
    match &cli.command {
        Command::Dim { beta_min, beta_max, steps, .. } => {
            let s = cfg.sweep.get_or_insert_with(Sweep::default);
            s.beta_min = beta_min.unwrap_or(s.beta_min);
            s.beta_max = beta_max.unwrap_or(s.beta_max);
            s.steps = steps.unwrap_or(s.steps);
        }
        Command::Corr(p) | Command::Halfplane(p) => {
            if !p.points.is_empty() {
                cfg.points = p.points.clone();
            }
            cfg.domain = Some(match cli.command {
                Command::Halfplane(_) => Domain::UpperHalfPlane,
                _ => Domain::Plane,
            });
        }
        Command::Blocks { points, pmax } => {
            if !points.points.is_empty() {
                cfg.points = points.points.clone();
            }
            cfg.domain = Some(Domain::Plane);
            cfg.pmax = Some(pmax.or(cfg.pmax).unwrap_or(DEFAULT_PMAX));
        }
        Command::Identities { .. } => {}
        Command::Mc(a) => {
            let m = cfg.mc.get_or_insert_with(McSpec::default);
            if let Some(z) = &a.z {
                let parts: Vec<f64> = z
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("bad point '{z}', expected re,im")))?;
                let [re, im] = parts[..] else {
                    return Err(Error::Parse(format!("bad point '{z}', expected re,im")));
                };
                m.z = [re, im];
            }
            macro_rules! set {
                ($($field:ident <- $flag:ident),*) => { $(if let Some(v) = a.$flag { m.$field = v; })* };
            }
            set!(estimator <- estimator, delta <- delta, r <- r, segments <- segments, n_soups <- soups,
                 batch_size <- batch, k <- k, grid_factor <- grid_factor, beta <- beta, winding_mode <- winding_mode, bridge <- bridge);
            m.bias_check |= a.bias_check;
        }
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct DimRow {
    beta: f64,
    delta: f64,
    delta_w: f64,
}

fn cmd_dim(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let sweep = ctx.config.sweep.unwrap_or_default();
    let rows = sweep
        .values()?
        .into_iter()
        .map(|beta| {
            Ok(DimRow {
                beta,
                delta: delta_layering(ctx.lambda, &ctx.dist, beta)?,
                delta_w: delta_winding(ctx.lambda, &ctx.dist, beta, tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let central_charge = 2.0 * ctx.lambda;
    let out =
        ctx.emit("dim", &serde_json::json!({ "central_charge": central_charge, "rows": rows }), || {
            let mut t = Table::new(&["beta", "delta", "delta_w"]);
            rows.iter().for_each(|r| t.push([num(r.beta), num(r.delta), num(r.delta_w)]));
            t
        })?;
    Ok(Outcome::ok(out))
}

fn cmd_correlator(ctx: &Ctx, domain: Domain, name: &str) -> Result<Outcome> {
    let value = evaluate(&ctx.correlator(domain)?)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let out = ctx.emit(name, &value, || {
        let mut t = Table::new(&["value", "vanishes", "x_re", "x_im", "a_of_x", "sigma"]);
        let d = &value.diagnostics;
        t.push([
            num(value.value),
            value.vanishes().to_string(),
            opt(d.x.map(|x| x.re)),
            opt(d.x.map(|x| x.im)),
            opt(d.a),
            opt(d.sigma),
        ]);
        t
    })?;
    Ok(Outcome::ok(out))
}

#[derive(Serialize)]
struct ClosedForm {
    p: usize,
    p_bar: usize,
    extracted: f64,
    closed_form: f64,
}

fn cmd_blocks(ctx: &Ctx) -> Result<Outcome> {
    let cfg = ctx.correlator(Domain::Plane)?;
    let table = extract_coefficients(&cfg, ctx.config.pmax.unwrap_or(DEFAULT_PMAX))?;
    let closed: Vec<ClosedForm> = table
        .entries
        .iter()
        .filter_map(|e| {
            closed_form_c(BlockLabel { p: e.p, p_bar: e.p_bar }, &cfg).ok().map(|c| ClosedForm {
                p: e.p,
                p_bar: e.p_bar,
                extracted: e.coeff,
                closed_form: c,
            })
        })
        .collect();
    let out = match ctx.format {
        Format::Json => json_record(
            "blocks",
            &ctx.config,
            &serde_json::json!({ "table": table, "closed_forms": closed }),
        )?,
        Format::Csv => format!("# schema: {} blocks\n{}", crate::io::SCHEMA, table.to_csv()),
    };
    Ok(Outcome::ok(out))
}

fn cmd_identities(ctx: &Ctx, inject_fault: bool, configs: usize) -> Result<Outcome> {
    let opts = IdentityOptions {
        seed: ctx.seed,
        mu: MU_REFERENCE + if inject_fault { FAULT_SHIFT } else { 0.0 },
        configs,
    };
    let checks = run_identities(&opts)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let out = ctx.emit(
        "identities",
        &serde_json::json!({ "all_passed": failed.is_empty(), "injected_fault": inject_fault, "checks": checks }),
        || {
            let mut t = Table::new(&["name", "max_deviation", "tolerance", "samples", "passed"]);
            for c in &checks {
                t.push([
                    c.name.clone(),
                    num(c.max_deviation),
                    num(c.tolerance),
                    c.samples.to_string(),
                    c.passed.to_string(),
                ]);
            }
            t
        },
    )?;
    Ok(Outcome {
        output: out,
        code: if failed.is_empty() { EXIT_OK } else { EXIT_ACCURACY },
        message: (!failed.is_empty()).then(|| format!("failed identities: {}", failed.join("; "))),
    })
}

fn mc_target(ctx: &Ctx, spec: &McSpec) -> Result<f64> {
    let log_ratio = (spec.r / spec.delta).ln();
    Ok(match spec.estimator {
        McEstimator::Alpha => 0.2 * log_ratio,
        McEstimator::Winding => log_ratio / (2.0 * PI * PI * (spec.k * spec.k) as f64),
        McEstimator::VertexLayering => {
            (-2.0 * Dimensions::compute(ctx.lambda, &ctx.dist, spec.beta)?.delta * log_ratio).exp()
        }
        McEstimator::VertexWinding => {
            (-2.0 * delta_winding(ctx.lambda, &ctx.dist, spec.beta, DEFAULT_WINDING_TOL)? * log_ratio).exp()
        }
    })
}

fn mc_estimate(spec: &McSpec, s: &SurveyResult) -> Result<EstimatorResult> {
    match spec.estimator {
        McEstimator::Alpha => s.alpha(),
        McEstimator::Winding => s.winding_weight(spec.k),
        McEstimator::VertexLayering => s.vertex(VertexKind::Layering, spec.beta),
        McEstimator::VertexWinding => s.vertex(VertexKind::Winding, spec.beta),
    }
}

fn cmd_mc(ctx: &Ctx, partials: Option<&PathBuf>) -> Result<Outcome> {
    let spec = ctx.config.mc.clone().unwrap_or_default();
    let survey_cfg = SurveyConfig {
        z: Complex64::new(spec.z[0], spec.z[1]),
        segments: spec.segments,
        n_soups: spec.n_soups,
        seed: ctx.seed,
        batch_size: spec.batch_size,
        grid_factor: spec.grid_factor,
        bridge: spec.bridge,
        winding: spec.winding_mode,
        layering: matches!(spec.estimator, McEstimator::Alpha | McEstimator::VertexLayering),
        dist: ctx.dist.clone(),
        max_winding: spec.k.abs().max(1),
        ..SurveyConfig::new(ctx.lambda, spec.delta, spec.r)
    };
    let target = mc_target(ctx, &spec)?;
    let result = survey(&survey_cfg)?;
    let est = mc_estimate(&spec, &result)?;
    let widened =
        if spec.bias_check { Some(mc_estimate(&spec, &survey(&survey_cfg.widened(4.0))?)?) } else { None };
    if let Some(path) = partials {
        let f = |o: &crate::mc::SoupObservation| match spec.estimator {
            McEstimator::Alpha => o.layer_count as f64 / ctx.lambda,
            McEstimator::Winding => {
                o.winding_counts[(spec.k + survey_cfg.max_winding) as usize] as f64 / ctx.lambda
            }
            McEstimator::VertexLayering => (spec.beta * o.layer_charge).cos(),
            McEstimator::VertexWinding => (spec.beta * o.winding_charge).cos(),
        };
        let mut t = Table::new(&["batch", "n", "mean", "m2"]);
        for (i, w) in result.batch_partials(f).iter().enumerate() {
            t.push([i.to_string(), w.n.to_string(), num(w.mean), num(w.m2)]);
        }
        std::fs::write(path, t.to_csv("mc-partials"))?;
    }
    let z_score = est.z_score(target);
    let report = serde_json::json!({
        "estimator": spec.estimator,
        "estimate": est.mean,
        "stderr": est.stderr,
        "n": est.n_samples,
        "target": target,
        "z_score": z_score,
        "bias_notes": est.bias_notes,
        "stats": result.stats,
        "widened_duration_estimate": widened.as_ref().map(|w| w.mean),
    });
    let out = ctx.emit("mc", &report, || {
        let mut t = Table::new(&["estimate", "stderr", "n", "target", "z_score"]);
        t.push([num(est.mean), num(est.stderr), est.n_samples.to_string(), num(target), num(z_score)]);
        t
    })?;
    Ok(Outcome::ok(out))
}

/// Runs a parsed command line without writing anything.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let config = resolve(cli)?;
    let ctx = Ctx {
        lambda: config.lambda.unwrap_or(1.0),
        dist: config.distribution.clone().unwrap_or(MarkDistribution::Bernoulli),
        seed: config.seed.unwrap_or(0),
        format: cli.format,
        config,
    };
    if !(ctx.lambda > 0.0 && ctx.lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("intensity must be > 0, got {}", ctx.lambda)));
    }
    match &cli.command {
        Command::Dim { tol, .. } => cmd_dim(&ctx, *tol),
        Command::Corr(_) => cmd_correlator(&ctx, Domain::Plane, "corr"),
        Command::Halfplane(_) => cmd_correlator(&ctx, Domain::UpperHalfPlane, "halfplane"),
        Command::Blocks { .. } => cmd_blocks(&ctx),
        Command::Identities { inject_fault, configs } => cmd_identities(&ctx, *inject_fault, *configs),
        Command::Mc(a) => cmd_mc(&ctx, a.partials.as_ref()),
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::IndeterminateEnclosure { .. } = e {
                eprintln!("hint: lower --grid-factor (flood-fill cell size in units of delta)");
            }
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => {
            print!("{}", outcome.output);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if let Some(m) = &outcome.message {
        eprintln!("{m}");
    }
    outcome.code
}
