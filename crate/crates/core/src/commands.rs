//! The five commands of the `unitri` binary, kept in the library so they can
//! be driven and tested without spawning a process.

use std::f64::consts::{E, FRAC_PI_2, LN_2, PI, SQRT_2};
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::io::{render, write_with_metadata, Format, RunMetadata, Table};
use crate::lognormal::{
    general_w_density, lognormal_density, sqrt_sum_density, sum_reciprocal_density, LognormalParams, DEFAULT_KAPPA,
    DEFAULT_PARAMS, RIGHT_SIDE_PARAMS, SQRT_3,
};
use crate::models::{
    arbitrary_a_density, arbitrary_mean_c, arbitrary_moments, isosceles_side_density, right_angle_density, ModelKind,
    Sampler,
};
use crate::montecarlo::{mean_estimate, pearson, run_batch_with, BatchOptions, Estimate, Execution, SampleBatch};
use crate::quadrature::{integrate, moment_of_density, QuadratureSpec, Transform};
use crate::triangle::{sigma_surface_mesh, BranchChoice, MeshSpec, FOURTH_ROOT_3};
use crate::verify::{constants, render_report, run_all, VerifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Density,
    Moments,
    Surface,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Density => "density",
            Command::Moments => "moments",
            Command::Surface => "surface",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    RightAngle,
    IsoscelesSide,
    ArbitraryA,
    SumReciprocal,
    SqrtSum,
    GeneralW,
}

impl DensityKind {
    /// Plotting window used when no `--range` is given.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            DensityKind::RightAngle => (0.0, FRAC_PI_2),
            DensityKind::IsoscelesSide | DensityKind::SqrtSum | DensityKind::GeneralW => (SQRT_2, 10.0),
            DensityKind::ArbitraryA => (0.0, 10.0),
            DensityKind::SumReciprocal => (2.0, 12.0),
        }
    }

    fn takes_params(self) -> bool {
        matches!(
            self,
            DensityKind::SumReciprocal | DensityKind::SqrtSum | DensityKind::GeneralW
        )
    }

    pub fn build(self, kappa: Option<f64>, mu: Option<f64>, sigma: Option<f64>) -> Result<DensityFn> {
        if !self.takes_params() && (mu.is_some() || sigma.is_some()) {
            return Err(Error::InvalidArgument(
                "--mu and --sigma apply only to sum-reciprocal, sqrt-sum and general-w".into(),
            ));
        }
        if self != DensityKind::GeneralW && kappa.is_some() {
            return Err(Error::InvalidArgument("--kappa applies only to general-w".into()));
        }
        let p = LognormalParams::new(
            mu.unwrap_or(DEFAULT_PARAMS.mu()),
            sigma.unwrap_or(DEFAULT_PARAMS.sigma()),
        )?;
        Ok(match self {
            DensityKind::RightAngle => right_angle_density(),
            DensityKind::IsoscelesSide => isosceles_side_density(),
            DensityKind::ArbitraryA => arbitrary_a_density(),
            DensityKind::SumReciprocal => sum_reciprocal_density(p),
            DensityKind::SqrtSum => sqrt_sum_density(p),
            DensityKind::GeneralW => general_w_density(kappa.unwrap_or(DEFAULT_KAPPA), p)?,
        })
    }
}

/// Everything a command reads; serialized into the metadata sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub model: Option<ModelKind>,
    pub which: Option<DensityKind>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub range: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub quick: bool,
    pub workers: Option<usize>,
    pub force: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<u8>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            model: None,
            which: None,
            n: None,
            seed: None,
            kappa: None,
            mu: None,
            sigma: None,
            range: None,
            points: None,
            out: None,
            format: Format::Csv,
            quick: false,
            workers: None,
            force: false,
            fault: None,
        }
    }

    fn execution(&self) -> Execution {
        Execution::from_workers(self.workers)
    }
}

/// Parse `LO:HI`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidArgument(format!("range must look like LO:HI, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("range needs LO < HI, got {lo}:{hi}")));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    VerificationFailed,
    NonConvergence,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::VerificationFailed => 1,
            Status::NonConvergence => 3,
        }
    }
}

/// Exit code for a command that stopped with an error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence(_) | Error::NonFiniteIntegrand { .. } => 3,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    /// Data or report for standard output.
    pub stdout: Vec<u8>,
    /// Lines for standard error: warnings, and the run metadata when no
    /// output file received it.
    pub stderr: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Sample => cmd_sample(cfg),
        Command::Density => cmd_density(cfg),
        Command::Moments => cmd_moments(cfg),
        Command::Surface => cmd_surface(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

fn metadata(cfg: &RunConfig, warnings: Vec<String>) -> Result<RunMetadata> {
    Ok(RunMetadata {
        command: cfg.command.name().to_string(),
        version: crate::VERSION.to_string(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg)?,
        warnings,
    })
}

/// Send `data` to `--out` (with its sidecar) or to standard output.
fn emit(cfg: &RunConfig, data: Vec<u8>, warnings: Vec<String>, status: Status) -> Result<Outcome> {
    let meta = metadata(cfg, warnings.clone())?;
    let mut stderr: Vec<String> = warnings.iter().map(|w| format!("warning: {w}")).collect();
    match &cfg.out {
        Some(path) => {
            write_with_metadata(path, &data, &meta, cfg.force)?;
            Ok(Outcome {
                status,
                stdout: Vec::new(),
                stderr,
            })
        }
        None => {
            stderr.push(serde_json::to_string(&meta)?);
            Ok(Outcome {
                status,
                stdout: data,
                stderr,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// sample

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRequest {
    pub model: ModelKind,
    pub seed: u64,
    pub n: usize,
    pub sigma: Option<f64>,
    pub mu: Option<f64>,
    pub execution: Execution,
    pub format: Format,
}

fn sampler_for(model: ModelKind, sigma: Option<f64>, mu: Option<f64>) -> Result<Sampler> {
    let lognormal = matches!(model, ModelKind::Right | ModelKind::Isosceles | ModelKind::Arbitrary);
    if !lognormal && (sigma.is_some() || mu.is_some()) {
        return Err(Error::InvalidArgument(format!(
            "--mu and --sigma do not apply to {model}"
        )));
    }
    if model == ModelKind::Arbitrary && mu.is_some() {
        return Err(Error::InvalidArgument(
            "--mu does not apply to arbitrary: its shift is fixed by ab >= 2".into(),
        ));
    }
    let s = Sampler::new(sigma.unwrap_or(1.0))?;
    match mu {
        Some(m) => s.with_mu(m),
        None => Ok(s),
    }
}

/// Draw a batch and serialize it.
pub fn render_sample(req: &SampleRequest) -> Result<(Vec<u8>, SampleBatch)> {
    let opts = BatchOptions {
        sampler: sampler_for(req.model, req.sigma, req.mu)?,
        execution: req.execution,
    };
    let batch = run_batch_with(req.model, req.seed, req.n, &opts)?;
    let bytes = render(&Table::from(&batch), req.format)?;
    Ok((bytes, batch))
}

fn cmd_sample(cfg: &RunConfig) -> Result<Outcome> {
    let model = cfg
        .model
        .ok_or_else(|| Error::InvalidArgument("sample needs --model".into()))?;
    let seed = cfg
        .seed
        .ok_or_else(|| Error::InvalidArgument("sample needs --seed; draws are never seeded from the clock".into()))?;
    let req = SampleRequest {
        model,
        seed,
        n: cfg.n.unwrap_or(1000),
        sigma: cfg.sigma,
        mu: cfg.mu,
        execution: cfg.execution(),
        format: cfg.format,
    };
    let (bytes, batch) = render_sample(&req)?;
    let mut warnings = Vec::new();
    if model.rejects() {
        warnings.push(format!("{} of {} draws accepted", batch.accepted, batch.count));
    }
    emit(cfg, bytes, warnings, Status::Success)
}

// ---------------------------------------------------------------------------
// density

/// `(x, pdf(x))` on `points` equally spaced abscissae, with the window
/// clipped to the support. Returns the table and any clipping warnings.
pub fn density_curve(
    which: DensityKind,
    kappa: Option<f64>,
    mu: Option<f64>,
    sigma: Option<f64>,
    range: Option<(f64, f64)>,
    points: usize,
) -> Result<(Table, Vec<String>)> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!(
            "--points must be at least 2, got {points}"
        )));
    }
    let d = which.build(kappa, mu, sigma)?;
    let (s_lo, s_hi) = d.support();
    let (mut lo, mut hi) = range.unwrap_or(which.default_range());
    let mut warnings = Vec::new();
    if lo < s_lo {
        warnings.push(format!(
            "range start {lo} is below the support of {}; clipped to {s_lo}",
            d.name()
        ));
        lo = s_lo;
    }
    if hi > s_hi {
        warnings.push(format!(
            "range end {hi} is above the support of {}; clipped to {s_hi}",
            d.name()
        ));
        hi = s_hi;
    }
    if !(lo < hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "range does not meet the support ({s_lo}, {s_hi}) of {}",
            d.name()
        )));
    }
    let mut t = Table::new(["x", "pdf"]);
    let step = (hi - lo) / (points - 1) as f64;
    for i in 0..points {
        let x = if i == points - 1 { hi } else { lo + step * i as f64 };
        t.push_row(&[x, d.eval(x)]);
    }
    Ok((t, warnings))
}

fn cmd_density(cfg: &RunConfig) -> Result<Outcome> {
    let which = cfg
        .which
        .ok_or_else(|| Error::InvalidArgument("density needs --which".into()))?;
    let (table, warnings) = density_curve(
        which,
        cfg.kappa,
        cfg.mu,
        cfg.sigma,
        cfg.range,
        cfg.points.unwrap_or(1000),
    )?;
    emit(cfg, render(&table, cfg.format)?, warnings, Status::Success)
}

// ---------------------------------------------------------------------------
// surface

/// Unit-area surface over `[lo, hi]²` with `points` nodes per axis.
///
/// Columns: `a, b, c`, `branch` (−1, +1, or 0 on `ab = 2`) and `part`
/// (0 for the surface, 1 for the curve `ab = 2` where it meets the
/// cylinder).
pub fn surface_table(lo: f64, hi: f64, points: usize) -> Result<Table> {
    let mesh = sigma_surface_mesh(&MeshSpec::new(lo, hi, points))?;
    let mut t = Table::new(["a", "b", "c", "branch", "part"]);
    for p in &mesh {
        let branch = match p.branch {
            Some(BranchChoice::Minus) => -1.0,
            Some(BranchChoice::Plus) => 1.0,
            None => 0.0,
        };
        t.push_row(&[p.a, p.b, p.c, branch, 0.0]);
    }
    let (a0, a1) = (lo.max(2.0 / hi), hi.min(2.0 / lo));
    if a0 <= a1 {
        let m = points.max(2);
        for i in 0..m {
            let a = a0 * (a1 / a0).powf(i as f64 / (m - 1) as f64);
            let b = 2.0 / a;
            t.push_row(&[a, b, a.hypot(b), 0.0, 1.0]);
        }
    }
    Ok(t)
}

fn cmd_surface(cfg: &RunConfig) -> Result<Outcome> {
    let (lo, hi) = cfg.range.unwrap_or((0.25, 4.0));
    let table = surface_table(lo, hi, cfg.points.unwrap_or(41))?;
    emit(cfg, render(&table, cfg.format)?, Vec::new(), Status::Success)
}

// ---------------------------------------------------------------------------
// moments

/// One line of the moments report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub quantity: String,
    pub quadrature: Option<f64>,
    pub mc: Option<f64>,
    pub mc_se: Option<f64>,
    pub printed: Option<f64>,
    pub pass: bool,
    pub note: String,
}

/// How a row is judged.
#[derive(Clone, Copy)]
enum Rule {
    /// MC within `k` SE of the quadrature value; quadrature within `rel` of
    /// the printed value.
    Standard { rel: f64 },
    /// Absolute tolerances for constants printed to a few digits.
    Loose { printed_abs: f64, mc_abs: f64 },
}

struct RowBuilder {
    band: f64,
    nonconverged: bool,
    rows: Vec<MomentRow>,
}

impl RowBuilder {
    fn push(&mut self, quantity: &str, quad: Result<f64>, mc: Option<Estimate>, printed: Option<f64>, rule: Rule) {
        let mut notes = Vec::new();
        let quadrature = match quad {
            Ok(v) => Some(v),
            Err(e) => {
                if matches!(e, Error::NoConvergence(_) | Error::NonFiniteIntegrand { .. }) {
                    self.nonconverged = true;
                }
                notes.push(format!("quadrature failed: {e}"));
                None
            }
        };
        let mut pass = quadrature.is_some();
        let reference = quadrature.or(printed);
        if let (Some(q), Some(p)) = (quadrature, printed) {
            let ok = match rule {
                Rule::Standard { rel } => (q - p).abs() <= rel * p.abs(),
                Rule::Loose { printed_abs, .. } => (q - p).abs() <= printed_abs,
            };
            if !ok {
                notes.push("quadrature disagrees with printed value".into());
            }
            pass &= ok;
        }
        if let (Some(m), Some(r)) = (mc, reference) {
            let ok = match rule {
                Rule::Standard { .. } => m.within(r, self.band),
                Rule::Loose { mc_abs, .. } => (m.value - r).abs() <= mc_abs,
            };
            if !ok && m.se > 0.1 * r.abs() {
                notes.push("flagged: standard error above 10% of target".into());
            } else if !ok {
                notes.push(format!("Monte Carlo off by {:.1} SE", m.z(r)));
                pass = false;
            }
        }
        self.rows.push(MomentRow {
            quantity: quantity.to_string(),
            quadrature,
            mc: mc.map(|m| m.value),
            mc_se: mc.map(|m| m.se).filter(|se| *se > 0.0),
            printed,
            pass,
            note: notes.join("; "),
        });
    }
}

fn powers(xs: &[f64], k: i32) -> Vec<f64> {
    xs.iter().map(|x| x.powi(k)).collect()
}

fn products(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

/// Quadrature, Monte Carlo and printed values side by side.
///
/// Returns the rows and whether any quadrature failed to converge.
pub fn moments_table(model: ModelKind, seed: u64, n: usize, execution: Execution) -> Result<(Vec<MomentRow>, bool)> {
    let spec = QuadratureSpec::default();
    let batch = run_batch_with(
        model,
        seed,
        n,
        &BatchOptions {
            sampler: Sampler::default(),
            execution,
        },
    )?;
    let col = |name: &str| batch.column(name);
    let est = |xs: &[f64]| mean_estimate(xs).ok();
    let mut rb = RowBuilder {
        band: 4.0,
        nonconverged: false,
        rows: Vec::new(),
    };
    let std = Rule::Standard { rel: 1e-10 };
    match model {
        ModelKind::Right => {
            let a = col("a")?;
            let alpha = col("alpha")?;
            let side = lognormal_density(RIGHT_SIDE_PARAMS);
            let angle = right_angle_density();
            rb.push(
                "E(a)",
                moment_of_density(&side, 1, &spec),
                est(&a),
                Some((2.0 * E).sqrt()),
                std,
            );
            rb.push(
                "E(a^2)",
                moment_of_density(&side, 2, &spec),
                est(&powers(&a, 2)),
                Some(2.0 * E * E),
                std,
            );
            rb.push(
                "E(alpha)",
                moment_of_density(&angle, 1, &spec),
                est(&alpha),
                Some(constants::RIGHT_MEAN_ALPHA),
                Rule::Standard { rel: 1e-10 },
            );
            rb.push(
                "E(alpha^2)",
                moment_of_density(&angle, 2, &spec),
                est(&powers(&alpha, 2)),
                Some(constants::RIGHT_MEAN_ALPHA2),
                Rule::Standard { rel: 1e-10 },
            );
        }
        ModelKind::Isosceles => {
            let a = col("a")?;
            let c = col("c")?;
            let side = isosceles_side_density();
            let base = lognormal_density(LognormalParams::new(LN_2 - 0.25 * 3f64.ln() - 0.5, 1.0)?);
            rb.push(
                "E(a)",
                moment_of_density(&side, 1, &spec),
                est(&a),
                Some(constants::ISO_MEAN_A),
                std,
            );
            rb.push(
                "E(a^2)",
                moment_of_density(&side, 2, &spec),
                est(&powers(&a, 2)),
                Some(constants::ISO_MEAN_A2),
                Rule::Standard { rel: 1e-10 },
            );
            rb.push(
                "E(c)",
                moment_of_density(&base, 1, &spec),
                est(&c),
                Some(2.0 / FOURTH_ROOT_3),
                Rule::Standard { rel: 1e-9 },
            );
            rb.push(
                "E(c^2)",
                moment_of_density(&base, 2, &spec),
                est(&powers(&c, 2)),
                Some(4.0 * E / SQRT_3),
                Rule::Standard { rel: 1e-9 },
            );
        }
        ModelKind::Arbitrary => {
            let a = col("a")?;
            let b = col("b")?;
            let c = col("c")?;
            let m = arbitrary_moments(&spec, &QuadratureSpec::two_dimensional());
            let pick = |f: fn(&crate::models::ArbitraryMoments) -> f64| match &m {
                Ok(m) => Ok(f(m)),
                Err(e) => Err(Error::NoConvergence(e.to_string())),
            };
            rb.push("E(a)", pick(|m| m.mean_a), est(&a), Some(constants::ARB_MEAN_A), std);
            rb.push(
                "E(a^2)",
                pick(|m| m.mean_a2),
                est(&powers(&a, 2)),
                Some(constants::ARB_MEAN_A2),
                Rule::Standard { rel: 1e-10 },
            );
            rb.push(
                "E(ab)",
                pick(|m| m.mean_ab),
                est(&products(&a, &b)),
                Some(constants::ARB_MEAN_AB),
                Rule::Standard { rel: 1e-8 },
            );
            let corr = pearson(&a, &b)?;
            rb.push(
                "corr(a,b)",
                pick(|m| m.corr_ab),
                Some(Estimate { value: corr, se: 0.0 }),
                Some(constants::ARB_CORR),
                Rule::Loose {
                    printed_abs: 1e-3,
                    mc_abs: 1e-2,
                },
            );
            rb.push(
                "E(c)",
                arbitrary_mean_c(&QuadratureSpec::two_dimensional()).and_then(|r| r.require("E(c)")),
                est(&c),
                Some(constants::ARB_MEAN_C),
                Rule::Loose {
                    printed_abs: 1e-2,
                    mc_abs: 4.0 * est(&c).map_or(f64::INFINITY, |e| e.se),
                },
            );
        }
        ModelKind::StickTwice => {
            let top = SQRT_3 / 12.0;
            let acc = batch.acceptance();
            let acceptance = Estimate {
                value: acc,
                se: (acc * (1.0 - acc) / batch.count as f64).sqrt(),
            };
            rb.push("P(accept)", stick_twice_acceptance(&spec), Some(acceptance), None, std);
            let law = |k: i32| {
                integrate(
                    |x| x.powi(k) * 96.0 * x,
                    0.0,
                    top,
                    &spec.with_transform(Transform::None),
                )
                .and_then(|r| r.require("stick-twice moment"))
            };
            rb.push("E(area)", law(1), est(&batch.values), None, std);
            rb.push("E(area^2)", law(2), est(&powers(&batch.values, 2)), None, std);
        }
        ModelKind::StickOnce => {
            let law = |k: i32| {
                integrate(|x| x.powi(k) * 4.0, 0.0, 0.25, &spec.with_transform(Transform::None))
                    .and_then(|r| r.require("stick-once moment"))
            };
            rb.push("E(area)", law(1), est(&batch.values), None, std);
            rb.push("E(area^2)", law(2), est(&powers(&batch.values, 2)), None, std);
        }
    }
    Ok((rb.rows, rb.nonconverged))
}

/// `P(√p₁, √p₂, √p₃ form a triangle)` for a stick broken at two uniform
/// points: `1 − 6∫₀^{π/2} s/(4(1+s)²) dt` with `s = ½ sin 2t`.
pub fn stick_twice_acceptance(spec: &QuadratureSpec) -> Result<f64> {
    let r = integrate(
        |t| {
            let s = 0.5 * (2.0 * t).sin();
            s / (4.0 * (1.0 + s).powi(2))
        },
        0.0,
        PI / 2.0,
        &spec.with_transform(Transform::None),
    )?
    .require("stick-twice acceptance")?;
    Ok(1.0 - 6.0 * r)
}

fn format_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.12}"))
}

pub fn render_moments_text(model: ModelKind, rows: &[MomentRow], n: usize, seed: u64) -> String {
    let mut s = format!("moments for {model}: n = {n}, seed = {seed}\n");
    let _ = writeln!(
        s,
        "{:<12} {:>18} {:>18} {:>12} {:>18}  {:<4} note",
        "quantity", "quadrature", "monte carlo", "se", "printed", "ok"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<12} {:>18} {:>18} {:>12} {:>18}  {:<4} {}",
            r.quantity,
            format_opt(r.quadrature),
            format_opt(r.mc),
            r.mc_se.map_or_else(|| "-".to_string(), |v| format!("{v:.2e}")),
            format_opt(r.printed),
            if r.pass { "pass" } else { "FAIL" },
            r.note
        );
    }
    s
}

fn moment_rows_bytes(rows: &[MomentRow], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer(&mut buf, rows)?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn cmd_moments(cfg: &RunConfig) -> Result<Outcome> {
    let model = cfg
        .model
        .ok_or_else(|| Error::InvalidArgument("moments needs --model".into()))?;
    if cfg.mu.is_some() || cfg.sigma.is_some() {
        return Err(Error::InvalidArgument(
            "moments compares against the σ = 1 laws; --mu and --sigma are not accepted".into(),
        ));
    }
    let seed = cfg.seed.unwrap_or(crate::montecarlo::DEFAULT_SEED);
    let n = cfg.n.unwrap_or(if cfg.quick { 10_000 } else { 1_000_000 });
    let (rows, nonconverged) = moments_table(model, seed, n, cfg.execution())?;
    let status = if nonconverged {
        Status::NonConvergence
    } else if rows.iter().all(|r| r.pass) {
        Status::Success
    } else {
        Status::VerificationFailed
    };
    let text = render_moments_text(model, &rows, n, seed);
    let mut cfg = cfg.clone();
    cfg.seed = Some(seed);
    cfg.n = Some(n);
    match &cfg.out {
        Some(_) => {
            let mut out = emit(&cfg, moment_rows_bytes(&rows, cfg.format)?, Vec::new(), status)?;
            out.stdout = text.into_bytes();
            Ok(out)
        }
        None => {
            let mut out = emit(&cfg, text.into_bytes(), Vec::new(), status)?;
            out.stderr.retain(|l| l.starts_with("warning"));
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let opts = VerifyOptions {
        quick: cfg.quick,
        seed: cfg.seed.unwrap_or(crate::montecarlo::DEFAULT_SEED),
        workers: cfg.workers,
        fault: cfg.fault,
    };
    let outcomes = run_all(&opts);
    let status = if outcomes.iter().all(|o| o.pass()) {
        Status::Success
    } else {
        Status::VerificationFailed
    };
    let text = render_report(&outcomes, &opts);
    if let Some(path) = &cfg.out {
        let mut cfg = cfg.clone();
        cfg.seed = Some(opts.seed);
        let mut json = serde_json::to_vec_pretty(&outcomes)?;
        json.push(b'\n');
        let meta = metadata(&cfg, Vec::new())?;
        write_with_metadata(path, &json, &meta, cfg.force)?;
    }
    Ok(Outcome {
        status,
        stdout: text.into_bytes(),
        stderr: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("0.5:2").unwrap(), (0.5, 2.0));
        assert_eq!(parse_range(" -1 : 3e0 ").unwrap(), (-1.0, 3.0));
        for bad in ["", "1", "2:1", "a:b", "1:1"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn density_defaults_and_clipping() {
        let (t, w) = density_curve(DensityKind::RightAngle, None, None, None, None, 101).unwrap();
        assert!(w.is_empty());
        let pdf = t.column("pdf").unwrap();
        assert_eq!(pdf[0], 0.0);
        assert_eq!(pdf[100], 0.0);
        let (t, w) = density_curve(DensityKind::GeneralW, Some(2.0), None, None, Some((0.0, 5.0)), 11).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(t.column("x").unwrap()[0], SQRT_2);
        assert!(density_curve(DensityKind::RightAngle, None, None, None, Some((2.0, 3.0)), 11).is_err());
        assert!(density_curve(DensityKind::RightAngle, Some(2.0), None, None, None, 11).is_err());
        assert!(density_curve(DensityKind::ArbitraryA, None, Some(0.0), None, None, 11).is_err());
        assert!(density_curve(DensityKind::SqrtSum, None, None, None, None, 1).is_err());
    }

    #[test]
    fn isosceles_side_curve_is_general_w_at_default() {
        let iso = density_curve(DensityKind::IsoscelesSide, None, None, None, None, 200)
            .unwrap()
            .0;
        let w = density_curve(DensityKind::GeneralW, Some(SQRT_3), Some(-0.5), Some(1.0), None, 200)
            .unwrap()
            .0;
        assert_eq!(iso.values, w.values);
    }

    #[test]
    fn surface_rows() {
        let t = surface_table(0.25, 4.0, 16).unwrap();
        for r in t.rows() {
            let q = crate::triangle::quartic_residual(r[0], r[1], r[2]);
            assert!(q.abs() < 1e-8, "{r:?} {q}");
        }
        assert!(t.rows().any(|r| r[4] == 1.0));
        assert!(surface_table(0.25, 4.0, 1).is_err());
    }

    #[test]
    fn acceptance_integral() {
        let p = stick_twice_acceptance(&QuadratureSpec::default()).unwrap();
        assert!((p - constants::STICK_TWICE_ACCEPTANCE).abs() < 1e-12, "{p}");
    }

    #[test]
    fn sampler_flags() {
        assert!(sampler_for(ModelKind::StickOnce, Some(1.0), None).is_err());
        assert!(sampler_for(ModelKind::Arbitrary, None, Some(0.0)).is_err());
        assert_eq!(
            sampler_for(ModelKind::Right, Some(0.5), Some(1.0)).unwrap().mu(),
            Some(1.0)
        );
    }

    #[test]
    fn sample_requires_seed() {
        let mut cfg = RunConfig::new(Command::Sample);
        cfg.model = Some(ModelKind::Right);
        let e = run(&cfg).unwrap_err();
        assert_eq!(error_code(&e), 2);
        cfg.seed = Some(7);
        cfg.n = Some(3);
        let out = run(&cfg).unwrap();
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("a,b,c,alpha\n"));
        assert!(out.stderr.iter().any(|l| l.contains("\"seed\":7")));
    }
}
