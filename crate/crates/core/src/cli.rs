//! Command-line front end. Every run produces a [`Report`] carrying the
//! resolved configuration, the applied errata and the command result; it is
//! rendered as JSON, CSV or an aligned text table.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 for invalid configuration.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::class_v::{
    coefficient_bound, distortion_bounds, envelope_constant, extremal_function, growth_bounds,
    margin_at_order, membership_margin, random_member, ClassParams,
};
use crate::closure::{
    bounded_multiplier_convolve, convolution_order, quadratic_combination, quadratic_mean_order,
    ClosureOrder,
};
use crate::error::Error;
use crate::gamma_kernel::{ln_sigma_k, sigma_k, WrightParams};
use crate::mero_series::{hadamard, BoundedMultiplier, MeroFunction};
use crate::radii::{convex_radius, numeric_radius, starlike_radius, RadiusCondition, RadiusResult};
use crate::verifier::{
    verify_distortion, verify_growth, verify_membership_analytic, verify_radius, SamplingPlan,
    VerificationReport,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_K_MAX: usize = 64;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;
pub const DEFAULT_EQUALITY_SLACK: f64 = 1e-12;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_bisection")]
    pub bisection: f64,
    #[serde(default = "default_slack")]
    pub equality_slack: f64,
}

fn default_bisection() -> f64 {
    DEFAULT_BISECTION_TOL
}

fn default_slack() -> f64 {
    DEFAULT_EQUALITY_SLACK
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bisection: DEFAULT_BISECTION_TOL,
            equality_slack: DEFAULT_EQUALITY_SLACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub coeffs: Vec<f64>,
}

/// Fully resolved run configuration; also accepted as a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub wright: WrightParams,
    pub class: ClassParams,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    pub k_max: usize,
    pub plan: SamplingPlan,
    pub tolerances: Tolerances,
    pub output: OutputFormat,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub kappa: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialClass {
    alpha: Option<f64>,
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialPlan {
    radii: Option<Vec<f64>>,
    angles: Option<usize>,
    include_real_axis_ramp: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    wright: Option<WrightParams>,
    class: Option<PartialClass>,
    function: Option<FunctionSpec>,
    k_max: Option<usize>,
    plan: Option<PartialPlan>,
    tolerances: Option<Tolerances>,
    output: Option<OutputFormat>,
    delta: Option<f64>,
    kappa: Option<f64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "mero-wright",
    version,
    about = "Meromorphic classes defined by the Wright operator"
)]
pub struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Upper parameters as `value[:weight],...` (weight defaults to 1).
    #[arg(long, global = true)]
    pub upper: Option<String>,
    /// Lower parameters as `value[:weight],...`.
    #[arg(long, global = true)]
    pub lower: Option<String>,
    /// Coefficients a_1, a_2, ... of the input function, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Bisection tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub angles: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConvolveMode {
    Hadamard,
    Quadratic,
    Bounded,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of σ_k and ln σ_k.
    Sigma {
        #[arg(long, default_value_t = 1)]
        from: usize,
        /// Defaults to k-max.
        #[arg(long)]
        to: Option<usize>,
    },
    /// Coefficient and sampled analytic membership test of the input function.
    Member,
    /// Sharp coefficient bound and the extremal function for index k.
    Extremal {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Growth and distortion envelopes at the given radii.
    Bounds {
        /// Comma separated radii; defaults to the plan radii.
        #[arg(long)]
        r: Option<String>,
    },
    /// Radii of starlikeness (order delta) and convexity (order kappa).
    Radii,
    /// Closure under Hadamard products and quadratic combinations.
    Convolve {
        #[arg(long, value_enum, default_value_t = ConvolveMode::Hadamard)]
        mode: ConvolveMode,
        /// First factor; defaults to the input function.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Second factor (the multiplier in bounded mode).
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Certificate bundle over 1/z, the k = 1 extremal, a random member and
    /// the input function.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub id: String,
    pub applied: bool,
    pub summary: String,
}

pub fn errata() -> Vec<Erratum> {
    let e = |id: &str, applied: bool, summary: &str| Erratum {
        id: id.into(),
        applied,
        summary: summary.into(),
    };
    vec![
        e(
            "E1",
            true,
            "extremal functions carry the principal part 1/z",
        ),
        e(
            "E2",
            true,
            "closure denominators are w_k C(k) - c eta^2 (1-alpha)(k+2alpha-1)",
        ),
        e(
            "E3",
            false,
            "convex radius: with the weight k sigma_k C(k) the bracket without an extra k is exact",
        ),
        e("E4", true, "coefficient weight is k sigma_k C(k)"),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub k: usize,
    /// `None` when σ_k is outside the f64 range.
    pub sigma: Option<f64>,
    pub ln_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub r: f64,
    pub growth_lower: f64,
    pub growth_upper: f64,
    pub distortion_lower: f64,
    pub distortion_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericCheck {
    pub k: usize,
    pub candidate: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    /// Whether the check counts toward the verdict (theorem hypothesis met).
    pub required: bool,
    pub pass: bool,
    #[serde(with = "crate::nonfinite")]
    pub margin: f64,
    pub report: Option<VerificationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionBundle {
    pub label: String,
    pub coeffs: Vec<f64>,
    pub member: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum CommandResult {
    Sigma {
        rows: Vec<SigmaRow>,
    },
    Member {
        coeffs: Vec<f64>,
        margin: f64,
        coefficient_pass: bool,
        analytic: VerificationReport,
    },
    Extremal {
        k: usize,
        bound: f64,
        coeffs: Vec<f64>,
    },
    Bounds {
        envelope_constant: f64,
        rows: Vec<BoundsRow>,
    },
    Radii {
        starlike: RadiusResult,
        convex: RadiusResult,
        starlike_check: NumericCheck,
        convex_check: NumericCheck,
    },
    Convolve {
        mode: ConvolveMode,
        f: Vec<f64>,
        g: Vec<f64>,
        product: Vec<f64>,
        closure: Option<ClosureOrder>,
        /// Margin of the product in V(α, aggregate order).
        order_margin: Option<f64>,
        /// Bounded mode: margins of f and of f * g in V(α, η).
        margin_before: Option<f64>,
        margin_after: Option<f64>,
    },
    Verify {
        functions: Vec<FunctionBundle>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub errata: Vec<Erratum>,
    pub pass: bool,
    pub exit_code: i32,
    pub result: CommandResult,
}

/// Failure of a run before a report exists.
#[derive(Debug)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ClassPrecondition(_) | Error::Degenerate(_) | Error::OutOfRange { .. } => {
                EXIT_FAIL
            }
            Error::InvalidParameter(_)
            | Error::Domain(_)
            | Error::Pole
            | Error::UnsupportedParameters(_) => EXIT_INVALID,
        };
        RunError {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> RunError {
    RunError {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, RunError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| invalid(format!("bad {what} entry {t:?}: {e}")))
        })
        .collect()
}

fn parse_pairs(s: &str, what: &str) -> Result<Vec<(f64, f64)>, RunError> {
    s.split(',')
        .map(|t| {
            let mut it = t.splitn(2, ':');
            let v = it.next().unwrap_or("").trim();
            let w = it.next().map(str::trim).unwrap_or("1");
            let p = |x: &str| {
                x.parse::<f64>()
                    .map_err(|e| invalid(format!("bad {what} entry {t:?}: {e}")))
            };
            Ok((p(v)?, p(w)?))
        })
        .collect()
}

fn read_partial(path: &Path) -> Result<PartialConfig, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| invalid(format!("invalid config {}: {e}", path.display())))
}

/// Merges the config file (if any) with command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, RunError> {
    let file = match &cli.config {
        Some(p) => read_partial(p)?,
        None => PartialConfig::default(),
    };
    let unit = vec![(1.0, 1.0)];
    let wright = match (&cli.upper, &cli.lower, file.wright) {
        (None, None, Some(w)) => w,
        (u, l, w) => {
            let upper = match u {
                Some(s) => parse_pairs(s, "upper")?,
                None => w.as_ref().map_or(unit.clone(), |w| w.upper().to_vec()),
            };
            let lower = match l {
                Some(s) => parse_pairs(s, "lower")?,
                None => w.as_ref().map_or(unit.clone(), |w| w.lower().to_vec()),
            };
            WrightParams::new(upper, lower)?
        }
    };
    let fc = file.class.unwrap_or_default();
    let alpha = cli
        .alpha
        .or(fc.alpha)
        .ok_or_else(|| invalid("alpha is required (--alpha or class.alpha)"))?;
    let eta = cli
        .eta
        .or(fc.eta)
        .ok_or_else(|| invalid("eta is required (--eta or class.eta)"))?;
    let class = ClassParams::new(alpha, eta)?;

    let function = match &cli.coeffs {
        Some(s) => Some(FunctionSpec {
            coeffs: parse_list(s, "coefficient")?,
        }),
        None => file.function,
    };
    if let Some(f) = &function {
        MeroFunction::new(f.coeffs.clone())?;
    }

    let k_max = cli.k_max.or(file.k_max).unwrap_or(DEFAULT_K_MAX);
    if k_max < 1 {
        return Err(invalid("k_max must be at least 1"));
    }

    let fp = file.plan.unwrap_or_default();
    let defaults = SamplingPlan::default();
    let plan = SamplingPlan::new(
        fp.radii.unwrap_or_else(|| defaults.radii().to_vec()),
        cli.angles.or(fp.angles).unwrap_or(defaults.angles()),
        fp.include_real_axis_ramp
            .unwrap_or(defaults.include_real_axis_ramp()),
    )?;

    let mut tolerances = file.tolerances.unwrap_or_default();
    if let Some(t) = cli.tol {
        tolerances.bisection = t;
    }
    if !(tolerances.bisection > 0.0 && tolerances.bisection < 0.5) {
        return Err(invalid(format!(
            "bisection tolerance must lie in (0, 0.5), got {}",
            tolerances.bisection
        )));
    }
    if !(tolerances.equality_slack >= 0.0 && tolerances.equality_slack.is_finite()) {
        return Err(invalid("equality slack must be finite and non-negative"));
    }

    let delta = cli.delta.or(file.delta).unwrap_or(0.0);
    let kappa = cli.kappa.or(file.kappa).unwrap_or(0.0);
    for (name, v) in [("delta", delta), ("kappa", kappa)] {
        if !(0.0..1.0).contains(&v) {
            return Err(invalid(format!("{name} must lie in [0, 1), got {v}")));
        }
    }

    Ok(RunConfig {
        wright,
        class,
        function,
        k_max,
        plan,
        tolerances,
        output: cli.format.or(file.output).unwrap_or_default(),
        delta,
        kappa,
    })
}

fn input_function(cfg: &RunConfig) -> Result<MeroFunction, RunError> {
    match &cfg.function {
        Some(f) => Ok(MeroFunction::new(f.coeffs.clone())?),
        None => Ok(MeroFunction::principal()),
    }
}

fn accepted(cfg: &RunConfig, margin: f64, rhs: f64) -> bool {
    margin >= -cfg.tolerances.equality_slack * rhs
}

/// Membership margin, or `None` when f has a negative coefficient.
fn member_margin(cfg: &RunConfig, f: &MeroFunction) -> Result<Option<f64>, RunError> {
    if !f.is_nonnegative() {
        return Ok(None);
    }
    Ok(Some(membership_margin(f, &cfg.class, &cfg.wright)?))
}

fn require_member(cfg: &RunConfig, f: &MeroFunction, name: &str) -> Result<(), RunError> {
    match member_margin(cfg, f)? {
        Some(m) if accepted(cfg, m, cfg.class.rhs()) => Ok(()),
        Some(m) => {
            Err(Error::ClassPrecondition(format!("{name} is not a member (margin {m})")).into())
        }
        None => Err(Error::ClassPrecondition(format!("{name} has a negative coefficient")).into()),
    }
}

fn cmd_sigma(cfg: &RunConfig, from: usize, to: usize) -> Result<(bool, CommandResult), RunError> {
    if from < 1 {
        return Err(invalid("k starts at 1"));
    }
    let mut rows = Vec::new();
    for k in from..=to {
        let ln_sigma = ln_sigma_k(&cfg.wright, k)?;
        let sigma = match sigma_k(&cfg.wright, k) {
            Ok(v) => Some(v),
            Err(Error::OutOfRange { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        rows.push(SigmaRow { k, sigma, ln_sigma });
    }
    Ok((true, CommandResult::Sigma { rows }))
}

fn cmd_member(cfg: &RunConfig) -> Result<(bool, CommandResult), RunError> {
    let f = input_function(cfg)?;
    let margin = membership_margin(&f, &cfg.class, &cfg.wright)?;
    let coefficient_pass = accepted(cfg, margin, cfg.class.rhs());
    let analytic = verify_membership_analytic(&f, &cfg.class, &cfg.wright, &cfg.plan)?;
    let pass = coefficient_pass && analytic.pass;
    Ok((
        pass,
        CommandResult::Member {
            coeffs: f.coeffs().to_vec(),
            margin,
            coefficient_pass,
            analytic,
        },
    ))
}

fn cmd_extremal(cfg: &RunConfig, k: usize) -> Result<(bool, CommandResult), RunError> {
    if k < 1 {
        return Err(invalid("k starts at 1"));
    }
    let bound = coefficient_bound(&cfg.class, &cfg.wright, k)?;
    let f = extremal_function(&cfg.class, &cfg.wright, k)?;
    Ok((
        true,
        CommandResult::Extremal {
            k,
            bound,
            coeffs: f.coeffs().to_vec(),
        },
    ))
}

fn cmd_bounds(cfg: &RunConfig, r: Option<&str>) -> Result<(bool, CommandResult), RunError> {
    let radii = match r {
        Some(s) => parse_list(s, "radius")?,
        None => cfg.plan.radii().to_vec(),
    };
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let g = growth_bounds(&cfg.class, &cfg.wright, r)?;
        let d = distortion_bounds(&cfg.class, &cfg.wright, r)?;
        rows.push(BoundsRow {
            r,
            growth_lower: g.lower,
            growth_upper: g.upper,
            distortion_lower: d.lower,
            distortion_upper: d.upper,
        });
    }
    let b = envelope_constant(&cfg.class, &cfg.wright)?;
    Ok((
        true,
        CommandResult::Bounds {
            envelope_constant: b,
            rows,
        },
    ))
}

fn numeric_check(cfg: &RunConfig, table: &RadiusResult) -> Result<NumericCheck, RunError> {
    let k = table.attained_k;
    let f = extremal_function(&cfg.class, &cfg.wright, k)?;
    let numeric = numeric_radius(
        &f,
        table.condition,
        cfg.tolerances.bisection,
        cfg.plan.angles(),
    )?;
    Ok(NumericCheck {
        k,
        candidate: table.per_k[k - 1].candidate,
        numeric,
    })
}

fn cmd_radii(cfg: &RunConfig) -> Result<(bool, CommandResult), RunError> {
    let starlike = starlike_radius(&cfg.class, &cfg.wright, cfg.delta, cfg.k_max)?;
    let convex = convex_radius(&cfg.class, &cfg.wright, cfg.kappa, cfg.k_max)?;
    let starlike_check = numeric_check(cfg, &starlike)?;
    let convex_check = numeric_check(cfg, &convex)?;
    Ok((
        true,
        CommandResult::Radii {
            starlike,
            convex,
            starlike_check,
            convex_check,
        },
    ))
}

fn cmd_convolve(
    cfg: &RunConfig,
    mode: ConvolveMode,
    f: Option<&str>,
    g: &str,
) -> Result<(bool, CommandResult), RunError> {
    let f = match f {
        Some(s) => MeroFunction::new(parse_list(s, "coefficient")?)?,
        None => input_function(cfg)?,
    };
    let g_coeffs = parse_list(g, "coefficient")?;
    let (cp, wp) = (&cfg.class, &cfg.wright);
    let alpha = cp.alpha();

    let closure_check = |product: &MeroFunction,
                         order: ClosureOrder|
     -> Result<(bool, Option<f64>, ClosureOrder), RunError> {
        match order.aggregate_value() {
            Some(v) => {
                let m = margin_at_order(product, alpha, v, wp)?;
                Ok((accepted(cfg, m, 2.0 * v * (1.0 - alpha)), Some(m), order))
            }
            // no order is guaranteed, so nothing is asserted
            None => Ok((true, None, order)),
        }
    };

    let (pass, product, closure, order_margin, margin_before, margin_after) = match mode {
        ConvolveMode::Hadamard | ConvolveMode::Quadratic => {
            let g_fn = MeroFunction::new(g_coeffs.clone())?;
            require_member(cfg, &f, "f")?;
            require_member(cfg, &g_fn, "g")?;
            let (product, order) = if mode == ConvolveMode::Hadamard {
                (hadamard(&f, &g_fn), convolution_order(cp, wp, cfg.k_max)?)
            } else {
                (
                    quadratic_combination(&f, &g_fn)?,
                    quadratic_mean_order(cp, wp, cfg.k_max)?,
                )
            };
            let (pass, m, order) = closure_check(&product, order)?;
            (pass, product, Some(order), m, None, None)
        }
        ConvolveMode::Bounded => {
            let mult = BoundedMultiplier::new(g_coeffs.clone())?;
            let out = bounded_multiplier_convolve(&f, &mult, cp, wp)?;
            let pass = out.margin >= out.margin_before && accepted(cfg, out.margin, cp.rhs());
            (
                pass,
                out.product,
                None,
                None,
                Some(out.margin_before),
                Some(out.margin),
            )
        }
    };
    Ok((
        pass,
        CommandResult::Convolve {
            mode,
            f: f.coeffs().to_vec(),
            g: g_coeffs,
            product: product.coeffs().to_vec(),
            closure,
            order_margin,
            margin_before,
            margin_after,
        },
    ))
}

fn outcome(
    name: &str,
    required: bool,
    mut rep: VerificationReport,
    slack: Option<f64>,
) -> CheckOutcome {
    if let Some(s) = slack {
        rep.pass = rep.margin >= -s;
    }
    CheckOutcome {
        check: name.into(),
        required,
        pass: rep.pass,
        margin: rep.margin,
        report: Some(rep),
    }
}

fn bundle(cfg: &RunConfig, label: &str, f: MeroFunction) -> Result<FunctionBundle, RunError> {
    let (cp, wp, plan) = (&cfg.class, &cfg.wright, &cfg.plan);
    let margin = member_margin(cfg, &f)?;
    let member = margin.is_some_and(|m| accepted(cfg, m, cp.rhs()));
    let mut checks = vec![CheckOutcome {
        check: "coefficient".into(),
        required: true,
        pass: member,
        margin: margin.unwrap_or(f64::NEG_INFINITY),
        report: None,
    }];
    checks.push(outcome(
        "membership_analytic",
        true,
        verify_membership_analytic(&f, cp, wp, plan)?,
        None,
    ));

    let slack = Some(cfg.tolerances.equality_slack);
    let growth = verify_growth(&f, cp, wp, plan)?;
    let hyp = growth.hypothesis_holds == Some(true);
    checks.push(outcome("growth", hyp, growth, slack));
    let distortion = verify_distortion(&f, cp, wp, plan)?;
    let hyp = distortion.hypothesis_holds == Some(true);
    checks.push(outcome("distortion", hyp, distortion, slack));

    let r1 = starlike_radius(cp, wp, cfg.delta, cfg.k_max)?.radius;
    let r2 = convex_radius(cp, wp, cfg.kappa, cfg.k_max)?.radius;
    let star = verify_radius(&f, RadiusCondition::Starlike { order: cfg.delta }, r1, plan)?;
    checks.push(outcome("radius_starlike", member, star, None));
    let conv = verify_radius(&f, RadiusCondition::Convex { order: cfg.kappa }, r2, plan)?;
    checks.push(outcome("radius_convex", member, conv, None));

    Ok(FunctionBundle {
        label: label.into(),
        coeffs: f.coeffs().to_vec(),
        member,
        checks,
    })
}

fn cmd_verify(cfg: &RunConfig, seed: u64) -> Result<(bool, CommandResult), RunError> {
    let (cp, wp) = (&cfg.class, &cfg.wright);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = vec![
        ("principal", MeroFunction::principal()),
        ("extremal_k1", extremal_function(cp, wp, 1)?),
        (
            "random_member",
            random_member(cp, wp, cfg.k_max.min(10), &mut rng)?,
        ),
    ];
    if let Some(f) = &cfg.function {
        inputs.push(("input", MeroFunction::new(f.coeffs.clone())?));
    }
    let functions = inputs
        .into_iter()
        .map(|(label, f)| bundle(cfg, label, f))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = functions
        .iter()
        .all(|b| b.checks.iter().all(|c| !c.required || c.pass));
    Ok((pass, CommandResult::Verify { functions }))
}

/// Runs the parsed command and assembles the report.
pub fn execute(cli: &Cli) -> Result<Report, RunError> {
    let config = resolve_config(cli)?;
    let (pass, result) = match &cli.command {
        Command::Sigma { from, to } => cmd_sigma(&config, *from, to.unwrap_or(config.k_max))?,
        Command::Member => cmd_member(&config)?,
        Command::Extremal { k } => cmd_extremal(&config, *k)?,
        Command::Bounds { r } => cmd_bounds(&config, r.as_deref())?,
        Command::Radii => cmd_radii(&config)?,
        Command::Convolve { mode, f, g } => cmd_convolve(&config, *mode, f.as_deref(), g)?,
        Command::Verify { seed } => cmd_verify(&config, *seed)?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config,
        errata: errata(),
        pass,
        exit_code: if pass { EXIT_PASS } else { EXIT_FAIL },
        result,
    })
}

/// Seventeen significant digits; the spelling used in every output format.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

/// Pretty JSON with floats written at 17 significant digits.
struct Sig17<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_num(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(report: &Report) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Sig17(serde_json::ser::PrettyFormatter::new()),
    );
    report
        .serialize(&mut ser)
        .expect("report serialization is infallible");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn from_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

/// The tabular view shared by the CSV and text outputs.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn table(headers: &[&str], rows: Vec<Vec<String>>) -> Table {
    Table {
        headers: headers.iter().map(|s| s.to_string()).collect(),
        rows,
    }
}

pub fn report_table(report: &Report) -> Table {
    match &report.result {
        CommandResult::Sigma { rows } => table(
            &["k", "sigma", "ln_sigma"],
            rows.iter()
                .map(|r| vec![r.k.to_string(), opt(r.sigma), fmt_num(r.ln_sigma)])
                .collect(),
        ),
        CommandResult::Member {
            margin,
            coefficient_pass,
            analytic,
            ..
        } => table(
            &["check", "pass", "margin"],
            vec![
                vec![
                    "coefficient".into(),
                    coefficient_pass.to_string(),
                    fmt_num(*margin),
                ],
                vec![
                    analytic.check_name.clone(),
                    analytic.pass.to_string(),
                    fmt_num(analytic.margin),
                ],
            ],
        ),
        CommandResult::Extremal { coeffs, .. } => table(
            &["k", "a_k"],
            coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| vec![(i + 1).to_string(), fmt_num(*a)])
                .collect(),
        ),
        CommandResult::Bounds { rows, .. } => table(
            &[
                "r",
                "growth_lower",
                "growth_upper",
                "distortion_lower",
                "distortion_upper",
            ],
            rows.iter()
                .map(|r| {
                    [
                        r.r,
                        r.growth_lower,
                        r.growth_upper,
                        r.distortion_lower,
                        r.distortion_upper,
                    ]
                    .into_iter()
                    .map(fmt_num)
                    .collect()
                })
                .collect(),
        ),
        CommandResult::Radii {
            starlike, convex, ..
        } => table(
            &[
                "k",
                "starlike_candidate",
                "starlike_printed",
                "convex_candidate",
                "convex_printed",
            ],
            starlike
                .per_k
                .iter()
                .zip(&convex.per_k)
                .map(|(s, c)| {
                    vec![
                        s.k.to_string(),
                        fmt_num(s.candidate),
                        fmt_num(s.printed),
                        fmt_num(c.candidate),
                        fmt_num(c.printed),
                    ]
                })
                .collect(),
        ),
        CommandResult::Convolve {
            f,
            g,
            product,
            closure,
            ..
        } => {
            let n = f.len().max(g.len());
            let at = |v: &[f64], i: usize| v.get(i).copied();
            let row_order = |i: usize| closure.as_ref().and_then(|c| c.row(i + 1)).map(|r| r.order);
            table(
                &["k", "f", "g", "product", "order_k"],
                (0..n)
                    .map(|i| {
                        vec![
                            (i + 1).to_string(),
                            opt(at(f, i)),
                            opt(at(g, i)),
                            opt(at(product, i)),
                            opt(row_order(i)),
                        ]
                    })
                    .collect(),
            )
        }
        CommandResult::Verify { functions } => table(
            &["function", "check", "required", "pass", "margin"],
            functions
                .iter()
                .flat_map(|b| {
                    b.checks.iter().map(move |c| {
                        vec![
                            b.label.clone(),
                            c.check.clone(),
                            c.required.to_string(),
                            c.pass.to_string(),
                            fmt_num(c.margin),
                        ]
                    })
                })
                .collect(),
        ),
    }
}

fn summary(report: &Report) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match &report.result {
        CommandResult::Extremal { k, bound, .. } => {
            out.push(("k".into(), k.to_string()));
            out.push(("bound".into(), fmt_num(*bound)));
        }
        CommandResult::Bounds {
            envelope_constant, ..
        } => {
            out.push(("envelope_constant".into(), fmt_num(*envelope_constant)));
        }
        CommandResult::Radii {
            starlike,
            convex,
            starlike_check,
            convex_check,
        } => {
            for (name, t, c) in [
                ("starlike", starlike, starlike_check),
                ("convex", convex, convex_check),
            ] {
                out.push((format!("{name}_radius"), fmt_num(t.radius)));
                out.push((format!("{name}_attained_k"), t.attained_k.to_string()));
                out.push((format!("{name}_numeric"), fmt_num(c.numeric)));
            }
        }
        CommandResult::Convolve {
            closure,
            order_margin,
            margin_before,
            margin_after,
            ..
        } => {
            if let Some(c) = closure {
                let agg = match c.aggregate_value() {
                    Some(v) => fmt_num(v),
                    None => "undefined".into(),
                };
                out.push(("aggregate_order".into(), agg));
            }
            for (k, v) in [
                ("order_margin", order_margin),
                ("margin_before", margin_before),
                ("margin_after", margin_after),
            ] {
                if let Some(v) = v {
                    out.push((k.into(), fmt_num(*v)));
                }
            }
        }
        _ => {}
    }
    out
}

pub fn to_csv(report: &Report) -> String {
    let t = report_table(report);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.headers).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

pub fn to_text(report: &Report) -> String {
    let mut s = String::new();
    let name = serde_json::to_value(&report.result)
        .ok()
        .and_then(|v| v.get("command").and_then(|c| c.as_str().map(String::from)))
        .unwrap_or_default();
    let applied: Vec<&str> = report
        .errata
        .iter()
        .filter(|e| e.applied)
        .map(|e| e.id.as_str())
        .collect();
    let _ = writeln!(s, "command: {name}");
    let _ = writeln!(s, "pass: {} (exit {})", report.pass, report.exit_code);
    let _ = writeln!(s, "errata applied: {}", applied.join(", "));
    for (k, v) in summary(report) {
        let _ = writeln!(s, "{k}: {v}");
    }
    let t = report_table(report);
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.len()).collect();
    for row in &t.rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    s.push('\n');
    let _ = writeln!(s, "{}", line(&t.headers));
    for row in &t.rows {
        let _ = writeln!(s, "{}", line(row));
    }
    s
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(report),
        OutputFormat::Text => to_text(report),
    }
}

/// Full entry point: parse, run, write output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_PASS
            };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    let text = render(&report, report.config.output);
    let written = match &cli.out {
        Some(p) => std::fs::write(p, text.as_bytes()),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_INVALID;
    }
    report.exit_code
}
