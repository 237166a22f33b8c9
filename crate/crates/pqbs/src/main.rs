use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pqbs::run::DEFAULT_ORACLE_DEGREE;
use pqbs::{run_and_write, BoundKind, CliError, Command, Format, RunConfig};
use pqbs_core::oracle::{parse_rational, to_f64};
use pqbs_core::UnnormalizedVariant;

const FUNCTIONS_HELP: &str = "\
Functions: e0, e1, e2, e3, exp, sin_scaled, abs_half, sqrt_abs, or file:PATH for a
two-column CSV of x,value samples (optional header), interpolated linearly and held
constant outside the sampled range.

Schedules (--schedule): power_root:ALPHA:BETA (p_m = ALPHA^(1/m), q_m = BETA^(1/m)),
one_minus_inverse (p_m = 1 - 1/(m+1)^2, q_m = 1 - 1/(m+1)), custom:A:B:C:D
(p_m = 1 - A/(m+1)^B, q_m = 1 - C/(m+1)^D).

Exit status: 0 success, 1 bound violation or oracle mismatch, 2 invalid input,
3 I/O failure.";

#[derive(Debug, Parser)]
#[command(name = "pqbs", version, about = "Revised (p,q)-Bernstein-Schurer operators: evaluation, moments, error bounds and convergence experiments", after_help = FUNCTIONS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Operator degree m (single-operator commands).
    #[arg(long, global = true, default_value_t = 8)]
    m: usize,
    /// Shift ell; the operator reads f on [0, ell + 1].
    #[arg(long, global = true, default_value_t = 0)]
    ell: usize,
    /// Parameter p, with 0 < q < p <= 1; decimal or fraction such as 19/20
    /// [default: 0.95].
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<String>,
    /// Parameter q, with 0 < q < p <= 1 [default: 0.9].
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// Parameter schedule for experiments, e.g. power_root:0.9:0.8.
    #[arg(long, global = true)]
    schedule: Option<String>,
    /// Function name or file:PATH.
    #[arg(long, global = true, default_value = "e2")]
    function: String,
    /// Number of uniform points on [0, 1] (default 21 for single-operator
    /// commands, 101 for experiments).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Degrees for experiments, comma separated (default 4,8,16,32,64,128).
    #[arg(long, global = true, value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Absolute tolerance: bound slack for `bounds`, relative moment gap for
    /// `moments`, float drift for `oracle-check`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Bernstein,
    Schurer,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Modulus,
    Lipschitz,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Operator values on a grid of [0, 1].
    #[command(after_help = "CSV columns: x, value, f_x, error (= value - f_x).")]
    Eval {
        /// Use an unnormalized predecessor instead of the revised operator.
        #[arg(long, value_enum)]
        unnormalized: Option<VariantArg>,
    },
    /// Summed against closed-form moments of e0, e1, e2.
    #[command(after_help = "CSV columns: x, e0_sum, e0_closed, e1_sum, e1_closed, e2_sum, e2_closed, \
central1, central2, delta_m, max_rel_gap, agree.")]
    Moments,
    /// Pointwise error-bound check (modulus of continuity or Hoelder rate).
    #[command(after_help = "CSV columns: x, lhs, rhs, delta_m, pass. \
Exits with status 1 if any row fails.")]
    Bounds {
        #[arg(long, value_enum, default_value_t = KindArg::Modulus)]
        kind: KindArg,
        /// Hoelder constant M for --kind lipschitz.
        #[arg(long, default_value_t = 1.0)]
        lip_m: f64,
        /// Hoelder exponent nu in (0, 1] for --kind lipschitz.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
    },
    /// Sup-norm convergence along a parameter schedule.
    #[command(after_help = "CSV columns: m, p_m, q_m, sup_error, bound (max of 2 omega(f, delta_m)), \
scaled_sup ([m] sup_error), sup_e0, sup_e1, sup_e2. Default schedule: one_minus_inverse.")]
    Converge,
    /// Scaled error [m](B(f) - f) and the fitted lambda.
    #[command(after_help = "CSV columns: m, p_m, q_m, scaled_sup, lambda_hat, cauchy_increment, \
fit_residual. Needs f''. Default schedule: power_root:0.9:0.8.")]
    Voronovskaja,
    /// Bias-corrected error over the second modulus.
    #[command(after_help = "CSV columns: m, p_m, q_m, max_ratio, max_numerator, argmax_x. Needs f'. \
Default schedule: one_minus_inverse.")]
    Omega2,
    /// Exact rational identity checks and float-vs-exact drift.
    #[command(after_help = "CSV columns: p, q, m, ell, partition_of_unity, first_moment, second_moment, \
first_central, second_central, delta_squared, q_reduction, float_rel_err, pass. --p and --q \
accept decimals or fractions such as 9/10; without them three built-in pairs are checked. \
Exits with status 1 on any failure.")]
    OracleCheck {
        /// Largest m + ell to check (at most 16).
        #[arg(long, default_value_t = DEFAULT_ORACLE_DEGREE)]
        max_degree: usize,
    },
}

/// Decimal or fraction as a float.
fn real(flag: &str, text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .or_else(|_| parse_rational(text).map(|r| to_f64(&r)))
        .map_err(|_| CliError::Invalid(format!("{flag}: cannot read `{text}` as a number")))
}

fn config_from(cli: Cli) -> Result<RunConfig, CliError> {
    let defaults = RunConfig::default();
    let p = cli.p.as_deref().map(|t| real("--p", t)).transpose()?.unwrap_or(defaults.p);
    let q = cli.q.as_deref().map(|t| real("--q", t)).transpose()?.unwrap_or(defaults.q);
    let command = match cli.command {
        Sub::Eval { unnormalized } => Command::Eval {
            unnormalized: unnormalized.map(|v| match v {
                VariantArg::Bernstein => UnnormalizedVariant::Bernstein,
                VariantArg::Schurer => UnnormalizedVariant::Schurer,
            }),
        },
        Sub::Moments => Command::Moments,
        Sub::Bounds { kind, lip_m, nu } => Command::Bounds {
            kind: match kind {
                KindArg::Modulus => BoundKind::Modulus,
                KindArg::Lipschitz => BoundKind::Lipschitz,
            },
            lip_m,
            nu,
        },
        Sub::Converge => Command::Converge,
        Sub::Voronovskaja => Command::Voronovskaja,
        Sub::Omega2 => Command::Omega2,
        // The oracle keeps the text so that 9/10 stays exact.
        Sub::OracleCheck { max_degree } => Command::OracleCheck { max_degree, p: cli.p.clone(), q: cli.q.clone() },
    };
    Ok(RunConfig {
        command,
        m: cli.m,
        ell: cli.ell,
        p,
        q,
        schedule: cli.schedule,
        function: cli.function,
        grid: cli.grid,
        m_list: cli.m_list,
        out: cli.out,
        format: match cli.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
        tolerance: cli.tolerance,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config_from(cli).and_then(|config| run_and_write(&config, std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
