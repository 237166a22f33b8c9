//! Validated run configuration and per-subcommand table builders.

use std::path::PathBuf;

use pqbs_core::bounds::{lipschitz_bound_check, modulus_bound_check, BoundReport};
use pqbs_core::lab::{DEFAULT_GRID, DEFAULT_M_VALUES};
use pqbs_core::moments::{delta_m, moments_closed_form};
use pqbs_core::oracle::{
    oracle_float_agreement, oracle_moment_identity_check, parse_rational, RationalParams, RationalSpec,
    ORACLE_MAX_DEGREE,
};
use pqbs_core::{
    evaluate, evaluate_unnormalized, korovkin_experiment, omega2_ratio_experiment, uniform_grid,
    voronovskaja_experiment, BoundTolerance, FunctionHandle, OperatorSpec, PQParams, ParamSchedule,
    UnnormalizedVariant,
};

use crate::error::CliError;
use crate::output::{Cell, Format, Table};
use crate::sampled::resolve_function;

/// Grid used by single-operator commands when `--grid` is absent.
pub const DEFAULT_POINT_GRID: usize = 21;
pub const DEFAULT_ORACLE_DEGREE: usize = 12;
pub const MOMENT_TOLERANCE: f64 = 1e-10;
pub const ORACLE_FLOAT_TOLERANCE: f64 = 1e-12;
const DEFAULT_ORACLE_SETS: [(&str, &str); 3] = [("1", "1/2"), ("9/10", "4/5"), ("99/100", "49/50")];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Modulus,
    Lipschitz,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Eval { unnormalized: Option<UnnormalizedVariant> },
    Moments,
    Bounds { kind: BoundKind, lip_m: f64, nu: f64 },
    Converge,
    Voronovskaja,
    Omega2,
    OracleCheck { max_degree: usize, p: Option<String>, q: Option<String> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Moments => "moments",
            Command::Bounds { .. } => "bounds",
            Command::Converge => "converge",
            Command::Voronovskaja => "voronovskaja",
            Command::Omega2 => "omega2",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }

    fn default_schedule(&self) -> &'static str {
        match self {
            Command::Voronovskaja => "power_root:0.9:0.8",
            _ => "one_minus_inverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub m: usize,
    pub ell: usize,
    pub p: f64,
    pub q: f64,
    pub schedule: Option<String>,
    pub function: String,
    pub grid: Option<usize>,
    pub m_list: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerance: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Moments,
            m: 8,
            ell: 0,
            p: 0.95,
            q: 0.9,
            schedule: None,
            function: "e2".into(),
            grid: None,
            m_list: None,
            out: None,
            format: Format::Csv,
            tolerance: None,
        }
    }
}

/// A finished table and, when the run found a violation, the error that sets
/// the exit status. The table is written either way.
#[derive(Debug)]
pub struct RunOutput {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl RunConfig {
    fn spec(&self) -> Result<OperatorSpec, CliError> {
        Ok(OperatorSpec::new(self.m, self.ell, PQParams::new(self.p, self.q)?)?)
    }

    fn function(&self) -> Result<FunctionHandle, CliError> {
        resolve_function(&self.function, self.ell)
    }

    fn points(&self, default: usize) -> Result<Vec<f64>, CliError> {
        Ok(uniform_grid(0.0, 1.0, self.grid.unwrap_or(default))?)
    }

    fn schedule(&self) -> Result<ParamSchedule, CliError> {
        let text = self.schedule.as_deref().unwrap_or(self.command.default_schedule());
        Ok(ParamSchedule::parse(text)?)
    }

    fn m_values(&self) -> Vec<usize> {
        self.m_list.clone().unwrap_or_else(|| DEFAULT_M_VALUES.to_vec())
    }

    fn tolerance(&self, default: f64) -> Result<f64, CliError> {
        match self.tolerance {
            Some(t) if !(t >= 0.0 && t.is_finite()) => {
                Err(CliError::Invalid(format!("tolerance must be >= 0, got {t}")))
            }
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    fn spec_metadata(&self, table: &mut Table) {
        table.meta("m", self.m);
        table.meta("ell", self.ell);
        table.meta("p", self.p);
        table.meta("q", self.q);
    }
}

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let done = |table| Ok(RunOutput { table, failure: None });
    match &config.command {
        Command::Eval { unnormalized } => done(eval_table(config, *unnormalized)?),
        Command::Moments => done(moments_table(config)?),
        Command::Bounds { kind, lip_m, nu } => bounds_table(config, *kind, *lip_m, *nu),
        Command::Converge => done(converge_table(config)?),
        Command::Voronovskaja => done(voronovskaja_table(config)?),
        Command::Omega2 => done(omega2_table(config)?),
        Command::OracleCheck { max_degree, p, q } => oracle_table(config, *max_degree, p.as_deref(), q.as_deref()),
    }
}

fn eval_table(config: &RunConfig, unnormalized: Option<UnnormalizedVariant>) -> Result<Table, CliError> {
    let spec = config.spec()?;
    let f = config.function()?;
    let mut table = Table::new("eval", &["x", "value", "f_x", "error"]);
    for x in config.points(DEFAULT_POINT_GRID)? {
        let value = match unnormalized {
            Some(variant) => evaluate_unnormalized(&spec, &f, x, variant)?,
            None => evaluate(&spec, &f, x)?,
        };
        let fx = f.eval(x)?;
        table.push(vec![x.into(), value.into(), fx.into(), (value - fx).into()]);
    }
    config.spec_metadata(&mut table);
    table.meta("function", f.name());
    table.meta(
        "operator",
        match unnormalized {
            None => "normalized",
            Some(UnnormalizedVariant::Bernstein) => "unnormalized-bernstein",
            Some(UnnormalizedVariant::Schurer) => "unnormalized-schurer",
        },
    );
    Ok(table)
}

fn moments_table(config: &RunConfig) -> Result<Table, CliError> {
    let spec = config.spec()?;
    let tol = config.tolerance(MOMENT_TOLERANCE)?;
    let hi = (config.ell + 1) as f64;
    let monos: [FunctionHandle; 3] = std::array::from_fn(|j| FunctionHandle::monomial(j as u32, hi));
    let mut table = Table::new(
        "moments",
        &[
            "x",
            "e0_sum",
            "e0_closed",
            "e1_sum",
            "e1_closed",
            "e2_sum",
            "e2_closed",
            "central1",
            "central2",
            "delta_m",
            "max_rel_gap",
            "agree",
        ],
    );
    let mut worst: f64 = 0.0;
    for x in config.points(DEFAULT_POINT_GRID)? {
        let ms = moments_closed_form(&spec, x)?;
        let closed = [ms.e0, ms.e1, ms.e2];
        let mut row: Vec<Cell> = vec![x.into()];
        let mut gap: f64 = 0.0;
        for (f, want) in monos.iter().zip(closed) {
            let got = evaluate(&spec, f, x)?;
            gap = gap.max((got - want).abs() / want.abs().max(1.0));
            row.push(got.into());
            row.push(want.into());
        }
        worst = worst.max(gap);
        row.extend([
            ms.central1.into(),
            ms.central2.into(),
            delta_m(&spec, x)?.into(),
            gap.into(),
            (gap <= tol).into(),
        ]);
        table.push(row);
    }
    config.spec_metadata(&mut table);
    table.meta("tolerance", tol);
    table.meta("max_rel_gap", worst);
    Ok(table)
}

fn bounds_table(config: &RunConfig, kind: BoundKind, lip_m: f64, nu: f64) -> Result<RunOutput, CliError> {
    let spec = config.spec()?;
    let f = config.function()?;
    let xs = config.points(DEFAULT_POINT_GRID)?;
    let tolerance =
        BoundTolerance { absolute: config.tolerance(BoundTolerance::default().absolute)?, ..Default::default() };
    let report: BoundReport = match kind {
        BoundKind::Modulus => modulus_bound_check(&spec, &f, &xs, tolerance)?,
        BoundKind::Lipschitz => lipschitz_bound_check(&spec, &f, lip_m, nu, &xs, tolerance)?,
    };
    let mut table = Table::new("bounds", &["x", "lhs", "rhs", "delta_m", "pass"]);
    for r in &report.rows {
        table.push(vec![r.x.into(), r.lhs.into(), r.rhs.into(), r.delta_m.into(), r.pass.into()]);
    }
    let violations = report.violations().count();
    config.spec_metadata(&mut table);
    table.meta("function", f.name());
    table.meta("kind", if kind == BoundKind::Modulus { "modulus" } else { "lipschitz" });
    if kind == BoundKind::Lipschitz {
        table.meta("lip_m", lip_m);
        table.meta("nu", nu);
    }
    table.meta("omega_mode", report.mode.as_str());
    table.meta("tolerance_absolute", tolerance.absolute);
    table.meta("tolerance_relative", tolerance.relative);
    table.meta("violations", violations);
    let failure = (violations > 0).then(|| {
        let first = report.violations().next().unwrap();
        CliError::Violation(format!(
            "{violations} bound violation(s); first at x = {}: lhs {:e} > rhs {:e}",
            first.x, first.lhs, first.rhs
        ))
    });
    Ok(RunOutput { table, failure })
}

fn schedule_metadata(table: &mut Table, schedule: &ParamSchedule, function: &str, ell: usize, grid: usize) {
    table.meta("function", function);
    table.meta("ell", ell);
    table.meta("grid", grid);
    table.meta("schedule", schedule.kind().as_str());
    table.meta("alpha_limit", schedule.alpha_limit());
    table.meta("beta_limit", schedule.beta_limit());
}

fn converge_table(config: &RunConfig) -> Result<Table, CliError> {
    let schedule = config.schedule()?;
    let f = config.function()?;
    let grid = config.grid.unwrap_or(DEFAULT_GRID);
    let report = korovkin_experiment(&schedule, config.ell, &f, &config.m_values(), grid)?;
    let mut table =
        Table::new("converge", &["m", "p_m", "q_m", "sup_error", "bound", "scaled_sup", "sup_e0", "sup_e1", "sup_e2"]);
    for r in &report.rows {
        table.push(vec![
            r.m.into(),
            r.p.into(),
            r.q.into(),
            r.sup_error.into(),
            r.bound_2w.into(),
            r.scaled_error.into(),
            r.sup_e0.into(),
            r.sup_e1.into(),
            r.sup_e2.into(),
        ]);
    }
    schedule_metadata(&mut table, &schedule, f.name(), config.ell, grid);
    table.meta("omega_mode", report.omega_mode.as_str());
    Ok(table)
}

fn voronovskaja_table(config: &RunConfig) -> Result<Table, CliError> {
    let schedule = config.schedule()?;
    let f = config.function()?;
    let grid = config.grid.unwrap_or(DEFAULT_GRID);
    let report = voronovskaja_experiment(&schedule, config.ell, &f, &config.m_values(), grid)?;
    let mut table = Table::new(
        "voronovskaja",
        &["m", "p_m", "q_m", "scaled_sup", "lambda_hat", "cauchy_increment", "fit_residual"],
    );
    for r in &report.rows {
        table.push(vec![
            r.m.into(),
            r.p.into(),
            r.q.into(),
            r.sup_scaled_error.into(),
            r.lambda_hat.into(),
            r.cauchy_increment.into(),
            r.fit_residual.into(),
        ]);
    }
    schedule_metadata(&mut table, &schedule, f.name(), config.ell, grid);
    Ok(table)
}

fn omega2_table(config: &RunConfig) -> Result<Table, CliError> {
    let schedule = config.schedule()?;
    let f = config.function()?;
    let grid = config.grid.unwrap_or(DEFAULT_GRID);
    let report = omega2_ratio_experiment(&schedule, config.ell, &f, &config.m_values(), grid)?;
    let mut table = Table::new("omega2", &["m", "p_m", "q_m", "max_ratio", "max_numerator", "argmax_x"]);
    for r in &report.rows {
        table.push(vec![
            r.m.into(),
            r.p.into(),
            r.q.into(),
            r.max_ratio.into(),
            r.max_numerator.into(),
            r.argmax_x.into(),
        ]);
    }
    schedule_metadata(&mut table, &schedule, f.name(), config.ell, grid);
    Ok(table)
}

fn oracle_sets(p: Option<&str>, q: Option<&str>) -> Result<Vec<(String, String, RationalParams)>, CliError> {
    let texts: Vec<(String, String)> = match (p, q) {
        (Some(p), Some(q)) => vec![(p.to_string(), q.to_string())],
        (None, None) => DEFAULT_ORACLE_SETS.iter().map(|(p, q)| (p.to_string(), q.to_string())).collect(),
        _ => return Err(CliError::Invalid("oracle-check needs both --p and --q, or neither".into())),
    };
    texts
        .into_iter()
        .map(|(p, q)| {
            let params = RationalParams::new(parse_rational(&p)?, parse_rational(&q)?)?;
            Ok((p, q, params))
        })
        .collect()
}

fn oracle_table(
    config: &RunConfig,
    max_degree: usize,
    p: Option<&str>,
    q: Option<&str>,
) -> Result<RunOutput, CliError> {
    if max_degree == 0 || max_degree > ORACLE_MAX_DEGREE {
        return Err(CliError::Invalid(format!("--max-degree must lie in 1..={ORACLE_MAX_DEGREE}, got {max_degree}")));
    }
    let tol = config.tolerance(ORACLE_FLOAT_TOLERANCE)?;
    let mut table = Table::new(
        "oracle-check",
        &[
            "p",
            "q",
            "m",
            "ell",
            "partition_of_unity",
            "first_moment",
            "second_moment",
            "first_central",
            "second_central",
            "delta_squared",
            "q_reduction",
            "float_rel_err",
            "pass",
        ],
    );
    let mut failures = 0usize;
    for (p_text, q_text, params) in oracle_sets(p, q)? {
        for n in 1..=max_degree {
            for ell in 0..n {
                let spec = RationalSpec::new(n - ell, ell, params.clone())?;
                let ids = oracle_moment_identity_check(&spec)?;
                let drift = oracle_float_agreement(&spec)?;
                let pass = ids.all_hold() && drift <= tol;
                failures += usize::from(!pass);
                table.push(vec![
                    p_text.as_str().into(),
                    q_text.as_str().into(),
                    (n - ell).into(),
                    ell.into(),
                    ids.partition_of_unity.into(),
                    ids.first_moment.into(),
                    ids.second_moment.into(),
                    ids.first_central.into(),
                    ids.second_central.into(),
                    ids.delta_squared.into(),
                    ids.q_reduction.into(),
                    drift.into(),
                    pass.into(),
                ]);
            }
        }
    }
    table.meta("max_degree", max_degree);
    table.meta("float_tolerance", tol);
    table.meta("failures", failures);
    let failure = (failures > 0).then(|| CliError::Oracle(format!("{failures} oracle check(s) failed")));
    Ok(RunOutput { table, failure })
}

/// Runs the config and writes the table to `--out` or `sink`.
pub fn run_and_write(config: &RunConfig, sink: impl std::io::Write) -> Result<(), CliError> {
    let output = run(config)?;
    match &config.out {
        Some(path) => {
            let file =
                std::fs::File::create(path).map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
            output.table.write(config.format, std::io::BufWriter::new(file))?;
        }
        None => output.table.write(config.format, sink)?,
    }
    match output.failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}
