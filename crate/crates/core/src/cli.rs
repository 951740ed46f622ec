//! Command-line front end: `phase`, `verify`, `sweep` and `default-scenario`.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 numerical
//! non-convergence, 64 usage or parse error, 65 scenario validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::phase::{compute_phase, run_consistency_suite, Method, PhaseReport};
use crate::scenario::{load_scenario, Scenario, ScenarioError, DEFAULT_SCENARIO};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_VALIDATION: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "ab-phase", version, about = "Aharonov-Bohm solenoid phase computed four ways")]
struct Cli {
    /// Accepted for reproducible-run scripts; every computation is deterministic.
    #[arg(long, global = true)]
    seedless: bool,

    /// Worker threads for volume integrals (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one or all phases for a scenario.
    Phase {
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Scenario file; the built-in desk scenario when omitted.
        scenario: Option<PathBuf>,
    },
    /// Run the full consistency suite.
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyFormat::Text)]
        format: VerifyFormat,
        scenario: Option<PathBuf>,
    },
    /// Recompute all phases over a list of parameter values (CSV output).
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<String>,
        scenario: Option<PathBuf>,
    },
    /// Print the built-in scenario file.
    DefaultScenario,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ab,
    FieldMomentum,
    Energy,
    Hidden,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Ab => vec![Method::AbVectorPotential],
            MethodArg::FieldMomentum => vec![Method::FieldMomentum],
            MethodArg::Energy => vec![Method::InterferenceEnergy],
            MethodArg::Hidden => vec![Method::HiddenMomentum],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepParam {
    Rho0,
    Speed,
    K,
    ZExtent,
    RelTol,
}

/// Format with `digits` significant digits, '.' as decimal separator.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..9).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.prec$e}", prec = digits - 1);
        match s.split_once('e') {
            Some((m, e)) if m.contains('.') => {
                format!("{}e{e}", m.trim_end_matches('0').trim_end_matches('.'))
            }
            _ => s,
        }
    }
}

fn exit_for_error(e: &Error) -> i32 {
    if e.is_convergence_failure() {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_VALIDATION
    }
}

fn load(path: &Option<PathBuf>) -> Result<Scenario, ScenarioError> {
    match path {
        Some(p) => load_scenario(p),
        None => Scenario::from_toml_str(DEFAULT_SCENARIO, "<built-in default>"),
    }
}

fn scenario_exit(e: &ScenarioError) -> i32 {
    match e {
        ScenarioError::Validation { .. } => EXIT_VALIDATION,
        ScenarioError::Io { .. } | ScenarioError::Parse { .. } => EXIT_USAGE,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let scenario_path = match &cli.command {
        Command::DefaultScenario => {
            let _ = write!(out, "{DEFAULT_SCENARIO}");
            return EXIT_OK;
        }
        Command::Phase { scenario, .. } | Command::Verify { scenario, .. } | Command::Sweep { scenario, .. } => {
            scenario
        }
    };
    let mut s = match load(scenario_path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return scenario_exit(&e);
        }
    };
    s.quadrature.workers = cli.workers;
    let result = match &cli.command {
        Command::Phase { method, format, .. } => cmd_phase(&s, *method, *format, out, err),
        Command::Verify { format, .. } => cmd_verify(&s, *format, out),
        Command::Sweep { param, values, .. } => cmd_sweep(&s, *param, values, out, err),
        Command::DefaultScenario => unreachable!("handled above"),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_USAGE
    })
}

#[derive(Serialize)]
struct PhaseRow<'a> {
    method: &'a str,
    value: f64,
    error_estimate: f64,
    evaluations: u64,
    z_extent: f64,
}

pub const PHASE_CSV_HEADER: &str = "method,value,error_estimate,evaluations,z_extent";

fn cmd_phase(
    s: &Scenario,
    method: MethodArg,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let sol = s.solenoid();
    let mut reports: Vec<PhaseReport> = Vec::new();
    for m in method.methods() {
        match compute_phase(m, &s.trajectory, &sol, &s.quadrature, &s.units) {
            Ok(r) => reports.push(r),
            Err(e) => {
                writeln!(err, "error: {e}")?;
                return Ok(exit_for_error(&e));
            }
        }
    }
    match format {
        Format::Table => {
            writeln!(
                out,
                "{:<22} {:>16} {:>16} {:>12} {:>10} {:>10}",
                "method", "value", "error", "evaluations", "z_extent", "wall_ms"
            )?;
            for r in &reports {
                writeln!(
                    out,
                    "{:<22} {:>16} {:>16} {:>12} {:>10} {:>10.1}",
                    r.method.as_str(),
                    fmt_sig(r.value, 9),
                    fmt_sig(r.error_estimate, 3),
                    r.evaluations,
                    fmt_sig(r.z_extent, 9),
                    r.wall_time.as_secs_f64() * 1e3
                )?;
            }
        }
        Format::Csv => {
            writeln!(out, "{PHASE_CSV_HEADER}")?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.method.as_str(),
                    fmt_sig(r.value, 9),
                    fmt_sig(r.error_estimate, 9),
                    r.evaluations,
                    fmt_sig(r.z_extent, 9)
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<PhaseRow> = reports
                .iter()
                .map(|r| PhaseRow {
                    method: r.method.as_str(),
                    value: r.value,
                    error_estimate: r.error_estimate,
                    evaluations: r.evaluations,
                    z_extent: r.z_extent,
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(s: &Scenario, format: VerifyFormat, out: &mut dyn Write) -> std::io::Result<i32> {
    let report = run_consistency_suite(s);
    match format {
        VerifyFormat::Text => writeln!(out, "{report}")?,
        VerifyFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?,
    }
    Ok(if report.all_pass() {
        EXIT_OK
    } else if report.any_inconclusive() {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_CHECK_FAILED
    })
}

pub const SWEEP_CSV_HEADER: &str = "param,value,status,ab_vector_potential,ab_vector_potential_error,\
field_momentum,field_momentum_error,interference_energy,interference_energy_error,\
hidden_momentum,hidden_momentum_error,reason";

fn apply(s: &Scenario, param: SweepParam, raw: &str) -> Result<Scenario, String> {
    let v: f64 = raw.trim().parse().map_err(|_| format!("'{raw}' is not a number"))?;
    let mut s = s.clone();
    match param {
        SweepParam::Rho0 => s.trajectory.rho0 = v,
        SweepParam::Speed => s.trajectory.speed = v,
        SweepParam::K => {
            if v.fract() != 0.0 || v.abs() > f64::from(i32::MAX) {
                return Err(format!("windings must be an integer, got {raw}"));
            }
            s.trajectory.windings = v as i32;
        }
        SweepParam::ZExtent => s.quadrature.z_half_extent_initial = v,
        SweepParam::RelTol => s.quadrature.rel_tol = v,
    }
    s.validate().map_err(|e| e.to_string())?;
    Ok(s)
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn cmd_sweep(
    s: &Scenario,
    param: SweepParam,
    values: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let name = param.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    let mut code = EXIT_OK;
    for raw in values {
        let scenario = match apply(s, param, raw) {
            Ok(sc) => sc,
            Err(reason) => {
                writeln!(out, "{name},{},SKIPPED{},{}", csv_field(raw.trim()), ",".repeat(8), csv_field(&reason))?;
                continue;
            }
        };
        let sol = scenario.solenoid();
        let mut cells = Vec::new();
        let mut failure = None;
        for m in Method::ALL {
            match compute_phase(m, &scenario.trajectory, &sol, &scenario.quadrature, &scenario.units) {
                Ok(r) => {
                    cells.push(fmt_sig(r.value, 9));
                    cells.push(fmt_sig(r.error_estimate, 9));
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        match failure {
            None => writeln!(out, "{name},{},OK,{},", csv_field(raw.trim()), cells.join(","))?,
            Some(e) => {
                let status = if e.is_convergence_failure() { "NOT-CONVERGED" } else { "FAILED" };
                writeln!(err, "warning: {name}={raw}: {e}")?;
                writeln!(
                    out,
                    "{name},{},{status}{},{}",
                    csv_field(raw.trim()),
                    ",".repeat(8),
                    csv_field(&e.to_string())
                )?;
                if e.is_convergence_failure() {
                    code = EXIT_NOT_CONVERGED;
                }
            }
        }
    }
    Ok(code)
}
