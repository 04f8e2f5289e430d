//! `run`, `sweep` and `verify`, returning process exit codes.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::scenario::{cross_validate, CrossReport};
use crate::par::{map_collect, Execution};
use crate::qsymb::convention_report;
use crate::verify::{golden_identities, run_verify, VerifyInputs};

pub use config::RunConfig;

/// Overrides the output directory (default: current directory).
pub const OUT_DIR_ENV: &str = "QHEIS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Failure = 1,
    Config = 2,
    Tolerance = 3,
    Io = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(io::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) => ExitStatus::Config,
            CliError::Io(_) => ExitStatus::Io,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// `$QHEIS_OUT_DIR`, else the current directory.
pub fn output_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)?;
    RunConfig::parse(&text).and_then(RunConfig::resolve).map_err(CliError::Config)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column header and rows of one report.
pub fn csv_table(report: &CrossReport) -> String {
    let mut out = String::from("t");
    for s in &report.series {
        write!(out, ",{0}_{1}_re,{0}_{1}_im", s.observable, s.source).unwrap();
    }
    let mut pairs = Vec::new();
    for (i, a) in report.series.iter().enumerate() {
        for b in &report.series[i + 1..] {
            if a.observable == b.observable {
                write!(out, ",dev_{}_{}_{}", a.observable, a.source, b.source).unwrap();
                pairs.push((a, b));
            }
        }
    }
    out.push('\n');
    for (k, t) in report.times.iter().enumerate() {
        out.push_str(&num(*t));
        for s in &report.series {
            write!(out, ",{},{}", num(s.values[k].re), num(s.values[k].im)).unwrap();
        }
        for (a, b) in &pairs {
            write!(out, ",{}", num((a.values[k] - b.values[k]).norm())).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Summary lines: convention, operator-level deviations, diagnostics.
pub fn summary_lines(report: &CrossReport) -> String {
    let mut out = String::new();
    writeln!(out, "# scenario: {}", report.scenario).unwrap();
    writeln!(out, "# convention: {}", report.convention).unwrap();
    writeln!(out, "# form: {}", report.form).unwrap();
    for d in &report.deviations {
        writeln!(out, "# max_deviation {} {} {} = {}", d.observable, d.left, d.right, num(d.max)).unwrap();
    }
    for (name, v) in &report.diagnostics {
        writeln!(out, "# diag {name} = {}", num(*v)).unwrap();
    }
    writeln!(out, "# tolerance_breached: {}", report.tolerance_breached).unwrap();
    out
}

fn write_output(dir: &Path, name: &str, body: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

/// Renders the full CSV for one config.
pub fn render_run(config: &RunConfig) -> Result<(String, bool), CliError> {
    let scenario = config.scenario().map_err(CliError::Config)?;
    let report = cross_validate(&scenario).map_err(|e| CliError::Config(e.to_string()))?;
    let mut body = String::from("# qheis run\n");
    body.push_str(&config.echo());
    body.push_str(&summary_lines(&report));
    body.push_str(&csv_table(&report));
    Ok((body, report.tolerance_breached))
}

pub fn cmd_run(config_path: &Path, out_dir: &Path, log: &mut dyn Write) -> ExitStatus {
    let result = load_config(config_path).and_then(|c| {
        let (body, breached) = render_run(&c)?;
        let path = write_output(out_dir, &c.output_name(), &body)?;
        Ok((path, breached))
    });
    finish(result, log)
}

fn finish(result: Result<(PathBuf, bool), CliError>, log: &mut dyn Write) -> ExitStatus {
    match result {
        Ok((path, breached)) => {
            let _ = writeln!(log, "wrote {}", path.display());
            if breached {
                let _ = writeln!(log, "tolerance breached");
                ExitStatus::Tolerance
            } else {
                ExitStatus::Ok
            }
        }
        Err(e) => {
            let _ = writeln!(log, "{e}");
            e.status()
        }
    }
}

/// Parses `"0.9,1.0,1.1"`; an empty list is a config error.
pub fn parse_q_list(text: &str) -> Result<Vec<f64>, CliError> {
    let qs = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::Config(format!("bad q value {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if qs.is_empty() {
        return Err(CliError::Config("empty q list".into()));
    }
    Ok(qs)
}

enum SweepBlock {
    Done(String, bool),
    Skipped(String),
}

/// One block per q, in input order; points run concurrently under
/// [`Execution::Parallel`].
pub fn render_sweep(config: &RunConfig, qs: &[f64], exec: Execution) -> Result<(String, bool), CliError> {
    if qs.is_empty() {
        return Err(CliError::Config("empty q list".into()));
    }
    let base = config.scenario().map_err(CliError::Config)?;
    let blocks = map_collect(qs, exec, |&q| -> Result<SweepBlock, CliError> {
        let mut s = base.clone();
        s.q = q;
        if s.kind.rejects_classical_q() && (q - 1.0).abs() < 1e-12 {
            return Ok(SweepBlock::Skipped(format!("{} is singular at q = 1", s.name())));
        }
        let report = cross_validate(&s).map_err(|e| CliError::Config(format!("q = {q}: {e}")))?;
        Ok(SweepBlock::Done(summary_lines(&report) + &csv_table(&report), report.tolerance_breached))
    });
    let mut body = String::from("# qheis sweep\n");
    body.push_str(&config.echo());
    writeln!(body, "# q_values: {}", qs.iter().map(|q| num(*q)).collect::<Vec<_>>().join(" ")).unwrap();
    let mut breached = false;
    for (q, block) in qs.iter().zip(blocks) {
        writeln!(body, "# block q = {}", num(*q)).unwrap();
        match block? {
            SweepBlock::Done(text, b) => {
                breached |= b;
                body.push_str(&text);
            }
            SweepBlock::Skipped(why) => writeln!(body, "# warning: skipped q = {}: {why}", num(*q)).unwrap(),
        }
    }
    Ok((body, breached))
}

fn sweep_name(config: &RunConfig) -> String {
    let name = config.output_name();
    match name.strip_suffix(".csv") {
        Some(stem) => format!("{stem}_sweep.csv"),
        None => format!("{name}_sweep"),
    }
}

pub fn cmd_sweep(config_path: &Path, q_list: &str, out_dir: &Path, exec: Execution, log: &mut dyn Write) -> ExitStatus {
    let result = parse_q_list(q_list).and_then(|qs| {
        let c = load_config(config_path)?;
        let (body, breached) = render_sweep(&c, &qs, exec)?;
        for line in body.lines().filter(|l| l.starts_with("# warning")) {
            let _ = writeln!(log, "{}", &line[2..]);
        }
        let path = write_output(out_dir, &sweep_name(&c), &body)?;
        Ok((path, breached))
    });
    finish(result, log)
}

pub fn cmd_verify(inputs: &VerifyInputs, out: &mut dyn Write) -> ExitStatus {
    match run_verify(inputs, out) {
        Ok(o) if o.success() => ExitStatus::Ok,
        Ok(_) => ExitStatus::Failure,
        Err(_) => ExitStatus::Io,
    }
}

/// Golden identities and the bracket-convention table only.
pub fn cmd_verify_identities(inputs: &VerifyInputs, out: &mut dyn Write) -> ExitStatus {
    let mut ok = true;
    let write = |out: &mut dyn Write, ok: &mut bool| -> io::Result<()> {
        match golden_identities(inputs) {
            Ok(ids) => {
                for g in ids {
                    *ok &= g.matches;
                    let status = if g.matches { "match" } else { "MISMATCH" };
                    writeln!(out, "{status:<8} {}\n         canonical: {}", g.statement, g.result)?;
                }
            }
            Err(e) => {
                *ok = false;
                writeln!(out, "MISMATCH golden identities could not be evaluated: {e}")?;
            }
        }
        match convention_report() {
            Ok(r) => write!(out, "{r}"),
            Err(e) => writeln!(out, "convention table unavailable: {e}"),
        }
    };
    match write(out, &mut ok) {
        Ok(()) if ok => ExitStatus::Ok,
        Ok(()) => ExitStatus::Failure,
        Err(_) => ExitStatus::Io,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> RunConfig {
        RunConfig::parse(text).unwrap().resolve().unwrap()
    }

    #[test]
    fn q_list_parsing() {
        assert_eq!(parse_q_list("0.9, 1.0,1.1").unwrap(), vec![0.9, 1.0, 1.1]);
        assert!(matches!(parse_q_list(""), Err(CliError::Config(_))));
        assert!(matches!(parse_q_list(" , "), Err(CliError::Config(_))));
        assert!(matches!(parse_q_list("1.0,abc"), Err(CliError::Config(_))));
    }

    #[test]
    fn run_is_deterministic_and_classical_deviations_small() {
        let c = config("scenario = \"q_oscillator\"\nq = 1.0\nt_end = 2.0\nsteps = 200\n[q_oscillator]\nn = 6");
        let (a, breached) = render_run(&c).unwrap();
        let (b, _) = render_run(&c).unwrap();
        assert_eq!(a, b);
        assert!(!breached);
        let header = a.lines().find(|l| l.starts_with("t,")).unwrap();
        let cols: Vec<&str> = header.split(',').collect();
        let row: Vec<f64> = a.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        for (name, v) in cols.iter().zip(&row) {
            if name.starts_with("dev_") {
                assert!(*v < 1e-8, "{name} = {v}");
            }
        }
        assert_eq!(RunConfig::from_echo(&a).unwrap(), c);
    }

    #[test]
    fn sweep_skips_classical_lattice_point() {
        let c = config("scenario = \"free_particle\"\nq = 1.5\nt_end = 0.5\nsteps = 20\n[free_particle]\nhalf_width = 3");
        let (body, _) = render_sweep(&c, &[0.8, 1.0, 1.2], Execution::Parallel).unwrap();
        assert!(body.contains("# warning: skipped q = 1.0000000000000000e0"));
        assert_eq!(body.matches("# block q").count(), 3);
        let (seq, _) = render_sweep(&c, &[0.8, 1.0, 1.2], Execution::Sequential).unwrap();
        assert_eq!(body, seq);
    }

    #[test]
    fn oscillator_sweep_records_q_omega_q() {
        let c = config("scenario = \"q_oscillator\"\nt_end = 1.0\nsteps = 50\n[q_oscillator]\nn = 5\nomega = 2.0");
        let qs = [0.9, 1.0, 1.1];
        let (body, _) = render_sweep(&c, &qs, Execution::Parallel).unwrap();
        let got: Vec<f64> = body
            .lines()
            .filter_map(|l| l.strip_prefix("# diag q_omega_q = "))
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(got.len(), 3);
        for (q, v) in qs.iter().zip(got) {
            let want = q * crate::qnum::q_frequency_osc(2.0, *q).unwrap();
            assert_eq!(v, want);
        }
    }
}
