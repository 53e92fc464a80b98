//! Command-line front end: scenario files and flags in, CSV tables and a
//! run manifest out.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

use causal_probe_core::harness::{compare_schemes, cutoff_sweep, run, SchemeId};
use causal_probe_core::{Error, NumericPolicy};

pub mod args;
pub mod build;
pub mod output;

use args::{Cli, Command};
pub use output::{canonical_json, format_value, scenario_digest, RunManifest, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const THREADS_ENV: &str = "CAUSAL_PROBE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
    /// Stdout was closed by the reader; not an error for the user.
    #[error("output closed")]
    Closed,
}

fn stdout_error(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        CliError::Closed
    } else {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_IO,
            CliError::Closed => EXIT_OK,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numeric_policy() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn configure_threads() -> Result<usize, CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            CliError::Validation(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))
        })?;
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(rayon::current_num_threads())
}

/// Everything a command produces, ready to print or write.
struct RunOutput {
    command: &'static str,
    digest: String,
    tables: Vec<Table>,
    summary: Vec<String>,
    started: Instant,
    threads: usize,
}

fn emit(cli: &Cli, out: RunOutput, stdout: &mut dyn Write) -> Result<(), CliError> {
    let RunOutput {
        command,
        digest,
        tables,
        summary,
        started,
        threads,
    } = out;
    let io = stdout_error;
    match &cli.out {
        None => {
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout).map_err(io)?;
                }
                writeln!(stdout, "# {}", t.file_name()).map_err(io)?;
                stdout.write_all(&t.to_csv()).map_err(io)?;
            }
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let mut outputs = BTreeMap::new();
            for t in &tables {
                let path = dir.join(t.file_name());
                std::fs::write(&path, t.to_csv())
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                outputs.insert(t.name.to_string(), path.display().to_string());
                writeln!(stdout, "wrote {} ({} rows)", path.display(), t.rows.len()).map_err(io)?;
            }
            let manifest = RunManifest {
                tool: "causal-probe",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                scenario_digest: digest,
                policy: NumericPolicy::DEFAULT,
                threads,
                wall_clock_seconds: started.elapsed().as_secs_f64(),
                outputs,
            };
            let path = dir.join("manifest.json");
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            std::fs::write(&path, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            writeln!(stdout, "wrote {}", path.display()).map_err(io)?;
            for line in summary {
                writeln!(stdout, "{line}").map_err(io)?;
            }
        }
    }
    Ok(())
}

fn validate_files(
    files: &[std::path::PathBuf],
    stdout: &mut dyn Write,
    natural: bool,
) -> Result<(), CliError> {
    let mut failures = Vec::new();
    for f in files {
        let checked = build::load_scenario(f).and_then(|mut s| {
            if natural {
                s.set_natural_units();
            }
            s.compile().map(|_| ()).map_err(CliError::from)
        });
        match checked {
            Ok(()) => writeln!(stdout, "ok {}", f.display()),
            Err(e) => {
                failures.push(format!("{}: {e}", f.display()));
                writeln!(stdout, "invalid {}", f.display())
            }
        }
        .map_err(stdout_error)?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failures.join("\n")))
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let threads = configure_threads()?;
    let mut scenario = match &cli.command {
        Command::Validate(v) => return validate_files(&v.files, stdout, cli.natural_units),
        Command::Spin(a) => build::spin(a)?,
        Command::Ho(a) => build::ho(a)?,
        Command::Field(a) => build::field(a)?,
        Command::Sweep(a) => build::sweep(a)?.0,
        Command::Compare(a) => {
            let mut s = build::load_scenario(&a.scenario)?;
            if !a.schemes.is_empty() {
                s.compare = a.schemes.clone();
            }
            s
        }
    };
    if cli.natural_units {
        scenario.set_natural_units();
    }
    let digest = scenario_digest(&scenario);
    let (name, tables, summary) = match &cli.command {
        Command::Sweep(_) => {
            let spec = scenario.sweep.clone().expect("sweep spec set");
            scenario.compile()?;
            let sw = cutoff_sweep(&scenario, &spec)?;
            let mut summary = vec![format!(
                "sweep {} {}: trend {:?}",
                sw.axis, sw.metric, sw.trend
            )];
            if let Some(f) = &sw.log_log {
                summary.push(format!(
                    "log-log exponent {} (R2 {})",
                    format_value(f.slope),
                    format_value(f.r2)
                ));
            }
            summary.push(format!(
                "linear slope {} (R2 {})",
                format_value(sw.linear.slope),
                format_value(sw.linear.r2)
            ));
            ("sweep", output::sweep_tables(&sw), summary)
        }
        Command::Compare(_) => {
            let plan = scenario.compile()?;
            let ids = scenario
                .compare
                .iter()
                .map(|c| SchemeId::parse(plan.kind, c))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = compare_schemes(&plan, &ids)?;
            (
                "compare",
                vec![output::compare_table(&rows)],
                vec![format!("compared {} schemes", ids.len())],
            )
        }
        cmd => {
            let report = run(&scenario)?;
            let name = match cmd {
                Command::Spin(_) => "spin",
                Command::Ho(_) => "ho",
                _ => "field",
            };
            let summary = vec![format!(
                "{} {}: signaling measure {}",
                report.system,
                report.scheme,
                format_value(report.signaling_measure)
            )];
            (name, output::report_tables(&report), summary)
        }
    };
    let out = RunOutput {
        command: name,
        digest,
        tables,
        summary,
        started,
        threads,
    };
    emit(cli, out, stdout)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(CliError::Closed) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "causal-probe: {e}");
            e.exit_code()
        }
    }
}
