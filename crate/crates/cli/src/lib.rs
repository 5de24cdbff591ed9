//! Command-line front end for `orbitope-core`.
//!
//! [`run`] parses argv, merges an optional `key=value` config file with the flags,
//! dispatches to a subcommand and writes a versioned JSON (or CSV) report.

pub mod commands;
pub mod params;
pub mod report;
pub mod verify;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches, Command};
use orbitope_core::OrbitopeError;

use crate::commands::{Kind, SUBCOMMANDS};
use crate::params::{parse_config, Params};
use crate::report::{Format, Report};

/// Failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    /// Validation or usage error (exit 2).
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    /// Runtime failure (exit 1).
    pub fn failure(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<OrbitopeError> for CliError {
    fn from(e: OrbitopeError) -> Self {
        use OrbitopeError::*;
        match e {
            InvalidArgument(_) | DimensionMismatch { .. } | ExpansionBudget { .. } | Budget(_) | UnsupportedDimension(_)
            | Parse(_) => CliError::usage(e.to_string()),
            EigenNoConvergence { .. } | AmbiguousClusters { .. } | DegenerateOrbit(_) | Invariant(_) => {
                CliError::failure(e.to_string())
            }
        }
    }
}

pub const THREADS_ENV: &str = "ORBITOPE_THREADS";

fn cli() -> Command {
    let mut cmd = Command::new("orbitope")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Orbit hull ellipsoids, TSP polytope radii, comass and sphere-norm experiments")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("flat key=value file; flags override it"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .value_name("PATH")
                .help("write the report here instead of stdout"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_parser(["json", "csv"])
                .default_value("json"),
        );
    for sc in SUBCOMMANDS {
        let mut sub = Command::new(sc.name).about(sc.about);
        for p in sc.params {
            let arg = Arg::new(p.name).long(p.name).help(p.help);
            sub = sub.arg(match p.kind {
                Kind::Value => arg.value_name("VALUE").num_args(1),
                Kind::Flag => arg.action(ArgAction::SetTrue),
            });
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn flag_values(sub: &ArgMatches, name: &str) -> BTreeMap<String, String> {
    let spec = SUBCOMMANDS.iter().find(|s| s.name == name).expect("known subcommand");
    let mut out = BTreeMap::new();
    for p in spec.params {
        match p.kind {
            Kind::Value => {
                if let Some(v) = sub.get_one::<String>(p.name) {
                    out.insert(p.name.to_string(), v.clone());
                }
            }
            Kind::Flag => {
                if sub.get_flag(p.name) {
                    out.insert(p.name.to_string(), "true".into());
                }
            }
        }
    }
    out
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::failure(format!("thread pool: {e}")))
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&matches) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(matches: &ArgMatches) -> Result<i32, CliError> {
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let spec = SUBCOMMANDS.iter().find(|s| s.name == name).expect("known subcommand");
    let format = match sub.get_one::<String>("format").map(String::as_str) {
        Some("csv") => Format::Csv,
        _ => Format::Json,
    };
    let out = sub.get_one::<String>("out").cloned();
    let file = match sub.get_one::<String>("config") {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {path}: {e}")))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    let allowed: Vec<&str> = spec.params.iter().map(|p| p.name).collect();
    let mut params = Params::merge(file, flag_values(sub, name), &allowed)?;
    if format == Format::Csv && !spec.tabular {
        return Err(CliError::usage(format!("{name} is not a tabular sweep; --format csv is not available")));
    }

    let pool = thread_pool()?;
    let start = Instant::now();
    let outcome = match &pool {
        Some(p) => p.install(|| (spec.handler)(&mut params)),
        None => (spec.handler)(&mut params),
    }?;
    let elapsed = start.elapsed().as_secs_f64();
    let unused = params.unused();
    if !unused.is_empty() {
        return Err(CliError::usage(format!("{name} does not use: {}", unused.join(", "))));
    }

    let report = Report::new(name, params.echo(), outcome.seed, outcome.result, outcome.pass);
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report::to_csv(&report.result)?,
    };
    match &out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::failure(format!("cannot write {path}: {e}")))?;
            let timing = serde_json::json!({ "command": name, "wall_time_s": elapsed });
            let side = format!("{path}.timing.json");
            std::fs::write(&side, timing.to_string()).map_err(|e| CliError::failure(format!("cannot write {side}: {e}")))?;
        }
        None if outcome.stdout.is_none() => {
            let mut so = std::io::stdout().lock();
            let _ = so.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = so.write_all(b"\n");
            }
        }
        None => {}
    }
    if let Some(s) = &outcome.stdout {
        println!("{s}");
    }
    eprintln!("{name}: wall time {elapsed:.3} s");
    Ok(match outcome.pass {
        Some(false) => 1,
        _ => 0,
    })
}
