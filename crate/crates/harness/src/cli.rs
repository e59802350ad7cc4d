//! The `hypilab` command line, generated from the experiment schemas.

use std::ffi::OsString;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::config::{load_config_file, Experiment, Kind, RawConfig};
use crate::error::{HarnessError, Result};
use crate::run::run;

fn value_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Count { .. } => "N",
        Kind::CountOrAuto { .. } => "N|auto",
        Kind::Real(_) => "R",
        Kind::Choice(_) => "NAME",
        Kind::RealList(_) => "R,R,..",
        Kind::Flag => "",
        Kind::Path => "PATH",
    }
}

fn leaf(e: Experiment) -> Command {
    let mut cmd = Command::new(e.command().1).about(e.about());
    for spec in e.schema() {
        let mut arg = Arg::new(spec.key).long(spec.key);
        arg = match spec.kind {
            Kind::Flag => arg.action(ArgAction::SetTrue).help(spec.help),
            Kind::Choice(options) => arg
                .value_name("NAME")
                .help(format!(
                    "{}: {} [default: {}]",
                    spec.help,
                    options.join("|"),
                    spec.default.unwrap_or("")
                )),
            kind => {
                let help = match spec.default {
                    Some(d) => format!("{} [default: {d}]", spec.help),
                    None => format!("{} (required)", spec.help),
                };
                let negative = matches!(kind, Kind::Real(_) | Kind::RealList(_));
                arg.value_name(value_name(kind))
                    .allow_negative_numbers(negative)
                    .help(help)
            }
        };
        cmd = cmd.arg(arg);
    }
    if let Some(flag) = e.reps_flag() {
        cmd = cmd.arg(
            Arg::new("reps")
                .long(flag)
                .value_name("N")
                .help(format!("replicates [default: {}]", e.default_reps())),
        );
    }
    cmd
}

pub fn command() -> Command {
    let mut root = Command::new("hypilab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Seeded Monte Carlo experiments for hypi-semimetric limit theory")
        .arg(Arg::new("seed").long("seed").global(true).value_name("N").help("master seed, decimal or 0x-hex"))
        .arg(Arg::new("threads").long("threads").global(true).value_name("N|auto").help("worker threads"))
        .arg(Arg::new("out").long("out").global(true).value_name("PATH").help("output CSV (default: stdout)"))
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("TOML config or an earlier run manifest, instead of a subcommand"),
        );
    let mut groups: Vec<(&str, Command)> = Vec::new();
    for e in Experiment::ALL {
        let (group, _) = e.command();
        match groups.iter_mut().find(|(g, _)| *g == group) {
            Some((_, cmd)) => *cmd = cmd.clone().subcommand(leaf(e)),
            None => groups.push((group, Command::new(group).subcommand_required(true).subcommand(leaf(e)))),
        }
    }
    for (_, g) in groups {
        root = root.subcommand(g);
    }
    root
}

fn raw_from_matches(m: &ArgMatches) -> Result<RawConfig> {
    let mut raw = match m.get_one::<String>("config") {
        Some(path) => {
            if m.subcommand().is_some() {
                return Err(HarnessError::Config("--config cannot be combined with a subcommand".into()));
            }
            load_config_file(Path::new(path))?
        }
        None => {
            let (group, gm) = m
                .subcommand()
                .ok_or_else(|| HarnessError::Config("no subcommand or --config given".into()))?;
            let (name, lm) = gm
                .subcommand()
                .ok_or_else(|| HarnessError::Config(format!("`{group}` needs a subcommand")))?;
            let e = Experiment::ALL
                .into_iter()
                .find(|e| e.command() == (group, name))
                .ok_or_else(|| HarnessError::Config(format!("unknown command `{group} {name}`")))?;
            let mut raw = RawConfig::new(e);
            for spec in e.schema() {
                match spec.kind {
                    Kind::Flag => {
                        if lm.get_flag(spec.key) {
                            raw.params.push((spec.key.to_string(), "true".into()));
                        }
                    }
                    _ => {
                        if let Some(v) = lm.get_one::<String>(spec.key) {
                            raw.params.push((spec.key.to_string(), v.clone()));
                        }
                    }
                }
            }
            if e.reps_flag().is_some() {
                raw.reps = lm.get_one::<String>("reps").cloned();
            }
            raw
        }
    };
    // Global flags win over the file.
    for (key, slot) in [("seed", &mut raw.seed), ("threads", &mut raw.threads), ("out", &mut raw.out)] {
        if let Some(v) = m.get_one::<String>(key) {
            *slot = Some(v.clone());
        }
    }
    Ok(raw)
}

/// Parses `args` (program name first), runs, and returns the exit code.
/// Failures print one `error: kind=...` line on standard error.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: kind=usage reason={first:?}");
            return 2;
        }
    };
    let cfg = match raw_from_matches(&matches).and_then(|raw| raw.resolve()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&cfg) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
