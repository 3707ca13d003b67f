//! `natconv`: batch driver for the natural-convection solver.
//!
//! ```text
//! natconv run      [CONFIG] [--preset NAME] [--<key> <value>]...
//! natconv mesh     [CONFIG] [--preset NAME] [--<key> <value>]... [--output FILE] [--check]
//! natconv validate [CONFIG] [--preset NAME] [--<key> <value>]...
//! natconv presets  [NAME]
//! ```
//!
//! Settings are layered: defaults, then the preset, then the config file,
//! then the key flags. Every configuration key is also a flag.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};

use natconv::config::{preset, RunConfig, KEYS, PRESETS};
use natconv::mesh::{validate_mesh, write_mesh, TwoLevelMesh};
use natconv::run::{execute, exit_code, RunError};

fn config_args(cmd: Command) -> Command {
    let cmd = cmd
        .arg(
            Arg::new("config")
                .value_name("CONFIG")
                .value_parser(clap::value_parser!(PathBuf))
                .help("Configuration file"),
        )
        .arg(
            Arg::new("preset")
                .long("preset")
                .value_name("NAME")
                .help("Start from a built-in configuration"),
        );
    KEYS.iter().fold(cmd, |cmd, &key| {
        cmd.arg(
            Arg::new(key)
                .long(key)
                .alias(key.replace('_', "-"))
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help_heading("Configuration keys"),
        )
    })
}

fn cli() -> Command {
    Command::new("natconv")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Finite-element solver for natural convection in a heated box")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(config_args(
            Command::new("run").about("Run to steady state and write all outputs"),
        ))
        .subcommand(
            config_args(Command::new("mesh").about("Build the two-level mesh and write it"))
                .arg(
                    Arg::new("output")
                        .long("output")
                        .short('o')
                        .value_name("FILE")
                        .value_parser(clap::value_parser!(PathBuf))
                        .help("Mesh file to write (default: standard output)"),
                )
                .arg(
                    Arg::new("check")
                        .long("check")
                        .action(ArgAction::SetTrue)
                        .help("Also validate the mesh"),
                ),
        )
        .subcommand(config_args(
            Command::new("validate").about("Check a configuration and print it with its hash"),
        ))
        .subcommand(
            Command::new("presets")
                .about("List built-in configurations, or print one")
                .arg(Arg::new("name").value_name("NAME")),
        )
}

#[derive(Debug)]
struct CliError {
    code: i32,
    msg: String,
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError {
            code: e.exit_code(),
            msg: e.to_string(),
        }
    }
}

impl From<natconv::config::ConfigError> for CliError {
    fn from(e: natconv::config::ConfigError) -> Self {
        CliError {
            code: exit_code::CONFIG,
            msg: e.to_string(),
        }
    }
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError {
        code: exit_code::IO,
        msg: format!("{}: {e}", path.display()),
    }
}

fn load_config(m: &ArgMatches) -> Result<RunConfig, CliError> {
    let mut cfg = match m.get_one::<String>("preset") {
        Some(name) => preset(name)?,
        None => RunConfig::default(),
    };
    if let Some(path) = m.get_one::<PathBuf>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let file = RunConfig::parse(&text)?;
        // only keys present in the file override the preset
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if let Some((k, _)) = line.split_once('=') {
                let k = k.trim();
                let v = file.get(k).ok_or_else(|| natconv::config::ConfigError::Syntax {
                    line: n + 1,
                    msg: format!("unknown key `{k}`"),
                })?;
                cfg.set(k, &v)?;
            }
        }
    }
    for &key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(m: &ArgMatches) -> Result<i32, CliError> {
    let cfg = load_config(m)?;
    log::info!("config hash {}", cfg.hash());
    let r = execute(&cfg)?;
    let s = &r.summary;
    println!(
        "steps = {}  steady = {}  nu_overall = {}  nu_av_mid = {}",
        s.get("steps").unwrap_or("?"),
        s.get("steady").unwrap_or("?"),
        s.get("nu_overall").unwrap_or("?"),
        s.get("nu_av_mid").unwrap_or("?")
    );
    println!("outputs in {}", cfg.output_dir.display());
    Ok(r.exit_code())
}

fn cmd_mesh(m: &ArgMatches) -> Result<i32, CliError> {
    let cfg = load_config(m)?;
    let mesh = TwoLevelMesh::build(&cfg.partitions).map_err(RunError::from)?;
    if m.get_flag("check") {
        let report = validate_mesh(&mesh);
        eprintln!(
            "volume {} (expected {}), element volumes in [{}, {}], {} failures",
            report.total_volume,
            report.expected_volume,
            report.min_volume,
            report.max_volume,
            report.failures.len()
        );
        for f in &report.failures {
            eprintln!("  {f:?}");
        }
        if !report.is_valid() {
            return Ok(exit_code::INTERNAL);
        }
    }
    let hash = cfg.hash();
    match m.get_one::<PathBuf>("output") {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(path, e))?;
            let mut w = BufWriter::new(file);
            write_mesh(&mut w, &mesh, Some(&hash)).map_err(RunError::from)?;
            w.flush().map_err(|e| io_error(path, e))?;
        }
        None => {
            let mut w = BufWriter::new(std::io::stdout().lock());
            write_mesh(&mut w, &mesh, Some(&hash)).map_err(RunError::from)?;
            w.flush().map_err(|e| io_error(std::path::Path::new("<stdout>"), e))?;
        }
    }
    Ok(exit_code::STEADY)
}

fn cmd_validate(m: &ArgMatches) -> Result<i32, CliError> {
    let cfg = load_config(m)?;
    print!("{}", cfg.serialize());
    println!("# config_hash = {}", cfg.hash());
    Ok(exit_code::STEADY)
}

fn cmd_presets(m: &ArgMatches) -> Result<i32, CliError> {
    match m.get_one::<String>("name") {
        Some(name) => print!("{}", preset(name)?.serialize()),
        None => PRESETS.iter().for_each(|p| println!("{p}")),
    }
    Ok(exit_code::STEADY)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit_code::CONFIG as u8 } else { 0 });
        }
    };
    let result = match matches.subcommand() {
        Some(("run", m)) => cmd_run(m),
        Some(("mesh", m)) => cmd_mesh(m),
        Some(("validate", m)) => cmd_validate(m),
        Some(("presets", m)) => cmd_presets(m),
        _ => unreachable!("subcommand required"),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code as u8)
        }
    }
}
