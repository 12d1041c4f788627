//! `actscan` command-line tool. Exit codes: 0 success, 1 usage error,
//! 2 data error.

mod args;
mod commands;
mod run_manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use run_manifest::RunManifest;

pub const JOBS_ENV: &str = "ACTSCAN_JOBS";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl From<actscan::Error> for Failure {
    fn from(e: actscan::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn resolve_jobs(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let jobs = match flag {
        Some(n) => Some(n),
        None => match std::env::var(JOBS_ENV) {
            Ok(v) if !v.trim().is_empty() => {
                Some(v.trim().parse().map_err(|_| Failure::Usage(format!("{JOBS_ENV}={v} is not a thread count")))?)
            }
            _ => None,
        },
    };
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    Ok(jobs)
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

/// Run a parsed command and write its run manifest.
fn execute(cli: Cli, args: Vec<String>) -> Result<(), Failure> {
    if let Command::Rerun(r) = &cli.command {
        return rerun(&r.run_manifest, r.out.as_deref(), cli.jobs);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_jobs(cli.jobs)?.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Data(format!("cannot start worker threads: {e}")))?;
    let seed = cli.seed;
    let outcome = pool.install(|| match &cli.command {
        Command::Layers(a) => commands::layers(a, seed),
        Command::Scan(a) => commands::scan_cmd(a, seed),
        Command::Localize(a) => commands::localize(a, seed),
        Command::Overlap(a) => commands::overlap(a),
        Command::SynthPower(a) => commands::synth_power(a, seed),
        Command::PlotData(a) => commands::plot_data(a, seed),
        Command::Rerun(_) => unreachable!(),
    })?;

    let inputs: Vec<run_manifest::InputFile> =
        outcome.inputs.iter().map(|p| run_manifest::file_digest(p)).collect::<Result<_, _>>()?;
    let mut config = serde_json::to_vec(&cli).map_err(|e| Failure::Data(e.to_string()))?;
    // file names matter (overlap names sets after them); directories do not
    for i in &inputs {
        config.push(b'\n');
        config.extend_from_slice(i.path.file_name().map(|n| n.as_encoded_bytes()).unwrap_or_default());
        config.push(b'=');
        config.extend_from_slice(i.sha256.as_bytes());
    }
    let manifest = RunManifest {
        tool: "actscan".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        args,
        cwd: absolute(Path::new(".")),
        config_hash: run_manifest::sha256_hex(&config),
        seed,
        jobs: pool.current_num_threads(),
        inputs,
        outputs: outcome.outputs.clone(),
        created_unix: run_manifest::now_unix(),
    };
    let main_out = outcome.outputs.first().expect("every command writes an output");
    commands::write_json(&run_manifest::manifest_path(main_out), &manifest)
}

fn rerun(path: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<(), Failure> {
    let recorded = run_manifest::load(path)?;
    let out = out.map(absolute);
    std::env::set_current_dir(&recorded.cwd)
        .map_err(|e| Failure::Data(format!("cannot enter recorded directory {}: {e}", recorded.cwd.display())))?;
    let mut args = match &out {
        Some(o) => run_manifest::replace_out(&recorded.args, o),
        None => recorded.args.clone(),
    };
    if let Some(j) = jobs {
        args.push(format!("--jobs={j}"));
    }
    let cli = Cli::try_parse_from(std::iter::once("actscan".to_string()).chain(args.iter().cloned()))
        .map_err(|e| Failure::Data(format!("recorded arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(Failure::Data("a run manifest cannot record a rerun".into()));
    }
    execute(cli, args)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let text = e.render().to_string();
                    eprint!("{text}");
                    if !text.contains("Usage:") {
                        eprintln!("\n{}", Cli::command().render_usage());
                    }
                    ExitCode::from(1)
                }
            };
        }
    };
    match execute(cli, argv[1..].to_vec()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
