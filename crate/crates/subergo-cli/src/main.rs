mod cli;
mod commands;
mod output;

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde_json::Value;

use subergo::subcore::parse_config;
use subergo::{Error, Model};

use cli::{Cli, Command};
use output::{emit, write_manifest, Outputs, RunManifest};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            log::error!("{e:#}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Inadmissible(_)) => 2,
        Some(Error::BracketTooWide { .. }) => 3,
        Some(Error::Coverage { .. } | Error::PatchTooSmall { .. } | Error::LengthCap { .. }) => 4,
        _ => 1,
    }
}

fn run(mut cli: Cli) -> Result<i32> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    if let Command::Replay { manifest } = &cli.command {
        let recorded = RunManifest::load(manifest)?;
        let mut replay = recorded.parameters;
        if matches!(replay.command, Command::Replay { .. }) {
            bail!("a manifest cannot record a replay");
        }
        replay.out = Some(cli.out.take().unwrap_or(recorded.out_dir));
        log::info!("replaying {} into {}", recorded.command, replay.out.as_ref().unwrap().display());
        return execute(replay);
    }
    execute(cli)
}

fn execute(mut cli: Cli) -> Result<i32> {
    let start = Instant::now();
    let path = cli.config.clone().context("--config is required")?;
    let path = fs::canonicalize(&path).with_context(|| format!("config {}", path.display()))?;
    cli.config = Some(path.clone());
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let spec = parse_config(&text)?;
    let name = config_name(&text, &path);

    let outputs = match &cli.command {
        Command::Analyze { tec2_max_k } => commands::analyze(&spec, &name, *tec2_max_k)?,
        cmd => {
            let model = Model::from_spec(&spec)?;
            match cmd {
                Command::Density(a) => commands::density(&model, &name, a, cli.seed)?,
                Command::SecondOrder(a) => commands::second_order(&model, &name, a, cli.seed)?,
                Command::Frequency(a) => commands::frequency(&model, &name, a, cli.seed)?,
                Command::Logfreq(a) => commands::logfreq(&model, &name, a, cli.seed)?,
                Command::Distribution(a) => commands::distribution(&model, &name, a, cli.seed)?,
                Command::Analyze { .. } | Command::Replay { .. } => unreachable!(),
            }
        }
    };
    finish(&cli, outputs, start)
}

fn finish(cli: &Cli, outputs: Outputs, start: Instant) -> Result<i32> {
    emit(&outputs, cli.out.as_deref())?;
    if let Some(dir) = cli.out.as_deref() {
        let dir = fs::canonicalize(dir)?;
        let manifest = RunManifest::new(cli, &dir, &outputs, start.elapsed().as_secs_f64());
        write_manifest(&manifest, &dir)?;
    }
    Ok(outputs.exit_code)
}

fn config_name(text: &str, path: &Path) -> String {
    serde_json::from_str::<Value>(text)
        .ok()
        .and_then(|v| v.get("name").and_then(Value::as_str).map(str::to_string))
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_default()
}
