//! Command-line front end: argument parsing, orchestration and output.

pub mod config;
pub mod emit;

use prismbell_core::{chsh, estimate_with, lhv_max_chsh, run_sweep_with_workers, ModelError, SweepRow};
use thiserror::Error;

pub use config::{parse_cli, CliError, Command, RunConfig};
pub use emit::{emit, render, EmitError, Meta, OutputFormat, Payload, Sink};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

/// Renders the output of `config` without writing it anywhere.
pub fn render_config(config: &RunConfig) -> Result<String, RunError> {
    let format = config.format;
    let text = match &config.command {
        Command::Exact { params, prep } => {
            let table = prismbell_core::analytic::expectation_table(params, prep);
            let row = SweepRow {
                regime: prep.regime(),
                n: params.n(),
                epsilon: params.epsilon(),
                rho: params.rho(),
                i_value: chsh(params, prep).i,
                i_stderr: 0.0,
            };
            render(
                Payload::Rows {
                    rows: &[row],
                    table: Some(&table),
                    meta: Meta::new(config.seed, "exact"),
                },
                format,
            )?
        }
        Command::Simulate {
            params,
            prep,
            trials,
            workers,
        } => {
            let report = estimate_with(params, prep, *trials, config.seed, *workers)?;
            render(Payload::Estimate(&report), format)?
        }
        Command::Sweep { spec, workers, .. } => {
            let rows = run_sweep_with_workers(spec, *workers)?;
            let mode = match spec.mode {
                prismbell_core::SweepMode::Exact => "exact",
                prismbell_core::SweepMode::MonteCarlo { .. } => "montecarlo",
            };
            render(
                Payload::Rows {
                    rows: &rows,
                    table: None,
                    meta: Meta::new(config.seed, mode),
                },
                format,
            )?
        }
        Command::Lhv => render(Payload::Certificate(&lhv_max_chsh()), format)?,
    };
    Ok(text)
}

/// Runs `config`, writes its output, and returns the number of bytes written.
pub fn run(config: &RunConfig) -> Result<usize, RunError> {
    let text = render_config(config)?;
    let sink = Sink::from_option(config.out.as_deref());
    emit::write_bytes(text.as_bytes(), &sink)?;
    if let Command::Sweep {
        plot_script: Some(script),
        ..
    } = &config.command
    {
        let data = config
            .out
            .as_ref()
            .map_or_else(|| "sweep.csv".to_string(), |p| p.display().to_string());
        emit::write_bytes(emit::plot_script(&data).as_bytes(), &Sink::File(script.clone()))?;
    }
    Ok(text.len())
}
