#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod config;
mod design;
mod report;
mod run;
mod tables;

use config::{LossFlag, Overrides, RunConfig, Scenario};

#[derive(Parser, Debug)]
#[command(name = "dmnkit", version, about = "Decoupling and matching networks for two- and three-element dipole arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the design flow and write design_report.json and netlist.json
    Design(Flags),
    /// Design, then sweep: adds sweep.s2p, sweep.csv and bandwidth.json
    Sweep(Flags),
    /// Sweep every scenario into its own directory plus compare.csv
    Compare(Flags),
    /// Print the design tables with published values and deviations
    Tables(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reference frequency in Hz
    #[arg(long)]
    fr: Option<f64>,
    /// Element spacing in wavelengths
    #[arg(long)]
    spacing: Option<f64>,
    /// Sweep points
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    loss: Option<LossFlag>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the published array impedances instead of the EMF model at f_r
    #[arg(long)]
    published_z: bool,
}

impl Flags {
    fn load(&self) -> Result<RunConfig> {
        let overrides = Overrides {
            scenario: self.scenario,
            reference_frequency_hz: self.fr,
            spacing_wavelengths: self.spacing,
            points: self.points,
            loss: self.loss,
            output_dir: self.out.clone(),
            published_z: self.published_z,
        };
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Design(f) => single(&f.load()?, false),
        Command::Sweep(f) => single(&f.load()?, true),
        Command::Compare(f) => {
            let cfg = f.load()?;
            run::run_compare(&cfg, &cfg.output_dir)
        }
        Command::Tables(f) => {
            let cfg = f.load()?;
            let scenarios: Vec<Scenario> = match cfg.scenario {
                Scenario::Compare => Scenario::DESIGNS.to_vec(),
                s => vec![s],
            };
            for s in scenarios {
                print!("{}", tables::render(&design::design(&cfg, s)?));
            }
            Ok(())
        }
    }
}

fn single(cfg: &RunConfig, sweep: bool) -> Result<()> {
    if cfg.scenario == Scenario::Compare {
        return run::run_compare(cfg, &cfg.output_dir);
    }
    run::run_scenario(cfg, cfg.scenario, &cfg.output_dir, sweep)?;
    Ok(())
}
