use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use homsim::experiment::{
    cmd_analyze, cmd_calibrate_coupler, cmd_simulate, cmd_sweep_power, cmd_sweep_pump,
    ExperimentConfig,
};

/// On-chip HOM experiment simulator.
#[derive(Parser)]
#[command(name = "homsim", version)]
struct Cli {
    /// Experiment configuration file (TOML).
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset: paper_fig4a, paper_fig4b or paper_supp_power.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Overrides acquisition.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for delay points (default: all cores).
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a delay scan and fit the dip.
    Simulate,
    /// Fit a scan CSV or re-count a tag manifest and fit it.
    Analyze {
        input: PathBuf,
        /// Centre wavelength for the bandwidth estimate; taken from the
        /// manifest or the config when not given.
        #[arg(long)]
        wavelength_nm: Option<f64>,
    },
    /// Predicted (and optionally simulated) visibility against pump wavelength.
    SweepPump {
        #[arg(long, value_delimiter = ',')]
        wavelengths_nm: Option<Vec<f64>>,
        /// Also run the full Monte Carlo scan per wavelength.
        #[arg(long)]
        simulate: bool,
    },
    /// Repeat the scan at several pump powers.
    SweepPower {
        #[arg(long, value_delimiter = ',')]
        powers_mw: Option<Vec<f64>>,
    },
    /// Fit the coupler model to measured 50:50 points.
    CalibrateCoupler {
        /// `GAP_NM:LENGTH_UM`, at least two.
        #[arg(long = "anchor", required = true)]
        anchors: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "350,370,400,430,460")]
        gaps_nm: Vec<f64>,
        #[arg(long, default_value_t = 400.0)]
        mz_gap_nm: f64,
        #[arg(long, default_value_t = 1554.2)]
        wavelength_nm: f64,
    },
}

fn load_config(cli: &Cli) -> Result<Option<ExperimentConfig>> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => return Ok(None),
    };
    if let Some(seed) = cli.seed {
        cfg.acquisition.seed = Some(seed);
    }
    Ok(Some(cfg))
}

fn parse_anchor(s: &str) -> Result<(f64, f64)> {
    let (g, l) = s
        .split_once(':')
        .with_context(|| format!("anchor `{s}` is not GAP_NM:LENGTH_UM"))?;
    Ok((
        g.trim()
            .parse()
            .with_context(|| format!("bad gap in anchor `{s}`"))?,
        l.trim()
            .parse()
            .with_context(|| format!("bad length in anchor `{s}`"))?,
    ))
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let need = || {
        cfg.as_ref()
            .context("this command needs --config or --preset")
    };
    match &cli.command {
        Command::Simulate => print!("{}", cmd_simulate(need()?, &cli.out)?.summary),
        Command::Analyze {
            input,
            wavelength_nm,
        } => {
            let lambda = match (wavelength_nm, &cfg) {
                (Some(l), _) => *l,
                (None, Some(c)) => c.circuit.wavelength_nm,
                (None, None) => 1550.0,
            };
            print!("{}", cmd_analyze(input, lambda, Some(&cli.out))?.summary);
        }
        Command::SweepPump {
            wavelengths_nm,
            simulate,
        } => {
            let cfg = need()?;
            let simulate = *simulate || cfg.sweep.simulate_pump_sweep;
            print!(
                "{}",
                cmd_sweep_pump(cfg, wavelengths_nm.as_deref(), simulate, &cli.out)?.summary
            );
        }
        Command::SweepPower { powers_mw } => {
            print!(
                "{}",
                cmd_sweep_power(need()?, powers_mw.as_deref(), &cli.out)?.summary
            );
        }
        Command::CalibrateCoupler {
            anchors,
            gaps_nm,
            mz_gap_nm,
            wavelength_nm,
        } => {
            let anchors: Vec<(f64, f64)> = anchors
                .iter()
                .map(|a| parse_anchor(a))
                .collect::<Result<_>>()?;
            if anchors.len() < 2 {
                bail!("at least two anchors are needed");
            }
            print!(
                "{}",
                cmd_calibrate_coupler(&anchors, gaps_nm, *mz_gap_nm, *wavelength_nm, &cli.out)?
                    .summary
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.parallel {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(e.into()),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
