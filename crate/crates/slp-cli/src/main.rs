use clap::{Parser, Subcommand};
use slp_cli::commands::{
    cmd_coherence, cmd_critical_temp, cmd_local_energy, cmd_omega_grid, cmd_oracle_compare,
    cmd_spectrum, cmd_threshold, CoherenceArgs, CriticalTempArgs, LocalEnergyArgs, OmegaGridArgs,
    OracleCompareArgs, SpectrumArgs, ThresholdArgs,
};
use slp_cli::verify::{cmd_verify, VerifyArgs};

/// Strong local passivity toolkit: spectra, local energies, critical
/// temperatures, population thresholds, and oracle cross-checks for coupled
/// spin systems.
#[derive(Parser)]
#[command(name = "slp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and ground-state classification of a model
    Spectrum(SpectrumArgs),
    /// Local energy over the population-difference diamond of the pair
    OmegaGrid(OmegaGridArgs),
    /// Critical-temperature sweeps for the pair and chain families
    CriticalTemp(CriticalTempArgs),
    /// Local energy of one state by every applicable method
    LocalEnergy(LocalEnergyArgs),
    /// Population thresholds guaranteeing passivity or blocking charging
    Threshold(ThresholdArgs),
    /// Energy response to eigenbasis coherence on the pair
    Coherence(CoherenceArgs),
    /// Closed form against the channel-ascent oracle over a grid
    OracleCompare(OracleCompareArgs),
    /// Run the acceptance checks
    Verify(VerifyArgs),
}

fn main() {
    if let Ok(v) = std::env::var("SLP_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: SLP_THREADS must be a positive integer, got '{v}'");
                std::process::exit(slp_cli::EXIT_BAD_CONFIG);
            }
        }
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::OmegaGrid(a) => cmd_omega_grid(a),
        Command::CriticalTemp(a) => cmd_critical_temp(a),
        Command::LocalEnergy(a) => cmd_local_energy(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Coherence(a) => cmd_coherence(a),
        Command::OracleCompare(a) => cmd_oracle_compare(a),
        Command::Verify(a) => cmd_verify(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
