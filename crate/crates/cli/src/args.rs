use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sinailab", version, about = "Lyapunov spectra, SRB measures and entropy estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lyapunov spectrum along a seeded orbit.
    Lyapunov(LyapunovArgs),
    /// Entropy estimates, optionally cross-validated.
    Entropy(EntropyArgs),
    /// Parameter sweep driven by a config file.
    Sweep(SweepArgs),
    /// Integrability, regularity and domination diagnostics.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores). SINAILAB_WORKERS takes precedence.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args, Clone)]
pub struct SystemArgs {
    /// cat, cat4, mp, da, skew, viana, identity
    #[arg(long)]
    pub system: String,
    /// System parameter, repeatable: `--param alpha=0.5`.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub steps: usize,
    #[arg(long, default_value = "1000", value_parser = parse_count)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub blocks: usize,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub common: Common,
    /// pesin, ls, jacobian or all
    #[arg(long, default_value = "all", value_parser = parse_method)]
    pub method: String,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, default_value_t = 40)]
    pub nmax: usize,
    /// Dimension of the unstable bundle; inferred from the spectrum if absent.
    #[arg(long = "dimF")]
    pub dim_f: Option<usize>,
    /// Spectrum length for the Pesin estimate.
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    pub steps: usize,
    /// Birkhoff cloud size.
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    pub length: usize,
    #[arg(long, default_value = "1000", value_parser = parse_count)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 40)]
    pub n_transient: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep config file.
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_parser = parse_method)]
    pub method: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long = "dimF")]
    pub dim_f: Option<usize>,
    /// Also write sweep.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "dimF")]
    pub dim_f: Option<usize>,
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    pub length: usize,
    #[arg(long, default_value = "1000", value_parser = parse_count)]
    pub burn_in: usize,
    /// Base points for the domination test.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[arg(long, default_value_t = 40)]
    pub n_transient: usize,
    /// Bound for |∫ log|det Df||.
    #[arg(long, default_value_t = 10.0)]
    pub jacobian_bound: f64,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_count(s: &str) -> Result<usize, String> {
    sinailab::sweep::parse_count(s).ok_or_else(|| format!("'{s}' is not a non-negative integer"))
}

fn parse_method(s: &str) -> Result<String, String> {
    sinailab::sweep::parse_method(s)
        .map(|_| s.to_string())
        .ok_or_else(|| format!("unknown method '{s}' (pesin, ls, jacobian, all)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_float_notation() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert!(parse_count("1.5").is_err());
    }

    #[test]
    fn params_split_on_equals() {
        assert_eq!(parse_param("alpha = 0.5"), Ok(("alpha".into(), 0.5)));
        assert!(parse_param("alpha").is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
