use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wpucn::allocation::{plan, ApproachKind, WetApproach};
use wpucn::harness::{
    default_series, parse_series, run_allocation_table, run_validation, run_wet_sweep, write_metric_csv,
    write_table_csv, SweepAxis, SweepSpec,
};
use wpucn::propagation::{total_downlink_loss, uplink_loss, Source};
use wpucn::scenario::{compute_geometry, load_scenario_file, Position};
use wpucn::soil::scenario_medium;
use wpucn::units::linear_to_db;
use wpucn::wet::Scheme;
use wpucn::{Error, Scenario};

#[derive(Parser)]
#[command(name = "wpucn", version, about = "UAV-assisted wireless-powered underground sensor network simulator")]
struct Cli {
    /// Scenario file (flat TOML). Defaults apply to absent keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials (sweeps) or fading draws (allocation).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Soil permittivity, attenuation constants and path-loss breakdown.
    ChannelReport {
        #[arg(long)]
        vwc: Option<f64>,
        /// Clay mass fraction.
        #[arg(long)]
        clay: Option<f64>,
        /// Carrier frequency, Hz.
        #[arg(long)]
        freq: Option<f64>,
    },
    /// Worst-case incident power over an axis, as CSV.
    WetSweep {
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated, strictly increasing axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Series such as `ps:AASS-II,uav:RAB,hybrid:AASS-II+RAB`. Defaults to
        /// every CSI-free scheme at each source plus the hybrid.
        #[arg(long)]
        series: Option<String>,
    },
    /// Energy-minimal time allocation for one approach.
    Allocate {
        #[arg(long, default_value = "hybrid")]
        approach: ApproachKind,
        #[arg(long, default_value = "AASS-II")]
        scheme_hap: Scheme,
        #[arg(long, default_value = "RAB")]
        scheme_uav: Scheme,
        /// Per-sensor data volume, bits.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// All six approach x CSI rows of the allocation comparison.
    Table3 {
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Built-in oracle and golden-value checks.
    Validate {
        /// Only modules whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Directory holding soil.json and physics.json; embedded copies otherwise.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
    },
}

enum Failure {
    Config(Error),
    Validation(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Validation { .. } => Failure::Config(e),
            other => Failure::Runtime(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn scenario(cli: &Cli) -> Result<Scenario, Failure> {
    match &cli.config {
        Some(p) => load_scenario_file(p).map_err(|e| match e {
            Error::Io(_) => Failure::Config(e),
            other => other.into(),
        }),
        None => Ok(Scenario::default()),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut s = scenario(cli)?;
    match &cli.command {
        Command::ChannelReport { vwc, clay, freq } => {
            s.vwc = vwc.unwrap_or(s.vwc);
            s.clay = clay.unwrap_or(s.clay);
            s.carrier_freq = freq.unwrap_or(s.carrier_freq);
            s.validate()?;
            let medium = scenario_medium(&s)?;
            let k = s.constants();
            let g = compute_geometry(&s, Position { x: 0.0, y: 0.0, z: -s.burial_depth });
            let hap = total_downlink_loss(&g, Source::Hap, &medium, s.pathloss_exp_p2u, s.carrier_freq, &k);
            let uav = total_downlink_loss(&g, Source::Uav, &medium, s.pathloss_exp_v2u, s.carrier_freq, &k);
            let up = uplink_loss(&g, Source::Uav, &medium, s.pathloss_exp_v2u, s.carrier_freq, &k);
            let mut w = output(&cli.out)?;
            writeln!(w, "eps_real      {:.6}", medium.eps_real)?;
            writeln!(w, "eps_imag      {:.6}", medium.eps_imag)?;
            writeln!(w, "source        {:?}", medium.source)?;
            writeln!(w, "alpha_np_m    {:.6}", hap.alpha)?;
            writeln!(w, "beta_rad_m    {:.6}", hap.beta)?;
            writeln!(w, "# centre sensor, dB: air J, refraction K, soil M, total")?;
            for (name, b) in [("hap_downlink", hap), ("uav_downlink", uav)] {
                let [j, kk, m, t] = b.db();
                writeln!(w, "{name:<13} {j:.3} {kk:.3} {m:.3} {t:.3}")?;
            }
            writeln!(w, "uav_uplink    {:.3}", linear_to_db(up))?;
            if hap.refraction_k_a2u < 1.0 {
                writeln!(
                    w,
                    "note: refraction factor below unity ({:.3} dB) for this soil",
                    linear_to_db(hap.refraction_k_a2u)
                )?;
            }
        }
        Command::WetSweep { axis, values, series } => {
            let approaches = match series {
                Some(t) => parse_series(t)?,
                None => default_series(),
            };
            let spec = SweepSpec {
                axis: *axis,
                values: values.clone(),
                approaches,
                trials: cli.trials.unwrap_or(500),
                base: s,
                seed: cli.seed,
            };
            let rows = run_wet_sweep(&spec)?;
            write_metric_csv(&rows, *axis, output(&cli.out)?)?;
        }
        Command::Allocate { approach, scheme_hap, scheme_uav, gamma } => {
            if let Some(g) = gamma {
                s.throughput_gamma = *g;
            }
            if let Some(t) = cli.trials {
                s.fading_draws = t;
            }
            s.validate()?;
            let p = plan(&s, WetApproach::new(*approach, *scheme_hap, *scheme_uav), cli.seed)?;
            let mut w = output(&cli.out)?;
            serde_json::to_writer_pretty(&mut w, &p).map_err(|e| Failure::Runtime(Error::Infeasible(e.to_string())))?;
            writeln!(w)?;
        }
        Command::Table3 { gamma } => {
            if let Some(g) = gamma {
                s.throughput_gamma = *g;
            }
            s.fading_draws = cli.trials.unwrap_or(500);
            s.validate()?;
            let rows = run_allocation_table(&s, cli.seed)?;
            match &cli.out {
                Some(_) => write_table_csv(&rows, output(&cli.out)?)?,
                None => {
                    let mut w = io::stdout().lock();
                    writeln!(
                        w,
                        "{:<22} {:>8} {:>9} {:>9} {:>9} {:>9} {:>10} {:>9}",
                        "approach", "csi", "T_p1", "T_p2", "T_p3", "T_p4", "T_total", "E_s kJ"
                    )?;
                    for r in &rows {
                        writeln!(
                            w,
                            "{:<22} {:>8} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>10.2} {:>9.2}",
                            r.approach, r.csi, r.t_p1, r.t_p2, r.t_p3, r.t_p4, r.t_total, r.e_s_kj
                        )?;
                    }
                }
            }
        }
        Command::Validate { filter, golden_dir } => {
            let report = run_validation(filter.as_deref(), golden_dir.as_deref())?;
            let mut w = output(&cli.out)?;
            writeln!(w, "{report}")?;
            if !report.passed() {
                return Err(Failure::Validation("validation checks failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
