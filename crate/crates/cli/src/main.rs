//! `sg-ist`: command-line driver for the sine-Gordon inverse-scattering toolkit.
//!
//! Exit status: 0 when everything ran and every gate passed, 1 on errors,
//! 3 when a tolerance gate failed (usage errors keep clap's 2).

mod compare;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use sg_ist::asymptotics::asymptote;
use sg_ist::config::Config;
use sg_ist::diagnostics::{compare_fields, fit_decay_exponent, weighted_norm_sq, NormKind, WeightedNormSpec};
use sg_ist::field::{uniform_grid, BreatherParams, Field, KinkParams, WobblerParams};
use sg_ist::inverse::{reconstruct_full, reconstruct_reflectionless};
use sg_ist::io;
use sg_ist::pde::evolve;
use sg_ist::scattering::{scatter, ScatteringData};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit code for a failed tolerance gate.
pub const GATE_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "sg-ist", version, about = "Inverse scattering toolkit for f_tt - f_xx + sin f = 0")]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print the effective configuration with documented defaults and exit.
    #[arg(long)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a closed-form solution or an N-soliton from discrete data.
    Exact(ExactArgs),
    /// Direct transform of a field: reflection coefficient and discrete spectrum.
    Scatter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Finite-difference evolution with checkpoints and an energy log.
    Evolve {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated checkpoint times; the last one is the final time.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Reconstruct the field from scattering data.
    Invert {
        #[arg(long)]
        data: PathBuf,
        /// Grid as lo:hi:h.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the long-time formulas on a grid at time t.
    Asymptote {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the asymptotic description against the PDE oracle.
    Compare(compare::CompareArgs),
    /// Weighted norms, field differences and decay fits.
    Norms(NormsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Solution {
    Kink,
    Antikink,
    Breather,
    Wobbler,
    Nsoliton,
}

#[derive(Args, Debug)]
struct ExactArgs {
    solution: Solution,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    /// Breather velocity.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x2: f64,
    /// Wobbler frequency; defaults to the exact branch sqrt(1 - beta^2).
    #[arg(long)]
    alpha: Option<f64>,
    /// Scattering data for nsoliton.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value = "-30:30:0.01", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    H1sin,
    L2s,
    Localized,
}

#[derive(Args, Debug)]
struct NormsArgs {
    /// One or more FieldState CSVs.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, value_enum, default_value_t = KindArg::H1sin)]
    kind: KindArg,
    /// Use |x| instead of <x> as the weight.
    #[arg(long)]
    homogeneous: bool,
    /// Frame velocity of the localized norm.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Window half-width of the localized norm.
    #[arg(long = "L", default_value_t = 10.0)]
    l: f64,
    /// Difference each input against this state.
    #[arg(long)]
    against: Option<PathBuf>,
    /// Comparison window lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Metrics JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad grid component '{s}'")))
        .collect::<Result<_>>()?;
    let [lo, hi, h] = parts[..] else { bail!("grid must be lo:hi:h, got '{spec}'") };
    Ok(uniform_grid(lo, hi, h)?)
}

fn parse_window(spec: &str) -> Result<(f64, f64)> {
    let (a, b) = spec.split_once(':').with_context(|| format!("window must be lo:hi, got '{spec}'"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => Config::default(),
    };
    for o in &cli.overrides {
        cfg.set(o)?;
    }
    Ok(cfg)
}

fn cmd_exact(a: &ExactArgs) -> Result<()> {
    let xs = parse_grid(&a.grid)?;
    let state = match a.solution {
        Solution::Kink | Solution::Antikink => {
            let sign = if a.solution == Solution::Kink { 1 } else { -1 };
            KinkParams::new(a.beta, a.x0, sign)?.sample(&xs, a.t)?
        }
        Solution::Breather => BreatherParams::new(a.beta, a.v, a.x1, a.x2)?.sample(&xs, a.t)?,
        Solution::Wobbler => {
            let w = match a.alpha {
                Some(al) => WobblerParams::new(a.beta, al)?,
                None => WobblerParams::exact(a.beta)?,
            };
            w.sample(&xs, a.t)?
        }
        Solution::Nsoliton => {
            let path = a.spec.as_ref().context("nsoliton needs --spec data.json")?;
            let data = io::read_scattering_json(path)?;
            if !data.is_reflectionless() {
                eprintln!("note: dropping r (sup|r| = {:.3e}), keeping the discrete spectrum", data.sup_r());
            }
            let mut discrete = ScatteringData::reflectionless(data.kinks, data.breathers);
            discrete.meta = data.meta;
            reconstruct_reflectionless(&discrete, &xs, a.t)?.state
        }
    };
    io::write_field_csv(&a.out, &state)?;
    Ok(())
}

fn cmd_invert(cfg: &Config, data: &PathBuf, grid: &str, t: f64, out: &PathBuf) -> Result<()> {
    let data = io::read_scattering_json(data)?;
    let xs = parse_grid(grid)?;
    let state = if data.is_reflectionless() {
        reconstruct_reflectionless(&data, &xs, t)?.state
    } else {
        let full = reconstruct_full(&data, &xs, t, &cfg.full_config()?)?;
        eprintln!(
            "full reconstruction: {} GMRES iterations, dual residual {:.3e}, sup|r| {:.3}",
            full.iterations, full.dual_residual, full.sup_r
        );
        full.state
    };
    io::write_field_csv(out, &state)?;
    Ok(())
}

fn cmd_norms(a: &NormsArgs) -> Result<()> {
    let spec = match a.kind {
        KindArg::H1sin => WeightedNormSpec::weighted(a.s, NormKind::H1SinL2s)?,
        KindArg::L2s => WeightedNormSpec::weighted(a.s, NormKind::L2s)?,
        KindArg::Localized => WeightedNormSpec::localized(a.c, a.l)?,
    };
    let spec = if a.homogeneous { spec.homogeneous() } else { spec };
    let reference = a.against.as_ref().map(|p| io::read_field_csv(p)).transpose()?;
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let mut samples = Vec::new();
    let mut metrics = None;
    for p in &a.input {
        let st = io::read_field_csv(p)?;
        let value = weighted_norm_sq(&st, &spec)?;
        println!("{} t={} norm_sq={value:e}", p.display(), st.t);
        samples.push((st.t, value));
        if let Some(r) = &reference {
            let m = compare_fields(&st, r, window)?;
            println!("{} max={:e} l2={:e} windowed_l2={:e}", p.display(), m.max, m.l2, m.windowed_l2);
            metrics = Some(m);
        }
    }
    let fit = if samples.len() >= 3 { Some(fit_decay_exponent(&samples)?) } else { None };
    if let Some(f) = &fit {
        println!("slope={} stderr={}", f.slope, f.stderr);
    }
    if let Some(out) = &a.out {
        let mut m = metrics.unwrap_or(sg_ist::diagnostics::Metrics {
            max: f64::NAN,
            l2: f64::NAN,
            windowed_l2: f64::NAN,
            slope: None,
            stderr: None,
        });
        if let Some(f) = &fit {
            m = m.with_fit(f);
        }
        io::write_metrics_json(out, &m)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    if cli.print_config {
        print!("{}", cfg.render());
        return Ok(true);
    }
    if let Some(n) = cfg.threads()? {
        // only fails if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let Some(cmd) = &cli.command else { bail!("no subcommand given (try --help)") };
    match cmd {
        Command::Exact(a) => cmd_exact(a)?,
        Command::Scatter { input, out } => {
            let st = io::read_field_csv(input)?;
            let data = scatter(&st, &cfg.scatter_options()?)?;
            eprintln!(
                "{} kinks, {} breathers, sup|r| {:.3e}",
                data.kinks.len(),
                data.breathers.len(),
                data.sup_r()
            );
            io::write_scattering_json(out, &data)?;
        }
        Command::Evolve { input, times, out_dir } => {
            let st = io::read_field_csv(input)?;
            let t_final = times.iter().cloned().fold(st.t, f64::max) - st.t;
            let tr = evolve(&st, &cfg.solver_config(t_final)?, times)?;
            std::fs::create_dir_all(out_dir)?;
            for (k, s) in tr.states.iter().enumerate() {
                io::write_field_csv(&out_dir.join(format!("state_{k:03}.csv")), s)?;
            }
            io::write_energy_csv(&out_dir.join("energy.csv"), &tr.log)?;
        }
        Command::Invert { data, grid, t, out } => cmd_invert(&cfg, data, grid, *t, out)?,
        Command::Asymptote { data, grid, t, out } => {
            let data = io::read_scattering_json(data)?;
            let xs = parse_grid(grid)?;
            let acfg = cfg.asymptotics_config()?;
            let rows: Vec<_> =
                xs.par_iter().map(|&x| asymptote(&data, x, *t, &acfg)).collect::<sg_ist::Result<_>>()?;
            io::write_asymptote_csv(out, &rows)?;
        }
        Command::Compare(a) => return compare::run(&cfg, a),
        Command::Norms(a) => cmd_norms(a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(GATE_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
