//! `xdiscord` — quantum discord for two-qubit X states.
//!
//! Subcommands: `compute` (one state), `sweep` (worst-case search),
//! `verify` (reference worst-case states), `curve` (θ sweep as CSV).
//! Exit codes: 0 success, 2 input/config error, 3 assertion/verification
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use xdiscord::cli::{curve_csv, curve_rows, fmt_sig, ComputeOutput};
use xdiscord::sweep::{
    atomic_write, cells_to_csv, run_sweep_detailed, verify_counterexamples_with, SweepConfig,
    SweepError, SweepMode, DEFAULT_GAP_TOL, DEFAULT_THETA_TOL,
};
use xdiscord::{XState, XStateRaw, NATS_PER_BIT};

#[derive(Parser)]
#[command(
    name = "xdiscord",
    version,
    about = "Quantum discord for two-qubit X states: exact value, the two-branch analytical formula, and worst-case gap searches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArgs {
    /// JSON file with keys a,b,c,d,alpha,beta (optionally *_phase).
    #[arg(long, value_name = "FILE")]
    state: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

impl StateArgs {
    fn load(&self) -> Result<XState> {
        let inline_given = self.a.is_some()
            || self.b.is_some()
            || self.c.is_some()
            || self.d.is_some()
            || self.alpha.is_some()
            || self.beta.is_some();
        if let Some(path) = &self.state {
            if inline_given {
                bail!("pass either --state FILE or inline components, not both");
            }
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let raw: XStateRaw = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            return raw.canonicalize().map_err(|e| anyhow!(e));
        }
        if !inline_given {
            bail!("no state given: use --state FILE or --a/--b/--c/--d/--alpha/--beta");
        }
        XState::new(
            self.a.unwrap_or(0.0),
            self.b.unwrap_or(0.0),
            self.c.unwrap_or(0.0),
            self.d.unwrap_or(0.0),
            self.alpha.unwrap_or(0.0),
            self.beta.unwrap_or(0.0),
        )
        .map_err(|e| anyhow!(e))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Symmetric,
}

impl From<ModeArg> for SweepMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::General => SweepMode::General,
            ModeArg::Symmetric => SweepMode::Symmetric,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute discord, the two-branch values, their gap, mutual
    /// information and classical correlation for one state.
    Compute {
        #[command(flatten)]
        state: StateArgs,
        /// Emit machine-readable JSON (always in nats).
        #[arg(long)]
        json: bool,
        /// Display entropic quantities in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Search the reduced X-state space for the largest gap.
    Sweep {
        #[arg(long, value_enum, default_value = "general")]
        mode: ModeArg,
        /// Grid points per parameter axis at the coarse level (≥ 4).
        #[arg(long, default_value_t = 20)]
        coarse_steps: usize,
        #[arg(long, default_value_t = 4)]
        refine_levels: usize,
        #[arg(long, default_value_t = 32)]
        refine_top_k: usize,
        #[arg(long, default_value_t = 0.5)]
        refine_shrink: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (default: DISCORD_WORKERS or all cores). The
        /// worker count never changes the results.
        #[arg(long)]
        workers: Option<usize>,
        /// Report destination (JSON, written atomically).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Also write retained cells as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Checkpoint file: written after every level, resumed if present.
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        /// Exit with code 3 if max_gap reaches this bound.
        #[arg(long, value_name = "GAP")]
        assert_bound: Option<f64>,
    },
    /// Re-evaluate the embedded reference worst-case states.
    Verify {
        /// Overrides both the gap and θ tolerances (defaults 5e-5 / 5e-3).
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Emit S_B(ρ'_AB) and discord over a θ grid (optionally × φ grid) as CSV.
    Curve {
        #[command(flatten)]
        state: StateArgs,
        /// θ points on [0, π] (≥ 2).
        #[arg(long, default_value_t = 1001)]
        points: usize,
        /// φ points on [0, π); 1 pins φ = 0.
        #[arg(long, default_value_t = 1)]
        phi_grid: usize,
        /// Output file (default: stdout).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Display entropic quantities in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
}

fn workers_default() -> Result<usize> {
    if let Ok(value) = std::env::var("DISCORD_WORKERS") {
        let parsed: usize = value
            .parse()
            .map_err(|_| anyhow!("DISCORD_WORKERS must be a positive integer, got {value:?}"))?;
        if parsed == 0 {
            bail!("DISCORD_WORKERS must be ≥ 1");
        }
        return Ok(parsed);
    }
    Ok(std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1))
}

fn cmd_compute(state: &StateArgs, json: bool, bits: bool) -> Result<u8> {
    let state = state.load()?;
    let output = ComputeOutput::evaluate(&state);
    if json {
        println!("{}", serde_json::to_string(&output)?);
        return Ok(0);
    }
    let (scale, units) = if bits {
        (1.0 / NATS_PER_BIT, "bits")
    } else {
        (1.0, "nats")
    };
    println!("state                 : a={} b={} c={} d={} alpha={} beta={}",
        fmt_sig(state.a()), fmt_sig(state.b()), fmt_sig(state.c()),
        fmt_sig(state.d()), fmt_sig(state.alpha()), fmt_sig(state.beta()));
    println!("discord_exact         = {}", fmt_sig(output.discord_exact * scale));
    println!("theta_opt             = {}", fmt_sig(output.theta_opt));
    println!("d_sigma_x             = {}", fmt_sig(output.d_sigma_x * scale));
    println!("d_sigma_z             = {}", fmt_sig(output.d_sigma_z * scale));
    let branch = if output.d_sigma_z <= output.d_sigma_x {
        "sigma_z"
    } else {
        "sigma_x"
    };
    println!("discord_ara           = {} ({branch})", fmt_sig(output.discord_ara * scale));
    println!("gap                   = {}", fmt_sig(output.gap * scale));
    println!("mutual_information    = {}", fmt_sig(output.mutual_information * scale));
    println!("classical_correlation = {}", fmt_sig(output.classical_correlation * scale));
    println!("evaluations           = {}", output.evaluations);
    println!("units                 = {units}");
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    config: SweepConfig,
    out: &PathBuf,
    csv: Option<&PathBuf>,
    checkpoint: Option<&PathBuf>,
    assert_bound: Option<f64>,
) -> Result<u8> {
    let outcome = run_sweep_detailed(&config, checkpoint.map(|p| p.as_path()))?;
    let report = &outcome.report;

    let body = serde_json::to_vec_pretty(report)?;
    atomic_write(out, &body).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = csv {
        atomic_write(path, cells_to_csv(&outcome.retained).as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let w = &report.witness;
    println!("mode            : {}", report.config.mode);
    println!("cells evaluated : {}", report.cells_evaluated);
    println!("max_gap         = {} nats", fmt_sig(report.max_gap));
    println!(
        "witness         : a={} b={} c={} d={} s={} theta_opt={}",
        fmt_sig(w.a), fmt_sig(w.b), fmt_sig(w.c), fmt_sig(w.d), fmt_sig(w.s), fmt_sig(w.theta_opt)
    );
    println!("wall_time       = {:.3} s", report.wall_time);
    println!("report          : {}", out.display());

    if let Some(bound) = assert_bound {
        if report.max_gap >= bound {
            eprintln!(
                "assertion failed: max_gap {} >= bound {}",
                fmt_sig(report.max_gap),
                fmt_sig(bound)
            );
            return Ok(3);
        }
        println!("bound           : max_gap < {} holds", fmt_sig(bound));
    }
    Ok(0)
}

fn cmd_verify(tolerance: Option<f64>) -> Result<u8> {
    let (gap_tol, theta_tol) = match tolerance {
        Some(t) => (t, t),
        None => (DEFAULT_GAP_TOL, DEFAULT_THETA_TOL),
    };
    match verify_counterexamples_with(gap_tol, theta_tol) {
        Ok(report) => {
            print!("{report}");
            println!("verification passed");
            Ok(0)
        }
        Err(SweepError::VerificationFailed { report }) => {
            print!("{report}");
            eprintln!("verification failed");
            Ok(3)
        }
        Err(other) => Err(other.into()),
    }
}

fn cmd_curve(
    state: &StateArgs,
    points: usize,
    phi_grid: usize,
    out: Option<&PathBuf>,
    bits: bool,
) -> Result<u8> {
    if points < 2 {
        bail!("--points must be ≥ 2");
    }
    if phi_grid < 1 {
        bail!("--phi-grid must be ≥ 1");
    }
    let state = state.load()?;
    let csv = curve_csv(&curve_rows(&state, points, phi_grid), bits);
    match out {
        Some(path) => atomic_write(path, csv.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { state, json, bits } => cmd_compute(&state, json, bits),
        Command::Sweep {
            mode,
            coarse_steps,
            refine_levels,
            refine_top_k,
            refine_shrink,
            seed,
            workers,
            out,
            csv,
            checkpoint,
            assert_bound,
        } => {
            let config = SweepConfig {
                mode: mode.into(),
                coarse_steps,
                refine_levels,
                refine_top_k,
                refine_shrink,
                seed,
                workers: match workers {
                    Some(w) => w,
                    None => workers_default()?,
                },
            };
            cmd_sweep(
                config,
                &out,
                csv.as_ref(),
                checkpoint.as_ref(),
                assert_bound,
            )
        }
        Command::Verify { tolerance } => cmd_verify(tolerance),
        Command::Curve {
            state,
            points,
            phi_grid,
            out,
            bits,
        } => cmd_curve(&state, points, phi_grid, out.as_ref(), bits),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}
