//! Worst-case search of the gap Δ = D_ARA − D_exact over X states.
//!
//! At φ = 0 the θ objective depends on the antidiagonals only through
//! s = α + β, and the unmeasured conditional entropy cancels in Δ, so the
//! gap landscape has four free parameters: the diagonal (a, b, c, d) on the
//! simplex and s ∈ [0, √(ad) + √(bc)]. Flipping either qubit leaves Δ
//! unchanged, which cuts the simplex down to a + b ≤ c + d and a ≥ b.
//!
//! The search runs a uniform coarse grid over that reduced region, then
//! repeatedly re-grids shrinking boxes around the highest-gap cells. Work is
//! an ordered parallel map with a sequential merge, so the outcome does not
//! depend on the worker count. A JSON checkpoint written after every level
//! lets interrupted sweeps resume at level boundaries.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discord::minimize_theta;
use crate::xstate::{StateError, XState};

/// Feasibility slack on s and on the reduced-domain constraints.
const FEAS_TOL: f64 = 1e-12;

/// Points per axis when re-gridding a refinement box.
const REFINE_POINTS: usize = 7;

/// Default verification tolerance on measured gaps.
pub const DEFAULT_GAP_TOL: f64 = 5e-5;

/// Default verification tolerance on measured optimal angles.
pub const DEFAULT_THETA_TOL: f64 = 5e-3;

/// Errors from the sweep machinery.
#[derive(Debug, Error)]
pub enum SweepError {
    /// Requested s exceeds √(ad) + √(bc) (or is negative).
    #[error("combined coherence s = {s} outside feasible range [0, {s_max}]")]
    InfeasibleS { s: f64, s_max: f64 },
    /// Configuration violates its invariants.
    #[error("invalid sweep config: {reason}")]
    InvalidConfig { reason: String },
    /// State construction failed while evaluating a cell.
    #[error(transparent)]
    State(#[from] StateError),
    /// A counterexample fixture did not reproduce within tolerance.
    #[error("verification failed\n{report}")]
    VerificationFailed { report: CounterexampleReport },
    /// Checkpoint belongs to a different sweep configuration.
    #[error("checkpoint mismatch: {reason}")]
    CheckpointMismatch { reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which slice of the reduced parameter space to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Full reduced X-state space.
    General,
    /// Symmetric states only (b = c throughout).
    Symmetric,
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepMode::General => write!(f, "general"),
            SweepMode::Symmetric => write!(f, "symmetric"),
        }
    }
}

/// Sweep configuration. `seed` is recorded for reproducibility bookkeeping;
/// the grid schedule itself is fully deterministic and uses no jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    /// Grid points per parameter axis at the coarse level (≥ 4).
    pub coarse_steps: usize,
    /// Number of refinement passes after the coarse level.
    pub refine_levels: usize,
    /// Highest-gap cells re-gridded per refinement level.
    pub refine_top_k: usize,
    /// Box shrink factor per level, in (0, 1).
    pub refine_shrink: f64,
    pub seed: u64,
    /// Worker threads; must not change the result.
    pub workers: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |reason: &str| {
            Err(SweepError::InvalidConfig {
                reason: reason.to_string(),
            })
        };
        if self.coarse_steps < 4 {
            return fail("coarse_steps must be ≥ 4");
        }
        if self.refine_top_k == 0 {
            return fail("refine_top_k must be ≥ 1");
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return fail("refine_shrink must lie in (0, 1)");
        }
        if self.workers == 0 {
            return fail("workers must be ≥ 1");
        }
        Ok(())
    }

    /// Fields that must agree for a checkpoint to be resumable. The level
    /// count may grow (extending a finished sweep) and the worker count
    /// never affects results.
    fn resumable_from(&self, other: &SweepConfig) -> Result<(), SweepError> {
        let mismatch = |what: &str| {
            Err(SweepError::CheckpointMismatch {
                reason: format!("{what} differs from the checkpointed sweep"),
            })
        };
        if self.mode != other.mode {
            return mismatch("mode");
        }
        if self.coarse_steps != other.coarse_steps {
            return mismatch("coarse_steps");
        }
        if self.refine_top_k != other.refine_top_k {
            return mismatch("refine_top_k");
        }
        if self.refine_shrink != other.refine_shrink {
            return mismatch("refine_shrink");
        }
        if self.seed != other.seed {
            return mismatch("seed");
        }
        Ok(())
    }
}

/// One evaluated point of the reduced parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Combined coherence α + β.
    pub s: f64,
    /// D_ARA − D_exact at this point (nats).
    pub gap: f64,
    pub theta_opt: f64,
}

/// Distribution of recorded gaps in fixed-width buckets starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapHistogram {
    pub bucket_width: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl GapHistogram {
    fn new() -> Self {
        Self {
            bucket_width: 1e-4,
            // [0, 2.2e-3) in 22 buckets: spans the known worst-case region.
            counts: vec![0; 22],
            underflow: 0,
            overflow: 0,
        }
    }

    fn add(&mut self, gap: f64) {
        if gap < 0.0 {
            self.underflow += 1;
            return;
        }
        let idx = (gap / self.bucket_width) as usize;
        if idx < self.counts.len() {
            self.counts[idx] += 1;
        } else {
            self.overflow += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }
}

/// Outcome of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub cells_evaluated: u64,
    pub max_gap: f64,
    pub witness: SweepCell,
    pub histogram: GapHistogram,
    /// Seconds spent evaluating (accumulated across resumed runs). The only
    /// report field that may differ between identical invocations.
    pub wall_time: f64,
}

/// Report plus the retained top cells (for CSV output and refinement).
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: SweepReport,
    /// Highest-gap cells seen, best first, deduplicated.
    pub retained: Vec<SweepCell>,
}

/// Gap and optimal angle at one point of the reduced space.
///
/// The split of s into (α, β) is immaterial for the gap — both branch values
/// and the θ objective at φ = 0 see only α + β, and the unmeasured term
/// cancels in the difference — so the feasible split α = min(s, √(ad)),
/// β = s − α is used.
pub fn gap_at(a: f64, b: f64, c: f64, d: f64, s: f64) -> Result<(f64, f64), SweepError> {
    let root_ad = (a * d).max(0.0).sqrt();
    let root_bc = (b * c).max(0.0).sqrt();
    let s_max = root_ad + root_bc;
    if !(-FEAS_TOL..=s_max + FEAS_TOL).contains(&s) {
        return Err(SweepError::InfeasibleS { s, s_max });
    }
    let alpha = s.clamp(0.0, root_ad);
    let beta = (s - alpha).clamp(0.0, root_bc);
    let state = XState::new(a, b, c, d, alpha, beta)?;
    let result = minimize_theta(&state);
    Ok((result.gap, result.theta_opt))
}

fn s_max_of(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (a * d).max(0.0).sqrt() + (b * c).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy)]
struct CellPoint {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    s: f64,
}

/// Pushes the s grid (fixed point count on [0, s_max]) for one diagonal.
fn push_s_axis(a: f64, b: f64, c: f64, d: f64, points: usize, out: &mut Vec<CellPoint>) {
    let s_max = s_max_of(a, b, c, d);
    if s_max < 1e-15 {
        out.push(CellPoint { a, b, c, d, s: 0.0 });
        return;
    }
    for m in 0..points {
        let s = if m + 1 == points {
            s_max
        } else {
            m as f64 / (points - 1) as f64 * s_max
        };
        out.push(CellPoint { a, b, c, d, s });
    }
}

/// Uniform coarse grid over the reduced simplex {a+b ≤ c+d, a ≥ b} × s.
fn coarse_cells(config: &SweepConfig) -> Vec<CellPoint> {
    let n = config.coarse_steps;
    let grid = |i: usize| i as f64 / (n - 1) as f64;
    let mut cells = Vec::new();
    match config.mode {
        SweepMode::General => {
            for i in 0..n {
                let a = grid(i);
                for j in 0..=i {
                    let b = grid(j);
                    if a + b > 0.5 + FEAS_TOL {
                        break;
                    }
                    for k in 0..n {
                        let c = grid(k);
                        let d = 1.0 - a - b - c;
                        if d < -FEAS_TOL {
                            break;
                        }
                        push_s_axis(a, b, c, d.max(0.0), n, &mut cells);
                    }
                }
            }
        }
        SweepMode::Symmetric => {
            for i in 0..n {
                let a = grid(i);
                for j in 0..n {
                    let b = grid(j);
                    if b > a {
                        break;
                    }
                    let d = 1.0 - a - 2.0 * b;
                    if d < -FEAS_TOL || a + b > 0.5 + FEAS_TOL {
                        continue;
                    }
                    push_s_axis(a, b, b, d.max(0.0), n, &mut cells);
                }
            }
        }
    }
    cells
}

/// Evenly spaced points covering [center−half, center+half] clamped to
/// [lo_bound, hi_bound].
fn axis_points(center: f64, half: f64, lo_bound: f64, hi_bound: f64) -> Vec<f64> {
    let lo = (center - half).max(lo_bound);
    let hi = (center + half).min(hi_bound);
    if hi <= lo {
        return vec![lo];
    }
    (0..REFINE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (REFINE_POINTS - 1) as f64)
        .collect()
}

/// Re-grids shrinking boxes around the given parents.
///
/// Box half-widths start at one full coarse spacing and shrink by
/// `refine_shrink` each level; the s axis uses the parent diagonal's local
/// coarse spacing and absolute s values, so a box tracks the same physical
/// coherence as its diagonal moves. Points violating the reduced-domain
/// constraints or the s range are skipped.
fn refine_cells(config: &SweepConfig, parents: &[SweepCell], level: usize) -> Vec<CellPoint> {
    let n = config.coarse_steps;
    let factor = config.refine_shrink.powi(level as i32 - 1);
    let h_diag = factor / (n - 1) as f64;
    let mut cells = Vec::new();
    for parent in parents {
        let h_s = factor * s_max_of(parent.a, parent.b, parent.c, parent.d) / (n - 1) as f64;
        let s_points = axis_points(parent.s, h_s.max(1e-12), 0.0, 1.0);
        match config.mode {
            SweepMode::General => {
                for &a in &axis_points(parent.a, h_diag, 0.0, 1.0) {
                    for &b in &axis_points(parent.b, h_diag, 0.0, 1.0) {
                        if b > a || a + b > 0.5 + FEAS_TOL {
                            continue;
                        }
                        for &c in &axis_points(parent.c, h_diag, 0.0, 1.0) {
                            let d = 1.0 - a - b - c;
                            if d < -FEAS_TOL {
                                continue;
                            }
                            let d = d.max(0.0);
                            let s_max = s_max_of(a, b, c, d);
                            for &s in &s_points {
                                if s <= s_max + FEAS_TOL {
                                    cells.push(CellPoint { a, b, c, d, s });
                                }
                            }
                        }
                    }
                }
            }
            SweepMode::Symmetric => {
                for &a in &axis_points(parent.a, h_diag, 0.0, 1.0) {
                    for &b in &axis_points(parent.b, h_diag, 0.0, 1.0) {
                        if b > a || a + b > 0.5 + FEAS_TOL {
                            continue;
                        }
                        let d = 1.0 - a - 2.0 * b;
                        if d < -FEAS_TOL {
                            continue;
                        }
                        let d = d.max(0.0);
                        let s_max = s_max_of(a, b, b, d);
                        for &s in &s_points {
                            if s <= s_max + FEAS_TOL {
                                cells.push(CellPoint { a, b, c: b, d, s });
                            }
                        }
                    }
                }
            }
        }
    }
    cells
}

/// Ordered parallel evaluation; infeasible cells are skipped.
fn evaluate_cells(pool: &rayon::ThreadPool, cells: &[CellPoint]) -> Vec<SweepCell> {
    let results: Vec<Option<SweepCell>> = pool.install(|| {
        cells
            .par_iter()
            .map(|p| {
                gap_at(p.a, p.b, p.c, p.d, p.s)
                    .ok()
                    .map(|(gap, theta_opt)| SweepCell {
                        a: p.a,
                        b: p.b,
                        c: p.c,
                        d: p.d,
                        s: p.s,
                        gap,
                        theta_opt,
                    })
            })
            .collect()
    });
    results.into_iter().flatten().collect()
}

/// Best-gap-first total order with parameter tie-breaks, so selection is
/// deterministic.
fn cell_order(x: &SweepCell, y: &SweepCell) -> Ordering {
    y.gap
        .total_cmp(&x.gap)
        .then(x.a.total_cmp(&y.a))
        .then(x.b.total_cmp(&y.b))
        .then(x.c.total_cmp(&y.c))
        .then(x.s.total_cmp(&y.s))
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    config: SweepConfig,
    /// 0 = nothing done, 1 = coarse level done, 1+ℓ = refinement ℓ done.
    completed_levels: usize,
    cells_evaluated: u64,
    histogram: GapHistogram,
    retained: Vec<SweepCell>,
    elapsed_seconds: f64,
}

impl Checkpoint {
    fn fresh(config: &SweepConfig) -> Self {
        Self {
            config: config.clone(),
            completed_levels: 0,
            cells_evaluated: 0,
            histogram: GapHistogram::new(),
            retained: Vec::new(),
            elapsed_seconds: 0.0,
        }
    }

    fn merge_level(&mut self, evaluated: Vec<SweepCell>, retain_max: usize) {
        self.cells_evaluated += evaluated.len() as u64;
        for cell in &evaluated {
            self.histogram.add(cell.gap);
        }
        self.retained.extend(evaluated);
        self.retained.sort_by(cell_order);
        self.retained.dedup_by(|x, y| {
            x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d && x.s == y.s
        });
        self.retained.truncate(retain_max);
    }

    fn save(&self, path: &Path) -> Result<(), SweepError> {
        let body = serde_json::to_vec_pretty(self)?;
        atomic_write(path, &body)?;
        Ok(())
    }

    fn load(path: &Path) -> Result<Self, SweepError> {
        let body = std::fs::read(path)?;
        Ok(serde_json::from_slice(&body)?)
    }
}

/// Atomically replaces `path` with `bytes` (same-directory temp + rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

/// Runs the sweep; see [`run_sweep_detailed`].
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    Ok(run_sweep_detailed(config, None)?.report)
}

/// Runs the sweep, optionally checkpointing after every level and resuming
/// from an existing checkpoint at `checkpoint` (which must belong to the
/// same configuration; the level count may be extended).
pub fn run_sweep_detailed(
    config: &SweepConfig,
    checkpoint: Option<&Path>,
) -> Result<SweepOutcome, SweepError> {
    config.validate()?;
    let retain_max = 1024.max(4 * config.refine_top_k);

    let mut state = match checkpoint {
        Some(path) if path.exists() => {
            let loaded = Checkpoint::load(path)?;
            config.resumable_from(&loaded.config)?;
            loaded
        }
        _ => Checkpoint::fresh(config),
    };
    state.config = config.clone();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SweepError::InvalidConfig {
            reason: format!("worker pool: {e}"),
        })?;

    if state.completed_levels == 0 {
        let level_start = Instant::now();
        let evaluated = evaluate_cells(&pool, &coarse_cells(config));
        state.merge_level(evaluated, retain_max);
        state.completed_levels = 1;
        state.elapsed_seconds += level_start.elapsed().as_secs_f64();
        if let Some(path) = checkpoint {
            state.save(path)?;
        }
    }
    for level in 1..=config.refine_levels {
        if state.completed_levels > level {
            continue;
        }
        let level_start = Instant::now();
        let parents: Vec<SweepCell> = state
            .retained
            .iter()
            .take(config.refine_top_k)
            .copied()
            .collect();
        let evaluated = evaluate_cells(&pool, &refine_cells(config, &parents, level));
        state.merge_level(evaluated, retain_max);
        state.completed_levels = level + 1;
        state.elapsed_seconds += level_start.elapsed().as_secs_f64();
        if let Some(path) = checkpoint {
            state.save(path)?;
        }
    }

    let witness = *state
        .retained
        .first()
        .expect("a valid config always yields at least one cell");
    let report = SweepReport {
        config: config.clone(),
        cells_evaluated: state.cells_evaluated,
        max_gap: witness.gap,
        witness,
        histogram: state.histogram.clone(),
        wall_time: state.elapsed_seconds,
    };
    Ok(SweepOutcome {
        report,
        retained: state.retained,
    })
}

/// CSV rendering of retained cells: header plus one row per cell, numbers
/// with 12 significant digits, LF line endings.
pub fn cells_to_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("a,b,c,d,s,gap,theta_opt\n");
    for cell in cells {
        out.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}\n",
            cell.a, cell.b, cell.c, cell.d, cell.s, cell.gap, cell.theta_opt
        ));
    }
    out
}

/// A reference worst-case state: both endpoint measurements are suboptimal
/// and the gap is the largest known for its family.
#[derive(Debug, Clone, Copy)]
pub struct WorstCaseFixture {
    pub label: &'static str,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// α + β (here β = 0, so α = s).
    pub s: f64,
    /// Reference gap (nats), printed to 6 decimals.
    pub gap: f64,
    /// Reference optimal angle.
    pub theta: f64,
}

impl WorstCaseFixture {
    pub fn state(&self) -> XState {
        XState::new(self.a, self.b, self.c, self.d, self.s, 0.0)
            .expect("fixture states are valid")
    }
}

/// Worst known gap over all X states.
pub const WORST_CASE_GENERAL: WorstCaseFixture = WorstCaseFixture {
    label: "general",
    a: 0.027180,
    b: 0.000224,
    c: 0.027327,
    d: 0.945269,
    s: 0.141651,
    gap: 0.002047,
    theta: 0.607573,
};

/// Worst known gap over symmetric (b = c) X states.
pub const WORST_CASE_SYMMETRIC: WorstCaseFixture = WorstCaseFixture {
    label: "symmetric",
    a: 0.021726,
    b: 0.010288,
    c: 0.010288,
    d: 0.957698,
    s: 0.128057,
    gap: 0.000573,
    theta: 0.477918,
};

/// One fixture comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCheck {
    pub label: String,
    pub expected_gap: f64,
    pub measured_gap: f64,
    pub gap_tolerance: f64,
    pub expected_theta: f64,
    pub measured_theta: f64,
    pub theta_tolerance: f64,
    pub pass: bool,
}

/// Outcome of [`verify_counterexamples`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub checks: Vec<CounterexampleCheck>,
    pub pass: bool,
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(
                f,
                "{:<10} gap {:.6e} (expected {:.6e} ± {:.0e})  theta {:.6e} (expected {:.6e} ± {:.0e})  {}",
                check.label,
                check.measured_gap,
                check.expected_gap,
                check.gap_tolerance,
                check.measured_theta,
                check.expected_theta,
                check.theta_tolerance,
                if check.pass { "PASS" } else { "FAIL" },
            )?;
        }
        Ok(())
    }
}

/// Re-evaluates both reference worst-case states at the default tolerances.
pub fn verify_counterexamples() -> Result<CounterexampleReport, SweepError> {
    verify_counterexamples_with(DEFAULT_GAP_TOL, DEFAULT_THETA_TOL)
}

/// As [`verify_counterexamples`] with explicit tolerances. Returns
/// [`SweepError::VerificationFailed`] carrying the full report if any
/// fixture misses.
pub fn verify_counterexamples_with(
    gap_tol: f64,
    theta_tol: f64,
) -> Result<CounterexampleReport, SweepError> {
    let mut checks = Vec::new();
    for fixture in [WORST_CASE_GENERAL, WORST_CASE_SYMMETRIC] {
        let (gap, theta) = gap_at(fixture.a, fixture.b, fixture.c, fixture.d, fixture.s)?;
        let pass =
            (gap - fixture.gap).abs() <= gap_tol && (theta - fixture.theta).abs() <= theta_tol;
        checks.push(CounterexampleCheck {
            label: fixture.label.to_string(),
            expected_gap: fixture.gap,
            measured_gap: gap,
            gap_tolerance: gap_tol,
            expected_theta: fixture.theta,
            measured_theta: theta,
            theta_tolerance: theta_tol,
            pass,
        });
    }
    let report = CounterexampleReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    };
    if report.pass {
        Ok(report)
    } else {
        Err(SweepError::VerificationFailed { report })
    }
}
