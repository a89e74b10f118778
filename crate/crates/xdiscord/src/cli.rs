//! Support code for the `xdiscord` binary: θ-curve sampling, display
//! formatting, and the machine-readable compute output.
//!
//! Exit-code contract of the binary: 0 success, 2 input/config error,
//! 3 assertion or verification failure.

use serde::{Deserialize, Serialize};

use crate::discord::{minimize_theta, MeasurementAngles, DISPLAY_CLAMP};
use crate::entropy::{conditional_entropy_measured, conditional_entropy_unmeasured};
use crate::xstate::XState;

/// One row of a θ curve: the conditional entropy S_B(ρ'_AB) and the discord
/// of that fixed measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub theta: f64,
    pub phi: f64,
    /// S_B(ρ'_AB) in nats; ≥ 0.
    pub s_cond: f64,
    /// S_B(ρ'_AB) − S_B(ρ_AB) in nats.
    pub discord_value: f64,
}

/// A curve row plus its marker ("sigma_z", "sigma_x", "theta_opt" or empty;
/// coinciding markers are joined with '+').
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub sample: CurveSample,
    pub marker: String,
}

/// Samples S_B(ρ'_AB) and the per-measurement discord over θ ∈ [0, π]
/// (`points` ≥ 2 grid points) for each φ in a `phi_grid`-point grid on
/// [0, π) (`phi_grid` = 1 pins φ = 0). Rows for θ = 0, π/2 and the
/// optimizing angle are always present on the φ = 0 slice and marked.
pub fn curve_rows(state: &XState, points: usize, phi_grid: usize) -> Vec<CurveRow> {
    assert!(points >= 2, "curve needs at least two θ points");
    assert!(phi_grid >= 1, "curve needs at least one φ value");
    let pi = std::f64::consts::PI;
    let theta_opt = minimize_theta(state).theta_opt;
    let s_b = conditional_entropy_unmeasured(state);

    let mut thetas: Vec<(f64, &'static str)> = (0..points)
        .map(|i| {
            let theta = if i + 1 == points {
                pi
            } else {
                i as f64 * pi / (points - 1) as f64
            };
            (theta, "")
        })
        .collect();
    thetas.push((0.0, "sigma_z"));
    thetas.push((std::f64::consts::FRAC_PI_2, "sigma_x"));
    thetas.push((theta_opt, "theta_opt"));
    thetas.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rows: Vec<CurveRow> = Vec::new();
    for j in 0..phi_grid {
        let phi = j as f64 * pi / phi_grid as f64;
        let mut previous: Option<f64> = None;
        for &(theta, marker) in &thetas {
            // Merge duplicate θ entries, keeping every applicable marker.
            if previous == Some(theta) {
                if j == 0 && !marker.is_empty() {
                    let row = rows.last_mut().expect("row exists for duplicate θ");
                    if row.marker.is_empty() {
                        row.marker = marker.to_string();
                    } else {
                        row.marker.push('+');
                        row.marker.push_str(marker);
                    }
                }
                continue;
            }
            previous = Some(theta);
            let angles = MeasurementAngles { theta, phi };
            let s_cond = conditional_entropy_measured(state, angles);
            rows.push(CurveRow {
                sample: CurveSample {
                    theta,
                    phi,
                    s_cond,
                    discord_value: s_cond - s_b,
                },
                marker: if j == 0 { marker.to_string() } else { String::new() },
            });
        }
    }
    rows
}

/// CSV rendering of curve rows: 12 significant digits, LF endings.
pub fn curve_csv(rows: &[CurveRow], to_bits: bool) -> String {
    let scale = if to_bits { 1.0 / crate::NATS_PER_BIT } else { 1.0 };
    let mut out = String::from("theta,phi,s_cond,discord_value,marker\n");
    for row in rows {
        out.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e},{}\n",
            row.sample.theta,
            row.sample.phi,
            row.sample.s_cond * scale,
            row.sample.discord_value * scale,
            row.marker
        ));
    }
    out
}

/// Number formatting used for all human-readable and CSV numeric output:
/// 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Discord values in [−1e-9, 0) are round-off; report them as exact zeros.
pub fn clamp_display(x: f64) -> f64 {
    if (-DISPLAY_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// Machine-readable output of `xdiscord compute --json`. Values are always
/// nats (`units` says so); parsing `state` and recomputing reproduces every
/// field bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeOutput {
    pub state: XState,
    pub units: String,
    pub discord_exact: f64,
    pub theta_opt: f64,
    pub d_sigma_x: f64,
    pub d_sigma_z: f64,
    pub discord_ara: f64,
    pub gap: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub evaluations: u64,
}

impl ComputeOutput {
    /// Runs the full computation for one state, applying the user-facing
    /// round-off clamp to the provably nonnegative quantities.
    pub fn evaluate(state: &XState) -> Self {
        let result = minimize_theta(state);
        let mi = crate::discord::mutual_information(state);
        ComputeOutput {
            state: *state,
            units: "nats".to_string(),
            discord_exact: clamp_display(result.discord_exact),
            theta_opt: result.theta_opt,
            d_sigma_x: clamp_display(result.d_sigma_x),
            d_sigma_z: clamp_display(result.d_sigma_z),
            discord_ara: clamp_display(result.discord_ara),
            gap: clamp_display(result.gap),
            mutual_information: clamp_display(mi),
            classical_correlation: clamp_display(mi - result.discord_exact),
            evaluations: result.evaluations,
        }
    }
}
