//! Entropy primitives and closed-form spectra for X states.
//!
//! The unmeasured X state splits into two 2×2 antidiagonal blocks, so its
//! spectrum is elementary. After a von Neumann measurement of qubit B along
//! the Bloch direction (θ, φ), the post-measurement state ρ'_AB has the
//! closed-form spectrum
//!
//! ```text
//! λ₁,₂ = {1 + A cosθ ± √[(B + C cosθ)² + M sin²θ]} / 4
//! λ₃,₄ = {1 − A cosθ ± √[(B − C cosθ)² + M sin²θ]} / 4
//! Λ₁,₂ = (1 ± A cosθ) / 2
//! ```
//!
//! with A = a−b+c−d, B = a+b−c−d, C = a−b−c+d and the coherence term
//! M = 4(α² + β² + 2αβ cos2φ). All entropies are in nats.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discord::MeasurementAngles;
use crate::xstate::{ReducedState, XState};

/// Entries this far below zero are treated as exact zeros before logs;
/// anything lower is a domain error.
pub const EIG_CLAMP: f64 = 1e-12;

/// Errors from entropy primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    /// Argument outside [−1e-12, 1+1e-12].
    #[error("probability {value} outside [-{EIG_CLAMP}, 1+{EIG_CLAMP}]")]
    Domain { value: f64 },
}

/// Eigenvalues of a two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum4 {
    pub lambda: [f64; 4],
}

/// Eigenvalues of the measured qubit's post-measurement reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum2 {
    pub lambda: [f64; 2],
}

/// Anything entropy can be taken of: a flat list of probabilities.
pub trait Spectrum {
    fn probabilities(&self) -> impl Iterator<Item = f64> + '_;
}

impl Spectrum for Spectrum4 {
    fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.lambda.iter().copied()
    }
}

impl Spectrum for Spectrum2 {
    fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.lambda.iter().copied()
    }
}

impl Spectrum for ReducedState {
    fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        [self.p0, self.p1].into_iter()
    }
}

/// −p ln p with the convention 0 ln 0 = 0.
///
/// Negative inputs within [`EIG_CLAMP`] are clamped to zero (square roots in
/// the closed-form spectra can undershoot by round-off); anything further out
/// is rejected.
pub fn shannon_term(p: f64) -> Result<f64, EntropyError> {
    if !(-EIG_CLAMP..=1.0 + EIG_CLAMP).contains(&p) {
        return Err(EntropyError::Domain { value: p });
    }
    Ok(entr(p.clamp(0.0, 1.0)))
}

/// Unchecked −p ln p for p already clamped into [0, 1].
#[inline]
pub(crate) fn entr(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

#[inline]
fn clamp01(p: f64) -> f64 {
    debug_assert!(p > -EIG_CLAMP && p < 1.0 + EIG_CLAMP);
    p.clamp(0.0, 1.0)
}

/// Von Neumann entropy of a spectrum, in nats.
pub fn von_neumann_entropy<S: Spectrum>(spec: &S) -> Result<f64, EntropyError> {
    let mut total = 0.0;
    for p in spec.probabilities() {
        total += shannon_term(p)?;
    }
    Ok(total)
}

/// Entropy of a diagonal single-qubit reduced state.
pub fn reduced_entropy(r: &ReducedState) -> f64 {
    entr(clamp01(r.p0)) + entr(clamp01(r.p1))
}

/// Spectrum of the unmeasured X state from its two antidiagonal blocks:
/// ((a+d) ± √((a−d)² + 4α²))/2 and ((b+c) ± √((b−c)² + 4β²))/2.
pub fn xstate_spectrum(s: &XState) -> Spectrum4 {
    let (a, b, c, d) = (s.a(), s.b(), s.c(), s.d());
    let (alpha, beta) = (s.alpha(), s.beta());
    let r_ad = ((a - d) * (a - d) + 4.0 * alpha * alpha).max(0.0).sqrt();
    let r_bc = ((b - c) * (b - c) + 4.0 * beta * beta).max(0.0).sqrt();
    Spectrum4 {
        lambda: [
            clamp01(0.5 * (a + d + r_ad)),
            clamp01(0.5 * (a + d - r_ad)),
            clamp01(0.5 * (b + c + r_bc)),
            clamp01(0.5 * (b + c - r_bc)),
        ],
    }
}

/// Precomputed coefficients of the post-measurement spectra for one state
/// and one value of cos2φ. This is the hot path of every minimization.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PostMeasurement {
    /// A = a − b + c − d (σ_z expectation of qubit B).
    bloch_b: f64,
    /// B = a + b − c − d (σ_z expectation of qubit A).
    bloch_a: f64,
    /// C = a − b − c + d (σ_z ⊗ σ_z correlation).
    zz: f64,
    /// M = 4(α² + β² + 2αβ cos2φ); equals 4(α+β)² at φ = 0.
    coherence: f64,
}

impl PostMeasurement {
    pub(crate) fn with_cos2phi(s: &XState, cos2phi: f64) -> Self {
        let (a, b, c, d) = (s.a(), s.b(), s.c(), s.d());
        let (alpha, beta) = (s.alpha(), s.beta());
        let coherence =
            4.0 * (alpha * alpha + beta * beta + 2.0 * alpha * beta * cos2phi);
        Self {
            bloch_b: a - b + c - d,
            bloch_a: a + b - c - d,
            zz: a - b - c + d,
            // (α−β)² ≥ 0 analytically; guard against cancellation.
            coherence: coherence.max(0.0),
        }
    }

    pub(crate) fn at_phi_zero(s: &XState) -> Self {
        Self::with_cos2phi(s, 1.0)
    }

    #[inline]
    pub(crate) fn spectra(&self, theta: f64) -> ([f64; 4], [f64; 2]) {
        let (sin_t, cos_t) = theta.sin_cos();
        let t = self.bloch_b * cos_t;
        let m_sin2 = self.coherence * sin_t * sin_t;
        let plus = self.bloch_a + self.zz * cos_t;
        let minus = self.bloch_a - self.zz * cos_t;
        let r12 = (plus * plus + m_sin2).max(0.0).sqrt();
        let r34 = (minus * minus + m_sin2).max(0.0).sqrt();
        (
            [
                clamp01(0.25 * (1.0 + t + r12)),
                clamp01(0.25 * (1.0 + t - r12)),
                clamp01(0.25 * (1.0 - t + r34)),
                clamp01(0.25 * (1.0 - t - r34)),
            ],
            [clamp01(0.5 * (1.0 + t)), clamp01(0.5 * (1.0 - t))],
        )
    }

    /// S(ρ'_AB) − S(ρ'_B) at the given θ; nonnegative.
    #[inline]
    pub(crate) fn conditional_entropy(&self, theta: f64) -> f64 {
        let (l, big) = self.spectra(theta);
        let h4 = entr(l[0]) + entr(l[1]) + entr(l[2]) + entr(l[3]);
        let h2 = entr(big[0]) + entr(big[1]);
        (h4 - h2).max(0.0)
    }
}

/// Closed-form spectra of the post-measurement states (ρ'_AB, ρ'_B) for a
/// von Neumann measurement of qubit B at angles (θ, φ).
pub fn post_measurement_spectrum(
    s: &XState,
    angles: MeasurementAngles,
) -> (Spectrum4, Spectrum2) {
    let post = PostMeasurement::with_cos2phi(s, (2.0 * angles.phi).cos());
    let (l, big) = post.spectra(angles.theta);
    (Spectrum4 { lambda: l }, Spectrum2 { lambda: big })
}

/// Conditional entropy S(ρ_AB) − S(ρ_B) of the unmeasured state.
/// Negative values signal entanglement.
pub fn conditional_entropy_unmeasured(s: &XState) -> f64 {
    let spec = xstate_spectrum(s);
    let h4 = spec.lambda.iter().copied().map(entr).sum::<f64>();
    h4 - reduced_entropy(&s.reduce_b())
}

/// Conditional entropy S(ρ'_AB) − S(ρ'_B) after measuring qubit B at the
/// given angles; always ≥ 0.
pub fn conditional_entropy_measured(s: &XState, angles: MeasurementAngles) -> f64 {
    PostMeasurement::with_cos2phi(s, (2.0 * angles.phi).cos()).conditional_entropy(angles.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn bell() -> XState {
        XState::new(0.5, 0.0, 0.0, 0.5, 0.5, 0.0).unwrap()
    }

    fn classical() -> XState {
        XState::new(0.4, 0.1, 0.2, 0.3, 0.0, 0.0).unwrap()
    }

    fn angles(theta: f64, phi: f64) -> MeasurementAngles {
        MeasurementAngles::new(theta, phi).unwrap()
    }

    #[test]
    fn shannon_term_examples() {
        assert_eq!(shannon_term(0.0).unwrap(), 0.0);
        assert_eq!(shannon_term(1.0).unwrap(), 0.0);
        assert!((shannon_term(0.5).unwrap() - LN_2 / 2.0).abs() < 1e-15);
        assert_eq!(shannon_term(-5e-13).unwrap(), 0.0);
        assert!(shannon_term(-1e-6).is_err());
        assert!(shannon_term(1.0 + 1e-6).is_err());
    }

    #[test]
    fn xstate_spectrum_examples() {
        let mixed = XState::new(0.25, 0.25, 0.25, 0.25, 0.0, 0.0).unwrap();
        assert_eq!(xstate_spectrum(&mixed).lambda, [0.25; 4]);

        let mut eigs = xstate_spectrum(&bell()).lambda;
        eigs.sort_by(f64::total_cmp);
        assert!((eigs[3] - 1.0).abs() < 1e-15);
        assert!(eigs[0].abs() < 1e-15 && eigs[1].abs() < 1e-15 && eigs[2].abs() < 1e-15);
    }

    #[test]
    fn von_neumann_entropy_examples() {
        let pure = Spectrum4 {
            lambda: [1.0, 0.0, 0.0, 0.0],
        };
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);

        let mixed = Spectrum4 { lambda: [0.25; 4] };
        assert!((von_neumann_entropy(&mixed).unwrap() - 4.0f64.ln()).abs() < 1e-15);

        let bad = Spectrum2 {
            lambda: [1.5, -0.5],
        };
        assert!(von_neumann_entropy(&bad).is_err());
    }

    #[test]
    fn post_measurement_sigma_z_leaves_classical_state_diagonal() {
        let s = classical();
        let (l, big) = post_measurement_spectrum(&s, angles(0.0, 0.0));
        let mut got = l.lambda;
        got.sort_by(f64::total_cmp);
        let mut want = [s.a(), s.b(), s.c(), s.d()];
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() <= 1e-15);
        }
        assert!((big.lambda[0] - (s.a() + s.c())).abs() <= 1e-15);
        assert!((big.lambda[1] - (s.b() + s.d())).abs() <= 1e-15);
    }

    #[test]
    fn post_measurement_bell_sigma_x() {
        let (l, big) = post_measurement_spectrum(&bell(), angles(FRAC_PI_2, 0.0));
        let mut got = l.lambda;
        got.sort_by(f64::total_cmp);
        assert!(got[0].abs() < 1e-15 && got[1].abs() < 1e-15);
        assert!((got[2] - 0.5).abs() < 1e-15 && (got[3] - 0.5).abs() < 1e-15);
        assert!((big.lambda[0] - 0.5).abs() < 1e-15);
        assert!((big.lambda[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_entropy_unmeasured_examples() {
        assert!((conditional_entropy_unmeasured(&bell()) + LN_2).abs() < 1e-12);
        let mixed = XState::new(0.25, 0.25, 0.25, 0.25, 0.0, 0.0).unwrap();
        assert!((conditional_entropy_unmeasured(&mixed) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_measured_examples() {
        // Bell state: conditional states of A are pure for every measurement.
        for theta in [0.0, 0.3, 1.0, FRAC_PI_2, 2.0, std::f64::consts::PI] {
            assert!(conditional_entropy_measured(&bell(), angles(theta, 0.0)).abs() < 1e-12);
        }
        // σ_z measurement of a classical state changes nothing.
        let s = classical();
        let want = conditional_entropy_unmeasured(&s);
        let got = conditional_entropy_measured(&s, angles(0.0, 0.0));
        assert!((got - want).abs() < 1e-12);
        assert!(got >= 0.0);
    }

    #[test]
    fn spectra_sum_to_one_and_reflect_in_theta() {
        let s = XState::new(0.30, 0.21, 0.04, 0.45, 0.35, 0.05).unwrap();
        for i in 0..40 {
            let theta = std::f64::consts::PI * i as f64 / 39.0;
            for phi in [0.0, 0.4, 1.2, 2.5] {
                let (l, big) = post_measurement_spectrum(&s, angles(theta, phi));
                let sum4: f64 = l.lambda.iter().sum();
                let sum2: f64 = big.lambda.iter().sum();
                assert!((sum4 - 1.0).abs() <= 1e-10);
                assert!((sum2 - 1.0).abs() <= 1e-12);

                let mirrored = conditional_entropy_measured(
                    &s,
                    angles(std::f64::consts::PI - theta, phi),
                );
                let direct = conditional_entropy_measured(&s, angles(theta, phi));
                assert!((mirrored - direct).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn phi_enters_only_through_cos_2phi_and_zero_is_optimal() {
        let s = XState::new(0.30, 0.21, 0.04, 0.45, 0.35, 0.05).unwrap();
        for i in 1..20 {
            let theta = std::f64::consts::PI * i as f64 / 20.0;
            let base = conditional_entropy_measured(&s, angles(theta, 0.0));
            for j in 0..=24 {
                let phi = std::f64::consts::PI * j as f64 / 24.0;
                let direct = conditional_entropy_measured(&s, angles(theta, phi));
                let mirrored =
                    conditional_entropy_measured(&s, angles(theta, std::f64::consts::PI - phi));
                assert!((direct - mirrored).abs() <= 1e-12);
                assert!(base <= direct + 1e-12);
            }
        }
    }

    #[test]
    fn coherence_depends_only_on_alpha_plus_beta_at_phi_zero() {
        // Same diagonals, same α+β, three different splits.
        let splits = [(0.20, 0.05), (0.15, 0.10), (0.25, 0.0)];
        let mut values = Vec::new();
        for (alpha, beta) in splits {
            let s = XState::new(0.30, 0.21, 0.20, 0.29, alpha, beta).unwrap();
            let mut row = Vec::new();
            for i in 0..30 {
                let theta = FRAC_PI_2 * i as f64 / 29.0;
                row.push(conditional_entropy_measured(&s, angles(theta, 0.0)));
            }
            values.push(row);
        }
        for row in &values[1..] {
            for (x, y) in row.iter().zip(values[0].iter()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
