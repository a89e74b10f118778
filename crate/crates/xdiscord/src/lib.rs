//! Quantum discord for two-qubit X states.
//!
//! An X state is a two-qubit density matrix with nonzero entries only on the
//! diagonal and the antidiagonal. For a von Neumann measurement on qubit B,
//! parametrized by Bloch angles (θ, φ), the post-measurement spectra are known
//! in closed form, the φ minimization collapses onto cos2φ = 1, and the
//! discord minimization reduces to a single-variable search over θ.
//!
//! The crate provides:
//!
//! * [`xstate`] — validated X states, canonicalization, reduced states, flips;
//! * [`entropy`] — closed-form spectra and von Neumann entropies (in nats);
//! * [`discord`] — exact discord via dense θ-grid plus golden-section
//!   refinement, the two-branch analytical formula min{D_σx, D_σz} (ARA) and
//!   its error Δ, and a brute-force 2-D oracle over (θ, φ);
//! * [`sweep`] — adaptive worst-case search of the Δ landscape over the
//!   reduced X-state parameter space, with JSON/CSV reports and checkpoints;
//! * [`cli`] — support code for the `xdiscord` command-line binary.
//!
//! All entropic quantities are natural-log based (nats); 1 bit = ln 2 nats.

pub mod cli;
pub mod discord;
pub mod entropy;
pub mod sweep;
pub mod xstate;

pub use discord::{
    ara_discord, classical_correlation, discord_for_measurement, minimize_theta,
    mutual_information, oracle_discord_2d, AraBranch, DiscordResult, MeasurementAngles,
};
pub use entropy::{
    conditional_entropy_measured, conditional_entropy_unmeasured, post_measurement_spectrum,
    shannon_term, von_neumann_entropy, xstate_spectrum, Spectrum2, Spectrum4,
};
pub use sweep::{
    gap_at, run_sweep, verify_counterexamples, SweepCell, SweepConfig, SweepMode, SweepReport,
};
pub use xstate::{ReducedState, StateError, XState, XStateRaw};

/// Conversion factor from nats to bits (divide a nat value by this).
pub const NATS_PER_BIT: f64 = std::f64::consts::LN_2;
