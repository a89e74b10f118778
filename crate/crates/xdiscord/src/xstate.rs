//! Two-qubit X-state density matrices.
//!
//! In the computational basis |00⟩, |01⟩, |10⟩, |11⟩ an X state is
//!
//! ```text
//!     ⎛ a  .  .  α ⎞
//!     ⎜ .  b  β  . ⎟
//!     ⎜ .  β̄  c  . ⎟
//!     ⎝ ᾱ  .  .  d ⎠
//! ```
//!
//! with a+b+c+d = 1 and |α|² ≤ ad, |β|² ≤ bc for positive semidefiniteness.
//! The antidiagonal phases can always be removed by local σ_z rotations,
//! which leave discord unchanged, so the canonical form keeps only the
//! nonnegative moduli.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation tolerance for raw (external) input.
///
/// Wide enough to absorb 6-decimal truncation of reference states, tight
/// enough to reject genuinely malformed input.
pub const RAW_TOL: f64 = 1e-9;

/// Tolerance guaranteed by canonical states (normalization, positivity).
pub const CANON_TOL: f64 = 1e-12;

/// Below this trace deviation renormalization is skipped, which makes
/// canonicalization idempotent bit for bit.
const RENORM_SKIP: f64 = 1e-13;

/// Validation failures for candidate X states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    /// A diagonal entry is negative beyond tolerance.
    #[error("diagonal entry {name} = {value} is negative beyond tolerance")]
    NonPositive { name: &'static str, value: f64 },
    /// The trace deviates from one beyond tolerance.
    #[error("trace {sum} deviates from 1 by more than {RAW_TOL}")]
    TraceError { sum: f64 },
    /// An antidiagonal modulus is too large (or negative) for the matrix to
    /// stay positive semidefinite.
    #[error("positivity violated: {name}² = {found} exceeds {bound} (or modulus negative)")]
    PositivityViolation {
        name: &'static str,
        found: f64,
        bound: f64,
    },
}

/// A candidate X state before validation: diagonals, antidiagonal moduli and
/// their phases. Phases are carried so that their physical irrelevance can be
/// tested, and are dropped by [`XStateRaw::canonicalize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateRaw {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(rename = "alpha", default)]
    pub alpha_mod: f64,
    #[serde(rename = "beta", default)]
    pub beta_mod: f64,
    #[serde(default)]
    pub alpha_phase: f64,
    #[serde(default)]
    pub beta_phase: f64,
}

impl XStateRaw {
    /// Raw state with the given moduli and zero phases.
    pub fn new(a: f64, b: f64, c: f64, d: f64, alpha: f64, beta: f64) -> Self {
        Self {
            a,
            b,
            c,
            d,
            alpha_mod: alpha,
            beta_mod: beta,
            alpha_phase: 0.0,
            beta_phase: 0.0,
        }
    }

    /// Validates the raw state and brings it to canonical form: phases are
    /// discarded (the moduli are kept), diagonals and moduli are renormalized
    /// by the trace, and the moduli are clamped onto the positivity boundary
    /// if rounding pushed them past it.
    ///
    /// Discord is invariant under this map: removing the phases is a local
    /// unitary and the renormalization is a pure scale fix.
    pub fn canonicalize(self) -> Result<XState, StateError> {
        let diag = [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
        ];
        for (name, value) in diag {
            if value < -RAW_TOL {
                return Err(StateError::NonPositive { name, value });
            }
        }
        for (name, value) in [("alpha", self.alpha_mod), ("beta", self.beta_mod)] {
            if value < -RAW_TOL {
                return Err(StateError::PositivityViolation {
                    name,
                    found: value,
                    bound: 0.0,
                });
            }
        }

        // Clamp round-off negatives before forming products.
        let mut a = self.a.max(0.0);
        let mut b = self.b.max(0.0);
        let mut c = self.c.max(0.0);
        let mut d = self.d.max(0.0);
        let mut alpha = self.alpha_mod.max(0.0);
        let mut beta = self.beta_mod.max(0.0);

        let sum = a + b + c + d;
        if (sum - 1.0).abs() > RAW_TOL {
            return Err(StateError::TraceError { sum });
        }
        if alpha * alpha > a * d + RAW_TOL {
            return Err(StateError::PositivityViolation {
                name: "alpha",
                found: alpha * alpha,
                bound: a * d,
            });
        }
        if beta * beta > b * c + RAW_TOL {
            return Err(StateError::PositivityViolation {
                name: "beta",
                found: beta * beta,
                bound: b * c,
            });
        }

        // Renormalize the whole matrix by the trace. Scaling the moduli by
        // the same factor preserves |α|² ≤ ad exactly.
        if (sum - 1.0).abs() > RENORM_SKIP {
            a /= sum;
            b /= sum;
            c /= sum;
            d /= sum;
            alpha /= sum;
            beta /= sum;
        }
        if alpha * alpha > a * d {
            alpha = (a * d).sqrt();
        }
        if beta * beta > b * c {
            beta = (b * c).sqrt();
        }

        Ok(XState {
            a,
            b,
            c,
            d,
            alpha,
            beta,
        })
    }
}

/// A validated, canonical X state: real nonnegative antidiagonals, unit
/// trace within [`CANON_TOL`], positivity certified.
///
/// Serializes to the JSON object `{"a", "b", "c", "d", "alpha", "beta"}`;
/// deserialization accepts the same keys plus optional `alpha_phase` /
/// `beta_phase` (raw form) and canonicalizes on the way in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "XStateRaw")]
pub struct XState {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    alpha: f64,
    beta: f64,
}

impl TryFrom<XStateRaw> for XState {
    type Error = StateError;

    fn try_from(raw: XStateRaw) -> Result<Self, StateError> {
        raw.canonicalize()
    }
}

impl XState {
    /// Validates and canonicalizes a state given directly in canonical form.
    pub fn new(a: f64, b: f64, c: f64, d: f64, alpha: f64, beta: f64) -> Result<Self, StateError> {
        XStateRaw::new(a, b, c, d, alpha, beta).canonicalize()
    }

    /// Internal constructor for values already known to satisfy the
    /// invariants (field permutations, exact rescalings).
    pub(crate) fn from_parts_unchecked(
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        alpha: f64,
        beta: f64,
    ) -> Self {
        Self {
            a,
            b,
            c,
            d,
            alpha,
            beta,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// True when the two reduced states coincide (b = c within tolerance).
    pub fn symmetric(&self) -> bool {
        (self.b - self.c).abs() <= CANON_TOL
    }

    /// Reduced state of qubit A: diag(a+b, c+d).
    pub fn reduce_a(&self) -> ReducedState {
        ReducedState {
            p0: self.a + self.b,
            p1: self.c + self.d,
        }
    }

    /// Reduced state of qubit B: diag(a+c, b+d).
    pub fn reduce_b(&self) -> ReducedState {
        ReducedState {
            p0: self.a + self.c,
            p1: self.b + self.d,
        }
    }

    /// Applies σ_x to qubit A and/or qubit B.
    ///
    /// Flipping A swaps (a↔c, b↔d, α↔β); flipping B swaps (a↔b, c↔d, α↔β).
    /// Each flip is an involution and leaves discord unchanged (it merely
    /// relabels a local basis).
    pub fn apply_flips(&self, flip_a: bool, flip_b: bool) -> XState {
        let mut s = *self;
        if flip_a {
            s = XState::from_parts_unchecked(s.c, s.d, s.a, s.b, s.beta, s.alpha);
        }
        if flip_b {
            s = XState::from_parts_unchecked(s.b, s.a, s.d, s.c, s.beta, s.alpha);
        }
        s
    }
}

/// Diagonal single-qubit reduced state: probabilities (p0, p1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub p0: f64,
    pub p1: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference worst-case state for the general search (β = 0).
    pub(crate) fn general_worst_case() -> XState {
        XState::new(0.027180, 0.000224, 0.027327, 0.945269, 0.141651, 0.0).unwrap()
    }

    /// Reference worst-case state for the symmetric (b = c) search.
    pub(crate) fn symmetric_worst_case() -> XState {
        XState::new(0.021726, 0.010288, 0.010288, 0.957698, 0.128057, 0.0).unwrap()
    }

    #[test]
    fn canonicalize_pure_product_state() {
        let raw = XStateRaw {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            alpha_mod: 0.0,
            beta_mod: 0.0,
            alpha_phase: 1.3,
            beta_phase: -2.0,
        };
        let s = raw.canonicalize().unwrap();
        assert_eq!(
            (s.a(), s.b(), s.c(), s.d(), s.alpha(), s.beta()),
            (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn canonicalize_discards_phase_keeps_modulus() {
        let raw = XStateRaw {
            a: 0.5,
            b: 0.0,
            c: 0.0,
            d: 0.5,
            alpha_mod: 0.5,
            beta_mod: 0.0,
            alpha_phase: std::f64::consts::FRAC_PI_3,
            beta_phase: 0.0,
        };
        let s = raw.canonicalize().unwrap();
        assert_eq!(s.alpha(), 0.5);
        assert_eq!(s.beta(), 0.0);
        assert_eq!((s.a(), s.d()), (0.5, 0.5));
    }

    #[test]
    fn canonicalize_accepts_reference_state_unchanged() {
        let s = general_worst_case();
        assert!((s.a() - 0.027180).abs() <= CANON_TOL);
        assert!((s.b() - 0.000224).abs() <= CANON_TOL);
        assert!((s.c() - 0.027327).abs() <= CANON_TOL);
        assert!((s.d() - 0.945269).abs() <= CANON_TOL);
        assert!((s.alpha() - 0.141651).abs() <= CANON_TOL);
        assert_eq!(s.beta(), 0.0);
        assert!((s.a() + s.b() + s.c() + s.d() - 1.0).abs() <= CANON_TOL);
    }

    #[test]
    fn canonicalize_rejects_negative_diagonal() {
        let err = XState::new(-1e-6, 0.5, 0.25, 0.25 + 1e-6, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, StateError::NonPositive { name: "a", .. }));
    }

    #[test]
    fn canonicalize_rejects_bad_trace() {
        let err = XState::new(0.3, 0.3, 0.3, 0.3, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, StateError::TraceError { .. }));
    }

    #[test]
    fn canonicalize_rejects_oversized_antidiagonal() {
        let err = XState::new(0.25, 0.25, 0.25, 0.25, 0.3, 0.0).unwrap_err();
        assert!(matches!(
            err,
            StateError::PositivityViolation { name: "alpha", .. }
        ));
        let err = XState::new(0.25, 0.25, 0.25, 0.25, 0.0, -0.1).unwrap_err();
        assert!(matches!(
            err,
            StateError::PositivityViolation { name: "beta", .. }
        ));
    }

    #[test]
    fn canonicalize_renormalizes_small_trace_drift() {
        let eps = 4e-10;
        let s = XState::new(0.25 + eps, 0.25, 0.25, 0.25, 0.2, 0.1).unwrap();
        assert!((s.a() + s.b() + s.c() + s.d() - 1.0).abs() <= CANON_TOL);
        assert!(s.alpha() * s.alpha() <= s.a() * s.d() + CANON_TOL);
    }

    #[test]
    fn canonicalize_is_idempotent_bit_for_bit() {
        let cases = [
            XState::new(0.25 + 3e-10, 0.25, 0.25, 0.25, 0.2499, 0.13).unwrap(),
            general_worst_case(),
            symmetric_worst_case(),
            XState::new(0.5, 0.0, 0.0, 0.5, 0.5, 0.0).unwrap(),
        ];
        for s in cases {
            let again = XStateRaw::new(s.a(), s.b(), s.c(), s.d(), s.alpha(), s.beta())
                .canonicalize()
                .unwrap();
            assert_eq!(s, again, "canonicalize must be a fixed point on its image");
        }
    }

    #[test]
    fn canonicalize_clamps_modulus_to_feasibility_boundary() {
        // Accepted within RAW_TOL, then clamped onto |α|² = ad.
        let a: f64 = 0.4;
        let d: f64 = 0.4;
        let alpha = (a * d + 0.5e-9).sqrt();
        let s = XState::new(a, 0.1, 0.1, d, alpha, 0.0).unwrap();
        assert!(s.alpha() * s.alpha() <= s.a() * s.d() + CANON_TOL);
    }

    #[test]
    fn reduce_a_examples() {
        let pure = XState::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((pure.reduce_a().p0, pure.reduce_a().p1), (1.0, 0.0));

        let mixed = XState::new(0.25, 0.25, 0.25, 0.25, 0.0, 0.0).unwrap();
        assert_eq!((mixed.reduce_a().p0, mixed.reduce_a().p1), (0.5, 0.5));

        let r = general_worst_case().reduce_a();
        assert!((r.p0 - 0.027404).abs() <= 1e-12);
        assert!((r.p1 - 0.972596).abs() <= 1e-12);
        assert!((r.p0 + r.p1 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn reduce_b_examples() {
        let pure = XState::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((pure.reduce_b().p0, pure.reduce_b().p1), (1.0, 0.0));

        let bell = XState::new(0.5, 0.0, 0.0, 0.5, 0.5, 0.0).unwrap();
        assert_eq!((bell.reduce_b().p0, bell.reduce_b().p1), (0.5, 0.5));

        let r = symmetric_worst_case().reduce_b();
        assert!((r.p0 - 0.032014).abs() <= 1e-12);
        assert!((r.p1 - 0.967986).abs() <= 1e-12);
    }

    #[test]
    fn flips_examples() {
        let s = general_worst_case();
        assert_eq!(s.apply_flips(false, false), s);

        let pure = XState::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let flipped = pure.apply_flips(true, false);
        assert_eq!(
            (flipped.a(), flipped.b(), flipped.c(), flipped.d()),
            (0.0, 0.0, 1.0, 0.0)
        );

        let both = s.apply_flips(true, true);
        assert_eq!(
            (both.a(), both.b(), both.c(), both.d()),
            (s.d(), s.c(), s.b(), s.a())
        );
        assert_eq!((both.alpha(), both.beta()), (s.alpha(), s.beta()));
    }

    #[test]
    fn flips_are_involutions() {
        let s = XState::new(0.1, 0.2, 0.3, 0.4, 0.15, 0.2).unwrap();
        assert_eq!(s.apply_flips(true, false).apply_flips(true, false), s);
        assert_eq!(s.apply_flips(false, true).apply_flips(false, true), s);
        assert_eq!(s.apply_flips(true, true).apply_flips(true, true), s);
    }

    #[test]
    fn reduced_states_are_normalized() {
        let s = XState::new(0.1, 0.2, 0.3, 0.4, 0.1, 0.2).unwrap();
        let ra = s.reduce_a();
        let rb = s.reduce_b();
        assert!((ra.p0 + ra.p1 - 1.0).abs() <= 1e-12);
        assert!((rb.p0 + rb.p1 - 1.0).abs() <= 1e-12);
        assert!(ra.p0 >= 0.0 && ra.p1 >= 0.0);
    }

    #[test]
    fn json_round_trip_canonical_and_raw() {
        let s = general_worst_case();
        let text = serde_json::to_string(&s).unwrap();
        let back: XState = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);

        // Raw form with phases parses and canonicalizes to the same state.
        let raw = r#"{"a":0.5,"b":0.0,"c":0.0,"d":0.5,"alpha":0.5,"beta":0.0,
                      "alpha_phase":1.0471975511965976}"#;
        let parsed: XState = serde_json::from_str(raw).unwrap();
        assert_eq!(parsed, XState::new(0.5, 0.0, 0.0, 0.5, 0.5, 0.0).unwrap());
    }

    #[test]
    fn json_rejects_invalid_state() {
        let bad = r#"{"a":0.9,"b":0.9,"c":0.0,"d":0.0,"alpha":0.0,"beta":0.0}"#;
        assert!(serde_json::from_str::<XState>(bad).is_err());
    }
}
