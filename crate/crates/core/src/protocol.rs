//! The measurement-cascade protocol over an (N+2)-qubit GHZ channel.
//!
//! Two fixed parties hold qubits 1 and 2 of the GHZ state
//! (|0..0> + |1..1>)/sqrt(2). The other N parties measure their qubits one by
//! one in rotated bases: qubit N+2 with angle theta_1, qubit N+1 with
//! theta_2, down to qubit 3 with theta_N. Every outcome history leaves the
//! first two qubits in a state alpha|00> + beta|11>; a "+" outcome at angle t
//! scales (alpha, beta) by (cos t, sin t), a "-" outcome maps them to
//! (alpha sin t, -beta cos t). The holder of qubit 1 then concentrates the
//! residual entanglement by attaching an auxiliary qubit, applying
//! [`purification_unitary`], and measuring the auxiliary: outcome |0> leaves a
//! Bell pair (probability 2 min(alpha^2, beta^2)), outcome |1> a product
//! state.
//!
//! [`capacity_closed_form`] gives the average number of classical bits per
//! protocol use carried by the all-plus history,
//! 1 + 2 [1 + (prod cot(theta_i))^2]^-1, which the Monte Carlo machinery in
//! [`crate::analysis`] cross-checks by direct mutual-information estimation.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{
    MeasurementSplit, PureState, SingleQubitUnitary, TwoQubitUnitary, MAX_QUBITS,
};

/// One party's measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementSign {
    Plus,
    Minus,
}

impl MeasurementSign {
    pub fn as_char(self) -> char {
        match self {
            MeasurementSign::Plus => '+',
            MeasurementSign::Minus => '-',
        }
    }
}

/// Strategy for resolving the 2^N outcome histories of the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchPolicy {
    /// Follow only the history in which every party reads "+".
    AllPlus,
    /// Enumerate every reachable history with its exact probability.
    EnumerateAll,
    /// Draw a single history by the Born rule.
    Sample,
}

/// Protocol parameters: N intermediate parties, their measurement angles,
/// how outcome histories are resolved, and the Monte Carlo budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n_intermediate: usize,
    pub angles: Vec<f64>,
    pub branch_policy: BranchPolicy,
    pub trials: u64,
    pub seed: u64,
}

impl ProtocolConfig {
    /// Validates that N >= 1, the channel fits in the dense engine
    /// (N + 2 <= [`MAX_QUBITS`]), and one finite angle is given per party.
    pub fn new(
        n_intermediate: usize,
        angles: Vec<f64>,
        branch_policy: BranchPolicy,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        if n_intermediate == 0 || n_intermediate + 2 > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_intermediate + 2));
        }
        if angles.len() != n_intermediate {
            return Err(Error::AngleCountMismatch {
                angles: angles.len(),
                n: n_intermediate,
            });
        }
        if !angles.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(Self {
            n_intermediate,
            angles,
            branch_policy,
            trials,
            seed,
        })
    }

    pub fn total_qubits(&self) -> usize {
        self.n_intermediate + 2
    }
}

/// One outcome history of the cascade: the signs read out in measurement
/// order, the joint probability of the history, and the normalized residual
/// coefficients of alpha|00> + beta|11> on the two fixed parties (relative
/// sign carried by `beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub signs: Vec<MeasurementSign>,
    pub probability: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BranchOutcome {
    /// The history as a string such as `"++-"`, in measurement order.
    pub fn sign_string(&self) -> String {
        self.signs.iter().map(|s| s.as_char()).collect()
    }

    /// Classical bits per use of this branch after concentration:
    /// 1 + 2 min(alpha^2, beta^2).
    pub fn capacity_bits(&self) -> f64 {
        1.0 + 2.0 * (self.alpha * self.alpha).min(self.beta * self.beta)
    }
}

/// Auxiliary-qubit concentration outcome: both measurement branches of the
/// auxiliary, the unitary parameter actually applied, and whether the roles
/// of |0> and |1> on qubit 1 were exchanged to keep that parameter in [0, 1].
#[derive(Debug, Clone)]
pub struct PurificationResult {
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Bell pair (up to the inherited relative sign); absent when success has
    /// probability zero.
    pub success_state: Option<PureState>,
    /// Product state left on the two parties when the auxiliary reads |1>.
    pub failure_state: Option<PureState>,
    pub u: f64,
    pub swapped: bool,
}

/// The angle whose sine and cosine are the normalized products of the
/// per-party sines and cosines, with the normalizer `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveAngle {
    pub sin_theta: f64,
    pub cos_theta: f64,
    pub a: f64,
}

/// The m-qubit state (|0..0> + |1..1>)/sqrt(2).
pub fn prepare_ghz(total_qubits: usize) -> Result<PureState> {
    if total_qubits < 2 || total_qubits > MAX_QUBITS {
        return Err(Error::UnsupportedQubitCount(total_qubits));
    }
    let len = 1usize << total_qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = h;
    amps[len - 1] = h;
    Ok(PureState::from_normalized(total_qubits, amps))
}

/// The rotation between the computational basis and the measurement basis at
/// angle theta: rows (cos t, sin t) and (sin t, -cos t). Real symmetric and
/// self-inverse.
pub fn measurement_basis(theta: f64) -> SingleQubitUnitary {
    SingleQubitUnitary::rotation_rows(theta)
}

/// Run the measurement cascade on the full state vector.
///
/// Measures qubit N+2 with `angles[0]`, qubit N+1 with `angles[1]`, ...,
/// qubit 3 with `angles[N-1]`. Returns one branch under `AllPlus` or
/// `Sample`, and every reachable branch (probability > 0) under
/// `EnumerateAll`; unreachable histories are omitted since they have no
/// residual state.
pub fn cascade<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<Vec<BranchOutcome>> {
    let ghz = prepare_ghz(config.total_qubits())?;
    match config.branch_policy {
        BranchPolicy::AllPlus => {
            let mut state = ghz;
            let mut probability = 1.0;
            for &theta in &config.angles {
                let split = state.measure_qubit(state.qubit_count(), theta)?;
                probability *= split.plus_probability;
                state = split.plus_state.ok_or(Error::ZeroProbabilityBranch)?;
            }
            Ok(vec![leaf_outcome(
                vec![MeasurementSign::Plus; config.n_intermediate],
                probability,
                &state,
            )])
        }
        BranchPolicy::Sample => {
            let mut state = ghz;
            let mut probability = 1.0;
            let mut signs = Vec::with_capacity(config.n_intermediate);
            for &theta in &config.angles {
                let split = state.measure_qubit(state.qubit_count(), theta)?;
                let take_plus = rng.gen::<f64>() < split.plus_probability;
                let (p, next, sign) = if take_plus {
                    (split.plus_probability, split.plus_state, MeasurementSign::Plus)
                } else {
                    (split.minus_probability, split.minus_state, MeasurementSign::Minus)
                };
                probability *= p;
                signs.push(sign);
                state = next.ok_or(Error::ZeroProbabilityBranch)?;
            }
            Ok(vec![leaf_outcome(signs, probability, &state)])
        }
        BranchPolicy::EnumerateAll => {
            let mut out = Vec::with_capacity(1 << config.n_intermediate);
            let mut signs = Vec::with_capacity(config.n_intermediate);
            enumerate_branches(&ghz, &config.angles, 1.0, &mut signs, &mut out)?;
            Ok(out)
        }
    }
}

fn enumerate_branches(
    state: &PureState,
    remaining: &[f64],
    probability: f64,
    signs: &mut Vec<MeasurementSign>,
    out: &mut Vec<BranchOutcome>,
) -> Result<()> {
    let Some((&theta, rest)) = remaining.split_first() else {
        out.push(leaf_outcome(signs.clone(), probability, state));
        return Ok(());
    };
    let split = state.measure_qubit(state.qubit_count(), theta)?;
    let arms: [(f64, Option<PureState>, MeasurementSign); 2] = [
        (split.plus_probability, split.plus_state, MeasurementSign::Plus),
        (split.minus_probability, split.minus_state, MeasurementSign::Minus),
    ];
    for (p, post, sign) in arms {
        if let Some(post) = post {
            signs.push(sign);
            enumerate_branches(&post, rest, probability * p, signs, out)?;
            signs.pop();
        }
    }
    Ok(())
}

/// Extract (alpha, beta) from the terminal two-qubit state. The cascade is
/// real arithmetic throughout, so the imaginary parts vanish.
fn leaf_outcome(signs: Vec<MeasurementSign>, probability: f64, state: &PureState) -> BranchOutcome {
    debug_assert_eq!(state.qubit_count(), 2);
    let amps = state.amplitudes();
    debug_assert!(amps[0].im.abs() < 1e-12 && amps[3].im.abs() < 1e-12);
    debug_assert!(amps[1].norm() < 1e-12 && amps[2].norm() < 1e-12);
    BranchOutcome {
        signs,
        probability,
        alpha: amps[0].re,
        beta: amps[3].re,
    }
}

/// Closed-form branch coefficients by the sign recurrence; the independent
/// oracle for [`cascade`].
///
/// Starting from (1/sqrt2, 1/sqrt2), a "+" at angle t maps
/// (alpha, beta) -> (alpha cos t, beta sin t) and a "-" maps it to
/// (alpha sin t, -beta cos t). The squared norm of the unnormalized result is
/// the joint probability of the history; the returned coefficients are
/// normalized. A history of probability zero returns zero coefficients.
pub fn closed_form_branch(angles: &[f64], signs: &[MeasurementSign]) -> Result<BranchOutcome> {
    if angles.len() != signs.len() {
        return Err(Error::AngleSignMismatch {
            angles: angles.len(),
            signs: signs.len(),
        });
    }
    let mut alpha = std::f64::consts::FRAC_1_SQRT_2;
    let mut beta = std::f64::consts::FRAC_1_SQRT_2;
    for (&theta, &sign) in angles.iter().zip(signs) {
        let (sin, cos) = theta.sin_cos();
        match sign {
            MeasurementSign::Plus => {
                alpha *= cos;
                beta *= sin;
            }
            MeasurementSign::Minus => {
                alpha *= sin;
                beta *= -cos;
            }
        }
    }
    let probability = alpha * alpha + beta * beta;
    if probability > 0.0 {
        let inv = probability.sqrt().recip();
        alpha *= inv;
        beta *= inv;
    }
    Ok(BranchOutcome {
        signs: signs.to_vec(),
        probability,
        alpha,
        beta,
    })
}

/// The concentration parameter prod tan(theta_i).
///
/// Errors instead of returning a non-finite value when a factor sits on a
/// tangent pole or the product overflows.
pub fn u_parameter(angles: &[f64]) -> Result<f64> {
    let mut product = 1.0;
    for (i, &theta) in angles.iter().enumerate() {
        let (sin, cos) = theta.sin_cos();
        if cos == 0.0 {
            return Err(Error::TanPole(i));
        }
        product *= sin / cos;
        if !product.is_finite() {
            return Err(Error::TanPole(i));
        }
    }
    Ok(product)
}

/// The concentration unitary on (qubit 1, auxiliary), basis order
/// |00>, |10>, |01>, |11>:
///
/// ```text
///   u        0   sqrt(1-u^2)   0
///   0        1   0             0
///   0        0   0            -1
///   sqrt(1-u^2)  0    -u       0
/// ```
pub fn purification_unitary(u: f64) -> Result<TwoQubitUnitary> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::UnitaryParameterOutOfRange(u));
    }
    let w = (1.0 - u * u).sqrt();
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let u = Complex64::new(u, 0.0);
    let w = Complex64::new(w, 0.0);
    TwoQubitUnitary::new([
        [u, z, w, z],
        [z, one, z, z],
        [z, z, z, -one],
        [w, z, -u, z],
    ])
}

/// The same unitary with the computational labels of qubit 1 exchanged
/// (positions 0<->1 and 2<->3 in the declared basis order).
fn purification_unitary_swapped(u: f64) -> Result<TwoQubitUnitary> {
    let base = purification_unitary(u)?;
    let flip = [1usize, 0, 3, 2];
    let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            entries[i][j] = base.entries()[flip[i]][flip[j]];
        }
    }
    TwoQubitUnitary::new(entries)
}

/// Concentrate a residual alpha|00> + beta|11> into a Bell pair.
///
/// Attaches an auxiliary qubit in |0>, applies the concentration unitary with
/// u = min(|alpha|, |beta|) / max(|alpha|, |beta|) (labels of qubit 1
/// exchanged when |beta| > |alpha|, reported via `swapped`), and measures the
/// auxiliary in the computational basis. The |0> outcome has probability
/// 2 min(alpha^2, beta^2) and leaves a maximally entangled pair whose
/// relative sign is sign(alpha * beta); the |1> outcome leaves a product
/// state.
pub fn purify(branch: &BranchOutcome) -> Result<PurificationResult> {
    let norm = branch.alpha * branch.alpha + branch.beta * branch.beta;
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::BranchNotNormalized(norm));
    }
    let (abs_a, abs_b) = (branch.alpha.abs(), branch.beta.abs());
    let swapped = abs_b > abs_a;
    let u = abs_a.min(abs_b) / abs_a.max(abs_b);
    let unitary = if swapped {
        purification_unitary_swapped(u)?
    } else {
        purification_unitary(u)?
    };

    // Qubit order (1, 2, aux): the residual occupies |000> and |110>.
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = Complex64::new(branch.alpha, 0.0);
    amps[0b110] = Complex64::new(branch.beta, 0.0);
    let joint = PureState::from_normalized(3, amps).apply_two_qubit(1, 3, &unitary)?;
    let MeasurementSplit {
        plus_probability,
        minus_probability,
        plus_state,
        minus_state,
    } = joint.measure_qubit(3, 0.0)?;

    Ok(PurificationResult {
        success_probability: plus_probability,
        failure_probability: minus_probability,
        success_state: plus_state,
        failure_state: minus_state,
        u,
        swapped,
    })
}

/// Effective angle of the all-plus residual: sin and cos are the normalized
/// products of per-party sines and cosines, a = (prod sin)^2 + (prod cos)^2.
pub fn effective_angle(angles: &[f64]) -> EffectiveAngle {
    let mut prod_sin = 1.0;
    let mut prod_cos = 1.0;
    for &theta in angles {
        let (sin, cos) = theta.sin_cos();
        prod_sin *= sin;
        prod_cos *= cos;
    }
    let a = prod_sin * prod_sin + prod_cos * prod_cos;
    let inv = a.sqrt().recip();
    EffectiveAngle {
        sin_theta: prod_sin * inv,
        cos_theta: prod_cos * inv,
        a,
    }
}

/// Classical information capacity of the all-plus channel:
/// C = 1 + 2 [1 + (prod cot(theta_i))^2]^-1 = 1 + 2 sin^2(theta) bits.
///
/// An angle of exactly zero drives the cotangent product to infinity and the
/// expression to its C = 1 limit (a product channel carries one bit), so no
/// error is needed there.
pub fn capacity_closed_form(angles: &[f64]) -> f64 {
    let mut cot_product = 1.0;
    for &theta in angles {
        let (sin, cos) = theta.sin_cos();
        cot_product *= cos / sin;
    }
    1.0 + 2.0 / (1.0 + cot_product * cot_product)
}
