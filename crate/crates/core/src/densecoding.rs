//! Bennett-Wiesner codec: Pauli encoding on the sender's qubit, Bell-basis
//! measurement, decoding tables, and mutual information of the induced
//! classical channel.
//!
//! The message <-> bit-pair table is fixed as I=00, X=01, Y=10, Z=11. On a
//! |00>+|11> channel the encodings land on PhiPlus, PsiPlus, PsiMinus,
//! PhiMinus respectively (the Y image carries an unobservable global phase i).
//! A concentration failure leaves a product state |10> or |01>, on which a
//! Bell measurement distinguishes only {I, Z} from {X, Y}; the product-channel
//! decoder is maximum likelihood with ties broken toward the lower message
//! index, worth exactly one bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{PureState, SingleQubitUnitary};

/// Two-bit message, identified with a Pauli operation on the sender's qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliMessage {
    I,
    X,
    Y,
    Z,
}

impl PauliMessage {
    pub const ALL: [PauliMessage; 4] = [
        PauliMessage::I,
        PauliMessage::X,
        PauliMessage::Y,
        PauliMessage::Z,
    ];

    /// Published bijection with two-bit strings: I=00, X=01, Y=10, Z=11.
    pub fn bits(self) -> (bool, bool) {
        let i = self.index();
        (i & 2 != 0, i & 1 != 0)
    }

    pub fn from_bits(bits: (bool, bool)) -> Self {
        Self::ALL[(usize::from(bits.0) << 1) | usize::from(bits.1)]
    }

    pub fn index(self) -> usize {
        match self {
            PauliMessage::I => 0,
            PauliMessage::X => 1,
            PauliMessage::Y => 2,
            PauliMessage::Z => 3,
        }
    }

    fn unitary(self) -> SingleQubitUnitary {
        match self {
            PauliMessage::I => SingleQubitUnitary::identity(),
            PauliMessage::X => SingleQubitUnitary::pauli_x(),
            PauliMessage::Y => SingleQubitUnitary::pauli_y(),
            PauliMessage::Z => SingleQubitUnitary::pauli_z(),
        }
    }
}

/// Outcome of a Bell-basis measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn index(self) -> usize {
        match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PhiMinus => 1,
            BellOutcome::PsiPlus => 2,
            BellOutcome::PsiMinus => 3,
        }
    }
}

/// The four Bell states in the order of [`BellOutcome::ALL`].
pub fn bell_states() -> [PureState; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let make = |amps: [f64; 4]| {
        PureState::from_normalized(
            2,
            amps.iter().map(|&x| num_complex::Complex64::new(x, 0.0)).collect(),
        )
    };
    [
        make([h, 0.0, 0.0, h]),   // (|00> + |11>)/sqrt2
        make([h, 0.0, 0.0, -h]),  // (|00> - |11>)/sqrt2
        make([0.0, h, h, 0.0]),   // (|01> + |10>)/sqrt2
        make([0.0, h, -h, 0.0]),  // (|01> - |10>)/sqrt2
    ]
}

/// Apply the message's Pauli to the sender's qubit.
pub fn encode(message: PauliMessage, state: &PureState, bob_qubit: usize) -> Result<PureState> {
    state.apply_single_qubit(bob_qubit, &message.unitary())
}

/// Born probabilities of the four Bell outcomes for a two-qubit state.
pub fn bell_probabilities(state: &PureState) -> Result<[f64; 4]> {
    if state.qubit_count() != 2 {
        return Err(Error::NotTwoQubits(state.qubit_count()));
    }
    let basis = bell_states();
    let mut probabilities = [0.0; 4];
    for (p, bell) in probabilities.iter_mut().zip(basis.iter()) {
        *p = bell.inner_product(state)?.norm_sqr();
    }
    Ok(probabilities)
}

/// A sampled Bell measurement together with its full outcome distribution.
#[derive(Debug, Clone)]
pub struct BellMeasurement {
    pub outcome: BellOutcome,
    pub probabilities: [f64; 4],
}

/// Measure a two-qubit state in the Bell basis, sampling the outcome.
pub fn bell_measure<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> Result<BellMeasurement> {
    let probabilities = bell_probabilities(state)?;
    let draw = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut outcome = None;
    for (k, &p) in probabilities.iter().enumerate() {
        acc += p;
        if draw < acc {
            outcome = Some(BellOutcome::ALL[k]);
            break;
        }
    }
    // Rounding can leave draw >= acc; fall back to the last reachable outcome.
    let outcome = outcome.unwrap_or_else(|| {
        let last = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(3);
        BellOutcome::ALL[last]
    });
    Ok(BellMeasurement {
        outcome,
        probabilities,
    })
}

/// Sign of the |11> component relative to |00> in a Bell-type channel state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    pub fn from_signum(x: f64) -> Self {
        if x < 0.0 {
            PhaseSign::Minus
        } else {
            PhaseSign::Plus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Bell,
    Product,
}

/// What the decoder knows about the channel: whether concentration succeeded
/// and, for a Bell channel, the relative sign its state carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelDescriptor {
    pub kind: ChannelKind,
    pub relative_phase_sign: PhaseSign,
}

/// Invert the encoding for the given channel.
///
/// For a Bell channel the map is the inverse of the encoding bijection,
/// adjusted for the channel's relative sign. For a product channel (|10> or
/// |01>, the two concentration-failure states) the outcome separates {I, Z}
/// from {X, Y} only; maximum likelihood with the lower message index on ties
/// yields I for Psi outcomes and X for Phi outcomes.
pub fn decode(outcome: BellOutcome, channel: &ChannelDescriptor) -> PauliMessage {
    match (channel.kind, channel.relative_phase_sign) {
        (ChannelKind::Bell, PhaseSign::Plus) => match outcome {
            BellOutcome::PhiPlus => PauliMessage::I,
            BellOutcome::PsiPlus => PauliMessage::X,
            BellOutcome::PsiMinus => PauliMessage::Y,
            BellOutcome::PhiMinus => PauliMessage::Z,
        },
        (ChannelKind::Bell, PhaseSign::Minus) => match outcome {
            BellOutcome::PhiMinus => PauliMessage::I,
            BellOutcome::PsiMinus => PauliMessage::X,
            BellOutcome::PsiPlus => PauliMessage::Y,
            BellOutcome::PhiPlus => PauliMessage::Z,
        },
        (ChannelKind::Product, _) => match outcome {
            BellOutcome::PhiPlus | BellOutcome::PhiMinus => PauliMessage::X,
            BellOutcome::PsiPlus | BellOutcome::PsiMinus => PauliMessage::I,
        },
    }
}

/// Row-stochastic 4x4 table p(outcome | message).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    matrix: [[f64; 4]; 4],
}

impl ConditionalDistribution {
    pub fn new(matrix: [[f64; 4]; 4]) -> Result<Self> {
        for (i, row) in matrix.iter().enumerate() {
            if row.iter().any(|&p| !p.is_finite() || p < -1e-12 || p > 1.0 + 1e-12) {
                return Err(Error::InvalidDistribution(format!(
                    "row {i} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDistribution(format!(
                    "row {i} sums to {sum}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Empirical conditional from per-(message, outcome) counts. A message
    /// that was never drawn contributes an uninformative uniform row.
    pub fn from_counts(counts: &[[u64; 4]; 4]) -> Self {
        let mut matrix = [[0.0; 4]; 4];
        for (row, count_row) in matrix.iter_mut().zip(counts.iter()) {
            let total: u64 = count_row.iter().sum();
            if total == 0 {
                *row = [0.25; 4];
            } else {
                for (p, &k) in row.iter_mut().zip(count_row.iter()) {
                    *p = k as f64 / total as f64;
                }
            }
        }
        Self { matrix }
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.matrix
    }
}

/// Shannon mutual information I(X;Y) in bits for a message prior and the
/// outcome table, with 0 log 0 = 0.
pub fn mutual_information(dist: &ConditionalDistribution, prior: &[f64; 4]) -> Result<f64> {
    if prior.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::InvalidPrior("negative or non-finite entry".into()));
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidPrior(format!("sums to {total}")));
    }

    let mut marginal = [0.0; 4];
    for (x, row) in dist.matrix.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            marginal[y] += prior[x] * p;
        }
    }
    let mut info = 0.0;
    for (x, row) in dist.matrix.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if prior[x] > 0.0 && p > 0.0 {
                info += prior[x] * p * (p / marginal[y]).log2();
            }
        }
    }
    Ok(info)
}
