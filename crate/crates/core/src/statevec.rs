//! Dense pure-state simulation engine.
//!
//! States are vectors of 2^n complex amplitudes over the computational basis.
//! Qubits are numbered 1..=n with qubit 1 as the *most significant* bit, so
//! |q1 q2 .. qn> sits at index sum(q_k * 2^(n-k)). This matches the usual
//! leftmost-qubit-first ket notation: on three qubits, |110> is index 6.
//!
//! Measurement is projective in a rotated real basis
//! |+> = cos(t)|0> + sin(t)|1>, |-> = sin(t)|0> - cos(t)|1>, and the measured
//! qubit is removed from the register, so an n-qubit state collapses to a pair
//! of (n-1)-qubit states. Post-measurement states keep whatever global phase
//! raw projection produces; comparisons should use
//! [`PureState::approx_eq_up_to_phase`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense representation supports (2^26 amplitudes = 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Tolerance for validating caller-supplied states and matrices.
pub const INPUT_TOLERANCE: f64 = 1e-10;

/// A normalized pure state on `qubit_count` qubits.
///
/// `qubit_count` may be 0: measuring the last qubit of a register leaves the
/// empty register, whose single amplitude is a pure phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubit_count: usize,
    amplitudes: Vec<Complex64>,
}

/// A 2x2 unitary, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitUnitary {
    entries: [[Complex64; 2]; 2],
}

/// A 4x4 unitary on an ordered qubit pair, validated on construction.
///
/// Rows and columns are ordered |00>, |10>, |01>, |11> of the
/// (acted-on qubit, partner qubit) pair. Note the second slot varies *last*:
/// position 1 is |1 0>, not |0 1>.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitUnitary {
    entries: [[Complex64; 4]; 4],
}

/// Result of projectively measuring one qubit: both collapse branches with
/// their Born probabilities. A branch state is `None` exactly when its
/// probability is zero.
#[derive(Debug, Clone)]
pub struct MeasurementSplit {
    pub plus_probability: f64,
    pub minus_probability: f64,
    pub plus_state: Option<PureState>,
    pub minus_state: Option<PureState>,
}

impl PureState {
    /// The computational basis state |bits>, e.g. `basis_state(2, "10")`.
    pub fn basis_state(qubit_count: usize, bits: &str) -> Result<Self> {
        if qubit_count == 0 || qubit_count > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(qubit_count));
        }
        if bits.len() != qubit_count || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidBitString {
                bits: bits.to_string(),
                qubit_count,
            });
        }
        let index = bits
            .bytes()
            .fold(0usize, |acc, b| (acc << 1) | usize::from(b == b'1'));
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            qubit_count,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes, validating length, finiteness and
    /// normalization (within [`INPUT_TOLERANCE`]).
    pub fn from_amplitudes(qubit_count: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if qubit_count == 0 || qubit_count > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(qubit_count));
        }
        if amplitudes.len() != 1 << qubit_count {
            return Err(Error::InvalidAmplitudeCount {
                got: amplitudes.len(),
                expected: 1 << qubit_count,
            });
        }
        if !amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > INPUT_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            qubit_count,
            amplitudes,
        })
    }

    /// Internal constructor for states already known to be normalized.
    pub(crate) fn from_normalized(qubit_count: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << qubit_count);
        Self {
            qubit_count,
            amplitudes,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bit mask selecting qubit `q` (1-based, MSB-first) in a basis index.
    fn mask(&self, q: usize) -> Result<usize> {
        if q == 0 || q > self.qubit_count {
            return Err(Error::QubitIndexOutOfRange {
                index: q,
                qubit_count: self.qubit_count,
            });
        }
        Ok(1 << (self.qubit_count - q))
    }

    /// Apply a single-qubit unitary to qubit `q`.
    pub fn apply_single_qubit(&self, q: usize, u: &SingleQubitUnitary) -> Result<Self> {
        let mask = self.mask(q)?;
        let [[u00, u01], [u10, u11]] = u.entries;
        let mut out = self.amplitudes.clone();
        for i0 in 0..self.amplitudes.len() {
            if i0 & mask == 0 {
                let i1 = i0 | mask;
                let a = self.amplitudes[i0];
                let b = self.amplitudes[i1];
                out[i0] = u00 * a + u01 * b;
                out[i1] = u10 * a + u11 * b;
            }
        }
        Ok(Self::from_normalized(self.qubit_count, out))
    }

    /// Apply a two-qubit unitary to the ordered pair (`q1`, `q2`).
    ///
    /// The matrix basis order is the one declared by [`TwoQubitUnitary`]:
    /// |00>, |10>, |01>, |11> of (q1, q2).
    pub fn apply_two_qubit(&self, q1: usize, q2: usize, u: &TwoQubitUnitary) -> Result<Self> {
        if q1 == q2 {
            return Err(Error::DuplicateQubit(q1));
        }
        let m1 = self.mask(q1)?;
        let m2 = self.mask(q2)?;
        let mut out = self.amplitudes.clone();
        for base in 0..self.amplitudes.len() {
            if base & (m1 | m2) == 0 {
                // Index order matches the declared basis order of the matrix.
                let idx = [base, base | m1, base | m2, base | m1 | m2];
                let vec = idx.map(|i| self.amplitudes[i]);
                for (row, &i) in u.entries.iter().zip(idx.iter()) {
                    out[i] = row[0] * vec[0] + row[1] * vec[1] + row[2] * vec[2] + row[3] * vec[3];
                }
            }
        }
        Ok(Self::from_normalized(self.qubit_count, out))
    }

    /// Measure qubit `q` in the rotated basis with angle `theta`.
    ///
    /// Projects onto |+> = cos(t)|0> + sin(t)|1> and |-> = sin(t)|0> - cos(t)|1>,
    /// removes the measured qubit, and renormalizes each branch. A branch of
    /// probability zero has no post-state.
    pub fn measure_qubit(&self, q: usize, theta: f64) -> Result<MeasurementSplit> {
        let mask = self.mask(q)?;
        let (sin, cos) = theta.sin_cos();
        let half = self.amplitudes.len() / 2;
        let mut plus = Vec::with_capacity(half);
        let mut minus = Vec::with_capacity(half);
        let low_mask = mask - 1;
        for j in 0..half {
            let i0 = ((j & !low_mask) << 1) | (j & low_mask);
            let i1 = i0 | mask;
            let a = self.amplitudes[i0];
            let b = self.amplitudes[i1];
            plus.push(cos * a + sin * b);
            minus.push(sin * a - cos * b);
        }
        let plus_probability: f64 = plus.iter().map(|a| a.norm_sqr()).sum();
        let minus_probability: f64 = minus.iter().map(|a| a.norm_sqr()).sum();
        let renorm = |mut amps: Vec<Complex64>, p: f64| -> Option<PureState> {
            if p > 0.0 {
                let inv = 1.0 / p.sqrt();
                for a in &mut amps {
                    *a *= inv;
                }
                Some(PureState::from_normalized(self.qubit_count - 1, amps))
            } else {
                None
            }
        };
        Ok(MeasurementSplit {
            plus_probability,
            minus_probability,
            plus_state: renorm(plus, plus_probability),
            minus_state: renorm(minus, minus_probability),
        })
    }

    /// <self|other>.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.qubit_count != other.qubit_count {
            return Err(Error::QubitCountMismatch {
                left: self.qubit_count,
                right: other.qubit_count,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the states are equal up to a global phase, amplitude-wise
    /// within `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.qubit_count != other.qubit_count {
            return false;
        }
        // Align phases on the largest amplitude; normalized states always
        // have one of magnitude >= 2^(-n/2).
        let (pivot, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .expect("states are non-empty");
        let pa = self.amplitudes[pivot];
        let pb = other.amplitudes[pivot];
        if pa.norm() <= tol || pb.norm() <= tol {
            // The pivot carries weight >= 2^(-n/2) in any normalized state, so
            // a (near-)zero partner amplitude means the states differ.
            return false;
        }
        let phase = (pb / pa) / (pb / pa).norm();
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }
}

/// Largest entry of |M^dagger M - I|.
fn unitarity_residual_2(entries: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                dot += entries[k][i].conj() * entries[k][j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

fn unitarity_residual_4(entries: &[[Complex64; 4]; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..4 {
                dot += entries[k][i].conj() * entries[k][j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

impl SingleQubitUnitary {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let residual = unitarity_residual_2(&entries);
        if residual > INPUT_TOLERANCE {
            return Err(Error::NotUnitary(residual));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self {
            entries: rows.map(|r| r.map(|x| Complex64::new(x, 0.0))),
        }
    }

    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Self {
            entries: [
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            ],
        }
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// Rotation between the computational basis and the measurement basis
    /// {cos(t)|0>+sin(t)|1>, sin(t)|0>-cos(t)|1>}. Real, symmetric, and
    /// self-inverse.
    pub(crate) fn rotation_rows(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self::from_real([[cos, sin], [sin, -cos]])
    }
}

impl TwoQubitUnitary {
    pub fn new(entries: [[Complex64; 4]; 4]) -> Result<Self> {
        let residual = unitarity_residual_4(&entries);
        if residual > INPUT_TOLERANCE {
            return Err(Error::NotUnitary(residual));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    pub fn identity() -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_phi_plus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_amplitudes(2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    /// Random normalized state, reproducible from the seed.
    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> PureState {
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        PureState::from_normalized(n, amps)
    }

    /// Random single-qubit unitary built from an exactly-unitary parameterization.
    fn random_unitary(rng: &mut ChaCha8Rng) -> SingleQubitUnitary {
        let (t, p, l) = (
            rng.gen::<f64>() * PI,
            rng.gen::<f64>() * 2.0 * PI,
            rng.gen::<f64>() * 2.0 * PI,
        );
        let (st, ct) = (t / 2.0).sin_cos();
        SingleQubitUnitary::new([
            [c(ct, 0.0), -Complex64::from_polar(st, l)],
            [Complex64::from_polar(st, p), Complex64::from_polar(ct, p + l)],
        ])
        .unwrap()
    }

    #[test]
    fn basis_state_indexing() {
        let s = PureState::basis_state(1, "0").unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(s.amplitudes()[1], c(0.0, 0.0));

        // MSB-first: |10> is index 2, |111> is index 7.
        let s = PureState::basis_state(2, "10").unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
        let s = PureState::basis_state(3, "111").unwrap();
        assert_eq!(s.amplitudes()[7], c(1.0, 0.0));
    }

    #[test]
    fn basis_state_rejects_bad_input() {
        assert!(matches!(
            PureState::basis_state(0, ""),
            Err(Error::UnsupportedQubitCount(0))
        ));
        assert!(matches!(
            PureState::basis_state(27, &"0".repeat(27)),
            Err(Error::UnsupportedQubitCount(27))
        ));
        assert!(matches!(
            PureState::basis_state(2, "012"),
            Err(Error::InvalidBitString { .. })
        ));
        assert!(matches!(
            PureState::basis_state(2, "1"),
            Err(Error::InvalidBitString { .. })
        ));
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(matches!(
            PureState::from_amplitudes(1, vec![c(1.0, 0.0)]),
            Err(Error::InvalidAmplitudeCount { .. })
        ));
        assert!(matches!(
            PureState::from_amplitudes(1, vec![c(0.7, 0.0), c(0.3, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PureState::from_amplitudes(1, vec![c(f64::NAN, 0.0), c(0.0, 0.0)]),
            Err(Error::NonFiniteAmplitude)
        ));
    }

    #[test]
    fn pauli_x_flips() {
        let s = PureState::basis_state(1, "0").unwrap();
        let flipped = s.apply_single_qubit(1, &SingleQubitUnitary::pauli_x()).unwrap();
        assert!(flipped.approx_eq_up_to_phase(&PureState::basis_state(1, "1").unwrap(), TOL));
    }

    #[test]
    fn paulis_on_bob_permute_bell_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi_minus =
            PureState::from_amplitudes(2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-h, 0.0)])
                .unwrap();
        let psi_plus =
            PureState::from_amplitudes(2, vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)])
                .unwrap();

        let z = bell_phi_plus().apply_single_qubit(2, &SingleQubitUnitary::pauli_z()).unwrap();
        assert!(z.approx_eq_up_to_phase(&phi_minus, TOL));

        let x = bell_phi_plus().apply_single_qubit(2, &SingleQubitUnitary::pauli_x()).unwrap();
        assert!(x.approx_eq_up_to_phase(&psi_plus, TOL));
    }

    #[test]
    fn single_qubit_errors() {
        let s = PureState::basis_state(2, "00").unwrap();
        assert!(matches!(
            s.apply_single_qubit(3, &SingleQubitUnitary::identity()),
            Err(Error::QubitIndexOutOfRange { .. })
        ));
        assert!(matches!(
            SingleQubitUnitary::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.9, 0.0)]]),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn two_qubit_identity_and_errors() {
        let s = PureState::basis_state(2, "00").unwrap();
        let out = s.apply_two_qubit(1, 2, &TwoQubitUnitary::identity()).unwrap();
        assert!(out.approx_eq_up_to_phase(&s, TOL));
        assert!(matches!(
            s.apply_two_qubit(1, 1, &TwoQubitUnitary::identity()),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(matches!(
            s.apply_two_qubit(1, 3, &TwoQubitUnitary::identity()),
            Err(Error::QubitIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn measure_ghz_quarter_pi() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(h, 0.0);
        amps[7] = c(h, 0.0);
        let ghz = PureState::from_amplitudes(3, amps).unwrap();
        let split = ghz.measure_qubit(3, FRAC_PI_4).unwrap();
        assert!((split.plus_probability - 0.5).abs() < TOL);
        assert!((split.minus_probability - 0.5).abs() < TOL);
        assert!(split
            .plus_state
            .unwrap()
            .approx_eq_up_to_phase(&bell_phi_plus(), TOL));
    }

    #[test]
    fn measure_ghz_computational() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(h, 0.0);
        amps[7] = c(h, 0.0);
        let ghz = PureState::from_amplitudes(3, amps).unwrap();
        let split = ghz.measure_qubit(3, 0.0).unwrap();
        assert!((split.plus_probability - 0.5).abs() < TOL);
        assert!(split
            .plus_state
            .unwrap()
            .approx_eq_up_to_phase(&PureState::basis_state(2, "00").unwrap(), TOL));
        // Minus branch is -|11> up to the global sign the raw projection leaves.
        assert!(split
            .minus_state
            .unwrap()
            .approx_eq_up_to_phase(&PureState::basis_state(2, "11").unwrap(), TOL));
    }

    #[test]
    fn measure_single_qubit_born_rule() {
        let s = PureState::basis_state(1, "0").unwrap();
        let split = s.measure_qubit(1, FRAC_PI_3).unwrap();
        assert!((split.plus_probability - 0.25).abs() < TOL);
        assert!((split.minus_probability - 0.75).abs() < TOL);
        // Post-states live on the empty register.
        assert_eq!(split.plus_state.unwrap().qubit_count(), 0);
    }

    #[test]
    fn measure_zero_probability_branch_is_absent() {
        let s = PureState::basis_state(1, "0").unwrap();
        let split = s.measure_qubit(1, 0.0).unwrap();
        assert_eq!(split.plus_probability, 1.0);
        assert_eq!(split.minus_probability, 0.0);
        assert!(split.minus_state.is_none());
    }

    #[test]
    fn inner_products() {
        let zero = PureState::basis_state(1, "0").unwrap();
        let one = PureState::basis_state(1, "1").unwrap();
        assert!((zero.inner_product(&zero).unwrap() - c(1.0, 0.0)).norm() < TOL);
        assert!(zero.inner_product(&one).unwrap().norm() < TOL);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus =
            PureState::from_amplitudes(2, vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert!(bell_phi_plus().inner_product(&psi_plus).unwrap().norm() < TOL);
        assert!(matches!(
            zero.inner_product(&psi_plus),
            Err(Error::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn random_unitaries_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let s = random_state(n, &mut rng);
            let q = rng.gen_range(1..=n);
            let out = s.apply_single_qubit(q, &random_unitary(&mut rng)).unwrap();
            assert!((out.norm() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn measurement_probabilities_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let s = random_state(n, &mut rng);
            let q = rng.gen_range(1..=n);
            let theta = (rng.gen::<f64>() - 0.5) * 4.0 * PI;
            let split = s.measure_qubit(q, theta).unwrap();
            assert!((split.plus_probability + split.minus_probability - 1.0).abs() < TOL);
        }
    }

    /// Re-embed a post-measurement state against its basis vector and check
    /// the amplitude-weighted branches rebuild the input.
    #[test]
    fn measurement_reconstructs_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let s = random_state(n, &mut rng);
            let q = rng.gen_range(1..=n);
            let theta = rng.gen::<f64>() * PI;
            let split = s.measure_qubit(q, theta).unwrap();
            let (sin, cos) = theta.sin_cos();

            let mut rebuilt = vec![c(0.0, 0.0); 1 << n];
            let mask = 1usize << (n - q);
            let mut add = |branch: &Option<PureState>, p: f64, v0: f64, v1: f64| {
                if let Some(state) = branch {
                    let w = p.sqrt();
                    for (j, amp) in state.amplitudes().iter().enumerate() {
                        let low = j & (mask - 1);
                        let i0 = ((j & !(mask - 1)) << 1) | low;
                        rebuilt[i0] += w * v0 * amp;
                        rebuilt[i0 | mask] += w * v1 * amp;
                    }
                }
            };
            add(&split.plus_state, split.plus_probability, cos, sin);
            add(&split.minus_state, split.minus_probability, sin, -cos);

            for (a, b) in rebuilt.iter().zip(s.amplitudes()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn disjoint_single_qubit_ops_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let s = random_state(n, &mut rng);
            let q1 = rng.gen_range(1..=n);
            let q2 = loop {
                let q = rng.gen_range(1..=n);
                if q != q1 {
                    break q;
                }
            };
            let (u1, u2) = (random_unitary(&mut rng), random_unitary(&mut rng));
            let ab = s.apply_single_qubit(q1, &u1).unwrap().apply_single_qubit(q2, &u2).unwrap();
            let ba = s.apply_single_qubit(q2, &u2).unwrap().apply_single_qubit(q1, &u1).unwrap();
            for (a, b) in ab.amplitudes().iter().zip(ba.amplitudes()) {
                assert!((a - b).norm() < TOL);
            }
        }
    }

    #[test]
    fn measurement_angle_is_pi_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let s = random_state(n, &mut rng);
            let q = rng.gen_range(1..=n);
            let theta = rng.gen::<f64>() * PI;
            let a = s.measure_qubit(q, theta).unwrap();
            let b = s.measure_qubit(q, theta + PI).unwrap();
            assert!((a.plus_probability - b.plus_probability).abs() < TOL);
            assert!((a.minus_probability - b.minus_probability).abs() < TOL);
        }
    }
}
