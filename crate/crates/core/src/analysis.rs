//! Entanglement metrics, full-pipeline Monte Carlo estimation of the
//! transmitted information, branch-ensemble statistics, and parameter sweeps.
//!
//! Trials are independent: trial k draws from a ChaCha stream that is a pure
//! function of (seed, k), so parallel and serial runs produce identical
//! reports. Set `RAYON_NUM_THREADS` to control the worker count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::densecoding::{
    bell_measure, bell_probabilities, decode, encode, mutual_information, BellOutcome,
    ChannelDescriptor, ChannelKind, ConditionalDistribution, PauliMessage, PhaseSign,
};
use crate::error::{Error, Result};
use crate::protocol::{
    capacity_closed_form, cascade, closed_form_branch, purify, BranchOutcome, BranchPolicy,
    MeasurementSign, ProtocolConfig, PurificationResult,
};
use crate::statevec::PureState;

/// Largest N for which the 2^N branch ensemble is enumerated exactly.
pub const MAX_ENUMERATION: usize = 20;

/// Bootstrap resample count for the reported standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Rejection-mode retry budget per trial before conditioning is declared
/// unattainable.
pub const MAX_REJECTION_ATTEMPTS: usize = 100_000;

// Stream layout on one seed: trials use streams 0..trials, bootstrap
// resamples live far above them.
const BOOTSTRAP_STREAM_BASE: u64 = 1 << 63;

const UNIFORM_PRIOR: [f64; 4] = [0.25; 4];

/// One full protocol round: cascade history, concentration outcome, message
/// round trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub branch_signs: Vec<MeasurementSign>,
    pub aux_success: bool,
    pub message_sent: PauliMessage,
    pub outcome: BellOutcome,
    pub message_decoded: PauliMessage,
}

/// Probability and concentrated capacity of one cascade history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSummary {
    pub probability: f64,
    pub capacity_bits: f64,
}

/// Everything the estimators know about a configuration: the closed-form
/// capacity, the branch ensemble, and (when trials were run) the Monte Carlo
/// cross-check with its bootstrap error bar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub closed_form: f64,
    pub branch_average: Option<f64>,
    pub monte_carlo_estimate: Option<f64>,
    pub standard_error: Option<f64>,
    pub success_probability: Option<f64>,
    pub trials: u64,
    pub per_branch: Option<BTreeMap<String, BranchSummary>>,
}

/// Estimator switches not carried by the protocol configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct EstimateOptions {
    /// Estimate the failure-channel information from counts instead of the
    /// exact 4x4 outcome table.
    pub fully_empirical: bool,
}

/// Pure-state concurrence of a two-qubit state: 2 |a00 a11 - a01 a10|.
/// 1 for Bell states, 0 for product states, 2|alpha beta| in between.
pub fn concurrence(state: &PureState) -> Result<f64> {
    if state.qubit_count() != 2 {
        return Err(Error::NotTwoQubits(state.qubit_count()));
    }
    let a = state.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).clamp(0.0, 1.0))
}

/// Channel state pair left by concentrating one branch, with the descriptors
/// the decoder uses on each side.
struct ChannelSetup {
    purification: PurificationResult,
    success_descriptor: ChannelDescriptor,
    failure_descriptor: ChannelDescriptor,
}

impl ChannelSetup {
    fn new(branch: &BranchOutcome) -> Result<Self> {
        let purification = purify(branch)?;
        Ok(Self {
            purification,
            success_descriptor: ChannelDescriptor {
                kind: ChannelKind::Bell,
                relative_phase_sign: PhaseSign::from_signum(branch.alpha * branch.beta),
            },
            failure_descriptor: ChannelDescriptor {
                kind: ChannelKind::Product,
                relative_phase_sign: PhaseSign::Plus,
            },
        })
    }

    /// Draw the auxiliary outcome, a uniform message, the Bell outcome, and
    /// decode. Draw order: auxiliary, message, Bell outcome.
    fn run<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(bool, PauliMessage, BellOutcome, PauliMessage)> {
        let aux_success = rng.gen::<f64>() < self.purification.success_probability;
        let (state, descriptor) = if aux_success {
            (&self.purification.success_state, &self.success_descriptor)
        } else {
            (&self.purification.failure_state, &self.failure_descriptor)
        };
        let state = state
            .as_ref()
            .expect("a sampled auxiliary outcome has nonzero probability and a post-state");
        let message = PauliMessage::ALL[rng.gen_range(0..4)];
        let encoded = encode(message, state, 2)?;
        let measurement = bell_measure(&encoded, rng)?;
        let decoded = decode(measurement.outcome, descriptor);
        Ok((aux_success, message, measurement.outcome, decoded))
    }
}

/// Run one end-to-end protocol round under the configured branch policy
/// (`EnumerateAll` falls back to Born-rule sampling; enumeration has no
/// single-trial meaning).
pub fn run_trial<R: Rng + ?Sized>(config: &ProtocolConfig, rng: &mut R) -> Result<TrialRecord> {
    let branch = sample_branch(config, rng)?;
    let setup = ChannelSetup::new(&branch)?;
    let (aux_success, message_sent, outcome, message_decoded) = setup.run(rng)?;
    Ok(TrialRecord {
        branch_signs: branch.signs,
        aux_success,
        message_sent,
        outcome,
        message_decoded,
    })
}

fn sample_branch<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<BranchOutcome> {
    let policy = match config.branch_policy {
        BranchPolicy::AllPlus => BranchPolicy::AllPlus,
        BranchPolicy::Sample | BranchPolicy::EnumerateAll => BranchPolicy::Sample,
    };
    let mut effective = config.clone();
    effective.branch_policy = policy;
    let mut branches = cascade(&effective, rng)?;
    Ok(branches.pop().expect("all-plus and sample policies yield one branch"))
}

/// Compact sufficient statistics of one trial.
#[derive(Debug, Clone, Copy)]
struct CompactRecord {
    aux_success: bool,
    message: u8,
    outcome: u8,
}

#[derive(Debug, Clone, Default)]
struct Tallies {
    total: u64,
    successes: u64,
    success_counts: [[u64; 4]; 4],
    failure_counts: [[u64; 4]; 4],
}

impl Tallies {
    fn add(&mut self, record: CompactRecord) {
        self.total += 1;
        let cell = (record.message as usize, record.outcome as usize);
        if record.aux_success {
            self.successes += 1;
            self.success_counts[cell.0][cell.1] += 1;
        } else {
            self.failure_counts[cell.0][cell.1] += 1;
        }
    }

    /// p(success) * MI(success counts) + p(failure) * MI(failure), where the
    /// failure term is the exact table unless `fully_empirical`.
    fn estimate(&self, analytic_failure_mi: Option<f64>, fully_empirical: bool) -> Result<f64> {
        let p = self.successes as f64 / self.total as f64;
        let mi_success = if self.successes > 0 {
            mutual_information(
                &ConditionalDistribution::from_counts(&self.success_counts),
                &UNIFORM_PRIOR,
            )?
        } else {
            0.0
        };
        let mi_failure = if fully_empirical {
            if self.successes < self.total {
                mutual_information(
                    &ConditionalDistribution::from_counts(&self.failure_counts),
                    &UNIFORM_PRIOR,
                )?
            } else {
                0.0
            }
        } else {
            analytic_failure_mi.unwrap_or(0.0)
        };
        Ok(p * mi_success + (1.0 - p) * mi_failure)
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Exact mutual information of the concentration-failure channel, if failure
/// can occur.
fn analytic_failure_mi(purification: &PurificationResult) -> Result<Option<f64>> {
    let Some(failure_state) = &purification.failure_state else {
        return Ok(None);
    };
    let mut matrix = [[0.0; 4]; 4];
    for (row, &message) in matrix.iter_mut().zip(PauliMessage::ALL.iter()) {
        *row = bell_probabilities(&encode(message, failure_state, 2)?)?;
    }
    let dist = ConditionalDistribution::new(matrix)?;
    Ok(Some(mutual_information(&dist, &UNIFORM_PRIOR)?))
}

/// Monte Carlo estimate of the information transmitted over the all-plus
/// channel, cross-checking the closed-form capacity.
///
/// Trials are conditioned on the all-plus history. By default the collapsed
/// branch is prepared directly from the closed-form coefficients; under
/// `BranchPolicy::Sample` each trial instead runs the full state-vector
/// cascade and rejects non-all-plus histories, which validates the pipeline
/// end to end at smaller trial counts. `BranchPolicy::EnumerateAll`
/// additionally attaches the exact per-branch ensemble to the report.
pub fn estimate_information(config: &ProtocolConfig) -> Result<CapacityReport> {
    estimate_information_with(config, EstimateOptions::default())
}

pub fn estimate_information_with(
    config: &ProtocolConfig,
    options: EstimateOptions,
) -> Result<CapacityReport> {
    if config.trials == 0 {
        return Err(Error::NoTrials);
    }
    let all_plus = vec![MeasurementSign::Plus; config.n_intermediate];
    let reference = closed_form_branch(&config.angles, &all_plus)?;
    if reference.probability <= 0.0 {
        return Err(Error::ZeroProbabilityBranch);
    }
    let setup = ChannelSetup::new(&reference)?;
    let failure_mi = analytic_failure_mi(&setup.purification)?;
    let rejection = config.branch_policy == BranchPolicy::Sample;

    let records: Vec<CompactRecord> = (0..config.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(config.seed, k);
            if rejection {
                rejection_trial(config, &mut rng)
            } else {
                setup.run(&mut rng).map(compact)
            }
        })
        .collect::<Result<_>>()?;

    let mut tallies = Tallies::default();
    for &record in &records {
        tallies.add(record);
    }
    let estimate = tallies.estimate(failure_mi, options.fully_empirical)?;

    let resampled: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map(|r| {
            let mut rng = trial_rng(config.seed, BOOTSTRAP_STREAM_BASE + r as u64);
            let mut boot = Tallies::default();
            for _ in 0..records.len() {
                boot.add(records[rng.gen_range(0..records.len())]);
            }
            boot.estimate(failure_mi, options.fully_empirical)
        })
        .collect::<Result<_>>()?;
    let mean = resampled.iter().sum::<f64>() / resampled.len() as f64;
    let variance = resampled.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
        / (resampled.len() - 1) as f64;

    let per_branch = if config.branch_policy == BranchPolicy::EnumerateAll {
        Some(enumerate_branch_summaries(&config.angles)?)
    } else {
        None
    };

    Ok(CapacityReport {
        closed_form: capacity_closed_form(&config.angles),
        branch_average: branch_average_capacity(&config.angles).ok(),
        monte_carlo_estimate: Some(estimate),
        standard_error: Some(variance.sqrt()),
        success_probability: Some(tallies.successes as f64 / tallies.total as f64),
        trials: config.trials,
        per_branch,
    })
}

fn compact(trial: (bool, PauliMessage, BellOutcome, PauliMessage)) -> CompactRecord {
    CompactRecord {
        aux_success: trial.0,
        message: trial.1.index() as u8,
        outcome: trial.2.index() as u8,
    }
}

/// Sample full cascades until one reads all-plus, then finish the round on
/// the sampled residual state.
fn rejection_trial<R: Rng + ?Sized>(config: &ProtocolConfig, rng: &mut R) -> Result<CompactRecord> {
    let mut sampling = config.clone();
    sampling.branch_policy = BranchPolicy::Sample;
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let branch = sample_branch(&sampling, rng)?;
        if branch.signs.iter().all(|&s| s == MeasurementSign::Plus) {
            let setup = ChannelSetup::new(&branch)?;
            return setup.run(rng).map(compact);
        }
    }
    Err(Error::NoAcceptedTrials {
        attempts: MAX_REJECTION_ATTEMPTS,
    })
}

/// Probability-weighted average of 1 + 2 min(alpha^2, beta^2) over all 2^N
/// histories, by exact enumeration (N <= [`MAX_ENUMERATION`]).
pub fn branch_average_capacity(angles: &[f64]) -> Result<f64> {
    if angles.len() > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n: angles.len(),
            max: MAX_ENUMERATION,
        });
    }
    // Unnormalized (alpha, beta) per history; the squared norm is the joint
    // probability, so the weighted capacity sum needs no per-leaf division.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut leaves: Vec<(f64, f64)> = vec![(h, h)];
    for &theta in angles {
        let (sin, cos) = theta.sin_cos();
        let mut next = Vec::with_capacity(leaves.len() * 2);
        for &(a, b) in &leaves {
            next.push((a * cos, b * sin));
            next.push((a * sin, -b * cos));
        }
        leaves = next;
    }
    let mut total_probability = 0.0;
    let mut total_min = 0.0;
    for &(a, b) in &leaves {
        let (a2, b2) = (a * a, b * b);
        total_probability += a2 + b2;
        total_min += a2.min(b2);
    }
    Ok((total_probability + 2.0 * total_min) / total_probability)
}

/// Exact (probability, capacity) of every reachable history, keyed by its
/// sign string.
pub fn enumerate_branch_summaries(angles: &[f64]) -> Result<BTreeMap<String, BranchSummary>> {
    if angles.len() > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n: angles.len(),
            max: MAX_ENUMERATION,
        });
    }
    let mut map = BTreeMap::new();
    let mut signs = vec![MeasurementSign::Plus; angles.len()];
    for pattern in 0u64..(1 << angles.len()) {
        for (i, sign) in signs.iter_mut().enumerate() {
            *sign = if pattern >> (angles.len() - 1 - i) & 1 == 0 {
                MeasurementSign::Plus
            } else {
                MeasurementSign::Minus
            };
        }
        let branch = closed_form_branch(angles, &signs)?;
        if branch.probability > 0.0 {
            map.insert(
                branch.sign_string(),
                BranchSummary {
                    probability: branch.probability,
                    capacity_bits: branch.capacity_bits(),
                },
            );
        }
    }
    Ok(map)
}

/// Closed-form-only report (no Monte Carlo), used when `trials == 0`.
pub fn closed_form_report(angles: &[f64], include_branches: bool) -> Result<CapacityReport> {
    let all_plus = vec![MeasurementSign::Plus; angles.len()];
    let branch = closed_form_branch(angles, &all_plus)?;
    let success = 2.0 * (branch.alpha * branch.alpha).min(branch.beta * branch.beta);
    let per_branch = if include_branches {
        Some(enumerate_branch_summaries(angles)?)
    } else {
        None
    };
    Ok(CapacityReport {
        closed_form: capacity_closed_form(angles),
        branch_average: branch_average_capacity(angles).ok(),
        monte_carlo_estimate: None,
        standard_error: None,
        success_probability: Some(success),
        trials: 0,
        per_branch,
    })
}

/// Which knob a sweep turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    /// Vary N, broadcasting the base configuration's (uniform) angle.
    IntermediateCount,
    /// Vary a common angle applied to all N parties of the base configuration.
    CommonAngle,
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub angles: Vec<f64>,
    pub report: CapacityReport,
}

/// Evaluate the capacity (and, when `base.trials > 0`, the Monte Carlo
/// estimate) across a grid. The closed-form column is always present.
pub fn sweep(
    base: &ProtocolConfig,
    vary: SweepVariable,
    grid: &[f64],
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &value in grid {
        let (n, angles) = match vary {
            SweepVariable::IntermediateCount => {
                let common = base.angles[0];
                if base.angles.iter().any(|&t| t != common) {
                    return Err(Error::InvalidGrid(
                        "varying N requires a uniform base angle vector".into(),
                    ));
                }
                if !value.is_finite() || value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::InvalidGrid(format!(
                        "N grid values must be positive integers, got {value}"
                    )));
                }
                let n = value as usize;
                (n, vec![common; n])
            }
            SweepVariable::CommonAngle => {
                if !value.is_finite() {
                    return Err(Error::InvalidGrid(format!("angle {value} is not finite")));
                }
                (base.n_intermediate, vec![value; base.n_intermediate])
            }
        };
        let report = if base.trials == 0 {
            closed_form_report(&angles, base.branch_policy == BranchPolicy::EnumerateAll)?
        } else {
            let config = ProtocolConfig::new(
                n,
                angles.clone(),
                base.branch_policy,
                base.trials,
                base.seed,
            )?;
            estimate_information(&config)?
        };
        points.push(SweepPoint { n, angles, report });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    const TOL: f64 = 1e-12;

    fn config(angles: Vec<f64>, policy: BranchPolicy, trials: u64, seed: u64) -> ProtocolConfig {
        ProtocolConfig::new(angles.len(), angles, policy, trials, seed).unwrap()
    }

    fn two_qubit(amps: [f64; 4]) -> PureState {
        PureState::from_amplitudes(
            2,
            amps.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn concurrence_reference_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((concurrence(&two_qubit([h, 0.0, 0.0, h])).unwrap() - 1.0).abs() < TOL);
        assert!(concurrence(&two_qubit([0.0, 0.0, 1.0, 0.0])).unwrap().abs() < TOL);
        let s = two_qubit([2.0 / 5f64.sqrt(), 0.0, 0.0, 1.0 / 5f64.sqrt()]);
        assert!((concurrence(&s).unwrap() - 0.8).abs() < TOL);
        assert!(concurrence(&PureState::basis_state(3, "000").unwrap()).is_err());
    }

    #[test]
    fn quarter_pi_trials_always_decode() {
        let cfg = config(vec![FRAC_PI_4; 3], BranchPolicy::AllPlus, 0, 0);
        for k in 0..500 {
            let mut rng = trial_rng(1, k);
            let t = run_trial(&cfg, &mut rng).unwrap();
            assert!(t.aux_success);
            assert_eq!(t.message_decoded, t.message_sent);
        }
    }

    #[test]
    fn zero_angle_trials_carry_one_bit() {
        let cfg = config(vec![0.0], BranchPolicy::AllPlus, 0, 0);
        let pair = |m: PauliMessage| matches!(m, PauliMessage::I | PauliMessage::Z);
        for k in 0..200 {
            let mut rng = trial_rng(2, k);
            let t = run_trial(&cfg, &mut rng).unwrap();
            assert!(!t.aux_success, "zero angles leave a product channel");
            assert_eq!(pair(t.message_decoded), pair(t.message_sent));
        }
    }

    #[test]
    fn conditioned_success_decodes_perfectly() {
        let cfg = config(vec![0.5f64.atan()], BranchPolicy::AllPlus, 0, 0);
        let mut successes = 0;
        for k in 0..400 {
            let mut rng = trial_rng(3, k);
            let t = run_trial(&cfg, &mut rng).unwrap();
            if t.aux_success {
                successes += 1;
                assert_eq!(t.message_decoded, t.message_sent);
            }
        }
        // Success probability is 2/5; the count should be nowhere near 0 or 400.
        assert!((80..240).contains(&successes));
    }

    #[test]
    fn sampled_trials_record_their_history() {
        let cfg = config(vec![0.7, 1.2], BranchPolicy::Sample, 0, 0);
        let mut rng = trial_rng(4, 0);
        let t = run_trial(&cfg, &mut rng).unwrap();
        assert_eq!(t.branch_signs.len(), 2);
    }

    #[test]
    fn estimate_quarter_pi_is_exactly_two_bits() {
        let cfg = config(vec![FRAC_PI_4; 2], BranchPolicy::AllPlus, 5_000, 7);
        let report = estimate_information(&cfg).unwrap();
        assert_eq!(report.monte_carlo_estimate, Some(2.0));
        assert_eq!(report.standard_error, Some(0.0));
        assert_eq!(report.success_probability, Some(1.0));
        assert!((report.closed_form - 2.0).abs() < TOL);
    }

    #[test]
    fn estimate_tracks_closed_form() {
        let cfg = config(vec![FRAC_PI_6], BranchPolicy::AllPlus, 20_000, 11);
        let report = estimate_information(&cfg).unwrap();
        assert!((report.closed_form - 1.5).abs() < TOL);
        assert!((report.monte_carlo_estimate.unwrap() - 1.5).abs() < 0.02);
        assert!(report.standard_error.unwrap() < 0.01);
    }

    #[test]
    fn estimate_is_deterministic() {
        let cfg = config(vec![0.4, 0.8], BranchPolicy::AllPlus, 2_000, 13);
        let a = estimate_information(&cfg).unwrap();
        let b = estimate_information(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn rejection_mode_agrees_with_direct_conditioning() {
        let direct = estimate_information(&config(
            vec![FRAC_PI_6],
            BranchPolicy::AllPlus,
            20_000,
            17,
        ))
        .unwrap();
        let rejected = estimate_information(&config(
            vec![FRAC_PI_6],
            BranchPolicy::Sample,
            4_000,
            17,
        ))
        .unwrap();
        let gap = (direct.monte_carlo_estimate.unwrap()
            - rejected.monte_carlo_estimate.unwrap())
        .abs();
        assert!(gap < 0.05, "direct and rejection estimates differ by {gap}");
    }

    #[test]
    fn fully_empirical_mode_matches_default_within_noise() {
        let cfg = config(vec![FRAC_PI_6], BranchPolicy::AllPlus, 20_000, 19);
        let default = estimate_information(&cfg).unwrap();
        let empirical =
            estimate_information_with(&cfg, EstimateOptions { fully_empirical: true }).unwrap();
        let gap =
            (default.monte_carlo_estimate.unwrap() - empirical.monte_carlo_estimate.unwrap()).abs();
        assert!(gap < 0.05);
    }

    #[test]
    fn estimate_rejects_empty_budget_and_dead_branches() {
        let cfg = config(vec![FRAC_PI_4], BranchPolicy::AllPlus, 0, 0);
        assert!(matches!(estimate_information(&cfg), Err(Error::NoTrials)));
    }

    #[test]
    fn enumerate_policy_attaches_branch_map() {
        let cfg = config(vec![FRAC_PI_6, FRAC_PI_4], BranchPolicy::EnumerateAll, 500, 23);
        let report = estimate_information(&cfg).unwrap();
        let map = report.per_branch.unwrap();
        assert_eq!(map.len(), 4);
        let total: f64 = map.values().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        // The all-plus entry carries the closed-form capacity.
        let plus = &map["++"];
        assert!((plus.capacity_bits - report.closed_form).abs() < TOL);
    }

    #[test]
    fn branch_average_reference_values() {
        assert!((branch_average_capacity(&[FRAC_PI_4; 4]).unwrap() - 2.0).abs() < TOL);
        assert!((branch_average_capacity(&[0.0]).unwrap() - 1.0).abs() < TOL);
        // N = 1 branches are mirror images: the average equals the closed form.
        assert!((branch_average_capacity(&[FRAC_PI_6]).unwrap() - 1.5).abs() < TOL);
        assert!(matches!(
            branch_average_capacity(&[0.1; 21]),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn branch_average_matches_explicit_enumeration() {
        let angles = [0.3, 0.9, 1.4];
        let map = enumerate_branch_summaries(&angles).unwrap();
        let explicit: f64 = map.values().map(|b| b.probability * b.capacity_bits).sum::<f64>()
            / map.values().map(|b| b.probability).sum::<f64>();
        assert!((branch_average_capacity(&angles).unwrap() - explicit).abs() < TOL);
    }

    #[test]
    fn purified_branches_have_unit_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4);
            let angles: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 1.4 + 0.05).collect();
            let cfg = config(angles, BranchPolicy::EnumerateAll, 0, 0);
            for branch in cascade(&cfg, &mut rng).unwrap() {
                let result = purify(&branch).unwrap();
                if let Some(success) = &result.success_state {
                    assert!((concurrence(success).unwrap() - 1.0).abs() < 1e-10);
                }
                if let Some(failure) = &result.failure_state {
                    assert!(concurrence(failure).unwrap() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn sweep_over_n_decreases_toward_one_bit() {
        let base = config(vec![FRAC_PI_6], BranchPolicy::AllPlus, 0, 0);
        let grid: Vec<f64> = (1..=10).map(|n| n as f64).collect();
        let points = sweep(&base, SweepVariable::IntermediateCount, &grid).unwrap();
        assert_eq!(points.len(), 10);
        for pair in points.windows(2) {
            assert!(pair[1].report.closed_form < pair[0].report.closed_form);
        }
        assert!(points[9].report.closed_form > 1.0);
    }

    #[test]
    fn sweep_over_angle_increases_to_two_bits() {
        let base = config(vec![0.1, 0.1], BranchPolicy::AllPlus, 0, 0);
        let grid = [
            std::f64::consts::PI / 8.0,
            std::f64::consts::PI / 6.0,
            std::f64::consts::PI / 4.0,
        ];
        let points = sweep(&base, SweepVariable::CommonAngle, &grid).unwrap();
        assert!(points[0].report.closed_form < points[1].report.closed_form);
        assert!(points[1].report.closed_form < points[2].report.closed_form);
        assert!((points[2].report.closed_form - 2.0).abs() < TOL);
    }

    #[test]
    fn sweep_over_n_at_quarter_pi_is_flat() {
        let base = config(vec![FRAC_PI_4], BranchPolicy::AllPlus, 0, 0);
        let grid: Vec<f64> = (1..=8).map(|n| n as f64).collect();
        for point in sweep(&base, SweepVariable::IntermediateCount, &grid).unwrap() {
            assert!((point.report.closed_form - 2.0).abs() < TOL);
        }
    }

    #[test]
    fn sweep_validates_grid() {
        let base = config(vec![FRAC_PI_6], BranchPolicy::AllPlus, 0, 0);
        assert!(matches!(
            sweep(&base, SweepVariable::IntermediateCount, &[]),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            sweep(&base, SweepVariable::IntermediateCount, &[1.5]),
            Err(Error::InvalidGrid(_))
        ));
        let mixed = config(vec![0.2, 0.3], BranchPolicy::AllPlus, 0, 0);
        assert!(matches!(
            sweep(&mixed, SweepVariable::IntermediateCount, &[2.0]),
            Err(Error::InvalidGrid(_))
        ));
    }

    use rand_chacha::ChaCha8Rng;
