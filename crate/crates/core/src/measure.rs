//! Seeded projective measurement and frequency estimation.
//!
//! Measurement outcomes are sampled with an explicitly seeded deterministic
//! generator, so every statistical experiment in this crate reproduces
//! bit-exactly from its seed. Estimating amplitudes from outcome frequencies
//! needs many identical copies of a state; [`estimation_scaling`] quantifies
//! how the estimation error shrinks as the copy count grows.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{QmError, Result};
use crate::qcore::{density_expectation, inner_product, DensityMatrix, PureState, EPS_NORM};
use crate::spin::{basis_pair, Direction};

/// Deterministic random stream: ChaCha8 keyed by the SplitMix64 expansion of
/// a 64-bit seed, with an independent 64-bit stream id for parallel work.
///
/// Identical `(seed, stream)` pairs produce bit-identical sample sequences on
/// every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    /// Stream 0 for the given seed.
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream `stream` for the given seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, seed, stream }
    }

    /// Seed this stream was built from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream id this stream was built from.
    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Next uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse-CDF draw over outcome probabilities, scanning outcomes left to
/// right and returning the first index whose cumulative sum exceeds the
/// uniform draw. Zero-probability outcomes are never returned.
pub(crate) fn sample_index(probs: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.next_uniform();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            last_positive = i;
        }
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    last_positive
}

/// Result of one projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    /// Which basis outcome occurred.
    pub index: usize,
    /// Observable value of the outcome: the spin component +1/2 or -1/2 for
    /// one spin. Two-spin bases carry no single pinned observable, so there
    /// the value is the outcome index as a real number.
    pub value: f64,
    /// Post-measurement state, equal to the observed basis state.
    pub collapsed: PureState,
}

/// Outcome counts from repeated measurement of identically prepared states.
///
/// Serializes as `{"counts": [...], "shots": M, "seed": s}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FrequencyWire", into = "FrequencyWire")]
pub struct FrequencyEstimate {
    counts: Vec<u64>,
    shots: u64,
    seed: u64,
}

impl FrequencyEstimate {
    /// Builds an estimate, checking counts against the shot total.
    pub fn new(counts: Vec<u64>, shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(QmError::InvalidArgument("shots must be at least 1".into()));
        }
        if counts.iter().sum::<u64>() != shots {
            return Err(QmError::InvalidArgument(
                "counts must sum to shots".into(),
            ));
        }
        Ok(Self { counts, shots, seed })
    }

    /// Count per outcome.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of measurements.
    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Seed of the stream that produced the counts.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Observed frequency `n_i / M` of one outcome.
    pub fn ratio(&self, index: usize) -> f64 {
        self.counts[index] as f64 / self.shots as f64
    }

    /// Observed frequencies of all outcomes.
    pub fn ratios(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.ratio(i)).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrequencyWire {
    counts: Vec<u64>,
    shots: u64,
    seed: u64,
}

impl TryFrom<FrequencyWire> for FrequencyEstimate {
    type Error = QmError;

    fn try_from(wire: FrequencyWire) -> Result<Self> {
        Self::new(wire.counts, wire.shots, wire.seed)
    }
}

impl From<FrequencyEstimate> for FrequencyWire {
    fn from(est: FrequencyEstimate) -> Self {
        Self {
            counts: est.counts,
            shots: est.shots,
            seed: est.seed,
        }
    }
}

/// The z-product basis `|0>, ..., |dim-1>`.
pub fn computational_basis(dim: usize) -> Result<Vec<PureState>> {
    (0..dim).map(|i| PureState::basis_state(dim, i)).collect()
}

fn check_basis(psi: &PureState, basis: &[PureState]) -> Result<()> {
    if basis.len() != psi.dim() {
        return Err(QmError::DimensionMismatch {
            expected: psi.dim(),
            got: basis.len(),
        });
    }
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let overlap = inner_product(bi, bj)?.norm();
            if (overlap - target).abs() > EPS_NORM {
                return Err(QmError::NonOrthonormalBasis);
            }
        }
    }
    Ok(())
}

fn outcome_probs(psi: &PureState, basis: &[PureState]) -> Vec<f64> {
    basis
        .iter()
        .map(|b| inner_product(b, psi).expect("dims checked").norm_sqr())
        .collect()
}

fn outcome_value(dim: usize, index: usize) -> f64 {
    if dim == 2 {
        if index == 0 {
            0.5
        } else {
            -0.5
        }
    } else {
        index as f64
    }
}

/// Measures `psi` once in the given orthonormal basis, drawing the outcome
/// with its squared-amplitude probability and collapsing onto it.
pub fn measure_once(
    psi: &PureState,
    basis: &[PureState],
    rng: &mut RngStream,
) -> Result<MeasurementOutcome> {
    check_basis(psi, basis)?;
    let probs = outcome_probs(psi, basis);
    let index = sample_index(&probs, rng);
    Ok(MeasurementOutcome {
        index,
        value: outcome_value(psi.dim(), index),
        collapsed: basis[index].clone(),
    })
}

/// Measures `shots` identically prepared copies of `psi` and tallies the
/// outcome counts. Deterministic per stream.
pub fn sample_frequencies(
    psi: &PureState,
    basis: &[PureState],
    shots: u64,
    rng: &mut RngStream,
) -> Result<FrequencyEstimate> {
    if shots == 0 {
        return Err(QmError::InvalidArgument("shots must be at least 1".into()));
    }
    check_basis(psi, basis)?;
    let probs = outcome_probs(psi, basis);
    let mut counts = vec![0u64; basis.len()];
    for _ in 0..shots {
        counts[sample_index(&probs, rng)] += 1;
    }
    FrequencyEstimate::new(counts, shots, rng.seed())
}

/// Empirical average `sum_i values_i * n_i / M` of an observable whose value
/// on outcome `i` is `values_i`.
pub fn estimate_average(freq: &FrequencyEstimate, values: &[f64]) -> Result<f64> {
    if values.len() != freq.counts.len() {
        return Err(QmError::DimensionMismatch {
            expected: freq.counts.len(),
            got: values.len(),
        });
    }
    Ok(values
        .iter()
        .zip(&freq.counts)
        .map(|(v, n)| v * *n as f64)
        .sum::<f64>()
        / freq.shots as f64)
}

/// Probability of the `+analysis` outcome for a pure state and for a mixture
/// that shares its z-basis probabilities.
///
/// The shared diagonal makes the two preparations indistinguishable by
/// z-basis counting; a phase-sensitive analysis direction off the z axis
/// separates them. Returns `(p_pure, p_mixed)`.
pub fn discriminate_phase(
    psi: &PureState,
    rho: &DensityMatrix,
    analysis: &Direction,
) -> Result<(f64, f64)> {
    if psi.dim() != 2 || rho.dim() != 2 {
        return Err(QmError::DimensionMismatch {
            expected: 2,
            got: psi.dim().max(rho.dim()),
        });
    }
    for i in 0..2 {
        if (psi.amps()[i].norm_sqr() - rho.entry(i, i).re).abs() > EPS_NORM {
            return Err(QmError::DiagonalMismatch);
        }
    }
    let (plus, _) = basis_pair(analysis);
    let p_pure = inner_product(&plus, psi)?.norm_sqr();
    let p_mixed = density_expectation(rho, &plus)?;
    Ok((p_pure, p_mixed))
}

/// Relative phase recovered from the `+x` and `+y` outcome probabilities of
/// a one-spin state, in `[0, 2pi)`.
///
/// For `psi = (c_0, c_1)` with nonzero components, `p_x = (1 + cos d)/2` and
/// `p_y = (1 + sin d)/2` where `d = arg(c_1) - arg(c_0)`, so the phase is
/// `atan2(2 p_y - 1, 2 p_x - 1)`.
pub fn recover_phase(p_plus_x: f64, p_plus_y: f64) -> f64 {
    let phase = (2.0 * p_plus_y - 1.0).atan2(2.0 * p_plus_x - 1.0);
    if phase < 0.0 {
        phase + std::f64::consts::TAU
    } else {
        phase
    }
}

/// One row of an estimator-scaling study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRow {
    /// Copies measured per trial.
    pub shots: u64,
    /// Root-mean-square error of the frequency estimator of `|C_0|^2`.
    pub rmse: f64,
}

/// Root-mean-square error of the `n_0 / M` estimator of `|C_0|^2`, per shot
/// count, over repeated trials.
///
/// A single copy pins the estimate to 0 or 1, so determining an unknown
/// state to accuracy `eps` demands on the order of `1/eps^2` copies; copying
/// a lone unknown state is not possible.
pub fn estimation_scaling(
    psi: &PureState,
    shot_counts: &[u64],
    trials: u32,
    rng: &mut RngStream,
) -> Result<Vec<ScalingRow>> {
    if trials < 30 {
        return Err(QmError::InvalidArgument(
            "trials must be at least 30".into(),
        ));
    }
    if shot_counts.is_empty() || shot_counts[0] == 0 {
        return Err(QmError::InvalidArgument(
            "shot counts must be positive".into(),
        ));
    }
    if shot_counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QmError::InvalidArgument(
            "shot counts must be ascending".into(),
        ));
    }
    let basis = computational_basis(psi.dim())?;
    check_basis(psi, &basis)?;
    let target = psi.amps()[0].norm_sqr();
    let probs = outcome_probs(psi, &basis);
    let mut rows = Vec::with_capacity(shot_counts.len());
    for &shots in shot_counts {
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let mut n0 = 0u64;
            for _ in 0..shots {
                if sample_index(&probs, rng) == 0 {
                    n0 += 1;
                }
            }
            let err = n0 as f64 / shots as f64 - target;
            sum_sq += err * err;
        }
        rows.push(ScalingRow {
            shots,
            rmse: (sum_sq / trials as f64).sqrt(),
        });
    }
    Ok(rows)
}

/// CSV rendering of a scaling study, with header `M,rmse,trials,seed`.
pub fn scaling_csv(rows: &[ScalingRow], trials: u32, seed: u64) -> String {
    let mut out = String::from("M,rmse,trials,seed\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.shots,
            crate::jsonfmt::fmt_f64_17(row.rmse),
            trials,
            seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{mix, normalize, ComplexAmp};
    use crate::spin::spin_state;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, PI, TAU};

    fn c(re: f64, im: f64) -> ComplexAmp {
        ComplexAmp::new(re, im)
    }

    fn symmetric() -> PureState {
        normalize(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    fn z_basis() -> Vec<PureState> {
        computational_basis(2).unwrap()
    }

    #[test]
    fn uniform_draws_stay_in_unit_interval() {
        let mut rng = RngStream::new(7);
        for _ in 0..10_000 {
            let u = rng.next_uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn equal_seeds_give_bit_identical_sequences() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_uniform().to_bits(), b.next_uniform().to_bits());
        }
    }

    #[test]
    fn distinct_streams_of_one_seed_diverge() {
        let mut a = RngStream::with_stream(42, 0);
        let mut b = RngStream::with_stream(42, 1);
        let same = (0..100).all(|_| a.next_uniform() == b.next_uniform());
        assert!(!same);
    }

    #[test]
    fn zero_probability_outcomes_are_never_sampled() {
        let probs = [0.5, 0.0, 0.5];
        let mut rng = RngStream::new(3);
        for _ in 0..10_000 {
            assert_ne!(sample_index(&probs, &mut rng), 1);
        }
        let certain = [1.0, 0.0];
        for _ in 0..1000 {
            assert_eq!(sample_index(&certain, &mut rng), 0);
        }
    }

    #[test]
    fn eigenstate_always_yields_its_own_index() {
        let e0 = PureState::basis_state(2, 0).unwrap();
        let mut rng = RngStream::new(0);
        for _ in 0..100 {
            let outcome = measure_once(&e0, &z_basis(), &mut rng).unwrap();
            assert_eq!(outcome.index, 0);
            assert_eq!(outcome.value, 0.5);
        }
    }

    #[test]
    fn repeated_measurement_of_collapsed_state_is_stable() {
        let psi = spin_state(1.1, 0.4).unwrap();
        let mut rng = RngStream::new(9);
        let first = measure_once(&psi, &z_basis(), &mut rng).unwrap();
        assert!(crate::qcore::phase_equal(
            &first.collapsed,
            &z_basis()[first.index],
            1e-12
        ));
        for _ in 0..100 {
            let again = measure_once(&first.collapsed, &z_basis(), &mut rng).unwrap();
            assert_eq!(again.index, first.index);
        }
    }

    #[test]
    fn non_orthonormal_bases_are_rejected() {
        let psi = symmetric();
        let duplicated = vec![
            PureState::basis_state(2, 0).unwrap(),
            PureState::basis_state(2, 0).unwrap(),
        ];
        assert!(matches!(
            measure_once(&psi, &duplicated, &mut RngStream::new(0)),
            Err(QmError::NonOrthonormalBasis)
        ));

        let skewed = vec![symmetric(), PureState::basis_state(2, 1).unwrap()];
        assert!(matches!(
            sample_frequencies(&psi, &skewed, 10, &mut RngStream::new(0)),
            Err(QmError::NonOrthonormalBasis)
        ));

        let short = vec![PureState::basis_state(2, 0).unwrap()];
        assert!(matches!(
            measure_once(&psi, &short, &mut RngStream::new(0)),
            Err(QmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn certain_outcome_gives_all_shots_to_one_count() {
        let e0 = PureState::basis_state(2, 0).unwrap();
        let freq =
            sample_frequencies(&e0, &z_basis(), 5000, &mut RngStream::new(11)).unwrap();
        assert_eq!(freq.counts(), &[5000, 0]);
        assert_eq!(freq.ratio(0), 1.0);
    }

    #[test]
    fn symmetric_state_frequencies_match_binomial_expectation() {
        let shots = 100_000u64;
        let freq =
            sample_frequencies(&symmetric(), &z_basis(), shots, &mut RngStream::new(0)).unwrap();
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((freq.ratio(0) - 0.5).abs() < 4.0 * sigma);
    }

    #[test]
    fn tilted_state_frequencies_match_born_probability() {
        let psi = spin_state(FRAC_PI_3, 0.0).unwrap();
        let shots = 100_000u64;
        let freq = sample_frequencies(&psi, &z_basis(), shots, &mut RngStream::new(1)).unwrap();
        let p = 0.75;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!((freq.ratio(0) - p).abs() < 4.0 * sigma);
    }

    #[test]
    fn same_seed_reproduces_identical_counts() {
        let psi = spin_state(2.0, 1.0).unwrap();
        let a = sample_frequencies(&psi, &z_basis(), 10_000, &mut RngStream::new(5)).unwrap();
        let b = sample_frequencies(&psi, &z_basis(), 10_000, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimate_average_examples() {
        let values = [0.5, -0.5];
        let all_up = FrequencyEstimate::new(vec![80, 0], 80, 0).unwrap();
        assert_abs_diff_eq!(estimate_average(&all_up, &values).unwrap(), 0.5);

        let three_quarters = FrequencyEstimate::new(vec![75, 25], 100, 0).unwrap();
        assert_abs_diff_eq!(estimate_average(&three_quarters, &values).unwrap(), 0.25);

        let balanced = FrequencyEstimate::new(vec![50, 50], 100, 0).unwrap();
        assert_abs_diff_eq!(estimate_average(&balanced, &values).unwrap(), 0.0);

        assert!(estimate_average(&balanced, &[0.5]).is_err());
    }

    #[test]
    fn frequency_estimate_validates_and_round_trips() {
        assert!(FrequencyEstimate::new(vec![3, 2], 6, 0).is_err());
        assert!(FrequencyEstimate::new(vec![], 0, 0).is_err());

        let est = FrequencyEstimate::new(vec![75, 25], 100, 42).unwrap();
        let json = crate::jsonfmt::to_json_17(&est);
        assert_eq!(json, "{\"counts\":[75,25],\"shots\":100,\"seed\":42}");
        let back: FrequencyEstimate = serde_json::from_str(&json).unwrap();
        assert_eq!(est, back);
        assert!(
            serde_json::from_str::<FrequencyEstimate>("{\"counts\":[1,2],\"shots\":4,\"seed\":0}")
                .is_err()
        );
    }

    #[test]
    fn phase_blind_and_phase_sensitive_discrimination() {
        let psi = symmetric();
        let e0 = PureState::basis_state(2, 0).unwrap();
        let e1 = PureState::basis_state(2, 1).unwrap();
        let rho = mix(&[e0, e1], &[0.5, 0.5]).unwrap();

        let (p_pure, p_mixed) = discriminate_phase(&psi, &rho, &Direction::plus_z()).unwrap();
        assert_abs_diff_eq!(p_pure, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p_mixed, 0.5, epsilon = 1e-12);

        let (p_pure, p_mixed) = discriminate_phase(&psi, &rho, &Direction::plus_x()).unwrap();
        assert_abs_diff_eq!(p_pure, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p_mixed, 0.5, epsilon = 1e-12);

        let psi_y = normalize(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let (p_pure, p_mixed) = discriminate_phase(&psi_y, &rho, &Direction::plus_y()).unwrap();
        assert_abs_diff_eq!(p_pure, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p_mixed, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn discrimination_requires_matching_diagonals() {
        let psi = spin_state(FRAC_PI_3, 0.0).unwrap();
        let e0 = PureState::basis_state(2, 0).unwrap();
        let e1 = PureState::basis_state(2, 1).unwrap();
        let rho = mix(&[e0, e1], &[0.5, 0.5]).unwrap();
        assert!(matches!(
            discriminate_phase(&psi, &rho, &Direction::plus_x()),
            Err(QmError::DiagonalMismatch)
        ));
    }

    #[test]
    fn equatorial_analysis_separates_every_phase_by_at_least_half() {
        let e0 = PureState::basis_state(2, 0).unwrap();
        let e1 = PureState::basis_state(2, 1).unwrap();
        let rho = mix(&[e0, e1], &[0.5, 0.5]).unwrap();
        for k in 0..36 {
            let phase = TAU * k as f64 / 36.0;
            let psi = spin_state(FRAC_PI_2, phase).unwrap();
            let analysis = Direction::from_angles(FRAC_PI_2, phase).unwrap();
            let (p_pure, p_mixed) = discriminate_phase(&psi, &rho, &analysis).unwrap();
            assert!((p_pure - p_mixed).abs() >= 0.49);
        }
    }

    #[test]
    fn phase_recovery_from_x_and_y_probabilities() {
        for k in 0..36 {
            let phase = TAU * k as f64 / 36.0;
            let psi = spin_state(FRAC_PI_2, phase).unwrap();
            let (p_x, _) = crate::spin::component_probs(&psi, &Direction::plus_x()).unwrap();
            let (p_y, _) = crate::spin::component_probs(&psi, &Direction::plus_y()).unwrap();
            let recovered = recover_phase(p_x, p_y);
            let wrapped = (recovered - phase + PI).rem_euclid(TAU) - PI;
            assert_abs_diff_eq!(wrapped, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn scaling_is_zero_for_deterministic_states() {
        let e0 = PureState::basis_state(2, 0).unwrap();
        let rows =
            estimation_scaling(&e0, &[10, 100], 30, &mut RngStream::new(0)).unwrap();
        assert_eq!(rows[0].rmse, 0.0);
        assert_eq!(rows[1].rmse, 0.0);
    }

    #[test]
    fn single_shot_error_is_one_half_for_the_symmetric_state() {
        let rows =
            estimation_scaling(&symmetric(), &[1], 100, &mut RngStream::new(2)).unwrap();
        assert_abs_diff_eq!(rows[0].rmse, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rmse_roughly_halves_when_shots_quadruple() {
        let rows = estimation_scaling(
            &symmetric(),
            &[100, 400, 1600],
            200,
            &mut RngStream::new(0),
        )
        .unwrap();
        for pair in rows.windows(2) {
            let ratio = pair[0].rmse / pair[1].rmse;
            assert!((ratio - 2.0).abs() <= 0.6, "ratio {ratio}");
        }
    }

    #[test]
    fn scaling_rejects_bad_arguments() {
        let psi = symmetric();
        assert!(estimation_scaling(&psi, &[10, 20], 10, &mut RngStream::new(0)).is_err());
        assert!(estimation_scaling(&psi, &[20, 10], 30, &mut RngStream::new(0)).is_err());
        assert!(estimation_scaling(&psi, &[10, 10], 30, &mut RngStream::new(0)).is_err());
        assert!(estimation_scaling(&psi, &[], 30, &mut RngStream::new(0)).is_err());
        assert!(estimation_scaling(&psi, &[0, 10], 30, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn scaling_csv_layout() {
        let rows = vec![
            ScalingRow { shots: 100, rmse: 0.05 },
            ScalingRow { shots: 400, rmse: 0.025 },
        ];
        let csv = scaling_csv(&rows, 200, 7);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("M,rmse,trials,seed"));
        assert_eq!(lines.next(), Some("100,5.0000000000000003e-2,200,7"));
        assert_eq!(lines.next(), Some("400,2.5000000000000001e-2,200,7"));
    }
}
