//! Von Neumann measurement unitaries, projective observables on
//! laboratory+electron pairs, Born-rule distributions and sampling with
//! collapse.
//!
//! A pair space is six-dimensional, row-major over `(lab, electron)` with
//! the laboratory digit slowest: `(Ready, +z)` is index 0 and `(Ready, −z)`
//! index 1.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{
    apply_local, check_unitary, random_unitary, unitarity_defect, Amplitude, Factor, FactorLayout, MixedState,
    Operator, StateVector, UNITARY_TOL,
};
use crate::systems::{lab_vector, spin_vector, LabLabel, MeasuredSubsystem, Sign, SpinAxis};

/// Probability below which a sampled outcome signals numerical corruption.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;

const PAIR_DIM: usize = 6;

fn pair_index(lab: LabLabel, spin: Sign) -> usize {
    lab.index() * 2 + usize::from(spin == Sign::Minus)
}

/// The unitary a friend's measurement applies to one laboratory+electron pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    unitary: Operator,
}

impl MeasurementModel {
    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    /// `|±1Z⟩ := U(|Ready⟩ ⊗ |±z⟩)`.
    pub fn recorded_vector(&self, sign: Sign) -> Vec<Amplitude> {
        self.unitary.column(pair_index(LabLabel::Ready, sign))
    }

    /// `|±1X⟩ := (|+1Z⟩ ± |−1Z⟩)/√2`.
    pub fn superposed_vector(&self, sign: Sign) -> Vec<Amplitude> {
        let s = sign.value() as f64;
        self.recorded_vector(Sign::Plus)
            .iter()
            .zip(self.recorded_vector(Sign::Minus))
            .map(|(p, m)| (p + m * s) * FRAC_1_SQRT_2)
            .collect()
    }

    /// Basis `{|+1Z⟩, |−1Z⟩}` on a pair.
    pub fn record_basis(&self, lab: Factor, electron: Factor) -> MeasuredSubsystem {
        MeasuredSubsystem::Pair {
            lab,
            electron,
            plus: self.recorded_vector(Sign::Plus),
            minus: self.recorded_vector(Sign::Minus),
        }
    }

    /// Basis `{|+1X⟩, |−1X⟩}` on a pair.
    pub fn superposed_basis(&self, lab: Factor, electron: Factor) -> MeasuredSubsystem {
        MeasuredSubsystem::Pair {
            lab,
            electron,
            plus: self.superposed_vector(Sign::Plus),
            minus: self.superposed_vector(Sign::Minus),
        }
    }

    /// Runs the friend's measurement interaction on `(lab, electron)`.
    pub fn apply(&self, lab: Factor, electron: Factor, state: &StateVector) -> Result<StateVector> {
        apply_local(&self.unitary, &[lab, electron], state)
    }
}

/// Ideal measurement: `(Ready, ±z) ↦ (Recorded±, ±z)`, completed to a
/// permutation of the six pair basis states.
pub fn ideal_von_neumann() -> MeasurementModel {
    let mut perm: [usize; PAIR_DIM] = std::array::from_fn(|j| j);
    for sign in Sign::BOTH {
        let ready = pair_index(LabLabel::Ready, sign);
        let recorded = pair_index(LabLabel::recorded(sign), sign);
        perm.swap(ready, recorded);
    }
    let unitary =
        Operator::from_fn(
            PAIR_DIM,
            |i, j| {
                if perm[j] == i {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
        );
    MeasurementModel { unitary }
}

/// Arbitrary unitary measurement interaction on a pair.
pub fn custom_model(unitary: Operator) -> Result<MeasurementModel> {
    if unitary.dim() != PAIR_DIM {
        return Err(Error::DimensionMismatch { expected: PAIR_DIM, found: unitary.dim() });
    }
    if !check_unitary(&unitary, UNITARY_TOL) {
        return Err(Error::NotUnitary(unitarity_defect(&unitary)));
    }
    Ok(MeasurementModel { unitary })
}

/// Haar-random measurement interaction.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R) -> MeasurementModel {
    MeasurementModel { unitary: random_unitary(PAIR_DIM, rng) }
}

/// Basis `{|Ready⟩|+z⟩, |Ready⟩|−z⟩}`: a pair whose friend has not yet measured.
pub fn ready_basis(lab: Factor, electron: Factor) -> MeasuredSubsystem {
    let ket = |sign| {
        let mut v = vec![Complex64::new(0.0, 0.0); PAIR_DIM];
        v[pair_index(LabLabel::Ready, sign)] = Complex64::new(1.0, 0.0);
        v
    };
    MeasuredSubsystem::Pair { lab, electron, plus: ket(Sign::Plus), minus: ket(Sign::Minus) }
}

/// Projective observable: distinct eigenvalues with orthogonal projectors
/// summing to the identity on `targets`.
#[derive(Clone, Debug)]
pub struct Observable {
    targets: Vec<Factor>,
    eigenpairs: Vec<(f64, Operator)>,
}

impl Observable {
    pub fn new(targets: Vec<Factor>, eigenpairs: Vec<(f64, Operator)>) -> Result<Self> {
        let layout = FactorLayout::new(targets.clone())?;
        let dim = layout.total_dim();
        for (i, (lambda, p)) in eigenpairs.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if eigenpairs[..i].iter().any(|(l, _)| l == lambda) {
                return Err(Error::InvalidObservable(format!("repeated eigenvalue {lambda}")));
            }
        }
        let obs = Self { targets, eigenpairs };
        let defect = obs.projector_defect();
        if defect > UNITARY_TOL {
            return Err(Error::InvalidObservable(format!("projector defect {defect:e}")));
        }
        Ok(obs)
    }

    pub fn targets(&self) -> &[Factor] {
        &self.targets
    }

    pub fn eigenpairs(&self) -> &[(f64, Operator)] {
        &self.eigenpairs
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenpairs.iter().map(|(l, _)| *l).collect()
    }

    pub fn projector(&self, eigenvalue: f64) -> Option<&Operator> {
        self.eigenpairs.iter().find(|(l, _)| *l == eigenvalue).map(|(_, p)| p)
    }

    /// Largest violation of hermiticity, idempotence, mutual orthogonality
    /// or completeness among the projectors.
    pub fn projector_defect(&self) -> f64 {
        let dim = self.eigenpairs.first().map_or(0, |(_, p)| p.dim());
        let mut worst: f64 = 0.0;
        let mut sum = Operator::zeros(dim);
        for (i, (_, p)) in self.eigenpairs.iter().enumerate() {
            worst = worst.max(p.max_abs_diff(&p.adjoint()));
            worst = worst.max(p.matmul(p).map_or(f64::INFINITY, |pp| pp.max_abs_diff(p)));
            for (_, q) in &self.eigenpairs[i + 1..] {
                worst = worst.max(p.matmul(q).map_or(f64::INFINITY, |pq| pq.max_abs_diff(&Operator::zeros(dim))));
            }
            sum = sum.add(p).unwrap_or_else(|_| Operator::zeros(dim));
        }
        worst.max(sum.max_abs_diff(&Operator::identity(dim)))
    }

    /// `P_λ|ψ⟩`, unnormalized.
    pub fn project(&self, eigenvalue: f64, state: &StateVector) -> Result<StateVector> {
        let p = self
            .projector(eigenvalue)
            .ok_or_else(|| Error::InvalidObservable(format!("no eigenvalue {eigenvalue}")))?;
        apply_local(p, &self.targets, state)
    }
}

/// Spin along `axis` on one electron.
pub fn spin_observable(electron: Factor, axis: SpinAxis) -> Result<Observable> {
    let pairs = Sign::BOTH.iter().map(|&s| (s.value() as f64, Operator::projector(&spin_vector(axis, s)))).collect();
    Observable::new(vec![electron], pairs)
}

/// The outsider's observable on a pair (`Ĵ`, `K̂`, `M̂`): +1 on `|+1X⟩`,
/// −1 on `|−1X⟩`, 0 on the four-dimensional complement.
pub fn outsider_observable(model: &MeasurementModel, lab: Factor, electron: Factor) -> Result<Observable> {
    let plus = Operator::projector(&model.superposed_vector(Sign::Plus));
    let minus = Operator::projector(&model.superposed_vector(Sign::Minus));
    let rest = Operator::identity(PAIR_DIM)
        .add(&plus.scale(Complex64::new(-1.0, 0.0)))?
        .add(&minus.scale(Complex64::new(-1.0, 0.0)))?;
    Observable::new(vec![lab, electron], vec![(1.0, plus), (-1.0, minus), (0.0, rest)])
}

/// Opening the laboratory door: +1 if the register reads up, −1 if down,
/// 0 if still ready.
pub fn door_observable(lab: Factor) -> Result<Observable> {
    let p = |label| Operator::projector(&lab_vector(label));
    Observable::new(
        vec![lab],
        vec![(1.0, p(LabLabel::RecordedUp)), (-1.0, p(LabLabel::RecordedDown)), (0.0, p(LabLabel::Ready))],
    )
}

/// Probabilities per eigenvalue, in the observable's eigenpair order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<OutcomeProbability>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbability {
    pub eigenvalue: f64,
    pub probability: f64,
}

impl OutcomeDistribution {
    pub fn probability(&self, eigenvalue: f64) -> f64 {
        self.outcomes.iter().find(|o| o.eigenvalue == eigenvalue).map_or(0.0, |o| o.probability)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Largest per-outcome probability difference.
    pub fn max_diff(&self, other: &OutcomeDistribution) -> f64 {
        self.outcomes
            .iter()
            .map(|o| o.eigenvalue)
            .chain(other.outcomes.iter().map(|o| o.eigenvalue))
            .map(|l| (self.probability(l) - other.probability(l)).abs())
            .fold(0.0, f64::max)
    }
}

/// Born-rule distribution `p(λ) = ⟨ψ|P_λ|ψ⟩`.
pub fn distribution(obs: &Observable, state: &StateVector) -> Result<OutcomeDistribution> {
    let outcomes = obs
        .eigenpairs
        .iter()
        .map(|(lambda, p)| {
            Ok(OutcomeProbability { eigenvalue: *lambda, probability: apply_local(p, &obs.targets, state)?.norm_sqr() })
        })
        .collect::<Result<_>>()?;
    Ok(OutcomeDistribution { outcomes })
}

/// Ensemble-weighted distribution over a proper mixture.
pub fn mixed_distribution(obs: &Observable, state: &MixedState) -> Result<OutcomeDistribution> {
    let mut outcomes: Vec<OutcomeProbability> =
        obs.eigenvalues().into_iter().map(|eigenvalue| OutcomeProbability { eigenvalue, probability: 0.0 }).collect();
    for (w, component) in state.components() {
        let d = distribution(obs, component)?;
        for (acc, o) in outcomes.iter_mut().zip(d.outcomes) {
            acc.probability += w * o.probability;
        }
    }
    Ok(OutcomeDistribution { outcomes })
}

/// Projective measurement with collapse: samples an eigenvalue from the
/// Born distribution and returns the renormalized projected state.
pub fn measure<R: Rng + ?Sized>(obs: &Observable, state: &StateVector, rng: &mut R) -> Result<(f64, StateVector)> {
    let projected: Vec<(f64, StateVector)> = obs
        .eigenpairs
        .iter()
        .map(|(lambda, p)| Ok((*lambda, apply_local(p, &obs.targets, state)?)))
        .collect::<Result<_>>()?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = None;
    for (k, (_, s)) in projected.iter().enumerate() {
        let p = s.norm_sqr();
        acc += p;
        if p > 0.0 {
            chosen = Some(k);
        }
        if u < acc && p > 0.0 {
            break;
        }
    }
    let k = chosen.ok_or(Error::ZeroNorm)?;
    let (eigenvalue, s) = &projected[k];
    let probability = s.norm_sqr();
    if probability < NEGLIGIBLE_PROBABILITY {
        return Err(Error::NegligibleOutcome { eigenvalue: *eigenvalue, probability });
    }
    Ok((*eigenvalue, s.normalized()?))
}

/// `|Ready⟩_L ⊗ |+x⟩_A`, the single-laboratory pre-measurement state.
pub fn single_lab_initial_state() -> StateVector {
    let lab = StateVector::on_factor(Factor::L, &lab_vector(LabLabel::Ready)).unwrap();
    let electron = StateVector::on_factor(Factor::A, &spin_vector(SpinAxis::X, Sign::Plus)).unwrap();
    crate::qmath::tensor(&lab, &electron).unwrap()
}

fn pair_state(v: Vec<Amplitude>) -> StateVector {
    StateVector::new(FactorLayout::new(vec![Factor::L, Factor::A]).unwrap(), v).unwrap()
}

/// The unitarily evolved single-laboratory state, as a one-element ensemble.
pub fn rho_uni(model: &MeasurementModel) -> Result<MixedState> {
    Ok(MixedState::pure(model.apply(Factor::L, Factor::A, &single_lab_initial_state())?))
}

/// The collapsed single-laboratory state: equal mixture of `|+1Z⟩` and `|−1Z⟩`.
pub fn rho_col(model: &MeasurementModel) -> Result<MixedState> {
    MixedState::new(vec![
        (0.5, pair_state(model.recorded_vector(Sign::Plus))),
        (0.5, pair_state(model.recorded_vector(Sign::Minus))),
    ])
}

/// Door-opening versus `Ĵ` statistics on the unitary and collapsed states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishabilityReport {
    pub door_uni: OutcomeDistribution,
    pub door_col: OutcomeDistribution,
    pub j_uni: OutcomeDistribution,
    pub j_col: OutcomeDistribution,
}

pub fn distinguishability_report() -> Result<DistinguishabilityReport> {
    let model = ideal_von_neumann();
    let door = door_observable(Factor::L)?;
    let j = outsider_observable(&model, Factor::L, Factor::A)?;
    let uni = rho_uni(&model)?;
    let col = rho_col(&model)?;
    Ok(DistinguishabilityReport {
        door_uni: mixed_distribution(&door, &uni)?,
        door_col: mixed_distribution(&door, &col)?,
        j_uni: mixed_distribution(&j, &uni)?,
        j_col: mixed_distribution(&j, &col)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{inner, tensor};
    use crate::systems::{lab_state, spin_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair_basis(lab: LabLabel, spin: Sign) -> StateVector {
        tensor(&lab_state(Factor::L, lab).unwrap(), &spin_state(Factor::A, SpinAxis::Z, spin).unwrap()).unwrap()
    }

    #[test]
    fn ideal_model_records_z_outcome() {
        let model = ideal_von_neumann();
        for sign in Sign::BOTH {
            let out = model.apply(Factor::L, Factor::A, &pair_basis(LabLabel::Ready, sign)).unwrap();
            assert_eq!(out, pair_basis(LabLabel::recorded(sign), sign));
        }
        assert!(check_unitary(model.unitary(), UNITARY_TOL));
    }

    #[test]
    fn ideal_model_entangles_x_up_electron() {
        let out = ideal_von_neumann().apply(Factor::L, Factor::A, &single_lab_initial_state()).unwrap();
        let up = inner(&pair_basis(LabLabel::RecordedUp, Sign::Plus), &out).unwrap();
        let down = inner(&pair_basis(LabLabel::RecordedDown, Sign::Minus), &out).unwrap();
        assert!((up.re - FRAC_1_SQRT_2).abs() < 1e-15 && up.im == 0.0);
        assert!((down.re - FRAC_1_SQRT_2).abs() < 1e-15 && down.im == 0.0);
        assert!((up.norm_sqr() + down.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn custom_model_from_ideal_permutation() {
        let ideal = ideal_von_neumann();
        let custom = custom_model(ideal.unitary().clone()).unwrap();
        assert_eq!(custom, ideal);
    }

    #[test]
    fn custom_model_rejects_non_unitary() {
        let mut u = Operator::identity(6);
        u.set(0, 0, Complex64::new(0.0, 0.0));
        assert!(matches!(custom_model(u), Err(Error::NotUnitary(_))));
        assert!(matches!(custom_model(Operator::identity(4)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn random_model_recorded_states_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let model = random_model(&mut rng);
            let p = pair_state(model.recorded_vector(Sign::Plus));
            let m = pair_state(model.recorded_vector(Sign::Minus));
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert!((m.norm() - 1.0).abs() < 1e-12);
            assert!(inner(&p, &m).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn j_on_uni_and_col() {
        let model = ideal_von_neumann();
        let j = outsider_observable(&model, Factor::L, Factor::A).unwrap();
        let uni = mixed_distribution(&j, &rho_uni(&model).unwrap()).unwrap();
        assert!((uni.probability(1.0) - 1.0).abs() < 1e-12);
        let col = mixed_distribution(&j, &rho_col(&model).unwrap()).unwrap();
        assert!((col.probability(1.0) - 0.5).abs() < 1e-12);
        assert!((col.probability(-1.0) - 0.5).abs() < 1e-12);
        assert!(col.probability(0.0).abs() < 1e-12);
    }

    #[test]
    fn door_cannot_tell_uni_from_col() {
        let r = distinguishability_report().unwrap();
        for d in [&r.door_uni, &r.door_col] {
            assert!((d.probability(1.0) - 0.5).abs() < 1e-12);
            assert!((d.probability(-1.0) - 0.5).abs() < 1e-12);
        }
        assert!(r.door_uni.max_diff(&r.door_col) < 1e-12);
        assert!(r.j_uni.max_diff(&r.j_col) > 0.49);
    }

    #[test]
    fn door_on_recorded_up_is_point_mass() {
        let door = door_observable(Factor::L).unwrap();
        let s = pair_basis(LabLabel::RecordedUp, Sign::Minus);
        let d = distribution(&door, &s).unwrap();
        assert_eq!(d.probability(1.0), 1.0);
    }

    #[test]
    fn z_spin_on_x_up_is_even() {
        let obs = spin_observable(Factor::A, SpinAxis::Z).unwrap();
        let s = spin_state(Factor::A, SpinAxis::X, Sign::Plus).unwrap();
        let d = distribution(&obs, &s).unwrap();
        assert!((d.probability(1.0) - 0.5).abs() < 1e-15);
        assert!((d.probability(-1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn measuring_eigenstate_is_deterministic() {
        let model = ideal_von_neumann();
        let j = outsider_observable(&model, Factor::L, Factor::A).unwrap();
        let s = pair_state(model.superposed_vector(Sign::Plus));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let (outcome, post) = measure(&j, &s, &mut rng).unwrap();
            assert_eq!(outcome, 1.0);
            assert!(post.max_abs_diff(&s).unwrap() < 1e-14);
        }
    }

    #[test]
    fn j_on_recorded_up_erases_the_record() {
        let model = ideal_von_neumann();
        let j = outsider_observable(&model, Factor::L, Factor::A).unwrap();
        let s = pair_state(model.recorded_vector(Sign::Plus));
        let d = distribution(&j, &s).unwrap();
        assert!((d.probability(1.0) - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (_, post) = measure(&j, &s, &mut rng).unwrap();
        let down = inner(&pair_basis(LabLabel::RecordedDown, Sign::Minus), &post).unwrap();
        assert!((down.norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn observable_validation() {
        let p = Operator::projector(&spin_vector(SpinAxis::Z, Sign::Plus));
        // incomplete
        assert!(Observable::new(vec![Factor::A], vec![(1.0, p.clone())]).is_err());
        // repeated eigenvalue
        let m = Operator::projector(&spin_vector(SpinAxis::Z, Sign::Minus));
        assert!(Observable::new(vec![Factor::A], vec![(1.0, p), (1.0, m)]).is_err());
    }

    #[test]
    fn outsider_zero_eigenspace_unreachable_from_scenario_pair_states() {
        let model = ideal_von_neumann();
        let j = outsider_observable(&model, Factor::L, Factor::A).unwrap();
        for sign in Sign::BOTH {
            for v in [model.recorded_vector(sign), model.superposed_vector(sign)] {
                assert!(distribution(&j, &pair_state(v)).unwrap().probability(0.0) < 1e-15);
            }
        }
    }
}
