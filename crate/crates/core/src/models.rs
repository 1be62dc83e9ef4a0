//! Single-outcome interpretation models run as seeded Monte Carlo
//! experiments.
//!
//! Two ways of producing one outcome per measurement are provided:
//!
//! * `RoundBorn`: in the preferred frame, each round's joint outcome is
//!   drawn from the Born distribution of the unitarily evolved pre-round
//!   state. Rounds are drawn independently of one another.
//! * `SequentialCollapse`: textbook projective collapse, applied event by
//!   event in the preferred frame's order.
//!
//! Each trial draws from its own ChaCha stream (`stream = trial index`)
//! under the master seed, so trials are order-independent and run in
//! parallel without changing the result.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{door_observable, ideal_von_neumann, measure, outsider_observable, random_model, Observable};
use crate::qmath::{Factor, FactorLayout, StateVector};
use crate::scenario::{
    analyze_frame, build_schedule, collect_constraints, enumerate_assignments, OutcomeAssignment, ParityConstraint,
    RoundAnalysis, Schedule, Slot,
};
use crate::spacetime::{Frame, FrameName};
use crate::systems::{lab_vector, spin_vector, LabLabel, Sign, SpinAxis};

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    RoundBorn,
    SequentialCollapse,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::RoundBorn => "round_born",
            Mode::SequentialCollapse => "sequential_collapse",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "round_born" => Ok(Mode::RoundBorn),
            "sequential_collapse" => Ok(Mode::SequentialCollapse),
            _ => Err(Error::Config(format!("unknown mode {s:?}; expected round_born or sequential_collapse"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpretationModel {
    pub mode: Mode,
    pub preferred: Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub assignment: OutcomeAssignment,
    pub violations: Vec<bool>,
    pub non_preferred_violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub seed: u64,
    pub trials: usize,
    pub constraints: Vec<ParityConstraint>,
    /// Indices into `constraints` of those derivable in the preferred frame.
    pub preferred_constraints: Vec<usize>,
    pub violation_counts: Vec<u64>,
    pub trials_with_non_preferred_violation: u64,
    pub trials_with_any_violation: u64,
    pub records: Vec<TrialRecord>,
}

/// Per-constraint flag: does the assignment's product differ from the required one?
pub fn born_violation_check(assignment: &OutcomeAssignment, constraints: &[ParityConstraint]) -> Vec<bool> {
    constraints.iter().map(|c| !c.satisfied_by(assignment)).collect()
}

fn sample_round<R: Rng + ?Sized>(analysis: &RoundAnalysis, rng: &mut R) -> Result<Vec<Sign>> {
    let entries = &analysis.support.entries;
    let total: f64 = entries.iter().map(|e| e.probability).sum();
    if entries.is_empty() || total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    // conditioned on the support: dropped weight is below the support tolerance
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for e in entries {
        acc += e.probability;
        if u < acc {
            return Ok(e.labels.clone());
        }
    }
    Ok(entries[entries.len() - 1].labels.clone())
}

fn round_born_trial<R: Rng + ?Sized>(rounds: &[RoundAnalysis], rng: &mut R) -> Result<OutcomeAssignment> {
    let mut a = OutcomeAssignment { values: [Sign::Plus; 6] };
    for round in rounds {
        let labels = sample_round(round, rng)?;
        for (&slot, sign) in round.round.slots.iter().zip(labels) {
            a.set(slot, sign);
        }
    }
    Ok(a)
}

fn collapse_trial<R: Rng + ?Sized>(
    schedule: &Schedule,
    rounds: &[RoundAnalysis],
    observables: &[Observable],
    rng: &mut R,
) -> Result<OutcomeAssignment> {
    let mut a = OutcomeAssignment { values: [Sign::Plus; 6] };
    let mut state = crate::systems::initial_scenario_state();
    for round in rounds {
        for &slot in &round.round.slots {
            let (outcome, post) = measure(&observables[slot.index()], &state, rng)?;
            let sign = Sign::from_value(outcome as i64)
                .ok_or(Error::NegligibleOutcome { eigenvalue: outcome, probability: 0.0 })?;
            a.set(slot, sign);
            state = schedule.apply_event(slot, &post)?;
        }
    }
    Ok(a)
}

/// Runs `trials` seeded trials of `model` and checks every trial's outcomes
/// against `constraints`.
pub fn run_model(
    schedule: &Schedule,
    model: &InterpretationModel,
    constraints: &[ParityConstraint],
    trials: usize,
    seed: u64,
) -> Result<RunReport> {
    let rounds = analyze_frame(schedule, &model.preferred)?;
    let preferred: Vec<ParityConstraint> = rounds.iter().filter_map(|r| r.constraint.clone()).collect();
    let preferred_constraints: Vec<usize> =
        (0..constraints.len()).filter(|&i| preferred.contains(&constraints[i])).collect();
    let observables: Vec<Observable> = Slot::ALL.iter().map(|&s| schedule.observable(s)).collect::<Result<_>>()?;

    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let assignment = match model.mode {
                Mode::RoundBorn => round_born_trial(&rounds, &mut rng)?,
                Mode::SequentialCollapse => collapse_trial(schedule, &rounds, &observables, &mut rng)?,
            };
            let violations = born_violation_check(&assignment, constraints);
            let non_preferred_violated =
                violations.iter().enumerate().any(|(k, &v)| v && !preferred_constraints.contains(&k));
            Ok(TrialRecord { assignment, violations, non_preferred_violated })
        })
        .collect::<Result<_>>()?;

    let mut violation_counts = vec![0u64; constraints.len()];
    for r in &records {
        for (count, &v) in violation_counts.iter_mut().zip(&r.violations) {
            *count += u64::from(v);
        }
    }
    Ok(RunReport {
        mode: model.mode,
        seed,
        trials,
        constraints: constraints.to_vec(),
        preferred_constraints,
        violation_counts,
        trials_with_non_preferred_violation: records.iter().filter(|r| r.non_preferred_violated).count() as u64,
        trials_with_any_violation: records.iter().filter(|r| r.violations.iter().any(|&v| v)).count() as u64,
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErasureReport {
    pub trials: usize,
    pub seed: u64,
    pub skip_j: bool,
    pub j_plus: u64,
    pub j_minus: u64,
    pub door_up: u64,
    pub door_down: u64,
    /// Probability that the door reads down, computed without sampling.
    pub exact_down_probability: f64,
    pub exact_j_plus_probability: f64,
}

impl ErasureReport {
    pub fn down_frequency(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.door_down as f64 / self.trials as f64
        }
    }
}

/// One laboratory, electron prepared z-up: the friend records up, the
/// outsider measures `Ĵ` with collapse (unless `skip_j`), then the door is
/// opened.
pub fn erasure_experiment(trials: usize, seed: u64, skip_j: bool) -> Result<ErasureReport> {
    let model = ideal_von_neumann();
    let layout = FactorLayout::new(vec![Factor::L, Factor::A])?;
    let ready_up = crate::qmath::tensor(
        &StateVector::on_factor(Factor::L, &lab_vector(LabLabel::Ready))?,
        &StateVector::on_factor(Factor::A, &spin_vector(SpinAxis::Z, Sign::Plus))?,
    )?;
    debug_assert_eq!(ready_up.layout(), &layout);
    let recorded = model.apply(Factor::L, Factor::A, &ready_up)?;
    let j = outsider_observable(&model, Factor::L, Factor::A)?;
    let door = door_observable(Factor::L)?;

    let (exact_j_plus_probability, exact_down_probability) = if skip_j {
        (0.0, crate::measurement::distribution(&door, &recorded)?.probability(-1.0))
    } else {
        let jd = crate::measurement::distribution(&j, &recorded)?;
        let mut down = 0.0;
        for o in &jd.outcomes {
            if o.probability > 0.0 {
                let post = j.project(o.eigenvalue, &recorded)?;
                // ‖P_door P_J ψ‖² summed over J outcomes
                down += door.project(-1.0, &post)?.norm_sqr();
            }
        }
        (jd.probability(1.0), down)
    };

    let outcomes: Vec<(Option<f64>, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let (j_outcome, state) = if skip_j {
                (None, recorded.clone())
            } else {
                let (o, s) = measure(&j, &recorded, &mut rng)?;
                (Some(o), s)
            };
            let (d, _) = measure(&door, &state, &mut rng)?;
            Ok((j_outcome, d))
        })
        .collect::<Result<_>>()?;

    let (mut j_plus, mut j_minus, mut door_up, mut door_down) = (0, 0, 0, 0);
    for &(j, door) in &outcomes {
        match j {
            Some(v) if v > 0.0 => j_plus += 1,
            Some(_) => j_minus += 1,
            None => {}
        }
        if door > 0.0 {
            door_up += 1;
        } else if door < 0.0 {
            door_down += 1;
        }
    }
    Ok(ErasureReport {
        trials,
        seed,
        skip_j,
        j_plus,
        j_minus,
        door_up,
        door_down,
        exact_down_probability,
        exact_j_plus_probability,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub index: usize,
    pub constraints: Vec<ParityConstraint>,
    pub constraints_match: bool,
    pub satisfying_assignments: usize,
    /// Largest `|p − 1/4|` over the tuples of every constrained round.
    pub max_support_deviation: f64,
}

impl SweepEntry {
    pub fn reproduces(&self) -> bool {
        self.constraints_match && self.satisfying_assignments == 0 && self.max_support_deviation <= 1e-9
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub baseline: SweepEntry,
    pub models: Vec<SweepEntry>,
    pub reproduced: usize,
}

fn sweep_entry(index: usize, schedule: &Schedule, canonical: Option<&[ParityConstraint]>) -> Result<SweepEntry> {
    let frames: Vec<Frame> = FrameName::ALL.iter().map(|n| n.frame(schedule.geometry())).collect::<Result<_>>()?;
    let mut max_support_deviation: f64 = 0.0;
    for f in &frames {
        for r in analyze_frame(schedule, f)? {
            if r.constraint.is_some() {
                for e in &r.support.entries {
                    max_support_deviation = max_support_deviation.max((e.probability - 0.25).abs());
                }
            }
        }
    }
    let constraints = collect_constraints(schedule, &frames)?;
    Ok(SweepEntry {
        index,
        constraints_match: canonical.is_none_or(|c| c == constraints.as_slice()),
        satisfying_assignments: enumerate_assignments(&constraints).len(),
        constraints,
        max_support_deviation,
    })
}

/// Repeats the four-frame derivation with Haar-random measurement unitaries
/// at every site and compares against the ideal-measurement baseline.
pub fn nonideal_sweep(n_models: usize, seed: u64, side: f64, tau: f64) -> Result<SweepReport> {
    let ideal = ideal_von_neumann();
    let baseline_schedule = build_schedule(side, tau, [ideal.clone(), ideal.clone(), ideal])?;
    let baseline = sweep_entry(0, &baseline_schedule, None)?;
    let models: Vec<SweepEntry> = (0..n_models)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let models = [random_model(&mut rng), random_model(&mut rng), random_model(&mut rng)];
            let schedule = build_schedule(side, tau, models)?;
            sweep_entry(i, &schedule, Some(&baseline.constraints))
        })
        .collect::<Result<_>>()?;
    let reproduced = models.iter().filter(|m| m.reproduces()).count();
    Ok(SweepReport { seed, baseline, models, reproduced })
}
