//! Seeded randomized campaigns shared by the property tests and the
//! acceptance runner. Each campaign returns `Err` with the minimal failing
//! input if any case fails.

#![allow(dead_code)]

use gwsim::measurement::{
    distribution, door_observable, ideal_von_neumann, measure, outsider_observable, random_model, spin_observable,
    Observable,
};
use gwsim::qmath::{apply_local, random_unitary, Amplitude, Factor, FactorLayout, Operator, StateVector};
use gwsim::scenario::{build_schedule, evolve_to, order_events};
use gwsim::spacetime::Frame;
use gwsim::systems::{expand_in_basis, sign_tuples, spin_vector, BasisSpec, MeasuredSubsystem, Sign, SpinAxis};
use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const TOL: f64 = 1e-10;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn random_state(layout: FactorLayout, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Amplitude> = (0..layout.total_dim())
        .map(|_| Amplitude::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    StateVector::new(layout, amps).unwrap().normalized().unwrap()
}

fn layouts(max: usize) -> impl Strategy<Value = Vec<Factor>> {
    subsequence(Factor::CANONICAL.to_vec(), 1..=max).prop_shuffle()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn err(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// A random unitary on a random subset of a random layout keeps the norm.
pub fn norm_preservation(cases: u32) -> Result<(), String> {
    let strategy = layouts(3).prop_flat_map(|l| {
        let n = l.len();
        (Just(l.clone()), subsequence(l, 1..=n).prop_shuffle(), any::<u64>())
    });
    runner(cases)
        .run(&strategy, |(factors, targets, seed)| {
            let state = random_state(FactorLayout::new(factors).unwrap(), seed);
            let dim = targets.iter().map(|f| f.dim()).product();
            let u = random_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37));
            let out = apply_local(&u, &targets, &state).map_err(err)?;
            check((out.norm() - 1.0).abs() <= TOL, || format!("norm {}", out.norm()))
        })
        .map_err(|e| e.to_string())
}

/// Observable drawn from the library: electron spin, outsider `Ĵ` for the
/// ideal or a random measurement model, or the lab door.
pub fn library_observable(kind: u8, site: usize, axis: u8, seed: u64) -> Observable {
    let electron = Factor::ELECTRONS[site];
    let lab = Factor::LABS[site];
    match kind {
        0 => spin_observable(electron, [SpinAxis::X, SpinAxis::Y, SpinAxis::Z][axis as usize]).unwrap(),
        1 => outsider_observable(&ideal_von_neumann(), lab, electron).unwrap(),
        2 => outsider_observable(&random_model(&mut ChaCha8Rng::seed_from_u64(seed)), lab, electron).unwrap(),
        _ => door_observable(lab).unwrap(),
    }
}

/// Observable plus a random normalized state on its targets and possibly
/// one spectator factor, in shuffled order.
fn observable_case() -> impl Strategy<Value = (Observable, StateVector, u64)> {
    (0u8..4, 0usize..3, 0u8..3, any::<u64>(), any::<bool>(), 0usize..6, any::<bool>()).prop_map(
        |(kind, site, axis, seed, extra, pick, reverse)| {
            let obs = library_observable(kind, site, axis, seed);
            let mut factors = obs.targets().to_vec();
            let spare: Vec<Factor> = Factor::CANONICAL.into_iter().filter(|f| !factors.contains(f)).collect();
            if extra {
                factors.push(spare[pick % spare.len()]);
            }
            if reverse {
                factors.reverse();
            }
            let state = random_state(FactorLayout::new(factors).unwrap(), seed.rotate_left(17));
            (obs, state, seed)
        },
    )
}

/// Projectors are orthogonal, sum to the identity, and the Born weights sum to one.
pub fn projector_completeness(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&observable_case(), |(obs, state, _)| {
            let pairs = obs.eigenpairs();
            let dim = pairs[0].1.dim();
            let mut sum = Operator::zeros(dim);
            for (i, (_, p)) in pairs.iter().enumerate() {
                sum = sum.add(p).unwrap();
                for (j, (_, q)) in pairs.iter().enumerate() {
                    let pq = p.matmul(q).unwrap();
                    let expected = if i == j { p.clone() } else { Operator::zeros(dim) };
                    check(pq.max_abs_diff(&expected) <= TOL, || format!("P{i}·P{j} defect"))?;
                }
            }
            check(sum.max_abs_diff(&Operator::identity(dim)) <= TOL, || "ΣP ≠ I".into())?;
            let total = distribution(&obs, &state).map_err(err)?.total();
            check((total - 1.0).abs() <= TOL, || format!("Σp = {total}"))
        })
        .map_err(|e| e.to_string())
}

/// After a sampled outcome, measuring again gives the same outcome with
/// certainty and projecting leaves the state unchanged.
pub fn collapse_idempotence(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&observable_case(), |(obs, state, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (lambda, post) = measure(&obs, &state, &mut rng).map_err(err)?;
            let p = distribution(&obs, &post).map_err(err)?.probability(lambda);
            check((p - 1.0).abs() <= TOL, || format!("repeat probability {p}"))?;
            let again = obs.project(lambda, &post).map_err(err)?;
            let d = again.max_abs_diff(&post).map_err(err)?;
            check(d <= TOL, || format!("projection moved state by {d}"))?;
            let (second, _) = measure(&obs, &post, &mut rng).map_err(err)?;
            check(second == lambda, || format!("{lambda} then {second}"))
        })
        .map_err(|e| e.to_string())
}

/// The state after all friend measurements does not depend on the frame
/// used to order them.
pub fn frame_order_invariance(cases: u32) -> Result<(), String> {
    let strategy =
        (2.0f64..100.0, 0.01f64..0.9, 0.0f64..0.95, 0.0f64..std::f64::consts::TAU, any::<u64>(), any::<bool>());
    runner(cases)
        .run(&strategy, |(side, frac, speed, angle, seed, ideal)| {
            let models = if ideal {
                let u = ideal_von_neumann();
                [u.clone(), u.clone(), u]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                [random_model(&mut rng), random_model(&mut rng), random_model(&mut rng)]
            };
            let schedule = build_schedule(side, frac * side, models).map_err(err)?;
            let frame = Frame::new([speed * angle.cos(), speed * angle.sin()]).map_err(err)?;
            let rest = Frame::rest();
            let n = order_events(&schedule, &frame).map_err(err)?.len();
            let n_rest = order_events(&schedule, &rest).map_err(err)?.len();
            let a = evolve_to(&schedule, &frame, n).map_err(err)?;
            let b = evolve_to(&schedule, &rest, n_rest).map_err(err)?;
            let d = a.max_abs_diff(&b).map_err(err)?;
            check(d <= TOL, || format!("final states differ by {d}"))
        })
        .map_err(|e| e.to_string())
}

#[derive(Clone, Debug)]
pub struct BasisCase {
    pub state: StateVector,
    pub spec: BasisSpec,
}

/// One to three factors covered by spin and lab+electron pair subsystems,
/// with the state laid out in an unrelated order.
pub fn basis_case() -> impl Strategy<Value = BasisCase> {
    (
        subsequence(vec![0usize, 1, 2], 1..=3).prop_shuffle(),
        proptest::collection::vec((any::<bool>(), 0u8..3, 0u8..3), 3),
        any::<u64>(),
    )
        .prop_filter_map("at most three factors", |(sites, choices, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut subsystems = Vec::new();
            for (k, &site) in sites.iter().enumerate() {
                let (pair, axis, basis) = choices[k];
                let electron = Factor::ELECTRONS[site];
                if pair {
                    let model = if basis == 0 { ideal_von_neumann() } else { random_model(&mut rng) };
                    let lab = Factor::LABS[site];
                    let (plus, minus) = if basis == 2 {
                        (model.superposed_vector(Sign::Plus), model.superposed_vector(Sign::Minus))
                    } else {
                        (model.recorded_vector(Sign::Plus), model.recorded_vector(Sign::Minus))
                    };
                    subsystems.push(MeasuredSubsystem::Pair { lab, electron, plus, minus });
                } else {
                    let axis = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z][axis as usize];
                    subsystems.push(MeasuredSubsystem::Spin { electron, axis });
                }
            }
            let mut factors: Vec<Factor> = subsystems.iter().flat_map(|s| s.factors()).collect();
            if factors.len() > 3 {
                return None;
            }
            factors.sort_by_key(|f| std::cmp::Reverse(f.name()));
            let state = random_state(FactorLayout::new(factors).unwrap(), seed.rotate_left(29));
            Some(BasisCase { state, spec: BasisSpec::new(subsystems) })
        })
}

/// Brute force: sum over every digit string of the state's own layout.
pub fn oracle_amplitudes(case: &BasisCase) -> Vec<(Vec<Sign>, Amplitude)> {
    let layout = case.state.layout();
    let n = case.spec.subsystems.len();
    sign_tuples(n)
        .map(|labels| {
            let mut amp = Amplitude::new(0.0, 0.0);
            for idx in 0..layout.total_dim() {
                let digits = layout.digits(idx);
                let digit = |f: Factor| digits[layout.position(f).unwrap()];
                let mut coeff = Amplitude::new(1.0, 0.0);
                for (sub, &sign) in case.spec.subsystems.iter().zip(&labels) {
                    coeff *= match sub {
                        MeasuredSubsystem::Spin { electron, axis } => spin_vector(*axis, sign)[digit(*electron)].conj(),
                        MeasuredSubsystem::Pair { lab, electron, plus, minus } => {
                            let v = if sign == Sign::Plus { plus } else { minus };
                            v[digit(*lab) * 2 + digit(*electron)].conj()
                        }
                    };
                }
                amp += coeff * case.state.amplitudes()[idx];
            }
            (labels, amp)
        })
        .collect()
}

/// `expand_in_basis` agrees with the brute-force sum tuple by tuple.
pub fn support_oracle(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&basis_case(), |case| {
            let eps = 1e-9;
            let got = expand_in_basis(&case.state, &case.spec, eps).map_err(err)?;
            let want = oracle_amplitudes(&case);
            let kept: Vec<&(Vec<Sign>, Amplitude)> = want.iter().filter(|(_, a)| a.norm_sqr() > eps).collect();
            check(got.entries.len() == kept.len(), || format!("{} entries vs {}", got.entries.len(), kept.len()))?;
            for (e, (labels, amp)) in got.entries.iter().zip(kept) {
                check(&e.labels == labels && (e.amplitude - amp).norm() <= TOL, || {
                    format!("{:?}: {} vs oracle {:?} {}", e.labels, e.amplitude, labels, amp)
                })?;
            }
            let total: f64 = want.iter().map(|(_, a)| a.norm_sqr()).sum();
            check((got.total_weight - total).abs() <= TOL, || format!("weight {} vs {}", got.total_weight, total))
        })
        .map_err(|e| e.to_string())
}
