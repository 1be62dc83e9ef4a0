//! The six-measurement schedule, frame-ordered unitary evolution, Born-rule
//! supports per round and the parity constraints they imply.
//!
//! Outcome slots are labeled canonically: `z_A`, `z_B`, `z_C` for the
//! friends' z-spin results and `x_A`, `x_B`, `x_C` for the outsiders'
//! superposition-basis results.
//!
//! Changing frame acts as the identity on amplitudes. Only the order in
//! which the local friend unitaries are applied depends on the frame, so
//! the pre-round states differ between frames only through which friends
//! have already measured.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{ideal_von_neumann, outsider_observable, spin_observable, MeasurementModel, Observable};
use crate::qmath::{apply_local, Factor, StateVector};
use crate::spacetime::{
    frame_time, simultaneity_tol, standard_geometry, validate_geometry, Frame, GeometrySpec, Site, SpacetimePoint,
};
use crate::systems::{initial_scenario_state, sign_tuples, Sign, SpinAxis, SUPPORT_EPS};

/// Laboratory and electron factors at a site.
pub fn site_factors(site: Site) -> (Factor, Factor) {
    match site {
        Site::A => (Factor::L, Factor::A),
        Site::B => (Factor::M, Factor::B),
        Site::C => (Factor::N, Factor::C),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    #[serde(rename = "z_A")]
    ZA,
    #[serde(rename = "z_B")]
    ZB,
    #[serde(rename = "z_C")]
    ZC,
    #[serde(rename = "x_A")]
    XA,
    #[serde(rename = "x_B")]
    XB,
    #[serde(rename = "x_C")]
    XC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// Friend measures the electron's z-spin by running the pair unitary.
    FriendZ,
    /// Outsider measures the pair's superposition-basis observable.
    OutsiderX,
}

impl Slot {
    pub const ALL: [Slot; 6] = [Slot::ZA, Slot::ZB, Slot::ZC, Slot::XA, Slot::XB, Slot::XC];

    pub fn friend(site: Site) -> Slot {
        match site {
            Site::A => Slot::ZA,
            Site::B => Slot::ZB,
            Site::C => Slot::ZC,
        }
    }

    pub fn outsider(site: Site) -> Slot {
        match site {
            Site::A => Slot::XA,
            Site::B => Slot::XB,
            Site::C => Slot::XC,
        }
    }

    pub fn site(self) -> Site {
        match self {
            Slot::ZA | Slot::XA => Site::A,
            Slot::ZB | Slot::XB => Site::B,
            Slot::ZC | Slot::XC => Site::C,
        }
    }

    pub fn kind(self) -> EventKind {
        match self {
            Slot::ZA | Slot::ZB | Slot::ZC => EventKind::FriendZ,
            _ => EventKind::OutsiderX,
        }
    }

    pub fn index(self) -> usize {
        Slot::ALL.iter().position(|&s| s == self).unwrap()
    }

    pub fn label(self) -> &'static str {
        match self {
            Slot::ZA => "z_A",
            Slot::ZB => "z_B",
            Slot::ZC => "z_C",
            Slot::XA => "x_A",
            Slot::XB => "x_B",
            Slot::XC => "x_C",
        }
    }

    /// Event name: `friend_A`, `outsider_C`, ...
    pub fn event_name(self) -> String {
        match self.kind() {
            EventKind::FriendZ => format!("friend_{}", self.site()),
            EventKind::OutsiderX => format!("outsider_{}", self.site()),
        }
    }

    /// Image under the relabeling `A → B → C → A`.
    pub fn cycled(self) -> Slot {
        match self.kind() {
            EventKind::FriendZ => Slot::friend(self.site().cycled()),
            EventKind::OutsiderX => Slot::outsider(self.site().cycled()),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementEvent {
    pub slot: Slot,
    pub location: SpacetimePoint,
}

impl MeasurementEvent {
    pub fn targets(&self) -> [Factor; 2] {
        let (lab, electron) = site_factors(self.slot.site());
        [lab, electron]
    }
}

#[derive(Clone, Debug)]
pub struct Schedule {
    geometry: GeometrySpec,
    events: Vec<MeasurementEvent>,
    models: [MeasurementModel; 3],
}

impl Schedule {
    /// Friends' events at `t1`, outsiders' at `t2`, one model per site (A, B, C).
    pub fn from_geometry(geometry: GeometrySpec, models: [MeasurementModel; 3]) -> Result<Self> {
        let failed: Vec<String> =
            validate_geometry(&geometry).into_iter().filter(|c| !c.passed).map(|c| c.name).collect();
        if !failed.is_empty() {
            return Err(Error::InvalidGeometry(failed));
        }
        let events = Slot::ALL
            .iter()
            .map(|&slot| {
                let location = match slot.kind() {
                    EventKind::FriendZ => geometry.friend_point(slot.site()),
                    EventKind::OutsiderX => geometry.outsider_point(slot.site()),
                };
                MeasurementEvent { slot, location }
            })
            .collect();
        Ok(Self { geometry, events, models })
    }

    pub fn geometry(&self) -> &GeometrySpec {
        &self.geometry
    }

    pub fn events(&self) -> &[MeasurementEvent] {
        &self.events
    }

    pub fn event(&self, slot: Slot) -> &MeasurementEvent {
        &self.events[slot.index()]
    }

    pub fn model(&self, site: Site) -> &MeasurementModel {
        &self.models[site as usize]
    }

    pub fn models(&self) -> &[MeasurementModel; 3] {
        &self.models
    }

    /// Observable whose Born distribution on the pre-round state gives this
    /// slot's outcome: electron z-spin for a friend, the pair observable for
    /// an outsider.
    pub fn observable(&self, slot: Slot) -> Result<Observable> {
        let (lab, electron) = site_factors(slot.site());
        match slot.kind() {
            EventKind::FriendZ => spin_observable(electron, SpinAxis::Z),
            EventKind::OutsiderX => outsider_observable(self.model(slot.site()), lab, electron),
        }
    }

    /// Applies the friend's measurement unitary at `slot`; outsider events
    /// contribute no unitary.
    pub fn apply_event(&self, slot: Slot, state: &StateVector) -> Result<StateVector> {
        match slot.kind() {
            EventKind::FriendZ => {
                let (lab, electron) = site_factors(slot.site());
                self.model(slot.site()).apply(lab, electron, state)
            }
            EventKind::OutsiderX => Ok(state.clone()),
        }
    }
}

pub fn build_schedule(side: f64, tau: f64, models: [MeasurementModel; 3]) -> Result<Schedule> {
    Schedule::from_geometry(standard_geometry(side, tau)?, models)
}

/// Schedule with the ideal Von Neumann measurement at every site.
pub fn ideal_schedule(side: f64, tau: f64) -> Result<Schedule> {
    let m = ideal_von_neumann();
    build_schedule(side, tau, [m.clone(), m.clone(), m])
}

/// Events sharing one frame time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub time: f64,
    pub slots: Vec<Slot>,
}

/// Groups events by frame time, earliest first. Slots within a round are in
/// canonical order.
pub fn order_events(schedule: &Schedule, frame: &Frame) -> Result<Vec<Round>> {
    let mut timed: Vec<(f64, Slot)> =
        schedule.events().iter().map(|e| (frame_time(frame, &e.location), e.slot)).collect();
    timed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut rounds: Vec<Round> = Vec::new();
    for (t, slot) in timed {
        match rounds.last_mut() {
            Some(r) if (t - r.time).abs() <= simultaneity_tol(r.time) => {
                if let Some(clash) = r.slots.iter().find(|s| s.site() == slot.site()) {
                    return Err(Error::OverlappingRound(clash.event_name(), slot.event_name()));
                }
                r.slots.push(slot);
            }
            _ => rounds.push(Round { time: t, slots: vec![slot] }),
        }
    }
    for r in &mut rounds {
        r.slots.sort();
    }
    Ok(rounds)
}

/// Unitarily evolved state just before round `round_index` (0-based) of the
/// frame's ordering: the friends' unitaries of all earlier rounds applied to
/// the initial state, no collapse. `round_index == rounds.len()` gives the
/// state after every friend has measured.
pub fn evolve_to(schedule: &Schedule, frame: &Frame, round_index: usize) -> Result<StateVector> {
    let rounds = order_events(schedule, frame)?;
    evolve_rounds(schedule, &rounds, round_index)
}

fn evolve_rounds(schedule: &Schedule, rounds: &[Round], round_index: usize) -> Result<StateVector> {
    if round_index > rounds.len() {
        return Err(Error::DimensionMismatch { expected: rounds.len(), found: round_index });
    }
    let mut state = initial_scenario_state();
    for round in &rounds[..round_index] {
        for &slot in &round.slots {
            state = schedule.apply_event(slot, &state)?;
        }
    }
    Ok(state)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeWeight {
    pub labels: Vec<Sign>,
    pub probability: f64,
}

impl OutcomeWeight {
    pub fn parity(&self) -> Sign {
        Sign::product(&self.labels)
    }
}

/// Born-rule support of one round's joint outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundSupport {
    pub slots: Vec<Slot>,
    /// Tuples whose probability exceeds the support tolerance.
    pub entries: Vec<OutcomeWeight>,
    /// Weight on outcomes outside ±1 (the outsider observables' zero eigenspace).
    pub off_support_weight: f64,
}

impl RoundSupport {
    pub fn common_parity(&self) -> Option<Sign> {
        let first = self.entries.first()?.parity();
        self.entries.iter().all(|e| e.parity() == first).then_some(first)
    }
}

/// Product of the outcomes in `slots` must equal `product`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityConstraint {
    pub slots: Vec<Slot>,
    pub product: Sign,
}

impl ParityConstraint {
    pub fn new(mut slots: Vec<Slot>, product: Sign) -> Self {
        slots.sort();
        Self { slots, product }
    }

    pub fn satisfied_by(&self, assignment: &OutcomeAssignment) -> bool {
        Sign::product(self.slots.iter().map(|&s| &assignment.values[s.index()])) == self.product
    }

    pub fn cycled(&self) -> ParityConstraint {
        ParityConstraint::new(self.slots.iter().map(|s| s.cycled()).collect(), self.product)
    }
}

impl fmt::Display for ParityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, " = {}", self.product)
    }
}

/// Joint support of a round on `state`, and the parity constraint it
/// implies if every surviving tuple shares one product.
///
/// Tuple probabilities are `‖Π_k P_k|ψ⟩‖²` with the round's projectors,
/// which act on disjoint pairs and so commute.
pub fn support_constraint(
    state: &StateVector,
    slots: &[Slot],
    schedule: &Schedule,
    eps: f64,
) -> Result<(RoundSupport, Option<ParityConstraint>)> {
    let observables: Vec<Observable> = slots.iter().map(|&s| schedule.observable(s)).collect::<Result<_>>()?;
    let mut entries = Vec::new();
    let mut covered = 0.0;
    for labels in sign_tuples(slots.len()) {
        let mut projected = state.clone();
        for (obs, sign) in observables.iter().zip(&labels) {
            let p = obs
                .projector(sign.value() as f64)
                .ok_or_else(|| Error::InvalidObservable("missing ±1 eigenvalue".into()))?;
            projected = apply_local(p, obs.targets(), &projected)?;
        }
        let probability = projected.norm_sqr();
        covered += probability;
        if probability > eps {
            entries.push(OutcomeWeight { labels, probability });
        }
    }
    let support =
        RoundSupport { slots: slots.to_vec(), entries, off_support_weight: (state.norm_sqr() - covered).max(0.0) };
    let constraint = match support.common_parity() {
        Some(product) if support.off_support_weight <= eps => Some(ParityConstraint::new(slots.to_vec(), product)),
        _ => None,
    };
    Ok((support, constraint))
}

/// One round of a frame's ordering with its pre-round support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundAnalysis {
    pub round: Round,
    pub support: RoundSupport,
    pub constraint: Option<ParityConstraint>,
}

/// Orders the schedule in `frame` and extracts the support of every round.
pub fn analyze_frame(schedule: &Schedule, frame: &Frame) -> Result<Vec<RoundAnalysis>> {
    let rounds = order_events(schedule, frame)?;
    let mut state = initial_scenario_state();
    let mut out = Vec::with_capacity(rounds.len());
    for round in rounds {
        let (support, constraint) = support_constraint(&state, &round.slots, schedule, SUPPORT_EPS)?;
        for &slot in &round.slots {
            state = schedule.apply_event(slot, &state)?;
        }
        out.push(RoundAnalysis { round, support, constraint });
    }
    Ok(out)
}

/// Constraints from every round of every frame, deduplicated, in order of
/// first appearance.
pub fn collect_constraints(schedule: &Schedule, frames: &[Frame]) -> Result<Vec<ParityConstraint>> {
    let analyses: Vec<Vec<RoundAnalysis>> =
        frames.par_iter().map(|f| analyze_frame(schedule, f)).collect::<Result<_>>()?;
    let mut out: Vec<ParityConstraint> = Vec::new();
    for c in analyses.into_iter().flatten().filter_map(|a| a.constraint) {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// A ±1 value for each of the six slots, indexed in `Slot::ALL` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeAssignment {
    pub values: [Sign; 6],
}

impl OutcomeAssignment {
    pub fn get(&self, slot: Slot) -> Sign {
        self.values[slot.index()]
    }

    pub fn set(&mut self, slot: Slot, value: Sign) {
        self.values[slot.index()] = value;
    }

    /// All 64 assignments, Plus-first lexicographic in slot order.
    pub fn all() -> impl Iterator<Item = OutcomeAssignment> {
        sign_tuples(6).map(|v| OutcomeAssignment { values: [v[0], v[1], v[2], v[3], v[4], v[5]] })
    }
}

/// Every total assignment satisfying all constraints, by brute force.
pub fn enumerate_assignments(constraints: &[ParityConstraint]) -> Vec<OutcomeAssignment> {
    OutcomeAssignment::all().filter(|a| constraints.iter().all(|c| c.satisfied_by(a))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::FrameName;

    fn frames(s: &Schedule) -> Vec<Frame> {
        FrameName::ALL.iter().map(|n| n.frame(s.geometry()).unwrap()).collect()
    }

    fn rounds_as_names(rounds: &[Round]) -> Vec<Vec<Slot>> {
        rounds.iter().map(|r| r.slots.clone()).collect()
    }

    #[test]
    fn schedule_has_six_events() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        assert_eq!(s.events().len(), 6);
        for site in Site::ALL {
            assert!(s.event(Slot::friend(site)).location.t < s.event(Slot::outsider(site)).location.t);
        }
    }

    #[test]
    fn invalid_geometry_rejected() {
        assert!(matches!(ideal_schedule(10.0, 20.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn rest_frame_ordering() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let rounds = order_events(&s, &Frame::rest()).unwrap();
        assert_eq!(
            rounds_as_names(&rounds),
            vec![vec![Slot::ZA, Slot::ZB, Slot::ZC], vec![Slot::XA, Slot::XB, Slot::XC]]
        );
    }

    #[test]
    fn primed_frame_orderings() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let g = s.geometry();
        let expect = [
            (FrameName::SigmaP, vec![vec![Slot::ZA], vec![Slot::ZB, Slot::ZC, Slot::XA], vec![Slot::XB, Slot::XC]]),
            (FrameName::SigmaPp, vec![vec![Slot::ZB], vec![Slot::ZA, Slot::ZC, Slot::XB], vec![Slot::XA, Slot::XC]]),
            (FrameName::SigmaPpp, vec![vec![Slot::ZC], vec![Slot::ZA, Slot::ZB, Slot::XC], vec![Slot::XA, Slot::XB]]),
        ];
        for (name, rounds) in expect {
            let got = order_events(&s, &name.frame(g).unwrap()).unwrap();
            assert_eq!(rounds_as_names(&got), rounds, "{name}");
        }
    }

    #[test]
    fn friend_precedes_outsider_in_boosted_frames() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        for (vx, vy) in [(0.9, 0.0), (-0.5, 0.7), (0.0, -0.99), (0.3, 0.3)] {
            let f = Frame::new([vx, vy]).unwrap();
            for site in Site::ALL {
                let tf = frame_time(&f, &s.event(Slot::friend(site)).location);
                let to = frame_time(&f, &s.event(Slot::outsider(site)).location);
                assert!(tf < to);
            }
        }
    }

    #[test]
    fn evolve_to_zero_is_initial_state() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        for f in frames(&s) {
            assert_eq!(evolve_to(&s, &f, 0).unwrap(), initial_scenario_state());
        }
        assert!(evolve_to(&s, &Frame::rest(), 3).is_err());
    }

    #[test]
    fn rest_frame_outsider_round_has_odd_parity() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let state = evolve_to(&s, &Frame::rest(), 1).unwrap();
        let (support, c) = support_constraint(&state, &[Slot::XA, Slot::XB, Slot::XC], &s, SUPPORT_EPS).unwrap();
        assert_eq!(support.entries.len(), 4);
        assert!(support.entries.iter().all(|e| (e.probability - 0.25).abs() < 1e-12));
        assert_eq!(c, Some(ParityConstraint::new(vec![Slot::XA, Slot::XB, Slot::XC], Sign::Minus)));
    }

    #[test]
    fn primed_frame_mixed_round_has_even_parity() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let f = FrameName::SigmaP.frame(s.geometry()).unwrap();
        let state = evolve_to(&s, &f, 1).unwrap();
        let (support, c) = support_constraint(&state, &[Slot::ZB, Slot::ZC, Slot::XA], &s, SUPPORT_EPS).unwrap();
        assert_eq!(support.entries.len(), 4);
        assert_eq!(c.unwrap().product, Sign::Plus);
    }

    #[test]
    fn friends_round_on_initial_state_is_unconstrained() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let (support, c) =
            support_constraint(&initial_scenario_state(), &[Slot::ZA, Slot::ZB, Slot::ZC], &s, SUPPORT_EPS).unwrap();
        assert_eq!(support.entries.len(), 8);
        assert!(support.entries.iter().all(|e| (e.probability - 0.125).abs() < 1e-12));
        assert!(c.is_none());
    }

    #[test]
    fn four_frames_give_the_ghz_constraints() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let got = collect_constraints(&s, &frames(&s)).unwrap();
        let expected = vec![
            ParityConstraint::new(vec![Slot::XA, Slot::XB, Slot::XC], Sign::Minus),
            ParityConstraint::new(vec![Slot::XA, Slot::ZB, Slot::ZC], Sign::Plus),
            ParityConstraint::new(vec![Slot::ZA, Slot::XB, Slot::ZC], Sign::Plus),
            ParityConstraint::new(vec![Slot::ZA, Slot::ZB, Slot::XC], Sign::Plus),
        ];
        assert_eq!(got, expected);
        assert!(enumerate_assignments(&got).is_empty());
    }

    #[test]
    fn rest_frame_alone_gives_one_constraint() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        assert_eq!(collect_constraints(&s, &[Frame::rest()]).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_assignments(&[]).len(), 64);
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let all = collect_constraints(&s, &frames(&s)).unwrap();
        for drop in 0..4 {
            let mut three = all.clone();
            three.remove(drop);
            assert_eq!(enumerate_assignments(&three).len(), 8);
        }
    }

    #[test]
    fn primed_constraints_are_cyclic_images() {
        let s = ideal_schedule(10.0, 1.0).unwrap();
        let g = s.geometry();
        let get = |n: FrameName| collect_constraints(&s, &[n.frame(g).unwrap()]).unwrap();
        assert_eq!(get(FrameName::SigmaP)[0].cycled(), get(FrameName::SigmaPp)[0]);
        assert_eq!(get(FrameName::SigmaPp)[0].cycled(), get(FrameName::SigmaPpp)[0]);
        assert_eq!(get(FrameName::SigmaPpp)[0].cycled(), get(FrameName::SigmaP)[0]);
    }

    #[test]
    fn constraint_display() {
        let c = ParityConstraint::new(vec![Slot::XC, Slot::ZA, Slot::ZB], Sign::Plus);
        assert_eq!(c.to_string(), "z_A·z_B·x_C = +1");
    }
}
