//! Named physical states and product-basis expansions.
//!
//! Phase conventions, fixed once for the whole crate:
//!
//! * `|±x⟩ = (|+z⟩ ± |−z⟩)/√2`
//! * `|±y⟩ = (|+z⟩ ∓ i|−z⟩)/√2`
//!
//! The `y` convention is the one for which the GHZ state
//! `(|+y+y+y⟩ − i|−y−y−y⟩)/√2` has odd x-parity (every surviving
//! `(x, x, x)` outcome triple multiplies to −1) and even parity in every
//! mixed one-x/two-z basis. With the opposite sign for `|±y⟩` the x-parity
//! flips to +1. Both parities are asserted in the tests below.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{inner, tensor, Amplitude, Factor, FactorLayout, StateVector};

/// Support tolerance on `|amplitude|²`.
pub const SUPPORT_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl fmt::Display for SpinAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinAxis::X => "x",
            SpinAxis::Y => "y",
            SpinAxis::Z => "z",
        })
    }
}

/// A ±1 measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn product<'a>(signs: impl IntoIterator<Item = &'a Sign>) -> Sign {
        signs.into_iter().fold(Sign::Plus, |acc, &s| if s == Sign::Minus { acc.flip() } else { acc })
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("expected ±1, found {v}")))
    }
}

/// Orthonormal laboratory register states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabLabel {
    Ready,
    RecordedUp,
    RecordedDown,
}

impl LabLabel {
    pub fn index(self) -> usize {
        match self {
            LabLabel::Ready => 0,
            LabLabel::RecordedUp => 1,
            LabLabel::RecordedDown => 2,
        }
    }

    /// The record a friend leaves after seeing the given z outcome.
    pub fn recorded(sign: Sign) -> LabLabel {
        match sign {
            Sign::Plus => LabLabel::RecordedUp,
            Sign::Minus => LabLabel::RecordedDown,
        }
    }
}

/// Amplitudes of the spin eigenstate in the `(|+z⟩, |−z⟩)` basis.
pub fn spin_vector(axis: SpinAxis, sign: Sign) -> [Amplitude; 2] {
    let h = FRAC_1_SQRT_2;
    let s = sign.value() as f64;
    match (axis, sign) {
        (SpinAxis::Z, Sign::Plus) => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        (SpinAxis::Z, Sign::Minus) => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        (SpinAxis::X, _) => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
        (SpinAxis::Y, _) => [Complex64::new(h, 0.0), Complex64::new(0.0, -s * h)],
    }
}

pub fn spin_state(electron: Factor, axis: SpinAxis, sign: Sign) -> Result<StateVector> {
    if electron.is_lab() {
        return Err(Error::DimensionMismatch { expected: 3, found: 2 });
    }
    StateVector::on_factor(electron, &spin_vector(axis, sign))
}

pub fn lab_vector(label: LabLabel) -> [Amplitude; 3] {
    let mut v = [Complex64::new(0.0, 0.0); 3];
    v[label.index()] = Complex64::new(1.0, 0.0);
    v
}

pub fn lab_state(lab: Factor, label: LabLabel) -> Result<StateVector> {
    if !lab.is_lab() {
        return Err(Error::DimensionMismatch { expected: 2, found: 3 });
    }
    StateVector::on_factor(lab, &lab_vector(label))
}

/// `(|+y⟩_A|+y⟩_B|+y⟩_C − i|−y⟩_A|−y⟩_B|−y⟩_C)/√2` over layout `(A, B, C)`.
pub fn ghz_state() -> StateVector {
    let product = |sign| -> StateVector {
        let a = spin_state(Factor::A, SpinAxis::Y, sign).unwrap();
        let b = spin_state(Factor::B, SpinAxis::Y, sign).unwrap();
        let c = spin_state(Factor::C, SpinAxis::Y, sign).unwrap();
        tensor(&tensor(&a, &b).unwrap(), &c).unwrap()
    };
    let up = product(Sign::Plus).scaled(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let down = product(Sign::Minus).scaled(Complex64::new(0.0, -FRAC_1_SQRT_2));
    up.add(&down).unwrap()
}

/// All three laboratories ready, electrons in the GHZ state, canonical layout.
pub fn initial_scenario_state() -> StateVector {
    let labs = Factor::LABS
        .iter()
        .map(|&l| lab_state(l, LabLabel::Ready).unwrap())
        .reduce(|acc, s| tensor(&acc, &s).unwrap())
        .unwrap();
    tensor(&labs, &ghz_state()).unwrap().reorder(&FactorLayout::canonical()).unwrap()
}

/// One measured subsystem of a product basis, with its ±1 basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasuredSubsystem {
    Spin {
        electron: Factor,
        axis: SpinAxis,
    },
    /// Joint laboratory+electron system measured in a two-element basis
    /// `{plus, minus}` of the six-dimensional pair space (row-major over
    /// `(lab, electron)`). States with weight outside that span expand
    /// incompletely; the missing weight shows up in `Expansion::total_weight`.
    Pair {
        lab: Factor,
        electron: Factor,
        plus: Vec<Amplitude>,
        minus: Vec<Amplitude>,
    },
}

impl MeasuredSubsystem {
    pub fn factors(&self) -> Vec<Factor> {
        match self {
            MeasuredSubsystem::Spin { electron, .. } => vec![*electron],
            MeasuredSubsystem::Pair { lab, electron, .. } => vec![*lab, *electron],
        }
    }

    fn basis_state(&self, sign: Sign) -> Result<StateVector> {
        match self {
            MeasuredSubsystem::Spin { electron, axis } => spin_state(*electron, *axis, sign),
            MeasuredSubsystem::Pair { lab, electron, plus, minus } => {
                let layout = FactorLayout::new(vec![*lab, *electron])?;
                let v = if sign == Sign::Plus { plus } else { minus };
                StateVector::new(layout, v.clone())
            }
        }
    }
}

/// Product basis over a sequence of measured subsystems; outcome tuples are
/// labeled in this order.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSpec {
    pub subsystems: Vec<MeasuredSubsystem>,
}

impl BasisSpec {
    pub fn new(subsystems: Vec<MeasuredSubsystem>) -> Self {
        Self { subsystems }
    }

    /// Spin measurements along `axes` on electrons A, B, C (in that order).
    pub fn spins(axes: &[SpinAxis]) -> Self {
        Self::new(
            Factor::ELECTRONS
                .iter()
                .zip(axes)
                .map(|(&electron, &axis)| MeasuredSubsystem::Spin { electron, axis })
                .collect(),
        )
    }

    fn layout(&self) -> Result<FactorLayout> {
        FactorLayout::new(self.subsystems.iter().flat_map(|s| s.factors()).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportEntry {
    pub labels: Vec<Sign>,
    pub amplitude: Amplitude,
}

impl SupportEntry {
    pub fn probability(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    pub fn parity(&self) -> Sign {
        Sign::product(&self.labels)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    /// Tuples with `|amplitude|²` above the support tolerance, Plus-first lexicographic order.
    pub entries: Vec<SupportEntry>,
    /// `Σ|amplitude|²` over every tuple, including the dropped ones.
    pub total_weight: f64,
}

impl Expansion {
    /// Common parity of all surviving tuples, if there is one.
    pub fn common_parity(&self) -> Option<Sign> {
        let first = self.entries.first()?.parity();
        self.entries.iter().all(|e| e.parity() == first).then_some(first)
    }
}

/// Every `n`-tuple of signs, Plus-first lexicographic.
pub fn sign_tuples(n: usize) -> impl Iterator<Item = Vec<Sign>> {
    (0..1usize << n)
        .map(move |bits| (0..n).map(|k| if bits >> (n - 1 - k) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect())
}

/// Expands `state` in the product basis `spec`, which must cover every
/// factor of the state exactly once.
pub fn expand_in_basis(state: &StateVector, spec: &BasisSpec, eps: f64) -> Result<Expansion> {
    let spec_layout = spec.layout()?;
    let covered =
        spec_layout.len() == state.layout().len() && state.layout().factors().iter().all(|&f| spec_layout.contains(f));
    if !covered {
        return Err(Error::IncompleteBasis(format!("basis covers {spec_layout}, state has {}", state.layout())));
    }
    let state = state.reorder(&spec_layout)?;

    let per_subsystem: Vec<[StateVector; 2]> = spec
        .subsystems
        .iter()
        .map(|s| Ok([s.basis_state(Sign::Plus)?, s.basis_state(Sign::Minus)?]))
        .collect::<Result<_>>()?;

    let mut entries = Vec::new();
    let mut total_weight = 0.0;
    for labels in sign_tuples(spec.subsystems.len()) {
        let idx = |k: usize| usize::from(labels[k] == Sign::Minus);
        let mut basis = per_subsystem[0][idx(0)].clone();
        for (k, pair) in per_subsystem.iter().enumerate().skip(1) {
            basis = tensor(&basis, &pair[idx(k)])?;
        }
        let amplitude = inner(&basis, &state)?;
        total_weight += amplitude.norm_sqr();
        if amplitude.norm_sqr() > eps {
            entries.push(SupportEntry { labels, amplitude });
        }
    }
    Ok(Expansion { entries, total_weight })
}
