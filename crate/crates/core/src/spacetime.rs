//! Minkowski geometry of the three-laboratory setup.
//!
//! Units have `c = 1`, two spatial dimensions, signature `(+, −, −)`: an
//! interval is negative exactly when the two events are spacelike separated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

/// Geometry tolerance on lengths.
pub const LENGTH_TOL: f64 = 1e-9;
const MAX_SPEED: f64 = 1.0 - 1e-12;

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: Vec2) -> f64 {
    dot(a, a).sqrt()
}

/// Simultaneity tolerance at frame time `t`.
pub fn simultaneity_tol(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: Vec2,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: Vec2) -> Self {
        Self { t, x }
    }
}

/// Laboratory site: friend and outsider of one laboratory share a location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
    C,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::A, Site::B, Site::C];

    /// Next site under the cyclic relabeling `A → B → C → A`.
    pub fn cycled(self) -> Site {
        match self {
            Site::A => Site::B,
            Site::B => Site::C,
            Site::C => Site::A,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Site::A => "A",
            Site::B => "B",
            Site::C => "C",
        })
    }
}

/// Inertial frame given by its boost velocity relative to the rest frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    velocity: Vec2,
}

impl Frame {
    pub fn new(velocity: Vec2) -> Result<Self> {
        let speed = norm(velocity);
        if !speed.is_finite() || speed >= MAX_SPEED {
            return Err(Error::NoSubluminalFrame(format!("speed {speed} is not below 1")));
        }
        Ok(Self { velocity })
    }

    pub fn rest() -> Self {
        Self { velocity: [0.0, 0.0] }
    }

    pub fn velocity(&self) -> Vec2 {
        self.velocity
    }

    pub fn speed(&self) -> f64 {
        norm(self.velocity)
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - dot(self.velocity, self.velocity)).sqrt()
    }
}

/// Time coordinate `γ(t − v·x)` of `p` in frame `f`.
pub fn frame_time(f: &Frame, p: &SpacetimePoint) -> f64 {
    f.gamma() * (p.t - dot(f.velocity, p.x))
}

/// Full boosted coordinates of `p` in frame `f`.
pub fn boost(f: &Frame, p: &SpacetimePoint) -> SpacetimePoint {
    let v = f.velocity;
    let v2 = dot(v, v);
    if v2 == 0.0 {
        return *p;
    }
    let g = f.gamma();
    let vx = dot(v, p.x);
    let k = (g - 1.0) * vx / v2 - g * p.t;
    SpacetimePoint { t: g * (p.t - vx), x: [p.x[0] + k * v[0], p.x[1] + k * v[1]] }
}

/// `(Δt)² − ‖Δx‖²`.
pub fn interval(p: &SpacetimePoint, q: &SpacetimePoint) -> f64 {
    let dt = p.t - q.t;
    let dx = sub(p.x, q.x);
    dt * dt - dot(dx, dx)
}

/// Frame in which `p`, `q` and `r` share one time coordinate, found by
/// solving `v · (x_p − x_q) = t_p − t_q` and `v · (x_p − x_r) = t_p − t_r`.
pub fn boost_for_simultaneity(p: &SpacetimePoint, q: &SpacetimePoint, r: &SpacetimePoint) -> Result<Frame> {
    for (name, other) in [("q", q), ("r", r)] {
        if interval(p, other) >= 0.0 {
            return Err(Error::NoSubluminalFrame(format!("p is not spacelike to {name}")));
        }
    }
    let d1 = sub(p.x, q.x);
    let d2 = sub(p.x, r.x);
    let (b1, b2) = (p.t - q.t, p.t - r.t);
    let det = d1[0] * d2[1] - d1[1] * d2[0];
    if det.abs() <= 1e-12 * norm(d1) * norm(d2) {
        return Err(Error::NoSubluminalFrame("events are spatially collinear".into()));
    }
    let v = [(b1 * d2[1] - b2 * d1[1]) / det, (d1[0] * b2 - d2[0] * b1) / det];
    Frame::new(v)
}

/// Laboratory positions and the three epochs `t0 < t1 < t2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub x_a: Vec2,
    pub x_b: Vec2,
    pub x_c: Vec2,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
}

impl GeometrySpec {
    pub fn position(&self, site: Site) -> Vec2 {
        match site {
            Site::A => self.x_a,
            Site::B => self.x_b,
            Site::C => self.x_c,
        }
    }

    /// Completion of the friend's measurement at `site`.
    pub fn friend_point(&self, site: Site) -> SpacetimePoint {
        SpacetimePoint::new(self.t1, self.position(site))
    }

    /// Completion of the outsider's measurement at `site`.
    pub fn outsider_point(&self, site: Site) -> SpacetimePoint {
        SpacetimePoint::new(self.t2, self.position(site))
    }
}

/// Equilateral triangle of side `side` centred on the origin, vertex A on
/// the positive y axis, with epochs `0, tau, 2·tau`.
pub fn standard_geometry(side: f64, tau: f64) -> Result<GeometrySpec> {
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::InvalidGeometry(vec![format!("side {side} must be positive")]));
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::InvalidGeometry(vec![format!("tau {tau} must be positive")]));
    }
    if tau >= side {
        return Err(Error::InvalidGeometry(vec![format!("tau_below_side: tau {tau} must be below side {side}")]));
    }
    Ok(triangle_geometry(side, tau))
}

/// The same construction without any validation; pair with
/// [`validate_geometry`] to report what is wrong with a configuration.
pub fn triangle_geometry(side: f64, tau: f64) -> GeometrySpec {
    let r3 = 3f64.sqrt();
    GeometrySpec {
        x_a: [0.0, side / r3],
        x_b: [-side / 2.0, -side / (2.0 * r3)],
        x_c: [side / 2.0, -side / (2.0 * r3)],
        t0: 0.0,
        t1: tau,
        t2: 2.0 * tau,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Runs every geometric condition and reports each by name; nothing is thrown.
pub fn validate_geometry(spec: &GeometrySpec) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let ab = norm(sub(spec.x_a, spec.x_b));
    let bc = norm(sub(spec.x_b, spec.x_c));
    let ca = norm(sub(spec.x_c, spec.x_a));
    let spread = ab.max(bc).max(ca) - ab.min(bc).min(ca);
    out.push(CheckResult::new("equilateral", spread <= LENGTH_TOL, format!("sides {ab}, {bc}, {ca}")));

    let first = spec.t1 - spec.t0;
    let second = spec.t2 - spec.t1;
    out.push(CheckResult::new(
        "equal_epochs",
        first > 0.0 && (first - second).abs() <= simultaneity_tol(spec.t2),
        format!("t1 - t0 = {first}, t2 - t1 = {second}"),
    ));
    out.push(CheckResult::new("tau_below_side", first < ab, format!("t1 - t0 = {first} vs |x_A - x_B| = {ab}")));

    let events = |site: Site| {
        [(format!("friend_{site}"), spec.friend_point(site)), (format!("outsider_{site}"), spec.outsider_point(site))]
    };
    for (i, &s1) in Site::ALL.iter().enumerate() {
        for &s2 in &Site::ALL[i + 1..] {
            for (n1, p1) in events(s1) {
                for (n2, p2) in events(s2) {
                    let iv = interval(&p1, &p2);
                    out.push(CheckResult::new(format!("spacelike({n1}, {n2})"), iv < 0.0, format!("interval {iv}")));
                }
            }
        }
    }
    out
}

/// The rest frame and the three frames in which one outsider's measurement
/// is simultaneous with the friends' measurements at the other two sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    Sigma,
    SigmaP,
    SigmaPp,
    SigmaPpp,
}

impl FrameName {
    pub const ALL: [FrameName; 4] = [FrameName::Sigma, FrameName::SigmaP, FrameName::SigmaPp, FrameName::SigmaPpp];

    pub fn as_str(self) -> &'static str {
        match self {
            FrameName::Sigma => "sigma",
            FrameName::SigmaP => "sigma_p",
            FrameName::SigmaPp => "sigma_pp",
            FrameName::SigmaPpp => "sigma_ppp",
        }
    }

    /// Site whose late event is brought level with the other sites' early ones.
    pub fn leading_site(self) -> Option<Site> {
        match self {
            FrameName::Sigma => None,
            FrameName::SigmaP => Some(Site::A),
            FrameName::SigmaPp => Some(Site::B),
            FrameName::SigmaPpp => Some(Site::C),
        }
    }

    pub fn frame(self, geometry: &GeometrySpec) -> Result<Frame> {
        let Some(lead) = self.leading_site() else {
            return Ok(Frame::rest());
        };
        let others: Vec<Site> = Site::ALL.into_iter().filter(|&s| s != lead).collect();
        let p = SpacetimePoint::new(geometry.t1, geometry.position(lead));
        let q = SpacetimePoint::new(geometry.t0, geometry.position(others[0]));
        let r = SpacetimePoint::new(geometry.t0, geometry.position(others[1]));
        boost_for_simultaneity(&p, &q, &r)
    }
}

impl fmt::Display for FrameName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FrameName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FrameName::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| {
            Error::Config(format!("unknown frame {s:?}; expected sigma, sigma_p, sigma_pp or sigma_ppp"))
        })
    }
}
