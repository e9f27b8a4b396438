//! Replicator dynamics of the two populations.
//!
//! With `x` the share of open-access scientists and `y` the share of
//! open-access publishers, the 4-D replicator system collapses to
//!
//! ```text
//! dx/dt = x (1 - x) (a - (a + b) y)
//! dy/dt = y (1 - y) (-c + (c + d) x)
//! ```
//!
//! where `a, b, c, d > 0` are payoff gaps read off the game. Two readings of
//! the publisher gaps exist, selected by [`Convention`].

use std::fmt;
use std::str::FromStr;

use num::ToPrimitive;
use thiserror::Error;

use crate::game::BimatrixGame;
use crate::hamiltonian::{logit, sigmoid, HamiltonianSystem};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("{name} must be positive, got {value}")]
    NonPositiveConstant { name: &'static str, value: String },
    #[error("state ({x}, {y}) is not strictly inside the unit square")]
    NotInterior { x: f64, y: f64 },
    #[error("invalid integration window: dt = {dt}, t_end = {t_end} (both must be finite and positive)")]
    InvalidStep { dt: f64, t_end: f64 },
    #[error("step failure at t = {t}: state left the open unit square or became non-finite; try a smaller dt")]
    StepFailure { t: f64 },
    #[error("the initial state is the fixed point, there is no orbit to time")]
    AtFixedPoint,
    #[error("orbit did not return to the section within t = {cap}")]
    NoReturn { cap: f64 },
}

/// How the publisher payoff vector is formed from the table.
///
/// `Derived` uses `B x` with `B[j][i]` the payoff of `p_j` against `s_i`,
/// giving `c = b22 - b12`, `d = b11 - b21`; its fixed point is the mixed
/// Nash equilibrium of the game for any matrices. `Paper` uses the
/// transposed product `Bᵀ x`, giving `c = b22 - b21`, `d = b11 - b12`.
/// The two agree whenever `b12 == b21`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    Paper,
    #[default]
    Derived,
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Convention::Paper),
            "derived" => Ok(Convention::Derived),
            other => Err(format!("unknown convention `{other}` (expected paper or derived)")),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Derived => "derived",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta in `(x, y)`.
    #[default]
    Rk4,
    /// Störmer–Verlet in logit coordinates, where the system is canonical
    /// and the energy separable.
    LeapfrogLogit,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "leapfrog_logit" | "leapfrog" => Ok(Method::LeapfrogLogit),
            other => Err(format!("unknown method `{other}` (expected rk4 or leapfrog_logit)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::LeapfrogLogit => "leapfrog_logit",
        })
    }
}

/// The positive gaps `(a, b, c, d)` of the planar system.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedConstants<T = f64> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Scalar> ReducedConstants<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, DynamicsError> {
        Self::checked([("a", a), ("b", b), ("c", c), ("d", d)])
    }

    // Written as a negated comparison so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn checked([a, b, c, d]: [(&'static str, T); 4]) -> Result<Self, DynamicsError> {
        for (name, value) in [&a, &b, &c, &d] {
            if !(*value > T::zero()) {
                return Err(DynamicsError::NonPositiveConstant {
                    name,
                    value: value.to_string(),
                });
            }
        }
        Ok(Self {
            a: a.1,
            b: b.1,
            c: c.1,
            d: d.1,
        })
    }

    /// Reads `(a, b, c, d)` off a game. `a = a12 - a22` and `b = a21 - a11`
    /// in both conventions.
    pub fn from_game(game: &BimatrixGame<T>, convention: Convention) -> Result<Self, DynamicsError> {
        let s = &game.scientist;
        let p = &game.publisher;
        let a = s[0][1].clone() - s[1][1].clone();
        let b = s[1][0].clone() - s[0][0].clone();
        let (c, d) = match convention {
            Convention::Derived => (
                ("c = b22 - b12", p[1][1].clone() - p[0][1].clone()),
                ("d = b11 - b21", p[0][0].clone() - p[1][0].clone()),
            ),
            Convention::Paper => (
                ("c = b22 - b21", p[1][1].clone() - p[1][0].clone()),
                ("d = b11 - b12", p[0][0].clone() - p[0][1].clone()),
            ),
        };
        Self::checked([("a = a12 - a22", a), ("b = a21 - a11", b), c, d])
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn c(&self) -> &T {
        &self.c
    }

    pub fn d(&self) -> &T {
        &self.d
    }

    /// The interior zero of the field, `(c / (c + d), a / (a + b))`.
    pub fn fixed_point(&self) -> (T, T) {
        (
            self.c.clone() / (self.c.clone() + self.d.clone()),
            self.a.clone() / (self.a.clone() + self.b.clone()),
        )
    }
}

impl<T: ToPrimitive + Scalar> ReducedConstants<T> {
    pub fn to_f64(&self) -> Result<ReducedConstants<f64>, DynamicsError> {
        let f = |v: &T| v.to_f64().unwrap_or(f64::NAN);
        ReducedConstants::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }
}

impl ReducedConstants<f64> {
    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// A point of the open unit square: `x` open-access scientists, `y`
/// open-access publishers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    x: f64,
    y: f64,
}

impl State {
    pub fn new(x: f64, y: f64) -> Result<Self, DynamicsError> {
        let inside = |v: f64| v > 0.0 && v < 1.0;
        if inside(x) && inside(y) {
            Ok(Self { x, y })
        } else {
            Err(DynamicsError::NotInterior { x, y })
        }
    }

    pub fn from_logit(u: f64, v: f64) -> Result<Self, DynamicsError> {
        Self::new(sigmoid(u), sigmoid(v))
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn distance(&self, other: &State) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn field_xy(k: &ReducedConstants, x: f64, y: f64) -> [f64; 2] {
    [
        x * (1.0 - x) * (k.a - (k.a + k.b) * y),
        y * (1.0 - y) * (-k.c + (k.c + k.d) * x),
    ]
}

/// `(dx/dt, dy/dt)` of the planar system.
pub fn reduced_field(k: &ReducedConstants, s: &State) -> [f64; 2] {
    field_xy(k, s.x, s.y)
}

/// Full replicator velocities `[dx1, dx2, dy1, dy2]` for simplex points
/// `xs` (scientists) and `ys` (publishers):
/// `dx_i = x_i ((A y)_i - xᵀ A y)` and likewise for publishers, whose payoff
/// vector is `B x` or `Bᵀ x` depending on `convention`.
pub fn full_replicator_field(
    game: &BimatrixGame,
    xs: [f64; 2],
    ys: [f64; 2],
    convention: Convention,
) -> [f64; 4] {
    let a = &game.scientist;
    let b = &game.publisher;
    let scientist = [
        a[0][0] * ys[0] + a[0][1] * ys[1],
        a[1][0] * ys[0] + a[1][1] * ys[1],
    ];
    let publisher = match convention {
        Convention::Derived => [
            b[0][0] * xs[0] + b[0][1] * xs[1],
            b[1][0] * xs[0] + b[1][1] * xs[1],
        ],
        Convention::Paper => [
            b[0][0] * xs[0] + b[1][0] * xs[1],
            b[0][1] * xs[0] + b[1][1] * xs[1],
        ],
    };
    let scientist_mean = xs[0] * scientist[0] + xs[1] * scientist[1];
    let publisher_mean = ys[0] * publisher[0] + ys[1] * publisher[1];
    [
        xs[0] * (scientist[0] - scientist_mean),
        xs[1] * (scientist[1] - scientist_mean),
        ys[0] * (publisher[0] - publisher_mean),
        ys[1] * (publisher[1] - publisher_mean),
    ]
}

fn rk4_step(k: &ReducedConstants, x: f64, y: f64, h: f64) -> (f64, f64) {
    let k1 = field_xy(k, x, y);
    let k2 = field_xy(k, x + 0.5 * h * k1[0], y + 0.5 * h * k1[1]);
    let k3 = field_xy(k, x + 0.5 * h * k2[0], y + 0.5 * h * k2[1]);
    let k4 = field_xy(k, x + h * k3[0], y + h * k3[1]);
    (
        x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )
}

/// One integrator's running state. Leapfrog keeps logit coordinates so the
/// sigmoid keeps every emitted point inside the square.
#[derive(Debug, Clone, Copy)]
enum Stepper {
    Rk4 { x: f64, y: f64 },
    Leapfrog { u: f64, v: f64 },
}

impl Stepper {
    fn new(method: Method, s: &State) -> Self {
        match method {
            Method::Rk4 => Stepper::Rk4 { x: s.x, y: s.y },
            Method::LeapfrogLogit => Stepper::Leapfrog {
                u: logit(s.x),
                v: logit(s.y),
            },
        }
    }

    /// du/dt = a - (a + b) σ(v), dv/dt = -c + (c + d) σ(u); half drift in
    /// `u`, full kick in `v`, half drift in `u`.
    fn advance(&self, k: &ReducedConstants, h: f64) -> Self {
        match *self {
            Stepper::Rk4 { x, y } => {
                let (x, y) = rk4_step(k, x, y, h);
                Stepper::Rk4 { x, y }
            }
            Stepper::Leapfrog { u, v } => {
                let du = |v: f64| k.a - (k.a + k.b) * sigmoid(v);
                let dv = |u: f64| -k.c + (k.c + k.d) * sigmoid(u);
                let u = u + 0.5 * h * du(v);
                let v = v + h * dv(u);
                let u = u + 0.5 * h * du(v);
                Stepper::Leapfrog { u, v }
            }
        }
    }

    fn state(&self) -> Option<State> {
        match *self {
            Stepper::Rk4 { x, y } => State::new(x, y).ok(),
            Stepper::Leapfrog { u, v } => {
                if u.is_finite() && v.is_finite() {
                    State::from_logit(u, v).ok()
                } else {
                    None
                }
            }
        }
    }

    fn energy(&self, sys: &HamiltonianSystem, s: &State) -> f64 {
        match *self {
            Stepper::Rk4 { .. } => sys.energy(s),
            Stepper::Leapfrog { u, v } => sys.energy_logit(u, v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    /// Hamiltonian value at `state`.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub method: Method,
    pub dt: f64,
}

impl Trajectory {
    /// `max H - min H` over the samples.
    pub fn energy_range(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.energy), hi.max(s.energy))
            });
        hi - lo
    }

    /// `max |H(t) - H(0)|`.
    pub fn max_energy_deviation(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|s| (s.energy - first.energy).abs())
            .fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// Number of whole steps of size `dt` that fit in `t_end`, forgiving the
/// rounding in `t_end / dt`.
fn step_count(t_end: f64, dt: f64) -> usize {
    let ratio = t_end / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.floor() as usize
    }
}

fn check_window(dt: f64, t_end: f64) -> Result<(), DynamicsError> {
    if dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end > 0.0 {
        Ok(())
    } else {
        Err(DynamicsError::InvalidStep { dt, t_end })
    }
}

/// Integrates from `s0`, sampling at `t = n dt` for every `n dt <= t_end`
/// (including `t = 0`).
pub fn integrate(
    k: &ReducedConstants,
    s0: State,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory, DynamicsError> {
    check_window(dt, t_end)?;
    let sys = HamiltonianSystem::new(k.clone());
    let steps = step_count(t_end, dt);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut stepper = Stepper::new(method, &s0);
    samples.push(Sample {
        t: 0.0,
        state: s0,
        energy: stepper.energy(&sys, &s0),
    });
    for n in 1..=steps {
        let t = n as f64 * dt;
        stepper = stepper.advance(k, dt);
        let state = stepper.state().ok_or(DynamicsError::StepFailure { t })?;
        samples.push(Sample {
            t,
            state,
            energy: stepper.energy(&sys, &state),
        });
    }
    Ok(Trajectory {
        samples,
        method,
        dt,
    })
}

/// State at an arbitrary time `t`: whole steps of `dt`, then one shorter
/// step for the remainder.
pub fn state_at(
    k: &ReducedConstants,
    s0: State,
    t: f64,
    dt: f64,
    method: Method,
) -> Result<State, DynamicsError> {
    check_window(dt, t)?;
    let whole = (t / dt).floor() as usize;
    let mut stepper = Stepper::new(method, &s0);
    for n in 1..=whole {
        stepper = stepper.advance(k, dt);
        if stepper.state().is_none() {
            return Err(DynamicsError::StepFailure { t: n as f64 * dt });
        }
    }
    let rest = t - whole as f64 * dt;
    if rest > 0.0 {
        stepper = stepper.advance(k, rest);
    }
    stepper.state().ok_or(DynamicsError::StepFailure { t })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    /// Time between two successive returns to the section.
    pub period: f64,
    /// Time of the first return.
    pub crossing_time: f64,
    /// State at the first return; restarting here reproduces the period.
    pub crossing: State,
}

/// Period of the closed orbit through `s0`, measured on the half-line from
/// the fixed point through `s0`. Angular velocity about the fixed point is
/// positive everywhere off it, so every orbit crosses this section
/// transversally, once per revolution and counterclockwise.
pub fn estimate_period(
    k: &ReducedConstants,
    s0: State,
    dt: f64,
) -> Result<PeriodEstimate, DynamicsError> {
    let omega = HamiltonianSystem::new(k.clone()).linearized_frequency();
    let cap = 200.0 * std::f64::consts::TAU / omega;
    estimate_period_with(k, s0, dt, cap)
}

/// [`estimate_period`] with an explicit integration time cap.
pub fn estimate_period_with(
    k: &ReducedConstants,
    s0: State,
    dt: f64,
    max_time: f64,
) -> Result<PeriodEstimate, DynamicsError> {
    check_window(dt, max_time)?;
    let (px, py) = k.fixed_point();
    let (rx, ry) = (s0.x - px, s0.y - py);
    if rx.hypot(ry) <= 1e-14 {
        return Err(DynamicsError::AtFixedPoint);
    }
    // Signed distance-like coordinate across the ray; negative just before
    // a counterclockwise crossing.
    let across = |x: f64, y: f64| rx * (y - py) - ry * (x - px);
    let along = |x: f64, y: f64| rx * (x - px) + ry * (y - py);

    let mut crossings: Vec<(f64, f64, f64)> = Vec::with_capacity(2);
    let (mut x, mut y) = (s0.x, s0.y);
    let mut g = across(x, y);
    let mut n = 0usize;
    while crossings.len() < 2 {
        let t = n as f64 * dt;
        if t > max_time {
            return Err(DynamicsError::NoReturn { cap: max_time });
        }
        let (nx, ny) = rk4_step(k, x, y, dt);
        if !(nx.is_finite() && ny.is_finite()) || State::new(nx, ny).is_err() {
            return Err(DynamicsError::StepFailure { t: t + dt });
        }
        let ng = across(nx, ny);
        if g < 0.0 && ng >= 0.0 && along(nx, ny) > 0.0 {
            let tau = refine_crossing(|h| {
                let (cx, cy) = rk4_step(k, x, y, h);
                across(cx, cy)
            }, g, ng, dt);
            let (cx, cy) = rk4_step(k, x, y, tau);
            crossings.push((t + tau, cx, cy));
        }
        x = nx;
        y = ny;
        g = ng;
        n += 1;
    }
    let (t1, cx, cy) = crossings[0];
    let (t2, _, _) = crossings[1];
    Ok(PeriodEstimate {
        period: t2 - t1,
        crossing_time: t1,
        crossing: State::new(cx, cy)?,
    })
}

/// Root of `g(h)` on `[0, dt]` given `g(0) < 0 <= g(dt)`: linear
/// interpolation first, then Illinois-modified regula falsi.
fn refine_crossing(g: impl Fn(f64) -> f64, g_lo: f64, g_hi: f64, dt: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, dt);
    let (mut f_lo, mut f_hi) = (g_lo, g_hi);
    if f_hi == 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for _ in 0..100 {
        let mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        let f_mid = g(mid);
        if f_mid == 0.0 || hi - lo <= 4.0 * f64::EPSILON * dt {
            return mid;
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    if f_lo.abs() < f_hi.abs() {
        lo
    } else {
        hi
    }
}
