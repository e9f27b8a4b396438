//! Hamiltonian structure of the planar replicator system.
//!
//! On the open square with area form `(1/phi) dx ∧ dy`,
//! `phi = x y (1 - x) (1 - y)`, the replicator flow is generated by
//!
//! ```text
//! H(x, y) = c ln x + d ln(1 - x) + a ln y + b ln(1 - y)
//! ```
//!
//! via `X_H = (phi ∂H/∂y, -phi ∂H/∂x)`. `H` is strictly concave with a single
//! maximum at the mixed equilibrium and tends to `-∞` at the boundary, so its
//! level sets are closed curves that are star-shaped about the maximum.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::dynamics::{ReducedConstants, State};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelCurveError {
    #[error("level {level} is above the maximum {max} of H")]
    AboveMaximum { level: f64, max: f64 },
    #[error("level must be finite, got {0}")]
    NonFinite(f64),
    #[error("resolution must be at least 16, got {0}")]
    ResolutionTooSmall(usize),
    #[error("ray at angle {angle} reached the boundary before H dropped to the level")]
    NoBracket { angle: f64 },
}

pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

pub fn logit(x: f64) -> f64 {
    x.ln() - (-x).ln_1p()
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// `x y (1 - x) (1 - y)`, in `(0, 1/16]` on the open square.
pub fn phi(s: &State) -> f64 {
    let (x, y) = (s.x(), s.y());
    x * y * (1.0 - x) * (1.0 - y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSystem {
    k: ReducedConstants,
}

impl HamiltonianSystem {
    pub fn new(k: ReducedConstants) -> Self {
        Self { k }
    }

    pub fn constants(&self) -> &ReducedConstants {
        &self.k
    }

    fn abcd(&self) -> [f64; 4] {
        self.k.as_array()
    }

    /// `H(x, y)`. `1 - x` is exact in binary floating point for
    /// `x ∈ [1/2, 1)` and `ln_1p` covers small `x`, so no reformulation is
    /// needed near the edges.
    pub fn energy(&self, s: &State) -> f64 {
        let [a, b, c, d] = self.abcd();
        let (x, y) = (s.x(), s.y());
        c * x.ln() + d * (-x).ln_1p() + a * y.ln() + b * (-y).ln_1p()
    }

    /// `H` in logit coordinates `u = ln(x/(1-x))`, `v = ln(y/(1-y))`.
    pub fn energy_logit(&self, u: f64, v: f64) -> f64 {
        let [scientist, publisher] = self.separable_terms(u, v);
        scientist + publisher
    }

    /// `[F(u), G(v)]` with `F(u) = -c ln(1 + e^-u) - d ln(1 + e^u)` and
    /// `G(v) = -a ln(1 + e^-v) - b ln(1 + e^v)`; `H = F + G`.
    pub fn separable_terms(&self, u: f64, v: f64) -> [f64; 2] {
        let [a, b, c, d] = self.abcd();
        [
            -c * softplus(-u) - d * softplus(u),
            -a * softplus(-v) - b * softplus(v),
        ]
    }

    /// `(∂H/∂x, ∂H/∂y)`.
    pub fn gradient(&self, s: &State) -> [f64; 2] {
        let [a, b, c, d] = self.abcd();
        let (x, y) = (s.x(), s.y());
        [c / x - d / (1.0 - x), a / y - b / (1.0 - y)]
    }

    /// Diagonal Hessian of `H` at any point (the mixed partials vanish).
    pub fn hessian(&self, s: &State) -> [[f64; 2]; 2] {
        let [a, b, c, d] = self.abcd();
        let (x, y) = (s.x(), s.y());
        let (x1, y1) = (1.0 - x, 1.0 - y);
        [
            [-c / (x * x) - d / (x1 * x1), 0.0],
            [0.0, -a / (y * y) - b / (y1 * y1)],
        ]
    }

    /// `X_H = (phi ∂H/∂y, -phi ∂H/∂x)`; identical to the replicator field.
    pub fn vector_field(&self, s: &State) -> [f64; 2] {
        let w = phi(s);
        let [hx, hy] = self.gradient(s);
        [w * hy, -w * hx]
    }

    /// The maximum of `H`, `(c/(c+d), a/(a+b))`.
    pub fn critical_point(&self) -> State {
        let (x0, y0) = self.k.fixed_point();
        State::new(x0, y0).expect("fixed point of positive constants is interior")
    }

    pub fn max_energy(&self) -> f64 {
        self.energy(&self.critical_point())
    }

    /// `diag(-(c+d)³/(cd), -(a+b)³/(ab))`.
    pub fn hessian_at_critical(&self) -> [[f64; 2]; 2] {
        let [a, b, c, d] = self.abcd();
        [
            [-(c + d).powi(3) / (c * d), 0.0],
            [0.0, -(a + b).powi(3) / (a * b)],
        ]
    }

    /// Angular frequency of small oscillations about the maximum,
    /// `phi(x0, y0) sqrt(Hxx Hyy) = sqrt(abcd / ((a+b)(c+d)))`.
    pub fn linearized_frequency(&self) -> f64 {
        let [a, b, c, d] = self.abcd();
        (a * b * c * d / ((a + b) * (c + d))).sqrt()
    }

    /// Traces `{H = level}` by marching `resolution` equally spaced rays out
    /// of the maximum and bisecting each for the crossing. Concavity makes
    /// `H` strictly decreasing along every such ray.
    pub fn level_curve(&self, level: f64, resolution: usize) -> Result<LevelCurve, LevelCurveError> {
        if !level.is_finite() {
            return Err(LevelCurveError::NonFinite(level));
        }
        if resolution < 16 {
            return Err(LevelCurveError::ResolutionTooSmall(resolution));
        }
        let centre = self.critical_point();
        let max = self.energy(&centre);
        if level > max {
            return Err(LevelCurveError::AboveMaximum { level, max });
        }
        if level == max {
            return Ok(LevelCurve {
                level,
                points: vec![centre, centre],
            });
        }
        let mut points = (0..resolution)
            .map(|i| self.ray_crossing(&centre, level, TAU * i as f64 / resolution as f64))
            .collect::<Result<Vec<_>, _>>()?;
        points.push(points[0]);
        Ok(LevelCurve { level, points })
    }

    fn ray_crossing(&self, centre: &State, level: f64, angle: f64) -> Result<State, LevelCurveError> {
        let (dx, dy) = (angle.cos(), angle.sin());
        let (px, py) = (centre.x(), centre.y());
        let limit = |p: f64, d: f64| {
            if d > 1e-15 {
                (1.0 - p) / d
            } else if d < -1e-15 {
                p / -d
            } else {
                f64::INFINITY
            }
        };
        let r_max = limit(px, dx).min(limit(py, dy));
        let at = |r: f64| State::new(px + r * dx, py + r * dy).ok();
        let energy_at = |r: f64| at(r).map(|s| self.energy(&s));

        let mut lo = 0.0;
        let mut hi = 0.5 * r_max;
        loop {
            match energy_at(hi) {
                Some(h) if h < level => break,
                Some(_) => {
                    lo = hi;
                    let next = 0.5 * (hi + r_max);
                    if next <= hi {
                        return Err(LevelCurveError::NoBracket { angle });
                    }
                    hi = next;
                }
                None => return Err(LevelCurveError::NoBracket { angle }),
            }
        }
        // Bisect to exhaustion; the radius tolerance is far below 1e-12.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match energy_at(mid) {
                Some(h) if h >= level => lo = mid,
                _ => hi = mid,
            }
        }
        let err = |r: f64| energy_at(r).map_or(f64::INFINITY, |h| (h - level).abs());
        let r = if err(lo) <= err(hi) { lo } else { hi };
        let vertex = at(r).ok_or(LevelCurveError::NoBracket { angle })?;
        Ok(self.polish(vertex, level))
    }

    /// Near the edge, `centre + r·dir` cannot resolve the tiny coordinate
    /// finely enough; Newton steps along the steeper axis fix the residual.
    fn polish(&self, mut vertex: State, level: f64) -> State {
        let mut residual = self.energy(&vertex) - level;
        for _ in 0..4 {
            if residual.abs() <= 1e-13 {
                break;
            }
            let [gx, gy] = self.gradient(&vertex);
            let moved = if gx.abs() >= gy.abs() {
                State::new(vertex.x() - residual / gx, vertex.y())
            } else {
                State::new(vertex.x(), vertex.y() - residual / gy)
            };
            match moved {
                Ok(next) if (self.energy(&next) - level).abs() < residual.abs() => {
                    vertex = next;
                    residual = self.energy(&next) - level;
                }
                _ => break,
            }
        }
        vertex
    }
}

/// A closed polyline on `{H = level}`; the last vertex repeats the first.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<State>,
}

impl LevelCurve {
    pub fn is_closed(&self) -> bool {
        match (self.points.first(), self.points.last()) {
            (Some(first), Some(last)) => self.points.len() >= 2 && first == last,
            _ => false,
        }
    }

    /// Number of counterclockwise turns the polyline makes about `centre`.
    pub fn winding_number(&self, centre: &State) -> i64 {
        let angle = |s: &State| (s.y() - centre.y()).atan2(s.x() - centre.x());
        let total: f64 = self
            .points
            .windows(2)
            .map(|w| {
                let mut d = angle(&w[1]) - angle(&w[0]);
                if d > std::f64::consts::PI {
                    d -= TAU;
                } else if d < -std::f64::consts::PI {
                    d += TAU;
                }
                d
            })
            .sum();
        (total / TAU).round() as i64
    }

    /// Largest `|H(vertex) - level|`.
    pub fn max_level_error(&self, sys: &HamiltonianSystem) -> f64 {
        self.points
            .iter()
            .map(|p| (sys.energy(p) - self.level).abs())
            .fold(0.0, f64::max)
    }
}
