//! CSV encodings of trajectories and level curves.
//!
//! Numbers are written with 17 significant digits in scientific notation, so
//! every value round-trips to the same `f64` regardless of locale.

use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::hamiltonian::LevelCurve;

pub const TRAJECTORY_HEADER: &str = "t,x,y,H";
pub const CURVE_HEADER: &str = "x,y";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for s in &tr.samples {
        writeln!(
            w,
            "{},{},{},{}",
            num(s.t),
            num(s.state.x()),
            num(s.state.y()),
            num(s.energy)
        )?;
    }
    Ok(())
}

pub fn write_level_curve_csv<W: Write>(curve: &LevelCurve, mut w: W) -> io::Result<()> {
    writeln!(w, "{CURVE_HEADER}")?;
    for p in &curve.points {
        writeln!(w, "{},{}", num(p.x()), num(p.y()))?;
    }
    Ok(())
}

/// Reads `t,x,y,H` rows back.
pub fn read_trajectory_csv<R: BufRead>(r: R) -> Result<Vec<[f64; 4]>, ExportError> {
    let mut lines = r.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim() == TRAJECTORY_HEADER => {}
        other => {
            return Err(ExportError::Parse {
                line: 1,
                message: format!("expected header `{TRAJECTORY_HEADER}`, found {other:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse_err = |message: String| ExportError::Parse {
            line: i + 2,
            message,
        };
        if fields.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, found {}", fields.len())));
        }
        let mut row = [0.0; 4];
        for (slot, field) in row.iter_mut().zip(&fields) {
            *slot = field
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("`{field}`: {e}")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Energy statistics of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySummary {
    pub samples: usize,
    pub t_end: f64,
    pub energy_min: f64,
    pub energy_max: f64,
    /// `max H - min H`.
    pub drift: f64,
    /// `max |H(t) - H(0)|`.
    pub max_deviation: f64,
}

impl TrajectorySummary {
    pub fn from_rows(rows: &[[f64; 4]]) -> Self {
        let h0 = rows.first().map_or(0.0, |r| r[3]);
        let (lo, hi, dev) = rows.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, 0.0f64),
            |(lo, hi, dev), r| (lo.min(r[3]), hi.max(r[3]), dev.max((r[3] - h0).abs())),
        );
        Self {
            samples: rows.len(),
            t_end: rows.last().map_or(0.0, |r| r[0]),
            energy_min: lo,
            energy_max: hi,
            drift: hi - lo,
            max_deviation: dev,
        }
    }

    pub fn from_trajectory(tr: &Trajectory) -> Self {
        let rows: Vec<[f64; 4]> = tr
            .samples
            .iter()
            .map(|s| [s.t, s.state.x(), s.state.y(), s.energy])
            .collect();
        Self::from_rows(&rows)
    }
}

impl fmt::Display for TrajectorySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "samples={} t_end={} H_min={} H_max={} drift={} max_dev={}",
            self.samples, self.t_end, self.energy_min, self.energy_max, self.drift, self.max_deviation
        )
    }
}
