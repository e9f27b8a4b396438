//! Phase portraits: nested level curves of `H` around the equilibrium,
//! rendered to a fixed 600×600 SVG.

use std::fmt::Write as _;

use crate::dynamics::State;
use crate::hamiltonian::{HamiltonianSystem, LevelCurve, LevelCurveError};

const SIZE: f64 = 600.0;
const STROKES: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Levels run from `max - top_offset` down to `max - bottom_offset` in
/// equal steps of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortraitOptions {
    pub curves: usize,
    pub top_offset: f64,
    pub bottom_offset: f64,
    pub resolution: usize,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            curves: 8,
            top_offset: 0.25,
            bottom_offset: 6.0,
            resolution: 256,
        }
    }
}

impl PortraitOptions {
    pub fn levels(&self, max_energy: f64) -> Vec<f64> {
        match self.curves {
            0 => Vec::new(),
            1 => vec![max_energy - self.top_offset],
            n => {
                let step = (self.bottom_offset - self.top_offset) / (n - 1) as f64;
                (0..n)
                    .map(|i| max_energy - self.top_offset - step * i as f64)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub critical: State,
    pub max_energy: f64,
    pub curves: Vec<LevelCurve>,
}

impl Portrait {
    pub fn build(sys: &HamiltonianSystem, options: &PortraitOptions) -> Result<Self, LevelCurveError> {
        let max_energy = sys.max_energy();
        let curves = options
            .levels(max_energy)
            .into_iter()
            .map(|level| sys.level_curve(level, options.resolution))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            critical: sys.critical_point(),
            max_energy,
            curves,
        })
    }

    /// SVG with the unit square mapped onto the viewbox (`y` up). The output
    /// depends only on the portrait, so equal inputs give identical bytes.
    pub fn to_svg(&self, sys: &HamiltonianSystem) -> String {
        let [a, b, c, d] = sys.constants().as_array();
        let px = |s: &State| (s.x() * SIZE, (1.0 - s.y()) * SIZE);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#
        );
        let levels: Vec<String> = self.curves.iter().map(|c| c.level.to_string()).collect();
        let _ = writeln!(
            out,
            "<desc>level curves of H; a={a} b={b} c={c} d={d}; levels {}</desc>",
            levels.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="600" height="600" fill="white" stroke="black" stroke-width="1"/>"#
        );
        for (i, curve) in self.curves.iter().enumerate() {
            let mut d_attr = String::new();
            for (j, p) in curve.points.iter().enumerate() {
                let (x, y) = px(p);
                let _ = write!(d_attr, "{}{x:.3},{y:.3} ", if j == 0 { "M" } else { "L" });
            }
            d_attr.push('Z');
            let _ = writeln!(
                out,
                r#"<path d="{d_attr}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                STROKES[i % STROKES.len()]
            );
        }
        let (cx, cy) = px(&self.critical);
        let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="black"/>"#);
        out.push_str("</svg>\n");
        out
    }
}
