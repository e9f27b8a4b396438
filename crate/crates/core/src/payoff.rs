//! Economic parameters of the open-access game and the payoff table built
//! from them.

use std::fmt;

use num::ToPrimitive;
use thiserror::Error;

use crate::game::BimatrixGame;
use crate::{two, Scalar};

/// The seven dimensionless utilities driving both populations' payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenAccessParameters<T = f64> {
    /// `R`: reputation a scientist is awarded for publishing.
    pub reputation: T,
    /// `r`: reputation lost by publishing open access.
    pub reputation_loss: T,
    /// `I`: impact payoff shared by scientist and publisher.
    pub impact: T,
    /// `iota`: impact lost when the journal is not openly available.
    pub impact_loss: T,
    /// `L`: cost of running open access.
    pub open_access_cost: T,
    /// `G`: moderate journal price.
    pub journal_price: T,
    /// `P`: exorbitant profit of closed journals.
    pub excess_profit: T,
}

impl<T> OpenAccessParameters<T> {
    /// Keys in the order `R, r, I, iota, L, G, P`.
    pub const KEYS: [&'static str; 7] = ["R", "r", "I", "iota", "L", "G", "P"];

    pub fn from_array([r_big, r_small, i_big, iota, l, g, p]: [T; 7]) -> Self {
        Self {
            reputation: r_big,
            reputation_loss: r_small,
            impact: i_big,
            impact_loss: iota,
            open_access_cost: l,
            journal_price: g,
            excess_profit: p,
        }
    }

    pub fn as_array(&self) -> [&T; 7] {
        [
            &self.reputation,
            &self.reputation_loss,
            &self.impact,
            &self.impact_loss,
            &self.open_access_cost,
            &self.journal_price,
            &self.excess_profit,
        ]
    }
}

impl<T: ToPrimitive> OpenAccessParameters<T> {
    pub fn to_f64(&self) -> OpenAccessParameters<f64> {
        let v = self.as_array().map(|x| x.to_f64().unwrap_or(f64::NAN));
        OpenAccessParameters::from_array(v)
    }
}

/// A named inequality on the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    ReputationPositive,
    ReputationLossInRange,
    ImpactPositive,
    ImpactLossInRange,
    ImpactLossBelowReputationLoss,
    CostsPositive,
    /// `G + P - L > r - iota`: closed journals are profitable enough.
    Profit,
    /// `G + I > L/2`; optional, keeps the publisher's open-access gap positive.
    PublisherMargin,
}

impl Constraint {
    pub const BASE: [Constraint; 7] = [
        Constraint::ReputationPositive,
        Constraint::ReputationLossInRange,
        Constraint::ImpactPositive,
        Constraint::ImpactLossInRange,
        Constraint::ImpactLossBelowReputationLoss,
        Constraint::CostsPositive,
        Constraint::Profit,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Constraint::ReputationPositive => "R > 0",
            Constraint::ReputationLossInRange => "0 < r < R",
            Constraint::ImpactPositive => "I > 0",
            Constraint::ImpactLossInRange => "0 < iota < I",
            Constraint::ImpactLossBelowReputationLoss => "iota < r",
            Constraint::CostsPositive => "L > 0, G > 0, P > 0",
            Constraint::Profit => "G + P - L > r - iota",
            Constraint::PublisherMargin => "G + I > L/2",
        }
    }

    /// Strict check; comparisons against NaN fail, so non-finite input is
    /// always reported.
    pub fn holds<T: Scalar>(self, p: &OpenAccessParameters<T>) -> bool {
        let zero = T::zero();
        let positive = |v: &T| *v > zero;
        match self {
            Constraint::ReputationPositive => positive(&p.reputation),
            Constraint::ReputationLossInRange => {
                positive(&p.reputation_loss) && p.reputation_loss < p.reputation
            }
            Constraint::ImpactPositive => positive(&p.impact),
            Constraint::ImpactLossInRange => positive(&p.impact_loss) && p.impact_loss < p.impact,
            Constraint::ImpactLossBelowReputationLoss => p.impact_loss < p.reputation_loss,
            Constraint::CostsPositive => {
                positive(&p.open_access_cost)
                    && positive(&p.journal_price)
                    && positive(&p.excess_profit)
            }
            Constraint::Profit => {
                p.journal_price.clone() + p.excess_profit.clone() - p.open_access_cost.clone()
                    > p.reputation_loss.clone() - p.impact_loss.clone()
            }
            Constraint::PublisherMargin => {
                p.journal_price.clone() + p.impact.clone() > p.open_access_cost.clone() / two()
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Pass/fail for every checked constraint, in check order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<(Constraint, bool)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn violations(&self) -> Vec<Constraint> {
        self.checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(c, _)| *c)
            .collect()
    }

    pub fn satisfied(&self) -> usize {
        self.checks.iter().filter(|(_, ok)| *ok).count()
    }

    pub fn total(&self) -> usize {
        self.checks.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, ok) in &self.checks {
            writeln!(f, "[{}] {}", if *ok { "pass" } else { "FAIL" }, c)?;
        }
        write!(f, "{}/{} constraints satisfied", self.satisfied(), self.total())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid open-access parameters, violated: {}", .report.violations().iter().map(|c| c.label()).collect::<Vec<_>>().join("; "))]
pub struct InvalidParameters {
    pub report: ValidationReport,
}

pub fn validate<T: Scalar>(params: &OpenAccessParameters<T>) -> ValidationReport {
    validate_with(params, false)
}

/// Like [`validate`], optionally also requiring [`Constraint::PublisherMargin`].
pub fn validate_with<T: Scalar>(
    params: &OpenAccessParameters<T>,
    require_publisher_margin: bool,
) -> ValidationReport {
    let extra = require_publisher_margin.then_some(Constraint::PublisherMargin);
    let checks = Constraint::BASE
        .into_iter()
        .chain(extra)
        .map(|c| (c, c.holds(params)))
        .collect();
    ValidationReport { checks }
}

/// Builds the payoff table. The publisher earns nothing when a scientist
/// goes open access alone, so `publisher[1][0]` is always zero.
pub fn payoff_matrices<T: Scalar>(
    params: &OpenAccessParameters<T>,
) -> Result<BimatrixGame<T>, InvalidParameters> {
    let report = validate(params);
    if !report.is_ok() {
        return Err(InvalidParameters { report });
    }
    Ok(payoff_table(params))
}

fn payoff_table<T: Scalar>(p: &OpenAccessParameters<T>) -> BimatrixGame<T> {
    let big_r = p.reputation.clone();
    let small_r = p.reputation_loss.clone();
    let impact = p.impact.clone();
    let reduced_impact = impact.clone() - p.impact_loss.clone();
    let l = p.open_access_cost.clone();
    let half_l = l.clone() / two();
    let g = p.journal_price.clone();
    let profit = p.excess_profit.clone();

    let oa_reputation = big_r.clone() - small_r;
    let scientist = [
        [
            oa_reputation.clone() + impact.clone() - half_l.clone() - g.clone(),
            oa_reputation + impact.clone() - l.clone(),
        ],
        [
            big_r.clone() + reduced_impact.clone() - g.clone(),
            big_r + reduced_impact.clone() - g.clone() - profit.clone(),
        ],
    ];
    let publisher = [
        [
            g.clone() + impact - half_l,
            g.clone() + reduced_impact.clone() - l,
        ],
        [T::zero(), g + reduced_impact + profit],
    ];
    BimatrixGame::new(scientist, publisher)
}
