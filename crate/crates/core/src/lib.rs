//! The scientists-vs-publishers open-access game as an evolutionary bimatrix
//! system.
//!
//! The crate is layered bottom-up:
//!
//! * [`payoff`] validates the seven economic parameters and builds the payoff
//!   matrices of the two populations.
//! * [`game`] analyses any 2×2 bimatrix game: the interior mixed equilibrium,
//!   pure equilibria and the best-response cycle.
//! * [`dynamics`] holds the replicator equations, their planar reduction and
//!   the integrators (classical RK4 and a leapfrog scheme in logit
//!   coordinates), plus period estimation on a Poincaré section.
//! * [`hamiltonian`] exposes the conserved energy, the area form weight `phi`,
//!   the Hamiltonian vector field and level-curve extraction.
//! * [`portrait`] and [`export`] turn level curves and trajectories into
//!   SVG/CSV.
//!
//! Closed-form quantities (payoffs, equilibria, fixed points) are generic over
//! [`Scalar`], so they can be evaluated either in `f64` or exactly in
//! [`Rational`].

pub mod dynamics;
pub mod export;
pub mod game;
pub mod hamiltonian;
pub mod payoff;
pub mod portrait;

use std::fmt::{Debug, Display};

pub use dynamics::{
    estimate_period, full_replicator_field, integrate, reduced_field, Convention, DynamicsError,
    Method, PeriodEstimate, ReducedConstants, Sample, State, Trajectory,
};
pub use game::{
    BestResponseWalk, BimatrixGame, Deviation, GameError, MixedProfile, Player, PublisherStrategy,
    PureProfile, ScientistStrategy,
};
pub use hamiltonian::{phi, HamiltonianSystem, LevelCurve, LevelCurveError};
pub use payoff::{
    payoff_matrices, validate, validate_with, Constraint, InvalidParameters, OpenAccessParameters,
    ValidationReport,
};
pub use portrait::{Portrait, PortraitOptions};

/// Arbitrary-precision rational used for exact closed-form evaluation.
pub type Rational = num::BigRational;

/// Number types the closed-form layer works over (`f64`, [`Rational`], ...).
pub trait Scalar: Clone + PartialOrd + Debug + Display + num::Num {}

impl<T: Clone + PartialOrd + Debug + Display + num::Num> Scalar for T {}

pub(crate) fn two<T: Scalar>() -> T {
    T::one() + T::one()
}
