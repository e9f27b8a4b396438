//! Equilibrium analysis of an arbitrary 2×2 bimatrix game.
//!
//! Indexing follows the payoff table: `scientist[i][j]` is what a scientist
//! playing `s_{i+1}` earns against a publisher playing `p_{j+1}`, and
//! `publisher[j][i]` is what that publisher earns. Mixed profiles are stored
//! as the probabilities `x` of `s1` and `y` of `p1`.

use std::fmt;

use num::ToPrimitive;
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("degenerate game: the {0} indifference denominator vanishes, no unique interior equilibrium")]
    Degenerate(Player),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Scientist,
    Publisher,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Scientist => "scientist",
            Player::Publisher => "publisher",
        })
    }
}

/// `s1` publishes open access, `s2` publishes conventionally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScientistStrategy {
    OpenAccess,
    Conventional,
}

/// `p1` accepts open access, `p2` declines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PublisherStrategy {
    OpenAccess,
    Closed,
}

impl ScientistStrategy {
    pub const ALL: [Self; 2] = [Self::OpenAccess, Self::Conventional];

    pub fn index(self) -> usize {
        match self {
            Self::OpenAccess => 0,
            Self::Conventional => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::OpenAccess => Self::Conventional,
            Self::Conventional => Self::OpenAccess,
        }
    }
}

impl PublisherStrategy {
    pub const ALL: [Self; 2] = [Self::OpenAccess, Self::Closed];

    pub fn index(self) -> usize {
        match self {
            Self::OpenAccess => 0,
            Self::Closed => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::OpenAccess => Self::Closed,
            Self::Closed => Self::OpenAccess,
        }
    }
}

impl fmt::Display for ScientistStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.index() + 1)
    }
}

impl fmt::Display for PublisherStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.index() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PureProfile {
    pub scientist: ScientistStrategy,
    pub publisher: PublisherStrategy,
}

impl PureProfile {
    pub fn new(scientist: ScientistStrategy, publisher: PublisherStrategy) -> Self {
        Self {
            scientist,
            publisher,
        }
    }

    pub fn all() -> impl Iterator<Item = PureProfile> {
        ScientistStrategy::ALL.into_iter().flat_map(|s| {
            PublisherStrategy::ALL
                .into_iter()
                .map(move |p| PureProfile::new(s, p))
        })
    }
}

impl fmt::Display for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.scientist, self.publisher)
    }
}

/// Probability `x` of `s1` among scientists and `y` of `p1` among publishers.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile<T = f64> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn is_in_unit_square(&self) -> bool {
        let unit = |v: &T| *v >= T::zero() && *v <= T::one();
        unit(&self.x) && unit(&self.y)
    }
}

/// A unilateral switch to a strictly better pure reply.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation<T = f64> {
    pub from: PureProfile,
    pub to: PureProfile,
    pub mover: Player,
    pub gain: T,
}

/// Outcome of alternating strict best replies from `(s1,p1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BestResponseWalk<T = f64> {
    /// The walk closed a loop; `steps` starts and ends at the same profile.
    Cycle { steps: Vec<Deviation<T>> },
    /// Nobody could improve at `profile`; `path` is how the walk got there.
    Equilibrium {
        profile: PureProfile,
        path: Vec<Deviation<T>>,
    },
}

impl<T: fmt::Display> fmt::Display for BestResponseWalk<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BestResponseWalk::Cycle { steps } => {
                if let Some(first) = steps.first() {
                    write!(f, "{}", first.from)?;
                }
                for step in steps {
                    write!(f, " -[{} +{}]-> {}", step.mover, step.gain, step.to)?;
                }
                Ok(())
            }
            BestResponseWalk::Equilibrium { profile, .. } => {
                write!(f, "pure equilibrium {profile}; no cycle")
            }
        }
    }
}

/// The 2×2 payoff pair: scientists (rows `s_i`) and publishers (rows `p_j`).
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame<T = f64> {
    /// `scientist[i][j]` = payoff of `s_{i+1}` against `p_{j+1}`.
    pub scientist: [[T; 2]; 2],
    /// `publisher[j][i]` = payoff of `p_{j+1}` against `s_{i+1}`.
    pub publisher: [[T; 2]; 2],
}

impl<T> BimatrixGame<T> {
    pub fn new(scientist: [[T; 2]; 2], publisher: [[T; 2]; 2]) -> Self {
        Self {
            scientist,
            publisher,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> BimatrixGame<U> {
        let mut m = |rows: &[[T; 2]; 2]| {
            [
                [f(&rows[0][0]), f(&rows[0][1])],
                [f(&rows[1][0]), f(&rows[1][1])],
            ]
        };
        let scientist = m(&self.scientist);
        let publisher = m(&self.publisher);
        BimatrixGame {
            scientist,
            publisher,
        }
    }
}

impl<T: ToPrimitive> BimatrixGame<T> {
    /// Nearest `f64` game; entries that cannot be represented become NaN.
    pub fn to_f64(&self) -> BimatrixGame<f64> {
        self.map(|v| v.to_f64().unwrap_or(f64::NAN))
    }
}

impl BimatrixGame<f64> {
    pub fn is_finite(&self) -> bool {
        self.scientist
            .iter()
            .chain(self.publisher.iter())
            .flatten()
            .all(|v| v.is_finite())
    }
}

impl<T: Scalar> BimatrixGame<T> {
    pub fn scientist_pure_payoff(&self, profile: PureProfile) -> &T {
        &self.scientist[profile.scientist.index()][profile.publisher.index()]
    }

    pub fn publisher_pure_payoff(&self, profile: PureProfile) -> &T {
        &self.publisher[profile.publisher.index()][profile.scientist.index()]
    }

    /// `[a12 - a22, a21 - a11, b22 - b21, b11 - b12]`, the four incentive gaps
    /// whose positivity makes the open-access game cyclic.
    pub fn incentive_differences(&self) -> [T; 4] {
        let a = &self.scientist;
        let b = &self.publisher;
        [
            a[0][1].clone() - a[1][1].clone(),
            a[1][0].clone() - a[0][0].clone(),
            b[1][1].clone() - b[1][0].clone(),
            b[0][0].clone() - b[0][1].clone(),
        ]
    }

    /// Payoff of each scientist strategy against the publisher mixture
    /// `(y, 1 - y)`, i.e. `A ȳ`.
    pub fn scientist_payoff_vector(&self, y: &T) -> [T; 2] {
        let a = &self.scientist;
        let y2 = T::one() - y.clone();
        [
            a[0][0].clone() * y.clone() + a[0][1].clone() * y2.clone(),
            a[1][0].clone() * y.clone() + a[1][1].clone() * y2,
        ]
    }

    /// Payoff of each publisher strategy against the scientist mixture
    /// `(x, 1 - x)`, i.e. `B x̄`.
    pub fn publisher_payoff_vector(&self, x: &T) -> [T; 2] {
        let b = &self.publisher;
        let x2 = T::one() - x.clone();
        [
            b[0][0].clone() * x.clone() + b[0][1].clone() * x2.clone(),
            b[1][0].clone() * x.clone() + b[1][1].clone() * x2,
        ]
    }

    /// `x̄ᵀ A ȳ`.
    pub fn scientist_payoff(&self, profile: &MixedProfile<T>) -> T {
        let [s1, s2] = self.scientist_payoff_vector(&profile.y);
        profile.x.clone() * s1 + (T::one() - profile.x.clone()) * s2
    }

    /// `ȳᵀ B x̄`.
    pub fn publisher_payoff(&self, profile: &MixedProfile<T>) -> T {
        let [p1, p2] = self.publisher_payoff_vector(&profile.x);
        profile.y.clone() * p1 + (T::one() - profile.y.clone()) * p2
    }

    /// The interior equilibrium from the two indifference conditions:
    /// `x0 = (b22 - b12) / ((b22 - b12) + (b11 - b21))` and
    /// `y0 = (a12 - a22) / ((a12 - a22) + (a21 - a11))`.
    pub fn mixed_nash(&self) -> Result<MixedProfile<T>, GameError> {
        let a = &self.scientist;
        let b = &self.publisher;
        let x_num = b[1][1].clone() - b[0][1].clone();
        let x_den = x_num.clone() + b[0][0].clone() - b[1][0].clone();
        let y_num = a[0][1].clone() - a[1][1].clone();
        let y_den = y_num.clone() + a[1][0].clone() - a[0][0].clone();
        if x_den.is_zero() {
            return Err(GameError::Degenerate(Player::Publisher));
        }
        if y_den.is_zero() {
            return Err(GameError::Degenerate(Player::Scientist));
        }
        Ok(MixedProfile::new(x_num / x_den, y_num / y_den))
    }

    /// Closed-form payoffs at the interior equilibrium:
    /// `(a12 a21 - a11 a22) / (a12 - a22 + a21 - a11)` for scientists and
    /// `(b11 b22 - b12 b21) / (b22 - b12 + b11 - b21)` for publishers.
    pub fn equilibrium_payoffs(&self) -> Result<(T, T), GameError> {
        let a = &self.scientist;
        let b = &self.publisher;
        let a_den = a[0][1].clone() - a[1][1].clone() + a[1][0].clone() - a[0][0].clone();
        let b_den = b[1][1].clone() - b[0][1].clone() + b[0][0].clone() - b[1][0].clone();
        if a_den.is_zero() {
            return Err(GameError::Degenerate(Player::Scientist));
        }
        if b_den.is_zero() {
            return Err(GameError::Degenerate(Player::Publisher));
        }
        let a_num = a[0][1].clone() * a[1][0].clone() - a[0][0].clone() * a[1][1].clone();
        let b_num = b[0][0].clone() * b[1][1].clone() - b[0][1].clone() * b[1][0].clone();
        Ok((a_num / a_den, b_num / b_den))
    }

    /// True iff no pure deviation of either player gains more than `tol`.
    /// Checking pure deviations suffices since mixed payoffs are convex
    /// combinations of pure ones.
    pub fn verify_equilibrium(&self, profile: &MixedProfile<T>, tol: &T) -> bool {
        if !profile.is_in_unit_square() {
            return false;
        }
        let scientist_value = self.scientist_payoff(profile) + tol.clone();
        let publisher_value = self.publisher_payoff(profile) + tol.clone();
        let scientist_ok = self
            .scientist_payoff_vector(&profile.y)
            .iter()
            .all(|v| *v <= scientist_value);
        let publisher_ok = self
            .publisher_payoff_vector(&profile.x)
            .iter()
            .all(|v| *v <= publisher_value);
        scientist_ok && publisher_ok
    }

    fn scientist_deviation(&self, at: PureProfile) -> Option<Deviation<T>> {
        let to = PureProfile::new(at.scientist.other(), at.publisher);
        let gain = self.scientist_pure_payoff(to).clone() - self.scientist_pure_payoff(at).clone();
        (gain > T::zero()).then_some(Deviation {
            from: at,
            to,
            mover: Player::Scientist,
            gain,
        })
    }

    fn publisher_deviation(&self, at: PureProfile) -> Option<Deviation<T>> {
        let to = PureProfile::new(at.scientist, at.publisher.other());
        let gain = self.publisher_pure_payoff(to).clone() - self.publisher_pure_payoff(at).clone();
        (gain > T::zero()).then_some(Deviation {
            from: at,
            to,
            mover: Player::Publisher,
            gain,
        })
    }

    /// Pure profiles where neither player strictly gains by switching.
    /// Zero-gain switches do not count, so weak equilibria are included.
    pub fn pure_equilibria(&self) -> Vec<PureProfile> {
        PureProfile::all()
            .filter(|&p| self.scientist_deviation(p).is_none() && self.publisher_deviation(p).is_none())
            .collect()
    }

    /// Alternating strict best replies starting at `(s1,p1)`. When both
    /// players could improve, the scientist moves.
    pub fn best_response_cycle(&self) -> BestResponseWalk<T> {
        let mut visited = Vec::with_capacity(5);
        let mut steps: Vec<Deviation<T>> = Vec::with_capacity(4);
        let mut current = PureProfile::new(ScientistStrategy::OpenAccess, PublisherStrategy::OpenAccess);
        loop {
            if let Some(first) = visited.iter().position(|&p| p == current) {
                return BestResponseWalk::Cycle {
                    steps: steps.split_off(first),
                };
            }
            visited.push(current);
            let step = self
                .scientist_deviation(current)
                .or_else(|| self.publisher_deviation(current));
            match step {
                Some(step) => {
                    current = step.to;
                    steps.push(step);
                }
                None => {
                    return BestResponseWalk::Equilibrium {
                        profile: current,
                        path: steps,
                    }
                }
            }
        }
    }
}
