//! Domain types for the rod-connected double-prism system.
//!
//! Each prism is an `n`-sided die with two opposed low-friction `+` faces and
//! `n - 2` high-friction `-` faces. A roll always ends on a `+` face unless the
//! two prisms are rolled together while joined by the rod, in which case the
//! pair comes to rest in one of `n` joint orientations. [`FaceLayout`] fixes
//! which joint orientations show `+` on either prism.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Validated model parameters `(n, epsilon, rho)`.
///
/// * `n`: number of rectangular faces per prism, even and at least 4.
/// * `epsilon`: probability that the experimenters fail to steer a joint roll
///   to the prepared target, falling back to a uniformly random orientation.
/// * `rho`: probability that the rod stays glued during the `ab` experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    n: u32,
    epsilon: f64,
    rho: f64,
}

impl ModelParams {
    pub fn new(n: u32, epsilon: f64, rho: f64) -> Result<Self> {
        validate_params(i64::from(n), epsilon, rho)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.n, epsilon, self.rho)
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self::new(self.n, self.epsilon, rho)
    }
}

/// Checks raw values against the parameter domain.
///
/// The face count is taken as a signed integer so callers parsing user input
/// get a domain error (rather than a conversion error) for negative values.
pub fn validate_params(n: i64, epsilon: f64, rho: f64) -> Result<ModelParams> {
    let n = validate_face_count(n)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(ModelError::EpsilonOutOfRange(epsilon));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(ModelError::RhoOutOfRange(rho));
    }
    Ok(ModelParams { n, epsilon, rho })
}

fn validate_face_count(n: i64) -> Result<u32> {
    if n % 2 != 0 {
        return Err(ModelError::OddFaceCount(n));
    }
    if n < 4 {
        return Err(ModelError::TooFewFaces(n));
    }
    u32::try_from(n).map_err(|_| ModelError::TooFewFaces(n))
}

/// Symbol printed on a rectangular face. `Plus` reads as outcome `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    Plus,
    Minus,
}

impl Face {
    pub const fn value(self) -> i8 {
        match self {
            Face::Plus => 1,
            Face::Minus => -1,
        }
    }

    pub fn from_value(value: i8) -> Option<Self> {
        match value {
            1 => Some(Face::Plus),
            -1 => Some(Face::Minus),
            _ => None,
        }
    }

    const fn symbol(self) -> char {
        match self {
            Face::Plus => '+',
            Face::Minus => '-',
        }
    }
}

/// Outcome pair `(o_A, o_B)` of a coincidence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointOutcome {
    pub a: Face,
    pub b: Face,
}

impl JointOutcome {
    pub const PP: Self = Self::new(Face::Plus, Face::Plus);
    pub const PM: Self = Self::new(Face::Plus, Face::Minus);
    pub const MP: Self = Self::new(Face::Minus, Face::Plus);
    pub const MM: Self = Self::new(Face::Minus, Face::Minus);

    /// All four outcomes in canonical `(PP, PM, MP, MM)` order.
    pub const ALL: [Self; 4] = [Self::PP, Self::PM, Self::MP, Self::MM];

    pub const fn new(a: Face, b: Face) -> Self {
        Self { a, b }
    }

    pub const fn product(self) -> i8 {
        self.a.value() * self.b.value()
    }

    /// Position in the canonical `(PP, PM, MP, MM)` order.
    pub const fn index(self) -> usize {
        match (self.a, self.b) {
            (Face::Plus, Face::Plus) => 0,
            (Face::Plus, Face::Minus) => 1,
            (Face::Minus, Face::Plus) => 2,
            (Face::Minus, Face::Minus) => 3,
        }
    }

    /// Same outcome with the roles of the two prisms exchanged.
    pub const fn swapped(self) -> Self {
        Self::new(self.b, self.a)
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}1,{}1)", self.a.symbol(), self.b.symbol())
    }
}

/// Preparation regime of the double prism before the `ab` experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// A perfectly aimed joint roll ends anti-correlated.
    A,
    /// A perfectly aimed joint roll ends on `(-1,-1)`.
    B,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::A, Regime::B];

    pub const fn letter(self) -> char {
        match self {
            Regime::A => 'A',
            Regime::B => 'B',
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Regime::A),
            "B" | "b" => Ok(Regime::B),
            other => Err(format!("unknown regime '{other}' (expected A or B)")),
        }
    }
}

/// Preparation regime together with the outcome a perfectly aimed joint roll
/// produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Preparation {
    regime: Regime,
    target: JointOutcome,
}

impl Preparation {
    pub fn new(regime: Regime, target: JointOutcome) -> Result<Self> {
        let admissible = match regime {
            Regime::A => target == JointOutcome::MP || target == JointOutcome::PM,
            Regime::B => target == JointOutcome::MM,
        };
        if !admissible {
            return Err(ModelError::InvalidTarget {
                regime: regime.letter(),
                target: target.to_string(),
            });
        }
        Ok(Self { regime, target })
    }

    /// The conventional preparation for `regime`; regime A targets `(-1,+1)`.
    pub const fn of(regime: Regime) -> Self {
        match regime {
            Regime::A => Self::regime_a(),
            Regime::B => Self::regime_b(),
        }
    }

    pub const fn regime_a() -> Self {
        Self {
            regime: Regime::A,
            target: JointOutcome::MP,
        }
    }

    /// Regime A aimed at the mirror outcome `(+1,-1)`.
    pub const fn regime_a_mirrored() -> Self {
        Self {
            regime: Regime::A,
            target: JointOutcome::PM,
        }
    }

    pub const fn regime_b() -> Self {
        Self {
            regime: Regime::B,
            target: JointOutcome::MM,
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn target(&self) -> JointOutcome {
        self.target
    }
}

impl From<Regime> for Preparation {
    fn from(regime: Regime) -> Self {
        Self::of(regime)
    }
}

/// The four single experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingleExperiment {
    /// `e_a`: roll the left prism.
    RollA,
    /// `e_a'`: look at the left prism's upper face.
    LookA,
    /// `e_b`: roll the right prism.
    RollB,
    /// `e_b'`: look at the right prism's upper face.
    LookB,
}

impl SingleExperiment {
    pub const ALL: [SingleExperiment; 4] = [Self::RollA, Self::LookA, Self::RollB, Self::LookB];

    pub const fn on_left(self) -> bool {
        matches!(self, Self::RollA | Self::LookA)
    }

    pub const fn is_roll(self) -> bool {
        matches!(self, Self::RollA | Self::RollB)
    }
}

/// Coincidence experiments `e_cd`, one experiment on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coincidence {
    /// Both prisms rolled together.
    AB,
    ABPrime,
    APrimeB,
    APrimeBPrime,
}

impl Coincidence {
    pub const ALL: [Coincidence; 4] = [Self::AB, Self::ABPrime, Self::APrimeB, Self::APrimeBPrime];

    pub fn pair(left: SingleExperiment, right: SingleExperiment) -> Result<Self> {
        use SingleExperiment::*;
        match (left, right) {
            (RollA, RollB) => Ok(Self::AB),
            (RollA, LookB) => Ok(Self::ABPrime),
            (LookA, RollB) => Ok(Self::APrimeB),
            (LookA, LookB) => Ok(Self::APrimeBPrime),
            _ => Err(ModelError::InvalidPairing),
        }
    }

    pub const fn parts(self) -> (SingleExperiment, SingleExperiment) {
        use SingleExperiment::*;
        match self {
            Self::AB => (RollA, RollB),
            Self::ABPrime => (RollA, LookB),
            Self::APrimeB => (LookA, RollB),
            Self::APrimeBPrime => (LookA, LookB),
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn label(self) -> &'static str {
        match self {
            Self::AB => "ab",
            Self::ABPrime => "ab'",
            Self::APrimeB => "a'b",
            Self::APrimeBPrime => "a'b'",
        }
    }
}

/// Any experiment that can be performed on the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentKind {
    Single(SingleExperiment),
    Coincidence(Coincidence),
}

/// Orientation tallies of a joint roll, in `(PP, PM, MP, MM)` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrientationCounts {
    pub pp: u32,
    pub pm: u32,
    pub mp: u32,
    pub mm: u32,
}

impl OrientationCounts {
    pub fn total(&self) -> u32 {
        self.pp + self.pm + self.mp + self.mm
    }

    pub fn as_array(&self) -> [u32; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }
}

/// Which joint orientations of the rod-connected pair show `+` on each prism.
///
/// Orientation `k` in `[0, n)` labels the upper face of the left prism; the
/// rod fixes the right prism's upper face relative to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FaceLayout {
    n: u32,
    plus_a: [u32; 2],
    plus_b: [u32; 2],
}

impl FaceLayout {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn plus_a(&self) -> [u32; 2] {
        self.plus_a
    }

    pub fn plus_b(&self) -> [u32; 2] {
        self.plus_b
    }

    pub fn outcome_at(&self, k: u32) -> Result<JointOutcome> {
        if k >= self.n {
            return Err(ModelError::OrientationOutOfRange { index: k, n: self.n });
        }
        Ok(self.outcome_unchecked(k))
    }

    #[inline]
    pub(crate) fn outcome_unchecked(&self, k: u32) -> JointOutcome {
        let face = |plus: [u32; 2]| {
            if plus.contains(&k) {
                Face::Plus
            } else {
                Face::Minus
            }
        };
        JointOutcome::new(face(self.plus_a), face(self.plus_b))
    }

    pub fn counts(&self) -> OrientationCounts {
        let mut tally = [0u32; 4];
        for k in 0..self.n {
            tally[self.outcome_unchecked(k).index()] += 1;
        }
        OrientationCounts {
            pp: tally[0],
            pm: tally[1],
            mp: tally[2],
            mm: tally[3],
        }
    }

    /// Layout with the two prisms' roles exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            n: self.n,
            plus_a: self.plus_b,
            plus_b: self.plus_a,
        }
    }
}

/// Builds the canonical layout: `+` faces of prism A at `{0, n/2}`, of prism B
/// at `{1, 1 + n/2}`. No orientation shows `(+,+)`.
pub fn build_face_layout(n: u32) -> Result<FaceLayout> {
    let n = validate_face_count(i64::from(n))?;
    let half = n / 2;
    Ok(FaceLayout {
        n,
        plus_a: [0, half],
        plus_b: [1, 1 + half],
    })
}

pub fn outcome_at_orientation(layout: &FaceLayout, k: u32) -> Result<JointOutcome> {
    layout.outcome_at(k)
}
