//! Exact outcome probabilities, correlations and CHSH values.
//!
//! [`chsh`] goes through the full pipeline (joint distributions, then
//! expectation values, then the CHSH combination). [`chsh_closed_form`]
//! evaluates the closed-form expressions directly so the two can be checked
//! against each other.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::{Coincidence, JointOutcome, ModelParams, Preparation, Regime};

/// Tolerance on the total probability of a [`JointDistribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Margin above the local bound of 2 before a value counts as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-12;

/// Local-realist bound on the CHSH combination.
pub const LOCAL_BOUND: f64 = 2.0;

/// Probabilities of the four outcome pairs of one coincidence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointDistribution {
    /// Deterministic `(+1,+1)`.
    pub const PLUS_PLUS: Self = Self {
        pp: 1.0,
        pm: 0.0,
        mp: 0.0,
        mm: 0.0,
    };

    pub fn new(pp: f64, pm: f64, mp: f64, mm: f64) -> Result<Self> {
        for (outcome, value) in [("(+1,+1)", pp), ("(+1,-1)", pm), ("(-1,+1)", mp), ("(-1,-1)", mm)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::ProbabilityOutOfRange { outcome, value });
            }
        }
        let total = pp + pm + mp + mm;
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(ModelError::NotNormalized(total));
        }
        Ok(Self { pp, pm, mp, mm })
    }

    pub fn from_array(p: [f64; 4]) -> Result<Self> {
        Self::new(p[0], p[1], p[2], p[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }

    pub fn probability(&self, outcome: JointOutcome) -> f64 {
        self.as_array()[outcome.index()]
    }

    /// Correlation `E = P(+,+) + P(-,-) - P(+,-) - P(-,+)`.
    pub fn expectation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }
}

/// The four correlations entering the CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationTable {
    pub ab: f64,
    pub ab_prime: f64,
    pub a_prime_b: f64,
    pub a_prime_b_prime: f64,
}

impl ExpectationTable {
    pub fn get(&self, kind: Coincidence) -> f64 {
        match kind {
            Coincidence::AB => self.ab,
            Coincidence::ABPrime => self.ab_prime,
            Coincidence::APrimeB => self.a_prime_b,
            Coincidence::APrimeBPrime => self.a_prime_b_prime,
        }
    }

    pub fn from_fn(mut f: impl FnMut(Coincidence) -> f64) -> Self {
        Self {
            ab: f(Coincidence::AB),
            ab_prime: f(Coincidence::ABPrime),
            a_prime_b: f(Coincidence::APrimeB),
            a_prime_b_prime: f(Coincidence::APrimeBPrime),
        }
    }

    /// `|E_ab - E_ab'| + |E_a'b' + E_a'b|`.
    pub fn chsh(&self) -> f64 {
        (self.ab - self.ab_prime).abs() + (self.a_prime_b_prime + self.a_prime_b).abs()
    }
}

/// A CHSH value and whether it exceeds the local bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshValue {
    pub i: f64,
    pub violated: bool,
}

impl ChshValue {
    pub fn new(i: f64) -> Self {
        Self {
            i,
            violated: i > LOCAL_BOUND + VIOLATION_MARGIN,
        }
    }
}

/// CHSH value obtained from the single non-trivial correlation `E_ab`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub i: f64,
    pub e_ab: f64,
}

/// Outcome probabilities of coincidence experiment `kind`.
///
/// Only the joint roll `ab` depends on the parameters; in the other three
/// experiments at most one prism is struck, the rod detaches, and every face
/// read is a `+`.
pub fn joint_distribution(params: &ModelParams, prep: &Preparation, kind: Coincidence) -> JointDistribution {
    if kind != Coincidence::AB {
        return JointDistribution::PLUS_PLUS;
    }
    let n = f64::from(params.n());
    let (eps, rho) = (params.epsilon(), params.rho());
    let two_over_n = 2.0 / n;
    let rest = (n - 4.0) / n;

    let pp = 1.0 - rho;
    let (pm, mp, mm) = match prep.regime() {
        Regime::A => {
            let aimed = rho * ((1.0 - eps) + eps * two_over_n);
            let missed = rho * eps * two_over_n;
            let mm = rho * eps * rest;
            if prep.target() == JointOutcome::MP {
                (missed, aimed, mm)
            } else {
                (aimed, missed, mm)
            }
        }
        Regime::B => {
            let anti = rho * eps * two_over_n;
            (anti, anti, rho * (1.0 + eps * (rest - 1.0)))
        }
    };
    JointDistribution { pp, pm, mp, mm }
}

pub fn expectation_value(dist: &JointDistribution) -> f64 {
    dist.expectation()
}

pub fn expectation_table(params: &ModelParams, prep: &Preparation) -> ExpectationTable {
    ExpectationTable::from_fn(|kind| expectation_value(&joint_distribution(params, prep, kind)))
}

pub fn chsh(params: &ModelParams, prep: &Preparation) -> ChshValue {
    ChshValue::new(expectation_table(params, prep).chsh())
}

pub fn chsh_closed_form(params: &ModelParams, prep: &Preparation) -> ChshValue {
    let n = f64::from(params.n());
    let (eps, rho) = (params.epsilon(), params.rho());
    let i = match prep.regime() {
        Regime::A => 2.0 + rho * (2.0 * (1.0 - eps) + eps * 8.0 / n),
        Regime::B => 2.0 + rho * eps * 8.0 / n,
    };
    ChshValue::new(i)
}

/// Uses `E_ab' = E_a'b = E_a'b' = 1`, so that `I = 2 + |E_ab - 1|`.
pub fn chsh_decomposition(params: &ModelParams, prep: &Preparation) -> Decomposition {
    let e_ab = expectation_value(&joint_distribution(params, prep, Coincidence::AB));
    Decomposition {
        i: 2.0 + (e_ab - 1.0).abs(),
        e_ab,
    }
}

/// Quantum singlet-state CHSH value, `2 * sqrt(2)`.
pub fn singlet_reference() -> f64 {
    2.0 * std::f64::consts::SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, eps: f64, rho: f64) -> ModelParams {
        ModelParams::new(n, eps, rho).unwrap()
    }

    fn assert_dist(d: JointDistribution, expected: [f64; 4]) {
        for (got, want) in d.as_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{d:?} != {expected:?}");
        }
    }

    #[test]
    fn fully_random_hexagonal_roll() {
        let d = joint_distribution(&params(6, 1.0, 1.0), &Preparation::regime_a(), Coincidence::AB);
        assert_dist(d, [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn detached_rod_is_plus_plus() {
        for prep in [Preparation::regime_a(), Preparation::regime_b()] {
            for eps in [0.0, 0.4, 1.0] {
                let d = joint_distribution(&params(8, eps, 0.0), &prep, Coincidence::AB);
                assert_dist(d, [1.0, 0.0, 0.0, 0.0]);
            }
        }
    }

    #[test]
    fn regime_b_aimed_roll() {
        let d = joint_distribution(&params(10, 0.0, 1.0), &Preparation::regime_b(), Coincidence::AB);
        assert_dist(d, [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn other_experiments_are_deterministic() {
        for kind in [Coincidence::ABPrime, Coincidence::APrimeB, Coincidence::APrimeBPrime] {
            let d = joint_distribution(&params(6, 0.3, 0.7), &Preparation::regime_a(), kind);
            assert_eq!(d, JointDistribution::PLUS_PLUS);
        }
    }

    #[test]
    fn expectation_examples() {
        let octagonal = JointDistribution::new(0.0, 0.25, 0.25, 0.5).unwrap();
        assert!(expectation_value(&octagonal).abs() < 1e-15);
        assert_eq!(expectation_value(&JointDistribution::PLUS_PLUS), 1.0);
        let third = 1.0 / 3.0;
        let hex = JointDistribution::new(0.0, third, third, third).unwrap();
        assert!((expectation_value(&hex) + third).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert_eq!(
            JointDistribution::new(0.5, 0.5, 0.5, 0.0),
            Err(ModelError::NotNormalized(1.5))
        );
        assert!(matches!(
            JointDistribution::new(1.2, -0.2, 0.0, 0.0),
            Err(ModelError::ProbabilityOutOfRange { .. })
        ));
        assert!(JointDistribution::new(0.25, 0.25, 0.25, 0.25 + 1e-13).is_ok());
    }

    #[test]
    fn chsh_examples() {
        let a = Preparation::regime_a();
        assert!((chsh(&params(10, 1.0, 1.0), &a).i - 2.8).abs() < 1e-12);
        assert!((chsh(&params(4, 0.0, 1.0), &a).i - 4.0).abs() < 1e-12);
        let b = chsh(&params(6, 1.0, 0.0), &Preparation::regime_b());
        assert_eq!(b.i, 2.0);
        assert!(!b.violated);
    }

    #[test]
    fn closed_form_examples() {
        let b = chsh_closed_form(&params(10, 1.0, 1.0), &Preparation::regime_b());
        assert!((b.i - 2.8).abs() < 1e-12);
        for eps in [0.0, 0.25, 0.5, 1.0] {
            let i = chsh_closed_form(&params(4, eps, 1.0), &Preparation::regime_a()).i;
            assert!((i - 4.0).abs() < 1e-12);
        }
        let p = params(12, 0.5, 0.5);
        let closed = chsh_closed_form(&p, &Preparation::regime_a()).i;
        assert!((closed - (2.0 + 0.5 * (1.0 + 1.0 / 3.0))).abs() < 1e-12);
        assert!((closed - chsh(&p, &Preparation::regime_a()).i).abs() < 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        let a = chsh_decomposition(&params(10, 0.0, 1.0), &Preparation::regime_a());
        assert!((a.e_ab + 1.0).abs() < 1e-12 && (a.i - 4.0).abs() < 1e-12);
        let b = chsh_decomposition(&params(10, 0.0, 1.0), &Preparation::regime_b());
        assert!((b.e_ab - 1.0).abs() < 1e-12 && (b.i - 2.0).abs() < 1e-12);
        let off = chsh_decomposition(&params(6, 0.7, 0.0), &Preparation::regime_a());
        assert_eq!((off.e_ab, off.i), (1.0, 2.0));
    }

    #[test]
    fn singlet_comparisons() {
        let s = singlet_reference();
        assert!((s - 2.828_427_124_746_19).abs() < 1e-12);
        assert!(chsh(&params(10, 1.0, 1.0), &Preparation::regime_a()).i < s);
        assert!(chsh(&params(4, 1.0, 1.0), &Preparation::regime_a()).i > s);
    }
}
