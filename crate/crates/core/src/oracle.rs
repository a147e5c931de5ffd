//! Independent checks: the local-realist CHSH bound by exhaustive enumeration,
//! and exact enumeration of the sampler's branches for the `ab` experiment.

use serde::Serialize;

use crate::analytic::JointDistribution;
use crate::error::Result;
use crate::model::{build_face_layout, Face, JointOutcome, ModelParams, Preparation};
use crate::montecarlo::Branch;

/// Pre-assigned outcomes of the four single experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LocalStrategy {
    pub a: Face,
    pub a_prime: Face,
    pub b: Face,
    pub b_prime: Face,
}

impl LocalStrategy {
    pub fn from_values(a: i8, a_prime: i8, b: i8, b_prime: i8) -> Option<Self> {
        Some(Self {
            a: Face::from_value(a)?,
            a_prime: Face::from_value(a_prime)?,
            b: Face::from_value(b)?,
            b_prime: Face::from_value(b_prime)?,
        })
    }

    /// All 16 strategies, enumerated with `a` as the most significant sign.
    pub fn all() -> Vec<Self> {
        let faces = [Face::Plus, Face::Minus];
        let mut out = Vec::with_capacity(16);
        for a in faces {
            for a_prime in faces {
                for b in faces {
                    for b_prime in faces {
                        out.push(Self { a, a_prime, b, b_prime });
                    }
                }
            }
        }
        out
    }

    /// Correlations `(E_ab, E_ab', E_a'b, E_a'b')` of this strategy.
    fn correlations(&self) -> [i32; 4] {
        let [a, ap, b, bp] = [self.a, self.a_prime, self.b, self.b_prime].map(|f| i32::from(f.value()));
        [a * b, a * bp, ap * b, ap * bp]
    }

    pub fn chsh(&self) -> i32 {
        let [ab, abp, apb, apbp] = self.correlations();
        (ab - abp).abs() + (apbp + apb).abs()
    }

    /// Signed CHSH functional `s1 (E_ab - E_ab') + s2 (E_a'b' + E_a'b)`.
    pub fn signed_chsh(&self, s1: i32, s2: i32) -> i32 {
        let [ab, abp, apb, apbp] = self.correlations();
        s1 * (ab - abp) + s2 * (apbp + apb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyValue {
    pub strategy: LocalStrategy,
    pub i: i32,
}

/// Maximum of one signed CHSH functional over all deterministic strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignPatternBound {
    pub s1: i32,
    pub s2: i32,
    pub max: i32,
}

/// Certificate that no local strategy, deterministic or mixed, exceeds `max_i`.
///
/// The CHSH value of any mixture is the largest of the four signed
/// functionals evaluated at it; each functional is linear and so is bounded
/// by its maximum over the 16 deterministic strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhvCertificate {
    pub max_i: i32,
    pub maximizers: Vec<LocalStrategy>,
    pub strategies: Vec<StrategyValue>,
    pub sign_patterns: Vec<SignPatternBound>,
    pub mixed_bound: i32,
}

pub fn lhv_max_chsh() -> LhvCertificate {
    let all = LocalStrategy::all();
    let strategies: Vec<StrategyValue> = all
        .iter()
        .map(|&s| StrategyValue {
            strategy: s,
            i: s.chsh(),
        })
        .collect();
    let max_i = strategies.iter().map(|v| v.i).max().unwrap_or(0);
    let maximizers = strategies.iter().filter(|v| v.i == max_i).map(|v| v.strategy).collect();
    let sign_patterns: Vec<SignPatternBound> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .into_iter()
        .map(|(s1, s2)| SignPatternBound {
            s1,
            s2,
            max: all.iter().map(|s| s.signed_chsh(s1, s2)).max().unwrap_or(0),
        })
        .collect();
    let mixed_bound = sign_patterns.iter().map(|p| p.max).max().unwrap_or(0);
    LhvCertificate {
        max_i,
        maximizers,
        strategies,
        sign_patterns,
        mixed_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedBranch {
    pub probability: f64,
    pub branch: Branch,
    pub outcome: JointOutcome,
}

/// Every branch of the `ab` experiment with positive probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchEnumeration {
    pub branches: Vec<WeightedBranch>,
}

impl BranchEnumeration {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Outcome probabilities in `(PP, PM, MP, MM)` order.
    pub fn aggregate(&self) -> [f64; 4] {
        let mut p = [0.0; 4];
        for b in &self.branches {
            p[b.outcome.index()] += b.probability;
        }
        p
    }

    pub fn distribution(&self) -> Result<JointDistribution> {
        JointDistribution::from_array(self.aggregate())
    }
}

pub fn branch_enumerate(params: &ModelParams, prep: &Preparation) -> BranchEnumeration {
    let layout = build_face_layout(params.n()).expect("validated params carry a valid n");
    let (eps, rho) = (params.epsilon(), params.rho());
    let per_orientation = rho * eps / f64::from(params.n());

    let mut branches = vec![
        WeightedBranch {
            probability: 1.0 - rho,
            branch: Branch::Detached,
            outcome: JointOutcome::PP,
        },
        WeightedBranch {
            probability: rho * (1.0 - eps),
            branch: Branch::Aimed,
            outcome: prep.target(),
        },
    ];
    branches.extend((0..params.n()).map(|k| WeightedBranch {
        probability: per_orientation,
        branch: Branch::RandomOrientation(k),
        outcome: layout.outcome_at(k).expect("k < n"),
    }));
    branches.retain(|b| b.probability > 0.0);
    BranchEnumeration { branches }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_bound_is_two() {
        let cert = lhv_max_chsh();
        assert_eq!(cert.max_i, 2);
        assert_eq!(cert.mixed_bound, 2);
        assert_eq!(cert.strategies.len(), 16);
        assert!(cert.strategies.iter().all(|v| v.i == 0 || v.i == 2));
    }

    #[test]
    fn named_strategies() {
        assert_eq!(LocalStrategy::from_values(1, 1, 1, 1).unwrap().chsh(), 2);
        assert_eq!(LocalStrategy::from_values(1, 1, -1, 1).unwrap().chsh(), 2);
        assert!(LocalStrategy::from_values(1, 0, 1, 1).is_none());
    }

    #[test]
    fn aimed_regime_a_has_single_branch() {
        let e = branch_enumerate(&ModelParams::new(8, 0.0, 1.0).unwrap(), &Preparation::regime_a());
        assert_eq!(e.branches.len(), 1);
        assert_eq!(e.branches[0].probability, 1.0);
        assert_eq!(e.branches[0].outcome, JointOutcome::MP);
    }

    #[test]
    fn tetragonal_random_regime_b() {
        let e = branch_enumerate(&ModelParams::new(4, 1.0, 1.0).unwrap(), &Preparation::regime_b());
        let p = e.aggregate();
        for (got, want) in p.iter().zip([0.0, 0.5, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(e.branches.len(), 4);
    }

    #[test]
    fn octagonal_half_half() {
        let e = branch_enumerate(&ModelParams::new(8, 0.5, 0.5).unwrap(), &Preparation::regime_a());
        assert!((e.aggregate()[3] - 0.125).abs() < 1e-12);
        assert!(e.branches.len() <= 2 + 8);
        assert!((e.total_probability() - 1.0).abs() < 1e-12);
    }
}
