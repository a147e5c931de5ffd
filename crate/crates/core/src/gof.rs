//! Pearson chi-square goodness-of-fit for categorical counts.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Expected probabilities at or below this are treated as impossible cells.
const IMPOSSIBLE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Tests `observed` counts against cell probabilities `expected`.
///
/// Cells with zero expected probability drop out of the statistic; any count
/// landing in one gives `p = 0`. With a single possible cell there is nothing
/// to test and `p = 1`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), expected.len(), "cell count mismatch");
    let total: u64 = observed.iter().sum();
    let total_f = total as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&obs, &p) in observed.iter().zip(expected) {
        if p <= IMPOSSIBLE {
            if obs > 0 {
                return ChiSquareTest {
                    statistic: f64::INFINITY,
                    dof: 0,
                    p_value: 0.0,
                };
            }
            continue;
        }
        let exp = total_f * p;
        let diff = obs as f64 - exp;
        statistic += diff * diff / exp;
        cells += 1;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 || total == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(0.0)
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}
