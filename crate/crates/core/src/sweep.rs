//! Grid sweeps over `(regime, n, epsilon, rho)` and finite-difference
//! monotonicity probes.
//!
//! In regime A every `rho > 0` violates the local bound for all `epsilon`, so
//! unlike some related models there is no `rho` threshold below which adding
//! indeterminism restores the inequality.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::chsh;
use crate::error::{ModelError, Result};
use crate::model::{validate_params, ModelParams, Preparation, Regime};
use crate::montecarlo::{estimate_with, Workers};

/// Differences smaller than this count as zero.
pub const FLAT_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub ns: Vec<u32>,
    pub epsilons: Vec<f64>,
    pub rhos: Vec<f64>,
    pub regimes: Vec<Regime>,
    pub mode: SweepMode,
}

impl SweepSpec {
    pub fn exact(ns: Vec<u32>, epsilons: Vec<f64>, rhos: Vec<f64>, regimes: Vec<Regime>) -> Self {
        Self {
            ns,
            epsilons,
            rhos,
            regimes,
            mode: SweepMode::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| ModelError::InvalidSweep(format!("{name} grid is empty"));
        if self.ns.is_empty() {
            return Err(empty("n"));
        }
        if self.epsilons.is_empty() {
            return Err(empty("epsilon"));
        }
        if self.rhos.is_empty() {
            return Err(empty("rho"));
        }
        if self.regimes.is_empty() {
            return Err(empty("regime"));
        }
        for &n in &self.ns {
            validate_params(i64::from(n), 0.0, 0.0)?;
        }
        for &eps in &self.epsilons {
            validate_params(4, eps, 0.0)?;
        }
        for &rho in &self.rhos {
            validate_params(4, 0.0, rho)?;
        }
        if let SweepMode::MonteCarlo { trials: 0, .. } = self.mode {
            return Err(ModelError::ZeroTrials);
        }
        Ok(())
    }

    /// Grid points in `(regime, n, epsilon, rho)` lexicographic order.
    fn points(&self) -> Vec<(Regime, ModelParams)> {
        let mut points = Vec::with_capacity(self.regimes.len() * self.ns.len() * self.epsilons.len() * self.rhos.len());
        for &regime in &self.regimes {
            for &n in &self.ns {
                for &eps in &self.epsilons {
                    for &rho in &self.rhos {
                        let params = ModelParams::new(n, eps, rho).expect("validated grid");
                        points.push((regime, params));
                    }
                }
            }
        }
        points.sort_by(|(ra, pa), (rb, pb)| {
            ra.cmp(rb)
                .then(pa.n().cmp(&pb.n()))
                .then(pa.epsilon().total_cmp(&pb.epsilon()))
                .then(pa.rho().total_cmp(&pb.rho()))
        });
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub regime: Regime,
    pub n: u32,
    pub epsilon: f64,
    pub rho: f64,
    pub i_value: f64,
    /// Zero in exact mode.
    pub i_stderr: f64,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with_workers(spec, Workers::Global)
}

pub fn run_sweep_with_workers(spec: &SweepSpec, workers: Workers) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    let row = |regime: Regime, params: &ModelParams, i_value: f64, i_stderr: f64| SweepRow {
        regime,
        n: params.n(),
        epsilon: params.epsilon(),
        rho: params.rho(),
        i_value,
        i_stderr,
    };
    match spec.mode {
        SweepMode::Exact => Ok(points
            .par_iter()
            .map(|(regime, params)| row(*regime, params, chsh(params, &Preparation::of(*regime)).i, 0.0))
            .collect()),
        SweepMode::MonteCarlo { trials, seed } => points
            .iter()
            .map(|(regime, params)| {
                let report = estimate_with(params, &Preparation::of(*regime), trials, seed, workers)?;
                Ok(row(*regime, params, report.i_hat, report.se_i))
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Epsilon,
    Rho,
}

/// One grid step of a probe, from `(x0, i0)` to `(x1, i1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeStep {
    pub x0: f64,
    pub i0: f64,
    pub x1: f64,
    pub i1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Monotonicity {
    Constant,
    Nondecreasing,
    Nonincreasing,
    /// Neither; carries the first rising and the first falling step.
    Mixed {
        rising: ProbeStep,
        falling: ProbeStep,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub n: u32,
    pub regime: Regime,
    pub axis: Axis,
    pub fixed_other: f64,
    pub step: f64,
    pub verdict: Monotonicity,
    /// `(x, I)` at every grid point.
    pub points: Vec<(f64, f64)>,
}

impl MonotonicityReport {
    pub fn counterexample(&self) -> Option<(ProbeStep, ProbeStep)> {
        match self.verdict {
            Monotonicity::Mixed { rising, falling } => Some((rising, falling)),
            _ => None,
        }
    }
}

/// `0, step, 2 step, ...` up to and including 1.
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(ModelError::InvalidStep(step));
    }
    let intervals = ((1.0 / step) - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..intervals).map(|i| i as f64 * step).collect();
    grid.push(1.0);
    Ok(grid)
}

/// Classifies `I` along `axis` at fixed `n`, regime and other parameter.
pub fn monotonicity_probe(
    n: u32,
    regime: Regime,
    axis: Axis,
    fixed_other: f64,
    step: f64,
) -> Result<MonotonicityReport> {
    let grid = unit_grid(step)?;
    let prep = Preparation::of(regime);
    let points = grid
        .iter()
        .map(|&x| {
            let (eps, rho) = match axis {
                Axis::Epsilon => (x, fixed_other),
                Axis::Rho => (fixed_other, x),
            };
            let params = validate_params(i64::from(n), eps, rho)?;
            Ok((x, chsh(&params, &prep).i))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rising = None;
    let mut falling = None;
    for w in points.windows(2) {
        let step = ProbeStep {
            x0: w[0].0,
            i0: w[0].1,
            x1: w[1].0,
            i1: w[1].1,
        };
        let diff = step.i1 - step.i0;
        if diff > FLAT_TOLERANCE && rising.is_none() {
            rising = Some(step);
        } else if diff < -FLAT_TOLERANCE && falling.is_none() {
            falling = Some(step);
        }
    }
    let verdict = match (rising, falling) {
        (None, None) => Monotonicity::Constant,
        (Some(_), None) => Monotonicity::Nondecreasing,
        (None, Some(_)) => Monotonicity::Nonincreasing,
        (Some(rising), Some(falling)) => Monotonicity::Mixed { rising, falling },
    };
    Ok(MonotonicityReport {
        n,
        regime,
        axis,
        fixed_other,
        step,
        verdict,
        points,
    })
}

/// Ordering helper used when comparing rows from separate runs.
pub fn row_order(a: &SweepRow, b: &SweepRow) -> Ordering {
    a.regime
        .cmp(&b.regime)
        .then(a.n.cmp(&b.n))
        .then(a.epsilon.total_cmp(&b.epsilon))
        .then(a.rho.total_cmp(&b.rho))
}
