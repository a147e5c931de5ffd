//! Mechanistic sampling of single and coincidence experiments.
//!
//! The `ab` experiment follows the causal chain of the model: the rod either
//! detaches (both prisms then end on `+`) or holds; if it holds, the joint
//! roll either lands on the prepared target or, with probability `epsilon`,
//! on a uniformly random joint orientation.
//!
//! Trial `t` of coincidence experiment `e` draws from the stream
//! `(seed, e, t)`, and tallies are integer counts, so an [`EstimateReport`] is
//! bit-identical under any partition of trials across workers.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::ExpectationTable;
use crate::error::{ModelError, Result};
use crate::model::{
    build_face_layout, Coincidence, Face, FaceLayout, JointOutcome, ModelParams, Preparation, SingleExperiment,
};
use crate::rng::{CounterRng, StreamKey};

/// Trials handled per work unit.
const CHUNK: u64 = 1 << 14;

/// Causal branch that produced a coincidence outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// At most one prism was struck; each side was rolled or read on its own.
    Uncoupled,
    /// Rod came off during the joint roll.
    Detached,
    /// Joint roll steered onto the prepared target.
    Aimed,
    /// Joint roll ended in this orientation at random.
    RandomOrientation(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub kind: Coincidence,
    pub outcome: JointOutcome,
    pub branch: Branch,
}

/// A struck prism always ends on `+` and a looked-at prism shows a flat `+`
/// face, so every single experiment yields `+1`.
pub fn sample_single(kind: SingleExperiment, _rng: &mut CounterRng) -> Face {
    match kind {
        SingleExperiment::RollA | SingleExperiment::RollB => Face::Plus,
        SingleExperiment::LookA | SingleExperiment::LookB => Face::Plus,
    }
}

/// Samples coincidence experiments for fixed parameters and preparation.
#[derive(Debug, Clone, Copy)]
pub struct CoincidenceSampler {
    params: ModelParams,
    prep: Preparation,
    layout: FaceLayout,
}

impl CoincidenceSampler {
    pub fn new(params: ModelParams, prep: Preparation) -> Self {
        let layout = build_face_layout(params.n()).expect("validated params carry a valid n");
        Self { params, prep, layout }
    }

    pub fn layout(&self) -> &FaceLayout {
        &self.layout
    }

    #[inline]
    pub fn sample(&self, kind: Coincidence, rng: &mut CounterRng) -> TrialRecord {
        let (outcome, branch) = if kind != Coincidence::AB {
            let (left, right) = kind.parts();
            let a = sample_single(left, rng);
            let b = sample_single(right, rng);
            (JointOutcome::new(a, b), Branch::Uncoupled)
        } else if !rng.bernoulli(self.params.rho()) {
            (JointOutcome::PP, Branch::Detached)
        } else if rng.bernoulli(1.0 - self.params.epsilon()) {
            (self.prep.target(), Branch::Aimed)
        } else {
            let k = rng.below(self.layout.n());
            (self.layout.outcome_unchecked(k), Branch::RandomOrientation(k))
        };
        TrialRecord { kind, outcome, branch }
    }
}

pub fn sample_coincidence(
    params: &ModelParams,
    prep: &Preparation,
    kind: Coincidence,
    rng: &mut CounterRng,
) -> TrialRecord {
    CoincidenceSampler::new(*params, *prep).sample(kind, rng)
}

/// Branch frequencies observed in the `ab` experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BranchTally {
    pub detached: u64,
    pub aimed: u64,
    pub random_orientation: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    outcomes: [u64; 4],
    branches: BranchTally,
}

impl Tally {
    fn record(&mut self, record: &TrialRecord) {
        self.outcomes[record.outcome.index()] += 1;
        match record.branch {
            Branch::Uncoupled => {}
            Branch::Detached => self.branches.detached += 1,
            Branch::Aimed => self.branches.aimed += 1,
            Branch::RandomOrientation(_) => self.branches.random_orientation += 1,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.outcomes.iter_mut().zip(other.outcomes) {
            *a += b;
        }
        self.branches.detached += other.branches.detached;
        self.branches.aimed += other.branches.aimed;
        self.branches.random_orientation += other.branches.random_orientation;
        self
    }
}

/// Monte Carlo estimate of the correlation table and of the CHSH value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub params: ModelParams,
    pub prep: Preparation,
    pub trials: u64,
    pub seed: u64,
    pub table: ExpectationTable,
    /// Standard error of each correlation estimate.
    pub table_se: ExpectationTable,
    pub i_hat: f64,
    /// Sum of the four per-term standard errors.
    pub se_i: f64,
    /// Outcome counts per coincidence experiment, `(PP, PM, MP, MM)` order.
    pub joint_counts: [[u64; 4]; 4],
    pub ab_branches: BranchTally,
}

/// How trials are spread over threads. Does not affect results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Workers {
    /// Rayon's global pool.
    #[default]
    Global,
    /// Run in the calling thread.
    Sequential,
    /// A dedicated pool of this many threads.
    Pool(usize),
}

pub fn estimate(params: &ModelParams, prep: &Preparation, trials: u64, seed: u64) -> Result<EstimateReport> {
    estimate_with(params, prep, trials, seed, Workers::Global)
}

pub fn estimate_with(
    params: &ModelParams,
    prep: &Preparation,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(ModelError::ZeroTrials);
    }
    let sampler = CoincidenceSampler::new(*params, *prep);
    let root = StreamKey::from_seed(seed);
    let run = |kind: Coincidence| tally_kind(&sampler, root.split(kind.index() as u64), kind, trials, workers);

    let tallies: Vec<Tally> = match workers {
        Workers::Pool(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| ModelError::WorkerPool(e.to_string()))?;
            pool.install(|| Coincidence::ALL.iter().map(|&k| run(k)).collect())
        }
        _ => Coincidence::ALL.iter().map(|&k| run(k)).collect(),
    };

    let mut joint_counts = [[0u64; 4]; 4];
    for (slot, tally) in joint_counts.iter_mut().zip(&tallies) {
        *slot = tally.outcomes;
    }
    let n = trials as f64;
    let mean = |kind: Coincidence| {
        let [pp, pm, mp, mm] = joint_counts[kind.index()];
        ((pp + mm) as f64 - (pm + mp) as f64) / n
    };
    let table = ExpectationTable::from_fn(mean);
    let table_se = ExpectationTable::from_fn(|kind| {
        let e = table.get(kind);
        ((1.0 - e * e).max(0.0) / n).sqrt()
    });
    let se_i = table_se.ab + table_se.ab_prime + table_se.a_prime_b + table_se.a_prime_b_prime;

    Ok(EstimateReport {
        params: *params,
        prep: *prep,
        trials,
        seed,
        i_hat: table.chsh(),
        table,
        table_se,
        se_i,
        joint_counts,
        ab_branches: tallies[Coincidence::AB.index()].branches,
    })
}

fn tally_kind(sampler: &CoincidenceSampler, key: StreamKey, kind: Coincidence, trials: u64, workers: Workers) -> Tally {
    let chunks = trials.div_ceil(CHUNK);
    let chunk = |c: u64| {
        let mut tally = Tally::default();
        for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
            let mut rng = key.stream(t);
            tally.record(&sampler.sample(kind, &mut rng));
        }
        tally
    };
    match workers {
        Workers::Sequential => (0..chunks).map(chunk).fold(Tally::default(), Tally::merge),
        _ => (0..chunks)
            .into_par_iter()
            .map(chunk)
            .reduce(Tally::default, Tally::merge),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Regime;

    fn params(n: u32, eps: f64, rho: f64) -> ModelParams {
        ModelParams::new(n, eps, rho).unwrap()
    }

    #[test]
    fn single_experiments_always_plus() {
        let key = StreamKey::from_seed(3);
        for t in 0..10_000 {
            let mut rng = key.stream(t);
            for kind in SingleExperiment::ALL {
                assert_eq!(sample_single(kind, &mut rng), Face::Plus);
            }
        }
    }

    #[test]
    fn detached_rod_always_plus_plus() {
        let key = StreamKey::from_seed(11);
        for eps in [0.0, 0.5, 1.0] {
            let s = CoincidenceSampler::new(params(6, eps, 0.0), Preparation::regime_a());
            for t in 0..2000 {
                let rec = s.sample(Coincidence::AB, &mut key.stream(t));
                assert_eq!(rec.outcome, JointOutcome::PP);
                assert_eq!(rec.branch, Branch::Detached);
            }
        }
    }

    #[test]
    fn aimed_regime_b_always_minus_minus() {
        let key = StreamKey::from_seed(12);
        let s = CoincidenceSampler::new(params(10, 0.0, 1.0), Preparation::regime_b());
        for t in 0..2000 {
            let rec = s.sample(Coincidence::AB, &mut key.stream(t));
            assert_eq!((rec.outcome, rec.branch), (JointOutcome::MM, Branch::Aimed));
        }
    }

    #[test]
    fn uncoupled_experiments_are_plus_plus() {
        let key = StreamKey::from_seed(13);
        let s = CoincidenceSampler::new(params(6, 0.5, 0.5), Preparation::regime_a());
        for kind in [Coincidence::ABPrime, Coincidence::APrimeB, Coincidence::APrimeBPrime] {
            for t in 0..500 {
                let rec = s.sample(kind, &mut key.stream(t));
                assert_eq!((rec.outcome, rec.branch), (JointOutcome::PP, Branch::Uncoupled));
            }
        }
    }

    #[test]
    fn random_branch_matches_layout() {
        let key = StreamKey::from_seed(14);
        let s = CoincidenceSampler::new(params(8, 1.0, 1.0), Preparation::regime_a());
        for t in 0..2000 {
            let rec = s.sample(Coincidence::AB, &mut key.stream(t));
            match rec.branch {
                Branch::RandomOrientation(k) => assert_eq!(rec.outcome, s.layout().outcome_at(k).unwrap()),
                other => panic!("unexpected branch {other:?}"),
            }
        }
    }

    #[test]
    fn estimate_deterministic_corners() {
        let r = estimate(&params(6, 0.4, 0.0), &Preparation::regime_a(), 1000, 0).unwrap();
        assert_eq!(r.i_hat, 2.0);
        let r = estimate(&params(4, 0.0, 1.0), &Preparation::regime_a(), 1000, 0).unwrap();
        assert_eq!(r.i_hat, 4.0);
        assert_eq!(r.se_i, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let err = estimate(&params(6, 0.4, 0.5), &Preparation::of(Regime::B), 0, 0).unwrap_err();
        assert_eq!(err, ModelError::ZeroTrials);
    }

    #[test]
    fn worker_partitioning_is_invisible() {
        let p = params(10, 0.5, 0.5);
        let prep = Preparation::regime_b();
        let trials = 3 * CHUNK + 17;
        let seq = estimate_with(&p, &prep, trials, 99, Workers::Sequential).unwrap();
        let two = estimate_with(&p, &prep, trials, 99, Workers::Pool(2)).unwrap();
        let global = estimate(&p, &prep, trials, 99).unwrap();
        assert_eq!(seq, two);
        assert_eq!(seq, global);
        let other_seed = estimate(&p, &prep, trials, 100).unwrap();
        assert_ne!(seq.joint_counts, other_seed.joint_counts);
    }
}
