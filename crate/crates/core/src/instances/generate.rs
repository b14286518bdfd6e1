//! Instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, Job};
use crate::error::{Error, Result};
use crate::time::int;

/// Parameters for [`generate_random`]. Times are integers in `[0, horizon]`,
/// works are integers drawn uniformly from `work_range` (inclusive).
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    pub work_range: (u64, u64),
    pub horizon: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            n: 4,
            m: 1,
            alpha: 2.0,
            seed: 0,
            work_range: (1, 4),
            horizon: 8,
        }
    }
}

pub fn generate_random(spec: &RandomSpec) -> Result<Instance> {
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::Domain("n and m must be at least 1".into()));
    }
    let (lo, hi) = spec.work_range;
    if lo == 0 || lo > hi {
        return Err(Error::Domain(format!("empty work range [{lo}, {hi}]")));
    }
    if spec.horizon == 0 {
        return Err(Error::Domain("horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let jobs = (1..=spec.n as u64)
        .map(|id| {
            let r = rng.gen_range(0..spec.horizon);
            let d = rng.gen_range(r + 1..=spec.horizon);
            let w = rng.gen_range(lo..=hi);
            Job::new(id, int(r as i64), int(d as i64), int(w as i64))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(spec.alpha, spec.m, jobs)
}

/// `n` unit jobs on `[i-1, i]` (ids `1..=n`) and one job of work `n` on
/// `[0, n]` (id `n+1`), single processor.
pub fn generate_gap_family(n: usize, alpha: f64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Domain("gap family needs n >= 1".into()));
    }
    let n64 = n as i64;
    let mut jobs: Vec<Job> = (1..=n64)
        .map(|i| Job::new(i as u64, int(i - 1), int(i), int(1)))
        .collect::<Result<_>>()?;
    jobs.push(Job::new(n as u64 + 1, int(0), int(n64), int(n64))?);
    Instance::new(alpha, 1, jobs)
}
