//! Problem data: jobs, homogeneous and heterogeneous instances, schedules,
//! energy accounting, validation and generators.

mod energy;
mod generate;
mod json;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

pub use energy::{energy_of_het_schedule, energy_of_job, energy_of_schedule, rescale_energy};
pub use generate::{generate_gap_family, generate_random, RandomSpec};
pub use json::{
    parse_instance, parse_schedule, schedule_to_json, schedule_value, serialize_het_instance,
    serialize_instance, AnyInstance,
};
pub use validate::{validate_het_schedule, validate_schedule, Violation};

use crate::error::{Error, Result};
use crate::time::{Interval, Rational};

pub type JobId = u64;

/// Name of the `i`-th (0-based) processor of a homogeneous instance.
pub fn processor_name(index: usize) -> String {
    format!("p{}", index + 1)
}

/// Inverse of [`processor_name`] for an instance with `m` processors.
pub fn processor_index(name: &str, m: usize) -> Option<usize> {
    let i: usize = name.strip_prefix('p')?.parse().ok()?;
    (1..=m).contains(&i).then(|| i - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub release: Rational,
    pub deadline: Rational,
    pub work: Rational,
}

impl Job {
    pub fn new(id: JobId, release: Rational, deadline: Rational, work: Rational) -> Result<Self> {
        if release >= deadline {
            return Err(Error::Domain(format!(
                "job {id}: release {release} must precede deadline {deadline}"
            )));
        }
        if !work.is_positive() {
            return Err(Error::Domain(format!(
                "job {id}: work {work} must be positive"
            )));
        }
        Ok(Job {
            id,
            release,
            deadline,
            work,
        })
    }

    /// The life interval `[release, deadline]`.
    pub fn life(&self) -> Interval {
        Interval::new(self.release.clone(), self.deadline.clone())
    }

    pub fn work_f64(&self) -> f64 {
        crate::time::to_f64(&self.work)
    }
}

/// A homogeneous instance: `m` identical processors with power `s^alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    alpha: f64,
    processors: usize,
    jobs: Vec<Job>,
}

impl Instance {
    pub fn new(alpha: f64, processors: usize, jobs: Vec<Job>) -> Result<Self> {
        check_alpha(alpha)?;
        if processors == 0 {
            return Err(Error::Domain("at least one processor is required".into()));
        }
        let mut seen = BTreeSet::new();
        for job in &jobs {
            if !seen.insert(job.id) {
                return Err(Error::Domain(format!("duplicate job id {}", job.id)));
            }
            // Re-check in case the job was built by hand.
            Job::new(
                job.id,
                job.release.clone(),
                job.deadline.clone(),
                job.work.clone(),
            )?;
        }
        Ok(Instance {
            alpha,
            processors,
            jobs,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn processors(&self) -> usize {
        self.processors
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// `[min r_j, max d_j]`, or `None` for an empty instance.
    pub fn span(&self) -> Option<Interval> {
        let start = self.jobs.iter().map(|j| &j.release).min()?;
        let end = self.jobs.iter().map(|j| &j.deadline).max()?;
        Some(Interval::new(start.clone(), end.clone()))
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Instance::new(alpha, self.processors, self.jobs.clone())
    }

    pub fn with_processors(&self, processors: usize) -> Result<Self> {
        Instance::new(self.alpha, processors, self.jobs.clone())
    }

    /// `w_max / w_min`, or 1 for an empty instance.
    pub fn work_ratio(&self) -> f64 {
        let works: Vec<f64> = self.jobs.iter().map(Job::work_f64).collect();
        let max = works.iter().cloned().fold(f64::MIN, f64::max);
        let min = works.iter().cloned().fold(f64::MAX, f64::min);
        if works.is_empty() {
            1.0
        } else {
            max / min
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must be > 1, got {alpha}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct HetProcessor {
    pub id: String,
    pub alpha: f64,
}

/// Where and how a job may run on one heterogeneous processor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HetEntry {
    pub release: Rational,
    pub deadline: Rational,
    pub work: Rational,
}

impl HetEntry {
    pub fn life(&self) -> Interval {
        Interval::new(self.release.clone(), self.deadline.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HetJob {
    pub id: JobId,
    /// Processor id → entry. A missing processor means the job cannot run there.
    pub entries: BTreeMap<String, HetEntry>,
}

/// Heterogeneous instance: per-processor exponents, and per-(job, processor)
/// life intervals and works.
#[derive(Clone, Debug, PartialEq)]
pub struct HeterogeneousInstance {
    alpha: f64,
    processors: Vec<HetProcessor>,
    jobs: Vec<HetJob>,
}

impl HeterogeneousInstance {
    pub fn new(alpha: f64, processors: Vec<HetProcessor>, jobs: Vec<HetJob>) -> Result<Self> {
        check_alpha(alpha)?;
        let mut ids = BTreeSet::new();
        for p in &processors {
            if !ids.insert(p.id.as_str()) {
                return Err(Error::Domain(format!("duplicate processor id {}", p.id)));
            }
            if !(p.alpha > 1.0 && p.alpha <= alpha) {
                return Err(Error::Domain(format!(
                    "processor {}: alpha {} must lie in (1, {alpha}]",
                    p.id, p.alpha
                )));
            }
        }
        let mut job_ids = BTreeSet::new();
        for job in &jobs {
            if !job_ids.insert(job.id) {
                return Err(Error::Domain(format!("duplicate job id {}", job.id)));
            }
            if job.entries.is_empty() {
                return Err(Error::Domain(format!(
                    "job {} has no usable processor",
                    job.id
                )));
            }
            for (p, e) in &job.entries {
                if !ids.contains(p.as_str()) {
                    return Err(Error::Domain(format!(
                        "job {}: unknown processor {p}",
                        job.id
                    )));
                }
                if e.release >= e.deadline {
                    return Err(Error::Domain(format!(
                        "job {} on {p}: empty life interval [{}, {}]",
                        job.id, e.release, e.deadline
                    )));
                }
                if !e.work.is_positive() {
                    return Err(Error::Domain(format!(
                        "job {} on {p}: work must be positive",
                        job.id
                    )));
                }
            }
        }
        Ok(HeterogeneousInstance {
            alpha,
            processors,
            jobs,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn processors(&self) -> &[HetProcessor] {
        &self.processors
    }

    pub fn processor(&self, id: &str) -> Option<&HetProcessor> {
        self.processors.iter().find(|p| p.id == id)
    }

    pub fn jobs(&self) -> &[HetJob] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> Option<&HetJob> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn entry(&self, job: JobId, processor: &str) -> Option<&HetEntry> {
        self.job(job)?.entries.get(processor)
    }

    /// Ratio between the largest and the smallest work over all entries.
    pub fn work_ratio(&self) -> f64 {
        let works = self
            .jobs
            .iter()
            .flat_map(|j| j.entries.values())
            .map(|e| crate::time::to_f64(&e.work));
        let (lo, hi) = works.fold((f64::MAX, f64::MIN), |(lo, hi), w| (lo.min(w), hi.max(w)));
        if hi < lo {
            1.0
        } else {
            hi / lo
        }
    }
}

/// One job's placement: processor (optional for the pooled homogeneous
/// variant) and execution interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub job: JobId,
    pub processor: Option<String>,
    pub start: Rational,
    pub end: Rational,
}

impl Assignment {
    pub fn new(job: JobId, processor: Option<String>, interval: Interval) -> Self {
        Assignment {
            job,
            processor,
            start: interval.start,
            end: interval.end,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.start.clone(), self.end.clone())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub assignments: Vec<Assignment>,
}

impl Schedule {
    pub fn new(mut assignments: Vec<Assignment>) -> Self {
        assignments.sort_by_key(|a| a.job);
        Schedule { assignments }
    }

    pub fn get(&self, job: JobId) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.job == job)
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::int;

    #[test]
    fn job_rejects_empty_life_and_nonpositive_work() {
        assert!(Job::new(1, int(2), int(2), int(1)).is_err());
        assert!(Job::new(1, int(0), int(2), int(0)).is_err());
        assert!(Job::new(1, int(0), int(2), int(1)).is_ok());
    }

    #[test]
    fn instance_checks_alpha_processors_and_ids() {
        let j = Job::new(1, int(0), int(1), int(1)).unwrap();
        assert!(Instance::new(1.0, 1, vec![j.clone()]).is_err());
        assert!(Instance::new(2.0, 0, vec![j.clone()]).is_err());
        assert!(Instance::new(2.0, 1, vec![j.clone(), j.clone()]).is_err());
        let inst = Instance::new(2.0, 1, vec![j]).unwrap();
        assert_eq!(inst.span(), Some(Interval::new(int(0), int(1))));
    }

    #[test]
    fn processor_names_round_trip() {
        assert_eq!(processor_name(0), "p1");
        assert_eq!(processor_index("p3", 3), Some(2));
        assert_eq!(processor_index("p4", 3), None);
        assert_eq!(processor_index("x1", 3), None);
    }
}
