use crate::error::Result;
use crate::instances::{HetEntry, HetJob, HetProcessor, HeterogeneousInstance, JobId};
use crate::time::{int, Rational};

use super::tdm::ThreeDMInstance;

/// Every job of a reduction instance lives on `[0, HORIZON]`.
pub const HORIZON: i64 = 3;
pub const LIGHT_WORK: i64 = 1;
pub const HEAVY_WORK: i64 = 4;
pub const DUMMY_WORK: i64 = 3;

/// The scheduling instance built from a 3DM instance, with the maps back to
/// elements and triples.
///
/// Element `k` (in [`ThreeDMInstance::elements`] order) is job `k + 1`;
/// dummy jobs are `3q + 1 ..= 5q`. Triple `t` runs on machine `T{t+1}`,
/// the remaining `3q - |T|` machines are `D1, D2, ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionArtifacts {
    pub instance: HeterogeneousInstance,
    pub tdm: ThreeDMInstance,
    pub element_jobs: Vec<JobId>,
    pub triple_machines: Vec<String>,
    pub dummy_machines: Vec<String>,
    pub dummy_jobs: Vec<JobId>,
}

impl ReductionArtifacts {
    pub fn q(&self) -> usize {
        self.tdm.q()
    }

    pub fn alpha(&self) -> f64 {
        self.instance.alpha()
    }

    pub fn element_of(&self, job: JobId) -> Option<usize> {
        let k = job.checked_sub(1)? as usize;
        (k < 3 * self.q()).then_some(k)
    }

    pub fn triple_of(&self, machine: &str) -> Option<usize> {
        self.triple_machines.iter().position(|m| m == machine)
    }

    /// Machines in instance order: triple machines, then dummy machines.
    pub fn machines(&self) -> impl Iterator<Item = &String> {
        self.triple_machines.iter().chain(&self.dummy_machines)
    }

    /// True when `job` is an element job and `machine` is the machine of a
    /// triple containing that element.
    pub fn is_home(&self, job: JobId, machine: &str) -> bool {
        match (self.element_of(job), self.triple_of(machine)) {
            (Some(e), Some(t)) => self.tdm.triple_elements(t).contains(&e),
            _ => false,
        }
    }

    /// Triple machines whose triple contains element `e`, in triple order.
    pub fn homes(&self, e: usize) -> Vec<&str> {
        (0..self.triple_machines.len())
            .filter(|&t| self.tdm.triple_elements(t).contains(&e))
            .map(|t| self.triple_machines[t].as_str())
            .collect()
    }

    pub fn work(&self, job: JobId, machine: &str) -> Rational {
        self.instance
            .entry(job, machine)
            .map(|e| e.work.clone())
            .expect("every job runs on every machine")
    }
}

pub fn reduce_f(tdm: &ThreeDMInstance, alpha: f64) -> Result<ReductionArtifacts> {
    let q = tdm.q();
    let triples = tdm.triples().len();
    let triple_machines: Vec<String> = (1..=triples).map(|t| format!("T{t}")).collect();
    let dummy_machines: Vec<String> = (1..=3 * q - triples).map(|d| format!("D{d}")).collect();
    let processors = triple_machines
        .iter()
        .chain(&dummy_machines)
        .map(|id| HetProcessor {
            id: id.clone(),
            alpha,
        })
        .collect();
    let entry = |work: i64| HetEntry {
        release: int(0),
        deadline: int(HORIZON),
        work: int(work),
    };
    let mut jobs = Vec::with_capacity(5 * q);
    for e in 0..3 * q {
        let entries = triple_machines
            .iter()
            .enumerate()
            .map(|(t, m)| {
                let w = if tdm.triple_elements(t).contains(&e) {
                    LIGHT_WORK
                } else {
                    HEAVY_WORK
                };
                (m.clone(), entry(w))
            })
            .chain(
                dummy_machines
                    .iter()
                    .map(|m| (m.clone(), entry(HEAVY_WORK))),
            )
            .collect();
        jobs.push(HetJob {
            id: e as JobId + 1,
            entries,
        });
    }
    let dummy_jobs: Vec<JobId> = (3 * q as JobId + 1..=5 * q as JobId).collect();
    for &id in &dummy_jobs {
        let entries = triple_machines
            .iter()
            .chain(&dummy_machines)
            .map(|m| (m.clone(), entry(DUMMY_WORK)))
            .collect();
        jobs.push(HetJob { id, entries });
    }
    Ok(ReductionArtifacts {
        instance: HeterogeneousInstance::new(alpha, processors, jobs)?,
        tdm: tdm.clone(),
        element_jobs: (1..=3 * q as JobId).collect(),
        triple_machines,
        dummy_machines,
        dummy_jobs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::tdm::{parse_tdm, planted_instance};

    #[test]
    fn one_triple() {
        let tdm = parse_tdm(r#"{"q": 1, "triples": [["a","b","c"]]}"#).unwrap();
        let r = reduce_f(&tdm, 2.0).unwrap();
        assert_eq!(r.instance.processors().len(), 3);
        assert_eq!(r.instance.jobs().len(), 5);
        assert_eq!(r.triple_machines, vec!["T1"]);
        assert_eq!(r.dummy_machines, vec!["D1", "D2"]);
        assert_eq!(r.work(1, "T1"), int(1));
        assert_eq!(r.work(1, "D1"), int(4));
        assert_eq!(r.work(4, "T1"), int(3));
    }

    #[test]
    fn works_follow_membership() {
        let tdm = planted_instance(2, 3, 4).unwrap();
        let r = reduce_f(&tdm, 3.0).unwrap();
        assert_eq!(r.instance.processors().len(), 6);
        assert_eq!(r.instance.jobs().len(), 10);
        for job in r.instance.jobs() {
            for (m, e) in &job.entries {
                assert_eq!((e.release.clone(), e.deadline.clone()), (int(0), int(3)));
                let expected = if r.dummy_jobs.contains(&job.id) {
                    3
                } else if r.is_home(job.id, m) {
                    1
                } else {
                    4
                };
                assert_eq!(e.work, int(expected), "job {} on {m}", job.id);
            }
        }
    }
}
