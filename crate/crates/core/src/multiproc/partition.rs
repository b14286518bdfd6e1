use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::instances::{HetEntry, HetJob, HetProcessor, HeterogeneousInstance, Instance, JobId};
use crate::rounding::{edf_greedy, zones_between, GoodIndependentSet};
use crate::time::{max, min, Interval, Rational};

/// One independent set per processor, and the zones its deadlines cut the
/// instance span into.
#[derive(Clone, Debug, PartialEq)]
pub struct ZonePartition {
    sets: Vec<GoodIndependentSet>,
    residue: Vec<JobId>,
    span: Interval,
}

impl ZonePartition {
    /// Checks that the sets are independent, pairwise disjoint, and at most
    /// one per processor.
    pub fn from_sets(instance: &Instance, sets: &[Vec<JobId>]) -> Result<Self> {
        if sets.len() > instance.processors() {
            return Err(Error::Domain(format!(
                "{} sets for {} processors",
                sets.len(),
                instance.processors()
            )));
        }
        let span = instance
            .span()
            .ok_or_else(|| Error::Domain("instance has no jobs".into()))?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(instance.processors());
        for set in sets {
            let mut jobs = Vec::with_capacity(set.len());
            for &id in set {
                if !seen.insert(id) {
                    return Err(Error::Domain(format!("job {id} appears in two sets")));
                }
                jobs.push(
                    instance
                        .job(id)
                        .ok_or_else(|| Error::Domain(format!("unknown job {id}")))?
                        .clone(),
                );
            }
            out.push(GoodIndependentSet::from_jobs(&jobs)?);
        }
        while out.len() < instance.processors() {
            out.push(GoodIndependentSet::from_jobs(&[])?);
        }
        let residue = instance
            .jobs()
            .iter()
            .map(|j| j.id)
            .filter(|id| !seen.contains(id))
            .collect();
        Ok(ZonePartition {
            sets: out,
            residue,
            span,
        })
    }

    pub fn processors(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, processor: usize) -> &GoodIndependentSet {
        &self.sets[processor]
    }

    pub fn sets(&self) -> &[GoodIndependentSet] {
        &self.sets
    }

    /// Jobs in none of the sets.
    pub fn residue(&self) -> &[JobId] {
        &self.residue
    }

    pub fn span(&self) -> &Interval {
        &self.span
    }

    /// The set (processor index) a job belongs to.
    pub fn processor_of(&self, job: JobId) -> Option<usize> {
        self.sets
            .iter()
            .position(|s| s.members().iter().any(|j| j.id == job))
    }

    pub fn deadlines(&self, processor: usize) -> Vec<Rational> {
        self.sets[processor].deadlines()
    }

    /// Zones of one processor, outer ones clipped to the span.
    pub fn zones(&self, processor: usize) -> Vec<Interval> {
        zones_between(&self.deadlines(processor), &self.span)
    }
}

/// `m` rounds of the earliest-deadline greedy, each drawing from the jobs
/// the previous rounds left over.
pub fn greedy_independent_sets(instance: &Instance) -> Result<ZonePartition> {
    let mut remaining: Vec<_> = instance.jobs().iter().collect();
    let mut sets = Vec::with_capacity(instance.processors());
    for _ in 0..instance.processors() {
        let picked: Vec<JobId> = edf_greedy(remaining.iter().copied())
            .iter()
            .map(|j| j.id)
            .collect();
        remaining.retain(|j| !picked.contains(&j.id));
        sets.push(picked);
    }
    ZonePartition::from_sets(instance, &sets)
}

/// A zone of one processor, seen as a processor of its own.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub id: String,
    pub processor: usize,
    pub zone: usize,
    pub interval: Interval,
}

impl Window {
    pub fn offset(&self) -> &Rational {
        &self.interval.start
    }
}

/// One heterogeneous processor per (processor, zone) pair. Jobs alive for a
/// positive time in a zone get an entry there, in coordinates relative to
/// the zone start, with the life clipped to the zone.
pub fn build_heterogeneous_instance(
    instance: &Instance,
    partition: &ZonePartition,
) -> Result<(HeterogeneousInstance, Vec<Window>)> {
    let mut windows = Vec::new();
    for p in 0..partition.processors() {
        for (l, zone) in partition.zones(p).into_iter().enumerate() {
            windows.push(Window {
                id: format!("p{}:z{}", p + 1, l + 1),
                processor: p,
                zone: l,
                interval: zone,
            });
        }
    }
    let processors = windows
        .iter()
        .map(|w| HetProcessor {
            id: w.id.clone(),
            alpha: instance.alpha(),
        })
        .collect();
    let jobs = instance
        .jobs()
        .iter()
        .map(|j| {
            let mut entries = BTreeMap::new();
            for w in &windows {
                let z = &w.interval;
                let start = max(&j.release, &z.start);
                let end = min(&j.deadline, &z.end);
                if start < end {
                    entries.insert(
                        w.id.clone(),
                        HetEntry {
                            release: start - &z.start,
                            deadline: end - &z.start,
                            work: j.work.clone(),
                        },
                    );
                }
            }
            HetJob { id: j.id, entries }
        })
        .collect();
    Ok((
        HeterogeneousInstance::new(instance.alpha(), processors, jobs)?,
        windows,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Job;
    use crate::time::int;

    fn inst(m: usize, lives: &[(i64, i64)]) -> Instance {
        let jobs = lives
            .iter()
            .enumerate()
            .map(|(i, &(r, d))| Job::new(i as u64 + 1, int(r), int(d), int(1)).unwrap())
            .collect();
        Instance::new(2.0, m, jobs).unwrap()
    }

    #[test]
    fn disjoint_jobs_fill_the_first_set() {
        let p = greedy_independent_sets(&inst(3, &[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(p.set(0).ids(), vec![1, 2, 3]);
        assert!(p.set(1).is_empty() && p.set(2).is_empty());
        assert!(p.residue().is_empty());
    }

    #[test]
    fn identical_lives_spread_out() {
        let p = greedy_independent_sets(&inst(2, &[(0, 2), (0, 2)])).unwrap();
        assert_eq!(p.set(0).ids(), vec![1]);
        assert_eq!(p.set(1).ids(), vec![2]);
    }

    #[test]
    fn single_processor_matches_rounding() {
        let i = inst(1, &[(0, 1), (0, 3), (2, 3), (1, 4)]);
        let p = greedy_independent_sets(&i).unwrap();
        assert_eq!(p.set(0), &crate::rounding::good_independent_set(i.jobs()));
        assert_eq!(p.residue(), &[2, 4]);
    }

    #[test]
    fn windows_clip_to_zones() {
        // Set {1}: deadline 2 cuts [0, 5] into [0, 2] and [2, 5].
        let i = inst(1, &[(0, 2), (1, 5)]);
        let p = greedy_independent_sets(&i).unwrap();
        let (het, windows) = build_heterogeneous_instance(&i, &p).unwrap();
        assert_eq!(windows.len(), 2);
        assert_eq!(windows[1].interval, Interval::new(int(2), int(5)));
        let e = het.entry(2, "p1:z1").unwrap();
        assert_eq!((e.release.clone(), e.deadline.clone()), (int(1), int(2)));
        let e = het.entry(2, "p1:z2").unwrap();
        assert_eq!((e.release.clone(), e.deadline.clone()), (int(0), int(3)));
        assert!(het.entry(1, "p1:z2").is_none());
        let e = het.entry(1, "p1:z1").unwrap();
        assert_eq!(e.life(), Interval::new(int(0), int(2)));
    }

    #[test]
    fn rejects_overlapping_or_repeated_sets() {
        let i = inst(2, &[(0, 2), (1, 3)]);
        assert!(ZonePartition::from_sets(&i, &[vec![1, 2]]).is_err());
        assert!(ZonePartition::from_sets(&i, &[vec![1], vec![1]]).is_err());
        assert!(ZonePartition::from_sets(&i, &[vec![1], vec![2], vec![]]).is_err());
    }
}
