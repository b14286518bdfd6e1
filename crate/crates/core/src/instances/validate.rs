use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{processor_index, HeterogeneousInstance, Instance, JobId, Schedule};
use crate::time::{Interval, Rational};

/// A single way in which a schedule fails to be feasible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownJob {
        job: JobId,
    },
    DuplicateJob {
        job: JobId,
    },
    MissingJob {
        job: JobId,
    },
    Degenerate {
        job: JobId,
    },
    OutsideLife {
        job: JobId,
        interval: Interval,
        life: Interval,
    },
    UnknownProcessor {
        job: JobId,
        processor: String,
    },
    Unassigned {
        job: JobId,
    },
    NotSchedulable {
        job: JobId,
        processor: String,
    },
    Overlap {
        processor: String,
        first: JobId,
        second: JobId,
    },
    /// More than `capacity` execution intervals share the point `at`.
    Overcovered {
        at: Rational,
        count: usize,
        capacity: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownJob { job } => write!(f, "job {job} is not in the instance"),
            Violation::DuplicateJob { job } => write!(f, "job {job} is scheduled more than once"),
            Violation::MissingJob { job } => write!(f, "job {job} is not scheduled"),
            Violation::Degenerate { job } => write!(f, "job {job} has an empty execution interval"),
            Violation::OutsideLife {
                job,
                interval,
                life,
            } => {
                write!(
                    f,
                    "job {job} runs in {interval} outside its life interval {life}"
                )
            }
            Violation::UnknownProcessor { job, processor } => {
                write!(f, "job {job} uses unknown processor {processor}")
            }
            Violation::Unassigned { job } => write!(f, "job {job} has no processor"),
            Violation::NotSchedulable { job, processor } => {
                write!(f, "job {job} cannot run on processor {processor}")
            }
            Violation::Overlap {
                processor,
                first,
                second,
            } => write!(f, "jobs {first} and {second} overlap on {processor}"),
            Violation::Overcovered {
                at,
                count,
                capacity,
            } => {
                write!(
                    f,
                    "{count} execution intervals share time {at} (capacity {capacity})"
                )
            }
        }
    }
}

/// Reports every violation; an empty result means the schedule is feasible.
///
/// Assignments that name a processor must be interior-disjoint per processor.
/// In addition, no point may lie in more than `m` execution intervals, which
/// is the whole constraint for assignments without a processor.
pub fn validate_schedule(schedule: &Schedule, instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = instance.processors();
    let mut seen = BTreeSet::new();
    let mut per_processor: BTreeMap<String, Vec<(JobId, Interval)>> = BTreeMap::new();
    let mut all = Vec::new();

    for a in &schedule.assignments {
        let Some(job) = instance.job(a.job) else {
            out.push(Violation::UnknownJob { job: a.job });
            continue;
        };
        if !seen.insert(a.job) {
            out.push(Violation::DuplicateJob { job: a.job });
            continue;
        }
        let iv = a.interval();
        if iv.is_empty() {
            out.push(Violation::Degenerate { job: a.job });
            continue;
        }
        if !job.life().contains(&iv) {
            out.push(Violation::OutsideLife {
                job: a.job,
                interval: iv.clone(),
                life: job.life(),
            });
        }
        if let Some(p) = &a.processor {
            if processor_index(p, m).is_none() {
                out.push(Violation::UnknownProcessor {
                    job: a.job,
                    processor: p.clone(),
                });
            } else {
                per_processor
                    .entry(p.clone())
                    .or_default()
                    .push((a.job, iv.clone()));
            }
        }
        all.push(iv);
    }
    for job in instance.jobs() {
        if !seen.contains(&job.id) {
            out.push(Violation::MissingJob { job: job.id });
        }
    }
    out.extend(overlaps(per_processor));
    out.extend(overcovered(&all, m));
    out
}

/// Validation for heterogeneous instances: every job needs a processor on
/// which it is schedulable, and intervals are checked against that
/// processor's life interval.
pub fn validate_het_schedule(
    schedule: &Schedule,
    instance: &HeterogeneousInstance,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut per_processor: BTreeMap<String, Vec<(JobId, Interval)>> = BTreeMap::new();
    for a in &schedule.assignments {
        if instance.job(a.job).is_none() {
            out.push(Violation::UnknownJob { job: a.job });
            continue;
        }
        if !seen.insert(a.job) {
            out.push(Violation::DuplicateJob { job: a.job });
            continue;
        }
        let iv = a.interval();
        if iv.is_empty() {
            out.push(Violation::Degenerate { job: a.job });
            continue;
        }
        let Some(p) = &a.processor else {
            out.push(Violation::Unassigned { job: a.job });
            continue;
        };
        if instance.processor(p).is_none() {
            out.push(Violation::UnknownProcessor {
                job: a.job,
                processor: p.clone(),
            });
            continue;
        }
        let Some(entry) = instance.entry(a.job, p) else {
            out.push(Violation::NotSchedulable {
                job: a.job,
                processor: p.clone(),
            });
            continue;
        };
        if !entry.life().contains(&iv) {
            out.push(Violation::OutsideLife {
                job: a.job,
                interval: iv.clone(),
                life: entry.life(),
            });
        }
        per_processor
            .entry(p.clone())
            .or_default()
            .push((a.job, iv));
    }
    for job in instance.jobs() {
        if !seen.contains(&job.id) {
            out.push(Violation::MissingJob { job: job.id });
        }
    }
    out.extend(overlaps(per_processor));
    out
}

fn overlaps(per_processor: BTreeMap<String, Vec<(JobId, Interval)>>) -> Vec<Violation> {
    let mut out = Vec::new();
    for (p, mut list) in per_processor {
        list.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        for i in 0..list.len() {
            for k in i + 1..list.len() {
                if list[k].1.start >= list[i].1.end {
                    break;
                }
                out.push(Violation::Overlap {
                    processor: p.clone(),
                    first: list[i].0,
                    second: list[k].0,
                });
            }
        }
    }
    out
}

/// One violation per maximal stretch where more than `capacity` intervals
/// overlap, reported at the stretch's left end.
fn overcovered(intervals: &[Interval], capacity: usize) -> Vec<Violation> {
    // Ends sort before starts at equal times so touching intervals do not count.
    let mut events: Vec<(&Rational, i32)> = intervals
        .iter()
        .flat_map(|iv| [(&iv.start, 1), (&iv.end, -1)])
        .collect();
    events.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    let mut count = 0usize;
    let mut in_excess = false;
    let mut peak = 0;
    let mut start_at: Option<Rational> = None;
    for (t, delta) in events {
        if delta > 0 {
            count += 1;
        } else {
            count -= 1;
        }
        if count > capacity {
            peak = peak.max(count);
            if !in_excess {
                in_excess = true;
                start_at = Some(t.clone());
            }
        } else if in_excess {
            in_excess = false;
            out.push(Violation::Overcovered {
                at: start_at.take().expect("set on entry"),
                count: peak,
                capacity,
            });
            peak = 0;
        }
    }
    out
}
