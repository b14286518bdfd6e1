//! Optimal preemptive single-processor schedule (critical-interval peeling).
//!
//! Works in original time throughout: instead of contracting the timeline
//! after each critical interval, the remaining jobs' windows are clipped to
//! the free time and the density of a candidate window divides by its free
//! length. All arithmetic is exact.

use crate::error::{Error, Result};
use crate::instances::{Instance, JobId};
use crate::time::{to_f64, Interval, Rational};
use num_traits::Zero;

/// One job running at a constant speed over an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedPiece {
    pub job: JobId,
    pub interval: Interval,
    pub speed: Rational,
}

/// Piecewise-constant speed, with each piece owned by one job.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpeedProfile {
    pieces: Vec<SpeedPiece>,
    /// Densities of the critical intervals in extraction order.
    levels: Vec<Rational>,
}

impl SpeedProfile {
    /// Pieces sorted by start time.
    pub fn pieces(&self) -> &[SpeedPiece] {
        &self.pieces
    }

    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    /// Speed at `t` (right-continuous); zero when idle.
    pub fn speed_at(&self, t: &Rational) -> Rational {
        self.pieces
            .iter()
            .find(|p| &p.interval.start <= t && t < &p.interval.end)
            .map(|p| p.speed.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn allocated_work(&self, job: JobId) -> Rational {
        self.pieces
            .iter()
            .filter(|p| p.job == job)
            .map(|p| &p.speed * p.interval.len())
            .sum()
    }

    pub fn energy(&self, alpha: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| to_f64(&p.speed).powf(alpha) * p.interval.len_f64())
            .sum()
    }
}

#[derive(Clone)]
struct Pending {
    id: JobId,
    release: Rational,
    deadline: Rational,
    work: Rational,
}

/// Returns the optimal preemptive profile and its energy.
pub fn yds_preemptive(instance: &Instance) -> Result<(SpeedProfile, f64)> {
    if instance.processors() != 1 {
        return Err(Error::Domain(format!(
            "the preemptive oracle is single-processor, instance has {}",
            instance.processors()
        )));
    }
    let alpha = instance.alpha();
    let mut pending: Vec<Pending> = instance
        .jobs()
        .iter()
        .map(|j| Pending {
            id: j.id,
            release: j.release.clone(),
            deadline: j.deadline.clone(),
            work: j.work.clone(),
        })
        .collect();
    // Disjoint, sorted, merged busy intervals.
    let mut busy: Vec<Interval> = Vec::new();
    let mut profile = SpeedProfile::default();
    let mut energy = 0.0;

    while !pending.is_empty() {
        for p in pending.iter_mut() {
            p.release = push_out_of_busy(&busy, &p.release, true);
            p.deadline = push_out_of_busy(&busy, &p.deadline, false);
        }
        let mut starts: Vec<&Rational> = pending.iter().map(|p| &p.release).collect();
        starts.sort();
        starts.dedup();
        let mut ends: Vec<&Rational> = pending.iter().map(|p| &p.deadline).collect();
        ends.sort();
        ends.dedup();

        // (density, start, free length, end)
        let mut best: Option<(Rational, Rational, Rational, Rational)> = None;
        for &t in &starts {
            for &u in ends.iter().filter(|u| **u > t) {
                let work: Rational = pending
                    .iter()
                    .filter(|p| &p.release >= t && &p.deadline <= u)
                    .map(|p| p.work.clone())
                    .sum();
                if work.is_zero() {
                    continue;
                }
                let free = free_length(&busy, t, u);
                if free.is_zero() {
                    return Err(Error::Infeasible(format!(
                        "jobs inside [{t}, {u}] have no free time left"
                    )));
                }
                let density = work / &free;
                let better = match &best {
                    None => true,
                    Some((d, s, f, _)) => {
                        density > *d || (density == *d && (t < s || (t == s && free < *f)))
                    }
                };
                if better {
                    best = Some((density, t.clone(), free, u.clone()));
                }
            }
        }
        let (density, t, free, u) = best.expect("at least one pending job");
        let (inside, rest): (Vec<Pending>, Vec<Pending>) = pending
            .into_iter()
            .partition(|p| p.release >= t && p.deadline <= u);
        pending = rest;

        let segments = free_segments(&busy, &t, &u);
        profile
            .pieces
            .extend(edf_in_segments(&inside, &segments, &density));
        energy += to_f64(&density).powf(alpha) * to_f64(&free);
        profile.levels.push(density);
        busy.extend(segments);
        busy.sort();
        busy = merge(busy);
    }
    profile
        .pieces
        .sort_by(|a, b| a.interval.start.cmp(&b.interval.start));
    Ok((profile, energy))
}

/// Moves a release forward (or a deadline backward) out of a busy block.
fn push_out_of_busy(busy: &[Interval], t: &Rational, forward: bool) -> Rational {
    for b in busy {
        if b.contains_point_interior(t) || (forward && &b.start == t) || (!forward && &b.end == t) {
            return if forward {
                b.end.clone()
            } else {
                b.start.clone()
            };
        }
    }
    t.clone()
}

fn free_length(busy: &[Interval], a: &Rational, b: &Rational) -> Rational {
    let window = Interval::new(a.clone(), b.clone());
    let taken: Rational = busy
        .iter()
        .filter_map(|x| x.intersection(&window))
        .map(|x| x.len())
        .sum();
    window.len() - taken
}

fn free_segments(busy: &[Interval], a: &Rational, b: &Rational) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut cur = a.clone();
    for x in busy {
        if &x.end <= a || &x.start >= b {
            continue;
        }
        if x.start > cur {
            out.push(Interval::new(cur.clone(), x.start.clone()));
        }
        if x.end > cur {
            cur = x.end.clone();
        }
    }
    if &cur < b {
        out.push(Interval::new(cur, b.clone()));
    }
    out
}

fn merge(sorted: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.start <= last.end => {
                if iv.end > last.end {
                    last.end = iv.end;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Earliest-deadline-first at constant `speed` over the given free segments.
fn edf_in_segments(jobs: &[Pending], segments: &[Interval], speed: &Rational) -> Vec<SpeedPiece> {
    let mut left: Vec<Rational> = jobs.iter().map(|j| &j.work / speed).collect();
    let mut pieces = Vec::new();
    for seg in segments {
        let mut cur = seg.start.clone();
        while cur < seg.end {
            let ready = (0..jobs.len())
                .filter(|&k| left[k] > Rational::zero() && jobs[k].release <= cur)
                .min_by(|&a, &b| {
                    jobs[a]
                        .deadline
                        .cmp(&jobs[b].deadline)
                        .then(jobs[a].id.cmp(&jobs[b].id))
                });
            let next_release = jobs
                .iter()
                .enumerate()
                .filter(|(k, j)| left[*k] > Rational::zero() && j.release > cur)
                .map(|(_, j)| &j.release)
                .min()
                .cloned();
            let Some(k) = ready else {
                match next_release {
                    Some(r) if r < seg.end => {
                        cur = r;
                        continue;
                    }
                    _ => break,
                }
            };
            let mut stop = &cur + &left[k];
            if stop > seg.end {
                stop = seg.end.clone();
            }
            if let Some(r) = next_release {
                if r < stop {
                    stop = r;
                }
            }
            left[k] -= &stop - &cur;
            match pieces.last_mut() {
                Some(SpeedPiece { job, interval, .. })
                    if *job == jobs[k].id && interval.end == cur =>
                {
                    interval.end = stop.clone();
                }
                _ => pieces.push(SpeedPiece {
                    job: jobs[k].id,
                    interval: Interval::new(cur.clone(), stop.clone()),
                    speed: speed.clone(),
                }),
            }
            cur = stop;
        }
    }
    pieces
}
