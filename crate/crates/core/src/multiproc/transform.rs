//! Schedule surgery used to bound what restricting each independent set to
//! its own processor, and then cutting at that set's deadlines, costs.

use std::collections::BTreeMap;

use super::partition::ZonePartition;
use crate::error::{Error, Result};
use crate::instances::{
    processor_index, processor_name, validate_schedule, Assignment, Instance, JobId, Schedule,
};
use crate::time::{frac, int, Interval, Rational};

/// What happened to a job that had to move onto its set's processor.
#[derive(Clone, Debug, PartialEq)]
pub enum Move {
    /// Shares the overlap of its interval with `partner`'s interval,
    /// splitting it in proportion to work.
    Paired { partner: JobId },
    /// Runs in the middle fifth of its old interval.
    MiddleFifth,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Moved {
    pub job: JobId,
    pub how: Move,
}

fn require_valid(schedule: &Schedule, instance: &Instance) -> Result<()> {
    let v = validate_schedule(schedule, instance);
    if let Some(first) = v.first() {
        return Err(Error::Domain(format!("input schedule is invalid: {first}")));
    }
    if let Some(a) = schedule.assignments.iter().find(|a| a.processor.is_none()) {
        return Err(Error::Domain(format!("job {} has no processor", a.job)));
    }
    Ok(())
}

fn proc_of(a: &Assignment, m: usize) -> usize {
    processor_index(a.processor.as_deref().expect("validated"), m).expect("validated")
}

/// Moves every job of each set onto that set's processor. Jobs already
/// there stay put. A job `j` moving onto `p_i` pairs with the job `j'` on
/// `p_i` whose interval overlaps its own the most, provided the overlap is at
/// least 2/5 of the shorter of the two; otherwise the middle fifth of `j`'s
/// interval is free on `p_i` and `j` runs there.
///
/// Jobs of other sets still sitting on `p_i` are ignored: they leave for
/// their own processor anyway, and pairing with them would let a job be
/// shrunk once as a partner and again when it moves. Partners are therefore
/// always jobs outside every set, each paired at most once, so every job's
/// energy is charged at most once.
pub fn transform_assign_to_processors(
    instance: &Instance,
    schedule: &Schedule,
    partition: &ZonePartition,
) -> Result<(Schedule, Vec<Moved>)> {
    require_valid(schedule, instance)?;
    let m = instance.processors();
    let mut current: BTreeMap<JobId, (usize, Interval)> = schedule
        .assignments
        .iter()
        .map(|a| (a.job, (proc_of(a, m), a.interval())))
        .collect();
    let work = |id: JobId| instance.job(id).expect("validated").work.clone();
    let two_fifths = frac(2, 5);
    let mut moves = Vec::new();

    for p in 0..partition.processors() {
        for member in partition.set(p).members() {
            let (q, iv) = current[&member.id].clone();
            if q == p {
                continue;
            }
            let stays = |id: JobId| partition.processor_of(id).is_none_or(|k| k == p);
            let best = current
                .iter()
                .filter(|(id, (qq, _))| *qq == p && partition.processor_of(**id).is_none())
                .filter_map(|(id, (_, other))| {
                    let o = iv.intersection(other)?;
                    let shorter = if iv.len() < other.len() {
                        iv.len()
                    } else {
                        other.len()
                    };
                    (o.len() >= &two_fifths * shorter).then_some((*id, o))
                })
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)));
            match best {
                Some((partner, overlap)) => {
                    let (wj, wp) = (work(member.id), work(partner));
                    let j_len = overlap.len() * &wj / (&wj + &wp);
                    let (_, partner_iv) = &current[&partner];
                    let partner_first =
                        (partner_iv.start.clone(), partner) < (iv.start.clone(), member.id);
                    let (j_iv, p_iv) = if partner_first {
                        let cut = &overlap.end - &j_len;
                        (
                            Interval::new(cut.clone(), overlap.end.clone()),
                            Interval::new(overlap.start.clone(), cut),
                        )
                    } else {
                        let cut = &overlap.start + &j_len;
                        (
                            Interval::new(overlap.start.clone(), cut.clone()),
                            Interval::new(cut, overlap.end.clone()),
                        )
                    };
                    current.insert(member.id, (p, j_iv));
                    current.insert(partner, (p, p_iv));
                    moves.push(Moved {
                        job: member.id,
                        how: Move::Paired { partner },
                    });
                }
                None => {
                    let fifth = iv.len() / int(5);
                    let mid =
                        Interval::new(&iv.start + &fifth * int(2), &iv.start + &fifth * int(3));
                    if let Some((other, _)) = current
                        .iter()
                        .find(|(id, (qq, o))| *qq == p && stays(**id) && o.overlaps(&mid))
                    {
                        return Err(Error::ContractViolation(format!(
                            "middle fifth {mid} of job {} is not idle on {}: job {other} runs there",
                            member.id,
                            processor_name(p)
                        )));
                    }
                    current.insert(member.id, (p, mid));
                    moves.push(Moved {
                        job: member.id,
                        how: Move::MiddleFifth,
                    });
                }
            }
        }
    }
    let out = Schedule::new(
        current
            .into_iter()
            .map(|(job, (p, iv))| Assignment::new(job, Some(processor_name(p)), iv))
            .collect(),
    );
    if let Some(v) = validate_schedule(&out, instance).first() {
        return Err(Error::ContractViolation(format!(
            "reassignment broke the schedule: {v}"
        )));
    }
    Ok((out, moves))
}

/// Keeps, for every interval on `p_i` that crosses one deadline of the set
/// of `p_i`, its longer side (the left one on ties).
pub fn cut_at_zone_boundaries(
    instance: &Instance,
    schedule: &Schedule,
    partition: &ZonePartition,
) -> Result<(Schedule, Vec<JobId>)> {
    require_valid(schedule, instance)?;
    let m = instance.processors();
    for p in 0..partition.processors() {
        for j in partition.set(p).members() {
            let a = schedule
                .get(j.id)
                .ok_or_else(|| Error::Domain(format!("job {} is not scheduled", j.id)))?;
            if proc_of(a, m) != p {
                return Err(Error::Domain(format!(
                    "job {} belongs on {} but runs on {}",
                    j.id,
                    processor_name(p),
                    a.processor.as_deref().unwrap_or("?")
                )));
            }
        }
    }
    let deadlines: Vec<Vec<Rational>> = (0..partition.processors())
        .map(|p| partition.deadlines(p))
        .collect();
    let mut changed = Vec::new();
    let mut out = Vec::with_capacity(schedule.len());
    for a in &schedule.assignments {
        let iv = a.interval();
        let p = proc_of(a, m);
        let inside: Vec<&Rational> = deadlines
            .get(p)
            .map(|ds| {
                ds.iter()
                    .filter(|d| iv.contains_point_interior(d))
                    .collect()
            })
            .unwrap_or_default();
        let kept = match inside.as_slice() {
            [] => iv,
            [d] => {
                changed.push(a.job);
                let left = Interval::new(iv.start.clone(), (*d).clone());
                let right = Interval::new((*d).clone(), iv.end.clone());
                if left.len() >= right.len() {
                    left
                } else {
                    right
                }
            }
            _ => {
                return Err(Error::ContractViolation(format!(
                    "interval {iv} of job {} on {} spans {} zone boundaries",
                    a.job,
                    processor_name(p),
                    inside.len()
                )))
            }
        };
        out.push(Assignment::new(a.job, a.processor.clone(), kept));
    }
    Ok((Schedule::new(out), changed))
}
