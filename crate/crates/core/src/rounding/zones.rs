use std::fmt;

use super::GoodIndependentSet;
use crate::error::{Error, Result};
use crate::instances::{Instance, Job};
use crate::lp1::{FracEntry, FractionalSolution};
use crate::time::{int, pow2, Interval, Rational};

/// Mass on an interval crossing two deadlines that is treated as numerical
/// noise and dropped instead of reported.
pub const CROSSING_NOISE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// Anchored at the zone's left deadline; holds jobs released by then.
    Start,
    /// Anchored at the zone's right deadline; holds jobs due no earlier.
    End,
}

/// Half-open-ended slice of a zone: `[d_s, d_s + gap/2^depth]` on the start
/// side or `[d_e - gap/2^depth, d_e]` on the end side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subzone {
    pub zone: usize,
    pub zone_interval: Interval,
    pub side: Side,
    pub depth: u32,
}

impl Subzone {
    pub fn interval(&self) -> Interval {
        let z = &self.zone_interval;
        let width = z.len() / pow2(self.depth);
        match self.side {
            Side::Start => Interval::new(z.start.clone(), &z.start + width),
            Side::End => Interval::new(&z.end - width, z.end.clone()),
        }
    }

    /// `self ⊆ other`.
    pub fn is_inside(&self, other: &Subzone) -> bool {
        self.zone == other.zone && self.side == other.side && self.depth >= other.depth
    }
}

impl fmt::Display for Subzone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Start => "start",
            Side::End => "end",
        };
        write!(
            f,
            "{} (zone {}, {side} side, depth {})",
            self.interval(),
            self.zone_interval,
            self.depth
        )
    }
}

fn zone_containing(zones: &[Interval], iv: &Interval) -> Option<usize> {
    zones.iter().position(|z| z.contains(iv))
}

fn span_of(instance: &Instance) -> Result<Interval> {
    instance
        .span()
        .ok_or_else(|| Error::Domain("instance has no jobs".into()))
}

/// Which side of `zone` a job with support there belongs to. Jobs covering
/// the whole zone go to the end side.
fn side_of(job: &Job, zone: &Interval) -> Result<Side> {
    if job.deadline >= zone.end {
        Ok(Side::End)
    } else if job.release <= zone.start {
        Ok(Side::Start)
    } else {
        Err(Error::ContractViolation(format!(
            "job {} with life {} lies strictly inside zone {}; the independent set is not good",
            job.id,
            job.life(),
            zone
        )))
    }
}

/// Moves every support interval that crosses one deadline of `gis` onto its
/// longer side of that deadline (the left side on ties).
pub fn split_at_deadlines(
    x: &FractionalSolution,
    gis: &GoodIndependentSet,
    instance: &Instance,
) -> Result<FractionalSolution> {
    let deadlines = gis.deadlines();
    let mut out = Vec::with_capacity(x.entries().len());
    for e in x.entries() {
        let inside: Vec<&Rational> = deadlines
            .iter()
            .filter(|d| e.interval.contains_point_interior(d))
            .collect();
        let interval = match inside.as_slice() {
            [] => e.interval.clone(),
            [d] => {
                let left = Interval::new(e.interval.start.clone(), (*d).clone());
                let right = Interval::new((*d).clone(), e.interval.end.clone());
                if left.len() >= right.len() {
                    left
                } else {
                    right
                }
            }
            _ if e.value <= CROSSING_NOISE => continue,
            _ => {
                return Err(Error::ContractViolation(format!(
                    "job {} has mass {} on {}, which crosses {} deadlines of the independent set; \
                     the non-preemption constraint must hold upstream",
                    e.job,
                    e.value,
                    e.interval,
                    inside.len()
                )))
            }
        };
        out.push(FracEntry {
            job: e.job,
            interval,
            value: e.value,
        });
    }
    FractionalSolution::new(out, instance, None, 0.0)
}

/// Halves every support interval toward the zone boundary on its job's
/// side, so that it lands in a subzone contained in the job's life.
pub fn compress_to_subzones(
    y: &FractionalSolution,
    gis: &GoodIndependentSet,
    instance: &Instance,
) -> Result<FractionalSolution> {
    let zones = gis.zones(&span_of(instance)?);
    let two = int(2);
    let mut out = Vec::with_capacity(y.entries().len());
    for e in y.entries() {
        let zi = zone_containing(&zones, &e.interval).ok_or_else(|| {
            Error::ContractViolation(format!(
                "support interval {} of job {} crosses a deadline of the independent set",
                e.interval, e.job
            ))
        })?;
        let zone = &zones[zi];
        let job = instance
            .job(e.job)
            .expect("entry validated against instance");
        let (s, t) = (&e.interval.start, &e.interval.end);
        let interval = match side_of(job, zone)? {
            Side::Start => Interval::new((s + &zone.start) / &two, (t + &zone.start) / &two),
            Side::End => Interval::new((s + &zone.end) / &two, (t + &zone.end) / &two),
        };
        out.push(FracEntry {
            job: e.job,
            interval,
            value: e.value,
        });
    }
    FractionalSolution::new(out, instance, None, 0.0)
}

/// The innermost subzone holding a compressed support interval of `job`.
pub fn locate_subzone(zones: &[Interval], job: &Job, interval: &Interval) -> Result<Subzone> {
    let zone = zone_containing(zones, interval).ok_or_else(|| {
        Error::ContractViolation(format!(
            "interval {interval} of job {} is not inside a single zone",
            job.id
        ))
    })?;
    let zone_interval = zones[zone].clone();
    let side = side_of(job, &zone_interval)?;
    let reach = match side {
        Side::Start => &interval.end - &zone_interval.start,
        Side::End => &zone_interval.end - &interval.start,
    };
    let frac = reach / zone_interval.len();
    if frac > pow2(1).recip() {
        return Err(Error::ContractViolation(format!(
            "interval {interval} of job {} reaches past the middle of zone {zone_interval}",
            job.id
        )));
    }
    let mut depth = 1;
    while frac <= pow2(depth + 1).recip() {
        depth += 1;
    }
    Ok(Subzone {
        zone,
        zone_interval,
        side,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rounding::good_independent_set;
    use crate::time::frac;

    fn job(id: u64, r: i64, d: i64) -> Job {
        Job::new(id, int(r), int(d), int(1)).unwrap()
    }

    fn single(inst: &Instance, job: u64, s: Rational, e: Rational) -> FractionalSolution {
        let entry = FracEntry {
            job,
            interval: Interval::new(s, e),
            value: 1.0,
        };
        FractionalSolution::new([entry], inst, None, 0.0).unwrap()
    }

    #[test]
    fn split_keeps_the_longer_side() {
        let inst = Instance::new(2.0, 1, vec![job(1, 0, 1), job(2, 0, 3)]).unwrap();
        let gis = good_independent_set(inst.jobs());
        assert_eq!(gis.deadlines(), vec![int(1)]);
        let x = single(&inst, 2, int(0), int(3));
        let y = split_at_deadlines(&x, &gis, &inst).unwrap();
        assert_eq!(y.entries()[0].interval, Interval::new(int(1), int(3)));
        let ratio = y.value() / x.value();
        assert!((ratio - 1.5f64).abs() < 1e-12);

        // Endpoint on a deadline: untouched.
        let x = single(&inst, 2, int(1), int(3));
        assert_eq!(split_at_deadlines(&x, &gis, &inst).unwrap(), x);
    }

    #[test]
    fn split_tie_goes_left() {
        let inst = Instance::new(3.0, 1, vec![job(1, 0, 1), job(2, 0, 2)]).unwrap();
        let gis = good_independent_set(inst.jobs());
        let x = single(&inst, 2, int(0), int(2));
        let y = split_at_deadlines(&x, &gis, &inst).unwrap();
        assert_eq!(y.entries()[0].interval, Interval::new(int(0), int(1)));
        assert!((y.value() / x.value() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn split_rejects_double_crossings() {
        let inst = Instance::new(2.0, 1, vec![job(1, 0, 1), job(2, 1, 2), job(3, 0, 3)]).unwrap();
        let gis = good_independent_set(inst.jobs());
        let x = single(&inst, 3, int(0), int(3));
        assert!(matches!(
            split_at_deadlines(&x, &gis, &inst),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn compression_toward_either_side() {
        // Zone [0, 5] between the deadlines of jobs 1 and 2.
        let jobs = vec![job(1, -1, 0), job(2, 4, 5), job(3, -1, 3), job(4, 1, 5)];
        let inst = Instance::new(2.0, 1, jobs).unwrap();
        let gis = good_independent_set(inst.jobs());
        assert_eq!(gis.deadlines(), vec![int(0), int(5)]);
        // Job 3 is due inside the zone [0, 5]: start side.
        let y = single(&inst, 3, int(1), int(3));
        let z = compress_to_subzones(&y, &gis, &inst).unwrap();
        assert_eq!(
            z.entries()[0].interval,
            Interval::new(frac(1, 2), frac(3, 2))
        );

        let zones = gis.zones(&inst.span().unwrap());
        let sz = locate_subzone(&zones, inst.job(3).unwrap(), &z.entries()[0].interval).unwrap();
        assert_eq!((sz.side, sz.depth), (Side::Start, 1));
    }

    #[test]
    fn spec_zone_examples() {
        // Zone [0, 4]; an E job due at 3 and an S job released at 1.
        let jobs = vec![job(1, -2, 0), job(2, 3, 4), job(3, 0, 3), job(4, 1, 4)];
        let inst = Instance::new(2.0, 1, jobs).unwrap();
        let gis = GoodIndependentSet::from_jobs(&[inst.jobs()[0].clone(), inst.jobs()[1].clone()])
            .unwrap();
        let zones = gis.zones(&inst.span().unwrap());
        assert_eq!(zones[1], Interval::new(int(0), int(4)));

        let z = compress_to_subzones(&single(&inst, 3, int(1), int(3)), &gis, &inst).unwrap();
        let iv = &z.entries()[0].interval;
        assert_eq!(iv, &Interval::new(frac(1, 2), frac(3, 2)));
        let sz = locate_subzone(&zones, inst.job(3).unwrap(), iv).unwrap();
        assert_eq!(sz.interval(), Interval::new(int(0), int(2)));

        let z = compress_to_subzones(&single(&inst, 4, int(1), int(3)), &gis, &inst).unwrap();
        let iv = &z.entries()[0].interval;
        assert_eq!(iv, &Interval::new(frac(5, 2), frac(7, 2)));
        let sz = locate_subzone(&zones, inst.job(4).unwrap(), iv).unwrap();
        assert_eq!(sz.interval(), Interval::new(int(2), int(4)));
    }

    #[test]
    fn depth_follows_the_far_endpoint() {
        let jobs = vec![job(1, -2, 0), job(2, 7, 8), job(3, 0, 7)];
        let inst = Instance::new(2.0, 1, jobs).unwrap();
        let gis = GoodIndependentSet::from_jobs(&inst.jobs()[..2]).unwrap();
        let zones = gis.zones(&inst.span().unwrap());
        // Zone [0, 8]; e = 3 lies in (8/4, 8/2], so depth 2.
        let z = compress_to_subzones(&single(&inst, 3, int(0), int(3)), &gis, &inst).unwrap();
        let sz = locate_subzone(&zones, inst.job(3).unwrap(), &z.entries()[0].interval).unwrap();
        assert_eq!(sz.depth, 2);
        assert_eq!(sz.interval(), Interval::new(int(0), int(2)));
        // e = 2 is exactly 8/4, which belongs to (8/8, 8/4]: depth 3.
        let z = compress_to_subzones(&single(&inst, 3, int(0), int(2)), &gis, &inst).unwrap();
        let sz = locate_subzone(&zones, inst.job(3).unwrap(), &z.entries()[0].interval).unwrap();
        assert_eq!(sz.depth, 3);
        assert_eq!(sz.interval(), Interval::new(int(0), int(1)));
    }

    #[test]
    fn job_inside_a_zone_is_reported() {
        let jobs = vec![job(1, -2, 0), job(2, 8, 9), job(3, 2, 5)];
        let inst = Instance::new(2.0, 1, jobs).unwrap();
        let gis = GoodIndependentSet::from_jobs(&inst.jobs()[..2]).unwrap();
        let y = single(&inst, 3, int(2), int(5));
        assert!(matches!(
            compress_to_subzones(&y, &gis, &inst),
            Err(Error::ContractViolation(_))
        ));
    }
}
