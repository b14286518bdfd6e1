//! Turning a fractional single-processor solution into a non-preemptive
//! schedule.
//!
//! The pipeline has four stages, each with a known worst-case energy factor:
//!
//! 1. [`split_at_deadlines`]: intervals crossing a deadline of a good
//!    independent set move to their longer side (at most `2^(α-1)`).
//! 2. [`compress_to_subzones`]: intervals halve toward a zone boundary and
//!    fall into nested subzones (at most `2^(α-1)`).
//! 3. [`min_weight_saturating_matching`] on the [`AssignmentGraph`] picks one
//!    interval length per job (no more than the fractional weight).
//! 4. [`matching_to_schedule`] places each job on a third of its length
//!    (exactly `3^(α-1)`).
//!
//! Finally [`stretch_into_idle`] lets each job grow into the idle time next
//! to it, which never costs energy.

mod assign;
mod independent;
mod zones;

pub use assign::{
    build_assignment_graph, matching_to_schedule, min_weight_saturating_matching,
    spread_over_copies, AssignmentGraph, GraphEdge, GraphMatching, RightVertex, SubzoneLoad,
    SubzoneSlack, SLOT_TOL,
};
pub use independent::{
    edf_greedy, good_independent_set, is_good, zones_between, GoodIndependentSet,
};
pub use zones::{
    compress_to_subzones, locate_subzone, split_at_deadlines, Side, Subzone, CROSSING_NOISE,
};

use crate::error::{Error, Result};
use crate::instances::{energy_of_schedule, Assignment, Instance, Schedule};
use crate::lp1::FractionalSolution;
use crate::time::{max, min, Interval};

/// Shortfall of a job's fractional mass tolerated on input.
pub const MASS_TOL: f64 = 1e-6;
/// Relative slack on the per-stage energy bounds.
pub const STAGE_TOL: f64 = 1e-9;

/// Energies after each stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub e_x: f64,
    pub e_y: f64,
    pub e_z: f64,
    /// Weight of the fractional matching the graph was built from.
    pub w_fractional: f64,
    pub w_match: f64,
    /// Energy of the placed schedule, before stretching.
    pub e_placed: f64,
    pub e_final: f64,
    /// `e_final / e_x`.
    pub ratio: f64,
    /// `12^(α-1)`.
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct Rounded {
    pub schedule: Schedule,
    /// The schedule as placed, before [`stretch_into_idle`].
    pub placed: Schedule,
    pub report: StageReport,
    pub independent_set: GoodIndependentSet,
    pub y: FractionalSolution,
    pub z: FractionalSolution,
    pub graph: AssignmentGraph,
    pub matching: GraphMatching,
    pub slack: Vec<SubzoneSlack>,
}

pub fn round(x: &FractionalSolution, instance: &Instance) -> Result<Schedule> {
    round_detailed(x, instance).map(|r| r.schedule)
}

/// Runs the whole pipeline and checks every stage bound on the way.
pub fn round_detailed(x: &FractionalSolution, instance: &Instance) -> Result<Rounded> {
    if instance.processors() != 1 {
        return Err(Error::Domain(format!(
            "rounding is single-processor, instance has {}",
            instance.processors()
        )));
    }
    if instance.is_empty() {
        return Err(Error::Domain("instance has no jobs".into()));
    }
    let short = x.assignment_violation(instance);
    if short > MASS_TOL {
        return Err(Error::ContractViolation(format!(
            "fractional solution leaves a job short by {short}"
        )));
    }
    let alpha = instance.alpha();
    let factor = |k: f64| k.powf(alpha - 1.0);
    let within = |lhs: f64, rhs: f64| lhs <= rhs * (1.0 + STAGE_TOL) + STAGE_TOL;
    let stage = |name: &str, lhs: f64, rhs: f64| -> Result<()> {
        if within(lhs, rhs) {
            Ok(())
        } else {
            Err(Error::ContractViolation(format!(
                "{name}: {lhs} exceeds its bound {rhs}"
            )))
        }
    };

    let gis = good_independent_set(instance.jobs());
    let e_x = x.energy(instance)?;

    let y = split_at_deadlines(x, &gis, instance)?;
    let e_y = y.value();
    stage("split", e_y, factor(2.0) * e_x)?;

    let z = compress_to_subzones(&y, &gis, instance)?;
    let e_z = z.value();
    stage("compress", e_z, factor(2.0) * e_y)?;

    let graph = build_assignment_graph(&z, &gis, instance)?;
    graph.check_fractional_matching(MASS_TOL)?;
    let w_fractional = graph.fractional_weight();
    let matching = min_weight_saturating_matching(&graph)?;
    // The integral optimum never exceeds a fractional matching scaled down
    // to unit mass per job, so compare against the unscaled weight.
    stage("matching", matching.weight, w_fractional)?;

    let (placed, slack) = matching_to_schedule(&matching, &graph, instance)?;
    let e_placed = energy_of_schedule(&placed, instance)?;
    stage("placement", e_placed, factor(3.0) * matching.weight)?;
    let schedule = stretch_into_idle(&placed, instance)?;
    let e_final = energy_of_schedule(&schedule, instance)?;
    stage("stretch", e_final, e_placed)?;
    let bound = factor(12.0);
    stage("pipeline", e_final, bound * e_x)?;

    Ok(Rounded {
        schedule,
        placed,
        report: StageReport {
            e_x,
            e_y,
            e_z,
            w_fractional,
            w_match: matching.weight,
            e_placed,
            e_final,
            ratio: e_final / e_x,
            bound,
        },
        independent_set: gis,
        y,
        z,
        graph,
        matching,
        slack,
    })
}

/// Left to right, extends every job of a single-processor schedule over
/// the idle time on both sides of it, as far as its life allows. Lengths only
/// grow, so no job's energy goes up.
pub fn stretch_into_idle(schedule: &Schedule, instance: &Instance) -> Result<Schedule> {
    let mut rows: Vec<Assignment> = schedule.assignments.clone();
    rows.sort_by(|a, b| a.start.cmp(&b.start));
    for k in 0..rows.len() {
        let job = instance
            .job(rows[k].job)
            .ok_or_else(|| Error::Domain(format!("unknown job {}", rows[k].job)))?;
        let start = match k {
            0 => job.release.clone(),
            _ => max(&job.release, &rows[k - 1].end),
        };
        let end = match rows.get(k + 1) {
            Some(next) => min(&job.deadline, &next.start),
            None => job.deadline.clone(),
        };
        if start > rows[k].start || end < rows[k].end {
            return Err(Error::ContractViolation(format!(
                "job {} overlaps a neighbour or leaves its life before stretching",
                job.id
            )));
        }
        rows[k] = Assignment::new(job.id, rows[k].processor.clone(), Interval::new(start, end));
    }
    Ok(Schedule::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Job;
    use crate::lp1::FracEntry;
    use crate::time::int;

    #[test]
    fn single_job_keeps_a_third() {
        let inst =
            Instance::new(2.0, 1, vec![Job::new(1, int(0), int(3), int(2)).unwrap()]).unwrap();
        let x = FractionalSolution::new(
            [FracEntry {
                job: 1,
                interval: inst.jobs()[0].life(),
                value: 1.0,
            }],
            &inst,
            None,
            0.0,
        )
        .unwrap();
        let r = round_detailed(&x, &inst).unwrap();
        assert_eq!(r.schedule.len(), 1);
        assert!(r.report.ratio <= r.report.bound);
        assert!(r.report.e_placed >= r.report.e_x);
        // Stretched back over the whole life, the job is optimal.
        assert_eq!(r.schedule.get(1).unwrap().interval(), inst.jobs()[0].life());
        assert!((r.report.e_final - r.report.e_x).abs() < 1e-12);
    }

    #[test]
    fn short_mass_is_rejected() {
        let inst =
            Instance::new(2.0, 1, vec![Job::new(1, int(0), int(3), int(2)).unwrap()]).unwrap();
        let x = FractionalSolution::new(
            [FracEntry {
                job: 1,
                interval: inst.jobs()[0].life(),
                value: 0.5,
            }],
            &inst,
            None,
            0.0,
        )
        .unwrap();
        assert!(matches!(round(&x, &inst), Err(Error::ContractViolation(_))));
    }
}
