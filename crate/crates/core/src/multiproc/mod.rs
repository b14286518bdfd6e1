//! Non-preemptive scheduling on `m` identical processors.
//!
//! Greedy independent sets pin each processor's timeline into zones; every
//! zone becomes a processor of its own, jobs are distributed over these
//! windows and solved preemptively, and each window is then run without
//! preemption.

mod partition;
mod transform;
mod windows;

pub use partition::{build_heterogeneous_instance, greedy_independent_sets, Window, ZonePartition};
pub use transform::{cut_at_zone_boundaries, transform_assign_to_processors, Move, Moved};
pub use windows::{
    edf_reorder, reorder_with_fallback, solve_windows, Reorder, Strategy, WindowSchedule,
    WindowSolution,
};

use crate::error::Result;
use crate::instances::{energy_of_schedule, HeterogeneousInstance, Instance, Schedule};
use crate::oracle::generalized_bell;

#[derive(Clone, Debug)]
pub struct MultiprocOutcome {
    pub schedule: Schedule,
    pub energy: f64,
    /// Sum of the per-window preemptive optima after assignment.
    pub window_energy: f64,
    pub partition: ZonePartition,
    pub heterogeneous: HeterogeneousInstance,
    pub windows: Vec<Window>,
    pub solution: WindowSolution,
    /// How each nonempty window was made contiguous.
    pub reorders: Vec<(usize, Reorder)>,
}

pub fn schedule_multiproc(instance: &Instance, strategy: Strategy) -> Result<Schedule> {
    schedule_multiproc_detailed(instance, strategy).map(|o| o.schedule)
}

pub fn schedule_multiproc_detailed(
    instance: &Instance,
    strategy: Strategy,
) -> Result<MultiprocOutcome> {
    let partition = greedy_independent_sets(instance)?;
    let (het, windows) = build_heterogeneous_instance(instance, &partition)?;
    let solution = solve_windows(&het, &windows, strategy)?;
    let (schedule, reorders) = reorder_with_fallback(&solution, &windows);
    let energy = energy_of_schedule(&schedule, instance)?;
    Ok(MultiprocOutcome {
        schedule,
        energy,
        window_energy: solution.energy(),
        partition,
        heterogeneous: het,
        windows,
        solution,
        reorders,
    })
}

/// `(5/2)^(α-1) (1 + w_max/w_min)^α`: the cost of pinning independent sets
/// to processors and cutting at their deadlines.
pub fn transform_bound(alpha: f64, work_ratio: f64) -> f64 {
    2.5f64.powf(alpha - 1.0) * (1.0 + work_ratio).powf(alpha)
}

/// `(5/2)^(α-1) ((1+ε)(1 + w_max/w_min))^α B̃_α`, the end-to-end guarantee
/// when the window step is solved within `(1+ε)^α B̃_α`.
pub fn approximation_bound(alpha: f64, epsilon: f64, work_ratio: f64) -> Result<f64> {
    let bell = generalized_bell(alpha, 1e-12)?;
    Ok(2.5f64.powf(alpha - 1.0) * ((1.0 + epsilon) * (1.0 + work_ratio)).powf(alpha) * bell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{validate_schedule, Job};
    use crate::time::int;

    #[test]
    fn single_job_runs_over_its_life() {
        let i = Instance::new(2.0, 1, vec![Job::new(1, int(1), int(4), int(3)).unwrap()]).unwrap();
        for s in [Strategy::Lp, Strategy::Greedy] {
            let out = schedule_multiproc_detailed(&i, s).unwrap();
            let a = out.schedule.get(1).unwrap();
            assert_eq!(a.processor.as_deref(), Some("p1"));
            assert_eq!(a.interval(), i.jobs()[0].life());
            assert!((out.energy - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_work_bound_at_alpha_two() {
        let b = approximation_bound(2.0, 0.1, 1.0).unwrap();
        assert!((b - 10.0 * 1.1f64 * 1.1).abs() < 1e-9);
        assert!((transform_bound(2.0, 1.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn output_is_valid_on_two_processors() {
        let jobs = [(0, 3, 1), (0, 3, 1), (1, 2, 1), (2, 5, 1), (0, 5, 1)];
        let jobs = jobs
            .iter()
            .enumerate()
            .map(|(k, &(r, d, w))| Job::new(k as u64 + 1, int(r), int(d), int(w)).unwrap())
            .collect();
        let i = Instance::new(2.0, 2, jobs).unwrap();
        for s in [Strategy::Lp, Strategy::Greedy] {
            let out = schedule_multiproc_detailed(&i, s).unwrap();
            assert!(validate_schedule(&out.schedule, &i).is_empty());
            assert!(out.energy >= out.window_energy * (1.0 - 1e-12));
        }
    }
}
