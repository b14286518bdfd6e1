//! Exhaustive non-preemptive optima over landmark-aligned schedules.
//!
//! One machine is solved by a DP over (set of jobs, grid prefix): `f[S][k]`
//! is the cheapest way to run exactly the jobs in `S` inside
//! `[g_0, g_k]`, where the last job either ends before `g_k` or occupies
//! `[g_a, g_k]`. Several machines are combined by subset convolution.

use crate::discretize::LandmarkGrid;
use crate::error::{Error, Result};
use crate::instances::{
    energy_of_job, processor_name, Assignment, HeterogeneousInstance, Instance, JobId, Schedule,
};
use crate::time::{to_f64, Interval, Rational};

pub const DEFAULT_STATE_CAP: u128 = 10_000_000;

/// What one machine needs to know about one job.
#[derive(Clone)]
struct MachineJob {
    id: JobId,
    /// Grid index range `[lo, hi]` of the job's life on this machine.
    window: Option<(usize, usize)>,
    work: f64,
}

struct MachineTable {
    g: usize,
    f: Vec<f64>,
    /// `u32::MAX` = inherited from `k-1`; otherwise `job << 16 | a`.
    choice: Vec<u32>,
}

impl MachineTable {
    fn at(&self, mask: usize, k: usize) -> f64 {
        self.f[mask * self.g + k]
    }

    fn full(&self, mask: usize) -> f64 {
        self.at(mask, self.g - 1)
    }

    fn reconstruct(
        &self,
        mut mask: usize,
        grid: &[Rational],
        jobs: &[MachineJob],
    ) -> Vec<(JobId, Interval)> {
        let mut out = Vec::new();
        let mut k = self.g - 1;
        while mask != 0 {
            let c = self.choice[mask * self.g + k];
            if c == u32::MAX {
                k -= 1;
                continue;
            }
            let (j, a) = ((c >> 16) as usize, (c & 0xffff) as usize);
            out.push((jobs[j].id, Interval::new(grid[a].clone(), grid[k].clone())));
            mask &= !(1 << j);
            k = a;
        }
        out.reverse();
        out
    }
}

fn machine_table(grid: &[Rational], jobs: &[MachineJob], alpha: f64) -> Result<MachineTable> {
    let n = jobs.len();
    let g = grid.len();
    let gf: Vec<f64> = grid.iter().map(to_f64).collect();
    let mut f = vec![f64::INFINITY; (1 << n) * g];
    let mut choice = vec![u32::MAX; (1 << n) * g];
    for k in 0..g {
        f[k] = 0.0;
    }
    // cost[j][a * g + k]
    let mut cost = vec![vec![f64::INFINITY; g * g]; n];
    for (j, job) in jobs.iter().enumerate() {
        if let Some((lo, hi)) = job.window {
            for a in lo..=hi {
                for k in a + 1..=hi {
                    cost[j][a * g + k] = energy_of_job(job.work, gf[k] - gf[a], alpha)?;
                }
            }
        }
    }
    for mask in 1usize..(1 << n) {
        for k in 1..g {
            let mut best = f[mask * g + k - 1];
            let mut pick = u32::MAX;
            for j in (0..n).filter(|j| mask >> j & 1 == 1) {
                let Some((lo, hi)) = jobs[j].window else {
                    continue;
                };
                if k > hi || k <= lo {
                    continue;
                }
                let rest = mask & !(1 << j);
                for a in lo..k {
                    let v = f[rest * g + a] + cost[j][a * g + k];
                    if v < best {
                        best = v;
                        pick = (j as u32) << 16 | a as u32;
                    }
                }
            }
            f[mask * g + k] = best;
            choice[mask * g + k] = pick;
        }
    }
    Ok(MachineTable { g, f, choice })
}

fn window_on_grid(grid: &LandmarkGrid, r: &Rational, d: &Rational) -> Option<(usize, usize)> {
    let pts = grid.points();
    let lo = pts.partition_point(|p| p < r);
    let hi = pts.partition_point(|p| p <= d);
    (hi >= lo + 2).then(|| (lo, hi - 1))
}

fn check_size(n: usize, g: usize, machines: usize, cap: u128) -> Result<()> {
    if n > 20 || g >= 1 << 16 {
        return Err(Error::SizeLimit {
            needed: u128::MAX,
            cap,
        });
    }
    let dp = (1u128 << n) * (g as u128) * (g as u128) * (n as u128).max(1) * machines as u128;
    let conv = if machines > 1 {
        3u128.pow(n as u32) * machines as u128
    } else {
        0
    };
    let needed = dp + conv;
    if needed > cap {
        return Err(Error::SizeLimit { needed, cap });
    }
    Ok(())
}

/// `H_p[S] = min_{T ⊆ S} H_{p-1}[S \ T] + F_p[T]`; returns the subset given
/// to each machine.
fn convolve(tables: &[Vec<f64>], n: usize) -> Option<(f64, Vec<usize>)> {
    let full = (1usize << n) - 1;
    let mut h = vec![f64::INFINITY; 1 << n];
    h[0] = 0.0;
    let mut picks: Vec<Vec<usize>> = Vec::with_capacity(tables.len());
    for table in tables {
        let mut next = vec![f64::INFINITY; 1 << n];
        let mut pick = vec![0usize; 1 << n];
        for mask in 0..=full {
            // Submasks in increasing order, strict improvement keeps the first.
            let mut t = 0usize;
            loop {
                let v = h[mask & !t] + table[t];
                if v < next[mask] {
                    next[mask] = v;
                    pick[mask] = t;
                }
                if t == mask {
                    break;
                }
                t = (t.wrapping_sub(mask)) & mask;
            }
        }
        h = next;
        picks.push(pick);
    }
    if !h[full].is_finite() {
        return None;
    }
    let mut sets = vec![0; tables.len()];
    let mut mask = full;
    for p in (0..tables.len()).rev() {
        sets[p] = picks[p][mask];
        mask &= !sets[p];
    }
    Some((h[full], sets))
}

fn too_coarse(grid: &LandmarkGrid) -> Error {
    Error::Infeasible(format!(
        "no non-preemptive schedule aligned to the {}-point grid; the grid is too coarse",
        grid.len()
    ))
}

/// Minimum-energy non-preemptive schedule whose intervals start and end on
/// grid points, on the instance's `m` identical processors.
pub fn brute_force_nonpreemptive(
    instance: &Instance,
    grid: &LandmarkGrid,
    cap: u128,
) -> Result<(Schedule, f64)> {
    let n = instance.len();
    let m = instance.processors();
    check_size(n, grid.len(), 1, cap)?;
    if m > 1 {
        check_size(n, grid.len(), m, cap)?;
    }
    if n == 0 {
        return Ok((Schedule::default(), 0.0));
    }
    if grid.len() < 2 {
        return Err(too_coarse(grid));
    }
    let jobs: Vec<MachineJob> = instance
        .jobs()
        .iter()
        .map(|j| MachineJob {
            id: j.id,
            window: window_on_grid(grid, &j.release, &j.deadline),
            work: j.work_f64(),
        })
        .collect();
    let table = machine_table(grid.points(), &jobs, instance.alpha())?;
    let full = (1usize << n) - 1;
    let sets = if m == 1 {
        if !table.full(full).is_finite() {
            return Err(too_coarse(grid));
        }
        vec![full]
    } else {
        let per_set: Vec<f64> = (0..=full).map(|s| table.full(s)).collect();
        let tables = vec![per_set; m.min(n)];
        convolve(&tables, n).ok_or_else(|| too_coarse(grid))?.1
    };
    let mut assignments = Vec::new();
    let mut energy = 0.0;
    for (p, &set) in sets.iter().enumerate() {
        energy += table.full(set);
        for (job, iv) in table.reconstruct(set, grid.points(), &jobs) {
            assignments.push(Assignment::new(job, Some(processor_name(p)), iv));
        }
    }
    Ok((Schedule::new(assignments), energy))
}

/// Heterogeneous version: each processor has its own exponent and each job
/// its own work and window per processor.
pub fn brute_force_heterogeneous(
    instance: &HeterogeneousInstance,
    grid: &LandmarkGrid,
    cap: u128,
) -> Result<(Schedule, f64)> {
    let n = instance.jobs().len();
    let procs = instance.processors();
    check_size(n, grid.len(), procs.len(), cap)?;
    if n == 0 {
        return Ok((Schedule::default(), 0.0));
    }
    let full = (1usize << n) - 1;
    let mut machine_jobs = Vec::with_capacity(procs.len());
    let mut tables = Vec::with_capacity(procs.len());
    for p in procs {
        let jobs: Vec<MachineJob> = instance
            .jobs()
            .iter()
            .map(|j| {
                let e = j.entries.get(&p.id);
                MachineJob {
                    id: j.id,
                    window: e.and_then(|e| window_on_grid(grid, &e.release, &e.deadline)),
                    work: e.map_or(0.0, |e| to_f64(&e.work)),
                }
            })
            .collect();
        tables.push(machine_table(grid.points(), &jobs, p.alpha)?);
        machine_jobs.push(jobs);
    }
    let per_machine: Vec<Vec<f64>> = tables
        .iter()
        .map(|t| (0..=full).map(|s| t.full(s)).collect())
        .collect();
    let (energy, sets) = convolve(&per_machine, n).ok_or_else(|| too_coarse(grid))?;
    let mut assignments = Vec::new();
    for (p, &set) in sets.iter().enumerate() {
        for (job, iv) in tables[p].reconstruct(set, grid.points(), &machine_jobs[p]) {
            assignments.push(Assignment::new(job, Some(procs[p].id.clone()), iv));
        }
    }
    Ok((Schedule::new(assignments), energy))
}

/// Exact optimum when every job has the same window on every processor.
///
/// A machine running job set `S` in a common window of length `ℓ` can do no
/// better than run them back to back at constant speed `W/ℓ`, for energy
/// `W^α / ℓ^(α-1)` with `W` the total work of `S` on that machine.
pub fn common_window_optimum(
    instance: &HeterogeneousInstance,
    cap: u128,
) -> Result<(Schedule, f64)> {
    let n = instance.jobs().len();
    let procs = instance.processors();
    if n == 0 {
        return Ok((Schedule::default(), 0.0));
    }
    let window = instance.jobs()[0]
        .entries
        .values()
        .next()
        .expect("nonempty")
        .life();
    if instance
        .jobs()
        .iter()
        .flat_map(|j| j.entries.values())
        .any(|e| e.life() != window)
    {
        return Err(Error::Domain("jobs do not share a common window".into()));
    }
    if n > 20 {
        return Err(Error::SizeLimit {
            needed: u128::MAX,
            cap,
        });
    }
    let needed = 3u128.pow(n as u32) * procs.len() as u128;
    if needed > cap {
        return Err(Error::SizeLimit { needed, cap });
    }
    let full = (1usize << n) - 1;
    let len = window.len_f64();
    let tables: Vec<Vec<f64>> = procs
        .iter()
        .map(|p| {
            (0..=full)
                .map(|s| {
                    let mut load = 0.0;
                    for (k, j) in instance.jobs().iter().enumerate() {
                        if s >> k & 1 == 1 {
                            match j.entries.get(&p.id) {
                                Some(e) => load += to_f64(&e.work),
                                None => return f64::INFINITY,
                            }
                        }
                    }
                    if load == 0.0 {
                        0.0
                    } else {
                        load.powf(p.alpha) / len.powf(p.alpha - 1.0)
                    }
                })
                .collect()
        })
        .collect();
    let (energy, sets) = convolve(&tables, n)
        .ok_or_else(|| Error::Infeasible("some job has no usable processor".into()))?;
    let mut assignments = Vec::new();
    for (p, &set) in sets.iter().enumerate() {
        let members: Vec<_> = instance
            .jobs()
            .iter()
            .enumerate()
            .filter(|(k, _)| set >> k & 1 == 1)
            .map(|(_, j)| j)
            .collect();
        let total: Rational = members
            .iter()
            .map(|j| j.entries[&procs[p].id].work.clone())
            .sum();
        let mut cur = window.start.clone();
        for j in members {
            let dur = window.len() * &j.entries[&procs[p].id].work / &total;
            let end = &cur + dur;
            assignments.push(Assignment::new(
                j.id,
                Some(procs[p].id.clone()),
                Interval::new(cur, end.clone()),
            ));
            cur = end;
        }
        debug_assert!(set == 0 || cur == window.end);
    }
    Ok((Schedule::new(assignments), energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_grid_with_density, LandmarkGrid};
    use crate::instances::{
        energy_of_schedule, generate_gap_family, generate_random, validate_schedule, Job,
        RandomSpec,
    };
    use crate::oracle::yds_preemptive;
    use crate::time::{frac, int};
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn single_job_uses_its_whole_life() {
        let inst =
            Instance::new(2.0, 1, vec![Job::new(1, int(1), int(3), int(2)).unwrap()]).unwrap();
        let grid = build_grid_with_density(&inst, 3);
        let (s, e) = brute_force_nonpreemptive(&inst, &grid, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(s.get(1).unwrap().interval(), Interval::new(int(1), int(3)));
        assert!(close(e, 2.0));
    }

    #[test]
    fn gap_family_two() {
        let inst = generate_gap_family(2, 2.0).unwrap();
        let grid = build_grid_with_density(&inst, 3);
        let (s, e) = brute_force_nonpreemptive(&inst, &grid, DEFAULT_STATE_CAP).unwrap();
        assert!(close(e, 8.0), "{e}");
        assert!(validate_schedule(&s, &inst).is_empty());
        assert!(close(energy_of_schedule(&s, &inst).unwrap(), e));
    }

    #[test]
    fn coarse_grid_is_reported() {
        let jobs = vec![
            Job::new(1, int(0), int(1), int(1)).unwrap(),
            Job::new(2, int(0), int(1), int(1)).unwrap(),
        ];
        let inst = Instance::new(2.0, 1, jobs).unwrap();
        let grid = LandmarkGrid::with_points(&inst, []);
        assert!(matches!(
            brute_force_nonpreemptive(&inst, &grid, DEFAULT_STATE_CAP),
            Err(Error::Infeasible(_))
        ));
        let two = inst.with_processors(2).unwrap();
        let (_, e) = brute_force_nonpreemptive(&two, &grid, DEFAULT_STATE_CAP).unwrap();
        assert!(close(e, 2.0));
    }

    #[test]
    fn cap_is_enforced() {
        let inst = generate_gap_family(8, 2.0).unwrap();
        let grid = build_grid_with_density(&inst, 5);
        assert!(matches!(
            brute_force_nonpreemptive(&inst, &grid, 1000),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn two_processors_split_conflicting_jobs() {
        let jobs = vec![
            Job::new(1, int(0), int(2), int(2)).unwrap(),
            Job::new(2, int(0), int(2), int(2)).unwrap(),
            Job::new(3, int(0), int(2), int(2)).unwrap(),
        ];
        let inst = Instance::new(2.0, 2, jobs).unwrap();
        let grid = LandmarkGrid::with_points(&inst, [int(1)]);
        let (s, e) = brute_force_nonpreemptive(&inst, &grid, DEFAULT_STATE_CAP).unwrap();
        // One machine runs a job on [0,2] (cost 2), the other two jobs on halves (4 + 4).
        assert!(close(e, 10.0), "{e}");
        assert!(validate_schedule(&s, &inst).is_empty());
    }

    #[test]
    fn finer_grid_never_hurts() {
        let inst = Instance::new(
            2.0,
            1,
            vec![
                Job::new(1, int(0), int(3), int(2)).unwrap(),
                Job::new(2, int(1), int(2), int(1)).unwrap(),
            ],
        )
        .unwrap();
        let coarse = build_grid_with_density(&inst, 0);
        let fine = LandmarkGrid::with_points(&inst, [frac(1, 2), frac(5, 2)]);
        let ec = brute_force_nonpreemptive(&inst, &coarse, DEFAULT_STATE_CAP)
            .unwrap()
            .1;
        let ef = brute_force_nonpreemptive(&inst, &fine, DEFAULT_STATE_CAP)
            .unwrap()
            .1;
        assert!(ef <= ec + 1e-12);
    }

    proptest! {
        #[test]
        fn preemption_only_helps_and_relabeling_is_harmless(n in 1usize..5, seed in 0u64..300) {
            let inst = generate_random(&RandomSpec { n, seed, horizon: 6, ..Default::default() }).unwrap();
            let grid = build_grid_with_density(&inst, 2);
            let (s, e) = brute_force_nonpreemptive(&inst, &grid, DEFAULT_STATE_CAP).unwrap();
            prop_assert!(validate_schedule(&s, &inst).is_empty());
            prop_assert!(close(energy_of_schedule(&s, &inst).unwrap(), e));
            let (_, lower) = yds_preemptive(&inst).unwrap();
            prop_assert!(lower <= e * (1.0 + 1e-9));

            let relabeled: Vec<Job> = inst.jobs().iter().rev().map(|j| Job::new(100 - j.id, j.release.clone(), j.deadline.clone(), j.work.clone()).unwrap()).collect();
            let relabeled = Instance::new(inst.alpha(), 1, relabeled).unwrap();
            let (_, e2) = brute_force_nonpreemptive(&relabeled, &grid, DEFAULT_STATE_CAP).unwrap();
            prop_assert!(close(e, e2));

            let shifted: Vec<Job> = inst.jobs().iter().map(|j| Job::new(j.id, &j.release + int(7), &j.deadline + int(7), j.work.clone()).unwrap()).collect();
            let shifted = Instance::new(inst.alpha(), 1, shifted).unwrap();
            let sgrid = build_grid_with_density(&shifted, 2);
            let (_, e3) = brute_force_nonpreemptive(&shifted, &sgrid, DEFAULT_STATE_CAP).unwrap();
            prop_assert!(close(e, e3));
        }
    }
}
