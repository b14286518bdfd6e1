//! The interval-assignment LP relaxation of single-processor non-preemptive
//! scheduling.
//!
//! One variable `x[I, j]` per job `j` and grid interval `I` inside its life
//! interval, with cost `w_j^α / |I|^(α-1)`. Rows:
//!
//! * assignment: `Σ_I x[I, j] >= 1` for every job;
//! * load: for every grid point `t`, the sum over intervals whose interior
//!   contains `t` is at most 1;
//! * non-preemption (optional): for every grid interval `I` and job `j`,
//!   `Σ_{I' meets I} x[I', j] + Σ_{j' != j, I'' ⊇ I} x[I'', j'] <= 1`.
//!
//! Rows whose support is contained in another row's support are dropped; all
//! of these rows have unit coefficients and right-hand side 1, so the dropped
//! ones are implied.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use crate::discretize::{candidate_intervals, LandmarkGrid};
use crate::error::{Error, Result};
use crate::instances::{energy_of_job, Instance, JobId};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, FEASIBILITY_TOL};
use crate::time::Interval;

#[derive(Clone, Debug)]
pub struct Lp1Model {
    lp: LinearProgram,
    vars: Vec<(Interval, JobId)>,
    index: HashMap<(Interval, JobId), usize>,
    grid: LandmarkGrid,
    alpha: f64,
    include_constraint_3: bool,
    pruned_rows: usize,
}

impl Lp1Model {
    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn grid(&self) -> &LandmarkGrid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn include_constraint_3(&self) -> bool {
        self.include_constraint_3
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Rows dropped because another row implies them.
    pub fn pruned_rows(&self) -> usize {
        self.pruned_rows
    }

    pub fn variable(&self, index: usize) -> (&Interval, JobId) {
        let (i, j) = &self.vars[index];
        (i, *j)
    }

    pub fn var_index(&self, interval: &Interval, job: JobId) -> Option<usize> {
        self.index.get(&(interval.clone(), job)).copied()
    }

    /// Maps a sparse point onto the LP's variable vector. Entries that have
    /// no variable are an error.
    pub fn to_vector(&self, x: &FractionalSolution) -> Result<Vec<f64>> {
        let mut v = vec![0.0; self.vars.len()];
        for e in x.entries() {
            let k = self.var_index(&e.interval, e.job).ok_or_else(|| {
                Error::Domain(format!("no variable for job {} on {}", e.job, e.interval))
            })?;
            v[k] += e.value;
        }
        Ok(v)
    }
}

pub fn build_lp1(
    instance: &Instance,
    grid: &LandmarkGrid,
    include_constraint_3: bool,
) -> Result<Lp1Model> {
    if instance.processors() != 1 {
        return Err(Error::Domain(format!(
            "the interval LP is single-processor, instance has {}",
            instance.processors()
        )));
    }
    for j in instance.jobs() {
        if !grid.contains(&j.release) || !grid.contains(&j.deadline) {
            return Err(Error::Domain(format!(
                "grid misses an endpoint of job {}",
                j.id
            )));
        }
    }
    let alpha = instance.alpha();

    // Variables, with intervals also kept as grid index pairs.
    let mut vars = Vec::new();
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    let mut index = HashMap::new();
    let mut lp_obj = Vec::new();
    for (jpos, job) in instance.jobs().iter().enumerate() {
        let w = job.work_f64();
        for iv in candidate_intervals(grid, job) {
            let a = grid.index_of(&iv.start).expect("grid point");
            let b = grid.index_of(&iv.end).expect("grid point");
            lp_obj.push(energy_of_job(w, iv.len_f64(), alpha)?);
            index.insert((iv.clone(), job.id), vars.len());
            vars.push((iv, job.id));
            spans.push((a, b));
            owner.push(jpos);
        }
    }
    let nv = vars.len();
    let mut lp = LinearProgram::new(nv);
    for (k, c) in lp_obj.into_iter().enumerate() {
        lp.set_objective(k, c)?;
    }

    for (jpos, job) in instance.jobs().iter().enumerate() {
        let row: Vec<(usize, f64)> = (0..nv)
            .filter(|&k| owner[k] == jpos)
            .map(|k| (k, 1.0))
            .collect();
        if row.is_empty() {
            return Err(Error::Domain(format!(
                "job {} has no grid interval",
                job.id
            )));
        }
        lp.add_constraint(row, Relation::Ge, 1.0)?;
    }

    let mut packing: Vec<Vec<usize>> = Vec::new();
    for t in 0..grid.len() {
        let row: Vec<usize> = (0..nv)
            .filter(|&k| spans[k].0 < t && t < spans[k].1)
            .collect();
        if !row.is_empty() {
            packing.push(row);
        }
    }
    if include_constraint_3 {
        let g = grid.len();
        for a in 0..g {
            for b in a + 1..g {
                for jpos in 0..instance.len() {
                    let row: Vec<usize> = (0..nv)
                        .filter(|&k| {
                            let (s, e) = spans[k];
                            if owner[k] == jpos {
                                s < b && a < e
                            } else {
                                s <= a && b <= e
                            }
                        })
                        .collect();
                    if !row.is_empty() {
                        packing.push(row);
                    }
                }
            }
        }
    }
    let total = packing.len();
    let kept = drop_dominated(packing, nv);
    let pruned_rows = total - kept.len();
    for row in kept {
        lp.add_constraint(
            row.into_iter().map(|k| (k, 1.0)).collect(),
            Relation::Le,
            1.0,
        )?;
    }

    Ok(Lp1Model {
        lp,
        vars,
        index,
        grid: grid.clone(),
        alpha,
        include_constraint_3,
        pruned_rows,
    })
}

/// Keeps one copy of each maximal support set.
fn drop_dominated(mut rows: Vec<Vec<usize>>, nv: usize) -> Vec<Vec<usize>> {
    let words = nv.div_ceil(64).max(1);
    rows.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    rows.dedup();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    let mut bits: Vec<Vec<u64>> = Vec::new();
    'rows: for row in rows {
        for (k, set) in bits.iter().enumerate() {
            if kept[k].len() < row.len() {
                break;
            }
            if row.iter().all(|&v| set[v / 64] >> (v % 64) & 1 == 1) {
                continue 'rows;
            }
        }
        let mut set = vec![0u64; words];
        for &v in &row {
            set[v / 64] |= 1 << (v % 64);
        }
        bits.push(set);
        kept.push(row);
    }
    kept
}

/// One nonzero of a fractional assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct FracEntry {
    pub job: JobId,
    pub interval: Interval,
    pub value: f64,
}

/// Sparse fractional assignment of jobs to execution intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalSolution {
    entries: Vec<FracEntry>,
    alpha: f64,
    grid: Option<LandmarkGrid>,
    objective: f64,
}

impl FractionalSolution {
    /// Builds a solution, merging repeated (job, interval) keys and dropping
    /// values at or below `drop_below`.
    pub fn new(
        entries: impl IntoIterator<Item = FracEntry>,
        instance: &Instance,
        grid: Option<LandmarkGrid>,
        drop_below: f64,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(JobId, Interval), f64> = BTreeMap::new();
        for e in entries {
            let job = instance
                .job(e.job)
                .ok_or_else(|| Error::Domain(format!("unknown job {}", e.job)))?;
            if !job.life().contains(&e.interval) || e.interval.is_empty() {
                return Err(Error::ContractViolation(format!(
                    "job {} placed on {} outside its life interval {}",
                    e.job,
                    e.interval,
                    job.life()
                )));
            }
            if !e.value.is_finite() || e.value < -FEASIBILITY_TOL {
                return Err(Error::ContractViolation(format!(
                    "job {} has value {} on {}",
                    e.job, e.value, e.interval
                )));
            }
            *merged.entry((e.job, e.interval)).or_insert(0.0) += e.value;
        }
        let entries: Vec<FracEntry> = merged
            .into_iter()
            .filter(|(_, v)| *v > drop_below)
            .map(|((job, interval), value)| FracEntry {
                job,
                interval,
                value,
            })
            .collect();
        let mut out = FractionalSolution {
            entries,
            alpha: instance.alpha(),
            grid,
            objective: 0.0,
        };
        out.objective = out.energy(instance)?;
        Ok(out)
    }

    pub fn entries(&self) -> &[FracEntry] {
        &self.entries
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> Option<&LandmarkGrid> {
        self.grid.as_ref()
    }

    /// `Σ x[I, j] · w_j^α / |I|^(α-1)`, computed when the solution was built.
    pub fn value(&self) -> f64 {
        self.objective
    }

    pub fn energy(&self, instance: &Instance) -> Result<f64> {
        let mut total = 0.0;
        for e in &self.entries {
            let w = instance
                .job(e.job)
                .ok_or_else(|| Error::Domain(format!("unknown job {}", e.job)))?
                .work_f64();
            total += e.value * energy_of_job(w, e.interval.len_f64(), self.alpha)?;
        }
        Ok(total)
    }

    pub fn get(&self, interval: &Interval, job: JobId) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.job == job && &e.interval == interval)
            .map(|e| e.value)
            .sum()
    }

    pub fn of_job(&self, job: JobId) -> impl Iterator<Item = &FracEntry> {
        self.entries.iter().filter(move |e| e.job == job)
    }

    /// `Σ_I x[I, j]`.
    pub fn job_mass(&self, job: JobId) -> f64 {
        self.of_job(job).map(|e| e.value).sum()
    }

    /// Largest shortfall of `Σ_I x[I, j] >= 1` over the instance's jobs.
    pub fn assignment_violation(&self, instance: &Instance) -> f64 {
        instance
            .jobs()
            .iter()
            .map(|j| (1.0 - self.job_mass(j.id)).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Largest total value of intervals whose interior contains `t`, over
    /// the given points.
    pub fn max_load_at<'a>(
        &self,
        points: impl IntoIterator<Item = &'a crate::time::Rational>,
    ) -> f64 {
        points
            .into_iter()
            .map(|t| {
                self.entries
                    .iter()
                    .filter(|e| e.interval.contains_point_interior(t))
                    .map(|e| e.value)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Load at every point of time: the maximum over the midpoints of the
    /// cells cut by all interval endpoints in the support.
    pub fn max_load(&self) -> f64 {
        let mids: Vec<_> = self.cells().iter().map(Interval::midpoint).collect();
        self.max_load_at(&mids)
    }

    /// Largest excess of a non-preemption row over the given intervals `I`
    /// and every job `j` in the instance.
    pub fn non_preemption_violation(&self, instance: &Instance, intervals: &[Interval]) -> f64 {
        let mut worst = 0.0f64;
        for i in intervals {
            for j in instance.jobs() {
                let lhs: f64 = self
                    .entries
                    .iter()
                    .filter(|e| {
                        if e.job == j.id {
                            e.interval.overlaps(i)
                        } else {
                            e.interval.contains(i)
                        }
                    })
                    .map(|e| e.value)
                    .sum();
                worst = worst.max(lhs - 1.0);
            }
        }
        worst
    }

    /// Elementary cells between consecutive support endpoints.
    pub fn cells(&self) -> Vec<Interval> {
        let mut pts: Vec<_> = self
            .entries
            .iter()
            .flat_map(|e| [e.interval.start.clone(), e.interval.end.clone()])
            .collect();
        pts.sort();
        pts.dedup();
        pts.windows(2)
            .map(|w| Interval::new(w[0].clone(), w[1].clone()))
            .collect()
    }
}

/// Result of [`solve_lp1`] together with solver statistics.
#[derive(Clone, Debug)]
pub struct Lp1Outcome {
    pub solution: FractionalSolution,
    pub lp_value: f64,
    pub pivots: usize,
    pub runtime_ms: f64,
}

pub fn solve_lp1(model: &Lp1Model, instance: &Instance) -> Result<FractionalSolution> {
    solve_lp1_detailed(model, instance).map(|o| o.solution)
}

pub fn solve_lp1_detailed(model: &Lp1Model, instance: &Instance) -> Result<Lp1Outcome> {
    let started = Instant::now();
    let sol = solve_lp(&model.lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Infeasible(format!(
                "LP relaxation infeasible on a grid of {} points ({} landmarks per gap); the grid is too coarse",
                model.grid.len(),
                model.grid.per_gap()
            )))
        }
        LpStatus::Unbounded => {
            return Err(Error::Solver("LP relaxation reported unbounded".into()))
        }
    }
    let entries = sol
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, &v)| {
            let (iv, job) = &model.vars[k];
            FracEntry {
                job: *job,
                interval: iv.clone(),
                value: v.min(1.0),
            }
        });
    let solution = FractionalSolution::new(entries, instance, Some(model.grid.clone()), 1e-12)?;
    Ok(Lp1Outcome {
        lp_value: sol.objective,
        solution,
        pivots: sol.pivots,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}
