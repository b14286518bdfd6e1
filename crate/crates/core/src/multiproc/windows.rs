use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::partition::Window;
use crate::error::{Error, Result};
use crate::instances::{
    energy_of_job, Assignment, HeterogeneousInstance, Instance, Job, JobId, Schedule,
};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::matching::min_cost_left_saturating;
use crate::oracle::{yds_preemptive, SpeedProfile};
use crate::rounding::spread_over_copies;
use crate::time::{int, to_f64, Interval, Rational};

/// How jobs are distributed over windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Jobs by earliest clipped deadline, each into the window where it
    /// raises the preemptive energy least.
    Greedy,
    /// Fractional assignment with per-window congestion rows, rounded by a
    /// min-cost matching over window copies.
    #[default]
    Lp,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "lp" => Ok(Strategy::Lp),
            other => Err(Error::Domain(format!(
                "unknown strategy {other:?}; expected lp or greedy"
            ))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Greedy => "greedy",
            Strategy::Lp => "lp",
        })
    }
}

/// Jobs of one window with their preemptive optimum, in window coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSchedule {
    pub window: usize,
    pub jobs: Vec<Job>,
    pub profile: SpeedProfile,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowSolution {
    pub window_of: BTreeMap<JobId, usize>,
    pub windows: Vec<WindowSchedule>,
    /// Congestion scale the LP strategy needed; 1 for the greedy strategy.
    pub congestion: f64,
}

impl WindowSolution {
    /// Sum of the per-window preemptive optima.
    pub fn energy(&self) -> f64 {
        self.windows.iter().map(|w| w.energy).sum()
    }
}

fn window_job(het: &HeterogeneousInstance, job: JobId, window: &Window) -> Job {
    let e = het
        .entry(job, &window.id)
        .expect("job has an entry in its window");
    Job::new(job, e.release.clone(), e.deadline.clone(), e.work.clone())
        .expect("entries have nonempty lives")
}

fn preemptive(het: &HeterogeneousInstance, jobs: Vec<Job>) -> Result<(SpeedProfile, f64)> {
    if jobs.is_empty() {
        return Ok((SpeedProfile::default(), 0.0));
    }
    yds_preemptive(&Instance::new(het.alpha(), 1, jobs)?)
}

/// Assigns every job to one window and solves each window preemptively.
pub fn solve_windows(
    het: &HeterogeneousInstance,
    windows: &[Window],
    strategy: Strategy,
) -> Result<WindowSolution> {
    if het.processors().len() != windows.len() {
        return Err(Error::Domain(
            "window list does not match the heterogeneous instance".into(),
        ));
    }
    let index: BTreeMap<&str, usize> = windows
        .iter()
        .enumerate()
        .map(|(k, w)| (w.id.as_str(), k))
        .collect();
    for j in het.jobs() {
        if j.entries.keys().any(|p| !index.contains_key(p.as_str())) {
            return Err(Error::Domain(format!(
                "job {} names an unknown window",
                j.id
            )));
        }
    }
    let (window_of, congestion) = match strategy {
        Strategy::Greedy => (assign_greedy(het, windows, &index)?, 1.0),
        Strategy::Lp => assign_lp(het, windows, &index)?,
    };
    let mut per_window: Vec<Vec<Job>> = vec![Vec::new(); windows.len()];
    for (&job, &w) in &window_of {
        per_window[w].push(window_job(het, job, &windows[w]));
    }
    let mut out = Vec::with_capacity(windows.len());
    for (w, jobs) in per_window.into_iter().enumerate() {
        let (profile, energy) = preemptive(het, jobs.clone())?;
        out.push(WindowSchedule {
            window: w,
            jobs,
            profile,
            energy,
        });
    }
    Ok(WindowSolution {
        window_of,
        windows: out,
        congestion,
    })
}

fn assign_greedy(
    het: &HeterogeneousInstance,
    windows: &[Window],
    index: &BTreeMap<&str, usize>,
) -> Result<BTreeMap<JobId, usize>> {
    let clipped_deadline = |j: &crate::instances::HetJob| {
        j.entries
            .iter()
            .map(|(p, e)| &e.deadline + windows[index[p.as_str()]].offset())
            .min()
            .expect("validated: every job has an entry")
    };
    let mut order: Vec<_> = het.jobs().iter().collect();
    order.sort_by_cached_key(|j| (clipped_deadline(j), j.id));

    let mut assigned: Vec<Vec<Job>> = vec![Vec::new(); windows.len()];
    let mut energy = vec![0.0; windows.len()];
    let mut out = BTreeMap::new();
    for j in order {
        let mut best: Option<(f64, usize, f64)> = None;
        for p in j.entries.keys() {
            let w = index[p.as_str()];
            let mut trial = assigned[w].clone();
            trial.push(window_job(het, j.id, &windows[w]));
            let (_, e) = preemptive(het, trial)?;
            let delta = e - energy[w];
            if best.is_none_or(|(d, bw, _)| delta < d || (delta == d && w < bw)) {
                best = Some((delta, w, e));
            }
        }
        let (_, w, e) = best.expect("validated: every job has an entry");
        assigned[w].push(window_job(het, j.id, &windows[w]));
        energy[w] = e;
        out.insert(j.id, w);
    }
    Ok(out)
}

fn assign_lp(
    het: &HeterogeneousInstance,
    windows: &[Window],
    index: &BTreeMap<&str, usize>,
) -> Result<(BTreeMap<JobId, usize>, f64)> {
    // One variable per (job, window) entry.
    let mut vars: Vec<(usize, usize, f64, f64)> = Vec::new(); // (job index, window, cost, duration)
    for (ji, j) in het.jobs().iter().enumerate() {
        for (p, e) in &j.entries {
            let len = e.life().len_f64();
            let cost = energy_of_job(to_f64(&e.work), len, het.alpha())?;
            vars.push((ji, index[p.as_str()], cost, len));
        }
    }
    let n = het.jobs().len();
    let mut congestion = 1.0;
    let x = loop {
        let mut lp = LinearProgram::new(vars.len());
        for (k, v) in vars.iter().enumerate() {
            lp.set_objective(k, v.2)?;
        }
        for ji in 0..n {
            let row = vars
                .iter()
                .enumerate()
                .filter(|(_, v)| v.0 == ji)
                .map(|(k, _)| (k, 1.0))
                .collect();
            lp.add_constraint(row, Relation::Eq, 1.0)?;
        }
        for (w, win) in windows.iter().enumerate() {
            let row: Vec<(usize, f64)> = vars
                .iter()
                .enumerate()
                .filter(|(_, v)| v.1 == w)
                .map(|(k, v)| (k, v.3))
                .collect();
            if !row.is_empty() {
                lp.add_constraint(row, Relation::Le, congestion * win.interval.len_f64())?;
            }
        }
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => break sol.values,
            LpStatus::Infeasible if congestion < 2.0 * n.max(1) as f64 => congestion *= 2.0,
            status => {
                return Err(Error::Solver(format!(
                    "window assignment LP ended {status:?} at congestion {congestion}"
                )))
            }
        }
    };

    // Round: per window, items by decreasing duration over unit copies.
    let mut rights = 0;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut right_window: Vec<usize> = Vec::new();
    for w in 0..windows.len() {
        let mut items: Vec<(usize, f64)> = vars
            .iter()
            .enumerate()
            .filter(|(k, v)| v.1 == w && x[*k] > 1e-9)
            .map(|(k, _)| (k, x[k]))
            .collect();
        if items.is_empty() {
            continue;
        }
        items.sort_by(|a, b| {
            vars[b.0]
                .3
                .total_cmp(&vars[a.0].3)
                .then(het.jobs()[vars[a.0].0].id.cmp(&het.jobs()[vars[b.0].0].id))
        });
        let masses: Vec<f64> = items.iter().map(|i| i.1).collect();
        let (copies, spans) = spread_over_copies(&masses);
        for ((k, _), slots) in items.iter().zip(spans) {
            for (slot, _) in slots {
                edges.push((vars[*k].0, rights + slot - 1, vars[*k].2));
            }
        }
        right_window.extend(std::iter::repeat_n(w, copies));
        rights += copies;
    }
    let m = min_cost_left_saturating(n, rights, &edges).ok_or_else(|| {
        Error::ContractViolation("window assignment: no matching covers every job".into())
    })?;
    let out = m
        .edge_of_left
        .iter()
        .enumerate()
        .map(|(ji, &e)| (het.jobs()[ji].id, right_window[edges[e].1]))
        .collect();
    Ok((out, congestion))
}

/// Total run time of each job in a preemptive profile.
fn durations(ws: &WindowSchedule) -> BTreeMap<JobId, Rational> {
    let mut out: BTreeMap<JobId, Rational> = BTreeMap::new();
    for p in ws.profile.pieces() {
        *out.entry(p.job).or_insert_with(|| int(0)) += p.interval.len();
    }
    out
}

fn first_start(ws: &WindowSchedule, job: JobId) -> Rational {
    ws.profile
        .pieces()
        .iter()
        .filter(|p| p.job == job)
        .map(|p| p.interval.start.clone())
        .min()
        .expect("every job runs")
}

/// Packs jobs back to back in the given order, each starting at its release
/// or after the previous one, with its duration scaled by `scale`.
fn pack(
    jobs: &[&Job],
    durations: &BTreeMap<JobId, Rational>,
    scale: &Rational,
) -> Option<Vec<(JobId, Interval)>> {
    let mut cursor: Option<Rational> = None;
    let mut out = Vec::with_capacity(jobs.len());
    for j in jobs {
        let start = match &cursor {
            Some(c) if c > &j.release => c.clone(),
            _ => j.release.clone(),
        };
        let end = &start + &durations[&j.id] * scale;
        if end > j.deadline {
            return None;
        }
        cursor = Some(end.clone());
        out.push((j.id, Interval::new(start, end)));
    }
    Some(out)
}

fn edf_order(ws: &WindowSchedule) -> Vec<&Job> {
    let mut order: Vec<&Job> = ws.jobs.iter().collect();
    order.sort_by(|a, b| a.deadline.cmp(&b.deadline).then(a.id.cmp(&b.id)));
    order
}

/// How a window's preemptive schedule was made contiguous.
#[derive(Clone, Debug, PartialEq)]
pub enum Reorder {
    /// Deadline order with the preemptive durations: energy unchanged.
    Edf,
    /// Order of first execution with the preemptive durations.
    FirstRun,
    /// Deadline order with every duration multiplied by the factor.
    Scaled(Rational),
}

/// Runs the jobs of every window contiguously in deadline order with their
/// preemptive durations. Fails when that order misses a deadline.
pub fn edf_reorder(solution: &WindowSolution, windows: &[Window]) -> Result<Schedule> {
    let mut out = Vec::new();
    for ws in &solution.windows {
        let placed = pack(&edf_order(ws), &durations(ws), &int(1)).ok_or_else(|| {
            Error::ContractViolation(format!(
                "window {}: running its jobs in deadline order misses a deadline",
                windows[ws.window].id
            ))
        })?;
        out.extend(to_absolute(placed, &windows[ws.window]));
    }
    Ok(Schedule::new(out))
}

fn to_absolute(
    placed: Vec<(JobId, Interval)>,
    window: &Window,
) -> impl Iterator<Item = Assignment> + '_ {
    placed.into_iter().map(move |(job, iv)| {
        Assignment::new(
            job,
            Some(crate::instances::processor_name(window.processor)),
            iv.translate(window.offset()),
        )
    })
}

/// Like [`edf_reorder`], but when deadline order fails it tries the order of
/// first execution, and then deadline order with all durations shrunk by
/// the largest factor `k / 2^20` that fits (halving further if needed).
pub fn reorder_with_fallback(
    solution: &WindowSolution,
    windows: &[Window],
) -> (Schedule, Vec<(usize, Reorder)>) {
    let mut out = Vec::new();
    let mut kinds = Vec::new();
    for ws in &solution.windows {
        if ws.jobs.is_empty() {
            continue;
        }
        let d = durations(ws);
        let edf = edf_order(ws);
        let (placed, kind) = if let Some(p) = pack(&edf, &d, &int(1)) {
            (p, Reorder::Edf)
        } else {
            let mut by_run: Vec<&Job> = ws.jobs.iter().collect();
            by_run.sort_by_cached_key(|j| (first_start(ws, j.id), j.id));
            if let Some(p) = pack(&by_run, &d, &int(1)) {
                (p, Reorder::FirstRun)
            } else {
                let (p, scale) = largest_scale(&edf, &d);
                (p, Reorder::Scaled(scale))
            }
        };
        kinds.push((ws.window, kind));
        out.extend(to_absolute(placed, &windows[ws.window]));
    }
    (Schedule::new(out), kinds)
}

fn largest_scale(
    order: &[&Job],
    d: &BTreeMap<JobId, Rational>,
) -> (Vec<(JobId, Interval)>, Rational) {
    const STEPS: i64 = 1 << 20;
    let scaled = |k: i64, den: &Rational| Rational::from_integer(k.into()) / den;
    let mut den = Rational::from_integer(STEPS.into());
    // Shrinking every duration enough always fits: each job then starts
    // just after the latest earlier release, which precedes its deadline.
    while pack(order, d, &scaled(1, &den)).is_none() {
        den *= int(2);
    }
    let (mut lo, mut hi) = (1i64, STEPS);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if pack(order, d, &scaled(mid, &den)).is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let scale = scaled(lo, &den);
    (pack(order, d, &scale).expect("feasible by search"), scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiproc::{build_heterogeneous_instance, greedy_independent_sets};
    use crate::time::frac;

    fn inst(m: usize, jobs: &[(i64, i64, i64)]) -> Instance {
        let jobs = jobs
            .iter()
            .enumerate()
            .map(|(i, &(r, d, w))| Job::new(i as u64 + 1, int(r), int(d), int(w)).unwrap())
            .collect();
        Instance::new(2.0, m, jobs).unwrap()
    }

    fn solve(i: &Instance, s: Strategy) -> (WindowSolution, Vec<Window>) {
        let p = greedy_independent_sets(i).unwrap();
        let (het, windows) = build_heterogeneous_instance(i, &p).unwrap();
        (solve_windows(&het, &windows, s).unwrap(), windows)
    }

    #[test]
    fn single_job_single_window() {
        for s in [Strategy::Greedy, Strategy::Lp] {
            let i = inst(1, &[(0, 2, 2)]);
            let (sol, windows) = solve(&i, s);
            assert_eq!(windows.len(), 1);
            assert_eq!(sol.window_of[&1], 0);
            assert!((sol.energy() - 2.0).abs() < 1e-12);
            let sched = edf_reorder(&sol, &windows).unwrap();
            assert_eq!(
                sched.get(1).unwrap().interval(),
                Interval::new(int(0), int(2))
            );
        }
    }

    #[test]
    fn strategies_agree_on_feasibility() {
        let i = inst(2, &[(0, 2, 1), (0, 4, 2), (1, 3, 1), (2, 6, 3), (3, 5, 1)]);
        for s in [Strategy::Greedy, Strategy::Lp] {
            let (sol, windows) = solve(&i, s);
            assert_eq!(sol.window_of.len(), 5);
            let (sched, _) = reorder_with_fallback(&sol, &windows);
            assert!(
                crate::instances::validate_schedule(&sched, &i).is_empty(),
                "{s}"
            );
        }
    }

    #[test]
    fn deadline_order_can_fail() {
        // The long job runs around the short one preemptively.
        let i = inst(1, &[(1, 2, 1), (0, 3, 2)]);
        let p = crate::multiproc::ZonePartition::from_sets(&i, &[vec![]]).unwrap();
        let (het, windows) = build_heterogeneous_instance(&i, &p).unwrap();
        let sol = solve_windows(&het, &windows, Strategy::Greedy).unwrap();
        assert!(edf_reorder(&sol, &windows).is_err());
        let (sched, kinds) = reorder_with_fallback(&sol, &windows);
        assert!(matches!(kinds[0].1, Reorder::Scaled(_)));
        assert!(crate::instances::validate_schedule(&sched, &i).is_empty());
        if let Reorder::Scaled(s) = &kinds[0].1 {
            // Short job [1, 1+s], long job needs 2s more before 3.
            assert!(s <= &frac(2, 3) && s > &frac(66, 100));
        }
    }

    #[test]
    fn equal_windows_run_by_deadline() {
        let i = inst(1, &[(0, 4, 2), (0, 3, 1)]);
        let p = crate::multiproc::ZonePartition::from_sets(&i, &[vec![]]).unwrap();
        let (het, windows) = build_heterogeneous_instance(&i, &p).unwrap();
        let sol = solve_windows(&het, &windows, Strategy::Greedy).unwrap();
        let s = edf_reorder(&sol, &windows).unwrap();
        assert!(s.get(2).unwrap().end <= s.get(1).unwrap().start);
        let e = crate::instances::energy_of_schedule(&s, &i).unwrap();
        assert!((e - sol.energy()).abs() < 1e-9);
    }
}
