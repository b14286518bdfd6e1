use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{
    energy_of_het_schedule, validate_het_schedule, Assignment, JobId, Schedule,
};
use crate::time::{int, to_f64, Interval, Rational};

use super::reduce::{ReductionArtifacts, HEAVY_WORK, HORIZON, LIGHT_WORK};

/// Relative slack allowed when comparing energies.
pub const GAP_TOL: f64 = 1e-9;

/// One move of the repair loop, with the load-based energy around it.
#[derive(Clone, Debug, PartialEq)]
pub struct RepairStep {
    pub job: JobId,
    pub from: String,
    pub to: String,
    /// The job sent back to `from` in exchange, if any.
    pub swapped: Option<JobId>,
    pub energy_before: f64,
    pub energy_after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Repair {
    pub schedule: Schedule,
    pub steps: Vec<RepairStep>,
}

type Placement = BTreeMap<JobId, String>;

fn placement(schedule: &Schedule, artifacts: &ReductionArtifacts) -> Result<Placement> {
    let v = validate_het_schedule(schedule, &artifacts.instance);
    if let Some(first) = v.first() {
        return Err(Error::Domain(format!("schedule is invalid: {first}")));
    }
    Ok(schedule
        .assignments
        .iter()
        .map(|a| (a.job, a.processor.clone().expect("validated")))
        .collect())
}

fn loads(placed: &Placement, artifacts: &ReductionArtifacts) -> BTreeMap<String, Rational> {
    let mut out: BTreeMap<String, Rational> =
        artifacts.machines().map(|m| (m.clone(), int(0))).collect();
    for (&job, m) in placed {
        *out.get_mut(m).expect("known machine") += artifacts.work(job, m);
    }
    out
}

/// `Σ L^α / 3^(α-1)` over machine loads: the cost of running every machine
/// at constant speed over the whole horizon.
pub fn load_energy(loads: impl IntoIterator<Item = Rational>, alpha: f64) -> f64 {
    let h = HORIZON as f64;
    loads
        .into_iter()
        .map(|l| to_f64(&l).powf(alpha) / h.powf(alpha - 1.0))
        .sum()
}

fn placed_energy(placed: &Placement, artifacts: &ReductionArtifacts) -> f64 {
    load_energy(loads(placed, artifacts).into_values(), artifacts.alpha())
}

/// Runs each machine's jobs back to back over `[0, 3]` in id order, at the
/// constant speed `load / 3`.
fn rebalance(placed: &Placement, artifacts: &ReductionArtifacts) -> Schedule {
    let loads = loads(placed, artifacts);
    let mut cursor: BTreeMap<&str, Rational> = loads.keys().map(|m| (m.as_str(), int(0))).collect();
    let mut out = Vec::with_capacity(placed.len());
    for (&job, m) in placed {
        let len = artifacts.work(job, m) * int(HORIZON) / &loads[m];
        let start = cursor[m.as_str()].clone();
        let end = &start + len;
        cursor.insert(m.as_str(), end.clone());
        out.push(Assignment::new(
            job,
            Some(m.clone()),
            Interval::new(start, end),
        ));
    }
    Schedule::new(out)
}

/// Moves every element job onto a triple machine whose triple contains it,
/// never raising the energy.
///
/// Element jobs are taken in id order. A misplaced `j(e)` goes to the first
/// machine of a triple containing `e`; if that machine holds a dummy job or
/// an element job of work 4, the one with the smallest id is swapped back.
/// Machines are rebalanced to constant speed at the end.
pub fn repair_schedule_traced(
    schedule: &Schedule,
    artifacts: &ReductionArtifacts,
) -> Result<Repair> {
    let mut placed = placement(schedule, artifacts)?;
    let mut steps = Vec::new();
    for &job in &artifacts.element_jobs {
        let from = placed[&job].clone();
        if artifacts.is_home(job, &from) {
            continue;
        }
        let e = artifacts.element_of(job).expect("element job");
        let to = artifacts.homes(e)[0].to_string();
        let swapped = placed
            .iter()
            .find(|(&other, m)| {
                **m == to
                    && (artifacts.dummy_jobs.contains(&other)
                        || artifacts.work(other, m) == int(HEAVY_WORK))
            })
            .map(|(&other, _)| other);
        let energy_before = placed_energy(&placed, artifacts);
        placed.insert(job, to.clone());
        if let Some(other) = swapped {
            placed.insert(other, from.clone());
        }
        let energy_after = placed_energy(&placed, artifacts);
        assert!(
            energy_after <= energy_before * (1.0 + GAP_TOL),
            "repair raised the energy from {energy_before} to {energy_after} moving job {job}"
        );
        debug_assert_eq!(artifacts.work(job, &to), int(LIGHT_WORK));
        steps.push(RepairStep {
            job,
            from,
            to,
            swapped,
            energy_before,
            energy_after,
        });
    }
    Ok(Repair {
        schedule: rebalance(&placed, artifacts),
        steps,
    })
}

pub fn repair_schedule(schedule: &Schedule, artifacts: &ReductionArtifacts) -> Result<Schedule> {
    repair_schedule_traced(schedule, artifacts).map(|r| r.schedule)
}

/// Triples (by index) whose machine runs all three of its element jobs.
/// Only meaningful on repaired schedules; see [`extract_matching_g`].
pub fn assembled_triples(
    schedule: &Schedule,
    artifacts: &ReductionArtifacts,
) -> Result<Vec<usize>> {
    let placed = placement(schedule, artifacts)?;
    Ok((0..artifacts.triple_machines.len())
        .filter(|&t| {
            let m = &artifacts.triple_machines[t];
            artifacts
                .tdm
                .triple_elements(t)
                .iter()
                .all(|&e| placed[&artifacts.element_jobs[e]] == *m)
        })
        .collect())
}

/// Repairs the schedule, then reads off the triples whose machine runs all
/// three of their element jobs.
pub fn extract_matching_g(
    schedule: &Schedule,
    artifacts: &ReductionArtifacts,
) -> Result<Vec<usize>> {
    assembled_triples(&repair_schedule(schedule, artifacts)?, artifacts)
}

/// `[m_0, m_1, m_2, m_3]`: how many machines run exactly `k` element jobs.
pub fn element_counts(schedule: &Schedule, artifacts: &ReductionArtifacts) -> Result<[usize; 4]> {
    let placed = placement(schedule, artifacts)?;
    let mut per_machine: BTreeMap<&str, usize> =
        artifacts.machines().map(|m| (m.as_str(), 0)).collect();
    for &job in &artifacts.element_jobs {
        *per_machine
            .get_mut(placed[&job].as_str())
            .expect("known machine") += 1;
    }
    let mut out = [0; 4];
    for k in per_machine.into_values() {
        if k > 3 {
            return Err(Error::Domain(format!("a machine runs {k} element jobs")));
        }
        out[k] += 1;
    }
    Ok(out)
}

/// `3^(α-1) / ((3/2)((2^α + 4^α)/2 - 3^α))`: the factor by which the
/// energy excess over the optimum bounds the matching deficit.
pub fn beta(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 1, got {alpha}")));
    }
    let excess = (2f64.powf(alpha) + 4f64.powf(alpha)) / 2.0 - 3f64.powf(alpha);
    Ok(3f64.powf(alpha - 1.0) / (1.5 * excess))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub energy: f64,
    pub matching: usize,
    pub opt_matching: usize,
    pub opt_energy: f64,
    pub beta: f64,
    /// `OPT(I) - |g(S')|`.
    pub deficit: f64,
    /// `β (E(S') - OPT(I'))`.
    pub allowance: f64,
    pub gap_holds: bool,
    /// `OPT(I') ≤ 9 OPT(I)`.
    pub opt_bound_holds: bool,
}

impl GapReport {
    pub fn holds(&self) -> bool {
        self.gap_holds && self.opt_bound_holds
    }
}

/// Checks `OPT(I) - |g(S')| ≤ β (E(S') - OPT(I'))` and
/// `OPT(I') ≤ 9 OPT(I)` for one schedule, given both optima.
pub fn verify_gap_inequality(
    schedule: &Schedule,
    artifacts: &ReductionArtifacts,
    opt_matching: usize,
    opt_energy: f64,
) -> Result<GapReport> {
    let energy = energy_of_het_schedule(schedule, &artifacts.instance)?;
    let matching = extract_matching_g(schedule, artifacts)?.len();
    let beta = beta(artifacts.alpha())?;
    let deficit = opt_matching as f64 - matching as f64;
    let allowance = beta * (energy - opt_energy);
    let slack = GAP_TOL * energy.abs().max(opt_energy.abs()).max(1.0);
    Ok(GapReport {
        energy,
        matching,
        opt_matching,
        opt_energy,
        beta,
        deficit,
        allowance,
        gap_holds: deficit <= allowance + beta * slack,
        opt_bound_holds: opt_energy <= 9.0 * opt_matching as f64 + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::{parse_tdm, reduce_f};

    fn on(rows: &[(JobId, &str)], artifacts: &ReductionArtifacts) -> Schedule {
        rebalance(
            &rows.iter().map(|&(j, m)| (j, m.to_string())).collect(),
            artifacts,
        )
    }

    fn one_triple() -> ReductionArtifacts {
        reduce_f(
            &parse_tdm(r#"{"q": 1, "triples": [["a","b","c"]]}"#).unwrap(),
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn beta_values() {
        assert!((beta(2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((beta(3.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(beta(1.0001).unwrap() > 1e3);
        assert!(beta(1.0).is_err());
    }

    #[test]
    fn canonical_schedule_is_left_alone() {
        let r = one_triple();
        let s = on(&[(1, "T1"), (2, "T1"), (3, "T1"), (4, "D1"), (5, "D2")], &r);
        let out = repair_schedule_traced(&s, &r).unwrap();
        assert!(out.steps.is_empty());
        assert_eq!(out.schedule, s);
        assert!((energy_of_het_schedule(&s, &r.instance).unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(extract_matching_g(&s, &r).unwrap(), vec![0]);
    }

    #[test]
    fn heavy_element_swaps_with_a_dummy() {
        // T1 holds a dummy (load 3) plus elements 2, 3 (load 2); element 1
        // sits alone on D1 with work 4.
        let r = one_triple();
        let s = on(&[(1, "D1"), (2, "T1"), (3, "T1"), (4, "T1"), (5, "D2")], &r);
        let out = repair_schedule_traced(&s, &r).unwrap();
        assert_eq!(out.steps.len(), 1);
        let step = &out.steps[0];
        assert_eq!((step.job, step.swapped), (1, Some(4)));
        let before = loads(&placement(&s, &r).unwrap(), &r);
        let after = loads(&placement(&out.schedule, &r).unwrap(), &r);
        assert_eq!(&after["T1"], &(&before["T1"] - int(2)));
        assert!(after["D1"] <= before["D1"]);
        assert!((step.energy_after - 9.0).abs() < 1e-12);
    }

    #[test]
    fn light_target_takes_the_job_without_swap() {
        let r = one_triple();
        let s = on(&[(1, "D1"), (2, "T1"), (3, "D2"), (4, "D1"), (5, "D2")], &r);
        let out = repair_schedule_traced(&s, &r).unwrap();
        assert!(out.steps.iter().all(|st| st.swapped.is_none()));
        let after = loads(&placement(&out.schedule, &r).unwrap(), &r);
        assert!(after["T1"] <= int(3));
        assert_eq!(extract_matching_g(&s, &r).unwrap(), vec![0]);
    }

    #[test]
    fn everything_misplaced() {
        let r = one_triple();
        let s = on(&[(1, "D1"), (2, "D1"), (3, "D2"), (4, "T1"), (5, "T1")], &r);
        let out = repair_schedule_traced(&s, &r).unwrap();
        assert!(out
            .steps
            .windows(2)
            .all(|w| w[1].energy_before <= w[0].energy_before));
        assert_eq!(assembled_triples(&out.schedule, &r).unwrap(), vec![0]);
        assert!(validate_het_schedule(&out.schedule, &r.instance).is_empty());
        let e0 = energy_of_het_schedule(&s, &r.instance).unwrap();
        let e1 = energy_of_het_schedule(&out.schedule, &r.instance).unwrap();
        assert!(e1 <= e0);
        let report = verify_gap_inequality(&s, &r, 1, 9.0).unwrap();
        assert!(report.holds());
        assert_eq!(element_counts(&out.schedule, &r).unwrap(), [2, 0, 0, 1]);
    }
}
