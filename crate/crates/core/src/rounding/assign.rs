use std::collections::BTreeMap;

use super::zones::{locate_subzone, Side, Subzone};
use super::GoodIndependentSet;
use crate::error::{Error, Result};
use crate::instances::{energy_of_job, processor_name, Assignment, Instance, JobId, Schedule};
use crate::lp1::FractionalSolution;
use crate::matching::min_cost_left_saturating;
use crate::time::{int, to_f64, Interval, Rational};

/// Slack when deciding which unit slots a cumulative mass span touches.
pub const SLOT_TOL: f64 = 1e-7;

/// Copy `copy` (1-based) of a subzone on the right side of the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct RightVertex {
    pub subzone: Subzone,
    pub copy: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub job: JobId,
    pub right: usize,
    /// `w^α / ℓ^(α-1)`.
    pub weight: f64,
    pub length: Rational,
    /// Share of the fractional item that falls into this edge's unit slot.
    pub mass: f64,
}

/// Per-subzone totals used by the feasibility argument.
#[derive(Clone, Debug, PartialEq)]
pub struct SubzoneLoad {
    pub subzone: Subzone,
    pub mass: f64,
    /// `v(Z) = Σ z · |I|` over the items assigned to the subzone.
    pub volume: f64,
    pub copies: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentGraph {
    jobs: Vec<JobId>,
    rights: Vec<RightVertex>,
    edges: Vec<GraphEdge>,
    loads: Vec<SubzoneLoad>,
}

impl AssignmentGraph {
    pub fn jobs(&self) -> &[JobId] {
        &self.jobs
    }

    pub fn rights(&self) -> &[RightVertex] {
        &self.rights
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn loads(&self) -> &[SubzoneLoad] {
        &self.loads
    }

    /// Weight of the fractional matching induced by the solution.
    pub fn fractional_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.mass * e.weight).sum()
    }

    /// Edge lengths never increase from one copy of a subzone to the next.
    pub fn is_monotone(&self) -> bool {
        let mut by_right: Vec<(Option<&Rational>, Option<&Rational>)> =
            vec![(None, None); self.rights.len()];
        for e in &self.edges {
            let (lo, hi) = &mut by_right[e.right];
            if lo.is_none_or(|l| &e.length < l) {
                *lo = Some(&e.length);
            }
            if hi.is_none_or(|h| &e.length > h) {
                *hi = Some(&e.length);
            }
        }
        (1..self.rights.len()).all(|k| {
            if self.rights[k].subzone != self.rights[k - 1].subzone {
                return true;
            }
            match (by_right[k - 1].0, by_right[k].1) {
                (Some(min_prev), Some(max_next)) => min_prev >= max_next,
                _ => true,
            }
        })
    }

    /// Checks that the induced fractional matching fits: every copy carries
    /// at most one unit and every job at least one.
    pub fn check_fractional_matching(&self, tol: f64) -> Result<()> {
        let mut right_load = vec![0.0; self.rights.len()];
        let mut job_load: BTreeMap<JobId, f64> = self.jobs.iter().map(|&j| (j, 0.0)).collect();
        for e in &self.edges {
            right_load[e.right] += e.mass;
            *job_load.get_mut(&e.job).expect("edge job is a vertex") += e.mass;
        }
        if let Some((k, l)) = right_load.iter().enumerate().find(|(_, l)| **l > 1.0 + tol) {
            return Err(Error::ContractViolation(format!(
                "copy {} of subzone {} carries fractional mass {l}",
                self.rights[k].copy, self.rights[k].subzone
            )));
        }
        if let Some((j, l)) = job_load.iter().find(|(_, l)| **l < 1.0 - tol) {
            return Err(Error::ContractViolation(format!(
                "job {j} carries fractional mass {l} < 1 in the assignment graph"
            )));
        }
        Ok(())
    }
}

/// Lays the masses end to end on `(0, Σ mass]` and cuts that line into unit
/// slots. Returns the slot count `⌈Σ mass⌉` (at least one) and, per item,
/// the 1-based slots its span meets together with the mass inside each.
pub fn spread_over_copies(masses: &[f64]) -> (usize, Vec<Vec<(usize, f64)>>) {
    let total: f64 = masses.iter().sum();
    let copies = ((total - SLOT_TOL).ceil() as usize).max(1);
    let mut prefix = 0.0;
    let spans = masses
        .iter()
        .map(|&m| {
            let (p, q) = (prefix, prefix + m);
            prefix = q;
            let first = ((p + SLOT_TOL).floor() as usize + 1).min(copies);
            let last = ((q - SLOT_TOL).ceil() as usize).clamp(first, copies);
            (first..=last)
                .map(|slot| {
                    let lo = if slot == first { p } else { (slot - 1) as f64 };
                    let hi = if slot == last { q } else { slot as f64 };
                    (slot, (hi - lo).max(0.0))
                })
                .collect()
        })
        .collect();
    (copies, spans)
}

struct Item {
    job: JobId,
    length: Rational,
    mass: f64,
}

pub fn build_assignment_graph(
    z: &FractionalSolution,
    gis: &GoodIndependentSet,
    instance: &Instance,
) -> Result<AssignmentGraph> {
    let span = instance
        .span()
        .ok_or_else(|| Error::Domain("instance has no jobs".into()))?;
    let zones = gis.zones(&span);
    let alpha = instance.alpha();

    let mut groups: BTreeMap<Subzone, (Vec<Item>, f64)> = BTreeMap::new();
    for e in z.entries() {
        let job = instance
            .job(e.job)
            .expect("entry validated against instance");
        let sz = locate_subzone(&zones, job, &e.interval)?;
        let (items, volume) = groups.entry(sz).or_default();
        *volume += e.value * e.interval.len_f64();
        items.push(Item {
            job: e.job,
            length: e.interval.len(),
            mass: e.value,
        });
    }

    let mut rights = Vec::new();
    let mut edges = Vec::new();
    let mut loads = Vec::new();
    for (sz, (mut items, volume)) in groups {
        items.sort_by(|a, b| b.length.cmp(&a.length).then(a.job.cmp(&b.job)));
        let masses: Vec<f64> = items.iter().map(|i| i.mass).collect();
        let total: f64 = masses.iter().sum();
        let (copies, spans) = spread_over_copies(&masses);
        let base = rights.len();
        rights.extend((1..=copies).map(|copy| RightVertex {
            subzone: sz.clone(),
            copy,
        }));
        for (item, slots) in items.iter().zip(spans) {
            let weight = energy_of_job(
                instance.job(item.job).expect("validated").work_f64(),
                to_f64(&item.length),
                alpha,
            )?;
            for (slot, mass) in slots {
                edges.push(GraphEdge {
                    job: item.job,
                    right: base + slot - 1,
                    weight,
                    length: item.length.clone(),
                    mass,
                });
            }
        }
        loads.push(SubzoneLoad {
            subzone: sz,
            mass: total,
            volume,
            copies,
        });
    }

    let mut jobs: Vec<JobId> = instance.jobs().iter().map(|j| j.id).collect();
    jobs.sort();
    Ok(AssignmentGraph {
        jobs,
        rights,
        edges,
        loads,
    })
}

/// One chosen edge per job.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphMatching {
    /// Edge index for each entry of [`AssignmentGraph::jobs`].
    pub edges: Vec<usize>,
    pub weight: f64,
}

pub fn min_weight_saturating_matching(graph: &AssignmentGraph) -> Result<GraphMatching> {
    let index: BTreeMap<JobId, usize> = graph
        .jobs
        .iter()
        .enumerate()
        .map(|(k, &j)| (j, k))
        .collect();
    let triples: Vec<(usize, usize, f64)> = graph
        .edges
        .iter()
        .map(|e| (index[&e.job], e.right, e.weight))
        .collect();
    let m = min_cost_left_saturating(graph.jobs.len(), graph.rights.len(), &triples).ok_or_else(
        || {
            Error::ContractViolation(
                "the assignment graph has no matching covering every job".into(),
            )
        },
    )?;
    Ok(GraphMatching {
        edges: m.edge_of_left,
        weight: m.cost,
    })
}

/// How much of a subzone the placement used.
#[derive(Clone, Debug, PartialEq)]
pub struct SubzoneSlack {
    pub subzone: Subzone,
    /// Length from the anchoring deadline to the far end of the last job
    /// placed in this subzone or any subzone inside it.
    pub used: Rational,
    pub capacity: Rational,
}

/// Gives each matched job a third of its edge length inside its subzone.
/// Innermost subzones are filled first, packing away from the anchoring
/// deadline: start sides left to right by deadline, end sides right to left
/// by release.
pub fn matching_to_schedule(
    matching: &GraphMatching,
    graph: &AssignmentGraph,
    instance: &Instance,
) -> Result<(Schedule, Vec<SubzoneSlack>)> {
    let three = int(3);
    let mut by_subzone: BTreeMap<Subzone, Vec<(JobId, Rational)>> = BTreeMap::new();
    for &k in &matching.edges {
        let e = &graph.edges[k];
        by_subzone
            .entry(graph.rights[e.right].subzone.clone())
            .or_default()
            .push((e.job, e.length.clone()));
    }

    let mut chains: BTreeMap<(usize, Side), Vec<Subzone>> = BTreeMap::new();
    for sz in by_subzone.keys() {
        chains
            .entry((sz.zone, sz.side))
            .or_default()
            .push(sz.clone());
    }

    let mut assignments = Vec::new();
    let mut slack = Vec::new();
    for ((_, side), mut chain) in chains {
        chain.sort_by(|a, b| b.depth.cmp(&a.depth));
        let anchor = match side {
            Side::Start => chain[0].zone_interval.start.clone(),
            Side::End => chain[0].zone_interval.end.clone(),
        };
        let mut used = int(0);
        for sz in &chain {
            let mut jobs = by_subzone[sz].clone();
            let key = |id: &JobId| {
                let j = instance.job(*id).expect("validated");
                match side {
                    Side::Start => (j.deadline.clone(), *id),
                    Side::End => (-j.release.clone(), *id),
                }
            };
            jobs.sort_by_key(|(id, _)| key(id));
            let capacity = sz.interval().len();
            for (job, length) in &jobs {
                let piece = length / &three;
                let interval = match side {
                    Side::Start => Interval::new(&anchor + &used, &anchor + &used + &piece),
                    Side::End => Interval::new(&anchor - &used - &piece, &anchor - &used),
                };
                used += piece;
                assignments.push(Assignment::new(*job, Some(processor_name(0)), interval));
            }
            if used > capacity {
                let load = graph.loads.iter().find(|l| &l.subzone == sz);
                let matched: Rational = jobs.iter().map(|(_, l)| l.clone()).sum();
                return Err(Error::ContractViolation(format!(
                    "placement overflows subzone {sz}: needs {} of {}; matched length {}, volume {}",
                    to_f64(&used),
                    to_f64(&capacity),
                    to_f64(&matched),
                    load.map_or(0.0, |l| l.volume)
                )));
            }
            slack.push(SubzoneSlack {
                subzone: sz.clone(),
                used: used.clone(),
                capacity,
            });
        }
    }
    Ok((Schedule::new(assignments), slack))
}
