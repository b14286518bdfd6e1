use crate::error::{Error, Result};
use crate::instances::{Job, JobId};
use crate::time::{Interval, Rational};

/// Jobs with pairwise interior-disjoint life intervals, ordered by deadline.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodIndependentSet {
    members: Vec<Job>,
}

impl GoodIndependentSet {
    /// Wraps an arbitrary job set, rejecting it unless it is independent.
    pub fn from_jobs(jobs: &[Job]) -> Result<Self> {
        let mut members = jobs.to_vec();
        members.sort_by(|a, b| a.deadline.cmp(&b.deadline).then(a.id.cmp(&b.id)));
        for w in members.windows(2) {
            if w[1].release < w[0].deadline {
                return Err(Error::Domain(format!(
                    "jobs {} and {} have overlapping life intervals",
                    w[0].id, w[1].id
                )));
            }
        }
        Ok(GoodIndependentSet { members })
    }

    pub fn members(&self) -> &[Job] {
        &self.members
    }

    pub fn ids(&self) -> Vec<JobId> {
        self.members.iter().map(|j| j.id).collect()
    }

    /// Strictly increasing.
    pub fn deadlines(&self) -> Vec<Rational> {
        self.members.iter().map(|j| j.deadline.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Zones between consecutive deadlines, with the unbounded outer zones
    /// clipped to `span`. Empty zones are skipped.
    pub fn zones(&self, span: &Interval) -> Vec<Interval> {
        zones_between(&self.deadlines(), span)
    }
}

/// Consecutive boundaries `span.start, d_1, ..., d_k, span.end` as intervals
/// of positive length. Deadlines outside `span` are ignored.
pub fn zones_between(deadlines: &[Rational], span: &Interval) -> Vec<Interval> {
    let mut cuts = vec![span.start.clone()];
    cuts.extend(
        deadlines
            .iter()
            .filter(|d| span.contains_point_interior(d))
            .cloned(),
    );
    cuts.push(span.end.clone());
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| Interval::new(w[0].clone(), w[1].clone()))
        .collect()
}

/// Earliest-deadline-first greedy: scan by deadline and keep each job whose
/// life starts no earlier than the last kept deadline. Ties by id.
pub fn edf_greedy<'a>(jobs: impl IntoIterator<Item = &'a Job>) -> Vec<&'a Job> {
    let mut order: Vec<&Job> = jobs.into_iter().collect();
    order.sort_by(|a, b| a.deadline.cmp(&b.deadline).then(a.id.cmp(&b.id)));
    let mut kept: Vec<&Job> = Vec::new();
    for j in order {
        if kept.last().is_none_or(|last| j.release >= last.deadline) {
            kept.push(j);
        }
    }
    kept
}

pub fn good_independent_set(jobs: &[Job]) -> GoodIndependentSet {
    GoodIndependentSet {
        members: edf_greedy(jobs).into_iter().cloned().collect(),
    }
}

/// True iff no job of `pool` lives strictly between two consecutive
/// deadlines of `set` (the outer gaps extend to infinity).
pub fn is_good(set: &[Job], pool: &[Job]) -> Result<bool> {
    let set = GoodIndependentSet::from_jobs(set)?;
    let deadlines = set.deadlines();
    Ok(pool.iter().all(|j| {
        // Index of the first deadline strictly after the release.
        let k = deadlines.partition_point(|d| *d <= j.release);
        let after_prev = k == 0 || j.release > deadlines[k - 1];
        let before_next = k == deadlines.len() || j.deadline < deadlines[k];
        !(after_prev && before_next)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate_random, RandomSpec};
    use crate::time::int;
    use proptest::prelude::*;

    fn jobs(lives: &[(i64, i64)]) -> Vec<Job> {
        lives
            .iter()
            .enumerate()
            .map(|(i, &(r, d))| Job::new(i as u64 + 1, int(r), int(d), int(1)).unwrap())
            .collect()
    }

    #[test]
    fn single_job() {
        let j = jobs(&[(2, 5)]);
        assert_eq!(good_independent_set(&j).ids(), vec![1]);
    }

    #[test]
    fn picks_earliest_deadlines() {
        let j = jobs(&[(0, 1), (0, 3), (2, 3)]);
        let s = good_independent_set(&j);
        assert_eq!(s.deadlines(), vec![int(1), int(3)]);
        assert!(is_good(s.members(), &j).unwrap());

        let j = jobs(&[(0, 4), (1, 2)]);
        assert_eq!(good_independent_set(&j).ids(), vec![2]);
    }

    #[test]
    fn goodness_predicate() {
        let set = jobs(&[(0, 1), (9, 10)]);
        let mut pool = set.clone();
        pool.push(Job::new(3, int(3), int(4), int(1)).unwrap());
        assert!(!is_good(&set, &pool).unwrap());
        assert!(is_good(&set, &[]).unwrap());
        // Touching a deadline is not strictly between.
        pool[2] = Job::new(3, int(1), int(4), int(1)).unwrap();
        assert!(is_good(&set, &pool).unwrap());
        assert!(is_good(&jobs(&[(0, 2), (1, 3)]), &[]).is_err());
    }

    #[test]
    fn zones_are_clipped_to_the_span() {
        let s = good_independent_set(&jobs(&[(0, 1), (0, 3), (2, 3)]));
        let z = s.zones(&Interval::new(int(0), int(3)));
        assert_eq!(
            z,
            vec![Interval::new(int(0), int(1)), Interval::new(int(1), int(3))]
        );
    }

    proptest! {
        #[test]
        fn greedy_output_is_good(n in 1usize..9, seed in 0u64..5000) {
            let i = generate_random(&RandomSpec { n, seed, horizon: 10, ..Default::default() }).unwrap();
            let s = good_independent_set(i.jobs());
            prop_assert!(!s.is_empty());
            prop_assert!(s.deadlines().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(is_good(s.members(), i.jobs()).unwrap());
        }
    }
}
