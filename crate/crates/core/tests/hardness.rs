use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speedscale::discretize::LandmarkGrid;
use speedscale::hardness::{
    assembled_triples, element_counts, extract_matching_g, maximum_matching, planted_instance,
    reduce_f, repair_schedule_traced, verify_gap_inequality, ReductionArtifacts,
};
use speedscale::instances::{
    energy_of_het_schedule, validate_het_schedule, Assignment, JobId, Schedule,
};
use speedscale::oracle::{brute_force_heterogeneous, common_window_optimum, DEFAULT_STATE_CAP};
use speedscale::time::{frac, int, Interval, Rational};

/// Places jobs on machines as given, each machine's jobs in random order
/// with random lengths and idle gaps inside `[0, 3]`.
pub fn random_layout(
    artifacts: &ReductionArtifacts,
    machine_of: &[usize],
    rng: &mut ChaCha8Rng,
) -> Schedule {
    let machines: Vec<&String> = artifacts.machines().collect();
    let mut rows = Vec::new();
    for (p, m) in machines.iter().enumerate() {
        let mut jobs: Vec<JobId> = (0..machine_of.len())
            .filter(|&k| machine_of[k] == p)
            .map(|k| k as JobId + 1)
            .collect();
        jobs.shuffle(rng);
        let lens: Vec<i64> = jobs.iter().map(|_| rng.gen_range(1..6)).collect();
        let gaps: Vec<i64> = (0..=jobs.len()).map(|_| rng.gen_range(0..3)).collect();
        let total: i64 = lens.iter().sum::<i64>() + gaps.iter().sum::<i64>();
        let unit = frac(3, total.max(1));
        let mut t = &unit * int(gaps[0]);
        for (k, &job) in jobs.iter().enumerate() {
            let end: Rational = &t + &unit * int(lens[k]);
            rows.push(Assignment::new(
                job,
                Some((*m).clone()),
                Interval::new(t.clone(), end.clone()),
            ));
            t = end + &unit * int(gaps[k + 1]);
        }
    }
    Schedule::new(rows)
}

fn check_schedule(s: &Schedule, r: &ReductionArtifacts, opt_matching: usize, opt_energy: f64) {
    assert!(validate_het_schedule(s, &r.instance).is_empty());
    let q = r.q() as f64;
    let e = energy_of_het_schedule(s, &r.instance).unwrap();
    assert!(e >= 9.0 * q * (1.0 - 1e-12), "energy {e} below 9q");
    let repaired = repair_schedule_traced(s, r).unwrap();
    let er = energy_of_het_schedule(&repaired.schedule, &r.instance).unwrap();
    assert!(er <= e * (1.0 + 1e-12));
    for step in &repaired.steps {
        assert!(step.energy_after <= step.energy_before * (1.0 + 1e-12));
    }
    for &job in &r.element_jobs {
        let m = repaired
            .schedule
            .get(job)
            .unwrap()
            .processor
            .clone()
            .unwrap();
        assert!(r.is_home(job, &m));
    }
    let [m0, m1, m2, m3] = element_counts(&repaired.schedule, r).unwrap();
    assert_eq!(m1 + 2 * m2 + 3 * m3, 3 * r.q());
    assert_eq!(m0 + m1 + m2 + m3, 3 * r.q());
    let g = extract_matching_g(s, r).unwrap();
    assert!(r.tdm.is_matching(&g));
    assert_eq!(g.len(), m3);
    let report = verify_gap_inequality(s, r, opt_matching, opt_energy).unwrap();
    assert!(report.holds(), "{report:?}");
}

#[test]
fn one_triple_optimum_is_nine() {
    let tdm = planted_instance(1, 0, 0).unwrap();
    let r = reduce_f(&tdm, 2.0).unwrap();
    let (s, e) = common_window_optimum(&r.instance, DEFAULT_STATE_CAP).unwrap();
    assert!((e - 9.0).abs() < 1e-9);
    assert!((energy_of_het_schedule(&s, &r.instance).unwrap() - 9.0).abs() < 1e-9);
    // The grid search over non-preemptive placements agrees.
    let grid = LandmarkGrid::over_endpoints([int(0), int(3)], 2);
    let (_, e_grid) = brute_force_heterogeneous(&r.instance, &grid, DEFAULT_STATE_CAP).unwrap();
    assert!((e_grid - 9.0).abs() < 1e-9);
    assert_eq!(extract_matching_g(&s, &r).unwrap(), vec![0]);
}

#[test]
fn every_placement_of_one_triple() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for distractors in [0, 2] {
        let tdm = planted_instance(1, distractors, 5).unwrap();
        for alpha in [2.0, 3.0] {
            let r = reduce_f(&tdm, alpha).unwrap();
            let (_, opt) = common_window_optimum(&r.instance, DEFAULT_STATE_CAP).unwrap();
            let machines = r.instance.processors().len();
            for code in 0..machines.pow(5) {
                let machine_of: Vec<usize> =
                    (0..5).map(|k| code / machines.pow(k) % machines).collect();
                check_schedule(&random_layout(&r, &machine_of, &mut rng), &r, 1, opt);
            }
        }
    }
}

#[test]
fn planted_pairs_reach_eighteen_and_recover_the_matching() {
    for seed in 0..5 {
        let tdm = planted_instance(2, 3, seed).unwrap();
        assert_eq!(maximum_matching(&tdm).len(), 2);
        let r = reduce_f(&tdm, 2.0).unwrap();
        assert_eq!(r.instance.processors().len(), 6);
        assert_eq!(r.instance.jobs().len(), 10);
        let (s, e) = common_window_optimum(&r.instance, DEFAULT_STATE_CAP).unwrap();
        assert!((e - 18.0).abs() < 1e-9, "seed {seed}: {e}");
        let g = extract_matching_g(&s, &r).unwrap();
        assert_eq!(g.len(), 2);
        assert!(tdm.is_matching(&g));
    }
}

#[test]
fn random_schedules_of_planted_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..4 {
        let tdm = planted_instance(2, 3, seed).unwrap();
        for alpha in [2.0, 2.5] {
            let r = reduce_f(&tdm, alpha).unwrap();
            let (_, opt) = common_window_optimum(&r.instance, DEFAULT_STATE_CAP).unwrap();
            for _ in 0..250 {
                let machine_of: Vec<usize> = (0..10).map(|_| rng.gen_range(0..6)).collect();
                check_schedule(&random_layout(&r, &machine_of, &mut rng), &r, 2, opt);
            }
        }
    }
}

#[test]
fn fully_assembled_schedules_are_unchanged_by_repair() {
    let tdm = planted_instance(2, 2, 7).unwrap();
    let r = reduce_f(&tdm, 2.0).unwrap();
    let (s, _) = common_window_optimum(&r.instance, DEFAULT_STATE_CAP).unwrap();
    let repaired = repair_schedule_traced(&s, &r).unwrap();
    assert!(repaired.steps.is_empty());
    assert_eq!(assembled_triples(&repaired.schedule, &r).unwrap().len(), 2);
}
