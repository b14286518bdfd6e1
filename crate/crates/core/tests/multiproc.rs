use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speedscale::discretize::build_grid_with_density;
use speedscale::instances::{
    energy_of_job, energy_of_schedule, processor_name, validate_schedule, Assignment, Instance,
    Job, Schedule,
};
use speedscale::multiproc::{
    approximation_bound, cut_at_zone_boundaries, greedy_independent_sets,
    schedule_multiproc_detailed, transform_assign_to_processors, transform_bound, Move, Strategy,
};
use speedscale::oracle::{brute_force_nonpreemptive, DEFAULT_STATE_CAP};
use speedscale::time::{frac, int, Interval};

/// A random valid schedule on `m` processors, with each job's life a random
/// widening of its execution interval.
pub fn random_scheduled_instance(
    seed: u64,
    m: usize,
    per_proc: usize,
    alpha: f64,
) -> (Instance, Schedule) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    let mut rows = Vec::new();
    let mut id = 1;
    for p in 0..m {
        let mut cursor = int(0);
        for _ in 0..per_proc {
            let start = &cursor + frac(rng.gen_range(0..4), 2);
            let end = &start + frac(rng.gen_range(1..8), 2);
            let release = &start - frac(rng.gen_range(0..6), 2);
            let deadline = &end + frac(rng.gen_range(0..6), 2);
            let work = int(rng.gen_range(1..4));
            jobs.push(Job::new(id, release, deadline, work).unwrap());
            rows.push(Assignment::new(
                id,
                Some(processor_name(p)),
                Interval::new(start, end.clone()),
            ));
            cursor = end;
            id += 1;
        }
    }
    (Instance::new(alpha, m, jobs).unwrap(), Schedule::new(rows))
}

fn job_energy(s: &Schedule, i: &Instance, id: u64) -> f64 {
    let a = s.get(id).unwrap();
    energy_of_job(
        i.job(id).unwrap().work_f64(),
        a.interval().len_f64(),
        i.alpha(),
    )
    .unwrap()
}

#[test]
fn transforms_stay_within_their_bound() {
    let mut cases = 0;
    for seed in 0..2000u64 {
        let m = 2 + (seed % 3) as usize;
        let alpha = [2.0, 3.0, 2.5][(seed / 3 % 3) as usize];
        let (i, s) = random_scheduled_instance(seed, m, 3 + (seed % 2) as usize, alpha);
        assert!(validate_schedule(&s, &i).is_empty());
        let part = greedy_independent_sets(&i).unwrap();
        let (s1, moves) = transform_assign_to_processors(&i, &s, &part).unwrap();
        let (s2, _) = cut_at_zone_boundaries(&i, &s1, &part).unwrap();
        let mut partners: Vec<_> = moves
            .iter()
            .filter_map(|m| match m.how {
                Move::Paired { partner } => Some(partner),
                Move::MiddleFifth => None,
            })
            .collect();
        let paired = partners.len();
        partners.sort();
        partners.dedup();
        assert_eq!(
            partners.len(),
            paired,
            "seed {seed}: a partner was paired twice"
        );
        assert!(validate_schedule(&s1, &i).is_empty());
        assert!(validate_schedule(&s2, &i).is_empty());
        for p in 0..m {
            for j in part.set(p).members() {
                assert_eq!(
                    s2.get(j.id).unwrap().processor.as_deref(),
                    Some(processor_name(p).as_str())
                );
            }
        }
        for j in i.jobs() {
            let (e0, e1, e2) = (
                job_energy(&s, &i, j.id),
                job_energy(&s1, &i, j.id),
                job_energy(&s2, &i, j.id),
            );
            assert!(
                e0 == e1 || e1 == e2,
                "seed {seed}: job {} changed twice",
                j.id
            );
        }
        let ratio = energy_of_schedule(&s2, &i).unwrap() / energy_of_schedule(&s, &i).unwrap();
        assert!(
            ratio <= transform_bound(alpha, i.work_ratio()),
            "seed {seed}: ratio {ratio}"
        );
        cases += 1;
    }
    assert_eq!(cases, 2000);
}

#[test]
fn equal_work_end_to_end_against_brute_force() {
    let eps = 0.1;
    let bound = approximation_bound(2.0, eps, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..30u64 {
        let spec = speedscale::instances::RandomSpec {
            n: 3 + (seed % 3) as usize,
            m: 2,
            seed,
            work_range: (2, 2),
            horizon: 6,
            ..Default::default()
        };
        let i = speedscale::instances::generate_random(&spec).unwrap();
        let grid = build_grid_with_density(&i, 3);
        let (_, opt) = brute_force_nonpreemptive(&i, &grid, DEFAULT_STATE_CAP).unwrap();
        for strategy in [Strategy::Lp, Strategy::Greedy] {
            let out = schedule_multiproc_detailed(&i, strategy).unwrap();
            assert!(validate_schedule(&out.schedule, &i).is_empty());
            let ratio = out.energy / opt;
            worst = worst.max(ratio);
            assert!(ratio <= bound, "seed {seed} {strategy}: ratio {ratio}");
        }
    }
    assert!(worst >= 1.0 - 1e-9);
}
