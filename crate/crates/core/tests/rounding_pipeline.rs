use proptest::prelude::*;
use speedscale::discretize::{build_grid_with_density, LandmarkGrid};
use speedscale::instances::{generate_random, validate_schedule, Instance, RandomSpec};
use speedscale::lp1::{build_lp1, solve_lp1, FractionalSolution};
use speedscale::oracle::{brute_force_nonpreemptive, yds_preemptive, DEFAULT_STATE_CAP};
use speedscale::rounding::{is_good, round_detailed, Side};
use speedscale::time::Interval;
use speedscale::Error;

const LP_TOL: f64 = 1e-6;

/// LP relaxation with the non-preemption rows on the coarsest grid (from two
/// landmarks per gap up) that admits a solution.
fn relax(instance: &Instance) -> (LandmarkGrid, FractionalSolution) {
    for per_gap in 2..=6 {
        let grid = build_grid_with_density(instance, per_gap);
        let model = build_lp1(instance, &grid, true).unwrap();
        match solve_lp1(&model, instance) {
            Ok(x) => return (grid, x),
            Err(Error::Infeasible(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
    panic!("no feasible grid up to six landmarks per gap");
}

/// Intervals between every pair of support endpoints.
fn all_intervals(x: &FractionalSolution) -> Vec<Interval> {
    let mut pts: Vec<_> = x
        .entries()
        .iter()
        .flat_map(|e| [e.interval.start.clone(), e.interval.end.clone()])
        .collect();
    pts.sort();
    pts.dedup();
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            out.push(Interval::new(pts[i].clone(), pts[j].clone()));
        }
    }
    out
}

fn check_lp_rows(label: &str, x: &FractionalSolution, instance: &Instance) {
    assert!(
        x.assignment_violation(instance) <= LP_TOL,
        "{label}: assignment"
    );
    assert!(
        x.max_load() <= 1.0 + LP_TOL,
        "{label}: load {}",
        x.max_load()
    );
    let v = x.non_preemption_violation(instance, &all_intervals(x));
    assert!(v <= LP_TOL, "{label}: non-preemption row exceeded by {v}");
}

fn run(instance: &Instance) {
    let (_, x) = relax(instance);
    check_lp_rows("x", &x, instance);
    let r = round_detailed(&x, instance).unwrap();
    let a = instance.alpha();
    let rep = &r.report;

    assert!(is_good(r.independent_set.members(), instance.jobs()).unwrap());
    assert!(rep.e_y <= 2f64.powf(a - 1.0) * rep.e_x * (1.0 + 1e-9));
    assert!(rep.e_z <= 2f64.powf(a - 1.0) * rep.e_y * (1.0 + 1e-9));
    assert!(rep.w_match <= rep.w_fractional * (1.0 + 1e-9));
    assert!((rep.e_placed - 3f64.powf(a - 1.0) * rep.w_match).abs() <= 1e-9 * rep.e_placed);
    assert!(rep.e_final <= rep.e_placed * (1.0 + 1e-12));
    assert!(validate_schedule(&r.placed, instance).is_empty());
    assert!(rep.ratio <= 12f64.powf(a - 1.0));

    check_lp_rows("y", &r.y, instance);
    check_lp_rows("z", &r.z, instance);
    let deadlines = r.independent_set.deadlines();
    for e in r.y.entries() {
        assert!(!deadlines
            .iter()
            .any(|d| e.interval.contains_point_interior(d)));
    }
    let zones = r.independent_set.zones(&instance.span().unwrap());
    for e in r.z.entries() {
        let job = instance.job(e.job).unwrap();
        let sz = speedscale::rounding::locate_subzone(&zones, job, &e.interval).unwrap();
        assert!(sz.interval().contains(&e.interval));
        assert!(job.life().contains(&sz.interval()));
        match sz.side {
            Side::Start => assert!(job.release <= sz.zone_interval.start),
            Side::End => assert!(job.deadline >= sz.zone_interval.end),
        }
    }
    assert!(r.graph.is_monotone());
    assert!(validate_schedule(&r.schedule, instance).is_empty());

    let (_, lower) = yds_preemptive(instance).unwrap();
    assert!(rep.e_final >= lower * (1.0 - 1e-9));
    // Exhaustive search on a grid holding every placed endpoint can only do
    // at least as well as the rounded schedule.
    let pts = r
        .schedule
        .assignments
        .iter()
        .flat_map(|s| [s.start.clone(), s.end.clone()]);
    let grid = LandmarkGrid::with_points(instance, pts);
    let (_, best) = brute_force_nonpreemptive(instance, &grid, DEFAULT_STATE_CAP).unwrap();
    assert!(best <= rep.e_final * (1.0 + 1e-9));
}

#[test]
fn single_job() {
    let i = generate_random(&RandomSpec {
        n: 1,
        ..Default::default()
    })
    .unwrap();
    run(&i);
}

#[test]
fn gap_family() {
    for n in 1..5 {
        run(&speedscale::instances::generate_gap_family(n, 2.0).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_instances_round_within_the_bound(seed in 0u64..100_000, alpha in prop::sample::select(vec![2.0, 2.5, 3.0])) {
        let i = generate_random(&RandomSpec { n: 5, seed, alpha, ..Default::default() }).unwrap();
        run(&i);
    }
}
