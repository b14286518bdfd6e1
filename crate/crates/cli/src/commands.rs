use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};
use speedscale::discretize::{
    build_grid, build_grid_capped, build_grid_with_density, landmarks_per_gap, LandmarkGrid,
};
use speedscale::hardness::{
    maximum_matching, parse_tdm, planted_instance, reduce_f, verify_gap_inequality,
};
use speedscale::instances::{
    energy_of_job, energy_of_schedule, generate_gap_family, generate_random, parse_instance,
    parse_schedule, schedule_value, serialize_het_instance, serialize_instance,
    validate_het_schedule, validate_schedule, AnyInstance, HeterogeneousInstance, Instance,
    RandomSpec, Schedule,
};
use speedscale::lp1::{build_lp1, solve_lp1_detailed, Lp1Model, Lp1Outcome};
use speedscale::multiproc::{
    approximation_bound, schedule_multiproc_detailed, transform_bound, Reorder, Strategy,
};
use speedscale::oracle::{
    brute_force_heterogeneous, brute_force_nonpreemptive, common_window_optimum, yds_preemptive,
};
use speedscale::rounding::round_detailed;
use speedscale::time::rational_to_json;
use speedscale::{Error, Result};

use crate::report::{to_text, Report};
use crate::{Cli, Command, GenCommand, Global, OracleCommand};

pub fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Solve(a) => solve(&load_homogeneous(&a.instance, g)?, g, "solve", false),
        Command::Round(a) => solve(&load_homogeneous(&a.instance, g)?, g, "round", true),
        Command::Lp(a) => lp(&load_homogeneous(&a.instance, g)?, g),
        Command::Oracle(OracleCommand::Yds(a)) => yds(&load_homogeneous(&a.instance, g)?, g),
        Command::Oracle(OracleCommand::Brute(a)) => brute(&a.instance, g),
        Command::Discretize { instance, dump } => {
            discretize(&load_homogeneous(instance, g)?, g, *dump)
        }
        Command::GapExperiment { n, per_gap } => gap_experiment(n, *per_gap, g),
        Command::Reduce3dm { input } => {
            let tdm = parse_tdm(&read(input)?)?;
            let r = reduce_f(&tdm, g.alpha.unwrap_or(2.0))?;
            Ok(serialize_het_instance(&r.instance) + "\n")
        }
        Command::CheckGap { tdm, schedule } => check_gap(tdm, schedule, g),
        Command::Bench { corpus, strategies } => bench(corpus, strategies, g),
        Command::Gen(GenCommand::Random {
            n,
            m,
            work_min,
            work_max,
            horizon,
        }) => {
            let spec = RandomSpec {
                n: *n,
                m: *m,
                alpha: g.alpha.unwrap_or(2.0),
                seed: g.seed,
                work_range: (*work_min, *work_max),
                horizon: *horizon,
            };
            Ok(serialize_instance(&generate_random(&spec)?) + "\n")
        }
        Command::Gen(GenCommand::GapFamily { n }) => {
            Ok(serialize_instance(&generate_gap_family(*n, g.alpha.unwrap_or(2.0))?) + "\n")
        }
        Command::Gen(GenCommand::Planted3dm { q, distractors }) => {
            Ok(planted_instance(*q, *distractors, g.seed)?.to_json() + "\n")
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: format!("cannot read: {e}"),
    })
}

fn load(path: &Path, g: &Global) -> Result<AnyInstance> {
    match parse_instance(&read(path)?)? {
        AnyInstance::Homogeneous(i) => match g.alpha {
            Some(a) => Ok(AnyInstance::Homogeneous(i.with_alpha(a)?)),
            None => Ok(AnyInstance::Homogeneous(i)),
        },
        AnyInstance::Heterogeneous(_) if g.alpha.is_some() => Err(Error::Domain(
            "--alpha cannot override the per-processor exponents of a heterogeneous instance"
                .into(),
        )),
        het => Ok(het),
    }
}

fn load_homogeneous(path: &Path, g: &Global) -> Result<Instance> {
    match load(path, g)? {
        AnyInstance::Homogeneous(i) => Ok(i),
        AnyInstance::Heterogeneous(_) => Err(Error::Domain(format!(
            "{} is a heterogeneous instance; this command needs identical processors",
            path.display()
        ))),
    }
}

fn report_for(command: &str, instance: &Instance, g: &Global) -> Report {
    let mut r = Report::new(command, g, Some(instance.alpha()));
    r.instance(
        &serialize_instance(instance),
        instance.len(),
        instance.processors(),
    );
    r
}

fn grid_value(grid: &LandmarkGrid, instance: &Instance, epsilon: f64) -> Result<Value> {
    Ok(json!({
        "points": grid.len(),
        "per_gap": grid.per_gap(),
        "full_per_gap": landmarks_per_gap(instance.len(), epsilon)?,
    }))
}

/// LP relaxation on the capped grid, doubling the cap while the grid is too
/// coarse for any landmark-aligned schedule.
fn relax(instance: &Instance, g: &Global) -> Result<(Lp1Model, Lp1Outcome)> {
    let full = landmarks_per_gap(instance.len(), g.epsilon)?;
    let mut cap = g.max_grid_points.max(2);
    loop {
        let grid = build_grid_capped(instance, g.epsilon, cap)?;
        let model = build_lp1(instance, &grid, !g.no_constraint_3)?;
        match solve_lp1_detailed(&model, instance) {
            Err(Error::Infeasible(_)) if grid.per_gap() < full => cap *= 2,
            other => return other.map(|o| (model, o)),
        }
    }
}

fn lp_value(model: &Lp1Model, out: &Lp1Outcome) -> Value {
    json!({
        "value": out.lp_value,
        "variables": model.num_vars(),
        "rows": model.lp().num_constraints(),
        "nnz": model.lp().nnz(),
        "pruned_rows": model.pruned_rows(),
        "pivots": out.pivots,
    })
}

fn checked(schedule: &Schedule, instance: &Instance) -> Result<f64> {
    let v = validate_schedule(schedule, instance);
    if !v.is_empty() {
        return Err(Error::InvalidSchedule(v));
    }
    energy_of_schedule(schedule, instance)
}

/// `max(YDS / m^(α-1), Σ_j w_j^α / |L_j|^(α-1))`. Summing the speeds of `m`
/// processors gives a single-processor preemptive schedule that costs at
/// most `m^(α-1)` times as much; and no job can run slower than over its
/// whole life.
fn lower_bound(instance: &Instance) -> Result<f64> {
    let alpha = instance.alpha();
    let (_, yds) = yds_preemptive(&instance.with_processors(1)?)?;
    let mut alone = 0.0;
    for j in instance.jobs() {
        alone += energy_of_job(j.work_f64(), j.life().len_f64(), alpha)?;
    }
    Ok((yds / (instance.processors() as f64).powf(alpha - 1.0)).max(alone))
}

fn solve(instance: &Instance, g: &Global, command: &str, single_only: bool) -> Result<String> {
    if instance.processors() == 1 {
        return solve_single(instance, g, command);
    }
    if single_only {
        return Err(Error::Domain(format!(
            "{command} works on one processor; the instance has {}",
            instance.processors()
        )));
    }
    let mut report = report_for(command, instance, g);
    let out = schedule_multiproc_detailed(instance, g.strategy)?;
    let energy = checked(&out.schedule, instance)?;
    let lb = lower_bound(instance)?;
    let (mut edf, mut first_run, mut scaled) = (0, 0, 0);
    for (_, how) in &out.reorders {
        match how {
            Reorder::Edf => edf += 1,
            Reorder::FirstRun => first_run += 1,
            Reorder::Scaled(_) => scaled += 1,
        }
    }
    report.set(
        "stages",
        json!({
            "set_sizes": out.partition.sets().iter().map(|s| s.len()).collect::<Vec<_>>(),
            "windows": out.windows.len(),
            "congestion": out.solution.congestion,
            "window_energy": out.window_energy,
            "energy": energy,
            "lower_bound": lb,
            "reorders": {"edf": edf, "first_run": first_run, "scaled": scaled},
        }),
    );
    let wr = instance.work_ratio();
    report.set(
        "bounds",
        json!({
            "approximation": approximation_bound(instance.alpha(), g.epsilon, wr)?,
            "transform": transform_bound(instance.alpha(), wr),
        }),
    );
    report.set(
        "ratios",
        json!({
            "energy/window_energy": energy / out.window_energy,
            "energy/lower_bound": energy / lb,
        }),
    );
    let doc = json!({
        "report": report.finish(Map::new()),
        "schedule": schedule_value(&out.schedule, Some(energy)),
    });
    Ok(to_text(&doc))
}

fn solve_single(instance: &Instance, g: &Global, command: &str) -> Result<String> {
    let mut report = report_for(command, instance, g);
    let (model, relaxed) = relax(instance, g)?;
    let rounded = round_detailed(&relaxed.solution, instance)?;
    let energy = checked(&rounded.schedule, instance)?;
    let (_, yds) = yds_preemptive(instance)?;
    let s = &rounded.report;
    report.set("grid", grid_value(model.grid(), instance, g.epsilon)?);
    report.set("lp", lp_value(&model, &relaxed));
    report.set(
        "stages",
        json!({
            "lp_value": relaxed.lp_value,
            "e_x": s.e_x,
            "e_y": s.e_y,
            "e_z": s.e_z,
            "w_fractional": s.w_fractional,
            "w_match": s.w_match,
            "e_placed": s.e_placed,
            "e_final": energy,
            "yds": yds,
            "independent_set": rounded.independent_set.ids(),
        }),
    );
    let alpha = instance.alpha();
    report.set(
        "bounds",
        json!({
            "rounding": s.bound,
            "split": 2f64.powf(alpha - 1.0),
            "compress": 2f64.powf(alpha - 1.0),
            "placement": 3f64.powf(alpha - 1.0),
            "discretization": (1.0 + g.epsilon).powf(alpha - 1.0),
        }),
    );
    report.set(
        "ratios",
        json!({
            "e_final/lp_value": energy / relaxed.lp_value,
            "e_y/e_x": s.e_y / s.e_x,
            "e_z/e_y": s.e_z / s.e_y,
            "e_placed/w_match": s.e_placed / s.w_match,
            "e_final/e_placed": energy / s.e_placed,
            "e_final/yds": energy / yds,
        }),
    );
    let mut timing = Map::new();
    timing.insert("lp_ms".into(), json!(relaxed.runtime_ms));
    let doc = json!({
        "report": report.finish(timing),
        "schedule": schedule_value(&rounded.schedule, Some(energy)),
    });
    Ok(to_text(&doc))
}

fn lp(instance: &Instance, g: &Global) -> Result<String> {
    if instance.processors() != 1 {
        return Err(Error::Domain(
            "the LP relaxation is single-processor".into(),
        ));
    }
    let mut report = report_for("lp", instance, g);
    let (model, out) = relax(instance, g)?;
    report.set("grid", grid_value(model.grid(), instance, g.epsilon)?);
    report.set("lp", lp_value(&model, &out));
    report.set("status", json!("optimal"));
    let solution: Vec<Value> = out
        .solution
        .entries()
        .iter()
        .map(|e| {
            json!({
                "job": e.job,
                "start": rational_to_json(&e.interval.start),
                "end": rational_to_json(&e.interval.end),
                "value": e.value,
            })
        })
        .collect();
    let mut timing = Map::new();
    timing.insert("lp_ms".into(), json!(out.runtime_ms));
    Ok(to_text(
        &json!({"report": report.finish(timing), "solution": solution}),
    ))
}

fn yds(instance: &Instance, g: &Global) -> Result<String> {
    let mut report = report_for("oracle yds", instance, g);
    let (profile, energy) = yds_preemptive(instance)?;
    report.set("energy", json!(energy));
    let pieces: Vec<Value> = profile
        .pieces()
        .iter()
        .map(|p| {
            json!({
                "job": p.job,
                "start": rational_to_json(&p.interval.start),
                "end": rational_to_json(&p.interval.end),
                "speed": rational_to_json(&p.speed),
            })
        })
        .collect();
    Ok(to_text(
        &json!({"report": report.finish(Map::new()), "pieces": pieces}),
    ))
}

/// Grid over every endpoint of a heterogeneous instance, as dense as the
/// point cap allows, up to the full landmark density.
fn het_grid(het: &HeterogeneousInstance, g: &Global) -> Result<LandmarkGrid> {
    let mut ends: Vec<_> = het
        .jobs()
        .iter()
        .flat_map(|j| j.entries.values())
        .flat_map(|e| [e.release.clone(), e.deadline.clone()])
        .collect();
    ends.sort();
    ends.dedup();
    let full = landmarks_per_gap(het.jobs().len(), g.epsilon)?;
    let gaps = ends.len().saturating_sub(1).max(1);
    let room = g.max_grid_points.saturating_sub(ends.len()) / gaps;
    Ok(LandmarkGrid::over_endpoints(ends, full.min(room)))
}

fn brute(path: &Path, g: &Global) -> Result<String> {
    match load(path, g)? {
        AnyInstance::Homogeneous(instance) => {
            let mut report = report_for("oracle brute", &instance, g);
            let grid = build_grid_capped(&instance, g.epsilon, g.max_grid_points)?;
            let (schedule, energy) = brute_force_nonpreemptive(&instance, &grid, g.cap)?;
            checked(&schedule, &instance)?;
            report.set("grid", grid_value(&grid, &instance, g.epsilon)?);
            report.set("energy", json!(energy));
            let doc = json!({"report": report.finish(Map::new()), "schedule": schedule_value(&schedule, Some(energy))});
            Ok(to_text(&doc))
        }
        AnyInstance::Heterogeneous(het) => {
            let mut report = Report::new("oracle brute", g, Some(het.alpha()));
            report.instance(
                &serialize_het_instance(&het),
                het.jobs().len(),
                het.processors().len(),
            );
            let (schedule, energy, method) = match common_window_optimum(&het, g.cap) {
                Ok((s, e)) => (s, e, "common-window"),
                Err(Error::Domain(_)) => {
                    let grid = het_grid(&het, g)?;
                    let (s, e) = brute_force_heterogeneous(&het, &grid, g.cap)?;
                    (s, e, "grid")
                }
                Err(e) => return Err(e),
            };
            let v = validate_het_schedule(&schedule, &het);
            if !v.is_empty() {
                return Err(Error::InvalidSchedule(v));
            }
            report.set("method", json!(method));
            report.set("energy", json!(energy));
            let doc = json!({"report": report.finish(Map::new()), "schedule": schedule_value(&schedule, Some(energy))});
            Ok(to_text(&doc))
        }
    }
}

fn discretize(instance: &Instance, g: &Global, dump: bool) -> Result<String> {
    let grid = build_grid(instance, g.epsilon)?;
    let mut doc = json!({
        "epsilon": g.epsilon,
        "per_gap": grid.per_gap(),
        "points": grid.len(),
        "intervals": grid.len() * (grid.len().saturating_sub(1)) / 2,
    });
    if dump {
        doc["grid"] = grid.to_json();
    }
    Ok(to_text(&doc))
}

fn gap_experiment(ns: &[usize], per_gap: usize, g: &Global) -> Result<String> {
    let alpha = g.alpha.unwrap_or(2.0);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "alpha",
        "grid_points",
        "lp_no3",
        "lp_with3",
        "brute",
        "brute_over_lp_no3",
        "brute_over_lp_with3",
        "status",
    ])
    .map_err(csv_error)?;
    for &n in ns {
        let instance = generate_gap_family(n, alpha)?;
        let grid = build_grid_with_density(&instance, per_gap);
        let row = (|| -> Result<[f64; 3]> {
            let lp = |c3: bool| -> Result<f64> {
                let model = build_lp1(&instance, &grid, c3)?;
                Ok(solve_lp1_detailed(&model, &instance)?.lp_value)
            };
            let (_, brute) = brute_force_nonpreemptive(&instance, &grid, g.cap)?;
            Ok([lp(false)?, lp(true)?, brute])
        })();
        let head = [n.to_string(), alpha.to_string(), grid.len().to_string()];
        let record: Vec<String> = match row {
            Ok([no3, with3, brute]) => head
                .into_iter()
                .chain([no3, with3, brute, brute / no3, brute / with3].map(|v| v.to_string()))
                .chain(["ok".to_string()])
                .collect(),
            Err(e) => {
                let status = match e {
                    Error::SizeLimit { .. } => format!("skipped: {e}"),
                    other => format!("error: {other}"),
                };
                head.into_iter()
                    .chain(std::iter::repeat_n(String::new(), 5))
                    .chain([status])
                    .collect()
            }
        };
        w.write_record(&record).map_err(csv_error)?;
    }
    finish_csv(w)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Domain(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Domain(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn check_gap(tdm_path: &Path, schedule_path: &Path, g: &Global) -> Result<String> {
    let tdm = parse_tdm(&read(tdm_path)?)?;
    let alpha = g.alpha.unwrap_or(2.0);
    let artifacts = reduce_f(&tdm, alpha)?;
    let schedule = parse_schedule(&read(schedule_path)?)?;
    let opt_matching = maximum_matching(&tdm).len();
    let (_, opt_energy) = common_window_optimum(&artifacts.instance, g.cap)?;
    let gap = verify_gap_inequality(&schedule, &artifacts, opt_matching, opt_energy)?;
    let mut report = Report::new("check-gap", g, Some(alpha));
    report.instance(
        &serialize_het_instance(&artifacts.instance),
        artifacts.instance.jobs().len(),
        artifacts.instance.processors().len(),
    );
    report.set(
        "gap",
        json!({
            "q": tdm.q(),
            "energy": gap.energy,
            "matching": gap.matching,
            "opt_matching": gap.opt_matching,
            "opt_energy": gap.opt_energy,
            "beta": gap.beta,
            "deficit": gap.deficit,
            "allowance": gap.allowance,
            "gap_holds": gap.gap_holds,
            "opt_bound_holds": gap.opt_bound_holds,
            "holds": gap.holds(),
        }),
    );
    Ok(to_text(&report.finish(Map::new())))
}

fn bench_one(instance: &Instance, strategy: Strategy, g: &Global) -> Result<f64> {
    let schedule = if instance.processors() == 1 && strategy == Strategy::Lp {
        let (_, relaxed) = relax(instance, g)?;
        round_detailed(&relaxed.solution, instance)?.schedule
    } else {
        schedule_multiproc_detailed(instance, strategy)?.schedule
    };
    checked(&schedule, instance)
}

fn bench(corpus: &Path, strategies: &[Strategy], g: &Global) -> Result<String> {
    let mut files: Vec<_> = std::fs::read_dir(corpus)
        .map_err(|e| Error::Parse {
            path: corpus.display().to_string(),
            message: format!("cannot read corpus: {e}"),
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "file",
        "strategy",
        "n",
        "m",
        "alpha",
        "energy",
        "lower_bound",
        "ratio",
        "runtime_ms",
        "error",
    ])
    .map_err(csv_error)?;
    for path in &files {
        let name = path
            .file_name()
            .expect("file")
            .to_string_lossy()
            .to_string();
        let instance = load_homogeneous(path, g);
        for &strategy in strategies {
            let started = Instant::now();
            let outcome = instance
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|i| Ok((i, bench_one(i, strategy, g)?, lower_bound(i)?)));
            let ms = started.elapsed().as_secs_f64() * 1e3;
            let record: Vec<String> = match outcome {
                Ok((i, energy, lb)) => vec![
                    name.clone(),
                    strategy.to_string(),
                    i.len().to_string(),
                    i.processors().to_string(),
                    i.alpha().to_string(),
                    energy.to_string(),
                    lb.to_string(),
                    (energy / lb).to_string(),
                    format!("{ms:.3}"),
                    String::new(),
                ],
                Err(e) => {
                    let mut r = vec![name.clone(), strategy.to_string()];
                    r.extend(std::iter::repeat_n(String::new(), 6));
                    r.push(format!("{ms:.3}"));
                    r.push(e.to_string());
                    r
                }
            };
            w.write_record(&record).map_err(csv_error)?;
        }
    }
    finish_csv(w)
}
