//! JSON documents for instances and schedules.
//!
//! Times and works are exact: numbers are read as decimals, and values that
//! have no exact decimal form are written as `"p/q"` strings.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{
    processor_name, Assignment, HetEntry, HetJob, HetProcessor, HeterogeneousInstance, Instance,
    Job, JobId, Schedule,
};
use crate::error::{Error, Result};
use crate::time::{rational_from_json, rational_to_json, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum AnyInstance {
    Homogeneous(Instance),
    Heterogeneous(HeterogeneousInstance),
}

impl AnyInstance {
    pub fn alpha(&self) -> f64 {
        match self {
            AnyInstance::Homogeneous(i) => i.alpha(),
            AnyInstance::Heterogeneous(h) => h.alpha(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyInstance::Homogeneous(i) => serialize_instance(i),
            AnyInstance::Heterogeneous(h) => serialize_het_instance(h),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<AnyInstance> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse("$", "expected an object"))?;
    let alpha = obj
        .get("alpha")
        .ok_or_else(|| Error::parse("$.alpha", "missing field"))?
        .as_f64()
        .ok_or_else(|| Error::parse("$.alpha", "expected a number"))?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::parse(
            "$.alpha",
            format!("alpha must be > 1, got {alpha}"),
        ));
    }
    let jobs = obj
        .get("jobs")
        .ok_or_else(|| Error::parse("$.jobs", "missing field"))?
        .as_array()
        .ok_or_else(|| Error::parse("$.jobs", "expected an array"))?;
    let heterogeneous = jobs.iter().any(|j| j.get("work_per_processor").is_some());
    let processors = obj
        .get("processors")
        .ok_or_else(|| Error::parse("$.processors", "missing field"))?;
    if heterogeneous {
        parse_het(alpha, processors, jobs).map(AnyInstance::Heterogeneous)
    } else {
        parse_homogeneous(alpha, processors, jobs).map(AnyInstance::Homogeneous)
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::parse(format!("{path}.{name}"), "missing field"))
}

fn job_id(obj: &Map<String, Value>, path: &str) -> Result<JobId> {
    field(obj, "id", path)?
        .as_u64()
        .ok_or_else(|| Error::parse(format!("{path}.id"), "expected a non-negative integer"))
}

fn positive_work(value: &Value, path: &str) -> Result<Rational> {
    let w = rational_from_json(value, path)?;
    if w <= crate::time::int(0) {
        return Err(Error::parse(
            path,
            format!("work must be positive, got {w}"),
        ));
    }
    Ok(w)
}

fn life(release: &Value, deadline: &Value, path: &str) -> Result<(Rational, Rational)> {
    let r = rational_from_json(release, &format!("{path}.release"))?;
    let d = rational_from_json(deadline, &format!("{path}.deadline"))?;
    if r >= d {
        return Err(Error::parse(
            format!("{path}.deadline"),
            format!("deadline {d} must exceed release {r}"),
        ));
    }
    Ok((r, d))
}

fn parse_homogeneous(alpha: f64, processors: &Value, jobs: &[Value]) -> Result<Instance> {
    let m = processors
        .as_u64()
        .filter(|&m| m >= 1)
        .ok_or_else(|| Error::parse("$.processors", "expected a positive integer"))?;
    let mut out = Vec::with_capacity(jobs.len());
    for (i, j) in jobs.iter().enumerate() {
        let path = format!("$.jobs[{i}]");
        let obj = j
            .as_object()
            .ok_or_else(|| Error::parse(&path, "expected an object"))?;
        let id = job_id(obj, &path)?;
        let (r, d) = life(
            field(obj, "release", &path)?,
            field(obj, "deadline", &path)?,
            &path,
        )?;
        let w = positive_work(field(obj, "work", &path)?, &format!("{path}.work"))?;
        out.push(Job::new(id, r, d, w).map_err(|e| Error::parse(&path, e.to_string()))?);
    }
    Instance::new(alpha, m as usize, out).map_err(|e| Error::parse("$", e.to_string()))
}

fn parse_het(alpha: f64, processors: &Value, jobs: &[Value]) -> Result<HeterogeneousInstance> {
    let procs: Vec<HetProcessor> = match processors {
        Value::Number(n) => {
            let m = n
                .as_u64()
                .filter(|&m| m >= 1)
                .ok_or_else(|| Error::parse("$.processors", "expected a positive integer"))?;
            (0..m as usize)
                .map(|i| HetProcessor {
                    id: processor_name(i),
                    alpha,
                })
                .collect()
        }
        Value::Array(list) => list
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("$.processors[{i}]");
                match p {
                    Value::String(id) => Ok(HetProcessor {
                        id: id.clone(),
                        alpha,
                    }),
                    Value::Object(o) => {
                        let id = field(o, "id", &path)?
                            .as_str()
                            .ok_or_else(|| Error::parse(format!("{path}.id"), "expected a string"))?
                            .to_string();
                        let a = match o.get("alpha") {
                            None => alpha,
                            Some(v) => v.as_f64().ok_or_else(|| {
                                Error::parse(format!("{path}.alpha"), "expected a number")
                            })?,
                        };
                        Ok(HetProcessor { id, alpha: a })
                    }
                    _ => Err(Error::parse(path, "expected a processor id or object")),
                }
            })
            .collect::<Result<_>>()?,
        _ => {
            return Err(Error::parse(
                "$.processors",
                "expected an integer or an array",
            ))
        }
    };

    let mut out = Vec::with_capacity(jobs.len());
    for (i, j) in jobs.iter().enumerate() {
        let path = format!("$.jobs[{i}]");
        let obj = j
            .as_object()
            .ok_or_else(|| Error::parse(&path, "expected an object"))?;
        let id = job_id(obj, &path)?;
        let works = field(obj, "work_per_processor", &path)?
            .as_object()
            .ok_or_else(|| {
                Error::parse(format!("{path}.work_per_processor"), "expected an object")
            })?;
        let base = match (obj.get("release"), obj.get("deadline")) {
            (Some(r), Some(d)) => Some(life(r, d, &path)?),
            (None, None) => None,
            _ => {
                return Err(Error::parse(
                    &path,
                    "release and deadline must be given together",
                ))
            }
        };
        let lives = match obj.get("life_per_processor") {
            None => Map::new(),
            Some(Value::Object(o)) => o.clone(),
            Some(_) => {
                return Err(Error::parse(
                    format!("{path}.life_per_processor"),
                    "expected an object",
                ))
            }
        };
        let mut entries = BTreeMap::new();
        for (p, w) in works {
            let wpath = format!("{path}.work_per_processor.{p}");
            let work = positive_work(w, &wpath)?;
            let (release, deadline) = match lives.get(p) {
                Some(Value::Array(pair)) if pair.len() == 2 => life(
                    &pair[0],
                    &pair[1],
                    &format!("{path}.life_per_processor.{p}"),
                )?,
                Some(_) => {
                    return Err(Error::parse(
                        format!("{path}.life_per_processor.{p}"),
                        "expected [release, deadline]",
                    ))
                }
                None => base.clone().ok_or_else(|| {
                    Error::parse(
                        format!("{path}.release"),
                        format!("no life interval for {p}"),
                    )
                })?,
            };
            entries.insert(
                p.clone(),
                HetEntry {
                    release,
                    deadline,
                    work,
                },
            );
        }
        for p in lives.keys() {
            if !works.contains_key(p) {
                return Err(Error::parse(
                    format!("{path}.life_per_processor.{p}"),
                    "life interval given for a processor without work",
                ));
            }
        }
        out.push(HetJob { id, entries });
    }
    HeterogeneousInstance::new(alpha, procs, out).map_err(|e| Error::parse("$", e.to_string()))
}

fn instance_value(instance: &Instance) -> Value {
    let jobs: Vec<Value> = instance
        .jobs()
        .iter()
        .map(|j| {
            json!({
                "id": j.id,
                "release": rational_to_json(&j.release),
                "deadline": rational_to_json(&j.deadline),
                "work": rational_to_json(&j.work),
            })
        })
        .collect();
    json!({
        "alpha": instance.alpha(),
        "processors": instance.processors(),
        "jobs": jobs,
    })
}

/// Canonical JSON text of a homogeneous instance.
pub fn serialize_instance(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance_value(instance)).expect("serializable")
}

/// Canonical JSON text of a heterogeneous instance. Jobs whose entries share
/// one life interval use `release`/`deadline`; others list
/// `life_per_processor` for every entry.
pub fn serialize_het_instance(instance: &HeterogeneousInstance) -> String {
    let processors: Vec<Value> = instance
        .processors()
        .iter()
        .map(|p| json!({"id": p.id, "alpha": p.alpha}))
        .collect();
    let jobs: Vec<Value> = instance
        .jobs()
        .iter()
        .map(|j| {
            let mut obj = Map::new();
            obj.insert("id".into(), json!(j.id));
            let works: Map<String, Value> = j
                .entries
                .iter()
                .map(|(p, e)| (p.clone(), rational_to_json(&e.work)))
                .collect();
            obj.insert("work_per_processor".into(), Value::Object(works));
            let first = j.entries.values().next().expect("nonempty").life();
            if j.entries.values().all(|e| e.life() == first) {
                obj.insert("release".into(), rational_to_json(&first.start));
                obj.insert("deadline".into(), rational_to_json(&first.end));
            } else {
                let lives: Map<String, Value> = j
                    .entries
                    .iter()
                    .map(|(p, e)| {
                        (
                            p.clone(),
                            json!([rational_to_json(&e.release), rational_to_json(&e.deadline)]),
                        )
                    })
                    .collect();
                obj.insert("life_per_processor".into(), Value::Object(lives));
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "alpha": instance.alpha(),
        "processors": processors,
        "jobs": jobs,
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn schedule_value(schedule: &Schedule, energy: Option<f64>) -> Value {
    let assignments: Vec<Value> = schedule
        .assignments
        .iter()
        .map(|a| {
            let mut obj = Map::new();
            obj.insert("job".into(), json!(a.job));
            if let Some(p) = &a.processor {
                obj.insert("processor".into(), json!(p));
            }
            obj.insert("start".into(), rational_to_json(&a.start));
            obj.insert("end".into(), rational_to_json(&a.end));
            Value::Object(obj)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("assignments".into(), Value::Array(assignments));
    if let Some(e) = energy {
        doc.insert("energy".into(), json!(e));
    }
    Value::Object(doc)
}

pub fn schedule_to_json(schedule: &Schedule, energy: Option<f64>) -> String {
    serde_json::to_string_pretty(&schedule_value(schedule, energy)).expect("serializable")
}

/// Reads a schedule document; the optional `energy` field is ignored.
pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    let list = root
        .get("assignments")
        .ok_or_else(|| Error::parse("$.assignments", "missing field"))?
        .as_array()
        .ok_or_else(|| Error::parse("$.assignments", "expected an array"))?;
    let mut out = Vec::with_capacity(list.len());
    for (i, a) in list.iter().enumerate() {
        let path = format!("$.assignments[{i}]");
        let obj = a
            .as_object()
            .ok_or_else(|| Error::parse(&path, "expected an object"))?;
        let job = field(obj, "job", &path)?
            .as_u64()
            .ok_or_else(|| Error::parse(format!("{path}.job"), "expected an integer"))?;
        let processor = match obj.get("processor") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                return Err(Error::parse(
                    format!("{path}.processor"),
                    "expected a string",
                ))
            }
        };
        let start = rational_from_json(field(obj, "start", &path)?, &format!("{path}.start"))?;
        let end = rational_from_json(field(obj, "end", &path)?, &format!("{path}.end"))?;
        out.push(Assignment {
            job,
            processor,
            start,
            end,
        });
    }
    Ok(Schedule { assignments: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate_random, RandomSpec};
    use crate::time::{frac, int, Interval};
    use proptest::prelude::*;

    #[test]
    fn minimal_document() {
        let text = r#"{"alpha": 2.0, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 3, "work": 2}]}"#;
        let AnyInstance::Homogeneous(inst) = parse_instance(text).unwrap() else {
            panic!("expected homogeneous")
        };
        assert_eq!(inst.len(), 1);
        assert_eq!(inst.jobs()[0].deadline, int(3));
        assert_eq!(inst.alpha(), 2.0);
    }

    #[test]
    fn alpha_at_most_one_is_rejected() {
        let text = r#"{"alpha": 1.0, "processors": 1, "jobs": []}"#;
        assert!(
            matches!(parse_instance(text), Err(Error::Parse { path, .. }) if path == "$.alpha")
        );
    }

    #[test]
    fn empty_life_reports_field_path() {
        let text = r#"{"alpha": 2, "processors": 1, "jobs": [
            {"id": 1, "release": 0, "deadline": 1, "work": 1},
            {"id": 2, "release": 3, "deadline": 3, "work": 1}]}"#;
        match parse_instance(text) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "$.jobs[1].deadline"),
            other => panic!("unexpected {other:?}"),
        }
        let text = r#"{"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 1, "work": -1}]}"#;
        assert!(
            matches!(parse_instance(text), Err(Error::Parse { path, .. }) if path == "$.jobs[0].work")
        );
        let text =
            r#"{"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 1}]}"#;
        assert!(
            matches!(parse_instance(text), Err(Error::Parse { path, .. }) if path == "$.jobs[0].work")
        );
    }

    #[test]
    fn heterogeneous_document_with_processor_dependent_works() {
        let text = r#"{"alpha": 2, "processors": 2, "jobs": [
            {"id": 1, "release": 0, "deadline": 3, "work_per_processor": {"p1": 1, "p2": 4}},
            {"id": 2, "release": 0, "deadline": 3, "work_per_processor": {"p1": 3, "p2": 3},
             "life_per_processor": {"p2": [1, 2.5]}}]}"#;
        let AnyInstance::Heterogeneous(h) = parse_instance(text).unwrap() else {
            panic!("expected heterogeneous")
        };
        assert_eq!(h.processors().len(), 2);
        assert_eq!(h.entry(1, "p2").unwrap().work, int(4));
        assert_eq!(
            h.entry(2, "p2").unwrap().life(),
            Interval::new(int(1), frac(5, 2))
        );
        assert_eq!(
            h.entry(2, "p1").unwrap().life(),
            Interval::new(int(0), int(3))
        );
        let again = parse_instance(&serialize_het_instance(&h)).unwrap();
        assert_eq!(again, AnyInstance::Heterogeneous(h));
    }

    #[test]
    fn exact_fractions_survive() {
        let text = r#"{"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": "1/3", "deadline": 0.7, "work": 1}]}"#;
        let AnyInstance::Homogeneous(inst) = parse_instance(text).unwrap() else {
            panic!()
        };
        assert_eq!(inst.jobs()[0].release, frac(1, 3));
        assert_eq!(inst.jobs()[0].deadline, frac(7, 10));
        let back = serialize_instance(&inst);
        assert!(back.contains("\"1/3\""));
        assert!(back.contains("0.7"));
    }

    #[test]
    fn schedule_round_trip() {
        let s = Schedule::new(vec![
            Assignment::new(1, Some("p1".into()), Interval::new(int(0), frac(3, 2))),
            Assignment::new(2, None, Interval::new(frac(3, 2), frac(5, 3))),
        ]);
        let text = schedule_to_json(&s, Some(1.25));
        assert!(text.contains("\"energy\": 1.25"));
        assert_eq!(parse_schedule(&text).unwrap(), s);
    }

    proptest! {
        #[test]
        fn canonical_round_trip(n in 1usize..8, m in 1usize..4, seed in 0u64..1000, alpha in 1.1f64..4.0) {
            let inst = generate_random(&RandomSpec { n, m, alpha, seed, work_range: (1, 5), horizon: 10 }).unwrap();
            let text = serialize_instance(&inst);
            let parsed = parse_instance(&text).unwrap();
            prop_assert_eq!(&parsed, &AnyInstance::Homogeneous(inst));
            prop_assert_eq!(parsed.to_json(), text);
        }
    }
}
