use std::time::Instant;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::Global;

pub fn digest(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// A run report: every value that does not depend on the clock, plus a
/// `timing` object that does.
pub struct Report {
    fields: Map<String, Value>,
    started: Instant,
}

impl Report {
    pub fn new(command: &str, global: &Global, alpha: Option<f64>) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        fields.insert(
            "parameters".into(),
            json!({
                "alpha": alpha,
                "epsilon": global.epsilon,
                "seed": global.seed,
                "strategy": global.strategy.to_string(),
                "constraint_3": !global.no_constraint_3,
                "max_grid_points": global.max_grid_points,
            }),
        );
        Report {
            fields,
            started: Instant::now(),
        }
    }

    pub fn instance(&mut self, canonical: &str, jobs: usize, processors: usize) {
        self.set(
            "instance",
            json!({"digest": digest(canonical), "jobs": jobs, "processors": processors}),
        );
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn finish(mut self, extra_timing: Map<String, Value>) -> Value {
        let mut timing = extra_timing;
        timing.insert(
            "wall_ms".into(),
            json!(self.started.elapsed().as_secs_f64() * 1e3),
        );
        self.fields.insert("timing".into(), Value::Object(timing));
        Value::Object(self.fields)
    }
}

pub fn to_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
