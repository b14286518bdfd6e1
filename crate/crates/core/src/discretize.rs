//! Landmark grids and the execution intervals they allow.
//!
//! Every release date and deadline is a grid point. Each positive gap between
//! consecutive endpoint values receives the same number of equally spaced
//! inserted landmarks.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instances::{Instance, Job};
use crate::time::{int, rational_to_json, Interval, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkGrid {
    points: Vec<Rational>,
    endpoint: Vec<bool>,
    epsilon: Option<f64>,
    per_gap: usize,
}

impl LandmarkGrid {
    /// Grid on the given endpoint values with `per_gap` landmarks inserted in
    /// every positive gap.
    pub fn over_endpoints(endpoints: impl IntoIterator<Item = Rational>, per_gap: usize) -> Self {
        let mut ends: Vec<Rational> = endpoints.into_iter().collect();
        ends.sort();
        ends.dedup();
        let mut points = Vec::with_capacity(ends.len() + ends.len().saturating_sub(1) * per_gap);
        let mut endpoint = Vec::with_capacity(points.capacity());
        for (i, e) in ends.iter().enumerate() {
            if i > 0 {
                let a = &ends[i - 1];
                let step = (e - a) / int(per_gap as i64 + 1);
                for k in 1..=per_gap {
                    points.push(a + &step * int(k as i64));
                    endpoint.push(false);
                }
            }
            points.push(e.clone());
            endpoint.push(true);
        }
        LandmarkGrid {
            points,
            endpoint,
            epsilon: None,
            per_gap,
        }
    }

    /// Instance endpoints plus arbitrary extra points. Extra points that
    /// coincide with endpoints are merged. The result has no per-gap density.
    pub fn with_points(instance: &Instance, extra: impl IntoIterator<Item = Rational>) -> Self {
        let ends = endpoint_values(instance);
        let mut all: Vec<(Rational, bool)> = ends.iter().map(|e| (e.clone(), true)).collect();
        all.extend(extra.into_iter().map(|p| (p, false)));
        // Endpoint flag wins on ties: sort true before false.
        all.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        all.dedup_by(|a, b| a.0 == b.0);
        let (points, endpoint) = all.into_iter().unzip();
        LandmarkGrid {
            points,
            endpoint,
            epsilon: None,
            per_gap: 0,
        }
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_endpoint(&self, index: usize) -> bool {
        self.endpoint[index]
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Landmarks inserted per positive gap (0 for hand-built grids).
    pub fn per_gap(&self) -> usize {
        self.per_gap
    }

    pub fn index_of(&self, t: &Rational) -> Option<usize> {
        self.points.binary_search(t).ok()
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.index_of(t).is_some()
    }

    /// Every interval with both ends on the grid, by start then end.
    pub fn intervals(&self) -> Vec<Interval> {
        let g = self.points.len();
        let mut out = Vec::with_capacity(g * g.saturating_sub(1) / 2);
        for a in 0..g {
            for b in a + 1..g {
                out.push(Interval::new(
                    self.points[a].clone(),
                    self.points[b].clone(),
                ));
            }
        }
        out
    }

    /// JSON array of `{"time", "kind"}` objects, kind being `endpoint` or
    /// `landmark`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.points
                .iter()
                .zip(&self.endpoint)
                .map(|(t, &e)| {
                    json!({
                        "time": rational_to_json(t),
                        "kind": if e { "endpoint" } else { "landmark" },
                    })
                })
                .collect(),
        )
    }
}

fn endpoint_values(instance: &Instance) -> Vec<Rational> {
    let mut ends: Vec<Rational> = instance
        .jobs()
        .iter()
        .flat_map(|j| [j.release.clone(), j.deadline.clone()])
        .collect();
    ends.sort();
    ends.dedup();
    ends
}

/// Number of landmarks per gap that guarantees a `(1+ε)^(α-1)` loss:
/// `n²(1+1/ε) − 1`, rounded up.
pub fn landmarks_per_gap(n: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let raw = (n * n) as f64 * (1.0 + 1.0 / epsilon) - 1.0;
    if raw <= 0.0 {
        return Ok(0);
    }
    // Guard against 7.000000001 from floating-point noise.
    Ok((raw - 1e-9).ceil() as usize)
}

pub fn build_grid(instance: &Instance, epsilon: f64) -> Result<LandmarkGrid> {
    let per_gap = landmarks_per_gap(instance.len(), epsilon)?;
    let mut grid = LandmarkGrid::over_endpoints(endpoint_values(instance), per_gap);
    grid.epsilon = Some(epsilon);
    Ok(grid)
}

pub fn build_grid_with_density(instance: &Instance, per_gap: usize) -> LandmarkGrid {
    LandmarkGrid::over_endpoints(endpoint_values(instance), per_gap)
}

/// Like [`build_grid`], but lowers the per-gap density so the grid has at
/// most `max_points` points (endpoints are always kept, so a grid may still
/// exceed the cap when there are more endpoints than that).
pub fn build_grid_capped(
    instance: &Instance,
    epsilon: f64,
    max_points: usize,
) -> Result<LandmarkGrid> {
    let full = landmarks_per_gap(instance.len(), epsilon)?;
    let ends = endpoint_values(instance);
    let gaps = ends.len().saturating_sub(1).max(1);
    let room = max_points.saturating_sub(ends.len()) / gaps;
    let mut grid = LandmarkGrid::over_endpoints(ends, full.min(room));
    grid.epsilon = Some(epsilon);
    Ok(grid)
}

/// Grid intervals inside the job's life interval, by start then end.
pub fn candidate_intervals(grid: &LandmarkGrid, job: &Job) -> Vec<Interval> {
    let lo = grid.points.partition_point(|p| p < &job.release);
    let hi = grid.points.partition_point(|p| p <= &job.deadline);
    let mut out = Vec::new();
    for a in lo..hi {
        for b in a + 1..hi {
            out.push(Interval::new(
                grid.points[a].clone(),
                grid.points[b].clone(),
            ));
        }
    }
    out
}
