//! Minimum-cost bipartite matching that saturates the left side.
//!
//! Successive shortest augmenting paths with vertex potentials (the
//! Hungarian method), on a dense cost matrix where missing edges cost
//! infinity.

/// Chosen edge per left vertex, as an index into the input edge list.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    pub edge_of_left: Vec<usize>,
    pub cost: f64,
}

/// Returns `None` when no matching covers every left vertex. Parallel edges
/// are allowed; the cheapest one is used (lowest index on ties).
pub fn min_cost_left_saturating(
    n_left: usize,
    n_right: usize,
    edges: &[(usize, usize, f64)],
) -> Option<Matching> {
    if n_left == 0 {
        return Some(Matching {
            edge_of_left: Vec::new(),
            cost: 0.0,
        });
    }
    if n_left > n_right {
        return None;
    }
    let inf = f64::INFINITY;
    // 1-based internally; row 0 / column 0 are the usual sentinels.
    let mut cost = vec![vec![inf; n_right + 1]; n_left + 1];
    let mut which = vec![vec![usize::MAX; n_right + 1]; n_left + 1];
    for (k, &(l, r, c)) in edges.iter().enumerate() {
        assert!(l < n_left && r < n_right, "edge endpoint out of range");
        if c < cost[l + 1][r + 1] {
            cost[l + 1][r + 1] = c;
            which[l + 1][r + 1] = k;
        }
    }

    let mut u = vec![0.0; n_left + 1];
    let mut v = vec![0.0; n_right + 1];
    let mut owner = vec![0usize; n_right + 1];
    let mut way = vec![0usize; n_right + 1];
    for i in 1..=n_left {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n_right + 1];
        let mut used = vec![false; n_right + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n_right {
                if used[j] {
                    continue;
                }
                let cur = cost[i0][j] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return None;
            }
            for j in 0..=n_right {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut edge_of_left = vec![usize::MAX; n_left];
    let mut total = 0.0;
    for j in 1..=n_right {
        let i = owner[j];
        if i != 0 {
            edge_of_left[i - 1] = which[i][j];
            total += cost[i][j];
        }
    }
    Some(Matching {
        edge_of_left,
        cost: total,
    })
}
