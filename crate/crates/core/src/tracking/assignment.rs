//! Penalty-cost association between track predictions and detections.
//!
//! Costs are Euclidean distances, replaced by a large penalty `d_p` beyond
//! the gate `d_th`. The assignment minimizes total cost under one-sided
//! constraints: every track is assigned when `M ≤ N`, every detection when
//! `M > N`. Pairs that carry the penalty are removed afterwards, so no
//! association is forced across the gate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Cost matrix of one association round (tracks × detections).
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem {
    pub costs: DMatrix<f64>,
    /// Whether `costs[(i, j)]` is the penalty rather than a distance.
    pub penalized: DMatrix<bool>,
    pub gate: f64,
    pub penalty: f64,
}

impl AssignmentProblem {
    pub fn tracks(&self) -> usize {
        self.costs.nrows()
    }

    pub fn detections(&self) -> usize {
        self.costs.ncols()
    }
}

/// Builds `c_ij = ‖P̂_i − P_j‖` if within `gate` (inclusive), else `penalty`.
///
/// An infinite gate disables the penalty entirely (plain Hungarian
/// association). A finite gate requires `penalty ≥ 100·gate`.
pub fn build_cost_matrix(predictions: &[Vec2], detections: &[Vec2], gate: f64, penalty: f64) -> Result<AssignmentProblem> {
    if gate.is_nan() || gate <= 0.0 || !(penalty.is_finite() && penalty > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "association: gate {gate} must be > 0 and penalty {penalty} finite and > 0"
        )));
    }
    if gate.is_finite() && penalty < 100.0 * gate {
        return Err(Error::InvalidConfig(format!(
            "association: penalty {penalty} must be >= 100 x gate {gate}"
        )));
    }
    let (m, n) = (predictions.len(), detections.len());
    let mut costs = DMatrix::zeros(m, n);
    let mut penalized = DMatrix::from_element(m, n, false);
    for (i, p) in predictions.iter().enumerate() {
        for (j, d) in detections.iter().enumerate() {
            let dist = (p - d).norm();
            if dist <= gate {
                costs[(i, j)] = dist;
            } else {
                costs[(i, j)] = penalty;
                penalized[(i, j)] = true;
            }
        }
    }
    Ok(AssignmentProblem {
        costs,
        penalized,
        gate,
        penalty,
    })
}

/// Solution of an [`AssignmentProblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Optimal one-sided assignment before penalty pruning, sorted by track.
    pub raw: Vec<(usize, usize)>,
    /// Associations that survive pruning.
    pub pairs: Vec<(usize, usize)>,
    /// Total cost of `raw`.
    pub total_cost: f64,
}

impl Assignment {
    fn from_raw(problem: &AssignmentProblem, raw: Vec<(usize, usize)>) -> Self {
        let total_cost = raw.iter().map(|&(i, j)| problem.costs[(i, j)]).sum();
        let pairs = raw.iter().copied().filter(|&(i, j)| !problem.penalized[(i, j)]).collect();
        Self { raw, pairs, total_cost }
    }

    pub fn detection_for(&self, track: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == track).map(|p| p.1)
    }
}

/// Minimum-cost perfect matching on a square matrix (Kuhn–Munkres with
/// potentials, `O(n³)`). Returns the column assigned to each row.
pub fn hungarian(costs: &DMatrix<f64>) -> Vec<usize> {
    let n = costs.nrows();
    assert_eq!(n, costs.ncols(), "hungarian needs a square matrix");
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays; index 0 is the virtual column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    col_of
}

fn matching_cost(costs: &DMatrix<f64>, cols: &[usize]) -> f64 {
    cols.iter().enumerate().map(|(i, &j)| costs[(i, j)]).sum()
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// One-sided minimum-cost assignment of an `M × N` matrix via a square
/// Hungarian solve padded with `pad` entries.
///
/// Among optimal solutions the lexicographically smallest pair list wins:
/// rows are fixed in order, each to its lowest feasible column, preferring
/// any real column over leaving the row unassigned.
pub fn min_cost_assignment(costs: &DMatrix<f64>, pad: f64) -> Vec<(usize, usize)> {
    let (m, n) = costs.shape();
    if m == 0 || n == 0 {
        return Vec::new();
    }
    let size = m.max(n);
    let mut square = DMatrix::from_element(size, size, pad);
    square.view_mut((0, 0), (m, n)).copy_from(costs);
    let optimum = matching_cost(&square, &hungarian(&square));
    let big = 1e6 * (1.0 + square.iter().fold(0.0f64, |a, c| a.max(c.abs()))) * size as f64;

    let mut fixed = square.clone();
    let mut result = Vec::new();
    for i in 0..m {
        // Real columns first in ascending order, then dummy columns.
        let mut chosen = None;
        for j in 0..size {
            let mut trial = fixed.clone();
            for k in 0..size {
                if k != j {
                    trial[(i, k)] = big;
                }
                if k != i {
                    trial[(k, j)] = big;
                }
            }
            if ties(matching_cost(&trial, &hungarian(&trial)), optimum) {
                chosen = Some(j);
                fixed = trial;
                break;
            }
        }
        let j = chosen.expect("an optimal column always exists");
        if j < n {
            result.push((i, j));
        }
    }
    result
}

/// Solves with the Hungarian method, padding to square with `d_p`.
pub fn solve_assignment(problem: &AssignmentProblem) -> Assignment {
    let raw = min_cost_assignment(&problem.costs, problem.penalty);
    Assignment::from_raw(problem, raw)
}

/// Reference solver: enumerates every feasible one-sided assignment in
/// lexicographic order and keeps the first minimum.
pub fn solve_exhaustive(problem: &AssignmentProblem) -> Assignment {
    let (m, n) = (problem.tracks(), problem.detections());
    if m == 0 || n == 0 {
        return Assignment::from_raw(problem, Vec::new());
    }
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    let mut used = vec![false; n];
    let mut current = Vec::new();
    exhaustive_rec(problem, 0, &mut used, &mut current, 0.0, &mut best);
    Assignment::from_raw(problem, best.map(|b| b.1).unwrap_or_default())
}

fn exhaustive_rec(
    problem: &AssignmentProblem,
    row: usize,
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    cost: f64,
    best: &mut Option<(f64, Vec<(usize, usize)>)>,
) {
    let (m, n) = (problem.tracks(), problem.detections());
    if row == m {
        let feasible = if m <= n { current.len() == m } else { current.len() == n };
        if feasible && best.as_ref().is_none_or(|(b, _)| cost < *b && !ties(cost, *b)) {
            *best = Some((cost, current.clone()));
        }
        return;
    }
    for j in 0..n {
        if !used[j] {
            used[j] = true;
            current.push((row, j));
            exhaustive_rec(problem, row + 1, used, current, cost + problem.costs[(row, j)], best);
            current.pop();
            used[j] = false;
        }
    }
    // Leaving a row unassigned is only allowed when rows outnumber columns.
    if m > n {
        exhaustive_rec(problem, row + 1, used, current, cost, best);
    }
}
