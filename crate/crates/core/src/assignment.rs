//! Assignment solvers over cost grids with forbidden cells.
//!
//! [`greedy_assign`] is the row-ordered greedy rule the tracker uses;
//! [`hungarian`] is an exact minimum-cost solver used by the metrics.

/// Dense row-major cost grid. `None` marks a forbidden pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    values: Vec<Option<f64>>,
}

impl CostMatrix {
    /// All cells forbidden.
    pub fn forbidden(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![None; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self { rows, cols, values }
    }

    /// Builds a matrix with every cell allowed. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged cost matrix");
        Self::from_fn(rows.len(), cols, |r, c| Some(rows[r][c]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Option<f64>) {
        self.values[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn transposed(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }
}

/// Partial injective mapping from rows to columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

impl Assignment {
    fn from_pairs(costs: &CostMatrix, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let total_cost = pairs
            .iter()
            .map(|&(r, c)| costs.get(r, c).expect("assigned pair must be feasible"))
            .sum();
        Self { pairs, total_cost }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn col_for_row(&self, row: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&row, |&(r, _)| r)
            .ok()
            .map(|i| self.pairs[i].1)
    }
}

/// Greedy assignment: rows are visited in `row_order`, and each takes its
/// cheapest still-free feasible column (lowest index on ties). Rows with no
/// feasible free column are skipped. Stops early once every column is taken.
pub fn greedy_assign(costs: &CostMatrix, row_order: &[usize]) -> Assignment {
    let mut taken = vec![false; costs.cols()];
    let mut free = costs.cols();
    let mut pairs = Vec::new();
    for &r in row_order {
        if free == 0 {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (c, cell) in costs.row(r).iter().enumerate() {
            if taken[c] {
                continue;
            }
            if let Some(v) = *cell {
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((c, v));
                }
            }
        }
        if let Some((c, _)) = best {
            taken[c] = true;
            free -= 1;
            pairs.push((r, c));
        }
    }
    Assignment::from_pairs(costs, pairs)
}

/// Minimum-cost assignment (Kuhn-Munkres, shortest augmenting path form).
///
/// Rectangular inputs are solved directly on the smaller side. Forbidden cells
/// are replaced by a penalty large enough that the solver first maximizes the
/// number of feasible pairs and then minimizes their cost; any pair that still
/// lands on a forbidden cell is dropped from the result.
pub fn hungarian(costs: &CostMatrix) -> Assignment {
    if costs.is_empty() {
        return Assignment::default();
    }
    if costs.rows() > costs.cols() {
        let t = hungarian(&costs.transposed());
        let pairs = t.pairs.into_iter().map(|(c, r)| (r, c)).collect();
        return Assignment::from_pairs(costs, pairs);
    }

    let (lo, hi) = costs
        .values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return Assignment::default();
    }
    let n = costs.rows();
    let m = costs.cols();
    // Any assignment with one extra forbidden pair must cost more than any
    // with one fewer: penalty > hi + (n - 1) * (hi - lo).
    let penalty = hi.abs() + (n as f64 + 1.0) * (hi - lo) + 1.0;
    let cell = |r: usize, c: usize| costs.get(r, c).unwrap_or(penalty);

    // 1-based potentials; column 0 is the virtual source.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cell(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
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

    let pairs = (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1))
        .filter(|&(r, c)| costs.get(r, c).is_some())
        .collect();
    Assignment::from_pairs(costs, pairs)
}
