//! Sparse symmetric LDLᵀ factorisation with a minimum-degree ordering.
//!
//! The elimination tree and the column counts depend only on the pattern, so
//! one [`Symbolic`] serves every shift `K − σM` of a pencil. No pivoting is
//! done; the number of negative pivots gives the inertia of the shifted
//! matrix by Sylvester's law.

use std::collections::BTreeSet;

const NONE: usize = usize::MAX;

/// Full (both triangles) compressed-column pattern of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct Pattern {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
}

impl Pattern {
    /// Pattern with the full diagonal plus every off-diagonal pair in `pairs`
    /// (in either order). Duplicates are merged.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut cols: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(i, j) in pairs {
            if i != j {
                cols[i].push(j);
                cols[j].push(i);
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for mut c in cols {
            c.sort_unstable();
            c.dedup();
            row_idx.extend(c);
            col_ptr.push(row_idx.len());
        }
        Pattern { n, col_ptr, row_idx }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Storage slot of entry `(i, j)`.
    pub fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        self.row_idx[lo..hi].binary_search(&i).ok().map(|k| lo + k)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |p| (self.row_idx[p], p))
    }

    /// `y = A x` for values laid out on this pattern.
    pub fn matvec(&self, values: &[f64], x: &[f64], y: &mut [f64]) {
        for j in 0..self.n {
            let mut acc = 0.0;
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc += values[p] * x[self.row_idx[p]];
            }
            y[j] = acc;
        }
    }

    pub fn quadratic(&self, values: &[f64], x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc += x[self.row_idx[p]] * values[p] * x[j];
            }
        }
        acc
    }

    /// Greedy minimum-degree ordering on the adjacency graph. Ties go to the
    /// smallest index, so the ordering is deterministic.
    pub fn min_degree_order(&self) -> Vec<usize> {
        let n = self.n;
        let mut adj: Vec<Vec<usize>> = (0..n)
            .map(|j| self.column(j).map(|(i, _)| i).filter(|&i| i != j).collect())
            .collect();
        let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (adj[i].len(), i)).collect();
        let mut order = Vec::with_capacity(n);
        while let Some((_, v)) = queue.pop_first() {
            order.push(v);
            let nbrs = std::mem::take(&mut adj[v]);
            for &u in &nbrs {
                let before = adj[u].len();
                adj[u].retain(|&w| w != v);
                for &w in &nbrs {
                    if w != u && !adj[u].contains(&w) {
                        adj[u].push(w);
                    }
                }
                if adj[u].len() != before {
                    queue.remove(&(before, u));
                    queue.insert((adj[u].len(), u));
                }
            }
        }
        order
    }
}

/// Ordering, elimination tree and column layout of `L`.
#[derive(Clone, Debug)]
pub struct Symbolic {
    perm: Vec<usize>,
    pinv: Vec<usize>,
    parent: Vec<usize>,
    lp: Vec<usize>,
}

impl Symbolic {
    pub fn analyse(pattern: &Pattern) -> Self {
        Self::with_order(pattern, pattern.min_degree_order())
    }

    pub fn with_order(pattern: &Pattern, perm: Vec<usize>) -> Self {
        let n = pattern.n;
        let mut pinv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            pinv[p] = k;
        }
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (i0, _) in pattern.column(perm[k]) {
                let mut i = pinv[i0];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == NONE {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        Symbolic { perm, pinv, parent, lp }
    }

    pub fn fill(&self) -> usize {
        self.lp[self.lp.len() - 1]
    }
}

/// Numeric factor `P A Pᵀ = L D Lᵀ`.
#[derive(Clone, Debug)]
pub struct Factor<'a> {
    sym: &'a Symbolic,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    zero_pivots: usize,
}

impl<'a> Factor<'a> {
    pub fn new(pattern: &Pattern, sym: &'a Symbolic, values: &[f64]) -> Self {
        let n = pattern.n;
        let nnz = sym.fill();
        let mut li = vec![0usize; nnz];
        let mut lx = vec![0.0; nnz];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut path = vec![0usize; n];
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut zero_pivots = 0;
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for (i0, p) in pattern.column(sym.perm[k]) {
                let mut i = sym.pinv[i0];
                if i <= k {
                    y[i] += values[p];
                    let mut len = 0;
                    while flag[i] != k {
                        path[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = sym.parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        stack[top] = path[len];
                    }
                }
            }
            let mut dk = y[k];
            y[k] = 0.0;
            for &i in &stack[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = sym.lp[i];
                let end = start + lnz[i];
                for p in start..end {
                    y[li[p]] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                dk -= l_ki * yi;
                li[end] = k;
                lx[end] = l_ki;
                lnz[i] += 1;
            }
            if dk == 0.0 || !dk.is_finite() {
                zero_pivots += 1;
                dk = f64::EPSILON * scale;
            }
            d[k] = dk;
        }
        Factor { sym, li, lx, d, zero_pivots }
    }

    /// Number of negative pivots, i.e. eigenvalues below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn zero_pivots(&self) -> usize {
        self.zero_pivots
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        let mut x: Vec<f64> = (0..n).map(|k| b[self.sym.perm[k]]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in self.sym.lp[j]..self.sym.lp[j + 1] {
                x[self.li[p]] -= self.lx[p] * xj;
            }
        }
        for j in 0..n {
            x[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut acc = x[j];
            for p in self.sym.lp[j]..self.sym.lp[j + 1] {
                acc -= self.lx[p] * x[self.li[p]];
            }
            x[j] = acc;
        }
        for k in 0..n {
            b[self.sym.perm[k]] = x[k];
        }
    }
}
