//! Adjacency matrices and the matrix-power reachability criteria.
//!
//! The graph module answers the same questions by search; the routines here
//! are kept as an independent cross-check for small graphs.

use serde::Serialize;

/// Dense `n x n` matrix of path counts, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl AdjMatrix {
    pub fn zeros(n: usize) -> Self {
        AdjMatrix { n, entries: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Column indices whose column is identically zero.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| (0..self.n).all(|i| self.get(i, j) == 0))
            .collect()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n).map(|i| self.get(i, i)).fold(0, u64::saturating_add)
    }

    pub fn mul(&self, other: &AdjMatrix) -> AdjMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = AdjMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j).saturating_add(a.saturating_mul(other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `M^1, ..., M^max_power`.
    pub fn powers(&self, max_power: usize) -> Vec<AdjMatrix> {
        let mut out = Vec::with_capacity(max_power);
        let mut current = self.clone();
        for _ in 0..max_power {
            let next = current.mul(self);
            out.push(current);
            current = next;
        }
        out
    }

    /// Path criterion: some `M^k[i][j] > 0` with `1 <= k <= n`.
    ///
    /// The upper bound is `n`, not `n - 1`: a closed walk through every
    /// vertex (e.g. the 2-cycle on two vertices) first shows up on the
    /// diagonal of `M^n`.
    pub fn path_by_powers(&self, i: usize, j: usize) -> bool {
        self.powers(self.n).iter().any(|m| m.get(i, j) > 0)
    }

    /// DAG criterion: `trace(M^1) + ... + trace(M^n) == 0`.
    pub fn is_dag_by_traces(&self) -> bool {
        self.powers(self.n)
            .iter()
            .map(AdjMatrix::trace)
            .fold(0u64, u64::saturating_add)
            == 0
    }

    /// Full reachability table from the powers, computed once.
    pub fn reachability_by_powers(&self) -> Vec<Vec<bool>> {
        let powers = self.powers(self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| powers.iter().any(|m| m.get(i, j) > 0))
                    .collect()
            })
            .collect()
    }
}
