//! Sparse symmetric matrices and a direct factorization.
//!
//! Everything here is deterministic: triplet assembly sums contributions in
//! a fixed order, and the factorization uses a reverse Cuthill-McKee
//! permutation with ties broken by node index. Identical inputs give
//! bitwise-identical matrices, factors, and solves.

use crate::{Error, Result};

use std::io::Write;

/// Compressed sparse row matrix with full (not triangular) storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Build from (row, col, value) triplets, summing duplicates.
    ///
    /// The stable sort keeps equal (row, col) keys in insertion order, so
    /// the per-entry summation order is fixed by the caller's push order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &t in &order {
            let (r, c, v) = triplets[t];
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        SparseSym {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as (col, value) pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        self.indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        match self.indices[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            y[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// C = self + alpha * other (pattern union).
    pub fn add_scaled(&self, other: &SparseSym, alpha: f64) -> SparseSym {
        assert_eq!(self.n, other.n);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                triplets.push((i, j, v));
            }
            for (j, v) in other.row(i) {
                triplets.push((i, j, alpha * v));
            }
        }
        SparseSym::from_triplets(self.n, &triplets)
    }

    /// max_ij |A_ij - A_ji|
    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m = m.max((v - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Sum of all entries.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Dense copy, for small test oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[i][j] = v;
            }
        }
        d
    }

    /// Write coordinate-format text: `row col value` per line, 17
    /// significant digits, entries in row-major order.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {:.16e}", i, j, v)?;
            }
        }
        Ok(())
    }
}

/// Sparse Cholesky on the envelope of a reverse Cuthill-McKee ordering.
///
/// Fill-in during Cholesky stays inside the envelope, so the factorization
/// is exact. Bandwidth after RCM is O(sqrt(n)) for planar meshes, which
/// keeps the cost low at the problem sizes this crate targets.
pub struct EnvelopeCholesky {
    n: usize,
    perm: Vec<usize>, // perm[new] = old
    first: Vec<usize>,
    offsets: Vec<usize>,
    vals: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factor a symmetric positive definite matrix. Fails with a message if
    /// a pivot is not strictly positive.
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let n = a.dim();
        let perm = rcm_order(a);
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        // envelope structure
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let oi = perm[i];
            for (oj, _) in a.row(oi) {
                let j = iperm[oj];
                if j < first[i] && j <= i {
                    first[i] = j;
                }
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut vals = vec![0.0f64; offsets[n]];
        for i in 0..n {
            let oi = perm[i];
            for (oj, v) in a.row(oi) {
                let j = iperm[oj];
                if j <= i {
                    vals[offsets[i] + (j - first[i])] = v;
                }
            }
        }
        // in-place row Cholesky over the envelope
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let lo = fi.max(first[j]);
                let mut s = vals[offsets[i] + (j - fi)];
                let ri = offsets[i] - fi;
                let rj = offsets[j] - first[j];
                for k in lo..j {
                    s -= vals[ri + k] * vals[rj + k];
                }
                if j < i {
                    vals[offsets[i] + (j - fi)] = s / vals[offsets[j] + (j - first[j])];
                } else {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::Invalid(format!(
                            "matrix not positive definite (pivot {s:.3e} at {i})"
                        )));
                    }
                    vals[offsets[i] + (i - fi)] = s.sqrt();
                }
            }
        }
        Ok(EnvelopeCholesky {
            n,
            perm,
            first,
            offsets,
            vals,
        })
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut z = vec![0.0f64; n];
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.offsets[i] - fi;
            let mut s = b[self.perm[i]];
            for k in fi..i {
                s -= self.vals[ri + k] * z[k];
            }
            z[i] = s / self.vals[ri + i];
        }
        // back substitution: traverse rows bottom-up, scattering updates
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.offsets[i] - fi;
            z[i] /= self.vals[ri + i];
            let zi = z[i];
            for k in fi..i {
                z[k] -= self.vals[ri + k] * zi;
            }
        }
        let mut x = vec![0.0f64; n];
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }
}

/// Reverse Cuthill-McKee ordering; returns perm with perm[new] = old.
fn rcm_order(a: &SparseSym) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n)
        .map(|i| a.row(i).filter(|&(j, _)| j != i).count())
        .collect();
    let neighbors = |i: usize| -> Vec<usize> {
        let mut nb: Vec<usize> = a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect();
        nb.sort_by_key(|&j| (degree[j], j));
        nb
    };
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        // next component: start from a pseudo-peripheral node
        let seed = match (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)) {
            Some(s) => s,
            None => break,
        };
        let start = pseudo_peripheral(seed, &degree, &neighbors, &visited, n);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        visited[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order.reverse();
    order
}

/// George-Liu pseudo-peripheral node search within one component.
fn pseudo_peripheral(
    seed: usize,
    degree: &[usize],
    neighbors: &dyn Fn(usize) -> Vec<usize>,
    global_visited: &[bool],
    n: usize,
) -> usize {
    let bfs_depth = |root: usize| -> (usize, Vec<usize>) {
        let mut dist = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[root] = 0;
        queue.push_back(root);
        let mut last_level = vec![root];
        let mut depth = 0;
        while let Some(u) = queue.pop_front() {
            for v in neighbors(u) {
                if !global_visited[v] && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    if dist[v] > depth {
                        depth = dist[v];
                        last_level.clear();
                    }
                    if dist[v] == depth {
                        last_level.push(v);
                    }
                    queue.push_back(v);
                }
            }
        }
        (depth, last_level)
    };
    let mut root = seed;
    let (mut depth, mut level) = bfs_depth(root);
    for _ in 0..8 {
        let cand = *level.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
        let (d2, l2) = bfs_depth(cand);
        if d2 > depth {
            root = cand;
            depth = d2;
            level = l2;
        } else {
            break;
        }
    }
    root
}
