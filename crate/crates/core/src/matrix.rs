//! Square matrices of arbitrary-precision nonnegative integers.
//!
//! Path counts grow like `ρ(A)^k` and leave 64-bit range well before
//! `k = 200`, so nothing here ever rounds.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
}

/// Row-major `n x n` matrix; row index is the source vertex, column index the
/// range vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<BigUint>,
}

/// `counts[v]` is the number of length-`k` paths ending at vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountVector {
    pub k: usize,
    pub counts: Vec<BigUint>,
}

impl ExactMatrix {
    pub fn from_entries(n: usize, entries: Vec<BigUint>) -> Result<Self, MatrixError> {
        if entries.len() != n * n {
            return Err(MatrixError::EntryCount { expected: n * n, got: entries.len() });
        }
        Ok(ExactMatrix { n, entries })
    }

    /// Convenience constructor for small literal matrices. Panics on ragged rows.
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), n, "matrix must be square");
            entries.extend(row.iter().map(|&x| BigUint::from(x)));
        }
        ExactMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        ExactMatrix { n, entries: vec![BigUint::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = BigUint::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.entries[j * n + i].clone());
            }
        }
        ExactMatrix { n, entries }
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = &self.entries[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[l * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(ExactMatrix { n, entries })
    }

    /// `A^k` by binary powering; `A^0 = I`.
    pub fn pow(&self, mut k: usize) -> ExactMatrix {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("square");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("square");
            }
        }
        result
    }

    /// `[A^0, A^1, ..., A^k]` by iterated multiplication.
    pub fn prefix_powers(&self, k: usize) -> Vec<ExactMatrix> {
        let mut powers = Vec::with_capacity(k + 1);
        powers.push(Self::identity(self.n));
        for i in 0..k {
            let next = powers[i].mul(self).expect("square");
            powers.push(next);
        }
        powers
    }

    /// `‖A‖ = Σ_{i,j} |a_ij|`.
    pub fn entry_norm(&self) -> BigUint {
        self.entries.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<BigUint> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<BigUint> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| &self.entries[i * self.n + j]).sum())
            .collect()
    }

    /// `A^n = 0`, equivalently the graph is acyclic.
    pub fn is_nilpotent(&self) -> bool {
        self.pow(self.n).is_zero()
    }

    /// Column sums of `A^k`, advanced one step at a time from `P_0 = 1`.
    pub fn path_count_vector(&self, k: usize) -> PathCountVector {
        self.path_count_vectors(k).pop().expect("k + 1 vectors")
    }

    /// `[P_0, ..., P_kmax]` with `P_{k+1}(w) = Σ_v P_k(v) A[v][w]`.
    pub fn path_count_vectors(&self, kmax: usize) -> Vec<PathCountVector> {
        let n = self.n;
        let mut out = Vec::with_capacity(kmax + 1);
        out.push(PathCountVector { k: 0, counts: vec![BigUint::one(); n] });
        for k in 0..kmax {
            let prev = &out[k].counts;
            let counts = (0..n)
                .map(|w| {
                    (0..n)
                        .filter(|&v| !prev[v].is_zero())
                        .map(|v| &prev[v] * &self.entries[v * n + w])
                        .sum()
                })
                .collect();
            out.push(PathCountVector { k: k + 1, counts });
        }
        out
    }

    /// Small-matrix helper for tests and display. Panics past `u64`.
    pub fn to_u64_rows(&self) -> Vec<Vec<u64>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|x| x.to_u64().expect("entry fits in u64")).collect())
            .collect()
    }

    /// Rows as decimal strings, for reports.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect()
    }

    /// Entries as `f64`; exact while entries stay below `2^53`.
    pub fn to_f64_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect()
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_string_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> ExactMatrix {
        ExactMatrix::from_rows(&[[1, 1], [1, 0]])
    }

    #[test]
    fn products() {
        let nil = ExactMatrix::from_rows(&[[0, 1], [0, 0]]);
        assert!(nil.mul(&nil).unwrap().is_zero());
        assert_eq!(ExactMatrix::identity(2).mul(&fib()).unwrap(), fib());
        assert_eq!(fib().mul(&fib()).unwrap().to_u64_rows(), vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(
            nil.mul(&ExactMatrix::identity(3)),
            Err(MatrixError::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn powers() {
        assert_eq!(fib().pow(0), ExactMatrix::identity(2));
        assert_eq!(fib().pow(5).to_u64_rows(), vec![vec![8, 5], vec![5, 3]]);
        assert_eq!(ExactMatrix::from_rows(&[[2]]).pow(10).to_u64_rows(), vec![vec![1024]]);
        let prefix = fib().prefix_powers(6);
        for (k, p) in prefix.iter().enumerate() {
            assert_eq!(p, &fib().pow(k));
        }
    }

    #[test]
    fn norms() {
        assert_eq!(ExactMatrix::from_rows(&[[1, 2], [3, 4]]).entry_norm(), BigUint::from(10u32));
        assert!(ExactMatrix::zero(3).entry_norm().is_zero());
        assert_eq!(ExactMatrix::from_rows(&[[2]]).pow(5).entry_norm(), BigUint::from(32u32));
    }

    #[test]
    fn path_counts() {
        let rose = ExactMatrix::from_rows(&[[2]]);
        assert_eq!(rose.path_count_vector(3).counts, vec![BigUint::from(8u32)]);
        let a2 = ExactMatrix::from_rows(&[[0, 1], [0, 0]]);
        assert_eq!(a2.path_count_vector(1).counts, vec![BigUint::zero(), BigUint::one()]);
        let cycle = ExactMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert_eq!(cycle.path_count_vector(4).counts, vec![BigUint::one(), BigUint::one()]);
    }

    #[test]
    fn nilpotency() {
        assert!(ExactMatrix::from_rows(&[[0, 1], [0, 0]]).is_nilpotent());
        assert!(!fib().is_nilpotent());
        assert!(ExactMatrix::zero(1).is_nilpotent());
    }
}
