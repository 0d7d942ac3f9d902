//! Graded dimensions `dim(V_k / V_{k-1})` of the standard filtrations.
//!
//! * path algebra `KE`: paths of length exactly `k`, i.e. `‖A^k‖`;
//! * Cohn algebra `C_K(E)`: words `λμ*` with `r(λ) = r(μ)` and
//!   `ℓ(λ) + ℓ(μ) = k`, evaluated as `Σ_s ‖A^s (Aᵀ)^{k-s}‖`;
//! * relative Cohn algebra `C_K^X(E)`: the Cohn count minus the words whose
//!   two components both end in the special edge `γ_v` of some `v ∈ X`.
//!   `X = Reg(E)` gives the Leavitt path algebra.
//!
//! The relative count follows from the normal-form basis of `C_K^X(E)`; the
//! brute-force reducer in [`crate::oracle`] checks it word by word.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::Graph;
use crate::matrix::{ExactMatrix, PathCountVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimError {
    #[error("X contains vertex index {0}, which is out of range")]
    UnknownVertex(usize),
    #[error("X contains vertex index {0}, which is a sink")]
    SinkInX(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimKind {
    Path,
    Cohn,
    /// Relative Cohn algebra for the given vertex subset.
    Relative(Vec<usize>),
}

impl DimKind {
    pub fn label(&self) -> &'static str {
        match self {
            DimKind::Path => "path",
            DimKind::Cohn => "cohn",
            DimKind::Relative(_) => "relative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimSequence {
    pub kind: DimKind,
    pub graph_id: String,
    /// `dims[k] = dim(V_k / V_{k-1})` for `k = 0..=kmax`.
    pub dims: Vec<BigUint>,
    /// The algebra itself is finite dimensional (`A` nilpotent).
    pub finite_dimensional: bool,
}

impl DimSequence {
    pub fn kmax(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }
}

pub fn graded_dim_path(a: &ExactMatrix, k: usize) -> BigUint {
    a.pow(k).entry_norm()
}

pub fn graded_dim_cohn(a: &ExactMatrix, k: usize) -> BigUint {
    let powers = a.prefix_powers(k);
    let transposed: Vec<ExactMatrix> = powers.iter().map(ExactMatrix::transpose).collect();
    cohn_norm_sum(&powers, &transposed, k)
}

/// Relative Cohn graded dimension at weight `k`.
pub fn graded_dim_relative(a: &ExactMatrix, x: &[usize], k: usize) -> Result<BigUint, DimError> {
    Ok(relative_dims(a, x, k)?.pop().expect("k + 1 values"))
}

fn cohn_norm_sum(powers: &[ExactMatrix], transposed: &[ExactMatrix], k: usize) -> BigUint {
    (0..=k)
        .map(|s| powers[s].mul(&transposed[k - s]).expect("square").entry_norm())
        .sum()
}

/// `[‖A^0‖, ..., ‖A^kmax‖]`.
pub fn path_dims(a: &ExactMatrix, kmax: usize) -> Vec<BigUint> {
    a.prefix_powers(kmax).iter().map(ExactMatrix::entry_norm).collect()
}

/// Cohn dimensions through the matrix-norm sum `Σ_s ‖A^s (Aᵀ)^{k-s}‖`.
pub fn cohn_dims(a: &ExactMatrix, kmax: usize) -> Vec<BigUint> {
    let powers = a.prefix_powers(kmax);
    let transposed: Vec<ExactMatrix> = powers.iter().map(ExactMatrix::transpose).collect();
    (0..=kmax)
        .into_par_iter()
        .map(|k| cohn_norm_sum(&powers, &transposed, k))
        .collect()
}

/// Cohn dimensions as a pair count `Σ_{s+t=k} Σ_v P_s(v) P_t(v)`.
pub fn pair_count_dims(a: &ExactMatrix, kmax: usize) -> Vec<BigUint> {
    let p = a.path_count_vectors(kmax);
    (0..=kmax).map(|k| pair_sum(&p, k, |_| true)).collect()
}

fn pair_sum(p: &[PathCountVector], k: usize, include: impl Fn(usize) -> bool) -> BigUint {
    let mut total = BigUint::zero();
    for s in 0..=k {
        let (left, right) = (&p[s].counts, &p[k - s].counts);
        for v in 0..left.len() {
            if include(v) && !left[v].is_zero() && !right[v].is_zero() {
                total += &left[v] * &right[v];
            }
        }
    }
    total
}

fn check_x(a: &ExactMatrix, x: &[usize]) -> Result<(), DimError> {
    let rows = a.row_sums();
    for &v in x {
        match rows.get(v) {
            None => return Err(DimError::UnknownVertex(v)),
            Some(r) if r.is_zero() => return Err(DimError::SinkInX(v)),
            Some(_) => {}
        }
    }
    Ok(())
}

/// `N_k = Σ_{s+t=k} Σ_v P_s(v)P_t(v) − Σ_{s+t=k, s,t≥1} Σ_{v∈X} P_{s-1}(v)P_{t-1}(v)`.
pub fn relative_dims(a: &ExactMatrix, x: &[usize], kmax: usize) -> Result<Vec<BigUint>, DimError> {
    check_x(a, x)?;
    let mut in_x = vec![false; a.dim()];
    for &v in x {
        in_x[v] = true;
    }
    let p = a.path_count_vectors(kmax);
    Ok((0..=kmax)
        .map(|k| {
            let all = pair_sum(&p, k, |_| true);
            if k < 2 {
                return all;
            }
            // pairs (αγ_v, βγ_v) with ℓ(α) + ℓ(β) = k - 2, α and β ending at v
            let special = pair_sum(&p, k - 2, |v| in_x[v]);
            all - special
        })
        .collect())
}

/// Dimension sequence of the requested filtration up to `kmax`.
pub fn dim_sequence(g: &Graph, kind: DimKind, kmax: usize) -> Result<DimSequence, DimError> {
    let a = g.adjacency_matrix();
    let dims = match &kind {
        DimKind::Path => path_dims(&a, kmax),
        DimKind::Cohn => cohn_dims(&a, kmax),
        DimKind::Relative(x) => relative_dims(&a, x, kmax)?,
    };
    Ok(DimSequence {
        kind,
        graph_id: g.fingerprint(),
        dims,
        finite_dimensional: a.is_nilpotent(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(values: &[u64]) -> Vec<BigUint> {
        values.iter().map(|&v| BigUint::from(v)).collect()
    }

    fn rose2() -> ExactMatrix {
        ExactMatrix::from_rows(&[[2]])
    }

    fn a2() -> ExactMatrix {
        ExactMatrix::from_rows(&[[0, 1], [0, 0]])
    }

    #[test]
    fn path_examples() {
        assert_eq!(graded_dim_path(&rose2(), 10), BigUint::from(1024u32));
        assert_eq!(graded_dim_path(&ExactMatrix::from_rows(&[[1, 1], [1, 0]]), 4), BigUint::from(13u32));
        assert!(graded_dim_path(&a2(), 2).is_zero());
        assert_eq!(graded_dim_path(&a2(), 0), BigUint::from(2u32));
    }

    #[test]
    fn cohn_examples() {
        assert_eq!(graded_dim_cohn(&a2(), 0), BigUint::from(2u32));
        assert_eq!(graded_dim_cohn(&rose2(), 2), BigUint::from(12u32));
        assert_eq!(graded_dim_cohn(&a2(), 2), BigUint::from(1u32));
        assert_eq!(cohn_dims(&rose2(), 4), big(&[1, 4, 12, 32, 80]));
    }

    #[test]
    fn relative_examples() {
        assert_eq!(graded_dim_relative(&rose2(), &[0], 2).unwrap(), BigUint::from(11u32));
        assert_eq!(graded_dim_relative(&rose2(), &[], 2).unwrap(), BigUint::from(12u32));
        assert!(graded_dim_relative(&a2(), &[0], 2).unwrap().is_zero());
        assert_eq!(relative_dims(&rose2(), &[0], 4).unwrap(), big(&[1, 4, 11, 28, 68]));
    }

    #[test]
    fn relative_rejects_bad_x() {
        assert_eq!(graded_dim_relative(&a2(), &[1], 2), Err(DimError::SinkInX(1)));
        assert_eq!(graded_dim_relative(&a2(), &[7], 2), Err(DimError::UnknownVertex(7)));
    }

    #[test]
    fn sequences() {
        let a2g = Graph::from_pairs(2, &[(0, 1)]);
        let seq = dim_sequence(&a2g, DimKind::Path, 4).unwrap();
        assert_eq!(seq.dims, big(&[2, 1, 0, 0, 0]));
        assert!(seq.finite_dimensional);

        let cycle = Graph::from_pairs(2, &[(0, 1), (1, 0)]);
        let cohn = dim_sequence(&cycle, DimKind::Cohn, 3).unwrap();
        let leavitt = dim_sequence(&cycle, DimKind::Relative(vec![0, 1]), 3).unwrap();
        assert!(!cohn.finite_dimensional);
        for (l, c) in leavitt.dims.iter().zip(&cohn.dims) {
            assert!(l <= c);
        }
    }

    #[test]
    fn two_cohn_routes_agree() {
        let a = ExactMatrix::from_rows(&[[1, 2, 0], [0, 0, 1], [1, 1, 0]]);
        assert_eq!(cohn_dims(&a, 25), pair_count_dims(&a, 25));
    }
}
