//! Entropy estimates from graded dimension sequences, the closed form
//! `ln ρ(A)`, and the agreement chain `h(KE) ≤ h(L_K(E)) ≤ h(C_K(E)) ≤ h(KE)`.
//!
//! All logarithms are natural.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dims::{self, DimKind, DimSequence};
use crate::graph::Graph;
use crate::matrix::ExactMatrix;

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;
/// Lags are rounded down to a multiple of this so that periodic fluctuations
/// of period 1, 2, 3, 4 or 6 cancel in the growth rate.
const LAG_QUANTUM: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("dimension sequence is empty")]
    Empty,
    #[error("window fraction {0} is outside [0, 1)")]
    BadWindow(f64),
    #[error("dimension sequence has no positive entry in its tail window but is not flagged finite dimensional")]
    Inconsistent,
}

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("contour radius {r} must exceed ‖A‖ = {norm}")]
    RadiusTooSmall { r: String, norm: String },
}

/// Natural logarithm of a big integer without converting it to `f64`:
/// exact bit length plus the logarithm of the leading 64 bits.
pub fn ln_biguint(x: &BigUint) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let bits = x.bits();
    if bits <= 64 {
        return Some((x.to_u64().expect("fits") as f64).ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits");
    Some((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// `(k, ln(d_k)/k)` for every `k ≥ 1` with `d_k > 0`.
    pub per_k: Vec<(usize, f64)>,
    /// `(k, (ln d_k − ln d_{k−lag}) / lag)` over the tail window.
    pub growth: Vec<(usize, f64)>,
    pub window_start: usize,
    pub kmax: usize,
    pub lag: usize,
    /// Maximum of the growth rates over the tail window; 0 for finite
    /// dimensional algebras.
    pub tail_estimate: f64,
    pub finite_dimensional: bool,
}

/// Estimates `limsup ln(d_k)/k` from a finite dimension sequence.
///
/// The tail window is `[⌈window_fraction·kmax⌉, kmax]`. Rather than the raw
/// ratios `ln(d_k)/k`, whose polynomial prefactors decay only like
/// `ln(k)/k`, the estimate is the largest lagged growth rate
/// `(ln d_k − ln d_{k−L})/L` inside the window, which removes the constant
/// prefactor and reduces `k^a` prefactors to `a/k`.
pub fn entropy_estimate(d: &DimSequence, window_fraction: f64) -> Result<EntropyEstimate, EntropyError> {
    if d.dims.is_empty() {
        return Err(EntropyError::Empty);
    }
    if !(0.0..1.0).contains(&window_fraction) {
        return Err(EntropyError::BadWindow(window_fraction));
    }
    let kmax = d.kmax();
    let logs: Vec<Option<f64>> = d.dims.iter().map(ln_biguint).collect();
    let per_k: Vec<(usize, f64)> = (1..=kmax)
        .filter_map(|k| logs[k].map(|l| (k, l / k as f64)))
        .collect();
    let window_start = ((window_fraction * kmax as f64).ceil() as usize).clamp(1.min(kmax), kmax);
    let width = kmax - window_start;
    let lag = match width / 2 {
        0 => 0,
        half if half >= LAG_QUANTUM => half / LAG_QUANTUM * LAG_QUANTUM,
        half => half,
    };

    if d.finite_dimensional {
        return Ok(EntropyEstimate {
            per_k,
            growth: Vec::new(),
            window_start,
            kmax,
            lag,
            tail_estimate: 0.0,
            finite_dimensional: true,
        });
    }

    let growth: Vec<(usize, f64)> = if lag == 0 {
        Vec::new()
    } else {
        (window_start + lag..=kmax)
            .filter_map(|k| match (logs[k], logs[k - lag]) {
                (Some(hi), Some(lo)) => Some((k, (hi - lo) / lag as f64)),
                _ => None,
            })
            .collect()
    };
    let tail_estimate = if growth.is_empty() {
        per_k
            .iter()
            .filter(|(k, _)| *k >= window_start)
            .map(|&(_, h)| h)
            .reduce(f64::max)
            .ok_or(EntropyError::Inconsistent)?
    } else {
        growth.iter().map(|&(_, g)| g).fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(EntropyEstimate {
        per_k,
        growth,
        window_start,
        kmax,
        lag,
        tail_estimate,
        finite_dimensional: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_POWER_ITERATIONS: usize = 200_000;
const GELFAND_DIAGONAL_POWERS: usize = 64;
const GELFAND_DOUBLINGS: u32 = 6;
/// Relative padding applied to float-evaluated brackets.
const ROUNDING_PAD: f64 = 1e-13;

/// Exact Gelfand brackets: `max_{k,i} ((A^k)_ii)^{1/k} ≤ ρ(A) ≤ min_m ‖A^{2^m}‖^{1/2^m}`.
pub fn gelfand_brackets(a: &ExactMatrix) -> (f64, f64) {
    let n = a.dim();
    let mut lower = 0.0f64;
    for (k, power) in a.prefix_powers(GELFAND_DIAGONAL_POWERS).iter().enumerate().skip(1) {
        for i in 0..n {
            if let Some(l) = ln_biguint(power.get(i, i)) {
                lower = lower.max((l / k as f64).exp());
            }
        }
    }
    let mut upper = f64::INFINITY;
    let mut power = a.clone();
    for m in 0..=GELFAND_DOUBLINGS {
        match ln_biguint(&power.entry_norm()) {
            Some(l) => upper = upper.min((l / f64::from(1u32 << m)).exp()),
            None => {
                upper = 0.0;
                break;
            }
        }
        power = power.mul(&power).expect("square");
    }
    (lower * (1.0 - ROUNDING_PAD), upper * (1.0 + ROUNDING_PAD))
}

/// Strongly connected components that contain at least one cycle.
fn cyclic_components(a: &ExactMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| !a.get(i, j).is_zero()).collect())
        .collect();
    for l in 0..n {
        for i in 0..n {
            if reach[i][l] {
                for j in 0..n {
                    if reach[l][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut comps = Vec::new();
    for i in 0..n {
        if assigned[i] || !reach[i][i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &comp {
            assigned[j] = true;
        }
        comps.push(comp);
    }
    comps
}

/// Collatz–Wielandt brackets for an irreducible block, by power iteration on
/// `B + I` (primitive, so the Perron value dominates strictly).
fn perron_block(a: &ExactMatrix, comp: &[usize], rel_tol: f64) -> (f64, f64, usize, bool) {
    let m = comp.len();
    let block: Vec<f64> = comp
        .iter()
        .flat_map(|&i| {
            comp.iter().map(move |&j| a.get(i, j).to_f64().unwrap_or(f64::MAX) + if i == j { 1.0 } else { 0.0 })
        })
        .collect();
    let mut x = vec![1.0f64; m];
    let mut y = vec![0.0f64; m];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let pad = (m as f64 + 2.0) * f64::EPSILON;
    for it in 1..=MAX_POWER_ITERATIONS {
        for i in 0..m {
            y[i] = (0..m).map(|j| block[i * m + j] * x[j]).sum();
        }
        let (l, h) = (0..m)
            .map(|i| y[i] / x[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r), h.max(r)));
        lo = lo.max(l * (1.0 - pad));
        hi = hi.min(h * (1.0 + pad));
        if hi - lo <= 0.5 * rel_tol * (lo - 1.0) {
            return (lo - 1.0, hi - 1.0, it, true);
        }
        let scale = y.iter().cloned().fold(0.0, f64::max);
        for i in 0..m {
            x[i] = y[i] / scale;
        }
    }
    (lo - 1.0, hi - 1.0, MAX_POWER_ITERATIONS, false)
}

/// Spectral radius of a nonnegative integer matrix with certified brackets.
///
/// Exact Gelfand data bound `ρ` from both sides; the brackets are then
/// tightened by Collatz–Wielandt bounds from shifted power iteration on each
/// cyclic strongly connected block, since `ρ(A)` is the largest block radius.
pub fn spectral_radius(a: &ExactMatrix, rel_tol: f64) -> SpectralEstimate {
    if a.is_nilpotent() {
        return SpectralEstimate { rho: 0.0, lower: 0.0, upper: 0.0, iterations: 0, converged: true };
    }
    let (g_lower, g_upper) = gelfand_brackets(a);
    let mut block_lower = 0.0f64;
    let mut block_upper = 0.0f64;
    let mut iterations = 0;
    for comp in cyclic_components(a) {
        let (lo, hi, it, _) = perron_block(a, &comp, rel_tol);
        block_lower = block_lower.max(lo);
        block_upper = block_upper.max(hi);
        iterations += it;
    }
    let lower = g_lower.max(block_lower);
    let upper = g_upper.min(block_upper).max(lower);
    let rho = 0.5 * (lower + upper);
    SpectralEstimate {
        rho,
        lower,
        upper,
        iterations,
        converged: upper <= lower * (1.0 + rel_tol),
    }
}

/// `ln ρ(A)`, or 0 when `A` is nilpotent (the algebra is finite dimensional).
pub fn closed_form_entropy(a: &ExactMatrix) -> f64 {
    if a.is_nilpotent() {
        return 0.0;
    }
    spectral_radius(a, 1e-13).rho.ln().max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub kmax: usize,
    pub tol: f64,
    pub closed_form: f64,
    pub path: EntropyEstimate,
    pub leavitt: EntropyEstimate,
    pub cohn: EntropyEstimate,
    /// Weights `k` where `d^path_k ≤ d^L_k ≤ d^C_k` fails.
    pub sandwich_violations: Vec<usize>,
    /// `|tail − ln ρ|` for path, Leavitt and Cohn, in that order.
    pub deviations: [f64; 3],
    pub max_pairwise_gap: f64,
    pub chain_ok: bool,
}

/// Computes the three dimension sequences (Leavitt at `X = Reg(E)`) and checks
/// the graded sandwich plus agreement of every tail estimate with `ln ρ(A)`.
pub fn verify_chain(g: &Graph, kmax: usize, tol: f64) -> ChainReport {
    let reg = g.regular_vertices();
    let (path, (leavitt, cohn)) = rayon::join(
        || dims::dim_sequence(g, DimKind::Path, kmax),
        || {
            rayon::join(
                || dims::dim_sequence(g, DimKind::Relative(reg.clone()), kmax),
                || dims::dim_sequence(g, DimKind::Cohn, kmax),
            )
        },
    );
    let path = path.expect("path dims");
    let leavitt = leavitt.expect("Reg(E) is admissible");
    let cohn = cohn.expect("cohn dims");
    verify_chain_from_sequences(&g.adjacency_matrix(), &path, &leavitt, &cohn, tol)
}

/// The chain checks on precomputed sequences.
pub fn verify_chain_from_sequences(
    a: &ExactMatrix,
    path: &DimSequence,
    leavitt: &DimSequence,
    cohn: &DimSequence,
    tol: f64,
) -> ChainReport {
    let kmax = path.kmax().min(leavitt.kmax()).min(cohn.kmax());
    let sandwich_violations: Vec<usize> = (0..=kmax)
        .filter(|&k| !(path.dims[k] <= leavitt.dims[k] && leavitt.dims[k] <= cohn.dims[k]))
        .collect();
    let closed_form = closed_form_entropy(a);
    let estimate = |d: &DimSequence| {
        entropy_estimate(d, DEFAULT_WINDOW_FRACTION).unwrap_or(EntropyEstimate {
            per_k: Vec::new(),
            growth: Vec::new(),
            window_start: 0,
            kmax,
            lag: 0,
            tail_estimate: f64::NAN,
            finite_dimensional: d.finite_dimensional,
        })
    };
    let (path_est, leavitt_est, cohn_est) = (estimate(path), estimate(leavitt), estimate(cohn));
    let tails = [path_est.tail_estimate, leavitt_est.tail_estimate, cohn_est.tail_estimate];
    let deviations = tails.map(|t| (t - closed_form).abs());
    let max_pairwise_gap = tails
        .iter()
        .flat_map(|a| tails.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    // NaN deviations compare false, so a failed estimate fails the chain
    let chain_ok = sandwich_violations.is_empty() && deviations.iter().all(|&d| d <= tol);
    ChainReport {
        kmax,
        tol,
        closed_form,
        path: path_est,
        leavitt: leavitt_est,
        cohn: cohn_est,
        sandwich_violations,
        deviations,
        max_pairwise_gap,
        chain_ok,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormBoundReport {
    pub r: BigRational,
    /// `n + ‖A‖/(r − ‖A‖)`.
    pub constant: BigRational,
    pub kmax: usize,
    /// `k` with `‖A^k‖ > r^k · constant`.
    pub power_violations: Vec<usize>,
    /// `k` with `Σ_s ‖A^s (Aᵀ)^{k−s}‖ > r^k · constant² · (k+1)`.
    pub combined_violations: Vec<usize>,
}

impl NormBoundReport {
    pub fn ok(&self) -> bool {
        self.power_violations.is_empty() && self.combined_violations.is_empty()
    }
}

fn to_rational(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// Exact check of `‖A^k‖ ≤ r^k (n + ‖A‖/(r − ‖A‖))` and of the combined
/// bound on the Cohn graded dimension, for `k ≤ kmax`. Requires `r > ‖A‖`,
/// the regime where the geometric series for the resolvent converges.
pub fn norm_bound_check(a: &ExactMatrix, r: &BigRational, kmax: usize) -> Result<NormBoundReport, BoundError> {
    let norm = to_rational(&a.entry_norm());
    if *r <= norm {
        return Err(BoundError::RadiusTooSmall { r: r.to_string(), norm: norm.to_string() });
    }
    let n = BigRational::from_integer(BigInt::from(a.dim()));
    let constant = n + &norm / (r - &norm);
    let path = dims::path_dims(a, kmax);
    let cohn = dims::cohn_dims(a, kmax);
    let mut power_violations = Vec::new();
    let mut combined_violations = Vec::new();
    let mut r_pow = BigRational::one();
    for k in 0..=kmax {
        let bound = &r_pow * &constant;
        if to_rational(&path[k]) > bound {
            power_violations.push(k);
        }
        let combined = &bound * &constant * BigRational::from_integer(BigInt::from(k + 1));
        if to_rational(&cohn[k]) > combined {
            combined_violations.push(k);
        }
        r_pow *= r;
    }
    Ok(NormBoundReport { r: r.clone(), constant, kmax, power_violations, combined_violations })
}

/// Report-only companion for `ρ(A) < r ≤ ‖A‖`, where no bound is asserted:
/// returns `max_{k ≤ kmax} ‖A^k‖ / r^k`.
pub fn observed_norm_growth(a: &ExactMatrix, r: &BigRational, kmax: usize) -> BigRational {
    let mut r_pow = BigRational::one();
    let mut best = BigRational::zero();
    for norm in dims::path_dims(a, kmax) {
        let ratio = to_rational(&norm) / &r_pow;
        if ratio > best {
            best = ratio;
        }
        r_pow *= r;
    }
    best
}
