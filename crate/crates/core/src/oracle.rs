//! Brute-force model of `C_K^X(E)`.
//!
//! Elements are finite rational combinations of words `λμ*` with
//! `r(λ) = r(μ)`. CK1 is built into the word product; the relations
//! `q_v = v − Σ_{s(e)=v} ee* = 0` for `v ∈ X` are applied as the rewrite
//!
//! ```text
//! (αγ_v)(βγ_v)*  →  αβ* − Σ_{e ∈ s^{-1}(v), e ≠ γ_v} (αe)(βe)*
//! ```
//!
//! where `γ_v` is a chosen special edge at `v`. Irreducible words are the
//! normal forms, and counting them by weight gives graded dimensions
//! independently of the closed formulas in [`crate::dims`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

pub const DEFAULT_WORD_CAP: usize = 20_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large: {words} spanning words exceed the cap of {cap}")]
    TooLarge { words: u128, cap: usize },
    #[error("vertex {0:?} in X is not regular")]
    NotRegular(String),
    #[error("vertex index {0} is out of range")]
    UnknownVertex(usize),
    #[error("edge {edge:?} is not emitted by {vertex:?}")]
    BadSpecialEdge { vertex: String, edge: String },
}

/// A path: a start vertex followed by composable edges. No edges means the
/// trivial path at `start`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { start: v, edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn range(&self, g: &Graph) -> usize {
        self.edges.last().map_or(self.start, |&e| g.edges()[e].range)
    }

    fn is_prefix_of(&self, other: &Path) -> bool {
        self.start == other.start && other.edges.starts_with(&self.edges)
    }

    fn extended(&self, tail: &[usize]) -> Path {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(tail);
        Path { start: self.start, edges }
    }
}

/// The word `λμ*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub lambda: Path,
    pub mu: Path,
}

impl Word {
    pub fn vertex(v: usize) -> Self {
        Word { lambda: Path::trivial(v), mu: Path::trivial(v) }
    }

    pub fn weight(&self) -> usize {
        self.lambda.len() + self.mu.len()
    }

    pub fn display<'a>(&'a self, g: &'a Graph) -> WordDisplay<'a> {
        WordDisplay { word: self, graph: g }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    graph: &'a Graph,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Path| -> String {
            if p.is_trivial() {
                self.graph.vertex_name(p.start).to_string()
            } else {
                p.edges.iter().map(|&e| self.graph.edges()[e].name.as_str()).collect::<Vec<_>>().join("")
            }
        };
        write!(f, "({}, {}*)", show(&self.word.lambda), show(&self.word.mu))
    }
}

/// Finitely supported rational combination of words; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<Word, BigRational>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(w, BigRational::one());
        e
    }

    pub fn add_term(&mut self, w: Word, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&mut self, other: &AlgebraElement) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn max_weight(&self) -> Option<usize> {
        self.terms.keys().map(Word::weight).max()
    }

    pub fn coefficient(&self, w: &Word) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// `γ_v` for each `v ∈ X`, indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialEdgeChoice {
    special: Vec<Option<usize>>,
}

impl SpecialEdgeChoice {
    /// First emitted edge in document order at every `v ∈ X`.
    pub fn first_edges(g: &Graph, x: &[usize]) -> Result<Self, OracleError> {
        let mut special = vec![None; g.vertex_count()];
        for &v in x {
            if v >= g.vertex_count() {
                return Err(OracleError::UnknownVertex(v));
            }
            let e = g.out_edges(v).next().ok_or_else(|| OracleError::NotRegular(g.vertex_name(v).to_string()))?;
            special[v] = Some(e);
        }
        Ok(SpecialEdgeChoice { special })
    }

    /// Explicit `(v, γ_v)` pairs.
    pub fn from_pairs(g: &Graph, pairs: &[(usize, usize)]) -> Result<Self, OracleError> {
        let mut special = vec![None; g.vertex_count()];
        for &(v, e) in pairs {
            if v >= g.vertex_count() {
                return Err(OracleError::UnknownVertex(v));
            }
            if e >= g.edge_count() || g.edges()[e].source != v {
                return Err(OracleError::BadSpecialEdge {
                    vertex: g.vertex_name(v).to_string(),
                    edge: g.edges().get(e).map_or_else(|| format!("#{e}"), |e| e.name.clone()),
                });
            }
            special[v] = Some(e);
        }
        Ok(SpecialEdgeChoice { special })
    }

    /// Every admissible choice for `X`, in lexicographic order of edges.
    pub fn all(g: &Graph, x: &[usize]) -> Result<Vec<Self>, OracleError> {
        let mut choices = vec![Vec::new()];
        for &v in x {
            if v >= g.vertex_count() {
                return Err(OracleError::UnknownVertex(v));
            }
            let options: Vec<usize> = g.out_edges(v).collect();
            if options.is_empty() {
                return Err(OracleError::NotRegular(g.vertex_name(v).to_string()));
            }
            choices = choices
                .into_iter()
                .flat_map(|prefix: Vec<(usize, usize)>| {
                    options.iter().map(move |&e| {
                        let mut next = prefix.clone();
                        next.push((v, e));
                        next
                    })
                })
                .collect();
        }
        choices.iter().map(|pairs| Self::from_pairs(g, pairs)).collect()
    }

    pub fn special_edge(&self, v: usize) -> Option<usize> {
        self.special.get(v).copied().flatten()
    }
}

/// Rewriting system for one graph, one `X` and one special-edge choice.
#[derive(Debug, Clone)]
pub struct Oracle<'g> {
    graph: &'g Graph,
    choice: SpecialEdgeChoice,
    word_cap: usize,
}

impl<'g> Oracle<'g> {
    /// Uses the default special edges (first emitted edge in document order).
    pub fn new(graph: &'g Graph, x: &[usize]) -> Result<Self, OracleError> {
        let choice = SpecialEdgeChoice::first_edges(graph, x)?;
        Ok(Oracle { graph, choice, word_cap: DEFAULT_WORD_CAP })
    }

    pub fn with_choice(graph: &'g Graph, choice: SpecialEdgeChoice) -> Self {
        Oracle { graph, choice, word_cap: DEFAULT_WORD_CAP }
    }

    pub fn with_word_cap(mut self, cap: usize) -> Self {
        self.word_cap = cap;
        self
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn choice(&self) -> &SpecialEdgeChoice {
        &self.choice
    }

    /// Number of spanning words of weight `≤ k`, without materialising them.
    pub fn spanning_count(&self, k: usize) -> u128 {
        let paths = self.paths_by_length_and_range(k, false);
        let n = self.graph.vertex_count();
        let mut total = 0u128;
        for w in 0..=k {
            for s in 0..=w {
                for v in 0..n {
                    total += paths[s][v].count as u128 * paths[w - s][v].count as u128;
                }
            }
        }
        total
    }

    fn guard(&self, k: usize) -> Result<(), OracleError> {
        let words = self.spanning_count(k);
        if words > self.word_cap as u128 {
            return Err(OracleError::TooLarge { words, cap: self.word_cap });
        }
        Ok(())
    }

    /// `paths[l][v]`: paths of length `l` with range `v`. When `materialise`
    /// is false only the counts are filled in.
    fn paths_by_length_and_range(&self, k: usize, materialise: bool) -> Vec<Vec<PathBucket>> {
        let g = self.graph;
        let n = g.vertex_count();
        let mut out: Vec<Vec<PathBucket>> = Vec::with_capacity(k + 1);
        out.push(
            (0..n)
                .map(|v| PathBucket {
                    count: 1,
                    paths: if materialise { vec![Path::trivial(v)] } else { Vec::new() },
                })
                .collect(),
        );
        for l in 0..k {
            let mut next: Vec<PathBucket> = (0..n).map(|_| PathBucket::default()).collect();
            for v in 0..n {
                for e in g.out_edges(v) {
                    let w = g.edges()[e].range;
                    next[w].count = next[w].count.saturating_add(out[l][v].count);
                    if materialise {
                        for p in &out[l][v].paths {
                            next[w].paths.push(p.extended(&[e]));
                        }
                    }
                }
            }
            for bucket in &mut next {
                bucket.paths.sort();
            }
            out.push(next);
        }
        out
    }

    /// All words `λμ*` with `r(λ) = r(μ)` and weight `≤ k`, ordered by weight,
    /// then `ℓ(λ)`, then range vertex, then `λ`, then `μ`.
    pub fn enumerate_spanning(&self, k: usize) -> Result<Vec<Word>, OracleError> {
        self.guard(k)?;
        let paths = self.paths_by_length_and_range(k, true);
        let n = self.graph.vertex_count();
        let mut words = Vec::new();
        for w in 0..=k {
            for s in (0..=w).rev() {
                for v in 0..n {
                    for lambda in &paths[s][v].paths {
                        for mu in &paths[w - s][v].paths {
                            words.push(Word { lambda: lambda.clone(), mu: mu.clone() });
                        }
                    }
                }
            }
        }
        Ok(words)
    }

    /// The vertex `v` of the rewrite applicable to `w`, if any: both
    /// components end in the same edge `γ_v` with `v ∈ X`.
    fn reducible_at(&self, w: &Word) -> Option<usize> {
        let (&a, &b) = (w.lambda.edges.last()?, w.mu.edges.last()?);
        if a != b {
            return None;
        }
        let v = self.graph.edges()[a].source;
        (self.choice.special_edge(v) == Some(a)).then_some(v)
    }

    pub fn is_reducible(&self, w: &Word) -> bool {
        self.reducible_at(w).is_some()
    }

    /// Rewrites until no reducible word remains, always expanding a
    /// reducible word of maximal weight first.
    pub fn reduce(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut current = x.clone();
        loop {
            let target = current
                .terms
                .keys()
                .filter(|w| self.is_reducible(w))
                .max_by_key(|w| w.weight())
                .cloned();
            let Some(word) = target else { return current };
            let coeff = current.terms.remove(&word).expect("present");
            let v = self.reducible_at(&word).expect("reducible");
            let gamma = self.choice.special_edge(v).expect("v ∈ X");
            let alpha = Path { start: word.lambda.start, edges: word.lambda.edges[..word.lambda.len() - 1].to_vec() };
            let beta = Path { start: word.mu.start, edges: word.mu.edges[..word.mu.len() - 1].to_vec() };
            current.add_term(Word { lambda: alpha.clone(), mu: beta.clone() }, coeff.clone());
            for e in self.graph.out_edges(v).filter(|&e| e != gamma) {
                current.add_term(Word { lambda: alpha.extended(&[e]), mu: beta.extended(&[e]) }, -coeff.clone());
            }
        }
    }

    /// Product of two words: `(λμ*)(αβ*)` is `(λα')β*` if `α = μα'`,
    /// `λ(βμ')*` if `μ = αμ'`, and zero otherwise.
    pub fn word_product(&self, left: &Word, right: &Word) -> Option<Word> {
        let (lambda, mu) = (&left.lambda, &left.mu);
        let (alpha, beta) = (&right.lambda, &right.mu);
        if mu.is_prefix_of(alpha) {
            Some(Word { lambda: lambda.extended(&alpha.edges[mu.len()..]), mu: beta.clone() })
        } else if alpha.is_prefix_of(mu) {
            Some(Word { lambda: lambda.clone(), mu: beta.extended(&mu.edges[alpha.len()..]) })
        } else {
            None
        }
    }

    /// Bilinear product followed by [`Oracle::reduce`].
    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                if let Some(w) = self.word_product(wa, wb) {
                    out.add_term(w, ca * cb);
                }
            }
        }
        self.reduce(&out)
    }

    /// `counts[w]` = number of irreducible words of weight exactly `w ≤ k`.
    pub fn graded_dims(&self, k: usize) -> Result<Vec<u64>, OracleError> {
        let mut counts = vec![0u64; k + 1];
        for w in self.enumerate_spanning(k)? {
            if !self.is_reducible(&w) {
                counts[w.weight()] += 1;
            }
        }
        Ok(counts)
    }

    /// Counts plus the reduction-consistency check: every reducible spanning
    /// word must reduce to irreducible words of weight no larger than its own.
    pub fn graded_dims_strong(&self, k: usize) -> Result<BruteforceReport, OracleError> {
        let mut counts = vec![0u64; k + 1];
        let mut inconsistent = Vec::new();
        for w in self.enumerate_spanning(k)? {
            if !self.is_reducible(&w) {
                counts[w.weight()] += 1;
                continue;
            }
            let reduced = self.reduce(&AlgebraElement::word(w.clone()));
            let ok = reduced.terms.keys().all(|t| !self.is_reducible(t) && t.weight() <= w.weight());
            if !ok {
                inconsistent.push(w.display(self.graph).to_string());
            }
        }
        Ok(BruteforceReport { counts, inconsistent })
    }

    /// `reduce(Σ_{s(e)=v} ee*)`, which must equal the vertex `v` for `v ∈ X`.
    pub fn ck2_witness(&self, v: usize) -> AlgebraElement {
        let mut sum = AlgebraElement::zero();
        for e in self.graph.out_edges(v) {
            let p = Path { start: v, edges: vec![e] };
            sum.add_term(Word { lambda: p.clone(), mu: p }, BigRational::one());
        }
        self.reduce(&sum)
    }

    /// Checks `V_n V_m ⊂ V_{n+m}` on all irreducible words.
    pub fn product_closure_check(&self, n: usize, m: usize) -> Result<ClosureReport, OracleError> {
        let spanning = self.enumerate_spanning(n.max(m))?;
        let basis: Vec<&Word> = spanning.iter().filter(|w| !self.is_reducible(w)).collect();
        let mut pairs_checked = 0usize;
        let mut violations = Vec::new();
        for a in basis.iter().filter(|w| w.weight() <= n) {
            for b in basis.iter().filter(|w| w.weight() <= m) {
                pairs_checked += 1;
                let product = self.multiply(&AlgebraElement::word((*a).clone()), &AlgebraElement::word((*b).clone()));
                if product.max_weight().is_some_and(|w| w > n + m) {
                    violations.push(format!("{} · {}", a.display(self.graph), b.display(self.graph)));
                }
            }
        }
        Ok(ClosureReport { n, m, pairs_checked, violations })
    }
}

#[derive(Debug, Clone, Default)]
struct PathBucket {
    count: u64,
    paths: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteforceReport {
    pub counts: Vec<u64>,
    /// Reducible words whose reduction left the span of lower-or-equal weight
    /// normal forms.
    pub inconsistent: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub n: usize,
    pub m: usize,
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChoiceReport {
    pub choices: usize,
    pub counts: Vec<Vec<u64>>,
    pub independent: bool,
}

/// Number of irreducible words of weight exactly `k` in `C_K^X(E)` under the
/// default special edges.
pub fn graded_dim_bruteforce(g: &Graph, x: &[usize], k: usize) -> Result<u64, OracleError> {
    Ok(Oracle::new(g, x)?.graded_dims(k)?[k])
}

/// Graded counts under every admissible special-edge choice.
pub fn choice_independence_check(g: &Graph, x: &[usize], k: usize, word_cap: usize) -> Result<ChoiceReport, OracleError> {
    let choices = SpecialEdgeChoice::all(g, x)?;
    let counts = choices
        .into_iter()
        .map(|c| Oracle::with_choice(g, c).with_word_cap(word_cap).graded_dims(k))
        .collect::<Result<Vec<_>, _>>()?;
    let independent = counts.windows(2).all(|w| w[0] == w[1]);
    Ok(ChoiceReport { choices: counts.len(), counts, independent })
}

/// Exact rational from an integer, for building elements by hand.
pub fn coeff(c: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(c))
}

/// Integer view of a coefficient, when it is one.
pub fn integer_coeff(c: &BigRational) -> Option<i64> {
    c.is_integer().then(|| c.to_integer().to_i64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose2() -> Graph {
        Graph::from_json(r#"{"vertices":["v"],"edges":[["e1","v","v"],["e2","v","v"]],"X":["v"]}"#).unwrap()
    }

    fn a2() -> Graph {
        Graph::from_pairs(2, &[(0, 1)])
    }

    fn edge_word(lambda: &[usize], mu: &[usize], start: usize) -> Word {
        Word { lambda: Path { start, edges: lambda.to_vec() }, mu: Path { start, edges: mu.to_vec() } }
    }

    #[test]
    fn spanning_enumeration() {
        let g = rose2();
        let o = Oracle::new(&g, &[]).unwrap();
        assert_eq!(o.enumerate_spanning(0).unwrap(), vec![Word::vertex(0)]);
        assert_eq!(o.enumerate_spanning(1).unwrap().len(), 5);
        let g = a2();
        let o = Oracle::new(&g, &[]).unwrap();
        let words = o.enumerate_spanning(2).unwrap();
        let shown: Vec<String> = words.iter().map(|w| w.display(&g).to_string()).collect();
        assert_eq!(shown, ["(v0, v0*)", "(v1, v1*)", "(e0, v1*)", "(v1, e0*)", "(e0, e0*)"]);
    }

    #[test]
    fn rewrite_examples() {
        let g = rose2();
        let o = Oracle::new(&g, &[0]).unwrap();
        let reduced = o.reduce(&AlgebraElement::word(edge_word(&[0], &[0], 0)));
        let mut expected = AlgebraElement::word(Word::vertex(0));
        expected.add_term(edge_word(&[1], &[1], 0), coeff(-1));
        assert_eq!(reduced, expected);

        let irreducible = AlgebraElement::word(edge_word(&[1], &[1], 0));
        assert_eq!(o.reduce(&irreducible), irreducible);

        let g = a2();
        let o = Oracle::new(&g, &[0]).unwrap();
        let reduced = o.reduce(&AlgebraElement::word(edge_word(&[0], &[0], 0)));
        assert_eq!(reduced, AlgebraElement::word(Word::vertex(0)));
    }

    #[test]
    fn products_follow_ck1_and_vertex_relations() {
        let g = rose2();
        let o = Oracle::new(&g, &[0]).unwrap();
        let ghost = |e: usize| AlgebraElement::word(Word { lambda: Path::trivial(0), mu: Path { start: 0, edges: vec![e] } });
        let real = |e: usize| AlgebraElement::word(Word { lambda: Path { start: 0, edges: vec![e] }, mu: Path::trivial(0) });
        assert_eq!(o.multiply(&ghost(0), &real(0)), AlgebraElement::word(Word::vertex(0)));
        assert!(o.multiply(&ghost(0), &real(1)).is_zero());

        let g = a2();
        let o = Oracle::new(&g, &[]).unwrap();
        let v = AlgebraElement::word(Word::vertex(0));
        let w = AlgebraElement::word(Word::vertex(1));
        assert_eq!(o.multiply(&v, &v), v);
        assert!(o.multiply(&v, &w).is_zero());
    }

    #[test]
    fn bruteforce_counts() {
        let g = rose2();
        assert_eq!(graded_dim_bruteforce(&g, &[0], 2).unwrap(), 11);
        assert_eq!(graded_dim_bruteforce(&g, &[], 3).unwrap(), 32);
        assert_eq!(graded_dim_bruteforce(&a2(), &[0], 2).unwrap(), 0);
        let strong = Oracle::new(&g, &[0]).unwrap().graded_dims_strong(4).unwrap();
        assert_eq!(strong.counts, vec![1, 4, 11, 28, 68]);
        assert!(strong.inconsistent.is_empty());
    }

    #[test]
    fn ck2_witness_reduces_to_vertex() {
        let g = Graph::from_pairs(2, &[(0, 0), (0, 1), (0, 1), (1, 0)]);
        let o = Oracle::new(&g, &[0, 1]).unwrap();
        for v in 0..2 {
            assert_eq!(o.ck2_witness(v), AlgebraElement::word(Word::vertex(v)));
        }
    }

    #[test]
    fn closure_examples() {
        let g = rose2();
        let rep = Oracle::new(&g, &[0]).unwrap().product_closure_check(1, 1).unwrap();
        assert_eq!(rep.pairs_checked, 25);
        assert!(rep.violations.is_empty());
        let g = a2();
        let rep = Oracle::new(&g, &[0]).unwrap().product_closure_check(2, 2).unwrap();
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn choice_independence() {
        let rep = choice_independence_check(&rose2(), &[0], 4, DEFAULT_WORD_CAP).unwrap();
        assert_eq!(rep.choices, 2);
        assert!(rep.independent);
        let rep = choice_independence_check(&a2(), &[0], 4, DEFAULT_WORD_CAP).unwrap();
        assert_eq!(rep.choices, 1);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let g = Graph::from_pairs(1, &[(0, 0), (0, 0), (0, 0)]);
        let o = Oracle::new(&g, &[0]).unwrap().with_word_cap(100);
        assert!(matches!(o.graded_dims(6), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn bad_special_edge() {
        let g = a2();
        assert!(SpecialEdgeChoice::from_pairs(&g, &[(1, 0)]).is_err());
        assert!(Oracle::new(&g, &[1]).is_err());
    }
}
