//! Command implementations behind the `gael` binary. Every command returns a
//! [`RunReport`]; the binary only parses arguments, prints, and maps outcomes
//! to exit codes.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gael_core::corpus::{self, subsets};
use gael_core::dims::{self, DimKind, DimSequence};
use gael_core::entropy::{self, ChainReport, EntropyEstimate};
use gael_core::oracle::{Oracle, OracleError, DEFAULT_WORD_CAP};
use gael_core::resolvent::{self, cauchy_error_report};
use gael_core::{ExactMatrix, Graph};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

pub const ORACLE_WORDS_ENV: &str = "GAEL_MAX_ORACLE_WORDS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Json,
    EdgeList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    Path,
    Cohn,
    Leavitt,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    E,
    Two,
}

impl LogBase {
    fn scale(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            LogBase::E => "nats",
            LogBase::Two => "bits",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub graph_id: String,
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub duration_ms: f64,
}

impl RunReport {
    fn new(graph_id: String, command: &str, parameters: Value, results: Value, started: Instant) -> Self {
        RunReport {
            graph_id,
            command: command.to_string(),
            parameters,
            results,
            duration_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Reads a graph file. Without an explicit format, `.json` files and files
/// starting with `{` are read as JSON documents, anything else as an edge
/// list.
pub fn load_graph(path: &Path, format: Option<InputFormat>) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = format.unwrap_or_else(|| {
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if is_json {
            InputFormat::Json
        } else {
            InputFormat::EdgeList
        }
    });
    let graph = match format {
        InputFormat::Json => Graph::from_json(&text),
        InputFormat::EdgeList => Graph::from_edge_list(&text),
    };
    graph.with_context(|| format!("invalid graph in {}", path.display()))
}

fn names(g: &Graph, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&v| g.vertex_name(v).to_string()).collect()
}

fn decimal(values: &[BigUint]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

pub fn cmd_info(g: &Graph) -> RunReport {
    let started = Instant::now();
    let a = g.adjacency_matrix();
    let classes = g.classify_vertices();
    let results = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "sinks": names(g, &classes.sinks),
        "sources": names(g, &classes.sources),
        "regular": names(g, &classes.regular),
        "X": g.declared_x().map(|x| names(g, x)),
        "adjacency": a.to_string_rows(),
        "nilpotent": a.is_nilpotent(),
    });
    RunReport::new(g.fingerprint(), "info", json!({}), results, started)
}

/// Resolves the subset used for each algebra kind: Leavitt always uses
/// `Reg(E)`; relative uses the document's `X`, or `Reg(E)` when omitted.
pub fn dim_kind(g: &Graph, kind: AlgebraKind) -> DimKind {
    match kind {
        AlgebraKind::Path => DimKind::Path,
        AlgebraKind::Cohn => DimKind::Cohn,
        AlgebraKind::Leavitt => DimKind::Relative(g.regular_vertices()),
        AlgebraKind::Relative => DimKind::Relative(g.x_or_regular()),
    }
}

pub fn kind_label(kind: AlgebraKind) -> &'static str {
    match kind {
        AlgebraKind::Path => "path",
        AlgebraKind::Cohn => "cohn",
        AlgebraKind::Leavitt => "leavitt",
        AlgebraKind::Relative => "relative",
    }
}

pub fn cmd_dims(g: &Graph, kind: AlgebraKind, kmax: usize) -> Result<(RunReport, DimSequence)> {
    let started = Instant::now();
    let seq = dims::dim_sequence(g, dim_kind(g, kind), kmax)?;
    let x = match &seq.kind {
        DimKind::Relative(x) => Some(names(g, x)),
        _ => None,
    };
    let results = json!({
        "kind": kind_label(kind),
        "X": x,
        "dims": decimal(&seq.dims),
        "finite_dimensional": seq.finite_dimensional,
    });
    let params = json!({ "kind": kind_label(kind), "kmax": kmax });
    Ok((RunReport::new(g.fingerprint(), "dims", params, results, started), seq))
}

pub fn dims_csv(seq: &DimSequence) -> String {
    let mut out = String::from("k,dim\n");
    for (k, d) in seq.dims.iter().enumerate() {
        writeln!(out, "{k},{d}").expect("write to string");
    }
    out
}

fn estimate_json(est: &EntropyEstimate, base: LogBase) -> Value {
    json!({
        "tail_estimate": base.scale(est.tail_estimate),
        "window_start": est.window_start,
        "lag": est.lag,
        "finite_dimensional": est.finite_dimensional,
    })
}

fn chain_json(report: &ChainReport, base: LogBase) -> Value {
    json!({
        "unit": base.label(),
        "closed_form": base.scale(report.closed_form),
        "path": estimate_json(&report.path, base),
        "leavitt": estimate_json(&report.leavitt, base),
        "cohn": estimate_json(&report.cohn, base),
        "deviations": report.deviations.map(|d| base.scale(d)),
        "max_pairwise_gap": base.scale(report.max_pairwise_gap),
        "sandwich_violations": report.sandwich_violations,
        "chain_ok": report.chain_ok,
    })
}

pub fn cmd_entropy(g: &Graph, kmax: usize, tol: f64, base: LogBase) -> Result<(RunReport, ChainReport)> {
    if kmax < 10 {
        bail!("--kmax must be at least 10, got {kmax}");
    }
    let started = Instant::now();
    let report = entropy::verify_chain(g, kmax, tol);
    let params = json!({ "kmax": kmax, "tol": tol, "base": base.label() });
    let run = RunReport::new(g.fingerprint(), "entropy", params, chain_json(&report, base), started);
    Ok((run, report))
}

/// Per-k ratios `ln(d_k)/k`; empty cells where `d_k = 0` or `k = 0`.
pub fn entropy_csv(report: &ChainReport, base: LogBase) -> String {
    let column = |est: &EntropyEstimate| {
        let mut col = vec![None; report.kmax + 1];
        for &(k, h) in &est.per_k {
            if k <= report.kmax {
                col[k] = Some(base.scale(h));
            }
        }
        col
    };
    let (p, c, l) = (column(&report.path), column(&report.cohn), column(&report.leavitt));
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
    let mut out = String::from("k,h_path,h_cohn,h_leavitt\n");
    for k in 0..=report.kmax {
        writeln!(out, "{k},{},{},{}", cell(p[k]), cell(c[k]), cell(l[k])).expect("write to string");
    }
    out
}

pub fn cmd_cauchy(g: &Graph, k: usize, r: Option<f64>, nodes: usize) -> Result<RunReport> {
    let started = Instant::now();
    let a = g.adjacency_matrix();
    let r = r.unwrap_or_else(|| norm_f64(&a) + 1.0);
    let report = cauchy_error_report(&a, k, r, nodes)?;
    let params = json!({ "k": k, "r": r, "nodes": nodes });
    let mut results = serde_json::to_value(&report).expect("report serializes");
    results["exact_power"] = json!(a.pow(k).to_string_rows());
    Ok(RunReport::new(g.fingerprint(), "cauchy", params, results, started))
}

fn norm_f64(a: &ExactMatrix) -> f64 {
    a.entry_norm().to_string().parse().unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub kmax: usize,
    pub tol: f64,
    pub oracle_k: usize,
    pub oracle_word_cap: usize,
    /// Test hook: perturb the Leavitt dimensions so the suite must fail.
    pub corrupt_dims: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { kmax: 200, tol: 0.05, oracle_k: 6, oracle_word_cap: oracle_word_cap_from_env(), corrupt_dims: false }
    }
}

pub fn oracle_word_cap_from_env() -> usize {
    std::env::var(ORACLE_WORDS_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_WORD_CAP)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub status: &'static str,
    pub detail: Value,
}

impl CheckOutcome {
    fn verdict(check: &'static str, pass: bool, detail: Value) -> Self {
        CheckOutcome { check, status: if pass { "pass" } else { "fail" }, detail }
    }

    fn skipped(check: &'static str, detail: Value) -> Self {
        CheckOutcome { check, status: "skipped", detail }
    }

    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

/// Subsets of `Reg(E)` exercised by the monotonicity and oracle checks: all of
/// them for up to six regular vertices, otherwise `∅`, the declared `X` and
/// `Reg(E)`.
fn x_family(g: &Graph) -> Vec<Vec<usize>> {
    let reg = g.regular_vertices();
    if reg.len() <= 6 {
        return subsets(&reg);
    }
    let mut family = vec![Vec::new(), g.x_or_regular(), reg];
    family.dedup();
    family
}

const IDENTITY_KMAX: usize = 30;
const NORM_BOUND_KMAX: usize = 20;
const CAUCHY_KMAX: usize = 10;
const CAUCHY_NODES: usize = 512;

/// Runs the full property suite on one graph.
pub fn verify_graph(g: &Graph, opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let a = g.adjacency_matrix();
    let mut checks = Vec::new();
    let kmax = opts.kmax.max(IDENTITY_KMAX);
    let corrupt = |mut d: Vec<BigUint>, cohn: &[BigUint]| {
        if opts.corrupt_dims && d.len() > 1 {
            d[1] = &cohn[1] + 1u32;
        }
        d
    };

    // entropy chain
    let path = dims::path_dims(&a, kmax);
    let cohn = dims::cohn_dims(&a, kmax);
    let reg = g.regular_vertices();
    let leavitt = corrupt(dims::relative_dims(&a, &reg, kmax).expect("Reg(E) admissible"), &cohn);
    let seq = |kind: DimKind, dims: Vec<BigUint>| DimSequence {
        kind,
        graph_id: g.fingerprint(),
        dims: dims[..=opts.kmax].to_vec(),
        finite_dimensional: a.is_nilpotent(),
    };
    let chain = entropy::verify_chain_from_sequences(
        &a,
        &seq(DimKind::Path, path.clone()),
        &seq(DimKind::Relative(reg.clone()), leavitt.clone()),
        &seq(DimKind::Cohn, cohn.clone()),
        opts.tol,
    );
    checks.push(CheckOutcome::verdict("entropy_chain", chain.chain_ok, chain_json(&chain, LogBase::E)));

    // norm-sum identity against the pair count
    let pairs = dims::pair_count_dims(&a, IDENTITY_KMAX);
    let mismatches: Vec<usize> = (0..=IDENTITY_KMAX).filter(|&k| pairs[k] != cohn[k]).collect();
    checks.push(CheckOutcome::verdict(
        "norm_sum_identity",
        mismatches.is_empty(),
        json!({ "kmax": IDENTITY_KMAX, "mismatches": mismatches }),
    ));

    // sandwich and monotonicity in X
    let family = x_family(g);
    let relative: Vec<Vec<BigUint>> = family
        .iter()
        .map(|x| {
            let d = dims::relative_dims(&a, x, IDENTITY_KMAX).expect("X ⊆ Reg(E)");
            if x == &reg {
                corrupt(d, &cohn)
            } else {
                d
            }
        })
        .collect();
    let mut monotone_violations = Vec::new();
    for (i, x) in family.iter().enumerate() {
        for (j, y) in family.iter().enumerate() {
            if !x.iter().all(|v| y.contains(v)) {
                continue;
            }
            for k in 0..=IDENTITY_KMAX {
                let (dx, dy) = (&relative[i][k], &relative[j][k]);
                if !(path[k] <= *dy && dy <= dx && *dx <= cohn[k]) {
                    monotone_violations.push(json!({ "X": names(g, x), "Y": names(g, y), "k": k }));
                }
            }
        }
    }
    checks.push(CheckOutcome::verdict(
        "sandwich_monotonicity",
        monotone_violations.is_empty(),
        json!({ "subsets": family.len(), "kmax": IDENTITY_KMAX, "violations": monotone_violations }),
    ));

    // oracle equivalence
    let mut oracle_detail = Vec::new();
    let mut oracle_ok = true;
    let mut oracle_skipped = false;
    for (x, formula) in family.iter().zip(&relative) {
        let oracle = match Oracle::new(g, x) {
            Ok(o) => o.with_word_cap(opts.oracle_word_cap),
            Err(e) => {
                oracle_ok = false;
                oracle_detail.push(json!({ "X": names(g, x), "error": e.to_string() }));
                continue;
            }
        };
        match oracle.graded_dims_strong(opts.oracle_k) {
            Ok(report) => {
                let matches = report.counts.iter().zip(formula).all(|(c, f)| BigUint::from(*c) == *f);
                let ok = matches && report.inconsistent.is_empty();
                oracle_ok &= ok;
                oracle_detail.push(json!({ "X": names(g, x), "counts": report.counts, "match": ok }));
            }
            Err(e @ OracleError::TooLarge { .. }) => {
                oracle_skipped = true;
                oracle_detail.push(json!({ "X": names(g, x), "skipped": e.to_string() }));
            }
            Err(e) => {
                oracle_ok = false;
                oracle_detail.push(json!({ "X": names(g, x), "error": e.to_string() }));
            }
        }
    }
    let detail = json!({ "k": opts.oracle_k, "subsets": oracle_detail });
    checks.push(if oracle_skipped && oracle_ok {
        CheckOutcome::skipped("oracle_equivalence", detail)
    } else {
        CheckOutcome::verdict("oracle_equivalence", oracle_ok, detail)
    });

    // exact norm bounds
    let norm = BigRational::from_integer(BigInt::from(a.entry_norm()));
    let mut bound_detail = Vec::new();
    let mut bound_ok = true;
    for r in [&norm + BigRational::from_integer(1.into()), &norm * BigRational::from_integer(2.into()) + BigRational::from_integer(1.into())] {
        let report = entropy::norm_bound_check(&a, &r, NORM_BOUND_KMAX).expect("r > ‖A‖");
        bound_ok &= report.ok();
        bound_detail.push(json!({
            "r": r.to_string(),
            "power_violations": report.power_violations,
            "combined_violations": report.combined_violations,
        }));
    }
    checks.push(CheckOutcome::verdict("norm_bound", bound_ok, json!(bound_detail)));

    // contour reconstruction and resolvent bound
    let r = norm_f64(&a) + 1.0;
    let mut cauchy_detail = Vec::new();
    let mut cauchy_ok = true;
    for k in 0..=CAUCHY_KMAX {
        match cauchy_error_report(&a, k, r, CAUCHY_NODES) {
            Ok(rep) => {
                let ok = rep.rounds_exactly && rep.within_bound && rep.max_imag <= 1e-8 && rep.max_error < 0.5;
                cauchy_ok &= ok;
                cauchy_detail.push(json!({ "k": k, "max_error": rep.max_error, "max_imag": rep.max_imag, "aliasing_bound": rep.aliasing_bound, "ok": ok }));
            }
            Err(e) => {
                cauchy_ok = false;
                cauchy_detail.push(json!({ "k": k, "error": e.to_string() }));
            }
        }
    }
    checks.push(CheckOutcome::verdict("cauchy_reconstruction", cauchy_ok, json!({ "r": r, "nodes": CAUCHY_NODES, "powers": cauchy_detail })));

    let outcome = match resolvent::resolvent_norm_bound_check(&a, r, 64) {
        Ok(rep) => CheckOutcome::verdict("resolvent_norm_bound", rep.violations.is_empty(), serde_json::to_value(&rep).expect("serializes")),
        Err(e) => CheckOutcome::verdict("resolvent_norm_bound", false, json!({ "error": e.to_string() })),
    };
    checks.push(outcome);
    checks
}

/// Runs [`verify_graph`] on every named graph; returns the report and whether
/// all checks passed (skipped checks do not fail the run).
pub fn cmd_verify(graphs: &[(String, Graph)], opts: &VerifyOptions) -> (RunReport, bool) {
    let started = Instant::now();
    let mut all_pass = true;
    let mut per_graph = Vec::new();
    for (name, g) in graphs {
        let checks = verify_graph(g, opts);
        let pass = !checks.iter().any(CheckOutcome::failed);
        all_pass &= pass;
        per_graph.push(json!({ "name": name, "graph_id": g.fingerprint(), "graph": g.to_document(), "pass": pass, "checks": checks }));
    }
    let graph_id = match graphs {
        [(_, g)] => g.fingerprint(),
        _ => format!("corpus-{}", graphs.len()),
    };
    let params = json!({
        "kmax": opts.kmax,
        "tol": opts.tol,
        "oracle_k": opts.oracle_k,
        "oracle_word_cap": opts.oracle_word_cap,
        "corrupt_dims": opts.corrupt_dims,
    });
    let results = json!({ "pass": all_pass, "graphs": per_graph });
    (RunReport::new(graph_id, "verify", params, results, started), all_pass)
}

/// `n` random graphs with at most four vertices and six edges.
pub fn seeded_corpus(n: usize, seed: u64) -> Vec<(String, Graph)> {
    corpus::random_corpus(n, 4, 6, seed)
}
