//! Finite directed multigraphs `E = (E^0, E^1, s, r)` together with the
//! distinguished vertex subset `X ⊆ Reg(E)` used by relative Cohn algebras.
//!
//! Vertex and edge order is document order. Every matrix, dimension table and
//! report in the crate is indexed against it.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::ExactMatrix;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge name {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} refers to undeclared vertex {vertex:?}")]
    UnknownEndpoint { edge: String, vertex: String },
    #[error("X refers to undeclared vertex {0:?}")]
    UnknownXVertex(String),
    #[error("X lists vertex {0:?} more than once")]
    DuplicateXVertex(String),
    #[error("X member {0:?} is not a regular vertex (it is a sink)")]
    NotRegular(String),
    #[error("edge list line {line}: {reason}")]
    EdgeList { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: usize,
    pub range: usize,
}

/// Serde mirror of the canonical JSON graph document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
}

/// A validated finite directed graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    /// `None` when the document did not declare `X`.
    x: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexClasses {
    pub sinks: Vec<usize>,
    pub sources: Vec<usize>,
    pub regular: Vec<usize>,
}

impl Graph {
    /// Builds and validates a graph from names. `x` of `None` means the
    /// document left `X` unspecified.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        x: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut built = Vec::with_capacity(edges.len());
        for (name, src, dst) in edges {
            if !seen.insert(name.clone()) {
                return Err(GraphError::DuplicateEdge(name));
            }
            let lookup = |v: &String| {
                index.get(v).copied().ok_or_else(|| GraphError::UnknownEndpoint {
                    edge: name.clone(),
                    vertex: v.clone(),
                })
            };
            let source = lookup(&src)?;
            let range = lookup(&dst)?;
            built.push(Edge { name, source, range });
        }
        let mut graph = Graph { vertices, edges: built, x: None };
        if let Some(names) = x {
            let mut ids = Vec::with_capacity(names.len());
            for name in names {
                let id = *index
                    .get(&name)
                    .ok_or_else(|| GraphError::UnknownXVertex(name.clone()))?;
                if ids.contains(&id) {
                    return Err(GraphError::DuplicateXVertex(name));
                }
                ids.push(id);
            }
            graph.check_subset_regular(&ids)?;
            graph.x = Some(ids);
        }
        Ok(graph)
    }

    /// Parses the canonical JSON document.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, GraphError> {
        Self::new(doc.vertices, doc.edges, doc.x)
    }

    /// Parses the plain-text edge list format: one `src -> dst [name]` per
    /// line. The name is optional (brackets too); missing names become
    /// `e<line index>`. A line holding a single token declares a vertex.
    /// Blank lines and `#` comments are skipped.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut vertices: Vec<String> = Vec::new();
        let mut known = HashSet::new();
        let mut edges = Vec::new();
        let mut declare = |v: &str, vertices: &mut Vec<String>| {
            if known.insert(v.to_string()) {
                vertices.push(v.to_string());
            }
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| GraphError::EdgeList {
                line: lineno + 1,
                reason: reason.to_string(),
            };
            let Some((lhs, rhs)) = line.split_once("->") else {
                if line.split_whitespace().count() != 1 {
                    return Err(err("expected `src -> dst [name]` or a lone vertex name"));
                }
                declare(line, &mut vertices);
                continue;
            };
            let src = lhs.trim();
            let mut rest = rhs.split_whitespace();
            let dst = rest.next().ok_or_else(|| err("missing range vertex"))?;
            let name = match rest.next() {
                Some(tok) => tok.trim_start_matches('[').trim_end_matches(']').to_string(),
                None => format!("e{}", edges.len()),
            };
            if rest.next().is_some() || src.is_empty() || src.contains(char::is_whitespace) {
                return Err(err("expected `src -> dst [name]`"));
            }
            declare(src, &mut vertices);
            declare(dst, &mut vertices);
            edges.push((name, src.to_string(), dst.to_string()));
        }
        Self::new(vertices, edges, None)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        e.name.clone(),
                        self.vertices[e.source].clone(),
                        self.vertices[e.range].clone(),
                    )
                })
                .collect(),
            x: self
                .x
                .as_ref()
                .map(|ids| ids.iter().map(|&i| self.vertices[i].clone()).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("graph document serializes")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// The declared `X`, if any.
    pub fn declared_x(&self) -> Option<&[usize]> {
        self.x.as_deref()
    }

    /// The declared `X`, falling back to `Reg(E)` when the document omits it.
    pub fn x_or_regular(&self) -> Vec<usize> {
        match &self.x {
            Some(ids) => ids.clone(),
            None => self.regular_vertices(),
        }
    }

    /// Returns a copy with `X` replaced.
    pub fn with_x(&self, x: Option<Vec<usize>>) -> Result<Self, GraphError> {
        if let Some(ids) = &x {
            for &id in ids {
                if id >= self.vertices.len() {
                    return Err(GraphError::UnknownXVertex(format!("#{id}")));
                }
            }
            self.check_subset_regular(ids)?;
        }
        Ok(Graph { x, ..self.clone() })
    }

    /// Edges emitted by `v`, in document order.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == v)
            .map(|(i, _)| i)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.source == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.range == v).count()
    }

    /// `Reg(E)`: vertices emitting at least one edge. A finite graph has no
    /// infinite emitters.
    pub fn regular_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.out_degree(v) > 0).collect()
    }

    pub fn is_regular(&self, v: usize) -> bool {
        v < self.vertices.len() && self.out_degree(v) > 0
    }

    pub fn classify_vertices(&self) -> VertexClasses {
        let n = self.vertices.len();
        VertexClasses {
            sinks: (0..n).filter(|&v| self.out_degree(v) == 0).collect(),
            sources: (0..n).filter(|&v| self.in_degree(v) == 0).collect(),
            regular: self.regular_vertices(),
        }
    }

    /// `(A)_{ij}` = number of edges from vertex `i` to vertex `j`.
    pub fn adjacency_matrix(&self) -> ExactMatrix {
        let n = self.vertices.len();
        let mut counts = vec![0u64; n * n];
        for e in &self.edges {
            counts[e.source * n + e.range] += 1;
        }
        ExactMatrix::from_entries(n, counts.into_iter().map(BigUint::from).collect())
            .expect("n*n entries")
    }

    /// Stable 64-bit FNV-1a fingerprint of the canonical document, rendered
    /// as hex. Used as the graph id in reports.
    pub fn fingerprint(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.to_json().bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }

    fn check_subset_regular(&self, ids: &[usize]) -> Result<(), GraphError> {
        for &id in ids {
            if !self.is_regular(id) {
                return Err(GraphError::NotRegular(self.vertices[id].clone()));
            }
        }
        Ok(())
    }

    /// Seeded random multigraph with vertices `v0..` and edges `e0..` whose
    /// endpoints are uniform over the vertices. `X` is set to `Reg(E)`.
    pub fn random(n_vertices: usize, n_edges: usize, seed: u64) -> Self {
        assert!(n_vertices >= 1, "random graph needs at least one vertex");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
        let edges = (0..n_edges)
            .map(|i| {
                let s = rng.gen_range(0..n_vertices);
                let r = rng.gen_range(0..n_vertices);
                (format!("e{i}"), vertices[s].clone(), vertices[r].clone())
            })
            .collect();
        let g = Graph::new(vertices, edges, None).expect("generated graph is valid");
        let reg = g.regular_vertices();
        g.with_x(Some(reg)).expect("Reg(E) is admissible")
    }

    /// Builds a graph on `v0..v{n-1}` from `(source, range)` index pairs.
    pub fn from_pairs(n_vertices: usize, pairs: &[(usize, usize)]) -> Self {
        let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(s, r))| (format!("e{i}"), vertices[s].clone(), vertices[r].clone()))
            .collect();
        Graph::new(vertices, edges, None).expect("pairs index declared vertices")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose2() -> Graph {
        Graph::from_json(r#"{"vertices":["v"],"edges":[["e1","v","v"],["e2","v","v"]],"X":["v"]}"#)
            .unwrap()
    }

    fn a2() -> Graph {
        Graph::from_json(r#"{"vertices":["v","w"],"edges":[["e","v","w"]]}"#).unwrap()
    }

    #[test]
    fn minimal_graph() {
        let g = Graph::from_json(r#"{"vertices":["v"],"edges":[],"X":[]}"#).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.declared_x(), Some(&[][..]));
    }

    #[test]
    fn rose_is_regular() {
        let g = rose2();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.regular_vertices(), vec![0]);
        assert_eq!(g.declared_x(), Some(&[0][..]));
    }

    #[test]
    fn rejects_unknown_endpoint() {
        let err = Graph::from_json(r#"{"vertices":["v"],"edges":[["e","v","w"]]}"#).unwrap_err();
        assert!(matches!(err, GraphError::UnknownEndpoint { ref vertex, .. } if vertex == "w"));
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            r#"{"vertices":["v","v"],"edges":[]}"#,
            r#"{"vertices":["v"],"edges":[["e","v","v"],["e","v","v"]]}"#,
            r#"{"vertices":["v","w"],"edges":[["e","v","w"]],"X":["w"]}"#,
            r#"{"vertices":["v"],"edges":[],"X":["u"]}"#,
            r#"{"vertices":["v"],"edges":[],"extra":1}"#,
            r#"{"vertices":[],"edges":[]}"#,
            r#"{"vertices":["v"]"#,
        ];
        for text in cases {
            assert!(Graph::from_json(text).is_err(), "{text} should be rejected");
        }
    }

    #[test]
    fn adjacency_examples() {
        assert_eq!(rose2().adjacency_matrix().to_u64_rows(), vec![vec![2]]);
        assert_eq!(a2().adjacency_matrix().to_u64_rows(), vec![vec![0, 1], vec![0, 0]]);
        let cycle = Graph::from_pairs(2, &[(0, 1), (1, 0)]);
        assert_eq!(cycle.adjacency_matrix().to_u64_rows(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn classification() {
        let c = a2().classify_vertices();
        assert_eq!((c.sinks, c.sources, c.regular), (vec![1], vec![0], vec![0]));
        let c = rose2().classify_vertices();
        assert!(c.sinks.is_empty() && c.sources.is_empty());
        assert_eq!(c.regular, vec![0]);
        let c = Graph::from_pairs(1, &[]).classify_vertices();
        assert_eq!((c.sinks, c.sources, c.regular), (vec![0], vec![0], vec![]));
    }

    #[test]
    fn random_graphs_are_deterministic() {
        let single = Graph::random(1, 0, 99);
        assert_eq!((single.vertex_count(), single.edge_count()), (1, 0));
        assert_eq!(Graph::random(2, 3, 7), Graph::random(2, 3, 7));
        let g = Graph::random(3, 4, 1);
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 4));
        assert_eq!(g.declared_x().unwrap(), g.regular_vertices().as_slice());
    }

    #[test]
    fn edge_list_input() {
        let g = Graph::from_edge_list("# fibonacci\nv -> v [a]\nv -> w b\nw -> v\n\nz\n").unwrap();
        assert_eq!(g.vertices(), &["v", "w", "z"]);
        let names: Vec<_> = g.edges().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "e2"]);
        assert!(Graph::from_edge_list("v -> w x y").is_err());
        assert!(Graph::from_edge_list("v w").is_err());
    }

    #[test]
    fn with_x_validates() {
        let g = a2();
        assert!(g.with_x(Some(vec![1])).is_err());
        assert!(g.with_x(Some(vec![5])).is_err());
        assert_eq!(g.with_x(Some(vec![0])).unwrap().declared_x(), Some(&[0][..]));
        assert_eq!(g.x_or_regular(), vec![0]);
    }
}
