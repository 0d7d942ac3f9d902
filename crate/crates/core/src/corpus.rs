//! Named test graphs and seeded corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// One vertex with `petals` loops.
pub fn rose(petals: usize) -> Graph {
    let edges = (1..=petals).map(|i| (format!("e{i}"), "v".to_string(), "v".to_string())).collect();
    Graph::new(vec!["v".into()], edges, Some(vec!["v".into()])).expect("rose graph")
}

/// Adjacency `[[1,1],[1,0]]`: a loop at `v`, `v → w` and `w → v`.
pub fn fibonacci() -> Graph {
    Graph::new(
        vec!["v".into(), "w".into()],
        vec![
            ("f".into(), "v".into(), "v".into()),
            ("g".into(), "v".into(), "w".into()),
            ("h".into(), "w".into(), "v".into()),
        ],
        None,
    )
    .expect("fibonacci graph")
}

/// Directed cycle of the given length.
pub fn cycle(len: usize) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..len).map(|i| (i, (i + 1) % len)).collect();
    Graph::from_pairs(len, &pairs)
}

/// The `A_2` graph `v → w`.
pub fn line2() -> Graph {
    Graph::new(vec!["v".into(), "w".into()], vec![("e".into(), "v".into(), "w".into())], None).expect("A_2")
}

/// `count` random graphs with 1..=`max_vertices` vertices and
/// 0..=`max_edges` edges, fully determined by `seed`.
pub fn random_corpus(count: usize, max_vertices: usize, max_edges: usize, seed: u64) -> Vec<(String, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let nv = rng.gen_range(1..=max_vertices);
            let ne = rng.gen_range(0..=max_edges);
            let graph_seed: u64 = rng.gen();
            (format!("random-{seed}-{i}"), Graph::random(nv, ne, graph_seed))
        })
        .collect()
}

/// The named graphs plus ten seeded random graphs with at most four vertices
/// and six edges.
pub fn standard_corpus() -> Vec<(String, Graph)> {
    let mut graphs = vec![
        ("rose-2".to_string(), rose(2)),
        ("rose-3".to_string(), rose(3)),
        ("fibonacci".to_string(), fibonacci()),
        ("cycle-2".to_string(), cycle(2)),
        ("A2".to_string(), line2()),
    ];
    graphs.extend(random_corpus(10, 4, 6, 20240601));
    graphs
}

/// Every labelled multigraph on exactly `n` vertices with at most
/// `max_edges` edges. Edge multisets are enumerated as nondecreasing
/// sequences of `(source, range)` pairs.
pub fn all_graphs(n: usize, max_edges: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |r| (s, r))).collect();
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn rec(pairs: &[(usize, usize)], n: usize, max: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<Graph>) {
        let chosen: Vec<(usize, usize)> = current.iter().map(|&i| pairs[i]).collect();
        out.push(Graph::from_pairs(n, &chosen));
        if current.len() == max {
            return;
        }
        for i in from..pairs.len() {
            current.push(i);
            rec(pairs, n, max, i, current, out);
            current.pop();
        }
    }
    rec(&pairs, n, max_edges, 0, &mut current, &mut out);
    out
}

/// `all_graphs` for every vertex count `1..=max_vertices`.
pub fn small_graphs(max_vertices: usize, max_edges: usize) -> Vec<Graph> {
    (1..=max_vertices).flat_map(|n| all_graphs(n, max_edges)).collect()
}

/// All subsets of `items`, smallest first within each bitmask order.
pub fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1u32 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph_counts() {
        // multisets of size ≤ 4 drawn from n² pairs
        assert_eq!(all_graphs(1, 4).len(), 5);
        assert_eq!(all_graphs(2, 4).len(), 70);
        assert_eq!(all_graphs(3, 4).len(), 1 + 9 + 45 + 165 + 495);
    }

    #[test]
    fn named_graphs() {
        assert_eq!(rose(3).adjacency_matrix().to_u64_rows(), vec![vec![3]]);
        assert_eq!(fibonacci().adjacency_matrix().to_u64_rows(), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(cycle(2).adjacency_matrix().to_u64_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(subsets(&[3, 5]), vec![vec![], vec![3], vec![5], vec![3, 5]]);
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(random_corpus(5, 4, 6, 42), random_corpus(5, 4, 6, 42));
        for (_, g) in random_corpus(20, 4, 6, 3) {
            assert!(g.vertex_count() <= 4 && g.edge_count() <= 6);
        }
    }
}
