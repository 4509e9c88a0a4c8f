//! Native hypergraph representation and every matrix derived from it.
//!
//! A hypergraph is a set of labelled nodes plus a multiset of hyperedges,
//! each a non-empty set of nodes. Duplicate hyperedge lines are retained as
//! distinct hyperedges: the generalized adjacency sums over hyperedge
//! instances, so multiplicity changes the walk. Size-1 hyperedges are legal
//! input; they contribute nothing to the walk and are reported via
//! [`Hypergraph::unit_hyperedge_count`].

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A node-labelled hypergraph. Internal node indices are dense, 0-based and
/// assigned in first-appearance order of the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Each hyperedge holds distinct node indices, sorted ascending.
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph from labelled hyperedges, assigning indices in
    /// first-appearance order.
    pub fn new<I, E, S>(labeled_edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();

        for edge in labeled_edges {
            let mut members: Vec<usize> = Vec::new();
            for label in edge {
                let label = label.into();
                let id = *index.entry(label.clone()).or_insert_with(|| {
                    labels.push(label);
                    labels.len() - 1
                });
                if members.contains(&id) {
                    return Err(Error::InvalidHyperedge(format!(
                        "duplicate node `{}` in hyperedge {}",
                        labels[id],
                        edges.len() + 1
                    )));
                }
                members.push(id);
            }
            if members.is_empty() {
                return Err(Error::InvalidHyperedge(format!(
                    "hyperedge {} is empty",
                    edges.len() + 1
                )));
            }
            members.sort_unstable();
            edges.push(members);
        }

        if edges.is_empty() {
            return Err(Error::NoHyperedges);
        }
        Ok(Self { labels, index, edges })
    }

    /// Builds a hypergraph over nodes `0..n` from index-based hyperedges;
    /// node `i` is labelled `"i"`. The indices must cover `0..n` with no gap.
    pub fn from_edges(edges: &[Vec<usize>]) -> Result<Self> {
        let n = edges.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; n];
        for e in edges {
            for &v in e {
                seen[v] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidHyperedge(format!(
                "node index {missing} appears in no hyperedge"
            )));
        }
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut sorted = Vec::with_capacity(edges.len());
        for (pos, e) in edges.iter().enumerate() {
            let mut members = e.clone();
            members.sort_unstable();
            members.dedup();
            if members.len() != e.len() {
                return Err(Error::InvalidHyperedge(format!(
                    "duplicate node in hyperedge {}",
                    pos + 1
                )));
            }
            if members.is_empty() {
                return Err(Error::InvalidHyperedge(format!("hyperedge {} is empty", pos + 1)));
            }
            sorted.push(members);
        }
        if sorted.is_empty() {
            return Err(Error::NoHyperedges);
        }
        Ok(Self { labels, index, edges: sorted })
    }

    /// Parses the hyperedge-list format: one hyperedge per line, labels
    /// separated by ASCII whitespace, lines beginning with `#` and blank
    /// lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();

        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let mut members: Vec<usize> = Vec::with_capacity(tokens.len());
            for token in tokens {
                let id = *index.entry(token.to_string()).or_insert_with(|| {
                    labels.push(token.to_string());
                    labels.len() - 1
                });
                if members.contains(&id) {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("duplicate label `{token}` in hyperedge"),
                    });
                }
                members.push(id);
            }
            members.sort_unstable();
            edges.push(members);
        }

        if edges.is_empty() {
            return Err(Error::NoHyperedges);
        }
        Ok(Self { labels, index, edges })
    }

    /// Serializes back to the hyperedge-list format. Members are written in
    /// index order, which preserves the first-appearance assignment on
    /// re-parse.
    pub fn to_hyperedge_list(&self) -> String {
        let mut out = String::new();
        for edge in &self.edges {
            let mut first = true;
            for &v in edge {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{}", self.labels[v]);
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn hyperedge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Number of size-1 hyperedges; these contribute nothing to the walk.
    pub fn unit_hyperedge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.len() == 1).count()
    }

    /// The n-by-m incidence matrix `e`, with `e[(i, a)] = 1` iff node `i`
    /// belongs to hyperedge `a`.
    pub fn incidence(&self) -> DMatrix<i64> {
        let mut e = DMatrix::zeros(self.node_count(), self.hyperedge_count());
        for (a, edge) in self.edges.iter().enumerate() {
            for &i in edge {
                e[(i, a)] = 1;
            }
        }
        e
    }

    /// The adjacency matrix `A = e e^T`; `A[(i, j)]` counts the hyperedges
    /// containing both `i` and `j` (the diagonal counts memberships).
    pub fn pairwise_adjacency(&self) -> DMatrix<i64> {
        let n = self.node_count();
        let mut a = DMatrix::zeros(n, n);
        for edge in &self.edges {
            for &i in edge {
                for &j in edge {
                    a[(i, j)] += 1;
                }
            }
        }
        a
    }

    /// The hyperedge matrix `C = e^T e`; `C[(a, b)] = |E_a ∩ E_b|`, so the
    /// diagonal holds hyperedge sizes.
    pub fn hyperedge_matrix(&self) -> DMatrix<i64> {
        let m = self.hyperedge_count();
        let mut memberships: Vec<Vec<usize>> = vec![Vec::new(); self.node_count()];
        for (a, edge) in self.edges.iter().enumerate() {
            for &i in edge {
                memberships[i].push(a);
            }
        }
        let mut c = DMatrix::zeros(m, m);
        for edges_of_node in &memberships {
            for &a in edges_of_node {
                for &b in edges_of_node {
                    c[(a, b)] += 1;
                }
            }
        }
        c
    }

    /// The two-section (clique) expansion: a simple unweighted graph where
    /// `i ~ j` iff some hyperedge contains both. Multiplicities collapse.
    pub fn clique_expansion(&self) -> CliqueGraph {
        let n = self.node_count();
        let mut adjacency = DMatrix::zeros(n, n);
        for edge in &self.edges {
            for &i in edge {
                for &j in edge {
                    if i != j {
                        adjacency[(i, j)] = 1;
                    }
                }
            }
        }
        let degrees = DVector::from_iterator(n, adjacency.row_iter().map(|r| r.sum()));
        CliqueGraph { adjacency, degrees }
    }

    /// Connected components over nodes, where a hyperedge connects all of
    /// its members. Each component is an ascending list of node indices;
    /// components are ordered by their smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for edge in &self.edges {
            let root = find(&mut parent, edge[0]);
            for &v in &edge[1..] {
                let r = find(&mut parent, v);
                parent[r] = root;
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut components: Vec<Vec<usize>> = groups.into_values().collect();
        components.sort_by_key(|c| c[0]);
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// The sub-hypergraph induced on the largest connected component,
    /// keeping every hyperedge of that component. Ties between equal-size
    /// components go to the one containing the smallest original index.
    /// Labels are preserved; indices are compacted preserving their order.
    pub fn largest_connected_component(&self) -> Hypergraph {
        let components = self.connected_components();
        let largest = components
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
            .expect("a hypergraph has at least one node");

        let mut keep = vec![false; self.node_count()];
        for &v in largest {
            keep[v] = true;
        }
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in largest.iter().enumerate() {
            remap[old] = new;
        }

        let labels: Vec<String> = largest.iter().map(|&v| self.labels[v].clone()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        // A hyperedge connects all its members, so it lies inside one
        // component; testing the first member suffices.
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e[0]])
            .map(|e| e.iter().map(|&v| remap[v]).collect())
            .collect();

        Hypergraph { labels, index, edges }
    }
}

/// Simple unweighted graph obtained from the two-section expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueGraph {
    /// Symmetric 0/1 adjacency with zero diagonal.
    pub adjacency: DMatrix<i64>,
    /// Row sums of the adjacency.
    pub degrees: DVector<i64>,
}

impl CliqueGraph {
    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    /// The simple-random-walk transition matrix `A_ij / k_i`.
    pub fn srw_transition(&self) -> Result<TransitionMatrix> {
        let n = self.node_count();
        if let Some(i) = (0..n).find(|&i| self.degrees[i] == 0) {
            return Err(Error::IsolatedNode { label: i.to_string() });
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            self.adjacency[(i, j)] as f64 / self.degrees[i] as f64
        });
        Ok(TransitionMatrix { matrix })
    }
}

/// The generalized adjacency `K` with hyperdegrees `d` and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedAdjacency {
    /// `K[(i, j)] = sum over hyperedges a of (|E_a| - 1) e_ia e_ja`, zero
    /// diagonal, symmetric.
    pub k: DMatrix<i64>,
    /// Hyperdegrees `d_i = sum_{l != i} K_il`.
    pub hyperdegree: DVector<i64>,
    /// `N = sum_i d_i` (always even).
    pub total_weight: i64,
}

impl GeneralizedAdjacency {
    pub fn from_hypergraph(h: &Hypergraph) -> Self {
        let n = h.node_count();
        let mut k: DMatrix<i64> = DMatrix::zeros(n, n);
        for edge in h.hyperedges() {
            let weight = edge.len() as i64 - 1;
            if weight == 0 {
                continue;
            }
            for &i in edge {
                for &j in edge {
                    if i != j {
                        k[(i, j)] += weight;
                    }
                }
            }
        }
        let unit = h.unit_hyperedge_count();
        if unit > 0 {
            log::warn!("{unit} size-1 hyperedge(s) contribute nothing to the walk");
        }
        let hyperdegree = DVector::from_iterator(n, k.row_iter().map(|r| r.sum()));
        let total_weight = hyperdegree.sum();
        Self { k, hyperdegree, total_weight }
    }

    /// The exact stationary distribution `d_j / N`.
    pub fn stationary(&self) -> DVector<f64> {
        self.hyperdegree
            .map(|d| d as f64 / self.total_weight as f64)
    }
}

/// Row-stochastic transition matrix `W_ij = K_ij / d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    matrix: DMatrix<f64>,
}

impl TransitionMatrix {
    /// Builds `W` from a hypergraph and its generalized adjacency. Fails
    /// with [`Error::IsolatedNode`] if any node has hyperdegree zero.
    pub fn new(h: &Hypergraph, adj: &GeneralizedAdjacency) -> Result<Self> {
        let n = h.node_count();
        if let Some(i) = (0..n).find(|&i| adj.hyperdegree[i] == 0) {
            return Err(Error::IsolatedNode { label: h.label(i).to_string() });
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            adj.k[(i, j)] as f64 / adj.hyperdegree[i] as f64
        });
        Ok(Self { matrix })
    }

    pub fn from_hypergraph(h: &Hypergraph) -> Result<Self> {
        Self::new(h, &GeneralizedAdjacency::from_hypergraph(h))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn node_count(&self) -> usize {
        self.matrix.nrows()
    }

    /// Wraps an externally assembled row-stochastic matrix (used for the
    /// clique-graph walk and in tests).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }
}
