//! Stationary-distribution node ranking: native hypergraph walk versus the
//! simple walk on the clique expansion.
//!
//! The hypergraph walk ranks node `i` by `P_i^inf = d_i / N` and the clique
//! walk by `Q_i^inf = k_i / sum k`, so both rankings reduce to sorting
//! integer degree vectors; the spectral route is only used as a
//! cross-check. Both columns are also reported normalized by their maxima,
//! which is what the scatter comparison plots, and the agreement between
//! the two rank orders is summarized by Kendall's tau (tau-b, since
//! competition ranking produces ties).

use crate::error::{Error, Result};
use crate::hypergraph::{GeneralizedAdjacency, Hypergraph};

/// One node of a single ranking, in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub label: String,
    pub stationary: f64,
}

/// Per-node record of the side-by-side comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeComparison {
    pub label: String,
    /// `P_i^inf`, hypergraph walk.
    pub hyper_stationary: f64,
    /// `Q_i^inf`, clique-graph walk.
    pub clique_stationary: f64,
    /// `P_i^inf / max_j P_j^inf`.
    pub hyper_normalized: f64,
    /// `Q_i^inf / max_j Q_j^inf`.
    pub clique_normalized: f64,
    /// Competition rank under the hypergraph walk (1 = largest).
    pub hyper_rank: usize,
    /// Competition rank under the clique walk.
    pub clique_rank: usize,
}

/// Full comparison report.
#[derive(Debug, Clone)]
pub struct RankingReport {
    /// Rows sorted by descending hypergraph stationary probability, ties by
    /// label.
    pub rows: Vec<NodeComparison>,
    /// Kendall tau-b between the two rank orders.
    pub kendall_tau: f64,
}

fn require_connected(h: &Hypergraph) -> Result<()> {
    if !h.is_connected() {
        return Err(Error::Connectivity {
            detail: format!("{} components", h.connected_components().len()),
        });
    }
    Ok(())
}

/// Output order: descending value, then label, with exact integer keys so
/// ties are detected without float comparisons.
fn ranked_entries(h: &Hypergraph, keys: &[i64]) -> Vec<(usize, f64)> {
    let total: i64 = keys.iter().sum();
    let mut order: Vec<usize> = (0..h.node_count()).collect();
    order.sort_by(|&a, &b| keys[b].cmp(&keys[a]).then_with(|| h.label(a).cmp(h.label(b))));
    order
        .into_iter()
        .map(|i| (i, keys[i] as f64 / total as f64))
        .collect()
}

/// Competition ranking: 1 plus the number of strictly larger keys.
fn competition_ranks(keys: &[i64]) -> Vec<usize> {
    keys.iter()
        .map(|&k| 1 + keys.iter().filter(|&&other| other > k).count())
        .collect()
}

/// Kendall tau-b between two integer key vectors paired by node.
///
/// If every pair is tied in one of the columns, tau-b is undefined; this
/// returns 1.0 when the induced rank vectors coincide and 0.0 otherwise.
fn kendall_tau_b(x: &[i64], y: &[i64]) -> f64 {
    let n = x.len();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut tied_x = 0i64;
    let mut tied_y = 0i64;
    let mut pairs = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            pairs += 1;
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0 {
                tied_x += 1;
            }
            if dy == 0 {
                tied_y += 1;
            }
            if dx != 0 && dy != 0 {
                if (dx > 0) == (dy > 0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let denom = ((pairs - tied_x) as f64 * (pairs - tied_y) as f64).sqrt();
    if denom == 0.0 {
        let same = competition_ranks(x) == competition_ranks(y);
        return if same { 1.0 } else { 0.0 };
    }
    (concordant - discordant) as f64 / denom
}

/// Nodes ranked by the hypergraph stationary distribution `d_i / N`.
pub fn rank_hypergraph(h: &Hypergraph) -> Result<Vec<RankEntry>> {
    require_connected(h)?;
    let adj = GeneralizedAdjacency::from_hypergraph(h);
    if adj.total_weight == 0 {
        return Err(Error::IsolatedNode { label: h.label(0).to_string() });
    }
    Ok(ranked_entries(h, adj.hyperdegree.as_slice())
        .into_iter()
        .map(|(i, v)| RankEntry { label: h.label(i).to_string(), stationary: v })
        .collect())
}

/// Nodes ranked by the clique-graph stationary distribution `k_i / sum k`.
pub fn rank_clique(h: &Hypergraph) -> Result<Vec<RankEntry>> {
    require_connected(h)?;
    let clique = h.clique_expansion();
    if clique.degrees.iter().all(|&k| k == 0) {
        return Err(Error::IsolatedNode { label: h.label(0).to_string() });
    }
    Ok(ranked_entries(h, clique.degrees.as_slice())
        .into_iter()
        .map(|(i, v)| RankEntry { label: h.label(i).to_string(), stationary: v })
        .collect())
}

/// Side-by-side ranking report with normalized columns and Kendall tau.
pub fn compare_rankings(h: &Hypergraph) -> Result<RankingReport> {
    require_connected(h)?;
    let adj = GeneralizedAdjacency::from_hypergraph(h);
    let clique = h.clique_expansion();
    if adj.total_weight == 0 {
        return Err(Error::IsolatedNode { label: h.label(0).to_string() });
    }

    let d = adj.hyperdegree.as_slice();
    let k = clique.degrees.as_slice();
    let d_total = adj.total_weight as f64;
    let k_total = clique.degrees.sum() as f64;
    let d_max = *d.iter().max().unwrap() as f64;
    let k_max = *k.iter().max().unwrap() as f64;
    let rank_p = competition_ranks(d);
    let rank_q = competition_ranks(k);

    let mut order: Vec<usize> = (0..h.node_count()).collect();
    order.sort_by(|&a, &b| d[b].cmp(&d[a]).then_with(|| h.label(a).cmp(h.label(b))));

    let rows = order
        .into_iter()
        .map(|i| NodeComparison {
            label: h.label(i).to_string(),
            hyper_stationary: d[i] as f64 / d_total,
            clique_stationary: k[i] as f64 / k_total,
            hyper_normalized: d[i] as f64 / d_max,
            clique_normalized: k[i] as f64 / k_max,
            hyper_rank: rank_p[i],
            clique_rank: rank_q[i],
        })
        .collect();

    Ok(RankingReport { rows, kendall_tau: kendall_tau_b(d, k) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SpectralDecomposition, WalkSpectrum};

    fn four_node() -> Hypergraph {
        Hypergraph::from_edges(&[vec![0, 1, 2], vec![2, 3]]).unwrap()
    }

    #[test]
    fn hypergraph_ranking_order_and_values() {
        let ranking = rank_hypergraph(&four_node()).unwrap();
        let labels: Vec<&str> = ranking.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["2", "0", "1", "3"]);
        assert_eq!(ranking[0].stationary, 5.0 / 14.0);
        assert_eq!(ranking[1].stationary, 4.0 / 14.0);
        assert_eq!(ranking[3].stationary, 1.0 / 14.0);
    }

    #[test]
    fn single_hyperedge_is_uniform() {
        let h = Hypergraph::from_edges(&[vec![0, 1, 2]]).unwrap();
        for e in rank_hypergraph(&h).unwrap() {
            assert_eq!(e.stationary, 1.0 / 3.0);
        }
        for e in rank_clique(&h).unwrap() {
            assert_eq!(e.stationary, 1.0 / 3.0);
        }
    }

    #[test]
    fn clique_ranking_values() {
        let ranking = rank_clique(&four_node()).unwrap();
        let labels: Vec<&str> = ranking.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["2", "0", "1", "3"]);
        assert_eq!(ranking[0].stationary, 3.0 / 8.0);
        assert_eq!(ranking[3].stationary, 1.0 / 8.0);
    }

    #[test]
    fn duplicate_hyperedges_shift_hypergraph_ranking_only() {
        let plain = Hypergraph::from_edges(&[vec![0, 1], vec![1, 2]]).unwrap();
        let doubled = Hypergraph::from_edges(&[vec![0, 1], vec![1, 2], vec![0, 1]]).unwrap();

        let p_plain = rank_hypergraph(&plain).unwrap();
        let p_doubled = rank_hypergraph(&doubled).unwrap();
        assert_ne!(
            p_plain.iter().map(|e| e.stationary).collect::<Vec<_>>(),
            p_doubled.iter().map(|e| e.stationary).collect::<Vec<_>>()
        );

        let q_plain = rank_clique(&plain).unwrap();
        let q_doubled = rank_clique(&doubled).unwrap();
        assert_eq!(q_plain, q_doubled);
    }

    #[test]
    fn ranking_agrees_with_spectral_stationary() {
        let h = four_node();
        let dec = SpectralDecomposition::from_hypergraph(&h).unwrap();
        let stationary = dec.stationary();
        for entry in rank_hypergraph(&h).unwrap() {
            let i = h.index_of(&entry.label).unwrap();
            assert!((entry.stationary - stationary[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_report_fixture() {
        let report = compare_rankings(&four_node()).unwrap();
        assert_eq!(report.kendall_tau, 1.0);

        let node3 = report.rows.iter().find(|r| r.label == "3").unwrap();
        assert_eq!(node3.hyper_normalized, 0.2);
        assert!((node3.clique_normalized - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(node3.hyper_rank, 4);

        let tied: Vec<&NodeComparison> =
            report.rows.iter().filter(|r| r.label == "0" || r.label == "1").collect();
        assert_eq!(tied[0].hyper_rank, 2);
        assert_eq!(tied[1].hyper_rank, 2);

        let max_p = report.rows.iter().map(|r| r.hyper_normalized).fold(0.0, f64::max);
        let max_q = report.rows.iter().map(|r| r.clique_normalized).fold(0.0, f64::max);
        assert_eq!(max_p, 1.0);
        assert_eq!(max_q, 1.0);
    }

    #[test]
    fn graph_degenerate_rankings_coincide() {
        let h = Hypergraph::from_edges(&[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0], vec![0, 2]])
            .unwrap();
        let p = rank_hypergraph(&h).unwrap();
        let q = rank_clique(&h).unwrap();
        assert_eq!(p, q);
        let report = compare_rankings(&h).unwrap();
        assert_eq!(report.kendall_tau, 1.0);
        for row in &report.rows {
            assert_eq!(row.hyper_rank, row.clique_rank);
        }
    }

    #[test]
    fn all_tied_but_identical_is_perfect_agreement() {
        // Triangle of pairwise edges: every node tied in both columns.
        let h = Hypergraph::from_edges(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(compare_rankings(&h).unwrap().kendall_tau, 1.0);
    }

    #[test]
    fn disconnected_is_rejected() {
        let h = Hypergraph::from_edges(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(rank_hypergraph(&h), Err(Error::Connectivity { .. })));
        assert!(matches!(compare_rankings(&h), Err(Error::Connectivity { .. })));
    }
}
