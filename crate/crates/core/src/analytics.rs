//! Closed-form walk observables plus two independent first-passage oracles.
//!
//! With the biorthonormal pairs of the transition matrix, every observable
//! is a finite spectral sum:
//!
//! ```text
//! P_ij(t)   = P_j^inf + sum_{l>=2} lambda_l^t <i|phi_l><phibar_l|j>
//! R_ij^(0)  = sum_{l>=2} <i|phi_l><phibar_l|j> / (1 - lambda_l)
//! R_ij^(1)  = sum_{l>=2} lambda_l <i|phi_l><phibar_l|j> / (1 - lambda_l)^2
//! <T_jj>    = N / d_j
//! <T_ij>    = (N / d_j) [R_jj^(0) - R_ij^(0)]        (i != j)
//! ```
//!
//! and identically for the resetting walk with `zeta`, `psi` in place of
//! `lambda`, `phi`. Two non-spectral routes are provided as oracles: the
//! time-domain deconvolution of the first-passage distribution from the
//! occupation series, and the fundamental-matrix linear solve
//! `(I - Q) x = 1`.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hypergraph::{GeneralizedAdjacency, Hypergraph};
use crate::oracle;
use crate::spectral::{ResetSpectralDecomposition, SpectralDecomposition, WalkSpectrum};

/// Probabilities this far below zero are treated as rounding noise and
/// clamped; anything lower trips a debug assertion.
const NEGATIVE_SLACK: f64 = 1e-10;

/// Longest horizon the deconvolution recursion will run; error grows like
/// `t * eps`, so longer horizons stop being trustworthy.
pub const FIRST_PASSAGE_T_CAP: usize = 10_000;

static CLAMPED_NEGATIVES: AtomicU64 = AtomicU64::new(0);

/// How many probability evaluations returned a tiny negative that was
/// clamped to zero (process-wide diagnostic).
pub fn clamped_negative_count() -> u64 {
    CLAMPED_NEGATIVES.load(Ordering::Relaxed)
}

fn clamp_probability(v: f64) -> f64 {
    if v < 0.0 {
        debug_assert!(v >= -NEGATIVE_SLACK, "probability {v} below the negative slack");
        CLAMPED_NEGATIVES.fetch_add(1, Ordering::Relaxed);
        0.0
    } else {
        v
    }
}

fn spectral_occupation(s: &impl WalkSpectrum, i: usize, j: usize, t: u32) -> f64 {
    let right = s.right_vectors();
    let left = s.left_vectors();
    let mut p = left[(0, j)];
    for l in 1..s.node_count() {
        p += s.eigenvalues()[l].powi(t as i32) * right[(i, l)] * left[(l, j)];
    }
    p
}

/// Moment of the relaxation to stationarity, `sum_t t^n (P_ij(t) - P_j^inf)`
/// in closed form; supports `order` 0 and 1.
fn relaxation_moment(s: &impl WalkSpectrum, i: usize, j: usize, order: u32) -> f64 {
    assert!(order <= 1, "only moments of order 0 and 1 have closed forms");
    let right = s.right_vectors();
    let left = s.left_vectors();
    let mut sum = 0.0;
    for l in 1..s.node_count() {
        let lambda = s.eigenvalues()[l];
        let overlap = right[(i, l)] * left[(l, j)];
        sum += match order {
            0 => overlap / (1.0 - lambda),
            _ => lambda * overlap / ((1.0 - lambda) * (1.0 - lambda)),
        };
    }
    sum
}

/// First-passage mean through the unified identity
/// `<T_ij> = [delta_ij + R_jj^(0) - R_ij^(0)] / P_j^inf`.
fn spectral_mfpt(s: &impl WalkSpectrum, i: usize, j: usize) -> f64 {
    let stationary_j = s.left_vectors()[(0, j)];
    if i == j {
        return 1.0 / stationary_j;
    }
    let right = s.right_vectors();
    let left = s.left_vectors();
    let mut diff = 0.0;
    for l in 1..s.node_count() {
        diff += (right[(j, l)] - right[(i, l)]) * left[(l, j)] / (1.0 - s.eigenvalues()[l]);
    }
    diff / stationary_j
}

/// Occupation probability `P_ij(t)` of the simple walk.
pub fn occupation_probability(dec: &SpectralDecomposition, i: usize, j: usize, t: u32) -> f64 {
    clamp_probability(spectral_occupation(dec, i, j, t))
}

/// Stationary distribution `d_j / N` as exact integer ratios.
pub fn stationary(h: &Hypergraph) -> Result<DVector<f64>> {
    if !h.is_connected() {
        return Err(Error::Connectivity {
            detail: format!("{} components", h.connected_components().len()),
        });
    }
    let adj = GeneralizedAdjacency::from_hypergraph(h);
    if adj.total_weight == 0 {
        return Err(Error::IsolatedNode { label: h.label(0).to_string() });
    }
    Ok(adj.stationary())
}

/// Transient moment `R_ij^(n)` of the simple walk, `n` in {0, 1}.
pub fn transient_moment(dec: &SpectralDecomposition, i: usize, j: usize, order: u32) -> f64 {
    relaxation_moment(dec, i, j, order)
}

/// Transient moment `R_ij^(n)(r, gamma)` of the resetting walk.
pub fn reset_transient_moment(
    rdec: &ResetSpectralDecomposition,
    i: usize,
    j: usize,
    order: u32,
) -> f64 {
    relaxation_moment(rdec, i, j, order)
}

/// Mean first passage time of the simple walk; the return time `N / d_j`
/// is an exact integer ratio.
pub fn mfpt(dec: &SpectralDecomposition, adj: &GeneralizedAdjacency, i: usize, j: usize) -> f64 {
    let kac = adj.total_weight as f64 / adj.hyperdegree[j] as f64;
    if i == j {
        kac
    } else {
        kac * (relaxation_moment(dec, j, j, 0) - relaxation_moment(dec, i, j, 0))
    }
}

/// Stationary probability of node `j` under resetting, `<psibar_1|j>`.
pub fn reset_stationary(rdec: &ResetSpectralDecomposition, j: usize) -> f64 {
    clamp_probability(rdec.left_vectors()[(0, j)])
}

/// The whole resetting stationary vector.
pub fn reset_stationary_vector(rdec: &ResetSpectralDecomposition) -> DVector<f64> {
    DVector::from_iterator(
        rdec.node_count(),
        (0..rdec.node_count()).map(|j| reset_stationary(rdec, j)),
    )
}

/// Occupation probability `P_ij(t; r, gamma)` of the resetting walk.
pub fn reset_occupation(rdec: &ResetSpectralDecomposition, i: usize, j: usize, t: u32) -> f64 {
    clamp_probability(spectral_occupation(rdec, i, j, t))
}

/// Mean first passage time of the resetting walk,
/// `<T_ij(r, gamma)> = [delta_ij + R_jj^(0) - R_ij^(0)] / P_j^inf(r, gamma)`.
pub fn reset_mfpt(rdec: &ResetSpectralDecomposition, i: usize, j: usize) -> f64 {
    spectral_mfpt(rdec, i, j)
}

/// First-passage distribution recovered by time-domain deconvolution.
#[derive(Debug, Clone)]
pub struct FirstPassage {
    /// `probabilities[t] = F_ij(t)`; entry 0 is always zero.
    pub probabilities: Vec<f64>,
    /// `1 - sum_t F_ij(t)`, the mass beyond the horizon.
    pub residual_mass: f64,
}

impl FirstPassage {
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(t, f)| t as f64 * f)
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(t, f)| (t * t) as f64 * f)
            .sum()
    }
}

/// Deconvolves `F_ij` from an occupation evaluator via
/// `P_ij(t) = delta_t0 delta_ij + sum_{t' <= t} P_jj(t - t') F_ij(t')`.
///
/// The evaluator is called as `p(a, b, t)`; pass a closure over
/// [`occupation_probability`] or [`reset_occupation`], or over matrix
/// powers for a fully independent oracle. `t_max` is clamped to
/// [`FIRST_PASSAGE_T_CAP`].
pub fn first_passage_distribution<P>(p: P, i: usize, j: usize, t_max: usize) -> FirstPassage
where
    P: Fn(usize, usize, u32) -> f64,
{
    let horizon = if t_max > FIRST_PASSAGE_T_CAP {
        log::warn!("first-passage horizon {t_max} clamped to {FIRST_PASSAGE_T_CAP}");
        FIRST_PASSAGE_T_CAP
    } else {
        t_max
    };

    let p_ij: Vec<f64> = (0..=horizon).map(|t| p(i, j, t as u32)).collect();
    let p_jj: Vec<f64> = (0..=horizon).map(|t| p(j, j, t as u32)).collect();

    let mut f = vec![0.0; horizon + 1];
    for t in 1..=horizon {
        let mut conv = 0.0;
        for u in 1..t {
            conv += p_jj[t - u] * f[u];
        }
        f[t] = clamp_probability(p_ij[t] - conv);
    }
    let residual_mass = 1.0 - f.iter().sum::<f64>();
    FirstPassage { probabilities: f, residual_mass }
}

/// Mean first passage times to `j` from every node by solving
/// `(I - Q) x = 1`, where `Q` drops row and column `j`; the return time
/// comes from power iteration as `1 / pi_j`. Fully independent of the
/// spectral pipeline.
pub fn mfpt_linear_solve(matrix: &DMatrix<f64>, j: usize) -> Result<DVector<f64>> {
    let n = matrix.nrows();
    let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let mut system = DMatrix::zeros(n - 1, n - 1);
    for (a, &ia) in others.iter().enumerate() {
        for (b, &ib) in others.iter().enumerate() {
            system[(a, b)] = f64::from(a == b) - matrix[(ia, ib)];
        }
    }
    let rhs = DVector::from_element(n - 1, 1.0);
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Connectivity { detail: "singular first-passage system".into() })?;

    let pi = oracle::stationary_power_iteration(matrix)?;
    let mut out = DVector::zeros(n);
    for (a, &ia) in others.iter().enumerate() {
        out[ia] = x[a];
    }
    out[j] = 1.0 / pi[j];
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::TransitionMatrix;
    use crate::spectral::{assemble_pi, reset_spectrum, ResetWalkSpec};

    fn decomposed(
        edges: &[Vec<usize>],
    ) -> (GeneralizedAdjacency, TransitionMatrix, SpectralDecomposition) {
        let h = Hypergraph::from_edges(edges).unwrap();
        let adj = GeneralizedAdjacency::from_hypergraph(&h);
        let w = TransitionMatrix::new(&h, &adj).unwrap();
        let dec = SpectralDecomposition::decompose(&w, &adj).unwrap();
        (adj, w, dec)
    }

    #[test]
    fn occupation_at_zero_is_kronecker() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        for i in 0..4 {
            for j in 0..4 {
                let p = occupation_probability(&dec, i, j, 0);
                let expected = f64::from(i == j);
                assert!((p - expected).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn occupation_single_step_and_limit() {
        let (adj, _, dec) = decomposed(&[vec![0, 1, 2]]);
        assert!((occupation_probability(&dec, 0, 1, 1) - 0.5).abs() < 1e-12);
        for j in 0..3 {
            let limit = occupation_probability(&dec, 0, j, 200);
            assert!((limit - adj.stationary()[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn occupation_rows_are_distributions() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3], vec![3, 4, 0]]);
        for t in 0..=50u32 {
            for i in 0..5 {
                let row: f64 = (0..5).map(|j| occupation_probability(&dec, i, j, t)).sum();
                assert!((row - 1.0).abs() < 1e-10, "t={t} i={i}");
            }
        }
    }

    #[test]
    fn detailed_balance_without_resetting() {
        let (adj, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        for t in 0..=10u32 {
            for i in 0..4 {
                for j in 0..4 {
                    let lhs = adj.hyperdegree[i] as f64 * occupation_probability(&dec, i, j, t);
                    let rhs = adj.hyperdegree[j] as f64 * occupation_probability(&dec, j, i, t);
                    assert!((lhs - rhs).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn stationary_fixtures() {
        let h = Hypergraph::from_edges(&[vec![0, 1, 2]]).unwrap();
        let s = stationary(&h).unwrap();
        for j in 0..3 {
            assert_eq!(s[j], 1.0 / 3.0);
        }

        let h4 = Hypergraph::from_edges(&[vec![0, 1, 2], vec![2, 3]]).unwrap();
        let s4 = stationary(&h4).unwrap();
        assert_eq!(s4.as_slice(), &[4.0 / 14.0, 4.0 / 14.0, 5.0 / 14.0, 1.0 / 14.0]);

        let split = Hypergraph::from_edges(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(stationary(&split), Err(Error::Connectivity { .. })));
    }

    #[test]
    fn two_node_transient_moment_is_one_quarter() {
        // lambda_2 = -1: the closed form stays finite with denominator 2.
        let (_, _, dec) = decomposed(&[vec![0, 1]]);
        assert!((transient_moment(&dec, 0, 0, 0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn transient_moment_matches_truncated_series() {
        let (adj, w, dec) = decomposed(&[vec![0, 1, 2]]);
        // |lambda_2| = 1/2, so a plain truncated sum converges fast.
        for i in 0..3 {
            for j in 0..3 {
                let mut partial = 0.0;
                let mut row = DVector::<f64>::zeros(3);
                row[i] = 1.0;
                for _t in 0..=200 {
                    partial += row[j] - adj.stationary()[j];
                    row = w.matrix().transpose() * row;
                }
                assert!((transient_moment(&dec, i, j, 0) - partial).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn mfpt_fixtures() {
        let (adj, _, dec) = decomposed(&[vec![0, 1, 2]]);
        for j in 0..3 {
            assert_eq!(mfpt(&dec, &adj, j, j), 3.0);
        }
        assert!((mfpt(&dec, &adj, 0, 1) - 2.0).abs() < 1e-12);

        let (adj4, _, dec4) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        assert_eq!(mfpt(&dec4, &adj4, 3, 3), 14.0);
    }

    #[test]
    fn reset_stationary_fixtures() {
        let (adj, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        let zero = reset_spectrum(&dec, ResetWalkSpec::new(2, 0.0, 4).unwrap());
        for j in 0..4 {
            assert!((reset_stationary(&zero, j) - adj.stationary()[j]).abs() < 1e-14);
        }

        let (_, _, dec3) = decomposed(&[vec![0, 1, 2]]);
        let r = reset_spectrum(&dec3, ResetWalkSpec::new(0, 0.2, 3).unwrap());
        let expected = [3.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0];
        for j in 0..3 {
            assert!((reset_stationary(&r, j) - expected[j]).abs() < 1e-12);
        }
        let total: f64 = reset_stationary_vector(&r).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reset_stationary_matches_power_iteration() {
        let (_, w, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3], vec![3, 4, 0]]);
        let spec = ResetWalkSpec::new(3, 0.37, 5).unwrap();
        let rdec = reset_spectrum(&dec, spec);
        let pi = assemble_pi(&w, &spec);
        let brute = oracle::stationary_power_iteration(&pi).unwrap();
        for j in 0..5 {
            assert!((reset_stationary(&rdec, j) - brute[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn reset_occupation_matches_matrix_powers() {
        let (_, w, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        let spec = ResetWalkSpec::new(1, 0.25, 4).unwrap();
        let rdec = reset_spectrum(&dec, spec);
        let pi = assemble_pi(&w, &spec);
        for t in 0..=10u32 {
            for i in 0..4 {
                for j in 0..4 {
                    let brute = oracle::occupation_matrix_power(&pi, i, j, t);
                    let spectral = reset_occupation(&rdec, i, j, t);
                    assert!((brute - spectral).abs() < 1e-10, "t={t} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn reset_mfpt_reduces_and_satisfies_kac() {
        let (adj, w, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        let zero = reset_spectrum(&dec, ResetWalkSpec::new(0, 0.0, 4).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                assert!((reset_mfpt(&zero, i, j) - mfpt(&dec, &adj, i, j)).abs() < 1e-12);
            }
        }

        let spec = ResetWalkSpec::new(2, 0.3, 4).unwrap();
        let rdec = reset_spectrum(&dec, spec);
        for j in 0..4 {
            let kac = reset_mfpt(&rdec, j, j) * reset_stationary(&rdec, j);
            assert!((kac - 1.0).abs() < 1e-10);
        }

        let pi = assemble_pi(&w, &spec);
        for j in 0..4 {
            let brute = mfpt_linear_solve(&pi, j).unwrap();
            for i in 0..4 {
                assert!((brute[i] - reset_mfpt(&rdec, i, j)).abs() < 1e-8, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn first_passage_geometric_law() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2]]);
        let fp = first_passage_distribution(
            |a, b, t| occupation_probability(&dec, a, b, t),
            0,
            1,
            64,
        );
        assert_eq!(fp.probabilities[0], 0.0);
        for t in 1..=12 {
            assert!((fp.probabilities[t] - 0.5f64.powi(t as i32)).abs() < 1e-12, "t={t}");
        }
        assert!((fp.mean() - 2.0).abs() < 1e-8);
        assert!(fp.residual_mass.abs() < 1e-9);
    }

    #[test]
    fn first_return_has_no_single_step_mass() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        let fp = first_passage_distribution(
            |a, b, t| occupation_probability(&dec, a, b, t),
            2,
            2,
            128,
        );
        assert!(fp.probabilities[1].abs() < 1e-12);
    }

    #[test]
    fn first_passage_mean_converges_to_mfpt() {
        let (adj, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        let fp = first_passage_distribution(
            |a, b, t| occupation_probability(&dec, a, b, t),
            0,
            3,
            2_000,
        );
        assert!(fp.residual_mass < 1e-9);
        assert!((fp.mean() - mfpt(&dec, &adj, 0, 3)).abs() < 1e-6);
    }

    #[test]
    fn linear_solve_fixtures() {
        let (_, w, dec) = decomposed(&[vec![0, 1, 2]]);
        let t = mfpt_linear_solve(w.matrix(), 2).unwrap();
        assert!((t[0] - 2.0).abs() < 1e-10);
        assert!((t[1] - 2.0).abs() < 1e-10);
        assert!((t[2] - 3.0).abs() < 1e-10);

        let (adj4, w4, dec4) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        for j in 0..4 {
            let brute = mfpt_linear_solve(w4.matrix(), j).unwrap();
            for i in 0..4 {
                assert!((brute[i] - mfpt(&dec4, &adj4, i, j)).abs() < 1e-10);
            }
        }
        let _ = dec;
    }
}
