//! Mean first passage time as a function of the reset probability, with the
//! walker resetting to its own start (`r = i`, `i != j`), and the search
//! for the optimum.
//!
//! Writing `q_l(g) = 1 - (1 - g) lambda_l`, the closed forms are
//!
//! ```text
//! C_ij(g) = sum_{l>=2} [<j|phi_l> - <i|phi_l>] <phibar_l|j> / q_l
//! S_ij(g) = sum_{l>=2} <i|phi_l> <phibar_l|j> / q_l
//! <T_ij(g)> = C_ij(g) / (P_j^inf + g S_ij(g))
//! ```
//!
//! together with the derivative sums (an extra `-lambda_l / q_l` factor per
//! term) and the second moment assembled from the resetting transient
//! moments. The coefficient of variation
//! `z = sqrt(<T^2> - <T>^2) / <T>` controls everything: an interior
//! optimum satisfies `z^2(g*) = 1 + 1/<T(g*)>`, and `z^2(0) > 1 + 1/<T(0)>`
//! is sufficient for one to exist.
//!
//! The optimizer itself is a 64-point log-spaced scan of the exact curve
//! followed by golden-section refinement of the best bracket; the
//! derivative sums serve as an independent stationarity check, not as the
//! search driver.

use crate::error::{Error, Result};
use crate::spectral::{SpectralDecomposition, WalkSpectrum};

const GRID_POINTS: usize = 64;
const GAMMA_EDGE: f64 = 1e-6;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Outcome of the sufficient-condition test for `gamma* > 0`.
#[derive(Debug, Clone, Copy)]
pub struct ExistenceTest {
    pub helps: bool,
    /// Signed margin `z^2(0) - 1 - 1/<T(0)>`.
    pub margin: f64,
}

/// Result of the scalar search for the optimal reset probability.
#[derive(Debug, Clone)]
pub struct OptimalGamma {
    pub gamma_star: f64,
    pub t_star: f64,
    /// `z^2(g*) - 1 - 1/<T(g*)>`; `None` for the boundary optimum `g* = 0`.
    pub condition_residual: Option<f64>,
    pub helps: bool,
    pub margin: f64,
    /// Reset probabilities of every grid-detected local minimum (the curve
    /// is not proven unimodal).
    pub grid_minima: Vec<f64>,
}

/// One sampled point of the `gamma` curve.
#[derive(Debug, Clone, Copy)]
pub struct GammaSample {
    pub gamma: f64,
    pub mfpt: f64,
    pub second_moment: f64,
    pub cv: f64,
}

/// Sampled curve for a source/target pair plus its minimizer record.
#[derive(Debug, Clone)]
pub struct GammaCurve {
    pub source: usize,
    pub target: usize,
    pub samples: Vec<GammaSample>,
    pub optimum: OptimalGamma,
}

struct Moments {
    mean: f64,
    second: f64,
}

/// One pass over the spectrum: numerator, overlap and the reset-walk
/// transient moments needed for the first two first-passage moments.
fn moments_at(dec: &SpectralDecomposition, i: usize, j: usize, gamma: f64) -> Moments {
    let n = dec.node_count();
    let lambda = dec.eigenvalues();
    let right = dec.right_vectors();
    let left = dec.left_vectors();
    let p_j = left[(0, j)];

    let mut contrast = 0.0; // C_ij
    let mut overlap = 0.0; // S_ij
    let mut r1_diff = 0.0; // R_jj^(1) - R_ij^(1) of the reset walk
    let mut r0_jj = 0.0; // R_jj^(0) of the reset walk
    for l in 1..n {
        let lam = lambda[l];
        let q = 1.0 - (1.0 - gamma) * lam;
        let zeta = (1.0 - gamma) * lam;
        let o_ij = right[(i, l)] * left[(l, j)];
        let o_jj = right[(j, l)] * left[(l, j)];
        contrast += (o_jj - o_ij) / q;
        overlap += o_ij / q;
        r1_diff += zeta * (o_jj - o_ij) / (q * q);
        let c_l = gamma * right[(i, l)] / q;
        r0_jj += (right[(j, l)] - c_l) * left[(l, j)] / q;
    }

    let p_inf = p_j + gamma * overlap;
    let mean = contrast / p_inf;
    let second = mean + 2.0 * r1_diff / p_inf + 2.0 * r0_jj * mean / p_inf;
    Moments { mean, second }
}

fn check_pair(dec: &SpectralDecomposition, i: usize, j: usize, gamma: f64) {
    assert!(i != j, "the reset optimizer is defined for i != j only");
    assert!(
        (0.0..1.0).contains(&gamma),
        "reset probability {gamma} outside [0, 1)"
    );
    assert!(i < dec.node_count() && j < dec.node_count());
}

/// `<T_ij(gamma)>` with the walker resetting to `i`.
pub fn mfpt_of_gamma(dec: &SpectralDecomposition, i: usize, j: usize, gamma: f64) -> f64 {
    check_pair(dec, i, j, gamma);
    moments_at(dec, i, j, gamma).mean
}

/// `<T^2_ij(gamma)>` with the walker resetting to `i`.
pub fn second_moment(dec: &SpectralDecomposition, i: usize, j: usize, gamma: f64) -> f64 {
    check_pair(dec, i, j, gamma);
    moments_at(dec, i, j, gamma).second
}

/// Coefficient of variation `z_ij(gamma)` of the first-passage time.
pub fn coefficient_of_variation(
    dec: &SpectralDecomposition,
    i: usize,
    j: usize,
    gamma: f64,
) -> f64 {
    check_pair(dec, i, j, gamma);
    let m = moments_at(dec, i, j, gamma);
    (m.second - m.mean * m.mean).max(0.0).sqrt() / m.mean
}

/// Sufficient condition for resetting to help: `z^2(0) > 1 + 1/<T(0)>`.
pub fn resetting_helps(dec: &SpectralDecomposition, i: usize, j: usize) -> ExistenceTest {
    let m = moments_at(dec, i, j, 0.0);
    let z2 = (m.second - m.mean * m.mean) / (m.mean * m.mean);
    let margin = z2 - 1.0 - 1.0 / m.mean;
    ExistenceTest { helps: margin > 0.0, margin }
}

/// Derivative-based optimality residual
/// `C'(g) [P_j + g S(g)] - C(g) [g S'(g) + S(g)]`; zero at a stationary
/// point of `<T_ij(gamma)>`. Kept separate from the search as a check.
pub fn stationarity_residual(dec: &SpectralDecomposition, i: usize, j: usize, gamma: f64) -> f64 {
    check_pair(dec, i, j, gamma);
    let n = dec.node_count();
    let lambda = dec.eigenvalues();
    let right = dec.right_vectors();
    let left = dec.left_vectors();
    let p_j = left[(0, j)];

    let mut contrast = 0.0;
    let mut overlap = 0.0;
    let mut contrast_d = 0.0;
    let mut overlap_d = 0.0;
    for l in 1..n {
        let lam = lambda[l];
        let q = 1.0 - (1.0 - gamma) * lam;
        let o_ij = right[(i, l)] * left[(l, j)];
        let o_jj = right[(j, l)] * left[(l, j)];
        contrast += (o_jj - o_ij) / q;
        overlap += o_ij / q;
        contrast_d -= lam * (o_jj - o_ij) / (q * q);
        overlap_d -= lam * o_ij / (q * q);
    }

    contrast_d * (p_j + gamma * overlap) - contrast * (gamma * overlap_d + overlap)
}

/// Locates the reset probability minimizing `<T_ij(gamma)>`.
///
/// When the sufficient condition fails the boundary optimum
/// `(0, <T(0)>)` is returned. Otherwise the exact curve is scanned on a
/// 64-point log-spaced grid and the best bracket is refined by golden
/// section until its width drops below `tol`.
pub fn find_optimal_gamma(
    dec: &SpectralDecomposition,
    i: usize,
    j: usize,
    tol: f64,
) -> OptimalGamma {
    let t0 = mfpt_of_gamma(dec, i, j, 0.0);
    let existence = resetting_helps(dec, i, j);
    if !existence.helps {
        return OptimalGamma {
            gamma_star: 0.0,
            t_star: t0,
            condition_residual: None,
            helps: false,
            margin: existence.margin,
            grid_minima: Vec::new(),
        };
    }

    // Near gamma = 1 the stationary mass of a distant target underflows the
    // cancellation noise of the closed form and the evaluation turns
    // garbage; the true curve diverges there, so treat such points as +inf.
    let eval = |g: f64| {
        let t = moments_at(dec, i, j, g).mean;
        if t.is_finite() && t > 0.0 {
            t
        } else {
            f64::INFINITY
        }
    };

    let lo = GAMMA_EDGE.ln();
    let hi = (1.0 - GAMMA_EDGE).ln();
    let mut gammas = Vec::with_capacity(GRID_POINTS + 1);
    gammas.push(0.0);
    for k in 0..GRID_POINTS {
        let x = lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64;
        gammas.push(x.exp());
    }
    let values: Vec<f64> = gammas.iter().map(|&g| eval(g)).collect();

    let grid_minima: Vec<f64> = (1..gammas.len() - 1)
        .filter(|&k| {
            values[k].is_finite() && values[k] <= values[k - 1] && values[k] <= values[k + 1]
        })
        .map(|k| gammas[k])
        .collect();

    let best = (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty grid");
    let mut a = if best == 0 { 0.0 } else { gammas[best - 1] };
    let mut b = if best + 1 < gammas.len() { gammas[best + 1] } else { 1.0 - GAMMA_EDGE };

    // Golden-section refinement.
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2);
        }
    }
    let gamma_star = 0.5 * (a + b);
    let m = moments_at(dec, i, j, gamma_star);
    let z2 = (m.second - m.mean * m.mean) / (m.mean * m.mean);
    let residual = z2 - 1.0 - 1.0 / m.mean;

    OptimalGamma {
        gamma_star,
        t_star: m.mean,
        condition_residual: Some(residual),
        helps: true,
        margin: existence.margin,
        grid_minima,
    }
}

/// Samples `(gamma, <T>, <T^2>, z)` on the given strictly increasing grid
/// and attaches the minimizer record.
pub fn gamma_curve(
    dec: &SpectralDecomposition,
    i: usize,
    j: usize,
    grid: &[f64],
) -> Result<GammaCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidReset("empty gamma grid".into()));
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidReset("gamma grid must be strictly increasing".into()));
        }
    }
    if grid[0] < 0.0 || *grid.last().unwrap() >= 1.0 {
        return Err(Error::InvalidReset("gamma grid must lie in [0, 1)".into()));
    }

    let samples = grid
        .iter()
        .map(|&gamma| {
            let m = moments_at(dec, i, j, gamma);
            GammaSample {
                gamma,
                mfpt: m.mean,
                second_moment: m.second,
                cv: (m.second - m.mean * m.mean).max(0.0).sqrt() / m.mean,
            }
        })
        .collect();
    let optimum = find_optimal_gamma(dec, i, j, 1e-9);
    Ok(GammaCurve { source: i, target: j, samples, optimum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics;
    use crate::hypergraph::{GeneralizedAdjacency, Hypergraph, TransitionMatrix};
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

    /// One size-6 hyperedge {0..5} sharing node 5 with a chain of four
    /// size-2 hyperedges down to node 9.
    fn lollipop() -> (GeneralizedAdjacency, TransitionMatrix, SpectralDecomposition) {
        decomposed(&[
            vec![0, 1, 2, 3, 4, 5],
            vec![5, 6],
            vec![6, 7],
            vec![7, 8],
            vec![8, 9],
        ])
    }

    #[test]
    fn k3_moments_and_existence() {
        let (adj, _, dec) = decomposed(&[vec![0, 1, 2]]);
        assert!((mfpt_of_gamma(&dec, 0, 1, 0.0) - analytics::mfpt(&dec, &adj, 0, 1)).abs() < 1e-12);
        assert!((mfpt_of_gamma(&dec, 0, 1, 0.0) - 2.0).abs() < 1e-12);
        assert!((second_moment(&dec, 0, 1, 0.0) - 6.0).abs() < 1e-12);
        let z = coefficient_of_variation(&dec, 0, 1, 0.0);
        assert!((z * z - 0.5).abs() < 1e-12);

        let ex = resetting_helps(&dec, 0, 1);
        assert!(!ex.helps);
        assert!((ex.margin + 1.0).abs() < 1e-12);

        let opt = find_optimal_gamma(&dec, 0, 1, 1e-9);
        assert_eq!(opt.gamma_star, 0.0);
        assert!((opt.t_star - 2.0).abs() < 1e-12);
        assert!(opt.condition_residual.is_none());
    }

    #[test]
    fn deterministic_single_step_pair_has_zero_cv() {
        let (_, _, dec) = decomposed(&[vec![0, 1]]);
        assert!((mfpt_of_gamma(&dec, 0, 1, 0.0) - 1.0).abs() < 1e-12);
        assert!((second_moment(&dec, 0, 1, 0.0) - 1.0).abs() < 1e-12);
        assert!(coefficient_of_variation(&dec, 0, 1, 0.0).abs() < 1e-7);
        assert!(!resetting_helps(&dec, 0, 1).helps);
    }

    #[test]
    fn mfpt_diverges_as_gamma_approaches_one() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2]]);
        let t0 = mfpt_of_gamma(&dec, 0, 1, 0.0);
        let mid = mfpt_of_gamma(&dec, 0, 1, 0.5);
        let high = mfpt_of_gamma(&dec, 0, 1, 0.999);
        assert!(high > mid);
        assert!(mfpt_of_gamma(&dec, 0, 1, 1.0 - 1e-6) > 1e3 * t0);
    }

    #[test]
    fn matches_reset_mfpt_identity_chain() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        for k in 0..30 {
            let gamma = k as f64 / 30.0;
            let rdec = reset_spectrum(&dec, ResetWalkSpec::new(0, gamma, 4).unwrap());
            let direct = analytics::reset_mfpt(&rdec, 0, 3);
            let diff = (mfpt_of_gamma(&dec, 0, 3, gamma) - direct).abs();
            assert!(diff < 1e-10 * direct.max(1.0), "gamma={gamma} diff={diff}");
        }
    }

    #[test]
    fn second_moment_matches_deconvolution_oracle() {
        let (_, w, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3]]);
        let gamma = 0.2;
        let pi = assemble_pi(&w, &ResetWalkSpec::new(0, gamma, 4).unwrap());
        let fp = analytics::first_passage_distribution(
            |a, b, t| crate::oracle::occupation_matrix_power(&pi, a, b, t),
            0,
            3,
            4_000,
        );
        assert!(fp.residual_mass < 1e-12);
        let t2 = second_moment(&dec, 0, 3, gamma);
        assert!((t2 - fp.second_moment()).abs() / fp.second_moment() < 1e-6);
        let t1 = mfpt_of_gamma(&dec, 0, 3, gamma);
        assert!((t1 - fp.mean()).abs() / fp.mean() < 1e-8);
    }

    #[test]
    fn second_moment_dominates_squared_mean() {
        let (_, _, dec) = decomposed(&[vec![0, 1, 2], vec![2, 3], vec![3, 4, 0]]);
        for k in 0..20 {
            let gamma = k as f64 * 0.045;
            let t = mfpt_of_gamma(&dec, 1, 4, gamma);
            let t2 = second_moment(&dec, 1, 4, gamma);
            assert!(t2 >= t * t - 1e-9, "gamma={gamma}");
        }
    }

    // Frozen from the first-passage deconvolution oracle on the lollipop:
    // from node 6 the walk toward 9 keeps falling into the clique, so the
    // passage time is heavy-tailed and resetting to 6 pays off.
    //   <T(0)> = 465, <T^2(0)> = 570085, margin = +0.634385478
    //   gamma* = 0.176299182, <T(gamma*)> = 46.553498245
    #[test]
    fn lollipop_chain_pair_has_interior_optimum() {
        let (_, _, dec) = lollipop();
        let t0 = mfpt_of_gamma(&dec, 6, 9, 0.0);
        assert!((t0 - 465.0).abs() < 1e-9);
        assert!((second_moment(&dec, 6, 9, 0.0) - 570_085.0).abs() < 1e-6);

        let ex = resetting_helps(&dec, 6, 9);
        assert!(ex.helps);
        assert!((ex.margin - 0.634_385_478).abs() < 1e-6);

        let opt = find_optimal_gamma(&dec, 6, 9, 1e-10);
        assert!((opt.gamma_star - 0.176_299_182).abs() < 1e-6);
        assert!((opt.t_star - 46.553_498_245).abs() < 1e-6);
        assert!(opt.t_star < t0);
        assert!(opt.condition_residual.unwrap().abs() < 1e-6);
        assert!(!opt.grid_minima.is_empty());

        // Local minimality and the derivative check.
        assert!(mfpt_of_gamma(&dec, 6, 9, opt.gamma_star - 1e-4) >= opt.t_star);
        assert!(mfpt_of_gamma(&dec, 6, 9, opt.gamma_star + 1e-4) >= opt.t_star);
        let scale = stationarity_residual(&dec, 6, 9, 0.0).abs();
        assert!(stationarity_residual(&dec, 6, 9, opt.gamma_star).abs() < 1e-6 * scale.max(1.0));
    }

    // Frozen from the same oracle: from the far chain end toward a clique
    // node the passage is nearly ballistic, z^2(0) = 0.4195 < 1 + 1/<T>,
    // so the optimum sits at the boundary.
    #[test]
    fn lollipop_far_end_pair_prefers_no_reset() {
        let (_, _, dec) = lollipop();
        let t0 = mfpt_of_gamma(&dec, 9, 0, 0.0);
        assert!((t0 - 323.0 / 15.0).abs() < 1e-9);

        let ex = resetting_helps(&dec, 9, 0);
        assert!(!ex.helps);
        assert!((ex.margin + 0.626_958_947).abs() < 1e-6);

        let opt = find_optimal_gamma(&dec, 9, 0, 1e-9);
        assert_eq!(opt.gamma_star, 0.0);
        assert!((opt.t_star - t0).abs() < 1e-12);
    }

    #[test]
    fn gamma_curve_samples_and_validation() {
        let (_, _, dec) = lollipop();
        let grid: Vec<f64> = (0..30).map(|k| k as f64 * 0.02).collect();
        let curve = gamma_curve(&dec, 6, 9, &grid).unwrap();
        assert_eq!(curve.samples.len(), 30);
        for s in &curve.samples {
            assert!(s.mfpt > 0.0);
            assert!(s.second_moment >= s.mfpt * s.mfpt - 1e-9);
            assert!(s.cv >= 0.0);
        }
        assert!(curve.optimum.helps);

        assert!(gamma_curve(&dec, 6, 9, &[]).is_err());
        assert!(gamma_curve(&dec, 6, 9, &[0.2, 0.1]).is_err());
        assert!(gamma_curve(&dec, 6, 9, &[0.5, 1.0]).is_err());
    }
}
