//! Biorthonormal eigen-systems of the walk and of the resetting walk.
//!
//! `W = D^{-1} K` is similar to the symmetric matrix
//! `S = D^{-1/2} K D^{-1/2}`, so its spectrum is real and an orthonormal
//! eigenbasis `u_l` of `S` yields exactly biorthonormal pairs
//! `|phi_l> = D^{-1/2} u_l`, `<phibar_l| = u_l^T D^{1/2}`, stable even for
//! degenerate eigenvalues. The leading pair is normalized so that
//! `|phi_1>` is the all-ones vector and `<phibar_1| = d / N` is the
//! stationary distribution.
//!
//! The resetting walk `Pi(r, gamma) = (1 - gamma) W + gamma Theta(r)` is
//! never re-diagonalized: its eigenvalues are `zeta_1 = 1` and
//! `zeta_l = (1 - gamma) lambda_l`, and its eigenvectors are closed-form
//! combinations of the base pairs,
//!
//! ```text
//! |psi_l>    = |phi_l> - c_l |phi_1>          (l >= 2)
//! <psibar_1| = <phibar_1| + sum_m c_m <phibar_m|
//! <psibar_l| = <phibar_l|                     (l >= 2)
//! c_l        = gamma <r|phi_l> / (1 - (1 - gamma) lambda_l)
//! ```
//!
//! The change of basis from `phi` to `psi` is unit upper triangular, so the
//! reset system is independent whenever the base system is; no extra
//! diagnostics are needed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hypergraph::{GeneralizedAdjacency, TransitionMatrix};

/// Tolerance below which `1 - lambda_2` flags a disconnected hypergraph.
const CONNECTIVITY_TOL: f64 = 1e-12;
/// Maximum allowed `max`-norm error when reconstructing `W` from the pairs.
const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Shared read-only view of a biorthonormal eigen-system: eigenvalues with
/// the Perron mode first, right vectors as columns, left vectors as rows.
pub trait WalkSpectrum {
    fn node_count(&self) -> usize;
    fn eigenvalues(&self) -> &DVector<f64>;
    /// Column `l` is the right eigenvector for eigenvalue `l`.
    fn right_vectors(&self) -> &DMatrix<f64>;
    /// Row `l` is the left eigenvector for eigenvalue `l`.
    fn left_vectors(&self) -> &DMatrix<f64>;

    /// The stationary distribution, i.e. the leading left eigenvector.
    fn stationary(&self) -> DVector<f64> {
        self.left_vectors().row(0).transpose()
    }
}

/// Eigen-system of the transition matrix `W`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    right: DMatrix<f64>,
    left: DMatrix<f64>,
}

impl WalkSpectrum for SpectralDecomposition {
    fn node_count(&self) -> usize {
        self.eigenvalues.len()
    }
    fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }
    fn right_vectors(&self) -> &DMatrix<f64> {
        &self.right
    }
    fn left_vectors(&self) -> &DMatrix<f64> {
        &self.left
    }
}

impl SpectralDecomposition {
    /// Diagonalizes `W` through the symmetric similarity
    /// `S = D^{-1/2} K D^{-1/2}` and assembles biorthonormal pairs.
    ///
    /// Fails with [`Error::Connectivity`] when the eigenvalue 1 is not
    /// simple (second-sorted eigenvalue within `1e-12` of 1).
    pub fn decompose(w: &TransitionMatrix, adj: &GeneralizedAdjacency) -> Result<Self> {
        let n = w.node_count();
        debug_assert_eq!(adj.hyperdegree.len(), n);
        debug_assert!((0..n).all(|i| adj.hyperdegree[i] > 0));

        let sqrt_d: Vec<f64> = (0..n).map(|i| (adj.hyperdegree[i] as f64).sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| adj.k[(i, j)] as f64 / (sqrt_d[i] * sqrt_d[j]));

        let eig = nalgebra::SymmetricEigen::try_new(s, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;

        // Perron mode first, remainder sorted descending; stable on ties.
        let mut order: Vec<usize> = (0..n).collect();
        let perron = (0..n)
            .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("non-empty spectrum");
        order.retain(|&l| l != perron);
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        order.insert(0, perron);

        if n > 1 {
            let lambda2 = eig.eigenvalues[order[1]];
            if lambda2 >= 1.0 - CONNECTIVITY_TOL {
                return Err(Error::Connectivity {
                    detail: format!("second eigenvalue {lambda2} is within 1e-12 of 1"),
                });
            }
        }

        let mut eigenvalues = DVector::zeros(n);
        let mut right = DMatrix::zeros(n, n);
        let mut left = DMatrix::zeros(n, n);

        let total = adj.total_weight as f64;
        eigenvalues[0] = 1.0;
        for i in 0..n {
            right[(i, 0)] = 1.0;
            left[(0, i)] = adj.hyperdegree[i] as f64 / total;
        }

        for (slot, &l) in order.iter().enumerate().skip(1) {
            eigenvalues[slot] = eig.eigenvalues[l].clamp(-1.0, 1.0);
            let u = eig.eigenvectors.column(l);
            // Fix the sign so the largest-magnitude entry is positive.
            let lead = (0..n)
                .max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))
                .expect("non-empty eigenvector");
            let sign = if u[lead] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..n {
                right[(i, slot)] = sign * u[i] / sqrt_d[i];
                left[(slot, i)] = sign * u[i] * sqrt_d[i];
            }
        }

        let dec = Self { eigenvalues, right, left };
        let residual = (dec.reconstruct(1) - w.matrix()).amax();
        if residual > RECONSTRUCTION_TOL {
            return Err(Error::Numerical(format!(
                "spectral reconstruction of W off by {residual:.3e}"
            )));
        }
        Ok(dec)
    }

    /// Convenience constructor from a hypergraph.
    pub fn from_hypergraph(h: &crate::hypergraph::Hypergraph) -> Result<Self> {
        let adj = GeneralizedAdjacency::from_hypergraph(h);
        let w = TransitionMatrix::new(h, &adj)?;
        Self::decompose(&w, &adj)
    }

    /// `sum_l lambda_l^t |phi_l><phibar_l|`, i.e. `W^t` assembled spectrally.
    pub fn reconstruct(&self, t: u32) -> DMatrix<f64> {
        reconstruct_power(self, t)
    }
}

/// Reset node and reset probability defining `Pi(r, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetWalkSpec {
    reset_node: usize,
    gamma: f64,
}

impl ResetWalkSpec {
    pub fn new(reset_node: usize, gamma: f64, node_count: usize) -> Result<Self> {
        if !(gamma >= 0.0 && gamma < 1.0) {
            return Err(Error::InvalidReset(format!(
                "reset probability {gamma} outside [0, 1)"
            )));
        }
        if reset_node >= node_count {
            return Err(Error::InvalidReset(format!(
                "reset node {reset_node} out of range for {node_count} nodes"
            )));
        }
        Ok(Self { reset_node, gamma })
    }

    pub fn reset_node(&self) -> usize {
        self.reset_node
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Eigen-system of the resetting transition matrix `Pi(r, gamma)`,
/// assembled in closed form from the base decomposition.
#[derive(Debug, Clone)]
pub struct ResetSpectralDecomposition {
    spec: ResetWalkSpec,
    eigenvalues: DVector<f64>,
    right: DMatrix<f64>,
    left: DMatrix<f64>,
}

impl WalkSpectrum for ResetSpectralDecomposition {
    fn node_count(&self) -> usize {
        self.eigenvalues.len()
    }
    fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }
    fn right_vectors(&self) -> &DMatrix<f64> {
        &self.right
    }
    fn left_vectors(&self) -> &DMatrix<f64> {
        &self.left
    }
}

impl ResetSpectralDecomposition {
    pub fn spec(&self) -> &ResetWalkSpec {
        &self.spec
    }

    /// `sum_l zeta_l^t |psi_l><psibar_l|`, i.e. `Pi^t` assembled spectrally.
    pub fn reconstruct(&self, t: u32) -> DMatrix<f64> {
        reconstruct_power(self, t)
    }
}

/// Assembles the eigen-system of `Pi(r, gamma)` from that of `W`.
///
/// At `gamma = 0` every coefficient vanishes and the base system is
/// returned unchanged. The denominators `1 - (1 - gamma) lambda_l` are
/// bounded below by `gamma` for `lambda_l <= 1`, so nothing blows up.
pub fn reset_spectrum(
    base: &SpectralDecomposition,
    spec: ResetWalkSpec,
) -> ResetSpectralDecomposition {
    let n = base.node_count();
    let r = spec.reset_node();
    let gamma = spec.gamma();
    debug_assert!(
        (base.right[(r, 0)] - 1.0).abs() < 1e-12,
        "leading right eigenvector must be all-ones"
    );

    let mut eigenvalues = DVector::zeros(n);
    eigenvalues[0] = 1.0;
    let mut coeff = vec![0.0; n];
    for l in 1..n {
        let lambda = base.eigenvalues[l];
        eigenvalues[l] = (1.0 - gamma) * lambda;
        coeff[l] = gamma * base.right[(r, l)] / (1.0 - (1.0 - gamma) * lambda);
    }

    let mut right = base.right.clone();
    let mut left = base.left.clone();
    for l in 1..n {
        for i in 0..n {
            right[(i, l)] -= coeff[l];
        }
    }
    for l in 1..n {
        for i in 0..n {
            let add = coeff[l] * base.left[(l, i)];
            left[(0, i)] += add;
        }
    }

    ResetSpectralDecomposition { spec, eigenvalues, right, left }
}

/// The dense reset transition matrix `(1 - gamma) W + gamma Theta(r)`.
pub fn assemble_pi(w: &TransitionMatrix, spec: &ResetWalkSpec) -> DMatrix<f64> {
    let gamma = spec.gamma();
    let mut pi = w.matrix() * (1.0 - gamma);
    let r = spec.reset_node();
    for i in 0..pi.nrows() {
        pi[(i, r)] += gamma;
    }
    pi
}

fn reconstruct_power(spectrum: &impl WalkSpectrum, t: u32) -> DMatrix<f64> {
    let n = spectrum.node_count();
    let mut scaled = spectrum.right_vectors().clone();
    for l in 0..n {
        let z = spectrum.eigenvalues()[l].powi(t as i32);
        for i in 0..n {
            scaled[(i, l)] *= z;
        }
    }
    scaled * spectrum.left_vectors()
}
