//! Harmonic lattices: potential matrices, Gaussian ground states,
//! logarithmic negativity and the Gaussian monogamy budget.
//!
//! The logarithmic negativity between groups A and B is
//! `N_l = −Σ_j log₂ min(1, Λ_j)`, where `Λ_j` runs over the eigenvalues of
//! `γx · P · γp · P` and `P = diag(mask)`. The same formula is applied
//! unchanged to reduced (mixed) two-mode blocks.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{bipartite_offsets, BondConvention, CouplingGraph, PartitionMask};
use crate::numerics::{self, quad_abs_log, spd_power, sym_eig, Root, DEFAULT_QUAD_TOL};

/// Eigenvalues within this distance of 1 count as exactly 1.
pub const UNIT_CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PotentialMatrix {
    v: DMatrix<f64>,
    alpha: f64,
}

impl PotentialMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }
}

/// `V_ii = 1 + α Σ_j w_ij`, `V_ij = −α w_ij`. Unit-weight graphs give the
/// plain adjacency form; other weights scale `α` per edge.
pub fn build_potential(g: &CouplingGraph, alpha: f64) -> Result<PotentialMatrix> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid("alpha", format!("{alpha} must be finite and non-negative")));
    }
    let n = g.n();
    let w = g.weights();
    let v = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 + alpha * g.weighted_degree(i)
        } else {
            -alpha * w[(i, j)]
        }
    });
    Ok(PotentialMatrix { v, alpha })
}

/// Position and momentum covariance blocks of a Gaussian state.
///
/// Reductions of a pure state are generally mixed (`γx · γp ≠ 1`).
#[derive(Debug, Clone)]
pub struct CovarianceBlocks {
    pub gamma_x: DMatrix<f64>,
    pub gamma_p: DMatrix<f64>,
}

impl CovarianceBlocks {
    pub fn new(gamma_x: DMatrix<f64>, gamma_p: DMatrix<f64>) -> Result<Self> {
        if gamma_x.shape() != gamma_p.shape() || !gamma_x.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gamma_x.nrows(),
                found: gamma_p.nrows(),
            });
        }
        Ok(CovarianceBlocks { gamma_x, gamma_p })
    }

    pub fn modes(&self) -> usize {
        self.gamma_x.nrows()
    }

    /// Rows and columns `modes` of both blocks.
    pub fn reduce(&self, modes: &[usize]) -> Result<CovarianceBlocks> {
        let n = self.modes();
        if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
            return Err(Error::invalid("mode", format!("{bad} out of range for {n} modes")));
        }
        let k = modes.len();
        let pick = |m: &DMatrix<f64>| DMatrix::from_fn(k, k, |a, b| m[(modes[a], modes[b])]);
        Ok(CovarianceBlocks {
            gamma_x: pick(&self.gamma_x),
            gamma_p: pick(&self.gamma_p),
        })
    }
}

/// Ground state of `H = Σ P²/2 + Xᵀ V X / 2`: `γx = V^{−1/2}`, `γp = V^{1/2}`.
#[derive(Debug, Clone)]
pub struct GaussianGround {
    blocks: CovarianceBlocks,
}

impl Deref for GaussianGround {
    type Target = CovarianceBlocks;

    fn deref(&self) -> &CovarianceBlocks {
        &self.blocks
    }
}

impl GaussianGround {
    pub fn blocks(&self) -> &CovarianceBlocks {
        &self.blocks
    }
}

/// Both blocks come from a single eigendecomposition of `V`.
pub fn ground_state(v: &PotentialMatrix) -> Result<GaussianGround> {
    let spec = numerics::spd_spectrum(&v.v)?;
    Ok(GaussianGround {
        blocks: CovarianceBlocks {
            gamma_x: spec.map(|x| x.powf(-0.5)),
            gamma_p: spec.map(f64::sqrt),
        },
    })
}

fn check_mask(blocks: &CovarianceBlocks, mask: &PartitionMask) -> Result<()> {
    if mask.len() != blocks.modes() {
        return Err(Error::DimensionMismatch {
            expected: blocks.modes(),
            found: mask.len(),
        });
    }
    if mask.group_a().is_empty() || mask.group_b().is_empty() {
        return Err(Error::invalid("mask", "both groups must be nonempty"));
    }
    Ok(())
}

/// Ascending eigenvalues of `γx · P · γp · P`.
///
/// Computed through the similar symmetric matrix `S^{1/2} γx S^{1/2}` with
/// `S = P γp P`, so the spectrum is real by construction.
pub fn partial_transpose_spectrum(
    blocks: &CovarianceBlocks,
    mask: &PartitionMask,
) -> Result<Vec<f64>> {
    check_mask(blocks, mask)?;
    let n = blocks.modes();
    let signs = mask.signs();
    let s = DMatrix::from_fn(n, n, |i, j| {
        f64::from(signs[i]) * blocks.gamma_p[(i, j)] * f64::from(signs[j])
    });
    let root = spd_power(&s, Root::Sqrt)?;
    let mut w = &root * &blocks.gamma_x * &root;
    numerics::symmetrize(&mut w);
    let spec = sym_eig(&w)?;
    let values: Vec<f64> = spec.values.iter().copied().collect();
    if let Some(bad) = values.iter().find(|l| **l <= 0.0) {
        return Err(Error::NumericalBreakdown(format!(
            "non-positive eigenvalue {bad:e} in partially transposed product"
        )));
    }
    Ok(values)
}

pub fn log_negativity(blocks: &CovarianceBlocks, mask: &PartitionMask) -> Result<f64> {
    let spectrum = partial_transpose_spectrum(blocks, mask)?;
    let sum: f64 = spectrum
        .iter()
        .filter(|&&l| l < 1.0 - UNIT_CLAMP_TOL)
        .map(|l| l.log2())
        .sum();
    Ok((-sum).max(0.0))
}

/// Negativity `(2^{N_l} − 1) / 2`.
pub fn negativity_from_logneg(log_neg: f64) -> f64 {
    (log_neg.exp2() - 1.0) / 2.0
}

/// Squared negativity. For mixed two-mode reductions this is a lower bound on
/// the convex-roof Gaussian tangle.
pub fn gaussian_tangle(blocks: &CovarianceBlocks, mask: &PartitionMask) -> Result<f64> {
    let neg = negativity_from_logneg(log_negativity(blocks, mask)?);
    Ok(neg * neg)
}

pub fn two_mode_reduction(gs: &CovarianceBlocks, i: usize, j: usize) -> Result<CovarianceBlocks> {
    if i == j {
        return Err(Error::invalid("mode", format!("reduction needs two distinct modes, got {i} twice")));
    }
    gs.reduce(&[i, j])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonogamyBudget {
    /// Tangle of the focus mode against all others.
    pub lhs: f64,
    /// Sum of two-mode tangles between the focus mode and each other mode.
    pub rhs: f64,
    pub residual: f64,
}

/// Monogamy budget for mode 0.
pub fn monogamy_budget(gs: &GaussianGround) -> Result<MonogamyBudget> {
    monogamy_budget_for(gs, 0)
}

pub fn monogamy_budget_for(gs: &GaussianGround, mode: usize) -> Result<MonogamyBudget> {
    let n = gs.modes();
    if n < 3 {
        return Err(Error::invalid("n", format!("monogamy budget needs at least 3 modes, got {n}")));
    }
    let lhs = gaussian_tangle(gs, &PartitionMask::single_site(n, mode)?)?;
    let pair_mask = PartitionMask::new(vec![1, -1])?;
    let mut rhs = 0.0;
    for j in (0..n).filter(|&j| j != mode) {
        rhs += gaussian_tangle(&two_mode_reduction(gs, mode, j)?, &pair_mask)?;
    }
    Ok(MonogamyBudget {
        lhs,
        rhs,
        residual: lhs - rhs,
    })
}

/// `λ_k = 1 + 2αn_c − 2α Σ_{j=1}^{n_c} cos((2j−1) · 2πk/n)` for `k = 0..n`.
pub fn circulant_spectrum(n: usize, n_c: usize, alpha: f64) -> Result<Vec<f64>> {
    bipartite_offsets(n, n_c)?;
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid("alpha", format!("{alpha} must be finite and non-negative")));
    }
    Ok((0..n)
        .map(|k| numerics::bipartite_symbol(alpha, n_c, 2.0 * PI * k as f64 / n as f64))
        .collect())
}

/// Closed-form A:B log-negativity of the regular bipartite ring with the
/// parity partition: `½ Σ_{k=0}^{n/2−1} |log₂(λ_k / λ_{n/2−k})|`.
pub fn logneg_bipartite_exact(n: usize, n_c: usize, alpha: f64) -> Result<f64> {
    let lambda = circulant_spectrum(n, n_c, alpha)?;
    let half = n / 2;
    Ok(0.5
        * (0..half)
            .map(|k| (lambda[k] / lambda[half - k]).log2().abs())
            .sum::<f64>())
}

/// Large-`n` limit `(n / 4π) · f(α, n_c)`.
pub fn logneg_bipartite_asymptotic(n: usize, n_c: usize, alpha: f64) -> Result<f64> {
    Ok(n as f64 / (4.0 * PI) * quad_abs_log(alpha, n_c, DEFAULT_QUAD_TOL)?)
}

/// Half/half log-negativity of the complete graph with uniform coupling.
///
/// With single-counted bonds `V = (1 + nα)·1 − α·J`, whose partial-transpose
/// product has one reciprocal pair `{s, 1/s}` with `s² = 1 + nα`; doubling
/// every bond replaces `α` by `2α`.
pub fn logneg_complete_closed_form(n: usize, alpha: f64, convention: BondConvention) -> f64 {
    let effective = match convention {
        BondConvention::Single => alpha,
        BondConvention::Double => 2.0 * alpha,
    };
    0.5 * (1.0 + n as f64 * effective).log2()
}

/// Dense pipeline: graph → potential → ground state → log-negativity.
pub fn logneg_of_graph(g: &CouplingGraph, alpha: f64, mask: &PartitionMask) -> Result<f64> {
    let gs = ground_state(&build_potential(g, alpha)?)?;
    log_negativity(&gs, mask)
}
