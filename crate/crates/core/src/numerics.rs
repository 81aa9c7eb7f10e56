//! Dense symmetric eigendecomposition, SPD square roots and the kink-aware
//! quadrature used for the large-`n` bipartite limit.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive by [`spd_power`].
pub const SPD_TOL: f64 = 1e-12;
/// Default absolute tolerance for [`quad_abs_log`].
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;

const MAX_QUAD_DEPTH: u32 = 48;

/// Eigenvalues in ascending order with matching orthonormal columns.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    /// `Q · diag(f(λ)) · Qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * f(self.values[j])
        });
        let mut out = scaled * self.vectors.transpose();
        symmetrize(&mut out);
        out
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = m.amax().max(1.0);
    let asymmetry = (m - m.transpose()).amax();
    if asymmetry > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

pub fn sym_eig(m: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    check_symmetric(m)?;
    let mut sym = m.clone();
    symmetrize(&mut sym);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SymmetricSpectrum { values, vectors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Root {
    /// `M^{1/2}`
    Sqrt,
    /// `M^{-1/2}`
    InvSqrt,
}

impl Root {
    pub fn exponent(self) -> f64 {
        match self {
            Root::Sqrt => 0.5,
            Root::InvSqrt => -0.5,
        }
    }
}

/// Spectrum of `m`, rejecting matrices whose smallest eigenvalue is not above
/// [`SPD_TOL`].
pub fn spd_spectrum(m: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    let spec = sym_eig(m)?;
    let min = spec.min();
    if min <= SPD_TOL {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(spec)
}

pub fn spd_power(m: &DMatrix<f64>, root: Root) -> Result<DMatrix<f64>> {
    let spec = spd_spectrum(m)?;
    let p = root.exponent();
    Ok(spec.map(|x| x.powf(p)))
}

/// `1 + 2αn_c − 2α Σ_{j=1}^{n_c} cos((2j−1)x)`: the bipartite circulant
/// eigenvalue as a function of the Fourier angle.
pub fn bipartite_symbol(alpha: f64, n_c: usize, x: f64) -> f64 {
    let s: f64 = (1..=n_c).map(|j| ((2 * j - 1) as f64 * x).cos()).sum();
    1.0 + 2.0 * alpha * (n_c as f64 - s)
}

fn log_ratio(alpha: f64, n_c: usize, x: f64) -> f64 {
    bipartite_symbol(alpha, n_c, x).log2() - bipartite_symbol(alpha, n_c, PI - x).log2()
}

/// `f(α, n_c) = ∫₀^π |log₂ g(x) − log₂ g(π − x)| dx`, with `g` the
/// [`bipartite_symbol`].
///
/// Sign changes of the inner expression are bracketed on a grid finer than
/// the highest cosine frequency and polished by bisection; each smooth piece
/// between kinks is then integrated with adaptive Gauss–Kronrod (7/15).
pub fn quad_abs_log(alpha: f64, n_c: usize, tol: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::invalid("alpha", format!("{alpha} must be positive")));
    }
    if n_c == 0 {
        return Err(Error::invalid("n_c", "must be at least 1"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tol", format!("{tol} must be positive")));
    }

    let h = |x: f64| log_ratio(alpha, n_c, x);
    let mut breaks = vec![0.0];
    breaks.extend(sign_changes(&h, 0.0, PI, 16 * n_c + 16));
    breaks.push(PI);

    let total_len = PI;
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let piece_tol = tol * (b - a) / total_len;
        sum += adaptive_gk15(&|x| h(x).abs(), a, b, piece_tol, MAX_QUAD_DEPTH)?;
    }
    Ok(sum)
}

/// Interior roots of `h` on `(a, b)` where it changes sign, found by bisection
/// inside the brackets of a uniform `intervals`-cell grid. Exact zeros on grid
/// points are reported as is.
pub(crate) fn sign_changes(h: &impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> Vec<f64> {
    let step = (b - a) / intervals as f64;
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = h(a);
    for k in 1..=intervals {
        let x1 = if k == intervals { b } else { a + k as f64 * step };
        let f1 = h(x1);
        if f1 == 0.0 && k < intervals {
            roots.push(x1);
        } else if f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(h, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = h(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

fn adaptive_gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (value, err) = gk15(f, a, b);
    if err <= tol.max(f64::EPSILON * value.abs()) {
        return Ok(value);
    }
    if depth == 0 {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature",
            detail: format!("depth bound reached on [{a}, {b}] with error estimate {err:e}"),
        });
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive_gk15(f, a, mid, 0.5 * tol, depth - 1)?
        + adaptive_gk15(f, mid, b, 0.5 * tol, depth - 1)?)
}
