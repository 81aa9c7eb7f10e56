//! Lanczos with full reorthogonalization for the low end of a sparse
//! symmetric spectrum.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Compressed sparse rows of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SparseSymmetric {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSymmetric {
    /// `rows[r]` lists `(column, value)` pairs for row `r`.
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseSymmetric {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *out = acc;
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.vals[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k] as usize)] += self.vals[k];
            }
        }
        m
    }
}

const MAX_KRYLOV: usize = 240;
const MAX_RESTARTS: usize = 40;
const RESIDUAL_TOL: f64 = 1e-11;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// Deterministic pseudo-random start vector (SplitMix64 over the index).
fn start_vector(dim: usize, salt: u64) -> Vec<f64> {
    (0..dim as u64)
        .map(|i| {
            let mut z = i
                .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
                .wrapping_add(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Lowest eigenpair of `op` restricted to the orthogonal complement of
/// `deflate` (which must hold orthonormal eigenvectors of `op`).
///
/// Returns `None` when the complement is empty.
pub fn lowest_eigenpair(
    op: &SparseSymmetric,
    deflate: &[Vec<f64>],
) -> Result<Option<(f64, Vec<f64>)>> {
    let dim = op.dim();
    if deflate.len() >= dim {
        return Ok(None);
    }
    let scale = op.norm_bound().max(1.0);
    let mut v = start_vector(dim, deflate.len() as u64);
    orthogonalize(&mut v, deflate);
    let mut nv = norm(&v);
    if nv < 1e-8 {
        // start vector happened to lie in the deflated span
        v = start_vector(dim, 0xDEAD_BEEF ^ deflate.len() as u64);
        orthogonalize(&mut v, deflate);
        nv = norm(&v);
        if nv < 1e-8 {
            return Ok(None);
        }
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let mut best_residual = f64::INFINITY;
    for _ in 0..MAX_RESTARTS {
        let (theta, ritz) = lanczos_pass(op, deflate, v, scale)?;
        let mut hv = vec![0.0; dim];
        op.matvec(&ritz, &mut hv);
        axpy(-theta, &ritz, &mut hv);
        let residual = norm(&hv);
        if residual <= RESIDUAL_TOL * scale {
            return Ok(Some((theta, ritz)));
        }
        best_residual = best_residual.min(residual);
        v = ritz;
    }
    Err(Error::NonConvergence {
        what: "Lanczos",
        detail: format!("residual {best_residual:e} after {MAX_RESTARTS} restarts (dim {dim})"),
    })
}

/// One Lanczos run from unit vector `v0`; returns the lowest Ritz pair.
fn lanczos_pass(
    op: &SparseSymmetric,
    deflate: &[Vec<f64>],
    v0: Vec<f64>,
    scale: f64,
) -> Result<(f64, Vec<f64>)> {
    let dim = op.dim();
    let max_m = MAX_KRYLOV.min(dim - deflate.len());
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_m);
    let mut alphas: Vec<f64> = Vec::with_capacity(max_m);
    let mut betas: Vec<f64> = Vec::with_capacity(max_m);
    let mut v0 = v0;
    orthogonalize(&mut v0, deflate);
    let n0 = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= n0);
    basis.push(v0);
    let mut w = vec![0.0; dim];

    loop {
        let m = basis.len();
        op.matvec(&basis[m - 1], &mut w);
        let a = dot(&w, &basis[m - 1]);
        alphas.push(a);
        orthogonalize(&mut w, deflate);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);

        let done = m == max_m || b <= 1e-14 * scale;
        let check = done || m.is_multiple_of(8);
        if check {
            let (theta, y) = lowest_ritz(&alphas, &betas);
            let estimate = b * y[m - 1].abs();
            if done || estimate <= 0.1 * RESIDUAL_TOL * scale {
                let mut ritz = vec![0.0; dim];
                for (q, c) in basis.iter().zip(y.iter()) {
                    axpy(*c, q, &mut ritz);
                }
                let nr = norm(&ritz);
                ritz.iter_mut().for_each(|x| *x /= nr);
                return Ok((theta, ritz));
            }
        }
        betas.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
}

fn lowest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let k = (0..m)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("nonempty tridiagonal");
    (
        eig.eigenvalues[k],
        eig.eigenvectors.column(k).iter().copied().collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sym_eig;

    fn random_sparse(dim: usize, seed: u64) -> SparseSymmetric {
        let v = start_vector(dim * dim, seed);
        let mut rows = vec![Vec::new(); dim];
        for i in 0..dim {
            for j in 0..=i {
                let x = v[i * dim + j];
                if x.abs() > 0.3 || i == j {
                    rows[i].push((j as u32, x));
                    if i != j {
                        rows[j].push((i as u32, x));
                    }
                }
            }
        }
        SparseSymmetric::from_rows(rows)
    }

    #[test]
    fn matches_dense_lowest_eigenvalue() {
        for (dim, seed) in [(5, 1), (60, 2), (400, 3)] {
            let op = random_sparse(dim, seed);
            let dense = sym_eig(&op.to_dense()).unwrap();
            let (theta, v) = lowest_eigenpair(&op, &[]).unwrap().unwrap();
            assert!((theta - dense.values[0]).abs() < 1e-10, "dim {dim}");
            let overlap: f64 = v
                .iter()
                .zip(dense.vectors.column(0).iter())
                .map(|(a, b)| a * b)
                .sum();
            assert!((overlap.abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn deflation_walks_up_the_spectrum() {
        let op = random_sparse(300, 9);
        let dense = sym_eig(&op.to_dense()).unwrap();
        let mut found = Vec::new();
        for level in 0..4 {
            let (theta, v) = lowest_eigenpair(&op, &found).unwrap().unwrap();
            assert!((theta - dense.values[level]).abs() < 1e-9, "level {level}");
            found.push(v);
        }
    }

    #[test]
    fn degenerate_levels_are_recovered() {
        // identity ⊕ 2·identity: the lowest level is threefold
        let rows: Vec<Vec<(u32, f64)>> = (0..6)
            .map(|i| vec![(i as u32, if i < 3 { 1.0 } else { 2.0 })])
            .collect();
        let op = SparseSymmetric::from_rows(rows);
        let mut found = Vec::new();
        for _ in 0..3 {
            let (theta, v) = lowest_eigenpair(&op, &found).unwrap().unwrap();
            assert!((theta - 1.0).abs() < 1e-12);
            found.push(v);
        }
        let (theta, _) = lowest_eigenpair(&op, &found).unwrap().unwrap();
        assert!((theta - 2.0).abs() < 1e-12);
    }

    #[test]
    fn full_deflation_returns_none() {
        let op = SparseSymmetric::from_rows(vec![vec![(0, 3.0)]]);
        let (_, v) = lowest_eigenpair(&op, &[]).unwrap().unwrap();
        assert!(lowest_eigenpair(&op, &[v]).unwrap().is_none());
    }
}
