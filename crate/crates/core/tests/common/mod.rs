//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use entconn::graph::{assign_random_weights, build_random};
use entconn::numerics::sym_eig;
use entconn::CouplingGraph;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// `op` acting on `site` of `n` qubits; site 0 is the least significant bit.
fn on_site(op: &DMatrix<f64>, site: usize, n: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(2, 2);
    (0..n).rev().fold(DMatrix::from_element(1, 1, 1.0), |acc, s| {
        kron(&acc, if s == site { op } else { &id })
    })
}

/// `Σ t_ij (σx σx + σy σy)` from Kronecker products, with
/// `σy ⊗ σy = −(iσy) ⊗ (iσy)` keeping everything real.
pub fn pauli_hamiltonian(g: &CouplingGraph) -> DMatrix<f64> {
    let n = g.n();
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let iy = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let mut h = DMatrix::zeros(1 << n, 1 << n);
    for (i, j, t) in g.edges() {
        let xx = on_site(&x, i, n) * on_site(&x, j, n);
        let yy = on_site(&iy, i, n) * on_site(&iy, j, n);
        h += (xx - yy) * t;
    }
    h
}

/// Total `Σ σz` (diagonal).
pub fn total_sz(n: usize) -> DMatrix<f64> {
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    (0..n).fold(DMatrix::zeros(1 << n, 1 << n), |acc, s| acc + on_site(&z, s, n))
}

pub struct FullGround {
    pub energy: f64,
    /// Ground vector restricted to the lowest up-spin count that the ground
    /// eigenspace reaches; `None` if that restriction is not one-dimensional.
    pub state: Option<Vec<f64>>,
    pub degeneracy: usize,
}

/// Dense diagonalization of the whole `2ⁿ` space.
pub fn full_ground(g: &CouplingGraph) -> FullGround {
    let h = pauli_hamiltonian(g);
    let spec = sym_eig(&h).unwrap();
    let e0 = spec.values[0];
    let tol = 1e-9 * e0.abs().max(1.0);
    let space: Vec<usize> = (0..spec.values.len())
        .filter(|&i| spec.values[i] <= e0 + tol)
        .collect();
    let n = g.n();
    let dim = 1usize << n;
    for k in 0..=n {
        // project the eigenspace onto the k-up configurations
        let cols: Vec<Vec<f64>> = space
            .iter()
            .map(|&c| {
                (0..dim)
                    .map(|s| if (s as u32).count_ones() as usize == k { spec.vectors[(s, c)] } else { 0.0 })
                    .collect()
            })
            .collect();
        let m = DMatrix::from_fn(dim, cols.len(), |r, c| cols[c][r]);
        let gram = m.transpose() * &m;
        let gspec = sym_eig(&gram).unwrap();
        let rank = gspec.values.iter().filter(|&&v| v > 1e-8).count();
        if rank == 0 {
            continue;
        }
        let state = (rank == 1).then(|| {
            let top = gspec.values.len() - 1;
            let coeffs = gspec.vectors.column(top);
            let mut v: Vec<f64> = (m * coeffs).iter().copied().collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            v
        });
        return FullGround {
            energy: e0,
            state,
            degeneracy: space.len() - 1,
        };
    }
    unreachable!("a nonzero eigenspace has support in some sector")
}

/// Entropy in bits of the sites in `subset`, by an explicit index loop.
pub fn entropy_oracle(amplitudes: &[f64], n: usize, subset: &[usize]) -> f64 {
    let rest: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
    let da = 1usize << subset.len();
    let mut rho = DMatrix::<f64>::zeros(da, da);
    let pick = |s: usize, sites: &[usize]| -> usize {
        sites.iter().enumerate().map(|(m, &q)| ((s >> q) & 1) << m).sum()
    };
    for s in 0..amplitudes.len() {
        for t in 0..amplitudes.len() {
            if pick(s, &rest) == pick(t, &rest) {
                rho[(pick(s, subset), pick(t, subset))] += amplitudes[s] * amplitudes[t];
            }
        }
    }
    sym_eig(&rho)
        .unwrap()
        .values
        .iter()
        .filter(|&&p| p > 1e-15)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Random graph with uniform `[0, 1]` weights, reproducible from `seed`.
pub fn random_weighted(n: usize, seed: u64) -> CouplingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c_p = rng.random_range(0.3..1.0);
    let g = build_random(n, c_p, &mut rng).unwrap();
    assign_random_weights(&g, &mut rng, 0.0, 1.0).unwrap()
}
