//! XX spin systems: `H = Σ_{edges} t_ij (σx^i σx^j + σy^i σy^j)`.
//!
//! Each unordered edge contributes once, so the matrix element between two
//! configurations that differ by swapping an antiparallel pair `(i, j)` is
//! `2 t_ij`. The Hamiltonian conserves the number of up spins; it is solved
//! one magnetization sector at a time. Site `i` is bit `i` of a
//! configuration.
//!
//! Sectors up to [`DENSE_SECTOR_LIMIT`] states are diagonalized densely;
//! larger ones go through Lanczos with deflation, which yields the ground
//! state and every level degenerate with it.

pub mod lanczos;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::CouplingGraph;
use crate::numerics::sym_eig;
use lanczos::{lowest_eigenpair, SparseSymmetric};

/// Largest system handled by [`ground_state`].
pub const MAX_SITES: usize = 16;
/// Largest system handled by [`degeneracy`].
pub const MAX_DEGENERACY_SITES: usize = 14;
/// Sectors at or below this dimension use dense diagonalization.
pub const DENSE_SECTOR_LIMIT: usize = 256;

/// Degeneracy tolerance: relative to `|E₀|` with an absolute floor.
pub fn default_degeneracy_tol(e0: f64) -> f64 {
    1e-9 * e0.abs().max(1.0)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Configurations of `n` spins with exactly `k` up, in ascending integer
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n: usize,
    k: usize,
    states: Vec<u32>,
    // binom[p][i] = C(p, i)
    binom: Vec<Vec<usize>>,
}

impl SectorBasis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::invalid("n", format!("{n} is outside 1..=31")));
        }
        if k > n {
            return Err(Error::invalid("k", format!("{k} exceeds n = {n}")));
        }
        let dim = binomial(n, k);
        let mut states = Vec::with_capacity(dim);
        if k == 0 {
            states.push(0);
        } else {
            // Gosper's hack: next larger integer with the same popcount
            let mut s: u32 = (1u32 << k) - 1;
            let limit = 1u64 << n;
            while (s as u64) < limit {
                states.push(s);
                let c = s & s.wrapping_neg();
                let r = s + c;
                if r == 0 {
                    break;
                }
                s = (((r ^ s) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(states.len(), dim);
        let binom = (0..=n)
            .map(|p| (0..=k).map(|i| binomial(p, i)).collect())
            .collect();
        Ok(SectorBasis { n, k, states, binom })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    /// Position of `state` in the basis (colexicographic rank).
    pub fn index_of(&self, state: u32) -> Option<usize> {
        if state.count_ones() as usize != self.k || (self.n < 32 && state >> self.n != 0) {
            return None;
        }
        let mut rank = 0;
        let mut seen = 0;
        let mut s = state;
        while s != 0 {
            let p = s.trailing_zeros() as usize;
            seen += 1;
            rank += self.binom[p][seen];
            s &= s - 1;
        }
        Some(rank)
    }
}

fn check_graph(g: &CouplingGraph, n: usize) -> Result<()> {
    if g.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n(),
        });
    }
    Ok(())
}

/// Off-diagonal hops `(target_index, 2 t_ij)` out of each basis state.
fn hop_rows(
    g: &CouplingGraph,
    states: &[u32],
    index_of: impl Fn(u32) -> usize,
) -> Vec<Vec<(u32, f64)>> {
    let edges: Vec<(u32, f64)> = g
        .edges()
        .map(|(i, j, t)| ((1u32 << i) | (1u32 << j), 2.0 * t))
        .collect();
    states
        .iter()
        .map(|&s| {
            edges
                .iter()
                .filter(|(mask, _)| (s & mask).count_ones() == 1)
                .map(|&(mask, amp)| (index_of(s ^ mask) as u32, amp))
                .collect()
        })
        .collect()
}

fn sector_operator(g: &CouplingGraph, sector: &SectorBasis) -> Result<SparseSymmetric> {
    check_graph(g, sector.n)?;
    let rows = hop_rows(g, &sector.states, |s| {
        sector.index_of(s).expect("hop preserves magnetization")
    });
    Ok(SparseSymmetric::from_rows(rows))
}

/// Dense Hamiltonian block of one magnetization sector.
pub fn assemble_sector(g: &CouplingGraph, sector: &SectorBasis) -> Result<DMatrix<f64>> {
    Ok(sector_operator(g, sector)?.to_dense())
}

/// Dense Hamiltonian on the full `2ⁿ` space (basis index = configuration).
pub fn assemble_full(g: &CouplingGraph) -> Result<DMatrix<f64>> {
    let n = g.n();
    if n == 0 || n > MAX_SITES {
        return Err(Error::invalid("n", format!("{n} is outside 1..={MAX_SITES}")));
    }
    let states: Vec<u32> = (0..1u32 << n).collect();
    Ok(SparseSymmetric::from_rows(hop_rows(g, &states, |s| s as usize)).to_dense())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Full,
    Sector(SectorBasis),
}

/// Real, unit-norm amplitude vector over a computational basis.
#[derive(Debug, Clone)]
pub struct SpinState {
    n: usize,
    basis: Basis,
    amplitudes: Vec<f64>,
    energy: Option<f64>,
}

impl SpinState {
    /// Normalizes `amplitudes` over the full `2ⁿ` basis.
    pub fn from_full_amplitudes(n: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(Error::invalid("n", format!("{n} is outside 1..=24")));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        Self::normalized(n, Basis::Full, amplitudes, None)
    }

    pub fn from_sector_amplitudes(sector: SectorBasis, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != sector.dim() {
            return Err(Error::DimensionMismatch {
                expected: sector.dim(),
                found: amplitudes.len(),
            });
        }
        let n = sector.n;
        Self::normalized(n, Basis::Sector(sector), amplitudes, None)
    }

    /// Product state with the given configuration.
    pub fn basis_state(n: usize, config: u32) -> Result<Self> {
        let sector = SectorBasis::new(n, config.count_ones() as usize)?;
        let idx = sector
            .index_of(config)
            .ok_or_else(|| Error::invalid("config", format!("{config:#b} has bits beyond n = {n}")))?;
        let mut amps = vec![0.0; sector.dim()];
        amps[idx] = 1.0;
        Self::from_sector_amplitudes(sector, amps)
    }

    fn normalized(n: usize, basis: Basis, mut amplitudes: Vec<f64>, energy: Option<f64>) -> Result<Self> {
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("amplitudes", "zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(SpinState {
            n,
            basis,
            amplitudes,
            energy,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Eigenvalue when the state came out of a diagonalization.
    pub fn energy(&self) -> Option<f64> {
        self.energy
    }

    /// Up-spin count of the sector, if the state lives in one.
    pub fn sector_k(&self) -> Option<usize> {
        match &self.basis {
            Basis::Sector(s) => Some(s.k),
            Basis::Full => None,
        }
    }

    /// `(configuration, amplitude)` pairs.
    pub fn components(&self) -> Box<dyn Iterator<Item = (u32, f64)> + '_> {
        match &self.basis {
            Basis::Full => Box::new(
                self.amplitudes
                    .iter()
                    .enumerate()
                    .map(|(c, &a)| (c as u32, a)),
            ),
            Basis::Sector(s) => Box::new(s.states.iter().copied().zip(self.amplitudes.iter().copied())),
        }
    }

    /// Amplitudes over the full `2ⁿ` basis.
    pub fn to_full(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.n];
        for (c, a) in self.components() {
            out[c as usize] = a;
        }
        out
    }
}

/// First nonzero amplitude positive.
fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|a| a.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
    }
}

/// Low end of one sector's spectrum.
struct SectorLow {
    k: usize,
    ground_energy: f64,
    ground_vector: Vec<f64>,
    /// Levels of this sector at or below `ground_energy + tol` once
    /// [`SectorLow::count_levels_below`] has run; `None` before.
    levels: Option<usize>,
    dense_values: Option<Vec<f64>>,
    op: Option<SparseSymmetric>,
    deflated: Vec<Vec<f64>>,
}

impl SectorLow {
    fn solve(g: &CouplingGraph, k: usize) -> Result<Self> {
        let sector = SectorBasis::new(g.n(), k)?;
        let op = sector_operator(g, &sector)?;
        if sector.dim() <= DENSE_SECTOR_LIMIT {
            let spec = sym_eig(&op.to_dense())?;
            Ok(SectorLow {
                k,
                ground_energy: spec.values[0],
                ground_vector: spec.vectors.column(0).iter().copied().collect(),
                levels: None,
                dense_values: Some(spec.values.iter().copied().collect()),
                op: None,
                deflated: Vec::new(),
            })
        } else {
            let (e, v) = lowest_eigenpair(&op, &[])?.expect("sector is nonempty");
            Ok(SectorLow {
                k,
                ground_energy: e,
                ground_vector: v.clone(),
                levels: None,
                dense_values: None,
                op: Some(op),
                deflated: vec![v],
            })
        }
    }

    /// Number of eigenvalues `≤ threshold`.
    fn count_levels_below(&mut self, threshold: f64) -> Result<usize> {
        if let Some(values) = &self.dense_values {
            return Ok(values.iter().filter(|&&e| e <= threshold).count());
        }
        if let Some(c) = self.levels {
            return Ok(c);
        }
        let op = self.op.as_ref().expect("sparse sector keeps its operator");
        if self.ground_energy > threshold {
            self.levels = Some(0);
            return Ok(0);
        }
        loop {
            match lowest_eigenpair(op, &self.deflated)? {
                Some((e, v)) if e <= threshold => self.deflated.push(v),
                _ => break,
            }
        }
        self.levels = Some(self.deflated.len());
        Ok(self.deflated.len())
    }
}

/// Ground state together with its degeneracy (0 means unique).
#[derive(Debug, Clone)]
pub struct GroundSolution {
    pub state: SpinState,
    pub degeneracy: usize,
}

fn solve_low(g: &CouplingGraph) -> Result<Vec<SectorLow>> {
    let n = g.n();
    if n == 0 || n > MAX_SITES {
        return Err(Error::invalid("n", format!("{n} is outside 1..={MAX_SITES}")));
    }
    // Global spin flip maps sector k onto n − k with an identical spectrum,
    // so only k ≤ n/2 is diagonalized.
    (0..=n / 2).map(|k| SectorLow::solve(g, k)).collect()
}

fn mirror_multiplicity(n: usize, k: usize) -> usize {
    if 2 * k == n {
        1
    } else {
        2
    }
}

fn pick_ground(n: usize, sectors: Vec<SectorLow>, degeneracy: usize, tol: f64) -> Result<GroundSolution> {
    let e0 = sectors
        .iter()
        .map(|s| s.ground_energy)
        .fold(f64::INFINITY, f64::min);
    let winner = sectors
        .into_iter()
        .find(|s| s.ground_energy <= e0 + tol)
        .expect("at least one sector attains the minimum");
    let mut v = winner.ground_vector;
    fix_sign(&mut v);
    let sector = SectorBasis::new(n, winner.k)?;
    let state = SpinState::normalized(n, Basis::Sector(sector), v, Some(winner.ground_energy))?;
    Ok(GroundSolution { state, degeneracy })
}

/// Ground state over all magnetization sectors. Ties go to the smallest up-spin
/// count; the amplitude sign is fixed so the first nonzero entry is positive.
pub fn ground_state(g: &CouplingGraph) -> Result<SpinState> {
    let sectors = solve_low(g)?;
    let e0 = sectors
        .iter()
        .map(|s| s.ground_energy)
        .fold(f64::INFINITY, f64::min);
    Ok(pick_ground(g.n(), sectors, 0, default_degeneracy_tol(e0))?.state)
}

/// Ground state plus the number of additional levels within
/// [`default_degeneracy_tol`] of it, counted across all sectors.
pub fn ground_state_with_degeneracy(g: &CouplingGraph) -> Result<GroundSolution> {
    let mut sectors = solve_low(g)?;
    let n = g.n();
    let e0 = sectors
        .iter()
        .map(|s| s.ground_energy)
        .fold(f64::INFINITY, f64::min);
    let tol = default_degeneracy_tol(e0);
    let mut levels = 0;
    for s in sectors.iter_mut() {
        levels += mirror_multiplicity(n, s.k) * s.count_levels_below(e0 + tol)?;
    }
    pick_ground(n, sectors, levels - 1, tol)
}

/// Number of eigenvalues within `tol` of the ground energy, minus one.
/// `tol = None` uses [`default_degeneracy_tol`].
pub fn degeneracy(g: &CouplingGraph, tol: Option<f64>) -> Result<usize> {
    if g.n() > MAX_DEGENERACY_SITES {
        return Err(Error::invalid(
            "n",
            format!("{} exceeds {MAX_DEGENERACY_SITES} for degeneracy counting", g.n()),
        ));
    }
    let n = g.n();
    let mut sectors = solve_low(g)?;
    let e0 = sectors
        .iter()
        .map(|s| s.ground_energy)
        .fold(f64::INFINITY, f64::min);
    let tol = tol.unwrap_or_else(|| default_degeneracy_tol(e0));
    let mut levels = 0;
    for s in sectors.iter_mut() {
        levels += mirror_multiplicity(n, s.k) * s.count_levels_below(e0 + tol)?;
    }
    Ok(levels - 1)
}

/// Reduced density matrix of a real state: real symmetric, PSD, unit trace.
///
/// Bit `m` of a row index is the spin of `subset[m]`.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    matrix: DMatrix<f64>,
}

impl ReducedDensity {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if !matrix.is_square() || !dim.is_power_of_two() {
            return Err(Error::invalid("density", format!("{}x{} is not a qubit register", dim, matrix.ncols())));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if ((&matrix - matrix.transpose()).amax()) > 1e-12 {
            return Err(Error::NotSymmetric {
                asymmetry: (&matrix - matrix.transpose()).amax(),
            });
        }
        if (matrix.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("density", format!("trace {} is not 1", matrix.trace())));
        }
        Ok(ReducedDensity { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        sym_eig(&self.matrix)
            .expect("density matrices are symmetric and finite")
            .values
            .iter()
            .copied()
            .collect()
    }
}

/// Partial trace onto `subset` (sites in the given order).
pub fn reduced_density(state: &SpinState, subset: &[usize]) -> Result<ReducedDensity> {
    let n = state.n;
    if subset.is_empty() {
        return Err(Error::invalid("subset", "must contain at least one site"));
    }
    let mut seen = 0u32;
    for &s in subset {
        if s >= n || seen & (1 << s) != 0 {
            return Err(Error::invalid("subset", format!("site {s} is out of range or repeated")));
        }
        seen |= 1 << s;
    }
    let rest: Vec<usize> = (0..n).filter(|i| seen & (1 << i) == 0).collect();
    let gather = |config: u32, sites: &[usize]| -> usize {
        sites
            .iter()
            .enumerate()
            .fold(0, |acc, (m, &site)| acc | ((((config >> site) & 1) as usize) << m))
    };
    let dim_a = 1usize << subset.len();
    let dim_b = 1usize << rest.len();
    let mut psi = DMatrix::<f64>::zeros(dim_a, dim_b);
    for (config, amp) in state.components() {
        psi[(gather(config, subset), gather(config, &rest))] += amp;
    }
    let mut rho = &psi * psi.transpose();
    crate::numerics::symmetrize(&mut rho);
    Ok(ReducedDensity { matrix: rho })
}

/// Von Neumann entropy in bits; eigenvalues below zero are clamped.
pub fn entropy(rho: &ReducedDensity) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entanglement entropy between `subset` and its complement.
pub fn entanglement_entropy(state: &SpinState, subset: &[usize]) -> Result<f64> {
    Ok(entropy(&reduced_density(state, subset)?))
}

/// `4 det ρ_i`: tangle of qubit `i` against the rest of a pure state.
pub fn one_vs_rest_tangle(state: &SpinState, i: usize) -> Result<f64> {
    let rho = reduced_density(state, &[i])?;
    let m = rho.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    Ok((4.0 * det).clamp(0.0, 1.0))
}

/// Wootters tangle (squared concurrence) of a two-qubit density matrix.
pub fn two_qubit_tangle(rho: &ReducedDensity) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    // σy ⊗ σy is real; ρ is real so ρ* = ρ.
    let yy = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    );
    // √ρ ρ̃ √ρ = M² with M = √ρ (σy⊗σy) √ρ symmetric, so the square roots
    // of its eigenvalues are |eig M| and no second root is taken. Roundoff
    // eigenvalues of ρ are dropped before the first one.
    let root = sym_eig(rho.matrix())?.map(|p| if p > 1e-13 { p.sqrt() } else { 0.0 });
    let mut m = &root * yy * &root;
    crate::numerics::symmetrize(&mut m);
    let mut mu: Vec<f64> = sym_eig(&m)?.values.iter().map(|x| x.abs()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    let c = (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0);
    Ok(c * c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMonogamy {
    pub lhs: f64,
    pub rhs: f64,
}

impl QubitMonogamy {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Qubit monogamy budget for site `i`: one-vs-rest tangle against the sum of
/// pairwise tangles with every other site.
pub fn monogamy_budget_spin(state: &SpinState, i: usize) -> Result<QubitMonogamy> {
    let n = state.n;
    if n < 3 {
        return Err(Error::invalid("n", format!("monogamy needs at least 3 qubits, got {n}")));
    }
    if i >= n {
        return Err(Error::invalid("site", format!("{i} out of range for n = {n}")));
    }
    let lhs = one_vs_rest_tangle(state, i)?;
    let mut rhs = 0.0;
    for j in (0..n).filter(|&j| j != i) {
        rhs += two_qubit_tangle(&reduced_density(state, &[i, j])?)?;
    }
    Ok(QubitMonogamy { lhs, rhs })
}
