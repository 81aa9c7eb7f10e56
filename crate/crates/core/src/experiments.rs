//! Seeded connectivity sweeps, aggregation and CSV output.
//!
//! A scenario expands into tasks `(series, sweep index, replica)`. Each task
//! owns a generator seeded from `(base seed, sweep index, replica)` only, so
//! results do not depend on execution order or on which other grid points
//! are in the sweep. Tasks run in parallel and are folded back in task order.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian;
use crate::graph::{
    self, assign_random_weights, half_partition, BondConvention, Boundary, CouplingGraph,
    PartitionScheme,
};
use crate::numerics::{quad_abs_log, DEFAULT_QUAD_TOL};
use crate::spin;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Spin,
    Harmonic,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Spin => "spin",
            Model::Harmonic => "harmonic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Chain,
    Random,
    BipartiteRandom,
    BipartiteRegular,
    Complete,
    /// Closed chain with `n_c` chosen per point to maximize entanglement.
    Optimal,
}

impl Topology {
    pub const NAMES: [&'static str; 6] = [
        "chain",
        "random",
        "bipartite_random",
        "bipartite_regular",
        "complete",
        "optimal",
    ];

    fn is_random(self) -> bool {
        matches!(self, Topology::Random | Topology::BipartiteRandom)
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "chain" => Topology::Chain,
            "random" => Topology::Random,
            "bipartite_random" => Topology::BipartiteRandom,
            "bipartite_regular" => Topology::BipartiteRegular,
            "complete" => Topology::Complete,
            "optimal" => Topology::Optimal,
            other => {
                return Err(format!(
                    "unknown topology `{other}` (expected one of {})",
                    Topology::NAMES.join(", ")
                ))
            }
        })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Topology::Chain => 0,
            Topology::Random => 1,
            Topology::BipartiteRandom => 2,
            Topology::BipartiteRegular => 3,
            Topology::Complete => 4,
            Topology::Optimal => 5,
        };
        f.write_str(Topology::NAMES[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NeighborCount,
    EdgeProbability,
    Size,
    Alpha,
}

impl SweepParam {
    fn is_integer(self) -> bool {
        matches!(self, SweepParam::NeighborCount | SweepParam::Size)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::NeighborCount => "n_c",
            SweepParam::EdgeProbability => "c_p",
            SweepParam::Size => "n",
            SweepParam::Alpha => "alpha",
        })
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "n_c" | "nc" => SweepParam::NeighborCount,
            "c_p" | "cp" => SweepParam::EdgeProbability,
            "n" => SweepParam::Size,
            "alpha" | "α" => SweepParam::Alpha,
            other => return Err(format!("unknown sweep parameter `{other}` (expected n_c, c_p, n or alpha)")),
        })
    }
}

/// Parameter grid `lo, lo + step, …, ≤ hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Self {
        Sweep { param, values }
    }

    pub fn range(param: SweepParam, lo: f64, hi: f64, step: f64) -> std::result::Result<Self, String> {
        if step.is_nan() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("step must be positive and bounds finite, got {lo}:{hi}:{step}"));
        }
        if hi < lo {
            return Err(format!("upper bound {hi} is below lower bound {lo}"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        let values = (0..count)
            .map(|i| {
                let v = lo + i as f64 * step;
                // keep decimal grids like 0.1, 0.2, … free of drift
                (v * 1e12).round() / 1e12
            })
            .collect();
        Ok(Sweep { param, values })
    }
}

impl FromStr for Sweep {
    type Err = String;

    /// `<name>:<lo>:<hi>[:<step>]`; the step defaults to 1 for `n_c`/`n` and
    /// 0.1 otherwise.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("expected <name>:<lo>:<hi>[:<step>], got `{s}`"));
        }
        let param: SweepParam = parts[0].parse()?;
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number in `{s}`"))
        };
        let lo = num(parts[1])?;
        let hi = num(parts[2])?;
        let step = match parts.get(3) {
            Some(t) => num(t)?,
            None if param.is_integer() => 1.0,
            None => 0.1,
        };
        if param.is_integer() && (lo.fract() != 0.0 || hi.fract() != 0.0 || step.fract() != 0.0) {
            return Err(format!("{param} sweeps take integer bounds and step, got `{s}`"));
        }
        Sweep::range(param, lo, hi, step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Half/half entanglement (entropy for spins, log-negativity for modes).
    Entanglement,
    /// The integral `f(α, n_c)` behind the large-`n` bipartite limit.
    FCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: Model,
    pub topology: Topology,
    pub quantity: Quantity,
    pub n: usize,
    pub sweep: Sweep,
    /// One series per coupling constant (harmonic model and f-curve).
    pub alphas: Vec<f64>,
    /// Uniform interval for random spin couplings.
    pub weight_interval: (f64, f64),
    /// `n_c` when it is not the swept parameter.
    pub fixed_nc: usize,
    /// `c_p` when it is not the swept parameter.
    pub fixed_cp: f64,
    pub boundary: Boundary,
    pub seeds: usize,
    pub base_seed: u64,
    pub partition: PartitionScheme,
    pub bond_convention: BondConvention,
    pub monogamy: bool,
    pub normalize: bool,
}

impl ScenarioConfig {
    /// Replicas actually run per grid point: deterministic harmonic
    /// topologies have nothing to average over.
    pub fn replicas(&self) -> usize {
        match self.model {
            Model::Harmonic if !self.topology.is_random() => 1,
            _ => self.seeds,
        }
    }

    fn series_alphas(&self) -> Vec<Option<f64>> {
        match (self.model, self.quantity, self.sweep.param) {
            (Model::Spin, _, _) => vec![None],
            (_, _, SweepParam::Alpha) => vec![None],
            _ => self.alphas.iter().copied().map(Some).collect(),
        }
    }

    fn point(&self, alpha: Option<f64>, value: f64) -> Point {
        let mut p = Point {
            n: self.n,
            n_c: self.fixed_nc,
            c_p: self.fixed_cp,
            alpha: alpha.unwrap_or(f64::NAN),
        };
        match self.sweep.param {
            SweepParam::NeighborCount => p.n_c = value as usize,
            SweepParam::EdgeProbability => p.c_p = value,
            SweepParam::Size => p.n = value as usize,
            SweepParam::Alpha => p.alpha = value,
        }
        p
    }

    /// Checks every grid point before any computation starts. Error names
    /// match the command-line flags.
    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::invalid("seeds", "must be at least 1"));
        }
        if self.sweep.values.is_empty() {
            return Err(Error::invalid("sweep", "grid is empty"));
        }
        let (lo, hi) = self.weight_interval;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::invalid("weights", format!("[{lo}, {hi}] is not a valid interval")));
        }
        match (self.model, self.sweep.param) {
            (Model::Spin, SweepParam::Alpha) => {
                return Err(Error::invalid("sweep", "spin scenarios cannot sweep alpha"))
            }
            (Model::Harmonic, SweepParam::Alpha) => {}
            (Model::Harmonic, _) if self.alphas.is_empty() => {
                return Err(Error::invalid("alpha", "at least one coupling constant is required"))
            }
            _ => {}
        }
        for &a in &self.alphas {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::invalid("alpha", format!("{a} must be finite and non-negative")));
            }
        }
        if self.quantity == Quantity::FCurve {
            return self.validate_fcurve();
        }
        if self.model == Model::Spin && self.topology == Topology::Optimal {
            return Err(Error::invalid("topology", "`optimal` is only defined for harmonic chains"));
        }
        for &v in &self.sweep.values {
            let p = self.point(None, v);
            if self.sweep.param == SweepParam::Alpha && (p.alpha.is_nan() || p.alpha < 0.0) {
                return Err(Error::invalid("sweep", format!("alpha {v} must be non-negative")));
            }
            let n_name = if self.sweep.param == SweepParam::Size { "sweep" } else { "n" };
            if p.n == 0 || !p.n.is_multiple_of(2) {
                return Err(Error::invalid(
                    n_name,
                    format!("{} must be a positive even number for a half/half partition", p.n),
                ));
            }
            if self.model == Model::Spin && p.n > spin::MAX_SITES {
                return Err(Error::invalid(n_name, format!("{} exceeds the spin limit of {}", p.n, spin::MAX_SITES)));
            }
            if self.monogamy && p.n < 3 {
                return Err(Error::invalid(n_name, "monogamy budgets need at least 3 sites"));
            }
            let param_name = match self.sweep.param {
                SweepParam::NeighborCount | SweepParam::EdgeProbability => "sweep",
                _ => match self.topology {
                    Topology::Random | Topology::BipartiteRandom => "cp",
                    _ => "nc",
                },
            };
            self.build_graph(&p, &mut ChaCha8Rng::seed_from_u64(0))
                .map_err(|e| match e {
                    Error::InvalidParameter { name: "n", reason } => Error::InvalidParameter { name: n_name, reason },
                    Error::InvalidParameter { reason, .. } => Error::InvalidParameter { name: param_name, reason },
                    other => other,
                })?;
        }
        Ok(())
    }

    fn validate_fcurve(&self) -> Result<()> {
        if self.sweep.param != SweepParam::NeighborCount {
            return Err(Error::invalid("sweep", "the f-curve sweeps n_c"));
        }
        if self.alphas.iter().any(|&a| a <= 0.0) {
            return Err(Error::invalid("alpha", "the f-curve needs positive coupling constants"));
        }
        if self.sweep.values.iter().any(|&v| v < 1.0) {
            return Err(Error::invalid("sweep", "n_c starts at 1"));
        }
        Ok(())
    }

    fn build_graph(&self, p: &Point, rng: &mut ChaCha8Rng) -> Result<CouplingGraph> {
        match self.topology {
            Topology::Chain => graph::build_chain_with(p.n, p.n_c, self.boundary, self.bond_convention),
            Topology::Random => graph::build_random(p.n, p.c_p, rng),
            Topology::BipartiteRandom => graph::build_bipartite_random(p.n, p.c_p, rng),
            Topology::BipartiteRegular => graph::build_bipartite_regular(p.n, p.n_c),
            Topology::Complete => {
                if p.n < 2 {
                    return Err(Error::invalid("n", "complete graph needs at least 2 sites"));
                }
                Ok(CouplingGraph::complete(p.n, self.bond_convention))
            }
            Topology::Optimal => graph::build_chain_with(p.n, 1, Boundary::Closed, self.bond_convention),
        }
    }

    /// Human-readable `key=value` echo of the configuration.
    pub fn describe(&self) -> Vec<(String, String)> {
        let alphas = self
            .alphas
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("scenario".into(), self.name.clone()),
            ("model".into(), self.model.to_string()),
            ("topology".into(), self.topology.to_string()),
            ("n".into(), self.n.to_string()),
            ("sweep".into(), self.sweep.param.to_string()),
            ("alpha".into(), alphas),
            ("weights".into(), format!("{}:{}", self.weight_interval.0, self.weight_interval.1)),
            ("nc".into(), self.fixed_nc.to_string()),
            ("cp".into(), self.fixed_cp.to_string()),
            ("boundary".into(), format!("{:?}", self.boundary).to_lowercase()),
            ("seeds".into(), self.replicas().to_string()),
            ("seed".into(), self.base_seed.to_string()),
            ("partition".into(), self.partition.to_string()),
            ("bond-convention".into(), self.bond_convention.to_string()),
            ("monogamy".into(), self.monogamy.to_string()),
        ]
    }

    /// Caveats that travel with the output.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.monogamy && self.model == Model::Harmonic {
            notes.push(
                "monogamy_rhs sums squared negativities of the reduced two-mode states; \
                 this lower-bounds the convex-roof Gaussian tangle"
                    .to_string(),
            );
        }
        if self.model == Model::Spin {
            notes.push(format!(
                "spin sizes are limited to n <= {} (exact diagonalization per magnetization sector)",
                spin::MAX_SITES
            ));
            notes.push("energy is the total ground energy with each edge counted once".to_string());
        }
        if matches!(self.topology, Topology::Complete | Topology::Chain | Topology::Optimal) {
            notes.push(format!("bond convention: {}", self.bond_convention));
        }
        notes
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    n: usize,
    n_c: usize,
    c_p: f64,
    alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonogamyValues {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Coupling constant of the series (`None` for spin runs and α sweeps).
    pub alpha: Option<f64>,
    pub sweep_index: usize,
    pub sweep_value: f64,
    pub replica: usize,
    pub seed: u64,
    pub entanglement: Option<f64>,
    pub energy: Option<f64>,
    pub degeneracy: Option<usize>,
    pub monogamy: Option<MonogamyValues>,
    pub degenerate: bool,
    pub error: Option<String>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator seed for one replica at one grid point.
pub fn child_seed(base: u64, sweep_index: usize, replica: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ sweep_index as u64) ^ replica as u64)
}

#[derive(Debug, Default)]
struct Measured {
    entanglement: f64,
    energy: Option<f64>,
    degeneracy: Option<usize>,
    monogamy: Option<MonogamyValues>,
}

fn measure(cfg: &ScenarioConfig, p: &Point, seed: u64) -> Result<Measured> {
    if cfg.quantity == Quantity::FCurve {
        return Ok(Measured {
            entanglement: quad_abs_log(p.alpha, p.n_c, DEFAULT_QUAD_TOL)?,
            ..Default::default()
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = half_partition(p.n, cfg.partition)?;
    match cfg.model {
        Model::Harmonic if cfg.topology == Topology::Optimal => {
            let max_nc = match cfg.bond_convention {
                BondConvention::Single => p.n / 2,
                BondConvention::Double => p.n,
            };
            let mut best = 0.0f64;
            for n_c in 1..=max_nc {
                let g = graph::build_chain_with(p.n, n_c, Boundary::Closed, cfg.bond_convention)?;
                best = best.max(gaussian::logneg_of_graph(&g, p.alpha, &mask)?);
            }
            Ok(Measured {
                entanglement: best,
                ..Default::default()
            })
        }
        Model::Harmonic => {
            let g = cfg.build_graph(p, &mut rng)?;
            let gs = gaussian::ground_state(&gaussian::build_potential(&g, p.alpha)?)?;
            let entanglement = gaussian::log_negativity(&gs, &mask)?;
            let monogamy = if cfg.monogamy {
                let b = gaussian::monogamy_budget(&gs)?;
                Some(MonogamyValues {
                    lhs: b.lhs,
                    rhs: b.rhs,
                    residual: b.residual,
                })
            } else {
                None
            };
            Ok(Measured {
                entanglement,
                monogamy,
                ..Default::default()
            })
        }
        Model::Spin => {
            let g = cfg.build_graph(p, &mut rng)?;
            let (lo, hi) = cfg.weight_interval;
            let g = assign_random_weights(&g, &mut rng, lo, hi)?;
            let sol = spin::ground_state_with_degeneracy(&g)?;
            let entanglement = spin::entanglement_entropy(&sol.state, &mask.group_a())?;
            let monogamy = if cfg.monogamy {
                let b = spin::monogamy_budget_spin(&sol.state, 0)?;
                Some(MonogamyValues {
                    lhs: b.lhs,
                    rhs: b.rhs,
                    residual: b.residual(),
                })
            } else {
                None
            };
            Ok(Measured {
                entanglement,
                energy: sol.state.energy(),
                degeneracy: Some(sol.degeneracy),
                monogamy,
            })
        }
    }
}

/// Computes a single record, exactly as it would appear inside a full sweep.
pub fn run_point(
    cfg: &ScenarioConfig,
    alpha: Option<f64>,
    sweep_index: usize,
    replica: usize,
) -> RunRecord {
    let sweep_value = cfg.sweep.values[sweep_index];
    let seed = child_seed(cfg.base_seed, sweep_index, replica);
    let p = cfg.point(alpha, sweep_value);
    let mut rec = RunRecord {
        alpha,
        sweep_index,
        sweep_value,
        replica,
        seed,
        entanglement: None,
        energy: None,
        degeneracy: None,
        monogamy: None,
        degenerate: false,
        error: None,
    };
    match measure(cfg, &p, seed) {
        Ok(m) => {
            rec.entanglement = Some(m.entanglement.max(0.0));
            rec.energy = m.energy;
            rec.degeneracy = m.degeneracy;
            rec.degenerate = m.degeneracy.is_some_and(|d| d > 0);
            rec.monogamy = m.monogamy;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Runs every `(series, sweep value, replica)` task. Failures are captured
/// per record and never abort the sweep.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let replicas = cfg.replicas();
    let tasks: Vec<(Option<f64>, usize, usize)> = cfg
        .series_alphas()
        .into_iter()
        .flat_map(|a| {
            (0..cfg.sweep.values.len()).flat_map(move |v| (0..replicas).map(move |r| (a, v, r)))
        })
        .collect();
    Ok(tasks
        .into_par_iter()
        .map(|(a, v, r)| run_point(cfg, a, v, r))
        .collect())
}

/// Statistics of one grid point in one series.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub alpha: Option<f64>,
    pub sweep_value: f64,
    pub mean: Option<f64>,
    pub max: Option<f64>,
    pub stddev: Option<f64>,
    pub n_seeds: usize,
    /// Mean over records not flagged degenerate; `None` when all are.
    pub filtered_mean: Option<f64>,
    pub energy_mean: Option<f64>,
    pub degeneracy_mean: Option<f64>,
    pub monogamy_lhs_mean: Option<f64>,
    pub monogamy_rhs_mean: Option<f64>,
    pub normalized: Option<f64>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Groups records by series and sweep value, in first-appearance order.
/// Records carrying an error are left out of every statistic.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut groups: Vec<(Option<f64>, usize, Vec<&RunRecord>)> = Vec::new();
    for r in records {
        let key_matches = |g: &(Option<f64>, usize, Vec<&RunRecord>)| {
            g.0.map(f64::to_bits) == r.alpha.map(f64::to_bits) && g.1 == r.sweep_index
        };
        match groups.iter_mut().find(|g| key_matches(g)) {
            Some(g) => g.2.push(r),
            None => groups.push((r.alpha, r.sweep_index, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(alpha, _, recs)| {
            let sweep_value = recs[0].sweep_value;
            let ok: Vec<&RunRecord> = recs.into_iter().filter(|r| r.error.is_none()).collect();
            let values: Vec<f64> = ok.iter().filter_map(|r| r.entanglement).collect();
            let mean = mean_of(values.iter().copied());
            let max = values.iter().copied().reduce(f64::max);
            let stddev = mean.map(|m| {
                (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
            });
            Aggregate {
                alpha,
                sweep_value,
                mean,
                max,
                stddev,
                n_seeds: values.len(),
                filtered_mean: mean_of(
                    ok.iter()
                        .filter(|r| !r.degenerate)
                        .filter_map(|r| r.entanglement),
                ),
                energy_mean: mean_of(ok.iter().filter_map(|r| r.energy)),
                degeneracy_mean: mean_of(ok.iter().filter_map(|r| r.degeneracy.map(|d| d as f64))),
                monogamy_lhs_mean: mean_of(ok.iter().filter_map(|r| r.monogamy.map(|m| m.lhs))),
                monogamy_rhs_mean: mean_of(ok.iter().filter_map(|r| r.monogamy.map(|m| m.rhs))),
                normalized: None,
            }
        })
        .collect()
}

/// Divides each series' means by that series' own maximum mean.
pub fn normalize_series(aggs: &mut [Aggregate]) {
    let mut series: Vec<Option<u64>> = Vec::new();
    for a in aggs.iter() {
        let key = a.alpha.map(f64::to_bits);
        if !series.contains(&key) {
            series.push(key);
        }
    }
    for key in series {
        let peak = aggs
            .iter()
            .filter(|a| a.alpha.map(f64::to_bits) == key)
            .filter_map(|a| a.mean)
            .fold(f64::NEG_INFINITY, f64::max);
        for a in aggs.iter_mut().filter(|a| a.alpha.map(f64::to_bits) == key) {
            a.normalized = match a.mean {
                Some(m) if peak > 0.0 => Some(m / peak),
                Some(_) => Some(0.0),
                None => None,
            };
        }
    }
}

pub const CSV_COLUMNS: [&str; 11] = [
    "alpha",
    "sweep_value",
    "mean",
    "max",
    "stddev",
    "n_seeds",
    "filtered_mean",
    "energy_mean",
    "degeneracy_mean",
    "monogamy_lhs_mean",
    "monogamy_rhs_mean",
];

/// Decimal rendering with 12 significant digits (`%.12g` style).
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_sig12).unwrap_or_default()
}

pub fn write_csv<W: Write>(aggs: &[Aggregate], with_normalized: bool, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    if with_normalized {
        header.push("normalized");
    }
    w.write_record(&header)?;
    for a in aggs {
        let mut row = vec![
            cell(a.alpha),
            format_sig12(a.sweep_value),
            cell(a.mean),
            cell(a.max),
            cell(a.stddev),
            a.n_seeds.to_string(),
            cell(a.filtered_mean),
            cell(a.energy_mean),
            cell(a.degeneracy_mean),
            cell(a.monogamy_lhs_mean),
            cell(a.monogamy_rhs_mean),
        ];
        if with_normalized {
            row.push(cell(a.normalized));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(aggs: &[Aggregate], with_normalized: bool, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(aggs, with_normalized, io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Sidecar path holding the configuration echo and notes.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn emit_metadata(cfg: &ScenarioConfig, path: &Path) -> Result<()> {
    let mut text = String::new();
    for (k, v) in cfg.describe() {
        text.push_str(&format!("{k}={v}\n"));
    }
    for note in cfg.notes() {
        text.push_str(&format!("note={note}\n"));
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<Aggregate>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let bad = |what: &str| Error::invalid("csv", format!("{}: bad {what}", path.display()));
    let opt = |s: Option<&str>| -> Result<Option<f64>> {
        match s {
            None | Some("") => Ok(None),
            Some(t) => t.parse().map(Some).map_err(|_| bad("number")),
        }
    };
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let sweep_value = opt(row.get(1))?.ok_or_else(|| bad("sweep_value"))?;
        let n_seeds = row
            .get(5)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("n_seeds"))?;
        out.push(Aggregate {
            alpha: opt(row.get(0))?,
            sweep_value,
            mean: opt(row.get(2))?,
            max: opt(row.get(3))?,
            stddev: opt(row.get(4))?,
            n_seeds,
            filtered_mean: opt(row.get(6))?,
            energy_mean: opt(row.get(7))?,
            degeneracy_mean: opt(row.get(8))?,
            monogamy_lhs_mean: opt(row.get(9))?,
            monogamy_rhs_mean: opt(row.get(10))?,
            normalized: opt(row.get(11))?,
        });
    }
    Ok(out)
}
