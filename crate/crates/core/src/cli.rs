//! Command-line parsing into validated scenarios.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{self, Model, Quantity, ScenarioConfig, Sweep, SweepParam, Topology};
use crate::graph::{BondConvention, Boundary, PartitionScheme};

#[derive(Debug, Parser)]
#[command(
    name = "entconn",
    version,
    about = "Ground-state entanglement versus connectivity in harmonic and XX spin networks",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Harmonic chain, log-negativity of the half/half cut versus n_c
    HarmonicChain(Flags),
    /// Harmonic bipartite graphs (random with a c_p sweep, regular with n_c)
    HarmonicBipartite(Flags),
    /// Harmonic log-negativity versus system size
    HarmonicScaling(Flags),
    /// XX spin chain with random couplings, entropy versus n_c
    SpinChain(Flags),
    /// XX spins on random graphs, entropy and degeneracy versus c_p
    SpinRandom(Flags),
    /// XX spins on bipartite graphs
    SpinBipartite(Flags),
    /// Gaussian tangle budget of mode 0 on regular bipartite graphs
    MonogamyGaussian(Flags),
    /// Qubit tangle budget of site 0 on bipartite XX graphs
    MonogamySpin(Flags),
    /// Integral f(alpha, n_c) behind the large-n bipartite limit
    FCurve(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::HarmonicChain(f) => ("harmonic-chain", f),
            Command::HarmonicBipartite(f) => ("harmonic-bipartite", f),
            Command::HarmonicScaling(f) => ("harmonic-scaling", f),
            Command::SpinChain(f) => ("spin-chain", f),
            Command::SpinRandom(f) => ("spin-random", f),
            Command::SpinBipartite(f) => ("spin-bipartite", f),
            Command::MonogamyGaussian(f) => ("monogamy-gaussian", f),
            Command::MonogamySpin(f) => ("monogamy-spin", f),
            Command::FCurve(f) => ("f-curve", f),
        }
    }
}

#[derive(Debug, Clone, Args)]
struct Flags {
    /// Number of sites or modes
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Coupling constant; repeat for several series
    #[arg(long, value_name = "ALPHA", action = ArgAction::Append, allow_negative_numbers = true)]
    alpha: Vec<f64>,
    /// Swept parameter and grid: <n_c|c_p|n|alpha>:<lo>:<hi>[:<step>]
    #[arg(long, value_name = "GRID")]
    sweep: Option<Sweep>,
    /// Replicas per grid point
    #[arg(long, value_name = "COUNT")]
    seeds: Option<usize>,
    /// Base seed
    #[arg(long, value_name = "BASE")]
    seed: Option<u64>,
    /// How pairs reached by two ring offsets are weighted: single|double
    #[arg(long, value_name = "CONVENTION")]
    bond_convention: Option<BondConvention>,
    /// Half/half partition: contiguous|parity
    #[arg(long, value_name = "SCHEME")]
    partition: Option<PartitionScheme>,
    /// Chain boundary: open|closed
    #[arg(long, value_name = "KIND")]
    boundary: Option<Boundary>,
    /// Graph family: chain|random|bipartite_random|bipartite_regular|complete|optimal
    #[arg(long, value_name = "KIND")]
    topology: Option<Topology>,
    /// Neighbor count when n_c is not swept
    #[arg(long, value_name = "K")]
    nc: Option<usize>,
    /// Edge probability when c_p is not swept
    #[arg(long, value_name = "P", allow_negative_numbers = true)]
    cp: Option<f64>,
    /// Interval for random spin couplings: <lo>:<hi>
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    weights: Option<String>,
    /// Also record the monogamy budget of site 0
    #[arg(long)]
    monogamy: bool,
    /// Add a column with means divided by their series maximum
    #[arg(long)]
    normalize: bool,
    /// CSV output path (a .meta sidecar is written next to it)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Scenario file of key=value lines; command-line flags take precedence
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// More progress output
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
    /// Only errors
    #[arg(short, long, conflicts_with = "verbose")]
    quiet: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInvocation {
    pub subcommand: String,
    pub config: ScenarioConfig,
    pub out: Option<PathBuf>,
    /// -1 quiet, 0 normal, >0 verbose.
    pub verbosity: i8,
}

#[derive(Debug)]
pub enum Parsed {
    /// Help or version text; print it and exit 0.
    Help(String),
    Run(ParsedInvocation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message.trim_end())
    }
}

impl std::error::Error for CliError {}

fn usage(flag: &str, reason: impl std::fmt::Display) -> CliError {
    CliError {
        message: format!("error: invalid value for `--{flag}`: {reason}"),
        exit_code: 2,
    }
}

/// Top-level help text.
pub fn help_text() -> String {
    Cli::command().render_long_help().to_string()
}

fn clap_parse(args: &[OsString]) -> Result<Result<Cli, String>, CliError> {
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(Ok(cli)),
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Ok(Err(e.render().to_string())),
                _ => Err(CliError {
                    message: e.render().to_string(),
                    exit_code: 2,
                }),
            }
        }
    }
}

/// Parses `argv` (including the program name) into a validated invocation.
pub fn parse<I, T>(argv: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match clap_parse(&args)? {
        Ok(cli) => cli,
        Err(help) => return Ok(Parsed::Help(help)),
    };
    let cli = match &cli.command.parts().1.config {
        None => cli,
        Some(path) => {
            let merged = merge_scenario_file(&args, path)?;
            match clap_parse(&merged)? {
                Ok(cli) => cli,
                Err(help) => return Ok(Parsed::Help(help)),
            }
        }
    };
    let (name, flags) = cli.command.parts();
    build_invocation(name, flags).map(Parsed::Run)
}

/// Inserts scenario-file flags right after the subcommand, skipping keys
/// that also appear on the command line.
fn merge_scenario_file(args: &[OsString], path: &PathBuf) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage("config", format!("cannot read {}: {e}", path.display())))?;
    let on_cli = |key: &str| {
        let long = format!("--{key}");
        let eq = format!("--{key}=");
        args.iter().any(|a| {
            a.to_str()
                .is_some_and(|s| s == long || s.starts_with(&eq))
        })
    };
    let mut extra: Vec<OsString> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage("config", format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(usage("config", "scenario files cannot include other scenario files"));
        }
        if on_cli(&key) {
            continue;
        }
        match key.as_str() {
            "monogamy" | "normalize" | "quiet" => match value {
                "true" | "1" | "yes" => extra.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                other => return Err(usage(&key, format!("expected true or false, got `{other}`"))),
            },
            "alpha" => {
                for a in value.split(',') {
                    extra.push("--alpha".into());
                    extra.push(a.trim().into());
                }
            }
            _ => {
                extra.push(format!("--{key}").into());
                extra.push(value.into());
            }
        }
    }
    // program name and subcommand first, then file values, then the rest
    let mut merged = args[..2].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[2..]);
    Ok(merged)
}

fn parse_interval(s: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| usage("weights", format!("expected <lo>:<hi>, got `{s}`")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| usage("weights", format!("`{t}` is not a number")))
    };
    Ok((num(lo)?, num(hi)?))
}

struct Defaults {
    model: Model,
    topology: Topology,
    quantity: Quantity,
    n: usize,
    partition: PartitionScheme,
    boundary: Boundary,
    monogamy: bool,
}

fn defaults(name: &str) -> Defaults {
    let base = Defaults {
        model: Model::Harmonic,
        topology: Topology::Chain,
        quantity: Quantity::Entanglement,
        n: 100,
        partition: PartitionScheme::Contiguous,
        boundary: Boundary::Open,
        monogamy: false,
    };
    match name {
        "harmonic-chain" => base,
        "harmonic-bipartite" => Defaults {
            topology: Topology::BipartiteRandom,
            partition: PartitionScheme::Parity,
            ..base
        },
        "harmonic-scaling" => Defaults {
            boundary: Boundary::Closed,
            ..base
        },
        "spin-chain" => Defaults {
            model: Model::Spin,
            n: 14,
            boundary: Boundary::Closed,
            ..base
        },
        "spin-random" => Defaults {
            model: Model::Spin,
            topology: Topology::Random,
            n: 10,
            ..base
        },
        "spin-bipartite" => Defaults {
            model: Model::Spin,
            topology: Topology::BipartiteRegular,
            n: 12,
            partition: PartitionScheme::Parity,
            ..base
        },
        "monogamy-gaussian" => Defaults {
            topology: Topology::BipartiteRegular,
            n: 90,
            partition: PartitionScheme::Parity,
            monogamy: true,
            ..base
        },
        "monogamy-spin" => Defaults {
            model: Model::Spin,
            topology: Topology::BipartiteRegular,
            n: 12,
            partition: PartitionScheme::Parity,
            monogamy: true,
            ..base
        },
        "f-curve" => Defaults {
            topology: Topology::BipartiteRegular,
            quantity: Quantity::FCurve,
            partition: PartitionScheme::Parity,
            ..base
        },
        other => unreachable!("subcommand {other} has no defaults"),
    }
}

fn default_sweep(name: &str, topology: Topology, boundary: Boundary, n: usize, conv: BondConvention) -> String {
    match name {
        "harmonic-chain" | "spin-chain" => {
            let hi = match (boundary, conv) {
                (Boundary::Open, _) => n.saturating_sub(1),
                (Boundary::Closed, BondConvention::Single) => n / 2,
                (Boundary::Closed, BondConvention::Double) => n,
            };
            format!("n_c:1:{}", hi.max(1))
        }
        "harmonic-bipartite" | "spin-bipartite" if topology == Topology::BipartiteRandom => {
            "c_p:0.05:1:0.05".into()
        }
        "harmonic-bipartite" | "spin-bipartite" | "monogamy-spin" => {
            // largest n_c whose odd offsets stay distinct modulo n
            format!("n_c:1:{}", ((n + 2) / 4).max(1).min(n / 2))
        }
        "harmonic-scaling" => "n:20:200:20".into(),
        "spin-random" => "c_p:0:1:0.1".into(),
        "monogamy-gaussian" => format!("n_c:1:{}", (n / 4).max(1)),
        "f-curve" => "n_c:1:20".into(),
        other => unreachable!("subcommand {other} has no sweep"),
    }
}

fn build_invocation(name: &str, f: &Flags) -> Result<ParsedInvocation, CliError> {
    let d = defaults(name);
    let n = f.n.unwrap_or(d.n);
    let bond_convention = f.bond_convention.unwrap_or_default();
    let boundary = f.boundary.unwrap_or(d.boundary);

    // a bipartite sweep over n_c implies the regular family, c_p the random one
    let topology = match (f.topology, name, f.sweep.as_ref().map(|s| s.param)) {
        (Some(t), _, _) => t,
        (None, "harmonic-bipartite" | "spin-bipartite", Some(SweepParam::NeighborCount)) => {
            Topology::BipartiteRegular
        }
        (None, "harmonic-bipartite" | "spin-bipartite", Some(SweepParam::EdgeProbability)) => {
            Topology::BipartiteRandom
        }
        _ => d.topology,
    };
    let sweep = match &f.sweep {
        Some(s) => s.clone(),
        None => default_sweep(name, topology, boundary, n, bond_convention)
            .parse()
            .map_err(|e| usage("sweep", e))?,
    };
    let weight_interval = match &f.weights {
        Some(s) => parse_interval(s)?,
        None => (0.0, 1.0),
    };
    if let Some(cp) = f.cp {
        if !(0.0..=1.0).contains(&cp) {
            return Err(usage("cp", format!("{cp} is outside [0, 1]")));
        }
    }
    if d.model == Model::Spin && !f.alpha.is_empty() {
        return Err(usage("alpha", "spin scenarios have no coupling constant"));
    }
    let config = ScenarioConfig {
        name: name.to_string(),
        model: d.model,
        topology,
        quantity: d.quantity,
        n,
        sweep,
        alphas: if f.alpha.is_empty() { vec![1.0] } else { f.alpha.clone() },
        weight_interval,
        fixed_nc: f.nc.unwrap_or(1),
        fixed_cp: f.cp.unwrap_or(0.5),
        boundary,
        seeds: f.seeds.unwrap_or(100),
        base_seed: f.seed.unwrap_or(0),
        partition: f.partition.unwrap_or(d.partition),
        bond_convention,
        monogamy: f.monogamy || d.monogamy,
        normalize: f.normalize,
    };
    config.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => usage(name, reason),
        other => usage("config", other),
    })?;
    Ok(ParsedInvocation {
        subcommand: name.to_string(),
        config,
        out: f.out.clone(),
        verbosity: if f.quiet { -1 } else { f.verbose.min(100) as i8 },
    })
}

/// Summary of a finished run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: usize,
    pub failures: usize,
    pub aggregates: Vec<experiments::Aggregate>,
}

/// Runs the scenario, writes outputs and prints a summary table to stdout.
pub fn execute(inv: &ParsedInvocation) -> crate::Result<RunSummary> {
    let cfg = &inv.config;
    if inv.verbosity > 0 {
        for (k, v) in cfg.describe() {
            println!("# {k}={v}");
        }
    }
    let records = experiments::run_scenario(cfg)?;
    let failures: Vec<_> = records.iter().filter(|r| r.error.is_some()).collect();
    if inv.verbosity >= 0 {
        for r in failures.iter().take(5) {
            eprintln!(
                "warning: sweep value {} replica {} failed: {}",
                r.sweep_value,
                r.replica,
                r.error.as_deref().unwrap_or_default()
            );
        }
    }
    let mut aggs = experiments::aggregate(&records);
    if cfg.normalize {
        experiments::normalize_series(&mut aggs);
    }
    if let Some(path) = &inv.out {
        experiments::emit_csv(&aggs, cfg.normalize, path)?;
        experiments::emit_metadata(cfg, &experiments::metadata_path(path))?;
    }
    if inv.verbosity >= 0 {
        print!("{}", summary_table(cfg, &aggs));
        for note in cfg.notes() {
            println!("note: {note}");
        }
        println!("{} records, {} failed", records.len(), failures.len());
    }
    Ok(RunSummary {
        records: records.len(),
        failures: failures.len(),
        aggregates: aggs,
    })
}

fn summary_table(cfg: &ScenarioConfig, aggs: &[experiments::Aggregate]) -> String {
    let show = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8} {:>10} {:>12} {:>12} {:>12}",
        "alpha",
        cfg.sweep.param.to_string(),
        "mean",
        "max",
        "stddev"
    );
    for a in aggs {
        let _ = writeln!(
            out,
            "{:>8} {:>10} {:>12} {:>12} {:>12}",
            a.alpha.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
            a.sweep_value,
            show(a.mean),
            show(a.max),
            show(a.stddev)
        );
    }
    out
}
