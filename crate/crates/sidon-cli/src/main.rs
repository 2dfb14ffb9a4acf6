//! Command-line surface for the Sidon set toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input
//! error, 3 internal invariant breach (an exact identity failed to hold,
//! which indicates a bug, never an expected outcome).

mod figures;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use sidon::{
    anneal, combined_bound, construct, decimal_string, et_identity_check,
    exhaustive_optimal, parse_rational, parse_ruler_line, run_search, u_partition, v_statistic,
    AnnealOutcome, BoundParams, Construction, OptimizerConfig, SearchBudget, SearchConfig,
    SearchTable, SidonSet, Source, WindowProfile, REFERENCE_POINT,
};

/// Environment variable naming the directory for the search cache file.
const CACHE_DIR_ENV: &str = "SIDON_CACHE_DIR";
const CACHE_FILE_NAME: &str = "search.tsv";

#[derive(Parser)]
#[command(
    name = "sidon",
    version,
    about = "Construct, search, verify, and bound Sidon sets (Golomb rulers)"
)]
struct Cli {
    /// Output format for tabular data
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Print rational quantities exactly as numerator/denominator
    #[arg(long, global = true)]
    exact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Tsv,
}

impl Format {
    fn sep(self) -> &'static str {
        match self {
            Format::Csv => ",",
            Format::Tsv => "\t",
            Format::Text => "  ",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Singer,
    Bose,
    Ruzsa,
}

impl From<ConstructionArg> for Construction {
    fn from(c: ConstructionArg) -> Construction {
        match c {
            ConstructionArg::Singer => Construction::Singer,
            ConstructionArg::Bose => Construction::Bose,
            ConstructionArg::Ruzsa => Construction::Ruzsa,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Exact b_k from the exhaustive oracle
    #[value(name = "f1", alias = "f1_bk_exact")]
    F1,
    /// Lower bound on b_k from a search table
    #[value(name = "f2", alias = "f2_bk_lower")]
    F2,
    /// V(A, T)/k^(5/2) per set
    #[value(name = "f3", alias = "f3_v")]
    F3,
    /// 2S(A, T)/k^(5/2) per set
    #[value(name = "f4", alias = "f4_s")]
    F4,
    /// (V + 2S)/k^(5/2) per set
    #[value(name = "f5", alias = "f5_vs")]
    F5,
    /// Scatter of (V/k^(5/2), 2S/k^(5/2))
    #[value(name = "f6", alias = "f6_scatter")]
    F6,
    /// Window-count profile A_j of one set
    #[value(name = "f7", alias = "f7_profile")]
    F7,
    /// Fraction of V carried by the edge windows
    #[value(name = "f8", alias = "f8_edge")]
    F8,
}

#[derive(Subcommand)]
enum Command {
    /// Check every ruler in a file for the distinct-differences property
    Verify { file: PathBuf },
    /// Emit a modular Sidon set from a classical construction
    Construct {
        #[arg(value_enum)]
        construction: ConstructionArg,
        /// Prime power (prime for ruzsa)
        #[arg(long)]
        q: u64,
    },
    /// Minimal diameter s_k by exhaustive branch and bound
    Oracle {
        #[arg(long)]
        k: usize,
        /// Node budget for the search
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Time budget in seconds
        #[arg(long)]
        max_seconds: Option<u64>,
    },
    /// Evaluate the two-branch coefficient bound at a parameter tuple
    Bounds {
        /// Use the built-in reference tuple (59/58, 80/319, 195/356, 51/223)
        #[arg(long, conflicts_with_all = ["tau", "alpha", "beta", "tau2", "delta"])]
        reference: bool,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        tau2: Option<String>,
        /// Omit to derive the branch-balancing delta
        #[arg(long)]
        delta: Option<String>,
    },
    /// Anneal the parameter tuple and certify the best point exactly
    Optimize {
        #[arg(long, default_value_t = 1500)]
        steps: usize,
        #[arg(long, default_value_t = 4)]
        chains: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5e-3)]
        temperature: f64,
        #[arg(long, default_value_t = 0.995)]
        cooling: f64,
        /// Grid points per axis for the coarse initialization
        #[arg(long, default_value_t = 6)]
        grid: usize,
        #[arg(long, default_value_t = 10_000_000_000)]
        denominator_cap: u64,
        /// Start every chain at the reference tuple instead of the grid
        #[arg(long)]
        start_reference: bool,
    },
    /// Scan dilations of modular constructions for short rulers per size
    Search {
        #[arg(long, default_value_t = 2)]
        q_lo: u64,
        #[arg(long, default_value_t = 32)]
        q_hi: u64,
        #[arg(long, default_value_t = 2)]
        k_lo: usize,
        #[arg(long, default_value_t = 50)]
        k_hi: usize,
        /// Comma-separated subset of singer,bose,ruzsa (default all)
        #[arg(long)]
        constructions: Option<String>,
        /// Cache file; defaults to $SIDON_CACHE_DIR/search.tsv when that
        /// variable is set
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dilations sampled per modulus above the full-scan limit
        #[arg(long, default_value_t = 64)]
        sample_count: u64,
        #[arg(long, default_value_t = 300_000)]
        full_scan_limit: u64,
        /// Also scan dilations above m/2 (results are identical; mirrors)
        #[arg(long)]
        negations: bool,
    },
    /// Window-profile analytics for rulers in a file
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCmd,
    },
    /// Emit figure data as CSV/TSV
    Figures {
        #[arg(long, value_enum)]
        id: FigureId,
        /// Ruler file (one ruler per line)
        #[arg(long)]
        source: Option<PathBuf>,
        /// Search cache TSV
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Largest k for the exhaustive figure (f1)
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        /// Window length override (default: smallest integer >= k^(3/2))
        #[arg(long)]
        t: Option<u64>,
        /// File line number selecting the ruler for f7
        #[arg(long)]
        line: Option<u64>,
        /// Record size selecting the cache entry for f7
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Window counts A_j for one ruler
    Profile {
        file: PathBuf,
        /// File line number of the ruler (default: first ruler)
        #[arg(long)]
        line: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
    },
    /// Diameter, V, 2S, and the exact identity residual per ruler
    Stats {
        file: PathBuf,
        #[arg(long)]
        t: Option<u64>,
    },
    /// Five-level window partition of one ruler
    Partition {
        file: PathBuf,
        #[arg(long)]
        line: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        /// Outer level scale, default 80/319
        #[arg(long)]
        alpha: Option<String>,
        /// Inner level scale, default 195/356
        #[arg(long)]
        beta: Option<String>,
    },
}

/// A command failure carrying its exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

pub fn verification(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

pub fn invariant(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

/// Renders a rational exactly (num/den) or as a 12-place decimal.
fn show_rat(r: &BigRational, exact: bool) -> String {
    if exact {
        if r.denom().is_one() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    } else {
        decimal_string(r, 12)
    }
}

/// Header plus rows joined by the format separator.
fn table(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    let sep = format.sep();
    let mut out = String::with_capacity(rows.len() * 32 + 64);
    out.push_str(&header.join(sep));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    out
}

/// All rulers in a file with their line numbers, rejecting malformed or
/// non-Sidon lines.
fn read_rulers(path: &PathBuf) -> Result<Vec<(u64, SidonSet)>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        match parse_ruler_line(raw) {
            None => {}
            Some(Err(reason)) => {
                return Err(usage(format!(
                    "{} line {line}: {reason}",
                    path.display()
                )))
            }
            Some(Ok(elems)) => match SidonSet::normalize(&elems) {
                Ok(set) => out.push((line, set)),
                Err(e) => {
                    return Err(verification(format!(
                        "{} line {line}: {e}",
                        path.display()
                    )))
                }
            },
        }
    }
    Ok(out)
}

/// One ruler from a file: the given line, or the first ruler.
fn pick_ruler(path: &PathBuf, line: Option<u64>) -> Result<(u64, SidonSet), Failure> {
    let rulers = read_rulers(path)?;
    match line {
        Some(want) => rulers
            .into_iter()
            .find(|(l, _)| *l == want)
            .ok_or_else(|| usage(format!("no ruler on line {want} of {}", path.display()))),
        None => rulers
            .into_iter()
            .next()
            .ok_or_else(|| usage(format!("{} contains no rulers", path.display()))),
    }
}

/// Smallest integer T with T >= k^(3/2).
fn default_window_for(set: &SidonSet) -> u64 {
    sidon::default_window(set.k() as u64)
}

fn parse_rat_flag(name: &str, value: &str) -> Result<BigRational, Failure> {
    parse_rational(value).map_err(|e| usage(format!("--{name} {value:?}: {e}")))
}

fn cmd_verify(cli: &Cli, file: &PathBuf) -> Result<(String, u8), Failure> {
    let text = fs::read_to_string(file)
        .map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut lines_out: Vec<String> = Vec::new();
    let mut total = 0usize;
    let mut failures = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let parsed = match parse_ruler_line(raw) {
            None => continue,
            Some(p) => p,
        };
        total += 1;
        match parsed.and_then(|elems| {
            SidonSet::normalize(&elems).map_err(|e| e.to_string())
        }) {
            Ok(set) => {
                rows.push(vec![
                    line.to_string(),
                    "ok".into(),
                    set.k().to_string(),
                    set.diameter().to_string(),
                    String::new(),
                ]);
                lines_out.push(format!(
                    "line {line}: ok k={} diameter={}",
                    set.k(),
                    set.diameter()
                ));
            }
            Err(reason) => {
                failures += 1;
                rows.push(vec![
                    line.to_string(),
                    "fail".into(),
                    String::new(),
                    String::new(),
                    reason.clone(),
                ]);
                lines_out.push(format!("line {line}: FAIL {reason}"));
            }
        }
    }
    let out = match cli.format {
        Format::Text => {
            lines_out.push(format!("{total} rulers, {failures} failures"));
            lines_out.join("\n") + "\n"
        }
        f => table(f, &["line", "status", "k", "diameter", "detail"], &rows),
    };
    Ok((out, if failures == 0 { 0 } else { 1 }))
}

fn cmd_construct(cli: &Cli, c: Construction, q: u64) -> Result<(String, u8), Failure> {
    let set = construct(c, q).map_err(|e| usage(e.to_string()))?;
    let elements = set
        .residues()
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let out = match cli.format {
        Format::Text => format!("{elements}  # {c} q={q} m={}\n", set.modulus()),
        f => table(
            f,
            &["construction", "q", "modulus", "elements"],
            &[vec![
                c.to_string(),
                q.to_string(),
                set.modulus().to_string(),
                elements,
            ]],
        ),
    };
    Ok((out, 0))
}

fn cmd_oracle(
    cli: &Cli,
    k: usize,
    max_nodes: Option<u64>,
    max_seconds: Option<u64>,
) -> Result<(String, u8), Failure> {
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let default = SearchBudget::default();
    let budget = SearchBudget::new(
        max_nodes.unwrap_or(default.max_nodes),
        max_seconds.map_or(default.max_time, Duration::from_secs),
    );
    let (d, _witness) = exhaustive_optimal(k, &budget)
        .map_err(|e| usage(format!("{e}; raise --max-nodes or --max-seconds")))?;
    let out = match cli.format {
        Format::Text => format!("s_{k} = {d}\n"),
        f => table(f, &["k", "s_k"], &[vec![k.to_string(), d.to_string()]]),
    };
    Ok((out, 0))
}

fn bound_params_from_flags(
    reference: bool,
    tau: &Option<String>,
    alpha: &Option<String>,
    beta: &Option<String>,
    tau2: &Option<String>,
    delta: &Option<String>,
) -> Result<BoundParams, Failure> {
    if reference {
        return Ok(BoundParams::reference());
    }
    let (Some(tau), Some(alpha), Some(beta), Some(tau2)) = (tau, alpha, beta, tau2) else {
        return Err(usage(
            "pass --reference, or all of --tau --alpha --beta --tau2",
        ));
    };
    let tau = parse_rat_flag("tau", tau)?;
    let alpha = parse_rat_flag("alpha", alpha)?;
    let beta = parse_rat_flag("beta", beta)?;
    let tau2 = parse_rat_flag("tau2", tau2)?;
    match delta {
        Some(d) => {
            let delta = parse_rat_flag("delta", d)?;
            BoundParams::new(tau, alpha, beta, delta, tau2).map_err(|e| usage(e.to_string()))
        }
        None => BoundParams::with_delta(tau, alpha, beta, tau2).map_err(|e| usage(e.to_string())),
    }
}

fn cmd_bounds(cli: &Cli, params: &BoundParams) -> Result<(String, u8), Failure> {
    let report = combined_bound(params).map_err(|e| usage(e.to_string()))?;
    let vertex = match report.smalls.vertex {
        sidon::Vertex::XAxis => "x-axis",
        sidon::Vertex::YAxis => "y-axis",
    };
    let e = cli.exact;
    let quantities: Vec<(&str, String)> = vec![
        ("tau", show_rat(params.tau(), e)),
        ("alpha", show_rat(params.alpha(), e)),
        ("beta", show_rat(params.beta(), e)),
        ("tau2", show_rat(params.tau2(), e)),
        ("delta", show_rat(params.delta(), e)),
        ("variance", show_rat(&report.variance, e)),
        ("smalls_x_vertex", show_rat(&report.smalls.at_x_vertex, e)),
        ("smalls_y_vertex", show_rat(&report.smalls.at_y_vertex, e)),
        ("smalls", show_rat(&report.smalls.value, e)),
        ("smalls_vertex", vertex.to_string()),
        ("combined", show_rat(&report.combined, e)),
        ("mu", show_rat(&report.mu_bound, e)),
        ("w_constant", show_rat(&report.w.constant, e)),
        ("w_y_coefficient", show_rat(&report.w.y_coefficient, e)),
        ("w_x_coefficient", show_rat(&report.w.x_coefficient, e)),
    ];
    let out = match cli.format {
        Format::Text => {
            let mut s = String::new();
            for (name, value) in &quantities {
                s.push_str(&format!("{name} = {value}\n"));
            }
            s
        }
        f => {
            let rows: Vec<Vec<String>> = quantities
                .iter()
                .map(|(n, v)| vec![n.to_string(), v.clone()])
                .collect();
            table(f, &["quantity", "value"], &rows)
        }
    };
    Ok((out, 0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    cli: &Cli,
    steps: usize,
    chains: usize,
    seed: u64,
    temperature: f64,
    cooling: f64,
    grid: usize,
    denominator_cap: u64,
    start_reference: bool,
) -> Result<(String, u8), Failure> {
    let config = OptimizerConfig {
        grid_resolution: grid,
        initial_temperature: temperature,
        cooling_factor: cooling,
        steps,
        seed,
        chains,
        denominator_cap,
        start: if start_reference {
            Some(REFERENCE_POINT)
        } else {
            None
        },
    };
    let outcome: AnnealOutcome = anneal(&config).map_err(|e| usage(e.to_string()))?;
    let p = &outcome.params;
    let row = vec![
        show_rat(p.tau(), true),
        show_rat(p.alpha(), true),
        show_rat(p.beta(), true),
        show_rat(p.tau2(), true),
        show_rat(p.delta(), true),
        outcome.bound.numer().to_string(),
        outcome.bound.denom().to_string(),
        decimal_string(&outcome.bound, 12),
    ];
    let header = [
        "tau",
        "alpha",
        "beta",
        "tau2",
        "delta",
        "bound_num",
        "bound_den",
        "bound_decimal",
    ];
    let out = match cli.format {
        Format::Text => {
            let mut s = String::new();
            for (name, value) in header.iter().zip(&row) {
                s.push_str(&format!("{name} = {value}\n"));
            }
            s.push_str(&format!(
                "certified = {} (bound <= 199405/100000)\n",
                outcome.certified
            ));
            s
        }
        f => table(f, &header, &[row]),
    };
    Ok((out, 0))
}

fn parse_constructions(names: &Option<String>) -> Result<Vec<Construction>, Failure> {
    let Some(names) = names else {
        return Ok(vec![
            Construction::Singer,
            Construction::Bose,
            Construction::Ruzsa,
        ]);
    };
    let mut out = Vec::new();
    for name in names.split(',') {
        match name.trim() {
            "singer" => out.push(Construction::Singer),
            "bose" => out.push(Construction::Bose),
            "ruzsa" => out.push(Construction::Ruzsa),
            other => return Err(usage(format!("unknown construction {other:?}"))),
        }
    }
    Ok(out)
}

fn cache_path_from_env(cache: Option<PathBuf>) -> Option<PathBuf> {
    cache.or_else(|| {
        std::env::var_os(CACHE_DIR_ENV).map(|dir| PathBuf::from(dir).join(CACHE_FILE_NAME))
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    cli: &Cli,
    q_lo: u64,
    q_hi: u64,
    k_lo: usize,
    k_hi: usize,
    constructions: &Option<String>,
    cache: Option<PathBuf>,
    seed: u64,
    sample_count: u64,
    full_scan_limit: u64,
    negations: bool,
) -> Result<(String, u8), Failure> {
    let mut config = SearchConfig::new(q_lo, q_hi, k_lo, k_hi);
    config.constructions = parse_constructions(constructions)?;
    config.seed = seed;
    config.sample_count = sample_count;
    config.full_scan_limit = full_scan_limit;
    config.scan_negations = negations;
    config.cache_path = cache_path_from_env(cache);
    let table_data = run_search(&config).map_err(|e| usage(e.to_string()))?;
    Ok((render_search_table(cli, &table_data), 0))
}

fn render_search_table(cli: &Cli, table_data: &SearchTable) -> String {
    let mut rows = Vec::with_capacity(table_data.len());
    let mut text_lines = Vec::with_capacity(table_data.len());
    for rec in table_data.iter() {
        let bk = rec.bk_lower_bound_decimal(12);
        let (construction, q, m, c, w) = match &rec.source {
            Source::Constructed {
                construction,
                q,
                modulus,
                dilation,
                window_start,
            } => (
                construction.to_string(),
                *q,
                *modulus,
                *dilation,
                *window_start,
            ),
            Source::External { line } => ("external".to_string(), *line, 0, 0, 0),
        };
        let ruler = rec
            .witness
            .elements()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        text_lines.push(format!(
            "k={} diameter={} b_k>={} {} q={q} m={m} c={c} w={w}",
            rec.k, rec.diameter, bk, construction
        ));
        rows.push(vec![
            rec.k.to_string(),
            rec.diameter.to_string(),
            bk,
            construction,
            q.to_string(),
            m.to_string(),
            c.to_string(),
            w.to_string(),
            ruler,
        ]);
    }
    match cli.format {
        Format::Text => text_lines.join("\n") + "\n",
        f => table(
            f,
            &[
                "k",
                "diameter",
                "b_k_lower_bound",
                "construction",
                "q",
                "m",
                "dilation",
                "window_start",
                "ruler",
            ],
            &rows,
        ),
    }
}

fn cmd_analyze(cli: &Cli, what: &AnalyzeCmd) -> Result<(String, u8), Failure> {
    match what {
        AnalyzeCmd::Profile { file, line, t } => {
            let (_, set) = pick_ruler(file, *line)?;
            let t = t.unwrap_or_else(|| default_window_for(&set));
            let profile =
                WindowProfile::new(&set, t).map_err(|e| usage(e.to_string()))?;
            let rows: Vec<Vec<String>> = profile
                .counts()
                .iter()
                .enumerate()
                .map(|(i, &a)| vec![(i + 1).to_string(), a.to_string()])
                .collect();
            Ok((table(cli.format, &["j", "A_j"], &rows), 0))
        }
        AnalyzeCmd::Stats { file, t } => cmd_analyze_stats(cli, file, *t),
        AnalyzeCmd::Partition {
            file,
            line,
            t,
            alpha,
            beta,
        } => {
            let (_, set) = pick_ruler(file, *line)?;
            let t = t.unwrap_or_else(|| default_window_for(&set));
            let alpha = match alpha {
                Some(a) => parse_rat_flag("alpha", a)?,
                None => BigRational::new(BigInt::from(80), BigInt::from(319)),
            };
            let beta = match beta {
                Some(b) => parse_rat_flag("beta", b)?,
                None => BigRational::new(BigInt::from(195), BigInt::from(356)),
            };
            let partition =
                u_partition(&set, t, &alpha, &beta).map_err(|e| usage(e.to_string()))?;
            let quantities: Vec<(&str, String)> = vec![
                ("t", partition.t.to_string()),
                ("u1", partition.sizes[0].to_string()),
                ("u2", partition.sizes[1].to_string()),
                ("u3", partition.sizes[2].to_string()),
                ("u4", partition.sizes[3].to_string()),
                ("u5", partition.sizes[4].to_string()),
                ("x", show_rat(&partition.x, cli.exact)),
                ("y", show_rat(&partition.y, cli.exact)),
                (
                    "max_u3",
                    partition
                        .max_u3
                        .map_or_else(|| "none".to_string(), |v| v.to_string()),
                ),
            ];
            let out = match cli.format {
                Format::Text => quantities
                    .iter()
                    .map(|(n, v)| format!("{n} = {v}\n"))
                    .collect(),
                f => {
                    let rows: Vec<Vec<String>> = quantities
                        .iter()
                        .map(|(n, v)| vec![n.to_string(), v.clone()])
                        .collect();
                    table(f, &["quantity", "value"], &rows)
                }
            };
            Ok((out, 0))
        }
    }
}

fn cmd_analyze_stats(
    cli: &Cli,
    file: &PathBuf,
    t_override: Option<u64>,
) -> Result<(String, u8), Failure> {
    let rulers = read_rulers(file)?;
    let mut rows = Vec::with_capacity(rulers.len());
    let mut text_lines = Vec::with_capacity(rulers.len());
    for (line, set) in &rulers {
        let t = t_override.unwrap_or_else(|| default_window_for(set));
        let profile = WindowProfile::new(set, t).map_err(|e| usage(e.to_string()))?;
        let v = v_statistic(&profile);
        let two_s = 2 * sidon::s_statistic(set, t);
        let residual = et_identity_check(set, t).map_err(|e| invariant(e.to_string()))?;
        if !residual.is_zero() {
            return Err(invariant(format!(
                "identity residual nonzero on line {line}: {residual}"
            )));
        }
        let v_shown = show_rat(&v, cli.exact);
        text_lines.push(format!(
            "line {line}: k={} diameter={} T={t} V={v_shown} 2S={two_s} identity=ok",
            set.k(),
            set.diameter()
        ));
        rows.push(vec![
            line.to_string(),
            set.k().to_string(),
            set.diameter().to_string(),
            t.to_string(),
            v_shown,
            two_s.to_string(),
            "0".to_string(),
        ]);
    }
    let out = match cli.format {
        Format::Text => {
            if text_lines.is_empty() {
                "0 rulers\n".to_string()
            } else {
                text_lines.join("\n") + "\n"
            }
        }
        f => table(
            f,
            &["line", "k", "diameter", "t", "v", "two_s", "residual"],
            &rows,
        ),
    };
    Ok((out, 0))
}

fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    match &cli.command {
        Command::Verify { file } => cmd_verify(cli, file),
        Command::Construct { construction, q } => {
            cmd_construct(cli, (*construction).into(), *q)
        }
        Command::Oracle {
            k,
            max_nodes,
            max_seconds,
        } => cmd_oracle(cli, *k, *max_nodes, *max_seconds),
        Command::Bounds {
            reference,
            tau,
            alpha,
            beta,
            tau2,
            delta,
        } => {
            let params = bound_params_from_flags(*reference, tau, alpha, beta, tau2, delta)?;
            cmd_bounds(cli, &params)
        }
        Command::Optimize {
            steps,
            chains,
            seed,
            temperature,
            cooling,
            grid,
            denominator_cap,
            start_reference,
        } => cmd_optimize(
            cli,
            *steps,
            *chains,
            *seed,
            *temperature,
            *cooling,
            *grid,
            *denominator_cap,
            *start_reference,
        ),
        Command::Search {
            q_lo,
            q_hi,
            k_lo,
            k_hi,
            constructions,
            cache,
            seed,
            sample_count,
            full_scan_limit,
            negations,
        } => cmd_search(
            cli,
            *q_lo,
            *q_hi,
            *k_lo,
            *k_hi,
            constructions,
            cache.clone(),
            *seed,
            *sample_count,
            *full_scan_limit,
            *negations,
        ),
        Command::Analyze { what } => cmd_analyze(cli, what),
        Command::Figures {
            id,
            source,
            cache,
            kmax,
            t,
            line,
            k,
        } => figures::emit(
            cli.format,
            *id,
            source.as_deref(),
            cache.as_deref(),
            *kmax,
            *t,
            *line,
            *k,
        )
        .map(|s| (s, 0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, code)) => {
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
