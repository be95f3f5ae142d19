//! Command-line driver for the `tmagic` simulator: verification suites,
//! single expectations, Gauss-sum rank census, scaling benchmarks and
//! decomposition catalog export/audit.
//!
//! Every command renders its output into a [`Outcome`] so that the binary
//! and the tests share one code path. Output depends only on the arguments;
//! with `--no-timing` it is byte-identical across runs and thread counts.

pub mod bench;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bench::{policy_label, run_bench, BenchConfig, BenchMode, BenchProjector};
use tmagic::catalog::{block_cover, block_decomposition, catalog_entry, CATALOG_SIZES};
use tmagic::gauss_sum::{census_pauli, expect_single_pauli, rank_census, CensusMode};
use tmagic::strong_sim::{exact_expectation, sample_count, sampled_expectation};
use tmagic::{ExactAmplitude, MagicDecomposition, PauliOperator, PauliProjector};
use verify::{run_scope, VerifyOptions};

/// Top-level arguments.
#[derive(Debug, Parser)]
#[command(name = "tmagic", version, about = "Clifford+T strong simulation via stabilizer and Gauss-sum decompositions")]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Omit wall-time fields so output is byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run dense-oracle equivalence suites; exits non-zero on any failure.
    Verify(VerifyArgs),
    /// Evaluate one expectation value.
    Expect(ExpectArgs),
    /// Histogram of unique non-zero Gauss sums over Paulis on one block.
    Census(CensusArgs),
    /// Work counters and timings over a range of T-counts, with exponent fits.
    Bench(BenchArgs),
    /// Export or audit decomposition text files.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all` or one suite: decompositions, merges, kernel, gauss-k1,
    /// gauss-k2, gauss-k3, gauss-k6, gauss-k12, strong-sim.
    #[arg(long, default_value = "all")]
    pub scope: String,
    /// Random stabilizer pairs per qubit count in the kernel suite.
    #[arg(long, default_value_t = 1000)]
    pub kernel_pairs: u64,
    /// Random Paulis in the gauss-k12 suite.
    #[arg(long, default_value_t = 100_000)]
    pub gauss_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
    Gauss,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    /// Number of magic qubits.
    #[arg(long)]
    pub t: Option<usize>,
    /// Total qubits (default `t`); extra qubits start in |0⟩.
    #[arg(long)]
    pub n: Option<usize>,
    /// Pauli string such as `XZI`, `-YY`, `-i:XY`, or `random` (uses --seed).
    #[arg(long, conflicts_with = "projector", allow_hyphen_values = true)]
    pub pauli: Option<String>,
    /// Commuting projector such as `+XXI;-ZZI`, or `identity:N`.
    #[arg(long, allow_hyphen_values = true)]
    pub projector: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Allowed block sizes, e.g. `12,6,3,2,1`.
    #[arg(long, default_value = "12,6,3,2,1")]
    pub policy: String,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub pf: f64,
    /// Sample count; overrides the L(ε, p_f) rule.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use a decomposition text file instead of the built-in catalog.
    #[arg(long)]
    pub catalog_file: Option<PathBuf>,
    /// Also write the JSON record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CensusModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Block size: 1, 2, 3, 6 or 12.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = CensusModeArg::Exhaustive)]
    pub mode: CensusModeArg,
    /// Paulis drawn in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProjectorArg {
    Identity,
    Random,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated T-counts, e.g. `6,12,18`.
    #[arg(long)]
    pub t: String,
    /// Block policy; repeat the flag to compare several, e.g.
    /// `--policy 12 --policy 6`.
    #[arg(long, default_values_t = vec!["12,6,3,2,1".to_string()])]
    pub policy: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Gauss)]
    pub mode: ModeArg,
    /// Timed repetitions per point (at least 3).
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample count in sampled mode; overrides L(ε, p_f).
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub pf: f64,
    /// Projector for exact and sampled modes.
    #[arg(long, value_enum, default_value_t = ProjectorArg::Identity)]
    pub projector: ProjectorArg,
    /// Random Paulis searched for the k = 12 worst-case witness (gauss mode).
    #[arg(long, default_value_t = 100_000)]
    pub census_samples: u64,
    /// Write records here and the fit to `<out>.fit.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// Write the built-in decomposition for block size k.
    Export {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a decomposition file and check it against the dense target.
    Check {
        #[arg(long)]
        catalog_file: PathBuf,
    },
}

/// Rendered command output and process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, exit_code: 0 }
    }
}

/// Run `cli` on a pool of `cli.threads` workers.
pub fn run(cli: &Cli) -> Result<Outcome, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cli.threads > 0 {
        builder = builder.num_threads(cli.threads);
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Outcome, String> {
    let timing = !cli.no_timing;
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, timing),
        Command::Expect(a) => cmd_expect(a, timing),
        Command::Census(a) => cmd_census(a),
        Command::Bench(a) => cmd_bench(a, timing),
        Command::Catalog(c) => cmd_catalog(c),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value).map_err(|e| e.to_string())
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

/// Parse a comma-separated list of block sizes.
pub fn parse_policy(s: &str) -> Result<Vec<usize>, String> {
    let sizes = s
        .split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<usize>()
                .map_err(|_| format!("invalid block size `{p}` in policy `{s}`"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = sizes.iter().find(|b| !CATALOG_SIZES.contains(b)) {
        return Err(format!("block size {bad} is not one of 12, 6, 3, 2, 1"));
    }
    Ok(sizes)
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<usize>().map_err(|_| format!("invalid integer `{p}` in `{s}`"))
        })
        .collect()
}

/// Parse a Pauli argument: `random` draws one from `seed`; a bare leading
/// `+` or `-` is shorthand for the `+1:`/`-1:` phase prefix.
pub fn parse_pauli(s: &str, len: usize, seed: u64) -> Result<PauliOperator, String> {
    let s = s.trim();
    if s == "random" {
        return Ok(census_pauli(len, seed, 0));
    }
    let (text, offset) = if let Some(rest) = s.strip_prefix('-').filter(|_| !s.contains(':')) {
        (format!("-1:{rest}"), 2)
    } else if let Some(rest) = s.strip_prefix('+').filter(|_| !s.contains(':')) {
        (rest.to_string(), -1)
    } else {
        (s.to_string(), 0)
    };
    text.parse::<PauliOperator>().map_err(|e| match e {
        tmagic::Error::Parse { position, message } => format!(
            "cannot parse Pauli `{s}` at position {}: {message}",
            (position as i64 - offset).max(0)
        ),
        other => other.to_string(),
    })
}

fn cmd_verify(a: &VerifyArgs, timing: bool) -> Result<Outcome, String> {
    let opts = VerifyOptions {
        kernel_pairs: a.kernel_pairs,
        gauss_samples: a.gauss_samples,
        seed: a.seed,
        timing,
    };
    let report = run_scope(&a.scope, &opts)?;
    let json = to_json(&report)? + "\n";
    if let Some(out) = &a.out {
        write_file(out, &json)?;
    }
    Ok(Outcome {
        stdout: json,
        exit_code: if report.passed { 0 } else { 1 },
    })
}

/// JSON record printed by `expect`.
#[derive(Debug, Serialize)]
pub struct ExpectRecord {
    pub command: &'static str,
    pub mode: &'static str,
    pub t: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projector: Option<String>,
    pub policy: String,
    pub blocks: String,
    pub value: f64,
    /// Exact value as `(a,b,c,d,e)` = `(a + bω + cω² + dω³)/√2^e`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique_nonzero_sums: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projected_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_products: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_f: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

fn load_catalog(path: &Path) -> Result<MagicDecomposition, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    MagicDecomposition::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_expect(a: &ExpectArgs, timing: bool) -> Result<Outcome, String> {
    let start = Instant::now();
    let policy = parse_policy(&a.policy)?;
    let file_dec = a.catalog_file.as_deref().map(load_catalog).transpose()?;
    let t = match (&file_dec, a.t) {
        (Some(d), Some(t)) if d.k() != t => {
            return Err(format!("--t {t} does not match the catalog file's k = {}", d.k()))
        }
        (Some(d), _) => d.k(),
        (None, Some(t)) => t,
        (None, None) => return Err("--t is required".into()),
    };
    if t == 0 {
        return Err("--t must be at least 1".into());
    }
    let n = a.n.unwrap_or(t);
    if n < t {
        return Err(format!("--n {n} is below --t {t}"));
    }
    let mut record = ExpectRecord {
        command: "expect",
        mode: match a.mode {
            ModeArg::Exact => "exact",
            ModeArg::Sampled => "sampled",
            ModeArg::Gauss => "gauss",
        },
        t,
        n,
        pauli: None,
        projector: None,
        policy: policy_label(&policy),
        blocks: String::new(),
        value: 0.0,
        exact: None,
        unique_nonzero_sums: None,
        decomposition_terms: None,
        projected_terms: None,
        inner_products: None,
        samples: None,
        epsilon: None,
        p_f: None,
        seed: a.seed,
        catalog_file: a.catalog_file.as_ref().map(|p| p.display().to_string()),
        wall_time_s: None,
    };

    if a.mode == ModeArg::Gauss {
        if a.catalog_file.is_some() {
            return Err("gauss mode does not use a decomposition; drop --catalog-file".into());
        }
        if n != t {
            return Err("gauss mode evaluates magic qubits only; drop --n".into());
        }
        let text = a
            .pauli
            .as_deref()
            .ok_or("gauss mode needs a single Pauli (--pauli)")?;
        let p = parse_pauli(text, t, a.seed)?;
        if p.len() != t {
            return Err(format!("Pauli has {} qubits but --t is {t}", p.len()));
        }
        if !p.is_hermitian() {
            return Err("the Pauli must be Hermitian (phase ±1)".into());
        }
        let report = expect_single_pauli(&p, &policy).map_err(|e| e.to_string())?;
        record.pauli = Some(p.to_string());
        record.blocks = report.blocks.iter().map(usize::to_string).collect::<Vec<_>>().join("+");
        record.value = report.expectation_f64();
        record.exact = Some(report.expectation.to_tuple_string());
        record.unique_nonzero_sums = Some(report.unique_nonzero_sums);
    } else {
        // ⟨P⟩ = 2·⟨(I + P)/2⟩ − 1 for a single Pauli; projectors directly.
        let (projector, pauli_mode) = match (&a.pauli, &a.projector) {
            (Some(text), None) => {
                let p = parse_pauli(text, t, a.seed)?;
                let p = if p.len() == t && n > t { p.padded(n) } else { p };
                if p.len() != n {
                    return Err(format!("Pauli has {} qubits, expected {t} or {n}", p.len()));
                }
                record.pauli = Some(p.to_string());
                (PauliProjector::single(p).map_err(|e| e.to_string())?, true)
            }
            (None, Some(text)) => {
                let proj: PauliProjector = text.parse().map_err(|e: tmagic::Error| e.to_string())?;
                let proj = if proj.n() == t && n > t {
                    proj.padded(n).map_err(|e| e.to_string())?
                } else {
                    proj
                };
                if proj.n() != n {
                    return Err(format!("projector has {} qubits, expected {t} or {n}", proj.n()));
                }
                record.projector = Some(proj.to_string());
                (proj, false)
            }
            _ => return Err("give exactly one of --pauli or --projector".into()),
        };
        let (dec, blocks) = match file_dec {
            Some(d) => (d, format!("file:{t}")),
            None => {
                let blocks = block_cover(t, &policy).map_err(|e| e.to_string())?;
                let d = block_decomposition(t, &policy).map_err(|e| e.to_string())?;
                (d, blocks.iter().map(usize::to_string).collect::<Vec<_>>().join("+"))
            }
        };
        record.blocks = blocks;
        let dec = dec.extend_with_zeros(n).map_err(|e| e.to_string())?;
        let result = if a.mode == ModeArg::Exact {
            exact_expectation(&dec, &projector)
        } else {
            let l = match a.samples {
                Some(l) => l,
                None => sample_count(a.epsilon, a.pf).map_err(|e| e.to_string())?,
            };
            record.epsilon = Some(a.epsilon);
            record.p_f = Some(a.pf);
            sampled_expectation(&dec, &projector, l, a.seed)
        }
        .map_err(|e| e.to_string())?;
        let two = ExactAmplitude::from_int(2);
        let exact = if pauli_mode {
            result.exact.map(|x| two * x - ExactAmplitude::ONE)
        } else {
            result.exact
        };
        record.value = match exact {
            Some(x) => x.to_complex().re,
            None if pauli_mode => 2.0 * result.value - 1.0,
            None => result.value,
        };
        record.exact = exact.map(|x| x.to_tuple_string());
        record.decomposition_terms = Some(result.decomposition_terms);
        record.projected_terms = Some(result.projected_terms);
        record.inner_products = Some(result.inner_products_evaluated);
        if a.mode == ModeArg::Sampled {
            record.samples = Some(result.samples_used);
        }
    }
    if timing {
        record.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let json = serde_json::to_string(&record).map_err(|e| e.to_string())?;
    if let Some(out) = &a.out {
        write_file(out, &(json.clone() + "\n"))?;
    }
    Ok(Outcome::ok(format!("{:?}\n{json}\n", record.value)))
}

/// One row of the census CSV: `bin` rows hold the histogram, the final
/// `max` row holds the worst case, how many Paulis attain it, and the
/// first Pauli that does.
#[derive(Debug, Serialize)]
pub struct CensusRow {
    pub k: usize,
    pub mode: &'static str,
    pub row: &'static str,
    pub unique_nonzero_sums: usize,
    pub paulis: u64,
    pub witness: String,
}

fn cmd_census(a: &CensusArgs) -> Result<Outcome, String> {
    let (mode, label) = match a.mode {
        CensusModeArg::Exhaustive => (CensusMode::Exhaustive, "exhaustive"),
        CensusModeArg::Sampled => (
            CensusMode::Sampled {
                count: a.samples,
                seed: a.seed,
            },
            "sampled",
        ),
    };
    let census = rank_census(a.k, mode).map_err(|e| e.to_string())?;
    let mut rows: Vec<CensusRow> = census
        .histogram
        .iter()
        .map(|(&count, &paulis)| CensusRow {
            k: a.k,
            mode: label,
            row: "bin",
            unique_nonzero_sums: count,
            paulis,
            witness: String::new(),
        })
        .collect();
    rows.push(CensusRow {
        k: a.k,
        mode: label,
        row: "max",
        unique_nonzero_sums: census.max,
        paulis: census.histogram[&census.max],
        witness: census.witness.to_string(),
    });
    let csv = to_csv(&rows)?;
    if let Some(out) = &a.out {
        write_file(out, &csv)?;
    }
    Ok(Outcome::ok(csv))
}

fn cmd_bench(a: &BenchArgs, timing: bool) -> Result<Outcome, String> {
    let mode = match a.mode {
        ModeArg::Exact => BenchMode::Exact,
        ModeArg::Sampled => BenchMode::Sampled,
        ModeArg::Gauss => BenchMode::Gauss,
    };
    let samples = match a.samples {
        Some(l) => l,
        None => sample_count(a.epsilon, a.pf).map_err(|e| e.to_string())?,
    };
    let cfg = BenchConfig {
        t_values: parse_list(&a.t)?,
        policies: a.policy.iter().map(|p| parse_policy(p)).collect::<Result<_, _>>()?,
        mode,
        reps: a.reps,
        seed: a.seed,
        samples,
        projector: match a.projector {
            ProjectorArg::Identity => BenchProjector::Identity,
            ProjectorArg::Random => BenchProjector::Random,
        },
        census_samples: a.census_samples,
        timing,
    };
    let (records, fits) = run_bench(&cfg)?;
    let records_csv = to_csv(&records)?;
    let fits_csv = to_csv(&fits)?;
    if let Some(out) = &a.out {
        write_file(out, &records_csv)?;
        let mut fit_path = out.clone().into_os_string();
        fit_path.push(".fit.csv");
        write_file(Path::new(&fit_path), &fits_csv)?;
    }
    Ok(Outcome::ok(format!("{records_csv}\n{fits_csv}")))
}

/// Audit summary printed by `catalog check`.
#[derive(Debug, Serialize)]
pub struct CatalogCheck {
    pub k: usize,
    pub n: usize,
    pub terms: usize,
    /// Exact dense reconstruction of `|T⟩^{⊗k}` (k ≤ 12).
    pub reconstructs_target: Option<bool>,
    /// `⟨Ψ|Ψ⟩` from pairwise kernel inner products, as `(a,b,c,d,e)`.
    pub norm_sq: String,
    pub norm_is_one: bool,
    /// Equal to the built-in entry, when one exists for `k`.
    pub matches_builtin: Option<bool>,
    pub passed: bool,
}

fn cmd_catalog(c: &CatalogCommand) -> Result<Outcome, String> {
    match c {
        CatalogCommand::Export { k, out } => {
            let text = catalog_entry(*k).map_err(|e| e.to_string())?.to_text();
            match out {
                Some(path) => {
                    write_file(path, &text)?;
                    Ok(Outcome::ok(format!("wrote {} ({} bytes)\n", path.display(), text.len())))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        CatalogCommand::Check { catalog_file } => {
            let dec = load_catalog(catalog_file)?;
            let reconstructs = if dec.n() <= tmagic::dense::MAX_EXACT_QUBITS {
                Some(dec.reconstructs_target().map_err(|e| e.to_string())?)
            } else {
                None
            };
            let norm = dec.norm_sq_via_inner_products();
            let matches_builtin = catalog_entry(dec.k()).ok().map(|b| b == dec);
            let passed = reconstructs.unwrap_or(true) && norm == ExactAmplitude::ONE;
            let report = CatalogCheck {
                k: dec.k(),
                n: dec.n(),
                terms: dec.len(),
                reconstructs_target: reconstructs,
                norm_sq: norm.to_tuple_string(),
                norm_is_one: norm == ExactAmplitude::ONE,
                matches_builtin,
                passed,
            };
            Ok(Outcome {
                stdout: to_json(&report)? + "\n",
                exit_code: if passed { 0 } else { 1 },
            })
        }
    }
}
