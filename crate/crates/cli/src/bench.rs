//! Scaling benchmarks: per-`t` work counters and median wall times, with a
//! least-squares fit of `log₂(work)` against `t`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use tmagic::catalog::block_cover;
use tmagic::gauss_sum::{census_pauli, expect_single_pauli, rank_census, CensusMode};
use tmagic::strong_sim::{run_task, SimulationMode, SimulationTask};
use tmagic::{PauliOperator, PauliProjector};

/// Which evaluation path a benchmark exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchMode {
    Exact,
    Sampled,
    Gauss,
}

impl BenchMode {
    pub fn name(self) -> &'static str {
        match self {
            BenchMode::Exact => "exact",
            BenchMode::Sampled => "sampled",
            BenchMode::Gauss => "gauss",
        }
    }
}

/// Projector used by the strong-simulation modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchProjector {
    /// No factors: every decomposition term survives.
    Identity,
    /// `(I + P)/2` for a random Pauli drawn from the seed.
    Random,
}

/// Benchmark configuration.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub t_values: Vec<usize>,
    pub policies: Vec<Vec<usize>>,
    pub mode: BenchMode,
    pub reps: usize,
    pub seed: u64,
    /// Sample count for sampled mode.
    pub samples: u64,
    pub projector: BenchProjector,
    /// Random Paulis searched for the `k = 12` worst-case witness.
    pub census_samples: u64,
    pub timing: bool,
}

/// One benchmark row.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub t: usize,
    pub policy: String,
    pub mode: &'static str,
    /// Block sizes of the cover, joined by `+`.
    pub blocks: String,
    pub reps: usize,
    /// `unique_nonzero_sums` (gauss) or `inner_products` (exact, sampled).
    pub work_kind: &'static str,
    pub work: u128,
    pub log2_work: f64,
    /// Decomposition terms (strong-simulation modes; 0 for gauss).
    pub terms: usize,
    /// Expectation of the counted instance.
    pub value: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_wall_s: Option<f64>,
}

/// Least-squares fit for one (mode, policy) series.
#[derive(Clone, Debug, Serialize)]
pub struct BenchFit {
    pub mode: &'static str,
    pub policy: String,
    pub work_kind: &'static str,
    pub points: usize,
    pub t_min: usize,
    pub t_max: usize,
    /// Slope of `log₂(work)` against `t`.
    pub work_exponent: f64,
    pub work_intercept: f64,
    /// Slope of `log₂(median wall seconds)` against `t`; illustrative only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_exponent: Option<f64>,
}

/// Text form of a policy list, e.g. `12;6`.
pub fn policy_label(policy: &[usize]) -> String {
    policy.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn blocks_label(blocks: &[usize]) -> String {
    blocks.iter().map(usize::to_string).collect::<Vec<_>>().join("+")
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort_unstable();
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`; `None` for fewer than
/// two distinct abscissae.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Worst-case Pauli per block size: exhaustive census for `k ≤ 6`, a seeded
/// sampled census otherwise.
fn witnesses(
    sizes: impl IntoIterator<Item = usize>,
    seed: u64,
    census_samples: u64,
) -> Result<BTreeMap<usize, PauliOperator>, String> {
    let mut out = BTreeMap::new();
    for k in sizes {
        if out.contains_key(&k) {
            continue;
        }
        let mode = if k <= tmagic::gauss_sum::MAX_EXHAUSTIVE_CENSUS {
            CensusMode::Exhaustive
        } else {
            CensusMode::Sampled {
                count: census_samples,
                seed,
            }
        };
        let census = rank_census(k, mode).map_err(|e| e.to_string())?;
        out.insert(k, census.witness);
    }
    Ok(out)
}

/// Run the benchmark grid; rows are ordered by policy, then `t`.
pub fn run_bench(cfg: &BenchConfig) -> Result<(Vec<BenchRecord>, Vec<BenchFit>), String> {
    if cfg.reps < 3 {
        return Err(format!("--reps must be at least 3, got {}", cfg.reps));
    }
    if cfg.t_values.is_empty() || cfg.policies.is_empty() {
        return Err("bench needs at least one t value and one policy".into());
    }
    // Validate every cover before doing any work.
    let mut covers = Vec::new();
    for policy in &cfg.policies {
        for &t in &cfg.t_values {
            if t == 0 {
                return Err("t values must be positive".into());
            }
            covers.push(block_cover(t, policy).map_err(|e| e.to_string())?);
        }
    }
    let witness = if cfg.mode == BenchMode::Gauss {
        witnesses(covers.iter().flatten().copied(), cfg.seed, cfg.census_samples)?
    } else {
        BTreeMap::new()
    };
    let mut records = Vec::new();
    let mut fits = Vec::new();
    for policy in &cfg.policies {
        let mut series = Vec::new();
        for &t in &cfg.t_values {
            let rec = match cfg.mode {
                BenchMode::Gauss => gauss_record(cfg, policy, t, &witness)?,
                BenchMode::Exact | BenchMode::Sampled => strong_record(cfg, policy, t)?,
            };
            series.push(rec);
        }
        let work: Vec<(f64, f64)> = series.iter().map(|r| (r.t as f64, r.log2_work)).collect();
        if let Some((slope, intercept)) = least_squares(&work) {
            let time_exponent = if cfg.timing {
                let pts: Vec<(f64, f64)> = series
                    .iter()
                    .filter_map(|r| r.median_wall_s.filter(|s| *s > 0.0).map(|s| (r.t as f64, s.log2())))
                    .collect();
                least_squares(&pts).map(|f| f.0)
            } else {
                None
            };
            fits.push(BenchFit {
                mode: cfg.mode.name(),
                policy: policy_label(policy),
                work_kind: series[0].work_kind,
                points: series.len(),
                t_min: series.iter().map(|r| r.t).min().unwrap_or(0),
                t_max: series.iter().map(|r| r.t).max().unwrap_or(0),
                work_exponent: slope,
                work_intercept: intercept,
                time_exponent,
            });
        }
        records.extend(series);
    }
    Ok((records, fits))
}

fn gauss_record(
    cfg: &BenchConfig,
    policy: &[usize],
    t: usize,
    witness: &BTreeMap<usize, PauliOperator>,
) -> Result<BenchRecord, String> {
    let blocks = block_cover(t, policy).map_err(|e| e.to_string())?;
    let tiled = blocks
        .iter()
        .map(|b| witness[b].clone())
        .reduce(|a, b| a.tensor(&b))
        .expect("t ≥ 1");
    let counted = expect_single_pauli(&tiled, policy).map_err(|e| e.to_string())?;
    let median_wall_s = if cfg.timing {
        let times = (0..cfg.reps as u64)
            .map(|rep| {
                let p = census_pauli(t, cfg.seed, rep);
                let start = Instant::now();
                expect_single_pauli(&p, policy).map(|_| start.elapsed())
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        Some(median(times).as_secs_f64())
    } else {
        None
    };
    let work = counted.unique_nonzero_sums;
    Ok(BenchRecord {
        t,
        policy: policy_label(policy),
        mode: cfg.mode.name(),
        blocks: blocks_label(&blocks),
        reps: cfg.reps,
        work_kind: "unique_nonzero_sums",
        work,
        log2_work: (work as f64).log2(),
        terms: 0,
        value: counted.expectation_f64(),
        seed: cfg.seed,
        median_wall_s,
    })
}

fn strong_record(cfg: &BenchConfig, policy: &[usize], t: usize) -> Result<BenchRecord, String> {
    let projector = match cfg.projector {
        BenchProjector::Identity => PauliProjector::identity(t),
        BenchProjector::Random => {
            PauliProjector::single(census_pauli(t, cfg.seed, 0)).map_err(|e| e.to_string())?
        }
    };
    let mode = match cfg.mode {
        BenchMode::Exact => SimulationMode::Exact,
        _ => SimulationMode::Sampled {
            epsilon: 1.0,
            p_f: 0.5,
            samples: Some(cfg.samples),
            seed: cfg.seed,
        },
    };
    let task = SimulationTask {
        t,
        n: t,
        projector,
        mode,
        policy: policy.to_vec(),
    };
    let mut times = Vec::with_capacity(cfg.reps);
    let mut last = None;
    for _ in 0..cfg.reps {
        let r = run_task(&task).map_err(|e| e.to_string())?;
        times.push(r.wall_time);
        last = Some(r);
        if !cfg.timing {
            // Counters and values are identical across repetitions.
            break;
        }
    }
    let r = last.expect("reps ≥ 3");
    let blocks = block_cover(t, policy).map_err(|e| e.to_string())?;
    Ok(BenchRecord {
        t,
        policy: policy_label(policy),
        mode: cfg.mode.name(),
        blocks: blocks_label(&blocks),
        reps: cfg.reps,
        work_kind: "inner_products",
        work: r.inner_products_evaluated as u128,
        log2_work: (r.inner_products_evaluated as f64).log2(),
        terms: r.decomposition_terms,
        value: r.value,
        seed: cfg.seed,
        median_wall_s: cfg.timing.then(|| median(times).as_secs_f64()),
    })
}
