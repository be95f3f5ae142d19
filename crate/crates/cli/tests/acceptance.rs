//! Acceptance suite: one pass/fail line per criterion, each with its own
//! tolerance and wall-clock budget.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always
//! printed; exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tmagic::catalog::block_decomposition;
use tmagic::dense::dense_magic_state_exact;
use tmagic::gauss_sum::{census_pauli, rank_census, CensusMode};
use tmagic::strong_sim::{exact_expectation, sampled_expectation};
use tmagic::PauliProjector;
use tmagic_cli::bench::{run_bench, BenchConfig, BenchMode, BenchProjector};
use tmagic_cli::verify::{self, CaseReport};

struct Outcome {
    passed: bool,
    detail: String,
}

fn summarize(cases: &[CaseReport]) -> Outcome {
    let failed: Vec<&str> = cases.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let checked: u64 = cases.iter().map(|c| c.checked).sum();
    let max_err = cases.iter().filter_map(|c| c.max_error).fold(0.0, f64::max);
    Outcome {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} cases, {checked} comparisons, max error {max_err:e}", cases.len())
        } else {
            format!("failing cases: {}", failed.join(", "))
        },
    }
}

fn catalog_exactness() -> Outcome {
    let cases = verify::decompositions();
    let counts: Vec<String> = cases.iter().map(|c| c.detail.clone()).collect();
    let mut out = summarize(&cases);
    out.detail = format!("{}; {}", out.detail, counts.join(" | "));
    out
}

fn bell_merges() -> Outcome {
    summarize(&verify::merges())
}

fn kernel_vs_oracle() -> Outcome {
    summarize(&verify::kernel(1000, 0x5eed))
}

fn gauss_oracle() -> Outcome {
    let mut cases: Vec<CaseReport> = [1, 2, 3, 6].into_iter().map(verify::gauss_exhaustive).collect();
    cases.push(verify::gauss_k12(100_000, 0x5eed));
    summarize(&cases)
}

fn rank_census_maxima() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for (k, expected) in [(1usize, 2usize), (2, 2), (3, 3), (6, 7)] {
        let c = rank_census(k, CensusMode::Exhaustive).expect("exhaustive census");
        passed &= c.max == expected;
        parts.push(format!("k={k} max={} (expected {expected})", c.max));
    }
    let c = rank_census(12, CensusMode::Sampled { count: 100_000, seed: 0x5eed }).expect("sampled census");
    let attained = c.histogram.get(&42).copied().unwrap_or(0);
    passed &= c.max == 42;
    parts.push(format!(
        "k=12 max={} over {} samples, 42 attained by {attained} (witness {})",
        c.max, c.evaluated, c.witness
    ));
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn scaling_exponents() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    let targets: [(usize, f64, f64); 4] = [
        (1, 1.0, 1.0),
        (2, 0.5, 0.5),
        (6, 7f64.log2() / 6.0, 0.4676),
        (12, 42f64.log2() / 12.0, 0.4495),
    ];
    for (k, closed_form, quoted) in targets {
        let cfg = BenchConfig {
            t_values: vec![k, 2 * k, 3 * k],
            policies: vec![vec![k]],
            mode: BenchMode::Gauss,
            reps: 3,
            seed: 0x5eed,
            samples: 1,
            projector: BenchProjector::Identity,
            census_samples: 100_000,
            timing: false,
        };
        let (_, fits) = run_bench(&cfg).expect("gauss bench");
        let e = fits[0].work_exponent;
        let ok = (e - closed_form).abs() < 1e-3 && (e - quoted).abs() < 1e-3;
        passed &= ok;
        parts.push(format!("k={k} exponent={e:.6}"));
    }
    let c12 = block_decomposition(12, &[12]).expect("cover").len();
    let c66 = block_decomposition(12, &[6]).expect("cover").len();
    passed &= c12 == 47 && c66 == 49;
    parts.push(format!("t=12 terms: 12-block={c12} 6+6={c66}"));
    let cfg = BenchConfig {
        t_values: vec![12, 24, 36],
        policies: vec![vec![12]],
        mode: BenchMode::Sampled,
        reps: 3,
        seed: 0x5eed,
        samples: 1,
        projector: BenchProjector::Identity,
        census_samples: 1,
        timing: false,
    };
    let (_, fits) = run_bench(&cfg).expect("sampled bench");
    let e = fits[0].work_exponent;
    let ok = (e - 47f64.log2() / 12.0).abs() < 1e-3 && (e - 0.4629).abs() < 1e-3;
    passed &= ok;
    parts.push(format!("strong-sim 12-block exponent={e:.6}"));
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn sampled_calibration() -> Outcome {
    const RUNS: u64 = 500;
    const L: u64 = 100;
    let mut parts = Vec::new();
    let mut passed = true;
    for t in [2usize, 6] {
        // First non-identity random Pauli from the seed.
        let p = (0..)
            .map(|i| census_pauli(t, 0x5eed, i))
            .find(|p| !p.is_identity())
            .expect("a non-identity Pauli exists");
        let label = p.to_string();
        let proj = PauliProjector::single(p).expect("phase-free Paulis are Hermitian");
        let dec = block_decomposition(t, &[12, 6, 3, 2, 1]).expect("cover");
        let exact = exact_expectation(&dec, &proj).expect("exact").exact.expect("exact path");
        assert_eq!(
            Some(exact),
            dense_magic_state_exact(t).ok().and_then(|s| s.projector_expect(&proj).ok()),
            "exact path disagrees with the dense oracle"
        );
        let exact = exact.to_complex().re;
        let runs: Vec<f64> = (0..RUNS)
            .map(|r| {
                sampled_expectation(&dec, &proj, L, 1_000 + r)
                    .expect("sampled")
                    .value
            })
            .collect();
        let mean = runs.iter().sum::<f64>() / RUNS as f64;
        let var = runs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (RUNS - 1) as f64;
        let se = (var / RUNS as f64).sqrt();
        let within = runs.iter().filter(|x| ((*x - exact) / exact).abs() <= 0.1).count();
        let frac = within as f64 / RUNS as f64;
        let ok = (mean - exact).abs() <= 3.0 * se && frac >= 0.6;
        passed &= ok;
        parts.push(format!(
            "t={t} P={label} exact={exact:.6} mean={mean:.6} se={se:.6} within10%={:.1}%",
            100.0 * frac
        ));
    }
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn run_cli(threads: usize, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tmagic"))
        .arg("--no-timing")
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`{}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("tmagic-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let catalog = dir.join("t6.txt");
    let catalog_str = catalog.to_str().expect("utf-8 path").to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify", "--scope", "all", "--kernel-pairs", "40", "--gauss-samples", "500"],
        vec!["expect", "--t", "12", "--pauli", "random", "--seed", "20", "--mode", "exact"],
        vec!["expect", "--t", "12", "--pauli", "random", "--seed", "20", "--mode", "gauss"],
        vec!["expect", "--t", "6", "--pauli", "XXXXXX", "--mode", "sampled", "--samples", "300", "--seed", "3"],
        vec!["expect", "--t", "3", "--n", "5", "--projector", "+XXIII;-ZZIII", "--mode", "sampled", "--samples", "200"],
        vec!["census", "--k", "6"],
        vec!["census", "--k", "12", "--mode", "sampled", "--samples", "3000", "--seed", "9"],
        vec!["bench", "--t", "6,12,18", "--policy", "6", "--policy", "3", "--mode", "gauss", "--census-samples", "500"],
        vec!["bench", "--t", "12,24", "--policy", "12", "--policy", "6", "--mode", "sampled", "--samples", "2"],
        vec!["bench", "--t", "2,4,6", "--policy", "6,3,2,1", "--mode", "exact", "--projector", "random", "--seed", "4"],
        vec!["catalog", "export", "--k", "6"],
        vec!["catalog", "export", "--k", "6", "--out", &catalog_str],
        vec!["catalog", "check", "--catalog-file", &catalog_str],
    ];
    let many = std::thread::available_parallelism().map_or(4, |n| n.get().max(4));
    let mut mismatches = Vec::new();
    for args in &commands {
        let runs = [run_cli(1, args), run_cli(1, args), run_cli(many, args)];
        match runs {
            [Ok(a), Ok(b), Ok(c)] if a == b && b == c && !a.is_empty() => {}
            [Err(e), ..] | [_, Err(e), _] | [_, _, Err(e)] => mismatches.push(e),
            _ => mismatches.push(format!("output differs: {}", args.join(" "))),
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        passed: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            format!("{} commands byte-identical across 1 and {many} threads (3 runs each)", commands.len())
        } else {
            mismatches.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 8] = [
        (1, "catalog exactness", Duration::from_secs(10), catalog_exactness),
        (2, "bell-merge identities", Duration::from_secs(5), bell_merges),
        (3, "kernel vs dense oracle", Duration::from_secs(60), kernel_vs_oracle),
        (4, "gauss-sum oracle equivalence", Duration::from_secs(600), gauss_oracle),
        (5, "rank census maxima", Duration::from_secs(600), rank_census_maxima),
        (6, "scaling exponents on work counters", Duration::from_secs(600), scaling_exponents),
        (7, "sampled estimator calibration", Duration::from_secs(300), sampled_calibration),
        (8, "determinism across thread counts", Duration::from_secs(600), determinism),
    ];
    let mut all = true;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let passed = outcome.passed && in_budget;
        all &= passed;
        println!(
            "criterion {id} [{name}]: {} in {:.2}s (budget {}s) — {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            outcome.detail
        );
    }
    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
