//! Dense-oracle equivalence suites behind `tmagic verify`.
//!
//! Every suite compares a fast path against brute-force state vectors and
//! reports one [`CaseReport`] per case. Suites are deterministic for a
//! fixed seed regardless of the worker count.

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use tmagic::catalog::{catalog_entry, merged_b_state, merged_eo_state, t6_states, CATALOG_SIZES};
use tmagic::dense::{dense_magic_state, dense_magic_state_exact, DenseState, ExactDenseState};
use tmagic::gauss_sum::{census_pauli, expect_block};
use tmagic::strong_sim::exact_expectation;
use tmagic::{ExactAmplitude, PauliOperator, PauliProjector, StabilizerState};

/// Outcome of one verification case.
#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub passed: bool,
    /// Individual comparisons performed.
    pub checked: u64,
    /// Comparisons that failed.
    pub failures: u64,
    /// Largest absolute deviation seen, for float comparisons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl CaseReport {
    fn new(name: impl Into<String>, checked: u64, failures: u64, detail: impl Into<String>) -> Self {
        CaseReport {
            name: name.into(),
            passed: failures == 0 && checked > 0,
            checked,
            failures,
            max_error: None,
            detail: detail.into(),
            wall_time_s: None,
        }
    }

    fn with_error(mut self, e: f64) -> Self {
        self.max_error = Some(e);
        self
    }
}

/// Aggregate result of `tmagic verify`.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub scope: String,
    pub passed: bool,
    pub cases: Vec<CaseReport>,
}

/// Knobs shared by the suites.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Random stabilizer pairs per qubit count in the kernel suite.
    pub kernel_pairs: u64,
    /// Random Paulis in the `k = 12` Gauss-sum suite.
    pub gauss_samples: u64,
    /// Base seed for every random stream.
    pub seed: u64,
    /// Record per-case wall time.
    pub timing: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            kernel_pairs: 1000,
            gauss_samples: 100_000,
            seed: 0,
            timing: true,
        }
    }
}

/// Suite names accepted by `--scope`, in the order `all` runs them.
pub const SCOPES: [&str; 9] = [
    "decompositions",
    "merges",
    "kernel",
    "gauss-k1",
    "gauss-k2",
    "gauss-k3",
    "gauss-k6",
    "gauss-k12",
    "strong-sim",
];

/// Tolerance for float comparisons against the dense oracle.
pub const KERNEL_TOLERANCE: f64 = 1e-10;
/// Tolerance for Gauss-sum expectations against the dense oracle.
pub const GAUSS_TOLERANCE: f64 = 1e-9;

/// Run `scope` (`all` or one of [`SCOPES`]).
pub fn run_scope(scope: &str, opts: &VerifyOptions) -> Result<VerifyReport, String> {
    let selected: Vec<&str> = if scope == "all" {
        SCOPES.to_vec()
    } else if SCOPES.contains(&scope) {
        vec![scope]
    } else {
        return Err(format!(
            "unknown scope `{scope}`; expected `all` or one of {}",
            SCOPES.join(", ")
        ));
    };
    let mut cases = Vec::new();
    for s in selected {
        let start = Instant::now();
        let mut reports = match s {
            "decompositions" => decompositions(),
            "merges" => merges(),
            "kernel" => kernel(opts.kernel_pairs, opts.seed),
            "gauss-k1" => vec![gauss_exhaustive(1)],
            "gauss-k2" => vec![gauss_exhaustive(2)],
            "gauss-k3" => vec![gauss_exhaustive(3)],
            "gauss-k6" => vec![gauss_exhaustive(6)],
            "gauss-k12" => vec![gauss_k12(opts.gauss_samples, opts.seed)],
            "strong-sim" => strong_sim(opts.seed),
            _ => unreachable!("scope validated"),
        };
        if opts.timing {
            // Suites with several cases share the suite's wall time.
            let elapsed = start.elapsed().as_secs_f64();
            for r in &mut reports {
                r.wall_time_s = Some(elapsed);
            }
        }
        cases.extend(reports);
    }
    Ok(VerifyReport {
        scope: scope.to_string(),
        passed: cases.iter().all(|c| c.passed),
        cases,
    })
}

/// Expected term counts of the catalog entries for `CATALOG_SIZES`.
fn expected_terms(k: usize) -> usize {
    match k {
        1 | 2 => 2,
        3 => 3,
        6 => 7,
        12 => 47,
        _ => 0,
    }
}

/// Each catalog entry reconstructs `|T⟩^{⊗k}` exactly and has the expected
/// term count.
pub fn decompositions() -> Vec<CaseReport> {
    let mut sizes = CATALOG_SIZES.to_vec();
    sizes.sort_unstable();
    sizes
        .into_iter()
        .map(|k| {
            let name = format!("catalog-t{k}");
            let dec = match catalog_entry(k) {
                Ok(d) => d,
                Err(e) => return CaseReport::new(name, 1, 1, e.to_string()),
            };
            let exact = dec.reconstructs_target().unwrap_or(false);
            let norm = dec.norm_sq_via_inner_products();
            let count_ok = dec.len() == expected_terms(k);
            let failures = [exact, norm == ExactAmplitude::ONE, count_ok]
                .iter()
                .filter(|ok| !**ok)
                .count() as u64;
            CaseReport::new(
                name,
                3,
                failures,
                format!(
                    "terms={} exact_reconstruction={} norm_sq={}",
                    dec.len(),
                    exact,
                    norm.to_tuple_string()
                ),
            )
        })
        .collect()
}

/// The two merged twelve-qubit states equal their symmetric pair sums
/// divided by √2, amplitude by amplitude.
pub fn merges() -> Vec<CaseReport> {
    let s = t6_states();
    [("merge-b60-b66", merged_b_state(), 0, 1), ("merge-e6-o6", merged_eo_state(), 2, 3)]
        .into_iter()
        .map(|(name, merged, a, b)| {
            let dense = |st: StabilizerState| {
                ExactDenseState::new(12, st.to_dense_exact().expect("12 qubits")).expect("12 qubits")
            };
            let mut pair = dense(s[a].tensor(&s[b]));
            pair.add_scaled(ExactAmplitude::ONE, &dense(s[b].tensor(&s[a])));
            let m = merged.to_dense_exact().expect("12 qubits");
            let failures = pair
                .amplitudes()
                .iter()
                .zip(&m)
                .filter(|(p, x)| **p != **x * ExactAmplitude::SQRT2)
                .count() as u64;
            CaseReport::new(name, m.len() as u64, failures, format!("support_dim={}", merged.dim()))
        })
        .collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn dense_of(s: &StabilizerState) -> DenseState {
    DenseState::new(s.n(), s.to_dense().expect("small state")).expect("small state")
}

/// Random stabilizer pairs on `n ∈ 2..=8`: inner products and Pauli
/// projection norms against dense vectors.
pub fn kernel(pairs: u64, seed: u64) -> Vec<CaseReport> {
    (2..=8u64)
        .map(|n| {
            let errors: Vec<(f64, f64)> = (0..pairs)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(seed, (n << 40) | i);
                    let a = StabilizerState::random(n as usize, &mut rng);
                    let b = StabilizerState::random(n as usize, &mut rng);
                    let p = PauliOperator::random(n as usize, &mut rng);
                    let sign: i8 = if rng.gen::<bool>() { 1 } else { -1 };
                    let (da, db) = (dense_of(&a), dense_of(&b));
                    let ip_err = (a.inner_product(&b).to_complex() - da.inner(&db)).norm();
                    let projected = da.apply_projector_factor(&p, sign);
                    let prob_dense = projected.norm_sq().re;
                    let meas_err = match a.measure_pauli(&p, sign) {
                        Ok((state, prob)) => {
                            let state_norm = state.map_or(0.0, |s| s.norm_sq().to_complex().re);
                            (prob.to_complex().re - prob_dense)
                                .abs()
                                .max((state_norm - prob_dense).abs())
                        }
                        Err(_) => f64::INFINITY,
                    };
                    (ip_err, meas_err)
                })
                .collect();
            let max_ip = errors.iter().map(|e| e.0).fold(0.0, f64::max);
            let max_meas = errors.iter().map(|e| e.1).fold(0.0, f64::max);
            let failures = errors
                .iter()
                .filter(|(a, b)| !(*a <= KERNEL_TOLERANCE && *b <= KERNEL_TOLERANCE))
                .count() as u64;
            CaseReport::new(
                format!("kernel-n{n}"),
                pairs,
                failures,
                format!("max_inner_product_error={max_ip:e} max_projection_error={max_meas:e}"),
            )
            .with_error(max_ip.max(max_meas))
        })
        .collect()
}

/// All `4^k` Paulis: exact ring equality with the exact dense oracle.
pub fn gauss_exhaustive(k: usize) -> CaseReport {
    let state = dense_magic_state_exact(k).expect("small block");
    let count = 1u64 << (2 * k);
    let failures = (0..count)
        .into_par_iter()
        .filter(|&i| {
            let p = PauliOperator::from_index(k, i);
            match expect_block(&p) {
                Ok(r) => r.expectation != state.pauli_expect(&p),
                Err(_) => true,
            }
        })
        .count() as u64;
    CaseReport::new(
        format!("gauss-k{k}"),
        count,
        failures,
        format!("{}/{} Paulis match exactly", count - failures, count),
    )
    .with_error(0.0)
}

/// Random twelve-qubit Paulis against the float dense oracle.
pub fn gauss_k12(samples: u64, seed: u64) -> CaseReport {
    let state = dense_magic_state(12).expect("12 qubits");
    let errors: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let p = census_pauli(12, seed, i);
            match expect_block(&p) {
                Ok(r) => (r.expectation.to_complex() - state.pauli_expect(&p)).norm(),
                Err(_) => f64::INFINITY,
            }
        })
        .collect();
    let max = errors.iter().copied().fold(0.0, f64::max);
    let failures = errors.iter().filter(|e| !(**e <= GAUSS_TOLERANCE)).count() as u64;
    CaseReport::new(
        "gauss-k12",
        samples,
        failures,
        format!("{}/{} Paulis within {GAUSS_TOLERANCE:e}", samples - failures, samples),
    )
    .with_error(max)
}

/// Exact strong simulation against dense projector expectations: every
/// single-Pauli projector for `t ≤ 3`, and random two-factor projectors
/// with ancillas for `t ∈ {4, 6}`.
pub fn strong_sim(seed: u64) -> Vec<CaseReport> {
    let mut out = Vec::new();
    for t in 1..=3usize {
        let dec = tmagic::block_decomposition(t, &CATALOG_SIZES).expect("coverable");
        let state = dense_magic_state_exact(t).expect("small");
        let count = 1u64 << (2 * t);
        let mut failures = 0;
        for i in 0..count {
            for sign in [1i8, -1] {
                let proj = PauliProjector::new(t, vec![(PauliOperator::from_index(t, i), sign)])
                    .expect("phase-free Paulis are Hermitian");
                let ok = exact_expectation(&dec, &proj)
                    .ok()
                    .and_then(|r| r.exact)
                    .is_some_and(|v| Some(v) == state.projector_expect(&proj).ok());
                failures += u64::from(!ok);
            }
        }
        out.push(CaseReport::new(
            format!("strong-sim-t{t}"),
            2 * count,
            failures,
            "all single-Pauli projectors, exact equality",
        ));
    }
    for (t, n) in [(4usize, 5usize), (6, 7)] {
        let dec = tmagic::block_decomposition(t, &CATALOG_SIZES)
            .and_then(|d| d.extend_with_zeros(n))
            .expect("coverable");
        let magic = dense_magic_state_exact(t).expect("small");
        let state = magic
            .kron(&ExactDenseState::zero_state(n - t).expect("small"))
            .expect("small");
        let trials = 64u64;
        let mut failures = 0;
        let mut checked = 0;
        for i in 0..trials {
            let mut rng = rng_for(seed, ((t as u64) << 40) | i);
            let p1 = PauliOperator::random(n, &mut rng);
            let mut p2 = PauliOperator::random(n, &mut rng);
            while !p1.commutes(&p2) {
                p2 = PauliOperator::random(n, &mut rng);
            }
            let s1: i8 = if rng.gen::<bool>() { 1 } else { -1 };
            let s2: i8 = if rng.gen::<bool>() { 1 } else { -1 };
            let Ok(proj) = PauliProjector::new(n, vec![(p1, s1), (p2, s2)]) else {
                continue;
            };
            checked += 1;
            let ok = exact_expectation(&dec, &proj)
                .ok()
                .and_then(|r| r.exact)
                .is_some_and(|v| Some(v) == state.projector_expect(&proj).ok());
            failures += u64::from(!ok);
        }
        out.push(CaseReport::new(
            format!("strong-sim-t{t}-n{n}"),
            checked,
            failures,
            "random two-factor projectors with ancillas, exact equality",
        ));
    }
    out
}
