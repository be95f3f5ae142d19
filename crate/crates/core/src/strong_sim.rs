//! Strong simulation of `⟨Ψ|Π|Ψ⟩` for `|Ψ⟩ = |T⟩^{⊗t}|0⟩^{⊗(n−t)}` and a
//! product `Π` of commuting Pauli projectors, through a stabilizer
//! decomposition `|Ψ⟩ = Σ_i c_i |φ_i⟩`.
//!
//! * The exact path projects every ket term (`Π|φ_i⟩` is again a scaled
//!   stabilizer state or zero) and sums `χ²` exact inner products.
//! * The sampled path draws `L` uniformly random stabilizer states `|ψ_a⟩`
//!   and returns `2ⁿ · mean_a |Σ_i c_i ⟨ψ_a|Πφ_i⟩|²`.  Random stabilizer
//!   states form a 2-design, so `E|⟨ψ|Φ⟩|² = ⟨Φ|Φ⟩/2ⁿ` and the estimator is
//!   unbiased for `⟨Ψ|Π|Ψ⟩ = ⟨ΠΨ|ΠΨ⟩`.  Sample `a` uses stream `a` of a
//!   ChaCha8 generator seeded with the task seed, and samples are reduced
//!   in order, so results do not depend on the thread count.
//!
//! Counters record kernel inner-product calls.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{block_decomposition, MagicDecomposition};
use crate::error::{Error, Result};
use crate::pauli::PauliProjector;
use crate::phase_ring::ExactAmplitude;
use crate::stabilizer::StabilizerState;

/// How the expectation is computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SimulationMode {
    /// Quadratic-cost exact evaluation.
    Exact,
    /// Random-stabilizer estimator with `L(ε, p_f)` samples, or `samples`
    /// when given.
    Sampled {
        epsilon: f64,
        p_f: f64,
        samples: Option<u64>,
        seed: u64,
    },
}

/// A fully specified expectation problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTask {
    /// Number of magic qubits.
    pub t: usize,
    /// Total qubits, `n ≥ t`; the last `n − t` start in `|0⟩`.
    pub n: usize,
    /// The projector; acts on `n` qubits.
    pub projector: PauliProjector,
    /// Evaluation mode.
    pub mode: SimulationMode,
    /// Block sizes allowed in the decomposition cover.
    pub policy: Vec<usize>,
}

/// Outcome of a simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    /// The (estimated) expectation.
    pub value: f64,
    /// The exact expectation on the exact path.
    pub exact: Option<ExactAmplitude>,
    /// Kernel inner-product calls.
    pub inner_products_evaluated: u64,
    /// Random states drawn (0 on the exact path).
    pub samples_used: u64,
    /// Terms in the decomposition.
    pub decomposition_terms: usize,
    /// Terms surviving the projector.
    pub projected_terms: usize,
    /// Elapsed time.
    pub wall_time: Duration,
}

/// `L(ε, p_f) = ⌈ε⁻² ln(1/p_f)⌉`.
pub fn sample_count(epsilon: f64, p_f: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "failure probability {p_f} must lie in (0, 1)"
        )));
    }
    Ok(((1.0 / p_f).ln() / (epsilon * epsilon)).ceil().max(1.0) as u64)
}

/// `Π|φ_i⟩` for every term, dropping those the projector annihilates.
pub fn project_terms(
    dec: &MagicDecomposition,
    proj: &PauliProjector,
) -> Result<Vec<(ExactAmplitude, StabilizerState)>> {
    if proj.n() != dec.n() {
        return Err(Error::DimensionMismatch {
            expected: dec.n(),
            found: proj.n(),
        });
    }
    let projected: Vec<Result<Option<(ExactAmplitude, StabilizerState)>>> = dec
        .terms()
        .par_iter()
        .map(|(c, s)| {
            let mut state = s.clone();
            for (p, sign) in proj.factors() {
                match state.measure_pauli(p, *sign)?.0 {
                    Some(next) => state = next,
                    None => return Ok(None),
                }
            }
            Ok(Some((*c, state)))
        })
        .collect();
    projected
        .into_iter()
        .filter_map(|r| r.transpose())
        .collect()
}

/// `⟨Ψ|Π|Ψ⟩ = Σ_{j,l} c_j* c_l ⟨φ_j|Π|φ_l⟩`, exactly.
pub fn exact_expectation(dec: &MagicDecomposition, proj: &PauliProjector) -> Result<SimulationResult> {
    let start = Instant::now();
    let kets = project_terms(dec, proj)?;
    let value: ExactAmplitude = dec
        .terms()
        .par_iter()
        .map(|(cj, sj)| {
            kets.iter()
                .map(|(cl, sl)| cj.conj() * *cl * sj.inner_product(sl))
                .sum::<ExactAmplitude>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    if !value.is_real() {
        return Err(Error::Unsupported(format!(
            "expectation {value} has a non-zero imaginary part"
        )));
    }
    Ok(SimulationResult {
        value: value.to_complex().re,
        exact: Some(value),
        inner_products_evaluated: (dec.len() * kets.len()) as u64,
        samples_used: 0,
        decomposition_terms: dec.len(),
        projected_terms: kets.len(),
        wall_time: start.elapsed(),
    })
}

/// The random state for sample `a`.
pub fn sample_state(n: usize, seed: u64, a: u64) -> StabilizerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(a);
    StabilizerState::random(n, &mut rng)
}

/// Unbiased random-stabilizer estimate of `⟨Ψ|Π|Ψ⟩` from `samples` draws.
pub fn sampled_expectation(
    dec: &MagicDecomposition,
    proj: &PauliProjector,
    samples: u64,
    seed: u64,
) -> Result<SimulationResult> {
    let start = Instant::now();
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    let n = dec.n();
    if n == 0 {
        return Err(Error::InvalidParameter("sampling needs at least one qubit".into()));
    }
    let kets = project_terms(dec, proj)?;
    let weights: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|a| {
            let psi = sample_state(n, seed, a);
            let overlap: ExactAmplitude = kets
                .iter()
                .map(|(c, s)| *c * psi.inner_product(s))
                .sum();
            overlap.to_complex().norm_sqr()
        })
        .collect();
    let mean = weights.iter().sum::<f64>() / samples as f64;
    Ok(SimulationResult {
        value: mean * (n as f64).exp2(),
        exact: None,
        inner_products_evaluated: samples * kets.len() as u64,
        samples_used: samples,
        decomposition_terms: dec.len(),
        projected_terms: kets.len(),
        wall_time: start.elapsed(),
    })
}

/// Build the decomposition for `task` and evaluate it.
pub fn run_task(task: &SimulationTask) -> Result<SimulationResult> {
    if task.n < task.t {
        return Err(Error::InvalidParameter(format!(
            "qubit count {} is below the T-count {}",
            task.n, task.t
        )));
    }
    if task.n == 0 {
        return Err(Error::InvalidParameter("at least one qubit is required".into()));
    }
    let dec = block_decomposition(task.t, &task.policy)?.extend_with_zeros(task.n)?;
    match task.mode {
        SimulationMode::Exact => exact_expectation(&dec, &task.projector),
        SimulationMode::Sampled {
            epsilon,
            p_f,
            samples,
            seed,
        } => {
            let l = match samples {
                Some(l) => l,
                None => sample_count(epsilon, p_f)?,
            };
            sampled_expectation(&dec, &task.projector, l, seed)
        }
    }
}
