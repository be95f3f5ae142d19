//! Single-Pauli expectations `⟨T^{⊗k}|P|T^{⊗k}⟩` as sums of closed-form
//! Gauss sums, with the bookkeeping needed to count unique non-zero sums.
//!
//! Blocks of `k ∈ {1, 2, 3, 6, 12}` qubits have dedicated evaluators.  The
//! three-qubit evaluator selects one of four delta-gated families from the
//! parities of the Pauli parameters; six- and twelve-qubit blocks chain
//! two or four three-qubit blocks, shifting each block's summation range by
//! a running parity so repeated sums are folded into power-of-two
//! multiplicities.  Larger `t` factorises over a block cover.
//!
//! Every sum range `[lo, hi]` is read modulo two: it iterates `{lo}` when
//! `lo ≡ hi`, and `{0, 1}` otherwise.  Deltas are parity predicates.

use std::collections::{BTreeMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::block_cover;
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::phase_ring::{EighthRootPhase, ExactAmplitude};

/// Largest dimension accepted by [`gauss_sum_eval`].
pub const MAX_GAUSS_DIM: usize = 24;

/// Block sizes with a dedicated evaluator.
pub const BLOCK_SIZES: [usize; 5] = [1, 2, 3, 6, 12];

/// One evaluated Gauss sum, already scaled so that the block expectation is
/// `Σ multiplicity · value`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussSumTerm {
    /// Qubits in the block that produced the term.
    pub dimension: usize,
    /// Structural tag: `(set, x, y)` for every three-qubit sub-block (or the
    /// set and term index for one- and two-qubit blocks).
    pub family: Vec<(u8, u8, u8)>,
    /// Scaled value of one copy of the sum.
    pub value: ExactAmplitude,
    /// How many identical copies the term stands for (a power of two).
    pub multiplicity: u64,
}

/// Expectation of one Pauli on one block, with its Gauss-sum terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussSumReport {
    /// `⟨T^{⊗k}|P|T^{⊗k}⟩`, exactly.
    pub expectation: ExactAmplitude,
    /// Number of distinct non-zero terms.
    pub unique_nonzero_sums: usize,
    /// Every evaluated term, including those that vanish.
    pub terms: Vec<GaussSumTerm>,
}

impl GaussSumReport {
    fn from_terms(terms: Vec<GaussSumTerm>) -> Self {
        let expectation = terms
            .iter()
            .map(|t| ExactAmplitude::from_int(t.multiplicity as i128) * t.value)
            .sum();
        let unique: HashSet<(&Vec<(u8, u8, u8)>, ExactAmplitude)> = terms
            .iter()
            .filter(|t| !t.value.is_zero())
            .map(|t| (&t.family, t.value))
            .collect();
        GaussSumReport {
            expectation,
            unique_nonzero_sums: unique.len(),
            terms,
        }
    }

    /// Real part of the expectation.
    pub fn expectation_f64(&self) -> f64 {
        self.expectation.to_complex().re
    }

    /// Sum of multiplicities over all evaluated terms.
    pub fn total_multiplicity(&self) -> u64 {
        self.terms.iter().map(|t| t.multiplicity).sum()
    }
}

/// Expectation of a Pauli on `t` magic qubits, factorised over blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinglePauliReport {
    /// `⟨T^{⊗t}|P|T^{⊗t}⟩`, exactly.
    pub expectation: ExactAmplitude,
    /// Product of the per-block unique non-zero sum counts.
    pub unique_nonzero_sums: u128,
    /// Block sizes of the cover, in qubit order.
    pub blocks: Vec<usize>,
    /// Per-block reports (evaluated on phase-free block operators).
    pub block_reports: Vec<GaussSumReport>,
}

impl SinglePauliReport {
    /// Real part of the expectation.
    pub fn expectation_f64(&self) -> f64 {
        self.expectation.to_complex().re
    }
}

fn ip(q: i64) -> ExactAmplitude {
    EighthRootPhase::i_pow(q).to_amplitude()
}

fn omega(k: i64) -> ExactAmplitude {
    EighthRootPhase::new(k).to_amplitude()
}

fn sign(b: i64) -> ExactAmplitude {
    if b.rem_euclid(2) == 0 {
        ExactAmplitude::ONE
    } else {
        -ExactAmplitude::ONE
    }
}

/// `1 + i^a`.
fn g1a(a: i64) -> ExactAmplitude {
    ExactAmplitude::ONE + ip(a)
}

/// `1 + i^a (−1)^b`.
fn g1ab(a: i64, b: i64) -> ExactAmplitude {
    ExactAmplitude::ONE + ip(a) * sign(b)
}

fn delta(v: i64) -> bool {
    v.rem_euclid(2) == 0
}

fn gate(v: i64) -> ExactAmplitude {
    if delta(v) {
        ExactAmplitude::ONE
    } else {
        ExactAmplitude::ZERO
    }
}

/// The mod-2 range `[lo, hi]`.
fn range2(lo: i64, hi: i64) -> Vec<i64> {
    let (lo, hi) = (lo.rem_euclid(2), hi.rem_euclid(2));
    if lo == hi {
        vec![lo]
    } else {
        vec![0, 1]
    }
}

/// `(α, β, γ, δ)` indicators of `I, Z, X, Y` on qubit `i`.
fn params(p: &PauliOperator, i: usize) -> [i64; 4] {
    let (a, b, g, d) = p.indicators(i);
    [a as i64, b as i64, g as i64, d as i64]
}

/// `Σ_{x ∈ {0,1}^dim} exp[(πi/2^level)(x A xᵀ + 2 v·x + c)]`, by direct
/// summation.  `level ≤ 2` keeps every phase an eighth root of unity.
pub fn gauss_sum_eval(
    dim: usize,
    level: u32,
    a: &[Vec<i64>],
    v: &[i64],
    c: i64,
) -> Result<ExactAmplitude> {
    if dim > MAX_GAUSS_DIM {
        return Err(Error::TooLarge {
            what: "Gauss sum dimension",
            limit: MAX_GAUSS_DIM,
            requested: dim,
        });
    }
    if level > 2 {
        return Err(Error::InvalidParameter(format!(
            "phase level {level} leaves the eighth roots of unity"
        )));
    }
    if a.len() != dim || a.iter().any(|r| r.len() != dim) || v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: a.len(),
        });
    }
    let scale = 1i64 << (2 - level);
    let mut total = ExactAmplitude::ZERO;
    for k in 0..1u64 << dim {
        let bit = |i: usize| ((k >> i) & 1) as i64;
        let mut q = c;
        for i in 0..dim {
            if bit(i) == 0 {
                continue;
            }
            q += 2 * v[i];
            for j in 0..dim {
                q += a[i][j] * bit(j);
            }
        }
        total += omega(q * scale);
    }
    Ok(total)
}

/// The four delta-gated families of a three-qubit block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    /// Even first-pair parity, third qubit diagonal (`I` or `Z`).
    EvenDiagonal = 1,
    /// Even first-pair parity, third qubit off-diagonal.
    EvenOffDiagonal = 2,
    /// Odd first-pair parity, third qubit diagonal.
    OddDiagonal = 3,
    /// Odd first-pair parity, third qubit off-diagonal.
    OddOffDiagonal = 4,
}

/// A three-qubit block with its active family.
struct Block3 {
    family: Family,
    q: [[i64; 4]; 3],
}

impl Block3 {
    fn new(p: &PauliOperator, start: usize) -> Self {
        let q = [params(p, start), params(p, start + 1), params(p, start + 2)];
        let [_, _, g1, d1] = q[0];
        let [_, _, g2, d2] = q[1];
        let [_, _, g3, d3] = q[2];
        let even = delta(g1 + d1 - g2 - d2);
        let diag = delta(g3 + d3);
        let family = match (even, diag) {
            (true, true) => Family::EvenDiagonal,
            (true, false) => Family::EvenOffDiagonal,
            (false, true) => Family::OddDiagonal,
            (false, false) => Family::OddOffDiagonal,
        };
        Block3 { family, q }
    }

    fn chainable(&self) -> bool {
        self.family != Family::OddDiagonal
    }

    /// Upper end of the even families' x-range.
    fn hi(&self, y: i64) -> i64 {
        let [[_, _, g1, _], [_, _, g2, d2], _] = self.q;
        y * (g1 + g2) + (y + 1) * (g1 + d2)
    }

    /// Unscaled value of the family's sum at loop indices `(x, y)`.
    fn value(&self, x: i64, y: i64) -> ExactAmplitude {
        let [[_, b1, g1, d1], [_, b2, g2, d2], [_, b3, g3, d3]] = self.q;
        match self.family {
            Family::EvenDiagonal | Family::EvenOffDiagonal => {
                let yy = (y + 1) * (y + 1);
                let pre = ip((d2 - g1) * yy
                    + 2 * (b1 + b2 + g1 + d2) * x * yy
                    + 2 * (d1 + d2 + b1 + b2) * x * y
                    + (2 * b1 + 3 * d1 + d2) * y);
                // A collapsed x-range drops a partner term that only cancels
                // when β₁ + β₂ is even.
                let corr = if delta(self.hi(y)) { gate(b1 + b2) } else { ExactAmplitude::ONE };
                let tail = if self.family == Family::EvenDiagonal {
                    g1a(2 * b3)
                } else {
                    omega(-1) * g1a(g3 + d3)
                };
                pre * tail * corr
            }
            Family::OddDiagonal => {
                omega(-1)
                    * ip(2 * b3 * y + (x + 1) * (x + 1) * (d1 + g2 + 2 * b2) + x * (d1 + d2))
                    * g1ab(1, b1 + b2 + d1 + (x + 1) * g2 + x * d2)
            }
            Family::OddOffDiagonal => {
                let lin = b1 + b2 + d1 + g2 * (y + 1) + d2 * y;
                -ExactAmplitude::I
                    * ip(y * (d1 + d2) + (y + 1) * (y + 1) * (d1 + g2 + 2 * b2) + x * x + 2 * lin * x)
                    * g1ab(0, g3 + d3 + lin + x)
            }
        }
    }

    /// Exponent `E` with standalone multiplicity `2^E`.
    fn exponent(&self, x: i64, y: i64) -> u32 {
        let [[_, _, g1, d1], [_, _, g2, d2], _] = self.q;
        let e = match self.family {
            Family::EvenDiagonal | Family::EvenOffDiagonal => {
                1 - y * (g1 - g2).pow(2) - (y - 1).pow(2) * (g1 - d2).pow(2)
            }
            Family::OddDiagonal => 1,
            Family::OddOffDiagonal => {
                (y - 1).pow(2) * (x * x * (g1 + d2) + (x - 1).pow(2) * (g2 + d1))
            }
        };
        e as u32
    }

    /// Loop indices of the block on its own.
    fn own_pairs(&self) -> Vec<(i64, i64)> {
        let [[_, _, g1, d1], [_, _, g2, d2], [a3, b3, _, _]] = self.q;
        match self.family {
            Family::EvenDiagonal | Family::EvenOffDiagonal => (0..2)
                .flat_map(|y| range2(0, self.hi(y)).into_iter().map(move |x| (x, y)))
                .collect(),
            Family::OddDiagonal => range2(0, 1 + b3)
                .into_iter()
                .flat_map(|x| range2(0, 1 + a3).into_iter().map(move |y| (x, y)))
                .collect(),
            Family::OddOffDiagonal => (0..2)
                .flat_map(|y| {
                    range2(y * (d1 + d2), 1 + y * (g1 + g2))
                        .into_iter()
                        .map(move |x| (x, y))
                })
                .collect(),
        }
    }

    /// Loop indices when the block follows others with running parity `s`.
    fn chained_pairs(&self, s: i64) -> Vec<(i64, i64)> {
        let [[_, _, g1, d1], [_, _, g2, d2], _] = self.q;
        match self.family {
            Family::EvenDiagonal | Family::EvenOffDiagonal => {
                range2((g1 + d2) * s, 1 + (g1 + g2) * s)
                    .into_iter()
                    .flat_map(|y| range2(0, self.hi(y)).into_iter().map(move |x| (x, y)))
                    .collect()
            }
            Family::OddOffDiagonal => range2(s, 1)
                .into_iter()
                .flat_map(|y| {
                    range2(y * (d1 + d2) + s, 1 + y * (g1 + g2) + s)
                        .into_iter()
                        .map(move |x| (x, y))
                })
                .collect(),
            Family::OddDiagonal => unreachable!("odd diagonal blocks are never chained"),
        }
    }

    /// Parity this block contributes to the chain.
    fn selector(&self, x: i64, y: i64) -> i64 {
        match self.family {
            Family::EvenDiagonal | Family::EvenOffDiagonal => x,
            _ => y,
        }
    }

    fn tag(&self, x: i64, y: i64) -> (u8, u8, u8) {
        (self.family as u8, x as u8, y as u8)
    }

    /// Standalone terms, scaled by `1/8`.
    fn terms(&self) -> Vec<GaussSumTerm> {
        let eighth = ExactAmplitude::inv_sqrt2_pow(6);
        self.own_pairs()
            .into_iter()
            .map(|(x, y)| GaussSumTerm {
                dimension: 3,
                family: vec![self.tag(x, y)],
                value: self.value(x, y) * eighth,
                multiplicity: 1 << self.exponent(x, y),
            })
            .collect()
    }
}

/// Chain of chainable three-qubit blocks.
fn chain_terms(blocks: &[Block3]) -> Vec<GaussSumTerm> {
    let b = blocks.len();
    let scale = ExactAmplitude::inv_sqrt2_pow(6 * b as u32);
    let mut out = Vec::new();
    let mut tags = Vec::with_capacity(b);
    fn rec(
        blocks: &[Block3],
        j: usize,
        s: i64,
        exp_product: u32,
        value: ExactAmplitude,
        tags: &mut Vec<(u8, u8, u8)>,
        scale: ExactAmplitude,
        out: &mut Vec<GaussSumTerm>,
    ) {
        let b = blocks.len();
        if j == b {
            out.push(GaussSumTerm {
                dimension: 3 * b,
                family: tags.clone(),
                value: value * scale,
                multiplicity: (1u64 << (b - 1)) << exp_product,
            });
            return;
        }
        let block = &blocks[j];
        let pairs = if j == 0 { block.own_pairs() } else { block.chained_pairs(s) };
        for (x, y) in pairs {
            tags.push(block.tag(x, y));
            rec(
                blocks,
                j + 1,
                (s + block.selector(x, y)).rem_euclid(2),
                exp_product * block.exponent(x, y),
                value * block.value(x, y),
                tags,
                scale,
                out,
            );
            tags.pop();
        }
    }
    rec(blocks, 0, 0, 1, ExactAmplitude::ONE, &mut tags, scale, &mut out);
    out
}

/// All pairwise products of two term lists.
fn product_terms(a: &[GaussSumTerm], b: &[GaussSumTerm]) -> Vec<GaussSumTerm> {
    a.iter()
        .flat_map(|ta| {
            b.iter().map(move |tb| GaussSumTerm {
                dimension: ta.dimension + tb.dimension,
                family: ta.family.iter().chain(&tb.family).copied().collect(),
                value: ta.value * tb.value,
                multiplicity: ta.multiplicity * tb.multiplicity,
            })
        })
        .collect()
}

fn with_phase(mut terms: Vec<GaussSumTerm>, p: &PauliOperator) -> GaussSumReport {
    let phase = p.phase().to_amplitude();
    for t in &mut terms {
        t.value = t.value * phase;
    }
    GaussSumReport::from_terms(terms)
}

fn check_len(p: &PauliOperator, k: usize) -> Result<()> {
    if p.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: p.len(),
        });
    }
    Ok(())
}

fn k1_terms(p: &PauliOperator) -> Vec<GaussSumTerm> {
    let [a, b, g, d] = params(p, 0);
    let half = ExactAmplitude::new(1, 0, 0, 0, 2);
    let diag = gate(g + d);
    let off = gate(a + b);
    let values = [
        (1, diag),
        (1, sign(b) * diag),
        (2, omega(1) * ip(-d) * off),
        (2, omega(-1) * ip(d) * off),
    ];
    values
        .into_iter()
        .enumerate()
        .map(|(i, (set, v))| GaussSumTerm {
            dimension: 1,
            family: vec![(set, i as u8, 0)],
            value: v * half,
            multiplicity: 1,
        })
        .collect()
}

fn k2_terms(p: &PauliOperator) -> Vec<GaussSumTerm> {
    let [_, b1, g1, d1] = params(p, 0);
    let [_, b2, g2, d2] = params(p, 1);
    let quarter = ExactAmplitude::new(1, 0, 0, 0, 4);
    let even = gate(g1 + d1 - g2 - d2);
    let odd = gate(g1 + d1 - g2 - d2 + 1);
    let values = [
        (1, ip(d2 - g1) * g1a(2 * (b1 + b2 + g1 + d2)) * even),
        (1, sign(b1 + d1) * ip(d1 + d2) * g1a(2 * (b1 + d1 + b2 + d2)) * even),
        (
            2,
            omega(1) * sign(b2 + g2) * ip(d1 - g2) * -ExactAmplitude::I
                * g1ab(1, b2 + g2 + b1 + d1)
                * odd,
        ),
        (2, omega(-1) * ip(d1 + d2) * g1ab(1, b1 + b2 + d1 + d2) * odd),
    ];
    values
        .into_iter()
        .enumerate()
        .map(|(i, (set, v))| GaussSumTerm {
            dimension: 2,
            family: vec![(set, i as u8, 0)],
            value: v * quarter,
            multiplicity: 1,
        })
        .collect()
}

fn k6_terms(p: &PauliOperator, start: usize) -> Vec<GaussSumTerm> {
    let blocks = [Block3::new(p, start), Block3::new(p, start + 3)];
    if blocks.iter().all(Block3::chainable) {
        chain_terms(&blocks)
    } else {
        product_terms(&blocks[0].terms(), &blocks[1].terms())
    }
}

fn k12_terms(p: &PauliOperator) -> Vec<GaussSumTerm> {
    let blocks: Vec<Block3> = (0..4).map(|i| Block3::new(p, 3 * i)).collect();
    if blocks.iter().all(Block3::chainable) {
        chain_terms(&blocks)
    } else {
        product_terms(&k6_terms(p, 0), &k6_terms(p, 6))
    }
}

/// `⟨T|P|T⟩` on one qubit.
pub fn expect_block_k1(p: &PauliOperator) -> Result<GaussSumReport> {
    check_len(p, 1)?;
    Ok(with_phase(k1_terms(p), p))
}

/// `⟨T^{⊗2}|P|T^{⊗2}⟩`.
pub fn expect_block_k2(p: &PauliOperator) -> Result<GaussSumReport> {
    check_len(p, 2)?;
    Ok(with_phase(k2_terms(p), p))
}

/// `⟨T^{⊗3}|P|T^{⊗3}⟩`.
pub fn expect_block_k3(p: &PauliOperator) -> Result<GaussSumReport> {
    check_len(p, 3)?;
    Ok(with_phase(Block3::new(p, 0).terms(), p))
}

/// `⟨T^{⊗6}|P|T^{⊗6}⟩`.
pub fn expect_block_k6(p: &PauliOperator) -> Result<GaussSumReport> {
    check_len(p, 6)?;
    Ok(with_phase(k6_terms(p, 0), p))
}

/// `⟨T^{⊗12}|P|T^{⊗12}⟩`.
pub fn expect_block_k12(p: &PauliOperator) -> Result<GaussSumReport> {
    check_len(p, 12)?;
    Ok(with_phase(k12_terms(p), p))
}

/// Dispatch on the operator length.
pub fn expect_block(p: &PauliOperator) -> Result<GaussSumReport> {
    match p.len() {
        1 => expect_block_k1(p),
        2 => expect_block_k2(p),
        3 => expect_block_k3(p),
        6 => expect_block_k6(p),
        12 => expect_block_k12(p),
        k => Err(Error::InvalidParameter(format!(
            "no Gauss-sum evaluator for block size {k}"
        ))),
    }
}

/// `⟨T^{⊗t}|P|T^{⊗t}⟩` factorised over the greedy block cover of `t`.
pub fn expect_single_pauli(p: &PauliOperator, policy: &[usize]) -> Result<SinglePauliReport> {
    let t = p.len();
    if t == 0 {
        return Err(Error::InvalidParameter("T-count must be at least 1".into()));
    }
    let blocks = block_cover(t, policy)?;
    let mut expectation = p.phase().to_amplitude();
    let mut unique: u128 = 1;
    let mut reports = Vec::with_capacity(blocks.len());
    let mut start = 0;
    for &b in &blocks {
        let report = expect_block(&p.slice(start, b))?;
        expectation = expectation * report.expectation;
        unique = unique.saturating_mul(report.unique_nonzero_sums as u128);
        reports.push(report);
        start += b;
    }
    Ok(SinglePauliReport {
        expectation,
        unique_nonzero_sums: unique,
        blocks,
        block_reports: reports,
    })
}

/// Which Paulis a census visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    /// All `4^k` phase-free Paulis (`k ≤ 6`).
    Exhaustive,
    /// `count` uniformly random Paulis; item `i` uses stream `i` of `seed`.
    Sampled { count: u64, seed: u64 },
}

/// Distribution of unique non-zero sum counts over Paulis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCensus {
    /// Block size.
    pub k: usize,
    /// Number of Paulis evaluated.
    pub evaluated: u64,
    /// Largest count seen.
    pub max: usize,
    /// Count → number of Paulis.
    pub histogram: BTreeMap<usize, u64>,
    /// The first visited Pauli attaining the maximum.
    pub witness: PauliOperator,
}

/// Largest block size for exhaustive census.
pub const MAX_EXHAUSTIVE_CENSUS: usize = 6;

/// The `i`-th Pauli of a sampled census.
pub fn census_pauli(k: usize, seed: u64, i: u64) -> PauliOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    PauliOperator::random(k, &mut rng)
}

/// Worst case and histogram of unique non-zero Gauss sums for block size `k`.
pub fn rank_census(k: usize, mode: CensusMode) -> Result<RankCensus> {
    if !BLOCK_SIZES.contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "no Gauss-sum evaluator for block size {k}"
        )));
    }
    let (count, pauli): (u64, Box<dyn Fn(u64) -> PauliOperator + Sync>) = match mode {
        CensusMode::Exhaustive => {
            if k > MAX_EXHAUSTIVE_CENSUS {
                return Err(Error::TooLarge {
                    what: "exhaustive census block size",
                    limit: MAX_EXHAUSTIVE_CENSUS,
                    requested: k,
                });
            }
            (1 << (2 * k), Box::new(move |i| PauliOperator::from_index(k, i)))
        }
        CensusMode::Sampled { count, seed } => {
            (count, Box::new(move |i| census_pauli(k, seed, i)))
        }
    };
    if count == 0 {
        return Err(Error::InvalidParameter("census needs at least one Pauli".into()));
    }
    let counts: Vec<usize> = (0..count)
        .into_par_iter()
        .map(|i| {
            expect_block(&pauli(i))
                .expect("block size validated")
                .unique_nonzero_sums
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for &c in &counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let max = *counts.iter().max().expect("non-empty census");
    let at = counts.iter().position(|&c| c == max).expect("max is attained") as u64;
    Ok(RankCensus {
        k,
        evaluated: count,
        max,
        histogram,
        witness: pauli(at),
    })
}
