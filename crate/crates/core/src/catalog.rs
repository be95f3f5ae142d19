//! Exact stabilizer decompositions of tensored magic states
//! `|T⟩^{⊗k} = Σ_j c_j |φ_j⟩`, their tensor composition, block covers and a
//! line-oriented text format.
//!
//! The catalog holds decompositions with 2, 2, 3, 7 and 47 terms for
//! `k = 1, 2, 3, 6, 12`.  Every coefficient and state is exact, so each
//! entry reconstructs `|T⟩^{⊗k}` with ring equality.
//!
//! # Text format
//!
//! ```text
//! # comment lines start with '#'
//! k=1 terms=2
//! coeff=(1,0,0,0,1)
//! state n=1 m=0
//! G=
//! h=0
//! J=
//! D=
//! c=0
//! global=(1,0,0,0,0)
//! ...
//! ```
//!
//! `G` lists generator rows as bitstrings separated by commas, `J` lists the
//! upper-triangular rows as digit strings (entries 0 or 4), `D` is a digit
//! string, and qubit 0 is the leftmost character of every bitstring.

use std::fmt::Write as _;

use crate::dense::{dense_magic_state_exact, DenseState, ExactDenseState};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::phase_ring::{EighthRootPhase, ExactAmplitude};
use crate::stabilizer::StabilizerState;

/// Block sizes for which the catalog has a decomposition.
pub const CATALOG_SIZES: [usize; 5] = [12, 6, 3, 2, 1];

/// A stabilizer decomposition of `|T⟩^{⊗k}` (possibly padded with `|0⟩`s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagicDecomposition {
    k: usize,
    terms: Vec<(ExactAmplitude, StabilizerState)>,
}

fn bits(s: &str) -> BitVector {
    s.parse().expect("static bitstring")
}

fn omega(k: i64) -> ExactAmplitude {
    EighthRootPhase::new(k).to_amplitude()
}

/// `J` with `4` on every listed pair `(i, j)`, `i < j`.
fn couplings(m: usize, pairs: &[(usize, usize)]) -> Vec<Vec<u8>> {
    let mut j = vec![vec![0u8; m]; m];
    for &(a, b) in pairs {
        j[a][b] = 4;
    }
    j
}

fn all_pairs(m: usize) -> Vec<Vec<u8>> {
    (0..m)
        .map(|i| (0..m).map(|k| if k > i { 4 } else { 0 }).collect())
        .collect()
}

fn state(
    n: usize,
    gens: &[&str],
    shift: &str,
    j: &[Vec<u8>],
    d: &[u8],
    c: u8,
) -> StabilizerState {
    StabilizerState::new(
        n,
        gens.iter().map(|g| bits(g)).collect(),
        bits(shift),
        j,
        d,
        c,
        ExactAmplitude::inv_sqrt2_pow(gens.len() as u32),
    )
    .expect("catalog state data is valid")
}

/// Generators of the five-dimensional even/odd-weight supports on six qubits.
const PAIRED_WITH_FIRST: [&str; 5] = ["110000", "101000", "100100", "100010", "100001"];

impl MagicDecomposition {
    /// Assemble from terms; every state must have the same qubit count.
    pub fn new(k: usize, terms: Vec<(ExactAmplitude, StabilizerState)>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidParameter("decomposition has no terms".into()));
        };
        let n = first.1.n();
        if n < k {
            return Err(Error::DimensionMismatch { expected: k, found: n });
        }
        if let Some((_, s)) = terms.iter().find(|(_, s)| s.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.n(),
            });
        }
        Ok(MagicDecomposition { k, terms })
    }

    /// Number of magic qubits.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Total qubit count (magic qubits plus padding).
    pub fn n(&self) -> usize {
        self.terms[0].1.n()
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Always false: decompositions have at least one term.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The `(coefficient, state)` terms.
    pub fn terms(&self) -> &[(ExactAmplitude, StabilizerState)] {
        &self.terms
    }

    /// The trivial decomposition of the empty product (one term, no qubits).
    pub fn empty() -> Self {
        MagicDecomposition {
            k: 0,
            terms: vec![(ExactAmplitude::ONE, StabilizerState::zero_state(0))],
        }
    }

    /// `Σ_j c_j |φ_j⟩` as an exact dense vector.
    pub fn reconstruct_exact(&self) -> Result<ExactDenseState> {
        let mut out = ExactDenseState::zeros(self.n())?;
        for (c, s) in &self.terms {
            out.add_scaled(*c, &ExactDenseState::new(s.n(), s.to_dense_exact()?)?);
        }
        Ok(out)
    }

    /// `Σ_j c_j |φ_j⟩` in double precision.
    pub fn reconstruct(&self) -> Result<DenseState> {
        let mut out = DenseState::zeros(self.n())?;
        for (c, s) in &self.terms {
            out.add_scaled(c.to_complex(), &DenseState::new(s.n(), s.to_dense()?)?);
        }
        Ok(out)
    }

    /// True when the decomposition equals `|T⟩^{⊗k} ⊗ |0⟩^{⊗(n−k)}` exactly.
    pub fn reconstructs_target(&self) -> Result<bool> {
        let target = dense_magic_state_exact(self.k)?
            .kron(&ExactDenseState::zero_state(self.n() - self.k)?)?;
        Ok(self.reconstruct_exact()? == target)
    }

    /// `Σ_{j,l} c_j* c_l ⟨φ_j|φ_l⟩` using kernel inner products only.
    pub fn norm_sq_via_inner_products(&self) -> ExactAmplitude {
        let mut total = ExactAmplitude::ZERO;
        for (cj, sj) in &self.terms {
            for (cl, sl) in &self.terms {
                total += cj.conj() * *cl * sj.inner_product(sl);
            }
        }
        total
    }

    /// All pairwise tensor products of terms.
    pub fn tensor(&self, other: &MagicDecomposition) -> MagicDecomposition {
        assert_eq!(self.n(), self.k, "tensor of padded decompositions");
        let terms = self
            .terms
            .iter()
            .flat_map(|(ca, sa)| {
                other
                    .terms
                    .iter()
                    .map(move |(cb, sb)| (*ca * *cb, sa.tensor(sb)))
            })
            .collect();
        MagicDecomposition {
            k: self.k + other.k,
            terms,
        }
    }

    /// Pad every state with `|0⟩` up to `n` qubits.
    pub fn extend_with_zeros(&self, n: usize) -> Result<MagicDecomposition> {
        let cur = self.n();
        if n < cur {
            return Err(Error::InvalidParameter(format!(
                "cannot shrink a {cur}-qubit decomposition to {n} qubits"
            )));
        }
        if n == cur {
            return Ok(self.clone());
        }
        let pad = StabilizerState::zero_state(n - cur);
        Ok(MagicDecomposition {
            k: self.k,
            terms: self
                .terms
                .iter()
                .map(|(c, s)| (*c, s.tensor(&pad)))
                .collect(),
        })
    }

    /// Serialise in the catalog text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# coefficients normalized so the terms sum exactly to |T>^k; qubit 0 is the leftmost bit"
        );
        let _ = writeln!(out, "k={} terms={}", self.k, self.terms.len());
        for (c, s) in &self.terms {
            let basis = s.space().basis();
            let join = |v: Vec<String>| v.join(",");
            let _ = writeln!(out, "coeff={}", c.to_tuple_string());
            let _ = writeln!(out, "state n={} m={}", s.n(), s.dim());
            let _ = writeln!(
                out,
                "G={}",
                join(basis.rows().iter().map(|r| r.to_string()).collect())
            );
            let _ = writeln!(out, "h={}", s.space().shift());
            let _ = writeln!(
                out,
                "J={}",
                join(
                    s.j_upper()
                        .iter()
                        .map(|r| r.iter().map(|v| v.to_string()).collect())
                        .collect()
                )
            );
            let _ = writeln!(
                out,
                "D={}",
                s.d().iter().map(|v| v.to_string()).collect::<String>()
            );
            let _ = writeln!(out, "c={}", s.c());
            let _ = writeln!(out, "global={}", s.global().to_tuple_string());
        }
        out
    }

    /// Parse the catalog text format.
    pub fn from_text(text: &str) -> Result<MagicDecomposition> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: String| Error::Parse {
            position: line,
            message,
        };
        let mut field = |key: &str| -> Result<(usize, String)> {
            let (no, l) = lines
                .next()
                .ok_or_else(|| err(0, format!("unexpected end of input, expected `{key}`")))?;
            let rest = l
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('=').or_else(|| r.strip_prefix(' ')))
                .ok_or_else(|| err(no, format!("expected `{key}`, found `{l}`")))?;
            Ok((no, rest.to_string()))
        };
        let parse_usize = |no: usize, s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| err(no, format!("invalid integer `{s}`")))
        };
        let parse_digits = |no: usize, s: &str| -> Result<Vec<u8>> {
            s.chars()
                .map(|ch| {
                    ch.to_digit(8)
                        .map(|d| d as u8)
                        .ok_or_else(|| err(no, format!("invalid digit `{ch}`")))
                })
                .collect()
        };
        let split = |s: &str| -> Vec<String> {
            if s.is_empty() {
                Vec::new()
            } else {
                s.split(',').map(|t| t.trim().to_string()).collect()
            }
        };
        let at = |no: usize| move |e: Error| match e {
            Error::Parse { message, .. } => err(no, message),
            other => err(no, other.to_string()),
        };

        let (no, header) = field("k")?;
        let (k_str, terms_str) = header
            .split_once(" terms=")
            .ok_or_else(|| err(no, "expected `k=<int> terms=<int>`".into()))?;
        let k = parse_usize(no, k_str)?;
        let count = parse_usize(no, terms_str)?;
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let (no, c) = field("coeff")?;
            let coeff: ExactAmplitude = c.parse().map_err(at(no))?;
            let (no, st) = field("state")?;
            let (n_str, m_str) = st
                .trim()
                .strip_prefix("n=")
                .and_then(|r| r.split_once(" m="))
                .ok_or_else(|| err(no, "expected `state n=<int> m=<int>`".into()))?;
            let n = parse_usize(no, n_str)?;
            let m = parse_usize(no, m_str)?;
            let (no, g) = field("G")?;
            let gens: Vec<BitVector> = split(&g)
                .iter()
                .map(|r| r.parse::<BitVector>().map_err(at(no)))
                .collect::<Result<_>>()?;
            if gens.len() != m || gens.iter().any(|r| r.len() != n) {
                return Err(err(no, format!("expected {m} generator rows of length {n}")));
            }
            let (no, h) = field("h")?;
            let shift: BitVector = if n == 0 && h.is_empty() {
                BitVector::zeros(0)
            } else {
                h.parse().map_err(at(no))?
            };
            if shift.len() != n {
                return Err(err(no, format!("shift must have length {n}")));
            }
            let (no, j) = field("J")?;
            let j: Vec<Vec<u8>> = split(&j)
                .iter()
                .map(|r| parse_digits(no, r))
                .collect::<Result<_>>()?;
            let (no_d, d) = field("D")?;
            let d = parse_digits(no_d, &d)?;
            let (no_c, c) = field("c")?;
            let c = parse_usize(no_c, &c)? as u8;
            let (no_g, gl) = field("global")?;
            let global: ExactAmplitude = gl.parse().map_err(at(no_g))?;
            let s = StabilizerState::new(n, gens, shift, &j, &d, c, global).map_err(at(no))?;
            terms.push((coeff, s));
        }
        if let Some((no, l)) = lines.next() {
            return Err(err(no, format!("unexpected trailing line `{l}`")));
        }
        MagicDecomposition::new(k, terms)
    }
}

/// `|T⟩ = (|0⟩ + ω|1⟩)/√2` as two basis states.
pub fn t1_decomposition() -> MagicDecomposition {
    let r = ExactAmplitude::INV_SQRT2;
    MagicDecomposition {
        k: 1,
        terms: vec![
            (r, StabilizerState::basis_state(bits("0"))),
            (omega(1) * r, StabilizerState::basis_state(bits("1"))),
        ],
    }
}

/// `|T⟩^{⊗2} = (|φ₁⟩ + ω|φ₂⟩)/√2` with `|φ₁⟩ = (|00⟩ + i|11⟩)/√2` and
/// `|φ₂⟩ = (|01⟩ + |10⟩)/√2`.
pub fn t2_decomposition() -> MagicDecomposition {
    let r = ExactAmplitude::INV_SQRT2;
    let phi1 = state(2, &["11"], "00", &[vec![0]], &[2], 0);
    let phi2 = state(2, &["11"], "01", &[vec![0]], &[0], 0);
    MagicDecomposition {
        k: 2,
        terms: vec![(r, phi1), (omega(1) * r, phi2)],
    }
}

/// The three-term decomposition of `|T⟩^{⊗3}`.
pub fn t3_decomposition() -> MagicDecomposition {
    let i = ExactAmplitude::I;
    let one = ExactAmplitude::ONE;
    let z = ExactAmplitude::ZERO;
    let r2 = ExactAmplitude::SQRT2;
    let quarter = ExactAmplitude::new(1, 0, 0, 0, 4);
    let from = |amps: [ExactAmplitude; 8], scale: ExactAmplitude| {
        let scaled: Vec<ExactAmplitude> = amps.iter().map(|a| *a * scale).collect();
        StabilizerState::from_amplitudes(3, &scaled).expect("three-qubit catalog state")
    };
    let psi1 = from([z, z, z, one, i, z, z, z], ExactAmplitude::INV_SQRT2);
    let s = ExactAmplitude::inv_sqrt2_pow(3);
    let psi2 = from([i, -one, -one, -i, i, -one, -one, -i], s);
    let psi3 = from([i, one, one, i, i, -one, -one, i], s);
    // c₁ = −(1−i)/4·(−1−i+√2)·ω⁻¹, c₂ = −(1+i)/4·(1−i+√2)·ω,
    // c₃ = −(1+i)/4·(−1+i+√2)·ω.
    let c1 = -((one - i) * quarter) * (-one - i + r2) * omega(-1);
    let c2 = -((one + i) * quarter) * (one - i + r2) * omega(1);
    let c3 = -((one + i) * quarter) * (-one + i + r2) * omega(1);
    MagicDecomposition {
        k: 3,
        terms: vec![(c1, psi1), (c2, psi2), (c3, psi3)],
    }
}

/// The seven six-qubit states of the `k = 6` decomposition, in the order
/// `b60, b66, e6, o6, k6, φ′, φ″`.
pub fn t6_states() -> [StabilizerState; 7] {
    let full: Vec<&str> = vec!["100000", "010000", "001000", "000100", "000010", "000001"];
    let z6 = vec![vec![0u8; 6]; 6];
    let b60 = state(6, &full, "000000", &z6, &[0; 6], 0);
    let b66 = state(6, &full, "000000", &z6, &[4; 6], 4);
    let j6 = all_pairs(5);
    let e6 = state(6, &PAIRED_WITH_FIRST, "100000", &j6, &[0; 5], 4);
    let o6 = state(6, &PAIRED_WITH_FIRST, "000000", &j6, &[4; 5], 4);
    let k6 = state(6, &["111111"], "111111", &[vec![0]], &[2], 6);
    let jp = couplings(5, &[(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
    let jpp = couplings(5, &[(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]);
    let phi_p = state(6, &PAIRED_WITH_FIRST, "100000", &jp, &[0; 5], 0);
    let phi_pp = state(6, &PAIRED_WITH_FIRST, "100000", &jpp, &[0; 5], 0);
    [b60, b66, e6, o6, k6, phi_p, phi_pp]
}

/// Coefficients of [`t6_states`], in the same order.
pub fn t6_coefficients() -> [ExactAmplitude; 7] {
    let w3 = omega(3);
    let w1 = omega(1);
    let r2_4 = ExactAmplitude::new(0, 1, 0, 0, 4);
    [
        ExactAmplitude::new(1, 1, 0, 0, 4) * w3,
        ExactAmplitude::new(1, -1, 0, 0, 4) * w3,
        r2_4 * w3,
        ExactAmplitude::new(1, 0, 0, 0, 2) * w1,
        r2_4,
        r2_4 * w1,
        r2_4 * w1,
    ]
}

/// The seven-term decomposition of `|T⟩^{⊗6}`.
pub fn t6_decomposition() -> MagicDecomposition {
    MagicDecomposition {
        k: 6,
        terms: t6_coefficients().into_iter().zip(t6_states()).collect(),
    }
}

const B60: usize = 0;
const B66: usize = 1;
const E6: usize = 2;
const O6: usize = 3;

/// Generators of the 11-dimensional merged supports on twelve qubits.
fn merged_generators() -> Vec<BitVector> {
    (0..11)
        .map(|i| BitVector::from_fn(12, |c| c == 0 || c == i + 1))
        .collect()
}

/// The single stabilizer state equal to `(|b60⟩|b66⟩ + |b66⟩|b60⟩)/√2`.
pub fn merged_b_state() -> StabilizerState {
    let d: Vec<u8> = (0..11).map(|i| if i >= 5 { 4 } else { 0 }).collect();
    StabilizerState::new(
        12,
        merged_generators(),
        BitVector::zeros(12),
        &vec![vec![0; 11]; 11],
        &d,
        4,
        ExactAmplitude::inv_sqrt2_pow(11),
    )
    .expect("merged state data is valid")
}

/// The single stabilizer state equal to `(|e6⟩|o6⟩ + |o6⟩|e6⟩)/√2`.
pub fn merged_eo_state() -> StabilizerState {
    StabilizerState::new(
        12,
        merged_generators(),
        BitVector::unit(12, 0),
        &all_pairs(11),
        &[0; 11],
        0,
        ExactAmplitude::inv_sqrt2_pow(11),
    )
    .expect("merged state data is valid")
}

/// The 47-term decomposition of `|T⟩^{⊗12}`: the 49 pairwise products of
/// the six-qubit terms with two symmetric pairs each merged into one state.
pub fn t12_decomposition() -> MagicDecomposition {
    let states = t6_states();
    let coeffs = t6_coefficients();
    let r2 = ExactAmplitude::SQRT2;
    let mut terms = Vec::with_capacity(47);
    for a in 0..7 {
        for b in 0..7 {
            match (a, b) {
                (B60, B66) => terms.push((r2 * coeffs[B60] * coeffs[B66], merged_b_state())),
                (E6, O6) => terms.push((r2 * coeffs[E6] * coeffs[O6], merged_eo_state())),
                (B66, B60) | (O6, E6) => {}
                _ => terms.push((coeffs[a] * coeffs[b], states[a].tensor(&states[b]))),
            }
        }
    }
    MagicDecomposition { k: 12, terms }
}

/// The catalog entry for block size `k`.
pub fn catalog_entry(k: usize) -> Result<MagicDecomposition> {
    match k {
        1 => Ok(t1_decomposition()),
        2 => Ok(t2_decomposition()),
        3 => Ok(t3_decomposition()),
        6 => Ok(t6_decomposition()),
        12 => Ok(t12_decomposition()),
        _ => Err(Error::InvalidParameter(format!(
            "no catalog decomposition for block size {k}"
        ))),
    }
}

/// Cover `t` with blocks from `policy`, largest first.
pub fn block_cover(t: usize, policy: &[usize]) -> Result<Vec<usize>> {
    if let Some(&bad) = policy.iter().find(|b| !CATALOG_SIZES.contains(b)) {
        return Err(Error::InvalidParameter(format!(
            "block size {bad} is not one of 12, 6, 3, 2, 1"
        )));
    }
    let mut sizes = policy.to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.dedup();
    let mut remaining = t;
    let mut blocks = Vec::new();
    for b in sizes {
        while remaining >= b {
            blocks.push(b);
            remaining -= b;
        }
    }
    if remaining > 0 {
        return Err(Error::PolicyCannotCover {
            t,
            policy: policy.to_vec(),
        });
    }
    Ok(blocks)
}

/// Tensor of catalog decompositions over the greedy block cover of `t`.
/// `t = 0` gives the trivial one-term decomposition on zero qubits.
pub fn block_decomposition(t: usize, policy: &[usize]) -> Result<MagicDecomposition> {
    let mut out = MagicDecomposition::empty();
    for b in block_cover(t, policy)? {
        out = out.tensor(&catalog_entry(b)?);
    }
    Ok(out)
}
