//! Pauli operators, their action on computational basis states, and
//! commuting Pauli projectors.
//!
//! A Pauli operator on `n` qubits is `ω · ⊗_i P_i` with `P_i ∈ {I, Z, X, Y}`
//! and `ω` a fourth root of unity.  Internally each site is stored as an
//! X-bit and a Z-bit, with `Y = i·X·Z`, so that
//! `P|x⟩ = ω · i^{#Y} · (−1)^{z·x} |x ⊕ x_mask⟩`.
//!
//! Text form: an optional phase token `+1`, `-1`, `+i`, `-i` followed by `:`,
//! then one character per qubit from `IZXY`, qubit 0 leftmost — for example
//! `-i:XYZI`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::phase_ring::EighthRootPhase;

/// A single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliKind {
    I,
    Z,
    X,
    Y,
}

impl PauliKind {
    /// All four kinds in the order I, Z, X, Y.
    pub const ALL: [PauliKind; 4] = [PauliKind::I, PauliKind::Z, PauliKind::X, PauliKind::Y];

    /// Indicator bits `(α, β, γ, δ)` for `(I, Z, X, Y)`.
    pub fn indicators(self) -> (u8, u8, u8, u8) {
        match self {
            PauliKind::I => (1, 0, 0, 0),
            PauliKind::Z => (0, 1, 0, 0),
            PauliKind::X => (0, 0, 1, 0),
            PauliKind::Y => (0, 0, 0, 1),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliKind::I,
            (false, true) => PauliKind::Z,
            (true, false) => PauliKind::X,
            (true, true) => PauliKind::Y,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::I => (false, false),
            PauliKind::Z => (false, true),
            PauliKind::X => (true, false),
            PauliKind::Y => (true, true),
        }
    }

    /// The character used in the text form.
    pub fn symbol(self) -> char {
        match self {
            PauliKind::I => 'I',
            PauliKind::Z => 'Z',
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
        }
    }
}

/// An `n`-qubit Pauli operator with a fourth-root-of-unity phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVector,
    z: BitVector,
    /// Global phase `ω = i^phase`.
    phase: u8,
}

impl PauliOperator {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    /// Build from per-site kinds and `ω = i^phase`.
    pub fn from_kinds(kinds: &[PauliKind], phase: i64) -> Self {
        let n = kinds.len();
        let mut p = Self::identity(n);
        for (i, k) in kinds.iter().enumerate() {
            let (x, z) = k.bits();
            p.x.set(i, x);
            p.z.set(i, z);
        }
        p.phase = phase.rem_euclid(4) as u8;
        p
    }

    /// Build from X and Z masks (`Y` where both are set) and `ω = i^phase`.
    pub fn from_masks(x: BitVector, z: BitVector, phase: i64) -> Self {
        assert_eq!(x.len(), z.len(), "mask lengths differ");
        PauliOperator {
            x,
            z,
            phase: phase.rem_euclid(4) as u8,
        }
    }

    /// The operator indexed by `index ∈ 0..4^n`: base-4 digits in I, Z, X, Y
    /// order, qubit 0 most significant.
    pub fn from_index(n: usize, index: u64) -> Self {
        let kinds: Vec<PauliKind> = (0..n)
            .map(|i| PauliKind::ALL[((index >> (2 * (n - 1 - i))) & 3) as usize])
            .collect();
        Self::from_kinds(&kinds, 0)
    }

    /// A uniformly random phase-free Pauli on `n` qubits.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let kinds: Vec<PauliKind> = (0..n).map(|_| PauliKind::ALL[rng.gen_range(0..4)]).collect();
        Self::from_kinds(&kinds, 0)
    }

    /// Number of qubits.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// True for a zero-qubit operator.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The kind on qubit `i`.
    pub fn kind(&self, i: usize) -> PauliKind {
        PauliKind::from_bits(self.x.get(i), self.z.get(i))
    }

    /// All site kinds.
    pub fn kinds(&self) -> Vec<PauliKind> {
        (0..self.len()).map(|i| self.kind(i)).collect()
    }

    /// Indicator bits `(α, β, γ, δ)` on qubit `i`.
    pub fn indicators(&self, i: usize) -> (u8, u8, u8, u8) {
        self.kind(i).indicators()
    }

    /// Exponent `k` of the global phase `ω = i^k`.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    /// The global phase as an eighth root.
    pub fn phase(&self) -> EighthRootPhase {
        EighthRootPhase::i_pow(self.phase as i64)
    }

    /// The same operator with phase `ω = i^k`.
    pub fn with_phase(&self, k: i64) -> Self {
        PauliOperator {
            phase: k.rem_euclid(4) as u8,
            ..self.clone()
        }
    }

    /// True when `ω = ±1`.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Positions flipped by the operator (sites with X or Y).
    pub fn x_mask(&self) -> &BitVector {
        &self.x
    }

    /// Positions carrying a Z component (sites with Z or Y).
    pub fn z_mask(&self) -> &BitVector {
        &self.z
    }

    /// Number of Y sites.
    pub fn y_count(&self) -> usize {
        self.x.and(&self.z).count_ones()
    }

    /// True when the operator is the identity up to phase.
    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// The constant part of the basis-state phase, `ω · i^{#Y}`.
    pub fn base_phase(&self) -> EighthRootPhase {
        EighthRootPhase::i_pow(self.phase as i64 + self.y_count() as i64)
    }

    /// `P|x⟩ = phase · |y⟩`.
    pub fn on_basis(&self, x: &BitVector) -> (BitVector, EighthRootPhase) {
        assert_eq!(x.len(), self.len(), "basis state length mismatch");
        let sign = if self.z.dot(x) { 4 } else { 0 };
        (x.xor(&self.x), self.base_phase() * EighthRootPhase::new(sign))
    }

    /// True when the two operators commute.
    pub fn commutes(&self, other: &PauliOperator) -> bool {
        assert_eq!(self.len(), other.len(), "operator lengths differ");
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    /// The sub-operator on qubits `start..start + len`, with phase 1.
    pub fn slice(&self, start: usize, len: usize) -> PauliOperator {
        PauliOperator {
            x: self.x.slice(start, len),
            z: self.z.slice(start, len),
            phase: 0,
        }
    }

    /// Tensor product `self ⊗ other`; phases multiply.
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        PauliOperator {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: (self.phase + other.phase) % 4,
        }
    }

    /// The operator padded with identities to `n` qubits.
    pub fn padded(&self, n: usize) -> PauliOperator {
        assert!(n >= self.len(), "cannot pad to fewer qubits");
        self.tensor(&PauliOperator::identity(n - self.len()))
    }

    /// The site string without the phase token.
    pub fn body(&self) -> String {
        (0..self.len()).map(|i| self.kind(i).symbol()).collect()
    }
}

impl fmt::Display for PauliOperator {
    /// The text form; the phase token is omitted when `ω = 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = ["", "+i:", "-1:", "-i:"][self.phase as usize];
        write!(f, "{token}{}", self.body())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, body, offset) = match s.split_once(':') {
            Some((token, body)) => {
                let phase = match token.trim() {
                    "+1" | "1" => 0,
                    "+i" | "i" => 1,
                    "-1" => 2,
                    "-i" => 3,
                    other => {
                        return Err(Error::Parse {
                            position: 0,
                            message: format!("unknown phase token `{other}`"),
                        })
                    }
                };
                (phase, body, token.chars().count() + 1)
            }
            None => (0, s, 0),
        };
        if body.is_empty() {
            return Err(Error::Parse {
                position: offset,
                message: "empty Pauli string".into(),
            });
        }
        let kinds = body
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                'I' => Ok(PauliKind::I),
                'Z' => Ok(PauliKind::Z),
                'X' => Ok(PauliKind::X),
                'Y' => Ok(PauliKind::Y),
                other => Err(Error::Parse {
                    position: offset + i,
                    message: format!("expected one of I, Z, X, Y, found `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_kinds(&kinds, phase))
    }
}

/// A product `Π_i (I + s_i P_i)/2` of commuting Hermitian Pauli projectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliProjector {
    n: usize,
    factors: Vec<(PauliOperator, i8)>,
}

impl PauliProjector {
    /// Validate and build a projector on `n` qubits.
    ///
    /// A `−1` operator phase is folded into the sign; phases `±i` are
    /// rejected because the factor would not be Hermitian.
    pub fn new(n: usize, factors: Vec<(PauliOperator, i8)>) -> Result<Self> {
        if factors.len() > n.max(1) {
            return Err(Error::TooManyFactors {
                factors: factors.len(),
                qubits: n,
            });
        }
        let mut normalized = Vec::with_capacity(factors.len());
        for (p, s) in factors {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.len(),
                });
            }
            if !p.is_hermitian() {
                return Err(Error::NonHermitian);
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidParameter(format!("projector sign {s}")));
            }
            let sign = if p.phase_exponent() == 2 { -s } else { s };
            normalized.push((p.with_phase(0), sign));
        }
        for i in 0..normalized.len() {
            for j in i + 1..normalized.len() {
                if !normalized[i].0.commutes(&normalized[j].0) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        Ok(PauliProjector {
            n,
            factors: normalized,
        })
    }

    /// The identity projector (no factors).
    pub fn identity(n: usize) -> Self {
        PauliProjector {
            n,
            factors: Vec::new(),
        }
    }

    /// `(I + P)/2` for a single Hermitian Pauli.
    pub fn single(p: PauliOperator) -> Result<Self> {
        let n = p.len();
        Self::new(n, vec![(p, 1)])
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The signed factors, each with phase 1.
    pub fn factors(&self) -> &[(PauliOperator, i8)] {
        &self.factors
    }

    /// Pad every factor with identities to `n` qubits.
    pub fn padded(&self, n: usize) -> Result<Self> {
        Self::new(
            n,
            self.factors
                .iter()
                .map(|(p, s)| (p.padded(n), *s))
                .collect(),
        )
    }
}

impl fmt::Display for PauliProjector {
    /// Factors separated by `;`, each prefixed by `+` or `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "identity");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, s)| format!("{}{}", if *s > 0 { '+' } else { '-' }, p.body()))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for PauliProjector {
    type Err = Error;

    /// Parses `identity` or factors separated by `;`, each an optional
    /// `+`/`-` sign followed by a Pauli string, e.g. `+XXI;-IZZ`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("identity") {
            let n = n.trim_start_matches(':');
            let n: usize = n.parse().map_err(|_| Error::Parse {
                position: 9,
                message: "identity projector needs a qubit count, e.g. `identity:4`".into(),
            })?;
            return Ok(Self::identity(n));
        }
        let mut factors = Vec::new();
        let mut offset = 0;
        for part in s.split(';') {
            let (sign, body, skip) = match part.chars().next() {
                Some('+') => (1, &part[1..], 1),
                Some('-') => (-1, &part[1..], 1),
                _ => (1, part, 0),
            };
            let p: PauliOperator = body.parse().map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse {
                    position: position + offset + skip,
                    message,
                },
                other => other,
            })?;
            factors.push((p, sign));
            offset += part.chars().count() + 1;
        }
        let n = factors[0].0.len();
        Self::new(n, factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn single_matrix(k: PauliKind) -> [[Complex64; 2]; 2] {
        let (o, l, i) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        );
        match k {
            PauliKind::I => [[l, o], [o, l]],
            PauliKind::Z => [[l, o], [o, -l]],
            PauliKind::X => [[o, l], [l, o]],
            PauliKind::Y => [[o, -i], [i, o]],
        }
    }

    fn kron_matrix(p: &PauliOperator) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![p.phase().to_complex()]];
        for k in p.kinds() {
            let s = single_matrix(k);
            let d = m.len();
            let mut out = vec![vec![Complex64::new(0.0, 0.0); 2 * d]; 2 * d];
            for r in 0..d {
                for c in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            out[2 * r + a][2 * c + b] = m[r][c] * s[a][b];
                        }
                    }
                }
            }
            m = out;
        }
        m
    }

    #[test]
    fn basis_action_examples() {
        let x: PauliOperator = "X".parse().unwrap();
        assert_eq!(x.on_basis(&"0".parse().unwrap()), ("1".parse().unwrap(), EighthRootPhase::ONE));
        let z: PauliOperator = "Z".parse().unwrap();
        assert_eq!(z.on_basis(&"1".parse().unwrap()).1, EighthRootPhase::new(4));
        let yz: PauliOperator = "YZ".parse().unwrap();
        let (y, ph) = yz.on_basis(&"01".parse().unwrap());
        assert_eq!(y.to_string(), "11");
        assert_eq!(ph, EighthRootPhase::i_pow(-1));
    }

    #[test]
    fn dense_matrices_match_kronecker_products() {
        for n in 1..=3 {
            for idx in 0..4u64.pow(n as u32) {
                for phase in 0..4 {
                    let p = PauliOperator::from_index(n, idx).with_phase(phase);
                    let m = kron_matrix(&p);
                    for col in 0..1usize << n {
                        let (y, ph) = p.on_basis(&BitVector::from_index(n, col));
                        for row in 0..1usize << n {
                            let expect = if row == y.to_index() { ph.to_complex() } else { Complex64::new(0.0, 0.0) };
                            assert!((m[row][col] - expect).norm() < 1e-12);
                        }
                    }
                    // P² = ω² I
                    for col in 0..1usize << n {
                        let x = BitVector::from_index(n, col);
                        let (y, a) = p.on_basis(&x);
                        let (z, b) = p.on_basis(&y);
                        assert_eq!(z, x);
                        assert_eq!(a * b, p.phase() * p.phase());
                    }
                }
            }
        }
    }

    #[test]
    fn commutation_examples() {
        let p = |s: &str| s.parse::<PauliOperator>().unwrap();
        assert!(p("X").commutes(&p("X")));
        assert!(!p("X").commutes(&p("Z")));
        assert!(p("XX").commutes(&p("ZZ")));
        assert!(!p("XY").commutes(&p("XZ")));
    }

    #[test]
    fn text_round_trip_and_errors() {
        for s in ["-i:XYZI", "+i:Z", "-1:IY", "XX"] {
            let p: PauliOperator = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!("+1:XZ".parse::<PauliOperator>().unwrap().to_string(), "XZ");
        match "-i:XQ".parse::<PauliOperator>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!("*:X".parse::<PauliOperator>().is_err());
        assert!("".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn random_paulis_are_uniform_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 4];
        let draws = 100_000;
        for _ in 0..draws {
            let p = PauliOperator::random(1, &mut rng);
            counts[PauliKind::ALL.iter().position(|&k| k == p.kind(0)).unwrap()] += 1;
        }
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 4.0).abs() < 4.0 * sigma);
        }
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            seen.insert(PauliOperator::random(3, &mut rng));
        }
        assert_eq!(seen.len(), 64);
        let a = PauliOperator::random(10, &mut ChaCha8Rng::seed_from_u64(9));
        let b = PauliOperator::random(10, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn projector_validation() {
        let pr: PauliProjector = "+XXI;-ZZI".parse().unwrap();
        assert_eq!(pr.factors().len(), 2);
        assert_eq!(pr.to_string(), "+XXI;-ZZI");
        assert_eq!(
            "XI;ZI".parse::<PauliProjector>(),
            Err(Error::NonCommuting(0, 1))
        );
        assert_eq!(
            "+i:X".parse::<PauliProjector>(),
            Err(Error::NonHermitian)
        );
        // A −1 phase folds into the sign.
        let folded: PauliProjector = "-1:Z".parse().unwrap();
        assert_eq!(folded.factors()[0].1, -1);
        assert_eq!("identity:3".parse::<PauliProjector>().unwrap(), PauliProjector::identity(3));
        assert!("XI;IX;XX".parse::<PauliProjector>().is_err());
    }
}
