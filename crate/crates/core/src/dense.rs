//! Brute-force state vectors used as the reference for every other module:
//! Kronecker products, magic states, and Pauli / projector expectations by
//! direct application.
//!
//! Qubit 0 is the most significant bit of the amplitude index.  The module
//! is deliberately simple; it trades speed for obviousness.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, PauliProjector};
use crate::phase_ring::{EighthRootPhase, ExactAmplitude};

/// Largest qubit count for floating-point dense states.
pub const MAX_DENSE_QUBITS: usize = 14;

/// Largest qubit count for exact dense states.
pub const MAX_EXACT_QUBITS: usize = 12;

/// Scalars a dense state can hold.
pub trait Amplitude: Copy + PartialEq + Add<Output = Self> + Mul<Output = Self> {
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// Complex conjugate.
    fn conj(self) -> Self;
    /// Embed an eighth root of unity.
    fn phase(p: EighthRootPhase) -> Self;
    /// `1/√2`.
    fn inv_sqrt2() -> Self;
}

impl Amplitude for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn phase(p: EighthRootPhase) -> Self {
        p.to_complex()
    }
    fn inv_sqrt2() -> Self {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }
}

impl Amplitude for ExactAmplitude {
    fn zero() -> Self {
        ExactAmplitude::ZERO
    }
    fn one() -> Self {
        ExactAmplitude::ONE
    }
    fn conj(self) -> Self {
        ExactAmplitude::conj(&self)
    }
    fn phase(p: EighthRootPhase) -> Self {
        p.to_amplitude()
    }
    fn inv_sqrt2() -> Self {
        ExactAmplitude::INV_SQRT2
    }
}

/// A full `2ⁿ`-entry state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<A> {
    n: usize,
    amps: Vec<A>,
}

/// Double-precision dense state.
pub type DenseState = Dense<Complex64>;

/// Exact dense state.
pub type ExactDenseState = Dense<ExactAmplitude>;

fn limit_for<A: 'static>() -> usize {
    if std::any::TypeId::of::<A>() == std::any::TypeId::of::<ExactAmplitude>() {
        MAX_EXACT_QUBITS
    } else {
        MAX_DENSE_QUBITS
    }
}

fn check_size<A: 'static>(n: usize) -> Result<()> {
    let limit = limit_for::<A>();
    if n > limit {
        return Err(Error::TooLarge {
            what: "dense state",
            limit,
            requested: n,
        });
    }
    Ok(())
}

impl<A: Amplitude + 'static> Dense<A> {
    /// Wrap an amplitude vector of length `2ⁿ`.
    pub fn new(n: usize, amps: Vec<A>) -> Result<Self> {
        check_size::<A>(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        Ok(Dense { n, amps })
    }

    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_size::<A>(n)?;
        let mut amps = vec![A::zero(); 1 << n];
        amps[0] = A::one();
        Ok(Dense { n, amps })
    }

    /// The all-zero vector.
    pub fn zeros(n: usize) -> Result<Self> {
        check_size::<A>(n)?;
        Ok(Dense {
            n,
            amps: vec![A::zero(); 1 << n],
        })
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The amplitudes, indexed with qubit 0 as the most significant bit.
    pub fn amplitudes(&self) -> &[A] {
        &self.amps
    }

    /// Consume into the amplitude vector.
    pub fn into_amplitudes(self) -> Vec<A> {
        self.amps
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_size::<A>(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Dense {
            n: self.n + other.n,
            amps,
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> A {
        assert_eq!(self.n, other.n, "inner product of different sizes");
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(A::zero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// `⟨self|self⟩`.
    pub fn norm_sq(&self) -> A {
        self.inner(self)
    }

    /// `self + factor · other`.
    pub fn add_scaled(&mut self, factor: A, other: &Self) {
        assert_eq!(self.n, other.n, "sum of different sizes");
        for (a, &b) in self.amps.iter_mut().zip(&other.amps) {
            *a = *a + factor * b;
        }
    }

    /// `P|self⟩`.
    pub fn apply_pauli(&self, p: &PauliOperator) -> Self {
        assert_eq!(p.len(), self.n, "Pauli size mismatch");
        // Basis indices put qubit 0 in the most significant bit, matching
        // the mask indices, so `P|k⟩ = base · (−1)^{|k ∧ z|} |k ⊕ x⟩`.
        let xm = p.x_mask().to_index();
        let zm = p.z_mask().to_index();
        let base = A::phase(p.base_phase());
        let minus = A::phase(EighthRootPhase::new(4)) * base;
        let mut out = vec![A::zero(); self.amps.len()];
        for (k, &a) in self.amps.iter().enumerate() {
            let ph = if (k & zm).count_ones() % 2 == 1 { minus } else { base };
            out[k ^ xm] = ph * a;
        }
        Dense { n: self.n, amps: out }
    }

    /// `(I + sign·P)/2 |self⟩`.
    pub fn apply_projector_factor(&self, p: &PauliOperator, sign: i8) -> Self {
        let moved = self.apply_pauli(p);
        let s = if sign < 0 {
            A::phase(EighthRootPhase::new(4))
        } else {
            A::one()
        };
        let half = A::inv_sqrt2() * A::inv_sqrt2();
        Dense {
            n: self.n,
            amps: self
                .amps
                .iter()
                .zip(&moved.amps)
                .map(|(&a, &b)| half * (a + s * b))
                .collect(),
        }
    }

    /// `⟨self|P|self⟩`.
    pub fn pauli_expect(&self, p: &PauliOperator) -> A {
        self.inner(&self.apply_pauli(p))
    }

    /// `⟨self|Π|self⟩` for a product of commuting projectors, applied
    /// sequentially.
    pub fn projector_expect(&self, proj: &PauliProjector) -> Result<A> {
        if proj.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: proj.n(),
            });
        }
        let mut state = self.clone();
        for (p, sign) in proj.factors() {
            state = state.apply_projector_factor(p, *sign);
        }
        Ok(self.inner(&state))
    }
}

impl ExactDenseState {
    /// Floating-point copy.
    pub fn to_float(&self) -> DenseState {
        Dense {
            n: self.n,
            amps: self.amps.iter().map(ExactAmplitude::to_complex).collect(),
        }
    }
}

fn magic_qubit<A: Amplitude>() -> [A; 2] {
    [A::inv_sqrt2(), A::phase(EighthRootPhase::new(1)) * A::inv_sqrt2()]
}

fn magic<A: Amplitude + 'static>(t: usize) -> Result<Dense<A>> {
    check_size::<A>(t)?;
    let one = Dense {
        n: 1,
        amps: magic_qubit::<A>().to_vec(),
    };
    let mut state = Dense {
        n: 0,
        amps: vec![A::one()],
    };
    for _ in 0..t {
        state = state.kron(&one)?;
    }
    Ok(state)
}

/// `|T⟩^{⊗t}` with `|T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2`.
pub fn dense_magic_state(t: usize) -> Result<DenseState> {
    magic(t)
}

/// `|T⟩^{⊗t}` in exact arithmetic.
pub fn dense_magic_state_exact(t: usize) -> Result<ExactDenseState> {
    magic(t)
}

/// `⟨s|P|s⟩`.
pub fn dense_pauli_expect(s: &DenseState, p: &PauliOperator) -> Complex64 {
    s.pauli_expect(p)
}

/// `⟨s|Π|s⟩`, real part.
pub fn dense_projector_expect(s: &DenseState, proj: &PauliProjector) -> Result<f64> {
    Ok(s.projector_expect(proj)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, re: f64, im: f64, tol: f64) -> bool {
        (a.re - re).abs() < tol && (a.im - im).abs() < tol
    }

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn magic_state_examples() {
        let t1 = dense_magic_state(1).unwrap();
        assert!(close(t1.amplitudes()[0], FRAC_1_SQRT_2, 0.0, 1e-15));
        assert!(close(t1.amplitudes()[1], 0.5, 0.5, 1e-15));
        let t2 = dense_magic_state_exact(2).unwrap();
        let half = ExactAmplitude::new(1, 0, 0, 0, 2);
        let w = EighthRootPhase::new(1).to_amplitude();
        assert_eq!(t2.amplitudes(), &[half, w * half, w * half, ExactAmplitude::I * half]);
        let t6 = dense_magic_state(6).unwrap();
        assert!(close(t6.norm_sq(), 1.0, 0.0, 1e-14));
        assert_eq!(dense_magic_state_exact(6).unwrap().norm_sq(), ExactAmplitude::ONE);
        assert!(dense_magic_state(15).is_err());
        assert!(dense_magic_state_exact(13).is_err());
    }

    #[test]
    fn pauli_expectation_examples() {
        let t1 = dense_magic_state(1).unwrap();
        assert!(close(dense_pauli_expect(&t1, &p("Z")), 0.0, 0.0, 1e-15));
        assert!(close(dense_pauli_expect(&t1, &p("X")), FRAC_1_SQRT_2, 0.0, 1e-15));
        assert!(close(dense_pauli_expect(&t1, &p("Y")), FRAC_1_SQRT_2, 0.0, 1e-15));
        let t2 = dense_magic_state_exact(2).unwrap();
        assert_eq!(t2.pauli_expect(&p("XX")), ExactAmplitude::new(1, 0, 0, 0, 2));
        assert_eq!(t2.pauli_expect(&p("ZI")), ExactAmplitude::ZERO);
    }

    #[test]
    fn projector_examples() {
        let zero = DenseState::zero_state(1).unwrap();
        let pz: PauliProjector = "+Z".parse().unwrap();
        assert!((dense_projector_expect(&zero, &pz).unwrap() - 1.0).abs() < 1e-15);
        let t1 = dense_magic_state(1).unwrap();
        assert!((dense_projector_expect(&t1, &pz).unwrap() - 0.5).abs() < 1e-15);
        let t3 = dense_magic_state_exact(3).unwrap();
        let pr: PauliProjector = "+XXI;+IIZ".parse().unwrap();
        let v = t3.projector_expect(&pr).unwrap();
        // ⟨XX⟩ = 1/2 and Z₃ is independent with ⟨Z⟩ = 0: (1 + 1/2)/2 · 1/2.
        assert_eq!(v, ExactAmplitude::new(3, 0, 0, 0, 6));
        assert!(t3.projector_expect(&"+Z".parse().unwrap()).is_err());
    }

    #[test]
    fn reduced_expectations_factorize() {
        let t = dense_magic_state(5).unwrap();
        for q in 0..5 {
            for (kind, expect) in [('Z', 0.0), ('X', FRAC_1_SQRT_2)] {
                let s: String = (0..5).map(|i| if i == q { kind } else { 'I' }).collect();
                assert!(close(t.pauli_expect(&p(&s)), expect, 0.0, 1e-12));
            }
        }
    }

    #[test]
    fn sign_orbit_sums_to_one() {
        let t = dense_magic_state_exact(4).unwrap();
        let gens = [p("XXII"), p("ZZII"), p("IIYZ")];
        let mut total = ExactAmplitude::ZERO;
        for mask in 0..8 {
            let factors: Vec<(PauliOperator, i8)> = gens
                .iter()
                .enumerate()
                .map(|(i, g)| (g.clone(), if mask >> i & 1 == 1 { -1 } else { 1 }))
                .collect();
            let proj = PauliProjector::new(4, factors).unwrap();
            total += t.projector_expect(&proj).unwrap();
        }
        assert_eq!(total, ExactAmplitude::ONE);
    }
}
