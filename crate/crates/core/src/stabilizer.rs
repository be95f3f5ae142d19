//! Stabilizer states as quadratic phase forms on affine subspaces, and the
//! kernel routines built on them: exponential sums, shrinking and extending
//! the support, exact inner products, Pauli projections and uniform random
//! sampling.
//!
//! A state on `n` qubits is
//!
//! ```text
//!   |ψ⟩ = global · Σ_{u ∈ GF(2)^m} ω^{q(u)} |G u + h⟩,   ω = e^{iπ/4},
//!   q(u) = c + Σ_i D_i u_i + Σ_{i<j} J_ij u_i u_j   (mod 8)
//! ```
//!
//! where the support `{G u + h}` is a canonical [`AffineSpace`].  The phase
//! data obeys the stabilizer constraints `J_ij ∈ {0, 4}` and `D_i` even; `c`
//! and `global` are arbitrary.  Every operation returns a new state and
//! re-canonicalises the support, so two states with equal fields are equal
//! as vectors.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{nullspace, solve, AffineSpace, BitMatrix, BitVector};
use crate::pauli::PauliOperator;
use crate::phase_ring::{EighthRootPhase, ExactAmplitude};

/// Largest qubit count accepted by the dense conversions.
pub const DENSE_LIMIT: usize = 14;

/// The quadratic phase function `q(u) = c + D·u + Σ_{i<j} J_ij u_i u_j (mod 8)`
/// with `J_ij ∈ {0, 4}` and even `D_i`.
///
/// `J` is stored as a symmetric bit matrix with zero diagonal (bit set ⇔
/// `J_ij = 4`); the diagonal contributions that `u_i² = u_i` would create
/// are always folded into `D`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PhaseForm {
    j: BitMatrix,
    d: Vec<u8>,
    c: u8,
}

/// Flip `J_xy` for every unordered pair `{x, y}` inside `set`.
fn toggle_all_pairs(j: &mut BitMatrix, set: &BitVector) {
    for x in set.iter_ones() {
        let row = j.row_mut(x);
        row.xor_assign(set);
        row.toggle(x);
    }
}

fn add8(a: u8, b: i64) -> u8 {
    (a as i64 + b).rem_euclid(8) as u8
}

impl PhaseForm {
    /// The zero form on `m` variables.
    pub fn zero(m: usize) -> Self {
        PhaseForm {
            j: BitMatrix::zeros(m, m),
            d: vec![0; m],
            c: 0,
        }
    }

    /// Build from an upper-triangular `J` (entries mod 8 in `{0, 4}` above the
    /// diagonal; the diagonal and lower triangle must be zero), `D` (even
    /// entries mod 8) and `c`.
    pub fn new(j_upper: &[Vec<u8>], d: &[u8], c: u8) -> Result<Self> {
        let m = d.len();
        if j_upper.len() != m || j_upper.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidPhaseData(format!(
                "J must be {m}×{m} to match D"
            )));
        }
        let mut form = Self::zero(m);
        for (i, row) in j_upper.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                match (v % 8, k > i) {
                    (0, _) => {}
                    (4, true) => {
                        form.j.set(i, k, true);
                        form.j.set(k, i, true);
                    }
                    (v, true) => {
                        return Err(Error::InvalidPhaseData(format!(
                            "J[{i}][{k}] = {v}, expected 0 or 4"
                        )))
                    }
                    (v, false) => {
                        return Err(Error::InvalidPhaseData(format!(
                            "J[{i}][{k}] = {v} below or on the diagonal"
                        )))
                    }
                }
            }
        }
        for (i, &v) in d.iter().enumerate() {
            if v % 2 != 0 {
                return Err(Error::InvalidPhaseData(format!("D[{i}] = {v} is odd")));
            }
            form.d[i] = v % 8;
        }
        form.c = c % 8;
        Ok(form)
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Linear coefficients `D`.
    pub fn d(&self) -> &[u8] {
        &self.d
    }

    /// Constant `c`.
    pub fn c(&self) -> u8 {
        self.c
    }

    /// `J` as an upper-triangular matrix with entries in `{0, 4}`.
    pub fn j_upper(&self) -> Vec<Vec<u8>> {
        let m = self.dim();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| if k > i && self.j.get(i, k) { 4 } else { 0 })
                    .collect()
            })
            .collect()
    }

    /// True when `J_ik = 4`.
    pub fn coupled(&self, i: usize, k: usize) -> bool {
        self.j.get(i, k)
    }

    /// `q(u)` as an exponent mod 8.
    pub fn eval(&self, u: &BitVector) -> u8 {
        let mut q = self.c as u32;
        let mut pairs = 0u32;
        for i in u.iter_ones() {
            q += self.d[i] as u32;
            pairs += self.j.row(i).and(u).count_ones() as u32;
        }
        // Each coupled pair inside the support was counted twice.
        q += 4 * ((pairs / 2) % 2);
        (q % 8) as u8
    }

    /// The form with a global constant added.
    pub fn with_constant_added(&self, k: i64) -> Self {
        PhaseForm {
            c: add8(self.c, k),
            ..self.clone()
        }
    }

    /// `−q`, the phase form of the complex conjugate.
    pub fn negated(&self) -> Self {
        PhaseForm {
            j: self.j.clone(),
            d: self.d.iter().map(|&v| add8(0, -(v as i64))).collect(),
            c: add8(0, -(self.c as i64)),
        }
    }

    /// `q + q'` on the same variables.
    pub fn sum(&self, other: &PhaseForm) -> PhaseForm {
        assert_eq!(self.dim(), other.dim(), "phase forms of different size");
        let mut j = self.j.clone();
        for (i, row) in other.j.rows().iter().enumerate() {
            j.row_mut(i).xor_assign(row);
        }
        PhaseForm {
            j,
            d: self
                .d
                .iter()
                .zip(&other.d)
                .map(|(&a, &b)| add8(a, b as i64))
                .collect(),
            c: add8(self.c, other.c as i64),
        }
    }

    /// Block-diagonal sum `q(u) + q'(u')` on the concatenated variables.
    pub fn direct_sum(&self, other: &PhaseForm) -> PhaseForm {
        let (m1, m2) = (self.dim(), other.dim());
        let mut out = PhaseForm::zero(m1 + m2);
        for i in 0..m1 {
            for k in self.j.row(i).iter_ones() {
                out.j.set(i, k, true);
            }
        }
        for i in 0..m2 {
            for k in other.j.row(i).iter_ones() {
                out.j.set(m1 + i, m1 + k, true);
            }
        }
        out.d = self.d.iter().chain(&other.d).copied().collect();
        out.c = add8(self.c, other.c as i64);
        out
    }

    /// Append a variable `t` with linear coefficient `d_t` (even) and
    /// couplings `J_{i,t} = 4` for every `i` in `coupling`.
    pub fn extended(&self, d_t: u8, coupling: &BitVector) -> PhaseForm {
        assert_eq!(d_t % 2, 0, "linear coefficient must be even");
        let m = self.dim();
        let mut out = PhaseForm::zero(m + 1);
        for i in 0..m {
            for k in self.j.row(i).iter_ones() {
                out.j.set(i, k, true);
            }
        }
        for i in coupling.iter_ones() {
            out.j.set(i, m, true);
            out.j.set(m, i, true);
        }
        out.d[..m].copy_from_slice(&self.d);
        out.d[m] = d_t % 8;
        out.c = self.c;
        out
    }

    /// Substitute `u = A v + b` where `A` has one row per old variable and
    /// one column per new variable, returning the form in `v`.
    pub fn compose_affine(&self, a: &BitMatrix, b: &BitVector) -> PhaseForm {
        let m_old = self.dim();
        assert_eq!(a.nrows(), m_old, "substitution rows must match variables");
        assert_eq!(b.len(), m_old, "substitution shift must match variables");
        let m_new = a.ncols();
        let mut out = PhaseForm::zero(m_new);
        out.c = self.eval(b);

        // Linear terms: i^{δ (b ⊕ ℓ)} = i^{δ b} · i^{±δ Σ v_k} · (−1)^{δ Σ_{k<l} v_k v_l}.
        for i in 0..m_old {
            let di = self.d[i];
            if di == 0 {
                continue;
            }
            let s = a.row(i);
            let delta = if b.get(i) { -(di as i64) } else { di as i64 };
            for k in s.iter_ones() {
                out.d[k] = add8(out.d[k], delta);
            }
            if (di / 2) % 2 == 1 {
                toggle_all_pairs(&mut out.j, s);
            }
        }

        // Cross terms b_i ℓ_j + b_j ℓ_i are linear in v.
        let w = self.j.mul_vec(b);
        for k in a.combine_rows(&w).iter_ones() {
            out.d[k] = add8(out.d[k], 4);
        }

        // Pure quadratic part ℓ_i ℓ_j: the bilinear form Aᵀ U A with U the
        // strict upper triangle of J.
        let mut m = BitMatrix::zeros(m_new, m_new);
        for i in 0..m_old {
            let mut ua = BitVector::zeros(m_new);
            for k in self.j.row(i).iter_ones().filter(|&k| k > i) {
                ua.xor_assign(a.row(k));
            }
            if ua.is_zero() {
                continue;
            }
            for k in a.row(i).iter_ones() {
                m.row_mut(k).xor_assign(&ua);
            }
        }
        for k in 0..m_new {
            if m.get(k, k) {
                out.d[k] = add8(out.d[k], 4);
            }
            for l in k + 1..m_new {
                if m.get(k, l) != m.get(l, k) {
                    out.j.row_mut(k).toggle(l);
                    out.j.row_mut(l).toggle(k);
                }
            }
        }
        out
    }

    /// `Σ_u ω^{q(u)}` by successive elimination of variables, in `O(m³)`.
    pub fn exp_sum(&self) -> ExactAmplitude {
        let m = self.dim();
        let mut j = self.j.clone();
        let mut d = self.d.clone();
        let mut phase = self.c as i64;
        let mut sqrt2_pow = 0u32;
        let mut active = BitVector::ones(m);

        let detach = |j: &mut BitMatrix, k: usize| {
            let nbrs: Vec<usize> = j.row(k).iter_ones().collect();
            for x in nbrs {
                j.row_mut(x).set(k, false);
            }
            *j.row_mut(k) = BitVector::zeros(m);
        };

        while let Some(k) = active.first_one() {
            active.set(k, false);
            let l = j.row(k).and(&active);
            detach(&mut j, k);
            match d[k] {
                2 | 6 => {
                    // Σ_{u_k} i^{δ u_k} (−1)^{u_k ℓ} = √2 ω^{±1} i^{∓ℓ}, δ = ±1.
                    let sgn: i64 = if d[k] == 2 { 1 } else { -1 };
                    sqrt2_pow += 1;
                    phase += sgn;
                    for v in l.iter_ones() {
                        d[v] = add8(d[v], -2 * sgn);
                    }
                    toggle_all_pairs(&mut j, &l);
                }
                _ => {
                    // Σ_{u_k} (−1)^{u_k (a + ℓ)} = 2·[ℓ = a] with a = D_k / 4.
                    let a = d[k] == 4;
                    let Some(p) = l.first_one() else {
                        if a {
                            return ExactAmplitude::ZERO;
                        }
                        sqrt2_pow += 2;
                        continue;
                    };
                    sqrt2_pow += 2;
                    // Substitute u_p = a ⊕ Σ_{r ∈ rest} u_r.
                    let mut rest = l.clone();
                    rest.set(p, false);
                    active.set(p, false);
                    let np = j.row(p).and(&active);
                    detach(&mut j, p);

                    let dp = d[p];
                    let delta = if a {
                        phase += dp as i64;
                        -(dp as i64)
                    } else {
                        dp as i64
                    };
                    if dp != 0 {
                        for v in rest.iter_ones() {
                            d[v] = add8(d[v], delta);
                        }
                        if (dp / 2) % 2 == 1 {
                            toggle_all_pairs(&mut j, &rest);
                        }
                    }
                    // (−1)^{u_p u_q} for each neighbour q of p.
                    for q in np.iter_ones() {
                        if a {
                            d[q] = add8(d[q], 4);
                        }
                        for r in rest.iter_ones() {
                            if r == q {
                                d[q] = add8(d[q], 4);
                            } else {
                                j.row_mut(q).toggle(r);
                                j.row_mut(r).toggle(q);
                            }
                        }
                    }
                }
            }
        }
        EighthRootPhase::new(phase) * ExactAmplitude::sqrt2_pow(sqrt2_pow)
    }
}

/// Outcome of restricting a state to a hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shrink {
    /// The constraint holds nowhere on the support.
    Empty,
    /// The constraint already holds on the whole support.
    Unchanged,
    /// The support lost one dimension.
    Restricted(StabilizerState),
}

/// A stabilizer state in quadratic-form representation.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    space: AffineSpace,
    form: PhaseForm,
    global: ExactAmplitude,
    dual: OnceLock<BitMatrix>,
}

impl PartialEq for StabilizerState {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.form == other.form && self.global == other.global
    }
}

impl Eq for StabilizerState {}

impl StabilizerState {
    /// Build from arbitrary independent generators, re-expressing the phase
    /// form in the canonical parametrisation of the support.
    pub fn from_generators(
        n: usize,
        generators: Vec<BitVector>,
        shift: BitVector,
        form: PhaseForm,
        global: ExactAmplitude,
    ) -> Result<Self> {
        if generators.len() != form.dim() {
            return Err(Error::DimensionMismatch {
                expected: generators.len(),
                found: form.dim(),
            });
        }
        let canon = AffineSpace::canonicalize(n, generators, shift)?;
        // Old parameters u relate to canonical ones v by u = Rᵀ v + b.
        let form = form.compose_affine(&canon.transform.transpose(), &canon.shift_coeffs);
        Ok(StabilizerState {
            space: canon.space,
            form,
            global,
            dual: OnceLock::new(),
        })
    }

    /// Build from generator rows, a shift and raw phase data
    /// (`J` upper-triangular with entries in `{0,4}`, even `D`, any `c`).
    pub fn new(
        n: usize,
        generators: Vec<BitVector>,
        shift: BitVector,
        j_upper: &[Vec<u8>],
        d: &[u8],
        c: u8,
        global: ExactAmplitude,
    ) -> Result<Self> {
        let form = PhaseForm::new(j_upper, d, c)?;
        Self::from_generators(n, generators, shift, form, global)
    }

    /// The computational basis state `|x⟩`.
    pub fn basis_state(x: BitVector) -> Self {
        StabilizerState {
            space: AffineSpace::point(x),
            form: PhaseForm::zero(0),
            global: ExactAmplitude::ONE,
            dual: OnceLock::new(),
        }
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zero_state(n: usize) -> Self {
        Self::basis_state(BitVector::zeros(n))
    }

    /// `|+…+⟩` on `n` qubits.
    pub fn plus_state(n: usize) -> Self {
        StabilizerState {
            space: AffineSpace::full(n),
            form: PhaseForm::zero(n),
            global: ExactAmplitude::inv_sqrt2_pow(n as u32),
            dual: OnceLock::new(),
        }
    }

    /// Qubit count `n`.
    pub fn n(&self) -> usize {
        self.space.ambient()
    }

    /// Support dimension `m`.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The canonical support.
    pub fn space(&self) -> &AffineSpace {
        &self.space
    }

    /// The phase form in canonical parameters.
    pub fn form(&self) -> &PhaseForm {
        &self.form
    }

    /// The global scale and phase.
    pub fn global(&self) -> ExactAmplitude {
        self.global
    }

    /// `J` as an upper-triangular matrix with entries in `{0, 4}`.
    pub fn j_upper(&self) -> Vec<Vec<u8>> {
        self.form.j_upper()
    }

    /// Linear phase coefficients `D`.
    pub fn d(&self) -> &[u8] {
        self.form.d()
    }

    /// Constant phase exponent `c`.
    pub fn c(&self) -> u8 {
        self.form.c()
    }

    /// The same state times `factor`.
    pub fn scaled(&self, factor: ExactAmplitude) -> Self {
        StabilizerState {
            global: self.global * factor,
            ..self.clone()
        }
    }

    fn with_global(&self, global: ExactAmplitude) -> Self {
        StabilizerState {
            global,
            ..self.clone()
        }
    }

    /// Dual constraints of the support, cached per state.
    fn dual(&self) -> &BitMatrix {
        self.dual.get_or_init(|| self.space.dual_basis())
    }

    /// The exact amplitude `⟨x|ψ⟩`.
    pub fn amplitude(&self, x: &BitVector) -> ExactAmplitude {
        match self.space.membership(x) {
            Some(u) => EighthRootPhase::new(self.form.eval(&u) as i64) * self.global,
            None => ExactAmplitude::ZERO,
        }
    }

    /// `⟨ψ|ψ⟩ = |global|² 2^m`, exactly.
    pub fn norm_sq(&self) -> ExactAmplitude {
        self.global.norm_sq() * ExactAmplitude::sqrt2_pow(2 * self.dim() as u32)
    }

    /// True when `⟨ψ|ψ⟩ = 1`.
    pub fn is_normalized(&self) -> bool {
        self.norm_sq() == ExactAmplitude::ONE
    }

    /// `global · Σ_u ω^{q(u)}`.
    pub fn exponential_sum(&self) -> ExactAmplitude {
        self.form.exp_sum() * self.global
    }

    fn shrink_params(&self, lambda: &BitVector, beta: bool) -> Option<StabilizerState> {
        let Some(p) = lambda.first_one() else {
            return (!beta).then(|| self.clone());
        };
        let m = self.dim();
        let basis = self.space.basis();
        // New variables are the old ones except p, in order; u_p = β ⊕ λ·v.
        let new_index = |j: usize| if j < p { j } else { j - 1 };
        let mut a = BitMatrix::zeros(m, m - 1);
        let mut gens = Vec::with_capacity(m - 1);
        for j in 0..m {
            if j == p {
                continue;
            }
            a.set(j, new_index(j), true);
            let mut g = basis.row(j).clone();
            if lambda.get(j) {
                a.set(p, new_index(j), true);
                g.xor_assign(basis.row(p));
            }
            gens.push(g);
        }
        let mut b = BitVector::zeros(m);
        let mut shift = self.space.shift().clone();
        if beta {
            b.set(p, true);
            shift.xor_assign(basis.row(p));
        }
        let form = self.form.compose_affine(&a, &b);
        Some(
            Self::from_generators(self.n(), gens, shift, form, self.global)
                .expect("restricted generators stay independent"),
        )
    }

    /// Restrict the support to `{x : ξ·x = bit}`, keeping amplitudes there.
    pub fn shrink(&self, xi: &BitVector, bit: bool) -> Shrink {
        assert_eq!(xi.len(), self.n(), "constraint length mismatch");
        let lambda = self.space.basis().mul_vec(xi);
        let beta = bit ^ xi.dot(self.space.shift());
        if lambda.is_zero() {
            return if beta { Shrink::Empty } else { Shrink::Unchanged };
        }
        Shrink::Restricted(
            self.shrink_params(&lambda, beta)
                .expect("non-trivial constraint keeps half the support"),
        )
    }

    /// Grow the support by `direction` with uniform phase: the new coset
    /// `{x + direction}` receives the same amplitudes as `{x}`.
    pub fn extend(&self, direction: &BitVector) -> Result<StabilizerState> {
        self.extend_with_phase(direction, 0, &BitVector::zeros(self.dim()))
    }

    /// Grow the support by `direction`; the new parameter `t` enters the
    /// phase form as `d_t·t + Σ_{i ∈ coupling} 4 u_i t`.
    pub fn extend_with_phase(
        &self,
        direction: &BitVector,
        d_t: u8,
        coupling: &BitVector,
    ) -> Result<StabilizerState> {
        if direction.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: direction.len(),
            });
        }
        if self.space.spans(direction) {
            return Err(Error::DirectionInSpan);
        }
        if d_t % 2 != 0 {
            return Err(Error::InvalidPhaseData(format!("extension phase {d_t} is odd")));
        }
        let mut gens = self.space.basis().rows().to_vec();
        gens.push(direction.clone());
        Self::from_generators(
            self.n(),
            gens,
            self.space.shift().clone(),
            self.form.extended(d_t, coupling),
            self.global,
        )
    }

    /// The tensor product `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &StabilizerState) -> StabilizerState {
        let (n1, n2) = (self.n(), other.n());
        let mut gens: Vec<BitVector> = self
            .space
            .basis()
            .rows()
            .iter()
            .map(|g| g.concat(&BitVector::zeros(n2)))
            .collect();
        gens.extend(
            other
                .space
                .basis()
                .rows()
                .iter()
                .map(|g| BitVector::zeros(n1).concat(g)),
        );
        Self::from_generators(
            n1 + n2,
            gens,
            self.space.shift().concat(other.space.shift()),
            self.form.direct_sum(&other.form),
            self.global * other.global,
        )
        .expect("block-diagonal generators are independent")
    }

    /// The exact inner product `⟨self|other⟩`.
    pub fn inner_product(&self, other: &StabilizerState) -> ExactAmplitude {
        assert_eq!(self.n(), other.n(), "inner product of states on different qubit counts");
        let ga = self.space.basis();
        let ha = self.space.shift();
        let hb = other.space.shift();
        let dual = other.dual();

        // Parameters u of `self` whose points satisfy every dual constraint of `other`.
        let constraints = BitMatrix::from_rows(
            self.dim(),
            dual.rows().iter().map(|xi| ga.mul_vec(xi)).collect(),
        );
        let hab = ha.xor(hb);
        let rhs = dual.mul_vec(&hab);
        let Some(u0) = solve(&constraints, &rhs) else {
            return ExactAmplitude::ZERO;
        };
        let kernel = nullspace(&constraints);
        let k = kernel.len();

        // u = u0 + N v.
        let mut a_self = BitMatrix::zeros(self.dim(), k);
        for (t, nv) in kernel.iter().enumerate() {
            for j in nv.iter_ones() {
                a_self.set(j, t, true);
            }
        }
        let form_self = self.form.compose_affine(&a_self, &u0);

        // Coordinates of the same points in `other`'s canonical parameters.
        let mut y0 = ga.combine_rows(&u0);
        y0.xor_assign(&hab);
        let dirs: Vec<BitVector> = kernel.iter().map(|nv| ga.combine_rows(nv)).collect();
        let pivots = other.space.pivots();
        let mut a_other = BitMatrix::zeros(other.dim(), k);
        for (i, &p) in pivots.iter().enumerate() {
            for (t, dv) in dirs.iter().enumerate() {
                if dv.get(p) {
                    a_other.set(i, t, true);
                }
            }
        }
        let b_other = BitVector::from_fn(other.dim(), |i| y0.get(pivots[i]));
        let form_other = other.form.compose_affine(&a_other, &b_other);

        form_self.negated().sum(&form_other).exp_sum() * self.global.conj() * other.global
    }

    /// Project with `(I + sign·P)/2`, returning the unnormalised projected
    /// state (or `None` if it vanishes) and `⟨ψ|(I + sign·P)/2|ψ⟩`.
    pub fn measure_pauli(
        &self,
        p: &PauliOperator,
        sign: i8,
    ) -> Result<(Option<StabilizerState>, ExactAmplitude)> {
        if p.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: p.len(),
            });
        }
        if !p.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let negative = (sign < 0) ^ (p.phase_exponent() == 2);
        let p = p.with_phase(0);
        let norm = self.norm_sq();
        let half = ExactAmplitude::inv_sqrt2_pow(2);
        let z_on_basis = self.space.basis().mul_vec(p.z_mask());
        let z_on_shift = p.z_mask().dot(self.space.shift());
        let base = p.base_phase().k() as i64;

        match self.space.linear_coords(p.x_mask()) {
            None => {
                // P moves the support to a disjoint coset: the projection is a
                // superposition over both cosets.
                let d_t = add8(
                    0,
                    base + if z_on_shift { 4 } else { 0 } + if negative { 4 } else { 0 },
                );
                let grown = self.extend_with_phase(p.x_mask(), d_t, &z_on_basis)?;
                Ok((Some(grown.with_global(self.global * half)), norm * half))
            }
            Some(w) => {
                // P maps the support to itself and multiplies each amplitude by
                // ω^{r0} (−1)^{λ·v}.
                let m = self.dim();
                let ratio = |v: &BitVector| -> i64 {
                    let vw = v.xor(&w);
                    let flips = vw.dot(&z_on_basis) ^ z_on_shift;
                    self.form.eval(&vw) as i64 - self.form.eval(v) as i64
                        + base
                        + if flips { 4 } else { 0 }
                };
                let r0 = ratio(&BitVector::zeros(m)).rem_euclid(8);
                let lambda = BitVector::from_fn(m, |j| {
                    let rj = (ratio(&BitVector::unit(m, j)) - r0).rem_euclid(8);
                    debug_assert!(rj % 4 == 0, "ratio must be ±r0 on the support");
                    rj == 4
                });
                if r0 % 4 == 2 {
                    // Ratio ±i: every amplitude survives with modulus 1/√2 and
                    // picks up ω^{t(−1)^{λ·v}} = ω^t · i^{−t (λ·v mod 2)}.
                    let t: i64 = if (r0 == 2) ^ negative { 1 } else { -1 };
                    let mut form = self.form.with_constant_added(t);
                    for k in lambda.iter_ones() {
                        form.d[k] = add8(form.d[k], -2 * t);
                    }
                    toggle_all_pairs(&mut form.j, &lambda);
                    let out = StabilizerState {
                        space: self.space.clone(),
                        form,
                        global: self.global * ExactAmplitude::INV_SQRT2,
                        dual: OnceLock::new(),
                    };
                    return Ok((Some(out), norm * half));
                }
                let beta = (r0 == 4) ^ negative;
                if lambda.is_zero() {
                    return Ok(if beta {
                        (None, ExactAmplitude::ZERO)
                    } else {
                        (Some(self.clone()), norm)
                    });
                }
                let kept = self
                    .shrink_params(&lambda, beta)
                    .expect("non-trivial constraint keeps half the support");
                Ok((Some(kept), norm * half))
            }
        }
    }

    /// A uniformly random stabilizer state on `n` qubits.
    ///
    /// The support dimension `m` is drawn with probability proportional to
    /// the number of states with an `m`-dimensional support,
    /// `[n choose m]_2 · 2^{n−m} · 4^m · 2^{m(m−1)/2}`; the support and phase
    /// data are then uniform.
    pub fn random(n: usize, rng: &mut impl Rng) -> StabilizerState {
        assert!(n >= 1, "random stabilizer states need at least one qubit");
        let log_weights: Vec<f64> = (0..=n).map(|m| log2_state_count(n, m)).collect();
        let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_weights.iter().map(|w| (w - max).exp2()).collect();
        let total: f64 = weights.iter().sum();
        let mut r = rng.gen::<f64>() * total;
        let mut m = n;
        for (k, w) in weights.iter().enumerate() {
            if r < *w {
                m = k;
                break;
            }
            r -= w;
        }
        let gens = loop {
            let rows: Vec<BitVector> = (0..m)
                .map(|_| BitVector::from_fn(n, |_| rng.gen()))
                .collect();
            if BitMatrix::from_rows(n, rows.clone()).rank() == m {
                break rows;
            }
        };
        let shift = BitVector::from_fn(n, |_| rng.gen());
        let mut form = PhaseForm::zero(m);
        for i in 0..m {
            form.d[i] = 2 * rng.gen_range(0..4u8);
            for k in i + 1..m {
                if rng.gen() {
                    form.j.set(i, k, true);
                    form.j.set(k, i, true);
                }
            }
        }
        Self::from_generators(n, gens, shift, form, ExactAmplitude::inv_sqrt2_pow(m as u32))
            .expect("generators were checked to be independent")
    }

    /// Recover the quadratic-form representation from exact amplitudes
    /// (index order: qubit 0 is the most significant bit).
    pub fn from_amplitudes(n: usize, amps: &[ExactAmplitude]) -> Result<StabilizerState> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let support: Vec<usize> = (0..amps.len()).filter(|&i| !amps[i].is_zero()).collect();
        let Some(&first) = support.first() else {
            return Err(Error::NotStabilizer("zero vector".into()));
        };
        let h = BitVector::from_index(n, first);
        let diffs: Vec<BitVector> = support
            .iter()
            .map(|&i| BitVector::from_index(n, i).xor(&h))
            .collect();
        let el = crate::gf2::gauss_eliminate(&BitMatrix::from_rows(n, diffs));
        let m = el.rank;
        if support.len() != 1 << m {
            return Err(Error::NotStabilizer("support is not an affine space".into()));
        }
        let space = AffineSpace::new(n, el.reduced.rows()[..m].to_vec(), h)?;
        let amp_at = |u: &BitVector| amps[space.point_at(u).to_index()];
        let a0 = amp_at(&BitVector::zeros(m));
        let phase_of = |x: ExactAmplitude| -> Result<u8> {
            (0..8u8)
                .find(|&k| EighthRootPhase::new(k as i64) * a0 == x)
                .ok_or_else(|| Error::NotStabilizer("amplitude ratio is not an eighth root".into()))
        };
        let mut form = PhaseForm::zero(m);
        for i in 0..m {
            let di = phase_of(amp_at(&BitVector::unit(m, i)))?;
            if di % 2 != 0 {
                return Err(Error::NotStabilizer("odd linear phase".into()));
            }
            form.d[i] = di;
        }
        for i in 0..m {
            for k in i + 1..m {
                let mut u = BitVector::unit(m, i);
                u.set(k, true);
                let q = phase_of(amp_at(&u))?;
                match add8(q, -(form.d[i] as i64) - form.d[k] as i64) {
                    0 => {}
                    4 => {
                        form.j.set(i, k, true);
                        form.j.set(k, i, true);
                    }
                    _ => return Err(Error::NotStabilizer("non-quadratic phase".into())),
                }
            }
        }
        let state = StabilizerState {
            space,
            form,
            global: a0,
            dual: OnceLock::new(),
        };
        for (i, a) in amps.iter().enumerate() {
            if state.amplitude(&BitVector::from_index(n, i)) != *a {
                return Err(Error::NotStabilizer(format!(
                    "amplitude mismatch at basis index {i}"
                )));
            }
        }
        Ok(state)
    }

    /// Exact amplitude vector (qubit 0 is the most significant index bit).
    pub fn to_dense_exact(&self) -> Result<Vec<ExactAmplitude>> {
        let n = self.n();
        if n > DENSE_LIMIT {
            return Err(Error::TooLarge {
                what: "dense conversion",
                limit: DENSE_LIMIT,
                requested: n,
            });
        }
        let mut out = vec![ExactAmplitude::ZERO; 1 << n];
        let m = self.dim();
        for k in 0..1usize << m {
            let u = BitVector::from_fn(m, |i| (k >> i) & 1 == 1);
            let x = self.space.point_at(&u);
            out[x.to_index()] = EighthRootPhase::new(self.form.eval(&u) as i64) * self.global;
        }
        Ok(out)
    }

    /// Floating-point amplitude vector.
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        Ok(self
            .to_dense_exact()?
            .iter()
            .map(ExactAmplitude::to_complex)
            .collect())
    }
}

/// `log₂` of the number of `n`-qubit stabilizer states whose support has
/// dimension `m`.
pub fn log2_state_count(n: usize, m: usize) -> f64 {
    let mut log = 0.0;
    // Gaussian binomial [n choose m]_2.
    for i in 0..m {
        log += ((1u128 << (n - i)) as f64 - 1.0).log2() - ((1u128 << (m - i)) as f64 - 1.0).log2();
    }
    log + (n - m) as f64 + 2.0 * m as f64 + (m * m.saturating_sub(1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliKind;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn brute_sum(form: &PhaseForm) -> ExactAmplitude {
        let m = form.dim();
        (0..1usize << m)
            .map(|k| {
                EighthRootPhase::new(form.eval(&BitVector::from_fn(m, |i| (k >> i) & 1 == 1)) as i64)
                    .to_amplitude()
            })
            .sum()
    }

    fn random_form(m: usize, rng: &mut impl Rng) -> PhaseForm {
        let mut f = PhaseForm::zero(m);
        f.c = rng.gen_range(0..8);
        for i in 0..m {
            f.d[i] = 2 * rng.gen_range(0..4u8);
            for k in i + 1..m {
                if rng.gen() {
                    f.j.set(i, k, true);
                    f.j.set(k, i, true);
                }
            }
        }
        f
    }

    fn dense_dot(a: &[ExactAmplitude], b: &[ExactAmplitude]) -> ExactAmplitude {
        a.iter().zip(b).map(|(x, y)| x.conj() * *y).sum()
    }

    #[test]
    fn exponential_sum_examples() {
        let point = StabilizerState::zero_state(1);
        assert_eq!(point.exponential_sum(), ExactAmplitude::ONE);
        let cancel = StabilizerState::new(1, vec![bv("1")], bv("0"), &[vec![0]], &[4], 0, ExactAmplitude::ONE).unwrap();
        assert_eq!(cancel.exponential_sum(), ExactAmplitude::ZERO);
        let cz = StabilizerState::new(
            2,
            vec![bv("10"), bv("01")],
            bv("00"),
            &[vec![0, 4], vec![0, 0]],
            &[0, 0],
            0,
            ExactAmplitude::ONE,
        )
        .unwrap();
        assert_eq!(cz.exponential_sum(), ExactAmplitude::from_int(2));
    }

    #[test]
    fn phase_data_is_validated() {
        assert!(PhaseForm::new(&[vec![0]], &[1], 0).is_err());
        assert!(PhaseForm::new(&[vec![0, 2], vec![0, 0]], &[0, 0], 0).is_err());
        assert!(PhaseForm::new(&[vec![0, 0], vec![4, 0]], &[0, 0], 0).is_err());
        assert!(PhaseForm::new(&[vec![0, 4], vec![0, 0]], &[2, 6], 3).is_ok());
    }

    #[test]
    fn exp_sum_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3000 {
            let m = rng.gen_range(0..=9);
            let f = random_form(m, &mut rng);
            let s = f.exp_sum();
            assert_eq!(s, brute_sum(&f), "form {f:?}");
            // Magnitude is 0 or a power of √2.
            assert!(s.is_zero() || s.log2_norm_sq().is_some());
        }
    }

    #[test]
    fn affine_substitution_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let m_old = rng.gen_range(0..=7);
            let m_new = rng.gen_range(0..=7);
            let f = random_form(m_old, &mut rng);
            let a = BitMatrix::from_rows(
                m_new,
                (0..m_old).map(|_| BitVector::from_fn(m_new, |_| rng.gen())).collect(),
            );
            let b = BitVector::from_fn(m_old, |_| rng.gen());
            let g = f.compose_affine(&a, &b);
            for k in 0..1usize << m_new {
                let v = BitVector::from_fn(m_new, |i| (k >> i) & 1 == 1);
                let mut u = a.mul_vec(&v);
                u.xor_assign(&b);
                assert_eq!(g.eval(&v), f.eval(&u));
            }
        }
    }

    #[test]
    fn shrink_examples() {
        let plus = StabilizerState::plus_state(1);
        match plus.shrink(&bv("1"), false) {
            Shrink::Restricted(s) => {
                assert_eq!(s.dim(), 0);
                assert_eq!(s.space().shift(), &bv("0"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let zero = StabilizerState::zero_state(1);
        assert_eq!(zero.shrink(&bv("1"), true), Shrink::Empty);
        assert_eq!(zero.shrink(&bv("1"), false), Shrink::Unchanged);
    }

    #[test]
    fn shrink_restricts_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let s = StabilizerState::random(5, &mut rng);
            let xi = BitVector::from_fn(5, |_| rng.gen());
            let bit = rng.gen();
            let dense = s.to_dense_exact().unwrap();
            let restricted = match s.shrink(&xi, bit) {
                Shrink::Empty => vec![ExactAmplitude::ZERO; 32],
                Shrink::Unchanged => dense.clone(),
                Shrink::Restricted(r) => r.to_dense_exact().unwrap(),
            };
            for k in 0..32 {
                let x = BitVector::from_index(5, k);
                let expect = if xi.dot(&x) == bit { dense[k] } else { ExactAmplitude::ZERO };
                assert_eq!(restricted[k], expect);
            }
        }
    }

    #[test]
    fn extend_examples() {
        let plus = StabilizerState::zero_state(1).extend(&bv("1")).unwrap();
        assert_eq!(plus.to_dense_exact().unwrap(), vec![ExactAmplitude::ONE; 2]);
        assert_eq!(
            StabilizerState::plus_state(2).extend(&bv("10")),
            Err(Error::DirectionInSpan)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut done = 0;
        while done < 200 {
            let s = StabilizerState::random(4, &mut rng);
            let w = BitVector::from_fn(4, |_| rng.gen());
            if s.space().spans(&w) {
                continue;
            }
            done += 1;
            let e = s.extend(&w).unwrap();
            let (ds, de) = (s.to_dense_exact().unwrap(), e.to_dense_exact().unwrap());
            for k in 0..16 {
                let x = BitVector::from_index(4, k);
                let expect = if s.space().contains(&x) {
                    ds[k]
                } else if s.space().contains(&x.xor(&w)) {
                    ds[x.xor(&w).to_index()]
                } else {
                    ExactAmplitude::ZERO
                };
                assert_eq!(de[k], expect);
            }
        }
    }

    #[test]
    fn shrink_then_extend_restores_coset() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut done = 0;
        while done < 200 {
            let s = StabilizerState::random(5, &mut rng);
            if s.dim() == 0 {
                continue;
            }
            // Remove the last basis direction, then put it back with the
            // phase data read off the original state.
            let m = s.dim();
            let g = s.space().basis().row(m - 1).clone();
            let mut lambda = BitVector::zeros(m);
            lambda.set(m - 1, true);
            let shrunk = s.shrink_params(&lambda, false).unwrap();
            let coupling = BitVector::from_fn(m - 1, |i| s.form().coupled(i, m - 1));
            let back = shrunk
                .extend_with_phase(&g, s.d()[m - 1], &coupling)
                .unwrap();
            assert_eq!(back.to_dense_exact().unwrap(), s.to_dense_exact().unwrap());
            done += 1;
        }
    }

    #[test]
    fn inner_product_examples() {
        for n in 1..=6 {
            let z = StabilizerState::zero_state(n);
            assert_eq!(z.inner_product(&z), ExactAmplitude::ONE);
            assert_eq!(
                z.inner_product(&StabilizerState::plus_state(n)),
                ExactAmplitude::inv_sqrt2_pow(n as u32)
            );
        }
        // Uniform superposition vs the even-weight states on six qubits.
        let even = StabilizerState::new(
            6,
            ["110000", "101000", "100100", "100010", "100001"].iter().map(|s| bv(s)).collect(),
            bv("000000"),
            &vec![vec![0; 5]; 5],
            &[0; 5],
            0,
            ExactAmplitude::inv_sqrt2_pow(5),
        )
        .unwrap();
        assert_eq!(
            StabilizerState::plus_state(6).inner_product(&even),
            ExactAmplitude::INV_SQRT2
        );
    }

    #[test]
    fn inner_products_match_dense_dot() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in 1..=6 {
            for _ in 0..200 {
                let a = StabilizerState::random(n, &mut rng);
                let b = StabilizerState::random(n, &mut rng);
                let exact = dense_dot(&a.to_dense_exact().unwrap(), &b.to_dense_exact().unwrap());
                assert_eq!(a.inner_product(&b), exact);
                assert_eq!(a.inner_product(&a), ExactAmplitude::ONE);
            }
        }
    }

    #[test]
    fn measure_examples() {
        let z: PauliOperator = "Z".parse().unwrap();
        let zero = StabilizerState::zero_state(1);
        let (s, p) = zero.measure_pauli(&z, 1).unwrap();
        assert_eq!((s.unwrap(), p), (zero.clone(), ExactAmplitude::ONE));
        let (s, p) = zero.measure_pauli(&z, -1).unwrap();
        assert_eq!((s, p), (None, ExactAmplitude::ZERO));
        let (s, p) = StabilizerState::plus_state(1).measure_pauli(&z, 1).unwrap();
        let dense = s.unwrap().to_dense_exact().unwrap();
        assert_eq!(dense, vec![ExactAmplitude::INV_SQRT2, ExactAmplitude::ZERO]);
        assert_eq!(p, ExactAmplitude::new(1, 0, 0, 0, 2));
        assert!(zero.measure_pauli(&"+i:Z".parse().unwrap(), 1).is_err());
    }

    fn dense_project(amps: &[ExactAmplitude], p: &PauliOperator, sign: i8) -> Vec<ExactAmplitude> {
        let n = p.len();
        let mut out: Vec<ExactAmplitude> = amps.to_vec();
        let s = if sign > 0 { ExactAmplitude::ONE } else { -ExactAmplitude::ONE };
        for (k, a) in amps.iter().enumerate() {
            let (y, ph) = p.on_basis(&BitVector::from_index(n, k));
            out[y.to_index()] += s * (ph * *a);
        }
        out.iter().map(|a| *a * ExactAmplitude::new(1, 0, 0, 0, 2)).collect()
    }

    #[test]
    fn measure_matches_dense_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=5 {
            for _ in 0..300 {
                let s = StabilizerState::random(n, &mut rng);
                let p = PauliOperator::random(n, &mut rng).with_phase(2 * rng.gen_range(0..2));
                let dense = s.to_dense_exact().unwrap();
                let mut total = ExactAmplitude::ZERO;
                for sign in [1i8, -1] {
                    let expect = dense_project(&dense, &p, sign);
                    let (out, norm) = s.measure_pauli(&p, sign).unwrap();
                    let got = match out {
                        Some(o) => o.to_dense_exact().unwrap(),
                        None => vec![ExactAmplitude::ZERO; 1 << n],
                    };
                    assert_eq!(got, expect, "state {s:?} pauli {p} sign {sign}");
                    assert_eq!(norm, dense_dot(&expect, &expect));
                    assert!(norm.is_real());
                    total += norm;
                }
                assert_eq!(total, ExactAmplitude::ONE);
            }
        }
    }

    #[test]
    fn random_single_qubit_states_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let draws = 60_000;
        let mut counts: HashMap<(AffineSpace, Vec<u8>), usize> = HashMap::new();
        for _ in 0..draws {
            let s = StabilizerState::random(1, &mut rng);
            *counts.entry((s.space().clone(), s.d().to_vec())).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let mean = draws as f64 / 6.0;
        let sigma = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - mean).abs() < 4.0 * sigma, "counts {counts:?}");
        }
        let a = StabilizerState::random(6, &mut ChaCha8Rng::seed_from_u64(4));
        let b = StabilizerState::random(6, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
    }

    #[test]
    fn all_two_qubit_states_appear() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100_000 {
            let s = StabilizerState::random(2, &mut rng);
            // Identify states up to global phase.
            seen.insert((s.space().clone(), s.d().to_vec(), s.j_upper()));
        }
        assert_eq!(seen.len(), 60);
        let total: f64 = (0..=2).map(|m| log2_state_count(2, m).exp2()).sum();
        assert!((total - 60.0).abs() < 1e-9);
    }

    #[test]
    fn dense_conversion_examples() {
        let zero = StabilizerState::zero_state(1).to_dense().unwrap();
        assert_eq!(zero, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let plus = StabilizerState::plus_state(1).to_dense().unwrap();
        assert!(plus.iter().all(|a| (a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15));
        assert!(StabilizerState::zero_state(15).to_dense().is_err());
    }

    #[test]
    fn amplitudes_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let s = StabilizerState::random(n, &mut rng);
            let back = StabilizerState::from_amplitudes(n, &s.to_dense_exact().unwrap()).unwrap();
            assert_eq!(back.to_dense_exact().unwrap(), s.to_dense_exact().unwrap());
        }
        let t = [ExactAmplitude::INV_SQRT2, EighthRootPhase::new(1) * ExactAmplitude::INV_SQRT2];
        assert!(StabilizerState::from_amplitudes(1, &t).is_err());
    }

    #[test]
    fn tensor_products_multiply_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let a = StabilizerState::random(3, &mut rng);
            let b = StabilizerState::random(2, &mut rng);
            let t = a.tensor(&b).to_dense_exact().unwrap();
            let (da, db) = (a.to_dense_exact().unwrap(), b.to_dense_exact().unwrap());
            for i in 0..8 {
                for j in 0..4 {
                    assert_eq!(t[i * 4 + j], da[i] * db[j]);
                }
            }
        }
        let _ = PauliKind::I;
    }

    proptest! {
        #[test]
        fn exp_sum_is_zero_or_power_of_sqrt2(seed in any::<u64>(), m in 0usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_form(m, &mut rng);
            let s = f.exp_sum();
            prop_assert!(s.is_zero() || s.log2_norm_sq().is_some());
        }

        #[test]
        fn measurement_probabilities_sum_to_one(seed in any::<u64>(), n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = StabilizerState::random(n, &mut rng);
            let p = PauliOperator::random(n, &mut rng);
            let (_, a) = s.measure_pauli(&p, 1).unwrap();
            let (_, b) = s.measure_pauli(&p, -1).unwrap();
            prop_assert_eq!(a + b, ExactAmplitude::ONE);
            let f = a.to_complex().re;
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }
}
