//! Bit-packed linear algebra over GF(2): vectors, matrices, Gaussian
//! elimination and affine subspaces in canonical form.
//!
//! Bits are packed into 64-bit words; bit `i` of a vector is stored in word
//! `i / 64` at position `i % 64`, and bits beyond the logical length are
//! always zero.  Affine spaces store their basis vectors as the *rows* of a
//! [`BitMatrix`] in reduced row-echelon form, with the shift vector cleared
//! on every pivot position — so two spaces are equal exactly when their
//! structs are equal.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// The all-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The all-one vector of the given length.
    pub fn ones(len: usize) -> Self {
        Self::from_fn(len, |_| true)
    }

    /// The unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Build from a predicate on positions.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    /// Build from a slice of booleans.
    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Build from a slice of 0/1 integers (any odd value counts as 1).
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i] & 1 == 1)
    }

    /// Interpret `index` as an `n`-bit basis label with position 0 as the
    /// most significant bit.
    pub fn from_index(len: usize, index: usize) -> Self {
        Self::from_fn(len, |i| (index >> (len - 1 - i)) & 1 == 1)
    }

    /// Inverse of [`BitVector::from_index`].
    pub fn to_index(&self) -> usize {
        (0..self.len).fold(0usize, |acc, i| (acc << 1) | self.get(i) as usize)
    }

    /// Logical length.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for a zero-length vector.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    /// Set bit `i` to `value`.
    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    /// Flip bit `i`.
    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// In-place XOR with a vector of the same length.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// XOR of two vectors.
    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Bitwise AND of two vectors.
    pub fn and(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.len, other.len);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Bitwise OR of two vectors.
    pub fn or(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.len, other.len);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    /// Inner product over GF(2): parity of the bitwise AND.
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// True when every bit is zero.
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Position of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    /// Positions of all set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// The sub-vector of positions `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        Self::from_fn(len, |i| self.get(start + i))
    }

    /// The bits as a vector of booleans.
    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for BitVector {
    /// Renders as a bitstring with position 0 leftmost.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, position 0 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.chars().count());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse {
                        position: i,
                        message: format!("expected 0 or 1, found `{other}`"),
                    })
                }
            }
        }
        Ok(v)
    }
}

/// A dense matrix over GF(2) stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    /// The `r × c` zero matrix.
    pub fn zeros(r: usize, c: usize) -> Self {
        BitMatrix {
            cols: c,
            rows: vec![BitVector::zeros(c); r],
        }
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Build from rows of equal length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "all rows must have length {cols}"
        );
        BitMatrix { cols, rows }
    }

    /// Parse from a list of bitstrings.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let rows: Vec<BitVector> = rows.iter().map(|r| r.parse()).collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// Row `i`.
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    /// Mutable row `i`.
    pub fn row_mut(&mut self, i: usize) -> &mut BitVector {
        &mut self.rows[i]
    }

    /// All rows.
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Consume into rows.
    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    /// Append a row.
    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    /// Set entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    /// Transpose.
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix–vector product `M v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        BitVector::from_fn(self.nrows(), |i| self.rows[i].dot(v))
    }

    /// Row combination `vᵀ M = Σ v_i · row_i`.
    pub fn combine_rows(&self, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.nrows(), "inner dimensions differ");
        BitMatrix {
            cols: other.cols,
            rows: self.rows.iter().map(|r| other.combine_rows(r)).collect(),
        }
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        gauss_eliminate(self).rank
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}

/// Result of Gauss–Jordan elimination.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// Rank over GF(2).
    pub rank: usize,
    /// Invertible transform `T` with `T · M = reduced`.
    pub row_ops: BitMatrix,
    /// Pivot column of each of the first `rank` rows of `reduced`.
    pub col_pivots: Vec<usize>,
    /// Reduced row-echelon form of `M`.
    pub reduced: BitMatrix,
}

/// Gauss–Jordan elimination to reduced row-echelon form; `m` is untouched.
pub fn gauss_eliminate(m: &BitMatrix) -> Elimination {
    let r = m.nrows();
    let mut reduced = m.clone();
    let mut ops = BitMatrix::identity(r);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..m.ncols() {
        if rank == r {
            break;
        }
        let Some(p) = (rank..r).find(|&i| reduced.rows[i].get(col)) else {
            continue;
        };
        reduced.rows.swap(rank, p);
        ops.rows.swap(rank, p);
        let (pivot_row, pivot_ops) = (reduced.rows[rank].clone(), ops.rows[rank].clone());
        for i in 0..r {
            if i != rank && reduced.rows[i].get(col) {
                reduced.rows[i].xor_assign(&pivot_row);
                ops.rows[i].xor_assign(&pivot_ops);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    Elimination {
        rank,
        row_ops: ops,
        col_pivots: pivots,
        reduced,
    }
}

/// A basis of the right null space `{v : M v = 0}`.
pub fn nullspace(m: &BitMatrix) -> Vec<BitVector> {
    let el = gauss_eliminate(m);
    let c = m.ncols();
    let mut is_pivot = vec![false; c];
    for &p in &el.col_pivots {
        is_pivot[p] = true;
    }
    (0..c)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVector::unit(c, f);
            for (r, &p) in el.col_pivots.iter().enumerate() {
                if el.reduced.get(r, f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// A particular solution of `M x = rhs`, or `None` if inconsistent.
pub fn solve(m: &BitMatrix, rhs: &BitVector) -> Option<BitVector> {
    assert_eq!(m.nrows(), rhs.len(), "right-hand side length mismatch");
    let el = gauss_eliminate(m);
    let t = el.row_ops.mul_vec(rhs);
    if (el.rank..m.nrows()).any(|i| t.get(i)) {
        return None;
    }
    let mut x = BitVector::zeros(m.ncols());
    for (r, &p) in el.col_pivots.iter().enumerate() {
        x.set(p, t.get(r));
    }
    Some(x)
}

/// The affine subspace `{Σ u_i g_i + h : u ∈ GF(2)^m}` of `GF(2)^n`.
///
/// Basis vectors `g_i` are the rows of [`AffineSpace::basis`], kept in
/// reduced row-echelon form; the shift `h` is zero on all pivot positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineSpace {
    n: usize,
    basis: BitMatrix,
    shift: BitVector,
    pivots: Vec<usize>,
}

/// The basis change produced by canonicalisation.
///
/// With old generators `g_j` and shift `h`, the canonical generators are
/// `g'_i = Σ_j transform[i][j] g_j` and the canonical shift is
/// `h' = h + Σ_j shift_coeffs[j] g_j`.
#[derive(Clone, Debug)]
pub struct Canonicalization {
    /// The canonical space.
    pub space: AffineSpace,
    /// Invertible `m × m` transform between generator sets.
    pub transform: BitMatrix,
    /// Coefficients of the shift correction in the old generators.
    pub shift_coeffs: BitVector,
}

impl AffineSpace {
    /// Canonicalise the space spanned by `generators` and shifted by `shift`,
    /// returning the basis change as well.
    pub fn canonicalize(
        n: usize,
        generators: Vec<BitVector>,
        shift: BitVector,
    ) -> Result<Canonicalization> {
        if shift.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: shift.len(),
            });
        }
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
        let m = generators.len();
        let gens = BitMatrix::from_rows(n, generators);
        let el = gauss_eliminate(&gens);
        if el.rank != m {
            return Err(Error::DependentBasis);
        }
        let mut h = shift;
        let mut coeffs = BitVector::zeros(m);
        for (i, &p) in el.col_pivots.iter().enumerate() {
            if h.get(p) {
                h.xor_assign(el.reduced.row(i));
                coeffs.xor_assign(el.row_ops.row(i));
            }
        }
        Ok(Canonicalization {
            space: AffineSpace {
                n,
                basis: el.reduced,
                shift: h,
                pivots: el.col_pivots,
            },
            transform: el.row_ops,
            shift_coeffs: coeffs,
        })
    }

    /// The canonical space spanned by `generators` and shifted by `shift`.
    pub fn new(n: usize, generators: Vec<BitVector>, shift: BitVector) -> Result<Self> {
        Ok(Self::canonicalize(n, generators, shift)?.space)
    }

    /// All of `GF(2)^n`.
    pub fn full(n: usize) -> Self {
        AffineSpace {
            n,
            basis: BitMatrix::identity(n),
            shift: BitVector::zeros(n),
            pivots: (0..n).collect(),
        }
    }

    /// The single point `{h}`.
    pub fn point(h: BitVector) -> Self {
        AffineSpace {
            n: h.len(),
            basis: BitMatrix::zeros(0, h.len()),
            shift: h,
            pivots: Vec::new(),
        }
    }

    /// Ambient dimension `n`.
    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Affine dimension `m`.
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Basis vectors as rows (`m × n`).
    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    /// Canonical shift vector.
    pub fn shift(&self) -> &BitVector {
        &self.shift
    }

    /// Pivot position of each basis row.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The point `Σ u_i g_i + h`.
    pub fn point_at(&self, u: &BitVector) -> BitVector {
        let mut x = self.basis.combine_rows(u);
        x.xor_assign(&self.shift);
        x
    }

    /// Coordinates of a vector in the linear span of the basis.
    pub fn linear_coords(&self, y: &BitVector) -> Option<BitVector> {
        let u = BitVector::from_fn(self.dim(), |i| y.get(self.pivots[i]));
        (self.basis.combine_rows(&u) == *y).then_some(u)
    }

    /// True when `y` lies in the linear span of the basis.
    pub fn spans(&self, y: &BitVector) -> bool {
        self.linear_coords(y).is_some()
    }

    /// The witness `u` with `Σ u_i g_i + h = x`, if `x` is a member.
    pub fn membership(&self, x: &BitVector) -> Option<BitVector> {
        assert_eq!(x.len(), self.n, "point length mismatch");
        self.linear_coords(&x.xor(&self.shift))
    }

    /// True when `x` is a member.
    pub fn contains(&self, x: &BitVector) -> bool {
        self.membership(x).is_some()
    }

    /// `n − m` independent vectors `ξ` with `ξ·(x − h) = 0` on the space.
    pub fn dual_basis(&self) -> BitMatrix {
        BitMatrix::from_rows(self.n, nullspace(&self.basis))
    }

    /// The intersection with another space of the same ambient dimension.
    pub fn intersection(&self, other: &AffineSpace) -> Option<AffineSpace> {
        assert_eq!(self.n, other.n, "ambient dimensions differ");
        let dual = other.dual_basis();
        // Constraints ξ_r · (Σ u_j g_j + h) = ξ_r · h_other on the parameters u.
        let c = BitMatrix::from_rows(
            self.dim(),
            dual.rows()
                .iter()
                .map(|xi| self.basis.mul_vec(xi))
                .collect(),
        );
        let rhs = dual.mul_vec(&self.shift.xor(&other.shift));
        let u0 = solve(&c, &rhs)?;
        let gens = nullspace(&c)
            .iter()
            .map(|v| self.basis.combine_rows(v))
            .collect();
        Some(
            AffineSpace::new(self.n, gens, self.point_at(&u0))
                .expect("null-space images of an independent basis are independent"),
        )
    }

    /// Every point of the space, in parameter order (requires `m ≤ 24`).
    pub fn points(&self) -> Vec<BitVector> {
        let m = self.dim();
        assert!(m <= 24, "refusing to enumerate 2^{m} points");
        (0..1usize << m)
            .map(|k| self.point_at(&BitVector::from_fn(m, |i| (k >> i) & 1 == 1)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> BitMatrix {
        BitMatrix::from_rows(
            c,
            (0..r)
                .map(|_| BitVector::from_fn(c, |_| rng.gen()))
                .collect(),
        )
    }

    fn brute_rank(m: &BitMatrix) -> usize {
        let mut span = HashSet::new();
        for k in 0..1usize << m.nrows() {
            span.insert(m.combine_rows(&BitVector::from_fn(m.nrows(), |i| (k >> i) & 1 == 1)));
        }
        span.len().trailing_zeros() as usize
    }

    fn six_qubit_generators() -> BitMatrix {
        BitMatrix::from_strs(&["110000", "101000", "100100", "100010", "100001"]).unwrap()
    }

    #[test]
    fn bit_vector_basics() {
        let v: BitVector = "1011".parse().unwrap();
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.to_string(), "1011");
        assert_eq!(v.to_index(), 0b1011);
        assert_eq!(BitVector::from_index(4, 0b1011), v);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert!(v.dot(&"0010".parse().unwrap()));
        assert!("10a".parse::<BitVector>().is_err());
        let long = BitVector::unit(130, 129);
        assert_eq!(long.first_one(), Some(129));
        assert_eq!(long.concat(&v).len(), 134);
    }

    #[test]
    fn elimination_examples() {
        assert_eq!(gauss_eliminate(&BitMatrix::zeros(3, 3)).rank, 0);
        assert_eq!(gauss_eliminate(&BitMatrix::identity(5)).rank, 5);
        let g = six_qubit_generators();
        let el = gauss_eliminate(&g);
        assert_eq!(el.rank, 5);
        assert_eq!(el.row_ops.mul(&g), el.reduced);
    }

    #[test]
    fn membership_examples() {
        let full = AffineSpace::full(4);
        let x: BitVector = "0110".parse().unwrap();
        assert_eq!(full.membership(&x), Some(x.clone()));
        let pt = AffineSpace::point(x.clone());
        assert_eq!(pt.membership(&x), Some(BitVector::zeros(0)));

        let space = AffineSpace::new(
            6,
            six_qubit_generators().into_rows(),
            BitVector::unit(6, 0),
        )
        .unwrap();
        assert_eq!(space.dim(), 5);
        // Brute force over all 2^5 parameters: both points are members.
        let members: HashSet<BitVector> = space.points().into_iter().collect();
        for s in ["100000", "000001"] {
            let x: BitVector = s.parse().unwrap();
            assert!(members.contains(&x));
            let u = space.membership(&x).unwrap();
            assert_eq!(space.point_at(&u), x);
        }
    }

    #[test]
    fn intersection_examples() {
        let a = AffineSpace::new(3, vec!["010".parse().unwrap()], "100".parse().unwrap()).unwrap();
        assert_eq!(a.intersection(&a), Some(a.clone()));
        let z0 = AffineSpace::point("0".parse().unwrap());
        let z1 = AffineSpace::point("1".parse().unwrap());
        assert_eq!(z0.intersection(&z1), None);
    }

    #[test]
    fn dual_basis_examples() {
        assert_eq!(AffineSpace::full(4).dual_basis().nrows(), 0);
        let pt = AffineSpace::point("101".parse().unwrap());
        let dual = pt.dual_basis();
        assert_eq!(dual.nrows(), 3);
        assert_eq!(dual.rank(), 3);
        let space = AffineSpace::new(
            6,
            six_qubit_generators().into_rows(),
            BitVector::unit(6, 0),
        )
        .unwrap();
        let dual = space.dual_basis();
        assert_eq!(dual.nrows(), 1);
        for x in space.points() {
            assert!(!dual.row(0).dot(&x.xor(space.shift())));
        }
    }

    #[test]
    fn canonical_form_is_structural() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = 6;
            let m = rng.gen_range(0..=4);
            let g = random_matrix(&mut rng, m, n);
            if g.rank() < m {
                continue;
            }
            let h = BitVector::from_fn(n, |_| rng.gen());
            let a = AffineSpace::new(n, g.rows().to_vec(), h.clone()).unwrap();
            // Re-generating from a random point and a shuffled basis gives the same struct.
            let mut rows = g.rows().to_vec();
            if m >= 2 {
                let first = rows[0].clone();
                rows[1].xor_assign(&first);
                rows.swap(0, 1);
            }
            let shifted = a.points()[rng.gen_range(0..1usize << m)].clone();
            let b = AffineSpace::new(n, rows, shifted).unwrap();
            assert_eq!(a, b);
            let c = AffineSpace::canonicalize(n, g.rows().to_vec(), h.clone()).unwrap();
            for (i, row) in c.space.basis().rows().iter().enumerate() {
                assert_eq!(*row, g.combine_rows(c.transform.row(i)));
            }
            assert_eq!(*c.space.shift(), h.xor(&g.combine_rows(&c.shift_coeffs)));
        }
    }

    #[test]
    fn rank_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let r = rng.gen_range(0..=6);
            let c = rng.gen_range(0..=6);
            let m = random_matrix(&mut rng, r, c);
            assert_eq!(m.rank(), brute_rank(&m));
        }
    }

    #[test]
    fn random_intersections_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        while checked < 200 {
            let g1 = random_matrix(&mut rng, 4, 6);
            let g2 = random_matrix(&mut rng, 4, 6);
            if g1.rank() < 4 || g2.rank() < 4 {
                continue;
            }
            checked += 1;
            let a = AffineSpace::new(6, g1.into_rows(), BitVector::zeros(6)).unwrap();
            let b = AffineSpace::new(6, g2.into_rows(), BitVector::zeros(6)).unwrap();
            let i = a.intersection(&b).unwrap();
            for k in 0..64 {
                let x = BitVector::from_index(6, k);
                assert_eq!(i.contains(&x), a.contains(&x) && b.contains(&x));
            }
        }
    }

    fn arb_space(n: usize) -> impl Strategy<Value = AffineSpace> {
        (
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 0..=n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(rows, h)| {
                let rows: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bools(r)).collect();
                let el = gauss_eliminate(&BitMatrix::from_rows(n, rows));
                let gens = el.reduced.rows()[..el.rank].to_vec();
                AffineSpace::new(n, gens, BitVector::from_bools(&h)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn intersection_is_pointwise_and(n in 1usize..=8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = |rng: &mut ChaCha8Rng| {
                let m = rng.gen_range(0..=n);
                let g = random_matrix(rng, m, n);
                let el = gauss_eliminate(&g);
                AffineSpace::new(n, el.reduced.rows()[..el.rank].to_vec(),
                    BitVector::from_fn(n, |_| rng.gen())).unwrap()
            };
            let a = space(&mut rng);
            let b = space(&mut rng);
            let i = a.intersection(&b);
            for k in 0..1usize << n {
                let x = BitVector::from_index(n, k);
                let expected = a.contains(&x) && b.contains(&x);
                prop_assert_eq!(i.as_ref().is_some_and(|s| s.contains(&x)), expected);
            }
        }

        #[test]
        fn dual_annihilates_space(a in arb_space(7)) {
            let dual = a.dual_basis();
            prop_assert_eq!(dual.nrows() + a.dim(), 7);
            for x in a.points() {
                prop_assert!(dual.mul_vec(&x.xor(a.shift())).is_zero());
            }
        }

        #[test]
        fn solve_finds_solutions(r in 0usize..6, c in 0usize..6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, r, c);
            let x = BitVector::from_fn(c, |_| rng.gen());
            let rhs = m.mul_vec(&x);
            let sol = solve(&m, &rhs).unwrap();
            prop_assert_eq!(m.mul_vec(&sol), rhs);
            for v in nullspace(&m) {
                prop_assert!(m.mul_vec(&v).is_zero());
            }
            prop_assert_eq!(nullspace(&m).len() + m.rank(), c);
        }
    }
}
