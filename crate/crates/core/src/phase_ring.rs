//! Exact arithmetic in the ring ℤ[i, √2] scaled by powers of 1/√2.
//!
//! Every amplitude, phase and decomposition coefficient handled by the
//! simulator has the form `(a + b√2 + (c + d√2)·i) / √2^e` with integer
//! `a, b, c, d` and a non-negative exponent `e`.  Values are kept in a
//! canonical form in which `e` is minimal, so equality of two values is a
//! plain field-wise comparison.
//!
//! Integers are 128-bit.  The operator impls (`+`, `*`, …) panic on overflow
//! with a descriptive message; the `checked_*` methods report it as an error
//! instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An element of ℤ[√2] stored as `a + b√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Real2 {
    a: i128,
    b: i128,
}

impl Real2 {
    const ZERO: Real2 = Real2 { a: 0, b: 0 };

    fn checked_add(self, o: Real2) -> Option<Real2> {
        Some(Real2 {
            a: self.a.checked_add(o.a)?,
            b: self.b.checked_add(o.b)?,
        })
    }

    fn checked_sub(self, o: Real2) -> Option<Real2> {
        Some(Real2 {
            a: self.a.checked_sub(o.a)?,
            b: self.b.checked_sub(o.b)?,
        })
    }

    fn checked_mul(self, o: Real2) -> Option<Real2> {
        // (a + b√2)(a' + b'√2) = aa' + 2bb' + (ab' + ba')√2
        let a = self
            .a
            .checked_mul(o.a)?
            .checked_add(self.b.checked_mul(o.b)?.checked_mul(2)?)?;
        let b = self
            .a
            .checked_mul(o.b)?
            .checked_add(self.b.checked_mul(o.a)?)?;
        Some(Real2 { a, b })
    }

    /// Multiply by √2: (a + b√2)·√2 = 2b + a√2.
    fn checked_mul_sqrt2(self) -> Option<Real2> {
        Some(Real2 {
            a: self.b.checked_mul(2)?,
            b: self.a,
        })
    }

    fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }
}

/// An exact value `(a + b√2 + (c + d√2)·i) / √2^e` in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExactAmplitude {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
    e: u32,
}

impl Default for ExactAmplitude {
    fn default() -> Self {
        Self::ZERO
    }
}

impl ExactAmplitude {
    /// The additive identity.
    pub const ZERO: ExactAmplitude = ExactAmplitude {
        a: 0,
        b: 0,
        c: 0,
        d: 0,
        e: 0,
    };
    /// The multiplicative identity.
    pub const ONE: ExactAmplitude = ExactAmplitude {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
        e: 0,
    };
    /// The imaginary unit.
    pub const I: ExactAmplitude = ExactAmplitude {
        a: 0,
        b: 0,
        c: 1,
        d: 0,
        e: 0,
    };
    /// √2.
    pub const SQRT2: ExactAmplitude = ExactAmplitude {
        a: 0,
        b: 1,
        c: 0,
        d: 0,
        e: 0,
    };
    /// 1/√2.
    pub const INV_SQRT2: ExactAmplitude = ExactAmplitude {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
        e: 1,
    };

    /// Build `(a + b√2 + (c + d√2)i) / √2^e`, canonicalising the result.
    pub fn new(a: i128, b: i128, c: i128, d: i128, e: u32) -> Self {
        Self::canonical(Real2 { a, b }, Real2 { a: c, b: d }, e)
    }

    /// The integer `n` as an exact value.
    pub fn from_int(n: i128) -> Self {
        Self::new(n, 0, 0, 0, 0)
    }

    /// `1/√2^k`.
    pub fn inv_sqrt2_pow(k: u32) -> Self {
        Self::new(1, 0, 0, 0, k)
    }

    /// `√2^k`.
    pub fn sqrt2_pow(k: u32) -> Self {
        let mut out = Self::ONE;
        for _ in 0..k {
            out = out * Self::SQRT2;
        }
        out
    }

    /// The five canonical fields `(a, b, c, d, e)`.
    pub fn parts(&self) -> (i128, i128, i128, i128, u32) {
        (self.a, self.b, self.c, self.d, self.e)
    }

    fn re(&self) -> Real2 {
        Real2 {
            a: self.a,
            b: self.b,
        }
    }

    fn im(&self) -> Real2 {
        Real2 {
            a: self.c,
            b: self.d,
        }
    }

    fn canonical(mut re: Real2, mut im: Real2, mut e: u32) -> Self {
        if re == Real2::ZERO && im == Real2::ZERO {
            return Self::ZERO;
        }
        // (a + b√2)/√2 = b + (a/2)√2, valid whenever a is even.
        while e > 0 && re.a % 2 == 0 && im.a % 2 == 0 {
            re = Real2 {
                a: re.b,
                b: re.a / 2,
            };
            im = Real2 {
                a: im.b,
                b: im.a / 2,
            };
            e -= 1;
        }
        ExactAmplitude {
            a: re.a,
            b: re.b,
            c: im.a,
            d: im.b,
            e,
        }
    }

    /// True for the zero value.
    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// True when the imaginary part vanishes exactly.
    pub fn is_real(&self) -> bool {
        self.c == 0 && self.d == 0
    }

    /// The real part as an exact value.
    pub fn real_part(&self) -> Self {
        Self::new(self.a, self.b, 0, 0, self.e)
    }

    /// The imaginary part (as a real exact value).
    pub fn imag_part(&self) -> Self {
        Self::new(self.c, self.d, 0, 0, self.e)
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        ExactAmplitude {
            c: -self.c,
            d: -self.d,
            ..*self
        }
    }

    /// Multiply by `1/√2^k` (always exact, never overflows).
    pub fn div_sqrt2_pow(&self, k: u32) -> Self {
        Self::canonical(self.re(), self.im(), self.e + k)
    }

    /// Raise the representation to exponent `e`, multiplying the numerator
    /// by the matching power of √2.
    fn lift(&self, e: u32) -> Option<(Real2, Real2)> {
        let mut re = self.re();
        let mut im = self.im();
        for _ in self.e..e {
            re = re.checked_mul_sqrt2()?;
            im = im.checked_mul_sqrt2()?;
        }
        Some((re, im))
    }

    /// Exact sum, or an overflow error.
    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let e = self.e.max(o.e);
        let (r1, i1) = self.lift(e).ok_or(Error::RingOverflow)?;
        let (r2, i2) = o.lift(e).ok_or(Error::RingOverflow)?;
        let re = r1.checked_add(r2).ok_or(Error::RingOverflow)?;
        let im = i1.checked_add(i2).ok_or(Error::RingOverflow)?;
        Ok(Self::canonical(re, im, e))
    }

    /// Exact product, or an overflow error.
    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let inner = || -> Option<Self> {
            let (p, q) = (self.re(), self.im());
            let (r, s) = (o.re(), o.im());
            let re = p.checked_mul(r)?.checked_sub(q.checked_mul(s)?)?;
            let im = p.checked_mul(s)?.checked_add(q.checked_mul(r)?)?;
            let e = self.e.checked_add(o.e)?;
            Some(Self::canonical(re, im, e))
        };
        inner().ok_or(Error::RingOverflow)
    }

    /// `|x|² = x · conj(x)`, a real exact value.
    pub fn norm_sq(&self) -> Self {
        *self * self.conj()
    }

    /// If `|x|² = 2^j` for an integer `j`, return `j`.
    pub fn log2_norm_sq(&self) -> Option<i32> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        let j = n.to_complex().re.log2().round() as i32;
        let candidate = if j >= 0 {
            Self::from_int(1i128 << j)
        } else {
            Self::inv_sqrt2_pow((-2 * j) as u32)
        };
        (candidate == n).then_some(j)
    }

    /// Floating-point evaluation.
    pub fn to_complex(&self) -> Complex64 {
        let scale = std::f64::consts::FRAC_1_SQRT_2.powi(self.e as i32);
        Complex64::new(self.re().to_f64() * scale, self.im().to_f64() * scale)
    }

    /// Integer power.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::ONE;
        for _ in 0..k {
            out = out * *self;
        }
        out
    }
}

impl Add for ExactAmplitude {
    type Output = ExactAmplitude;
    fn add(self, o: Self) -> Self {
        self.checked_add(&o)
            .unwrap_or_else(|_| panic!("exact amplitude overflow in {self} + {o}"))
    }
}

impl AddAssign for ExactAmplitude {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for ExactAmplitude {
    type Output = ExactAmplitude;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for ExactAmplitude {
    type Output = ExactAmplitude;
    fn neg(self) -> Self {
        ExactAmplitude {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            e: self.e,
        }
    }
}

impl Mul for ExactAmplitude {
    type Output = ExactAmplitude;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(&o)
            .unwrap_or_else(|_| panic!("exact amplitude overflow in {self} * {o}"))
    }
}

impl MulAssign for ExactAmplitude {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl std::iter::Sum for ExactAmplitude {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl From<EighthRootPhase> for ExactAmplitude {
    fn from(p: EighthRootPhase) -> Self {
        p.to_amplitude()
    }
}

impl fmt::Display for ExactAmplitude {
    /// Renders as `(a + b√2) + (c + d√2)i / √2^e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}√2) + ({} + {}√2)i / √2^{}",
            self.a, self.b, self.c, self.d, self.e
        )
    }
}

impl ExactAmplitude {
    /// Compact tuple form `(a,b,c,d,e)` used by the decomposition file format.
    pub fn to_tuple_string(&self) -> String {
        format!("({},{},{},{},{})", self.a, self.b, self.c, self.d, self.e)
    }
}

impl FromStr for ExactAmplitude {
    type Err = Error;

    /// Parses the tuple form `(a,b,c,d,e)`; the result is canonicalised.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            position: 0,
            message: format!("{msg} in amplitude `{s}`"),
        };
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| bad("expected parenthesised tuple"))?;
        let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(bad("expected five fields"));
        }
        let ints: Vec<i128> = fields[..4]
            .iter()
            .map(|f| f.parse::<i128>().map_err(|_| bad("invalid integer")))
            .collect::<Result<_>>()?;
        let e: u32 = fields[4].parse().map_err(|_| bad("invalid exponent"))?;
        Ok(Self::new(ints[0], ints[1], ints[2], ints[3], e))
    }
}

/// The eighth root of unity `e^{iπk/4}`, stored as `k mod 8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct EighthRootPhase(u8);

impl EighthRootPhase {
    /// The phase 1.
    pub const ONE: EighthRootPhase = EighthRootPhase(0);

    /// `e^{iπk/4}` for any integer `k`.
    pub fn new(k: i64) -> Self {
        EighthRootPhase(k.rem_euclid(8) as u8)
    }

    /// `i^k`.
    pub fn i_pow(k: i64) -> Self {
        Self::new(2 * k)
    }

    /// The exponent `k ∈ 0..8`.
    pub fn k(&self) -> u8 {
        self.0
    }

    /// Complex conjugate, `e^{−iπk/4}`.
    pub fn conj(&self) -> Self {
        Self::new(-(self.0 as i64))
    }

    /// Integer power.
    pub fn pow(&self, n: i64) -> Self {
        Self::new(self.0 as i64 * n)
    }

    /// Exact embedding into the ring.
    pub fn to_amplitude(&self) -> ExactAmplitude {
        match self.0 {
            0 => ExactAmplitude::new(1, 0, 0, 0, 0),
            1 => ExactAmplitude::new(1, 0, 1, 0, 1),
            2 => ExactAmplitude::new(0, 0, 1, 0, 0),
            3 => ExactAmplitude::new(-1, 0, 1, 0, 1),
            4 => ExactAmplitude::new(-1, 0, 0, 0, 0),
            5 => ExactAmplitude::new(-1, 0, -1, 0, 1),
            6 => ExactAmplitude::new(0, 0, -1, 0, 0),
            7 => ExactAmplitude::new(1, 0, -1, 0, 1),
            _ => unreachable!("phase exponent is reduced mod 8"),
        }
    }

    /// Floating-point value.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * self.0 as f64)
    }
}

impl Mul for EighthRootPhase {
    type Output = EighthRootPhase;
    fn mul(self, o: Self) -> Self {
        EighthRootPhase((self.0 + o.0) % 8)
    }
}

impl MulAssign for EighthRootPhase {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Mul<ExactAmplitude> for EighthRootPhase {
    type Output = ExactAmplitude;
    fn mul(self, o: ExactAmplitude) -> ExactAmplitude {
        self.to_amplitude() * o
    }
}
