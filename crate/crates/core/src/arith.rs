//! Exact arithmetic in the Gaussian integers Z[i] and the Eisenstein integers Z[ω].
//!
//! Both rings are Euclidean, so we get gcds, exact division tests and a canonical
//! representative for every vector up to multiplication by a unit.  Components are
//! `i64`; every quantity in this crate stays many orders of magnitude below the
//! overflow threshold, and debug builds trap if that ever stops being true.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};

pub use num_rational::BigRational;

/// Which of the two supported rings a type represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    Gaussian,
    Eisenstein,
}

/// Common interface of Z[i] and Z[ω].
///
/// Elements are stored as a pair of integers `(x, y)` meaning `x + y·g` where `g`
/// is `i` or `ω` respectively.
pub trait Ring:
    Copy
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    const KIND: RingKind;
    const NAME: &'static str;
    /// Size of the unit group.
    const UNIT_COUNT: usize;

    fn from_parts(x: i64, y: i64) -> Self;
    fn parts(self) -> (i64, i64);
    fn conj(self) -> Self;
    /// Field norm `|z|^2`.
    fn norm(self) -> i64;
    /// Units in counter-clockwise order starting at 1.
    fn units() -> Vec<Self>;
    /// `exp(2πi k / order)` if it lies in the ring.
    fn root_of_unity(order: u32, k: i64) -> Option<Self>;
    /// True for exactly one element of every nonzero unit orbit.
    fn in_canonical_sector(self) -> bool;
    /// Real part as an exact rational (Eisenstein elements have half-integer real parts).
    fn re_rational(self) -> BigRational;

    fn zero() -> Self {
        Self::from_parts(0, 0)
    }
    fn one() -> Self {
        Self::from_parts(1, 0)
    }
    fn from_int(n: i64) -> Self {
        Self::from_parts(n, 0)
    }
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
    fn scale(self, n: i64) -> Self {
        let (x, y) = self.parts();
        Self::from_parts(x * n, y * n)
    }
    fn is_unit(self) -> bool {
        self.norm() == 1
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    fn div_exact(self, d: Self) -> Option<Self> {
        let n = d.norm();
        if n == 0 {
            return None;
        }
        let (p, q) = (self * d.conj()).parts();
        if p % n == 0 && q % n == 0 {
            Some(Self::from_parts(p / n, q / n))
        } else {
            None
        }
    }

    /// Quotient rounded to the nearest lattice point; the remainder has smaller norm
    /// than `d` in both rings.
    fn div_round(self, d: Self) -> Self {
        let n = d.norm();
        let (p, q) = (self * d.conj()).parts();
        let r = |v: i64| (2 * v + n).div_euclid(2 * n);
        Self::from_parts(r(p), r(q))
    }

    fn gcd(self, other: Self) -> Self {
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a - b * a.div_round(b);
            a = b;
            b = r;
        }
        a
    }

    /// Content over Z: gcd of all four integer coordinates.
    fn int_content(self) -> i64 {
        let (x, y) = self.parts();
        x.gcd(&y)
    }
}

/// `x + y i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }
    pub const I: GaussianInt = GaussianInt::new(0, 1);
}

/// `a + b ω` with `ω = exp(2πi/3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EisensteinInt {
    pub a: i64,
    pub b: i64,
}

impl EisensteinInt {
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }
    pub const OMEGA: EisensteinInt = EisensteinInt::new(0, 1);
    pub const OMEGA2: EisensteinInt = EisensteinInt::new(-1, -1);
    /// `θ = ω − ω² = i√3`, the prime above 3.
    pub const THETA: EisensteinInt = EisensteinInt::new(1, 2);

    /// `ω^k` for any integer `k`.
    pub fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::new(1, 0),
            1 => Self::OMEGA,
            _ => Self::OMEGA2,
        }
    }

    /// Real and imaginary parts as floats.
    pub fn to_f64(self) -> (f64, f64) {
        let h = 3f64.sqrt() / 2.0;
        (self.a as f64 - 0.5 * self.b as f64, h * self.b as f64)
    }
}

impl Ring for GaussianInt {
    const KIND: RingKind = RingKind::Gaussian;
    const NAME: &'static str = "Z[i]";
    const UNIT_COUNT: usize = 4;

    fn from_parts(x: i64, y: i64) -> Self {
        Self::new(x, y)
    }
    fn parts(self) -> (i64, i64) {
        (self.re, self.im)
    }
    fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }
    fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }
    fn units() -> Vec<Self> {
        vec![
            Self::new(1, 0),
            Self::new(0, 1),
            Self::new(-1, 0),
            Self::new(0, -1),
        ]
    }
    fn root_of_unity(order: u32, k: i64) -> Option<Self> {
        if order == 0 || 4 % order != 0 {
            return None;
        }
        let step = (k * (4 / order as i64)).rem_euclid(4) as usize;
        Some(Self::units()[step])
    }
    fn in_canonical_sector(self) -> bool {
        self.re > 0 && self.im >= 0
    }
    fn re_rational(self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.re))
    }
}

impl Ring for EisensteinInt {
    const KIND: RingKind = RingKind::Eisenstein;
    const NAME: &'static str = "Z[ω]";
    const UNIT_COUNT: usize = 6;

    fn from_parts(x: i64, y: i64) -> Self {
        Self::new(x, y)
    }
    fn parts(self) -> (i64, i64) {
        (self.a, self.b)
    }
    fn conj(self) -> Self {
        // conj(ω) = ω² = −1 − ω
        Self::new(self.a - self.b, -self.b)
    }
    fn norm(self) -> i64 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }
    fn units() -> Vec<Self> {
        // 1, −ω², ω, −1, ω², −ω  (angles 0°, 60°, ..., 300°)
        vec![
            Self::new(1, 0),
            Self::new(1, 1),
            Self::new(0, 1),
            Self::new(-1, 0),
            Self::new(-1, -1),
            Self::new(0, -1),
        ]
    }
    fn root_of_unity(order: u32, k: i64) -> Option<Self> {
        if order == 0 || 6 % order != 0 {
            return None;
        }
        let step = (k * (6 / order as i64)).rem_euclid(6) as usize;
        Some(Self::units()[step])
    }
    fn in_canonical_sector(self) -> bool {
        // argument in [0°, 60°)
        self.b >= 0 && self.a > self.b
    }
    fn re_rational(self) -> BigRational {
        BigRational::new(BigInt::from(2 * self.a - self.b), BigInt::from(2))
    }
}

macro_rules! ring_ops {
    ($t:ident, $x:ident, $y:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                $t::new(self.$x + o.$x, self.$y + o.$y)
            }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, o: $t) {
                self.$x += o.$x;
                self.$y += o.$y;
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                $t::new(self.$x - o.$x, self.$y - o.$y)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                $t::new(-self.$x, -self.$y)
            }
        }
    };
}
ring_ops!(GaussianInt, re, im);
ring_ops!(EisensteinInt, a, b);

impl Mul for GaussianInt {
    type Output = GaussianInt;
    fn mul(self, o: GaussianInt) -> GaussianInt {
        GaussianInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Mul for EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, o: EisensteinInt) -> EisensteinInt {
        // ω² = −1 − ω
        let bd = self.b * o.b;
        EisensteinInt::new(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, m) => write!(f, "{m}i"),
            (r, 1) => write!(f, "{r}+i"),
            (r, -1) => write!(f, "{r}-i"),
            (r, m) if m > 0 => write!(f, "{r}+{m}i"),
            (r, m) => write!(f, "{r}{m}i"),
        }
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "ω"),
            (0, -1) => write!(f, "-ω"),
            (0, b) => write!(f, "{b}ω"),
            (a, 1) => write!(f, "{a}+ω"),
            (a, -1) => write!(f, "{a}-ω"),
            (a, b) if b > 0 => write!(f, "{a}+{b}ω"),
            (a, b) => write!(f, "{a}{b}ω"),
        }
    }
}

/// Hermitian inner product `Σ conj(u_k) v_k`.
pub fn inner<R: Ring>(u: &[R], v: &[R]) -> R {
    u.iter()
        .zip(v)
        .fold(R::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

/// `Σ |v_k|^2`.
pub fn norm_sq<R: Ring>(v: &[R]) -> i64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Divide out the gcd of all integer coordinates, returning the quotient and the gcd.
pub fn primitive_part<R: Ring>(v: &[R]) -> Result<(Vec<R>, i64)> {
    let g = v.iter().fold(0i64, |g, z| g.gcd(&z.int_content()));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    let out = v
        .iter()
        .map(|z| {
            let (x, y) = z.parts();
            R::from_parts(x / g, y / g)
        })
        .collect();
    Ok((out, g))
}

/// Ring gcd of all components (zero for the zero vector).
pub fn ring_content<R: Ring>(v: &[R]) -> R {
    v.iter().fold(R::zero(), |g, &z| g.gcd(z))
}

/// Divide out the ring gcd of all components.
pub fn ring_primitive_part<R: Ring>(v: &[R]) -> Vec<R> {
    let g = ring_content(v);
    if g.is_zero() || g.is_unit() {
        return v.to_vec();
    }
    v.iter()
        .map(|&z| z.div_exact(g).expect("gcd divides every component"))
        .collect()
}

/// Multiply by the unique unit `u` that puts the first nonzero component in the
/// canonical sector.  Returns `(u·v, u)`.
///
/// Sector rule (frozen, cache files depend on it): Gaussian `re > 0, im >= 0`;
/// Eisenstein `a + bω` with `b >= 0, a > b`, i.e. argument in `[0°, 60°)`.
pub fn unit_canonicalize<R: Ring>(v: &[R]) -> Result<(Vec<R>, R)> {
    let lead = *v.iter().find(|z| !z.is_zero()).ok_or(Error::ZeroVector)?;
    let u = R::units()
        .into_iter()
        .find(|&u| (u * lead).in_canonical_sector())
        .expect("every nonzero element has a unit multiple in the sector");
    Ok((v.iter().map(|&z| u * z).collect(), u))
}

/// The unit group of one of the two rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnitGroup {
    Gaussian4,
    Eisenstein6,
}

impl UnitGroup {
    pub fn of<R: Ring>() -> Self {
        match R::KIND {
            RingKind::Gaussian => UnitGroup::Gaussian4,
            RingKind::Eisenstein => UnitGroup::Eisenstein6,
        }
    }
    pub fn order(self) -> usize {
        match self {
            UnitGroup::Gaussian4 => 4,
            UnitGroup::Eisenstein6 => 6,
        }
    }
}

pub fn gaussian_norm(z: GaussianInt) -> i64 {
    z.norm()
}

pub fn eisenstein_norm(z: EisensteinInt) -> i64 {
    z.norm()
}

/// `n / d` as a `BigRational`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `n / d` with big integers.
pub fn big_ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Lossy conversion for reporting.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Floor of the square root of a nonnegative `i128`.
pub fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
