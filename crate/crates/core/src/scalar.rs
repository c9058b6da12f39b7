//! Scalar backends.
//!
//! Two tiers exist: exact arbitrary-precision rationals and double-precision
//! complex floats. Generic code is written against [`Scalar`]; a computation is
//! always carried out in exactly one tier.

use core::fmt::{self, Debug, Display};
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use alloc::string::String;
use alloc::format;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_complex::Complex64;
pub use num_rational::BigRational as Rational;

/// Field operations shared by both backends.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// `true` for the rational tier.
    const EXACT: bool;
    /// Short backend name used in reports.
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Nearest value to a real double (exact binary value on the rational tier).
    fn from_f64(v: f64) -> Self;
    /// Converts a catalog/user value into this tier. Irrational or complex
    /// values have no exact image and yield `None` on the rational tier.
    fn from_number(n: &Number) -> Option<Self>;
    fn to_number(&self) -> Number;
    fn to_complex(&self) -> Complex64;
    fn conj(&self) -> Self;
    fn modulus(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// Equality test: exact on the rational tier, `|a - b| <= tol` otherwise.
    fn near(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).modulus() <= tol
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("finite value")
    }
    fn from_number(n: &Number) -> Option<Self> {
        match n {
            Number::Exact(q) => Some(q.clone()),
            Number::Approx(_) => None,
        }
    }
    fn to_number(&self) -> Number {
        Number::Exact(self.clone())
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn modulus(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_number(n: &Number) -> Option<Self> {
        Some(n.to_complex())
    }
    fn to_number(&self) -> Number {
        Number::Approx(*self)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Converts a rational to the nearest double, also for huge numerators and
/// denominators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Shift both parts down to a representable range.
            let nb = q.numer().bits() as i64;
            let db = q.denom().bits() as i64;
            let shift = (nb.max(db) - 1000).max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// A value that is either known exactly (rational) or only numerically.
///
/// Character values, catalog irrep entries and parsed matrix literals are
/// carried as `Number` until they are converted into a concrete backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Approx(Complex64),
}

impl Number {
    pub fn integer(v: i64) -> Self {
        Number::Exact(Rational::from_i64(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Number::Exact(q) => q.to_complex(),
            Number::Approx(z) => *z,
        }
    }

    pub fn conj(&self) -> Number {
        match self {
            Number::Exact(q) => Number::Exact(q.clone()),
            Number::Approx(z) => Number::Approx(z.conj()),
        }
    }

    pub fn mul(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a * b),
            _ => Number::Approx(self.to_complex() * other.to_complex()),
        }
    }

    pub fn add(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a + b),
            _ => Number::Approx(self.to_complex() + other.to_complex()),
        }
    }
}

impl Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(q) => write!(f, "{}", q),
            Number::Approx(z) => f.write_str(&format_complex(*z)),
        }
    }
}

/// Formats a complex float as `a`, or `a+bi` / `a-bi` when the imaginary part
/// is nonzero. Uses the shortest round-trip representation of each part.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Exact value of `cos(2*pi*p/q)` when it is rational, otherwise a float.
///
/// `cos(2*pi*p/q)` is rational exactly when the reduced denominator is one of
/// 1, 2, 3, 4 or 6.
pub fn cos_two_pi_fraction(p: i64, q: i64) -> Number {
    assert!(q > 0);
    let p = p.rem_euclid(q);
    let g = num_integer::gcd(p, q);
    let (p, q) = (p / g, q / g);
    let exact = match (p, q) {
        (0, 1) => Some((1, 1)),
        (1, 2) => Some((-1, 1)),
        (_, 3) => Some((-1, 2)),
        (_, 4) => Some((0, 1)),
        (1, 6) | (5, 6) => Some((1, 2)),
        _ => None,
    };
    match exact {
        Some((n, d)) => Number::Exact(Rational::from_ratio(n, d)),
        None => Number::Approx(Complex64::new(
            libm::cos(2.0 * core::f64::consts::PI * p as f64 / q as f64),
            0.0,
        )),
    }
}

/// `sin(2*pi*p/q)`, exact when rational.
pub fn sin_two_pi_fraction(p: i64, q: i64) -> Number {
    // sin(2πp/q) = cos(2π(q - 4p)/(4q))
    cos_two_pi_fraction(q - 4 * p, 4 * q)
}

/// `exp(2*pi*i*p/q)`: exact when the value is a rational real number.
pub fn root_of_unity(p: i64, q: i64) -> Number {
    let re = cos_two_pi_fraction(p, q);
    let im = sin_two_pi_fraction(p, q);
    match (&re, &im) {
        (Number::Exact(_), Number::Exact(s)) if Zero::is_zero(s) => re,
        _ => Number::Approx(Complex64::new(re.to_complex().re, im.to_complex().re)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_exactness() {
        assert_eq!(cos_two_pi_fraction(1, 4), Number::integer(0));
        assert_eq!(cos_two_pi_fraction(1, 3), Number::Exact(Rational::from_ratio(-1, 2)));
        assert_eq!(cos_two_pi_fraction(2, 2), Number::integer(1));
        assert_eq!(cos_two_pi_fraction(1, 6), Number::Exact(Rational::from_ratio(1, 2)));
        assert!(!cos_two_pi_fraction(1, 5).is_exact());
        assert_eq!(sin_two_pi_fraction(1, 4), Number::integer(1));
        assert_eq!(sin_two_pi_fraction(1, 12), Number::Exact(Rational::from_ratio(1, 2)));
        assert!(!sin_two_pi_fraction(1, 3).is_exact());
        let z = sin_two_pi_fraction(1, 8).to_complex().re;
        assert!((z - libm::sqrt(0.5)).abs() < 1e-15);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(1, 2), Number::integer(-1));
        let i = root_of_unity(1, 4);
        assert!(!i.is_exact());
        assert!((i.to_complex() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(1.5, 0.0)), "1.5");
        assert_eq!(format_complex(Complex64::new(1.0, -2.0)), "1.0-2.0i");
        assert_eq!(format_complex(Complex64::new(0.0, 0.25)), "0.0+0.25i");
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(3) << 2000usize;
        let q = Rational::new(big.clone(), big * BigInt::from(2));
        assert_eq!(rational_to_f64(&q), 0.5);
    }
}
