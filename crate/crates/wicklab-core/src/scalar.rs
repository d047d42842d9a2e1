//! Coefficient backends for the polynomial algebra.
//!
//! Four scalar types implement [`Scalar`]:
//!
//! * [`Exact`] — exact arithmetic in ℚ(√2): values a + b·√2 with rational
//!   a, b backed by 128-bit integers. Ladder operators carry √2 factors, so
//!   plain rationals would not stay closed under them; adjoining √2 keeps
//!   every identity test literal. Overflow checks are enabled in all build
//!   profiles: an exact value silently wrapping would defeat the point.
//! * [`ExactC`] — the complexification `Complex<Exact>`, used wherever the
//!   imaginary unit enters (momentum fields, commutators).
//! * `f64` and `Complex64` — floating-point backends for truncation and
//!   quadrature work.
//!
//! Real backends return `None` from [`Scalar::imag_unit`]; operations that
//! need i report [`Error::NoImaginaryUnit`](crate::Error::NoImaginaryUnit)
//! instead of silently dropping terms.

use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::{Num, One, Zero};
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

/// Rational numbers over 128-bit integers.
pub type Rational = Ratio<i128>;

/// The complexified exact backend ℚ(√2) + i·ℚ(√2).
pub type ExactC = Complex<Exact>;

/// Largest n for which n! is computed exactly (33! < 2¹²⁷ < 34!).
pub const MAX_EXACT_DEGREE: u32 = 33;

/// Render a scalar for diagnostics, dropping a zero imaginary part so
/// witnesses on complex backends read like their real counterparts.
pub fn display_compact<S: Scalar>(value: &S) -> String {
    let s = value.to_string();
    s.strip_suffix("+0i")
        .or_else(|| s.strip_suffix("-0i"))
        .map(str::to_string)
        .unwrap_or(s)
}

/// n! as a [`Rational`]; panics beyond [`MAX_EXACT_DEGREE`], which the
/// degree caps keep unreachable.
pub fn factorial(n: u32) -> Rational {
    assert!(
        n <= MAX_EXACT_DEGREE,
        "factorial({n}) exceeds the exact integer range; degree caps keep this unreachable"
    );
    let mut acc: i128 = 1;
    for k in 2..=i128::from(n) {
        acc *= k;
    }
    Rational::from_integer(acc)
}

/// Operations every coefficient backend provides.
///
/// The trait is deliberately small: ring operations via the `std::ops`
/// bounds, a handful of constructors, conjugation, and the two partial
/// constructors ([`imag_unit`](Self::imag_unit),
/// [`sqrt_ratio`](Self::sqrt_ratio)) whose availability distinguishes the
/// backends.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
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
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// Exact test against zero (floats compare bitwise against 0.0; no
    /// tolerance is applied, so tiny numerical residues are preserved).
    fn is_zero(&self) -> bool;
    /// The rational num/den (den ≠ 0).
    fn from_ratio(num: i128, den: i128) -> Self;
    /// Embed a [`Rational`].
    fn from_rational(r: Rational) -> Self;
    /// The value √2.
    fn sqrt2() -> Self;
    /// The imaginary unit, when the backend has one.
    fn imag_unit() -> Option<Self>;
    /// Complex conjugate (identity on real backends).
    fn conj(&self) -> Self;
    /// Whether the value is real (always true on real backends).
    fn is_real_value(&self) -> bool;
    /// Lossy view as a double-precision complex number.
    fn to_c64(&self) -> Complex64;
    /// √(num/den) when representable in this backend: exact backends
    /// represent it iff num·den is a perfect square or twice one; float
    /// backends always succeed. `num = 0` yields zero.
    fn sqrt_ratio(num: u128, den: u128) -> Option<Self>;
    /// Short backend name used in reports.
    fn backend_name() -> &'static str;
}

// ---------------------------------------------------------------------------
// Exact: a + b√2 over 128-bit rationals
// ---------------------------------------------------------------------------

/// An element a + b·√2 of ℚ(√2) with [`Rational`] coordinates.
///
/// The type is a field: addition, multiplication, and division by nonzero
/// elements stay inside it ((a+b√2)⁻¹ = (a−b√2)/(a²−2b²), and a²−2b² = 0
/// only at zero because √2 is irrational). Ordering is the order inherited
/// from ℝ, decided exactly by sign analysis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Exact {
    /// Rational coordinate a.
    pub a: Rational,
    /// Coordinate b of √2.
    pub b: Rational,
}

impl Exact {
    /// a + b·√2.
    pub fn new(a: Rational, b: Rational) -> Self {
        Exact { a, b }
    }

    /// The rational value n.
    pub fn from_integer(n: i128) -> Self {
        Exact {
            a: Rational::from_integer(n),
            b: Rational::zero(),
        }
    }

    /// Embed a rational number.
    pub fn from_rational(r: Rational) -> Self {
        Exact {
            a: r,
            b: Rational::zero(),
        }
    }

    /// Numerical value as f64.
    pub fn to_f64(self) -> f64 {
        ratio_to_f64(self.a) + ratio_to_f64(self.b) * std::f64::consts::SQRT_2
    }

    /// Exact sign of the real number a + b√2 (−1, 0, or +1).
    pub fn signum(self) -> i8 {
        let sa = self.a.numer().signum();
        let sb = self.b.numer().signum();
        match (sa, sb) {
            (0, 0) => 0,
            (sa, sb) if sa >= 0 && sb >= 0 => 1,
            (sa, sb) if sa <= 0 && sb <= 0 => -1,
            // Mixed signs: compare a² with 2b²; a + b√2 and a − b√2 have the
            // same product a² − 2b², whose sign is decided by the larger
            // magnitude side.
            (1, -1) => {
                let d = self.a * self.a - Rational::from_integer(2) * self.b * self.b;
                d.numer().signum() as i8
            }
            (-1, 1) => {
                let d = Rational::from_integer(2) * self.b * self.b - self.a * self.a;
                d.numer().signum() as i8
            }
            _ => unreachable!("sign analysis covers all cases"),
        }
    }

    /// Absolute value.
    pub fn abs(self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self
        }
    }

    /// Exact conversion of a finite f64 (every finite f64 is a dyadic
    /// rational m·2^e). Returns `None` for non-finite inputs or exponents
    /// outside the i128 range of the backing rationals.
    pub fn from_f64_dyadic(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Exact::default());
        }
        let bits = x.to_bits();
        let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let fraction = (bits & ((1u64 << 52) - 1)) as i128;
        let (mantissa, exponent) = if biased == 0 {
            (fraction, -1074i64) // subnormal
        } else {
            (fraction | (1i128 << 52), biased - 1075)
        };
        let value = if exponent >= 0 {
            if exponent > 70 {
                return None; // mantissa << exponent would overflow i128
            }
            Rational::from_integer(sign * (mantissa << exponent))
        } else {
            if exponent < -120 {
                return None; // denominator 2^(−e) would overflow i128
            }
            Rational::new(sign * mantissa, 1i128 << (-exponent))
        };
        Some(Exact::from_rational(value))
    }

    /// √(num/den) in ℚ(√2) when it exists: with m = num·den, the root is
    /// √m/den, and √m lies in ℚ(√2) iff m is a square s² (root s/den) or
    /// twice a square 2t² (root (t/den)·√2).
    pub fn sqrt_of_ratio(num: u128, den: u128) -> Option<Self> {
        assert!(den != 0, "sqrt_of_ratio denominator must be nonzero");
        if num == 0 {
            return Some(Exact::default());
        }
        let m = num.checked_mul(den)?;
        let den_i = i128::try_from(den).ok()?;
        let s = isqrt_u128(m);
        if s * s == m {
            return Some(Exact::from_rational(Rational::new(
                i128::try_from(s).ok()?,
                den_i,
            )));
        }
        if m % 2 == 0 {
            let half = m / 2;
            let t = isqrt_u128(half);
            if t * t == half {
                return Some(Exact::new(
                    Rational::zero(),
                    Rational::new(i128::try_from(t).ok()?, den_i),
                ));
            }
        }
        None
    }
}

/// Integer square root (floor) of a u128.
fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exact({self})")
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let az = self.a.is_zero();
        let bz = self.b.is_zero();
        match (az, bz) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) => {
                if self.b.numer().signum() >= 0 {
                    write!(f, "{}+{}√2", self.a, self.b)
                } else {
                    write!(f, "{}{}√2", self.a, self.b)
                }
            }
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        // (a + b√2)(c + d√2) = ac + 2bd + (ad + bc)√2
        Exact::new(
            self.a * rhs.a + Rational::from_integer(2) * self.b * rhs.b,
            self.a * rhs.b + self.b * rhs.a,
        )
    }
}

impl Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        // Multiply by the algebraic conjugate: (c + d√2)(c − d√2) = c² − 2d².
        let denom = rhs.a * rhs.a - Rational::from_integer(2) * rhs.b * rhs.b;
        assert!(!denom.is_zero(), "division by zero in ℚ(√2)");
        let num = self * Exact::new(rhs.a, -rhs.b);
        Exact::new(num.a / denom, num.b / denom)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact::new(-self.a, -self.b)
    }
}

impl Rem for Exact {
    type Output = Exact;
    // Exact division in a field leaves no remainder; defined so that
    // Complex<Exact> satisfies the numeric trait bounds. The division is
    // kept so that x % 0 panics like x / 0 would.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn rem(self, rhs: Exact) -> Exact {
        let _ = self / rhs;
        Exact::default()
    }
}

impl AddAssign for Exact {
    fn add_assign(&mut self, rhs: Exact) {
        *self = *self + rhs;
    }
}
impl SubAssign for Exact {
    fn sub_assign(&mut self, rhs: Exact) {
        *self = *self - rhs;
    }
}
impl MulAssign for Exact {
    fn mul_assign(&mut self, rhs: Exact) {
        *self = *self * rhs;
    }
}
impl DivAssign for Exact {
    fn div_assign(&mut self, rhs: Exact) {
        *self = *self / rhs;
    }
}
impl RemAssign for Exact {
    fn rem_assign(&mut self, rhs: Exact) {
        *self = *self % rhs;
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Exact) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Exact) -> std::cmp::Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl Zero for Exact {
    fn zero() -> Self {
        Exact::default()
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Exact {
    fn one() -> Self {
        Exact::from_integer(1)
    }
}

impl Num for Exact {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        i128::from_str_radix(s, radix).map(Exact::from_integer)
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::default()
    }
    fn one() -> Self {
        Exact::from_integer(1)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_ratio(num: i128, den: i128) -> Self {
        Exact::from_rational(Rational::new(num, den))
    }
    fn from_rational(r: Rational) -> Self {
        Exact::from_rational(r)
    }
    fn sqrt2() -> Self {
        Exact::new(Rational::zero(), Rational::one())
    }
    fn imag_unit() -> Option<Self> {
        None
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_real_value(&self) -> bool {
        true
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn sqrt_ratio(num: u128, den: u128) -> Option<Self> {
        Exact::sqrt_of_ratio(num, den)
    }
    fn backend_name() -> &'static str {
        "exact"
    }
}

// ---------------------------------------------------------------------------
// Complex<Exact>
// ---------------------------------------------------------------------------

impl Scalar for ExactC {
    fn zero() -> Self {
        Complex::new(Exact::default(), Exact::default())
    }
    fn one() -> Self {
        Complex::new(Exact::from_integer(1), Exact::default())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn from_ratio(num: i128, den: i128) -> Self {
        Complex::new(<Exact as Scalar>::from_ratio(num, den), Exact::default())
    }
    fn from_rational(r: Rational) -> Self {
        Complex::new(Exact::from_rational(r), Exact::default())
    }
    fn sqrt2() -> Self {
        Complex::new(<Exact as Scalar>::sqrt2(), Exact::default())
    }
    fn imag_unit() -> Option<Self> {
        Some(Complex::new(Exact::default(), Exact::from_integer(1)))
    }
    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn is_real_value(&self) -> bool {
        Zero::is_zero(&self.im)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn sqrt_ratio(num: u128, den: u128) -> Option<Self> {
        Exact::sqrt_of_ratio(num, den).map(|r| Complex::new(r, Exact::default()))
    }
    fn backend_name() -> &'static str {
        "exact-complex"
    }
}

// ---------------------------------------------------------------------------
// f64 / Complex64
// ---------------------------------------------------------------------------

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_ratio(num: i128, den: i128) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: Rational) -> Self {
        ratio_to_f64(r)
    }
    fn sqrt2() -> Self {
        std::f64::consts::SQRT_2
    }
    fn imag_unit() -> Option<Self> {
        None
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_real_value(&self) -> bool {
        true
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn sqrt_ratio(num: u128, den: u128) -> Option<Self> {
        Some((num as f64 / den as f64).sqrt())
    }
    fn backend_name() -> &'static str {
        "f64"
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_ratio(num: i128, den: i128) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_rational(r: Rational) -> Self {
        Complex64::new(ratio_to_f64(r), 0.0)
    }
    fn sqrt2() -> Self {
        Complex64::new(std::f64::consts::SQRT_2, 0.0)
    }
    fn imag_unit() -> Option<Self> {
        Some(Complex64::new(0.0, 1.0))
    }
    fn conj(&self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    fn is_real_value(&self) -> bool {
        self.im == 0.0
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn sqrt_ratio(num: u128, den: u128) -> Option<Self> {
        Some(Complex64::new((num as f64 / den as f64).sqrt(), 0.0))
    }
    fn backend_name() -> &'static str {
        "c64"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn field_arithmetic_in_q_sqrt2() {
        let x = Exact::new(q(1, 2), q(3, 1)); // 1/2 + 3√2
        let y = Exact::new(q(-2, 1), q(1, 4)); // −2 + (1/4)√2
                                               // (1/2 + 3√2)(−2 + (1/4)√2) = −1 + 3/2 + (1/8 − 6)√2
        let p = x * y;
        assert_eq!(p, Exact::new(q(1, 2), q(-47, 8)));
        // Division inverts multiplication exactly.
        assert_eq!(p / y, x);
        assert_eq!((x - x), Exact::default());
        // √2·√2 = 2.
        let r2 = <Exact as Scalar>::sqrt2();
        assert_eq!(r2 * r2, Exact::from_integer(2));
    }

    #[test]
    fn exact_ordering_matches_real_numbers() {
        // 3/2 < √2·(4/3) ⇔ 9/4 < 32/9 — true.
        let lhs = Exact::from_rational(q(3, 2));
        let rhs = Exact::new(Rational::zero(), q(4, 3));
        assert!(lhs < rhs);
        // 3 > 2√2 ⇔ 9 > 8 — true, and the gap is tiny.
        assert!(Exact::from_integer(3) > Exact::new(Rational::zero(), q(2, 1)));
        // −1 − √2 < 0 < 1 + √2.
        let neg = Exact::new(q(-1, 1), q(-1, 1));
        assert_eq!(neg.signum(), -1);
        assert_eq!(neg.abs().signum(), 1);
        assert_eq!(Exact::default().signum(), 0);
    }

    #[test]
    fn sqrt_ratio_representability() {
        // √(2/1) = √2.
        assert_eq!(Exact::sqrt_of_ratio(2, 1), Some(<Exact as Scalar>::sqrt2()));
        // √(4/9) = 2/3.
        assert_eq!(
            Exact::sqrt_of_ratio(4, 9),
            Some(Exact::from_rational(q(2, 3)))
        );
        // √(8/1) = 2√2; √(1/2) = √2/2 (num·den = 2).
        assert_eq!(
            Exact::sqrt_of_ratio(8, 1),
            Some(Exact::new(Rational::zero(), q(2, 1)))
        );
        assert_eq!(
            Exact::sqrt_of_ratio(1, 2),
            Some(Exact::new(Rational::zero(), q(1, 2)))
        );
        // √3, √(4/3) are outside ℚ(√2): the square-free part 3 survives.
        assert_eq!(Exact::sqrt_of_ratio(3, 1), None);
        assert_eq!(Exact::sqrt_of_ratio(4, 3), None);
        // Occupation scale factors 2^r/r!: representable exactly for r ≤ 2.
        assert_eq!(Exact::sqrt_of_ratio(1, 1), Some(Exact::from_integer(1)));
        assert_eq!(Exact::sqrt_of_ratio(4, 2), Some(<Exact as Scalar>::sqrt2()));
        assert_eq!(Exact::sqrt_of_ratio(8, 6), None);
        assert_eq!(Exact::sqrt_of_ratio(16, 24), None);
        // Value check on the float side.
        let v = <f64 as Scalar>::sqrt_ratio(8, 6).unwrap();
        assert!((v - (8f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dyadic_f64_conversion_is_exact() {
        for &x in &[0.0, 1.0, -3.5, 0.375, 2048.0, -1.0 / 1024.0] {
            let e = Exact::from_f64_dyadic(x).unwrap();
            assert_eq!(e.to_f64(), x);
            assert!(Scalar::is_real_value(&e));
        }
        assert_eq!(Exact::from_f64_dyadic(f64::NAN), None);
        assert_eq!(Exact::from_f64_dyadic(f64::INFINITY), None);
        // 0.1 converts to the dyadic the float parser produced, exactly.
        let tenth = Exact::from_f64_dyadic(0.1).unwrap();
        assert_eq!(tenth.to_f64(), 0.1);
    }

    #[test]
    fn complexified_backend_has_imaginary_unit() {
        let i = <ExactC as Scalar>::imag_unit().unwrap();
        assert_eq!(i * i, -<ExactC as Scalar>::one());
        assert!(!Scalar::is_real_value(&i));
        assert_eq!(Scalar::conj(&i), -i);
        let z = ExactC::new(Exact::from_integer(3), Exact::from_integer(-2));
        assert_eq!(Scalar::conj(&z) * z, ExactC::from_ratio(13, 1));
        assert_eq!(z.to_c64(), Complex64::new(3.0, -2.0));
    }

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), Rational::from_integer(1));
        assert_eq!(factorial(1), Rational::from_integer(1));
        assert_eq!(factorial(5), Rational::from_integer(120));
        assert_eq!(
            factorial(20),
            Rational::from_integer(2_432_902_008_176_640_000)
        );
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt_u128(0), 0);
        assert_eq!(isqrt_u128(1), 1);
        assert_eq!(isqrt_u128(2), 1);
        assert_eq!(isqrt_u128(15), 3);
        assert_eq!(isqrt_u128(16), 4);
        let big = (1u128 << 100) + 12345;
        let r = isqrt_u128(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }
}
