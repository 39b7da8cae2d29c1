//! Coefficient rings shared by the symbolic and numeric layers.
//!
//! Three backends implement [`Scalar`]:
//! - [`ExactComplex`]: complex numbers with arbitrary-precision rational parts.
//! - [`Complex64`]: ordinary floating point.
//! - [`QuadSurd`]: exact complex numbers in `Q(sqrt(d))[i]` for a single radicand `d`,
//!   enough to carry the `(1+θ²)^{1/2}` scale of the deformed oscillator without rounding.

use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

pub type Rational = BigRational;
pub type ExactComplex = Complex<BigRational>;

/// Build an exact rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Convert an `f64` to the exact rational with the same binary value.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    // numerator/denominator may each overflow f64 while the ratio does not
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
            let scale = BigInt::one() << shift.max(0) as usize;
            let n = (r.numer() / &scale).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() / &scale).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

fn rational_json(r: &Rational) -> (Value, Value) {
    (
        Value::String(r.numer().to_string()),
        Value::String(r.denom().to_string()),
    )
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt_exact(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Ring operations needed by the operator calculus.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// True for backends where equality is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn recip(&self) -> Option<Self>;
    /// Square root of a real, nonnegative value when representable in this backend.
    fn real_sqrt(&self) -> Option<Self>;
    fn to_c64(&self) -> Complex64;
    fn to_json(&self) -> Value;
    /// Compact human-readable form, e.g. `3/2`, `(i/2)`, `(1 + 2i)`.
    fn fmt_coeff(&self) -> String;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&rat(n, d))
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.recip().map(|r| self.mul(&r))
    }
    fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }
    /// Convert from an `f64`; exact backends store the binary value exactly.
    fn from_f64(x: f64) -> Self {
        Self::from_rational(&rational_from_f64(x).expect("finite value"))
    }
}

impl Scalar for ExactComplex {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(Rational::zero(), Rational::zero())
    }
    fn one() -> Self {
        Complex::new(Rational::one(), Rational::zero())
    }
    fn i() -> Self {
        Complex::new(Rational::zero(), Rational::one())
    }
    fn from_rational(r: &Rational) -> Self {
        Complex::new(r.clone(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn recip(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
    fn real_sqrt(&self) -> Option<Self> {
        if !self.im.is_zero() {
            return None;
        }
        rational_sqrt_exact(&self.re).map(|r| Complex::new(r, Rational::zero()))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn to_json(&self) -> Value {
        let (rn, rd) = rational_json(&self.re);
        let (i_n, i_d) = rational_json(&self.im);
        Value::Array(vec![rn, rd, i_n, i_d])
    }
    fn fmt_coeff(&self) -> String {
        fmt_complex_parts(
            &self.re,
            &self.im,
            fmt_rational,
            |r| r.is_zero(),
            |r| r.is_one(),
            |r| r.is_negative(),
        )
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn recip(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
    fn real_sqrt(&self) -> Option<Self> {
        (self.im == 0.0 && self.re >= 0.0).then(|| Complex64::new(self.re.sqrt(), 0.0))
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn to_json(&self) -> Value {
        serde_json::json!([self.re, self.im])
    }
    fn fmt_coeff(&self) -> String {
        fmt_complex_parts(
            &self.re,
            &self.im,
            |x| format!("{x}"),
            |x| *x == 0.0,
            |x| *x == 1.0,
            |x| *x < 0.0,
        )
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Shared formatting for `re + im·i`.
fn fmt_complex_parts<T>(
    re: &T,
    im: &T,
    show: impl Fn(&T) -> String,
    is_zero: impl Fn(&T) -> bool,
    is_one: impl Fn(&T) -> bool,
    is_neg: impl Fn(&T) -> bool,
) -> String {
    if is_zero(im) {
        return show(re);
    }
    let imag = {
        let s = show(im);
        let (sign, mag) = match s.strip_prefix('-') {
            Some(rest) => ("-", rest.to_string()),
            None => ("", s),
        };
        let body = if is_one(im) || mag == "1" {
            "i".to_string()
        } else if let Some((n, d)) = mag.split_once('/') {
            if n == "1" {
                format!("i/{d}")
            } else {
                format!("{n}i/{d}")
            }
        } else {
            format!("{mag}i")
        };
        (sign, body)
    };
    if is_zero(re) {
        let (sign, body) = imag;
        if body == "i" || !body.contains('/') {
            format!("{sign}{body}")
        } else {
            format!("{sign}({body})")
        }
    } else {
        let (sign, body) = imag;
        let op = if sign == "-" || is_neg(im) { "-" } else { "+" };
        format!("({} {} {})", show(re), op, body)
    }
}

/// An exact element `(a + b√d) + i(c + e√d)` of `Q(√d)[i]`.
///
/// Values with no irrational part carry `d = 0` so they mix freely with any radicand.
/// Combining two values with different nonzero radicands is a logic error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    d: Rational,
    re: (Rational, Rational),
    im: (Rational, Rational),
}

impl fmt::Debug for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_coeff())
    }
}

/// Split a positive integer into `k² · s` with `s` free of small square factors.
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut s = n.clone();
    let r = s.sqrt();
    if &r * &r == s {
        return (r, BigInt::one());
    }
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while p < limit && &p * &p <= s {
        let pp = &p * &p;
        while (&s % &pp).is_zero() {
            s /= &pp;
            k *= &p;
        }
        p += 1;
    }
    (k, s)
}

impl QuadSurd {
    fn canon(mut self) -> Self {
        if self.re.1.is_zero() && self.im.1.is_zero() {
            self.d = Rational::zero();
        }
        self
    }

    pub fn from_parts(d: Rational, re: (Rational, Rational), im: (Rational, Rational)) -> Self {
        QuadSurd { d, re, im }.canon()
    }

    /// Exact `√r` for a nonnegative rational, reduced to a square-free integer radicand.
    pub fn sqrt_rational(r: &Rational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if let Some(s) = rational_sqrt_exact(r) {
            return Some(Self::from_rational(&s));
        }
        // √(p/q) = √(pq)/q
        let pq = r.numer() * r.denom();
        let (k, s) = square_split(&pq);
        let coef = Rational::new(k, r.denom().clone());
        Some(QuadSurd {
            d: Rational::from_integer(s),
            re: (Rational::zero(), coef),
            im: (Rational::zero(), Rational::zero()),
        })
    }

    pub fn radicand(&self) -> &Rational {
        &self.d
    }

    fn common_d(&self, o: &Self) -> Rational {
        match (self.d.is_zero(), o.d.is_zero()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(
                    self.d, o.d,
                    "mixing quadratic surds with different radicands"
                );
                self.d.clone()
            }
        }
    }

    fn rmul(
        d: &Rational,
        x: &(Rational, Rational),
        y: &(Rational, Rational),
    ) -> (Rational, Rational) {
        (&x.0 * &y.0 + &x.1 * &y.1 * d, &x.0 * &y.1 + &x.1 * &y.0)
    }

    fn radd(x: &(Rational, Rational), y: &(Rational, Rational)) -> (Rational, Rational) {
        (&x.0 + &y.0, &x.1 + &y.1)
    }

    fn rsub(x: &(Rational, Rational), y: &(Rational, Rational)) -> (Rational, Rational) {
        (&x.0 - &y.0, &x.1 - &y.1)
    }

    fn rinv(d: &Rational, x: &(Rational, Rational)) -> Option<(Rational, Rational)> {
        let norm = &x.0 * &x.0 - &x.1 * &x.1 * d;
        if norm.is_zero() {
            return None;
        }
        Some((&x.0 / &norm, -&x.1 / &norm))
    }

    fn real_f64(d: &Rational, x: &(Rational, Rational)) -> f64 {
        rational_to_f64(&x.0) + rational_to_f64(&x.1) * rational_to_f64(d).sqrt()
    }

    fn is_real(&self) -> bool {
        self.im.0.is_zero() && self.im.1.is_zero()
    }

    fn fmt_real(d: &Rational, x: &(Rational, Rational)) -> String {
        if x.1.is_zero() {
            return fmt_rational(&x.0);
        }
        let rad = format!("√{}", fmt_rational(d));
        let irr = if x.1.is_one() {
            rad
        } else {
            format!("{}{}", fmt_rational(&x.1), rad)
        };
        if x.0.is_zero() {
            irr
        } else {
            format!("{} + {}", fmt_rational(&x.0), irr)
        }
    }
}

impl Scalar for QuadSurd {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::from_rational(&Rational::zero())
    }
    fn one() -> Self {
        Self::from_rational(&Rational::one())
    }
    fn i() -> Self {
        QuadSurd {
            d: Rational::zero(),
            re: (Rational::zero(), Rational::zero()),
            im: (Rational::one(), Rational::zero()),
        }
    }
    fn from_rational(r: &Rational) -> Self {
        QuadSurd {
            d: Rational::zero(),
            re: (r.clone(), Rational::zero()),
            im: (Rational::zero(), Rational::zero()),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.0.is_zero() && self.re.1.is_zero() && self.im.0.is_zero() && self.im.1.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QuadSurd {
            d: self.common_d(o),
            re: Self::radd(&self.re, &o.re),
            im: Self::radd(&self.im, &o.im),
        }
        .canon()
    }
    fn sub(&self, o: &Self) -> Self {
        QuadSurd {
            d: self.common_d(o),
            re: Self::rsub(&self.re, &o.re),
            im: Self::rsub(&self.im, &o.im),
        }
        .canon()
    }
    fn mul(&self, o: &Self) -> Self {
        let d = self.common_d(o);
        let re = Self::rsub(
            &Self::rmul(&d, &self.re, &o.re),
            &Self::rmul(&d, &self.im, &o.im),
        );
        let im = Self::radd(
            &Self::rmul(&d, &self.re, &o.im),
            &Self::rmul(&d, &self.im, &o.re),
        );
        QuadSurd { d, re, im }.canon()
    }
    fn neg(&self) -> Self {
        QuadSurd {
            d: self.d.clone(),
            re: (-&self.re.0, -&self.re.1),
            im: (-&self.im.0, -&self.im.1),
        }
    }
    fn conj(&self) -> Self {
        QuadSurd {
            d: self.d.clone(),
            re: self.re.clone(),
            im: (-&self.im.0, -&self.im.1),
        }
    }
    fn recip(&self) -> Option<Self> {
        // 1/z = conj(z) / |z|², with |z|² real in Q(√d)
        let d = &self.d;
        let n2 = Self::radd(
            &Self::rmul(d, &self.re, &self.re),
            &Self::rmul(d, &self.im, &self.im),
        );
        let inv = Self::rinv(d, &n2)?;
        let c = self.conj();
        Some(
            QuadSurd {
                d: d.clone(),
                re: Self::rmul(d, &c.re, &inv),
                im: Self::rmul(d, &c.im, &inv),
            }
            .canon(),
        )
    }
    fn real_sqrt(&self) -> Option<Self> {
        if !self.is_real() || !self.re.1.is_zero() {
            return None;
        }
        Self::sqrt_rational(&self.re.0)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            Self::real_f64(&self.d, &self.re),
            Self::real_f64(&self.d, &self.im),
        )
    }
    fn to_json(&self) -> Value {
        let r = |x: &Rational| Value::String(fmt_rational(x));
        serde_json::json!({
            "radicand": r(&self.d),
            "re": [r(&self.re.0), r(&self.re.1)],
            "im": [r(&self.im.0), r(&self.im.1)],
        })
    }
    fn fmt_coeff(&self) -> String {
        let re_zero = self.re.0.is_zero() && self.re.1.is_zero();
        if self.is_real() {
            let s = Self::fmt_real(&self.d, &self.re);
            return if s.contains(" + ") {
                format!("({s})")
            } else {
                s
            };
        }
        let im = Self::fmt_real(&self.d, &self.im);
        if re_zero {
            format!("i({im})")
        } else {
            format!("({} + i({}))", Self::fmt_real(&self.d, &self.re), im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_complex_formatting() {
        assert_eq!(ExactComplex::ratio(3, 2).fmt_coeff(), "3/2");
        assert_eq!(
            ExactComplex::i()
                .mul(&ExactComplex::ratio(1, 2))
                .fmt_coeff(),
            "(i/2)"
        );
        assert_eq!(ExactComplex::i().neg().fmt_coeff(), "-i");
        assert_eq!(
            ExactComplex::i()
                .mul(&ExactComplex::from_int(3))
                .fmt_coeff(),
            "3i"
        );
        let z = <ExactComplex as Scalar>::one()
            .add(&ExactComplex::i().mul(&ExactComplex::ratio(-3, 4)));
        assert_eq!(z.fmt_coeff(), "(1 - 3i/4)");
    }

    #[test]
    fn surd_arithmetic_is_exact() {
        let s = QuadSurd::sqrt_rational(&rat(5, 4)).unwrap();
        // √(5/4) = √5 / 2
        assert_eq!(s.radicand(), &rat(5, 1));
        assert_eq!(s.mul(&s), QuadSurd::ratio(5, 4));
        let inv = s.recip().unwrap();
        assert_eq!(inv.mul(&s), <QuadSurd as Scalar>::one());
        let z = s.add(&QuadSurd::i());
        assert_eq!(z.mul(&z.recip().unwrap()), QuadSurd::one());
        assert!((s.to_c64().re - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn surd_square_part_extracted() {
        let s = QuadSurd::sqrt_rational(&rat(8, 1)).unwrap();
        assert_eq!(s.radicand(), &rat(2, 1));
        assert_eq!(
            QuadSurd::sqrt_rational(&rat(9, 4)).unwrap(),
            QuadSurd::ratio(3, 2)
        );
    }

    #[test]
    #[should_panic(expected = "different radicands")]
    fn surd_radicand_mismatch_panics() {
        let a = QuadSurd::sqrt_rational(&rat(2, 1)).unwrap();
        let b = QuadSurd::sqrt_rational(&rat(3, 1)).unwrap();
        let _ = a.add(&b);
    }

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let big = BigInt::one() << 2000;
        let r = Rational::new(&big * 3 + 1, &big * 2);
        assert_eq!(rational_to_f64(&r), 1.5);
    }
}
