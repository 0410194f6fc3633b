//! Numeric backends.
//!
//! Every algorithm in this crate is written once against [`Field`] (exact
//! ordered field operations) or [`Real`] (adds square roots, rounding and
//! conversions). Three backends are provided: `f64`, [`BigReal`] (binary
//! arbitrary precision on top of `astro-float`) and `BigRational` (exact,
//! `Field` only).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default mantissa size of the big-float backend, in bits.
pub const DEFAULT_PREC: usize = 256;
/// Largest precision the automatic escalation will request.
pub const MAX_PREC: usize = 8192;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

/// Ordered field operations shared by all backends.
pub trait Field:
    Clone
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Integer constant at the given precision (ignored by exact backends).
    fn from_i64(v: i64, prec: usize) -> Self;
    /// Working precision in bits; `usize::MAX` for exact arithmetic.
    fn prec(&self) -> usize;
    fn sign(&self) -> Ordering;

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    /// Constant with the same precision as `self`.
    fn int(&self, v: i64) -> Self {
        Self::from_i64(v, self.prec())
    }
    fn recip(&self) -> Self {
        self.int(1) / self.clone()
    }
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
    fn powi(&self, n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.int(1);
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.square();
            n >>= 1;
        }
        acc
    }
}

/// Real-number backends (inexact).
pub trait Real: Field {
    fn from_f64(v: f64, prec: usize) -> Self;
    fn from_big(v: &BigReal) -> Self;
    fn to_big(&self) -> BigReal;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn cbrt(&self) -> Self;
    fn abs(&self) -> Self;
    /// Largest integer not above `self`, as a backend value.
    fn floor(&self) -> Self;
    /// `2^e` at the precision of `self`.
    fn pow2(&self, e: i32) -> Self;
    /// Decimal rendering carrying the backend's precision.
    fn to_decimal(&self) -> String;

    /// Threshold below which a value is treated as numerically zero:
    /// 2^-40 for `f64`, 2^-(prec/2) for big floats.
    fn guard(&self) -> Self {
        let p = self.prec();
        if p <= 53 {
            self.pow2(-40)
        } else {
            self.pow2(-((p / 2) as i32))
        }
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_f64() as i64
    }
}

impl Field for f64 {
    fn from_i64(v: i64, _prec: usize) -> Self {
        v as f64
    }
    fn prec(&self) -> usize {
        53
    }
    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
}

impl Real for f64 {
    fn from_f64(v: f64, _prec: usize) -> Self {
        v
    }
    fn from_big(v: &BigReal) -> Self {
        v.to_f64()
    }
    fn to_big(&self) -> BigReal {
        BigReal::from_f64(*self, 64)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn cbrt(&self) -> Self {
        f64::cbrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn pow2(&self, e: i32) -> Self {
        2f64.powi(e)
    }
    fn to_decimal(&self) -> String {
        format!("{self:?}")
    }
}

impl Field for BigRational {
    fn from_i64(v: i64, _prec: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn prec(&self) -> usize {
        usize::MAX
    }
    fn sign(&self) -> Ordering {
        if Zero::is_zero(self) {
            Ordering::Equal
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn int(&self, v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Arbitrary-precision binary float with its working precision attached.
///
/// Binary operations round to the larger precision of the two operands.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    p: usize,
}

impl BigReal {
    pub fn from_f64(v: f64, prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_f64(v, prec.max(64)),
            p: prec.max(64),
        }
    }

    pub fn from_int(v: i64, prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_i64(v, prec.max(64)),
            p: prec.max(64),
        }
    }

    /// Parses a decimal literal, correctly rounded to `prec` bits.
    pub fn parse_decimal(s: &str, prec: usize) -> Option<Self> {
        let p = prec.max(64);
        let v = CONSTS.with(|cc| BigFloat::parse(s, Radix::Dec, p, RM, &mut cc.borrow_mut()));
        if v.is_nan() || v.is_inf() {
            None
        } else {
            Some(BigReal { v, p })
        }
    }

    /// Exact value of a rational, rounded to `prec` bits.
    pub fn from_rational(r: &BigRational, prec: usize) -> Self {
        let p = prec.max(64);
        let n = Self::from_bigint(r.numer(), p);
        let d = Self::from_bigint(r.denom(), p);
        n / d
    }

    fn from_bigint(n: &BigInt, p: usize) -> Self {
        let s = n.to_string();
        BigReal::parse_decimal(&s, p + 64)
            .expect("integer literal")
            .with_prec(p)
    }

    /// Same value rounded (or exactly widened) to a new precision.
    pub fn with_prec(&self, prec: usize) -> Self {
        let p = prec.max(64);
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("precision change");
        BigReal { v, p }
    }

    pub fn inner(&self) -> &BigFloat {
        &self.v
    }

    /// Binary exponent `e` with `|x| in [2^(e-1), 2^e)`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        if self.v.is_zero() {
            None
        } else {
            self.v.exponent()
        }
    }

    /// Decimal string with `digits` significant digits.
    pub fn to_sig_digits(&self, digits: usize) -> String {
        // bits needed for the requested digits, plus slack
        let bits = ((digits as f64) * 3.33) as usize + 16;
        let r = self.with_prec(bits.min(self.p).max(64));
        let s = CONSTS
            .with(|cc| r.v.format(Radix::Dec, RM, &mut cc.borrow_mut()))
            .unwrap_or_else(|_| "NaN".into());
        trim_mantissa(&s, digits)
    }

    fn bin(&self, o: &Self, f: fn(&BigFloat, &BigFloat, usize, RoundingMode) -> BigFloat) -> Self {
        let p = self.p.max(o.p);
        BigReal {
            v: f(&self.v, &o.v, p, RM),
            p,
        }
    }
}

fn trim_mantissa(s: &str, digits: usize) -> String {
    // astro-float renders "d.ddddde+x"; keep `digits` significant digits
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let (sign, body) = if let Some(b) = mant.strip_prefix('-') {
        ("-", b)
    } else {
        ("", mant)
    };
    let mut out = String::from(sign);
    let mut count = 0;
    for c in body.chars() {
        if c == '.' {
            out.push(c);
            continue;
        }
        if count >= digits {
            break;
        }
        out.push(c);
        count += 1;
    }
    if out.ends_with('.') {
        out.pop();
    }
    out.push_str(exp);
    out
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

impl Add for BigReal {
    type Output = BigReal;
    fn add(self, o: BigReal) -> BigReal {
        self.bin(&o, BigFloat::add)
    }
}

impl Sub for BigReal {
    type Output = BigReal;
    fn sub(self, o: BigReal) -> BigReal {
        self.bin(&o, BigFloat::sub)
    }
}

impl Mul for BigReal {
    type Output = BigReal;
    fn mul(self, o: BigReal) -> BigReal {
        self.bin(&o, BigFloat::mul)
    }
}

impl Div for BigReal {
    type Output = BigReal;
    fn div(self, o: BigReal) -> BigReal {
        self.bin(&o, BigFloat::div)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            v: self.v.neg(),
            p: self.p,
        }
    }
}

impl Field for BigReal {
    fn from_i64(v: i64, prec: usize) -> Self {
        BigReal::from_int(v, prec)
    }
    fn prec(&self) -> usize {
        self.p
    }
    fn sign(&self) -> Ordering {
        if self.v.is_zero() {
            Ordering::Equal
        } else if self.v.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn recip(&self) -> Self {
        BigReal {
            v: self.v.reciprocal(self.p, RM),
            p: self.p,
        }
    }
    fn powi(&self, n: u64) -> Self {
        BigReal {
            v: self.v.powi(n as usize, self.p, RM),
            p: self.p,
        }
    }
}

impl Real for BigReal {
    fn from_f64(v: f64, prec: usize) -> Self {
        BigReal::from_f64(v, prec)
    }
    fn from_big(v: &BigReal) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigReal {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        big_to_f64(&self.v)
    }
    fn sqrt(&self) -> Self {
        BigReal {
            v: self.v.sqrt(self.p, RM),
            p: self.p,
        }
    }
    fn cbrt(&self) -> Self {
        BigReal {
            v: self.v.cbrt(self.p, RM),
            p: self.p,
        }
    }
    fn abs(&self) -> Self {
        BigReal {
            v: self.v.abs(),
            p: self.p,
        }
    }
    fn floor(&self) -> Self {
        BigReal {
            v: self.v.floor(),
            p: self.p,
        }
    }
    fn pow2(&self, e: i32) -> Self {
        let mut v = BigFloat::from_i64(1, self.p);
        v.set_exponent(e + 1);
        BigReal { v, p: self.p }
    }
    fn to_decimal(&self) -> String {
        let digits = ((self.p as f64) * std::f64::consts::LOG10_2).floor() as usize;
        self.to_sig_digits(digits.max(17))
    }
}

fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf() {
        return if v.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    let Some((words, _, sign, e, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    // value = 0.m * 2^e with the most significant word last
    let n = words.len();
    let hi = words[n - 1] as f64;
    let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
    let frac = (hi + lo / 18446744073709551616.0) / 18446744073709551616.0;
    let mag = scale2(frac, e);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

fn scale2(x: f64, e: i32) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Rational to `f64` through a big float (avoids overflow of huge parts).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    BigReal::from_rational(r, 128).to_f64()
}

/// Dyadic rational nearest to a finite `f64` (exact conversion).
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Exact rational value of a big float.
pub fn big_to_rational(x: &BigReal) -> BigRational {
    if x.v.is_zero() {
        return BigRational::zero();
    }
    let Some((words, _, sign, e, _)) = x.v.as_raw_parts() else {
        return BigRational::zero();
    };
    let mut m = BigInt::zero();
    for w in words.iter().rev() {
        m = (m << 64) + BigInt::from(*w);
    }
    let shift = e as i64 - 64 * words.len() as i64;
    let mut r = BigRational::from_integer(m);
    let two = BigRational::from_integer(BigInt::from(2));
    if shift >= 0 {
        r = r * num_traits::pow(two, shift as usize);
    } else {
        r = r / num_traits::pow(two, (-shift) as usize);
    }
    if sign == Sign::Neg {
        -r
    } else {
        r
    }
}

/// Relative difference `|a-b|/|b|` in a common backend.
pub fn rel_diff<R: Real>(a: &R, b: &R) -> f64 {
    let d = (a.clone() - b.clone()).abs();
    if b.is_zero() {
        d.to_f64()
    } else {
        (d / b.abs()).to_f64()
    }
}
