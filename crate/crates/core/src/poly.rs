//! Dense univariate polynomials and rational functions over `Q`, with
//! Sturm-sequence real-root counting and isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numeric::{rational_to_f64, BigReal, Real};

/// Coefficients in ascending order; the zero polynomial has none.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    c: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { c: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    /// The variable itself.
    pub fn x() -> Self {
        Polynomial {
            c: vec![BigRational::zero(), BigRational::one()],
        }
    }

    pub fn constant(v: BigRational) -> Self {
        Polynomial::new(vec![v])
    }

    pub fn new(c: Vec<BigRational>) -> Self {
        let mut p = Polynomial { c };
        p.trim();
        p
    }

    /// From integer coefficients in ascending order.
    pub fn from_ints(c: &[i64]) -> Self {
        Polynomial::new(c.iter().map(|&v| rat(v)).collect())
    }

    /// From integer coefficients, highest degree first.
    pub fn from_ints_desc(c: &[i64]) -> Self {
        let mut v: Vec<i64> = c.to_vec();
        v.reverse();
        Polynomial::from_ints(&v)
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(Zero::is_zero) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Polynomial::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Positive multiple with coprime integer coefficients.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for a in &self.c {
            l = l.lcm(a.denom());
        }
        let ints: Vec<BigInt> = self
            .c
            .iter()
            .map(|a| (a * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for a in &ints {
            g = g.gcd(a);
        }
        Polynomial::new(
            ints.into_iter()
                .map(|a| BigRational::from_integer(a / &g))
                .collect(),
        )
    }

    /// Integer coefficients of [`Polynomial::primitive`], highest degree first, as decimal strings.
    pub fn integer_coeff_strings(&self) -> Vec<String> {
        self.primitive()
            .c
            .iter()
            .rev()
            .map(|a| a.to_integer().to_string())
            .collect()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Evaluation in a floating backend.
    pub fn eval_real<R: Real>(&self, x: &R) -> R {
        let mut acc = x.int(0);
        for a in self.c.iter().rev() {
            acc = acc * x.clone() + coeff_to_real(a, x);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * rat(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.c.clone();
        let Some(nd) = self.degree() else {
            return (Polynomial::zero(), Polynomial::zero());
        };
        if nd < dd {
            return (Polynomial::zero(), self.clone());
        }
        let inv = d.lead().recip();
        let mut q = vec![BigRational::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let coef = &r[i + dd] * &inv;
            if !coef.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] = &r[i + j] - &coef * b;
                }
            }
            q[i] = coef;
        }
        r.truncate(dd);
        (Polynomial::new(q), Polynomial::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Polynomial) -> Polynomial {
        let mut a = self.primitive();
        let mut b = o.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Square-free decomposition `p = c · Π f_i^i` (Yun). Returns `(f_i, i)`
    /// for the nonconstant factors.
    pub fn yun(&self) -> Vec<(Polynomial, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let c = d.div_rem(&a0).0;
        let mut dd = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            let c = dd.div_rem(&a).0;
            dd = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn square_free(&self) -> Polynomial {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&self.gcd(&self.derivative())).0.primitive()
    }

    /// Power of two bounding every real root's magnitude.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.lead().abs();
        let mut m = BigRational::zero();
        for a in &self.c[..self.c.len().saturating_sub(1)] {
            let r = a.abs() / &lead;
            if r > m {
                m = r;
            }
        }
        let target = m + BigRational::one();
        let mut b = BigRational::one();
        while b < target {
            b = b * rat(2);
        }
        b
    }

    fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let unit = mag.is_one();
            if !unit || i == 0 {
                s.push_str(&mag.to_string());
            }
            match i {
                0 => {}
                1 => s.push_str(var),
                _ => s.push_str(&format!("{var}^{i}")),
            }
        }
        s
    }

    pub fn display_in(&self, var: &str) -> String {
        self.fmt_var(var)
    }
}

fn coeff_to_real<R: Real>(a: &BigRational, like: &R) -> R {
    if a.is_integer() {
        if let Ok(v) = i64::try_from(a.to_integer()) {
            return like.int(v);
        }
    }
    if like.prec() <= 53 {
        R::from_f64(rational_to_f64(a), 53)
    } else {
        R::from_big(&BigReal::from_rational(a, like.prec()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("x"))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.c.iter().map(|a| -a).collect())
    }
}

macro_rules! by_value {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, o: Polynomial) -> Polynomial {
                (&self).$f(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

/// Sturm sequence of a square-free polynomial (members scaled by positive
/// constants only, which preserves sign counts).
#[derive(Clone, Debug)]
pub struct Sturm {
    chain: Vec<Polynomial>,
    /// Integer coefficients of each (primitive) member, lowest degree first.
    ints: Vec<Vec<BigInt>>,
}

impl Sturm {
    pub fn new(p: &Polynomial) -> Sturm {
        let mut chain = vec![p.primitive()];
        if p.degree().unwrap_or(0) == 0 {
            return Sturm::with_ints(chain);
        }
        chain.push(p.derivative().primitive());
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push((-&r).primitive());
        }
        Sturm::with_ints(chain)
    }

    fn with_ints(chain: Vec<Polynomial>) -> Sturm {
        let ints = chain
            .iter()
            .map(|p| p.c.iter().map(|a| a.to_integer()).collect())
            .collect();
        Sturm { chain, ints }
    }

    /// Sign of an integer polynomial at `n/d` (`d > 0`), via homogeneous Horner
    /// in integers: avoids a gcd per step.
    fn sign_int(c: &[BigInt], n: &BigInt, d: &BigInt) -> i8 {
        let Some(last) = c.last() else { return 0 };
        let mut acc = last.clone();
        let mut dp = BigInt::one();
        for a in c.iter().rev().skip(1) {
            dp *= d;
            acc = acc * n + a * &dp;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.chain[0]
    }

    /// Sign of the base polynomial at `x`.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        Sturm::sign_int(&self.ints[0], x.numer(), x.denom())
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    fn sign_of(r: &BigRational) -> i8 {
        if r.is_zero() {
            0
        } else if r.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        let (n, d) = (x.numer(), x.denom());
        Sturm::variations(self.ints.iter().map(|c| Sturm::sign_int(c, n, d)))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Sturm::variations(self.chain.iter().map(|p| Sturm::sign_of(&p.lead())))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Sturm::variations(self.chain.iter().map(|p| {
            let s = Sturm::sign_of(&p.lead());
            if p.degree().unwrap_or(0) % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct roots in `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    /// Distinct roots in `(-∞, x]`.
    pub fn count_le(&self, x: &BigRational) -> usize {
        self.variations_at_neg_inf()
            .saturating_sub(self.variations_at(x))
    }

    /// Distinct roots in `(x, ∞)`.
    pub fn count_gt(&self, x: &BigRational) -> usize {
        self.variations_at(x)
            .saturating_sub(self.variations_at_pos_inf())
    }

    pub fn count_real(&self) -> usize {
        self.variations_at_neg_inf()
            .saturating_sub(self.variations_at_pos_inf())
    }
}

/// An interval `(lo, hi]` holding exactly one root (or `lo == hi` when the
/// root was hit exactly).
#[derive(Clone, Debug, PartialEq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / rat(2)))
    }

    pub fn contains_f64(&self, x: f64, slack: f64) -> bool {
        rational_to_f64(&self.lo) - slack <= x && x <= rational_to_f64(&self.hi) + slack
    }
}

/// Isolates every distinct real root of `p` and refines each interval to
/// width at most `width`.
pub fn isolate_real_roots(p: &Polynomial, width: &BigRational) -> Vec<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.square_free();
    let st = Sturm::new(&sf);
    let b = sf.root_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = st.count_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine(&st, RootInterval { lo, hi }, width));
            continue;
        }
        let mid = (&lo + &hi) / rat(2);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

fn refine(st: &Sturm, mut iv: RootInterval, width: &BigRational) -> RootInterval {
    if st.sign_at(&iv.hi) == 0 {
        return RootInterval {
            lo: iv.hi.clone(),
            hi: iv.hi,
        };
    }
    while iv.width() > *width {
        let mid = (&iv.lo + &iv.hi) / rat(2);
        if st.sign_at(&mid) == 0 {
            return RootInterval {
                lo: mid.clone(),
                hi: mid,
            };
        }
        if st.count_in(&iv.lo, &mid) == 1 {
            iv.hi = mid;
        } else {
            iv.lo = mid;
        }
    }
    iv
}

/// Largest real root, refined to the given width.
pub fn largest_real_root(p: &Polynomial, width: &BigRational) -> Option<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return None;
    }
    let sf = p.square_free();
    let st = Sturm::new(&sf);
    let b = sf.root_bound();
    let mut lo = -b.clone();
    let hi = b;
    if st.count_in(&lo, &hi) == 0 {
        return None;
    }
    // shrink from the left until exactly one root remains to the right
    let mut right = hi.clone();
    let mut left = lo.clone();
    loop {
        let n = st.count_in(&left, &right);
        if n == 1 {
            break;
        }
        let mid = (&left + &right) / rat(2);
        if st.count_in(&mid, &right) >= 1 {
            left = mid;
        } else {
            right = mid;
        }
        lo = left.clone();
    }
    Some(refine(&st, RootInterval { lo, hi: right }, width))
}

/// Eigenvalue-style counts for a polynomial with all roots listed with
/// multiplicity: roots below, equal to and above `x`.
pub fn root_counts(p: &Polynomial, x: &BigRational) -> (usize, usize, usize) {
    RootCounter::new(p).counts(x)
}

/// Square-free factors with their Sturm chains, for repeated [`root_counts`]
/// queries against one polynomial.
#[derive(Clone, Debug)]
pub struct RootCounter {
    parts: Vec<(Sturm, usize)>,
}

impl RootCounter {
    pub fn new(p: &Polynomial) -> RootCounter {
        let parts = p.yun().into_iter().map(|(f, m)| (Sturm::new(&f), m));
        RootCounter {
            parts: parts.collect(),
        }
    }

    /// Roots `(below, equal to, above)` `x`, with multiplicity.
    pub fn counts(&self, x: &BigRational) -> (usize, usize, usize) {
        let (mut below, mut equal, mut above) = (0, 0, 0);
        for (st, m) in &self.parts {
            let le = st.count_le(x);
            let eq = usize::from(st.sign_at(x) == 0);
            below += m * (le - eq);
            equal += m * eq;
            above += m * st.count_gt(x);
        }
        (below, equal, above)
    }
}

/// `P / Q` over `Q[μ]`, kept reduced with a monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        let l = d.lead().recip();
        n = n.scale(&l);
        d = d.scale(&l);
        RationalFunction { num: n, den: d }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(v: i64) -> Self {
        RationalFunction::from_poly(Polynomial::from_ints(&[v]))
    }

    /// The variable `μ`.
    pub fn var() -> Self {
        RationalFunction::from_poly(Polynomial::x())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Self {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn eval_real<R: Real>(&self, x: &R) -> R {
        self.num.eval_real(x) / self.den.eval_real(x)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return RationalFunction::new(&self.num + &o.num, self.den.clone());
        }
        RationalFunction::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) / ({})",
            self.num.display_in("μ"),
            self.den.display_in("μ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::f64_to_rational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_and_division() {
        let p = Polynomial::from_ints_desc(&[1, -5, -2]);
        assert_eq!(p.to_string(), "x^2 - 5x - 2");
        let d = Polynomial::from_ints_desc(&[1, -1]);
        let (quo, rem) = p.div_rem(&d);
        assert_eq!(&(&quo * &d) + &rem, p);
        assert_eq!(rem, Polynomial::from_ints(&[-6]));
        assert_eq!(p.derivative(), Polynomial::from_ints_desc(&[2, -5]));
    }

    #[test]
    fn gcd_and_yun() {
        // (x-1)^2 (x+2)^3 x
        let a = Polynomial::from_ints_desc(&[1, -1]);
        let b = Polynomial::from_ints_desc(&[1, 2]);
        let p = &(&(&a * &a) * &(&(&b * &b) * &b)) * &Polynomial::x();
        let y = p.yun();
        let mult: Vec<(usize, usize)> = y.iter().map(|(f, m)| (f.degree().unwrap(), *m)).collect();
        assert_eq!(mult, vec![(1, 1), (1, 2), (1, 3)]);
        assert_eq!(p.square_free().degree(), Some(3));
        assert_eq!(p.gcd(&a).degree(), Some(1));
    }

    #[test]
    fn sturm_counts_with_multiplicity() {
        // roots 0, 1, 1, 3 (the Laplacian spectrum of K_{1,3} shifted)
        let p = &(&Polynomial::x() * &Polynomial::from_ints_desc(&[1, -1]))
            * &(&Polynomial::from_ints_desc(&[1, -1]) * &Polynomial::from_ints_desc(&[1, -3]));
        assert_eq!(root_counts(&p, &q(1, 1)), (1, 2, 1));
        assert_eq!(root_counts(&p, &q(1, 2)), (1, 0, 3));
        assert_eq!(root_counts(&p, &q(4, 1)), (4, 0, 0));
        assert_eq!(root_counts(&p, &q(0, 1)), (0, 1, 3));
    }

    #[test]
    fn isolation_of_mu_star() {
        let p = Polynomial::from_ints_desc(&[1, -5, -2]);
        let w = q(1, 1 << 50);
        let roots = isolate_real_roots(&p, &w);
        assert_eq!(roots.len(), 2);
        let mu_star = (5.0 + 33f64.sqrt()) / 2.0;
        assert!((roots[1].midpoint_f64() - mu_star).abs() < 1e-13);
        let top = largest_real_root(&p, &w).unwrap();
        assert_eq!(top, roots[1]);
        let exact = isolate_real_roots(&Polynomial::from_ints_desc(&[1, -4]), &w);
        assert_eq!(exact[0].lo, exact[0].hi);
    }

    #[test]
    fn rational_function_reduces() {
        let mu = RationalFunction::var();
        let one = RationalFunction::constant(1);
        // (μ² - 1) / (μ - 1) reduces to μ + 1
        let f = RationalFunction::new(
            Polynomial::from_ints_desc(&[1, 0, -1]),
            Polynomial::from_ints_desc(&[1, -1]),
        );
        assert_eq!(f, &mu + &one);
        let g = &one - &(&mu.recip() * &mu);
        assert!(g.is_zero());
        let v = f.eval_real(
            &f64_to_rational(2.5)
                .to_string()
                .parse::<f64>()
                .unwrap_or(2.5),
        );
        assert!((v - 3.5).abs() < 1e-15);
    }

    #[test]
    fn integer_strings() {
        let p = Polynomial::new(vec![q(-1, 2), q(3, 4), q(1, 1)]);
        assert_eq!(p.integer_coeff_strings(), vec!["4", "3", "-2"]);
    }
}
