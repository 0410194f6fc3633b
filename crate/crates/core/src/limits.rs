//! Limit points of generalized Shearer sequences: numeric estimates,
//! truncation to zero tails, exact algebraic limits, constant-tail limit
//! equations, domination checks, and the Guo and Hoffman constants.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::diagonalize::{PathKernel, PathTable};
use crate::error::Error;
use crate::numeric::{BigReal, Field, Real};
use crate::poly::{isolate_real_roots, Polynomial, RationalFunction, RootInterval};
use crate::spectral::{fixed_points, laplacian_radius};
use crate::tree_model::{Lexer, LinearTree, Starlike};

/// Longest prefix handled symbolically.
pub const MAX_SYMBOLIC_PREFIX: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    /// `[0]^∞`.
    Zero,
    Constant(Starlike),
    Periodic(Vec<Starlike>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClosingRule {
    /// `C_k = T_k`, so `G_k = [T_1, ..., T_k]`.
    ShiftOfT,
    /// `C_k` from the list; the last element repeats.
    Explicit(Vec<Starlike>),
    Constant(Starlike),
    /// `C_k = [1, k-1]`: with a zero stream this is the quipu family
    /// `[[0]^{k-1}, [1, k-1]]`.
    OneKMinusOne,
}

/// `G_k = [T_1, ..., T_{k-1}, C_k]` with `T = prefix ++ tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpec {
    pub prefix: Vec<Starlike>,
    pub tail: Tail,
    pub closing: ClosingRule,
}

const EXAMPLE51: &str = "[1], [1, 2], [1], [0], [0], [1], [1], [0], [1], [2], [2], [2], [1],[1], [2], [2], [2], [1], [2], [1],[2],\
[1], [2], [2], [1], [2], [1], [2], [2], [2], [2], [2], [2], [2], [1], [1], [2], [1], [2], [2], [1],[2], [2], [2],[1],\
[2], [2], [2], [2], [2], [1], [2], [2], [2], [2], [2], [2], [1], [2], [2],[1], [1], [2], [2], [2], [2], [2],[2], [2],\
[1], [2], [2], [1], [2],[1], [1], [2], [2], [2], [1], [1], [1], [1], [1], [1], [2], [2], [1], [1],[2], [2],[1], [2],\
[2],[1], [2], [1], [2], [2], [2], [0]";

const GENETIC: &str =
    "[0], [1, 1], [1], [7], [5], [6], [7], [7], [2], [3], [5], [6], [2], [5], [4], [4], [6],\
[6], [6], [0], [6], [1, 1], [0], [6], [0], [3], [4], [4], [7], [1, 1]";

/// Names accepted by [`SequenceSpec::named`].
pub const NAMED_SPECS: [&str; 5] = ["lemma34", "example51", "maxdrift", "genetic29", "one-k-k"];

fn stars(s: &str) -> Vec<Starlike> {
    crate::tree_model::parse_star_list(s).expect("built-in star list")
}

impl SequenceSpec {
    pub fn new(prefix: Vec<Starlike>, tail: Tail, closing: ClosingRule) -> Self {
        SequenceSpec {
            prefix,
            tail,
            closing,
        }
    }

    /// Built-in sequences:
    /// `lemma34` is `[[1,1,1],[1]^{k-2},[1,1]]`; `example51` is the recorded
    /// random stream at `μ = 5.4`; `maxdrift` the drift-maximizing stream at
    /// `μ = 5.4` with height 2; `genetic29` the genetic-search stream; and
    /// `one-k-k` the quipu family `[[0]^{k-1},[1,k-1]]`.
    pub fn named(name: &str) -> Option<SequenceSpec> {
        let s = match name {
            "lemma34" => SequenceSpec::new(
                stars("[1,1,1]"),
                Tail::Constant(Starlike::leaves(1)),
                ClosingRule::Constant(Starlike::leaves(2)),
            ),
            "example51" => SequenceSpec::new(stars(EXAMPLE51), Tail::Zero, ClosingRule::ShiftOfT),
            "maxdrift" => SequenceSpec::new(
                stars("[2,2,2],[0]"),
                Tail::Constant(Starlike::new(vec![2]).expect("valid")),
                ClosingRule::ShiftOfT,
            ),
            "genetic29" => SequenceSpec::new(stars(GENETIC), Tail::Zero, ClosingRule::ShiftOfT),
            "one-k-k" => SequenceSpec::new(Vec::new(), Tail::Zero, ClosingRule::OneKMinusOne),
            _ => return None,
        };
        Some(s)
    }

    /// A spec literal: a name from [`NAMED_SPECS`], or a star list followed
    /// by optional `;tail=...` and `;close=...` clauses.
    ///
    /// `tail` takes a star (`[0]` means the zero tail) or a parenthesized
    /// period `([1],[2])`. `close` takes `shift`, `one-k`, a star, or a
    /// parenthesized explicit list.
    pub fn parse(text: &str) -> Result<SequenceSpec, Error> {
        let t = text.trim();
        if let Some(s) = SequenceSpec::named(t) {
            return Ok(s);
        }
        let mut lx = Lexer {
            s: t.as_bytes(),
            i: 0,
        };
        let prefix = if lx.peek_is(b'[') {
            lx.star_list()?
        } else {
            Vec::new()
        };
        let mut spec = SequenceSpec::new(prefix, Tail::Zero, ClosingRule::ShiftOfT);
        while lx.eat(b';') {
            lx.ws();
            let start = lx.i;
            while lx.i < lx.s.len() && (lx.s[lx.i].is_ascii_alphanumeric() || lx.s[lx.i] == b'-') {
                lx.i += 1;
            }
            let key = std::str::from_utf8(&lx.s[start..lx.i])
                .unwrap_or("")
                .to_string();
            if !lx.eat(b'=') {
                return Err(lx.err("expected '='"));
            }
            match key.as_str() {
                "tail" => {
                    spec.tail = if lx.peek_is(b'(') {
                        Tail::Periodic(paren_list(&mut lx)?)
                    } else if word(&mut lx, "zero") {
                        Tail::Zero
                    } else {
                        let s = lx.star()?;
                        if s.is_empty() {
                            Tail::Zero
                        } else {
                            Tail::Constant(s)
                        }
                    }
                }
                "close" => {
                    spec.closing = if lx.peek_is(b'(') {
                        ClosingRule::Explicit(paren_list(&mut lx)?)
                    } else if word(&mut lx, "shift") {
                        ClosingRule::ShiftOfT
                    } else if word(&mut lx, "one-k") {
                        ClosingRule::OneKMinusOne
                    } else {
                        ClosingRule::Constant(lx.star()?)
                    }
                }
                _ => {
                    lx.i = start;
                    return Err(lx.err("unknown clause (expected tail or close)"));
                }
            }
        }
        lx.ws();
        if lx.i != lx.s.len() {
            return Err(lx.err("unexpected trailing input"));
        }
        if spec.prefix.is_empty()
            && spec.closing != ClosingRule::OneKMinusOne
            && spec.tail == Tail::Zero
        {
            return Err(Error::Syntax {
                pos: 0,
                msg: "empty sequence".into(),
            });
        }
        Ok(spec)
    }

    /// `T_j`, 1-based.
    pub fn t(&self, j: usize) -> Starlike {
        if j <= self.prefix.len() {
            return self.prefix[j - 1].clone();
        }
        let i = j - self.prefix.len() - 1;
        match &self.tail {
            Tail::Zero => Starlike::empty(),
            Tail::Constant(s) => s.clone(),
            Tail::Periodic(p) if p.is_empty() => Starlike::empty(),
            Tail::Periodic(p) => p[i % p.len()].clone(),
        }
    }

    /// `C_k`, 1-based.
    pub fn c(&self, k: usize) -> Starlike {
        match &self.closing {
            ClosingRule::ShiftOfT => self.t(k),
            ClosingRule::Explicit(list) => list
                .get(k - 1)
                .or(list.last())
                .cloned()
                .unwrap_or_else(Starlike::empty),
            ClosingRule::Constant(s) => s.clone(),
            ClosingRule::OneKMinusOne => {
                let paths: Vec<u32> = [1, k as u32 - 1].into_iter().filter(|&q| q > 0).collect();
                Starlike::new(paths).expect("positive lengths")
            }
        }
    }

    pub fn member(&self, k: usize) -> LinearTree {
        let mut s: Vec<Starlike> = (1..k).map(|j| self.t(j)).collect();
        s.push(self.c(k));
        LinearTree::new(s).expect("nonempty")
    }

    /// Largest width in the prefix, tail and closing rule (up to `k`).
    pub fn max_width(&self, k: usize) -> usize {
        (1..=k)
            .map(|j| self.t(j).width().max(self.c(j).width()))
            .max()
            .unwrap_or(0)
    }
}

fn paren_list(lx: &mut Lexer<'_>) -> Result<Vec<Starlike>, Error> {
    lx.eat(b'(');
    let list = lx.any_star_list()?;
    if !lx.eat(b')') {
        return Err(lx.err("expected ')'"));
    }
    Ok(list)
}

fn word(lx: &mut Lexer<'_>, w: &str) -> bool {
    lx.ws();
    if lx.s[lx.i..].starts_with(w.as_bytes()) {
        lx.i += w.len();
        true
    } else {
        false
    }
}

fn fmt_list(list: &[Starlike]) -> String {
    list.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "[{}]", fmt_list(&self.prefix))?;
        }
        match &self.tail {
            Tail::Zero => {}
            Tail::Constant(s) => write!(f, ";tail={s}")?,
            Tail::Periodic(p) => write!(f, ";tail=({})", fmt_list(p))?,
        }
        match &self.closing {
            ClosingRule::ShiftOfT => {}
            ClosingRule::Explicit(l) => write!(f, ";close=({})", fmt_list(l))?,
            ClosingRule::Constant(s) => write!(f, ";close={s}")?,
            ClosingRule::OneKMinusOne => write!(f, ";close=one-k")?,
        }
        Ok(())
    }
}

/// Numeric limit estimate from finite radii.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitEstimate {
    pub gamma: f64,
    /// `ρ_L(G_k)`, `k = 1..k_max`.
    pub radii: Vec<f64>,
    /// `ρ(G_{k_max}) - ρ(G_{k_max - 1})`; the estimate is never claimed
    /// closer than this.
    pub gap: f64,
}

/// `ρ_L(G_k)` for `k = 1..k_max`; fails if the radii decrease by more than `tol`.
pub fn estimate_limit(spec: &SequenceSpec, k_max: usize, tol: f64) -> Result<LimitEstimate, Error> {
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    let mut radii = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let r = laplacian_radius(&spec.member(k));
        if let Some(&prev) = radii.last() {
            if r < prev - tol {
                return Err(Error::NotGeneralizedShearer {
                    index: k - 1,
                    prev,
                    next: r,
                });
            }
        }
        radii.push(r);
    }
    let gamma = *radii.last().expect("nonempty");
    let gap = if k_max > 1 {
        gamma - radii[k_max - 2]
    } else {
        f64::INFINITY
    };
    Ok(LimitEstimate { gamma, radii, gap })
}

/// Keeps `T_1..T_{k0}` and replaces the rest of the stream with `[0]^∞`.
pub fn truncate(spec: &SequenceSpec, k0: usize) -> SequenceSpec {
    SequenceSpec::new(
        (1..=k0).map(|j| spec.t(j)).collect(),
        Tail::Zero,
        ClosingRule::ShiftOfT,
    )
}

fn var() -> RationalFunction {
    RationalFunction::var()
}

fn cst(v: i64) -> RationalFunction {
    RationalFunction::constant(v)
}

/// `b_1, ..., b_q` as rational functions of `μ`.
struct SymbolicPaths {
    b: Vec<RationalFunction>,
}

impl SymbolicPaths {
    fn new() -> Self {
        SymbolicPaths { b: Vec::new() }
    }

    fn value(&mut self, q: u32) -> RationalFunction {
        let two_minus_mu = &cst(2) - &var();
        while self.b.len() < q as usize {
            let next = match self.b.last() {
                None => &cst(1) - &var(),
                Some(last) => &two_minus_mu - &last.recip(),
            };
            self.b.push(next);
        }
        self.b[q as usize - 1].clone()
    }

    fn drift(&mut self, t: &Starlike) -> RationalFunction {
        let mut acc = cst(0);
        for &q in t.paths() {
            acc = &(&acc + &cst(1)) - &self.value(q).recip();
        }
        acc
    }
}

/// Interior `S_m(μ)` of a star list as an exact rational function.
pub fn symbolic_s(prefix: &[Starlike]) -> Result<RationalFunction, Error> {
    if prefix.is_empty() {
        return Err(Error::Domain("empty prefix".into()));
    }
    if prefix.len() > MAX_SYMBOLIC_PREFIX {
        return Err(Error::Domain(format!(
            "symbolic prefix limited to {MAX_SYMBOLIC_PREFIX} stars"
        )));
    }
    let mut sp = SymbolicPaths::new();
    let two_minus_mu = &cst(2) - &var();
    let mut s = &(&cst(1) - &var()) + &sp.drift(&prefix[0]);
    for t in &prefix[1..] {
        s = &(&two_minus_mu - &s.recip()) + &sp.drift(t);
    }
    Ok(s)
}

/// Which fixed-point identity a limit root satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `S = θ'` (zero tail).
    ThetaPrime,
    /// `S = θ` (zero tail).
    Theta,
    /// `σ + e = 0` (constant tail).
    Sigma,
    /// `W_1 = σ'` (constant tail).
    SigmaPrime,
    /// Spurious root of the squared equation.
    Extraneous,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::ThetaPrime => "theta_prime",
            Branch::Theta => "theta",
            Branch::Sigma => "sigma",
            Branch::SigmaPrime => "sigma_prime",
            Branch::Extraneous => "extraneous",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub interval: RootInterval,
    pub value: f64,
    pub branch: Branch,
    pub polynomial: Polynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicLimit {
    /// Witness polynomial of the selected root (primitive integer coefficients).
    pub defining_polynomial: Polynomial,
    pub selected_root: f64,
    pub interval: RootInterval,
    pub branch: Branch,
    /// Every real root of every branch equation greater than 4.
    pub candidates: Vec<Candidate>,
    /// Numeric limit estimate used for selection.
    pub numeric_check: f64,
    pub gap: f64,
    /// `S_{k0} = P/Q` (zero tail) or `W_1` (constant tail).
    pub entry: RationalFunction,
}

impl AlgebraicLimit {
    /// The selected root to `prec` bits, by bisection on the exact polynomial.
    pub fn root_big(&self, prec: usize) -> BigReal {
        let w = BigRational::new(BigInt::from(1), BigInt::from(2).pow(prec as u32 + 4));
        let ivs = isolate_real_roots(&self.defining_polynomial, &w);
        let lo = &self.interval.lo;
        let hi = &self.interval.hi;
        let iv = ivs
            .into_iter()
            .find(|iv| iv.hi >= *lo && iv.lo <= *hi)
            .expect("selected root is isolated");
        BigReal::from_rational(
            &((&iv.lo + &iv.hi) / BigRational::from_integer(BigInt::from(2))),
            prec,
        )
    }
}

/// Outcome for a zero tail: an algebraic root, or the `Δ = 0` boundary
/// where all stars are empty and the limit is 4.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroTailLimit {
    Algebraic(AlgebraicLimit),
    BoundaryDegenerate { estimate: f64, gap: f64 },
}

/// Primitive, positive leading coefficient, with factors of `μ` removed.
fn normalize(p: &Polynomial) -> Polynomial {
    let lead_zeros = p.coeffs().iter().take_while(|c| Zero::is_zero(*c)).count();
    let q = Polynomial::new(p.coeffs()[lead_zeros..].to_vec()).primitive();
    if q.lead() < BigRational::from_integer(BigInt::from(0)) {
        -&q
    } else {
        q
    }
}

fn roots_above_four(p: &Polynomial) -> Vec<RootInterval> {
    let w = BigRational::new(BigInt::from(1), BigInt::from(1u64 << 60));
    isolate_real_roots(p, &w)
        .into_iter()
        .filter(|iv| iv.midpoint_f64() > 4.0)
        .collect()
}

fn select(
    candidates: Vec<Candidate>,
    est: &LimitEstimate,
    tol: f64,
    entry: RationalFunction,
) -> Result<AlgebraicLimit, Error> {
    let window = 10.0 * tol.max(est.gap.abs());
    let best = candidates
        .iter()
        .filter(|c| c.branch != Branch::Extraneous)
        .filter(|c| (c.value - est.gamma).abs() <= window)
        .min_by(|a, b| {
            (a.value - est.gamma)
                .abs()
                .partial_cmp(&(b.value - est.gamma).abs())
                .unwrap_or(Ordering::Equal)
        })
        .cloned();
    match best {
        Some(c) => Ok(AlgebraicLimit {
            defining_polynomial: c.polynomial.clone(),
            selected_root: c.value,
            interval: c.interval.clone(),
            branch: c.branch,
            candidates,
            numeric_check: est.gamma,
            gap: est.gap,
            entry,
        }),
        None => Err(Error::Inconsistent(format!(
            "no root within {window:e} of the numeric estimate {}; candidates: [{}]",
            est.gamma,
            candidates
                .iter()
                .map(|c| format!("{} ({})", c.value, c.branch.name()))
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// Exact limit of a zero-tail, shift-closed sequence: with `S_{k0} = P/Q`,
/// the limit is a root of `P² - (2-μ)PQ + Q²` (`S_{k0}` equals `θ` or `θ'`).
/// The root is chosen by proximity to the estimate at `k_max`.
pub fn algebraic_limit(
    spec: &SequenceSpec,
    k_max: usize,
    tol: f64,
) -> Result<ZeroTailLimit, Error> {
    if spec.tail != Tail::Zero || spec.closing != ClosingRule::ShiftOfT {
        return Err(Error::Domain(
            "algebraic_limit needs a zero tail and shift closing".into(),
        ));
    }
    let m = spec.prefix.len();
    let est = estimate_limit(spec, k_max.max(m + 2), tol)?;
    if spec.prefix.iter().all(Starlike::is_empty) {
        return Ok(ZeroTailLimit::BoundaryDegenerate {
            estimate: est.gamma,
            gap: est.gap,
        });
    }
    let s = symbolic_s(&spec.prefix)?;
    let lhs = &(&s.num * &s.num) - &(&(&Polynomial::from_ints(&[2, -1]) * &s.num) * &s.den);
    let poly = normalize(&(&lhs + &(&s.den * &s.den)));
    let candidates: Vec<Candidate> = roots_above_four(&poly)
        .into_iter()
        .map(|iv| {
            let x = iv.midpoint_f64();
            let branch = match fixed_points(&x) {
                Ok(fp) => {
                    let v = s.eval_real(&x);
                    if (v - fp.theta_prime).abs() <= (v - fp.theta).abs() {
                        Branch::ThetaPrime
                    } else {
                        Branch::Theta
                    }
                }
                Err(_) => Branch::Extraneous,
            };
            Candidate {
                interval: iv,
                value: x,
                branch,
                polynomial: poly.clone(),
            }
        })
        .collect();
    if candidates.is_empty() && (est.gamma - 4.0).abs() < 1e-2 {
        return Ok(ZeroTailLimit::BoundaryDegenerate {
            estimate: est.gamma,
            gap: est.gap,
        });
    }
    select(candidates, &est, tol, s).map(ZeroTailLimit::Algebraic)
}

/// Limit of `[P_1, ..., P_m, T^{k-m-1}, C]` for a constant tail star `T`
/// and closing star `C`.
///
/// With `d = δ(T)`, the tail iterates `ψ̃(t) = c - 1/t`, `c = 2 - μ + d`,
/// from `W_1 = S_m`, and the closing entry is `W + e` with
/// `e = δ(C) - d - 1`. The orbit tends to `σ` unless `W_1 = σ'`, so the
/// limit solves `σ + e = 0` or `W_1 = σ'`. Both are polynomial: the first is
/// `e² + ce + 1 = 0` with `-e < c/2`, the second `W_1² - cW_1 + 1 = 0` with
/// `W_1 > c/2`. Roots outside `window` are dropped.
pub fn constant_tail_limit(
    prefix: &[Starlike],
    tail: &Starlike,
    closing: &Starlike,
    window: (f64, f64),
    k_max: usize,
    tol: f64,
) -> Result<AlgebraicLimit, Error> {
    let w1 = symbolic_s(prefix)?;
    let mut sp = SymbolicPaths::new();
    let d = sp.drift(tail);
    let c = &(&cst(2) - &var()) + &d;
    let e = &(&sp.drift(closing) - &d) - &cst(1);
    let sigma_eq = &(&(&e * &e) + &(&c * &e)) + &cst(1);
    let sigma_p_eq = &(&(&w1 * &w1) - &(&c * &w1)) + &cst(1);
    let mut candidates = Vec::new();
    for (eq, branch) in [
        (&sigma_eq, Branch::Sigma),
        (&sigma_p_eq, Branch::SigmaPrime),
    ] {
        if eq.num.is_zero() {
            continue;
        }
        let poly = normalize(&eq.num);
        for iv in roots_above_four(&poly) {
            let x = iv.midpoint_f64();
            if x < window.0 || x > window.1 {
                continue;
            }
            let cv = c.eval_real(&x);
            let ok = cv * cv > 4.0
                && match branch {
                    Branch::Sigma => -e.eval_real(&x) < cv / 2.0,
                    _ => w1.eval_real(&x) > cv / 2.0,
                };
            let branch = if ok { branch } else { Branch::Extraneous };
            candidates.push(Candidate {
                interval: iv,
                value: x,
                branch,
                polynomial: poly.clone(),
            });
        }
    }
    if candidates.iter().all(|c| c.branch == Branch::Extraneous) {
        return Err(Error::Inconsistent(format!(
            "no admissible root in the window [{}, {}]",
            window.0, window.1
        )));
    }
    let spec = SequenceSpec::new(
        prefix.to_vec(),
        Tail::Constant(tail.clone()),
        ClosingRule::Constant(closing.clone()),
    );
    let spec = if tail.is_empty() {
        SequenceSpec {
            tail: Tail::Zero,
            ..spec
        }
    } else {
        spec
    };
    let est = estimate_limit(&spec, k_max.max(prefix.len() + 2), tol)?;
    select(candidates, &est, tol, w1)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Interior `S_j >= θ'`.
    SAboveThetaPrime { j: usize, value: f64 },
    /// `δ(T_j) <= ω(T_j)` for a nonempty star.
    DriftNotAboveWidth { j: usize },
    /// `δ(T_j) >= μ`.
    DriftTooLarge { j: usize },
    /// `δ(C_k) >= μ`.
    ClosingDriftTooLarge { k: usize },
    /// Back-node degree plus one reaches `μ` (`ω + 2` for `j = 1`,
    /// `ω + 3` further in), forcing `ρ_L >= μ`.
    DegreeBound { j: usize },
}

impl Violation {
    pub fn index(&self) -> usize {
        match *self {
            Violation::SAboveThetaPrime { j, .. }
            | Violation::DriftNotAboveWidth { j }
            | Violation::DriftTooLarge { j }
            | Violation::DegreeBound { j } => j,
            Violation::ClosingDriftTooLarge { k } => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominatedReport {
    pub mu: f64,
    pub horizon: usize,
    pub interior: Vec<f64>,
    pub theta_prime: f64,
    pub first_violation: Option<Violation>,
}

impl DominatedReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Evidence that `G_k` belongs to `Γ(μ)` up to horizon `k`.
pub fn dominated_check<R: Real>(
    spec: &SequenceSpec,
    mu: &R,
    k: usize,
) -> Result<DominatedReport, Error> {
    let fp = fixed_points(mu)?;
    let tp = fp.theta_prime;
    let kern = PathKernel::laplacian(mu.clone());
    let mut table = PathTable::new(mu);
    let mut interior: Vec<R> = Vec::with_capacity(k);
    let mut first = None;
    for j in 1..=k {
        let t = spec.t(j);
        let d = table.drift(&t);
        let base = if j == 1 {
            mu.int(1) - mu.clone()
        } else {
            kern.apply(&interior[j - 2])
        };
        let s = base + d.clone();
        if first.is_none() {
            if s >= tp {
                first = Some(Violation::SAboveThetaPrime {
                    j,
                    value: s.to_f64(),
                });
            } else if !t.is_empty() && d <= mu.int(t.width() as i64) {
                first = Some(Violation::DriftNotAboveWidth { j });
            } else if d >= *mu {
                first = Some(Violation::DriftTooLarge { j });
            } else if j < k && mu.int(t.width() as i64 + if j == 1 { 2 } else { 3 }) >= *mu {
                first = Some(Violation::DegreeBound { j });
            }
        }
        interior.push(s);
    }
    if first.is_none() && table.drift(&spec.c(k)) >= *mu {
        first = Some(Violation::ClosingDriftTooLarge { k });
    }
    Ok(DominatedReport {
        mu: mu.to_f64(),
        horizon: k,
        interior: interior.iter().map(Real::to_f64).collect(),
        theta_prime: tp.to_f64(),
        first_violation: first,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftProbe {
    pub rho: f64,
    pub rho_replaced: f64,
    /// Where the drifts were compared.
    pub mu_eval: f64,
    pub drift_original: f64,
    pub drift_replacement: f64,
    /// Ordering of replacement drift against the original.
    pub drift_order: Ordering,
    /// Radii ordered as the drift comparison predicts (`ρ̂ >= ρ` when the
    /// replacement drift is larger, `<=` when smaller, equal when equal).
    pub consistent: bool,
}

/// Replaces `T_{j0}` in `G_k` and compares radii and drifts. Drifts are
/// evaluated at `mu` if given, otherwise at `ρ_L(G_k)`.
pub fn drift_monotonicity_probe(
    spec: &SequenceSpec,
    j0: usize,
    replacement: &Starlike,
    mu: Option<f64>,
    k: usize,
) -> Result<DriftProbe, Error> {
    if j0 == 0 || j0 > k {
        return Err(Error::Domain(format!(
            "replacement index {j0} outside 1..={k}"
        )));
    }
    let g = spec.member(k);
    let mut stars = g.stars().to_vec();
    let original = stars[j0 - 1].clone();
    stars[j0 - 1] = replacement.clone();
    let h = LinearTree::new(stars)?;
    let rho = laplacian_radius(&g);
    let rho_replaced = laplacian_radius(&h);
    let mu_eval = mu.unwrap_or(rho);
    let mut table = PathTable::new(&mu_eval);
    let d0 = table.drift(&original);
    let d1 = table.drift(replacement);
    let slack = 1e-10 * rho.max(1.0);
    let drift_order = if original == *replacement {
        Ordering::Equal
    } else {
        d1.partial_cmp(&d0).unwrap_or(Ordering::Equal)
    };
    let consistent = match drift_order {
        Ordering::Greater => rho_replaced >= rho - slack,
        Ordering::Less => rho_replaced <= rho + slack,
        Ordering::Equal => (rho_replaced - rho).abs() <= slack,
    };
    Ok(DriftProbe {
        rho,
        rho_replaced,
        mu_eval,
        drift_original: d0,
        drift_replacement: d1,
        drift_order,
        consistent,
    })
}

/// `ω = (∛(19+3√33) + ∛(19-3√33) + 1)/3`, the tribonacci constant.
pub fn guo_omega() -> f64 {
    let r = 33f64.sqrt();
    ((19.0 + 3.0 * r).cbrt() + (19.0 - 3.0 * r).cbrt() + 1.0) / 3.0
}

/// `2 + ω + 1/ω`.
pub fn guo_limit() -> f64 {
    let w = guo_omega();
    2.0 + w + 1.0 / w
}

/// `√(2+√5)`.
pub fn hoffman_limit() -> f64 {
    (2.0 + 5f64.sqrt()).sqrt()
}

const CONST_PREC: usize = 192;

/// Unique positive root in `(0, 2)` of a function negative at 0 and positive at 2.
fn positive_root(f: impl Fn(&BigReal) -> BigReal, prec: usize) -> BigReal {
    let mut lo = BigReal::from_int(0, prec);
    let mut hi = BigReal::from_int(2, prec);
    let two = BigReal::from_int(2, prec);
    for _ in 0..prec.saturating_sub(8) {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        if f(&mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// `α_n = 2 + β_n^{1/2} + β_n^{-1/2}` with `β_n` the largest root of
/// `x^{n+1} - (1 + ... + x^{n-1})(√x + 1)²`, and `α_0 = 4`.
pub fn guo_alpha(n: usize) -> f64 {
    guo_alpha_big(n, CONST_PREC).to_f64()
}

/// [`guo_alpha`] at `prec` bits. Consecutive values differ by about
/// `ω^{-n}`, below f64 resolution once `n` passes 50 or so.
pub fn guo_alpha_big(n: usize, prec: usize) -> BigReal {
    if n == 0 {
        return BigReal::from_int(4, prec);
    }
    // in y = √x: y^{2n+2} - (1 + y² + ... + y^{2n-2})(y + 1)²
    let y = positive_root(
        |y| {
            let y2 = y.square();
            let mut geo = y.int(0);
            let mut p = y.int(1);
            for _ in 0..n {
                geo = geo + p.clone();
                p = p * y2.clone();
            }
            let lead = p * y2;
            let one = y.int(1);
            lead - geo * (y.clone() + one).square()
        },
        prec,
    );
    y.int(2) + y.clone() + y.int(1) / y
}

/// `ᾱ_n = β̄_n^{1/2} + β̄_n^{-1/2}` with `β̄_n` the positive root of
/// `x^{n+1} - (1 + x + ... + x^{n-1})`.
pub fn hoffman_alpha_bar(n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    hoffman_alpha_bar_big(n, CONST_PREC).to_f64()
}

/// [`hoffman_alpha_bar`] at `prec` bits; `n >= 1`.
pub fn hoffman_alpha_bar_big(n: usize, prec: usize) -> BigReal {
    assert!(n >= 1, "hoffman_alpha_bar_big needs n >= 1");
    let x = positive_root(
        |x| {
            let mut geo = x.int(0);
            let mut p = x.int(1);
            for _ in 0..n {
                geo = geo + p.clone();
                p = p * x.clone();
            }
            p * x.clone() - geo
        },
        prec,
    );
    let r = x.sqrt();
    r.clone() + r.int(1) / r
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceConstants {
    pub guo_omega: f64,
    pub guo_limit: f64,
    /// `α_0..=α_{n_max}`.
    pub guo_alpha: Vec<f64>,
    pub hoffman_tau: f64,
    pub hoffman_limit: f64,
    /// `ᾱ_1..=ᾱ_{n_max}`.
    pub hoffman_alpha_bar: Vec<f64>,
}

pub fn reference_constants(n_max: usize) -> ReferenceConstants {
    ReferenceConstants {
        guo_omega: guo_omega(),
        guo_limit: guo_limit(),
        guo_alpha: (0..=n_max).map(guo_alpha).collect(),
        hoffman_tau: (1.0 + 5f64.sqrt()) / 2.0,
        hoffman_limit: hoffman_limit(),
        hoffman_alpha_bar: (1..=n_max).map(hoffman_alpha_bar).collect(),
    }
}
