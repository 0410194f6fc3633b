//! Variational certificates. Perturbing the target to `μ_ε = μ - ε` turns
//! each `S_j` into a function `g_j(ε)` with `g_j(0) = S_j < 0` and
//! `g_j' >= 1`; its root `ε_j` measures how far `ρ_L(G_j)` sits below `μ`.
//! The linearization root `α_j = -S_j / X_j`, with `X_j = g_j'(0)`, bounds
//! `ε_j` from above and is computed exactly by recurrence.

use crate::diagonalize::{check_mu, PathKernel, PathTable};
use crate::error::Error;
use crate::expr::Expr;
use crate::limits::{dominated_check, SequenceSpec};
use crate::numeric::{BigReal, Field, Real, DEFAULT_PREC, MAX_PREC};
use crate::spectral::fixed_points;
use crate::tree_model::Starlike;

/// `b_j, b'_j, b''_j` at `ε = 0` along a path, with derivatives in `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathDerivatives<R> {
    pub mu: R,
    pub b: Vec<R>,
    pub b1: Vec<R>,
    pub b2: Vec<R>,
}

impl<R: Real> PathDerivatives<R> {
    fn start(mu: &R) -> Self {
        PathDerivatives {
            mu: mu.clone(),
            b: Vec::new(),
            b1: Vec::new(),
            b2: Vec::new(),
        }
    }

    fn extend_to(&mut self, q: usize) {
        let one = self.mu.int(1);
        if self.b.is_empty() && q > 0 {
            self.b.push(one.clone() - self.mu.clone());
            self.b1.push(one.clone());
            self.b2.push(self.mu.int(0));
        }
        let kern = PathKernel::laplacian(self.mu.clone());
        while self.b.len() < q {
            let (b, b1, b2) = (
                self.b.last().unwrap().clone(),
                self.b1.last().unwrap().clone(),
                self.b2.last().unwrap().clone(),
            );
            let inv2 = b.square().recip();
            self.b.push(kern.apply(&b));
            self.b1.push(one.clone() + b1.clone() * inv2.clone());
            self.b2
                .push(-(self.mu.int(2) * b1.square()) / (b.square() * b) + b2 * inv2);
        }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Path values and their first two `ε`-derivatives for `j = 1..=q`.
///
/// Fails with [`Error::PrecisionCap`] if `1 <= b'_j <= 1/(1-θ^-2)` or
/// `b''_j >= 0` is violated beyond the numeric guard.
pub fn path_derivatives<R: Real>(q: usize, mu: &R) -> Result<PathDerivatives<R>, Error> {
    check_mu(mu)?;
    let fp = fixed_points(mu)?;
    let one = mu.int(1);
    let cap = (one.clone() - fp.theta_prime.square()).recip();
    let mut d = PathDerivatives::start(mu);
    d.extend_to(q);
    let g = mu.guard();
    for j in 0..q {
        let bad = d.b1[j] < one.clone() - g.clone()
            || d.b1[j] > cap.clone() + g.clone()
            || d.b2[j] < -g.clone();
        if bad {
            return Err(Error::PrecisionCap { cap: mu.prec() });
        }
    }
    Ok(d)
}

/// `δ'(T, μ) = Σ_paths b'_q / b_q²`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftDerivative<R> {
    pub value: R,
    pub contributions: Vec<R>,
}

/// Shared `b, b'` table for drift derivatives at a fixed `μ`.
struct DerivTable<R> {
    d: PathDerivatives<R>,
}

impl<R: Real> DerivTable<R> {
    fn new(mu: &R) -> Self {
        DerivTable {
            d: PathDerivatives::start(mu),
        }
    }

    fn derivative(&mut self, t: &Starlike) -> DriftDerivative<R> {
        self.d.extend_to(t.height() as usize);
        let contributions: Vec<R> = t
            .paths()
            .iter()
            .map(|&q| {
                let i = q as usize - 1;
                self.d.b1[i].clone() / self.d.b[i].square()
            })
            .collect();
        let value = contributions
            .iter()
            .fold(self.d.mu.int(0), |a, c| a + c.clone());
        DriftDerivative {
            value,
            contributions,
        }
    }
}

pub fn drift_derivative<R: Real>(t: &Starlike, mu: &R) -> Result<DriftDerivative<R>, Error> {
    check_mu(mu)?;
    Ok(DerivTable::new(mu).derivative(t))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// `α_k` collapsed: `ratio = α_k / α_{⌈k/2⌉}`.
    ConvergesToMu { ratio: f64, alpha_last: f64 },
    /// `α_j` levels off at `plateau`, so the limit stays below `μ`.
    StalledBelow { plateau: f64 },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ConvergesToMu { .. } => "converges_to_mu",
            Verdict::StalledBelow { .. } => "stalled_below",
        }
    }
}

/// Linearized bounds for `G_k` at `μ`, computed along the interior stream
/// `T_1..T_k`.
///
/// `a[j] = A_j = β_j = 1 + δ'(T_j)`, `b[j] = B_j = 1/S_j²`,
/// `x[j] = X_j = A_j + B_{j-1} X_{j-1}`, `alpha[j] = -S_j / X_j`
/// (all 0-based in storage). `alpha_closed` is the same bound for the
/// closing entry: it uses `C_k` in place of `T_k` and the end term `-1`,
/// which is `ε`-independent and drops from the derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub mu: BigReal,
    pub precision: usize,
    pub s: Vec<BigReal>,
    pub a: Vec<BigReal>,
    pub b: Vec<BigReal>,
    pub x: Vec<BigReal>,
    pub alpha: Vec<BigReal>,
    pub alpha_closed: BigReal,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    /// `α_j`, 1-based.
    pub fn alpha_at(&self, j: usize) -> &BigReal {
        &self.alpha[j - 1]
    }

    pub fn beta(&self) -> &[BigReal] {
        &self.a
    }

    /// `X_j = Σ_{m <= j} A_m Π_{n=m}^{j-1} B_n` for `j = 1..=k`.
    pub fn x_closed_sum(&self) -> Vec<BigReal> {
        let zero = self.mu.int(0);
        (0..self.k())
            .map(|j| {
                let mut acc = zero.clone();
                let mut prod = self.mu.int(1);
                for m in (0..=j).rev() {
                    acc = acc + self.a[m].clone() * prod.clone();
                    if m > 0 {
                        prod = prod * self.b[m - 1].clone();
                    }
                }
                acc
            })
            .collect()
    }
}

fn verdict(alpha: &[BigReal]) -> Verdict {
    let k = alpha.len();
    let last = alpha[k - 1].to_f64();
    let mid = alpha[(k + 1) / 2 - 1].to_f64();
    if last < 1e-12 || (k > 1 && last <= mid * 1e-3) {
        Verdict::ConvergesToMu {
            ratio: last / mid,
            alpha_last: last,
        }
    } else {
        Verdict::StalledBelow { plateau: last }
    }
}

/// Certificate at a fixed precision.
pub fn certificate_at(spec: &SequenceSpec, mu: &BigReal, k: usize) -> Result<Certificate, Error> {
    check_mu(mu)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let report = dominated_check(spec, mu, k)?;
    if let Some(v) = report.first_violation {
        return Err(Error::Domain(format!(
            "spec is not dominated at μ = {}: {v:?}",
            report.mu
        )));
    }
    let kern = PathKernel::laplacian(mu.clone());
    let mut paths = PathTable::new(mu);
    let mut ders = DerivTable::new(mu);
    let one = mu.int(1);
    let (mut s, mut a, mut b, mut x, mut alpha): (
        Vec<BigReal>,
        Vec<BigReal>,
        Vec<BigReal>,
        Vec<BigReal>,
        Vec<BigReal>,
    ) = Default::default();
    let mut closed = None;
    for j in 0..k {
        let base = if j == 0 {
            one.clone() - mu.clone()
        } else {
            kern.apply(&s[j - 1])
        };
        let carry = if j == 0 {
            mu.int(0)
        } else {
            b[j - 1].clone() * x[j - 1].clone()
        };
        if j == k - 1 {
            let c = spec.c(k);
            let sc = if k == 1 {
                paths.drift(&c) - mu.clone()
            } else {
                base.clone() + paths.drift(&c) - one.clone()
            };
            let xc = one.clone() + ders.derivative(&c).value + carry.clone();
            closed = Some(-sc / xc);
        }
        let t = spec.t(j + 1);
        let sj = base + paths.drift(&t);
        let aj = one.clone() + ders.derivative(&t).value;
        let xj = aj.clone() + carry;
        alpha.push(-sj.clone() / xj.clone());
        b.push(sj.square().recip());
        s.push(sj);
        a.push(aj);
        x.push(xj);
    }
    let verdict = verdict(&alpha);
    Ok(Certificate {
        mu: mu.clone(),
        precision: mu.prec(),
        s,
        a,
        b,
        x,
        alpha,
        alpha_closed: closed.expect("k >= 1"),
        verdict,
    })
}

/// Certificate with precision escalation: starting at 256 bits, the
/// precision doubles while some `|α_j| < 2^(-prec/4)`, up to 8192 bits.
pub fn alpha_certificate(spec: &SequenceSpec, mu: &Expr, k: usize) -> Result<Certificate, Error> {
    let mut prec = DEFAULT_PREC;
    loop {
        let m = mu.eval(prec);
        let cert = certificate_at(spec, &m, k)?;
        let floor = m.pow2(-((prec / 4) as i32));
        if cert.alpha.iter().all(|a| a.abs() >= floor) {
            return Ok(cert);
        }
        if prec >= MAX_PREC {
            return Err(Error::PrecisionCap { cap: MAX_PREC });
        }
        prec *= 2;
    }
}

/// `g_j(ε)`: interior `S_j` of the spec at `μ - ε`. `None` when an earlier
/// entry is already nonnegative (past the first root, where `g_j` has a pole).
pub fn g_value(spec: &SequenceSpec, mu: &BigReal, eps: &BigReal, j: usize) -> Option<BigReal> {
    let m = mu.clone() - eps.clone();
    let kern = PathKernel::laplacian(m.clone());
    let mut paths = PathTable::new(&m);
    let mut s = m.int(1) - m.clone() + paths.drift(&spec.t(1));
    for i in 2..=j {
        if !s.is_negative() {
            return None;
        }
        s = kern.apply(&s) + paths.drift(&spec.t(i));
    }
    Some(s)
}

fn g_nonneg(spec: &SequenceSpec, mu: &BigReal, eps: &BigReal, j: usize) -> bool {
    g_value(spec, mu, eps, j).map_or(true, |v| !v.is_negative())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonEntry {
    pub j: usize,
    /// `None` when `g_j` stays negative up to `ε = μ - 4`: then
    /// `ρ_L(G_j) <= 4` and the root lies outside the domain of `g_j`.
    pub epsilon: Option<BigReal>,
    pub alpha: BigReal,
    /// `g_j(α_j) >= 0`; `None` when `α_j >= μ - 4`.
    pub convex: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonReport {
    pub entries: Vec<EpsilonEntry>,
    /// `ε_j < α_j` on every solved entry.
    pub below_alpha: bool,
    /// Solved `ε_j` strictly decreasing in `j`.
    pub decreasing: bool,
}

pub const BISECTION_STEPS: usize = 200;

/// Roots `ε_j` of `g_j` on `(0, μ - 4)` by bisection. The bracket is
/// `(0, α_j]` when `g_j(α_j) >= 0` (the convexity witness). `j_list` is
/// sorted and deduplicated.
pub fn epsilon_sequence(
    spec: &SequenceSpec,
    mu: &Expr,
    k: usize,
    j_list: &[usize],
) -> Result<EpsilonReport, Error> {
    let mut js: Vec<usize> = j_list.to_vec();
    js.sort_unstable();
    js.dedup();
    let k = k.max(js.last().copied().unwrap_or(0));
    let cert = alpha_certificate(spec, mu, k)?;
    let m = cert.mu.clone();
    let zero = m.int(0);
    let two = m.int(2);
    let edge = m.clone() - m.int(4);
    let mut entries = Vec::with_capacity(js.len());
    for &j in &js {
        if j == 0 || j > k {
            return Err(Error::Domain(format!("j = {j} outside 1..={k}")));
        }
        let g0 = g_value(spec, &m, &zero, j).expect("dominated");
        if !g0.is_negative() {
            return Err(Error::Bracket {
                index: j,
                value: g0.to_f64(),
            });
        }
        let alpha = cert.alpha_at(j).clone();
        let convex = (alpha < edge).then(|| g_nonneg(spec, &m, &alpha, j));
        let mut hi = if convex == Some(true) {
            alpha.clone()
        } else {
            edge.clone()
        };
        let epsilon = if g_nonneg(spec, &m, &hi, j) {
            let mut lo = zero.clone();
            for _ in 0..BISECTION_STEPS {
                let mid = (lo.clone() + hi.clone()) / two.clone();
                if g_nonneg(spec, &m, &mid, j) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some((lo + hi) / two.clone())
        } else {
            None
        };
        entries.push(EpsilonEntry {
            j,
            epsilon,
            alpha,
            convex,
        });
    }
    let solved: Vec<&EpsilonEntry> = entries.iter().filter(|e| e.epsilon.is_some()).collect();
    let below_alpha = solved
        .iter()
        .all(|e| e.epsilon.as_ref().unwrap() < &e.alpha);
    let decreasing = solved.windows(2).all(|w| w[1].epsilon < w[0].epsilon);
    Ok(EpsilonReport {
        entries,
        below_alpha,
        decreasing,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Growth {
    /// `X_k` exceeds the threshold and `X_{j+m} > X_j` over the second half.
    DivergenceEvidence {
        x_last: f64,
        min_ratio: f64,
    },
    Bounded {
        sup: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct XGrowth {
    pub x: Vec<BigReal>,
    pub growth: Growth,
    /// Largest relative difference between the recurrence and the closed sum.
    pub closed_sum_rel_diff: f64,
    /// Largest relative difference between `α_j` and `-S_j/X_j`.
    pub alpha_identity_rel_diff: f64,
}

pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// `X_j` growth. Unboundedness cannot be decided from finite data; this
/// reports evidence only.
pub fn x_growth(
    spec: &SequenceSpec,
    mu: &Expr,
    k: usize,
    threshold: f64,
) -> Result<XGrowth, Error> {
    let cert = alpha_certificate(spec, mu, k)?;
    let rel = |p: &BigReal, q: &BigReal| ((p.clone() - q.clone()).abs() / q.abs()).to_f64();
    let closed = cert.x_closed_sum();
    let closed_sum_rel_diff = cert
        .x
        .iter()
        .zip(&closed)
        .map(|(p, q)| rel(p, q))
        .fold(0.0, f64::max);
    let alpha_identity_rel_diff = (0..cert.k())
        .map(|j| rel(&(-cert.s[j].clone() / cert.x[j].clone()), &cert.alpha[j]))
        .fold(0.0, f64::max);
    let xs: Vec<f64> = cert.x.iter().map(Real::to_f64).collect();
    let n = xs.len();
    let m = (n / 10).max(1);
    let min_ratio = (n / 2..n.saturating_sub(m))
        .map(|j| xs[j + m] / xs[j])
        .fold(f64::INFINITY, f64::min);
    let x_last = xs[n - 1];
    let growth = if x_last > threshold && min_ratio > 1.0 {
        Growth::DivergenceEvidence { x_last, min_ratio }
    } else {
        Growth::Bounded {
            sup: xs.iter().cloned().fold(0.0, f64::max),
        }
    };
    Ok(XGrowth {
        x: cert.x,
        growth,
        closed_sum_rel_diff,
        alpha_identity_rel_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lemma34() -> SequenceSpec {
        SequenceSpec::named("lemma34").unwrap()
    }

    fn mu_star() -> Expr {
        Expr::parse("(5+sqrt(33))/2").unwrap()
    }

    fn close(a: &BigReal, e: f64, rel: f64) -> bool {
        (a.to_f64() - e).abs() <= rel * e.abs()
    }

    #[test]
    fn path_derivative_values() {
        let d = path_derivatives(200, &5.4).unwrap();
        assert_eq!(d.b1[0], 1.0);
        assert_eq!(d.b2[0], 0.0);
        assert!((d.b1[1] - (1.0 + 1.0 / (4.4f64 * 4.4))).abs() < 1e-15);
        let tp = fixed_points(&5.4).unwrap().theta_prime;
        assert!(d
            .b1
            .iter()
            .all(|&v| (1.0..=1.0 / (1.0 - tp * tp)).contains(&v)));
        assert!(d.b2.iter().all(|&v| v >= 0.0));
        assert!(path_derivatives(3, &4.0).is_err());
    }

    #[test]
    fn drift_derivative_values() {
        let mu = 5.4;
        assert_eq!(
            drift_derivative(&Starlike::empty(), &mu).unwrap().value,
            0.0
        );
        let one = drift_derivative(&Starlike::leaves(1), &mu).unwrap().value;
        assert!((one - 1.0 / (4.4f64 * 4.4)).abs() < 1e-15);
        let th = fixed_points(&mu).unwrap().theta;
        let t = Starlike::new(vec![1, 3, 9]).unwrap();
        let d = drift_derivative(&t, &mu).unwrap();
        assert_eq!(d.contributions.len(), 3);
        assert!(d.value <= 3.0 / (th * th - 1.0));
        // matches a centered difference of δ(T, μ - ε)
        let h = 1e-6;
        let fd =
            (PathTable::new(&(mu - h)).drift(&t) - PathTable::new(&(mu + h)).drift(&t)) / (2.0 * h);
        assert!((fd - d.value).abs() < 1e-7);
    }

    #[test]
    fn alpha_at_mu_star() {
        let c = alpha_certificate(&lemma34(), &mu_star(), 190).unwrap();
        assert!(close(c.alpha_at(1), 0.5930703308, 1e-9));
        assert!(close(c.alpha_at(10), 0.000372637798, 1e-8));
        assert!(close(c.alpha_at(100), 1.334855995e-33, 1e-8));
        assert!(close(c.alpha_at(150), 5.844537018e-50, 1e-8));
        assert!(close(c.alpha_at(190), 4.784126688e-63, 1e-8));
        assert!(c.precision >= 1024);
        assert!(matches!(c.verdict, Verdict::ConvergesToMu { .. }));
        assert!(c.alpha.iter().all(|a| a.is_positive()));
    }

    #[test]
    fn alpha_plateau_at_5_4() {
        let c = alpha_certificate(&lemma34(), &Expr::parse("5.4").unwrap(), 100).unwrap();
        assert!(close(c.alpha_at(1), 0.621824686940966, 1e-13));
        assert!(close(c.alpha_at(10), 0.670219903628817, 1e-13));
        let digits = |a: &BigReal, e: &str| {
            let e = BigReal::parse_decimal(e, a.prec()).unwrap();
            ((a.clone() - e.clone()).abs() / e).to_f64()
        };
        assert!(digits(c.alpha_at(50), "0.807268557543450193961813121639") < 1e-26);
        assert!(digits(c.alpha_at(100), "0.807268557543452357547180905158") < 1e-26);
        assert!(matches!(c.verdict, Verdict::StalledBelow { .. }));
    }

    #[test]
    fn closed_sum_form_matches() {
        let c = alpha_certificate(&lemma34(), &Expr::parse("5.4").unwrap(), 30).unwrap();
        for j in 1..30 {
            let prev = c.alpha[j - 1].clone();
            let denom = c.a[j].clone() - c.s[j - 1].recip() * prev.recip();
            let v = -c.s[j].clone() / denom;
            assert!(((v - c.alpha[j].clone()).abs() / c.alpha[j].clone()).to_f64() < 1e-60);
        }
    }

    #[test]
    fn genetic_alpha() {
        let g = SequenceSpec::named("genetic29").unwrap();
        let c = alpha_certificate(&g, &Expr::parse("5.4").unwrap(), 29).unwrap();
        assert!(close(c.alpha_at(29), 0.000100591492204, 1e-10));
    }

    #[test]
    fn epsilon_roots() {
        let r = epsilon_sequence(&lemma34(), &mu_star(), 50, &[1, 2, 10, 50]).unwrap();
        assert!(r.below_alpha && r.decreasing);
        assert!(r
            .entries
            .iter()
            .all(|e| e.convex == Some(true) && e.epsilon.as_ref().unwrap().is_positive()));
        let e1 = r.entries[0].epsilon.as_ref().unwrap().to_f64();
        // ε_1 solves S_1 = 1 - μ_ε + 3(μ_ε/(μ_ε-1)) = 0
        let m = mu_star().to_f64() - e1;
        assert!((1.0 - m + 3.0 * m / (m - 1.0)).abs() < 1e-12);
        let not_dom = SequenceSpec::parse("[[1,1,1,1]]").unwrap();
        assert!(epsilon_sequence(&not_dom, &Expr::parse("5.4").unwrap(), 3, &[1]).is_err());
        // ρ_L([[1]]) = 2 < 4: the root of g_1 lies past μ - 4
        let short = SequenceSpec::parse("[[1],[1,1]]").unwrap();
        let r = epsilon_sequence(&short, &Expr::parse("5.4").unwrap(), 2, &[1]).unwrap();
        assert_eq!(r.entries[0].epsilon, None);
    }

    #[test]
    fn x_recurrence_and_sum() {
        let g = x_growth(&lemma34(), &mu_star(), 120, DIVERGENCE_THRESHOLD).unwrap();
        assert!(matches!(g.growth, Growth::DivergenceEvidence { .. }));
        assert!(g.closed_sum_rel_diff < 1e-60);
        assert!(g.alpha_identity_rel_diff < 1e-60);
        let c = alpha_certificate(&lemma34(), &mu_star(), 4).unwrap();
        assert_eq!(c.x[0], c.a[0]);
        let (a, b) = (&c.a, &c.b);
        let x4 = a[3].clone()
            + a[2].clone() * b[2].clone()
            + a[1].clone() * b[1].clone() * b[2].clone()
            + a[0].clone() * b[0].clone() * b[1].clone() * b[2].clone();
        assert!(((x4 - c.x[3].clone()).abs() / c.x[3].clone()).to_f64() < 1e-70);
        let s = x_growth(
            &lemma34(),
            &Expr::parse("5.4").unwrap(),
            80,
            DIVERGENCE_THRESHOLD,
        )
        .unwrap();
        assert!(matches!(s.growth, Growth::Bounded { .. }));
    }
}
