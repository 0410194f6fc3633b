//! Spectral radii by sign-count bisection, fixed points of the path maps,
//! and an exact characteristic-polynomial oracle.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::diagonalize::{inertia_at, pi_trace, Inertia, PathKernel, SignEntry};
use crate::error::Error;
use crate::numeric::Real;
use crate::poly::{largest_real_root, Polynomial, RootCounter, RootInterval};
use crate::tree_model::{realize, LinearTree, MatrixKind, RootedTree};

/// Largest tree the exact oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 64;

/// Fixed points of `ψ(t) = 2 - μ - 1/t` (or `φ(t) = -λ - 1/t`).
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoints<R> {
    /// Attracting.
    pub theta: R,
    /// Repelling.
    pub theta_prime: R,
    pub mu: R,
}

/// `θ, θ'` for the Laplacian map; requires `μ > 4`.
pub fn fixed_points<R: Real>(mu: &R) -> Result<FixedPoints<R>, Error> {
    if *mu <= mu.int(4) {
        return Err(Error::Domain(format!(
            "fixed points need μ > 4, got {}",
            mu.to_f64()
        )));
    }
    let (theta, theta_prime) = PathKernel::laplacian(mu.clone()).fixed_points()?;
    Ok(FixedPoints {
        theta,
        theta_prime,
        mu: mu.clone(),
    })
}

/// Fixed points of the adjacency map; requires `λ > 2`.
pub fn adjacency_fixed_points<R: Real>(lambda: &R) -> Result<FixedPoints<R>, Error> {
    if *lambda <= lambda.int(2) {
        return Err(Error::Domain(format!(
            "adjacency fixed points need λ > 2, got {}",
            lambda.to_f64()
        )));
    }
    let (theta, theta_prime) = PathKernel::adjacency(lambda.clone()).fixed_points()?;
    Ok(FixedPoints {
        theta,
        theta_prime,
        mu: lambda.clone(),
    })
}

/// Fixed points of the drifted map `ψ̃(t) = c - 1/t`, `c = 2 - μ + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaPoints<R> {
    /// Attracting (`|σ| > 1`).
    pub sigma: R,
    pub sigma_prime: R,
    pub c: R,
}

/// The drift `μ/(μ-1)` contributed by a single leaf.
pub fn leaf_drift<R: Real>(mu: &R) -> R {
    mu.clone() / (mu.clone() - mu.int(1))
}

pub fn sigma_points<R: Real>(mu: &R, d: &R) -> Result<SigmaPoints<R>, Error> {
    let c = mu.int(2) - mu.clone() + d.clone();
    let disc = c.square() - mu.int(4);
    if !disc.is_positive() {
        return Err(Error::Domain(format!(
            "(2 - μ + d)² = {} does not exceed 4",
            c.square().to_f64()
        )));
    }
    let root = disc.sqrt();
    // pick the root of larger magnitude as σ
    let sigma = if c.is_negative() {
        (c.clone() - root) / mu.int(2)
    } else {
        (c.clone() + root) / mu.int(2)
    };
    let sigma_prime = sigma.recip();
    Ok(SigmaPoints {
        sigma,
        sigma_prime,
        c,
    })
}

/// `W_j = ψ̃^{j-1}(start)` in closed form.
pub fn closed_form_orbit<R: Real>(start: &R, mu: &R, d: &R, j: usize) -> Result<R, Error> {
    if j == 0 {
        return Err(Error::Domain("orbit index starts at 1".into()));
    }
    let sp = sigma_points(mu, d)?;
    let (s, s1) = (sp.sigma, sp.sigma_prime);
    if *start == s {
        return Ok(s);
    }
    let beta = (s1.clone() - s.clone()) / (start.clone() - s.clone()) - mu.int(1);
    let pow = s.powi(2 * (j as u64 - 1));
    Ok(s.clone() + (s1 - s) / (beta * pow + mu.int(1)))
}

/// Result of a bisection for `ρ_M(G)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusResult<R> {
    pub value: R,
    /// Final bracket: `lo < ρ <= hi`, or `lo == hi == ρ` when hit exactly.
    pub lo: R,
    pub hi: R,
    pub iterations: usize,
    pub kind: MatrixKind,
    pub tol: R,
    pub exact: bool,
}

/// Default bisection tolerance: `1e-12` for `f64`, `2^(16-prec)` otherwise.
pub fn default_tol<R: Real>(like: &R) -> R {
    if like.prec() <= 53 {
        R::from_f64(1e-12, 53)
    } else {
        like.pow2(16 - like.prec() as i32)
    }
}

struct Counter<'a> {
    g: Option<&'a LinearTree>,
    tree: RootedTree,
}

impl Counter<'_> {
    fn inertia<R: Real>(&self, x: &R) -> Inertia {
        let fast = matches!(
            self.tree.kind(),
            MatrixKind::Laplacian | MatrixKind::SignlessLaplacian
        ) && *x > x.int(4);
        if let (true, Some(g)) = (fast, self.g) {
            if let Ok(tr) = pi_trace(g, x) {
                let mut inertia = Inertia {
                    below: self.tree.len() - tr.s_values.len(),
                    ..Inertia::default()
                };
                for s in &tr.sign_vector {
                    match s {
                        SignEntry::Neg => inertia.below += 1,
                        SignEntry::Zero => inertia.equal += 1,
                        SignEntry::Pos => inertia.above += 1,
                    }
                }
                return inertia;
            }
        }
        inertia_at(&self.tree, x)
    }
}

fn bisect<R: Real>(
    c: &Counter<'_>,
    mut lo: R,
    mut hi: R,
    tol: &R,
    check_lo: bool,
) -> RadiusResult<R> {
    let kind = c.tree.kind();
    let two = lo.int(2);
    let done = |v: R, it: usize| RadiusResult {
        value: v.clone(),
        lo: v.clone(),
        hi: v,
        iterations: it,
        kind,
        tol: tol.clone(),
        exact: true,
    };
    if check_lo {
        let i = c.inertia(&lo);
        if i.above == 0 && i.equal > 0 {
            return done(lo, 0);
        }
    }
    let mut it = 0;
    while hi.clone() - lo.clone() > *tol {
        it += 1;
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let i = c.inertia(&mid);
        if i.above > 0 {
            lo = mid;
        } else if i.equal > 0 {
            return done(mid, it);
        } else {
            hi = mid;
        }
    }
    let value = (lo.clone() + hi.clone()) / two;
    RadiusResult {
        value,
        lo,
        hi,
        iterations: it,
        kind,
        tol: tol.clone(),
        exact: false,
    }
}

fn single_vertex<R: Real>(tol: &R, kind: MatrixKind) -> RadiusResult<R> {
    let z = tol.int(0);
    RadiusResult {
        value: z.clone(),
        lo: z.clone(),
        hi: z,
        iterations: 0,
        kind,
        tol: tol.clone(),
        exact: true,
    }
}

fn radius_impl<R: Real>(c: Counter<'_>, tol: &R) -> Result<RadiusResult<R>, Error> {
    if !tol.is_positive() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let t = &c.tree;
    let kind = t.kind();
    if t.len() == 1 {
        return Ok(single_vertex(tol, kind));
    }
    let delta = t.max_degree() as i64;
    match kind {
        MatrixKind::Adjacency => {
            let n = t.len() as i64;
            let avg = tol.int(2 * (n - 1)) / tol.int(n);
            let sq = tol.int(delta).sqrt();
            let base = if avg > sq { avg } else { sq };
            let lo = base - tol.clone();
            let hi = tol.int(delta);
            Ok(bisect(&c, lo, hi, tol, false))
        }
        _ => {
            let lo = tol.int(delta + 1);
            let hi = tol.int(t.max_edge_degree_sum() as i64);
            Ok(bisect(&c, lo, hi, tol, true))
        }
    }
}

/// `ρ_M(G)` with `|value - ρ| <= tol`.
pub fn radius<R: Real>(
    g: &LinearTree,
    kind: MatrixKind,
    tol: &R,
) -> Result<RadiusResult<R>, Error> {
    radius_impl(
        Counter {
            g: Some(g),
            tree: realize(g, kind),
        },
        tol,
    )
}

/// `ρ_M` of an explicit tree through the generic diagonalization.
pub fn radius_of_tree<R: Real>(t: &RootedTree, tol: &R) -> Result<RadiusResult<R>, Error> {
    radius_impl(
        Counter {
            g: None,
            tree: t.clone(),
        },
        tol,
    )
}

/// Laplacian spectral radius in `f64` to `1e-12`.
pub fn laplacian_radius(g: &LinearTree) -> f64 {
    radius(g, MatrixKind::Laplacian, &1e-12)
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

fn check_size(t: &RootedTree) -> Result<(), Error> {
    if t.len() > ORACLE_MAX_VERTICES {
        return Err(Error::SizeExceeded {
            n: t.len(),
            max: ORACLE_MAX_VERTICES,
        });
    }
    Ok(())
}

/// `det(xI - M)` by peeling leaves: each vertex carries the characteristic
/// polynomial of its subtree with and without itself.
pub fn char_poly(t: &RootedTree) -> Result<Polynomial, Error> {
    check_size(t)?;
    let n = t.len();
    let mut f: Vec<Polynomial> = Vec::with_capacity(n);
    let mut g: Vec<Polynomial> = Vec::with_capacity(n);
    for v in 0..n {
        let kids = t.children(v);
        let m = kids.len();
        // prefix[i] = Π_{c < i} f_c, suffix[i] = Π_{c >= i} f_c
        let mut prefix = vec![Polynomial::one(); m + 1];
        for (i, &c) in kids.iter().enumerate() {
            prefix[i + 1] = &prefix[i] * &f[c];
        }
        let mut suffix = vec![Polynomial::one(); m + 1];
        for i in (0..m).rev() {
            suffix[i] = &suffix[i + 1] * &f[kids[i]];
        }
        let gv = prefix[m].clone();
        let lin = Polynomial::new(vec![
            BigRational::from_integer(BigInt::from(-t.diag(v))),
            BigRational::from_integer(BigInt::from(1)),
        ]);
        let mut fv = &lin * &gv;
        for (i, &c) in kids.iter().enumerate() {
            let others = &prefix[i] * &suffix[i + 1];
            fv = &fv - &(&g[c] * &others);
        }
        f.push(fv);
        g.push(gv);
    }
    Ok(f.pop().expect("nonempty tree"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRadius {
    pub value: f64,
    pub interval: RootInterval,
    pub char_poly: Polynomial,
}

/// Largest eigenvalue from the exact characteristic polynomial, refined to
/// an interval of width at most `2^-40`.
pub fn oracle_radius(t: &RootedTree) -> Result<OracleRadius, Error> {
    let p = char_poly(t)?;
    let w = BigRational::new(BigInt::from(1), BigInt::from(1u64 << 40));
    let iv = largest_real_root(&p, &w).expect("symmetric matrices have real eigenvalues");
    Ok(OracleRadius {
        value: iv.midpoint_f64(),
        interval: iv,
        char_poly: p,
    })
}

/// Exact eigenvalue counts relative to a rational `x`.
pub fn oracle_inertia(t: &RootedTree, x: &BigRational) -> Result<Inertia, Error> {
    Ok(InertiaOracle::new(t)?.at(x))
}

/// [`oracle_inertia`] with the characteristic polynomial built once per tree.
#[derive(Clone, Debug)]
pub struct InertiaOracle {
    counter: RootCounter,
}

impl InertiaOracle {
    pub fn new(t: &RootedTree) -> Result<InertiaOracle, Error> {
        Ok(InertiaOracle {
            counter: RootCounter::new(&char_poly(t)?),
        })
    }

    pub fn at(&self, x: &BigRational) -> Inertia {
        let (below, equal, above) = self.counter.counts(x);
        Inertia {
            below,
            equal,
            above,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rel_diff, BigReal};
    use crate::tree_model::parse_linear_tree;

    fn lt(s: &str) -> LinearTree {
        parse_linear_tree(s).unwrap()
    }

    fn rad(s: &str) -> f64 {
        laplacian_radius(&lt(s))
    }

    #[test]
    fn radius_examples() {
        assert_eq!(rad("[[1]]"), 2.0);
        assert!((rad("[[1],[1,2]]") - 4.302775637731995).abs() < 1e-11);
        let r = radius(&lt("[[1,1,1]]"), MatrixKind::Laplacian, &1e-12).unwrap();
        assert!((r.value - 4.0).abs() < 1e-12);
        // exact hit at the lower bracket end
        let r = radius(&lt("[[1]]"), MatrixKind::Laplacian, &1e-12).unwrap();
        assert!(r.exact && r.iterations == 0);
        assert_eq!(rad("[[0]]"), 0.0);
        assert!((rad("[[1,1],[1,1,1,1]]") - 6.141336115655361).abs() < 1e-11);
    }

    #[test]
    fn radius_big_precision() {
        let g = lt("[[1],[1,2]]");
        let tol = BigReal::from_int(1, 256).pow2(-200);
        let r = radius(&g, MatrixKind::Laplacian, &tol).unwrap();
        let o = oracle_radius(&realize(&g, MatrixKind::Laplacian)).unwrap();
        assert!((r.value.to_f64() - o.value).abs() < 1e-12);
        assert!(r.hi.clone() - r.lo.clone() <= tol);
    }

    #[test]
    fn adjacency_and_signless() {
        // adjacency radius of the star K_{1,3} is sqrt(3)
        let g = lt("[[1,1,1]]");
        let a = radius(&g, MatrixKind::Adjacency, &1e-12).unwrap();
        assert!((a.value - 3f64.sqrt()).abs() < 1e-11);
        let g = lt("[[1],[2,3],[1,1]]");
        let l = radius(&g, MatrixKind::Laplacian, &1e-12).unwrap().value;
        let q = radius(&g, MatrixKind::SignlessLaplacian, &1e-12)
            .unwrap()
            .value;
        assert!((l - q).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_identities() {
        let fp = fixed_points(&5.4).unwrap();
        assert!((fp.theta + 3.074772708486753).abs() < 1e-12);
        assert!((fp.theta_prime + 0.32522729151324705).abs() < 1e-12);
        assert!((fp.theta * fp.theta_prime - 1.0).abs() < 1e-15);
        let six = fixed_points(&6.0).unwrap();
        assert!((six.theta - (-2.0 - 3f64.sqrt())).abs() < 1e-15);
        assert!((six.theta_prime - (-2.0 + 3f64.sqrt())).abs() < 1e-15);
        let near = fixed_points(&4.000001).unwrap();
        assert!((near.theta + 1.0).abs() < 2e-3 && (near.theta_prime + 1.0).abs() < 2e-3);
        assert!(fixed_points(&4.0).is_err());
        let big = fixed_points(&BigReal::from_int(6, 512)).unwrap();
        let prod = big.theta.clone() * big.theta_prime.clone();
        assert!((prod - BigReal::from_int(1, 512)).abs() < BigReal::from_int(1, 512).pow2(-500));
    }

    #[test]
    fn sigma_points_examples() {
        let mu = 5.4;
        let sp = sigma_points(&mu, &leaf_drift(&mu)).unwrap();
        assert!((sp.sigma * sp.sigma_prime - 1.0).abs() < 1e-15);
        assert!((sp.sigma + sp.sigma_prime - sp.c).abs() < 1e-15);
        let z = sigma_points(&mu, &0.0).unwrap();
        let fp = fixed_points(&mu).unwrap();
        assert!((z.sigma - fp.theta).abs() < 1e-15);
        // at μ*, S_1 of a first star [1,1,1] equals σ'
        let ms = (5.0 + 33f64.sqrt()) / 2.0;
        let sp = sigma_points(&ms, &leaf_drift(&ms)).unwrap();
        let s1 = 1.0 - ms + 3.0 * leaf_drift(&ms);
        assert!((s1 - sp.sigma_prime).abs() < 1e-12);
        assert!(sigma_points(&5.4, &3.4).is_err());
    }

    #[test]
    fn closed_form_matches_iteration() {
        let mu: f64 = 5.4;
        let d = leaf_drift(&mu);
        let start = -0.718181818181818;
        assert!(rel_diff(&closed_form_orbit(&start, &mu, &d, 1).unwrap(), &start) < 1e-15);
        let mut w = start;
        for _ in 0..24 {
            w = 2.0 - mu + d - 1.0 / w;
        }
        let cf = closed_form_orbit(&start, &mu, &d, 25).unwrap();
        assert!(rel_diff(&cf, &w) < 1e-12);
        let far = closed_form_orbit(&start, &mu, &d, 200).unwrap();
        let sp = sigma_points(&mu, &d).unwrap();
        assert!((far - sp.sigma).abs() < 1e-12);
        assert_eq!(closed_form_orbit(&sp.sigma, &mu, &d, 7).unwrap(), sp.sigma);
    }

    #[test]
    fn oracle_examples() {
        let p3 = realize(&lt("[[2]]"), MatrixKind::Laplacian);
        let cp = char_poly(&p3).unwrap();
        assert_eq!(cp, Polynomial::from_ints_desc(&[1, -4, 3, 0]));
        assert!((oracle_radius(&p3).unwrap().value - 3.0).abs() < 1e-12);
        let k14 = realize(&lt("[[1,1,1,1]]"), MatrixKind::Laplacian);
        assert!((oracle_radius(&k14).unwrap().value - 5.0).abs() < 1e-12);
        let c = realize(&lt("[[1,1],[1,1,1,1]]"), MatrixKind::Laplacian);
        assert!((oracle_radius(&c).unwrap().value - 6.141336115655361).abs() < 1e-11);
        let q14 = realize(&lt("[[1,1,1,1]]"), MatrixKind::SignlessLaplacian);
        assert_eq!(char_poly(&q14).unwrap(), char_poly(&k14).unwrap());
        let big = realize(&lt("[[30],[34]]"), MatrixKind::Laplacian);
        assert!(matches!(
            oracle_radius(&big),
            Err(Error::SizeExceeded { n: 66, .. })
        ));
    }

    #[test]
    fn oracle_inertia_matches_diagonalization() {
        let t = realize(&lt("[[1],[2,3],[1,1]]"), MatrixKind::Laplacian);
        for x in [0i64, 1, 2, 3, 4, 5] {
            let q = BigRational::from_integer(BigInt::from(x));
            assert_eq!(
                oracle_inertia(&t, &q).unwrap(),
                inertia_at(&t, &q),
                "x = {x}"
            );
        }
    }
}
