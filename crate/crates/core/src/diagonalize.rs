//! Congruence diagonalization of tree matrices and the linear-tree
//! specialization `Π(G, μ) = (S_1, ..., S_k)`.
//!
//! Probe convention: to locate eigenvalues relative to `μ`, diagonalize
//! `M + xI` with `x = -μ`. Negative, zero and positive diagonal entries
//! then count eigenvalues below, equal to and above `μ`.

use crate::error::Error;
use crate::numeric::{Field, Real};
use crate::tree_model::{realize, LinearTree, MatrixKind, RootedTree, Starlike};

/// Eigenvalue counts relative to a probe value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Inertia {
    pub below: usize,
    pub equal: usize,
    pub above: usize,
}

impl Inertia {
    pub fn total(&self) -> usize {
        self.below + self.equal + self.above
    }
}

#[derive(Clone, Debug)]
pub struct DiagOutcome<F> {
    pub diagonal: Vec<F>,
    pub inertia: Inertia,
    /// The shift `x` of `M + xI`.
    pub probe: F,
    pub kind: MatrixKind,
}

/// Diagonal matrix congruent to `M + xI` for the tree matrix `M`.
///
/// Vertices are processed bottom-up. A vertex whose children are all
/// nonzero absorbs `-Σ a²/d_c`. If some child `j` is zero, the vertex gets
/// `-a²/2`, the child gets `2`, and the edge to the vertex's parent is cut.
pub fn diagonalize_tree<F: Field>(t: &RootedTree, x: &F) -> DiagOutcome<F> {
    let n = t.len();
    let mut d: Vec<F> = (0..n).map(|v| x.int(t.diag(v)) + x.clone()).collect();
    let mut cut = vec![false; n];
    // off-diagonal entries are ±1, so a² = 1 throughout
    for k in 0..n {
        let kids: Vec<usize> = t.children(k).iter().copied().filter(|&c| !cut[c]).collect();
        if kids.is_empty() {
            continue;
        }
        match kids.iter().find(|&&c| d[c].is_zero()) {
            None => {
                let mut acc = d[k].clone();
                for &c in &kids {
                    acc = acc - d[c].recip();
                }
                d[k] = acc;
            }
            Some(&j) => {
                d[k] = x.int(-1) / x.int(2);
                d[j] = x.int(2);
                cut[k] = true;
            }
        }
    }
    let mut inertia = Inertia::default();
    for v in &d {
        match v.sign() {
            std::cmp::Ordering::Less => inertia.below += 1,
            std::cmp::Ordering::Equal => inertia.equal += 1,
            std::cmp::Ordering::Greater => inertia.above += 1,
        }
    }
    DiagOutcome {
        diagonal: d,
        inertia,
        probe: x.clone(),
        kind: t.kind(),
    }
}

/// Eigenvalue counts of `M` relative to `lambda` (probe `x = -lambda`).
pub fn inertia_at<F: Field>(t: &RootedTree, lambda: &F) -> Inertia {
    diagonalize_tree(t, &(-lambda.clone())).inertia
}

/// `ψ(t) = 2 - μ - 1/t` for Laplacian-type kinds, `φ(t) = -λ - 1/t` for adjacency.
#[derive(Clone, Debug)]
pub struct PathKernel<R> {
    pub param: R,
    pub kind: MatrixKind,
}

impl<R: Real> PathKernel<R> {
    pub fn laplacian(mu: R) -> Self {
        PathKernel {
            param: mu,
            kind: MatrixKind::Laplacian,
        }
    }

    pub fn adjacency(lambda: R) -> Self {
        PathKernel {
            param: lambda,
            kind: MatrixKind::Adjacency,
        }
    }

    pub fn apply(&self, t: &R) -> R {
        let p = &self.param;
        match self.kind {
            MatrixKind::Adjacency => -p.clone() - t.recip(),
            _ => p.int(2) - p.clone() - t.recip(),
        }
    }

    /// Fixed points `(θ, θ')` of the map: attracting, then repelling.
    pub fn fixed_points(&self) -> Result<(R, R), Error> {
        let p = &self.param;
        let c = match self.kind {
            MatrixKind::Adjacency => -p.clone(),
            _ => p.int(2) - p.clone(),
        };
        let disc = c.square() - p.int(4);
        if !disc.is_positive() {
            return Err(Error::Domain(format!(
                "no real fixed points at parameter {}",
                p.to_f64()
            )));
        }
        let theta = (c - disc.sqrt()) / p.int(2);
        let theta_p = theta.recip();
        Ok((theta, theta_p))
    }
}

pub(crate) fn check_mu<R: Real>(mu: &R) -> Result<(), Error> {
    if *mu > mu.int(4) {
        Ok(())
    } else {
        Err(Error::Domain(format!("μ = {} must exceed 4", mu.to_f64())))
    }
}

/// `(b_1, ..., b_q)` with `b_1 = 1 - μ` and `b_{j+1} = ψ(b_j)`.
pub fn path_values<R: Real>(q: usize, mu: &R) -> Result<Vec<R>, Error> {
    check_mu(mu)?;
    if q == 0 {
        return Err(Error::Domain("path length must be at least 1".into()));
    }
    Ok(raw_path_values(q, mu))
}

pub(crate) fn raw_path_values<R: Real>(q: usize, mu: &R) -> Vec<R> {
    let k = PathKernel::laplacian(mu.clone());
    let mut b = Vec::with_capacity(q);
    let mut cur = mu.int(1) - mu.clone();
    for _ in 0..q {
        b.push(cur.clone());
        cur = k.apply(&cur);
    }
    b
}

/// Cached path values `b_1..b_H` at a fixed `μ`, shared across stars.
#[derive(Clone, Debug)]
pub struct PathTable<R> {
    mu: R,
    b: Vec<R>,
}

impl<R: Real> PathTable<R> {
    pub fn new(mu: &R) -> Self {
        PathTable {
            mu: mu.clone(),
            b: Vec::new(),
        }
    }

    /// `b_q` (1-based).
    pub fn value(&mut self, q: u32) -> R {
        let q = q as usize;
        if self.b.len() < q {
            let k = PathKernel::laplacian(self.mu.clone());
            if self.b.is_empty() {
                self.b.push(self.mu.int(1) - self.mu.clone());
            }
            while self.b.len() < q {
                let next = k.apply(self.b.last().expect("nonempty"));
                self.b.push(next);
            }
        }
        self.b[q - 1].clone()
    }

    /// `δ(T, μ) = Σ_paths (1 - 1/b_last)`, zero for `[0]`.
    pub fn drift(&mut self, t: &Starlike) -> R {
        let mut acc = self.mu.int(0);
        for &q in t.paths() {
            let b = self.value(q);
            acc = acc + self.mu.int(1) - b.recip();
        }
        acc
    }

    pub fn tails(&mut self, t: &Starlike) -> Vec<R> {
        t.paths().iter().map(|&q| self.value(q)).collect()
    }
}

/// Drift of a single star.
pub fn drift<R: Real>(t: &Starlike, mu: &R) -> Result<R, Error> {
    check_mu(mu)?;
    Ok(PathTable::new(mu).drift(t))
}

/// `S` values for a run of stars with the given drifts. With `close`, the
/// last entry gets the end correction (`-1`, or `-μ + δ` when there is a
/// single back node, whose degree is just `ω(T_1)`).
pub fn s_recurrence<R: Real>(mu: &R, drifts: &[R], close: bool) -> Vec<R> {
    let k = PathKernel::laplacian(mu.clone());
    let n = drifts.len();
    let mut out: Vec<R> = Vec::with_capacity(n);
    for (j, d) in drifts.iter().enumerate() {
        let s = if j == 0 {
            if close && n == 1 {
                -mu.clone() + d.clone()
            } else {
                mu.int(1) - mu.clone() + d.clone()
            }
        } else {
            let base = k.apply(&out[j - 1]) + d.clone();
            if close && j + 1 == n {
                base - mu.int(1)
            } else {
                base
            }
        };
        out.push(s);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignEntry {
    Neg,
    Zero,
    Pos,
}

impl SignEntry {
    pub fn of<F: Field>(x: &F) -> Self {
        match x.sign() {
            std::cmp::Ordering::Less => SignEntry::Neg,
            std::cmp::Ordering::Equal => SignEntry::Zero,
            std::cmp::Ordering::Greater => SignEntry::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            SignEntry::Neg => '-',
            SignEntry::Zero => '0',
            SignEntry::Pos => '+',
        }
    }
}

/// Back-node values of the diagonalization of `L(G) - μI`.
#[derive(Clone, Debug)]
pub struct PiTrace<R> {
    pub mu: R,
    pub s_values: Vec<R>,
    /// Last path value `b_{q}` of every path, per star.
    pub path_tails: Vec<Vec<R>>,
    pub drifts: Vec<R>,
    pub sign_vector: Vec<SignEntry>,
}

/// `Π(G, μ)`: fails with [`Error::GuardTripped`] if some `|S_j|` is below
/// the backend's guard, in which case the generic algorithm must decide.
pub fn pi_trace<R: Real>(g: &LinearTree, mu: &R) -> Result<PiTrace<R>, Error> {
    check_mu(mu)?;
    let mut table = PathTable::new(mu);
    let drifts: Vec<R> = g.stars().iter().map(|t| table.drift(t)).collect();
    let path_tails = g.stars().iter().map(|t| table.tails(t)).collect();
    let guard = mu.guard();
    let k = PathKernel::laplacian(mu.clone());
    let n = drifts.len();
    let mut s_values: Vec<R> = Vec::with_capacity(n);
    for (j, d) in drifts.iter().enumerate() {
        let s = match (j, n) {
            (0, 1) => -mu.clone() + d.clone(),
            (0, _) => mu.int(1) - mu.clone() + d.clone(),
            _ if j + 1 == n => k.apply(&s_values[j - 1]) + d.clone() - mu.int(1),
            _ => k.apply(&s_values[j - 1]) + d.clone(),
        };
        if s.abs() < guard {
            return Err(Error::GuardTripped {
                index: j + 1,
                magnitude: s.abs().to_f64(),
            });
        }
        s_values.push(s);
    }
    let sign_vector = s_values.iter().map(SignEntry::of).collect();
    Ok(PiTrace {
        mu: mu.clone(),
        s_values,
        path_tails,
        drifts,
        sign_vector,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusClass {
    RadiusBelowMu,
    RadiusEqualsMu,
    RadiusAboveMu,
}

fn class_of(inertia: Inertia) -> RadiusClass {
    if inertia.above > 0 {
        RadiusClass::RadiusAboveMu
    } else if inertia.equal > 0 {
        RadiusClass::RadiusEqualsMu
    } else {
        RadiusClass::RadiusBelowMu
    }
}

/// Position of `ρ_L(G)` relative to `μ`.
///
/// Path values are negative for `μ > 4`, so the sign of `Π` alone decides;
/// when the guard trips the generic diagonalization is used instead.
pub fn classify<R: Real>(g: &LinearTree, mu: &R) -> Result<RadiusClass, Error> {
    check_mu(mu)?;
    match pi_trace(g, mu) {
        Ok(tr) => {
            let mut inertia = Inertia::default();
            for s in &tr.sign_vector {
                match s {
                    SignEntry::Neg => inertia.below += 1,
                    SignEntry::Zero => inertia.equal += 1,
                    SignEntry::Pos => inertia.above += 1,
                }
            }
            Ok(class_of(inertia))
        }
        Err(Error::GuardTripped { .. }) => Ok(classify_generic(g, mu)),
        Err(e) => Err(e),
    }
}

/// Classification through the generic algorithm on the explicit tree.
pub fn classify_generic<F: Field>(g: &LinearTree, mu: &F) -> RadiusClass {
    class_of(inertia_at(&realize(g, MatrixKind::Laplacian), mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::BigReal;
    use crate::tree_model::{from_caterpillar, parse_linear_tree};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn lt(s: &str) -> LinearTree {
        parse_linear_tree(s).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_spectra() {
        let p2 = realize(&lt("[[1]]"), MatrixKind::Laplacian);
        assert_eq!(
            diagonalize_tree(&p2, &-1.0).inertia,
            Inertia {
                below: 1,
                equal: 0,
                above: 1
            }
        );
        let k13 = realize(&lt("[[1,1,1]]"), MatrixKind::Laplacian);
        let out = diagonalize_tree(&k13, &q(-4, 1));
        assert_eq!(
            out.inertia,
            Inertia {
                below: 3,
                equal: 1,
                above: 0
            }
        );
        // eigenvalue 1 has multiplicity 2 in the star K_{1,3}
        let at1 = inertia_at(&k13, &q(1, 1));
        assert_eq!(
            at1,
            Inertia {
                below: 1,
                equal: 2,
                above: 1
            }
        );
    }

    #[test]
    fn path_values_examples() {
        assert_eq!(path_values(1, &5.4).unwrap(), vec![1.0 - 5.4]);
        let b = path_values(2, &5.4).unwrap();
        assert!((b[1] - (-3.4 + 1.0 / 4.4)).abs() < 1e-15);
        let b = path_values(200, &5.4).unwrap();
        assert!((b[199] + 3.074772708486753).abs() < 1e-12);
        assert!(b[..10].windows(2).all(|w| w[0] < w[1]));
        assert!(b.windows(2).all(|w| w[0] <= w[1]));
        assert!(path_values(3, &4.0).is_err());
    }

    #[test]
    fn drift_examples() {
        assert_eq!(drift(&Starlike::empty(), &5.4).unwrap(), 0.0);
        let mu = 5.4;
        let d = drift(&Starlike::leaves(3), &mu).unwrap();
        assert!((d - 3.0 * mu / (mu - 1.0)).abs() < 1e-14);
        // exact value: 1 - 1/b_2 with b_2 = -349/110
        let d2 = drift(&Starlike::new(vec![2]).unwrap(), &mu).unwrap();
        assert!((d2 - (1.0 + 110.0 / 349.0)).abs() < 1e-14);
    }

    #[test]
    fn example_caterpillar_trace() {
        let g = from_caterpillar(&[3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2]).unwrap();
        let mu = BigReal::parse_decimal("5.4", 256).unwrap();
        let tr = pi_trace(&g, &mu).unwrap();
        assert!((tr.s_values[0].to_f64() + 0.718181818181818).abs() < 1e-12);
        assert!((tr.s_values[9].to_f64() + 1.50380189345).abs() < 1e-10);
        assert_eq!(classify(&g, &5.4).unwrap(), RadiusClass::RadiusBelowMu);
        assert!(tr.path_tails.iter().flatten().all(|b| b.is_negative()));
    }

    #[test]
    fn pure_path_matches_generic() {
        let g = lt("[[0],[0],[0],[0],[0],[0]]");
        let tr = pi_trace(&g, &5.0).unwrap();
        assert_eq!(tr.s_values[0], -4.0);
        assert!((tr.s_values[1] - (-3.0 + 0.25)).abs() < 1e-15);
        let generic = diagonalize_tree(&realize(&g, MatrixKind::Laplacian), &-5.0);
        for (a, b) in tr.s_values.iter().zip(&generic.diagonal) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&lt("[[1,1],[1,1,1,1]]"), &5.5).unwrap(),
            RadiusClass::RadiusAboveMu
        );
        assert_eq!(
            classify_generic(&lt("[[1,1,1]]"), &q(4, 1)),
            RadiusClass::RadiusEqualsMu
        );
        // K_{1,4}: radius 5 exactly, decided exactly by the recurrence
        assert_eq!(
            classify(&lt("[[1,1,1,1]]"), &5.0).unwrap(),
            RadiusClass::RadiusEqualsMu
        );
    }

    #[test]
    fn guard_trips_near_zero() {
        // K_{1,4} at μ = 5: S_1 is exactly 0, which trips the guard
        let err = pi_trace(&lt("[[1,1,1,1]]"), &5.0).unwrap_err();
        assert!(matches!(err, Error::GuardTripped { index: 1, .. }));
    }

    #[test]
    fn kernel_fixed_points() {
        let k = PathKernel::laplacian(5.4f64);
        let (t, tp) = k.fixed_points().unwrap();
        assert!((k.apply(&t) - t).abs() < 1e-14);
        assert!((k.apply(&tp) - tp).abs() < 1e-14);
        let a = PathKernel::adjacency(3.0f64);
        let (t, tp) = a.fixed_points().unwrap();
        assert!((t * tp - 1.0).abs() < 1e-15 && (t + tp + 3.0).abs() < 1e-15);
    }

    #[test]
    fn s_recurrence_matches_trace() {
        let g = lt("[[1],[1,2],[1],[0],[0]]");
        let tr = pi_trace(&g, &5.4).unwrap();
        let s = s_recurrence(&5.4, &tr.drifts, true);
        assert_eq!(s, tr.s_values);
        let single = s_recurrence(&5.4, &tr.drifts[..1], true);
        assert!((single[0] - (-5.4 + tr.drifts[0])).abs() < 1e-15);
    }
}
