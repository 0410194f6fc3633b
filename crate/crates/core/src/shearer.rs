//! Shearer-type generators: the adjacency and Laplacian caterpillar
//! constructions and the generalized random process over starlike trees,
//! plus the nasty interval `[μ*, μ^*]`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::diagonalize::{check_mu, PathKernel, PathTable};
use crate::error::Error;
use crate::limits::guo_limit;
use crate::numeric::{BigReal, Field, Real, DEFAULT_PREC, MAX_PREC};
use crate::poly::{largest_real_root, Polynomial, RootInterval};
use crate::spectral::{adjacency_fixed_points, fixed_points, radius};
use crate::tree_model::{from_caterpillar, LinearTree, MatrixKind, Starlike};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    AdjacencyClassic,
    LaplacianClassic,
    GeneralizedRandom,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::AdjacencyClassic => "adjacency-classic",
            RunMode::LaplacianClassic => "laplacian-classic",
            RunMode::GeneralizedRandom => "generalized-random",
        }
    }
}

/// A generated sequence `G_1, ..., G_K`.
///
/// `G_k` consists of `interior_stars[..k-1]` followed by `closing_stars[k-1]`.
#[derive(Clone, Debug)]
pub struct ShearerRun<R> {
    pub mode: RunMode,
    pub target: R,
    pub interior_stars: Vec<Starlike>,
    pub closing_stars: Vec<Starlike>,
    /// Interior values `S_j` (or `R_j`), `j = 1..K`, without end correction.
    pub interior: Vec<R>,
    /// `Π(G_K)` for Laplacian modes; equal to `interior` for adjacency.
    pub s_trace: Vec<R>,
    /// `ρ(G_k)` for `k = 1..K` (f64).
    pub radii: Vec<f64>,
    pub theta_prime: R,
    /// Target below the proven domain threshold.
    pub experimental: bool,
    /// Working precision in bits after any escalation (0 if none applied).
    pub precision: usize,
    pub notes: Vec<String>,
}

impl<R: Real> ShearerRun<R> {
    pub fn len(&self) -> usize {
        self.interior_stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior_stars.is_empty()
    }

    /// `G_k`, 1-based.
    pub fn member(&self, k: usize) -> LinearTree {
        let mut stars = self.interior_stars[..k - 1].to_vec();
        stars.push(self.closing_stars[k - 1].clone());
        LinearTree::new(stars).expect("nonempty")
    }

    pub fn last(&self) -> LinearTree {
        self.member(self.len())
    }

    /// Leaf counts of `G_K` when every star is a bundle of leaves.
    pub fn counts(&self) -> Option<Vec<u32>> {
        crate::tree_model::to_caterpillar(&self.last())
    }
}

fn radii_of<R: Real>(run: &ShearerRun<R>, kind: MatrixKind) -> Vec<f64> {
    (1..=run.len())
        .map(|k| {
            radius(&run.member(k), kind, &1e-12)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        })
        .collect()
}

/// `floor(x)` unless `x` lies within `tie` of an integer.
fn floor_checked(x: &BigReal, tie: &BigReal) -> Option<i64> {
    let f = x.floor();
    let up = f.clone() + x.int(1);
    if x.clone() - f.clone() < *tie || up - x.clone() < *tie {
        None
    } else {
        Some(f.floor_i64())
    }
}

struct ClassicCore {
    interior: Vec<u32>,
    caps: Vec<u32>,
    s_int: Vec<BigReal>,
    s_last: BigReal,
    theta_prime: BigReal,
    prec: usize,
    tie_unresolved: bool,
}

/// Runs `gen` at doubling precision until no floor argument sits within the
/// tie threshold of an integer.
fn with_escalation<F>(start: usize, mut gen: F) -> ClassicCore
where
    F: FnMut(usize, Option<&BigReal>) -> Option<ClassicCore>,
{
    let mut prec = start;
    let mut tie = BigReal::from_int(1, prec).pow2(-40);
    loop {
        if let Some(core) = gen(prec, Some(&tie)) {
            return core;
        }
        if prec * 2 > MAX_PREC {
            let mut core = gen(prec, None).expect("untied run");
            core.tie_unresolved = true;
            return core;
        }
        // each doubling demands the argument be resolved by the extra bits
        prec *= 2;
        tie = BigReal::from_int(1, prec).pow2(-40 - (prec - start) as i32);
    }
}

fn classic_laplacian_core(
    mu: &BigReal,
    k: usize,
    prec: usize,
    tie: Option<&BigReal>,
) -> Option<ClassicCore> {
    let mu = mu.with_prec(prec);
    let zero_tie = mu.int(0);
    let tie = tie.cloned().unwrap_or(zero_tie);
    let fp = fixed_points(&mu).ok()?;
    let tp = fp.theta_prime;
    let kern = PathKernel::laplacian(mu.clone());
    let one = mu.int(1);
    let scale = (mu.clone() - one.clone()) / mu.clone();
    let d = mu.clone() / (mu.clone() - one.clone());
    let mut interior = Vec::with_capacity(k);
    let mut caps = Vec::with_capacity(k);
    let mut s_int: Vec<BigReal> = Vec::with_capacity(k);
    let mut s_last = mu.int(0);
    for j in 0..k {
        let prev = if j == 0 {
            one.clone() - mu.clone()
        } else {
            kern.apply(&s_int[j - 1])
        };
        let r = floor_checked(&(scale.clone() * (tp.clone() - prev.clone())), &tie)?;
        let c = floor_checked(
            &(scale.clone() * (tp.clone() + one.clone() - prev.clone())),
            &tie,
        )?;
        let r = r.max(0) as u32;
        let c = c.max(0) as u32;
        s_int.push(prev.clone() + d.clone() * mu.int(r as i64));
        if j + 1 == k {
            s_last = prev - one.clone() + d.clone() * mu.int(c as i64);
        }
        interior.push(r);
        caps.push(c);
    }
    Some(ClassicCore {
        interior,
        caps,
        s_int,
        s_last,
        theta_prime: tp,
        prec,
        tie_unresolved: false,
    })
}

/// Caterpillar construction for a Laplacian target `μ`.
///
/// Interior counts use `floor(((μ-1)/μ)(θ' - ψ(S_{j-1})))`; the last star of
/// each `G_k` uses the `+1` variant. Floors near an integer are recomputed at
/// doubled precision (up to the cap).
pub fn classic_laplacian<R: Real>(mu: &R, k: usize) -> Result<ShearerRun<R>, Error> {
    check_mu(mu)?;
    if k == 0 {
        return Err(Error::Domain("length must be at least 1".into()));
    }
    let mb = mu.to_big();
    let start = DEFAULT_PREC.max(mu.prec().min(MAX_PREC));
    let core = with_escalation(start, |p, tie| classic_laplacian_core(&mb, k, p, tie));
    let leaves = |r: u32| {
        if r == 0 {
            Starlike::empty()
        } else {
            Starlike::leaves(r)
        }
    };
    let interior_stars: Vec<Starlike> = core.interior.iter().map(|&r| leaves(r)).collect();
    let closing_stars: Vec<Starlike> = core.caps.iter().map(|&r| leaves(r)).collect();
    let interior: Vec<R> = core.s_int.iter().map(R::from_big).collect();
    let mut s_trace: Vec<R> = interior[..k - 1].to_vec();
    s_trace.push(R::from_big(&core.s_last));
    let mut notes = Vec::new();
    if core.prec > start {
        notes.push(format!("floor tie resolved at {} bits", core.prec));
    }
    if core.tie_unresolved {
        notes.push(format!(
            "floor tie unresolved at the {MAX_PREC}-bit cap; exact floor taken"
        ));
    }
    let experimental = mu.to_f64() < guo_limit();
    let mut run = ShearerRun {
        mode: RunMode::LaplacianClassic,
        target: mu.clone(),
        interior_stars,
        closing_stars,
        interior,
        s_trace,
        radii: Vec::new(),
        theta_prime: R::from_big(&core.theta_prime),
        experimental,
        precision: core.prec,
        notes,
    };
    run.radii = radii_of(&run, MatrixKind::Laplacian);
    Ok(run)
}

/// `√(2+√5)`, below which the adjacency construction is not defined.
pub fn hoffman_threshold<R: Real>(like: &R) -> R {
    (like.int(2) + like.int(5).sqrt()).sqrt()
}

fn classic_adjacency_core(
    lam: &BigReal,
    k: usize,
    prec: usize,
    tie: Option<&BigReal>,
) -> Option<ClassicCore> {
    let lam = lam.with_prec(prec);
    let tie = tie.cloned().unwrap_or(lam.int(0));
    let fp = adjacency_fixed_points(&lam).ok()?;
    let tp = fp.theta_prime;
    let kern = PathKernel::adjacency(lam.clone());
    let mut interior = Vec::with_capacity(k);
    let mut s_int: Vec<BigReal> = Vec::with_capacity(k);
    for j in 0..k {
        let prev = if j == 0 {
            -lam.clone()
        } else {
            kern.apply(&s_int[j - 1])
        };
        let r = floor_checked(&(lam.clone() * (tp.clone() - prev.clone())), &tie)?.max(0) as u32;
        s_int.push(prev + lam.int(r as i64) / lam.clone());
        interior.push(r);
    }
    let s_last = s_int[k - 1].clone();
    Some(ClassicCore {
        caps: interior.clone(),
        interior,
        s_int,
        s_last,
        theta_prime: tp,
        prec,
        tie_unresolved: false,
    })
}

/// Caterpillar construction for an adjacency target `λ >= √(2+√5)`.
pub fn classic_adjacency<R: Real>(lambda: &R, k: usize) -> Result<ShearerRun<R>, Error> {
    let thr = hoffman_threshold(lambda);
    if *lambda < thr.clone() - lambda.guard() {
        return Err(Error::Domain(format!(
            "λ = {} is below √(2+√5) = {}",
            lambda.to_f64(),
            thr.to_f64()
        )));
    }
    if k == 0 {
        return Err(Error::Domain("length must be at least 1".into()));
    }
    let lb = lambda.to_big();
    let start = DEFAULT_PREC.max(lambda.prec().min(MAX_PREC));
    let core = with_escalation(start, |p, tie| classic_adjacency_core(&lb, k, p, tie));
    let leaves = |r: u32| {
        if r == 0 {
            Starlike::empty()
        } else {
            Starlike::leaves(r)
        }
    };
    let stars: Vec<Starlike> = core.interior.iter().map(|&r| leaves(r)).collect();
    let interior: Vec<R> = core.s_int.iter().map(R::from_big).collect();
    let mut notes = Vec::new();
    if core.tie_unresolved {
        notes.push(format!(
            "floor tie unresolved at the {MAX_PREC}-bit cap; exact floor taken"
        ));
    }
    let mut run = ShearerRun {
        mode: RunMode::AdjacencyClassic,
        target: lambda.clone(),
        interior_stars: stars.clone(),
        closing_stars: stars,
        s_trace: interior.clone(),
        interior,
        radii: Vec::new(),
        theta_prime: R::from_big(&core.theta_prime),
        experimental: false,
        precision: core.prec,
        notes,
    };
    run.radii = radii_of(&run, MatrixKind::Adjacency);
    Ok(run)
}

/// User-supplied star weights for random selection.
#[derive(Clone)]
pub struct Weights(pub Arc<dyn Fn(&Starlike) -> f64 + Send + Sync>);

impl fmt::Debug for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Weights(..)")
    }
}

#[derive(Clone, Debug)]
pub enum Selection {
    /// Admissible star of largest drift; ties go to the earliest in
    /// enumeration order.
    MaximizeDrift,
    UniformRandom,
    Custom(Weights),
    /// Replays a recorded choice list (then `[0]`), checking admissibility.
    Replay(Vec<Starlike>),
}

#[derive(Clone, Debug)]
pub struct GeneratorPolicy {
    pub max_width: usize,
    pub max_height: u32,
    pub selection: Selection,
    pub rng_seed: u64,
}

impl GeneratorPolicy {
    pub fn maximize_drift(max_width: usize, max_height: u32) -> Self {
        GeneratorPolicy {
            max_width,
            max_height,
            selection: Selection::MaximizeDrift,
            rng_seed: 0,
        }
    }

    pub fn uniform(max_width: usize, max_height: u32, seed: u64) -> Self {
        GeneratorPolicy {
            max_width,
            max_height,
            selection: Selection::UniformRandom,
            rng_seed: seed,
        }
    }

    pub fn replay(stars: Vec<Starlike>) -> Self {
        let w = stars.iter().map(Starlike::width).max().unwrap_or(0);
        let h = stars.iter().map(Starlike::height).max().unwrap_or(0);
        GeneratorPolicy {
            max_width: w,
            max_height: h,
            selection: Selection::Replay(stars),
            rng_seed: 0,
        }
    }

    /// Per-step generator: stream `j` of the seed.
    pub fn step_rng(&self, j: usize) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(j as u64);
        rng
    }
}

/// Stars with width `<= max_width`, height `<= max_height` and `base + δ < bound`,
/// in (width, height, lexicographic) order, each with its drift.
pub fn admissible_stars<R: Real>(
    table: &mut PathTable<R>,
    base: &R,
    bound: &R,
    max_width: usize,
    max_height: u32,
) -> Vec<(Starlike, R)> {
    let like = base.clone();
    let path_drift: Vec<R> = (1..=max_height)
        .map(|q| like.int(1) - table.value(q).recip())
        .collect();
    let budget = bound.clone() - base.clone();
    let slack = budget.abs() * like.pow2(-30) + like.pow2(-30);
    let mut found: Vec<Vec<u32>> = vec![Vec::new()];
    // nonincreasing path lengths; drifts are positive, so prune on partial sums
    let mut stack: Vec<(Vec<u32>, R)> = vec![(Vec::new(), like.int(0))];
    while let Some((paths, acc)) = stack.pop() {
        if paths.len() == max_width {
            continue;
        }
        let top = paths.last().copied().unwrap_or(max_height);
        for q in 1..=top {
            let nacc = acc.clone() + path_drift[q as usize - 1].clone();
            if nacc >= budget.clone() + slack.clone() {
                break;
            }
            let mut np = paths.clone();
            np.push(q);
            found.push(np.clone());
            stack.push((np, nacc));
        }
    }
    let mut out: Vec<(Starlike, R)> = found
        .into_iter()
        .map(|p| {
            if p.is_empty() {
                Starlike::empty()
            } else {
                Starlike::new(p).expect("positive lengths")
            }
        })
        .map(|s| {
            let d = table.drift(&s);
            (s, d)
        })
        .filter(|(_, d)| base.clone() + d.clone() < *bound)
        .collect();
    out.sort_by(|a, b| star_order(&a.0, &b.0));
    out
}

/// Enumeration order: width, then height, then path lengths.
pub fn star_order(a: &Starlike, b: &Starlike) -> std::cmp::Ordering {
    let wa = if a.is_empty() { 0 } else { a.width() };
    let wb = if b.is_empty() { 0 } else { b.width() };
    (wa, a.height(), a.paths()).cmp(&(wb, b.height(), b.paths()))
}

/// The generalized random Shearer process: `T_j` is admissible when
/// `ψ(S_{j-1}) + δ(T_j) < θ'` (`1 - μ + δ(T_1) < θ'` for `j = 1`), and
/// `G_k = [T_1, ..., T_k]`, i.e. `C_k = T_k`.
pub fn generalized_random<R: Real>(
    mu: &R,
    k: usize,
    policy: &GeneratorPolicy,
) -> Result<ShearerRun<R>, Error> {
    check_mu(mu)?;
    if k == 0 {
        return Err(Error::Domain("length must be at least 1".into()));
    }
    let fp = fixed_points(mu)?;
    let tp = fp.theta_prime;
    let kern = PathKernel::laplacian(mu.clone());
    let mut table = PathTable::new(mu);
    let mut stars = Vec::with_capacity(k);
    let mut interior: Vec<R> = Vec::with_capacity(k);
    for j in 0..k {
        let base = if j == 0 {
            mu.int(1) - mu.clone()
        } else {
            kern.apply(&interior[j - 1])
        };
        let (star, d) = match &policy.selection {
            Selection::Replay(list) => {
                let s = list.get(j).cloned().unwrap_or_else(Starlike::empty);
                let d = table.drift(&s);
                if base.clone() + d.clone() >= tp {
                    return Err(Error::Inconsistent(format!(
                        "replayed star {s} at j = {} is not admissible",
                        j + 1
                    )));
                }
                (s, d)
            }
            sel => {
                let adm =
                    admissible_stars(&mut table, &base, &tp, policy.max_width, policy.max_height);
                let idx = match sel {
                    Selection::MaximizeDrift => {
                        let mut best = 0;
                        for (i, (_, d)) in adm.iter().enumerate() {
                            if *d > adm[best].1 {
                                best = i;
                            }
                        }
                        best
                    }
                    Selection::UniformRandom => policy.step_rng(j).gen_range(0..adm.len()),
                    Selection::Custom(w) => {
                        let ws: Vec<f64> = adm.iter().map(|(s, _)| (w.0)(s).max(0.0)).collect();
                        match WeightedIndex::new(&ws) {
                            Ok(dist) => dist.sample(&mut policy.step_rng(j)),
                            Err(_) => 0,
                        }
                    }
                    Selection::Replay(_) => unreachable!(),
                };
                adm[idx].clone()
            }
        };
        interior.push(base + d);
        stars.push(star);
    }
    // C_k = T_k: the closed entry is the interior one minus 1 (also for k = 1)
    let mut s_trace = interior.clone();
    s_trace[k - 1] = interior[k - 1].clone() - mu.int(1);
    let mut run = ShearerRun {
        mode: RunMode::GeneralizedRandom,
        target: mu.clone(),
        interior_stars: stars.clone(),
        closing_stars: stars,
        interior,
        s_trace,
        radii: Vec::new(),
        theta_prime: tp,
        experimental: mu.to_f64() < guo_limit(),
        precision: mu.prec().min(MAX_PREC),
        notes: Vec::new(),
    };
    run.radii = radii_of(&run, MatrixKind::Laplacian);
    Ok(run)
}

/// The interval `[μ*, μ^*]` on which the classic Laplacian construction
/// always yields `[3, 1, ..., 1, 2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NastyInterval {
    pub mu_star: f64,
    pub mu_star_upper: f64,
    /// `x² - 5x - 2`.
    pub lower_poly: Polynomial,
    /// `2x⁴ - 14x³ + 19x² - 10x - 1`.
    pub upper_poly: Polynomial,
    pub lower_root: RootInterval,
    pub upper_root: RootInterval,
}

pub fn nasty_interval() -> NastyInterval {
    let lower_poly = Polynomial::from_ints_desc(&[1, -5, -2]);
    let upper_poly = Polynomial::from_ints_desc(&[2, -14, 19, -10, -1]);
    let w = BigRational::new(BigInt::from(1), BigInt::from(1u128 << 100));
    let lower_root = largest_real_root(&lower_poly, &w).expect("real root");
    let upper_root = largest_real_root(&upper_poly, &w).expect("real root");
    NastyInterval {
        mu_star: lower_root.midpoint_f64(),
        mu_star_upper: upper_root.midpoint_f64(),
        lower_poly,
        upper_poly,
        lower_root,
        upper_root,
    }
}

/// `[3, 1, ..., 1, 2]` of length `k`.
pub fn nasty_pattern(k: usize) -> Vec<u32> {
    let mut v = vec![1; k];
    v[0] = 3;
    v[k - 1] = 2;
    v
}

/// Whether the classic Laplacian construction at `μ` yields the nasty
/// caterpillar `[3, 1, ..., 1, 2]`.
pub fn verify_nasty<R: Real>(mu: &R, k: usize) -> Result<bool, Error> {
    if k < 3 {
        return Err(Error::Domain("verify_nasty needs k >= 3".into()));
    }
    let ni = nasty_interval();
    let m = mu.to_big();
    let prec = m.prec().max(DEFAULT_PREC);
    let lo = BigReal::from_rational(&ni.lower_root.lo, prec) - m.guard();
    let hi = BigReal::from_rational(&ni.upper_root.hi, prec) + m.guard();
    if m < lo || m > hi {
        return Err(Error::Domain(format!(
            "μ = {} is outside [μ*, μ^*]",
            mu.to_f64()
        )));
    }
    let run = classic_laplacian(mu, k)?;
    let g = run.last();
    Ok(g == from_caterpillar(&nasty_pattern(k))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalize::{drift, inertia_at};
    use crate::tree_model::{is_subtree_step, parse_star_list, realize};

    #[test]
    fn classic_laplacian_example() {
        let run = classic_laplacian(&5.4, 11).unwrap();
        assert_eq!(run.counts().unwrap(), vec![3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        assert!((run.s_trace[0] + 0.718181818182).abs() < 1e-12);
        assert!((run.s_trace[9] + 1.50380189345).abs() < 1e-10);
        assert!(run.s_trace.iter().all(|s| *s <= run.theta_prime));
        assert!(!run.experimental);
        let six = classic_laplacian(&6.0, 2).unwrap();
        assert_eq!(six.interior_stars[0], Starlike::leaves(3));
    }

    #[test]
    fn classic_runs_share_interior_prefix() {
        let a = classic_laplacian(&5.4, 12).unwrap();
        for k in 2..12 {
            let b = classic_laplacian(&5.4, k).unwrap();
            assert_eq!(&a.interior_stars[..k], &b.interior_stars[..]);
            let (cap, int) = (
                b.closing_stars[k - 1].width() as i64,
                b.interior_stars[k - 1].width() as i64,
            );
            assert!((0..=1).contains(&(cap - int)));
        }
        assert!(a.radii.windows(2).all(|w| w[0] < w[1]));
        assert!(a.radii.iter().all(|&r| r < 5.4));
    }

    #[test]
    fn classic_adjacency_runs() {
        let run = classic_adjacency(&3.0, 5).unwrap();
        assert!(run.interior.iter().all(|r| *r < 0.0));
        let t = realize(&run.last(), MatrixKind::Adjacency);
        assert_eq!(inertia_at(&t, &3.0).above, 0);
        let thr = hoffman_threshold(&1.0f64);
        let edge = classic_adjacency(&thr, 30).unwrap();
        assert!(edge.radii.windows(2).all(|w| w[0] <= w[1]));
        assert!(edge.radii.iter().all(|&r| r < thr + 1e-12));
        assert!(classic_adjacency(&2.05, 5).is_err());
    }

    #[test]
    fn maximize_drift_example() {
        let run = generalized_random(&5.4, 100, &GeneratorPolicy::maximize_drift(8, 2)).unwrap();
        let want = parse_star_list("[2,2,2],[0],[2],[2],[2]").unwrap();
        assert_eq!(&run.interior_stars[..5], &want[..]);
        assert!(run.interior_stars[5..]
            .iter()
            .all(|s| *s == Starlike::new(vec![2]).unwrap()));
        let expect = [
            4.414213562373095,
            5.23606797749979,
            5.3105468186017095,
            5.332595233193765,
            5.342376147225938,
        ];
        for (r, e) in run.radii.iter().zip(expect) {
            assert!((r - e).abs() < 1e-10, "{r} vs {e}");
        }
        assert!((run.radii[99] - 5.355455148099992).abs() < 1e-10);
        // published intermediate values S_2, S_3
        assert!((run.interior[1] + 1.1994).abs() < 1e-4);
        assert!((run.interior[2] + 1.2511).abs() < 1e-4);
    }

    #[test]
    fn replay_of_recorded_stream() {
        let rec = parse_star_list("[1],[1,2],[1],[0],[0]").unwrap();
        let run = generalized_random(&5.4, 5, &GeneratorPolicy::replay(rec)).unwrap();
        let expect = [
            2.0,
            4.302775637731995,
            5.236067977499791,
            5.381798418934215,
            5.397488988943662,
        ];
        for (r, e) in run.radii.iter().zip(expect) {
            assert!((r - e).abs() < 1e-10);
        }
        let bad = parse_star_list("[1],[1,1,1,1,1]").unwrap();
        assert!(matches!(
            generalized_random(&5.4, 2, &GeneratorPolicy::replay(bad)),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn random_runs_are_reproducible_and_admissible() {
        let p = GeneratorPolicy::uniform(4, 3, 42);
        let a = generalized_random(&5.4, 40, &p).unwrap();
        let b = generalized_random(&5.4, 40, &p).unwrap();
        assert_eq!(a.interior_stars, b.interior_stars);
        assert!(a.interior.iter().all(|s| *s < a.theta_prime));
        assert!(a.radii.windows(2).all(|w| w[0] < w[1]));
        for k in 1..40 {
            assert!(is_subtree_step(&a.member(k), &a.member(k + 1)).unwrap());
        }
        let low = generalized_random(&4.4, 30, &GeneratorPolicy::uniform(3, 3, 7)).unwrap();
        assert!(low.interior.iter().all(|s| *s < low.theta_prime));
        for s in &low.interior_stars {
            assert!(s.is_empty() || s.width() == 1, "{s}");
        }
        let w = Weights(Arc::new(
            |s: &Starlike| if *s == Starlike::leaves(1) { 1.0 } else { 0.0 },
        ));
        let c = generalized_random(
            &5.4,
            10,
            &GeneratorPolicy {
                max_width: 3,
                max_height: 3,
                selection: Selection::Custom(w),
                rng_seed: 1,
            },
        )
        .unwrap();
        assert!(c.interior_stars.iter().all(|s| *s == Starlike::leaves(1)));
    }

    #[test]
    fn admissible_order_and_bound() {
        let mu = 5.4;
        let mut t = PathTable::new(&mu);
        let fp = fixed_points(&mu).unwrap();
        let adm = admissible_stars(&mut t, &(1.0 - mu), &fp.theta_prime, 3, 2);
        assert_eq!(adm[0].0, Starlike::empty());
        assert!(adm.windows(2).all(|w| star_order(&w[0].0, &w[1].0).is_lt()));
        for (s, d) in &adm {
            assert!(1.0 - mu + d < fp.theta_prime);
            assert_eq!(*d, drift(s, &mu).unwrap());
        }
        assert!(adm
            .iter()
            .any(|(s, _)| *s == Starlike::new(vec![2, 2, 2]).unwrap()));
    }

    #[test]
    fn nasty_interval_values() {
        let ni = nasty_interval();
        assert!((ni.mu_star - (5.0 + 33f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(format!("{}", ni.mu_star).starts_with("5.3722"));
        assert!(format!("{}", ni.mu_star_upper).starts_with("5.4207"));
        assert!(5.3722 < ni.mu_star && ni.mu_star < ni.mu_star_upper && ni.mu_star_upper < 5.4208);
        // S_1 of a [1,1,1] first star equals σ' at μ*
        let m = ni.mu_star;
        let d = m / (m - 1.0);
        let sp = crate::spectral::sigma_points(&m, &d).unwrap();
        assert!((1.0 - m + 3.0 * d - sp.sigma_prime).abs() < 1e-12);
    }

    #[test]
    fn nasty_verification() {
        assert!(verify_nasty(&5.38, 50).unwrap());
        assert!(verify_nasty(&5.41, 20).unwrap());
        let ms = (BigReal::from_int(5, 512) + BigReal::from_int(33, 512).sqrt())
            / BigReal::from_int(2, 512);
        assert!(verify_nasty(&ms, 10).unwrap());
        assert!(verify_nasty(&5.3, 10).is_err());
    }
}
