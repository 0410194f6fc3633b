//! Python bindings: linear trees, spectral radii, Shearer runs, limits and
//! α-certificates.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lintree::diagonalize::{self, RadiusClass};
use lintree::expr::Expr;
use lintree::limits;
use lintree::shearer;
use lintree::spectral;
use lintree::tree_model::{self, MatrixKind, Starlike};
use lintree::variational::{self, Verdict};
use lintree::Error;

create_exception!(lintree_py, LintreeError, PyValueError);

fn err(e: Error) -> PyErr {
    LintreeError::new_err(e.to_string())
}

fn stars_to_lists(stars: &[Starlike]) -> Vec<Vec<u32>> {
    stars.iter().map(|s| s.paths().to_vec()).collect()
}

const DIGITS: usize = 30;

/// A linear tree: a path of roots, each carrying a starlike tree given by
/// its path lengths.
#[pyclass(frozen, skip_from_py_object, name = "LinearTree")]
#[derive(Clone)]
struct PyLinearTree {
    inner: tree_model::LinearTree,
}

#[pymethods]
impl PyLinearTree {
    /// Parses a literal such as `"[[1,1],[2],[0]]"`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyLinearTree {
            inner: tree_model::parse_linear_tree(text).map_err(err)?,
        })
    }

    /// Builds a tree from lists of path lengths.
    #[staticmethod]
    fn from_stars(stars: Vec<Vec<u32>>) -> PyResult<Self> {
        let stars = stars
            .into_iter()
            .map(Starlike::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(PyLinearTree {
            inner: tree_model::LinearTree::new(stars).map_err(err)?,
        })
    }

    /// Caterpillar with `r[j]` leaves on the j-th spine vertex.
    #[staticmethod]
    fn caterpillar(r: Vec<u32>) -> PyResult<Self> {
        Ok(PyLinearTree {
            inner: tree_model::from_caterpillar(&r).map_err(err)?,
        })
    }

    fn stars(&self) -> Vec<Vec<u32>> {
        stars_to_lists(self.inner.stars())
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    /// Spectral radius of the given matrix ("laplacian", "adjacency" or "signless").
    #[pyo3(signature = (kind = "laplacian", tol = 1e-12))]
    fn radius(&self, kind: &str, tol: f64) -> PyResult<f64> {
        let kind: MatrixKind = kind.parse().map_err(err)?;
        Ok(spectral::radius(&self.inner, kind, &tol)
            .map_err(err)?
            .value)
    }

    /// Exact Laplacian radius bracket from the characteristic polynomial.
    fn oracle_radius(&self) -> PyResult<(f64, f64)> {
        let t = tree_model::realize(&self.inner, MatrixKind::Laplacian);
        let r = spectral::oracle_radius(&t).map_err(err)?;
        Ok((
            lintree::numeric::rational_to_f64(&r.interval.lo),
            lintree::numeric::rational_to_f64(&r.interval.hi),
        ))
    }

    /// Position of `ρ_L` relative to `mu`: "below", "equal" or "above".
    fn classify(&self, mu: f64) -> PyResult<&'static str> {
        Ok(
            match diagonalize::classify(&self.inner, &mu).map_err(err)? {
                RadiusClass::RadiusBelowMu => "below",
                RadiusClass::RadiusEqualsMu => "equal",
                RadiusClass::RadiusAboveMu => "above",
            },
        )
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LinearTree('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Laplacian drift `δ(T)` of a starlike tree at `mu`.
#[pyfunction]
fn drift(paths: Vec<u32>, mu: f64) -> PyResult<f64> {
    diagonalize::drift(&Starlike::new(paths).map_err(err)?, &mu).map_err(err)
}

/// Fixed points `(θ, θ')` of `t ↦ 2 - μ - 1/t`.
#[pyfunction]
fn fixed_points(mu: f64) -> PyResult<(f64, f64)> {
    let fp = spectral::fixed_points(&mu).map_err(err)?;
    Ok((fp.theta, fp.theta_prime))
}

#[pyclass(frozen, get_all)]
struct ShearerRun {
    mode: &'static str,
    target: f64,
    interior_stars: Vec<Vec<u32>>,
    closing_stars: Vec<Vec<u32>>,
    interior: Vec<f64>,
    radii: Vec<f64>,
    theta_prime: f64,
    experimental: bool,
}

#[pymethods]
impl ShearerRun {
    /// The k-th generated tree, `1 <= k <= len`.
    fn member(&self, k: usize) -> PyResult<PyLinearTree> {
        if k == 0 || k > self.radii.len() {
            return Err(err(Error::Domain(format!(
                "member index {k} outside 1..={}",
                self.radii.len()
            ))));
        }
        let mut stars = self.interior_stars[..k - 1].to_vec();
        stars.push(self.closing_stars[k - 1].clone());
        PyLinearTree::from_stars(stars)
    }

    fn __len__(&self) -> usize {
        self.radii.len()
    }
}

impl ShearerRun {
    fn from_run(run: shearer::ShearerRun<f64>) -> Self {
        ShearerRun {
            mode: run.mode.name(),
            target: run.target,
            interior_stars: stars_to_lists(&run.interior_stars),
            closing_stars: stars_to_lists(&run.closing_stars),
            interior: run.interior,
            radii: run.radii,
            theta_prime: run.theta_prime,
            experimental: run.experimental,
        }
    }
}

/// Classic Laplacian (caterpillar) Shearer sequence converging to `mu`.
#[pyfunction]
fn classic_laplacian(mu: f64, k: usize) -> PyResult<ShearerRun> {
    Ok(ShearerRun::from_run(
        shearer::classic_laplacian(&mu, k).map_err(err)?,
    ))
}

/// Classic adjacency Shearer sequence converging to `lam`.
#[pyfunction]
fn classic_adjacency(lam: f64, k: usize) -> PyResult<ShearerRun> {
    Ok(ShearerRun::from_run(
        shearer::classic_adjacency(&lam, k).map_err(err)?,
    ))
}

/// Generalized random process; `selection` is "uniform" or "maxdrift".
#[pyfunction]
#[pyo3(signature = (mu, k, max_width = 3, max_height = 3, selection = "uniform", seed = 0))]
fn generalized_random(
    mu: f64,
    k: usize,
    max_width: usize,
    max_height: u32,
    selection: &str,
    seed: u64,
) -> PyResult<ShearerRun> {
    let policy = match selection {
        "uniform" => shearer::GeneratorPolicy::uniform(max_width, max_height, seed),
        "maxdrift" => shearer::GeneratorPolicy::maximize_drift(max_width, max_height),
        other => {
            return Err(err(Error::Syntax {
                pos: 0,
                msg: format!("unknown selection '{other}'"),
            }))
        }
    };
    Ok(ShearerRun::from_run(
        shearer::generalized_random(&mu, k, &policy).map_err(err)?,
    ))
}

/// Endpoints `(μ_*, μ^*)` of the interval where the classic generator is
/// eventually periodic.
#[pyfunction]
fn nasty_interval() -> (f64, f64) {
    let n = shearer::nasty_interval();
    (n.mu_star, n.mu_star_upper)
}

#[pyclass(frozen, get_all)]
struct LimitEstimate {
    gamma: f64,
    radii: Vec<f64>,
    gap: f64,
}

#[pyclass(frozen, get_all)]
struct AlgebraicLimit {
    /// Integer coefficients, highest degree first.
    coefficients: Vec<String>,
    value: f64,
    lo: f64,
    hi: f64,
    branch: &'static str,
}

/// Sequence specification: prefix stars, tail and closing rule.
#[pyclass(frozen, skip_from_py_object, name = "SequenceSpec")]
#[derive(Clone)]
struct PySequenceSpec {
    inner: limits::SequenceSpec,
}

#[pymethods]
impl PySequenceSpec {
    /// Parses `"[[1],[1,1]];tail=zero;close=shift"` or a named family.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySequenceSpec {
            inner: limits::SequenceSpec::parse(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        limits::NAMED_SPECS.to_vec()
    }

    fn member(&self, k: usize) -> PyLinearTree {
        PyLinearTree {
            inner: self.inner.member(k),
        }
    }

    #[pyo3(signature = (k_max = 200, tol = 1e-12))]
    fn estimate_limit(&self, k_max: usize, tol: f64) -> PyResult<LimitEstimate> {
        let e = limits::estimate_limit(&self.inner, k_max, tol).map_err(err)?;
        Ok(LimitEstimate {
            gamma: e.gamma,
            radii: e.radii,
            gap: e.gap,
        })
    }

    /// Exact algebraic limit of a zero-tail, shift-closed spec; `None` when
    /// the limit sits on the degenerate boundary.
    #[pyo3(signature = (k_max = 200, tol = 1e-12))]
    fn algebraic_limit(&self, k_max: usize, tol: f64) -> PyResult<Option<AlgebraicLimit>> {
        Ok(
            match limits::algebraic_limit(&self.inner, k_max, tol).map_err(err)? {
                limits::ZeroTailLimit::Algebraic(a) => Some(AlgebraicLimit {
                    coefficients: a.defining_polynomial.integer_coeff_strings(),
                    value: a.selected_root,
                    lo: lintree::numeric::rational_to_f64(&a.interval.lo),
                    hi: lintree::numeric::rational_to_f64(&a.interval.hi),
                    branch: a.branch.name(),
                }),
                limits::ZeroTailLimit::BoundaryDegenerate { .. } => None,
            },
        )
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SequenceSpec('{}')", self.inner)
    }
}

#[pyclass(frozen, get_all)]
struct Certificate {
    precision: usize,
    /// `α_1..α_k` as decimal strings.
    alpha: Vec<String>,
    alpha_closed: String,
    /// "converges_to_mu" or "stalled_below".
    verdict: &'static str,
    /// Ratio `α_k / α_{⌈k/2⌉}` or the stall plateau.
    verdict_value: f64,
}

/// α-certificate for `spec` at `mu` (an expression such as
/// `"(5+sqrt(33))/2"`), escalating precision as needed.
#[pyfunction]
fn certificate(spec: &PySequenceSpec, mu: &str, k: usize) -> PyResult<Certificate> {
    let mu = Expr::parse(mu).map_err(err)?;
    let c = variational::alpha_certificate(&spec.inner, &mu, k).map_err(err)?;
    let verdict_value = match c.verdict {
        Verdict::ConvergesToMu { ratio, .. } => ratio,
        Verdict::StalledBelow { plateau } => plateau,
    };
    Ok(Certificate {
        precision: c.precision,
        alpha: c.alpha.iter().map(|a| a.to_sig_digits(DIGITS)).collect(),
        alpha_closed: c.alpha_closed.to_sig_digits(DIGITS),
        verdict: c.verdict.name(),
        verdict_value,
    })
}

#[pyclass(frozen, get_all)]
struct ReferenceConstants {
    guo_omega: f64,
    guo_limit: f64,
    guo_alpha: Vec<f64>,
    hoffman_tau: f64,
    hoffman_limit: f64,
    hoffman_alpha_bar: Vec<f64>,
}

#[pyfunction]
#[pyo3(signature = (n_max = 60))]
fn reference_constants(n_max: usize) -> ReferenceConstants {
    let r = limits::reference_constants(n_max);
    ReferenceConstants {
        guo_omega: r.guo_omega,
        guo_limit: r.guo_limit,
        guo_alpha: r.guo_alpha,
        hoffman_tau: r.hoffman_tau,
        hoffman_limit: r.hoffman_limit,
        hoffman_alpha_bar: r.hoffman_alpha_bar,
    }
}

#[pymodule]
fn lintree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LintreeError", m.py().get_type::<LintreeError>())?;
    m.add_class::<PyLinearTree>()?;
    m.add_class::<PySequenceSpec>()?;
    m.add_class::<ShearerRun>()?;
    m.add_class::<LimitEstimate>()?;
    m.add_class::<AlgebraicLimit>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<ReferenceConstants>()?;
    m.add_function(wrap_pyfunction!(drift, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(classic_laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(classic_adjacency, m)?)?;
    m.add_function(wrap_pyfunction!(generalized_random, m)?)?;
    m.add_function(wrap_pyfunction!(nasty_interval, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    m.add_function(wrap_pyfunction!(reference_constants, m)?)?;
    Ok(())
}
