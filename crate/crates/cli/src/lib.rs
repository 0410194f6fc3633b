//! Command implementations behind the `lintree` binary.
//!
//! Every command returns an [`Output`] holding a JSON document (with a
//! versioned `schema` field), a text rendering and, where tabular, CSV.
//! Commands are deterministic given their flags.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use lintree::diagonalize::{diagonalize_tree, pi_trace};
use lintree::error::Error;
use lintree::expr::Expr;
use lintree::limits::{
    algebraic_limit, constant_tail_limit, estimate_limit, reference_constants, AlgebraicLimit,
    ClosingRule, SequenceSpec, Tail, ZeroTailLimit,
};
use lintree::numeric::{BigReal, Real, MAX_PREC};
use lintree::poly::{Polynomial, RootInterval};
use lintree::shearer::{
    classic_adjacency, classic_laplacian, generalized_random, nasty_interval, verify_nasty,
    GeneratorPolicy, ShearerRun,
};
use lintree::spectral::{default_tol, laplacian_radius, radius, RadiusResult};
use lintree::tree_model::{parse_linear_tree, realize, LinearTree, MatrixKind, Starlike};
use lintree::variational::{
    alpha_certificate, certificate_at, epsilon_sequence, x_growth, Certificate, Growth, Verdict,
    DIVERGENCE_THRESHOLD,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Exit codes: 0 success, 1 other failure, 2 parse error, 3 domain error,
/// 4 inconsistent limit or non-monotone sequence, 5 precision cap.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } => 2,
        Error::Domain(_)
        | Error::LengthMismatch { .. }
        | Error::SizeExceeded { .. }
        | Error::Bracket { .. } => 3,
        Error::Inconsistent(_) | Error::NotGeneralizedShearer { .. } => 4,
        Error::PrecisionCap { .. } => 5,
        Error::GuardTripped { .. } => 1,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "lintree",
    version,
    about = "Laplacian spectral radii of linear trees and Shearer-type sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral radius of a linear tree by inertia bisection.
    Radius(RadiusArgs),
    /// Congruent diagonal and inertia of M + xI.
    Diagonalize(DiagonalizeArgs),
    /// Classic or generalized Shearer-type sequence.
    Shearer(ShearerArgs),
    /// Limit estimate, with an exact algebraic witness when available.
    Limit(LimitArgs),
    /// Variational certificate (α, X and optionally ε streams).
    Certify(CertifyArgs),
    /// Sample the family F1 and report radii with neighbor gaps.
    SampleF1(SampleArgs),
    /// The interval [μ*, μ^*] and optional classic-run checks inside it.
    NastyInterval(NastyArgs),
    /// Guo and Hoffman constants.
    ReferenceConstants(ReferenceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RadiusArgs {
    /// Tree literal, e.g. "[[1],[1,2]]".
    pub tree: String,
    #[arg(long, default_value = "laplacian")]
    pub kind: String,
    /// Working precision in bits; 53 selects f64.
    #[arg(long, default_value_t = 53)]
    pub prec: usize,
}

#[derive(Args, Debug, Clone)]
pub struct DiagonalizeArgs {
    pub tree: String,
    /// Shift x (expression); for Laplacian kinds the probe is -x, i.e. the
    /// diagonal of M - μI is reported for `--mu`.
    #[arg(long)]
    pub mu: String,
    #[arg(long, default_value = "laplacian")]
    pub kind: String,
    #[arg(long, default_value_t = 53)]
    pub prec: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Laplacian caterpillar construction.
    Classic,
    /// Adjacency caterpillar construction (`--mu` is λ).
    Adjacency,
    /// Generalized random process over starlike trees.
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Uniform,
    Maxdrift,
}

#[derive(Args, Debug, Clone)]
pub struct ShearerArgs {
    #[arg(long, value_enum, default_value = "classic")]
    pub mode: Mode,
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub max_width: usize,
    #[arg(long, default_value_t = 3)]
    pub max_height: u32,
    #[arg(long, value_enum, default_value = "uniform")]
    pub selection: SelectionArg,
    /// Precision in bits for the classic constructions.
    #[arg(long, default_value_t = 256)]
    pub prec: usize,
}

#[derive(Args, Debug, Clone)]
pub struct LimitArgs {
    /// Spec literal such as "[[1,1,1]];tail=[1];close=[1,1]".
    #[arg(long, conflicts_with = "family")]
    pub spec: Option<String>,
    /// Built-in family: lemma34, example51, maxdrift, genetic29, one-k-k.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub kmax: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct CertifyArgs {
    /// Target μ as an expression, e.g. "(5+sqrt(33))/2".
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    pub spec: String,
    /// Indices j to report (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub idx: Vec<usize>,
    /// Horizon; defaults to the largest index.
    #[arg(long)]
    pub k: Option<usize>,
    /// Also solve for ε_j at the indices.
    #[arg(long)]
    pub epsilon: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 3000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct NastyArgs {
    /// μ values (comma separated) at which to check the classic run.
    #[arg(long, value_delimiter = ',')]
    pub verify: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pub k: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ReferenceArgs {
    #[arg(long, default_value_t = 60)]
    pub n: usize,
}

/// Rendered command result.
#[derive(Clone, Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
}

impl Output {
    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone().unwrap_or_else(|| flat_csv(&self.json)),
        }
    }
}

/// `key,value` rows for the scalar top-level fields.
fn flat_csv(v: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(m) = v {
        for (k, x) in m {
            match x {
                Value::String(t) => writeln!(s, "{k},{t}").unwrap(),
                Value::Number(_) | Value::Bool(_) => writeln!(s, "{k},{x}").unwrap(),
                _ => {}
            }
        }
    }
    s
}

/// Failure with an exit code and, for precision caps, partial output.
#[derive(Debug)]
pub struct Failure {
    pub error: Error,
    pub partial: Option<Output>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            error,
            partial: None,
        }
    }
}

pub fn run(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Radius(a) => cmd_radius(a).map_err(Failure::from),
        Command::Diagonalize(a) => cmd_diagonalize(a).map_err(Failure::from),
        Command::Shearer(a) => cmd_shearer(a).map_err(Failure::from),
        Command::Limit(a) => cmd_limit(a).map_err(Failure::from),
        Command::Certify(a) => cmd_certify(a),
        Command::SampleF1(a) => cmd_sample_f1(a).map_err(Failure::from),
        Command::NastyInterval(a) => cmd_nasty(a).map_err(Failure::from),
        Command::ReferenceConstants(a) => Ok(cmd_reference(a)),
    }
}

fn schema(name: &str) -> String {
    format!("lintree.{name}/{SCHEMA_VERSION}")
}

fn kind_name(k: MatrixKind) -> &'static str {
    match k {
        MatrixKind::Adjacency => "adjacency",
        MatrixKind::Laplacian => "laplacian",
        MatrixKind::SignlessLaplacian => "signless",
    }
}

fn parse_expr(s: &str) -> Result<Expr, Error> {
    Expr::parse(s)
}

fn radius_json<R: Real>(g: &LinearTree, r: &RadiusResult<R>) -> Value {
    json!({
        "schema": schema("radius"),
        "tree": g.to_string(),
        "kind": kind_name(r.kind),
        "value": r.value.to_f64(),
        "value_decimal": r.value.to_decimal(),
        "lo": r.lo.to_f64(),
        "hi": r.hi.to_f64(),
        "iterations": r.iterations,
        "exact": r.exact,
        "precision": r.value.prec(),
    })
}

pub fn cmd_radius(a: &RadiusArgs) -> Result<Output, Error> {
    let g = parse_linear_tree(&a.tree)?;
    let kind: MatrixKind = a.kind.parse()?;
    let (json, value, lo, hi, it) = if a.prec <= 53 {
        let r = radius(&g, kind, &1e-12)?;
        (
            radius_json(&g, &r),
            format!("{:.12}", r.value),
            r.lo.to_f64(),
            r.hi.to_f64(),
            r.iterations,
        )
    } else {
        let like = BigReal::from_int(0, a.prec);
        let r = radius(&g, kind, &default_tol(&like))?;
        (
            radius_json(&g, &r),
            r.value.to_sig_digits(a.prec * 3 / 10),
            r.lo.to_f64(),
            r.hi.to_f64(),
            r.iterations,
        )
    };
    let text = format!(
        "rho_{} = {value}\nbracket = ({lo:.15}, {hi:.15}]\niterations = {it}\n",
        kind_name(kind)
    );
    Ok(Output {
        json,
        text,
        csv: None,
    })
}

pub fn cmd_diagonalize(a: &DiagonalizeArgs) -> Result<Output, Error> {
    let g = parse_linear_tree(&a.tree)?;
    let kind: MatrixKind = a.kind.parse()?;
    let mu = parse_expr(&a.mu)?;
    let t = realize(&g, kind);
    let m = mu.eval(a.prec.max(64));
    let (diag, inertia): (Vec<String>, _) = if a.prec <= 53 {
        let o = diagonalize_tree(&t, &-mu.to_f64());
        (
            o.diagonal.iter().map(|d| format!("{d:?}")).collect(),
            o.inertia,
        )
    } else {
        let o = diagonalize_tree(&t, &-m.clone());
        (
            o.diagonal.iter().map(|d| d.to_decimal()).collect(),
            o.inertia,
        )
    };
    let pi = if kind != MatrixKind::Adjacency && mu.to_f64() > 4.0 {
        match pi_trace(&g, &mu.to_f64()) {
            Ok(p) => json!({
                "s_values": p.s_values,
                "drifts": p.drifts,
                "signs": p.sign_vector.iter().map(|s| s.symbol().to_string()).collect::<String>(),
            }),
            Err(e) => json!({ "unavailable": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let json = json!({
        "schema": schema("diagonalize"),
        "tree": g.to_string(),
        "kind": kind_name(kind),
        "mu": a.mu,
        "diagonal": diag,
        "inertia": { "below": inertia.below, "equal": inertia.equal, "above": inertia.above },
        "pi": pi,
    });
    let mut text = format!(
        "eigenvalues of {} below/at/above {}: {} / {} / {}\n",
        kind_name(kind),
        a.mu,
        inertia.below,
        inertia.equal,
        inertia.above
    );
    if let Some(s) = json["pi"]["signs"].as_str() {
        writeln!(text, "sign vector: {s}").unwrap();
    }
    Ok(Output {
        json,
        text,
        csv: None,
    })
}

fn run_json<R: Real>(run: &ShearerRun<R>) -> Value {
    let last = run.last();
    json!({
        "schema": schema("shearer"),
        "mode": run.mode.name(),
        "target": run.target.to_f64(),
        "k": run.len(),
        "tree": last.to_string(),
        "caterpillar": run.counts(),
        "interior_stars": run.interior_stars.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "closing_stars": run.closing_stars.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "interior": run.interior.iter().map(Real::to_f64).collect::<Vec<_>>(),
        "s_trace": run.s_trace.iter().map(Real::to_f64).collect::<Vec<_>>(),
        "radii": run.radii,
        "theta_prime": run.theta_prime.to_f64(),
        "experimental": run.experimental,
        "precision": run.precision,
        "notes": run.notes,
    })
}

fn run_output<R: Real>(run: &ShearerRun<R>) -> Output {
    let json = run_json(run);
    let mut text = String::new();
    if let Some(r) = run.counts() {
        writeln!(text, "r = {r:?}").unwrap();
    }
    writeln!(text, "G_{} = {}", run.len(), run.last()).unwrap();
    let mut csv = String::from("k,star,closing,interior,s,radius\n");
    for j in 0..run.len() {
        writeln!(
            text,
            "k={:<4} S={:<22.15} rho={:.15}",
            j + 1,
            run.s_trace[j].to_f64(),
            run.radii[j]
        )
        .unwrap();
        writeln!(
            csv,
            "{},\"{}\",\"{}\",{:?},{:?},{:?}",
            j + 1,
            run.interior_stars[j],
            run.closing_stars[j],
            run.interior[j].to_f64(),
            run.s_trace[j].to_f64(),
            run.radii[j]
        )
        .unwrap();
    }
    for n in &run.notes {
        writeln!(text, "note: {n}").unwrap();
    }
    Output {
        json,
        text,
        csv: Some(csv),
    }
}

pub fn cmd_shearer(a: &ShearerArgs) -> Result<Output, Error> {
    let mu = parse_expr(&a.mu)?;
    match a.mode {
        Mode::Classic => Ok(run_output(&classic_laplacian(&mu.eval(a.prec), a.k)?)),
        Mode::Adjacency => Ok(run_output(&classic_adjacency(&mu.eval(a.prec), a.k)?)),
        Mode::Random => {
            let policy = match a.selection {
                SelectionArg::Maxdrift => {
                    GeneratorPolicy::maximize_drift(a.max_width, a.max_height)
                }
                SelectionArg::Uniform => {
                    GeneratorPolicy::uniform(a.max_width, a.max_height, a.seed)
                }
            };
            Ok(run_output(&generalized_random(&mu.to_f64(), a.k, &policy)?))
        }
    }
}

fn interval_json(iv: &RootInterval) -> Value {
    json!({ "lo": iv.lo.to_string(), "hi": iv.hi.to_string() })
}

fn poly_json(p: &Polynomial) -> Value {
    json!({ "coefficients": p.integer_coeff_strings(), "text": p.display_in("μ") })
}

fn algebraic_json(a: &AlgebraicLimit) -> Value {
    json!({
        "polynomial": poly_json(&a.defining_polynomial),
        "root": a.selected_root,
        "root_decimal": a.root_big(192).to_sig_digits(50),
        "interval": interval_json(&a.interval),
        "branch": a.branch.name(),
        "entry": a.entry.to_string(),
        "candidates": a.candidates.iter().map(|c| json!({
            "root": c.value,
            "branch": c.branch.name(),
            "interval": interval_json(&c.interval),
        })).collect::<Vec<_>>(),
    })
}

pub fn cmd_limit(a: &LimitArgs) -> Result<Output, Error> {
    let spec = match (&a.spec, &a.family) {
        (Some(s), _) => SequenceSpec::parse(s)?,
        (None, Some(f)) => SequenceSpec::named(f).ok_or_else(|| Error::Syntax {
            pos: 0,
            msg: format!("unknown family '{f}'"),
        })?,
        (None, None) => {
            return Err(Error::Syntax {
                pos: 0,
                msg: "one of --spec or --family is required".into(),
            })
        }
    };
    let est = estimate_limit(&spec, a.kmax, a.tol)?;
    let mut text = format!(
        "estimate rho_L(G_{}) = {:.15}\ngap = {:e}\n",
        a.kmax, est.gamma, est.gap
    );
    let algebraic = match (&spec.tail, &spec.closing) {
        (Tail::Zero, ClosingRule::ShiftOfT) if !spec.prefix.is_empty() => {
            match algebraic_limit(&spec, a.kmax, a.tol)? {
                ZeroTailLimit::Algebraic(x) => Some(x),
                ZeroTailLimit::BoundaryDegenerate { .. } => {
                    text.push_str("boundary-degenerate: pure paths, limit 4\n");
                    None
                }
            }
        }
        (Tail::Constant(t), ClosingRule::Constant(c)) if !spec.prefix.is_empty() => Some(
            constant_tail_limit(&spec.prefix, t, c, (4.0, 1e6), a.kmax, a.tol)?,
        ),
        (Tail::Constant(t), ClosingRule::ShiftOfT) if !spec.prefix.is_empty() => Some(
            constant_tail_limit(&spec.prefix, t, t, (4.0, 1e6), a.kmax, a.tol)?,
        ),
        _ => None,
    };
    if let Some(x) = &algebraic {
        writeln!(
            text,
            "polynomial: {}",
            x.defining_polynomial.display_in("μ")
        )
        .unwrap();
        writeln!(
            text,
            "root = {} ({})",
            x.root_big(192).to_sig_digits(30),
            x.branch.name()
        )
        .unwrap();
    }
    let json = json!({
        "schema": schema("limit"),
        "spec": spec.to_string(),
        "kmax": a.kmax,
        "estimate": est.gamma,
        "gap": est.gap,
        "radii": est.radii,
        "algebraic": algebraic.as_ref().map(algebraic_json),
    });
    let mut csv = String::from("k,radius\n");
    for (i, r) in est.radii.iter().enumerate() {
        writeln!(csv, "{},{r:?}", i + 1).unwrap();
    }
    Ok(Output {
        json,
        text,
        csv: Some(csv),
    })
}

fn cert_output(
    c: &Certificate,
    idx: &[usize],
    spec: &str,
    mu: &str,
    eps: Option<Value>,
    cap: bool,
) -> Output {
    let rows: Vec<Value> = idx
        .iter()
        .filter(|&&j| j >= 1 && j <= c.k())
        .map(|&j| json!({ "j": j, "alpha": c.alpha[j - 1].to_decimal(), "x": c.x[j - 1].to_decimal(), "s": c.s[j - 1].to_decimal() }))
        .collect();
    let verdict = match c.verdict {
        Verdict::ConvergesToMu { ratio, alpha_last } => {
            json!({ "kind": c.verdict.name(), "ratio": ratio, "alpha_last": alpha_last })
        }
        Verdict::StalledBelow { plateau } => {
            json!({ "kind": c.verdict.name(), "plateau": plateau })
        }
    };
    let mut text = String::new();
    for &j in idx.iter().filter(|&&j| j >= 1 && j <= c.k()) {
        writeln!(text, "alpha_{j} = {}", c.alpha[j - 1].to_sig_digits(30)).unwrap();
    }
    writeln!(
        text,
        "verdict: {}\nprecision: {} bits",
        c.verdict.name(),
        c.precision
    )
    .unwrap();
    let mut csv = String::from("j,alpha,x,s\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{}",
            r["j"],
            r["alpha"].as_str().unwrap(),
            r["x"].as_str().unwrap(),
            r["s"].as_str().unwrap()
        )
        .unwrap();
    }
    let json = json!({
        "schema": schema("certificate"),
        "mu": mu,
        "spec": spec,
        "k": c.k(),
        "precision": c.precision,
        "precision_cap_reached": cap,
        "entries": rows,
        "alpha_closed": c.alpha_closed.to_decimal(),
        "verdict": verdict,
        "epsilon": eps,
    });
    Output {
        json,
        text,
        csv: Some(csv),
    }
}

pub fn cmd_certify(a: &CertifyArgs) -> Result<Output, Failure> {
    let mu = parse_expr(&a.mu)?;
    let spec = SequenceSpec::parse(&a.spec)?;
    let k =
        a.k.unwrap_or_else(|| a.idx.iter().copied().max().unwrap_or(1));
    match alpha_certificate(&spec, &mu, k) {
        Ok(c) => {
            let eps = if a.epsilon {
                let r = epsilon_sequence(&spec, &mu, k, &a.idx)?;
                Some(json!({
                    "below_alpha": r.below_alpha,
                    "decreasing": r.decreasing,
                    "entries": r.entries.iter().map(|e| json!({ "j": e.j, "epsilon": e.epsilon.as_ref().map(Real::to_decimal), "convex": e.convex })).collect::<Vec<_>>(),
                }))
            } else {
                None
            };
            let growth = x_growth(&spec, &mu, k, DIVERGENCE_THRESHOLD)?;
            let mut out = cert_output(&c, &a.idx, &a.spec, &a.mu, eps, false);
            out.json["x_growth"] = match growth.growth {
                Growth::DivergenceEvidence { x_last, min_ratio } => {
                    json!({ "kind": "divergence_evidence", "x_last": x_last, "min_ratio": min_ratio })
                }
                Growth::Bounded { sup } => json!({ "kind": "bounded", "sup": sup }),
            };
            out.json["x_growth"]["closed_sum_rel_diff"] = json!(growth.closed_sum_rel_diff);
            Ok(out)
        }
        Err(e @ Error::PrecisionCap { .. }) => {
            let partial = certificate_at(&spec, &mu.eval(MAX_PREC), k)
                .ok()
                .map(|c| cert_output(&c, &a.idx, &a.spec, &a.mu, None, true));
            Err(Failure { error: e, partial })
        }
        Err(e) => Err(e.into()),
    }
}

/// One sampled member of F1.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub seed: u64,
    pub spec: String,
    pub radius: f64,
    /// Distance to the previous record after sorting by radius.
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSummary {
    pub records: Vec<SampleRecord>,
    pub min_gap: Option<f64>,
    pub max_gap: Option<f64>,
}

/// `G_k` with `T_1 = [1,1,1]` and `T_j` uniform in `{[0], [1], [1,1]}`;
/// record `i` uses generator seed `seed + i`.
pub fn f1_member(seed: u64, k: usize) -> LinearTree {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut stars = vec![Starlike::leaves(3)];
    for _ in 1..k {
        stars.push(Starlike::leaves(rng.gen_range(0..3)));
    }
    LinearTree::new(stars).expect("nonempty")
}

pub fn sample_f1(n: usize, k: usize, seed: u64) -> SampleSummary {
    let mut records: Vec<SampleRecord> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let g = f1_member(s, k);
            SampleRecord {
                seed: s,
                spec: g.to_string(),
                radius: laplacian_radius(&g),
                gap: None,
            }
        })
        .collect();
    records.sort_by(|a, b| a.radius.total_cmp(&b.radius).then(a.seed.cmp(&b.seed)));
    for i in 1..records.len() {
        records[i].gap = Some(records[i].radius - records[i - 1].radius);
    }
    let gaps = records.iter().filter_map(|r| r.gap);
    let min_gap = gaps.clone().reduce(f64::min);
    let max_gap = gaps.reduce(f64::max);
    SampleSummary {
        records,
        min_gap,
        max_gap,
    }
}

pub fn cmd_sample_f1(a: &SampleArgs) -> Result<Output, Error> {
    if a.n == 0 || a.k < 2 {
        return Err(Error::Domain("sample-f1 needs n >= 1 and k >= 2".into()));
    }
    let s = sample_f1(a.n, a.k, a.seed);
    let mut csv = String::from("seed,spec,radius,gap\n");
    for r in &s.records {
        let gap = r.gap.map(|g| format!("{g:?}")).unwrap_or_default();
        writeln!(csv, "{},\"{}\",{:?},{}", r.seed, r.spec, r.radius, gap).unwrap();
    }
    let (lo, hi) = (s.records[0].radius, s.records[s.records.len() - 1].radius);
    let text = format!(
        "{} samples, k = {}\nradius range [{lo:.12}, {hi:.12}]\nmin gap {}\nmax gap {}\n",
        a.n,
        a.k,
        s.min_gap.map_or("-".into(), |g| format!("{g:e}")),
        s.max_gap.map_or("-".into(), |g| format!("{g:e}"))
    );
    let json = json!({
        "schema": schema("sample-f1"),
        "n": a.n,
        "k": a.k,
        "seed": a.seed,
        "min_radius": lo,
        "max_radius": hi,
        "min_gap": s.min_gap,
        "max_gap": s.max_gap,
        "records": s.records.iter().map(|r| json!({ "seed": r.seed, "spec": r.spec, "radius": r.radius, "gap": r.gap })).collect::<Vec<_>>(),
    });
    Ok(Output {
        json,
        text,
        csv: Some(csv),
    })
}

pub fn cmd_nasty(a: &NastyArgs) -> Result<Output, Error> {
    let ni = nasty_interval();
    let mut checks = Vec::new();
    let mut text = format!(
        "mu_* = {:.15}\nmu^* = {:.15}\n",
        ni.mu_star, ni.mu_star_upper
    );
    for m in &a.verify {
        let e = parse_expr(m)?;
        let ok = verify_nasty(&e.eval(256), a.k)?;
        writeln!(
            text,
            "mu = {m}: classic run at k = {} is [3,1,...,1,2]: {ok}",
            a.k
        )
        .unwrap();
        checks.push(json!({ "mu": m, "k": a.k, "nasty": ok }));
    }
    let json = json!({
        "schema": schema("nasty-interval"),
        "mu_star": ni.mu_star,
        "mu_star_upper": ni.mu_star_upper,
        "lower_polynomial": poly_json(&ni.lower_poly),
        "upper_polynomial": poly_json(&ni.upper_poly),
        "lower_interval": interval_json(&ni.lower_root),
        "upper_interval": interval_json(&ni.upper_root),
        "checks": checks,
    });
    Ok(Output {
        json,
        text,
        csv: None,
    })
}

pub fn cmd_reference(a: &ReferenceArgs) -> Output {
    let rc = reference_constants(a.n);
    let mut csv = String::from("n,guo_alpha,hoffman_alpha_bar\n");
    for n in 0..=a.n {
        let h = if n == 0 {
            String::new()
        } else {
            format!("{:?}", rc.hoffman_alpha_bar[n - 1])
        };
        writeln!(csv, "{n},{:?},{h}", rc.guo_alpha[n]).unwrap();
    }
    let text = format!(
        "guo omega = {:.15}\nguo limit = {:.15}\nhoffman tau = {:.15}\nhoffman limit = {:.15}\n",
        rc.guo_omega, rc.guo_limit, rc.hoffman_tau, rc.hoffman_limit
    );
    let json = json!({
        "schema": schema("reference-constants"),
        "guo_omega": rc.guo_omega,
        "guo_limit": rc.guo_limit,
        "guo_alpha": rc.guo_alpha,
        "hoffman_tau": rc.hoffman_tau,
        "hoffman_limit": rc.hoffman_limit,
        "hoffman_alpha_bar": rc.hoffman_alpha_bar,
    });
    Output {
        json,
        text,
        csv: Some(csv),
    }
}
