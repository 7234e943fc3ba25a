//! Parameter sweeps over `(α, p, r, ρ)`, verification records, sharpness
//! studies, and CSV/JSON output.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{extremal_family, BoundaryFunction, FamilyKind};
use crate::constants::{self, ConstantKind};
use crate::error::{Error, Result};
use crate::extension::{kernel_mean, partials, poisson_extend, AlphaParam, DiskPoint, Partials};
use crate::means::{family_integral_means, integral_means_multi, LebesgueExponent};
use crate::qc::{self, DiskGrid};
use crate::quad::{QuadratureError, QuadratureSpec};

/// One checked inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub theorem: String,
    pub alpha: f64,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub boundary: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub nodes: usize,
    /// Seconds spent on the parameter tuple that produced the record.
    pub elapsed: f64,
    /// `margin >= -tol`.
    pub pass: bool,
    pub notes: String,
}

impl VerificationRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theorem: &str,
        alpha: f64,
        p: Option<f64>,
        r: Option<f64>,
        boundary: &str,
        lhs: f64,
        rhs: f64,
        tol: f64,
        nodes: usize,
        elapsed: f64,
        notes: String,
    ) -> Self {
        let margin = rhs - lhs;
        Self {
            theorem: theorem.into(),
            alpha,
            p,
            r,
            boundary: boundary.into(),
            lhs,
            rhs,
            margin,
            nodes,
            elapsed,
            pass: margin >= -tol,
            notes,
        }
    }

    /// A record for a tuple that could not be evaluated.
    pub fn failed(theorem: &str, alpha: f64, p: Option<f64>, r: Option<f64>, boundary: &str, notes: String) -> Self {
        Self {
            theorem: theorem.into(),
            alpha,
            p,
            r,
            boundary: boundary.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            nodes: 0,
            elapsed: 0.0,
            pass: false,
            notes,
        }
    }

    /// `lhs / rhs`, or 1 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 && self.lhs == 0.0 {
            1.0
        } else {
            self.lhs / self.rhs
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    theorem: &'a str,
    alpha: f64,
    p: Option<f64>,
    r: Option<f64>,
    boundary: &'a str,
    lhs: f64,
    rhs: f64,
    margin: f64,
    nodes: usize,
    pass: bool,
}

/// CSV with header `theorem,alpha,p,r,boundary,lhs,rhs,margin,nodes,pass`.
pub fn write_csv<W: Write>(records: &[VerificationRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            theorem: &r.theorem,
            alpha: r.alpha,
            p: r.p,
            r: r.r,
            boundary: &r.boundary,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            nodes: r.nodes,
            pass: r.pass,
        })?;
    }
    if records.is_empty() {
        w.write_record(["theorem", "alpha", "p", "r", "boundary", "lhs", "rhs", "margin", "nodes", "pass"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[VerificationRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

/// Theorems the sweep can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    /// Integral means of `u` against the kernel mean.
    T16,
    /// Pointwise bounds for the weighted partials.
    T17,
    /// Integral-means bounds for the weighted partials.
    T18,
    /// Circle integrals of `|∂u|`, `|∂̄u|` against the boundary length.
    T19,
    /// `|z ∂u|`, `|z̄ ∂̄u|` against the boundary Lipschitz constant.
    T110,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [Self::T16, Self::T17, Self::T18, Self::T19, Self::T110];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "1.6" => Self::T16,
            "1.7" => Self::T17,
            "1.8" => Self::T18,
            "1.9" => Self::T19,
            "1.10" => Self::T110,
            other => {
                return Err(Error::Parse {
                    token: other.into(),
                    message: "theorem must be one of 1.6, 1.7, 1.8, 1.9, 1.10".into(),
                })
            }
        })
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::T16 => "1.6",
            Self::T17 => "1.7",
            Self::T18 => "1.8",
            Self::T19 => "1.9",
            Self::T110 => "1.10",
        })
    }
}

/// Random boundaries are trigonometric polynomials of at most this degree.
pub const MAX_RANDOM_DEGREE: u32 = 6;

/// Sweep parameters, read from `key=value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub theorems: Vec<TheoremId>,
    pub alphas: Vec<f64>,
    pub ps: Vec<f64>,
    pub rs: Vec<f64>,
    /// Extremal members at `r = ρ` are added for every `ρ` here.
    pub rhos: Vec<f64>,
    pub boundaries: Vec<String>,
    pub random_boundaries: usize,
    pub degree: u32,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            theorems: TheoremId::ALL.to_vec(),
            alphas: vec![0.0],
            ps: vec![2.0],
            rs: vec![0.5],
            rhos: vec![],
            boundaries: vec![],
            random_boundaries: 0,
            degree: 4,
            seed: 0,
            tol: 1e-10,
        }
    }
}

fn parse_list<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let s = if s == "inf" { "inf" } else { s };
            s.parse::<T>().map_err(|_| Error::Config {
                line,
                message: format!("{key}: cannot parse '{s}'"),
            })
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::Config {
        line,
        message: format!("{key}: cannot parse '{}'", v.trim()),
    })
}

impl SweepConfig {
    /// Keys: `theorems`, `alpha`, `p`, `r`, `rho` (comma lists), `boundary`
    /// (one spec, repeatable), `boundaries` (`;`-separated specs),
    /// `random_boundaries`, `degree`, `seed`, `tol`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut boundaries_set = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected key=value, got '{body}'"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "theorems" | "theorem" => {
                    c.theorems = v
                        .split(',')
                        .map(|s| s.trim())
                        .filter(|s| !s.is_empty())
                        .map(|s| {
                            TheoremId::parse(s).map_err(|e| Error::Config {
                                line,
                                message: e.to_string(),
                            })
                        })
                        .collect::<Result<_>>()?
                }
                "alpha" => c.alphas = parse_list(v, line, k)?,
                "p" => c.ps = parse_list(v, line, k)?,
                "r" => c.rs = parse_list(v, line, k)?,
                "rho" => c.rhos = parse_list(v, line, k)?,
                "boundary" | "boundaries" => {
                    if !boundaries_set {
                        c.boundaries.clear();
                        boundaries_set = true;
                    }
                    let items: Vec<&str> = if k == "boundary" { vec![v] } else { v.split(';').collect() };
                    for s in items.into_iter().map(str::trim).filter(|s| !s.is_empty()) {
                        BoundaryFunction::parse(s).map_err(|e| Error::Config {
                            line,
                            message: e.to_string(),
                        })?;
                        c.boundaries.push(s.to_string());
                    }
                }
                "random_boundaries" => c.random_boundaries = parse_one(v, line, k)?,
                "degree" => c.degree = parse_one(v, line, k)?,
                "seed" => c.seed = parse_one(v, line, k)?,
                "tol" => c.tol = parse_one(v, line, k)?,
                other => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config { line: 0, message: m });
        if self.theorems.is_empty() || self.alphas.is_empty() || self.ps.is_empty() || self.rs.is_empty() {
            return bad("theorems, alpha, p and r must be nonempty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > -1.0) || !a.is_finite()) {
            return bad(format!("alpha must exceed -1, got {a}"));
        }
        if let Some(p) = self.ps.iter().find(|p| !(**p >= 1.0)) {
            return bad(format!("p must be at least 1, got {p}"));
        }
        if let Some(r) = self.rs.iter().chain(&self.rhos).find(|r| !(0.0..1.0).contains(*r)) {
            return bad(format!("radii must lie in [0, 1), got {r}"));
        }
        if self.degree > MAX_RANDOM_DEGREE {
            return bad(format!("degree must be at most {MAX_RANDOM_DEGREE}, got {}", self.degree));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.boundaries.is_empty() && self.random_boundaries == 0 && self.rhos.is_empty() {
            return bad("no boundary functions: set boundary, boundaries, random_boundaries or rho".into());
        }
        Ok(())
    }

    /// Listed boundaries followed by the seeded random ones.
    pub fn boundary_functions(&self) -> Result<Vec<BoundaryFunction>> {
        let mut out = Vec::new();
        for s in &self.boundaries {
            out.push(BoundaryFunction::parse(s)?);
        }
        for i in 0..self.random_boundaries as u64 {
            out.push(BoundaryFunction::trig_poly(self.seed.wrapping_add(i), self.degree));
        }
        Ok(out)
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        Ok(QuadratureSpec::with_tol(self.tol)?)
    }
}

/// Records of a sweep and the number of tuples that failed to converge.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub records: Vec<VerificationRecord>,
    pub non_converged: usize,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// 0 all pass, 1 some record fails, 3 some tuple did not converge.
    pub fn exit_code(&self) -> i32 {
        if self.non_converged > 0 {
            3
        } else if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

/// Angles at which pointwise bounds are checked on each circle.
pub const POINT_ANGLES: usize = 8;

fn holder_weight(r: f64, p: &LebesgueExponent) -> f64 {
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p.p() };
    ((1.0 - r) * (1.0 + r)).powf(1.0 + inv_p)
}

fn opt_p(p: &LebesgueExponent) -> Option<f64> {
    Some(p.p())
}

/// Moduli of `u_r`, `u_θ`, `u_z`, `u_z̄` around a circle, refined until
/// every requested mean is stable.
fn circle_partial_means(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    r: f64,
    ps: &[LebesgueExponent],
    spec: &QuadratureSpec,
) -> Result<(Vec<[f64; 4]>, usize)> {
    // |∂u| has near-kinks where a partial nearly vanishes, so these means
    // converge only algebraically in the number of angles
    let tol = spec.tol().max(1e-7);
    let floor = (0..64).map(|j| f.eval(TAU * j as f64 / 64.0).norm()).fold(f64::MIN_POSITIVE, f64::max);
    let mut nodes = 0usize;
    let mut eval = |theta: f64| -> Result<[f64; 4]> {
        let p = partials(alpha, f, &DiskPoint::new(r, theta)?, spec)?;
        nodes += p.nodes;
        Ok([p.u_r.norm(), p.u_theta.norm(), p.u_z.norm(), p.u_zbar.norm()])
    };
    let mut n = 64usize;
    let mut samples = Vec::with_capacity(n);
    for j in 0..n {
        samples.push(eval(TAU * j as f64 / n as f64)?);
    }
    let means = |s: &[[f64; 4]]| -> Vec<[f64; 4]> {
        ps.iter()
            .map(|p| {
                let mut out = [0.0; 4];
                for c in 0..4 {
                    out[c] = if p.is_infinite() {
                        s.iter().map(|v| v[c]).fold(0.0, f64::max)
                    } else {
                        (s.iter().map(|v| v[c].powf(p.p())).sum::<f64>() / s.len() as f64).powf(1.0 / p.p())
                    };
                }
                out
            })
            .collect()
    };
    let mut prev = means(&samples);
    let mut older = prev.clone();
    for _ in 0..8 {
        let n2 = 2 * n;
        let mut next = Vec::with_capacity(n2);
        for j in 0..n {
            next.push(samples[j]);
            next.push(eval(TAU * (2 * j + 1) as f64 / n2 as f64)?);
        }
        samples = next;
        n = n2;
        let cur = means(&samples);
        let stable = prev.iter().zip(&cur).all(|(a, b)| {
            let scale = b.iter().fold(floor, |m, v| m.max(*v));
            a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
        });
        if stable {
            return Ok((cur, nodes));
        }
        older = std::mem::replace(&mut prev, cur);
    }
    Err(Error::Quadrature(QuadratureError::NoConvergence {
        last: prev.iter().flatten().copied().collect(),
        previous: older.iter().flatten().copied().collect(),
        nodes,
    }))
}

/// Centered-family means of the four partials: the member recentered at each
/// angle is evaluated at that angle.
fn family_partial_means(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    r: f64,
    p: &LebesgueExponent,
    spec: &QuadratureSpec,
) -> Result<([f64; 4], usize)> {
    let mut out = [0.0; 4];
    let nodes = std::cell::Cell::new(0usize);
    for (c, slot) in out.iter_mut().enumerate() {
        *slot = family_integral_means(f, r, p, POINT_ANGLES, |g, z| {
            let q = partials(alpha, g, &z, spec)?;
            nodes.set(nodes.get() + q.nodes);
            Ok(match c {
                0 => q.u_r,
                1 => q.u_theta,
                2 => q.u_z,
                _ => q.u_zbar,
            })
        })?;
    }
    Ok((out, nodes.get()))
}

struct Ctx<'a> {
    spec: &'a QuadratureSpec,
    norms: HashMap<(usize, u64), f64>,
    consts: HashMap<(ConstantKind, u64, u64, u64), f64>,
}

fn key(x: f64) -> u64 {
    x.to_bits()
}

impl<'a> Ctx<'a> {
    fn norm(&mut self, ix: usize, f: &BoundaryFunction, p: &LebesgueExponent) -> Result<f64> {
        if let Some(v) = self.norms.get(&(ix, key(p.p()))) {
            return Ok(*v);
        }
        let v = f.lp_norm(p, self.spec)?;
        self.norms.insert((ix, key(p.p())), v);
        Ok(v)
    }

    /// Constant value; `r = None` for the supremum. `p` is ignored for D, E, F.
    fn constant(&mut self, kind: ConstantKind, alpha: &AlphaParam, p: &LebesgueExponent, r: Option<f64>) -> Result<f64> {
        let pk = if kind.needs_holder_exponent() { key(p.p()) } else { 0 };
        let k = (kind, key(alpha.alpha()), pk, r.map_or(u64::MAX, key));
        if let Some(v) = self.consts.get(&k) {
            return Ok(*v);
        }
        let v = constants::constant(kind, alpha, Some(p), r, self.spec)?.value;
        self.consts.insert(k, v);
        Ok(v)
    }
}

fn error_record(theorem: &str, alpha: f64, p: Option<f64>, r: Option<f64>, f: &str, e: &Error, nc: &mut usize) -> VerificationRecord {
    if e.is_non_convergence() {
        *nc += 1;
    }
    VerificationRecord::failed(theorem, alpha, p, r, f, e.to_string())
}

fn sweep_16(
    ctx: &mut Ctx,
    alpha: &AlphaParam,
    ix: usize,
    f: &BoundaryFunction,
    ps: &[LebesgueExponent],
    rs: &[f64],
    out: &mut Vec<VerificationRecord>,
) -> Result<()> {
    let start = Instant::now();
    let spec = ctx.spec;
    let norms: Vec<f64> = ps.iter().map(|p| ctx.norm(ix, f, p)).collect::<Result<_>>()?;
    let mut best = vec![0.0f64; ps.len()];
    let mut total_nodes = 0;
    for &r in rs {
        let (m, nodes) = integral_means_multi(|z| poisson_extend(alpha, f, &z, spec), r, ps, spec)?;
        total_nodes += nodes;
        let km = kernel_mean(alpha, r)?;
        for (i, p) in ps.iter().enumerate() {
            best[i] = best[i].max(m[i]);
            out.push(VerificationRecord::new(
                "1.6",
                alpha.alpha(),
                opt_p(p),
                Some(r),
                f.label(),
                m[i],
                km * norms[i],
                1e-6 * norms[i],
                nodes,
                start.elapsed().as_secs_f64(),
                String::new(),
            ));
        }
    }
    for (i, p) in ps.iter().enumerate() {
        out.push(VerificationRecord::new(
            "1.6-hardy",
            alpha.alpha(),
            opt_p(p),
            None,
            f.label(),
            best[i],
            norms[i],
            1e-6 * norms[i],
            total_nodes,
            start.elapsed().as_secs_f64(),
            "supremum over the r grid".into(),
        ));
    }
    Ok(())
}

/// Pointwise records for one `(α, p, r, f)` from partials at several angles.
#[allow(clippy::too_many_arguments)]
fn records_17(
    ctx: &mut Ctx,
    alpha: &AlphaParam,
    p: &LebesgueExponent,
    r: f64,
    f: &BoundaryFunction,
    norm: f64,
    pts: &[Partials],
    only: Option<FamilyKind>,
    elapsed: f64,
    out: &mut Vec<VerificationRecord>,
) -> Result<()> {
    let w = holder_weight(r, p);
    let nodes: usize = pts.iter().map(|q| q.nodes).sum();
    let max = |g: fn(&Partials) -> Complex64| pts.iter().map(|q| g(q).norm()).fold(0.0, f64::max) * w;
    let rows: [(FamilyKind, ConstantKind, f64); 4] = [
        (FamilyKind::A, ConstantKind::A, max(|q| q.u_r)),
        (FamilyKind::B, ConstantKind::B, max(|q| q.u_theta)),
        (FamilyKind::C, ConstantKind::C, max(|q| q.u_z)),
        (FamilyKind::Cbar, ConstantKind::C, max(|q| q.u_zbar)),
    ];
    let tol = 1e-6 * norm;
    for (fam, kind, lhs) in rows {
        if only.is_some_and(|k| k != fam) {
            continue;
        }
        let id = format!("1.7-{fam}");
        let rv = ctx.constant(kind, alpha, p, Some(r))?;
        out.push(VerificationRecord::new(&id, alpha.alpha(), opt_p(p), Some(r), f.label(), lhs, rv * norm, tol, nodes, elapsed, String::new()));
        if kind == ConstantKind::B && alpha.alpha() + 2.0 / p.p() < 0.0 {
            continue;
        }
        let sv = ctx.constant(kind, alpha, p, None)?;
        out.push(VerificationRecord::new(&format!("{id}-sup"), alpha.alpha(), opt_p(p), Some(r), f.label(), lhs, sv * norm, tol, nodes, elapsed, String::new()));
    }
    Ok(())
}

/// Means records for one `(α, p, r, f)`; `m` holds `M_p` of `u_r, u_θ, u_z, u_z̄`.
#[allow(clippy::too_many_arguments)]
fn records_18(
    ctx: &mut Ctx,
    alpha: &AlphaParam,
    p: &LebesgueExponent,
    r: f64,
    f: &BoundaryFunction,
    norm: f64,
    m: [f64; 4],
    nodes: usize,
    only: Option<FamilyKind>,
    elapsed: f64,
    notes: &str,
    out: &mut Vec<VerificationRecord>,
) -> Result<()> {
    let w = (1.0 - r) * (1.0 + r);
    let rows: [(FamilyKind, ConstantKind, f64); 4] = [
        (FamilyKind::D, ConstantKind::D, m[0]),
        (FamilyKind::E, ConstantKind::E, m[1]),
        (FamilyKind::F, ConstantKind::F, m[2]),
        (FamilyKind::Fbar, ConstantKind::F, m[3]),
    ];
    let tol = 1e-6 * norm;
    for (fam, kind, mean) in rows {
        if only.is_some_and(|k| k != fam) {
            continue;
        }
        let id = format!("1.8-{fam}");
        let lhs = w * mean;
        let rv = ctx.constant(kind, alpha, p, Some(r))?;
        out.push(VerificationRecord::new(&id, alpha.alpha(), opt_p(p), Some(r), f.label(), lhs, rv * norm, tol, nodes, elapsed, notes.into()));
        let sv = ctx.constant(kind, alpha, p, None)?;
        out.push(VerificationRecord::new(&format!("{id}-sup"), alpha.alpha(), opt_p(p), Some(r), f.label(), lhs, sv * norm, tol, nodes, elapsed, notes.into()));
    }
    Ok(())
}

fn is_centered_family(f: &BoundaryFunction) -> bool {
    matches!(
        f.as_extremal(),
        Some((FamilyKind::D | FamilyKind::E | FamilyKind::F | FamilyKind::Fbar, _))
    )
}

const CENTERED_NOTE: &str = "means of the family member recentered at each angle";

/// Runs every check selected by `config`. A failing or non-convergent tuple
/// produces a failed record and the sweep continues.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let spec = config.quadrature()?;
    let fs = config.boundary_functions()?;
    let ps: Vec<LebesgueExponent> = config.ps.iter().map(|&p| LebesgueExponent::new(p)).collect::<Result<_>>()?;
    let holder_ps: Vec<LebesgueExponent> = ps.iter().copied().filter(|p| p.p() > 1.0).collect();
    let mut ctx = Ctx {
        spec: &spec,
        norms: HashMap::new(),
        consts: HashMap::new(),
    };
    let mut out = Vec::new();
    let mut nc = 0usize;
    let mut theorems = config.theorems.clone();
    theorems.sort();
    theorems.dedup();
    for th in theorems {
        for &a in &config.alphas {
            let alpha = AlphaParam::new(a)?;
            match th {
                TheoremId::T16 => {
                    for (ix, f) in fs.iter().enumerate() {
                        if let Err(e) = sweep_16(&mut ctx, &alpha, ix, f, &ps, &config.rs, &mut out) {
                            out.push(error_record("1.6", a, None, None, f.label(), &e, &mut nc));
                        }
                    }
                }
                TheoremId::T17 => {
                    for (ix, f) in fs.iter().enumerate() {
                        for &r in &config.rs {
                            let start = Instant::now();
                            let pts: Result<Vec<Partials>> = (0..POINT_ANGLES)
                                .map(|j| partials(&alpha, f, &DiskPoint::new(r, TAU * j as f64 / POINT_ANGLES as f64)?, &spec))
                                .collect();
                            let pts = match pts {
                                Ok(v) => v,
                                Err(e) => {
                                    out.push(error_record("1.7", a, None, Some(r), f.label(), &e, &mut nc));
                                    continue;
                                }
                            };
                            for p in &holder_ps {
                                let res = ctx.norm(ix, f, p).and_then(|n| {
                                    records_17(&mut ctx, &alpha, p, r, f, n, &pts, None, start.elapsed().as_secs_f64(), &mut out)
                                });
                                if let Err(e) = res {
                                    out.push(error_record("1.7", a, opt_p(p), Some(r), f.label(), &e, &mut nc));
                                }
                            }
                        }
                    }
                    for &rho in &config.rhos {
                        for p in &holder_ps {
                            for kind in [FamilyKind::A, FamilyKind::B, FamilyKind::C, FamilyKind::Cbar] {
                                let start = Instant::now();
                                let res = extremal_family(kind, &alpha, p, rho).and_then(|f| {
                                    let n = f.lp_norm(p, &spec)?;
                                    let q = partials(&alpha, &f, &DiskPoint::new(rho, 0.0)?, &spec)?;
                                    records_17(&mut ctx, &alpha, p, rho, &f, n, &[q], Some(kind), start.elapsed().as_secs_f64(), &mut out)
                                });
                                if let Err(e) = res {
                                    out.push(error_record(&format!("1.7-{kind}"), a, opt_p(p), Some(rho), "extremal", &e, &mut nc));
                                }
                            }
                        }
                    }
                }
                TheoremId::T18 => {
                    for (ix, f) in fs.iter().enumerate() {
                        for &r in &config.rs {
                            let start = Instant::now();
                            if is_centered_family(f) {
                                for p in &ps {
                                    let res = ctx.norm(ix, f, p).and_then(|n| {
                                        let (m, nodes) = family_partial_means(&alpha, f, r, p, &spec)?;
                                        records_18(&mut ctx, &alpha, p, r, f, n, m, nodes, None, start.elapsed().as_secs_f64(), CENTERED_NOTE, &mut out)
                                    });
                                    if let Err(e) = res {
                                        out.push(error_record("1.8", a, opt_p(p), Some(r), f.label(), &e, &mut nc));
                                    }
                                }
                                continue;
                            }
                            let res = circle_partial_means(&alpha, f, r, &ps, &spec).and_then(|(m, nodes)| {
                                for (i, p) in ps.iter().enumerate() {
                                    let n = ctx.norm(ix, f, p)?;
                                    records_18(&mut ctx, &alpha, p, r, f, n, m[i], nodes, None, start.elapsed().as_secs_f64(), "", &mut out)?;
                                }
                                Ok(())
                            });
                            if let Err(e) = res {
                                out.push(error_record("1.8", a, None, Some(r), f.label(), &e, &mut nc));
                            }
                        }
                    }
                    for &rho in &config.rhos {
                        for p in &ps {
                            for kind in [FamilyKind::D, FamilyKind::E, FamilyKind::F, FamilyKind::Fbar] {
                                let start = Instant::now();
                                let res = extremal_family(kind, &alpha, p, rho).and_then(|f| {
                                    let n = f.lp_norm(p, &spec)?;
                                    let (m, nodes) = family_partial_means(&alpha, &f, rho, p, &spec)?;
                                    records_18(&mut ctx, &alpha, p, rho, &f, n, m, nodes, Some(kind), start.elapsed().as_secs_f64(), CENTERED_NOTE, &mut out)
                                });
                                if let Err(e) = res {
                                    out.push(error_record(&format!("1.8-{kind}"), a, opt_p(p), Some(rho), "extremal", &e, &mut nc));
                                }
                            }
                        }
                    }
                }
                TheoremId::T19 => {
                    let rs: Vec<f64> = config.rs.iter().copied().filter(|&r| r > 0.0).collect();
                    for f in fs.iter().filter(|f| f.is_continuous()) {
                        match qc::verify_thm19(&alpha, f, &rs, &spec) {
                            Ok(v) => out.extend(v),
                            Err(e) => out.push(error_record("1.9", a, None, None, f.label(), &e, &mut nc)),
                        }
                    }
                }
                TheoremId::T110 => {
                    let grid = DiskGrid::with_radii(&config.rs);
                    for f in fs.iter().filter(|f| f.is_continuous()) {
                        match qc::verify_thm110(&alpha, f, &grid, &spec) {
                            Ok(v) => out.extend(v),
                            Err(e) => out.push(error_record("1.10", a, None, None, f.label(), &e, &mut nc)),
                        }
                    }
                }
            }
        }
    }
    Ok(SweepReport {
        records: out,
        non_converged: nc,
    })
}

/// One row of a sharpness study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub rho: f64,
    pub ratio: f64,
    pub target: f64,
    /// `|ratio - target|`.
    pub error: f64,
}

/// Normalized extremal ratios at `z = ρ` for increasing `ρ`, with the
/// constant they should approach. Supported: `α = 0` for A, C, D, E, F, and
/// `α + 2/p >= 0` for B.
pub fn sharpness_study(
    kind: ConstantKind,
    alpha: &AlphaParam,
    p: &LebesgueExponent,
    rhos: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<SharpnessRow>> {
    let a = alpha.alpha();
    match kind {
        ConstantKind::B if a + 2.0 / p.p() < 0.0 => {
            return Err(Error::Unsupported(format!(
                "sharpness of B is established only for alpha + 2/p >= 0, got {}",
                a + 2.0 / p.p()
            )))
        }
        ConstantKind::B => {}
        _ if a != 0.0 => {
            return Err(Error::Unsupported(format!(
                "sharpness of {kind} is established only in the limit alpha -> 0; use alpha = 0"
            )))
        }
        _ => {}
    }
    if kind.needs_holder_exponent() && p.p() <= 1.0 {
        return Err(Error::Unsupported(format!("constant {kind} needs p > 1")));
    }
    let (family, target) = match kind {
        ConstantKind::A => (FamilyKind::A, constants::a_sharp_alpha_zero(p, spec)?),
        ConstantKind::B => (FamilyKind::B, constants::constant_b(alpha, p, None, spec)?.value),
        ConstantKind::C => (FamilyKind::C, constants::constant_c(alpha, p, None, spec)?.value),
        ConstantKind::D => (FamilyKind::D, constants::constant_d(alpha, None, spec)?.value),
        ConstantKind::E => (FamilyKind::E, constants::constant_e(alpha, None, spec)?.value),
        ConstantKind::F => (FamilyKind::F, constants::constant_f(alpha, None, spec)?.value),
    };
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let f = extremal_family(family, alpha, p, rho)?;
        let norm = f.lp_norm(p, spec)?;
        let q = partials(alpha, &f, &DiskPoint::new(rho, 0.0)?, spec)?;
        let w1 = (1.0 - rho) * (1.0 + rho);
        let ratio = match kind {
            ConstantKind::A => holder_weight(rho, p) * q.u_r.norm(),
            ConstantKind::B => holder_weight(rho, p) * q.u_theta.norm(),
            ConstantKind::C => holder_weight(rho, p) * q.u_z.norm(),
            ConstantKind::D => w1 * q.u_r.norm(),
            ConstantKind::E => w1 * q.u_theta.norm(),
            ConstantKind::F => w1 * q.u_z.norm(),
        } / norm;
        rows.push(SharpnessRow {
            rho,
            ratio,
            target,
            error: (ratio - target).abs(),
        });
    }
    Ok(rows)
}

pub fn write_sharpness_csv<W: Write>(rows: &[SharpnessRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn record_margin_and_pass() {
        let r = VerificationRecord::new("1.6", 0.0, Some(2.0), Some(0.5), "const:2", 2.0, 2.0, 1e-9, 10, 0.0, String::new());
        assert_eq!(r.margin, 0.0);
        assert!(r.pass);
        let r = VerificationRecord::new("1.6", 0.0, None, None, "x", 1.0, 0.9, 1e-3, 0, 0.0, String::new());
        assert!(!r.pass);
    }

    #[test]
    fn csv_schema_and_roundtrip() {
        let recs = vec![
            VerificationRecord::new("1.7-A", 0.5, Some(2.0), Some(0.3), "trigpoly:1,4", 0.1, 0.2, 0.0, 7, 0.0, String::new()),
            VerificationRecord::new("1.10-a", 0.0, None, None, "exp:1", 0.95, 1.0, 0.0, 3, 0.0, String::new()),
        ];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "theorem,alpha,p,r,boundary,lhs,rhs,margin,nodes,pass");
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][4], "trigpoly:1,4");
        assert_eq!(rows[0][5].parse::<f64>().unwrap(), 0.1);
        assert_eq!(&rows[1][2], "");
        let mut js = Vec::new();
        write_json(&recs, &mut js).unwrap();
        let back: serde_json::Value = serde_json::from_slice(&js).unwrap();
        assert_eq!(back[0]["lhs"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn config_parsing() {
        let c = SweepConfig::parse(
            "# sample\ntheorems=1.6,1.8\nalpha=0, 1.5\np=1,2,inf\nr=0.25,0.5\nboundary=const:2\nboundaries=exp:1;trigpoly:3,4\nrandom_boundaries=2\nseed=7\n",
        )
        .unwrap();
        assert_eq!(c.theorems, vec![TheoremId::T16, TheoremId::T18]);
        assert_eq!(c.alphas, vec![0.0, 1.5]);
        assert!(c.ps[2].is_infinite());
        assert_eq!(c.boundaries.len(), 3);
        let fs = c.boundary_functions().unwrap();
        assert_eq!(fs.len(), 5);
        assert_eq!(fs[3].label(), "trigpoly:7,4");
        match SweepConfig::parse("alpha=0\nfoo=1\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(SweepConfig::parse("alpha=-1\nboundary=exp:1").is_err());
        assert!(SweepConfig::parse("r=1.0\nboundary=exp:1").is_err());
        assert!(SweepConfig::parse("boundary=nonsense:1").is_err());
        assert!(SweepConfig::parse("alpha=0").is_err());
        assert!(SweepConfig::parse("degree=7\nrandom_boundaries=1").is_err());
    }

    #[test]
    fn thm16_constant_equality() {
        let c = SweepConfig::parse("theorems=1.6\nalpha=0\np=2\nr=0.5\nboundary=const:2").unwrap();
        let rep = run_sweep(&c).unwrap();
        let r = &rep.records[0];
        assert_eq!(r.theorem, "1.6");
        assert_relative_eq!(r.lhs, 2.0, max_relative = 1e-12);
        assert_relative_eq!(r.rhs, 2.0, max_relative = 1e-12);
        assert!(r.margin.abs() < 1e-9 && r.pass);
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn thm18_d_family_ratio() {
        let c = SweepConfig::parse("theorems=1.8\nalpha=0\np=2\nr=0.9\nboundary=extremal:D,0,2,0.9").unwrap();
        let rep = run_sweep(&c).unwrap();
        let d = rep.records.iter().find(|r| r.theorem == "1.8-D").unwrap();
        assert!(d.ratio() >= 0.99, "{d:?}");
        assert_relative_eq!(d.lhs, 4.0 / PI, max_relative = 1e-6);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn thm110_identity_margin() {
        let c = SweepConfig::parse("theorems=1.10\nalpha=0\nr=0.5\nboundary=exp:1").unwrap();
        let rep = run_sweep(&c).unwrap();
        let a = rep.records.iter().find(|r| r.theorem == "1.10-a").unwrap();
        assert!(a.pass);
        assert_relative_eq!(a.margin, 1.0 - 0.95, max_relative = 1e-6);
    }

    #[test]
    fn thm17_pointwise_random() {
        let c = SweepConfig::parse("theorems=1.7\nalpha=-0.5,1\np=1,2,4\nr=0.3,0.8\nrandom_boundaries=2\nseed=5").unwrap();
        let rep = run_sweep(&c).unwrap();
        assert!(!rep.records.is_empty());
        assert!(rep.records.iter().all(|r| r.p != Some(1.0)));
        let pointwise_fail: Vec<_> = rep.records.iter().filter(|r| !r.theorem.ends_with("-sup") && !r.pass).collect();
        assert!(pointwise_fail.is_empty(), "{pointwise_fail:?}");
    }

    #[test]
    fn sharpness_rules() {
        let s = spec();
        let a0 = AlphaParam::new(0.0).unwrap();
        let a1 = AlphaParam::new(1.0).unwrap();
        let p2 = LebesgueExponent::new(2.0).unwrap();
        assert!(sharpness_study(ConstantKind::D, &a1, &p2, &[0.9], &s).is_err());
        assert!(sharpness_study(ConstantKind::B, &AlphaParam::new(-0.9).unwrap(), &LebesgueExponent::new(4.0).unwrap(), &[0.9], &s).is_err());
        let d = sharpness_study(ConstantKind::D, &a0, &p2, &[0.9], &s).unwrap();
        assert_relative_eq!(d[0].ratio, 4.0 / PI, max_relative = 1e-9);
        let f = sharpness_study(ConstantKind::F, &a0, &p2, &[0.5, 0.9], &s).unwrap();
        assert!(f.iter().all(|r| r.error < 1e-9));
        let a = sharpness_study(ConstantKind::A, &a0, &p2, &[0.9, 0.99, 0.999], &s).unwrap();
        assert!(a[1].error < a[0].error && a[2].error < a[1].error, "{a:?}");
        assert_relative_eq!(a[0].target, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn exit_codes() {
        let ok = VerificationRecord::new("x", 0.0, None, None, "b", 0.0, 1.0, 0.0, 0, 0.0, String::new());
        let bad = VerificationRecord::new("x", 0.0, None, None, "b", 2.0, 1.0, 0.0, 0, 0.0, String::new());
        assert_eq!(SweepReport { records: vec![ok.clone()], non_converged: 0 }.exit_code(), 0);
        assert_eq!(SweepReport { records: vec![ok.clone(), bad], non_converged: 0 }.exit_code(), 1);
        assert_eq!(SweepReport { records: vec![ok], non_converged: 1 }.exit_code(), 3);
    }
}
