//! Sharp-constant functions bounding the weighted partials of `P_α[f]`, their
//! suprema over the radius, and the integral lemmas used to obtain them.
//!
//! Notation: `c = c_α`, `q = p/(p-1)`, and `|1 + r e^{-is}|^x` is evaluated as
//! `((1-r)² + 4r cos²(s/2))^{x/2}`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::AlphaParam;
use crate::means::LebesgueExponent;
use crate::quad::{self, Layout, QuadratureSpec};
use crate::specfun::{self, HypArgs, HYP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstantKind {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl ConstantKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "A" => Self::A,
            "B" => Self::B,
            "C" => Self::C,
            "D" => Self::D,
            "E" => Self::E,
            "F" => Self::F,
            other => {
                return Err(Error::Parse {
                    token: other.into(),
                    message: "constant kind must be one of A..F".into(),
                })
            }
        })
    }

    /// A, B and C bound pointwise values through Hölder's inequality and need `p > 1`.
    pub fn needs_holder_exponent(&self) -> bool {
        matches!(self, Self::A | Self::B | Self::C)
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A constant together with its cross-checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantValue {
    pub kind: ConstantKind,
    pub alpha: f64,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub value: f64,
    pub is_supremum: bool,
    /// The same quantity evaluated by a second route, when one exists.
    pub alternate: Option<f64>,
    /// Largest r-form value over `R_GRID` (supremum constants only).
    pub grid_sup: Option<f64>,
    pub diagnostics: Vec<(String, f64)>,
}

impl ConstantValue {
    /// `|value - alternate|`, when an alternate route exists.
    pub fn gap(&self) -> Option<f64> {
        self.alternate.map(|a| (a - self.value).abs())
    }
}

/// Radii on which supremum constants are compared with their r-forms.
pub const R_GRID: [f64; 13] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999];

fn hyp(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    Ok(specfun::hyp2f1(&HypArgs::new(a, b, c, x)?, HYP_TOL)?)
}

/// `|1 + r e^{-is}|²` without cancellation near `s = π`.
#[inline]
fn mod_sq(r: f64, s: f64) -> f64 {
    let c = (0.5 * s).cos();
    (1.0 - r) * (1.0 - r) + 4.0 * r * c * c
}

/// `(1/2π)∫_0^{2π} g(s) ds` with panels at `breaks` (and at `π`, where the
/// `|1 + r e^{-is}|` factors are sharpest).
fn circle_mean(r: f64, breaks: &[f64], spec: &QuadratureSpec, g: impl Fn(f64) -> f64) -> Result<f64> {
    let mut b = breaks.to_vec();
    b.push(PI);
    let layout = Layout::from_breakpoints(&b);
    Ok(quad::mean_adaptive(&layout, spec.nodes_for_radius(r.min(0.999_999)), spec, |s| [g(s)])?.value[0])
}

fn holder(p: &LebesgueExponent, kind: ConstantKind) -> Result<f64> {
    if p.p() <= 1.0 {
        return Err(Error::Unsupported(format!(
            "constant {kind} needs p > 1 (the conjugate exponent is infinite at p = 1)"
        )));
    }
    Ok(p.q())
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius must lie in [0, 1), got {r}")));
    }
    Ok(())
}

/// `G(r, θ) = ∫_{-π}^{π} |cos(t-θ)|^k (1 + r² + 2r cos t)^m dt` for `r ∈ [0, 1]`.
/// Returns `+∞` when the integral diverges (only possible at `r = 1`).
pub fn g_lemma(r: f64, theta: f64, k: f64, m: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || !(k >= 0.0) || !(m > -1.0) {
        return Err(Error::Domain(format!(
            "g_lemma needs r in [0,1], k >= 0, m > -1; got r={r}, k={k}, m={m}"
        )));
    }
    if r == 1.0 {
        // near t = π the integrand behaves like |cos(π-θ)|^k |t-π|^{2m}
        let vanishing = (PI - theta).cos().abs() < 1e-12;
        let order = 2.0 * m + if vanishing { k } else { 0.0 };
        if order <= -1.0 {
            return Ok(f64::INFINITY);
        }
    }
    // t = π ± x puts the only possible singularity at x = 0
    let mut breaks = vec![];
    for base in [theta + FRAC_PI_2 - PI, theta - FRAC_PI_2 - PI] {
        let x = base.rem_euclid(TAU);
        for y in [x, TAU - x] {
            if y > 1e-12 && y < PI - 1e-12 {
                breaks.push(y);
            }
        }
    }
    // expand cos(π ± x - θ) so that a zero of the weight at x = 0 survives
    // rounding; π/2 itself is not representable
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let (st, ct) = (snap(theta.sin()), snap(theta.cos()));
    let v = quad::integrate_interval(0.0, PI, &breaks, spec, |x| {
        let s = (0.5 * x).sin();
        let w = ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s).powf(m);
        let (sx, cx) = x.sin_cos();
        let c1 = (cx * ct + sx * st).abs().powf(k);
        let c2 = (cx * ct - sx * st).abs().powf(k);
        (c1 + c2) * w
    })?;
    Ok(v)
}

/// The bound `G(1, 0)` for `m > 1` and `G(1, π/2)` otherwise. The second
/// uses the Beta form: for `k + 2m` near `-1` the endpoint singularity is
/// too strong for the truncated tanh-sinh range.
pub fn g_sup_bound(k: f64, m: f64, spec: &QuadratureSpec) -> Result<f64> {
    if m > 1.0 {
        g_lemma(1.0, 0.0, k, m, spec)
    } else if k + 2.0 * m <= -1.0 {
        Ok(f64::INFINITY)
    } else {
        g_one_half_pi_closed(k, m)
    }
}

/// `G(1, π/2) = 2^{k+2m+1} B((k+1)/2, (k+2m+1)/2)`, finite when `k + 2m > -1`.
pub fn g_one_half_pi_closed(k: f64, m: f64) -> Result<f64> {
    let e = k + 2.0 * m + 1.0;
    Ok(2f64.powf(e) * specfun::beta((k + 1.0) / 2.0, e / 2.0)?)
}

/// Both sides of `∫_0^π sin^{μ-1}t (1+r²-2r cos t)^{-ν} dt = B(μ/2,1/2) F(ν, ν+(1-μ)/2; (1+μ)/2; r²)`.
pub fn lemma24_check(mu: f64, nu: f64, r: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    check_r(r)?;
    // fold onto [0, π/2] so both endpoint singularities of sin^{μ-1} sit at 0
    let lhs = quad::integrate_interval(0.0, FRAC_PI_2, &[], spec, |t| {
        let (s, c) = ((0.5 * t).sin(), (0.5 * t).cos());
        let near = (1.0 - r) * (1.0 - r) + 4.0 * r * s * s;
        let far = (1.0 - r) * (1.0 - r) + 4.0 * r * c * c;
        t.sin().powf(mu - 1.0) * (near.powf(-nu) + far.powf(-nu))
    })?;
    let rhs = specfun::beta(mu / 2.0, 0.5)? * hyp(nu, nu + (1.0 - mu) / 2.0, (1.0 + mu) / 2.0, r * r)?;
    Ok((lhs, rhs))
}

/// Both sides of `∫_0^π sin^{μ-1}t (1-cos t)^{-ν} dt = 2^ν B(μ/2,1/2) F(ν, ν+(1-μ)/2; (1+μ)/2; 1)`,
/// valid for `μ - 2ν > 0`.
pub fn lemma24_check_at_one(mu: f64, nu: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(mu > 0.0) || !(mu - 2.0 * nu > 0.0) {
        return Err(Error::Domain(format!(
            "need mu > 0 and mu - 2 nu > 0, got mu={mu}, nu={nu}"
        )));
    }
    let lhs = quad::integrate_interval(0.0, FRAC_PI_2, &[], spec, |t| {
        // sin t = 2 s c, merged into single powers so nothing overflows near 0
        let (s, c) = ((0.5 * t).sin(), (0.5 * t).cos());
        2f64.powf(mu - 1.0 - nu)
            * (s.powf(mu - 1.0 - 2.0 * nu) * c.powf(mu - 1.0) + s.powf(mu - 1.0) * c.powf(mu - 1.0 - 2.0 * nu))
    })?;
    let rhs = 2f64.powf(nu)
        * specfun::beta(mu / 2.0, 0.5)?
        * specfun::hyp2f1_limit_at_1(nu, nu + (1.0 - mu) / 2.0, (1.0 + mu) / 2.0)?;
    Ok((lhs, rhs))
}

fn grid_sup(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut best = 0.0f64;
    for &r in &R_GRID {
        best = best.max(f(r)?);
    }
    Ok(best)
}

fn value(kind: ConstantKind, alpha: &AlphaParam, p: Option<&LebesgueExponent>, r: Option<f64>, v: f64) -> ConstantValue {
    ConstantValue {
        kind,
        alpha: alpha.alpha(),
        p: p.map(|x| x.p()),
        r,
        value: v,
        is_supremum: r.is_none(),
        alternate: None,
        grid_sup: None,
        diagnostics: vec![],
    }
}

// ---------------------------------------------------------------- A

fn a_r(alpha: &AlphaParam, q: f64, r: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    let m = ((2.0 + a) * q - 2.0) / 2.0;
    let i11 = g_lemma(r, 0.0, q, m, spec)?;
    let i12 = TAU * hyp(-m, -m, 1.0, r * r)?;
    let i12_quad = TAU * circle_mean(r, &[], spec, |s| mod_sq(r, s).powf(m))?;
    let lead = (a + 2.0).powf(q) / TAU;
    let cross = q * (a.abs() * r + a + 2.0).powf(q - 1.0) * a.abs() * r / TAU;
    Ok((
        c * (lead * i11 + cross * i12).powf(1.0 / q),
        c * (lead * i11 + cross * i12_quad).powf(1.0 / q),
    ))
}

/// `Ã_{α,p}(r) = c ((1/2π)∫|αr - (α+2)cos s|^q |1+re^{-is}|^{(2+α)q-2} ds)^{1/q}`.
pub fn a_tilde(alpha: &AlphaParam, p: &LebesgueExponent, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    let q = holder(p, ConstantKind::A)?;
    check_r(r)?;
    let a = alpha.alpha();
    let e = ((2.0 + a) * q - 2.0) / 2.0;
    // zeros of αr - (α+2)cos s
    let cz = a * r / (a + 2.0);
    let mut breaks = vec![];
    if cz.abs() <= 1.0 {
        let s0 = cz.acos();
        breaks.extend([s0, TAU - s0]);
    }
    let v = circle_mean(r, &breaks, spec, |s| {
        (a * r - (a + 2.0) * s.cos()).abs().powf(q) * mod_sq(r, s).powf(e)
    })?;
    Ok(alpha.c_alpha() * v.powf(1.0 / q))
}

/// `A_{α,p}(r)`, or the supremum `A_{α,p}` when `r` is `None`.
pub fn constant_a(alpha: &AlphaParam, p: &LebesgueExponent, r: Option<f64>, spec: &QuadratureSpec) -> Result<ConstantValue> {
    let q = holder(p, ConstantKind::A)?;
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    match r {
        Some(r) => {
            check_r(r)?;
            let (v, alt) = a_r(alpha, q, r, spec)?;
            let mut out = value(ConstantKind::A, alpha, Some(p), Some(r), v);
            out.alternate = Some(alt);
            out.diagnostics.push(("tilde".into(), a_tilde(alpha, p, r, spec)?));
            Ok(out)
        }
        None => {
            let m = ((2.0 + a) * q - 2.0) / 2.0;
            // quadrature here; the Beta form is reported as the alternate
            let g1 = g_lemma(1.0, if m > 1.0 { 0.0 } else { FRAC_PI_2 }, q, m, spec)?;
            let tail = q * (a.abs() + a + 2.0).powf(q - 1.0) * a.abs()
                * specfun::gamma_ratio((a + 2.0) * q - 1.0, 1.0, (a + 2.0) * q / 2.0, (a + 2.0) * q / 2.0)?;
            let lead = (a + 2.0).powf(q) / TAU;
            let v = c * (lead * g1 + tail).powf(1.0 / q);
            let mut out = value(ConstantKind::A, alpha, Some(p), None, v);
            if m <= 1.0 {
                let g_closed = g_one_half_pi_closed(q, m)?;
                out.alternate = Some(c * (lead * g_closed + tail).powf(1.0 / q));
            }
            out.diagnostics.push(("G1".into(), g1));
            out.grid_sup = Some(grid_sup(|r| Ok(a_r(alpha, q, r, spec)?.0))?);
            Ok(out)
        }
    }
}

/// Limit of the normalized extremal ratio for `α = 0`:
/// `4^{1/p} π^{-1/q} (∫_0^{2π} |cos s|^q (1+cos s)^{q-1} ds)^{1/q}`.
pub fn a_sharp_alpha_zero(p: &LebesgueExponent, spec: &QuadratureSpec) -> Result<f64> {
    let q = holder(p, ConstantKind::A)?;
    let v = circle_mean(0.0, &[FRAC_PI_2, 3.0 * FRAC_PI_2], spec, |s| {
        let c = s.cos();
        c.abs().powf(q) * (1.0 + c).max(0.0).powf(q - 1.0)
    })?;
    Ok(4f64.powf(1.0 / p.p()) * PI.powf(-1.0 / q) * (TAU * v).powf(1.0 / q))
}

// ---------------------------------------------------------------- B

fn b_parts(a: f64, q: f64) -> (f64, f64, f64) {
    (1.0 - (a + 3.0) * q / 2.0, 1.0 - (a + 2.0) * q / 2.0, 1.0 + q / 2.0)
}

fn b_r(alpha: &AlphaParam, q: f64, r: f64) -> Result<f64> {
    let a = alpha.alpha();
    let (ha, hb, hc) = b_parts(a, q);
    let inner = specfun::beta((q + 1.0) / 2.0, 0.5)? * hyp(ha, hb, hc, r * r)?;
    Ok((a + 2.0) * alpha.c_alpha() * r * PI.powf(-1.0 / q) * inner.powf(1.0 / q))
}

/// `B_{α,p}(r)`, or the supremum `B_{α,p}` (requires `α + 2/p >= 0`).
pub fn constant_b(alpha: &AlphaParam, p: &LebesgueExponent, r: Option<f64>, spec: &QuadratureSpec) -> Result<ConstantValue> {
    let q = holder(p, ConstantKind::B)?;
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    match r {
        Some(r) => {
            check_r(r)?;
            let v = b_r(alpha, q, r)?;
            let mut out = value(ConstantKind::B, alpha, Some(p), Some(r), v);
            let e = (2.0 + a / 2.0) * q;
            let i2 = quad::integrate_interval(0.0, PI, &[], spec, |t| {
                let s = (0.5 * t).sin();
                t.sin().powf(q) * ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s).powf(-e)
            })? / PI;
            let one_minus = (1.0 - r) * (1.0 + r);
            out.alternate =
                Some((a + 2.0) * c * r * one_minus.powf(a + 2.0 + 1.0 / p.p()) * i2.powf(1.0 / q));
            Ok(out)
        }
        None => {
            if a + 2.0 / p.p() < 0.0 {
                return Err(Error::Unsupported(format!(
                    "the supremum B needs alpha + 2/p >= 0, got {}",
                    a + 2.0 / p.p()
                )));
            }
            let (ha, hb, hc) = b_parts(a, q);
            let inner = specfun::beta((q + 1.0) / 2.0, 0.5)? * specfun::hyp2f1_limit_at_1(ha, hb, hc)?;
            let v = (a + 2.0) * c * PI.powf(-1.0 / q) * inner.powf(1.0 / q);
            let mut out = value(ConstantKind::B, alpha, Some(p), None, v);
            out.grid_sup = Some(grid_sup(|r| b_r(alpha, q, r))?);
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------- C

fn c_r(alpha: &AlphaParam, q: f64, r: f64) -> Result<f64> {
    let a = alpha.alpha();
    let h = 1.0 - (a + 2.0) * q / 2.0;
    Ok(alpha.c_alpha() * (a.abs() * r / 2.0 + 1.0 + a / 2.0) * hyp(h, h, 1.0, r * r)?.powf(1.0 / q))
}

/// `C_{α,p}(r)`, or the supremum `C_{α,p}`.
pub fn constant_c(alpha: &AlphaParam, p: &LebesgueExponent, r: Option<f64>, spec: &QuadratureSpec) -> Result<ConstantValue> {
    let q = holder(p, ConstantKind::C)?;
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    match r {
        Some(r) => {
            check_r(r)?;
            let v = c_r(alpha, q, r)?;
            let mut out = value(ConstantKind::C, alpha, Some(p), Some(r), v);
            let e = ((a + 2.0) * q - 2.0) / 2.0;
            let m = circle_mean(r, &[], spec, |s| mod_sq(r, s).powf(e))?;
            out.alternate = Some(c * (a.abs() * r / 2.0 + 1.0 + a / 2.0) * m.powf(1.0 / q));
            Ok(out)
        }
        None => {
            let g = (a + 2.0) * q;
            let ratio = specfun::gamma_ratio(g - 1.0, 1.0, g / 2.0, g / 2.0)?;
            let v = c * (a.abs() / 2.0 + 1.0 + a / 2.0) * ratio.powf(1.0 / q);
            let mut out = value(ConstantKind::C, alpha, Some(p), None, v);
            let h = 1.0 - g / 2.0;
            out.alternate = Some(
                c * (a.abs() / 2.0 + 1.0 + a / 2.0) * specfun::hyp2f1_limit_at_1(h, h, 1.0)?.powf(1.0 / q),
            );
            out.grid_sup = Some(grid_sup(|r| c_r(alpha, q, r))?);
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------- D

fn d_r(alpha: &AlphaParam, r: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    let first = circle_mean(r, &[FRAC_PI_2, 3.0 * FRAC_PI_2], spec, |s| {
        s.cos().abs() * mod_sq(r, s).powf(a / 2.0)
    })?;
    let second = hyp(-a / 2.0, -a / 2.0, 1.0, r * r)?;
    let second_quad = circle_mean(r, &[], spec, |s| mod_sq(r, s).powf(a / 2.0))?;
    Ok((
        c * ((a + 2.0) * first + a.abs() * r * second),
        c * ((a + 2.0) * first + a.abs() * r * second_quad),
    ))
}

/// `D̃_α(r) = c (1/2π)∫|αr - (α+2)cos s| |1+re^{-is}|^α ds`.
pub fn d_tilde(alpha: &AlphaParam, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_r(r)?;
    let a = alpha.alpha();
    let cz = a * r / (a + 2.0);
    let mut breaks = vec![];
    if cz.abs() <= 1.0 {
        let s0 = cz.acos();
        breaks.extend([s0, TAU - s0]);
    }
    let v = circle_mean(r, &breaks, spec, |s| {
        (a * r - (a + 2.0) * s.cos()).abs() * mod_sq(r, s).powf(a / 2.0)
    })?;
    Ok(alpha.c_alpha() * v)
}

/// `D_α(r)`, or the supremum `D_α`.
pub fn constant_d(alpha: &AlphaParam, r: Option<f64>, spec: &QuadratureSpec) -> Result<ConstantValue> {
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    match r {
        Some(r) => {
            check_r(r)?;
            let (v, alt) = d_r(alpha, r, spec)?;
            let mut out = value(ConstantKind::D, alpha, None, Some(r), v);
            out.alternate = Some(alt);
            out.diagnostics.push(("tilde".into(), d_tilde(alpha, r, spec)?));
            Ok(out)
        }
        None => {
            let use_cos = a > 2.0;
            // s = π ± x; 1 + cos s = 2 sin²(x/2) vanishes only at x = 0
            let j = 2.0
                * quad::integrate_interval(0.0, PI, &[FRAC_PI_2], spec, |x| {
                    let trig = if use_cos { x.cos() } else { x.sin() };
                    let h = (0.5 * x).sin();
                    trig.abs() * (2.0 * h * h).powf(a / 2.0)
                })?;
            let gam = specfun::gamma_ratio(a + 1.0, 1.0, a / 2.0 + 1.0, a / 2.0 + 1.0)?;
            let lead = (a + 2.0) / PI * 2f64.powf(a / 2.0 - 1.0);
            let v = c * (lead * j + a.abs() * gam);
            let mut out = value(ConstantKind::D, alpha, None, None, v);
            if !use_cos {
                // ∫|sin s|(1+cos s)^{α/2} ds = 2^{α/2+2}/(α/2+1)
                let j_closed = 2f64.powf(a / 2.0 + 2.0) / (a / 2.0 + 1.0);
                out.alternate = Some(c * (lead * j_closed + a.abs() * gam));
            }
            out.grid_sup = Some(grid_sup(|r| Ok(d_r(alpha, r, spec)?.0))?);
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------- E

fn e_r(alpha: &AlphaParam, r: f64) -> f64 {
    let a = alpha.alpha();
    alpha.c_alpha() / PI * ((1.0 + r).powf(a + 2.0) - (1.0 - r).powf(a + 2.0))
}

/// `E_α(r)`, or the supremum `E_α = c 2^{α+2}/π`.
pub fn constant_e(alpha: &AlphaParam, r: Option<f64>, spec: &QuadratureSpec) -> Result<ConstantValue> {
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    match r {
        Some(r) => {
            check_r(r)?;
            let mut out = value(ConstantKind::E, alpha, None, Some(r), e_r(alpha, r));
            let i5 = circle_mean(r, &[0.0], spec, |t| {
                let s = (0.5 * t).sin();
                r * t.sin().abs() * ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s).powf(-(2.0 + a / 2.0))
            })? * TAU;
            let one_minus = (1.0 - r) * (1.0 + r);
            out.alternate = Some((a + 2.0) * c / TAU * one_minus.powf(a + 2.0) * i5);
            Ok(out)
        }
        None => {
            let mut out = value(ConstantKind::E, alpha, None, None, c * 2f64.powf(a + 2.0) / PI);
            out.grid_sup = Some(grid_sup(|r| Ok(e_r(alpha, r)))?);
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------- F

fn f_r(alpha: &AlphaParam, r: f64) -> Result<f64> {
    let a = alpha.alpha();
    Ok(alpha.c_alpha() * (a.abs() * r / 2.0 + 1.0 + a / 2.0) * hyp(-a / 2.0, -a / 2.0, 1.0, r * r)?)
}

/// `F̃_α(r) = c (1/2π)∫|-αr/2 + (1+α/2)e^{-is}| |1+re^{-is}|^α ds`.
pub fn f_tilde(alpha: &AlphaParam, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_r(r)?;
    let a = alpha.alpha();
    let v = circle_mean(r, &[], spec, |s| {
        let w = num_complex::Complex64::new(-a * r / 2.0, 0.0) + (1.0 + a / 2.0) * num_complex::Complex64::from_polar(1.0, -s);
        w.norm() * mod_sq(r, s).powf(a / 2.0)
    })?;
    Ok(alpha.c_alpha() * v)
}

/// `F_α(r)`, or the supremum `F_α`.
pub fn constant_f(alpha: &AlphaParam, r: Option<f64>, spec: &QuadratureSpec) -> Result<ConstantValue> {
    let a = alpha.alpha();
    let c = alpha.c_alpha();
    match r {
        Some(r) => {
            check_r(r)?;
            let mut out = value(ConstantKind::F, alpha, None, Some(r), f_r(alpha, r)?);
            let m = circle_mean(r, &[], spec, |s| mod_sq(r, s).powf(a / 2.0))?;
            out.alternate = Some(c * (a.abs() * r / 2.0 + 1.0 + a / 2.0) * m);
            out.diagnostics.push(("tilde".into(), f_tilde(alpha, r, spec)?));
            Ok(out)
        }
        None => {
            let gam = specfun::gamma_ratio(a + 1.0, 1.0, a / 2.0 + 1.0, a / 2.0 + 1.0)?;
            let v = c * (a.abs() / 2.0 + 1.0 + a / 2.0) * gam;
            let mut out = value(ConstantKind::F, alpha, None, None, v);
            out.alternate =
                Some(c * (a.abs() / 2.0 + 1.0 + a / 2.0) * specfun::hyp2f1_limit_at_1(-a / 2.0, -a / 2.0, 1.0)?);
            out.grid_sup = Some(grid_sup(|r| f_r(alpha, r))?);
            Ok(out)
        }
    }
}

/// Dispatch by kind; `p` is required for A, B and C and ignored otherwise.
pub fn constant(
    kind: ConstantKind,
    alpha: &AlphaParam,
    p: Option<&LebesgueExponent>,
    r: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<ConstantValue> {
    let need_p = || {
        p.ok_or_else(|| Error::Unsupported(format!("constant {kind} needs an exponent p")))
    };
    match kind {
        ConstantKind::A => constant_a(alpha, need_p()?, r, spec),
        ConstantKind::B => constant_b(alpha, need_p()?, r, spec),
        ConstantKind::C => constant_c(alpha, need_p()?, r, spec),
        ConstantKind::D => constant_d(alpha, r, spec),
        ConstantKind::E => constant_e(alpha, r, spec),
        ConstantKind::F => constant_f(alpha, r, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{AlphaParam, DiskPoint};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }
    fn al(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }
    fn lp(p: f64) -> LebesgueExponent {
        LebesgueExponent::new(p).unwrap()
    }

    /// Independent oracle: the exact Hölder constant of a derivative kernel,
    /// `(1-r²)^{w} ‖k(·)‖_{L^q}` with the kernel written directly in `t`.
    fn kernel_norm(alpha: f64, r: f64, q: f64, which: usize) -> f64 {
        let a = AlphaParam::new(alpha).unwrap();
        let c = a.c_alpha();
        let om = 1.0 - r * r;
        let z = Complex64::new(r, 0.0);
        let n = 1 << 16;
        let mut acc = 0.0;
        for j in 0..n {
            let t = TAU * (j as f64 + 0.5) / n as f64;
            let d = 1.0 + r * r - 2.0 * r * t.cos();
            let e = d.powf(-(alpha + 4.0) / 2.0);
            let p0 = c * om.powf(alpha);
            let k = match which {
                0 => (-p0 * (2.0 * (alpha + 1.0) * r * d + (alpha + 2.0) * om * (r - t.cos())) * e).abs(),
                1 => ((alpha + 2.0) * c * r * om.powf(alpha + 1.0) * t.sin() * e).abs(),
                _ => (p0 * (-(alpha + 1.0) * z * d + (1.0 + alpha / 2.0) * om * (Complex64::from_polar(1.0, -t) - z)) * e).norm(),
            };
            acc += k.powf(q);
        }
        (acc / n as f64).powf(1.0 / q)
    }

    #[test]
    fn g_lemma_examples() {
        for (r, th) in [(0.0, 0.0), (0.5, 1.0), (1.0, 2.0)] {
            assert_relative_eq!(g_lemma(r, th, 0.0, 0.0, &spec()).unwrap(), TAU, max_relative = 1e-12);
        }
        assert_relative_eq!(g_lemma(0.3, 0.0, 1.0, 0.0, &spec()).unwrap(), 4.0, max_relative = 1e-12);
        let g = g_lemma(0.5, 0.3, 2.0, 1.5, &spec()).unwrap();
        assert!(g <= g_lemma(1.0, 0.0, 2.0, 1.5, &spec()).unwrap() + 1e-9);
        assert_eq!(g_lemma(1.0, 0.0, 1.0, -0.6, &spec()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn g_one_half_pi_closed_form() {
        for (k, m) in [(2.0, 1.0), (1.5, 0.3), (4.0, -0.2), (0.5, 0.9)] {
            let quad = g_lemma(1.0, FRAC_PI_2, k, m, &spec()).unwrap();
            assert_relative_eq!(quad, g_one_half_pi_closed(k, m).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn g_at_half_pi_keeps_the_vanishing_weight() {
        // 2m < -1 alone is not integrable; the |sin t|^k zero at t = π rescues it
        let quad = g_lemma(1.0, FRAC_PI_2, 1.0, -0.6, &spec()).unwrap();
        assert_relative_eq!(quad, g_one_half_pi_closed(1.0, -0.6).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn lemma24_examples() {
        let (l, r) = lemma24_check(1.0, 1.0, 0.0, &spec()).unwrap();
        assert_relative_eq!(l, PI, max_relative = 1e-10);
        assert_relative_eq!(r, PI, max_relative = 1e-14);
        let (l, r) = lemma24_check(2.0, 0.0, 0.6, &spec()).unwrap();
        assert_relative_eq!(l, 2.0, max_relative = 1e-10);
        assert_relative_eq!(r, 2.0, max_relative = 1e-14);
        let (l, r) = lemma24_check_at_one(2.0, -0.5, &spec()).unwrap();
        assert!((l - r).abs() <= 1e-7 * (1.0 + r.abs()));
    }

    #[test]
    fn constant_a_examples() {
        let a0 = al(0.0);
        let sup = constant_a(&a0, &lp(2.0), None, &spec()).unwrap();
        assert_relative_eq!(sup.value, 2.0, max_relative = 1e-9);
        assert_relative_eq!(a_sharp_alpha_zero(&lp(2.0), &spec()).unwrap(), 2.0, max_relative = 1e-10);
        // (1/2π)∫cos²s |1+0.5e^{-is}|² ds = 1.25/2 + 0 = 0.625
        let v = constant_a(&a0, &lp(2.0), Some(0.5), &spec()).unwrap();
        assert_relative_eq!(v.value, 2.0 * 0.625f64.sqrt(), max_relative = 1e-10);
        assert!(constant_a(&a0, &lp(1.0), None, &spec()).is_err());
    }

    #[test]
    fn constant_b_examples() {
        let a0 = al(0.0);
        for p in [1.5, 2.0, 4.0] {
            assert_eq!(constant_b(&a0, &lp(p), Some(0.0), &spec()).unwrap().value, 0.0);
        }
        // F(-2,-1;2;1) terminates: 1 + (-2)(-1)/2 = 2
        let b = constant_b(&a0, &lp(2.0), None, &spec()).unwrap();
        let oracle = 2.0 / PI.sqrt() * (specfun::beta(1.5, 0.5).unwrap() * 2.0).sqrt();
        assert_relative_eq!(b.value, oracle, max_relative = 1e-12);
        assert_relative_eq!(b.value, 2.0, max_relative = 1e-12);
        assert!(constant_b(&al(-0.9), &lp(4.0), None, &spec()).is_err());
        assert!(constant_b(&al(-0.9), &lp(2.0), Some(0.5), &spec()).is_ok());
    }

    #[test]
    fn constant_c_examples() {
        let a0 = al(0.0);
        let c = constant_c(&a0, &lp(2.0), None, &spec()).unwrap();
        assert_relative_eq!(c.value, 2f64.sqrt(), max_relative = 1e-13);
        for p in [1.5, 3.0] {
            assert_relative_eq!(constant_c(&a0, &lp(p), Some(0.0), &spec()).unwrap().value, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn constant_d_examples() {
        let a0 = al(0.0);
        assert_relative_eq!(constant_d(&a0, None, &spec()).unwrap().value, 4.0 / PI, max_relative = 1e-10);
        for r in [0.0, 0.4, 0.9] {
            assert_relative_eq!(constant_d(&a0, Some(r), &spec()).unwrap().value, 4.0 / PI, max_relative = 1e-10);
        }
        // α = 2, r = 0: c_2 · 4 · (1/2π)∫|cos s| ds = 0.5 · 4 · 2/π
        let d = constant_d(&al(2.0), Some(0.0), &spec()).unwrap();
        assert_relative_eq!(d.value, 4.0 / PI, max_relative = 1e-10);
    }

    #[test]
    fn constant_e_examples() {
        let a0 = al(0.0);
        for r in [0.0, 0.3, 0.8] {
            let e = constant_e(&a0, Some(r), &spec()).unwrap();
            assert_relative_eq!(e.value, 4.0 * r / PI, max_relative = 1e-13, epsilon = 1e-15);
            assert!(e.gap().unwrap() < 1e-8);
        }
        assert_relative_eq!(constant_e(&a0, None, &spec()).unwrap().value, 4.0 / PI, max_relative = 1e-14);
        assert_eq!(constant_e(&al(3.0), Some(0.0), &spec()).unwrap().value, 0.0);
    }

    #[test]
    fn constant_f_examples() {
        let a0 = al(0.0);
        assert_relative_eq!(constant_f(&a0, None, &spec()).unwrap().value, 1.0, max_relative = 1e-14);
        for r in [0.2, 0.95] {
            assert_relative_eq!(constant_f(&a0, Some(r), &spec()).unwrap().value, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn two_routes_agree() {
        for a in [-0.5, 0.0, 1.0, 2.5] {
            for r in [0.1, 0.5, 0.9] {
                for p in [1.5, 2.0, 4.0] {
                    for kind in [ConstantKind::A, ConstantKind::B, ConstantKind::C] {
                        let v = constant(kind, &al(a), Some(&lp(p)), Some(r), &spec()).unwrap();
                        assert!(v.gap().unwrap() <= 1e-8 * v.value.max(1.0), "{kind} a={a} r={r} p={p}: {v:?}");
                    }
                }
                for kind in [ConstantKind::D, ConstantKind::E, ConstantKind::F] {
                    let v = constant(kind, &al(a), None, Some(r), &spec()).unwrap();
                    assert!(v.gap().unwrap() <= 1e-8 * v.value.max(1.0), "{kind} a={a} r={r}: {v:?}");
                }
            }
        }
    }

    #[test]
    fn sup_alternates_agree() {
        for a in [-0.5, 0.0, 1.0, 2.0] {
            let d = constant_d(&al(a), None, &spec()).unwrap();
            assert!(d.gap().unwrap() < 1e-9, "{d:?}");
            let f = constant_f(&al(a), None, &spec()).unwrap();
            assert!(f.gap().unwrap() < 1e-12);
            for p in [1.5, 2.0, 4.0] {
                let c = constant_c(&al(a), &lp(p), None, &spec()).unwrap();
                assert!(c.gap().unwrap() < 1e-10);
                let av = constant_a(&al(a), &lp(p), None, &spec()).unwrap();
                if let Some(g) = av.gap() {
                    assert!(g < 1e-8 * av.value, "{av:?}");
                }
            }
        }
    }

    #[test]
    fn tilde_forms_are_exact_kernel_norms() {
        for a in [-0.5, 0.0, 1.5] {
            for r in [0.2, 0.6] {
                for p in [1.5, 3.0] {
                    let q = lp(p).q();
                    let w = (1.0f64 - r * r).powf(1.0 + 1.0 / p);
                    let at = a_tilde(&al(a), &lp(p), r, &spec()).unwrap();
                    assert_relative_eq!(at, w * kernel_norm(a, r, q, 0), max_relative = 1e-7);
                }
                let w = 1.0 - r * r;
                let dt = d_tilde(&al(a), r, &spec()).unwrap();
                assert_relative_eq!(dt, w * kernel_norm(a, r, 1.0, 0), max_relative = 1e-7);
                let ft = f_tilde(&al(a), r, &spec()).unwrap();
                assert_relative_eq!(ft, w * kernel_norm(a, r, 1.0, 2), max_relative = 1e-7);
                let e = constant_e(&al(a), Some(r), &spec()).unwrap();
                assert_relative_eq!(e.value, w * kernel_norm(a, r, 1.0, 1), max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn r_forms_dominate_exact_holder_constants() {
        for a in [-0.5, 0.0, 1.0, 2.0] {
            for r in [0.2, 0.5, 0.8] {
                for p in [1.5, 2.0, 4.0] {
                    let q = lp(p).q();
                    let w = (1.0f64 - r * r).powf(1.0 + 1.0 / p);
                    let s = spec();
                    let av = constant_a(&al(a), &lp(p), Some(r), &s).unwrap().value;
                    let bv = constant_b(&al(a), &lp(p), Some(r), &s).unwrap().value;
                    let cv = constant_c(&al(a), &lp(p), Some(r), &s).unwrap().value;
                    assert!(w * kernel_norm(a, r, q, 0) <= av * (1.0 + 1e-7));
                    assert_relative_eq!(w * kernel_norm(a, r, q, 1), bv, max_relative = 1e-7);
                    assert!(w * kernel_norm(a, r, q, 2) <= cv * (1.0 + 1e-7));
                }
                let w = 1.0 - r * r;
                let s = spec();
                let dv = constant_d(&al(a), Some(r), &s).unwrap();
                assert!(w * kernel_norm(a, r, 1.0, 0) <= dv.value * (1.0 + 1e-7), "{} {dv:?}", w * kernel_norm(a, r, 1.0, 0));
                assert!(w * kernel_norm(a, r, 1.0, 2) <= constant_f(&al(a), Some(r), &s).unwrap().value * (1.0 + 1e-7));
            }
        }
    }

    #[test]
    fn suprema_dominate_where_the_lemma_applies() {
        let s = spec();
        for a in [0.0, 0.5, 1.0, 2.0, 3.0] {
            for kind in [ConstantKind::D, ConstantKind::E, ConstantKind::F] {
                let v = constant(kind, &al(a), None, None, &s).unwrap();
                assert!(v.value >= v.grid_sup.unwrap() - 1e-9, "{v:?}");
            }
            for p in [1.5, 2.0, 4.0] {
                for kind in [ConstantKind::A, ConstantKind::B, ConstantKind::C] {
                    let v = constant(kind, &al(a), Some(&lp(p)), None, &s).unwrap();
                    assert!(v.value >= v.grid_sup.unwrap() - 1e-9, "{v:?}");
                }
            }
        }
    }

    #[test]
    fn d_supremum_falls_short_for_negative_alpha() {
        // the G(r, θ) bound fails for m < 0, and with it the closed-form D_α
        let v = constant_d(&al(-0.5), None, &spec()).unwrap();
        assert!(v.grid_sup.unwrap() > v.value + 0.1, "{v:?}");
    }

    #[test]
    fn e_strictly_increasing() {
        let a = al(1.2);
        let v: Vec<f64> = R_GRID.iter().map(|&r| e_r(&a, r)).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let sup = constant_e(&a, None, &spec()).unwrap().value;
        assert!((e_r(&a, 0.999_999) - sup).abs() < 1e-4);
    }

    #[test]
    fn disk_point_sanity() {
        // keeps DiskPoint in scope for the kernel oracle signature
        assert!(DiskPoint::new(0.5, 0.0).is_ok());
    }
}
