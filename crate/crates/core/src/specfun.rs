//! Real special functions: Gamma, Beta, Pochhammer symbols and the Gauss
//! hypergeometric function `F(a, b; c; x)` on `0 <= x < 1`, together with its
//! Gauss limit at `x = 1` and its derivative.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;

use thiserror::Error;

use crate::sum::CompensatedSum;

/// Default relative tolerance for hypergeometric series.
pub const HYP_TOL: f64 = 1e-15;

/// Term cap for the direct series.
pub const SERIES_TERM_CAP: usize = 100_000;

/// Term cap used for `x > 0.75` when the Euler transformation would not
/// improve the parameter excess `c - a - b`.
pub const NEAR_ONE_TERM_CAP: usize = 10_000_000;

/// Switch point between the direct series and the Euler-transformed one.
const EULER_SWITCH: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("pole of the Gamma function at x = {x}")]
    Pole { x: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("hypergeometric series did not converge after {terms} terms (partial sum {partial_sum})")]
    NoConvergence { partial_sum: f64, terms: usize },
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_series(xm1: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (xm1 + i as f64);
    }
    acc
}

/// Gamma function for real arguments that are not poles.
pub fn gamma(x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::Domain(format!("gamma of non-finite argument {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(SpecFunError::Pole { x });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    // exact factorials for small positive integers
    if x >= 1.0 && x <= 23.0 && x.fract() == 0.0 {
        return (2..x as u32).fold(1.0, |acc, k| acc * f64::from(k));
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    // Split the power so that t^(x-1/2) does not overflow before e^-t is applied.
    let half = t.powf(0.5 * (xm1 + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_series(xm1)
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma(x: f64) -> Result<(f64, f64), SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::Domain(format!("ln_gamma of non-finite argument {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(SpecFunError::Pole { x });
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        let (lg, sg) = ln_gamma(1.0 - x)?;
        return Ok(((PI / s.abs()).ln() - lg, s.signum() * sg));
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    let lg = 0.5 * (2.0 * PI).ln() + (xm1 + 0.5) * t.ln() - t + lanczos_series(xm1).ln();
    Ok((lg, 1.0))
}

/// `1/Γ(x)`, which is zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

/// Beta function `B(u, v) = Γ(u)Γ(v)/Γ(u+v)` for `u, v > 0`.
pub fn beta(u: f64, v: f64) -> Result<f64, SpecFunError> {
    if !(u > 0.0 && v > 0.0) {
        return Err(SpecFunError::Domain(format!(
            "beta requires positive arguments, got ({u}, {v})"
        )));
    }
    if u + v < 160.0 {
        Ok(gamma_unchecked(u) * gamma_unchecked(v) / gamma_unchecked(u + v))
    } else {
        let (a, _) = ln_gamma(u)?;
        let (b, _) = ln_gamma(v)?;
        let (c, _) = ln_gamma(u + v)?;
        Ok((a + b - c).exp())
    }
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Parameters `(a, b, c, x)` of `F(a, b; c; x)` restricted to `0 <= x < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypArgs {
    a: f64,
    b: f64,
    c: f64,
    x: f64,
}

impl HypArgs {
    pub fn new(a: f64, b: f64, c: f64, x: f64) -> Result<Self, SpecFunError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(SpecFunError::Domain("non-finite hypergeometric parameter".into()));
        }
        if is_nonpositive_integer(c) {
            return Err(SpecFunError::Domain(format!(
                "c = {c} is zero or a negative integer"
            )));
        }
        if !(0.0..1.0).contains(&x) {
            return Err(SpecFunError::Domain(format!(
                "x = {x} outside [0, 1); use hyp2f1_limit_at_1 for x = 1"
            )));
        }
        Ok(Self { a, b, c, x })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Parameter excess `c - a - b`.
    pub fn excess(&self) -> f64 {
        self.c - (self.a + self.b)
    }

    fn terminates(&self) -> bool {
        is_nonpositive_integer(self.a) || is_nonpositive_integer(self.b)
    }
}

/// Direct summation of the defining power series, without any routing.
///
/// Stops once the remaining tail, bounded geometrically from the current term,
/// drops below `tol * |partial sum|`, or immediately when the series terminates.
pub fn hyp2f1_series(args: &HypArgs, tol: f64, cap: usize) -> Result<f64, SpecFunError> {
    let HypArgs { a, b, c, x } = *args;
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    sum.add(term);
    // Early terms can be small before the ratio settles; only trust the tail
    // bound once n is past every parameter.
    let settle = 2.0 * a.abs().max(b.abs()).max(c.abs()).max(1.0) + 4.0;
    for n in 0..cap {
        let nf = n as f64;
        let factor = ((a + nf) * (b + nf)) / ((c + nf) * (nf + 1.0)) * x;
        term *= factor;
        if term == 0.0 {
            return Ok(sum.value());
        }
        sum.add(term);
        if nf + 1.0 < settle {
            continue;
        }
        let n1 = nf + 1.0;
        let next = (((a + n1) * (b + n1)) / ((c + n1) * (n1 + 1.0)) * x).abs();
        let bound = next.max(x);
        if bound < 1.0 && term.abs() * bound / (1.0 - bound) <= tol * sum.value().abs() {
            return Ok(sum.value());
        }
    }
    Err(SpecFunError::NoConvergence {
        partial_sum: sum.value(),
        terms: cap,
    })
}

/// Gauss hypergeometric function `F(a, b; c; x)` for `0 <= x < 1`.
///
/// For `x > 0.75` with `c - a - b < 0` the Euler transformation
/// `F(a,b;c;x) = (1-x)^(c-a-b) F(c-a, c-b; c; x)` is applied first.
pub fn hyp2f1(args: &HypArgs, tol: f64) -> Result<f64, SpecFunError> {
    if !(tol > 0.0) {
        return Err(SpecFunError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let tol = tol.min(1e-11);
    if args.x == 0.0 {
        return Ok(1.0);
    }
    if args.terminates() || args.x <= EULER_SWITCH {
        return hyp2f1_series(args, tol, SERIES_TERM_CAP);
    }
    let excess = args.excess();
    if excess < 0.0 {
        let transformed = HypArgs {
            a: args.c - args.a,
            b: args.c - args.b,
            c: args.c,
            x: args.x,
        };
        let cap = if transformed.terminates() {
            SERIES_TERM_CAP
        } else {
            NEAR_ONE_TERM_CAP
        };
        let inner = hyp2f1_series(&transformed, tol, cap)?;
        Ok((1.0 - args.x).powf(excess) * inner)
    } else {
        hyp2f1_series(args, tol, NEAR_ONE_TERM_CAP)
    }
}

/// `F(a, b; c; x)` with the default tolerance.
pub fn hyp2f1_default(a: f64, b: f64, c: f64, x: f64) -> Result<f64, SpecFunError> {
    hyp2f1(&HypArgs::new(a, b, c, x)?, HYP_TOL)
}

/// Gamma ratio `Γ(p1)Γ(p2) / (Γ(q1)Γ(q2))`, zero when a denominator argument is a pole.
pub(crate) fn gamma_ratio(p1: f64, p2: f64, q1: f64, q2: f64) -> Result<f64, SpecFunError> {
    if is_nonpositive_integer(q1) || is_nonpositive_integer(q2) {
        // numerator poles are reported below; denominator poles give zero
        gamma(p1)?;
        gamma(p2)?;
        return Ok(0.0);
    }
    if [p1, p2, q1, q2].iter().all(|v| v.abs() < 150.0) {
        return Ok(gamma(p1)? * gamma(p2)? * recip_gamma(q1) * recip_gamma(q2));
    }
    let (l1, s1) = ln_gamma(p1)?;
    let (l2, s2) = ln_gamma(p2)?;
    let (l3, s3) = ln_gamma(q1)?;
    let (l4, s4) = ln_gamma(q2)?;
    Ok(s1 * s2 * s3 * s4 * (l1 + l2 - l3 - l4).exp())
}

/// Gauss limit `lim_{x->1} F(a,b;c;x) = Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b))`, valid for `c - a - b > 0`.
pub fn hyp2f1_limit_at_1(a: f64, b: f64, c: f64) -> Result<f64, SpecFunError> {
    let excess = c - (a + b);
    if !(excess > 0.0) {
        return Err(SpecFunError::Domain(format!(
            "Gauss limit needs c - a - b > 0, got {excess}"
        )));
    }
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::Domain(format!("c = {c} is zero or a negative integer")));
    }
    gamma_ratio(c, excess, c - a, c - b)
}

/// `dF/dx = (ab/c) F(a+1, b+1; c+1; x)`.
pub fn hyp2f1_derivative(args: &HypArgs) -> Result<f64, SpecFunError> {
    let shifted = HypArgs::new(args.a + 1.0, args.b + 1.0, args.c + 1.0, args.x)?;
    let scale = args.a * args.b / args.c;
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(scale * hyp2f1(&shifted, HYP_TOL)?)
}
