//! Integral means `M_p(r, g)` over circles and Hardy-type suprema over radii.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};
use crate::extension::DiskPoint;
use crate::quad::{QuadratureError, QuadratureSpec};

/// Exponent `p ∈ [1, ∞]` with its Hölder conjugate `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueExponent {
    p: f64,
    q: f64,
}

impl LebesgueExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("exponent must satisfy p >= 1, got {p}")));
        }
        let q = if p == 1.0 {
            f64::INFINITY
        } else if p.is_infinite() {
            1.0
        } else {
            p / (p - 1.0)
        };
        Ok(Self { p, q })
    }

    pub fn infinity() -> Self {
        Self { p: f64::INFINITY, q: 1.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }
}

/// Starting number of angles for circle means.
pub const THETA_NODES: usize = 64;
const THETA_MAX_DOUBLINGS: u32 = 8;

/// Circle samples of `|g|` at the finest level reached.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSamples {
    pub moduli: Vec<f64>,
    pub nodes: usize,
}

/// Samples `|g(r e^{iθ})|` on a doubling angle grid until every requested
/// mean `(1/n)Σ|g|^p` (finite `p`) is stable to `max(tol, 1e-9)` relative.
pub fn sample_circle<G: Fn(DiskPoint) -> Result<Complex64>>(
    g: &G,
    r: f64,
    ps: &[LebesgueExponent],
    spec: &QuadratureSpec,
) -> Result<CircleSamples> {
    let tol = spec.tol().max(1e-9);
    let finite: Vec<f64> = ps.iter().filter(|p| !p.is_infinite()).map(|p| p.p()).collect();
    let mut n = THETA_NODES;
    let mut moduli = Vec::with_capacity(n);
    for j in 0..n {
        moduli.push(g(DiskPoint::new(r, TAU * j as f64 / n as f64)?)?.norm());
    }
    let means = |m: &[f64]| -> Vec<f64> {
        finite
            .iter()
            .map(|&p| m.iter().map(|v| v.powf(p)).sum::<f64>() / m.len() as f64)
            .collect()
    };
    let mut prev = means(&moduli);
    for _ in 0..THETA_MAX_DOUBLINGS {
        let n2 = 2 * n;
        let mut next = Vec::with_capacity(n2);
        for j in 0..n {
            next.push(moduli[j]);
            next.push(g(DiskPoint::new(r, TAU * (2 * j + 1) as f64 / n2 as f64)?)?.norm());
        }
        moduli = next;
        n = n2;
        let cur = means(&moduli);
        let scale = cur.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        if prev.iter().zip(&cur).all(|(a, b)| (a - b).abs() <= tol * scale) {
            return Ok(CircleSamples { moduli, nodes: n });
        }
        prev = cur;
    }
    Err(Error::Quadrature(QuadratureError::NoConvergence {
        last: prev.clone(),
        previous: prev,
        nodes: n,
    }))
}

fn mean_from_samples(s: &CircleSamples, p: &LebesgueExponent) -> f64 {
    if p.is_infinite() {
        return s.moduli.iter().copied().fold(0.0, f64::max);
    }
    let m = s.moduli.iter().map(|v| v.powf(p.p())).sum::<f64>() / s.moduli.len() as f64;
    m.powf(1.0 / p.p())
}

/// `M_p(r, g) = ((1/2π)∫|g(re^{iθ})|^p dθ)^{1/p}`; for `p = ∞` the maximum
/// over the sampled angles (a lower bound for the supremum).
pub fn integral_means<G: Fn(DiskPoint) -> Result<Complex64>>(
    g: G,
    r: f64,
    p: &LebesgueExponent,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let s = sample_circle(&g, r, std::slice::from_ref(p), spec)?;
    Ok(mean_from_samples(&s, p))
}

/// Several exponents from one set of circle samples.
pub fn integral_means_multi<G: Fn(DiskPoint) -> Result<Complex64>>(
    g: G,
    r: f64,
    ps: &[LebesgueExponent],
    spec: &QuadratureSpec,
) -> Result<(Vec<f64>, usize)> {
    let s = sample_circle(&g, r, ps, spec)?;
    Ok((ps.iter().map(|p| mean_from_samples(&s, p)).collect(), s.nodes))
}

/// Supremum of `M_p(r, g)` over an explicit radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyNorm {
    pub value: f64,
    pub argmax: f64,
    pub grid: Vec<f64>,
    pub means: Vec<f64>,
}

pub fn hardy_norm<G: Fn(DiskPoint) -> Result<Complex64>>(
    g: G,
    p: &LebesgueExponent,
    r_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<HardyNorm> {
    if r_grid.is_empty() {
        return Err(Error::Domain("radius grid is empty".into()));
    }
    let mut means = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        means.push(integral_means(&g, r, p, spec)?);
    }
    let (i, v) = means
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    Ok(HardyNorm {
        value: v,
        argmax: r_grid[i],
        grid: r_grid.to_vec(),
        means,
    })
}

/// Integral means of `θ ↦ g_θ(r e^{iθ})`, where `g_θ` is built from the
/// family member recentered at `θ`. Every sample sees the same configuration
/// relative to its center, so the angle grid is fixed at `n_theta` points.
pub fn family_integral_means<G: Fn(&BoundaryFunction, DiskPoint) -> Result<Complex64>>(
    family: &BoundaryFunction,
    r: f64,
    p: &LebesgueExponent,
    n_theta: usize,
    g: G,
) -> Result<f64> {
    let n = n_theta.max(1);
    let mut moduli = Vec::with_capacity(n);
    for j in 0..n {
        let theta = TAU * j as f64 / n as f64;
        let member = family.rotated_to(theta);
        moduli.push(g(&member, DiskPoint::new(r, theta)?)?.norm());
    }
    Ok(mean_from_samples(&CircleSamples { moduli, nodes: n }, p))
}
