//! The α-harmonic Poisson-type kernel, the extension `u = P_α[f]`, its four
//! first-order partials, and the finite-difference residual of `T_α u`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::boundary::{BoundaryFunction, Variable};
use crate::error::{Error, Result};
use crate::quad::QuadratureSpec;
use crate::specfun::{self, HypArgs, HYP_TOL};

/// The parameter `α > -1` with its normalizing constant
/// `c_α = Γ(α/2+1)² / Γ(α+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam {
    alpha: f64,
    c_alpha: f64,
}

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be finite and > -1, got {alpha}")));
        }
        let c_alpha = if alpha < 100.0 {
            specfun::gamma(alpha / 2.0 + 1.0)?.powi(2) / specfun::gamma(alpha + 1.0)?
        } else {
            let (a, _) = specfun::ln_gamma(alpha / 2.0 + 1.0)?;
            let (b, _) = specfun::ln_gamma(alpha + 1.0)?;
            (2.0 * a - b).exp()
        };
        Ok(Self { alpha, c_alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }
}

/// Interior point `z = r e^{iθ}` with `0 <= r < 1` and `θ` reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    r: f64,
    theta: f64,
}

impl DiskPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "disk point needs 0 <= r < 1 and finite theta, got ({r}, {theta})"
            )));
        }
        Ok(Self {
            r,
            theta: theta.rem_euclid(TAU),
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.norm(), z.arg())
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// `K_α(w) = c_α (1-|w|²)^{α+1} / |1-w|^{α+2}` for `|w| < 1`.
pub fn kernel(alpha: &AlphaParam, w: Complex64) -> Result<f64> {
    let m = w.norm();
    if !(m < 1.0) {
        return Err(Error::Domain(format!("kernel needs |w| < 1, got {m}")));
    }
    let a = alpha.alpha;
    let one_minus = (1.0 - m) * (1.0 + m);
    Ok(alpha.c_alpha * one_minus.powf(a + 1.0) / (Complex64::new(1.0, 0.0) - w).norm().powf(a + 2.0))
}

/// `c_α F(-α/2, -α/2; 1; r²)`, the circle mean of the kernel at radius `r`.
pub fn kernel_mean(alpha: &AlphaParam, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("kernel mean needs 0 <= r < 1, got {r}")));
    }
    let h = -alpha.alpha / 2.0;
    Ok(alpha.c_alpha * specfun::hyp2f1(&HypArgs::new(h, h, 1.0, r * r)?, HYP_TOL)?)
}

/// Per-point constants shared by the kernel and its derivatives.
struct KernelAt {
    a: f64,
    r: f64,
    theta: f64,
    z: Complex64,
    one_minus: f64,
    /// `c_α (1-r²)^α`
    p0: f64,
}

impl KernelAt {
    fn new(alpha: &AlphaParam, z: &DiskPoint) -> Self {
        let r = z.r;
        let one_minus = (1.0 - r) * (1.0 + r);
        Self {
            a: alpha.alpha,
            r,
            theta: z.theta,
            z: z.z(),
            one_minus,
            p0: alpha.c_alpha * one_minus.powf(alpha.alpha),
        }
    }

    /// `(|1 - z e^{-it}|², sin²((θ-t)/2), δ = θ - t)`.
    #[inline]
    fn dist(&self, t: f64) -> (f64, f64, f64) {
        let delta = self.theta - t;
        let sh = (0.5 * delta).sin();
        let s2 = sh * sh;
        let d = (1.0 - self.r) * (1.0 - self.r) + 4.0 * self.r * s2;
        (d, s2, delta)
    }

    #[inline]
    fn value(&self, t: f64) -> f64 {
        let (d, _, _) = self.dist(t);
        self.p0 * self.one_minus * d.powf(-(self.a + 2.0) / 2.0)
    }

    /// Kernel and its four derivative kernels at `t`:
    /// `[K, ∂_r K, ∂_θ K, Re/Im ∂_z K, Re/Im ∂_z̄ K]`.
    #[inline]
    fn all(&self, t: f64) -> (f64, f64, f64, Complex64, Complex64) {
        let (d, s2, delta) = self.dist(t);
        let a = self.a;
        let e = d.powf(-(a + 4.0) / 2.0);
        let k = self.p0 * self.one_minus * d * e;
        // r - cos δ without cancellation
        let r_minus_cos = -(1.0 - self.r) + 2.0 * s2;
        let kr = -self.p0 * (2.0 * (a + 1.0) * self.r * d + (a + 2.0) * self.one_minus * r_minus_cos) * e;
        let kt = -(a + 2.0) * self.p0 * self.one_minus * self.r * delta.sin() * e;
        let et = Complex64::from_polar(1.0, t);
        let zb = self.z.conj();
        let half = 1.0 + a / 2.0;
        let kz = self.p0 * (-(a + 1.0) * zb * d + half * self.one_minus * (et.conj() - zb)) * e;
        let kzb = self.p0 * (-(a + 1.0) * self.z * d + half * self.one_minus * (et - self.z)) * e;
        (k, kr, kt, kz, kzb)
    }
}

/// `u` and its first-order partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub u: Complex64,
    pub u_r: Complex64,
    pub u_theta: Complex64,
    pub u_z: Complex64,
    pub u_zbar: Complex64,
    /// Quadrature nodes used.
    pub nodes: usize,
}

/// `(1/2π)∫ K_α(z e^{-it}) f(e^{it}) dt`.
pub fn poisson_extend(alpha: &AlphaParam, f: &BoundaryFunction, z: &DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
    Ok(poisson_extend_counted(alpha, f, z, spec)?.0)
}

/// As `poisson_extend`, also returning the node count and refinement level.
pub fn poisson_extend_counted(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    z: &DiskPoint,
    spec: &QuadratureSpec,
) -> Result<(Complex64, usize, u32)> {
    let k = KernelAt::new(alpha, z);
    let res = f.circle_mean(Some(*z), Variable::Auto, spec, |t, v| {
        let w = k.value(t);
        [w * v.re, w * v.im]
    })?;
    Ok((Complex64::new(res.value[0], res.value[1]), res.nodes, res.level))
}

/// All four partials of `u = P_α[f]` (and `u` itself) from one quadrature pass.
///
/// At the origin `u_θ` is 0 and `u_r` is the derivative along the ray at angle `θ`.
pub fn partials(alpha: &AlphaParam, f: &BoundaryFunction, z: &DiskPoint, spec: &QuadratureSpec) -> Result<Partials> {
    let k = KernelAt::new(alpha, z);
    let res = f.circle_mean(Some(*z), Variable::Auto, spec, |t, v| {
        let (w, wr, wt, wz, wzb) = k.all(t);
        let pz = wz * v;
        let pzb = wzb * v;
        [
            w * v.re,
            w * v.im,
            wr * v.re,
            wr * v.im,
            wt * v.re,
            wt * v.im,
            pz.re,
            pz.im,
            pzb.re,
            pzb.im,
        ]
    })?;
    let c = |i: usize| Complex64::new(res.value[i], res.value[i + 1]);
    Ok(Partials {
        u: c(0),
        u_r: c(2),
        u_theta: c(4),
        u_z: c(6),
        u_zbar: c(8),
        nodes: res.nodes,
    })
}

/// `|T_α u(z)|` with `u = P_α[f]`, using second-order central differences
/// of step `h` for `∂`, `∂̄` and `Δ`. All five stencil values share one
/// quadrature node set, so the result measures the difference error only.
pub fn t_alpha_residual(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    z: &DiskPoint,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if z.r + h > 1.0 - h {
        return Err(Error::Domain(format!(
            "stencil of size {h} around r = {} leaves the disk |z| <= 1 - h",
            z.r
        )));
    }
    let outer = DiskPoint::new(z.r + h, z.theta)?;
    // choose the level at the outermost radius, then reuse the same nodes
    let ko = KernelAt::new(alpha, &outer);
    let level = f
        .circle_mean(Some(outer), Variable::Angle, spec, |t, v| {
            let w = ko.value(t);
            [w * v.re, w * v.im]
        })?
        .level;
    let plan = f.plan(Some(outer), Variable::Angle, spec);
    let at = |w: Complex64| -> Result<Complex64> {
        let p = DiskPoint::from_complex(w)?;
        let k = KernelAt::new(alpha, &p);
        let v = f.circle_mean_at_level(&plan, level + 1, |t, v| {
            let w = k.value(t);
            [w * v.re, w * v.im]
        });
        Ok(Complex64::new(v[0], v[1]))
    };
    let z0 = z.z();
    let u0 = at(z0)?;
    let ue = at(z0 + h)?;
    let uw = at(z0 - h)?;
    let un = at(z0 + Complex64::new(0.0, h))?;
    let us = at(z0 - Complex64::new(0.0, h))?;
    let ux = (ue - uw) / (2.0 * h);
    let uy = (un - us) / (2.0 * h);
    let lap = (ue + uw + un + us - 4.0 * u0) / (h * h);
    let a = alpha.alpha;
    let w = 1.0 - z0.norm_sqr();
    let euler = z0.re * ux + z0.im * uy;
    let t = -a * a / 4.0 * w.powf(-a - 1.0) * u0 + a / 2.0 * w.powf(-a - 1.0) * euler + 0.25 * w.powf(-a) * lap;
    Ok(t.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{self, Layout};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn alpha_validation_and_constant() {
        assert!(AlphaParam::new(-1.0).is_err());
        assert!(AlphaParam::new(-2.0).is_err());
        assert_eq!(AlphaParam::new(0.0).unwrap().c_alpha(), 1.0);
        assert_relative_eq!(AlphaParam::new(2.0).unwrap().c_alpha(), 0.5, max_relative = 1e-14);
        let a = AlphaParam::new(1.0).unwrap();
        assert_relative_eq!(a.c_alpha(), PI / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn kernel_examples() {
        for al in [-0.5, 0.0, 3.0] {
            let a = AlphaParam::new(al).unwrap();
            assert_relative_eq!(kernel(&a, Complex64::new(0.0, 0.0)).unwrap(), a.c_alpha(), max_relative = 1e-15);
        }
        let a0 = AlphaParam::new(0.0).unwrap();
        assert_relative_eq!(kernel(&a0, Complex64::new(0.5, 0.0)).unwrap(), 3.0, max_relative = 1e-14);
        let a2 = AlphaParam::new(2.0).unwrap();
        assert_relative_eq!(kernel(&a2, Complex64::new(0.5, 0.0)).unwrap(), 3.375, max_relative = 1e-14);
        assert!(kernel(&a0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn kernel_mean_examples() {
        let a0 = AlphaParam::new(0.0).unwrap();
        assert_eq!(kernel_mean(&a0, 0.7).unwrap(), 1.0);
        let a = AlphaParam::new(1.3).unwrap();
        assert_eq!(kernel_mean(&a, 0.0).unwrap(), a.c_alpha());
        let a2 = AlphaParam::new(2.0).unwrap();
        let oracle = quad::mean_at_level(&Layout::Periodic, 4096, 0, |t| {
            [kernel(&a2, Complex64::from_polar(0.9, -t)).unwrap()]
        });
        assert!((kernel_mean(&a2, 0.9).unwrap() - oracle[0]).abs() < 1e-8);
        for al in [-0.5, 1.0, 3.0] {
            let a = AlphaParam::new(al).unwrap();
            let v = kernel_mean(&a, 0.999).unwrap();
            assert!(v <= 1.0 && v > 0.99, "alpha={al}: {v}");
        }
    }

    #[test]
    fn extension_examples() {
        let one = BoundaryFunction::constant(Complex64::new(1.0, 0.0));
        let a0 = AlphaParam::new(0.0).unwrap();
        let z = DiskPoint::new(0.8, 1.0).unwrap();
        assert!((poisson_extend(&a0, &one, &z, &spec()).unwrap() - 1.0).norm() < 1e-12);
        let a2 = AlphaParam::new(2.0).unwrap();
        let z = DiskPoint::new(0.5, 0.3).unwrap();
        assert!((poisson_extend(&a2, &one, &z, &spec()).unwrap() - 0.625).norm() < 1e-12);
        let e1 = BoundaryFunction::exp(1);
        let z = DiskPoint::new(0.6, 2.0).unwrap();
        assert!((poisson_extend(&a0, &e1, &z, &spec()).unwrap() - z.z()).norm() < 1e-12);
    }

    #[test]
    fn partials_of_identity_map() {
        let a0 = AlphaParam::new(0.0).unwrap();
        let e1 = BoundaryFunction::exp(1);
        let z = DiskPoint::new(0.7, 0.9).unwrap();
        let p = partials(&a0, &e1, &z, &spec()).unwrap();
        assert!((p.u_z - 1.0).norm() < 1e-10);
        assert!(p.u_zbar.norm() < 1e-10);
        assert!((p.u_theta - Complex64::i() * z.z()).norm() < 1e-10);
        assert!((p.u_r - Complex64::from_polar(1.0, z.theta())).norm() < 1e-10);
        let one = BoundaryFunction::constant(Complex64::new(1.0, 0.0));
        let q = partials(&a0, &one, &z, &spec()).unwrap();
        for v in [q.u_r, q.u_theta, q.u_z, q.u_zbar] {
            assert!(v.norm() < 1e-10);
        }
    }

    #[test]
    fn partials_at_origin() {
        let a = AlphaParam::new(1.5).unwrap();
        let f = BoundaryFunction::trig_poly(5, 3);
        let z = DiskPoint::new(0.0, 0.7).unwrap();
        let p = partials(&a, &f, &z, &spec()).unwrap();
        assert_eq!(p.u_theta, Complex64::new(0.0, 0.0));
        let dir = Complex64::from_polar(1.0, 0.7);
        assert!((p.u_r - (dir * p.u_z + dir.conj() * p.u_zbar)).norm() < 1e-10);
    }

    fn finite_difference_check(alpha: f64, f: &BoundaryFunction, r: f64, theta: f64) {
        let a = AlphaParam::new(alpha).unwrap();
        let z = DiskPoint::new(r, theta).unwrap();
        let s = QuadratureSpec::with_tol(1e-13).unwrap();
        let p = partials(&a, f, &z, &s).unwrap();
        let h = 1e-5;
        let u = |r: f64, t: f64| poisson_extend(&a, f, &DiskPoint::new(r, t).unwrap(), &s).unwrap();
        let ur = (u(r + h, theta) - u(r - h, theta)) / (2.0 * h);
        let ut = (u(r, theta + h) - u(r, theta - h)) / (2.0 * h);
        let uc = |w: Complex64| poisson_extend(&a, f, &DiskPoint::from_complex(w).unwrap(), &s).unwrap();
        let z0 = z.z();
        let ux = (uc(z0 + h) - uc(z0 - h)) / (2.0 * h);
        let uy = (uc(z0 + Complex64::new(0.0, h)) - uc(z0 - Complex64::new(0.0, h))) / (2.0 * h);
        let uz = 0.5 * (ux - Complex64::i() * uy);
        let uzb = 0.5 * (ux + Complex64::i() * uy);
        assert!((p.u_r - ur).norm() < 1e-5, "u_r {} vs {}", p.u_r, ur);
        assert!((p.u_theta - ut).norm() < 1e-5, "u_theta {} vs {}", p.u_theta, ut);
        assert!((p.u_z - uz).norm() < 1e-5, "u_z {} vs {}", p.u_z, uz);
        assert!((p.u_zbar - uzb).norm() < 1e-5, "u_zbar {} vs {}", p.u_zbar, uzb);
    }

    #[test]
    fn partials_match_finite_differences() {
        let f = BoundaryFunction::trig_poly(11, 4);
        finite_difference_check(1.5, &f, 0.5, 0.8);
        finite_difference_check(-0.5, &f, 0.8, 4.0);
        finite_difference_check(0.0, &f, 0.3, 2.0);
        let d = BoundaryFunction::parse("extremal:D,0,2,0.6").unwrap();
        finite_difference_check(2.0, &d, 0.6, 0.0);
    }

    #[test]
    fn residual_examples() {
        let a0 = AlphaParam::new(0.0).unwrap();
        let one = BoundaryFunction::constant(Complex64::new(1.0, 0.0));
        let z = DiskPoint::new(0.3, 0.0).unwrap();
        assert!(t_alpha_residual(&a0, &one, &z, 1e-3, &spec()).unwrap() < 1e-6);
        let e1 = BoundaryFunction::exp(1);
        let z = DiskPoint::new(0.4, PI / 3.0).unwrap();
        assert!(t_alpha_residual(&a0, &e1, &z, 1e-3, &spec()).unwrap() <= 1e-6);
        let f = BoundaryFunction::trig_poly(2024, 4);
        let a = AlphaParam::new(1.5).unwrap();
        let z = DiskPoint::new(0.5, 0.0).unwrap();
        let r1 = t_alpha_residual(&a, &f, &z, 1e-3, &spec()).unwrap();
        let r2 = t_alpha_residual(&a, &f, &z, 5e-4, &spec()).unwrap();
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({r1}, {r2})");
        let edge = DiskPoint::new(0.9995, 0.0).unwrap();
        assert!(t_alpha_residual(&a, &f, &edge, 1e-3, &spec()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn kernel_positive(alpha in -0.99f64..8.0, r in 0.0f64..0.999, t in 0.0f64..6.283) {
                let a = AlphaParam::new(alpha).unwrap();
                prop_assert!(kernel(&a, Complex64::from_polar(r, t)).unwrap() > 0.0);
            }

            #[test]
            fn linearity(seed in 0u64..500, ca in -2.0f64..2.0, cb in -2.0f64..2.0, alpha in -0.5f64..3.0, r in 0.0f64..0.9, th in 0.0f64..6.283) {
                let a = AlphaParam::new(alpha).unwrap();
                let f = BoundaryFunction::trig_poly(seed, 3);
                let g = BoundaryFunction::trig_poly(seed + 1, 2);
                let h = BoundaryFunction::sum(vec![f.scaled(Complex64::new(ca, 0.0)), g.scaled(Complex64::new(cb, 0.0))]);
                let z = DiskPoint::new(r, th).unwrap();
                let s = spec();
                let lhs = poisson_extend(&a, &h, &z, &s).unwrap();
                let rhs = ca * poisson_extend(&a, &f, &z, &s).unwrap() + cb * poisson_extend(&a, &g, &z, &s).unwrap();
                prop_assert!((lhs - rhs).norm() <= 1e-10);
            }

            #[test]
            fn classical_poisson_at_alpha_zero(seed in 0u64..500, r in 0.0f64..0.95, th in 0.0f64..6.283) {
                // u(z) = Σ c_k r^{|k|} e^{ikθ} for trigonometric polynomial data
                let a = AlphaParam::new(0.0).unwrap();
                let f = BoundaryFunction::trig_poly(seed, 5);
                let z = DiskPoint::new(r, th).unwrap();
                let u = poisson_extend(&a, &f, &z, &spec()).unwrap();
                let mut oracle = Complex64::new(0.0, 0.0);
                let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
                for k in -5i32..=5 {
                    let re: f64 = rand::Rng::gen_range(&mut rng, -1.0..=1.0);
                    let im: f64 = rand::Rng::gen_range(&mut rng, -1.0..=1.0);
                    oracle += Complex64::new(re, im) * r.powi(k.abs()) * Complex64::from_polar(1.0, k as f64 * th);
                }
                prop_assert!((u - oracle).norm() <= 1e-9);
            }

            #[test]
            fn wirtinger_consistency(seed in 0u64..500, alpha in -0.5f64..3.0, r in 0.05f64..0.9, th in 0.0f64..6.283) {
                let a = AlphaParam::new(alpha).unwrap();
                let f = BoundaryFunction::trig_poly(seed, 4);
                let z = DiskPoint::new(r, th).unwrap();
                let p = partials(&a, &f, &z, &spec()).unwrap();
                let e = Complex64::from_polar(1.0, th);
                let zz = z.z();
                prop_assert!((p.u_r - (e * p.u_z + e.conj() * p.u_zbar)).norm() <= 1e-7);
                prop_assert!((p.u_theta - Complex64::i() * (zz * p.u_z - zz.conj() * p.u_zbar)).norm() <= 1e-7);
            }
        }
    }
}
