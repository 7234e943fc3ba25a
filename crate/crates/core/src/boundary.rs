//! Boundary data on the unit circle: evaluable functions with declared
//! discontinuities, the Möbius change of variable used for the extremal
//! families, curve length and Lipschitz estimates, and a small spec parser.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extension::{AlphaParam, DiskPoint};
use crate::means::LebesgueExponent;
use crate::quad::{self, Layout, MeanResult, QuadratureError, QuadratureSpec};
use crate::sum::CompensatedSum;

/// Möbius reparameterization of the circle:
/// `e^{i(t-θ)} = (ρ + e^{is}) / (1 + ρ e^{is})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstitutionMap {
    rho: f64,
    theta: f64,
}

impl SubstitutionMap {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Domain(format!("rho must lie in [0, 1), got {rho}")));
        }
        Ok(Self {
            rho,
            theta: theta.rem_euclid(TAU),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `(t, dt/ds)` for a given `s`.
    pub fn substitute(&self, s: f64) -> (f64, f64) {
        let e = Complex64::from_polar(1.0, s);
        let w = (self.rho + e) / (1.0 + self.rho * e);
        let t = (self.theta + w.arg()).rem_euclid(TAU);
        let jac = (1.0 - self.rho * self.rho) / (1.0 + self.rho * e).norm_sqr();
        (t, jac)
    }

    /// The `s` that maps to `t`, in `[0, 2π)`.
    pub fn inverse(&self, t: f64) -> f64 {
        let e = Complex64::from_polar(1.0, t - self.theta);
        ((e - self.rho) / (1.0 - self.rho * e)).arg().rem_euclid(TAU)
    }

    pub fn jacobian(&self, s: f64) -> f64 {
        self.substitute(s).1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    A,
    B,
    C,
    Cbar,
    D,
    E,
    F,
    Fbar,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "A" => Self::A,
            "B" => Self::B,
            "C" => Self::C,
            "Cbar" => Self::Cbar,
            "D" => Self::D,
            "E" => Self::E,
            "F" => Self::F,
            "Fbar" => Self::Fbar,
            other => {
                return Err(Error::Parse {
                    token: other.to_string(),
                    message: "unknown family kind (expected A, B, C, Cbar, D, E, F or Fbar)".into(),
                })
            }
        })
    }

    pub fn needs_holder_exponent(&self) -> bool {
        matches!(self, Self::A | Self::B | Self::C | Self::Cbar)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::Cbar => "Cbar",
            Self::D => "D",
            Self::E => "E",
            Self::F => "F",
            Self::Fbar => "Fbar",
        };
        f.write_str(s)
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One member `f_ρ` of an extremal family, described in the `s` variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremal {
    kind: FamilyKind,
    alpha: f64,
    p: f64,
    map: SubstitutionMap,
    prefactor: f64,
}

impl Extremal {
    fn new(kind: FamilyKind, alpha: f64, p: f64, map: SubstitutionMap) -> Self {
        let one_minus = 1.0 - map.rho * map.rho;
        let prefactor = match kind {
            FamilyKind::A => one_minus.powf(-1.0 / p),
            FamilyKind::B => one_minus.powf(3.0 / (1.0 - p)),
            FamilyKind::C | FamilyKind::Cbar => one_minus.powf(2.0 / (1.0 - p)),
            _ => 1.0,
        };
        Self {
            kind,
            alpha,
            p,
            map,
            prefactor,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }
    pub fn map(&self) -> SubstitutionMap {
        self.map
    }

    fn q(&self) -> f64 {
        if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// `1/(p-1)`, zero for `p = ∞`.
    fn inv_pm1(&self) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            1.0 / (self.p - 1.0)
        }
    }

    pub fn eval_s(&self, s: f64) -> Complex64 {
        let (sn, cs) = s.sin_cos();
        let v = match self.kind {
            FamilyKind::A => {
                let e = self.q() - 1.0;
                let mag = cs.abs().powf(e) * (1.0 + cs).max(0.0).powf(e);
                Complex64::new(mag * sgn(cs), 0.0)
            }
            FamilyKind::B => {
                let k = self.inv_pm1();
                let mag = sn.abs().powf(k) * (1.0 + cs).max(0.0).powf((self.alpha / 2.0 + 1.0) * k);
                Complex64::new(mag * sgn(sn), 0.0)
            }
            FamilyKind::C => Complex64::from_polar((1.0 + cs).max(0.0).powf(self.inv_pm1()), s),
            FamilyKind::Cbar => Complex64::from_polar((1.0 + cs).max(0.0).powf(self.inv_pm1()), -s),
            FamilyKind::D => Complex64::new(sgn(cs), 0.0),
            FamilyKind::E => Complex64::new(sgn(sn), 0.0),
            FamilyKind::F => Complex64::new(cs, sn),
            FamilyKind::Fbar => Complex64::new(cs, -sn),
        };
        v * self.prefactor
    }

    /// Jump points in `s`.
    pub fn jumps_s(&self) -> Vec<f64> {
        match self.kind {
            FamilyKind::A | FamilyKind::D => vec![FRAC_PI_2, 3.0 * FRAC_PI_2],
            FamilyKind::B | FamilyKind::E => vec![0.0, PI],
            _ => vec![],
        }
    }

    /// Jumps plus points where the function is continuous but not smooth.
    pub fn breakpoints_s(&self) -> Vec<f64> {
        let mut b = self.jumps_s();
        let kink_at_pi = match self.kind {
            FamilyKind::A => (self.q() - 1.0).fract() != 0.0,
            FamilyKind::B => ((self.alpha / 2.0 + 1.0) * self.inv_pm1()).fract() != 0.0,
            FamilyKind::C | FamilyKind::Cbar => self.inv_pm1().fract() != 0.0,
            _ => false,
        };
        if kink_at_pi && !b.contains(&PI) {
            b.push(PI);
        }
        b
    }

    fn exact_lp_norm(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::D | FamilyKind::E | FamilyKind::F | FamilyKind::Fbar => Some(1.0),
            _ => None,
        }
    }

    fn label(&self) -> String {
        format!("extremal:{},{},{},{}", self.kind, self.alpha, fmt_p(self.p), self.map.rho)
    }
}

fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Const(Complex64),
    /// Finite Fourier sum `Σ c_k e^{ikt}`.
    Fourier(Vec<(i32, Complex64)>),
    Extremal(Extremal),
    Sum(Vec<Shape>),
    Scale(Complex64, Box<Shape>),
}

impl Shape {
    fn eval(&self, t: f64, ctx: Option<(&SubstitutionMap, f64)>) -> Complex64 {
        match self {
            Shape::Const(c) => *c,
            Shape::Fourier(terms) => terms
                .iter()
                .map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * t))
                .sum(),
            Shape::Extremal(x) => match ctx {
                Some((m, s)) if *m == x.map => x.eval_s(s),
                _ => x.eval_s(x.map.inverse(t)),
            },
            Shape::Sum(parts) => parts.iter().map(|p| p.eval(t, ctx)).sum(),
            Shape::Scale(a, inner) => a * inner.eval(t, ctx),
        }
    }

    fn extremals<'a>(&'a self, out: &mut Vec<&'a Extremal>) {
        match self {
            Shape::Extremal(x) => out.push(x),
            Shape::Sum(parts) => parts.iter().for_each(|p| p.extremals(out)),
            Shape::Scale(_, inner) => inner.extremals(out),
            _ => {}
        }
    }

    fn shifted(&self, c: f64) -> Shape {
        match self {
            Shape::Const(v) => Shape::Const(*v),
            Shape::Fourier(terms) => Shape::Fourier(
                terms
                    .iter()
                    .map(|(k, v)| (*k, v * Complex64::from_polar(1.0, *k as f64 * c)))
                    .collect(),
            ),
            Shape::Extremal(x) => {
                let map = SubstitutionMap {
                    rho: x.map.rho,
                    theta: (x.map.theta - c).rem_euclid(TAU),
                };
                Shape::Extremal(Extremal { map, ..x.clone() })
            }
            Shape::Sum(parts) => Shape::Sum(parts.iter().map(|p| p.shifted(c)).collect()),
            Shape::Scale(a, inner) => Shape::Scale(*a, Box::new(inner.shifted(c))),
        }
    }

    fn exact_lp_norm(&self) -> Option<f64> {
        match self {
            Shape::Const(c) => Some(c.norm()),
            Shape::Fourier(terms) if terms.len() == 1 => Some(terms[0].1.norm()),
            Shape::Extremal(x) => x.exact_lp_norm(),
            Shape::Scale(a, inner) => inner.exact_lp_norm().map(|v| a.norm() * v),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match self {
            Shape::Const(c) if c.im == 0.0 => format!("const:{}", c.re),
            Shape::Const(c) => format!("const:{},{}", c.re, c.im),
            Shape::Fourier(terms) if terms.len() == 1 && terms[0].1 == Complex64::new(1.0, 0.0) => {
                format!("exp:{}", terms[0].0)
            }
            Shape::Fourier(terms) => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(k, c)| format!("({}{:+}i)e^{{{}it}}", c.re, c.im, k))
                    .collect();
                parts.join("+")
            }
            Shape::Extremal(x) => x.label(),
            Shape::Sum(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.label()).collect();
                format!("sum:{}", inner.join("+"))
            }
            Shape::Scale(a, inner) if a.im == 0.0 => format!("scale:{},{}", a.re, inner.label()),
            Shape::Scale(a, inner) => format!("scale:{}{:+}i,{}", a.re, a.im, inner.label()),
        }
    }
}

/// Which variable the circle integral is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variable {
    /// Chosen per call from the node counts both variables would need.
    #[default]
    Auto,
    Angle,
    /// The Möbius variable of the (unique) extremal component.
    Mobius,
}

/// Complex-valued function on the unit circle, parameterized by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    shape: Shape,
    label: String,
}

impl fmt::Display for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl BoundaryFunction {
    fn from_shape(shape: Shape) -> Self {
        let label = shape.label();
        Self { shape, label }
    }

    fn with_label(shape: Shape, label: String) -> Self {
        Self { shape, label }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_shape(Shape::Const(c))
    }

    /// `e^{ikt}`.
    pub fn exp(k: i32) -> Self {
        Self::from_shape(Shape::Fourier(vec![(k, Complex64::new(1.0, 0.0))]))
    }

    /// Finite Fourier series `Σ c_k e^{ikt}`.
    pub fn fourier(terms: Vec<(i32, Complex64)>) -> Self {
        Self::from_shape(Shape::Fourier(terms))
    }

    /// Trigonometric polynomial of the given degree with seeded coefficients
    /// whose real and imaginary parts are uniform in `[-1, 1]`.
    pub fn trig_poly(seed: u64, degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = degree as i32;
        let terms = (-d..=d)
            .map(|k| {
                let re = rng.gen_range(-1.0..=1.0);
                let im = rng.gen_range(-1.0..=1.0);
                (k, Complex64::new(re, im))
            })
            .collect();
        Self::with_label(Shape::Fourier(terms), format!("trigpoly:{seed},{degree}"))
    }

    pub fn sum(parts: Vec<BoundaryFunction>) -> Self {
        let label = format!(
            "sum:{}",
            parts.iter().map(|p| p.label.clone()).collect::<Vec<_>>().join("+")
        );
        Self::with_label(Shape::Sum(parts.into_iter().map(|p| p.shape).collect()), label)
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        let label = if a.im == 0.0 {
            format!("scale:{},{}", a.re, self.label)
        } else {
            format!("scale:{}{:+}i,{}", a.re, a.im, self.label)
        };
        Self::with_label(Shape::Scale(a, Box::new(self.shape.clone())), label)
    }

    /// `t ↦ f(t + c)`.
    pub fn shifted(&self, c: f64) -> Self {
        Self::with_label(self.shape.shifted(c), format!("shift:{},{}", c, self.label))
    }

    /// The extremal member centered at angle `theta` instead of 0.
    pub fn rotated_to(&self, theta: f64) -> Self {
        let mut b = self.shifted(-theta);
        b.label = self.label.clone();
        b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.shape.eval(t, None)
    }

    fn extremals(&self) -> Vec<&Extremal> {
        let mut v = Vec::new();
        self.shape.extremals(&mut v);
        v
    }

    /// The Möbius map shared by every extremal component, if there is one.
    pub fn mobius_map(&self) -> Option<SubstitutionMap> {
        let ex = self.extremals();
        let first = ex.first()?.map;
        ex.iter().all(|x| x.map == first).then_some(first)
    }

    /// Largest `ρ` among extremal components (0 when there are none).
    pub fn feature_radius(&self) -> f64 {
        self.extremals().iter().map(|x| x.map.rho).fold(0.0, f64::max)
    }

    /// Kind and `ρ` when the function is a single extremal member.
    pub fn as_extremal(&self) -> Option<(FamilyKind, f64)> {
        match &self.shape {
            Shape::Extremal(e) => Some((e.kind, e.map.rho)),
            _ => None,
        }
    }

    /// Sorted angles in `[0, 2π)` where the function jumps.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .extremals()
            .iter()
            .flat_map(|x| x.jumps_s().into_iter().map(|s| x.map.substitute(s).0))
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        v
    }

    fn breakpoints_t(&self) -> Vec<f64> {
        self.extremals()
            .iter()
            .flat_map(|x| x.breakpoints_s().into_iter().map(|s| x.map.substitute(s).0))
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.discontinuities().is_empty()
    }

    /// Exact `L^p` norm when known in closed form (independent of `p`).
    pub fn exact_lp_norm(&self, _p: &LebesgueExponent) -> Option<f64> {
        self.shape.exact_lp_norm()
    }

    /// Adaptive mean `(1/2π)∫ g(t, f(t)) dt`.
    ///
    /// `focus` is the disk point whose kernel multiplies `f` inside `g`, if
    /// any; it decides how many starting nodes each variable needs.
    pub fn circle_mean<const K: usize, G: Fn(f64, Complex64) -> [f64; K]>(
        &self,
        focus: Option<DiskPoint>,
        variable: Variable,
        spec: &QuadratureSpec,
        g: G,
    ) -> std::result::Result<MeanResult<K>, QuadratureError> {
        let plan = self.plan(focus, variable, spec);
        match plan.map {
            Some(m) => quad::mean_adaptive(&plan.layout, plan.n0, spec, |s| {
                let (t, j) = m.substitute(s);
                let v = g(t, self.shape.eval(t, Some((&m, s))));
                v.map(|x| x * j)
            }),
            None => quad::mean_adaptive(&plan.layout, plan.n0, spec, |t| g(t, self.shape.eval(t, None))),
        }
    }

    /// The node plan `circle_mean` would use.
    pub fn plan(&self, focus: Option<DiskPoint>, variable: Variable, spec: &QuadratureSpec) -> CirclePlan {
        let rho = self.feature_radius();
        let r = focus.map(|z| z.r()).unwrap_or(0.0);
        let n_angle = spec.nodes_for_radius(r).max(spec.nodes_for_radius(rho));
        let map = self.mobius_map();
        let use_mobius = match (variable, map) {
            (Variable::Angle, _) | (_, None) => false,
            (Variable::Mobius, Some(_)) => true,
            (Variable::Auto, Some(m)) => {
                let n_mobius = match focus {
                    Some(z) => {
                        let j = m.jacobian(m.inverse(z.theta()));
                        let width = ((1.0 - z.r()) / j).min(1.0);
                        spec.nodes_for_radius(1.0 - width)
                    }
                    None => spec.nodes_for_radius(rho),
                };
                n_mobius <= n_angle
            }
        };
        if use_mobius {
            let m = map.expect("checked above");
            let n0 = match focus {
                Some(z) => {
                    let j = m.jacobian(m.inverse(z.theta()));
                    spec.nodes_for_radius(1.0 - ((1.0 - z.r()) / j).min(1.0))
                }
                None => spec.nodes_for_radius(rho),
            };
            let breaks: Vec<f64> = self
                .extremals()
                .iter()
                .flat_map(|x| x.breakpoints_s())
                .collect();
            CirclePlan {
                layout: Layout::from_breakpoints(&breaks),
                n0,
                map: Some(m),
            }
        } else {
            CirclePlan {
                layout: Layout::from_breakpoints(&self.breakpoints_t()),
                n0: n_angle,
                map: None,
            }
        }
    }

    /// Fixed-level counterpart of `circle_mean` for an explicit plan.
    pub fn circle_mean_at_level<const K: usize, G: Fn(f64, Complex64) -> [f64; K]>(
        &self,
        plan: &CirclePlan,
        level: u32,
        g: G,
    ) -> [f64; K] {
        match plan.map {
            Some(m) => quad::mean_at_level(&plan.layout, plan.n0, level, |s| {
                let (t, j) = m.substitute(s);
                g(t, self.shape.eval(t, Some((&m, s)))).map(|x| x * j)
            }),
            None => quad::mean_at_level(&plan.layout, plan.n0, level, |t| g(t, self.shape.eval(t, None))),
        }
    }

    /// `((1/2π)∫|f|^p dt)^{1/p}`; for `p = ∞` the maximum over the sample grid.
    pub fn lp_norm(&self, p: &LebesgueExponent, spec: &QuadratureSpec) -> Result<f64> {
        self.lp_norm_in(p, Variable::Auto, spec)
    }

    pub fn lp_norm_in(&self, p: &LebesgueExponent, variable: Variable, spec: &QuadratureSpec) -> Result<f64> {
        if p.is_infinite() {
            let n = spec.nodes_for_radius(self.feature_radius()).max(4096);
            let m = (0..n)
                .map(|j| self.eval(TAU * j as f64 / n as f64).norm())
                .fold(0.0, f64::max);
            return Ok(m);
        }
        let pv = p.p();
        let res = self.circle_mean(None, variable, spec, |_, v| [v.norm().powf(pv)])?;
        Ok(res.value[0].powf(1.0 / pv))
    }

    /// Length of the closed curve `t ↦ f(e^{it})` as the limit of inscribed
    /// polygons, doubling from 64 vertices until the relative change is below `tol`.
    pub fn curve_length(&self, tol: f64) -> Result<f64> {
        if !self.is_continuous() {
            return Err(Error::Domain(
                "curve length needs a continuous boundary function".into(),
            ));
        }
        let polygon = |n: usize| -> f64 {
            let pts: Vec<Complex64> = (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect();
            let mut acc = CompensatedSum::new();
            for j in 0..n {
                acc.add((pts[(j + 1) % n] - pts[j]).norm());
            }
            acc.value()
        };
        let mut n = 64;
        let mut prev = polygon(n);
        while n < (1 << 22) {
            n *= 2;
            let cur = polygon(n);
            if (cur - prev).abs() <= tol * cur.abs().max(f64::MIN_POSITIVE) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::NotRectifiable { last: prev, vertices: n })
    }

    /// Largest chord ratio `|f(t1) - f(t2)| / |e^{it1} - e^{it2}|` over a
    /// uniform grid, doubled from `grid` (at least 256) until the relative
    /// change is below 1e-4 or 8192 points are reached. A lower bound.
    pub fn lipschitz_constant(&self, grid: usize) -> LipschitzEstimate {
        let ratio = |n: usize| -> f64 {
            let vals: Vec<Complex64> = (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect();
            let chord: Vec<f64> = (0..n)
                .map(|d| 2.0 * (PI * d as f64 / n as f64).sin().abs())
                .collect();
            let mut best = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = chord[j - i];
                    if c > 0.0 {
                        best = best.max((vals[i] - vals[j]).norm() / c);
                    }
                }
            }
            best
        };
        let mut n = grid.max(256).next_power_of_two();
        let mut trend = vec![(n, ratio(n))];
        while n < 8192 {
            n *= 2;
            let cur = ratio(n);
            let prev = trend.last().expect("nonempty").1;
            trend.push((n, cur));
            if (cur - prev).abs() <= 1e-4 * cur.abs() {
                break;
            }
        }
        let value = trend.iter().map(|x| x.1).fold(0.0, f64::max);
        LipschitzEstimate { value, trend }
    }

    /// Parses the boundary mini-language: `const:c`, `exp:k`,
    /// `trigpoly:seed,degree`, `extremal:kind,alpha,p,rho`,
    /// `sum:a+b[+...]` and `scale:a,spec`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest) = spec.split_once(':').ok_or_else(|| Error::Parse {
            token: spec.to_string(),
            message: "expected keyword:arguments".into(),
        })?;
        match head {
            "const" => {
                let parts: Vec<&str> = rest.split(',').collect();
                let re = parse_f64(parts[0])?;
                let im = if parts.len() > 1 { parse_f64(parts[1])? } else { 0.0 };
                if parts.len() > 2 {
                    return Err(Error::Parse {
                        token: rest.into(),
                        message: "const takes one or two numbers".into(),
                    });
                }
                Ok(Self::constant(Complex64::new(re, im)))
            }
            "exp" => {
                let k: i32 = rest.trim().parse().map_err(|_| Error::Parse {
                    token: rest.into(),
                    message: "exp needs an integer frequency".into(),
                })?;
                Ok(Self::exp(k))
            }
            "trigpoly" => {
                let (a, b) = rest.split_once(',').ok_or_else(|| Error::Parse {
                    token: rest.into(),
                    message: "trigpoly needs seed,degree".into(),
                })?;
                let seed: u64 = a.trim().parse().map_err(|_| Error::Parse {
                    token: a.into(),
                    message: "seed must be a nonnegative integer".into(),
                })?;
                let degree: u32 = b.trim().parse().map_err(|_| Error::Parse {
                    token: b.into(),
                    message: "degree must be a nonnegative integer".into(),
                })?;
                Ok(Self::trig_poly(seed, degree))
            }
            "extremal" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 4 {
                    return Err(Error::Parse {
                        token: rest.into(),
                        message: "extremal needs kind,alpha,p,rho".into(),
                    });
                }
                let kind = FamilyKind::parse(parts[0])?;
                let alpha = AlphaParam::new(parse_f64(parts[1])?)?;
                let p = LebesgueExponent::new(parse_f64(parts[2])?)?;
                let rho = parse_f64(parts[3])?;
                extremal_family(kind, &alpha, &p, rho)
            }
            "sum" => {
                let pieces = split_sum(rest);
                if pieces.len() < 2 {
                    return Err(Error::Parse {
                        token: rest.into(),
                        message: "sum needs at least two '+'-separated specs".into(),
                    });
                }
                let parts = pieces.iter().map(|p| Self::parse(p)).collect::<Result<Vec<_>>>()?;
                Ok(Self::sum(parts))
            }
            "scale" => {
                let (a, inner) = rest.split_once(',').ok_or_else(|| Error::Parse {
                    token: rest.into(),
                    message: "scale needs factor,spec".into(),
                })?;
                let a = parse_f64(a)?;
                Ok(Self::parse(inner)?.scaled(Complex64::new(a, 0.0)))
            }
            other => Err(Error::Parse {
                token: other.into(),
                message: "unknown boundary keyword".into(),
            }),
        }
    }
}

/// Node plan for a circle integral.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePlan {
    pub layout: Layout,
    pub n0: usize,
    pub map: Option<SubstitutionMap>,
}

/// Lipschitz lower bound with the grid refinement trend `(points, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate {
    pub value: f64,
    pub trend: Vec<(usize, f64)>,
}

const KEYWORDS: [&str; 6] = ["const:", "exp:", "trigpoly:", "extremal:", "sum:", "scale:"];

fn split_sum(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == '+' && KEYWORDS.iter().any(|k| s[i + 1..].starts_with(k)) {
            out.push(s[start..i].to_string());
            start = i + 1;
        }
    }
    out.push(s[start..].to_string());
    out
}

fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t {
        "inf" | "infinity" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| Error::Parse {
            token: t.into(),
            message: "not a number".into(),
        })?,
    };
    Ok(v)
}

/// The extremal boundary function `f_ρ` of the given family, centered at angle 0.
pub fn extremal_family(
    kind: FamilyKind,
    alpha: &AlphaParam,
    p: &LebesgueExponent,
    rho: f64,
) -> Result<BoundaryFunction> {
    if kind.needs_holder_exponent() && p.p() <= 1.0 {
        return Err(Error::Unsupported(format!(
            "family {kind} needs p > 1, got p = {}",
            p.p()
        )));
    }
    let map = SubstitutionMap::new(rho, 0.0)?;
    Ok(BoundaryFunction::from_shape(Shape::Extremal(Extremal::new(
        kind,
        alpha.alpha(),
        p.p(),
        map,
    ))))
}
