//! Circle and interval quadrature.
//!
//! Smooth periodic integrands use the composite trapezoid rule with node
//! doubling. Integrands with declared breakpoints are split into panels, each
//! handled by a tanh-sinh rule (itself a trapezoid rule in a transformed
//! variable), again refined by halving the step.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge with {nodes} nodes: last {last:?}, previous {previous:?}")]
    NoConvergence {
        last: Vec<f64>,
        previous: Vec<f64>,
        nodes: usize,
    },
    #[error("invalid quadrature specification: {0}")]
    InvalidSpec(String),
}

/// Refinement parameters shared by every adaptive rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    initial_nodes: usize,
    max_doublings: u32,
    tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            initial_nodes: 256,
            max_doublings: 10,
            tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn new(initial_nodes: usize, max_doublings: u32, tol: f64) -> Result<Self, QuadratureError> {
        if initial_nodes < 16 || initial_nodes % 16 != 0 || !(initial_nodes / 16).is_power_of_two() {
            return Err(QuadratureError::InvalidSpec(format!(
                "initial_nodes must be 16 times a power of two, got {initial_nodes}"
            )));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(QuadratureError::InvalidSpec(format!("tol must be positive, got {tol}")));
        }
        Ok(Self {
            initial_nodes,
            max_doublings,
            tol,
        })
    }

    pub fn with_tol(tol: f64) -> Result<Self, QuadratureError> {
        let d = Self::default();
        Self::new(d.initial_nodes, d.max_doublings, tol)
    }

    pub fn initial_nodes(&self) -> usize {
        self.initial_nodes
    }
    pub fn max_doublings(&self) -> u32 {
        self.max_doublings
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Starting node count for an integrand whose sharpest feature has width
    /// about `1 - r`.
    pub fn nodes_for_radius(&self, r: f64) -> usize {
        let gap = (1.0 - r).max(1e-12);
        let need = (64.0 / gap).ceil().min(1e9) as usize;
        need.max(self.initial_nodes).next_power_of_two()
    }
}

/// How the circle `[0, 2π)` is split for integration.
#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Periodic,
    /// Sorted breakpoints in `[0, 2π)`; panels run between consecutive
    /// breakpoints, with the last panel wrapping around.
    Panels(Vec<f64>),
}

impl Layout {
    /// Builds a layout from arbitrary breakpoint angles, reducing them to
    /// `[0, 2π)` and merging near-duplicates.
    pub fn from_breakpoints(points: &[f64]) -> Self {
        let mut b: Vec<f64> = points.iter().map(|x| x.rem_euclid(TAU)).collect();
        b.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        if b.len() > 1 && (b[0] + TAU - b[b.len() - 1]) < 1e-14 {
            b.pop();
        }
        if b.is_empty() {
            Layout::Periodic
        } else {
            Layout::Panels(b)
        }
    }

    fn panels(&self) -> Vec<(f64, f64)> {
        match self {
            Layout::Periodic => vec![],
            Layout::Panels(b) => {
                let n = b.len();
                (0..n)
                    .map(|i| {
                        let a = b[i];
                        let e = if i + 1 < n { b[i + 1] } else { b[0] + TAU };
                        (a, e)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanResult<const K: usize> {
    pub value: [f64; K],
    pub nodes: usize,
    pub level: u32,
}

// nodes reach about 1e-136 from the endpoints: enough for |x|^{-0.9}, and
// their squares stay normal
const TS_TMAX: f64 = 5.3;

/// Tanh-sinh node for `v` on `[a, b]`: returns `(x, weight)` where the
/// weight already contains `(b - a)/2` and the transformation derivative.
#[inline]
fn tanh_sinh_node(a: f64, b: f64, v: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let u = FRAC_PI_2 * v.sinh();
    let ch = u.cosh();
    // distance from the nearer endpoint, computed without cancellation
    let dist = half * (-u.abs()).exp() / ch;
    let x = if v < 0.0 { a + dist } else { b - dist };
    let w = half * FRAC_PI_2 * v.cosh() / (ch * ch);
    (x, w)
}

struct PanelRule {
    panels: Vec<(f64, f64)>,
    half_steps: usize,
}

impl PanelRule {
    fn new(panels: Vec<(f64, f64)>, n0: usize) -> Self {
        let longest = panels.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
        // steps on each half-line of the transformed variable
        let per = ((n0 as f64) * longest / PI).ceil().max(16.0) as usize;
        Self {
            panels,
            half_steps: (per / 2).max(8).next_power_of_two(),
        }
    }

    fn h(&self, level: u32) -> f64 {
        TS_TMAX / (self.half_steps as f64 * f64::from(1u32 << level.min(30)))
    }

    /// Accumulates the integrand over the nodes that are new at `level`
    /// (all nodes when level = 0). Returns the raw weighted sum (without the
    /// step factor) and the number of evaluations.
    fn accumulate<const K: usize, F: Fn(f64) -> [f64; K]>(&self, level: u32, f: &F, acc: &mut [f64; K]) -> usize {
        let h = self.h(level);
        let jmax = self.half_steps << level;
        let stride = if level == 0 { 1 } else { 2 };
        let start = if level == 0 { 0 } else { 1 };
        let mut count = 0;
        for &(a, b) in &self.panels {
            let mut j = start;
            while j <= jmax {
                let v = j as f64 * h;
                for sv in if j == 0 { [v, f64::NAN] } else { [v, -v] } {
                    if sv.is_nan() {
                        continue;
                    }
                    let (x, w) = tanh_sinh_node(a, b, sv);
                    if w == 0.0 || x <= a || x >= b {
                        continue;
                    }
                    let y = f(x);
                    count += 1;
                    for k in 0..K {
                        acc[k] += w * y[k];
                    }
                }
                j += stride;
            }
        }
        count
    }
}

fn converged<const K: usize>(prev: &[f64; K], cur: &[f64; K], tol: f64) -> bool {
    let scale = cur.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    prev.iter().zip(cur).all(|(p, c)| (p - c).abs() <= tol * scale)
}

/// Adaptive mean `(1/2π) ∫_0^{2π} f(t) dt` of a vector-valued integrand.
pub fn mean_adaptive<const K: usize, F: Fn(f64) -> [f64; K]>(
    layout: &Layout,
    n0: usize,
    spec: &QuadratureSpec,
    f: F,
) -> Result<MeanResult<K>, QuadratureError> {
    let n0 = n0.max(16).next_power_of_two();
    match layout {
        Layout::Periodic => {
            let mut sum = [0.0; K];
            let mut n = n0;
            for j in 0..n {
                let y = f(TAU * j as f64 / n as f64);
                for k in 0..K {
                    sum[k] += y[k];
                }
            }
            let mut prev = sum.map(|s| s / n as f64);
            let mut older = prev;
            for level in 1..=spec.max_doublings {
                let n2 = 2 * n;
                for j in (1..n2).step_by(2) {
                    let y = f(TAU * j as f64 / n2 as f64);
                    for k in 0..K {
                        sum[k] += y[k];
                    }
                }
                n = n2;
                let cur = sum.map(|s| s / n as f64);
                if converged(&prev, &cur, spec.tol) {
                    return Ok(MeanResult { value: cur, nodes: n, level });
                }
                older = prev;
                prev = cur;
            }
            Err(QuadratureError::NoConvergence {
                last: prev.to_vec(),
                previous: older.to_vec(),
                nodes: n,
            })
        }
        Layout::Panels(_) => {
            let rule = PanelRule::new(layout.panels(), n0);
            integrate_rule(&rule, spec, &f).map(|(v, nodes, level)| MeanResult {
                value: v.map(|x| x / TAU),
                nodes,
                level,
            })
        }
    }
}

fn integrate_rule<const K: usize, F: Fn(f64) -> [f64; K]>(
    rule: &PanelRule,
    spec: &QuadratureSpec,
    f: &F,
) -> Result<([f64; K], usize, u32), QuadratureError> {
    let mut raw = [0.0; K];
    let mut nodes = rule.accumulate(0, f, &mut raw);
    let mut prev = raw.map(|s| s * rule.h(0));
    let mut last_prev = prev;
    for level in 1..=spec.max_doublings {
        nodes += rule.accumulate(level, f, &mut raw);
        let cur = raw.map(|s| s * rule.h(level));
        if converged(&prev, &cur, spec.tol) {
            return Ok((cur, nodes, level));
        }
        last_prev = prev;
        prev = cur;
    }
    Err(QuadratureError::NoConvergence {
        last: prev.to_vec(),
        previous: last_prev.to_vec(),
        nodes,
    })
}

/// Non-adaptive mean at a fixed refinement level. The node set depends only
/// on `(layout, n0, level)`, so sums at different parameters share nodes.
pub fn mean_at_level<const K: usize, F: Fn(f64) -> [f64; K]>(
    layout: &Layout,
    n0: usize,
    level: u32,
    f: F,
) -> [f64; K] {
    let n0 = n0.max(16).next_power_of_two();
    match layout {
        Layout::Periodic => {
            let n = n0 << level;
            let mut sum = [0.0; K];
            for j in 0..n {
                let y = f(TAU * j as f64 / n as f64);
                for k in 0..K {
                    sum[k] += y[k];
                }
            }
            sum.map(|s| s / n as f64)
        }
        Layout::Panels(_) => {
            let rule = PanelRule::new(layout.panels(), n0);
            let mut raw = [0.0; K];
            for l in 0..=level {
                rule.accumulate(l, &f, &mut raw);
            }
            raw.map(|s| s * rule.h(level) / TAU)
        }
    }
}

/// Adaptive integral over `[a, b]` split at interior `breaks`; tolerates
/// integrable endpoint singularities. Nodes closer to `b` than its spacing in
/// floating point are dropped, so a strong singularity belongs at `a = 0`,
/// where the nodes are exact.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
    f: F,
) -> Result<f64, QuadratureError> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    pts.extend(inner);
    pts.push(b);
    let panels: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).filter(|(x, y)| y > x).collect();
    let rule = PanelRule::new(panels, spec.initial_nodes());
    integrate_rule(&rule, spec, &|x| [f(x)]).map(|(v, _, _)| v[0])
}
