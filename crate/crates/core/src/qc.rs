//! Quasiconformality of `u = P_α[f]` on a sampled disk grid: Beltrami
//! coefficient, maximal dilatation, circle integrals of `|∂u|` and `|∂̄u|`, and
//! the length and Lipschitz bounds that depend on them.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};
use crate::extension::{kernel_mean, partials, AlphaParam, DiskPoint, Partials};
use crate::harness::VerificationRecord;
use crate::quad::{QuadratureError, QuadratureSpec};

/// Radii of the default disk grid.
pub const QC_RADII: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
/// Angles per radius on the default disk grid.
pub const QC_ANGLES: usize = 512;

/// Below this both derivatives count as zero and the point is skipped.
const DEGENERATE: f64 = 1e-12;

const LIMITATION: &str =
    "K estimated on the disk grid; injectivity checked only as |u_z| > |u_zbar| at grid points";

/// Rectangular polar sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            radii: QC_RADII.to_vec(),
            angles: QC_ANGLES,
        }
    }
}

impl DiskGrid {
    /// Default grid with `extra` radii merged in (sorted, deduplicated).
    pub fn with_radii(extra: &[f64]) -> Self {
        let mut radii = QC_RADII.to_vec();
        radii.extend_from_slice(extra);
        radii.sort_by(|a, b| a.total_cmp(b));
        radii.dedup();
        Self { radii, angles: QC_ANGLES }
    }

    fn points(&self) -> Result<Vec<DiskPoint>> {
        let mut out = Vec::with_capacity(self.radii.len() * self.angles);
        for &r in &self.radii {
            for j in 0..self.angles {
                out.push(DiskPoint::new(r, TAU * j as f64 / self.angles as f64)?);
            }
        }
        Ok(out)
    }
}

/// Partials at every grid point, in (r, θ) order.
#[derive(Debug, Clone)]
pub struct DiskSamples {
    pub points: Vec<DiskPoint>,
    pub partials: Vec<Partials>,
    pub nodes: usize,
}

pub fn sample_disk(alpha: &AlphaParam, f: &BoundaryFunction, grid: &DiskGrid, spec: &QuadratureSpec) -> Result<DiskSamples> {
    let points = grid.points()?;
    let mut out = Vec::with_capacity(points.len());
    let mut nodes = 0;
    for z in &points {
        let p = partials(alpha, f, z, spec)?;
        nodes += p.nodes;
        out.push(p);
    }
    Ok(DiskSamples {
        points,
        partials: out,
        nodes,
    })
}

/// `μ = u_z̄ / u_z`.
pub fn beltrami(alpha: &AlphaParam, f: &BoundaryFunction, z: &DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
    let p = partials(alpha, f, z, spec)?;
    if p.u_z.norm() <= DEGENERATE {
        return Err(Error::Degenerate {
            r: z.r(),
            theta: z.theta(),
            dz: p.u_z.norm(),
        });
    }
    Ok(p.u_zbar / p.u_z)
}

/// Maximal dilatation observed on a disk grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QcProfile {
    /// `K = (1 + μ_max)/(1 - μ_max)`.
    pub k: f64,
    pub mu_max: f64,
    pub radii: Vec<f64>,
    pub angles: usize,
    /// Where `|μ|` is largest.
    pub worst: DiskPoint,
}

impl QcProfile {
    /// Fails if `u_z` vanishes while `u_z̄` does not, or if `|μ| >= 1` anywhere.
    /// Points where both derivatives vanish (locally constant `u`) are skipped.
    pub fn from_samples(samples: &DiskSamples, grid: &DiskGrid) -> Result<Self> {
        let mut mu_max = 0.0f64;
        let mut worst = samples.points.first().copied().unwrap_or(DiskPoint::new(0.0, 0.0)?);
        for (z, p) in samples.points.iter().zip(&samples.partials) {
            let (dz, dzb) = (p.u_z.norm(), p.u_zbar.norm());
            if dz <= DEGENERATE && dzb <= DEGENERATE {
                continue;
            }
            if dz <= DEGENERATE {
                return Err(Error::Degenerate {
                    r: z.r(),
                    theta: z.theta(),
                    dz,
                });
            }
            let mu = dzb / dz;
            if mu >= 1.0 {
                return Err(Error::NotQuasiconformal {
                    mu,
                    r: z.r(),
                    theta: z.theta(),
                });
            }
            if mu > mu_max {
                mu_max = mu;
                worst = *z;
            }
        }
        Ok(Self {
            k: (1.0 + mu_max) / (1.0 - mu_max),
            mu_max,
            radii: grid.radii.clone(),
            angles: grid.angles,
            worst,
        })
    }

    pub fn new(alpha: &AlphaParam, f: &BoundaryFunction, grid: &DiskGrid, spec: &QuadratureSpec) -> Result<Self> {
        Self::from_samples(&sample_disk(alpha, f, grid, spec)?, grid)
    }
}

/// `(∫_{T_r}|u_z||dz|, ∫_{T_r}|u_z̄||dz|, nodes)` by a doubling angle rule.
pub fn circle_partial_integrals(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64, usize)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1), got {r}")));
    }
    let tol = spec.tol().max(1e-9);
    let eval = |theta: f64| -> Result<(f64, f64, usize)> {
        let p = partials(alpha, f, &DiskPoint::new(r, theta)?, spec)?;
        Ok((p.u_z.norm(), p.u_zbar.norm(), p.nodes))
    };
    let mut n = 64usize;
    let (mut sz, mut szb, mut nodes) = (0.0, 0.0, 0usize);
    for j in 0..n {
        let (a, b, k) = eval(TAU * j as f64 / n as f64)?;
        sz += a;
        szb += b;
        nodes += k;
    }
    let mut prev = [sz / n as f64, szb / n as f64];
    for _ in 0..8 {
        let n2 = 2 * n;
        for j in (1..n2).step_by(2) {
            let (a, b, k) = eval(TAU * j as f64 / n2 as f64)?;
            sz += a;
            szb += b;
            nodes += k;
        }
        n = n2;
        let cur = [sz / n as f64, szb / n as f64];
        let scale = cur[0].max(cur[1]).max(f64::MIN_POSITIVE);
        if (cur[0] - prev[0]).abs() <= tol * scale && (cur[1] - prev[1]).abs() <= tol * scale {
            return Ok((TAU * r * cur[0], TAU * r * cur[1], nodes));
        }
        prev = cur;
    }
    Err(Error::Quadrature(QuadratureError::NoConvergence {
        last: prev.to_vec(),
        previous: prev.to_vec(),
        nodes,
    }))
}

/// Tolerance used by every check in this module.
pub fn qc_tol(rhs: f64) -> f64 {
    1e-6 * rhs.abs().max(1.0)
}

/// No two of `n` boundary samples coincide (to 1e-12).
pub fn injective_on_grid(f: &BoundaryFunction, n: usize) -> bool {
    let vals: Vec<Complex64> = (0..n).map(|j| f.eval(TAU * j as f64 / n as f64)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (vals[i] - vals[j]).norm() <= 1e-12 {
                return false;
            }
        }
    }
    true
}

fn not_qc_record(theorem: &str, alpha: &AlphaParam, f: &BoundaryFunction, err: &Error) -> VerificationRecord {
    VerificationRecord::failed(theorem, alpha.alpha(), None, None, f.label(), format!("{err}"))
}

/// Length bounds for quasiconformal `u`: for each `r`,
/// `∫|∂u||dz| <= (K+1)/2 · kernel_mean · |γ|` (1.9-a),
/// `∫|∂̄u||dz| <= (K-1)/2 · kernel_mean · |γ|` (1.9-b),
/// the same with `kernel_mean` replaced by 1 (`-sup`), and the dilatation
/// chain `∫(|∂u|+|∂̄u|) <= K ∫(|∂u|-|∂̄u|)`.
pub fn verify_thm19(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    r_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<VerificationRecord>> {
    let start = Instant::now();
    if !injective_on_grid(f, 1024) {
        return Ok(vec![VerificationRecord::failed(
            "1.9",
            alpha.alpha(),
            None,
            None,
            f.label(),
            "boundary function is not injective on the 1024-point grid".into(),
        )]);
    }
    let gamma = f.curve_length(1e-10)?;
    let grid = DiskGrid::with_radii(r_grid);
    let profile = match QcProfile::new(alpha, f, &grid, spec) {
        Ok(p) => p,
        Err(e @ (Error::NotQuasiconformal { .. } | Error::Degenerate { .. })) => {
            return Ok(vec![not_qc_record("1.9", alpha, f, &e)]);
        }
        Err(e) => return Err(e),
    };
    let k = profile.k;
    let notes = format!("K={k:.9}; |gamma|={gamma:.12}; {LIMITATION}");
    let mut out = Vec::new();
    for &r in r_grid {
        let (idz, idzb, nodes) = circle_partial_integrals(alpha, f, r, spec)?;
        let km = kernel_mean(alpha, r)?;
        let elapsed = start.elapsed().as_secs_f64();
        let mut push = |id: &str, lhs: f64, rhs: f64| {
            out.push(VerificationRecord::new(
                id,
                alpha.alpha(),
                None,
                Some(r),
                f.label(),
                lhs,
                rhs,
                qc_tol(rhs),
                nodes,
                elapsed,
                notes.clone(),
            ));
        };
        push("1.9-a", idz, (k + 1.0) / 2.0 * km * gamma);
        push("1.9-b", idzb, (k - 1.0) / 2.0 * km * gamma);
        push("1.9-a-sup", idz, (k + 1.0) / 2.0 * gamma);
        push("1.9-b-sup", idzb, (k - 1.0) / 2.0 * gamma);
        push("1.9-chain", idz + idzb, k * (idz - idzb));
    }
    Ok(out)
}

/// Lipschitz bounds for quasiconformal `u`: over the disk grid,
/// `sup|z ∂u| <= (K+1)/2 · L` (1.10-a), `sup|z̄ ∂̄u| <= (K-1)/2 · L` (1.10-b),
/// and pointwise `|z ∂u - z̄ ∂̄u| <= L · kernel_mean(r)` (1.10-chain, worst point).
pub fn verify_thm110(
    alpha: &AlphaParam,
    f: &BoundaryFunction,
    grid: &DiskGrid,
    spec: &QuadratureSpec,
) -> Result<Vec<VerificationRecord>> {
    let start = Instant::now();
    let lip = f.lipschitz_constant(256).value;
    let samples = sample_disk(alpha, f, grid, spec)?;
    let profile = match QcProfile::from_samples(&samples, grid) {
        Ok(p) => p,
        Err(e @ (Error::NotQuasiconformal { .. } | Error::Degenerate { .. })) => {
            return Ok(vec![not_qc_record("1.10", alpha, f, &e)]);
        }
        Err(e) => return Err(e),
    };
    let k = profile.k;
    let (mut sup_a, mut sup_b) = (0.0f64, 0.0f64);
    let mut chain: Option<(f64, f64, f64)> = None;
    for (z, p) in samples.points.iter().zip(&samples.partials) {
        let zz = z.z();
        let a = zz * p.u_z;
        let b = zz.conj() * p.u_zbar;
        sup_a = sup_a.max(a.norm());
        sup_b = sup_b.max(b.norm());
        let lhs = (a - b).norm();
        let rhs = lip * kernel_mean(alpha, z.r())?;
        let worse = match chain {
            None => true,
            Some((l, r, _)) => lhs - rhs > l - r,
        };
        if worse {
            chain = Some((lhs, rhs, z.r()));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let notes = format!("K={k:.9}; L={lip:.12}; {LIMITATION}");
    let rec = |id: &str, r: Option<f64>, lhs: f64, rhs: f64| {
        VerificationRecord::new(
            id,
            alpha.alpha(),
            None,
            r,
            f.label(),
            lhs,
            rhs,
            qc_tol(rhs),
            samples.nodes,
            elapsed,
            notes.clone(),
        )
    };
    let (cl, cr, cr_r) = chain.unwrap_or((0.0, 0.0, 0.0));
    Ok(vec![
        rec("1.10-a", None, sup_a, (k + 1.0) / 2.0 * lip),
        rec("1.10-b", None, sup_b, (k - 1.0) / 2.0 * lip),
        rec("1.10-chain", Some(cr_r), cl, cr),
    ])
}
