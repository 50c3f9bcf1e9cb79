use super::dataset::Dataset;
use super::extension::{minimize_over_ball, LipschitzExtension, SolverOptions};
use super::geometry::{dot, lp_constants, norm2, Geometry};
use crate::error::{check_len, invalid, Error, Result};
use crate::exec;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `‖θ − z‖₁`.
pub fn l1_loss(theta: &[f64], z: &[f64]) -> Result<f64> {
    check_len(theta.len(), z.len())?;
    Ok(theta.iter().zip(z).map(|(t, v)| (t - v).abs()).sum())
}

const UNIT_SLACK: f64 = 1e-12;
const ANGLE_GRID: usize = 512;
const GOLDEN_TOL: f64 = 1e-13;

fn check_unit(z: &[f64]) -> Result<f64> {
    let nz = norm2(z);
    if nz > 1.0 + UNIT_SLACK {
        return Err(invalid(format!("extended linear loss needs ‖z‖₂ ≤ 1, got {nz}")));
    }
    Ok(nz)
}

/// Coordinates of `θ` and `z` in an orthonormal basis of `span{θ, z}` with
/// `θ` on the first axis: returns `(r, a, b)` with `θ = (r, 0)`, `z = (a, b)`, `b ≥ 0`.
fn planar_coordinates(theta: &[f64], z: &[f64]) -> (f64, f64, f64) {
    let r = norm2(theta);
    if r == 0.0 {
        return (0.0, norm2(z), 0.0);
    }
    let a = dot(z, theta) / r;
    let b = (dot(z, z) - a * a).max(0.0).sqrt();
    (r, a, b)
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimum of a smooth function over `[lo, hi]`: grid scan to bracket the
/// best point, then golden-section refinement inside the bracket.
fn scan_and_refine<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / ANGLE_GRID as f64;
    let (k, fk) = (0..=ANGLE_GRID)
        .map(|k| (k, f(lo + step * k as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let a = lo + step * k.saturating_sub(1) as f64;
    let b = (lo + step * (k + 1) as f64).min(hi);
    let (_, refined) = golden_section(&f, a, b);
    refined.min(fk)
}

/// Minimum of `−⟨y,z⟩ + ‖θ − y‖₂` over the unit circle of the plane.
fn boundary_minimum(r: f64, a: f64, b: f64) -> f64 {
    let g = |phi: f64| {
        let (s, c) = phi.sin_cos();
        -(a * c + b * s) + (r * r + 1.0 - 2.0 * r * c).max(0.0).sqrt()
    };
    scan_and_refine(g, 0.0, PI)
}

/// `ℓ(θ; z) = min_{‖y‖₂≤1} −⟨y, z⟩ + ‖θ − y‖₂` for `‖z‖₂ ≤ 1`.
///
/// Inside the unit ball this is `−⟨θ, z⟩`; for `z = 0` it is
/// `max(0, ‖θ‖₂ − 1)`. Otherwise `θ` is outside the ball, the minimum is
/// attained on the unit sphere, and only the circle in `span{θ, z}` matters.
pub fn extended_linear_loss(theta: &[f64], z: &[f64]) -> Result<f64> {
    check_len(theta.len(), z.len())?;
    let nz = check_unit(z)?;
    let r = norm2(theta);
    if r <= 1.0 {
        return Ok(-dot(theta, z));
    }
    if nz == 0.0 {
        return Ok(r - 1.0);
    }
    let (r, a, b) = planar_coordinates(theta, z);
    Ok(boundary_minimum(r, a, b))
}

/// Purely numerical evaluation of [`extended_linear_loss`]: the smaller of a
/// search over the unit circle of `span{θ, z}` and a golden-section search
/// along the chord through `θ` in direction `z` (or `θ`) inside the disk.
pub fn extended_linear_loss_search(theta: &[f64], z: &[f64]) -> Result<f64> {
    check_len(theta.len(), z.len())?;
    check_unit(z)?;
    let (r, a, b) = planar_coordinates(theta, z);
    let mut best = boundary_minimum(r, a, b);

    // Chord {θ + s·u : ‖θ + s·u‖ ≤ 1} in the plane.
    let (ux, uy) = if a == 0.0 && b == 0.0 { (1.0, 0.0) } else { (a, b) };
    let un = (ux * ux + uy * uy).sqrt();
    let (ux, uy) = (ux / un, uy / un);
    let proj = r * ux;
    let disc = proj * proj - (r * r - 1.0);
    if disc >= 0.0 {
        let (s_lo, s_hi) = (-proj - disc.sqrt(), -proj + disc.sqrt());
        let f = |s: f64| {
            let (y1, y2) = (r + s * ux, s * uy);
            -(a * y1 + b * y2) + ((r - y1).powi(2) + y2 * y2).sqrt()
        };
        let (_, v) = golden_section(f, s_lo, s_hi);
        best = best.min(v);
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub enum LossKind {
    L1,
    ExtendedLinear,
    Extension(LipschitzExtension),
}

/// A loss family with its Lipschitz constant in the chosen geometry.
#[derive(Clone, Debug)]
pub struct LossFamily {
    pub kind: LossKind,
    pub lipschitz_g: f64,
    pub geometry: Geometry,
}

impl LossFamily {
    /// ℓ1 loss on ℝᵈ, `d^{1−1/p}`-Lipschitz w.r.t. ℓp.
    pub fn l1(d: usize, geometry: Geometry) -> Result<Self> {
        let (g, _) = lp_constants(d, geometry)?;
        Ok(LossFamily {
            kind: LossKind::L1,
            lipschitz_g: g,
            geometry,
        })
    }

    /// Extended linear loss, 1-Lipschitz w.r.t. ℓ2.
    pub fn extended_linear() -> Self {
        LossFamily {
            kind: LossKind::ExtendedLinear,
            lipschitz_g: 1.0,
            geometry: Geometry::Lp(2.0),
        }
    }

    pub fn extension(ext: LipschitzExtension) -> Self {
        LossFamily {
            lipschitz_g: ext.lipschitz(),
            kind: LossKind::Extension(ext),
            geometry: Geometry::Lp(2.0),
        }
    }

    pub fn point_loss(&self, theta: &[f64], z: &[f64]) -> Result<f64> {
        match &self.kind {
            LossKind::L1 => l1_loss(theta, z),
            LossKind::ExtendedLinear => extended_linear_loss(theta, z),
            LossKind::Extension(ext) => ext.eval(theta, z),
        }
    }
}

/// `L(θ; D) = (1/n) Σ ℓ(θ; z_i)`.
pub fn empirical_loss(loss: &LossFamily, theta: &[f64], data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_len(data.dim(), theta.len())?;
    if let LossKind::L1 = loss.kind {
        return Ok(mean_l1_loss(theta, data));
    }
    let mut total = 0.0;
    for z in data.rows() {
        total += loss.point_loss(theta, z)?;
    }
    Ok(total / data.len() as f64)
}

fn mean_l1_loss(theta: &[f64], data: &Dataset) -> f64 {
    let per_row: f64 = data
        .rows()
        .map(|z| theta.iter().zip(z).map(|(t, v)| (t - v).abs()).sum::<f64>())
        .sum();
    per_row / data.len() as f64
}

/// Exact ℓ1 ERM: the coordinate-wise lower median (index `⌈n/2⌉ − 1` of each
/// sorted column).
pub fn l1_minimizer(data: &Dataset) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = data.len().div_ceil(2) - 1;
    Ok(exec::map_indexed(data.dim(), |j| {
        let mut col = data.column(j);
        let (_, median, _) = col.select_nth_unstable_by(k, f64::total_cmp);
        *median
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcessLossReport {
    pub loss_at_theta: f64,
    pub optimal_loss: f64,
    pub excess: f64,
    pub minimizer: Vec<f64>,
}

/// Slack allowed below zero for the excess of an exactly minimized loss.
pub const EXCESS_TOLERANCE: f64 = 1e-9;

/// Excess empirical loss against an exact or certified minimizer.
///
/// ℓ1 uses the coordinate-wise median. The extended linear loss is minimized
/// at `q/‖q‖` with `q` the mean point. A generic extension is minimized over
/// its domain, where it coincides with the base loss, to the solver's
/// certified tolerance.
pub fn excess_loss(loss: &LossFamily, theta: &[f64], data: &Dataset) -> Result<ExcessLossReport> {
    let loss_at_theta = empirical_loss(loss, theta, data)?;
    let minimizer = match &loss.kind {
        LossKind::L1 => l1_minimizer(data)?,
        LossKind::ExtendedLinear => {
            let q = data.mean()?;
            let nq = norm2(&q);
            if nq > 0.0 {
                q.iter().map(|v| v / nq).collect()
            } else {
                q
            }
        }
        LossKind::Extension(ext) => {
            let n = data.len() as f64;
            let oracle = |y: &[f64]| {
                let mut value = 0.0;
                let mut grad = vec![0.0; y.len()];
                for z in data.rows() {
                    value += ext.base().value(y, z) / n;
                    for (g, s) in grad.iter_mut().zip(ext.base().subgradient(y, z)) {
                        *g += s / n;
                    }
                }
                (value, grad)
            };
            minimize_over_ball(ext.domain(), oracle, SolverOptions::default())?.point
        }
    };
    let optimal_loss = empirical_loss(loss, &minimizer, data)?;
    Ok(ExcessLossReport {
        loss_at_theta,
        optimal_loss,
        excess: loss_at_theta - optimal_loss,
        minimizer,
    })
}
