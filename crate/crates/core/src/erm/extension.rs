//! Convex Lipschitz extension `f̃(x) = min_{y∈K} f(y) + G‖x − y‖₂` of a loss
//! defined on a ball `K`, evaluated with the central-cut ellipsoid method.
//!
//! The ellipsoid method needs only values and subgradients, handles the
//! nonsmooth distance term, and carries its own optimality certificate: at a
//! feasible center `c` with subgradient `g` and shape matrix `P`, the minimum
//! is at least `f(c) − √(gᵀPg)`.

use super::geometry::{dot, norm2, project, Ball, BallNorm};
use crate::error::{check_len, invalid, Error, Result};
use std::sync::Arc;

/// A per-point loss `ℓ(θ; z)` that is convex in `θ`.
pub trait ConvexLoss: Send + Sync {
    fn value(&self, theta: &[f64], z: &[f64]) -> f64;
    fn subgradient(&self, theta: &[f64], z: &[f64]) -> Vec<f64>;
}

/// `ℓ(θ; z) = −⟨θ, z⟩`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinearLoss;

impl ConvexLoss for LinearLoss {
    fn value(&self, theta: &[f64], z: &[f64]) -> f64 {
        -dot(theta, z)
    }
    fn subgradient(&self, _theta: &[f64], z: &[f64]) -> Vec<f64> {
        z.iter().map(|v| -v).collect()
    }
}

/// `ℓ(θ; z) = ‖θ − z‖₁`.
#[derive(Clone, Copy, Debug, Default)]
pub struct AbsoluteLoss;

impl ConvexLoss for AbsoluteLoss {
    fn value(&self, theta: &[f64], z: &[f64]) -> f64 {
        theta.iter().zip(z).map(|(t, v)| (t - v).abs()).sum()
    }
    fn subgradient(&self, theta: &[f64], z: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(z)
            .map(|(t, v)| match t.partial_cmp(v) {
                Some(std::cmp::Ordering::Greater) => 1.0,
                Some(std::cmp::Ordering::Less) => -1.0,
                _ => 0.0,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Stop once the certified optimality gap drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-9,
            max_iterations: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Certified upper bound on `value − min`.
    pub gap: f64,
    pub iterations: usize,
}

/// Minimizes a convex function over `domain` given a value/subgradient oracle.
///
/// Fails with [`Error::NonConvergence`] if the certified gap is still above
/// the tolerance after the iteration budget.
pub fn minimize_over_ball<F>(domain: &Ball, oracle: F, opts: SolverOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = domain.dim();
    if n == 0 {
        return Err(invalid("cannot minimize over a zero-dimensional domain"));
    }
    if n == 1 {
        return bisect_interval(domain, oracle, opts);
    }
    let nf = n as f64;
    let r = domain.l2_circumradius();
    let mut c = domain.center.clone();
    // The ellipsoid is {c + Bu : ‖u‖ ≤ 1}; updating B rather than P = BBᵀ
    // keeps the shape positive semidefinite under rounding.
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        b[i * n + i] = r;
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut gap = f64::INFINITY;
    // Every ellipsoid contains a minimizer, so `f(c) − ‖Bᵀg‖` at any
    // evaluated center is a lower bound on the minimum.
    let mut lower = f64::NEG_INFINITY;
    let mut h = vec![0.0; n];
    let mut bh = vec![0.0; n];
    let stretch = nf / (nf * nf - 1.0).sqrt();
    let along = nf / (nf + 1.0);

    for it in 0..opts.max_iterations {
        let (g, value_at_center) = match infeasibility_cut(domain, &c) {
            Some(g) => (g, None),
            None => {
                let (v, g) = oracle(&c);
                if best.as_ref().is_none_or(|(_, b)| v < *b) {
                    best = Some((c.clone(), v));
                }
                (g, Some(v))
            }
        };
        for (j, hj) in h.iter_mut().enumerate() {
            *hj = (0..n).map(|i| b[i * n + j] * g[i]).sum();
        }
        let width = norm2(&h);
        if let Some(v) = value_at_center {
            lower = lower.max(v - width);
            gap = best.as_ref().map_or(f64::INFINITY, |b| b.1) - lower;
            if gap <= opts.tolerance || width == 0.0 {
                let (point, value) = best.expect("feasible center evaluated");
                return Ok(Minimum {
                    point,
                    value,
                    gap: gap.max(0.0),
                    iterations: it + 1,
                });
            }
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::NonConvergence {
                iterations: it + 1,
                residual: gap,
            });
        }
        for hj in h.iter_mut() {
            *hj /= width;
        }
        for (i, bhi) in bh.iter_mut().enumerate() {
            *bhi = dot(&b[i * n..(i + 1) * n], &h);
        }
        for i in 0..n {
            c[i] -= bh[i] / (nf + 1.0);
            for j in 0..n {
                b[i * n + j] = stretch * b[i * n + j] + (along - stretch) * bh[i] * h[j];
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: gap,
    })
}

fn infeasibility_cut(domain: &Ball, c: &[f64]) -> Option<Vec<f64>> {
    match domain.norm {
        BallNorm::L2 => {
            let diff: Vec<f64> = c.iter().zip(&domain.center).map(|(a, b)| a - b).collect();
            let dist = norm2(&diff);
            (dist > domain.radius).then(|| diff.into_iter().map(|v| v / dist).collect())
        }
        BallNorm::Box => {
            let (j, excess) = c
                .iter()
                .zip(&domain.center)
                .map(|(a, b)| a - b)
                .enumerate()
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
            (excess.abs() > domain.radius).then(|| {
                let mut g = vec![0.0; c.len()];
                g[j] = excess.signum();
                g
            })
        }
    }
}

/// One-dimensional case: bisection on the sign of the subgradient.
fn bisect_interval<F>(domain: &Ball, oracle: F, opts: SolverOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let (mut lo, mut hi) = (domain.center[0] - domain.radius, domain.center[0] + domain.radius);
    let mut best = (vec![lo], f64::INFINITY);
    for it in 0..opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        let (v, g) = oracle(&[mid]);
        if v < best.1 {
            best = (vec![mid], v);
        }
        let gap = g[0].abs() * (hi - lo) / 2.0;
        if gap <= opts.tolerance || hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
            for x in [lo, hi] {
                let (v, _) = oracle(&[x]);
                if v < best.1 {
                    best = (vec![x], v);
                }
            }
            return Ok(Minimum {
                point: best.0,
                value: best.1,
                gap,
                iterations: it + 1,
            });
        }
        if g[0] > 0.0 {
            hi = mid;
        } else if g[0] < 0.0 {
            lo = mid;
        } else {
            return Ok(Minimum {
                point: vec![mid],
                value: v,
                gap: 0.0,
                iterations: it + 1,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: hi - lo,
    })
}

/// Evaluator for the Lipschitz extension of a convex loss from `domain` to ℝᵈ.
#[derive(Clone)]
pub struct LipschitzExtension {
    base: Arc<dyn ConvexLoss>,
    domain: Ball,
    lipschitz: f64,
    opts: SolverOptions,
}

impl std::fmt::Debug for LipschitzExtension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LipschitzExtension")
            .field("domain", &self.domain)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

/// The caller is responsible for `base` being convex and `lipschitz`-Lipschitz
/// on `domain`; outside those assumptions the evaluator still returns the
/// inf-convolution but it need not agree with `base` on `domain`.
pub fn lipschitz_extension(base: Arc<dyn ConvexLoss>, domain: Ball, lipschitz: f64) -> Result<LipschitzExtension> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(invalid(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    Ok(LipschitzExtension {
        base,
        domain,
        lipschitz,
        opts: SolverOptions::default(),
    })
}

impl LipschitzExtension {
    pub fn with_options(mut self, opts: SolverOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn domain(&self) -> &Ball {
        &self.domain
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn base(&self) -> &dyn ConvexLoss {
        self.base.as_ref()
    }

    /// `f̃(x) = min_{y∈K} base(y; z) + G‖x − y‖₂`.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        Ok(self.solve(x, z)?.value)
    }

    pub fn solve(&self, x: &[f64], z: &[f64]) -> Result<Minimum> {
        check_len(self.domain.dim(), x.len())?;
        let g = self.lipschitz;
        let oracle = |y: &[f64]| {
            let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
            let dist = norm2(&diff);
            let mut sub = self.base.subgradient(y, z);
            if dist > 0.0 {
                for (s, d) in sub.iter_mut().zip(&diff) {
                    *s += g * d / dist;
                }
            }
            (self.base.value(y, z) + g * dist, sub)
        };
        let mut best = minimize_over_ball(&self.domain, oracle, self.opts)?;
        // The projection is always feasible; keep it if it happens to be better.
        let proj = project(x, &self.domain);
        let (v, _) = oracle(&proj);
        if v < best.value {
            best.point = proj;
            best.value = v;
        }
        Ok(best)
    }
}
