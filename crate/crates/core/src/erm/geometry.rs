use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallNorm {
    L2,
    /// ℓ∞ ball, i.e. an axis-aligned box of half-width `radius`.
    Box,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    pub norm: BallNorm,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64, norm: BallNorm) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid(format!("ball radius must be finite and nonnegative, got {radius}")));
        }
        Ok(Ball { center, radius, norm })
    }

    pub fn unit_l2(d: usize) -> Self {
        Ball {
            center: vec![0.0; d],
            radius: 1.0,
            norm: BallNorm::L2,
        }
    }

    /// The box `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Self {
        Ball {
            center: vec![0.5; d],
            radius: 0.5,
            norm: BallNorm::Box,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.norm {
            BallNorm::L2 => distance(x, &self.center) <= self.radius,
            BallNorm::Box => x
                .iter()
                .zip(&self.center)
                .all(|(xi, ci)| (xi - ci).abs() <= self.radius),
        }
    }

    /// Radius of the smallest Euclidean ball around the center containing this ball.
    pub fn l2_circumradius(&self) -> f64 {
        match self.norm {
            BallNorm::L2 => self.radius,
            BallNorm::Box => self.radius * (self.dim() as f64).sqrt(),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Euclidean projection onto `ball`: radial shrink for ℓ2 balls, coordinate
/// clamp for boxes. Points inside are returned unchanged.
pub fn project(theta: &[f64], ball: &Ball) -> Vec<f64> {
    match ball.norm {
        BallNorm::L2 => {
            let dist = distance(theta, &ball.center);
            if dist <= ball.radius {
                return theta.to_vec();
            }
            let mut scale = ball.radius / dist;
            loop {
                let y: Vec<f64> = theta
                    .iter()
                    .zip(&ball.center)
                    .map(|(t, c)| c + (t - c) * scale)
                    .collect();
                // Rounding can leave the shrunk point a hair outside.
                if ball.contains(&y) {
                    return y;
                }
                scale *= 1.0 - f64::EPSILON;
            }
        }
        BallNorm::Box => theta
            .iter()
            .zip(&ball.center)
            .map(|(t, c)| t.clamp(c - ball.radius, c + ball.radius))
            .collect(),
    }
}

/// The ℓp geometry used to measure Lipschitz constants and diameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Lp(f64),
    Infinity,
}

impl Geometry {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "inf" | "infinity" | "∞" => Ok(Geometry::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| invalid(format!("bad geometry {other:?}")))?;
                Geometry::lp(p)
            }
        }
    }

    pub fn lp(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Geometry::Infinity)
        } else if p >= 1.0 {
            Ok(Geometry::Lp(p))
        } else {
            Err(invalid(format!("geometry needs p >= 1, got {p}")))
        }
    }

    pub fn label(&self) -> String {
        match self {
            Geometry::Lp(p) => p.to_string(),
            Geometry::Infinity => "inf".to_string(),
        }
    }
}

/// Lipschitz constant `G = d^{1-1/p}` of the ℓ1 loss and the ℓp diameter
/// `C = d^{1/p}` of the unit cube, so that `G·C = d`.
pub fn lp_constants(d: usize, geometry: Geometry) -> Result<(f64, f64)> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let df = d as f64;
    match geometry {
        Geometry::Infinity => Ok((df, 1.0)),
        Geometry::Lp(1.0) => Ok((1.0, df)),
        Geometry::Lp(2.0) => {
            let s = df.sqrt();
            Ok((s, s))
        }
        Geometry::Lp(p) if p > 1.0 => Ok((df.powf(1.0 - 1.0 / p), df.powf(1.0 / p))),
        Geometry::Lp(p) => Err(invalid(format!("geometry needs p >= 1, got {p}"))),
    }
}

fn check_privacy(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `c0 · min(1, √(d ln(1/δ))/(nε)) · d` for the approximate-DP regime.
pub fn lower_bound_curve(n: usize, d: usize, epsilon: f64, delta: f64, c0: f64) -> Result<f64> {
    check_privacy(epsilon, delta)?;
    if !(c0 > 0.0) || n == 0 || d == 0 {
        return Err(invalid("lower bound curve needs n, d >= 1 and c0 > 0"));
    }
    let (n, d) = (n as f64, d as f64);
    let rate = ((d * (1.0 / delta).ln()).sqrt() / (n * epsilon)).min(1.0);
    Ok(c0 * rate * d)
}

/// `c0 · min(1, d/(nε)) · scale` for the pure-DP regime.
pub fn pure_lower_bound_curve(n: usize, d: usize, epsilon: f64, c0: f64, scale: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !(c0 > 0.0) || n == 0 || d == 0 {
        return Err(invalid("pure lower bound curve needs n, d >= 1, epsilon > 0, c0 > 0"));
    }
    Ok(c0 * (d as f64 / (n as f64 * epsilon)).min(1.0) * scale)
}

/// Default constant for the lower-bound curves.
pub const DEFAULT_C0: f64 = 0.01;
