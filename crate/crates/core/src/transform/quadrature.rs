//! Volume quadrature of the defining integral.
//!
//! Each body is sliced along its last coordinate: the innermost integral of
//! `cos(2π ξ_d x_d)` over a symmetric chord is done exactly, and the remaining
//! one or two coordinates use Gauss–Legendre rules on a parameterization of
//! the projected region. For symmetric bodies the sine part cancels, so only
//! the cosine kernel is integrated.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::{Body, Shape};
use crate::special::{gauss_legendre, sin_ratio};
use crate::vecmath::norm;

/// Smallest accepted number of nodes per parameter.
pub const MIN_QUADRATURE_RESOLUTION: usize = 32;

fn check(body: &Body, xi: &[f64], n: usize) -> Result<()> {
    if xi.len() != body.dim() {
        return Err(Error::domain(format!(
            "expected a {}-vector, got length {}",
            body.dim(),
            xi.len()
        )));
    }
    if body.dim() > 3 {
        return Err(Error::MethodUnavailable {
            method: "quadrature",
            reason: format!("volume quadrature supports d <= 3, got d = {}", body.dim()),
        });
    }
    if n < MIN_QUADRATURE_RESOLUTION {
        return Err(Error::Resolution(format!(
            "quadrature needs at least {MIN_QUADRATURE_RESOLUTION} nodes per parameter, got {n}"
        )));
    }
    Ok(())
}

/// Volume-quadrature value of the transform with `n` nodes per parameter.
pub fn chi_hat_quadrature(body: &Body, xi: &[f64], n: usize) -> Result<f64> {
    check(body, xi, n)?;
    Ok(match (body.dim(), body.shape()) {
        (2, Shape::Ball { radius }) => ellipse(*radius, *radius, xi, n),
        (2, Shape::Ellipsoid { axes }) => ellipse(axes[0], axes[1], xi, n),
        (2, Shape::Cube { half_side }) => square(*half_side, xi, n),
        (2, Shape::RoundedSquare { half_side, rho }) => rounded_square(*half_side, *rho, xi, n),
        (3, Shape::Ball { radius }) => ellipsoid3([*radius; 3], xi, n),
        (3, Shape::Ellipsoid { axes }) => ellipsoid3([axes[0], axes[1], axes[2]], xi, n),
        (3, Shape::Cube { half_side }) => cube3(*half_side, xi, n),
        _ => unreachable!("validated body"),
    })
}

/// Node count that resolves the oscillation of every slice integrand at `ξ`.
///
/// Gauss–Legendre integrates `e^{ikt}` on `[-1, 1]` to near machine precision
/// once `2n` comfortably exceeds `k`; the factor 0.65 and the offset leave
/// that margin.
pub fn auto_resolution(body: &Body, xi: &[f64]) -> usize {
    let k = match body.shape() {
        Shape::Ball { radius } => 2.0 * PI * radius * xi.iter().map(|v| v.abs()).sum::<f64>() * FRAC_PI_2,
        Shape::Ellipsoid { axes } => {
            2.0 * PI * axes.iter().zip(xi).map(|(a, v)| a * v.abs()).sum::<f64>() * FRAC_PI_2
        }
        Shape::Cube { half_side } => 2.0 * PI * half_side * xi.iter().map(|v| v.abs()).sum::<f64>(),
        // The cap phase 2πρ(ξ₁ sin φ + ξ₂ cos φ) oscillates at rate 2πρ|ξ| over a quarter turn.
        Shape::RoundedSquare { rho, .. } => 2.0 * PI * rho * norm(xi) * 0.25 * PI,
    };
    // Rounded up to a multiple of 32 so nearby frequencies share cached rules.
    ((0.65 * k).ceil() as usize + 32).div_ceil(32) * 32
}

fn ellipse(a1: f64, a2: f64, xi: &[f64], n: usize) -> f64 {
    let rule = gauss_legendre(n);
    rule.integrate(-FRAC_PI_2, FRAC_PI_2, |t| {
        let c = t.cos();
        (2.0 * PI * xi[0] * a1 * t.sin()).cos() * sin_ratio(xi[1], a2 * c) * a1 * c
    })
}

fn square(s: f64, xi: &[f64], n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let inner = sin_ratio(xi[1], s);
    inner * rule.integrate(-s, s, |x| (2.0 * PI * xi[0] * x).cos())
}

fn rounded_square(s: f64, rho: f64, xi: &[f64], n: usize) -> f64 {
    let a = s - rho;
    // Full-height strip |x1| <= a.
    let strip = if a > 0.0 { sin_ratio(xi[0], a) * sin_ratio(xi[1], s) } else { 0.0 };
    // Two caps a <= |x1| <= s, parameterized by x1 = a + ρ sin φ.
    let caps: f64 = quarter_arc(n)
        .iter()
        .map(|&(w, sp, cp)| {
            w * (2.0 * PI * xi[0] * (a + rho * sp)).cos() * sin_ratio(xi[1], a + rho * cp) * cp
        })
        .sum();
    strip + 2.0 * rho * caps
}

/// Gauss–Legendre weights with `(sin φ, cos φ)` at the nodes on `[0, π/2]`, cached per `n`.
fn quarter_arc(n: usize) -> Arc<Vec<(f64, f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quarter-arc cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let table = gauss_legendre(n)
                .mapped(0.0, FRAC_PI_2)
                .map(|(phi, w)| {
                    let (sp, cp) = phi.sin_cos();
                    (w, sp, cp)
                })
                .collect();
            Arc::new(table)
        })
        .clone()
}

fn ellipsoid3(a: [f64; 3], xi: &[f64], n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let inner: Vec<(f64, f64, f64)> = rule
        .mapped(-FRAC_PI_2, FRAC_PI_2)
        .map(|(t, w)| {
            let (s, c) = t.sin_cos();
            (s, c, w)
        })
        .collect();
    let mut total = 0.0;
    for &(s1, c1, w1) in &inner {
        let x1 = a[0] * s1;
        let mut row = 0.0;
        for &(s2, c2, w2) in &inner {
            let x2 = a[1] * c1 * s2;
            let h = a[2] * c1 * c2;
            row += w2 * (2.0 * PI * (xi[0] * x1 + xi[1] * x2)).cos() * sin_ratio(xi[2], h) * c2;
        }
        total += w1 * row * c1 * c1;
    }
    total * a[0] * a[1]
}

fn cube3(s: f64, xi: &[f64], n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let nodes: Vec<(f64, f64)> = rule.mapped(-s, s).collect();
    let mut total = 0.0;
    for &(x1, w1) in &nodes {
        let mut row = 0.0;
        for &(x2, w2) in &nodes {
            row += w2 * (2.0 * PI * (xi[0] * x1 + xi[1] * x2)).cos();
        }
        total += w1 * row;
    }
    total * sin_ratio(xi[2], s)
}
