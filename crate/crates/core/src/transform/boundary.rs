//! Boundary-integral evaluation of the transform and its localized variant.
//!
//! By the divergence theorem, for a body symmetric about the origin
//!
//! ```text
//! χ̂(ξ) = (2πi|ξ|)^{-1} ∫_{∂Ω} e^{2πi x·ξ} (ξ/|ξ| · n(x)) dσ(x).
//! ```
//!
//! The boundary is discretized piece by piece; every node carries the point
//! `x` and the area-weighted normal `N = n(x) dσ`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{Body, NormalCone, Shape};
use crate::special::gauss_legendre;
use crate::vecmath::{distance, dot, norm, orthonormal_complement, scale};

/// Smallest accepted boundary resolution.
pub const MIN_BOUNDARY_RESOLUTION: usize = 16;

/// Number of boundary nodes produced for resolution `n`.
pub fn node_count(body: &Body, n: usize) -> usize {
    match (body.dim(), body.shape()) {
        (2, Shape::Cube { .. }) => 4 * n,
        (2, Shape::RoundedSquare { .. }) => 8 * n,
        (2, _) => n,
        (3, Shape::Cube { .. }) => 6 * (n / 4).pow(2),
        (3, _) => (n / 2) * n,
        _ => 0,
    }
}

/// Visits every node `(x, N)` of the boundary rule with resolution `n`.
///
/// Smooth planar bodies use the trapezoid rule in the angle (exponentially
/// accurate for periodic integrands); faces, edges and arcs use `n`-point
/// Gauss–Legendre rules; smooth bodies in `R^3` use Gauss–Legendre in the
/// polar angle times the trapezoid rule in the azimuth.
pub fn for_each_node(body: &Body, n: usize, mut f: impl FnMut(&[f64], &[f64])) {
    match (body.dim(), body.shape()) {
        (2, Shape::Ball { radius }) => planar_ellipse(*radius, *radius, n, &mut f),
        (2, Shape::Ellipsoid { axes }) => planar_ellipse(axes[0], axes[1], n, &mut f),
        (2, Shape::Cube { half_side }) => planar_rounded(*half_side, 0.0, n, &mut f),
        (2, Shape::RoundedSquare { half_side, rho }) => planar_rounded(*half_side, *rho, n, &mut f),
        (3, Shape::Ball { radius }) => ellipsoid3([*radius; 3], n, &mut f),
        (3, Shape::Ellipsoid { axes }) => ellipsoid3([axes[0], axes[1], axes[2]], n, &mut f),
        (3, Shape::Cube { half_side }) => cube3(*half_side, n / 4, &mut f),
        _ => {}
    }
}

fn planar_ellipse(a1: f64, a2: f64, n: usize, f: &mut impl FnMut(&[f64], &[f64])) {
    let h = 2.0 * PI / n as f64;
    for k in 0..n {
        let (s, c) = (k as f64 * h).sin_cos();
        f(&[a1 * c, a2 * s], &[a2 * c * h, a1 * s * h]);
    }
}

/// Square of half-side `s` with corner arcs of radius `rho` (`rho = 0` is the square).
fn planar_rounded(s: f64, rho: f64, n: usize, f: &mut impl FnMut(&[f64], &[f64])) {
    let a = s - rho;
    let rule = gauss_legendre(n);
    if a > 0.0 {
        for (t, w) in rule.mapped(-a, a) {
            f(&[s, t], &[w, 0.0]);
            f(&[-s, -t], &[-w, 0.0]);
            f(&[-t, s], &[0.0, w]);
            f(&[t, -s], &[0.0, -w]);
        }
    }
    if rho > 0.0 {
        for q in 0..4 {
            let base = q as f64 * FRAC_PI_2;
            let (sx, sy) = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)][q];
            for (phi, w) in rule.mapped(base, base + FRAC_PI_2) {
                let (sp, cp) = phi.sin_cos();
                f(
                    &[sx * a + rho * cp, sy * a + rho * sp],
                    &[cp * rho * w, sp * rho * w],
                );
            }
        }
    }
}

fn ellipsoid3(a: [f64; 3], n: usize, f: &mut impl FnMut(&[f64], &[f64])) {
    let rule = gauss_legendre((n / 2).max(1));
    let h = 2.0 * PI / n as f64;
    let azimuth: Vec<(f64, f64)> = (0..n).map(|k| (k as f64 * h).sin_cos()).collect();
    for (phi, w) in rule.mapped(0.0, PI) {
        let (sp, cp) = phi.sin_cos();
        let wt = w * h * sp;
        for &(st, ct) in &azimuth {
            f(
                &[a[0] * sp * ct, a[1] * sp * st, a[2] * cp],
                &[
                    a[1] * a[2] * sp * ct * wt,
                    a[0] * a[2] * sp * st * wt,
                    a[0] * a[1] * cp * wt,
                ],
            );
        }
    }
}

fn cube3(s: f64, m: usize, f: &mut impl FnMut(&[f64], &[f64])) {
    let rule = gauss_legendre(m.max(1));
    let nodes: Vec<(f64, f64)> = rule.mapped(-s, s).collect();
    for j in 0..3 {
        let (p, q) = ((j + 1) % 3, (j + 2) % 3);
        for sign in [1.0, -1.0] {
            for &(u, wu) in &nodes {
                for &(v, wv) in &nodes {
                    let mut x = [0.0; 3];
                    let mut nv = [0.0; 3];
                    x[j] = sign * s;
                    x[p] = u;
                    x[q] = v;
                    nv[j] = sign * wu * wv;
                    f(&x, &nv);
                }
            }
        }
    }
}

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
            method: "herz",
            reason: format!("boundary rules exist for d <= 3, got d = {}", body.dim()),
        });
    }
    if xi.iter().all(|&v| v == 0.0) {
        return Err(Error::domain("the boundary formula is singular at ξ = 0"));
    }
    if n < MIN_BOUNDARY_RESOLUTION {
        return Err(Error::Resolution(format!(
            "boundary rule needs at least {MIN_BOUNDARY_RESOLUTION} nodes, got {n}"
        )));
    }
    Ok(())
}

/// Weighted raw integral `∫ e^{2πi x·ξ} (ξ̂·n) w(x) dσ` over precomputed or generated nodes.
fn raw_integral(
    body: &Body,
    xi: &[f64],
    n: usize,
    mut weight: impl FnMut(&[f64]) -> f64,
) -> Complex64 {
    let r = norm(xi);
    let mut re = 0.0;
    let mut im = 0.0;
    for_each_node(body, n, |x, nv| {
        let w = weight(x);
        if w == 0.0 {
            return;
        }
        let g = dot(xi, nv) / r * w;
        let (s, c) = (2.0 * PI * dot(x, xi)).sin_cos();
        re += c * g;
        im += s * g;
    });
    Complex64::new(re, im)
}

/// Raw boundary integral `∫ e^{2πi x·ξ} (ξ̂·n) dσ` from a flattened node list `[x, N, x, N, ...]`.
pub(crate) fn raw_from_nodes(nodes: &[f64], dim: usize, xi: &[f64]) -> Complex64 {
    let r = norm(xi);
    let mut re = 0.0;
    let mut im = 0.0;
    for chunk in nodes.chunks_exact(2 * dim) {
        let (x, nv) = chunk.split_at(dim);
        let g = dot(xi, nv) / r;
        let (s, c) = (2.0 * PI * dot(x, xi)).sin_cos();
        re += c * g;
        im += s * g;
    }
    Complex64::new(re, im)
}

/// Collects the nodes of the boundary rule into a flat list.
pub(crate) fn collect_nodes(body: &Body, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(node_count(body, n) * 2 * body.dim());
    for_each_node(body, n, |x, nv| {
        out.extend_from_slice(x);
        out.extend_from_slice(nv);
    });
    out
}

/// Converts a raw boundary integral into the transform value.
pub(crate) fn raw_to_chi_hat(raw: Complex64, xi: &[f64]) -> Complex64 {
    raw / Complex64::new(0.0, 2.0 * PI * norm(xi))
}

/// Complex transform value from the boundary formula; the imaginary part is
/// a discretization artefact that vanishes for symmetric bodies.
pub fn herz_boundary_complex(body: &Body, xi: &[f64], n: usize) -> Result<Complex64> {
    check(body, xi, n)?;
    Ok(raw_to_chi_hat(raw_integral(body, xi, n, |_| 1.0), xi))
}

/// Transform value from the boundary formula with resolution `n`.
pub fn herz_boundary(body: &Body, xi: &[f64], n: usize) -> Result<f64> {
    herz_boundary_complex(body, xi, n).map(|z| z.re)
}

/// Smooth cutoff around a boundary point.
///
/// The window equals 1 on the ball of radius `plateau · radius` around the
/// centre, falls to 0 at `radius` through a polynomial smoothstep of order
/// `order`, and is `C^{order-1}` across both transition edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffWindow {
    pub center: Vec<f64>,
    pub radius: f64,
    pub order: u32,
    pub plateau: f64,
}

/// Default fraction of the support radius on which the window equals 1.
pub const DEFAULT_PLATEAU: f64 = 0.5;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl CutoffWindow {
    pub fn new(center: Vec<f64>, radius: f64, order: u32) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("window radius must be positive, got {radius}")));
        }
        if order < 2 {
            return Err(Error::domain(format!("window order must be at least 2, got {order}")));
        }
        Ok(CutoffWindow {
            center,
            radius,
            order,
            plateau: DEFAULT_PLATEAU,
        })
    }

    pub fn with_plateau(mut self, plateau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&plateau) {
            return Err(Error::domain(format!("plateau fraction must lie in [0, 1), got {plateau}")));
        }
        self.plateau = plateau;
        Ok(self)
    }

    /// Smoothstep `S(v) = v^m Σ_{k<m} C(m-1+k, k) (1-v)^k` on `[0, 1]`.
    fn smoothstep(&self, v: f64) -> f64 {
        let m = self.order;
        let tail: f64 = (0..m)
            .map(|k| binomial(m - 1 + k, k) * (1.0 - v).powi(k as i32))
            .sum();
        v.powi(m as i32) * tail
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let t = distance(x, &self.center);
        let inner = self.plateau * self.radius;
        if t <= inner {
            1.0
        } else if t >= self.radius {
            0.0
        } else {
            self.smoothstep((self.radius - t) / (self.radius - inner))
        }
    }

    /// Radius of the boundary patch whose normals define the cone.
    fn patch_radius(&self) -> f64 {
        if self.plateau > 0.0 {
            self.plateau * self.radius
        } else {
            self.radius
        }
    }

    /// Cone of outward normals over the patch where the window equals 1.
    pub fn normal_cone(&self, body: &Body) -> Result<NormalCone> {
        if self.center.len() != body.dim() {
            return Err(Error::domain("window centre has the wrong dimension"));
        }
        let n0 = body.outward_normal(&self.center)?;
        let p = body.support(&n0)?;
        if (dot(&self.center, &n0) - p).abs() > 1e-9 * p.max(1.0) {
            return Err(Error::domain("window centre is not a boundary point"));
        }
        let rho = self.patch_radius();
        let probes: Vec<Vec<f64>> = if body.dim() == 2 {
            vec![vec![-n0[1], n0[0]], vec![n0[1], -n0[0]]]
        } else {
            let basis = orthonormal_complement(&n0);
            (0..16)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / 16.0;
                    let mut v = scale(&basis[0], t.cos());
                    for (vi, bi) in v.iter_mut().zip(&basis[1]) {
                        *vi += t.sin() * bi;
                    }
                    v
                })
                .collect()
        };
        let inside = |probe: &[f64], alpha: f64| -> bool {
            let u: Vec<f64> = n0
                .iter()
                .zip(probe)
                .map(|(a, b)| alpha.cos() * a + alpha.sin() * b)
                .collect();
            match body.gauss_point(&u) {
                Ok(g) => distance(&g, &self.center) <= rho,
                Err(_) => false,
            }
        };
        let cap = 1.5;
        let mut half = cap;
        for probe in &probes {
            let (mut lo, mut hi) = (0.0, cap);
            if inside(probe, hi) {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(probe, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            half = half.min(lo);
        }
        if half <= 1e-12 {
            return Err(Error::DegenerateCurvature(n0));
        }
        NormalCone::new(&n0, half)
    }
}

/// Result of a localized boundary integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localized {
    /// `∫ e^{2πi x·ξ} (ξ̂·n) (ψ(x) + ψ(−x)) dσ`.
    pub value: Complex64,
    /// The same integral converted to the transform normalization (real part).
    pub chi_hat_part: f64,
    /// `|full boundary integral − value|`.
    pub remainder: f64,
}

/// Boundary integral restricted by the symmetrized cutoff `ψ(x) + ψ(−x)`.
pub fn localized_boundary(
    body: &Body,
    xi: &[f64],
    window: &CutoffWindow,
    n: usize,
) -> Result<Localized> {
    check(body, xi, n)?;
    let cone = window.normal_cone(body)?;
    if !cone.contains(xi) {
        return Err(Error::ConeViolation(xi.to_vec()));
    }
    let full = raw_integral(body, xi, n, |_| 1.0);
    let value = raw_integral(body, xi, n, |x| {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        window.value(x) + window.value(&neg)
    });
    Ok(Localized {
        value,
        chi_hat_part: raw_to_chi_hat(value, xi).re,
        remainder: (full - value).norm(),
    })
}
