//! Symmetric convex bodies described by their support functions.
//!
//! Every body is centred at the origin and symmetric under `x ↦ -x`. The
//! support function `P(ξ) = sup_{x ∈ ∂Ω} x·ξ` is positively homogeneous of
//! degree one, its gradient at a unit direction `u` is the boundary point with
//! outward normal `u` (the inverse Gauss map), and the Gaussian curvature at
//! that point is the reciprocal of the product of principal radii of curvature.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::special::ball_volume;
use crate::vecmath::{angle_between, dot, norm, normalized, scale, sub};

/// Shape parameters of the supported body families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Ball { radius: f64 },
    Cube { half_side: f64 },
    Ellipsoid { axes: Vec<f64> },
    /// Square of half-side `half_side` whose corners are replaced by circular
    /// arcs of radius `rho`; planar only.
    RoundedSquare { half_side: f64, rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    Smooth,
    Piecewise,
}

/// A validated symmetric convex body in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    dim: usize,
    shape: Shape,
}

/// Gaussian curvature at a boundary point, with a flag for flat pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature {
    pub value: f64,
    pub flat: bool,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("{name} must be positive, got {v}")))
    }
}

impl Body {
    /// Validates the parameters and builds the body.
    pub fn new(dim: usize, shape: Shape) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidBody(format!("dimension must be at least 2, got {dim}")));
        }
        match &shape {
            Shape::Ball { radius } => positive("radius", *radius)?,
            Shape::Cube { half_side } => positive("half_side", *half_side)?,
            Shape::Ellipsoid { axes } => {
                if axes.len() != dim {
                    return Err(Error::InvalidBody(format!(
                        "ellipsoid needs {dim} semi-axes, got {}",
                        axes.len()
                    )));
                }
                for a in axes {
                    positive("axes", *a)?;
                }
            }
            Shape::RoundedSquare { half_side, rho } => {
                if dim != 2 {
                    return Err(Error::InvalidBody(format!(
                        "rounded-square is planar, got dimension {dim}"
                    )));
                }
                positive("half_side", *half_side)?;
                positive("rho", *rho)?;
                if rho > half_side {
                    return Err(Error::InvalidBody(format!(
                        "rho {rho} exceeds half_side {half_side}"
                    )));
                }
            }
        }
        Ok(Body { dim, shape })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Body::new(dim, Shape::Ball { radius })
    }

    pub fn cube(dim: usize, half_side: f64) -> Result<Self> {
        Body::new(dim, Shape::Cube { half_side })
    }

    pub fn ellipsoid(axes: &[f64]) -> Result<Self> {
        Body::new(axes.len(), Shape::Ellipsoid { axes: axes.to_vec() })
    }

    pub fn rounded_square(half_side: f64, rho: f64) -> Result<Self> {
        Body::new(2, Shape::RoundedSquare { half_side, rho })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn smoothness(&self) -> Smoothness {
        match self.shape {
            Shape::Ball { .. } | Shape::Ellipsoid { .. } => Smoothness::Smooth,
            Shape::Cube { .. } | Shape::RoundedSquare { .. } => Smoothness::Piecewise,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            Shape::Ball { .. } => "ball",
            Shape::Cube { .. } => "cube",
            Shape::Ellipsoid { .. } => "ellipsoid",
            Shape::RoundedSquare { .. } => "rounded-square",
        }
    }

    /// Short identifier used in reports, e.g. `ball(d=2,radius=1)`.
    pub fn id(&self) -> String {
        self.to_string()
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => ball_volume(self.dim, *radius),
            Shape::Cube { half_side } => (2.0 * half_side).powi(self.dim as i32),
            Shape::Ellipsoid { axes } => ball_volume(self.dim, 1.0) * axes.iter().product::<f64>(),
            Shape::RoundedSquare { half_side, rho } => {
                4.0 * half_side * half_side - (4.0 - PI) * rho * rho
            }
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::domain(format!(
                "expected a {}-vector, got length {}",
                self.dim,
                v.len()
            )));
        }
        Ok(())
    }

    fn unit(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(xi)?;
        normalized(xi).ok_or_else(|| Error::domain("direction must be a non-zero vector"))
    }

    /// Support function `P(ξ) = sup_{x ∈ Ω} x·ξ`.
    pub fn support(&self, xi: &[f64]) -> Result<f64> {
        self.check_dim(xi)?;
        if xi.iter().all(|&v| v == 0.0) {
            return Err(Error::domain("support function is evaluated at a non-zero vector"));
        }
        Ok(self.support_unchecked(xi))
    }

    pub(crate) fn support_unchecked(&self, xi: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => radius * norm(xi),
            Shape::Cube { half_side } => half_side * xi.iter().map(|v| v.abs()).sum::<f64>(),
            Shape::Ellipsoid { axes } => axes
                .iter()
                .zip(xi)
                .map(|(a, v)| (a * v) * (a * v))
                .sum::<f64>()
                .sqrt(),
            // Minkowski sum of the square of half-side s - ρ and the disc of radius ρ.
            Shape::RoundedSquare { half_side, rho } => {
                (half_side - rho) * (xi[0].abs() + xi[1].abs()) + rho * norm(xi)
            }
        }
    }

    /// Boundary point with outward normal `u`; the gradient of the support function.
    pub fn gauss_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        let u = self.unit(u)?;
        match &self.shape {
            Shape::Ball { radius } => Ok(scale(&u, *radius)),
            Shape::Cube { half_side } => {
                if u.iter().any(|&c| c == 0.0) {
                    return Err(Error::NonUniqueMaximizer(u));
                }
                Ok(u.iter().map(|c| half_side * c.signum()).collect())
            }
            Shape::Ellipsoid { axes } => {
                let h = self.support_unchecked(&u);
                Ok(axes.iter().zip(&u).map(|(a, c)| a * a * c / h).collect())
            }
            Shape::RoundedSquare { half_side, rho } => {
                if u[0] == 0.0 || u[1] == 0.0 {
                    return Err(Error::NonUniqueMaximizer(u));
                }
                let a = half_side - rho;
                Ok(vec![a * u[0].signum() + rho * u[0], a * u[1].signum() + rho * u[1]])
            }
        }
    }

    /// Gaussian curvature of the boundary at `gauss_point(u)`.
    ///
    /// Flat pieces report zero with `flat = true`; cube vertices carry no
    /// finite curvature and are rejected.
    pub fn curvature(&self, u: &[f64]) -> Result<Curvature> {
        let u = self.unit(u)?;
        let d = self.dim as i32;
        match &self.shape {
            Shape::Ball { radius } => Ok(Curvature {
                value: radius.powi(1 - d),
                flat: false,
            }),
            Shape::Ellipsoid { axes } => {
                let h = self.support_unchecked(&u);
                let prod: f64 = axes.iter().map(|a| a * a).product();
                Ok(Curvature {
                    value: h.powi(d + 1) / prod,
                    flat: false,
                })
            }
            Shape::Cube { .. } => {
                if u.iter().any(|&c| c == 0.0) {
                    Ok(Curvature {
                        value: 0.0,
                        flat: true,
                    })
                } else {
                    Err(Error::NonSmooth(u))
                }
            }
            Shape::RoundedSquare { rho, .. } => {
                if u[0] == 0.0 || u[1] == 0.0 {
                    Ok(Curvature {
                        value: 0.0,
                        flat: true,
                    })
                } else {
                    Ok(Curvature {
                        value: 1.0 / rho,
                        flat: false,
                    })
                }
            }
        }
    }

    /// Outward unit normal at a boundary point `x`, from the local parameterization.
    pub fn outward_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let n = match &self.shape {
            Shape::Ball { .. } => normalized(x),
            Shape::Ellipsoid { axes } => {
                let g: Vec<f64> = x.iter().zip(axes).map(|(v, a)| v / (a * a)).collect();
                normalized(&g)
            }
            Shape::Cube { half_side } => {
                let on_face: Vec<usize> = (0..self.dim)
                    .filter(|&j| (x[j].abs() - half_side).abs() <= 1e-12 * half_side)
                    .collect();
                if on_face.len() != 1 {
                    return Err(Error::NonSmooth(x.to_vec()));
                }
                let mut n = vec![0.0; self.dim];
                n[on_face[0]] = x[on_face[0]].signum();
                Some(n)
            }
            Shape::RoundedSquare { half_side, rho } => {
                let a = half_side - rho;
                if x[0].abs() <= a {
                    Some(vec![0.0, x[1].signum()])
                } else if x[1].abs() <= a {
                    Some(vec![x[0].signum(), 0.0])
                } else {
                    let c = [a * x[0].signum(), a * x[1].signum()];
                    normalized(&sub(x, &c))
                }
            }
        };
        n.ok_or_else(|| Error::domain("normal undefined at the origin"))
    }

    /// Membership test for the closed body.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let eps = 1e-12;
        match &self.shape {
            Shape::Ball { radius } => norm(x) <= radius * (1.0 + eps),
            Shape::Cube { half_side } => x.iter().all(|v| v.abs() <= half_side * (1.0 + eps)),
            Shape::Ellipsoid { axes } => {
                x.iter().zip(axes).map(|(v, a)| (v / a) * (v / a)).sum::<f64>() <= 1.0 + eps
            }
            Shape::RoundedSquare { half_side, rho } => {
                let a = half_side - rho;
                let dx = (x[0].abs() - a).max(0.0);
                let dy = (x[1].abs() - a).max(0.0);
                x[0].abs() <= half_side * (1.0 + eps)
                    && x[1].abs() <= half_side * (1.0 + eps)
                    && (dx * dx + dy * dy).sqrt() <= rho * (1.0 + eps)
            }
        }
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Ball { radius } => write!(f, "ball(d={},radius={})", self.dim, radius),
            Shape::Cube { half_side } => write!(f, "cube(d={},half_side={})", self.dim, half_side),
            Shape::Ellipsoid { axes } => {
                let axes: Vec<String> = axes.iter().map(|a| a.to_string()).collect();
                write!(f, "ellipsoid(d={},axes={})", self.dim, axes.join(":"))
            }
            Shape::RoundedSquare { half_side, rho } => {
                write!(f, "rounded-square(half_side={half_side},rho={rho})")
            }
        }
    }
}

/// Cone of directions within `half_angle` of a unit `axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalCone {
    axis: Vec<f64>,
    half_angle: f64,
}

impl NormalCone {
    pub fn new(axis: &[f64], half_angle: f64) -> Result<Self> {
        let axis = normalized(axis).ok_or_else(|| Error::domain("cone axis must be non-zero"))?;
        if !(half_angle > 0.0 && half_angle < PI / 2.0) {
            return Err(Error::domain(format!(
                "cone half-angle must lie in (0, π/2), got {half_angle}"
            )));
        }
        Ok(NormalCone { axis, half_angle })
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        if xi.len() != self.axis.len() || xi.iter().all(|&v| v == 0.0) {
            return false;
        }
        angle_between(xi, &self.axis) <= self.half_angle
    }
}

/// Closed ball `B` in frequency space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl FrequencyBall {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(FrequencyBall { center, radius })
    }

    /// Ball of radius `radius` centred at `distance · radius` along `axis`.
    pub fn along_axis(axis: &[f64], distance: f64, radius: f64) -> Result<Self> {
        let axis = normalized(axis).ok_or_else(|| Error::domain("axis must be non-zero"))?;
        FrequencyBall::new(scale(&axis, distance * radius), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        let d2: f64 = xi
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        d2 <= self.radius * self.radius * (1.0 + 1e-14)
    }

    /// Angular radius of the ball seen from the origin.
    pub fn angular_radius(&self) -> Result<f64> {
        let c = norm(&self.center);
        if c <= self.radius {
            return Err(Error::domain("ball contains the origin"));
        }
        Ok((self.radius / c).asin())
    }

    /// Whether every point of the ball lies in the cone.
    pub fn inside_cone(&self, cone: &NormalCone) -> bool {
        match self.angular_radius() {
            Ok(beta) => angle_between(&self.center, cone.axis()) + beta <= cone.half_angle() + 1e-12,
            Err(_) => false,
        }
    }

    /// Parameter interval `[t0, t1]` where the ray `t·u` (u unit) meets the ball.
    pub fn ray_interval(&self, u: &[f64]) -> Option<(f64, f64)> {
        let p = dot(u, &self.center);
        let disc = p * p - dot(&self.center, &self.center) + self.radius * self.radius;
        if disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let t0 = (p - s).max(0.0);
        let t1 = p + s;
        (t1 > t0).then_some((t0, t1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn support_closed_forms() {
        let ball = Body::ball(2, 1.0).unwrap();
        assert_abs_diff_eq!(ball.support(&[3.0, 4.0]).unwrap(), 5.0);
        let cube = Body::cube(2, 0.5).unwrap();
        assert_abs_diff_eq!(cube.support(&[1.0, 1.0]).unwrap(), 1.0);
        let ell = Body::ellipsoid(&[2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(ell.support(&[1.0, 0.0]).unwrap(), 2.0);
        assert!(matches!(ball.support(&[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn rounded_square_support_is_max_over_pieces() {
        let body = Body::rounded_square(1.0, 0.25).unwrap();
        for k in 0..64 {
            let t = 2.0 * PI * k as f64 / 64.0 + 0.01;
            let u = [t.cos(), t.sin()];
            // Brute-force sup over a dense boundary sample.
            let mut best = f64::NEG_INFINITY;
            for j in 0..20000 {
                let s = 2.0 * PI * j as f64 / 20000.0;
                let c = [0.75 * s.cos().signum(), 0.75 * s.sin().signum()];
                let x = [c[0] + 0.25 * s.cos(), c[1] + 0.25 * s.sin()];
                best = best.max(dot(&x, &u));
            }
            assert_abs_diff_eq!(body.support(&u).unwrap(), best, epsilon = 1e-8);
        }
    }

    #[test]
    fn gauss_points() {
        let ball = Body::ball(2, 1.0).unwrap();
        assert_eq!(ball.gauss_point(&[0.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        let ell = Body::ellipsoid(&[2.0, 1.0]).unwrap();
        let g = ell.gauss_point(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 2.0);
        assert_abs_diff_eq!(g[1], 0.0);
        let g = ball.gauss_point(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert_abs_diff_eq!(g[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        let rs = Body::rounded_square(1.0, 0.25).unwrap();
        assert!(matches!(rs.gauss_point(&[1.0, 0.0]), Err(Error::NonUniqueMaximizer(_))));
        let cube = Body::cube(3, 0.5).unwrap();
        assert!(matches!(cube.gauss_point(&[0.0, 1.0, 1.0]), Err(Error::NonUniqueMaximizer(_))));
        assert_eq!(cube.gauss_point(&[1.0, -2.0, 3.0]).unwrap(), vec![0.5, -0.5, 0.5]);
    }

    #[test]
    fn curvature_values() {
        let ball3 = Body::ball(3, 1.0).unwrap();
        assert_abs_diff_eq!(ball3.curvature(&[0.2, 0.3, 0.9]).unwrap().value, 1.0);
        let ell = Body::ellipsoid(&[2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(ell.curvature(&[1.0, 0.0]).unwrap().value, 2.0, epsilon = 1e-14);
        let rs = Body::rounded_square(1.0, 0.2).unwrap();
        assert_abs_diff_eq!(rs.curvature(&[1.0, 1.0]).unwrap().value, 5.0, epsilon = 1e-14);
        let flat = rs.curvature(&[0.0, 1.0]).unwrap();
        assert!(flat.flat);
        assert_eq!(flat.value, 0.0);
        let cube = Body::cube(2, 0.5).unwrap();
        assert!(matches!(cube.curvature(&[1.0, 1.0]), Err(Error::NonSmooth(_))));
    }

    #[test]
    fn constructor_contracts() {
        assert!(Body::ball(2, 1.0).is_ok());
        let rs = Body::rounded_square(1.0, 0.25).unwrap();
        assert_eq!(rs.smoothness(), Smoothness::Piecewise);
        let cube = Body::cube(3, 0.5).unwrap();
        assert_eq!(cube.smoothness(), Smoothness::Piecewise);
        assert!(matches!(Body::ball(2, 0.0), Err(Error::InvalidBody(_))));
        assert!(matches!(Body::ball(2, -1.0), Err(Error::InvalidBody(_))));
        assert!(matches!(Body::new(3, Shape::RoundedSquare { half_side: 1.0, rho: 0.2 }), Err(Error::InvalidBody(_))));
        assert!(matches!(Body::rounded_square(1.0, 1.5), Err(Error::InvalidBody(_))));
        assert!(matches!(Body::new(3, Shape::Ellipsoid { axes: vec![1.0, 2.0] }), Err(Error::InvalidBody(_))));
    }

    #[test]
    fn volumes() {
        assert_abs_diff_eq!(Body::ball(2, 1.0).unwrap().volume(), PI, epsilon = 1e-14);
        assert_abs_diff_eq!(Body::cube(3, 0.5).unwrap().volume(), 1.0);
        assert_abs_diff_eq!(Body::ellipsoid(&[2.0, 1.0]).unwrap().volume(), 2.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn cone_and_ball() {
        let cone = NormalCone::new(&[1.0, 0.0], 0.4).unwrap();
        assert!(cone.contains(&[5.0, 1.0]));
        assert!(!cone.contains(&[0.0, 1.0]));
        assert!(cone.contains(&[50.0, 10.0]));
        let b = FrequencyBall::along_axis(&[1.0, 0.0], 3.0, 10.0).unwrap();
        assert!(b.inside_cone(&cone));
        let (t0, t1) = b.ray_interval(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(t0, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t1, 40.0, epsilon = 1e-12);
        assert!(b.ray_interval(&[0.0, 1.0]).is_none());
    }
}
