//! Fourier transform of the indicator function of a body,
//! `χ̂(ξ) = ∫_Ω e^{-2πi ξ·x} dx`, by four independent routes.

mod boundary;
mod model;
mod quadrature;

pub use boundary::{
    for_each_node, herz_boundary, herz_boundary_complex, localized_boundary, node_count,
    CutoffWindow, Localized, DEFAULT_PLATEAU, MIN_BOUNDARY_RESOLUTION,
};
pub use model::{
    calibrate_phase_offset, calibrated_phase_offset, cos_residual, phase_model_eval, PhaseModel,
    MODEL_MIN_FREQUENCY,
};
pub use quadrature::{auto_resolution, chi_hat_quadrature, MIN_QUADRATURE_RESOLUTION};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{Body, Shape};
use crate::special::{bessel_j_scaled, sin_pi};
use crate::vecmath::norm;

/// Closed-form transform for balls, ellipsoids and cubes.
///
/// Cube of half-side `s`: `∏_j sin(2π s ξ_j) / (π ξ_j)`, with value `2s` in
/// any zero coordinate. Ball of radius `r`: `r^d (2π)^{d/2} J_{d/2}(z) / z^{d/2}`
/// with `z = 2π r |ξ|`. An ellipsoid with semi-axes `a` is the image of the
/// unit ball under `diag(a)`, so its transform is `∏a_j` times the unit-ball
/// transform at `diag(a) ξ`.
pub fn chi_hat_closed(body: &Body, xi: &[f64]) -> Result<f64> {
    if xi.len() != body.dim() {
        return Err(Error::domain(format!(
            "expected a {}-vector, got length {}",
            body.dim(),
            xi.len()
        )));
    }
    let d = body.dim();
    match body.shape() {
        Shape::Cube { half_side } => Ok(xi
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    2.0 * half_side
                } else {
                    sin_pi(2.0 * half_side * v) / (PI * v)
                }
            })
            .product()),
        Shape::Ball { radius } => Ok(unit_ball(d, radius * norm(xi)) * radius.powi(d as i32)),
        Shape::Ellipsoid { axes } => {
            let scaled: f64 = axes.iter().zip(xi).map(|(a, v)| (a * v) * (a * v)).sum::<f64>().sqrt();
            Ok(unit_ball(d, scaled) * axes.iter().product::<f64>())
        }
        Shape::RoundedSquare { .. } => Err(Error::MethodUnavailable {
            method: "closed",
            reason: "no closed form for the rounded square".into(),
        }),
    }
}

fn unit_ball(d: usize, rho: f64) -> f64 {
    let z = 2.0 * PI * rho;
    (2.0 * PI).powf(d as f64 / 2.0) * bessel_j_scaled(d as u32, z)
}

/// Evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Closed,
    Quadrature,
    Herz,
    Model,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Closed, Method::Quadrature, Method::Herz, Method::Model];

    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
            Method::Herz => "herz",
            Method::Model => "model",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config("method", format!("unknown method `{s}`")))
    }
}

/// Node count per parameter; `Auto` picks one from the frequency at each call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    Fixed(usize),
    Auto,
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Fixed(n) => write!(f, "{n}"),
            Resolution::Auto => f.write_str("auto"),
        }
    }
}

/// Boundary node lists are cached up to this many nodes.
const NODE_CACHE_LIMIT: usize = 1 << 18;

/// A body together with a chosen evaluation route.
#[derive(Debug, Clone)]
pub struct TransformEvaluator {
    body: Body,
    method: Method,
    resolution: Resolution,
    phase_offset: f64,
    nodes: OnceLock<Vec<f64>>,
}

impl TransformEvaluator {
    pub fn new(body: Body, method: Method, resolution: Resolution) -> Result<Self> {
        match method {
            Method::Closed => {
                if matches!(body.shape(), Shape::RoundedSquare { .. }) {
                    return Err(Error::MethodUnavailable {
                        method: "closed",
                        reason: "no closed form for the rounded square".into(),
                    });
                }
            }
            Method::Quadrature | Method::Herz => {
                if body.dim() > 3 {
                    return Err(Error::MethodUnavailable {
                        method: method.name(),
                        reason: format!("supported for d <= 3, got d = {}", body.dim()),
                    });
                }
                let min = if method == Method::Herz {
                    MIN_BOUNDARY_RESOLUTION
                } else {
                    MIN_QUADRATURE_RESOLUTION
                };
                match resolution {
                    Resolution::Fixed(n) if n < min => {
                        return Err(Error::Resolution(format!(
                            "{method} needs at least {min} nodes, got {n}"
                        )))
                    }
                    Resolution::Auto if method == Method::Herz => {
                        return Err(Error::Resolution(
                            "the boundary rule needs an explicit resolution".into(),
                        ))
                    }
                    _ => {}
                }
            }
            Method::Model => {}
        }
        let phase_offset = if method == Method::Model {
            calibrated_phase_offset()
        } else {
            0.0
        };
        Ok(TransformEvaluator {
            body,
            method,
            resolution,
            phase_offset,
            nodes: OnceLock::new(),
        })
    }

    pub fn closed(body: Body) -> Result<Self> {
        TransformEvaluator::new(body, Method::Closed, Resolution::Auto)
    }

    /// Closed form where one exists, otherwise auto-resolved quadrature.
    pub fn best(body: Body) -> Result<Self> {
        if matches!(body.shape(), Shape::RoundedSquare { .. }) {
            TransformEvaluator::new(body, Method::Quadrature, Resolution::Auto)
        } else {
            TransformEvaluator::closed(body)
        }
    }

    pub fn with_phase_offset(mut self, offset: f64) -> Self {
        self.phase_offset = offset;
        self
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    /// Transform value at `ξ`.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        match self.method {
            Method::Closed => chi_hat_closed(&self.body, xi),
            Method::Quadrature => {
                let n = match self.resolution {
                    Resolution::Fixed(n) => n,
                    Resolution::Auto => auto_resolution(&self.body, xi),
                };
                chi_hat_quadrature(&self.body, xi, n)
            }
            Method::Herz => self.eval_herz(xi).map(|z| z.re),
            Method::Model => phase_model_eval(&self.body, xi, self.phase_offset).map(|m| m.value),
        }
    }

    /// Complex boundary-formula value, reusing cached nodes when they fit.
    pub fn eval_herz(&self, xi: &[f64]) -> Result<num_complex::Complex64> {
        let n = match self.resolution {
            Resolution::Fixed(n) => n,
            Resolution::Auto => {
                return Err(Error::Resolution("the boundary rule needs an explicit resolution".into()))
            }
        };
        if node_count(&self.body, n) > NODE_CACHE_LIMIT {
            return herz_boundary_complex(&self.body, xi, n);
        }
        // Run the validation path once per call; it is cheap compared to the sum.
        if xi.len() != self.body.dim() || xi.iter().all(|&v| v == 0.0) {
            return herz_boundary_complex(&self.body, xi, n);
        }
        let nodes = self.nodes.get_or_init(|| boundary::collect_nodes(&self.body, n));
        let raw = boundary::raw_from_nodes(nodes, self.body.dim(), xi);
        Ok(boundary::raw_to_chi_hat(raw, xi))
    }

    /// Resolution label for reports.
    pub fn resolution_label(&self) -> String {
        match self.method {
            Method::Closed | Method::Model => "-".into(),
            _ => self.resolution.to_string(),
        }
    }
}
