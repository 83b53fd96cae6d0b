//! Leading-order stationary-phase model of the transform.
//!
//! Inside the normal cone of a curved boundary patch,
//!
//! ```text
//! χ̂(ξ) ≈ A(ξ) cos Φ(ξ),   A(ξ) = π^{-1} K^{-1/2} |ξ|^{-(d+1)/2},
//!                          Φ(ξ) = 2π P(ξ) − π(d+1)/4 + φ₀,
//! ```
//!
//! where `K` is the Gaussian curvature at the boundary point with normal
//! `ξ/|ξ|` and `P` is the support function.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::Body;
use crate::vecmath::norm;

use super::chi_hat_closed;

/// Smallest frequency magnitude at which the model is evaluated.
pub const MODEL_MIN_FREQUENCY: f64 = 2.0;

/// One evaluation of the stationary-phase model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseModel {
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    pub value: f64,
}

/// Evaluates amplitude, phase and model value at `ξ` with phase offset `offset`.
pub fn phase_model_eval(body: &Body, xi: &[f64], offset: f64) -> Result<PhaseModel> {
    let r = norm(xi);
    if xi.len() != body.dim() {
        return Err(Error::domain("frequency has the wrong dimension"));
    }
    if r < MODEL_MIN_FREQUENCY {
        return Err(Error::domain(format!(
            "the asymptotic model needs |ξ| >= {MODEL_MIN_FREQUENCY}, got {r}"
        )));
    }
    let u: Vec<f64> = xi.iter().map(|v| v / r).collect();
    let k = match body.curvature(&u) {
        Ok(k) if !k.flat && k.value > 0.0 => k.value,
        Ok(_) | Err(Error::NonSmooth(_)) => return Err(Error::DegenerateCurvature(u)),
        Err(e) => return Err(e),
    };
    let d = body.dim() as f64;
    let amplitude = r.powf(-(d + 1.0) / 2.0) / (PI * k.sqrt());
    let phase = 2.0 * PI * body.support_unchecked(xi) - PI * (d + 1.0) / 4.0 + offset;
    Ok(PhaseModel {
        amplitude,
        phase,
        offset,
        value: amplitude * phase.cos(),
    })
}

/// `|cos Φ(ξ)|` under the given phase offset.
pub fn cos_residual(body: &Body, xi: &[f64], offset: f64) -> Result<f64> {
    phase_model_eval(body, xi, offset).map(|m| m.phase.cos().abs())
}

/// Phase of `χ̂/A` relative to the model phase over one period starting at radius `r0`.
fn phase_lag(body: &Body, r0: f64, samples: usize) -> Result<f64> {
    let mut c = 0.0;
    let mut s = 0.0;
    for k in 0..samples {
        let t = r0 + k as f64 / samples as f64;
        let xi = [t, 0.0];
        let m = phase_model_eval(body, &xi, 0.0)?;
        let ratio = chi_hat_closed(body, &xi)? / m.amplitude;
        c += ratio * m.phase.cos();
        s += ratio * m.phase.sin();
    }
    // ratio ≈ cos(θ + φ) = cos θ cos φ − sin θ sin φ.
    Ok((-s).atan2(c))
}

/// Calibrates the global phase offset on the unit disc.
///
/// The lag between the exact transform and the model is measured over one
/// period at radii 100, 200, 400, 800 and extrapolated to infinite radius with
/// a fit `φ(R) = φ₀ + b/R`.
pub fn calibrate_phase_offset() -> Result<f64> {
    let body = Body::ball(2, 1.0)?;
    let radii = [100.0, 200.0, 400.0, 800.0];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &r in &radii {
        xs.push(1.0 / r);
        ys.push(phase_lag(&body, r, 256)?);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(my - sxy / sxx * mx)
}

/// The calibrated offset, computed once per process.
pub fn calibrated_phase_offset() -> f64 {
    static OFFSET: OnceLock<f64> = OnceLock::new();
    *OFFSET.get_or_init(|| calibrate_phase_offset().expect("calibration on the unit disc"))
}
