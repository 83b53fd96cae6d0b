//! Evaluator cross-checks and the stationary-phase error ladder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::report::{coord_names, fmt_vec, Check, Report, Table};
use crate::error::{Error, Result};
use crate::packing::{fit_exponent, ExponentFit};
use crate::transform::{
    calibrated_phase_offset, chi_hat_closed, phase_model_eval, Method, Resolution, TransformEvaluator,
};
use crate::vecmath::{norm, scale};

/// Uniformly random direction scaled to a magnitude drawn from `[lo, hi]`.
pub fn random_frequency(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    let u = loop {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&p);
        if n > 0.1 && n <= 1.0 {
            break scale(&p, 1.0 / n);
        }
    };
    scale(&u, rng.gen_range(lo..=hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub xi: Vec<f64>,
    pub closed: Option<f64>,
    pub quadrature: f64,
    pub herz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheckReport {
    pub body: String,
    pub quad_resolution: usize,
    pub herz_resolution: usize,
    pub rows: Vec<OracleRow>,
    /// `max |quadrature − closed|`, or `|quadrature − herz|` without a closed form.
    pub max_quadrature_error: f64,
    /// `max |herz − closed|`; absent without a closed form.
    pub max_herz_error: Option<f64>,
    pub max_pairwise: f64,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for OracleCheckReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        let d = self.rows.first().map_or(0, |r| r.xi.len());
        let mut header = coord_names("xi", d);
        header.extend(["closed", "quadrature", "herz"].map(String::from));
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for r in &self.rows {
            let mut row = fmt_vec(&r.xi);
            row.push(r.closed.map_or(String::new(), |v| v.to_string()));
            row.push(r.quadrature.to_string());
            row.push(r.herz.to_string());
            t.push(row);
        }
        t
    }
}

/// Tolerance for volume quadrature against the reference.
pub const QUADRATURE_AGREEMENT: f64 = 1e-4;
/// Tolerance for the boundary rule against the closed form.
pub const HERZ_AGREEMENT: f64 = 1e-8;

/// Closed form, volume quadrature and boundary rule at `samples` random
/// frequencies with `0.5 <= |ξ| <= R` (the largest configured `R`).
pub fn run_oracle_check(cfg: &ExperimentConfig) -> Result<OracleCheckReport> {
    let body = cfg.body.clone();
    let nq = cfg.quad_resolution.unwrap_or(256);
    let quad = TransformEvaluator::new(body.clone(), Method::Quadrature, Resolution::Fixed(nq))
        .map_err(|e| Error::config("quad_resolution", e.to_string()))?;
    let herz = TransformEvaluator::new(body.clone(), Method::Herz, Resolution::Fixed(cfg.herz_resolution))
        .map_err(|e| Error::config("herz_resolution", e.to_string()))?;
    let hi = cfg.r_list.iter().cloned().fold(0.5, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let xi = random_frequency(&mut rng, body.dim(), 0.5, hi);
        let closed = match chi_hat_closed(&body, &xi) {
            Ok(v) => Some(v),
            Err(Error::MethodUnavailable { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push(OracleRow {
            closed,
            quadrature: quad.eval(&xi)?,
            herz: herz.eval(&xi)?,
            xi,
        });
    }
    let max_of = |f: &dyn Fn(&OracleRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let has_closed = rows.iter().all(|r| r.closed.is_some());
    let (max_quadrature_error, max_herz_error) = if has_closed {
        (
            max_of(&|r| (r.quadrature - r.closed.unwrap_or(f64::NAN)).abs()),
            Some(max_of(&|r| (r.herz - r.closed.unwrap_or(f64::NAN)).abs())),
        )
    } else {
        (max_of(&|r| (r.quadrature - r.herz).abs()), None)
    };
    let max_pairwise = max_of(&|r| {
        let mut v = vec![r.quadrature, r.herz];
        v.extend(r.closed);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    });
    let mut checks = vec![Check::at_most("quadrature agreement", max_quadrature_error, QUADRATURE_AGREEMENT)];
    if let Some(h) = max_herz_error {
        checks.push(Check::at_most("herz vs closed", h, HERZ_AGREEMENT));
    }
    checks.push(Check::at_most("max pairwise disagreement", max_pairwise, QUADRATURE_AGREEMENT));
    Ok(OracleCheckReport {
        body: body.id(),
        quad_resolution: nq,
        herz_resolution: cfg.herz_resolution,
        rows,
        max_quadrature_error,
        max_herz_error,
        max_pairwise,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelRow {
    pub r: f64,
    /// `max |χ̂ − A cos Φ|` over one phase period starting at radius `r`.
    pub max_error: f64,
    /// `max |χ̂| / A` over the same period.
    pub envelope_ratio: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelErrorReport {
    pub body: String,
    pub direction: Vec<f64>,
    pub phase_offset: f64,
    pub rows: Vec<ModelRow>,
    pub error_fit: ExponentFit,
    /// `−slope` of the error fit.
    pub decay_exponent: f64,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for ModelErrorReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["R", "max_error", "envelope_ratio", "amplitude"]);
        for r in &self.rows {
            t.push(vec![
                r.r.to_string(),
                r.max_error.to_string(),
                r.envelope_ratio.to_string(),
                r.amplitude.to_string(),
            ]);
        }
        t
    }
}

/// Allowed relative deviation of the envelope from the model amplitude.
pub const ENVELOPE_TOLERANCE: f64 = 0.1;

/// Model error over one period along the cone axis at every `R`, sampled
/// at `samples` points per period, with the globally calibrated offset.
pub fn run_model_error(cfg: &ExperimentConfig) -> Result<ModelErrorReport> {
    let body = &cfg.body;
    let eval = cfg.evaluator()?;
    if eval.method() == Method::Model {
        return Err(Error::config("method", "the model cannot be its own reference"));
    }
    let u = cfg.cone_axis.clone();
    let period = 1.0 / body.support(&u)?;
    let offset = calibrated_phase_offset();
    let n = cfg.samples.max(8);
    let mut rows = Vec::new();
    for &r in &cfg.r_list {
        let mut max_error = 0.0f64;
        let mut envelope = 0.0f64;
        for k in 0..n {
            let xi = scale(&u, r + period * k as f64 / n as f64);
            let m = phase_model_eval(body, &xi, offset).map_err(|e| Error::config("cone_axis", e.to_string()))?;
            let exact = eval.eval(&xi)?;
            max_error = max_error.max((exact - m.value).abs());
            envelope = envelope.max(exact.abs() / m.amplitude);
        }
        rows.push(ModelRow {
            r,
            max_error,
            envelope_ratio: envelope,
            amplitude: phase_model_eval(body, &scale(&u, r), offset)?.amplitude,
        });
    }
    let error_fit = fit_exponent(&rows.iter().map(|r| (r.r, r.max_error)).collect::<Vec<_>>())?;
    let d = body.dim() as f64;
    // Leading term decays like R^{-(d+1)/2}, the first correction one power faster.
    let expected = (d + 3.0) / 2.0;
    let mut checks = vec![Check::at_least("error decay exponent", -error_fit.slope, expected - 0.2)];
    for row in &rows {
        checks.push(Check::at_most(
            format!("envelope deviation at R={}", row.r),
            (row.envelope_ratio - 1.0).abs(),
            ENVELOPE_TOLERANCE,
        ));
    }
    Ok(ModelErrorReport {
        body: body.id(),
        direction: u,
        phase_offset: offset,
        rows,
        decay_exponent: -error_fit.slope,
        error_fit,
        checks,
    })
}
