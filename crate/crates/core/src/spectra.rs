//! Orthogonality of exponential systems, lattice spectra of cubes and the
//! construction of large subsets of `X` from a spectrum.
//!
//! Exponentials `e^{2πi x·λ}` and `e^{2πi x·μ}` are orthogonal on `Ω` exactly
//! when `χ̂_Ω(λ − μ) = 0`. If `Λ` is a spectrum and `λ₁, λ₂ ∈ Λ`, every
//! `λ ∈ Λ` gives a point `ξ = λ − λ₂` with `ξ ∈ Z` and `ξ + (λ₂ − λ₁) ∈ Z`,
//! so a dense spectrum produces a dense subset of `X_{Ω, λ₂−λ₁, B}`.

use serde::Serialize;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{Body, FrequencyBall, Shape};
use crate::packing::{cell_upper_bound, greedy_pack};
use crate::transform::TransformEvaluator;
use crate::vecmath::{add, distance, lex_cmp, norm, sub};

/// Where a candidate spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    CubeLattice,
    UserSupplied,
}

/// Finite piece of a putative spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSpectrum {
    pub body: Body,
    pub points: Vec<Vec<f64>>,
    pub generator: Generator,
}

impl CandidateSpectrum {
    pub fn user_supplied(body: Body, points: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != body.dim()) {
            return Err(Error::domain(format!(
                "spectrum point {p:?} does not have dimension {}",
                body.dim()
            )));
        }
        Ok(CandidateSpectrum {
            body,
            points,
            generator: Generator::UserSupplied,
        })
    }
}

/// `|χ̂(λ − μ)|` under a given evaluator.
pub fn pair_orthogonality_with(eval: &TransformEvaluator, lambda: &[f64], mu: &[f64]) -> Result<f64> {
    if lambda == mu {
        return Err(Error::domain(
            "λ = μ: the inner product is the volume, not an orthogonality test",
        ));
    }
    Ok(eval.eval(&sub(lambda, mu))?.abs())
}

/// `|χ̂(λ − μ)|` with the most accurate evaluator available for the body.
pub fn pair_orthogonality(body: &Body, lambda: &[f64], mu: &[f64]) -> Result<f64> {
    pair_orthogonality_with(&TransformEvaluator::best(body.clone())?, lambda, mu)
}

/// `(1/(2s)) Z^d ∩ B` for the cube of half-side `s`, in lexicographic order.
pub fn lattice_spectrum(cube: &Body, ball: &FrequencyBall) -> Result<CandidateSpectrum> {
    let Shape::Cube { half_side } = cube.shape() else {
        return Err(Error::MethodUnavailable {
            method: "lattice_spectrum",
            reason: format!("lattice spectra are built for cubes, got {}", cube.kind_name()),
        });
    };
    let d = cube.dim();
    if ball.dim() != d {
        return Err(Error::domain("ball and cube dimensions differ"));
    }
    let h = 1.0 / (2.0 * half_side);
    let lo: Vec<i64> = ball.center.iter().map(|c| ((c - ball.radius) / h).floor() as i64).collect();
    let hi: Vec<i64> = ball.center.iter().map(|c| ((c + ball.radius) / h).ceil() as i64).collect();
    let mut idx = lo.clone();
    let mut points = Vec::new();
    loop {
        let p: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
        if ball.contains(&p) {
            points.push(p);
        }
        // Last coordinate varies fastest, giving lexicographic order.
        let mut j = d;
        loop {
            if j == 0 {
                return Ok(CandidateSpectrum {
                    body: cube.clone(),
                    points,
                    generator: Generator::CubeLattice,
                });
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] <= hi[j] {
                break;
            }
            idx[j] = lo[j];
        }
    }
}

/// Minimum pairwise distance, with a grid hash sized by an upper bound.
pub fn min_gap(points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InsufficientData("min_gap needs at least two points".into()));
    }
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    let mut best = sorted
        .windows(2)
        .map(|w| distance(w[0], w[1]))
        .fold(f64::INFINITY, f64::min);
    if best == 0.0 {
        return Ok(0.0);
    }
    // Any closer pair lies in neighbouring cells of side `best`.
    let side = best;
    let d = points[0].len();
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let key: Vec<i64> = p.iter().map(|v| (v / side).floor() as i64).collect();
        cells.entry(key).or_default().push(i);
    }
    for (key, members) in &cells {
        let mut offset = vec![-1i64; d];
        loop {
            let nb: Vec<i64> = key.iter().zip(&offset).map(|(k, o)| k + o).collect();
            if let Some(others) = cells.get(&nb) {
                for &i in members {
                    for &j in others {
                        if i < j {
                            best = best.min(distance(&points[i], &points[j]));
                        }
                    }
                }
            }
            let mut j = 0;
            while j < d {
                offset[j] += 1;
                if offset[j] <= 1 {
                    break;
                }
                offset[j] = -1;
                j += 1;
            }
            if j == d {
                break;
            }
        }
    }
    Ok(best)
}

/// Number of points of `points` in each ball.
pub fn density_count(points: &[Vec<f64>], balls: &[FrequencyBall]) -> Vec<usize> {
    balls
        .iter()
        .map(|b| points.iter().filter(|p| b.contains(p)).count())
        .collect()
}

/// Output of the spectrum-to-`X` construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineOutcome {
    pub r: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub eta: Vec<f64>,
    /// Ball `B` (centre, radius) containing all emitted points.
    pub ball: FrequencyBall,
    /// Balls `B₁` and `B₂` with `B₁ − B₂ ⊂ B`.
    pub ball1: FrequencyBall,
    pub ball2: FrequencyBall,
    /// Emitted points `λ − λ₂`, `λ ∈ B₂ ∩ Λ \ {λ₁, λ₂}`.
    pub points: Vec<Vec<f64>>,
    /// Largest `|χ̂|` over both differences of every emitted point.
    pub max_residual: f64,
    /// Points failing the membership check (zero when `Λ` is a spectrum).
    pub failures: usize,
    pub entropy_lower: usize,
    pub entropy_upper: usize,
}

/// Residual bound for the membership check of emitted points.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-10;

/// Builds a large subset of `X_{Ω,η,B}` from a candidate spectrum.
///
/// `B` is the ball of radius `R` at the origin; `B₁ = B₂` is the concentric
/// ball of radius `R/2`, so `B₁ − B₂ ⊂ B`. The pair `λ₁, λ₂ ∈ B₁ ∩ Λ` takes
/// `λ₁` closest to the centre and `λ₂` the closest point at distance in
/// `[0.5, 2]` (ties broken lexicographically).
pub fn spectrum_pipeline(spectrum: &CandidateSpectrum, r: f64) -> Result<PipelineOutcome> {
    let d = spectrum.body.dim();
    let origin = vec![0.0; d];
    let ball = FrequencyBall::new(origin.clone(), r)?;
    let ball1 = FrequencyBall::new(origin.clone(), 0.5 * r)?;
    let ball2 = ball1.clone();

    let in1: Vec<&Vec<f64>> = spectrum.points.iter().filter(|p| ball1.contains(p)).collect();
    let lambda1 = in1
        .iter()
        .min_by(|a, b| norm(a).total_cmp(&norm(b)).then_with(|| lex_cmp(a, b)))
        .ok_or_else(|| Error::DensityFailure(format!("B₁ of radius {} holds no spectrum point", 0.5 * r)))?;
    let lambda2 = in1
        .iter()
        .filter(|p| {
            let g = distance(p, lambda1);
            (0.5..=2.0).contains(&g)
        })
        .min_by(|a, b| {
            distance(a, lambda1)
                .total_cmp(&distance(b, lambda1))
                .then_with(|| lex_cmp(a, b))
        })
        .ok_or_else(|| {
            Error::DensityFailure("no pair λ₁, λ₂ in B₁ at distance within [0.5, 2]".into())
        })?;
    let (lambda1, lambda2) = ((*lambda1).clone(), (*lambda2).clone());
    let eta = sub(&lambda2, &lambda1);

    let eval = TransformEvaluator::best(spectrum.body.clone())?;
    let mut points = Vec::new();
    let mut max_residual = 0.0f64;
    let mut failures = 0;
    for lambda in spectrum.points.iter().filter(|p| ball2.contains(p)) {
        if *lambda == lambda1 || *lambda == lambda2 {
            continue;
        }
        let xi = sub(lambda, &lambda2);
        let shifted = add(&xi, &eta);
        let a = pair_orthogonality_with(&eval, lambda, &lambda2)?;
        let b = pair_orthogonality_with(&eval, lambda, &lambda1)?;
        let res = a.max(b);
        max_residual = max_residual.max(res);
        if res > MEMBERSHIP_TOLERANCE || !ball.contains(&xi) || !ball.contains(&shifted) {
            failures += 1;
        }
        points.push(xi);
    }
    let lower = greedy_pack(&points, 1.0)?.count;
    let upper = cell_upper_bound(&points, d);
    Ok(PipelineOutcome {
        r,
        lambda1,
        lambda2,
        eta,
        ball,
        ball1,
        ball2,
        points,
        max_residual,
        failures,
        entropy_lower: lower,
        entropy_upper: upper,
    })
}
