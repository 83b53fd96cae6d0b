//! Lattice spectra of cubes, the spectrum-to-X construction across radii,
//! and batch evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;

use super::config::ExperimentConfig;
use super::report::{coord_names, fmt_vec, Check, Report, Table};
use super::zero_runs::{BRUTE_FORCE_LIMIT, ORDER_SHIFT_LIMIT};
use crate::error::{Error, Result};
use crate::geometry::{FrequencyBall, Shape};
use crate::packing::{fit_exponent, greedy_pack, greedy_pack_ordered, is_separated, ExponentFit, ScanOrder};
use crate::spectra::{density_count, lattice_spectrum, min_gap, pair_orthogonality_with, spectrum_pipeline};
use crate::transform::{Method, Resolution, TransformEvaluator};
use crate::vecmath::add;
use crate::zeroset::zero_distance;

/// Distance to the zero set accepted by the independent membership check.
pub const REVERIFY_TOLERANCE: f64 = 1e-8;

/// One radius of the spectrum-to-X construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineRow {
    pub r: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub eta: Vec<f64>,
    pub spectrum_points: usize,
    pub emitted: usize,
    /// Points failing the membership check inside the construction.
    pub failures: usize,
    /// Points whose `ξ` or `ξ + η` lies farther than 1e-8 from a zero along its ray.
    pub reverified_failures: usize,
    pub max_residual: f64,
    pub entropy_lower: usize,
    pub entropy_lower_reverse: usize,
    pub entropy_upper: usize,
    pub separated: Option<bool>,
}

/// Pipeline rows across the `R` ladder with the fitted lower exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineLadder {
    pub rows: Vec<PipelineRow>,
    pub lower_fit: ExponentFit,
    pub lower_reverse_fit: ExponentFit,
}

impl PipelineLadder {
    pub fn order_shift(&self) -> f64 {
        (self.lower_fit.slope - self.lower_reverse_fit.slope).abs()
    }

    /// Membership, sandwich, separation and order checks.
    pub fn checks(&self) -> Vec<Check> {
        let sum = |f: &dyn Fn(&PipelineRow) -> usize| self.rows.iter().map(f).sum::<usize>() as f64;
        vec![
            Check::at_most("membership failures", sum(&|r| r.failures), 0.0),
            Check::at_most("independent re-verification failures", sum(&|r| r.reverified_failures), 0.0),
            Check::holds(
                "lower <= upper on every radius",
                self.rows.iter().all(|r| r.entropy_lower <= r.entropy_upper),
            ),
            Check::holds(
                "retained sets pass brute-force separation",
                self.rows.iter().all(|r| r.separated != Some(false)),
            ),
            Check::at_most("exponent shift under reversed order", self.order_shift(), ORDER_SHIFT_LIMIT),
        ]
    }
}

fn require_cube(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.body.shape() {
        Shape::Cube { half_side } => Ok(*half_side),
        _ => Err(Error::config(
            "kind",
            format!("the lattice spectrum exists for cubes, got {}", cfg.body.kind_name()),
        )),
    }
}

fn origin_ball(d: usize, r: f64) -> Result<FrequencyBall> {
    FrequencyBall::new(vec![0.0; d], r)
}

/// Runs the construction on the lattice spectrum at every `R`.
pub fn pipeline_ladder(cfg: &ExperimentConfig) -> Result<PipelineLadder> {
    require_cube(cfg)?;
    let d = cfg.body.dim();
    let eval = TransformEvaluator::closed(cfg.body.clone())?;
    let mut rows = Vec::new();
    for &r in &cfg.r_list {
        let spectrum = lattice_spectrum(&cfg.body, &origin_ball(d, r)?)?;
        let out = spectrum_pipeline(&spectrum, r)?;
        let mut reverified_failures = 0;
        for xi in &out.points {
            let a = zero_distance(&eval, xi)?;
            let b = zero_distance(&eval, &add(xi, &out.eta))?;
            if !(a.found && b.found && a.distance <= REVERIFY_TOLERANCE && b.distance <= REVERIFY_TOLERANCE) {
                reverified_failures += 1;
            }
        }
        let fwd = greedy_pack(&out.points, 1.0)?;
        let rev = greedy_pack_ordered(&out.points, 1.0, ScanOrder::Reverse)?;
        rows.push(PipelineRow {
            r,
            spectrum_points: spectrum.points.len(),
            emitted: out.points.len(),
            failures: out.failures,
            reverified_failures,
            max_residual: out.max_residual,
            entropy_lower: out.entropy_lower,
            entropy_lower_reverse: rev.count,
            entropy_upper: out.entropy_upper,
            separated: (fwd.count <= BRUTE_FORCE_LIMIT).then(|| is_separated(&fwd.retained, 1.0)),
            lambda1: out.lambda1,
            lambda2: out.lambda2,
            eta: out.eta,
        });
    }
    let fit = |f: &dyn Fn(&PipelineRow) -> usize| {
        fit_exponent(&rows.iter().map(|x| (x.r, f(x).max(1) as f64)).collect::<Vec<_>>())
    };
    Ok(PipelineLadder {
        lower_fit: fit(&|x| x.entropy_lower)?,
        lower_reverse_fit: fit(&|x| x.entropy_lower_reverse)?,
        rows,
    })
}

fn pipeline_header(d: usize) -> Vec<String> {
    let mut h = vec!["R".to_string()];
    h.extend(coord_names("lambda1", d));
    h.extend(coord_names("lambda2", d));
    h.extend(coord_names("eta", d));
    h.extend(
        [
            "spectrum_points",
            "emitted",
            "failures",
            "reverified_failures",
            "max_residual",
            "entropy_lower",
            "entropy_lower_reverse",
            "entropy_upper",
            "separated",
        ]
        .map(String::from),
    );
    h
}

fn pipeline_cells(r: &PipelineRow) -> Vec<String> {
    let mut row = vec![r.r.to_string()];
    row.extend(fmt_vec(&r.lambda1));
    row.extend(fmt_vec(&r.lambda2));
    row.extend(fmt_vec(&r.eta));
    row.extend([
        r.spectrum_points.to_string(),
        r.emitted.to_string(),
        r.failures.to_string(),
        r.reverified_failures.to_string(),
        r.max_residual.to_string(),
        r.entropy_lower.to_string(),
        r.entropy_lower_reverse.to_string(),
        r.entropy_upper.to_string(),
        r.separated.map_or("unchecked".into(), |b| b.to_string()),
    ]);
    row
}

pub fn pipeline_table(rows: &[PipelineRow]) -> Table {
    let d = rows.first().map_or(0, |r| r.eta.len());
    let mut t = Table {
        header: pipeline_header(d),
        rows: Vec::new(),
    };
    for r in rows {
        t.push(pipeline_cells(r));
    }
    t
}

/// Orthogonality certificate on random pairs of one spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateRow {
    pub r: f64,
    pub pairs: usize,
    pub max_closed: f64,
    pub max_herz: f64,
    pub min_gap: f64,
    /// Spectrum points within radius `R` of the origin.
    pub density: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeSpectrumReport {
    pub body: String,
    pub ladder: PipelineLadder,
    pub certificates: Vec<CertificateRow>,
    pub density_fit: ExponentFit,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for CubeSpectrumReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        let mut t = pipeline_table(&self.ladder.rows);
        t.header
            .extend(["cert_pairs", "cert_max_closed", "cert_max_herz", "min_gap", "density"].map(String::from));
        for (row, c) in t.rows.iter_mut().zip(&self.certificates) {
            row.extend([
                c.pairs.to_string(),
                c.max_closed.to_string(),
                c.max_herz.to_string(),
                c.min_gap.to_string(),
                c.density.to_string(),
            ]);
        }
        t
    }
}

/// Boundary-rule residual accepted on exact lattice differences.
pub const HERZ_CERTIFICATE: f64 = 1e-8;

/// Lattice spectrum, its certificates and the construction at every `R`.
pub fn run_cube_spectrum(cfg: &ExperimentConfig) -> Result<CubeSpectrumReport> {
    let s = require_cube(cfg)?;
    let d = cfg.body.dim();
    let closed = TransformEvaluator::closed(cfg.body.clone())?;
    let herz = TransformEvaluator::new(cfg.body.clone(), Method::Herz, Resolution::Fixed(cfg.herz_resolution))
        .map_err(|e| Error::config("herz_resolution", e.to_string()))?;
    let ladder = pipeline_ladder(cfg)?;
    let r_max = cfg.r_list.iter().cloned().fold(0.0, f64::max);
    let largest = lattice_spectrum(&cfg.body, &origin_ball(d, r_max)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut certificates = Vec::new();
    for &r in &cfg.r_list {
        let spectrum = lattice_spectrum(&cfg.body, &origin_ball(d, r)?)?;
        let n = spectrum.points.len();
        let (mut max_closed, mut max_herz) = (0.0f64, 0.0f64);
        if n >= 2 {
            for _ in 0..cfg.samples {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                let (a, b) = (&spectrum.points[i], &spectrum.points[j]);
                max_closed = max_closed.max(pair_orthogonality_with(&closed, a, b)?);
                max_herz = max_herz.max(pair_orthogonality_with(&herz, a, b)?);
            }
        }
        certificates.push(CertificateRow {
            r,
            pairs: if n >= 2 { cfg.samples } else { 0 },
            max_closed,
            max_herz,
            min_gap: min_gap(&spectrum.points)?,
            density: density_count(&largest.points, &[origin_ball(d, r)?])[0],
        });
    }
    let density_fit = fit_exponent(
        &certificates
            .iter()
            .map(|c| (c.r, c.density as f64))
            .collect::<Vec<_>>(),
    )?;
    let spacing = 1.0 / (2.0 * s);
    let fold = |f: &dyn Fn(&CertificateRow) -> f64| certificates.iter().map(f).fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_most("orthogonality certificate (closed)", fold(&|c| c.max_closed), 0.0),
        Check::at_most("orthogonality certificate (herz)", fold(&|c| c.max_herz), HERZ_CERTIFICATE),
        Check::at_most("min gap equals lattice spacing", fold(&|c| (c.min_gap - spacing).abs()), 0.0),
        Check::at_most("density exponent deviation", (density_fit.slope - d as f64).abs(), 0.1),
        Check::at_least("lower exponent", ladder.lower_fit.slope, d as f64 - 0.1),
    ];
    checks.extend(ladder.checks());
    Ok(CubeSpectrumReport {
        body: cfg.body_id.clone(),
        ladder,
        certificates,
        density_fit,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub body: String,
    pub method: String,
    pub resolution: String,
    #[serde(skip)]
    pub rows: Vec<(Vec<f64>, f64)>,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for EvalReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        let d = self.rows.first().map_or(0, |(x, _)| x.len());
        let mut header = coord_names("xi", d);
        header.push("value".into());
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for (xi, v) in &self.rows {
            let mut row = fmt_vec(xi);
            row.push(v.to_string());
            t.push(row);
        }
        t
    }
}

/// Evaluates the transform at every row of a CSV file of frequencies.
/// A first row that does not parse as numbers is taken as a header.
pub fn eval_batch(cfg: &ExperimentConfig, input: &Path) -> Result<EvalReport> {
    let eval = cfg.evaluator()?;
    let d = cfg.body.dim();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(input)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let xi = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Io(format!("{}: row {}: {e}", input.display(), i + 1))),
        };
        if xi.len() != d {
            return Err(Error::domain(format!(
                "row {} has {} coordinates, the body has dimension {d}",
                i + 1,
                xi.len()
            )));
        }
        let v = eval.eval(&xi)?;
        rows.push((xi, v));
    }
    Ok(EvalReport {
        body: cfg.body_id.clone(),
        method: eval.method().to_string(),
        resolution: eval.resolution_label(),
        rows,
        checks: Vec::new(),
    })
}
