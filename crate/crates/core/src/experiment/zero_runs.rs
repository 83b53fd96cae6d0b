//! Shell sampling, X-set entropy scaling and near-integrality statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use super::config::ExperimentConfig;
use super::report::{coord_names, fmt_vec, Check, Report, Table};
use super::spectrum_runs::{pipeline_ladder, PipelineRow};
use super::transform_runs::random_frequency;
use crate::error::{Error, Result};
use crate::geometry::{Shape, Smoothness};
use crate::oracle::bessel_zeros;
use crate::packing::{
    cell_upper_bound, fit_exponent, greedy_pack, greedy_pack_ordered, is_separated, ExponentFit, ScalingReport,
    ScalingRow, ScanOrder,
};
use crate::transform::{calibrated_phase_offset, cos_residual, TransformEvaluator};
use crate::vecmath::{add, dot, norm, normalized, scale};
use crate::zeroset::{radial_zeros, shell_index, x_set_from_shells, ScanOptions, XSample, ZeroSample};

/// Brute-force separation checks run on retained sets up to this size.
pub const BRUTE_FORCE_LIMIT: usize = 10_000;

/// Allowed shift of the greedy exponent when the scan order is reversed.
pub const ORDER_SHIFT_LIMIT: f64 = 0.1;

/// Allowed shift of the upper-bound exponent when `c_δ` is doubled.
pub const THICKENING_SHIFT_LIMIT: f64 = 0.15;

/// Zeros of `J_{d/2}(2π r t)` in `t`, enough to pass radius `t_max`.
fn ball_shell_radii(d: usize, r: f64, t_max: f64) -> Vec<f64> {
    let count = (2.0 * r * t_max).ceil() as usize + 4;
    bessel_zeros(d as u32, count)
        .into_iter()
        .map(|j| j / (2.0 * PI * r))
        .collect()
}

fn nearest_gap(sorted: &[f64], t: f64) -> f64 {
    let i = sorted.partition_point(|&x| x < t);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - t).abs());
    }
    if i > 0 {
        best = best.min((t - sorted[i - 1]).abs());
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialCheck {
    pub directions: usize,
    pub zeros_per_direction: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellRow {
    pub r: f64,
    pub rays: usize,
    pub zeros: usize,
    /// Largest distance to an oracle root, for balls.
    pub max_oracle_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellsReport {
    pub body: String,
    pub radial: Option<RadialCheck>,
    pub rows: Vec<ShellRow>,
    #[serde(skip)]
    pub samples: Vec<(f64, ZeroSample)>,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for ShellsReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        let d = self.samples.first().map_or(0, |(_, z)| z.point.len());
        let mut header: Vec<String> = ["R", "ray", "shell", "radius", "residual", "bracket_lo", "bracket_hi"]
            .map(String::from)
            .to_vec();
        header.extend(coord_names("xi", d));
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for (r, z) in &self.samples {
            let mut row = vec![
                r.to_string(),
                z.ray.to_string(),
                z.shell.to_string(),
                z.radius.to_string(),
                z.residual.to_string(),
                z.bracket.0.to_string(),
                z.bracket.1.to_string(),
            ];
            row.extend(fmt_vec(&z.point));
            t.push(row);
        }
        t
    }
}

/// Tolerance for shell radii against the independent Bessel roots.
pub const SHELL_AGREEMENT: f64 = 1e-6;

/// Number of radial zeros compared per direction.
pub const RADIAL_ZEROS: usize = 20;

/// Radial zeros along `samples` random directions (balls only) and the shell
/// samples of `B` at every `R`.
pub fn run_shells(cfg: &ExperimentConfig) -> Result<ShellsReport> {
    let eval = cfg.evaluator()?;
    let body = &cfg.body;
    let d = body.dim();
    let ball_radius = match body.shape() {
        Shape::Ball { radius } => Some(*radius),
        _ => None,
    };
    let mut checks = Vec::new();
    let radial = match ball_radius {
        Some(rad) if cfg.samples > 0 => {
            let oracle: Vec<f64> = bessel_zeros(d as u32, RADIAL_ZEROS)
                .into_iter()
                .map(|j| j / (2.0 * PI * rad))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut max_deviation = 0.0f64;
            let t1 = oracle[RADIAL_ZEROS - 1] + 0.25 / rad;
            for _ in 0..cfg.samples {
                let u = random_frequency(&mut rng, d, 1.0, 1.0);
                let zs = radial_zeros(&eval, &u, 0.05 / rad, t1, &ScanOptions::default())?;
                if zs.len() < RADIAL_ZEROS {
                    return Err(Error::Resolution(format!(
                        "found {} of the first {RADIAL_ZEROS} zeros along {u:?}",
                        zs.len()
                    )));
                }
                for (z, t) in zs.iter().zip(&oracle).take(RADIAL_ZEROS) {
                    max_deviation = max_deviation.max((z.radius - t).abs());
                }
            }
            checks.push(Check::at_most("radial zeros vs Bessel roots", max_deviation, SHELL_AGREEMENT));
            Some(RadialCheck {
                directions: cfg.samples,
                zeros_per_direction: RADIAL_ZEROS,
                max_deviation,
            })
        }
        _ => None,
    };

    let cone = cfg.cone()?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for &r in &cfg.r_list {
        let ball = cfg.ball(r)?;
        let zs = shell_index(&eval, &cone, &ball, &cfg.shell_options())?;
        let rays = zs.iter().map(|z| z.ray).max().map_or(0, |m| m + 1);
        let max_oracle_deviation = ball_radius.map(|rad| {
            let t_max = norm(&ball.center) + ball.radius;
            let roots = ball_shell_radii(d, rad, t_max);
            zs.iter().map(|z| nearest_gap(&roots, z.radius)).fold(0.0, f64::max)
        });
        checks.push(Check::at_least(format!("zeros found at R={r}"), zs.len() as f64, 1.0));
        if let Some(dev) = max_oracle_deviation {
            checks.push(Check::at_most(format!("shell radii vs Bessel roots at R={r}"), dev, SHELL_AGREEMENT));
        }
        rows.push(ShellRow {
            r,
            rays,
            zeros: zs.len(),
            max_oracle_deviation,
        });
        samples.extend(zs.into_iter().map(|z| (r, z)));
    }
    Ok(ShellsReport {
        body: body.id(),
        radial,
        rows,
        samples,
        checks,
    })
}

/// Entropy bounds of one `(R, η, c_δ)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XsetCell {
    pub r: f64,
    pub eta_index: usize,
    pub c_delta: f64,
    pub tol: f64,
    pub shells: usize,
    pub samples: usize,
    pub entropy_lower: usize,
    pub entropy_lower_reverse: usize,
    pub entropy_upper: usize,
    /// Brute-force separation of the retained set; `None` above the size limit.
    pub separated: Option<bool>,
}

/// Exponent fits of one `(η, c_δ)` series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaScaling {
    pub eta_index: usize,
    pub c_delta: f64,
    pub scaling: ScalingReport,
    pub lower_reverse: ExponentFit,
    /// False when X is empty at some radius; the fit then has no meaning as a growth rate.
    pub nonempty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XsetEntropyReport {
    pub body: String,
    /// `x-set` samples the zero set; `spectrum` runs the lattice construction.
    pub route: &'static str,
    pub etas: Vec<Vec<f64>>,
    pub cells: Vec<XsetCell>,
    pub series: Vec<EtaScaling>,
    pub pipeline: Vec<PipelineRow>,
    /// Largest upper-bound exponent over η at the configured `c_δ`.
    pub max_upper_exponent: Option<f64>,
    /// The same with `2 c_δ`.
    pub max_upper_exponent_doubled: Option<f64>,
    /// Largest per-η change of the upper exponent under doubling, over η whose
    /// X is nonempty at every radius for both thickenings.
    pub max_thickening_shift: Option<f64>,
    /// Index of the η attaining `max_thickening_shift`.
    pub thickening_shift_eta: Option<usize>,
    /// η left out of the shift because X vanishes at some radius.
    pub bounded_etas: Vec<usize>,
    /// Largest per-η change of the lower exponent under reversed scan order.
    pub max_order_shift: f64,
    pub lower_fit: Option<ExponentFit>,
    #[serde(skip)]
    pub samples: Vec<(f64, usize, XSample)>,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for XsetEntropyReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        if self.route == "spectrum" {
            return super::spectrum_runs::pipeline_table(&self.pipeline);
        }
        let d = self.etas.first().map_or(0, Vec::len);
        let mut header: Vec<String> = ["R", "eta_index"].map(String::from).to_vec();
        header.extend(coord_names("eta", d));
        header.extend(
            [
                "c_delta",
                "tol",
                "shells",
                "samples",
                "entropy_lower",
                "entropy_lower_reverse",
                "entropy_upper",
                "separated",
            ]
            .map(String::from),
        );
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for c in &self.cells {
            let mut row = vec![c.r.to_string(), c.eta_index.to_string()];
            row.extend(fmt_vec(&self.etas[c.eta_index]));
            row.extend([
                c.c_delta.to_string(),
                c.tol.to_string(),
                c.shells.to_string(),
                c.samples.to_string(),
                c.entropy_lower.to_string(),
                c.entropy_lower_reverse.to_string(),
                c.entropy_upper.to_string(),
                c.separated.map_or("unchecked".into(), |b| b.to_string()),
            ]);
            t.push(row);
        }
        t
    }
}

impl XsetEntropyReport {
    /// Per-sample rows: `R, eta_index, ξ, ξ + η, delta`.
    pub fn sample_table(&self) -> Table {
        let d = self.etas.first().map_or(0, Vec::len);
        let mut header: Vec<String> = ["R", "eta_index"].map(String::from).to_vec();
        header.extend(coord_names("xi", d));
        header.extend(coord_names("shifted", d));
        header.push("delta".into());
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for (r, k, s) in &self.samples {
            let mut row = vec![r.to_string(), k.to_string()];
            row.extend(fmt_vec(&s.base.point));
            row.extend(fmt_vec(&s.shifted));
            row.push(s.delta.to_string());
            t.push(row);
        }
        t
    }
}

/// Exponent threshold for the upper bound of a curved body in dimension `d`.
pub fn upper_exponent_limit(cfg: &ExperimentConfig) -> f64 {
    let d = cfg.body.dim() as f64;
    match cfg.body.smoothness() {
        Smoothness::Smooth => d - 1.0 + 0.3,
        Smoothness::Piecewise => d - 0.5 + 0.2,
    }
}

/// X samples at every `(R, η)`, thickened with `c_δ/R` and `2c_δ/R`.
///
/// Cubes take the lattice-spectrum route instead, whose entropy grows like `R^d`.
pub fn run_xset_entropy(cfg: &ExperimentConfig) -> Result<XsetEntropyReport> {
    if matches!(cfg.body.shape(), Shape::Cube { .. }) {
        return xset_via_spectrum(cfg);
    }
    let eval = cfg.evaluator()?;
    let cone = cfg.cone()?;
    let d = cfg.body.dim();
    let c_list = [cfg.c_delta, 2.0 * cfg.c_delta];
    let mut cells = Vec::new();
    let mut kept_samples = Vec::new();
    for &r in &cfg.r_list {
        let ball = cfg.ball(r)?;
        let shells = shell_index(&eval, &cone, &ball, &cfg.shell_options())?;
        for (k, eta) in cfg.eta.iter().enumerate() {
            // The nearest root within the wider window is also the nearest within the narrower one.
            let wide = x_set_from_shells(&eval, &shells, eta, &ball, c_list[1] / r)?;
            for &c in &c_list {
                let tol = c / r;
                let xs: Vec<&XSample> = wide.iter().filter(|s| s.delta <= tol).collect();
                let points: Vec<Vec<f64>> = xs.iter().map(|s| s.base.point.clone()).collect();
                let fwd = greedy_pack(&points, 1.0)?;
                let rev = greedy_pack_ordered(&points, 1.0, ScanOrder::Reverse)?;
                let separated = (fwd.count <= BRUTE_FORCE_LIMIT).then(|| is_separated(&fwd.retained, 1.0));
                cells.push(XsetCell {
                    r,
                    eta_index: k,
                    c_delta: c,
                    tol,
                    shells: shells.len(),
                    samples: points.len(),
                    entropy_lower: fwd.count,
                    entropy_lower_reverse: rev.count,
                    entropy_upper: cell_upper_bound(&points, d),
                    separated,
                });
                if cfg.write_samples && c == cfg.c_delta {
                    kept_samples.extend(xs.into_iter().map(|s| (r, k, s.clone())));
                }
            }
        }
    }

    let mut series = Vec::new();
    for k in 0..cfg.eta.len() {
        for &c in &c_list {
            let mine: Vec<&XsetCell> = cells.iter().filter(|x| x.eta_index == k && x.c_delta == c).collect();
            let rows = mine
                .iter()
                .map(|x| ScalingRow {
                    r: x.r,
                    entropy_lower: x.entropy_lower,
                    entropy_upper: x.entropy_upper,
                    samples: x.samples,
                    tol: x.tol,
                })
                .collect();
            let scaling = ScalingReport::new(cfg.body_id.clone(), cfg.eta[k].clone(), rows)?;
            let reverse: Vec<(f64, f64)> = mine
                .iter()
                .map(|x| (x.r, x.entropy_lower_reverse.max(1) as f64))
                .collect();
            series.push(EtaScaling {
                eta_index: k,
                c_delta: c,
                scaling,
                lower_reverse: fit_exponent(&reverse)?,
                nonempty: mine.iter().all(|x| x.samples > 0),
            });
        }
    }
    let max_upper = |c: f64| {
        series
            .iter()
            .filter(|s| s.c_delta == c)
            .map(|s| s.scaling.upper_fit.slope)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let max_upper_exponent = max_upper(c_list[0]);
    let max_upper_exponent_doubled = max_upper(c_list[1]);
    let pair = |k: usize| {
        let at = |c: f64| series.iter().find(|s| s.eta_index == k && s.c_delta == c);
        (at(c_list[0]), at(c_list[1]))
    };
    let (fitted, bounded_etas): (Vec<usize>, Vec<usize>) = (0..cfg.eta.len()).partition(|&k| match pair(k) {
        (Some(a), Some(b)) => a.nonempty && b.nonempty,
        _ => false,
    });
    let (thickening_shift_eta, max_thickening_shift) = fitted
        .iter()
        .filter_map(|&k| match pair(k) {
            (Some(a), Some(b)) => Some((Some(k), (b.scaling.upper_fit.slope - a.scaling.upper_fit.slope).abs())),
            _ => None,
        })
        .fold((None, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    let max_order_shift = series
        .iter()
        .map(|s| (s.scaling.lower_fit.slope - s.lower_reverse.slope).abs())
        .fold(0.0, f64::max);

    let limit = upper_exponent_limit(cfg);
    let mut checks = vec![Check::at_most("max upper exponent over eta", max_upper_exponent, limit)];
    if cfg.body.smoothness() == Smoothness::Smooth {
        checks.push(Check::at_most(
            match thickening_shift_eta {
                Some(k) => format!("upper exponent shift under doubled c_delta (worst eta {k})"),
                None => "upper exponent shift under doubled c_delta".into(),
            },
            max_thickening_shift,
            THICKENING_SHIFT_LIMIT,
        ));
    }
    checks.push(Check::holds(
        "lower <= upper on every cell",
        cells.iter().all(|c| c.entropy_lower <= c.entropy_upper),
    ));
    checks.push(Check::holds(
        "retained sets pass brute-force separation",
        cells.iter().all(|c| c.separated != Some(false)),
    ));
    checks.push(Check::at_most("exponent shift under reversed order", max_order_shift, ORDER_SHIFT_LIMIT));
    Ok(XsetEntropyReport {
        body: cfg.body_id.clone(),
        route: "x-set",
        etas: cfg.eta.clone(),
        cells,
        series,
        pipeline: Vec::new(),
        max_upper_exponent: Some(max_upper_exponent),
        max_upper_exponent_doubled: Some(max_upper_exponent_doubled),
        max_thickening_shift: Some(max_thickening_shift),
        thickening_shift_eta,
        bounded_etas,
        max_order_shift,
        lower_fit: None,
        samples: kept_samples,
        checks,
    })
}

fn xset_via_spectrum(cfg: &ExperimentConfig) -> Result<XsetEntropyReport> {
    let ladder = pipeline_ladder(cfg)?;
    let d = cfg.body.dim() as f64;
    let mut checks = vec![Check::at_least("lower exponent", ladder.lower_fit.slope, d - 0.1)];
    checks.extend(ladder.checks());
    Ok(XsetEntropyReport {
        body: cfg.body_id.clone(),
        route: "spectrum",
        etas: ladder.rows.iter().map(|r| r.eta.clone()).collect(),
        cells: Vec::new(),
        series: Vec::new(),
        max_upper_exponent: None,
        max_upper_exponent_doubled: None,
        max_thickening_shift: None,
        thickening_shift_eta: None,
        bounded_etas: Vec::new(),
        max_order_shift: ladder.order_shift(),
        lower_fit: Some(ladder.lower_fit),
        pipeline: ladder.rows,
        samples: Vec::new(),
        checks,
    })
}

/// 90th percentile by nearest rank; `NaN` for an empty list.
pub fn p90(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = (0.9 * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub r: f64,
    pub samples: usize,
    /// `|cos Φ(ξ)|`.
    pub p90_s1: f64,
    /// `dist(2π(P(ξ+η) − P(ξ)), πZ)/π`.
    pub p90_s2: f64,
    /// `dist(2π ∇P(ξ)·η, πZ)/π`.
    pub p90_s3: f64,
    pub p90_s2_minus_s3: f64,
    /// Points midway between consecutive zeros on a ray.
    pub control_samples: usize,
    pub control_p90_s1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualStatsReport {
    pub body: String,
    pub phase_offset: f64,
    pub rows: Vec<ResidualRow>,
    /// Decay exponents (`−slope`) of the p90 columns.
    pub decay_s1: f64,
    pub decay_s2: f64,
    pub decay_s3: f64,
    pub decay_s2_minus_s3: f64,
    pub control_decay: f64,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report for ResidualStatsReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "R",
            "samples",
            "p90_s1",
            "p90_s2",
            "p90_s3",
            "p90_s2_minus_s3",
            "control_samples",
            "control_p90_s1",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.r.to_string(),
                r.samples.to_string(),
                r.p90_s1.to_string(),
                r.p90_s2.to_string(),
                r.p90_s3.to_string(),
                r.p90_s2_minus_s3.to_string(),
                r.control_samples.to_string(),
                r.control_p90_s1.to_string(),
            ]);
        }
        t
    }
}

/// Smallest decay exponent accepted for the residual statistics.
pub const RESIDUAL_DECAY: f64 = 0.7;

/// `|cos Φ|` and the near-integrality statistics over X samples pooled across η,
/// with the midpoints between shells as a negative control.
pub fn run_residual_stats(cfg: &ExperimentConfig) -> Result<ResidualStatsReport> {
    let eval: TransformEvaluator = cfg.evaluator()?;
    let body = &cfg.body;
    let cone = cfg.cone()?;
    let offset = calibrated_phase_offset();
    let mut rows = Vec::new();
    for &r in &cfg.r_list {
        let ball = cfg.ball(r)?;
        let shells = shell_index(&eval, &cone, &ball, &cfg.shell_options())?;
        let (mut s1, mut s2, mut s3, mut diff) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for eta in &cfg.eta {
            for x in x_set_from_shells(&eval, &shells, eta, &ball, cfg.c_delta / r)? {
                let xi = &x.base.point;
                let u = normalized(xi).ok_or_else(|| Error::domain("zero sample at the origin"))?;
                let grad = body.gauss_point(&u)?;
                let a = dist_to_integer(2.0 * (body.support(&add(xi, eta))? - body.support(xi)?));
                let b = dist_to_integer(2.0 * dot(&grad, eta));
                s1.push(cos_residual(body, xi, offset)?);
                s2.push(a);
                s3.push(b);
                diff.push((a - b).abs());
            }
        }
        let mut control = Vec::new();
        for w in shells.windows(2) {
            if w[0].ray == w[1].ray && w[1].shell == w[0].shell + 1 {
                let mid = scale(&w[0].direction, 0.5 * (w[0].radius + w[1].radius));
                control.push(cos_residual(body, &mid, offset)?);
            }
        }
        rows.push(ResidualRow {
            r,
            samples: s1.len(),
            p90_s1: p90(&s1),
            p90_s2: p90(&s2),
            p90_s3: p90(&s3),
            p90_s2_minus_s3: p90(&diff),
            control_samples: control.len(),
            control_p90_s1: p90(&control),
        });
    }
    let decay = |f: &dyn Fn(&ResidualRow) -> f64| -> Result<f64> {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.r, f(r))).collect();
        Ok(-fit_exponent(&pts)?.slope)
    };
    let decay_s1 = decay(&|r| r.p90_s1)?;
    let decay_s2 = decay(&|r| r.p90_s2)?;
    let decay_s3 = decay(&|r| r.p90_s3)?;
    let decay_s2_minus_s3 = decay(&|r| r.p90_s2_minus_s3)?;
    let control_decay = decay(&|r| r.control_p90_s1)?;
    let mut checks = vec![
        Check::at_least("decay of p90 |cos phi|", decay_s1, RESIDUAL_DECAY),
        Check::at_least("decay of p90 s2", decay_s2, RESIDUAL_DECAY),
        Check::at_least("decay of p90 s3", decay_s3, RESIDUAL_DECAY),
        Check::at_least("decay of p90 |s2 - s3|", decay_s2_minus_s3, RESIDUAL_DECAY),
        Check::at_most("control decay", control_decay, 0.1),
    ];
    for row in &rows {
        checks.push(Check::at_least(format!("control p90 at R={}", row.r), row.control_p90_s1, 0.5));
    }
    Ok(ResidualStatsReport {
        body: body.id(),
        phase_offset: offset,
        rows,
        decay_s1,
        decay_s2,
        decay_s3,
        decay_s2_minus_s3,
        control_decay,
        checks,
    })
}
