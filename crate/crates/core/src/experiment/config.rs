//! Flat `key = value` experiment configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Body, FrequencyBall, NormalCone, Shape, Smoothness};
use crate::transform::{Method, Resolution, TransformEvaluator};
use crate::vecmath::{norm, normalized, orthonormal_complement, scale};
use crate::zeroset::{ScanOptions, ShellOptions};

/// Every key accepted in a configuration file or through `--param`.
pub const CONFIG_KEYS: [&str; 21] = [
    "kind",
    "dim",
    "radius",
    "half_side",
    "axes",
    "rho",
    "R",
    "eta",
    "seed",
    "out_dir",
    "format",
    "c_delta",
    "angular_c",
    "cone_axis",
    "cone_half_angle",
    "ball_distance",
    "method",
    "quad_resolution",
    "herz_resolution",
    "samples",
    "write_samples",
];

/// Experiment drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    OracleCheck,
    ModelError,
    Shells,
    XsetEntropy,
    CubeSpectrum,
    ResidualStats,
    /// Batch evaluation of the transform at frequencies read from a CSV file.
    Eval,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::OracleCheck,
        Experiment::ModelError,
        Experiment::Shells,
        Experiment::XsetEntropy,
        Experiment::CubeSpectrum,
        Experiment::ResidualStats,
        Experiment::Eval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::OracleCheck => "oracle-check",
            Experiment::ModelError => "model-error",
            Experiment::Shells => "shells",
            Experiment::XsetEntropy => "xset-entropy",
            Experiment::CubeSpectrum => "cube-spectrum",
            Experiment::ResidualStats => "residual-stats",
            Experiment::Eval => "eval",
        }
    }

    /// File stem of the reports, e.g. `xset_entropy`.
    pub fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::config("experiment", format!("unknown experiment `{s}`")))
    }
}

/// Which report files are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Row table as CSV plus a JSON summary.
    Csv,
    /// A single JSON document holding the summary and all rows.
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::config("format", format!("expected `csv` or `json`, got `{s}`"))),
        }
    }
}

/// Unresolved key/value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn new() -> Self {
        RawConfig::default()
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    line,
                    format!("line {} is not of the form key = value", lineno + 1),
                ));
            };
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        RawConfig::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::config(key, "unknown configuration key"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::config(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|v| parse_list(key, v)).transpose()
    }
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::config(key, format!("`{}`: {e}", t.trim())))
        })
        .collect()
}

/// Parses vectors separated by `;`, coordinates by `,`.
pub fn parse_vectors(key: &str, text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_list(key, t))
        .collect()
}

/// Fully resolved experiment settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub body: Body,
    pub body_id: String,
    #[serde(rename = "R")]
    pub r_list: Vec<f64>,
    pub eta: Vec<Vec<f64>>,
    /// How the η list was obtained: `config` or `default-grid`.
    pub eta_source: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Format,
    pub c_delta: f64,
    pub angular_c: f64,
    pub cone_axis: Vec<f64>,
    pub cone_half_angle: f64,
    /// Centre of `B` in units of its radius, along the cone axis.
    pub ball_distance: f64,
    /// `None` picks the closed form, or auto-resolved quadrature when there is none.
    pub method: Option<Method>,
    /// `None` means the resolution is chosen from the frequency.
    pub quad_resolution: Option<usize>,
    pub herz_resolution: usize,
    pub samples: usize,
    pub write_samples: bool,
}

fn default_ladder(d: usize) -> Vec<f64> {
    if d >= 3 {
        vec![8.0, 16.0, 32.0]
    } else {
        vec![16.0, 32.0, 64.0, 128.0]
    }
}

/// Default cone axis. For round bodies it keeps every grid η direction farther
/// from the axis than the angular radius of `B`, so no grid η is radial inside
/// `B`; the rounded square uses the diagonal through its corner arc.
fn default_axis(body: &Body) -> Vec<f64> {
    match (body.dim(), body.shape()) {
        (2, Shape::RoundedSquare { .. }) => vec![FRAC_PI_4.cos(), FRAC_PI_4.sin()],
        (2, _) => vec![FRAC_PI_8.cos(), FRAC_PI_8.sin()],
        _ => normalized(&[0.8865, -0.3669, 0.2820]).expect("non-zero axis"),
    }
}

/// The 8 (d = 2) or 26 (d = 3) grid directions plus 4 seeded random vectors
/// with `|η| ∈ [0.5, 2]`.
pub fn default_eta_grid(d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut etas: Vec<Vec<f64>> = if d == 2 {
        (0..8)
            .map(|k| {
                let t = k as f64 * FRAC_PI_4;
                vec![t.cos(), t.sin()]
            })
            .collect()
    } else {
        let mut v = Vec::new();
        for i in -1i32..=1 {
            for j in -1i32..=1 {
                for k in -1i32..=1 {
                    if (i, j, k) != (0, 0, 0) {
                        let p = [i as f64, j as f64, k as f64];
                        v.push(scale(&p, 1.0 / norm(&p)));
                    }
                }
            }
        }
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let m: f64 = rng.gen_range(0.5..=2.0);
        let u = loop {
            let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norm(&p);
            if n > 0.1 && n <= 1.0 {
                break scale(&p, 1.0 / n);
            }
        };
        etas.push(scale(&u, m));
    }
    etas
}

fn body_from(raw: &RawConfig, experiment: Experiment) -> Result<Body> {
    let default_kind = if experiment == Experiment::CubeSpectrum { "cube" } else { "ball" };
    let kind = raw.get("kind").unwrap_or(default_kind);
    let dim: Option<usize> = raw.parsed("dim")?;
    let wrap = |key: &'static str| move |e: Error| Error::config(key, e.to_string());
    let body = match kind {
        "ball" => {
            let r = raw.parsed("radius")?.unwrap_or(1.0);
            Body::ball(dim.unwrap_or(2), r).map_err(wrap("radius"))?
        }
        "cube" => {
            let s = raw.parsed("half_side")?.unwrap_or(0.5);
            Body::cube(dim.unwrap_or(2), s).map_err(wrap("half_side"))?
        }
        "ellipsoid" => {
            let axes = raw
                .list("axes")?
                .ok_or_else(|| Error::config("axes", "an ellipsoid needs its semi-axes"))?;
            if dim.is_some_and(|d| d != axes.len()) {
                return Err(Error::config("axes", "number of semi-axes differs from dim"));
            }
            Body::ellipsoid(&axes).map_err(wrap("axes"))?
        }
        "rounded-square" => {
            if dim.is_some_and(|d| d != 2) {
                return Err(Error::config("dim", "the rounded square is planar"));
            }
            let s = raw.parsed("half_side")?.unwrap_or(1.0);
            let rho = raw.parsed("rho")?.unwrap_or(0.25);
            Body::rounded_square(s, rho).map_err(wrap("rho"))?
        }
        other => {
            return Err(Error::config(
                "kind",
                format!("unknown body `{other}` (ball, cube, ellipsoid, rounded-square)"),
            ))
        }
    };
    if !(2..=3).contains(&body.dim()) {
        return Err(Error::config("dim", format!("experiments run in d = 2 or 3, got {}", body.dim())));
    }
    Ok(body)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{v}`"))),
    }
}

impl ExperimentConfig {
    /// Applies defaults for `experiment` and validates every field.
    pub fn resolve(experiment: Experiment, raw: &RawConfig) -> Result<Self> {
        let body = body_from(raw, experiment)?;
        let d = body.dim();
        let r_list = match raw.list("R")? {
            Some(v) => v,
            None => match experiment {
                Experiment::OracleCheck | Experiment::Eval => vec![8.0],
                Experiment::ModelError => vec![10.0, 20.0, 40.0, 80.0],
                Experiment::Shells => vec![32.0],
                _ => default_ladder(d),
            },
        };
        if r_list.is_empty() || r_list.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::config("R", "needs a non-empty list of positive radii"));
        }
        let needs_fit = matches!(
            experiment,
            Experiment::ModelError | Experiment::XsetEntropy | Experiment::CubeSpectrum | Experiment::ResidualStats
        );
        if needs_fit {
            let lo = r_list.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = r_list.iter().cloned().fold(0.0, f64::max);
            if r_list.len() < 3 || hi < 4.0 * lo {
                return Err(Error::config(
                    "R",
                    "exponent fits need at least 3 radii spanning a factor of 4",
                ));
            }
        }
        if experiment == Experiment::ModelError && r_list.iter().any(|&r| r < 2.0) {
            return Err(Error::config("R", "the asymptotic model needs R >= 2"));
        }

        let seed = raw.parsed("seed")?.unwrap_or(0u64);
        let (eta, eta_source) = match raw.get("eta") {
            Some(text) => (parse_vectors("eta", text)?, "config".to_string()),
            None => (default_eta_grid(d, seed), "default-grid".to_string()),
        };
        if eta.is_empty() {
            return Err(Error::config("eta", "the η list is empty"));
        }
        for e in &eta {
            if e.len() != d {
                return Err(Error::config("eta", format!("{e:?} is not a {d}-vector")));
            }
            let m = norm(e);
            if !(0.5..=2.0).contains(&m) {
                return Err(Error::config("eta", format!("|η| must lie in [0.5, 2], got {m} for {e:?}")));
            }
        }

        let cone_axis = match raw.list("cone_axis")? {
            Some(v) if v.len() == d => {
                normalized(&v).ok_or_else(|| Error::config("cone_axis", "axis must be non-zero"))?
            }
            Some(v) => return Err(Error::config("cone_axis", format!("{v:?} is not a {d}-vector"))),
            None => default_axis(&body),
        };
        let cone_half_angle = raw.parsed("cone_half_angle")?.unwrap_or(0.45);
        let ball_distance: f64 = raw.parsed("ball_distance")?.unwrap_or(3.0);
        let c_delta: f64 = raw.parsed("c_delta")?.unwrap_or(1.0);
        let angular_c: f64 = raw.parsed("angular_c")?.unwrap_or(0.5);
        for (key, v) in [("c_delta", c_delta), ("angular_c", angular_c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(ball_distance > 1.0) {
            return Err(Error::config("ball_distance", "B must not contain the origin (need > 1)"));
        }

        let method = match raw.get("method") {
            None | Some("best") => None,
            Some(m) => Some(m.parse::<Method>()?),
        };
        let quad_resolution = match raw.get("quad_resolution") {
            None if experiment == Experiment::OracleCheck => Some(256),
            None | Some("auto") => None,
            Some(_) => raw.parsed("quad_resolution")?,
        };
        let herz_resolution = raw.parsed("herz_resolution")?.unwrap_or(2048);
        let samples = raw.parsed("samples")?.unwrap_or(match experiment {
            Experiment::OracleCheck => 50,
            Experiment::ModelError => 256,
            Experiment::Shells => 16,
            Experiment::CubeSpectrum => 1000,
            Experiment::XsetEntropy | Experiment::ResidualStats | Experiment::Eval => 0,
        });
        let write_samples = match raw.get("write_samples") {
            Some(v) => parse_bool("write_samples", v)?,
            None => false,
        };
        let format = raw.parsed("format")?.unwrap_or(Format::Csv);
        let out_dir = PathBuf::from(raw.get("out_dir").unwrap_or("reports"));

        let cfg = ExperimentConfig {
            experiment,
            body_id: body.id(),
            body,
            r_list,
            eta,
            eta_source,
            seed,
            out_dir,
            format,
            c_delta,
            angular_c,
            cone_axis,
            cone_half_angle,
            ball_distance,
            method,
            quad_resolution,
            herz_resolution,
            samples,
            write_samples,
        };
        cfg.evaluator()?;
        let lattice_route = matches!(cfg.body.shape(), Shape::Cube { .. });
        match experiment {
            Experiment::Shells => cfg.check_cone(false)?,
            Experiment::XsetEntropy if !lattice_route => cfg.check_cone(true)?,
            Experiment::ResidualStats => cfg.check_cone(true)?,
            _ => {}
        }
        if experiment == Experiment::ResidualStats && cfg.body.smoothness() != Smoothness::Smooth {
            return Err(Error::config("kind", "residual statistics need a smooth body"));
        }
        Ok(cfg)
    }

    pub fn cone(&self) -> Result<NormalCone> {
        NormalCone::new(&self.cone_axis, self.cone_half_angle)
            .map_err(|e| Error::config("cone_half_angle", e.to_string()))
    }

    /// Ball `B` of radius `r` placed on the cone axis.
    pub fn ball(&self, r: f64) -> Result<FrequencyBall> {
        FrequencyBall::along_axis(&self.cone_axis, self.ball_distance, r)
    }

    /// Checks that `B` lies in the cone and, if `curved`, that the cone avoids
    /// flat or singular boundary pieces.
    fn check_cone(&self, curved: bool) -> Result<()> {
        let cone = self.cone()?;
        let ball = self.ball(self.r_list[0])?;
        if !ball.inside_cone(&cone) {
            return Err(Error::config(
                "cone_half_angle",
                format!(
                    "B at distance {}R subtends {:.4} rad, more than the half-angle {}",
                    self.ball_distance,
                    ball.angular_radius()?,
                    self.cone_half_angle
                ),
            ));
        }
        if !curved {
            return Ok(());
        }
        for u in cone_probe_directions(&cone) {
            match self.body.curvature(&u) {
                Ok(k) if !k.flat && k.value > 0.0 => {}
                _ => {
                    return Err(Error::config(
                        "cone_axis",
                        format!("the cone reaches direction {u:?} where the boundary is not curved"),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Evaluator for the configured method.
    pub fn evaluator(&self) -> Result<TransformEvaluator> {
        let body = self.body.clone();
        let res = match self.method {
            None => TransformEvaluator::best(body),
            Some(Method::Quadrature) => TransformEvaluator::new(
                body,
                Method::Quadrature,
                self.quad_resolution.map_or(Resolution::Auto, Resolution::Fixed),
            ),
            Some(Method::Herz) => {
                TransformEvaluator::new(body, Method::Herz, Resolution::Fixed(self.herz_resolution))
            }
            Some(m) => TransformEvaluator::new(body, m, Resolution::Auto),
        };
        res.map_err(|e| Error::config("method", e.to_string()))
    }

    pub fn shell_options(&self) -> ShellOptions {
        ShellOptions {
            angular_c: self.angular_c,
            n_dirs: None,
            scan: ScanOptions::default(),
        }
    }
}

/// Directions on the boundary and axis of the cone, used to vet its placement.
fn cone_probe_directions(cone: &NormalCone) -> Vec<Vec<f64>> {
    let axis = cone.axis();
    let a = cone.half_angle();
    let mut dirs = vec![axis.to_vec()];
    if axis.len() == 2 {
        for k in 0..=32 {
            let t = -a + 2.0 * a * k as f64 / 32.0;
            dirs.push(crate::vecmath::rotate2(axis, t));
        }
    } else {
        let basis = orthonormal_complement(axis);
        for k in 0..32 {
            let t = 2.0 * PI * k as f64 / 32.0;
            let v: Vec<f64> = (0..3)
                .map(|i| a.cos() * axis[i] + a.sin() * (t.cos() * basis[0][i] + t.sin() * basis[1][i]))
                .collect();
            dirs.push(v);
        }
    }
    dirs
}

/// Reads a configuration file if given, then applies overrides in order.
pub fn load(experiment: Experiment, path: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut raw = match path {
        Some(p) => RawConfig::from_file(p)?,
        None => RawConfig::new(),
    };
    for (k, v) in overrides {
        raw.set(k, v)?;
    }
    ExperimentConfig::resolve(experiment, &raw)
}
