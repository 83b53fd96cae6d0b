//! Zero sets of the transform along rays, their shells inside a frequency
//! ball, and sampled translated-intersection sets `X = Z ∩ B ∩ (Z − η) ∩ (B − η)`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{FrequencyBall, NormalCone};
use crate::transform::TransformEvaluator;
use crate::vecmath::{add, angle_between, norm, normalized, orthonormal_complement, rotate2, scale};

/// Bracket width to which sign-change roots are refined.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// A root of `t ↦ χ̂(t u)` found by bracketing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSample {
    /// Index of the ray in the direction grid (0 for single-ray scans).
    pub ray: usize,
    pub direction: Vec<f64>,
    pub radius: f64,
    pub point: Vec<f64>,
    pub residual: f64,
    /// Ordinal of the root along its ray segment, starting at 0.
    pub shell: usize,
    /// Final bracket `[lo, hi]`; the transform changes sign across it
    /// unless the root was hit exactly on a grid node (`lo == hi`).
    pub bracket: (f64, f64),
}

/// A sample of `X`: a zero `ξ` whose translate `ξ + η` lies within `delta` of a zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XSample {
    pub base: ZeroSample,
    pub eta: Vec<f64>,
    pub shifted: Vec<f64>,
    pub delta: f64,
}

/// Radial scan parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Grid step; `None` uses the largest admissible step `1/(8 P(u))`.
    pub step: Option<f64>,
    pub tol: f64,
    /// A local minimum of `|χ̂|` without sign change is reported as a possible
    /// grazing zero when the parabola through it and its neighbours dips below
    /// this fraction of the larger neighbour.
    pub grazing_ratio: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            step: None,
            tol: ROOT_TOLERANCE,
            grazing_ratio: 0.05,
        }
    }
}

/// Roots and suspicious dips along one ray.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RayScan {
    pub zeros: Vec<ZeroSample>,
    /// Radii of local minima of `|χ̂|` that did not change sign.
    pub grazing: Vec<f64>,
}

/// Bracketing root refinement (Brent's method), returning `(root, lo, hi)`
/// with `hi − lo ≤ tol` and a sign change across `[lo, hi]`.
pub fn brent(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    tol: f64,
) -> Result<(f64, f64, f64)> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = (2.0 * f64::EPSILON * b.abs()).max(0.25 * tol);
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            let (lo, hi) = if fb == 0.0 { (b, b) } else if b < c { (b, c) } else { (c, b) };
            return Ok((b, lo, hi));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b)?;
    }
    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    Ok((b, lo, hi))
}

fn max_step(eval: &TransformEvaluator, u: &[f64]) -> Result<f64> {
    Ok(1.0 / (8.0 * eval.body().support(u)?))
}

/// Scans `r ↦ χ̂(r u)` over `[r_min, r_max]`, refining every sign change and
/// reporting dips that touch zero without crossing it.
pub fn scan_ray(
    eval: &TransformEvaluator,
    u: &[f64],
    r_min: f64,
    r_max: f64,
    opts: &ScanOptions,
) -> Result<RayScan> {
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::domain(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    let u = normalized(u).ok_or_else(|| Error::domain("direction must be non-zero"))?;
    let limit = max_step(eval, &u)?;
    let step = match opts.step {
        Some(s) if s > limit * (1.0 + 1e-12) => {
            return Err(Error::Resolution(format!(
                "scan step {s} exceeds 1/(8 P(u)) = {limit}"
            )))
        }
        Some(s) if s > 0.0 => s,
        Some(s) => return Err(Error::Resolution(format!("scan step must be positive, got {s}"))),
        None => limit,
    };
    let n = ((r_max - r_min) / step).ceil().max(1.0) as usize;
    let h = (r_max - r_min) / n as f64;
    let at = |t: f64| eval.eval(&scale(&u, t));
    let grid: Vec<f64> = (0..=n).map(|i| r_min + i as f64 * h).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| at(t)).collect::<Result<_>>()?;

    let mut out = RayScan::default();
    let push = |out: &mut RayScan, r: f64, residual: f64, bracket: (f64, f64)| {
        let shell = out.zeros.len();
        out.zeros.push(ZeroSample {
            ray: 0,
            direction: u.clone(),
            radius: r,
            point: scale(&u, r),
            residual,
            shell,
            bracket,
        });
    };
    for i in 0..=n {
        let (t, f) = (grid[i], vals[i]);
        if f == 0.0 {
            push(&mut out, t, 0.0, (t, t));
            continue;
        }
        if i < n {
            let g = vals[i + 1];
            if g != 0.0 && (f > 0.0) != (g > 0.0) {
                let (root, lo, hi) = brent(at, t, grid[i + 1], f, g, opts.tol)?;
                let residual = at(root)?.abs();
                push(&mut out, root, residual, (lo, hi));
            }
        }
        if i > 0 && i < n {
            let (l, r) = (vals[i - 1], vals[i + 1]);
            let same = (l > 0.0) == (f > 0.0) && (r > 0.0) == (f > 0.0) && l != 0.0 && r != 0.0;
            let (fa, la, ra) = (f.abs(), l.abs(), r.abs());
            if same && fa <= la && fa < ra {
                // Minimum of the parabola through the three samples.
                let curv = la + ra - 2.0 * fa;
                let vertex = fa - (ra - la) * (ra - la) / (8.0 * curv);
                if vertex <= opts.grazing_ratio * la.max(ra) {
                    out.grazing.push(t);
                }
            }
        }
    }
    Ok(out)
}

/// Roots of `r ↦ χ̂(r u)` on `[r_min, r_max]`, sorted by radius.
pub fn radial_zeros(
    eval: &TransformEvaluator,
    u: &[f64],
    r_min: f64,
    r_max: f64,
    opts: &ScanOptions,
) -> Result<Vec<ZeroSample>> {
    scan_ray(eval, u, r_min, r_max, opts).map(|s| s.zeros)
}

/// Distance along the ray through `ξ` to the nearest zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroDistance {
    pub distance: f64,
    pub found: bool,
}

/// Distance from `ξ` to the nearest root of `t ↦ χ̂(t ξ/|ξ|)` inside a window
/// one model period `1/P(ξ/|ξ|)` wide centred at `|ξ|`.
pub fn zero_distance(eval: &TransformEvaluator, xi: &[f64]) -> Result<ZeroDistance> {
    let t0 = norm(xi);
    let u = normalized(xi).ok_or_else(|| Error::domain("ξ must be non-zero"))?;
    if eval.eval(xi)? == 0.0 {
        return Ok(ZeroDistance {
            distance: 0.0,
            found: true,
        });
    }
    let half = 0.5 / eval.body().support(&u)?;
    let lo = (t0 - half).max(1e-3 * t0);
    let roots = radial_zeros(eval, &u, lo, t0 + half, &ScanOptions::default())?;
    Ok(roots
        .iter()
        .map(|z| (z.radius - t0).abs())
        .filter(|&d| d <= half)
        .min_by(f64::total_cmp)
        .map_or(
            ZeroDistance {
                distance: half,
                found: false,
            },
            |distance| ZeroDistance {
                distance,
                found: true,
            },
        ))
}

/// Direction grid parameters for shell sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellOptions {
    /// Angular spacing is at most `angular_c / R`.
    pub angular_c: f64,
    /// Directions across the diameter of the cap; `None` picks the smallest
    /// count meeting the spacing bound.
    pub n_dirs: Option<usize>,
    pub scan: ScanOptions,
}

impl Default for ShellOptions {
    fn default() -> Self {
        ShellOptions {
            angular_c: 0.5,
            n_dirs: None,
            scan: ScanOptions::default(),
        }
    }
}

/// Unit directions covering the angular cap that `ball` subtends from the origin.
pub fn cap_directions(ball: &FrequencyBall, opts: &ShellOptions) -> Result<Vec<Vec<f64>>> {
    let beta = ball.angular_radius()?;
    let target = opts.angular_c / ball.radius;
    let n_dirs = match opts.n_dirs {
        Some(n) => {
            let spacing = if n > 1 { 2.0 * beta / (n - 1) as f64 } else { f64::INFINITY };
            if spacing > target * (1.0 + 1e-12) {
                return Err(Error::Resolution(format!(
                    "{n} directions give spacing {spacing:.3e} > c/R = {target:.3e}"
                )));
            }
            n
        }
        None => (2.0 * beta / target).ceil() as usize + 1,
    };
    let axis = normalized(&ball.center).ok_or_else(|| Error::domain("ball centred at origin"))?;
    let h = 2.0 * beta / (n_dirs - 1) as f64;
    match ball.dim() {
        2 => Ok((0..n_dirs).map(|k| rotate2(&axis, -beta + k as f64 * h)).collect()),
        3 => {
            let basis = orthonormal_complement(&axis);
            let rings = (n_dirs - 1) / 2;
            let step = if rings > 0 { beta / rings as f64 } else { 0.0 };
            let mut dirs = vec![axis.clone()];
            for j in 1..=rings {
                let alpha = j as f64 * step;
                let count = ((2.0 * PI * alpha.sin() / h).ceil() as usize).max(6);
                for k in 0..count {
                    let t = 2.0 * PI * k as f64 / count as f64;
                    let mut v = scale(&axis, alpha.cos());
                    for i in 0..3 {
                        v[i] += alpha.sin() * (t.cos() * basis[0][i] + t.sin() * basis[1][i]);
                    }
                    dirs.push(v);
                }
            }
            Ok(dirs)
        }
        d => Err(Error::MethodUnavailable {
            method: "shell_index",
            reason: format!("direction grids exist for d in {{2, 3}}, got {d}"),
        }),
    }
}

/// Zeros of the transform inside `ball`, sampled along a direction grid of
/// angular spacing at most `angular_c / R`.
pub fn shell_index(
    eval: &TransformEvaluator,
    cone: &NormalCone,
    ball: &FrequencyBall,
    opts: &ShellOptions,
) -> Result<Vec<ZeroSample>> {
    if !ball.inside_cone(cone) {
        return Err(Error::ConeViolation(ball.center.clone()));
    }
    let dirs = cap_directions(ball, opts)?;
    let per_ray: Vec<Vec<ZeroSample>> = dirs
        .par_iter()
        .enumerate()
        .map(|(k, u)| -> Result<Vec<ZeroSample>> {
            let Some((t0, t1)) = ball.ray_interval(u) else {
                return Ok(Vec::new());
            };
            if t1 - t0 < 1e-9 {
                return Ok(Vec::new());
            }
            let mut zs = radial_zeros(eval, u, t0, t1, &opts.scan)?;
            zs.retain(|z| ball.contains(&z.point));
            for (i, z) in zs.iter_mut().enumerate() {
                z.ray = k;
                z.shell = i;
            }
            Ok(zs)
        })
        .collect::<Result<_>>()?;
    Ok(per_ray.into_iter().flatten().collect())
}

/// Checks that `|η|` lies in `[0.5, 2]`.
pub fn check_eta(eta: &[f64]) -> Result<()> {
    let m = norm(eta);
    if !(0.5..=2.0).contains(&m) {
        return Err(Error::domain(format!("|η| must lie in [0.5, 2], got {m}")));
    }
    Ok(())
}

/// Nearest root to `|p|` along the ray through `p`, if one lies within `tol`.
fn shifted_delta(eval: &TransformEvaluator, p: &[f64], tol: f64) -> Result<Option<f64>> {
    let t = norm(p);
    let u: Vec<f64> = p.iter().map(|v| v / t).collect();
    let at = |s: f64| eval.eval(&scale(&u, s));
    let f0 = at(t)?;
    if f0 == 0.0 {
        return Ok(Some(0.0));
    }
    let lo = (t - tol).max(0.5 * t);
    let (fl, fr) = (at(lo)?, at(t + tol)?);
    let mut best: Option<f64> = None;
    for (a, b, fa, fb) in [(lo, t, fl, f0), (t, t + tol, f0, fr)] {
        if fa == 0.0 || fb == 0.0 || (fa > 0.0) != (fb > 0.0) {
            let root = if fa == 0.0 {
                a
            } else if fb == 0.0 {
                b
            } else {
                brent(at, a, b, fa, fb, ROOT_TOLERANCE)?.0
            };
            let d = (root - t).abs();
            if d <= tol && best.map_or(true, |b| d < b) {
                best = Some(d);
            }
        }
    }
    Ok(best)
}

/// Keeps the shell samples `ξ` with `ξ + η ∈ B` and `ξ + η` within `tol` of a zero.
pub fn x_set_from_shells(
    eval: &TransformEvaluator,
    shells: &[ZeroSample],
    eta: &[f64],
    ball: &FrequencyBall,
    tol: f64,
) -> Result<Vec<XSample>> {
    check_eta(eta)?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let kept: Vec<Option<XSample>> = shells
        .par_iter()
        .map(|z| -> Result<Option<XSample>> {
            let shifted = add(&z.point, eta);
            if !ball.contains(&z.point) || !ball.contains(&shifted) {
                return Ok(None);
            }
            Ok(shifted_delta(eval, &shifted, tol)?.map(|delta| XSample {
                base: z.clone(),
                eta: eta.to_vec(),
                shifted,
                delta,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(kept.into_iter().flatten().collect())
}

/// Thickening tolerance `c_δ / R`.
pub fn default_tolerance(c_delta: f64, ball: &FrequencyBall) -> f64 {
    c_delta / ball.radius
}

/// Samples of `X_{Ω,η,B}` with thickening `tol` (default `1/R`).
pub fn x_set(
    eval: &TransformEvaluator,
    eta: &[f64],
    cone: &NormalCone,
    ball: &FrequencyBall,
    tol: Option<f64>,
    opts: &ShellOptions,
) -> Result<Vec<XSample>> {
    check_eta(eta)?;
    let tol = tol.unwrap_or_else(|| default_tolerance(1.0, ball));
    let shells = shell_index(eval, cone, ball, opts)?;
    x_set_from_shells(eval, &shells, eta, ball, tol)
}

/// Largest angle between a sample's direction and the ball centre; used in reports.
pub fn angular_extent(samples: &[ZeroSample], ball: &FrequencyBall) -> f64 {
    samples
        .iter()
        .map(|z| angle_between(&z.direction, &ball.center))
        .fold(0.0, f64::max)
}
