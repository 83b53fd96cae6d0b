//! Special functions and quadrature rules used by the transform evaluators.
//!
//! Bessel functions of integer and half-integer order are evaluated with the
//! ascending power series below `BESSEL_SWITCH` and with the Hankel asymptotic
//! expansion above it. For half-integer orders the Hankel expansion terminates
//! and reproduces the closed trigonometric forms exactly, e.g.
//! `J_{3/2}(z) = sqrt(2/(πz)) (sin z / z - cos z)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Argument above which the asymptotic expansion replaces the power series.
pub const BESSEL_SWITCH: f64 = 12.0;

/// `sin(π x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    // r is x reduced to [-1, 1]; the reduction is exact in binary floating point.
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `∫_{-h}^{h} cos(2π f x) dx = sin(2π f h) / (π f)`, with the limit `2h` at `f = 0`.
pub fn sin_ratio(f: f64, h: f64) -> f64 {
    let z = 2.0 * PI * f * h;
    if z.abs() < 1e-6 {
        2.0 * h * (1.0 - z * z / 6.0)
    } else {
        sin_pi(2.0 * f * h) / (PI * f)
    }
}

/// `Γ(k/2 + 1)` for a non-negative integer `k`.
pub fn gamma_half_plus_one(k: u32) -> f64 {
    // Γ(1) = 1, Γ(3/2) = √π / 2, then Γ(x + 1) = x Γ(x).
    let mut g = if k % 2 == 0 { 1.0 } else { 0.5 * PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 1.5 };
    let target = k as f64 / 2.0 + 1.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the Euclidean ball of radius `r` in dimension `d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    PI.powf(d as f64 / 2.0) * r.powi(d as i32) / gamma_half_plus_one(d as u32)
}

/// `J_ν(z) / z^ν` for `ν = order2 / 2`, from the ascending series.
fn bessel_j_scaled_series(order2: u32, z: f64) -> f64 {
    let nu = order2 as f64 / 2.0;
    let q = 0.25 * z * z;
    let mut term = 0.5f64.powf(nu) / gamma_half_plus_one(order2);
    let mut sum = term;
    for m in 1..200 {
        let m = m as f64;
        term *= -q / (m * (m + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_ν(z)` for `ν = order2 / 2` and `z > 0`, from the Hankel expansion.
fn bessel_j_asymptotic(order2: u32, z: f64) -> f64 {
    let nu = order2 as f64 / 2.0;
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        if a == 0.0 {
            break;
        }
        // Stop before the asymptotic series starts to diverge.
        if a.abs() > last {
            break;
        }
        last = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Bessel function of the first kind `J_ν(z)`, `ν = order2 / 2`, `z ≥ 0`.
pub fn bessel_j(order2: u32, z: f64) -> f64 {
    if z < BESSEL_SWITCH {
        bessel_j_scaled_series(order2, z) * z.powf(order2 as f64 / 2.0)
    } else {
        bessel_j_asymptotic(order2, z)
    }
}

/// `J_ν(z) / z^ν`, finite at `z = 0` where it equals `2^{-ν} / Γ(ν + 1)`.
pub fn bessel_j_scaled(order2: u32, z: f64) -> f64 {
    if z < BESSEL_SWITCH {
        bessel_j_scaled_series(order2, z)
    } else {
        bessel_j_asymptotic(order2, z) / z.powf(order2 as f64 / 2.0)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Cached `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss-legendre cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
        .clone()
}
