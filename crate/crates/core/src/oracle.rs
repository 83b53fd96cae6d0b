//! Reference values computed by routes that share no code with the
//! evaluators: Bessel's integral for integer orders, elementary closed forms
//! for half-integer orders, and plain bisection for roots.

use std::f64::consts::PI;

/// `J_n(z)` for integer `n` from `(1/π) ∫_0^π cos(nτ − z sin τ) dτ`.
///
/// The integrand extends to an even, `2π`-periodic analytic function, so the
/// trapezoid rule converges geometrically once the node count exceeds `z + n`.
pub fn bessel_j_integral(n: u32, z: f64) -> f64 {
    let m = (2.0 * (z.abs() + n as f64) + 64.0).ceil() as usize;
    let h = PI / m as f64;
    let nf = n as f64;
    let mut s = 0.5 * (1.0 + (nf * PI).cos());
    for k in 1..m {
        let t = k as f64 * h;
        s += (nf * t - z * t.sin()).cos();
    }
    s * h / PI
}

/// `J_{k/2}(z)` for odd `k` from the elementary forms and upward recurrence.
pub fn bessel_j_half(k: u32, z: f64) -> f64 {
    assert!(k % 2 == 1, "half-integer order expected");
    let c = (2.0 / (PI * z)).sqrt();
    let mut prev = c * z.cos(); // J_{-1/2}
    let mut cur = c * z.sin(); // J_{1/2}
    let mut nu = 0.5;
    while 2.0 * nu < k as f64 - 0.5 {
        let next = 2.0 * nu / z * cur - prev;
        prev = cur;
        cur = next;
        nu += 1.0;
    }
    cur
}

/// `J_{order2/2}(z)` from whichever independent route applies.
pub fn bessel_j(order2: u32, z: f64) -> f64 {
    if order2 % 2 == 0 {
        bessel_j_integral(order2 / 2, z)
    } else {
        bessel_j_half(order2, z)
    }
}

/// Plain bisection on a bracketing interval, to absolute width `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First `count` positive zeros of `J_{order2/2}`, by a fine scan plus bisection.
pub fn bessel_zeros(order2: u32, count: usize) -> Vec<f64> {
    let mut roots = Vec::with_capacity(count);
    let step = 0.05;
    let mut a = 0.5;
    let mut fa = bessel_j(order2, a);
    while roots.len() < count {
        let b = a + step;
        let fb = bessel_j(order2, b);
        if (fa > 0.0) != (fb > 0.0) {
            roots.push(bisect(|z| bessel_j(order2, z), a, b, 1e-14));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Transform of the indicator of the radius-`r` ball in dimension `d` at `|ξ| = rho`.
pub fn ball_transform(d: usize, r: f64, rho: f64) -> f64 {
    let nu = d as f64 / 2.0;
    let z = 2.0 * PI * r * rho;
    r.powi(d as i32) * (2.0 * PI).powf(nu) * bessel_j(d as u32, z) / z.powf(nu)
}

/// Transform of the indicator of the cube `[-s, s]^d`, written as `∏ sin(2πsξ_j)/(πξ_j)`.
pub fn cube_transform(s: f64, xi: &[f64]) -> f64 {
    xi.iter()
        .map(|&v| if v == 0.0 { 2.0 * s } else { (2.0 * PI * s * v).sin() / (PI * v) })
        .product()
}
