use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use spectral_zeros::vecmath::{distance, rotate2};
use spectral_zeros::{Body, Error};
use std::f64::consts::FRAC_1_SQRT_2;

fn bodies() -> Vec<Body> {
    vec![
        Body::ball(2, 1.0).unwrap(),
        Body::ball(3, 0.7).unwrap(),
        Body::cube(2, 0.5).unwrap(),
        Body::cube(3, 1.2).unwrap(),
        Body::ellipsoid(&[2.0, 1.0]).unwrap(),
        Body::ellipsoid(&[1.5, 0.5, 0.9]).unwrap(),
        Body::rounded_square(1.0, 0.25).unwrap(),
    ]
}

fn smooth_bodies() -> Vec<Body> {
    vec![
        Body::ball(2, 1.0).unwrap(),
        Body::ball(3, 0.7).unwrap(),
        Body::ellipsoid(&[2.0, 1.0]).unwrap(),
        Body::ellipsoid(&[1.5, 0.5, 0.9]).unwrap(),
    ]
}

fn direction(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("non-degenerate", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / n).collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn homogeneity(u2 in direction(2), u3 in direction(3), t in 0.1f64..10.0) {
        for body in bodies() {
            let u = if body.dim() == 2 { &u2 } else { &u3 };
            let p = body.support(u).unwrap();
            let tu: Vec<f64> = u.iter().map(|x| t * x).collect();
            prop_assert!((body.support(&tu).unwrap() - t * p).abs() <= 1e-12 * t * p.abs());
            prop_assert!(p > 0.0);
        }
    }

    #[test]
    fn symmetry(u2 in direction(2), u3 in direction(3)) {
        for body in bodies() {
            let u = if body.dim() == 2 { &u2 } else { &u3 };
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            prop_assert_eq!(body.support(&neg).unwrap(), body.support(u).unwrap());
        }
    }

    #[test]
    fn gradient_matches_gauss_point(u2 in direction(2), u3 in direction(3)) {
        let h = 1e-5;
        for body in smooth_bodies() {
            let u = if body.dim() == 2 { &u2 } else { &u3 };
            let g = body.gauss_point(u).unwrap();
            for i in 0..u.len() {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[i] += h;
                dn[i] -= h;
                let fd = (body.support(&up).unwrap() - body.support(&dn).unwrap()) / (2.0 * h);
                prop_assert!((fd - g[i]).abs() <= 1e-6, "{} {:?}", body, u);
            }
        }
    }

    #[test]
    fn gauss_map_inverse(u2 in direction(2), u3 in direction(3)) {
        let mut all = smooth_bodies();
        all.push(Body::rounded_square(1.0, 0.25).unwrap());
        for body in all {
            let u = if body.dim() == 2 { &u2 } else { &u3 };
            let g = body.gauss_point(u).unwrap();
            prop_assert!(body.contains(&g));
            let n = body.outward_normal(&g).unwrap();
            prop_assert!(distance(&n, u) <= 1e-8, "{} {:?} {:?}", body, u, n);
        }
    }
}

/// Curvature from the Gauss map: turning angle over boundary arc length.
fn fd_curvature(body: &Body, u: &[f64]) -> f64 {
    let dt = 1e-4;
    let a = body.gauss_point(&rotate2(u, -dt)).unwrap();
    let b = body.gauss_point(&rotate2(u, dt)).unwrap();
    2.0 * dt / distance(&a, &b)
}

#[test]
fn curvature_against_finite_differences() {
    let ellipse = Body::ellipsoid(&[2.0, 1.0]).unwrap();
    // Boundary graph x = 2 sqrt(1 - y²) near (2, 0): second difference gives x''(0).
    let h = 1e-4;
    let x = |y: f64| 2.0 * (1.0 - y * y).sqrt();
    let second = (x(h) - 2.0 * x(0.0) + x(-h)) / (h * h);
    assert_abs_diff_eq!(second.abs(), 2.0, epsilon = 1e-5);
    assert_abs_diff_eq!(ellipse.curvature(&[1.0, 0.0]).unwrap().value, 2.0, epsilon = 1e-12);

    let rs = Body::rounded_square(1.0, 0.2).unwrap();
    let u = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    assert_abs_diff_eq!(fd_curvature(&rs, &u), 5.0, epsilon = 1e-6);
    assert_abs_diff_eq!(rs.curvature(&u).unwrap().value, 5.0, epsilon = 1e-12);

    for k in 0..40 {
        let t = 0.05 + k as f64 * 0.15;
        let u = [t.cos(), t.sin()];
        let fd = fd_curvature(&ellipse, &u);
        assert_abs_diff_eq!(ellipse.curvature(&u).unwrap().value, fd, epsilon = 1e-6 * fd.max(1.0));
    }
}

#[test]
fn three_dimensional_ellipsoid_curvature() {
    // Gaussian curvature at the end of axis a_1 of an ellipsoid is a_1² / (a_2² a_3²).
    let e = Body::ellipsoid(&[1.5, 0.5, 0.9]).unwrap();
    assert_abs_diff_eq!(
        e.curvature(&[1.0, 0.0, 0.0]).unwrap().value,
        1.5 * 1.5 / (0.25 * 0.81),
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        e.curvature(&[0.0, 0.0, 1.0]).unwrap().value,
        0.81 / (1.5 * 1.5 * 0.25),
        epsilon = 1e-12
    );
}

#[test]
fn rounded_square_support_pieces() {
    let rs = Body::rounded_square(1.0, 0.25).unwrap();
    assert_eq!(rs.support(&[1.0, 0.0]).unwrap(), 1.0);
    assert_abs_diff_eq!(
        rs.support(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap(),
        0.75 * 2.0 * FRAC_1_SQRT_2 + 0.25,
        epsilon = 1e-15
    );
    assert!(matches!(rs.support(&[0.0, 0.0]), Err(Error::Domain(_))));
    assert!(!rs.contains(&[0.95, 0.95]));
    assert!(rs.contains(&[0.9, 0.5]));
}
