use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_zeros::oracle;
use spectral_zeros::transform::{
    calibrated_phase_offset, chi_hat_closed, chi_hat_quadrature, cos_residual, herz_boundary,
    herz_boundary_complex, localized_boundary, phase_model_eval, CutoffWindow,
};
use spectral_zeros::{Body, Error, Method, Resolution, TransformEvaluator};
use std::f64::consts::PI;

fn random_xi(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            let r = rng.gen_range(lo..hi);
            return v.iter().map(|x| x / n * r).collect();
        }
    }
}

#[test]
fn closed_form_examples() {
    let cube = Body::cube(2, 0.5).unwrap();
    assert_eq!(chi_hat_closed(&cube, &[0.0, 0.0]).unwrap(), 1.0);
    assert_eq!(chi_hat_closed(&cube, &[1.0, 0.0]).unwrap(), 0.0);
    let disc = Body::ball(2, 1.0).unwrap();
    let j11 = oracle::bessel_zeros(2, 1)[0];
    assert_abs_diff_eq!(j11, 3.8317, epsilon = 1e-4);
    assert!(chi_hat_closed(&disc, &[j11 / (2.0 * PI), 0.0]).unwrap().abs() < 1e-6);
    assert!(chi_hat_closed(&disc, &[0.6098, 0.0]).unwrap().abs() < 1e-3);
    assert_abs_diff_eq!(chi_hat_closed(&disc, &[0.0, 0.0]).unwrap(), PI, epsilon = 1e-14);
    let rs = Body::rounded_square(1.0, 0.25).unwrap();
    assert!(matches!(
        chi_hat_closed(&rs, &[1.0, 0.0]),
        Err(Error::MethodUnavailable { .. })
    ));
}

#[test]
fn closed_form_matches_bessel_integral_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2usize, 3] {
        let ball = Body::ball(d, 0.7).unwrap();
        for _ in 0..200 {
            let xi = random_xi(&mut rng, d, 0.0, 60.0);
            let rho = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let want = oracle::ball_transform(d, 0.7, rho);
            assert_abs_diff_eq!(chi_hat_closed(&ball, &xi).unwrap(), want, epsilon = 1e-11);
        }
    }
}

#[test]
fn ellipsoid_closed_form_matches_quadrature() {
    let ell = Body::ellipsoid(&[2.0, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let xi = random_xi(&mut rng, 2, 0.5, 8.0);
        let q = chi_hat_quadrature(&ell, &xi, 256).unwrap();
        assert_abs_diff_eq!(chi_hat_closed(&ell, &xi).unwrap(), q, epsilon = 1e-10);
    }
    let ell3 = Body::ellipsoid(&[1.5, 1.0, 0.5]).unwrap();
    let xi = [0.7, -1.1, 2.3];
    let q = chi_hat_quadrature(&ell3, &xi, 96).unwrap();
    assert_abs_diff_eq!(chi_hat_closed(&ell3, &xi).unwrap(), q, epsilon = 1e-9);
}

#[test]
fn quadrature_examples() {
    let disc = Body::ball(2, 1.0).unwrap();
    assert_abs_diff_eq!(chi_hat_quadrature(&disc, &[0.0, 0.0], 256).unwrap(), PI, epsilon = 1e-3);
    let cube = Body::cube(2, 0.5).unwrap();
    let oracle_val = oracle::cube_transform(0.5, &[0.5, 0.0]);
    assert_abs_diff_eq!(oracle_val, 2.0 / PI, epsilon = 1e-15);
    assert_abs_diff_eq!(
        chi_hat_quadrature(&cube, &[0.5, 0.0], 256).unwrap(),
        oracle_val,
        epsilon = 1e-4
    );
    let ball3 = Body::ball(3, 1.0).unwrap();
    assert_abs_diff_eq!(
        chi_hat_quadrature(&ball3, &[1.0, 0.0, 0.0], 128).unwrap(),
        chi_hat_closed(&ball3, &[1.0, 0.0, 0.0]).unwrap(),
        epsilon = 1e-3
    );
    assert!(matches!(
        chi_hat_quadrature(&disc, &[1.0, 0.0], 16),
        Err(Error::Resolution(_))
    ));
    let ball4 = Body::ball(4, 1.0).unwrap();
    assert!(matches!(
        chi_hat_quadrature(&ball4, &[1.0, 0.0, 0.0, 0.0], 64),
        Err(Error::MethodUnavailable { .. })
    ));
}

#[test]
fn quadrature_converges_with_resolution() {
    let disc = Body::ball(2, 1.0).unwrap();
    let xi = [5.3, -2.1];
    let exact = chi_hat_closed(&disc, &xi).unwrap();
    let coarse = (chi_hat_quadrature(&disc, &xi, 32).unwrap() - exact).abs();
    let fine = (chi_hat_quadrature(&disc, &xi, 64).unwrap() - exact).abs();
    assert!(fine < coarse || fine < 1e-13);
    assert!(fine < 1e-10);
}

#[test]
fn auto_quadrature_resolves_high_frequencies() {
    let disc = Body::ball(2, 1.0).unwrap();
    let eval = TransformEvaluator::new(disc.clone(), Method::Quadrature, Resolution::Auto).unwrap();
    for xi in [[300.0, 0.0], [210.0, 170.0], [-90.0, 410.0]] {
        assert_abs_diff_eq!(
            eval.eval(&xi).unwrap(),
            chi_hat_closed(&disc, &xi).unwrap(),
            epsilon = 1e-11
        );
    }
}

#[test]
fn rounded_square_quadrature_agrees_with_boundary_rule() {
    let rs = Body::rounded_square(1.0, 0.25).unwrap();
    assert_abs_diff_eq!(
        chi_hat_quadrature(&rs, &[0.0, 0.0], 64).unwrap(),
        rs.volume(),
        epsilon = 1e-12
    );
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let xi = random_xi(&mut rng, 2, 0.5, 8.0);
        let q = chi_hat_quadrature(&rs, &xi, 128).unwrap();
        let h = herz_boundary(&rs, &xi, 256).unwrap();
        assert_abs_diff_eq!(q, h, epsilon = 1e-10);
    }
    let auto = TransformEvaluator::best(rs.clone()).unwrap();
    let xi = [180.0, 250.0];
    assert_abs_diff_eq!(
        auto.eval(&xi).unwrap(),
        herz_boundary(&rs, &xi, 2048).unwrap(),
        epsilon = 1e-10
    );
    for xi in [[370.0, 370.0], [120.0, 500.0], [-460.0, 240.0], [33.3, -41.7]] {
        assert_abs_diff_eq!(
            auto.eval(&xi).unwrap(),
            chi_hat_quadrature(&rs, &xi, 4096).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn herz_examples() {
    let disc = Body::ball(2, 1.0).unwrap();
    assert_abs_diff_eq!(
        herz_boundary(&disc, &[2.0, 0.0], 2048).unwrap(),
        chi_hat_closed(&disc, &[2.0, 0.0]).unwrap(),
        epsilon = 1e-8
    );
    let cube = Body::cube(2, 0.5).unwrap();
    assert_abs_diff_eq!(
        herz_boundary(&cube, &[1.5, 0.5], 2048).unwrap(),
        oracle::cube_transform(0.5, &[1.5, 0.5]),
        epsilon = 1e-8
    );
    assert_abs_diff_eq!(herz_boundary(&disc, &[1e-3, 0.0], 4096).unwrap(), PI, epsilon = 1e-2);
    assert!(matches!(herz_boundary(&disc, &[0.0, 0.0], 2048), Err(Error::Domain(_))));
}

#[test]
fn herz_imaginary_part_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let bodies = [
        Body::ball(2, 1.0).unwrap(),
        Body::ellipsoid(&[2.0, 1.0]).unwrap(),
        Body::cube(2, 0.5).unwrap(),
        Body::rounded_square(1.0, 0.25).unwrap(),
        Body::ball(3, 1.0).unwrap(),
        Body::cube(3, 0.5).unwrap(),
    ];
    for body in &bodies {
        for _ in 0..5 {
            let xi = random_xi(&mut rng, body.dim(), 0.5, 8.0);
            let z = herz_boundary_complex(body, &xi, 256).unwrap();
            assert!(z.im.abs() <= 1e-9 * z.norm().max(1e-3), "{body}: {z}");
        }
    }
}

#[test]
fn herz_three_dimensional_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for body in [Body::ball(3, 1.0).unwrap(), Body::cube(3, 0.5).unwrap(), Body::ellipsoid(&[1.2, 0.8, 0.6]).unwrap()] {
        let eval = TransformEvaluator::new(body.clone(), Method::Herz, Resolution::Fixed(256)).unwrap();
        for _ in 0..4 {
            let xi = random_xi(&mut rng, 3, 0.5, 6.0);
            assert_abs_diff_eq!(
                eval.eval(&xi).unwrap(),
                chi_hat_closed(&body, &xi).unwrap(),
                epsilon = 1e-9
            );
        }
    }
}

#[test]
fn every_route_returns_volume_near_the_origin() {
    for body in [Body::ball(2, 1.3).unwrap(), Body::cube(3, 0.5).unwrap(), Body::rounded_square(1.0, 0.4).unwrap()] {
        let zero = vec![0.0; body.dim()];
        let near: Vec<f64> = (0..body.dim()).map(|j| if j == 0 { 1e-4 } else { 0.0 }).collect();
        assert_abs_diff_eq!(chi_hat_quadrature(&body, &zero, 64).unwrap(), body.volume(), epsilon = 1e-10);
        assert_abs_diff_eq!(herz_boundary(&body, &near, 512).unwrap(), body.volume(), epsilon = 1e-3);
        if let Ok(v) = chi_hat_closed(&body, &zero) {
            assert_abs_diff_eq!(v, body.volume(), epsilon = 1e-12);
        }
    }
}

#[test]
fn model_matches_disc_asymptotics() {
    let disc = Body::ball(2, 1.0).unwrap();
    for r in [10.0, 20.0, 40.0] {
        let m = phase_model_eval(&disc, &[r, 0.0], 0.0).unwrap();
        let expect = (2.0 * PI * r - 0.75 * PI).cos() / (PI * r.powf(1.5));
        assert_abs_diff_eq!(m.value, expect, epsilon = 1e-14);
        let exact = chi_hat_closed(&disc, &[r, 0.0]).unwrap();
        assert!((exact - m.value).abs() <= 2.0 * r.powf(-2.5));
    }
}

#[test]
fn model_matches_three_dimensional_ball() {
    let ball = Body::ball(3, 1.0).unwrap();
    for r in [10.0, 20.0, 40.0, 10.3, 20.7] {
        let m = phase_model_eval(&ball, &[r, 0.0, 0.0], 0.0).unwrap();
        let z = 2.0 * PI * r;
        let exact = (z.sin() - z * z.cos()) / (2.0 * PI * PI * r.powi(3));
        assert_abs_diff_eq!(chi_hat_closed(&ball, &[r, 0.0, 0.0]).unwrap(), exact, epsilon = 1e-13);
        assert!((exact - m.value).abs() <= 3.0 * r.powi(-3));
    }
}

#[test]
fn ellipse_amplitude_envelope() {
    let ell = Body::ellipsoid(&[2.0, 1.0]).unwrap();
    let r = 40.0;
    let m = phase_model_eval(&ell, &[r, 0.0], 0.0).unwrap();
    assert_abs_diff_eq!(m.amplitude, (0.5f64).sqrt() / PI * r.powf(-1.5), epsilon = 1e-15);
    let eval = TransformEvaluator::new(ell, Method::Herz, Resolution::Fixed(2048)).unwrap();
    // One phase period along the axis is 1/(2 P(e_1)) · 2 = 1/a.
    let envelope = (0..200)
        .map(|k| {
            let t = r + 0.5 * k as f64 / 200.0;
            eval.eval(&[t, 0.0]).unwrap().abs() * (t / r).powf(1.5)
        })
        .fold(0.0, f64::max);
    assert!((envelope / m.amplitude - 1.0).abs() < 0.1, "{envelope} vs {}", m.amplitude);
}

#[test]
fn calibrated_offset_is_small() {
    let phi = calibrated_phase_offset();
    assert!(phi.abs() < 1e-3, "{phi}");
}

#[test]
fn cos_residual_examples() {
    let disc = Body::ball(2, 1.0).unwrap();
    let zeros = oracle::bessel_zeros(2, 40);
    let near20 = zeros
        .iter()
        .map(|z| z / (2.0 * PI))
        .min_by(|a, b| (a - 20.0).abs().total_cmp(&(b - 20.0).abs()))
        .unwrap();
    let phi = calibrated_phase_offset();
    assert!(cos_residual(&disc, &[near20, 0.0], phi).unwrap() <= 0.05);
    let (a, b) = (zeros[38] / (2.0 * PI), zeros[39] / (2.0 * PI));
    assert!(cos_residual(&disc, &[0.5 * (a + b), 0.0], phi).unwrap() >= 0.9);
    // Φ = π/2 exactly: 2πR − 3π/4 = π/2 at R = 5/8 · ... shifted by whole periods.
    let r = (0.5 * PI + 0.75 * PI) / (2.0 * PI) + 3.0;
    assert!(cos_residual(&disc, &[r, 0.0], 0.0).unwrap() < 1e-14);
}

#[test]
fn model_preconditions() {
    let disc = Body::ball(2, 1.0).unwrap();
    assert!(matches!(phase_model_eval(&disc, &[1.0, 0.0], 0.0), Err(Error::Domain(_))));
    let rs = Body::rounded_square(1.0, 0.25).unwrap();
    assert!(matches!(
        phase_model_eval(&rs, &[10.0, 0.0], 0.0),
        Err(Error::DegenerateCurvature(_))
    ));
    let cube = Body::cube(2, 0.5).unwrap();
    assert!(matches!(
        phase_model_eval(&cube, &[10.0, 3.0], 0.0),
        Err(Error::DegenerateCurvature(_))
    ));
}

fn window_envelope(body: &Body, window: &CutoffWindow, r: f64) -> f64 {
    (0..16)
        .map(|k| {
            let t = r + k as f64 / 16.0;
            localized_boundary(body, &[t, 0.0], window, 16384).unwrap().remainder
        })
        .fold(0.0, f64::max)
}

#[test]
fn localized_remainder_decays() {
    let disc = Body::ball(2, 1.0).unwrap();
    let window = CutoffWindow::new(vec![1.0, 0.0], 0.5, 4).unwrap();
    let e20 = window_envelope(&disc, &window, 20.0);
    let e40 = window_envelope(&disc, &window, 40.0);
    assert!(e20 <= 2e-2, "{e20}");
    assert!(e40 <= 1e-3, "{e40}");
    assert!(e20 / e40 >= 4.0, "{e20} / {e40}");
    // The localized part alone reproduces the transform up to the remainder.
    let loc = localized_boundary(&disc, &[40.0, 0.0], &window, 16384).unwrap();
    let exact = chi_hat_closed(&disc, &[40.0, 0.0]).unwrap();
    assert!((loc.chi_hat_part - exact).abs() <= loc.remainder / (2.0 * PI * 40.0) + 1e-12);
}

#[test]
fn localized_rejects_frequencies_outside_the_cone() {
    let disc = Body::ball(2, 1.0).unwrap();
    let window = CutoffWindow::new(vec![1.0, 0.0], 0.5, 4).unwrap();
    assert!(matches!(
        localized_boundary(&disc, &[0.0, 20.0], &window, 4096),
        Err(Error::ConeViolation(_))
    ));
    let cone = window.normal_cone(&disc).unwrap();
    assert_abs_diff_eq!(cone.half_angle(), 2.0 * (0.125f64).asin(), epsilon = 1e-9);
}

#[test]
fn window_shape() {
    let w = CutoffWindow::new(vec![1.0, 0.0], 0.5, 4).unwrap();
    assert_eq!(w.value(&[1.0, 0.0]), 1.0);
    assert_eq!(w.value(&[1.0, 0.5]), 0.0);
    assert_eq!(w.value(&[1.0, 0.7]), 0.0);
    let mid = w.value(&[1.0, 0.375]);
    assert_abs_diff_eq!(mid, 0.5, epsilon = 1e-12);
    // Derivatives up to order 3 vanish at the outer edge: value ~ (gap)^4.
    let g1 = w.value(&[1.0, 0.5 - 1e-3]);
    let g2 = w.value(&[1.0, 0.5 - 2e-3]);
    assert_abs_diff_eq!(g2 / g1, 16.0, epsilon = 0.2);
    assert!(CutoffWindow::new(vec![1.0, 0.0], 0.5, 1).is_err());
}
