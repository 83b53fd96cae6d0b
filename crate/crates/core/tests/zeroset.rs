use approx::assert_abs_diff_eq;
use spectral_zeros::oracle;
use spectral_zeros::vecmath::{dot, norm, rotate2};
use spectral_zeros::zeroset::{
    radial_zeros, scan_ray, shell_index, x_set, x_set_from_shells, zero_distance, ScanOptions,
    ShellOptions,
};
use spectral_zeros::{Body, Error, FrequencyBall, NormalCone, TransformEvaluator};
use std::f64::consts::PI;

fn disc() -> TransformEvaluator {
    TransformEvaluator::closed(Body::ball(2, 1.0).unwrap()).unwrap()
}

fn unit_cube() -> TransformEvaluator {
    TransformEvaluator::closed(Body::cube(2, 0.5).unwrap()).unwrap()
}

fn bessel_radii(count: usize) -> Vec<f64> {
    oracle::bessel_zeros(2, count).iter().map(|z| z / (2.0 * PI)).collect()
}

#[test]
fn disc_radial_zeros_match_bessel_roots() {
    let want = bessel_radii(6);
    for u in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8]] {
        let zs = radial_zeros(&disc(), &u, 0.5, 3.5, &ScanOptions::default()).unwrap();
        assert_eq!(zs.len(), 6);
        for (z, w) in zs.iter().zip(&want) {
            assert_abs_diff_eq!(z.radius, w, epsilon = 1e-9);
        }
    }
    let expect = [0.6098, 1.1166, 1.6192, 2.1205, 2.6213, 3.1219];
    for (w, e) in want.iter().zip(expect) {
        assert_abs_diff_eq!(*w, e, epsilon = 1e-4);
    }
}

#[test]
fn cube_radial_zeros_are_integers() {
    let zs = radial_zeros(&unit_cube(), &[1.0, 0.0], 0.5, 3.5, &ScanOptions::default()).unwrap();
    let radii: Vec<f64> = zs.iter().map(|z| z.radius).collect();
    assert_eq!(radii.len(), 3);
    for (r, k) in radii.iter().zip([1.0, 2.0, 3.0]) {
        assert_abs_diff_eq!(*r, k, epsilon = 1e-10);
    }
}

#[test]
fn every_root_is_certified_by_a_sign_change() {
    let eval = disc();
    let zs = radial_zeros(&eval, &[0.3, 0.9], 1.0, 40.0, &ScanOptions::default()).unwrap();
    let u = zs[0].direction.clone();
    for z in &zs {
        let (lo, hi) = z.bracket;
        assert!(hi - lo <= 1e-10);
        let fl = eval.eval(&[u[0] * lo, u[1] * lo]).unwrap();
        let fh = eval.eval(&[u[0] * hi, u[1] * hi]).unwrap();
        assert!(fl * fh <= 0.0);
        assert!(z.residual <= 1e-10);
    }
    // Consecutive shells sit half a model period apart.
    for w in zs.windows(2).skip(4) {
        assert_abs_diff_eq!(w[1].radius - w[0].radius, 0.5, epsilon = 0.01);
    }
}

#[test]
fn coarse_step_is_refused() {
    let opts = ScanOptions {
        step: Some(0.2),
        ..ScanOptions::default()
    };
    assert!(matches!(
        radial_zeros(&disc(), &[1.0, 0.0], 0.5, 3.5, &opts),
        Err(Error::Resolution(_))
    ));
    assert!(matches!(
        radial_zeros(&disc(), &[1.0, 0.0], 3.5, 0.5, &ScanOptions::default()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn tangential_zeros_are_flagged() {
    // Along the diagonal the cube transform is sin²(πt/√2)/(π² t²/2): every zero is double.
    let scan = scan_ray(&unit_cube(), &[1.0, 1.0], 0.5, 6.0, &ScanOptions {
        step: Some(0.1),
        ..ScanOptions::default()
    })
    .unwrap();
    assert!(scan.zeros.is_empty());
    assert_eq!(scan.grazing.len(), 4);
    for (g, k) in scan.grazing.iter().zip(1..) {
        assert!((g - k as f64 * 2f64.sqrt()).abs() <= 0.1);
    }
}

#[test]
fn zero_distance_examples() {
    let eval = disc();
    let radii = bessel_radii(40);
    let d0 = zero_distance(&eval, &[radii[0], 0.0]).unwrap();
    assert!(d0.found && d0.distance <= 1e-6);
    let mid = 0.5 * (radii[30] + radii[31]);
    let d1 = zero_distance(&eval, &[mid, 0.0]).unwrap();
    assert!(d1.found);
    assert!((d1.distance - 0.25).abs() <= 0.025, "{}", d1.distance);
    // Along the ray through (1.5, 0.3) the nearest vertical line is reached
    // after |ξ|/|ξ_1| · 0.5.
    let xi = [1.5, 0.3];
    let d2 = zero_distance(&unit_cube(), &xi).unwrap();
    assert!(d2.found);
    assert_abs_diff_eq!(d2.distance, 0.5 * norm(&xi) / 1.5, epsilon = 1e-9);
    assert!(matches!(zero_distance(&eval, &[0.0, 0.0]), Err(Error::Domain(_))));
}

fn placed(axis_angle: f64, r: f64) -> (NormalCone, FrequencyBall) {
    let axis = [axis_angle.cos(), axis_angle.sin()];
    (
        NormalCone::new(&axis, 0.45).unwrap(),
        FrequencyBall::along_axis(&axis, 3.0, r).unwrap(),
    )
}

#[test]
fn disc_shells_are_roots_and_count_matches_spacing() {
    let eval = disc();
    let r = 32.0;
    let (cone, ball) = placed(0.0, r);
    let shells = shell_index(&eval, &cone, &ball, &ShellOptions::default()).unwrap();
    assert!(!shells.is_empty());
    let radii = bessel_radii(300);
    for z in &shells {
        assert!(eval.eval(&z.point).unwrap().abs() <= 1e-8);
        assert!(ball.contains(&z.point));
        let nearest = radii
            .iter()
            .map(|w| (w - z.radius).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest <= 1e-8);
    }
    // Shells 1/2 apart across a ball of diameter 2R.
    let mut ids: Vec<i64> = shells.iter().map(|z| (2.0 * z.radius).round() as i64).collect();
    ids.sort_unstable();
    ids.dedup();
    let expect = 2.0 * r / 0.5;
    assert!((ids.len() as f64 - expect).abs() <= 0.2 * expect, "{}", ids.len());
}

#[test]
fn cube_shells_lie_on_lattice_lines() {
    let eval = unit_cube();
    let (cone, ball) = placed(0.0, 32.0);
    let shells = shell_index(&eval, &cone, &ball, &ShellOptions::default()).unwrap();
    let near_int = |v: f64| (v - v.round()).abs() <= 1e-7;
    let vertical = shells.iter().filter(|z| near_int(z.point[0])).count();
    for z in &shells {
        assert!(near_int(z.point[0]) || near_int(z.point[1]), "{:?}", z.point);
    }
    // Rays near the first axis meet vertical lines far more often than horizontal ones.
    assert!(vertical as f64 >= 0.7 * shells.len() as f64);
}

#[test]
fn shells_require_the_ball_inside_the_cone() {
    let cone = NormalCone::new(&[1.0, 0.0], 0.2).unwrap();
    let ball = FrequencyBall::along_axis(&[1.0, 0.0], 3.0, 16.0).unwrap();
    assert!(matches!(
        shell_index(&disc(), &cone, &ball, &ShellOptions::default()),
        Err(Error::ConeViolation(_))
    ));
    let (cone, ball) = placed(0.0, 16.0);
    let opts = ShellOptions {
        n_dirs: Some(4),
        ..ShellOptions::default()
    };
    assert!(matches!(
        shell_index(&disc(), &cone, &ball, &opts),
        Err(Error::Resolution(_))
    ));
}

#[test]
fn cube_translate_by_lattice_vector_keeps_vertical_lines() {
    let eval = unit_cube();
    let (cone, ball) = placed(0.0, 16.0);
    let shells = shell_index(&eval, &cone, &ball, &ShellOptions::default()).unwrap();
    let near_int = |v: f64| (v - v.round()).abs() <= 1e-7;
    let eligible: Vec<_> = shells
        .iter()
        .filter(|z| near_int(z.point[0]) && ball.contains(&[z.point[0] + 1.0, z.point[1]]))
        .collect();
    let xs = x_set_from_shells(&eval, &shells, &[1.0, 0.0], &ball, 1.0 / 16.0).unwrap();
    let kept = xs.iter().filter(|x| near_int(x.base.point[0])).count();
    assert!(kept as f64 >= 0.99 * eligible.len() as f64, "{kept} of {}", eligible.len());
}

#[test]
fn disc_retention_is_sparse_and_near_integrality_holds() {
    let eval = disc();
    let r = 64.0;
    let (cone, ball) = placed(PI / 8.0, r);
    let shells = shell_index(&eval, &cone, &ball, &ShellOptions::default()).unwrap();
    let eta = [1.0, 0.0];
    let xs = x_set_from_shells(&eval, &shells, &eta, &ball, 1.0 / r).unwrap();
    let frac = xs.len() as f64 / shells.len() as f64;
    assert!(frac < 0.2, "{frac}");
    assert!(!xs.is_empty());
    // Retained directions satisfy u·η ≈ k/2.
    let mut s3: Vec<f64> = xs
        .iter()
        .map(|x| {
            let v = 2.0 * dot(&x.base.direction, &eta);
            (v - v.round()).abs()
        })
        .collect();
    s3.sort_by(f64::total_cmp);
    assert!(s3[s3.len() * 9 / 10] <= 0.1, "{}", s3[s3.len() * 9 / 10]);
}

#[test]
fn x_samples_are_consistent() {
    let eval = disc();
    let r = 16.0;
    let (cone, ball) = placed(PI / 8.0, r);
    let tol = 1.0 / r;
    let xs = x_set(&eval, &[0.0, 1.0], &cone, &ball, Some(tol), &ShellOptions::default()).unwrap();
    assert!(!xs.is_empty());
    for x in xs.iter().step_by(7) {
        assert!(ball.contains(&x.base.point) && ball.contains(&x.shifted));
        assert!(zero_distance(&eval, &x.base.point).unwrap().distance <= 1e-8);
        let d = zero_distance(&eval, &x.shifted).unwrap();
        assert!(d.found && d.distance <= tol + 1e-12);
        assert_abs_diff_eq!(d.distance, x.delta, epsilon = 1e-9);
    }
}

#[test]
fn x_set_cardinality_is_rotation_invariant() {
    let eval = disc();
    let r = 32.0;
    let eta = [0.8, 0.6];
    let base = PI / 8.0;
    let count = |rot: f64| {
        let (cone, ball) = placed(base + rot, r);
        x_set(&eval, &rotate2(&eta, rot), &cone, &ball, None, &ShellOptions::default())
            .unwrap()
            .len() as f64
    };
    let c0 = count(0.0);
    for rot in [0.3, 1.1, 2.0] {
        let c = count(rot);
        assert!((c - c0).abs() <= 0.1 * c0, "{c} vs {c0}");
    }
}

#[test]
fn eta_out_of_range_is_rejected() {
    let (cone, ball) = placed(0.0, 16.0);
    for eta in [[3.0, 0.0], [0.1, 0.1]] {
        assert!(matches!(
            x_set(&disc(), &eta, &cone, &ball, None, &ShellOptions::default()),
            Err(Error::Domain(_))
        ));
    }
    assert!(matches!(
        x_set(&disc(), &[1.0, 0.0], &cone, &ball, Some(0.0), &ShellOptions::default()),
        Err(Error::Domain(_))
    ));
}
