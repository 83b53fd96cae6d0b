use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_zeros::packing::{
    cell_upper_bound, fit_exponent, greedy_pack, greedy_pack_naive, greedy_pack_ordered,
    is_separated, ScalingReport, ScalingRow, ScanOrder,
};
use spectral_zeros::Error;

fn lattice(n: i32) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            pts.push(vec![i as f64, j as f64]);
        }
    }
    pts
}

#[test]
fn collinear_points() {
    let pts: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 * 0.1, 0.0]).collect();
    let p = greedy_pack(&pts, 1.0).unwrap();
    assert_eq!(p.count, 2);
    assert_eq!(p.retained, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
}

#[test]
fn lattice_is_kept_whole() {
    let pts = lattice(10);
    let p = greedy_pack(&pts, 1.0).unwrap();
    assert_eq!(p.count, 121);
    assert!(cell_upper_bound(&pts, 2) >= 121);
}

#[test]
fn small_cluster_packs_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pts = Vec::new();
    while pts.len() < 1000 {
        let (x, y): (f64, f64) = (rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
        if x * x + y * y <= 0.16 {
            pts.push(vec![x, y]);
        }
    }
    assert_eq!(greedy_pack(&pts, 1.0).unwrap().count, 1);
}

#[test]
fn upper_bound_examples() {
    assert_eq!(cell_upper_bound(&[vec![0.3, 0.7]], 2), 1);
    let two = vec![vec![0.0, 0.0], vec![0.1, 0.0]];
    let ub = cell_upper_bound(&two, 2);
    assert!(ub <= 2);
    let lb = greedy_pack(&two, 1.0).unwrap().count;
    assert_eq!(lb, 1);
    assert!(lb <= ub);
    assert_eq!(greedy_pack(&[], 1.0).unwrap().count, 0);
    assert_eq!(cell_upper_bound(&[], 2), 0);
    assert!(matches!(greedy_pack(&two, 0.0), Err(Error::Domain(_))));
}

#[test]
fn fit_examples() {
    let rows: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&r| (r, r * r)).collect();
    let f = fit_exponent(&rows).unwrap();
    assert_abs_diff_eq!(f.slope, 2.0, epsilon = 1e-12);
    assert!(f.residual < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rows: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0, 128.0]
        .iter()
        .map(|&r| (r, 5.0 * r * (1.0 + 0.01 * rng.gen_range(-1.0..1.0))))
        .collect();
    let f = fit_exponent(&rows).unwrap();
    assert!((f.slope - 1.0).abs() <= 0.05);
    assert_abs_diff_eq!(f.intercept.exp(), 5.0, epsilon = 0.5);

    assert!(matches!(
        fit_exponent(&[(8.0, 1.0), (16.0, 0.0), (32.0, 3.0)]),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        fit_exponent(&[(8.0, 1.0), (32.0, 3.0)]),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        fit_exponent(&[(8.0, 1.0), (10.0, 2.0), (16.0, 3.0)]),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn report_fits_both_bounds() {
    let rows: Vec<ScalingRow> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&r| {
            let pts = lattice(r as i32);
            ScalingRow::measure(r, &pts, 2, 0.1).unwrap()
        })
        .collect();
    let report = ScalingReport::new("lattice".into(), vec![1.0, 0.0], rows).unwrap();
    assert!(report.sandwich_holds());
    assert!(report.lower_fit.slope > 1.6 && report.lower_fit.slope < 2.1);
}

#[test]
fn order_robust_exponent_on_random_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut fwd = Vec::new();
    let mut rev = Vec::new();
    for r in [8.0, 16.0, 32.0] {
        let pts: Vec<Vec<f64>> = (0..(20.0 * r * r) as usize)
            .map(|_| vec![rng.gen_range(0.0..r), rng.gen_range(0.0..r)])
            .collect();
        fwd.push((r, greedy_pack_ordered(&pts, 1.0, ScanOrder::Lexicographic).unwrap().count as f64));
        rev.push((r, greedy_pack_ordered(&pts, 1.0, ScanOrder::Reverse).unwrap().count as f64));
    }
    let a = fit_exponent(&fwd).unwrap().slope;
    let b = fit_exponent(&rev).unwrap().slope;
    assert!((a - b).abs() <= 0.1, "{a} vs {b}");
}

fn cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-6.0f64..6.0, 2), 0..300)
}

fn cloud3() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 0..200)
}

proptest! {
    #[test]
    fn sandwich(pts in cloud()) {
        let lb = greedy_pack(&pts, 1.0).unwrap().count;
        prop_assert!(lb <= cell_upper_bound(&pts, 2));
    }

    #[test]
    fn sandwich_three_dimensional(pts in cloud3()) {
        let lb = greedy_pack(&pts, 1.0).unwrap().count;
        prop_assert!(lb <= cell_upper_bound(&pts, 3));
    }

    #[test]
    fn retained_subset_is_separated(pts in cloud(), sep in 0.3f64..2.0) {
        let p = greedy_pack(&pts, sep).unwrap();
        prop_assert!(is_separated(&p.retained, sep));
    }

    #[test]
    fn hash_matches_naive(pts in cloud3(), reverse in any::<bool>()) {
        let order = if reverse { ScanOrder::Reverse } else { ScanOrder::Lexicographic };
        let fast = greedy_pack_ordered(&pts, 1.0, order).unwrap();
        let slow = greedy_pack_naive(&pts, 1.0, order);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn greedy_result_is_maximal(pts in cloud()) {
        let p = greedy_pack(&pts, 1.0).unwrap();
        for q in &pts {
            let near = p.retained.iter().any(|r| {
                ((r[0] - q[0]).powi(2) + (r[1] - q[1]).powi(2)) < 1.0
            });
            prop_assert!(near || p.retained.contains(q));
        }
    }
}

#[test]
fn hash_matches_naive_on_ten_thousand_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let pts: Vec<Vec<f64>> = (0..10_000)
        .map(|_| vec![rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0)])
        .collect();
    let fast = greedy_pack(&pts, 1.0).unwrap();
    let slow = greedy_pack_naive(&pts, 1.0, ScanOrder::Lexicographic);
    assert_eq!(fast, slow);
    assert!(is_separated(&fast.retained, 1.0));
}
