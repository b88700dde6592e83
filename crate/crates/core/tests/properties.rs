use std::f64::consts::PI;

use proptest::prelude::*;
use skewbaker_core::basin::{
    classify_point, parse_grid_csv, render_slice, render_slice_with, write_grid_csv, write_ppm,
    PaletteSpec, PixelClass, RenderOptions, SliceSpec,
};
use skewbaker_core::domain::{
    check_growth, check_invariance, gap_growth_slack, in_l, in_l_alpha, telescoping_residual,
    AlphaParam,
};
use skewbaker_core::psh::{circle_submean, submean_check, u_profile, ProbeSpec};
use skewbaker_core::witness::{
    find_witnesses, first_coord_identity_residual, EXACT_TARGET,
};
use skewbaker_core::{apply_f, orbit, Complex64, PlanePoint};

fn seed_in_l_alpha() -> impl Strategy<Value = (PlanePoint, f64)> {
    (
        1.0f64..50.0,
        0.0f64..50.0,
        -100.0f64..100.0,
        -100.0f64..100.0,
        0.001f64..10.0,
    )
        .prop_map(|(zr, extra, zi, wi, alpha)| {
            let zr = zr + 1e-9;
            let wr = zr + alpha + extra + 1e-9;
            (PlanePoint::new(Complex64::new(zr, zi), Complex64::new(wr, wi)), alpha)
        })
}

/// Seeds in `L` with both coordinates of modulus below 50.
fn seed_in_l_bounded() -> impl Strategy<Value = PlanePoint> {
    (1.0f64..35.0, -35.0f64..35.0, 0.0f64..1.0, -1.0f64..1.0).prop_map(|(zr, zi, frac, t)| {
        let zr = zr + 1e-9;
        let wr = zr + 1.0 + 1e-9 + frac * (48.0 - zr);
        let wi = t * 0.99 * (50.0f64 * 50.0 - wr * wr).sqrt();
        PlanePoint::new(Complex64::new(zr, zi), Complex64::new(wr, wi))
    })
}

fn any_point(half: f64) -> impl Strategy<Value = PlanePoint> {
    (-half..half, -half..half, -half..half, -half..half)
        .prop_map(|(a, b, c, d)| PlanePoint::new(Complex64::new(a, b), Complex64::new(c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn forward_invariance((seed, alpha) in seed_in_l_alpha()) {
        let a = AlphaParam::new(alpha).unwrap();
        prop_assume!(in_l_alpha(&seed, a));
        let r = check_invariance(seed, a, 30).unwrap();
        prop_assert!(r.all_inside, "{:?}", r);
        prop_assert!(r.min_margin > 0.0);
        prop_assert!(gap_growth_slack(&orbit(seed, 30)) >= 0.0);
        let g = check_growth(seed, 30).unwrap();
        prop_assert!(g.w_bound_ok && g.z_bound_ok, "{:?}", g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn orbits_are_deterministic_consistent_and_prefix_closed(seed in any_point(20.0), n in 0usize..60, m in 0usize..60) {
        let a = orbit(seed, n);
        prop_assert_eq!(&a, &orbit(seed, n));
        for pair in a.points.windows(2) {
            prop_assert_eq!(apply_f(pair[0]).unwrap(), pair[1]);
        }
        prop_assert!(a.points.iter().all(|p| p.is_finite()));
        if a.is_complete() {
            let b = orbit(seed, m.min(n));
            prop_assert!(b.is_complete());
            prop_assert_eq!(&b.points[..], &a.points[..=m.min(n)]);
        }
    }

    #[test]
    fn membership_is_monotone_in_alpha(seed in any_point(50.0), a in 0.001f64..20.0, b in 0.001f64..20.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if in_l_alpha(&seed, AlphaParam::new(hi).unwrap()) {
            prop_assert!(in_l_alpha(&seed, AlphaParam::new(lo).unwrap()));
        }
    }

    #[test]
    fn telescoping_residual_small(seed in seed_in_l_bounded(), n in 1usize..=30) {
        prop_assert!(seed.z.norm() <= 50.0 && seed.w.norm() <= 50.0 && in_l(&seed));
        prop_assert!(telescoping_residual(seed, n).unwrap() <= 1e-9);
    }

    #[test]
    fn u_values_in_range(seed in any_point(10.0)) {
        let p = u_profile(seed, 20).unwrap();
        prop_assert!(p.values.iter().all(|&(_, u)| (-2.0..=0.0).contains(&u)));
    }

    #[test]
    fn u_tends_to_minus_one_on_l(seed in seed_in_l_bounded()) {
        let p = u_profile(seed, 40).unwrap();
        prop_assert!(p.tail_max <= -1.0 + 1e-9, "{}", p.tail_max);
    }

    #[test]
    fn identity_residual_sample(r in 0.0f64..50.0, t in 0.0f64..(2.0 * PI)) {
        let zeta = Complex64::from_polar(r, t);
        prop_assume!(zeta.norm() > 0.0);
        prop_assert!(first_coord_identity_residual(zeta).unwrap() <= 1e-10);
    }

    #[test]
    fn absorption_consistency(seed in any_point(6.0), budget in 1usize..60) {
        if let PixelClass::EnteredL(k) = classify_point(seed, budget) {
            if k >= 1 {
                let next = apply_f(seed).unwrap();
                prop_assert_eq!(classify_point(next, budget - 1), PixelClass::EnteredL(k - 1));
            }
        }
    }

    #[test]
    fn budget_monotonicity(seed in any_point(6.0), lo in 1usize..50, extra in 0usize..150) {
        let small = classify_point(seed, lo);
        let large = classify_point(seed, lo + extra);
        if small != PixelClass::NotEntered {
            prop_assert_eq!(small, large);
        }
    }

    #[test]
    fn quadrature_oracles(radius in 1e-3f64..=1.0, samples in prop::sample::select(vec![16usize, 64, 256]),
                          cre in -5.0f64..5.0, cim in -5.0f64..5.0) {
        let center = Complex64::new(cre, cim);
        let h = circle_submean(radius, samples, |l| Some((center + l).re)).unwrap();
        prop_assert!(h.deficit.abs() <= 1e-14 * center.norm().max(1.0));
        let q = circle_submean(radius, samples, |l| Some((center + l).norm_sqr())).unwrap();
        prop_assert!((q.deficit - radius * radius).abs() <= 1e-12 * center.norm_sqr().max(1.0));
    }

    #[test]
    fn sample_refinement_on_l((seed, _) in seed_in_l_alpha(), radius in 1e-4f64..0.01) {
        prop_assume!(in_l(&seed));
        let dir = PlanePoint::real(1.0, 0.5);
        let a = submean_check(&ProbeSpec::new(seed, dir, radius, 32).unwrap(), 10).unwrap();
        let b = submean_check(&ProbeSpec::new(seed, dir, radius, 64).unwrap(), 10).unwrap();
        prop_assert!((a.circle_mean - b.circle_mean).abs() < 1e-6);
    }

    #[test]
    fn grid_csv_round_trip(w in 1usize..6, h in 1usize..6, budget in 1usize..30) {
        let spec = SliceSpec::z_plane(Complex64::new(1.0, 0.5), (-3.0, 3.0), w, h);
        let r = render_slice(&spec, budget).unwrap();
        let text = String::from_utf8(write_grid_csv(&r)).unwrap();
        let rows = parse_grid_csv(&text).unwrap();
        prop_assert_eq!(rows.len(), w * h);
        for (i, j, class) in rows {
            prop_assert_eq!(class, r.class_at(i, j));
        }
    }
}

#[test]
fn exact_witness_family_to_twenty() {
    let seq = find_witnesses(EXACT_TARGET, 20).unwrap();
    assert_eq!(seq.len(), 20);
    assert!(seq.residuals.iter().all(|r| *r < 1e-12));
    assert!(seq.moduli_increasing());
}

#[test]
fn pixels_in_l_are_entered_at_zero() {
    let spec = SliceSpec::z_plane(Complex64::new(6.0, 1.0), (-5.0, 5.0), 48, 48);
    let r = render_slice(&spec, 20).unwrap();
    for j in 0..spec.height {
        for i in 0..spec.width {
            if in_l(&spec.pixel_point(i, j)) {
                assert_eq!(r.class_at(i, j), PixelClass::EnteredL(0));
            }
        }
    }
    assert_eq!(r.stats.total(), 48 * 48);
}

#[test]
fn worker_count_does_not_change_output() {
    let spec = SliceSpec::z_plane(Complex64::new(4.0, 0.0), (-5.0, 5.0), 64, 48);
    let render = |w| {
        let opts = RenderOptions { budget: 60, workers: Some(w), ..RenderOptions::default() };
        let r = render_slice_with(&spec, &opts).unwrap();
        write_ppm(&r, &PaletteSpec::default()).unwrap()
    };
    let one = render(1);
    for w in [2, 3, 7] {
        assert_eq!(one, render(w));
    }
}
