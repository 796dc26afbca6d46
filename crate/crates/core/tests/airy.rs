// Reference values keep all the digits they were computed with.
#![allow(clippy::excessive_precision)]

use bouncing_core::airy::{
    a_branches, a_plus_with_derivative, ai, ai_with_derivative, airy_poisson_check, airy_zero, airy_zeros,
    l_asymptotic, l_of_omega, l_on_grid, l_prime, leading_amplitude, AiryZeroTable, TestBump, B1, QUOTED_A0,
};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Plain f64 Maclaurin oracle, accurate to ~1e-14 absolute for |x| <= 3.
fn ai_oracle(x: f64) -> f64 {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * 1.354_117_939_426_400_4); // Gamma(2/3)
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * 2.678_938_534_707_747_6); // Gamma(1/3)
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0, x);
    for k in 0..60 {
        f += tf;
        g += tg;
        let kf = (k + 1) as f64;
        tf *= x * x * x / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x * x * x / ((3.0 * kf) * (3.0 * kf + 1.0));
    }
    c1 * f - c2 * g
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// High-precision reference values (Ai, Ai').
const REFERENCE: &[(f64, f64, f64)] = &[
    (-50.0, -0.161_881_423_612_320_92, 0.968_989_837_276_749_1),
    (-20.0, -0.176_406_127_077_984_7, 0.892_862_856_736_471_2),
    (-8.0, -0.052_705_050_356_386_2, 0.935_560_938_198_306_6),
    (-5.0, 0.350_761_009_024_114_3, 0.327_192_818_554_443_1),
    (-2.5, -0.112_325_067_692_966_1, 0.678_852_734_264_794_4),
    (0.0, 0.355_028_053_887_817_24, -0.258_819_403_792_806_8),
    (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63),
    (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_624_8e-4),
    (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
    (8.5, 1.099_700_975_519_550_7e-8, -3.237_725_440_447_602_3e-8),
    (20.0, 1.691_672_868_670_540_3e-27, -7.586_391_625_748_355e-27),
    (50.0, 4.584_941_724_074_828_5e-104, -3.244_331_819_828_799_3e-103),
];

#[test]
fn ai_matches_reference_table() {
    for &(x, a, ap) in REFERENCE {
        let (v, d) = ai_with_derivative(x).unwrap();
        assert!((v / a - 1.0).abs() < 1e-10, "Ai({x}) = {v}, want {a}");
        assert!((d / ap - 1.0).abs() < 1e-10, "Ai'({x}) = {d}, want {ap}");
    }
}

#[test]
fn ai_matches_plain_series_oracle() {
    for i in 0..=60 {
        let x = -3.0 + 0.1 * i as f64;
        assert!((ai(x).unwrap() - ai_oracle(x)).abs() < 1e-13, "x = {x}");
    }
}

#[test]
fn ai_examples() {
    assert!((ai(0.0).unwrap() - 0.355_028_053_9).abs() < 1e-10);
    let one_term = (-(2.0 / 3.0) * 5f64.powf(1.5)).exp() / (2.0 * PI.sqrt() * 5f64.powf(0.25));
    assert!((ai(5.0).unwrap() / one_term - 1.0).abs() < 0.01);
    assert_eq!(ai(200.0).unwrap(), 0.0);
    assert!(ai(f64::NAN).is_err());
    assert!(ai(f64::INFINITY).is_err());
}

#[test]
fn first_zero_against_bisection_oracle() {
    let oracle = bisect(-2.5, -2.2, ai_oracle);
    let z = airy_zero(1).unwrap();
    assert!((z.omega_k + oracle).abs() < 1e-12);
    assert!((z.omega_k - 2.338_107_4).abs() < 1e-6);
    assert!(ai(-z.omega_k).unwrap().abs() < 1e-10);
}

#[test]
fn branch_examples() {
    let b = a_branches(2.0).unwrap();
    assert!(((b.a_plus + b.a_minus).re - ai(-2.0).unwrap()).abs() < 1e-9);
    assert!((b.a_minus - b.a_plus.conj()).norm() < 1e-12);
    assert!((b.a_plus + b.a_minus).im.abs() < 1e-10);
}

#[test]
fn leading_amplitude_at_twenty() {
    let a = a_branches(20.0).unwrap().a_plus.norm();
    assert!((a / leading_amplitude(20.0) - 1.0).abs() < 0.05);
    // The printed constant 1/(4 pi^{3/2}) is smaller by exactly 2 pi.
    assert!((QUOTED_A0 - 1.0 / (4.0 * PI.powf(1.5))).abs() < 1e-17);
    let ratio = a / (QUOTED_A0 * 20f64.powf(-0.25));
    assert!((ratio / (2.0 * PI) - 1.0).abs() < 0.05);
}

#[test]
fn a_plus_oscillates_as_e_plus_i_xi() {
    let w: f64 = 30.0;
    let xi = 2.0 / 3.0 * w * w.sqrt();
    let a = a_branches(w).unwrap().a_plus;
    let expected = num_complex::Complex64::from_polar(leading_amplitude(w), xi - PI / 4.0);
    assert!((a - expected).norm() < 0.01 * a.norm());
}

#[test]
fn l_examples() {
    assert!((l_of_omega(0.0).unwrap() - PI / 3.0).abs() < 1e-14);
    let at_m10 = l_of_omega(-10.0).unwrap();
    assert!(at_m10 > 0.0 && at_m10 <= 1e-3);
    let w5 = airy_zero(5).unwrap().omega_k;
    assert!((l_of_omega(w5).unwrap() - 10.0 * PI).abs() < 1e-8);
    // Next correction is ~0.24/u^3 with u = w^{3/2}.
    for w in [1.0f64, 2.0, 3.0, 10.0, 50.0] {
        let u = w * w.sqrt();
        assert!((l_of_omega(w).unwrap() - l_asymptotic(w, B1)).abs() < 0.3 / u.powi(3));
    }
}

#[test]
fn l_prime_against_wronskian_oracle() {
    // L' = (2/pi) / (Ai(-w)^2 + Bi(-w)^2), with Bi recovered from Im A+.
    for i in 0..200 {
        let w = -12.0 + 0.3 * i as f64;
        let (a, _) = a_plus_with_derivative(w).unwrap();
        let oracle = (2.0 / PI) / (4.0 * a.norm_sqr());
        let lp = l_prime(w).unwrap();
        assert!((lp / oracle - 1.0).abs() < 1e-10, "w = {w}: {lp} vs {oracle}");
    }
}

#[test]
fn l_prime_at_zeros_is_two_pi_ai_prime_squared() {
    let t = airy_zeros(30).unwrap();
    for e in t.entries() {
        let (_, d) = ai_with_derivative(-e.omega_k).unwrap();
        assert!((e.l_prime_k / (2.0 * PI * d * d) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn l_on_grid_unwraps_and_rejects_coarse_grids() {
    let grid: Vec<f64> = (0..400).map(|i| -5.0 + 0.1 * i as f64).collect();
    let l = l_on_grid(&grid).unwrap();
    for (w, v) in grid.iter().zip(&l) {
        assert!((v - l_of_omega(*w).unwrap()).abs() < 1e-10);
    }
    assert!(l_on_grid(&[1.0, 60.0]).is_err());
    assert!(l_on_grid(&[2.0, 1.0]).is_err());
}

#[test]
fn zero_table_acceptance_invariants() {
    let t = airy_zeros(1000).unwrap();
    assert_eq!(t.k_max(), 1000);
    let mut prev = 0.0;
    for e in t.entries() {
        assert!(e.omega_k > prev);
        prev = e.omega_k;
        assert!(ai(-e.omega_k).unwrap().abs() <= 1e-10, "k = {}", e.k);
        assert!((l_of_omega(e.omega_k).unwrap() - 2.0 * PI * e.k as f64).abs() <= 1e-8);
        assert!(e.l_prime_k > 0.0);
        if e.k >= 20 {
            assert!((e.l_prime_k / (2.0 * e.omega_k.sqrt()) - 1.0).abs() < 0.02);
        }
    }
    let w100 = t.omega(100).unwrap();
    assert!((w100 / (1.5 * PI * 100.0).powf(2.0 / 3.0) - 1.0).abs() <= 0.01);
    // L'/(2 sqrt w) -> 1; the sqrt(2 w) normalisation is off by sqrt 2.
    let e50 = t.get(50).unwrap();
    let r = e50.l_prime_k / (2.0 * e50.omega_k.sqrt());
    assert!((0.99..=1.01).contains(&r));
    let quoted = e50.l_prime_k / (2.0 * e50.omega_k).sqrt();
    assert!((quoted / 2f64.sqrt() - 1.0).abs() < 0.01);
}

#[test]
fn zero_table_csv_round_trip() {
    let t = airy_zeros(50).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("zeros.csv");
    t.write_csv(&p).unwrap();
    let back = AiryZeroTable::read_csv(&p).unwrap();
    assert_eq!(t, back);
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("k,omega_k,L_prime_k"));
    assert!(t.get(51).is_err());
    assert!(airy_zeros(0).is_err());
}

#[test]
fn poisson_examples() {
    let t = airy_zeros(60).unwrap();
    let f = TestBump::new(5.0, 15.0, 0.0).unwrap();
    let r0 = airy_poisson_check(&f, 0, &t).unwrap();
    let plain =
        bouncing_core::quadrature::integrate(&bouncing_core::quadrature::GaussLegendre::new(20), 5.0, 15.0, 64, |w| {
            f.eval(w)
        });
    assert!((r0.lhs.re - plain).abs() < 1e-10 && r0.lhs.im.abs() < 1e-12);
    assert!(r0.gap > 1e-3 * r0.rhs.abs());
    let r = airy_poisson_check(&f, 40, &t).unwrap();
    assert!(r.gap <= 1e-4 * r.rhs.abs(), "gap {} rhs {}", r.gap, r.rhs);

    let neg = TestBump::new(-10.0, -2.0, 0.0).unwrap();
    let rn = airy_poisson_check(&neg, 5, &t).unwrap();
    assert_eq!(rn.rhs, 0.0);

    let short = airy_zeros(3).unwrap();
    assert!(airy_poisson_check(&f, 2, &short).is_err());
}

proptest! {
    #[test]
    fn branch_identity_holds(z in -10.0f64..40.0) {
        let b = a_branches(z).unwrap();
        prop_assert!((b.ai_of_minus_z - ai(-z).unwrap()).abs() < 1e-9);
        prop_assert!((b.a_minus - b.a_plus.conj()).norm() == 0.0);
    }

    #[test]
    fn l_strictly_increasing(w in -20.0f64..200.0, dw in 1e-6f64..0.5) {
        prop_assert!(l_of_omega(w + dw).unwrap() > l_of_omega(w).unwrap());
    }
}
