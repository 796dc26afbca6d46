use bouncing_core::airy::{airy_zeros, AiryZeroTable};
use bouncing_core::bump::{phi, psi2};
use bouncing_core::reflection::*;
use bouncing_core::regression::loglog_slope;
use bouncing_core::spectral::green_dyadic;
use bouncing_core::{Complex64, Error, PhysParams};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn table() -> &'static AiryZeroTable {
    static T: OnceLock<AiryZeroTable> = OnceLock::new();
    T.get_or_init(|| airy_zeros(3000).unwrap())
}

/// a = gamma = 0.3 with lambda = a^{3/2}/h.
fn params(lambda: f64) -> PhysParams {
    let a: f64 = 0.3;
    PhysParams::new(a.powf(1.5) / lambda, a, 0.5, 5.0).unwrap()
}

fn direct() -> ReflectionConfig {
    ReflectionConfig { method: PacketMethod::Direct, ..Default::default() }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn alpha_critical_examples() {
    let g: f64 = 0.09;
    let c = alpha_critical(0.0, 0.0, 2.0 * 2.0 * g.sqrt(), g, 2).unwrap();
    assert!((c.alpha - 1.0).abs() < 1e-15 && c.in_window);
    let c = alpha_critical(0.1, 0.1, 6.0 * g.sqrt(), g, 3).unwrap();
    assert!((c.alpha - (1.0 - 0.2 / 6.0f64).powi(2)).abs() < 1e-14);
    assert!((c.alpha - 0.934_444_444_444_444_4).abs() < 1e-12);
    let l = alpha_critical(0.3, -0.7, 1.0, g, 1).unwrap();
    let r = alpha_critical(-0.7, 0.3, 1.0, g, 1).unwrap();
    assert_eq!(l, r);
    assert!(!alpha_critical(0.0, 0.0, 0.1, g, 1).unwrap().in_window);
    assert!(matches!(alpha_critical(2.0, 2.0, 1.0, g, 1), Err(Error::NoCriticalPoint(_))));
    assert!(alpha_critical(0.0, 0.0, 1.0, g, 0).is_err());
}

#[test]
fn n_window_examples() {
    assert_eq!(n_window(0.1, 0.01, 3.0), 0..=3);
    assert_eq!(n_window(0.03, 0.01, 3.0), 0..=0);
    assert_eq!(n_window(2.0 * 0.3f64.sqrt(), 0.3, 3.0), 0..=6);
}

#[test]
fn packet_bound_examples() {
    let h = 1e-4;
    let lambda: f64 = 1000.0;
    let l13 = lambda.cbrt();
    // N = 2 lambda^{1/3}, K = 1
    let (b, tag) = packet_bound(20, lambda, 1.0, h);
    assert_eq!(tag, RegimeTag::LargeN);
    assert!((b - h.cbrt() / (20.0 / l13).sqrt()).abs() < 1e-15);
    // |K - 1| = 1/N^2
    let (b, tag) = packet_bound(4, lambda, 1.0 + 1.0 / 16.0, h);
    assert_eq!(tag, RegimeTag::Far);
    assert!((b - h.cbrt() / 3.0).abs() < 1e-15);
    let (b, tag) = packet_bound(4, lambda, 1.0, h);
    assert_eq!(tag, RegimeTag::Near);
    assert!((b - h.cbrt() / (4.0 / l13).powf(0.25)).abs() < 1e-15);
    // between 1/(4N^2) and 1/N^2 the larger bound is used
    let k = 1.0 + 0.5 / 16.0;
    let (b, _) = packet_bound(4, lambda, k, h);
    let far = h.cbrt() / (1.0 + 8.0 * (k - 1.0).sqrt());
    let near = h.cbrt() / ((4.0 / l13).powf(0.25) + 4f64.cbrt() * (k - 1.0).powf(1.0 / 6.0));
    assert_eq!(b, far.max(near));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn phase_derivatives_match_finite_differences(
        n in 0usize..8, gamma in 0.05f64..0.5, t in 0.1f64..2.0, xf in 0.0f64..2.0, af in 0.0f64..2.0,
        alpha in 0.5f64..1.5, s in -2.0f64..2.0, sigma in -2.0f64..2.0,
    ) {
        let ph = ReflectionPhase { n, gamma, t, x: xf * gamma, a: af * gamma };
        let d = 1e-5;
        let scale = gamma.powf(1.5) * (1.0 + n as f64 + t / gamma.sqrt());
        let fd_sigma = (ph.value(alpha, s, sigma + d) - ph.value(alpha, s, sigma - d)) / (2.0 * d);
        let fd_s = (ph.value(alpha, s + d, sigma) - ph.value(alpha, s - d, sigma)) / (2.0 * d);
        let fd_alpha = (ph.value(alpha + d, s, sigma) - ph.value(alpha - d, s, sigma)) / (2.0 * d);
        prop_assert!((fd_sigma - ph.d_sigma(alpha, sigma)).abs() <= 1e-6 * scale);
        prop_assert!((fd_s - ph.d_s(alpha, s)).abs() <= 1e-6 * scale);
        prop_assert!((fd_alpha - ph.d_alpha(alpha, s, sigma)).abs() <= 1e-6 * scale);
    }

    #[test]
    fn critical_point_cancels_alpha_derivative(
        n in 1usize..6, sigma in -1.0f64..1.0, s in -1.0f64..1.0, kk in 0.8f64..1.2,
    ) {
        let gamma: f64 = 0.2;
        let t = 2.0 * n as f64 * kk * kk * gamma.sqrt() + (sigma + s) * gamma.sqrt();
        prop_assume!(t > 0.0);
        let c = alpha_critical(sigma, s, t, gamma, n).unwrap();
        let ph = ReflectionPhase { n, gamma, t, x: 0.1, a: 0.1 };
        prop_assert!(ph.d_alpha(c.alpha, s, sigma).abs() < 1e-12 * (1.0 + n as f64));
    }
}

/// Composite Simpson on [lo, hi] with `m` (even) intervals.
fn simpson(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let d = (hi - lo) / m as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..m {
        acc += f(lo + i as f64 * d) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (d / 3.0)
}

/// N = 0 term of the triple integral, by brute-force Simpson in (alpha, sigma, s),
/// factorised at fixed alpha.
fn free_packet_oracle(t: f64, x: f64, a: f64, gamma: f64, h: f64) -> Complex64 {
    let lam = gamma.powf(1.5) / h;
    let (xr, ar, bt) = (x / gamma, a / gamma, t / gamma.sqrt());
    let cut = |u: f64| phi(1.5 * u);
    let smax = 2.0 * 1.5f64.sqrt();
    let inner = |c: f64, alpha: f64| {
        simpson(-smax, smax, 6000, |s| {
            Complex64::from_polar(cut(s / (2.0 * alpha.sqrt())), lam * (s * s * s / 3.0 + s * (c - alpha)))
        })
    };
    let i = simpson(0.5, 1.5, 1600, |alpha| {
        let w = psi2(alpha);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        inner(xr, alpha) * inner(ar, alpha) * Complex64::from_polar(w, lam * bt * alpha)
    });
    i * (gamma * gamma / (4.0 * PI * PI * h))
}

#[test]
fn free_packet_matches_triple_quadrature() {
    let p = params(50.0);
    let a = p.a;
    for (bt, xf) in [(0.6, 1.0), (1.0, 0.7)] {
        let t = bt * a.sqrt();
        let v = v_packet(0, t, xf * a, a, a, &p, &ReflectionConfig::default()).unwrap();
        assert_eq!(v.regime_tag, RegimeTag::Free);
        let o = free_packet_oracle(t, xf * a, a, a, p.h);
        assert!(rel(v.value, o) < 1e-3, "T = {bt}: {} vs {}", v.value, o);
    }
}

#[test]
fn reflection_sum_matches_spectral_sum() {
    let p = params(100.0);
    let a = p.a;
    for bt in [1.5, 2.0, 3.0] {
        let t = bt * a.sqrt();
        let g = green_dyadic(table(), t, a, a, a, &p).unwrap();
        let r = green_reflection(t, a, a, a, &p, &direct()).unwrap();
        assert!(rel(r.green, g) <= 5e-2, "T = {bt}");
        let ex = green_reflection(t, a, a, a, &p, &ReflectionConfig { method: PacketMethod::AlphaExact, ..direct() })
            .unwrap();
        assert!(rel(ex.green, g) <= 1e-6, "T = {bt}");
    }
}

#[test]
fn direct_sum_is_stable_under_doubling() {
    let p = params(100.0);
    let a = p.a;
    for bt in [1.5, 2.0, 3.0] {
        let t = bt * a.sqrt();
        let base = green_reflection(t, a, a, a, &p, &direct()).unwrap().green;
        let wide = green_reflection(t, a, a, a, &p, &ReflectionConfig { m_cut: 6.0, ..direct() }).unwrap().green;
        let fine = green_reflection(t, a, a, a, &p, &ReflectionConfig { node_scale: 2.0, ..direct() }).unwrap().green;
        assert!(rel(wide, base) <= 1e-3);
        assert!(rel(fine, base) <= 1e-3);
    }
}

#[test]
fn stationary_phase_packets_are_quadrature_converged() {
    let p = params(100.0);
    let a = p.a;
    for (n, bt) in [(1, 2.0), (1, 1.5), (2, 3.0)] {
        let t = bt * a.sqrt();
        let base = v_packet(n, t, a, a, a, &p, &ReflectionConfig::default()).unwrap().value;
        let fine =
            v_packet(n, t, a, a, a, &p, &ReflectionConfig { node_scale: 2.0, ..Default::default() }).unwrap().value;
        assert!(rel(fine, base) <= 1e-3, "N = {n}, T = {bt}");
    }
}

/// Leading-order stationary phase in alpha: at lambda = 100 the neglected
/// terms are several percent; by lambda = 400 the sum is within 5e-2.
#[test]
fn stationary_phase_sum_error_shrinks_with_lambda() {
    let mut gaps = Vec::new();
    for lambda in [100.0, 400.0] {
        let p = params(lambda);
        let a = p.a;
        let t = 2.0 * a.sqrt();
        let sp = green_reflection(t, a, a, a, &p, &ReflectionConfig::default()).unwrap().green;
        let ex = green_reflection(t, a, a, a, &p, &ReflectionConfig { method: PacketMethod::AlphaExact, ..direct() })
            .unwrap()
            .green;
        gaps.push(rel(sp, ex));
    }
    assert!(gaps[1] <= 5e-2 && gaps[1] < gaps[0] / 4.0, "{gaps:?}");
}

#[test]
fn resonant_packet_scales_like_h_to_one_quarter() {
    // K = 1, x = a: |V_N| ~ h^{1/3} (N / lambda^{1/3})^{-1/4} ~ h^{1/4}
    let lambdas = [100.0, 200.0, 400.0];
    for n in [1usize, 2] {
        let mut hs = Vec::new();
        let mut vs = Vec::new();
        for lambda in lambdas {
            let p = params(lambda);
            let t = 2.0 * n as f64 * p.a.sqrt();
            let v = v_packet(n, t, p.a, p.a, p.a, &p, &direct()).unwrap();
            assert!((v.k - 1.0).abs() < 1e-12);
            assert_eq!(v.regime_tag, RegimeTag::Near);
            hs.push(p.h);
            vs.push(v.value.norm());
        }
        let fit = loglog_slope(&hs, &vs);
        assert!((fit.slope - 0.25).abs() <= 0.05, "N = {n}: slope {}", fit.slope);
    }
}

#[test]
fn packets_beyond_the_band_are_flagged_empty() {
    let p = params(100.0);
    let t = 2.0 * p.a.sqrt();
    let v = v_packet(6, t, p.a, p.a, p.a, &p, &ReflectionConfig::default()).unwrap();
    assert!(v.empty);
    assert_eq!(v.value, Complex64::new(0.0, 0.0));
    assert!(!v_packet(1, t, p.a, p.a, p.a, &p, &ReflectionConfig::default()).unwrap().empty);
}

#[test]
fn small_lambda_gamma_is_rejected() {
    let p = params(5.0);
    assert!(matches!(v_packet(1, 0.5, p.a, p.a, p.a, &p, &ReflectionConfig::default()), Err(Error::Parameter(_))));
    assert!(green_reflection(0.5, p.a, p.a, p.a, &p, &direct()).is_err());
}

#[test]
fn short_times_keep_only_the_free_packet() {
    let p = params(100.0);
    let t = 0.3 * p.a.sqrt();
    let r = green_reflection(t, p.a, p.a, p.a, &p, &ReflectionConfig::default()).unwrap();
    assert_eq!(r.packets.len(), 1);
    let v0 = v_packet(0, t, p.a, p.a, p.a, &p, &ReflectionConfig::default()).unwrap();
    assert_eq!(r.green, v0.value / p.h);
}

#[test]
fn reflection_sum_peaks_near_even_times() {
    let p = params(100.0);
    let grid: Vec<f64> = (0..=20).map(|i| 1.2 + 0.1 * i as f64).collect();
    let (best, _) = grid
        .iter()
        .map(|&bt| (bt, green_reflection(bt * p.a.sqrt(), p.a, p.a, p.a, &p, &direct()).unwrap().green.norm()))
        .fold((0.0, 0.0), |acc, (bt, g)| if g > acc.1 { (bt, g) } else { acc });
    assert!((best - 2.0f64).abs() <= 0.2, "peak at T = {best}");
}

#[test]
fn transverse_scale_uses_transverse_bound() {
    // gamma = 4a with gamma <= eps0
    let a = 0.1;
    let gamma: f64 = 0.4;
    let p = PhysParams::new(gamma * gamma.sqrt() / 60.0, a, 0.5, 5.0).unwrap();
    let v = v_packet(1, 2.0 * gamma.sqrt(), a, a, gamma, &p, &ReflectionConfig::default()).unwrap();
    assert_eq!(v.regime_tag, RegimeTag::Transverse);
    assert_eq!(v.bound_theory, transverse_bound(1, gamma, p.h));
}

#[test]
fn direct_packet_matches_exact_alpha_integral() {
    // same packet with the asymptotic phase (4/3)u + pi/2 - B and with the exact L
    let p = params(100.0);
    let t = 2.0 * p.a.sqrt();
    let v = v_packet(1, t, p.a, p.a, p.a, &p, &direct()).unwrap().value;
    let e = v_packet(1, t, p.a, p.a, p.a, &p, &ReflectionConfig { method: PacketMethod::AlphaExact, ..direct() })
        .unwrap()
        .value;
    assert!(rel(v, e) < 1e-4, "{v} vs {e}");
}

#[test]
fn packets_are_dominated_by_their_bounds() {
    let p = params(100.0);
    let a = p.a;
    for n in [1usize, 2, 3] {
        for bt in [1.5, 2.0, 3.0, 4.0, 6.0] {
            for xf in [1.0, 0.5] {
                let v = v_packet(n, bt * a.sqrt(), xf * a, a, a, &p, &direct()).unwrap();
                assert!(v.value.norm() <= v.bound_theory, "N = {n}, T = {bt}, x = {xf}a: {v:?}");
            }
        }
    }
}
