//! Structural properties of the kernels, the Kac-Rice reduction, the radial
//! densities and the sampler.

use std::f64::consts::PI;

use holocond::conditioning::{conditional_jet_zero, critical_conditional_value};
use holocond::kacrice::{blocks, lambda_pair, rescaled_kn, rescaled_kn_normal_frame, schur_lambda};
use holocond::kernel::KernelModel;
use holocond::lelong::{d_infinity, rescaled_dn};
use holocond::montecarlo::{
    count_zeros_inside, find_critical_points, find_zeros, sample, Conditioning, RingGrid, RngSpec,
};
use holocond::Complex64;
use proptest::prelude::*;

fn point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn model() -> impl Strategy<Value = KernelModel> {
    prop_oneof![(2u32..60).prop_map(|n| KernelModel::su2(n).unwrap()), Just(KernelModel::BargmannFock),]
}

fn weight(model: KernelModel) -> f64 {
    model.connection_weight()
}

proptest! {
    #[test]
    fn kernel_jets_are_hermitian(model in model(), z in point(2.0), w in point(2.0)) {
        let a = model.jet(z, w).unwrap();
        let b = model.jet(w, z).unwrap().hermitian_transpose();
        for (i, j) in holocond::kernel::JET_INDICES {
            let (x, y) = (a.entry(i, j), b.entry(i, j));
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()), "entry ({i},{j}): {x} vs {y}");
        }
    }

    #[test]
    fn conditional_kernels_are_nonnegative(model in model(), p in point(1.5), z in point(3.0)) {
        let k = conditional_jet_zero(model, p, z).unwrap().unscaled();
        let scale = model.jet(z, z).unwrap().unscaled().value.re;
        prop_assert!(k.value.re >= -1e-10 * scale);
        prop_assert!(k.value.im.abs() <= 1e-10 * scale);
        let c = critical_conditional_value(model, Complex64::new(0.0, 0.0), z).unwrap();
        prop_assert!(c >= 0.0);
    }

    #[test]
    fn schur_complement_is_psd_with_sign_pattern(model in model(), z in point(2.5)) {
        let b = blocks(model, Complex64::new(0.0, 0.0), z).unwrap();
        let lambda = schur_lambda(&b).unwrap();
        let e = lambda.eigh();
        prop_assert!(e.values[1] >= -1e-8 * lambda.trace().abs(), "eigenvalues {:?}", e.values);
        // at n = 2 the conditioned space is too small for Lambda to have
        // full rank, and lambda1 is exactly zero
        let pair = lambda_pair(&lambda, weight(model));
        let size = pair.lambda1.abs() + pair.lambda2.abs();
        prop_assert!(pair.lambda1 >= -1e-12 * size);
        prop_assert!(pair.lambda1 >= pair.lambda2);
    }

    #[test]
    fn lambda_signs_at_the_local_scale(n in prop_oneof![Just(10u32), Just(100), Just(1000)], u in point(4.0)) {
        let z = u / (n as f64).sqrt();
        let b = blocks(KernelModel::su2(n).unwrap(), Complex64::new(0.0, 0.0), z).unwrap();
        let pair = lambda_pair(&schur_lambda(&b).unwrap(), n as f64);
        prop_assert!(pair.lambda1 > 0.0);
        prop_assert!(pair.lambda2 <= 1e-9 * pair.lambda1, "{pair:?}");
    }

    #[test]
    fn rescaled_densities_are_radial(n in 4u32..400, r in 0.0f64..3.0, theta in 0.0..2.0 * PI) {
        let u = Complex64::from_polar(r, theta);
        let on_axis = Complex64::new(r, 0.0);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs());
        prop_assert!(close(rescaled_kn(n, u).unwrap(), rescaled_kn(n, on_axis).unwrap()));
        prop_assert!(close(rescaled_kn_normal_frame(n, u).unwrap(), rescaled_kn_normal_frame(n, on_axis).unwrap()));
        prop_assert!(close(rescaled_dn(n, u).unwrap(), rescaled_dn(n, on_axis).unwrap()));
        prop_assert!(close(d_infinity(u), d_infinity(on_axis)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_preserves_root_moduli(stream in 0u64..10_000, theta in 0.0..2.0 * PI) {
        let n = 40;
        let poly = sample(n, RngSpec::new(77, stream), Conditioning::CriticalAtOrigin).unwrap();
        let rotated = poly.rotated(theta);
        let moduli = |p| {
            let mut m: Vec<f64> = find_zeros(p).unwrap().iter().map(|z| z.norm()).collect();
            m.sort_by(|a, b| a.partial_cmp(b).unwrap());
            m
        };
        for (a, b) in moduli(&poly).iter().zip(moduli(&rotated)) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a));
        }
        let grid = RingGrid::new(64);
        let mut scratch = vec![Complex64::new(0.0, 0.0); 64];
        for r in [0.1, 0.2, 0.4] {
            prop_assert_eq!(
                count_zeros_inside(&poly.monomial(), r, &grid, &mut scratch).unwrap(),
                count_zeros_inside(&rotated.monomial(), r, &grid, &mut scratch).unwrap()
            );
        }
    }

    #[test]
    fn rotation_preserves_critical_point_moduli(stream in 0u64..10_000, theta in 0.0..2.0 * PI) {
        let n = 30;
        let radius = 3.0 / (n as f64).sqrt();
        let poly = sample(n, RngSpec::new(78, stream), Conditioning::ZeroAtOrigin).unwrap();
        let moduli = |p| {
            let mut m: Vec<f64> = find_critical_points(p, radius).unwrap().iter().map(|z| z.norm()).collect();
            m.sort_by(|a, b| a.partial_cmp(b).unwrap());
            m
        };
        let (a, b) = (moduli(&poly), moduli(&poly.rotated(theta)));
        // points within rounding of the boundary may drop in or out
        let inner = |m: &[f64]| m.iter().copied().filter(|r| *r < radius * (1.0 - 1e-6)).collect::<Vec<_>>();
        let (a, b) = (inner(&a), inner(&b));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn sampler_moments() {
    let n = 100u32;
    let samples = 100_000u64;
    let mut second = vec![0.0; n as usize + 1];
    let mut mean = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    let mut re_sq = 0.0;
    let mut im_sq = 0.0;
    for t in 0..samples {
        let poly = sample(n, RngSpec::new(2024, t), Conditioning::None).unwrap();
        for (j, a) in poly.coeffs.iter().enumerate() {
            second[j] += a.norm_sqr();
            mean[j] += a;
        }
        re_sq += poly.coeffs[7].re * poly.coeffs[7].re;
        im_sq += poly.coeffs[7].im * poly.coeffs[7].im;
    }
    let s = samples as f64;
    for j in 0..=n as usize {
        let m2 = second[j] / s;
        assert!((0.99..=1.01).contains(&m2), "E|a_{j}|^2 = {m2}");
        assert!((mean[j] / s).norm() < 0.015, "E a_{j} = {}", mean[j] / s);
    }
    assert!((re_sq / s - 0.5).abs() < 0.01);
    assert!((im_sq / s - 0.5).abs() < 0.01);
}

#[test]
fn every_nondegenerate_sample_has_n_zeros() {
    for n in [2u32, 7, 50, 200] {
        for t in 0..5 {
            let poly = sample(n, RngSpec::new(5, t), Conditioning::None).unwrap();
            assert_eq!(find_zeros(&poly).unwrap().len(), n as usize);
        }
    }
}

#[test]
fn conditioning_is_exact_for_many_samples() {
    for t in 0..200 {
        let p = sample(60, RngSpec::new(8, t), Conditioning::ZeroAtOrigin).unwrap().monomial();
        assert_eq!(p.eval(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        let p = sample(60, RngSpec::new(8, t), Conditioning::CriticalAtOrigin).unwrap().monomial();
        assert_eq!(holocond::montecarlo::chern_gradient(&p, 60, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }
}
