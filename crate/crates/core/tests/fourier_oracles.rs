use approx::assert_abs_diff_eq;
use cdgsk_core::fourier::{FourierError, PaddedGrid};
use cdgsk_core::{Complex64, FourierSeries, Parity, ProductMode};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn cosine_squared_is_half_plus_half_cos_two() {
    let f = FourierSeries::cosine(4, 1, 1.0);
    for mode in [ProductMode::Truncate, ProductMode::Dealias] {
        let g = f.multiply(&f, mode).unwrap();
        let cos = g.cosine_coeffs();
        assert_abs_diff_eq!(cos[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(cos[2], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(cos[1], 0.0, epsilon = 1e-15);
        assert!(g.is_even());
    }
}

#[test]
fn truncation_drops_modes_beyond_n() {
    // cos² 2z = 1/2 + cos 4z / 2; on N = 3 only the mean survives.
    let f = FourierSeries::cosine(3, 2, 1.0);
    let g = f.multiply(&f, ProductMode::Truncate).unwrap();
    assert_abs_diff_eq!(g.mean(), 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(g.abs_sum(), 0.5, epsilon = 1e-15);
    let full = f.multiply_full(&f);
    assert_eq!(full.n_max(), 6);
    assert_abs_diff_eq!(full.cosine_coeffs()[4], 0.5, epsilon = 1e-15);
}

#[test]
fn derivative_of_sine_is_cosine() {
    let s = FourierSeries::sine(5, 3, 2.0);
    let d = s.differentiate(1);
    assert_abs_diff_eq!(d.cosine_coeffs()[3], 6.0, epsilon = 1e-14);
    assert_eq!(d.parity(), Parity::Even);
    // Fourth derivative multiplies by n⁴.
    let d4 = FourierSeries::cosine(5, 2, 1.0).differentiate(4);
    assert_abs_diff_eq!(d4.cosine_coeffs()[2], 16.0, epsilon = 1e-13);
}

#[test]
fn inner_product_normalization() {
    let cz = FourierSeries::cosine(3, 1, 1.0);
    let sz = FourierSeries::sine(3, 1, 1.0);
    assert_abs_diff_eq!(cz.inner_product(&cz).unwrap().re, 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(cz.inner_product(&sz).unwrap().norm(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(FourierSeries::constant(3, 1.0).norm(), 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn translation_shifts_the_argument() {
    let f = FourierSeries::cosine(4, 1, 1.0).add(&FourierSeries::sine(4, 3, 0.25)).unwrap();
    let s = 0.7;
    let g = f.translated(s);
    for z in [0.0, 1.0, 2.5] {
        assert_abs_diff_eq!(g.evaluate(z).re, f.evaluate(z + s).re, epsilon = 1e-14);
    }
}

#[test]
fn symmetry_flags_are_enforced() {
    let odd_coeffs = vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, -1.0)];
    assert_eq!(
        FourierSeries::new(1, odd_coeffs.clone(), true, Parity::Even),
        Err(FourierError::Symmetry("even"))
    );
    assert!(FourierSeries::new(1, odd_coeffs, true, Parity::Odd).is_ok());
    assert!(matches!(
        FourierSeries::complex(2, vec![c(0.0, 0.0); 4]),
        Err(FourierError::Length { expected: 5, .. })
    ));
    let a = FourierSeries::zeros(2);
    assert_eq!(a.add(&FourierSeries::zeros(3)), Err(FourierError::OrderMismatch(2, 3)));
}

#[test]
fn padded_grid_round_trip() {
    let grid = PaddedGrid::new(6);
    let coeffs: Vec<Complex64> = (0..13).map(|j| c(j as f64 * 0.1, -(j as f64) * 0.05)).collect();
    let back = grid.analyze(&grid.synthesize(&coeffs));
    for (x, y) in coeffs.iter().zip(&back) {
        assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
    }
}

fn real_series(n: usize) -> impl Strategy<Value = FourierSeries> {
    proptest::collection::vec(-1.0..1.0f64, 2 * n + 1).prop_map(move |v| {
        let mut coeffs = vec![c(0.0, 0.0); 2 * n + 1];
        coeffs[n] = c(v[0], 0.0);
        for m in 1..=n {
            let z = c(v[2 * m - 1], v[2 * m]);
            coeffs[n + m] = z;
            coeffs[n - m] = z.conj();
        }
        FourierSeries::new(n, coeffs, true, Parity::None).unwrap()
    })
}

proptest! {
    #[test]
    fn products_commute(f in real_series(4), g in real_series(4)) {
        let fg = f.multiply(&g, ProductMode::Truncate).unwrap();
        let gf = g.multiply(&f, ProductMode::Truncate).unwrap();
        prop_assert!(fg.sub(&gf).unwrap().abs_sum() < 1e-13);
    }

    #[test]
    fn full_product_matches_pointwise(f in real_series(3), g in real_series(3), z in 0.0..2.0 * PI) {
        let h = f.multiply_full(&g);
        let want = f.evaluate(z) * g.evaluate(z);
        prop_assert!((h.evaluate(z) - want).norm() < 1e-12);
    }

    #[test]
    fn norm_is_parseval(f in real_series(5)) {
        // ⟨f, f⟩ = (1/π) ∫ |f|², sampled exactly by the trapezoid rule on 64 points.
        let m = 64;
        let integral: f64 = (0..m)
            .map(|j| f.evaluate(2.0 * PI * j as f64 / m as f64).norm_sqr())
            .sum::<f64>() * 2.0 * PI / m as f64 / PI;
        prop_assert!((f.norm().powi(2) - integral).abs() < 1e-12 * integral.max(1.0));
    }
}
