use approx::assert_relative_eq;
use cdgsk_core::profile::{
    asymptotic_profile, continuation, fit_speed_coefficients, newton_solve, residual,
    ProfileError, C2, DEFAULT_N,
};

#[test]
fn newton_speed_matches_leading_order() {
    let sol = newton_solve(0.01, 1.0, DEFAULT_N, 1e-12, None).unwrap();
    assert!(sol.iterations <= 6, "{} iterations", sol.iterations);
    let a = 0.01_f64;
    let rem = sol.profile.c() - 1.0 - C2 * a * a;
    // The a⁴ coefficient is about −6.9e3 at k = 1.
    assert!(rem.abs() <= 1e4 * a.powi(4), "remainder {rem:e}");
    assert_eq!(sol.profile.w().cosine_coeffs()[1], a);
    assert!(sol.profile.tail_ratio() <= 1e-14);
}

#[test]
fn continuation_reaches_larger_amplitudes() {
    let path = continuation(0.05, 2.0, DEFAULT_N, 1e-12).unwrap();
    assert_eq!(path.len(), 5);
    let p = &path[4].profile;
    let a = 0.05_f64;
    let rem = p.c() - 16.0 - C2 * a * a;
    assert!(rem.abs() <= 1e3 * a.powi(4), "remainder {rem:e}");
    assert!(path[4].residual_norm <= 1e-11);
}

#[test]
fn asymptotic_residual_is_fourth_order() {
    // Regression bound frozen from the first run, which measured C ≈ 6.3e2.
    let r = |a: f64| residual(&asymptotic_profile(a, 1.0, 3, DEFAULT_N).unwrap()).sup_norm();
    for a in [1e-3, 5e-4] {
        assert!(r(a) <= 1e3 * a.powi(4), "a = {a}: residual {:e}", r(a));
    }
    let ratio = r(1e-3) / r(5e-4);
    assert!((ratio - 16.0).abs() <= 1.0, "halving ratio {ratio}");
}

#[test]
fn mean_relation() {
    for k in [1.0, 1.5] {
        let a = 0.004_f64;
        let p = newton_solve(a, k, DEFAULT_N, 1e-13, None).unwrap().profile;
        let want = -15.0 / (2.0 * k * k) * a * a;
        assert!((p.w().mean() - want).abs() <= 1e3 * a.powi(4));
    }
}

#[test]
fn exact_speed_samples_are_interpolated() {
    let k = 1.3_f64;
    let samples: Vec<(f64, f64)> = (1..=6)
        .map(|j| {
            let a = 0.003 * j as f64;
            (a, k.powi(4) + 105.0 * a * a)
        })
        .collect();
    let fit = fit_speed_coefficients(&samples).unwrap();
    assert_relative_eq!(fit.c0, k.powi(4), max_relative = 1e-12);
    assert_relative_eq!(fit.c2, 105.0, max_relative = 1e-9);
    assert!(fit.c4.abs() < 1e-4);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert_eq!(
        newton_solve(0.2, 1.0, DEFAULT_N, 1e-12, None).unwrap_err(),
        ProfileError::Amplitude { a: 0.2, max: 0.1 }
    );
    assert_eq!(
        newton_solve(0.01, 1.0, 8, 1e-12, None).unwrap_err(),
        ProfileError::Truncation { got: 8, min: 16 }
    );
    assert_eq!(
        fit_speed_coefficients(&[(0.01, 1.0), (0.01, 1.0), (0.02, 1.0)]).unwrap_err(),
        ProfileError::TooFewSamples(2)
    );
    assert_eq!(
        fit_speed_coefficients(&[(0.03, 1.0)]).unwrap_err(),
        ProfileError::FitAmplitude(0.03)
    );
}

#[test]
fn zero_amplitude_is_trivial() {
    let sol = newton_solve(0.0, 2.0, DEFAULT_N, 1e-12, None).unwrap();
    assert_eq!(sol.profile.c(), 16.0);
    assert_eq!(sol.profile.w().abs_sum(), 0.0);
}
