//! Periodic traveling-wave profiles.
//!
//! A profile is an even 2π-periodic `w` and a speed `c` solving
//!
//! ```text
//! k⁴ w'''' − c w + 15 k² w w'' + 15 w³ = 0
//! ```
//!
//! normalized so that the `cos z` coefficient of `w` is exactly the amplitude `a`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::fourier::FourierSeries;
use crate::linalg;

/// Speed correction coefficient: `c = k⁴ + C2·a² + O(a⁴)`.
pub const C2: f64 = 105.0;

pub const DEFAULT_N: usize = 32;
pub const MAX_NEWTON_ITERATIONS: usize = 25;
pub const CONTINUATION_STEP: f64 = 0.01;
/// Largest amplitude accepted by the Newton solver.
pub const MAX_AMPLITUDE: f64 = 0.1;
/// Largest amplitude accepted by the speed fit.
pub const MAX_FIT_AMPLITUDE: f64 = 0.02;
/// Jacobians with reciprocal condition number below this are rank-deficient.
const SINGULAR_RCOND: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("wavenumber must be positive, got {0}")]
    Wavenumber(f64),
    #[error("amplitude {a} outside the admissible range |a| <= {max}")]
    Amplitude { a: f64, max: f64 },
    #[error("expansion order must be 1, 2 or 3, got {0}")]
    Order(u32),
    #[error("truncation N = {got} is below the minimum {min}")]
    Truncation { got: usize, min: usize },
    #[error("guess has truncation {got}, expected {expected}")]
    GuessTruncation { got: usize, expected: usize },
    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("Newton Jacobian is numerically singular (rcond {rcond:e})")]
    SingularJacobian { rcond: f64 },
    #[error("speed fit needs at least 4 distinct amplitudes, got {0}")]
    TooFewSamples(usize),
    #[error("speed fit sample amplitude {0} exceeds 0.02")]
    FitAmplitude(f64),
}

/// `w` (even, real), its amplitude `a`, wavenumber `k` and speed `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    w: FourierSeries,
    a: f64,
    k: f64,
    c: f64,
}

impl WaveProfile {
    /// Checks that `w` is even with `cos z` coefficient `a`.
    pub fn new(w: FourierSeries, k: f64, c: f64) -> Result<Self, ProfileError> {
        if !(k > 0.0) {
            return Err(ProfileError::Wavenumber(k));
        }
        let w = w.even_part();
        let a = w.cosine_coeffs().get(1).copied().unwrap_or(0.0);
        Ok(Self { w, a, k, c })
    }

    /// The zero solution `w ≡ 0`, `c = k⁴`.
    pub fn trivial(k: f64, n_max: usize) -> Result<Self, ProfileError> {
        check_k(k)?;
        Ok(Self {
            w: FourierSeries::zeros(n_max),
            a: 0.0,
            k,
            c: k.powi(4),
        })
    }

    pub fn w(&self) -> &FourierSeries {
        &self.w
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n_max(&self) -> usize {
        self.w.n_max()
    }

    /// Same profile at another truncation order.
    pub fn resized(&self, n_max: usize) -> Self {
        Self {
            w: self.w.resized(n_max),
            ..self.clone()
        }
    }

    /// `|A_N| / max |A_n|` over the cosine coefficients.
    pub fn tail_ratio(&self) -> f64 {
        let a = self.w.cosine_coeffs();
        let max = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if max == 0.0 {
            0.0
        } else {
            a[a.len() - 1].abs() / max
        }
    }

    pub fn residual_norm(&self) -> f64 {
        residual(self).sup_norm()
    }
}

fn check_k(k: f64) -> Result<(), ProfileError> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(ProfileError::Wavenumber(k))
    }
}

/// Closed-form small-amplitude profile through `order` in `a`.
///
/// `w = a cos z + a²(−15/(2k²) + cos 2z/(2k²)) + a³ (3/(16k⁴)) cos 3z`,
/// `c = k⁴ + 105 a²` (the `a²` speed term is included from order 2 on).
pub fn asymptotic_profile(
    a: f64,
    k: f64,
    order: u32,
    n_max: usize,
) -> Result<WaveProfile, ProfileError> {
    check_k(k)?;
    if !(a.abs() < 1.0) {
        return Err(ProfileError::Amplitude { a, max: 1.0 });
    }
    if !(1..=3).contains(&order) {
        return Err(ProfileError::Order(order));
    }
    let k2 = k * k;
    let mut cos = vec![0.0; 4];
    cos[1] = a;
    let mut c = k2 * k2;
    if order >= 2 {
        cos[0] = -15.0 * a * a / (2.0 * k2);
        cos[2] = a * a / (2.0 * k2);
        c += C2 * a * a;
    }
    if order >= 3 {
        cos[3] = 3.0 * a * a * a / (16.0 * k2 * k2);
    }
    Ok(WaveProfile {
        w: FourierSeries::from_cosine_coeffs(n_max, &cos),
        a,
        k,
        c,
    })
}

/// `k⁴w'''' − c w + 15k² P_N(w w'') + 15 P_N(w³)` with exact products.
pub fn residual(p: &WaveProfile) -> FourierSeries {
    let n = p.n_max();
    let w = &p.w;
    let k2 = p.k * p.k;
    let wzz = w.differentiate(2);
    let w2 = w.multiply_full(w);
    let nonlinear = w
        .multiply_full(&wzz)
        .scale(15.0 * k2)
        .add(&w2.multiply_full(w).resized(2 * n).scale(15.0))
        .expect("equal orders")
        .resized(n);
    w.differentiate(4)
        .scale(k2 * k2)
        .sub(&w.scale(p.c))
        .and_then(|r| r.add(&nonlinear))
        .expect("equal orders")
}

/// Outcome of a Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub profile: WaveProfile,
    pub iterations: usize,
    pub residual_norm: f64,
}

/// Fourier–Galerkin Newton solve in the cosine subspace.
///
/// Unknowns are `A_0..A_N` and `c`; equations are the cosine coefficients of
/// the residual plus `A_1 = a`. A guess that already meets `tol` is returned
/// after zero iterations.
pub fn newton_solve(
    a: f64,
    k: f64,
    n_max: usize,
    tol: f64,
    guess: Option<&WaveProfile>,
) -> Result<NewtonSolution, ProfileError> {
    check_k(k)?;
    if !(a.abs() <= MAX_AMPLITUDE) {
        return Err(ProfileError::Amplitude {
            a,
            max: MAX_AMPLITUDE,
        });
    }
    if n_max < 16 {
        return Err(ProfileError::Truncation {
            got: n_max,
            min: 16,
        });
    }
    let mut current = match guess {
        Some(g) if g.n_max() != n_max => {
            return Err(ProfileError::GuessTruncation {
                got: g.n_max(),
                expected: n_max,
            })
        }
        Some(g) => {
            let mut cos = g.w.cosine_coeffs();
            cos[1] = a;
            WaveProfile {
                w: FourierSeries::from_cosine_coeffs(n_max, &cos),
                a,
                k,
                c: g.c,
            }
        }
        None => asymptotic_profile(a, k, 3, n_max)?,
    };

    let mut res = residual(&current).sup_norm();
    let mut iterations = 0;
    while res > tol {
        if iterations == MAX_NEWTON_ITERATIONS {
            return Err(ProfileError::NonConvergence {
                iterations,
                residual: res,
            });
        }
        let (jac, rhs) = newton_system(&current);
        let rcond = linalg::inverse_condition(&jac);
        if rcond < SINGULAR_RCOND {
            return Err(ProfileError::SingularJacobian { rcond });
        }
        let delta =
            linalg::solve_real(jac, &rhs).map_err(|_| ProfileError::SingularJacobian { rcond })?;
        let mut cos = current.w.cosine_coeffs();
        for (x, d) in cos.iter_mut().zip(delta.iter()) {
            *x -= d;
        }
        cos[1] = a;
        current = WaveProfile {
            w: FourierSeries::from_cosine_coeffs(n_max, &cos),
            a,
            k,
            c: current.c - delta[n_max + 1],
        };
        iterations += 1;
        res = residual(&current).sup_norm();
    }
    Ok(NewtonSolution {
        profile: current,
        iterations,
        residual_norm: res,
    })
}

/// Jacobian and right-hand side `F` of the bordered Galerkin system at `p`.
fn newton_system(p: &WaveProfile) -> (DMatrix<f64>, DVector<f64>) {
    let n = p.n_max();
    let dim = n + 2;
    let k2 = p.k * p.k;
    let w = &p.w;
    let wzz = w.differentiate(2);
    let w2 = w.multiply_full(w);

    // Linearization k⁴∂⁴ − c + 15k²(w∂² + w'') + 45w², Galerkin-projected.
    let apply = |v: &FourierSeries| -> Vec<f64> {
        let linear = v.differentiate(4).scale(k2 * k2).sub(&v.scale(p.c)).unwrap();
        let vzz = v.differentiate(2);
        let quad = w
            .multiply_full(&vzz)
            .add(&wzz.multiply_full(v))
            .unwrap()
            .scale(15.0 * k2)
            .resized(n);
        let cubic = w2.multiply_full(v).scale(45.0).resized(n);
        linear
            .add(&quad)
            .and_then(|s| s.add(&cubic))
            .unwrap()
            .cosine_coeffs()
    };

    let mut jac = DMatrix::zeros(dim, dim);
    for j in 0..=n {
        let col = apply(&FourierSeries::cosine(n, j, 1.0));
        for (i, v) in col.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    for (i, v) in w.cosine_coeffs().into_iter().enumerate() {
        jac[(i, n + 1)] = -v;
    }
    jac[(n + 1, 1)] = 1.0;

    let mut rhs = DVector::zeros(dim);
    for (i, v) in residual(p).cosine_coeffs().into_iter().enumerate() {
        rhs[i] = v;
    }
    rhs[n + 1] = w.cosine_coeffs()[1] - p.a;
    (jac, rhs)
}

/// Tangents of the solution family `k⁴w'''' − cw + 15k²ww'' + 15w³ = b`
/// parameterized by `(a, c)`: returns `(∂_c w, ∂_a w)`.
///
/// Under the linearization `T = −∂_z L'` these satisfy `T ∂_a w = 0` and
/// `T ∂_c w = −w_z`.
pub fn family_tangents(p: &WaveProfile) -> Result<(FourierSeries, FourierSeries), ProfileError> {
    let n = p.n_max();
    let (mut jac, _) = newton_system(p);
    // Replace the speed column by the integration-constant column.
    for i in 0..n + 2 {
        jac[(i, n + 1)] = 0.0;
    }
    jac[(0, n + 1)] = -1.0;
    let rcond = linalg::inverse_condition(&jac);
    if rcond < SINGULAR_RCOND {
        return Err(ProfileError::SingularJacobian { rcond });
    }
    let lu = jac.lu();
    let solve = |rhs: DVector<f64>| -> Result<FourierSeries, ProfileError> {
        let x = lu
            .solve(&rhs)
            .ok_or(ProfileError::SingularJacobian { rcond })?;
        Ok(FourierSeries::from_cosine_coeffs(n, &x.as_slice()[..=n]))
    };
    let mut rhs_c = DVector::zeros(n + 2);
    for (i, v) in p.w.cosine_coeffs().into_iter().enumerate() {
        rhs_c[i] = v;
    }
    let mut rhs_a = DVector::zeros(n + 2);
    rhs_a[n + 1] = 1.0;
    Ok((solve(rhs_c)?, solve(rhs_a)?))
}

/// Solves at `a` by continuation from zero amplitude in steps of
/// [`CONTINUATION_STEP`], each solve seeded with the previous solution.
///
/// Returns the solutions at every continuation point, ending at `a`.
pub fn continuation(
    a: f64,
    k: f64,
    n_max: usize,
    tol: f64,
) -> Result<Vec<NewtonSolution>, ProfileError> {
    let steps = (a.abs() / CONTINUATION_STEP).ceil().max(1.0) as usize;
    let mut path: Vec<NewtonSolution> = Vec::with_capacity(steps);
    for j in 1..=steps {
        let aj = if j == steps {
            a
        } else {
            a.signum() * CONTINUATION_STEP * j as f64
        };
        let guess = path.last().map(|s| &s.profile);
        path.push(newton_solve(aj, k, n_max, tol, guess)?);
    }
    Ok(path)
}

/// Coefficients of `c(a) ≈ c0 + c2 a² + c4 a⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedFit {
    pub c0: f64,
    pub c2: f64,
    pub c4: f64,
}

/// Least-squares fit of even-power speed coefficients to `(a, c)` samples.
pub fn fit_speed_coefficients(samples: &[(f64, f64)]) -> Result<SpeedFit, ProfileError> {
    if let Some(&(a, _)) = samples
        .iter()
        .find(|(a, _)| !(a.abs() <= MAX_FIT_AMPLITUDE))
    {
        return Err(ProfileError::FitAmplitude(a));
    }
    let mut amps: Vec<f64> = samples.iter().map(|(a, _)| a.abs()).collect();
    amps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    amps.dedup();
    if amps.len() < 4 {
        return Err(ProfileError::TooFewSamples(amps.len()));
    }
    // Columns scaled to unit size so the normal equations stay well conditioned.
    let s = amps[amps.len() - 1];
    let design = DMatrix::from_fn(samples.len(), 3, |i, j| {
        (samples[i].0 / s).powi(2 * j as i32)
    });
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|(_, c)| *c));
    let sol = design
        .svd(true, true)
        .solve(&rhs, f64::EPSILON)
        .expect("both factors requested");
    Ok(SpeedFit {
        c0: sol[0],
        c2: sol[1] / (s * s),
        c4: sol[2] / (s * s * s * s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn zero_amplitude_asymptotics() {
        let p = asymptotic_profile(0.0, 1.0, 3, 8).unwrap();
        assert_eq!(p.w().abs_sum(), 0.0);
        assert_eq!(p.c(), 1.0);
    }

    #[test]
    fn asymptotic_coefficients() {
        let (a, k) = (0.03, 1.7);
        let p = asymptotic_profile(a, k, 3, 8).unwrap();
        let cos = p.w().cosine_coeffs();
        assert_relative_eq!(p.w().mean(), -15.0 / (2.0 * k * k) * a * a, max_relative = 1e-14);
        assert_relative_eq!(cos[3], 3.0 / (16.0 * k.powi(4)) * a.powi(3), max_relative = 1e-14);
        assert_eq!(cos[1], a);
        let p1 = asymptotic_profile(a, k, 1, 8).unwrap();
        assert_eq!(p1.c(), k.powi(4));
        assert_eq!(p1.w().cosine_coeffs()[2], 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            asymptotic_profile(0.1, 0.0, 3, 8),
            Err(ProfileError::Wavenumber(0.0))
        );
        assert!(matches!(
            asymptotic_profile(0.1, 1.0, 4, 8),
            Err(ProfileError::Order(4))
        ));
        assert!(matches!(
            newton_solve(0.2, 1.0, 32, 1e-12, None),
            Err(ProfileError::Amplitude { .. })
        ));
        assert!(matches!(
            newton_solve(0.01, 1.0, 8, 1e-12, None),
            Err(ProfileError::Truncation { .. })
        ));
    }

    #[test]
    fn linear_part_annihilates_cos() {
        let p = WaveProfile::new(FourierSeries::cosine(8, 1, 1.0), 1.3, 1.3f64.powi(4)).unwrap();
        let w = p.w();
        let lin = w
            .differentiate(4)
            .scale(p.k().powi(4))
            .sub(&w.scale(p.c()))
            .unwrap();
        assert_abs_diff_eq!(lin.abs_sum(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn trivial_residual_vanishes() {
        let p = WaveProfile::trivial(1.0, 16).unwrap();
        assert_eq!(residual(&p).abs_sum(), 0.0);
    }

    #[test]
    fn zero_amplitude_newton_is_immediate() {
        let sol = newton_solve(0.0, 1.0, 32, 1e-12, None).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.profile.c(), 1.0);
        assert_eq!(sol.profile.w().abs_sum(), 0.0);
    }

    #[test]
    fn newton_converges_quickly() {
        let sol = newton_solve(0.01, 1.0, 32, 1e-12, None).unwrap();
        assert!(sol.iterations <= 6, "{} iterations", sol.iterations);
        assert!(sol.residual_norm <= 1e-12);
        assert_eq!(sol.profile.w().cosine_coeffs()[1], 0.01);
        assert!(sol.profile.tail_ratio() <= 1e-14);
        let dc = sol.profile.c() - 1.0 - C2 * 1e-4;
        assert!(dc.abs() < 1e4 * 1e-8, "c deviation {dc:e}");
    }

    #[test]
    fn continuation_reaches_target() {
        let path = continuation(0.05, 2.0, 32, 1e-12).unwrap();
        assert_eq!(path.len(), 5);
        let p = &path[4].profile;
        assert_eq!(p.a(), 0.05);
        let dc = p.c() - 16.0 - C2 * 0.05 * 0.05;
        assert!(dc.abs() < 1e3 * 0.05f64.powi(4), "c deviation {dc:e}");
    }

    #[test]
    fn speed_is_even_in_amplitude() {
        let p = newton_solve(0.03, 1.0, 32, 1e-12, None).unwrap().profile;
        let m = newton_solve(-0.03, 1.0, 32, 1e-12, None).unwrap().profile;
        assert_relative_eq!(p.c(), m.c(), max_relative = 1e-13);
        // The −a profile is the half-period translate of the +a profile.
        let shifted = p.w().translated(core::f64::consts::PI);
        assert_abs_diff_eq!(
            shifted.sub(m.w()).unwrap().abs_sum(),
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn exact_speed_samples_fit_exactly() {
        let samples: Vec<(f64, f64)> = [0.001, 0.005, 0.01, 0.015, 0.02]
            .iter()
            .map(|&a| (a, 16.0 + 105.0 * a * a))
            .collect();
        let fit = fit_speed_coefficients(&samples).unwrap();
        assert_relative_eq!(fit.c0, 16.0, max_relative = 1e-14);
        assert_relative_eq!(fit.c2, 105.0, max_relative = 1e-9);
        assert_abs_diff_eq!(fit.c4, 0.0, epsilon = 1e-3);
    }

    #[test]
    fn fit_rejects_bad_samples() {
        let few = [(0.01, 1.0), (0.01, 1.0), (0.02, 1.0), (-0.02, 1.0)];
        assert_eq!(
            fit_speed_coefficients(&few),
            Err(ProfileError::TooFewSamples(2))
        );
        assert_eq!(
            fit_speed_coefficients(&[(0.05, 1.0)]),
            Err(ProfileError::FitAmplitude(0.05))
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn newton_preserves_evenness_and_amplitude(a in -0.05f64..0.05, k in 0.7f64..2.0) {
            let p = newton_solve(a, k, 24, 1e-11, None).unwrap().profile;
            prop_assert!(p.w().is_even());
            prop_assert_eq!(p.w().cosine_coeffs()[1], a);
            prop_assert!(p.w().sine_coeffs().iter().all(|&s| s == 0.0));
        }
    }
}
