//! Truncated Fourier series on the 2π-torus.
//!
//! A [`FourierSeries`] stores the complex amplitudes `ĉ_n` for `n = -N..=N`
//! densely, with `f(z) = Σ ĉ_n e^{inz}` and `ĉ_n = (1/2π)∫ f(z) e^{-inz} dz`.
//! Real, even (cosine) and odd (sine) series are tracked with explicit flags
//! and their coefficient symmetries are re-imposed after every operation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Relative tolerance used when validating symmetry flags on construction.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FourierError {
    #[error("expected {expected} coefficients for truncation order {n_max}, got {got}")]
    Length {
        n_max: usize,
        expected: usize,
        got: usize,
    },
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("coefficients violate the {0} symmetry")]
    Symmetry(&'static str),
}

/// Parity of a real series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Cosine series: `ĉ_n = ĉ_{-n}`, all coefficients real.
    Even,
    /// Sine series: `ĉ_n = -ĉ_{-n}`, all coefficients imaginary.
    Odd,
    None,
}

/// How a product of two series is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductMode {
    /// Exact convolution projected back onto `|n| <= N` (Galerkin product).
    #[default]
    Truncate,
    /// Pointwise product on a grid padded to `⌈3N/2⌉` modes, then projected
    /// onto `|n| <= N` (the 3/2 rule of pseudospectral codes).
    Dealias,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    n_max: usize,
    coeffs: Vec<Complex64>,
    real: bool,
    parity: Parity,
}

impl FourierSeries {
    /// Builds a series from coefficients ordered `n = -N..=N`.
    ///
    /// `real` requests conjugate symmetry and `parity` an even or odd real
    /// series (which implies `real`). Violations beyond roundoff are rejected;
    /// roundoff-level asymmetry is removed.
    pub fn new(
        n_max: usize,
        coeffs: Vec<Complex64>,
        real: bool,
        parity: Parity,
    ) -> Result<Self, FourierError> {
        let expected = 2 * n_max + 1;
        if coeffs.len() != expected {
            return Err(FourierError::Length {
                n_max,
                expected,
                got: coeffs.len(),
            });
        }
        let real = real || parity != Parity::None;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE);
        for n in 0..=n_max {
            let p = coeffs[n_max + n];
            let m = coeffs[n_max - n];
            if real && (p - m.conj()).norm() > tol {
                return Err(FourierError::Symmetry("real"));
            }
            match parity {
                Parity::Even if (p - m).norm() > tol || p.im.abs() > tol => {
                    return Err(FourierError::Symmetry("even"));
                }
                Parity::Odd if (p + m).norm() > tol || p.re.abs() > tol => {
                    return Err(FourierError::Symmetry("odd"));
                }
                _ => {}
            }
        }
        let mut s = Self {
            n_max,
            coeffs,
            real,
            parity,
        };
        s.enforce();
        Ok(s)
    }

    /// Complex series without symmetry constraints.
    pub fn complex(n_max: usize, coeffs: Vec<Complex64>) -> Result<Self, FourierError> {
        Self::new(n_max, coeffs, false, Parity::None)
    }

    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * n_max + 1],
            real: true,
            parity: Parity::Even,
        }
    }

    pub fn constant(n_max: usize, value: f64) -> Self {
        let mut s = Self::zeros(n_max);
        s.coeffs[n_max] = Complex64::new(value, 0.0);
        s
    }

    /// `amp · cos(m z)`; modes above `n_max` are dropped.
    pub fn cosine(n_max: usize, m: usize, amp: f64) -> Self {
        let mut s = Self::zeros(n_max);
        if m == 0 {
            s.coeffs[n_max] = Complex64::new(amp, 0.0);
        } else if m <= n_max {
            s.coeffs[n_max + m] = Complex64::new(amp / 2.0, 0.0);
            s.coeffs[n_max - m] = Complex64::new(amp / 2.0, 0.0);
        }
        s
    }

    /// `amp · sin(m z)`.
    pub fn sine(n_max: usize, m: usize, amp: f64) -> Self {
        let mut s = Self::zeros(n_max);
        s.parity = Parity::Odd;
        if m >= 1 && m <= n_max {
            s.coeffs[n_max + m] = Complex64::new(0.0, -amp / 2.0);
            s.coeffs[n_max - m] = Complex64::new(0.0, amp / 2.0);
        }
        s
    }

    /// Even series `A_0 + Σ_{n≥1} A_n cos(nz)` from its cosine coefficients.
    pub fn from_cosine_coeffs(n_max: usize, a: &[f64]) -> Self {
        let mut s = Self::zeros(n_max);
        for (n, &an) in a.iter().enumerate().take(n_max + 1) {
            if n == 0 {
                s.coeffs[n_max] = Complex64::new(an, 0.0);
            } else {
                s.coeffs[n_max + n] = Complex64::new(an / 2.0, 0.0);
                s.coeffs[n_max - n] = Complex64::new(an / 2.0, 0.0);
            }
        }
        s
    }

    /// Cosine coefficients `A_0..A_N` of the even part.
    pub fn cosine_coeffs(&self) -> Vec<f64> {
        (0..=self.n_max)
            .map(|n| {
                if n == 0 {
                    self.coeffs[self.n_max].re
                } else {
                    (self.coeffs[self.n_max + n] + self.coeffs[self.n_max - n]).re
                }
            })
            .collect()
    }

    /// Sine coefficients `B_1..B_N` (index 0 is always zero).
    pub fn sine_coeffs(&self) -> Vec<f64> {
        (0..=self.n_max)
            .map(|n| {
                if n == 0 {
                    0.0
                } else {
                    let d = self.coeffs[self.n_max + n] - self.coeffs[self.n_max - n];
                    (Complex64::i() * d).re
                }
            })
            .collect()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_even(&self) -> bool {
        self.parity == Parity::Even
    }

    /// Coefficient of `e^{inz}`, zero outside the stored band.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.n_max as i64) as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[self.n_max].re
    }

    /// Re-imposes the symmetries implied by the flags.
    fn enforce(&mut self) {
        let n_max = self.n_max;
        if !self.real {
            return;
        }
        for n in 0..=n_max {
            let p = self.coeffs[n_max + n];
            let m = self.coeffs[n_max - n];
            let mut c = (p + m.conj()) * 0.5;
            match self.parity {
                Parity::Even => c.im = 0.0,
                Parity::Odd => c.re = 0.0,
                Parity::None => {}
            }
            if n == 0 {
                c.im = 0.0;
                if self.parity == Parity::Odd {
                    c.re = 0.0;
                }
            }
            self.coeffs[n_max + n] = c;
            self.coeffs[n_max - n] = c.conj();
        }
    }

    fn with_flags_of(mut self, real: bool, parity: Parity) -> Self {
        self.real = real;
        self.parity = if real { parity } else { Parity::None };
        self.enforce();
        self
    }

    /// Copy with truncation order `n_max`, zero-padding or dropping modes.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        let keep = n_max.min(self.n_max) as i64;
        for n in -keep..=keep {
            coeffs[(n + n_max as i64) as usize] = self.coeff(n);
        }
        Self {
            n_max,
            coeffs,
            real: self.real,
            parity: self.parity,
        }
    }

    /// `∂_z^order f`: multiplies `ĉ_n` by `(in)^order`.
    pub fn differentiate(&self, order: u32) -> Self {
        let factor = |n: i64| -> Complex64 { Complex64::new(0.0, n as f64).powu(order) };
        let coeffs = (0..self.coeffs.len())
            .map(|j| self.coeffs[j] * factor(j as i64 - self.n_max as i64))
            .collect();
        let parity = match (self.parity, order % 2) {
            (p, 0) => p,
            (Parity::Even, _) => Parity::Odd,
            (Parity::Odd, _) => Parity::Even,
            (Parity::None, _) => Parity::None,
        };
        Self {
            n_max: self.n_max,
            coeffs,
            real: self.real,
            parity,
        }
        .with_flags_of(self.real, parity)
    }

    fn check_order(&self, other: &Self) -> Result<(), FourierError> {
        if self.n_max != other.n_max {
            Err(FourierError::OrderMismatch(self.n_max, other.n_max))
        } else {
            Ok(())
        }
    }

    fn product_flags(&self, other: &Self) -> (bool, Parity) {
        let real = self.real && other.real;
        let parity = match (self.parity, other.parity) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        };
        (real, parity)
    }

    /// Product of two series with the same truncation order.
    pub fn multiply(&self, other: &Self, mode: ProductMode) -> Result<Self, FourierError> {
        self.check_order(other)?;
        let (real, parity) = self.product_flags(other);
        let n_max = self.n_max;
        let coeffs = match mode {
            ProductMode::Truncate => convolve(&self.coeffs, &other.coeffs, n_max, n_max),
            ProductMode::Dealias => {
                let grid = PaddedGrid::new(n_max);
                let f = grid.synthesize(&self.coeffs);
                let g = grid.synthesize(&other.coeffs);
                let prod: Vec<Complex64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
                grid.analyze(&prod)
            }
        };
        Ok(Self {
            n_max,
            coeffs,
            real,
            parity,
        }
        .with_flags_of(real, parity))
    }

    /// Exact product, returned at order `n_a + n_b` with nothing discarded.
    pub fn multiply_full(&self, other: &Self) -> Self {
        let (real, parity) = self.product_flags(other);
        let n_max = self.n_max + other.n_max;
        let a = self.resized(n_max);
        let b = other.resized(n_max);
        let coeffs = convolve(&a.coeffs, &b.coeffs, n_max, n_max);
        Self {
            n_max,
            coeffs,
            real,
            parity,
        }
        .with_flags_of(real, parity)
    }

    /// `⟨f, g⟩ = (1/π)∫₀^{2π} f ḡ dz = 2 Σ f̂_n conj(ĝ_n)`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64, FourierError> {
        self.check_order(other)?;
        Ok(inner_product(&self.coeffs, &other.coeffs))
    }

    /// Norm induced by [`inner_product`](Self::inner_product).
    pub fn norm(&self) -> f64 {
        inner_product(&self.coeffs, &self.coeffs).re.sqrt()
    }

    pub fn evaluate(&self, z: f64) -> Complex64 {
        let n_max = self.n_max as i64;
        (-n_max..=n_max)
            .map(|n| self.coeff(n) * Complex64::from_polar(1.0, n as f64 * z))
            .sum()
    }

    /// Sampled supremum norm on `samples` equispaced points.
    pub fn sup_norm_sampled(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|j| self.evaluate(2.0 * PI * j as f64 / samples as f64).norm())
            .fold(0.0, f64::max)
    }

    /// Sampled supremum norm with 8× oversampling of the highest mode.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm_sampled(8 * (self.n_max + 1))
    }

    /// `Σ |ĉ_n|`, an upper bound for the supremum norm.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// `f(z + shift)`.
    pub fn translated(&self, shift: f64) -> Self {
        let n_max = self.n_max as i64;
        let coeffs = (-n_max..=n_max)
            .map(|n| self.coeff(n) * Complex64::from_polar(1.0, n as f64 * shift))
            .collect();
        let parity = if shift == 0.0 {
            self.parity
        } else {
            Parity::None
        };
        Self {
            n_max: self.n_max,
            coeffs,
            real: self.real,
            parity,
        }
        .with_flags_of(self.real, parity)
    }

    /// Even part `(f(z) + f(-z))/2`.
    pub fn even_part(&self) -> Self {
        let n_max = self.n_max;
        let coeffs = (0..2 * n_max + 1)
            .map(|j| (self.coeffs[j] + self.coeffs[2 * n_max - j]) * 0.5)
            .collect();
        let parity = if self.real { Parity::Even } else { Parity::None };
        Self {
            n_max,
            coeffs,
            real: self.real,
            parity,
        }
        .with_flags_of(self.real, parity)
    }

    /// Odd part `(f(z) - f(-z))/2`.
    pub fn odd_part(&self) -> Self {
        let n_max = self.n_max;
        let coeffs = (0..2 * n_max + 1)
            .map(|j| (self.coeffs[j] - self.coeffs[2 * n_max - j]) * 0.5)
            .collect();
        let parity = if self.real { Parity::Odd } else { Parity::None };
        Self {
            n_max,
            coeffs,
            real: self.real,
            parity,
        }
        .with_flags_of(self.real, parity)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n_max: self.n_max,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            real: self.real,
            parity: self.parity,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FourierError> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FourierError> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self, FourierError> {
        self.check_order(other)?;
        let real = self.real && other.real;
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::None
        };
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b * sign)
            .collect();
        Ok(Self {
            n_max: self.n_max,
            coeffs,
            real,
            parity,
        }
        .with_flags_of(real, parity))
    }
}

/// `2 Σ a_n conj(b_n)`.
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * 2.0
}

/// Convolution of two coefficient vectors of orders `n_in`, keeping `|n| <= n_out`.
fn convolve(a: &[Complex64], b: &[Complex64], n_in: usize, n_out: usize) -> Vec<Complex64> {
    let n_in = n_in as i64;
    let n_out_i = n_out as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_out + 1];
    for (slot, n) in out.iter_mut().zip(-n_out_i..=n_out_i) {
        let lo = (n - n_in).max(-n_in);
        let hi = (n + n_in).min(n_in);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in lo..=hi {
            acc += a[(m + n_in) as usize] * b[(n - m + n_in) as usize];
        }
        *slot = acc;
    }
    out
}

/// Physical grid of `2⌈3N/2⌉ + 1` points for dealiased products of series
/// with modes `|n| <= N`.
#[derive(Debug, Clone)]
pub struct PaddedGrid {
    n_max: usize,
    points: usize,
    // twiddle[j * (n_max + 1) + n] = e^{i n z_j}
    twiddle: Vec<Complex64>,
}

impl PaddedGrid {
    pub fn new(n_max: usize) -> Self {
        let padded = (3 * n_max).div_ceil(2);
        let points = 2 * padded + 1;
        let mut twiddle = Vec::with_capacity(points * (n_max + 1));
        for j in 0..points {
            let z = 2.0 * PI * j as f64 / points as f64;
            for n in 0..=n_max {
                twiddle.push(Complex64::from_polar(1.0, n as f64 * z));
            }
        }
        Self {
            n_max,
            points,
            twiddle,
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Grid values of the series with coefficients `c` (order `n_max`).
    pub fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n_max = self.n_max;
        let w = n_max + 1;
        (0..self.points)
            .map(|j| {
                let row = &self.twiddle[j * w..(j + 1) * w];
                let mut acc = c[n_max];
                for n in 1..=n_max {
                    acc += c[n_max + n] * row[n] + c[n_max - n] * row[n].conj();
                }
                acc
            })
            .collect()
    }

    /// Real grid values of a conjugate-symmetric coefficient vector.
    pub fn synthesize_real(&self, c: &[Complex64]) -> Vec<f64> {
        let n_max = self.n_max;
        let w = n_max + 1;
        (0..self.points)
            .map(|j| {
                let row = &self.twiddle[j * w..(j + 1) * w];
                let mut acc = c[n_max].re;
                for n in 1..=n_max {
                    let t = c[n_max + n] * row[n];
                    acc += 2.0 * t.re;
                }
                acc
            })
            .collect()
    }

    /// Coefficients `|n| <= n_max` of grid values (discrete Fourier analysis).
    pub fn analyze(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n_max = self.n_max;
        let w = n_max + 1;
        let inv = 1.0 / self.points as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        for (j, v) in values.iter().enumerate() {
            let row = &self.twiddle[j * w..(j + 1) * w];
            out[n_max] += v;
            for n in 1..=n_max {
                out[n_max + n] += v * row[n].conj();
                out[n_max - n] += v * row[n];
            }
        }
        for c in &mut out {
            *c *= inv;
        }
        out
    }

    /// Analysis of real grid values; returns a conjugate-symmetric vector.
    pub fn analyze_real(&self, values: &[f64]) -> Vec<Complex64> {
        let n_max = self.n_max;
        let w = n_max + 1;
        let inv = 1.0 / self.points as f64;
        let mut half = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for (j, &v) in values.iter().enumerate() {
            let row = &self.twiddle[j * w..(j + 1) * w];
            for (h, t) in half.iter_mut().zip(row) {
                *h += t.conj() * v;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        for n in 0..=n_max {
            let c = half[n] * inv;
            out[n_max + n] = c;
            out[n_max - n] = c.conj();
        }
        out[n_max].im = 0.0;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn close(a: &FourierSeries, b: &FourierSeries, tol: f64) -> bool {
        a.n_max() == b.n_max()
            && a.coeffs()
                .iter()
                .zip(b.coeffs())
                .all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn second_derivative_of_cosine() {
        let c = FourierSeries::cosine(4, 1, 1.0);
        let d = c.differentiate(2);
        assert!(close(&d, &FourierSeries::cosine(4, 1, -1.0), 1e-15));
        assert!(d.is_even());
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let c = FourierSeries::constant(3, 1.0);
        for order in 1..5 {
            assert!(close(&c.differentiate(order), &FourierSeries::zeros(3), 0.0));
        }
    }

    #[test]
    fn fourth_derivative_of_cos2() {
        let d = FourierSeries::cosine(4, 2, 1.0).differentiate(4);
        assert!(close(&d, &FourierSeries::cosine(4, 2, 16.0), 1e-13));
    }

    #[test]
    fn first_derivative_flips_parity() {
        let d = FourierSeries::cosine(4, 3, 2.0).differentiate(1);
        assert_eq!(d.parity(), Parity::Odd);
        assert!(close(&d, &FourierSeries::sine(4, 3, -6.0), 1e-14));
    }

    #[test]
    fn product_to_sum_identities() {
        let n = 6;
        let cos = FourierSeries::cosine(n, 1, 1.0);
        let sin = FourierSeries::sine(n, 1, 1.0);
        for mode in [ProductMode::Truncate, ProductMode::Dealias] {
            let cc = cos.multiply(&cos, mode).unwrap();
            let expected = FourierSeries::constant(n, 0.5)
                .add(&FourierSeries::cosine(n, 2, 0.5))
                .unwrap();
            assert!(close(&cc, &expected, 1e-15), "{mode:?}");

            let cs = cos.multiply(&sin, mode).unwrap();
            assert!(close(&cs, &FourierSeries::sine(n, 2, 0.5), 1e-15));
            assert_eq!(cs.parity(), Parity::Odd);

            let ccc = cc.multiply(&cos, mode).unwrap();
            let expected = FourierSeries::cosine(n, 1, 0.75)
                .add(&FourierSeries::cosine(n, 3, 0.25))
                .unwrap();
            assert!(close(&ccc, &expected, 1e-15));
        }
    }

    #[test]
    fn truncation_drops_high_modes() {
        let c = FourierSeries::cosine(2, 2, 1.0);
        let sq = c.multiply(&c, ProductMode::Truncate).unwrap();
        assert!(close(&sq, &FourierSeries::constant(2, 0.5), 1e-15));
        let full = c.multiply_full(&c);
        assert_eq!(full.n_max(), 4);
        assert_abs_diff_eq!(full.coeff(4).re, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn inner_product_normalization() {
        let n = 3;
        let cos = FourierSeries::cosine(n, 1, 1.0);
        let sin = FourierSeries::sine(n, 1, 1.0);
        let c = FourierSeries::constant(n, 1.0 / 2f64.sqrt());
        assert_abs_diff_eq!(cos.inner_product(&cos).unwrap().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.inner_product(&c).unwrap().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cos.inner_product(&sin).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            FourierSeries::complex(2, vec![Complex64::new(0.0, 0.0); 4]),
            Err(FourierError::Length { .. })
        ));
        let asym = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!(matches!(
            FourierSeries::new(1, asym, true, Parity::Even),
            Err(FourierError::Symmetry(_))
        ));
        let a = FourierSeries::zeros(2);
        let b = FourierSeries::zeros(3);
        assert!(matches!(
            a.multiply(&b, ProductMode::Truncate),
            Err(FourierError::OrderMismatch(2, 3))
        ));
    }

    #[test]
    fn evaluate_reconstructs_function() {
        let f = FourierSeries::cosine(5, 2, 0.3)
            .add(&FourierSeries::sine(5, 3, -1.2))
            .unwrap()
            .add(&FourierSeries::constant(5, 0.7))
            .unwrap();
        for j in 0..17 {
            let z = 0.37 * j as f64;
            let exact = 0.7 + 0.3 * (2.0 * z).cos() - 1.2 * (3.0 * z).sin();
            assert_abs_diff_eq!(f.evaluate(z).re, exact, epsilon = 1e-14);
            assert_abs_diff_eq!(f.evaluate(z).im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn translation_and_parts() {
        let c = FourierSeries::cosine(4, 1, 1.0);
        let shifted = c.translated(-PI / 2.0);
        assert!(close(&shifted, &FourierSeries::sine(4, 1, 1.0), 1e-15));
        let mixed = c.add(&FourierSeries::sine(4, 2, 3.0)).unwrap();
        assert!(close(&mixed.even_part(), &c, 1e-15));
        assert!(close(&mixed.odd_part(), &FourierSeries::sine(4, 2, 3.0), 1e-15));
    }

    #[test]
    fn cosine_coefficient_roundtrip() {
        let a = [0.5, -1.0, 0.25, 0.0, 3.0];
        let s = FourierSeries::from_cosine_coeffs(4, &a);
        assert_eq!(s.cosine_coeffs(), a.to_vec());
        let b = FourierSeries::sine(4, 3, 2.0).sine_coeffs();
        assert_abs_diff_eq!(b[3], 2.0, epsilon = 1e-15);
    }

    fn real_series(n_max: usize) -> impl Strategy<Value = FourierSeries> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n_max + 1).prop_map(
            move |v| {
                let mut c = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
                for (n, (re, im)) in v.into_iter().enumerate() {
                    let z = if n == 0 {
                        Complex64::new(re, 0.0)
                    } else {
                        Complex64::new(re, im)
                    };
                    c[n_max + n] = z;
                    c[n_max - n] = z.conj();
                }
                FourierSeries::new(n_max, c, true, Parity::None).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn parseval(f in real_series(6)) {
            let ip = f.inner_product(&f).unwrap();
            let direct: f64 = 2.0 * f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
            prop_assert!((ip.re - direct).abs() <= 1e-13 * direct.max(1.0));
            prop_assert!(ip.im.abs() <= 1e-15);
            // Parseval against quadrature of |f|^2 (exact for trigonometric polynomials).
            let m = 64;
            let quad: f64 = (0..m)
                .map(|j| f.evaluate(2.0 * PI * j as f64 / m as f64).norm_sqr())
                .sum::<f64>() * 2.0 / m as f64;
            prop_assert!((quad - ip.re).abs() <= 1e-12 * quad.max(1.0));
        }

        #[test]
        fn product_commutes(f in real_series(5), g in real_series(5)) {
            let fg = f.multiply(&g, ProductMode::Truncate).unwrap();
            let gf = g.multiply(&f, ProductMode::Truncate).unwrap();
            prop_assert!(close(&fg, &gf, 1e-14));
        }

        #[test]
        fn dealias_equals_exact_truncation(f in real_series(5), g in real_series(5)) {
            let a = f.multiply(&g, ProductMode::Truncate).unwrap();
            let b = f.multiply(&g, ProductMode::Dealias).unwrap();
            prop_assert!(close(&a, &b, 1e-13));
        }

        #[test]
        fn product_associative_on_band_limited(f in real_series(2), g in real_series(2), h in real_series(2)) {
            let n = 8;
            let (f, g, h) = (f.resized(n), g.resized(n), h.resized(n));
            let mode = ProductMode::Dealias;
            let left = f.multiply(&g, mode).unwrap().multiply(&h, mode).unwrap();
            let right = f.multiply(&g.multiply(&h, mode).unwrap(), mode).unwrap();
            prop_assert!(close(&left, &right, 1e-13));
        }

        #[test]
        fn leibniz_rule(f in real_series(3), g in real_series(3)) {
            let n = 8;
            let (f, g) = (f.resized(n), g.resized(n));
            let mode = ProductMode::Truncate;
            let lhs = f.multiply(&g, mode).unwrap().differentiate(1);
            let rhs = f.differentiate(1).multiply(&g, mode).unwrap()
                .add(&f.multiply(&g.differentiate(1), mode).unwrap()).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn realness_survives_operations(f in real_series(4), g in real_series(4)) {
            let p = f.multiply(&g, ProductMode::Dealias).unwrap().differentiate(3);
            prop_assert!(p.is_real());
            for n in 0..=4i64 {
                prop_assert_eq!(p.coeff(n), p.coeff(-n).conj());
            }
        }
    }
}
