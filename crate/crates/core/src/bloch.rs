//! Bloch-shifted linearization in the Fourier basis (Hill's method).
//!
//! For Floquet exponent `ξ` the operator acting on `e^{i(n+ξ)z}` is
//!
//! ```text
//! T = D (c − k⁴D⁴ − 15(k²(W D² + W'') + 3 W₂)),   D = diag(i(n+ξ))
//! ```
//!
//! with `W`, `W''`, `W₂` the convolution matrices of `w`, `w_zz`, `w²`. Since
//! `w` is even and real, `T = iA` with `A = diag(n+ξ)·L` real. Spectra are
//! computed from the real Schur form of `A`, so eigenvalues of `A` that are
//! real give `Re λ = 0` exactly. Eigenvalues small against `‖A‖ ~ k⁴N⁵` are
//! then polished against the exact matrix entries.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DVector;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::linalg::{self, CMatrix, LinalgError, RMatrix};
use crate::profile::{self, ProfileError, WaveProfile};

/// Default stability tolerance on `Re λ`.
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_N: usize = 64;
pub const DEFAULT_GRID_POINTS: usize = 401;
/// Relative matching tolerance for the quad-fold symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BlochError {
    #[error("Floquet exponent {0} outside [-1/2, 1/2]")]
    Xi(f64),
    #[error("matrix truncation {n_max} is below the profile truncation {profile}")]
    Truncation { n_max: usize, profile: usize },
    #[error("empty Floquet grid")]
    EmptyGrid,
    #[error("a uniform grid needs at least 2 points, got {0}")]
    GridSize(usize),
    #[error("profile tangents unavailable: {0}")]
    Tangent(ProfileError),
    #[error("eigenvalue iteration failed at xi = {xi}: {source}")]
    Eigen { xi: f64, source: LinalgError },
}

/// `ω_{n,ξ} = k⁴(n+ξ)(1 − (n+ξ)⁴)`; the flat operator has eigenvalues `iω`.
pub fn flat_symbol(n: i64, xi: f64, k: f64) -> f64 {
    let q = n as f64 + xi;
    k.powi(4) * q * (1.0 - q.powi(4))
}

fn check_xi(xi: f64) -> Result<(), BlochError> {
    if (-0.5..=0.5).contains(&xi) {
        Ok(())
    } else {
        Err(BlochError::Xi(xi))
    }
}

/// Ordered set of Floquet exponents in `[-1/2, 1/2]`.
///
/// `-1/2` is the Floquet image of `1/2` and is admitted so that uniform grids
/// are symmetric about 0.
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    points: Vec<f64>,
}

impl XiGrid {
    /// `count` equispaced points from `-1/2` to `1/2` inclusive. Odd counts
    /// contain `ξ = 0` exactly.
    pub fn uniform(count: usize) -> Result<Self, BlochError> {
        if count < 2 {
            return Err(BlochError::GridSize(count));
        }
        let half = (count - 1) as f64 / 2.0;
        let points = (0..count)
            .map(|j| 0.5 * (j as f64 - half) / half)
            .collect();
        Ok(Self { points })
    }

    pub fn single(xi: f64) -> Result<Self, BlochError> {
        check_xi(xi)?;
        Ok(Self { points: vec![xi] })
    }

    pub fn from_points(mut points: Vec<f64>) -> Result<Self, BlochError> {
        if points.is_empty() {
            return Err(BlochError::EmptyGrid);
        }
        for &xi in &points {
            check_xi(xi)?;
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_zero(&self) -> bool {
        self.points.contains(&0.0)
    }

    /// Index of the point equal to `-xi`, if present.
    pub fn mirror_index(&self, xi: f64) -> Option<usize> {
        self.points.iter().position(|&p| p == -xi)
    }
}

/// `T_{a,ξ}` truncated to modes `|n| ≤ N`, stored as the real generator `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMatrix {
    xi: f64,
    n_max: usize,
    a: f64,
    k: f64,
    generator: RMatrix,
    flat: bool,
    /// At `ξ = 0` for a nonzero profile: `v = n ŵ_n` and a zero-mean `u`
    /// with `A v = 0`, `A u = −v`.
    jordan_chain: Option<(Vec<f64>, Vec<f64>)>,
}

/// Eigenvalues of `A` below this fraction of `max |A_ij|` are refined.
const REFINE_FRACTION: f64 = 1e-6;

/// Assembles `T_{a,ξ}` for `profile` on modes `|n| ≤ n_max`.
pub fn assemble(profile: &WaveProfile, xi: f64, n_max: usize) -> Result<BlochMatrix, BlochError> {
    check_xi(xi)?;
    if n_max < profile.n_max() {
        return Err(BlochError::Truncation {
            n_max,
            profile: profile.n_max(),
        });
    }
    let k2 = profile.k() * profile.k();
    let c = profile.c();
    let w = profile.w();
    let w2 = w.multiply_full(w);
    let wzz = w.differentiate(2);
    // Coefficients by offset d = m − n ∈ [−2N, 2N].
    let span = 2 * n_max as i64;
    let offset = |s: &crate::fourier::FourierSeries| -> Vec<f64> {
        (-span..=span).map(|d| s.coeff(d).re).collect()
    };
    let (wd, wzzd, w2d) = (offset(w), offset(&wzz), offset(&w2));

    let dim = 2 * n_max + 1;
    let q = |j: usize| j as f64 - n_max as f64 + xi;
    let generator = RMatrix::from_fn(dim, dim, |i, j| {
        let d = (i as i64 - j as i64 + span) as usize;
        let qj = q(j);
        let mut l = -15.0 * (k2 * (-qj * qj * wd[d] + wzzd[d]) + 3.0 * w2d[d]);
        if i == j {
            l += c - k2 * k2 * qj.powi(4);
        }
        q(i) * l
    });
    let flat = w.abs_sum() == 0.0;
    let jordan_chain = if xi == 0.0 && !flat {
        Some(jordan_chain(profile, n_max)?)
    } else {
        None
    };
    Ok(BlochMatrix {
        xi,
        n_max,
        a: profile.a(),
        k: profile.k(),
        generator,
        flat,
        jordan_chain,
    })
}

/// Generalized kernel of `A` at `ξ = 0` inside the zero-mean modes.
fn jordan_chain(profile: &WaveProfile, n_max: usize) -> Result<(Vec<f64>, Vec<f64>), BlochError> {
    let (dc, da) = profile::family_tangents(profile).map_err(BlochError::Tangent)?;
    let w = profile.w();
    let ratio = dc.mean() / da.mean();
    let translation = (-(n_max as i64)..=n_max as i64)
        .map(|n| n as f64 * w.coeff(n).re)
        .collect();
    let chain = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                dc.coeff(n).re - ratio * da.coeff(n).re
            }
        })
        .collect();
    Ok((translation, chain))
}

impl BlochMatrix {
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    pub fn amplitude(&self) -> f64 {
        self.a
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// Real `A` with `T = iA`.
    pub fn generator(&self) -> &RMatrix {
        &self.generator
    }

    /// Complex entries of `T`, rows and columns indexed by `n = −N..N`.
    pub fn entries(&self) -> CMatrix {
        self.generator.map(|x| Complex64::new(0.0, x))
    }

    /// Index of mode `n` in rows and columns.
    pub fn index(&self, n: i64) -> usize {
        (n + self.n_max as i64) as usize
    }

    /// All `2N + 1` eigenvalues of `T`.
    ///
    /// At `ξ = 0` the zero row of mode 0 and, for a nonzero profile, the
    /// Jordan chain `{w_z, u}` of the translation mode are deflated exactly
    /// before the QR iteration.
    pub fn eigenvalues(&self) -> Result<SpectrumSlice, BlochError> {
        let eig = |m: RMatrix| {
            linalg::real_eigenvalues(m).map_err(|source| BlochError::Eigen {
                xi: self.xi,
                source,
            })
        };
        let mut exact_zeros = 0;
        let mut deflation_residual = 0.0;
        let (exact, rest) = if self.xi != 0.0 {
            let rest = eig(self.generator.clone())?;
            (self.generator.clone(), rest)
        } else {
            let z = self.n_max;
            let reduced = self.generator.clone().remove_row(z).remove_column(z);
            exact_zeros += 1;
            let rest = match &self.jordan_chain {
                Some((v, u)) => {
                    let mut basis = RMatrix::zeros(reduced.nrows(), 2);
                    for (col, vec) in [v, u].into_iter().enumerate() {
                        let mut vec = vec.clone();
                        vec.remove(z);
                        basis.set_column(col, &DVector::from_vec(vec));
                    }
                    let q = linalg::orthogonal_completion(&basis);
                    let q2 = q.columns(0, 2).into_owned();
                    let aq2 = &reduced * &q2;
                    let block = q2.transpose() * &aq2;
                    deflation_residual = (aq2 - &q2 * block).norm() / reduced.amax();
                    exact_zeros += 2;
                    let b = q.transpose() * &reduced * &q;
                    let n = b.nrows();
                    eig(b.view((2, 2), (n - 2, n - 2)).into_owned())?
                }
                None => eig(reduced.clone())?,
            };
            (reduced, rest)
        };
        let mut mu = vec![Complex64::new(0.0, 0.0); exact_zeros];
        if self.flat {
            mu.extend(rest);
        } else {
            let limit = REFINE_FRACTION * exact.amax();
            mu.extend(rest.into_iter().map(|m| {
                if m.norm() < limit {
                    linalg::refine_eigenvalue(&exact, m).unwrap_or(m)
                } else {
                    m
                }
            }));
        }
        let eigenvalues = mu.into_iter().map(|m| Complex64::new(-m.im, m.re)).collect();
        Ok(SpectrumSlice {
            xi: self.xi,
            eigenvalues,
            deflation_residual,
        })
    }
}

/// Eigenvalues of `T_{a,ξ}` at one Floquet exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    pub xi: f64,
    pub eigenvalues: Vec<Complex64>,
    /// `‖A Q − Q (QᵀAQ)‖ / max|A_ij|` for the deflated basis `Q` at `ξ = 0`
    /// (0 otherwise).
    pub deflation_residual: f64,
}

impl SpectrumSlice {
    /// Largest real part, with its eigenvalue.
    pub fn max_re(&self) -> (f64, Complex64) {
        self.eigenvalues
            .iter()
            .map(|&l| (l.re, l))
            .fold((f64::NEG_INFINITY, Complex64::new(0.0, 0.0)), |m, x| {
                if x.0 > m.0 {
                    x
                } else {
                    m
                }
            })
    }

    pub fn max_abs_re(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.re.abs()))
    }

    /// The `count` eigenvalues of smallest modulus, by increasing modulus.
    pub fn smallest(&self, count: usize) -> Vec<Complex64> {
        let mut e = self.eigenvalues.clone();
        e.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal));
        e.truncate(count);
        e
    }

    /// Number of eigenvalues with `r_in < |λ| < r_out`.
    pub fn count_in_annulus(&self, r_in: f64, r_out: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|l| l.norm() > r_in && l.norm() < r_out)
            .count()
    }

    /// Largest relative mismatch of the quad-fold symmetry, using `mirror` as
    /// the slice at `−ξ`.
    ///
    /// `−conj λ` is matched within this slice; `−λ` and `conj λ` within the
    /// mirror. Each defect is scaled by `max(1, |λ|)`.
    pub fn quad_fold_defect(&self, mirror: &SpectrumSlice) -> f64 {
        let reflect = |f: &dyn Fn(Complex64) -> Complex64, target: &[Complex64]| {
            let images: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
            greedy_defect(&images, target)
        };
        let own = reflect(&|l: Complex64| -l.conj(), &self.eigenvalues);
        let neg = reflect(&|l: Complex64| -l, &mirror.eigenvalues);
        let conj = reflect(&|l: Complex64| l.conj(), &mirror.eigenvalues);
        own.max(neg).max(conj)
    }
}

/// Greedy nearest-neighbour pairing of `images` with `target`; returns the
/// largest pair distance relative to `max(1, |image|)`.
fn greedy_defect(images: &[Complex64], target: &[Complex64]) -> f64 {
    if images.len() != target.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; target.len()];
    let mut worst = 0.0_f64;
    for img in images {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, t) in target.iter().enumerate() {
            if !used[j] {
                let d = (img - t).norm();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0 / img.norm().max(1.0));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    /// Stable for `max_re ≤ tol`, unstable above `10·tol`.
    pub fn classify(max_re: f64, tol: f64) -> Self {
        if max_re <= tol {
            Verdict::Stable
        } else if max_re > 10.0 * tol {
            Verdict::Unstable
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Aggregate of a Floquet scan.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub a: f64,
    pub k: f64,
    pub n_max: usize,
    pub tol: f64,
    pub max_re: f64,
    pub max_abs_re: f64,
    pub argmax_xi: f64,
    pub argmax_lambda: Complex64,
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_includes_zero: bool,
    /// Largest quad-fold defect over slices whose mirror `−ξ` was scanned.
    pub symmetry_defect: f64,
    pub max_deflation_residual: f64,
    pub verdict: Verdict,
}

impl StabilityReport {
    /// Reduces per-ξ slices, which must be ordered like `grid`.
    pub fn from_slices(
        profile: &WaveProfile,
        n_max: usize,
        grid: &XiGrid,
        slices: &[SpectrumSlice],
        tol: f64,
    ) -> Self {
        let mut max_re = f64::NEG_INFINITY;
        let mut argmax = (0.0, Complex64::new(0.0, 0.0));
        let mut max_abs_re = 0.0_f64;
        let mut symmetry_defect = 0.0_f64;
        let mut max_deflation_residual = 0.0_f64;
        for s in slices {
            let (re, l) = s.max_re();
            if re > max_re {
                max_re = re;
                argmax = (s.xi, l);
            }
            max_abs_re = max_abs_re.max(s.max_abs_re());
            max_deflation_residual = max_deflation_residual.max(s.deflation_residual);
            if let Some(j) = grid.mirror_index(s.xi) {
                symmetry_defect = symmetry_defect.max(s.quad_fold_defect(&slices[j]));
            }
        }
        let pts = grid.points();
        Self {
            a: profile.a(),
            k: profile.k(),
            n_max,
            tol,
            max_re,
            max_abs_re,
            argmax_xi: argmax.0,
            argmax_lambda: argmax.1,
            grid_points: pts.len(),
            grid_min: pts[0],
            grid_max: pts[pts.len() - 1],
            grid_includes_zero: grid.contains_zero(),
            symmetry_defect,
            max_deflation_residual,
            verdict: Verdict::classify(max_re, tol),
        }
    }
}

/// Spectrum at one Floquet exponent.
pub fn slice(profile: &WaveProfile, xi: f64, n_max: usize) -> Result<SpectrumSlice, BlochError> {
    assemble(profile, xi, n_max)?.eigenvalues()
}

/// Serial scan over `grid`; returns the report and the slices in grid order.
pub fn scan(
    profile: &WaveProfile,
    grid: &XiGrid,
    n_max: usize,
    tol: f64,
) -> Result<(StabilityReport, Vec<SpectrumSlice>), BlochError> {
    let slices = grid
        .points()
        .iter()
        .map(|&xi| slice(profile, xi, n_max))
        .collect::<Result<Vec<_>, _>>()?;
    let report = StabilityReport::from_slices(profile, n_max, grid, &slices, tol);
    Ok((report, slices))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionKind {
    /// Equal symbols at a grid point.
    Coincidence,
    /// `ω_n − ω_m` changes sign strictly between adjacent grid points.
    Crossing,
}

/// Modes whose flat eigenvalues meet at `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub xi: f64,
    pub modes: Vec<i64>,
    pub omega: f64,
    pub kind: CollisionKind,
}

/// Relative resolution below which two flat symbols are considered equal.
pub const COLLISION_RESOLUTION: f64 = 1e-10;

/// Collisions among `ω_{n,ξ}`, `|n| ≤ n_range`, on `grid` and between its
/// adjacent points.
pub fn collision_analysis(k: f64, n_range: i64, grid: &XiGrid) -> Vec<Collision> {
    let modes: Vec<i64> = (-n_range..=n_range).collect();
    let k4 = k.powi(4);
    let symbols = |xi: f64| -> Vec<f64> { modes.iter().map(|&n| flat_symbol(n, xi, k)).collect() };
    let mut out = Vec::new();
    let pts = grid.points();
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for &xi in pts {
        let om = symbols(xi);
        // Group modes with coinciding symbols.
        let mut assigned = vec![false; modes.len()];
        for i in 0..modes.len() {
            if assigned[i] {
                continue;
            }
            let mut group = vec![modes[i]];
            for j in i + 1..modes.len() {
                let scale = k4 * om[i].abs().max(om[j].abs()).max(1.0);
                if !assigned[j] && (om[i] - om[j]).abs() <= COLLISION_RESOLUTION * scale {
                    assigned[j] = true;
                    group.push(modes[j]);
                }
            }
            if group.len() > 1 {
                out.push(Collision {
                    xi,
                    modes: group,
                    omega: om[i],
                    kind: CollisionKind::Coincidence,
                });
            }
        }
        if let Some((xp, omp)) = &prev {
            for i in 0..modes.len() {
                for j in i + 1..modes.len() {
                    let d0 = omp[i] - omp[j];
                    let d1 = om[i] - om[j];
                    if d0 * d1 < 0.0 {
                        let t = d0 / (d0 - d1);
                        let xc = xp + t * (xi - xp);
                        out.push(Collision {
                            xi: xc,
                            modes: vec![modes[i], modes[j]],
                            omega: flat_symbol(modes[i], xc, k),
                            kind: CollisionKind::Crossing,
                        });
                    }
                }
            }
        }
        prev = Some((xi, om));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{asymptotic_profile, newton_solve};
    use approx::assert_abs_diff_eq;

    fn flat(k: f64) -> WaveProfile {
        WaveProfile::trivial(k, 16).unwrap()
    }

    #[test]
    fn symbol_values() {
        assert_eq!(flat_symbol(0, 0.0, 1.0), 0.0);
        assert_eq!(flat_symbol(1, 0.0, 1.0), 0.0);
        assert_eq!(flat_symbol(-1, 0.0, 1.0), 0.0);
        assert_eq!(flat_symbol(2, 0.0, 1.5), -30.0 * 1.5f64.powi(4));
        assert_abs_diff_eq!(flat_symbol(1, 0.5, 1.0), -6.09375, epsilon = 1e-14);
    }

    #[test]
    fn uniform_grid_shape() {
        let g = XiGrid::uniform(401).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g.points()[0], -0.5);
        assert_eq!(g.points()[400], 0.5);
        assert_eq!(g.points()[200], 0.0);
        assert!(g.contains_zero());
        for (j, &x) in g.points().iter().enumerate() {
            assert_eq!(g.points()[400 - j], -x);
        }
        assert!(XiGrid::single(0.6).is_err());
        assert!(XiGrid::uniform(1).is_err());
    }

    #[test]
    fn flat_matrix_is_diagonal() {
        let m = assemble(&flat(1.2), 0.3, 16).unwrap();
        let t = m.entries();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let n = i as i64 - 16;
                let expected = if i == j {
                    Complex64::new(0.0, flat_symbol(n, 0.3, 1.2))
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((t[(i, j)] - expected).norm() <= 1e-15 * expected.norm().max(1.0));
            }
        }
    }

    #[test]
    fn flat_kernel_rows_vanish() {
        let m = assemble(&flat(1.0), 0.0, 16).unwrap();
        for n in -1..=1 {
            assert_eq!(m.generator().row(m.index(n)).norm(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(assemble(&flat(1.0), 0.51, 16), Err(BlochError::Xi(0.51)));
        assert!(matches!(
            assemble(&flat(1.0), 0.0, 8),
            Err(BlochError::Truncation { .. })
        ));
    }

    #[test]
    fn matrix_is_continuous_in_amplitude() {
        let base = assemble(&flat(1.0).resized(24), 0.2, 24).unwrap();
        let dist = |a: f64| {
            let p = asymptotic_profile(a, 1.0, 3, 24).unwrap();
            (assemble(&p, 0.2, 24).unwrap().generator() - base.generator()).norm()
        };
        // Linear in a.
        for a in [1e-2, 1e-3, 1e-4] {
            let ratio = dist(a) / dist(a / 10.0);
            assert!((ratio - 10.0).abs() < 0.2, "ratio {ratio}");
        }
    }

    #[test]
    fn flat_spectrum_is_exact() {
        let s = slice(&flat(1.0), 0.1, 16).unwrap();
        assert_eq!(s.max_abs_re(), 0.0);
        let mut got: Vec<f64> = s.eigenvalues.iter().map(|l| l.im).collect();
        let mut want: Vec<f64> = (-16..=16).map(|n| flat_symbol(n, 0.1, 1.0)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn triple_zero_at_origin() {
        let s = slice(&flat(1.0), 0.0, 16).unwrap();
        assert_eq!(s.eigenvalues.iter().filter(|l| l.norm() == 0.0).count(), 3);
    }

    #[test]
    fn small_wave_spectrum_is_imaginary() {
        let p = newton_solve(0.05, 1.0, 32, 1e-12, None).unwrap().profile;
        for xi in [0.0, 0.1, 0.5] {
            let s = slice(&p, xi, 64).unwrap();
            assert!(s.max_abs_re() <= 1e-8, "xi={xi}: {}", s.max_abs_re());
            assert!(s.deflation_residual <= 1e-13, "{:e}", s.deflation_residual);
        }
    }

    #[test]
    fn quad_fold_with_mirror() {
        let p = newton_solve(0.02, 1.0, 32, 1e-12, None).unwrap().profile;
        let s = slice(&p, 0.2, 48).unwrap();
        let m = slice(&p, -0.2, 48).unwrap();
        assert!(s.quad_fold_defect(&m) <= SYMMETRY_TOL);
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::classify(1e-9, 1e-8), Verdict::Stable);
        assert_eq!(Verdict::classify(5e-8, 1e-8), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(2e-7, 1e-8), Verdict::Unstable);
    }

    #[test]
    fn collisions_only_at_origin() {
        let found = collision_analysis(1.0, 8, &XiGrid::uniform(401).unwrap());
        assert_eq!(found.len(), 1, "{found:?}");
        assert_eq!(found[0].xi, 0.0);
        assert_eq!(found[0].modes, vec![-1, 0, 1]);
        assert_eq!(found[0].omega, 0.0);
        let quarter = collision_analysis(1.0, 8, &XiGrid::single(0.25).unwrap());
        assert!(quarter.is_empty());
        let scaled = collision_analysis(3.0, 8, &XiGrid::uniform(401).unwrap());
        assert_eq!(scaled.len(), 1);
    }
}
