//! Reduction of `T_{a,ξ}` to its three-dimensional invariant subspace near
//! the origin.
//!
//! The Riesz projector `P` onto the eigenvalues inside `|λ| = R/3`,
//! `R = 5k⁴`, is built two ways (resolvent quadrature and block inverse
//! iteration). The flat kernel basis `{cos z, sin z, 1/√2}` is transported
//! into `range P` by `U = (I − (P − P₀₀)²)^{−1/2} P`, and the reduced matrix
//! is `B_ij = ⟨T φ_i, φ_j⟩`.

use alloc::vec;
use alloc::vec::Vec;
use alloc::string::String;
use core::f64::consts::{PI, SQRT_2};

use nalgebra::Matrix3;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::bloch::{self, BlochError, BlochMatrix, SpectrumSlice};
use crate::fourier::{inner_product, FourierSeries};
use crate::linalg::{self, CMatrix, CVector, LinalgError, RMatrix};
use crate::profile::{self, ProfileError, WaveProfile};

pub const DEFAULT_NODES: usize = 64;
/// Agreement required between node counts `M` and `2M`, and between methods.
pub const PROJECTOR_TOL: f64 = 1e-8;
/// Inverse-square-root series: coefficients of `(D²)^j`, `j = 0..4`.
const NEUMANN: [f64; 5] = [1.0, 0.5, 0.375, 0.3125, 0.2734375];
/// Coefficient of the first omitted term `(D²)⁵`.
const NEUMANN_NEXT: f64 = 0.24609375;
const SUBSPACE_ITERATIONS: usize = 200;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReducedError {
    #[error("{count} eigenvalues inside |lambda| < R/3, expected 3")]
    WrongRank { count: usize },
    #[error("contour quadrature changed by {change:e} when doubling nodes")]
    QuadratureStall { change: f64 },
    #[error("||P - P00|| = {deviation} is not below 1/2")]
    NotAPerturbation { deviation: f64 },
    #[error("block inverse iteration did not converge")]
    SubspaceStall,
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// `R = 5k⁴`.
pub fn spectral_radius_scale(k: f64) -> f64 {
    5.0 * k.powi(4)
}

/// Radius `R/3` of the projection contour.
pub fn contour_radius(k: f64) -> f64 {
    spectral_radius_scale(k) / 3.0
}

/// Eigenvalues of `slice` strictly inside the contour.
pub fn interior_eigenvalues(slice: &SpectrumSlice, k: f64) -> Vec<C> {
    let r = contour_radius(k);
    slice
        .eigenvalues
        .iter()
        .copied()
        .filter(|l| l.norm() < r)
        .collect()
}

/// Orthogonal projector onto modes `n ∈ {−1, 0, 1}`.
pub fn flat_projector(n_max: usize) -> CMatrix {
    let dim = 2 * n_max + 1;
    let mut p = CMatrix::zeros(dim, dim);
    for j in n_max - 1..=n_max + 1 {
        p[(j, j)] = re(1.0);
    }
    p
}

/// Mode vectors of `cos z`, `sin z`, `1/√2`.
pub fn flat_basis(n_max: usize) -> [CVector; 3] {
    let dim = 2 * n_max + 1;
    let mut cos = CVector::zeros(dim);
    let mut sin = CVector::zeros(dim);
    let mut one = CVector::zeros(dim);
    cos[n_max + 1] = re(0.5);
    cos[n_max - 1] = re(0.5);
    sin[n_max + 1] = C::new(0.0, -0.5);
    sin[n_max - 1] = C::new(0.0, 0.5);
    one[n_max] = re(1.0 / SQRT_2);
    [cos, sin, one]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorMethod {
    Contour,
    Eigenbasis,
}

impl ProjectorMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectorMethod::Contour => "contour",
            ProjectorMethod::Eigenbasis => "eigenbasis",
        }
    }
}

/// Rank-3 spectral projector with its distance from `P₀₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    pub p: CMatrix,
    pub method: ProjectorMethod,
    /// `‖P − P₀₀‖₂`.
    pub deviation: f64,
    /// Quadrature nodes of the returned projector (0 for the eigenbasis).
    pub nodes: usize,
    /// `‖P_{2M} − P_M‖₂` for the contour method (0 for the eigenbasis).
    pub quadrature_change: f64,
}

impl ProjectorPair {
    /// `‖P² − P‖₂`.
    pub fn idempotency_defect(&self) -> f64 {
        linalg::spectral_norm(&(&self.p * &self.p - &self.p))
    }

    /// `‖PT − TP‖₂`.
    pub fn commutator_defect(&self, m: &BlochMatrix) -> f64 {
        let t = m.entries();
        linalg::spectral_norm(&(&self.p * &t - &t * &self.p))
    }

    /// Numerical rank from the trace.
    pub fn trace(&self) -> C {
        self.p.trace()
    }
}

fn check_rank(m: &BlochMatrix) -> Result<(), ReducedError> {
    let slice = m.eigenvalues()?;
    let count = interior_eigenvalues(&slice, m.wavenumber()).len();
    if count != 3 {
        return Err(ReducedError::WrongRank { count });
    }
    Ok(())
}

/// Spectral projector of `m` for the eigenvalues inside `|λ| = R/3`.
///
/// `nodes` is the base node count of the contour rule; the rule is
/// evaluated at `nodes` and `2·nodes` and the finer result returned.
pub fn projector(
    m: &BlochMatrix,
    method: ProjectorMethod,
    nodes: usize,
) -> Result<ProjectorPair, ReducedError> {
    check_rank(m)?;
    let p00 = flat_projector(m.n_max());
    let (p, nodes, quadrature_change) = match method {
        ProjectorMethod::Contour => {
            let (coarse, fine) = contour_projector(m, nodes)?;
            let change = linalg::spectral_norm(&(&fine - &coarse));
            if change > PROJECTOR_TOL {
                return Err(ReducedError::QuadratureStall { change });
            }
            (fine, 2 * nodes, change)
        }
        ProjectorMethod::Eigenbasis => (eigenbasis_projector(m)?, 0, 0.0),
    };
    let deviation = linalg::spectral_norm(&(&p - &p00));
    Ok(ProjectorPair {
        p,
        method,
        deviation,
        nodes,
        quadrature_change,
    })
}

/// Trapezoidal rule for `(1/2πi)∮(λ − T)⁻¹dλ` with `M` and `2M` nodes.
fn contour_projector(m: &BlochMatrix, nodes: usize) -> Result<(CMatrix, CMatrix), ReducedError> {
    let t = m.entries();
    let dim = m.dim();
    let r = contour_radius(m.wavenumber());
    let total = 2 * nodes.max(1);
    let mut even = CMatrix::zeros(dim, dim);
    let mut odd = CMatrix::zeros(dim, dim);
    for j in 0..total {
        let lambda = C::from_polar(r, 2.0 * PI * j as f64 / total as f64);
        let shifted = CMatrix::identity(dim, dim) * lambda - &t;
        let term = linalg::inverse(shifted)? * lambda;
        if j % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
    }
    let coarse = &even / re(nodes as f64);
    let fine = (even + odd) / re(total as f64);
    Ok((coarse, fine))
}

/// `X (YᴴX)⁻¹ Yᴴ` from right and left invariant subspaces, each found by
/// block inverse iteration started from the flat modes.
fn eigenbasis_projector(m: &BlochMatrix) -> Result<CMatrix, ReducedError> {
    let t = m.entries();
    let dim = m.dim();
    let n = m.n_max();
    let sigma = re(spectral_radius_scale(m.wavenumber()) / 6.0);
    let eye = CMatrix::identity(dim, dim);
    let right = (&t - &eye * sigma).lu();
    let left = (t.adjoint() - &eye * sigma.conj()).lu();
    let start = flat_projector(n).columns(n - 1, 3).into_owned();
    let iterate = |lu: &nalgebra::LU<C, nalgebra::Dyn, nalgebra::Dyn>| -> Result<CMatrix, ReducedError> {
        let mut x = start.clone();
        for _ in 0..SUBSPACE_ITERATIONS {
            let y = lu.solve(&x).ok_or(LinalgError::Singular)?;
            // Column combinations keep tiny high-mode entries relatively
            // accurate; Householder QR would leave eps-sized noise there.
            let chol = (y.adjoint() * &y).cholesky().ok_or(LinalgError::Singular)?;
            let q = &y * chol.l().adjoint().try_inverse().ok_or(LinalgError::Singular)?;
            // Distance between the old and new subspaces.
            let change = (&q - &x * (x.adjoint() * &q)).norm();
            x = q;
            if change <= 1e-14 {
                return Ok(x);
            }
        }
        Err(ReducedError::SubspaceStall)
    };
    let x = iterate(&right)?;
    let y = iterate(&left)?;
    let yx = linalg::inverse(y.adjoint() * &x)?;
    Ok(&x * yx * y.adjoint())
}

/// The transported basis `φ_i = U e_i` with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedBasis {
    pub phi: [CVector; 3],
    /// `‖P − P₀₀‖₂`.
    pub deviation: f64,
    /// `‖U P₀₀ − P U‖₂`.
    pub intertwining_defect: f64,
    /// Norm bound of the first omitted series term, `(63/256)‖D‖¹⁰`.
    pub series_tail: f64,
}

impl TransportedBasis {
    pub fn series(&self, i: usize) -> FourierSeries {
        let n = (self.phi[i].len() - 1) / 2;
        FourierSeries::complex(n, self.phi[i].iter().copied().collect()).expect("length 2N+1")
    }
}

/// `S = Σ_{j≤4} c_j (D²)^j ≈ (I − D²)^{−1/2}` for `D = P − P₀₀`.
fn inverse_sqrt_series(d: &CMatrix) -> CMatrix {
    let dim = d.nrows();
    let d2 = d * d;
    let mut power = CMatrix::identity(dim, dim);
    let mut s = CMatrix::zeros(dim, dim);
    for (j, &c) in NEUMANN.iter().enumerate() {
        if j > 0 {
            power = &power * &d2;
        }
        s += &power * re(c);
    }
    s
}

/// Applies `U = (I − (P − P₀₀)²)^{−1/2}(P P₀₀ + (I − P)(I − P₀₀))` to the
/// flat basis.
pub fn transported_basis(p: &CMatrix) -> Result<TransportedBasis, ReducedError> {
    let dim = p.nrows();
    let n = (dim - 1) / 2;
    let p00 = flat_projector(n);
    let d = p - &p00;
    let deviation = linalg::spectral_norm(&d);
    if !(deviation < 0.5) {
        return Err(ReducedError::NotAPerturbation { deviation });
    }
    let s = inverse_sqrt_series(&d);
    let eye = CMatrix::identity(dim, dim);
    let u = &s * (p * &p00 + (&eye - p) * (&eye - &p00));
    let intertwining_defect = linalg::spectral_norm(&(&u * &p00 - p * &u));
    let sp = &s * p;
    let flat = flat_basis(n);
    let phi = [&sp * &flat[0], &sp * &flat[1], &sp * &flat[2]];
    Ok(TransportedBasis {
        phi,
        deviation,
        intertwining_defect,
        series_tail: NEUMANN_NEXT * deviation.powi(10),
    })
}

/// `P e_i` without the inverse-square-root factor.
pub fn projected_basis(p: &CMatrix) -> [CVector; 3] {
    let n = (p.nrows() - 1) / 2;
    let flat = flat_basis(n);
    [p * &flat[0], p * &flat[1], p * &flat[2]]
}

/// `⟨f, g⟩ = 2Σ f_n conj(g_n)`.
fn inner(f: &CVector, g: &CVector) -> C {
    inner_product(f.as_slice(), g.as_slice())
}

/// `B_ij = ⟨T φ_i, φ_j⟩`.
pub fn reduced_matrix_of(m: &BlochMatrix, phi: &[CVector; 3]) -> Matrix3<C> {
    let t = m.entries();
    let tphi: Vec<CVector> = phi.iter().map(|v| &t * v).collect();
    Matrix3::from_fn(|i, j| inner(&tphi[i], &phi[j]))
}

/// `G_ij = ⟨φ_i, φ_j⟩`.
pub fn gram_matrix(phi: &[CVector; 3]) -> Matrix3<C> {
    Matrix3::from_fn(|i, j| inner(&phi[i], &phi[j]))
}

/// Closed-form reduced matrix, accurate to `O((a+ξ)³)`.
pub fn b_closed(a: f64, xi: f64, k: f64) -> Matrix3<C> {
    let k2 = k * k;
    let k4 = k2 * k2;
    let s = SQRT_2;
    Matrix3::new(
        C::new(0.0, -4.0 * k4 * xi),
        re(-15.0 * a * a + 10.0 * k4 * xi * xi),
        C::new(0.0, 15.0 * s * k2 * a * xi),
        re(-10.0 * k4 * xi * xi),
        C::new(0.0, -4.0 * k4 * xi),
        ZERO,
        C::new(0.0, 15.0 * s * k2 * a * xi / 2.0),
        re(-15.0 * s * k2 * a / 2.0),
        C::new(0.0, k4 * xi),
    )
}

/// Coefficients `[c₂, c₁, c₀]` of `det(B − λI) = −λ³ + c₂λ² + c₁λ + c₀`.
pub fn characteristic_cubic(b: &Matrix3<C>) -> [C; 3] {
    let minors = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)] + b[(0, 0)] * b[(2, 2)]
        - b[(0, 2)] * b[(2, 0)]
        + b[(1, 1)] * b[(2, 2)]
        - b[(1, 2)] * b[(2, 1)];
    [b.trace(), -minors, b.determinant()]
}

/// The closed-form characteristic cubic in the same normalization.
pub fn closed_cubic(a: f64, xi: f64, k: f64) -> [C; 3] {
    let k4 = k.powi(4);
    let k8 = k4 * k4;
    let k12 = k8 * k4;
    let a2 = a * a;
    [
        C::new(0.0, -7.0 * k4 * xi),
        re(-(75.0 * a2 * k4 * xi * xi - 8.0 * k8 * xi * xi + 100.0 * k8 * xi.powi(4))),
        C::new(
            0.0,
            1200.0 * a2 * k8 * xi.powi(3) - 16.0 * k12 * xi.powi(3) + 100.0 * k12 * xi.powi(5),
        ),
    ]
}

/// Real cubic `μ³ + q₂μ² + q₁μ + q₀` with `P(iμ) = i Q(μ)`, as `[q₂, q₁, q₀]`.
pub fn real_cubic(a: f64, xi: f64, k: f64) -> [f64; 3] {
    let p = closed_cubic(a, xi, k);
    // P(iμ) = iμ³ + c₂(−μ²) + c₁ iμ + c₀, divided by i.
    [-p[0].im, p[1].re, p[2].im]
}

/// Discriminant of `x³ + b x² + c x + d`.
pub fn cubic_discriminant(b: f64, c: f64, d: f64) -> f64 {
    18.0 * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * c.powi(3) - 27.0 * d * d
}

/// Roots of a monic cubic from its companion matrix.
pub fn cubic_roots(b: f64, c: f64, d: f64) -> Result<[C; 3], LinalgError> {
    // The nilpotent companion stalls the QR sweep.
    if b == 0.0 && c == 0.0 && d == 0.0 {
        return Ok([ZERO; 3]);
    }
    let comp = RMatrix::from_row_slice(3, 3, &[-b, -c, -d, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let r = linalg::real_eigenvalues(comp)?;
    Ok([r[0], r[1], r[2]])
}

/// Sign analysis of the real cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminant {
    /// Closed-form `Δ`.
    pub delta: f64,
    /// `Δ` from the generic cubic formula on the coefficients of `Q`.
    pub delta_from_coefficients: f64,
    /// `15625 k¹² ξ⁶ · 16 k⁸ (3a² + k⁴ξ²)`.
    pub leading: f64,
    pub roots: [C; 3],
    pub max_imag: f64,
    pub scale: f64,
    pub all_roots_real: bool,
}

impl Discriminant {
    /// The closed form and the companion roots reach the same conclusion.
    pub fn consistent(&self) -> bool {
        (self.delta > 0.0) == self.all_roots_real || self.delta == 0.0
    }

    pub fn ratio_to_leading(&self) -> f64 {
        self.delta / self.leading
    }
}

/// Root-reality threshold relative to the largest root modulus.
pub const ROOT_IMAG_TOL: f64 = 1e-10;

/// Closed-form `Δ` of the real cubic together with a companion-matrix oracle.
pub fn discriminant(a: f64, xi: f64, k: f64) -> Result<Discriminant, LinalgError> {
    let k4 = k.powi(4);
    let k8 = k4 * k4;
    let k12 = k8 * k4;
    let (a2, x2) = (a * a, xi * xi);
    let bracket = 108.0 * a2.powi(3) - 3231.0 * a2 * a2 * k4 + 48.0 * a2 * k8
        + 432.0 * a2 * a2 * k4 * x2
        - 1488.0 * a2 * k8 * x2
        + 16.0 * k12 * x2
        + 576.0 * a2 * k8 * x2 * x2
        - 128.0 * k12 * x2 * x2
        + 256.0 * k12 * x2.powi(3);
    let prefactor = 15625.0 * k12 * xi.powi(6);
    let [q2, q1, q0] = real_cubic(a, xi, k);
    let roots = cubic_roots(q2, q1, q0)?;
    let max_imag = roots.iter().fold(0.0_f64, |m, r| m.max(r.im.abs()));
    let scale = roots.iter().fold(0.0_f64, |m, r| m.max(r.norm()));
    Ok(Discriminant {
        delta: prefactor * bracket,
        delta_from_coefficients: cubic_discriminant(q2, q1, q0),
        leading: prefactor * 16.0 * k8 * (3.0 * a2 + k4 * x2),
        roots,
        max_imag,
        scale,
        all_roots_real: max_imag <= ROOT_IMAG_TOL * scale,
    })
}

/// Roots `λ = iμ` of the closed-form characteristic cubic.
pub fn closed_roots(a: f64, xi: f64, k: f64) -> Result<[C; 3], LinalgError> {
    let [q2, q1, q0] = real_cubic(a, xi, k);
    let mu = cubic_roots(q2, q1, q0)?;
    Ok([I * mu[0], I * mu[1], I * mu[2]])
}

/// Numerical reduced model at one `(a, ξ, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    pub a: f64,
    pub xi: f64,
    pub k: f64,
    pub n_max: usize,
    /// `⟨T φ_i, φ_j⟩`.
    pub b_num: Matrix3<C>,
    pub b_closed: Matrix3<C>,
    /// `⟨φ_i, φ_j⟩`.
    pub gram: Matrix3<C>,
    /// `B G⁻¹`: `T φ_i = Σ_j M_ij φ_j` on the invariant subspace.
    pub representation: Matrix3<C>,
    /// Eigenvalues of the full matrix inside `|λ| = R/3`.
    pub interior: Vec<C>,
    pub representation_eigenvalues: Vec<C>,
    pub b_num_eigenvalues: Vec<C>,
    pub cubic_num: [C; 3],
    pub cubic_closed: [C; 3],
    pub closed_roots: [C; 3],
    pub discriminant: Discriminant,
    pub projector_deviation: f64,
    pub intertwining_defect: f64,
}

impl ReducedModel {
    /// `‖B_num − B_closed‖₂`.
    pub fn b_error(&self) -> f64 {
        matrix3_norm(&(self.b_num - self.b_closed))
    }

    /// `‖B_numᵀ − B_closed‖₂`.
    pub fn b_error_transposed(&self) -> f64 {
        matrix3_norm(&(self.b_num.transpose() - self.b_closed))
    }

    /// Largest distance between interior eigenvalues and the roots of the
    /// closed-form cubic, by greedy pairing.
    pub fn root_error(&self) -> f64 {
        pairing_distance(&self.interior, &self.closed_roots)
    }

    /// Largest distance between interior eigenvalues and eigenvalues of `B G⁻¹`.
    pub fn representation_error(&self) -> f64 {
        pairing_distance(&self.interior, &self.representation_eigenvalues)
    }

    pub fn trace_defect(&self) -> f64 {
        let sum: C = self.interior.iter().sum();
        (self.representation.trace() - sum).norm()
    }
}

fn matrix3_norm(m: &Matrix3<C>) -> f64 {
    let dm = CMatrix::from_fn(3, 3, |i, j| m[(i, j)]);
    linalg::spectral_norm(&dm)
}

/// Greedy nearest pairing of `a` against `b`; returns the worst distance.
pub fn pairing_distance(a: &[C], b: &[C]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |m, c| if c.1 < m.1 { c } else { m });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn eig3(m: &Matrix3<C>) -> Result<Vec<C>, LinalgError> {
    linalg::complex_eigenvalues(CMatrix::from_fn(3, 3, |i, j| m[(i, j)]))
}

/// Builds the reduced model of `profile` at Floquet exponent `xi`.
pub fn reduced_matrix(
    profile: &WaveProfile,
    xi: f64,
    n_max: usize,
) -> Result<ReducedModel, ReducedError> {
    let m = bloch::assemble(profile, xi, n_max)?;
    let slice = m.eigenvalues()?;
    let interior = interior_eigenvalues(&slice, profile.k());
    if interior.len() != 3 {
        return Err(ReducedError::WrongRank {
            count: interior.len(),
        });
    }
    let proj = projector(&m, ProjectorMethod::Eigenbasis, DEFAULT_NODES)?;
    let basis = transported_basis(&proj.p)?;
    let b_num = reduced_matrix_of(&m, &basis.phi);
    let gram = gram_matrix(&basis.phi);
    let representation = b_num * gram.try_inverse().ok_or(LinalgError::Singular)?;
    let (a, k) = (profile.a(), profile.k());
    Ok(ReducedModel {
        a,
        xi,
        k,
        n_max,
        b_num,
        b_closed: b_closed(a, xi, k),
        gram,
        representation,
        representation_eigenvalues: eig3(&representation)?,
        b_num_eigenvalues: eig3(&b_num)?,
        interior,
        cubic_num: characteristic_cubic(&b_num),
        cubic_closed: closed_cubic(a, xi, k),
        closed_roots: closed_roots(a, xi, k)?,
        discriminant: discriminant(a, xi, k)?,
        projector_deviation: proj.deviation,
        intertwining_defect: basis.intertwining_defect,
    })
}

/// Least-squares slope of `log e` against `log s`.
pub fn loglog_slope(scales: &[f64], errors: &[f64]) -> f64 {
    let n = scales.len() as f64;
    let xs: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// One row of the scaling study at `(s a₀, s ξ₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub scale: f64,
    pub a: f64,
    pub xi: f64,
    pub b_error: f64,
    pub b_error_transposed: f64,
    pub root_error: f64,
    pub projector_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    pub rows: Vec<RegressionRow>,
    pub b_slope: f64,
    pub b_slope_transposed: f64,
    pub root_slope: f64,
    pub projector_slope: f64,
}

/// Default scale factors of the order study.
pub const REGRESSION_SCALES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

/// Reduced models along `(s a₀, s ξ₀)` with Newton profiles, and the fitted
/// orders of `‖B_num − B_closed‖`, the root error and `‖P − P₀₀‖`.
pub fn order_regression(
    a0: f64,
    xi0: f64,
    k: f64,
    n_max: usize,
    scales: &[f64],
) -> Result<Regression, ReducedError> {
    let mut rows = Vec::with_capacity(scales.len());
    for &s in scales {
        let (a, xi) = (s * a0, s * xi0);
        let prof = profile::newton_solve(a, k, profile::DEFAULT_N, 1e-13, None)?.profile;
        let model = reduced_matrix(&prof, xi, n_max)?;
        rows.push(RegressionRow {
            scale: s,
            a,
            xi,
            b_error: model.b_error(),
            b_error_transposed: model.b_error_transposed(),
            root_error: model.root_error(),
            projector_deviation: model.projector_deviation,
        });
    }
    let col = |f: fn(&RegressionRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    Ok(Regression {
        b_slope: loglog_slope(scales, &col(|r| r.b_error)),
        b_slope_transposed: loglog_slope(scales, &col(|r| r.b_error_transposed)),
        root_slope: loglog_slope(scales, &col(|r| r.root_error)),
        projector_slope: loglog_slope(scales, &col(|r| r.projector_deviation)),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Expansion checks at (a, ξ) = (0, 0).

/// Mode vector of `Σ (amp_c cos mz + amp_s sin mz)` on `|n| ≤ n_max`.
pub fn trig_vector(n_max: usize, terms: &[(usize, C, C)]) -> CVector {
    let mut v = CVector::zeros(2 * n_max + 1);
    for &(m, c, s) in terms {
        if m == 0 {
            v[n_max] += c;
        } else {
            v[n_max + m] += c / 2.0 - I * s / 2.0;
            v[n_max - m] += c / 2.0 + I * s / 2.0;
        }
    }
    v
}

/// Largest cosine/sine coefficient of the difference `u − v`.
pub fn coefficient_distance(u: &CVector, v: &CVector) -> f64 {
    let n = (u.len() - 1) / 2;
    let d = u - v;
    let mut worst = d[n].norm();
    for m in 1..=n {
        let (p, q) = (d[n + m], d[n - m]);
        worst = worst.max((p + q).norm()).max((I * (p - q)).norm());
    }
    worst
}

/// Truncation used by the expansion checks.
pub const EXPANSION_N: usize = 24;
/// Base step of the difference quotients.
pub const EXPANSION_STEP: f64 = 0.0025;

fn profile_at(a: f64, k: f64) -> Result<WaveProfile, ReducedError> {
    if a == 0.0 {
        return Ok(WaveProfile::trivial(k, 16)?);
    }
    Ok(profile::newton_solve(a, k, 16, 1e-14, None)?.profile)
}

/// Transported basis (and `P e_i`) at `(a, ξ)` on [`EXPANSION_N`] modes.
fn basis_at(a: f64, xi: f64, k: f64) -> Result<([CVector; 3], [CVector; 3]), ReducedError> {
    let m = bloch::assemble(&profile_at(a, k)?, xi, EXPANSION_N)?;
    let proj = projector(&m, ProjectorMethod::Eigenbasis, DEFAULT_NODES)?;
    Ok((transported_basis(&proj.p)?.phi, projected_basis(&proj.p)))
}

/// Taylor coefficients of the basis at the origin from Richardson-extrapolated
/// central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisExpansion {
    pub a: [CVector; 3],
    pub xi: [CVector; 3],
    pub a_xi: [CVector; 3],
    pub a2: [CVector; 3],
    pub xi2: [CVector; 3],
    /// `a²` coefficient of `P e_i` alone.
    pub a2_projected: [CVector; 3],
}

/// Richardson combination `(4 q(h) − q(2h)) / 3`.
fn richardson(fine: &CVector, coarse: &CVector) -> CVector {
    (fine * re(4.0) - coarse) / re(3.0)
}

pub fn basis_expansion(k: f64) -> Result<BasisExpansion, ReducedError> {
    let h = EXPANSION_STEP;
    let origin = basis_at(0.0, 0.0, k)?;
    let mut cache: Vec<((i32, i32), ([CVector; 3], [CVector; 3]))> = Vec::new();
    let mut at = |ia: i32, ix: i32| -> Result<([CVector; 3], [CVector; 3]), ReducedError> {
        if let Some((_, v)) = cache.iter().find(|(key, _)| *key == (ia, ix)) {
            return Ok(v.clone());
        }
        let v = basis_at(ia as f64 * h, ix as f64 * h, k)?;
        cache.push(((ia, ix), v.clone()));
        Ok(v)
    };
    let zero = || core::array::from_fn::<CVector, 3, _>(|_| CVector::zeros(2 * EXPANSION_N + 1));
    let (mut da, mut dx, mut dax, mut da2, mut dx2, mut da2p) =
        (zero(), zero(), zero(), zero(), zero(), zero());
    for i in 0..3 {
        // q(step) evaluated at step multiples j = 1, 2.
        let mut first_a = Vec::new();
        let mut first_x = Vec::new();
        let mut second_a = Vec::new();
        let mut second_x = Vec::new();
        let mut mixed = Vec::new();
        let mut second_ap = Vec::new();
        for j in [1, 2] {
            let s = j as f64 * h;
            let (pa, ppa) = at(j, 0)?;
            let (ma, mpa) = at(-j, 0)?;
            let (px, _) = at(0, j)?;
            let (mx, _) = at(0, -j)?;
            let (pp, _) = at(j, j)?;
            let (pm, _) = at(j, -j)?;
            let (mp, _) = at(-j, j)?;
            let (mm, _) = at(-j, -j)?;
            first_a.push((&pa[i] - &ma[i]) / re(2.0 * s));
            first_x.push((&px[i] - &mx[i]) / re(2.0 * s));
            second_a.push((&pa[i] - &origin.0[i] * re(2.0) + &ma[i]) / re(2.0 * s * s));
            second_x.push((&px[i] - &origin.0[i] * re(2.0) + &mx[i]) / re(2.0 * s * s));
            second_ap.push((&ppa[i] - &origin.1[i] * re(2.0) + &mpa[i]) / re(2.0 * s * s));
            mixed.push((&pp[i] - &pm[i] - &mp[i] + &mm[i]) / re(4.0 * s * s));
        }
        da[i] = richardson(&first_a[0], &first_a[1]);
        dx[i] = richardson(&first_x[0], &first_x[1]);
        da2[i] = richardson(&second_a[0], &second_a[1]);
        dx2[i] = richardson(&second_x[0], &second_x[1]);
        dax[i] = richardson(&mixed[0], &mixed[1]);
        da2p[i] = richardson(&second_ap[0], &second_ap[1]);
    }
    Ok(BasisExpansion {
        a: da,
        xi: dx,
        a_xi: dax,
        a2: da2,
        xi2: dx2,
        a2_projected: da2p,
    })
}

/// Expansion coefficients of the basis listed in closed form.
pub fn closed_basis_expansion(k: f64, n_max: usize) -> BasisExpansion {
    let k2 = k * k;
    let k4 = k2 * k2;
    let z = CVector::zeros(2 * n_max + 1);
    let tv = |terms: &[(usize, C, C)]| trig_vector(n_max, terms);
    let a = [
        tv(&[(2, re(1.0 / k2), ZERO)]),
        tv(&[(2, ZERO, re(1.0 / k2))]),
        z.clone(),
    ];
    let a_xi = [
        tv(&[(2, ZERO, C::new(0.0, -1.0 / k2))]),
        tv(&[(2, C::new(0.0, 1.0 / k2), ZERO)]),
        z.clone(),
    ];
    let a2 = [
        tv(&[(1, re(-20.0 / (16.0 * k4)), ZERO), (3, re(9.0 / (16.0 * k4)), ZERO)]),
        tv(&[(1, ZERO, re(-20.0 / (16.0 * k4))), (3, ZERO, re(9.0 / (16.0 * k4)))]),
        z.clone(),
    ];
    let zeros = || [z.clone(), z.clone(), z.clone()];
    BasisExpansion {
        a,
        xi: zeros(),
        a_xi,
        a2: a2.clone(),
        xi2: zeros(),
        a2_projected: a2,
    }
}

/// One named coefficient comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientCheck {
    pub name: String,
    pub error: f64,
}

/// Compares numerical and closed-form basis coefficients; one entry per
/// basis function and order.
pub fn compare_expansions(num: &BasisExpansion, closed: &BasisExpansion) -> Vec<CoefficientCheck> {
    let mut out = Vec::new();
    let orders: [(&str, &[CVector; 3], &[CVector; 3]); 6] = [
        ("a", &num.a, &closed.a),
        ("xi", &num.xi, &closed.xi),
        ("a*xi", &num.a_xi, &closed.a_xi),
        ("a^2", &num.a2, &closed.a2),
        ("xi^2", &num.xi2, &closed.xi2),
        ("a^2 (P e_i only)", &num.a2_projected, &closed.a2_projected),
    ];
    for (name, u, v) in orders {
        for i in 0..3 {
            out.push(CoefficientCheck {
                name: alloc::format!("phi{} {}", i + 1, name),
                error: coefficient_distance(&u[i], &v[i]),
            });
        }
    }
    out
}

/// Convolution-multiplication matrix of `f` (function of z) on `|n| ≤ n_max`.
fn multiplication(n_max: usize, f: &CVector) -> CMatrix {
    let nf = (f.len() - 1) / 2;
    let dim = 2 * n_max + 1;
    CMatrix::from_fn(dim, dim, |i, j| {
        let d = i as i64 - j as i64;
        if d.unsigned_abs() as usize <= nf {
            f[(d + nf as i64) as usize]
        } else {
            ZERO
        }
    })
}

/// `diag((in)^p)`.
fn derivative(n_max: usize, p: u32) -> CMatrix {
    let dim = 2 * n_max + 1;
    CMatrix::from_diagonal(&CVector::from_fn(dim, |j, _| {
        C::new(0.0, j as f64 - n_max as f64).powu(p)
    }))
}

/// Closed-form derivatives of `T_{a,ξ}` at the origin. `T''` and `T̈` are
/// given as Taylor coefficients (half the second derivative).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDerivatives {
    pub t_a: CMatrix,
    pub t_xi: CMatrix,
    pub t_a_xi: CMatrix,
    pub t_aa_half: CMatrix,
    pub t_xixi_half: CMatrix,
}

pub fn closed_form_derivatives(k: f64, n_max: usize) -> OperatorDerivatives {
    let k2 = k * k;
    let k4 = k2 * k2;
    let dim = 2 * n_max + 1;
    let eye = CMatrix::identity(dim, dim);
    let d1 = derivative(n_max, 1);
    let d2 = derivative(n_max, 2);
    let d3 = derivative(n_max, 3);
    let d4 = derivative(n_max, 4);
    let cos = multiplication(n_max, &trig_vector(1, &[(1, re(1.0), ZERO)]));
    let sin = multiplication(n_max, &trig_vector(1, &[(1, ZERO, re(1.0))]));
    let cos2 = multiplication(n_max, &trig_vector(2, &[(2, re(1.0), ZERO)]));
    let t_a = &d1 * &cos * (&d2 - &eye) * re(-15.0 * k2);
    let t_xi = (&eye - &d4 * re(5.0)) * C::new(0.0, k4);
    let t_a_xi = (&cos * &d2 * re(3.0) - &sin * &d1 * re(2.0) - &cos) * C::new(0.0, -15.0 * k2);
    let t_aa_half = &d1 * (&eye * re(11.0) + &d2 * re(15.0) - &cos2 * (&d2 - &eye)) * re(7.5);
    let t_xixi_half = &d3 * re(10.0 * k4);
    OperatorDerivatives {
        t_a,
        t_xi,
        t_a_xi,
        t_aa_half,
        t_xixi_half,
    }
}

/// Finite-difference derivatives of the assembled matrix along the
/// closed-form profile family `w(a)` of order 3, `c = k⁴ + 105a²`.
pub fn finite_difference_derivatives(
    k: f64,
    n_max: usize,
    step: f64,
) -> Result<OperatorDerivatives, ReducedError> {
    let t = |a: f64, xi: f64| -> Result<CMatrix, ReducedError> {
        let p = profile::asymptotic_profile(a, k, 3, n_max)?;
        Ok(bloch::assemble(&p, xi, n_max)?.entries())
    };
    let t0 = t(0.0, 0.0)?;
    let first = |h: f64, along_a: bool| -> Result<CMatrix, ReducedError> {
        let (p, m) = if along_a {
            (t(h, 0.0)?, t(-h, 0.0)?)
        } else {
            (t(0.0, h)?, t(0.0, -h)?)
        };
        Ok((p - m) / re(2.0 * h))
    };
    let second_half = |h: f64, along_a: bool| -> Result<CMatrix, ReducedError> {
        let (p, m) = if along_a {
            (t(h, 0.0)?, t(-h, 0.0)?)
        } else {
            (t(0.0, h)?, t(0.0, -h)?)
        };
        Ok((p - &t0 * re(2.0) + m) / re(2.0 * h * h))
    };
    let mixed = |h: f64| -> Result<CMatrix, ReducedError> {
        Ok((t(h, h)? - t(h, -h)? - t(-h, h)? + t(-h, -h)?) / re(4.0 * h * h))
    };
    let rich = |f: CMatrix, c: CMatrix| (f * re(4.0) - c) / re(3.0);
    Ok(OperatorDerivatives {
        t_a: rich(first(step, true)?, first(2.0 * step, true)?),
        t_xi: rich(first(step, false)?, first(2.0 * step, false)?),
        t_a_xi: rich(mixed(step)?, mixed(2.0 * step)?),
        t_aa_half: rich(second_half(step, true)?, second_half(2.0 * step, true)?),
        t_xixi_half: rich(second_half(step, false)?, second_half(2.0 * step, false)?),
    })
}

/// Outcome of the appendix-level checks.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixReport {
    /// `(name, max |FD − closed form| / max(1, max |closed form|))`.
    pub derivatives: Vec<(String, f64)>,
    /// Largest error of the 2×2 resolvent formula on `cos nz`, `sin nz`.
    pub resolvent_error: f64,
    /// Largest error of `T₀₀ cos nz = −ω sin nz`, `T₀₀ sin nz = ω cos nz`.
    pub flat_action_error: f64,
    /// `‖P' cos z − cos 2z / k²‖` from the contour integral.
    pub phi1_a_error: f64,
}

/// Step of the operator finite differences.
pub const DERIVATIVE_STEP: f64 = 1e-4;
/// Second-order agreement required by the operator checks.
pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const RESOLVENT_TOL: f64 = 1e-10;

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.derivatives.iter().all(|(_, e)| *e <= DERIVATIVE_TOL)
            && self.resolvent_error <= RESOLVENT_TOL
            && self.flat_action_error <= RESOLVENT_TOL
            && self.phi1_a_error <= DERIVATIVE_TOL
    }
}

pub fn appendix_derivative_checks(k: f64, n_max: usize) -> Result<AppendixReport, ReducedError> {
    let closed = closed_form_derivatives(k, n_max);
    let fd = finite_difference_derivatives(k, n_max, DERIVATIVE_STEP)?;
    let rel = |x: &CMatrix, y: &CMatrix| {
        (x - y).iter().fold(0.0_f64, |m, v| m.max(v.norm()))
            / y.iter().fold(1.0_f64, |m, v| m.max(v.norm()))
    };
    let derivatives = vec![
        (String::from("T'"), rel(&fd.t_a, &closed.t_a)),
        (String::from("T_xi"), rel(&fd.t_xi, &closed.t_xi)),
        (String::from("T'_xi"), rel(&fd.t_a_xi, &closed.t_a_xi)),
        (String::from("T''/2"), rel(&fd.t_aa_half, &closed.t_aa_half)),
        (String::from("T_xixi/2"), rel(&fd.t_xixi_half, &closed.t_xixi_half)),
    ];

    let flat = WaveProfile::trivial(k, n_max)?;
    let t00 = bloch::assemble(&flat, 0.0, n_max)?.entries();
    let dim = 2 * n_max + 1;
    let mut resolvent_error = 0.0_f64;
    let mut flat_action_error = 0.0_f64;
    let r = contour_radius(k);
    let mut samples: Vec<C> = (0..8)
        .map(|j| C::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / 8.0))
        .collect();
    samples.push(C::new(0.0, 2.0 * k.powi(4)));
    for m in 1..=n_max.min(6) {
        let w = bloch::flat_symbol(m as i64, 0.0, k);
        let cos = trig_vector(n_max, &[(m, re(1.0), ZERO)]);
        let sin = trig_vector(n_max, &[(m, ZERO, re(1.0))]);
        flat_action_error = flat_action_error
            .max(coefficient_distance(&(&t00 * &cos), &(&sin * re(-w))))
            .max(coefficient_distance(&(&t00 * &sin), &(&cos * re(w))));
        for &l in &samples {
            let inv = linalg::inverse(&t00 - CMatrix::identity(dim, dim) * l)?;
            let den = re(w * w) + l * l;
            let want_c = trig_vector(n_max, &[(m, -l / den, re(w) / den)]);
            let w_neg = bloch::flat_symbol(-(m as i64), 0.0, k);
            let want_s = trig_vector(n_max, &[(m, re(w_neg) / den, -l / den)]);
            resolvent_error = resolvent_error
                .max(coefficient_distance(&(&inv * &cos), &want_c))
                .max(coefficient_distance(&(&inv * &sin), &want_s));
        }
    }

    // P' = (1/2πi)∮ (T − λ)⁻¹ T' (T − λ)⁻¹ dλ applied to cos z.
    let nodes = 2 * DEFAULT_NODES;
    let cos1 = trig_vector(n_max, &[(1, re(1.0), ZERO)]);
    let mut acc = CVector::zeros(dim);
    for j in 0..nodes {
        let l = C::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / nodes as f64);
        let inv = linalg::inverse(&t00 - CMatrix::identity(dim, dim) * l)?;
        acc += &inv * (&closed.t_a * (&inv * &cos1)) * (l / re(nodes as f64));
    }
    let want = trig_vector(n_max, &[(2, re(1.0 / (k * k)), ZERO)]);
    let phi1_a_error = coefficient_distance(&acc, &want);

    Ok(AppendixReport {
        derivatives,
        resolvent_error,
        flat_action_error,
        phi1_a_error,
    })
}
