//! Symplectic linear algebra on `R^{2N}` with coordinates ordered
//! `(x_1..x_N, p_1..p_N)`.
//!
//! The standard form is `J = [[0, I], [-I, 0]]` and the symplectic product is
//! `σ(z, z') = z'ᵀ J z = p·x' − p'·x`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Real, Result};

/// Relative residual accepted for Williamson reconstructions in `f64`.
pub const WILLIAMSON_TOL: f64 = 1e-9;
/// Smallest eigenvalue of an accepted positive-definite matrix, relative to
/// its largest eigenvalue.
pub const PD_RELATIVE_TOL: f64 = 1e-12;

/// Number of degrees of freedom and the value of ħ used by every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceContext<T> {
    dof: usize,
    hbar: T,
}

impl<T: Real> PhaseSpaceContext<T> {
    pub fn new(dof: usize, hbar: T) -> Result<Self> {
        if dof == 0 {
            return Err(Error::InvalidParameter("degrees of freedom must be at least 1".into()));
        }
        if !(hbar > T::zero()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { dof, hbar })
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// Phase-space dimension `2N`.
    pub fn dim(&self) -> usize {
        2 * self.dof
    }

    pub fn with_hbar(&self, hbar: T) -> Result<Self> {
        Self::new(self.dof, hbar)
    }
}

/// A point `z = (x, p)` of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpacePoint<T: Real> {
    coords: DVector<T>,
}

impl<T: Real> PhaseSpacePoint<T> {
    pub fn new(coords: DVector<T>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "phase-space points need an even, non-zero length, got {}",
                coords.len()
            )));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[T]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn origin(dof: usize) -> Self {
        Self { coords: DVector::zeros(2 * dof) }
    }

    pub fn dof(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &DVector<T> {
        &self.coords
    }

    pub fn x(&self) -> &[T] {
        &self.coords.as_slice()[..self.dof()]
    }

    pub fn p(&self) -> &[T] {
        &self.coords.as_slice()[self.dof()..]
    }
}

/// `J = [[0, I], [-I, 0]]` for `dof` degrees of freedom.
pub fn standard_form<T: Real>(dof: usize) -> DMatrix<T> {
    let mut j = DMatrix::zeros(2 * dof, 2 * dof);
    for k in 0..dof {
        j[(k, dof + k)] = T::one();
        j[(dof + k, k)] = -T::one();
    }
    j
}

/// `σ(z, z2) = z2ᵀ J z = p·x2 − p2·x`.
pub fn symplectic_product<T: Real>(
    z: &PhaseSpacePoint<T>,
    z2: &PhaseSpacePoint<T>,
    ctx: &PhaseSpaceContext<T>,
) -> Result<T> {
    for pt in [z, z2] {
        if pt.coords.len() != ctx.dim() {
            return Err(Error::DimensionMismatch { expected: ctx.dim(), got: pt.coords.len() });
        }
    }
    Ok(sigma(z.coords.as_slice(), z2.coords.as_slice()))
}

/// Unchecked symplectic product on raw coordinate slices of equal even length.
pub(crate) fn sigma<T: Real>(z: &[T], z2: &[T]) -> T {
    let n = z.len() / 2;
    (0..n).fold(T::zero(), |acc, k| acc + z[n + k] * z2[k] - z2[n + k] * z[k])
}

pub(crate) fn check_phase_space_matrix<T: Real>(m: &DMatrix<T>) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 || rows % 2 != 0 {
        return Err(Error::NotPhaseSpaceMatrix { rows, cols });
    }
    Ok(rows / 2)
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
}

/// True iff `‖SᵀJS − J‖∞ ≤ tol` (largest absolute entry).
pub fn is_symplectic<T: Real>(s: &DMatrix<T>, tol: T) -> Result<bool> {
    Ok(symplectic_residual(s)? <= tol)
}

/// `‖SᵀJS − J‖∞`.
pub fn symplectic_residual<T: Real>(s: &DMatrix<T>) -> Result<T> {
    let dof = check_phase_space_matrix(s)?;
    let j = standard_form::<T>(dof);
    Ok(max_abs(&(s.transpose() * &j * s - j)))
}

/// A `2N×2N` matrix satisfying `SᵀJS = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Real> {
    entries: DMatrix<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    pub fn try_new(entries: DMatrix<T>, tol: T) -> Result<Self> {
        let residual = symplectic_residual(&entries)?;
        if residual > tol {
            return Err(Error::InvalidParameter(format!("matrix is not symplectic: ‖SᵀJS − J‖∞ = {residual}")));
        }
        Ok(Self { entries })
    }

    pub(crate) fn new_unchecked(entries: DMatrix<T>) -> Self {
        Self { entries }
    }

    pub fn identity(dof: usize) -> Self {
        Self { entries: DMatrix::identity(2 * dof, 2 * dof) }
    }

    pub fn dof(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.entries
    }

    /// `S⁻¹ = −J Sᵀ J`, exact for symplectic `S`.
    pub fn inverse(&self) -> Self {
        let j = standard_form::<T>(self.dof());
        Self { entries: -(&j * self.entries.transpose() * &j) }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { entries: &self.entries * &other.entries }
    }

    pub fn residual(&self) -> T {
        symplectic_residual(&self.entries).expect("shape checked at construction")
    }

    pub fn determinant(&self) -> T {
        self.entries.clone().determinant()
    }
}

/// Symplectic spectrum `μ_1 ≥ … ≥ μ_N > 0` of a positive-definite matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SymplecticSpectrum<T> {
    values: Vec<T>,
}

impl<T: Real> SymplecticSpectrum<T> {
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::InvalidParameter("symplectic eigenvalues must be positive".into()));
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Largest value `μ_1`.
    pub fn max(&self) -> T {
        self.values[0]
    }

    /// Smallest value `μ_N`.
    pub fn min(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { values: self.values.iter().map(|v| *v * factor).collect() }
    }
}

/// `M = SᵀDS` with `D = diag(Λ, Λ)`.
#[derive(Debug, Clone)]
pub struct WilliamsonFactorization<T: Real> {
    pub s: SymplecticMatrix<T>,
    pub lambda: SymplecticSpectrum<T>,
    /// `‖SᵀDS − M‖_F / ‖M‖_F`.
    pub reconstruction_residual: T,
    /// `‖SᵀJS − J‖∞`.
    pub symplectic_residual: T,
}

impl<T: Real> WilliamsonFactorization<T> {
    /// `diag(Λ, Λ)`.
    pub fn diagonal(&self) -> DMatrix<T> {
        let n = self.lambda.len();
        DMatrix::from_fn(2 * n, 2 * n, |r, c| if r == c { self.lambda.values()[r % n] } else { T::zero() })
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        let s = self.s.matrix();
        s.transpose() * self.diagonal() * s
    }
}

/// Checks symmetry and positive definiteness, returning the eigensystem.
pub(crate) fn spd_eigen<T: Real>(m: &DMatrix<T>) -> Result<SymmetricEigen<T, nalgebra::Dyn>> {
    check_phase_space_matrix(m)?;
    let scale = max_abs(m);
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::NotPositiveDefinite("zero or non-finite matrix".into()));
    }
    let asym = max_abs(&(m - m.transpose()));
    if asym > T::tolerance(PD_RELATIVE_TOL) * scale {
        return Err(Error::NotPositiveDefinite(format!("asymmetry {asym}")));
    }
    let sym = (m + m.transpose()) * T::lit(0.5);
    let eig = sym.symmetric_eigen();
    let hi = eig.eigenvalues.max();
    let lo = eig.eigenvalues.min();
    if !(lo > T::tolerance(PD_RELATIVE_TOL) * hi) {
        return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {lo} against largest {hi}")));
    }
    Ok(eig)
}

fn sqrt_from_eigen<T: Real>(eig: &SymmetricEigen<T, nalgebra::Dyn>) -> DMatrix<T> {
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt()));
    v * d * v.transpose()
}

type HermitianForm<T> = (DMatrix<T>, SymmetricEigen<Complex<T>, nalgebra::Dyn>, Vec<usize>);

/// Eigen-decomposition of the Hermitian matrix `i·KJK` with `K = M^{1/2}`.
/// Its eigenvalues are `±μ_j`; the returned indices list the positive half in
/// descending order.
fn hermitian_form<T: Real>(m: &DMatrix<T>) -> Result<HermitianForm<T>> {
    let eig = spd_eigen(m)?;
    let dof = m.nrows() / 2;
    let k = sqrt_from_eigen(&eig);
    let skew = &k * standard_form::<T>(dof) * &k;
    let h = skew.map(|v| Complex::new(T::zero(), v));
    let heig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..2 * dof).collect();
    order.sort_by(|&a, &b| heig.eigenvalues[b].partial_cmp(&heig.eigenvalues[a]).expect("finite eigenvalues"));
    order.truncate(dof);
    Ok((k, heig, order))
}

/// Symplectic spectrum of a symmetric positive-definite matrix: the moduli of
/// the eigenvalues `±iμ_j` of `JM`, sorted descending.
pub fn symplectic_spectrum<T: Real>(m: &DMatrix<T>) -> Result<SymplecticSpectrum<T>> {
    let (_, heig, order) = hermitian_form(m)?;
    SymplecticSpectrum::new(order.iter().map(|&i| heig.eigenvalues[i]).collect())
}

/// Williamson normal form `M = SᵀDS`.
///
/// With `K = M^{1/2}` and an orthogonal `O` bringing the skew matrix `KJK`
/// to `[[0, Λ], [−Λ, 0]]`, the factor is `S = D^{-1/2} Oᵀ K`. The columns of
/// `O` are read off the eigenvectors `v = a + ib` of `i·KJK` for `+μ_j`:
/// `√2·b` fills slot `j` and `√2·a` slot `N + j`.
pub fn williamson<T: Real>(m: &DMatrix<T>) -> Result<WilliamsonFactorization<T>> {
    let (k, heig, order) = hermitian_form(m)?;
    let dof = m.nrows() / 2;
    let sqrt2 = T::lit(2.0).sqrt();
    let mut o = DMatrix::<T>::zeros(2 * dof, 2 * dof);
    let mut mus = Vec::with_capacity(dof);
    for (slot, &idx) in order.iter().enumerate() {
        let mu = heig.eigenvalues[idx];
        if !(mu > T::zero()) {
            return Err(Error::NotPositiveDefinite("non-positive symplectic eigenvalue".into()));
        }
        mus.push(mu);
        let v = heig.eigenvectors.column(idx);
        for r in 0..2 * dof {
            o[(r, slot)] = v[r].im * sqrt2;
            o[(r, dof + slot)] = v[r].re * sqrt2;
        }
    }
    let mut s = o.transpose() * k;
    for (slot, mu) in mus.iter().enumerate() {
        let f = T::one() / mu.sqrt();
        s.row_mut(slot).scale_mut(f);
        s.row_mut(dof + slot).scale_mut(f);
    }
    let fact = WilliamsonFactorization {
        s: SymplecticMatrix::new_unchecked(s),
        lambda: SymplecticSpectrum::new(mus)?,
        reconstruction_residual: T::zero(),
        symplectic_residual: T::zero(),
    };
    let recon = (fact.reconstruct() - m).norm() / m.norm();
    let sres = fact.s.residual();
    let tol = T::tolerance(WILLIAMSON_TOL);
    let scale = max_abs(fact.s.matrix()).powi(2).max(T::one());
    if recon > tol || sres > tol * scale {
        return Err(Error::Convergence { residual: recon.max(sres).to_f64(), tolerance: tol.to_f64() });
    }
    Ok(WilliamsonFactorization { reconstruction_residual: recon, symplectic_residual: sres, ..fact })
}

/// Deterministic pseudo-random symplectic matrix `exp(JH₁)·exp(JH₂)` with
/// `H₁`, `H₂` random symmetric.
pub fn random_symplectic(seed: u64, dof: usize) -> Result<SymplecticMatrix<f64>> {
    if dof == 0 {
        return Err(Error::InvalidParameter("degrees of freedom must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.4).expect("valid normal");
    let j = standard_form::<f64>(dof);
    let mut factor = || {
        let mut h = DMatrix::<f64>::zeros(2 * dof, 2 * dof);
        for r in 0..2 * dof {
            for c in r..2 * dof {
                let v = normal.sample(&mut rng);
                h[(r, c)] = v;
                h[(c, r)] = v;
            }
        }
        (&j * h).exp()
    };
    let s = factor() * factor();
    Ok(SymplecticMatrix::new_unchecked(s))
}

/// Random symmetric positive-definite matrix `AAᵀ + δI` with entries of `A`
/// standard normal, used by the randomized suites.
pub fn random_spd(rng: &mut impl rand::Rng, dim: usize, shift: f64) -> DMatrix<f64> {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let a = DMatrix::<f64>::from_fn(dim, dim, |_, _| normal.sample(rng));
    let m = &a * a.transpose() + DMatrix::identity(dim, dim) * shift;
    (&m + m.transpose()) * 0.5
}
