//! Phase-space ellipsoids `B_M = {z : Mz·z ≤ ħ}`, their symplectic capacity
//! `πħ/μ₁`, and quantum blobs (symplectic images of the ball of radius √ħ).
//!
//! `B_M` is admissible, i.e. contains a quantum blob, iff `μ₁ ≤ 1`, which
//! is the uncertainty condition on `Σ = (ħ/2)M⁻¹`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::symplectic::{check_phase_space_matrix, max_abs, symplectic_spectrum, williamson};
use crate::{Error, PhaseSpaceContext, PhaseSpacePoint, Real, Result, SymplecticMatrix, SymplecticSpectrum};

/// Relative tolerance for admissibility and containment.
pub const ADMISSIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec<T: Real> {
    m: DMatrix<T>,
    ctx: PhaseSpaceContext<T>,
    spectrum: SymplecticSpectrum<T>,
}

impl<T: Real> EllipsoidSpec<T> {
    pub fn new(m: DMatrix<T>, ctx: PhaseSpaceContext<T>) -> Result<Self> {
        let dof = check_phase_space_matrix(&m)?;
        if dof != ctx.dof() {
            return Err(Error::DimensionMismatch { expected: ctx.dim(), got: m.nrows() });
        }
        let asym = max_abs(&(&m - m.transpose()));
        if asym > T::tolerance(1e-12) * max_abs(&m).max(T::one()) {
            return Err(Error::InvalidParameter(format!("ellipsoid matrix is not symmetric ({asym})")));
        }
        let m = (&m + m.transpose()) * T::lit(0.5);
        let spectrum = symplectic_spectrum(&m)?;
        Ok(Self { m, ctx, spectrum })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn ctx(&self) -> &PhaseSpaceContext<T> {
        &self.ctx
    }

    pub fn spectrum(&self) -> &SymplecticSpectrum<T> {
        &self.spectrum
    }

    pub fn mu1(&self) -> T {
        self.spectrum.max()
    }

    /// `πħ/μ₁`.
    pub fn capacity(&self) -> T {
        T::pi() * self.ctx.hbar() / self.mu1()
    }

    /// `μ₁ ≤ 1 + tol`, i.e. capacity at least `½h` up to rounding.
    pub fn is_admissible(&self) -> bool {
        self.mu1() <= T::one() + T::tolerance(ADMISSIBILITY_TOL)
    }

    /// Area of the central section by the `(x_j, p_j)` plane (0-based `j`):
    /// `πħ/√det M_j` with `M_j` the 2×2 block on indices `j`, `N+j`.
    pub fn section_area(&self, j: usize) -> Result<T> {
        let n = self.ctx.dof();
        if j >= n {
            return Err(Error::InvalidParameter(format!("section index {j} out of range for {n} degrees of freedom")));
        }
        let (a, b, c) = (self.m[(j, j)], self.m[(j, n + j)], self.m[(n + j, n + j)]);
        Ok(T::pi() * self.ctx.hbar() / (a * c - b * b).sqrt())
    }

    /// Area of the orthogonal projection onto the `(x_j, p_j)` plane:
    /// `πħ√det (M⁻¹)_j`. At least `πħ` for admissible ellipsoids. Central
    /// sections carry no such bound once `N ≥ 2`.
    pub fn projection_area(&self, j: usize) -> Result<T> {
        let n = self.ctx.dof();
        if j >= n {
            return Err(Error::InvalidParameter(format!(
                "projection index {j} out of range for {n} degrees of freedom"
            )));
        }
        let inv = self
            .m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite("singular ellipsoid matrix".into()))?;
        let (a, b, c) = (inv[(j, j)], inv[(j, n + j)], inv[(n + j, n + j)]);
        Ok(T::pi() * self.ctx.hbar() * (a * c - b * b).sqrt())
    }

    /// `λ²M`, the image of `B_M` under `z ↦ z/λ`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Self::new(&self.m * (lambda * lambda), self.ctx)
    }

    /// Image under a symplectic map `S`: the matrix `S^{-T} M S^{-1}`.
    pub fn transformed(&self, s: &SymplecticMatrix<T>) -> Result<Self> {
        let inv = s.inverse();
        Self::new(inv.matrix().transpose() * &self.m * inv.matrix(), self.ctx)
    }

    /// Smallest eigenvalue of `M_inner − M`; `inner ⊆ self` iff it is
    /// non-negative.
    pub fn containment_margin(&self, inner: &Self) -> Result<T> {
        if inner.m.shape() != self.m.shape() {
            return Err(Error::DimensionMismatch { expected: self.m.nrows(), got: inner.m.nrows() });
        }
        Ok(SymmetricEigen::new(&inner.m - &self.m).eigenvalues.min())
    }

    pub fn contains(&self, inner: &Self) -> Result<bool> {
        let band = T::tolerance(ADMISSIBILITY_TOL) * self.m.norm().max(inner.m.norm());
        Ok(self.containment_margin(inner)? >= -band)
    }
}

impl<T: Real> Serialize for EllipsoidSpec<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Rows<'a, T: Real>(&'a DMatrix<T>);
        impl<T: Real> Serialize for Rows<'_, T> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                crate::json::rows(self.0, s)
            }
        }
        let mut st = s.serialize_struct("EllipsoidSpec", 5)?;
        st.serialize_field("m", &Rows(&self.m))?;
        st.serialize_field("hbar", &self.ctx.hbar().to_f64())?;
        st.serialize_field("mu1", &self.mu1().to_f64())?;
        st.serialize_field("capacity", &self.capacity().to_f64())?;
        st.serialize_field("admissible", &self.is_admissible())?;
        st.end()
    }
}

pub fn capacity<T: Real>(e: &EllipsoidSpec<T>) -> T {
    e.capacity()
}

pub fn is_admissible<T: Real>(e: &EllipsoidSpec<T>) -> bool {
    e.is_admissible()
}

/// `center + S·B(√ħ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec<T: Real> {
    s: SymplecticMatrix<T>,
    center: PhaseSpacePoint<T>,
    ctx: PhaseSpaceContext<T>,
}

impl<T: Real> BlobSpec<T> {
    pub fn symplectic(&self) -> &SymplecticMatrix<T> {
        &self.s
    }

    pub fn center(&self) -> &PhaseSpacePoint<T> {
        &self.center
    }

    /// Ellipsoid matrix `(SSᵀ)⁻¹ = S^{-T}S^{-1}`, symplectic spectrum all ones.
    pub fn ellipsoid(&self) -> Result<EllipsoidSpec<T>> {
        let inv = self.s.inverse();
        EllipsoidSpec::new(inv.matrix().transpose() * inv.matrix(), self.ctx)
    }
}

pub fn quantum_blob<T: Real>(
    s: &SymplecticMatrix<T>,
    center: PhaseSpacePoint<T>,
    ctx: PhaseSpaceContext<T>,
) -> Result<(BlobSpec<T>, EllipsoidSpec<T>)> {
    if s.dof() != ctx.dof() {
        return Err(Error::DimensionMismatch { expected: ctx.dim(), got: 2 * s.dof() });
    }
    if center.dof() != ctx.dof() {
        return Err(Error::DimensionMismatch { expected: ctx.dim(), got: 2 * center.dof() });
    }
    let blob = BlobSpec { s: s.clone(), center, ctx };
    let e = blob.ellipsoid()?;
    Ok((blob, e))
}

/// A quantum blob inside an admissible ellipsoid.
#[derive(Debug, Clone)]
pub struct ContainedBlob<T: Real> {
    pub blob: BlobSpec<T>,
    /// Smallest eigenvalue of `S₀ᵀS₀ − M`; non-negative for containment.
    pub residual: T,
}

/// For `M = S₀ᵀDS₀` (Williamson) with `D ⪯ I`, the blob `S₀⁻¹B(√ħ)` has
/// matrix `S₀ᵀS₀ ⪰ M` and so lies inside `B_M`. The blob is returned with
/// its symmetric generator `(S₀ᵀS₀)^{-1/2}`, which removes the rotational
/// freedom in `S₀`.
pub fn find_contained_blob<T: Real>(e: &EllipsoidSpec<T>) -> Result<ContainedBlob<T>> {
    if !e.is_admissible() {
        return Err(Error::NotAdmissible { mu1: e.mu1().to_f64() });
    }
    let w = williamson(&e.m)?;
    let s0 = w.s.matrix();
    let gram = s0.transpose() * s0;
    let residual = SymmetricEigen::new(&gram - &e.m).eigenvalues.min();
    let eig = SymmetricEigen::new(gram);
    let inv_root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| T::one() / v.sqrt()))
        * eig.eigenvectors.transpose();
    let inv_root = (&inv_root + inv_root.transpose()) * T::lit(0.5);
    let s = SymplecticMatrix::try_new(inv_root, T::tolerance(1e-8) * max_abs(s0).powi(2).max(T::one()))?;
    let blob = BlobSpec { s, center: PhaseSpacePoint::origin(e.ctx.dof()), ctx: e.ctx };
    Ok(ContainedBlob { blob, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{random_spd, random_symplectic};
    use crate::uncertainty::{check_quantum_psd, CovarianceMatrix};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ell(diag: &[f64]) -> EllipsoidSpec<f64> {
        let ctx = PhaseSpaceContext::new(diag.len() / 2, 1.0).unwrap();
        EllipsoidSpec::new(DMatrix::from_diagonal(&DVector::from_row_slice(diag)), ctx).unwrap()
    }

    /// Random PD matrix rescaled so that μ₁ is spread around one.
    fn random_ellipsoid(rng: &mut ChaCha8Rng, dof: usize) -> EllipsoidSpec<f64> {
        let a = random_spd(rng, 2 * dof, 0.1);
        let mu = symplectic_spectrum(&a).unwrap().max();
        let k: f64 = rng.random_range(0.3..3.0);
        EllipsoidSpec::new(a * (k / mu), PhaseSpaceContext::new(dof, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn capacity_examples() {
        assert!((ell(&[1.0, 1.0]).capacity() - PI).abs() < 1e-12);
        assert!((ell(&[4.0, 1.0]).capacity() - PI / 2.0).abs() < 1e-12);
        assert!(ell(&[1.0, 1.0]).is_admissible());
        assert!(!ell(&[2.0, 2.0]).is_admissible());
        assert!(ell(&[4.0, 1.0 / 9.0]).is_admissible());
        assert!((ell(&[4.0, 1.0 / 9.0]).mu1() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn section_examples() {
        assert!((ell(&[1.0, 1.0, 1.0, 1.0]).section_area(1).unwrap() - PI).abs() < 1e-12);
        assert!((ell(&[4.0, 1.0]).section_area(0).unwrap() - PI / 2.0).abs() < 1e-12);
        let e = ell(&[9.0, 1.0, 1.0, 4.0]);
        assert!((e.section_area(0).unwrap() - PI / 3.0).abs() < 1e-12);
        assert!((e.section_area(1).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(e.section_area(2).is_err());
    }

    #[test]
    fn blob_examples() {
        let ctx = PhaseSpaceContext::new(1, 1.0).unwrap();
        let (_, e) = quantum_blob(&SymplecticMatrix::identity(1), PhaseSpacePoint::origin(1), ctx).unwrap();
        assert!((e.capacity() - PI).abs() < 1e-12);
        let s = SymplecticMatrix::try_new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5])), 1e-12).unwrap();
        let (_, e) = quantum_blob(&s, PhaseSpacePoint::origin(1), ctx).unwrap();
        assert!((e.matrix() - DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 4.0]))).amax() < 1e-12);
        assert!((e.mu1() - 1.0).abs() < 1e-12);
        for seed in 0..20 {
            let s = random_symplectic(seed, 2).unwrap();
            let ctx = PhaseSpaceContext::new(2, 0.7).unwrap();
            let (_, e) = quantum_blob(&s, PhaseSpacePoint::origin(2), ctx).unwrap();
            assert!((e.capacity() - PI * 0.7).abs() < 1e-9);
            for v in e.spectrum().values() {
                assert!((v - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn contained_blob() {
        let b = find_contained_blob(&ell(&[1.0, 1.0])).unwrap();
        assert!((b.blob.symplectic().matrix() - DMatrix::identity(2, 2)).amax() < 1e-12);
        let e = ell(&[4.0, 1.0 / 9.0]);
        let b = find_contained_blob(&e).unwrap();
        assert!(b.residual >= -1e-10);
        assert!(e.contains(&b.blob.ellipsoid().unwrap()).unwrap());
        assert!(matches!(find_contained_blob(&ell(&[2.0, 2.0])), Err(Error::NotAdmissible { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let e = random_ellipsoid(&mut rng, 2);
            if e.is_admissible() {
                let b = find_contained_blob(&e).unwrap();
                assert!(b.residual >= -1e-10 * e.matrix().norm());
            }
        }
    }

    #[test]
    fn capacity_is_symplectic_invariant_and_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..100 {
            let dof = 1 + (seed as usize % 3);
            let e = random_ellipsoid(&mut rng, dof);
            let s = random_symplectic(seed, dof).unwrap();
            let sms = s.matrix().transpose() * e.matrix() * s.matrix();
            let t = EllipsoidSpec::new(sms, *e.ctx()).unwrap();
            assert!((t.capacity() - e.capacity()).abs() <= 1e-9 * e.capacity().max(1.0));
            let l = 1.7;
            assert!((e.scaled(l).unwrap().capacity() - e.capacity() / (l * l)).abs() < 1e-9);
        }
    }

    #[test]
    fn admissibility_matches_uncertainty_and_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut agree = 0;
        for k in 0..300 {
            let dof = 1 + k % 3;
            let e = random_ellipsoid(&mut rng, dof);
            let sigma = e.matrix().clone().try_inverse().unwrap() * 0.5;
            let cov = CovarianceMatrix::centered(sigma, *e.ctx()).unwrap();
            if (e.mu1() - 1.0).abs() > 1e-8 {
                assert_eq!(e.is_admissible(), check_quantum_psd(&cov).passes());
                agree += 1;
            }
            if e.is_admissible() {
                for j in 0..dof {
                    assert!(e.projection_area(j).unwrap() >= PI * (1.0 - 1e-9));
                }
                if dof == 1 {
                    assert!(e.section_area(0).unwrap() >= PI * (1.0 - 1e-9));
                }
            }
        }
        assert!(agree > 250);
    }

    #[test]
    fn sections_of_coupled_blobs_can_be_small() {
        // A two-mode blob is admissible, yet its central (x₁, p₁) section is
        // smaller than πħ; only projections keep the bound.
        let s = random_symplectic(0, 2).unwrap();
        let ctx = PhaseSpaceContext::new(2, 1.0).unwrap();
        let (_, e) = quantum_blob(&s, PhaseSpacePoint::origin(2), ctx).unwrap();
        assert!(e.is_admissible());
        let smallest = (0..2).map(|j| e.section_area(j).unwrap()).fold(f64::INFINITY, f64::min);
        assert!(smallest < PI * 0.99, "{smallest}");
        for j in 0..2 {
            assert!(e.projection_area(j).unwrap() >= PI * (1.0 - 1e-9));
        }
    }

    #[test]
    fn single_precision() {
        let ctx = PhaseSpaceContext::<f32>::new(1, 1.0).unwrap();
        let e = EllipsoidSpec::new(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0f32, 1.0])), ctx).unwrap();
        assert!((e.capacity() - std::f32::consts::PI / 2.0).abs() < 1e-5);
        let json = serde_json::to_value(ell(&[4.0, 1.0])).unwrap();
        assert_eq!(json["mu1"], 2.0);
    }
}
