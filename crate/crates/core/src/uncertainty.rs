//! Covariance matrices and the three equivalent forms of the uncertainty
//! principle: the Robertson–Schrödinger inequalities, positivity of the
//! Hermitian matrix `Σ + (iħ/2)J`, and the bound `ν_min(Σ) ≥ ħ/2` on the
//! smallest symplectic eigenvalue.

use log::warn;
use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::states::WignerGrid;
use crate::symplectic::{
    check_phase_space_matrix, max_abs, random_symplectic, standard_form, symplectic_spectrum, PhaseSpaceContext,
};
use crate::{Error, Real, Result};

/// Verdicts within this band, relative to `‖Σ‖`, are reported as
/// [`Verdict::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-10;
/// Relative tail contribution above which moment extraction warns.
pub const TAIL_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Boundary,
    Fail,
}

impl Verdict {
    /// Classifies a margin that must be non-negative.
    pub fn from_margin<T: Real>(margin: T, band: T) -> Self {
        if margin.abs() <= band {
            Verdict::Boundary
        } else if margin > T::zero() {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// `Pass` and `Boundary` both count as passing.
    pub fn passes(self) -> bool {
        self != Verdict::Fail
    }

    fn worst(self, other: Self) -> Self {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Boundary, _) | (_, Verdict::Boundary) => Verdict::Boundary,
            _ => Verdict::Pass,
        }
    }
}

/// Symmetric `2N×2N` matrix of symmetrized second moments and the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    sigma: DMatrix<T>,
    mean: DVector<T>,
    ctx: PhaseSpaceContext<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn new(sigma: DMatrix<T>, mean: DVector<T>, ctx: PhaseSpaceContext<T>) -> Result<Self> {
        let dof = check_phase_space_matrix(&sigma)?;
        if dof != ctx.dof() {
            return Err(Error::DimensionMismatch { expected: ctx.dim(), got: sigma.nrows() });
        }
        if mean.len() != ctx.dim() {
            return Err(Error::DimensionMismatch { expected: ctx.dim(), got: mean.len() });
        }
        let scale = max_abs(&sigma).max(T::one());
        let asym = max_abs(&(&sigma - sigma.transpose()));
        if asym > T::tolerance(1e-12) * scale {
            return Err(Error::InvalidParameter(format!("covariance is not symmetric ({asym})")));
        }
        if sigma.diagonal().iter().any(|d| !(*d > T::zero())) {
            return Err(Error::InvalidParameter("covariance diagonal must be positive".into()));
        }
        let sigma = (&sigma + sigma.transpose()) * T::lit(0.5);
        Ok(Self { sigma, mean, ctx })
    }

    /// Zero-mean covariance.
    pub fn centered(sigma: DMatrix<T>, ctx: PhaseSpaceContext<T>) -> Result<Self> {
        let dim = ctx.dim();
        Self::new(sigma, DVector::zeros(dim), ctx)
    }

    pub fn sigma(&self) -> &DMatrix<T> {
        &self.sigma
    }

    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }

    pub fn ctx(&self) -> &PhaseSpaceContext<T> {
        &self.ctx
    }

    pub fn hbar(&self) -> T {
        self.ctx.hbar()
    }

    pub fn dof(&self) -> usize {
        self.ctx.dof()
    }

    /// The same second moments judged against another value of ħ.
    pub fn with_hbar(&self, hbar: T) -> Result<Self> {
        Ok(Self { ctx: self.ctx.with_hbar(hbar)?, ..self.clone() })
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn norm(&self) -> T {
        let eig = self.sigma.clone().symmetric_eigen();
        eig.eigenvalues.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    fn band(&self) -> T {
        T::tolerance(BOUNDARY_BAND) * self.norm()
    }

    pub fn determinant(&self) -> T {
        self.sigma.clone().determinant()
    }
}

/// One Robertson–Schrödinger inequality `lhs ≥ rhs` for the pair `(x_j, p_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsPair<T> {
    pub j: usize,
    pub k: usize,
    /// `Δx_j² Δp_k²`.
    pub lhs: T,
    /// `cov(x_j, p_k)² (+ ħ²/4 when j = k)`.
    pub rhs: T,
    pub margin: T,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsReport<T> {
    pub pairs: Vec<RsPair<T>>,
    pub verdict: Verdict,
}

/// Robertson–Schrödinger inequalities: for each `j`,
/// `Δx_j² Δp_j² ≥ cov(x_j, p_j)² + ħ²/4`, and for `j ≠ k`,
/// `Δx_j² Δp_k² ≥ cov(x_j, p_k)²`.
pub fn check_rs<T: Real>(cov: &CovarianceMatrix<T>) -> RsReport<T> {
    let n = cov.dof();
    let s = cov.sigma();
    let quarter_h2 = cov.hbar() * cov.hbar() * T::lit(0.25);
    let band = cov.band() * cov.norm();
    let mut pairs = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let lhs = s[(j, j)] * s[(n + k, n + k)];
            let c = s[(j, n + k)];
            let rhs = if j == k { c * c + quarter_h2 } else { c * c };
            let margin = lhs - rhs;
            pairs.push(RsPair { j, k, lhs, rhs, margin, verdict: Verdict::from_margin(margin, band) });
        }
    }
    let verdict = pairs.iter().fold(Verdict::Pass, |acc, p| acc.worst(p.verdict));
    RsReport { pairs, verdict }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdCheck<T> {
    pub min_eigenvalue: T,
    pub verdict: Verdict,
}

impl<T> PsdCheck<T> {
    pub fn passes(&self) -> bool {
        self.verdict.passes()
    }
}

/// `Σ + (iħ/2)J` as a complex Hermitian matrix.
pub fn quantum_form<T: Real>(cov: &CovarianceMatrix<T>) -> DMatrix<Complex<T>> {
    let j = standard_form::<T>(cov.dof());
    let half_h = cov.hbar() * T::lit(0.5);
    DMatrix::from_fn(cov.sigma.nrows(), cov.sigma.ncols(), |r, c| Complex::new(cov.sigma[(r, c)], half_h * j[(r, c)]))
}

/// Smallest eigenvalue of `Σ + (iħ/2)J`; passes iff it is `≥ −1e−10·‖Σ‖`.
pub fn check_quantum_psd<T: Real>(cov: &CovarianceMatrix<T>) -> PsdCheck<T> {
    let eig = SymmetricEigen::new(quantum_form(cov));
    let min = eig.eigenvalues.min();
    PsdCheck { min_eigenvalue: min, verdict: Verdict::from_margin(min, cov.band()) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilliamsonCheck<T> {
    pub nu_min: T,
    pub nu_max: T,
    pub verdict: Verdict,
}

/// Passes iff the smallest symplectic eigenvalue of `Σ` is at least `ħ/2`.
///
/// The largest eigenvalue is reported alongside; it is the quantity the
/// dual statement for dominating Gaussians constrains.
pub fn check_williamson_criterion<T: Real>(cov: &CovarianceMatrix<T>) -> Result<WilliamsonCheck<T>> {
    let spec = symplectic_spectrum(cov.sigma())?;
    let margin = spec.min() - cov.hbar() * T::lit(0.5);
    Ok(WilliamsonCheck { nu_min: spec.min(), nu_max: spec.max(), verdict: Verdict::from_margin(margin, cov.band()) })
}

/// Covariance of the λ-rescaled state: `Σ/λ²`, mean `z̄/λ`.
pub fn rescale_covariance<T: Real>(cov: &CovarianceMatrix<T>, lambda: T) -> Result<CovarianceMatrix<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidParameter(format!("rescale factor must be positive, got {lambda}")));
    }
    let inv2 = T::one() / (lambda * lambda);
    CovarianceMatrix::new(cov.sigma() * inv2, cov.mean() / lambda, *cov.ctx())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaStar<T> {
    /// Largest λ for which `Σ/λ²` still satisfies the uncertainty principle.
    pub value: T,
    /// False when `Σ` itself already fails (`value < 1`).
    pub admissible_at_unity: bool,
}

/// `λ* = √(2ν_min/ħ)`.
pub fn lambda_star<T: Real>(cov: &CovarianceMatrix<T>) -> Result<LambdaStar<T>> {
    let spec = symplectic_spectrum(cov.sigma())?;
    let value = (T::lit(2.0) * spec.min() / cov.hbar()).sqrt();
    let admissible_at_unity = value >= T::one() - T::tolerance(BOUNDARY_BAND);
    Ok(LambdaStar { value, admissible_at_unity })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyReport<T> {
    pub hbar: T,
    pub rs: RsReport<T>,
    pub psd_min_eigenvalue: T,
    pub nu_min: T,
    pub nu_max: T,
    /// Verdict of the `Σ + (iħ/2)J ⪰ 0` check.
    pub verdict: Verdict,
    pub williamson_verdict: Verdict,
    pub lambda_star: T,
}

pub fn uncertainty_report<T: Real>(cov: &CovarianceMatrix<T>) -> Result<UncertaintyReport<T>> {
    let rs = check_rs(cov);
    let psd = check_quantum_psd(cov);
    let wil = check_williamson_criterion(cov)?;
    let ls = lambda_star(cov)?;
    Ok(UncertaintyReport {
        hbar: cov.hbar(),
        rs,
        psd_min_eigenvalue: psd.min_eigenvalue,
        nu_min: wil.nu_min,
        nu_max: wil.nu_max,
        verdict: psd.verdict,
        williamson_verdict: wil.verdict,
        lambda_star: ls.value,
    })
}

/// Mean and covariance of a Wigner grid from its first and second moments.
///
/// The symmetrized products `(Z_αZ_β + Z_βZ_α)/2` have Weyl symbol
/// `z_α z_β`, so phase-space moments of `W` give `Σ` directly. Moments are
/// normalized by the grid trace.
pub fn covariance_from_grid(w: &WignerGrid) -> Result<CovarianceMatrix<f64>> {
    let xs = w.x_axis().points();
    let ps = w.p_axis().points();
    let vals = w.values();
    let (mut m0, mut mx, mut mp) = (0.0f64, 0.0, 0.0);
    let (mut mxx, mut mpp, mut mxp) = (0.0, 0.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        let (mut r0, mut rp, mut rpp) = (0.0, 0.0, 0.0);
        for (j, &p) in ps.iter().enumerate() {
            let v = vals[(i, j)];
            r0 += v;
            rp += p * v;
            rpp += p * p * v;
        }
        m0 += r0;
        mx += x * r0;
        mxx += x * x * r0;
        mp += rp;
        mpp += rpp;
        mxp += x * rp;
    }
    if !(m0.abs() > 0.0) {
        return Err(Error::ZeroInput);
    }
    let (x0, p0) = (mx / m0, mp / m0);
    let sxx = mxx / m0 - x0 * x0;
    let spp = mpp / m0 - p0 * p0;
    let sxp = mxp / m0 - x0 * p0;

    let tail = second_moment_tail(w);
    if tail > TAIL_WARNING {
        warn!("second moments: boundary strip carries {tail:.3e} of the |z|²·|W| mass");
    }
    let ctx = PhaseSpaceContext::new(1, w.hbar())?;
    CovarianceMatrix::new(DMatrix::from_row_slice(2, 2, &[sxx, sxp, sxp, spp]), DVector::from_vec(vec![x0, p0]), ctx)
}

/// Fraction of `∫|z|²|W|` carried by the two outermost rings of the grid.
pub fn second_moment_tail(w: &WignerGrid) -> f64 {
    let xs = w.x_axis().points();
    let ps = w.p_axis().points();
    let (nx, np) = (xs.len(), ps.len());
    let mut total = 0.0;
    let mut edge = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            let v = (x * x + p * p) * w.values()[(i, j)].abs();
            total += v;
            if i < 2 || j < 2 || i + 2 >= nx || j + 2 >= np {
                edge += v;
            }
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Judges the covariance of one grid against several values of ħ.
pub fn hbar_sweep(w: &WignerGrid, hbar_values: &[f64]) -> Result<Vec<UncertaintyReport<f64>>> {
    let cov = covariance_from_grid(w)?;
    hbar_values.iter().map(|&h| uncertainty_report(&cov.with_hbar(h)?)).collect()
}

/// Random covariance `Sᵀ diag(ν, ν) S` with `S` random symplectic and each
/// `ν_j` drawn uniformly from `[lo, hi]·ħ/2`.
pub fn random_covariance(rng: &mut impl Rng, dof: usize, hbar: f64, lo: f64, hi: f64) -> DMatrix<f64> {
    let s = random_symplectic(rng.random(), dof).expect("dof ≥ 1");
    let nus: Vec<f64> = (0..dof).map(|_| rng.random_range(lo..hi) * hbar / 2.0).collect();
    let d = DMatrix::from_fn(2 * dof, 2 * dof, |r, c| if r == c { nus[r % dof] } else { 0.0 });
    let m = s.matrix().transpose() * d * s.matrix();
    (&m + m.transpose()) * 0.5
}

/// Randomized search for covariances that satisfy every coordinate
/// Robertson–Schrödinger inequality yet fail `Σ + (iħ/2)J ⪰ 0`.
///
/// For one degree of freedom the two are equivalent and nothing is found;
/// for `N ≥ 2` the coordinate family is weaker.
pub fn find_rs_gaps(rng: &mut impl Rng, dof: usize, hbar: f64, trials: usize) -> Result<Vec<DMatrix<f64>>> {
    let ctx = PhaseSpaceContext::new(dof, hbar)?;
    let mut found = Vec::new();
    for _ in 0..trials {
        let sigma = random_covariance(rng, dof, hbar, 0.2, 1.5);
        let cov = CovarianceMatrix::centered(sigma, ctx)?;
        if check_rs(&cov).verdict == Verdict::Pass && check_quantum_psd(&cov).verdict == Verdict::Fail {
            found.push(cov.sigma().clone());
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cov1(hbar: f64, entries: [f64; 4]) -> CovarianceMatrix<f64> {
        let ctx = PhaseSpaceContext::new(1, hbar).unwrap();
        CovarianceMatrix::centered(DMatrix::from_row_slice(2, 2, &entries), ctx).unwrap()
    }

    fn scalar(dof: usize, hbar: f64, v: f64) -> CovarianceMatrix<f64> {
        let ctx = PhaseSpaceContext::new(dof, hbar).unwrap();
        CovarianceMatrix::centered(DMatrix::identity(2 * dof, 2 * dof) * v, ctx).unwrap()
    }

    #[test]
    fn constructor_validates() {
        let ctx = PhaseSpaceContext::new(1, 1.0).unwrap();
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(CovarianceMatrix::centered(asym, ctx).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(CovarianceMatrix::centered(neg, ctx).is_err());
        assert!(CovarianceMatrix::centered(DMatrix::identity(4, 4), ctx).is_err());
    }

    #[test]
    fn rs_examples() {
        for hbar in [1.0, 0.3, 2.0] {
            let h = hbar / 2.0;
            let r = check_rs(&cov1(hbar, [h, 0.0, 0.0, h]));
            assert_eq!(r.verdict, Verdict::Boundary);

            let r = check_rs(&cov1(hbar, [h, 0.0, 0.0, 0.2 * h]));
            assert_eq!(r.verdict, Verdict::Fail);
            assert!((r.pairs[0].margin + 0.8 * hbar * hbar / 4.0).abs() < 1e-12);

            let r = check_rs(&cov1(hbar, [2.0 * h, h, h, h]));
            assert!(r.verdict.passes());
            assert!((r.pairs[0].lhs - hbar * hbar / 2.0).abs() < 1e-12);
            assert!((r.pairs[0].rhs - hbar * hbar / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rs_cross_pairs_for_two_modes() {
        let r = check_rs(&scalar(2, 1.0, 0.6));
        assert_eq!(r.pairs.len(), 4);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.pairs.iter().filter(|p| p.j != p.k).all(|p| p.rhs == 0.0));
    }

    #[test]
    fn psd_examples() {
        let c = check_quantum_psd(&scalar(1, 1.0, 0.5));
        assert!(c.min_eigenvalue.abs() < 1e-14);
        assert_eq!(c.verdict, Verdict::Boundary);
        assert!(!check_quantum_psd(&cov1(1.0, [0.5, 0.0, 0.0, 0.45])).passes());
        let shrunk = rescale_covariance(&scalar(1, 1.0, 0.5), 1.2).unwrap();
        assert!(!check_quantum_psd(&shrunk).passes());
    }

    #[test]
    fn williamson_criterion_examples() {
        let c = check_williamson_criterion(&scalar(1, 1.0, 0.5)).unwrap();
        assert!((c.nu_min - 0.5).abs() < 1e-14);
        assert!(c.verdict.passes());
        let c = check_williamson_criterion(&scalar(1, 2.0, 3.0)).unwrap();
        assert!((c.nu_min - 3.0).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Pass);
    }

    #[test]
    fn criteria_agree_on_random_covariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut decided = 0;
        for trial in 0..1000 {
            let dof = 1 + trial % 2;
            let hbar = 0.5 + rng.random::<f64>();
            let ctx = PhaseSpaceContext::new(dof, hbar).unwrap();
            let cov = CovarianceMatrix::centered(random_covariance(&mut rng, dof, hbar, 0.5, 1.5), ctx).unwrap();
            let psd = check_quantum_psd(&cov).verdict;
            let wil = check_williamson_criterion(&cov).unwrap().verdict;
            if psd != Verdict::Boundary && wil != Verdict::Boundary {
                assert_eq!(psd, wil, "trial {trial}");
                decided += 1;
            }
            if dof == 1 {
                let rs = check_rs(&cov).verdict;
                let det = Verdict::from_margin(cov.determinant() - hbar * hbar / 4.0, 1e-9);
                if rs != Verdict::Boundary && psd != Verdict::Boundary && det != Verdict::Boundary {
                    assert_eq!(rs, psd);
                    assert_eq!(det, psd);
                }
            }
            // necessity direction: (uc) implies every coordinate inequality
            if psd == Verdict::Pass {
                assert!(check_rs(&cov).verdict.passes());
            }
        }
        assert!(decided > 990);
    }

    #[test]
    fn psd_verdict_is_symplectically_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..200 {
            let ctx = PhaseSpaceContext::new(2, 1.0).unwrap();
            let sigma = random_covariance(&mut rng, 2, 1.0, 0.6, 1.4);
            let s = random_symplectic(seed, 2).unwrap();
            let moved = s.matrix().transpose() * &sigma * s.matrix();
            let a = check_quantum_psd(&CovarianceMatrix::centered(sigma, ctx).unwrap()).verdict;
            let b = check_quantum_psd(&CovarianceMatrix::centered((&moved + moved.transpose()) * 0.5, ctx).unwrap())
                .verdict;
            if a != Verdict::Boundary && b != Verdict::Boundary {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn rescaling_and_lambda_star() {
        let vac = scalar(1, 1.0, 0.5);
        assert_eq!(rescale_covariance(&vac, 1.0).unwrap(), vac);
        let r = rescale_covariance(&vac, 2.0).unwrap();
        assert!((r.sigma()[(0, 0)] - 0.125).abs() < 1e-15);
        assert!(rescale_covariance(&vac, 0.0).is_err());
        assert!(rescale_covariance(&vac, -1.0).is_err());

        assert!((lambda_star(&vac).unwrap().value - 1.0).abs() < 1e-12);
        assert!((lambda_star(&scalar(1, 1.0, 1.5)).unwrap().value - 3f64.sqrt()).abs() < 1e-12);
        let sq = cov1(1.0, [2.0, 0.0, 0.0, 0.5]);
        assert!((lambda_star(&sq).unwrap().value - 2f64.sqrt()).abs() < 1e-12);
        let bad = lambda_star(&scalar(1, 1.0, 0.3)).unwrap();
        assert!(!bad.admissible_at_unity && bad.value < 1.0);
    }

    #[test]
    fn lambda_star_separates_passing_rescalings() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let ctx = PhaseSpaceContext::new(2, 1.0).unwrap();
            let cov = CovarianceMatrix::centered(random_covariance(&mut rng, 2, 1.0, 1.0, 4.0), ctx).unwrap();
            let star = lambda_star(&cov).unwrap().value;
            for k in 1..40 {
                let lam = 0.1 * k as f64;
                let v = check_quantum_psd(&rescale_covariance(&cov, lam).unwrap()).verdict;
                if (lam - star).abs() > 1e-6 {
                    assert_eq!(v.passes(), lam < star, "λ={lam}, λ*={star}");
                }
            }
        }
    }

    #[test]
    fn hbar_dependence() {
        let vac = scalar(1, 1.0, 0.5);
        assert!(uncertainty_report(&vac.with_hbar(1.0).unwrap()).unwrap().verdict.passes());
        assert!(!uncertainty_report(&vac.with_hbar(1.5).unwrap()).unwrap().verdict.passes());
        assert_eq!(uncertainty_report(&vac.with_hbar(0.5).unwrap()).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn single_precision_criteria() {
        let ctx = PhaseSpaceContext::<f32>::new(1, 1.0).unwrap();
        let cov = CovarianceMatrix::centered(DMatrix::<f32>::identity(2, 2) * 0.75, ctx).unwrap();
        assert_eq!(check_quantum_psd(&cov).verdict, Verdict::Pass);
        assert_eq!(check_williamson_criterion(&cov).unwrap().verdict, Verdict::Pass);
        assert!((lambda_star(&cov).unwrap().value - 1.5f32.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn one_mode_has_no_rs_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(find_rs_gaps(&mut rng, 1, 1.0, 500).unwrap().is_empty());
    }

    #[test]
    fn two_modes_have_rs_gaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gaps = find_rs_gaps(&mut rng, 2, 1.0, 2000).unwrap();
        assert!(!gaps.is_empty());
        let ctx = PhaseSpaceContext::new(2, 1.0).unwrap();
        for g in gaps {
            let cov = CovarianceMatrix::centered(g, ctx).unwrap();
            assert_eq!(check_rs(&cov).verdict, Verdict::Pass);
            assert_eq!(check_williamson_criterion(&cov).unwrap().verdict, Verdict::Fail);
        }
    }
}
