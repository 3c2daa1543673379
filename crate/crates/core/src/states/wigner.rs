use std::f64::consts::PI;

use log::warn;
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::axis::AxisGrid;
use super::interp::NaturalSpline;
use super::wavefunction::{PureState, WaveFunctionGrid};
use crate::uncertainty::CovarianceMatrix;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Imaginary residue tolerated when evaluating the Wigner transform of a
/// wavefunction.
pub const IMAG_TOLERANCE: f64 = 1e-10;
/// Relative mass change above which rescaling logs a warning.
pub const MASS_LOSS_WARNING: f64 = 1e-6;

/// Real phase-space function sampled on a tensor grid, `values[(i, j)]`
/// being the value at `(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    x_axis: AxisGrid,
    p_axis: AxisGrid,
    values: DMatrix<f64>,
    hbar: f64,
}

impl WignerGrid {
    pub fn new(x_axis: AxisGrid, p_axis: AxisGrid, values: DMatrix<f64>, hbar: f64) -> Result<Self> {
        if values.nrows() != x_axis.count() {
            return Err(Error::DimensionMismatch { expected: x_axis.count(), got: values.nrows() });
        }
        if values.ncols() != p_axis.count() {
            return Err(Error::DimensionMismatch { expected: p_axis.count(), got: values.ncols() });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid contains non-finite values".into()));
        }
        Ok(Self { x_axis, p_axis, values, hbar })
    }

    pub fn from_fn(x_axis: AxisGrid, p_axis: AxisGrid, hbar: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let xs = x_axis.points();
        let ps = p_axis.points();
        let values = DMatrix::from_fn(xs.len(), ps.len(), |i, j| f(xs[i], ps[j]));
        Self::new(x_axis, p_axis, values, hbar)
    }

    pub fn x_axis(&self) -> &AxisGrid {
        &self.x_axis
    }

    pub fn p_axis(&self) -> &AxisGrid {
        &self.p_axis
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn cell_area(&self) -> f64 {
        self.x_axis.spacing() * self.p_axis.spacing()
    }

    /// Riemann sum `∫W dx dp`.
    pub fn trace(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    pub fn max_value(&self) -> f64 {
        self.values.max()
    }

    pub fn min_value(&self) -> f64 {
        self.values.min()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    /// Largest |W| on the outer ring of the grid, relative to the peak |W|.
    pub fn boundary_ratio(&self) -> f64 {
        let (n, m) = self.values.shape();
        let mut edge = 0.0f64;
        for i in 0..n {
            edge = edge.max(self.values[(i, 0)].abs()).max(self.values[(i, m - 1)].abs());
        }
        for j in 0..m {
            edge = edge.max(self.values[(0, j)].abs()).max(self.values[(n - 1, j)].abs());
        }
        let peak = self.max_abs();
        if peak > 0.0 {
            edge / peak
        } else {
            0.0
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.x_axis.same_as(&other.x_axis) && self.p_axis.same_as(&other.p_axis)
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.x_axis, self.p_axis, self.values.clone(), hbar)
    }

    /// Position marginal `∫W dp`.
    pub fn marginal_x(&self) -> Vec<f64> {
        let dp = self.p_axis.spacing();
        self.values.row_iter().map(|r| r.sum() * dp).collect()
    }

    /// Momentum marginal `∫W dx`.
    pub fn marginal_p(&self) -> Vec<f64> {
        let dx = self.x_axis.spacing();
        self.values.column_iter().map(|c| c.sum() * dx).collect()
    }

    /// `∫ x^a p^b W dx dp`.
    pub fn moment(&self, a: i32, b: i32) -> f64 {
        let xs = self.x_axis.points();
        let ps = self.p_axis.points();
        let mut s = 0.0;
        for (j, p) in ps.iter().enumerate() {
            let pb = p.powi(b);
            for (i, x) in xs.iter().enumerate() {
                s += x.powi(a) * pb * self.values[(i, j)];
            }
        }
        s * self.cell_area()
    }

    /// `W'(x, p) = W(−p, x)`, the image under the quarter turn that the
    /// Fourier transform induces. Needs identical, symmetric axes.
    pub fn rotated_quarter(&self) -> Result<Self> {
        if !self.x_axis.same_as(&self.p_axis) || !self.x_axis.is_symmetric() {
            return Err(Error::IncompatibleGrids("quarter turn needs identical symmetric axes".into()));
        }
        let n = self.x_axis.count();
        let values = DMatrix::from_fn(n, n, |i, j| self.values[(n - 1 - j, i)]);
        Self::new(self.x_axis, self.p_axis, values, self.hbar)
    }
}

/// `∫W dx dp` on the grid.
pub fn trace(w: &WignerGrid) -> f64 {
    w.trace()
}

/// Wigner transform of a sampled wavefunction on its own axis, used for
/// both `x` and `p`.
pub fn wigner_of_pure(psi: &WaveFunctionGrid) -> Result<WignerGrid> {
    wigner_of_pure_on(psi, psi.axis()).map(|(w, _)| w)
}

/// Wigner transform evaluated on an explicit momentum axis, by direct
/// quadrature over the shift variable:
/// `W(x_i, p) = (πħ)^{-1} Σ_k e^{−2ipk·dx/ħ} ψ(x_{i+k}) conj ψ(x_{i−k}) dx`.
///
/// Also returns the largest imaginary part discarded.
pub fn wigner_of_pure_on(psi: &WaveFunctionGrid, p_axis: &AxisGrid) -> Result<(WignerGrid, f64)> {
    psi.check_normalized()?;
    let hbar = psi.hbar();
    let dx = psi.axis().spacing();
    let nyquist = PI * hbar / (2.0 * dx);
    let pmax = p_axis.min().abs().max(p_axis.max().abs());
    if pmax > nyquist * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!("momentum range {pmax} exceeds the aliasing limit πħ/2dx = {nyquist}")));
    }
    let n = psi.axis().count();
    let half = (n - 1) / 2;
    let ps = p_axis.points();
    let vals = psi.values();
    // phase[j][k] = e^{−2i p_j k dx/ħ}
    let phases: Vec<Vec<C64>> = ps
        .iter()
        .map(|&p| (0..=half).map(|k| C64::from_polar(1.0, -2.0 * p * k as f64 * dx / hbar)).collect())
        .collect();
    let pref = dx / (PI * hbar);
    let mut out = DMatrix::zeros(n, ps.len());
    let mut max_imag = 0.0f64;
    let mut products = Vec::with_capacity(half + 1);
    for i in 0..n {
        let kmax = i.min(n - 1 - i);
        products.clear();
        for k in 0..=kmax {
            products.push((vals[i + k] * vals[i - k].conj(), vals[i - k] * vals[i + k].conj()));
        }
        for (j, ph) in phases.iter().enumerate() {
            let mut s = products[0].0;
            for k in 1..=kmax {
                let (fwd, back) = products[k];
                s += ph[k] * fwd + ph[k].conj() * back;
            }
            s *= pref;
            max_imag = max_imag.max(s.im.abs());
            out[(i, j)] = s.re;
        }
    }
    if max_imag > IMAG_TOLERANCE {
        warn!("Wigner transform discarded an imaginary part of {max_imag:e}");
    }
    Ok((WignerGrid::new(*psi.axis(), *p_axis, out, hbar)?, max_imag))
}

/// Wigner function of a one-mode Gaussian state,
/// `W(z) = (2π)^{-1} det(Σ)^{-1/2} exp(−½(z−z̄)ᵀΣ⁻¹(z−z̄))`.
pub fn wigner_gaussian(cov: &CovarianceMatrix<f64>, x_axis: &AxisGrid, p_axis: &AxisGrid) -> Result<WignerGrid> {
    if cov.dof() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: cov.dof() });
    }
    let s = cov.sigma();
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    if !(det > 0.0) {
        return Err(Error::NotPositiveDefinite(format!("covariance determinant {det}")));
    }
    let (ixx, ipp, ixp) = (s[(1, 1)] / det, s[(0, 0)] / det, -s[(0, 1)] / det);
    let (x0, p0) = (cov.mean()[0], cov.mean()[1]);
    let norm = 1.0 / (2.0 * PI * det.sqrt());
    WignerGrid::from_fn(*x_axis, *p_axis, cov.hbar(), |x, p| {
        let (u, v) = (x - x0, p - p0);
        norm * (-0.5 * (ixx * u * u + 2.0 * ixp * u * v + ipp * v * v)).exp()
    })
}

/// Closed-form Fock-state Wigner function
/// `W_n = (−1)^n (πħ)^{-1} L_n(2r²/ħ) e^{−r²/ħ}`.
pub fn fock_wigner(n: usize, x_axis: &AxisGrid, p_axis: &AxisGrid, hbar: f64) -> Result<WignerGrid> {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    WignerGrid::from_fn(*x_axis, *p_axis, hbar, |x, p| {
        let r2 = (x * x + p * p) / hbar;
        sign / (PI * hbar) * laguerre(n, 2.0 * r2) * (-r2).exp()
    })
}

pub(crate) fn laguerre(n: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - t;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

impl PureState {
    /// Closed-form Wigner function on the given axes.
    pub fn wigner(&self, x_axis: &AxisGrid, p_axis: &AxisGrid, hbar: f64) -> Result<WignerGrid> {
        match *self {
            PureState::Fock { n } => fock_wigner(n, x_axis, p_axis, hbar),
            PureState::Gaussian { x0, p0, squeeze } => {
                if !(squeeze > 0.0) {
                    return Err(Error::InvalidParameter(format!("squeeze must be positive, got {squeeze}")));
                }
                let ctx = crate::PhaseSpaceContext::new(1, hbar)?;
                let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    hbar / (2.0 * squeeze),
                    hbar * squeeze / 2.0,
                ]));
                let cov = CovarianceMatrix::new(sigma, nalgebra::DVector::from_vec(vec![x0, p0]), ctx)?;
                wigner_gaussian(&cov, x_axis, p_axis)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub state: PureState,
}

/// Convex combination of pure states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub components: Vec<MixtureComponent>,
}

impl MixtureSpec {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let s = Self { components };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidParameter("mixture has no components".into()));
        }
        if let Some(c) = self.components.iter().find(|c| !(c.weight > 0.0)) {
            return Err(Error::InvalidParameter(format!("mixture weight {} is not positive", c.weight)));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(())
    }
}

/// `Σ α_j W_j` from closed-form component Wigner functions.
pub fn mixture_wigner(spec: &MixtureSpec, x_axis: &AxisGrid, p_axis: &AxisGrid, hbar: f64) -> Result<WignerGrid> {
    spec.validate()?;
    let mut acc = DMatrix::zeros(x_axis.count(), p_axis.count());
    for c in &spec.components {
        acc += c.state.wigner(x_axis, p_axis, hbar)?.values * c.weight;
    }
    WignerGrid::new(*x_axis, *p_axis, acc, hbar)
}

/// `Σ α_j W_j` from grids sharing axes and ħ.
pub fn mix_grids(parts: &[(f64, &WignerGrid)]) -> Result<WignerGrid> {
    let (_, first) = parts.first().ok_or(Error::ZeroInput)?;
    let mut acc = DMatrix::zeros(first.values.nrows(), first.values.ncols());
    for (a, w) in parts {
        if !w.same_grid(first) || w.hbar != first.hbar {
            return Err(Error::IncompatibleGrids("mixture components differ in axes or hbar".into()));
        }
        acc += &w.values * *a;
    }
    WignerGrid::new(first.x_axis, first.p_axis, acc, first.hbar)
}

/// Mass before and after rescaling on the same grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaleDiagnostics {
    pub source_mass: f64,
    pub output_mass: f64,
}

/// `W^λ(z) = λ^{2} W(λz)` on the input grid, by separable natural cubic
/// spline interpolation. Points whose preimage falls outside the grid are
/// set to zero. The prefactor keeps `∫W^λ = ∫W` and maps `Σ` to `Σ/λ²`.
pub fn rescale(w: &WignerGrid, lambda: f64) -> Result<WignerGrid> {
    rescale_with_diagnostics(w, lambda).map(|(g, _)| g)
}

pub fn rescale_with_diagnostics(w: &WignerGrid, lambda: f64) -> Result<(WignerGrid, RescaleDiagnostics)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("rescale factor must be positive, got {lambda}")));
    }
    let (nx, np) = w.values.shape();
    let xs = w.x_axis.points();
    let ps = w.p_axis.points();
    let (dx, dp) = (w.x_axis.spacing(), w.p_axis.spacing());
    // first along p, row by row
    let mut tmp = DMatrix::zeros(nx, np);
    let mut row = vec![0.0; np];
    for i in 0..nx {
        for (j, r) in row.iter_mut().enumerate() {
            *r = w.values[(i, j)];
        }
        let s = NaturalSpline::new(ps[0], dp, &row);
        for j in 0..np {
            tmp[(i, j)] = s.eval(lambda * ps[j]);
        }
    }
    let mut out = DMatrix::zeros(nx, np);
    let factor = lambda * lambda;
    for j in 0..np {
        let col = tmp.column(j);
        let s = NaturalSpline::new(xs[0], dx, col.as_slice());
        for i in 0..nx {
            out[(i, j)] = factor * s.eval(lambda * xs[i]);
        }
    }
    let g = WignerGrid::new(w.x_axis, w.p_axis, out, w.hbar)?;
    let diag = RescaleDiagnostics { source_mass: w.trace(), output_mass: g.trace() };
    let scale = diag.source_mass.abs().max(f64::MIN_POSITIVE);
    if (diag.output_mass - diag.source_mass).abs() > MASS_LOSS_WARNING * scale {
        warn!(
            "rescaling by {lambda} changed the grid mass from {} to {}; widen the grid",
            diag.source_mass, diag.output_mass
        );
    }
    Ok((g, diag))
}
