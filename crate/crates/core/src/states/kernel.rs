use std::f64::consts::PI;

use log::warn;
use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::Serialize;

use super::axis::AxisGrid;
use super::wigner::WignerGrid;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Default tolerance on the smallest oracle eigenvalue.
pub const ORACLE_TOL: f64 = 1e-6;

/// Position-space kernel `K(x, x′) = ∫ W((x+x′)/2, p) e^{ip(x−x′)/ħ} dp`,
/// sampled on the even-index sublattice of the Wigner grid so that every
/// midpoint is a grid point.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    axis: AxisGrid,
    values: DMatrix<C64>,
    hbar: f64,
}

impl KernelMatrix {
    pub fn axis(&self) -> &AxisGrid {
        &self.axis
    }

    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Discretized operator `K·Δx` acting on sampled wavefunctions.
    pub fn operator(&self) -> DMatrix<C64> {
        &self.values * C64::new(self.axis.spacing(), 0.0)
    }

    pub fn trace(&self) -> f64 {
        self.values.diagonal().iter().map(|v| v.re).sum::<f64>() * self.axis.spacing()
    }

    /// `max |K − K†|` over the entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.values.nrows();
        let mut r = 0.0f64;
        for a in 0..n {
            for b in 0..=a {
                r = r.max((self.values[(a, b)] - self.values[(b, a)].conj()).norm());
            }
        }
        r
    }
}

pub fn kernel_from_wigner(w: &WignerGrid) -> Result<KernelMatrix> {
    let hbar = w.hbar();
    let xa = w.x_axis();
    let dp = w.p_axis().spacing();
    let extent = xa.max() - xa.min();
    let period = 2.0 * PI * hbar / dp;
    if period < extent {
        return Err(Error::IncompatibleGrids(format!(
            "momentum spacing {dp} aliases kernel offsets: period 2πħ/dp = {period} is shorter than the x extent {extent}"
        )));
    }
    if period < 2.0 * extent {
        warn!("kernel period 2πħ/dp = {period} is less than twice the x extent {extent}; far off-diagonal entries may alias");
    }
    let nx = xa.count();
    let m = nx.div_ceil(2);
    let dx = xa.spacing();
    let sub = AxisGrid::new(xa.min(), xa.min() + 2.0 * (m - 1) as f64 * dx, m)?;
    let ps = w.p_axis().points();
    let np = ps.len();
    // row-major copy of W for contiguous access along p
    let vals = w.values();
    let rows: Vec<f64> = (0..nx).flat_map(|i| (0..np).map(move |j| vals[(i, j)])).collect();
    // phases[d][j] = e^{i p_j · 2d·dx/ħ}, d = a − b ≥ 0
    let phases: Vec<Vec<C64>> =
        (0..m).map(|d| ps.iter().map(|&p| C64::from_polar(dp, p * 2.0 * d as f64 * dx / hbar)).collect()).collect();
    let mut k = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..=a {
            let row = &rows[(a + b) * np..(a + b + 1) * np];
            let s: C64 = row.iter().zip(&phases[a - b]).map(|(v, ph)| ph * *v).sum();
            k[(a, b)] = s;
            k[(b, a)] = s.conj();
        }
    }
    Ok(KernelMatrix { axis: sub, values: k, hbar })
}

/// Spectrum of the reconstructed density operator.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSpectrum {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub tolerance: f64,
}

impl OracleSpectrum {
    pub fn is_positive(&self) -> bool {
        self.min_eigenvalue >= -self.tolerance
    }

    /// Sum of the negative eigenvalues.
    pub fn negativity(&self) -> f64 {
        self.eigenvalues.iter().filter(|&&v| v < 0.0).sum()
    }
}

/// Brute-force positivity test: rebuild the operator kernel and
/// diagonalise it.
pub fn operator_spectrum_oracle(w: &WignerGrid, tol: f64) -> Result<OracleSpectrum> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("oracle tolerance must be non-negative, got {tol}")));
    }
    let k = kernel_from_wigner(w)?;
    let trace = k.trace();
    let eig = SymmetricEigen::new(k.operator());
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let min_eigenvalue = *eigenvalues.last().expect("kernel is non-empty");
    Ok(OracleSpectrum { eigenvalues, min_eigenvalue, trace, tolerance: tol })
}
