use log::warn;
use nalgebra::{Complex, DMatrix, DVector};

use super::wigner::WignerGrid;
use crate::symplectic::sigma;
use crate::uncertainty::CovarianceMatrix;

type C64 = Complex<f64>;

/// Boundary-to-peak ratio above which the transform of a grid is flagged as
/// truncated.
pub const TRUNCATION_WARNING: f64 = 1e-10;

/// Phase-space function `F(z) = ∫ e^{iσ(z, z′)} W(z′) dz′`.
pub trait CharacteristicFunction {
    fn dof(&self) -> usize;
    fn eval(&self, z: &[f64]) -> C64;

    /// Whether `eval(z)` is meaningful; grid quadratures alias beyond their
    /// Nyquist range.
    fn supports(&self, _z: &[f64]) -> bool {
        true
    }
}

/// Symplectic Fourier transform of a Wigner grid, evaluated by direct
/// quadrature at arbitrary points.
#[derive(Debug, Clone)]
pub struct SymplecticFourier {
    xs: Vec<f64>,
    ps: Vec<f64>,
    values: DMatrix<f64>,
    cell: f64,
}

pub fn symplectic_fourier(w: &WignerGrid) -> SymplecticFourier {
    let ratio = w.boundary_ratio();
    if ratio > TRUNCATION_WARNING {
        warn!("Wigner grid is not negligible at its boundary ({ratio:e} of peak); transform is truncated");
    }
    SymplecticFourier {
        xs: w.x_axis().points(),
        ps: w.p_axis().points(),
        values: w.values().clone(),
        cell: w.cell_area(),
    }
}

impl CharacteristicFunction for SymplecticFourier {
    fn dof(&self) -> usize {
        1
    }

    fn supports(&self, z: &[f64]) -> bool {
        let dx = self.xs[1] - self.xs[0];
        let dp = self.ps[1] - self.ps[0];
        z.len() == 2 && z[1].abs() < std::f64::consts::PI / dx && z[0].abs() < std::f64::consts::PI / dp
    }

    /// `σ(z, z′) = p x′ − x p′`.
    fn eval(&self, z: &[f64]) -> C64 {
        let (x, p) = (z[0], z[1]);
        let row_phase: Vec<C64> = self.xs.iter().map(|&xi| C64::from_polar(1.0, p * xi)).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (j, &pj) in self.ps.iter().enumerate() {
            let col = self.values.column(j);
            let mut a = C64::new(0.0, 0.0);
            for (ph, v) in row_phase.iter().zip(col.iter()) {
                a += ph * *v;
            }
            acc += C64::from_polar(1.0, -x * pj) * a;
        }
        acc * self.cell
    }
}

/// Closed-form transform of a Gaussian Wigner function,
/// `F(z) = exp(iσ(z, z̄) − ½(Jz)ᵀΣ(Jz))`.
#[derive(Debug, Clone)]
pub struct GaussianCharacteristic {
    mean: DVector<f64>,
    sigma: DMatrix<f64>,
}

impl GaussianCharacteristic {
    pub fn new(cov: &CovarianceMatrix<f64>) -> Self {
        Self { mean: cov.mean().clone(), sigma: cov.sigma().clone() }
    }
}

impl CharacteristicFunction for GaussianCharacteristic {
    fn dof(&self) -> usize {
        self.mean.len() / 2
    }

    fn eval(&self, z: &[f64]) -> C64 {
        let n = self.dof();
        // Jz = (p, −x)
        let jz = DVector::from_fn(2 * n, |k, _| if k < n { z[n + k] } else { -z[k - n] });
        let quad = (jz.transpose() * &self.sigma * &jz)[(0, 0)];
        let phase = sigma(z, self.mean.as_slice());
        C64::from_polar((-0.5 * quad).exp(), phase)
    }
}

impl CovarianceMatrix<f64> {
    pub fn characteristic(&self) -> GaussianCharacteristic {
        GaussianCharacteristic::new(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{fock_wigner, AxisGrid, PureState};
    use crate::PhaseSpaceContext;

    #[test]
    fn vacuum_transform() {
        let a = AxisGrid::default_for(1.0);
        let f = symplectic_fourier(&fock_wigner(0, &a, &a, 1.0).unwrap());
        for z in [[0.0f64, 0.0], [1.0, 0.0], [0.3, -1.2], [2.0, 2.0]] {
            let expected = (-(z[0] * z[0] + z[1] * z[1]) / 4.0).exp();
            assert!((f.eval(&z) - C64::new(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn displaced_gaussian_matches_closed_form() {
        let a = AxisGrid::default_for(1.0);
        let state = PureState::Gaussian { x0: 0.7, p0: -0.4, squeeze: 1.6 };
        let f = symplectic_fourier(&state.wigner(&a, &a, 1.0).unwrap());
        let ctx = PhaseSpaceContext::new(1, 1.0).unwrap();
        let cov = CovarianceMatrix::new(
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / 3.2, 0.8])),
            DVector::from_vec(vec![0.7, -0.4]),
            ctx,
        )
        .unwrap();
        let g = cov.characteristic();
        for z in [[0.5, 0.1], [-1.0, 2.0], [1.5, -0.3]] {
            assert!((f.eval(&z) - g.eval(&z)).norm() < 1e-10);
        }
        assert_eq!(g.dof(), 1);
    }
}
