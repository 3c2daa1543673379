use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::axis::AxisGrid;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Amplitude allowed at the ends of the axis, in units of `ħ^{-1/4}`.
pub const BOUNDARY_THRESHOLD: f64 = 1e-12;
/// Accepted deviation of `∫|ψ|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Complex wavefunction sampled on a position axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunctionGrid {
    axis: AxisGrid,
    values: Vec<C64>,
    hbar: f64,
}

impl WaveFunctionGrid {
    pub fn new(axis: AxisGrid, values: Vec<C64>, hbar: f64) -> Result<Self> {
        if values.len() != axis.count() {
            return Err(Error::DimensionMismatch { expected: axis.count(), got: values.len() });
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { axis, values, hbar })
    }

    pub fn axis(&self) -> &AxisGrid {
        &self.axis
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Riemann sum `∫|ψ|² dx`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.axis.spacing()
    }

    /// `⟨self, other⟩ = ∫ conj(self)·other dx`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if !self.axis.same_as(&other.axis) {
            return Err(Error::IncompatibleGrids("wavefunctions live on different axes".into()));
        }
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.axis.spacing())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n > 0.0) {
            return Err(Error::ZeroInput);
        }
        let f = 1.0 / n.sqrt();
        Ok(Self { values: self.values.iter().map(|v| v * f).collect(), ..self.clone() })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub(crate) fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sq();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized(n));
        }
        Ok(())
    }

    fn check_boundary(self) -> Result<Self> {
        let edge = self.values[0].norm().max(self.values[self.values.len() - 1].norm()) * self.hbar.powf(0.25);
        if edge > BOUNDARY_THRESHOLD {
            return Err(Error::GridTooNarrow { boundary: edge, threshold: BOUNDARY_THRESHOLD });
        }
        Ok(self)
    }
}

/// Normalized Hermite functions `h_0..=h_n` at `ξ`, by the three-term
/// recurrence.
fn hermite_functions(n: usize, xi: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * xi * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// n-th harmonic-oscillator eigenfunction `ħ^{-1/4} h_n(x/√ħ)`.
pub fn fock_state(n: usize, axis: &AxisGrid, hbar: f64) -> Result<WaveFunctionGrid> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    let scale = hbar.powf(-0.25);
    let sq = hbar.sqrt();
    let values = axis.points().into_iter().map(|x| C64::new(scale * hermite_functions(n, x / sq), 0.0)).collect();
    WaveFunctionGrid::new(*axis, values, hbar)?.check_boundary()
}

/// Squeezed coherent state `(s/πħ)^{1/4} exp(−s(x−x₀)²/2ħ + i p₀x/ħ)`.
pub fn gaussian_state(x0: f64, p0: f64, squeeze: f64, axis: &AxisGrid, hbar: f64) -> Result<WaveFunctionGrid> {
    if !(squeeze > 0.0 && hbar > 0.0) {
        return Err(Error::InvalidParameter("squeeze and hbar must be positive".into()));
    }
    let norm = (squeeze / (PI * hbar)).powf(0.25);
    let values = axis
        .points()
        .into_iter()
        .map(|x| {
            let amp = norm * (-squeeze * (x - x0).powi(2) / (2.0 * hbar)).exp();
            C64::from_polar(amp, p0 * x / hbar)
        })
        .collect();
    WaveFunctionGrid::new(*axis, values, hbar)?.check_boundary()
}

/// Unitary ħ-scaled Fourier transform
/// `Fψ(p) = (2πħ)^{-1/2} ∫ e^{−ipx/ħ} ψ(x) dx`, sampled on the same axis.
pub fn fourier_transform(psi: &WaveFunctionGrid) -> WaveFunctionGrid {
    let xs = psi.axis.points();
    let dx = psi.axis.spacing();
    let pref = dx / (2.0 * PI * psi.hbar).sqrt();
    let values = xs
        .iter()
        .map(|&p| {
            let s: C64 = xs.iter().zip(&psi.values).map(|(&x, v)| C64::from_polar(1.0, -p * x / psi.hbar) * v).sum();
            s * pref
        })
        .collect();
    WaveFunctionGrid { values, ..psi.clone() }
}

/// Pure states that have closed-form wavefunctions and Wigner functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PureState {
    Fock {
        n: usize,
    },
    Gaussian {
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        p0: f64,
        #[serde(default = "unit")]
        squeeze: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl PureState {
    pub fn wavefunction(&self, axis: &AxisGrid, hbar: f64) -> Result<WaveFunctionGrid> {
        match *self {
            PureState::Fock { n } => fock_state(n, axis, hbar),
            PureState::Gaussian { x0, p0, squeeze } => gaussian_state(x0, p0, squeeze, axis, hbar),
        }
    }
}
