//! Gaussian bounds on wavefunctions and Wigner functions.
//!
//! Hardy: if `|ψ(x)| ≤ C e^{−ax²/2ħ}` and `|Fψ(p)| ≤ C e^{−bp²/2ħ}` then
//! `ab ≤ 1`. Its phase-space form: if `W(z) ≤ C e^{−Mz·z/ħ}` for a density
//! operator then the largest symplectic eigenvalue μ₁ of `M` is at most one.
//! Both are necessary conditions only.

use log::warn;
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::optim::nelder_mead;
use crate::states::{fourier_transform, AxisGrid, WaveFunctionGrid, WignerGrid};
use crate::symplectic::{symplectic_spectrum, SymplecticSpectrum};
use crate::uncertainty::covariance_from_grid;
use crate::{Error, Result};

/// Half-width of the boundary band around `μ₁ = 1` and `ab = 1`.
pub const THEOREM1_BAND: f64 = 0.02;
/// Default bound on `C` relative to the peak of `W`.
pub const DEFAULT_CMAX_FACTOR: f64 = 10.0;
/// Bound used for compactly supported inputs, where only a large `C` lets
/// a Gaussian dominate the plateau.
pub const COMPACT_CMAX_FACTOR: f64 = 100.0;
/// Default bound on `C` relative to the peak of `|ψ|` in the Hardy fit.
pub const DEFAULT_HARDY_CAP: f64 = 1.0;
/// Wavefunction samples below this fraction of the peak are ignored.
pub const HARDY_NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem1Verdict {
    Compatible,
    Boundary,
    NotAWignerDistribution,
}

impl Theorem1Verdict {
    pub fn from_mu1(mu1: f64) -> Self {
        if mu1 > 1.0 + THEOREM1_BAND {
            Self::NotAWignerDistribution
        } else if mu1 < 1.0 - THEOREM1_BAND {
            Self::Compatible
        } else {
            Self::Boundary
        }
    }
}

/// Gaussian decay rate; `Unbounded` when no sample constrains it, as for
/// compactly supported functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayRate {
    Finite(f64),
    Unbounded,
}

impl DecayRate {
    pub fn value(self) -> f64 {
        match self {
            DecayRate::Finite(v) => v,
            DecayRate::Unbounded => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyVerdict {
    Consistent,
    Boundary,
    /// `ab > 1`: no nonzero function has this pair of bounds.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyFit {
    pub a: DecayRate,
    pub b: DecayRate,
    /// Constants used for `ψ` and `Fψ`.
    pub c_position: f64,
    pub c_momentum: f64,
    /// `ab`, infinite when either rate is unbounded.
    pub product: f64,
    pub verdict: HardyVerdict,
}

/// Largest `a` with `|f(x)| ≤ C e^{−ax²/2ħ}` on the tail `|x| ≥ 2·rms`.
fn decay_rate(values: &[Complex<f64>], axis: &AxisGrid, hbar: f64, cap: f64) -> (DecayRate, f64) {
    let xs = axis.points();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let c = cap * peak;
    let mass: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let second: f64 = xs.iter().zip(values).map(|(x, v)| x * x * v.norm_sqr()).sum();
    let cut = 2.0 * (second / mass).sqrt();
    let mut a = f64::INFINITY;
    for (x, v) in xs.iter().zip(values) {
        let m = v.norm();
        if x.abs() < cut || m <= HARDY_NOISE_FLOOR * peak {
            continue;
        }
        a = a.min((2.0 * hbar * (c / m).ln() / (x * x)).max(0.0));
    }
    let rate = if a.is_finite() { DecayRate::Finite(a) } else { DecayRate::Unbounded };
    (rate, c)
}

/// Fits the Hardy pair `(a, b)` of a normalized wavefunction, with `C`
/// capped at `cap_factor·max|ψ|` (and likewise for `Fψ`).
pub fn hardy_fit(psi: &WaveFunctionGrid, cap_factor: f64) -> Result<HardyFit> {
    if psi.max_abs() == 0.0 {
        return Err(Error::ZeroInput);
    }
    if !(cap_factor >= 1.0) {
        return Err(Error::InvalidParameter(format!("cap factor must be at least 1, got {cap_factor}")));
    }
    psi.check_normalized()?;
    let (a, ca) = decay_rate(psi.values(), psi.axis(), psi.hbar(), cap_factor);
    let f = fourier_transform(psi);
    let (b, cb) = decay_rate(f.values(), f.axis(), f.hbar(), cap_factor);
    let product = match (a, b) {
        (DecayRate::Finite(x), DecayRate::Finite(y)) => x * y,
        (DecayRate::Finite(x), DecayRate::Unbounded) | (DecayRate::Unbounded, DecayRate::Finite(x)) if x == 0.0 => 0.0,
        _ => f64::INFINITY,
    };
    let verdict = if product > 1.0 + THEOREM1_BAND {
        HardyVerdict::Inconsistent
    } else if product >= 1.0 - THEOREM1_BAND {
        HardyVerdict::Boundary
    } else {
        HardyVerdict::Consistent
    };
    Ok(HardyFit { a, b, c_position: ca, c_momentum: cb, product, verdict })
}

/// A Gaussian `C e^{−Mz·z/ħ}` dominating `W` at every grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationCertificate {
    #[serde(serialize_with = "crate::json::rows")]
    pub m: DMatrix<f64>,
    pub c: f64,
    pub c_max: f64,
    pub hbar: f64,
    pub spectrum: SymplecticSpectrum<f64>,
    pub mu1: f64,
    pub verdict: Theorem1Verdict,
    /// `max(W − C e^{−Mz·z/ħ})` over the grid; never positive.
    pub max_violation: f64,
    /// Part of `μ₁` the grid cannot rule out as a box effect:
    /// `ln(C/max W) / min q̂` over positive boundary samples, with `q̂` the
    /// unit-determinant form. Zero when `W` vanishes on the boundary.
    pub box_allowance: f64,
    pub converged: bool,
    /// Objective evaluations over all starts.
    pub evaluations: usize,
}

pub fn theorem1_verdict(cert: &DominationCertificate) -> Theorem1Verdict {
    Theorem1Verdict::from_mu1(cert.mu1)
}

/// Unit-determinant direction `LLᵀ`, `L = [[e^s, 0], [c, e^{−s}]]`.
fn direction(v: &[f64]) -> [f64; 3] {
    let (e, c) = (v[0].exp(), v[1]);
    [e * e, c * e, c * c + 1.0 / (e * e)]
}

fn params_from(m: &[f64; 3]) -> [f64; 2] {
    let det = m[0] * m[2] - m[1] * m[1];
    let s = det.sqrt();
    let (m11, m12) = (m[0] / s, m[1] / s);
    let l11 = m11.sqrt();
    [l11.ln(), m12 / l11]
}

/// Fits the dominating Gaussian with the largest μ₁, subject to
/// `C ≤ c_max_factor·max W`.
///
/// For a unit-determinant direction `M̂` the largest admissible scale is
/// `t*(M̂) = min_{W(z)>0} (ln C_max − ln W(z)) / (M̂z·z/ħ)`, and for one
/// degree of freedom `μ₁(tM̂) = t`. The direction is optimised by a simplex
/// search from the identity and from the grid covariance.
pub fn fit_dominating_gaussian(w: &WignerGrid, c_max_factor: f64) -> Result<DominationCertificate> {
    let tr = w.trace();
    if (tr - 1.0).abs() > 1e-3 {
        return Err(Error::Unnormalized(tr));
    }
    if !(c_max_factor >= 1.0 && c_max_factor.is_finite()) {
        return Err(Error::InvalidParameter(format!("C_max factor must be at least 1, got {c_max_factor}")));
    }
    let ratio = w.boundary_ratio();
    if ratio > 1e-10 {
        warn!("Wigner grid boundary is {ratio:e} of peak; domination fit only covers the grid");
    }
    let hbar = w.hbar();
    let peak = w.max_value();
    let c_max = c_max_factor * peak;
    let ln_cmax = c_max.ln();
    let xs = w.x_axis().points();
    let ps = w.p_axis().points();
    let mut pts = Vec::new();
    for (j, &p) in ps.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let v = w.values()[(i, j)];
            if v > 0.0 {
                pts.push((x, p, ln_cmax - v.ln()));
            }
        }
    }
    let scale = |m: &[f64; 3]| -> f64 {
        let mut t = f64::INFINITY;
        for &(x, p, gap) in &pts {
            let q = (m[0] * x * x + 2.0 * m[1] * x * p + m[2] * p * p) / hbar;
            if q > 0.0 {
                t = t.min(gap / q);
            }
        }
        t
    };
    let mut starts = vec![[0.0, 0.0], [0.5, 0.0], [-0.5, 0.0]];
    if let Ok(cov) = covariance_from_grid(w) {
        let s = cov.sigma();
        let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
        if det > 0.0 {
            starts.push(params_from(&[s[(1, 1)] / det, -s[(0, 1)] / det, s[(0, 0)] / det]));
        }
    }
    let mut evaluations = 0;
    let mut best: Option<([f64; 3], f64, bool)> = None;
    for s in starts {
        let mut obj = |v: &[f64]| {
            evaluations += 1;
            -scale(&direction(v))
        };
        let r = nelder_mead(&mut obj, &s, 0.3, 1e-12, 400);
        let dir = direction(&r.x);
        let t = -r.value;
        if best.as_ref().is_none_or(|(_, bt, _)| t > *bt) {
            best = Some((dir, t, r.converged));
        }
    }
    let (dir, t, converged) = best.expect("at least one start");
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NotPositiveDefinite(format!("no dominating Gaussian with C ≤ {c_max:e} (best scale {t})")));
    }
    let t = t * (1.0 - 1e-10);
    let m = DMatrix::from_row_slice(2, 2, &[t * dir[0], t * dir[1], t * dir[1], t * dir[2]]);
    let q = |x: f64, p: f64| (m[(0, 0)] * x * x + 2.0 * m[(0, 1)] * x * p + m[(1, 1)] * p * p) / hbar;
    let mut c = 0.0f64;
    for &(x, p, gap) in &pts {
        c = c.max((ln_cmax - gap + q(x, p)).exp());
    }
    let c = c * (1.0 + 1e-12);
    let mut max_violation = f64::NEG_INFINITY;
    for (j, &p) in ps.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            max_violation = max_violation.max(w.values()[(i, j)] - c * (-q(x, p)).exp());
        }
    }
    let (nx, np) = (xs.len(), ps.len());
    let mut q_edge = f64::INFINITY;
    for (j, &p) in ps.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let edge = i == 0 || j == 0 || i == nx - 1 || j == np - 1;
            if edge && w.values()[(i, j)] > 0.0 {
                q_edge = q_edge.min((dir[0] * x * x + 2.0 * dir[1] * x * p + dir[2] * p * p) / hbar);
            }
        }
    }
    let box_allowance = if q_edge.is_finite() { (c / peak).ln().max(0.0) / q_edge } else { 0.0 };
    let spectrum = symplectic_spectrum(&m)?;
    let mu1 = spectrum.max();
    Ok(DominationCertificate {
        m,
        c,
        c_max,
        hbar,
        spectrum,
        mu1,
        verdict: Theorem1Verdict::from_mu1(mu1),
        max_violation,
        box_allowance,
        converged,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactSupport {
    pub compact: bool,
    /// `[x_lo, x_hi, p_lo, p_hi]` bounding the samples above threshold.
    pub support: Option<[f64; 4]>,
    pub threshold: f64,
}

/// Flags `W` as compactly supported when every sample with
/// `|W| > threshold·max|W|` lies strictly inside the grid.
pub fn compact_support_flag(w: &WignerGrid, threshold: f64) -> CompactSupport {
    let cut = threshold * w.max_abs();
    let (nx, np) = w.values().shape();
    let (mut ilo, mut ihi, mut jlo, mut jhi) = (usize::MAX, 0, usize::MAX, 0);
    for j in 0..np {
        for i in 0..nx {
            if w.values()[(i, j)].abs() > cut {
                ilo = ilo.min(i);
                ihi = ihi.max(i);
                jlo = jlo.min(j);
                jhi = jhi.max(j);
            }
        }
    }
    if ilo == usize::MAX {
        return CompactSupport { compact: false, support: None, threshold };
    }
    let compact = ilo > 0 && jlo > 0 && ihi < nx - 1 && jhi < np - 1;
    let (xa, pa) = (w.x_axis(), w.p_axis());
    CompactSupport { compact, support: Some([xa.point(ilo), xa.point(ihi), pa.point(jlo), pa.point(jhi)]), threshold }
}
