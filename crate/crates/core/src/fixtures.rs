//! States and non-states with known verdicts.
//!
//! The Narcowich–O'Connell function is defined through its symplectic
//! characteristic function
//! `G(x′, p′) = (1 − ½αx′² − ½βp′²) e^{−(α²x′⁴ + β²p′⁴)}`,
//! inverted here with the ħ-free kernel `(2π)^{-2} ∫ e^{−i(xx′+pp′)} G`.
//! It has unit trace and, for `αβ ≥ ħ²/4`, a covariance matrix that passes
//! every uncertainty test, yet its fourth momentum moment is `−24β²`, so it
//! is not the Wigner function of any state. The expression `−24α²` sometimes
//! quoted for this moment has α and β swapped; the two agree on the default
//! `α = β`.

use std::f64::consts::PI;

use log::warn;
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::states::{
    fock_wigner, mixture_wigner, rescale, AxisGrid, MixtureComponent, MixtureSpec, PureState, WaveFunctionGrid,
    WignerGrid,
};
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Largest boundary-to-peak ratio accepted for the Narcowich–O'Connell grid.
pub const NO_BOUNDARY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NarcowichOConnellParams {
    pub alpha: f64,
    pub beta: f64,
}

impl NarcowichOConnellParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha and beta must be positive, got {alpha}, {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    /// `α = β = ħ/2`, on the threshold `αβ = ħ²/4`.
    pub fn default_for(hbar: f64) -> Self {
        Self { alpha: hbar / 2.0, beta: hbar / 2.0 }
    }

    /// Whether `αβ ≥ ħ²/4`, the regime in which the covariance passes the
    /// uncertainty tests.
    pub fn in_uncertainty_regime(&self, hbar: f64) -> bool {
        self.alpha * self.beta >= hbar * hbar / 4.0 * (1.0 - 1e-12)
    }

    /// Default axis: the function is spread over `|x| ≲ 30√α`, with slowly
    /// decaying oscillating tails that carry the negative fourth moment.
    pub fn default_axis(&self) -> AxisGrid {
        AxisGrid::symmetric(45.0 * self.alpha.max(self.beta).sqrt(), 801).expect("positive parameters")
    }
}

/// `(1/2π)∫ e^{−ixk} k^{2j} e^{−a²k⁴} dk` for `j = 0, 1` at every point,
/// by the trapezoid rule on a symmetric k-grid. Returns both transforms and
/// the largest imaginary part seen.
fn quartic_transforms(a: f64, xs: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let kmax = (60.0 / (a * a)).powf(0.25);
    let xmax = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dk = (PI / (xmax + 10.0)).min(kmax / 400.0);
    let nk = (kmax / dk).ceil() as i64;
    let ks: Vec<f64> = (-nk..=nk).map(|k| k as f64 * dk).collect();
    let weights: Vec<f64> = ks.iter().map(|k| (-a * a * k.powi(4)).exp()).collect();
    let mut f0 = Vec::with_capacity(xs.len());
    let mut f2 = Vec::with_capacity(xs.len());
    let mut imag = 0.0f64;
    for &x in xs {
        let (mut s0, mut s2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (k, w) in ks.iter().zip(&weights) {
            let e = C64::from_polar(*w, -x * k);
            s0 += e;
            s2 += e * (k * k);
        }
        let (s0, s2) = (s0 * dk / (2.0 * PI), s2 * dk / (2.0 * PI));
        imag = imag.max(s0.im.abs()).max(s2.im.abs());
        f0.push(s0.re);
        f2.push(s2.re);
    }
    (f0, f2, imag)
}

/// Narcowich–O'Connell grid together with the largest imaginary residue of
/// the transform.
pub fn narcowich_oconnell_with_residue(
    params: &NarcowichOConnellParams,
    x_axis: &AxisGrid,
    p_axis: &AxisGrid,
    hbar: f64,
) -> Result<(WignerGrid, f64)> {
    let NarcowichOConnellParams { alpha, beta } = *params;
    for (axis, a) in [(x_axis, alpha), (p_axis, beta)] {
        let kmax = (60.0 / (a * a)).powf(0.25);
        if axis.spacing() > PI / kmax {
            return Err(Error::Resolution(format!(
                "axis spacing {} does not resolve the transform cut-off {kmax}",
                axis.spacing()
            )));
        }
    }
    let (ax, bx, ix) = quartic_transforms(alpha, &x_axis.points());
    let (ap, bp, ip) = quartic_transforms(beta, &p_axis.points());
    let values = DMatrix::from_fn(ax.len(), ap.len(), |i, j| {
        ax[i] * ap[j] - 0.5 * alpha * bx[i] * ap[j] - 0.5 * beta * ax[i] * bp[j]
    });
    let w = WignerGrid::new(*x_axis, *p_axis, values, hbar)?;
    let ratio = w.boundary_ratio();
    if ratio > NO_BOUNDARY_LIMIT {
        return Err(Error::GridTooNarrow { boundary: ratio, threshold: NO_BOUNDARY_LIMIT });
    }
    Ok((w, ix.max(ip)))
}

pub fn narcowich_oconnell_grid(
    params: &NarcowichOConnellParams,
    x_axis: &AxisGrid,
    p_axis: &AxisGrid,
    hbar: f64,
) -> Result<WignerGrid> {
    narcowich_oconnell_with_residue(params, x_axis, p_axis, hbar).map(|(w, _)| w)
}

/// `∫p⁴ W dx dp` as a Riemann sum. Warns when the outer tenth of the
/// momentum range carries more than 0.1% of it.
pub fn moment_p4(w: &WignerGrid) -> f64 {
    let marg = w.marginal_p();
    let ps = w.p_axis().points();
    let dp = w.p_axis().spacing();
    let n = ps.len();
    let band = (n / 20).max(1);
    let (mut total, mut tail) = (0.0, 0.0);
    for (j, (p, m)) in ps.iter().zip(&marg).enumerate() {
        let c = p.powi(4) * m * dp;
        total += c;
        if j < band || j >= n - band {
            tail += c;
        }
    }
    if tail.abs() > 1e-3 * total.abs() {
        warn!("fourth moment is tail dominated ({tail:e} of {total:e} from the grid edges)");
    }
    total
}

/// Constant function on `[−a, a]²`, scaled to unit grid mass. Compactly
/// supported, so it cannot be a Wigner function.
pub fn indicator_bump(half_width: f64, x_axis: &AxisGrid, p_axis: &AxisGrid, hbar: f64) -> Result<WignerGrid> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
    }
    let inside = |v: f64| v.abs() <= half_width * (1.0 + 1e-12);
    let w = WignerGrid::from_fn(*x_axis, *p_axis, hbar, |x, p| if inside(x) && inside(p) { 1.0 } else { 0.0 })?;
    let mass = w.trace();
    if mass == 0.0 {
        return Err(Error::Resolution(format!("no grid point inside [−{half_width}, {half_width}]²")));
    }
    WignerGrid::new(*x_axis, *p_axis, w.values() / mass, hbar)
}

/// Vacuum wavefunction cut off outside `|x| ≤ R√ħ` and renormalized.
pub fn truncated_gaussian(radius: f64, axis: &AxisGrid, hbar: f64) -> Result<WaveFunctionGrid> {
    let r = radius * hbar.sqrt();
    let values: Vec<C64> = axis
        .points()
        .into_iter()
        .map(|x| if x.abs() <= r { C64::new((-x * x / (2.0 * hbar)).exp(), 0.0) } else { C64::new(0.0, 0.0) })
        .collect();
    WaveFunctionGrid::new(*axis, values, hbar)?.normalized()
}

/// A named grid with its expected verdict under the operator oracle.
#[derive(Debug, Clone)]
pub struct NamedFixture {
    pub name: &'static str,
    pub grid: WignerGrid,
    pub is_state: bool,
}

/// Calibration set on the default axes at the given ħ.
pub fn standard_fixtures(hbar: f64) -> Result<Vec<NamedFixture>> {
    let a = AxisGrid::default_for(hbar);
    let vacuum = fock_wigner(0, &a, &a, hbar)?;
    let fock1 = fock_wigner(1, &a, &a, hbar)?;
    let mix = MixtureSpec::new(vec![
        MixtureComponent { weight: 0.5, state: PureState::Fock { n: 0 } },
        MixtureComponent { weight: 0.5, state: PureState::Fock { n: 1 } },
    ])?;
    let no = NarcowichOConnellParams::default_for(hbar);
    let no_axis = no.default_axis();
    let sq = hbar.sqrt();
    Ok(vec![
        NamedFixture { name: "vacuum", grid: vacuum.clone(), is_state: true },
        NamedFixture { name: "fock1", grid: fock1.clone(), is_state: true },
        NamedFixture {
            name: "squeezed",
            // axes span the same number of standard deviations in x and p
            grid: PureState::Gaussian { x0: 0.0, p0: 0.0, squeeze: 2.0 }.wigner(
                &AxisGrid::symmetric(a.max() / 2f64.sqrt(), a.count())?,
                &AxisGrid::symmetric(a.max() * 2f64.sqrt(), a.count())?,
                hbar,
            )?,
            is_state: true,
        },
        NamedFixture { name: "vacuum+fock1", grid: mixture_wigner(&mix, &a, &a, hbar)?, is_state: true },
        NamedFixture { name: "vacuum-rescaled-0.9", grid: rescale(&vacuum, 0.9)?, is_state: true },
        NamedFixture { name: "vacuum-rescaled-1.5", grid: rescale(&vacuum, 1.5)?, is_state: false },
        NamedFixture { name: "fock1-rescaled-1.2", grid: rescale(&fock1, 1.2)?, is_state: false },
        NamedFixture {
            name: "narcowich-oconnell",
            grid: narcowich_oconnell_grid(&no, &no_axis, &no_axis, hbar)?,
            is_state: false,
        },
        NamedFixture { name: "indicator-bump", grid: indicator_bump(sq, &a, &a, hbar)?, is_state: false },
    ])
}
