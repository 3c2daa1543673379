//! End-to-end positivity analysis of a phase-space function: builds the grid
//! from a state description, runs every check and classifies the result.

use std::path::{Path, PathBuf};

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::blobs::EllipsoidSpec;
use crate::fixtures::{moment_p4, narcowich_oconnell_grid, NarcowichOConnellParams};
use crate::hardy::{
    compact_support_flag, fit_dominating_gaussian, CompactSupport, DominationCertificate, Theorem1Verdict,
    COMPACT_CMAX_FACTOR, DEFAULT_CMAX_FACTOR,
};
use crate::klm::{klm_check, KlmOptions, KlmReport, DEFAULT_MAX_ORDER, DEFAULT_TRIALS, KLM_TOL};
use crate::states::{
    fock_wigner, io::read_grid, mixture_wigner, operator_spectrum_oracle, rescale, wigner_gaussian, AxisGrid,
    MixtureComponent, MixtureSpec, WignerGrid, ORACLE_TOL,
};
use crate::uncertainty::{
    check_quantum_psd, covariance_from_grid, lambda_star, uncertainty_report, CovarianceMatrix, UncertaintyReport,
    Verdict,
};
use crate::{Error, PhaseSpaceContext, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridOverride {
    /// Points per axis.
    #[serde(default)]
    pub n: Option<usize>,
    /// Half-width of both axes.
    #[serde(default)]
    pub extent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StateKind {
    Gaussian {
        #[serde(default)]
        mean: Option<[f64; 2]>,
        cov: [[f64; 2]; 2],
    },
    Fock {
        n: usize,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    Grid {
        manifest: PathBuf,
    },
    #[serde(rename = "narcowich-oconnell")]
    NarcowichOConnell {
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        beta: Option<f64>,
    },
}

/// State description read from JSON, e.g.
/// `{"type": "fock", "n": 1, "hbar": 1.0, "rescale": 1.2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridOverride>,
    /// Applies `W ↦ λ²W(λz)` after construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale: Option<f64>,
}

impl StateSpec {
    pub fn new(kind: StateKind) -> Self {
        Self { kind, hbar: None, grid: None, rescale: None }
    }

    pub fn with_rescale(mut self, lambda: f64) -> Self {
        self.rescale = Some(lambda);
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = Some(hbar);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        if let Some(h) = s.hbar {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter(format!("hbar must be positive, got {h}")));
            }
        }
        Ok(s)
    }
}

/// Settings shared by all checks. `None` fields fall back to the state
/// description and then to the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub hbar: Option<f64>,
    pub grid_n: Option<usize>,
    pub grid_extent: Option<f64>,
    pub seed: u64,
    pub max_order: usize,
    pub trials: usize,
    pub cmax_factor: f64,
    pub tol_klm: f64,
    pub tol_oracle: f64,
    pub run_klm: bool,
    pub run_domination: bool,
    pub run_oracle: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            hbar: None,
            grid_n: None,
            grid_extent: None,
            seed: 0,
            max_order: DEFAULT_MAX_ORDER,
            trials: DEFAULT_TRIALS,
            cmax_factor: DEFAULT_CMAX_FACTOR,
            tol_klm: KLM_TOL,
            tol_oracle: ORACLE_TOL,
            run_klm: true,
            run_domination: true,
            run_oracle: true,
        }
    }
}

impl AnalysisOptions {
    pub fn klm(&self) -> KlmOptions {
        KlmOptions { max_order: self.max_order, trials_per_order: self.trials, seed: self.seed, tol: self.tol_klm }
    }
}

fn axis_for(spec: &StateSpec, opts: &AnalysisOptions, default: AxisGrid) -> Result<AxisGrid> {
    let g = spec.grid.unwrap_or_default();
    let n = opts.grid_n.or(g.n).unwrap_or(default.count());
    let extent = opts.grid_extent.or(g.extent).unwrap_or(default.max());
    AxisGrid::symmetric(extent, n)
}

/// Samples the described function. Relative manifest paths are resolved
/// against `base`.
pub fn build_grid(spec: &StateSpec, opts: &AnalysisOptions, base: &Path) -> Result<WignerGrid> {
    let hbar = opts.hbar.or(spec.hbar).unwrap_or(1.0);
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    let w = match &spec.kind {
        StateKind::Gaussian { mean, cov } => {
            let a = axis_for(spec, opts, AxisGrid::default_for(hbar))?;
            let m = mean.unwrap_or([0.0, 0.0]);
            let c = CovarianceMatrix::new(
                DMatrix::from_row_slice(2, 2, &[cov[0][0], cov[0][1], cov[1][0], cov[1][1]]),
                DVector::from_vec(m.to_vec()),
                PhaseSpaceContext::new(1, hbar)?,
            )?;
            wigner_gaussian(&c, &a, &a)?
        }
        StateKind::Fock { n } => {
            let a = axis_for(spec, opts, AxisGrid::default_for(hbar))?;
            fock_wigner(*n, &a, &a, hbar)?
        }
        StateKind::Mixture { components } => {
            let a = axis_for(spec, opts, AxisGrid::default_for(hbar))?;
            mixture_wigner(&MixtureSpec::new(components.clone())?, &a, &a, hbar)?
        }
        StateKind::Grid { manifest } => {
            let path = if manifest.is_absolute() { manifest.clone() } else { base.join(manifest) };
            let w = read_grid(&path)?;
            match opts.hbar.or(spec.hbar) {
                Some(h) => w.with_hbar(h)?,
                None => w,
            }
        }
        StateKind::NarcowichOConnell { alpha, beta } => {
            let d = NarcowichOConnellParams::default_for(hbar);
            let params = NarcowichOConnellParams::new(alpha.unwrap_or(d.alpha), beta.unwrap_or(d.beta))?;
            let a = axis_for(spec, opts, params.default_axis())?;
            narcowich_oconnell_grid(&params, &a, &a, hbar)?
        }
    };
    match spec.rescale {
        Some(l) => rescale(&w, l),
        None => Ok(w),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    ConsistentWithState,
    ProvenNotAState,
    Inconclusive,
}

/// Evidence that no density operator has this Wigner function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    OracleNegativeEigenvalue { min_eigenvalue: f64 },
    KlmCertificate { order: usize, min_eigenvalue: f64 },
    DominationMu1 { mu1: f64 },
    UncertaintyViolation { psd_min_eigenvalue: f64 },
    NegativeFourthMoment { moment_p4: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    /// Ten largest eigenvalues.
    pub head: Vec<f64>,
    pub min_eigenvalue: f64,
    pub eigenvalue_sum: f64,
    pub tolerance: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceSummary {
    pub sigma: [[f64; 2]; 2],
    pub mean: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub x_axis: AxisGrid,
    pub p_axis: AxisGrid,
    pub hbar: f64,
    pub boundary_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub input: Option<StateSpec>,
    pub seed: u64,
    pub grid: GridSummary,
    pub trace: f64,
    pub covariance: CovarianceSummary,
    pub uncertainty: UncertaintyReport<f64>,
    pub moment_p4: f64,
    pub compact_support: CompactSupport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub klm: Option<KlmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domination: Option<DominationCertificate>,
    /// Ellipsoid `Mz·z ≤ ħ` of the dominating Gaussian, with its capacity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ellipsoid: Option<EllipsoidSpec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    /// Checks that could not run, with the reason.
    pub skipped: Vec<String>,
    pub witnesses: Vec<Witness>,
    pub classification: Classification,
}

impl PositivityReport {
    /// Process exit code: 2 for a proven non-state, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.classification {
            Classification::ProvenNotAState => 2,
            _ => 0,
        }
    }
}

/// Relative size below which a negative fourth moment is treated as
/// quadrature noise.
const P4_NOISE: f64 = 1e-6;

pub fn analyze(spec: &StateSpec, opts: &AnalysisOptions, base: &Path) -> Result<PositivityReport> {
    let w = build_grid(spec, opts, base)?;
    let mut report = analyze_grid(&w, opts)?;
    report.input = Some(spec.clone());
    Ok(report)
}

pub fn analyze_grid(w: &WignerGrid, opts: &AnalysisOptions) -> Result<PositivityReport> {
    let trace = w.trace();
    let cov = covariance_from_grid(w)?;
    let unc = uncertainty_report(&cov)?;
    let m4 = moment_p4(w);
    let compact = compact_support_flag(w, 0.0);
    let mut skipped = Vec::new();
    let mut witnesses = Vec::new();

    if unc.verdict == Verdict::Fail {
        witnesses.push(Witness::UncertaintyViolation { psd_min_eigenvalue: unc.psd_min_eigenvalue });
    }
    let p2 = cov.sigma()[(1, 1)] + cov.mean()[1].powi(2);
    if m4 < -P4_NOISE * (p2 * p2).max(f64::MIN_POSITIVE) {
        witnesses.push(Witness::NegativeFourthMoment { moment_p4: m4 });
    }

    let klm = if opts.run_klm {
        match klm_check(w, &opts.klm()) {
            Ok(r) => {
                if let Some(o) = r.orders.iter().find(|o| o.witness.is_some()) {
                    let wit = o.witness.as_ref().expect("checked");
                    witnesses.push(Witness::KlmCertificate { order: o.m, min_eigenvalue: wit.min_eigenvalue });
                }
                Some(r)
            }
            Err(e) => {
                skipped.push(format!("klm: {e}"));
                None
            }
        }
    } else {
        None
    };

    let (domination, ellipsoid) = if opts.run_domination {
        // A compactly supported W is dominated only with a large C.
        let factor = if compact.compact { opts.cmax_factor.max(COMPACT_CMAX_FACTOR) } else { opts.cmax_factor };
        match fit_dominating_gaussian(w, factor) {
            Ok(c) => {
                let robust = Theorem1Verdict::from_mu1(c.mu1 - c.box_allowance);
                if robust == Theorem1Verdict::NotAWignerDistribution {
                    witnesses.push(Witness::DominationMu1 { mu1: c.mu1 });
                }
                let e = EllipsoidSpec::new(c.m.clone(), PhaseSpaceContext::new(1, w.hbar())?).ok();
                (Some(c), e)
            }
            Err(e) => {
                skipped.push(format!("domination: {e}"));
                (None, None)
            }
        }
    } else {
        (None, None)
    };

    let oracle = if opts.run_oracle {
        match operator_spectrum_oracle(w, opts.tol_oracle) {
            Ok(s) => {
                if !s.is_positive() {
                    witnesses.push(Witness::OracleNegativeEigenvalue { min_eigenvalue: s.min_eigenvalue });
                }
                Some(OracleSummary {
                    head: s.eigenvalues.iter().take(10).copied().collect(),
                    min_eigenvalue: s.min_eigenvalue,
                    eigenvalue_sum: s.eigenvalues.iter().sum(),
                    tolerance: s.tolerance,
                    positive: s.is_positive(),
                })
            }
            Err(e) => {
                skipped.push(format!("oracle: {e}"));
                None
            }
        }
    } else {
        None
    };

    let classification = if !witnesses.is_empty() {
        Classification::ProvenNotAState
    } else if oracle.as_ref().is_some_and(|o| o.positive) && (trace - 1.0).abs() <= 1e-3 {
        Classification::ConsistentWithState
    } else {
        Classification::Inconclusive
    };
    for s in &skipped {
        warn!("skipped {s}");
    }
    let s = cov.sigma();
    Ok(PositivityReport {
        input: None,
        seed: opts.seed,
        grid: GridSummary {
            x_axis: *w.x_axis(),
            p_axis: *w.p_axis(),
            hbar: w.hbar(),
            boundary_ratio: w.boundary_ratio(),
        },
        trace,
        covariance: CovarianceSummary {
            sigma: [[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]],
            mean: [cov.mean()[0], cov.mean()[1]],
        },
        uncertainty: unc,
        moment_p4: m4,
        compact_support: compact,
        klm,
        domination,
        ellipsoid,
        oracle,
        skipped,
        witnesses,
        classification,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub psd_min_eigenvalue: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    /// Predicted threshold `√(2ν_min/ħ)` of the unscaled covariance.
    pub lambda_star: f64,
    pub points: Vec<SweepPoint>,
    /// Last passing and first failing λ, when the verdict flips.
    pub flip: Option<[f64; 2]>,
}

/// Parses `a:b:step` into the inclusive list `a, a+step, …, ≤ b`.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidParameter(format!("expected a:b:step, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (a, b, step) = (v[0], v[1], v[2]);
    if !(step > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| a + k as f64 * step).collect())
}

/// Rescales `w` by each λ and records the uncertainty verdict of the grid
/// covariance, optionally with the operator oracle.
pub fn rescale_sweep(w: &WignerGrid, lambdas: &[f64], with_oracle: bool, tol_oracle: f64) -> Result<SweepReport> {
    let base = covariance_from_grid(w)?;
    let star = lambda_star(&base)?.value;
    let mut points = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let r = rescale(w, l)?;
        let cov = covariance_from_grid(&r)?;
        let psd = check_quantum_psd(&cov);
        let oracle_min_eigenvalue =
            if with_oracle { Some(operator_spectrum_oracle(&r, tol_oracle)?.min_eigenvalue) } else { None };
        points.push(SweepPoint {
            lambda: l,
            psd_min_eigenvalue: psd.min_eigenvalue,
            verdict: psd.verdict,
            oracle_min_eigenvalue,
        });
    }
    let flip =
        points.windows(2).find(|p| p[0].verdict.passes() && !p[1].verdict.passes()).map(|p| [p[0].lambda, p[1].lambda]);
    Ok(SweepReport { lambda_star: star, points, flip })
}
