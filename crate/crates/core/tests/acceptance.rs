//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wignerpos::analysis::{analyze_grid, rescale_sweep, AnalysisOptions, Classification};
use wignerpos::blobs::EllipsoidSpec;
use wignerpos::fixtures::{
    indicator_bump, moment_p4, narcowich_oconnell_grid, standard_fixtures, NarcowichOConnellParams,
};
use wignerpos::hardy::{compact_support_flag, fit_dominating_gaussian, theorem1_verdict, DEFAULT_CMAX_FACTOR};
use wignerpos::klm::{klm_check, KlmOptions};
use wignerpos::states::{
    fock_state, fock_wigner, fourier_transform, operator_spectrum_oracle, rescale, symplectic_fourier, wigner_of_pure,
    AxisGrid, ORACLE_TOL,
};
use wignerpos::symplectic::{random_spd, random_symplectic, standard_form, williamson};
use wignerpos::uncertainty::{
    check_quantum_psd, check_rs, check_williamson_criterion, covariance_from_grid, hbar_sweep, lambda_star,
    random_covariance,
};
use wignerpos::{CovarianceMatrix, PhaseSpaceContext, Theorem1Verdict, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn frob(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Symplectic eigenvalues as moduli of the eigenvalues of `JM`, which come
/// in pairs `±iν`.
fn spectrum_via_jm(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows() / 2;
    let jm = standard_form::<f64>(n) * m;
    let mut v: Vec<f64> = jm.complex_eigenvalues().iter().map(|c| c.norm()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

fn vacuum(hbar: f64) -> wignerpos::WignerGrid {
    let a = AxisGrid::default_for(hbar);
    fock_wigner(0, &a, &a, hbar).unwrap()
}

fn fock1_grid(n: usize) -> wignerpos::WignerGrid {
    let a = AxisGrid::symmetric(8.0, n).unwrap();
    fock_wigner(1, &a, &a, 1.0).unwrap()
}

fn c1_williamson() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_rec, mut worst_symp, mut worst_spec) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..500 {
        let dof = 1 + k % 3;
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let m = random_spd(&mut rng, 2 * dof, 0.2) * scale;
        let w = williamson(&m).map_err(e)?;
        let s = w.s.matrix();
        let j = standard_form::<f64>(dof);
        let rec = frob(&(s.transpose() * w.diagonal() * s - &m)) / frob(&m);
        let symp = (s.transpose() * &j * s - &j).amax();
        let oracle = spectrum_via_jm(&m);
        let spec = w.lambda.values().iter().zip(&oracle).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
        worst_rec = worst_rec.max(rec);
        worst_symp = worst_symp.max(symp);
        worst_spec = worst_spec.max(spec);
        ensure!(rec <= 1e-9 && symp <= 1e-9, "case {k} (N={dof}): reconstruction {rec:e}, symplecticity {symp:e}");
        ensure!(spec <= 1e-8, "case {k}: spectrum differs from the JM eigenvalues by {spec:e}");
    }
    Ok(format!(
        "500 matrices; max reconstruction {worst_rec:.1e}, symplecticity {worst_symp:.1e}, spectrum vs JM {worst_spec:.1e}"
    ))
}

fn c2_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let hbar = 1.0;
    let (mut compared, mut banded, mut fails) = (0, 0, 0);
    for k in 0..1000 {
        let dof = 1 + k % 2;
        let ctx = PhaseSpaceContext::new(dof, hbar).map_err(e)?;
        let sigma = random_covariance(&mut rng, dof, hbar, 0.5, 1.6);
        let cov = CovarianceMatrix::centered(sigma, ctx).map_err(e)?;
        let psd = check_quantum_psd(&cov);
        let wc = check_williamson_criterion(&cov).map_err(e)?;
        if psd.min_eigenvalue.abs() < 1e-10 || (wc.nu_min - hbar / 2.0).abs() < 1e-10 {
            banded += 1;
            continue;
        }
        compared += 1;
        let (a, b) = (psd.min_eigenvalue >= 0.0, wc.nu_min >= hbar / 2.0);
        ensure!(a == b, "case {k}: psd min {} vs nu_min {}", psd.min_eigenvalue, wc.nu_min);
        if dof == 1 {
            ensure!(check_rs(&cov).verdict.passes() == a, "case {k}: N=1 Robertson–Schrödinger disagrees");
        }
        fails += usize::from(!a);
    }
    ensure!(fails > 100 && compared - fails > 100, "sample is one-sided: {fails} failing of {compared}");

    let mut admissible = 0;
    for k in 0..1000 {
        let dof = 1 + k % 2;
        let ctx = PhaseSpaceContext::new(dof, hbar).map_err(e)?;
        let sigma = random_covariance(&mut rng, dof, hbar, 0.5, 1.6);
        let m = sigma.try_inverse().ok_or("singular")? * (hbar / 2.0);
        let m = (&m + m.transpose()) * 0.5;
        let ell = EllipsoidSpec::new(m.clone(), ctx).map_err(e)?;
        let back = m.try_inverse().ok_or("singular")? * (hbar / 2.0);
        let cov = CovarianceMatrix::centered((&back + back.transpose()) * 0.5, ctx).map_err(e)?;
        let psd = check_quantum_psd(&cov);
        if (ell.mu1() - 1.0).abs() < 1e-10 || psd.min_eigenvalue.abs() < 1e-10 {
            continue;
        }
        ensure!(
            ell.is_admissible() == (psd.min_eigenvalue >= 0.0),
            "M case {k}: mu1 {} psd {}",
            ell.mu1(),
            psd.min_eigenvalue
        );
        admissible += usize::from(ell.is_admissible());
    }
    Ok(format!(
        "{compared} covariances agree ({banded} in band, {fails} violating); 1000 ellipsoids agree ({admissible} admissible)"
    ))
}

fn c3_vacuum() -> Outcome {
    let w = vacuum(1.0);
    let tr = w.trace();
    ensure!((tr - 1.0).abs() <= 1e-6, "trace {tr}");
    let cov = covariance_from_grid(&w).map_err(e)?;
    let dev = (cov.sigma() - DMatrix::identity(2, 2) * 0.5).amax();
    ensure!(dev <= 1e-4, "covariance off by {dev:e}");
    let opts = KlmOptions { max_order: 5, ..KlmOptions::default() };
    let klm = klm_check(&w, &opts).map_err(e)?;
    ensure!(!klm.found_violation(), "KLM reported a violation");
    let worst = klm.worst_min_eigenvalue();
    ensure!(worst >= -1e-8, "KLM worst min eigenvalue {worst:e}");
    let cert = fit_dominating_gaussian(&w, DEFAULT_CMAX_FACTOR).map_err(e)?;
    ensure!((cert.mu1 - 1.0).abs() <= 0.02, "mu1 {}", cert.mu1);
    let spec = operator_spectrum_oracle(&w, ORACLE_TOL).map_err(e)?;
    let ev = &spec.eigenvalues;
    let rest = ev[1..].iter().map(|v| v.abs()).fold(0.0, f64::max);
    ensure!((ev[0] - 1.0).abs() <= 1e-4 && rest <= 1e-4, "oracle head {:?}", &ev[..3]);
    Ok(format!(
        "trace-1 {:.1e}, Σ dev {dev:.1e}, KLM worst {worst:.2e} (m≤5), mu1 {:.4}, oracle λ0 {:.6} rest ≤ {rest:.1e}",
        tr - 1.0,
        cert.mu1,
        ev[0]
    ))
}

fn c4_manko() -> Outcome {
    let lambda = 1.2;
    let mut mins = Vec::new();
    for n in [257, 513] {
        let w = rescale(&fock1_grid(n), lambda).map_err(e)?;
        let cov = covariance_from_grid(&w).map_err(e)?;
        ensure!(check_rs(&cov).verdict.passes(), "RS fails on {n} grid");
        ensure!(check_quantum_psd(&cov).passes(), "(uc) fails on {n} grid");
        let nu = check_williamson_criterion(&cov).map_err(e)?.nu_min;
        let expected = 1.5 / 1.44;
        ensure!((nu - expected).abs() < 1e-4, "nu_min {nu} vs {expected}");
        let min = operator_spectrum_oracle(&w, ORACLE_TOL).map_err(e)?.min_eigenvalue;
        ensure!(min <= -1e-3, "oracle min {min} on {n} grid");
        mins.push(min);
    }
    let ratio = mins[0] / mins[1];
    ensure!((0.5..=2.0).contains(&ratio), "grid ratio {ratio}");
    Ok(format!("nu_min = 1.5/1.44 passes; oracle min {:.4} (257) / {:.4} (513)", mins[0], mins[1]))
}

fn c5_thresholds() -> Outcome {
    let ctx = PhaseSpaceContext::new(1, 1.0).map_err(e)?;
    let vac = CovarianceMatrix::centered(DMatrix::identity(2, 2) * 0.5, ctx).map_err(e)?;
    let f1 = CovarianceMatrix::centered(DMatrix::identity(2, 2) * 1.5, ctx).map_err(e)?;
    let lv: f64 = lambda_star(&vac).map_err(e)?.value;
    let lf: f64 = lambda_star(&f1).map_err(e)?.value;
    ensure!((lv - 1.0).abs() <= 1e-10, "vacuum λ* {lv}");
    ensure!((lf - 3f64.sqrt()).abs() <= 1e-10, "fock1 λ* {lf}");

    let mut flips = Vec::new();
    for (w, exact, from) in [(vacuum(1.0), 1.0, 0.8), (fock1_grid(257), 3f64.sqrt(), 1.5)] {
        let step = 0.02;
        let lambdas: Vec<f64> = (0..=20).map(|k| from + k as f64 * step).collect();
        let r = rescale_sweep(&w, &lambdas, false, ORACLE_TOL).map_err(e)?;
        let [lo, hi] = r.flip.ok_or("no verdict flip")?;
        ensure!(lo <= exact && exact < hi, "flip [{lo}, {hi}] misses λ* = {exact}");
        ensure!(lo <= r.lambda_star && r.lambda_star < hi, "flip misses grid λ* {}", r.lambda_star);
        flips.push(format!("[{lo:.2}, {hi:.2}]"));
    }
    Ok(format!("λ*(vacuum) = {lv}, λ*(fock1) = {lf:.12}; sweep flips at {} and {}", flips[0], flips[1]))
}

fn c6_domination_scaling() -> Outcome {
    let v = vacuum(1.0);
    let mut parts = Vec::new();
    for lambda in [0.8, 0.9, 1.0, 1.05, 1.25, 1.5, 2.0] {
        let cert = fit_dominating_gaussian(&rescale(&v, lambda).map_err(e)?, DEFAULT_CMAX_FACTOR).map_err(e)?;
        let target = lambda * lambda;
        if [1.25, 1.5, 2.0].contains(&lambda) {
            ensure!((cert.mu1 - target).abs() <= 0.05 * target, "λ={lambda}: mu1 {} vs {target}", cert.mu1);
        }
        let not_wigner = theorem1_verdict(&cert) == Theorem1Verdict::NotAWignerDistribution;
        ensure!(not_wigner == (lambda > 1.02), "λ={lambda}: verdict {:?} (mu1 {})", cert.verdict, cert.mu1);
        parts.push(format!("{lambda}→{:.3}", cert.mu1));
    }
    Ok(format!("mu1: {}", parts.join(", ")))
}

fn c7_klm() -> Outcome {
    let v = vacuum(1.0);
    let mut parts = Vec::new();
    for lambda in [1.2, 1.5, 2.0] {
        let w = rescale(&v, lambda).map_err(e)?;
        let opts = KlmOptions::default();
        ensure!(opts.max_order <= 3 && opts.trials_per_order <= 200, "default budget too large");
        let a = klm_check(&w, &opts).map_err(e)?;
        let b = klm_check(&w, &opts).map_err(e)?;
        ensure!(a == b, "λ={lambda}: reruns differ");
        let wit = a.witness().ok_or(format!("λ={lambda}: no certificate"))?;
        let again = wit.reevaluate(&symplectic_fourier(&w), w.hbar()).map_err(e)?;
        ensure!(again < -opts.tol, "λ={lambda}: certificate re-evaluates to {again}");
        parts.push(format!("{lambda}: m={} min {:.3e}", wit.points.len(), wit.min_eigenvalue));
    }
    Ok(parts.join("; "))
}

fn series_p4(beta: f64) -> f64 {
    // Coefficient of t⁴ in (1 − βt²/2)·Σ_k (−β²t⁴)^k/k!, times 4!.
    let poly = [1.0, 0.0, -0.5 * beta, 0.0, 0.0];
    let exp = [1.0, 0.0, 0.0, 0.0, -beta * beta];
    24.0 * (0..=4).map(|k| poly[k] * exp[4 - k]).sum::<f64>()
}

fn c8_narcowich_oconnell() -> Outcome {
    let params = NarcowichOConnellParams::new(0.5, 0.5).map_err(e)?;
    let a = params.default_axis();
    let w = narcowich_oconnell_grid(&params, &a, &a, 1.0).map_err(e)?;
    let cov = covariance_from_grid(&w).map_err(e)?;
    ensure!(check_rs(&cov).verdict.passes(), "RS fails");
    ensure!(check_quantum_psd(&cov).passes(), "(uc) fails");
    let m4 = moment_p4(&w);
    let oracle = series_p4(params.beta);
    ensure!(m4 < 0.0 && (m4 - oracle).abs() <= 0.02 * oracle.abs(), "p4 {m4} vs series {oracle}");
    let min = operator_spectrum_oracle(&w, ORACLE_TOL).map_err(e)?.min_eigenvalue;
    ensure!(min < -1e-4, "oracle min {min}");
    Ok(format!("RS and (uc) pass; <p⁴> = {m4:.4} (series {oracle}); oracle min {min:.4}"))
}

fn c9_fourier() -> Outcome {
    let a = AxisGrid::default_for(1.0);
    let psi = fock_state(1, &a, 1.0).map_err(e)?;
    let w = wigner_of_pure(&psi).map_err(e)?;
    let wf = wigner_of_pure(&fourier_transform(&psi)).map_err(e)?;
    let rot = w.rotated_quarter().map_err(e)?;
    let err = (wf.values() - rot.values()).amax();
    ensure!(err <= 1e-5, "sup-norm {err:e}");
    Ok(format!("sup |W[Fψ] − W∘R| = {err:.1e}"))
}

fn c10_capacity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for k in 0..500 {
        let dof = 1 + k % 3;
        let ctx = PhaseSpaceContext::new(dof, 1.0).map_err(e)?;
        let m = random_spd(&mut rng, 2 * dof, 0.3);
        let s = random_symplectic(rng.random(), dof).map_err(e)?;
        let e1 = EllipsoidSpec::new(m, ctx).map_err(e)?;
        let e2 = e1.transformed(&s).map_err(e)?;
        let rel = (e1.capacity() - e2.capacity()).abs() / e1.capacity();
        worst = worst.max(rel);
        ensure!(rel <= 1e-9, "case {k}: capacities {} vs {}", e1.capacity(), e2.capacity());
    }
    let mut checked = Vec::new();
    for f in standard_fixtures(1.0).map_err(e)? {
        if !operator_spectrum_oracle(&f.grid, ORACLE_TOL).map_err(e)?.is_positive() {
            continue;
        }
        let cert = fit_dominating_gaussian(&f.grid, DEFAULT_CMAX_FACTOR).map_err(e)?;
        let ell = EllipsoidSpec::new(cert.m.clone(), PhaseSpaceContext::new(1, 1.0).map_err(e)?).map_err(e)?;
        let c = ell.capacity();
        ensure!(c >= 0.98 * PI, "{}: capacity {c} below πħ", f.name);
        checked.push(format!("{} {:.3}π", f.name, c / PI));
    }
    ensure!(checked.len() >= 4, "only {} fixtures passed the oracle", checked.len());
    Ok(format!("max relative capacity change {worst:.1e}; {}", checked.join(", ")))
}

fn c11_hbar() -> Outcome {
    let w = vacuum(1.0);
    let opts = AnalysisOptions::default();
    let r = analyze_grid(&w, &opts).map_err(e)?;
    ensure!(
        r.classification == Classification::ConsistentWithState,
        "at ħ=1: {:?} {:?}",
        r.classification,
        r.witnesses
    );
    let sweep = hbar_sweep(&w, &[1.0, 1.5]).map_err(e)?;
    ensure!(sweep[0].verdict.passes(), "(uc) fails at ħ=1");
    ensure!(sweep[1].verdict == Verdict::Fail, "(uc) at ħ=1.5 gives {:?}", sweep[1].verdict);
    Ok(format!("consistent at ħ=1; psd min eigenvalue {:.3} at ħ=1.5", sweep[1].psd_min_eigenvalue))
}

fn c12_compact() -> Outcome {
    let a = AxisGrid::default_for(1.0);
    let w = indicator_bump(1.0, &a, &a, 1.0).map_err(e)?;
    let flag = compact_support_flag(&w, 0.0);
    ensure!(flag.compact, "support flag false");
    let cert = fit_dominating_gaussian(&w, 100.0).map_err(e)?;
    ensure!(cert.mu1 > 1.0, "mu1 {}", cert.mu1);
    let min = operator_spectrum_oracle(&w, ORACLE_TOL).map_err(e)?.min_eigenvalue;
    ensure!(min < 0.0, "oracle min {min}");
    Ok(format!("compact on {:?}; mu1 {:.3} (C_max = 100·max W); oracle min {min:.4}", flag.support.unwrap(), cert.mu1))
}

fn main() {
    // Silence the default panic printer; failures are reported below.
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 12] = [
        ("williamson correctness", c1_williamson),
        ("criterion equivalence", c2_equivalence),
        ("vacuum calibration", c3_vacuum),
        ("rescaled fock1 passes uncertainty but is not positive", c4_manko),
        ("rescaling thresholds", c5_thresholds),
        ("domination scaling", c6_domination_scaling),
        ("KLM violation detection", c7_klm),
        ("Narcowich-O'Connell end to end", c8_narcowich_oconnell),
        ("Fourier covariance", c9_fourier),
        ("capacity invariance and domination ellipsoids", c10_capacity),
        ("hbar dependence", c11_hbar),
        ("compact support", c12_compact),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {:>2} {name} ({secs:.1}s): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
