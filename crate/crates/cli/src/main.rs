//! `wignerpos` command-line front end.
//!
//! Every subcommand reads a state description (JSON, `-` for stdin) and
//! writes one JSON document to stdout or `-o`. Matrices are row-major nested
//! arrays: `[[1.0, 0.0], [0.0, 1.0]]`.
//!
//! Exit status: 0 when the input is consistent with a quantum state or the
//! checks are inconclusive, 2 when some check proves it is not a state, and
//! 1 on malformed input.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use wignerpos::analysis::{self, AnalysisOptions, Classification};
use wignerpos::blobs::find_contained_blob;
use wignerpos::hardy::fit_dominating_gaussian;
use wignerpos::klm::klm_check;
use wignerpos::nalgebra::DMatrix;
use wignerpos::states::io::{to_csv, write_grid, GridManifest};
use wignerpos::states::operator_spectrum_oracle;
use wignerpos::uncertainty::{covariance_from_grid, hbar_sweep};
use wignerpos::{EllipsoidSpec, PhaseSpaceContext, StateSpec, WignerGrid};

#[derive(Parser)]
#[command(name = "wignerpos", version, about = "Decide whether phase-space functions can be Wigner functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and classify the input.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_klm: bool,
        #[arg(long)]
        no_domination: bool,
        #[arg(long)]
        no_oracle: bool,
    },
    /// Sample the Wigner function. With `-o foo.json` writes a manifest and
    /// `foo.csv`; otherwise prints the manifest with inline values.
    Wigner {
        #[command(flatten)]
        common: Common,
    },
    /// Uncertainty verdict of `W ↦ λ²W(λz)` over a range of λ.
    RescaleSweep {
        #[command(flatten)]
        common: Common,
        /// `start:end:step`, inclusive.
        #[arg(long)]
        lambdas: String,
        /// Also run the operator oracle at each λ.
        #[arg(long)]
        oracle: bool,
    },
    /// Randomised search for KLM violations.
    Klm {
        #[command(flatten)]
        common: Common,
    },
    /// Fit the dominating Gaussian.
    Dominate {
        #[command(flatten)]
        common: Common,
    },
    /// Full spectrum of the reconstructed density operator.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Capacity and admissibility of the ellipsoid `Mz·z ≤ ħ`. Input is a
    /// matrix, or `{"m": [[..]], "hbar": ..}`.
    Capacity {
        input: PathBuf,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reinterpret a fixed grid at other values of ħ.
    HbarSweep {
        #[command(flatten)]
        common: Common,
        /// `start:end:step`, inclusive.
        #[arg(long)]
        hbars: String,
    },
}

#[derive(Args)]
struct Common {
    /// State description JSON, `-` for stdin.
    spec: PathBuf,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    grid_extent: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    cmax_factor: Option<f64>,
    #[arg(long)]
    tol_klm: Option<f64>,
    #[arg(long)]
    tol_oracle: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> AnalysisOptions {
        let d = AnalysisOptions::default();
        AnalysisOptions {
            hbar: self.hbar,
            grid_n: self.grid_n,
            grid_extent: self.grid_extent,
            seed: self.seed,
            max_order: self.max_order.unwrap_or(d.max_order),
            trials: self.trials.unwrap_or(d.trials),
            cmax_factor: self.cmax_factor.unwrap_or(d.cmax_factor),
            tol_klm: self.tol_klm.unwrap_or(d.tol_klm),
            tol_oracle: self.tol_oracle.unwrap_or(d.tol_oracle),
            ..d
        }
    }

    fn load(&self) -> Result<(StateSpec, PathBuf)> {
        let text = read_input(&self.spec)?;
        let spec =
            StateSpec::from_json(&text).with_context(|| format!("parsing state spec {}", self.spec.display()))?;
        let base = if self.spec.as_os_str() == "-" {
            PathBuf::from(".")
        } else {
            self.spec.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
        };
        Ok((spec, base))
    }

    fn grid(&self) -> Result<(StateSpec, WignerGrid)> {
        let (spec, base) = self.load()?;
        let w = analysis::build_grid(&spec, &self.options(), &base)?;
        Ok((spec, w))
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Writes through a temporary file in the target directory so readers never
/// see a partial report.
fn emit(value: &impl Serialize, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, text + "\n").with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path)?;
        }
    }
    Ok(())
}

fn exit_for(c: Classification) -> u8 {
    match c {
        Classification::ProvenNotAState => 2,
        _ => 0,
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Bare(Vec<Vec<f64>>),
    Tagged { m: Vec<Vec<f64>>, hbar: Option<f64> },
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square and non-empty");
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn capacity(input: &Path, hbar: Option<f64>, output: Option<&Path>) -> Result<u8> {
    let parsed: MatrixInput = serde_json::from_str(&read_input(input)?).context("parsing matrix")?;
    let (rows, file_hbar) = match parsed {
        MatrixInput::Bare(m) => (m, None),
        MatrixInput::Tagged { m, hbar } => (m, hbar),
    };
    let m = matrix_from_rows(&rows)?;
    if m.nrows() % 2 != 0 {
        bail!("matrix dimension must be even, got {}", m.nrows());
    }
    let ctx = PhaseSpaceContext::new(m.nrows() / 2, hbar.or(file_hbar).unwrap_or(1.0))?;
    let e = EllipsoidSpec::new(m, ctx)?;
    let projections = (0..ctx.dof()).map(|j| e.projection_area(j)).collect::<wignerpos::Result<Vec<_>>>()?;
    let sections = (0..ctx.dof()).map(|j| e.section_area(j)).collect::<wignerpos::Result<Vec<_>>>()?;
    let blob = find_contained_blob(&e).ok().map(|b| {
        let s = b.blob.symplectic().matrix();
        json!({
            "s": s.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
            "residual": b.residual,
        })
    });
    emit(
        &json!({
            "ellipsoid": e,
            "half_planck_area": std::f64::consts::PI * ctx.hbar(),
            "spectrum": e.spectrum(),
            "section_areas": sections,
            "projection_areas": projections,
            "contained_blob": blob,
        }),
        output,
    )?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { common, no_klm, no_domination, no_oracle } => {
            let (spec, base) = common.load()?;
            let opts = AnalysisOptions {
                run_klm: !no_klm,
                run_domination: !no_domination,
                run_oracle: !no_oracle,
                ..common.options()
            };
            let report = analysis::analyze(&spec, &opts, &base)?;
            emit(&report, common.output.as_deref())?;
            Ok(exit_for(report.classification))
        }
        Command::Wigner { common } => {
            let (_, w) = common.grid()?;
            match &common.output {
                Some(path) => write_grid(&w, path)?,
                None => {
                    let values = to_csv(&w)
                        .lines()
                        .map(|l| l.split(',').map(|t| t.parse::<f64>()).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?;
                    let m = GridManifest {
                        x_axis: *w.x_axis(),
                        p_axis: *w.p_axis(),
                        hbar: w.hbar(),
                        values_path: None,
                        values: Some(values),
                    };
                    emit(&m, None)?;
                }
            }
            Ok(0)
        }
        Command::RescaleSweep { common, lambdas, oracle } => {
            let (_, w) = common.grid()?;
            let ls = analysis::parse_range(&lambdas)?;
            let r = analysis::rescale_sweep(&w, &ls, oracle, common.options().tol_oracle)?;
            emit(&r, common.output.as_deref())?;
            Ok(0)
        }
        Command::Klm { common } => {
            let (_, w) = common.grid()?;
            let r = klm_check(&w, &common.options().klm())?;
            emit(&r, common.output.as_deref())?;
            Ok(if r.found_violation() { 2 } else { 0 })
        }
        Command::Dominate { common } => {
            let (_, w) = common.grid()?;
            let c = fit_dominating_gaussian(&w, common.options().cmax_factor)?;
            let ellipsoid = EllipsoidSpec::new(c.m.clone(), PhaseSpaceContext::new(1, w.hbar())?)?;
            let proven = c.verdict == wignerpos::Theorem1Verdict::NotAWignerDistribution;
            emit(&json!({ "certificate": c, "ellipsoid": ellipsoid }), common.output.as_deref())?;
            Ok(if proven { 2 } else { 0 })
        }
        Command::Oracle { common } => {
            let (_, w) = common.grid()?;
            let s = operator_spectrum_oracle(&w, common.options().tol_oracle)?;
            let positive = s.is_positive();
            emit(&json!({ "positive": positive, "spectrum": s }), common.output.as_deref())?;
            Ok(if positive { 0 } else { 2 })
        }
        Command::Capacity { input, hbar, output } => capacity(&input, hbar, output.as_deref()),
        Command::HbarSweep { common, hbars } => {
            let (_, w) = common.grid()?;
            let hs = analysis::parse_range(&hbars)?;
            let reports = hbar_sweep(&w, &hs)?;
            let base = covariance_from_grid(&w)?;
            emit(
                &json!({
                    "prepared_hbar": w.hbar(),
                    "sigma": base.sigma().row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
                    "reports": reports,
                }),
                common.output.as_deref(),
            )?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which would read as a verdict.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
