//! Finite-order KLM conditions: for every choice of points `z_1..z_m` the
//! matrix `F_jk = e^{(iħ/2)σ(z_j, z_k)} F_σW(z_j − z_k)` of a density
//! operator is positive semidefinite. A negative eigenvalue at any order is
//! a certificate that `W` is not a Wigner function; the absence of one at
//! finite order proves nothing.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::states::{symplectic_fourier, CharacteristicFunction, WignerGrid};
use crate::symplectic::sigma;
use crate::uncertainty::covariance_from_grid;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Threshold on the smallest eigenvalue for a violation.
pub const KLM_TOL: f64 = 1e-6;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ORDER: usize = 3;
pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStrategy {
    Random,
    Lattice,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlmPointSet {
    pub points: Vec<Vec<f64>>,
    pub strategy: PointStrategy,
    pub seed: u64,
}

impl KlmPointSet {
    pub fn new(points: Vec<Vec<f64>>, strategy: PointStrategy, seed: u64) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::InvalidParameter("empty point set".into()))?;
        let dim = first.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidParameter(format!("points need even dimension, got {dim}")));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        for (j, a) in points.iter().enumerate() {
            if points[..j].iter().any(|b| b == a) {
                return Err(Error::InvalidParameter("points must be distinct".into()));
            }
        }
        Ok(Self { points, strategy, seed })
    }

    pub fn user(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points, PointStrategy::User, 0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlmMatrix {
    pub entries: DMatrix<C64>,
}

impl KlmMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }

    /// Eigenvalues (ascending) and eigenvectors of the Hermitian part.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
        (vals, vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0[0]
    }

    /// `v† F v` for a unit vector `v`.
    pub fn quadratic_form(&self, v: &DVector<C64>) -> f64 {
        (v.adjoint() * &self.entries * v)[(0, 0)].re / v.norm_squared()
    }
}

pub fn klm_matrix(f: &dyn CharacteristicFunction, points: &KlmPointSet, hbar: f64) -> Result<KlmMatrix> {
    let dim = 2 * f.dof();
    let m = points.len();
    for p in &points.points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
    }
    let mut entries = DMatrix::zeros(m, m);
    let mut diff = vec![0.0; dim];
    for j in 0..m {
        for k in 0..m {
            let (zj, zk) = (&points.points[j], &points.points[k]);
            for (d, (a, b)) in diff.iter_mut().zip(zj.iter().zip(zk)) {
                *d = a - b;
            }
            if !f.supports(&diff) {
                return Err(Error::Resolution(format!(
                    "characteristic function is not resolved at {diff:?}; refine the grid"
                )));
            }
            let phase = 0.5 * hbar * sigma(zj, zk);
            entries[(j, k)] = C64::from_polar(1.0, phase) * f.eval(&diff);
        }
    }
    let out = KlmMatrix { entries };
    let r = out.hermiticity_residual();
    if r > HERMITICITY_TOL {
        log::warn!("KLM matrix hermiticity residual {r:e}");
    }
    Ok(out)
}

/// Points and eigenvector exhibiting a negative KLM quadratic form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlmWitness {
    pub points: Vec<Vec<f64>>,
    /// Unit eigenvector as `[re, im]` pairs.
    pub eigenvector: Vec<[f64; 2]>,
    pub min_eigenvalue: f64,
    pub strategy: PointStrategy,
}

impl KlmWitness {
    /// Recomputes `v† F v` from scratch.
    pub fn reevaluate(&self, f: &dyn CharacteristicFunction, hbar: f64) -> Result<f64> {
        let set = KlmPointSet::new(self.points.clone(), self.strategy, 0)?;
        let m = klm_matrix(f, &set, hbar)?;
        let v = DVector::from_iterator(self.eigenvector.len(), self.eigenvector.iter().map(|c| C64::new(c[0], c[1])));
        Ok(m.quadratic_form(&v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlmOrderRecord {
    pub m: usize,
    pub trials: usize,
    pub worst_min_eigenvalue: f64,
    pub witness: Option<KlmWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlmOutcome {
    NoViolationFound,
    ViolationCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlmReport {
    pub seed: u64,
    pub max_order: usize,
    pub trials_per_order: usize,
    pub tolerance: f64,
    pub hbar: f64,
    /// Sign of the `σ` phase in `F_jk`.
    pub phase_sign: String,
    pub orders: Vec<KlmOrderRecord>,
    pub overall: KlmOutcome,
}

impl KlmReport {
    pub fn witness(&self) -> Option<&KlmWitness> {
        self.orders.iter().find_map(|o| o.witness.as_ref())
    }

    pub fn worst_min_eigenvalue(&self) -> f64 {
        self.orders.iter().map(|o| o.worst_min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    pub fn found_violation(&self) -> bool {
        self.overall == KlmOutcome::ViolationCertificate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlmOptions {
    pub max_order: usize,
    pub trials_per_order: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for KlmOptions {
    fn default() -> Self {
        Self { max_order: DEFAULT_MAX_ORDER, trials_per_order: DEFAULT_TRIALS, seed: 0, tol: KLM_TOL }
    }
}

/// Every fourth trial uses a square lattice through the origin, the rest
/// Gaussian clouds. Both are scaled to the width of the characteristic
/// function, roughly the inverse of the state's width.
fn sample_points(rng: &mut ChaCha8Rng, m: usize, trial: usize, width: f64) -> (Vec<Vec<f64>>, PointStrategy) {
    let scale = rng.random_range(0.4..2.0) / width;
    if trial % 4 == 3 {
        const LATTICE: [[f64; 2]; 9] = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [-1.0, 0.0],
            [0.0, -1.0],
            [-1.0, -1.0],
            [1.0, -1.0],
            [-1.0, 1.0],
        ];
        let pts = (0..m).map(|k| {
            let c = LATTICE[k % LATTICE.len()];
            let ring = (k / LATTICE.len() + 1) as f64;
            vec![c[0] * scale * ring, c[1] * scale * ring]
        });
        (pts.collect(), PointStrategy::Lattice)
    } else {
        let pts = (0..m)
            .map(|_| {
                let x: f64 = StandardNormal.sample(rng);
                let p: f64 = StandardNormal.sample(rng);
                vec![x * scale, p * scale]
            })
            .collect();
        (pts, PointStrategy::Random)
    }
}

/// Randomized, seeded search for a KLM violation up to `max_order`.
/// Stops at the first order that yields a certificate.
pub fn klm_check(w: &WignerGrid, opts: &KlmOptions) -> Result<KlmReport> {
    let tr = w.trace();
    if (tr - 1.0).abs() > 1e-3 {
        return Err(Error::Unnormalized(tr));
    }
    if opts.max_order == 0 || opts.trials_per_order == 0 {
        return Err(Error::InvalidParameter("max order and trials must be positive".into()));
    }
    let f = symplectic_fourier(w);
    let cov = covariance_from_grid(w)?;
    let s = cov.sigma();
    let width = (0.5 * (s[(0, 0)] + s[(1, 1)])).max(f64::MIN_POSITIVE).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut orders = Vec::new();
    let mut overall = KlmOutcome::NoViolationFound;
    'orders: for m in 1..=opts.max_order {
        let mut record = KlmOrderRecord { m, trials: 0, worst_min_eigenvalue: f64::INFINITY, witness: None };
        for trial in 0..opts.trials_per_order {
            let (pts, strategy) = sample_points(&mut rng, m, trial, width);
            record.trials += 1;
            let Ok(set) = KlmPointSet::new(pts, strategy, opts.seed) else { continue };
            let km = klm_matrix(&f, &set, w.hbar())?;
            let (vals, vecs) = km.eigen();
            if vals[0] < record.worst_min_eigenvalue {
                record.worst_min_eigenvalue = vals[0];
            }
            if vals[0] < -opts.tol {
                let v = vecs.column(0);
                record.witness = Some(KlmWitness {
                    points: set.points,
                    eigenvector: v.iter().map(|c| [c.re, c.im]).collect(),
                    min_eigenvalue: vals[0],
                    strategy,
                });
                orders.push(record);
                overall = KlmOutcome::ViolationCertificate;
                break 'orders;
            }
            if m == 1 {
                // the single-point matrix is F(0) for every point
                break;
            }
        }
        orders.push(record);
    }
    Ok(KlmReport {
        seed: opts.seed,
        max_order: opts.max_order,
        trials_per_order: opts.trials_per_order,
        tolerance: opts.tol,
        hbar: w.hbar(),
        phase_sign: "+".into(),
        orders,
        overall,
    })
}
