//! Kernel expressions on the bidisk, Gram matrices and positivity screens.
//!
//! A kernel is positive when every Gram matrix `(K(λ_i, λ_j))` on a finite
//! point set is positive semidefinite. Only the failure of positivity can be
//! certified from finitely many samples, so screens report either a
//! negativity certificate or "no counterexample found".

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipoly::{BiPoly, Point2, Var};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sampling::{self, SAMPLE_RADIUS};

/// Default relative PSD tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Symbols of dBR-type kernels must satisfy `sup_norm_grid(·, 64) ≤ 1 + SYMBOL_SLACK`.
pub const SYMBOL_SLACK: f64 = 1e-9;
const SYMBOL_GRID: usize = 64;

/// Expression tree over two-point kernels `K(z, w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "KernelJson")]
pub enum KernelExpr {
    /// The constant kernel 1.
    One,
    /// `1 / ((1 − w̄₁z₁)(1 − w̄₂z₂))`.
    Szego,
    /// `(1 − conj(b(w)) b(z)) / (1 − w̄_v z_v)` with `b` depending on `z_v` only.
    OneVarDbr { b: BiPoly, var: Var },
    /// `(1 − conj(φ(w)) φ(z)) · Szegő(z, w)`.
    Dbr2 { phi: BiPoly },
    /// `(1 − conj(φ(w))φ(z))/(1 − w̄₁z₁) · (1 − conj(ψ(w))ψ(z))/(1 − w̄₂z₂)`.
    RKernel { phi: BiPoly, psi: BiPoly },
    Sum { left: Box<KernelExpr>, right: Box<KernelExpr> },
    /// Pointwise (Schur) product.
    Product { left: Box<KernelExpr>, right: Box<KernelExpr> },
    Power { alpha: u32, base: Box<KernelExpr> },
    /// `conj(f(w)) f(z) K(z, w)`.
    ConjMult { f: BiPoly, base: Box<KernelExpr> },
    Scalar { c: f64, base: Box<KernelExpr> },
}

/// Unvalidated mirror of [`KernelExpr`] used for deserialization.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KernelJson {
    One,
    Szego,
    OneVarDbr { b: BiPoly, var: Var },
    Dbr2 { phi: BiPoly },
    RKernel { phi: BiPoly, psi: BiPoly },
    Sum { left: Box<KernelExpr>, right: Box<KernelExpr> },
    Product { left: Box<KernelExpr>, right: Box<KernelExpr> },
    Power { alpha: u32, base: Box<KernelExpr> },
    ConjMult { f: BiPoly, base: Box<KernelExpr> },
    Scalar { c: f64, base: Box<KernelExpr> },
}

impl TryFrom<KernelJson> for KernelExpr {
    type Error = Error;

    fn try_from(raw: KernelJson) -> Result<Self> {
        let k = match raw {
            KernelJson::One => KernelExpr::One,
            KernelJson::Szego => KernelExpr::Szego,
            KernelJson::OneVarDbr { b, var } => KernelExpr::OneVarDbr { b, var },
            KernelJson::Dbr2 { phi } => KernelExpr::Dbr2 { phi },
            KernelJson::RKernel { phi, psi } => KernelExpr::RKernel { phi, psi },
            KernelJson::Sum { left, right } => KernelExpr::Sum { left, right },
            KernelJson::Product { left, right } => KernelExpr::Product { left, right },
            KernelJson::Power { alpha, base } => KernelExpr::Power { alpha, base },
            KernelJson::ConjMult { f, base } => KernelExpr::ConjMult { f, base },
            KernelJson::Scalar { c, base } => KernelExpr::Scalar { c, base },
        };
        // Children were validated when they were deserialized.
        k.validate_node()?;
        Ok(k)
    }
}

fn check_contractive(p: &BiPoly) -> Result<()> {
    let s = p.sup_norm_grid(SYMBOL_GRID);
    if s > 1.0 + SYMBOL_SLACK {
        return Err(Error::NotContractive(s));
    }
    Ok(())
}

fn szego(z: &Point2, w: &Point2) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    one / ((one - w.z1.conj() * z.z1) * (one - w.z2.conj() * z.z2))
}

/// `1 − conj(p(w)) p(z)`.
fn defect(p: &BiPoly, z: &Point2, w: &Point2) -> Complex64 {
    Complex64::new(1.0, 0.0) - p.eval(w).conj() * p.eval(z)
}

impl KernelExpr {
    pub fn szego() -> Self {
        KernelExpr::Szego
    }

    pub fn one_var_dbr(b: BiPoly, var: Var) -> Result<Self> {
        let k = KernelExpr::OneVarDbr { b, var };
        k.validate_node()?;
        Ok(k)
    }

    pub fn dbr2(phi: BiPoly) -> Result<Self> {
        let k = KernelExpr::Dbr2 { phi };
        k.validate_node()?;
        Ok(k)
    }

    pub fn r_kernel(phi: BiPoly, psi: BiPoly) -> Result<Self> {
        let k = KernelExpr::RKernel { phi, psi };
        k.validate_node()?;
        Ok(k)
    }

    pub fn sum(left: KernelExpr, right: KernelExpr) -> Self {
        KernelExpr::Sum { left: Box::new(left), right: Box::new(right) }
    }

    pub fn product(left: KernelExpr, right: KernelExpr) -> Self {
        KernelExpr::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn power(base: KernelExpr, alpha: u32) -> Result<Self> {
        let k = KernelExpr::Power { alpha, base: Box::new(base) };
        k.validate_node()?;
        Ok(k)
    }

    pub fn conj_mult(f: BiPoly, base: KernelExpr) -> Self {
        KernelExpr::ConjMult { f, base: Box::new(base) }
    }

    pub fn scalar(c: f64, base: KernelExpr) -> Result<Self> {
        let k = KernelExpr::Scalar { c, base: Box::new(base) };
        k.validate_node()?;
        Ok(k)
    }

    fn validate_node(&self) -> Result<()> {
        match self {
            KernelExpr::OneVarDbr { b, var } => {
                if !b.is_free_of(var.other()) {
                    return Err(Error::NotOneVariable("one-variable dBR symbol"));
                }
                check_contractive(b)
            }
            KernelExpr::Dbr2 { phi } => check_contractive(phi),
            KernelExpr::RKernel { phi, psi } => {
                check_contractive(phi)?;
                check_contractive(psi)
            }
            KernelExpr::Power { alpha, .. } if *alpha == 0 => {
                Err(Error::InvalidArgument("kernel power must be positive".into()))
            }
            KernelExpr::Scalar { c, .. } if !(*c >= 0.0 && c.is_finite()) => {
                Err(Error::InvalidArgument(format!("kernel scalar {c} must be a nonnegative real")))
            }
            _ => Ok(()),
        }
    }

    /// Checks every node of the tree.
    pub fn validate(&self) -> Result<()> {
        self.validate_node()?;
        match self {
            KernelExpr::Sum { left, right } | KernelExpr::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            KernelExpr::Power { base, .. }
            | KernelExpr::ConjMult { base, .. }
            | KernelExpr::Scalar { base, .. } => base.validate(),
            _ => Ok(()),
        }
    }

    /// `K(z, w)`.
    pub fn eval(&self, z: &Point2, w: &Point2) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            KernelExpr::One => one,
            KernelExpr::Szego => szego(z, w),
            KernelExpr::OneVarDbr { b, var } => {
                let (zv, wv) = (z.coord(*var), w.coord(*var));
                defect(b, z, w) / (one - wv.conj() * zv)
            }
            KernelExpr::Dbr2 { phi } => defect(phi, z, w) * szego(z, w),
            KernelExpr::RKernel { phi, psi } => {
                defect(phi, z, w) / (one - w.z1.conj() * z.z1) * defect(psi, z, w)
                    / (one - w.z2.conj() * z.z2)
            }
            KernelExpr::Sum { left, right } => left.eval(z, w) + right.eval(z, w),
            KernelExpr::Product { left, right } => left.eval(z, w) * right.eval(z, w),
            KernelExpr::Power { alpha, base } => base.eval(z, w).powu(*alpha),
            KernelExpr::ConjMult { f, base } => f.eval(w).conj() * f.eval(z) * base.eval(z, w),
            KernelExpr::Scalar { c, base } => base.eval(z, w) * *c,
        }
    }
}

/// Free-function form of [`KernelExpr::eval`].
pub fn kernel_eval(k: &KernelExpr, z: &Point2, w: &Point2) -> Complex64 {
    k.eval(z, w)
}

/// Ordered, pairwise distinct points of the bidisk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct PointSet {
    points: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for PointSet {
    type Error = Error;
    fn try_from(points: Vec<Point2>) -> Result<Self> {
        PointSet::new(points)
    }
}

impl From<PointSet> for Vec<Point2> {
    fn from(s: PointSet) -> Self {
        s.points
    }
}

impl PointSet {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                if points[a].distance(&points[b]) == 0.0 {
                    return Err(Error::DuplicatePoint(a, b));
                }
            }
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// A new set with `p` appended.
    pub fn with_point(&self, p: Point2) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        PointSet::new(points)
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        PointSet::new(self.points[..n.min(self.points.len())].to_vec())
    }
}

/// Hermitian matrix, symmetrized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix {
    m: CMatrix,
}

impl HermMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(HermMatrix { m: linalg::symmetrize(&m) })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.m)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// `c* M c`.
    pub fn quadratic_form(&self, c: &[Complex64]) -> f64 {
        let v = CVector::from_column_slice(c);
        (v.adjoint() * &self.m * &v)[(0, 0)].re
    }
}

/// `M[i][j] = K(λ_i, λ_j)`.
pub fn gram(k: &KernelExpr, s: &PointSet) -> HermMatrix {
    let pts = s.points();
    let n = pts.len();
    let m = CMatrix::from_fn(n, n, |i, j| k.eval(&pts[i], &pts[j]));
    HermMatrix::new(m).expect("square by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdStatus {
    #[serde(rename = "PSD")]
    Psd,
    #[serde(rename = "NotPSD")]
    NotPsd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub status: PsdStatus,
    pub min_eig: f64,
    /// Unit eigenvector of the smallest eigenvalue; present iff `NotPsd`.
    pub certificate: Option<Vec<Complex64>>,
}

/// PSD iff `λ_min ≥ −tol · max(1, trace)`.
pub fn psd_check(m: &HermMatrix, tol: f64) -> PsdVerdict {
    let (values, vectors) = linalg::hermitian_eigen(m.matrix());
    let min_eig = values[0];
    let threshold = -tol * m.trace().max(1.0);
    if min_eig >= threshold {
        PsdVerdict { status: PsdStatus::Psd, min_eig, certificate: None }
    } else {
        PsdVerdict {
            status: PsdStatus::NotPsd,
            min_eig,
            certificate: Some(vectors.column(0).iter().copied().collect()),
        }
    }
}

/// Point set plus coefficient vector with a negative Gram quadratic form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub points: PointSet,
    pub coeffs: Vec<Complex64>,
    pub value: f64,
}

impl Certificate {
    /// Recomputes `c* gram(K, S) c` from scratch.
    pub fn reevaluate(&self, k: &KernelExpr) -> f64 {
        gram(k, &self.points).quadratic_form(&self.coeffs)
    }
}

/// Outcome of a sampling screen. Positivity itself is never claimed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScreenVerdict {
    #[serde(rename = "no counterexample found")]
    NoCounterexampleFound,
    #[serde(rename = "not positive")]
    NotPositive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub verdict: ScreenVerdict,
    /// Smallest Gram eigenvalue of the worst trial.
    pub worst_min_eig: f64,
    /// `worst_min_eig / max(1, trace)` of the same trial; trials are ranked by it.
    pub worst_relative: f64,
    pub worst_set: PointSet,
    /// First certificate in trial order.
    pub certificate: Option<Certificate>,
    pub trials: usize,
}

/// Random Gram screen: `trials` point sets of size in `2..=set_size`
/// (uniform in the polydisk of radius 0.98), each tested with [`psd_check`].
pub fn positivity_test(k: &KernelExpr, trials: usize, set_size: usize, seed: u64, tol: f64) -> PositivityReport {
    let trials = trials.max(1);
    let set_size = set_size.max(1);
    let lo = set_size.min(2);
    let outcomes: Vec<(PointSet, PsdVerdict, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sampling::sub_rng(seed, t as u64);
            let size = if set_size > lo {
                rand::Rng::random_range(&mut rng, lo..=set_size)
            } else {
                set_size
            };
            let s = sampling::point_set(&mut rng, size, SAMPLE_RADIUS);
            let m = gram(k, &s);
            let v = psd_check(&m, tol);
            let rel = v.min_eig / m.trace().max(1.0);
            (s, v, rel)
        })
        .collect();

    let mut certificate = None;
    let mut worst = 0usize;
    for (t, (s, v, rel)) in outcomes.iter().enumerate() {
        if *rel < outcomes[worst].2 {
            worst = t;
        }
        if certificate.is_none() {
            if let Some(c) = &v.certificate {
                certificate = Some(Certificate { points: s.clone(), coeffs: c.clone(), value: v.min_eig });
            }
        }
    }
    let (worst_set, worst_verdict, worst_relative) = outcomes[worst].clone();
    PositivityReport {
        verdict: if certificate.is_some() { ScreenVerdict::NotPositive } else { ScreenVerdict::NoCounterexampleFound },
        worst_min_eig: worst_verdict.min_eig,
        worst_relative,
        worst_set,
        certificate,
        trials,
    }
}

/// Settings for [`negativity_search`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub n_points: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Total kernel-Gram evaluations across all restarts.
    pub max_evals: usize,
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { n_points: 2, restarts: 8, seed: 0, max_evals: 10_000, tol: DEFAULT_TOL }
    }
}

const STEP_START: f64 = 0.1;
const STEP_STOP: f64 = 1e-4;

fn clamp_disk(z: Complex64, radius: f64) -> Complex64 {
    let r = z.norm();
    if r > radius {
        z * (radius / r)
    } else {
        z
    }
}

fn params_to_points(x: &[f64]) -> Vec<Point2> {
    x.chunks(4)
        .map(|c| Point2 {
            z1: clamp_disk(Complex64::new(c[0], c[1]), SAMPLE_RADIUS),
            z2: clamp_disk(Complex64::new(c[2], c[3]), SAMPLE_RADIUS),
        })
        .collect()
}

fn min_eig_of(k: &KernelExpr, pts: &[Point2]) -> f64 {
    let n = pts.len();
    let m = CMatrix::from_fn(n, n, |i, j| k.eval(&pts[i], &pts[j]));
    linalg::hermitian_eigen(&m).0[0]
}

/// Derivative-free search for a negative Gram quadratic form: random
/// restarts, each refined by coordinate descent on the real coordinates of
/// the points (step 0.1, halved after a sweep without improvement, stopped
/// below 1e-4). Returns the most negative certificate that fails
/// [`psd_check`] at `opts.tol`, or `None`.
pub fn negativity_search(k: &KernelExpr, opts: &SearchOptions) -> Option<Certificate> {
    let n_points = opts.n_points.max(2);
    let restarts = opts.restarts.max(1);
    let budget = (opts.max_evals / restarts).max(1);

    let results: Vec<Option<Certificate>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = sampling::sub_rng(opts.seed, r as u64);
            let start = sampling::point_set(&mut rng, n_points, SAMPLE_RADIUS);
            let mut x: Vec<f64> = start
                .points()
                .iter()
                .flat_map(|p| [p.z1.re, p.z1.im, p.z2.re, p.z2.im])
                .collect();
            let mut best = min_eig_of(k, &params_to_points(&x));
            let mut evals = 1usize;
            let mut step = STEP_START;
            'outer: while step >= STEP_STOP {
                let mut improved = false;
                for idx in 0..x.len() {
                    for dir in [1.0, -1.0] {
                        if evals >= budget {
                            break 'outer;
                        }
                        let old = x[idx];
                        x[idx] = old + dir * step;
                        let trial = min_eig_of(k, &params_to_points(&x));
                        evals += 1;
                        if trial < best {
                            best = trial;
                            improved = true;
                            break;
                        }
                        x[idx] = old;
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            let pts = params_to_points(&x);
            let set = PointSet::new(pts).ok()?;
            let m = gram(k, &set);
            let v = psd_check(&m, opts.tol);
            v.certificate.map(|c| Certificate { points: set, coeffs: c, value: v.min_eig })
        })
        .collect();

    results
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<Certificate>, c| match acc {
            Some(a) if a.value <= c.value => Some(a),
            _ => Some(c),
        })
}

/// Lower bound for `‖f‖_{H(K)}` on `S`: `c² = λ_max(B, A)` with
/// `A = gram(K, S)` and `B[i][j] = f(λ_i) conj(f(λ_j))`.
pub fn membership_norm(f: &BiPoly, k: &KernelExpr, s: &PointSet) -> Result<f64> {
    let a = gram(k, s);
    let vals: Vec<Complex64> = s.points().iter().map(|p| f.eval(p)).collect();
    let n = vals.len();
    let b = CMatrix::from_fn(n, n, |i, j| vals[i] * vals[j].conj());
    let lam = linalg::max_generalized_eigenvalue(&b, a.matrix())?;
    Ok(lam.max(0.0).sqrt())
}

/// Lower bound for the multiplier norm of `ψ` on `H(K)`: `δ_S² = λ_max(B, A)`
/// with `B[i][j] = ψ(λ_i) conj(ψ(λ_j)) K(λ_i, λ_j)`.
pub fn multiplier_norm_lb(psi: &BiPoly, k: &KernelExpr, s: &PointSet) -> Result<f64> {
    let a = gram(k, s);
    let vals: Vec<Complex64> = s.points().iter().map(|p| psi.eval(p)).collect();
    let n = vals.len();
    let b = CMatrix::from_fn(n, n, |i, j| vals[i] * vals[j].conj() * a.get(i, j));
    let lam = linalg::max_generalized_eigenvalue(&b, a.matrix())?;
    Ok(lam.max(0.0).sqrt())
}

/// Smallest `δ` such that `gram(K2) − gram(K1)/δ²` is PSD on `S`.
pub fn dominance_delta(k1: &KernelExpr, k2: &KernelExpr, s: &PointSet) -> Result<f64> {
    let a1 = gram(k1, s);
    let a2 = gram(k2, s);
    let lam = linalg::max_generalized_eigenvalue(a1.matrix(), a2.matrix())?;
    Ok(lam.max(0.0).sqrt())
}
