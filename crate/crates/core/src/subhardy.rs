//! Sub-Hardy spaces `H(φ)` of the bidisk for symbols with a Pythagorean
//! mate: mate verification, the three explicit `M(ā)` decompositions with
//! their `g`-functions, preimages under `T_ā`, and multiplier constants.

use nalgebra::SVD;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipoly::{BiPoly, Var};
use crate::error::{Error, Result};
use crate::kernel::{multiplier_norm_lb, KernelExpr, PointSet};
use crate::linalg::CVector;
use crate::ops::{box_indices, toeplitz};
use crate::sampling;
use crate::trig::TrigPoly;

/// Per-coefficient tolerance of [`mate_check`].
pub const MATE_TOL: f64 = 1e-12;

/// `φ` together with a claimed mate `a`: `|φ|² + |a|² = 1` on the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatePair {
    pub phi: BiPoly,
    pub a: BiPoly,
}

impl MatePair {
    /// Fails unless the identity holds coefficient-wise within [`MATE_TOL`].
    pub fn new(phi: BiPoly, a: BiPoly) -> Result<Self> {
        let check = mate_check(&phi, &a);
        if !check.equal {
            return Err(Error::InvalidArgument(format!(
                "not a Pythagorean pair (max coefficient deviation {})",
                check.max_coeff_dev
            )));
        }
        Ok(MatePair { phi, a })
    }

    /// `φ = (1 + z₁)/2`, `a = (1 − z₁)/2`.
    pub fn affine_z1() -> Self {
        MatePair {
            phi: BiPoly::from_real_terms([(0, 0, 0.5), (1, 0, 0.5)]),
            a: BiPoly::from_real_terms([(0, 0, 0.5), (1, 0, -0.5)]),
        }
    }

    /// `φ = (1 + z₁z₂)/2`, `a = (1 − z₁z₂)/2`.
    pub fn affine_z1z2() -> Self {
        MatePair {
            phi: BiPoly::from_real_terms([(0, 0, 0.5), (1, 1, 0.5)]),
            a: BiPoly::from_real_terms([(0, 0, 0.5), (1, 1, -0.5)]),
        }
    }

    /// `φ = (z₁ + z₂)/2`, `a = (z₁ − z₂)/2`; the mate vanishes at 0.
    pub fn average() -> Self {
        MatePair {
            phi: BiPoly::from_real_terms([(1, 0, 0.5), (0, 1, 0.5)]),
            a: BiPoly::from_real_terms([(1, 0, 0.5), (0, 1, -0.5)]),
        }
    }

    pub fn all_examples() -> [MatePair; 3] {
        [Self::affine_z1(), Self::affine_z1z2(), Self::average()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MateCheck {
    pub equal: bool,
    pub max_coeff_dev: f64,
}

/// Exact trigonometric identity `φφ̄ + aā = 1`.
pub fn mate_check(phi: &BiPoly, a: &BiPoly) -> MateCheck {
    let p = phi.to_trig();
    let q = a.to_trig();
    let sum = &(&p * &p.conj()) + &(&q * &q.conj());
    let dev = sum.max_coeff_dev(&TrigPoly::constant(Complex64::new(1.0, 0.0)));
    MateCheck { equal: dev <= MATE_TOL, max_coeff_dev: dev }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// `(z₁ − 1) f₁(z) + f₂(z₂)`.
    Ex1,
    /// `f₁(z₁) + f₂(z₂) + (z₁z₂ − 1) f₃(z)`.
    Ex2,
    /// `f₁(z₁) + f₂(z₂) + (z₁ − z₂) f₃(z)`.
    Ex3,
}

impl Form {
    pub fn divisor(self) -> BiPoly {
        let one = BiPoly::one();
        match self {
            Form::Ex1 => &BiPoly::z1() - &one,
            Form::Ex2 => &(&BiPoly::z1() * &BiPoly::z2()) - &one,
            Form::Ex3 => &BiPoly::z1() - &BiPoly::z2(),
        }
    }

    /// The mate whose `M(ā)` this form describes.
    pub fn mate(self) -> MatePair {
        match self {
            Form::Ex1 => MatePair::affine_z1(),
            Form::Ex2 => MatePair::affine_z1z2(),
            Form::Ex3 => MatePair::average(),
        }
    }

    pub fn decompose(self, f: &BiPoly) -> Result<Decomposition> {
        match self {
            Form::Ex1 => decompose_ex1(f),
            Form::Ex2 => decompose_ex2(f),
            Form::Ex3 => decompose_ex3(f),
        }
    }
}

impl std::str::FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Form> {
        match s {
            "ex1" => Ok(Form::Ex1),
            "ex2" => Ok(Form::Ex2),
            "ex3" => Ok(Form::Ex3),
            _ => Err(Error::InvalidArgument(format!("unknown decomposition form {s:?}"))),
        }
    }
}

/// Components of one of the three decompositions. One-variable components
/// are stored as polynomials in their own variable (`f₁(z₁)` uses only
/// z₁-powers, `f₂(z₂)` only z₂-powers).
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    form: Form,
    f1: BiPoly,
    f2: BiPoly,
    f3: Option<BiPoly>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    form: Form,
    f1: BiPoly,
    f2: BiPoly,
    f3: Option<BiPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<BiPoly>,
}

impl Serialize for Decomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            form: self.form,
            f1: self.f1.clone(),
            f2: self.f2.clone(),
            f3: self.f3.clone(),
            g: Some(self.g_function()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DecompositionJson::deserialize(d)?;
        Decomposition::new(raw.form, raw.f1, raw.f2, raw.f3).map_err(serde::de::Error::custom)
    }
}

impl Decomposition {
    pub fn new(form: Form, f1: BiPoly, f2: BiPoly, f3: Option<BiPoly>) -> Result<Self> {
        if !f2.is_free_of(Var::Z1) {
            return Err(Error::NotOneVariable("f2"));
        }
        match form {
            Form::Ex1 => {
                if f3.is_some() {
                    return Err(Error::InvalidArgument("ex1 has no f3 component".into()));
                }
            }
            Form::Ex2 | Form::Ex3 => {
                if !f1.is_free_of(Var::Z2) {
                    return Err(Error::NotOneVariable("f1"));
                }
                if f3.is_none() {
                    return Err(Error::InvalidArgument(format!("{form:?} requires an f3 component")));
                }
            }
        }
        Ok(Decomposition { form, f1, f2, f3 })
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn f1(&self) -> &BiPoly {
        &self.f1
    }

    pub fn f2(&self) -> &BiPoly {
        &self.f2
    }

    pub fn f3(&self) -> Option<&BiPoly> {
        self.f3.as_ref()
    }

    fn f3_or_zero(&self) -> BiPoly {
        self.f3.clone().unwrap_or_default()
    }

    /// Reconstructs `f` from its components.
    pub fn assemble(&self) -> BiPoly {
        let d = self.form.divisor();
        match self.form {
            Form::Ex1 => &(&d * &self.f1) + &self.f2,
            Form::Ex2 | Form::Ex3 => &(&self.f1 + &self.f2) + &(&d * &self.f3_or_zero()),
        }
    }

    /// The bounded-ness witness `g` of the form:
    /// Ex1 `z₁f₁ + f₂`, Ex2 `f₁ + f₂ + z₁z₂f₃`, Ex3 `z₁f₁ − z₂f₂ + z₁z₂f₃`.
    pub fn g_function(&self) -> BiPoly {
        match self.form {
            Form::Ex1 => &self.f1.shift(1, 0) + &self.f2,
            Form::Ex2 => &(&self.f1 + &self.f2) + &self.f3_or_zero().shift(1, 1),
            Form::Ex3 => &(&self.f1.shift(1, 0) - &self.f2.shift(0, 1)) + &self.f3_or_zero().shift(1, 1),
        }
    }
}

/// `f = (z₁ − 1) f₁ + f₂(z₂)` with `f₂(z₂) = f(1, z₂)`.
pub fn decompose_ex1(f: &BiPoly) -> Result<Decomposition> {
    let f2 = BiPoly::from_terms(f.terms().map(|((_, j), c)| (0, j, c)));
    let f1 = (f - &f2).divide_exact(&Form::Ex1.divisor())?;
    Decomposition::new(Form::Ex1, f1, f2, None)
}

/// `f = f₁(z₁) + f₂(z₂) + (z₁z₂ − 1) f₃` where `f₁ + f₂` is the split of the
/// Laurent restriction `t ↦ f(t, 1/t)` into nonnegative powers (`f₁`,
/// constant included) and negative powers (`t^{−k} ↦ z₂^k` in `f₂`).
pub fn decompose_ex2(f: &BiPoly) -> Result<Decomposition> {
    let laurent = f.terms().map(|((i, j), c)| (i as i64 - j as i64, c));
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (k, c) in laurent {
        if k >= 0 {
            pos.push((k as u32, 0, c));
        } else {
            neg.push((0, (-k) as u32, c));
        }
    }
    let f1 = BiPoly::from_terms(pos);
    let f2 = BiPoly::from_terms(neg);
    let rest = &(f - &f1) - &f2;
    let f3 = rest.divide_exact(&Form::Ex2.divisor())?;
    Decomposition::new(Form::Ex2, f1, f2, Some(f3))
}

/// `f = f₁(z₁) + (z₁ − z₂) f₃` with `f₁(t) = f(t, t)` and `f₂ = 0`.
pub fn decompose_ex3(f: &BiPoly) -> Result<Decomposition> {
    let f1 = f.diagonal();
    let f3 = (f - &f1).divide_exact(&Form::Ex3.divisor())?;
    Decomposition::new(Form::Ex3, f1, BiPoly::zero(), Some(f3))
}

pub fn assemble(d: &Decomposition) -> BiPoly {
    d.assemble()
}

pub fn g_function(d: &Decomposition) -> BiPoly {
    d.g_function()
}

/// Least-squares (minimum-norm) solution `h` of `T_ā h = f` over the box
/// `{0..n}²`, with the 2-norm residual. Terms of `f` outside the box count
/// toward the residual.
pub fn mate_preimage(f: &BiPoly, a: &BiPoly, n: u32) -> Result<(BiPoly, f64)> {
    if a.is_zero() {
        return Err(Error::DegenerateSymbol);
    }
    if f.is_zero() {
        return Ok((BiPoly::zero(), 0.0));
    }
    let t = toeplitz(&a.to_trig().conj(), n);
    let idx = box_indices(n);
    let rhs = CVector::from_iterator(idx.len(), idx.iter().map(|&(i, j)| f.coeff(i as u32, j as u32)));
    let svd = SVD::new(t.matrix().clone(), true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let sol = svd
        .solve(&rhs, 1e-12 * smax)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let h = BiPoly::from_terms(idx.iter().zip(sol.iter()).map(|(&(i, j), &c)| (i as u32, j as u32, c)));

    let image = t.matrix() * &sol;
    let in_box: f64 = (image - &rhs).norm_squared();
    let outside: f64 = f
        .terms()
        .filter(|&((i, j), _)| i > n || j > n)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    Ok((h, (in_box + outside).sqrt()))
}

/// Sampled estimate of the constant `k = 1/‖M_ψ‖` on `H(φ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComEstimate {
    /// Upper bound on `k` from finite sampling.
    pub k_est: f64,
    /// Largest pencil lower bound `δ_S` over the supplied sets.
    pub sampled_delta: f64,
    /// Index of the set that attained `sampled_delta`.
    pub best_set: usize,
    /// `sup_norm_grid(ψ, 64)`, also a lower bound for `‖M_ψ‖`.
    pub sup_norm: f64,
    pub deltas: Vec<f64>,
}

/// Number and size of the point sets drawn by [`com_sample_sets`].
pub const COM_SET_COUNT: usize = 50;
pub const COM_SET_SIZE: usize = 40;

/// Seeded sets for [`theorem_com_k`]. The pencil bound grows with the set,
/// so these are much larger than the sets used by positivity screens.
pub fn com_sample_sets(seed: u64) -> Vec<PointSet> {
    (0..COM_SET_COUNT)
        .map(|t| sampling::point_set(&mut sampling::sub_rng(seed, t as u64), COM_SET_SIZE, sampling::SAMPLE_RADIUS))
        .collect()
}

/// `k_est = 1 / max(max_S δ_S, sup_norm_grid(ψ, 64))` with
/// `δ_S = multiplier_norm_lb(ψ, H(φ) kernel, S)`. Both quantities bound the
/// multiplier norm from below, so `k_est` bounds `k` from above.
pub fn theorem_com_k(phi: &BiPoly, psi: &BiPoly, sets: &[PointSet]) -> Result<ComEstimate> {
    if psi.is_zero() {
        return Err(Error::DegenerateSymbol);
    }
    let kernel = KernelExpr::dbr2(phi.clone())?;
    let deltas = sets
        .par_iter()
        .map(|s| multiplier_norm_lb(psi, &kernel, s))
        .collect::<Result<Vec<f64>>>()?;
    let (best_set, sampled_delta) = deltas
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (k, d)| if d > acc.1 { (k, d) } else { acc });
    let sup_norm = psi.sup_norm_grid(64);
    Ok(ComEstimate {
        k_est: 1.0 / sampled_delta.max(sup_norm),
        sampled_delta,
        best_set,
        sup_norm,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::Point2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn mate_examples() {
        let m = MatePair::affine_z1();
        assert!(mate_check(&m.phi, &m.a).equal);
        let m = MatePair::average();
        let r = mate_check(&m.phi, &m.a);
        assert!(r.equal && r.max_coeff_dev <= 1e-12);
        let r = mate_check(&BiPoly::z1(), &BiPoly::z2());
        assert!(!r.equal);
        assert!((r.max_coeff_dev - 1.0).abs() < 1e-15);
        assert!(MatePair::new(BiPoly::z1(), BiPoly::z2()).is_err());
    }

    #[test]
    fn ex1_examples() {
        let f = BiPoly::z1() * BiPoly::z2();
        let d = decompose_ex1(&f).unwrap();
        assert_eq!(d.f2(), &BiPoly::z2());
        assert_eq!(d.f1(), &BiPoly::z2());
        assert_eq!(d.assemble(), f);
        assert_eq!(d.g_function(), &(&BiPoly::z1() * &BiPoly::z2()) + &BiPoly::z2());

        let pure = BiPoly::from_real_terms([(0, 0, 1.0), (0, 3, -2.0)]);
        let d = decompose_ex1(&pure).unwrap();
        assert!(d.f1().is_zero());
        assert_eq!(d.f2(), &pure);

        let f = &BiPoly::z1() - &BiPoly::one();
        let d = decompose_ex1(&f).unwrap();
        assert_eq!(d.f1(), &BiPoly::one());
        assert!(d.f2().is_zero());
        assert_eq!(d.g_function(), BiPoly::z1());
    }

    #[test]
    fn ex2_examples() {
        let d = decompose_ex2(&BiPoly::z1()).unwrap();
        assert_eq!(d.f1(), &BiPoly::z1());
        assert!(d.f2().is_zero());
        assert!(d.f3().unwrap().is_zero());

        let f = BiPoly::monomial(2, 1, c(1.0));
        let d = decompose_ex2(&f).unwrap();
        assert_eq!(d.f1(), &BiPoly::z1());
        assert_eq!(d.f3().unwrap(), &BiPoly::z1());
        assert_eq!(d.assemble(), f);

        let k = BiPoly::constant(Complex64::new(2.0, -1.0));
        let d = decompose_ex2(&k).unwrap();
        assert_eq!(d.f1(), &k);
        assert!(d.f2().is_zero() && d.f3().unwrap().is_zero());

        let f = BiPoly::monomial(0, 2, c(3.0));
        let d = decompose_ex2(&f).unwrap();
        assert_eq!(d.f2(), &f);
    }

    #[test]
    fn ex3_examples() {
        let f = BiPoly::z1() * BiPoly::z2();
        let d = decompose_ex3(&f).unwrap();
        assert_eq!(d.f1(), &BiPoly::monomial(2, 0, c(1.0)));
        assert!(d.f2().is_zero());
        assert_eq!(d.f3().unwrap(), &-BiPoly::z1());
        assert_eq!(d.assemble(), f);
        let g = BiPoly::from_real_terms([(3, 0, 1.0), (2, 1, -1.0)]);
        assert_eq!(d.g_function(), g);

        let d = decompose_ex3(&BiPoly::z1()).unwrap();
        assert_eq!(d.f1(), &BiPoly::z1());
        assert!(d.f3().unwrap().is_zero());

        let d = decompose_ex3(&BiPoly::z2()).unwrap();
        assert_eq!(d.f1(), &BiPoly::z1());
        assert_eq!(d.f3().unwrap(), &BiPoly::constant(c(-1.0)));
    }

    #[test]
    fn g_of_zero_is_zero() {
        for form in [Form::Ex1, Form::Ex2, Form::Ex3] {
            let d = form.decompose(&BiPoly::zero()).unwrap();
            assert!(d.g_function().is_zero());
            assert!(d.assemble().is_zero());
        }
    }

    #[test]
    fn decomposition_constraints() {
        assert!(Decomposition::new(Form::Ex2, BiPoly::z2(), BiPoly::zero(), Some(BiPoly::zero())).is_err());
        assert!(Decomposition::new(Form::Ex1, BiPoly::z2(), BiPoly::z1(), None).is_err());
        assert!(Decomposition::new(Form::Ex1, BiPoly::z2(), BiPoly::z2(), Some(BiPoly::zero())).is_err());
        assert!(Decomposition::new(Form::Ex3, BiPoly::z1(), BiPoly::zero(), None).is_err());
    }

    #[test]
    fn decomposition_json() {
        let d = decompose_ex3(&(BiPoly::z1() * BiPoly::z2())).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["form"], "ex3");
        assert!(v["g"]["terms"].is_array());
        let back: Decomposition = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);

        let d = decompose_ex1(&BiPoly::z2()).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert!(v["f3"].is_null());
    }

    #[test]
    fn preimage_examples() {
        let a = MatePair::affine_z1().a;
        let (h, res) = mate_preimage(&BiPoly::z2(), &a, 4).unwrap();
        assert!(res < 1e-12);
        assert!(h.max_coeff_dev(&BiPoly::z2().scale_real(2.0)) < 1e-12);

        let a = MatePair::average().a;
        let k = BiPoly::constant(Complex64::new(0.7, -0.2));
        let (h, res) = mate_preimage(&k, &a, 4).unwrap();
        assert!(res <= 1e-10);
        let back = crate::ops::apply_toeplitz(&a.to_trig().conj(), &h, 4);
        assert!(back.max_coeff_dev(&k) < 1e-10);

        let (h, res) = mate_preimage(&BiPoly::zero(), &a, 4).unwrap();
        assert!(h.is_zero() && res == 0.0);

        assert_eq!(mate_preimage(&k, &BiPoly::zero(), 4), Err(Error::DegenerateSymbol));
    }

    #[test]
    fn preimage_residual_counts_out_of_box_terms() {
        let a = MatePair::affine_z1().a;
        let f = BiPoly::monomial(5, 0, c(1.0));
        let (_, res) = mate_preimage(&f, &a, 3).unwrap();
        assert!((res - 1.0).abs() < 1e-12);
    }

    #[test]
    fn com_k_examples() {
        let phi = MatePair::affine_z1().phi;
        let mut rng = sampling::sub_rng(9, 0);
        let sets: Vec<PointSet> = (0..4).map(|_| sampling::point_set(&mut rng, 6, sampling::SAMPLE_RADIUS)).collect();

        let k = BiPoly::constant(Complex64::new(0.0, 0.5));
        let est = theorem_com_k(&phi, &k, &sets).unwrap();
        assert!((est.k_est - 2.0).abs() < 1e-9);

        let est = theorem_com_k(&phi, &BiPoly::z2(), &sets).unwrap();
        assert!(est.k_est <= 1.0 / 0.98);
        assert!(est.k_est * est.sup_norm <= 1.0 + 1e-6);

        let est = theorem_com_k(&phi, &BiPoly::z1(), &sets).unwrap();
        assert!(est.k_est.is_finite() && est.k_est > 0.0);
        assert!(est.k_est * est.sup_norm <= 1.0 + 1e-6);

        assert!(matches!(theorem_com_k(&phi, &BiPoly::zero(), &sets), Err(Error::DegenerateSymbol)));
    }

    #[test]
    fn com_k_multiplier_norm_at_least_point_values() {
        let phi = MatePair::affine_z1().phi;
        let s = PointSet::new(vec![Point2::real(0.1, 0.9).unwrap(), Point2::real(-0.3, 0.2).unwrap()]).unwrap();
        let est = theorem_com_k(&phi, &BiPoly::z2(), &[s]).unwrap();
        assert!(est.sampled_delta >= 0.9 - 1e-9);
    }
}
