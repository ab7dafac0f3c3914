//! Bivariate analytic polynomials on the bidisk.
//!
//! A [`BiPoly`] is a finitely supported power series `Σ c_ij z₁^i z₂^j` with
//! complex floating-point coefficients, stored sparsely in canonical form
//! (no coefficient is exactly zero). Arithmetic never prunes small values;
//! tolerances belong to the callers that need them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trig::TrigPoly;

/// Coordinate selector for the two variables of the bidisk. Serialized as
/// the integer 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Var {
    Z1,
    Z2,
}

impl TryFrom<u8> for Var {
    type Error = Error;
    fn try_from(j: u8) -> Result<Var> {
        Var::from_index(j as usize)
    }
}

impl From<Var> for u8 {
    fn from(v: Var) -> u8 {
        v.index() as u8
    }
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::Z1 => Var::Z2,
            Var::Z2 => Var::Z1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::Z1 => 1,
            Var::Z2 => 2,
        }
    }

    pub fn from_index(j: usize) -> Result<Var> {
        match j {
            1 => Ok(Var::Z1),
            2 => Ok(Var::Z2),
            _ => Err(Error::InvalidArgument(format!("variable index {j} is not 1 or 2"))),
        }
    }
}

/// A point of the open bidisk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point2 {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl Point2 {
    /// Fails unless both coordinates are strictly inside the unit disk.
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        if z1.norm() < 1.0 && z2.norm() < 1.0 {
            Ok(Point2 { z1, z2 })
        } else {
            Err(Error::PointOutsideBidisk(z1.to_string(), z2.to_string()))
        }
    }

    pub fn real(x1: f64, x2: f64) -> Result<Self> {
        Self::new(Complex64::new(x1, 0.0), Complex64::new(x2, 0.0))
    }

    pub fn origin() -> Self {
        Point2 {
            z1: Complex64::new(0.0, 0.0),
            z2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn coord(&self, var: Var) -> Complex64 {
        match var {
            Var::Z1 => self.z1,
            Var::Z2 => self.z2,
        }
    }

    /// Euclidean distance in C².
    pub fn distance(&self, other: &Point2) -> f64 {
        ((self.z1 - other.z1).norm_sqr() + (self.z2 - other.z2).norm_sqr()).sqrt()
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            z1: Complex64,
            z2: Complex64,
        }
        let raw = Raw::deserialize(d)?;
        Point2::new(raw.z1, raw.z2).map_err(serde::de::Error::custom)
    }
}

/// One serialized term of a polynomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct TermJson {
    pub i: i64,
    pub j: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct PolyJson {
    pub terms: Vec<TermJson>,
}

/// Finitely supported bivariate power series.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct BiPoly {
    coeffs: BTreeMap<(u32, u32), Complex64>,
}

impl TryFrom<PolyJson> for BiPoly {
    type Error = Error;

    fn try_from(raw: PolyJson) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for t in raw.terms {
            if t.i < 0 || t.j < 0 {
                return Err(Error::NegativeExponent(t.i, t.j));
            }
            let key = (t.i as u32, t.j as u32);
            if coeffs.insert(key, Complex64::new(t.re, t.im)).is_some() {
                return Err(Error::DuplicateTerm(t.i, t.j));
            }
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(BiPoly { coeffs })
    }
}

impl From<BiPoly> for PolyJson {
    fn from(p: BiPoly) -> Self {
        PolyJson {
            terms: p
                .coeffs
                .iter()
                .map(|(&(i, j), c)| TermJson {
                    i: i as i64,
                    j: j as i64,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn accumulate(map: &mut BTreeMap<(u32, u32), Complex64>, key: (u32, u32), c: Complex64) {
    let entry = map.entry(key).or_insert_with(zero);
    *entry += c;
    if *entry == zero() {
        map.remove(&key);
    }
}

/// Graded lexicographic comparison key with z₁ > z₂.
fn grlex_key(&(i, j): &(u32, u32)) -> (u32, u32) {
    (i + j, i)
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: Complex64) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != zero() {
            coeffs.insert((i, j), c);
        }
        BiPoly { coeffs }
    }

    pub fn z1() -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn z2() -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::Z1 => Self::z1(),
            Var::Z2 => Self::z2(),
        }
    }

    /// Builds a polynomial from `(i, j, coefficient)` triples; repeated
    /// exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (i, j, c) in terms {
            accumulate(&mut coeffs, (i, j), c);
        }
        BiPoly { coeffs }
    }

    /// Same as [`BiPoly::from_terms`] with real coefficients.
    pub fn from_real_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        Self::from_terms(terms.into_iter().map(|(i, j, c)| (i, j, Complex64::new(c, 0.0))))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or_else(zero)
    }

    /// Terms in lexicographic `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest z₁-exponent (0 for the zero polynomial).
    pub fn degree_z1(&self) -> u32 {
        self.coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    /// Largest z₂-exponent (0 for the zero polynomial).
    pub fn degree_z2(&self) -> u32 {
        self.coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        match v {
            Var::Z1 => self.degree_z1(),
            Var::Z2 => self.degree_z2(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when no monomial involves `v`.
    pub fn is_free_of(&self, v: Var) -> bool {
        self.coeffs.keys().all(|&(i, j)| match v {
            Var::Z1 => i == 0,
            Var::Z2 => j == 0,
        })
    }

    /// Evaluates by nested Horner: rows in z₁, each row a Horner chain in z₂.
    pub fn eval(&self, z: &Point2) -> Complex64 {
        self.eval_at(z.z1, z.z2)
    }

    /// Evaluation at arbitrary complex coordinates (no bidisk check).
    pub fn eval_at(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let mut acc = zero();
        let mut prev_i: Option<u32> = None;
        // Walk rows from highest z₁-power down.
        let mut rows: Vec<(u32, Complex64)> = Vec::new();
        let mut current: Option<(u32, Vec<(u32, Complex64)>)> = None;
        for (&(i, j), &c) in &self.coeffs {
            match current.as_mut() {
                Some((ci, row)) if *ci == i => row.push((j, c)),
                _ => {
                    if let Some((ci, row)) = current.take() {
                        rows.push((ci, horner_row(&row, z2)));
                    }
                    current = Some((i, vec![(j, c)]));
                }
            }
        }
        if let Some((ci, row)) = current.take() {
            rows.push((ci, horner_row(&row, z2)));
        }
        for &(i, value) in rows.iter().rev() {
            if let Some(p) = prev_i {
                acc *= z1.powu(p - i);
            }
            acc += value;
            prev_i = Some(i);
        }
        if let Some(p) = prev_i {
            acc *= z1.powu(p);
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> BiPoly {
        if c == zero() {
            return BiPoly::zero();
        }
        let mut coeffs = BTreeMap::new();
        for (&k, &v) in &self.coeffs {
            let x = v * c;
            if x != zero() {
                coeffs.insert(k, x);
            }
        }
        BiPoly { coeffs }
    }

    pub fn scale_real(&self, c: f64) -> BiPoly {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Multiplies by the monomial `z₁^di z₂^dj`.
    pub fn shift(&self, di: u32, dj: u32) -> BiPoly {
        BiPoly {
            coeffs: self.coeffs.iter().map(|(&(i, j), &c)| ((i + di, j + dj), c)).collect(),
        }
    }

    /// Drops all monomials whose z₁- or z₂-exponent exceeds `cap`.
    pub fn truncate_box(&self, cap: u32) -> BiPoly {
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(i, j), _)| i <= cap && j <= cap)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    fn mul_capped(&self, other: &BiPoly, cap: Option<u32>) -> BiPoly {
        let mut coeffs = BTreeMap::new();
        for (&(i1, j1), &a) in &self.coeffs {
            for (&(i2, j2), &b) in &other.coeffs {
                let (i, j) = (i1 + i2, j1 + j2);
                if let Some(m) = cap {
                    if i > m || j > m {
                        continue;
                    }
                }
                accumulate(&mut coeffs, (i, j), a * b);
            }
        }
        BiPoly { coeffs }
    }

    /// `p(φ(z), ψ(z))` with every monomial of z₁- or z₂-degree above `cap`
    /// discarded.
    pub fn compose(&self, phi: &BiPoly, psi: &BiPoly, cap: u32) -> BiPoly {
        self.compose_inner(phi, psi, Some(cap))
    }

    /// `p(φ(z), ψ(z))` without truncation.
    pub fn compose_exact(&self, phi: &BiPoly, psi: &BiPoly) -> BiPoly {
        self.compose_inner(phi, psi, None)
    }

    fn compose_inner(&self, phi: &BiPoly, psi: &BiPoly, cap: Option<u32>) -> BiPoly {
        let phi_pows = powers(phi, self.degree_z1(), cap);
        let psi_pows = powers(psi, self.degree_z2(), cap);
        let mut coeffs = BTreeMap::new();
        for (&(i, j), &c) in &self.coeffs {
            let term = phi_pows[i as usize].mul_capped(&psi_pows[j as usize], cap);
            for (&k, &v) in &term.coeffs {
                accumulate(&mut coeffs, k, v * c);
            }
        }
        BiPoly { coeffs }
    }

    /// `p ∘ P_j`: sets `z_j = 0`.
    pub fn project(&self, v: Var) -> BiPoly {
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(i, j), _)| match v {
                    Var::Z1 => i == 0,
                    Var::Z2 => j == 0,
                })
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    /// `T_{z̄_j} p = (p − p∘P_j) / z_j`.
    pub fn backward_shift(&self, v: Var) -> BiPoly {
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter_map(|(&(i, j), &c)| match v {
                    Var::Z1 if i > 0 => Some(((i - 1, j), c)),
                    Var::Z2 if j > 0 => Some(((i, j - 1), c)),
                    _ => None,
                })
                .collect(),
        }
    }

    /// Leading term under graded lexicographic order with z₁ > z₂.
    pub fn leading_term(&self) -> Option<((u32, u32), Complex64)> {
        self.coeffs
            .iter()
            .max_by_key(|(k, _)| grlex_key(k))
            .map(|(&k, &c)| (k, c))
    }

    /// Multivariate division by `d` under graded lexicographic order.
    /// Returns `(quotient, remainder)` with `p = q·d + r` and no term of `r`
    /// divisible by the leading monomial of `d`.
    pub fn div_rem(&self, d: &BiPoly) -> Result<(BiPoly, BiPoly)> {
        let ((li, lj), lc) = d.leading_term().ok_or(Error::DivisionByZero)?;
        let mut rest = self.coeffs.clone();
        let mut quotient = BTreeMap::new();
        let mut remainder = BTreeMap::new();
        while let Some((&(i, j), &c)) = rest.iter().max_by_key(|(k, _)| grlex_key(k)) {
            if i >= li && j >= lj {
                let t = c / lc;
                let (qi, qj) = (i - li, j - lj);
                accumulate(&mut quotient, (qi, qj), t);
                for (&(di, dj), &dc) in &d.coeffs {
                    if (di, dj) == (li, lj) {
                        continue;
                    }
                    accumulate(&mut rest, (qi + di, qj + dj), -t * dc);
                }
                // The leading term cancels by construction.
                rest.remove(&(i, j));
            } else {
                rest.remove(&(i, j));
                remainder.insert((i, j), c);
            }
        }
        Ok((BiPoly { coeffs: quotient }, BiPoly { coeffs: remainder }))
    }

    /// Exact division: returns `q` with `q·d = p`. A remainder coefficient
    /// counts as zero when its modulus is at most `1e-12 · max(1, max|p|)`,
    /// which absorbs floating cancellation; with Gaussian-integer data and a
    /// unit leading coefficient the remainder is exactly zero.
    pub fn divide_exact(&self, d: &BiPoly) -> Result<BiPoly> {
        let (q, r) = self.div_rem(d)?;
        let tol = 1e-12 * self.max_abs_coeff().max(1.0);
        let bad = r.coeffs.values().filter(|c| c.norm() > tol).count();
        if bad > 0 {
            return Err(Error::NotDivisible(bad));
        }
        Ok(q)
    }

    /// Maximum of `|p|` over the `n × n` uniform grid on the torus. A lower
    /// bound for the sup norm on the bidisk, nondecreasing under `n → 2n`.
    pub fn sup_norm_grid(&self, n: usize) -> f64 {
        let n = n.max(2);
        let roots: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        let mut best = 0.0f64;
        for &u in &roots {
            for &v in &roots {
                best = best.max(self.eval_at(u, v).norm());
            }
        }
        best
    }

    /// Embeds the polynomial as a trigonometric polynomial on the torus.
    pub fn to_trig(&self) -> TrigPoly {
        TrigPoly::from_terms(self.terms().map(|((i, j), c)| (i as i64, j as i64, c)))
    }

    /// Restriction to the diagonal, `t ↦ p(t, t)`, as a polynomial in z₁.
    pub fn diagonal(&self) -> BiPoly {
        BiPoly::from_terms(self.terms().map(|((i, j), c)| (i + j, 0, c)))
    }

    /// Coefficient-wise maximum deviation from `other`.
    pub fn max_coeff_dev(&self, other: &BiPoly) -> f64 {
        (self - other).max_abs_coeff()
    }
}

fn horner_row(row: &[(u32, Complex64)], z: Complex64) -> Complex64 {
    // `row` is sorted ascending by exponent.
    let mut acc = zero();
    let mut prev: Option<u32> = None;
    for &(j, c) in row.iter().rev() {
        if let Some(p) = prev {
            acc *= z.powu(p - j);
        }
        acc += c;
        prev = Some(j);
    }
    if let Some(p) = prev {
        acc *= z.powu(p);
    }
    acc
}

fn powers(base: &BiPoly, n: u32, cap: Option<u32>) -> Vec<BiPoly> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BiPoly::one());
    for k in 1..=n as usize {
        let next = out[k - 1].mul_capped(base, cap);
        out.push(next);
    }
    out
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match i {
                0 => {}
                1 => write!(f, "·z1")?,
                _ => write!(f, "·z1^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "·z2")?,
                _ => write!(f, "·z2^{j}")?,
            }
        }
        Ok(())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &rhs.coeffs {
            accumulate(&mut coeffs, k, c);
        }
        BiPoly { coeffs }
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &rhs.coeffs {
            accumulate(&mut coeffs, k, -c);
        }
        BiPoly { coeffs }
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        self.mul_capped(rhs, None)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: BiPoly) -> BiPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BiPoly> for BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: &BiPoly) -> BiPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<BiPoly> for &BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: BiPoly) -> BiPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half_one_plus_z1() -> BiPoly {
        BiPoly::from_real_terms([(0, 0, 0.5), (1, 0, 0.5)])
    }

    #[test]
    fn eval_examples() {
        let z = Point2::new(c(0.3, 0.0), c(0.0, -0.4)).unwrap();
        assert_eq!(BiPoly::one().eval(&z), c(1.0, 0.0));

        let z = Point2::real(0.5, 0.2).unwrap();
        assert!((half_one_plus_z1().eval(&z) - c(0.75, 0.0)).norm() < 1e-15);

        let p = BiPoly::from_real_terms([(1, 1, 1.0), (2, 0, 1.0)]);
        let z = Point2::real(0.5, 0.5).unwrap();
        assert!((p.eval(&z) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_matches_naive_sum() {
        let p = BiPoly::from_terms([
            (0, 3, c(1.0, 2.0)),
            (2, 0, c(-1.0, 0.5)),
            (2, 5, c(0.25, 0.0)),
            (4, 1, c(0.0, 3.0)),
            (7, 7, c(2.0, -1.0)),
        ]);
        let (z1, z2) = (c(0.3, -0.7), c(-0.2, 0.6));
        let naive: Complex64 = p.terms().map(|((i, j), a)| a * z1.powu(i) * z2.powu(j)).sum();
        assert!((p.eval_at(z1, z2) - naive).norm() < 1e-14);
    }

    #[test]
    fn point_must_be_interior() {
        assert!(Point2::real(1.0, 0.0).is_err());
        assert!(Point2::new(c(0.0, 0.0), c(0.6, 0.8)).is_err());
        assert!(Point2::real(0.999, -0.999).is_ok());
    }

    #[test]
    fn arithmetic_examples() {
        let sum = BiPoly::z1() + BiPoly::z2();
        assert_eq!(sum, BiPoly::from_real_terms([(1, 0, 1.0), (0, 1, 1.0)]));

        let prod = (BiPoly::z1() - BiPoly::z2()) * (BiPoly::z1() + BiPoly::z2());
        assert_eq!(prod, BiPoly::from_real_terms([(2, 0, 1.0), (0, 2, -1.0)]));

        assert!((half_one_plus_z1() * BiPoly::zero()).is_zero());
        assert!((BiPoly::z1() - BiPoly::z1()).is_zero());
    }

    #[test]
    fn compose_examples() {
        let p = BiPoly::z1() * BiPoly::z2();
        let out = p.compose(&half_one_plus_z1(), &BiPoly::z2(), 4);
        assert_eq!(out, BiPoly::from_real_terms([(0, 1, 0.5), (1, 1, 0.5)]));

        for (i, j) in [(0, 0), (2, 3), (4, 1)] {
            let m = BiPoly::monomial(i, j, c(1.0, 0.0));
            let out = m.compose_exact(&BiPoly::z1(), &BiPoly::z1());
            assert_eq!(out, BiPoly::monomial(i + j, 0, c(1.0, 0.0)));
        }

        let sq = BiPoly::monomial(2, 0, c(1.0, 0.0));
        let out = sq.compose(&half_one_plus_z1(), &BiPoly::zero(), 2);
        assert_eq!(out, BiPoly::from_real_terms([(0, 0, 0.25), (1, 0, 0.5), (2, 0, 0.25)]));
    }

    #[test]
    fn compose_cap_truncates_per_variable() {
        let p = BiPoly::monomial(3, 0, c(1.0, 0.0));
        let phi = BiPoly::z1() + BiPoly::z2();
        let full = p.compose_exact(&phi, &BiPoly::zero());
        let capped = p.compose(&phi, &BiPoly::zero(), 2);
        assert_eq!(capped, full.truncate_box(2));
        assert_eq!(capped.coeff(2, 1), c(3.0, 0.0));
        assert_eq!(capped.coeff(3, 0), c(0.0, 0.0));
    }

    #[test]
    fn backward_shift_and_project_examples() {
        let p = BiPoly::from_real_terms([(1, 1, 1.0), (2, 0, 1.0)]);
        assert_eq!(p.backward_shift(Var::Z1), BiPoly::z2() + BiPoly::z1());

        let f2 = BiPoly::from_real_terms([(0, 0, 2.0), (0, 3, -1.0)]);
        assert!(f2.backward_shift(Var::Z1).is_zero());

        let q = BiPoly::from_real_terms([(1, 1, 1.0), (0, 2, 1.0)]);
        assert_eq!(q.project(Var::Z1), BiPoly::monomial(0, 2, c(1.0, 0.0)));

        let k = BiPoly::constant(c(2.0, -3.0));
        assert_eq!(k.project(Var::Z1), k);
        assert_eq!(k.project(Var::Z2), k);

        let r = BiPoly::from_real_terms([(0, 0, 7.0), (1, 2, 1.0), (0, 4, 3.0), (5, 0, 2.0)]);
        assert_eq!(r.project(Var::Z1).project(Var::Z2), BiPoly::constant(c(7.0, 0.0)));
    }

    #[test]
    fn divide_exact_examples() {
        let d = BiPoly::z1() - BiPoly::z2();
        let p = BiPoly::from_real_terms([(2, 0, 1.0), (0, 2, -1.0)]);
        assert_eq!(p.divide_exact(&d).unwrap(), BiPoly::z1() + BiPoly::z2());

        let p = BiPoly::from_real_terms([(1, 1, 1.0), (2, 0, -1.0)]);
        assert_eq!(p.divide_exact(&d).unwrap(), -BiPoly::z1());

        let p = BiPoly::z1() * BiPoly::z2();
        assert!(matches!(p.divide_exact(&d), Err(Error::NotDivisible(_))));
        // z₁z₂ = z₂·(z₁ − z₂) + z₂², the remainder is z₂².
        let (q, r) = p.div_rem(&d).unwrap();
        assert_eq!(q, BiPoly::z2());
        assert_eq!(r, BiPoly::monomial(0, 2, c(1.0, 0.0)));

        assert_eq!(p.divide_exact(&BiPoly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn sup_norm_examples() {
        let p = BiPoly::z1() + BiPoly::z2();
        assert!((p.sup_norm_grid(64) - 2.0).abs() < 1e-3);
        let k = BiPoly::constant(c(0.6, -0.8));
        assert!((k.sup_norm_grid(2) - 1.0).abs() < 1e-15);
        assert!((k.sup_norm_grid(17) - 1.0).abs() < 1e-15);
        assert!((half_one_plus_z1().sup_norm_grid(64) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn degrees() {
        assert_eq!(BiPoly::zero().degree_z1(), 0);
        assert_eq!(BiPoly::zero().degree_z2(), 0);
        let p = BiPoly::from_real_terms([(3, 1, 1.0), (0, 5, 1.0)]);
        assert_eq!((p.degree_z1(), p.degree_z2(), p.total_degree()), (3, 5, 5));
    }

    #[test]
    fn json_round_trip_and_duplicates() {
        let p = BiPoly::from_terms([(0, 0, c(0.5, 0.0)), (1, 3, c(-1.0, 2.0))]);
        let s = serde_json::to_string(&p).unwrap();
        let back: BiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);

        let dup = r#"{"terms":[{"i":1,"j":0,"re":1,"im":0},{"i":1,"j":0,"re":2,"im":0}]}"#;
        assert!(serde_json::from_str::<BiPoly>(dup).is_err());
        let neg = r#"{"terms":[{"i":-1,"j":0,"re":1,"im":0}]}"#;
        assert!(serde_json::from_str::<BiPoly>(neg).is_err());
        let zero_term = r#"{"terms":[{"i":2,"j":0,"re":0,"im":0}]}"#;
        assert!(serde_json::from_str::<BiPoly>(zero_term).unwrap().is_zero());
    }
}
