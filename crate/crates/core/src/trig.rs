//! Trigonometric (Laurent) polynomials on the torus.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipoly::{PolyJson, TermJson};
use crate::error::{Error, Result};

/// Finitely supported `Σ c_mn z₁^m z₂^n` with `m, n ∈ ℤ` and `|z_k| = 1`.
/// Monomials are orthonormal in `L²(𝕋²)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct TrigPoly {
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl TryFrom<PolyJson> for TrigPoly {
    type Error = Error;

    fn try_from(raw: PolyJson) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for t in raw.terms {
            if coeffs.insert((t.i, t.j), Complex64::new(t.re, t.im)).is_some() {
                return Err(Error::DuplicateTerm(t.i, t.j));
            }
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(TrigPoly { coeffs })
    }
}

impl From<TrigPoly> for PolyJson {
    fn from(p: TrigPoly) -> Self {
        PolyJson {
            terms: p
                .coeffs
                .iter()
                .map(|(&(i, j), c)| TermJson { i, j, re: c.re, im: c.im })
                .collect(),
        }
    }
}

fn accumulate(map: &mut BTreeMap<(i64, i64), Complex64>, key: (i64, i64), c: Complex64) {
    let entry = map.entry(key).or_insert(Complex64::new(0.0, 0.0));
    *entry += c;
    if *entry == Complex64::new(0.0, 0.0) {
        map.remove(&key);
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([(0, 0, c)])
    }

    pub fn monomial(m: i64, n: i64, c: Complex64) -> Self {
        Self::from_terms([(m, n, c)])
    }

    /// Repeated exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (m, n, c) in terms {
            accumulate(&mut coeffs, (m, n), c);
        }
        TrigPoly { coeffs }
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest absolute exponent in either variable.
    pub fn degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|&(m, n)| m.unsigned_abs().max(n.unsigned_abs()) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Boundary conjugate: `c_mn ↦ conj(c_mn)` at `(−m, −n)`.
    pub fn conj(&self) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(&(m, n), c)| ((-m, -n), c.conj())).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> TrigPoly {
        TrigPoly::from_terms(self.terms().map(|((m, n), v)| (m, n, v * c)))
    }

    /// Evaluation at a torus point `(e^{iθ₁}, e^{iθ₂})`.
    pub fn eval_angles(&self, theta1: f64, theta2: f64) -> Complex64 {
        self.terms()
            .map(|((m, n), c)| c * Complex64::from_polar(1.0, m as f64 * theta1 + n as f64 * theta2))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient-wise maximum deviation from `other`.
    pub fn max_coeff_dev(&self, other: &TrigPoly) -> f64 {
        (self - other).max_abs_coeff()
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &rhs.coeffs {
            accumulate(&mut coeffs, k, c);
        }
        TrigPoly { coeffs }
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &rhs.coeffs {
            accumulate(&mut coeffs, k, -c);
        }
        TrigPoly { coeffs }
    }
}

/// Exact convolution of coefficient arrays.
impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut coeffs = BTreeMap::new();
        for (&(m1, n1), &a) in &self.coeffs {
            for (&(m2, n2), &b) in &rhs.coeffs {
                accumulate(&mut coeffs, (m1 + m2, n1 + n2), a * b);
            }
        }
        TrigPoly { coeffs }
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, -c)).collect(),
        }
    }
}

impl Add for TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: TrigPoly) -> TrigPoly {
        &self + &rhs
    }
}

impl Sub for TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: TrigPoly) -> TrigPoly {
        &self - &rhs
    }
}

impl Mul for TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: TrigPoly) -> TrigPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::BiPoly;

    #[test]
    fn conj_of_z1() {
        let t = BiPoly::z1().to_trig().conj();
        assert_eq!(t, TrigPoly::monomial(-1, 0, Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn pythagorean_pair_sums_to_one() {
        let phi = BiPoly::from_real_terms([(0, 0, 0.5), (1, 0, 0.5)]).to_trig();
        let a = BiPoly::from_real_terms([(0, 0, 0.5), (1, 0, -0.5)]).to_trig();
        let s = &phi * &phi.conj() + &a * &a.conj();
        assert_eq!(s, TrigPoly::constant(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn product_matches_pointwise() {
        let f = TrigPoly::from_terms([
            (-2, 1, Complex64::new(1.0, -1.0)),
            (0, 0, Complex64::new(0.5, 0.0)),
            (3, -1, Complex64::new(0.0, 2.0)),
        ]);
        let g = TrigPoly::from_terms([(1, 1, Complex64::new(2.0, 1.0)), (-1, 0, Complex64::new(-1.0, 0.0))]);
        let fg = &f * &g;
        for (t1, t2) in [(0.3, 1.1), (2.0, -0.7), (-3.0, 0.0)] {
            let lhs = fg.eval_angles(t1, t2);
            let rhs = f.eval_angles(t1, t2) * g.eval_angles(t1, t2);
            assert!((lhs - rhs).norm() < 1e-13);
        }
        // conj is the pointwise conjugate on the torus
        assert!((f.conj().eval_angles(0.4, 0.9) - f.eval_angles(0.4, 0.9).conj()).norm() < 1e-14);
    }

    #[test]
    fn degree_and_json() {
        let t = TrigPoly::from_terms([(-3, 1, Complex64::new(1.0, 0.0)), (2, 2, Complex64::new(0.0, 1.0))]);
        assert_eq!(t.degree(), 3);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<TrigPoly>(&s).unwrap(), t);
        let dup = r#"{"terms":[{"i":-1,"j":0,"re":1,"im":0},{"i":-1,"j":0,"re":1,"im":0}]}"#;
        assert!(serde_json::from_str::<TrigPoly>(dup).is_err());
    }
}
