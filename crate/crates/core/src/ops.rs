//! Finite sections of Toeplitz, Hankel and composition operators on the
//! Hardy space of the bidisk, in the orthonormal monomial basis.
//!
//! Domains are boxes `{0..N}²` of analytic monomials enumerated in graded
//! lexicographic order. Entry `(m, n)` of an [`OpMatrix`] is `⟨A z^n, z^m⟩`
//! in `L²(𝕋²)`. Norms of truncations are lower bounds for operator norms.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bipoly::{BiPoly, Point2};
use crate::error::{Error, Result};
use crate::kernel::SYMBOL_SLACK;
use crate::linalg::{self, CMatrix};
use crate::trig::TrigPoly;

/// Boxes with more than this many monomials use power iteration for norms.
const SVD_MAX_COLS: usize = 61 * 61;
const POWER_REL_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 100_000;

/// Relative increment below which a norm sequence counts as flat.
pub const PLATEAU_REL_TOL: f64 = 1e-6;
/// Number of consecutive flat increments that mark a plateau.
pub const PLATEAU_RUN: usize = 3;

/// Monomials `z₁^i z₂^j` of the box `{0..n}²`, graded lexicographic
/// ascending with z₁ > z₂: `1, z₂, z₁, z₂², z₁z₂, z₁², …`.
pub fn box_indices(n: u32) -> Vec<(i64, i64)> {
    let n = n as i64;
    let mut out = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
    for d in 0..=2 * n {
        for i in (d - n).max(0)..=d.min(n) {
            out.push((i, d - i));
        }
    }
    out
}

/// Dense matrix with explicit monomial labels for rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct OpMatrix {
    rows: Vec<(i64, i64)>,
    cols: Vec<(i64, i64)>,
    row_lookup: HashMap<(i64, i64), usize>,
    col_lookup: HashMap<(i64, i64), usize>,
    data: CMatrix,
    /// Number of columns whose image left the codomain window.
    pub truncated_columns: usize,
}

#[derive(Serialize)]
struct OpMatrixDump<'a> {
    rows: &'a [(i64, i64)],
    cols: &'a [(i64, i64)],
    truncated_columns: usize,
    entries: Vec<Complex64>,
}

fn lookup(keys: &[(i64, i64)]) -> HashMap<(i64, i64), usize> {
    keys.iter().enumerate().map(|(k, &v)| (v, k)).collect()
}

impl OpMatrix {
    pub fn new(rows: Vec<(i64, i64)>, cols: Vec<(i64, i64)>, data: CMatrix) -> Self {
        assert_eq!((data.nrows(), data.ncols()), (rows.len(), cols.len()));
        OpMatrix {
            row_lookup: lookup(&rows),
            col_lookup: lookup(&cols),
            rows,
            cols,
            data,
            truncated_columns: 0,
        }
    }

    fn from_entries<F>(rows: Vec<(i64, i64)>, cols: Vec<(i64, i64)>, f: F) -> Self
    where
        F: Fn((i64, i64), (i64, i64)) -> Complex64,
    {
        let data = CMatrix::from_fn(rows.len(), cols.len(), |r, c| f(rows[r], cols[c]));
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> &[(i64, i64)] {
        &self.rows
    }

    pub fn cols(&self) -> &[(i64, i64)] {
        &self.cols
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn row_of(&self, m: (i64, i64)) -> Option<usize> {
        self.row_lookup.get(&m).copied()
    }

    pub fn col_of(&self, n: (i64, i64)) -> Option<usize> {
        self.col_lookup.get(&n).copied()
    }

    /// `⟨A z^col, z^row⟩`, zero outside the stored window.
    pub fn entry(&self, row: (i64, i64), col: (i64, i64)) -> Complex64 {
        match (self.row_of(row), self.col_of(col)) {
            (Some(r), Some(c)) => self.data[(r, c)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Applies the matrix to the coefficient vector of `p`; coefficients of
    /// `p` outside the domain window are ignored.
    pub fn apply(&self, p: &BiPoly) -> TrigPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows.len()];
        for ((i, j), c) in p.terms() {
            if let Some(col) = self.col_of((i as i64, j as i64)) {
                for (r, o) in out.iter_mut().enumerate() {
                    *o += self.data[(r, col)] * c;
                }
            }
        }
        TrigPoly::from_terms(self.rows.iter().zip(out).map(|(&(m, n), c)| (m, n, c)))
    }

    pub fn adjoint(&self) -> OpMatrix {
        OpMatrix::new(self.cols.clone(), self.rows.clone(), self.data.adjoint())
    }

    /// Product `self · rhs`, matching `rhs` rows to `self` columns by label.
    pub fn compose_with(&self, rhs: &OpMatrix) -> OpMatrix {
        let mut data = CMatrix::zeros(self.rows.len(), rhs.cols.len());
        for (k, label) in rhs.rows.iter().enumerate() {
            if let Some(c) = self.col_of(*label) {
                for r in 0..self.rows.len() {
                    let a = self.data[(r, c)];
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..rhs.cols.len() {
                        data[(r, j)] += a * rhs.data[(k, j)];
                    }
                }
            }
        }
        OpMatrix::new(self.rows.clone(), rhs.cols.clone(), data)
    }

    /// JSON debug dump: index maps plus row-major entries as `[re, im]`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = Vec::with_capacity(self.rows.len() * self.cols.len());
        for r in 0..self.rows.len() {
            for c in 0..self.cols.len() {
                entries.push(self.data[(r, c)]);
            }
        }
        serde_json::to_value(OpMatrixDump {
            rows: &self.rows,
            cols: &self.cols,
            truncated_columns: self.truncated_columns,
            entries,
        })
        .expect("plain data serializes")
    }
}

/// Toeplitz section with explicit analytic row and column boxes:
/// entry `((k,l),(i,j)) = ŝ(k−i, l−j)`.
pub fn toeplitz_rect(sym: &TrigPoly, rows: u32, cols: u32) -> OpMatrix {
    OpMatrix::from_entries(box_indices(rows), box_indices(cols), |(k, l), (i, j)| sym.coeff(k - i, l - j))
}

/// `T_sym` on the box `{0..n}²`.
pub fn toeplitz(sym: &TrigPoly, n: u32) -> OpMatrix {
    toeplitz_rect(sym, n, n)
}

/// Non-analytic monomials `(m, n)` with `min(m, n) < 0` and `|m|, |n| ≤ w`.
pub fn hankel_window(w: u32) -> Vec<(i64, i64)> {
    let w = w as i64;
    let mut out = Vec::new();
    for m in -w..=w {
        for n in -w..=w {
            if m.min(n) < 0 {
                out.push((m, n));
            }
        }
    }
    out
}

/// `H_sym` from the box `{0..n}²` into the non-analytic window of half-width
/// `window`: entry `ŝ(m−i, n−j)`.
pub fn hankel_with_window(sym: &TrigPoly, n: u32, window: u32) -> OpMatrix {
    OpMatrix::from_entries(hankel_window(window), box_indices(n), |(m, k), (i, j)| sym.coeff(m - i, k - j))
}

/// `H_sym` on `{0..n}²`, codomain window `n + deg(sym)` (loss-free).
pub fn hankel(sym: &TrigPoly, n: u32) -> OpMatrix {
    hankel_with_window(sym, n, n + sym.degree())
}

/// `T_sym v` restricted to the box `{0..n}²`, computed by convolution.
pub fn apply_toeplitz(sym: &TrigPoly, v: &BiPoly, n: u32) -> BiPoly {
    let prod = sym * &v.to_trig();
    let n = n as i64;
    BiPoly::from_terms(
        prod.terms()
            .filter(|&((m, k), _)| (0..=n).contains(&m) && (0..=n).contains(&k))
            .map(|((m, k), c)| (m as u32, k as u32, c)),
    )
}

/// Analytic self-map `B = (φ, ψ)` of the bidisk given by polynomials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolPair {
    pub phi: BiPoly,
    pub psi: BiPoly,
}

impl SymbolPair {
    /// Requires `sup_norm_grid(·, 64) ≤ 1 + 1e-9` for both symbols.
    pub fn new(phi: BiPoly, psi: BiPoly) -> Result<Self> {
        for p in [&phi, &psi] {
            let s = p.sup_norm_grid(64);
            if s > 1.0 + SYMBOL_SLACK {
                return Err(Error::NotContractive(s));
            }
        }
        Ok(SymbolPair { phi, psi })
    }

    /// Image of `z₁^i z₂^j` under `C_B`, exact.
    fn column_images(&self, n: u32) -> Vec<BiPoly> {
        let pow = |base: &BiPoly| {
            let mut v = vec![BiPoly::one()];
            for k in 1..=n as usize {
                let next = &v[k - 1] * base;
                v.push(next);
            }
            v
        };
        let phi_pows = pow(&self.phi);
        let psi_pows = pow(&self.psi);
        box_indices(n)
            .into_iter()
            .map(|(i, j)| &phi_pows[i as usize] * &psi_pows[j as usize])
            .collect()
    }

    /// Smallest codomain box that holds every column image of `{0..n}²`.
    pub fn lossless_codomain(&self, n: u32) -> u32 {
        // Per-variable degree of φ^i ψ^j is i·deg(φ) + j·deg(ψ).
        n * (self.phi.degree_z1() + self.psi.degree_z1()).max(self.phi.degree_z2() + self.psi.degree_z2())
    }
}

/// `C_B` from `{0..n}²` into `{0..m}²`; column `z₁^i z₂^j` holds
/// `compose(z₁^i z₂^j, B, m)`. Columns that lose terms are counted in
/// `truncated_columns`.
pub fn composition_matrix(b: &SymbolPair, n: u32, m: u32) -> OpMatrix {
    let images = b.column_images(n);
    let rows = box_indices(m);
    let cols = box_indices(n);
    let mut out = OpMatrix::new(rows, cols, CMatrix::zeros((m as usize + 1).pow(2), images.len()));
    let mut truncated = 0;
    for (c, img) in images.iter().enumerate() {
        let mut lost = false;
        for ((i, j), v) in img.terms() {
            match out.row_of((i as i64, j as i64)) {
                Some(r) => out.data[(r, c)] = v,
                None => lost = true,
            }
        }
        truncated += lost as usize;
    }
    out.truncated_columns = truncated;
    out
}

/// Loss-free `C_B` section on `{0..n}²` whose rows are only the monomials
/// reached by some column (all other rows of the codomain box are zero).
pub fn composition_matrix_compact(b: &SymbolPair, n: u32) -> OpMatrix {
    let images = b.column_images(n);
    let mut support: Vec<(i64, i64)> = images
        .iter()
        .flat_map(|p| p.terms().map(|((i, j), _)| (i as i64, j as i64)))
        .collect();
    support.sort_by_key(|&(i, j)| (i + j, i));
    support.dedup();
    let mut out = OpMatrix::new(support.clone(), box_indices(n), CMatrix::zeros(support.len(), images.len()));
    for (c, img) in images.iter().enumerate() {
        for ((i, j), v) in img.terms() {
            let r = out.row_lookup[&(i as i64, j as i64)];
            out.data[(r, c)] = v;
        }
    }
    out
}

/// Largest singular value. Dense SVD up to a 61×61 box of columns, power
/// iteration on `A*A` beyond; all-zero rows and columns are dropped first.
pub fn op_norm(a: &OpMatrix) -> f64 {
    let m = a.matrix();
    let keep_rows: Vec<usize> = (0..m.nrows()).filter(|&r| m.row(r).iter().any(|x| x.norm() != 0.0)).collect();
    let keep_cols: Vec<usize> = (0..m.ncols()).filter(|&c| m.column(c).iter().any(|x| x.norm() != 0.0)).collect();
    if keep_rows.is_empty() || keep_cols.is_empty() {
        return 0.0;
    }
    let reduced = m.select_rows(keep_rows.iter()).select_columns(keep_cols.iter());
    if reduced.ncols() <= SVD_MAX_COLS {
        linalg::largest_singular_value(&reduced)
    } else {
        linalg::largest_singular_value_power(&reduced, POWER_REL_TOL, POWER_MAX_ITER)
    }
}

/// Norms of loss-free composition sections for each `n` in `n_list`.
/// Each value lower-bounds `‖C_B‖`; the sequence is nondecreasing because
/// the sections are nested.
pub fn comp_norm_sequence(b: &SymbolPair, n_list: &[u32]) -> Vec<f64> {
    n_list.par_iter().map(|&n| op_norm(&composition_matrix_compact(b, n))).collect()
}

/// True when the last [`PLATEAU_RUN`] increments are each below
/// [`PLATEAU_REL_TOL`] relative to the current value.
pub fn is_stabilized(seq: &[f64]) -> bool {
    if seq.len() < PLATEAU_RUN + 1 {
        return false;
    }
    seq.windows(2)
        .rev()
        .take(PLATEAU_RUN)
        .all(|w| (w[1] - w[0]).abs() <= PLATEAU_REL_TOL * w[1].abs().max(f64::MIN_POSITIVE))
}

/// Checks the Toeplitz product identity `T_{fg} = T_f T_g + H_{f̄}* H_g`
/// (with `H_φ = (I − P)(φ ·)`) on the protected block
/// `{0..N−d}²`, `d = max(deg f, deg g)`, building every intermediate window
/// large enough that no truncation error enters. Returns the largest
/// absolute entry deviation.
pub fn verify_han(f: &TrigPoly, g: &TrigPoly, n: u32) -> f64 {
    let d = f.degree().max(g.degree());
    let inner = n.saturating_sub(d);
    let window = inner + d;

    let lhs = toeplitz(&(f * g), inner);
    let t_g = toeplitz_rect(g, inner + d, inner);
    let t_f = toeplitz_rect(f, inner, inner + d);
    let h_g = hankel_with_window(g, inner, window);
    let h_fbar = hankel_with_window(&f.conj(), inner, window);
    let rhs = t_f.matrix() * t_g.matrix() + h_fbar.matrix().adjoint() * h_g.matrix();

    (lhs.matrix() - rhs).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `((1+|φ(0)|)/(1−|φ(0)|))^{1/2} · ((1+|ψ(0)|)/(1−|ψ(0)|))^{1/2}`.
pub fn theorem_m_bound(b: &SymbolPair) -> Result<f64> {
    let o = Point2::origin();
    let mut bound = 1.0;
    for p in [&b.phi, &b.psi] {
        let a = p.eval(&o).norm();
        if a >= 1.0 {
            return Err(Error::OriginOnBoundary(a));
        }
        bound *= ((1.0 + a) / (1.0 - a)).sqrt();
    }
    Ok(bound)
}

/// `F = R(·, 0)/√R(0, 0)
///    = (1 − conj(φ(0))φ)(1 − conj(ψ(0))ψ) / √((1 − |φ(0)|²)(1 − |ψ(0)|²))`.
pub fn normalized_f(b: &SymbolPair) -> Result<BiPoly> {
    let o = Point2::origin();
    let one = BiPoly::one();
    let mut f = BiPoly::one();
    let mut denom = 1.0;
    for p in [&b.phi, &b.psi] {
        let p0 = p.eval(&o);
        if p0.norm() >= 1.0 {
            return Err(Error::OriginOnBoundary(p0.norm()));
        }
        f = &f * &(&one - &p.scale(p0.conj()));
        denom *= 1.0 - p0.norm_sqr();
    }
    Ok(f.scale_real(1.0 / denom.sqrt()))
}

/// Coefficients of the Szegő kernel `k_w` on the box `{0..n}²`.
pub fn truncated_szego(w: &Point2, n: u32) -> BiPoly {
    let (a, b) = (w.z1.conj(), w.z2.conj());
    BiPoly::from_terms(
        box_indices(n)
            .into_iter()
            .map(|(i, j)| (i as u32, j as u32, a.powu(i as u32) * b.powu(j as u32))),
    )
}

/// `((I − T_φ T_φ̄) k_w)(z)` with every operator truncated to the box
/// `{0..n}²`; tends to the `H(φ)` kernel value at `(z, w)` as `n → ∞`.
pub fn dbr_defect_check(phi: &BiPoly, w: &Point2, z: &Point2, n: u32) -> Complex64 {
    let k = truncated_szego(w, n);
    let sym = phi.to_trig();
    let inner = apply_toeplitz(&sym.conj(), &k, n);
    let outer = apply_toeplitz(&sym, &inner, n);
    (&k - &outer).eval(z)
}
