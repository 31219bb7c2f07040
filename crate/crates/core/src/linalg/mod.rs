//! Dense complex matrices and the Hermitian kernels behind the selection
//! algorithms: eigendecomposition, PSD log-determinants, positive-definite
//! inversion, and the two inverse-update rules (rank-one downdate and
//! row/column removal) that make greedy selection cheap.
//!
//! Matrix sizes here are RF-chain counts, at most a few dozen, so the kernels
//! favor clarity and explicit failure reporting over blocked algorithms. All
//! inverse state is stored as plain matrices because the selection loops
//! rewrite inverses directly instead of refactorizing.

mod evd;
mod update;

pub use evd::{hermitian_evd, EigenPair};
pub use update::{
    hermitian_pd_inverse, logdet_psd, rank_one_inverse_update, remove_rowcol_inverse,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative band in which a negative eigenvalue or pivot of a nominally PSD
/// matrix is treated as rounding noise and clamped to zero.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Serialized form: complex entries flattened row-major as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl From<CMatrix> for RawMatrix {
    fn from(m: CMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<RawMatrix> for CMatrix {
    type Error = String;

    fn try_from(raw: RawMatrix) -> std::result::Result<Self, String> {
        if raw.entries.len() != raw.rows * raw.cols {
            return Err(format!(
                "matrix payload has {} entries for a {}x{} shape",
                raw.entries.len(),
                raw.rows,
                raw.cols
            ));
        }
        Ok(CMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.entries.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        })
    }
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row slices; rows must have equal lengths.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        CMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![Complex64::ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + rhs[(r, c)])
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - rhs[(r, c)])
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * s)
    }

    /// Returns `I + s * self`; the argument of every log-determinant here.
    pub fn identity_plus_scaled(&self, s: f64) -> CMatrix {
        assert!(self.is_square(), "identity_plus_scaled needs a square matrix");
        let mut out = self.scale(s);
        for k in 0..self.rows {
            out[(k, k)] += Complex64::ONE;
        }
        out
    }

    /// `self^H * self`, a cols-by-cols Gram matrix.
    pub fn gram_cols(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut acc = Complex64::ZERO;
                for k in 0..self.rows {
                    acc += self[(k, i)].conj() * self[(k, j)];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    /// `self * self^H`, a rows-by-rows Gram matrix.
    pub fn gram_rows(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let mut acc = Complex64::ZERO;
                for k in 0..self.cols {
                    acc += self[(i, k)] * self[(j, k)].conj();
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    /// Adds `s * v v^H` in place, mirror-filling the lower triangle so a
    /// Hermitian matrix stays exactly Hermitian bit for bit.
    pub fn add_scaled_outer(&mut self, v: &[Complex64], s: f64) {
        assert!(self.is_square() && self.rows == v.len());
        for i in 0..self.rows {
            let d = self[(i, i)].re + s * v[i].norm_sqr();
            self[(i, i)] = Complex64::new(d, 0.0);
            for j in (i + 1)..self.cols {
                let val = self[(i, j)] + s * v[i] * v[j].conj();
                self[(i, j)] = val;
                self[(j, i)] = val.conj();
            }
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> CMatrix {
        for &j in idx {
            assert!(j < self.cols, "column index {j} out of range");
        }
        CMatrix::from_fn(self.rows, idx.len(), |r, c| self[(r, idx[c])])
    }

    pub fn select_rows(&self, idx: &[usize]) -> CMatrix {
        for &i in idx {
            assert!(i < self.rows, "row index {i} out of range");
        }
        CMatrix::from_fn(idx.len(), self.cols, |r, c| self[(idx[r], c)])
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, j)]).collect()
    }

    pub fn row(&self, r: usize) -> Vec<Complex64> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|k| self[(k, k)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Conjugated dot product `a^H b`.
pub fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Rejects matrices that are not finite, square, and Hermitian within tolerance.
pub(crate) fn require_hermitian(a: &CMatrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::model(format!(
            "{what}: expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.all_finite() {
        return Err(Error::model(format!("{what}: non-finite entries")));
    }
    if !a.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::model(format!(
            "{what}: Hermitian defect {:e} exceeds {:e} of max entry {:e}",
            a.hermitian_defect(),
            HERMITIAN_TOL,
            a.max_abs()
        )));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    /// Deterministic quarter-integer Hermitian matrix shared with the
    /// reference-value generator in tools/oracle/linalg_refs.py.
    pub fn formula_hermitian(n: usize, shift: f64) -> CMatrix {
        let base = CMatrix::from_fn(n, n, |p, q| {
            Complex64::new(
                ((3 * p + 5 * q) % 7) as f64 / 2.0,
                ((2 * p + q * q) % 5) as f64 / 4.0,
            )
        });
        let mut h = base.add(&base.adjoint());
        for k in 0..n {
            h[(k, k)] += shift;
        }
        h
    }

    pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        let base = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        base.add(&base.adjoint()).scale(0.5)
    }

    /// Random Hermitian positive definite matrix `B^H B + shift I`.
    pub fn random_hpd(rng: &mut impl Rng, n: usize, shift: f64) -> CMatrix {
        let base = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut g = base.gram_cols();
        for k in 0..n {
            g[(k, k)] += shift;
        }
        g
    }

    pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        a.sub(b).max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_and_shape_round_trip() {
        let mut m = CMatrix::zeros(2, 3);
        m[(1, 2)] = Complex64::new(1.0, -2.0);
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        assert_eq!(m[(1, 2)], Complex64::new(1.0, -2.0));
        assert_eq!(m[(0, 0)], Complex64::ZERO);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = CMatrix::from_rows(&[
            vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, -1.0)],
            vec![Complex64::new(0.0, 5.0), Complex64::new(-2.0, 0.0)],
        ]);
        let h = m.adjoint();
        assert_eq!(h[(0, 1)], Complex64::new(0.0, -5.0));
        assert_eq!(h[(1, 0)], Complex64::new(3.0, 1.0));
    }

    #[test]
    fn gram_matrices_are_hermitian_psd_shaped() {
        let m = CMatrix::from_fn(3, 5, |r, c| Complex64::new(r as f64 - c as f64, (r * c) as f64 / 3.0));
        let gc = m.gram_cols();
        let gr = m.gram_rows();
        assert_eq!(gc.rows(), 5);
        assert_eq!(gr.rows(), 3);
        assert_eq!(gc.hermitian_defect(), 0.0);
        assert_eq!(gr.hermitian_defect(), 0.0);
        let direct = m.adjoint().mul(&m);
        assert!(testutil::max_entry_diff(&gc, &direct) < 1e-12);
    }

    #[test]
    fn select_columns_keeps_order() {
        let m = CMatrix::from_rows(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)],
            vec![Complex64::new(4.0, 0.0), Complex64::new(5.0, 0.0), Complex64::new(6.0, 0.0)],
        ]);
        let s = m.select_columns(&[0, 2]);
        assert_eq!(s[(0, 1)].re, 3.0);
        assert_eq!(s[(1, 0)].re, 4.0);
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let mut m = CMatrix::identity(3);
        assert_eq!(m.hermitian_defect(), 0.0);
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(m.hermitian_defect() > 0.5);
        assert!(!m.is_hermitian(HERMITIAN_TOL));
    }

    #[test]
    fn json_round_trip_uses_re_im_pairs() {
        let m = CMatrix::from_rows(&[vec![Complex64::new(1.5, -0.25), Complex64::new(0.0, 2.0)]]);
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("[1.5,-0.25]"), "payload was {text}");
        let back: CMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_rejects_shape_payload_mismatch() {
        let text = r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(text).is_err());
    }
}
