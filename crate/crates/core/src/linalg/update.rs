//! Log-determinants, positive-definite inversion, and the two incremental
//! inverse updates the greedy loops rely on: the rank-one downdate
//! (M - c u u^H)^-1 and deletion of one row/column via the Schur complement
//! of the permuted inverse.

use super::{hermitian_evd, require_hermitian, vdot, CMatrix, PSD_CLAMP_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Pivot magnitudes below this are treated as exactly singular.
pub const SINGULAR_TOL: f64 = 1e-12;

enum Chol {
    Factor(CMatrix),
    /// A pivot hit zero within tolerance: PSD but singular.
    SingularAt(usize),
}

/// Lower-triangular Cholesky factor of a Hermitian matrix, or an error if a
/// pivot is negative beyond the PSD tolerance band.
fn cholesky_lower(a: &CMatrix, what: &str) -> Result<Chol> {
    let n = a.rows();
    let scale = (0..n)
        .map(|k| a[(k, k)].re.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d < -PSD_CLAMP_TOL * scale {
            return Err(Error::numeric(format!(
                "{what}: pivot {d:e} negative beyond PSD tolerance"
            )));
        }
        if d <= 1e-14 * scale {
            return Ok(Chol::SingularAt(j));
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(Chol::Factor(l))
}

/// Base-2 log-determinant of a Hermitian PSD matrix.
///
/// Positive definite inputs go through Cholesky; a matrix that is singular
/// within tolerance has determinant zero and yields negative infinity.
/// Eigenvalues in [-1e-10 * lambda_max, 0) count as rounding and clamp to 0;
/// anything more negative is rejected.
pub fn logdet_psd(a: &CMatrix) -> Result<f64> {
    require_hermitian(a, "logdet_psd")?;
    match cholesky_lower(a, "logdet_psd")? {
        Chol::Factor(l) => Ok((0..a.rows()).map(|k| 2.0 * l[(k, k)].re.log2()).sum()),
        Chol::SingularAt(_) => {
            // Settle borderline cases by the spectrum itself.
            let pair = hermitian_evd(a)?;
            let lmax = pair.values.first().copied().unwrap_or(0.0).max(0.0);
            let floor = -PSD_CLAMP_TOL * lmax.max(f64::MIN_POSITIVE);
            let mut sum = 0.0;
            for &v in &pair.values {
                if v < floor {
                    return Err(Error::numeric(format!(
                        "logdet_psd: eigenvalue {v:e} negative beyond PSD tolerance"
                    )));
                }
                if v <= 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                sum += v.log2();
            }
            Ok(sum)
        }
    }
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn hermitian_pd_inverse(a: &CMatrix) -> Result<CMatrix> {
    require_hermitian(a, "hermitian_pd_inverse")?;
    let n = a.rows();
    let l = match cholesky_lower(a, "hermitian_pd_inverse")? {
        Chol::Factor(l) => l,
        Chol::SingularAt(j) => {
            return Err(Error::numeric(format!(
                "hermitian_pd_inverse: singular pivot at index {j}, matrix is not positive definite"
            )));
        }
    };

    // Forward-substitute L^-1, then A^-1 = L^-H L^-1 filled mirror-exact.
    let mut linv = CMatrix::zeros(n, n);
    for j in 0..n {
        linv[(j, j)] = Complex64::new(1.0 / l[(j, j)].re, 0.0);
        for i in (j + 1)..n {
            let mut acc = Complex64::ZERO;
            for k in j..i {
                acc += l[(i, k)] * linv[(k, j)];
            }
            linv[(i, j)] = -acc / l[(i, i)].re;
        }
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::ZERO;
            for k in j..n {
                acc += linv[(k, i)].conj() * linv[(k, j)];
            }
            if i == j {
                acc = Complex64::new(acc.re, 0.0);
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
    }
    Ok(out)
}

/// Given `inv = M^-1` for Hermitian M, returns `(M - c u u^H)^-1` as
/// `inv + (c / (1 - c u^H inv u)) (inv u)(inv u)^H`.
pub fn rank_one_inverse_update(inv: &CMatrix, u: &[Complex64], c: f64) -> Result<CMatrix> {
    require_hermitian(inv, "rank_one_inverse_update")?;
    if u.len() != inv.rows() {
        return Err(Error::model(format!(
            "rank_one_inverse_update: vector length {} against a {}x{} inverse",
            u.len(),
            inv.rows(),
            inv.cols()
        )));
    }
    if !u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || !c.is_finite() {
        return Err(Error::model("rank_one_inverse_update: non-finite input"));
    }
    let w = inv.mul_vec(u);
    let quad = vdot(u, &w).re;
    let denominator = 1.0 - c * quad;
    if denominator.abs() < SINGULAR_TOL {
        return Err(Error::SingularUpdate {
            denominator: denominator.abs(),
        });
    }
    let mut out = inv.clone();
    out.add_scaled_outer(&w, c / denominator);
    Ok(out)
}

/// Given `inv = M^-1` for Hermitian M, returns the inverse of M with row and
/// column `j` deleted (0-based).
///
/// Cyclically permuting index j to the last position turns the update into a
/// Schur complement on the blocks of the permuted inverse; entrywise that is
/// `inv[a,b] - inv[a,j] inv[j,b] / inv[j,j]` over the kept indices, which is
/// evaluated directly since the permutation preserves the order of the rest.
pub fn remove_rowcol_inverse(inv: &CMatrix, j: usize) -> Result<CMatrix> {
    require_hermitian(inv, "remove_rowcol_inverse")?;
    let n = inv.rows();
    if j >= n {
        return Err(Error::model(format!(
            "remove_rowcol_inverse: index {j} out of range for size {n}"
        )));
    }
    if n < 2 {
        return Err(Error::model(
            "remove_rowcol_inverse: cannot remove the only row/column",
        ));
    }
    let pivot = inv[(j, j)];
    if pivot.norm() < SINGULAR_TOL {
        return Err(Error::SingularPivot {
            index: j,
            pivot: pivot.norm(),
        });
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != j).collect();
    let mut out = CMatrix::zeros(n - 1, n - 1);
    for a in 0..(n - 1) {
        for b in a..(n - 1) {
            let (ia, ib) = (keep[a], keep[b]);
            let mut val = inv[(ia, ib)] - inv[(ia, j)] * inv[(j, ib)] / pivot;
            if a == b {
                val = Complex64::new(val.re, 0.0);
            }
            out[(a, b)] = val;
            out[(b, a)] = val.conj();
        }
    }
    Ok(out)
}
