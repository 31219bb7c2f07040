//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! Sizes in this crate never exceed a few dozen, where Jacobi is accurate,
//! dependency-free, and fast enough. The sweep stops once the off-diagonal
//! Frobenius mass falls below 1e-12 of the input norm.

use super::{require_hermitian, CMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;
const CONVERGENCE_REL: f64 = 1e-12;

/// Eigenvalues (descending) with a unitary matrix of eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenPair {
    /// Number of eigenvalues above `rel_tol` of the largest one; the
    /// effective PSD rank used when factoring sensing covariances.
    pub fn psd_rank(&self, rel_tol: f64) -> usize {
        let lmax = self.values.first().copied().unwrap_or(0.0).max(0.0);
        self.values.iter().filter(|&&v| v > rel_tol * lmax && v > 0.0).count()
    }
}

/// Diagonalizes a Hermitian matrix; eigenvalues are returned descending.
pub fn hermitian_evd(a: &CMatrix) -> Result<EigenPair> {
    require_hermitian(a, "hermitian_evd")?;
    let n = a.rows();
    if n == 0 {
        return Err(Error::model("hermitian_evd: empty matrix"));
    }

    // Work on the exact Hermitian part so rotations stay consistent when the
    // input carries rounding-level asymmetry.
    let mut w = a.add(&a.adjoint()).scale(0.5);
    let mut v = CMatrix::identity(n);
    let threshold = CONVERGENCE_REL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > threshold {
        return Err(Error::numeric(format!(
            "hermitian_evd: no convergence after {MAX_SWEEPS} sweeps (off-diagonal mass {:e})",
            off_diagonal_norm(&w)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|k| w[(k, k)].re).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    Ok(EigenPair {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: v.select_columns(&order),
    })
}

fn off_diagonal_norm(w: &CMatrix) -> f64 {
    let n = w.rows();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += w[(r, c)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation zeroing entry (p, q): w <- U^H w U, v <- v U with
/// U = I except U[p,p] = U[q,q] = cos, U[p,q] = -sin*phase,
/// U[q,p] = sin*conj(phase), phase = w[p,q]/|w[p,q]|.
fn rotate(w: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let m = apq.norm();
    if m == 0.0 {
        return;
    }
    let phase = apq / m;
    let tau = (w[(q, q)].re - w[(p, p)].re) / (2.0 * m);
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = w.rows();
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = c * wkp + s * phase.conj() * wkq;
        w[(k, q)] = -s * phase * wkp + c * wkq;
    }
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = c * wpk + s * phase * wqk;
        w[(q, k)] = -s * phase.conj() * wpk + c * wqk;
    }
    // The pivot is exactly zero after the rotation; pin it and keep the
    // diagonal real so rounding never reintroduces asymmetry.
    w[(p, q)] = Complex64::ZERO;
    w[(q, p)] = Complex64::ZERO;
    w[(p, p)] = Complex64::new(w[(p, p)].re, 0.0);
    w[(q, q)] = Complex64::new(w[(q, q)].re, 0.0);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp + s * phase.conj() * vkq;
        v[(k, q)] = -s * phase * vkp + c * vkq;
    }
}

#[cfg(test)]
// Reference values are kept exactly as the external tool printed them.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::super::testutil::{formula_hermitian, max_entry_diff, random_hermitian};
    use super::*;
    use crate::error::Error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(pair: &EigenPair) -> CMatrix {
        let n = pair.values.len();
        let mut lam = CMatrix::zeros(n, n);
        for k in 0..n {
            lam[(k, k)] = Complex64::new(pair.values[k], 0.0);
        }
        pair.vectors.mul(&lam).mul(&pair.vectors.adjoint())
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let pair = hermitian_evd(&CMatrix::identity(3)).unwrap();
        assert_eq!(pair.values, vec![1.0, 1.0, 1.0]);
        assert!(max_entry_diff(&pair.vectors.gram_cols(), &CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn diagonal_matrix_sorts_descending() {
        let mut d = CMatrix::zeros(2, 2);
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        d[(1, 1)] = Complex64::new(4.0, 0.0);
        let pair = hermitian_evd(&d).unwrap();
        assert_eq!(pair.values, vec![4.0, 1.0]);
        assert_eq!(pair.vectors[(1, 0)].norm(), 1.0);
        assert_eq!(pair.vectors[(0, 1)].norm(), 1.0);
    }

    #[test]
    fn two_by_two_with_imaginary_coupling() {
        let a = CMatrix::from_rows(&[
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        ]);
        let pair = hermitian_evd(&a).unwrap();
        assert!((pair.values[0] - 3.0).abs() < 1e-12);
        assert!((pair.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn formula_matrix_matches_frozen_reference() {
        // Reference eigenvalues from tools/oracle/linalg_refs.py (LAPACK).
        let expected = [
            2.6656125059531675e+01,
            1.2397101478550097e+01,
            9.9126678878617565e+00,
            6.8681102675116286e+00,
            4.3429989929694433e+00,
            2.8229963135753877e+00,
        ];
        let a = formula_hermitian(6, 8.0);
        let pair = hermitian_evd(&a).unwrap();
        for (got, want) in pair.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9 * want.abs(), "{got} vs {want}");
        }
        let tr: f64 = pair.values.iter().sum();
        assert!((tr - 63.0).abs() < 1e-10 * 63.0);
        assert!(reconstruct(&pair).sub(&a).frobenius_norm() <= 1e-8 * a.frobenius_norm());
    }

    #[test]
    fn random_matrices_reconstruct_and_stay_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 3, 7, 16, 33] {
            let a = random_hermitian(&mut rng, n);
            let pair = hermitian_evd(&a).unwrap();
            let norm = a.frobenius_norm().max(1e-30);
            assert!(reconstruct(&pair).sub(&a).frobenius_norm() <= 1e-8 * norm, "n={n}");
            let vhv = pair.vectors.gram_cols();
            assert!(max_entry_diff(&vhv, &CMatrix::identity(n)) < 1e-10, "n={n}");
            for k in 0..n {
                let av = a.mul_vec(&pair.vectors.col(k));
                let lv: Vec<Complex64> =
                    pair.vectors.col(k).iter().map(|z| z * pair.values[k]).collect();
                let resid: f64 = av
                    .iter()
                    .zip(&lv)
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(resid <= 1e-8 * norm, "n={n} k={k} resid={resid}");
            }
        }
    }

    #[test]
    fn zero_matrix_is_fine() {
        let pair = hermitian_evd(&CMatrix::zeros(4, 4)).unwrap();
        assert_eq!(pair.values, vec![0.0; 4]);
    }

    #[test]
    fn psd_rank_counts_significant_eigenvalues() {
        let mut d = CMatrix::zeros(3, 3);
        d[(0, 0)] = Complex64::new(2.0, 0.0);
        d[(1, 1)] = Complex64::new(1e-14, 0.0);
        let pair = hermitian_evd(&d).unwrap();
        assert_eq!(pair.psd_rank(1e-10), 1);
    }

    #[test]
    fn non_hermitian_input_is_model_error() {
        let mut a = CMatrix::identity(2);
        a[(0, 1)] = Complex64::new(0.3, 0.0);
        match hermitian_evd(&a) {
            Err(Error::Model(_)) => {}
            other => panic!("expected model error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_input_is_model_error() {
        let mut a = CMatrix::identity(2);
        a[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(hermitian_evd(&a), Err(Error::Model(_))));
    }
}
