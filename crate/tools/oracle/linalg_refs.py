#!/usr/bin/env python3
"""Reference values for the frozen literals in the linalg unit tests.

Matrices are built from exact quarter-integer formulas so the Rust tests can
reconstruct bit-identical inputs. Values computed with numpy (LAPACK), an
implementation independent of the crate's kernels.
"""
import numpy as np


def hermitian_from_formula(n, shift):
    base = np.empty((n, n), dtype=complex)
    for p in range(n):
        for q in range(n):
            base[p, q] = complex(((3 * p + 5 * q) % 7) / 2.0, ((2 * p + q * q) % 5) / 4.0)
    h = base + base.conj().T
    h += shift * np.eye(n)
    return h


def fmt(x):
    return f"{x:.16e}"


def main():
    np.set_printoptions(precision=17)

    # 6x6 Hermitian eigenvalues (descending)
    a6 = hermitian_from_formula(6, 8.0)
    w = np.linalg.eigvalsh(a6)[::-1]
    print("evd6 eigenvalues descending:")
    for v in w:
        print("  ", fmt(v))
    print("evd6 trace:", fmt(np.trace(a6).real))

    # 2x2 [[2, i], [-i, 2]]
    a2 = np.array([[2.0, 1j], [-1j, 2.0]])
    print("evd2 eigenvalues:", np.linalg.eigvalsh(a2)[::-1])

    # 4x4 PD log2 determinant
    a4 = hermitian_from_formula(4, 6.0)
    sign, logabs = np.linalg.slogdet(a4)
    print("logdet4 log2|A|:", fmt(logabs / np.log(2.0)), "sign", sign)

    # rank-one inverse update, 5x5: out = (M - c u u^H)^{-1}
    m5 = hermitian_from_formula(5, 6.0)
    u = np.array([complex((k % 3) / 2.0, (k % 2) / 2.0) for k in range(5)])
    c = 0.5
    out = np.linalg.inv(m5 - c * np.outer(u, u.conj()))
    print("rank_one5 out[0,0]:", fmt(out[0, 0].real), fmt(out[0, 0].imag))
    print("rank_one5 out[2,4]:", fmt(out[2, 4].real), fmt(out[2, 4].imag))
    print("rank_one5 fro:", fmt(np.linalg.norm(out, "fro")))

    # row/col removal, 6x6, drop index 2 (0-based)
    keep = [0, 1, 3, 4, 5]
    sub = np.linalg.inv(a6[np.ix_(keep, keep)])
    print("remove6 out[0,0]:", fmt(sub[0, 0].real), fmt(sub[0, 0].imag))
    print("remove6 out[1,4]:", fmt(sub[1, 4].real), fmt(sub[1, 4].imag))
    print("remove6 fro:", fmt(np.linalg.norm(sub, "fro")))


if __name__ == "__main__":
    main()
