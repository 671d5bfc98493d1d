"""Cyclic Jacobi eigenvalues for small dense symmetric matrices."""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence


def jacobi_eigenvalues(a, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending.

    Off-diagonal entries are annihilated until |a_pq| <= eps * sqrt(|a_pp a_qq|),
    the relative stopping rule under which Jacobi keeps high relative accuracy
    on positive definite input.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise ValueError("matrix must be symmetric")
    a = 0.5 * (a + a.T)
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0 or abs(apq) <= eps * np.sqrt(abs(a[p, p])) * np.sqrt(abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
        if not rotated:
            return np.sort(np.diag(a))
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
