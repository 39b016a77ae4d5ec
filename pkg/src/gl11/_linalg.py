"""Dense Gaussian elimination over a theory's scalar backend.

Matrices are numpy arrays, complex for the numeric backend and object-dtype
(cyclotomic entries) for the exact one.  All routines take the owning Theory
so zero tests use the right notion: exact equality or a tolerance scaled by
the largest entry of the input.
"""

from fractions import Fraction

import numpy as np


class LinAlgError(Exception):
    pass


def _eps(th, a) -> float:
    if th.backend == "exact":
        return 0.0
    m = max((abs(x) for x in a.flat), default=0.0)
    return th.tol * max(1.0, float(abs(m)))


def _is_zero(th, x, eps: float) -> bool:
    if th.backend == "exact":
        return x.is_zero
    return abs(x) <= eps


def rref(th, a):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    r = a.copy()
    m, n = r.shape
    eps = _eps(th, a)
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        if th.backend == "exact":
            piv = next((i for i in range(row, m) if not r[i, col].is_zero), None)
        else:
            cand = max(range(row, m), key=lambda i: abs(r[i, col]))
            piv = cand if abs(r[cand, col]) > eps else None
        if piv is None:
            continue
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = r[row] / r[row, col]
        for i in range(m):
            if i != row and not _is_zero(th, r[i, col], eps):
                r[i] = r[i] - r[i, col] * r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def rank(th, a) -> int:
    return len(rref(th, a)[1])


def nullspace(th, a):
    """Basis of the right kernel, one 1-d vector per free column."""
    r, pivots = rref(th, a)
    n = a.shape[1]
    free = [j for j in range(n) if j not in pivots]
    out = []
    for f in free:
        v = th.zeros(n, 1)[:, 0]
        v[f] = th.one
        for k, p in enumerate(pivots):
            v[p] = -r[k, f]
        out.append(v)
    return out


def solve_any(th, a, b):
    """A particular solution of A X = B (free variables zero).

    Raises LinAlgError when the system is inconsistent.
    """
    m, n = a.shape
    bmat = b if b.ndim == 2 else b.reshape(-1, 1)
    aug = np.concatenate([a, bmat], axis=1)
    r, pivots = rref(th, aug)
    if any(p >= n for p in pivots):
        raise LinAlgError("inconsistent linear system")
    x = th.zeros(n, bmat.shape[1])
    for k, p in enumerate(pivots):
        x[p, :] = r[k, n:]
    return x if b.ndim == 2 else x[:, 0]


def solve(th, a, b):
    """Solve A X = B for square invertible A."""
    m, n = a.shape
    if m != n:
        raise LinAlgError("solve requires a square matrix")
    if rank(th, a) < n:
        raise LinAlgError("singular matrix")
    return solve_any(th, a, b)


def inverse(th, a):
    return solve(th, a, th.eye(a.shape[0]))


def rational_signature(rows) -> int:
    """Signature of a symmetric matrix over Q by congruence diagonalisation."""
    n = len(rows)
    if n == 0:
        return 0
    m = [[Fraction(x) for x in row] for row in rows]
    sig = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][i] != 0), None)
        if piv is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if m[i][j] != 0),
                None,
            )
            if pair is None:
                break  # remaining block is zero
            i, j = pair
            # both diagonals vanish here, so this makes m[i][i] = 2*m[i][j] != 0
            for t in range(n):
                m[i][t] += m[j][t]
            for t in range(n):
                m[t][i] += m[t][j]
            piv = i
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            for t in range(n):
                m[t][k], m[t][piv] = m[t][piv], m[t][k]
        d = m[k][k]
        sig += 1 if d > 0 else -1
        coeffs = [m[i][k] / d for i in range(k + 1, n)]
        for i, c in zip(range(k + 1, n), coeffs):
            if c:
                for t in range(n):
                    m[i][t] -= c * m[k][t]
        for j, c in zip(range(k + 1, n), coeffs):
            if c:
                for t in range(n):
                    m[t][j] -= c * m[t][k]
    return sig
