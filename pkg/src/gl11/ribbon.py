"""Ribbon structure on weight modules.

Duality pairings, the braiding and its inverse, the ribbon twist, and the
quantum (pivotal) traces.  Every map here is an honest matrix over the
theory's backend, acting on the ordered bases produced by rep.tensor and
rep.dual.  The pivot is sign(parity) * q^(E-weight); closing a strand on
the right uses it directly, closing on the left uses its inverse.
"""

from __future__ import annotations

import cmath

import numpy as np

from .rep import WeightModule
from .scalars import Theory


def _pivot(th: Theory, b, sign: int):
    return th.sign(b.parity) * th.q_pow(sign * b.wE)


def ev_left(m: WeightModule):
    """Pairing M* (x) M -> 1 on the dual-then-module ordering."""
    th = m.theory
    d = m.dim
    out = th.zeros(1, d * d)
    for i in range(d):
        out[0, i * d + i] = th.one
    return out


def coev_left(m: WeightModule):
    """Copairing 1 -> M (x) M*."""
    th = m.theory
    d = m.dim
    out = th.zeros(d * d, 1)
    for i in range(d):
        out[i * d + i, 0] = th.one
    return out


def ev_right(m: WeightModule):
    """Pairing M (x) M* -> 1; carries the pivot."""
    th = m.theory
    d = m.dim
    out = th.zeros(1, d * d)
    for i, b in enumerate(m.basis):
        out[0, i * d + i] = _pivot(th, b, +1)
    return out


def coev_right(m: WeightModule):
    """Copairing 1 -> M* (x) M; carries the inverse pivot."""
    th = m.theory
    d = m.dim
    out = th.zeros(d * d, 1)
    for i, b in enumerate(m.basis):
        out[i * d + i, 0] = _pivot(th, b, -1)
    return out


def _cartan_power(th: Theory, b1, b2, sign: int):
    """q^(sign * (wE1*wG2 + wG1*wE2)) for a pair of basis vectors.

    Weight products leave the rank-two lattice, so in the exact backend the
    exponent must collapse to a single rational (ROU modes always do that;
    the conductor check in q_pow still applies).  Numerically the exponent
    is an arbitrary complex number and goes straight through exp.
    """
    if th.backend == "exact":
        expo = (th.wc_value(b1.wE) * th.wc_value(b2.wG)
                + th.wc_value(b1.wG) * th.wc_value(b2.wE))
        return th.q_pow(sign * expo)
    z = (th.wc_scalar(b1.wE) * th.wc_scalar(b2.wG)
         + th.wc_scalar(b1.wG) * th.wc_scalar(b2.wE))
    return cmath.exp(sign * th.hbar_complex * z)


def _upsilon(m1: WeightModule, m2: WeightModule, sign: int):
    # diagonal Cartan part of the R-matrix on M1 (x) M2
    th = m1.theory
    d1, d2 = m1.dim, m2.dim
    out = th.zeros(d1 * d2, d1 * d2)
    for i, b1 in enumerate(m1.basis):
        for j, b2 in enumerate(m2.basis):
            k = i * d2 + j
            out[k, k] = _cartan_power(th, b1, b2, sign)
    return out


def _rtilde(m1: WeightModule, m2: WeightModule, sign: int):
    """Unipotent part Id + sign*(q - q^-1) (XK (x) YK^-1), Koszul-corrected.

    The correction S1 sits between X and its argument because the odd
    second factor Y walks past the first tensor leg.  The nilpotent term
    squares to zero (X^2 = Y^2 = 0 and K is central on weight modules), so
    sign = -1 gives the genuine inverse.
    """
    th = m1.theory
    n = (np.kron(m1.X @ m1.parity_sign_matrix() @ m1.k_matrix(1),
                 m2.Y @ m2.k_matrix(-1))
         * (th.q_pow(1) - th.q_pow(-1)))
    eye = th.eye(m1.dim * m2.dim)
    return eye + n if sign > 0 else eye - n


def super_swap(m1: WeightModule, m2: WeightModule):
    """Graded flip M1 (x) M2 -> M2 (x) M1."""
    th = m1.theory
    d1, d2 = m1.dim, m2.dim
    out = th.zeros(d2 * d1, d1 * d2)
    for i, b1 in enumerate(m1.basis):
        for j, b2 in enumerate(m2.basis):
            out[j * d1 + i, i * d2 + j] = th.sign(b1.parity * b2.parity)
    return out


def braiding(m1: WeightModule, m2: WeightModule):
    """Braiding c: M1 (x) M2 -> M2 (x) M1."""
    return super_swap(m1, m2) @ _rtilde(m1, m2, +1) @ _upsilon(m1, m2, -1)


def braiding_inv(m1: WeightModule, m2: WeightModule):
    """Inverse braiding M2 (x) M1 -> M1 (x) M2."""
    return _upsilon(m1, m2, +1) @ _rtilde(m1, m2, -1) @ super_swap(m2, m1)


def ptrace_right(m1: WeightModule, m2: WeightModule, f):
    """Close the second strand of f on M1 (x) M2; an operator on M1."""
    th = m1.theory
    d1, d2 = m1.dim, m2.dim
    out = th.zeros(d1, d1)
    wt = [_pivot(th, b, +1) for b in m2.basis]
    for i2 in range(d1):
        for i in range(d1):
            acc = th.zero
            for j in range(d2):
                acc = acc + f[i2 * d2 + j, i * d2 + j] * wt[j]
            out[i2, i] = acc
    return out


def ptrace_left(m1: WeightModule, m2: WeightModule, f):
    """Close the first strand of f on M1 (x) M2; an operator on M2."""
    th = m1.theory
    d1, d2 = m1.dim, m2.dim
    out = th.zeros(d2, d2)
    wt = [_pivot(th, b, -1) for b in m1.basis]
    for j2 in range(d2):
        for j in range(d2):
            acc = th.zero
            for i in range(d1):
                acc = acc + wt[i] * f[i * d2 + j2, i * d2 + j]
            out[j2, j] = acc
    return out


def qtrace(m: WeightModule, f):
    """Quantum trace of an operator on M (both closures agree on morphisms)."""
    th = m.theory
    acc = th.zero
    for i, b in enumerate(m.basis):
        acc = acc + _pivot(th, b, +1) * f[i, i]
    return acc


def qdim(m: WeightModule):
    """Quantum dimension, the trace of the identity."""
    th = m.theory
    acc = th.zero
    for b in m.basis:
        acc = acc + _pivot(th, b, +1)
    return acc


def twist(m: WeightModule):
    """Ribbon twist as an operator on M, the closed-up self-braiding."""
    return ptrace_right(m, m, braiding(m, m))


def twist_inv(m: WeightModule):
    return ptrace_right(m, m, braiding_inv(m, m))
