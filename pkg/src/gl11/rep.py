"""Weight modules over unrolled quantum gl(1|1), as explicit matrices.

A module stores its basis data (E-weight, G-weight, parity per vector) and
the matrices of the two odd generators.  The even generators act diagonally
and are derived from the basis data, so tensor products and duals only have
to transform X and Y.  Tensor products follow the super convention: moving
an odd operator past an odd vector costs a sign.

Standard objects:

  V(alpha, a)     basis (v, v'), X v' = [alpha] v, Y v = v'
  Vbar(alpha, a)  basis (v', v), X v' = v, Y v = [alpha] v'
  P(n, b)         basis (v', v+, v-, v), X: v' -> v+, v- -> v,
                  Y: v' -> v-, v+ -> -v; E-weight n*L
  eps(n, b)       one-dimensional, X = Y = 0, E-weight n*L

with [z] the balanced quantum bracket.  G-weights and parities follow the
basis order, see make_std.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ._linalg import LinAlgError, inverse, nullspace, rref, solve_any
from .scalars import Theory, ValidationError, WeightComponent as WC


@dataclass(frozen=True)
class BasisVector:
    name: str
    wE: WC
    wG: WC
    parity: int


_KINDS = ("V", "Vbar", "P", "Eps")


@dataclass(frozen=True)
class StdObject:
    kind: str
    lamE: WC
    lamG: WC
    parity: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown object kind {self.kind!r}")
        object.__setattr__(self, "lamE", WC.coerce(self.lamE))
        object.__setattr__(self, "lamG", WC.coerce(self.lamG))
        object.__setattr__(self, "parity", int(self.parity) % 2)

    @staticmethod
    def V(alpha, a, p: int = 0) -> "StdObject":
        return StdObject("V", WC.coerce(alpha), WC.coerce(a), p)

    @staticmethod
    def Vbar(alpha, a, p: int = 0) -> "StdObject":
        return StdObject("Vbar", WC.coerce(alpha), WC.coerce(a), p)

    @staticmethod
    def P(n, b, p: int = 0) -> "StdObject":
        return StdObject("P", WC(Fraction(0), Fraction(n)), WC.coerce(b), p)

    @staticmethod
    def Eps(n, b, p: int = 0) -> "StdObject":
        return StdObject("Eps", WC(Fraction(0), Fraction(n)), WC.coerce(b), p)

    def text(self) -> str:
        if self.kind in ("V", "Vbar"):
            return f"{self.kind}({self.lamE}, {self.lamG}; p={self.parity})"
        tag = "eps" if self.kind == "Eps" else "P"
        if self.lamE.a == 0 and self.lamE.b.denominator == 1:
            return f"{tag}(n={self.lamE.b}, b={self.lamG}; p={self.parity})"
        return f"{tag}({self.lamE}, {self.lamG}; p={self.parity})"

    def __str__(self):
        return self.text()


_OBJ_RE = re.compile(r"^\s*(Vbar|V|P|eps|Eps)\s*\((.*)\)\s*$")


def parse_object(text: str) -> StdObject:
    m = _OBJ_RE.match(text)
    if not m:
        raise ValidationError(f"cannot parse object: {text!r}")
    kind = {"eps": "Eps"}.get(m.group(1), m.group(1))
    kv = {}
    vals = []
    for part in re.split(r"[;,]", m.group(2)):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            k, v = part.split("=", 1)
            kv[k.strip()] = v.strip()
        else:
            vals.append(part)
    p = int(kv.get("p", 0))
    if "n" in kv:
        lamE = WC(Fraction(0), Fraction(kv["n"]))
    elif vals:
        lamE = WC.parse(vals.pop(0))
    else:
        raise ValidationError(f"missing weight in {text!r}")
    if "b" in kv:
        lamG = WC.parse(kv["b"])
    elif vals:
        lamG = WC.parse(vals.pop(0))
    else:
        raise ValidationError(f"missing G-weight in {text!r}")
    return StdObject(kind, lamE, lamG, p)


class WeightModule:
    def __init__(self, theory: Theory, basis: List[BasisVector], X, Y, name: str = ""):
        self.theory = theory
        self.basis = list(basis)
        self.X = X
        self.Y = Y
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def parities(self) -> List[int]:
        return [b.parity for b in self.basis]

    def k_matrix(self, power: int = 1):
        th = self.theory
        out = th.zeros(self.dim, self.dim)
        for i, b in enumerate(self.basis):
            out[i, i] = th.q_pow(power * b.wE)
        return out

    def g_matrix(self):
        th = self.theory
        out = th.zeros(self.dim, self.dim)
        for i, b in enumerate(self.basis):
            out[i, i] = th.wc_scalar(b.wG)
        return out

    def parity_sign_matrix(self):
        th = self.theory
        out = th.zeros(self.dim, self.dim)
        for i, b in enumerate(self.basis):
            out[i, i] = th.sign(b.parity)
        return out

    def __repr__(self):
        return f"<WeightModule {self.name or '?'} dim={self.dim}>"


def make_std(th: Theory, obj: StdObject) -> WeightModule:
    """Build the standard module for obj over the given theory."""
    aE, aG, p = obj.lamE, obj.lamG, obj.parity
    th.check_weight_policy(aG)
    if obj.kind in ("P", "Eps"):
        if th.lattice_multiple(aE) is None:
            raise ValidationError(
                f"{obj.kind} needs an E-weight on the singular lattice, got {aE}")
    one = th.one
    if obj.kind == "Eps":
        basis = [BasisVector("v", aE, aG, p)]
        return WeightModule(th, basis, th.zeros(1, 1), th.zeros(1, 1), obj.text())
    if obj.kind == "V":
        basis = [
            BasisVector("v", aE, aG, p),
            BasisVector("v'", aE, aG - 1, (p + 1) % 2),
        ]
        X = th.zeros(2, 2)
        X[0, 1] = th.bracket(aE)
        Y = th.zeros(2, 2)
        Y[1, 0] = one
        return WeightModule(th, basis, X, Y, obj.text())
    if obj.kind == "Vbar":
        basis = [
            BasisVector("v'", aE, aG, p),
            BasisVector("v", aE, aG + 1, (p + 1) % 2),
        ]
        X = th.zeros(2, 2)
        X[1, 0] = one
        Y = th.zeros(2, 2)
        Y[0, 1] = th.bracket(aE)
        return WeightModule(th, basis, X, Y, obj.text())
    # projective cover
    basis = [
        BasisVector("v'", aE, aG, p),
        BasisVector("v+", aE, aG + 1, (p + 1) % 2),
        BasisVector("v-", aE, aG - 1, (p + 1) % 2),
        BasisVector("v", aE, aG, p),
    ]
    X = th.zeros(4, 4)
    X[1, 0] = one
    X[3, 2] = one
    Y = th.zeros(4, 4)
    Y[2, 0] = one
    Y[3, 1] = -one
    return WeightModule(th, basis, X, Y, obj.text())


def tensor(m1: WeightModule, m2: WeightModule) -> WeightModule:
    """Tensor product module with coproduct action of X and Y."""
    th = m1.theory
    if th is not m2.theory:
        raise ValidationError("tensor factors live over different theories")
    basis = [
        BasisVector(f"{b1.name}(x){b2.name}", b1.wE + b2.wE, b1.wG + b2.wG,
                    (b1.parity + b2.parity) % 2)
        for b1 in m1.basis
        for b2 in m2.basis
    ]
    # Delta(X) = X (x) K^-1 + 1 (x) X, Delta(Y) = Y (x) 1 + K (x) Y;
    # an odd right factor picks up the parity sign of the left slot
    sgn1 = m1.parity_sign_matrix()
    X = np.kron(m1.X, m2.k_matrix(-1)) + np.kron(sgn1, m2.X)
    Y = np.kron(m1.Y, th.eye(m2.dim)) + np.kron(m1.k_matrix(1) @ sgn1, m2.Y)
    return WeightModule(th, basis, X, Y, f"({m1.name})(x)({m2.name})")


def dual(m: WeightModule) -> WeightModule:
    """Dual module on the dual basis, via the antipode and super evaluation."""
    th = m.theory
    basis = [
        BasisVector(f"{b.name}*", -1 * b.wE, -1 * b.wG, b.parity) for b in m.basis
    ]
    sgn = m.parity_sign_matrix()
    sx = -(m.X @ m.k_matrix(1))
    sy = -(m.Y @ m.k_matrix(-1))
    # (x.f)(v) = (-1)^{|f||x|} f(S(x) v): transpose, with a sign on each
    # column for the parity of the functional
    X = sx.T @ sgn
    Y = sy.T @ sgn
    return WeightModule(th, basis, X, Y, f"({m.name})*")


@dataclass
class ModuleReport:
    ok: bool
    failures: List[str] = field(default_factory=list)


def check_module(m: WeightModule) -> ModuleReport:
    """Verify the defining relations and the weight grading of X and Y."""
    th = m.theory
    fails = []
    scale = max(1.0, max((th.residual(x) for x in m.X.flat), default=0.0),
                max((th.residual(x) for x in m.Y.flat), default=0.0))
    tol = th.tol * scale * scale
    if th.residual(m.X @ m.X) > tol:
        fails.append("X^2 != 0")
    if th.residual(m.Y @ m.Y) > tol:
        fails.append("Y^2 != 0")
    anti = m.X @ m.Y + m.Y @ m.X
    want = th.zeros(m.dim, m.dim)
    for i, b in enumerate(m.basis):
        want[i, i] = th.bracket(b.wE)
    if th.residual(anti - want) > tol:
        fails.append("XY + YX != (K - K^-1)/(q - q^-1)")
    for mat, shift, label in ((m.X, 1, "X"), (m.Y, -1, "Y")):
        for i, bi in enumerate(m.basis):
            for j, bj in enumerate(m.basis):
                if th.residual(mat[i, j]) <= tol:
                    continue
                if th.canon(bi.wE) != th.canon(bj.wE):
                    fails.append(f"{label}[{i},{j}] changes the E-weight")
                if th.canon(bi.wG) != th.canon(bj.wG + shift):
                    fails.append(f"{label}[{i},{j}] breaks the G-grading")
                if bi.parity != (bj.parity + 1) % 2:
                    fails.append(f"{label}[{i},{j}] breaks the parity grading")
    return ModuleReport(not fails, fails)


# ---------------------------------------------------------------------------
# decomposition into standard summands


@dataclass
class Summand:
    obj: StdObject
    include: np.ndarray
    project: np.ndarray


class DecompositionError(Exception):
    pass


def _comp_groups(th, members):
    """Group (local index, BasisVector) pairs by (G-weight, parity), in
    descending weight order."""
    groups = {}
    for loc, b in members:
        key = (th.canon(b.wG), b.parity)
        groups.setdefault(key, []).append(loc)
    reps = {}
    for loc, b in members:
        reps.setdefault((th.canon(b.wG), b.parity), b)
    order = sorted(groups, key=lambda k: (th.sort_key(reps[k].wG), k[1]), reverse=True)
    return [(reps[k], groups[k]) for k in order]


def _unit(th, n, j):
    v = th.zeros(n, 1)[:, 0]
    v[j] = th.one
    return v


def _scatter(th, dim, idx, vec):
    out = th.zeros(dim, 1)[:, 0]
    for loc, i in enumerate(idx):
        out[i] = vec[loc]
    return out


def _complement_in(th, inside, ambient_basis):
    """Vectors from ambient_basis completing span(inside) inside their joint
    span.  Both arguments are lists of 1-d vectors."""
    cols = inside + ambient_basis
    if not cols:
        return []
    a = np.stack(cols, axis=1)
    _, pivots = rref(th, a)
    return [ambient_basis[p - len(inside)] for p in pivots if p >= len(inside)]


def _typical_block(th, Xb, Yb, members):
    """Decompose a block whose E-weight has a nonvanishing bracket."""
    nloc = Xb.shape[0]
    out = []
    for rep, locs in _comp_groups(th, members):
        sub = Xb[:, locs]
        for w in nullspace(th, sub):
            full = th.zeros(nloc, 1)[:, 0]
            for loc, i in enumerate(locs):
                full[i] = w[loc]
            cols = [full, Yb @ full]
            obj = StdObject("V", rep.wE, rep.wG, rep.parity)
            out.append((obj, cols))
    if sum(len(c) for _, c in out) != nloc:
        raise DecompositionError("typical block does not split into doublets")
    return out


def _solve_section(th, Xb, Yb, members, pi, reps_idx):
    """Graded section s with pi s = Id intertwining X and Y.

    reps_idx: local indices representing the quotient coordinates.
    """
    nloc = len(members)
    nq = len(reps_idx)
    ej = th.zeros(nloc, nq)
    for c, j in enumerate(reps_idx):
        ej[j, c] = th.one
    xq = pi @ Xb @ ej
    yq = pi @ Yb @ ej
    key = lambda b: (th.canon(b.wE), th.canon(b.wG), b.parity)
    local_key = [key(b) for _, b in members]
    q_key = [local_key[j] for j in reps_idx]
    variables = [
        (i, c) for i in range(nloc) for c in range(nq) if local_key[i] == q_key[c]
    ]
    var_pos = {v: t for t, v in enumerate(variables)}
    nv = len(variables)
    neq = nq * nq + 2 * nloc * nq
    a = th.zeros(neq, nv)
    b = th.zeros(neq, 1)
    row = 0
    # pi s = Id
    for i in range(nq):
        for c in range(nq):
            for k in range(nloc):
                if (k, c) in var_pos:
                    a[row, var_pos[(k, c)]] = pi[i, k]
            if i == c:
                b[row, 0] = th.one
            row += 1
    # X s = s Xq and Y s = s Yq
    for mat, mq in ((Xb, xq), (Yb, yq)):
        for i in range(nloc):
            for c in range(nq):
                for k in range(nloc):
                    if (k, c) in var_pos:
                        t = var_pos[(k, c)]
                        a[row, t] = a[row, t] + mat[i, k]
                for d in range(nq):
                    if (i, d) in var_pos:
                        t = var_pos[(i, d)]
                        a[row, t] = a[row, t] - mq[d, c]
                row += 1
    try:
        sol = solve_any(th, a, b)[:, 0]
    except LinAlgError as exc:
        raise DecompositionError(f"no module section: {exc}") from exc
    s = th.zeros(nloc, nq)
    for (i, c), t in var_pos.items():
        s[i, c] = sol[t]
    return s, xq, yq


def _atypical_block(th, Xb, Yb, members):
    """Decompose a block whose E-weight lies on the singular lattice."""
    nloc = Xb.shape[0]
    n_mat = Xb @ Yb
    out = []
    used_in_p = []
    for rep, locs in _comp_groups(th, members):
        sub = n_mat[:, locs]
        _, pivots = rref(th, sub)
        for prel in pivots:
            j = locs[prel]
            w = _unit(th, nloc, j)
            cols = [w, Xb[:, j], Yb[:, j], n_mat[:, j]]
            obj = StdObject("P", rep.wE, rep.wG, rep.parity)
            out.append((obj, cols))
            used_in_p.extend(cols)
    if len(used_in_p) == nloc:
        return out
    # quotient coordinates: unit vectors completing the projective span
    if used_in_p:
        u = np.stack(used_in_p, axis=1)
        _, piv = rref(th, u.T)
        reps_idx = [j for j in range(nloc) if j not in piv]
        bmat = np.concatenate(
            [u] + [_unit(th, nloc, j).reshape(-1, 1) for j in reps_idx], axis=1)
        if bmat.shape[1] != nloc:
            raise DecompositionError("projective span has the wrong dimension")
        binv = inverse(th, bmat)
        pi = binv[len(used_in_p):, :]
        s, xq, yq = _solve_section(th, Xb, Yb, members, pi, reps_idx)
    else:
        reps_idx = list(range(nloc))
        s = th.eye(nloc)
        xq, yq = Xb, Yb
    # the section image carries commuting square-zero actions; split it into
    # Kac, anti-Kac and one-dimensional summands per graded component
    q_members = [(c, members[j][1]) for c, j in enumerate(reps_idx)]
    nq = len(reps_idx)
    for rep, qlocs in _comp_groups(th, q_members):
        ker_x = nullspace(th, xq[:, qlocs])
        ker_y = nullspace(th, yq[:, qlocs])
        both = nullspace(th, np.concatenate([xq[:, qlocs], yq[:, qlocs]]))
        embed = lambda vecs: [_scatter(th, nq, qlocs, v) for v in vecs]
        ker_x, ker_y, both = embed(ker_x), embed(ker_y), embed(both)
        for v in _complement_in(th, both, ker_x):
            obj = StdObject("V", rep.wE, rep.wG, rep.parity)
            out.append((obj, [s @ v, Yb @ (s @ v)]))
        for u_vec in _complement_in(th, both, ker_y):
            obj = StdObject("Vbar", rep.wE, rep.wG, rep.parity)
            out.append((obj, [s @ u_vec, Xb @ (s @ u_vec)]))
        images = [xq[:, c] for c, b in q_members
                  if th.canon(b.wG) == th.canon(rep.wG - 1) and b.parity != rep.parity]
        images += [yq[:, c] for c, b in q_members
                   if th.canon(b.wG) == th.canon(rep.wG + 1) and b.parity != rep.parity]
        for w in _complement_in(th, images, both):
            obj = StdObject("Eps", rep.wE, rep.wG, rep.parity)
            out.append((obj, [s @ w]))
    return out


def decompose(m: WeightModule) -> List[Summand]:
    """Split a module into standard summands.

    Returns Summand records whose include/project matrices compose to the
    identity of the summand and sum to the identity of m.
    """
    th = m.theory
    n = m.dim
    blocks = {}
    reps = {}
    for i, b in enumerate(m.basis):
        key = th.canon(b.wE)
        blocks.setdefault(key, []).append(i)
        reps.setdefault(key, b.wE)
    parts = []  # (obj, columns in full coordinates)
    for key in sorted(blocks, key=lambda k: th.sort_key(reps[k])):
        idx = blocks[key]
        members = [(loc, m.basis[i]) for loc, i in enumerate(idx)]
        Xb = m.X[np.ix_(idx, idx)]
        Yb = m.Y[np.ix_(idx, idx)]
        if th.lattice_multiple(reps[key]) is None:
            local = _typical_block(th, Xb, Yb, members)
        else:
            local = _atypical_block(th, Xb, Yb, members)
        for obj, cols in local:
            parts.append((obj, [_scatter(th, n, idx, c) for c in cols]))
    ncols = sum(len(c) for _, c in parts)
    if ncols != n:
        raise DecompositionError(f"found {ncols} basis vectors, expected {n}")
    cmat = np.stack([c for _, cols in parts for c in cols], axis=1)
    try:
        cinv = inverse(th, cmat)
    except LinAlgError as exc:
        raise DecompositionError("summand basis is singular") from exc
    out = []
    at = 0
    for obj, cols in parts:
        d = len(cols)
        out.append(Summand(obj, cmat[:, at:at + d], cinv[at:at + d, :]))
        at += d
    return out


def hom_basis(th: Theory, src: WeightModule, dst: WeightModule):
    """Basis of even degree-zero intertwiners src -> dst."""
    key = lambda b: (th.canon(b.wE), th.canon(b.wG), b.parity)
    variables = [
        (i, j)
        for i, bi in enumerate(dst.basis)
        for j, bj in enumerate(src.basis)
        if key(bi) == key(bj)
    ]
    if not variables:
        return []
    var_pos = {v: t for t, v in enumerate(variables)}
    nv = len(variables)
    a = th.zeros(2 * dst.dim * src.dim, nv)
    row = 0
    for mat_s, mat_d in ((src.X, dst.X), (src.Y, dst.Y)):
        for i in range(dst.dim):
            for j in range(src.dim):
                for k in range(src.dim):
                    if (i, k) in var_pos:
                        t = var_pos[(i, k)]
                        a[row, t] = a[row, t] + mat_s[k, j]
                for k in range(dst.dim):
                    if (k, j) in var_pos:
                        t = var_pos[(k, j)]
                        a[row, t] = a[row, t] - mat_d[i, k]
                row += 1
    kernel = nullspace(th, a)
    out = []
    for vec in kernel:
        t_mat = th.zeros(dst.dim, src.dim)
        for (i, j), t in var_pos.items():
            t_mat[i, j] = vec[t]
        out.append(t_mat)
    return out


def sigma_object(th: Theory, k) -> StdObject:
    """The invertible one-dimensional object indexed by the free realisation."""
    if th.kind == "arb" and th.weights == "all":
        m, p = k
        return StdObject("Eps", WC(Fraction(0), Fraction(0)), WC.coerce(m), p)
    n, n2, p = k
    unit = 1 if th.kind == "arb" else th.r
    return StdObject("Eps", WC(Fraction(0), Fraction(2 * n)),
                     WC.coerce(Fraction(n2 * unit)), p)
