"""Ground scalars for the unrolled gl(1|1) engine.

Weights live in the rank-two rational lattice spanned by 1 and L, where L
denotes pi*sqrt(-1)/hbar.  A theory fixes hbar (generic, or a primitive root
of unity via an odd or even integer r), a weight policy, a scalar backend and
a working tolerance.  The numeric backend is complex double; the exact one is
the cyclotomic field Q(zeta_{4r}) with coefficient vectors of Fractions.
"""

from __future__ import annotations

import cmath
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

import numpy as np

Rat = Union[int, Fraction]


class ValidationError(ValueError):
    """Bad mode data, malformed input, or a request outside a backend's domain."""


class NeedsNumericBackend(ValidationError):
    """Exact backend asked for a power of q outside its cyclotomic conductor."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ValidationError(f"not a rational: {x!r}")


_WC_RE = re.compile(
    r"""^\s*(?:(?P<a>[+-]?\d+(?:/\d+)?)(?!\s*L))?\s*
        (?:(?P<sign>[+-])?\s*(?P<b>\d+(?:/\d+)?)?\s*L)?\s*$""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class WeightComponent:
    """a + b*L with L = pi*sqrt(-1)/hbar, both coefficients rational."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))

    @staticmethod
    def coerce(x) -> "WeightComponent":
        if isinstance(x, WeightComponent):
            return x
        return WeightComponent(_frac(x), Fraction(0))

    @staticmethod
    def parse(text: str) -> "WeightComponent":
        m = _WC_RE.match(text)
        if not m or (m.group("a") is None and "L" not in text):
            raise ValidationError(f"cannot parse weight component: {text!r}")
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(0)
        if "L" in text:
            mag = Fraction(m.group("b")) if m.group("b") else Fraction(1)
            b = -mag if m.group("sign") == "-" else mag
        return WeightComponent(a, b)

    def __add__(self, other):
        o = WeightComponent.coerce(other)
        return WeightComponent(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = WeightComponent.coerce(other)
        return WeightComponent(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return WeightComponent.coerce(other) - self

    def __neg__(self):
        return WeightComponent(-self.a, -self.b)

    def __mul__(self, c: Rat):
        c = _frac(c)
        return WeightComponent(c * self.a, c * self.b)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        bmag = abs(self.b)
        btxt = "L" if bmag == 1 else f"{bmag}L"
        sign = "-" if self.b < 0 else "+"
        if self.a == 0:
            return f"{btxt}" if self.b > 0 else f"-{btxt}"
        return f"{self.a}{sign}{btxt}"


# ---------------------------------------------------------------------------
# dense rational polynomial helpers (low degree first), used only to set up
# the cyclotomic arithmetic tables

def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return _poly_trim(out)


def _poly_divmod(p, q):
    p = list(p)
    q = _poly_trim(list(q))
    dq = len(q) - 1
    lead = q[-1]
    quot = [Fraction(0)] * max(1, len(p) - dq)
    while len(_poly_trim(p)) - 1 >= dq and any(p):
        p = _poly_trim(p)
        shift = len(p) - 1 - dq
        c = p[-1] / lead
        quot[shift] = c
        for i, qi in enumerate(q):
            p[shift + i] -= c * qi
    return _poly_trim(quot), _poly_trim(p)


def _poly_sub(p, q):
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return _poly_trim([x - y for x, y in zip(p, q)])


def _poly_extgcd(a, b):
    r0, r1 = _poly_trim(list(a)), _poly_trim(list(b))
    s0, s1 = [Fraction(1)], [Fraction(0)]
    t0, t1 = [Fraction(0)], [Fraction(1)]
    while any(r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    return r0, s0, t0


def _cyclotomic(n: int):
    # Phi_n = (x^n - 1) / prod of Phi_d over proper divisors d
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    den = [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            den = _poly_mul(den, _cyclo_cache.setdefault(d, _cyclotomic(d)))
    quot, rem = _poly_divmod(num, den)
    assert not any(rem)
    return quot


_cyclo_cache: dict = {}


class _Ambient:
    """Arithmetic tables for Q(zeta_n)."""

    def __init__(self, n: int):
        self.n = n
        self.phi = _cyclo_cache.setdefault(n, _cyclotomic(n))
        self.deg = len(self.phi) - 1
        # x^j reduced mod Phi_n, enough for products of reduced elements
        span = max(n, 2 * self.deg - 1)
        tables = []
        cur = [Fraction(0)] * self.deg
        cur[0] = Fraction(1)
        for _ in range(span):
            tables.append(tuple(cur))
            # multiply by x: shift up, fold the overflowing x^deg term back in
            # using x^deg = -phi[:deg] (phi is monic)
            top = cur[-1]
            nxt = [Fraction(0)] + cur[:-1]
            if top != 0:
                for i in range(self.deg):
                    nxt[i] -= top * self.phi[i]
            cur = nxt
        self.xpow = tables
        self.root = cmath.exp(2j * math.pi / n)

    def reduce(self, coeffs) -> Tuple[Fraction, ...]:
        out = [Fraction(0)] * self.deg
        for j, c in enumerate(coeffs):
            if c == 0:
                continue
            t = self.xpow[j % self.n] if j >= len(self.xpow) else self.xpow[j]
            for i, ti in enumerate(t):
                out[i] += c * ti
        return tuple(out)


_ambients: dict = {}


def _ambient(n: int) -> _Ambient:
    if n not in _ambients:
        _ambients[n] = _Ambient(n)
    return _ambients[n]


class Cyc:
    """Element of Q(zeta_n), reduced coefficient vector in the power basis."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, c: Iterable[Fraction]):
        self.n = n
        self.c = tuple(c)

    @staticmethod
    def const(n: int, x: Rat) -> "Cyc":
        amb = _ambient(n)
        v = [Fraction(0)] * amb.deg
        v[0] = _frac(x)
        return Cyc(n, v)

    @staticmethod
    def root_pow(n: int, k: int) -> "Cyc":
        amb = _ambient(n)
        return Cyc(n, amb.xpow[k % n])

    def _co(self, other) -> Optional["Cyc"]:
        if isinstance(other, Cyc):
            if other.n != self.n:
                raise ValidationError("mixed cyclotomic ambients")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyc.const(self.n, other)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return Cyc(self.n, (a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return Cyc(self.n, (a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Cyc(self.n, (-a for a in self.c))

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        conv = [Fraction(0)] * (2 * len(self.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(o.c):
                if b == 0:
                    continue
                conv[i + j] += a * b
        return Cyc(self.n, _ambient(self.n).reduce(conv))

    __rmul__ = __mul__

    def inverse(self) -> "Cyc":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        amb = _ambient(self.n)
        g, _, t = _poly_extgcd(amb.phi, _poly_trim(list(self.c)))
        # g is a nonzero constant since Phi_n is irreducible over Q
        assert len(g) == 1 and g[0] != 0
        inv = [ti / g[0] for ti in t]
        return Cyc(self.n, amb.reduce(inv))

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyc.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash((self.n, self.c))

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def to_complex(self) -> complex:
        amb = _ambient(self.n)
        out = 0j
        for j in range(len(self.c) - 1, -1, -1):
            out = out * amb.root + complex(self.c[j])
        return out

    def __repr__(self):
        return f"Cyc{self.n}{list(self.c)}"


_DEFAULT_TOL = 1e-9


def _default_tol() -> float:
    return float(os.environ.get("GL11_TOL", _DEFAULT_TOL))


class Theory:
    """A mode of the theory: hbar, weight policy, scalar backend, tolerance.

    Use the factories ``Theory.arb``, ``Theory.rou_odd``, ``Theory.rou_even``.
    """

    def __init__(self, kind, r, hbar_pair, weights, backend, tol):
        self.kind = kind
        self.r = r
        self.hbar_pair = hbar_pair
        self.weights = weights
        self.backend = backend
        self.tol = tol
        if kind == "arb":
            ha, hb = hbar_pair
            self.hbar_complex = complex(ha) + complex(hb) * math.pi * 1j
        elif kind == "rou-odd":
            self.hbar_complex = 2j * math.pi / r
        else:
            self.hbar_complex = 1j * math.pi / r
        self._amb = _ambient(4 * r) if backend == "exact" else None

    # -- construction -------------------------------------------------------

    @staticmethod
    def arb(ha: Rat = 1, hb: Rat = 0, weights: str = "all",
            backend: str = "numeric", tol: Optional[float] = None) -> "Theory":
        ha, hb = _frac(ha), _frac(hb)
        if ha == 0 and hb.denominator == 1:
            raise ValidationError("hbar makes q a trivial root: exp(hbar) in {1,-1}")
        return Theory._make("arb", None, (ha, hb), weights, backend, tol)

    @staticmethod
    def rou_odd(r: int, weights: str = "all", backend: str = "numeric",
                tol: Optional[float] = None) -> "Theory":
        if r < 3 or r % 2 == 0:
            raise ValidationError(f"rou-odd requires odd r >= 3, got {r}")
        return Theory._make("rou-odd", r, None, weights, backend, tol)

    @staticmethod
    def rou_even(r: int, weights: str = "all", backend: str = "numeric",
                 tol: Optional[float] = None) -> "Theory":
        if r < 2 or r % 2 == 1:
            raise ValidationError(f"rou-even requires even r >= 2, got {r}")
        return Theory._make("rou-even", r, None, weights, backend, tol)

    @staticmethod
    def _make(kind, r, hbar_pair, weights, backend, tol):
        if weights not in ("all", "integral"):
            raise ValidationError(f"unknown weight policy {weights!r}")
        if backend not in ("numeric", "exact"):
            raise ValidationError(f"unknown backend {backend!r}")
        if backend == "exact" and kind == "arb":
            raise ValidationError("exact backend requires a root-of-unity mode")
        if weights == "integral" and kind == "rou-even":
            raise ValidationError(
                "integral weights are not defined for the even root-of-unity mode")
        return Theory(kind, r, hbar_pair, weights, backend,
                      _default_tol() if tol is None else tol)

    @property
    def label(self) -> str:
        if self.kind == "arb":
            core = f"arb({self.hbar_pair[0]},{self.hbar_pair[1]})"
        else:
            core = f"{self.kind}({self.r})"
        bits = [core]
        if self.weights != "all":
            bits.append(self.weights)
        if self.backend != "numeric":
            bits.append(self.backend)
        return ":".join(bits)

    def __repr__(self):
        return f"<Theory {self.label}>"

    # -- weights ------------------------------------------------------------

    def lattice_unit(self) -> Fraction:
        """Value of L = pi*sqrt(-1)/hbar as a rational, in ROU modes."""
        if self.kind == "rou-odd":
            return Fraction(self.r, 2)
        if self.kind == "rou-even":
            return Fraction(self.r)
        raise ValidationError("L is not rational at generic hbar")

    def wc_value(self, z: WeightComponent) -> Fraction:
        z = WeightComponent.coerce(z)
        return z.a + z.b * self.lattice_unit()

    def canon(self, z: WeightComponent):
        """Hashable normal form; ROU weights collapse to one rational."""
        z = WeightComponent.coerce(z)
        if self.kind == "arb":
            return (z.a, z.b)
        return self.wc_value(z)

    def sort_key(self, z: WeightComponent):
        z = WeightComponent.coerce(z)
        if self.kind == "arb":
            return (z.a, z.b)
        v = self.wc_value(z)
        return (v, Fraction(0))

    def weights_equal(self, z: WeightComponent, w: WeightComponent) -> bool:
        return self.canon(z) == self.canon(w)

    def lattice_multiple(self, z: WeightComponent) -> Optional[int]:
        """n with z = n*L if z lies on the singular lattice, else None."""
        z = WeightComponent.coerce(z)
        if self.kind == "arb":
            if z.a == 0 and z.b.denominator == 1:
                return int(z.b)
            return None
        t = self.wc_value(z) / self.lattice_unit()
        return int(t) if t.denominator == 1 else None

    def is_generic(self, lamE: WeightComponent, lamG=None) -> bool:
        """Whether the grading degree of a weight avoids the singular set.

        Only the E-component can obstruct: a degree whose E-part meets an
        integer translate of the singular lattice contains non-semisimple
        blocks for every G-part, so the G-component is never consulted.
        """
        lamE = WeightComponent.coerce(lamE)
        if self.kind == "arb":
            return self.lattice_multiple(lamE) is None
        v = self.wc_value(lamE)
        if self.kind == "rou-odd":
            return (2 * v).denominator != 1
        return (v / 2).denominator != 1

    def check_weight_policy(self, lamG: WeightComponent):
        if self.weights == "integral":
            lamG = WeightComponent.coerce(lamG)
            if lamG.b != 0 or lamG.a.denominator != 1:
                raise ValidationError(
                    f"integral weight mode requires integer G-weights, got {lamG}")

    # -- scalars ------------------------------------------------------------

    @property
    def one(self):
        return Cyc.const(self._amb.n, 1) if self._amb else (1 + 0j)

    @property
    def zero(self):
        return Cyc.const(self._amb.n, 0) if self._amb else 0j

    def scalar(self, x):
        if self._amb:
            if isinstance(x, Cyc):
                return x
            if isinstance(x, (int, Fraction)):
                return Cyc.const(self._amb.n, x)
            raise ValidationError(f"not exactly representable: {x!r}")
        if isinstance(x, Cyc):
            return x.to_complex()
        return complex(x)

    def sign(self, p: int):
        return self.one if p % 2 == 0 else -self.one

    def q_pow(self, z):
        z = WeightComponent.coerce(z)
        if self._amb is None:
            return cmath.exp(self.hbar_complex * complex(z.a)
                             + 1j * math.pi * float(z.b))
        v = self.wc_value(z)
        e = 4 * v if self.kind == "rou-odd" else 2 * v
        if e.denominator != 1:
            raise NeedsNumericBackend(
                f"q^({z}) lies outside Q(zeta_{self._amb.n}); "
                "needs the numeric backend")
        return Cyc.root_pow(self._amb.n, int(e))

    def wc_scalar(self, z):
        """The weight a + b*L itself as a backend scalar (not q to that power)."""
        z = WeightComponent.coerce(z)
        if self._amb is None:
            unit = 1j * math.pi / self.hbar_complex
            return complex(z.a) + complex(z.b) * unit
        return Cyc.const(self._amb.n, self.wc_value(z))

    def bracket(self, z):
        z = WeightComponent.coerce(z)
        return (self.q_pow(z) - self.q_pow(-z)) / (self.q_pow(1) - self.q_pow(-1))

    def sqrt_minus_one(self):
        if self._amb:
            return Cyc.root_pow(self._amb.n, self.r)
        return 1j

    def to_complex(self, s) -> complex:
        if isinstance(s, Cyc):
            return s.to_complex()
        return complex(s)

    def is_zero(self, s) -> bool:
        if isinstance(s, Cyc):
            return s.is_zero
        return abs(s) <= self.tol

    def residual(self, x) -> float:
        """Max complex magnitude of a scalar or array; exact zero gives 0.0."""
        if isinstance(x, np.ndarray):
            vals = [self.residual(v) for v in x.flat]
            return max(vals, default=0.0)
        if isinstance(x, Cyc):
            return 0.0 if x.is_zero else abs(x.to_complex())
        return abs(complex(x))

    def close(self, x, y) -> bool:
        return self.residual(x - y) <= self.tol

    def format_scalar(self, s) -> str:
        if isinstance(s, Cyc):
            return "[" + ", ".join(str(c) for c in s.c) + "]"
        z = complex(s)
        return f"{z.real:.12f}{z.imag:+.12f}i"

    # -- matrices -----------------------------------------------------------

    def zeros(self, m: int, n: int) -> np.ndarray:
        if self._amb:
            out = np.empty((m, n), dtype=object)
            out[:] = self.zero
            return out
        return np.zeros((m, n), dtype=complex)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = self.one
        return out

    def array(self, rows) -> np.ndarray:
        if self._amb:
            data = [[self.scalar(x) if not isinstance(x, Cyc) else x for x in row]
                    for row in rows]
            out = np.empty((len(data), len(data[0]) if data else 0), dtype=object)
            for i, row in enumerate(data):
                for j, x in enumerate(row):
                    out[i, j] = x
            return out
        return np.array([[complex(self.to_complex(x)) for x in row] for row in rows],
                        dtype=complex)

    # -- grading and free-realisation characters -----------------------------

    def degree(self, lamE: WeightComponent, lamG=None):
        """Canonical key of the grading degree holding the given weight."""
        lamE = WeightComponent.coerce(lamE)
        lamG = WeightComponent.coerce(lamG) if lamG is not None else WeightComponent(0, 0)
        if self.kind == "arb":
            if self.weights == "integral":
                return (lamE.a, lamE.b % 2)
            return (lamE.a, lamE.b)
        ve = self.wc_value(lamE)
        vg = self.wc_value(lamG)
        if self.kind == "rou-odd":
            if self.weights == "integral":
                return (ve % 1,)
            return (ve % 1, vg % 1)
        return (ve % 2, vg % 1)

    def psi(self, g, k):
        """Character pairing a grading degree with a free-realisation index."""
        if self.kind == "arb":
            if self.weights == "integral":
                _, n2, _ = k
                return self.q_pow(-2 * n2 * WeightComponent(g[0], g[1]))
            kk, _p = k
            return self.q_pow(-2 * kk * WeightComponent(g[0], g[1]))
        if self.kind == "rou-odd":
            if self.weights == "integral":
                _, n2, _ = k
                return self.q_pow(Fraction(-2) * n2 * g[0] * self.r)
            n1, n2, _ = k
            return self.q_pow(Fraction(-2) * (n1 * g[1] + n2 * g[0]) * self.r)
        n1, n2, _ = k
        return self.q_pow(Fraction(-2) * (2 * n1 * g[1] + n2 * g[0]) * self.r)
