"""Weight components, theory modes, numeric and exact scalar backends."""

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl11.scalars import (
    NeedsNumericBackend,
    Theory,
    ValidationError,
    WeightComponent as WC,
)


def rationals(max_den=6, max_num=8):
    return st.builds(
        F,
        st.integers(min_value=-max_num, max_value=max_num),
        st.integers(min_value=1, max_value=max_den),
    )


def weight_components():
    return st.builds(WC, rationals(), rationals())


ARB = Theory.arb()
ARB2 = Theory.arb(F(1, 3), F(1, 5))
ROU3 = Theory.rou_odd(3)
ROU3X = Theory.rou_odd(3, backend="exact")
ROU2 = Theory.rou_even(2)
ROU2X = Theory.rou_even(2, backend="exact")
ROU4 = Theory.rou_even(4)

ALL_NUMERIC = [ARB, ARB2, ROU3, ROU2, ROU4]
ALL_EXACT = [ROU3X, ROU2X, Theory.rou_even(4, backend="exact")]


class TestWeightComponent:
    @given(weight_components(), weight_components())
    def test_add_sub_roundtrip(self, x, y):
        assert (x + y) - y == x
        assert x + y == y + x
        assert -(-x) == x
        assert x - x == WC(F(0), F(0))

    @given(weight_components(), rationals())
    def test_scalar_mul(self, x, c):
        assert c * x == WC(c * x.a, c * x.b)
        assert 2 * x == x + x

    def test_coerce(self):
        assert WC.coerce(3) == WC(F(3), F(0))
        assert WC.coerce(F(1, 2)) == WC(F(1, 2), F(0))
        assert WC.coerce(WC(F(1), F(2))) == WC(F(1), F(2))

    @pytest.mark.parametrize(
        "text,wc",
        [
            ("3/2", WC(F(3, 2), F(0))),
            ("-1", WC(F(-1), F(0))),
            ("2L", WC(F(0), F(2))),
            ("L", WC(F(0), F(1))),
            ("-L", WC(F(0), F(-1))),
            ("1+2L", WC(F(1), F(2))),
            ("1/2-3/4L", WC(F(1, 2), F(-3, 4))),
        ],
    )
    def test_parse_str_roundtrip(self, text, wc):
        assert WC.parse(text) == wc
        assert WC.parse(str(wc)) == wc


class TestModeValidation:
    def test_arb_rejects_degenerate_hbar(self):
        # q = exp(hbar) must avoid {0, 1, -1}
        with pytest.raises(ValidationError):
            Theory.arb(F(0), F(1))
        with pytest.raises(ValidationError):
            Theory.arb(F(0), F(0))
        Theory.arb(F(0), F(1, 2))  # q = i is fine

    def test_rou_parity_constraints(self):
        with pytest.raises(ValidationError):
            Theory.rou_odd(4)
        with pytest.raises(ValidationError):
            Theory.rou_odd(1)
        with pytest.raises(ValidationError):
            Theory.rou_even(3)
        with pytest.raises(ValidationError):
            Theory.rou_even(0)

    def test_exact_requires_rou(self):
        with pytest.raises(ValidationError):
            Theory.arb(backend="exact")

    def test_integral_weights_unsupported_for_rou_even(self):
        Theory.arb(weights="integral")
        Theory.rou_odd(3, weights="integral")
        with pytest.raises(ValidationError):
            Theory.rou_even(2, weights="integral")

    def test_tol_env_override(self, monkeypatch):
        monkeypatch.setenv("GL11_TOL", "1e-4")
        assert Theory.arb().tol == 1e-4
        monkeypatch.delenv("GL11_TOL")
        assert Theory.arb().tol == 1e-9
        assert Theory.arb(tol=1e-6).tol == 1e-6


class TestLattice:
    def test_arb_lattice_is_formal(self):
        n = ARB.lattice_multiple(WC(F(0), F(2)))
        assert n == 2
        assert ARB.lattice_multiple(WC(F(1), F(0))) is None
        assert ARB.lattice_multiple(WC(F(0), F(1, 2))) is None

    def test_rou_weights_collapse(self):
        # pi*i/hbar = r/2 for odd r, = r for even r
        assert ROU3.wc_value(WC(F(0), F(1))) == F(3, 2)
        assert ROU3.wc_value(WC(F(1), F(2))) == F(4)
        assert ROU2.wc_value(WC(F(0), F(1))) == F(2)
        assert ROU3.canon(WC(F(3, 2), F(0))) == ROU3.canon(WC(F(0), F(1)))
        assert ARB.canon(WC(F(3, 2), F(0))) != ARB.canon(WC(F(0), F(1)))

    def test_rou_lattice_multiple(self):
        assert ROU3.lattice_multiple(WC(F(3, 2), F(0))) == 1
        assert ROU3.lattice_multiple(WC(F(3), F(0))) == 2
        assert ROU3.lattice_multiple(WC(F(1), F(0))) is None
        assert ROU2.lattice_multiple(WC(F(2), F(0))) == 1
        assert ROU2.lattice_multiple(WC(F(1), F(0))) is None


class TestGenericity:
    def test_arb_examples(self):
        assert ARB.is_generic(WC(F(1, 3), F(0)), WC(F(0), F(0)))
        assert not ARB.is_generic(WC(F(0), F(2)), WC(F(5), F(0)))
        assert not ARB.is_generic(WC(F(0), F(0)), WC(F(1), F(0)))

    def test_rou_odd_examples(self):
        assert not ROU3.is_generic(WC(F(1, 2), F(0)), WC(F(0), F(0)))
        assert not ROU3.is_generic(WC(F(3), F(0)), WC(F(0), F(0)))
        assert ROU3.is_generic(WC(F(1, 3), F(0)), WC(F(0), F(0)))
        # degrees with half-integer E-part contain non-semisimple blocks
        # whatever the G-part is
        assert not ROU3.is_generic(WC(F(1, 2), F(0)), WC(F(1, 2), F(0)))

    def test_rou_even_examples(self):
        assert not ROU2.is_generic(WC(F(2), F(0)), WC(F(0), F(0)))
        assert not ROU2.is_generic(WC(F(4), F(0)), WC(F(1, 3), F(0)))
        assert ROU2.is_generic(WC(F(1), F(0)), WC(F(0), F(0)))
        assert ROU2.is_generic(WC(F(1, 2), F(0)), WC(F(0), F(0)))


def random_wc(rng, max_den=4):
    return WC(
        F(rng.randint(-6, 6), rng.randint(1, max_den)),
        F(rng.randint(-6, 6), rng.randint(1, max_den)),
    )


class TestQPow:
    @pytest.mark.parametrize("th", ALL_NUMERIC, ids=lambda t: t.label)
    def test_multiplicative_numeric(self, th):
        import random

        rng = random.Random(20240817)
        for _ in range(100):
            z, w = random_wc(rng), random_wc(rng)
            lhs = th.q_pow(z) * th.q_pow(w)
            rhs = th.q_pow(z + w)
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    @pytest.mark.parametrize("th", ALL_EXACT, ids=lambda t: t.label)
    def test_multiplicative_exact(self, th):
        import random

        rng = random.Random(20240817)
        done = 0
        while done < 100:
            z, w = random_wc(rng), random_wc(rng)
            try:
                lhs = th.q_pow(z) * th.q_pow(w)
                rhs = th.q_pow(z + w)
            except NeedsNumericBackend:
                continue
            assert lhs == rhs
            done += 1

    def test_root_of_unity_orders(self):
        for th in (ROU3, ROU3X):
            for n in (1, 2, -1):
                assert th.residual(th.q_pow(3 * n) - th.one) < 1e-12
        for th in (ROU2, ROU2X, ROU4):
            r = th.r
            assert th.residual(th.q_pow(2 * r) - th.one) < 1e-12
            # q^r = exp(pi i) = -1 for even r
            assert th.residual(th.q_pow(r) + th.one) < 1e-12

    def test_exact_conductor_rejection(self):
        ROU3X.q_pow(F(1, 4))  # 4*(1/4) = 1 is integral: fine
        with pytest.raises(NeedsNumericBackend):
            ROU3X.q_pow(F(1, 8))
        ROU2X.q_pow(F(1, 2))
        with pytest.raises(NeedsNumericBackend):
            ROU2X.q_pow(F(1, 3))

    def test_exact_matches_numeric(self):
        import random

        rng = random.Random(99)
        for th_x, th_n in ((ROU3X, ROU3), (ROU2X, ROU2)):
            for _ in range(40):
                z = WC(
                    F(rng.randint(-8, 8), rng.choice([1, 2, 4])),
                    F(rng.randint(-8, 8), 1),
                )
                try:
                    got = th_x.to_complex(th_x.q_pow(z))
                except NeedsNumericBackend:
                    continue  # outside the cyclotomic conductor for this r
                want = th_n.q_pow(z)
                assert abs(got - want) < 1e-12

    def test_q_pow_arb_value(self):
        # hbar = 1: q = e, and the lattice unit contributes exp(i pi b)
        assert abs(ARB.q_pow(1) - math.e) < 1e-12
        assert abs(ARB.q_pow(WC(F(0), F(1))) + 1.0) < 1e-12
        assert abs(ARB.q_pow(WC(F(0), F(1, 2))) - 1j) < 1e-12


class TestBracket:
    @pytest.mark.parametrize("th", ALL_NUMERIC + ALL_EXACT, ids=lambda t: t.label)
    def test_antisymmetry_and_units(self, th):
        import random

        rng = random.Random(7)
        assert th.residual(th.bracket(1) - th.one) < 1e-12
        assert th.residual(th.bracket(0)) < 1e-12
        done = 0
        while done < 20:
            z = random_wc(rng, max_den=2 if th.backend == "exact" else 4)
            try:
                s = th.bracket(z) + th.bracket(-1 * z)
            except NeedsNumericBackend:
                continue
            assert th.residual(s) < 1e-11
            done += 1

    def test_vanishes_exactly_on_lattice(self):
        assert ROU3.residual(ROU3.bracket(WC(F(3, 2), F(0)))) < 1e-14
        assert ROU3X.residual(ROU3X.bracket(WC(F(3), F(0)))) == 0.0
        assert ROU2.residual(ROU2.bracket(WC(F(2), F(0)))) < 1e-14
        # and not off the lattice
        assert ROU3.residual(ROU3.bracket(WC(F(1), F(0)))) > 0.1


class TestExactField:
    def test_sqrt_minus_one(self):
        for th in ALL_EXACT + ALL_NUMERIC:
            i = th.sqrt_minus_one()
            assert th.residual(i * i + th.one) < 1e-14

    def test_field_ops(self):
        x = ROU3X.q_pow(F(1, 4)) + ROU3X.scalar(F(2, 3))
        y = ROU3X.q_pow(-2)
        assert (x * y) / y == x
        one = x / x
        assert one == ROU3X.one
        with pytest.raises(ZeroDivisionError):
            _ = x / ROU3X.zero

    def test_formatting(self):
        s = ARB.format_scalar(ARB.q_pow(1))
        assert "2.718281828459" in s
        sx = ROU3X.format_scalar(ROU3X.q_pow(F(1, 4)))
        assert sx.startswith("[")  # coefficient list


class TestDegreesAndPsi:
    def test_arb_psi_is_character(self):
        alpha = WC(F(2, 3), F(0))
        g = ARB.degree(alpha, WC(F(0), F(0)))
        v1 = ARB.psi(g, (2, 0))
        v2 = ARB.psi(g, (3, 1))
        v3 = ARB.psi(g, (5, 1))
        assert abs(v1 * v2 - v3) < 1e-12

    def test_rou_psi_well_defined(self):
        # shifting a weight by the sigma lattice must not change psi
        for th in (ROU3, ROU4):
            g1 = th.degree(WC(F(1, 3), F(0)), WC(F(1, 5), F(0)))
            shift = 2 * th.r if th.kind == "rou-even" else th.r
            g2 = th.degree(
                WC(F(1, 3) + shift, F(0)), WC(F(1, 5) + th.r, F(0))
            )
            assert g1 == g2
            for k in [(1, 0, 0), (0, 1, 1), (2, -1, 0)]:
                assert abs(th.psi(g1, k) - th.psi(g2, k)) < 1e-12

    def test_integral_mode_degrees(self):
        thi = Theory.arb(weights="integral")
        g = thi.degree(WC(F(1, 3), F(2)), None)
        g_shift = thi.degree(WC(F(1, 3), F(4)), None)
        assert g == g_shift
        assert thi.psi(g, (0, 3, 0)) == pytest.approx(
            thi.q_pow(-2 * 3 * WC(F(1, 3), F(2))), abs=1e-12
        )


class TestMatrixHelpers:
    @pytest.mark.parametrize("th", [ARB, ROU3X], ids=lambda t: t.label)
    def test_array_eye_residual(self, th):
        m = th.eye(3)
        z = th.zeros(2, 3)
        assert m.shape == (3, 3) and z.shape == (2, 3)
        assert th.residual(m - th.eye(3)) == 0.0
        a = th.array([[th.one, th.zero], [th.zero, th.one]])
        assert th.residual(a @ a - th.eye(2)) < 1e-14
