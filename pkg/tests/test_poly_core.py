import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import coefficient, poly, polynomials
from visserlab.poly_core import (
    BINOMIAL_MAX_N,
    GammaVector,
    Polynomial,
    PolynomialError,
    RootForm,
    binomial,
    coefficient_operator,
    dilate,
    evaluate,
    from_roots,
    reverse_conjugate,
    two_term_selector,
)
from visserlab.zero_location import roots


class TestConstruction:
    def test_degree_and_leading(self):
        P = poly(1, 2, 3)
        assert P.degree == 2 and P.leading == 3

    @pytest.mark.parametrize("coeffs", [(), (1, 0), (0,)])
    def test_rejects_empty_or_zero_leading(self, coeffs):
        with pytest.raises(PolynomialError):
            Polynomial(tuple(complex(c) for c in coeffs))

    def test_rejects_nan(self):
        with pytest.raises(PolynomialError):
            poly(1, float("nan"))

    def test_formal_keeps_zero_leading(self):
        P = Polynomial((1 + 0j, 0j), formal=True)
        assert P.degree == 1 and P.trimmed().degree == 0

    @given(polynomials(max_degree=10))
    def test_json_roundtrip_is_exact(self, P):
        assert Polynomial.loads(P.dumps()) == P

    @pytest.mark.parametrize(
        "text",
        ['{"coeffs": [true, 1]}', '{"coeffs": "12"}', "[1, 2]", "{", '{"coeffs": [[1, 2, 3]]}'],
    )
    def test_malformed_json(self, text):
        with pytest.raises(PolynomialError):
            Polynomial.loads(text)

    def test_bare_reals_accepted(self):
        assert Polynomial.loads('{"coeffs": [1, 2.5]}') == poly(1, 2.5)


class TestEvaluate:
    @pytest.mark.parametrize(
        "P, z, want",
        [
            (poly(1, 1), 1, 2),
            (poly(4, 4, 1), -2, 0),
            (poly(2, 0, 0, 1), 1j, 2 - 1j),
        ],
    )
    def test_examples(self, P, z, want):
        assert evaluate(P, z) == pytest.approx(want, abs=1e-15)

    @given(polynomials(max_degree=64), st.floats(0, 4), st.floats(0, 2 * math.pi))
    def test_matches_power_sum(self, P, r, t):
        z = r * complex(math.cos(t), math.sin(t))
        direct = sum(c * z**j for j, c in enumerate(P.coeffs))
        scale = sum(abs(c) * r**j for j, c in enumerate(P.coeffs))
        assert abs(evaluate(P, z) - direct) <= 1e-13 * scale

    def test_vectorised(self):
        z = np.array([1, -1, 1j])
        assert np.allclose(evaluate(poly(1, 1), z), 1 + z)


class TestReverseConjugate:
    @pytest.mark.parametrize(
        "P, want",
        [
            (poly(1, 2), poly(2, 1)),
            (poly(3, 0, 1 + 1j), poly(1 - 1j, 0, 3)),
        ],
    )
    def test_examples(self, P, want):
        assert reverse_conjugate(P) == want

    def test_boundary_modulus_grid(self):
        P = poly(6, 5, 1)
        z = np.exp(2j * np.pi * np.arange(256) / 256)
        gap = np.abs(np.abs(evaluate(reverse_conjugate(P), z)) - np.abs(evaluate(P, z)))
        assert gap.max() <= 1e-12

    def test_zero_constant_is_formal(self):
        Q = reverse_conjugate(poly(0, 1, 1))
        assert Q.formal and Q.degree == 2 and Q.leading == 0

    @given(polynomials(max_degree=12).filter(lambda P: P.coeffs[0] != 0))
    def test_involution(self, P):
        assert reverse_conjugate(reverse_conjugate(P)) == P

    @given(polynomials(max_degree=12))
    def test_same_modulus_on_circle(self, P):
        z = np.exp(2j * np.pi * np.arange(256) / 256)
        a, b = np.abs(evaluate(reverse_conjugate(P), z)), np.abs(evaluate(P, z))
        assert np.max(np.abs(a - b)) <= 1e-12 * sum(abs(c) for c in P.coeffs)


class TestDilate:
    @pytest.mark.parametrize(
        "P, rho, want",
        [(poly(2, 1), 2, poly(2, 2)), (poly(6, 5, 1), 2, poly(6, 10, 4))],
    )
    def test_examples(self, P, rho, want):
        assert dilate(P, rho) == want

    def test_roots_scale(self):
        r = roots(dilate(poly(6, 5, 1), 2)).roots
        assert sorted(v.real for v in r) == pytest.approx([-1.5, -1.0], abs=1e-12)

    @pytest.mark.parametrize("rho", [0, -1, float("nan")])
    def test_bad_rho(self, rho):
        with pytest.raises(ValueError):
            dilate(poly(1, 1), rho)

    def test_overflow(self):
        with pytest.raises(OverflowError):
            dilate(poly(*([1] * 65)), 1e10)

    @given(polynomials(max_degree=12), st.floats(0.25, 4))
    def test_roundtrip(self, P, rho):
        Q = dilate(dilate(P, rho), 1 / rho)
        for a, b in zip(P.coeffs, Q.coeffs):
            assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300) + 1e-300


class TestBinomial:
    @pytest.mark.parametrize(
        "n, k, want", [(5, 2, 10), (7, 0, 1), (64, 32, 1832624140942590534)]
    )
    def test_examples(self, n, k, want):
        assert binomial(n, k) == want

    def test_pascal_and_symmetry_exhaustive(self):
        for n in range(1, BINOMIAL_MAX_N + 1):
            for k in range(n + 1):
                assert binomial(n, k) == binomial(n, n - k)
                if 0 < k < n:
                    assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)

    @pytest.mark.parametrize("n, k", [(65, 1), (3, 4), (3, -1)])
    def test_out_of_range(self, n, k):
        with pytest.raises(ValueError):
            binomial(n, k)

    def test_exact_integer(self):
        assert isinstance(binomial(64, 32), int)


class TestCoefficientOperator:
    def test_identity(self):
        P = poly(9, 7, 4)
        assert coefficient_operator(GammaVector((1, 1, 1)), P) == P

    def test_leading_selector(self):
        Q = coefficient_operator(GammaVector((0, 0, 1)), poly(5, 1, 3))
        assert Q.coeffs == (0, 0, 3)

    def test_two_term_selector(self):
        Q = coefficient_operator(two_term_selector(2, 0), poly(9, 7, 4))
        assert Q.coeffs == (9, 0, 4)

    def test_selector_entries(self):
        g = two_term_selector(4, 2)
        assert g.entries == (0, 0, 1 / 6, 0, 1)
        assert g.bound_constant == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            coefficient_operator(GammaVector((1, 1)), poly(1, 1, 1))


class TestFromRoots:
    @pytest.mark.parametrize(
        "rf, want",
        [
            (RootForm(1, (-2,)), poly(2, 1)),
            (RootForm(1, (-2, -3)), poly(6, 5, 1)),
        ],
    )
    def test_examples(self, rf, want):
        assert from_roots(rf) == want

    def test_conjugate_pair_at_random_points(self):
        P = from_roots(RootForm(2, (1j, -1j)))
        z = np.random.default_rng(0).normal(size=8) + 1j * np.random.default_rng(1).normal(size=8)
        assert np.allclose(evaluate(P, z), 2 * z**2 + 2, rtol=1e-14)

    @given(
        st.lists(st.tuples(st.floats(0.5, 4), st.floats(0, 2 * math.pi)), min_size=1, max_size=12),
        coefficient.filter(lambda c: abs(c) > 0.1),
    )
    def test_roundtrip_through_root_finder(self, polar, lead):
        rs = tuple(r * complex(math.cos(t), math.sin(t)) for r, t in polar)
        assume(all(abs(a - b) >= 0.1 for i, a in enumerate(rs) for b in rs[:i]))
        P = from_roots(RootForm(lead, rs))
        rr = roots(P)
        Q = from_roots(RootForm(P.leading, rr.roots))
        scale = max(abs(c) for c in P.coeffs)
        for a, b in zip(P.coeffs, Q.coeffs):
            assert abs(a - b) <= 1e-9 * scale
