import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import poly
from visserlab.poly_core import RootForm, dilate, from_roots
from visserlab.zero_location import (
    GENERATOR_GAP,
    GeneratorSpec,
    HypothesisError,
    RootFindingError,
    certify_zero_free,
    coefficient_dominance_check,
    generate_unconstrained,
    generate_zero_free,
    require_zero_free,
    roots,
)


class TestRoots:
    def test_real_pair(self):
        rr = roots(poly(6, 5, 1))
        assert sorted(z.real for z in rr.roots) == pytest.approx([-3, -2], abs=1e-14)
        assert rr.accuracy <= 1e-12

    def test_imaginary_pair(self):
        rr = roots(poly(1, 0, 1))
        assert sorted(rr.roots, key=lambda z: z.imag) == pytest.approx([-1j, 1j], abs=1e-15)

    def test_double_root_loses_half_the_digits(self):
        rr = roots(poly(4, 4, 1))
        assert rr.roots == pytest.approx([-2, -2], abs=1e-7)
        assert 1e-9 < rr.accuracy < 1e-6

    def test_zero_roots_are_exact(self):
        rr = roots(poly(0, 0, 2, 1))
        assert rr.roots[:2] == (0j, 0j)
        assert rr.roots[2] == pytest.approx(-2)

    def test_constant_rejected(self):
        with pytest.raises(RootFindingError):
            roots(poly(3))

    def test_sorted_by_modulus(self):
        rr = roots(from_roots(RootForm(1, (3, -0.5, 2j))))
        mods = [abs(z) for z in rr.roots]
        assert mods == sorted(mods)

    @given(
        st.lists(st.tuples(st.floats(0.5, 4), st.floats(0, 2 * math.pi)), min_size=1, max_size=12)
    )
    def test_moduli_recovered(self, polar):
        rs = [r * complex(math.cos(t), math.sin(t)) for r, t in polar]
        assume(all(abs(a - b) >= 0.1 for i, a in enumerate(rs) for b in rs[:i]))
        got = sorted(abs(z) for z in roots(from_roots(RootForm(1, tuple(rs)))).roots)
        assert got == pytest.approx(sorted(abs(z) for z in rs), rel=1e-9)


class TestCertificate:
    def test_touching_root_is_allowed(self):
        c = certify_zero_free(poly(6, 5, 1), 2)
        assert c.valid and c.min_root_modulus == pytest.approx(2, abs=1e-13)
        assert c.margin == pytest.approx(0, abs=1e-13)

    def test_unit_circle_roots(self):
        c = certify_zero_free(poly(1, 0, 1), 1)
        assert c.valid and c.min_root_modulus == pytest.approx(1, abs=1e-15)

    def test_interior_root(self):
        c = certify_zero_free(poly(0.5, 1), 1)
        assert not c.valid and c.margin == pytest.approx(-0.5)

    @pytest.mark.parametrize("P, rho", [(poly(4, 4, 1), 2), (poly(8, 12, 6, 1), 2)])
    def test_clustered_boundary_roots(self, P, rho):
        assert certify_zero_free(P, rho).valid

    def test_json_fields(self):
        d = certify_zero_free(poly(6, 5, 1), 1).to_json()
        assert set(d) >= {"rho", "min_root_modulus", "margin", "root_accuracy"}

    def test_rho_below_one(self):
        with pytest.raises(ValueError):
            certify_zero_free(poly(2, 1), 0.5)

    def test_require_raises_hypothesis_error(self):
        with pytest.raises(HypothesisError):
            require_zero_free(poly(0.5, 1), 1)

    @given(st.integers(1, 10), st.floats(1, 3), st.integers(0, 2**32 - 1), st.booleans())
    def test_dilation_equivalence(self, n, rho, seed, inside):
        # with inside=True the roots straddle rho, otherwise they are all outside it
        rng = np.random.default_rng(seed)
        lo = 0.3 * rho if inside else rho * 1.001
        rs = rng.uniform(lo, 4 * rho, n) * np.exp(2j * np.pi * rng.uniform(size=n))
        P = from_roots(RootForm(1, tuple(rs)))
        assume(roots(P).accuracy < 1e-8)
        assert certify_zero_free(P, rho).valid == certify_zero_free(dilate(P, rho), 1).valid


class TestGenerator:
    def test_thin_annulus(self):
        for seed in range(5):
            _, rf = generate_zero_free(GeneratorSpec(1, 2, 2.000002, seed))
            assert 2 * (1 + GENERATOR_GAP) <= abs(rf.roots[0]) <= 2.000002

    @given(st.integers(1, 12), st.sampled_from([1, 1.5, 2, 4]), st.integers(0, 2**32 - 1))
    def test_always_certified(self, n, rho, seed):
        P, _ = generate_zero_free(GeneratorSpec(n, rho, 4 * rho, seed))
        c = certify_zero_free(P, rho)
        assert c.valid and c.root_accuracy <= 1e-7

    def test_deterministic(self):
        spec = GeneratorSpec(7, 1.5, 6, 1234)
        assert generate_zero_free(spec)[0].coeffs == generate_zero_free(spec)[0].coeffs

    def test_leading_scale(self):
        P, _ = generate_zero_free(GeneratorSpec(3, 1, 2, 5, leading_scale=(3.0, 3.0)))
        assert abs(P.leading) == pytest.approx(3)

    @pytest.mark.parametrize(
        "kw", [dict(n=0), dict(rho=0.5), dict(R=1.0), dict(leading_scale=(2.0, 1.0))]
    )
    def test_spec_validation(self, kw):
        base = dict(n=2, rho=1.0, R=3.0, seed=0)
        with pytest.raises(ValueError):
            GeneratorSpec(**{**base, **kw})

    def test_unconstrained_disk(self):
        _, rf = generate_unconstrained(50, 3.0, np.random.default_rng(0))
        assert max(abs(z) for z in rf.roots) <= 3.0


class TestDominance:
    def test_equality_case(self):
        d = coefficient_dominance_check(poly(4, 4, 1), 2)
        assert d.ok and d.worst_slack == pytest.approx(0, abs=1e-15)

    @pytest.mark.parametrize("c", [2, -3, 2j, 5 + 5j])
    def test_linear(self, c):
        d = coefficient_dominance_check(poly(c, 1), 2)
        assert d.ok and d.worst_slack == pytest.approx(1 - 2 / abs(c))

    def test_generated_corpus(self):
        for seed in range(100):
            P, _ = generate_zero_free(GeneratorSpec(8, 1.5, 6, seed))
            d = coefficient_dominance_check(P, 1.5)
            assert d.ok and d.worst_slack >= 0

    def test_needs_certificate(self):
        with pytest.raises(HypothesisError):
            coefficient_dominance_check(poly(0.5, 1), 1)
