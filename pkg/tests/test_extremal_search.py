import json
import math

import mpmath
import pytest

from visserlab import extremal_search
from visserlab.extremal_search import (
    SearchProblem,
    TheoremViolation,
    equality_witness,
    rootform_from_params,
    sharpness_search,
)
from visserlab.visser_checks import EQUALITY, VIOLATED, InequalityReport, check_theorem3
from visserlab.zero_location import certify_zero_free


def mp_norm_shift(c, p):
    """||c + z||_p by mpmath quadrature (c real, > 0)."""
    with mpmath.workdps(30):
        f = lambda t: (c * c + 2 * c * mpmath.cos(t) + 1) ** (mpmath.mpf(p) / 2)
        return mpmath.quad(f, [0, mpmath.pi, 2 * mpmath.pi]) / (2 * mpmath.pi)


def double_root_ratio_p128():
    # (z+2)^2 at s=1, rho=2: ||z+2||_p ||z+2||_p / ||(z+2)^2||_p, with ||(z+2)^2||_p = ||z+2||_{2p}^2
    p = 128
    a = mp_norm_shift(2, p) ** (1 / mpmath.mpf(p))
    b = mp_norm_shift(2, 2 * p) ** (1 / mpmath.mpf(2 * p))
    return float(a * a / (b * b))


@pytest.fixture(scope="module")
def s1_search():
    return sharpness_search(SearchProblem(3, 1, 2, 1, restarts=3, iters_per_restart=150, seed=4))


class TestProblem:
    @pytest.mark.parametrize(
        "kw",
        [dict(n=40), dict(n=0), dict(s=3), dict(p=math.inf), dict(rho=0.9),
         dict(restarts=0), dict(p=-1)],
    )
    def test_validation(self, kw):
        base = dict(n=3, s=0, p=2.0, rho=1.0)
        with pytest.raises(ValueError):
            SearchProblem(**{**base, **kw})

    def test_parametrisation_is_feasible(self):
        rf = rootform_from_params([-5, 0.3, 10.0, -1.0], 2.0)
        assert min(abs(z) for z in rf.roots) >= 2 * (1 + 1e-6) * (1 - 1e-15)


class TestSearch:
    @pytest.mark.parametrize("n, p, rho", [(3, 2, 1), (4, 0.5, 2)])
    def test_s0_reaches_equality(self, n, p, rho):
        res = sharpness_search(SearchProblem(n, 0, p, rho, restarts=2, iters_per_restart=60))
        assert res.best_ratio >= 1 - 1e-6
        assert res.best_ratio <= 1 + res.best_report.tol_used / res.best_report.rhs

    def test_double_root_at_large_p(self):
        ref = double_root_ratio_p128()
        assert ref == pytest.approx(0.98258675225, abs=1e-10)
        res = sharpness_search(SearchProblem(2, 1, 128, 2, restarts=4, iters_per_restart=300))
        assert res.best_ratio >= ref - 2e-3

    def test_result_invariants(self, s1_search):
        res = s1_search
        assert certify_zero_free(res.best_poly, 1).valid
        again = check_theorem3(res.best_poly, 1, 2, 1)
        assert abs(again.ratio - res.best_ratio) <= 1e-10
        assert 0 < res.best_ratio <= 1 + 1e-9
        assert len(res.per_restart_trace) == 3 and res.evaluations > 0
        for hist in res.histories:
            assert hist == sorted(hist)

    def test_thread_count_does_not_matter(self, s1_search):
        prob = SearchProblem(3, 1, 2, 1, restarts=3, iters_per_restart=150, seed=4)
        other = sharpness_search(prob, workers=3)
        assert json.dumps(other.to_json()) == json.dumps(s1_search.to_json())

    def test_trace_csv(self, s1_search):
        lines = s1_search.trace_csv().splitlines()
        assert lines[0] == "restart,step,best_ratio" and len(lines) > 3

    def test_violation_aborts_with_dump(self, monkeypatch):
        def fake(P, s, p, rho, cfg=None, tau_rel=1e-9):
            return InequalityReport("thm3", 2.0, 1.0, 1e-9, VIOLATED, n=P.degree, s=s, p=p, rho=rho)

        monkeypatch.setattr(extremal_search, "check_theorem3", fake)
        with pytest.raises(TheoremViolation) as info:
            sharpness_search(SearchProblem(2, 0, 2, 1, restarts=1, iters_per_restart=5))
        dumped = json.loads(info.value.dump())
        assert dumped["report"]["verdict"] == VIOLATED and "coeffs" in dumped["poly"]


class TestEqualityWitness:
    @pytest.mark.parametrize(
        "n, rho, c, p",
        [(3, 1, 1, 2), (2, 2, 4, 0), (5, 1.5, 1.5**5, 1), (8, 2, 300, 0.25), (4, 1, 1, 3)],
    )
    def test_equality(self, n, rho, c, p):
        rep = equality_witness(n, rho, c, p, seed=n)
        assert rep.verdict == EQUALITY and abs(rep.lhs - rep.rhs) <= rep.tol_used

    def test_parseval_value(self):
        rep = equality_witness(3, 1, 1, 2)
        assert abs(rep.lhs - math.sqrt(2)) <= 1e-10 and abs(rep.rhs - math.sqrt(2)) <= 1e-10

    def test_mahler_value(self):
        assert equality_witness(2, 2, 4, 0).rhs == pytest.approx(4, rel=1e-12)

    def test_small_constant_rejected(self):
        with pytest.raises(ValueError):
            equality_witness(3, 2, 7, 2)
