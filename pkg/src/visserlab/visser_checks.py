"""Executable coefficient inequalities with explicit tolerance accounting.

Every check returns an :class:`InequalityReport`.  The tolerance is
``tau_rel * max(|lhs|, |rhs|)`` plus the linear sum of the error estimates
of every norm that enters either side; a check is *violated* only when
``lhs > rhs * (1 + tau_rel) + tol_used``.

Hypothesis failures (a zero inside the disk) raise
:class:`~visserlab.zero_location.HypothesisError`; they are not verdicts.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .circle_norms import (
    DEFAULT_CONFIG,
    EPS,
    NormResult,
    QuadratureConfig,
    check_exponent,
    circle_values,
    format_exponent,
    norm_inf,
    norm_p,
    two_term_norm,
)
from .poly_core import (
    GammaVector,
    Polynomial,
    binomial,
    coefficient_operator,
    two_term_selector,
)
from .zero_location import require_zero_free

TAU_REL = 1e-9
P_ZERO_GUARD = 0.05

HOLDS = "holds"
EQUALITY = "holds_at_equality"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

STATEMENTS = (
    "visser", "thm1", "thm2", "thm3", "cor1", "cor2", "lemma_pointwise",
    "lemma_phase", "lemma_twoterm", "operator_bound", "composition_double",
)

CSV_COLUMNS = ("statement", "n", "s", "p", "rho", "phi", "lhs", "rhs", "ratio", "tol", "verdict")


class AdmissibilityError(ValueError):
    """gamma is not one of the two operator families the checks support."""


@dataclass(frozen=True)
class InequalityReport:
    statement: str
    lhs: float
    rhs: float
    tol_used: float
    verdict: str
    n: int | None = None
    s: int | None = None  # s, or k for the phase lemma
    p: float | None = None
    rho: float | None = None
    phi: float | None = None

    @property
    def ratio(self) -> float | None:
        return self.lhs / self.rhs if self.rhs > 0 else None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.verdict in (HOLDS, EQUALITY)

    def to_json(self) -> dict:
        return {
            "statement": self.statement,
            "n": self.n,
            "s": self.s,
            "p": None if self.p is None else format_exponent(self.p),
            "rho": self.rho,
            "phi": self.phi,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "tol": self.tol_used,
            "verdict": self.verdict,
        }

    def csv_row(self) -> list:
        d = self.to_json()
        return ["" if d[c] is None else d[c] for c in CSV_COLUMNS]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r.csv_row()])
    return buf.getvalue()


def _judge(statement, lhs, rhs, err_sum, flagged, tau_rel, **params) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    tol = tau_rel * max(abs(lhs), abs(rhs)) + float(err_sum)
    if lhs > rhs * (1 + tau_rel) + tol:
        verdict = INCONCLUSIVE if flagged else VIOLATED
    elif abs(lhs - rhs) <= tol:
        verdict = EQUALITY
    else:
        verdict = HOLDS
    return InequalityReport(statement, lhs, rhs, tol, verdict, **params)


def _require_degree(P: Polynomial) -> int:
    if P.formal or P.leading == 0:
        raise ValueError("theorem checks need a nonzero leading coefficient")
    n = P.degree
    if n < 1:
        raise ValueError("theorem checks need degree n >= 1")
    if n > 64:
        raise ValueError(f"degree {n} exceeds the binomial cap 64")
    return n


def _require_index(n: int, s: int, lo: int = 0):
    if not lo <= s <= n - 1:
        raise ValueError(f"index must satisfy {lo} <= s <= n-1 = {n - 1}, got {s}")


def _require_finite_p(p: float) -> float:
    p = check_exponent(p)
    if math.isinf(p):
        raise ValueError("p = inf is covered by check_visser / check_corollary1")
    return p


def _rel(r: NormResult) -> float:
    return r.err_abs / r.value if r.value > 0 else 0.0


def exact_unit(phi: float) -> complex:
    """e^{i phi}, exact at multiples of pi/2 so cancellations stay exact."""
    q = phi / (math.pi / 2)
    k = round(q)
    if abs(q - k) < 1e-12:
        return (1 + 0j, 1j, -1 + 0j, -1j)[k % 4]
    return cmath.exp(1j * phi)


def c_p(s: int, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """1 for s = 0, otherwise 1/||1+z||_p."""
    return _c_p(s, p, cfg)[0]


def _c_p(s, p, cfg):
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return 1.0, 0.0, False
    r = two_term_norm(1, 1, p, cfg)
    return 1.0 / r.value, _rel(r), r.flagged


def _two_term_lhs(P: Polynomial, s: int, p: float, cfg) -> NormResult:
    n = P.degree
    return two_term_norm(P.leading, P.coeffs[s] / binomial(n, s), p, cfg)


def check_visser(P: Polynomial, tau_rel: float = TAU_REL) -> InequalityReport:
    """|a_n| + |a_0| <= ||P||_inf; equality iff P is lacunary."""
    n = _require_degree(P)
    lhs = abs(P.leading) + abs(P.coeffs[0])
    sup = norm_inf(P)
    return _judge("visser", lhs, sup.value, 2 * EPS * lhs + sup.err_abs, sup.flagged,
                  tau_rel, n=n, p=math.inf)


def check_theorem1(P: Polynomial, s: int, p: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   tau_rel: float = TAU_REL) -> InequalityReport:
    """||a_n z + a_s/C(n,s)||_p <= ||P||_p for any P."""
    n = _require_degree(P)
    _require_index(n, s)
    p = _require_finite_p(p)
    lhs = _two_term_lhs(P, s, p, cfg)
    rhs = norm_p(P, p, cfg)
    return _judge("thm1", lhs.value, rhs.value, lhs.err_abs + rhs.err_abs,
                  lhs.flagged or rhs.flagged, tau_rel, n=n, s=s, p=p)


def check_theorem2(P: Polynomial, s: int, p: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   tau_rel: float = TAU_REL) -> InequalityReport:
    """||a_n z + a_s/C(n,s)||_p <= c_p ||P||_p when P has no zeros in |z| < 1."""
    n = _require_degree(P)
    _require_index(n, s)
    p = _require_finite_p(p)
    require_zero_free(P, 1.0)
    lhs = _two_term_lhs(P, s, p, cfg)
    norm = norm_p(P, p, cfg)
    cp, cp_rel, cp_flag = _c_p(s, p, cfg)
    rhs = cp * norm.value
    err = lhs.err_abs + rhs * (cp_rel + _rel(norm))
    return _judge("thm2", lhs.value, rhs, err, lhs.flagged or norm.flagged or cp_flag,
                  tau_rel, n=n, s=s, p=p, rho=1.0)


def check_theorem3(P: Polynomial, s: int, p: float, rho: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   tau_rel: float = TAU_REL) -> InequalityReport:
    """||a_n z + a_s/C(n,s)||_p <= c_p ||1+z||_p / ||rho^s+z||_p * ||P||_p
    when P has no zeros in |z| < rho, rho >= 1."""
    n = _require_degree(P)
    _require_index(n, s)
    p = _require_finite_p(p)
    require_zero_free(P, rho)
    lhs = _two_term_lhs(P, s, p, cfg)
    norm = norm_p(P, p, cfg)
    cp, cp_rel, cp_flag = _c_p(s, p, cfg)
    one = two_term_norm(1, 1, p, cfg)
    shifted = two_term_norm(1, rho**s, p, cfg)
    rhs = cp * (one.value / shifted.value) * norm.value
    rhs_rel = cp_rel + _rel(one) + _rel(shifted) + _rel(norm)

    # c_p ||1+z||_p is 1 for s > 0, and the whole factor is 1 for s = 0
    direct = norm.value / shifted.value if s > 0 else norm.value
    direct_rel = (_rel(norm) + _rel(shifted)) if s > 0 else _rel(norm)
    if abs(rhs - direct) > rhs * (rhs_rel + direct_rel) + 8 * EPS * rhs:
        raise AssertionError(
            f"thm3 bound {rhs!r} disagrees with its reduced form {direct!r}"
        )
    flagged = lhs.flagged or norm.flagged or cp_flag or one.flagged or shifted.flagged
    return _judge("thm3", lhs.value, rhs, lhs.err_abs + rhs * rhs_rel, flagged,
                  tau_rel, n=n, s=s, p=p, rho=float(rho))


def check_corollary1(P: Polynomial, s: int, rho: float,
                     tau_rel: float = TAU_REL) -> InequalityReport:
    """|a_n| + |a_s|/C(n,s) <= ||P||_inf / (1 + rho^s), 1 <= s <= n-1."""
    n = _require_degree(P)
    _require_index(n, s, lo=1)
    require_zero_free(P, rho)
    lhs = abs(P.leading) + abs(P.coeffs[s]) / binomial(n, s)
    sup = norm_inf(P)
    denom = 1 + rho**s
    rhs = sup.value / denom
    err = 2 * EPS * lhs + sup.err_abs / denom + 2 * EPS * rhs
    return _judge("cor1", lhs, rhs, err, sup.flagged, tau_rel,
                  n=n, s=s, p=math.inf, rho=float(rho))


def check_corollary2(P: Polynomial, s: int, p: float, rho: float,
                     cfg: QuadratureConfig = DEFAULT_CONFIG,
                     tau_rel: float = TAU_REL) -> InequalityReport:
    """|a_n| + |a_s|/C(n,s) <= 2 c_p ||P||_p / ||rho^s + z||_p."""
    n = _require_degree(P)
    _require_index(n, s)
    p = _require_finite_p(p)
    require_zero_free(P, rho)
    lhs = abs(P.leading) + abs(P.coeffs[s]) / binomial(n, s)
    norm = norm_p(P, p, cfg)
    cp, cp_rel, cp_flag = _c_p(s, p, cfg)
    shifted = two_term_norm(1, rho**s, p, cfg)
    rhs = 2 * cp * norm.value / shifted.value
    err = 2 * EPS * lhs + rhs * (cp_rel + _rel(norm) + _rel(shifted))
    return _judge("cor2", lhs, rhs, err, norm.flagged or cp_flag or shifted.flagged,
                  tau_rel, n=n, s=s, p=p, rho=float(rho))


def check_lemma_pointwise(P: Polynomial, s: int, rho: float, grid_size: int = 4096,
                          tau_rel: float = TAU_REL) -> InequalityReport:
    """rho^s |a_n z^n + (a_s/C) z^s| <= |(a_{n-s}/C) z^{n-s} + a_0| on |z| = 1.

    Reported lhs is the largest grid value of (left - right); rhs is 0.
    """
    n = _require_degree(P)
    _require_index(n, s)
    if grid_size < 1024:
        raise ValueError("grid_size must be at least 1024")
    require_zero_free(P, rho)
    c = binomial(n, s)
    a = P.coeffs
    w = np.exp(1j * (n - s) * 2 * math.pi * np.arange(grid_size) / grid_size)
    left = rho**s * np.abs(a[n] * w + a[s] / c)
    right = np.abs(a[n - s] / c * w + a[0])
    gap = float(np.max(left - right))
    scale = rho**s * (abs(a[n]) + abs(a[s]) / c) + abs(a[n - s]) / c + abs(a[0])
    tol = tau_rel * float(np.max(right)) + 8 * EPS * scale
    verdict = EQUALITY if abs(gap) <= tol else (HOLDS if gap < 0 else VIOLATED)
    return InequalityReport("lemma_pointwise", gap, 0.0, tol, verdict,
                            n=n, s=s, rho=float(rho))


def phase_gamma(n: int, k: int, phi: float) -> GammaVector:
    """gamma of (a_n z^n + (a_k/C) z^k) e^{i phi} + (a_{n-k}/C) z^{n-k} + a_0."""
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
    u = exact_unit(phi)
    c = binomial(n, k)
    g = [0j] * (n + 1)
    g[n] += u
    g[k] += u / c
    g[n - k] += 1 / c
    g[0] += 1
    return GammaVector(tuple(g))


def _pth_power(r: NormResult, p: float) -> tuple[float, float]:
    """(mean |P|^p, its error) from a norm result."""
    v, e = r.value, r.err_abs
    return v**p, (v + e) ** p - v**p


def _mahler_or_zero(Q: Polynomial, cfg) -> NormResult:
    if Q.is_zero():
        return NormResult(0.0, 0.0, "closed-form", 0.0)
    return norm_p(Q, 0.0, cfg)


def check_lemma_phase_integral(P: Polynomial, k: int, p: float, phi: float,
                               cfg: QuadratureConfig = DEFAULT_CONFIG,
                               tau_rel: float = TAU_REL) -> InequalityReport:
    """int |G e^{i phi} + Q|^p <= Lambda^p int |P|^p for P zero-free in |z| < 1,
    Lambda = |1 + e^{i phi}| when k = 0 and 1 otherwise.

    At p = 0 both sides are compared as Mahler measures, and the p = 0.05
    instance is run as a guard; a guard failure overrides the verdict.
    """
    n = _require_degree(P)
    _require_index(n, k)
    p = _require_finite_p(p)
    require_zero_free(P, 1.0)
    Q = coefficient_operator(phase_gamma(n, k, phi), P)
    lam = abs(1 + exact_unit(phi)) if k == 0 else 1.0
    params = dict(n=n, s=k, p=p, phi=float(phi))
    if p == 0:
        left = _mahler_or_zero(Q, cfg)
        right = norm_p(P, 0.0, cfg)
        rep = _judge("lemma_phase", left.value, lam * right.value,
                     left.err_abs + lam * right.err_abs, left.flagged or right.flagged,
                     tau_rel, **params)
        guard = check_lemma_phase_integral(P, k, P_ZERO_GUARD, phi, cfg, tau_rel)
        return rep if guard.ok else _replace_verdict(rep, guard.verdict)
    left = norm_p(Q, p, cfg)
    right = norm_p(P, p, cfg)
    lv, le = _pth_power(left, p)
    rv, re_ = _pth_power(right, p)
    two_pi = 2 * math.pi
    lam_p = lam**p
    return _judge("lemma_phase", two_pi * lv, two_pi * lam_p * rv,
                  two_pi * (le + lam_p * re_), left.flagged or right.flagged,
                  tau_rel, **params)


def _replace_verdict(rep: InequalityReport, verdict: str) -> InequalityReport:
    return replace(rep, verdict=verdict)


def check_lemma_twoterm_lower(alpha: complex, beta: complex, p: float,
                              cfg: QuadratureConfig = DEFAULT_CONFIG,
                              tau_rel: float = TAU_REL) -> InequalityReport:
    """((|alpha| + |beta|)/2) ||1+z||_p <= ||alpha z + beta||_p.

    p = 0 is evaluated through Mahler measures plus a p = 0.05 guard.
    """
    p = _require_finite_p(p)
    one = two_term_norm(1, 1, p, cfg)
    rhs = two_term_norm(alpha, beta, p, cfg)
    half = (abs(alpha) + abs(beta)) / 2
    rep = _judge("lemma_twoterm", half * one.value, rhs.value,
                 half * one.err_abs + rhs.err_abs + 2 * EPS * half * one.value,
                 one.flagged or rhs.flagged, tau_rel, p=p)
    if p == 0:
        guard = check_lemma_twoterm_lower(alpha, beta, P_ZERO_GUARD, cfg, tau_rel)
        if not guard.ok:
            rep = _replace_verdict(rep, guard.verdict)
    return rep


def _match_family(gamma: GammaVector, P: Polynomial):
    """Return ("selector", s, None) or ("phase", k, phi), else raise."""
    n = P.degree
    if len(gamma) != n + 1:
        raise ValueError("gamma length must be n + 1")
    g = np.array(gamma.entries)

    def same(h: GammaVector) -> bool:
        return bool(np.allclose(g, np.array(h.entries), rtol=0, atol=1e-14))

    for s in range(n):
        if same(two_term_selector(n, s)):
            return "selector", s, None
    # phase family: gamma_n = e^{i phi} (k > 0) or 1 + e^{i phi} (k = 0)
    for k in range(n):
        u = g[n] - 1 if k == 0 else g[n]
        if abs(abs(u) - 1) > 1e-12:
            continue
        phi = math.atan2(u.imag, u.real)
        if same(phase_gamma(n, k, phi)):
            return "phase", k, phi
    raise AdmissibilityError(
        "gamma is neither the two-term selector nor the phase operator"
    )


def check_operator_norm_bound(gamma: GammaVector, P: Polynomial, p: float,
                              cfg: QuadratureConfig = DEFAULT_CONFIG,
                              tau_rel: float = TAU_REL) -> InequalityReport:
    """||C_gamma P||_p <= max(|gamma_0|, |gamma_n|) ||P||_p.

    Only two operator families are accepted: the two-term selector on any P,
    and the phase operator on P zero-free in |z| < 1.
    """
    n = _require_degree(P)
    p = _require_finite_p(p)
    family, idx, phi = _match_family(gamma, P)
    if family == "phase":
        require_zero_free(P, 1.0)
    Q = coefficient_operator(gamma, P)
    left = _mahler_or_zero(Q, cfg) if p == 0 else norm_p(Q, p, cfg)
    right = norm_p(P, p, cfg)
    c = gamma.bound_constant
    return _judge("operator_bound", left.value, c * right.value,
                  left.err_abs + c * right.err_abs, left.flagged or right.flagged,
                  tau_rel, n=n, s=idx, p=p, phi=phi)


def _tensor_mean(outer: np.ndarray, inner: np.ndarray, p: float) -> float:
    # mean over the (theta, t) grid of (outer[theta] * inner[t])^p
    prod = np.outer(outer, inner)
    out = np.zeros_like(prod)
    ok = prod >= 1e-300
    out[ok] = np.exp(p * np.log(prod[ok]))
    return float(out.mean())


def composition_double_means(s: int, P: Polynomial, p: float, nodes: int):
    """Both double means of the composition inequality on an nodes x nodes grid."""
    n = P.degree
    a = np.array(P.coeffs)
    lam = np.zeros(n + 1, dtype=complex)
    lam[n] = a[n]
    lam[s] += a[s] / binomial(n, s)
    g0 = 1.0 if s == 0 else 0.0
    theta = 2 * math.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    # scale both sides by the same constant so large p cannot overflow
    M = float(np.sum(np.abs(a)))
    lhs = _tensor_mean(np.abs(1 + e) / 2, np.abs(circle_values(lam / M, nodes)), p)
    rhs = _tensor_mean(np.abs(g0 + e) / 2, np.abs(circle_values(a / M, nodes)), p)
    return lhs, rhs, (2 * M) ** p


def check_composition_double_integral(s: int, P: Polynomial, p: float,
                                      nodes: int = 1024,
                                      tau_rel: float = TAU_REL) -> InequalityReport:
    """Double mean over (theta, t) of |(1+e^{i theta}) Lambda P(e^{it})|^p against
    |(gamma_0 + e^{i theta}) P(e^{it})|^p, with Lambda = z^n + z^s composed in
    the Schur-Szego sense and gamma_0 = 1 only for s = 0.

    Tensor-product trapezoid on nodes x nodes, checked once against 2*nodes.
    """
    n = _require_degree(P)
    _require_index(n, s)
    p = check_exponent(p)
    if p == 0 or math.isinf(p):
        raise ValueError("composition check needs 0 < p < inf")
    require_zero_free(P, 1.0)
    l1, r1, scale = composition_double_means(s, P, p, nodes)
    l2, r2, _ = composition_double_means(s, P, p, 2 * nodes)
    lhs, rhs = l2 * scale, r2 * scale
    err = (abs(l2 - l1) + abs(r2 - r1)) * scale + 8 * EPS * (lhs + rhs)
    return _judge("composition_double", lhs, rhs, err, False, tau_rel, n=n, s=s, p=p)
