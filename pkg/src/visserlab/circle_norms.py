"""L_p means of polynomials on the unit circle, 0 <= p <= inf.

Exponents are plain floats: ``0.0`` is the Mahler measure (geometric mean),
``math.inf`` the supremum norm, anything else must be positive.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .poly_core import Polynomial
from .zero_location import RootFindingError, roots

EPS = float(np.finfo(float).eps)
TINY = 1e-300

# roots closer than this to |z| = 1 make the log|P| quadrature useless
JENSEN_CROSSCHECK_DISTANCE = 1e-3
JENSEN_AGREEMENT = 1e-8
# relative root accuracy above which the Jensen product is not trusted
JENSEN_MAX_ROOT_ACCURACY = 1e-6

INF_GRID = 8192
INF_CANDIDATES = 8
INF_GOLDEN_ITERS = 60

P_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 3.0, math.inf)


class NormConsistencyError(RuntimeError):
    """Two independent evaluations of the same norm disagree."""


def check_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 0:
        raise ValueError(f"exponent p must be 0, positive, or inf; got {p}")
    return p


def parse_exponent(text) -> float:
    """Accept "0", "inf" and decimal literals (also plain numbers)."""
    if isinstance(text, str):
        t = text.strip().lower()
        if t in ("inf", "infinity", "+inf"):
            return math.inf
        try:
            return check_exponent(float(t))
        except ValueError:
            raise ValueError(f"bad exponent {text!r}") from None
    return check_exponent(text)


def format_exponent(p: float):
    if p == 0:
        return "0"
    if math.isinf(p):
        return "inf"
    return float(p)


@dataclass(frozen=True)
class QuadratureConfig:
    initial_nodes: int = 4096
    max_nodes: int = 1 << 20
    rel_target: float = 1e-11

    def __post_init__(self):
        for name in ("initial_nodes", "max_nodes"):
            v = getattr(self, name)
            if v < 4 or v & (v - 1):
                raise ValueError(f"{name} must be a power of two >= 4, got {v}")
        if self.initial_nodes > self.max_nodes:
            raise ValueError("initial_nodes must not exceed max_nodes")
        if not self.rel_target > 0:
            raise ValueError("rel_target must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class NormResult:
    value: float
    p: float
    method: str  # trapezoid | refined-trapezoid | jensen-roots | grid-max-refined | closed-form
    err_abs: float
    flagged: bool = False  # quadrature hit max_nodes without converging

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "p": format_exponent(self.p),
            "method": self.method,
            "err_abs": self.err_abs,
        }


def circle_values(coeffs, N: int) -> np.ndarray:
    """P(e^{2 pi i k / N}) for k = 0..N-1 via one FFT."""
    a = np.asarray(coeffs, dtype=complex)
    if len(a) > N:
        # fold aliased coefficients; z^N = 1 on the grid
        folded = np.zeros(N, dtype=complex)
        np.add.at(folded, np.arange(len(a)) % N, a)
        a = folded
    buf = np.zeros(N, dtype=complex)
    buf[: len(a)] = a
    return np.fft.ifft(buf) * N


@dataclass(frozen=True)
class _Mean:
    value: float
    err: float
    nodes: int
    converged: bool


def _three_level_means(w: np.ndarray) -> tuple[float, float, float]:
    return float(w.mean()), float(w[::2].mean()), float(w[::4].mean())


def periodic_mean(sampler, cfg: QuadratureConfig) -> _Mean:
    """Trapezoid mean of a 2pi-periodic function with node doubling.

    ``sampler(N)`` returns the N uniform samples.  Each level also yields the
    N/2 and N/4 rules from its even subsets; the level is accepted once both
    successive differences are below ``rel_target`` relative.  The error
    estimate is the larger of the two differences, so a single accidental
    agreement between levels cannot hide a singular integrand.
    """
    N = cfg.initial_nodes
    while True:
        w = sampler(N)
        i_n, i_half, i_quarter = _three_level_means(w)
        d1, d2 = abs(i_n - i_half), abs(i_half - i_quarter)
        err = max(d1, d2)
        scale = max(abs(i_n), TINY)
        if max(d1, d2) <= cfg.rel_target * scale:
            return _Mean(i_n, err, N, True)
        if N >= cfg.max_nodes:
            return _Mean(i_n, err, N, False)
        N *= 2


def _trim(P: Polynomial) -> np.ndarray:
    a = np.array(P.coeffs, dtype=complex)
    k = len(a)
    while k > 1 and a[k - 1] == 0:
        k -= 1
    return a[:k]


def norm_p(P: Polynomial, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> NormResult:
    """(1/2pi int |P(e^{it})|^p dt)^(1/p); p = 0 and p = inf are delegated."""
    p = check_exponent(p)
    if p == 0:
        return norm_zero(P, cfg)
    if math.isinf(p):
        return norm_inf(P)
    return _norm_p_cached(P, p, cfg)


@functools.lru_cache(maxsize=16384)
def _norm_p_cached(P: Polynomial, p: float, cfg: QuadratureConfig) -> NormResult:
    a = _trim(P)
    if not np.any(a):
        return NormResult(0.0, p, "closed-form", 0.0)
    # scale by sum |a_j| >= max |P| so |P|^p never overflows for large p
    M = float(np.sum(np.abs(a)))

    def sampler(N):
        r = np.abs(circle_values(a / M, N))
        out = np.zeros_like(r)
        ok = r >= TINY
        out[ok] = np.exp(p * np.log(r[ok]))
        return out

    m = periodic_mean(sampler, cfg)
    mean = max(m.value, 0.0)
    value = M * mean ** (1.0 / p)
    if mean > 0:
        rel_i = m.err / mean
        err = value * ((1.0 + rel_i) ** (1.0 / p) - 1.0) if rel_i < 1 else value
    else:
        err = M * m.err ** (1.0 / p)
    err += 8 * EPS * value
    method = "trapezoid" if m.nodes == cfg.initial_nodes else "refined-trapezoid"
    return NormResult(value, p, method, float(err), flagged=not m.converged)


def _golden_max(f, lo: np.ndarray, hi: np.ndarray, iters: int):
    """Vectorised golden-section maximisation on independent brackets."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c_new = hi - g * (hi - lo)
        d_new = lo + g * (hi - lo)
        c, d = np.where(left, c_new, d), np.where(left, c, d_new)
        fc, fd = np.where(left, f(c_new), fd), np.where(left, fc, f(d_new))
    x = np.where(fc >= fd, c, d)
    return x, np.maximum(fc, fd), hi - lo


def norm_inf(P: Polynomial) -> NormResult:
    """max_{|z|=1} |P(z)|: FFT scan on 8192 nodes, then golden-section
    refinement around the 8 highest local maxima of the scan."""
    return _norm_inf_cached(P)


@functools.lru_cache(maxsize=8192)
def _norm_inf_cached(P: Polynomial) -> NormResult:
    a = _trim(P)
    n = len(a) - 1
    S = float(np.sum(np.abs(a)))
    if S == 0:
        return NormResult(0.0, math.inf, "closed-form", 0.0)
    if n == 0:
        return NormResult(abs(complex(a[0])), math.inf, "closed-form", 0.0)
    N = INF_GRID
    r = np.abs(circle_values(a, N))
    is_peak = (r >= np.roll(r, 1)) & (r >= np.roll(r, -1))
    peaks = np.flatnonzero(is_peak)
    top = peaks[np.argsort(-r[peaks], kind="stable")[:INF_CANDIDATES]]
    h = 2 * math.pi / N
    theta = top * h

    def f(t):
        return np.abs(np.polyval(a[::-1], np.exp(1j * t)))

    _, fmax, width = _golden_max(f, theta - h, theta + h, INF_GOLDEN_ITERS)
    value = max(float(fmax.max()), float(r.max()))
    # Horner rounding plus the residual bracket times a Bernstein slope bound
    err = 4 * (n + 1) * EPS * S + float(width.max()) * n * S
    return NormResult(value, math.inf, "grid-max-refined", err)


def norm_zero(P: Polynomial, cfg: QuadratureConfig = DEFAULT_CONFIG) -> NormResult:
    """Mahler measure exp(mean log|P|) = |a_n| prod max(1, |z_j|).

    The Jensen product over the roots is primary.  When every root keeps a
    distance > 1e-3 from the unit circle the log-quadrature is run as well
    and must agree to 1e-8 relative.  Ill-conditioned roots fall back to the
    quadrature alone.
    """
    return _norm_zero_cached(P, cfg)


def _log_quadrature(a: np.ndarray, cfg: QuadratureConfig):
    def sampler(N):
        r = np.abs(circle_values(a, N))
        return np.log(np.maximum(r, TINY))

    return periodic_mean(sampler, cfg)


@functools.lru_cache(maxsize=8192)
def _norm_zero_cached(P: Polynomial, cfg: QuadratureConfig) -> NormResult:
    a = _trim(P)
    if not np.any(a):
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    if len(a) == 1:
        return NormResult(abs(complex(a[0])), 0.0, "closed-form", 0.0)
    try:
        rr = roots(Polynomial(tuple(a.tolist())))
    except RootFindingError:
        rr = None
    if rr is None or rr.accuracy > JENSEN_MAX_ROOT_ACCURACY:
        m = _log_quadrature(a, cfg)
        value = math.exp(m.value)
        err = value * math.expm1(m.err) + 8 * EPS * value
        return NormResult(value, 0.0, "trapezoid", err, flagged=not m.converged)

    z = np.abs(np.array(rr.roots))
    acc = np.array(rr.rel_accuracy)
    outside = z > 1
    value = abs(complex(a[-1])) * float(np.prod(np.where(outside, z, 1.0)))
    rel_err = float(np.sum(acc[z * (1 + acc) > 1])) + 4 * (len(z) + 1) * EPS
    err = value * rel_err
    if float(np.min(np.abs(z - 1.0))) > JENSEN_CROSSCHECK_DISTANCE:
        m = _log_quadrature(a, cfg)
        quad = math.exp(m.value)
        if abs(quad - value) > JENSEN_AGREEMENT * value:
            raise NormConsistencyError(
                f"Jensen product {value!r} and log-quadrature {quad!r} disagree"
            )
    return NormResult(value, 0.0, "jensen-roots", err)


@functools.lru_cache(maxsize=16384)
def _unit_two_term(t: float, p: float, cfg: QuadratureConfig) -> NormResult:
    # ||1 + t z||_p with 0 <= t <= 1; any zero sits at theta = pi, a grid node
    return _norm_p_cached(Polynomial((1.0 + 0j, complex(t))), p, cfg)


def two_term_norm(
    alpha: complex, beta: complex, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> NormResult:
    """||alpha z + beta||_p (equal to ||alpha z^n + beta||_p for every n >= 1).

    Only |alpha| and |beta| matter, so this is computed as
    max(|alpha|,|beta|) * ||1 + t z||_p with t = min/max.  That makes the
    result exactly symmetric and phase-free.
    """
    p = check_exponent(p)
    x, y = abs(complex(alpha)), abs(complex(beta))
    big, small = max(x, y), min(x, y)
    if big == 0:
        raise ValueError("two_term_norm needs alpha or beta nonzero")
    if math.isinf(p):
        v = x + y
        return NormResult(v, p, "closed-form", 2 * EPS * v)
    if p == 0:
        return NormResult(big, p, "closed-form", 0.0)
    if p == 2:
        v = math.hypot(x, y)
        return NormResult(v, p, "closed-form", 2 * EPS * v)
    if small == 0:
        return NormResult(big, p, "closed-form", 0.0)
    u = _unit_two_term(small / big, p, cfg)
    return NormResult(big * u.value, p, u.method, big * u.err_abs, u.flagged)
