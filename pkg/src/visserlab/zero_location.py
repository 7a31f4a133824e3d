"""Root finding, zero-free disk certificates and random zero-free polynomials."""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .poly_core import Polynomial, RootForm, binomial, from_roots

EPS = float(np.finfo(float).eps)

# relative root accuracy beyond which a boundary decision is meaningless
CERTIFY_ACCURACY_CAP = 1e-3
# the generator keeps roots this far (relatively) outside the rho circle
GENERATOR_GAP = 1e-6
# and resamples polynomials whose roots are worse conditioned than this
GENERATOR_MAX_ACCURACY = 1e-7


class RootFindingError(RuntimeError):
    pass


class HypothesisError(ValueError):
    """A theorem's zero-location hypothesis is not met by the input."""


@dataclass(frozen=True)
class RootResult:
    roots: tuple[complex, ...]
    # relative accuracy estimate per root (inclusion radius / |root|)
    rel_accuracy: tuple[float, ...]

    @property
    def accuracy(self) -> float:
        return max(self.rel_accuracy, default=0.0)


def _aberth_step(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    n = len(z)
    p = np.polyval(a[::-1], z)
    dp = np.polyval((a[1:] * np.arange(1, len(a)))[::-1], z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        corr = ratio / (1.0 - ratio * inv.sum(axis=1))
    corr[p == 0] = 0.0
    if n == 1:
        corr = ratio
    return corr


def _inclusion_radii(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Error radius per computed root.

    Isolated roots get n |P(z_i)| / |a_n prod_{j!=i}(z_i - z_j)| with the
    Horner rounding bound added to |P(z_i)|.  Roots whose disks overlap are
    treated as one m-fold cluster around their centroid c, with radius
    spread + (|P(c)| / |a_n prod_{j outside}(c - z_j)|)^(1/m).
    """
    n = len(z)

    def residual(w):
        w = np.asarray(w)
        return np.abs(np.polyval(a[::-1], w)) + 2 * (n + 1) * EPS * np.polyval(
            np.abs(a)[::-1], np.abs(w)
        )

    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    den = abs(a[-1]) * np.abs(np.prod(diff, axis=1))
    with np.errstate(divide="ignore"):
        rad = np.where(den > 0, n * residual(z) / den, np.inf)

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= rad[i] + rad[j]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for members in groups.values():
        m = len(members)
        if m == 1:
            continue
        c = z[members].mean()
        outside = [j for j in range(n) if j not in members]
        scale = abs(a[-1]) * float(np.prod(np.abs(c - z[outside]))) if outside else abs(a[-1])
        spread = float(np.max(np.abs(z[members] - c)))
        r = spread + (float(residual(c)) / scale) ** (1.0 / m) if scale > 0 else np.inf
        rad[members] = np.minimum(rad[members], r)
    return rad


def _weighted_residual(a: np.ndarray, z: np.ndarray) -> float:
    scale = np.polyval(np.abs(a)[::-1], np.abs(z))
    return float(np.max(np.abs(np.polyval(a[::-1], z)) / scale))


@functools.lru_cache(maxsize=8192)
def _roots_cached(coeffs: tuple[complex, ...]) -> RootResult:
    a = np.array(coeffs, dtype=complex)
    zeros_at_origin = 0
    while zeros_at_origin < len(a) - 1 and a[zeros_at_origin] == 0:
        zeros_at_origin += 1
    a = a[zeros_at_origin:]
    found: list[complex] = []
    acc: list[float] = []
    if len(a) > 1:
        z = np.roots(a[::-1]).astype(complex)
        if len(z) != len(a) - 1 or not np.all(np.isfinite(z)):
            raise RootFindingError(f"companion eigenvalues failed for {coeffs}")
        best, best_res = z, _weighted_residual(a, z)
        for _ in range(12):
            corr = _aberth_step(a, z)
            if not np.all(np.isfinite(corr)):
                break
            z = z - corr
            res = _weighted_residual(a, z)
            if res < best_res:
                best, best_res = z, res
            if np.all(np.abs(corr) <= 4 * EPS * np.maximum(np.abs(z), 1.0)):
                break
        z = best
        rad = _inclusion_radii(a, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(np.abs(z) > 0, rad / np.abs(z), rad)
        order = np.lexsort((np.angle(z), np.abs(z)))
        found = [complex(v) for v in z[order]]
        acc = [float(v) for v in rel[order]]
    return RootResult(
        roots=tuple([0j] * zeros_at_origin + found),
        rel_accuracy=tuple([0.0] * zeros_at_origin + acc),
    )


def roots(P: Polynomial) -> RootResult:
    """All roots of P with multiplicity, sorted by modulus.

    Companion-matrix eigenvalues are polished by Aberth-Ehrlich sweeps; each
    root carries a relative accuracy estimate from its Weierstrass-type
    inclusion radius.  Exact zero coefficients at the bottom give exact zero
    roots.
    """
    Q = P.trimmed()
    if Q.formal or Q.degree < 1:
        raise RootFindingError("roots need a polynomial of degree >= 1")
    return _roots_cached(Q.coeffs)


@dataclass(frozen=True)
class ZeroFreeCertificate:
    rho: float
    min_root_modulus: float
    margin: float
    root_accuracy: float
    valid: bool

    def to_json(self) -> dict:
        return asdict(self)


def certify_zero_free(P: Polynomial, rho: float) -> ZeroFreeCertificate:
    """Does P have no zeros in the open disk |z| < rho?

    Zeros on |z| = rho are allowed.  A root counts as outside when its
    modulus, widened by its own accuracy estimate, reaches rho(1 - 1e-12).
    """
    if not rho >= 1:
        raise ValueError(f"rho must be >= 1, got {rho}")
    rr = roots(P)
    z = np.abs(np.array(rr.roots))
    acc = np.array(rr.rel_accuracy)
    i = int(np.argmin(z))
    worst = float(np.max(acc[z <= rho * (1 + 1e-6)], initial=0.0))
    if worst > CERTIFY_ACCURACY_CAP:
        raise RootFindingError(
            f"roots near |z|={rho} are too ill-conditioned to certify (rel. accuracy {worst:.2e})"
        )
    valid = bool(np.all(z * (1 + acc) >= rho * (1 - 1e-12)))
    return ZeroFreeCertificate(
        rho=float(rho),
        min_root_modulus=float(z[i]),
        margin=float(z[i] - rho),
        root_accuracy=float(rr.accuracy),
        valid=valid,
    )


def require_zero_free(P: Polynomial, rho: float) -> ZeroFreeCertificate:
    cert = certify_zero_free(P, rho)
    if not cert.valid:
        raise HypothesisError(
            f"polynomial has a zero of modulus {cert.min_root_modulus:.6g} inside |z|<{rho}"
        )
    return cert


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    rho: float
    R: float
    seed: int
    leading_scale: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("degree must be >= 1")
        if not self.rho >= 1:
            raise ValueError("rho must be >= 1")
        if self.R < self.rho * (1 + GENERATOR_GAP):
            raise ValueError(f"outer radius R={self.R} must be >= rho*(1+1e-6)")
        lo, hi = self.leading_scale
        if not 0 < lo <= hi:
            raise ValueError("leading_scale must be a positive range")


def generate_zero_free(
    spec: GeneratorSpec, rng: np.random.Generator | None = None
) -> tuple[Polynomial, RootForm]:
    """Random polynomial with all roots in rho(1+1e-6) <= |z| <= R.

    Deterministic for a fixed ``spec.seed`` (or a fixed ``rng`` state).
    Draws whose roots come out worse conditioned than 1e-7 are redrawn.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    lo = spec.rho * (1 + GENERATOR_GAP)
    for _ in range(1000):
        radii = rng.uniform(lo, spec.R, spec.n)
        angles = rng.uniform(0.0, 2 * math.pi, spec.n)
        lead = rng.uniform(*spec.leading_scale) * np.exp(1j * rng.uniform(0.0, 2 * math.pi))
        rf = RootForm(complex(lead), tuple((radii * np.exp(1j * angles)).tolist()))
        P = from_roots(rf)
        try:
            cert = certify_zero_free(P, spec.rho)
        except RootFindingError:
            continue
        if cert.valid and cert.root_accuracy <= GENERATOR_MAX_ACCURACY:
            return P, rf
    raise RootFindingError(f"could not draw a well-conditioned polynomial for {spec}")


def generate_unconstrained(
    n: int, radius: float, rng: np.random.Generator, leading_scale=(0.5, 2.0)
) -> tuple[Polynomial, RootForm]:
    """Roots uniform in the disk |z| <= radius; no zero-location constraint."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    angles = rng.uniform(0.0, 2 * math.pi, n)
    lead = rng.uniform(*leading_scale) * np.exp(1j * rng.uniform(0.0, 2 * math.pi))
    rf = RootForm(complex(lead), tuple((r * np.exp(1j * angles)).tolist()))
    return from_roots(rf), rf


@dataclass(frozen=True)
class DominanceReport:
    rho: float
    ok: bool
    worst_index: int
    worst_slack: float  # min_j (C(n,j)|a_0| - rho^j |a_j|) / (C(n,j)|a_0|)
    violations: tuple[int, ...]

    def to_json(self) -> dict:
        d = asdict(self)
        d["violations"] = list(self.violations)
        return d


def coefficient_dominance_check(
    P: Polynomial, rho: float, tau_rel: float = 1e-9
) -> DominanceReport:
    """rho^j |a_j| <= C(n,j) |a_0| for j = 1..n.

    A zero-free polynomial on |z| < rho always satisfies this (Viete bound on
    the elementary symmetric functions of the reciprocal roots).
    """
    cert = require_zero_free(P, rho)
    n = P.degree
    a0 = abs(P.coeffs[0])
    tol = tau_rel + n * max(1e-12, cert.root_accuracy)
    worst_j, worst = 0, math.inf
    bad = []
    for j in range(1, n + 1):
        bound = binomial(n, j) * a0
        slack = (bound - rho**j * abs(P.coeffs[j])) / bound
        if slack < worst:
            worst_j, worst = j, slack
        if slack < -tol:
            bad.append(j)
    return DominanceReport(
        rho=float(rho), ok=not bad, worst_index=worst_j, worst_slack=worst,
        violations=tuple(bad),
    )
