"""Complex polynomials in dense ascending-coefficient form.

Coefficients are stored as a tuple ``(a_0, a_1, ..., a_n)`` of Python
complex numbers, so a :class:`Polynomial` is immutable and hashable and can
be used as a cache key by the norm routines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BINOMIAL_MAX_N = 64


class PolynomialError(ValueError):
    """Raised for malformed polynomial input."""


@dataclass(frozen=True)
class Polynomial:
    """P(z) = sum_j coeffs[j] * z**j.

    ``formal=True`` marks a polynomial whose stored leading coefficient is
    zero (the reversal of a polynomial with ``a_0 == 0``, or an operator
    image that killed the top term).  Its degree is still ``len(coeffs) - 1``.
    """

    coeffs: tuple[complex, ...]
    formal: bool = False

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise PolynomialError("polynomial needs at least one coefficient")
        for c in coeffs:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise PolynomialError(f"non-finite coefficient {c!r}")
        if coeffs[-1] == 0 and not self.formal:
            raise PolynomialError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, z):
        return evaluate(self, z)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, j: int) -> complex:
        return self.coeffs[j]

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def trimmed(self) -> "Polynomial":
        """Drop zero leading coefficients (a formal polynomial becomes genuine)."""
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return Polynomial(tuple(c), formal=(c[-1] == 0))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def scaled(self, k: complex) -> "Polynomial":
        return Polynomial(tuple(k * c for c in self.coeffs))

    def rotated(self, phi: float) -> "Polynomial":
        """P(e^{i phi} z)."""
        w = complex(math.cos(phi), math.sin(phi))
        return Polynomial(tuple(c * w**j for j, c in enumerate(self.coeffs)))

    def to_json(self) -> dict:
        return {"coeffs": [[c.real, c.imag] for c in self.coeffs]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise PolynomialError('expected an object with a "coeffs" list')
        raw = obj["coeffs"]
        if not isinstance(raw, list):
            raise PolynomialError('"coeffs" must be a list')
        return cls(tuple(_parse_coeff(c) for c in raw))

    @classmethod
    def loads(cls, text: str) -> "Polynomial":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PolynomialError(f"invalid JSON: {exc}") from None
        return cls.from_json(obj)


def _parse_coeff(c) -> complex:
    # [re, im] pairs are canonical; bare reals are accepted for hand-written files
    if isinstance(c, bool):
        raise PolynomialError(f"bad coefficient {c!r}")
    if isinstance(c, (int, float)):
        return complex(c)
    if isinstance(c, list) and len(c) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in c
    ):
        return complex(c[0], c[1])
    raise PolynomialError(f"bad coefficient {c!r}")


@dataclass(frozen=True)
class RootForm:
    """leading * prod_j (z - roots[j])."""

    leading: complex
    roots: tuple[complex, ...]

    def __post_init__(self):
        if self.leading == 0:
            raise PolynomialError("RootForm leading factor must be nonzero")
        object.__setattr__(self, "leading", complex(self.leading))
        object.__setattr__(self, "roots", tuple(complex(r) for r in self.roots))

    def to_json(self) -> dict:
        return {
            "leading": [self.leading.real, self.leading.imag],
            "roots": [[r.real, r.imag] for r in self.roots],
        }


@dataclass(frozen=True)
class GammaVector:
    """Multipliers (gamma_0, ..., gamma_n) of a coefficient operator."""

    entries: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(complex(g) for g in self.entries))

    def __len__(self):
        return len(self.entries)

    @property
    def bound_constant(self) -> float:
        """max(|gamma_0|, |gamma_n|)."""
        return max(abs(self.entries[0]), abs(self.entries[-1]))


def evaluate(P: Polynomial, z):
    """Horner evaluation; ``z`` may be a scalar or a numpy array."""
    acc = 0j if np.isscalar(z) else np.zeros(np.shape(z), dtype=complex)
    for c in reversed(P.coeffs):
        acc = acc * z + c
    return acc


def reverse_conjugate(P: Polynomial) -> Polynomial:
    """z^n * conj(P(1/conj(z))): coefficient j is conj(a_{n-j})."""
    rev = tuple(c.conjugate() for c in reversed(P.coeffs))
    return Polynomial(rev, formal=(rev[-1] == 0))


def dilate(P: Polynomial, rho: float) -> Polynomial:
    """P(rho z)."""
    if not rho > 0:
        raise ValueError(f"dilation factor must be positive, got {rho}")
    n = P.degree
    lead = abs(P.leading)
    if lead > 0 and n * math.log(rho) + math.log(lead) >= math.log(np.finfo(float).max):
        raise OverflowError(f"rho^n |a_n| overflows for rho={rho}, n={n}")
    out = tuple(c * rho**j for j, c in enumerate(P.coeffs))
    if any(not math.isfinite(abs(c)) for c in out):
        raise OverflowError(f"dilation by rho={rho} overflows")
    return Polynomial(out, formal=P.formal)


def binomial(n: int, k: int) -> int:
    if n > BINOMIAL_MAX_N:
        raise ValueError(f"binomial capped at n={BINOMIAL_MAX_N}, got n={n}")
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return math.comb(n, k)


def coefficient_operator(gamma: GammaVector, P: Polynomial) -> Polynomial:
    """sum_j gamma_j a_j z^j."""
    if len(gamma) != len(P):
        raise ValueError(
            f"gamma has {len(gamma)} entries, polynomial has {len(P)} coefficients"
        )
    out = tuple(g * a for g, a in zip(gamma.entries, P.coeffs))
    return Polynomial(out, formal=(out[-1] == 0))


def from_roots(r: RootForm) -> Polynomial:
    # smallest roots first keeps intermediate coefficients comparable in size
    coeffs = np.array([1.0 + 0j])
    for root in sorted(r.roots, key=abs):
        nxt = np.zeros(len(coeffs) + 1, dtype=complex)
        nxt[1:] = coeffs
        nxt[:-1] -= root * coeffs
        coeffs = nxt
    return Polynomial(tuple((r.leading * coeffs).tolist()))


def two_term_selector(n: int, s: int) -> GammaVector:
    """gamma with gamma_n = 1, gamma_s = 1/C(n,s), zeros elsewhere."""
    if not 0 <= s < n:
        raise ValueError(f"need 0 <= s < n, got n={n}, s={s}")
    g = [0j] * (n + 1)
    g[n] = 1.0
    g[s] = 1.0 / binomial(n, s)
    return GammaVector(tuple(g))


def polynomial(coeffs: Iterable[complex] | Sequence[float]) -> Polynomial:
    """Convenience constructor from any iterable of numbers."""
    return Polynomial(tuple(complex(c) for c in coeffs))
