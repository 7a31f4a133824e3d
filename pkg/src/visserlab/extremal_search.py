"""Multistart Nelder-Mead search for near-extremal zero-free polynomials.

Candidates are monic polynomials given by their roots
``r_j = rho (1 + 1e-6) + max(u_j, 0)`` at angles ``w_j``, so the zero-free
constraint is a box.  The objective is the ratio lhs/rhs of the
rho-generalised Visser bound; a ratio above 1 + tol can only come from a bug.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .circle_norms import DEFAULT_CONFIG, QuadratureConfig, check_exponent
from .poly_core import Polynomial, RootForm, from_roots
from .visser_checks import EQUALITY, InequalityReport, check_theorem3
from .zero_location import GENERATOR_GAP, HypothesisError, RootFindingError

MAX_SEARCH_DEGREE = 12

# coarser quadrature while searching; every reported number is recomputed
# with DEFAULT_CONFIG
SEARCH_CONFIG = QuadratureConfig(initial_nodes=4096, max_nodes=1 << 15, rel_target=1e-11)


class TheoremViolation(AssertionError):
    """A recomputed ratio exceeded 1 + tol: the counterexample is attached."""

    def __init__(self, message: str, poly: Polynomial, report: InequalityReport):
        super().__init__(message)
        self.poly = poly
        self.report = report

    def dump(self) -> str:
        return json.dumps({"poly": self.poly.to_json(), "report": self.report.to_json()})


@dataclass(frozen=True)
class SearchProblem:
    n: int
    s: int
    p: float
    rho: float
    restarts: int = 20
    iters_per_restart: int = 500
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= MAX_SEARCH_DEGREE:
            raise ValueError(f"search degree must be in 1..{MAX_SEARCH_DEGREE}, got {self.n}")
        if not 0 <= self.s <= self.n - 1:
            raise ValueError(f"need 0 <= s <= n-1, got s={self.s}")
        p = check_exponent(self.p)
        if math.isinf(p):
            raise ValueError("search needs a finite p (use a large p as a proxy for inf)")
        if not self.rho >= 1:
            raise ValueError("rho must be >= 1")
        if self.restarts < 1 or self.iters_per_restart < 1:
            raise ValueError("restarts and iters_per_restart must be >= 1")


@dataclass
class SearchResult:
    best_ratio: float
    best_poly: Polynomial
    best_rootform: RootForm
    evaluations: int
    infeasible: int
    per_restart_trace: list[tuple[int, float]]
    best_report: InequalityReport
    histories: list[list[float]] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "best_ratio": self.best_ratio,
            "best_poly": self.best_poly.to_json(),
            "best_rootform": self.best_rootform.to_json(),
            "evaluations": self.evaluations,
            "infeasible": self.infeasible,
            "per_restart_trace": [[i, r] for i, r in self.per_restart_trace],
            "report": self.best_report.to_json(),
        }

    def trace_csv(self) -> str:
        lines = ["restart,step,best_ratio"]
        for i, hist in enumerate(self.histories):
            lines.extend(f"{i},{k},{v!r}" for k, v in enumerate(hist))
        return "\n".join(lines) + "\n"


def rootform_from_params(x: np.ndarray, rho: float) -> RootForm:
    n = len(x) // 2
    radii = rho * (1 + GENERATOR_GAP) + np.maximum(x[:n], 0.0)
    angles = np.mod(x[n:], 2 * math.pi)
    return RootForm(1.0, tuple((radii * np.exp(1j * angles)).tolist()))


# per restart, this many coarse-objective leaders (plus the starting point)
# are re-evaluated with the final quadrature
RECHECK_CANDIDATES = 4


@dataclass
class _RestartOutcome:
    index: int
    candidates: list[np.ndarray]
    best_ratio: float  # coarse objective
    evaluations: int
    infeasible: int
    history: list[float]


def _run_restart(prob: SearchProblem, index: int, cfg: QuadratureConfig) -> _RestartOutcome:
    n, rho = prob.n, prob.rho
    rng = np.random.default_rng(np.random.SeedSequence(prob.seed, spawn_key=(index,)))
    if index == 0 and prob.s == 0:
        # z^n + c with |c| at the boundary: roots at the n-th roots of -c
        x0 = np.concatenate([np.zeros(n), (math.pi + 2 * math.pi * np.arange(n)) / n])
    else:
        x0 = np.concatenate([rng.exponential(0.5 * rho, n), rng.uniform(0, 2 * math.pi, n)])
    steps = np.concatenate([np.full(n, 0.25 * rho), np.full(n, 0.5)])
    simplex = np.vstack([x0] + [x0 + steps[i] * np.eye(2 * n)[i] for i in range(2 * n)])

    leaders: list[tuple[float, int, np.ndarray]] = []
    state = {"best": -math.inf, "evals": 0, "bad": 0}
    history: list[float] = []

    def objective(x):
        state["evals"] += 1
        try:
            P = from_roots(rootform_from_params(x, rho))
            ratio = check_theorem3(P, prob.s, prob.p, rho, cfg).ratio
        except (HypothesisError, RootFindingError):
            state["bad"] += 1
            return math.inf
        if ratio is None or not math.isfinite(ratio):
            state["bad"] += 1
            return math.inf
        if len(leaders) < RECHECK_CANDIDATES or ratio > leaders[-1][0]:
            leaders.append((ratio, state["evals"], np.array(x, copy=True)))
            leaders.sort(key=lambda t: (-t[0], t[1]))
            del leaders[RECHECK_CANDIDATES:]
        state["best"] = max(state["best"], ratio)
        history.append(state["best"])
        return -ratio

    minimize(objective, x0, method="Nelder-Mead",
             options={"maxiter": prob.iters_per_restart, "initial_simplex": simplex,
                      "xatol": 1e-10, "fatol": 1e-14})
    return _RestartOutcome(index, [x0] + [x for _, _, x in leaders], state["best"],
                           state["evals"], state["bad"], history)


def sharpness_search(prob: SearchProblem, workers: int = 1,
                     search_cfg: QuadratureConfig = SEARCH_CONFIG,
                     final_cfg: QuadratureConfig = DEFAULT_CONFIG) -> SearchResult:
    """Maximise the thm3 ratio over monic polynomials zero-free in |z| < rho.

    Restarts are independent and seeded from (seed, restart index), so the
    result does not depend on ``workers``.  The search runs on a coarser
    quadrature; each restart's starting point and leading candidates are
    re-evaluated with ``final_cfg`` and the best recomputed ratio wins (ties
    go to the lower restart index).
    """
    indices = range(prob.restarts)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda i: _run_restart(prob, i, search_cfg), indices))
    else:
        outcomes = [_run_restart(prob, i, search_cfg) for i in indices]

    best = None
    trace = []
    for out in outcomes:
        restart_best = -math.inf
        for x in out.candidates:
            rf = rootform_from_params(x, prob.rho)
            P = from_roots(rf)
            try:
                rep = check_theorem3(P, prob.s, prob.p, prob.rho, final_cfg)
            except (HypothesisError, RootFindingError):
                continue
            if rep.rhs > 0 and rep.lhs > rep.rhs * (1 + 1e-9) + rep.tol_used:
                raise TheoremViolation(
                    f"ratio {rep.ratio!r} exceeds 1 + tol for {prob}", P, rep
                )
            restart_best = max(restart_best, rep.ratio)
            if best is None or rep.ratio > best[0]:
                best = (rep.ratio, P, rf, rep)
        trace.append((out.index, restart_best))
    if best is None:
        raise RootFindingError("no feasible candidate survived recomputation")

    ratio, P, rf, rep = best
    return SearchResult(
        best_ratio=ratio,
        best_poly=P,
        best_rootform=rf,
        evaluations=sum(o.evaluations for o in outcomes),
        infeasible=sum(o.infeasible for o in outcomes),
        per_restart_trace=trace,
        best_report=rep,
        histories=[o.history for o in outcomes],
    )


def equality_witness(n: int, rho: float, c_modulus: float, p: float,
                     seed: int = 0, cfg: QuadratureConfig = DEFAULT_CONFIG) -> InequalityReport:
    """Check the s = 0 bound on P = z^n + c, |c| = c_modulus >= rho^n.

    The phase of c is random (from ``seed``); the verdict must be equality.
    """
    if c_modulus < rho**n * (1 - 1e-12):
        raise ValueError(f"|c| must be >= rho^n = {rho**n}")
    phase = np.random.default_rng(seed).uniform(0, 2 * math.pi)
    c = c_modulus * complex(math.cos(phase), math.sin(phase))
    P = Polynomial((c,) + (0j,) * (n - 1) + (1 + 0j,))
    rep = check_theorem3(P, 0, p, rho, cfg)
    if rep.verdict != EQUALITY:
        raise AssertionError(f"lacunary witness missed equality: {rep}")
    return rep
