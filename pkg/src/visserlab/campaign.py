"""Randomised campaigns: many polynomials, every applicable check, one report file.

Each case (cell, sample) draws its polynomial from a private RNG stream
derived from ``(master_seed, cell_index, sample_index)``, so the rows do not
depend on how cases are spread across workers.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circle_norms import DEFAULT_CONFIG, QuadratureConfig, parse_exponent
from .poly_core import binomial, two_term_selector
from .visser_checks import (
    EQUALITY,
    HOLDS,
    INCONCLUSIVE,
    STATEMENTS,
    TAU_REL,
    VIOLATED,
    InequalityReport,
    check_composition_double_integral,
    check_corollary1,
    check_corollary2,
    check_lemma_phase_integral,
    check_lemma_pointwise,
    check_lemma_twoterm_lower,
    check_operator_norm_bound,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_visser,
    reports_to_csv,
)
from .zero_location import (
    GeneratorSpec,
    coefficient_dominance_check,
    generate_unconstrained,
    generate_zero_free,
)

DEFAULT_STATEMENTS = tuple(s for s in STATEMENTS if s != "composition_double")
ZERO_FREE_ONLY = {"thm2", "thm3", "cor1", "cor2", "lemma_pointwise", "lemma_phase",
                  "composition_double"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    degrees: tuple[int, ...]
    rho_list: tuple[float, ...]
    p_list: tuple[float, ...]
    samples_per_cell: int
    master_seed: int = 0
    s_policy: str = "all"
    s_list: tuple[int, ...] = ()
    statements: tuple[str, ...] = DEFAULT_STATEMENTS
    generator: str = "zero_free"  # or "unconstrained"
    outer_factor: float = 4.0  # zero-free roots live in rho(1+1e-6) <= |z| <= outer_factor*rho
    radius: float = 3.0  # unconstrained roots live in |z| <= radius
    leading_scale: tuple[float, float] = (0.5, 2.0)
    tau_rel: float = TAU_REL
    quadrature: QuadratureConfig = DEFAULT_CONFIG
    pointwise_grid: int = 4096
    out_dir: str | None = None

    def __post_init__(self):
        if not self.degrees or not self.rho_list or not self.p_list:
            raise ConfigError("degrees, rho_list and p_list must be non-empty")
        if self.samples_per_cell < 1:
            raise ConfigError("samples_per_cell must be >= 1")
        if any(n < 1 or n > 64 for n in self.degrees):
            raise ConfigError("degrees must lie in 1..64")
        if any(not r >= 1 for r in self.rho_list):
            raise ConfigError("every rho must be >= 1")
        if self.s_policy not in ("all", "list"):
            raise ConfigError('s_policy must be "all" or "list"')
        if self.s_policy == "list" and not self.s_list:
            raise ConfigError('s_policy "list" needs a non-empty s_list')
        unknown = set(self.statements) - set(STATEMENTS)
        if unknown:
            raise ConfigError(f"unknown statements: {sorted(unknown)}")
        if self.generator not in ("zero_free", "unconstrained"):
            raise ConfigError('generator must be "zero_free" or "unconstrained"')
        if self.outer_factor <= 1 + 1e-6:
            raise ConfigError("outer_factor must exceed 1")

    @classmethod
    def from_json(cls, obj: dict) -> "CampaignConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {
            "degrees", "rho_list", "p_list", "samples_per_cell", "master_seed", "s_policy",
            "s_list", "statements", "generator", "outer_factor", "radius", "leading_scale",
            "tolerance", "quadrature", "pointwise_grid", "out_dir",
        }
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            kw = dict(
                degrees=tuple(int(n) for n in obj["degrees"]),
                rho_list=tuple(float(r) for r in obj["rho_list"]),
                p_list=tuple(parse_exponent(p) for p in obj["p_list"]),
                samples_per_cell=int(obj["samples_per_cell"]),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if "master_seed" in obj:
            kw["master_seed"] = int(obj["master_seed"])
        for key in ("s_policy", "generator", "out_dir"):
            if key in obj:
                kw[key] = obj[key]
        for key in ("outer_factor", "radius"):
            if key in obj:
                kw[key] = float(obj[key])
        if "pointwise_grid" in obj:
            kw["pointwise_grid"] = int(obj["pointwise_grid"])
        if "s_list" in obj:
            kw["s_list"] = tuple(int(s) for s in obj["s_list"])
        if "statements" in obj:
            kw["statements"] = tuple(obj["statements"])
        if "leading_scale" in obj:
            lo, hi = obj["leading_scale"]
            kw["leading_scale"] = (float(lo), float(hi))
        if "tolerance" in obj:
            kw["tau_rel"] = float(obj["tolerance"].get("tau_rel", TAU_REL))
        if "quadrature" in obj:
            try:
                kw["quadrature"] = QuadratureConfig(**obj["quadrature"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(str(exc)) from None
        return cls(**kw)

    def s_values(self, n: int) -> list[int]:
        if self.s_policy == "all":
            return list(range(n))
        return [s for s in self.s_list if 0 <= s < n]

    def cells(self) -> list[tuple[int, float, float, int]]:
        return [
            (n, rho, p, s)
            for n in self.degrees
            for rho in self.rho_list
            for p in self.p_list
            for s in self.s_values(n)
        ]


@dataclass
class CaseResult:
    cell: int
    sample: int
    reports: list[InequalityReport]
    dominance_ok: bool | None = None
    dominance_slack: float | None = None


def case_rng(master_seed: int, cell: int, sample: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(cell, sample)))


def run_case(cfg: CampaignConfig, cell_index: int, sample: int) -> CaseResult:
    n, rho, p, s = cfg.cells()[cell_index]
    rng = case_rng(cfg.master_seed, cell_index, sample)
    if cfg.generator == "zero_free":
        spec = GeneratorSpec(n, rho, cfg.outer_factor * rho, cfg.master_seed, cfg.leading_scale)
        P, _ = generate_zero_free(spec, rng)
    else:
        P, _ = generate_unconstrained(n, cfg.radius, rng, cfg.leading_scale)
    phi = float(rng.uniform(0.0, 2 * math.pi))
    zero_free = cfg.generator == "zero_free"
    want = [st for st in cfg.statements if zero_free or st not in ZERO_FREE_ONLY]
    q, tau = cfg.quadrature, cfg.tau_rel
    out: list[InequalityReport] = []
    for st in want:
        if math.isinf(p):
            if st == "visser" and s == 0:
                out.append(check_visser(P, tau))
            elif st == "cor1" and s >= 1:
                out.append(check_corollary1(P, s, rho, tau))
            continue
        if st == "thm1":
            out.append(check_theorem1(P, s, p, q, tau))
        elif st == "thm2":
            out.append(check_theorem2(P, s, p, q, tau))
        elif st == "thm3":
            out.append(check_theorem3(P, s, p, rho, q, tau))
        elif st == "cor2":
            out.append(check_corollary2(P, s, p, rho, q, tau))
        elif st == "lemma_pointwise":
            out.append(check_lemma_pointwise(P, s, rho, cfg.pointwise_grid, tau))
        elif st == "lemma_phase":
            out.append(check_lemma_phase_integral(P, s, p, phi, q, tau))
        elif st == "lemma_twoterm":
            out.append(check_lemma_twoterm_lower(
                P.leading, P.coeffs[s] / binomial(n, s), p, q, tau))
        elif st == "operator_bound":
            out.append(check_operator_norm_bound(two_term_selector(n, s), P, p, q, tau))
        elif st == "composition_double" and p > 0:
            out.append(check_composition_double_integral(s, P, p, tau_rel=tau))
    result = CaseResult(cell_index, sample, out)
    if zero_free:
        dom = coefficient_dominance_check(P, rho, tau)
        result.dominance_ok, result.dominance_slack = dom.ok, dom.worst_slack
    return result


def _run_chunk(cfg: CampaignConfig, cases: list[tuple[int, int]]) -> list[CaseResult]:
    return [run_case(cfg, c, k) for c, k in cases]


def run_campaign(cfg: CampaignConfig, workers: int = 1) -> list[CaseResult]:
    """All cases of the campaign, in canonical (cell, sample) order."""
    cases = [(c, k) for c in range(len(cfg.cells())) for k in range(cfg.samples_per_cell)]
    if workers <= 1:
        results = _run_chunk(cfg, cases)
    else:
        chunk = max(1, len(cases) // (4 * workers))
        parts = [cases[i:i + chunk] for i in range(0, len(cases), chunk)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_chunk, [cfg] * len(parts), parts) for r in part]
    results.sort(key=lambda r: (r.cell, r.sample))
    return results


@dataclass
class StatementSummary:
    statement: str
    cases: int = 0
    holds: int = 0
    equality: int = 0
    violations: int = 0
    inconclusive: int = 0
    min_slack: float | None = None

    def to_json(self) -> dict:
        return {
            "statement": self.statement, "cases": self.cases, "holds": self.holds,
            "equality": self.equality, "violations": self.violations,
            "inconclusive": self.inconclusive, "min_slack": self.min_slack,
        }


def summarize(results: list[CaseResult]) -> list[dict]:
    table: dict[str, StatementSummary] = {}
    for res in results:
        for r in res.reports:
            row = table.setdefault(r.statement, StatementSummary(r.statement))
            row.cases += 1
            row.holds += r.verdict == HOLDS
            row.equality += r.verdict == EQUALITY
            row.violations += r.verdict == VIOLATED
            row.inconclusive += r.verdict == INCONCLUSIVE
            row.min_slack = r.slack if row.min_slack is None else min(row.min_slack, r.slack)
    lines = [table[s].to_json() for s in STATEMENTS if s in table]
    dom = [r for r in results if r.dominance_ok is not None]
    if dom:
        lines.append({
            "statement": "coefficient_dominance",
            "cases": len(dom),
            "violations": sum(not r.dominance_ok for r in dom),
            "min_slack": min(r.dominance_slack for r in dom),
        })
    return lines


def write_reports(results: list[CaseResult], out_dir: str | os.PathLike) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jsonl, csv_path = out / "reports.jsonl", out / "reports.csv"
    with open(jsonl, "w", encoding="utf-8", newline="\n") as fh:
        for res in results:
            for r in res.reports:
                row = {"cell": res.cell, "sample": res.sample, **r.to_json()}
                fh.write(json.dumps(row) + "\n")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(reports_to_csv(r for res in results for r in res.reports))
    return jsonl, csv_path


def any_failure(results: list[CaseResult]) -> bool:
    return any(
        r.verdict == VIOLATED for res in results for r in res.reports
    ) or any(res.dominance_ok is False for res in results)
