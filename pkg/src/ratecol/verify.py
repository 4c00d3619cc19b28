"""Exhaustive and randomised self-checks of the structural and numerical claims.

Each suite returns a :class:`SuiteResult`; ``run_suites`` drives them for the
``verify`` subcommand. ``quick=True`` shrinks every range so the whole set
finishes in seconds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds, stopping, zeroerror
from .exceptions import RatecolError
from .numerics import SourceModel, binary_entropy, entropy, prob_at_most, prob_interval
from .symfunc import (
    SymmetricFunction,
    build_function,
    builtin,
    decompose_intervals,
    enumerate_monochromatic_rectangles,
    enumerate_rectangles,
    is_monochromatic,
)

SLACK = 1e-12
MAX_REPORTED = 20


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, item):
        if len(self.violations) < MAX_REPORTED:
            self.violations.append(item)
        else:
            self.details["violations_truncated"] = True

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "violations": self.violations,
            **self.details,
        }


def builtin_functions(m: int) -> list[SymmetricFunction]:
    fns = [builtin(name, m) for name in ("parity", "sum", "max", "min", "majority")]
    fns.extend(builtin("threshold", m, theta) for theta in sorted({0, m // 2, m}))
    return fns


def random_function(rng: np.random.Generator, m: int, n_labels: int | None = None) -> SymmetricFunction:
    """Reduced table with labels drawn uniformly from ``n_labels`` symbols."""
    if n_labels is None:
        n_labels = int(rng.integers(1, 5))
    return build_function(m, rng.integers(0, n_labels, size=m + 1).tolist(), name="random")


def rectangles(m_max: int = 8, n_random: int = 50, seed: int = 0) -> SuiteResult:
    """Every monochromatic rectangle's sum range lies in exactly one maximal interval,
    and every non-monochromatic one spans at least two labels."""
    res = SuiteResult("rectangles")
    rng = np.random.default_rng(seed)
    fns = [f for m in range(1, m_max + 1) for f in builtin_functions(m)]
    fns += [random_function(rng, int(rng.integers(1, m_max + 1))) for _ in range(n_random)]
    for f in fns:
        d = decompose_intervals(f)
        mono = set()
        for r in enumerate_monochromatic_rectangles(f):
            mono.add(r.sets)
            alpha, beta = r.alpha, r.beta
            owners = [v for v, iv in enumerate(d, 1) if iv.a <= alpha and beta <= iv.b]
            res.checked += 1
            if len(owners) != 1:
                res.fail({"labels": list(f.labels), "rectangle": _rect_str(r), "owners": owners})
        if f.m <= min(m_max, 6):
            # cross-check the enumerator against direct point evaluation
            for r in enumerate_rectangles(f.m):
                direct = is_monochromatic(f, r)
                if direct != (r.sets in mono):
                    res.fail({"labels": list(f.labels), "rectangle": _rect_str(r), "enumerator_mismatch": True})
                if not direct and len(set(f.labels[r.alpha : r.beta + 1])) < 2:
                    res.fail({"labels": list(f.labels), "rectangle": _rect_str(r), "nonmono_single_label": True})
                res.checked += 1
    res.details["functions"] = len(fns)
    return res


def _rect_str(r) -> str:
    names = {frozenset({0}): "0", frozenset({1}): "1", frozenset({0, 1}): "*"}
    return "".join(names[S] for S in r.sets)


def lemma4(n: int = 10_000, k_max: int = 4, seed: int = 1) -> SuiteResult:
    """``H(Y^k) <= k h(E(S_Y)/k)`` for arbitrary joint laws on ``{0,1}^k``."""
    res = SuiteResult("lemma4")
    rng = np.random.default_rng(seed)
    cubes = {k: np.array(list(itertools.product((0, 1), repeat=k))).sum(axis=1) for k in range(1, k_max + 1)}
    for i in range(n):
        k = int(rng.integers(1, k_max + 1))
        # mix of dense and sparse laws so the boundary is exercised
        w = rng.dirichlet(np.full(2**k, 10.0 ** rng.uniform(-2, 1)))
        lhs = entropy(w)
        mean = float(np.dot(w, cubes[k]))
        rhs = k * binary_entropy(min(max(mean / k, 0.0), 1.0))
        res.checked += 1
        if lhs > rhs + SLACK:
            res.fail({"k": k, "trial": i, "H": lhs, "bound": rhs})
    return res


def lemma5(n: int = 1_000, m_max: int = 64, seed: int = 2) -> SuiteResult:
    """Merging two adjacent intervals never increases the first lower bound."""
    res = SuiteResult("lemma5")
    rng = np.random.default_rng(seed)
    done = 0
    while done < n:
        m = int(rng.integers(2, m_max + 1))
        f = random_function(rng, m, int(rng.integers(2, 6)))
        d = decompose_intervals(f)
        if d.v_max < 2:
            continue
        src = SourceModel(m, float(rng.uniform(0.02, 0.98)))
        v = int(rng.integers(1, d.v_max))
        before = bounds.lower_bound_i(d, src)
        after = bounds.lower_bound_i(bounds.combine_adjacent(d, v), src)
        res.checked += 1
        done += 1
        if after > before + SLACK:
            res.fail({"m": m, "p": src.p, "v": v, "before": before, "after": after})
    return res


def fact1(n: int = 500, m_max: int = 64, seed: int = 3) -> SuiteResult:
    """Whenever a witness is returned, its interval mass exceeds ``1 - 2 eps``."""
    res = SuiteResult("fact1")
    rng = np.random.default_rng(seed)
    for _ in range(n):
        m = int(rng.integers(1, m_max + 1))
        f = random_function(rng, m) if rng.random() < 0.7 else builtin(
            str(rng.choice(["max", "min", "majority", "parity"])), m)
        src = SourceModel(m, float(rng.uniform(0.01, 0.99)))
        eps = float(rng.uniform(1e-3, 0.499))
        v = bounds.fact1_witness(f, src, eps)
        res.checked += 1
        if v is None:
            continue
        iv = decompose_intervals(f)[v]
        if not prob_interval(src, iv.a, iv.b) > 1 - 2 * eps:
            res.fail({"labels": list(f.labels), "p": src.p, "eps": eps, "v": v})
    return res


def binom_tail(m_max: int = 200, p_grid=None) -> SuiteResult:
    """``P(S <= b) <= (b + 1)/(m p)`` for ``0 <= b <= floor(m p)``."""
    res = SuiteResult("binom_tail")
    if p_grid is None:
        p_grid = [0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999]
    for m in range(1, m_max + 1):
        for p in p_grid:
            src = SourceModel(m, p)
            for b in range(0, min(m, math.floor(m * p)) + 1):
                res.checked += 1
                lhs, rhs = prob_at_most(src, b), (b + 1) / (m * p)
                if lhs > rhs + SLACK:
                    res.fail({"m": m, "p": p, "b": b, "P": lhs, "bound": rhs})
    return res


def prop2(m_max: int = 64) -> SuiteResult:
    """Per-node rate ``3/2^(m/2)`` is feasible for every cut of the min function."""
    res = SuiteResult("prop2")
    for m in range(1, m_max + 1):
        for c in bounds.cutset_min_feasibility(m):
            res.checked += 1
            if not c.ok:
                res.fail({"m": m, "k": c.k, "scheme": c.scheme,
                          "required": list(c.required), "allowed": list(c.allowed)})
    crossover = next(
        (m for m in range(1, 33)
         if bounds.cutset_min_upper(m) < bounds.lower_bound_i(builtin("min", m), SourceModel(m, 0.5))),
        None,
    )
    res.details["crossover_m"] = crossover
    if crossover is None:
        res.fail({"crossover": "none for m <= 32"})
    return res


def protocol_library(m_max: int = 6):
    """Hand-built zero-error protocols paired with the functions they compute."""
    for m in range(1, m_max + 1):
        for f in builtin_functions(m):
            yield f"full-download/{f.name}", zeroerror.full_download(f), f
        yield "sequential-max", zeroerror.sequential_max(m), builtin("max", m)
        yield "sequential-min", zeroerror.sequential_min(m), builtin("min", m)
        const = build_function(m, [0] * (m + 1), name="constant")
        yield "all-null/constant", zeroerror.all_null(m, 0), const


def lemma3(m_max: int = 6, protocol=None, f=None) -> SuiteResult:
    """Transcript structure of zero-error protocols (library or a user protocol)."""
    res = SuiteResult("lemma3")
    cases = [("user", protocol, f)] if protocol is not None else protocol_library(m_max)
    analyses = []
    for name, ps, fn in cases:
        try:
            rows = zeroerror.analyze_lemma3(ps, fn)
        except RatecolError as exc:
            res.fail({"protocol": name, "m": ps.m, "error": str(exc)})
            continue
        res.checked += len(rows)
        if fn.name == "parity":
            if any(len(r.preimage) != 1 for r in rows) or zeroerror.worst_case_rate(ps) < fn.m:
                res.fail({"protocol": name, "m": ps.m, "error": "parity preimage not a singleton"})
        if protocol is not None:
            analyses = [r.to_dict() for r in rows]
    if protocol is not None:
        res.details["worst_case_rate"] = zeroerror.worst_case_rate(protocol)
        res.details["transcripts"] = analyses
    return res


def case2(n: int = 200, m_max: int = 32, seed: int = 4) -> SuiteResult:
    """At ``p = 1/2``: ``rho <= lower_i`` and ``upper_iii <= 2 rho``."""
    res = SuiteResult("case2")
    rng = np.random.default_rng(seed)
    for _ in range(n):
        m = int(rng.integers(2, m_max + 1))
        f = random_function(rng, m)
        src = SourceModel(m, 0.5)
        r = bounds.rho(f)
        lo, up = bounds.lower_bound_i(f, src), bounds.upper_bound_iii(f, src)
        res.checked += 1
        if r > lo + SLACK or up > 2 * r + SLACK:
            res.fail({"labels": list(f.labels), "rho": r, "lower_i": lo, "upper_iii": up})
    return res


def achievability(m_max: int = 24, p_grid=(0.1, 0.25, 0.5, 0.75, 0.9), tol: float = 1e-9) -> SuiteResult:
    """``lower_ii <= lower_i <= exact_rate <= upper_iii`` for every builtin."""
    res = SuiteResult("achievability")
    for m in range(1, m_max + 1):
        for f in builtin_functions(m):
            for p in p_grid:
                src = SourceModel(m, p)
                lo1 = bounds.lower_bound_i(f, src)
                lo2, _ = bounds.lower_bound_ii(f, src)
                rate = stopping.exact_rate(f, src)
                up = bounds.upper_bound_iii(f, src)
                res.checked += 1
                if not (lo2 <= lo1 + tol and lo1 <= rate + tol and rate <= up + tol):
                    res.fail({"function": f.name, "m": m, "p": p, "lower_ii": lo2,
                              "lower_i": lo1, "exact_rate": rate, "upper_iii": up})
    return res


SUITES = ("rectangles", "lemma4", "lemma5", "fact1", "binom_tail", "prop2", "lemma3",
          "case2", "achievability")


def run_suite(name: str, quick: bool = False, m: int | None = None, protocol=None, f=None) -> SuiteResult:
    if name == "rectangles":
        m_max = m if m is not None else (6 if quick else 8)
        return rectangles(m_max, 10 if quick else 50)
    if name == "lemma4":
        return lemma4(1_000 if quick else 10_000)
    if name == "lemma5":
        return lemma5(100 if quick else 1_000, m if m is not None else 64)
    if name == "fact1":
        return fact1(100 if quick else 500)
    if name == "binom_tail":
        return binom_tail(m if m is not None else (50 if quick else 200))
    if name == "prop2":
        return prop2(m if m is not None else 64)
    if name == "lemma3":
        return lemma3(m if m is not None else (4 if quick else 6), protocol, f)
    if name == "case2":
        return case2(50 if quick else 200)
    if name == "achievability":
        return achievability(m if m is not None else (12 if quick else 24))
    raise ValueError(f"unknown suite {name!r}")


def run_suites(names, quick: bool = False, **kwargs) -> dict:
    return {name: run_suite(name, quick, **kwargs) for name in names}
