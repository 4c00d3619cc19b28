"""Closed-form sum-rate bounds for symmetric functions of iid binary sources.

Every bound is driven by the maximal monochromatic intervals ``[a_v, b_v]``
of the function and the binomial law of ``S = X_1 + ... + X_m``. All values
are in bits per source sample.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .exceptions import ConsistencyError, InputError
from .numerics import (
    SourceModel,
    binary_entropy,
    cond_mean_interval,
    prob_at_most,
    prob_greater,
    prob_interval,
)
from .symfunc import IntervalDecomposition, SymmetricFunction, decompose_intervals

HALF_TOL = 1e-15


def _intervals(f, src: SourceModel | None = None) -> IntervalDecomposition:
    d = f if isinstance(f, IntervalDecomposition) else decompose_intervals(f)
    if src is not None:
        if src.m != d.m:
            raise InputError(f"function has m={d.m} but source model has m={src.m}")
        src.require_homogeneous()
    return d


def interval_entropy_sum(f, src: SourceModel) -> float:
    """Residual-uncertainty term subtracted from ``m h(p)`` in the first lower bound.

    Sums ``(b-a) h((E(S|S in [a,b]) - a)/(b-a)) P(S in [a,b])`` over the
    non-singleton intervals. ``f`` may be a function or a decomposition.
    """
    d = _intervals(f, src)
    terms = []
    for iv in d:
        if iv.a == iv.b:
            continue
        width = iv.b - iv.a
        frac = (cond_mean_interval(src, iv.a, iv.b) - iv.a) / width
        frac = min(max(frac, 0.0), 1.0)
        terms.append(width * binary_entropy(frac) * prob_interval(src, iv.a, iv.b))
    return math.fsum(terms)


def download_baseline(src: SourceModel) -> float:
    """Rate of reproducing every source sample at the sink, ``m h(p)``."""
    return src.m * binary_entropy(src.require_homogeneous())


def lower_bound_i(f, src: SourceModel) -> float:
    """``m h(p)`` minus the interval entropy sum. Accepts a decomposition too."""
    d = _intervals(f, src)
    value = download_baseline(src) - interval_entropy_sum(d, src)
    if value < -1e-9:
        raise ConsistencyError(f"first lower bound is negative ({value})")
    return max(0.0, value)


def split_products(f, src: SourceModel) -> list[float]:
    """``P(S <= b_v) P(S > b_v)`` for each interval ``v``."""
    d = _intervals(f, src)
    return [prob_at_most(src, iv.b) * prob_greater(src, iv.b) for iv in d]


def lower_bound_ii(f, src: SourceModel) -> tuple[float, int]:
    """Relaxed lower bound ``m h(p) max_v P(S<=b_v)P(S>b_v)`` and its argmax.

    The argmax index is 1-based; ties go to the smallest index.
    """
    products = split_products(f, src)
    best = max(range(len(products)), key=lambda i: (products[i], -i))
    return download_baseline(src) * products[best], best + 1


def upper_bound_iii(f, src: SourceModel) -> float:
    """Upper bound realised by the stopping-time scheme's negative-binomial relaxation."""
    d = _intervals(f, src)
    p = src.p
    terms = [
        (iv.a / p + (src.m - iv.b) / (1.0 - p)) * prob_interval(src, iv.a, iv.b)
        for iv in d
    ]
    return binary_entropy(p) * math.fsum(terms)


def rho(f) -> float:
    """``m - sum_v (b_v - a_v) P(S in [a_v, b_v])`` at ``p = 1/2``.

    At ``p = 1/2`` the optimal sum-rate lies in ``[rho, 2 rho]``.
    """
    d = _intervals(f)
    src = SourceModel(d.m, 0.5)
    return d.m - math.fsum(iv.width * prob_interval(src, iv.a, iv.b) for iv in d)


def fact1_witness(f, src: SourceModel, eps: float) -> int | None:
    """Interval that carries almost all the mass when every split is lopsided.

    If ``max_v P(S<=b_v)P(S>b_v) < eps(1-eps)``, returns the smallest ``v``
    with ``P(S <= b_v) > 1 - eps``; that interval then has probability
    above ``1 - 2 eps``. Returns None when the hypothesis fails.
    """
    if not 0.0 < eps < 0.5:
        raise InputError(f"eps must lie in (0, 1/2), got {eps}")
    d = _intervals(f, src)
    if max(split_products(d, src)) >= eps * (1.0 - eps):
        return None
    for v, iv in enumerate(d, start=1):
        if prob_at_most(src, iv.b) > 1.0 - eps:
            if not prob_interval(src, iv.a, iv.b) > 1.0 - 2.0 * eps:
                raise ConsistencyError(
                    f"interval {v} has mass {prob_interval(src, iv.a, iv.b)} <= 1 - 2*eps"
                )
            return v
    raise ConsistencyError("no interval reaches cumulative mass 1 - eps")


def combine_adjacent(d: IntervalDecomposition, v: int) -> IntervalDecomposition:
    """Merge intervals ``v`` and ``v + 1`` (1-based); the merged label is ``v``'s."""
    if not 1 <= v < d.v_max:
        raise InputError(f"need 1 <= v < v_max={d.v_max}, got {v}")
    left, right = d.intervals[v - 1], d.intervals[v]
    merged = (left.a, right.b, left.label)
    ivs = d.intervals[: v - 1] + (merged,) + d.intervals[v + 1 :]
    return IntervalDecomposition(d.m, ivs)


def cutset_parity_lower(m: int) -> float:
    """Cut-set lower bound for parity of uniform bits: one bit per node."""
    if m < 1:
        raise InputError(f"m must be positive, got {m}")
    return float(m)


@dataclass(frozen=True)
class CutCheck:
    k: int
    scheme: str
    required: tuple
    allowed: tuple

    @property
    def ok(self) -> bool:
        return all(r <= a for r, a in zip(self.required, self.allowed))


def cutset_min_feasibility(m: int) -> list[CutCheck]:
    """Check the per-node rate ``3/2^(m/2)`` against both two-terminal schemes.

    For every cut size ``k``: supernode rate ``3k/2^(m/2)`` and complement
    rate ``3(m-k)/2^(m/2)`` must dominate the entropy the chosen scheme needs.
    """
    if m < 1:
        raise InputError(f"m must be positive, got {m}")
    unit = 3.0 / 2.0 ** (m / 2.0)
    checks = []
    for k in range(m + 1):
        if k >= m / 2:
            # supernode sends its running minimum once
            checks.append(CutCheck(k, "one-message", (binary_entropy(2.0**-k),), (k * unit,)))
        else:
            # complement sends its minimum, supernode replies conditionally
            reply = 2.0 ** -(m - k) * binary_entropy(2.0**-k) if k > 0 else 0.0
            checks.append(
                CutCheck(
                    k,
                    "two-message",
                    (reply, binary_entropy(2.0 ** -(m - k))),
                    (k * unit, (m - k) * unit),
                )
            )
    return checks


def cutset_min_upper(m: int) -> float:
    """Cut-set upper bound ``3m / 2^(m/2)`` for the minimum of uniform bits.

    The feasibility argument behind it is re-verified on every call.
    """
    bad = [c for c in cutset_min_feasibility(m) if not c.ok]
    if bad:
        raise ConsistencyError(f"cut-set feasibility fails for m={m} at cut sizes {[c.k for c in bad]}")
    return 3.0 * m / 2.0 ** (m / 2.0)


@dataclass(frozen=True)
class BoundReport:
    lower_i: float
    lower_ii: float
    upper_iii: float
    rho: float | None
    download_baseline: float
    argmax_v_ii: int
    fact1_gap: float

    def to_dict(self) -> dict:
        return asdict(self)


def report(f: SymmetricFunction, src: SourceModel) -> BoundReport:
    d = _intervals(f, src)
    lower_ii, argmax = lower_bound_ii(d, src)
    return BoundReport(
        lower_i=lower_bound_i(d, src),
        lower_ii=lower_ii,
        upper_iii=upper_bound_iii(d, src),
        rho=rho(d) if abs(src.p - 0.5) < HALF_TOL else None,
        download_baseline=download_baseline(src),
        argmax_v_ii=argmax,
        fact1_gap=max(split_products(d, src)),
    )
