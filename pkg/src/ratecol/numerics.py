"""Binomial and entropy primitives.

All probability mass work happens in log space, using the saddle-point
expansion of the binomial density so that values stay accurate to a few ulps
for ``m`` in the thousands. Entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exceptions import InputError

_ENDPOINT_CLAMP = 1e-15


@dataclass(frozen=True)
class SourceModel:
    """``m`` independent Bernoulli sources.

    ``p`` is either one probability shared by all nodes or a sequence of
    per-node probabilities. Bound formulas need the homogeneous case; use
    :meth:`require_homogeneous` to get the shared ``p``.
    """

    m: int
    p: float | tuple

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InputError(f"m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if isinstance(self.p, (Sequence, np.ndarray)):
            probs = tuple(float(q) for q in self.p)
            if len(probs) != self.m:
                raise InputError(f"expected {self.m} per-node probabilities, got {len(probs)}")
            if len(set(probs)) == 1:
                probs = probs[0]
        else:
            probs = float(self.p)
        for q in (probs if isinstance(probs, tuple) else (probs,)):
            if not 0.0 < q < 1.0:
                raise InputError(f"Bernoulli parameter must lie strictly in (0, 1), got {q}")
        object.__setattr__(self, "p", probs)

    @property
    def is_homogeneous(self) -> bool:
        return not isinstance(self.p, tuple)

    @property
    def probs(self) -> tuple:
        return self.p if isinstance(self.p, tuple) else (self.p,) * self.m

    def require_homogeneous(self) -> float:
        if not self.is_homogeneous:
            raise InputError("this computation requires identically distributed sources (one p)")
        return self.p

    @property
    def mean(self) -> float:
        return math.fsum(self.probs)


def binary_entropy(x: float) -> float:
    """``h(x) = -x log2 x - (1-x) log2 (1-x)``, with ``h(0) = h(1) = 0``."""
    if not 0.0 <= x <= 1.0:
        raise InputError(f"binary_entropy argument must lie in [0, 1], got {x}")
    if x <= _ENDPOINT_CLAMP or x >= 1.0 - _ENDPOINT_CLAMP:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x))


def entropy(pmf) -> float:
    """Shannon entropy in bits of a probability vector (zeros allowed)."""
    pmf = np.asarray(pmf, dtype=float).ravel()
    if np.any(pmf < 0):
        raise InputError("probabilities must be nonnegative")
    nz = pmf[pmf > 0]
    return float(-math.fsum(nz * np.log2(nz)))


# stirlerr(n) = log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 0..15
_STIRLERR = (
    0.0,
    0.08106146679532726,
    0.0413406959554093,
    0.02767792568499834,
    0.020790672103765093,
    0.016644691189821193,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.009255462182712733,
    0.00833056343336287,
    0.007573675487951841,
    0.00694284010720953,
    0.006408994188004207,
    0.0059513701127588475,
    0.005554733551962801,
)
_LOG_2PI = math.log(2.0 * math.pi)


def _stirlerr(n: int) -> float:
    if n <= 15:
        return _STIRLERR[n]
    nn = float(n) * n
    if n > 500:
        return (1 / 12 - 1 / 360 / nn) / n
    if n > 80:
        return (1 / 12 - (1 / 360 - 1 / 1260 / nn) / nn) / n
    if n > 35:
        return (1 / 12 - (1 / 360 - (1 / 1260 - 1 / 1680 / nn) / nn) / nn) / n
    return (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - 1 / 1188 / nn) / nn) / nn) / nn) / n


def _bd0(x: float, mu: float) -> float:
    """Deviance term ``x log(x/mu) + mu - x`` without cancellation."""
    if abs(x - mu) < 0.1 * (x + mu):
        v = (x - mu) / (x + mu)
        total = (x - mu) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            nxt = total + ej / (2 * j + 1)
            if nxt == total:
                return nxt
            total = nxt
            j += 1
    return x * math.log(x / mu) + mu - x


def _log_pmf(m: int, p: float, s: int) -> float:
    # saddle-point form (Loader 2000); lgamma differences lose ~1e-11 at m = 1e4
    if s == 0:
        return m * math.log1p(-p)
    if s == m:
        return m * math.log(p)
    q = 1.0 - p
    lc = (
        _stirlerr(m)
        - _stirlerr(s)
        - _stirlerr(m - s)
        - _bd0(float(s), m * p)
        - _bd0(float(m - s), m * q)
    )
    lf = _LOG_2PI + math.log(s) + math.log1p(-s / m)
    return lc - 0.5 * lf


def binom_log_pmf(src: SourceModel, s: int) -> float:
    """Natural log of ``P(S = s)`` for ``S ~ Binomial(m, p)``."""
    p = src.require_homogeneous()
    if not 0 <= s <= src.m:
        raise InputError(f"s={s} outside [0, {src.m}]")
    return _log_pmf(src.m, p, s)


@lru_cache(maxsize=256)
def _log_pmf_table(m: int, p: float) -> np.ndarray:
    out = np.array([_log_pmf(m, p, s) for s in range(m + 1)])
    out.setflags(write=False)
    return out


def log_pmf_table(src: SourceModel) -> np.ndarray:
    """Vector of ``log P(S = s)`` for ``s = 0..m`` (read-only)."""
    return _log_pmf_table(src.m, src.require_homogeneous())


def pmf_table(src: SourceModel) -> np.ndarray:
    return np.exp(log_pmf_table(src))


def _check_interval(src: SourceModel, a: int, b: int):
    if not (0 <= a <= b <= src.m):
        raise InputError(f"need 0 <= a <= b <= m, got a={a}, b={b}, m={src.m}")


def prob_interval(src: SourceModel, a: int, b: int) -> float:
    """``P(a <= S <= b)``; the sum is exactly rounded (``math.fsum``)."""
    _check_interval(src, a, b)
    if a == 0 and b == src.m:
        return 1.0
    terms = np.exp(log_pmf_table(src)[a : b + 1])
    return min(1.0, math.fsum(terms))


def prob_at_most(src: SourceModel, b: int) -> float:
    """``P(S <= b)``, with ``P(S <= -1) = 0``."""
    if b < 0:
        return 0.0
    return prob_interval(src, 0, min(b, src.m))


def prob_greater(src: SourceModel, b: int) -> float:
    """``P(S > b)``, computed from the upper tail directly."""
    if b >= src.m:
        return 0.0
    return prob_interval(src, max(b + 1, 0), src.m)


def cond_mean_interval(src: SourceModel, a: int, b: int) -> float:
    """``E(S | a <= S <= b)``, clamped to ``[a, b]``.

    Weights are renormalised against the interval's largest log-mass, so the
    result stays well defined even when every term underflows.
    """
    _check_interval(src, a, b)
    if a == b:
        return float(a)
    logw = log_pmf_table(src)[a : b + 1]
    w = np.exp(logw - logw.max())
    s = np.arange(a, b + 1)
    mean = math.fsum(s * w) / math.fsum(w)
    return min(max(mean, float(a)), float(b))
