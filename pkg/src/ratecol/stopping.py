"""One-round stopping-time scheme: nodes broadcast raw bits until the answer is fixed.

Nodes speak in order 1..m. After each broadcast the sink knows ``n1`` ones and
``n0`` zeros; once some interval ``[a_v, b_v]`` satisfies ``n1 >= a_v`` and
``n0 >= m - b_v`` the sum is pinned inside it and the remaining nodes stay
silent. ``K`` is the number of bits actually sent, so the scheme's rate is
``E(K) h(p)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import InputError
from .numerics import SourceModel, binary_entropy, log_pmf_table
from .symfunc import IntervalDecomposition, decompose_intervals, locate_interval

#: Trials per RNG block; trial ``t`` lives in block ``t // BLOCK``.
BLOCK = 1 << 14
#: Truncation factor for the unbounded negative-binomial trials.
TRUNCATION_FACTOR = 64
MAX_TRUNCATED_FRACTION = 1e-4


def worker_count() -> int:
    env = os.environ.get("RATECOL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"RATECOL_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


class StoppingRule:
    """Upward-closed set of ``(n1, n0)`` count pairs at which the scheme halts."""

    def __init__(self, d: IntervalDecomposition):
        self.decomposition = d
        self.m = d.m
        # stopped(n1, n0) iff n1 >= a of the interval holding m - n0: that
        # interval has the smallest a among those with b >= m - n0.
        self._need_ones = np.array(
            [d[locate_interval(d, self.m - n0)].a for n0 in range(self.m + 1)], dtype=np.int64
        )

    @classmethod
    def from_function(cls, f) -> "StoppingRule":
        return cls(decompose_intervals(f))

    def stopped(self, n1: int, n0: int) -> bool:
        if n1 < 0 or n0 < 0 or n1 + n0 > self.m:
            raise InputError(f"counts ({n1}, {n0}) not reachable with m={self.m}")
        return bool(n1 >= self._need_ones[n0])

    def table(self) -> np.ndarray:
        """Boolean ``(m+1, m+1)`` array ``T[n1, n0]``; unreachable cells are True."""
        n1 = np.arange(self.m + 1)[:, None]
        return n1 >= self._need_ones[None, :]

    def interval_for(self, n1: int, n0: int) -> int | None:
        """1-based interval the sum is pinned to, or None if not yet stopped."""
        if not self.stopped(n1, n0):
            return None
        return locate_interval(self.decomposition, self.m - n0)


def exact_expected_k(f, src: SourceModel) -> float:
    """``E(K) = sum_{k<m} P(K > k)`` via binomial counts after ``k`` broadcasts.

    Because the stopped set is upward-closed and counts only grow, "not yet
    stopped after k bits" is the same event as "state after k bits is
    outside the stopped set".
    """
    rule = f if isinstance(f, StoppingRule) else StoppingRule.from_function(f)
    if src.m != rule.m:
        raise InputError(f"function has m={rule.m} but source model has m={src.m}")
    p = src.require_homogeneous()
    need = rule._need_ones
    tails = []
    for k in range(rule.m):
        j = np.arange(k + 1)
        running = j < need[k - j]
        if not running.any():
            continue
        logp = log_pmf_table(SourceModel(k, p))[running] if k > 0 else np.zeros(1)
        tails.append(math.fsum(np.exp(logp)))
    return math.fsum(tails)


def exact_rate(f, src: SourceModel) -> float:
    """Rate ``E(K) h(p)`` of the stopping-time scheme, bits per sample."""
    return exact_expected_k(f, src) * binary_entropy(src.require_homogeneous())


@dataclass(frozen=True)
class SimResult:
    trials: int
    mean_K: float
    stderr_K: float
    rate_estimate: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _block_rng(seed: int, block: int, tag: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(tag, block))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_block(need: np.ndarray, probs: np.ndarray, seed: int, block: int, n: int) -> np.ndarray:
    m = len(probs)
    rng = _block_rng(seed, block)
    bits = rng.random((n, m)) < probs[None, :]
    ones = np.zeros((n, m + 1), dtype=np.int64)
    np.cumsum(bits, axis=1, out=ones[:, 1:])
    zeros = np.arange(m + 1)[None, :] - ones
    stopped = ones >= need[zeros]
    return stopped.argmax(axis=1)


def simulate_k(f, src: SourceModel, trials: int, seed: int, workers: int | None = None) -> np.ndarray:
    """Per-trial stopping times, in trial order.

    Each block of trials draws from its own Philox stream keyed by
    ``(seed, block)``, so the output is independent of ``workers``.
    Heterogeneous per-node probabilities are supported here.
    """
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise InputError(f"trials must be a positive integer, got {trials!r}")
    rule = f if isinstance(f, StoppingRule) else StoppingRule.from_function(f)
    if src.m != rule.m:
        raise InputError(f"function has m={rule.m} but source model has m={src.m}")
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    probs = np.asarray(src.probs, dtype=float)
    sizes = [min(BLOCK, trials - start) for start in range(0, trials, BLOCK)]
    workers = workers or worker_count()
    jobs = [(rule._need_ones, probs, seed, b, n) for b, n in enumerate(sizes)]
    if workers == 1 or len(jobs) == 1:
        parts = [_simulate_block(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _simulate_block(*job), jobs))
    return np.concatenate(parts)


def _summarize(ks: np.ndarray) -> tuple[float, float]:
    # integer moments keep the reduction exact and order independent
    n = len(ks)
    total = int(ks.sum(dtype=np.int64))
    sq = int((ks.astype(np.int64) ** 2).sum())
    mean = total / n
    if n < 2:
        return mean, 0.0
    var = (n * sq - total * total) / (n * (n - 1))
    return mean, math.sqrt(max(var, 0.0) / n)


def simulate(f, src: SourceModel, trials: int, seed: int, workers: int | None = None) -> SimResult:
    """Monte-Carlo estimate of ``E(K)`` and of the scheme's rate."""
    h = binary_entropy(src.require_homogeneous())
    ks = simulate_k(f, src, trials, seed, workers)
    mean, stderr = _summarize(ks)
    return SimResult(int(trials), mean, stderr, mean * h, int(seed) & 0xFFFFFFFFFFFFFFFF)


def expected_k_prime(ones: int, zeros: int, p: float, tol: float = 1e-16) -> float:
    """Mean number of unbounded Bernoulli(p) trials until ``ones`` ones and ``zeros`` zeros.

    Tail sum of ``P(K' > k) = 1 - P(ones <= Bin(k, p) <= k - zeros)``.
    """
    if ones == 0 and zeros == 0:
        return 0.0
    total = []
    k = 0
    while True:
        lo, hi = ones, k - zeros
        if lo <= hi:
            # k >= 1 here since ones + zeros >= 1
            pmf = np.exp(log_pmf_table(SourceModel(k, p)))
            tail = math.fsum(pmf[:lo]) + math.fsum(pmf[hi + 1 :])
        else:
            tail = 1.0
        total.append(tail)
        if k >= ones + zeros and tail < tol:
            break
        k += 1
    return math.fsum(total)


def _kprime_block(ones, zeros, p, limit, seed, tag, block, n):
    rng = _block_rng(seed, block, tag)
    out = np.full(n, limit, dtype=np.int64)
    running = np.arange(n)
    c1 = np.zeros(n, dtype=np.int64)
    c0 = np.zeros(n, dtype=np.int64)
    step = 0
    chunk = 64
    while running.size and step < limit:
        width = min(chunk, limit - step)
        bits = rng.random((running.size, width)) < p
        k1 = c1[running, None] + np.cumsum(bits, axis=1)
        k0 = c0[running, None] + np.cumsum(~bits, axis=1)
        hit = (k1 >= ones) & (k0 >= zeros)
        done = hit.any(axis=1)
        out[running[done]] = step + hit[done].argmax(axis=1) + 1
        c1[running] = k1[:, -1]
        c0[running] = k0[:, -1]
        running = running[~done]
        step += width
    return out, running.size


def negbinom_bound_check(f, src: SourceModel, trials: int, seed: int) -> list[dict]:
    """Per-interval Monte-Carlo check of ``E(K'_v) <= a_v/p + (m-b_v)/(1-p)``.

    ``K'_v`` counts unbounded trials until ``a_v`` ones and ``m - b_v`` zeros
    have appeared. Each trial is cut at ``64 x`` the bound; a run fails if more
    than 0.01% of its trials hit that cut.
    """
    if trials < 1:
        raise InputError(f"trials must be positive, got {trials}")
    d = decompose_intervals(f) if not isinstance(f, IntervalDecomposition) else f
    if src.m != d.m:
        raise InputError(f"function has m={d.m} but source model has m={src.m}")
    p = src.require_homogeneous()
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    rows = []
    for v, iv in enumerate(d, start=1):
        ones, zeros = iv.a, src.m - iv.b
        bound = ones / p + zeros / (1.0 - p)
        row = {"v": v, "a": iv.a, "b": iv.b, "bound": bound,
               "exact": expected_k_prime(ones, zeros, p)}
        if ones == 0 and zeros == 0:
            row.update(estimate=0.0, stderr=0.0, truncated=0, passed=True)
            rows.append(row)
            continue
        limit = int(math.ceil(TRUNCATION_FACTOR * bound))
        parts, truncated = [], 0
        for b, start in enumerate(range(0, trials, BLOCK)):
            ks, cut = _kprime_block(ones, zeros, p, limit, seed, v, b, min(BLOCK, trials - start))
            parts.append(ks)
            truncated += cut
        mean, stderr = _summarize(np.concatenate(parts))
        row.update(
            estimate=mean,
            stderr=stderr,
            truncated=truncated,
            passed=bool(mean <= bound + 4.0 * stderr and truncated <= MAX_TRUNCATED_FRACTION * trials),
        )
        rows.append(row)
    return rows
