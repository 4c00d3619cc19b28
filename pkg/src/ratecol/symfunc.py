"""Symmetric functions of binary sources and their interval structure.

A symmetric function ``f`` of ``m`` bits depends only on the number of ones
``s = x_1 + ... + x_m``, so it is stored as its reduced table ``labels[s]``.
Labels are opaque: the only operation ever applied to them is ``==``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Hashable, Iterator, NamedTuple, Sequence

import numpy as np

from .exceptions import InputError, ResourceLimitError

#: Default cap for the exhaustive rectangle oracle (3**12 rectangles).
RECTANGLE_CAP = 12

BUILTIN_NAMES = ("parity", "sum", "max", "min", "majority", "threshold")


@dataclass(frozen=True)
class SymmetricFunction:
    """Reduced table of a symmetric Boolean-input function.

    ``labels[s]`` is the function value on any input with ``s`` ones.
    """

    m: int
    labels: tuple
    name: str | None = None

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or isinstance(self.m, bool) or self.m < 1:
            raise InputError(f"m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != self.m + 1:
            raise InputError(
                f"labels must have m+1={self.m + 1} entries, got {len(self.labels)}"
            )

    def __call__(self, x: Sequence[int]) -> Hashable:
        """Evaluate on a full input vector ``x`` of ``m`` bits."""
        if len(x) != self.m:
            raise InputError(f"expected {self.m} bits, got {len(x)}")
        return self.labels[int(sum(x))]

    def reduced(self, s: int) -> Hashable:
        if not 0 <= s <= self.m:
            raise InputError(f"sum {s} outside [0, {self.m}]")
        return self.labels[s]

    def to_dict(self) -> dict:
        return {"m": self.m, "labels": list(self.labels)}


class Interval(NamedTuple):
    a: int
    b: int
    label: Any

    @property
    def width(self) -> int:
        return self.b - self.a

    def __contains__(self, s) -> bool:
        return self.a <= s <= self.b


@dataclass(frozen=True)
class IntervalDecomposition:
    """Ordered partition of ``[0, m]`` into maximal monochromatic intervals.

    Interval indices are 1-based to match the usual ``v = 1..v_max`` numbering.
    """

    m: int
    intervals: tuple

    def __post_init__(self):
        ivs = tuple(Interval(int(a), int(b), lab) for a, b, lab in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        if not ivs or ivs[0].a != 0 or ivs[-1].b != self.m:
            raise InputError("intervals must cover [0, m]")
        for prev, cur in zip(ivs, ivs[1:]):
            if cur.a != prev.b + 1:
                raise InputError(f"intervals {prev} and {cur} are not adjacent")
        for iv in ivs:
            if iv.a > iv.b:
                raise InputError(f"empty interval {iv}")

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __getitem__(self, v: int) -> Interval:
        """Return interval number ``v`` (1-based)."""
        if not 1 <= v <= len(self.intervals):
            raise InputError(f"interval index {v} outside [1, {len(self.intervals)}]")
        return self.intervals[v - 1]

    @property
    def v_max(self) -> int:
        return len(self.intervals)

    def endpoints(self) -> list[tuple[int, int]]:
        return [(iv.a, iv.b) for iv in self.intervals]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "intervals": [{"a": iv.a, "b": iv.b, "label": iv.label} for iv in self.intervals],
        }


@dataclass(frozen=True)
class Rectangle:
    """Product set ``S_1 x ... x S_m`` with each ``S_i`` one of {0}, {1}, {0,1}."""

    sets: tuple

    def __post_init__(self):
        sets = tuple(frozenset(S) for S in self.sets)
        for S in sets:
            if not S or not S <= {0, 1}:
                raise InputError(f"per-node set must be a nonempty subset of {{0,1}}, got {set(S)}")
        object.__setattr__(self, "sets", sets)

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def forced_ones(self) -> frozenset:
        """1-based indices of nodes fixed to 1."""
        return frozenset(i + 1 for i, S in enumerate(self.sets) if S == {1})

    @property
    def forced_zeros(self) -> frozenset:
        """1-based indices of nodes fixed to 0."""
        return frozenset(i + 1 for i, S in enumerate(self.sets) if S == {0})

    @property
    def alpha(self) -> int:
        return len(self.forced_ones)

    @property
    def beta(self) -> int:
        return self.m - len(self.forced_zeros)

    def points(self) -> Iterator[tuple]:
        return itertools.product(*(sorted(S) for S in self.sets))

    def __contains__(self, x) -> bool:
        return len(x) == self.m and all(xi in S for xi, S in zip(x, self.sets))

    @classmethod
    def from_points(cls, points) -> "Rectangle | None":
        """Smallest rectangle containing ``points``, or None if they do not fill it."""
        points = {tuple(x) for x in points}
        if not points:
            raise InputError("empty point set")
        m = len(next(iter(points)))
        sets = [frozenset(x[i] for x in points) for i in range(m)]
        size = 1
        for S in sets:
            size *= len(S)
        return cls(tuple(sets)) if size == len(points) else None


def build_function(m: int, labels: Sequence[Hashable], name: str | None = None) -> SymmetricFunction:
    """Wrap a reduced table; ``labels`` must have exactly ``m + 1`` entries."""
    return SymmetricFunction(m, tuple(labels), name)


def builtin(name: str, m: int, theta: int | None = None) -> SymmetricFunction:
    """Reduced table of a named function.

    ``majority`` is ``1{s > m/2}`` (ties go to 0) and ``threshold`` is
    ``1{s >= theta}``.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InputError(f"m must be a positive integer, got {m!r}")
    m = int(m)
    if name == "parity":
        labels = [s % 2 for s in range(m + 1)]
    elif name == "sum":
        labels = list(range(m + 1))
    elif name == "max":
        labels = [int(s >= 1) for s in range(m + 1)]
    elif name == "min":
        labels = [int(s == m) for s in range(m + 1)]
    elif name == "majority":
        labels = [int(2 * s > m) for s in range(m + 1)]
    elif name == "threshold":
        if theta is None or not 0 <= theta <= m:
            raise InputError(f"threshold needs 0 <= theta <= m, got theta={theta!r}")
        labels = [int(s >= theta) for s in range(m + 1)]
        name = f"threshold({theta})"
    else:
        raise InputError(f"unknown builtin function {name!r}; expected one of {BUILTIN_NAMES}")
    return SymmetricFunction(m, tuple(labels), name)


def decompose_intervals(f: SymmetricFunction) -> IntervalDecomposition:
    """Split ``[0, m]`` into maximal runs of equal reduced labels."""
    intervals = []
    start = 0
    for s in range(1, f.m + 1):
        if f.labels[s] != f.labels[start]:
            intervals.append((start, s - 1, f.labels[start]))
            start = s
    intervals.append((start, f.m, f.labels[start]))
    return IntervalDecomposition(f.m, tuple(intervals))


def locate_interval(d: IntervalDecomposition, s: int) -> int:
    """1-based index of the interval containing sum ``s``."""
    if not 0 <= s <= d.m:
        raise InputError(f"sum {s} outside [0, {d.m}]")
    lo, hi = 0, len(d.intervals) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if d.intervals[mid].b < s:
            lo = mid + 1
        else:
            hi = mid
    return lo + 1


def project_rectangle(r: Rectangle) -> tuple[int, int]:
    """Range ``(alpha, beta)`` of the sum over the rectangle."""
    return r.alpha, r.beta


_CODE_TO_SET = (frozenset({0}), frozenset({1}), frozenset({0, 1}))


def _label_masks(f: SymmetricFunction, max_m: int) -> np.ndarray:
    """Bitmask of labels attained on every rectangle, indexed by ternary code.

    Axis ``i`` has entries 0 -> {0}, 1 -> {1}, 2 -> {0,1}. Built from the
    point values alone: the mask of a rectangle is the OR over its points.
    """
    if f.m > max_m:
        raise ResourceLimitError(
            f"rectangle enumeration for m={f.m} exceeds cap {max_m} (3**m rectangles)"
        )
    distinct = []
    for lab in f.labels:
        if lab not in distinct:
            distinct.append(lab)
    if len(distinct) > 63:
        raise ResourceLimitError("more than 63 distinct labels")
    point_mask = np.zeros((2,) * f.m, dtype=np.int64)
    for x in itertools.product((0, 1), repeat=f.m):
        point_mask[x] = 1 << distinct.index(f(x))
    masks = point_mask
    for axis in range(f.m):
        zero = np.take(masks, [0], axis=axis)
        one = np.take(masks, [1], axis=axis)
        masks = np.concatenate([zero, one, zero | one], axis=axis)
    return masks


def enumerate_monochromatic_rectangles(
    f: SymmetricFunction, max_m: int = RECTANGLE_CAP
) -> list[Rectangle]:
    """Every rectangle on which ``f`` is constant, by exhaustive search.

    Output order is lexicographic in the per-coordinate order {0} < {1} < {0,1}.
    """
    masks = _label_masks(f, max_m).ravel()
    mono = (masks & (masks - 1)) == 0
    out = []
    for code, ok in zip(itertools.product(range(3), repeat=f.m), mono):
        if ok:
            out.append(Rectangle(tuple(_CODE_TO_SET[c] for c in code)))
    return out


def enumerate_rectangles(m: int, max_m: int = RECTANGLE_CAP) -> Iterator[Rectangle]:
    """All ``3**m`` rectangles in canonical order."""
    if m > max_m:
        raise ResourceLimitError(f"m={m} exceeds rectangle cap {max_m}")
    for code in itertools.product(range(3), repeat=m):
        yield Rectangle(tuple(_CODE_TO_SET[c] for c in code))


def is_monochromatic(f: SymmetricFunction, r: Rectangle) -> bool:
    """Check constancy of ``f`` on ``r`` point by point."""
    it = r.points()
    first = f(next(it))
    return all(f(x) == first for x in it)


def is_type_threshold_instance(f: SymmetricFunction, theta1: int, theta0: int) -> bool:
    """True iff the reduced table is constant on ``[theta1, m - theta0]``."""
    if theta0 < 0 or theta1 < 0:
        raise InputError("thresholds must be nonnegative")
    if theta0 + theta1 > f.m:
        raise InputError(f"theta0 + theta1 = {theta0 + theta1} exceeds m = {f.m}")
    seg = f.labels[theta1 : f.m - theta0 + 1]
    return all(lab == seg[0] for lab in seg)


def is_type_sensitive_instance(f: SymmetricFunction, gamma: float, m_bar: int) -> bool:
    """True iff every maximal interval has width ``b - a < gamma * m_bar``.

    Only meaningful for ``m > m_bar``; classifying a whole family is left to
    the caller.
    """
    if not 0 < gamma < 1:
        raise InputError(f"gamma must lie in (0, 1), got {gamma}")
    if m_bar < 1:
        raise InputError(f"m_bar must be a positive integer, got {m_bar}")
    if f.m <= m_bar:
        raise InputError(f"predicate only constrains m > m_bar; got m={f.m}, m_bar={m_bar}")
    return all(iv.width < gamma * m_bar for iv in decompose_intervals(f))


def function_from_spec(spec: dict) -> SymmetricFunction:
    """Build a function from its JSON form.

    Accepts ``{"m", "labels"}``, ``{"builtin", "m"}`` or
    ``{"builtin": "threshold", "m", "theta"}``.
    """
    if not isinstance(spec, dict) or "m" not in spec:
        raise InputError("function spec must be an object with an 'm' field")
    if "builtin" in spec:
        return builtin(spec["builtin"], spec["m"], spec.get("theta"))
    if "labels" in spec:
        return build_function(spec["m"], spec["labels"])
    raise InputError("function spec needs either 'labels' or 'builtin'")
