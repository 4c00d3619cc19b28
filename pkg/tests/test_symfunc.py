import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratecol.exceptions import InputError, ResourceLimitError
from ratecol.symfunc import (
    Rectangle,
    build_function,
    builtin,
    decompose_intervals,
    enumerate_monochromatic_rectangles,
    enumerate_rectangles,
    function_from_spec,
    is_monochromatic,
    is_type_sensitive_instance,
    is_type_threshold_instance,
    locate_interval,
    project_rectangle,
)

label_tables = st.integers(1, 64).flatmap(
    lambda m: st.lists(st.integers(0, 3), min_size=m + 1, max_size=m + 1)
)


def R(*sets):
    return Rectangle(tuple(frozenset(S) for S in sets))


class TestBuild:
    def test_parity(self):
        f = build_function(2, [0, 1, 0])
        assert f((1, 0)) == 1 and f((1, 1)) == 0

    def test_max(self):
        f = build_function(3, [0, 1, 1, 1])
        assert f.m == 3

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            build_function(2, [0, 1])

    @pytest.mark.parametrize(
        "name, m, labels",
        [
            ("parity", 4, [0, 1, 0, 1, 0]),
            ("max", 5, [0, 1, 1, 1, 1, 1]),
            ("majority", 3, [0, 0, 1, 1]),
            ("min", 3, [0, 0, 0, 1]),
            ("sum", 3, [0, 1, 2, 3]),
        ],
    )
    def test_builtins(self, name, m, labels):
        assert list(builtin(name, m).labels) == labels

    def test_threshold(self):
        assert list(builtin("threshold", 4, 2).labels) == [0, 0, 1, 1, 1]
        with pytest.raises(InputError):
            builtin("threshold", 4, 5)

    def test_unknown(self):
        with pytest.raises(InputError):
            builtin("mode", 4)

    def test_json_specs(self):
        assert function_from_spec({"m": 2, "labels": [0, 1, 0]}).labels == (0, 1, 0)
        assert function_from_spec({"builtin": "max", "m": 2}).labels == (0, 1, 1)
        assert function_from_spec({"builtin": "threshold", "m": 3, "theta": 2}).labels == (0, 0, 1, 1)
        with pytest.raises(InputError):
            function_from_spec({"m": 2})


class TestDecompose:
    def test_parity_singletons(self):
        assert decompose_intervals(builtin("parity", 4)).endpoints() == [(s, s) for s in range(5)]

    def test_max(self):
        assert decompose_intervals(builtin("max", 8)).endpoints() == [(0, 0), (1, 8)]

    def test_constant(self):
        assert decompose_intervals(build_function(6, [7] * 7)).endpoints() == [(0, 6)]

    def test_labels_kept(self):
        d = decompose_intervals(build_function(3, ["a", "a", "b", "a"]))
        assert [iv.label for iv in d] == ["a", "b", "a"]

    @given(label_tables)
    def test_contiguous_partition(self, labels):
        f = build_function(len(labels) - 1, labels)
        d = decompose_intervals(f)
        covered = [s for iv in d for s in range(iv.a, iv.b + 1)]
        assert covered == list(range(f.m + 1))
        for iv in d:
            assert len(set(f.labels[iv.a : iv.b + 1])) == 1
        for left, right in zip(d, list(d)[1:]):
            assert left.label != right.label

    @given(label_tables)
    def test_locate_matches_scan(self, labels):
        d = decompose_intervals(build_function(len(labels) - 1, labels))
        for s in range(d.m + 1):
            scan = next(v for v, iv in enumerate(d, 1) if iv.a <= s <= iv.b)
            assert locate_interval(d, s) == scan

    @given(label_tables, st.permutations(range(4)))
    def test_relabel_invariance(self, labels, perm):
        f = build_function(len(labels) - 1, labels)
        g = build_function(f.m, [("x", perm[lab]) for lab in labels])
        assert decompose_intervals(f).endpoints() == decompose_intervals(g).endpoints()


class TestLocate:
    @pytest.mark.parametrize("name, m, s, v", [("max", 8, 0, 1), ("max", 8, 5, 2), ("parity", 4, 3, 4)])
    def test_examples(self, name, m, s, v):
        assert locate_interval(decompose_intervals(builtin(name, m)), s) == v

    def test_out_of_range(self):
        with pytest.raises(InputError):
            locate_interval(decompose_intervals(builtin("max", 3)), 4)


class TestRectangles:
    def test_projection_examples(self):
        assert project_rectangle(R({1}, {0, 1}, {0})) == (1, 2)
        assert project_rectangle(R({0, 1}, {0, 1}, {0, 1})) == (0, 3)
        assert project_rectangle(R({1}, {1})) == (2, 2)

    def test_projection_is_sum_range(self):
        for r in enumerate_rectangles(4):
            sums = {sum(x) for x in r.points()}
            assert sums == set(range(r.alpha, r.beta + 1))

    def test_constant_gives_all_nine(self):
        assert len(enumerate_monochromatic_rectangles(build_function(2, [0, 0, 0]))) == 9

    @pytest.mark.parametrize("name, expected", [("parity", 4), ("max", 6)])
    def test_brute_force_counts(self, name, expected):
        f = builtin(name, 2)
        brute = [r for r in enumerate_rectangles(2) if len({f(x) for x in r.points()}) == 1]
        assert len(brute) == expected
        assert enumerate_monochromatic_rectangles(f) == brute

    def test_max_rectangles(self):
        got = {tuple(tuple(sorted(S)) for S in r.sets) for r in enumerate_monochromatic_rectangles(builtin("max", 2))}
        singletons = {((a,), (b,)) for a in (0, 1) for b in (0, 1)}
        assert got == singletons | {((1,), (0, 1)), ((0, 1), (1,))}

    def test_canonical_order(self):
        rects = list(enumerate_rectangles(2))
        assert [tuple(tuple(sorted(S)) for S in r.sets) for r in rects[:4]] == [
            ((0,), (0,)), ((0,), (1,)), ((0,), (0, 1)), ((1,), (0,))
        ]

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            enumerate_monochromatic_rectangles(builtin("max", 13))
        with pytest.raises(ResourceLimitError):
            enumerate_monochromatic_rectangles(builtin("max", 5), max_m=4)

    def test_from_points(self):
        assert Rectangle.from_points([(1, 0), (1, 1)]) == R({1}, {0, 1})
        assert Rectangle.from_points([(0, 0), (1, 1)]) is None

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 7).flatmap(lambda m: st.lists(st.integers(0, 2), min_size=m + 1, max_size=m + 1)))
    def test_projection_in_unique_interval(self, labels):
        f = build_function(len(labels) - 1, labels)
        d = decompose_intervals(f)
        mono = {r.sets for r in enumerate_monochromatic_rectangles(f)}
        for r in enumerate_rectangles(f.m):
            owners = [iv for iv in d if iv.a <= r.alpha and r.beta <= iv.b]
            if r.sets in mono:
                assert is_monochromatic(f, r)
                assert len(owners) == 1
            else:
                assert len(set(f.labels[r.alpha : r.beta + 1])) >= 2


class TestTypePredicates:
    def test_threshold_examples(self):
        assert is_type_threshold_instance(builtin("max", 8), 1, 0)
        assert not is_type_threshold_instance(builtin("parity", 8), 1, 1)
        assert is_type_threshold_instance(build_function(5, [0] * 6), 0, 0)
        with pytest.raises(InputError):
            is_type_threshold_instance(builtin("max", 3), 2, 2)

    def test_sensitive_examples(self):
        assert is_type_sensitive_instance(builtin("parity", 10), 0.5, 2)
        assert not is_type_sensitive_instance(builtin("max", 10), 0.5, 2)
        for gamma in (0.01, 0.5, 0.99):
            assert is_type_sensitive_instance(builtin("sum", 10), gamma, 2)
        with pytest.raises(InputError):
            is_type_sensitive_instance(builtin("sum", 2), 0.5, 2)


def test_evaluation_is_symmetric():
    f = build_function(4, [0, 2, 1, 1, 0])
    for x in itertools.product((0, 1), repeat=4):
        for perm in itertools.permutations(x):
            assert f(perm) == f(x)
