import itertools
import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphvar.variation import (
    SampledPath,
    dyadic_subpath,
    dyadic_variation,
    extrema_reduce,
    jump_count,
    short_variation,
    sobolev_rhs,
    var_inf,
    var_norm,
    var_norm_exhaustive,
)


def jumps_exhaustive(a, delta):
    """Largest N over all chains s_1 < t_1 <= s_2 < t_2 <= ... with |a_t - a_s| > delta."""
    L = len(a)

    @lru_cache(maxsize=None)
    def best(start):
        # most jumps using indices >= start
        out = 0
        for s, t in itertools.combinations(range(start, L), 2):
            if abs(a[t] - a[s]) > delta:
                out = max(out, 1 + best(t))
        return out

    return best(0)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
real_paths = st.lists(finite, min_size=1, max_size=12)
complex_paths = st.lists(st.tuples(finite, finite), min_size=1, max_size=10).map(
    lambda v: [complex(a, b) for a, b in v])
qs = st.sampled_from([1.0, 2.0, 2.5, 3.0, 4.0])


class TestSampledPath:
    def test_validation(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            SampledPath([1, 2, 2], [0, 0, 0])
        with pytest.raises(ValueError, match="positive"):
            SampledPath([0, 1], [0, 0])
        with pytest.raises(ValueError):
            SampledPath([1, 2], [0])
        with pytest.raises(ValueError):
            SampledPath([1, 2], [0, np.nan])

    def test_immutable(self):
        p = SampledPath.from_values([0, 1])
        with pytest.raises(ValueError):
            p.values[0] = 3


class TestVarNorm:
    def test_constant(self):
        assert var_norm([2.0] * 7, 2.5).value == 0

    def test_zigzag(self):
        r = var_norm([0, 1, 0], 2)
        assert math.isclose(r.value, math.sqrt(2), rel_tol=1e-15)
        assert r.witness == (0, 1, 2)
        assert var_norm([0, 1, 0], 1).value == 2

    def test_exhaustive_examples(self):
        assert var_norm_exhaustive(SampledPath.from_values([0, 1]), 3) == 1
        assert var_norm_exhaustive(SampledPath.from_values([0, 2, 1, 3]), 1) == 5

    def test_witness_attains_value(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=40) + 1j * rng.normal(size=40)
        r = var_norm(a, 3)
        w = np.array(r.witness)
        assert math.isclose(np.sum(np.abs(np.diff(a[w])) ** 3) ** (1 / 3), r.value, rel_tol=1e-13)

    def test_inf_route(self):
        assert var_norm([3, -1, 2, 5], math.inf).value == 6

    def test_q_below_one_rejected(self):
        with pytest.raises(ValueError):
            var_norm([0, 1], 0.5)

    def test_exhaustive_limit(self):
        with pytest.raises(ValueError):
            var_norm_exhaustive(SampledPath.from_values(range(15)), 2)

    @settings(max_examples=200, deadline=None)
    @given(complex_paths, qs)
    def test_dp_equals_exhaustive(self, a, q):
        p = SampledPath.from_values(a)
        assert abs(var_norm(p, q).value - var_norm_exhaustive(p, q)) <= 1e-12 * max(1, var_norm(p, q).value)

    @settings(max_examples=100, deadline=None)
    @given(real_paths, qs, qs)
    def test_q_monotone(self, a, q1, q2):
        q1, q2 = min(q1, q2), max(q1, q2)
        assert var_norm(a, q2).value <= var_norm(a, q1).value + 1e-12

    @settings(max_examples=100, deadline=None)
    @given(complex_paths, qs, finite, finite)
    def test_translation_and_homogeneity(self, a, q, cr, ci):
        a = np.array(a)
        c = complex(cr, ci)
        base = var_norm(a, q).value
        assert math.isclose(var_norm(a + c, q).value, base, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(var_norm(c * a, q).value, abs(c) * base, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(var_inf(SampledPath.from_values(c * a)), abs(c) * var_inf(SampledPath.from_values(a)),
                            rel_tol=1e-9, abs_tol=1e-9)


class TestVarInf:
    def test_examples(self):
        assert var_inf([0, 1, 0]) == 1
        assert var_inf([4, 4, 4]) == 0
        assert var_inf([3, -1, 2, 5]) == 6

    def test_complex_pairwise(self):
        a = [0, 1j, 1 + 1j, 2]
        assert math.isclose(var_inf(a), max(abs(x - y) for x in a for y in a), rel_tol=1e-15)


class TestJumps:
    def test_examples(self):
        assert jump_count([0, 1, 0, 1], 0.5) == 3
        assert jump_count([0, 1, 2, 3], 0.5) == 3
        assert jump_count([5] * 6, 0.1) == 0

    def test_delta_must_be_positive(self):
        with pytest.raises(ValueError):
            jump_count([0, 1], 0)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(finite, finite), min_size=1, max_size=10), st.floats(0.1, 8))
    def test_greedy_equals_exhaustive(self, v, delta):
        a = [complex(x, y) for x, y in v]
        assert jump_count(a, delta) == jumps_exhaustive(tuple(a), delta)

    @settings(max_examples=100, deadline=None)
    @given(complex_paths, st.floats(0.05, 5), st.sampled_from([2.5, 3.0, 4.0]))
    def test_jump_variation_inequality(self, a, delta, q):
        assert delta * jump_count(a, delta) ** (1 / q) <= var_norm(a, q).value * (1 + 1e-12) + 1e-12

    @settings(max_examples=100, deadline=None)
    @given(complex_paths, st.floats(0.1, 5), finite)
    def test_scaling(self, a, delta, c):
        a = np.array(a)
        if abs(c) < 1e-3:
            return
        assert jump_count(a + 3.0, delta) == jump_count(a, delta)
        # exact scaling by a power of two avoids rounding at the threshold
        assert jump_count(4.0 * a, 4.0 * delta) == jump_count(a, delta)


class TestShortDyadic:
    def test_example(self):
        p = SampledPath([1.1, 1.5, 2.3, 3.1], [0, 1, 1, 1])
        blocks, total = short_variation(p, 2)
        assert blocks == {0: 1.0, 1: 0.0}
        assert total == 1.0

    def test_single_block(self):
        rng = np.random.default_rng(1)
        t = np.sort(rng.uniform(4, 7.9, 20))
        p = SampledPath(t, rng.normal(size=20))
        assert math.isclose(short_variation(p, 3)[1], var_norm(p, 3).value, rel_tol=1e-14)

    def test_constant(self):
        assert short_variation(SampledPath([1, 3, 9], [2, 2, 2]), 2)[1] == 0

    def test_boundary_sample_in_both_blocks(self):
        p = SampledPath([1.5, 2.0, 3.0], [0, 1, 0])
        blocks, _ = short_variation(p, 2)
        assert blocks[0] == 1.0 and blocks[1] == 1.0

    def test_dyadic(self):
        assert dyadic_variation(SampledPath([4.0], [1.0]), 2) == 0
        v = dyadic_variation(SampledPath([1, 2, 4], [0, 1, 0]), 3)
        assert math.isclose(v, 2 ** (1 / 3), rel_tol=1e-15)
        with pytest.raises(ValueError):
            dyadic_variation(SampledPath([1, 3], [0, 1]), 2)

    def test_dyadic_equals_var_norm(self):
        t = 2.0 ** np.arange(-3, 6)
        a = np.sin(np.arange(t.size) * 1.7)
        assert dyadic_variation(SampledPath(t, a), 2.5) == var_norm(SampledPath(t, a), 2.5).value

    def test_decomposition_envelope(self):
        # V_q <= 3 (V^sh + V^dyad) on paths sampled densely in each block
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(50):
            t = np.unique(np.concatenate([2.0 ** np.arange(0, 6), rng.uniform(1, 32, 60)]))
            a = np.cumsum(rng.normal(size=t.size)) + 1j * np.cumsum(rng.normal(size=t.size))
            p = SampledPath(t, a)
            for q in (2.5, 3.0, 4.0):
                lhs = var_norm(p, q).value
                rhs = short_variation(p, q)[1] + dyadic_variation(dyadic_subpath(p), q)
                worst = max(worst, lhs / rhs)
        assert worst <= 3


class TestExtremaReduce:
    def test_monotone(self):
        r = extrema_reduce([0, 1, 2, 3])
        assert list(r.values) == [0, 3]

    def test_all_extrema(self):
        r = extrema_reduce([0, 1, 0, 1, 0])
        assert list(r.values) == [0, 1, 0, 1, 0]

    def test_flat_runs(self):
        r = extrema_reduce([1, 1, 2, 2, 0, 0])
        assert list(r.values) == [1, 2, 0]
        assert r.times[-1] == 6

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(-3, 3), min_size=1, max_size=12), st.sampled_from([1.0, 2.0, 3.0]))
    def test_preserves_variation(self, a, q):
        a = [float(x) for x in a]
        r = extrema_reduce(a)
        assert math.isclose(var_norm_exhaustive(r, q), var_norm_exhaustive(SampledPath.from_values(a), q),
                            rel_tol=1e-12, abs_tol=1e-12)

    def test_complex_rejected(self):
        with pytest.raises(TypeError):
            extrema_reduce([1j, 2])


class TestSobolev:
    def test_zero(self):
        t = np.linspace(0.01, 1, 50)
        z = SampledPath(t, np.zeros(50))
        assert sobolev_rhs(z, z, 2) == 0

    def test_linear(self):
        t = np.linspace(1e-6, 1, 20001)
        v = sobolev_rhs(SampledPath(t, t), SampledPath(t, np.ones_like(t)), 2)
        assert abs(v - (1 / 3) ** 0.25) < 1e-4
        assert abs(v - 0.7598) < 1e-4

    @pytest.mark.parametrize("q", [2.5, 3, 4])
    def test_dense_sampling_envelope(self, q):
        t = np.linspace(20 / 1e4, 20, 10_000)
        F = np.exp(-t) * np.sin(10 * t)
        Fp = np.exp(-t) * (10 * np.cos(10 * t) - np.sin(10 * t))
        p = SampledPath(t, F)
        v = var_norm(extrema_reduce(p), q).value
        assert v <= 4 * sobolev_rhs(p, SampledPath(t, Fp), q)

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            sobolev_rhs(SampledPath([1, 2], [0, 1]), SampledPath([1, 3], [0, 1]), 2)
