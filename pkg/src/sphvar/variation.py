"""q-variation, jump counts and the short/dyadic split for sampled paths.

A path is a finite family ``{a_t}`` observed at strictly increasing times.
Every functional here takes the supremum over subsequences of the sample
times only, so it lower-bounds the corresponding continuum quantity.
"""
from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

__all__ = [
    "SampledPath",
    "VariationResult",
    "var_norm",
    "var_norm_exhaustive",
    "var_inf",
    "jump_count",
    "short_variation",
    "dyadic_variation",
    "dyadic_subpath",
    "extrema_reduce",
    "sobolev_rhs",
]

EXHAUSTIVE_MAX_LEN = 14


@dataclass(frozen=True)
class SampledPath:
    """Samples ``values[i]`` of a one-parameter family at ``times[i]``."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        v = np.asarray(self.values)
        if not np.iscomplexobj(v):
            v = v.astype(float)
        v = v.ravel()
        if t.size < 1:
            raise ValueError("a path needs at least one sample")
        if t.shape != v.shape:
            raise ValueError(f"times and values differ in length ({t.size} vs {v.size})")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("times and values must be finite")
        if np.any(t <= 0):
            raise ValueError("times must be positive")
        if np.any(np.diff(t) <= 0):
            k = int(np.argmax(np.diff(t) <= 0))
            raise ValueError(f"times must be strictly increasing (index {k + 1})")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values, times=None):
        """Build a path, defaulting to times 1, 2, ..., L."""
        values = np.asarray(values)
        if times is None:
            times = np.arange(1, values.size + 1, dtype=float)
        return cls(times, values)

    def __len__(self):
        return self.times.size

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values)

    def subpath(self, index):
        index = np.asarray(index)
        return SampledPath(self.times[index], self.values[index])


@dataclass(frozen=True)
class VariationResult:
    """q-variation value and a (0-based) index subsequence attaining it."""

    value: float
    witness: tuple

    def __float__(self):
        return float(self.value)


def _check_q(q):
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")


def _as_path(path):
    return path if isinstance(path, SampledPath) else SampledPath.from_values(path)


def var_norm(path, q):
    """q-variation of a sampled path by dynamic programming.

    ``best[j]`` is the largest sum of |increment|^q over subsequences ending
    at sample j, so ``best[j] = max_{i<j} best[i] + |a_j - a_i|^q``.  O(L^2)
    time and memory per row.  ``q = inf`` is delegated to :func:`var_inf`.
    """
    path = _as_path(path)
    if q == math.inf:
        v, (i, j) = _var_inf_pair(path)
        return VariationResult(v, (i, j) if j > i else (0,))
    _check_q(q)
    a = path.values
    L = a.size
    if L == 1:
        return VariationResult(0.0, (0,))
    best = np.zeros(L)
    prev = np.full(L, -1)
    for j in range(1, L):
        cand = best[:j] + np.abs(a[j] - a[:j]) ** q
        i = int(np.argmax(cand))
        best[j] = cand[i]
        prev[j] = i
    end = int(np.argmax(best))
    if best[end] == 0:
        return VariationResult(0.0, (0,))
    chain = [end]
    while prev[chain[-1]] >= 0:
        chain.append(int(prev[chain[-1]]))
    chain.reverse()
    return VariationResult(float(best[end] ** (1.0 / q)), tuple(chain))


def var_norm_exhaustive(path, q):
    """q-variation by enumerating every index subsequence of length >= 2.

    Literal form of the definition; only for paths with at most 14 samples.
    """
    path = _as_path(path)
    _check_q(q)
    L = len(path)
    if L > EXHAUSTIVE_MAX_LEN:
        raise ValueError(f"exhaustive enumeration limited to L <= {EXHAUSTIVE_MAX_LEN}, got {L}")
    a = path.values
    best = 0.0
    for k in range(2, L + 1):
        for idx in combinations(range(L), k):
            s = sum(abs(a[idx[m + 1]] - a[idx[m]]) ** q for m in range(k - 1))
            best = max(best, s)
    return best ** (1.0 / q)


def _var_inf_pair(path):
    a = path.values
    if a.size == 1:
        return 0.0, (0, 0)
    diff = np.abs(a[None, :] - a[:, None])
    diff = np.triu(diff, 1)
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[i, j]), (int(i), int(j))


def var_inf(path):
    """Largest single increment |a_j - a_i| over pairs i < j (max - min for real paths)."""
    path = _as_path(path)
    if path.is_real:
        return float(path.values.max() - path.values.min())
    return _var_inf_pair(path)[0]


def jump_count(path, delta):
    """Number of delta-jumps: the largest N with s_1<t_1<=s_2<...<=s_N<t_N
    and |a_{t_l} - a_{s_l}| > delta.

    Greedy earliest-completion scan: a jump closes at the first sample that
    differs by more than ``delta`` from some sample since the current anchor,
    and that sample becomes the next anchor (s_{l+1} = t_l is allowed).
    """
    path = _as_path(path)
    if not delta > 0:
        raise ValueError("delta must be positive")
    a = path.values
    count = 0
    anchor = 0
    for t in range(1, a.size):
        if np.any(np.abs(a[t] - a[anchor:t]) > delta):
            count += 1
            anchor = t
    return count


def _dyadic_block(t):
    """Return (j, on_boundary) with 2^j <= t < 2^{j+1}; exact for floats."""
    m, e = math.frexp(t)
    return e - 1, m == 0.5


def short_variation(path, q):
    """Short variation over dyadic time blocks [2^j, 2^{j+1}].

    Returns ``(per_block, total)`` where ``per_block`` maps j to the
    q-variation of the samples in block j and ``total`` is the l^q sum over
    blocks.  A sample at exactly 2^{j+1} belongs to block j+1 and is also
    counted as the right endpoint of block j, matching closed blocks.
    """
    path = _as_path(path)
    _check_q(q)
    members = {}
    for i, t in enumerate(path.times):
        j, edge = _dyadic_block(float(t))
        members.setdefault(j, []).append(i)
        if edge:
            members.setdefault(j - 1, []).append(i)
    per_block = {}
    for j in sorted(members):
        idx = sorted(members[j])
        per_block[j] = var_norm(path.subpath(idx), q).value
    total = sum(v ** q for v in per_block.values()) ** (1.0 / q)
    return per_block, float(total)


def _is_power_of_two(t, rtol=1e-12):
    k = round(math.log2(t))
    return abs(t - 2.0 ** k) <= rtol * t


def dyadic_variation(path, q):
    """q-variation of a path whose times are all powers of two."""
    path = _as_path(path)
    bad = [float(t) for t in path.times if not _is_power_of_two(float(t))]
    if bad:
        raise ValueError(f"dyadic_variation needs power-of-two times; got {bad[:3]}")
    return var_norm(path, q).value


def dyadic_subpath(path):
    """Samples of ``path`` taken at exact powers of two (may be empty -> None)."""
    path = _as_path(path)
    idx = [i for i, t in enumerate(path.times) if _is_power_of_two(float(t))]
    return path.subpath(idx) if idx else None


def extrema_reduce(path):
    """Keep only the endpoints and strict local extrema of a real path.

    Runs of equal values collapse to their first sample.  For q >= 1 the
    q-variation is unchanged, since merging two same-sign increments never
    decreases |x + y|^q relative to |x|^q + |y|^q.
    """
    path = _as_path(path)
    if not path.is_real:
        raise TypeError("extrema_reduce requires real-valued samples")
    a = path.values
    L = a.size
    runs = [0] + [i for i in range(1, L) if a[i] != a[i - 1]]
    runs = np.array(runs)
    v = a[runs]
    if v.size == 1:
        return path.subpath([0] if L == 1 else [0, L - 1])
    d = np.diff(v)
    turn = np.sign(d[1:]) != np.sign(d[:-1])
    idx = runs[np.concatenate(([True], turn, [True]))]
    # a trailing flat run keeps the original last sample as the endpoint
    idx[-1] = L - 1
    return path.subpath(idx)


def sobolev_rhs(F, Fprime, q):
    """Right side ||F||_q^{1/q'} ||F'||_q^{1/q} of the Sobolev bound for v_q.

    Both L^q norms are trapezoidal approximations over the sampled times.
    """
    F, Fprime = _as_path(F), _as_path(Fprime)
    if F.times.shape != Fprime.times.shape or not np.array_equal(F.times, Fprime.times):
        raise ValueError("F and F' must share the same time grid")
    if not (1 < q < math.inf):
        raise ValueError("q must lie in (1, inf)")
    nF = np.trapezoid(np.abs(F.values) ** q, F.times) ** (1 / q)
    nD = np.trapezoid(np.abs(Fprime.values) ** q, F.times) ** (1 / q)
    qp = q / (q - 1)
    return float(nF ** (1 / qp) * nD ** (1 / q))
