"""Test functions that force large variation of A_t^alpha, and the experiments on them.

Two families are built here:

* the frequency-localised chirp f_lambda with radial Fourier transform
  chi(|xi|/lambda) |xi|^{i Im alpha} e^{pi i |xi|^2 / lambda}, whose means
  flip sign along t_n = sqrt(1 + n/lambda) near the origin and along
  t_n = |x| - sqrt(9/16 + n/lambda) near |x| ~ 3;
* radial step functions whose means at the origin alternate between ~0 and
  ~1 along a geometric sequence of radii, so that no L^infty bound on the
  variation can hold.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import json
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .means import (
    RadialProfile,
    RadialStep,
    ball_average_offcenter,
    inverse_radial,
    mean_radial_freq,
    mean_step_at_origin,
    smooth_step,
)
from .special import as_complex, ball_volume, gamma, sphere_area
from .variation import var_norm

__all__ = [
    "chirp_bump",
    "ChirpSpec",
    "chirp_hat",
    "chirp_profile",
    "ChirpNorm",
    "chirp_lp_norm",
    "chirp_lp_norms",
    "chirp_l2_frequency_side",
    "tn_prop42",
    "tn_prop43",
    "stepfn_alpha1",
    "alpha1_origin_values_exact",
    "stepfn_general",
    "ScalingReport",
    "predicted_slope",
    "scaling_experiment",
    "LinftyReport",
    "linfty_experiment",
]


def chirp_bump(r):
    """Smooth bump: 1 on [3/4, 5/4], 0 outside (1/2, 3/2), values in [0, 1]."""
    r = np.asarray(r, dtype=float)
    return smooth_step(4 * (r - 0.5)) * smooth_step(4 * (1.5 - r))


@dataclass(frozen=True)
class ChirpSpec:
    lam: float
    alpha: complex = 0j
    d: int = 2
    chi: object = field(default=chirp_bump, compare=False, repr=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        object.__setattr__(self, "alpha", as_complex(self.alpha, "alpha"))
        if int(self.d) != self.d or self.d < 2:
            raise ValueError("d must be an integer >= 2")


def chirp_hat(spec, rho):
    """Radial profile of the chirp's Fourier transform at |xi| = rho."""
    rho = np.asarray(rho, dtype=float)
    lam = spec.lam
    amp = spec.chi(rho / lam)
    logr = np.log(np.where(rho > 0, rho, 1.0))
    phase = math.pi * rho * rho / lam + spec.alpha.imag * logr
    out = np.where(amp != 0, amp * np.exp(1j * phase), 0j)
    return complex(out) if out.ndim == 0 else out


def chirp_profile(spec):
    """The chirp as a :class:`RadialProfile`, for :func:`mean_radial_freq`."""
    lam = spec.lam
    # d/drho of pi rho^2/lam + Im(alpha) log rho on [lam/2, 3 lam/2]
    osc = 3 * math.pi + abs(spec.alpha.imag) * 2 / lam
    return RadialProfile(lambda rho: chirp_hat(spec, rho), lam / 2, 3 * lam / 2, spec.d, osc)


@dataclass
class ChirpNorm:
    value: float
    tail: float
    radii: np.ndarray = field(repr=False)
    modulus: np.ndarray = field(repr=False)


def chirp_lp_norms(spec, ps, *, r_max=4.0, panels=None, order=8, rtol=1e-8):
    """L^p norms of f_lambda over |x| <= r_max (d = 2) for each p in ``ps``.

    f_lambda is evaluated once, by the inverse radial transform at
    Gauss-Legendre nodes in |x|, and |f|^p is integrated against 2 pi r dr.
    ``tail`` estimates the missing part from r_max < |x| < 2 r_max using the
    largest sampled modulus on the outer tenth of the grid; f_lambda decays
    like |lambda x|^{-N} there.
    """
    if spec.d != 2:
        raise ValueError("chirp_lp_norm is implemented for d = 2")
    ps = list(ps)
    if not all(p >= 1 for p in ps):
        raise ValueError("p must be >= 1")
    if panels is None:
        panels = int(16 * r_max)
    prof = chirp_profile(spec)
    x0, w0 = leggauss(order)
    edges = np.linspace(0.0, r_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    r = (mid[:, None] + half[:, None] * x0).ravel()
    w = (half[:, None] * w0).ravel()
    mod = np.array([abs(inverse_radial(prof, ri, rtol=rtol).value) for ri in r])
    last = mod[r > 0.9 * r_max].max(initial=0.0)
    out = {}
    for p in ps:
        val = np.sum(w * mod ** p * 2 * math.pi * r)
        tail = last ** p * math.pi * 3 * r_max ** 2
        out[p] = ChirpNorm(float(val ** (1 / p)), float(tail), r, mod)
    return out


def chirp_lp_norm(spec, p, **kw):
    """L^p norm of f_lambda over |x| <= r_max; see :func:`chirp_lp_norms`."""
    return chirp_lp_norms(spec, [p], **kw)[p]


def chirp_l2_frequency_side(spec):
    """||f_lambda||_2 by Plancherel: (sigma(S^{d-1}) lam^d int chi(s)^2 s^{d-1} ds)^{1/2}."""
    val, _ = integrate.quad(lambda s: spec.chi(s) ** 2 * s ** (spec.d - 1), 0.5, 1.5,
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    return math.sqrt(sphere_area(spec.d) * spec.lam ** spec.d * val)


# ---------------------------------------------------------------------------
# Radius sequences along which the chirp's means alternate
# ---------------------------------------------------------------------------

def tn_prop42(lam, n, n_max=None):
    """t_n = sqrt(1 + n/lam); since lam t_n^2 = lam + n, e^{-pi i lam t_n^2} alternates.

    Admissible n: 1 <= n <= ``n_max`` (default lam/100).
    """
    n_max = lam / 100 if n_max is None else n_max
    if not (1 <= n <= n_max):
        raise ValueError(f"n={n} outside 1 <= n <= {n_max:g}")
    return math.sqrt(1 + n / lam)


def tn_prop43(lam, x_norm, n, n_max=None):
    """t_n = |x| - sqrt(9/16 + n/lam) for 11/4 <= |x| <= 3.

    Admissible n: 1 <= n <= ``n_max`` (default lam/1000), which keeps
    t_n in [19/10, 9/4].  A larger ``n_max`` is accepted while t_n stays in
    that interval.
    """
    if not (2.75 <= x_norm <= 3):
        raise ValueError("x_norm must lie in [11/4, 3]")
    n_max = lam / 1000 if n_max is None else n_max
    if not (1 <= n <= n_max):
        raise ValueError(f"n={n} outside 1 <= n <= {n_max:g}")
    t = x_norm - math.sqrt(9 / 16 + n / lam)
    if not (1.9 <= t <= 2.25):
        raise ValueError(f"t_n={t} left [19/10, 9/4]; lower n_max")
    return t


# ---------------------------------------------------------------------------
# L^infty step functions
# ---------------------------------------------------------------------------

def _alpha1_coeff_ratios(n, d):
    """Coefficients of f_n times |B(0,1)|, as exact fractions (index 0 is f_0)."""
    c = [Fraction(1)]
    for j in range(1, n + 1):
        if j == 1:
            c.append(Fraction(-1, 2 ** d - 1))
        elif j % 2 == 0:
            c.append(Fraction(1))
        else:
            c.append(Fraction(-1, 2 ** d))
    return c


def stepfn_alpha1(n, d=2):
    """f_n = 1_{[0,1)}/|B| + sum_{j=1}^n c_j 1_{[2^{j-1}, 2^j)}, radial in R^d.

    c_1 = -1/((2^d - 1)|B|), c_j = 1/|B| for even j, -1/(2^d |B|) for odd j >= 3.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    vol = ball_volume(d)
    b = [0.0] + [2.0 ** j for j in range(0, n + 1)]
    c = [float(x) / vol for x in _alpha1_coeff_ratios(n, d)]
    return RadialStep(b, c, d)


def alpha1_origin_values_exact(n, d=2):
    """A_{2^j}^1 f_n(0) for j = 0..n as exact fractions."""
    c = _alpha1_coeff_ratios(n, d)
    b = [Fraction(0)] + [Fraction(2) ** j for j in range(0, n + 1)]
    out = []
    for j in range(0, n + 1):
        t = Fraction(2) ** j
        s = sum(ck * (min(b[k + 1], t) ** d - min(b[k], t) ** d) for k, ck in enumerate(c))
        out.append(s / t ** d)
    return out


def stepfn_general(n, d, alpha):
    """Step function and radii for Re alpha > 0, alpha != 1.

    With c = |alpha - 1| (replaced by 1 when |alpha - 1| < 1):
    t_j = 2^{4j} c^j, E_j = [2^{4(j-1)} c^{j-1}, 2^{4(j-1)+1} c^{j-1}), and
    the coefficient on E_j is d 2^{4d} c^d Gamma(alpha) / ((2^d - 1) sigma)
    for odd j and -d Gamma(alpha) / ((2^d - 1) sigma) for even j.

    Returns ``(f_n, times)`` with ``times[j-1] = t_j``.
    """
    alpha = as_complex(alpha, "alpha")
    if not alpha.real > 0:
        raise ValueError("need Re(alpha) > 0")
    if alpha == 1:
        raise ValueError("alpha = 1 is handled by stepfn_alpha1")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = max(abs(alpha - 1), 1.0)
    base = d * gamma(alpha) / ((2 ** d - 1) * sphere_area(d))
    odd = base * 2.0 ** (4 * d) * c ** d
    breaks, coeffs = [], []
    for j in range(1, n + 1):
        lo = 2.0 ** (4 * (j - 1)) * c ** (j - 1)
        if breaks:
            coeffs.append(0j)
        breaks += [lo, 2 * lo]
        coeffs.append(odd if j % 2 else -base)
    times = np.array([2.0 ** (4 * j) * c ** j for j in range(1, n + 1)])
    return RadialStep(breaks, coeffs, d), times


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def predicted_slope(kind, d, alpha, q):
    """Growth exponent of the sampled variation sum in lambda."""
    re = as_complex(alpha).real
    if kind == "prop42":
        return d / 2 - re + 1 / q
    if kind == "prop43":
        return 0.5 - re + 1 / q
    raise ValueError(f"unknown experiment kind {kind!r}")


@dataclass
class ScalingReport:
    kind: str
    lambdas: np.ndarray
    S: np.ndarray
    fitted_slope: float
    predicted_slope: float
    max_residual: float
    variation: np.ndarray = field(default=None, repr=False)
    counts: np.ndarray = field(default=None, repr=False)

    def slope_error(self):
        return abs(self.fitted_slope - self.predicted_slope)

    def to_csv(self):
        lines = ["lambda,S,log_lambda,log_S"]
        for lam, s in zip(self.lambdas, self.S):
            row = (lam, s, math.log(lam), math.log(s))
            lines.append(",".join(format(float(v), ".17g") for v in row))
        return "\n".join(lines) + "\n"

    def summary(self, tol=None):
        out = {
            "fitted_slope": float(self.fitted_slope),
            "predicted_slope": float(self.predicted_slope),
            "max_residual": float(self.max_residual),
        }
        if tol is not None:
            out["passed"] = bool(self.slope_error() <= tol)
        return out

    def summary_json(self, tol=None):
        return json.dumps(self.summary(tol), indent=2, sort_keys=True)


def _fit_loglog(lambdas, S):
    x, y = np.log(lambdas), np.log(S)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return float(slope), float(np.abs(resid).max())


def scaling_experiment(kind, d, alpha, q, lambdas, x_norm=None, *, divisor=128,
                       node_cap=20_000_000, rtol=1e-8):
    """Growth of the sampled variation sum S(lambda) for the chirp.

    For each lambda the means A_{t_n}^alpha f_lambda(x) are evaluated at
    t_n, n = 1, ..., N+1 with N = floor(lambda/divisor); S is the l^q norm of
    the N consecutive differences.  ``prop42`` uses x = 0 and
    t_n = sqrt(1 + n/lambda); ``prop43`` uses |x| = x_norm in [11/4, 3] and
    t_n = |x| - sqrt(9/16 + n/lambda).  log S is fitted against log lambda.
    """
    alpha = as_complex(alpha, "alpha")
    lambdas = np.asarray(sorted(float(v) for v in lambdas))
    if lambdas.size < 4:
        raise ValueError("need at least 4 lambdas")
    if kind == "prop42":
        x = 0.0 if x_norm is None else float(x_norm)
    elif kind == "prop43":
        x = 2.9 if x_norm is None else float(x_norm)
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")
    S, V, counts = [], [], []
    for lam in lambdas:
        N = int(lam // divisor)
        if N < 1:
            raise ValueError(f"lambda={lam} gives no differences with divisor {divisor}")
        ns = range(1, N + 2)
        if kind == "prop42":
            ts = [tn_prop42(lam, n, n_max=N + 1) for n in ns]
        else:
            ts = [tn_prop43(lam, x, n, n_max=N + 1) for n in ns]
        prof = chirp_profile(ChirpSpec(lam, alpha, d))
        vals = np.array([mean_radial_freq(prof, alpha, t, x, d, rtol=rtol, node_cap=node_cap).value
                         for t in ts])
        S.append(float(np.sum(np.abs(np.diff(vals)) ** q) ** (1 / q)))
        V.append(var_norm(vals[::-1] if kind == "prop43" else vals, q).value)
        counts.append(N)
    S = np.array(S)
    if np.any(S <= 0):
        raise ValueError("non-positive variation sum; cannot fit a power law")
    if S.max() / S.min() < 2:
        raise ValueError("S spans less than a factor 2; the fit is degenerate")
    slope, resid = _fit_loglog(lambdas, S)
    return ScalingReport(kind, lambdas, S, slope, predicted_slope(kind, d, alpha, q), resid,
                         np.array(V), np.array(counts))


@dataclass
class LinftyReport:
    """Outcome of an L^infty counterexample run.

    For alpha = 1, ``ratio`` (variation over sup norm) is compared with
    ``lower_bound`` = n^{1/q} |B(0,1)| / 4; otherwise ``variation`` is
    compared with (n-1)^{1/q} / 4.
    """

    alpha: complex
    n: int
    d: int
    q: float
    times: np.ndarray
    origin_values: np.ndarray
    values: np.ndarray
    x_norm: float
    variation: float
    sup_norm: float
    ratio: float
    lower_bound: float
    compared: str
    max_perturbation: float

    @property
    def passed(self):
        got = self.ratio if self.compared == "ratio" else self.variation
        return got >= self.lower_bound


def linfty_experiment(n, d, q, alpha=1):
    """Run the step-function counterexample and measure the sampled variation."""
    alpha = as_complex(alpha, "alpha")
    if alpha == 1:
        f = stepfn_alpha1(n, d)
        times = np.array([2.0 ** j for j in range(0, n + 1)])
        x_norm = 1 / (d * 2 ** (d + 3))
        origin = np.array([mean_step_at_origin(f, 1, t) for t in times])
        values = np.array([ball_average_offcenter(f, t, x_norm) for t in times])
        variation = var_norm(values, q).value
        sup = f.sup_norm()
        ratio = variation / sup
        bound = n ** (1 / q) * ball_volume(d) / 4
        return LinftyReport(alpha, n, d, q, times, origin, values, x_norm, variation, sup,
                            ratio, bound, "ratio", float(np.abs(values - origin).max()))
    f, times = stepfn_general(n, d, alpha)
    origin = np.array([mean_step_at_origin(f, alpha, t) for t in times])
    variation = var_norm(origin, q).value
    sup = f.sup_norm()
    return LinftyReport(alpha, n, d, q, times, origin, origin, 0.0, variation, sup,
                        variation / sup, (n - 1) ** (1 / q) / 4, "variation", 0.0)
