"""Complex Gamma, complex-order Bessel functions and the spherical-mean symbol.

Scalar Bessel evaluation below ``switch_radius`` sums the power series in
fixed-point integer arithmetic with enough guard bits to absorb the
cancellation between terms of size ~e^r; above it the Hankel expansion is
used.  Array inputs are routed the same way, with a double precision series
for small arguments where cancellation is harmless.
"""
from dataclasses import dataclass
from fractions import Fraction
import cmath
import math

import numpy as np

__all__ = [
    "BesselEvalConfig",
    "DEFAULT_CONFIG",
    "as_complex",
    "gamma",
    "rgamma",
    "sphere_area",
    "ball_volume",
    "bessel_series",
    "bessel_reduced",
    "bessel_asymptotic",
    "asymptotic_error_estimate",
    "hankel_coefficients",
    "bessel",
    "multiplier",
    "sphere_fourier",
]


@dataclass(frozen=True)
class BesselEvalConfig:
    """Regime split for :func:`bessel`.

    ``asymptotic_terms`` counts terms in each of the two Hankel sums
    P and Q, so coefficients up to order ``2*asymptotic_terms - 1`` enter.
    """

    switch_radius: float = 15.0
    asymptotic_terms: int = 8
    series_tol: float = 1e-17

    def __post_init__(self):
        if not self.switch_radius >= 1.0:
            raise ValueError("switch_radius must be >= 1")
        if int(self.asymptotic_terms) < 1:
            raise ValueError("asymptotic_terms must be >= 1")
        if not self.series_tol > 0:
            raise ValueError("series_tol must be positive")


DEFAULT_CONFIG = BesselEvalConfig()

# below this argument the double precision series loses < 1e-14 absolute
_FLOAT_SERIES_MAX = 6.0
# threshold s0 for the cancelled-series form of the multiplier
SMALL_S = 1e-3


def as_complex(z, name="parameter"):
    """Coerce ``z`` to a finite Python complex."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_nonpositive_integer(z):
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def _gamma_lanczos(z):
    # valid for Re z >= 1/2
    z = z - 1
    x = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def gamma(z):
    """Gamma function of a complex argument.

    Lanczos approximation (g=7, 9 terms) with the reflection formula for
    ``Re z < 1/2``.  Relative accuracy is about 1e-13 or better for |z| <= 20.

    Raises
    ------
    OverflowError
        At the poles z = 0, -1, -2, ... or when the result is not finite.
    """
    z = as_complex(z, "z")
    if _is_nonpositive_integer(z):
        raise OverflowError(f"Gamma has a pole at {z.real:g}")
    if z.imag == 0 and z.real == math.floor(z.real) and 0 < z.real <= 30:
        return complex(math.factorial(int(z.real) - 1))
    if z.real < 0.5:
        val = math.pi / (cmath.sin(math.pi * z) * _gamma_lanczos(1 - z))
    else:
        val = _gamma_lanczos(z)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise OverflowError(f"Gamma({z}) is not finite in double precision")
    return val


def rgamma(z):
    """Reciprocal Gamma function, entire: zero at the poles of Gamma."""
    z = as_complex(z, "z")
    if _is_nonpositive_integer(z):
        return 0j
    return 1.0 / gamma(z)


def sphere_area(d):
    """Surface measure of the unit sphere S^{d-1} in R^d."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d):
    """Lebesgue measure of the unit ball in R^d."""
    return sphere_area(d) / d


# ---------------------------------------------------------------------------
# Power series
# ---------------------------------------------------------------------------

def _fixed(x, bits):
    """Round a float (exactly, via its dyadic value) to an integer scaled by 2**bits."""
    fr = Fraction(x) * (1 << bits)
    return round(fr)


def _hyp0f1_fixed(b, x, tol):
    """sum_j x^j / (j! (b)_j) for real x and complex b, in fixed point.

    Terms grow up to about e^{2 sqrt|x|} before decaying; the working
    precision carries that many extra bits so the result is correct to
    double precision.
    """
    grow = 2.0 * math.sqrt(abs(x))
    bits = 72 + int(grow * 1.4427)
    one = 1 << bits
    X = _fixed(x, bits)
    b_re, b_im = Fraction(b.real), Fraction(b.imag)
    tr, ti = one, 0
    sr, si = one, 0
    j = 0
    while True:
        # term *= x / ((j+1) (b+j))
        cr = round((b_re + j) * (j + 1) * one)
        ci = round(b_im * (j + 1) * one)
        den = cr * cr + ci * ci
        if den == 0:
            raise ZeroDivisionError("series hit a pole of (b)_j")
        nr = (tr * X) >> bits
        ni = (ti * X) >> bits
        tr = (nr * cr + ni * ci) * one // den
        ti = (ni * cr - nr * ci) * one // den
        sr += tr
        si += ti
        j += 1
        tmag = math.hypot(tr / one, ti / one)
        smag = math.hypot(sr / one, si / one)
        if j > grow and tmag < tol * (smag + 1.0):
            break
        if j > 100000:
            raise RuntimeError("Bessel series failed to converge")
    return complex(sr / one, si / one)


def _hyp0f1_float(b, x, tol=1e-17):
    """Vectorised double precision sum_j x^j / (j! (b)_j) for array x."""
    x = np.asarray(x, dtype=float)
    term = np.ones(x.shape, dtype=complex)
    total = term.copy()
    jmax = int(2 * np.sqrt(np.abs(x).max(initial=0.0))) + 60
    for j in range(jmax):
        term = term * x / ((j + 1) * (b + j))
        total += term
        if np.all(np.abs(term) < tol * (np.abs(total) + 1.0)) and j > 2:
            break
    return total


def _negative_integer_order(beta):
    if beta.imag == 0 and beta.real < 0 and beta.real == math.floor(beta.real):
        return int(-beta.real)
    return None


def bessel_reduced(beta, r, tol=1e-17):
    """Entire part of J_beta: (r/2)^{-beta} J_beta(r).

    Equals sum_j (-1)^j (r/2)^{2j} / (j! Gamma(j+beta+1)); it is finite at
    r = 0 with value 1/Gamma(beta+1).  Accepts scalar or array ``r``.
    """
    beta = as_complex(beta, "beta")
    n = _negative_integer_order(beta)
    if n is not None:
        # J_{-n} = (-1)^n J_n
        sign = (-1) ** n
        return sign * (np.asarray(r, dtype=float) / 2) ** (2 * n) * bessel_reduced(n, r, tol)
    scale = rgamma(beta + 1)
    if np.ndim(r) == 0:
        r = float(r)
        if r < 0:
            raise ValueError("r must be >= 0")
        x = -r * r / 4
        if r <= _FLOAT_SERIES_MAX:
            s = complex(_hyp0f1_float(beta + 1, np.array(x), tol))
        else:
            s = _hyp0f1_fixed(beta + 1, x, tol)
        return scale * s
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    out = np.empty(r.shape, dtype=complex)
    small = r <= _FLOAT_SERIES_MAX
    out[small] = _hyp0f1_float(beta + 1, -r[small] ** 2 / 4, tol)
    big = ~small
    if np.any(big):
        # cancellation region: evaluate each distinct argument once
        uniq, inv = np.unique(r[big], return_inverse=True)
        vals = np.array([_hyp0f1_fixed(beta + 1, -u * u / 4, tol) for u in uniq])
        out[big] = vals[inv]
    return scale * out


def bessel_series(beta, r, tol=1e-17):
    """J_beta(r) from its power series, principal branch for (r/2)^beta.

    Parameters
    ----------
    beta : complex
        Order.
    r : float or ndarray
        Non-negative argument; intended for r up to the switch radius.
    tol : float
        Summation stops once a term falls below ``tol * (|partial sum| + 1)``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    beta = as_complex(beta, "beta")
    n = _negative_integer_order(beta)
    if n is not None:
        return (-1) ** n * bessel_series(n, r, tol)
    half = np.asarray(r, dtype=float) / 2
    if np.any(half < 0):
        raise ValueError("r must be >= 0")
    red = bessel_reduced(beta, r, tol)
    if beta == 0:
        pw = np.ones_like(half)
    else:
        if beta.real <= 0 and np.any(half == 0):
            raise ValueError("J_beta is singular at r = 0 for Re(beta) <= 0, beta != 0")
        safe = np.where(half > 0, half, 1.0)
        pw = np.where(half > 0, np.exp(beta * np.log(safe)), 0.0)
    out = pw * red
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Hankel asymptotic expansion
# ---------------------------------------------------------------------------

def _hankel_a(beta, kmax):
    mu = 4 * beta * beta
    a = [1.0 + 0j]
    for k in range(1, kmax + 1):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8))
    return a


def hankel_coefficients(beta):
    """Leading coefficients (b0, d0) of J_beta(r) ~ r^{-1/2}(b0 e^{ir} + d0 e^{-ir})."""
    beta = as_complex(beta, "beta")
    theta = beta * math.pi / 2 + math.pi / 4
    c = 1 / math.sqrt(2 * math.pi)
    return c * cmath.exp(-1j * theta), c * cmath.exp(1j * theta)


def _pq(beta, r, terms):
    a = _hankel_a(beta, 2 * terms)
    inv = 1.0 / r
    P = np.zeros(np.shape(r), dtype=complex)
    Q = np.zeros(np.shape(r), dtype=complex)
    for k in range(terms):
        P = P + (-1) ** k * a[2 * k] * inv ** (2 * k)
        Q = Q + (-1) ** k * a[2 * k + 1] * inv ** (2 * k + 1)
    return P, Q, a


def bessel_asymptotic(beta, r, terms=DEFAULT_CONFIG.asymptotic_terms):
    """J_beta(r) from the Hankel expansion, for r >= 1.

    Written as r^{-1/2} e^{ir} B(r) + r^{-1/2} e^{-ir} D(r), where
    B = b0 (P + iQ), D = d0 (P - iQ) and (b0, d0) come from
    :func:`hankel_coefficients`.  ``terms`` is the number of terms kept in
    each of P and Q.
    """
    beta = as_complex(beta, "beta")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 1):
        raise ValueError("asymptotic expansion requires r >= 1")
    if int(terms) < 1:
        raise ValueError("terms must be >= 1")
    P, Q, _ = _pq(beta, r_arr, int(terms))
    b0, d0 = hankel_coefficients(beta)
    out = (np.exp(1j * r_arr) * b0 * (P + 1j * Q) + np.exp(-1j * r_arr) * d0 * (P - 1j * Q)) / np.sqrt(r_arr)
    return complex(out) if np.ndim(out) == 0 else out


def asymptotic_error_estimate(beta, r, terms):
    """Size of the first omitted pair of Hankel terms, an O(r^{-2K-1/2}) estimate."""
    beta = as_complex(beta, "beta")
    r = np.asarray(r, dtype=float)
    a = _hankel_a(beta, 2 * terms + 1)
    amp = math.sqrt(2 / math.pi) * math.cosh(math.pi * beta.imag / 2)
    return amp * (abs(a[2 * terms]) * r ** (-2 * terms) + abs(a[2 * terms + 1]) * r ** (-2 * terms - 1)) / np.sqrt(r)


def bessel(beta, r, cfg=DEFAULT_CONFIG):
    """J_beta(r): power series below ``cfg.switch_radius``, Hankel expansion above."""
    beta = as_complex(beta, "beta")
    if np.ndim(r) == 0:
        r = float(r)
        if r < cfg.switch_radius:
            return bessel_series(beta, r, cfg.series_tol)
        return bessel_asymptotic(beta, r, cfg.asymptotic_terms)
    r = np.asarray(r, dtype=float)
    out = np.empty(r.shape, dtype=complex)
    low = r < cfg.switch_radius
    if np.any(low):
        out[low] = bessel_series(beta, r[low], cfg.series_tol)
    if np.any(~low):
        rh = r[~low]
        out[~low] = bessel_asymptotic(beta, rh, _terms_needed(beta, float(rh.min()), cfg.asymptotic_terms))
    return out


def _terms_needed(beta, rmin, cap):
    """Fewest Hankel terms (<= cap) whose omitted part is below double precision at rmin."""
    for k in range(1, cap):
        if asymptotic_error_estimate(beta, rmin, k) < 1e-17:
            return k
    return cap


# ---------------------------------------------------------------------------
# Multiplier and sphere measure
# ---------------------------------------------------------------------------

def _radial_symbol(order, prefactor, amp_exp, s, cfg):
    """prefactor * s^{-order} J_order(2 pi s) with the removable singularity at 0 cancelled.

    ``amp_exp`` is the exponent e in prefactor * pi^e * reduced(order, 2 pi s)
    that the small-argument form reduces to.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or not np.all(np.isfinite(s_arr)):
        raise ValueError("s must be finite and >= 0")
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)
    out = np.empty(s_arr.shape, dtype=complex)
    small = s_arr <= SMALL_S
    if np.any(small):
        out[small] = prefactor * math.pi ** amp_exp * bessel_reduced(order, 2 * math.pi * s_arr[small], cfg.series_tol)
    big = ~small
    if np.any(big):
        sb = s_arr[big]
        J = bessel(order, 2 * math.pi * sb, cfg)
        out[big] = prefactor * np.exp(-order * np.log(sb)) * J
    return complex(out[0]) if scalar else out


def multiplier(d, alpha, s, cfg=DEFAULT_CONFIG):
    """Symbol m^alpha(xi) of the generalized spherical mean at |xi| = s.

    m^alpha(xi) = pi^{1-alpha} |xi|^{-d/2-alpha+1} J_{d/2+alpha-1}(2 pi |xi|),
    with m^alpha(0) = pi^{d/2} / Gamma(d/2 + alpha).
    """
    if int(d) != d or d < 2:
        raise ValueError("d must be an integer >= 2")
    alpha = as_complex(alpha, "alpha")
    beta = d / 2 + alpha - 1
    # s^{-beta} J_beta(2 pi s) = pi^beta * reduced(beta, 2 pi s)
    pref = cmath.exp((1 - alpha) * math.log(math.pi))
    return _radial_symbol(beta, pref, beta, s, cfg)


def sphere_fourier(d, s, cfg=DEFAULT_CONFIG):
    """Fourier transform of surface measure on S^{d-1} at |xi| = s.

    Equals 2 pi s^{(2-d)/2} J_{(d-2)/2}(2 pi s); the value at 0 is the area
    of the sphere.
    """
    if int(d) != d or d < 2:
        raise ValueError("d must be an integer >= 2")
    order = (d - 2) / 2
    # s^{-order} J_order(2 pi s) = pi^order * reduced
    return _radial_symbol(complex(order), 2 * math.pi, order, s, cfg)
