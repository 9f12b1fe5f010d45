"""Evaluation of the generalized spherical means A_t^alpha.

Three routes are provided:

* radial step functions at the origin, through closed-form kernel integrals
  (:func:`mean_step_at_origin`) and, for ball averages, off the origin
  through spherical cap measures (:func:`ball_average_offcenter`);
* radial Fourier profiles, through the one-dimensional frequency integral
  A_t f(x) = int fhat(rho) m^alpha(t rho) theta(rho |x|) rho^{d-1} drho
  (:func:`mean_radial_freq`);
* periodic sample grids, through the FFT (:func:`apply_mean_grid`).
"""
from dataclasses import dataclass, field
from typing import Callable
import math
import struct

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special as sps

from .special import (
    DEFAULT_CONFIG,
    as_complex,
    ball_volume,
    gamma,
    multiplier,
    sphere_area,
    sphere_fourier,
)

__all__ = [
    "ResolutionError",
    "RadialStep",
    "RadialProfile",
    "GridField",
    "kernel_integral",
    "mean_step_at_origin",
    "cap_measure",
    "ball_average_offcenter",
    "QuadratureResult",
    "mean_radial_freq",
    "inverse_radial",
    "apply_mean_grid",
    "smooth_step",
    "lp_window",
    "banded_multiplier",
]


class ResolutionError(RuntimeError):
    """Raised when a quadrature cannot meet its resolution rule within the node budget."""


# ---------------------------------------------------------------------------
# Radial step functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialStep:
    """f(x) = sum_j coeffs[j] * 1{breakpoints[j] <= |x| < breakpoints[j+1]} on R^d."""

    breakpoints: np.ndarray
    coeffs: np.ndarray
    d: int = 2

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float).ravel()
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if b.size != c.size + 1:
            raise ValueError("need exactly one more breakpoint than coefficient")
        if b[0] < 0 or np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be non-negative and strictly ascending")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("breakpoints and coefficients must be finite")
        if int(self.d) != self.d or self.d < 2:
            raise ValueError("d must be an integer >= 2")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "d", int(self.d))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        j = np.searchsorted(self.breakpoints, r, side="right") - 1
        inside = (j >= 0) & (j < self.coeffs.size)
        out = np.zeros(r.shape, dtype=complex)
        out[inside] = self.coeffs[j[inside]]
        return out

    def sup_norm(self):
        return float(np.abs(self.coeffs).max(initial=0.0))

    def refine(self, breakpoints):
        """Same function on the union of its breakpoints and ``breakpoints``."""
        b = np.union1d(self.breakpoints, np.asarray(breakpoints, dtype=float))
        mid = 0.5 * (b[1:] + b[:-1])
        return RadialStep(b, self(mid), self.d)

    def __add__(self, other):
        if not isinstance(other, RadialStep) or other.d != self.d:
            return NotImplemented
        b = np.union1d(self.breakpoints, other.breakpoints)
        mid = 0.5 * (b[1:] + b[:-1])
        return RadialStep(b, self(mid) + other(mid), self.d)

    def __mul__(self, scalar):
        return RadialStep(self.breakpoints, complex(scalar) * self.coeffs, self.d)

    __rmul__ = __mul__


def _beta_lower(v, p, alpha, tol=1e-17):
    """(1/2) int_0^v s^{p-1} (1-s)^{alpha-1} ds for 0 <= v <= 1/2."""
    if v == 0:
        return 0j
    total, term, k = 0j, 1.0 + 0j, 0
    while True:
        add = term / (p + k)
        total += add
        if abs(add) < tol * abs(total) and k > 3:
            break
        term *= (k + 1 - alpha) / (k + 1) * v
        k += 1
        if k > 10000:
            raise RuntimeError("kernel series did not converge")
    return 0.5 * v ** p * total


def _beta_upper(w, p, alpha, tol=1e-17):
    """(1/2) int_{1-w}^1 s^{p-1} (1-s)^{alpha-1} ds for 0 <= w <= 1/2, Re alpha > 0."""
    if w == 0:
        return 0j
    total, term, k = 0j, 1.0 + 0j, 0
    while True:
        add = term / (alpha + k)
        total += add
        if abs(add) < tol * abs(total) and k > 3:
            break
        term *= (k + 1 - p) / (k + 1) * w
        if term == 0:
            break
        k += 1
        if k > 10000:
            raise RuntimeError("kernel series did not converge")
    return 0.5 * np.exp(alpha * math.log(w)) * total


def kernel_integral(alpha, d, u_a, u_b):
    """int_{u_a}^{u_b} (1-u^2)^{alpha-1} u^{d-1} du for 0 <= u_a <= u_b <= 1, Re alpha > 0.

    With v = u^2 this is half an incomplete beta integral; it is summed from
    the hypergeometric series about v = 0 on [0, 1/2] and about v = 1 on
    [1/2, 1], both of which converge at least geometrically with ratio 1/2.
    """
    alpha = as_complex(alpha, "alpha")
    if not alpha.real > 0:
        raise ValueError("kernel (1-u^2)^(alpha-1) is not integrable for Re(alpha) <= 0")
    if not 0 <= u_a <= u_b <= 1:
        raise ValueError("need 0 <= u_a <= u_b <= 1")
    if u_a == u_b:
        return 0j
    p = d / 2
    va, vb = u_a * u_a, u_b * u_b
    wa, wb = (1 - u_a) * (1 + u_a), (1 - u_b) * (1 + u_b)
    if vb <= 0.5:
        return _beta_lower(vb, p, alpha) - _beta_lower(va, p, alpha)
    if va >= 0.5:
        return _beta_upper(wa, p, alpha) - _beta_upper(wb, p, alpha)
    return (_beta_lower(0.5, p, alpha) - _beta_lower(va, p, alpha)
            + _beta_upper(0.5, p, alpha) - _beta_upper(wb, p, alpha))


def mean_step_at_origin(f, alpha, t):
    """A_t^alpha f(0) for a radial step function, Re alpha > 0.

    A_t^alpha f(0) = sigma(S^{d-1}) / (Gamma(alpha) t^d)
                     * int_0^t (1 - r^2/t^2)^{alpha-1} f(r) r^{d-1} dr.

    For alpha = 1 each step contributes |B(0,1)| c_j (min(b_j,t)^d - min(b_{j-1},t)^d) / t^d.
    """
    alpha = as_complex(alpha, "alpha")
    if not alpha.real > 0:
        raise ValueError("spatial mean requires Re(alpha) > 0")
    if not t > 0:
        raise ValueError("t must be positive")
    d = f.d
    u = np.minimum(f.breakpoints / t, 1.0)
    if alpha == 1:
        return complex(ball_volume(d) * np.sum(f.coeffs * (u[1:] ** d - u[:-1] ** d)))
    total = 0j
    for c, ua, ub in zip(f.coeffs, u[:-1], u[1:]):
        if c != 0 and ub > ua:
            total += c * kernel_integral(alpha, d, float(ua), float(ub))
    return sphere_area(d) / gamma(alpha) * total


def _cap_fraction(c, d):
    """Fraction of S^{d-1} whose cosine with a fixed axis is >= c."""
    cc = np.clip(c, -1.0, 1.0)
    half = 0.5 * sps.betainc((d - 1) / 2, 0.5, 1 - cc * cc)
    frac = np.where(cc >= 0, half, 1 - half)
    return np.where(c <= -1, 1.0, np.where(c >= 1, 0.0, frac))


def cap_measure(r, x_norm, t, d):
    """(d-1)-measure of the sphere {|y| = r} inside the ball B(x, t), |x| = x_norm."""
    r = np.asarray(r, dtype=float)
    full = sphere_area(d) * r ** (d - 1)
    if x_norm == 0:
        return np.where(r <= t, full, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = ((r - t) * (r + t) + x_norm * x_norm) / (2 * r * x_norm)
    c = np.where(r > 0, c, np.where(x_norm <= t, -np.inf, np.inf))
    return _cap_fraction(c, d) * full


def _shell_integrand(s, x_norm, t, d):
    # cap_measure at r = t + |x| s, times dr/ds; the cosine is formed from s
    # so that shells thinner than ulp(t) keep full resolution
    r = t + x_norm * s
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (s * (2 * t + x_norm * s) + x_norm) / (2 * r)
    c = np.where(r > 0, c, -np.inf)
    return _cap_fraction(c, d) * sphere_area(d) * r ** (d - 1) * x_norm


def ball_average_offcenter(f, t, x_norm):
    """A_t^1 f(x) = t^{-d} int_{B(x,t)} f for a radial step f and |x| = x_norm.

    Radii where the sphere lies fully inside (or outside) the ball are
    integrated in closed form; only the shell |t - |x|| < r < t + |x| is
    handled by adaptive quadrature of the cap measure, in the shell
    coordinate s = (r - t)/|x|.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if x_norm < 0:
        raise ValueError("x_norm must be >= 0")
    d = f.d
    if x_norm == 0:
        return mean_step_at_origin(f, 1, t)
    lo_full = t - x_norm  # spheres with r <= lo_full lie inside B(x,t)
    # shell |t - |x|| < r < t + |x| in s = (r - t)/|x|
    s_lo = -1.0 if t >= x_norm else (x_norm - 2 * t) / x_norm
    vol = ball_volume(d)
    total = 0j
    for c, a, b in zip(f.coeffs, f.breakpoints[:-1], f.breakpoints[1:]):
        if c == 0:
            continue
        acc = 0.0
        if lo_full > 0:
            fa, fb = min(a, lo_full), min(b, lo_full)
            if fb > fa:
                acc += vol * (fb ** d - fa ** d)
        sa = max((a - t) / x_norm, s_lo)
        sb = min((b - t) / x_norm, 1.0)
        if sb > sa:
            val, _ = integrate.quad(_shell_integrand, sa, sb, args=(x_norm, t, d),
                                    epsabs=1e-14 * t ** d, epsrel=1e-12, limit=200)
            acc += val
        total += c * acc
    return total / t ** d


# ---------------------------------------------------------------------------
# Radial Fourier profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """Radial frequency profile fhat(|xi|) supported in [r_lo, r_hi] on R^d.

    ``oscillation`` bounds the local angular frequency (radians per unit of
    rho) of ``func``; the quadrature uses it to size its panels.
    """

    func: Callable
    r_lo: float
    r_hi: float
    d: int = 2
    oscillation: float = 0.0

    def __post_init__(self):
        if not (0 <= self.r_lo < self.r_hi < math.inf):
            raise ValueError("support must be a bounded interval [r_lo, r_hi]")

    def __call__(self, rho):
        return self.func(rho)


@dataclass
class QuadratureResult:
    value: complex
    error: float
    nodes: int

    def __complex__(self):
        return complex(self.value)


_GL_CACHE = {}
# below this fraction of int |integrand| a difference of rules is roundoff
ROUNDOFF_FLOOR = 1e-13


def _gauss(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    return _GL_CACHE[n]


def _panel_sum(integrand, edges, n, chunk=400_000):
    x0, w0 = _gauss(n)
    total = 0j
    mass = 0.0
    per = max(1, chunk // n)
    for k in range(0, edges.size - 1, per):
        a = edges[k:k + per + 1]
        lo, hi = a[:-1], a[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
        w = (half[:, None] * w0[None, :]).ravel()
        g = w * integrand(x)
        total += np.sum(g)
        mass += np.sum(np.abs(g))
    return total, mass


def mean_radial_freq(fhat, alpha, t, x_norm=0.0, d=None, *, rtol=1e-6,
                     node_cap=20_000_000, order=12, cfg=DEFAULT_CONFIG):
    """A_t^alpha f(x) for f with radial Fourier transform ``fhat``.

    Evaluates int fhat(rho) m^alpha(t rho) theta(rho |x|) rho^{d-1} drho, theta
    being the Fourier transform of the sphere measure, with composite
    Gauss-Legendre panels.  Each panel spans at most half an oscillation of
    the combined phase (profile, multiplier and theta), so ``order`` nodes
    per panel give at least 2*order nodes per oscillation.  The error is
    estimated against an order-``order//2+2`` rule on the same panels; panels
    are halved until the estimate is below ``rtol`` relative, or below
    ``ROUNDOFF_FLOOR`` times int |integrand| when the value itself is lost
    to cancellation.

    Raises
    ------
    ResolutionError
        If meeting the rule would need more than ``node_cap`` nodes.
    """
    d = fhat.d if d is None else int(d)
    alpha = as_complex(alpha, "alpha")
    if not t > 0:
        raise ValueError("t must be positive")
    if x_norm < 0:
        raise ValueError("x_norm must be >= 0")

    def integrand(rho):
        val = fhat(rho) * multiplier(d, alpha, t * rho, cfg) * rho ** (d - 1)
        if x_norm == 0:
            return val * sphere_area(d)
        return val * sphere_fourier(d, rho * x_norm, cfg)

    omega = fhat.oscillation + 2 * math.pi * (t + x_norm)
    return _adaptive_panels(integrand, fhat.r_lo, fhat.r_hi, omega, rtol, node_cap, order)


def inverse_radial(fhat, x_norm, d=None, *, rtol=1e-8, node_cap=20_000_000, order=12,
                   cfg=DEFAULT_CONFIG):
    """f(x) at |x| = x_norm from its radial Fourier profile (the same quadrature with m = 1)."""
    d = fhat.d if d is None else int(d)
    if x_norm < 0:
        raise ValueError("x_norm must be >= 0")

    def integrand(rho):
        return fhat(rho) * sphere_fourier(d, rho * x_norm, cfg) * rho ** (d - 1)

    omega = fhat.oscillation + 2 * math.pi * x_norm
    return _adaptive_panels(integrand, fhat.r_lo, fhat.r_hi, omega, rtol, node_cap, order)


def _adaptive_panels(integrand, lo, hi, omega, rtol, node_cap, order):
    panels = max(4, int(math.ceil((hi - lo) * omega / math.pi)))
    low = order // 2 + 2
    while True:
        nodes = panels * (order + low)
        if nodes > node_cap:
            raise ResolutionError(
                f"need {nodes} quadrature nodes (cap {node_cap}); raise node_cap or lower the frequency")
        edges = np.linspace(lo, hi, panels + 1)
        hi_val, mass = _panel_sum(integrand, edges, order)
        lo_val, _ = _panel_sum(integrand, edges, low)
        err = abs(hi_val - lo_val)
        if err <= max(rtol * abs(hi_val), ROUNDOFF_FLOOR * mass):
            return QuadratureResult(complex(hi_val), float(err), nodes)
        panels *= 2


# ---------------------------------------------------------------------------
# Periodic grids
# ---------------------------------------------------------------------------

_MAGIC = b"VSPH"
_VERSION = 1
_HEADER = struct.Struct("<4sIIId8x")  # 32 bytes


@dataclass
class GridField:
    """Complex samples on a periodic grid: N points per axis over a box of side ``box``."""

    d: int
    N: int
    box: float
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError("d must be an integer >= 2")
        if self.N < 1 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if not self.box > 0:
            raise ValueError("box must be positive")
        data = np.asarray(self.data, dtype=complex)
        if data.size != self.N ** self.d:
            raise ValueError(f"data has {data.size} entries, expected N^d = {self.N ** self.d}")
        self.data = data.reshape((self.N,) * self.d)

    @property
    def spacing(self):
        return self.box / self.N

    def coords(self):
        """1-D coordinate vector shared by every axis: 0, h, ..., box - h."""
        return np.arange(self.N) * self.spacing

    def to_bytes(self):
        """32-byte little-endian header (magic, version, d, N, box) then complex128 data."""
        head = _HEADER.pack(_MAGIC, _VERSION, self.d, self.N, float(self.box))
        return head + self.data.astype("<c16").tobytes(order="C")

    @classmethod
    def from_bytes(cls, buf):
        if len(buf) < _HEADER.size:
            raise ValueError("buffer shorter than header")
        magic, version, d, N, box = _HEADER.unpack_from(buf)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        if version != _VERSION:
            raise ValueError(f"unsupported version {version}")
        data = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size)
        if data.size != N ** d:
            raise ValueError("payload size does not match header")
        return cls(d, N, box, data.astype(complex))

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def _frequency_radius(f):
    k = np.fft.fftfreq(f.N, d=f.spacing)
    grids = np.meshgrid(*([k] * f.d), indexing="ij", sparse=True)
    return np.sqrt(sum(g * g for g in grids))


def apply_mean_grid(f, alpha, t, cfg=DEFAULT_CONFIG):
    """A_t^alpha applied to a periodic grid field by the discrete Fourier transform.

    Lattice frequencies xi in (1/box) Z^d (folded to the symmetric range)
    are multiplied by m^alpha(t |xi|), so lattice exponentials are exact
    eigenfunctions.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    rad = _frequency_radius(f)
    uniq, inv = np.unique(rad, return_inverse=True)
    symbol = multiplier(f.d, alpha, t * uniq, cfg)[inv].reshape(rad.shape)
    out = np.fft.ifftn(np.fft.fftn(f.data) * symbol)
    return GridField(f.d, f.N, f.box, out)


# ---------------------------------------------------------------------------
# Littlewood-Paley pieces
# ---------------------------------------------------------------------------

def _mollifier_exp(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def smooth_step(x):
    """C^infinity step: 0 for x <= 0, 1 for x >= 1, built from e^{-1/x}."""
    a = _mollifier_exp(x)
    b = _mollifier_exp(1 - np.asarray(x, dtype=float))
    return a / (a + b)


def _psi0(s):
    return smooth_step(2.0 - np.asarray(s, dtype=float))


def lp_window(k, s):
    """Littlewood-Paley window psi_k at |xi| = s.

    psi_0 equals 1 on [0, 1] and 0 on [2, inf); for k >= 1,
    psi_k(s) = psi_0(2^{-k} s) - psi_0(2^{1-k} s), supported in [2^{k-1}, 2^{k+1}].
    """
    if int(k) != k or k < 0:
        raise ValueError("k must be a non-negative integer")
    s = np.asarray(s, dtype=float)
    if k == 0:
        out = _psi0(s)
    else:
        out = _psi0(s / 2.0 ** k) - _psi0(s / 2.0 ** (k - 1))
    return float(out) if out.ndim == 0 else out


def banded_multiplier(d, alpha, k, s, cfg=DEFAULT_CONFIG):
    """m_k^alpha(s) = m^alpha(s) psi_k(s); zero off the window's support."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    w = np.atleast_1d(lp_window(k, s_arr))
    out = np.zeros(s_arr.shape, dtype=complex)
    on = w != 0
    if np.any(on):
        out[on] = multiplier(d, alpha, s_arr[on], cfg) * w[on]
    return complex(out[0]) if np.ndim(s) == 0 else out
