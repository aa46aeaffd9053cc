r"""Normalized spherical Bessel functions and related kernels.

The normalized Bessel function

.. math:: j_\alpha(\lambda) = 2^\alpha \Gamma(\alpha+1) \lambda^{-\alpha} J_\alpha(\lambda)

is evaluated by its power series for small arguments and by the Mehler
cosine integral

.. math:: j_\alpha(\lambda) = c_\alpha \int_0^1 (1-s^2)^{\alpha-1/2} \cos(\lambda s)\,ds,
          \qquad c_\alpha = \frac{2\Gamma(\alpha+1)}{\sqrt\pi\,\Gamma(\alpha+1/2)}

elsewhere.  With ``s = cos(x)`` the weight becomes ``sin(x)**(2 alpha)`` on
``[0, pi/2]``, which removes the endpoint singularity; the remaining
algebraic behaviour at ``x = 0`` is handled by a geometrically graded mesh.

All functions accept scalars or arrays for the argument ``lam`` and return a
float for scalar input.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError

SERIES_SWITCH = 0.5
DEFAULT_ORDER = 64

# panel layout of the Mehler quadrature
_GRADED_EDGE = 0.05          # graded region [0, _GRADED_EDGE] near the weight's zero
_GRADING_RATIO = 0.25
_GRADING_LEVELS = 24
_GRADED_ORDER = 16
_PHASE_PER_PANEL = 40.0      # max radians of cos(lam*s) oscillation per panel
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a rule on ``[-1, 1]``."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f, a=-1.0, b=1.0):
        """Apply the rule to ``f`` on ``[a, b]``."""
        half = 0.5 * (b - a)
        x = 0.5 * (a + b) + half * self.nodes
        return half * float(np.dot(self.weights, f(x)))

    def __len__(self):
        return len(self.nodes)


def gauss_legendre(m):
    """Return the m-point Gauss-Legendre rule on ``[-1, 1]``.

    Parameters
    ----------
    m : int
        Number of nodes, ``m >= 1``.

    Returns
    -------
    QuadratureRule
        Exact for polynomials of degree ``<= 2m - 1``.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"quadrature order must be a positive integer, got {m!r}")
    nodes, weights = _leggauss(int(m))
    return QuadratureRule(nodes.copy(), weights.copy())


@lru_cache(maxsize=64)
def _leggauss(m):
    nodes, weights = np.polynomial.legendre.leggauss(m)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_nodes(edges, order):
    """Gauss-Legendre nodes and weights on consecutive panels ``edges[i]..edges[i+1]``."""
    edges = np.asarray(edges, dtype=float)
    x, w = _leggauss(order)
    a = edges[:-1, None]
    h = 0.5 * np.diff(edges)[:, None]
    nodes = (a + h * (x + 1.0)).ravel()
    weights = (h * w).ravel()
    return nodes, weights


def _check_alpha(alpha):
    if not np.isfinite(alpha) or alpha <= -0.5:
        raise DomainError(f"order alpha must exceed -1/2, got {alpha!r}")


def _as_lambda(lam):
    arr = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.any(arr < 0):
        raise DomainError("argument must be nonnegative")
    return arr


def _scalar_out(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


def mehler_constant(alpha):
    """c_alpha = 2 Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2))."""
    _check_alpha(alpha)
    return 2.0 * math.exp(math.lgamma(alpha + 1.0) - math.lgamma(alpha + 0.5)) / math.sqrt(math.pi)


@lru_cache(maxsize=256)
def _mehler_rule(alpha, panels, order):
    # x in [0, pi/2] with s = cos(x); weight sin(x)**(2 alpha)
    coarse = np.linspace(_GRADED_EDGE, 0.5 * math.pi, panels + 1)
    x1, w1 = composite_nodes(coarse, order)
    graded = _GRADED_EDGE * _GRADING_RATIO ** np.arange(_GRADING_LEVELS, -1, -1)
    x2, w2 = composite_nodes(graded, _GRADED_ORDER)
    x = np.concatenate([x2, x1])
    w = np.concatenate([w2, w1]) * np.sin(x) ** (2.0 * alpha)
    s = np.cos(x)
    # closed-form remainder on [0, eps]: sin(x)**(2a) ~ x**(2a), s ~ 1
    eps = graded[0]
    remainder = eps ** (2.0 * alpha + 1.0) / (2.0 * alpha + 1.0)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w, remainder


def mehler_average(alpha, lam, g, order=DEFAULT_ORDER):
    r"""Evaluate :math:`c_\alpha \int_0^1 (1-s^2)^{\alpha-1/2} g(\lambda s)\,ds`.

    ``g`` must be a vectorized even function, bounded near 0.  The panel count
    grows with ``lam`` so each panel carries at most ~40 radians of phase.
    """
    _check_alpha(alpha)
    lam = _as_lambda(lam)
    flat = np.atleast_1d(lam).ravel()
    out = np.empty_like(flat)
    c = mehler_constant(alpha)
    panels = np.maximum(1, np.ceil(flat * 0.5 * math.pi / _PHASE_PER_PANEL).astype(int))
    for p in np.unique(panels):
        idx = np.nonzero(panels == p)[0]
        s, w, remainder = _mehler_rule(float(alpha), int(p), int(order))
        rows = max(1, _CHUNK_ELEMENTS // s.size)
        for start in range(0, idx.size, rows):
            sel = idx[start:start + rows]
            vals = g(np.outer(flat[sel], s))
            out[sel] = c * (vals @ w + remainder * g(flat[sel]))
    return _scalar_out(out.reshape(np.shape(lam)), lam)


def _series_j(alpha, lam):
    z = -0.25 * lam * lam
    term = np.ones_like(lam)
    total = np.ones_like(lam)
    for k in range(1, 30):
        term = term * z / (k * (alpha + k))
        total = total + term
    return total


def _series_one_minus_j(alpha, lam):
    z = -0.25 * lam * lam
    term = np.ones_like(lam)
    total = np.zeros_like(lam)
    for k in range(1, 30):
        term = term * z / (k * (alpha + k))
        total = total - term
    return total


def spherical_bessel_j(alpha, lam):
    r"""Normalized Bessel function :math:`j_\alpha(\lambda)`, with ``j_alpha(0) = 1``.

    Uses the power series below ``lam = 0.5`` and the Mehler cosine integral
    above it.
    """
    _check_alpha(alpha)
    arr = _as_lambda(lam)
    flat = np.atleast_1d(arr).astype(float).ravel()
    out = np.empty_like(flat)
    small = flat < SERIES_SWITCH
    out[small] = _series_j(alpha, flat[small])
    if np.any(~small):
        out[~small] = mehler_average(alpha, flat[~small], np.cos)
    return _scalar_out(out.reshape(np.shape(arr)), arr)


def _half_sin_sq(y):
    h = np.sin(0.5 * y)
    return h * h


def one_minus_j_mehler(alpha, lam):
    r"""Return :math:`1 - j_\alpha(\lambda)` from the Mehler sine-squared integral.

    .. math:: 1 - j_\alpha(\lambda) = 2 c_\alpha \int_0^1 (1-s^2)^{\alpha-1/2}
              \sin^2\frac{\lambda s}{2}\,ds

    The integrand is nonnegative, so there is no cancellation as ``lam -> 0``.
    """
    _check_alpha(alpha)
    return 2.0 * mehler_average(alpha, lam, _half_sin_sq)


def one_minus_j_series(alpha, lam):
    """``1 - j_alpha`` by the power series; accurate for ``lam`` below ~2."""
    _check_alpha(alpha)
    arr = _as_lambda(lam)
    return _scalar_out(_series_one_minus_j(alpha, np.asarray(arr, dtype=float)), arr)


def _binom(a, b):
    return math.comb(a, b)


def vl_coefficients(l):
    """Coefficients ``a_k`` (k = 1..l) with ``v_l(y) = sum_k a_k cos(k y)``."""
    if int(l) != l or l < 1:
        raise DomainError(f"l must be a positive integer, got {l!r}")
    l = int(l)
    scale = 2.0 / _binom(2 * l, l)
    return np.array([scale * (-1) ** (k + 1) * _binom(2 * l, l - k) for k in range(1, l + 1)])


def vl_trig(l, y):
    """Trigonometric kernel ``v_l(y) = 2 binom(2l,l)^-1 sum_k (-1)^(k+1) binom(2l,l-k) cos(k y)``."""
    coeffs = vl_coefficients(l)
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y)
    for k, a in enumerate(coeffs, start=1):
        total = total + a * np.cos(k * y)
    return _scalar_out(total, y)


def one_minus_vl(l, y):
    """Closed form ``1 - v_l(y) = 4^l binom(2l,l)^-1 sin(y/2)^(2l)``."""
    if int(l) != l or l < 1:
        raise DomainError(f"l must be a positive integer, got {l!r}")
    l = int(l)
    y = np.asarray(y, dtype=float)
    val = 4.0 ** l / _binom(2 * l, l) * np.sin(0.5 * y) ** (2 * l)
    return _scalar_out(val, y)


def dai_ditzian_j(alpha, l, lam):
    r"""Combination :math:`j_{\alpha,l}(\lambda) = c_\alpha\int_0^1 (1-s^2)^{\alpha-1/2} v_l(\lambda s)\,ds`."""
    vl_coefficients(l)
    return mehler_average(alpha, lam, lambda y: vl_trig(l, y))


def one_minus_dai_ditzian_j(alpha, l, lam):
    """``1 - j_{alpha,l}(lam)`` via the nonnegative ``sin^(2l)`` Mehler integral."""
    vl_coefficients(l)
    return mehler_average(alpha, lam, lambda y: one_minus_vl(l, y))


def unit_sphere_measures(n):
    """Return ``(area of S^{n-1}, volume of the unit ball in R^n)``.

    For ``n = 1`` the sphere is the two-point set ``{-1, 1}`` and the ball is
    ``[-1, 1]``, giving ``(2, 2)``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    if n == 1:
        return 2.0, 2.0
    area = 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)
    return area, area / n
