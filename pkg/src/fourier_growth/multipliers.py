"""Closed-form Fourier multipliers of normalized symmetric measures.

A :class:`Multiplier` wraps the symbol ``mu_hat(xi)`` of a probability measure
on R^n together with a numerically stable evaluation of its deficit
``1 - mu_hat(xi)``; the deficit is what every inequality in this package
compares against ``min(1, |xi|^(2 sigma))``.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import ConfigError, DomainError
from .special_functions import (
    composite_nodes,
    one_minus_dai_ditzian_j,
    one_minus_j_mehler,
    spherical_bessel_j,
    vl_coefficients,
)

KINDS = ("sphere", "ball", "cube", "gauss", "wave", "polytope")

_POLY_ORDER = 32
_POLY_PHASE = 20.0   # radians of phase per face panel
_SMALL_XI = 0.25     # below this |xi| surface deficits use the sine-power average
_SMALL_ORDER = 6
_TAYLOR_TERMS = 40


def _as_points(xi, dim):
    xi = np.asarray(xi, dtype=float)
    if dim == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        xi = xi[..., None]
    if xi.shape[-1] != dim:
        raise DomainError(f"expected points with last axis {dim}, got shape {xi.shape}")
    return xi


@dataclass(frozen=True)
class Multiplier:
    """Symbol of a normalized, symmetric measure on R^dim.

    ``sigma`` is the claimed smoothness order; :func:`ksigma_scan` measures
    whether the claim holds.  Radial multipliers also carry ``radial`` and
    ``radial_deficit`` callables of ``|xi|``.
    """

    name: str
    dim: int
    sigma: float
    value: Callable = field(repr=False)
    deficit_fn: Callable = field(repr=False)
    is_radial: bool = False
    radial: Optional[Callable] = field(default=None, repr=False)
    radial_deficit: Optional[Callable] = field(default=None, repr=False)
    mehler_alpha: Optional[float] = None
    taylor: Optional[tuple] = field(default=None, repr=False)
    surface: Optional["PolytopeSurface"] = field(default=None, repr=False)
    positive: bool = True

    def symbol(self, xi):
        """Evaluate ``mu_hat`` on points of shape ``(..., dim)``."""
        return self.value(_as_points(xi, self.dim))

    def deficit(self, xi):
        """Evaluate ``1 - mu_hat`` without cancellation near the origin."""
        return self.deficit_fn(_as_points(xi, self.dim))

    def symbol_at_radius(self, lam, direction=None):
        """Symbol along a ray ``lam * direction``."""
        lam = np.asarray(lam, dtype=float)
        if self.is_radial:
            return self.radial(np.abs(lam))
        return self.symbol(np.multiply.outer(lam, _unit(direction, self.dim)))

    def deficit_at_radius(self, lam, direction=None):
        lam = np.asarray(lam, dtype=float)
        if self.is_radial:
            return self.radial_deficit(np.abs(lam))
        return self.deficit(np.multiply.outer(lam, _unit(direction, self.dim)))


def _unit(direction, dim):
    if direction is None:
        direction = np.eye(dim)[0]
    u = np.asarray(direction, dtype=float)
    return u / np.linalg.norm(u)


def _radial_multiplier(name, dim, sigma, radial, radial_deficit, **extra):
    def value(xi):
        return radial(np.linalg.norm(xi, axis=-1))

    def deficit(xi):
        return radial_deficit(np.linalg.norm(xi, axis=-1))

    return Multiplier(name=name, dim=dim, sigma=sigma, value=value, deficit_fn=deficit,
                      is_radial=True, radial=radial, radial_deficit=radial_deficit, **extra)


def _bessel_taylor(alpha):
    # 1 - j_alpha(r) = -sum_{m>=1} (-1/4)^m r^(2m) / (m! (alpha+1)_m)
    coeffs, term = [], 1.0
    for m in range(1, _TAYLOR_TERMS + 1):
        term *= -0.25 / (m * (alpha + m))
        coeffs.append(-term)
    return tuple(coeffs)


def _gauss_taylor():
    # 1 - exp(-r^2) = sum_{m>=1} (-1)^(m+1) r^(2m) / m!
    return tuple((-1.0) ** (m + 1) / math.factorial(m) for m in range(1, _TAYLOR_TERMS + 1))


def _sinc(r):
    return np.sinc(np.asarray(r) / np.pi)


def _one_minus_sinc(r):
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r < 0.5
    z = r[small] ** 2
    # 1 - sin r / r = z/6 - z^2/120 + z^3/5040 - ...
    term = np.ones_like(z)
    total = np.zeros_like(z)
    for k in range(1, 14):
        term = term * (-z) / ((2 * k) * (2 * k + 1))
        total = total - term
    out[small] = total
    out[~small] = 1.0 - np.sin(r[~small]) / r[~small]
    return out


@dataclass(frozen=True)
class PolytopeFace:
    """Flat face ``origin + sum_j u_j * edges[j]`` with ``u`` in the unit box."""

    origin: np.ndarray
    edges: np.ndarray

    @property
    def area(self):
        e = np.atleast_2d(self.edges)
        return float(math.sqrt(abs(np.linalg.det(e @ e.T))))

    @property
    def centroid(self):
        return self.origin + 0.5 * np.atleast_2d(self.edges).sum(axis=0)


@dataclass(frozen=True)
class PolytopeSurface:
    faces: tuple

    @property
    def dim(self):
        return int(np.asarray(self.faces[0].origin).size)

    @property
    def total_area(self):
        return float(sum(f.area for f in self.faces))

    def check_symmetric(self, tol=1e-12):
        """Raise :class:`ConfigError` unless the face set is closed under ``x -> -x``."""
        cents = np.array([f.centroid for f in self.faces])
        areas = np.array([f.area for f in self.faces])
        for i, c in enumerate(cents):
            dist = np.linalg.norm(cents + c, axis=1)
            j = int(np.argmin(dist))
            if dist[j] > tol * max(1.0, np.abs(c).max()) or abs(areas[j] - areas[i]) > tol * areas[i]:
                raise ConfigError(f"polytope surface is not centrally symmetric (face {i})")
        if len({tuple(np.round(c, 12)) for c in cents}) != len(cents):
            raise ConfigError("polytope surface has coincident faces")


def cube_surface(n, side=1.0):
    """Boundary of the axis-aligned cube of the given side, centered at 0."""
    return box_surface([side] * n)


def box_surface(sides):
    sides = np.asarray(sides, dtype=float)
    n = sides.size
    faces = []
    for k in range(n):
        others = [l for l in range(n) if l != k]
        edges = np.array([sides[l] * np.eye(n)[l] for l in others]).reshape(n - 1, n)
        for sign in (1.0, -1.0):
            origin = -0.5 * sides.copy()
            origin[k] = sign * 0.5 * sides[k]
            faces.append(PolytopeFace(origin=origin, edges=edges))
    return PolytopeSurface(tuple(faces))


def polytope_symbol(surface, xi, order=_POLY_ORDER):
    """Normalized surface average of ``cos(xi . x)`` by tensor Gauss-Legendre.

    On a flat face the tensor-product rule applied to ``exp(i xi.x)`` factors
    into one 1-D sum per edge direction, so the rule is evaluated as that
    product.  Panels per edge keep at most ~20 radians of phase per panel.
    """
    xi = np.asarray(xi, dtype=float)
    flat = xi.reshape(-1, xi.shape[-1])
    total = np.zeros(flat.shape[0], dtype=complex)
    area = surface.total_area
    for face in surface.faces:
        edges = np.atleast_2d(face.edges)
        acc = np.exp(1j * flat @ face.origin) * (face.area / area)
        for e in edges:
            phase = flat @ e
            acc = acc * _edge_average(phase, order)
        total += acc
    return total.real.reshape(xi.shape[:-1])


def _edge_average(phase, order):
    # mean over u in [0,1] of exp(i*phase*u), composite GL, panel count from |phase|
    out = np.empty(phase.shape, dtype=complex)
    panels = np.maximum(1, np.ceil(np.abs(phase) / _POLY_PHASE).astype(int))
    for p in np.unique(panels):
        idx = panels == p
        u, w = composite_nodes(np.linspace(0.0, 1.0, p + 1), order)
        out[idx] = np.exp(1j * np.outer(phase[idx], u)) @ w
    return out


def surface_sine_power(surface, xi, l, order=_SMALL_ORDER):
    """``4^l binom(2l,l)^-1`` times the surface average of ``sin(xi.x/2)^(2l)``.

    Equals ``1 - mu_hat`` for ``l = 1`` and the deficit of the order-l dilate
    combination in general.  The integrand is nonnegative, so this is the
    cancellation-free route for small ``|xi|``; the fixed tensor rule is only
    accurate while ``|xi| * diam`` stays of order one.
    """
    xi = np.asarray(xi, dtype=float)
    flat = xi.reshape(-1, xi.shape[-1])
    u, w = composite_nodes([0.0, 1.0], order)
    m = surface.dim - 1
    grid = np.stack(np.meshgrid(*([u] * m), indexing="ij"), axis=-1).reshape(-1, m)
    wgrid = np.prod(np.stack(np.meshgrid(*([w] * m), indexing="ij"), axis=-1).reshape(-1, m), axis=1)
    area = surface.total_area
    total = np.zeros(flat.shape[0])
    for face in surface.faces:
        pts = face.origin + grid @ np.atleast_2d(face.edges)
        h = np.sin(0.5 * flat @ pts.T)
        h *= h
        vals = h.copy()
        for _ in range(l - 1):
            vals *= h
        total += (face.area / area) * (vals @ wgrid)
    scale = 4.0 ** l / math.comb(2 * l, l)
    return (scale * total).reshape(xi.shape[:-1])


def _surface_deficit(surface, direct, l=1):
    # direct formula away from the origin, sine-power average near it
    def deficit(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.empty(xi.shape[:-1])
        small = np.linalg.norm(xi, axis=-1) < _SMALL_XI
        if np.any(small):
            out[small] = surface_sine_power(surface, xi[small], l)
        if not np.all(small):
            out[~small] = direct(xi[~small])
        return out
    return deficit


def cube_symbol(xi):
    """Normalized cube-surface symbol, side 1, ``mu_hat(0) = 1``.

    ``(1/n) sum_k cos(xi_k/2) prod_{l != k} sin(xi_l/2)/(xi_l/2)``.
    """
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[-1]
    c = np.cos(0.5 * xi)
    s = _sinc(0.5 * xi)
    total = np.zeros(xi.shape[:-1])
    for k in range(n):
        term = c[..., k]
        for l in range(n):
            if l != k:
                term = term * s[..., l]
        total = total + term
    return total / n


def make_multiplier(kind, dim, params=None):
    """Build a catalog multiplier, all with ``sigma = 1``.

    Parameters
    ----------
    kind : {'sphere', 'ball', 'cube', 'gauss', 'wave', 'polytope'}
    dim : int
    params : PolytopeSurface, optional
        Required for ``kind='polytope'``.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown multiplier kind {kind!r}; choose from {KINDS}")
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dimension must be a positive integer, got {dim!r}")
    dim = int(dim)
    if kind in ("sphere", "ball", "cube", "polytope") and dim < 2:
        raise DomainError(f"{kind} multiplier needs dim >= 2")

    nu = 0.5 * (dim - 2)
    if kind in ("sphere", "ball"):
        alpha = nu if kind == "sphere" else nu + 1.0
        return _radial_multiplier(
            f"{kind}{dim}", dim, 1.0,
            lambda r, a=alpha: spherical_bessel_j(a, r),
            lambda r, a=alpha: one_minus_j_mehler(a, r),
            mehler_alpha=alpha, taylor=_bessel_taylor(alpha))
    if kind == "gauss":
        return _radial_multiplier(
            f"gauss{dim}", dim, 1.0,
            lambda r: np.exp(-np.square(r)),
            lambda r: -np.expm1(-np.square(r)),
            taylor=_gauss_taylor())
    if kind == "wave":
        return _radial_multiplier(f"wave{dim}", dim, 1.0, _sinc, _one_minus_sinc,
                                  taylor=_bessel_taylor(0.5))
    if kind == "cube":
        surface = cube_surface(dim)
        return Multiplier(name=f"cube{dim}", dim=dim, sigma=1.0, value=cube_symbol,
                          deficit_fn=_surface_deficit(surface, lambda xi: 1.0 - cube_symbol(xi)),
                          surface=surface)
    if params is None:
        raise ConfigError("polytope multiplier requires a PolytopeSurface")
    if params.dim != dim:
        raise DomainError(f"polytope lives in R^{params.dim}, not R^{dim}")
    params.check_symmetric()
    return Multiplier(name=f"polytope{dim}", dim=dim, sigma=1.0,
                      value=lambda xi: polytope_symbol(params, xi),
                      deficit_fn=_surface_deficit(params, lambda xi: 1.0 - polytope_symbol(params, xi)),
                      surface=params)


def _check_l(l):
    if int(l) != l or l < 1:
        raise DomainError(f"l must be a positive integer, got {l!r}")
    return int(l)


def _lift(mu, value, deficit, **changes):
    """Compose pointwise maps of (symbol, deficit), keeping radial structure."""
    if mu.is_radial:
        rv = lambda r: value(mu.radial(r), mu.radial_deficit(r))
        rd = lambda r: deficit(mu.radial(r), mu.radial_deficit(r))
        return _radial_multiplier(changes.pop("name"), mu.dim, changes.pop("sigma"), rv, rd, **changes)
    return Multiplier(dim=mu.dim, is_radial=False,
                      value=lambda xi: value(mu.value(xi), mu.deficit_fn(xi)),
                      deficit_fn=lambda xi: deficit(mu.value(xi), mu.deficit_fn(xi)),
                      **changes)


def compose_power(mu, l):
    """Symbol of the l-fold convolution power, ``mu_hat ** l``."""
    l = _check_l(l)

    def deficit(s, d):
        # 1 - s^l = (1 - s)(1 + s + ... + s^(l-1))
        return d * sum(s ** j for j in range(l))

    return _lift(mu, lambda s, d: s ** l, deficit,
                 name=f"power({mu.name},{l})", sigma=mu.sigma, positive=mu.positive)


def compose_binomial(mu, l):
    """Binomial iterate with ``1 - mu'_hat = (1 - mu_hat) ** l``."""
    l = _check_l(l)
    coeffs = [(-1) ** (k + 1) * math.comb(l, l - k) for k in range(1, l + 1)]

    def value(s, d):
        return sum(c * s ** k for k, c in enumerate(coeffs, start=1))

    return _lift(mu, value, lambda s, d: d ** l,
                 name=f"binomial({mu.name},{l})", sigma=float(l) * mu.sigma, positive=False)


def compose_dai_ditzian(mu, l):
    """Combination ``sum_k a_k mu_hat(k xi)`` of dilates with ``a = vl_coefficients(l)``."""
    l = _check_l(l)
    a = vl_coefficients(l)
    name = f"dai_ditzian({mu.name},{l})"

    if mu.is_radial:
        def rvalue(r):
            return sum(ak * mu.radial(k * r) for k, ak in enumerate(a, start=1))

        if mu.mehler_alpha is not None:
            alpha = mu.mehler_alpha
            rdeficit = lambda r: one_minus_dai_ditzian_j(alpha, l, r)
        elif mu.taylor is not None:
            rdeficit = _moment_taylor_deficit(mu, a, l)
        else:
            rdeficit = lambda r: sum(ak * mu.radial_deficit(k * r) for k, ak in enumerate(a, start=1))
        return _radial_multiplier(name, mu.dim, float(l), rvalue, rdeficit, positive=False)

    def value(xi):
        return sum(ak * mu.value(k * xi) for k, ak in enumerate(a, start=1))

    def deficit(xi):
        # the coefficients sum to 1
        return sum(ak * mu.deficit_fn(k * xi) for k, ak in enumerate(a, start=1))

    if mu.surface is not None:
        deficit = _surface_deficit(mu.surface, deficit, l)

    return Multiplier(name=name, dim=mu.dim, sigma=float(l), value=value, deficit_fn=deficit,
                      positive=False)


def _moment_taylor_deficit(mu, a, l):
    # sum_k a_k d(k r) = sum_m b_m r^(2m) sum_k a_k k^(2m); the inner moments vanish for m < l
    b = np.array(mu.taylor)
    ks = np.arange(1, l + 1, dtype=float)
    moments = np.array([float(np.dot(a, ks ** (2 * m))) for m in range(1, b.size + 1)])
    moments[: l - 1] = 0.0
    coeffs = b * moments
    switch = 0.5 / l

    def deficit(r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        small = r < switch
        z = r[small] ** 2
        acc = np.zeros_like(z)
        for c in coeffs[::-1]:
            acc = (acc + c) * z
        out[small] = acc
        big = r[~small]
        out[~small] = sum(ak * mu.radial_deficit(k * big) for k, ak in enumerate(a, start=1))
        return out

    return deficit


def direction_set(dim, count):
    """Deterministic, well-spread unit vectors in R^dim.

    dim 2: equally spaced angles on a half circle (symbols are even);
    dim 3: golden-angle spiral; higher: unscrambled Halton points pushed through
    the normal quantile and normalized.
    """
    if count < 1:
        raise DomainError("need at least one direction")
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        ang = np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - i / count          # upper hemisphere suffices for even symbols
        rho = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - math.sqrt(5.0)) * i
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    pts = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass
class EquivalenceScan:
    """Measured two-sided constants of ``|1 - mu_hat| / min(1, |xi|^(2 sigma))``."""

    name: str
    sigma: float
    c_lower: float
    c_upper: float
    arg_lower: np.ndarray
    arg_upper: np.ndarray
    grid_spec: dict
    floor: float = 1e-4
    lambdas: Optional[np.ndarray] = field(default=None, repr=False)
    directions: Optional[np.ndarray] = field(default=None, repr=False)
    ratios: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def passed(self):
        return bool(self.c_lower > self.floor)

    def summary(self):
        return {
            "name": self.name,
            "sigma": self.sigma,
            "c_lower": self.c_lower,
            "c_upper": self.c_upper,
            "arg_lower": [float(v) for v in np.atleast_1d(self.arg_lower)],
            "arg_upper": [float(v) for v in np.atleast_1d(self.arg_upper)],
            "passed": self.passed,
            "grid": self.grid_spec,
        }

    def csv_rows(self):
        """Yield ``(name, sigma, lambda, direction_index, ratio)`` for every grid point."""
        if self.ratios is None:
            return
        for d, row in enumerate(self.ratios):
            for lam, r in zip(self.lambdas, row):
                yield self.name, self.sigma, float(lam), d, float(r)


def scan_ratio(mu, sigma, lam, direction=None):
    lam = np.asarray(lam, dtype=float)
    return np.abs(mu.deficit_at_radius(lam, direction)) / np.minimum(1.0, lam ** (2.0 * sigma))


def ksigma_scan(mu, sigma=None, lambda_min=1e-3, lambda_max=1e3, n_points=10_000,
                n_directions=64, extra_directions=None, floor=1e-4, polish=True,
                keep_grid=False):
    """Measure ``c_lower <= |1 - mu_hat(xi)| / min(1, |xi|^(2 sigma)) <= c_upper``.

    The ratio is sampled on a log-spaced radial grid (with ``|xi| = 1``
    inserted when in range, where the comparison function has its kink)
    times a deterministic direction set; radial symbols use one direction.
    With ``polish`` the extreme grid cells are refined by a bounded scalar
    search along their ray, so the constants approximate the true inf/sup.
    """
    sigma = mu.sigma if sigma is None else float(sigma)
    if not (0 < lambda_min < lambda_max) or not np.isfinite(lambda_max):
        raise DomainError("need 0 < lambda_min < lambda_max")
    if n_points < 2 or n_directions < 1 or sigma <= 0:
        raise DomainError("invalid scan grid")
    lam = np.logspace(math.log10(lambda_min), math.log10(lambda_max), int(n_points))
    if lambda_min < 1.0 < lambda_max:
        lam = np.unique(np.append(lam, 1.0))
    if mu.is_radial:
        dirs = np.eye(mu.dim)[:1]
    else:
        dirs = direction_set(mu.dim, int(n_directions))
        if extra_directions is not None and len(extra_directions):
            extra = np.asarray(extra_directions, dtype=float).reshape(-1, mu.dim)
            dirs = np.vstack([dirs, extra / np.linalg.norm(extra, axis=1, keepdims=True)])
    ratios = np.stack([scan_ratio(mu, sigma, lam, d) for d in dirs])

    def extreme(sign):
        flat = int(np.argmin(sign * ratios))
        d, i = divmod(flat, lam.size)
        best_lam, best = lam[i], ratios[d, i]
        if polish:
            lo, hi = lam[max(i - 1, 0)], lam[min(i + 1, lam.size - 1)]
            res = minimize_scalar(lambda x: sign * float(scan_ratio(mu, sigma, x, dirs[d])),
                                  bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-10 * hi})
            if sign * res.fun < sign * best:
                best_lam, best = float(res.x), sign * float(res.fun)
        return float(best), best_lam * dirs[d]

    c_lower, arg_lower = extreme(1.0)
    c_upper, arg_upper = extreme(-1.0)
    spec = {"lambda_min": lambda_min, "lambda_max": lambda_max, "n_points": int(n_points),
            "n_directions": int(dirs.shape[0]), "spacing": "log", "polished": bool(polish)}
    scan = EquivalenceScan(mu.name, sigma, c_lower, c_upper, arg_lower, arg_upper, spec, floor)
    if keep_grid:
        scan.lambdas, scan.directions, scan.ratios = lam, dirs, ratios
    return scan
