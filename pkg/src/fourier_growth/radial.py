"""Radial functions on R^n.

A radial function ``f(x) = f~(|x|)`` is stored as a :class:`RadialProfile`.
Integrals over ``(0, inf)`` use composite Gauss-Legendre panels spaced
logarithmically, with power-law corrections for the pieces below the first
and beyond the last panel.  Fourier transforms use the convention
``f^(xi) = int f(x) e^{-i x.xi} dx``, which for radial f reduces to

    F(lam) = |S^{n-1}| int_0^inf f~(r) j_nu(lam r) r^{n-1} dr,   nu = (n-2)/2.
"""

from dataclasses import dataclass, field
import io
import math
import warnings

import numpy as np
from scipy import special

from .errors import AccuracyError, DivergenceError, DomainError
from .special_functions import _leggauss, unit_sphere_measures

PANELS_PER_DECADE = 48
ORDER = 16
R_MIN = 1e-10
R_MAX = 1e3
MIN_NODES_PER_PERIOD = 10.0
_PERIODS_PER_PANEL = 1.5
_CHUNK = 2_000_000
_THETA_PANELS = 24


class AccuracyWarning(UserWarning):
    """Quadrature accuracy is degraded (for example on the r = t diagonal)."""


@dataclass(frozen=True)
class RadialProfile:
    """Radial function ``f~ : (0, inf) -> R`` on R^dim.

    ``singularity`` is the exponent gamma with ``|f~(r)| <= C r^-gamma`` near 0
    and ``decay`` the exponent d with ``f~(r) ~ r^-d`` at infinity (None when
    faster than any power).  ``breakpoints`` lists radii where f~ jumps and
    ``support`` truncates the profile.
    """

    dim: int
    profile: object
    singularity: float = 0.0
    decay: float = None
    breakpoints: tuple = ()
    support: float = math.inf
    name: str = "profile"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dim!r}")
        if not 0 <= self.singularity < self.dim:
            raise DomainError("singularity exponent must lie in [0, dim)")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.profile(r), dtype=float)
        if math.isfinite(self.support):
            out = np.where(r <= self.support, out, 0.0)
        return out

    @property
    def nu(self):
        return 0.5 * (self.dim - 2)

    def power_bound(self, r_min=1e-12, r_max=1e6, points=400):
        """``max |f~(r)| r^gamma`` on a log grid; finite for an admissible profile."""
        r = np.geomspace(r_min, r_max, points)
        vals = np.abs(self(r)) * r ** self.singularity
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"{self.name} is not finite on the test grid")
        return float(vals.max())

    def scaled(self, a):
        """Profile ``r -> f~(r / a)``."""
        base = self.profile
        return RadialProfile(self.dim, lambda r: base(r / a), self.singularity, self.decay,
                             tuple(a * b for b in self.breakpoints), a * self.support,
                             f"{self.name}(r/{a:g})")


@dataclass(frozen=True)
class ShellTransform:
    """Samples ``F(lam)`` of a radial Fourier transform on an increasing grid."""

    dim: int
    lambdas: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.ndim != 1 or lam.shape != val.shape:
            raise DomainError("lambdas and values must be 1-D arrays of equal length")
        if lam.size > 1 and np.any(np.diff(lam) <= 0):
            raise DomainError("lambda grid must be strictly increasing")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(val))):
            raise DomainError("transform samples must be finite")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "values", val)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("lambda,value\n")
        for lam, v in zip(self.lambdas, self.values):
            buf.write(f"{float(lam)!r},{float(v)!r}\n")
        return buf.getvalue()


def make_titchmarsh_profile(n, gamma):
    """Profile ``1 / (r^gamma + r^n)`` with ``0 < gamma < n``."""
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    if not 0 < gamma < n:
        raise DomainError(f"gamma must lie in (0, {n}), got {gamma!r}")
    n, gamma = int(n), float(gamma)

    def prof(r):
        # r^-gamma / (1 + r^(n-gamma)) keeps full precision for tiny r
        return r ** (-gamma) / (1.0 + r ** (n - gamma))

    return RadialProfile(n, prof, singularity=gamma, decay=float(n),
                         name=f"titchmarsh(n={n}, gamma={gamma:g})")


def make_gaussian_profile(n, scale=1.0):
    """Profile ``scale * exp(-r^2 / 4)``."""
    return RadialProfile(n, lambda r: scale * np.exp(-0.25 * r * r), name="gaussian")


def make_ball_indicator(n, radius=1.0, height=1.0):
    """Indicator of the ball of the given radius, times ``height``."""
    return RadialProfile(n, lambda r: np.where(r < radius, height, 0.0), breakpoints=(radius,),
                         support=radius, name="ball")


def _log_edges(lo, hi, per_decade=PANELS_PER_DECADE):
    count = max(1, int(math.ceil(per_decade * math.log10(hi / lo))))
    return np.geomspace(lo, hi, count + 1)


def _merge_edges(edges, extra):
    extra = [e for e in extra if edges[0] < e < edges[-1]]
    if not extra:
        return edges
    merged = np.unique(np.concatenate([edges, extra]))
    # drop slivers whose nodes would round onto an edge; the outer ends stay
    out = merged[np.concatenate([[True], np.diff(merged) > 1e-12 * merged[1:]])]
    out[-1] = merged[-1]
    return out


def _panel_sum(edges, order, fn):
    """Composite Gauss-Legendre sum of ``fn`` over the panels, evaluated in chunks."""
    x, w = _leggauss(order)
    rows = max(1, _CHUNK // order)
    total = 0.0
    for start in range(0, edges.size - 1, rows):
        e = edges[start:start + rows + 1]
        a = e[:-1, None]
        h = 0.5 * np.diff(e)[:, None]
        nodes = a + h * (x + 1.0)
        total += float(np.sum((h * w) * fn(nodes)))
    return total


def _outer_edges(f, r_max, r_min, extra=()):
    hi = min(r_max, f.support)
    edges = _log_edges(r_min, hi)
    return _merge_edges(edges, list(f.breakpoints) + list(extra))


def _tail_slope(fn, r):
    a, b = abs(float(fn(r / 2.0))), abs(float(fn(r)))
    if a == 0.0 or b == 0.0:
        return math.inf
    return math.log(a / b) / math.log(2.0)


def _head(fn, r_min, p, n, gamma):
    """``int_0^r_min |fn(r)|^p r^{n-1} dr`` for ``fn ~ C r^-s`` with s fitted on [r_min, 2 r_min]."""
    a = abs(float(fn(np.array([r_min]))[0]))
    if a == 0.0:
        return 0.0
    b = abs(float(fn(np.array([2.0 * r_min]))[0]))
    s = math.log(a / b) / math.log(2.0) if b > 0 else gamma
    if not 0.0 <= s * p < n:
        s = gamma
    return a ** p * r_min ** n / (n - s * p)


def _power_tail(value_at_r, r, slope, p, n, what):
    """``int_r^inf |v (s/r)^-slope|^p s^{n-1} ds``."""
    if value_at_r == 0.0 or math.isinf(slope):
        return 0.0
    expo = slope * p - n
    if expo <= 0:
        raise DivergenceError(f"{what}: tail decays like r^-{slope:g}, not integrable for p={p:g}")
    return abs(value_at_r) ** p * r ** n / expo


def lp_norm_radial(f, p, r_max=R_MAX, r_min=R_MIN, per_decade=PANELS_PER_DECADE, order=ORDER):
    """``[|S^{n-1}| int_0^inf |f~(r)|^p r^{n-1} dr]^{1/p}``.

    Panels cover ``[r_min, r_max]``; below ``r_min`` f~ is treated as
    ``C r^-gamma`` and beyond ``r_max`` as a power law with the declared (or
    locally fitted) decay exponent, each integrated in closed form.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    n = f.dim
    if f.singularity * p >= n:
        raise DivergenceError(f"{f.name}: |f|^p r^(n-1) is not integrable at 0 (gamma p >= n)")
    if math.isinf(f.support) and f.decay is not None and f.decay * p <= n:
        raise DivergenceError(f"{f.name}: |f|^p r^(n-1) is not integrable at infinity")
    edges = _outer_edges(f, r_max, r_min)
    body = _panel_sum(edges, order, lambda r: np.abs(f(r)) ** p * r ** (n - 1))
    head = _head(f, r_min, p, n, f.singularity)
    tail = 0.0
    if f.support > edges[-1]:
        slope = f.decay if f.decay is not None else _tail_slope(f, edges[-1])
        tail = _power_tail(float(f(edges[-1])), edges[-1], slope, p, n, f.name)
    area, _ = unit_sphere_measures(n)
    return float((area * (head + body + tail)) ** (1.0 / p))


def _sphere_weight_constant(n):
    # 1 / int_0^pi sin^(n-2) theta d theta
    return math.exp(math.lgamma(0.5 * n) - math.lgamma(0.5 * (n - 1))) / math.sqrt(math.pi)


def spherical_mean_radial(f, t, r, order=ORDER):
    """Spherical mean ``M^t f`` at radius ``r`` (scalar or array).

    For n >= 2 this is ``c_n int_0^pi f~(rho(theta)) sin^{n-2}(theta) d theta``
    with ``rho^2 = r^2 + t^2 - 2 r t cos(theta)``.  The theta mesh is graded
    geometrically toward 0 down to the scale ``|r - t| / sqrt(r t)`` where rho
    is smallest, and split where rho crosses a profile breakpoint.  For n = 1 it
    is the two-point average ``(f~(|r+t|) + f~(|r-t|)) / 2``.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("r must be nonnegative")
    flat = np.atleast_1d(r_arr).ravel()
    if f.singularity > 0 and np.any(flat == t):
        warnings.warn("spherical mean on the r = t diagonal of a profile singular at 0; "
                      "accuracy is degraded", AccuracyWarning, stacklevel=2)
    if f.dim == 1:
        out = 0.5 * (f(np.abs(flat + t)) + f(np.abs(flat - t)))
    else:
        out = np.empty_like(flat)
        zero = flat == 0
        out[zero] = f(np.full(np.count_nonzero(zero), float(t)))
        if np.any(~zero):
            out[~zero] = _sphere_mean_positive(f, float(t), flat[~zero], order)
    return float(out[0]) if r_arr.ndim == 0 else out.reshape(r_arr.shape)


def _theta_edges(f, t, r):
    scale = np.abs(r - t) / np.sqrt(r * t)
    low = np.clip(0.25 * scale, 1e-15, math.pi / 8)
    frac = np.linspace(0.0, 1.0, _THETA_PANELS + 1)
    graded = math.pi * (low[:, None] / math.pi) ** frac[None, :]
    cols = [graded, np.zeros((r.size, 1))]
    for b in f.breakpoints:
        c = (r * r + t * t - b * b) / (2.0 * r * t)
        cols.append(np.where(np.abs(c) < 1, np.arccos(np.clip(c, -1, 1)), 0.0)[:, None])
    return np.sort(np.concatenate(cols, axis=1), axis=1)


def _sphere_mean_positive(f, t, r, order):
    n = f.dim
    x, w = _leggauss(order)
    out = np.empty_like(r)
    rows = max(1, _CHUNK // (order * (_THETA_PANELS + 1 + len(f.breakpoints))))
    for start in range(0, r.size, rows):
        rr = r[start:start + rows]
        edges = _theta_edges(f, t, rr)
        a = edges[:, :-1, None]
        h = 0.5 * np.diff(edges, axis=1)[:, :, None]
        theta = a + h * (x + 1.0)
        # rho^2 = (r-t)^2 + 4 r t sin^2(theta/2), free of cancellation
        s = np.sin(0.5 * theta)
        rho = np.sqrt((rr[:, None, None] - t) ** 2 + 4.0 * rr[:, None, None] * t * s * s)
        vals = f(rho) * (h * w)
        if n > 2:
            vals = vals * np.sin(theta) ** (n - 2)
        out[start:start + rows] = vals.sum(axis=(1, 2))
    return _sphere_weight_constant(n) * out


def modulus_sphere_mean(f, p, t, r_max=R_MAX, r_min=None, per_decade=PANELS_PER_DECADE,
                        order=ORDER):
    """``||M^t f - f||_p`` on R^n by nesting the spherical mean in the radial norm.

    The outer mesh is split at ``r = t`` and ``r = 2 t`` and refined
    geometrically toward ``t`` on both sides; near 0 the difference is
    dominated by ``f~`` itself and is integrated as ``C r^-gamma``.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    if not t > 0:
        raise DomainError("t must be positive")
    n = f.dim
    if f.singularity * p >= n:
        raise DivergenceError(f"{f.name}: gamma p >= n, the difference is not in L^p near 0")
    if r_min is None:
        r_min = 1e-8 * t
    near = [t * (1.0 + s * 2.0 ** -k) for k in range(1, 31) for s in (-1.0, 1.0)]
    kinks = [b + s * t for b in f.breakpoints for s in (-1.0, 1.0) if b + s * t > 0]
    support = f.support + t if math.isfinite(f.support) else math.inf
    hi = min(r_max, support)
    edges = _merge_edges(_log_edges(r_min, hi, per_decade), [t, 2.0 * t] + near + kinks)

    def diff(r):
        return spherical_mean_radial(f, t, r, order) - f(r)

    body = _panel_sum(edges, order, lambda r: np.abs(diff(r.ravel()).reshape(r.shape)) ** p
                      * r ** (n - 1))
    head = _head(diff, r_min, p, n, f.singularity)
    tail = 0.0
    end = float(diff(np.array([hi]))[0])
    # a difference at roundoff level of f itself carries no tail
    if support > hi and abs(end) > 1e-13 * abs(float(f(np.array([hi]))[0])):
        slope = _tail_slope(lambda r: diff(np.array([r]))[0], hi)
        tail = _power_tail(end, hi, slope, p, n, f.name)
    area, _ = unit_sphere_measures(n)
    return float((area * (head + body + tail)) ** (1.0 / p))


def _bessel_kernel(nu, x):
    """Normalized Bessel ``j_nu(x)`` for arrays of large size, via scipy."""
    if nu == -0.5:
        return np.cos(x)
    if nu == 0.5:
        return np.sinc(x / math.pi)
    if nu == 0.0:
        return special.j0(x)
    out = np.empty_like(x)
    small = x < 0.5
    z = -0.25 * x[small] ** 2
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, 20):
        term = term * z / (k * (nu + k))
        total = total + term
    out[small] = total
    big = x[~small]
    out[~small] = math.exp(nu * math.log(2.0) + math.lgamma(nu + 1.0)) * big ** (-nu) * special.jv(nu, big)
    return out


def _fourier_edges(f, lam, r_end, r_min, per_decade, order):
    period = 2.0 * math.pi / lam if lam > 0 else math.inf
    r_osc = 10.0 * period
    if r_osc >= r_end:
        edges = _log_edges(r_min, r_end, per_decade)
    else:
        head = _log_edges(r_min, r_osc, per_decade)
        count = int(math.ceil((r_end - r_osc) / (_PERIODS_PER_PANEL * period)))
        edges = np.concatenate([head, np.linspace(r_osc, r_end, count + 1)[1:]])
    edges = _merge_edges(edges, f.breakpoints)
    widest = float(np.max(np.diff(edges)[edges[1:] > 10.0 * period])) if r_osc < r_end else 0.0
    if widest > 0 and order * period / widest < MIN_NODES_PER_PERIOD:
        raise AccuracyError(f"oscillation unresolved at lambda={lam:g}: "
                            f"{order * period / widest:.1f} nodes per period")
    return edges


def _oscillatory_tail(f, lam, r_end, decay):
    # int_R^inf C r^-d j_nu(lam r) r^{n-1} dr with the leading asymptotic of j_nu
    n, nu = f.dim, f.nu
    c = float(f(np.array([r_end]))[0]) * r_end ** decay
    if lam * r_end < 10.0:
        if decay > n:
            return c * r_end ** (n - decay) / (decay - n)
        raise AccuracyError(f"lambda * r_max = {lam * r_end:g} too small for the asymptotic tail")
    amp = math.exp(nu * math.log(2.0) + math.lgamma(nu + 1.0)) * math.sqrt(2.0 / math.pi)
    m = n - 1 - decay - nu - 0.5
    phase = 0.5 * math.pi * (nu + 0.5)
    return -c * amp * lam ** (-nu - 0.5) * r_end ** m * math.sin(lam * r_end - phase) / lam


def radial_fourier(f, lambdas, r_max=R_MAX, r_min=R_MIN, per_decade=PANELS_PER_DECADE,
                   order=ORDER):
    """Radial Fourier transform ``F(lam)`` on a grid.

    Panels are logarithmic up to ten periods of the kernel, then uniform with
    at most 1.5 periods each, so an order-16 rule puts at least 10 nodes in
    every period.  Profiles with unbounded support are truncated at ``r_max``
    and the remainder added from the kernel asymptotics with ``f~ ~ r^-decay``.
    """
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise DomainError("lambdas must be finite and nonnegative")
    n, nu = f.dim, f.nu
    area, _ = unit_sphere_measures(n)
    r_end = min(r_max, f.support)
    values = np.empty_like(lam)
    for i, lm in enumerate(lam):
        edges = _fourier_edges(f, lm, r_end, r_min, per_decade, order)
        body = _panel_sum(edges, order, lambda r: f(r) * _bessel_kernel(nu, lm * r) * r ** (n - 1))
        head = math.copysign(_head(f, r_min, 1.0, n, f.singularity), float(f(np.array([r_min]))[0]))
        tail = 0.0
        if f.support > r_end:
            if f.decay is None:
                tail = 0.0 if f(np.array([r_end]))[0] == 0 else _oscillatory_tail(
                    f, lm, r_end, _tail_slope(f, r_end))
            else:
                tail = _oscillatory_tail(f, lm, r_end, f.decay)
        values[i] = area * (head + body + tail)
    return ShellTransform(n, lam, values, {"method": "panels", "r_max": r_end})


def titchmarsh_fourier(n, gamma, lambdas, u_min=1e-14, u_max=80.0,
                       per_decade=PANELS_PER_DECADE, order=ORDER):
    """Transform of ``1/(r^gamma + r^n)`` by rotating the contour to the imaginary axis.

    Writing ``J_nu = (H1 + H2) / 2`` and turning the H1 (H2) part onto the
    positive (negative) imaginary axis gives, with
    ``g(z) = z^{n-1-nu} / (z^gamma + z^n)``,

        int_0^inf g(r) J_nu(lam r) dr
            = Re[(2/pi) e^{-i pi nu / 2} int_0^inf K_nu(lam y) g(i y) dy].

    The rotation needs g free of poles in the quarter planes and small near 0,
    i.e. ``n - gamma < 2`` and ``gamma < 2``.  The K_nu integral is
    non-oscillatory, so the cost is independent of ``lam``.
    """
    if not 0 < gamma < n:
        raise DomainError(f"gamma must lie in (0, {n}), got {gamma!r}")
    if n - gamma >= 2 or gamma >= 2:
        raise DomainError("contour rotation needs n - gamma < 2 and gamma < 2")
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise DomainError("lambdas must be finite and positive")
    nu = 0.5 * (n - 2)
    area, _ = unit_sphere_measures(n)
    lead = math.exp(nu * math.log(2.0) + math.lgamma(nu + 1.0))
    rot = (2.0 / math.pi) * np.exp(-0.5j * math.pi * nu)
    a = n - 1 - nu
    ea, eg, en = (np.exp(0.5j * math.pi * e) for e in (a, gamma, n))
    edges = _log_edges(u_min, u_max, per_decade)
    x, w = _leggauss(order)
    h = 0.5 * np.diff(edges)[:, None]
    u = (edges[:-1, None] + h * (x + 1.0)).ravel()
    wu = (h * w).ravel()
    kern = special.kv(nu, u) * wu
    k_min = special.kv(nu, u_min)

    def g_of(y):
        # g(iy) = y^a e^{i pi a/2} / (y^gamma e^{i pi gamma/2} + y^n e^{i pi n/2})
        return ea * y ** (a - gamma) / (eg + en * y ** (n - gamma))

    def head(lm):
        # int_0^u_min K_nu(u) g(iu/lm) du: expand g in powers of y^(n-gamma),
        # K_nu ~ K_nu(u_min) (u/u_min)^-|nu|, or const - log u for nu = 0
        ratio = -en / eg * (u_min / lm) ** (n - gamma)
        term = ea / eg * (u_min / lm) ** (a - gamma)
        total = 0.0
        for k in range(400):
            e = a - gamma + k * (n - gamma) + 1.0
            if nu == 0:
                piece = k_min / e + 1.0 / (e * e)
            else:
                piece = k_min / (e - abs(nu))
            total += term * u_min * piece
            term *= ratio
            if abs(term) < 1e-17 * abs(total):
                break
        return total

    values = np.empty_like(lam)
    for i, lm in enumerate(lam):
        integral = np.dot(kern, g_of(u / lm)) + head(lm)
        values[i] = area * lead * lm ** (-nu) * float(np.real(rot * integral / lm))
    return ShellTransform(n, lam, values, {"method": "contour"})


def integrability_partial(F, beta, Lambda):
    """``int_1^Lambda |F(lam)|^beta lam^{n-1} d lam`` from the sampled transform.

    Between grid points |F| is interpolated as a power law (linear in log-log)
    and each segment is integrated in closed form; segments where F vanishes
    fall back to the trapezoid rule.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    lam, val = F.lambdas, np.abs(F.values)
    tol = 1e-12
    if Lambda < 1 or lam[0] > 1.0 + tol or lam[-1] < Lambda * (1 - tol):
        raise DomainError(f"grid [{lam[0]:g}, {lam[-1]:g}] does not cover [1, {Lambda:g}]")
    if Lambda == 1:
        return 0.0
    n = F.dim
    total = 0.0
    for a, b, fa, fb in zip(lam[:-1], lam[1:], val[:-1], val[1:]):
        lo, hi = max(a, 1.0), min(b, Lambda)
        if hi <= lo:
            continue
        if fa > 0 and fb > 0:
            s = math.log(fb / fa) / math.log(b / a)
            e = s * beta + n
            coef = fa ** beta * a ** (-s * beta)
            if abs(e) < 1e-12:
                total += coef * math.log(hi / lo)
            else:
                total += coef * (hi ** e - lo ** e) / e
        else:
            def interp(x):
                return fa + (fb - fa) * (x - a) / (b - a)
            total += 0.5 * (hi - lo) * (interp(lo) ** beta * lo ** (n - 1)
                                        + interp(hi) ** beta * hi ** (n - 1))
    return float(total)
