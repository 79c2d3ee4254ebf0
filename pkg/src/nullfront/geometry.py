"""Sampled generating hypersurfaces f: Sigma^{n-1} -> R^n with unit normal.

Curves (n = 2) and surfaces (n = 3) are supported.  A generator may carry
closed-form evaluators (built from sympy expressions), in which case every
derivative is exact up to rounding; otherwise derivatives come from finite
differences on the sample grid.

Sign conventions: the principal curvatures lambda_i satisfy
d(nu) = -lambda df, so for curves kappa = nu . f'' / |f'|^2 and the parallel
hypersurface f + t nu is singular exactly where t = 1/lambda_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import sympy as sp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

__all__ = [
    "AnalyticCurve",
    "AnalyticSurface",
    "CurvatureData",
    "GeneratingFront",
    "GeometryError",
    "Vertices",
    "build_curve",
    "build_surface",
    "curvature",
    "curve_from_samples",
    "kappa_spline",
    "parallel",
    "periodic_derivative",
    "vertices",
]

T = sp.Symbol("t", real=True)
U, V = sp.symbols("u v", real=True)

# kappa' counts as zero below this fraction of max|kappa'|
VERTEX_ZERO_REL = 1e-8
# bisection target for refined vertices
VERTEX_REFINE_REL = 1e-10
# max|kappa'| below this fraction of max|kappa| means constant curvature
CONSTANT_CURVATURE_REL = 1e-9


class GeometryError(ValueError):
    """Raised for invalid generating data (non-immersed, singular metric)."""


def _lambdify(expr, *args):
    f = sp.lambdify(args, expr, modules="numpy")

    def call(*vals):
        with np.errstate(all="ignore"):
            out = np.asarray(f(*vals), dtype=float)
        return np.broadcast_to(out, np.broadcast(*vals).shape).copy()

    return call


def _parse(expr, names):
    if isinstance(expr, sp.Basic):
        return expr
    if isinstance(expr, (int, float)):
        return sp.Float(expr) if isinstance(expr, float) else sp.Integer(expr)
    return sp.sympify(expr, locals=names)


class AnalyticCurve:
    """Closed-form plane curve t -> (x(t), y(t)) with exact derivatives.

    ``x`` and ``y`` are sympy expressions (or strings) in the symbol ``t``.
    The normal is the leftward unit normal J f'/|f'|, negated when
    ``flip_normal`` is set.
    """

    def __init__(self, x, y, *, period: float | None = 2 * np.pi,
                 interval: tuple[float, float] | None = None,
                 flip_normal: bool = False, name: str = ""):
        names = {"t": T}
        self.x = _parse(x, names)
        self.y = _parse(y, names)
        self.period = period
        self.interval = interval if interval is not None else (0.0, period)
        if self.interval[1] is None:
            raise ValueError("open curves need an explicit parameter interval")
        self.flip_normal = flip_normal
        self.name = name

        g = sp.Matrix([self.x, self.y])
        d1 = g.diff(T)
        d2 = d1.diff(T)
        speed = sp.sqrt(d1[0] ** 2 + d1[1] ** 2)
        sign = -1 if flip_normal else 1
        nu = sign * sp.Matrix([-d1[1], d1[0]]) / speed
        kappa = sign * (d1[0] * d2[1] - d1[1] * d2[0]) / speed ** 3
        dkappa = sp.diff(kappa, T)

        self._pos = [_lambdify(c, T) for c in g]
        self._d1 = [_lambdify(c, T) for c in d1]
        self._d2 = [_lambdify(c, T) for c in d2]
        self._nu = [_lambdify(c, T) for c in nu]
        self._dnu = [_lambdify(sp.diff(c, T), T) for c in nu]
        self._kappa = _lambdify(kappa, T)
        self._dkappa = _lambdify(dkappa, T)
        self._d2kappa = _lambdify(sp.diff(dkappa, T), T)

    @staticmethod
    def _stack(fs, t):
        t = np.asarray(t, dtype=float)
        return np.stack([f(t) for f in fs], axis=-1)

    def position(self, t):
        return self._stack(self._pos, t)

    def d1(self, t):
        return self._stack(self._d1, t)

    def d2(self, t):
        return self._stack(self._d2, t)

    def normal(self, t):
        return self._stack(self._nu, t)

    def dnormal(self, t):
        return self._stack(self._dnu, t)

    def kappa(self, t):
        return self._kappa(np.asarray(t, dtype=float))

    def dkappa(self, t):
        return self._dkappa(np.asarray(t, dtype=float))

    def d2kappa(self, t):
        return self._d2kappa(np.asarray(t, dtype=float))

    def flipped(self) -> "AnalyticCurve":
        return AnalyticCurve(self.x, self.y, period=self.period, interval=self.interval,
                             flip_normal=not self.flip_normal, name=self.name)


class AnalyticSurface:
    """Closed-form surface (u, v) -> R^3 with exact first/second derivatives.

    The normal is f_u x f_v / |f_u x f_v|, negated when ``flip_normal`` is set.
    """

    def __init__(self, exprs, *, flip_normal: bool = False, name: str = ""):
        names = {"u": U, "v": V}
        f = sp.Matrix([_parse(e, names) for e in exprs])
        if f.shape[0] != 3:
            raise ValueError("a surface needs three coordinate expressions")
        self.exprs = f
        self.flip_normal = flip_normal
        self.name = name
        fu, fv = f.diff(U), f.diff(V)
        cross = fu.cross(fv)
        norm = sp.sqrt(cross.dot(cross))
        nu = (-1 if flip_normal else 1) * cross / norm
        self._f = [_lambdify(c, U, V) for c in f]
        self._fu = [_lambdify(c, U, V) for c in fu]
        self._fv = [_lambdify(c, U, V) for c in fv]
        self._fuu = [_lambdify(c, U, V) for c in fu.diff(U)]
        self._fuv = [_lambdify(c, U, V) for c in fu.diff(V)]
        self._fvv = [_lambdify(c, U, V) for c in fv.diff(V)]
        self._nu = [_lambdify(c, U, V) for c in nu]
        self._nu_u = [_lambdify(c, U, V) for c in nu.diff(U)]
        self._nu_v = [_lambdify(c, U, V) for c in nu.diff(V)]

    @staticmethod
    def _stack(fs, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.stack([f(u, v) for f in fs], axis=-1)

    def position(self, u, v):
        return self._stack(self._f, u, v)

    def first(self, u, v):
        return self._stack(self._fu, u, v), self._stack(self._fv, u, v)

    def second(self, u, v):
        return (self._stack(self._fuu, u, v), self._stack(self._fuv, u, v),
                self._stack(self._fvv, u, v))

    def normal(self, u, v):
        return self._stack(self._nu, u, v)

    def dnormal(self, u, v):
        return self._stack(self._nu_u, u, v), self._stack(self._nu_v, u, v)


def periodic_derivative(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order centred difference on a uniform periodic grid."""
    r = lambda k: np.roll(values, -k, axis=axis)  # noqa: E731
    return (-r(2) + 8 * r(1) - 8 * r(-1) + r(-2)) / (12 * h)


def _derivative(values, axis_values, axis, periodic):
    if periodic:
        h = axis_values[1] - axis_values[0]
        return periodic_derivative(values, h, axis)
    return np.gradient(values, axis_values, axis=axis, edge_order=2)


@dataclass(frozen=True, eq=False)
class GeneratingFront:
    """Sampled generating hypersurface with unit normal.

    ``kind`` is one of ``closed-curve``, ``open-curve``, ``surface-patch`` or
    ``closed-surface``.  ``grid`` holds one parameter axis per dimension of
    Sigma; ``points`` and ``normals`` have shape ``grid_shape + (n,)``.
    ``singular`` is only set on fronts produced by :func:`parallel`.
    """

    kind: str
    grid: tuple
    points: np.ndarray
    normals: np.ndarray
    analytic: object = None
    periodic: tuple = ()
    name: str = ""
    singular: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        """Ambient Euclidean dimension n."""
        return self.points.shape[-1]

    @property
    def is_curve(self) -> bool:
        return self.kind in ("closed-curve", "open-curve")

    @property
    def closed(self) -> bool:
        """True when the parameter domain is compact without boundary."""
        return self.kind in ("closed-curve", "closed-surface")

    @property
    def grid_shape(self) -> tuple:
        return self.points.shape[:-1]

    @property
    def params(self) -> np.ndarray:
        """Curve parameter values (curves only)."""
        return self.grid[0]

    def period(self) -> float | None:
        if self.kind != "closed-curve":
            return None
        a = self.analytic
        if a is not None and a.period is not None:
            return float(a.period)
        t = self.grid[0]
        return float((t[1] - t[0]) * len(t))

    # -- derivatives ------------------------------------------------------

    def tangents(self) -> tuple:
        """Partial derivatives f_{u_i} at every node."""
        a = self.analytic
        if isinstance(a, AnalyticCurve):
            return (a.d1(self.grid[0]),)
        if isinstance(a, AnalyticSurface):
            uu, vv = np.meshgrid(*self.grid, indexing="ij")
            return a.first(uu, vv)
        return tuple(_derivative(self.points, self.grid[i], i, self.periodic[i])
                     for i in range(len(self.grid)))

    def normal_derivatives(self) -> tuple:
        """Partial derivatives nu_{u_i} at every node."""
        a = self.analytic
        if isinstance(a, AnalyticCurve):
            return (a.dnormal(self.grid[0]),)
        if isinstance(a, AnalyticSurface):
            uu, vv = np.meshgrid(*self.grid, indexing="ij")
            return a.dnormal(uu, vv)
        return tuple(_derivative(self.normals, self.grid[i], i, self.periodic[i])
                     for i in range(len(self.grid)))

    def second_derivatives(self) -> tuple:
        a = self.analytic
        if isinstance(a, AnalyticCurve):
            return (a.d2(self.grid[0]),)
        if isinstance(a, AnalyticSurface):
            uu, vv = np.meshgrid(*self.grid, indexing="ij")
            return a.second(uu, vv)
        d = self.tangents()
        if self.is_curve:
            return (_derivative(d[0], self.grid[0], 0, self.periodic[0]),)
        fuu = _derivative(d[0], self.grid[0], 0, self.periodic[0])
        fuv = _derivative(d[0], self.grid[1], 1, self.periodic[1])
        fvv = _derivative(d[1], self.grid[1], 1, self.periodic[1])
        return fuu, fuv, fvv

    def lift(self) -> np.ndarray:
        """Legendrian-lift samples l_f(x) = (f(x), nu(x)) in R^n x S^{n-1}."""
        return np.concatenate([self.points, self.normals], axis=-1)


def _check_normals(points, normals, tangents, tol):
    nrm = np.linalg.norm(normals, axis=-1)
    if np.max(np.abs(nrm - 1.0)) > 1e-10:
        raise GeometryError("normals are not unit vectors")
    for d in tangents:
        speed = np.linalg.norm(d, axis=-1)
        dots = np.abs(np.sum(normals * d, axis=-1))
        if np.max(dots / np.maximum(speed, 1e-300)) > tol:
            raise GeometryError("normals are not orthogonal to the tangent space")


def build_curve(evaluator, grid_size: int, *, period: float | None = 2 * np.pi,
                interval: tuple[float, float] | None = None,
                flip_normal: bool = False, name: str = "") -> GeneratingFront:
    """Sample a plane curve on a uniform parameter grid.

    ``evaluator`` is an :class:`AnalyticCurve` or any callable mapping a
    parameter array to an ``(m, 2)`` array.  Closed curves are sampled on
    ``[0, period)``; pass ``period=None`` and an ``interval`` for open arcs.
    """
    if grid_size < 5:
        raise ValueError("grid_size must be at least 5")
    if isinstance(evaluator, AnalyticCurve):
        if flip_normal:
            evaluator = evaluator.flipped()
        period = evaluator.period
        interval = evaluator.interval
        name = name or evaluator.name
    closed = period is not None
    if closed:
        t = np.linspace(0.0, period, grid_size, endpoint=False)
    else:
        if interval is None:
            raise ValueError("open curves need a parameter interval")
        t = np.linspace(interval[0], interval[1], grid_size)

    if isinstance(evaluator, AnalyticCurve):
        pts = evaluator.position(t)
        d1 = evaluator.d1(t)
        normals = evaluator.normal(t)
        analytic = evaluator
        tol = 1e-12
    else:
        pts = np.asarray(evaluator(t), dtype=float)
        if pts.shape != (grid_size, 2):
            raise ValueError(f"evaluator must return shape ({grid_size}, 2), got {pts.shape}")
        d1 = _derivative(pts, t, 0, closed)
        speed = np.linalg.norm(d1, axis=-1)
        normals = np.stack([-d1[:, 1], d1[:, 0]], axis=-1) / np.maximum(speed, 1e-300)[:, None]
        if flip_normal:
            normals = -normals
        analytic = None
        tol = 1e-8

    speed = np.linalg.norm(d1, axis=-1)
    if np.min(speed) <= 1e-9 * max(np.max(speed), 1e-300):
        bad = int(np.argmin(speed))
        raise GeometryError(f"not an immersion: |f'| vanishes near t = {t[bad]:.6g}")
    _check_normals(pts, normals, (d1,), tol)
    kind = "closed-curve" if closed else "open-curve"
    return GeneratingFront(kind, (t,), pts, normals, analytic, (closed,), name)


def curve_from_samples(params, points, normals, *, closed: bool = True,
                       name: str = "") -> GeneratingFront:
    """Generating curve from explicit samples (e.g. a reconstructed generator).

    Closed curves need a uniform parameter grid covering one period.
    """
    params = np.asarray(params, dtype=float)
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    if closed:
        h = np.diff(params)
        if np.max(np.abs(h - h.mean())) > 1e-9 * max(abs(h.mean()), 1.0):
            raise ValueError("closed sampled curves need a uniform parameter grid")
    kind = "closed-curve" if closed else "open-curve"
    return GeneratingFront(kind, (params,), points, normals, None, (closed,), name)


def build_surface(surface: AnalyticSurface, grid_shape: tuple[int, int], *,
                  kind: str = "surface-patch",
                  bounds: tuple | None = None, name: str = "") -> GeneratingFront:
    """Sample an analytic surface.

    ``surface-patch`` uses the closed rectangle ``bounds = ((u0, u1), (v0, v1))``.
    ``closed-surface`` uses a latitude/longitude grid: u in (0, pi) on a
    half-offset grid that never touches the poles, v periodic in [0, 2 pi).
    """
    nu_, nv_ = grid_shape
    if min(grid_shape) < 5:
        raise ValueError("grid sizes must be at least 5")
    if kind == "closed-surface":
        u = (np.arange(nu_) + 0.5) * np.pi / nu_
        v = np.linspace(0.0, 2 * np.pi, nv_, endpoint=False)
        periodic = (False, True)
    elif kind == "surface-patch":
        if bounds is None:
            raise ValueError("surface patches need parameter bounds")
        u = np.linspace(*bounds[0], nu_)
        v = np.linspace(*bounds[1], nv_)
        periodic = (False, False)
    else:
        raise ValueError(f"unknown surface kind {kind!r}")
    uu, vv = np.meshgrid(u, v, indexing="ij")
    pts = surface.position(uu, vv)
    normals = surface.normal(uu, vv)
    fu, fv = surface.first(uu, vv)
    area = np.linalg.norm(np.cross(fu, fv), axis=-1)
    if np.min(area) <= 1e-9 * np.max(area):
        raise GeometryError("not an immersion: f_u x f_v vanishes")
    _check_normals(pts, normals, (fu, fv), 1e-12)
    return GeneratingFront(kind, (u, v), pts, normals, surface, periodic, name or surface.name)


@dataclass(frozen=True, eq=False)
class CurvatureData:
    """Principal curvatures (ascending along the last axis) and, for curves,
    kappa and its first two parameter derivatives."""

    principal: np.ndarray
    kappa: np.ndarray | None = None
    dkappa: np.ndarray | None = None
    d2kappa: np.ndarray | None = None


def curvature(front: GeneratingFront) -> CurvatureData:
    """Principal curvatures with respect to the stored normal.

    Uses closed-form derivatives when the front has them, otherwise
    finite differences (fourth order on periodic axes).
    """
    if front.is_curve:
        a = front.analytic
        t = front.grid[0]
        if isinstance(a, AnalyticCurve):
            k, dk, d2k = a.kappa(t), a.dkappa(t), a.d2kappa(t)
        else:
            d1 = front.tangents()[0]
            d2 = front.second_derivatives()[0]
            sq = np.sum(d1 * d1, axis=-1)
            if np.min(sq) <= 1e-18 * np.max(sq):
                raise GeometryError("metric singular at node")
            k = np.sum(front.normals * d2, axis=-1) / sq
            spline = kappa_spline(front, k)
            dk, d2k = spline(t, 1), spline(t, 2)
        return CurvatureData(k[..., None], k, dk, d2k)

    fu, fv = front.tangents()
    fuu, fuv, fvv = front.second_derivatives()
    nu = front.normals
    E = np.sum(fu * fu, -1)
    F = np.sum(fu * fv, -1)
    G = np.sum(fv * fv, -1)
    L = np.sum(nu * fuu, -1)
    M = np.sum(nu * fuv, -1)
    N = np.sum(nu * fvv, -1)
    det = E * G - F * F
    if np.min(det) <= 1e-14 * np.max(det):
        bad = np.unravel_index(np.argmin(det), det.shape)
        raise GeometryError(f"metric singular at node {tuple(int(i) for i in bad)}")
    # symmetric form C^-1 II C^-T with I = C C^T (Cholesky), eigenvalues in closed form
    c11 = np.sqrt(E)
    c21 = F / c11
    c22 = np.sqrt(det) / c11
    p = L / E
    q = (M - c21 * L / c11) / (c11 * c22)
    r = (N - 2 * c21 * M / c11 + c21 * c21 * L / E) / (c22 * c22)
    mean = 0.5 * (p + r)
    disc = np.hypot(0.5 * (p - r), q)
    principal = np.stack([mean - disc, mean + disc], axis=-1)
    return CurvatureData(principal)


@dataclass(frozen=True)
class Vertices:
    """Critical points of the curvature of a plane curve."""

    params: np.ndarray
    even_multiplicity: np.ndarray
    constant_curvature: bool = False

    def __len__(self):
        return len(self.params)

    def __iter__(self):
        return iter(self.params)


def kappa_spline(front: GeneratingFront, kappa: np.ndarray) -> CubicSpline:
    """Cubic spline through nodal curvature values, periodic on closed curves.

    Sampled curves take kappa' and kappa'' from this one spline, so vertex
    search and singular-point classification see the same function.
    """
    t = front.grid[0]
    if front.closed:
        tt = np.append(t, t[0] + front.period())
        return CubicSpline(tt, np.append(kappa, kappa[0]), bc_type="periodic")
    return CubicSpline(t, kappa)


def _dkappa_function(front: GeneratingFront, data: CurvatureData):
    a = front.analytic
    if isinstance(a, AnalyticCurve):
        return a.dkappa
    return kappa_spline(front, data.kappa).derivative()


def vertices(front: GeneratingFront, data: CurvatureData | None = None) -> Vertices:
    """Locate the zeros of kappa' by sign-change bracketing plus bisection.

    Grid nodes where |kappa'| is already negligible are reported directly;
    touching zeros without a sign change are reported once and flagged
    as even multiplicity.
    """
    if not front.is_curve:
        raise ValueError("vertices are defined for plane curves only")
    data = data or curvature(front)
    k, dk = data.kappa, data.dkappa
    t = front.grid[0]
    m = float(np.max(np.abs(dk)))
    if m <= CONSTANT_CURVATURE_REL * max(float(np.max(np.abs(k))), 1e-300):
        return Vertices(np.empty(0), np.empty(0, dtype=bool), constant_curvature=True)

    fn = _dkappa_function(front, data)
    zero = VERTEX_ZERO_REL * m
    refine = VERTEX_REFINE_REL * m
    n = len(t)
    closed = front.closed
    period = front.period() if closed else None
    at_node = np.abs(dk) <= refine
    roots, even = [], []

    last = n if closed else n - 1
    for i in range(last):
        j = (i + 1) % n
        if at_node[i]:
            roots.append(t[i])
            even.append(False)
            continue
        if at_node[j]:
            continue
        if dk[i] * dk[j] < 0:
            a = t[i]
            b = t[j] if j > i else t[j] + period
            r = brentq(lambda s: float(fn(np.asarray(s))), a, b, xtol=1e-15, rtol=1e-15,
                       maxiter=200)
            if closed:
                r = r % period
            roots.append(r)
            even.append(False)
    if not closed and at_node[n - 1]:
        roots.append(t[n - 1])
        even.append(False)

    # touching zeros: local minima of |kappa'| under the zero cutoff, no sign change
    for i in range(n):
        if at_node[i]:
            continue
        if not closed and (i == 0 or i == n - 1):
            continue
        p, q = (i - 1) % n, (i + 1) % n
        a = abs(dk[i])
        if a <= zero and a <= abs(dk[p]) and a <= abs(dk[q]) and dk[p] * dk[q] > 0:
            roots.append(t[i])
            even.append(True)

    order = np.argsort(roots)
    return Vertices(np.asarray(roots, dtype=float)[order], np.asarray(even, dtype=bool)[order])


def parallel(front: GeneratingFront, t: float, rtol: float = 1e-8) -> GeneratingFront:
    """Parallel hypersurface f + t nu, with the same normals.

    A node is flagged singular when t * lambda_i = 1 within ``rtol`` for some
    principal curvature lambda_i.
    """
    lam = curvature(front).principal
    singular = np.any(np.abs(t * lam - 1.0) <= rtol, axis=-1)
    return replace(front, points=front.points + t * front.normals, analytic=None,
                   singular=singular, name=f"{front.name}+{t:g}nu" if front.name else "")
