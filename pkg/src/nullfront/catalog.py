"""Built-in generating curves and surfaces.

Every concrete instance used by the tests, demos and the command line lives
here, so the closed forms are written down exactly once.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

from .geometry import (T, U, V, AnalyticCurve, AnalyticSurface, GeneratingFront,
                       build_curve, build_surface)

__all__ = [
    "CURVES",
    "circle",
    "doubled_circle",
    "ellipse",
    "fourier_curve",
    "generator",
    "inflection_curve",
    "lightcone_samples",
    "limacon",
    "parabola_arc",
    "sphere",
    "spiral",
    "spiral_bump",
]


def ellipse(a: float = 2.0, b: float = 1.0) -> AnalyticCurve:
    """(a cos t, b sin t); the leftward normal points inwards, kappa > 0."""
    return AnalyticCurve(sp.nsimplify(a) * sp.cos(T), sp.nsimplify(b) * sp.sin(T),
                         name="ellipse")


def circle(radius: float = 1.0, inward: bool = True) -> AnalyticCurve:
    r = sp.nsimplify(radius)
    return AnalyticCurve(r * sp.cos(T), r * sp.sin(T), flip_normal=not inward, name="circle")


def limacon() -> AnalyticCurve:
    """(1 - 2 sin t)(cos t, sin t): locally convex, one self-intersection."""
    r = 1 - 2 * sp.sin(T)
    return AnalyticCurve(r * sp.cos(T), r * sp.sin(T), name="limacon")


def inflection_curve(c: float = 0.9) -> AnalyticCurve:
    """(cos t, sin t + c sin 2t); its curvature changes sign."""
    return AnalyticCurve(sp.cos(T), sp.sin(T) + sp.nsimplify(c) * sp.sin(2 * T),
                         name="inflection")


def doubled_circle() -> AnalyticCurve:
    """Unit circle traversed twice over [0, 2 pi)."""
    return AnalyticCurve(sp.cos(2 * T), sp.sin(2 * T), name="doubled-circle")


def parabola_arc(half_width: float = 1.0) -> AnalyticCurve:
    """Open arc (t, t^2), t in [-w, w]."""
    w = float(half_width)
    return AnalyticCurve(T, T ** 2, period=None, interval=(-w, w), name="parabola")


def spiral_bump(width: float = 0.5, amplitude: float = 0.3, center=3 * sp.pi):
    """Smooth bump: positive exactly on (center - width, center + width).

    ``amplitude * exp(1 - 1 / (1 - s^2))`` with s = (t - center) / width, so
    its values lie in [0, amplitude] and it is flat at both ends.
    """
    s = (T - center) / sp.nsimplify(width)
    inner = sp.nsimplify(amplitude) * sp.exp(1 - 1 / (1 - s ** 2))
    return sp.Piecewise((inner, sp.Abs(s) < 1), (0, True))


def spiral(bump: bool = True, width: float = 0.5, amplitude: float = 0.3) -> AnalyticCurve:
    """exp(omega(t)) (cos t, sin t) on [0, 4 pi): a doubled circle whose second
    pass bulges out near angle pi.  ``bump=False`` sets omega to zero."""
    omega = spiral_bump(width, amplitude) if bump else sp.Integer(0)
    r = sp.exp(omega)
    return AnalyticCurve(r * sp.cos(T), r * sp.sin(T), period=4 * np.pi,
                         name="spiral" if bump else "spiral-flat")


def fourier_curve(ax, bx, ay, by, name: str = "fourier") -> AnalyticCurve:
    """x(t) = sum ax[k] cos kt + bx[k] sin kt, likewise y; k counts from 0."""
    def series(ca, cb):
        terms = [sp.nsimplify(c) * sp.cos(k * T) for k, c in enumerate(ca)]
        terms += [sp.nsimplify(c) * sp.sin(k * T) for k, c in enumerate(cb)]
        return sp.Add(*terms)
    return AnalyticCurve(series(ax, bx), series(ay, by), name=name)


def sphere(radius: float = 1.0) -> AnalyticSurface:
    """Round sphere with inward normal, so both principal curvatures are 1/R."""
    r = sp.nsimplify(radius)
    exprs = (r * sp.sin(U) * sp.cos(V), r * sp.sin(U) * sp.sin(V), r * sp.cos(U))
    # f_u x f_v points outward for this chart
    return AnalyticSurface(exprs, flip_normal=True, name="sphere")


def lightcone_samples(half_range: int = 16, denominator: int = 8):
    """Samples of F(u, v) = (u^2 + v^2, 2uv, u^2 - v^2) on a dyadic lattice.

    Returns ``(points, normals, labels)`` where the normals are the
    E-normalised null normals F / (u^2 + v^2) and the labels are the polar
    angles of (u, v).  Dyadic inputs keep every product exact, so <F, F> is
    exactly zero.
    """
    k = np.arange(-half_range, half_range + 1) / denominator
    u, v = np.meshgrid(k, k, indexing="ij")
    u, v = u.ravel(), v.ravel()
    keep = (u != 0) | (v != 0)
    u, v = u[keep], v[keep]
    r2 = u * u + v * v
    points = np.stack([r2, 2 * u * v, u * u - v * v], axis=-1)
    normals = points / r2[:, None]
    labels = np.mod(np.arctan2(v, u), 2 * np.pi)
    return points, normals, labels


CURVES = {
    "ellipse": ellipse,
    "limacon": limacon,
    "circle": circle,
    "inflection": inflection_curve,
    "doubled-circle": doubled_circle,
    "parabola": parabola_arc,
    "spiral": spiral,
}


def generator(name: str, grid, **params) -> GeneratingFront:
    """Sample a named built-in generator on ``grid`` nodes (two sizes for surfaces)."""
    if name == "sphere":
        shape = tuple(grid) if np.ndim(grid) else (int(grid), int(grid))
        return build_surface(sphere(**params), shape, kind="closed-surface")
    try:
        factory = CURVES[name]
    except KeyError:
        raise KeyError(f"unknown generator {name!r}") from None
    n = int(grid[0]) if np.ndim(grid) else int(grid)
    return build_curve(factory(**params), n)
