"""Singular locus of a normal-form null front and its classification.

For F(t, x) = (0, f(x)) + t (1, sigma nu(x)) the Jacobian drops rank exactly
where t sigma lambda_i(x) = 1, so the locus is read off the principal
curvatures.  A brute-force rank scan of the sampled lattice is provided as an
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .frontgen import NullFront, jet
from .geometry import (AnalyticCurve, CurvatureData, GeneratingFront, curvature,
                       kappa_spline, periodic_derivative, vertices)

__all__ = [
    "CUSPIDAL",
    "NON_CUSPIDAL",
    "UNDETERMINED",
    "CompletenessReport",
    "FourVertexReport",
    "RankScan",
    "SingularLocus",
    "classify",
    "completeness_check",
    "compare_scan_with_formula",
    "curve_self_intersections",
    "four_vertex_audit",
    "rank_scan",
    "singular_locus",
]

CUSPIDAL = "cuspidal-edge"
NON_CUSPIDAL = "non-cuspidal"
UNDETERMINED = "undetermined"

# kappa' is zero below this fraction of max|kappa'|
DKAPPA_ZERO_REL = 1e-8
# a principal curvature is bounded away from zero above this fraction of max|lambda|
LAMBDA_BOUNDED_REL = 1e-6
# step of the five-point stencil used for C'(s), as a fraction of the grid spacing
_STENCIL_FRACTION = 0.05


@dataclass(frozen=True, eq=False)
class SingularLocus:
    """Singular points (x, branch, t, F(t, x)) with their labels.

    ``t`` is given in the lattice coordinate of the front (already corrected
    for any parallel shift).  Points on arcs where lambda_i tends to zero have
    ``t = inf``, a NaN image and ``unbounded`` set.
    """

    params: np.ndarray
    branch: np.ndarray
    t: np.ndarray
    image: np.ndarray
    unbounded: np.ndarray
    labels: np.ndarray
    annotations: np.ndarray
    constant_curvature: bool = False
    closed: bool = True
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def count(self, label: str) -> int:
        return int(np.sum(self.labels == label))

    @property
    def non_cuspidal_params(self) -> np.ndarray:
        return self.params[self.labels == NON_CUSPIDAL]

    def cuspidal_arcs(self) -> int:
        """Number of maximal runs of cuspidal-edge points in parameter order."""
        if len(self) == 0 or self.params.ndim != 1:
            return 0
        order = np.lexsort((self.params, self.branch))
        total = 0
        for b in np.unique(self.branch):
            sel = order[self.branch[order] == b]
            cusp = self.labels[sel] == CUSPIDAL
            if not cusp.any():
                continue
            if cusp.all():
                total += 1
                continue
            starts = np.sum(cusp & ~np.roll(cusp, 1)) if self.closed else \
                int(cusp[0]) + int(np.sum(cusp[1:] & ~cusp[:-1]))
            total += int(starts)
        return total


class _CurveFunctions:
    """f, nu, kappa and its derivatives at arbitrary parameters of a curve."""

    def __init__(self, gen: GeneratingFront, data: CurvatureData):
        self.analytic = isinstance(gen.analytic, AnalyticCurve)
        t = gen.grid[0]
        if self.analytic:
            a = gen.analytic
            self.position, self.normal = a.position, a.normal
            self.kappa, self.dkappa, self.d2kappa = a.kappa, a.dkappa, a.d2kappa
            return
        closed = gen.closed
        if closed:
            tt = np.append(t, t[0] + gen.period())
            pts = np.concatenate([gen.points, gen.points[:1]])
            nrm = np.concatenate([gen.normals, gen.normals[:1]])
            fs = CubicSpline(tt, pts, bc_type="periodic")
            ns = CubicSpline(tt, nrm, bc_type="periodic")
        else:
            fs, ns = CubicSpline(t, gen.points), CubicSpline(t, gen.normals)
        ks = kappa_spline(gen, data.kappa)
        self.position = fs

        def normal(s):
            v = ns(s)
            return v / np.linalg.norm(v, axis=-1, keepdims=True)

        self.normal = normal
        self.kappa = ks
        self.dkappa = ks.derivative()
        self.d2kappa = ks.derivative(2)


def _finite_lambda(lam: np.ndarray, scale: float):
    unbounded = np.abs(lam) < LAMBDA_BOUNDED_REL * scale
    with np.errstate(divide="ignore"):
        inv = np.where(unbounded, np.inf, 1.0 / np.where(unbounded, 1.0, lam))
    return inv, unbounded


def _kappa_zeros(gen: GeneratingFront, fn: _CurveFunctions, kappa: np.ndarray) -> np.ndarray:
    """Zeros of kappa bracketed by sign changes between nodes (inflections)."""
    t = gen.grid[0]
    n = len(t)
    out = []
    last = n if gen.closed else n - 1
    for i in range(last):
        j = (i + 1) % n
        if kappa[i] * kappa[j] < 0:
            a = t[i]
            b = t[j] if j > i else t[j] + gen.period()
            r = brentq(lambda x: float(fn.kappa(np.asarray(x))), a, b, xtol=1e-15, rtol=1e-15)
            out.append(r % gen.period() if gen.closed else r)
    return np.asarray(out, dtype=float)


def singular_locus(front: NullFront) -> SingularLocus:
    """Locus t = sigma / lambda_i(x) over every node and branch.

    For curves the refined vertex parameters are added to the node set (a
    node within 1e-9 of a vertex is replaced by it), so non-cuspidal points
    are located to bisection accuracy rather than grid accuracy.  Zeros of
    kappa between nodes are added as unbounded points.
    """
    gen = front.generator
    data = curvature(gen)
    sigma, shift = front.sigma, front.shift
    lam_nodes = data.principal
    scale = float(np.max(np.abs(lam_nodes))) if lam_nodes.size else 0.0

    if gen.is_curve:
        fn = _CurveFunctions(gen, data)
        verts = vertices(gen, data)
        s = gen.grid[0]
        if len(verts):
            span = (gen.period() if gen.closed else s[-1] - s[0])
            keep = np.ones(len(s), dtype=bool)
            for v in verts.params:
                d = np.abs(s - v)
                if gen.closed:
                    d = np.minimum(d, span - d)
                keep &= d > 1e-9 * span
            s = np.sort(np.concatenate([s[keep], verts.params]))
        zeros = _kappa_zeros(gen, fn, data.kappa)
        s = np.sort(np.concatenate([s, zeros]))
        kappa = fn.kappa(s)
        inv, unb = _finite_lambda(kappa, scale)
        unb |= np.isin(s, zeros)
        t_true = sigma * inv
        f, nu = fn.position(s), fn.normal(s)
        image = np.full((len(s), 3), np.nan)
        ok = ~unb
        image[ok, 0] = t_true[ok]
        image[ok, 1:] = f[ok] + (t_true[ok] * sigma)[:, None] * nu[ok]
        return SingularLocus(
            params=s, branch=np.zeros(len(s), dtype=int), t=t_true - shift,
            image=image, unbounded=unb,
            labels=np.full(len(s), UNDETERMINED, dtype=object),
            annotations=np.full(len(s), "", dtype=object),
            constant_curvature=verts.constant_curvature, closed=gen.closed,
            diagnostics={"vertices": verts.params})

    # hypersurfaces: one entry per node and branch
    grids = np.meshgrid(*gen.grid, indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=-1)
    nb = lam_nodes.shape[-1]
    lam = lam_nodes.reshape(-1, nb)
    f = gen.points.reshape(-1, gen.dim)
    nu = gen.normals.reshape(-1, gen.dim)
    rows_p, rows_b, rows_t, rows_img, rows_u = [], [], [], [], []
    for b in range(nb):
        inv, unb = _finite_lambda(lam[:, b], scale)
        t_true = sigma * inv
        img = np.full((len(f), gen.dim + 1), np.nan)
        ok = ~unb
        img[ok, 0] = t_true[ok]
        img[ok, 1:] = f[ok] + (t_true[ok] * sigma)[:, None] * nu[ok]
        rows_p.append(params)
        rows_b.append(np.full(len(f), b))
        rows_t.append(t_true - shift)
        rows_img.append(img)
        rows_u.append(unb)
    m = len(f) * nb
    return SingularLocus(
        params=np.concatenate(rows_p), branch=np.concatenate(rows_b),
        t=np.concatenate(rows_t), image=np.concatenate(rows_img),
        unbounded=np.concatenate(rows_u),
        labels=np.full(m, UNDETERMINED, dtype=object),
        annotations=np.full(m, "no type criterion for n >= 3", dtype=object),
        closed=gen.closed)


def _stencil(fun, s, h):
    """Five-point central difference of a vector-valued function."""
    return (fun(s - 2 * h) - 8 * fun(s - h) + 8 * fun(s + h) - fun(s + 2 * h)) / (12 * h)


def classify(locus: SingularLocus, front: NullFront) -> SingularLocus:
    """Label curve locus points cuspidal-edge or non-cuspidal.

    Two criteria are evaluated independently and must agree:

    * kappa-test: |kappa'(s)| <= 1e-8 max|kappa'| means non-cuspidal;
    * velocity test: C(s) = F(sigma / kappa(s), s) is differentiated
      numerically and compared with the matched bound sqrt(2) * cutoff / kappa^2,
      widened by the measured Weingarten residual |nu' + kappa f'| / |kappa|
      (zero up to rounding for closed-form curves) and by the change of the
      difference quotient under a doubled step.

    Disagreement gives ``undetermined``.  Non-cuspidal points with
    kappa'' != 0 are annotated as generic swallowtails.
    """
    gen = front.generator
    if not gen.is_curve:
        raise ValueError("classification is only defined for plane curves")
    data = curvature(gen)
    fn = _CurveFunctions(gen, data)
    s = locus.params
    labels = np.full(len(s), UNDETERMINED, dtype=object)
    notes = np.full(len(s), "", dtype=object)
    unb = locus.unbounded
    notes[unb] = "escapes to infinity"

    if locus.constant_curvature:
        labels[~unb] = NON_CUSPIDAL
        notes[~unb] = "constant curvature"
        return _relabel(locus, labels, notes, {"constant_curvature": True})

    cut = DKAPPA_ZERO_REL * float(np.max(np.abs(data.dkappa)))
    d2cut = DKAPPA_ZERO_REL * float(np.max(np.abs(data.d2kappa)))
    kappa = fn.kappa(s)
    dk = fn.dkappa(s)
    d2k = fn.d2kappa(s)
    sigma = front.sigma

    def C(x):
        k = fn.kappa(x)
        tt = sigma / k
        return np.concatenate([tt[..., None], fn.position(x) + (tt * sigma)[..., None] * fn.normal(x)],
                              axis=-1)

    def weingarten(x):
        return fn.normal(x) + fn.kappa(x)[..., None] * fn.position(x)

    spacing = float(np.median(np.diff(gen.grid[0])))
    h = _STENCIL_FRACTION * spacing if not fn.analytic else min(1e-4, 0.25 * spacing)
    ok = ~unb
    cprime = np.full(len(s), np.nan)
    resid = np.zeros(len(s))
    if ok.any():
        d1 = _stencil(C, s[ok], h)
        # truncation estimate from a doubled step widens the bound below
        resid[ok] = np.linalg.norm(d1 - _stencil(C, s[ok], 2 * h), axis=-1)
        cprime[ok] = np.linalg.norm(d1, axis=-1)
        w = _stencil(weingarten, s[ok], h)  # nu' + kappa' f + kappa f' -> remove kappa' f
        w = w - dk[ok, None] * fn.position(s[ok])
        resid[ok] += np.linalg.norm(w, axis=-1) / np.abs(kappa[ok])
    k_zero = np.abs(dk) <= cut
    c_bound = np.sqrt(2.0) * cut / kappa ** 2 + 2 * resid + 1e-12 * np.nanmax(cprime[ok], initial=1.0)
    c_zero = cprime <= c_bound
    agree = k_zero == c_zero
    labels[ok & agree & k_zero] = NON_CUSPIDAL
    labels[ok & agree & ~k_zero] = CUSPIDAL
    nc = ok & agree & k_zero
    notes[nc & (np.abs(d2k) > d2cut)] = "swallowtail (generic expectation)"
    notes[nc & (np.abs(d2k) <= d2cut)] = "degenerate"
    notes[ok & ~agree] = "kappa-test and velocity test disagree"
    diag = {
        "dkappa_cutoff": cut,
        "disagreements": int(np.sum(ok & ~agree)),
        "max_velocity_at_non_cuspidal": float(np.max(cprime[nc], initial=0.0)),
    }
    return _relabel(locus, labels, notes, diag)


def _relabel(locus, labels, notes, diag):
    d = dict(locus.diagnostics)
    d.update(diag)
    return SingularLocus(locus.params, locus.branch, locus.t, locus.image, locus.unbounded,
                         labels, notes, locus.constant_curvature, locus.closed, d)


@dataclass(frozen=True)
class CompletenessReport:
    verdict: str
    reasons: list
    domain_compact: bool
    nonempty: bool
    bounded: bool
    sign_constant: list
    same_sign: bool
    min_abs_lambda: float
    max_abs_lambda: float

    @property
    def complete(self) -> bool:
        return self.verdict == "complete"


def completeness_check(front: NullFront) -> CompletenessReport:
    """L-complete fronts are complete when their singular set is non-empty and
    compact; for closed generators this reduces to every principal curvature
    staying away from zero."""
    gen = front.generator
    lam = curvature(gen).principal.reshape(-1, curvature(gen).principal.shape[-1])
    amax = float(np.max(np.abs(lam))) if lam.size else 0.0
    amin = float(np.min(np.abs(lam))) if lam.size else 0.0
    reasons = []
    compact = gen.closed
    if not compact:
        reasons.append("parameter domain not compact")
    nonempty = amax > 0.0 and bool(np.any(np.abs(lam) >= LAMBDA_BOUNDED_REL * amax))
    if not nonempty:
        reasons.append("singular set empty (generator is flat)")
    signs = [bool(np.all(lam[:, b] > 0) or np.all(lam[:, b] < 0)) for b in range(lam.shape[1])]
    # a branch that changes sign between nodes passes through zero
    bounded = nonempty and amin >= LAMBDA_BOUNDED_REL * amax and all(signs)
    if nonempty and not bounded:
        reasons.append("unbounded singular set: a principal curvature reaches zero")
    same = bool(np.all(lam > 0) or np.all(lam < 0))
    verdict = "complete" if compact and nonempty and bounded else "incomplete"
    if verdict == "complete" and not same:
        # cannot happen for exact data; would indicate a sampling artifact
        reasons.append("principal curvatures of mixed sign on a complete front")
    return CompletenessReport(verdict, reasons, compact, nonempty, bounded, signs, same,
                              amin, amax)


def _segments_intersect(p, r, q, s):
    """Proper intersection of segments p->p+r and q->q+s, vectorised."""
    cross = lambda a, b: a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    denom = cross(r, s)
    qp = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        u = cross(qp, s) / denom
        v = cross(qp, r) / denom
    return (np.abs(denom) > 0) & (u >= 0) & (u < 1) & (v >= 0) & (v < 1)


def curve_self_intersections(gen: GeneratingFront) -> np.ndarray:
    """Index pairs (i, j) of polyline segments that cross, neighbours excluded."""
    pts = gen.points
    m = len(pts)
    closed = gen.closed
    a = pts
    b = np.roll(pts, -1, axis=0) if closed else pts[1:]
    a = a[: len(b)]
    k = len(a)
    i, j = np.triu_indices(k, 2)
    if closed:
        keep = ~((i == 0) & (j == k - 1))
        i, j = i[keep], j[keep]
    hit = _segments_intersect(a[i], b[i] - a[i], a[j], b[j] - a[j])
    del m
    return np.stack([i[hit], j[hit]], axis=-1)


@dataclass(frozen=True)
class FourVertexReport:
    status: str  # holds | violated | hypothesis-not-met | excluded
    embedded: bool
    complete: bool
    non_planar: bool
    non_cuspidal_count: int
    crossings: int
    reasons: list

    @property
    def applicable(self) -> bool:
        return self.status in ("holds", "violated")


def four_vertex_audit(front: NullFront, locus: SingularLocus | None = None) -> FourVertexReport:
    """Embedded generator + complete front + non-planar => at least four
    non-cuspidal points.  Constant curvature is excluded as degenerate."""
    gen = front.generator
    if not gen.is_curve:
        raise ValueError("the audit is defined for curve-generated fronts")
    if locus is None:
        locus = classify(singular_locus(front), front)
    comp = completeness_check(front)
    crossings = curve_self_intersections(gen) if gen.closed else np.empty((0, 2))
    embedded = len(crossings) == 0
    count = locus.count(NON_CUSPIDAL)
    non_planar = comp.nonempty
    reasons = []
    if locus.constant_curvature:
        return FourVertexReport("excluded", embedded, comp.complete, non_planar, count,
                                len(crossings), ["constant curvature"])
    if not embedded:
        reasons.append(f"generator not embedded ({len(crossings)} crossing segment pairs)")
    if not comp.complete:
        reasons.extend(comp.reasons)
    if not non_planar:
        reasons.append("front lies in a light-like plane")
    if reasons:
        status = "hypothesis-not-met"
    else:
        status = "holds" if count >= 4 else "violated"
    return FourVertexReport(status, embedded, comp.complete, non_planar, count,
                            len(crossings), reasons)


# -- brute-force oracle -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RankScan:
    """Lattice cells (k, j) between t_k and t_{k+1} at node j where dF drops rank."""

    t_values: np.ndarray
    cells: np.ndarray  # bool, shape (len(t) - 1, nodes)
    max_flagged_residual: float = 0.0  # largest |w| at a flagged cell, relative to its column


def _maximal_minors(jac: np.ndarray) -> np.ndarray:
    """Generalised cross product: all n x n minors of an (n+1) x n Jacobian."""
    rows = jac.shape[-2]
    cols = jac.shape[-1]
    out = [np.linalg.det(jac[..., list(r), :]) for r in combinations(range(rows), cols)]
    return np.stack(out, axis=-1)


def rank_scan(front: NullFront, zero_rtol: float = 1e-8, *,
              finite_differences: bool | None = None) -> RankScan:
    """Detect rank drops of dF on the sampled lattice without curvature.

    The Jacobian comes from :func:`frontgen.jet` (closed-form f' and nu' when
    the generator has them), or from differences of the sampled F values when
    ``finite_differences`` is set or no closed form exists.  The maximal
    minors of dF form a vector w(t), affine in t, that vanishes exactly where
    the rank drops.  A cell is flagged when the closest approach of w to zero
    falls inside it, or when a sample's minor vector is negligible.
    """
    gen = front.generator
    if not gen.is_curve:
        raise ValueError("the lattice scan is implemented for curve fronts")
    if finite_differences is None:
        finite_differences = gen.analytic is None
    tv = front.t_values
    if finite_differences:
        samples = front.samples()  # (nt, m, 3)
        s = gen.grid[0]
        if gen.closed:
            F_s = periodic_derivative(samples, s[1] - s[0], axis=1)
        else:
            F_s = np.gradient(samples, s, axis=1, edge_order=2)
        F_t = np.gradient(samples, tv, axis=0)
        jac = np.stack([F_t, F_s], axis=-1)
    else:
        jac = np.stack([jet(front, t).dF() for t in tv])
    w = _maximal_minors(jac)
    norm = np.linalg.norm(w, axis=-1)
    scale = np.linalg.norm(jac[..., 0], axis=-1) * np.linalg.norm(jac[..., 1], axis=-1)
    zero = norm <= zero_rtol * np.max(scale, axis=0, keepdims=True)
    # w is affine in t; w . dw/dt changes sign where |w| is smallest, which is
    # robust to a small residual left by differencing
    dw = np.diff(w, axis=0)
    flip = np.sum(w[:-1] * dw, axis=-1) * np.sum(w[1:] * dw, axis=-1) < 0
    rel = np.minimum(norm[:-1], norm[1:]) / np.max(norm, axis=0, keepdims=True)
    cells = flip | zero[:-1] | zero[1:]
    return RankScan(tv, cells, float(np.max(rel[flip], initial=0.0)))


def compare_scan_with_formula(front: NullFront, scan: RankScan | None = None) -> dict:
    """Symmetric agreement of the rank scan with t = sigma / kappa, per node.

    Returns counts of scan cells with no formula point within one cell, and of
    formula points strictly inside the window with no flagged cell within
    one cell.
    """
    scan = scan or rank_scan(front)
    gen = front.generator
    tv = scan.t_values
    dt = float(np.max(np.diff(tv)))
    kappa = curvature(gen).kappa
    scale = float(np.max(np.abs(kappa)))
    inv, unb = _finite_lambda(kappa, scale)
    tf = front.sigma * inv - front.shift  # per node
    lo, hi = tv[:-1], tv[1:]
    # scan -> formula
    k_idx, j_idx = np.nonzero(scan.cells)
    near = (~unb[j_idx]) & (tf[j_idx] >= lo[k_idx] - dt) & (tf[j_idx] <= hi[k_idx] + dt)
    unmatched_scan = int(np.sum(~near))
    # formula -> scan
    inside = (~unb) & (tf > tv[0] + dt) & (tf < tv[-1] - dt)
    missing = 0
    for j in np.nonzero(inside)[0]:
        k = int(np.searchsorted(tv, tf[j]) - 1)
        ks = slice(max(k - 1, 0), min(k + 2, len(lo)))
        if not scan.cells[ks, j].any():
            missing += 1
    return {
        "scan_cells": int(scan.cells.sum()),
        "formula_points": int(np.sum(inside)),
        "unmatched_scan_cells": unmatched_scan,
        "unmatched_formula_points": missing,
        "cell": dt,
    }
