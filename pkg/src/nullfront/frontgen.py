"""Normal-form null wave fronts F(t, x) = (0, f(x)) + t (1, sigma nu(x)).

The ruling parameter t ranges over all of R; ``t_values`` is only the
lattice on which samples are materialised.  Because F is affine in t, any
statement about all t follows from a few distinct t values per node.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .geometry import GeneratingFront
from .lorentz import euclidean_inner, is_future_pointing, metric, minkowski_inner

__all__ = [
    "ConsistencyError",
    "FrontJet",
    "InducedMetric",
    "NullFront",
    "SINGULAR_RTOL",
    "e_normalized_field",
    "induced_metric",
    "invariant_suite",
    "jet",
    "lift_embedding_check",
    "lift_is_injective",
    "normal_form",
    "parallel_front",
    "time_reflection",
]

# dF is rank-deficient when sigma_min <= SINGULAR_RTOL * sigma_max
SINGULAR_RTOL = 1e-8


class ConsistencyError(RuntimeError):
    """An identity that holds by construction was violated numerically."""


def time_reflection(dim: int) -> np.ndarray:
    """diag(-1, 1, ..., 1), mapping the sigma=+ front onto the sigma=- one."""
    return metric(dim)


@dataclass(frozen=True, eq=False)
class NullFront:
    """Sampled normal form of the null wave front generated by ``generator``.

    ``shift`` implements parallel fronts: the sample at lattice value t is
    F(t + shift, x).
    """

    generator: GeneratingFront
    sigma: int
    t_values: np.ndarray
    shift: float = 0.0

    @property
    def n(self) -> int:
        """Dimension of the parameter space R x Sigma^{n-1}."""
        return self.generator.dim

    @property
    def t_window(self) -> tuple[float, float]:
        return float(self.t_values[0]), float(self.t_values[-1])

    def lifted_generator(self) -> np.ndarray:
        """f-check: (0, f(x)) at every node."""
        f = self.generator.points
        return np.concatenate([np.zeros(f.shape[:-1] + (1,)), f], axis=-1)

    def xi(self) -> np.ndarray:
        """E-normalized null normal (1, sigma nu(x)) at every node."""
        nu = self.generator.normals
        return np.concatenate([np.ones(nu.shape[:-1] + (1,)), self.sigma * nu], axis=-1)

    def _positive(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        xi_plus = np.concatenate([np.ones(self.generator.normals.shape[:-1] + (1,)),
                                  self.generator.normals], axis=-1)
        tt = t.reshape(t.shape + (1,) * (xi_plus.ndim))
        return self.lifted_generator() + tt * xi_plus

    def evaluate(self, t) -> np.ndarray:
        """F(t + shift, x) for every node; shape ``t.shape + grid_shape + (n+1,)``."""
        t = np.asarray(t, dtype=float) + self.shift
        if self.sigma > 0:
            return self._positive(t)
        # F_-(t, x) = R F_+(-t, x)
        return self._positive(-t) @ time_reflection(self.n + 1)

    def samples(self) -> np.ndarray:
        """All lattice samples, shape ``(len(t_values),) + grid_shape + (n+1,)``."""
        return self.evaluate(self.t_values)

    def tau(self) -> np.ndarray:
        """Height tau(F) = F^0 at every lattice sample."""
        return self.samples()[..., 0]


def normal_form(generator: GeneratingFront, sigma: int = 1,
                t_window: tuple[float, float] = (-1.0, 1.0),
                t_resolution: int = 64) -> NullFront:
    """Null front (t, x) -> (0, f(x)) + t (1, sigma nu(x)) sampled on a t-lattice."""
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    a, b = map(float, t_window)
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise ValueError(f"empty t window {t_window!r}")
    if t_resolution < 2:
        raise ValueError("t_resolution must be at least 2")
    return NullFront(generator, sigma, np.linspace(a, b, t_resolution))


def e_normalized_field(front: NullFront, tol: float = 1e-8) -> np.ndarray:
    """The field (1, sigma nu), after asserting it is future-pointing, null and
    of Euclidean length sqrt(2)."""
    xi = front.xi()
    if np.max(np.abs(euclidean_inner(xi, xi) - 2.0)) > tol:
        raise ConsistencyError("E-normalization violated: (xi, xi)_E != 2")
    if np.max(np.abs(minkowski_inner(xi, xi))) > tol:
        raise ConsistencyError("normal field is not null")
    if not np.all(is_future_pointing(xi)):
        raise ConsistencyError("normal field is not future-pointing")
    return xi


@dataclass(frozen=True, eq=False)
class FrontJet:
    """Jacobian data of F and of its null normal at one t value.

    ``F_u`` and ``xi_u`` are tuples with one array per Sigma coordinate; every
    array has shape ``grid_shape + (n+1,)``.
    """

    t: float
    F_t: np.ndarray
    F_u: tuple
    xi_u: tuple

    def dF(self) -> np.ndarray:
        """Jacobian columns (F_t, F_u1, ...), shape ``grid_shape + (n+1, n)``."""
        return np.stack((self.F_t,) + tuple(self.F_u), axis=-1)

    def M(self) -> np.ndarray:
        """Lift Jacobian: dF stacked over d(xi), shape ``grid_shape + (2n+2, n)``."""
        xi_t = np.zeros_like(self.F_t)
        lower = np.stack((xi_t,) + tuple(self.xi_u), axis=-1)
        return np.concatenate([self.dF(), lower], axis=-2)

    def rank_dF(self, rtol: float = SINGULAR_RTOL) -> np.ndarray:
        return _rank(self.dF(), rtol)

    def rank_M(self, rtol: float = SINGULAR_RTOL) -> np.ndarray:
        return _rank(self.M(), rtol)

    def singular(self, rtol: float = SINGULAR_RTOL) -> np.ndarray:
        return self.rank_dF(rtol) < self.F_t.shape[-1] - 1


def _rank(m: np.ndarray, rtol: float) -> np.ndarray:
    s = np.linalg.svd(m, compute_uv=False)
    return np.sum(s > rtol * s[..., :1], axis=-1)


def _generator_derivatives(gen: GeneratingFront, finite_differences: bool):
    if finite_differences and gen.analytic is not None:
        gen = replace(gen, analytic=None)
    return gen.tangents(), gen.normal_derivatives()


def jet(front: NullFront, t: float, index=None, *,
        finite_differences: bool = False) -> FrontJet:
    """Jacobian columns at ruling value ``t`` (before ``shift``) for every node,
    or for the node selected by ``index``.

    Closed-form derivatives are used when the generator has them unless
    ``finite_differences`` is set.
    """
    tt = float(t) + front.shift
    s = front.sigma
    f_u, nu_u = _generator_derivatives(front.generator, finite_differences)
    xi = front.xi()
    zeros = np.zeros(xi.shape[:-1] + (1,))
    F_u, xi_u = [], []
    for fd, nd in zip(f_u, nu_u):
        # F^0 = t; spatial part f + t sigma nu
        F_u.append(np.concatenate([zeros, fd + tt * s * nd], axis=-1))
        xi_u.append(np.concatenate([zeros, s * nd], axis=-1))
    jt = FrontJet(tt, xi, tuple(F_u), tuple(xi_u))
    if index is None:
        return jt
    idx = np.index_exp[index] if not isinstance(index, tuple) else index
    return FrontJet(tt, xi[idx], tuple(a[idx] for a in F_u), tuple(a[idx] for a in xi_u))


@dataclass(frozen=True, eq=False)
class InducedMetric:
    """Gram matrix F*<,> in the coordinates (t, u_1, ...) with its spectrum."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def null_residual(self) -> np.ndarray:
        """|G e_t|: how far d/dt is from the kernel of the metric."""
        return np.linalg.norm(self.matrix[..., :, 0], axis=-1)


def induced_metric(front: NullFront, t: float, index=None, **kw) -> InducedMetric:
    j = jet(front, t, index, **kw)
    d = j.dF()
    eta = metric(d.shape[-2])
    g = np.swapaxes(d, -1, -2) @ eta @ d
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    w, v = np.linalg.eigh(g)
    return InducedMetric(g, w, v)


def parallel_front(front: NullFront, delta: float) -> NullFront:
    """F^delta = F + delta xi, realised as a shift of the ruling lattice.

    The image set is unchanged; only the parametrisation slides along the
    rulings.
    """
    return replace(front, shift=front.shift + float(delta))


def lift_is_injective(lift: np.ndarray, *, closed: bool, tol: float | None = None,
                      exclude: int = 2) -> tuple[bool, np.ndarray]:
    """Pairwise scan of lift samples for coincidences.

    Pairs closer than ``tol`` that are more than ``exclude`` grid steps apart
    (cyclically when ``closed``) witness non-injectivity.  The default
    ``tol`` is 3/4 of the median sample spacing.  Returns ``(ok, pairs)``.
    """
    lift = np.asarray(lift, dtype=float)
    m = len(lift)
    steps = np.linalg.norm(np.diff(lift, axis=0), axis=-1)
    if tol is None:
        tol = 0.75 * float(np.median(steps)) if len(steps) else 0.0
    pairs = cKDTree(lift).query_pairs(r=tol, output_type="ndarray")
    if len(pairs) == 0:
        return True, np.empty((0, 2), dtype=int)
    gap = np.abs(pairs[:, 0] - pairs[:, 1])
    if closed:
        gap = np.minimum(gap, m - gap)
    bad = pairs[gap > exclude]
    return len(bad) == 0, bad


def lift_embedding_check(front, tol: float | None = None) -> bool:
    """True when l_f = (f, sigma nu) is injective on the sample grid (curves).

    Accepts a :class:`NullFront` or a :class:`GeneratingFront`.
    """
    if isinstance(front, NullFront):
        gen, s = front.generator, front.sigma
    else:
        gen, s = front, 1
    if not gen.is_curve:
        raise ValueError("the pairwise lift scan is implemented for curves")
    lift = np.concatenate([gen.points, s * gen.normals], axis=-1)
    ok, _ = lift_is_injective(lift, closed=gen.closed, tol=tol)
    return ok


def invariant_suite(front: NullFront, t_samples=None) -> dict:
    """Largest violation of each defining identity of the front.

    ``t_samples`` defaults to three distinct ruling values (first, middle
    and last of the lattice); since F is affine in t this covers all t.
    Rank counts are reported as the number of offending samples.
    """
    if t_samples is None:
        tv = front.t_values
        t_samples = (tv[0], tv[len(tv) // 2], tv[-1])
    xi = front.xi()
    out = {
        "xi_null": float(np.max(np.abs(minkowski_inner(xi, xi)))),
        "xi_euclidean_norm": float(np.max(np.abs(euclidean_inner(xi, xi) - 2.0))),
        "xi_orthogonal_to_dF": 0.0,
        "F_t_equals_xi": 0.0,
        "rank_M_deficient_samples": 0,
        "metric_min_eigenvalue": 0.0,
        "metric_null_direction": 0.0,
        "metric_negative_eigenvalue": 0.0,
    }
    n = front.n
    for t in t_samples:
        j = jet(front, t)
        orth = max(float(np.max(np.abs(minkowski_inner(xi, fu)))) for fu in j.F_u)
        out["xi_orthogonal_to_dF"] = max(out["xi_orthogonal_to_dF"], orth)
        direct = front.evaluate(np.asarray([t, t + 1.0]))
        out["F_t_equals_xi"] = max(out["F_t_equals_xi"],
                                   float(np.max(np.abs(direct[1] - direct[0] - xi))))
        out["rank_M_deficient_samples"] += int(np.sum(j.rank_M() != n))
        g = induced_metric(front, t)
        out["metric_min_eigenvalue"] = max(out["metric_min_eigenvalue"],
                                           float(np.max(np.abs(g.eigenvalues[..., 0]))))
        out["metric_null_direction"] = max(out["metric_null_direction"],
                                           float(np.max(g.null_residual())))
        out["metric_negative_eigenvalue"] = max(out["metric_negative_eigenvalue"],
                                                float(np.max(-g.eigenvalues[..., 0])))
    return out
